fn main() {
    std::process::exit(dstrans::run(std::env::args_os()));
}
