//! Command-line driver for the `dstrans-core` solver: Matrix Market input,
//! residual reports and the comparison against the Cholesky-based method.

pub mod commands;
pub mod error;
pub mod mm;
pub mod modify;
pub mod report;

pub use commands::{run, solve_pencil, standard_pencil, Cli, Command, SolveArgs, SolveOutcome};
pub use error::{CliError, Result};
pub use mm::{parse_matrix_market, read_matrix_market, write_matrix_market};
pub use modify::modify_mass_matrix;
pub use report::{build_rows, BestResiduals, DiagnosticsReport, ReportRow};
