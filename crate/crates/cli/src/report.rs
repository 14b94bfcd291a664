//! Per-eigenpair residual rows (CSV) and shift diagnostics (JSON).

use std::io::Write;
use std::str::FromStr;

use dstrans_core::{
    best_possible_residual, relative_residual, EigenPair, Matrix, NormSettings, PencilNorms,
    ShiftDiagnostics, SymMatrix, RESIDUAL_FLOOR,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Relative stopping tolerance of the `sigma_min` iteration behind `best_res`.
pub const BEST_RESIDUAL_TOL: f64 = 1e-8;

pub const CSV_HEADER: [&str; 9] = [
    "index",
    "alpha",
    "beta",
    "lambda",
    "rel_res",
    "best_res",
    "negative",
    "shift_factor",
    "two_sided_factor",
];

/// Which rows get a best-possible residual.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BestResiduals {
    None,
    All,
    /// `K` rows spread evenly over the sorted spectrum.
    Sample(usize),
}

impl FromStr for BestResiduals {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(BestResiduals::None),
            "all" => Ok(BestResiduals::All),
            _ => match s.strip_prefix("sample:").map(str::parse::<usize>) {
                Some(Ok(k)) if k > 0 => Ok(BestResiduals::Sample(k)),
                _ => Err(format!("expected all, none or sample:K with K > 0, got '{s}'")),
            },
        }
    }
}

impl BestResiduals {
    fn selected(self, count: usize) -> Vec<bool> {
        match self {
            BestResiduals::None => vec![false; count],
            BestResiduals::All => vec![true; count],
            BestResiduals::Sample(k) if k >= count => vec![true; count],
            BestResiduals::Sample(k) => {
                let mut sel = vec![false; count];
                if k == 1 {
                    sel[0] = true;
                } else {
                    for s in 0..k {
                        sel[s * (count - 1) / (k - 1)] = true;
                    }
                }
                sel
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportRow {
    /// 1-based position after sorting by `lambda`.
    pub index: usize,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub rel_res: f64,
    pub best_res: Option<f64>,
    pub negative: bool,
    /// `|1 - lambda / sigma|`, absent for the reference method.
    pub shift_factor: Option<f64>,
    /// `|(1 - lambda / sigma)(1 - sigma / lambda)|`.
    pub two_sided_factor: Option<f64>,
}

/// Builds rows sorted by `lambda` ascending. `v` holds one eigenvector per
/// pair; `sigma` is the shift when the pairs came from a transformed problem.
pub fn build_rows(
    a: &SymMatrix,
    b: &SymMatrix,
    norms: PencilNorms,
    pairs: &[EigenPair],
    v: &Matrix,
    sigma: Option<f64>,
    best: BestResiduals,
) -> Result<Vec<ReportRow>> {
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&i, &j| pairs[i].lambda().total_cmp(&pairs[j].lambda()));
    let selected = best.selected(order.len());

    order
        .par_iter()
        .zip(selected.par_iter())
        .enumerate()
        .map(|(pos, (&k, &want_best))| {
            let p = pairs[k];
            let lambda = p.lambda();
            let rel_res = relative_residual(a, b, norms, p.alpha, p.beta, v.col(k))?;
            let best_res = if want_best {
                Some(best_possible_residual(a, b, norms, p.alpha, p.beta)?.max(RESIDUAL_FLOOR))
            } else {
                None
            };
            let (shift_factor, two_sided_factor) = match sigma {
                Some(s) => {
                    let f = 1.0 - lambda / s;
                    (Some(f.abs()), Some((f * (1.0 - s / lambda)).abs()))
                }
                None => (None, None),
            };
            Ok(ReportRow {
                index: pos + 1,
                alpha: p.alpha,
                beta: p.beta,
                lambda,
                rel_res,
                best_res,
                negative: lambda < 0.0,
                shift_factor,
                two_sided_factor,
            })
        })
        .collect()
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn record(row: &ReportRow) -> Vec<String> {
    vec![
        row.index.to_string(),
        fmt_f64(row.alpha),
        fmt_f64(row.beta),
        fmt_f64(row.lambda),
        fmt_f64(row.rel_res),
        fmt_opt(row.best_res),
        u8::from(row.negative).to_string(),
        fmt_opt(row.shift_factor),
        fmt_opt(row.two_sided_factor),
    ]
}

pub fn write_csv(w: impl Write, rows: &[ReportRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for row in rows {
        out.write_record(record(row))?;
    }
    out.flush().map_err(|e| CliError::Csv(e.into()))?;
    Ok(())
}

/// CSV with a leading `method` column, one block of rows per method.
pub fn write_compare_csv(w: impl Write, blocks: &[(&str, &[ReportRow])]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(std::iter::once("method").chain(CSV_HEADER))?;
    for (method, rows) in blocks {
        for row in *rows {
            out.write_record(std::iter::once(method.to_string()).chain(record(row)))?;
        }
    }
    out.flush().map_err(|e| CliError::Csv(e.into()))?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl From<dstrans_core::Norm2Estimate> for NormReport {
    fn from(e: dstrans_core::Norm2Estimate) -> Self {
        NormReport { value: e.value, iterations: e.iterations, converged: e.converged }
    }
}

/// Diagnostics file contents. `mu` is `null` when `X^T Da X = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub sigma: f64,
    pub sigma0: f64,
    pub eta: f64,
    #[serde(rename = "etaX")]
    pub etax: f64,
    pub etax_max: f64,
    pub gamma: f64,
    pub mu: Option<f64>,
    pub rank_r: usize,
    pub n: usize,
    pub infinite_eigenvalues: usize,
    pub norm_a: NormReport,
    pub norm_b: NormReport,
    pub norm_shifted: NormReport,
    pub norm_x: NormReport,
    pub norm_w: f64,
    pub norm_tol: f64,
    pub norm_max_iter: usize,
    pub cholesky_tol: f64,
    pub best_residual_tol: f64,
    pub residual_floor: f64,
}

impl DiagnosticsReport {
    pub fn new(
        d: &ShiftDiagnostics,
        rank_r: usize,
        n: usize,
        etax_max: f64,
        cholesky_tol: f64,
    ) -> Self {
        let NormSettings { tol, max_iter } = d.norm_settings;
        DiagnosticsReport {
            sigma: d.sigma,
            sigma0: d.sigma0,
            eta: d.eta,
            etax: d.etax,
            etax_max,
            gamma: d.gamma,
            mu: d.mu.is_finite().then_some(d.mu),
            rank_r,
            n,
            infinite_eigenvalues: n - rank_r,
            norm_a: d.norm_a.into(),
            norm_b: d.norm_b.into(),
            norm_shifted: d.norm_shifted.into(),
            norm_x: d.norm_x.into(),
            norm_w: d.norm_w,
            norm_tol: tol,
            norm_max_iter: max_iter,
            cholesky_tol,
            best_residual_tol: BEST_RESIDUAL_TOL,
            residual_floor: RESIDUAL_FLOOR,
        }
    }
}
