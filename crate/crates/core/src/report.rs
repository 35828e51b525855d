//! CSV tables and the text summary written by the pipeline.
//!
//! Headers are stable:
//!
//! | file | columns |
//! |------|---------|
//! | extrema | `d_mm,n,kind,rho_m,sigma_m` |
//! | fits | `d_mm,a_per_m2,phi_prime,residual_rms` |
//! | estimate | `lambda_eq_m,sigma_m,slope,intercept` |
//! | a vs d | `d_mm,a_per_m2,a_sigma_per_m2,a_theory_per_m2` |
//!
//! Numbers use the shortest representation that round-trips, so identical
//! inputs give byte-identical files.

use std::path::Path;

use crate::analysis::{ExtremaSet, ParabolicFit, WavelengthEstimate};
use crate::error::{Error, Result};
use crate::fs::write_atomic;

pub const EXTREMA_HEADER: [&str; 5] = ["d_mm", "n", "kind", "rho_m", "sigma_m"];
pub const FITS_HEADER: [&str; 4] = ["d_mm", "a_per_m2", "phi_prime", "residual_rms"];
pub const ESTIMATE_HEADER: [&str; 4] = ["lambda_eq_m", "sigma_m", "slope", "intercept"];
pub const A_VS_D_HEADER: [&str; 4] = ["d_mm", "a_per_m2", "a_sigma_per_m2", "a_theory_per_m2"];

fn table<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner()
        .map_err(|e| Error::Csv(csv::Error::from(e.into_error())))
}

fn mm(d: f64) -> String {
    // d is stored in metres; millimetres are rounded to 1 pm to keep 17 as 17
    let v = (d * 1e3 * 1e9).round() / 1e9;
    v.to_string()
}

pub fn extrema_csv(rows: &[(f64, &ExtremaSet)]) -> Result<Vec<u8>> {
    table(
        &EXTREMA_HEADER,
        rows.iter().flat_map(|(d, ex)| {
            ex.entries.iter().map(move |e| {
                vec![
                    mm(*d),
                    e.order.to_string(),
                    e.kind.to_string(),
                    e.radius.to_string(),
                    e.uncertainty.to_string(),
                ]
            })
        }),
    )
}

pub fn fits_csv(rows: &[(f64, ParabolicFit)]) -> Result<Vec<u8>> {
    table(
        &FITS_HEADER,
        rows.iter().map(|(d, f)| {
            vec![mm(*d), f.a.to_string(), f.phi_prime.to_string(), f.residual_rms.to_string()]
        }),
    )
}

pub fn estimate_csv(est: &WavelengthEstimate) -> Result<Vec<u8>> {
    table(
        &ESTIMATE_HEADER,
        [vec![
            est.lambda_eq.to_string(),
            est.sigma.to_string(),
            est.slope.to_string(),
            est.intercept.to_string(),
        ]],
    )
}

/// `a` against `d` next to the line `a = d/(2·f_c²·λ_eq)`.
pub fn a_vs_d_csv(rows: &[(f64, ParabolicFit)], f_c: f64, lambda_eq: f64) -> Result<Vec<u8>> {
    table(
        &A_VS_D_HEADER,
        rows.iter().map(|(d, f)| {
            vec![
                mm(*d),
                f.a.to_string(),
                f.a_sigma().to_string(),
                (d / (2.0 * f_c * f_c * lambda_eq)).to_string(),
            ]
        }),
    )
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    write_atomic(path, bytes)
}

/// Human-readable result with the estimate, the expected `λ_S²/λ_I` and
/// their ratio.
pub fn summary(est: &WavelengthEstimate, theory: f64, distances: &[f64]) -> String {
    let nm = |v: f64| v * 1e9;
    let ds: Vec<String> = distances.iter().map(|&d| format!("{} mm", mm(d))).collect();
    format!(
        "distances:            {}\n\
         equivalent wavelength: {:.2} ± {:.2} nm\n\
         expected (ls^2/li):    {:.2} nm\n\
         ratio:                 {:.4}\n\
         deviation:             {:+.2} %  ({:.2} sigma)\n\
         slope da/dd:           {:.6e} ± {:.2e} m^-3\n\
         intercept:             {:.4e} ± {:.2e} m^-2 ({})\n",
        ds.join(", "),
        nm(est.lambda_eq),
        nm(est.sigma),
        nm(theory),
        est.lambda_eq / theory,
        100.0 * (est.lambda_eq / theory - 1.0),
        if est.sigma > 0.0 { (est.lambda_eq - theory).abs() / est.sigma } else { f64::INFINITY },
        est.slope,
        est.slope_sigma,
        est.intercept,
        est.intercept_sigma,
        if est.intercept_consistent() { "consistent with 0" } else { "NOT consistent with 0 at 3 sigma" },
    )
}
