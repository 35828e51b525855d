//! Interferometer geometry, small-angle signal/idler relations and the
//! scalar 1D propagation kernels used to justify the defocus model.
//!
//! All lengths are SI metres, angles radians, wavenumbers rad/m.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest angle (rad) accepted by the small-angle relations.
pub const PARAXIAL_LIMIT: f64 = 0.2;

/// Relative tolerance of the energy-conservation check.
pub const ENERGY_TOLERANCE: f64 = 1e-3;

/// Largest `delta²/f²` for which the displaced lens is treated as free
/// propagation.
pub const DEFOCUS_VALIDITY_BOUND: f64 = 0.06;

/// Physical parameters of the two-crystal interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalConfig {
    /// Signal (detected) wavelength.
    pub lambda_s: f64,
    /// Idler (undetected) wavelength.
    pub lambda_i: f64,
    /// Pump wavelength.
    pub lambda_p: f64,
    /// Focal length of the lens in front of the camera.
    pub f_c: f64,
    /// Focal length of the lenses of the idler 4f system.
    pub f_idler: f64,
    /// Gaussian pump waist at the crystals.
    pub pump_waist: f64,
}

impl OpticalConfig {
    pub fn new(
        lambda_s: f64,
        lambda_i: f64,
        lambda_p: f64,
        f_c: f64,
        f_idler: f64,
        pump_waist: f64,
    ) -> Result<Self> {
        let named = [
            ("lambda_s", lambda_s),
            ("lambda_i", lambda_i),
            ("lambda_p", lambda_p),
            ("f_c", f_c),
            ("f_idler", f_idler),
            ("pump_waist", pump_waist),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if lambda_s >= lambda_i {
            return Err(Error::domain(format!(
                "signal wavelength {lambda_s} must be shorter than idler wavelength {lambda_i}"
            )));
        }
        if !check_energy_conservation(lambda_s, lambda_i, lambda_p)? {
            return Err(Error::domain(format!(
                "1/lambda_p != 1/lambda_s + 1/lambda_i within {ENERGY_TOLERANCE} \
                 (lambda_s={lambda_s}, lambda_i={lambda_i}, lambda_p={lambda_p})"
            )));
        }
        Ok(Self {
            lambda_s,
            lambda_i,
            lambda_p,
            f_c,
            f_idler,
            pump_waist,
        })
    }

    /// 810/1550/532 nm, 250 µm pump waist, f_c = 150 mm, f = 100 mm.
    pub fn reference() -> Self {
        Self::new(810e-9, 1550e-9, 532e-9, 0.150, 0.100, 250e-6)
            .expect("built-in parameters are consistent")
    }

    pub fn k_signal(&self) -> f64 {
        2.0 * PI / self.lambda_s
    }

    pub fn k_idler(&self) -> f64 {
        2.0 * PI / self.lambda_i
    }

    /// `lambda_s² / lambda_i`.
    pub fn equivalent_wavelength(&self) -> f64 {
        self.lambda_s * self.lambda_s / self.lambda_i
    }

    pub fn with_f_c(mut self, f_c: f64) -> Result<Self> {
        self.f_c = f_c;
        Self::new(
            self.lambda_s,
            self.lambda_i,
            self.lambda_p,
            self.f_c,
            self.f_idler,
            self.pump_waist,
        )
    }

    pub fn with_pump_waist(mut self, pump_waist: f64) -> Result<Self> {
        self.pump_waist = pump_waist;
        Self::new(
            self.lambda_s,
            self.lambda_i,
            self.lambda_p,
            self.f_c,
            self.f_idler,
            self.pump_waist,
        )
    }
}

impl Default for OpticalConfig {
    fn default() -> Self {
        Self::reference()
    }
}

/// True when `1/lambda_p = 1/lambda_s + 1/lambda_i` to within
/// [`ENERGY_TOLERANCE`] relative.
pub fn check_energy_conservation(lambda_s: f64, lambda_i: f64, lambda_p: f64) -> Result<bool> {
    for v in [lambda_s, lambda_i, lambda_p] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(format!("wavelengths must be positive, got {v}")));
        }
    }
    let inv_p = 1.0 / lambda_p;
    let residual = (inv_p - 1.0 / lambda_s - 1.0 / lambda_i).abs() / inv_p;
    Ok(residual <= ENERGY_TOLERANCE)
}

fn check_paraxial(theta: f64, what: &str) -> Result<()> {
    if !theta.is_finite() || theta.abs() >= PARAXIAL_LIMIT {
        return Err(Error::domain(format!(
            "{what} angle {theta} rad outside paraxial bound {PARAXIAL_LIMIT}"
        )));
    }
    Ok(())
}

/// Partner idler angle of a signal plane-wave component:
/// `theta_i = theta_s * lambda_i / lambda_s`.
pub fn signal_angle_to_idler_angle(theta_s: f64, cfg: &OpticalConfig) -> Result<f64> {
    check_paraxial(theta_s, "signal")?;
    Ok(theta_s * cfg.lambda_i / cfg.lambda_s)
}

/// Signal and partner idler angles for a camera radius `rho` behind a lens
/// of focal length `f_c`.
pub fn camera_radius_to_angles(rho: f64, cfg: &OpticalConfig) -> Result<(f64, f64)> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::domain(format!("camera radius must be >= 0, got {rho}")));
    }
    let theta_s = rho / cfg.f_c;
    let theta_i = signal_angle_to_idler_angle(theta_s, cfg)?;
    Ok((theta_s, theta_i))
}

/// Equivalent free-space distance of a lens displaced by `delta` inside a
/// 4f system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defocus {
    pub distance: f64,
    /// `delta² / f²`; the approximation holds while this is small.
    pub validity_ratio: f64,
}

impl Defocus {
    pub fn within_validity(&self) -> bool {
        self.validity_ratio <= DEFOCUS_VALIDITY_BOUND
    }
}

/// `d = f²·delta / (f² + delta²)`. Negative `delta` gives negative `d`.
pub fn defocus_to_distance(delta: f64, f_idler: f64) -> Result<Defocus> {
    if !(f_idler.is_finite() && f_idler > 0.0) {
        return Err(Error::domain(format!("f_idler must be positive, got {f_idler}")));
    }
    if !delta.is_finite() {
        return Err(Error::domain("delta must be finite"));
    }
    let f2 = f_idler * f_idler;
    Ok(Defocus {
        distance: f2 * delta / (f2 + delta * delta),
        validity_ratio: delta * delta / f2,
    })
}

/// Phase acquired by an idler plane wave at angle `theta_i` over a free
/// distance `d`, relative to the axial wave: `(2π/λ_i)·d·θ_i²/2`.
pub fn propagation_phase(theta_i: f64, d: f64, lambda_i: f64) -> Result<f64> {
    check_paraxial(theta_i, "idler")?;
    if !(lambda_i > 0.0) {
        return Err(Error::domain("lambda_i must be positive"));
    }
    Ok(2.0 * PI / lambda_i * d * theta_i * theta_i / 2.0)
}

/// Uniformly sampled complex 1D field.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField1D {
    samples: Vec<Complex64>,
    spacing: f64,
    origin: f64,
}

impl ComplexField1D {
    pub const MIN_SAMPLES: usize = 8;

    pub fn new(samples: Vec<Complex64>, spacing: f64, origin: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::domain(format!("spacing must be positive, got {spacing}")));
        }
        if samples.len() < Self::MIN_SAMPLES {
            return Err(Error::domain(format!(
                "need at least {} samples, got {}",
                Self::MIN_SAMPLES,
                samples.len()
            )));
        }
        if !origin.is_finite() || samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite())
        {
            return Err(Error::domain("field samples and origin must be finite"));
        }
        Ok(Self {
            samples,
            spacing,
            origin,
        })
    }

    /// Centered Gaussian `exp(-x²/waist²)` on `n` samples.
    pub fn gaussian(waist: f64, n: usize, spacing: f64) -> Result<Self> {
        if !(waist > 0.0) {
            return Err(Error::domain("waist must be positive"));
        }
        let origin = -0.5 * (n as f64 - 1.0) * spacing;
        let samples = (0..n)
            .map(|j| {
                let x = origin + j as f64 * spacing;
                Complex64::new((-(x * x) / (waist * waist)).exp(), 0.0)
            })
            .collect();
        Self::new(samples, spacing, origin)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.spacing
    }

    /// Distance from the first to the last sample.
    pub fn extent(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.spacing
    }

    /// `Σ|u|²·spacing`.
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.spacing
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * c).collect(),
            spacing: self.spacing,
            origin: self.origin,
        }
    }

    /// Intensity 1/e² half-width from the second moment, `2·sqrt(<(x-<x>)²>)`.
    pub fn intensity_width(&self) -> f64 {
        let total: f64 = self.samples.iter().map(|s| s.norm_sqr()).sum();
        let mean = self
            .samples
            .iter()
            .enumerate()
            .map(|(j, s)| s.norm_sqr() * self.coordinate(j))
            .sum::<f64>()
            / total;
        let var = self
            .samples
            .iter()
            .enumerate()
            .map(|(j, s)| s.norm_sqr() * (self.coordinate(j) - mean).powi(2))
            .sum::<f64>()
            / total;
        2.0 * var.sqrt()
    }

    fn same_grid(&self, other: &Self) -> bool {
        let tol = 1e-12 * self.spacing.max(other.spacing);
        self.samples.len() == other.samples.len()
            && (self.spacing - other.spacing).abs() <= tol
            && (self.origin - other.origin).abs() <= tol * self.samples.len() as f64
    }
}

/// Largest kernel phase step between neighbouring input samples when the
/// quadratic coefficient is `k / (2·distance)`.
fn max_phase_increment(field: &ComplexField1D, k: f64, distance: f64) -> f64 {
    k * field.extent() * field.spacing / distance.abs()
}

fn check_sampling(field: &ComplexField1D, k: f64, distance: f64) -> Result<()> {
    let step = max_phase_increment(field, k, distance);
    if step >= PI {
        return Err(Error::Sampling(format!(
            "kernel phase step {step:.3} rad per sample at the grid edge exceeds π \
             (spacing {:.3e} m, extent {:.3e} m, distance {distance:.3e} m)",
            field.spacing,
            field.extent()
        )));
    }
    Ok(())
}

/// Rescales `out` so its power equals `reference`'s; a zero output stays zero.
fn match_power(mut out: Vec<Complex64>, reference: &ComplexField1D) -> Result<ComplexField1D> {
    let p_in = reference.power();
    let p_out = out.iter().map(|s| s.norm_sqr()).sum::<f64>() * reference.spacing;
    if p_out > 0.0 {
        let scale = (p_in / p_out).sqrt();
        out.iter_mut().for_each(|s| *s *= scale);
    }
    ComplexField1D::new(out, reference.spacing, reference.origin)
}

/// Direct quadrature of
/// `U(x) ∝ ∫ U0(ξ) exp(ik/2 [x²(1/δ + δ/f²) − 2xξ/δ + ξ²/δ]) dξ`,
/// the idler field after a 4f system whose first lens is displaced by `delta`.
/// The output is sampled on the input grid and carries the input power.
pub fn displaced_lens_field(
    u0: &ComplexField1D,
    delta: f64,
    f_idler: f64,
    k: f64,
) -> Result<ComplexField1D> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::DegenerateKernel(format!(
            "displaced-lens kernel needs delta != 0, got {delta}"
        )));
    }
    if !(f_idler > 0.0 && k > 0.0) {
        return Err(Error::domain("f_idler and k must be positive"));
    }
    let d = defocus_to_distance(delta, f_idler)?.distance;
    check_sampling(u0, k, delta.min(d))?;

    let inv_delta = 1.0 / delta;
    let out_curv = inv_delta + delta / (f_idler * f_idler);
    // input chirp exp(ikξ²/(2δ)) folded into the source once
    let chirped: Vec<Complex64> = u0
        .samples
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let xi = u0.coordinate(j);
            s * Complex64::cis(0.5 * k * xi * xi * inv_delta)
        })
        .collect();
    let out: Vec<Complex64> = (0..u0.len())
        .into_par_iter()
        .map(|m| {
            let x = u0.coordinate(m);
            let acc: Complex64 = chirped
                .iter()
                .enumerate()
                .map(|(j, a)| a * Complex64::cis(-k * x * u0.coordinate(j) * inv_delta))
                .sum();
            acc * Complex64::cis(0.5 * k * x * x * out_curv) * u0.spacing
        })
        .collect();
    match_power(out, u0)
}

/// Fresnel propagation by `d` through direct quadrature of
/// `U(x) ∝ ∫ U0(ξ) exp(ik (x−ξ)² / (2d)) dξ`. `d = 0` is the identity.
pub fn fresnel_propagate(u0: &ComplexField1D, d: f64, k: f64) -> Result<ComplexField1D> {
    if d == 0.0 {
        return Ok(u0.clone());
    }
    if !d.is_finite() || !(k > 0.0) {
        return Err(Error::domain("distance must be finite and k positive"));
    }
    check_sampling(u0, k, d)?;
    let coef = 0.5 * k / d;
    let out: Vec<Complex64> = (0..u0.len())
        .into_par_iter()
        .map(|m| {
            let x = u0.coordinate(m);
            u0.samples
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    let dx = x - u0.coordinate(j);
                    s * Complex64::cis(coef * dx * dx)
                })
                .sum::<Complex64>()
                * u0.spacing
        })
        .collect();
    match_power(out, u0)
}

/// `min_c ‖a − c·b‖ / ‖a‖` over complex scalars `c`: a relative error that
/// ignores global phase and scale.
pub fn field_mismatch(a: &ComplexField1D, b: &ComplexField1D) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch(format!(
            "({} samples, {:e} m, origin {:e}) vs ({} samples, {:e} m, origin {:e})",
            a.len(),
            a.spacing,
            a.origin,
            b.len(),
            b.spacing,
            b.origin
        )));
    }
    let norm_a2: f64 = a.samples.iter().map(|s| s.norm_sqr()).sum();
    if norm_a2 == 0.0 {
        return Err(Error::ZeroField("reference field is identically zero".into()));
    }
    let norm_b2: f64 = b.samples.iter().map(|s| s.norm_sqr()).sum();
    if norm_b2 == 0.0 {
        return Ok(1.0);
    }
    let overlap: Complex64 = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| y.conj() * x)
        .sum();
    let c = overlap / norm_b2;
    let resid: f64 = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| (x - c * y).norm_sqr())
        .sum();
    Ok((resid / norm_a2).sqrt())
}

/// One row of a displaced-lens versus free-space comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceRow {
    pub delta: f64,
    pub ratio: f64,
    pub distance: f64,
    pub mismatch: f64,
}

/// Compares both idler kernels on a Gaussian of the given waist for each
/// `δ²/f²` in `ratios`. The grid is `n` samples with spacing
/// `0.7·√(π·min(δ, d)/(k·n))`, which keeps the kernel chirp below π per
/// sample at the grid edge.
pub fn kernel_equivalence(
    ratios: &[f64],
    f_idler: f64,
    waist: f64,
    k: f64,
    n: usize,
) -> Result<Vec<EquivalenceRow>> {
    ratios
        .iter()
        .map(|&ratio| {
            if !(ratio.is_finite() && ratio > 0.0) {
                return Err(Error::domain(format!("delta²/f² must be positive, got {ratio}")));
            }
            let delta = f_idler * ratio.sqrt();
            let distance = defocus_to_distance(delta, f_idler)?.distance;
            let spacing = 0.7 * (PI * delta.min(distance) / (k * n as f64)).sqrt();
            let u = ComplexField1D::gaussian(waist, n, spacing)?;
            let a = displaced_lens_field(&u, delta, f_idler, k)?;
            let b = fresnel_propagate(&u, distance, k)?;
            Ok(EquivalenceRow {
                delta,
                ratio,
                distance,
                mismatch: field_mismatch(&a, &b)?,
            })
        })
        .collect()
}
