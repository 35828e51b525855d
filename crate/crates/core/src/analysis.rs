//! Circular-fringe analysis: centre search, radial profile, extrema,
//! the parabolic order fit `n = aρ² + φ′` and the regression of `a` on the
//! propagation distance that yields the equivalent wavelength.

use std::fmt;

use crate::error::{Error, Result};
use crate::imaging::FringeImage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    /// Radial bin width (m); `None` uses the pixel pitch.
    pub bin_width: Option<f64>,
    /// Moving-average half-width in bins.
    pub smooth_half_width: usize,
    /// Minimum extremum prominence as a fraction of the local modulation.
    pub prominence: f64,
    /// Centre search half-range around the centroid (pixels).
    pub center_search_px: f64,
    /// Final centre search step (pixels).
    pub center_step_px: f64,
    /// Extrema are searched out to this multiple of the fitted envelope radius.
    pub max_radius_factor: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            bin_width: None,
            smooth_half_width: 2,
            prominence: 0.05,
            center_search_px: 3.0,
            center_step_px: 0.1,
            max_radius_factor: 1.2,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(w) = self.bin_width {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::domain("bin width must be positive"));
            }
        }
        if !(0.0..1.0).contains(&self.prominence) {
            return Err(Error::domain("prominence must lie in [0, 1)"));
        }
        if !(self.center_search_px >= 0.0 && self.center_step_px > 0.0) {
            return Err(Error::domain("center search range must be >= 0 and step > 0"));
        }
        if !(self.max_radius_factor > 0.0) {
            return Err(Error::domain("max radius factor must be positive"));
        }
        Ok(())
    }
}

/// Fringe centre in pixel coordinates `(x, y)`.
///
/// Starts at the intensity centroid and picks the point of a local grid
/// where the pixels are most uniform along each ring, measured by the
/// within-bin variance of 1-pixel radial bins.
pub fn estimate_center(img: &FringeImage, cfg: &AnalysisConfig) -> Result<[f64; 2]> {
    cfg.validate()?;
    let data = img.intensities();
    let (h, w) = data.dim();
    let (mut s0, mut sx, mut sy, mut s2) = (0.0, 0.0, 0.0, 0.0);
    for ((r, c), &v) in data.indexed_iter() {
        s0 += v;
        sx += v * c as f64;
        sy += v * r as f64;
        s2 += v * v;
    }
    let n = (h * w) as f64;
    if !(s0 > 0.0) || s2 / n - (s0 / n).powi(2) <= 1e-12 * (s2 / n) {
        return Err(Error::NoCenter("image has no intensity structure".into()));
    }
    let centroid = [sx / s0, sy / s0];

    let margin = cfg.center_search_px + 2.0;
    let reach = [
        centroid[0] - margin,
        w as f64 - 1.0 - centroid[0] - margin,
        centroid[1] - margin,
        h as f64 - 1.0 - centroid[1] - margin,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    if reach < 8.0 {
        return Err(Error::NoCenter(format!(
            "centroid ({:.1}, {:.1}) too close to the image border",
            centroid[0], centroid[1]
        )));
    }
    let cx = centroid[0].round() as isize;
    let cy = centroid[1].round() as isize;
    let span = reach.floor() as isize;
    let mut pixels = Vec::new();
    for r in (cy - span).max(0)..=(cy + span).min(h as isize - 1) {
        for c in (cx - span).max(0)..=(cx + span).min(w as isize - 1) {
            let dx = c as f64 - centroid[0];
            let dy = r as f64 - centroid[1];
            if dx * dx + dy * dy <= reach * reach {
                pixels.push((c as f64, r as f64, data[[r as usize, c as usize]]));
            }
        }
    }
    let nbins = reach.ceil() as usize + cfg.center_search_px.ceil() as usize + 3;

    let cost = |x0: f64, y0: f64| -> f64 {
        let mut acc = vec![[0.0f64; 3]; nbins];
        for &(x, y, v) in &pixels {
            let r = (x - x0).hypot(y - y0);
            let k = r.floor() as usize;
            let f = r - k as f64;
            for (bin, wt) in [(k, 1.0 - f), (k + 1, f)] {
                if let Some(a) = acc.get_mut(bin) {
                    a[0] += wt;
                    a[1] += wt * v;
                    a[2] += wt * v * v;
                }
            }
        }
        acc.iter()
            .filter(|a| a[0] > 0.0)
            .map(|a| a[2] - a[1] * a[1] / a[0])
            .sum()
    };

    let search = |center: [f64; 2], half: f64, step: f64| -> [f64; 2] {
        let steps = (half / step).round() as i64;
        let mut best = (f64::INFINITY, center);
        for j in -steps..=steps {
            for i in -steps..=steps {
                let p = [center[0] + i as f64 * step, center[1] + j as f64 * step];
                let v = cost(p[0], p[1]);
                if v < best.0 {
                    best = (v, p);
                }
            }
        }
        best.1
    };

    let coarse_step = (5.0 * cfg.center_step_px).max(cfg.center_step_px);
    let coarse = search(centroid, cfg.center_search_px, coarse_step);
    Ok(search(coarse, coarse_step, cfg.center_step_px))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    /// Bin centres (m).
    pub radii: Vec<f64>,
    pub mean_intensity: Vec<f64>,
    pub counts_per_bin: Vec<usize>,
    /// Centre position on the sensor, measured from pixel (0, 0) (m).
    pub center_used: [f64; 2],
    pub bin_width: f64,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Indices of bins that received no pixels.
    pub fn empty_bins(&self) -> Vec<usize> {
        self.counts_per_bin
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c == 0).then_some(i))
            .collect()
    }
}

/// Mean intensity in annuli of width `bin_width` around `center_px`.
pub fn radial_profile(img: &FringeImage, center_px: [f64; 2], bin_width: f64) -> Result<RadialProfile> {
    let cam = img.camera();
    if !(bin_width.is_finite() && bin_width >= cam.pixel_pitch / 2.0) {
        return Err(Error::domain(format!(
            "bin width {bin_width:e} m is below half the pixel pitch"
        )));
    }
    let data = img.intensities();
    let (h, w) = data.dim();
    let inside = |v: f64, n: usize| (-0.5..=n as f64 - 0.5).contains(&v);
    if !(inside(center_px[0], w) && inside(center_px[1], h)) {
        return Err(Error::domain(format!(
            "center ({}, {}) lies outside the {w}x{h} image",
            center_px[0], center_px[1]
        )));
    }
    let pitch = cam.pixel_pitch;
    let far = [0.0, w as f64 - 1.0]
        .iter()
        .flat_map(|&x| [0.0, h as f64 - 1.0].map(|y| (x - center_px[0]).hypot(y - center_px[1])))
        .fold(0.0, f64::max);
    let nbins = (far * pitch / bin_width).floor() as usize + 1;
    let mut sum = vec![0.0; nbins];
    let mut counts = vec![0usize; nbins];
    for ((r, c), &v) in data.indexed_iter() {
        let rho = (c as f64 - center_px[0]).hypot(r as f64 - center_px[1]) * pitch;
        let k = ((rho / bin_width) as usize).min(nbins - 1);
        sum[k] += v;
        counts[k] += 1;
    }
    let mean_intensity = sum
        .iter()
        .zip(&counts)
        .map(|(s, &n)| if n > 0 { s / n as f64 } else { 0.0 })
        .collect();
    Ok(RadialProfile {
        radii: (0..nbins).map(|k| (k as f64 + 0.5) * bin_width).collect(),
        mean_intensity,
        counts_per_bin: counts,
        center_used: [center_px[0] * pitch, center_px[1] * pitch],
        bin_width,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

impl fmt::Display for ExtremumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremumKind::Max => "max",
            ExtremumKind::Min => "min",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Fringe order: integer for maxima, half-integer for minima.
    pub order: f64,
    pub radius: f64,
    pub kind: ExtremumKind,
    pub uncertainty: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtremaSet {
    pub entries: Vec<Extremum>,
}

impl ExtremaSet {
    pub fn new(entries: Vec<Extremum>) -> Result<Self> {
        for pair in entries.windows(2) {
            if !(pair[1].radius > pair[0].radius && pair[1].order > pair[0].order) {
                return Err(Error::AmbiguousExtrema(format!(
                    "radii and orders must increase together: {:?} then {:?}",
                    pair[0], pair[1]
                )));
            }
            if pair[0].kind == pair[1].kind {
                return Err(Error::AmbiguousExtrema(format!(
                    "two consecutive {} at {:.4e} m and {:.4e} m",
                    pair[0].kind, pair[0].radius, pair[1].radius
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// 1/e² radius of the Gaussian envelope under a fringe pattern.
///
/// The fringe phase is linear in `u = ρ²` and pixel counts per bin grow as
/// `du`, so the count-weighted mean between two same-kind extrema averages
/// over one period. Under a decaying envelope that mean is still off by a
/// factor `1 ± V·k²/(k²+B²)` whose sign follows the kind of the starting
/// extremum, so adjacent periods (one starting on a maximum, one on a
/// minimum) are averaged in log space before a log-linear fit against `u`.
/// `None` if fewer than two such points exist or the fit is not decreasing.
fn envelope_from_periods(
    radii: &[f64],
    values: &[f64],
    counts: &[f64],
    extrema: &[(usize, ExtremumKind)],
) -> Option<f64> {
    let mut periods = Vec::new();
    for pair in extrema.windows(3) {
        let (lo, hi) = (pair[0].0, pair[2].0);
        let (mut n, mut s, mut su) = (0.0, 0.0, 0.0);
        for k in lo..hi {
            n += counts[k];
            s += counts[k] * values[k];
            su += counts[k] * radii[k] * radii[k];
        }
        if !(n > 0.0 && s > 0.0) {
            return None;
        }
        periods.push((su / n, (s / n).ln(), n));
    }
    let mut u = Vec::new();
    let mut logm = Vec::new();
    let mut w = Vec::new();
    for p in periods.windows(2) {
        u.push(0.5 * (p[0].0 + p[1].0));
        logm.push(0.5 * (p[0].1 + p[1].1));
        w.push(p[0].2 + p[1].2);
    }
    if u.len() < 2 {
        return None;
    }
    let (slope, _, _) = weighted_line(&u, &logm, &w)?;
    (slope < 0.0).then(|| (-2.0 / slope).sqrt())
}

fn moving_average(values: &[f64], half: usize) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Vertex of the parabola through three points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<f64> {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d2 - d1) / (x[2] - x[0]);
    if curv == 0.0 || !curv.is_finite() {
        return None;
    }
    // y' = d1 + curv·(2t − x0 − x1) = 0
    let t = 0.5 * (x[0] + x[1] - d1 / curv);
    (t >= x[0] && t <= x[2]).then_some(t)
}

struct Detection {
    /// Envelope-flattened profile up to `max_radius_factor·width`.
    flat: Vec<f64>,
    smooth: Vec<f64>,
    /// Pruned, alternating extrema of `smooth`.
    candidates: Vec<(usize, ExtremumKind)>,
}

/// Smallest max/min step, relative to the flattened level, that can count
/// as a fringe. Square pixels binned into annuli leave a ripple of a few
/// 1e-3 on a ringless frame, which the purely relative prominence test would
/// otherwise accept.
const MIN_CONTRAST: f64 = 0.01;

fn detect_extrema(radii: &[f64], values: &[f64], width: f64, cfg: &AnalysisConfig) -> Detection {
    let limit = radii.partition_point(|&r| r <= cfg.max_radius_factor * width);
    if limit < 5 {
        return Detection {
            flat: Vec::new(),
            smooth: Vec::new(),
            candidates: Vec::new(),
        };
    }
    let flat: Vec<f64> = radii[..limit]
        .iter()
        .zip(values)
        .map(|(&r, &v)| v * (2.0 * r * r / (width * width)).exp())
        .collect();
    let smooth = moving_average(&flat, cfg.smooth_half_width);

    let mut candidates: Vec<(usize, ExtremumKind)> = Vec::new();
    let mut last_sign = 0.0;
    let mut last_change = 0usize;
    for k in 0..smooth.len() - 1 {
        let d = smooth[k + 1] - smooth[k];
        if d == 0.0 {
            continue;
        }
        let sign = d.signum();
        if last_sign != 0.0 && sign != last_sign {
            // a plateau between last_change and k: take its midpoint
            let idx = (last_change + k).div_ceil(2);
            let kind = if last_sign > 0.0 { ExtremumKind::Max } else { ExtremumKind::Min };
            candidates.push((idx, kind));
        }
        last_sign = sign;
        last_change = k + 1;
    }

    // prune the least prominent adjacent pair until all pass
    while candidates.len() >= 2 {
        let steps: Vec<f64> = candidates
            .windows(2)
            .map(|p| (smooth[p[1].0] - smooth[p[0].0]).abs())
            .collect();
        let mut worst: Option<(f64, usize)> = None;
        for j in 0..steps.len() {
            let lo = j.saturating_sub(2);
            let hi = (j + 2).min(steps.len() - 1);
            let local = steps[lo..=hi].iter().copied().fold(0.0, f64::max);
            let level = 0.5 * (smooth[candidates[j].0] + smooth[candidates[j + 1].0]).abs();
            let ratio = if local > 0.0 && steps[j] >= MIN_CONTRAST * level {
                steps[j] / local
            } else {
                0.0
            };
            let weak = ratio < cfg.prominence || ratio == 0.0;
            if weak && worst.is_none_or(|(r, _)| ratio < r) {
                worst = Some((ratio, j));
            }
        }
        match worst {
            Some((_, j)) => {
                candidates.drain(j..j + 2);
            }
            None => break,
        }
    }
    Detection {
        flat,
        smooth,
        candidates,
    }
}

/// Ring extrema of a radial profile.
///
/// Divides out a Gaussian envelope (first `envelope_radius`, then the
/// width fitted to per-period means of the profile), smooths, locates sign changes of the discrete derivative, drops
/// max/min pairs whose contrast is below `prominence` of the neighbouring
/// modulation and refines each survivor with a 3-point parabola through the
/// unsmoothed flattened profile. Orders
/// count outward from the innermost extremum: 0.5 if it is a minimum, 1 if
/// it is a maximum.
pub fn find_extrema(profile: &RadialProfile, envelope_radius: f64, cfg: &AnalysisConfig) -> Result<ExtremaSet> {
    cfg.validate()?;
    if !(envelope_radius > 0.0) {
        return Err(Error::domain("envelope radius must be positive"));
    }
    let mut radii = Vec::new();
    let mut values = Vec::new();
    let mut counts = Vec::new();
    for ((&r, &v), &n) in profile.radii.iter().zip(&profile.mean_intensity).zip(&profile.counts_per_bin) {
        if n > 0 {
            radii.push(r);
            values.push(v);
            counts.push(n as f64);
        }
    }

    let seeded = detect_extrema(&radii, &values, envelope_radius, cfg);
    let Detection {
        flat,
        smooth,
        candidates,
    } = match envelope_from_periods(&radii, &values, &counts, &seeded.candidates) {
        Some(width) => detect_extrema(&radii, &values, width, cfg),
        None => seeded,
    };

    let mut entries = Vec::with_capacity(candidates.len());
    let mut order = None;
    // the moving average is one-sided within its half-width of either end
    let half = cfg.smooth_half_width;
    let edge = half.max(1);
    for (idx, kind) in candidates {
        if idx < edge || idx + edge >= smooth.len() {
            continue;
        }
        // refine on the unsmoothed profile: box smoothing of a chirped
        // fringe drags extrema toward the faster side
        let window = (idx - half).max(1)..=(idx + half).min(flat.len() - 2);
        let pick = |a: &usize, b: &usize| flat[*a].total_cmp(&flat[*b]);
        let j = match kind {
            ExtremumKind::Max => window.max_by(pick),
            ExtremumKind::Min => window.min_by(pick),
        }
        .unwrap_or(idx);
        let x = [radii[j - 1], radii[j], radii[j + 1]];
        let y = [flat[j - 1], flat[j], flat[j + 1]];
        let radius = parabola_vertex(x, y).unwrap_or(radii[j]);
        let n = match order {
            None => match kind {
                ExtremumKind::Min => 0.5,
                ExtremumKind::Max => 1.0,
            },
            Some(prev) => prev + 0.5,
        };
        order = Some(n);
        entries.push(Extremum {
            order: n,
            radius,
            kind,
            uncertainty: profile.bin_width / 2.0,
        });
    }
    if entries.len() < 3 {
        return Err(Error::InsufficientFringes { found: entries.len() });
    }
    ExtremaSet::new(entries)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicFit {
    /// Quadratic coefficient (m⁻²).
    pub a: f64,
    pub phi_prime: f64,
    /// RMS residual in order units.
    pub residual_rms: f64,
    /// Covariance of `(a, φ′)`.
    pub covariance: [[f64; 2]; 2],
}

impl ParabolicFit {
    pub fn a_sigma(&self) -> f64 {
        self.covariance[0][0].sqrt()
    }
}

/// Weighted straight-line fit `y = m·x + b`; returns `(m, b, cov)` with the
/// absolute covariance `(XᵀWX)⁻¹`.
fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> Option<(f64, f64, [[f64; 2]; 2])> {
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        sw += wi;
        sx += wi * xi;
        sy += wi * yi;
    }
    // centred form keeps the determinant well conditioned
    let xm = sx / sw;
    let ym = sy / sw;
    let mut sxx_c = 0.0;
    let mut sxy_c = 0.0;
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        sxx_c += wi * (xi - xm) * (xi - xm);
        sxy_c += wi * (xi - xm) * (yi - ym);
    }
    if !(sxx_c > 0.0 && sxx_c > 1e-14 * sw * xm * xm) {
        return None;
    }
    let m = sxy_c / sxx_c;
    let b = ym - m * xm;
    let var_m = 1.0 / sxx_c;
    let cov_mb = -xm / sxx_c;
    let var_b = 1.0 / sw + xm * xm / sxx_c;
    Some((m, b, [[var_m, cov_mb], [cov_mb, var_b]]))
}

/// Fits `n = a·ρ² + φ′` to the extrema, weighting each point by its radius
/// uncertainty carried to order units (`σ_n = 2aρσ_ρ`).
pub fn fit_parabola(ex: &ExtremaSet) -> Result<ParabolicFit> {
    if ex.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 extrema, got {}", ex.len())));
    }
    let x: Vec<f64> = ex.entries.iter().map(|e| e.radius * e.radius).collect();
    let y: Vec<f64> = ex.entries.iter().map(|e| e.order).collect();
    let degenerate = || Error::Fit("all extrema share one radius".into());
    let (mut a, mut b, mut cov) = weighted_line(&x, &y, &vec![1.0; x.len()]).ok_or_else(degenerate)?;
    let sigmas_ok = ex.entries.iter().all(|e| e.uncertainty > 0.0 && e.radius > 0.0);
    if sigmas_ok {
        for _ in 0..2 {
            let w: Vec<f64> = ex
                .entries
                .iter()
                .map(|e| {
                    let s = 2.0 * a.abs() * e.radius * e.uncertainty;
                    1.0 / (s * s)
                })
                .collect();
            if !w.iter().all(|v| v.is_finite()) {
                break;
            }
            (a, b, cov) = weighted_line(&x, &y, &w).ok_or_else(degenerate)?;
        }
    }
    let rms = (x
        .iter()
        .zip(&y)
        .map(|(&xi, &yi)| (yi - a * xi - b).powi(2))
        .sum::<f64>()
        / x.len() as f64)
        .sqrt();
    Ok(ParabolicFit {
        a,
        phi_prime: b,
        residual_rms: rms,
        covariance: cov,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavelengthEstimate {
    pub lambda_eq: f64,
    pub sigma: f64,
    /// `da/dd` (m⁻³).
    pub slope: f64,
    pub slope_sigma: f64,
    /// `a` at `d = 0` (m⁻²).
    pub intercept: f64,
    pub intercept_sigma: f64,
}

impl WavelengthEstimate {
    /// Whether the intercept is within three standard errors of zero.
    pub fn intercept_consistent(&self) -> bool {
        self.intercept.abs() <= 3.0 * self.intercept_sigma
    }
}

/// Regresses `a` on `d` with a free intercept; `λ_eq = 1/(2·f_c²·slope)`.
pub fn fit_equivalent_wavelength(pairs: &[(f64, ParabolicFit)], f_c: f64) -> Result<WavelengthEstimate> {
    if !(f_c > 0.0) {
        return Err(Error::domain("camera focal length must be positive"));
    }
    let d: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let a: Vec<f64> = pairs.iter().map(|p| p.1.a).collect();
    let distinct = d.iter().any(|&v| (v - d[0]).abs() > 1e-12 * d[0].abs().max(1e-12));
    if pairs.len() < 2 || !distinct {
        return Err(Error::Regression("need at least two distinct propagation distances".into()));
    }
    let sig: Vec<f64> = pairs.iter().map(|p| p.1.a_sigma()).collect();
    let weighted = sig.iter().all(|s| s.is_finite() && *s > 0.0);
    let w: Vec<f64> = if weighted {
        sig.iter().map(|s| 1.0 / (s * s)).collect()
    } else {
        vec![1.0; d.len()]
    };
    let (m, b, mut cov) = weighted_line(&d, &a, &w)
        .ok_or_else(|| Error::Regression("degenerate distance set".into()))?;
    if !weighted {
        // without per-point errors fall back to the residual scatter
        let dof = (d.len() as f64 - 2.0).max(1.0);
        let s2 = d.iter().zip(&a).map(|(&x, &y)| (y - m * x - b).powi(2)).sum::<f64>() / dof;
        for row in cov.iter_mut() {
            for v in row.iter_mut() {
                *v *= s2;
            }
        }
    }
    if !(m > 0.0) {
        return Err(Error::UnphysicalSlope { slope: m });
    }
    let lambda_eq = 1.0 / (2.0 * f_c * f_c * m);
    let slope_sigma = cov[0][0].sqrt();
    Ok(WavelengthEstimate {
        lambda_eq,
        sigma: lambda_eq * slope_sigma / m,
        slope: m,
        slope_sigma,
        intercept: b,
        intercept_sigma: cov[1][1].sqrt(),
    })
}

/// Everything extracted from one frame.
#[derive(Debug, Clone)]
pub struct FrameAnalysis {
    pub center_px: [f64; 2],
    pub profile: RadialProfile,
    pub extrema: ExtremaSet,
    pub fit: ParabolicFit,
}

/// Centre → profile → extrema → parabola for one frame.
pub fn analyze_frame(img: &FringeImage, cfg: &AnalysisConfig) -> Result<FrameAnalysis> {
    let center_px = estimate_center(img, cfg)?;
    let bin = cfg.bin_width.unwrap_or(img.camera().pixel_pitch);
    let profile = radial_profile(img, center_px, bin)?;
    let extrema = find_extrema(&profile, img.camera().envelope_radius, cfg)?;
    let fit = fit_parabola(&extrema)?;
    Ok(FrameAnalysis {
        center_px,
        profile,
        extrema,
        fit,
    })
}
