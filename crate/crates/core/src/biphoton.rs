//! Transverse-momentum biphoton model of the two-crystal interferometer.
//!
//! A signal mode `q_s` on the camera sees the superposition of the two
//! crystals' signal amplitudes, weighted by every idler mode `q_i` it is
//! paired with. Writing `W = ∫|C(q_s,q_i)|² dq_i` and
//! `Z = ∫|C(q_s,q_i)|² e^{iφ(q_i)} dq_i` (φ includes the uniform offset φ0),
//! the detected rate is `W + g(t)·Re Z` with visibility `g(t)|Z|/W` and
//! `g(t) = 2t/(1+t²)` for idler amplitude transmission `t`. The singles
//! rate `W` does not depend on `t` or on the phase map.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::optics::{OpticalConfig, PARAXIAL_LIMIT};

/// Transverse wavevector `(q_x, q_y)` in rad/m.
pub type Wavevector = [f64; 2];

pub type AmplitudeFn = dyn Fn(Wavevector, Wavevector) -> Complex64 + Send + Sync;
/// For a signal mode, the centre of the idler support and the standard
/// deviation of `|C|²` along each axis.
pub type SupportFn = dyn Fn(Wavevector) -> (Wavevector, f64) + Send + Sync;
pub type PhaseFn = dyn Fn(Wavevector) -> f64 + Send + Sync;

/// Half-width of the default idler window in standard deviations of `|C|²`.
pub const WINDOW_SIGMAS: f64 = 8.0;
/// Default quadrature points per axis.
pub const WINDOW_POINTS: usize = 171;
/// Largest edge weight, relative to the peak, accepted over a window.
pub const MAX_EDGE_WEIGHT: f64 = 1e-3;
/// Largest phase step between adjacent quadrature nodes in automatic windows.
const MAX_NODE_PHASE_STEP: f64 = PI / 4.0;
const MAX_WINDOW_POINTS: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeKind {
    CorrelatedGaussian,
    SeparableGaussian,
    Custom,
}

impl fmt::Display for AmplitudeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AmplitudeKind::CorrelatedGaussian => "correlated_gaussian",
            AmplitudeKind::SeparableGaussian => "separable_gaussian",
            AmplitudeKind::Custom => "custom",
        })
    }
}

/// User-supplied joint amplitude together with its idler support.
#[derive(Clone)]
pub struct CustomAmplitude {
    pub evaluator: Arc<AmplitudeFn>,
    pub support: Arc<SupportFn>,
}

/// Joint transverse amplitude `C(q_s, q_i)`.
#[derive(Clone)]
pub enum JointAmplitude {
    /// `exp(−w_p²|q_s + q_i|²/4)`: transverse phase matching under a
    /// Gaussian pump of waist `w_p`.
    CorrelatedGaussian { pump_waist: f64 },
    /// `exp(−|q_s|²/(2σ_s²))·exp(−|q_i|²/(2σ_i²))`: no momentum correlation.
    SeparableGaussian { signal_width: f64, idler_width: f64 },
    Custom(CustomAmplitude),
}

impl fmt::Debug for JointAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JointAmplitude::CorrelatedGaussian { pump_waist } => f
                .debug_struct("CorrelatedGaussian")
                .field("pump_waist", pump_waist)
                .finish(),
            JointAmplitude::SeparableGaussian {
                signal_width,
                idler_width,
            } => f
                .debug_struct("SeparableGaussian")
                .field("signal_width", signal_width)
                .field("idler_width", idler_width)
                .finish(),
            JointAmplitude::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

pub fn make_correlated_amplitude(pump_waist: f64) -> Result<JointAmplitude> {
    if !(pump_waist.is_finite() && pump_waist > 0.0) {
        return Err(Error::domain(format!(
            "pump waist must be positive, got {pump_waist}"
        )));
    }
    Ok(JointAmplitude::CorrelatedGaussian { pump_waist })
}

pub fn make_separable_amplitude(signal_width: f64, idler_width: f64) -> Result<JointAmplitude> {
    for (name, v) in [("signal_width", signal_width), ("idler_width", idler_width)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(JointAmplitude::SeparableGaussian {
        signal_width,
        idler_width,
    })
}

impl JointAmplitude {
    /// Separable amplitude with the same signal and idler marginals as a
    /// correlated state whose signal intensity on the camera falls as
    /// `exp(−2|q_s|²/Q²)`.
    ///
    /// The correlated idler marginal is the signal envelope convolved with
    /// the pump-limited conditional width, so its variance per axis is
    /// `Q²/4 + 1/w_p²`.
    pub fn separable_matched(pump_waist: f64, signal_envelope_q: f64) -> Result<Self> {
        if !(pump_waist > 0.0 && signal_envelope_q > 0.0) {
            return Err(Error::domain("pump waist and envelope width must be positive"));
        }
        let q2 = signal_envelope_q * signal_envelope_q;
        let idler_var = q2 / 4.0 + 1.0 / (pump_waist * pump_waist);
        make_separable_amplitude(signal_envelope_q / 2f64.sqrt(), (2.0 * idler_var).sqrt())
    }

    pub fn custom(evaluator: Arc<AmplitudeFn>, support: Arc<SupportFn>) -> Self {
        JointAmplitude::Custom(CustomAmplitude { evaluator, support })
    }

    pub fn kind(&self) -> AmplitudeKind {
        match self {
            JointAmplitude::CorrelatedGaussian { .. } => AmplitudeKind::CorrelatedGaussian,
            JointAmplitude::SeparableGaussian { .. } => AmplitudeKind::SeparableGaussian,
            JointAmplitude::Custom(_) => AmplitudeKind::Custom,
        }
    }

    pub fn evaluate(&self, q_s: Wavevector, q_i: Wavevector) -> Complex64 {
        match self {
            JointAmplitude::CorrelatedGaussian { pump_waist } => {
                let sx = q_s[0] + q_i[0];
                let sy = q_s[1] + q_i[1];
                let w2 = pump_waist * pump_waist;
                Complex64::new((-w2 * (sx * sx + sy * sy) / 4.0).exp(), 0.0)
            }
            JointAmplitude::SeparableGaussian {
                signal_width,
                idler_width,
            } => {
                let s2 = q_s[0] * q_s[0] + q_s[1] * q_s[1];
                let i2 = q_i[0] * q_i[0] + q_i[1] * q_i[1];
                let v = (-s2 / (2.0 * signal_width * signal_width)
                    - i2 / (2.0 * idler_width * idler_width))
                    .exp();
                Complex64::new(v, 0.0)
            }
            JointAmplitude::Custom(c) => (c.evaluator)(q_s, q_i),
        }
    }

    /// `|C|²` restricted to one axis, when the amplitude factorizes over x/y.
    fn axis_weight(&self, qs: f64, qi: f64) -> Option<f64> {
        match self {
            JointAmplitude::CorrelatedGaussian { pump_waist } => {
                let s = qs + qi;
                Some((-pump_waist * pump_waist * s * s / 2.0).exp())
            }
            JointAmplitude::SeparableGaussian {
                signal_width,
                idler_width,
            } => Some(
                (-qs * qs / (signal_width * signal_width) - qi * qi / (idler_width * idler_width))
                    .exp(),
            ),
            JointAmplitude::Custom(_) => None,
        }
    }

    /// Centre of the idler support for signal mode `q_s` and the standard
    /// deviation of `|C|²` along each axis.
    pub fn idler_support(&self, q_s: Wavevector) -> (Wavevector, f64) {
        match self {
            JointAmplitude::CorrelatedGaussian { pump_waist } => {
                ([-q_s[0], -q_s[1]], 1.0 / pump_waist)
            }
            JointAmplitude::SeparableGaussian { idler_width, .. } => {
                ([0.0, 0.0], idler_width / 2f64.sqrt())
            }
            JointAmplitude::Custom(c) => (c.support)(q_s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseKind {
    Uniform,
    Tilt,
    Defocus,
    Custom,
}

impl fmt::Display for PhaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseKind::Uniform => "uniform",
            PhaseKind::Tilt => "tilt",
            PhaseKind::Defocus => "defocus",
            PhaseKind::Custom => "custom",
        })
    }
}

/// Mode-dependent part of the idler phase between the crystals.
#[derive(Clone)]
pub enum PhaseMap {
    Uniform,
    /// `s·q_i` for a transverse gradient `s` (m).
    Tilt { gradient: [f64; 2] },
    /// Free propagation by `distance` (m).
    Defocus { distance: f64 },
    Custom(Arc<PhaseFn>),
}

impl fmt::Debug for PhaseMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseMap::Uniform => f.write_str("Uniform"),
            PhaseMap::Tilt { gradient } => {
                f.debug_struct("Tilt").field("gradient", gradient).finish()
            }
            PhaseMap::Defocus { distance } => {
                f.debug_struct("Defocus").field("distance", distance).finish()
            }
            PhaseMap::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Complex transfer applied to the NL1 idler before it reaches NL2.
#[derive(Debug, Clone)]
pub struct IdlerTransfer {
    transmission: f64,
    phi0: f64,
    map: PhaseMap,
}

impl IdlerTransfer {
    pub fn new(map: PhaseMap, phi0: f64, transmission: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmission) {
            return Err(Error::domain(format!(
                "transmission must lie in [0, 1], got {transmission}"
            )));
        }
        if !phi0.is_finite() {
            return Err(Error::domain("phi0 must be finite"));
        }
        match &map {
            PhaseMap::Tilt { gradient } if !gradient.iter().all(|g| g.is_finite()) => {
                return Err(Error::domain("tilt gradient must be finite"));
            }
            PhaseMap::Defocus { distance } if !distance.is_finite() => {
                return Err(Error::domain("defocus distance must be finite"));
            }
            _ => {}
        }
        Ok(Self {
            transmission,
            phi0,
            map,
        })
    }

    pub fn uniform(phi0: f64) -> Self {
        Self::new(PhaseMap::Uniform, phi0, 1.0).expect("valid uniform transfer")
    }

    pub fn tilt(gradient: [f64; 2], phi0: f64) -> Result<Self> {
        Self::new(PhaseMap::Tilt { gradient }, phi0, 1.0)
    }

    pub fn defocus(distance: f64, phi0: f64) -> Result<Self> {
        Self::new(PhaseMap::Defocus { distance }, phi0, 1.0)
    }

    pub fn custom(map: Arc<PhaseFn>, phi0: f64) -> Self {
        Self::new(PhaseMap::Custom(map), phi0, 1.0).expect("valid custom transfer")
    }

    pub fn with_transmission(mut self, transmission: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmission) {
            return Err(Error::domain(format!(
                "transmission must lie in [0, 1], got {transmission}"
            )));
        }
        self.transmission = transmission;
        Ok(self)
    }

    pub fn with_phi0(mut self, phi0: f64) -> Self {
        self.phi0 = phi0;
        self
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn map(&self) -> &PhaseMap {
        &self.map
    }

    pub fn kind(&self) -> PhaseKind {
        match self.map {
            PhaseMap::Uniform => PhaseKind::Uniform,
            PhaseMap::Tilt { .. } => PhaseKind::Tilt,
            PhaseMap::Defocus { .. } => PhaseKind::Defocus,
            PhaseMap::Custom(_) => PhaseKind::Custom,
        }
    }

    /// Defocus distance for defocus maps.
    pub fn defocus_distance(&self) -> Option<f64> {
        match self.map {
            PhaseMap::Defocus { distance } => Some(distance),
            _ => None,
        }
    }

    /// Mode-dependent phase along one axis, excluding φ0, for maps that are
    /// a sum of per-axis terms.
    fn axis_phase(&self, axis: usize, q: f64, cfg: &OpticalConfig) -> Option<f64> {
        match &self.map {
            PhaseMap::Uniform => Some(0.0),
            PhaseMap::Tilt { gradient } => Some(gradient[axis] * q),
            PhaseMap::Defocus { distance } => Some(defocus_coefficient(*distance, cfg) * q * q),
            PhaseMap::Custom(_) => None,
        }
    }

    /// Upper bound of |dφ/dq| along `axis` for |q| ≤ `reach`.
    fn axis_phase_slope(&self, axis: usize, reach: f64, cfg: &OpticalConfig) -> Option<f64> {
        match &self.map {
            PhaseMap::Uniform => Some(0.0),
            PhaseMap::Tilt { gradient } => Some(gradient[axis].abs()),
            PhaseMap::Defocus { distance } => {
                Some(2.0 * defocus_coefficient(*distance, cfg).abs() * reach)
            }
            PhaseMap::Custom(_) => None,
        }
    }
}

/// `α` in `φ = α|q_i|²` for propagation by `d`: `d·λ_i/(4π)`.
pub fn defocus_coefficient(d: f64, cfg: &OpticalConfig) -> f64 {
    d * cfg.lambda_i / (4.0 * PI)
}

fn check_idler_paraxial(q_norm: f64, cfg: &OpticalConfig) -> Result<()> {
    let theta = q_norm * cfg.lambda_i / (2.0 * PI);
    if !(theta < PARAXIAL_LIMIT) {
        return Err(Error::domain(format!(
            "idler mode |q_i| = {q_norm:.4e} rad/m (angle {theta:.4} rad) outside paraxial bound"
        )));
    }
    Ok(())
}

/// Total idler phase for mode `q_i`, including φ0.
pub fn transfer_phase(transfer: &IdlerTransfer, q_i: Wavevector, cfg: &OpticalConfig) -> Result<f64> {
    let norm2 = q_i[0] * q_i[0] + q_i[1] * q_i[1];
    check_idler_paraxial(norm2.sqrt(), cfg)?;
    let varying = match &transfer.map {
        PhaseMap::Uniform => 0.0,
        PhaseMap::Tilt { gradient } => gradient[0] * q_i[0] + gradient[1] * q_i[1],
        PhaseMap::Defocus { distance } => {
            // (2π/λ_i)·d·θ²/2 with θ = |q_i|λ_i/(2π)
            let theta = norm2.sqrt() * cfg.lambda_i / (2.0 * PI);
            2.0 * PI / cfg.lambda_i * distance * theta * theta / 2.0
        }
        PhaseMap::Custom(f) => f(q_i),
    };
    Ok(transfer.phi0 + varying)
}

/// Square tensor-product quadrature grid over idler modes.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumWindow {
    pub center: Wavevector,
    pub half_width: f64,
    /// Nodes per axis (x, y), at least 3.
    pub points: [usize; 2],
}

impl MomentumWindow {
    pub fn new(center: Wavevector, half_width: f64, points: [usize; 2]) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::domain("window half-width must be positive"));
        }
        if points.iter().any(|&p| p < 3) {
            return Err(Error::domain("window needs at least 3 points per axis"));
        }
        Ok(Self {
            center,
            half_width,
            points,
        })
    }

    /// Default window for signal mode `q_s`: ±8 standard deviations of
    /// `|C|²` around the idler support centre, 171 nodes per axis, refined
    /// where the phase map would alias.
    pub fn for_mode(
        amp: &JointAmplitude,
        transfer: &IdlerTransfer,
        cfg: &OpticalConfig,
        q_s: Wavevector,
    ) -> Result<Self> {
        let (center, sigma) = amp.idler_support(q_s);
        let half_width = WINDOW_SIGMAS * sigma;
        let mut points = [WINDOW_POINTS; 2];
        for (axis, p) in points.iter_mut().enumerate() {
            let reach = center[axis].abs() + half_width;
            if let Some(slope) = transfer.axis_phase_slope(axis, reach, cfg) {
                *p = refined_points(half_width, slope);
            }
        }
        Self::new(center, half_width, points)
    }

    fn axis_nodes(&self, axis: usize) -> AxisNodes {
        let n = self.points[axis];
        let step = 2.0 * self.half_width / (n - 1) as f64;
        let start = self.center[axis] - self.half_width;
        AxisNodes { start, step, n }
    }
}

fn refined_points(half_width: f64, slope: f64) -> usize {
    let needed = (2.0 * half_width * slope / MAX_NODE_PHASE_STEP).ceil() as usize + 1;
    let p = needed.clamp(WINDOW_POINTS, MAX_WINDOW_POINTS);
    p | 1
}

/// Trapezoid nodes along one axis.
#[derive(Debug, Clone, Copy)]
struct AxisNodes {
    start: f64,
    step: f64,
    n: usize,
}

impl AxisNodes {
    fn node(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    fn weight(&self, j: usize) -> f64 {
        if j == 0 || j == self.n - 1 {
            0.5 * self.step
        } else {
            self.step
        }
    }
}

/// Per-mode detection statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIntensityResult {
    /// Detected rate including the interference term, `W + g(t)·Re Z`.
    pub mean_intensity: f64,
    /// Phase-averaged (singles) rate `W`.
    pub singles: f64,
    /// `g(t)|Z|/W`, in [0, 1].
    pub visibility: f64,
    /// `arg Z`.
    pub fringe_phase: f64,
}

impl ModeIntensityResult {
    /// `mean_intensity / (2·singles)`: 1 at full constructive interference.
    pub fn normalized(&self) -> f64 {
        self.mean_intensity / (2.0 * self.singles)
    }
}

/// `2t/(1+t²)`: coherence induced between the signal beams by an idler
/// path of amplitude transmission `t`.
pub fn coherence_factor(t: f64) -> f64 {
    2.0 * t / (1.0 + t * t)
}

#[derive(Debug, Clone, Copy)]
struct ModeSums {
    w: f64,
    z: Complex64,
}

/// One-axis integrals `(∫|C_x|², ∫|C_x|² e^{iφ_x})` for factorizing models.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AxisIntegral {
    pub w: f64,
    pub z: Complex64,
    edge_ratio: f64,
}

/// Whether `amp` and `transfer` integrate as a product of per-axis sums.
pub(crate) fn factorizes(amp: &JointAmplitude, transfer: &IdlerTransfer) -> bool {
    amp.kind() != AmplitudeKind::Custom && transfer.kind() != PhaseKind::Custom
}

pub(crate) fn axis_integral(
    amp: &JointAmplitude,
    transfer: &IdlerTransfer,
    cfg: &OpticalConfig,
    axis: usize,
    qs: f64,
    window: &MomentumWindow,
) -> Option<AxisIntegral> {
    let nodes = window.axis_nodes(axis);
    let mut w = 0.0;
    let mut z = Complex64::new(0.0, 0.0);
    let mut peak = 0.0f64;
    for j in 0..nodes.n {
        let q = nodes.node(j);
        let weight = amp.axis_weight(qs, q)?;
        let phase = transfer.axis_phase(axis, q, cfg)?;
        peak = peak.max(weight);
        let wq = weight * nodes.weight(j);
        w += wq;
        z += Complex64::from_polar(wq, phase);
    }
    let edge = amp
        .axis_weight(qs, nodes.node(0))?
        .max(amp.axis_weight(qs, nodes.node(nodes.n - 1))?);
    let edge_ratio = if peak > 0.0 { edge / peak } else { 0.0 };
    Some(AxisIntegral { w, z, edge_ratio })
}

fn check_window_paraxial(window: &MomentumWindow, cfg: &OpticalConfig) -> Result<()> {
    let rx = window.center[0].abs() + window.half_width;
    let ry = window.center[1].abs() + window.half_width;
    check_idler_paraxial((rx * rx + ry * ry).sqrt(), cfg)
}

fn separable_sums(
    q_s: Wavevector,
    amp: &JointAmplitude,
    transfer: &IdlerTransfer,
    cfg: &OpticalConfig,
    window: &MomentumWindow,
) -> Option<Result<ModeSums>> {
    let x = axis_integral(amp, transfer, cfg, 0, q_s[0], window)?;
    let y = axis_integral(amp, transfer, cfg, 1, q_s[1], window)?;
    Some(combine_axes(&x, &y, transfer.phi0))
}

fn combine_axes(x: &AxisIntegral, y: &AxisIntegral, phi0: f64) -> Result<ModeSums> {
    let edge_ratio = x.edge_ratio.max(y.edge_ratio);
    if edge_ratio >= MAX_EDGE_WEIGHT {
        return Err(Error::Truncation { edge_ratio });
    }
    Ok(ModeSums {
        w: x.w * y.w,
        z: x.z * y.z * Complex64::cis(phi0),
    })
}

fn direct_sums(
    q_s: Wavevector,
    amp: &JointAmplitude,
    transfer: &IdlerTransfer,
    cfg: &OpticalConfig,
    window: &MomentumWindow,
) -> Result<ModeSums> {
    let nx = window.axis_nodes(0);
    let ny = window.axis_nodes(1);
    let mut w = 0.0;
    let mut z = Complex64::new(0.0, 0.0);
    let mut peak = 0.0f64;
    let mut edge = 0.0f64;
    for jy in 0..ny.n {
        let qy = ny.node(jy);
        for jx in 0..nx.n {
            let qx = nx.node(jx);
            let q_i = [qx, qy];
            let weight = amp.evaluate(q_s, q_i).norm_sqr();
            peak = peak.max(weight);
            if jx == 0 || jy == 0 || jx == nx.n - 1 || jy == ny.n - 1 {
                edge = edge.max(weight);
            }
            let wq = weight * nx.weight(jx) * ny.weight(jy);
            w += wq;
            z += Complex64::from_polar(wq, transfer_phase(transfer, q_i, cfg)?);
        }
    }
    if peak > 0.0 && edge / peak >= MAX_EDGE_WEIGHT {
        return Err(Error::Truncation {
            edge_ratio: edge / peak,
        });
    }
    Ok(ModeSums { w, z })
}

fn finish(sums: ModeSums, transmission: f64) -> Result<ModeIntensityResult> {
    if !(sums.w.is_finite() && sums.w > 0.0) {
        return Err(Error::DegenerateState);
    }
    let g = coherence_factor(transmission);
    let norm = sums.z.norm();
    Ok(ModeIntensityResult {
        mean_intensity: sums.w + g * sums.z.re,
        singles: sums.w,
        visibility: (g * norm / sums.w).min(1.0),
        fringe_phase: if norm > 0.0 { sums.z.arg() } else { 0.0 },
    })
}

/// Detection statistics of signal mode `q_s`, integrating over idler modes
/// in `window`. Gaussian amplitudes with uniform, tilt or defocus maps are
/// integrated as a product of two 1D sums on the same grid; everything else
/// goes through the 2D sum.
pub fn signal_mode_intensity(
    q_s: Wavevector,
    amp: &JointAmplitude,
    transfer: &IdlerTransfer,
    cfg: &OpticalConfig,
    window: &MomentumWindow,
) -> Result<ModeIntensityResult> {
    match separable_sums(q_s, amp, transfer, cfg, window) {
        Some(sums) => {
            check_window_paraxial(window, cfg)?;
            finish(sums?, transfer.transmission)
        }
        None => finish(direct_sums(q_s, amp, transfer, cfg, window)?, transfer.transmission),
    }
}

/// Reference 2D quadrature, never factorized.
pub fn signal_mode_intensity_direct(
    q_s: Wavevector,
    amp: &JointAmplitude,
    transfer: &IdlerTransfer,
    cfg: &OpticalConfig,
    window: &MomentumWindow,
) -> Result<ModeIntensityResult> {
    finish(direct_sums(q_s, amp, transfer, cfg, window)?, transfer.transmission)
}

/// [`signal_mode_intensity`] over the default window for `q_s`.
pub fn mode_intensity(
    q_s: Wavevector,
    amp: &JointAmplitude,
    transfer: &IdlerTransfer,
    cfg: &OpticalConfig,
) -> Result<ModeIntensityResult> {
    let window = MomentumWindow::for_mode(amp, transfer, cfg, q_s)?;
    signal_mode_intensity(q_s, amp, transfer, cfg, &window)
}

pub(crate) fn finish_axes(
    x: &AxisIntegral,
    y: &AxisIntegral,
    transfer: &IdlerTransfer,
) -> Result<ModeIntensityResult> {
    finish(combine_axes(x, y, transfer.phi0)?, transfer.transmission)
}

/// Signal mode imaged at camera offset `r` (m) from the optical axis.
pub fn camera_to_signal_mode(r: [f64; 2], cfg: &OpticalConfig) -> Wavevector {
    let scale = cfg.k_signal() / cfg.f_c;
    [r[0] * scale, r[1] * scale]
}

/// `lambda_s² / lambda_i`.
pub fn equivalent_wavelength(lambda_s: f64, lambda_i: f64) -> Result<f64> {
    if !(lambda_s > 0.0 && lambda_i > 0.0) {
        return Err(Error::domain("wavelengths must be positive"));
    }
    Ok(lambda_s * lambda_s / lambda_i)
}

/// Ring of order `order` predicted at camera radius `radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedExtremum {
    pub order: f64,
    pub radius: f64,
}

impl PredictedExtremum {
    pub fn is_maximum(&self) -> bool {
        self.order.fract() == 0.0
    }
}

/// Closed-form ring radii `ρ_n` from `d·ρ²/(2f_c²) + φ_len = n·λ_eq`.
///
/// `phi` is the interferometric phase offset in radians; it enters the
/// length-valued condition as `φ_len = phi/(2π)·λ_eq`. Orders whose radicand
/// is negative are skipped.
pub fn predicted_extrema_radii(
    d: f64,
    phi: f64,
    cfg: &OpticalConfig,
    orders: &[f64],
) -> Result<Vec<PredictedExtremum>> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::domain(format!("propagation distance must be > 0, got {d}")));
    }
    let lambda_eq = cfg.equivalent_wavelength();
    let phi_len = phi / (2.0 * PI) * lambda_eq;
    Ok(orders
        .iter()
        .filter_map(|&n| {
            let radicand = (n * lambda_eq - phi_len) * 2.0 * cfg.f_c * cfg.f_c / d;
            (radicand >= 0.0).then(|| PredictedExtremum {
                order: n,
                radius: radicand.sqrt(),
            })
        })
        .collect())
}

/// Camera period of the straight fringes produced by a tilt gradient `s`:
/// `f_c·λ_s/|s|`.
pub fn tilt_fringe_period(gradient: [f64; 2], cfg: &OpticalConfig) -> Result<f64> {
    let s = gradient[0].hypot(gradient[1]);
    if !(s > 0.0) {
        return Err(Error::domain("tilt gradient must be nonzero"));
    }
    Ok(cfg.f_c * cfg.lambda_s / s)
}
