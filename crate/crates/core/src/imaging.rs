//! Camera-plane rendering of the forward model and the frame file format.
//!
//! A camera in the focal plane of a lens maps each signal wavevector to one
//! pixel: `q_s = k_s·(r − r0)/f_c`. Frames are stored as 16-bit binary PGM
//! (`P5`, max 65535, big-endian samples, normalized to the frame maximum)
//! with a `<image>.meta` sidecar of `key = value` lines holding the scale,
//! the camera and the generation parameters.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{Array2, Zip};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::biphoton::{
    axis_integral, camera_to_signal_mode, factorizes, finish_axes, mode_intensity,
    IdlerTransfer, JointAmplitude, MomentumWindow, PhaseMap,
};
use crate::error::{Error, Result};
use crate::fs::write_atomic;
use crate::optics::{OpticalConfig, PARAXIAL_LIMIT};

pub const MIN_CAMERA_PIXELS: usize = 64;
const PGM_MAX: f64 = 65535.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel {
    pub width_px: usize,
    pub height_px: usize,
    /// Pixel pitch (m).
    pub pixel_pitch: f64,
    /// Optical-axis position in pixel coordinates `(x, y)`.
    pub center_px: [f64; 2],
    /// 1/e² radius of the signal envelope on the sensor (m).
    pub envelope_radius: f64,
    /// Mean counts at the envelope centre of a fully constructive frame.
    pub exposure_counts: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        Self {
            width_px: 512,
            height_px: 512,
            pixel_pitch: 20e-6,
            center_px: [255.5, 255.5],
            envelope_radius: 2.5e-3,
            exposure_counts: 4000.0,
        }
    }
}

impl CameraModel {
    /// Square sensor with the optical axis at its geometric centre.
    pub fn centered(side_px: usize, pixel_pitch: f64, envelope_radius: f64) -> Result<Self> {
        let c = (side_px as f64 - 1.0) / 2.0;
        let cam = Self {
            width_px: side_px,
            height_px: side_px,
            pixel_pitch,
            center_px: [c, c],
            envelope_radius,
            ..Self::default()
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width_px < MIN_CAMERA_PIXELS || self.height_px < MIN_CAMERA_PIXELS {
            return Err(Error::domain(format!(
                "camera must be at least {MIN_CAMERA_PIXELS}x{MIN_CAMERA_PIXELS} pixels, got {}x{}",
                self.width_px, self.height_px
            )));
        }
        if !(self.pixel_pitch.is_finite() && self.pixel_pitch > 0.0) {
            return Err(Error::domain("pixel pitch must be positive"));
        }
        if !(self.envelope_radius.is_finite() && self.envelope_radius > 0.0) {
            return Err(Error::domain("envelope radius must be positive"));
        }
        if !(self.exposure_counts.is_finite() && self.exposure_counts >= 0.0) {
            return Err(Error::domain("exposure counts must be nonnegative"));
        }
        if !self.center_px.iter().all(|c| c.is_finite()) {
            return Err(Error::domain("camera center must be finite"));
        }
        Ok(())
    }

    pub fn with_center(mut self, center_px: [f64; 2]) -> Self {
        self.center_px = center_px;
        self
    }

    /// Sensor position of pixel `(col, row)` relative to the optical axis (m).
    pub fn pixel_position(&self, col: usize, row: usize) -> [f64; 2] {
        [
            (col as f64 - self.center_px[0]) * self.pixel_pitch,
            (row as f64 - self.center_px[1]) * self.pixel_pitch,
        ]
    }

    /// Envelope weight `exp(−2ρ²/R²)`.
    pub fn envelope(&self, rho: f64) -> f64 {
        (-2.0 * rho * rho / (self.envelope_radius * self.envelope_radius)).exp()
    }

    fn corner_offsets(&self) -> [f64; 2] {
        let dx = self.center_px[0].abs().max((self.width_px as f64 - 1.0 - self.center_px[0]).abs());
        let dy =
            self.center_px[1].abs().max((self.height_px as f64 - 1.0 - self.center_px[1]).abs());
        [dx * self.pixel_pitch, dy * self.pixel_pitch]
    }
}

/// A camera frame, indexed `[row, col]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeImage {
    intensities: Array2<f64>,
    camera: CameraModel,
    metadata: BTreeMap<String, String>,
}

impl FringeImage {
    pub fn new(
        intensities: Array2<f64>,
        camera: CameraModel,
        metadata: BTreeMap<String, String>,
    ) -> Result<Self> {
        camera.validate()?;
        if intensities.dim() != (camera.height_px, camera.width_px) {
            return Err(Error::domain(format!(
                "intensity array {:?} does not match camera {}x{}",
                intensities.dim(),
                camera.width_px,
                camera.height_px
            )));
        }
        if let Some(bad) = intensities.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain(format!("intensity {bad} is not a finite nonnegative value")));
        }
        Ok(Self {
            intensities,
            camera,
            metadata,
        })
    }

    pub fn intensities(&self) -> &Array2<f64> {
        &self.intensities
    }

    pub fn camera(&self) -> &CameraModel {
        &self.camera
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn metadata_f64(&self, key: &str) -> Option<f64> {
        self.metadata.get(key)?.parse().ok()
    }

    /// Propagation distance recorded at render time (m).
    pub fn distance(&self) -> Option<f64> {
        self.metadata_f64("d_m")
    }

    pub fn set_metadata(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_owned(), value.to_string());
    }

    pub fn total(&self) -> f64 {
        self.intensities.sum()
    }

    pub fn max(&self) -> f64 {
        self.intensities.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::domain("scale factor must be positive"));
        }
        Ok(Self {
            intensities: self.intensities.mapv(|v| v * factor),
            camera: self.camera,
            metadata: self.metadata.clone(),
        })
    }
}

fn check_field_of_view(
    cfg: &OpticalConfig,
    amp: &JointAmplitude,
    transfer: &IdlerTransfer,
    cam: &CameraModel,
) -> Result<()> {
    let corner = cam.corner_offsets();
    let q_s = camera_to_signal_mode(corner, cfg);
    let window = MomentumWindow::for_mode(amp, transfer, cfg, q_s)?;
    let reach_x = window.center[0].abs() + window.half_width;
    let reach_y = window.center[1].abs() + window.half_width;
    let theta_i = reach_x.hypot(reach_y) * cfg.lambda_i / (2.0 * PI);
    let theta_s = corner[0].hypot(corner[1]) / cfg.f_c;
    if !(theta_i < PARAXIAL_LIMIT && theta_s < PARAXIAL_LIMIT) {
        return Err(Error::FieldOfView(format!(
            "corner pixel reaches signal angle {theta_s:.4} rad and idler angle {theta_i:.4} rad (limit {PARAXIAL_LIMIT})"
        )));
    }
    Ok(())
}

fn render_metadata(
    cfg: &OpticalConfig,
    amp: &JointAmplitude,
    transfer: &IdlerTransfer,
) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        m.insert(k.to_owned(), v);
    };
    put("amplitude", amp.kind().to_string());
    match amp {
        JointAmplitude::CorrelatedGaussian { pump_waist } => put("pump_waist_m", pump_waist.to_string()),
        JointAmplitude::SeparableGaussian {
            signal_width,
            idler_width,
        } => {
            put("signal_width_per_m", signal_width.to_string());
            put("idler_width_per_m", idler_width.to_string());
        }
        JointAmplitude::Custom(_) => {}
    }
    put("transfer", transfer.kind().to_string());
    match transfer.map() {
        PhaseMap::Defocus { distance } => put("d_m", distance.to_string()),
        PhaseMap::Tilt { gradient } => {
            put("tilt_x_m", gradient[0].to_string());
            put("tilt_y_m", gradient[1].to_string());
        }
        _ => {}
    }
    put("phi0_rad", transfer.phi0().to_string());
    put("transmission", transfer.transmission().to_string());
    put("lambda_s_m", cfg.lambda_s.to_string());
    put("lambda_i_m", cfg.lambda_i.to_string());
    put("lambda_p_m", cfg.lambda_p.to_string());
    put("f_c_m", cfg.f_c.to_string());
    put("f_idler_m", cfg.f_idler.to_string());
    m
}

/// Noise-free frame: envelope × per-mode rate, normalized so a fully
/// constructive mode at the envelope centre reads `exposure_counts`.
pub fn render_image(
    cfg: &OpticalConfig,
    amp: &JointAmplitude,
    transfer: &IdlerTransfer,
    cam: &CameraModel,
) -> Result<FringeImage> {
    cam.validate()?;
    check_field_of_view(cfg, amp, transfer, cam)?;
    let scale = cfg.k_signal() / cfg.f_c;
    let xs: Vec<f64> = (0..cam.width_px).map(|c| cam.pixel_position(c, 0)[0]).collect();
    let ys: Vec<f64> = (0..cam.height_px).map(|r| cam.pixel_position(0, r)[1]).collect();
    let mut out = Array2::<f64>::zeros((cam.height_px, cam.width_px));

    if factorizes(amp, transfer) {
        let axis = |axis: usize, pos: &[f64]| -> Result<Vec<_>> {
            pos.par_iter()
                .map(|&p| {
                    let mut q = [0.0; 2];
                    q[axis] = p * scale;
                    let window = MomentumWindow::for_mode(amp, transfer, cfg, q)?;
                    axis_integral(amp, transfer, cfg, axis, q[axis], &window)
                        .ok_or_else(|| Error::domain("model does not factorize"))
                })
                .collect()
        };
        let cols = axis(0, &xs)?;
        let rows = axis(1, &ys)?;
        out.axis_iter_mut(ndarray::Axis(0))
            .into_par_iter()
            .enumerate()
            .try_for_each(|(r, mut line)| -> Result<()> {
                for (c, v) in line.iter_mut().enumerate() {
                    let res = finish_axes(&cols[c], &rows[r], transfer)?;
                    *v = pixel_value(cam, xs[c], ys[r], res.normalized());
                }
                Ok(())
            })?;
    } else {
        out.axis_iter_mut(ndarray::Axis(0))
            .into_par_iter()
            .enumerate()
            .try_for_each(|(r, mut line)| -> Result<()> {
                for (c, v) in line.iter_mut().enumerate() {
                    let q_s = camera_to_signal_mode([xs[c], ys[r]], cfg);
                    let res = mode_intensity(q_s, amp, transfer, cfg)?;
                    *v = pixel_value(cam, xs[c], ys[r], res.normalized());
                }
                Ok(())
            })?;
    }
    FringeImage::new(out, *cam, render_metadata(cfg, amp, transfer))
}

fn pixel_value(cam: &CameraModel, x: f64, y: f64, normalized: f64) -> f64 {
    // rounding can leave a destructive mode a hair below zero
    (cam.exposure_counts * cam.envelope(x.hypot(y)) * normalized).max(0.0)
}

/// One frame per `phi0` value, everything else fixed.
pub fn phase_scan(
    cfg: &OpticalConfig,
    amp: &JointAmplitude,
    transfer: &IdlerTransfer,
    cam: &CameraModel,
    phi0_values: &[f64],
) -> Result<Vec<FringeImage>> {
    phi0_values
        .iter()
        .map(|&phi0| render_image(cfg, amp, &transfer.clone().with_phi0(phi0), cam))
        .collect()
}

/// Replaces every pixel by a Poisson draw with the pixel value as mean.
/// Each row draws from its own ChaCha stream, so the result does not depend
/// on thread scheduling.
pub fn add_shot_noise(img: &FringeImage, seed: u64) -> FringeImage {
    let mut out = img.intensities.clone();
    out.axis_iter_mut(ndarray::Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(r, mut line)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            for v in line.iter_mut() {
                *v = match Poisson::new(*v) {
                    Ok(p) => p.sample(&mut rng),
                    Err(_) => 0.0,
                };
            }
        });
    let mut noisy = FringeImage {
        intensities: out,
        camera: img.camera,
        metadata: img.metadata.clone(),
    };
    noisy.set_metadata("seed", seed);
    noisy
}

/// Sidecar path for an image file: `frame.pgm` → `frame.pgm.meta`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn write_image(img: &FringeImage, path: &Path) -> Result<()> {
    let (h, w) = img.intensities.dim();
    let max = img.max();
    let mut bytes = format!("P5\n{w} {h}\n65535\n").into_bytes();
    bytes.reserve(2 * w * h);
    for &v in img.intensities.iter() {
        let q = if max > 0.0 { (v / max * PGM_MAX).round() as u16 } else { 0 };
        bytes.extend_from_slice(&q.to_be_bytes());
    }

    let cam = &img.camera;
    let mut meta = String::new();
    let mut line = |k: &str, v: &dyn std::fmt::Display| {
        let _ = writeln!(meta, "{k} = {v}");
    };
    line("scale", &max);
    line("camera.width_px", &cam.width_px);
    line("camera.height_px", &cam.height_px);
    line("camera.pixel_pitch_m", &cam.pixel_pitch);
    line("camera.center_x_px", &cam.center_px[0]);
    line("camera.center_y_px", &cam.center_px[1]);
    line("camera.envelope_radius_m", &cam.envelope_radius);
    line("camera.exposure_counts", &cam.exposure_counts);
    for (k, v) in &img.metadata {
        if k.contains(['=', '\n']) || v.contains('\n') || k.starts_with("camera.") || k == "scale" {
            return Err(Error::domain(format!("metadata entry {k:?} cannot be stored")));
        }
        line(k, v);
    }
    write_atomic(path, &bytes)?;
    write_atomic(&sidecar_path(path), meta.as_bytes())
}

pub fn read_image(path: &Path) -> Result<FringeImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (w, h, offset) = parse_pgm_header(path, &bytes)?;
    let need = 2 * w * h;
    let data = &bytes[offset..];
    if data.len() < need {
        return Err(parse_err(
            path,
            format!("byte {}", bytes.len()),
            format!("expected {need} sample bytes, found {}", data.len()),
        ));
    }

    let meta_path = sidecar_path(path);
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (k, v) = l.split_once('=').ok_or_else(|| {
            parse_err(&meta_path, format!("line {}", i + 1), "expected `key = value`".into())
        })?;
        entries.insert(k.trim().to_owned(), (v.trim().to_owned(), i + 1));
    }
    let mut take = |key: &str| -> Result<f64> {
        let (v, line) = entries.remove(key).ok_or_else(|| {
            parse_err(&meta_path, "end of file".into(), format!("missing key {key}"))
        })?;
        v.parse::<f64>()
            .map_err(|_| parse_err(&meta_path, format!("line {line}"), format!("bad number for {key}: {v}")))
    };
    let scale = take("scale")?;
    let camera = CameraModel {
        width_px: take("camera.width_px")? as usize,
        height_px: take("camera.height_px")? as usize,
        pixel_pitch: take("camera.pixel_pitch_m")?,
        center_px: [take("camera.center_x_px")?, take("camera.center_y_px")?],
        envelope_radius: take("camera.envelope_radius_m")?,
        exposure_counts: take("camera.exposure_counts")?,
    };
    if (camera.width_px, camera.height_px) != (w, h) {
        return Err(parse_err(
            &meta_path,
            "camera.width_px".into(),
            format!("sidecar camera {}x{} does not match image {w}x{h}", camera.width_px, camera.height_px),
        ));
    }
    let samples: Vec<f64> = data[..need]
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]) as f64 / PGM_MAX * scale)
        .collect();
    let intensities = Array2::from_shape_vec((h, w), samples)
        .map_err(|e| parse_err(path, "data".into(), e.to_string()))?;
    let metadata = entries.into_iter().map(|(k, (v, _))| (k, v)).collect();
    FringeImage::new(intensities, camera, metadata)
}

fn parse_err(path: &Path, location: String, message: String) -> Error {
    Error::Parse {
        path: path.to_owned(),
        location,
        message,
    }
}

fn parse_pgm_header(path: &Path, bytes: &[u8]) -> Result<(usize, usize, usize)> {
    let mut pos = 0;
    let mut token = |what: &str| -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(parse_err(path, format!("byte {start}"), format!("missing {what}")));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token("magic")?;
    if magic != "P5" {
        return Err(parse_err(path, "byte 0".into(), format!("expected P5, found {magic:?}")));
    }
    let mut number = |what: &str| -> Result<usize> {
        let t = token(what)?;
        t.parse()
            .map_err(|_| parse_err(path, format!("header field {what}"), format!("bad value {t:?}")))
    };
    let w = number("width")?;
    let h = number("height")?;
    let maxval = number("maxval")?;
    if maxval != 65535 {
        return Err(parse_err(path, "header field maxval".into(), format!("expected 65535, found {maxval}")));
    }
    // exactly one whitespace byte separates the header from the samples
    if pos >= bytes.len() {
        return Err(parse_err(path, format!("byte {pos}"), "missing sample data".into()));
    }
    Ok((w, h, pos + 1))
}

/// Sum of all pixel values across `frames`, element-wise.
pub fn frame_sum(frames: &[FringeImage]) -> Result<Array2<f64>> {
    let first = frames.first().ok_or_else(|| Error::domain("no frames"))?;
    let mut acc = Array2::<f64>::zeros(first.intensities.dim());
    for f in frames {
        if f.intensities.dim() != acc.dim() {
            return Err(Error::domain("frames differ in size"));
        }
        Zip::from(&mut acc).and(&f.intensities).for_each(|a, &v| *a += v);
    }
    Ok(acc)
}
