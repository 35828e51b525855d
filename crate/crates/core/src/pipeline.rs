//! Render → analyze → regress, the way a defocus sweep is run.

use rayon::prelude::*;

use crate::analysis::{analyze_frame, fit_equivalent_wavelength, AnalysisConfig, FrameAnalysis, WavelengthEstimate};
use crate::biphoton::IdlerTransfer;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::imaging::{add_shot_noise, render_image, FringeImage};

/// Frame at defocus distance `d`, keeping the configured `phi0` and
/// transmission. With a seed the frame carries Poisson noise.
pub fn render_at(run: &RunConfig, d: f64, seed: Option<u64>) -> Result<FringeImage> {
    let transfer = IdlerTransfer::defocus(d, run.transfer.phi0())?.with_transmission(run.transfer.transmission())?;
    let img = render_image(&run.optical, &run.amplitude, &transfer, &run.camera)?;
    Ok(match seed {
        Some(s) => add_shot_noise(&img, s),
        None => img,
    })
}

/// Frames for each `d`; frame `k` uses seed `seed + k`.
pub fn render_series(run: &RunConfig, distances: &[f64], seed: Option<u64>) -> Result<Vec<(f64, FringeImage)>> {
    distances
        .iter()
        .enumerate()
        .map(|(k, &d)| Ok((d, render_at(run, d, seed.map(|s| s.wrapping_add(k as u64)))?)))
        .collect()
}

/// Analyzes frames in parallel; results keep the input order.
pub fn analyze_series(frames: &[(f64, FringeImage)], cfg: &AnalysisConfig) -> Vec<(f64, Result<FrameAnalysis>)> {
    frames
        .par_iter()
        .map(|(d, img)| (*d, analyze_frame(img, cfg)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub frames: Vec<(f64, FrameAnalysis)>,
    pub estimate: WavelengthEstimate,
}

/// Full sweep. Any per-frame failure aborts, since every frame was
/// generated on purpose.
pub fn run_sweep(run: &RunConfig, distances: &[f64], seed: Option<u64>) -> Result<SweepOutcome> {
    let distinct = {
        let mut v = distances.to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    if distinct < 2 {
        return Err(Error::Regression(format!("need at least 2 distinct distances, got {distinct}")));
    }
    let rendered = render_series(run, distances, seed)?;
    let frames = analyze_series(&rendered, &run.analysis)
        .into_iter()
        .map(|(d, r)| r.map(|a| (d, a)))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<_> = frames.iter().map(|(d, a)| (*d, a.fit)).collect();
    let estimate = fit_equivalent_wavelength(&pairs, run.optical.f_c)?;
    Ok(SweepOutcome { frames, estimate })
}
