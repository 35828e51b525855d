//! Flat `key = value` run configuration.
//!
//! Keys are dotted (`optical.lambda_s_nm`) and carry their unit in the name;
//! everything is converted to SI on build. Unknown keys are rejected.
//! Lines starting with `#` and blank lines are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::AnalysisConfig;
use crate::biphoton::{make_correlated_amplitude, make_separable_amplitude, IdlerTransfer, JointAmplitude, PhaseMap};
use crate::error::{Error, Result};
use crate::imaging::CameraModel;
use crate::optics::{check_energy_conservation, defocus_to_distance, OpticalConfig};

/// Every accepted key with its default (empty: no default).
pub const KEYS: &[(&str, &str)] = &[
    ("optical.lambda_s_nm", "810"),
    ("optical.lambda_i_nm", "1550"),
    ("optical.lambda_p_nm", "532"),
    ("optical.f_c_mm", "150"),
    ("optical.f_idler_mm", "100"),
    ("optical.pump_waist_um", "250"),
    ("camera.width_px", "512"),
    ("camera.height_px", "512"),
    ("camera.pixel_pitch_um", "20"),
    ("camera.center_x_px", ""),
    ("camera.center_y_px", ""),
    ("camera.envelope_radius_mm", "2.5"),
    ("camera.exposure_counts", "4000"),
    ("transfer.kind", "defocus"),
    ("transfer.d_mm", ""),
    ("transfer.delta_mm", ""),
    ("transfer.phi0_deg", "0"),
    ("transfer.transmission", "1"),
    ("transfer.tilt_x_mm", "0"),
    ("transfer.tilt_y_mm", "0"),
    ("amplitude.kind", "correlated"),
    ("amplitude.signal_width_per_mm", ""),
    ("amplitude.idler_width_per_mm", ""),
    ("noise.seed", ""),
    ("output.dir", "out"),
    ("analysis.bin_width_um", ""),
    ("analysis.smooth_half_width_bins", "2"),
    ("analysis.prominence", "0.05"),
    ("analysis.center_search_px", "3"),
    ("analysis.center_step_px", "0.1"),
    ("analysis.max_radius_factor", "1.2"),
];

/// Defocus distance used when neither `transfer.d_mm` nor
/// `transfer.delta_mm` is given.
pub const DEFAULT_D_MM: f64 = 17.0;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub optical: OpticalConfig,
    pub camera: CameraModel,
    pub transfer: IdlerTransfer,
    pub amplitude: JointAmplitude,
    pub noise_seed: Option<u64>,
    pub output_dir: PathBuf,
    pub analysis: AnalysisConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Settings::default().build().expect("defaults are valid")
    }
}

/// Raw settings with the line each value came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, (String, Option<usize>)>,
}

fn config_err(key: &str, line: Option<usize>, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_owned(),
        line,
        message: message.into(),
    }
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| config_err(l, Some(line), "expected `key = value`"))?;
            let k = k.trim();
            // trailing comments
            let v = v.split_once(" #").map_or(v, |(v, _)| v).trim();
            if s.values.contains_key(k) {
                return Err(config_err(k, Some(line), "duplicate key"));
            }
            s.insert(k, v, Some(line))?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Sets or overrides a key, as a command-line flag does.
    pub fn set(&mut self, key: &str, value: impl ToString) -> Result<()> {
        self.insert(key, &value.to_string(), None)
    }

    fn insert(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<()> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(config_err(key, line, "unknown key"));
        }
        self.values.insert(key.to_owned(), (value.to_owned(), line));
        Ok(())
    }

    pub fn remove(&mut self, key: &str) {
        self.values.remove(key);
    }

    fn raw(&self, key: &str) -> Option<(&str, Option<usize>)> {
        self.values.get(key).map(|(v, l)| (v.as_str(), *l)).or_else(|| {
            KEYS.iter()
                .find(|(k, d)| *k == key && !d.is_empty())
                .map(|(_, d)| (*d, None))
        })
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.values.get(key).and_then(|v| v.1)
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| config_err(key, line, format!("expected a number, got {v:?}"))),
        }
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.opt_f64(key)?
            .ok_or_else(|| config_err(key, None, "missing value"))
    }

    fn opt_u64(&self, key: &str) -> Result<Option<u64>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<u64>()
                .map(Some)
                .map_err(|_| config_err(key, line, format!("expected a nonnegative integer, got {v:?}"))),
        }
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let v = self
            .opt_u64(key)?
            .ok_or_else(|| config_err(key, None, "missing value"))?;
        usize::try_from(v).map_err(|_| config_err(key, self.line(key), "value too large"))
    }

    fn str(&self, key: &str) -> &str {
        self.raw(key).map_or("", |(v, _)| v)
    }

    /// Wraps a component error as a config error on `key`.
    fn check<T>(&self, key: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| config_err(key, self.line(key), e.to_string()))
    }

    pub fn build(&self) -> Result<RunConfig> {
        let optical = self.optical()?;
        let camera = self.camera()?;
        let transfer = self.transfer(&optical)?;
        let amplitude = self.amplitude(&optical, &camera)?;
        let analysis = AnalysisConfig {
            bin_width: self.opt_f64("analysis.bin_width_um")?.map(|v| v / 1e6),
            smooth_half_width: self.usize("analysis.smooth_half_width_bins")?,
            prominence: self.f64("analysis.prominence")?,
            center_search_px: self.f64("analysis.center_search_px")?,
            center_step_px: self.f64("analysis.center_step_px")?,
            max_radius_factor: self.f64("analysis.max_radius_factor")?,
        };
        self.check("analysis", analysis.validate())?;
        Ok(RunConfig {
            optical,
            camera,
            transfer,
            amplitude,
            noise_seed: self.opt_u64("noise.seed")?,
            output_dir: PathBuf::from(self.str("output.dir")),
            analysis,
        })
    }

    fn optical(&self) -> Result<OpticalConfig> {
        let ls = self.f64("optical.lambda_s_nm")? / 1e9;
        let li = self.f64("optical.lambda_i_nm")? / 1e9;
        let lp = self.f64("optical.lambda_p_nm")? / 1e9;
        let f_c = self.f64("optical.f_c_mm")? / 1e3;
        let f_i = self.f64("optical.f_idler_mm")? / 1e3;
        let w = self.f64("optical.pump_waist_um")? / 1e6;
        if let Ok(false) = check_energy_conservation(ls, li, lp) {
            let implied = 1.0 / (1.0 / ls + 1.0 / li) * 1e9;
            return Err(config_err(
                "optical.lambda_p_nm",
                self.line("optical.lambda_p_nm"),
                format!("energy conservation violated: signal and idler imply a {implied:.2} nm pump"),
            ));
        }
        self.check("optical", OpticalConfig::new(ls, li, lp, f_c, f_i, w))
    }

    fn camera(&self) -> Result<CameraModel> {
        let width_px = self.usize("camera.width_px")?;
        let height_px = self.usize("camera.height_px")?;
        let center_x = self.opt_f64("camera.center_x_px")?;
        let center_y = self.opt_f64("camera.center_y_px")?;
        let cam = CameraModel {
            width_px,
            height_px,
            pixel_pitch: self.f64("camera.pixel_pitch_um")? / 1e6,
            center_px: [
                center_x.unwrap_or((width_px as f64 - 1.0) / 2.0),
                center_y.unwrap_or((height_px as f64 - 1.0) / 2.0),
            ],
            envelope_radius: self.f64("camera.envelope_radius_mm")? / 1e3,
            exposure_counts: self.f64("camera.exposure_counts")?,
        };
        self.check("camera", cam.validate())?;
        Ok(cam)
    }

    fn transfer(&self, optical: &OpticalConfig) -> Result<IdlerTransfer> {
        let phi0 = self.f64("transfer.phi0_deg")?.to_radians();
        let t = self.f64("transfer.transmission")?;
        let kind = self.str("transfer.kind");
        let map = match kind {
            "uniform" => PhaseMap::Uniform,
            "tilt" => PhaseMap::Tilt {
                gradient: [
                    self.f64("transfer.tilt_x_mm")? / 1e3,
                    self.f64("transfer.tilt_y_mm")? / 1e3,
                ],
            },
            "defocus" => PhaseMap::Defocus {
                distance: self.defocus_distance(optical)?,
            },
            other => {
                return Err(config_err(
                    "transfer.kind",
                    self.line("transfer.kind"),
                    format!("expected uniform, tilt or defocus, got {other:?}"),
                ))
            }
        };
        let key = if (0.0..=1.0).contains(&t) { "transfer" } else { "transfer.transmission" };
        self.check(key, IdlerTransfer::new(map, phi0, t))
    }

    fn defocus_distance(&self, optical: &OpticalConfig) -> Result<f64> {
        let d = self.opt_f64("transfer.d_mm")?;
        let delta = self.opt_f64("transfer.delta_mm")?;
        match (d, delta) {
            (Some(_), Some(_)) => Err(config_err(
                "transfer.delta_mm",
                self.line("transfer.delta_mm"),
                "give either transfer.d_mm or transfer.delta_mm, not both",
            )),
            (Some(d), None) => Ok(d / 1e3),
            (None, Some(delta)) => {
                let r = defocus_to_distance(delta / 1e3, optical.f_idler);
                Ok(self.check("transfer.delta_mm", r)?.distance)
            }
            (None, None) => Ok(DEFAULT_D_MM / 1e3),
        }
    }

    fn amplitude(&self, optical: &OpticalConfig, camera: &CameraModel) -> Result<JointAmplitude> {
        match self.str("amplitude.kind") {
            "correlated" => self.check("optical.pump_waist_um", make_correlated_amplitude(optical.pump_waist)),
            "separable" => {
                let sw = self.opt_f64("amplitude.signal_width_per_mm")?;
                let iw = self.opt_f64("amplitude.idler_width_per_mm")?;
                match (sw, iw) {
                    (Some(s), Some(i)) => {
                        self.check("amplitude.kind", make_separable_amplitude(s * 1e3, i * 1e3))
                    }
                    (None, None) => {
                        // marginals matched to the correlated state under the camera envelope
                        let q_env = optical.k_signal() * camera.envelope_radius / optical.f_c;
                        self.check(
                            "amplitude.kind",
                            JointAmplitude::separable_matched(optical.pump_waist, q_env),
                        )
                    }
                    _ => Err(config_err(
                        "amplitude.idler_width_per_mm",
                        None,
                        "give both separable widths or neither",
                    )),
                }
            }
            other => Err(config_err(
                "amplitude.kind",
                self.line("amplitude.kind"),
                format!("expected correlated or separable, got {other:?}"),
            )),
        }
    }

    /// Effective settings, one `key = value` per line, defaults included.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, _) in KEYS {
            if let Some((v, _)) = self.raw(k) {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    Settings::load(path)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = Settings::parse("").unwrap().build().unwrap();
        assert_eq!(cfg.optical, OpticalConfig::reference());
        assert_eq!(cfg.camera, CameraModel::default());
        assert_eq!(cfg.transfer.defocus_distance(), Some(0.017));
        assert_eq!(cfg.transfer.phi0(), 0.0);
        assert_eq!(cfg.transfer.transmission(), 1.0);
        assert_eq!(cfg.noise_seed, None);
        assert_eq!(cfg.analysis, AnalysisConfig::default());
    }

    #[test]
    fn reference_file_parses() {
        let text = "# reference setup\n\
            optical.lambda_s_nm = 810\n\
            optical.lambda_i_nm = 1550\n\
            optical.lambda_p_nm = 532\n\
            optical.pump_waist_um = 250   # waist\n\
            transfer.kind = defocus\n\
            transfer.d_mm = 17\n\
            noise.seed = 7\n";
        let cfg = Settings::parse(text).unwrap().build().unwrap();
        assert!((cfg.optical.pump_waist - 250e-6).abs() < 1e-18);
        assert_eq!(cfg.noise_seed, Some(7));
    }

    #[test]
    fn wrong_pump_is_an_energy_error() {
        let err = Settings::parse("\noptical.lambda_p_nm = 600\n").unwrap().build().unwrap_err();
        match err {
            Error::Config { key, line, message } => {
                assert_eq!(key, "optical.lambda_p_nm");
                assert_eq!(line, Some(2));
                assert!(message.contains("energy"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn strict_keys_and_values() {
        let err = Settings::parse("optical.lambda_x_nm = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: Some(1), .. }));
        let err = Settings::parse("a b c\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: Some(1), .. }));
        let err = Settings::parse("\n\ncamera.width_px = wide\n").unwrap().build().unwrap_err();
        assert!(err.to_string().contains("camera.width_px (line 3)"), "{err}");
        let err = Settings::parse("transfer.kind = spiral\n").unwrap().build().unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "transfer.kind"));
        let err = Settings::parse("transfer.d_mm = 1\ntransfer.d_mm = 2\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: Some(2), .. }));
        let err = Settings::parse("transfer.transmission = 1.5\n").unwrap().build().unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "transfer.transmission"));
    }

    #[test]
    fn overrides_and_delta() {
        let mut s = Settings::parse("transfer.d_mm = 9\n").unwrap();
        s.set("transfer.d_mm", 13).unwrap();
        assert_eq!(s.build().unwrap().transfer.defocus_distance(), Some(0.013));
        assert!(s.set("nope", 1).is_err());

        let mut s = Settings::default();
        s.set("transfer.delta_mm", 10).unwrap();
        let d = s.build().unwrap().transfer.defocus_distance().unwrap();
        assert!((d - 0.1 * 0.1 * 0.01 / (0.01 + 1e-4)).abs() < 1e-12);
        s.set("transfer.d_mm", 5).unwrap();
        assert!(s.build().is_err());
    }

    #[test]
    fn separable_defaults_to_matched_marginals() {
        let mut s = Settings::default();
        s.set("amplitude.kind", "separable").unwrap();
        let cfg = s.build().unwrap();
        assert!(matches!(cfg.amplitude, JointAmplitude::SeparableGaussian { .. }));
        s.set("amplitude.signal_width_per_mm", 20).unwrap();
        assert!(s.build().is_err());
        s.set("amplitude.idler_width_per_mm", 40).unwrap();
        assert!(s.build().is_ok());
    }

    #[test]
    fn render_round_trips() {
        let mut s = Settings::default();
        s.set("transfer.phi0_deg", 90).unwrap();
        s.set("noise.seed", 3).unwrap();
        let again = Settings::parse(&s.render()).unwrap();
        assert_eq!(again.render(), s.render());
        let a = again.build().unwrap();
        assert!((a.transfer.phi0() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
