use nlfringe::analysis::{analyze_frame, fit_equivalent_wavelength, AnalysisConfig, ExtremumKind};
use nlfringe::biphoton::{make_correlated_amplitude, mode_intensity, predicted_extrema_radii, IdlerTransfer};
use nlfringe::config::RunConfig;
use nlfringe::imaging::{add_shot_noise, render_image, CameraModel, FringeImage};
use nlfringe::optics::OpticalConfig;
use nlfringe::pipeline::{render_series, run_sweep};
use nlfringe::Error;

const MM: f64 = 1e-3;

fn camera() -> CameraModel {
    CameraModel::centered(384, 24e-6, 2.5e-3).unwrap()
}

fn frame(cfg: &OpticalConfig, cam: &CameraModel, d: f64) -> FringeImage {
    let amp = make_correlated_amplitude(cfg.pump_waist).unwrap();
    render_image(cfg, &amp, &IdlerTransfer::defocus(d, 0.0).unwrap(), cam).unwrap()
}

#[test]
fn extrema_match_closed_form_radii() {
    let cfg = OpticalConfig::reference();
    let cam = camera();
    let ac = AnalysisConfig::default();
    let fa = analyze_frame(&frame(&cfg, &cam, 17.0 * MM), &ac).unwrap();
    let amp = make_correlated_amplitude(cfg.pump_waist).unwrap();
    let t = IdlerTransfer::defocus(17.0 * MM, 0.0).unwrap();
    let phi = mode_intensity([0.0, 0.0], &amp, &t, &cfg).unwrap().fringe_phase;
    let orders: Vec<f64> = fa.extrema.entries.iter().map(|e| e.order).collect();
    let pred = predicted_extrema_radii(17.0 * MM, phi, &cfg, &orders).unwrap();
    for (e, p) in fa.extrema.entries.iter().zip(&pred) {
        if e.radius <= cam.envelope_radius {
            assert!((e.radius - p.radius).abs() < 0.5 * cam.pixel_pitch, "n = {}: {} vs {}", e.order, e.radius, p.radius);
        }
        assert_eq!(e.kind == ExtremumKind::Max, p.is_maximum());
    }
    assert!(fa.fit.residual_rms < 0.02);
}

#[test]
fn shot_noise_keeps_orders_and_moves_radii_little() {
    let cfg = OpticalConfig::reference();
    let cam = camera();
    let ac = AnalysisConfig::default();
    let clean = frame(&cfg, &cam, 17.0 * MM);
    let a = analyze_frame(&clean, &ac).unwrap();
    let b = analyze_frame(&add_shot_noise(&clean, 7), &ac).unwrap();
    let inner = |s: &nlfringe::analysis::ExtremaSet| -> Vec<(f64, f64)> {
        s.entries
            .iter()
            .filter(|e| e.radius <= cam.envelope_radius)
            .map(|e| (e.order, e.radius))
            .collect()
    };
    let (ia, ib) = (inner(&a.extrema), inner(&b.extrema));
    assert_eq!(ia.len(), ib.len());
    for ((na, ra), (nb, rb)) in ia.iter().zip(&ib) {
        assert_eq!(na, nb);
        assert!((ra - rb).abs() < 2.0 * cam.pixel_pitch, "n = {na}: {ra} vs {rb}");
    }
}

#[test]
fn analysis_is_scale_equivariant() {
    let cfg = OpticalConfig::reference();
    let img = frame(&cfg, &camera(), 13.0 * MM);
    let ac = AnalysisConfig::default();
    let a = analyze_frame(&img, &ac).unwrap();
    let b = analyze_frame(&img.scaled(37.5).unwrap(), &ac).unwrap();
    for k in 0..2 {
        assert!((a.center_px[k] - b.center_px[k]).abs() < 1e-9);
    }
    assert_eq!(a.extrema.len(), b.extrema.len());
    for (x, y) in a.extrema.entries.iter().zip(&b.extrema.entries) {
        assert_eq!(x.order, y.order);
        assert!((x.radius - y.radius).abs() < 1e-12);
    }
    assert!((a.fit.a / b.fit.a - 1.0).abs() < 1e-9);
}

#[test]
fn off_axis_center_is_found() {
    let cfg = OpticalConfig::reference();
    let cam = camera().with_center([195.3, 188.6]);
    let fa = analyze_frame(&frame(&cfg, &cam, 13.0 * MM), &AnalysisConfig::default()).unwrap();
    assert!((fa.center_px[0] - 195.3).abs() < 0.05, "{:?}", fa.center_px);
    assert!((fa.center_px[1] - 188.6).abs() < 0.05, "{:?}", fa.center_px);
}

#[test]
fn estimate_does_not_depend_on_camera_lens() {
    // a shorter camera lens shrinks the rings; the camera shrinks with it
    let ac = AnalysisConfig::default();
    let estimate = |f_c: f64| {
        let cfg = OpticalConfig::reference().with_f_c(f_c).unwrap();
        let s = f_c / 0.15;
        let cam = CameraModel::centered(384, 24e-6 * s, 2.5e-3 * s).unwrap();
        let pairs: Vec<_> = [9.0, 13.0, 17.0]
            .iter()
            .map(|&d| (d * MM, analyze_frame(&frame(&cfg, &cam, d * MM), &ac).unwrap().fit))
            .collect();
        fit_equivalent_wavelength(&pairs, f_c).unwrap()
    };
    let a = estimate(0.10);
    let b = estimate(0.15);
    let combined = a.sigma.hypot(b.sigma);
    assert!((a.lambda_eq - b.lambda_eq).abs() <= combined, "{} vs {}", a.lambda_eq, b.lambda_eq);
    let truth = OpticalConfig::reference().equivalent_wavelength();
    assert!((a.lambda_eq / truth - 1.0).abs() < 0.01);
}

#[test]
fn sweep_matches_frame_by_frame_analysis() {
    let mut run = RunConfig::default();
    run.camera = camera();
    let ds = [9.0 * MM, 17.0 * MM];
    let sweep = run_sweep(&run, &ds, Some(11)).unwrap();
    let frames = render_series(&run, &ds, Some(11)).unwrap();
    for ((d, img), (sd, sa)) in frames.iter().zip(&sweep.frames) {
        assert_eq!(d, sd);
        let fa = analyze_frame(img, &run.analysis).unwrap();
        assert_eq!(fa.fit, sa.fit);
    }
    let truth = run.optical.equivalent_wavelength();
    assert!((sweep.estimate.lambda_eq / truth - 1.0).abs() < 0.03);
}

#[test]
fn blocked_idler_frame_has_no_rings() {
    let cfg = OpticalConfig::reference();
    let amp = make_correlated_amplitude(cfg.pump_waist).unwrap();
    let t = IdlerTransfer::defocus(17.0 * MM, 0.0).unwrap().with_transmission(0.0).unwrap();
    let img = render_image(&cfg, &amp, &t, &camera()).unwrap();
    let err = analyze_frame(&img, &AnalysisConfig::default()).unwrap_err();
    assert!(matches!(err, Error::InsufficientFringes { .. } | Error::NoCenter(_)), "{err}");
}
