use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{error::ErrorKind, Args, CommandFactory, Parser, Subcommand};

use nlfringe::analysis::{fit_equivalent_wavelength, FrameAnalysis};
use nlfringe::biphoton::IdlerTransfer;
use nlfringe::config::{RunConfig, Settings};
use nlfringe::imaging::{add_shot_noise, read_image, render_image, write_image, FringeImage};
use nlfringe::optics::{kernel_equivalence, DEFOCUS_VALIDITY_BOUND};
use nlfringe::pipeline::{analyze_series, render_series};
use nlfringe::report;

/// Mismatch allowed between the two idler kernels inside the validity bound.
const EQUIVALENCE_TOLERANCE: f64 = 0.05;

#[derive(Parser)]
#[command(name = "nlfringe", version, about = "Induced-coherence fringe simulator and analyzer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (`key = value` lines)
    #[arg(long, env = "NLFRINGE_CONFIG")]
    config: Option<PathBuf>,

    /// Override a config key, e.g. `--set optical.f_c_mm=100` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output directory (overrides output.dir)
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct Noise {
    /// Poisson noise seed (overrides noise.seed)
    #[arg(long)]
    seed: Option<u64>,

    /// Skip shot noise even when a seed is configured
    #[arg(long, conflicts_with = "seed")]
    noise_free: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Render frames to PGM files with metadata sidecars
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        noise: Noise,
        /// Defocus distances in mm; one frame each
        #[arg(long, value_delimiter = ',')]
        d_mm: Vec<f64>,
        /// phi0 values in degrees; one frame each
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        phase_scan: Vec<f64>,
        /// Idler amplitude transmission between the crystals
        #[arg(long)]
        transmission: Option<f64>,
    },
    /// Extract rings from frames and estimate the equivalent wavelength
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Image files or directories of .pgm files
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Distance per file in mm, overriding the sidecar
        #[arg(long, value_delimiter = ',')]
        d_mm: Vec<f64>,
    },
    /// Simulate and analyze a defocus sweep
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        noise: Noise,
        /// Defocus distances in mm (at least two distinct)
        #[arg(long, value_delimiter = ',', default_value = "9,13,17")]
        d_mm: Vec<f64>,
        /// Also write the rendered frames
        #[arg(long)]
        save_frames: bool,
    },
    /// Compare the displaced-lens and free-space idler kernels
    Equivalence {
        #[command(flatten)]
        common: Common,
        /// delta²/f² values
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.0001,0.001,0.01,0.02,0.04,0.06,0.1,0.2,0.3,0.5"
        )]
        ratios: Vec<f64>,
        /// Test beam waist in µm
        #[arg(long, default_value_t = 50.0)]
        waist_um: f64,
        /// Grid samples
        #[arg(long, default_value_t = 2048)]
        samples: usize,
    },
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ValueValidation, msg).exit()
}

fn settings(common: &Common) -> Result<Settings> {
    let mut s = match &common.config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    for kv in &common.set {
        let Some((k, v)) = kv.split_once('=') else {
            usage_error(format!("--set expects KEY=VALUE, got {kv:?}"));
        };
        s.set(k.trim(), v.trim())?;
    }
    if let Some(dir) = &common.output_dir {
        s.set("output.dir", dir.display())?;
    }
    Ok(s)
}

fn apply_noise(s: &mut Settings, noise: &Noise) -> Result<()> {
    if noise.noise_free {
        s.remove("noise.seed");
    } else if let Some(seed) = noise.seed {
        s.set("noise.seed", seed)?;
    }
    Ok(())
}

fn out_dir(run: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&run.output_dir)
        .with_context(|| format!("creating {}", run.output_dir.display()))?;
    Ok(&run.output_dir)
}

fn fmt_num(v: f64) -> String {
    let v = (v * 1e9).round() / 1e9;
    v.to_string()
}

fn frame_name(img: &FringeImage, phase_deg: Option<f64>) -> String {
    let mut name = String::from("frame");
    if let Some(d) = img.distance() {
        name += &format!("_d{}mm", fmt_num(d * 1e3));
    }
    if let Some(p) = phase_deg {
        name += &format!("_phi{}deg", fmt_num(p));
    }
    name + ".pgm"
}

fn simulate(common: Common, noise: Noise, d_mm: Vec<f64>, phase_scan: Vec<f64>, transmission: Option<f64>) -> Result<()> {
    let mut s = settings(&common)?;
    apply_noise(&mut s, &noise)?;
    if let Some(t) = transmission {
        s.set("transfer.transmission", t)?;
    }
    if let [d] = d_mm[..] {
        s.set("transfer.kind", "defocus")?;
        s.remove("transfer.delta_mm");
        s.set("transfer.d_mm", d)?;
    }
    let run = s.build()?;
    let dir = out_dir(&run)?.to_owned();

    let transfers: Vec<_> = if d_mm.len() > 1 {
        d_mm.iter()
            .map(|&d| {
                IdlerTransfer::defocus(d / 1e3, run.transfer.phi0())?.with_transmission(run.transfer.transmission())
            })
            .collect::<nlfringe::Result<_>>()?
    } else {
        vec![run.transfer.clone()]
    };
    let phases: Vec<Option<f64>> = if phase_scan.is_empty() {
        vec![None]
    } else {
        phase_scan.iter().map(|&p| Some(p)).collect()
    };

    let mut k = 0u64;
    for transfer in &transfers {
        for &phase in &phases {
            let transfer = match phase {
                Some(deg) => transfer.clone().with_phi0(deg.to_radians()),
                None => transfer.clone(),
            };
            let mut img = render_image(&run.optical, &run.amplitude, &transfer, &run.camera)?;
            if let Some(seed) = run.noise_seed {
                img = add_shot_noise(&img, seed.wrapping_add(k));
            }
            k += 1;
            let path = dir.join(frame_name(&img, phase));
            write_image(&img, &path)?;
            println!("{}", path.display());
        }
    }
    report::write(&dir.join("config.txt"), s.render().as_bytes())?;
    Ok(())
}

fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "pgm"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        bail!("no .pgm files found");
    }
    Ok(files)
}

/// Shared optics for the regression: frames must agree on `f_c` and the
/// wavelengths, falling back to the configuration when a sidecar is silent.
fn frame_constant(frames: &[(f64, FringeImage)], key: &str, fallback: f64) -> Result<f64> {
    let mut value = None;
    for (_, img) in frames {
        let v = img.metadata_f64(key).unwrap_or(fallback);
        match value {
            None => value = Some(v),
            Some(prev) if (prev - v).abs() > 1e-12 * prev.abs() => {
                bail!("frames disagree on {key}: {prev} vs {v}")
            }
            _ => {}
        }
    }
    Ok(value.unwrap_or(fallback))
}

fn write_tables(dir: &Path, analyses: &[(f64, FrameAnalysis)]) -> Result<()> {
    let ex: Vec<_> = analyses.iter().map(|(d, a)| (*d, &a.extrema)).collect();
    report::write(&dir.join("extrema.csv"), &report::extrema_csv(&ex)?)?;
    let fits: Vec<_> = analyses.iter().map(|(d, a)| (*d, a.fit)).collect();
    report::write(&dir.join("fits.csv"), &report::fits_csv(&fits)?)?;
    Ok(())
}

fn distinct(ds: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = ds.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

fn estimate_and_report(dir: &Path, analyses: &[(f64, FrameAnalysis)], f_c: f64, theory: f64) -> Result<()> {
    let pairs: Vec<_> = analyses.iter().map(|(d, a)| (*d, a.fit)).collect();
    let est = fit_equivalent_wavelength(&pairs, f_c)?;
    report::write(&dir.join("estimate.csv"), &report::estimate_csv(&est)?)?;
    report::write(&dir.join("a_vs_d.csv"), &report::a_vs_d_csv(&pairs, f_c, theory)?)?;
    let ds: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let text = report::summary(&est, theory, &ds);
    report::write(&dir.join("summary.txt"), text.as_bytes())?;
    print!("{text}");
    Ok(())
}

fn analyze(common: Common, inputs: Vec<PathBuf>, d_mm: Vec<f64>) -> Result<()> {
    let run = settings(&common)?.build()?;
    let files = collect_inputs(&inputs)?;
    if !d_mm.is_empty() && d_mm.len() != files.len() {
        usage_error(format!("--d-mm lists {} values for {} files", d_mm.len(), files.len()));
    }

    let mut frames = Vec::new();
    for (i, path) in files.iter().enumerate() {
        let img = match read_image(path) {
            Ok(img) => img,
            Err(e) => {
                eprintln!("warning: skipping {}: {e}", path.display());
                continue;
            }
        };
        let d = match (d_mm.get(i), img.distance()) {
            (Some(&d), _) => d / 1e3,
            (None, Some(d)) => d,
            (None, None) => {
                eprintln!("warning: skipping {}: no d_m in sidecar and no --d-mm", path.display());
                continue;
            }
        };
        frames.push((path, (d, img)));
    }
    let (paths, frames): (Vec<_>, Vec<_>) = frames.into_iter().unzip();

    let mut analyses = Vec::new();
    for (path, (d, res)) in paths.iter().zip(analyze_series(&frames, &run.analysis)) {
        match res {
            Ok(a) => analyses.push((d, a)),
            Err(e) => eprintln!("warning: skipping {}: {e}", path.display()),
        }
    }
    if analyses.is_empty() {
        bail!("no usable images");
    }
    analyses.sort_by(|a, b| a.0.total_cmp(&b.0));
    let dir = out_dir(&run)?.to_owned();
    write_tables(&dir, &analyses)?;
    for (d, a) in &analyses {
        println!(
            "d = {} mm: {} extrema, a = {:.6e} m^-2, phi' = {:.4}, rms = {:.4}",
            fmt_num(d * 1e3),
            a.extrema.len(),
            a.fit.a,
            a.fit.phi_prime,
            a.fit.residual_rms
        );
    }

    let n = distinct(analyses.iter().map(|a| a.0));
    if n < 2 {
        bail!("wavelength estimate needs frames at 2 or more distinct distances, have {n}");
    }
    let f_c = frame_constant(&frames, "f_c_m", run.optical.f_c)?;
    let ls = frame_constant(&frames, "lambda_s_m", run.optical.lambda_s)?;
    let li = frame_constant(&frames, "lambda_i_m", run.optical.lambda_i)?;
    estimate_and_report(&dir, &analyses, f_c, ls * ls / li)
}

fn sweep(common: Common, noise: Noise, d_mm: Vec<f64>, save_frames: bool) -> Result<()> {
    if distinct(d_mm.iter().copied()) < 2 {
        usage_error("sweep needs at least 2 distinct --d-mm values");
    }
    let mut s = settings(&common)?;
    apply_noise(&mut s, &noise)?;
    s.set("transfer.kind", "defocus")?;
    s.remove("transfer.delta_mm");
    let run = s.build()?;
    let dir = out_dir(&run)?.to_owned();

    let ds: Vec<f64> = d_mm.iter().map(|d| d / 1e3).collect();
    let frames = render_series(&run, &ds, run.noise_seed)?;
    if save_frames {
        for (_, img) in &frames {
            let path = dir.join(frame_name(img, None));
            write_image(img, &path)?;
        }
    }
    let analyses = analyze_series(&frames, &run.analysis)
        .into_iter()
        .map(|(d, r)| r.map(|a| (d, a)).with_context(|| format!("d = {} mm", fmt_num(d * 1e3))))
        .collect::<Result<Vec<_>>>()?;
    write_tables(&dir, &analyses)?;
    report::write(&dir.join("config.txt"), s.render().as_bytes())?;
    match run.noise_seed {
        Some(seed) => println!("shot noise: seed {seed} (+k for frame k)"),
        None => println!("shot noise: off"),
    }
    estimate_and_report(&dir, &analyses, run.optical.f_c, run.optical.equivalent_wavelength())
}

fn equivalence(common: Common, ratios: Vec<f64>, waist_um: f64, samples: usize) -> Result<()> {
    if ratios.is_empty() || ratios.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        usage_error("--ratios must be positive");
    }
    let run = settings(&common)?.build()?;
    let dir = out_dir(&run)?.to_owned();
    let rows = kernel_equivalence(
        &ratios,
        run.optical.f_idler,
        waist_um / 1e6,
        run.optical.k_idler(),
        samples,
    )?;

    let mut w = Vec::new();
    {
        use std::io::Write;
        writeln!(w, "delta_m,ratio,distance_m,mismatch")?;
        for r in &rows {
            writeln!(w, "{},{},{},{}", r.delta, r.ratio, r.distance, r.mismatch)?;
        }
    }
    report::write(&dir.join("equivalence.csv"), &w)?;

    let mut failed = false;
    println!("{:>10} {:>12} {:>12} {:>12}", "d²/f²", "delta (mm)", "d (mm)", "mismatch");
    for r in &rows {
        let bad = r.ratio <= DEFOCUS_VALIDITY_BOUND && r.mismatch >= EQUIVALENCE_TOLERANCE;
        failed |= bad;
        println!(
            "{:>10} {:>12.4} {:>12.4} {:>12.3e}{}",
            r.ratio,
            r.delta * 1e3,
            r.distance * 1e3,
            r.mismatch,
            if bad { "  exceeds tolerance" } else { "" }
        );
    }
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.ratio.total_cmp(&b.ratio));
    if sorted.windows(2).any(|w| w[1].mismatch < w[0].mismatch) {
        println!("note: mismatch is not monotone in delta²/f² over this sweep");
    }
    if failed {
        bail!("kernel mismatch >= {EQUIVALENCE_TOLERANCE} inside delta²/f² <= {DEFOCUS_VALIDITY_BOUND}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            common,
            noise,
            d_mm,
            phase_scan,
            transmission,
        } => simulate(common, noise, d_mm, phase_scan, transmission),
        Command::Analyze { common, inputs, d_mm } => analyze(common, inputs, d_mm),
        Command::Sweep {
            common,
            noise,
            d_mm,
            save_frames,
        } => sweep(common, noise, d_mm, save_frames),
        Command::Equivalence {
            common,
            ratios,
            waist_um,
            samples,
        } => equivalence(common, ratios, waist_um, samples),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
