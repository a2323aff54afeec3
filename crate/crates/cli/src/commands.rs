use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use fmo_core::analysis::{
    acf, efficiency_from_intensity_image, efficiency_series, parse_pixel_matrix, psd_periodogram,
    reorganization_energy, transfer_time, variance, PsdScaling,
};
use fmo_core::dynamics::{evolve_with, PiecewiseHamiltonian};
use fmo_core::experiments::figures::{reproduce, FigureRequest};
use fmo_core::experiments::output::{write_json, write_manifest, write_sweep, write_table};
use fmo_core::experiments::{realization_hamiltonian, sweep_dephasing};
use fmo_core::format::fmt_f64;
use fmo_core::model::{build_fmo_hamiltonian, export_chip_plan};
use fmo_core::noise::NoiseRealization;

use crate::config::{load, ChipPlanConfig, RunFile, SimulateConfig, SweepFile, SCHEMA_VERSION};
use crate::{CliError, Command, Format, RunArgs};

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Simulate { run, noise } => simulate(&run, noise.as_deref()),
        Command::Sweep { run } => sweep(&run),
        Command::Reproduce {
            figure,
            seed,
            out,
            realizations,
        } => {
            let req = FigureRequest {
                figure,
                seed,
                realizations,
            };
            prepare(&out)?;
            let files = reproduce(&req, &out)?;
            report(&files);
            Ok(())
        }
        Command::AnalyzeImage {
            image,
            ellipse,
            rect,
            background,
            format,
        } => {
            let text = fs::read_to_string(&image)
                .map_err(|e| CliError::Io(format!("{}: {e}", image.display())))?;
            let pixels = parse_pixel_matrix(&text)?;
            let res = efficiency_from_intensity_image(&pixels, &ellipse, &rect, background)?;
            match format {
                Format::Csv => {
                    println!("efficiency,fmo_intensity,sink_intensity");
                    println!(
                        "{},{},{}",
                        fmt_f64(res.efficiency),
                        fmt_f64(res.fmo_intensity),
                        fmt_f64(res.sink_intensity)
                    );
                }
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&res).expect("plain struct")
                ),
            }
            Ok(())
        }
        Command::AnalyzeNoise {
            noise,
            sampling_frequency,
            nfft,
            out,
        } => analyze_noise(&noise, sampling_frequency, nfft, &out),
        Command::ChipPlan { run } => chip_plan(&run),
    }
}

fn load_or_default<T: RunFile + Default>(path: Option<&Path>) -> Result<T, CliError> {
    match path {
        Some(p) => load(p),
        None => Ok(T::default()),
    }
}

fn prepare(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("{}", f.display());
    }
}

fn simulate(args: &RunArgs, noise_file: Option<&Path>) -> Result<(), CliError> {
    let mut cfg: SimulateConfig = load_or_default(args.config.as_deref())?;
    cfg.schema_version = SCHEMA_VERSION;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if cfg.trace_stride == 0 {
        return Err(CliError::Config("trace_stride must be at least 1".into()));
    }
    let sweep = cfg.as_sweep();
    sweep.validate()?;
    let base = sweep.system.build()?;
    let ph = match noise_file {
        Some(p) => {
            let file = File::open(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            let detunings = NoiseRealization::read_csv(file)?;
            // Same disorder draw as without the file; only the detunings are replaced.
            let h = realization_hamiltonian(&sweep, &base, &sweep.noise, 0, 0)?
                .base()
                .clone();
            PiecewiseHamiltonian::new(h, detunings, cfg.segment_length_mm)?
                .with_delta_c(cfg.delta_c)
        }
        None => realization_hamiltonian(&sweep, &base, &sweep.noise, 0, 0)?,
    };
    let tr = evolve_with(&ph, cfg.fine_step_mm, cfg.propagator)?;

    prepare(&args.out)?;
    let mut files = Vec::new();
    let trace = args.out.join("trace.csv");
    tr.write_csv(create(&trace)?, cfg.trace_stride)?;
    files.push(trace);
    let noise = args.out.join("noise.csv");
    ph.detunings().write_csv(create(&noise)?)?;
    files.push(noise);

    let total = ph.total_length();
    let eta = efficiency_series(&tr, cfg.efficiency_mode).ok();
    let final_eta = eta.as_ref().and_then(|e| e.last().copied());
    let tau = if tr.sink_indices().is_empty() {
        None
    } else {
        transfer_time(&tr, total).ok()
    };
    let summary = serde_json::json!({
        "total_length_mm": total,
        "final_efficiency": final_eta,
        "transfer_time_mm": tau,
    });
    match args.format {
        Format::Json => files.push(write_json(&args.out.join("summary.json"), &summary)?),
        Format::Csv => {
            if let Some(eta) = &eta {
                files.push(write_table(
                    &args.out.join("efficiency.csv"),
                    &["z_mm", "efficiency"],
                    tr.z().iter().zip(eta).map(|(z, e)| vec![*z, *e]),
                )?);
            }
            files.push(write_table(
                &args.out.join("summary.csv"),
                &["total_length_mm", "final_efficiency", "transfer_time_mm"],
                [vec![
                    total,
                    final_eta.unwrap_or(f64::NAN),
                    tau.unwrap_or(f64::NAN),
                ]],
            )?);
        }
    }
    files.push(write_json(&args.out.join("config.json"), &cfg)?);
    files.push(write_manifest(
        &args.out, "simulate", &cfg, cfg.seed, &files,
    )?);
    report(&files);
    Ok(())
}

fn sweep(args: &RunArgs) -> Result<(), CliError> {
    let mut file: SweepFile = match args.config.as_deref() {
        Some(p) => load(p)?,
        None => SweepFile {
            schema_version: SCHEMA_VERSION,
            sweep: Default::default(),
        },
    };
    if let Some(s) = args.seed {
        file.sweep.seed = s;
    }
    let res = sweep_dephasing(&file.sweep)?;
    prepare(&args.out)?;
    let mut files = match args.format {
        Format::Csv => write_sweep(&args.out, "sweep", &res)?,
        Format::Json => vec![write_json(&args.out.join("sweep.json"), &res)?],
    };
    files.push(write_json(&args.out.join("config.json"), &file)?);
    files.push(write_manifest(
        &args.out,
        "sweep",
        &file,
        file.sweep.seed,
        &files,
    )?);
    report(&files);
    println!("argmax_per_mm {}", fmt_f64(res.argmax()));
    Ok(())
}

fn analyze_noise(path: &Path, fs_per_mm: f64, nfft: usize, out: &Path) -> Result<(), CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let nr = NoiseRealization::read_csv(file)?;
    let n = nr.segments();
    let nfft = nfft.max(n.next_power_of_two());
    let mut summary = Vec::new();
    let mut spectra = Vec::new();
    let mut acfs = Vec::new();
    for (site, seq) in nr.sequences().iter().enumerate() {
        let label = (site + 1) as f64;
        let spec = psd_periodogram(seq, fs_per_mm, nfft, PsdScaling::Density)?;
        let er = reorganization_energy(&spec)?;
        let mean = seq.iter().sum::<f64>() / n as f64;
        summary.push(vec![label, mean, variance(seq)?, er]);
        spectra.extend(
            spec.frequencies
                .iter()
                .zip(&spec.density)
                .map(|(w, j)| vec![label, *w, *j]),
        );
        match acf(seq, n - 1) {
            Ok(r) => acfs.extend(
                r.into_iter()
                    .enumerate()
                    .map(|(k, v)| vec![label, k as f64 / fs_per_mm, v]),
            ),
            Err(fmo_core::Error::ConstantSeries) => {}
            Err(e) => return Err(e.into()),
        }
    }
    prepare(out)?;
    let files = vec![
        write_table(
            &out.join("noise_summary.csv"),
            &["site", "mean", "variance", "reorganization_energy"],
            summary,
        )?,
        write_table(
            &out.join("noise_spectrum.csv"),
            &["site", "omega_per_mm", "density"],
            spectra,
        )?,
        write_table(&out.join("noise_acf.csv"), &["site", "lag_mm", "acf"], acfs)?,
    ];
    report(&files);
    Ok(())
}

fn chip_plan(args: &RunArgs) -> Result<(), CliError> {
    let mut cfg: ChipPlanConfig = load_or_default(args.config.as_deref())?;
    cfg.schema_version = SCHEMA_VERSION;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let h = build_fmo_hamiltonian(&cfg.fmo)?;
    let noise = match &cfg.noise {
        Some(n) => Some(
            fmo_core::noise::NoiseConfig {
                seed: cfg.seed,
                ..n.clone()
            }
            .generate(h.dim())?,
        ),
        None => None,
    };
    let plan = export_chip_plan(&h, noise.as_ref(), &cfg.calibration, cfg.min_coupling_cm)?;
    prepare(&args.out)?;
    let mut files = Vec::new();
    match args.format {
        Format::Csv => {
            let p = args.out.join("chip_plan.csv");
            plan.write_csv(create(&p)?)?;
            files.push(p);
        }
        Format::Json => files.push(write_json(&args.out.join("chip_plan.json"), &plan)?),
    }
    if let Some(n) = &noise {
        let p = args.out.join("noise.csv");
        n.write_csv(create(&p)?)?;
        files.push(p);
    }
    files.push(write_json(&args.out.join("config.json"), &cfg)?);
    files.push(write_manifest(
        &args.out,
        "chip-plan",
        &cfg,
        cfg.seed,
        &files,
    )?);
    report(&files);
    Ok(())
}
