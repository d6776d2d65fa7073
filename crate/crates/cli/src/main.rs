use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use mqc_cli::config::{parse_config, BackendChoice, Format, RunConfig};
use mqc_cli::output::{emit, spectrum_table, write_csv, Stamp, Table};
use mqc_cli::presets::{preset_text, Preset};
use mqc_cli::{engine, output, run, worker_count};
use mqc_core::witness::witness_report;
use mqc_core::{MqcSpectrum, Source};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "mqc", version, about = "Echo-protocol MQC spectra and entanglement witnesses for collective spins")]
struct Cli {
    /// JSON run configuration
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// shipped run configuration
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
    /// use the scaled-down variant of the preset
    #[arg(long, global = true, requires = "preset")]
    quick: bool,
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendChoice>,
    /// output directory (overrides outputs.dir)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// output formats (overrides outputs.formats); repeat or comma-separate
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    format: Vec<Format>,
    /// worker threads (default: MQC_WORKERS, then all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single run: echo signal, spectrum, witness report
    Simulate,
    /// Spectrum only, from the echo protocol or directly from the evolved state
    Mqc {
        #[arg(long)]
        direct: bool,
    },
    /// Witness report for a spectrum file (CSV with columns m, intensity)
    Witness {
        #[arg(long)]
        input: PathBuf,
        /// quantum Fisher information to include in the report
        #[arg(long)]
        qfi: Option<f64>,
    },
    /// Run every point of the configured sweep
    Sweep,
    /// Parse and validate a configuration, printing the normalized form
    ValidateConfig,
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let text = match (&cli.config, cli.preset) {
        (Some(path), _) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        (None, Some(p)) => preset_text(p, cli.quick).to_string(),
        (None, None) => bail!("one of --config or --preset is required"),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(b) = cli.backend {
        cfg.protocol.backend = b;
    }
    if let Some(out) = &cli.out {
        cfg.outputs.dir = out.clone();
    }
    if !cli.format.is_empty() {
        cfg.outputs.formats = cli.format.clone();
    }
    // overrides may break invariants, so validate again
    cfg.points()?;
    Ok(cfg)
}

fn run_points(cfg: &RunConfig, workers: usize) -> anyhow::Result<ExitCode> {
    let outcome = run(cfg, workers)?;
    let written = outcome.write(cfg, &cfg.outputs.dir)?;
    for path in &written {
        println!("{}", path.display());
    }
    let report = outcome.report(cfg);
    for e in &report.errors {
        let at: Vec<String> = e.coords.iter().map(|c| format!("{} = {}", c.parameter, c.value)).collect();
        eprintln!("error: point {} ({}): {}", e.index, at.join(", "), e.message);
    }
    Ok(if report.errors.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn read_spectrum(path: &PathBuf) -> anyhow::Result<(MqcSpectrum, String)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let hash: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(bytes.as_slice());
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).with_context(|| format!("missing column `{name}`"));
    let (cm, ci) = (col("m")?, col("intensity")?);
    let mut entries = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let m: i64 = record[cm].trim().parse().with_context(|| format!("row {}: bad order", line + 1))?;
        let v: f64 = record[ci].trim().parse().with_context(|| format!("row {}: bad intensity", line + 1))?;
        entries.push((m, v));
    }
    let n = entries.iter().map(|(m, _)| m.unsigned_abs() as usize).max().unwrap_or(0);
    let mut values = vec![f64::NAN; 2 * n + 1];
    for (m, v) in entries {
        values[(m + n as i64) as usize] = v;
    }
    if values.iter().any(|v| v.is_nan()) || values.len() < 3 {
        bail!("spectrum must list every order m = -N ..= N exactly once (N >= 1)");
    }
    Ok((MqcSpectrum::new(n, values, Source::Direct)?, hash))
}

fn main_inner(cli: Cli) -> anyhow::Result<ExitCode> {
    let workers = worker_count(cli.workers);
    match &cli.command {
        Command::ValidateConfig => {
            let cfg = load_config(&cli)?;
            let points = cfg.points()?;
            println!("{}", cfg.to_json());
            println!("config_sha256 {}", cfg.hash());
            println!("points {}", points.len());
            let mut backends: Vec<&str> = points.iter().map(|p| p.backend.name()).collect();
            backends.dedup();
            println!("backend {}", backends.join(","));
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate => {
            let cfg = load_config(&cli)?;
            if cfg.is_sweep() {
                bail!("the configuration defines a sweep; run it with `mqc sweep`");
            }
            run_points(&cfg, workers)
        }
        Command::Sweep => run_points(&load_config(&cli)?, workers),
        Command::Mqc { direct } => {
            let cfg = load_config(&cli)?;
            if cfg.is_sweep() {
                bail!("`mqc mqc` evaluates a single point; use `mqc sweep` for sweeps");
            }
            let point = &cfg.points()?[0];
            let (axis, spec) =
                mqc_core::parallel::with_workers(workers, || engine::spectrum_only(point, *direct))?;
            output::prepare_dir(&cfg.outputs.dir)?;
            #[derive(serde::Serialize)]
            struct Report<'a> {
                #[serde(flatten)]
                stamp: Stamp,
                backend: &'static str,
                axis: [f64; 3],
                spectrum: &'a MqcSpectrum,
            }
            let stamp = Stamp::new(cfg.hash());
            let report = Report { stamp: stamp.clone(), backend: point.backend.name(), axis: axis.components(), spectrum: &spec };
            let table = spectrum_table(&spec);
            for p in emit(&cfg.outputs.dir, &cfg.outputs.formats, &stamp, &[("spectrum", &table)], Some(("spectrum", &report)))? {
                println!("{}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Witness { input, qfi } => {
            let (spec, hash) = read_spectrum(input)?;
            let report = witness_report(&spec, spec.n(), *qfi)?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("mqc-out"));
            let formats = if cli.format.is_empty() { vec![Format::Csv, Format::Json] } else { cli.format.clone() };
            output::prepare_dir(&dir)?;
            // the input file takes the place of a config for provenance
            let stamp = Stamp::new(hash);
            let ratios = report.violation_ratios();
            let mut table = Table::new(["m", "intensity", "bound", "violated", "ratio"]);
            for (i, (m, v)) in spec.orders().enumerate() {
                table.push(vec![
                    m.to_string(),
                    output::fmt_f64(v),
                    output::fmt_f64(report.separable_bounds[i]),
                    report.violations[i].to_string(),
                    output::fmt_f64(ratios[i]),
                ]);
            }
            #[derive(serde::Serialize)]
            struct Report<'a> {
                #[serde(flatten)]
                stamp: Stamp,
                witness: &'a mqc_core::witness::WitnessReport,
            }
            let doc = Report { stamp: stamp.clone(), witness: &report };
            if formats.contains(&Format::Csv) {
                let path = dir.join("witness.csv");
                write_csv(&path, &stamp, &table)?;
                println!("{}", path.display());
            }
            if formats.contains(&Format::Json) {
                let path = dir.join("witness.json");
                output::write_json(&path, &doc)?;
                println!("{}", path.display());
            }
            println!(
                "f_i {} entanglement_depth {} violated_orders {}",
                output::fmt_f64(report.f_i),
                report.entanglement_depth,
                report.violated_orders().len()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
