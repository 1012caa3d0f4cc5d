use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand, ValueEnum};

use jch_phase::sweep::{
    emit_heatmap, lobe_tables_csv, phase_csv, spectrum_csv, sweep_lobes, sweep_phase_with_progress,
    sweep_spectrum, AxisSpec, Observable, OutputFormat, RunConfig, SweepRecord,
};

/// Mean-field phase diagram of a cavity lattice with three-level qubits.
#[derive(Parser, Debug)]
#[command(name = "jch-phase", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Also write SVG heatmaps (phase only).
    #[arg(long, global = true)]
    svg: bool,
    /// Worker threads.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zero-hopping sector spectra against the anharmonicity.
    Spectrum(SpectrumArgs),
    /// Zero-hopping Mott-lobe boundaries and their crossings.
    Lobes(LobesArgs),
    /// Order parameter and density over the (J, mu) plane.
    Phase(PhaseArgs),
}

/// Axes are written `start:stop:count` or as a single value.
#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long, value_parser = parse_axis)]
    anh: Option<AxisSpec>,
    #[arg(long, value_parser = parse_axis)]
    delta: Option<AxisSpec>,
    #[arg(long)]
    n_max_sector: Option<usize>,
}

#[derive(Args, Debug)]
struct LobesArgs {
    #[arg(long, value_parser = parse_axis)]
    anh: Option<AxisSpec>,
    #[arg(long, value_parser = parse_axis)]
    delta: Option<AxisSpec>,
    #[arg(long)]
    n_max_lobe: Option<usize>,
}

#[derive(Args, Debug)]
struct PhaseArgs {
    #[arg(long, value_parser = parse_axis)]
    j: Option<AxisSpec>,
    #[arg(long, value_parser = parse_axis, allow_hyphen_values = true)]
    mu: Option<AxisSpec>,
    #[arg(long, value_parser = parse_axis, allow_hyphen_values = true)]
    anh: Option<AxisSpec>,
    #[arg(long, value_parser = parse_axis, allow_hyphen_values = true)]
    delta: Option<AxisSpec>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    n_max_cap: Option<usize>,
}

fn parse_axis(s: &str) -> Result<AxisSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    match parts.as_slice() {
        [x] => Ok(AxisSpec::point(num(x)?)),
        [a, b, n] => Ok(AxisSpec::new(
            num(a)?,
            num(b)?,
            n.trim().parse().map_err(|e| format!("`{n}`: {e}"))?,
        )),
        _ => Err("expected VALUE or START:STOP:COUNT".into()),
    }
}

enum Failure {
    Config(String),
    Numerical(String),
}

fn build_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| Failure::Config(e.to_string()))?,
        None => RunConfig::default(),
    };
    config
        .apply_env()
        .map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(w) = cli.workers {
        config.workers = Some(w);
    }
    if let Some(out) = &cli.out {
        config.output.dir = out.clone();
    }
    if let Some(f) = cli.format {
        config.output.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    config.output.svg |= cli.svg;
    match &cli.command {
        Command::Spectrum(a) => {
            set(&mut config.spectrum.anh, a.anh);
            set(&mut config.spectrum.delta, a.delta);
            set(&mut config.spectrum.n_max_sector, a.n_max_sector);
        }
        Command::Lobes(a) => {
            set(&mut config.lobes.anh, a.anh);
            set(&mut config.lobes.delta, a.delta);
            set(&mut config.lobes.n_max_lobe, a.n_max_lobe);
        }
        Command::Phase(a) => {
            set(&mut config.axes.j, a.j);
            set(&mut config.axes.mu, a.mu);
            set(&mut config.axes.anh, a.anh);
            set(&mut config.axes.delta, a.delta);
            set(&mut config.solver.grid_points, a.grid_points);
            set(&mut config.solver.n_max_cap, a.n_max_cap);
        }
    }
    config
        .validate()
        .map_err(|e| Failure::Config(e.to_string()))?;
    Ok(config)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

fn run_spectrum(config: &RunConfig) -> Result<(), Failure> {
    let rows = sweep_spectrum(config).map_err(|e| Failure::Numerical(e.to_string()))?;
    eprintln!("spectrum: {} rows", rows.len());
    let dir = &config.output.dir;
    match config.output.format {
        OutputFormat::Csv => write(dir, "spectrum.csv", &spectrum_csv(&rows)),
        OutputFormat::Json => write(dir, "spectrum.json", &json(&rows)),
    }
}

fn run_lobes(config: &RunConfig) -> Result<(), Failure> {
    let diagrams = sweep_lobes(config).map_err(|e| Failure::Numerical(e.to_string()))?;
    for (delta, d) in &diagrams {
        for c in &d.crossings {
            eprintln!(
                "delta = {delta}: lobe {} closes at anh = {:.10}, (mu - omega_c)/lambda = {:.10}",
                c.n, c.anh, c.mu
            );
        }
    }
    let dir = &config.output.dir;
    match config.output.format {
        OutputFormat::Csv => {
            let (b, w, c) = lobe_tables_csv(&diagrams);
            write(dir, "lobes.csv", &b)?;
            write(dir, "lobe_widths.csv", &w)?;
            write(dir, "lobe_crossings.csv", &c)
        }
        OutputFormat::Json => {
            let doc: Vec<serde_json::Value> = diagrams
                .iter()
                .map(|(delta, d)| serde_json::json!({ "delta": delta, "diagram": d }))
                .collect();
            write(dir, "lobes.json", &json(&doc))
        }
    }
}

fn run_phase(config: &RunConfig) -> Result<(), Failure> {
    let reported = AtomicUsize::new(0);
    let progress = |done: usize, total: usize| {
        let step = (total / 20).max(1);
        let bucket = done / step;
        if (done == total || done.is_multiple_of(step))
            && reported.fetch_max(bucket, Ordering::Relaxed) < bucket
        {
            eprintln!("phase: {done}/{total} points");
        }
    };
    let records = sweep_phase_with_progress(config, &progress);
    let failed = records.iter().filter(|r| r.flags.is_failure()).count();
    let degenerate = records.iter().filter(|r| r.flags.degeneracy).count();
    eprintln!(
        "phase: {} points, {failed} without a converged solution, {degenerate} flagged degenerate",
        records.len()
    );

    let dir = &config.output.dir;
    match config.output.format {
        OutputFormat::Csv => write(dir, "phase.csv", &phase_csv(&records))?,
        OutputFormat::Json => write(dir, "phase.json", &json(&records))?,
    }
    if config.output.svg {
        for panel in records.chunk_by(|a, b| a.anh == b.anh && a.delta == b.delta) {
            write_panel_svgs(dir, panel)?;
        }
    }
    if !records.is_empty() && failed == records.len() {
        return Err(Failure::Numerical(
            "no grid point produced a converged solution".into(),
        ));
    }
    Ok(())
}

fn write_panel_svgs(dir: &Path, panel: &[SweepRecord]) -> Result<(), Failure> {
    let (anh, delta) = (panel[0].anh, panel[0].delta);
    for obs in [Observable::Psi, Observable::Rho] {
        let path = dir.join(format!("{}_delta{delta}_anh{anh}.svg", obs.name()));
        emit_heatmap(panel, obs, &path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = build_config(&cli).and_then(|config| {
        fs::create_dir_all(&config.output.dir).map_err(|e| {
            Failure::Config(format!(
                "cannot create {}: {e}",
                config.output.dir.display()
            ))
        })?;
        match cli.command {
            Command::Spectrum(_) => run_spectrum(&config),
            Command::Lobes(_) => run_lobes(&config),
            Command::Phase(_) => run_phase(&config),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
