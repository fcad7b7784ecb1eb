// SPDX-License-Identifier: MIT OR Apache-2.0

//! `thermoband`: perturbation functions, effective tensors and complex
//! dispersion spectra of bi-phase layered thermoelastic cells.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 on solver or output
//! failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thermoband::cell_problems::solve_all;
use thermoband::config::{parse_method, Format, MaterialConfig, OmegaRange, RunConfig};
use thermoband::effective::compute_effective;
use thermoband::homogenized::SPURIOUS_IM_BOUND;
use thermoband::svg::{Panel, Plot, Series};
use thermoband::toolkit::{compare, CompareReport, DispersionCurveSet, Method, SpectrumModel};
use thermoband::{Block, Error, LayeredCell};

#[derive(Parser)]
#[command(
    name = "thermoband",
    version,
    about = "Complex dispersion spectra of periodic layered thermoelastic media"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one named perturbation function over the unit cell.
    CellFunctions {
        #[command(flatten)]
        io: IoArgs,
        /// Function name, e.g. M2_22.
        #[arg(long)]
        name: String,
        /// Number of samples over the closed cell.
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Print every effective coefficient.
    Tensors {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Sweep the dispersion spectrum of each method.
    Spectrum {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare methods against a reference spectrum.
    Compare {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Reference method.
        #[arg(long, default_value = "fb")]
        reference: String,
        /// Frequency window `a:b`; defaults to the whole sweep.
        #[arg(long)]
        window: Option<String>,
    },
}

#[derive(Args)]
struct IoArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated output formats: csv, svg.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated methods: fb, hom0, hom2.
    #[arg(long)]
    method: Option<String>,
    /// Block: shear or coupled.
    #[arg(long)]
    block: Option<String>,
    /// Frequency range `a:b:n`.
    #[arg(long)]
    omega: Option<String>,
    /// Translated Brillouin zones on each side of the first one.
    #[arg(long)]
    zones: Option<u32>,
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Csv(csv::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_validation() => 2,
            _ => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Csv(e) => write!(f, "csv: {e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Core(Error::Config(format!("cannot read {}: {e}", path.display()))))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))
}

fn parse_formats(s: &str) -> CliResult<Vec<Format>> {
    Ok(s.split(',').map(str::parse).collect::<thermoband::Result<Vec<_>>>()?)
}

/// Material-only invocation: cell, output directory and formats.
fn material_io(io: &IoArgs) -> CliResult<(LayeredCell, PathBuf, Vec<Format>)> {
    let cfg = MaterialConfig::from_toml(&read(&io.config)?)?;
    let formats = match &io.format {
        Some(f) => parse_formats(f)?,
        None => cfg.formats,
    };
    Ok((cfg.cell, io.out.clone().unwrap_or(cfg.dir), formats))
}

fn run_config(io: &IoArgs, run: &RunArgs) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::load(&io.config)?;
    if let Some(m) = &run.method {
        cfg.methods = m.split(',').map(parse_method).collect::<thermoband::Result<Vec<_>>>()?;
    }
    if let Some(b) = &run.block {
        cfg.block = Block::parse(b)?;
    }
    if let Some(w) = &run.omega {
        cfg.omega = w.parse::<OmegaRange>()?;
    }
    if let Some(z) = run.zones {
        cfg.zones = z;
    }
    if let Some(o) = &io.out {
        cfg.dir = o.clone();
    }
    if let Some(f) = &io.format {
        cfg.formats = parse_formats(f)?;
    }
    Ok(cfg)
}

fn cmd_cell_functions(io: &IoArgs, name: &str, samples: usize) -> CliResult<()> {
    let (cell, dir, formats) = material_io(io)?;
    if samples < 2 {
        return Err(Error::Config("--samples must be at least 2".into()).into());
    }
    let set = solve_all(&cell)?;
    let f = set.get(name)?;
    let pts = f.samples(samples);
    ensure_dir(&dir)?;
    if formats.contains(&Format::Csv) {
        let path = dir.join(format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["xi2", "value"])?;
        for (x, v) in &pts {
            w.write_record([num(*x), num(*v)])?;
        }
        w.flush().map_err(|e| CliError::Io(path, e))?;
    }
    if formats.contains(&Format::Svg) {
        let plot = Plot {
            title: name.to_string(),
            legend: vec![name.to_string()],
            panels: vec![Panel {
                x_label: "xi2".into(),
                y_label: name.into(),
                series: vec![Series { group: 0, points: pts }],
            }],
        };
        write(&dir.join(format!("{name}.svg")), &plot.render())?;
    }
    Ok(())
}

fn cmd_tensors(io: &IoArgs) -> CliResult<()> {
    let (cell, dir, formats) = material_io(io)?;
    let t = compute_effective(&cell, &solve_all(&cell)?);
    let entries = t.entries();
    for (name, v) in &entries {
        println!("{name:<24} {}", num(*v));
    }
    if formats.contains(&Format::Csv) {
        ensure_dir(&dir)?;
        let path = dir.join("tensors.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["name", "value"])?;
        for (name, v) in &entries {
            w.write_record([name.to_string(), num(*v)])?;
        }
        w.flush().map_err(|e| CliError::Io(path, e))?;
    }
    Ok(())
}

fn sweep_all(cfg: &RunConfig, methods: &[Method]) -> CliResult<Vec<DispersionCurveSet>> {
    let model = SpectrumModel::new(cfg.cell.clone())?;
    Ok(methods
        .iter()
        .map(|&m| model.sweep(m, cfg.block, cfg.omega.triple(), cfg.zones))
        .collect::<thermoband::Result<Vec<_>>>()?)
}

fn write_spectrum_csv(path: &Path, set: &DispersionCurveSet) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "method",
        "block",
        "branch",
        "omega_bar",
        "re_k",
        "im_k",
        "residual",
        "physical",
    ])?;
    for (bi, b) in set.branches.iter().enumerate() {
        for p in &b.points {
            w.write_record([
                set.method.tag().to_string(),
                set.block.tag().to_string(),
                bi.to_string(),
                num(p.omega_bar),
                num(p.root.k.re),
                num(p.root.k.im),
                num(p.root.residual),
                p.root.physical.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn spectrum_plot(sets: &[DispersionCurveSet], block: Block) -> Plot {
    let part = |f: fn(&thermoband::C64) -> f64| -> Vec<Series> {
        sets.iter()
            .enumerate()
            .flat_map(|(gi, set)| {
                set.branches.iter().map(move |b| Series {
                    group: gi,
                    points: b
                        .points
                        .iter()
                        .map(|p| {
                            if p.root.physical && p.continuous && p.root.k.norm() < SPURIOUS_IM_BOUND {
                                (p.omega_bar, f(&p.root.k))
                            } else {
                                (f64::NAN, f64::NAN)
                            }
                        })
                        .collect(),
                })
            })
            .collect()
    };
    Plot {
        title: format!("{} block", block.tag()),
        legend: sets.iter().map(|s| s.method.tag().to_string()).collect(),
        panels: vec![
            Panel {
                x_label: "omega_bar".into(),
                y_label: "Re k2_bar".into(),
                series: part(|k| k.re),
            },
            Panel {
                x_label: "omega_bar".into(),
                y_label: "Im k2_bar".into(),
                series: part(|k| k.im),
            },
        ],
    }
}

fn cmd_spectrum(io: &IoArgs, run: &RunArgs) -> CliResult<()> {
    let cfg = run_config(io, run)?;
    if cfg.methods.is_empty() {
        return Err(Error::Config("no method selected".into()).into());
    }
    let sets = sweep_all(&cfg, &cfg.methods)?;
    ensure_dir(&cfg.dir)?;
    if cfg.formats.contains(&Format::Csv) {
        for set in &sets {
            let path = cfg
                .dir
                .join(format!("spectrum_{}_{}.csv", set.method.tag(), set.block.tag()));
            write_spectrum_csv(&path, set)?;
        }
    }
    if cfg.formats.contains(&Format::Svg) {
        let path = cfg.dir.join(format!("spectrum_{}.svg", cfg.block.tag()));
        write(&path, &spectrum_plot(&sets, cfg.block).render())?;
    }
    Ok(())
}

fn parse_window(s: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Core(Error::Config(format!("window `{s}` is not of the form a:b")));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a <= b) {
        return Err(bad());
    }
    Ok((a, b))
}

fn print_report(r: &CompareReport, block: Block) {
    println!("{} vs {} ({} block)", r.test.tag(), r.reference.tag(), block.tag());
    println!(
        "  {:>6} {:>8} {:>24} {:>24}",
        "branch", "samples", "max_rel_err", "mean_rel_err"
    );
    for b in &r.branches {
        println!(
            "  {:>6} {:>8} {:>24} {:>24}",
            b.branch,
            b.samples,
            num(b.max),
            num(b.mean)
        );
    }
    println!("  {:>6} {:>8} {:>24} {:>24}", "all", "", num(r.max), num(r.mean));
    if let Some((nr, nt)) = r.branch_count_mismatch {
        println!("  branch count mismatch: reference {nr}, test {nt}");
    }
}

fn cmd_compare(io: &IoArgs, run: &RunArgs, reference: &str, window: Option<&str>) -> CliResult<()> {
    let cfg = run_config(io, run)?;
    let reference = parse_method(reference)?;
    let tests: Vec<Method> = cfg.methods.iter().copied().filter(|&m| m != reference).collect();
    if tests.is_empty() {
        return Err(Error::Config("no method to compare against the reference".into()).into());
    }
    let window = match window {
        Some(w) => parse_window(w)?,
        None => (cfg.omega.start, cfg.omega.end),
    };
    let mut methods = vec![reference];
    methods.extend(&tests);
    let sets = sweep_all(&cfg, &methods)?;
    let reports: Vec<CompareReport> = sets[1..].iter().map(|t| compare(&sets[0], t, window)).collect();
    for r in &reports {
        print_report(r, cfg.block);
    }
    ensure_dir(&cfg.dir)?;
    if cfg.formats.contains(&Format::Csv) {
        let path = cfg.dir.join(format!("compare_{}.csv", cfg.block.tag()));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record([
            "reference",
            "test",
            "block",
            "branch",
            "samples",
            "max_rel_err",
            "mean_rel_err",
            "branch_count_mismatch",
        ])?;
        for r in &reports {
            let mismatch = r.branch_count_mismatch.is_some().to_string();
            let rows = r
                .branches
                .iter()
                .map(|b| (b.branch.to_string(), b.samples, b.max, b.mean))
                .chain(std::iter::once((
                    "all".to_string(),
                    r.branches.iter().map(|b| b.samples).sum(),
                    r.max,
                    r.mean,
                )));
            for (branch, samples, max, mean) in rows {
                w.write_record([
                    r.reference.tag().to_string(),
                    r.test.tag().to_string(),
                    cfg.block.tag().to_string(),
                    branch,
                    samples.to_string(),
                    num(max),
                    num(mean),
                    mismatch.clone(),
                ])?;
            }
        }
        w.flush().map_err(|e| CliError::Io(path, e))?;
    }
    if cfg.formats.contains(&Format::Svg) {
        let path = cfg.dir.join(format!("compare_{}.svg", cfg.block.tag()));
        write(&path, &spectrum_plot(&sets, cfg.block).render())?;
    }
    Ok(())
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("THERMOBAND_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Core(Error::Config(format!(
            "THERMOBAND_THREADS must be a positive integer (got `{v}`)"
        )))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Core(Error::Config(e.to_string())))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::CellFunctions { io, name, samples } => cmd_cell_functions(io, name, *samples),
        Command::Tensors { io } => cmd_tensors(io),
        Command::Spectrum { io, run } => cmd_spectrum(io, run),
        Command::Compare {
            io,
            run,
            reference,
            window,
        } => cmd_compare(io, run, reference, window.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
