//! Command-line front end. The binary only calls [`main`].

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::bands::sample_bands;
use crate::config::{resolve_config, Command, EvolveEngine, RunConfig, ScanKind, ScenarioName, PRESETS};
use crate::error::{Error, Result};
use crate::io::{self, emit_scenario, numeric_csv, Format, Report};
use crate::lattice::ModelParams;
use crate::propagator::{
    band_occupations, evolve_kappa_with, evolve_real_space_with, evolve_whittaker_hill_with, write_checkpoint,
    ForceSchedule, KappaOptions, RealSpaceOptions,
};
use crate::scenario::{
    make_gaussian_packet, run_beam_splitter, run_breathing_mode, run_oscillating_mode, time_grid, tune_delta,
    zener_transfer, ScenarioReport,
};

const EXIT_CODES: &str = "Exit codes: 0 success, 2 configuration error, 3 numerical failure \
(leakage, degeneracy, missing root), 4 I/O error.";

#[derive(Debug, Parser)]
#[command(
    name = "bloch-zener",
    version,
    about = "Minibands, Wannier-Stark ladders and wave-packet dynamics in a period-doubled tilted lattice",
    after_help = EXIT_CODES
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Miniband dispersion, Bloch coefficients and coupling modulus over the
    /// reduced zone (`kappa,E0,E1,u,v,absM`).
    Bands(Common),
    /// Offset of the two Wannier-Stark ladders for one parameter set
    /// (`delta,Delta,Fd,offset,method,degenerate`).
    Spectrum(Common),
    /// Time evolution of a Gaussian or single-site packet: density map,
    /// centroid, width and band populations. `--out` names a directory.
    Evolve(EvolveArgs),
    /// Oscillating mode, breathing mode or beam splitter with reconstruction
    /// periods, fidelity, occupation fit and branch populations. `--out`
    /// names a directory.
    Scenario(ScenarioArgs),
    /// Find delta such that the beat and Bloch periods reach a target ratio.
    Tune(TuneArgs),
    /// Ladder offset over a (delta, Delta, Fd) grid, or interband transfer
    /// versus delta, one row per cell in grid order.
    Scan(ScanArgs),
}

/// Flags shared by every subcommand; each mirrors a config field.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named preset applied beneath the config file; see `--list-presets`.
    #[arg(long)]
    pub preset: Option<String>,
    /// Print the preset names and exit.
    #[arg(long)]
    pub list_presets: bool,
    /// Alternating on-site offset.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Width of the field-free cosine band.
    #[arg(long = "Delta", allow_hyphen_values = true)]
    pub big_delta: Option<f64>,
    /// Static force F.
    #[arg(long, allow_hyphen_values = true)]
    pub force: Option<f64>,
    /// Lattice period d.
    #[arg(long)]
    pub dlat: Option<f64>,
    /// Reduced Planck constant.
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Window half-width: sites run from -sites to +sites.
    #[arg(long)]
    pub sites: Option<i64>,
    /// Guard-band thickness at each window edge.
    #[arg(long)]
    pub guard: Option<usize>,
    /// Quasimomentum grid points.
    #[arg(long)]
    pub kpoints: Option<usize>,
    /// Final time.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Output time spacing.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Output file, or directory for `evolve` and `scenario`; standard
    /// output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// real-space, kappa or whittaker-hill.
    #[arg(long)]
    pub engine: Option<String>,
    /// Reverse the force at this time.
    #[arg(long)]
    pub flip_time: Option<f64>,
    /// Write the final quasimomentum state (kappa engines only).
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    #[command(flatten)]
    pub common: Common,
    /// oscillating, breathing or beam-splitter.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub common: Common,
    /// Target ratio, a number or a fraction such as 56/57.
    #[arg(long)]
    pub target: Option<String>,
    /// Search interval for delta.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub bracket: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: Common,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    pub threads: Option<usize>,
}

fn set(table: &mut toml::Table, path: &[&str], value: toml::Value) {
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut t = table;
    for key in parents {
        t = t
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .expect("flag paths never collide with scalars");
    }
    t.insert(last.to_string(), value);
}

impl Common {
    fn overrides(&self, command: Command) -> toml::Table {
        let mut t = toml::Table::new();
        set(&mut t, &["command"], command.as_str().into());
        if let Some(p) = &self.preset {
            set(&mut t, &["preset"], p.clone().into());
        }
        let floats = [
            (&["delta"][..], self.delta),
            (&["Delta"][..], self.big_delta),
            (&["F"][..], self.force),
            (&["d"][..], self.dlat),
            (&["hbar"][..], self.hbar),
            (&["numerics", "tmax"][..], self.tmax),
            (&["numerics", "dt"][..], self.dt),
        ];
        for (path, v) in floats {
            if let Some(v) = v {
                set(&mut t, path, v.into());
            }
        }
        if let Some(v) = self.sites {
            set(&mut t, &["window", "half_width"], v.into());
        }
        if let Some(v) = self.guard {
            set(&mut t, &["window", "guard"], (v as i64).into());
        }
        if let Some(v) = self.kpoints {
            set(&mut t, &["numerics", "kpoints"], (v as i64).into());
        }
        if let Some(p) = &self.out {
            set(&mut t, &["output", "path"], p.to_string_lossy().into_owned().into());
        }
        if let Some(f) = self.format {
            let name = match f {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            set(&mut t, &["output", "format"], name.into());
        }
        t
    }
}

impl Sub {
    fn common(&self) -> &Common {
        match self {
            Sub::Bands(c) | Sub::Spectrum(c) => c,
            Sub::Evolve(a) => &a.common,
            Sub::Scenario(a) => &a.common,
            Sub::Tune(a) => &a.common,
            Sub::Scan(a) => &a.common,
        }
    }

    fn command(&self) -> Command {
        match self {
            Sub::Bands(_) => Command::Bands,
            Sub::Spectrum(_) => Command::Spectrum,
            Sub::Evolve(_) => Command::Evolve,
            Sub::Scenario(_) => Command::Scenario,
            Sub::Tune(_) => Command::Tune,
            Sub::Scan(_) => Command::Scan,
        }
    }

    fn overrides(&self) -> toml::Table {
        let mut t = self.common().overrides(self.command());
        match self {
            Sub::Evolve(a) => {
                if let Some(e) = &a.engine {
                    set(&mut t, &["evolve", "engine"], e.clone().into());
                }
                if let Some(v) = a.flip_time {
                    set(&mut t, &["evolve", "flip_time"], v.into());
                }
                if let Some(p) = &a.checkpoint {
                    set(&mut t, &["evolve", "checkpoint"], p.to_string_lossy().into_owned().into());
                }
            }
            Sub::Scenario(a) => {
                if let Some(n) = &a.name {
                    set(&mut t, &["scenario", "name"], n.clone().into());
                }
            }
            Sub::Tune(a) => {
                if let Some(r) = &a.target {
                    let value = match r.parse::<f64>() {
                        Ok(x) => x.into(),
                        Err(_) => r.clone().into(),
                    };
                    set(&mut t, &["tune", "target"], value);
                }
                if let Some(b) = &a.bracket {
                    let arr = b.iter().map(|&x| toml::Value::Float(x)).collect();
                    set(&mut t, &["tune", "bracket"], toml::Value::Array(arr));
                }
            }
            Sub::Scan(a) => {
                if let Some(n) = a.threads {
                    set(&mut t, &["scan", "threads"], (n as i64).into());
                }
            }
            Sub::Bands(_) | Sub::Spectrum(_) => {}
        }
        t
    }
}

/// Resolve the effective configuration of a parsed command line.
pub fn config_from(sub: &Sub) -> Result<RunConfig> {
    let text = match &sub.common().config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?),
        None => None,
    };
    resolve_config(text.as_deref(), sub.overrides())
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => io::write_text(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn emit<R: Report + ?Sized>(report: &R, cfg: &RunConfig) -> Result<()> {
    let text = match cfg.output.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json()?,
    };
    write_output(cfg.output.path.as_deref(), &text)
}

fn emit_multi(report: &ScenarioReport, cfg: &RunConfig) -> Result<()> {
    match &cfg.output.path {
        Some(dir) => emit_scenario(report, dir),
        None => emit(report, cfg),
    }
}

/// Evolve the configured packet with the configured engine.
pub fn run_evolution(cfg: &RunConfig) -> Result<ScenarioReport> {
    let params = cfg.params();
    let window = cfg.window()?;
    let dt = cfg.numerics.dt.unwrap_or(params.bloch_time() / 64.0);
    let times = time_grid(cfg.tmax(), dt);
    let schedule = match cfg.evolve.flip_time {
        Some(t) => ForceSchedule::flipped_at(params.force, t),
        None => ForceSchedule::constant(params.force),
    };
    let psi0 = make_gaussian_packet(cfg.packet.width, cfg.packet.center, cfg.packet.band, &params, &window)?;
    let leak_limit = cfg.numerics.leak_limit;
    let (states, max_guard_weight) = match cfg.evolve.engine {
        EvolveEngine::RealSpace => {
            let tr = evolve_real_space_with(&psi0, &params, &schedule, &times, RealSpaceOptions { leak_limit })?;
            (tr.states, tr.max_guard_weight)
        }
        engine => {
            let run = if engine == EvolveEngine::Kappa {
                evolve_kappa_with
            } else {
                evolve_whittaker_hill_with
            };
            let ks = run(&params, &schedule, &times, cfg.numerics.kpoints, KappaOptions::default())?;
            if let (Some(path), Some(last)) = (&cfg.evolve.checkpoint, ks.last()) {
                write_checkpoint(path, last)?;
            }
            let states = ks.iter().map(|k| k.apply(&psi0)).collect::<Result<Vec<_>>>()?;
            let guard = states.iter().map(|s| s.guard_weight()).fold(0.0, f64::max);
            if guard > leak_limit {
                return Err(Error::Leakage {
                    leak: guard,
                    limit: leak_limit,
                });
            }
            (states, guard)
        }
    };
    let mut report = ScenarioReport::empty("evolve", params, window);
    report.max_guard_weight = max_guard_weight;
    report.densities = states.iter().map(|s| s.density()).collect();
    report.centroids = states.iter().map(|s| s.centroid()).collect();
    report.widths = states.iter().map(|s| s.rms_width()).collect();
    report.occupations = states
        .par_iter()
        .zip(&times)
        .map(|(s, &t)| {
            let p = params.with_force(schedule.force_at(t));
            band_occupations(s, &p, cfg.numerics.kpoints).map(|o| o.at(t))
        })
        .collect::<Result<_>>()?;
    report.times = times;
    Ok(report)
}

pub fn run_scenario(cfg: &RunConfig) -> Result<ScenarioReport> {
    let params = cfg.params();
    let window = cfg.window()?;
    match cfg.scenario.name {
        ScenarioName::Oscillating => run_oscillating_mode(&params, &window, cfg.tmax(), &cfg.mode_options()),
        ScenarioName::Breathing => run_breathing_mode(&params, &window, cfg.tmax(), &cfg.mode_options()),
        ScenarioName::BeamSplitter => run_beam_splitter(&params, &window, &cfg.beam_splitter_options()),
    }
}

fn scan_cells(cfg: &RunConfig) -> Vec<ModelParams> {
    let base = cfg.params();
    let deltas = cfg.scan.delta.map_or(vec![base.delta], |a| a.values());
    let bigs = cfg.scan.big_delta.map_or(vec![base.big_delta], |a| a.values());
    let fds = cfg.scan.fd.map_or(vec![base.fd()], |a| a.values());
    let mut cells = Vec::with_capacity(deltas.len() * bigs.len() * fds.len());
    for &delta in &deltas {
        for &big in &bigs {
            for &fd in &fds {
                cells.push(ModelParams {
                    delta,
                    big_delta: big,
                    force: fd / base.d,
                    ..base
                });
            }
        }
    }
    cells
}

fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::config("scan.threads", e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

pub const TRANSFER_HEADER: &str = "delta,Delta,Fd,t,p0,p1,transferred,lz";
pub const TUNE_HEADER: &str = "target,delta,ratio,ratio_error,offset";

fn scan(cfg: &RunConfig) -> Result<()> {
    let cells = scan_cells(cfg);
    match cfg.scan.kind {
        ScanKind::Offset => {
            let engine = cfg.spectrum_engine()?;
            let spectra = in_pool(cfg.scan.threads, || {
                cells.par_iter().map(|p| engine.run(p)).collect::<Result<Vec<_>>>()
            })??;
            emit(spectra.as_slice(), cfg)
        }
        ScanKind::Transfer => {
            let window = cfg.window()?;
            let opts = cfg.mode_options();
            let rows = in_pool(cfg.scan.threads, || {
                cells
                    .par_iter()
                    .map(|p| zener_transfer(p, &window, cfg.scenario.measure_time, &opts))
                    .collect::<Result<Vec<_>>>()
            })??;
            let text = match cfg.output.format {
                Format::Json => io::to_json(&rows)?,
                Format::Csv => numeric_csv(
                    TRANSFER_HEADER,
                    &rows
                        .iter()
                        .map(|r| {
                            let o = r.occupations;
                            vec![r.params.delta, r.params.big_delta, r.params.fd(), o.t, o.p0, o.p1, r.transferred, r.lz_prediction]
                        })
                        .collect::<Vec<_>>(),
                ),
            };
            write_output(cfg.output.path.as_deref(), &text)
        }
    }
}

fn tune(cfg: &RunConfig) -> Result<()> {
    let target = cfg.tune.target.value().map_err(|m| Error::config("tune.target", m))?;
    let p = cfg.params();
    let result = tune_delta(
        target,
        p.big_delta,
        p.fd(),
        cfg.tune.bracket,
        cfg.tune.scan_points,
        &cfg.spectrum_engine()?,
    )?;
    let text = match cfg.output.format {
        Format::Json => io::to_json(&result)?,
        Format::Csv => numeric_csv(
            TUNE_HEADER,
            &[vec![target, result.delta, result.ratio, result.ratio_error, result.spectrum.offset_e0]],
        ),
    };
    write_output(cfg.output.path.as_deref(), &text)
}

/// Run a resolved configuration.
pub fn execute(cfg: &RunConfig) -> Result<()> {
    match cfg.command {
        Command::Bands => emit(sample_bands(&cfg.params(), cfg.numerics.band_points)?.as_slice(), cfg),
        Command::Spectrum => emit([cfg.spectrum_engine()?.run(&cfg.params())?].as_slice(), cfg),
        Command::Evolve => {
            if cfg.evolve.checkpoint.is_some() && cfg.evolve.engine == EvolveEngine::RealSpace {
                return Err(Error::config("evolve.checkpoint", "needs the kappa or whittaker-hill engine"));
            }
            emit_multi(&run_evolution(cfg)?, cfg)
        }
        Command::Scenario => emit_multi(&run_scenario(cfg)?, cfg),
        Command::Tune => tune(cfg),
        Command::Scan => scan(cfg),
    }
}

fn preset_listing() -> String {
    PRESETS
        .iter()
        .map(|(name, about, _)| format!("{name:<28}{about}\n"))
        .collect()
}

/// Parse `args`, run, and return the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if cli.command.common().list_presets {
        print!("{}", preset_listing());
        return 0;
    }
    match config_from(&cli.command).and_then(|cfg| execute(&cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    run_from(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Sub {
        Cli::try_parse_from(std::iter::once("bloch-zener").chain(args.iter().copied()))
            .unwrap()
            .command
    }

    #[test]
    fn flags_override_preset() {
        let sub = parse(&["spectrum", "--preset", "minibands", "--delta", "-3", "--Delta", "4", "--sites", "64"]);
        let cfg = config_from(&sub).unwrap();
        assert_eq!(cfg.command, Command::Spectrum);
        assert_eq!((cfg.delta, cfg.big_delta, cfg.force), (-3.0, 4.0, 1.0));
        assert_eq!(cfg.window().unwrap().n_max, 64);
    }

    #[test]
    fn tune_flags() {
        let sub = parse(&["tune", "--Delta", "80", "--force", "1", "--target", "56/57", "--bracket", "15", "19"]);
        let cfg = config_from(&sub).unwrap();
        assert_eq!(cfg.tune.bracket, (15.0, 19.0));
        assert_eq!(cfg.tune.target.value().unwrap(), 56.0 / 57.0);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_from(["bloch-zener", "spectrum", "--delta", "x"]), 2);
        assert_eq!(run_from(["bloch-zener", "spectrum", "--delta", "1"]), 2);
        assert_eq!(run_from(["bloch-zener", "spectrum", "--config", "/nonexistent/run.toml"]), 4);
        assert_eq!(run_from(["bloch-zener", "bands", "--list-presets"]), 0);
    }

    #[test]
    fn scan_cell_order() {
        let cfg = resolve_config(
            Some("command = \"scan\"\nF = 1\n[scan]\ndelta = { from = 0, to = 1, steps = 2 }\nDelta = { from = 2, to = 3, steps = 2 }\n"),
            toml::Table::new(),
        )
        .unwrap();
        let cells: Vec<(f64, f64)> = scan_cells(&cfg).iter().map(|p| (p.delta, p.big_delta)).collect();
        assert_eq!(cells, vec![(0.0, 2.0), (0.0, 3.0), (1.0, 2.0), (1.0, 3.0)]);
    }
}
