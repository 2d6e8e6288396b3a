//! Run configuration: a TOML document, optionally seeded from a named
//! preset and overridden by command-line flags.
//!
//! ```toml
//! command = "spectrum"
//! delta = 17.19
//! Delta = 80
//! F = 1
//! ```
//!
//! Layers merge table by table, later layers winning: preset, file, flags.
//! Every numeric field is validated before any computation starts and
//! errors name the offending field path.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Format;
use crate::lattice::{LatticeWindow, ModelParams};
use crate::propagator::MIN_KAPPA_POINTS;
use crate::scenario::{best_rational, BeamSplitterOptions, ModeOptions, PacketBand};
use crate::spectrum::{Engine, MIN_KAPPA_STEPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Bands,
    Spectrum,
    Evolve,
    Scenario,
    Tune,
    Scan,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Bands => "bands",
            Command::Spectrum => "spectrum",
            Command::Evolve => "evolve",
            Command::Scenario => "scenario",
            Command::Tune => "tune",
            Command::Scan => "scan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumEngine {
    #[default]
    Floquet,
    Diagonalization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvolveEngine {
    #[default]
    RealSpace,
    Kappa,
    WhittakerHill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    #[default]
    Oscillating,
    Breathing,
    BeamSplitter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    /// Ladder offset per `(delta, Delta, Fd)` cell.
    #[default]
    Offset,
    /// Interband transfer of a single-band packet at
    /// `scenario.measure_time` (`T_B/2` by default).
    Transfer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowSpec {
    pub half_width: i64,
    pub guard: usize,
    /// Explicit bounds; override `half_width` when both are given.
    pub n_min: Option<i64>,
    pub n_max: Option<i64>,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            half_width: LatticeWindow::DEFAULT_HALF_WIDTH,
            guard: LatticeWindow::DEFAULT_GUARD,
            n_min: None,
            n_max: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub kpoints: usize,
    pub floquet_steps: usize,
    pub engine: SpectrumEngine,
    /// Samples of the closed reduced zone for `bands`.
    pub band_points: usize,
    /// Final time; two Bloch periods when unset.
    pub tmax: Option<f64>,
    /// Output spacing; `T_B/64` when unset.
    pub dt: Option<f64>,
    pub leak_limit: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            kpoints: crate::propagator::DEFAULT_KAPPA_POINTS,
            floquet_steps: crate::spectrum::DEFAULT_KAPPA_STEPS,
            engine: SpectrumEngine::Floquet,
            band_points: 201,
            tmax: None,
            dt: None,
            leak_limit: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// File for single-table commands, directory for `evolve` and
    /// `scenario`; standard output when unset.
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketSpec {
    pub width: f64,
    pub center: f64,
    pub band: PacketBand,
}

impl Default for PacketSpec {
    fn default() -> Self {
        PacketSpec {
            width: 10.0,
            center: 0.0,
            band: PacketBand::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    pub flip_time: Option<f64>,
    pub measure_time: Option<f64>,
    pub left: (i64, i64),
    pub right: (i64, i64),
    pub snapshots: usize,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        let b = BeamSplitterOptions::default();
        ScenarioSpec {
            name: ScenarioName::Oscillating,
            flip_time: None,
            measure_time: None,
            left: b.left,
            right: b.right,
            snapshots: b.snapshots,
        }
    }
}

/// `T2/T1` target, either a number or a fraction such as `"56/57"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ratio {
    Value(f64),
    Fraction(String),
}

impl Ratio {
    pub fn value(&self) -> std::result::Result<f64, String> {
        match self {
            Ratio::Value(x) => Ok(*x),
            Ratio::Fraction(s) => {
                let (num, den) = s.split_once('/').ok_or_else(|| format!("expected `r/s`, got {s:?}"))?;
                let num: f64 = num.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
                let den: f64 = den.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
                Ok(num / den)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuneSpec {
    pub target: Ratio,
    pub bracket: (f64, f64),
    pub scan_points: usize,
}

impl Default for TuneSpec {
    fn default() -> Self {
        TuneSpec {
            target: Ratio::Value(2.0),
            bracket: (5.0, 9.0),
            scan_points: crate::scenario::DEFAULT_SCAN_POINTS,
        }
    }
}

/// `steps` equally spaced values from `from` to `to` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.from],
            n => (0..n)
                .map(|i| self.from + (self.to - self.from) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSpec {
    pub kind: ScanKind,
    /// Axes default to the single configured value.
    pub delta: Option<Axis>,
    #[serde(rename = "Delta")]
    pub big_delta: Option<Axis>,
    #[serde(rename = "Fd")]
    pub fd: Option<Axis>,
    /// Worker threads; all cores when unset.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSpec {
    pub engine: EvolveEngine,
    /// Sign flip of the force at this time.
    pub flip_time: Option<f64>,
    /// Write the final quasimomentum state here (`kappa` and
    /// `whittaker-hill` engines).
    pub checkpoint: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub delta: f64,
    #[serde(rename = "Delta", default)]
    pub big_delta: f64,
    #[serde(rename = "F", default)]
    pub force: f64,
    #[serde(default = "one")]
    pub d: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default)]
    pub window: WindowSpec,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub packet: PacketSpec,
    #[serde(default)]
    pub scenario: ScenarioSpec,
    #[serde(default)]
    pub tune: TuneSpec,
    #[serde(default)]
    pub scan: ScanSpec,
    #[serde(default)]
    pub evolve: EvolveSpec,
}

impl RunConfig {
    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.delta, self.big_delta, self.force)
            .with_lattice_period(self.d)
            .with_hbar(self.hbar)
    }

    pub fn window(&self) -> Result<LatticeWindow> {
        let w = &self.window;
        match (w.n_min, w.n_max) {
            (Some(lo), Some(hi)) => LatticeWindow::new(lo, hi, w.guard),
            (None, None) => LatticeWindow::symmetric(w.half_width, w.guard),
            _ => Err(Error::config("window", "give both n_min and n_max or neither")),
        }
    }

    pub fn spectrum_engine(&self) -> Result<Engine> {
        Ok(match self.numerics.engine {
            SpectrumEngine::Floquet => Engine::Floquet {
                kappa_steps: self.numerics.floquet_steps,
            },
            SpectrumEngine::Diagonalization => Engine::Diagonalization(self.window()?),
        })
    }

    /// `numerics.tmax`, defaulting to two Bloch periods.
    pub fn tmax(&self) -> f64 {
        self.numerics.tmax.unwrap_or(2.0 * self.params().bloch_time())
    }

    pub fn mode_options(&self) -> ModeOptions {
        ModeOptions {
            dt: self.numerics.dt,
            packet_width: self.packet.width,
            packet_center: self.packet.center,
            packet_band: self.packet.band,
            kappa_points: self.numerics.kpoints,
            leak_limit: self.numerics.leak_limit,
            ..ModeOptions::default()
        }
    }

    pub fn beam_splitter_options(&self) -> BeamSplitterOptions {
        BeamSplitterOptions {
            flip_time: self.scenario.flip_time,
            measure_time: self.scenario.measure_time,
            left: self.scenario.left,
            right: self.scenario.right,
            packet_width: self.packet.width,
            packet_center: self.packet.center,
            packet_band: self.packet.band,
            snapshots: self.scenario.snapshots,
            leak_limit: self.numerics.leak_limit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |path: &str, x: f64| -> Result<()> {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::config(path, format!("must be finite, got {x}")))
            }
        };
        let positive = |path: &str, x: f64| -> Result<()> {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::config(path, format!("must be positive, got {x}")))
            }
        };
        finite("delta", self.delta)?;
        finite("Delta", self.big_delta)?;
        finite("F", self.force)?;
        positive("d", self.d)?;
        positive("hbar", self.hbar)?;
        self.window().map_err(|e| match e {
            Error::Config { .. } => e,
            other => Error::config("window", other.to_string()),
        })?;
        let n = &self.numerics;
        if n.kpoints < MIN_KAPPA_POINTS {
            return Err(Error::config(
                "numerics.kpoints",
                format!("need at least {MIN_KAPPA_POINTS}, got {}", n.kpoints),
            ));
        }
        if n.floquet_steps < MIN_KAPPA_STEPS {
            return Err(Error::config(
                "numerics.floquet_steps",
                format!("need at least {MIN_KAPPA_STEPS}, got {}", n.floquet_steps),
            ));
        }
        if n.band_points < 2 {
            return Err(Error::config("numerics.band_points", "need at least 2"));
        }
        if let Some(t) = n.tmax {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::config("numerics.tmax", format!("must be >= 0, got {t}")));
            }
        }
        if let Some(dt) = n.dt {
            positive("numerics.dt", dt)?;
        }
        positive("numerics.leak_limit", n.leak_limit)?;
        if !(self.packet.width.is_finite() && self.packet.width >= 0.0) {
            return Err(Error::config("packet.width", "must be finite and >= 0"));
        }
        finite("packet.center", self.packet.center)?;
        for (path, t) in [
            ("scenario.flip_time", self.scenario.flip_time),
            ("scenario.measure_time", self.scenario.measure_time),
            ("evolve.flip_time", self.evolve.flip_time),
        ] {
            if let Some(t) = t {
                if !(t.is_finite() && t >= 0.0) {
                    return Err(Error::config(path, format!("must be >= 0, got {t}")));
                }
            }
        }
        let target = self.tune.target.value().map_err(|m| Error::config("tune.target", m))?;
        positive("tune.target", target)?;
        let (lo, hi) = self.tune.bracket;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::config("tune.bracket", format!("need lo < hi, got [{lo}, {hi}]")));
        }
        for (path, axis) in [
            ("scan.delta", self.scan.delta),
            ("scan.Delta", self.scan.big_delta),
            ("scan.Fd", self.scan.fd),
        ] {
            if let Some(a) = axis {
                if !(a.from.is_finite() && a.to.is_finite() && a.steps >= 1) {
                    return Err(Error::config(path, "need finite bounds and steps >= 1"));
                }
            }
        }
        if let Some(fd) = self.scan.fd {
            if fd.values().contains(&0.0) {
                return Err(Error::config("scan.Fd", "axis contains Fd = 0"));
            }
        }
        if self.scan.threads == Some(0) {
            return Err(Error::config("scan.threads", "must be at least 1"));
        }
        let needs_force = !matches!(self.command, Command::Bands) && self.scan.fd.is_none();
        if needs_force && self.force == 0.0 {
            return Err(Error::config("F", "this command needs a non-zero force"));
        }
        Ok(())
    }
}

/// Named starting points, one per figure-class output.
pub const PRESETS: &[(&str, &str, &str)] = &[
    (
        "minibands",
        "miniband dispersion and coupling modulus, delta = 18, Delta = 80",
        "command = \"bands\"\ndelta = 18.0\nDelta = 80.0\nF = 1.0\n",
    ),
    (
        "coupling-modulus",
        "coupling |M| across the reduced zone, delta = 6.734, Delta = 80, Fd = 1",
        "command = \"bands\"\ndelta = 6.734\nDelta = 80.0\nF = 1.0\n",
    ),
    (
        "offset-surface",
        "ladder offset over the (delta, Delta) plane at Fd = 1",
        "command = \"scan\"\nF = 1.0\n[scan]\nkind = \"offset\"\ndelta = { from = -6.0, to = 6.0, steps = 49 }\nDelta = { from = 0.0, to = 8.0, steps = 33 }\n",
    ),
    (
        "ladder-spectrum-Delta2",
        "ladder offset versus delta at Delta = 2, Fd = 1",
        "command = \"scan\"\nDelta = 2.0\nF = 1.0\n[scan]\nkind = \"offset\"\ndelta = { from = -6.0, to = 6.0, steps = 241 }\n",
    ),
    (
        "ladder-spectrum-Delta4",
        "ladder offset versus delta at Delta = 4, Fd = 1",
        "command = \"scan\"\nDelta = 4.0\nF = 1.0\n[scan]\nkind = \"offset\"\ndelta = { from = -6.0, to = 6.0, steps = 241 }\n",
    ),
    (
        "oscillating-tbz-equals-tb",
        "oscillating mode reconstructing after one Bloch period",
        "command = \"scenario\"\ndelta = 6.734\nDelta = 80.0\nF = 1.0\n[scenario]\nname = \"oscillating\"\n",
    ),
    (
        "oscillating-tbz-28tb",
        "oscillating mode with a slow occupation beat, T_BZ = 28 T_B",
        "command = \"scenario\"\ndelta = 17.19\nDelta = 80.0\nF = 1.0\n[numerics]\ntmax = 175.92918860102841\ndt = 0.19634954084936207\n[packet]\nband = \"lower\"\n[scenario]\nname = \"oscillating\"\n",
    ),
    (
        "breathing",
        "breathing mode from a single site",
        "command = \"scenario\"\ndelta = 6.734\nDelta = 80.0\nF = 1.0\n[numerics]\ntmax = 25.132741228718345\n[scenario]\nname = \"breathing\"\n",
    ),
    (
        "packet-splitting",
        "broad Gaussian up to half a Bloch period",
        "command = \"evolve\"\ndelta = 6.734\nDelta = 80.0\nF = 1.0\n[numerics]\ntmax = 3.141592653589793\n",
    ),
    (
        "beam-splitter",
        "force flip at T_B/2 and branch populations at 3T_B/2",
        "command = \"scenario\"\ndelta = 6.734\nDelta = 80.0\nF = 1.0\n[scenario]\nname = \"beam-splitter\"\n",
    ),
    (
        "zener-transfer-scan",
        "interband transfer at T_B/2 versus delta against the Landau-Zener formula",
        "command = \"scan\"\nDelta = 80.0\nF = 1.0\n[packet]\nband = \"lower\"\n[scan]\nkind = \"transfer\"\ndelta = { from = 1.0, to = 14.0, steps = 27 }\n",
    ),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.0)
}

fn preset_table(name: &str) -> Result<toml::Table> {
    let (_, _, text) = PRESETS.iter().find(|p| p.0 == name).ok_or_else(|| {
        Error::config(
            "preset",
            format!("unknown preset {name:?}; known: {}", preset_names().collect::<Vec<_>>().join(", ")),
        )
    })?;
    Ok(text.parse::<toml::Table>().expect("presets are valid TOML"))
}

fn parse_table(text: &str) -> Result<toml::Table> {
    text.parse::<toml::Table>()
        .map_err(|e| Error::config("<document>", e.to_string().trim_end().to_string()))
}

/// Recursive merge; values in `top` win, tables merge key by key.
pub fn merge_tables(mut base: toml::Table, top: toml::Table) -> toml::Table {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => {
                let merged = merge_tables(std::mem::take(b), t);
                *b = merged;
            }
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
    base
}

/// Merge preset, file and flag layers, then deserialize and validate.
pub fn resolve_config(file: Option<&str>, overrides: toml::Table) -> Result<RunConfig> {
    let file_table = match file {
        Some(text) => parse_table(text)?,
        None => toml::Table::new(),
    };
    let preset = overrides
        .get("preset")
        .or_else(|| file_table.get("preset"))
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::config("preset", "must be a string"))
        })
        .transpose()?;
    let mut merged = match &preset {
        Some(name) => preset_table(name)?,
        None => toml::Table::new(),
    };
    merged = merge_tables(merged, file_table);
    merged = merge_tables(merged, overrides);
    let config: RunConfig = serde_path_to_error::deserialize(toml::Value::Table(merged)).map_err(|e| {
        let path = e.path().to_string();
        Error::Config {
            path: if path == "." { "<document>".into() } else { path },
            message: e.into_inner().to_string().trim_end().to_string(),
        }
    })?;
    config.validate()?;
    Ok(config)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    resolve_config(Some(text), toml::Table::new())
}

/// Exact `(r, s)` for a target ratio written as a fraction, for reports.
pub fn target_fraction(ratio: &Ratio) -> Option<(u64, u64)> {
    ratio.value().ok().and_then(|x| best_rational(x, 1e-12, 1_000_000))
}
