//! Run configuration: a TOML file (or an embedded preset) turned into a
//! validated task.

use std::path::PathBuf;

use mazer_core::analysis::{linspace, SolverChoice, SweepVar};
use mazer_core::model::{reduce, RB87_MASS, STANDARD_GRAVITY};
use mazer_core::{DimensionlessParams, ModeProfile, PhysicalParams};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub run: RunSection,
    pub params: Option<ParamsSection>,
    pub physical: Option<PhysicalSection>,
    pub mode: Option<ModeSection>,
    pub sweep: Option<SweepSection>,
    pub amplitude: Option<AmplitudeSection>,
    pub density: Option<DensitySection>,
    #[serde(default)]
    pub peaks: PeaksSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub solver: Option<String>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(default)]
    pub h_e: f64,
    pub h_int: Option<f64>,
    pub g: Option<f64>,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub l: f64,
    #[serde(default)]
    pub n: u32,
}

/// SI inputs; converted with the reduced units of the given mass and gravity.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSection {
    pub mass: Option<f64>,
    pub gravity: Option<f64>,
    /// rad/s
    pub coupling: f64,
    /// rad/s
    pub detuning: Option<f64>,
    pub detuning_hz: Option<f64>,
    /// J
    pub energy: f64,
    /// m
    pub cavity_length: f64,
    #[serde(default)]
    pub photons: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub kind: String,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub var: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub adaptive: bool,
    pub deltas: Option<Vec<f64>>,
    #[serde(default)]
    pub classical: bool,
    #[serde(default)]
    pub overlap_check: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeSection {
    /// "delta" or "h_E"
    pub var: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    /// Values of the other variable, one column pair each.
    pub series: Vec<f64>,
    pub scan_points: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub points: Option<usize>,
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeaksSection {
    #[serde(default = "default_peak_threshold")]
    pub min_height: f64,
    #[serde(default = "default_peak_threshold")]
    pub min_prominence: f64,
}

fn default_peak_threshold() -> f64 {
    1e-3
}

impl Default for PeaksSection {
    fn default() -> Self {
        Self { min_height: default_peak_threshold(), min_prominence: default_peak_threshold() }
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub solver: SolverChoice,
    pub tol: f64,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SweepTask {
    pub var: SweepVar,
    pub grid: Vec<f64>,
    pub adaptive: bool,
    pub fixed: DimensionlessParams,
    pub mode: ModeProfile,
    /// One P_em column per entry; `None` means a single unlabelled column.
    pub deltas: Option<Vec<f64>>,
    pub classical: bool,
    pub overlap_check: bool,
    pub peaks: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct AmplitudeTask {
    pub var: SweepVar,
    pub grid: Vec<f64>,
    pub h_int: f64,
    pub n: u32,
    pub series: Vec<f64>,
    pub scan_points: usize,
}

#[derive(Debug, Clone)]
pub struct DensityTask {
    pub params: DimensionlessParams,
    pub mode: ModeProfile,
    pub points: usize,
    pub margin: f64,
}

#[derive(Debug, Clone)]
pub enum Task {
    Sweep(SweepTask),
    Amplitude(AmplitudeTask),
}

pub fn parse(text: &str) -> Result<Config, String> {
    toml::from_str(text).map_err(|e| format!("config: {e}"))
}

pub fn parse_solver(s: &str) -> Result<SolverChoice, String> {
    match s {
        "auto" => Ok(SolverChoice::Auto),
        "mesa" => Ok(SolverChoice::Mesa),
        "bvp" => Ok(SolverChoice::Bvp),
        other => Err(format!("unknown solver '{other}' (expected mesa, bvp or auto)")),
    }
}

fn parse_var(s: &str) -> Result<SweepVar, String> {
    match s {
        "h_E" | "h_e" | "energy" => Ok(SweepVar::HE),
        "L" | "l" | "length" => Ok(SweepVar::L),
        "delta" | "detuning" => Ok(SweepVar::Delta),
        other => Err(format!("unknown sweep variable '{other}' (expected h_E, L or delta)")),
    }
}

fn grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>, String> {
    if !(min.is_finite() && max.is_finite()) || !(max > min) || count < 2 {
        return Err(format!("grid needs finite min < max and count >= 2 (got {min}, {max}, {count})"));
    }
    Ok(linspace(min, max, count))
}

impl Config {
    /// Solver settings with command-line overrides applied.
    pub fn settings(&self, solver: Option<&str>, tol: Option<f64>, threads: Option<usize>) -> Result<Settings, String> {
        let solver = parse_solver(solver.or(self.run.solver.as_deref()).unwrap_or("auto"))?;
        let tol = tol.or(self.run.tol).unwrap_or(mazer_core::bvp::DEFAULT_TOL);
        if !(1e-13..=1e-6).contains(&tol) {
            return Err(format!("tolerance {tol:e} outside [1e-13, 1e-6]"));
        }
        let threads = threads.or(self.run.threads);
        if threads == Some(0) {
            return Err("thread count must be positive".into());
        }
        Ok(Settings { solver, tol, threads })
    }

    pub fn params(&self) -> Result<DimensionlessParams, String> {
        let dp = match (&self.params, &self.physical) {
            (Some(p), None) => {
                let dp = match (p.h_int, p.g) {
                    (Some(h), None) => DimensionlessParams::with_h_int(p.h_e, h, p.delta, p.l, p.n),
                    (None, Some(g)) => DimensionlessParams::new(p.h_e, g, p.delta, p.l, p.n),
                    _ => return Err("[params] needs exactly one of h_int or g".into()),
                };
                dp.validate().map_err(|e| e.to_string())?;
                dp
            }
            (None, Some(ph)) => {
                let mass = ph.mass.unwrap_or(RB87_MASS);
                let gravity = ph.gravity.unwrap_or(STANDARD_GRAVITY);
                let detuning = match (ph.detuning, ph.detuning_hz) {
                    (Some(d), None) => d,
                    (None, Some(hz)) => 2.0 * std::f64::consts::PI * hz,
                    (None, None) => 0.0,
                    _ => return Err("[physical] takes detuning or detuning_hz, not both".into()),
                };
                let p = PhysicalParams {
                    mass,
                    gravity,
                    coupling: ph.coupling,
                    detuning,
                    energy: ph.energy,
                    cavity_length: ph.cavity_length,
                    photons: ph.photons,
                };
                reduce(&p).map_err(|e| e.to_string())?
            }
            (Some(_), Some(_)) => return Err("give either [params] or [physical], not both".into()),
            (None, None) => return Err("missing [params] or [physical] section".into()),
        };
        Ok(dp)
    }

    pub fn mode(&self, l: f64) -> Result<ModeProfile, String> {
        let m = match &self.mode {
            None => ModeProfile::mesa(l),
            Some(m) if m.kind == "file" || m.kind == "sampled" => match &m.path {
                Some(p) => ModeProfile::from_file(p),
                None => return Err("mode kind 'file' needs a path".into()),
            },
            Some(m) => {
                if m.path.is_some() {
                    return Err(format!("mode kind '{}' takes no path", m.kind));
                }
                ModeProfile::from_name(&m.kind, l)
            }
        };
        m.map_err(|e| e.to_string())
    }

    pub fn task(&self, settings: &Settings) -> Result<Task, String> {
        match (&self.sweep, &self.amplitude) {
            (Some(s), None) => self.sweep_task(s, settings).map(Task::Sweep),
            (None, Some(a)) => self.amplitude_task(a).map(Task::Amplitude),
            (Some(_), Some(_)) => Err("give either [sweep] or [amplitude], not both".into()),
            (None, None) => Err("missing [sweep] or [amplitude] section".into()),
        }
    }

    fn sweep_task(&self, s: &SweepSection, settings: &Settings) -> Result<SweepTask, String> {
        let var = parse_var(&s.var)?;
        let fixed = self.params()?;
        let grid = grid(s.min, s.max, s.count)?;
        if var == SweepVar::L && s.min < 0.0 {
            return Err("cavity length cannot be negative".into());
        }
        let mode = self.mode(if var == SweepVar::L { s.max } else { fixed.l })?;
        if var == SweepVar::L && matches!(mode.kind, mazer_core::ModeKind::Sampled(_)) {
            return Err("a sampled mode has a fixed support; it cannot be swept in L".into());
        }
        if settings.solver == SolverChoice::Mesa && !mode.is_mesa() {
            return Err("the mesa solver needs a mesa mode".into());
        }
        if s.classical && !mode.is_mesa() {
            return Err("the classical formula exists only for the mesa mode".into());
        }
        let deltas = match &s.deltas {
            Some(d) if d.is_empty() => return Err("deltas must not be empty".into()),
            Some(_) if var == SweepVar::Delta => return Err("deltas cannot be combined with a detuning sweep".into()),
            Some(d) if d.iter().any(|x| !x.is_finite()) => return Err("deltas must be finite".into()),
            other => other.clone(),
        };
        if !(self.peaks.min_height >= 0.0 && self.peaks.min_prominence >= 0.0) {
            return Err("peak thresholds must be non-negative".into());
        }
        Ok(SweepTask {
            var,
            grid,
            adaptive: s.adaptive,
            fixed,
            mode,
            deltas,
            classical: s.classical,
            overlap_check: s.overlap_check,
            peaks: (self.peaks.min_height, self.peaks.min_prominence),
        })
    }

    fn amplitude_task(&self, a: &AmplitudeSection) -> Result<AmplitudeTask, String> {
        let var = parse_var(&a.var)?;
        if var == SweepVar::L {
            return Err("amplitude runs sweep delta or h_E".into());
        }
        if self.mode.as_ref().is_some_and(|m| m.kind != "mesa") {
            return Err("amplitude runs use the mesa mode".into());
        }
        let fixed = self.params()?;
        if a.series.is_empty() {
            return Err("amplitude series must not be empty".into());
        }
        let scan_points = a.scan_points.unwrap_or(20001);
        if scan_points < 3 {
            return Err("scan_points must be at least 3".into());
        }
        Ok(AmplitudeTask { var, grid: grid(a.min, a.max, a.count)?, h_int: fixed.h_int, n: fixed.n, series: a.series.clone(), scan_points })
    }

    pub fn density_task(&self) -> Result<DensityTask, String> {
        let params = self.params()?;
        let mode = self.mode(params.l)?;
        let d = self.density.clone().unwrap_or(DensitySection { points: None, margin: None });
        let points = d.points.unwrap_or(1001);
        let margin = d.margin.unwrap_or(10.0);
        if points < 3 || points % 2 == 0 {
            return Err("density points must be odd and at least 3".into());
        }
        if !(margin >= 0.0 && margin.is_finite()) {
            return Err("density margin must be non-negative".into());
        }
        Ok(DensityTask { params, mode, points, margin })
    }
}
