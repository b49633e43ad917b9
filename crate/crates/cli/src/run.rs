//! Executes tasks into tables.

use rayon::prelude::*;

use mazer_core::analysis::{
    amplitude_approx, find_peaks, l_scan_envelope, linspace, p_em, params_at, refine_peak, EnvelopeOptions,
    SolverChoice, SweepVar,
};
use mazer_core::bvp::{solve_general_with, BvpOptions};
use mazer_core::classical::classical_pem;
use mazer_core::mesa::{interior_state, wavefunction};
use mazer_core::overlap::{emission_from_samples, emission_via_overlap, DEFAULT_NODES};
use mazer_core::{solve_mesa, DimensionlessParams, MazerError, ModeProfile};

use crate::config::{AmplitudeTask, DensityTask, Settings, SweepTask};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gap {
    pub x: f64,
    pub column: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakRow {
    pub column: String,
    pub center: f64,
    pub height: f64,
    pub fwhm: f64,
    pub prominence: f64,
    pub edge_truncated: bool,
    pub under_resolved: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub peaks: Option<Vec<PeakRow>>,
    pub gaps: Vec<Gap>,
    /// Free-form lines for stderr.
    pub notes: Vec<String>,
}

fn column_suffix(name: &str, value: f64) -> String {
    format!("({name}={value})")
}

struct Column {
    name: String,
    values: Vec<Result<f64, MazerError>>,
}

fn solve_column(task: &SweepTask, s: &Settings, fixed: &DimensionlessParams, grid: &[f64]) -> Vec<Result<f64, MazerError>> {
    grid.par_iter().map(|&x| p_em(&params_at(fixed, task.var, x), &task.mode, s.solver, s.tol)).collect()
}

fn overlap_point(dp: &DimensionlessParams, mode: &ModeProfile, s: &Settings) -> Result<f64, MazerError> {
    let m = if mode.l != dp.l { mode.with_length(dp.l)? } else { mode.clone() };
    let use_mesa = m.is_mesa() && s.solver != SolverChoice::Bvp;
    if use_mesa {
        let sol = solve_mesa(dp)?;
        Ok(emission_via_overlap(dp, &m, |z| Ok(interior_state(&sol, z)?[0]), DEFAULT_NODES)?.p_em)
    } else {
        let sol = solve_general_with(dp, &m, &BvpOptions { tol: s.tol, samples: DEFAULT_NODES, ..Default::default() })?;
        Ok(emission_from_samples(dp, &m, sol.interior.as_deref().unwrap_or(&[]))?.p_em)
    }
}

fn columns(task: &SweepTask, s: &Settings, grid: &[f64]) -> Vec<Column> {
    let series: Vec<(String, DimensionlessParams)> = match &task.deltas {
        None => vec![(String::new(), task.fixed)],
        Some(ds) => ds.iter().map(|&d| (column_suffix("delta", d), DimensionlessParams { delta: d, ..task.fixed })).collect(),
    };
    let mut out = Vec::new();
    for (suffix, fixed) in &series {
        out.push(Column { name: format!("P_em{suffix}"), values: solve_column(task, s, fixed, grid) });
    }
    if task.classical {
        for (suffix, fixed) in &series {
            let values = grid.iter().map(|&x| Ok(classical_pem(&params_at(fixed, task.var, x)))).collect();
            out.push(Column { name: format!("P_em_classical{suffix}"), values });
        }
    }
    if task.overlap_check {
        for (suffix, fixed) in &series {
            let values = grid.par_iter().map(|&x| overlap_point(&params_at(fixed, task.var, x), &task.mode, s)).collect();
            out.push(Column { name: format!("P_em_overlap_check{suffix}"), values });
        }
    }
    out
}

/// Adds local points around peaks that the current grid does not resolve.
fn refine_grid(task: &SweepTask, s: &Settings, grid: &[f64], cols: &[Column], n_pem: usize) -> Result<Option<Vec<f64>>, MazerError> {
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let mut extra = Vec::new();
    for (k, c) in cols.iter().take(n_pem).enumerate() {
        let ys: Vec<f64> = c.values.iter().map(|v| v.as_ref().copied().unwrap_or(f64::NAN)).collect();
        let fixed = fixed_for(task, k);
        let f = |x: f64| p_em(&params_at(&fixed, task.var, x), &task.mode, s.solver, s.tol);
        for p in find_peaks(grid, &ys, task.peaks.0, task.peaks.1).peaks.iter().filter(|p| p.under_resolved) {
            let r = refine_peak(&f, grid, &ys, p)?;
            let w = if r.fwhm > 0.0 && !r.edge_truncated { r.fwhm } else { grid[p.index + 1] - grid[p.index - 1] };
            extra.extend(linspace((r.center - 4.0 * w).max(lo), (r.center + 4.0 * w).min(hi), 201));
        }
    }
    if extra.is_empty() {
        return Ok(None);
    }
    let mut all: Vec<f64> = grid.iter().copied().chain(extra).collect();
    all.sort_by(f64::total_cmp);
    let tol = 1e-12 * (hi - lo).abs().max(1.0);
    all.dedup_by(|a, b| (*a - *b).abs() <= tol);
    Ok(Some(all))
}

fn fixed_for(task: &SweepTask, k: usize) -> DimensionlessParams {
    match &task.deltas {
        None => task.fixed,
        Some(ds) => DimensionlessParams { delta: ds[k], ..task.fixed },
    }
}

pub fn sweep(task: &SweepTask, s: &Settings) -> Outcome {
    let n_pem = task.deltas.as_ref().map_or(1, |d| d.len());
    let mut grid = task.grid.clone();
    let mut cols = columns(task, s, &grid);
    let mut notes = Vec::new();
    if task.adaptive {
        for _ in 0..3 {
            match refine_grid(task, s, &grid, &cols, n_pem) {
                Ok(Some(g)) => {
                    grid = g;
                    cols = columns(task, s, &grid);
                }
                Ok(None) => break,
                Err(e) => {
                    notes.push(format!("adaptive refinement stopped: {e}"));
                    break;
                }
            }
        }
    }

    let mut gaps = Vec::new();
    for c in &cols {
        for (x, v) in grid.iter().zip(&c.values) {
            if let Err(e) = v {
                gaps.push(Gap { x: *x, column: c.name.clone(), error: e.to_string() });
            }
        }
    }

    let mut peaks = Vec::new();
    for (k, c) in cols.iter().take(n_pem).enumerate() {
        let ys: Vec<f64> = c.values.iter().map(|v| v.as_ref().copied().unwrap_or(f64::NAN)).collect();
        let fixed = fixed_for(task, k);
        let f = |x: f64| p_em(&params_at(&fixed, task.var, x), &task.mode, s.solver, s.tol);
        for p in find_peaks(&grid, &ys, task.peaks.0, task.peaks.1).peaks {
            let p = if p.under_resolved {
                match refine_peak(&f, &grid, &ys, &p) {
                    Ok(r) => r,
                    Err(e) => {
                        notes.push(format!("peak at {} in {} not refined: {e}", p.center, c.name));
                        p
                    }
                }
            } else {
                p
            };
            peaks.push(PeakRow {
                column: c.name.clone(),
                center: p.center,
                height: p.height,
                fwhm: p.fwhm,
                prominence: p.prominence,
                edge_truncated: p.edge_truncated,
                under_resolved: p.under_resolved,
            });
        }
    }

    let mut header = vec![task.var.name().to_string()];
    header.extend(cols.iter().map(|c| c.name.clone()));
    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, &x)| std::iter::once(Some(x)).chain(cols.iter().map(|c| c.values[i].as_ref().ok().copied())).collect())
        .collect();
    Outcome { table: Table { header, rows }, peaks: Some(peaks), gaps, notes }
}

pub fn amplitude(task: &AmplitudeTask) -> Outcome {
    let (label, other) = match task.var {
        SweepVar::Delta => ("h_E", SweepVar::HE),
        _ => ("delta", SweepVar::Delta),
    };
    let opt = EnvelopeOptions { points: task.scan_points, ..Default::default() };
    let mut header = vec![task.var.name().to_string()];
    let mut cols: Vec<Vec<Result<f64, MazerError>>> = Vec::new();
    for &v in &task.series {
        header.push(format!("A_measured{}", column_suffix(label, v)));
        header.push(format!("A_formula{}", column_suffix(label, v)));
        let point = |x: f64| {
            let (h_e, delta) = if other == SweepVar::HE { (v, x) } else { (x, v) };
            (h_e, delta)
        };
        cols.push(task.grid.iter().map(|&x| {
            let (h_e, d) = point(x);
            l_scan_envelope(h_e, task.h_int, task.n, d, &opt).map(|e| e.amplitude)
        }).collect());
        cols.push(task.grid.iter().map(|&x| {
            let (h_e, d) = point(x);
            amplitude_approx(h_e, d)
        }).collect());
    }
    let mut gaps = Vec::new();
    for (c, name) in cols.iter().zip(&header[1..]) {
        for (x, v) in task.grid.iter().zip(c) {
            if let Err(e) = v {
                gaps.push(Gap { x: *x, column: name.clone(), error: e.to_string() });
            }
        }
    }
    let rows = task
        .grid
        .iter()
        .enumerate()
        .map(|(i, &x)| std::iter::once(Some(x)).chain(cols.iter().map(|c| c[i].as_ref().ok().copied())).collect())
        .collect();
    Outcome { table: Table { header, rows }, peaks: None, gaps, notes: Vec::new() }
}

/// |phi_a|^2 and |phi_b|^2 on a uniform grid spanning the mode support plus
/// a margin on both sides.
pub fn density(task: &DensityTask, s: &Settings) -> Result<Outcome, MazerError> {
    let mode = &task.mode;
    let (lo, hi) = (mode.z_min, mode.z_max);
    let interior = linspace(lo, hi, task.points);
    let h = (hi - lo) / (task.points - 1) as f64;
    let k = if h > 0.0 { (task.margin / h).ceil() as usize } else { 0 };
    let below: Vec<f64> = (1..=k).rev().map(|j| lo - j as f64 * h).collect();
    let above: Vec<f64> = (1..=k).map(|j| hi + j as f64 * h).collect();

    let dp = &task.params;
    let use_mesa = mode.is_mesa() && s.solver != SolverChoice::Bvp;
    if s.solver == SolverChoice::Mesa && !mode.is_mesa() {
        return Err(MazerError::Invalid("the mesa solver needs a mesa mode".into()));
    }
    let mut values: Vec<(f64, f64, f64, bool)> = Vec::new();
    let p;
    if use_mesa {
        let sol = solve_mesa(dp)?;
        p = sol.p_em();
        for &z in below.iter().chain(&interior).chain(&above) {
            let (a, b) = wavefunction(&sol, z)?;
            values.push((z, a.norm_sqr(), b.norm_sqr(), (lo..=hi).contains(&z)));
        }
    } else {
        let sol = solve_general_with(dp, mode, &BvpOptions { tol: s.tol, samples: task.points, ..Default::default() })?;
        p = sol.p_em();
        let ext = |z: f64| -> Result<(f64, f64, f64, bool), MazerError> {
            let (a, b) = sol.exterior(z)?.ok_or_else(|| MazerError::Invalid(format!("{z} is inside the support")))?;
            Ok((z, a.norm_sqr(), b.norm_sqr(), false))
        };
        for &z in &below {
            values.push(ext(z)?);
        }
        for smp in sol.interior.as_deref().unwrap_or(&[]) {
            values.push((smp.z, smp.phi_a.norm_sqr(), smp.phi_b.norm_sqr(), true));
        }
        for &z in &above {
            values.push(ext(z)?);
        }
    }
    let max_in = values.iter().filter(|v| v.3).map(|v| v.1).fold(0.0, f64::max);
    let max_out = values.iter().filter(|v| !v.3).map(|v| v.1).fold(0.0, f64::max);
    let notes = vec![
        format!("P_em = {p:.10}"),
        format!("max |phi_a|^2 inside {max_in:.6e}, outside {max_out:.6e}, ratio {:.6e}", max_in / max_out),
    ];
    let rows = values.iter().map(|v| vec![Some(v.0), Some(v.1), Some(v.2)]).collect();
    Ok(Outcome {
        table: Table { header: vec!["z".into(), "phi_a_sq".into(), "phi_b_sq".into()], rows },
        peaks: None,
        gaps: Vec::new(),
        notes,
    })
}
