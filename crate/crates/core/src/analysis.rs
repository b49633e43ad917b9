//! Sweeps, resonance extraction and the derived checks built on them.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::airy::wave_eval;
use crate::bvp::{solve_general, DEFAULT_TOL};
use crate::error::{MazerError, Result};
use crate::mesa::solve_mesa;
use crate::model::{dressed_frame, DimensionlessParams, ModeProfile};
use crate::scattering::ScatteringSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    HE,
    L,
    Delta,
}

impl SweepVar {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVar::HE => "h_E",
            SweepVar::L => "L",
            SweepVar::Delta => "delta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Auto,
    Mesa,
    Bvp,
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

pub fn params_at(fixed: &DimensionlessParams, var: SweepVar, x: f64) -> DimensionlessParams {
    let mut p = *fixed;
    match var {
        SweepVar::HE => p.h_e = x,
        SweepVar::L => p.l = x,
        SweepVar::Delta => p.delta = x,
    }
    p
}

/// Solves one parameter point. The mode is rescaled to `dp.l` when its
/// length differs (sampled modes keep their own support).
pub fn solve_point(dp: &DimensionlessParams, mode: &ModeProfile, solver: SolverChoice, tol: f64) -> Result<ScatteringSolution> {
    let mesa = mode.is_mesa();
    match (solver, mesa) {
        (SolverChoice::Mesa, false) => Err(MazerError::Invalid("the mesa solver needs a mesa mode".into())),
        (SolverChoice::Auto | SolverChoice::Mesa, true) => Ok(solve_mesa(dp)?.solution),
        _ => {
            let m = if mode.l != dp.l { mode.with_length(dp.l)? } else { mode.clone() };
            solve_general(dp, &m, tol)
        }
    }
}

pub fn p_em(dp: &DimensionlessParams, mode: &ModeProfile, solver: SolverChoice, tol: f64) -> Result<f64> {
    Ok(solve_point(dp, mode, solver, tol)?.p_em())
}

/// P_em along the given variable with the mesa solver.
pub fn mesa_curve(fixed: &DimensionlessParams, var: SweepVar) -> impl Fn(f64) -> Result<f64> + Sync + '_ {
    move |x| Ok(solve_mesa(&params_at(fixed, var, x))?.p_em())
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub grid: Vec<f64>,
    pub fixed: DimensionlessParams,
    pub mode: ModeProfile,
    pub solver: SolverChoice,
    pub tol: f64,
}

impl SweepSpec {
    pub fn new(var: SweepVar, grid: Vec<f64>, fixed: DimensionlessParams, mode: ModeProfile) -> Self {
        Self { var, grid, fixed, mode, solver: SolverChoice::Auto, tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub var: SweepVar,
    pub grid: Vec<f64>,
    pub fixed: DimensionlessParams,
    pub mode: ModeProfile,
    /// `None` where the solver failed; see `gaps`.
    pub values: Vec<Option<f64>>,
    pub gaps: Vec<(usize, MazerError)>,
}

impl Sweep {
    /// Values with gaps as NaN.
    pub fn dense(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.unwrap_or(f64::NAN)).collect()
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Sweep> {
    if spec.grid.is_empty() {
        return Err(MazerError::Invalid("empty sweep grid".into()));
    }
    if spec.grid.windows(2).any(|w| !(w[1] > w[0])) || spec.grid.iter().any(|x| !x.is_finite()) {
        return Err(MazerError::Invalid("sweep grid must be finite and strictly increasing".into()));
    }
    let results: Vec<Result<f64>> = spec
        .grid
        .par_iter()
        .map(|&x| p_em(&params_at(&spec.fixed, spec.var, x), &spec.mode, spec.solver, spec.tol))
        .collect();
    let mut values = Vec::with_capacity(results.len());
    let mut gaps = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => values.push(Some(v)),
            Err(e) => {
                values.push(None);
                gaps.push((i, e));
            }
        }
    }
    if gaps.len() == values.len() {
        return Err(MazerError::AllPointsFailed);
    }
    Ok(Sweep { var: spec.var, grid: spec.grid.clone(), fixed: spec.fixed, mode: spec.mode.clone(), values, gaps })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub center: f64,
    pub height: f64,
    pub fwhm: f64,
    pub prominence: f64,
    pub edge_truncated: bool,
    pub under_resolved: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn tallest(&self) -> Option<&Peak> {
        self.peaks.iter().max_by(|a, b| a.height.total_cmp(&b.height))
    }

    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }
}

/// Fewer points than this above half height marks a peak under-resolved.
pub const MIN_POINTS_ABOVE_HALF: usize = 5;

/// Local maxima of `ys` (NaN marks gaps) with height and prominence above
/// the thresholds. Widths are full widths at half height, found by linear
/// interpolation between grid points.
pub fn find_peaks(xs: &[f64], ys: &[f64], min_height: f64, min_prominence: f64) -> PeakSet {
    let n = ys.len().min(xs.len());
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < n {
        let y = ys[i];
        if !y.is_finite() || y < min_height {
            i += 1;
            continue;
        }
        // end points are never maxima: the curve may keep rising past them
        let left_lower = i > 0 && ys[i - 1].is_finite() && ys[i - 1] < y;
        // treat a flat top as one maximum located at its middle
        let mut j = i;
        while j + 1 < n && ys[j + 1] == y {
            j += 1;
        }
        let right_lower = j + 1 < n && ys[j + 1].is_finite() && ys[j + 1] < y;
        if left_lower && right_lower {
            let k = (i + j) / 2;
            let prom = prominence(ys, i, j, y);
            if prom >= min_prominence {
                let (fwhm, edge, above) = half_width(xs, ys, i, j, y);
                peaks.push(Peak {
                    index: k,
                    center: xs[k],
                    height: y,
                    fwhm,
                    prominence: prom,
                    edge_truncated: edge,
                    under_resolved: above < MIN_POINTS_ABOVE_HALF,
                });
            }
        }
        i = j + 1;
    }
    PeakSet { peaks }
}

fn prominence(ys: &[f64], i: usize, j: usize, y: f64) -> f64 {
    let mut left_min = y;
    for k in (0..i).rev() {
        let v = ys[k];
        if !v.is_finite() || v > y {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = y;
    for &v in &ys[j + 1..] {
        if !v.is_finite() || v > y {
            break;
        }
        right_min = right_min.min(v);
    }
    y - left_min.max(right_min)
}

/// (FWHM, hit an edge or gap, number of points above half height).
fn half_width(xs: &[f64], ys: &[f64], i: usize, j: usize, y: f64) -> (f64, bool, usize) {
    let half = 0.5 * y;
    let mut edge = false;
    let mut above = j - i + 1;
    let mut l = i;
    let left = loop {
        if l == 0 || !ys[l - 1].is_finite() {
            edge = true;
            break xs[l];
        }
        if ys[l - 1] <= half {
            let (x0, y0, x1, y1) = (xs[l - 1], ys[l - 1], xs[l], ys[l]);
            break x0 + (half - y0) * (x1 - x0) / (y1 - y0);
        }
        l -= 1;
        above += 1;
    };
    let mut r = j;
    let right = loop {
        if r + 1 >= ys.len() || !ys[r + 1].is_finite() {
            edge = true;
            break xs[r];
        }
        if ys[r + 1] <= half {
            let (x0, y0, x1, y1) = (xs[r], ys[r], xs[r + 1], ys[r + 1]);
            break x0 + (y0 - half) * (x1 - x0) / (y0 - y1);
        }
        r += 1;
        above += 1;
    };
    (right - left, edge, above)
}

/// Golden-section maximisation of `f` on [a, b]; returns (x, f(x)).
pub fn golden_max<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, xtol: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Crossing of `level` between `inside` (value above) and `outside`
/// (value at or below), by bisection down to `xtol` and a final linear
/// interpolation across the last bracket.
fn crossing<F: Fn(f64) -> Result<f64>>(f: &F, mut inside: f64, mut outside: f64, level: f64, xtol: f64) -> Result<f64> {
    let mut fi = f(inside)?;
    let mut fo = f(outside)?;
    for _ in 0..200 {
        if (inside - outside).abs() <= xtol {
            break;
        }
        let m = 0.5 * (inside + outside);
        let fm = f(m)?;
        if fm > level {
            inside = m;
            fi = fm;
        } else {
            outside = m;
            fo = fm;
        }
    }
    if fi == fo {
        return Ok(0.5 * (inside + outside));
    }
    Ok(inside + (fi - level) * (outside - inside) / (fi - fo))
}

/// Re-solves around a peak from a coarse scan: golden-section search for
/// the maximum between the neighbouring grid points, then half-height
/// crossings by bisection against the nearest grid points below half.
pub fn refine_peak<F: Fn(f64) -> Result<f64>>(f: &F, xs: &[f64], ys: &[f64], peak: &Peak) -> Result<Peak> {
    let n = xs.len();
    let k = peak.index;
    let lo = xs[k.saturating_sub(1)];
    let hi = xs[(k + 1).min(n - 1)];
    let scale = (hi - lo).abs().max(f64::MIN_POSITIVE);
    let (mut center, mut height) = golden_max(f, lo, hi, 1e-9 * scale)?;
    if ys[k] > height {
        center = xs[k];
        height = ys[k];
    }
    let half = 0.5 * height;
    let mut edge = false;
    let left_out = (0..k).rev().find(|&j| ys[j].is_finite() && ys[j] <= half);
    let right_out = (k + 1..n).find(|&j| ys[j].is_finite() && ys[j] <= half);
    let xtol = 1e-9 * scale;
    let left = match left_out {
        Some(j) => crossing(f, center, xs[j], half, xtol)?,
        None => {
            edge = true;
            xs[0]
        }
    };
    let right = match right_out {
        Some(j) => crossing(f, center, xs[j], half, xtol)?,
        None => {
            edge = true;
            xs[n - 1]
        }
    };
    Ok(Peak { index: k, center, height, fwhm: right - left, prominence: peak.prominence, edge_truncated: edge, under_resolved: false })
}

/// |P(h_E, -delta) - P(h_E + delta, delta)| for the parameters in `dp`.
pub fn symmetry_residual(dp: &DimensionlessParams, mode: &ModeProfile, solver: SolverChoice, tol: f64) -> Result<f64> {
    if dp.delta == 0.0 {
        return Ok(0.0);
    }
    let a = DimensionlessParams { delta: -dp.delta, ..*dp };
    let b = DimensionlessParams { h_e: dp.h_e + dp.delta, ..*dp };
    Ok((p_em(&a, mode, solver, tol)? - p_em(&b, mode, solver, tol)?).abs())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShiftReport {
    /// (base center, shifted center, shift)
    pub pairs: Vec<(f64, f64, f64)>,
    pub unmatched_base: Vec<f64>,
    pub unmatched_shifted: Vec<f64>,
}

impl ShiftReport {
    pub fn shifts(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.2).collect()
    }
}

/// One-to-one nearest-centre matching: pairs are taken in order of
/// increasing distance, ties broken by position.
pub fn match_peaks(base: &[f64], shifted: &[f64], max_dist: f64) -> ShiftReport {
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for (i, b) in base.iter().enumerate() {
        for (j, s) in shifted.iter().enumerate() {
            let d = (s - b).abs();
            if d <= max_dist {
                cand.push((d, i, j));
            }
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_b = vec![false; base.len()];
    let mut used_s = vec![false; shifted.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in cand {
        if !used_b[i] && !used_s[j] {
            used_b[i] = true;
            used_s[j] = true;
            pairs.push((base[i], shifted[j], shifted[j] - base[i]));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    ShiftReport {
        pairs,
        unmatched_base: base.iter().zip(&used_b).filter(|(_, u)| !**u).map(|(x, _)| *x).collect(),
        unmatched_shifted: shifted.iter().zip(&used_s).filter(|(_, u)| !**u).map(|(x, _)| *x).collect(),
    }
}

/// Refined peak centres of P_em(h_E) for the mesa mode.
pub fn mesa_peak_centers(fixed: &DimensionlessParams, h_e_grid: &[f64], min_height: f64) -> Result<Vec<f64>> {
    let f = mesa_curve(fixed, SweepVar::HE);
    let ys: Vec<f64> = h_e_grid.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    find_peaks(h_e_grid, &ys, min_height, 0.0)
        .peaks
        .iter()
        .filter(|p| !p.edge_truncated)
        .map(|p| Ok(refine_peak(&f, h_e_grid, &ys, p)?.center))
        .collect()
}

/// Matched displacement in h_E of the resonances at detuning `delta`
/// relative to the resonant case.
pub fn peak_shift_check(h_int: f64, n: u32, delta: f64, l: f64, h_e_grid: &[f64], min_height: f64) -> Result<ShiftReport> {
    let base = DimensionlessParams::with_h_int(0.0, h_int, 0.0, l, n);
    let c0 = mesa_peak_centers(&base, h_e_grid, min_height)?;
    if delta == 0.0 {
        return Ok(match_peaks(&c0, &c0, 0.0));
    }
    let c1 = mesa_peak_centers(&DimensionlessParams { delta, ..base }, h_e_grid, min_height)?;
    let spacing = c0.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    Ok(match_peaks(&c0, &c1, (0.5 * spacing).max(delta.abs())))
}

/// Closed-form resonance amplitude
/// (4/pi^2) |U(-h_E) D'(delta - h_E) - D(delta - h_E) U'(-h_E)|^-2.
pub fn amplitude_approx(h_e: f64, delta: f64) -> Result<f64> {
    let a = wave_eval(-h_e)?;
    let b = wave_eval(delta - h_e)?;
    let w: Complex64 = a.u * b.dp - b.d * a.up;
    Ok(4.0 / (PI * PI) / w.norm_sqr())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    /// Height of the tallest refined resonance.
    pub amplitude: f64,
    pub at_l: f64,
    pub scan: (f64, f64),
    /// Peaks of the resonance family (prominence >= `family_prominence`),
    /// widths refined where under-resolved.
    pub family: Vec<Peak>,
}

impl Envelope {
    pub fn median_fwhm(&self) -> Option<f64> {
        let mut w: Vec<f64> = self.family.iter().filter(|p| !p.edge_truncated).map(|p| p.fwhm).collect();
        if w.is_empty() {
            return None;
        }
        w.sort_by(f64::total_cmp);
        let m = w.len() / 2;
        Some(if w.len() % 2 == 1 { w[m] } else { 0.5 * (w[m - 1] + w[m]) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeOptions {
    pub points: usize,
    /// How many of the tallest scan maxima are refined for the amplitude.
    pub refine_top: usize,
    pub family_prominence: f64,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        Self { points: 20001, refine_top: 5, family_prominence: 0.05 }
    }
}

/// Resonance amplitude by scanning the cavity length over
/// [g/4, 4g] with g = h_E + h+ and refining the tallest maxima.
pub fn l_scan_envelope(h_e: f64, h_int: f64, n: u32, delta: f64, opt: &EnvelopeOptions) -> Result<Envelope> {
    let fixed = DimensionlessParams::with_h_int(h_e, h_int, delta, 0.0, n);
    let g = h_e + dressed_frame(&fixed)?.h_plus;
    if !(g > 0.0) {
        return Err(MazerError::Invalid(format!("h_E + h+ = {g} leaves no length to scan")));
    }
    let xs = linspace(0.25 * g, 4.0 * g, opt.points);
    let f = mesa_curve(&fixed, SweepVar::L);
    let ys: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let all = find_peaks(&xs, &ys, 0.0, 0.0);
    let mut order: Vec<&Peak> = all.peaks.iter().collect();
    order.sort_by(|a, b| b.height.total_cmp(&a.height));
    let mut best = (0.0, xs[0]);
    for p in order.iter().take(opt.refine_top) {
        let r = refine_peak(&f, &xs, &ys, p)?;
        if r.height > best.0 {
            best = (r.height, r.center);
        }
    }
    let family: Vec<Peak> = find_peaks(&xs, &ys, 0.0, opt.family_prominence)
        .peaks
        .par_iter()
        .map(|p| if p.under_resolved { refine_peak(&f, &xs, &ys, p) } else { Ok(*p) })
        .collect::<Result<_>>()?;
    Ok(Envelope { amplitude: best.0, at_l: best.1, scan: (xs[0], xs[xs.len() - 1]), family })
}

/// Tallest peak of `f` on [lo, hi], resolved by repeated local rescans
/// until at least `MIN_POINTS_ABOVE_HALF` points sit above half height,
/// then refined.
pub fn tallest_peak<F>(f: &F, lo: f64, hi: f64, points: usize, max_zooms: usize) -> Result<Peak>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let (mut a, mut b) = (lo, hi);
    for _ in 0..=max_zooms {
        let xs = linspace(a, b, points);
        let ys: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
        let Some(p) = find_peaks(&xs, &ys, 0.0, 0.0).tallest().copied() else {
            return Err(MazerError::Invalid(format!("no peak in [{a}, {b}]")));
        };
        if !p.under_resolved && !p.edge_truncated {
            return refine_peak(f, &xs, &ys, &p);
        }
        let r = refine_peak(f, &xs, &ys, &p)?;
        let w = if r.fwhm > 0.0 && !r.edge_truncated { r.fwhm } else { xs[1] - xs[0] };
        a = (r.center - 4.0 * w).max(lo);
        b = (r.center + 4.0 * w).min(hi);
    }
    Err(MazerError::Invalid("peak still under-resolved after zooming".into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Saturation {
    /// Smallest scanned L beyond which P_em varies by less than the threshold.
    pub l_sat: f64,
    pub h_e_plus_h_plus: f64,
    pub plateau: f64,
}

/// Saturation length from a uniform L scan on [0, l_max] (mesa mode).
pub fn saturation_length(dp: &DimensionlessParams, l_max: f64, points: usize, variation: f64) -> Result<Saturation> {
    let xs = linspace(0.0, l_max, points);
    let f = mesa_curve(dp, SweepVar::L);
    let ys: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let k = flat_tail_start(&ys, variation);
    // demand a plateau covering at least a tenth of the scan
    if k * 10 > 9 * points {
        return Err(MazerError::NoSaturation { from: 0.0, to: l_max });
    }
    let h_plus = dressed_frame(dp).map(|f| f.h_plus).unwrap_or(0.0);
    Ok(Saturation { l_sat: xs[k], h_e_plus_h_plus: dp.h_e + h_plus, plateau: ys[ys.len() - 1] })
}

/// First index from which max - min of the remaining values stays below `variation`.
pub fn flat_tail_start(ys: &[f64], variation: f64) -> usize {
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut k = ys.len();
    for i in (0..ys.len()).rev() {
        hi = hi.max(ys[i]);
        lo = lo.min(ys[i]);
        if hi - lo >= variation {
            break;
        }
        k = i;
    }
    k
}
