//! General mode profiles: superposition of five numerically integrated
//! basis solutions matched at an interior point.
//!
//! * phi1, phi2 start at z_max with Ai data in channel a or b (outgoing
//!   upward, decaying above the support);
//! * phi3, phi4, phi5 start at z_min with U in a, D in a, D in b.
//!
//! At z0 the amplitudes solve
//! phi3 + d_a phi4 + d_b phi5 = a_a phi1 + a_b phi2
//! for values and slopes of both channels.
//!
//! Across a strongly forbidden cavity each pair of basis solutions collapses
//! onto the dominant growing one, so each side is integrated in short
//! segments and the pair is re-orthonormalised between them (the incoming
//! solution is kept orthogonal to the pair). The coefficients are mapped
//! back through the stored triangular factors.

use num_complex::Complex64;

use crate::airy::{airy_scaled, wave_scaled};
use crate::error::{MazerError, Result};
use crate::linalg::{solve_checked, Matrix, Scaled, COND_THRESHOLD};
use crate::model::{DimensionlessParams, ModeProfile};
use crate::ode;
use crate::scattering::{InteriorSample, ScatteringSolution, Solver};

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub phi_a: Complex64,
    pub dphi_a: Complex64,
    pub phi_b: Complex64,
    pub dphi_b: Complex64,
}

impl StateVector {
    pub const ZERO: Self = Self {
        phi_a: Complex64::new(0.0, 0.0),
        dphi_a: Complex64::new(0.0, 0.0),
        phi_b: Complex64::new(0.0, 0.0),
        dphi_b: Complex64::new(0.0, 0.0),
    };

    pub fn to_array(&self) -> [Complex64; 4] {
        [self.phi_a, self.dphi_a, self.phi_b, self.dphi_b]
    }

    pub fn from_array(v: [Complex64; 4]) -> Self {
        Self { phi_a: v[0], dphi_a: v[1], phi_b: v[2], dphi_b: v[3] }
    }

    fn to_real(self) -> [f64; 8] {
        let v = self.to_array();
        [v[0].re, v[0].im, v[1].re, v[1].im, v[2].re, v[2].im, v[3].re, v[3].im]
    }

    fn from_real(r: &[f64; 8]) -> Self {
        let c = |i: usize| Complex64::new(r[2 * i], r[2 * i + 1]);
        Self::from_array([c(0), c(1), c(2), c(3)])
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::from_array(self.to_array().map(|v| v * k))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = (self.to_array(), o.to_array());
        Self::from_array([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
    }

    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvpOptions {
    pub tol: f64,
    /// Matching point as a fraction of the support.
    pub match_frac: f64,
    /// Number of uniform interior samples to record (0 for none).
    pub samples: usize,
    pub cond_threshold: f64,
}

impl Default for BvpOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, match_frac: 0.5, samples: 0, cond_threshold: COND_THRESHOLD }
    }
}

/// Integrates the coupled equations from `from` to each point of `outputs`.
pub fn integrate_system(
    dp: &DimensionlessParams,
    mode: &ModeProfile,
    from: f64,
    initial: StateVector,
    outputs: &[f64],
    tol: f64,
) -> Result<Vec<StateVector>> {
    if !(1e-13..=1e-6).contains(&tol) {
        return Err(MazerError::Invalid(format!("tolerance {tol:e} outside [1e-13, 1e-6]")));
    }
    let (lo, hi) = (mode.z_min, mode.z_max);
    if [from].iter().chain(outputs).any(|&z| z < lo - 1e-12 || z > hi + 1e-12) {
        return Err(MazerError::Invalid(format!("integration range leaves the mode support [{lo}, {hi}]")));
    }
    let (h_e, h_int, delta) = (dp.h_e, dp.h_int, dp.delta);
    let rhs = |z: f64, y: &[f64; 8], d: &mut [f64; 8]| {
        let w = h_int * mode.u(z);
        let pa = z - h_e;
        let pb = z - h_e + delta;
        d[0] = y[2];
        d[1] = y[3];
        d[2] = pa * y[0] + w * y[4];
        d[3] = pa * y[1] + w * y[5];
        d[4] = y[6];
        d[5] = y[7];
        d[6] = pb * y[4] + w * y[0];
        d[7] = pb * y[5] + w * y[1];
    };
    let (ys, _) = ode::integrate(rhs, from, initial.to_real(), outputs, tol)?;
    Ok(ys.iter().map(StateVector::from_real).collect())
}

/// Unit-norm boundary data of the five basis solutions together with the
/// log of the factor removed: basis_k = e^{log_k} * state_k.
pub fn basis_boundary(dp: &DimensionlessParams, mode: &ModeProfile) -> Result<[(StateVector, f64); 5]> {
    let zero = Complex64::new(0.0, 0.0);
    let c = |x: f64| Complex64::new(x, 0.0);
    let top_a = airy_scaled(mode.z_max - dp.h_e)?;
    let top_b = airy_scaled(mode.z_max - dp.h_e + dp.delta)?;
    let bot_a = wave_scaled(mode.z_min - dp.h_e)?;
    let bot_b = wave_scaled(mode.z_min - dp.h_e + dp.delta)?;
    let raw = [
        (StateVector { phi_a: c(top_a.ai), dphi_a: c(top_a.aip), phi_b: zero, dphi_b: zero }, -top_a.xi),
        (StateVector { phi_a: zero, dphi_a: zero, phi_b: c(top_b.ai), dphi_b: c(top_b.aip) }, -top_b.xi),
        (StateVector { phi_a: bot_a.wave.u, dphi_a: bot_a.wave.up, phi_b: zero, dphi_b: zero }, bot_a.xi),
        (StateVector { phi_a: bot_a.wave.d, dphi_a: bot_a.wave.dp, phi_b: zero, dphi_b: zero }, bot_a.xi),
        (StateVector { phi_a: zero, dphi_a: zero, phi_b: bot_b.wave.d, dphi_b: bot_b.wave.dp }, bot_b.xi),
    ];
    Ok(raw.map(|(s, lg)| {
        let n = s.norm();
        (s.scale(c(1.0 / n)), lg + n.ln())
    }))
}

pub fn solve_general(dp: &DimensionlessParams, mode: &ModeProfile, tol: f64) -> Result<ScatteringSolution> {
    solve_general_with(dp, mode, &BvpOptions { tol, ..BvpOptions::default() })
}

pub fn solve_general_with(dp: &DimensionlessParams, mode: &ModeProfile, opt: &BvpOptions) -> Result<ScatteringSolution> {
    dp.validate()?;
    let (lo, hi) = (mode.z_min, mode.z_max);
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(MazerError::Invalid(format!("mode support [{lo}, {hi}] must be a finite interval")));
    }
    if !(0.0..=1.0).contains(&opt.match_frac) {
        return Err(MazerError::Invalid("matching fraction must lie in [0, 1]".into()));
    }
    let z0 = lo + opt.match_frac * (hi - lo);
    let grid: Vec<f64> = if opt.samples >= 2 {
        (0..opt.samples).map(|i| if i == opt.samples - 1 { hi } else { lo + (hi - lo) * i as f64 / (opt.samples - 1) as f64 }).collect()
    } else {
        Vec::new()
    };
    let data = basis_boundary(dp, mode)?;

    // rough bound on the local decay constant, to keep growth per segment near e^3
    let reach = (lo - dp.h_e).abs().max((hi - dp.h_e).abs()) + dp.delta.abs() + dp.h_int.abs() + 1.0;
    let kappa = reach.sqrt();
    let cuts = |from: f64, to: f64| -> Vec<f64> {
        let n = (((to - from).abs() * kappa / SEGMENT_GROWTH).ceil() as usize).max(1);
        (1..=n).map(|i| if i == n { to } else { from + (to - from) * i as f64 / n as f64 }).collect()
    };

    let below: Vec<usize> = (0..grid.len()).filter(|&i| grid[i] <= z0).collect();
    let above: Vec<usize> = (0..grid.len()).rev().filter(|&i| grid[i] > z0).collect();
    let bottom = sweep(dp, mode, lo, &cuts(lo, z0), Some(data[2].0), [data[3].0, data[4].0], &grid, &below, opt.tol)?;
    let top = sweep(dp, mode, hi, &cuts(hi, z0), None, [data[0].0, data[1].0], &grid, &above, opt.tol)?;

    // p_b + W_b c_b = W_t c_t at z0, in units of the bottom scale
    let (pb, wb, wt) = (bottom.p_end, bottom.w_end, top.w_end);
    let mut m = Matrix::zeros(4);
    let mut rhs = pb.to_array();
    for r in 0..4 {
        m.set(r, 0, wt[0].to_array()[r]);
        m.set(r, 1, wt[1].to_array()[r]);
        m.set(r, 2, -wb[0].to_array()[r]);
        m.set(r, 3, -wb[1].to_array()[r]);
    }
    // rows of the slope and value entries can differ in size: equilibrate
    for (r, b) in rhs.iter_mut().enumerate() {
        let row = (0..4).map(|j| m.get(r, j).norm()).fold(0.0, f64::max);
        if row > 0.0 {
            for j in 0..4 {
                let v = m.get(r, j) / row;
                m.set(r, j, v);
            }
            *b /= row;
        }
    }
    let (x, cond) = solve_checked(&m, &rhs, opt.cond_threshold)?;

    let cb = bottom.unwind([x[2], x[3]]);
    let ct = top.unwind([x[0], x[1]]);
    let log3 = data[2].1;
    let (log_t0, c_t0) = (log3 + bottom.log_end + ct[0].0, ct[0].1);
    let a_a = Scaled { mantissa: c_t0[0], log_scale: log_t0 - data[0].1 };
    let a_b = Scaled { mantissa: c_t0[1], log_scale: log_t0 - data[1].1 };
    let d_a = Scaled { mantissa: cb[0].1[0], log_scale: log3 + cb[0].0 - data[3].1 };
    let d_b = Scaled { mantissa: cb[0].1[1], log_scale: log3 + cb[0].0 - data[4].1 };

    let interior = if grid.is_empty() {
        None
    } else {
        let mut out: Vec<InteriorSample> = grid.iter().map(|&z| InteriorSample { z, phi_a: Complex64::new(0.0, 0.0), phi_b: Complex64::new(0.0, 0.0) }).collect();
        for smp in &bottom.samples {
            let (lg, c) = cb[smp.segment];
            let v = smp.p.unwrap().add(&smp.w[0].scale(c[0])).add(&smp.w[1].scale(c[1]));
            let s = rescale(v, log3 + lg);
            out[smp.index].phi_a = s.phi_a;
            out[smp.index].phi_b = s.phi_b;
        }
        for smp in &top.samples {
            let (lg, c) = ct[smp.segment];
            let v = smp.w[0].scale(c[0]).add(&smp.w[1].scale(c[1]));
            let s = rescale(v, log3 + bottom.log_end + lg);
            out[smp.index].phi_a = s.phi_a;
            out[smp.index].phi_b = s.phi_b;
        }
        Some(out)
    };

    Ok(ScatteringSolution {
        a_up_a: a_a,
        a_up_b: a_b,
        d_a: d_a.value(),
        d_b: d_b.value(),
        params: *dp,
        mode: mode.kind.name(),
        solver: Solver::Bvp,
        support: (lo, hi),
        condition: cond,
        interior,
    })
}

/// Target growth of the dominant solution over one segment (as a log).
const SEGMENT_GROWTH: f64 = 3.0;

fn dot(a: &StateVector, b: &StateVector) -> Complex64 {
    a.to_array().iter().zip(b.to_array()).map(|(x, y)| x.conj() * y).sum()
}

/// Two-column Gram-Schmidt (applied twice): w = q r with r upper triangular.
fn qr2(w: [StateVector; 2]) -> Result<([StateVector; 2], [[Complex64; 2]; 2])> {
    let zero = Complex64::new(0.0, 0.0);
    let r11 = w[0].norm();
    if !(r11 > 0.0) || !r11.is_finite() {
        return Err(MazerError::Integration { z: f64::NAN, reason: "basis solution vanished".into() });
    }
    let q1 = w[0].scale(Complex64::new(1.0 / r11, 0.0));
    let mut r12 = zero;
    let mut v = w[1];
    for _ in 0..2 {
        let c = dot(&q1, &v);
        r12 += c;
        v = v.add(&q1.scale(-c));
    }
    let r22 = v.norm();
    if !(r22 > 0.0) || !r22.is_finite() {
        return Err(MazerError::Integration { z: f64::NAN, reason: "basis solutions became dependent".into() });
    }
    let q2 = v.scale(Complex64::new(1.0 / r22, 0.0));
    Ok(([q1, q2], [[Complex64::new(r11, 0.0), r12], [zero, Complex64::new(r22, 0.0)]]))
}

fn rescale(v: StateVector, log: f64) -> StateVector {
    let n = v.norm();
    if n == 0.0 {
        return v;
    }
    v.scale(Complex64::new((log + n.ln()).exp() / n, 0.0))
}

struct Sample {
    index: usize,
    segment: usize,
    p: Option<StateVector>,
    w: [StateVector; 2],
}

struct Transition {
    r: [[Complex64; 2]; 2],
    g: [Complex64; 2],
    nu: f64,
}

/// One side of the support integrated segment by segment. Within segment s
/// the solution is e^{log_s} (p_s + W_s c_s); between segments W is
/// re-orthonormalised and its component removed from p.
struct Side {
    samples: Vec<Sample>,
    transitions: Vec<Transition>,
    p_end: StateVector,
    w_end: [StateVector; 2],
    /// log of the accumulated normalisation of p.
    log_end: f64,
    particular: bool,
}

impl Side {
    /// Coefficients of every segment (with their log offsets relative to
    /// the starting scale) from those after the last transition.
    fn unwind(&self, last: [Complex64; 2]) -> Vec<(f64, [Complex64; 2])> {
        let n = self.transitions.len();
        let mut out = vec![(0.0, [Complex64::new(0.0, 0.0); 2]); n + 1];
        let mut log = self.log_end;
        let mut c = last;
        out[n] = (log, c);
        for s in (0..n).rev() {
            let t = &self.transitions[s];
            log -= t.nu.ln();
            let v = [c[0] * t.nu - t.g[0], c[1] * t.nu - t.g[1]];
            let c1 = v[1] / t.r[1][1];
            let c0 = (v[0] - t.r[0][1] * c1) / t.r[0][0];
            c = [c0, c1];
            // without an incoming part the solution is homogeneous in c,
            // so the mantissa can be kept near unit size
            let n = (c[0].norm_sqr() + c[1].norm_sqr()).sqrt();
            if !self.particular && n > 0.0 && n.is_finite() {
                c = [c[0] / n, c[1] / n];
                log += n.ln();
            }
            out[s] = (log, c);
        }
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    dp: &DimensionlessParams,
    mode: &ModeProfile,
    from: f64,
    cuts: &[f64],
    p0: Option<StateVector>,
    w0: [StateVector; 2],
    grid: &[f64],
    order: &[usize],
    tol: f64,
) -> Result<Side> {
    let mut p = p0;
    let mut w = w0;
    let mut log = 0.0;
    let mut start = from;
    let mut next = 0;
    let mut samples = Vec::new();
    let mut transitions = Vec::new();
    let dir = if cuts.last().copied().unwrap_or(from) >= from { 1.0 } else { -1.0 };
    for (s, &end) in cuts.iter().enumerate() {
        let first = next;
        while next < order.len() && dir * (grid[order[next]] - end) <= 0.0 {
            next += 1;
        }
        let mut outputs: Vec<f64> = order[first..next].iter().map(|&i| grid[i]).collect();
        outputs.push(end);
        let run = |v: StateVector| integrate_system(dp, mode, start, v, &outputs, tol);
        let tw = [run(w[0])?, run(w[1])?];
        let tp = match p {
            Some(v) => Some(run(v)?),
            None => None,
        };
        for (k, &i) in order[first..next].iter().enumerate() {
            samples.push(Sample { index: i, segment: s, p: tp.as_ref().map(|t| t[k]), w: [tw[0][k], tw[1][k]] });
        }
        let k = outputs.len() - 1;
        let (q, r) = qr2([tw[0][k], tw[1][k]])?;
        let (g, nu, p_new) = match &tp {
            Some(t) => {
                let pe = t[k];
                let g = [dot(&q[0], &pe), dot(&q[1], &pe)];
                let rest = pe.add(&q[0].scale(-g[0])).add(&q[1].scale(-g[1]));
                let nu = rest.norm();
                if !(nu > 0.0) || !nu.is_finite() {
                    return Err(MazerError::Integration { z: end, reason: "incoming solution fell into the homogeneous span".into() });
                }
                (g, nu, Some(rest.scale(Complex64::new(1.0 / nu, 0.0))))
            }
            None => ([Complex64::new(0.0, 0.0); 2], 1.0, None),
        };
        log += nu.ln();
        transitions.push(Transition { r, g, nu });
        p = p_new;
        w = q;
        start = end;
    }
    Ok(Side { samples, transitions, p_end: p.unwrap_or(StateVector::ZERO), w_end: w, log_end: log, particular: p0.is_some() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airy::airy_eval;
    use crate::mesa::solve_mesa;

    fn dp(h_e: f64, h_int: f64, delta: f64, l: f64) -> DimensionlessParams {
        DimensionlessParams::with_h_int(h_e, h_int, delta, l, 0)
    }

    #[test]
    fn free_segment_propagates_airy() {
        // sampled mode that vanishes identically: plain free fall
        let mode = ModeProfile::sampled(vec![(0.0, 0.0), (5.0, 0.0)]).unwrap();
        let p = dp(1.3, 4.0, 0.7, 5.0);
        let c = |x: f64| Complex64::new(x, 0.0);
        let top = airy_eval(5.0 - p.h_e).unwrap();
        let init = StateVector { phi_a: c(top.ai), dphi_a: c(top.aip), phi_b: c(0.0), dphi_b: c(0.0) };
        let s = integrate_system(&p, &mode, 5.0, init, &[0.0], 1e-12).unwrap()[0];
        let bot = airy_eval(-p.h_e).unwrap();
        assert!((s.phi_a.re / bot.ai - 1.0).abs() < 1e-9);
        assert!((s.dphi_a.re / bot.aip - 1.0).abs() < 1e-9);

        let top = airy_eval(5.0 - p.h_e + p.delta).unwrap();
        let init = StateVector { phi_a: c(0.0), dphi_a: c(0.0), phi_b: c(top.ai), dphi_b: c(top.aip) };
        let s = integrate_system(&p, &mode, 5.0, init, &[0.0], 1e-12).unwrap()[0];
        let bot = airy_eval(-p.h_e + p.delta).unwrap();
        assert!((s.phi_b.re / bot.ai - 1.0).abs() < 1e-9);
        assert!(s.phi_a.norm() == 0.0);
    }

    #[test]
    fn zero_initial_state() {
        let mode = ModeProfile::sine(3.0).unwrap();
        let s = integrate_system(&dp(0.0, 2.0, 0.0, 3.0), &mode, 0.0, StateVector::ZERO, &[3.0], 1e-10).unwrap();
        assert_eq!(s[0], StateVector::ZERO);
    }

    #[test]
    fn linearity() {
        let mode = ModeProfile::sine(6.0).unwrap();
        let p = dp(0.5, 3.0, -0.4, 6.0);
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let init = StateVector { phi_a: c(0.3, 0.1), dphi_a: c(-1.0, 0.2), phi_b: c(0.0, 0.5), dphi_b: c(0.7, 0.0) };
        let alpha = c(-2.5, 1.75);
        let a = integrate_system(&p, &mode, 0.0, init, &[6.0], 1e-12).unwrap()[0];
        let b = integrate_system(&p, &mode, 0.0, init.scale(alpha), &[6.0], 1e-12).unwrap()[0];
        let d = a.scale(alpha);
        for (x, y) in d.to_array().iter().zip(b.to_array()) {
            assert!((x - y).norm() <= 1e-12 * d.norm());
        }
    }

    #[test]
    fn tolerance_bounds() {
        let mode = ModeProfile::mesa(1.0).unwrap();
        let p = dp(0.0, 1.0, 0.0, 1.0);
        assert!(integrate_system(&p, &mode, 0.0, StateVector::ZERO, &[1.0], 1e-5).is_err());
        assert!(integrate_system(&p, &mode, 0.0, StateVector::ZERO, &[2.0], 1e-10).is_err());
    }

    #[test]
    fn agrees_with_mesa() {
        for &(h_e, h_int, delta, l) in &[(-1.90991, 10.0, -1.0, 10.0), (1.0, 2.0, 0.5, 3.0), (4.0, 1.0, -2.0, 8.0)] {
            let p = dp(h_e, h_int, delta, l);
            let b = solve_general(&p, &ModeProfile::mesa(l).unwrap(), 1e-12).unwrap();
            let m = solve_mesa(&p).unwrap();
            assert!((b.p_em() - m.p_em()).abs() < 1e-7, "{h_e}: {} vs {}", b.p_em(), m.p_em());
            assert!(b.unitarity_defect().abs() < 1e-6);
            assert!((b.d_b - m.solution.d_b).norm() < 1e-6);
        }
    }

    #[test]
    fn strongly_forbidden_cavity() {
        // the upper dressed channel decays by ~e^-200 across the cavity
        for &(h_e, h_int, delta, l) in &[(4.5653, 87.427, -0.69525, 23.489), (-0.50159, 27.219, 4.8646, 23.911), (-3.0, 100.0, 2.0, 30.0)] {
            let p = dp(h_e, h_int, delta, l);
            let b = solve_general(&p, &ModeProfile::mesa(l).unwrap(), 1e-10).unwrap();
            let m = solve_mesa(&p).unwrap();
            assert!((b.p_em() - m.p_em()).abs() < 1e-7, "{h_e}: {} vs {}", b.p_em(), m.p_em());
            assert!(b.unitarity_defect().abs() < 1e-8);
            assert!(b.condition < 1e6, "{}", b.condition);
        }
    }

    #[test]
    fn matching_point_independence() {
        let p = dp(-1.5, 10.0, 0.5, 10.0);
        let mode = ModeProfile::sine(10.0).unwrap();
        let get = |f: f64| {
            solve_general_with(&p, &mode, &BvpOptions { match_frac: f, tol: 1e-12, ..Default::default() }).unwrap().p_em()
        };
        let mid = get(0.5);
        assert!((get(0.25) - mid).abs() < 1e-7);
        assert!((get(0.75) - mid).abs() < 1e-7);
    }

    #[test]
    fn samples_match_closed_form_at_edges() {
        let p = dp(-1.90991, 10.0, -1.0, 10.0);
        let mode = ModeProfile::mesa(10.0).unwrap();
        let s = solve_general_with(&p, &mode, &BvpOptions { samples: 101, tol: 1e-12, ..Default::default() }).unwrap();
        let v = s.interior.as_ref().unwrap();
        assert_eq!(v.len(), 101);
        let m = solve_mesa(&p).unwrap();
        for smp in v {
            let (a, b) = crate::mesa::wavefunction(&m, smp.z).unwrap();
            assert!((a - smp.phi_a).norm() < 1e-6 * (1.0 + a.norm()), "z = {}", smp.z);
            assert!((b - smp.phi_b).norm() < 1e-6 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn overdetermined_check_off_match_point() {
        // integrate each side past the matching point and compare at z1
        let p = dp(-1.2, 6.0, 0.3, 6.0);
        let mode = ModeProfile::sine(6.0).unwrap();
        let sol = solve_general(&p, &mode, 1e-12).unwrap();
        let data = basis_boundary(&p, &mode).unwrap();
        let z1 = 1.7;
        let at = |k: usize| {
            let from = if k < 2 { mode.z_max } else { mode.z_min };
            let s = integrate_system(&p, &mode, from, data[k].0, &[z1], 1e-12).unwrap()[0];
            s.scale(Complex64::new(data[k].1.exp(), 0.0))
        };
        let right = at(0).scale(sol.a_up_a.value()).add(&at(1).scale(sol.a_up_b.value()));
        let left = at(2).add(&at(3).scale(sol.d_a)).add(&at(4).scale(sol.d_b));
        let diff = right.add(&left.scale(Complex64::new(-1.0, 0.0))).norm();
        assert!(diff < 1e-6 * left.norm(), "{diff}");
    }

    #[test]
    fn tolerance_convergence() {
        let p = dp(-1.0, 10.0, -1.0, 10.0);
        let mode = ModeProfile::sine(10.0).unwrap();
        let exact = solve_general(&p, &mode, 1e-13).unwrap().p_em();
        let mut prev = f64::INFINITY;
        for tol in [1e-7, 1e-9, 1e-11] {
            let e = (solve_general(&p, &mode, tol).unwrap().p_em() - exact).abs();
            assert!(e <= prev.max(1e-12), "tol {tol}: {e} after {prev}");
            prev = e;
        }
        assert!(prev < 1e-8);
    }
}
