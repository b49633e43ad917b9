//! Exact solution for the mesa mode (u = 1 on [0, L]).
//!
//! Inside the cavity the dressed states decouple and each one is a
//! combination of Ai and Bi shifted by its potential height h+ or h-.
//! Matching values and slopes of both components at z = 0 and z = L gives
//! an 8x8 complex system for
//! [a_a, a_b, d_a, d_b, A+, B+, A-, B-].
//!
//! Entries are kept as mantissa * e^{log} (scaled Airy functions) and each
//! column is normalised by its largest exponent before the solve, so the
//! Bi growth across a long cavity never overflows.

use num_complex::Complex64;

use crate::airy::{airy_scaled, wave_scaled};
use crate::error::Result;
use crate::linalg::{solve_checked, Matrix, Scaled, COND_THRESHOLD};
use crate::model::{DimensionlessParams, DressedFrame};
use crate::scattering::{InteriorSample, ScatteringSolution, Solver};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorCoefficients {
    pub a_plus: Scaled,
    pub b_plus: Scaled,
    pub a_minus: Scaled,
    pub b_minus: Scaled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MesaSolution {
    pub solution: ScatteringSolution,
    /// `None` without coupling or for an empty cavity (free fall).
    pub interior: Option<(DressedFrame, InteriorCoefficients)>,
}

impl MesaSolution {
    pub fn p_em(&self) -> f64 {
        self.solution.p_em()
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn solve_mesa(dp: &DimensionlessParams) -> Result<MesaSolution> {
    solve_mesa_with(dp, COND_THRESHOLD)
}

pub fn solve_mesa_with(dp: &DimensionlessParams, cond_threshold: f64) -> Result<MesaSolution> {
    dp.validate()?;
    if dp.h_int == 0.0 || dp.l == 0.0 {
        return Ok(free_fall(dp));
    }
    let frame = dp.dressed()?;
    let (st, ct) = frame.sin_cos();
    let mut m = vec![[(ZERO, f64::NEG_INFINITY); 8]; 8];
    let mut rhs = [ZERO; 8];
    let mut rhs_log = [0.0; 8];

    // dressed channel weights in (a, b)
    let channels = [(frame.h_plus, ct, st), (frame.h_minus, -st, ct)];
    for (zi, z) in [0.0, dp.l].into_iter().enumerate() {
        let r0 = 4 * zi;
        for (ch, &(h, wa, wb)) in channels.iter().enumerate() {
            let s = airy_scaled(z - dp.h_e + h)?;
            let (ca, cb) = (4 + 2 * ch, 5 + 2 * ch);
            m[r0][ca] = (c(-wa * s.ai), -s.xi);
            m[r0 + 1][ca] = (c(-wa * s.aip), -s.xi);
            m[r0 + 2][ca] = (c(-wb * s.ai), -s.xi);
            m[r0 + 3][ca] = (c(-wb * s.aip), -s.xi);
            m[r0][cb] = (c(-wa * s.bi), s.xi);
            m[r0 + 1][cb] = (c(-wa * s.bip), s.xi);
            m[r0 + 2][cb] = (c(-wb * s.bi), s.xi);
            m[r0 + 3][cb] = (c(-wb * s.bip), s.xi);
        }
    }
    let wa = wave_scaled(-dp.h_e)?;
    m[0][2] = (wa.wave.d, wa.xi);
    m[1][2] = (wa.wave.dp, wa.xi);
    rhs[0] = -wa.wave.u;
    rhs[1] = -wa.wave.up;
    rhs_log[0] = wa.xi;
    rhs_log[1] = wa.xi;
    let wb = wave_scaled(dp.delta - dp.h_e)?;
    m[2][3] = (wb.wave.d, wb.xi);
    m[3][3] = (wb.wave.dp, wb.xi);
    let top_a = airy_scaled(dp.l - dp.h_e)?;
    m[4][0] = (c(top_a.ai), -top_a.xi);
    m[5][0] = (c(top_a.aip), -top_a.xi);
    let top_b = airy_scaled(dp.l - dp.h_e + dp.delta)?;
    m[6][1] = (c(top_b.ai), -top_b.xi);
    m[7][1] = (c(top_b.aip), -top_b.xi);

    let col_log: Vec<f64> = (0..8)
        .map(|j| (0..8).filter(|&i| m[i][j].0 != ZERO).map(|i| m[i][j].1).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let mut a = Matrix::zeros(8);
    let mut b = [ZERO; 8];
    for i in 0..8 {
        let mut row = [ZERO; 8];
        for j in 0..8 {
            if m[i][j].0 != ZERO {
                row[j] = m[i][j].0 * (m[i][j].1 - col_log[j] - rhs_log[i]).exp();
            }
        }
        let scale = row.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for j in 0..8 {
            a.set(i, j, row[j] / scale);
        }
        b[i] = rhs[i] / scale;
    }
    let (y, cond) = solve_checked(&a, &b, cond_threshold)?;
    let amp = |k: usize| Scaled { mantissa: y[k], log_scale: -col_log[k] };

    let solution = ScatteringSolution {
        a_up_a: amp(0),
        a_up_b: amp(1),
        d_a: amp(2).value(),
        d_b: amp(3).value(),
        params: *dp,
        mode: "mesa",
        solver: Solver::Mesa,
        support: (0.0, dp.l),
        condition: cond,
        interior: None,
    };
    let coeffs = InteriorCoefficients { a_plus: amp(4), b_plus: amp(5), a_minus: amp(6), b_minus: amp(7) };
    Ok(MesaSolution { solution, interior: Some((frame, coeffs)) })
}

/// No coupling: the incident wave is reflected in channel a with
/// Ai = (U + D) / 2, so d_a = 1 and a_a = 2.
fn free_fall(dp: &DimensionlessParams) -> MesaSolution {
    MesaSolution {
        solution: ScatteringSolution {
            a_up_a: Scaled::new(c(2.0)),
            a_up_b: Scaled::new(ZERO),
            d_a: c(1.0),
            d_b: ZERO,
            params: *dp,
            mode: "mesa",
            solver: Solver::Mesa,
            support: (0.0, dp.l),
            condition: 1.0,
            interior: None,
        },
        interior: None,
    }
}

fn combo(a: &Scaled, b: &Scaled, ai: f64, bi: f64, xi: f64) -> Complex64 {
    a.mantissa * ai * (a.log_scale - xi).exp() + b.mantissa * bi * (b.log_scale + xi).exp()
}

/// (phi_a, phi_a', phi_b, phi_b') inside the cavity.
pub fn interior_state(sol: &MesaSolution, z: f64) -> Result<[Complex64; 4]> {
    let dp = &sol.solution.params;
    let Some((frame, k)) = &sol.interior else {
        let s = airy_scaled(z - dp.h_e)?;
        let e = (-s.xi).exp();
        return Ok([c(2.0 * s.ai * e), c(2.0 * s.aip * e), ZERO, ZERO]);
    };
    let (st, ct) = frame.sin_cos();
    let p = airy_scaled(z - dp.h_e + frame.h_plus)?;
    let q = airy_scaled(z - dp.h_e + frame.h_minus)?;
    let fp = combo(&k.a_plus, &k.b_plus, p.ai, p.bi, p.xi);
    let fpd = combo(&k.a_plus, &k.b_plus, p.aip, p.bip, p.xi);
    let fm = combo(&k.a_minus, &k.b_minus, q.ai, q.bi, q.xi);
    let fmd = combo(&k.a_minus, &k.b_minus, q.aip, q.bip, q.xi);
    Ok([ct * fp - st * fm, ct * fpd - st * fmd, st * fp + ct * fm, st * fpd + ct * fmd])
}

/// Samples (phi_a, phi_b) on a grid inside [0, L].
pub fn interior_wavefunction(sol: &MesaSolution, grid: &[f64]) -> Result<Vec<InteriorSample>> {
    let l = sol.solution.params.l;
    grid.iter()
        .map(|&z| {
            if !(0.0..=l).contains(&z) {
                return Err(crate::MazerError::Invalid(format!("z = {z} lies outside the cavity [0, {l}]")));
            }
            let s = interior_state(sol, z)?;
            Ok(InteriorSample { z, phi_a: s[0], phi_b: s[2] })
        })
        .collect()
}

/// (phi_a, phi_b) anywhere on the axis.
pub fn wavefunction(sol: &MesaSolution, z: f64) -> Result<(Complex64, Complex64)> {
    if let Some(v) = sol.solution.exterior(z)? {
        return Ok(v);
    }
    let s = interior_state(sol, z)?;
    Ok((s[0], s[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airy::{airy_eval, wave_eval};
    use crate::linalg::Lu;

    fn dp(h_e: f64, h_int: f64, delta: f64, l: f64) -> DimensionlessParams {
        DimensionlessParams::with_h_int(h_e, h_int, delta, l, 0)
    }

    #[test]
    fn resonance_point() {
        let p = solve_mesa(&dp(-1.90991, 10.0, -1.0, 10.0)).unwrap().p_em();
        assert!((p - 0.35).abs() < 0.05, "{p}");
        let p = solve_mesa(&dp(-2.2, 10.0, -1.0, 10.0)).unwrap().p_em();
        assert!(p < 0.01, "{p}");
    }

    #[test]
    fn no_coupling_reflects_fully() {
        let s = solve_mesa(&DimensionlessParams::new(0.5, 0.0, 0.3, 4.0, 0)).unwrap();
        assert_eq!(s.solution.d_b, ZERO);
        assert_eq!(s.solution.d_a.norm(), 1.0);
    }

    #[test]
    fn tiny_coupling_is_continuous_with_free_fall() {
        let s = solve_mesa(&dp(0.5, 1e-6, 0.3, 4.0)).unwrap();
        assert!(s.p_em() < 1e-10);
        assert!((s.solution.d_a - c(1.0)).norm() < 1e-5);
    }

    #[test]
    fn unitarity_sample() {
        for &(h_e, h_int, delta, l) in &[(1.0, 0.5, 0.3, 2.0), (3.0, 100.0, -4.0, 30.0), (-2.5, 100.0, 0.0, 150.0), (1000.0, 1.0, -0.2, 500.0)] {
            let s = solve_mesa(&dp(h_e, h_int, delta, l)).unwrap();
            assert!(s.solution.unitarity_defect().abs() < 1e-10, "{h_e} {h_int} {delta} {l}");
        }
    }

    /// Two independent one-channel barrier problems; valid only at delta = 0.
    fn decoupled(h_e: f64, h: f64, l: f64) -> (Complex64, Complex64) {
        let r = |shift: f64| {
            // unknowns r, alpha, beta, t for U + rD | alpha Ai + beta Bi | t Ai
            let w0 = wave_eval(-h_e).unwrap();
            let i0 = airy_eval(-h_e + shift).unwrap();
            let il = airy_eval(l - h_e + shift).unwrap();
            let top = airy_eval(l - h_e).unwrap();
            let mut m = Matrix::zeros(4);
            let rows = [
                [w0.d, c(-i0.ai), c(-i0.bi), ZERO],
                [w0.dp, c(-i0.aip), c(-i0.bip), ZERO],
                [ZERO, c(-il.ai), c(-il.bi), c(top.ai)],
                [ZERO, c(-il.aip), c(-il.bip), c(top.aip)],
            ];
            for (i, row) in rows.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    m.set(i, j, *v);
                }
            }
            Lu::new(&m).unwrap().solve(&[-w0.u, -w0.up, ZERO, ZERO])[0]
        };
        let (rp, rm) = (r(h), r(-h));
        ((rp + rm) / 2.0, (rp - rm) / 2.0)
    }

    #[test]
    fn resonant_case_matches_decoupled_channels() {
        for &(h_e, h, l) in &[(-1.5, 10.0, 10.0), (0.7, 3.0, 4.0), (2.0, 0.4, 6.0), (-0.3, 25.0, 3.0)] {
            let s = solve_mesa(&dp(h_e, h, 0.0, l)).unwrap();
            let (da, db) = decoupled(h_e, h, l);
            assert!((s.solution.d_a - da).norm() < 1e-8, "{h_e} {h} {l}");
            assert!((s.solution.d_b - db).norm() < 1e-8, "{h_e} {h} {l}");
        }
    }

    #[test]
    fn continuity_at_interfaces() {
        let s = solve_mesa(&dp(-1.90991, 10.0, -1.0, 10.0)).unwrap();
        for &z in &[0.0, 10.0] {
            let inside = interior_state(&s, z).unwrap();
            let e = 1e-12;
            let zo = if z == 0.0 { -e } else { z + e };
            let out = s.solution.exterior(zo).unwrap().unwrap();
            let scale = inside[0].norm().max(inside[2].norm());
            assert!((inside[0] - out.0).norm() < 1e-8 * scale);
            assert!((inside[2] - out.1).norm() < 1e-8 * scale);
        }
    }

    #[test]
    fn coupled_equations_residual() {
        let s = solve_mesa(&dp(-1.90991, 10.0, -1.0, 10.0)).unwrap();
        let p = s.solution.params;
        let h = 2e-4;
        let mut z = -3.0;
        while z < 13.0 {
            let u = if (0.0..=p.l).contains(&z) { 1.0 } else { 0.0 };
            if (z.abs() < 2.0 * h) || ((z - p.l).abs() < 2.0 * h) {
                z += 0.0371;
                continue;
            }
            let f = |x: f64| wavefunction(&s, x).unwrap();
            let (a0, b0) = f(z);
            let (am, bm) = f(z - h);
            let (ap, bp) = f(z + h);
            let d2a = (ap - 2.0 * a0 + am) / (h * h);
            let d2b = (bp - 2.0 * b0 + bm) / (h * h);
            let ra = d2a - (z - p.h_e) * a0 - p.h_int * u * b0;
            let rb = d2b - (z - p.h_e + p.delta) * b0 - p.h_int * u * a0;
            let mag = a0.norm().max(b0.norm()).max(1e-3);
            let scale = mag * (1.0 + (z - p.h_e).abs() + p.h_int);
            assert!(ra.norm() < 1e-6 * scale && rb.norm() < 1e-6 * scale, "z = {z}: {} {}", ra.norm(), rb.norm());
            z += 0.0371;
        }
    }

    #[test]
    fn interior_density_on_and_off_resonance() {
        let max_density = |h_e: f64| {
            let s = solve_mesa(&dp(h_e, 10.0, -1.0, 10.0)).unwrap();
            let grid: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
            interior_wavefunction(&s, &grid).unwrap().iter().map(|v| v.phi_a.norm_sqr()).fold(0.0, f64::max)
        };
        let on = max_density(-1.90991);
        let off = max_density(-2.2);
        assert!(on >= 1.0, "{on}");
        assert!(on >= 10.0 * off, "{on} vs {off}");
    }

    #[test]
    fn interior_grid_outside_is_rejected() {
        let s = solve_mesa(&dp(1.0, 1.0, 0.0, 2.0)).unwrap();
        assert!(interior_wavefunction(&s, &[2.5]).is_err());
    }
}
