//! Adaptive Dormand-Prince 8(5,3) integrator for small real systems.
//!
//! The local error is measured against the largest component of the state
//! (a norm-relative tolerance), which suits linear problems whose solution
//! grows or decays by many orders of magnitude.

use crate::dop853_tableau::{A, B, C, E3, E5};
use crate::error::{MazerError, Result};

const STAGES: usize = 12;
const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

fn max_abs<const N: usize>(y: &[f64; N]) -> f64 {
    y.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Integrates y' = f(t, y) from `t0` and returns the state at every point
/// of `outputs`, which must be monotone in the direction of integration.
/// Steps land exactly on each output point.
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    outputs: &[f64],
    rtol: f64,
) -> Result<(Vec<[f64; N]>, Stats)>
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    let mut stats = Stats::default();
    let Some(&t_end) = outputs.last() else {
        return Ok((Vec::new(), stats));
    };
    if !(rtol > 0.0) {
        return Err(MazerError::Invalid(format!("tolerance {rtol} must be positive")));
    }
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    if outputs.windows(2).any(|w| dir * (w[1] - w[0]) < 0.0) || dir * (outputs[0] - t0) < 0.0 {
        return Err(MazerError::Invalid("output points must follow the integration direction".into()));
    }
    if max_abs(&y0) == 0.0 {
        return Ok((vec![y0; outputs.len()], stats));
    }

    let mut out = Vec::with_capacity(outputs.len());
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; STAGES];
    let mut f0 = [0.0; N];
    f(t, &y, &mut f0);
    let mut h_abs = initial_step(&f, t, &y, &f0, dir, rtol, (t_end - t0).abs());
    let mut next = 0;

    while next < outputs.len() {
        let target = outputs[next];
        if t == target {
            out.push(y);
            next += 1;
            continue;
        }
        let min_step = 10.0 * (t.abs().max(1.0) * f64::EPSILON);
        let mut rejected = false;
        loop {
            if h_abs < min_step {
                return Err(MazerError::Integration { z: t, reason: format!("step size underflow (h = {h_abs:.3e})") });
            }
            let mut h = h_abs * dir;
            let mut t_new = t + h;
            let landing = dir * (t_new - target) >= 0.0;
            if landing {
                t_new = target;
                h = t_new - t;
            }
            k[0] = f0;
            for s in 1..STAGES {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += h * a * kj[i];
                        }
                    }
                }
                let mut ks = [0.0; N];
                f(t + C[s] * h, &ys, &mut ks);
                k[s] = ks;
            }
            let mut y_new = y;
            let mut e5 = [0.0; N];
            let mut e3 = [0.0; N];
            for (s, ks) in k.iter().enumerate() {
                for i in 0..N {
                    y_new[i] += h * B[s] * ks[i];
                    e5[i] += E5[s] * ks[i];
                    e3[i] += E3[s] * ks[i];
                }
            }
            if y_new.iter().any(|v| !v.is_finite()) {
                return Err(MazerError::Integration { z: t, reason: "state overflowed".into() });
            }
            let scale = rtol * max_abs(&y).max(max_abs(&y_new));
            let (mut n5, mut n3) = (0.0, 0.0);
            for i in 0..N {
                n5 += (e5[i] / scale).powi(2);
                n3 += (e3[i] / scale).powi(2);
            }
            let err = if n5 == 0.0 && n3 == 0.0 {
                0.0
            } else {
                h.abs() * n5 / (N as f64 * (n5 + 0.01 * n3)).sqrt()
            };
            if err < 1.0 {
                let mut factor = if err == 0.0 { MAX_FACTOR } else { MAX_FACTOR.min(SAFETY * err.powf(-0.125)) };
                if rejected {
                    factor = factor.min(1.0);
                }
                // a step shortened to land on an output says nothing about the next one
                if !landing || factor < 1.0 {
                    h_abs *= factor;
                }
                t = t_new;
                y = y_new;
                f(t, &y, &mut f0);
                stats.accepted += 1;
                break;
            }
            h_abs *= MIN_FACTOR.max(SAFETY * err.powf(-0.125));
            rejected = true;
            stats.rejected += 1;
        }
    }
    Ok((out, stats))
}

fn initial_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], f0: &[f64; N], dir: f64, rtol: f64, span: f64) -> f64
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    let scale = rtol * max_abs(y);
    let rms = |v: &[f64; N]| (v.iter().map(|x| (x / scale).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d0 = rms(y);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += h0 * dir * f0[i];
    }
    let mut f1 = [0.0; N];
    f(t + h0 * dir, &y1, &mut f1);
    let mut df = [0.0; N];
    for i in 0..N {
        df[i] = f1[i] - f0[i];
    }
    let d2 = rms(&df) / h0;
    let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 8.0)
    };
    (100.0 * h0).min(h1).min(span).max(1e-12 * span.max(1.0))
}
