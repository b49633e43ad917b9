//! Real-argument Airy functions and the travelling-wave combinations
//! U = Ai + iBi, D = Ai - iBi.
//!
//! On |z| < 9 the Airy equation y'' = zy is Taylor-expanded about the
//! nearest tabulated anchor (spacing 0.5, so every step is at most 0.25).
//! Outside that window the standard asymptotic expansions are summed until
//! their terms stop decreasing.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_PI, FRAC_1_SQRT_2};

use crate::airy_anchors::{ANCHORS, ANCHOR_START, ANCHOR_STEP};
use crate::error::{MazerError, Result};

/// Largest argument accepted by [`airy_eval`]; Bi(100) ~ 1e288.
pub const ZMAX_BI: f64 = 100.0;
/// Most negative argument accepted by all evaluators.
pub const ZMIN: f64 = -1.0e4;
/// Boundary between the Taylor region and the asymptotic expansions.
pub const Z_SWITCH: f64 = 9.0;

const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryPair {
    pub ai: f64,
    pub aip: f64,
    pub bi: f64,
    pub bip: f64,
}

/// Exponentially scaled values: `ai`, `aip` carry a factor e^{xi} and
/// `bi`, `bip` a factor e^{-xi}, where xi = (2/3) z^{3/2} for z > 0 and
/// xi = 0 otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledAiry {
    pub ai: f64,
    pub aip: f64,
    pub bi: f64,
    pub bip: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveValue {
    pub u: Complex64,
    pub d: Complex64,
    pub up: Complex64,
    pub dp: Complex64,
}

/// Travelling waves with the common factor e^{xi} removed (see [`ScaledAiry`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledWave {
    pub wave: WaveValue,
    pub xi: f64,
}

pub fn xi_of(z: f64) -> f64 {
    if z > 0.0 {
        2.0 / 3.0 * z * z.sqrt()
    } else {
        0.0
    }
}

fn check_lower(z: f64) -> Result<()> {
    if !z.is_finite() || z < ZMIN {
        return Err(MazerError::Range { what: "Airy functions", z });
    }
    Ok(())
}

pub fn airy_eval(z: f64) -> Result<AiryPair> {
    check_lower(z)?;
    if z > ZMAX_BI {
        return Err(MazerError::Range { what: "Bi (overflow)", z });
    }
    if z.abs() < Z_SWITCH {
        return Ok(taylor(z));
    }
    if z < 0.0 {
        return Ok(oscillatory(-z));
    }
    let s = growth_decay(z);
    let e = s.xi.exp();
    Ok(AiryPair { ai: s.ai / e, aip: s.aip / e, bi: s.bi * e, bip: s.bip * e })
}

pub fn airy_scaled(z: f64) -> Result<ScaledAiry> {
    check_lower(z)?;
    if z >= Z_SWITCH {
        return Ok(growth_decay(z));
    }
    let p = airy_eval(z)?;
    let xi = xi_of(z);
    let e = xi.exp();
    Ok(ScaledAiry { ai: p.ai * e, aip: p.aip * e, bi: p.bi / e, bip: p.bip / e, xi })
}

pub fn wave_eval(z: f64) -> Result<WaveValue> {
    let p = airy_eval(z)?;
    Ok(WaveValue {
        u: Complex64::new(p.ai, p.bi),
        d: Complex64::new(p.ai, -p.bi),
        up: Complex64::new(p.aip, p.bip),
        dp: Complex64::new(p.aip, -p.bip),
    })
}

/// U, D and derivatives multiplied by e^{-xi}; finite for any z >= ZMIN.
pub fn wave_scaled(z: f64) -> Result<ScaledWave> {
    let s = airy_scaled(z)?;
    let damp = (-2.0 * s.xi).exp();
    let (a, ap) = (s.ai * damp, s.aip * damp);
    Ok(ScaledWave {
        wave: WaveValue {
            u: Complex64::new(a, s.bi),
            d: Complex64::new(a, -s.bi),
            up: Complex64::new(ap, s.bip),
            dp: Complex64::new(ap, -s.bip),
        },
        xi: s.xi,
    })
}

fn taylor(z: f64) -> AiryPair {
    let k = ((z - ANCHOR_START) / ANCHOR_STEP).round() as usize;
    let z0 = ANCHOR_START + ANCHOR_STEP * k as f64;
    let [ai, aip, bi, bip] = ANCHORS[k];
    let h = z - z0;
    let (ai, aip) = taylor_step(z0, h, ai, aip);
    let (bi, bip) = taylor_step(z0, h, bi, bip);
    AiryPair { ai, aip, bi, bip }
}

fn taylor_step(z0: f64, h: f64, y0: f64, y1: f64) -> (f64, f64) {
    if h == 0.0 {
        return (y0, y1);
    }
    // c_{k+2} (k+2)(k+1) = z0 c_k + c_{k-1}
    let mut c = [y0, y1, 0.5 * z0 * y0];
    let mut hp = h * h;
    let mut y = y0 + y1 * h + c[2] * hp;
    let mut yp = y1 + 2.0 * c[2] * h;
    let scale = y0.abs().max(y1.abs());
    let mut small = 0;
    for k in 1..80 {
        let next = (z0 * c[1] + c[0]) / ((k + 2) as f64 * (k + 1) as f64);
        c = [c[1], c[2], next];
        let dp = (k + 2) as f64 * next * hp;
        hp *= h;
        let t = next * hp;
        y += t;
        yp += dp;
        if t.abs() <= 1e-18 * scale && dp.abs() <= 1e-18 * scale {
            small += 1;
            if small == 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    (y, yp)
}

/// Coefficient pairs (u_k, v_k) of the Airy asymptotic expansions.
fn uv(k: usize, u_prev: f64) -> (f64, f64) {
    let kf = k as f64;
    let u = u_prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
        / ((2.0 * kf - 1.0) * 216.0 * kf);
    let v = -u * (6.0 * kf + 1.0) / (6.0 * kf - 1.0);
    (u, v)
}

/// Sums of an asymptotic series in 1/xi with the given sign pattern,
/// truncated at the smallest term.
fn asym_sums(xi: f64, sign: impl Fn(usize) -> f64) -> (f64, f64) {
    let (mut su, mut sv) = (1.0, 1.0);
    let mut u = 1.0;
    let mut p = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let (uk, vk) = uv(k, u);
        u = uk;
        p /= xi;
        let tu = uk * p;
        let tv = vk * p;
        let mag = tu.abs().max(tv.abs());
        if mag > last {
            break;
        }
        su += sign(k) * tu;
        sv += sign(k) * tv;
        if mag < 1e-17 {
            break;
        }
        last = mag;
    }
    (su, sv)
}

fn growth_decay(z: f64) -> ScaledAiry {
    let xi = xi_of(z);
    let q = z.sqrt().sqrt();
    let (au, av) = asym_sums(xi, |k| if k % 2 == 0 { 1.0 } else { -1.0 });
    let (bu, bv) = asym_sums(xi, |_| 1.0);
    ScaledAiry {
        ai: au / (2.0 * SQRT_PI * q),
        aip: -q * av / (2.0 * SQRT_PI),
        bi: bu / (SQRT_PI * q),
        bip: q * bv / SQRT_PI,
        xi,
    }
}

/// Ai, Bi at -x for x >= Z_SWITCH.
fn oscillatory(x: f64) -> AiryPair {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let q = x.sqrt().sqrt();
    // even (P) and odd (Q) parts with alternating signs
    let (mut pu, mut pv, mut qu, mut qv) = (1.0, 1.0, 0.0, 0.0);
    let mut u = 1.0;
    let mut p = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let (uk, vk) = uv(k, u);
        u = uk;
        p /= zeta;
        let (tu, tv) = (uk * p, vk * p);
        let mag = tu.abs().max(tv.abs());
        if mag > last {
            break;
        }
        let s = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            pu += s * tu;
            pv += s * tv;
        } else {
            qu += s * tu;
            qv += s * tv;
        }
        if mag < 1e-17 {
            break;
        }
        last = mag;
    }
    let (sz, cz) = zeta.sin_cos();
    // phase zeta - pi/4
    let c = (cz + sz) * FRAC_1_SQRT_2;
    let s = (sz - cz) * FRAC_1_SQRT_2;
    let k0 = 1.0 / (SQRT_PI * q);
    let k1 = q / SQRT_PI;
    AiryPair {
        ai: k0 * (c * pu + s * qu),
        bi: k0 * (-s * pu + c * qu),
        aip: k1 * (s * pv - c * qv),
        bip: k1 * (c * pv + s * qv),
    }
}

/// Wronskian Ai Bi' - Ai' Bi, equal to 1/pi.
pub fn wronskian(p: &AiryPair) -> f64 {
    p.ai * p.bip - p.aip * p.bi
}

pub const WRONSKIAN: f64 = FRAC_1_PI;
