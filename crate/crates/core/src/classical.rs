//! Rabi-limit emission probability for a classical trajectory in gravity.

use rayon::prelude::*;

use crate::error::{MazerError, Result};
use crate::mesa::solve_mesa;
use crate::model::{DimensionlessParams, ModeProfile};

/// Phases accumulated along the classical trajectory. `omega_tau1` applies
/// when the turning point lies inside the cavity (0 <= h_E < L), the other
/// two when the atom passes through it (h_E >= L).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalTimes {
    pub omega_tau1: Option<f64>,
    pub omega_tau2: Option<f64>,
    pub delta_t: Option<f64>,
}

pub fn classical_times(dp: &DimensionlessParams) -> ClassicalTimes {
    let omp = (2.0 * dp.h_int).hypot(dp.delta);
    if dp.h_e < 0.0 {
        return ClassicalTimes { omega_tau1: None, omega_tau2: None, delta_t: None };
    }
    if dp.h_e < dp.l {
        return ClassicalTimes { omega_tau1: Some(2.0 * omp * dp.h_e.sqrt()), omega_tau2: None, delta_t: None };
    }
    let above = (dp.h_e - dp.l).sqrt();
    ClassicalTimes {
        omega_tau1: None,
        omega_tau2: Some(omp * (dp.h_e.sqrt() - above)),
        delta_t: Some(2.0 * dp.delta * above),
    }
}

/// Emission probability of a classical atom crossing a mesa mode.
pub fn classical_pem(dp: &DimensionlessParams) -> f64 {
    let om = 2.0 * dp.h_int;
    let omp = om.hypot(dp.delta);
    if omp == 0.0 {
        return 0.0;
    }
    let ratio = om / omp;
    let t = classical_times(dp);
    if let Some(p1) = t.omega_tau1 {
        return ratio * ratio * (0.5 * p1).sin().powi(2);
    }
    match (t.omega_tau2, t.delta_t) {
        (Some(p2), Some(dt)) => {
            let (s, c) = (0.5 * p2).sin_cos();
            let (sd, cd) = (0.5 * dt).sin_cos();
            let k = c * cd - dp.delta / omp * s * sd;
            4.0 * ratio * ratio * s * s * k * k
        }
        _ => 0.0,
    }
}

pub fn classical_pem_for(dp: &DimensionlessParams, mode: &ModeProfile) -> Result<f64> {
    if !mode.is_mesa() {
        return Err(MazerError::ClassicalModeUnsupported);
    }
    Ok(classical_pem(dp))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    /// (L, quantum, classical, |difference|)
    pub points: Vec<(f64, f64, f64, f64)>,
    pub max: f64,
    pub argmax: f64,
    pub mean: f64,
}

/// Pointwise |P_mesa - P_classical| along a sweep of cavity lengths.
pub fn classical_quantum_deviation(dp: &DimensionlessParams, lengths: &[f64]) -> Result<Deviation> {
    if lengths.is_empty() {
        return Err(MazerError::Invalid("empty length grid".into()));
    }
    let points = lengths
        .par_iter()
        .map(|&l| {
            let p = DimensionlessParams { l, ..*dp };
            let q = solve_mesa(&p)?.p_em();
            let c = classical_pem(&p);
            Ok((l, q, c, (q - c).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut max, mut argmax) = (0.0, lengths[0]);
    for &(l, _, _, d) in &points {
        if d > max {
            max = d;
            argmax = l;
        }
    }
    let mean = points.iter().map(|p| p.3).sum::<f64>() / points.len() as f64;
    Ok(Deviation { points, max, argmax, mean })
}
