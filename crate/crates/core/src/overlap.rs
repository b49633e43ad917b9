//! Emission amplitude from the outgoing Green function:
//! d_b = -i pi h_int * integral of u(z) phi_a(z) Ai(z - h_E + delta) dz.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::airy::{airy_eval, wave_eval};
use crate::error::{MazerError, Result};
use crate::model::{DimensionlessParams, ModeProfile};
use crate::scattering::InteriorSample;

pub const DEFAULT_NODES: usize = 2001;
/// Minimum number of nodes per local wavelength.
pub const MIN_NODES_PER_WAVELENGTH: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    /// Composite Simpson rule on `n` uniform nodes (`n` odd, at least 3).
    pub fn simpson(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 || !(b > a) {
            return Err(MazerError::Invalid(format!("Simpson grid needs an odd node count >= 3 and a < b (n = {n})")));
        }
        let h = (b - a) / (n - 1) as f64;
        let nodes = (0..n).map(|i| if i == n - 1 { b } else { a + h * i as f64 }).collect();
        let weights = (0..n)
            .map(|i| {
                let w = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * h / 3.0
            })
            .collect();
        Ok(Self { nodes, weights })
    }

    pub fn spacing(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        self.weights.iter().zip(values).map(|(w, v)| v * *w).sum()
    }
}

/// Shortest local wavelength 2 pi / sqrt(h_E - z + |h|) at the lower end of
/// the support, with |h| the larger dressed height. `None` when the lower
/// end is classically forbidden for both dressed states.
pub fn shortest_wavelength(dp: &DimensionlessParams, mode: &ModeProfile) -> Option<f64> {
    let h = match dp.dressed() {
        Ok(f) => f.h_plus.abs().max(f.h_minus.abs()),
        Err(_) => 0.0,
    };
    let k2 = dp.h_e - mode.z_min + h;
    (k2 > 0.0).then(|| 2.0 * PI / k2.sqrt())
}

pub fn check_resolution(dp: &DimensionlessParams, mode: &ModeProfile, grid: &QuadratureGrid) -> Result<()> {
    if let Some(lambda) = shortest_wavelength(dp, mode) {
        let per = lambda / grid.spacing();
        if per < MIN_NODES_PER_WAVELENGTH {
            return Err(MazerError::Resolution { nodes_per_wavelength: per });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapResult {
    pub d_b: Complex64,
    pub p_em: f64,
}

/// Evaluates the overlap integral with a callable interior phi_a on a
/// Simpson grid of `nodes` points over the mode support.
pub fn emission_via_overlap<F>(dp: &DimensionlessParams, mode: &ModeProfile, phi_a: F, nodes: usize) -> Result<OverlapResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if dp.h_int == 0.0 {
        return Ok(OverlapResult { d_b: Complex64::new(0.0, 0.0), p_em: 0.0 });
    }
    let grid = QuadratureGrid::simpson(mode.z_min, mode.z_max, nodes)?;
    check_resolution(dp, mode, &grid)?;
    let vals = grid
        .nodes
        .iter()
        .map(|&z| Ok(mode.u(z) * phi_a(z)? * airy_eval(z - dp.h_e + dp.delta)?.ai))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(dp, grid.integrate(&vals)))
}

/// Same integral from interior samples on a uniform grid with an odd
/// number of points spanning the support (as produced by the bvp solver).
pub fn emission_from_samples(dp: &DimensionlessParams, mode: &ModeProfile, samples: &[InteriorSample]) -> Result<OverlapResult> {
    let n = samples.len();
    let grid = QuadratureGrid::simpson(mode.z_min, mode.z_max, n)?;
    if samples.iter().zip(&grid.nodes).any(|(s, z)| (s.z - z).abs() > 1e-9 * (1.0 + z.abs())) {
        return Err(MazerError::Invalid("samples are not on the uniform Simpson grid".into()));
    }
    if dp.h_int == 0.0 {
        return Ok(OverlapResult { d_b: Complex64::new(0.0, 0.0), p_em: 0.0 });
    }
    check_resolution(dp, mode, &grid)?;
    let vals = samples
        .iter()
        .map(|s| Ok(mode.u(s.z) * s.phi_a * airy_eval(s.z - dp.h_e + dp.delta)?.ai))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(dp, grid.integrate(&vals)))
}

fn finish(dp: &DimensionlessParams, integral: Complex64) -> OverlapResult {
    let d_b = Complex64::new(0.0, -PI * dp.h_int) * integral;
    OverlapResult { d_b, p_em: d_b.norm_sqr() }
}

/// Outgoing Green function -i pi D(z< - h_E) Ai(z> - h_E).
pub fn green_function(z: f64, zp: f64, h_e: f64) -> Result<Complex64> {
    let (lo, hi) = if z < zp { (z, zp) } else { (zp, z) };
    let d = wave_eval(lo - h_e)?.d;
    let ai = airy_eval(hi - h_e)?.ai;
    Ok(Complex64::new(0.0, -PI) * d * ai)
}
