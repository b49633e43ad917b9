//! Scattering amplitudes shared by the solvers, and the closed-form
//! wavefunction outside the mode support.

use num_complex::Complex64;

use crate::airy::{airy_scaled, wave_eval};
use crate::error::Result;
use crate::linalg::Scaled;
use crate::model::DimensionlessParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Mesa,
    Bvp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorSample {
    pub z: f64,
    pub phi_a: Complex64,
    pub phi_b: Complex64,
}

/// Amplitudes of the stationary state with a unit incident wave
/// U(z - h_E) in channel a:
///
/// * below the support: phi_a = U + d_a D, phi_b = d_b D(z - h_E + delta)
/// * above the support: phi_a = a_a Ai(z - h_E), phi_b = a_b Ai(z - h_E + delta)
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSolution {
    pub a_up_a: Scaled,
    pub a_up_b: Scaled,
    pub d_a: Complex64,
    pub d_b: Complex64,
    pub params: DimensionlessParams,
    pub mode: &'static str,
    pub solver: Solver,
    /// Lower and upper end of the region where the coupling acts.
    pub support: (f64, f64),
    /// 1-norm condition number of the (equilibrated) matching system.
    pub condition: f64,
    pub interior: Option<Vec<InteriorSample>>,
}

impl ScatteringSolution {
    pub fn p_em(&self) -> f64 {
        self.d_b.norm_sqr()
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.d_a.norm_sqr() + self.d_b.norm_sqr() - 1.0
    }

    /// Closed-form wavefunction outside the support; `None` inside it.
    pub fn exterior(&self, z: f64) -> Result<Option<(Complex64, Complex64)>> {
        let p = &self.params;
        let (lo, hi) = self.support;
        if z < lo {
            let wa = wave_eval(z - p.h_e)?;
            let wb = wave_eval(z - p.h_e + p.delta)?;
            return Ok(Some((wa.u + self.d_a * wa.d, self.d_b * wb.d)));
        }
        if z > hi {
            return Ok(Some((
                decaying(&self.a_up_a, z - p.h_e)?,
                decaying(&self.a_up_b, z - p.h_e + p.delta)?,
            )));
        }
        Ok(None)
    }
}

/// amp * Ai(x) without forming either factor on its own.
pub(crate) fn decaying(amp: &Scaled, x: f64) -> Result<Complex64> {
    if amp.mantissa == Complex64::new(0.0, 0.0) {
        return Ok(amp.mantissa);
    }
    let s = airy_scaled(x)?;
    Ok(amp.mantissa * s.ai * (amp.log_scale - s.xi).exp())
}
