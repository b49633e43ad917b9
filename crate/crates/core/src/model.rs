//! Reduced units, the dressed-state frame and cavity mode profiles.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;
use std::sync::Arc;

use crate::error::{MazerError, Result};

/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Mass of a rubidium-87 atom in kg.
pub const RB87_MASS: f64 = 1.443_160_648e-25;
pub const STANDARD_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// kg
    pub mass: f64,
    /// m/s^2
    pub gravity: f64,
    /// atom-field coupling, rad/s
    pub coupling: f64,
    /// cavity minus atomic frequency, rad/s
    pub detuning: f64,
    /// J
    pub energy: f64,
    /// m
    pub cavity_length: f64,
    pub photons: u32,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.mass > 0.0
            && self.gravity > 0.0
            && self.coupling >= 0.0
            && self.cavity_length >= 0.0
            && self.detuning.is_finite()
            && self.energy.is_finite();
        if ok {
            Ok(())
        } else {
            Err(MazerError::Invalid(format!("physical parameters out of range: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    pub h_e: f64,
    pub h_int: f64,
    pub delta: f64,
    pub l: f64,
    pub n: u32,
    pub g: f64,
}

impl DimensionlessParams {
    /// Parameters from the coupling g; h_int = g sqrt(n + 1).
    pub fn new(h_e: f64, g: f64, delta: f64, l: f64, n: u32) -> Self {
        let h_int = g * f64::from(n + 1).sqrt();
        Self { h_e, h_int, delta, l, n, g }
    }

    /// Parameters from the interaction height directly.
    pub fn with_h_int(h_e: f64, h_int: f64, delta: f64, l: f64, n: u32) -> Self {
        let g = h_int / f64::from(n + 1).sqrt();
        Self { h_e, h_int, delta, l, n, g }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.h_e, self.h_int, self.delta, self.l, self.g].iter().all(|v| v.is_finite());
        if !finite || self.h_int < 0.0 || self.l < 0.0 || self.g < 0.0 {
            return Err(MazerError::Invalid(format!("dimensionless parameters out of range: {self:?}")));
        }
        Ok(())
    }

    pub fn dressed(&self) -> Result<DressedFrame> {
        dressed_frame(self)
    }
}

/// Gravitational length (2 m^2 G / hbar^2)^(-1/3) in metres.
pub fn length_scale(mass: f64, gravity: f64) -> Result<f64> {
    if !(mass > 0.0 && gravity > 0.0) {
        return Err(MazerError::Invalid("mass and gravity must be positive".into()));
    }
    Ok((2.0 * mass * mass * gravity / (HBAR * HBAR)).powf(-1.0 / 3.0))
}

/// Energy unit m G l in joules.
fn energy_unit(mass: f64, gravity: f64) -> Result<f64> {
    Ok(mass * gravity * length_scale(mass, gravity)?)
}

pub fn reduce(p: &PhysicalParams) -> Result<DimensionlessParams> {
    p.validate()?;
    let ell = length_scale(p.mass, p.gravity)?;
    let e0 = energy_unit(p.mass, p.gravity)?;
    Ok(DimensionlessParams::new(
        p.energy / e0,
        HBAR * p.coupling / e0,
        HBAR * p.detuning / e0,
        p.cavity_length / ell,
        p.photons,
    ))
}

/// Inverse of [`reduce`] for a given mass and gravity.
pub fn expand(dp: &DimensionlessParams, mass: f64, gravity: f64) -> Result<PhysicalParams> {
    let ell = length_scale(mass, gravity)?;
    let e0 = energy_unit(mass, gravity)?;
    Ok(PhysicalParams {
        mass,
        gravity,
        coupling: dp.g * e0 / HBAR,
        detuning: dp.delta * e0 / HBAR,
        energy: dp.h_e * e0,
        cavity_length: dp.l * ell,
        photons: dp.n,
    })
}

/// Dimensionless detuning corresponding to a frequency in Hz.
pub fn detuning_from_hz(hz: f64, mass: f64, gravity: f64) -> Result<f64> {
    Ok(HBAR * 2.0 * PI * hz / energy_unit(mass, gravity)?)
}

/// Frequency in Hz corresponding to a dimensionless detuning.
pub fn detuning_to_hz(delta: f64, mass: f64, gravity: f64) -> Result<f64> {
    Ok(delta * energy_unit(mass, gravity)? / (HBAR * 2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedFrame {
    pub theta: f64,
    pub omega_n: f64,
    pub omega_prime: f64,
    pub h_plus: f64,
    pub h_minus: f64,
}

impl DressedFrame {
    pub fn sin_cos(&self) -> (f64, f64) {
        self.theta.sin_cos()
    }
}

pub fn dressed_frame(dp: &DimensionlessParams) -> Result<DressedFrame> {
    let (h, d) = (dp.h_int, dp.delta);
    if !(h > 0.0) {
        return Err(MazerError::DegenerateFrame { delta: d });
    }
    let omega_n = 2.0 * h;
    let theta = 0.5 * omega_n.atan2(-d);
    let root = (0.25 * d * d + h * h).sqrt();
    // avoid cancellation in d/2 + root for large negative d
    let h_plus = if d >= 0.0 { 0.5 * d + root } else { h * h / (root - 0.5 * d) };
    Ok(DressedFrame {
        theta,
        omega_n,
        omega_prime: omega_n.hypot(d),
        h_plus,
        h_minus: -h * h / h_plus,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModeKind {
    Mesa,
    Sine,
    Gaussian,
    /// Linearly interpolated samples (z, u), strictly increasing in z.
    Sampled(Arc<Vec<(f64, f64)>>),
}

impl ModeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModeKind::Mesa => "mesa",
            ModeKind::Sine => "sine",
            ModeKind::Gaussian => "gaussian",
            ModeKind::Sampled(_) => "custom-sampled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    pub kind: ModeKind,
    pub l: f64,
    pub z_min: f64,
    pub z_max: f64,
}

/// Gaussian profiles are cut at this many standard deviations.
pub const GAUSSIAN_CUT: f64 = 8.0;

impl ModeProfile {
    pub fn mesa(l: f64) -> Result<Self> {
        if !(l >= 0.0) || !l.is_finite() {
            return Err(MazerError::Invalid(format!("cavity length {l} must be >= 0")));
        }
        Ok(Self { kind: ModeKind::Mesa, l, z_min: 0.0, z_max: l })
    }

    pub fn sine(l: f64) -> Result<Self> {
        positive_length(l)?;
        Ok(Self { kind: ModeKind::Sine, l, z_min: 0.0, z_max: l })
    }

    pub fn gaussian(l: f64) -> Result<Self> {
        positive_length(l)?;
        let sigma = l / SQRT_2;
        Ok(Self {
            kind: ModeKind::Gaussian,
            l,
            z_min: 0.5 * l - GAUSSIAN_CUT * sigma,
            z_max: 0.5 * l + GAUSSIAN_CUT * sigma,
        })
    }

    pub fn sampled(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(MazerError::Invalid("a sampled mode needs at least two points".into()));
        }
        if samples.iter().any(|(z, u)| !z.is_finite() || !u.is_finite()) {
            return Err(MazerError::Invalid("non-finite sample in mode file".into()));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(MazerError::Invalid("mode sample positions must increase strictly".into()));
        }
        let z_min = samples[0].0;
        let z_max = samples[samples.len() - 1].0;
        Ok(Self { kind: ModeKind::Sampled(Arc::new(samples)), l: z_max - z_min, z_min, z_max })
    }

    /// Reads whitespace- or comma-separated (z, u) pairs; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MazerError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_samples(&text)
    }

    pub fn parse_samples(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> =
                line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| MazerError::Invalid(format!("line {}: cannot parse {s:?}", no + 1)))
            };
            if cols.len() != 2 {
                return Err(MazerError::Invalid(format!("line {}: expected two columns", no + 1)));
            }
            samples.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::sampled(samples)
    }

    pub fn from_name(name: &str, l: f64) -> Result<Self> {
        match name {
            "mesa" => Self::mesa(l),
            "sine" => Self::sine(l),
            "gaussian" => Self::gaussian(l),
            other => Err(MazerError::Invalid(format!("unknown mode kind {other:?}"))),
        }
    }

    pub fn is_mesa(&self) -> bool {
        matches!(self.kind, ModeKind::Mesa)
    }

    pub fn u(&self, z: f64) -> f64 {
        if z < self.z_min || z > self.z_max {
            return 0.0;
        }
        match &self.kind {
            ModeKind::Mesa => 1.0,
            ModeKind::Sine => (PI * z / self.l).sin(),
            ModeKind::Gaussian => {
                let s2 = self.l * self.l / 2.0;
                let x = z - 0.5 * self.l;
                (-x * x / (2.0 * s2)).exp()
            }
            ModeKind::Sampled(s) => {
                let i = s.partition_point(|p| p.0 <= z).clamp(1, s.len() - 1);
                let (z0, u0) = s[i - 1];
                let (z1, u1) = s[i];
                u0 + (u1 - u0) * (z - z0) / (z1 - z0)
            }
        }
    }

    /// Same profile over a different cavity length (sampled modes are unchanged).
    pub fn with_length(&self, l: f64) -> Result<Self> {
        match self.kind {
            ModeKind::Mesa => Self::mesa(l),
            ModeKind::Sine => Self::sine(l),
            ModeKind::Gaussian => Self::gaussian(l),
            ModeKind::Sampled(_) => Ok(self.clone()),
        }
    }
}

fn positive_length(l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(MazerError::Invalid(format!("cavity length {l} must be > 0")))
    }
}
