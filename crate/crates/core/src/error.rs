use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MazerError {
    #[error("argument {z} outside the supported range of {what}")]
    Range { what: &'static str, z: f64 },

    #[error("dressed frame undefined without coupling (h_int = 0, delta = {delta})")]
    DegenerateFrame { delta: f64 },

    #[error("linear system ill-conditioned: condition estimate {estimate:.3e} exceeds {threshold:.1e}")]
    Conditioning { estimate: f64, threshold: f64 },

    #[error("integration failed at z = {z}: {reason}")]
    Integration { z: f64, reason: String },

    #[error("quadrature under-resolved: {nodes_per_wavelength:.1} nodes per wavelength (need 20)")]
    Resolution { nodes_per_wavelength: f64 },

    #[error("no saturation found for L in [{from}, {to}]")]
    NoSaturation { from: f64, to: f64 },

    #[error("classical formula is only defined for the mesa mode")]
    ClassicalModeUnsupported,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("every sweep point failed")]
    AllPointsFailed,
}

pub type Result<T> = std::result::Result<T, MazerError>;
