//! Error type shared across the crate.

use num_complex::Complex64;

use crate::zeros::SearchRect;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("log-gamma pole at non-positive integer {0}")]
    PoleAtNonPositiveInteger(Complex64),

    #[error("zeta pole at s = 1")]
    PoleAtOne,

    #[error("requested tolerance not reached: {0}")]
    ToleranceNotReached(String),

    #[error("character mod {modulus} with label {label} is not primitive (conductor {conductor})")]
    NotPrimitive {
        modulus: u64,
        label: u64,
        conductor: u64,
    },

    #[error(
        "character mod {modulus} with label {label} is real; a complex conjugate pair is required"
    )]
    RealCharacter { modulus: u64, label: u64 },

    #[error("root number {0} is real within tolerance; the construction degenerates")]
    RealRootNumber(Complex64),

    #[error("gamma factor pole at s = {0}")]
    GammaPole(Complex64),

    #[error("zero too close to the contour near {near}; retry with the suggested rectangle")]
    ZeroOnBoundary {
        near: Complex64,
        suggested: SearchRect,
    },

    #[error("phase change along the contour could not be resolved near {0}")]
    PhaseUnresolvable(Complex64),

    #[error("Newton iteration did not converge from {start} (last iterate {last}, |f| = {residual:.3e})")]
    NonConvergent {
        start: Complex64,
        last: Complex64,
        residual: f64,
    },

    #[error("no mirror zero found for {0}")]
    MirrorNotFound(Complex64),

    #[error("pair is not an off-critical-line mirror pair: {0}, {1}")]
    InvalidMirrorPair(Complex64, Complex64),

    #[error("no derivative zero found between {0} and {1}")]
    DerivativeZeroNotFound(Complex64, Complex64),

    #[error("modulus {0} does not admit two conjugate pairs of primitive complex characters with equal parity")]
    NotEnoughPairs(u64),

    #[error("seed {seed} is not on the ray pre-image (arg f = {arg:.6}, ray angle {phi:.6})")]
    SeedOffCurve { seed: Complex64, arg: f64, phi: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
