use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure of an adaptive integration run.
///
/// Every variant carries the last accepted state so a caller can inspect or
/// resume from it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegrationError {
    #[error("step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64, last_state: Vec<f64> },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps {
        t: f64,
        max_steps: usize,
        last_state: Vec<f64>,
    },
    #[error("non-finite state produced at t = {t}")]
    NonFinite { t: f64, last_state: Vec<f64> },
}

impl IntegrationError {
    pub fn last_state(&self) -> &[f64] {
        match self {
            Self::StepSizeUnderflow { last_state, .. }
            | Self::TooManySteps { last_state, .. }
            | Self::NonFinite { last_state, .. } => last_state,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("lossless cavity: r undefined")]
    LosslessCavity,
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error("root not bracketed on [{lo}, {hi}] (f = {f_lo}, {f_hi})")]
    NotBracketed {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("root search did not converge within {iterations} iterations (last x = {last_x})")]
    RootNotConverged { iterations: usize, last_x: f64 },
    #[error("pump r = {r} is below the lasing threshold {r_on}")]
    BelowThreshold { r: f64, r_on: f64 },
    #[error(
        "cavity-atom detuning {detuning} exceeds the free spectral range {fsr}; \
         re-fold omega_c by a multiple of the free spectral range"
    )]
    DetuningExceedsFsr { detuning: f64, fsr: f64 },
    #[error("state is not a fixed point (residual {residual:e})")]
    NotAFixedPoint { residual: f64 },
    #[error("trajectory diverged at t = {t}")]
    Divergent { t: f64 },
    #[error(
        "instability unreachable: gain parameter G = {gain} must exceed r_HB = {r_hb} \
         (required d0 exceeds attainable range)"
    )]
    InstabilityUnreachable { gain: f64, r_hb: f64 },
    #[error("grid of {n} points is not a power of two; use n_z = {suggested}")]
    Grid { n: usize, suggested: usize },
    #[error("length mismatch: expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}
