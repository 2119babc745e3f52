// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad class of a failure, used by front ends to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input, violated precondition, malformed file.
    Input,
    /// The numerics cannot produce an answer for valid input (no bracket,
    /// resonance, singular matrix).
    Numeric,
    /// An iterative method ran out of iterations.
    NonConvergence,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("SQUID effective Josephson energy is not positive (r = 1 at half flux)")]
    DegenerateSquid,

    #[error("coupler within {detuning_hz:.3e} Hz of qubit {qubit}; dispersive net coupling is invalid")]
    ResonantCoupler { qubit: usize, detuning_hz: f64 },

    #[error("net coupling has the same sign at both ends of [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("root search did not reach |g| < {tol_hz} Hz within {iterations} iterations")]
    RootNotConverged { tol_hz: f64, iterations: usize },

    #[error("coupler is exactly resonant with the readout resonator")]
    ZeroDetuning,

    #[error("residual ZZ changed by {relative_change:.3e} when doubling the truncation")]
    TruncationUnconverged { relative_change: f64 },

    #[error("dressed state for bare {state:?} is ambiguous (max overlap^2 = {overlap:.3})")]
    LabelAmbiguous { state: [usize; 3], overlap: f64 },

    #[error("capacitance matrix is not positive definite")]
    NonPositiveDefinite,

    #[error("floating-mode transformation is rank deficient: {0}")]
    SingularTransform(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("least-squares fit did not converge within {0} iterations")]
    MaxIterations(usize),

    #[error("Jacobian is singular at the current parameters")]
    SingularJacobian,

    #[error("initial parameter `{0}` is outside its bounds")]
    InitOutOfBounds(String),

    #[error("{points} data points cannot determine {params} free parameters")]
    TooFewPoints { points: usize, params: usize },

    #[error("interleaved decay {p_int} exceeds reference decay {p_ref}")]
    InvalidDecay { p_ref: f64, p_int: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidParameter(_) | InvalidData(_) | InvalidNetwork(_) | InitOutOfBounds(_)
            | TooFewPoints { .. } | EmptyInput | Io(_) | Csv(_) | Json(_) => ErrorClass::Input,
            MaxIterations(_) | RootNotConverged { .. } | TruncationUnconverged { .. } => {
                ErrorClass::NonConvergence
            }
            DegenerateSquid | ResonantCoupler { .. } | NoSignChange { .. } | ZeroDetuning
            | LabelAmbiguous { .. } | NonPositiveDefinite | SingularTransform(_)
            | SingularJacobian | InvalidDecay { .. } => ErrorClass::Numeric,
        }
    }
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
