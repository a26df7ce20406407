use thiserror::Error;

/// Every failure mode of the library.
///
/// Numerical failures (no convergence, contour problems) are kept apart from
/// invalid input so that front ends can map them to different exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(&'static str),
    #[error("mirage bath undefined: j1 = {j1} must exceed gamma_b/2 = {half_gamma}")]
    MirageUndefined { j1: f64, half_gamma: f64 },
    #[error("j1 = {j1} lies on the phase boundary {boundary}")]
    OnPhaseBoundary { j1: f64, boundary: f64 },
    #[error("frequency lies on a branch loop or cut (||z| - 1| = {distance:e})")]
    OnBranchLoop { distance: f64 },
    #[error("pole quadratic has a vanishing leading coefficient")]
    DegenerateQuadratic,
    #[error("frequency within {distance:e} of the bath spectrum")]
    NearSpectrum { distance: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("bound-state root landed on the spectrum")]
    RootOnSpectrum,
    #[error("window of {half_width} cells leaves tail mass {tail:e}")]
    WindowTooSmall { half_width: usize, tail: f64 },
    #[error("midgap closed form requires delta' = -i gamma_b/2")]
    NotMidgap,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("contour offset {eta} does not clear the top singularity at {top}")]
    ContourTooLow { eta: f64, top: f64 },
    #[error("contour transform not converged (change {change:e} under refinement)")]
    AliasingDetected { change: f64 },
    #[error("no oscillation detected")]
    NoOscillationDetected,
    #[error("pair-function contour pinched: singular sets overlap")]
    ContourPinched,
    #[error("pair function vanishes")]
    PiZero,
    #[error("integrator step underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("dimension {dimension} exceeds the limit {limit}")]
    DimensionTooLarge { dimension: usize, limit: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

impl Error {
    /// True for failures of a numerical procedure on otherwise valid input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParams(_)
                | Error::MirageUndefined { .. }
                | Error::OnPhaseBoundary { .. }
                | Error::NotMidgap
                | Error::DimensionTooLarge { .. }
                | Error::DimensionMismatch { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
