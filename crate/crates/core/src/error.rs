use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point is on string axis (rho = {rho})")]
    OnStringAxis { rho: f64 },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("particle at rest never reaches the observer (xi = 0)")]
    ParticleAtRest,

    #[error("step count must be at least 1")]
    ZeroSteps,

    #[error("operator is not block diagonal (off-block mass {off_block:e})")]
    NotBlockDiagonal { off_block: f64 },

    #[error("state has zero norm")]
    ZeroNorm,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(
    ok: bool,
    name: &'static str,
    value: f64,
    reason: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}
