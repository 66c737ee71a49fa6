/*!
Nonatomic congestion games with monetary incentives.

Models routing games with polynomial edge latencies, computes system optima and
Wardrop equilibria (homogeneous or price-sensitivity-heterogeneous users),
applies toll/subsidy mechanisms and the scaling transform that connects them,
and evaluates closed-form price-of-anarchy bounds for bounded and
heterogeneity-robust incentives. A companion module covers finite-player games
on shared resources, where optimal incentives are obtained from a smoothness
linear program solved by a built-in dense simplex.

Flows live on enumerated path sets; all solvers are deterministic for a fixed
seed and configuration.
*/

pub mod atomic;
pub mod checks;
pub mod cli;
pub mod incentive;
pub mod latency;
pub mod network;
pub mod poa;
pub mod simplex;
pub mod solver;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed model, parameter out of domain, or inconsistent dimensions.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// An iterative solve exhausted its budget without meeting tolerance.
    #[error("did not converge: {0}")]
    NonConvergence(String),
    /// A verification scenario's computed outcome differs from the recorded one.
    #[error("{0}")]
    Check(String),
    /// Linear-program construction or certification failure.
    #[error("linear program: {0}")]
    Lp(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
