use thiserror::Error;

/// Errors raised by the reduction, dynamics and equilibrium routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("collision: squared distance of pair {pair} is {dist2:e}")]
    Collision { pair: &'static str, dist2: f64 },

    #[error("coordinate chart is singular: {0}")]
    ChartSingular(&'static str),

    #[error("x1 and x2 do not span a plane (|x1 ^ x2| = {0:e})")]
    DegeneratePlane(f64),

    #[error("kinetic domain violated: L3^2 = {l3_sq:e} exceeds {bound:e}")]
    KineticDomain { l3_sq: f64, bound: f64 },

    #[error("degenerate momenta: |mu1| = |mu2| = {0}")]
    DegenerateMomenta(f64),

    #[error("no real momenta: mu1^2 = {mu1_sq:e}, mu2^2 = {mu2_sq:e}")]
    NoRealMomenta { mu1_sq: f64, mu2_sq: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (decrement {decrement:e})")]
    NoConvergence { iterations: usize, decrement: f64 },

    #[error("Hessian is degenerate (|det| = {0:e})")]
    DegenerateHessian(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
