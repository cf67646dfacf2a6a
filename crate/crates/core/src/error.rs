use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("singular system: pivot {pivot:e} below floor {floor:e}")]
    SingularSystem { pivot: f64, floor: f64 },
    #[error("chart breakdown at {at}: determinant {det:e}")]
    ChartBreakdown { at: f64, det: f64 },
    #[error("integration blew up at t = {t}")]
    IntegrationBlowup { t: f64 },
    #[error("symbol is not skew: Re d = {real_part:e} at k = {k}")]
    Symbol { k: f64, real_part: f64 },
    #[error("trace evaluated outside its sampled interval at {arg}")]
    TraceRange { arg: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("blowup at t = {t}: {detail}")]
    BlowupAtTime { t: f64, detail: String },
    #[error("shock proximity at x = {x}: jacobian determinant {det:e}")]
    ShockProximity { x: f64, det: f64 },
    #[error("newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
