use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid financial profile: {0}")]
    InvalidFinancials(String),

    #[error("disagreement payoff must be non-negative (got {0})")]
    NegativePayoff(f64),

    #[error("normalized disagreement payoff {name} = {value} is outside [0, 1]")]
    NormalizedOutOfRange { name: &'static str, value: f64 },

    #[error("no deal: d1+d2 > 1 (d1 = {d1}, d2 = {d2})")]
    NoDeal { d1: f64, d2: f64 },

    #[error("bargaining weight {0} is outside [0, 1]")]
    InvalidWeight(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("weight model is undefined at the origin d1 = d2 = 0")]
    DegenerateOrigin,

    #[error("infeasible bargain: d1 + d2 = {total} exceeds operating income {operating_income}")]
    Infeasible { total: f64, operating_income: f64 },

    #[error("isopleth is degenerate: grid point lies on the result scale (zero surplus)")]
    DegenerateLine,

    #[error("invalid canvas: {0}")]
    InvalidCanvas(String),

    #[error("unknown weight model {0:?}")]
    UnknownModel(String),

    #[error("grid of {nodes} nodes exceeds the limit of {limit}")]
    GridTooLarge { nodes: u64, limit: u64 },
}

impl Error {
    /// Stable machine-readable code, used by the HTTP service and JSON output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidFinancials(_) => "invalid_financials",
            Error::NegativePayoff(_) => "negative_payoff",
            Error::NormalizedOutOfRange { .. } => "normalized_out_of_range",
            Error::NoDeal { .. } => "no_deal",
            Error::InvalidWeight(_) => "invalid_weight",
            Error::InvalidInput(_) => "invalid_input",
            Error::DegenerateOrigin => "degenerate_origin",
            Error::Infeasible { .. } => "infeasible",
            Error::DegenerateLine => "degenerate_line",
            Error::InvalidCanvas(_) => "invalid_canvas",
            Error::UnknownModel(_) => "unknown_model",
            Error::GridTooLarge { .. } => "grid_too_large",
        }
    }

    /// True for errors meaning the parties cannot strike a deal at all.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::NoDeal { .. } | Error::Infeasible { .. })
    }
}
