//! Royalty determination with the normalized asymmetric Nash bargaining
//! solution.
//!
//! Every quantity is expressed as a fraction of the licensed product's
//! operating income, so the central relation is
//!
//! ```text
//! r / O_M = d1 + alpha * (1 - d1 - d2)
//! ```
//!
//! where `d1`, `d2` are the normalized disagreement payoffs of licensor and
//! licensee and `alpha` is the licensor's bargaining weight. The crate is
//! organised as:
//!
//! * [`model`]: financial types and the closed-form solution.
//! * [`weights`]: bargaining-weight models (perception matrix, strength
//!   sub-models, disagreement-driven cases, composite expressions).
//! * [`analysis`]: Pareto-efficiency scans and solution families.
//! * [`oracles`]: numeric Nash-product maximizer and the alternating-offers
//!   limit, both independent of the closed forms.
//! * [`nomograph`]: alignment-chart geometry and SVG rendering.
//! * [`schema`]: JSON request/response types shared by the CLI and service.

pub mod analysis;
pub mod error;
pub mod model;
pub mod nomograph;
pub mod oracles;
pub mod schema;
pub mod weights;

pub use analysis::{
    feasibility_region, pareto_scan, solution_family, FamilyCurve, NodeClass, ParetoNode,
    ParetoReport, ScanConfig,
};
pub use error::{Error, Result};
pub use model::{
    normalize_disagreement, partition_profits, royalty_rate, solve_classic, solve_royalty_share,
    BargainOutcome, DisagreementPoint, FinancialProfile,
};
pub use nomograph::{build_layout, read_isopleth, render_svg, Isopleth, NomographLayout};
pub use oracles::{maximize_nash_product, rubinstein_limit_share, MaximizerResult, RubinsteinParams};
pub use weights::{
    alpha_from_perceptions, case_alpha, case_royalty, case_royalty_closed_form, example_alpha,
    strength_competitors, strength_market_share, strength_patent_life, violating_demo_alpha, Case,
    Evaluation, Expr, OriginPolicy, PerceptionMatrix, StrengthInputs, Warning, WeightModel,
};
