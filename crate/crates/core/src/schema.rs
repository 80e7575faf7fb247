//! JSON request and response types shared by the CLI and the HTTP service.
//!
//! Both front ends call the functions here, so a CLI `solve --json` and a
//! `POST /api/solve` with the same inputs produce the same document.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::analysis::{grid_node_count, pareto_scan, solution_family, FamilyCurve, ParetoReport, ScanConfig};
use crate::error::{Error, Result};
use crate::nomograph::{build_layout, render_svg, Isopleth, TickSteps};
use crate::model::{normalize_disagreement, solve_royalty_share, DisagreementPoint, FinancialProfile};
use crate::weights::{case_royalty_closed_form, Case, Expr, OriginPolicy, PerceptionMatrix, StrengthInputs, WeightModel};

/// Scan requests above this many grid nodes are refused.
pub const MAX_SCAN_NODES: u64 = 1_000_000;

/// Licensee self-perceptions used when only strength inputs are given.
pub const DEFAULT_P21: f64 = 0.5;
pub const DEFAULT_P22: f64 = 2.0 / 3.0;

pub const MODEL_KINDS: [&str; 7] = [
    "constant",
    "perceptions",
    "case1",
    "case2",
    "case3",
    "violating-demo",
    "composite",
];

/// `{"kind": "<name>", ...params}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub kind: String,
    #[serde(flatten)]
    pub params: Map<String, Value>,
}

impl ModelDescriptor {
    pub fn new(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            params: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn constant(alpha: f64) -> Self {
        Self::new("constant").with("alpha", alpha)
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.params.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| Error::InvalidInput(format!("model parameter {key:?} must be a number"))),
        }
    }

    fn required(&self, key: &str) -> Result<f64> {
        self.number(key)?.ok_or_else(|| {
            Error::InvalidInput(format!("model {:?} requires parameter {key:?}", self.kind))
        })
    }

    fn count(&self, key: &str) -> Result<u64> {
        self.params
            .get(key)
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidInput(format!("model parameter {key:?} must be a non-negative integer")))
    }

    /// Builds the weight model this descriptor names.
    pub fn resolve(&self) -> Result<WeightModel> {
        match self.kind.as_str() {
            "constant" => WeightModel::constant(self.required("alpha")?),
            "perceptions" => {
                if self.params.contains_key("licensors") {
                    let inputs = StrengthInputs {
                        licensors: self.count("licensors")?,
                        licensees: self.count("licensees")?,
                        market_share_gain: self.required("market_share_gain")?,
                        market_share_desired: self.required("market_share_desired")?,
                        patent_age: self.required("patent_age")?,
                        patent_life: self.required("patent_life")?,
                    };
                    let p21 = self.number("p21")?.unwrap_or(DEFAULT_P21);
                    let p22 = self.number("p22")?.unwrap_or(DEFAULT_P22);
                    Ok(WeightModel::Perceptions(inputs.perception_matrix(p21, p22)?))
                } else {
                    Ok(WeightModel::Perceptions(PerceptionMatrix::new(
                        self.required("p11")?,
                        self.required("p12")?,
                        self.required("p21")?,
                        self.required("p22")?,
                    )?))
                }
            }
            "case1" => Ok(WeightModel::Case(Case::One)),
            "case2" => Ok(WeightModel::Case(Case::Two)),
            "case3" => Ok(WeightModel::Case(Case::Three)),
            "violating-demo" => Ok(WeightModel::ViolatingDemo),
            "composite" => {
                let raw = self.params.get("expr").ok_or_else(|| {
                    Error::InvalidInput("model \"composite\" requires parameter \"expr\"".into())
                })?;
                let expr: Expr = serde_json::from_value(raw.clone())
                    .map_err(|e| Error::InvalidInput(format!("invalid weight expression: {e}")))?;
                WeightModel::composite(expr)
            }
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    #[serde(rename = "type")]
    pub ty: &'static str,
    pub required: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maximum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub default: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelInfo {
    pub kind: &'static str,
    pub description: &'static str,
    pub params: Vec<ParamInfo>,
}

const fn unit(name: &'static str, required: bool) -> ParamInfo {
    ParamInfo {
        name,
        ty: "number",
        required,
        minimum: Some(0.0),
        maximum: Some(1.0),
        default: None,
    }
}

/// Model descriptors with their parameter schemas.
pub fn model_catalog() -> Vec<ModelInfo> {
    let count = |name| ParamInfo {
        name,
        ty: "integer",
        required: false,
        minimum: Some(0.0),
        maximum: None,
        default: None,
    };
    let positive = |name| ParamInfo {
        name,
        ty: "number",
        required: false,
        minimum: Some(0.0),
        maximum: None,
        default: None,
    };
    vec![
        ModelInfo {
            kind: "constant",
            description: "Fixed bargaining weight alpha",
            params: vec![unit("alpha", true)],
        },
        ModelInfo {
            kind: "perceptions",
            description: "alpha = 1/2 + (p11 + p12 - p21 - p22)/4; give p11..p22, or strength inputs \
                          (licensors, licensees, market_share_gain, market_share_desired, patent_age, \
                          patent_life) with optional p21, p22",
            params: vec![
                unit("p11", false),
                unit("p12", false),
                ParamInfo { default: Some(DEFAULT_P21), ..unit("p21", false) },
                ParamInfo { default: Some(DEFAULT_P22), ..unit("p22", false) },
                count("licensors"),
                ParamInfo { minimum: Some(1.0), ..count("licensees") },
                unit("market_share_gain", false),
                unit("market_share_desired", false),
                positive("patent_age"),
                positive("patent_life"),
            ],
        },
        ModelInfo {
            kind: "case1",
            description: "alpha = 1/2 + (d1 - d2)/2",
            params: vec![],
        },
        ModelInfo {
            kind: "case2",
            description: "alpha = d1/(d1 + d2); 1/2 at the origin",
            params: vec![],
        },
        ModelInfo {
            kind: "case3",
            description: "licensor strength d1/(d1 + d2), licensee strength (1 - d1)/(2 - d1 - d2); 1/2 at the origin",
            params: vec![],
        },
        ModelInfo {
            kind: "violating-demo",
            description: "alpha = 1/2 + (d1 + 1/3 - d1/(d1 + d2) - (1 - d1))/4; not Pareto efficient near the origin",
            params: vec![],
        },
        ModelInfo {
            kind: "composite",
            description: "Expression tree over const, d1, d2, competitors, market_share, patent_life, \
                          add, sub, mul, div, neg, min, max; must stay within [0, 1] on the feasible region",
            params: vec![ParamInfo {
                name: "expr",
                ty: "expression",
                required: true,
                minimum: None,
                maximum: None,
                default: None,
            }],
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinancialsInput {
    pub operating_revenue: f64,
    pub operating_cost: f64,
}

impl FinancialsInput {
    pub fn profile(&self) -> Result<FinancialProfile> {
        FinancialProfile::new(self.operating_revenue, self.operating_cost)
    }
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Disagreement payoffs as given by a caller: fractions of operating income,
/// or money amounts when `normalized` is false.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisagreementInput {
    pub d1: f64,
    pub d2: f64,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub normalized: bool,
}

impl DisagreementInput {
    pub fn resolve(&self, financials: Option<&FinancialProfile>) -> Result<DisagreementPoint> {
        if self.normalized {
            DisagreementPoint::new(self.d1, self.d2)
        } else {
            let fin = financials.ok_or_else(|| {
                Error::InvalidInput("raw (money) disagreement payoffs require financials".into())
            })?;
            normalize_disagreement(self.d1, self.d2, fin)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRequest {
    #[serde(flatten)]
    pub disagreement: DisagreementInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub financials: Option<FinancialsInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operating_margin: Option<f64>,
    /// Fail instead of applying the symmetric limit at the origin.
    #[serde(default, skip_serializing_if = "is_false")]
    pub strict: bool,
    /// For case models, report the closed-form royalty.
    #[serde(default, skip_serializing_if = "is_false")]
    pub closed_form: bool,
}

impl SolveRequest {
    pub fn new(d1: f64, d2: f64) -> Self {
        Self {
            disagreement: DisagreementInput {
                d1,
                d2,
                normalized: true,
            },
            alpha: None,
            model: None,
            financials: None,
            operating_margin: None,
            strict: false,
            closed_form: false,
        }
    }

    fn policy(&self) -> OriginPolicy {
        if self.strict {
            OriginPolicy::Strict
        } else {
            OriginPolicy::SymmetricLimit
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profits {
    pub profit_1: f64,
    pub profit_2: f64,
    pub surplus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResponse {
    pub royalty_share: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub royalty_rate: Option<f64>,
    pub alpha: f64,
    pub d1: f64,
    pub d2: f64,
    pub surplus_share: f64,
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profits: Option<Profits>,
    pub warnings: Vec<String>,
}

fn resolve_model(alpha: Option<f64>, model: Option<&ModelDescriptor>) -> Result<WeightModel> {
    match (alpha, model) {
        (Some(alpha), None) => WeightModel::constant(alpha),
        (None, Some(descriptor)) => descriptor.resolve(),
        (Some(_), Some(_)) => Err(Error::InvalidInput(
            "give either alpha or a model, not both".into(),
        )),
        (None, None) => Err(Error::InvalidInput("a bargaining weight (alpha or model) is required".into())),
    }
}

/// Solves one bargain end to end.
pub fn solve(req: &SolveRequest) -> Result<SolveResponse> {
    let fin = req.financials.as_ref().map(FinancialsInput::profile).transpose()?;
    let d = req.disagreement.resolve(fin.as_ref())?;
    let model = resolve_model(req.alpha, req.model.as_ref())?;
    d.ensure_feasible()?;

    let alpha = model.alpha(&d, req.policy())?;
    let mut warnings: Vec<String> = alpha.warnings.iter().map(ToString::to_string).collect();
    let royalty_share = match (&model, req.closed_form) {
        (WeightModel::Case(case), true) => {
            warnings.clear();
            case_royalty_closed_form(*case, &d)?
        }
        (_, true) => {
            return Err(Error::InvalidInput(
                "closed_form applies only to case1, case2 and case3".into(),
            ))
        }
        (_, false) => solve_royalty_share(&d, alpha.value)?,
    };

    let margin = match (fin.as_ref(), req.operating_margin) {
        (Some(f), Some(m)) if (f.operating_margin() - m).abs() > 1e-12 => {
            return Err(Error::InvalidFinancials(format!(
                "operating margin {m} disagrees with financials ({})",
                f.operating_margin()
            )))
        }
        (Some(f), _) => Some(f.operating_margin()),
        (None, m) => m,
    };
    let royalty_rate = margin
        .map(|m| crate::model::royalty_rate(royalty_share, m))
        .transpose()?;
    let profits = fin.map(|f| {
        let income = f.operating_income();
        let profit_1 = royalty_share * income;
        Profits {
            profit_1,
            profit_2: income - profit_1,
            surplus: income * d.surplus(),
        }
    });

    Ok(SolveResponse {
        royalty_share,
        royalty_rate,
        alpha: alpha.value,
        d1: d.d1(),
        d2: d.d2(),
        surplus_share: d.surplus(),
        model: model.name().to_string(),
        profits,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaRequest {
    pub model: ModelDescriptor,
    #[serde(flatten)]
    pub disagreement: DisagreementInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub financials: Option<FinancialsInput>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaResponse {
    pub alpha: f64,
    pub model: String,
    pub d1: f64,
    pub d2: f64,
    pub warnings: Vec<String>,
}

pub fn alpha(req: &AlphaRequest) -> Result<AlphaResponse> {
    let fin = req.financials.as_ref().map(FinancialsInput::profile).transpose()?;
    let d = req.disagreement.resolve(fin.as_ref())?;
    let model = req.model.resolve()?;
    let policy = if req.strict {
        OriginPolicy::Strict
    } else {
        OriginPolicy::SymmetricLimit
    };
    let eval = model.alpha(&d, policy)?;
    Ok(AlphaResponse {
        alpha: eval.value,
        model: model.name().to_string(),
        d1: d.d1(),
        d2: d.d2(),
        warnings: eval.warnings.iter().map(ToString::to_string).collect(),
    })
}

fn default_grid_step() -> f64 {
    ScanConfig::default().grid_step
}

fn default_fd_step() -> f64 {
    ScanConfig::default().fd_step
}

fn default_tol() -> f64 {
    ScanConfig::default().tol
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRequest {
    pub model: ModelDescriptor,
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub strict: bool,
}

/// Runs a Pareto scan, refusing grids above `max_nodes`.
pub fn scan(req: &ScanRequest, max_nodes: u64) -> Result<ParetoReport> {
    let model = req.model.resolve()?;
    let config = ScanConfig {
        grid_step: req.grid_step,
        fd_step: req.fd_step,
        tol: req.tol,
        policy: if req.strict {
            OriginPolicy::Strict
        } else {
            OriginPolicy::SymmetricLimit
        },
    };
    config.validate()?;
    let nodes = grid_node_count(req.grid_step);
    if nodes > max_nodes {
        return Err(Error::GridTooLarge {
            nodes,
            limit: max_nodes,
        });
    }
    pareto_scan(&model, &config)
}

fn default_d1_step() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRequest {
    pub model: ModelDescriptor,
    pub levels: Vec<f64>,
    #[serde(default = "default_d1_step")]
    pub d1_step: f64,
    #[serde(default)]
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyResponse {
    pub model: String,
    pub curves: Vec<FamilyCurve>,
}

pub fn family(req: &FamilyRequest) -> Result<FamilyResponse> {
    let model = req.model.resolve()?;
    let policy = if req.strict {
        OriginPolicy::Strict
    } else {
        OriginPolicy::SymmetricLimit
    };
    let curves = solution_family(&model, &req.levels, req.d1_step, policy)?;
    Ok(FamilyResponse {
        model: model.name().to_string(),
        curves,
    })
}

pub const DEFAULT_CANVAS_WIDTH: f64 = 800.0;
pub const DEFAULT_CANVAS_HEIGHT: f64 = 800.0;
pub const DEFAULT_TICK_STEP: f64 = 0.1;

/// Chart options shared by the CLI and the service.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NomographRequest {
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub d1: Option<f64>,
    #[serde(default)]
    pub d2: Option<f64>,
    #[serde(default)]
    pub width: Option<f64>,
    #[serde(default)]
    pub height: Option<f64>,
    #[serde(default)]
    pub tick: Option<f64>,
}

/// Renders the chart, with an isopleth when all of `alpha`, `d1`, `d2` are
/// given.
pub fn nomograph_svg(req: &NomographRequest) -> Result<String> {
    let layout = build_layout(
        req.width.unwrap_or(DEFAULT_CANVAS_WIDTH),
        req.height.unwrap_or(DEFAULT_CANVAS_HEIGHT),
        TickSteps::uniform(req.tick.unwrap_or(DEFAULT_TICK_STEP)),
    )?;
    let overlay = match (req.alpha, req.d1, req.d2) {
        (None, None, None) => None,
        (Some(alpha), Some(d1), Some(d2)) => {
            Some(Isopleth::new(&layout, alpha, DisagreementPoint::new(d1, d2)?)?)
        }
        _ => {
            return Err(Error::InvalidInput(
                "an isopleth needs all of alpha, d1 and d2".into(),
            ))
        }
    };
    Ok(render_svg(&layout, overlay.as_ref()))
}

/// Error body returned by the service and by CLI `--json` failures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

impl From<&Error> for ErrorBody {
    fn from(e: &Error) -> Self {
        Self {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}
