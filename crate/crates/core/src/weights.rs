//! Bargaining-weight estimation.
//!
//! A weight model maps a disagreement point to the licensor's bargaining
//! weight `alpha`. Models range from a fixed constant, through the perception
//! matrix ansatz, to weights driven entirely by the disagreement payoffs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::feasibility_region;
use crate::error::{Error, Result};
use crate::model::{check_weight, solve_royalty_share, DisagreementPoint};

/// Each party's strength as perceived by each party.
///
/// `p_mn` is party `m`'s bargaining strength as perceived by party `n`;
/// party 1 is the licensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerceptionMatrix {
    p11: f64,
    p12: f64,
    p21: f64,
    p22: f64,
}

impl PerceptionMatrix {
    pub fn new(p11: f64, p12: f64, p21: f64, p22: f64) -> Result<Self> {
        for (name, value) in [("p11", p11), ("p12", p12), ("p21", p21), ("p22", p22)] {
            if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
                return Err(Error::InvalidInput(format!(
                    "perception {name} = {value} is outside [0, 1]"
                )));
            }
        }
        Ok(Self { p11, p12, p21, p22 })
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.p11, self.p12, self.p21, self.p22]
    }
}

/// `1/2 + (p11 + p12 - p21 - p22) / 4`, the average of the licensor's
/// averaged strength and one minus the licensee's averaged strength.
pub fn alpha_from_perceptions(p: &PerceptionMatrix) -> f64 {
    0.5 + 0.25 * (p.p11 + p.p12 - p.p21 - p.p22)
}

/// Market facts feeding the three licensor-strength sub-models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrengthInputs {
    pub licensors: u64,
    pub licensees: u64,
    /// Market share the licensee gains from the deal.
    pub market_share_gain: f64,
    /// Fraction of the market the licensee realistically desires.
    pub market_share_desired: f64,
    /// Years since the patent issued.
    pub patent_age: f64,
    pub patent_life: f64,
}

impl StrengthInputs {
    /// Perception matrix where the licensor weighs competitors and market
    /// share equally and the licensee looks only at remaining patent life.
    pub fn perception_matrix(&self, p21: f64, p22: f64) -> Result<PerceptionMatrix> {
        let competitors = strength_competitors(self.licensors, self.licensees)?;
        let share = strength_market_share(self.market_share_gain, self.market_share_desired)?;
        let life = strength_patent_life(self.patent_age, self.patent_life)?;
        PerceptionMatrix::new((competitors + share) / 2.0, life, p21, p22)
    }
}

/// `1 - min(1, licensors / licensees)`.
pub fn strength_competitors(licensors: u64, licensees: u64) -> Result<f64> {
    if licensees == 0 {
        return Err(Error::InvalidInput(
            "number of licensees must be at least one".into(),
        ));
    }
    Ok(1.0 - (licensors as f64 / licensees as f64).min(1.0))
}

/// `s / S` for market share gained `s` out of desired share `S`.
pub fn strength_market_share(gain: f64, desired: f64) -> Result<f64> {
    if !(desired.is_finite() && desired > 0.0 && desired <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "desired market share {desired} must be in (0, 1]"
        )));
    }
    if !(gain.is_finite() && gain >= 0.0 && gain <= desired) {
        return Err(Error::InvalidInput(format!(
            "market share gain {gain} must be in [0, {desired}]"
        )));
    }
    Ok(gain / desired)
}

/// `1 - t / T` for a patent `t` years into a life of `T` years.
pub fn strength_patent_life(age: f64, life: f64) -> Result<f64> {
    if !(life.is_finite() && life > 0.0) {
        return Err(Error::InvalidInput(format!(
            "patent life {life} must be positive"
        )));
    }
    if !(age.is_finite() && age >= 0.0 && age <= life) {
        return Err(Error::InvalidInput(format!(
            "patent age {age} must be in [0, {life}]"
        )));
    }
    Ok(1.0 - age / life)
}

/// Weight built from the strength sub-models; the licensee's perceptions of
/// its own strength from each side are given directly.
pub fn example_alpha(inputs: &StrengthInputs, p21: f64, p22: f64) -> Result<f64> {
    Ok(alpha_from_perceptions(&inputs.perception_matrix(p21, p22)?))
}

/// The three symmetric disagreement-driven weight cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// Each party's strength is its own disagreement payoff.
    One,
    /// Each party's strength is its fraction of the combined disagreement payoff.
    Two,
    /// As `Two` for the licensor; the licensee's strength is derived from
    /// the licensor's weakness.
    Three,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::One, Case::Two, Case::Three];

    pub fn number(self) -> u8 {
        match self {
            Case::One => 1,
            Case::Two => 2,
            Case::Three => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Case::One),
            2 => Some(Case::Two),
            3 => Some(Case::Three),
            _ => None,
        }
    }
}

/// How to treat disagreement-driven weights that are undefined at `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginPolicy {
    /// Use the symmetric limit `alpha = 1/2` and attach a warning.
    #[default]
    SymmetricLimit,
    /// Fail with [`Error::DegenerateOrigin`].
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Warning {
    /// The symmetric-limit convention was applied at the origin.
    DegenerateOrigin,
    /// Case 3 royalty from the weight pipeline differs from the
    /// closed-form expression for the same case.
    Case3ClosedFormDiffers,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::DegenerateOrigin => {
                f.write_str("degenerate origin: weight undefined at d1 = d2 = 0, symmetric limit alpha = 1/2 used")
            }
            Warning::Case3ClosedFormDiffers => f.write_str(
                "case3: royalty from d1 + alpha (1 - d1 - d2) differs from the closed form \
                 (d2^2 - d1^2 - 2 d2 + d1 + 1) / (2 - d1 - d2), which corresponds to \
                 alpha = (1 - d2) / (2 - d1 - d2); request the closed form to use it",
            ),
        }
    }
}

/// A value together with any non-fatal conditions met while computing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: f64,
    pub warnings: Vec<Warning>,
}

impl Evaluation {
    fn plain(value: f64) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }
}

fn origin_limit(policy: OriginPolicy) -> Result<Evaluation> {
    match policy {
        OriginPolicy::SymmetricLimit => Ok(Evaluation {
            value: 0.5,
            warnings: vec![Warning::DegenerateOrigin],
        }),
        OriginPolicy::Strict => Err(Error::DegenerateOrigin),
    }
}

/// Bargaining weight for one of the disagreement-driven cases.
pub fn case_alpha(case: Case, d: &DisagreementPoint, policy: OriginPolicy) -> Result<Evaluation> {
    let (d1, d2) = (d.d1(), d.d2());
    let s = d1 + d2;
    match case {
        Case::One => Ok(Evaluation::plain(0.5 + (d1 - d2) / 2.0)),
        _ if d.is_origin() => origin_limit(policy),
        // Both rational forms reduce to 1/2 on the diagonal; avoid rounding there.
        _ if d1 == d2 => Ok(Evaluation::plain(0.5)),
        Case::Two => Ok(Evaluation::plain(d1 / s)),
        Case::Three => {
            let numerator = d1 * d1 + (2.0 * d2 - 3.0) * d1 + d2 * d2 - d2;
            let denominator = 2.0 * s * (-2.0 + s);
            Ok(Evaluation::plain(numerator / denominator))
        }
    }
}

/// Royalty share obtained by feeding [`case_alpha`] into the asymmetric
/// solution.
pub fn case_royalty(case: Case, d: &DisagreementPoint, policy: OriginPolicy) -> Result<Evaluation> {
    d.ensure_feasible()?;
    let mut alpha = case_alpha(case, d, policy)?;
    alpha.value = solve_royalty_share(d, alpha.value)?;
    Ok(alpha)
}

/// Closed-form royalty for each case.
///
/// Cases 1 and 2 agree with [`case_royalty`]. The Case 3 expression
/// `(d2^2 - d1^2 - 2 d2 + d1 + 1) / (2 - d1 - d2)` does not: it equals the
/// asymmetric solution with `alpha = (1 - d2) / (2 - d1 - d2)`, i.e. the
/// licensee-side weight alone rather than the averaged one.
pub fn case_royalty_closed_form(case: Case, d: &DisagreementPoint) -> Result<f64> {
    d.ensure_feasible()?;
    let (d1, d2) = (d.d1(), d.d2());
    match case {
        Case::One => Ok((d2 * d2 - d1 * d1 + 2.0 * (d1 - d2) + 1.0) / 2.0),
        Case::Two if d.is_origin() => Err(Error::DegenerateOrigin),
        Case::Two => Ok(d1 / (d1 + d2)),
        Case::Three => Ok((d2 * d2 - d1 * d1 - 2.0 * d2 + d1 + 1.0) / (2.0 - d1 - d2)),
    }
}

/// A deliberately ill-behaved mixed weight, Pareto inefficient near the
/// origin:
/// `1/2 + (1/4) [d1 + 1/3 - d1 / (d1 + d2) - (1 - d1)]`.
pub fn violating_demo_alpha(d: &DisagreementPoint) -> Result<f64> {
    if d.is_origin() {
        return Err(Error::DegenerateOrigin);
    }
    let (d1, d2) = (d.d1(), d.d2());
    Ok(0.5 + 0.25 * (d1 + 1.0 / 3.0 - d1 / (d1 + d2) - (1.0 - d1)))
}

/// Expression tree for user-composed weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Const { value: f64 },
    D1,
    D2,
    Competitors { licensors: u64, licensees: u64 },
    MarketShare { gain: f64, desired: f64 },
    PatentLife { age: f64, life: f64 },
    Add { args: Vec<Expr> },
    Sub { lhs: Box<Expr>, rhs: Box<Expr> },
    Mul { args: Vec<Expr> },
    Div { lhs: Box<Expr>, rhs: Box<Expr> },
    Neg { arg: Box<Expr> },
    Min { args: Vec<Expr> },
    Max { args: Vec<Expr> },
}

impl Expr {
    pub fn constant(value: f64) -> Self {
        Expr::Const { value }
    }

    pub fn difference(lhs: Expr, rhs: Expr) -> Self {
        Expr::Sub {
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn quotient(lhs: Expr, rhs: Expr) -> Self {
        Expr::Div {
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn evaluate(&self, d: &DisagreementPoint) -> Result<f64> {
        let fold = |args: &[Expr], init: f64, f: fn(f64, f64) -> f64| -> Result<f64> {
            args.iter().try_fold(init, |acc, e| Ok(f(acc, e.evaluate(d)?)))
        };
        let value = match self {
            Expr::Const { value } => *value,
            Expr::D1 => d.d1(),
            Expr::D2 => d.d2(),
            Expr::Competitors {
                licensors,
                licensees,
            } => strength_competitors(*licensors, *licensees)?,
            Expr::MarketShare { gain, desired } => strength_market_share(*gain, *desired)?,
            Expr::PatentLife { age, life } => strength_patent_life(*age, *life)?,
            Expr::Add { args } => fold(args, 0.0, |a, b| a + b)?,
            Expr::Mul { args } => fold(args, 1.0, |a, b| a * b)?,
            Expr::Sub { lhs, rhs } => lhs.evaluate(d)? - rhs.evaluate(d)?,
            Expr::Div { lhs, rhs } => {
                let denominator = rhs.evaluate(d)?;
                if denominator == 0.0 {
                    return Err(if d.is_origin() {
                        Error::DegenerateOrigin
                    } else {
                        Error::InvalidInput("division by zero in weight expression".into())
                    });
                }
                lhs.evaluate(d)? / denominator
            }
            Expr::Neg { arg } => -arg.evaluate(d)?,
            Expr::Min { args } | Expr::Max { args } if args.is_empty() => {
                return Err(Error::InvalidInput("min/max need at least one argument".into()))
            }
            Expr::Min { args } => fold(args, f64::INFINITY, f64::min)?,
            Expr::Max { args } => fold(args, f64::NEG_INFINITY, f64::max)?,
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::InvalidInput("weight expression produced a non-finite value".into()))
        }
    }

    /// The ill-behaved mixed weight of [`violating_demo_alpha`] as a tree.
    pub fn violating_demo() -> Self {
        let bracket = Expr::Add {
            args: vec![
                Expr::D1,
                Expr::constant(1.0 / 3.0),
                Expr::Neg {
                    arg: Box::new(Expr::quotient(
                        Expr::D1,
                        Expr::Add {
                            args: vec![Expr::D1, Expr::D2],
                        },
                    )),
                },
                Expr::Neg {
                    arg: Box::new(Expr::difference(Expr::constant(1.0), Expr::D1)),
                },
            ],
        };
        Expr::Add {
            args: vec![
                Expr::constant(0.5),
                Expr::Mul {
                    args: vec![Expr::constant(0.25), bracket],
                },
            ],
        }
    }
}

/// Grid step used to check that a composite weight stays inside `[0, 1]`.
pub const COMPOSITE_SAMPLE_STEP: f64 = 0.005;

/// A rule producing the licensor's bargaining weight.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightModel {
    Constant(f64),
    Perceptions(PerceptionMatrix),
    Case(Case),
    ViolatingDemo,
    Composite(Expr),
}

impl WeightModel {
    pub fn constant(alpha: f64) -> Result<Self> {
        check_weight(alpha)?;
        Ok(WeightModel::Constant(alpha))
    }

    /// Accepts the expression only if it evaluates inside `[0, 1]` on every
    /// node of the feasible triangle sampled at [`COMPOSITE_SAMPLE_STEP`].
    /// The origin is skipped when the expression is undefined there.
    pub fn composite(expr: Expr) -> Result<Self> {
        for (d1, d2) in feasibility_region(COMPOSITE_SAMPLE_STEP) {
            let d = DisagreementPoint::new(d1, d2)?;
            match expr.evaluate(&d) {
                Ok(alpha) if (0.0..=1.0).contains(&alpha) => {}
                Ok(alpha) => {
                    return Err(Error::InvalidInput(format!(
                        "composite weight evaluates to {alpha} at (d1 = {d1}, d2 = {d2}), outside [0, 1]"
                    )))
                }
                Err(Error::DegenerateOrigin) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(WeightModel::Composite(expr))
    }

    /// Identifier used by the CLI and service.
    pub fn name(&self) -> &'static str {
        match self {
            WeightModel::Constant(_) => "constant",
            WeightModel::Perceptions(_) => "perceptions",
            WeightModel::Case(Case::One) => "case1",
            WeightModel::Case(Case::Two) => "case2",
            WeightModel::Case(Case::Three) => "case3",
            WeightModel::ViolatingDemo => "violating-demo",
            WeightModel::Composite(_) => "composite",
        }
    }

    pub fn alpha(&self, d: &DisagreementPoint, policy: OriginPolicy) -> Result<Evaluation> {
        let mut eval = match self {
            WeightModel::Constant(alpha) => Evaluation::plain(*alpha),
            WeightModel::Perceptions(p) => Evaluation::plain(alpha_from_perceptions(p)),
            WeightModel::Case(case) => case_alpha(*case, d, policy)?,
            WeightModel::ViolatingDemo => Evaluation::plain(violating_demo_alpha(d)?),
            WeightModel::Composite(expr) => Evaluation::plain(expr.evaluate(d)?),
        };
        check_weight(eval.value)?;
        if matches!(self, WeightModel::Case(Case::Three)) {
            eval.warnings.push(Warning::Case3ClosedFormDiffers);
        }
        Ok(eval)
    }

    /// Royalty share `r / O_M` under this model.
    pub fn royalty(&self, d: &DisagreementPoint, policy: OriginPolicy) -> Result<Evaluation> {
        d.ensure_feasible()?;
        let mut eval = self.alpha(d, policy)?;
        eval.value = solve_royalty_share(d, eval.value)?;
        Ok(eval)
    }

    /// Royalty share as a bare number, for scans that don't track warnings.
    pub fn royalty_share(&self, d: &DisagreementPoint, policy: OriginPolicy) -> Result<f64> {
        self.royalty(d, policy).map(|e| e.value)
    }
}
