//! Financial domain types and the closed-form normalized asymmetric
//! Nash bargaining solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rounding slack allowed when checking `d1 + d2 <= 1`.
///
/// Decimal inputs such as `0.15 + 0.85` can land a few ulps away from 1.0;
/// anything beyond this slack is a genuine excess and yields [`Error::NoDeal`].
pub const FEASIBILITY_SLACK: f64 = 4.0 * f64::EPSILON;

/// Operating figures of the licensed product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinancialProfile {
    operating_revenue: f64,
    operating_cost: f64,
    operating_income: f64,
    operating_margin: f64,
}

impl FinancialProfile {
    /// Builds a profile from revenue and cost. Income and margin are derived;
    /// a product that does not turn an operating profit is rejected.
    pub fn new(operating_revenue: f64, operating_cost: f64) -> Result<Self> {
        if !operating_revenue.is_finite() || !operating_cost.is_finite() {
            return Err(Error::InvalidFinancials(
                "revenue and cost must be finite".into(),
            ));
        }
        if operating_revenue < 0.0 || operating_cost < 0.0 {
            return Err(Error::InvalidFinancials(
                "revenue and cost must be non-negative".into(),
            ));
        }
        let operating_income = operating_revenue - operating_cost;
        if operating_revenue <= 0.0 || operating_income <= 0.0 {
            return Err(Error::InvalidFinancials(format!(
                "operating income must be positive (revenue {operating_revenue}, cost {operating_cost})"
            )));
        }
        Ok(Self {
            operating_revenue,
            operating_cost,
            operating_income,
            operating_margin: operating_income / operating_revenue,
        })
    }

    pub fn operating_revenue(&self) -> f64 {
        self.operating_revenue
    }

    pub fn operating_cost(&self) -> f64 {
        self.operating_cost
    }

    pub fn operating_income(&self) -> f64 {
        self.operating_income
    }

    pub fn operating_margin(&self) -> f64 {
        self.operating_margin
    }

    /// Same margin, income multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.operating_revenue * k, self.operating_cost * k)
    }
}

/// Disagreement payoffs as fractions of operating income.
///
/// Each coordinate lies in `[0, 1]`. Whether their sum admits a deal is
/// checked when solving, not here, so that infeasible points can still be
/// represented and reported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisagreementPoint {
    d1: f64,
    d2: f64,
}

impl DisagreementPoint {
    pub fn new(d1: f64, d2: f64) -> Result<Self> {
        check_unit("d1", d1)?;
        check_unit("d2", d2)?;
        Ok(Self { d1, d2 })
    }

    /// The origin, where neither party has an outside option.
    pub const ORIGIN: Self = Self { d1: 0.0, d2: 0.0 };

    /// Licensor's normalized disagreement payoff.
    pub fn d1(&self) -> f64 {
        self.d1
    }

    /// Licensee's normalized disagreement payoff.
    pub fn d2(&self) -> f64 {
        self.d2
    }

    pub fn total(&self) -> f64 {
        self.d1 + self.d2
    }

    pub fn is_origin(&self) -> bool {
        self.d1 == 0.0 && self.d2 == 0.0
    }

    pub fn is_feasible(&self) -> bool {
        self.total() <= 1.0 + FEASIBILITY_SLACK
    }

    pub fn ensure_feasible(&self) -> Result<()> {
        if self.is_feasible() {
            Ok(())
        } else {
            Err(Error::NoDeal {
                d1: self.d1,
                d2: self.d2,
            })
        }
    }

    /// Normalized surplus `1 - d1 - d2`, clamped at zero inside the slack.
    pub fn surplus(&self) -> f64 {
        (1.0 - self.d1 - self.d2).max(0.0)
    }

    /// The same point with the parties' roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            d1: self.d2,
            d2: self.d1,
        }
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::NormalizedOutOfRange { name, value })
    }
}

pub(crate) fn check_weight(alpha: f64) -> Result<()> {
    if alpha.is_finite() && (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidWeight(alpha))
    }
}

/// Result of splitting operating income between licensor and licensee.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BargainOutcome {
    pub alpha: f64,
    /// Licensor's share of operating income, `r / O_M`.
    pub royalty_share: f64,
    /// Royalty as a fraction of operating revenue.
    pub royalty_rate: f64,
    pub profit_1: f64,
    pub profit_2: f64,
    /// Operating income left after both disagreement payoffs, in money.
    pub surplus: f64,
}

/// Divides money disagreement payoffs by operating income.
pub fn normalize_disagreement(d1: f64, d2: f64, fin: &FinancialProfile) -> Result<DisagreementPoint> {
    for value in [d1, d2] {
        if value.is_nan() || value < 0.0 {
            return Err(Error::NegativePayoff(value));
        }
    }
    let income = fin.operating_income();
    DisagreementPoint::new(d1 / income, d2 / income)
}

/// Licensor's share of operating income: `d1 + alpha (1 - d1 - d2)`.
pub fn solve_royalty_share(d: &DisagreementPoint, alpha: f64) -> Result<f64> {
    d.ensure_feasible()?;
    check_weight(alpha)?;
    Ok(d.d1() + alpha * d.surplus())
}

/// Equal bargaining power: `(1 + d1 - d2) / 2`.
pub fn solve_classic(d: &DisagreementPoint) -> Result<f64> {
    d.ensure_feasible()?;
    Ok((1.0 + d.d1() - d.d2()) / 2.0)
}

/// Converts a share of operating income to a rate on operating revenue.
pub fn royalty_rate(royalty_share: f64, operating_margin: f64) -> Result<f64> {
    if !(operating_margin.is_finite() && operating_margin > 0.0 && operating_margin <= 1.0) {
        return Err(Error::InvalidFinancials(format!(
            "operating margin {operating_margin} is outside (0, 1]"
        )));
    }
    Ok(royalty_share * operating_margin)
}

/// Splits operating income according to the asymmetric solution.
pub fn partition_profits(
    fin: &FinancialProfile,
    d: &DisagreementPoint,
    alpha: f64,
) -> Result<BargainOutcome> {
    let royalty_share = solve_royalty_share(d, alpha)?;
    let income = fin.operating_income();
    let profit_1 = royalty_share * income;
    Ok(BargainOutcome {
        alpha,
        royalty_share,
        royalty_rate: royalty_share * fin.operating_margin(),
        profit_1,
        profit_2: income - profit_1,
        surplus: income * d.surplus(),
    })
}
