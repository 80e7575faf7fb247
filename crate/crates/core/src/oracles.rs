//! Numeric checks that do not share code with the closed forms.
//!
//! [`maximize_nash_product`] searches the Pareto frontier `pi1 + pi2 = O_I`
//! directly for the maximum of `(pi1 - d1)^alpha (pi2 - d2)^(1 - alpha)`.
//! [`rubinstein_limit_share`] evaluates the subgame-perfect split of the
//! alternating-offers game whose vanishing-interval limit is the Case 2
//! royalty.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{normalize_disagreement, partition_profits, DisagreementPoint, FinancialProfile};

/// Coarse grid intervals before golden-section refinement.
pub const COARSE_GRID_INTERVALS: usize = 10_000;
/// Refinement stops once the bracket is narrower than this times `O_I`.
pub const REFINE_WIDTH: f64 = 1e-10;
const MAX_REFINE_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximizerResult {
    pub pi1_star: f64,
    pub pi2_star: f64,
    /// Nash product of the income-normalized gains at the optimum.
    pub nash_product_value: f64,
    /// Golden-section iterations after the coarse grid.
    pub iterations: usize,
}

/// `((pi1 - d1) / O_I)^alpha ((O_I - pi1 - d2) / O_I)^(1 - alpha)`.
pub fn nash_product(operating_income: f64, d1: f64, d2: f64, alpha: f64, pi1: f64) -> f64 {
    let gain1 = ((pi1 - d1) / operating_income).max(0.0);
    let gain2 = ((operating_income - pi1 - d2) / operating_income).max(0.0);
    gain1.powf(alpha) * gain2.powf(1.0 - alpha)
}

fn log_nash_product(operating_income: f64, d1: f64, d2: f64, alpha: f64, pi1: f64) -> f64 {
    let gain1 = pi1 - d1;
    let gain2 = operating_income - pi1 - d2;
    if gain1 <= 0.0 || gain2 <= 0.0 {
        return f64::NEG_INFINITY;
    }
    alpha * gain1.ln() + (1.0 - alpha) * gain2.ln()
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns the bracket midpoint and the number of iterations.
pub fn golden_section_maximize<F>(f: F, mut lo: f64, mut hi: f64, width: f64) -> (f64, usize)
where
    F: Fn(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while hi - lo > width && iterations < MAX_REFINE_ITERATIONS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        iterations += 1;
    }
    (0.5 * (lo + hi), iterations)
}

/// Maximizes the asymmetric Nash product over the frontier in money terms.
///
/// The objective is taken in log space; it diverges at both ends of
/// `[d1, O_I - d2]`, so `alpha` of exactly 0 or 1 and a zero surplus are
/// resolved to the matching endpoint.
pub fn maximize_nash_product(
    operating_income: f64,
    d1: f64,
    d2: f64,
    alpha: f64,
) -> Result<MaximizerResult> {
    if !(operating_income.is_finite() && operating_income > 0.0) {
        return Err(Error::InvalidFinancials(format!(
            "operating income {operating_income} must be positive"
        )));
    }
    for value in [d1, d2] {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::NegativePayoff(value));
        }
    }
    if !(alpha.is_finite() && (0.0..=1.0).contains(&alpha)) {
        return Err(Error::InvalidWeight(alpha));
    }
    if d1 + d2 > operating_income * (1.0 + 4.0 * f64::EPSILON) {
        return Err(Error::Infeasible {
            total: d1 + d2,
            operating_income,
        });
    }

    let lo = d1;
    let hi = (operating_income - d2).max(lo);
    let finish = |pi1: f64, iterations: usize| MaximizerResult {
        pi1_star: pi1,
        pi2_star: operating_income - pi1,
        nash_product_value: nash_product(operating_income, d1, d2, alpha, pi1),
        iterations,
    };
    if hi <= lo || alpha == 0.0 {
        return Ok(finish(lo, 0));
    }
    if alpha == 1.0 {
        return Ok(finish(hi, 0));
    }

    let objective = |pi1: f64| log_nash_product(operating_income, d1, d2, alpha, pi1);
    let n = COARSE_GRID_INTERVALS;
    let node = |k: usize| lo + (hi - lo) * (k as f64 / n as f64);
    let best = (1..n)
        .map(|k| (k, objective(node(k))))
        .fold((1, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc })
        .0;
    let (pi1, iterations) = golden_section_maximize(
        objective,
        node(best - 1),
        node(best + 1),
        REFINE_WIDTH * operating_income,
    );
    Ok(finish(pi1, iterations))
}

/// Residual of the first-order condition
/// `(1 - alpha)(pi1 - d1) - alpha (pi2 - d2)`.
pub fn first_order_residual(result: &MaximizerResult, d1: f64, d2: f64, alpha: f64) -> f64 {
    (1.0 - alpha) * (result.pi1_star - d1) - alpha * (result.pi2_star - d2)
}

/// Alternating-offers game parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RubinsteinParams {
    /// Party 1 (licensor, first proposer) discount rate per unit time.
    pub discount_rate_1: f64,
    pub discount_rate_2: f64,
    /// Time between offers.
    pub offer_interval: f64,
}

impl RubinsteinParams {
    /// Rates must be non-negative and not both zero; the interval positive.
    /// A zero rate is the patient-party limit, which the share formula handles.
    pub fn new(discount_rate_1: f64, discount_rate_2: f64, offer_interval: f64) -> Result<Self> {
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !nonneg(discount_rate_1) || !nonneg(discount_rate_2) {
            return Err(Error::InvalidInput("discount rates must be non-negative".into()));
        }
        if discount_rate_1 + discount_rate_2 == 0.0 {
            return Err(Error::DegenerateOrigin);
        }
        if !(offer_interval.is_finite() && offer_interval > 0.0) {
            return Err(Error::InvalidInput("offer interval must be positive".into()));
        }
        Ok(Self {
            discount_rate_1,
            discount_rate_2,
            offer_interval,
        })
    }

    /// Rates chosen so that `d1 / d2 = rate_2 / rate_1`, with common scale `k`.
    pub fn from_disagreement(d: &DisagreementPoint, offer_interval: f64, scale: f64) -> Result<Self> {
        if d.is_origin() {
            return Err(Error::DegenerateOrigin);
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidInput("rate scale must be positive".into()));
        }
        Self::new(scale * d.d2(), scale * d.d1(), offer_interval)
    }

    /// Subgame-perfect share of the first proposer:
    /// `(1 - delta_2) / (1 - delta_1 delta_2)` with `delta_i = exp(-r_i interval)`.
    pub fn first_proposer_share(&self) -> f64 {
        let dt = self.offer_interval;
        let one_minus_delta_2 = -(-self.discount_rate_2 * dt).exp_m1();
        let one_minus_product = -(-(self.discount_rate_1 + self.discount_rate_2) * dt).exp_m1();
        one_minus_delta_2 / one_minus_product
    }
}

/// Licensor's share in the alternating-offers game with rates mapped from
/// the disagreement point (unit scale), licensor proposing first.
pub fn rubinstein_limit_share(d: &DisagreementPoint, offer_interval: f64) -> Result<f64> {
    Ok(RubinsteinParams::from_disagreement(d, offer_interval, 1.0)?.first_proposer_share())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub instances: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckOutcome>,
}

/// A seeded random feasible bargain in money terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomInstance {
    pub operating_income: f64,
    pub d1: f64,
    pub d2: f64,
    pub alpha: f64,
}

/// `count` instances with `O_I` uniform in `[1, 1e6]` and `(d1, d2)` uniform
/// over the feasible triangle.
pub fn random_instances(seed: u64, count: usize) -> Vec<RandomInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let operating_income = rng.random_range(1.0..=1e6);
            let (mut u1, mut u2): (f64, f64) = (rng.random(), rng.random());
            if u1 + u2 > 1.0 {
                (u1, u2) = (1.0 - u1, 1.0 - u2);
            }
            RandomInstance {
                operating_income,
                d1: u1 * operating_income,
                d2: u2 * operating_income,
                alpha: rng.random(),
            }
        })
        .collect()
}

/// Runs the oracle checks: numeric maximizer against the closed-form
/// partition, the first-order condition, and the alternating-offers limit.
pub fn verify_suite(seed: u64, instances: usize) -> Result<VerificationReport> {
    let mut agreement = 0.0f64;
    let mut first_order = 0.0f64;
    for inst in random_instances(seed, instances) {
        let numeric = maximize_nash_product(inst.operating_income, inst.d1, inst.d2, inst.alpha)?;
        let fin = FinancialProfile::new(inst.operating_income, 0.0)?;
        let d = normalize_disagreement(inst.d1, inst.d2, &fin)?;
        let closed = partition_profits(&fin, &d, inst.alpha)?;
        agreement = agreement.max((numeric.pi1_star - closed.profit_1).abs() / inst.operating_income);
        first_order = first_order
            .max(first_order_residual(&numeric, inst.d1, inst.d2, inst.alpha).abs() / inst.operating_income);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5275_6269_6e73_7465);
    let rubinstein_points = 100;
    let mut rubinstein = 0.0f64;
    for _ in 0..rubinstein_points {
        let (d1, d2) = loop {
            let (a, b): (f64, f64) = (rng.random(), rng.random());
            if a > 0.0 && b > 0.0 && a + b < 1.0 {
                break (a, b);
            }
        };
        let d = DisagreementPoint::new(d1, d2)?;
        let share = rubinstein_limit_share(&d, 1e-6)?;
        rubinstein = rubinstein.max((share - d1 / (d1 + d2)).abs());
    }

    let check = |name: &str, instances: usize, max_error: f64, tolerance: f64| CheckOutcome {
        name: name.to_string(),
        pass: max_error <= tolerance,
        instances,
        max_error,
        tolerance,
    };
    let checks = vec![
        check("oracle_agreement", instances, agreement, 1e-6),
        check("first_order_condition", instances, first_order, 1e-6),
        check("rubinstein_limit", rubinstein_points, rubinstein, 1e-4),
    ];
    Ok(VerificationReport {
        seed,
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}
