//! Pareto-efficiency scans and solution-family generation over the feasible
//! triangle `d1, d2 >= 0, d1 + d2 <= 1`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::DisagreementPoint;
use crate::weights::{OriginPolicy, WeightModel};

/// Grid coordinates `0, step, 2 step, ...` up to 1.
///
/// When `step` divides 1 the coordinates are computed as `i / n`, which keeps
/// decimal steps such as 0.01 on the nearest doubles.
fn axis(step: f64) -> Vec<f64> {
    if !(step.is_finite() && step > 0.0) {
        return Vec::new();
    }
    let ratio = 1.0 / step;
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        let n = rounded as usize;
        (0..=n).map(|i| i as f64 / n as f64).collect()
    } else {
        let n = (ratio + 1e-9).floor() as usize;
        (0..=n).map(|i| i as f64 * step).collect()
    }
}

/// All nodes of the closed feasible triangle on a square grid, ordered by
/// `d1` then `d2`. An invalid step yields no nodes.
pub fn feasibility_region(step: f64) -> Vec<(f64, f64)> {
    let coords = axis(step);
    let n = coords.len();
    let mut nodes = Vec::with_capacity(n * (n + 1) / 2);
    for (i, &d1) in coords.iter().enumerate() {
        for &d2 in &coords[..n - i] {
            nodes.push((d1, d2));
        }
    }
    nodes
}

/// Number of nodes [`feasibility_region`] would produce, without building it.
pub fn grid_node_count(step: f64) -> u64 {
    let n = axis_len(step);
    n * (n + 1) / 2
}

fn axis_len(step: f64) -> u64 {
    if !(step.is_finite() && step > 0.0) {
        return 0;
    }
    let ratio = 1.0 / step;
    if ratio > 1e12 {
        return u64::MAX / 4;
    }
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        rounded as u64 + 1
    } else {
        (ratio + 1e-9).floor() as u64 + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub grid_step: f64,
    /// Half-width of the central-difference stencil.
    pub fd_step: f64,
    /// Derivatives within `tol` of zero are degenerate rather than violations.
    pub tol: f64,
    pub policy: OriginPolicy,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            grid_step: 0.01,
            fd_step: 1e-4,
            tol: 1e-6,
            policy: OriginPolicy::SymmetricLimit,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.grid_step) || !positive(self.fd_step) {
            return Err(Error::InvalidInput(
                "grid_step and fd_step must be positive".into(),
            ));
        }
        if self.fd_step >= self.grid_step {
            return Err(Error::InvalidInput(format!(
                "fd_step {} must be smaller than grid_step {}",
                self.fd_step, self.grid_step
            )));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::InvalidInput("tol must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeClass {
    Pass,
    Violation,
    Degenerate,
    Error,
}

impl NodeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeClass::Pass => "pass",
            NodeClass::Violation => "violation",
            NodeClass::Degenerate => "degenerate",
            NodeClass::Error => "error",
        }
    }
}

/// One scanned grid node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoNode {
    pub d1: f64,
    pub d2: f64,
    pub r_share: Option<f64>,
    pub dr_dd1: Option<f64>,
    pub dr_dd2: Option<f64>,
    pub class: NodeClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientPoint {
    pub d1: f64,
    pub d2: f64,
    pub dr_dd1: f64,
    pub dr_dd2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoReport {
    pub model: String,
    pub grid_step: f64,
    pub fd_step: f64,
    pub tol: f64,
    pub pass: bool,
    pub violations: Vec<GradientPoint>,
    pub degenerate_points: Vec<GradientPoint>,
    pub nodes: Vec<ParetoNode>,
}

impl ParetoReport {
    pub fn error_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.class == NodeClass::Error)
            .count()
    }

    /// CSV with columns `d1,d2,r_share,dr_dd1,dr_dd2,class`.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["d1", "d2", "r_share", "dr_dd1", "dr_dd2", "class"])
            .expect("in-memory csv write");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for node in &self.nodes {
            writer
                .write_record([
                    node.d1.to_string(),
                    node.d2.to_string(),
                    opt(node.r_share),
                    opt(node.dr_dd1),
                    opt(node.dr_dd2),
                    node.class.as_str().to_string(),
                ])
                .expect("in-memory csv write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
    }
}

/// Checks that the royalty rises with `d1` and falls with `d2` at every
/// interior grid node, using central differences.
///
/// Only nodes whose whole stencil stays feasible are scanned: `d1, d2 >=
/// fd_step` and `d1 + d2 <= 1 - 2 fd_step`. Evaluation failures are recorded
/// on the node and make the report fail.
pub fn pareto_scan(model: &WeightModel, config: &ScanConfig) -> Result<ParetoReport> {
    config.validate()?;
    let h = config.fd_step;
    let limit = 1.0 - 2.0 * h + 1e-12;
    let interior: Vec<(f64, f64)> = feasibility_region(config.grid_step)
        .into_iter()
        .filter(|&(d1, d2)| d1 >= h && d2 >= h && d1 + d2 <= limit)
        .collect();

    let nodes: Vec<ParetoNode> = interior
        .par_iter()
        .map(|&(d1, d2)| scan_node(model, config, d1, d2))
        .collect();

    let gradient = |n: &ParetoNode| GradientPoint {
        d1: n.d1,
        d2: n.d2,
        dr_dd1: n.dr_dd1.unwrap_or(f64::NAN),
        dr_dd2: n.dr_dd2.unwrap_or(f64::NAN),
    };
    let violations: Vec<_> = nodes
        .iter()
        .filter(|n| n.class == NodeClass::Violation)
        .map(gradient)
        .collect();
    let degenerate_points: Vec<_> = nodes
        .iter()
        .filter(|n| n.class == NodeClass::Degenerate)
        .map(gradient)
        .collect();
    let pass = violations.is_empty() && nodes.iter().all(|n| n.class != NodeClass::Error);

    Ok(ParetoReport {
        model: model.name().to_string(),
        grid_step: config.grid_step,
        fd_step: config.fd_step,
        tol: config.tol,
        pass,
        violations,
        degenerate_points,
        nodes,
    })
}

fn scan_node(model: &WeightModel, config: &ScanConfig, d1: f64, d2: f64) -> ParetoNode {
    let h = config.fd_step;
    let royalty = |a: f64, b: f64| -> Result<f64> {
        model.royalty_share(&DisagreementPoint::new(a, b)?, config.policy)
    };
    let evaluated = (|| -> Result<(f64, f64, f64)> {
        let r = royalty(d1, d2)?;
        let dr_dd1 = (royalty(d1 + h, d2)? - royalty(d1 - h, d2)?) / (2.0 * h);
        let dr_dd2 = (royalty(d1, d2 + h)? - royalty(d1, d2 - h)?) / (2.0 * h);
        Ok((r, dr_dd1, dr_dd2))
    })();
    match evaluated {
        Ok((r, dr_dd1, dr_dd2)) => ParetoNode {
            d1,
            d2,
            r_share: Some(r),
            dr_dd1: Some(dr_dd1),
            dr_dd2: Some(dr_dd2),
            class: classify(dr_dd1, dr_dd2, config.tol),
            error: None,
        },
        Err(e) => ParetoNode {
            d1,
            d2,
            r_share: None,
            dr_dd1: None,
            dr_dd2: None,
            class: NodeClass::Error,
            error: Some(e.to_string()),
        },
    }
}

fn classify(dr_dd1: f64, dr_dd2: f64, tol: f64) -> NodeClass {
    if dr_dd1 < -tol || dr_dd2 > tol {
        NodeClass::Violation
    } else if dr_dd1.abs() <= tol || dr_dd2.abs() <= tol {
        NodeClass::Degenerate
    } else {
        NodeClass::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub d1: f64,
    pub r_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveError {
    pub d1: f64,
    pub message: String,
}

/// Royalty share along one line of constant `d2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyCurve {
    pub d2_level: f64,
    /// Increasing in `d1`, ending at the feasibility limit `d1 = 1 - d2`.
    pub points: Vec<CurvePoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<CurveError>,
}

/// Samples the royalty share over `d1 in [0, 1 - level]` for each `d2`
/// level. Point failures are collected on the curve.
pub fn solution_family(
    model: &WeightModel,
    d2_levels: &[f64],
    d1_step: f64,
    policy: OriginPolicy,
) -> Result<Vec<FamilyCurve>> {
    if !(d1_step.is_finite() && d1_step > 0.0) {
        return Err(Error::InvalidInput("d1_step must be positive".into()));
    }
    d2_levels
        .iter()
        .map(|&level| {
            if !(level.is_finite() && (0.0..=1.0).contains(&level)) {
                return Err(Error::NormalizedOutOfRange {
                    name: "d2",
                    value: level,
                });
            }
            let end = 1.0 - level;
            let mut samples: Vec<f64> = axis(d1_step)
                .into_iter()
                .filter(|&d1| d1 <= end + 1e-12)
                .map(|d1| d1.min(end))
                .collect();
            if !matches!(samples.last(), Some(&last) if end - last <= 1e-12) {
                samples.push(end);
            }
            let mut curve = FamilyCurve {
                d2_level: level,
                points: Vec::with_capacity(samples.len()),
                errors: Vec::new(),
            };
            for d1 in samples {
                let r = DisagreementPoint::new(d1, level)
                    .and_then(|d| model.royalty_share(&d, policy));
                match r {
                    Ok(r_share) => curve.points.push(CurvePoint { d1, r_share }),
                    Err(e) => curve.errors.push(CurveError {
                        d1,
                        message: e.to_string(),
                    }),
                }
            }
            Ok(curve)
        })
        .collect()
}

/// CSV with columns `d1,d2,r_share`, one row per curve point.
pub fn family_to_csv(curves: &[FamilyCurve]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["d1", "d2", "r_share"])
        .expect("in-memory csv write");
    for curve in curves {
        for p in &curve.points {
            writer
                .write_record([
                    p.d1.to_string(),
                    curve.d2_level.to_string(),
                    p.r_share.to_string(),
                ])
                .expect("in-memory csv write");
        }
    }
    String::from_utf8(writer.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
}
