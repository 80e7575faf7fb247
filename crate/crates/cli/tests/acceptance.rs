//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use http_body_util::BodyExt;
use nashroyalty_core::nomograph::{collinearity_determinant, unit_alpha_point, unit_grid_point, unit_result_point, TickSteps};
use nashroyalty_core::oracles::first_order_residual;
use nashroyalty_core::schema::{nomograph_svg, NomographRequest};
use nashroyalty_core::{
    build_layout, case_royalty, case_royalty_closed_form, maximize_nash_product, pareto_scan, read_isopleth,
    rubinstein_limit_share, solution_family, solve_royalty_share, Case, DisagreementPoint, OriginPolicy,
    ScanConfig, WeightModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tower::ServiceExt;

type Outcome = Result<String, String>;

const SEED: u64 = 20240611;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn point(d1: f64, d2: f64) -> DisagreementPoint {
    DisagreementPoint::new(d1, d2).unwrap()
}

/// Uniform over the feasible triangle, keeping a little surplus.
fn random_point(rng: &mut ChaCha8Rng, min_surplus: f64) -> DisagreementPoint {
    loop {
        let (mut a, mut b): (f64, f64) = (rng.random(), rng.random());
        if a + b > 1.0 {
            (a, b) = (1.0 - a, 1.0 - b);
        }
        if a + b <= 1.0 - min_surplus {
            return point(a, b);
        }
    }
}

fn feasible_grid() -> Vec<DisagreementPoint> {
    let mut out = Vec::new();
    for i in 0..=100 {
        for j in 0..=(100 - i) {
            out.push(point(i as f64 / 100.0, j as f64 / 100.0));
        }
    }
    out
}

fn cli_share() -> Result<f64, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_nashroyalty"))
        .args(["solve", "--d1", "0.2", "--d2", "0.3", "--alpha", "0.4", "--json"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    v["royalty_share"].as_f64().ok_or_else(|| "no royalty_share".into())
}

fn service_share() -> Result<f64, String> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(async {
        let req = Request::post("/api/solve")
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from(r#"{"d1":0.2,"d2":0.3,"alpha":0.4}"#))
            .unwrap();
        let res = nashroyalty_service::router(Default::default())
            .oneshot(req)
            .await
            .map_err(|e| e.to_string())?;
        if res.status() != StatusCode::OK {
            return Err(format!("status {}", res.status()));
        }
        let bytes = res.into_body().collect().await.map_err(|e| e.to_string())?.to_bytes();
        let v: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
        v["royalty_share"].as_f64().ok_or_else(|| "no royalty_share".into())
    })
}

fn reference_split() -> Outcome {
    let lib = solve_royalty_share(&point(0.2, 0.3), 0.4).map_err(|e| e.to_string())?;
    let cli = cli_share()?;
    let service = service_share()?;
    check(
        (lib - 0.4).abs() <= 1e-12 && cli == lib && service == lib,
        format!("library {lib}, cli {cli}, service {service}"),
    )
}

struct OracleRun {
    max_agreement: f64,
    max_first_order: f64,
    elapsed: Duration,
}

fn run_oracle() -> Result<OracleRun, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = Instant::now();
    let (mut max_agreement, mut max_first_order) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let oi: f64 = rng.random_range(1.0..=1e6);
        let d = random_point(&mut rng, 0.0);
        let alpha: f64 = rng.random();
        let (d1, d2) = (d.d1() * oi, d.d2() * oi);
        let res = maximize_nash_product(oi, d1, d2, alpha).map_err(|e| e.to_string())?;
        let closed = d1 + alpha * (oi - d1 - d2);
        max_agreement = max_agreement.max((res.pi1_star - closed).abs() / oi);
        max_first_order = max_first_order.max(first_order_residual(&res, d1, d2, alpha).abs() / oi);
    }
    Ok(OracleRun {
        max_agreement,
        max_first_order,
        elapsed: start.elapsed(),
    })
}

fn oracle_agreement(run: &Result<OracleRun, String>) -> Outcome {
    let run = run.as_ref().map_err(Clone::clone)?;
    check(
        run.max_agreement <= 1e-6 && run.elapsed < Duration::from_secs(60),
        format!(
            "1000 instances, max |pi1 - closed form| = {:.3e} O_I in {:.2?}",
            run.max_agreement, run.elapsed
        ),
    )
}

fn first_order(run: &Result<OracleRun, String>) -> Outcome {
    let run = run.as_ref().map_err(Clone::clone)?;
    check(
        run.max_first_order <= 1e-6,
        format!("max residual {:.3e} O_I", run.max_first_order),
    )
}

fn case_closed_forms() -> Outcome {
    let mut worst = [0.0f64; 2];
    for d in feasible_grid() {
        for (k, case) in [Case::One, Case::Two].into_iter().enumerate() {
            if case == Case::Two && d.is_origin() {
                continue;
            }
            let pipeline = case_royalty(case, &d, OriginPolicy::SymmetricLimit).map_err(|e| e.to_string())?;
            let closed = case_royalty_closed_form(case, &d).map_err(|e| e.to_string())?;
            worst[k] = worst[k].max((pipeline.value - closed).abs());
        }
    }
    let d = point(0.2, 0.3);
    let pipeline = case_royalty(Case::Three, &d, OriginPolicy::SymmetricLimit)
        .map_err(|e| e.to_string())?
        .value;
    let printed = case_royalty_closed_form(Case::Three, &d).map_err(|e| e.to_string())?;
    check(
        worst[0] <= 1e-12
            && worst[1] <= 1e-12
            && (pipeline - 0.41667).abs() < 5e-6
            && (printed - 0.43333).abs() < 5e-6,
        format!(
            "case 1 max diff {:.1e}, case 2 max diff {:.1e}; case 3 at (0.2, 0.3): pipeline {pipeline:.5}, closed form {printed:.5}",
            worst[0], worst[1]
        ),
    )
}

fn rubinstein_limit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = loop {
            let d = random_point(&mut rng, 0.0);
            if d.d1() > 0.0 && d.d2() > 0.0 {
                break d;
            }
        };
        let share = rubinstein_limit_share(&d, 1e-6).map_err(|e| e.to_string())?;
        worst = worst.max((share - d.d1() / d.total()).abs());
    }
    check(worst <= 1e-4, format!("100 points at offer interval 1e-6, max error {worst:.3e}"))
}

fn pareto_scans() -> Outcome {
    let config = ScanConfig::default();
    let mut models: Vec<WeightModel> = Case::ALL.into_iter().map(WeightModel::Case).collect();
    models.extend((1..20).map(|i| WeightModel::constant(i as f64 / 20.0).unwrap()));
    for model in &models {
        let report = pareto_scan(model, &config).map_err(|e| e.to_string())?;
        if !report.pass || report.error_count() > 0 {
            return Err(format!("{} reported {} violations", report.model, report.violations.len()));
        }
    }
    let demo = pareto_scan(&WeightModel::ViolatingDemo, &config).map_err(|e| e.to_string())?;
    let at_corner = demo
        .violations
        .iter()
        .any(|v| (v.d1 - 0.01).abs() < 1e-12 && (v.d2 - 0.01).abs() < 1e-12);
    check(
        !demo.pass && at_corner,
        format!(
            "{} efficient models clean; demo model has {} violations, (0.01, 0.01) included: {at_corner}",
            models.len(),
            demo.violations.len()
        ),
    )
}

fn classic_family() -> Outcome {
    let levels: Vec<f64> = (0..=8).map(|i| i as f64 / 10.0).collect();
    let curves = solution_family(&WeightModel::constant(0.5).unwrap(), &levels, 0.01, OriginPolicy::SymmetricLimit)
        .map_err(|e| e.to_string())?;
    let mut worst_fit = 0.0f64;
    for c in &curves {
        let n = c.points.len() as f64;
        let mx = c.points.iter().map(|p| p.d1).sum::<f64>() / n;
        let my = c.points.iter().map(|p| p.r_share).sum::<f64>() / n;
        let sxy: f64 = c.points.iter().map(|p| (p.d1 - mx) * (p.r_share - my)).sum();
        let sxx: f64 = c.points.iter().map(|p| (p.d1 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        for p in &c.points {
            worst_fit = worst_fit.max((p.r_share - (my + slope * (p.d1 - mx))).abs());
        }
    }
    let mut worst_gap = 0.0f64;
    for pair in curves.windows(2) {
        let expected = (pair[1].d2_level - pair[0].d2_level) / 2.0;
        for (lo, hi) in pair[0].points.iter().zip(&pair[1].points) {
            if (lo.d1 - hi.d1).abs() > 1e-15 {
                return Err(format!("sample mismatch at d1 = {}", lo.d1));
            }
            worst_gap = worst_gap.max(((lo.r_share - hi.r_share) - expected).abs());
        }
    }
    check(
        worst_fit <= 1e-12 && worst_gap <= 1e-12,
        format!("max fit residual {worst_fit:.1e}, max spacing error {worst_gap:.1e}"),
    )
}

fn nomograph_geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let layout = build_layout(800.0, 800.0, TickSteps::default()).map_err(|e| e.to_string())?;
    let (mut worst_det, mut worst_read) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let alpha: f64 = rng.random();
        let d = random_point(&mut rng, 1e-6);
        let r = solve_royalty_share(&d, alpha).map_err(|e| e.to_string())?;
        let det = collinearity_determinant(unit_alpha_point(alpha), unit_grid_point(d.d1(), d.d2()), unit_result_point(r));
        worst_det = worst_det.max(det.abs());
        let read = read_isopleth(&layout, alpha, &d).map_err(|e| e.to_string())?;
        worst_read = worst_read.max((read - r).abs());
    }
    let req = NomographRequest {
        alpha: Some(0.4),
        d1: Some(0.2),
        d2: Some(0.3),
        width: None,
        height: None,
        tick: None,
    };
    let a = nomograph_svg(&req).map_err(|e| e.to_string())?;
    let b = nomograph_svg(&req).map_err(|e| e.to_string())?;
    let identical = a.as_bytes() == b.as_bytes();
    check(
        worst_det <= 1e-9 && worst_read <= 1e-9 && identical,
        format!("500 triples: max |det| {worst_det:.1e}, max read error {worst_read:.1e}; svg identical: {identical}"),
    )
}

fn main() -> ExitCode {
    let oracle = run_oracle();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("reference split 0.2/0.3/0.4", reference_split()),
        ("oracle agreement", oracle_agreement(&oracle)),
        ("first-order condition", first_order(&oracle)),
        ("case closed forms", case_closed_forms()),
        ("alternating-offers limit", rubinstein_limit()),
        ("pareto scans", pareto_scans()),
        ("classic family", classic_family()),
        ("nomograph geometry", nomograph_geometry()),
    ];
    let mut failed = 0;
    for (name, outcome) in &criteria {
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
