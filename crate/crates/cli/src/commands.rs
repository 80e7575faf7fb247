use std::io::Write;
use std::path::Path;

use nashroyalty_core::analysis::family_to_csv;
use nashroyalty_core::oracles::verify_suite;
use nashroyalty_core::schema::{
    self, AlphaRequest, DisagreementInput, FamilyRequest, FinancialsInput, ModelDescriptor, NomographRequest,
    ScanRequest, SolveRequest, MAX_SCAN_NODES,
};

use crate::cli::{
    AlphaArgs, Command, DataFormat, FamilyArgs, ModelArgs, NomographArgs, PointArgs, ScanArgs, ScenarioArgs,
    ServeArgs, SolveArgs, VerifyArgs,
};
use crate::error::CliError;
use crate::output;
use crate::scenario::{find_scenario, Scenario};

/// Runs one subcommand and returns what belongs on standard output.
pub fn dispatch(command: Command) -> Result<String, CliError> {
    match command {
        Command::Solve(args) => solve(&args),
        Command::Alpha(args) => alpha(&args),
        Command::Scan(args) => scan(&args),
        Command::Family(args) => family(&args),
        Command::Nomograph(args) => nomograph(&args),
        Command::Verify(args) => verify(&args),
        Command::Serve(args) => serve(&args),
    }
}

fn scenario(args: &ScenarioArgs) -> Result<Option<Scenario>, CliError> {
    match (&args.scenarios, &args.scenario) {
        (Some(path), Some(name)) => find_scenario(path, name).map(Some),
        _ => Ok(None),
    }
}

fn point(
    args: &PointArgs,
    scenario: Option<&Scenario>,
) -> Result<(DisagreementInput, Option<FinancialsInput>), CliError> {
    let financials = match (args.operating_revenue, args.operating_cost) {
        (Some(operating_revenue), Some(operating_cost)) => Some(FinancialsInput {
            operating_revenue,
            operating_cost,
        }),
        (Some(_), None) => return Err(CliError::Usage("--operating-revenue needs --operating-cost".into())),
        _ => scenario.and_then(|s| s.financials),
    };
    let disagreement = match (args.d1, args.d2, scenario) {
        (Some(d1), Some(d2), _) => DisagreementInput {
            d1,
            d2,
            normalized: !args.raw,
        },
        (None, None, Some(s)) => s.disagreement,
        (d1, d2, Some(s)) => DisagreementInput {
            d1: d1.unwrap_or(s.disagreement.d1),
            d2: d2.unwrap_or(s.disagreement.d2),
            normalized: s.disagreement.normalized && !args.raw,
        },
        _ => return Err(CliError::Usage("--d1 and --d2 are required".into())),
    };
    Ok((disagreement, financials))
}

/// `(alpha, descriptor)` from flags, falling back to the scenario's model.
fn weight(
    alpha: Option<f64>,
    model: &ModelArgs,
    scenario: Option<&Scenario>,
) -> Result<(Option<f64>, Option<ModelDescriptor>), CliError> {
    if let Some(d) = model.descriptor(alpha)? {
        return Ok((None, Some(d)));
    }
    if alpha.is_some() {
        return Ok((alpha, None));
    }
    match scenario {
        Some(s) => Ok((None, Some(s.model.clone()))),
        None => Err(CliError::Usage("give --alpha or --model".into())),
    }
}

fn descriptor(alpha: Option<f64>, model: &ModelArgs, scenario: Option<&Scenario>) -> Result<ModelDescriptor, CliError> {
    match weight(alpha, model, scenario)? {
        (_, Some(d)) => Ok(d),
        (Some(a), None) => Ok(ModelDescriptor::constant(a)),
        (None, None) => unreachable!("weight() returns one of the two"),
    }
}

fn solve(args: &SolveArgs) -> Result<String, CliError> {
    let scenario = scenario(&args.scenario)?;
    let (disagreement, financials) = point(&args.point, scenario.as_ref())?;
    let (alpha, model) = weight(args.alpha, &args.model, scenario.as_ref())?;
    let req = SolveRequest {
        disagreement,
        alpha,
        model,
        financials,
        operating_margin: args
            .operating_margin
            .or_else(|| scenario.as_ref().and_then(|s| s.operating_margin)),
        strict: args.strict,
        closed_form: args.closed_form,
    };
    let res = schema::solve(&req)?;
    Ok(if args.display.json {
        output::json(&res)
    } else {
        output::solve_table(&res, args.display.precision)
    })
}

fn alpha(args: &AlphaArgs) -> Result<String, CliError> {
    let scenario = scenario(&args.scenario)?;
    let (disagreement, financials) = point(&args.point, scenario.as_ref())?;
    let req = AlphaRequest {
        model: descriptor(args.alpha, &args.model, scenario.as_ref())?,
        disagreement,
        financials,
        strict: args.strict,
    };
    let res = schema::alpha(&req)?;
    Ok(if args.display.json {
        output::json(&res)
    } else {
        output::alpha_table(&res, args.display.precision)
    })
}

fn emit(out: Option<&Path>, content: String) -> Result<String, CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, content).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))?;
            Ok(String::new())
        }
        None => Ok(content),
    }
}

fn scan(args: &ScanArgs) -> Result<String, CliError> {
    let scenario = scenario(&args.scenario)?;
    let req = ScanRequest {
        model: descriptor(args.alpha, &args.model, scenario.as_ref())?,
        grid_step: args.grid_step,
        fd_step: args.fd_step,
        tol: args.tol,
        strict: args.strict,
    };
    let report = schema::scan(&req, MAX_SCAN_NODES)?;
    let content = match args.format {
        DataFormat::Csv => report.to_csv(),
        DataFormat::Json => output::json(&report),
    };
    emit(args.out.as_deref(), content)
}

fn family(args: &FamilyArgs) -> Result<String, CliError> {
    let scenario = scenario(&args.scenario)?;
    let req = FamilyRequest {
        model: descriptor(args.alpha, &args.model, scenario.as_ref())?,
        levels: args.levels.clone(),
        d1_step: args.d1_step,
        strict: args.strict,
    };
    let res = schema::family(&req)?;
    let content = match args.format {
        DataFormat::Csv => family_to_csv(&res.curves),
        DataFormat::Json => output::json(&res),
    };
    emit(args.out.as_deref(), content)
}

fn nomograph(args: &NomographArgs) -> Result<String, CliError> {
    let mut req = NomographRequest {
        alpha: None,
        d1: None,
        d2: None,
        width: Some(args.width),
        height: Some(args.height),
        tick: Some(args.tick),
    };
    if let Some(o) = args.overlay {
        (req.alpha, req.d1, req.d2) = (Some(o.alpha), Some(o.d1), Some(o.d2));
    } else if let Some(s) = scenario(&args.scenario)? {
        let a = schema::alpha(&AlphaRequest {
            model: s.model.clone(),
            disagreement: s.disagreement,
            financials: s.financials,
            strict: false,
        })?;
        (req.alpha, req.d1, req.d2) = (Some(a.alpha), Some(a.d1), Some(a.d2));
    }
    emit(args.out.as_deref(), schema::nomograph_svg(&req)?)
}

fn verify(args: &VerifyArgs) -> Result<String, CliError> {
    let report = verify_suite(args.seed, args.instances)?;
    let content = output::json(&report);
    if report.pass {
        Ok(content)
    } else {
        // The report still goes out so the failing check is visible.
        let _ = std::io::stdout().write_all(content.as_bytes());
        Err(CliError::VerificationFailed)
    }
}

fn serve(args: &ServeArgs) -> Result<String, CliError> {
    let addr = nashroyalty_service::local_addr(args.port);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::io("cannot start runtime", e))?;
    eprintln!("listening on http://{addr}");
    runtime
        .block_on(nashroyalty_service::serve(addr, Default::default()))
        .map_err(|e| CliError::io(format!("cannot serve on {addr}"), e))?;
    Ok(String::new())
}
