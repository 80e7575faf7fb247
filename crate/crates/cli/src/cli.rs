use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nashroyalty_core::schema::ModelDescriptor;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "nashroyalty", version, about = "Royalty negotiation via the asymmetric Nash bargaining solution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the royalty share (and rate) at one disagreement point.
    Solve(SolveArgs),
    /// Evaluate a bargaining-weight model.
    Alpha(AlphaArgs),
    /// Check Pareto efficiency of a weight model over the feasible triangle.
    Scan(ScanArgs),
    /// Royalty share against d1 for fixed levels of d2.
    Family(FamilyArgs),
    /// Render the alignment chart as SVG.
    Nomograph(NomographArgs),
    /// Cross-check the closed form against independent oracles.
    Verify(VerifyArgs),
    /// Run the local HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// JSON scenario file (one object or an array).
    #[arg(long, value_name = "FILE", requires = "scenario")]
    pub scenarios: Option<PathBuf>,
    /// Scenario to take inputs from; explicit flags override it.
    #[arg(long, value_name = "NAME", requires = "scenarios")]
    pub scenario: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Licensor disagreement payoff.
    #[arg(long, allow_negative_numbers = true)]
    pub d1: Option<f64>,
    /// Licensee disagreement payoff.
    #[arg(long, allow_negative_numbers = true)]
    pub d2: Option<f64>,
    /// Payoffs are money amounts; normalize by operating income.
    #[arg(long, requires_all = ["operating_revenue", "operating_cost"])]
    pub raw: bool,
    #[arg(long, value_name = "O_R")]
    pub operating_revenue: Option<f64>,
    #[arg(long, value_name = "O_C", requires = "operating_revenue")]
    pub operating_cost: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Weight model: constant, perceptions, case1, case2, case3, violating-demo, composite.
    #[arg(long, value_name = "NAME")]
    pub model: Option<String>,
    #[arg(long)]
    pub p11: Option<f64>,
    #[arg(long)]
    pub p12: Option<f64>,
    #[arg(long)]
    pub p21: Option<f64>,
    #[arg(long)]
    pub p22: Option<f64>,
    #[arg(long)]
    pub licensors: Option<u64>,
    #[arg(long)]
    pub licensees: Option<u64>,
    #[arg(long)]
    pub market_share_gain: Option<f64>,
    #[arg(long)]
    pub market_share_desired: Option<f64>,
    #[arg(long)]
    pub patent_age: Option<f64>,
    #[arg(long)]
    pub patent_life: Option<f64>,
    /// Weight expression for the composite model, as JSON.
    #[arg(long, value_name = "JSON")]
    pub expr: Option<String>,
}

impl ModelArgs {
    /// Descriptor named by `--model`, with every given parameter flag.
    pub fn descriptor(&self, alpha: Option<f64>) -> Result<Option<ModelDescriptor>, CliError> {
        let Some(kind) = &self.model else {
            let stray = self.p11.is_some()
                || self.p12.is_some()
                || self.p21.is_some()
                || self.p22.is_some()
                || self.licensors.is_some()
                || self.licensees.is_some()
                || self.market_share_gain.is_some()
                || self.market_share_desired.is_some()
                || self.patent_age.is_some()
                || self.patent_life.is_some()
                || self.expr.is_some();
            if stray {
                return Err(CliError::Usage("model parameters given without --model".into()));
            }
            return Ok(None);
        };
        let mut d = ModelDescriptor::new(kind.clone());
        let numbers = [
            ("alpha", alpha),
            ("p11", self.p11),
            ("p12", self.p12),
            ("p21", self.p21),
            ("p22", self.p22),
            ("market_share_gain", self.market_share_gain),
            ("market_share_desired", self.market_share_desired),
            ("patent_age", self.patent_age),
            ("patent_life", self.patent_life),
        ];
        for (key, value) in numbers {
            if let Some(v) = value {
                d = d.with(key, v);
            }
        }
        for (key, value) in [("licensors", self.licensors), ("licensees", self.licensees)] {
            if let Some(v) = value {
                d = d.with(key, v);
            }
        }
        if let Some(expr) = &self.expr {
            let value: serde_json::Value = serde_json::from_str(expr)
                .map_err(|e| CliError::Usage(format!("--expr is not valid JSON: {e}")))?;
            d = d.with("expr", value);
        }
        Ok(Some(d))
    }
}

#[derive(Debug, Clone, Args)]
pub struct DisplayArgs {
    /// Print the JSON document instead of a table.
    #[arg(long)]
    pub json: bool,
    /// Significant digits in the table.
    #[arg(long, value_name = "N", default_value_t = crate::output::DEFAULT_PRECISION)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Constant bargaining weight (with --model constant, its parameter).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Operating margin O_M = O_I/O_R, to report the royalty rate.
    #[arg(long, value_name = "M")]
    pub operating_margin: Option<f64>,
    /// Fail at the origin instead of using the symmetric limit.
    #[arg(long)]
    pub strict: bool,
    /// For case models, report the closed-form royalty.
    #[arg(long)]
    pub closed_form: bool,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub display: DisplayArgs,
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Parameter of the constant model.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub display: DisplayArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Parameter of the constant model.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub fd_step: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    pub format: DataFormat,
    /// Write to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Parameter of the constant model.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// d2 levels, comma separated.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub levels: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub d1_step: f64,
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    pub format: DataFormat,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Args)]
pub struct NomographArgs {
    /// Isopleth through alpha, d1, d2.
    #[arg(long, value_name = "A,D1,D2", value_parser = parse_overlay, allow_hyphen_values = true)]
    pub overlay: Option<Overlay>,
    #[arg(long, default_value_t = nashroyalty_core::schema::DEFAULT_CANVAS_WIDTH)]
    pub width: f64,
    #[arg(long, default_value_t = nashroyalty_core::schema::DEFAULT_CANVAS_HEIGHT)]
    pub height: f64,
    /// Tick spacing on every scale; must divide 1.
    #[arg(long, default_value_t = nashroyalty_core::schema::DEFAULT_TICK_STEP)]
    pub tick: f64,
    /// Write to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 20240611)]
    pub seed: u64,
    /// Random instances for the maximizer checks.
    #[arg(long, default_value_t = 1000)]
    pub instances: usize,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = nashroyalty_service::PORT_ENV, default_value_t = nashroyalty_service::DEFAULT_PORT)]
    pub port: u16,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlay {
    pub alpha: f64,
    pub d1: f64,
    pub d2: f64,
}

fn parse_overlay(text: &str) -> Result<Overlay, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, d1, d2] = parts.as_slice() else {
        return Err(format!("expected three comma-separated numbers, got {text:?}"));
    };
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    Ok(Overlay {
        alpha: num(a)?,
        d1: num(d1)?,
        d2: num(d2)?,
    })
}
