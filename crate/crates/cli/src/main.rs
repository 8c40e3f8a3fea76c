use std::fs;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coadjoint::agd::{star, transvectant, LaurentPoly2};
use coadjoint::density::Density;
use coadjoint::diffeo::CircleDiffeo;
use coadjoint::sturm::{self, SturmLiouville};
use coadjoint::verify::{run_suites, Mutation, Report, SuiteConfig};
use coadjoint::virasoro::{self, CocycleKind};
use coadjoint::{Settings, TrigPoly};

#[derive(Parser)]
#[command(name = "coadjoint", version, about = "Virasoro coadjoint toolkit and identity checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Standard,
    Modified,
}

impl From<Kind> for CocycleKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Standard => CocycleKind::Standard,
            Kind::Modified => CocycleKind::Modified,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SectorArg {
    Ramond,
    Ns,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    FlipCentralSign,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with SuiteConfig fields.
    #[arg(long)]
    config: Option<String>,
    #[arg(long, value_enum)]
    mutation: Option<MutationArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suites and print a JSON-lines report.
    Verify {
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    VirasoroVerify {
        #[command(flatten)]
        run: RunArgs,
    },
    SuperVerify {
        #[arg(long, value_enum)]
        sector: Option<SectorArg>,
        #[command(flatten)]
        run: RunArgs,
    },
    ExtalgVerify {
        #[command(flatten)]
        run: RunArgs,
    },
    AgdVerify {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Schwarzian derivative of a circle diffeomorphism `{"shift":…, "p":TrigPoly}`.
    Schwarzian {
        diffeo: String,
        #[arg(long, value_enum, default_value = "standard")]
        kind: Kind,
    },
    /// Monodromy invariants of `a psi'' + u psi = 0`, given as `{"a":…, "u":TrigPoly}`.
    Monodromy {
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 4096)]
        steps: usize,
    },
    /// Gelfand-Fuchs cocycle of two vector fields.
    ///
    /// Each field is a number, `sin`, `cos`, `sinK`, `cosK` or TrigPoly JSON.
    GfCocycle {
        x: String,
        y: String,
        #[arg(long, value_enum, default_value = "standard")]
        kind: Kind,
    },
    /// Moyal star product of two Laurent polynomials `[[i, j, num, den], …]`.
    Star {
        f: String,
        g: String,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Transvectant of order m of two densities `{"lambda":…, "value":TrigPoly}`.
    Transvectant {
        phi: String,
        psi: String,
        #[arg(long)]
        m: usize,
    },
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> anyhow::Result<T> {
    serde_json::from_str(text).with_context(|| format!("cannot parse {what}"))
}

fn field_shorthand(text: &str) -> anyhow::Result<TrigPoly> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(TrigPoly::constant(v));
    }
    for (prefix, sin) in [("sin", true), ("cos", false)] {
        if let Some(rest) = t.strip_prefix(prefix) {
            let k = if rest.is_empty() {
                1
            } else {
                rest.parse::<usize>()
                    .map_err(|_| anyhow!("bad mode in `{t}`"))?
            };
            return Ok(if sin { TrigPoly::sin_mode(k) } else { TrigPoly::cos_mode(k) });
        }
    }
    parse_json("vector field", t)
}

fn suite_config(run: &RunArgs, suites: Option<Vec<String>>) -> anyhow::Result<SuiteConfig> {
    let mut cfg = match &run.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
            SuiteConfig::from_json(&text)?
        }
        None => SuiteConfig::default(),
    };
    if let Some(seed) = run.seed {
        cfg.seed = seed;
    }
    if let Some(MutationArg::FlipCentralSign) = run.mutation {
        cfg.mutation = Some(Mutation::FlipCentralSign);
    }
    if let Some(s) = suites {
        cfg.suites = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit_report(report: &Report) -> ExitCode {
    print!("{}", report.to_json_lines());
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run_single(run: &RunArgs, suite: &str) -> anyhow::Result<Report> {
    Ok(run_suites(&suite_config(run, Some(vec![suite.to_string()]))?)?)
}

fn print_value(v: Value) -> ExitCode {
    println!("{v}");
    ExitCode::SUCCESS
}

fn execute(cmd: Command) -> anyhow::Result<ExitCode> {
    let cfg = Settings::default();
    Ok(match cmd {
        Command::Verify { suites, run } => {
            let chosen = (!suites.is_empty()).then_some(suites);
            emit_report(&run_suites(&suite_config(&run, chosen)?)?)
        }
        Command::VirasoroVerify { run } => emit_report(&run_single(&run, "virasoro")?),
        Command::ExtalgVerify { run } => emit_report(&run_single(&run, "extalg")?),
        Command::AgdVerify { run } => emit_report(&run_single(&run, "agd")?),
        Command::SuperVerify { sector, run } => {
            let mut report = run_single(&run, "superalg")?;
            let other = match sector {
                Some(SectorArg::Ramond) => Some("super_jacobi_ns"),
                Some(SectorArg::Ns) => Some("super_jacobi_ramond"),
                None => None,
            };
            report.records.retain(|r| Some(r.check.as_str()) != other);
            report.header.checks = report.records.len();
            emit_report(&report)
        }
        Command::Schwarzian { diffeo, kind } => {
            let g: CircleDiffeo = parse_json("diffeomorphism", &diffeo)?;
            let s = virasoro::schwarzian(&g, kind.into(), &cfg)?;
            print_value(serde_json::to_value(s)?)
        }
        Command::Monodromy { op, steps } => {
            let l: SturmLiouville = parse_json("operator", &op)?;
            let (inv, drift) = sturm::monodromy(&l, steps, &cfg)?;
            print_value(json!({
                "trace": inv.trace,
                "lift_index": inv.lift_index,
                "class": inv.class,
                "wronskian_drift": drift,
            }))
        }
        Command::GfCocycle { x, y, kind } => {
            let (x, y) = (field_shorthand(&x)?, field_shorthand(&y)?);
            print_value(json!({ "value": virasoro::gf_cocycle(&x, &y, kind.into()) }))
        }
        Command::Star { f, g, order } => {
            let f: LaurentPoly2 = parse_json("f", &f)?;
            let g: LaurentPoly2 = parse_json("g", &g)?;
            print_value(json!({ "hbar": star(&f, &g, order).coeffs }))
        }
        Command::Transvectant { phi, psi, m } => {
            let phi: Density = parse_json("phi", &phi)?;
            let psi: Density = parse_json("psi", &psi)?;
            print_value(serde_json::to_value(transvectant(&phi, &psi, m))?)
        }
    })
}

fn error_kind(e: &anyhow::Error) -> String {
    match e.downcast_ref::<coadjoint::Error>() {
        Some(inner) => {
            let debug = format!("{inner:?}");
            debug
                .split(|c: char| !c.is_alphanumeric())
                .next()
                .unwrap_or("Error")
                .to_string()
        }
        None if e.downcast_ref::<serde_json::Error>().is_some() => "Parse".to_string(),
        None => "Error".to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let body = json!({ "error": error_kind(&e), "message": format!("{e:#}") });
            eprintln!("{body}");
            ExitCode::from(2)
        }
    }
}
