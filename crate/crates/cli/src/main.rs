mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dirac_cad::circuits::{build_spaces, parse_netlist, CircuitSpaces, Mode, Preset};
use dirac_cad::dynamics::{integrate_rk4, monitor_report, simulate_circuit, MonitorReport, Target};
use dirac_cad::linalg::rational::{parse_rational, to_f64, Rational};
use dirac_cad::selftest::{self, Fixtures};

#[derive(Parser)]
#[command(name = "dirac-cad", version, about = "Constraint analysis and simulation of LC circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Constraint chain, loop classes and constraint classification of a netlist.
    Analyze(AnalyzeArgs),
    /// Bracket matrix of the embedded constraints, its inverse and the Dirac bracket.
    Bracket(BracketArgs),
    /// Integrate the final-stage dynamics and write the trajectory.
    Simulate(SimulateArgs),
    /// Run the acceptance checks.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct Common {
    /// Netlist JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Physical)]
    mode: ModeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Physical,
    General,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct BracketArgs {
    #[command(flatten)]
    common: Common,
    /// Constraint ordering: generic or paper-fig1.
    #[arg(long, default_value = "generic")]
    preset: String,
    /// Branch charges selecting the leaf `Kq = Kq₀`, comma separated.
    #[arg(long)]
    leaf: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// Step size, a rational such as 1/1000 or a decimal.
    #[arg(long, default_value = "1/1000")]
    dt: String,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = TargetArg::Reduced)]
    target: TargetArg,
    /// Initial state (q, v, p) on the final constraint set, comma separated rationals.
    #[arg(long)]
    x0: Option<String>,
    /// Multipliers of the primary first class constraints (full target only).
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Reduced,
    Full,
}

#[derive(Args)]
struct SelftestArgs {
    /// Criterion id, name or tag (circuit, dirac, bracket, cad, dynamics, figure1, corpus).
    #[arg(long)]
    filter: Option<String>,
    /// Directory with replacement figure1.json / figure1_unit.json fixtures.
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Domain(String),
    Selftest,
}

impl From<dirac_cad::Error> for Failure {
    fn from(e: dirac_cad::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

fn load(common: &Common) -> Outcome<CircuitSpaces> {
    let text = std::fs::read_to_string(&common.input)
        .map_err(|e| Failure::Domain(format!("{}: {e}", common.input.display())))?;
    let mode = match common.mode {
        ModeArg::Physical => Mode::Physical,
        ModeArg::General => Mode::General,
    };
    let nl = parse_netlist(&text, mode)
        .map_err(|e| Failure::Domain(format!("{}: {e}", common.input.display())))?;
    Ok(build_spaces(&nl)?)
}

fn write(output: Option<&Path>, text: &str) -> Outcome<()> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Domain(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn rationals(flag: &str, text: &str) -> Outcome<Vec<Rational>> {
    text.split(',')
        .map(|s| parse_rational(s.trim()).map_err(|e| Failure::Usage(format!("--{flag}: {e}"))))
        .collect()
}

fn json_only(format: Format, command: &str) -> Outcome<()> {
    if format == Format::Json {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{command} writes JSON only")))
    }
}

fn parse_dt(text: &str) -> Outcome<f64> {
    let dt = match parse_rational(text) {
        Ok(r) => to_f64(&r),
        Err(_) => text.parse::<f64>().ok(),
    };
    match dt {
        Some(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(Failure::Usage(format!("--dt must be a positive number, got {text:?}"))),
    }
}

#[derive(Serialize)]
struct SimulationJson<'a> {
    target: &'a str,
    dt: f64,
    steps: usize,
    labels: &'a [String],
    report: MonitorReport,
    final_state: Vec<f64>,
}

fn simulate(args: &SimulateArgs) -> Outcome<()> {
    let cs = load(&args.common)?;
    let dt = parse_dt(&args.dt)?;
    if args.steps == 0 {
        return Err(Failure::Usage("--steps must be positive".into()));
    }
    let x0 = args.x0.as_deref().map(|t| rationals("x0", t)).transpose()?;
    let lambda = args.lambda.as_deref().map(|t| rationals("lambda", t)).transpose()?;
    let (target, name) = match args.target {
        TargetArg::Reduced => (Target::Reduced, "reduced"),
        TargetArg::Full => (Target::Full, "full"),
    };
    if lambda.is_some() && target == Target::Reduced {
        return Err(Failure::Usage("--lambda applies to --target full only".into()));
    }
    let run = simulate_circuit(&cs, x0.as_deref(), target, lambda.as_deref())?;
    let traj = integrate_rk4(&run.field, &run.initial, dt, args.steps, run.labels.clone(), &run.monitors)?;
    let text = match args.format {
        Format::Csv => traj.to_csv(),
        Format::Json => report::to_json(&SimulationJson {
            target: name,
            dt,
            steps: args.steps,
            labels: &traj.labels,
            report: monitor_report(&traj),
            final_state: traj.last().iter().copied().collect(),
        }),
    };
    write(args.common.output.as_deref(), &text)
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Analyze(a) => {
            json_only(a.format, "analyze")?;
            let cs = load(&a.common)?;
            write(a.common.output.as_deref(), &report::to_json(&report::analyze(&cs)?))
        }
        Command::Bracket(b) => {
            json_only(b.format, "bracket")?;
            let preset: Preset = b.preset.parse().map_err(|e: dirac_cad::Error| Failure::Usage(e.to_string()))?;
            let cs = load(&b.common)?;
            let leaf = b.leaf.as_deref().map(|t| rationals("leaf", t)).transpose()?;
            let rep = report::bracket(&cs, preset, &b.preset, leaf.as_deref())?;
            write(b.common.output.as_deref(), &report::to_json(&rep))
        }
        Command::Simulate(s) => simulate(&s),
        Command::Selftest(s) => {
            let fixtures = match &s.fixtures {
                Some(dir) => Fixtures::from_dir(dir)?,
                None => Fixtures::default(),
            };
            let outcomes = selftest::run(&fixtures, s.filter.as_deref());
            if outcomes.is_empty() {
                return Err(Failure::Usage(format!(
                    "no criterion matches {:?}",
                    s.filter.unwrap_or_default()
                )));
            }
            for o in &outcomes {
                println!("{}", o.line());
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} passed, {failed} failed", outcomes.len() - failed);
            if failed > 0 {
                Err(Failure::Selftest)
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Selftest) => ExitCode::from(3),
    }
}
