use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use omega_core::encoder::{build_omega_full, derive_params, interleaved_order, length_audit, EncodingParams};
use omega_core::eval::qbf::Qbf;
use omega_core::eval::qcir::{export_qcir, qcir_var_names, solve_qcir};
use omega_core::eval::{eval_relational, eval_sentence, Budget, EqStructure, EvalError, NFormula, Strategy};
use omega_core::fo::{length_natural, length_noidx, parse_formula, serialize, Formula, Signature};
use omega_core::tm::{monoclonal, parse_input, parse_program, reduce_clone, simulate, trace_json, Outcome, Program};
use omega_core::translate::{translate_20, translate_21, translate_22, TranslateReport};

const EXIT_USAGE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_DISAGREE: u8 = 3;

/// Build, evaluate and check sentences that simulate Turing machines.
#[derive(Parser)]
#[command(name = "omega", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Naive,
    Shortcircuit,
    Guarded,
    Qbf,
    /// Export to QCIR and decide with BDDs; ignores --budget-ms.
    Bdd,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodeFormat {
    Interchange,
    Qcir,
    Qdimacs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    #[value(name = "2.0")]
    Consts,
    #[value(name = "2.1")]
    Plain,
    #[value(name = "2.2")]
    Defined,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the sentence for a machine and input and compare with the simulator.
    Verify {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        input: String,
        /// Zone exponent m; the machine runs for 2^m steps.
        #[arg(long)]
        zone_exp: u32,
        #[arg(long, value_enum, default_value = "bdd")]
        strategy: StrategyArg,
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Write the sentence in one of the exchange formats.
    Encode {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        input: String,
        /// Defaults to the input length.
        #[arg(long)]
        zone_exp: Option<u32>,
        #[arg(long, value_enum, default_value = "interchange")]
        format: EncodeFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the machine and print the outcome, optionally with the trace.
    Simulate {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 64)]
        steps: u64,
        #[arg(long)]
        trace: bool,
    },
    /// Sentence length against input length, as CSV.
    Stats {
        #[arg(long)]
        program: PathBuf,
        /// Comma-separated input lengths.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        lengths: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite a Boolean-algebra sentence into an equivalence-relation signature.
    Translate {
        formula: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        n_formula: Option<PathBuf>,
        /// Structure (JSON) in which to check the translation.
        #[arg(long)]
        check_model: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a sentence, over the Boolean algebra or a given structure.
    Eval {
        formula: PathBuf,
        #[arg(long, value_enum, default_value = "guarded")]
        strategy: StrategyArg,
        #[arg(long)]
        budget_ms: Option<u64>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        n_formula: Option<PathBuf>,
    },
    /// Print the irreducible clone of a program.
    Reduce {
        #[arg(long)]
        program: PathBuf,
        /// Also report whether this program has the same clone.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
}

/// Failures with a fixed exit code.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Budget(String),
    Disagree(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Usage(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_program(path: &Path) -> anyhow::Result<Program> {
    parse_program(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_formula(path: &Path) -> anyhow::Result<Formula> {
    let (f, _) = parse_formula(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(f)
}

/// Writes through a temporary file in the same directory so readers never
/// see a partial file.
fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        None => print!("{text}"),
        Some(path) => {
            let tmp = path.with_extension("partial");
            fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
            fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

fn budget(ms: Option<u64>) -> Budget {
    ms.map_or(Budget::unlimited(), |ms| Budget::time(Duration::from_millis(ms)))
}

fn decide(f: &Formula, params: Option<&EncodingParams>, s: StrategyArg, b: Budget) -> Result<bool, EvalError> {
    let core = match s {
        StrategyArg::Naive => Strategy::Naive,
        StrategyArg::Shortcircuit => Strategy::ShortCircuit,
        StrategyArg::Guarded => Strategy::Guarded,
        StrategyArg::Qbf => Strategy::QbfSearch,
        StrategyArg::Bdd => {
            let text = export_qcir(f)?;
            let names = qcir_var_names(&text)?;
            let order = match params {
                Some(p) => interleaved_order(p, &names),
                None => names,
            };
            return solve_qcir(&text, &order);
        }
    };
    eval_sentence(f, core, b)
}

fn machine_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

#[derive(Serialize)]
#[serde(untagged)]
enum Truth {
    Value(bool),
    Timeout(&'static str),
}

#[derive(Serialize)]
struct PhaseTimes {
    build_ms: f64,
    eval_ms: f64,
    simulate_ms: f64,
}

#[derive(Serialize)]
struct LengthMetrics {
    natural: usize,
    noidx: usize,
    size: usize,
}

#[derive(Serialize)]
struct VerifyReport {
    machine: String,
    input: String,
    m: u32,
    steps: u64,
    omega_truth: Truth,
    simulator_outcome: Outcome,
    agree: Option<bool>,
    wall_ms: PhaseTimes,
    length: LengthMetrics,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn cmd_verify(program: &Path, input: &str, m: u32, strategy: StrategyArg, budget_ms: Option<u64>) -> CmdResult {
    let p = load_program(program)?;
    let x = parse_input(input)?;
    let params = derive_params(&p, &x, Some(m))?;
    let steps = u64::try_from(params.steps()).context("zone exponent too large to simulate")?;
    let (built, sim) = std::thread::scope(|scope| {
        let sim = scope.spawn(|| {
            let start = Instant::now();
            simulate(&params.program, &params.input, steps, false).map(|r| (r.outcome, start.elapsed()))
        });
        let start = Instant::now();
        let built = build_omega_full(&params).map(|f| {
            let build = start.elapsed();
            let start = Instant::now();
            let truth = decide(&f, Some(&params), strategy, budget(budget_ms));
            (f, build, truth, start.elapsed())
        });
        (built, sim.join().expect("simulator thread"))
    });
    let (omega, build, truth, eval) = built?;
    let (outcome, sim_time) = sim?;
    let expected = outcome.accepted_within(steps);
    let (omega_truth, agree) = match truth {
        Ok(t) => (Truth::Value(t), Some(t == expected)),
        Err(EvalError::BudgetExceeded { .. }) => (Truth::Timeout("timeout"), None),
        Err(e) => return Err(e.into()),
    };
    let report = VerifyReport {
        machine: machine_id(program),
        input: input.to_string(),
        m,
        steps,
        omega_truth,
        simulator_outcome: outcome,
        agree,
        wall_ms: PhaseTimes { build_ms: ms(build), eval_ms: ms(eval), simulate_ms: ms(sim_time) },
        length: LengthMetrics { natural: length_natural(&omega), noidx: length_noidx(&omega), size: omega.size() },
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    match agree {
        Some(true) => Ok(()),
        Some(false) => Err(Failure::Disagree(format!(
            "sentence is {} but the simulator says {:?}",
            !expected, outcome
        ))),
        None => Err(Failure::Budget(format!("evaluation exceeded {} ms", budget_ms.unwrap_or(0)))),
    }
}

fn cmd_encode(
    program: &Path,
    input: &str,
    m: Option<u32>,
    format: EncodeFormat,
    out: Option<&Path>,
) -> CmdResult {
    let p = load_program(program)?;
    let x = parse_input(input)?;
    if m.is_none() {
        eprintln!("warning: m defaults to |X| = {}; evaluating this sentence is infeasible", x.len());
    }
    let params = derive_params(&p, &x, m)?;
    let f = build_omega_full(&params)?;
    let text = match format {
        EncodeFormat::Interchange => serialize(&f),
        EncodeFormat::Qcir => export_qcir(&f)?,
        EncodeFormat::Qdimacs => Qbf::from_formula(&f)?.to_qdimacs(),
    };
    emit(out, &text)?;
    Ok(())
}

#[derive(Serialize)]
struct SimulateReport {
    outcome: Outcome,
    steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<serde_json::Value>,
}

fn cmd_simulate(program: &Path, input: &str, steps: u64, trace: bool) -> CmdResult {
    let p = load_program(program)?;
    let x = parse_input(input)?;
    let run = simulate(&p, &x, steps, trace)?;
    let trace = run.trace.map(|t| serde_json::from_str(&trace_json(&t))).transpose()?;
    let report = SimulateReport { outcome: run.outcome, steps, trace };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

const MAX_SLOPE: f64 = 2.5;

fn cmd_stats(program: &Path, lengths: &[usize], out: Option<&Path>) -> CmdResult {
    if lengths.is_empty() {
        return Err(Failure::Usage(anyhow::anyhow!("no input lengths given")));
    }
    let p = load_program(program)?;
    let inputs = lengths
        .iter()
        .map(|&n| parse_input(&"01".repeat(n.div_ceil(2))[..n]))
        .collect::<Result<Vec<_>, _>>()?;
    let report = length_audit(&p, &inputs)?;
    emit(out, &report.to_csv())?;
    let slope_ok = report.slope <= MAX_SLOPE || report.rows.len() < 2;
    eprintln!(
        "slope {:.3} ({}), len >= |X| on every row: {}",
        report.slope,
        if slope_ok { "within 2.5" } else { "above 2.5" },
        report.lengths_exceed_input
    );
    if !slope_ok || !report.lengths_exceed_input {
        return Err(Failure::Disagree("length bound violated".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct ModelCheck {
    source: bool,
    target: bool,
    equivalent: bool,
}

#[derive(Serialize)]
struct TranslateSummary<'a> {
    mode: &'static str,
    report: &'a TranslateReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<ModelCheck>,
}

fn load_n(path: Option<&Path>) -> anyhow::Result<Option<NFormula>> {
    let Some(path) = path else { return Ok(None) };
    let f = load_formula(path)?;
    match NFormula::new(f) {
        Ok(n) => Ok(Some(n)),
        Err(k) => bail!("N formula must have exactly two free variables, found {k}"),
    }
}

fn load_model(path: &Path, n: Option<NFormula>) -> anyhow::Result<EqStructure> {
    let m: EqStructure =
        serde_json::from_str(&read(path)?).with_context(|| format!("parsing model {}", path.display()))?;
    Ok(match n {
        Some(n) => m.with_n(n),
        None => m,
    })
}

fn cmd_translate(
    formula: &Path,
    mode: Mode,
    n_path: Option<&Path>,
    check_model: Option<&Path>,
    out: Option<&Path>,
) -> CmdResult {
    let f = load_formula(formula)?;
    let n = load_n(n_path)?;
    let (g, report, name) = match mode {
        Mode::Consts => {
            let (g, r) = translate_20(&f)?;
            (g, r, "2.0")
        }
        Mode::Plain => {
            let (g, r) = translate_21(&f)?;
            (g, r, "2.1")
        }
        Mode::Defined => {
            let Some(n) = &n else {
                return Err(Failure::Usage(anyhow::anyhow!("mode 2.2 needs --n-formula")));
            };
            let (g, r) = translate_22(&f, &n.formula)?;
            (g, r, "2.2")
        }
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    emit(out, &serialize(&g))?;
    let check = match check_model {
        None => None,
        Some(path) => {
            let model = load_model(path, n)?;
            let source = eval_sentence(&f, Strategy::Guarded, Budget::unlimited())?;
            let target = eval_relational(&g, &model)?;
            Some(ModelCheck { source, target, equivalent: source == target })
        }
    };
    let equivalent = check.as_ref().map(|c| c.equivalent);
    eprintln!("{}", serde_json::to_string_pretty(&TranslateSummary { mode: name, report: &report, check })?);
    if equivalent == Some(false) {
        return Err(Failure::Disagree("translation changed the truth value".into()));
    }
    Ok(())
}

fn cmd_eval(
    formula: &Path,
    strategy: StrategyArg,
    budget_ms: Option<u64>,
    model: Option<&Path>,
    n_path: Option<&Path>,
) -> CmdResult {
    let f = load_formula(formula)?;
    let truth = if f.signature().covers(&Signature::BOOLEAN) && model.is_none() {
        decide(&f, None, strategy, budget(budget_ms))
    } else {
        let Some(model) = model else {
            return Err(Failure::Usage(anyhow::anyhow!("relational sentences need --model")));
        };
        eval_relational(&f, &load_model(model, load_n(n_path)?)?)
    };
    match truth {
        Ok(t) => {
            println!("{t}");
            Ok(())
        }
        Err(EvalError::BudgetExceeded { .. }) => Err(Failure::Budget("evaluation budget exceeded".into())),
        Err(e) => Err(e.into()),
    }
}

fn cmd_reduce(program: &Path, compare: Option<&Path>) -> CmdResult {
    let p = load_program(program)?;
    print!("{}", reduce_clone(&p));
    if let Some(other) = compare {
        let q = load_program(other)?;
        eprintln!("monoclonal: {}", monoclonal(&p, &q));
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Verify { program, input, zone_exp, strategy, budget_ms } => {
            cmd_verify(&program, &input, zone_exp, strategy, budget_ms)
        }
        Command::Encode { program, input, zone_exp, format, out } => {
            cmd_encode(&program, &input, zone_exp, format, out.as_deref())
        }
        Command::Simulate { program, input, steps, trace } => cmd_simulate(&program, &input, steps, trace),
        Command::Stats { program, lengths, out } => cmd_stats(&program, &lengths, out.as_deref()),
        Command::Translate { formula, mode, n_formula, check_model, out } => {
            cmd_translate(&formula, mode, n_formula.as_deref(), check_model.as_deref(), out.as_deref())
        }
        Command::Eval { formula, strategy, budget_ms, model, n_formula } => {
            cmd_eval(&formula, strategy, budget_ms, model.as_deref(), n_formula.as_deref())
        }
        Command::Reduce { program, compare } => cmd_reduce(&program, compare.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget: {msg}");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(Failure::Disagree(msg)) => {
            eprintln!("disagreement: {msg}");
            ExitCode::from(EXIT_DISAGREE)
        }
    }
}
