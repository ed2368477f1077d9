use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use maxreal::bench::{gen_power, gen_robot, power_instance};
use maxreal::encoding::{encode, Automata};
use maxreal::ltl::{Scheme, SpecProblem};
use maxreal::specfile::{emit_spec, parse_spec};
use maxreal::synth::{format_value, synthesize_max, theoretical_bound, Schedule, SynthesisOptions, SynthesisResult};
use maxreal::ts::{model_check, parse_dot, satisfied_levels, value_from_levels};
use maxreal_maxsat::Backend;

/// Exit status when the hard spec has no implementation within the bounds.
const EXIT_UNREALIZABLE: u8 = 2;
/// Exit status when the time budget ran out before any bound was solved.
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(name = "maxreal", version, about = "Maximum realizability synthesis for LTL")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize an implementation maximizing the soft specs.
    Synth {
        spec: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write the MaxSAT instance for one bound.
    Encode {
        spec: PathBuf,
        #[arg(long)]
        bound: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
    },
    /// Model check an implementation against a spec.
    Check {
        spec: PathBuf,
        /// DOT file, or a run report naming one.
        #[arg(long = "impl")]
        implementation: PathBuf,
    },
    /// Generate a benchmark instance and synthesize it.
    Bench {
        #[arg(value_enum)]
        family: Family,
        /// Power instance number (1-12).
        instance: Option<usize>,
        /// Solve exactly this bound.
        #[arg(long, conflicts_with_all = ["min_bound", "max_bound"])]
        bound: Option<usize>,
        /// Also write the generated spec file here.
        #[arg(long)]
        emit_spec: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Robot,
    Power,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Default,
    General,
    Priority,
    PriorityStrict,
    User,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Default => Scheme::Default,
            SchemeArg::General => Scheme::General,
            SchemeArg::Priority => Scheme::Priority,
            SchemeArg::PriorityStrict => Scheme::PriorityStrict,
            SchemeArg::User => Scheme::User,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Builtin,
    External,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 2)]
    min_bound: usize,
    #[arg(long, default_value_t = 8)]
    max_bound: usize,
    /// `step:K` or `doubling`.
    #[arg(long, default_value = "step:2", value_parser = parse_schedule)]
    schedule: Schedule,
    /// Stop at the first bound whose optimum reaches this weight.
    #[arg(long)]
    threshold: Option<u64>,
    #[arg(long)]
    timeout_s: Option<u64>,
    #[arg(long, value_enum, default_value = "builtin")]
    backend: BackendArg,
    /// External solver command line; the instance path is appended.
    #[arg(long, default_value = "rc2.py -vvv")]
    solver_cmd: String,
    /// Directory for the implementation and report.
    #[arg(long, default_value = "maxreal-out")]
    out: PathBuf,
    /// Also write the MaxSAT instance of every attempted bound.
    #[arg(long)]
    emit_wcnf: bool,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
}

fn parse_schedule(s: &str) -> Result<Schedule, String> {
    if s == "doubling" {
        return Ok(Schedule::Doubling);
    }
    s.strip_prefix("step:")
        .and_then(|k| k.parse().ok())
        .filter(|&k| k > 0)
        .map(Schedule::Step)
        .ok_or_else(|| format!("expected `step:K` or `doubling`, got `{s}`"))
}

fn read_spec(path: &Path) -> Result<SpecProblem> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_spec(&text).with_context(|| format!("parsing {}", path.display()))
}

fn apply_scheme(p: &mut SpecProblem, scheme: Option<SchemeArg>) -> Result<()> {
    if let Some(s) = scheme {
        p.scheme = s.into();
        p.validate().context("spec does not fit the requested scheme")?;
    }
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run_synth(mut p: SpecProblem, run: &RunArgs) -> Result<ExitCode> {
    apply_scheme(&mut p, run.scheme)?;
    if run.min_bound == 0 || run.min_bound > run.max_bound {
        bail!("bounds must satisfy 1 <= --min-bound <= --max-bound");
    }
    let backend = match run.backend {
        BackendArg::Builtin => Backend::Builtin,
        BackendArg::External => Backend::External(run.solver_cmd.split_whitespace().map(String::from).collect()),
    };
    let opts = SynthesisOptions {
        min_bound: run.min_bound,
        max_bound: run.max_bound,
        threshold: run.threshold,
        timeout: run.timeout_s.map(Duration::from_secs),
        backend,
        schedule: run.schedule,
    };
    let result = synthesize_max(&p, &opts)?;
    fs::create_dir_all(&run.out).with_context(|| format!("creating {}", run.out.display()))?;
    if run.emit_wcnf {
        emit_wcnf(&p, &result, &run.out)?;
    }
    let mut report = format!("theoretical_bound: {}\n\n", theoretical_bound(&p));
    report.push_str(&result.report());
    if let Some(best) = &result.best {
        write(&run.out.join("implementation.dot"), &best.implementation.to_dot())?;
        report.push_str("implementation: implementation.dot\n");
    }
    write(&run.out.join("report.txt"), &report)?;
    print!("{report}");
    Ok(match (&result.best, result.timed_out) {
        (Some(_), _) => ExitCode::SUCCESS,
        (None, true) => ExitCode::from(EXIT_TIMEOUT),
        (None, false) => ExitCode::from(EXIT_UNREALIZABLE),
    })
}

fn emit_wcnf(p: &SpecProblem, result: &SynthesisResult, out: &Path) -> Result<()> {
    let automata = Automata::build(p)?;
    for r in &result.records {
        let enc = encode(p, &automata, r.bound);
        write(&out.join(format!("b{}.wcnf", r.bound)), &enc.to_wdimacs())?;
        write(&out.join(format!("b{}.varmap", r.bound)), &enc.var_map())?;
    }
    Ok(())
}

fn cmd_encode(spec: &Path, bound: usize, out: &Path, scheme: Option<SchemeArg>) -> Result<ExitCode> {
    if bound == 0 {
        bail!("--bound must be positive");
    }
    let mut p = read_spec(spec)?;
    apply_scheme(&mut p, scheme)?;
    let enc = encode(&p, &Automata::build(&p)?, bound);
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write(&out.join(format!("b{bound}.wcnf")), &enc.to_wdimacs())?;
    write(&out.join(format!("b{bound}.varmap")), &enc.var_map())?;
    let (vars, clauses, weight) = enc.stats();
    println!("bound: {bound} vars: {vars} clauses: {clauses} soft_weight: {weight}");
    Ok(ExitCode::SUCCESS)
}

/// Resolves `--impl`: a DOT file as is, or the `implementation:` entry of
/// a run report, relative to the report.
fn implementation_text(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.lines().any(|l| l.trim_start().starts_with("digraph")) {
        return Ok(text);
    }
    let dot = text
        .lines()
        .find_map(|l| l.strip_prefix("implementation:"))
        .map(str::trim)
        .with_context(|| format!("{} is neither a DOT file nor a report naming one", path.display()))?;
    let dot = path.parent().unwrap_or(Path::new(".")).join(dot);
    fs::read_to_string(&dot).with_context(|| format!("reading {}", dot.display()))
}

fn cmd_check(spec: &Path, implementation: &Path) -> Result<ExitCode> {
    let p = read_spec(spec)?;
    let t = parse_dot(&implementation_text(implementation)?, &p.inputs, &p.outputs)
        .with_context(|| format!("reading implementation {}", implementation.display()))?;
    let hard = model_check(&t, &p.hard())?;
    println!("hard: {}", if hard { "pass" } else { "fail" });
    let levels = satisfied_levels(&t, &p.soft)?;
    for (j, (s, row)) in p.soft.iter().zip(&levels).enumerate() {
        match row.iter().position(|&x| x) {
            Some(k) => println!("soft_{}: level {} {}", j + 1, k + 1, s.chain[k]),
            None => println!("soft_{}: none", j + 1),
        }
    }
    println!("value: {}", format_value(&value_from_levels(&levels)));
    Ok(if hard {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_UNREALIZABLE)
    })
}

fn cmd_bench(
    family: Family,
    instance: Option<usize>,
    bound: Option<usize>,
    emit: Option<&Path>,
    mut run: RunArgs,
) -> Result<ExitCode> {
    let p = match (family, instance) {
        (Family::Robot, None) => gen_robot(),
        (Family::Robot, Some(_)) => bail!("the robot benchmark has a single instance"),
        (Family::Power, Some(id)) => {
            let params = power_instance(id).with_context(|| format!("unknown power instance {id} (1-12)"))?;
            gen_power(&params)?
        }
        (Family::Power, None) => bail!("power needs an instance number (1-12)"),
    };
    if let Some(path) = emit {
        write(path, &emit_spec(&p))?;
    }
    if let Some(b) = bound {
        run.min_bound = b;
        run.max_bound = b;
    }
    run_synth(p, &run)
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Synth { spec, run } => run_synth(read_spec(&spec)?, &run),
        Command::Encode {
            spec,
            bound,
            out,
            scheme,
        } => cmd_encode(&spec, bound, &out, scheme),
        Command::Check { spec, implementation } => cmd_check(&spec, &implementation),
        Command::Bench {
            family,
            instance,
            bound,
            emit_spec,
            run,
        } => cmd_bench(family, instance, bound, emit_spec.as_deref(), run),
    }
}
