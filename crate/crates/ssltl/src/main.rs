use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ssltl::bench::{run_suite, summarize, to_csv, RunRecord, Suite, SuiteSpec};
use ssltl::io::{load_model, load_policy, load_spec_for, model_to_json, policy_to_json, write_file};
use ssltl::report::{product_masses, state_masses, ProductMass, ReportJson, StateMass};
use ssltl::{synthesize, Outcome, PipelineError, SolverConfig};
use ssltl_core::chain::{limiting_distribution, lump_distribution, Distribution};
use ssltl_core::graph::{accepting_mecs, mec_decomposition};
use ssltl_core::hoa::{Dra, RabinPair};
use ssltl_core::ilp::{build_program, export_lp, IlpConfig, IlpError, Objective};
use ssltl_core::model::{generate_grid, Dynamics, GridSpec};
use ssltl_core::product::induce_chain;
use ssltl_core::verify::verify_on_product;
use ssltl_core::{Lmdp, Policy, ProductLmdp, ProductState, SsLtlSpec};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_UNVERIFIED: u8 = 3;
const EXIT_SOLVER: u8 = 4;

#[derive(Parser)]
#[command(name = "ssltl", version, about = "Policy synthesis for labeled MDPs under LTL and steady-state constraints")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random gridworld model.
    GenGrid(GenGridArgs),
    /// Synthesize a policy and verify it.
    Synth(SynthArgs),
    /// Check a policy against a specification.
    Verify(VerifyArgs),
    /// Long-run state probabilities of a model under a policy.
    Steady(SteadyArgs),
    /// Write the mixed-integer program as an LP file.
    ExportLp(ExportArgs),
    /// Run a batch of random instances and write CSV records.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DynamicsArg {
    Det,
    Slip,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Reward,
    Feasibility,
}

#[derive(Args)]
struct GenGridArgs {
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "det")]
    dynamics: DynamicsArg,
    /// Probability of the intended move under slip dynamics.
    #[arg(long, default_value_t = 0.9)]
    p_main: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ProgramArgs {
    /// ε of the flow constraints; defaults to min(1e-4, 1/(4 |product states|)).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    acc_eps: f64,
    #[arg(long, default_value_t = 2.0)]
    flow_ratio: f64,
    #[arg(long, value_enum, default_value = "reward")]
    objective: ObjectiveArg,
}

impl ProgramArgs {
    fn config(&self) -> IlpConfig {
        IlpConfig {
            epsilon: self.eps,
            acc_eps: self.acc_eps,
            flow_ratio: self.flow_ratio,
            objective: match self.objective {
                ObjectiveArg::Reward => Objective::ExpectedReward,
                ObjectiveArg::Feasibility => Objective::Feasibility,
            },
        }
    }
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Shell template with `{lp}`, `{sol}` and `{timeout}` placeholders.
    #[arg(long)]
    solver_cmd: Option<String>,
    /// Solver time limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Failure> {
        SolverConfig::resolve(self.solver_cmd.clone(), self.timeout.map(Duration::from_secs_f64))
            .map_err(|e| Failure::new(EXIT_SOLVER, e))
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    /// Policy output; written only for verified policies.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Verification report output.
    #[arg(long)]
    report: Option<PathBuf>,
    /// One-row CSV run record.
    #[arg(long)]
    record: Option<PathBuf>,
    #[command(flatten)]
    program: ProgramArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    policy: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SteadyArgs {
    #[arg(long)]
    model: PathBuf,
    /// Spec naming the automaton; without it the product is the model itself.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Product policy; may be omitted when every state has a single action.
    #[arg(long, requires = "spec")]
    policy: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    program: ProgramArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// `name=path` of a spec file; repeatable.
    #[arg(long = "spec", required = true, value_parser = parse_named_spec)]
    specs: Vec<SuiteSpec>,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    sizes: Vec<usize>,
    /// Seeds as a list (`1,2,3`) or a range (`1-100`).
    #[arg(long, default_value = "1-10", value_parser = parse_seeds)]
    seeds: SeedList,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Per-instance CSV; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Per-(spec, size) timing summary CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    program: ProgramArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Clone)]
struct SeedList(Vec<u64>);

fn parse_seeds(s: &str) -> Result<SeedList, String> {
    let bad = |_| format!("bad seed list `{s}`");
    if let Some((lo, hi)) = s.split_once('-') {
        let lo: u64 = lo.trim().parse().map_err(bad)?;
        let hi: u64 = hi.trim().parse().map_err(bad)?;
        if lo > hi {
            return Err(format!("empty seed range `{s}`"));
        }
        return Ok(SeedList((lo..=hi).collect()));
    }
    s.split(',').map(|x| x.trim().parse().map_err(bad)).collect::<Result<_, _>>().map(SeedList)
}

fn parse_named_spec(s: &str) -> Result<SuiteSpec, String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => {
            Ok(SuiteSpec { name: name.into(), path: path.into() })
        }
        _ => {
            let path = Path::new(s);
            let name = path.file_stem().map(|n| n.to_string_lossy().into_owned()).ok_or("empty spec path")?;
            Ok(SuiteSpec { name, path: path.into() })
        }
    }
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, e: impl std::fmt::Display) -> Self {
        Failure { code, msg: e.to_string() }
    }

    fn io(e: impl std::fmt::Display) -> Self {
        Failure::new(EXIT_USAGE, e)
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text).map_err(Failure::io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(model: &Path, spec: &Path) -> Result<(Lmdp, SsLtlSpec, Dra), Failure> {
    let m = load_model(model).map_err(Failure::io)?;
    let (s, d) = load_spec_for(spec, &m).map_err(Failure::io)?;
    Ok((m, s, d))
}

fn gen_grid(a: GenGridArgs) -> Result<u8, Failure> {
    if a.size == 0 {
        return Err(Failure::io("--size must be at least 1"));
    }
    if !(0.0..=1.0).contains(&a.p_main) {
        return Err(Failure::io("--p-main must lie in [0, 1]"));
    }
    let mut g = GridSpec::benchmark(a.size, a.seed);
    if let DynamicsArg::Slip = a.dynamics {
        g.dynamics = Dynamics::Slip { p_main: a.p_main };
    }
    emit(a.output.as_deref(), &model_to_json(&generate_grid(&g)))?;
    Ok(0)
}

fn synth(a: SynthArgs) -> Result<u8, Failure> {
    let (m, spec, d) = load(&a.model, &a.spec)?;
    let solver = a.solver.config()?;
    let instance = a.model.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let spec_name = a.spec.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let size = m.num_states();
    let run = synthesize(Arc::new(m), Arc::new(d), &spec, &a.program.config(), &solver).map_err(|e| {
        let code = match e {
            PipelineError::Ilp(_) => EXIT_USAGE,
            _ => EXIT_SOLVER,
        };
        Failure::new(code, e)
    })?;
    let mut record = RunRecord {
        instance,
        size,
        spec: spec_name,
        status: "infeasible".into(),
        seconds: run.total_seconds,
        objective: None,
        verified: None,
        solver_seconds: run.solver_seconds,
    };
    let code = match &run.outcome {
        Outcome::Infeasible { reason } => {
            eprintln!("infeasible: {reason}");
            EXIT_INFEASIBLE
        }
        Outcome::Solved { policy, report, objective, status, recurrent_identity_residual, .. } => {
            record.status = status.as_str().into();
            record.objective = *objective;
            record.verified = Some(report.verdict);
            log::info!("occupation identity residual on recurrent states: {recurrent_identity_residual:e}");
            if let Some(path) = &a.report {
                write_file(path, &ReportJson::new(&run.product, report, &spec).to_pretty()).map_err(Failure::io)?;
            }
            if report.verdict {
                emit(a.output.as_deref(), &policy_to_json(&run.product, policy))?;
                0
            } else {
                eprintln!("the extracted policy failed verification");
                EXIT_UNVERIFIED
            }
        }
    };
    if let Some(path) = &a.record {
        let csv = to_csv(&[record]).map_err(Failure::io)?;
        write_file(path, &csv).map_err(Failure::io)?;
    }
    Ok(code)
}

fn verify(a: VerifyArgs) -> Result<u8, Failure> {
    let (m, spec, d) = load(&a.model, &a.spec)?;
    let p = ProductLmdp::new(Arc::new(m), Arc::new(d));
    let pi = load_policy(&a.policy, &p).map_err(Failure::io)?;
    let report = verify_on_product(&p, &spec, &pi).map_err(Failure::io)?;
    emit(a.output.as_deref(), &ReportJson::new(&p, &report, &spec).to_pretty())?;
    Ok(if report.verdict { 0 } else { 1 })
}

#[derive(serde::Serialize)]
struct SteadyJson {
    product: Vec<ProductMass>,
    aggregate: Vec<StateMass>,
}

/// One node, every letter a self-loop, accepting.
fn trivial_dra(ap: &[String]) -> Dra {
    let letters = 1usize << ap.len();
    let pair = RabinPair { fin: Default::default(), inf: [0].into_iter().collect() };
    Dra::new(vec!["q0".into()], 0, ap.to_vec(), vec![vec![0; letters]], vec![pair]).expect("trivial automaton is valid")
}

fn steady(a: SteadyArgs) -> Result<u8, Failure> {
    let (m, d) = match &a.spec {
        Some(spec) => {
            let (m, _, d) = load(&a.model, spec)?;
            (m, d)
        }
        None => {
            let m = load_model(&a.model).map_err(Failure::io)?;
            let d = trivial_dra(m.ap());
            (m, d)
        }
    };
    let p = ProductLmdp::new(Arc::new(m), Arc::new(d));
    let pi = match &a.policy {
        Some(policy) => load_policy(policy, &p).map_err(Failure::io)?,
        None => {
            let m = p.model();
            if let Some(s) = (0..m.num_states()).find(|&s| m.enabled(s).len() != 1) {
                return Err(Failure::io(format!(
                    "state `{}` has {} actions; pass --policy",
                    m.state_names()[s],
                    m.enabled(s).len()
                )));
            }
            p.states().iter().map(|&ps: &ProductState| (ps, m.enabled(ps.s)[0])).collect::<Policy>()
        }
    };
    let c = induce_chain(&p, &pi).map_err(Failure::io)?;
    let dist = limiting_distribution(&c.chain, &Distribution::point(c.states.len(), c.initial))
        .map_err(Failure::io)?;
    let lumped = lump_distribution(&dist, &c.partition());
    let mut aggregate = vec![0.0; p.model().num_states()];
    for (class, s) in c.class_states().into_iter().enumerate() {
        aggregate[s] = lumped[class];
    }
    let out = SteadyJson { product: product_masses(&p, &c.states, &dist), aggregate: state_masses(&p, &aggregate) };
    let mut text = serde_json::to_string_pretty(&out).expect("steady output serializes");
    text.push('\n');
    emit(a.output.as_deref(), &text)?;
    Ok(0)
}

fn export(a: ExportArgs) -> Result<u8, Failure> {
    let (m, spec, d) = load(&a.model, &a.spec)?;
    let p = ProductLmdp::new(Arc::new(m), Arc::new(d));
    let amecs = accepting_mecs(&mec_decomposition(&p), &p);
    match build_program(&p, &amecs, &spec, &a.program.config()) {
        Ok(program) => {
            emit(a.output.as_deref(), &export_lp(&program))?;
            Ok(0)
        }
        Err(e @ IlpError::NoAcceptingMec) => Err(Failure::new(EXIT_INFEASIBLE, e)),
        Err(e) => Err(Failure::io(e)),
    }
}

fn bench(a: BenchArgs) -> Result<u8, Failure> {
    let solver = a.solver.config()?;
    let suite = Suite { specs: a.specs, sizes: a.sizes, seeds: a.seeds.0, workers: a.workers };
    let records = run_suite(&suite, &a.program.config(), &solver);
    emit(a.output.as_deref(), &to_csv(&records).map_err(Failure::io)?)?;
    if let Some(path) = &a.summary {
        write_file(path, &to_csv(&summarize(&records)).map_err(Failure::io)?).map_err(Failure::io)?;
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.cmd {
        Cmd::GenGrid(a) => gen_grid(a),
        Cmd::Synth(a) => synth(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Steady(a) => steady(a),
        Cmd::ExportLp(a) => export(a),
        Cmd::Bench(a) => bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
