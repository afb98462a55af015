//! `heatwalk`: command-line access to every engine, with JSON or CSV output
//! and a manifest in each artifact.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage or
//! parameter errors.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heatwalk::class_walk::ClassWalk;
use heatwalk::coverings::{analytic_expectation, genus_estimator};
use heatwalk::expansion::{evaluate_auto, fourier_moment, moment_expansion, slice_f64, Group};
use heatwalk::free_prob::{
    free_cumulant, limit_moment, mixed_cumulant, moment_from_cumulants, word_moment, Word,
};
use heatwalk::mc_sim::{estimate_moments, SimConfig, TimeConvention};
use heatwalk::noncross::{enumerate_nc, kreweras, kreweras_by_search, NCPartition};
use heatwalk::sym_char::{c_np, s_ncycle_closed};
use heatwalk::tensor_rep::{casimir_identity_check, LieGroup, DEFAULT_MAX_DIM};
use heatwalk::verify::{self, Scale};
use heatwalk::{CycleType, Error};
use serde::Serialize;
use serde_json::{json, Value};

use output::{float, integer, render, to_value, Artifact, Format, RunManifest};

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "heatwalk",
    version,
    about = "Heat-kernel moments of unitary Brownian motion"
)]
struct Cli {
    /// Output format; CSV is tabular where the result is a table.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (0 = one per core).
    #[arg(long, env = "HEATWALK_THREADS", default_value_t = 0, global = true)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Table of S(σ,k,d) from the class walk.
    STable(STableArgs),
    /// S((1…n),k,d) from the closed formula.
    SClosed(SClosedArgs),
    /// Number of factorizations of an n-cycle into p transpositions.
    Cnp(CnpArgs),
    /// Exact coefficients of the 1/N expansion of a moment.
    Expand(ExpandArgs),
    /// Evaluates a moment from the expansion with a certified tail.
    Eval(EvalArgs),
    /// Evaluates a moment from the character (Fourier) formula.
    Fourier(FourierArgs),
    /// Lists the non-crossing partitions of {1…n}.
    Nc(NcArgs),
    /// Kreweras complement of a non-crossing partition.
    Kreweras(KrewerasArgs),
    /// Limit moments φ(u_t^n) of free unitary Brownian motion.
    Moments(SeriesArgs),
    /// Free cumulants of the limit, with the moments they rebuild.
    Cumulants(SeriesArgs),
    /// Limit value and mixed cumulant of a word in free copies.
    Word(WordArgs),
    /// Exact Casimir identity on (C^N)^{⊗n}.
    VerifyCasimir(CasimirArgs),
    /// Monte Carlo estimates of moments on U(N).
    Simulate(SimulateArgs),
    /// Random ramified coverings and the genus statistic.
    Cover(CoverArgs),
    /// Runs the full invariant suite.
    VerifyAll(VerifyArgs),
}

#[derive(Args, Debug, Serialize)]
struct STableArgs {
    #[arg(long)]
    n: usize,
    /// Cycle type of the starting point, e.g. 2,1.
    #[arg(long = "class")]
    class: CycleType,
    #[arg(long, default_value_t = 6)]
    kmax: usize,
    /// Refuse longer walks.
    #[arg(long, default_value_t = 400)]
    kmax_budget: usize,
    /// Refuse larger degrees.
    #[arg(long, default_value_t = 30)]
    n_max: usize,
}

#[derive(Args, Debug, Serialize)]
struct SClosedArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Single defect; all defects when omitted.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct CnpArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GroupArg {
    U,
    Su,
}

impl From<GroupArg> for Group {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::U => Group::U,
            GroupArg::Su => Group::SU,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct ExpandArgs {
    #[arg(long)]
    cycle_type: CycleType,
    #[arg(long, value_enum, default_value = "u")]
    group: GroupArg,
    #[arg(long, default_value_t = 2)]
    dmax: usize,
    /// Refuse larger defects.
    #[arg(long, default_value_t = 60)]
    dmax_budget: usize,
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    #[arg(long)]
    cycle_type: CycleType,
    #[arg(long = "N")]
    big_n: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, value_enum, default_value = "u")]
    group: GroupArg,
    /// Target bound on the truncation error.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args, Debug, Serialize)]
struct FourierArgs {
    #[arg(long)]
    cycle_type: CycleType,
    #[arg(long = "N")]
    big_n: u32,
    #[arg(long)]
    t: f64,
    #[arg(long, value_enum, default_value = "u")]
    group: GroupArg,
}

#[derive(Args, Debug, Serialize)]
struct NcArgs {
    #[arg(long)]
    n: usize,
    /// Also list each Kreweras complement.
    #[arg(long)]
    kreweras: bool,
}

#[derive(Args, Debug, Serialize)]
struct KrewerasArgs {
    /// Block notation, e.g. "{1,3}{2}".
    #[arg(long)]
    partition: String,
}

#[derive(Args, Debug, Serialize)]
struct SeriesArgs {
    #[arg(long)]
    n_max: usize,
    #[arg(long)]
    t: f64,
}

#[derive(Args, Debug, Serialize)]
struct WordArgs {
    /// Letters with the time of each variable at its first use, e.g.
    /// "a(0.5) b(1) a b".
    #[arg(long)]
    word: String,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum LieGroupArg {
    U,
    Su,
    So,
    Sp,
}

impl From<LieGroupArg> for LieGroup {
    fn from(g: LieGroupArg) -> Self {
        match g {
            LieGroupArg::U => LieGroup::U,
            LieGroupArg::Su => LieGroup::SU,
            LieGroupArg::So => LieGroup::SO,
            LieGroupArg::Sp => LieGroup::Sp,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct CasimirArgs {
    #[arg(long, value_enum)]
    group: LieGroupArg,
    #[arg(long)]
    n: usize,
    /// Matrix size; Sp(N) acts on C^{2N}.
    #[arg(long = "N")]
    big_n: usize,
    /// Refuse operators on more than this many basis vectors.
    #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TimeArg {
    /// Samples B_{t/N}.
    Scaled,
    /// Samples B_t.
    Raw,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    /// Repeat for several moments on shared paths.
    #[arg(long, required = true)]
    cycle_type: Vec<CycleType>,
    #[arg(long = "N")]
    big_n: usize,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "scaled")]
    time: TimeArg,
    /// Refuse more than this many samples × steps.
    #[arg(long, default_value_t = 1_000_000_000)]
    work_budget: u64,
}

#[derive(Args, Debug, Serialize)]
struct CoverArgs {
    #[arg(long)]
    cycle_type: CycleType,
    #[arg(long = "N")]
    big_n: usize,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ScaleArg {
    Quick,
    Full,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    scale: ScaleArg,
    /// Run only these criteria, e.g. --only 1,4.
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
}

/// Failure modes mapped to exit codes.
enum Failure {
    Usage(String),
    Verification(Box<Artifact>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn check_class(n: usize, class: &CycleType) -> Result<(), Failure> {
    if class.size() == n {
        Ok(())
    } else {
        Err(usage(format!(
            "class {class} is a partition of {}, not of n = {n}",
            class.size()
        )))
    }
}

fn run(cmd: &Command) -> Result<Artifact, Failure> {
    match cmd {
        Command::STable(a) => {
            check_class(a.n, &a.class)?;
            if a.n > a.n_max {
                return Err(usage(format!("n = {} above --n-max {}", a.n, a.n_max)));
            }
            if a.kmax > a.kmax_budget {
                return Err(usage(format!(
                    "kmax {} above --kmax-budget {}",
                    a.kmax, a.kmax_budget
                )));
            }
            let table = ClassWalk::new(a.n).path_count_table(&a.class, a.kmax)?;
            let rows: Vec<Vec<Value>> = table
                .nonzero()
                .map(|(k, d, s)| vec![json!(k), json!(d), integer(s)])
                .collect();
            let body = json!({
                "class": a.class.to_string(),
                "kmax": a.kmax,
                "rows": rows.iter().map(|r| json!({"k": r[0], "d": r[1], "S": r[2]})).collect::<Vec<_>>(),
            });
            Ok(Artifact::with_table(body, vec!["k", "d", "S"], rows))
        }
        Command::SClosed(a) => {
            if a.n == 0 {
                return Err(usage("n must be at least 1"));
            }
            let ds: Vec<usize> = match a.d {
                Some(d) => vec![d],
                None => (0..=(a.k + a.n) / 2).collect(),
            };
            let rows: Vec<Vec<Value>> = ds
                .into_iter()
                .map(|d| (d, s_ncycle_closed(a.n, a.k, d)))
                .filter(|(_, s)| a.d.is_some() || s.bits() > 0)
                .map(|(d, s)| vec![json!(a.k), json!(d), integer(&s)])
                .collect();
            let body = json!({
                "n": a.n,
                "rows": rows.iter().map(|r| json!({"k": r[0], "d": r[1], "S": r[2]})).collect::<Vec<_>>(),
            });
            Ok(Artifact::with_table(body, vec!["k", "d", "S"], rows))
        }
        Command::Cnp(a) => {
            if a.n == 0 {
                return Err(usage("n must be at least 1"));
            }
            let c = integer(&c_np(a.n, a.p));
            Ok(Artifact::with_table(
                json!({"n": a.n, "p": a.p, "c": c}),
                vec!["n", "p", "c"],
                vec![vec![json!(a.n), json!(a.p), c]],
            ))
        }
        Command::Expand(a) => {
            if a.dmax > a.dmax_budget {
                return Err(usage(format!(
                    "dmax {} above --dmax-budget {}",
                    a.dmax, a.dmax_budget
                )));
            }
            let e = moment_expansion(&a.cycle_type, a.group.into(), a.dmax);
            let mut rows = Vec::new();
            let mut slices = Vec::new();
            for d in 0..=a.dmax {
                let slice = e.slice(d);
                for (k, c) in slice.iter().enumerate() {
                    if !num_traits::Zero::is_zero(c) {
                        rows.push(vec![
                            json!(d),
                            json!(k),
                            integer(&e.s(d, k)),
                            json!(c.to_string()),
                        ]);
                    }
                }
                slices.push(json!({
                    "d": d,
                    "exact": slice.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "approx": slice_f64(&slice).into_iter().map(float).collect::<Vec<_>>(),
                }));
            }
            let mut body = to_value(&e);
            body["slices"] = Value::Array(slices);
            Ok(Artifact::with_table(
                body,
                vec!["d", "k", "S", "coefficient"],
                rows,
            ))
        }
        Command::Eval(a) => {
            let v = evaluate_auto(&a.cycle_type, a.group.into(), a.big_n, a.t, a.tol)?;
            let mut body = to_value(&v);
            body["class"] = json!(a.cycle_type.to_string());
            Ok(Artifact::new(body))
        }
        Command::Fourier(a) => {
            let v = fourier_moment(&a.cycle_type, a.group.into(), a.big_n, a.t)?;
            Ok(Artifact::new(
                json!({"class": a.cycle_type.to_string(), "value": float(v)}),
            ))
        }
        Command::Nc(a) => {
            let all = enumerate_nc(a.n)?;
            let rows: Vec<Vec<Value>> = all
                .iter()
                .map(|p| {
                    let mut r = vec![json!(p.to_string()), json!(p.rank())];
                    if a.kreweras {
                        r.push(json!(kreweras(p).to_string()));
                    }
                    r
                })
                .collect();
            let header = if a.kreweras {
                vec!["partition", "rank", "kreweras"]
            } else {
                vec!["partition", "rank"]
            };
            let body = json!({
                "n": a.n,
                "count": all.len(),
                "partitions": rows.iter().map(|r| r[0].clone()).collect::<Vec<_>>(),
            });
            Ok(Artifact::with_table(body, header, rows))
        }
        Command::Kreweras(a) => {
            let p: NCPartition = a.partition.parse()?;
            let k = kreweras(&p);
            let agrees = kreweras_by_search(&p).map(|s| s == k).ok();
            Ok(Artifact::new(json!({
                "partition": p.to_string(),
                "kreweras": k.to_string(),
                "search_agrees": agrees,
            })))
        }
        Command::Moments(a) => {
            let rows: Vec<Vec<Value>> = (1..=a.n_max)
                .map(|n| vec![json!(n), float(limit_moment(n, a.t))])
                .collect();
            let body = json!({"t": float(a.t), "moments": rows.iter().map(|r| r[1].clone()).collect::<Vec<_>>()});
            Ok(Artifact::with_table(body, vec!["n", "moment"], rows))
        }
        Command::Cumulants(a) => {
            let mut rows = Vec::new();
            for n in 1..=a.n_max {
                rows.push(vec![
                    json!(n),
                    float(free_cumulant(n, a.t)),
                    float(moment_from_cumulants(n, a.t)?),
                ]);
            }
            let body = json!({"t": float(a.t), "cumulants": rows.iter().map(|r| r[1].clone()).collect::<Vec<_>>()});
            Ok(Artifact::with_table(
                body,
                vec!["n", "cumulant", "moment_from_cumulants"],
                rows,
            ))
        }
        Command::Word(a) => {
            let w: Word = a.word.parse()?;
            Ok(Artifact::new(json!({
                "word": w.to_string(),
                "moment": float(word_moment(&w)?),
                "mixed_cumulant": float(mixed_cumulant(&w)?),
            })))
        }
        Command::VerifyCasimir(a) => {
            let r = casimir_identity_check(a.group.into(), a.n, a.big_n, a.max_dim)?;
            let art = Artifact::new(to_value(&r));
            if r.holds {
                Ok(art)
            } else {
                Err(Failure::Verification(Box::new(art)))
            }
        }
        Command::Simulate(a) => {
            let work = (a.samples as u64).saturating_mul(a.steps as u64);
            if work > a.work_budget {
                return Err(usage(format!(
                    "samples × steps = {work} above --work-budget {}",
                    a.work_budget
                )));
            }
            let time = match a.time {
                TimeArg::Scaled => TimeConvention::Scaled,
                TimeArg::Raw => TimeConvention::Raw,
            };
            let cfg = SimConfig::new(a.big_n, a.t)
                .steps(a.steps)
                .samples(a.samples)
                .seed(a.seed)
                .time(time);
            let results = estimate_moments(&a.cycle_type, &cfg)?;
            // In scaled time B_{t/N} is the expansion's B at (N, t);
            // in raw time B_t is the expansion at (N, N·t).
            let t_exp = match a.time {
                TimeArg::Scaled => a.t,
                TimeArg::Raw => a.t * a.big_n as f64,
            };
            let mut rows = Vec::new();
            for (l, r) in a.cycle_type.iter().zip(&results) {
                let exact = evaluate_auto(l, Group::U, a.big_n as f64, t_exp, 1e-13)?.value;
                rows.push(vec![
                    json!(l.to_string()),
                    float(r.mean),
                    float(r.stderr),
                    float(exact),
                    float(r.sigmas_from(exact)),
                ]);
            }
            let body = json!({
                "config": to_value(&cfg),
                "estimates": rows.iter().map(|r| json!({
                    "class": r[0], "mean": r[1], "stderr": r[2], "exact": r[3], "sigmas": r[4],
                })).collect::<Vec<_>>(),
            });
            Ok(Artifact::with_table(
                body,
                vec!["class", "mean", "stderr", "exact", "sigmas"],
                rows,
            ))
        }
        Command::Cover(a) => {
            let r = genus_estimator(&a.cycle_type, a.big_n, a.t, a.samples, a.seed)?;
            let analytic = analytic_expectation(&a.cycle_type, a.big_n, a.t)?;
            let mut body = to_value(&r);
            body["analytic"] = float(analytic);
            body["class"] = json!(a.cycle_type.to_string());
            Ok(Artifact::new(body))
        }
        Command::VerifyAll(a) => {
            let scale = match a.scale {
                ScaleArg::Quick => Scale::Quick,
                ScaleArg::Full => Scale::Full,
            };
            let ids: Vec<usize> = if a.only.is_empty() {
                verify::CRITERIA.iter().map(|c| c.0).collect()
            } else {
                a.only.clone()
            };
            let mut checks = Vec::new();
            for id in ids {
                let c =
                    verify::run(id, scale).ok_or_else(|| usage(format!("no criterion {id}")))?;
                eprintln!(
                    "{:>2} {:<30} {}",
                    c.id,
                    c.name,
                    if c.passed { "PASS" } else { "FAIL" }
                );
                checks.push(c);
            }
            let passed = checks.iter().all(|c| c.passed);
            // Timings vary between runs; keep them out of the artifact.
            let rows: Vec<Vec<Value>> = checks
                .iter()
                .map(|c| {
                    vec![
                        json!(c.id),
                        json!(c.name),
                        json!(c.passed),
                        json!(c.comparisons),
                        json!(c.failures.join("; ")),
                    ]
                })
                .collect();
            let body = json!({
                "passed": passed,
                "checks": rows.iter().map(|r| json!({
                    "id": r[0], "name": r[1], "passed": r[2], "comparisons": r[3], "failures": r[4],
                })).collect::<Vec<_>>(),
            });
            let art = Artifact::with_table(
                body,
                vec!["id", "name", "passed", "comparisons", "failures"],
                rows,
            );
            if passed {
                Ok(art)
            } else {
                Err(Failure::Verification(Box::new(art)))
            }
        }
    }
}

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Simulate(a) => Some(a.seed),
        Command::Cover(a) => Some(a.seed),
        _ => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let flags = to_value(&cli);
    let subcommand = flags
        .get("command")
        .and_then(Value::as_object)
        .and_then(|o| o.keys().next().cloned())
        .unwrap_or_default();
    let manifest = RunManifest::new(&subcommand, flags, seed_of(&cli.command));
    let (artifact, code) = match run(&cli.command) {
        Ok(a) => (a, 0),
        Err(Failure::Verification(a)) => (*a, 1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let written = render(&manifest, &artifact, cli.format)
        .and_then(|bytes| output::emit(&bytes, cli.output.as_deref()));
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
