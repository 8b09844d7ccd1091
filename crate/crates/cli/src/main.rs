//! `witl`: rate-distortion, common-information and Gray-Wyner solvers from
//! the command line.
//!
//! Exit status: 0 success, 1 audit failure, 2 input error, 3 budget
//! exhausted. Nothing is written unless the run succeeds (an audit with
//! failing checks still writes its report).

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use witl_core::audit::{self, AuditReport};
use witl_core::closed_form::{self as cf, C3Value, DsbsParams, GaussParams, RegionLabel};
use witl_core::common_info::{solve_common_info, CiBudget, CommonInfoSolution, SolveMode};
use witl_core::gray_wyner::{c3_tilde, c_star, check_membership, GwBudget, RatePoint};
use witl_core::prob::{Divergence, JointPmf, SourceDoc};
use witl_core::rd::{self, BaConfig, DistortionDoc, DistortionSpec};
use witl_core::synthesis::{build_generator, build_type_class_generator, exact_delta};
use witl_core::{Error, Exec};

use output::{Cell, Format, Payload, Table};

#[derive(Parser, Serialize)]
#[command(name = "witl", version, about = "Common information, Gray-Wyner regions and rate-distortion solvers")]
struct Cli {
    /// Worker threads for data-parallel loops; 1 runs sequentially.
    #[arg(long, global = true, env = "WITL_THREADS")]
    threads: Option<usize>,
    /// Output format; tables default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
enum Cmd {
    /// Marginal, joint or conditional rate-distortion function, or a
    /// multiplier sweep.
    Rd(RdArgs),
    /// Wyner common information of a finite source.
    Ci(CiArgs),
    /// Lossy common rate C3(D1, D2) of a pair.
    C3(C3Args),
    /// One-sided Gray-Wyner region membership.
    Member(MemberArgs),
    /// Closed forms for the doubly symmetric binary source.
    Dsbs(DsbsArgs),
    /// Closed forms for the bivariate Gaussian source.
    Gauss(GaussArgs),
    /// Exact small-blocklength distribution synthesis.
    Synth(SynthArgs),
    /// Inequality and sufficient-condition audits.
    Audit(AuditArgs),
}

#[derive(Args, Serialize)]
struct SourceArgs {
    /// Source JSON: {"alphabet_sizes": [..], "pmf": [..]}.
    #[arg(long)]
    source: PathBuf,
}

#[derive(Args, Serialize)]
struct DistArgs {
    /// Distortion JSON; Hamming when omitted.
    #[arg(long)]
    dist: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct BaArgs {
    /// Stop when the objective changes by less than this, bits.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
}

impl BaArgs {
    fn config(&self) -> BaConfig {
        BaConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            ..BaConfig::default()
        }
    }
}

#[derive(Args, Serialize)]
struct RdArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    dist: DistArgs,
    /// Distortion targets, one per coordinate (one for --conditional).
    #[arg(long = "D", value_delimiter = ',', required_unless_present = "multipliers")]
    d: Vec<f64>,
    /// Treat the last coordinate as side information W and compute R_{X|W}(D).
    #[arg(long)]
    conditional: bool,
    /// Sweep: one run per multiplier vector from the product of this list
    /// over coordinates; emits the traced points.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["d", "conditional"])]
    multipliers: Option<Vec<f64>>,
    #[command(flatten)]
    ba: BaArgs,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    Auto,
    Exhaustive,
    Restart,
}

#[derive(Args, Serialize)]
struct CiSearchArgs {
    /// Auxiliary alphabet size; heuristic default when omitted.
    #[arg(long)]
    card: Option<usize>,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// Gradient steps per penalty stage in restart mode.
    #[arg(long, default_value_t = 1500)]
    steps: usize,
}

impl CiSearchArgs {
    fn budget(&self, exec: Exec) -> CiBudget {
        CiBudget {
            mode: match self.mode {
                ModeArg::Auto => SolveMode::Auto,
                ModeArg::Exhaustive => SolveMode::Exhaustive,
                ModeArg::Restart => SolveMode::Restart,
            },
            restarts: self.restarts,
            seed: self.seed,
            steps_per_stage: self.steps,
            exec,
            ..CiBudget::default()
        }
    }
}

#[derive(Args, Serialize)]
struct CiArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    search: CiSearchArgs,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum C3Method {
    Tilde,
    Star,
    Both,
}

#[derive(Args, Serialize)]
struct GwArgs {
    #[command(flatten)]
    search: CiSearchArgs,
    /// Random auxiliaries tried besides the structured candidates.
    #[arg(long, default_value_t = 2)]
    random_candidates: usize,
    #[command(flatten)]
    ba: BaArgs,
}

impl GwArgs {
    fn budget(&self, exec: Exec) -> GwBudget {
        GwBudget {
            ci: self.search.budget(exec),
            random_candidates: self.random_candidates,
            seed: self.search.seed,
            ba: self.ba.config(),
            exec,
            ..GwBudget::default()
        }
    }
}

#[derive(Args, Serialize)]
struct C3Args {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    dist: DistArgs,
    /// Distortion targets D1,D2.
    #[arg(long = "D", value_delimiter = ',', required = true)]
    d: Vec<f64>,
    /// Candidate-based characterization to evaluate.
    #[arg(long, value_enum, default_value_t = C3Method::Both)]
    method: C3Method,
    #[command(flatten)]
    gw: GwArgs,
}

#[derive(Args, Serialize)]
struct MemberArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    dist: DistArgs,
    /// Rates JSON: {"R0": r0, "privates": [r1, .., rN]}.
    #[arg(long)]
    rates: PathBuf,
    /// Distortion targets, one per coordinate.
    #[arg(long = "D", value_delimiter = ',', required = true)]
    d: Vec<f64>,
    #[command(flatten)]
    gw: GwArgs,
}

#[derive(Args, Serialize)]
#[group(required = true, multiple = false)]
struct DsbsSource {
    /// BSC crossover from the common bit.
    #[arg(long)]
    a1: Option<f64>,
    /// Disagreement probability of the pair.
    #[arg(long)]
    a0: Option<f64>,
}

#[derive(Args, Serialize)]
struct DsbsArgs {
    #[command(flatten)]
    source: DsbsSource,
    #[command(subcommand)]
    what: ClosedCmd,
}

#[derive(Args, Serialize)]
struct GaussArgs {
    #[arg(long, allow_hyphen_values = true)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma1: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[command(subcommand)]
    what: ClosedCmd,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "query")]
enum ClosedCmd {
    /// Region tag of (D1, D2).
    Region {
        /// Distortion targets D1,D2.
        #[arg(long = "D", value_delimiter = ',', required = true)]
        d: Vec<f64>,
    },
    /// Joint rate-distortion function at (D1, D2).
    Rd {
        /// Distortion targets D1,D2.
        #[arg(long = "D", value_delimiter = ',', required = true)]
        d: Vec<f64>,
    },
    /// C3 at (D1, D2): a point value or a bracket.
    C3 {
        /// Distortion targets D1,D2.
        #[arg(long = "D", value_delimiter = ',', required = true)]
        d: Vec<f64>,
    },
    /// Common information (Gaussian: of N equicorrelated variables).
    Ci {
        /// Number of variables sharing the common component.
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Rate allocation (R0, R1, R2) for D <= D' <= corner.
    Alloc {
        /// Intermediate distortions D1',D2'.
        #[arg(long = "Dp", value_delimiter = ',', required = true)]
        dp: Vec<f64>,
        /// Distortion targets D1,D2.
        #[arg(long = "D", value_delimiter = ',', required = true)]
        d: Vec<f64>,
    },
    /// n x n table of (D1, D2, region, R_joint, C3_low, C3_high).
    Grid {
        /// Points per axis.
        #[arg(long, default_value_t = 50)]
        grid: usize,
        /// Largest distortion on each axis (default 0.5 binary, 1 Gaussian).
        #[arg(long)]
        max: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CodebookArg {
    Random,
    TypeClass,
}

#[derive(Args, Serialize)]
struct SynthArgs {
    /// Source JSON the synthesized distribution is compared against; with
    /// only --solution the target is the mixture the solution induces.
    #[arg(long, required_unless_present = "solution")]
    source: Option<PathBuf>,
    /// Decomposition JSON as written by `witl ci`; solved from the source
    /// when omitted.
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Common rate, bits per symbol.
    #[arg(long = "R0")]
    r0: f64,
    /// Blocklengths `a..b` (inclusive) or a single value.
    #[arg(long, default_value = "1..4")]
    n: String,
    /// Stride through the blocklength range.
    #[arg(long, default_value_t = 1)]
    step: usize,
    /// Number of random codebooks per blocklength.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// First codebook seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// i.i.d. codewords, or codewords spread through one type class.
    #[arg(long, value_enum, default_value_t = CodebookArg::Random)]
    codebook: CodebookArg,
    /// Auxiliary alphabet size when solving from the source.
    #[arg(long)]
    card: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Suite {
    Lemma1,
    T4,
    T9,
    Bounds,
}

#[derive(Args, Serialize)]
struct AuditArgs {
    /// lemma1: rate-distortion inequalities on random sources; t4: frontier
    /// where C3 equals the common information; t9: corner conditions of the
    /// closed forms; bounds: common-information sandwich.
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random sources (lemma1: 100, bounds: 200 by default).
    #[arg(long)]
    count: Option<usize>,
}

// ---------------------------------------------------------------------------
// errors

enum Failure {
    Input(String),
    Budget(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget { .. } | Error::Infeasible { .. } | Error::SweepResolution { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn input<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Input(msg.into()))
}

// ---------------------------------------------------------------------------
// ingestion and validation

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        let msg = e.to_string();
        let bare = msg.split(" at line ").next().unwrap_or(&msg).to_string();
        Failure::Input(format!("{}:{}:{}: {bare}", path.display(), e.line(), e.column()))
    })
}

/// Accepts either a bare document or a `witl` output envelope.
fn read_result<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let v: Value = read_json(path)?;
    let inner = match v {
        Value::Object(mut m) if m.contains_key("result") && m.contains_key("tool") => m.remove("result").unwrap_or(Value::Null),
        other => other,
    };
    serde_json::from_value(inner).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_source(args: &SourceArgs) -> CliResult<JointPmf> {
    read_source(&args.source)
}

/// Syntax errors carry serde's position; value errors point at the
/// `"pmf"` key.
fn read_source(path: &Path) -> CliResult<JointPmf> {
    let doc: SourceDoc = read_json(path)?;
    JointPmf::try_from(doc).map_err(|e| {
        let text = std::fs::read_to_string(path).unwrap_or_default();
        let at = text
            .lines()
            .enumerate()
            .find_map(|(i, l)| l.find("\"pmf\"").map(|c| (i + 1, c + 1)))
            .unwrap_or((1, 1));
        Failure::Input(format!("{}:{}:{}: {e}", path.display(), at.0, at.1))
    })
}

fn load_dist(args: &DistArgs, sizes: &[usize]) -> CliResult<DistortionSpec> {
    match &args.dist {
        None => Ok(DistortionSpec::hamming(sizes)),
        Some(path) => {
            let doc: DistortionDoc = read_json(path)?;
            doc.resolve(sizes).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
    }
}

fn check_targets(d: &[f64], want: usize) -> CliResult<()> {
    if d.len() != want {
        return input(format!("--D needs {want} value(s), got {}", d.len()));
    }
    if d.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return input("distortions must be finite and >= 0");
    }
    Ok(())
}

fn pair(d: &[f64]) -> CliResult<(f64, f64)> {
    check_targets(d, 2)?;
    Ok((d[0], d[1]))
}

fn parse_range(s: &str, step: usize) -> CliResult<Vec<usize>> {
    let bad = || Failure::Input(format!("--n expects `a..b` or a single blocklength, got {s:?}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if a == 0 || b < a || step == 0 {
        return Err(bad());
    }
    Ok((a..=b).step_by(step).collect())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

// ---------------------------------------------------------------------------
// subcommands

fn run_rd(a: &RdArgs, exec: Exec) -> CliResult<Payload> {
    let p = load_source(&a.source)?;
    let cfg = a.ba.config();
    if let Some(lams) = &a.multipliers {
        let d = load_dist(&a.dist, p.alphabet_sizes())?;
        if lams.is_empty() || lams.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
            return input("--multipliers must be finite and >= 0");
        }
        let n = p.ndim();
        let mut grid: Vec<Vec<f64>> = vec![Vec::new()];
        for _ in 0..n {
            grid = grid.into_iter().flat_map(|g| lams.iter().map(move |l| [g.clone(), vec![*l]].concat())).collect();
        }
        let points = rd::trace_rd_curve(&p, &d, &grid, &cfg, exec)?;
        let mut cols: Vec<String> = (1..=n).map(|i| format!("lambda{i}")).collect();
        cols.extend((1..=n).map(|i| format!("D{i}")));
        cols.push("rate".into());
        let mut t = Table::new(&cols.iter().map(String::as_str).collect::<Vec<_>>());
        for (lam, pt) in grid.iter().zip(&points) {
            let mut row: Vec<Cell> = lam.iter().map(|&l| l.into()).collect();
            row.extend(pt.distortion.iter().map(|&v| Cell::from(v)));
            row.push(pt.rate.into());
            t.push(row);
        }
        return Ok(Payload::Table(t));
    }
    let point = if a.conditional {
        if p.ndim() != 2 {
            return input("--conditional expects a source with coordinates (X, W)");
        }
        check_targets(&a.d, 1)?;
        let d = load_dist(&a.dist, &p.alphabet_sizes()[..1])?;
        rd::ba_conditional_rd(&p, &d, a.d[0], &cfg)?
    } else {
        let d = load_dist(&a.dist, p.alphabet_sizes())?;
        match p.ndim() {
            1 => {
                check_targets(&a.d, 1)?;
                rd::ba_rate_distortion(&p, &d, a.d[0], &cfg)?
            }
            2 => rd::ba_joint_rd(&p, &d, pair(&a.d)?, &cfg)?,
            n => return input(format!("distortion-constrained queries take one or two coordinates, got {n}; use --multipliers")),
        }
    };
    Ok(Payload::Document(to_value(&point)))
}

fn run_ci(a: &CiArgs, exec: Exec) -> CliResult<Payload> {
    let p = load_source(&a.source)?;
    let sol = solve_common_info(&p, a.search.card, &a.search.budget(exec))?;
    Ok(Payload::Document(to_value(&sol)))
}

fn run_c3(a: &C3Args, exec: Exec) -> CliResult<Payload> {
    let p = load_source(&a.source)?;
    let d = load_dist(&a.dist, p.alphabet_sizes())?;
    let targets = pair(&a.d)?;
    let budget = a.gw.budget(exec);
    let mut doc = serde_json::Map::new();
    if matches!(a.method, C3Method::Tilde | C3Method::Both) {
        doc.insert("tilde".into(), to_value(&c3_tilde(&p, &d, targets, &budget)?));
    }
    if matches!(a.method, C3Method::Star | C3Method::Both) {
        doc.insert("star".into(), to_value(&c_star(&p, &d, targets, &budget)?));
    }
    Ok(Payload::Document(Value::Object(doc)))
}

fn run_member(a: &MemberArgs, exec: Exec) -> CliResult<Payload> {
    let p = load_source(&a.source)?;
    let d = load_dist(&a.dist, p.alphabet_sizes())?;
    let rates: RatePoint = read_result(&a.rates)?;
    let rates = RatePoint::new(rates.r0, rates.privates)?;
    check_targets(&a.d, p.ndim())?;
    let m = check_membership(&p, &d, &rates, &a.d, &a.gw.budget(exec))?;
    Ok(Payload::Document(to_value(&m)))
}

/// Uniform closed-form interface over the two families.
enum Family {
    Dsbs(DsbsParams),
    Gauss(GaussParams),
}

impl Family {
    fn region(&self, d1: f64, d2: f64) -> witl_core::Result<RegionLabel> {
        match self {
            Family::Dsbs(p) => cf::dsbs_region(*p, d1, d2),
            Family::Gauss(g) => cf::gauss_region(*g, d1, d2),
        }
    }
    fn joint_rd(&self, d1: f64, d2: f64) -> witl_core::Result<f64> {
        match self {
            Family::Dsbs(p) => cf::dsbs_joint_rd(*p, d1, d2),
            Family::Gauss(g) => cf::gauss_joint_rd(*g, d1, d2),
        }
    }
    fn c3(&self, d1: f64, d2: f64) -> witl_core::Result<C3Value> {
        match self {
            Family::Dsbs(p) => cf::dsbs_c3(*p, d1, d2),
            Family::Gauss(g) => cf::gauss_c3(*g, d1, d2),
        }
    }
    fn default_max(&self) -> f64 {
        match self {
            Family::Dsbs(_) => 0.5,
            Family::Gauss(g) => g.sigma1.max(g.sigma2).powi(2),
        }
    }
}

fn run_closed(family: Family, what: &ClosedCmd) -> CliResult<Payload> {
    let params = match &family {
        Family::Dsbs(p) => to_value(p),
        Family::Gauss(g) => to_value(g),
    };
    let doc = match what {
        ClosedCmd::Region { d } => {
            let (d1, d2) = pair(d)?;
            json!({ "region": family.region(d1, d2)? })
        }
        ClosedCmd::Rd { d } => {
            let (d1, d2) = pair(d)?;
            json!({ "region": family.region(d1, d2)?, "rate": family.joint_rd(d1, d2)? })
        }
        ClosedCmd::C3 { d } => {
            let (d1, d2) = pair(d)?;
            let mut v = to_value(&family.c3(d1, d2)?);
            if let Value::Object(m) = &mut v {
                m.insert("region".into(), to_value(&family.region(d1, d2)?));
            }
            v
        }
        ClosedCmd::Ci { n } => {
            let value = match &family {
                Family::Dsbs(p) if *n == 2 => cf::dsbs_common_info(*p),
                Family::Dsbs(p) => witl_core::common_info::broadcast_common_info(0.5, p.a1, *n)?,
                Family::Gauss(g) => cf::gauss_common_info_n(*g, *n)?,
            };
            json!({ "n": n, "value": value })
        }
        ClosedCmd::Alloc { dp, d } => {
            let (dp1, dp2) = pair(dp)?;
            let (d1, d2) = pair(d)?;
            let (r0, r1, r2) = match &family {
                Family::Dsbs(p) => cf::dsbs_allocation(*p, dp1, dp2, d1, d2)?,
                Family::Gauss(g) => cf::gauss_allocation(*g, dp1, dp2, d1, d2)?,
            };
            json!({ "R0": r0, "privates": [r1, r2], "sum": r0 + r1 + r2, "joint_rate": family.joint_rd(d1, d2)? })
        }
        ClosedCmd::Grid { grid, max } => {
            let hi = max.unwrap_or(family.default_max());
            if *grid == 0 || !(hi > 0.0 && hi.is_finite()) {
                return input("--grid must be >= 1 and --max positive");
            }
            let mut t = Table::new(&["D1", "D2", "region", "R_joint", "C3_low", "C3_high"]);
            for i in 1..=*grid {
                for j in 1..=*grid {
                    let (d1, d2) = (hi * i as f64 / *grid as f64, hi * j as f64 / *grid as f64);
                    let c3 = family.c3(d1, d2)?;
                    t.push(vec![
                        d1.into(),
                        d2.into(),
                        family.region(d1, d2)?.as_str().into(),
                        family.joint_rd(d1, d2)?.into(),
                        c3.lower().into(),
                        c3.upper().into(),
                    ]);
                }
            }
            return Ok(Payload::Table(t));
        }
    };
    let mut doc = doc;
    if let Value::Object(m) = &mut doc {
        m.insert("params".into(), params);
    }
    Ok(Payload::Document(doc))
}

fn run_dsbs(a: &DsbsArgs) -> CliResult<Payload> {
    let p = match (a.source.a1, a.source.a0) {
        (Some(a1), _) => DsbsParams::from_a1(a1)?,
        (_, Some(a0)) => DsbsParams::from_a0(a0)?,
        _ => return input("one of --a1 or --a0 is required"),
    };
    run_closed(Family::Dsbs(p), &a.what)
}

fn run_gauss(a: &GaussArgs) -> CliResult<Payload> {
    run_closed(Family::Gauss(GaussParams::with_scales(a.rho, a.sigma1, a.sigma2)?), &a.what)
}

fn run_synth(a: &SynthArgs, exec: Exec) -> CliResult<Payload> {
    let ns = parse_range(&a.n, a.step)?;
    if !(a.r0 >= 0.0 && a.r0.is_finite()) {
        return input("--R0 must be finite and >= 0");
    }
    if a.seeds == 0 {
        return input("--seeds must be >= 1");
    }
    let (p, sol): (JointPmf, CommonInfoSolution) = match (&a.source, &a.solution) {
        (Some(src), Some(path)) => {
            let p = read_source(src)?;
            (p, read_result(path)?)
        }
        (Some(src), None) => {
            let p = read_source(src)?;
            let budget = CiBudget { exec, ..CiBudget::default() };
            let sol = solve_common_info(&p, a.card, &budget)?;
            (p, sol)
        }
        (None, Some(path)) => {
            let sol: CommonInfoSolution = read_result(path)?;
            let p = witl_core::prob::mix_channels(&sol.pw, &sol.channels)?;
            (p, sol)
        }
        (None, None) => return input("--source or --solution is required"),
    };
    let mut t = Table::new(&["n", "M", "seed", "delta"]);
    for &n in &ns {
        let runs: Vec<(Option<u64>, _)> = match a.codebook {
            CodebookArg::TypeClass => vec![(None, build_type_class_generator(&sol, n, a.r0)?)],
            CodebookArg::Random => (a.seed..a.seed + a.seeds)
                .map(|s| Ok((Some(s), build_generator(&sol, n, a.r0, s)?)))
                .collect::<CliResult<_>>()?,
        };
        for (seed, gen) in runs {
            let r = exact_delta(&gen, &p, exec)?;
            t.push(vec![
                n.into(),
                r.m.into(),
                seed.map_or(Cell::Empty, Cell::Int),
                match r.delta {
                    Divergence::Finite(v) => v.into(),
                    Divergence::Infinite => f64::INFINITY.into(),
                },
            ]);
        }
    }
    Ok(Payload::Table(t))
}

/// Lighter restart budget for audit sweeps; the audited bounds hold for any
/// feasible decomposition.
fn audit_ci_budget(seed: u64, exec: Exec) -> CiBudget {
    CiBudget {
        restarts: 4,
        steps_per_stage: 300,
        seed,
        exec,
        ..CiBudget::default()
    }
}

fn run_audit(a: &AuditArgs, exec: Exec) -> CliResult<AuditReport> {
    Ok(match a.suite {
        Suite::Lemma1 => audit::rd_inequality_suite(a.seed, a.count.unwrap_or(100), exec)?,
        Suite::T4 => audit::frontier_suite(exec)?,
        Suite::T9 => audit::corner_suite()?,
        Suite::Bounds => audit::bounds_suite(a.seed, a.count.unwrap_or(200), &audit_ci_budget(a.seed, exec))?,
    })
}

fn configure_threads(threads: Option<usize>) -> CliResult<Exec> {
    match threads {
        Some(0) => input("--threads must be >= 1"),
        Some(1) => Ok(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(t) => {
            // A second initialization in the same process is harmless.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            Ok(Exec::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Exec::Sequential),
        None => Ok(if cfg!(feature = "parallel") { Exec::Parallel } else { Exec::Sequential }),
    }
}

fn run(cli: &Cli) -> CliResult<(String, bool)> {
    let exec = configure_threads(cli.threads)?;
    let config = to_value(cli);
    let table_cmd = matches!(
        &cli.cmd,
        Cmd::Synth(_)
            | Cmd::Dsbs(DsbsArgs { what: ClosedCmd::Grid { .. }, .. })
            | Cmd::Gauss(GaussArgs { what: ClosedCmd::Grid { .. }, .. })
    ) || matches!(&cli.cmd, Cmd::Rd(r) if r.multipliers.is_some());
    let format = cli.format.unwrap_or(if table_cmd { Format::Csv } else { Format::Json });
    if format == Format::Csv && !table_cmd {
        return input("this subcommand emits a JSON document; --format csv applies to tables only");
    }
    let mut ok = true;
    let payload = match &cli.cmd {
        Cmd::Rd(a) => run_rd(a, exec)?,
        Cmd::Ci(a) => run_ci(a, exec)?,
        Cmd::C3(a) => run_c3(a, exec)?,
        Cmd::Member(a) => run_member(a, exec)?,
        Cmd::Dsbs(a) => run_dsbs(a)?,
        Cmd::Gauss(a) => run_gauss(a)?,
        Cmd::Synth(a) => run_synth(a, exec)?,
        Cmd::Audit(a) => {
            let report = run_audit(a, exec)?;
            ok = report.passed();
            Payload::Document(to_value(&report))
        }
    };
    Ok((output::render(&payload, format, &config), ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, ok)) => {
            if let Err(e) = output::write(&text, cli.output.as_deref()) {
                eprintln!("witl: {}", Failure::Io(e.to_string()).message());
                return ExitCode::from(2);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("witl: audit reported failing checks");
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("witl: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) | Failure::Io(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Budget(m) | Failure::Io(m) => m,
        }
    }
}
