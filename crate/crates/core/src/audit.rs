//! Executable checks of the rate-distortion inequality lattice and of the
//! sufficient conditions under which the lossy common rate equals the
//! common information. Every check records both sides, the slack and a
//! verdict; a check passes iff its slack is at least `-tolerance`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::closed_form::{
    dsbs_c3, dsbs_common_info, dsbs_joint_rd, dsbs_marginal_rd, gauss_c3, gauss_common_info, gauss_joint_rd,
    gauss_marginal_rd, C3Value, DsbsParams, GaussParams,
};
use crate::common_info::{bsc_broadcast_source, common_info_bounds, solve_common_info, CiBudget};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gray_wyner::{c3_tilde, GwBudget};
use crate::prob::{entropy, h2, marginalize, mutual_information, JointPmf};
use crate::rd::{ba_conditional_rd, ba_joint_rd, ba_rate_distortion, BaConfig, DistortionSpec};

/// Verdict threshold; looser than every solver tolerance so solver noise
/// cannot flip a verdict.
pub const AUDIT_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The check's hypothesis does not hold at this point.
    Skipped,
    /// Informational: only an interval is known.
    Bracket,
    /// Informational: empirical frontier location.
    Frontier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub slack: Option<f64>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// `lhs >= rhs`.
    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::graded(name, lhs, rhs, lhs - rhs, tol)
    }

    /// `lhs == rhs`, slack `-|lhs - rhs|`.
    pub fn equal(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::graded(name, lhs, rhs, -(lhs - rhs).abs(), tol)
    }

    fn graded(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            slack: Some(slack),
            verdict: if slack >= -tol { Verdict::Pass } else { Verdict::Fail },
            note: None,
        }
    }

    pub fn info(name: impl Into<String>, lhs: Option<f64>, rhs: Option<f64>, verdict: Verdict, note: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            lhs,
            rhs,
            slack: None,
            verdict,
            note: Some(note.into()),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn prefixed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}/{}", self.name);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub audit: f64,
    pub solver: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            audit: AUDIT_TOLERANCE,
            solver: BaConfig::default().tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub suite: String,
    /// Fingerprint of the audited source; absent for multi-source suites.
    pub fingerprint: Option<String>,
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
}

impl AuditReport {
    fn new(suite: &str, fingerprint: Option<String>, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        AuditReport {
            suite: suite.into(),
            fingerprint,
            tolerances: Tolerances::default(),
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Concatenates per-source reports under `prefix-NNN/` names.
    fn combine(suite: &str, prefix: &str, parts: Vec<AuditReport>) -> Self {
        let checks = parts
            .into_iter()
            .enumerate()
            .flat_map(|(k, r)| {
                let tag = format!("{prefix}-{k:03}");
                r.checks.into_iter().map(move |c| c.prefixed(&tag))
            })
            .collect();
        AuditReport::new(suite, None, checks)
    }
}

/// Source drawn from Dirichlet(1, ..., 1) over the joint simplex.
pub fn random_source(sizes: &[usize], seed: u64) -> Result<JointPmf> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len: usize = sizes.iter().product();
    let draws: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    JointPmf::new(sizes.to_vec(), draws.into_iter().map(|v| v / total).collect())
}

// ---------------------------------------------------------------------------
// rate-distortion inequalities

/// The five inequalities between marginal, conditional and joint
/// rate-distortion functions of a pair, plus equality checks for the two
/// that are tight exactly when the coordinates are independent.
pub fn audit_rd_inequalities(p: &JointPmf, d: &DistortionSpec, d1: f64, d2: f64, cfg: &BaConfig) -> Result<AuditReport> {
    if p.ndim() != 2 {
        return Err(Error::Shape(format!("expected a two-coordinate source, got {}", p.ndim())));
    }
    let tol = AUDIT_TOLERANCE;
    let r1 = ba_rate_distortion(&marginalize(p, &[0])?, &d.select(&[0]), d1, cfg)?.rate;
    let r2 = ba_rate_distortion(&marginalize(p, &[1])?, &d.select(&[1]), d2, cfg)?.rate;
    let r1g2 = ba_conditional_rd(p, &d.select(&[0]), d1, cfg)?.rate;
    let r12 = ba_joint_rd(p, d, (d1, d2), cfg)?.rate;
    let i12 = mutual_information(p, &[0])?;

    let mut checks = vec![
        Check::at_least("rd1", r1, r1g2, tol).with_note("R_X1(D1) >= R_X1|X2(D1)"),
        Check::at_least("rd2", r1 + r2, r12, tol).with_note("R_X1(D1) + R_X2(D2) >= R_X1X2(D1,D2)"),
        Check::at_least("rd3", r12, r1g2 + r2, tol).with_note("R_X1X2(D1,D2) >= R_X1|X2(D1) + R_X2(D2)"),
        Check::at_least("rd4", r1g2, r1 - i12, tol).with_note("R_X1|X2(D1) >= R_X1(D1) - I(X1;X2)"),
        Check::at_least("rd5", r12, r1 + r2 - i12, tol).with_note("R_X1X2(D1,D2) >= R_X1(D1) + R_X2(D2) - I(X1;X2)"),
    ];
    if i12 <= 1e-12 {
        checks.push(Check::equal("rd1-equality", r1, r1g2, tol).with_note("independent coordinates"));
        checks.push(Check::equal("rd2-equality", r1 + r2, r12, tol).with_note("independent coordinates"));
    }
    Ok(AuditReport::new("lemma1", Some(p.fingerprint()), checks))
}

/// `count` Dirichlet sources alternating 2x2 and 3x3 with Hamming
/// distortion and targets drawn from `[0.02, 0.5]`, followed by two
/// independent pairs.
pub fn rd_inequality_suite(seed: u64, count: usize, exec: Exec) -> Result<AuditReport> {
    let cfg = BaConfig::default();
    let cases: Vec<(JointPmf, f64, f64)> = (0..count)
        .map(|k| {
            let s = if k % 2 == 0 { 2 } else { 3 };
            let src_seed = seed.wrapping_mul(1_000_003).wrapping_add(k as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(src_seed ^ 0x5eed);
            let d1 = rng.random_range(0.02..0.5);
            let d2 = rng.random_range(0.02..0.5);
            Ok((random_source(&[s, s], src_seed)?, d1, d2))
        })
        .chain([
            JointPmf::product(&[vec![0.3, 0.7], vec![0.6, 0.4]]).map(|p| (p, 0.1, 0.2)),
            JointPmf::product(&[vec![0.2, 0.5, 0.3], vec![0.25, 0.25, 0.5]]).map(|p| (p, 0.15, 0.3)),
        ])
        .collect::<Result<_>>()?;
    let parts = exec
        .map(&cases, |(p, d1, d2)| {
            let d = DistortionSpec::hamming(p.alphabet_sizes());
            audit_rd_inequalities(p, &d, *d1, *d2, &cfg)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(AuditReport::combine("lemma1", "source", parts))
}

// ---------------------------------------------------------------------------
// frontier of C3 = C

/// What to evaluate the lossy common rate with.
#[derive(Clone, Debug, PartialEq)]
pub enum FrontierSource {
    /// Numeric solvers on a pmf and distortion spec.
    Numeric { source: JointPmf, distortion: DistortionSpec },
    /// Closed forms for the doubly symmetric binary source.
    Dsbs(DsbsParams),
    /// Closed forms for the bivariate Gaussian, distortions normalized.
    Gauss(GaussParams),
}

/// Rectangular grid of distortion pairs; a point is pinned when the
/// lossy common rate is known to equal `C` within `tol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierGrid {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub tol: f64,
}

struct PointEval {
    /// C3 known to equal C.
    pinned: bool,
    joint_rate: f64,
    lower: f64,
    upper: f64,
}

/// For every `D1` column the frontier is the largest `D2` such that every
/// grid point at or below it is pinned. Pinned points must satisfy
/// `R_X1X2(D1, D2) >= C`, since the common rate never exceeds the joint
/// rate; a frontier beyond the surface where `R_X1X2 = C` fails the audit.
pub fn audit_frontier(src: &FrontierSource, grid: &FrontierGrid, budget: &GwBudget) -> Result<AuditReport> {
    let mut d1s = grid.d1.clone();
    let mut d2s = grid.d2.clone();
    d1s.sort_by(f64::total_cmp);
    d2s.sort_by(f64::total_cmp);
    if d1s.is_empty() || d2s.is_empty() {
        return Err(Error::Domain("frontier grid needs at least one value per axis".into()));
    }
    let (c, fingerprint) = match src {
        FrontierSource::Numeric { source, .. } => {
            if source.ndim() != 2 {
                return Err(Error::Shape(format!("expected a two-coordinate source, got {}", source.ndim())));
            }
            let sol = solve_common_info(source, None, &budget.ci)?;
            (sol.achieved_i, Some(source.fingerprint()))
        }
        FrontierSource::Dsbs(p) => (dsbs_common_info(*p), None),
        FrontierSource::Gauss(g) => (gauss_common_info(*g), None),
    };
    let points: Vec<(f64, f64)> = d1s.iter().flat_map(|&a| d2s.iter().map(move |&b| (a, b))).collect();
    let evals = budget
        .exec
        .map(&points, |&(d1, d2)| -> Result<PointEval> {
            let closed = |v: C3Value, joint_rate: f64| PointEval {
                pinned: v.point().is_some_and(|x| (x - c).abs() <= grid.tol),
                joint_rate,
                lower: v.lower(),
                upper: v.upper(),
            };
            match src {
                FrontierSource::Dsbs(p) => Ok(closed(dsbs_c3(*p, d1, d2)?, dsbs_joint_rd(*p, d1, d2)?)),
                FrontierSource::Gauss(g) => Ok(closed(gauss_c3(*g, d1, d2)?, gauss_joint_rd(*g, d1, d2)?)),
                FrontierSource::Numeric { source, distortion } => {
                    let inner = GwBudget {
                        exec: Exec::Sequential,
                        ..budget.clone()
                    };
                    let est = c3_tilde(source, distortion, (d1, d2), &inner)?;
                    // The premise gives C3 >= C; the witness gives C3 <= upper.
                    let premise = est.premise_residual <= budget.premise_tol;
                    let lower = if premise { c.max(est.value_lower) } else { est.value_lower };
                    Ok(PointEval {
                        pinned: premise && est.value_upper <= c + grid.tol,
                        joint_rate: est.joint_rate,
                        lower,
                        upper: est.value_upper,
                    })
                }
            }
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut checks = Vec::new();
    for (i, &d1) in d1s.iter().enumerate() {
        let column = &evals[i * d2s.len()..(i + 1) * d2s.len()];
        let reach = column.iter().take_while(|e| e.pinned).count();
        let edge = (reach > 0).then(|| d2s[reach - 1]);
        checks.push(Check::info(
            format!("frontier/d1={d1:.6}"),
            edge,
            Some(c),
            Verdict::Frontier,
            match edge {
                Some(e) => format!("C3 = C for D2 <= {e}"),
                None => "C3 = C nowhere in this column".to_string(),
            },
        ));
        for (e, &d2) in column.iter().zip(&d2s) {
            let name = format!("point/d1={d1:.6},d2={d2:.6}");
            if e.pinned {
                checks.push(Check::at_least(format!("{name}/joint-rate-covers-c"), e.joint_rate, c, grid.tol));
            } else {
                checks.push(Check::info(format!("{name}/c3"), Some(e.lower), Some(e.upper), Verdict::Bracket, "not pinned to C"));
            }
        }
    }
    Ok(AuditReport::new("t4", fingerprint, checks))
}

// ---------------------------------------------------------------------------
// successive-refinement corner conditions

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Dsbs { a1: f64 },
    Gauss { rho: f64 },
}

/// At the corner `D^0` (`(a1, a1)` or `(1-rho, 1-rho)`): `R_Xi(D_i^0) =
/// I(X_i; W)`, `D_i^0` is the best distortion of a function of `W`, and
/// `R_X1X2(D^0) = I(X1,X2; W) = C`. Below the corner the closed-form C3
/// must equal C; above it the check is skipped.
pub fn audit_corner_conditions(family: Family, d1: f64, d2: f64) -> Result<AuditReport> {
    let tol = AUDIT_TOLERANCE;
    let mut checks = Vec::new();
    let (corner, c3, c) = match family {
        Family::Dsbs { a1 } => {
            let p = DsbsParams::from_a1(a1)?;
            // (S, X1, X2) with S uniform.
            let pw = JointPmf::new(
                vec![2, 2, 2],
                (0..8)
                    .map(|idx| {
                        let (s, x1, x2) = (idx >> 2, (idx >> 1) & 1, idx & 1);
                        let f = |x: usize| if x == s { 1.0 - a1 } else { a1 };
                        0.5 * f(x1) * f(x2)
                    })
                    .collect(),
            )?;
            let c = dsbs_common_info(p);
            for i in 1..=2 {
                let sx = marginalize(&pw, &[0, i])?;
                let info = mutual_information(&sx, &[0])?;
                checks.push(Check::equal(format!("marginal-rate-equals-info/x{i}"), dsbs_marginal_rd(a1), info, tol));
                // best Hamming distortion of a map s -> x_hat
                let best = (0..4usize)
                    .map(|map| {
                        (0..4)
                            .map(|k| {
                                let (s, x) = (k >> 1, k & 1);
                                if (map >> s) & 1 != x {
                                    sx.get(&[s, x])
                                } else {
                                    0.0
                                }
                            })
                            .sum::<f64>()
                    })
                    .fold(f64::INFINITY, f64::min);
                checks.push(Check::equal(format!("corner-distortion/x{i}"), best, a1, tol));
            }
            let joint_info = mutual_information(&pw, &[0])?;
            checks.push(Check::equal("joint-rate-at-corner", dsbs_joint_rd(p, a1, a1)?, joint_info, tol));
            checks.push(Check::equal("common-info-at-corner", joint_info, c, tol));
            ((a1, a1), dsbs_c3(p, d1, d2)?, c)
        }
        Family::Gauss { rho } => {
            let g = GaussParams::new(rho)?;
            let r = g.rho;
            // W ~ N(0, r), X_i = W + N(0, 1 - r): I(X_i; W) = 1/2 log2(Var X_i / Var(X_i | W)).
            let info = 0.5 * (1.0 / (1.0 - r)).log2();
            let mmse = 1.0 - r;
            let c = gauss_common_info(g);
            for i in 1..=2 {
                checks.push(Check::equal(format!("marginal-rate-equals-info/x{i}"), gauss_marginal_rd(mmse)?, info, tol));
                checks.push(Check::equal(format!("corner-distortion/x{i}"), mmse, 1.0 - r, tol));
            }
            // 1/2 log2 det(Sigma_X) / det(Sigma_X|W)
            let joint_info = 0.5 * ((1.0 - r * r) / (mmse * mmse)).log2();
            checks.push(Check::equal("joint-rate-at-corner", gauss_joint_rd(g, mmse, mmse)?, joint_info, tol));
            checks.push(Check::equal("common-info-at-corner", joint_info, c, tol));
            ((mmse, mmse), gauss_c3(g, d1, d2)?, c)
        }
    };
    if d1 <= corner.0 && d2 <= corner.1 {
        let value = c3.point().ok_or_else(|| Error::Domain("closed form returned a bracket below the corner".into()))?;
        checks.push(Check::equal("c3-equals-c-below-corner", value, c, tol));
    } else {
        checks.push(Check::info(
            "c3-equals-c-below-corner",
            None,
            None,
            Verdict::Skipped,
            format!("({d1}, {d2}) is not below the corner ({}, {}); out of domain", corner.0, corner.1),
        ));
    }
    Ok(AuditReport::new("t9", None, checks))
}

// ---------------------------------------------------------------------------
// bounds and monotonicity

/// The optimizer value lies between the cut lower bound and the
/// smallest `H(X^{-j})`, and its auxiliary reproduces the source.
pub fn audit_bounds(p: &JointPmf, budget: &CiBudget) -> Result<AuditReport> {
    let (lower, upper) = common_info_bounds(p)?;
    let sol = solve_common_info(p, None, budget)?;
    let tol = budget.tolerance;
    let checks = vec![
        Check::at_least("sandwich-lower", sol.achieved_i, lower, tol).with_note("optimizer value >= cut lower bound"),
        Check::at_least("sandwich-upper", upper, sol.achieved_i, AUDIT_TOLERANCE).with_note("optimizer value <= min_j H(X^-j)"),
        Check::at_least("marginal-fit", budget.tolerance, sol.marginal_residual, 0.0).with_note("total variation to the source"),
    ];
    Ok(AuditReport::new("bounds", Some(p.fingerprint()), checks))
}

/// `I(X^N; S)` from the joint law of `(S, X^N)` for the broadcast family.
fn broadcast_info_direct(a1: f64, n: usize) -> Result<f64> {
    let len = 1usize << (n + 1);
    let mass = (0..len)
        .map(|idx| {
            let s = idx >> n;
            let flips = (0..n).filter(|i| (idx >> i) & 1 != s).count() as i32;
            0.5 * a1.powi(flips) * (1.0 - a1).powi(n as i32 - flips)
        })
        .collect();
    let joint = JointPmf::new(vec![2; n + 1], mass)?;
    mutual_information(&joint, &[0])
}

/// Broadcast family: `C(X^N) = H(X^N) - N h(a1)` is nondecreasing in `N`
/// and matches `I(X^N; S)` computed from the joint law with `S`.
pub fn audit_broadcast_monotone(a1: f64, max_n: usize) -> Result<AuditReport> {
    if max_n < 2 {
        return Err(Error::Domain(format!("need at least two outputs, got {max_n}")));
    }
    let mut checks = Vec::new();
    let mut prev: Option<f64> = None;
    for n in 2..=max_n {
        let formula = entropy(&bsc_broadcast_source(0.5, a1, n)?) - n as f64 * h2(a1);
        let direct = broadcast_info_direct(a1, n)?;
        checks.push(Check::equal(format!("broadcast/n={n:02}/formula"), formula, direct, 1e-9));
        if let Some(before) = prev {
            checks.push(Check::at_least(format!("broadcast/n={n:02}/monotone"), formula, before, 0.0));
        }
        prev = Some(formula);
    }
    Ok(AuditReport::new("bounds", None, checks))
}

/// `count` Dirichlet sources (2x2, 3x3 and binary triples in turn) plus
/// the broadcast family with `a1 = 0.1` up to five outputs.
pub fn bounds_suite(seed: u64, count: usize, budget: &CiBudget) -> Result<AuditReport> {
    let shapes: [&[usize]; 3] = [&[2, 2], &[3, 3], &[2, 2, 2]];
    let sources = (0..count)
        .map(|k| random_source(shapes[k % 3], seed.wrapping_mul(1_000_003).wrapping_add(k as u64)))
        .collect::<Result<Vec<_>>>()?;
    let inner = CiBudget {
        exec: Exec::Sequential,
        ..budget.clone()
    };
    let mut parts = budget
        .exec
        .map(&sources, |p| audit_bounds(p, &inner))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut report = AuditReport::combine("bounds", "source", std::mem::take(&mut parts));
    report.checks.extend(audit_broadcast_monotone(0.1, 5)?.checks);
    report.checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(report)
}

/// Closed-form frontiers for the DSBS (`a1 = 0.1`) and the Gaussian
/// (`rho = 0.5`) on 20x20 grids starting one step above zero.
pub fn frontier_suite(exec: Exec) -> Result<AuditReport> {
    let axis = |hi: f64| (1..=20).map(|k| hi * k as f64 / 20.0).collect::<Vec<_>>();
    let budget = GwBudget {
        exec,
        ..GwBudget::default()
    };
    let dsbs = audit_frontier(
        &FrontierSource::Dsbs(DsbsParams::from_a1(0.1)?),
        &FrontierGrid {
            d1: axis(0.5),
            d2: axis(0.5),
            tol: 1e-9,
        },
        &budget,
    )?;
    let gauss = audit_frontier(
        &FrontierSource::Gauss(GaussParams::new(0.5)?),
        &FrontierGrid {
            d1: axis(1.0),
            d2: axis(1.0),
            tol: 1e-9,
        },
        &budget,
    )?;
    let checks = [("dsbs", dsbs), ("gauss", gauss)]
        .into_iter()
        .flat_map(|(tag, r)| r.checks.into_iter().map(move |c| c.prefixed(tag)))
        .collect();
    Ok(AuditReport::new("t4", None, checks))
}

/// Corner conditions for DSBS `a1 = 0.1` and Gaussian `rho = 0.5`, at one
/// point below the corner and one above.
pub fn corner_suite() -> Result<AuditReport> {
    let cases = [
        ("dsbs-inside", Family::Dsbs { a1: 0.1 }, 0.05, 0.08),
        ("dsbs-outside", Family::Dsbs { a1: 0.1 }, 0.2, 0.05),
        ("gauss-inside", Family::Gauss { rho: 0.5 }, 0.25, 0.4),
        ("gauss-outside", Family::Gauss { rho: 0.5 }, 0.7, 0.2),
    ];
    let mut checks = Vec::new();
    for (tag, family, d1, d2) in cases {
        checks.extend(audit_corner_conditions(family, d1, d2)?.checks.into_iter().map(|c| c.prefixed(tag)));
    }
    Ok(AuditReport::new("t9", None, checks))
}
