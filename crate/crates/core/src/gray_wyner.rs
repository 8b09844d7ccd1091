//! Gray-Wyner network: rate-region membership and the smallest common rate
//! `C3(D1, D2)` compatible with a total rate of `R_{X1X2}(D1, D2)`.
//!
//! Both `C3` characterizations are searched over candidate auxiliaries:
//! the constrained form minimizes `I(X; W)` subject to
//! `R_{X1|W}(D1) + R_{X2|W}(D2) + I(X; W) = R_{X1X2}(D1, D2)`, and the
//! Markov form decomposes the optimal joint reproduction `X^` as
//! `X^1 - W - X^2` with `X - X^ - W`. Values are upper bounds certified by
//! an explicit witness; the lower end comes from `I(X1; X2)` when the
//! marginal rates decompose the joint rate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::common_info::{deterministic_candidates, is_product, scan_pair_decompositions, solve_common_info, CiBudget};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::prob::{marginalize, mutual_information, JointPmf};
use crate::rd::{ba_conditional_rd, ba_joint_rd, ba_rate_distortion, BaConfig, DistortionSpec};

/// Common rate `R0` and private rates `R1..RN`, bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    #[serde(rename = "R0")]
    pub r0: f64,
    pub privates: Vec<f64>,
}

impl RatePoint {
    pub fn new(r0: f64, privates: Vec<f64>) -> Result<Self> {
        if !(r0 >= 0.0) || privates.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::Domain("rates must be nonnegative".into()));
        }
        Ok(RatePoint { r0, privates })
    }
}

/// An auxiliary `W` with the rates it certifies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// How the candidate was built (`constant`, `joint-reproduction`, ...).
    pub label: String,
    /// Joint law of `(X_1, .., X_N, W)`.
    pub pxw: JointPmf,
    /// `I(X; W)`.
    pub common_rate: f64,
    /// `R_{X_i|W}(D_i)` per coordinate.
    pub conditional_rates: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GwBudget {
    pub ci: CiBudget,
    /// Random auxiliaries tried in addition to the structured candidates.
    pub random_candidates: usize,
    /// Pattern-search moves per random candidate.
    pub search_steps: usize,
    pub seed: u64,
    /// Tolerance on the rate-sum equality, bits.
    pub equality_tol: f64,
    /// Looser equality tolerance reported alongside.
    pub sensitivity_tol: f64,
    /// Decomposition premise tolerance for the lower end, bits.
    pub premise_tol: f64,
    /// Slack allowed when comparing rates in the membership check.
    pub membership_tol: f64,
    pub ba: BaConfig,
    pub exec: Exec,
}

impl Default for GwBudget {
    fn default() -> Self {
        GwBudget {
            ci: CiBudget::default(),
            random_candidates: 2,
            search_steps: 24,
            seed: 0,
            equality_tol: 1e-3,
            sensitivity_tol: 1e-2,
            premise_tol: 1e-4,
            membership_tol: 1e-5,
            ba: BaConfig::default(),
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C3Estimate {
    pub value_lower: f64,
    pub value_upper: f64,
    /// Auxiliary attaining `value_upper`; absent when nothing met the
    /// equality tolerance and the upper end fell back to the joint rate.
    pub witness: Option<Witness>,
    /// `|R_{X1|W} + R_{X2|W} + I(X;W) - R_{X1X2}|` for the witness.
    pub constraint_residual: Option<f64>,
    /// `R_{X1X2}(D1, D2)`.
    pub joint_rate: f64,
    /// Best value under the looser equality tolerance.
    pub sensitivity_upper: f64,
    /// `|R_{X1}(D1) + R_{X2}(D2) - I(X1;X2) - R_{X1X2}(D1,D2)|`.
    pub premise_residual: f64,
    pub candidates_evaluated: usize,
}

/// Outcome of a membership query. A missing witness is not a converse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub witness: Option<Witness>,
    pub one_sided: bool,
    pub candidates_checked: usize,
}

// ---------------------------------------------------------------------------
// candidates

/// Joint law of `(X, W)` from `p(x)` and rows `p(w | x)`.
fn joint_from_rows(p: &JointPmf, rows: &[Vec<f64>]) -> Result<JointPmf> {
    let k = rows[0].len();
    let mut mass = Vec::with_capacity(p.len() * k);
    for (x, row) in rows.iter().enumerate() {
        mass.extend(row.iter().map(|r| p.mass()[x] * r));
    }
    let mut sizes = p.alphabet_sizes().to_vec();
    sizes.push(k);
    JointPmf::new(sizes, mass)
}

fn structured_candidates(p: &JointPmf) -> Result<Vec<(String, JointPmf)>> {
    let n = p.ndim();
    let sizes = p.alphabet_sizes();
    let mut out = vec![("constant".to_string(), joint_from_rows(p, &vec![vec![1.0]; p.len()])?)];
    let identity: Vec<Vec<f64>> = (0..p.len())
        .map(|x| {
            let mut r = vec![0.0; p.len()];
            r[x] = 1.0;
            r
        })
        .collect();
    out.push(("source".to_string(), joint_from_rows(p, &identity)?));
    for j in 0..n {
        let rest: Vec<usize> = (0..n).filter(|&i| i != j).collect();
        let shape = JointPmf::uniform(rest.iter().map(|&i| sizes[i]).collect())?;
        let rows: Vec<Vec<f64>> = (0..p.len())
            .map(|x| {
                let xc = p.coords(x);
                let w = shape.index(&rest.iter().map(|&i| xc[i]).collect::<Vec<_>>());
                let mut r = vec![0.0; shape.len()];
                r[w] = 1.0;
                r
            })
            .collect();
        out.push((format!("drop-coordinate-{}", j + 1), joint_from_rows(p, &rows)?));
    }
    Ok(out)
}

fn random_rows(p: &JointPmf, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..p.len())
        .map(|_| {
            let r: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let s: f64 = r.iter().sum();
            r.into_iter().map(|v| v / s).collect()
        })
        .collect()
}

fn evaluate(p: &JointPmf, d: &DistortionSpec, targets: &[f64], label: &str, pxw: JointPmf, cfg: &BaConfig) -> Result<Witness> {
    let n = p.ndim();
    let common_rate = mutual_information(&pxw, &(0..n).collect::<Vec<_>>())?;
    let conditional_rates = (0..n)
        .map(|i| {
            let pair = marginalize(&pxw, &[i, n])?;
            Ok(ba_conditional_rd(&pair, &d.select(&[i]), targets[i], cfg)?.rate)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Witness {
        label: label.to_string(),
        pxw,
        common_rate,
        conditional_rates,
    })
}

/// Re-derives `I(X; W)` and the conditional rates of a witness.
pub fn reevaluate_witness(w: &Witness, d: &DistortionSpec, targets: &[f64], cfg: &BaConfig) -> Result<(f64, Vec<f64>)> {
    let n = w.pxw.ndim() - 1;
    let p = marginalize(&w.pxw, &(0..n).collect::<Vec<_>>())?;
    let again = evaluate(&p, d, targets, &w.label, w.pxw.clone(), cfg)?;
    Ok((again.common_rate, again.conditional_rates))
}

fn residual(w: &Witness, joint_rate: f64) -> f64 {
    (w.conditional_rates.iter().sum::<f64>() + w.common_rate - joint_rate).abs()
}

fn check_pair(p: &JointPmf, d: &DistortionSpec) -> Result<()> {
    if p.ndim() != 2 || d.len() != 2 {
        return Err(Error::Shape("C3 is defined for a pair of sources with one distortion matrix each".into()));
    }
    Ok(())
}

/// `p(x) p_t(x^ | x)` flattened as `[x * n_rep + y]`.
fn reproduction_joint(p: &JointPmf, channel: &crate::prob::ConditionalPmf) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.len() * channel.rows[0].len());
    for (x, row) in channel.rows.iter().enumerate() {
        out.extend(row.mass().iter().map(|t| p.mass()[x] * t));
    }
    out
}

/// Marginal rates and `I(X1; X2)`; the lower end is `I(X1; X2)` when
/// `R_{X1}(D1) + R_{X2}(D2) - I(X1; X2)` matches the joint rate.
fn lower_end(p: &JointPmf, d: &DistortionSpec, targets: (f64, f64), joint_rate: f64, budget: &GwBudget) -> Result<(f64, f64)> {
    let r1 = ba_rate_distortion(&marginalize(p, &[0])?, &d.select(&[0]), targets.0, &budget.ba)?.rate;
    let r2 = ba_rate_distortion(&marginalize(p, &[1])?, &d.select(&[1]), targets.1, &budget.ba)?.rate;
    let mi = mutual_information(p, &[0])?;
    let premise = (r1 + r2 - mi - joint_rate).abs();
    Ok((if premise <= budget.premise_tol { mi } else { 0.0 }, premise))
}

// ---------------------------------------------------------------------------
// operations

/// One-sided Gray-Wyner membership: looks for `W` with `R0 >= I(X;W)` and
/// `R_i >= R_{X_i|W}(D_i)` for every coordinate.
pub fn check_membership(
    p: &JointPmf,
    d: &DistortionSpec,
    rates: &RatePoint,
    targets: &[f64],
    budget: &GwBudget,
) -> Result<Membership> {
    let n = p.ndim();
    if rates.privates.len() != n || targets.len() != n || d.len() != n {
        return Err(Error::Shape(format!("need {n} private rates, distortions and distortion matrices")));
    }
    let mut cands = structured_candidates(p)?;
    if n == 2 {
        if let Ok(pt) = ba_joint_rd(p, d, (targets[0], targets[1]), &budget.ba) {
            let rows: Vec<Vec<f64>> = pt.test_channel.rows.iter().map(|r| r.mass().to_vec()).collect();
            cands.push(("joint-reproduction".into(), joint_from_rows(p, &rows)?));
        }
    }
    let ci_budget = CiBudget {
        exec: budget.exec,
        ..budget.ci.clone()
    };
    let k = if p.alphabet_sizes() == [2, 2] { Some(2) } else { None };
    if let Ok(sol) = solve_common_info(p, k, &ci_budget) {
        cands.push(("common-information".into(), sol.joint_with_target(p)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    for r in 0..budget.random_candidates {
        cands.push((format!("random-{r}"), joint_from_rows(p, &random_rows(p, p.len(), &mut rng))?));
    }
    let evaluated = budget
        .exec
        .map(&cands, |(label, pxw)| evaluate(p, d, targets, label, pxw.clone(), &budget.ba));
    let tol = budget.membership_tol;
    let mut best: Option<Witness> = None;
    for w in evaluated.into_iter().flatten() {
        let ok = rates.r0 >= w.common_rate - tol
            && rates.privates.iter().zip(&w.conditional_rates).all(|(r, c)| *r >= c - tol);
        if ok && best.as_ref().is_none_or(|b| w.common_rate < b.common_rate) {
            best = Some(w);
        }
    }
    Ok(Membership {
        witness: best,
        one_sided: true,
        candidates_checked: cands.len(),
    })
}

/// `C3(D1, D2)` from the rate-sum-constrained characterization.
pub fn c3_tilde(p: &JointPmf, d: &DistortionSpec, targets: (f64, f64), budget: &GwBudget) -> Result<C3Estimate> {
    check_pair(p, d)?;
    let t = [targets.0, targets.1];
    let joint = ba_joint_rd(p, d, targets, &budget.ba)?;
    let r12 = joint.rate;
    let mut cands = structured_candidates(p)?;
    let rows: Vec<Vec<f64>> = joint.test_channel.rows.iter().map(|r| r.mass().to_vec()).collect();
    cands.push(("joint-reproduction".into(), joint_from_rows(p, &rows)?));
    for (i, &size) in joint.test_channel.out_sizes.iter().enumerate().take(2) {
        let comp: Vec<Vec<f64>> = joint.test_channel.rows.iter().map(|r| r.marginal_vec(i)).collect();
        debug_assert_eq!(comp[0].len(), size);
        cands.push((format!("reproduction-coordinate-{}", i + 1), joint_from_rows(p, &comp)?));
    }
    let ci_budget = CiBudget {
        exec: budget.exec,
        ..budget.ci.clone()
    };
    let k = if p.alphabet_sizes() == [2, 2] { Some(2) } else { None };
    if let Ok(sol) = solve_common_info(p, k, &ci_budget) {
        cands.push(("common-information".into(), sol.joint_with_target(p)?));
    }
    let mut witnesses: Vec<Witness> = budget
        .exec
        .map(&cands, |(label, pxw)| evaluate(p, d, &t, label, pxw.clone(), &budget.ba))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    witnesses.extend(
        budget
            .exec
            .map_range(budget.random_candidates, |r| pattern_search(p, d, &t, r12, r, budget))
            .into_iter()
            .collect::<Result<Vec<_>>>()?,
    );
    let pick = |tol: f64| -> Option<&Witness> {
        witnesses
            .iter()
            .filter(|w| residual(w, r12) <= tol)
            .min_by(|a, b| (a.common_rate, residual(a, r12)).partial_cmp(&(b.common_rate, residual(b, r12))).unwrap())
    };
    let sensitivity_upper = pick(budget.sensitivity_tol).map_or(r12, |w| w.common_rate.min(r12));
    let best = pick(budget.equality_tol).cloned();
    let (lower, premise_residual) = lower_end(p, d, targets, r12, budget)?;
    let value_upper = best.as_ref().map_or(r12, |w| w.common_rate.min(r12));
    Ok(C3Estimate {
        value_lower: lower.min(value_upper),
        value_upper,
        constraint_residual: best.as_ref().map(|w| residual(w, r12)),
        witness: best,
        joint_rate: r12,
        sensitivity_upper,
        premise_residual,
        candidates_evaluated: witnesses.len(),
    })
}

/// Local search over `p(w | x)` minimizing `I(X;W) + 10 |residual|` from a
/// seeded random start.
fn pattern_search(p: &JointPmf, d: &DistortionSpec, t: &[f64], r12: f64, index: usize, budget: &GwBudget) -> Result<Witness> {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    rng.set_stream(1 + index as u64);
    let k = p.len();
    let label = format!("random-{index}");
    let mut rows = random_rows(p, k, &mut rng);
    let score = |w: &Witness| w.common_rate + 10.0 * residual(w, r12);
    let mut best = evaluate(p, d, t, &label, joint_from_rows(p, &rows)?, &budget.ba)?;
    let mut step: f64 = 1.0;
    let mut failures = 0;
    for _ in 0..budget.search_steps {
        let (x, w) = (rng.random_range(0..rows.len()), rng.random_range(0..k));
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let mut trial = rows.clone();
        trial[x][w] *= (sign * step).exp();
        let s: f64 = trial[x].iter().sum();
        trial[x].iter_mut().for_each(|v| *v /= s);
        let cand = evaluate(p, d, t, &label, joint_from_rows(p, &trial)?, &budget.ba)?;
        if score(&cand) < score(&best) {
            best = cand;
            rows = trial;
            failures = 0;
        } else {
            failures += 1;
            if failures >= 4 {
                step *= 0.5;
                failures = 0;
            }
        }
    }
    Ok(best)
}

/// `C3(D1, D2)` from the Markov characterization around the optimal joint
/// reproduction.
pub fn c_star(p: &JointPmf, d: &DistortionSpec, targets: (f64, f64), budget: &GwBudget) -> Result<C3Estimate> {
    check_pair(p, d)?;
    let t = [targets.0, targets.1];
    let joint = ba_joint_rd(p, d, targets, &budget.ba)?;
    let r12 = joint.rate;
    let rep_sizes = joint.test_channel.out_sizes.clone();
    let n_rep: usize = rep_sizes.iter().product();
    let pxy = reproduction_joint(p, &joint.test_channel);
    let py_mass: Vec<f64> = (0..n_rep).map(|y| (0..p.len()).map(|x| pxy[x * n_rep + y]).sum()).collect();
    let py = JointPmf::new(rep_sizes.clone(), py_mass)?;

    // p(x, w) = sum_y p(x, y) r(w | y)
    let info_of = |post: &[Vec<f64>]| -> f64 {
        let k = post[0].len();
        let mut pxw = vec![0.0; p.len() * k];
        for x in 0..p.len() {
            for (y, row) in post.iter().enumerate() {
                let m = pxy[x * n_rep + y];
                if m > 0.0 {
                    for w in 0..k {
                        pxw[x * k + w] += m * row[w];
                    }
                }
            }
        }
        let mut sizes = p.alphabet_sizes().to_vec();
        sizes.push(k);
        JointPmf::new(sizes, pxw)
            .and_then(|j| mutual_information(&j, &[0, 1]))
            .unwrap_or(f64::INFINITY)
    };
    let posterior = |pw: &[f64], ch: &[Vec<Vec<f64>>]| -> Vec<Vec<f64>> {
        (0..n_rep)
            .map(|y| {
                let yc = py.coords(y);
                let joint: Vec<f64> = (0..pw.len()).map(|w| pw[w] * ch[0][w][yc[0]] * ch[1][w][yc[1]]).collect();
                let s: f64 = joint.iter().sum();
                if s > 0.0 {
                    joint.into_iter().map(|v| v / s).collect()
                } else {
                    vec![1.0 / pw.len() as f64; pw.len()]
                }
            })
            .collect()
    };

    let mut posts: Vec<(String, Vec<Vec<f64>>)> = Vec::new();
    let identity: Vec<Vec<f64>> = (0..n_rep)
        .map(|y| {
            let mut r = vec![0.0; n_rep];
            r[y] = 1.0;
            r
        })
        .collect();
    posts.push(("joint-reproduction".into(), identity));
    if is_product(&py, 1e-9) {
        posts.push(("constant".into(), vec![vec![1.0]; n_rep]));
    }
    for (j, (pw, ch)) in deterministic_candidates(&py, n_rep).into_iter().enumerate() {
        // dropping coordinate j leaves W equal to the other reproduction
        posts.push((format!("reproduction-coordinate-{}", 2 - j), posterior(&pw, &ch)));
    }
    let ci_budget = CiBudget {
        exec: budget.exec,
        ..budget.ci.clone()
    };
    if rep_sizes == [2, 2] {
        let scanned = scan_pair_decompositions(&py, ci_budget.grid_step, ci_budget.tolerance, budget.exec, |params| {
            let [pi, a1, a2, b1, b2] = *params;
            let pw = [pi, 1.0 - pi];
            let ch = [
                vec![vec![1.0 - a1, a1], vec![1.0 - a2, a2]],
                vec![vec![1.0 - b1, b1], vec![1.0 - b2, b2]],
            ];
            info_of(&posterior(&pw, &ch))
        });
        if let Some((pw, ch)) = scanned {
            posts.push(("reproduction-decomposition".into(), posterior(&pw, &ch)));
        }
    } else if let Ok(sol) = solve_common_info(&py, None, &ci_budget) {
        posts.push(("reproduction-decomposition".into(), posterior(&sol.pw, &sol.channels.channels)));
    }

    let (label, post) = posts
        .iter()
        .map(|(l, post)| (l, post, info_of(post)))
        .min_by(|a, b| a.2.partial_cmp(&b.2).unwrap())
        .map(|(l, post, _)| (l.clone(), post.clone()))
        .expect("the joint reproduction is always a candidate");
    // Witness over (X, W) with p(w | x) = sum_y p_t(y | x) r(w | y).
    let k = post[0].len();
    let rows: Vec<Vec<f64>> = (0..p.len())
        .map(|x| {
            let mut r = vec![0.0; k];
            for (y, pr) in post.iter().enumerate() {
                let ty = joint.test_channel.rows[x].mass()[y];
                for w in 0..k {
                    r[w] += ty * pr[w];
                }
            }
            r
        })
        .collect();
    let witness = evaluate(p, d, &t, &label, joint_from_rows(p, &rows)?, &budget.ba)?;
    let (lower, premise_residual) = lower_end(p, d, targets, r12, budget)?;
    let value_upper = witness.common_rate.min(r12);
    Ok(C3Estimate {
        value_lower: lower.min(value_upper),
        value_upper,
        constraint_residual: Some(residual(&witness, r12)),
        witness: Some(witness),
        joint_rate: r12,
        sensitivity_upper: value_upper,
        premise_residual,
        candidates_evaluated: posts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{dsbs_c3, DsbsParams};
    use crate::prob::h2;
    use approx::assert_abs_diff_eq;

    const C_DSBS: f64 = 0.742085858549717;

    fn dsbs() -> JointPmf {
        JointPmf::from_matrix(&[vec![0.41, 0.09], vec![0.09, 0.41]]).unwrap()
    }

    fn ham() -> DistortionSpec {
        DistortionSpec::hamming(&[2, 2])
    }

    fn quick() -> GwBudget {
        GwBudget {
            random_candidates: 1,
            search_steps: 6,
            ..GwBudget::default()
        }
    }

    #[test]
    fn membership_examples() {
        let b = quick();
        let p = dsbs();
        let r12 = ba_joint_rd(&p, &ham(), (0.05, 0.05), &b.ba).unwrap().rate;
        let m = check_membership(&p, &ham(), &RatePoint::new(r12 + 1e-9, vec![0.0, 0.0]).unwrap(), &[0.05, 0.05], &b).unwrap();
        assert!(m.one_sided);
        assert!(m.witness.is_some());

        let priv_rate = h2(0.1) - h2(0.05);
        let rates = RatePoint::new(C_DSBS, vec![priv_rate, priv_rate]).unwrap();
        let m = check_membership(&p, &ham(), &rates, &[0.05, 0.05], &b).unwrap();
        let w = m.witness.expect("W = S certifies the allocation");
        assert_abs_diff_eq!(w.common_rate, C_DSBS, epsilon = 1e-5);

        let m = check_membership(&p, &ham(), &RatePoint::new(0.0, vec![0.0, 0.0]).unwrap(), &[0.0, 0.0], &b).unwrap();
        assert!(m.witness.is_none());

        // lossless corner: R_i = H(X_i | W)
        let rates = RatePoint::new(0.0, vec![1.0, 1.0]).unwrap();
        assert!(check_membership(&JointPmf::uniform(vec![2, 2]).unwrap(), &ham(), &rates, &[0.0, 0.0], &b)
            .unwrap()
            .witness
            .is_some());
    }

    #[test]
    fn c3_tilde_examples() {
        let b = quick();
        let a = DsbsParams::from_a1(0.1).unwrap();
        let est = c3_tilde(&dsbs(), &ham(), (0.05, 0.05), &b).unwrap();
        assert_abs_diff_eq!(est.value_upper, C_DSBS, epsilon = 2e-2);
        assert!(est.value_lower <= est.value_upper);
        assert!(est.value_upper <= est.joint_rate + 1e-6);
        assert!(est.constraint_residual.unwrap() <= b.equality_tol);
        assert!(est.value_lower >= 0.3199 && est.value_lower <= C_DSBS + 1e-9);

        let est = c3_tilde(&dsbs(), &ham(), (0.3, 0.3), &b).unwrap();
        let exact = dsbs_c3(a, 0.3, 0.3).unwrap().point().unwrap();
        assert_abs_diff_eq!(est.value_upper, exact, epsilon = 2e-2);

        let est = c3_tilde(&dsbs(), &ham(), (0.5, 0.5), &b).unwrap();
        assert_eq!(est.value_upper, 0.0);
    }

    #[test]
    fn c_star_examples() {
        let b = quick();
        let est = c_star(&dsbs(), &ham(), (0.3, 0.3), &b).unwrap();
        assert_abs_diff_eq!(est.value_upper, est.joint_rate, epsilon = 1e-3);

        let indep = JointPmf::product(&[vec![0.5, 0.5], vec![0.3, 0.7]]).unwrap();
        let est = c_star(&indep, &ham(), (0.1, 0.1), &b).unwrap();
        assert_abs_diff_eq!(est.value_upper, 0.0, epsilon = 1e-9);

        let tilde = c3_tilde(&dsbs(), &ham(), (0.05, 0.05), &b).unwrap();
        let star = c_star(&dsbs(), &ham(), (0.05, 0.05), &b).unwrap();
        assert_abs_diff_eq!(tilde.value_upper, star.value_upper, epsilon = 2e-2);
    }

    #[test]
    fn witnesses_reevaluate_exactly() {
        let b = quick();
        let est = c3_tilde(&dsbs(), &ham(), (0.08, 0.2), &b).unwrap();
        let w = est.witness.unwrap();
        let (i, cond) = reevaluate_witness(&w, &ham(), &[0.08, 0.2], &b.ba).unwrap();
        assert!((i - w.common_rate).abs() <= 1e-8);
        assert!(cond.iter().zip(&w.conditional_rates).all(|(a, b)| (a - b).abs() <= 1e-8));
    }

    #[test]
    fn shape_errors() {
        let three = JointPmf::uniform(vec![2, 2, 2]).unwrap();
        assert!(c3_tilde(&three, &DistortionSpec::hamming(&[2, 2, 2]), (0.1, 0.1), &quick()).is_err());
        assert!(check_membership(&dsbs(), &ham(), &RatePoint::new(1.0, vec![1.0]).unwrap(), &[0.1, 0.1], &quick()).is_err());
    }
}
