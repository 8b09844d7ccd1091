//! Wyner common information: minimize `I(X; W)` over auxiliaries `W` that
//! make the coordinates of `X` conditionally independent while reproducing
//! the joint law of `X`.
//!
//! Two solvers. Binary pairs with `|W| = 2` are scanned exhaustively over the
//! two free parameters left after matching the marginals. Everything else
//! runs penalized gradient descent from seeded random starts followed by an
//! EM polish of the marginal fit; those results are certified upper bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::prob::{entropy, entropy_of, marginalize, mixture_mass, mutual_information, FactoredChannels, JointPmf};

/// Total-variation distance within which a decomposition counts as
/// reproducing the target law.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    /// Exhaustive grid for binary pairs with `|W| = 2`, restarts otherwise.
    #[default]
    Auto,
    Exhaustive,
    Restart,
}

/// Search budget and seeding. Identical budgets give identical results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CiBudget {
    pub mode: SolveMode,
    pub restarts: usize,
    pub seed: u64,
    /// Grid step of the exhaustive scan.
    pub grid_step: f64,
    /// Gradient steps per penalty stage.
    pub steps_per_stage: usize,
    /// Penalty stages; the weight grows tenfold per stage starting at 1.
    pub stages: usize,
    /// EM iterations allowed for the final marginal fit.
    pub polish_iters: usize,
    pub tolerance: f64,
    pub exec: Exec,
}

impl Default for CiBudget {
    fn default() -> Self {
        CiBudget {
            mode: SolveMode::Auto,
            restarts: 16,
            seed: 0,
            grid_step: 1e-3,
            steps_per_stage: 1500,
            stages: 6,
            polish_iters: 20_000,
            tolerance: FEASIBILITY_TOLERANCE,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiStatus {
    ExhaustiveOptimal,
    LocalRestartBest,
}

/// A conditionally independent decomposition `p(x) = sum_w p(w) prod_i p(x_i|w)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonInfoSolution {
    pub pw: Vec<f64>,
    pub channels: FactoredChannels,
    /// `I(X; W)` of the decomposition, bits.
    pub achieved_i: f64,
    /// Total variation between the decomposition's mixture and the target.
    pub marginal_residual: f64,
    pub status: CiStatus,
    /// Set when `|W|` was chosen by the default support-size heuristic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cardinality_note: Option<String>,
}

impl CommonInfoSolution {
    fn from_parts(pw: Vec<f64>, channels: Vec<Vec<Vec<f64>>>, p: &JointPmf, status: CiStatus) -> Result<Self> {
        let (achieved_i, marginal_residual) = evaluate_model(&pw, &channels, p);
        Ok(CommonInfoSolution {
            pw,
            channels: FactoredChannels::new(channels)?,
            achieved_i,
            marginal_residual,
            status,
            cardinality_note: None,
        })
    }

    /// `I(X; W)` and residual recomputed from the stored decomposition.
    pub fn reevaluate(&self, p: &JointPmf) -> (f64, f64) {
        evaluate_model(&self.pw, &self.channels.channels, p)
    }

    /// Joint law of `(X, W)` with `X` distributed as the target and `W`
    /// drawn from the decomposition's posterior `p(w | x)`. Coordinates are
    /// those of `X` followed by `W`.
    pub fn joint_with_target(&self, p: &JointPmf) -> Result<JointPmf> {
        let k = self.pw.len();
        let sizes = p.alphabet_sizes().to_vec();
        let mut comps = Vec::with_capacity(k);
        for w in 0..k {
            let mut one = vec![0.0; k];
            one[w] = 1.0;
            comps.push(mixture_mass(&one, &self.channels.channels, &sizes));
        }
        let mut mass = Vec::with_capacity(p.len() * k);
        for (x, &px) in p.mass().iter().enumerate() {
            let joint: Vec<f64> = (0..k).map(|w| self.pw[w] * comps[w][x]).collect();
            let total: f64 = joint.iter().sum();
            for j in joint {
                mass.push(if total > 0.0 { px * j / total } else { px / k as f64 });
            }
        }
        let mut all = sizes;
        all.push(k);
        JointPmf::new(all, mass)
    }
}

/// `I(X;W)` of the model `p(w) prod_i p(x_i|w)` and its total-variation
/// distance to `p`.
fn evaluate_model(pw: &[f64], channels: &[Vec<Vec<f64>>], p: &JointPmf) -> (f64, f64) {
    let mix = mixture_mass(pw, channels, p.alphabet_sizes());
    let conditional: f64 = pw
        .iter()
        .enumerate()
        .map(|(w, &q)| q * channels.iter().map(|ch| entropy_of(&ch[w])).sum::<f64>())
        .sum();
    let i = (entropy_of(&mix) - conditional).max(0.0);
    let tv = 0.5 * mix.iter().zip(p.mass()).map(|(a, b)| (a - b).abs()).sum::<f64>();
    (i, tv)
}

/// `max_A I(X^A; X^{A^c}) <= C(X) <= min_j H(X^{-j})`.
pub fn common_info_bounds(p: &JointPmf) -> Result<(f64, f64)> {
    let n = p.ndim();
    if n < 2 {
        return Err(Error::Shape("common information needs at least two coordinates".into()));
    }
    let mut lower: f64 = 0.0;
    // Subsets containing coordinate 0 enumerate every cut once.
    for mask in 0..(1usize << (n - 1)) {
        let a: Vec<usize> = std::iter::once(0).chain((1..n).filter(|i| mask >> (i - 1) & 1 == 1)).collect();
        if a.len() == n {
            continue;
        }
        lower = lower.max(mutual_information(p, &a)?);
    }
    let mut upper = f64::INFINITY;
    for j in 0..n {
        let rest: Vec<usize> = (0..n).filter(|&i| i != j).collect();
        upper = upper.min(entropy(&marginalize(p, &rest)?));
    }
    Ok((lower, upper))
}

/// Joint law of `N` binary outputs of independent BSC(`a1`) channels driven
/// by a common bit; `theta` weights the all-zeros-favoring component.
pub fn bsc_broadcast_source(theta: f64, a1: f64, n: usize) -> Result<JointPmf> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Domain(format!("theta = {theta} must lie in [0, 1]")));
    }
    if !(0.0..=0.5).contains(&a1) {
        return Err(Error::Domain(format!("crossover a1 = {a1} must lie in [0, 1/2]")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("need at least two outputs, got {n}")));
    }
    let mass = (0..1usize << n)
        .map(|idx| {
            let t = idx.count_ones() as i32;
            let m = n as i32 - t;
            theta * a1.powi(t) * (1.0 - a1).powi(m) + (1.0 - theta) * (1.0 - a1).powi(t) * a1.powi(m)
        })
        .collect();
    JointPmf::new(vec![2; n], mass)
}

/// `I(X_1..X_N; S)` for the broadcast family, from exact enumeration.
pub fn broadcast_common_info(theta: f64, a1: f64, n: usize) -> Result<f64> {
    let p = bsc_broadcast_source(theta, a1, n)?;
    Ok(entropy(&p) - n as f64 * crate::prob::h2(a1))
}

pub fn solve_common_info(p: &JointPmf, cardinality: Option<usize>, budget: &CiBudget) -> Result<CommonInfoSolution> {
    if p.ndim() < 2 {
        return Err(Error::Shape("common information needs at least two coordinates".into()));
    }
    let (k, note) = match cardinality {
        Some(0) => return Err(Error::Domain("|W| must be at least 1".into())),
        Some(k) => (k, None),
        None => (
            p.alphabet_sizes().iter().product(),
            Some("|W| defaults to the product of alphabet sizes (heuristic; no cardinality bound is known)".to_string()),
        ),
    };
    let binary_pair = p.alphabet_sizes() == [2, 2];
    let mut sol = match budget.mode {
        SolveMode::Exhaustive if !(binary_pair && k == 2) => {
            return Err(Error::Shape("exhaustive mode needs a binary pair and |W| = 2".into()))
        }
        SolveMode::Exhaustive => exhaustive_pair(p, budget)?,
        SolveMode::Auto if binary_pair && k == 2 => exhaustive_pair(p, budget)?,
        _ => restart_search(p, k, budget)?,
    };
    sol.cardinality_note = note;
    Ok(sol)
}

fn marginal_factors(p: &JointPmf) -> Vec<Vec<f64>> {
    (0..p.ndim()).map(|i| p.marginal_vec(i)).collect()
}

fn product_solution(p: &JointPmf, status: CiStatus) -> Result<CommonInfoSolution> {
    let channels = marginal_factors(p).into_iter().map(|m| vec![m]).collect();
    CommonInfoSolution::from_parts(vec![1.0], channels, p, status)
}

/// Decompositions with `W = X^{-j}` that fit in `k` symbols; exact and feasible.
pub(crate) fn deterministic_candidates(p: &JointPmf, k: usize) -> Vec<(Vec<f64>, Vec<Vec<Vec<f64>>>)> {
    let sizes = p.alphabet_sizes();
    let n = sizes.len();
    let mut out = Vec::new();
    for j in 0..n {
        let rest: Vec<usize> = (0..n).filter(|&i| i != j).collect();
        let card: usize = rest.iter().map(|&i| sizes[i]).product();
        if card > k {
            continue;
        }
        let rest_shape = JointPmf::uniform(rest.iter().map(|&i| sizes[i]).collect()).expect("nonempty shape");
        let mut pw = vec![0.0; k];
        let mut channels: Vec<Vec<Vec<f64>>> = sizes.iter().map(|&s| vec![vec![1.0 / s as f64; s]; k]).collect();
        for w in 0..card {
            let wc = rest_shape.coords(w);
            let mut col = vec![0.0; sizes[j]];
            for (v, c) in col.iter_mut().enumerate() {
                let mut full = vec![0; n];
                for (r, &i) in rest.iter().enumerate() {
                    full[i] = wc[r];
                }
                full[j] = v;
                *c = p.get(&full);
            }
            let s: f64 = col.iter().sum();
            pw[w] = s;
            if s > 0.0 {
                channels[j][w] = col.iter().map(|c| c / s).collect();
            }
            for (r, &i) in rest.iter().enumerate() {
                let mut row = vec![0.0; sizes[i]];
                row[wc[r]] = 1.0;
                channels[i][w] = row;
            }
        }
        out.push((pw, channels));
    }
    out
}

pub(crate) fn is_product(p: &JointPmf, tol: f64) -> bool {
    let prod = JointPmf::product(&marginal_factors(p)).expect("marginals are distributions");
    p.total_variation(&prod).map(|tv| tv <= tol).unwrap_or(false)
}

/// Grid over `(P(X1=1|w=0), P(X2=1|w=0))`; the weight and the second
/// component follow from matching the two marginals and the correlation.
fn exhaustive_pair(p: &JointPmf, budget: &CiBudget) -> Result<CommonInfoSolution> {
    if is_product(p, budget.tolerance) {
        return product_solution(p, CiStatus::ExhaustiveOptimal);
    }
    let scanned = scan_pair_decompositions(p, budget.grid_step, budget.tolerance, budget.exec, |params| pair_value(params, p).0);
    let mut best: Option<(f64, f64, Vec<f64>, Vec<Vec<Vec<f64>>>)> = scanned.map(|(pw, ch)| {
        let (info, tv) = evaluate_model(&pw, &ch, p);
        (info, tv, pw, ch)
    });
    for (pw, channels) in deterministic_candidates(p, 2) {
        let (info, tv) = evaluate_model(&pw, &channels, p);
        if best.as_ref().is_none_or(|b| (info, tv) < (b.0, b.1)) {
            best = Some((info, tv, pw, channels));
        }
    }
    let (_, _, pw, channels) = best.ok_or(Error::Infeasible { best_residual: f64::INFINITY })?;
    CommonInfoSolution::from_parts(pw, channels, p, CiStatus::ExhaustiveOptimal)
}

/// Two-component conditionally independent decompositions of a binary pair
/// on a grid of step `step`, minimizing `objective` over those whose mixture
/// is within `tol` of `p`. The objective sees `[pi, a1, a2, b1, b2]` with
/// `a_w = P(X1=1|w)`, `b_w = P(X2=1|w)` and `pi = P(W=0)`.
pub(crate) fn scan_pair_decompositions<F>(
    p: &JointPmf,
    step: f64,
    tol: f64,
    exec: Exec,
    objective: F,
) -> Option<(Vec<f64>, Vec<Vec<Vec<f64>>>)>
where
    F: Fn(&[f64; 5]) -> f64 + Sync + Send,
{
    let m1 = p.get(&[1, 0]) + p.get(&[1, 1]);
    let m2 = p.get(&[0, 1]) + p.get(&[1, 1]);
    let c = p.get(&[1, 1]) - m1 * m2;
    let steps = (1.0 / step).round() as usize;
    let best_rows = exec.map_range(steps + 1, |i| {
        let a1 = i as f64 / steps as f64;
        let mut best: Option<(f64, f64, [f64; 5])> = None;
        for j in 0..=steps {
            let b1 = j as f64 / steps as f64;
            let den = (a1 - m1) * (b1 - m2) + c;
            if den == 0.0 {
                continue;
            }
            let pi = c / den;
            if !(pi > 1e-12 && pi < 1.0 - 1e-12) {
                continue;
            }
            let a2 = (m1 - pi * a1) / (1.0 - pi);
            let b2 = (m2 - pi * b1) / (1.0 - pi);
            if !(-1e-9..=1.0 + 1e-9).contains(&a2) || !(-1e-9..=1.0 + 1e-9).contains(&b2) {
                continue;
            }
            let params = [pi, a1, a2.clamp(0.0, 1.0), b1, b2.clamp(0.0, 1.0)];
            let tv = pair_value(&params, p).1;
            if tv > tol {
                continue;
            }
            let value = objective(&params);
            if best.is_none_or(|(bv, bt, _)| (value, tv) < (bv, bt)) {
                best = Some((value, tv, params));
            }
        }
        best
    });
    let (_, _, [pi, a1, a2, b1, b2]) = best_rows
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, f64, [f64; 5])>, row| match acc {
            Some(a) if (a.0, a.1) <= (row.0, row.1) => Some(a),
            _ => Some(row),
        })?;
    let channels = vec![
        vec![vec![1.0 - a1, a1], vec![1.0 - a2, a2]],
        vec![vec![1.0 - b1, b1], vec![1.0 - b2, b2]],
    ];
    Some((vec![pi, 1.0 - pi], channels))
}

fn pair_value(params: &[f64; 5], p: &JointPmf) -> (f64, f64) {
    let [pi, a1, a2, b1, b2] = *params;
    let comp = |a: f64, b: f64| [(1.0 - a) * (1.0 - b), (1.0 - a) * b, a * (1.0 - b), a * b];
    let (c1, c2) = (comp(a1, b1), comp(a2, b2));
    let mix: Vec<f64> = (0..4).map(|x| pi * c1[x] + (1.0 - pi) * c2[x]).collect();
    let cond = pi * (crate::prob::h2(a1) + crate::prob::h2(b1)) + (1.0 - pi) * (crate::prob::h2(a2) + crate::prob::h2(b2));
    let tv = 0.5 * mix.iter().zip(p.mass()).map(|(a, b)| (a - b).abs()).sum::<f64>();
    ((entropy_of(&mix) - cond).max(0.0), tv)
}

// ---------------------------------------------------------------------------
// restart search

const LN2: f64 = std::f64::consts::LN_2;

struct Model<'a> {
    sizes: &'a [usize],
    k: usize,
}

impl Model<'_> {
    fn softmax(logits: &[f64]) -> Vec<f64> {
        let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|v| v / s).collect()
    }

    /// Layout: `k` weight logits, then per coordinate `k * |X_i|` logits.
    fn unpack(&self, theta: &[f64]) -> (Vec<f64>, Vec<Vec<Vec<f64>>>) {
        let pw = Self::softmax(&theta[..self.k]);
        let mut off = self.k;
        let mut channels = Vec::with_capacity(self.sizes.len());
        for &s in self.sizes {
            let mut ch = Vec::with_capacity(self.k);
            for _ in 0..self.k {
                ch.push(Self::softmax(&theta[off..off + s]));
                off += s;
            }
            channels.push(ch);
        }
        (pw, channels)
    }

    fn dim(&self) -> usize {
        self.k + self.k * self.sizes.iter().sum::<usize>()
    }

    /// Gradient of `I(X;W) + mu * KL(p || mixture)` in logit coordinates.
    fn gradient(&self, theta: &[f64], p: &[f64], mu: f64) -> Vec<f64> {
        let (pw, channels) = self.unpack(theta);
        let n: usize = self.sizes.iter().product();
        let comps: Vec<Vec<f64>> = (0..self.k)
            .map(|w| {
                let mut one = vec![0.0; self.k];
                one[w] = 1.0;
                mixture_mass(&one, &channels, self.sizes)
            })
            .collect();
        let mix: Vec<f64> = (0..n).map(|x| (0..self.k).map(|w| pw[w] * comps[w][x]).sum::<f64>().max(1e-300)).collect();
        let g: Vec<f64> = (0..n)
            .map(|x| -(mix[x].log2() + 1.0 / LN2) - mu * p[x] / (mix[x] * LN2))
            .collect();
        let mut grad = vec![0.0; self.dim()];
        // weights
        let gw: Vec<f64> = (0..self.k)
            .map(|w| {
                let h: f64 = channels.iter().map(|ch| entropy_of(&ch[w])).sum();
                (0..n).map(|x| g[x] * comps[w][x]).sum::<f64>() - h
            })
            .collect();
        softmax_chain(&pw, &gw, &mut grad[..self.k]);
        // channels
        let mut off = self.k;
        let mut stride = n;
        for (i, &s) in self.sizes.iter().enumerate() {
            stride /= s;
            for w in 0..self.k {
                let row = &channels[i][w];
                let mut ga = vec![0.0; s];
                for x in 0..n {
                    let v = (x / stride) % s;
                    if row[v] > 0.0 {
                        ga[v] += g[x] * comps[w][x] / row[v];
                    }
                }
                for v in 0..s {
                    ga[v] = pw[w] * ga[v] + pw[w] * (row[v].max(1e-300).log2() + 1.0 / LN2);
                }
                softmax_chain(row, &ga, &mut grad[off..off + s]);
                off += s;
            }
        }
        grad
    }
}

fn softmax_chain(s: &[f64], g: &[f64], out: &mut [f64]) {
    let mean: f64 = s.iter().zip(g).map(|(a, b)| a * b).sum();
    for ((o, &sk), &gk) in out.iter_mut().zip(s).zip(g) {
        *o = sk * (gk - mean);
    }
}

/// Latent-class EM on `KL(p || mixture)`; keeps the fitted components.
fn em_polish(pw: &mut Vec<f64>, channels: &mut [Vec<Vec<f64>>], p: &JointPmf, iters: usize, tol: f64) {
    let sizes = p.alphabet_sizes();
    let n = p.len();
    let k = pw.len();
    for _ in 0..iters {
        let comps: Vec<Vec<f64>> = (0..k)
            .map(|w| {
                let mut one = vec![0.0; k];
                one[w] = 1.0;
                mixture_mass(&one, channels, sizes)
            })
            .collect();
        let mix: Vec<f64> = (0..n).map(|x| (0..k).map(|w| pw[w] * comps[w][x]).sum()).collect();
        let tv = 0.5 * mix.iter().zip(p.mass()).map(|(a, b)| (a - b).abs()).sum::<f64>();
        if tv <= tol * 0.5 {
            break;
        }
        let mut new_pw = vec![0.0; k];
        let mut new_ch: Vec<Vec<Vec<f64>>> = sizes.iter().map(|&s| vec![vec![0.0; s]; k]).collect();
        for x in 0..n {
            if p.mass()[x] == 0.0 || mix[x] == 0.0 {
                continue;
            }
            let xc = p.coords(x);
            for w in 0..k {
                let r = p.mass()[x] * pw[w] * comps[w][x] / mix[x];
                new_pw[w] += r;
                for (i, &v) in xc.iter().enumerate() {
                    new_ch[i][w][v] += r;
                }
            }
        }
        for w in 0..k {
            if new_pw[w] > 0.0 {
                for ch in new_ch.iter_mut() {
                    ch[w].iter_mut().for_each(|v| *v /= new_pw[w]);
                }
            } else {
                for (i, ch) in new_ch.iter_mut().enumerate() {
                    ch[w] = channels[i][w].clone();
                }
            }
        }
        let total: f64 = new_pw.iter().sum();
        *pw = new_pw.into_iter().map(|v| v / total).collect();
        for (dst, src) in channels.iter_mut().zip(new_ch) {
            *dst = src;
        }
    }
}

fn one_restart(p: &JointPmf, k: usize, budget: &CiBudget, index: usize) -> (Vec<f64>, Vec<Vec<Vec<f64>>>) {
    let model = Model { sizes: p.alphabet_sizes(), k };
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    rng.set_stream(index as u64);
    let mut theta: Vec<f64> = (0..model.dim()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let (b1, b2, eps) = (0.9, 0.999, 1e-8);
    let mut m = vec![0.0; theta.len()];
    let mut v = vec![0.0; theta.len()];
    let mut t = 0i32;
    for stage in 0..budget.stages {
        let mu = 10f64.powi(stage as i32);
        let lr = 0.05 / (1.0 + stage as f64);
        // restart the moment estimates: the penalty rescales the landscape
        m.iter_mut().for_each(|x| *x = 0.0);
        v.iter_mut().for_each(|x| *x = 0.0);
        t = 0;
        for _ in 0..budget.steps_per_stage {
            t += 1;
            let g = model.gradient(&theta, p.mass(), mu);
            for j in 0..theta.len() {
                m[j] = b1 * m[j] + (1.0 - b1) * g[j];
                v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
                let mh = m[j] / (1.0 - b1.powi(t));
                let vh = v[j] / (1.0 - b2.powi(t));
                theta[j] -= lr * mh / (vh.sqrt() + eps);
            }
        }
    }
    let _ = t;
    let (mut pw, mut channels) = model.unpack(&theta);
    em_polish(&mut pw, &mut channels, p, budget.polish_iters, budget.tolerance);
    (pw, channels)
}

fn restart_search(p: &JointPmf, k: usize, budget: &CiBudget) -> Result<CommonInfoSolution> {
    if k == 1 || is_product(p, budget.tolerance) {
        return if is_product(p, budget.tolerance) {
            product_solution(p, CiStatus::LocalRestartBest)
        } else {
            let (pw, ch) = (vec![1.0], marginal_factors(p).into_iter().map(|m| vec![m]).collect::<Vec<_>>());
            Err(Error::Infeasible {
                best_residual: evaluate_model(&pw, &ch, p).1,
            })
        };
    }
    let mut candidates = deterministic_candidates(p, k);
    candidates.extend(budget.exec.map_range(budget.restarts, |r| one_restart(p, k, budget, r)));
    let mut best: Option<(f64, f64, usize)> = None;
    let mut best_residual = f64::INFINITY;
    for (idx, (pw, ch)) in candidates.iter().enumerate() {
        let (info, tv) = evaluate_model(pw, ch, p);
        best_residual = best_residual.min(tv);
        if tv > budget.tolerance {
            continue;
        }
        if best.is_none_or(|b| (info, tv, idx) < b) {
            best = Some((info, tv, idx));
        }
    }
    let (_, _, idx) = best.ok_or(Error::Infeasible { best_residual })?;
    let (pw, channels) = candidates.swap_remove(idx);
    CommonInfoSolution::from_parts(pw, channels, p, CiStatus::LocalRestartBest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::h2;
    use approx::assert_abs_diff_eq;

    const C_DSBS: f64 = 0.742085858549717;

    fn dsbs(a0: f64) -> JointPmf {
        JointPmf::from_matrix(&[vec![(1.0 - a0) / 2.0, a0 / 2.0], vec![a0 / 2.0, (1.0 - a0) / 2.0]]).unwrap()
    }

    #[test]
    fn bounds_examples() {
        let indep = JointPmf::product(&[vec![0.3, 0.7], vec![0.5, 0.5]]).unwrap();
        let (lo, hi) = common_info_bounds(&indep).unwrap();
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, h2(0.3), epsilon = 1e-12);
        let (lo, hi) = common_info_bounds(&dsbs(0.18)).unwrap();
        assert_abs_diff_eq!(lo, 0.319922954271720, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
        let copy = JointPmf::from_matrix(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let (lo, hi) = common_info_bounds(&copy).unwrap();
        assert_abs_diff_eq!(lo, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
        assert!(common_info_bounds(&JointPmf::uniform(vec![2]).unwrap()).is_err());
    }

    #[test]
    fn broadcast_examples() {
        let p = bsc_broadcast_source(0.5, 0.1, 2).unwrap();
        assert!(p.total_variation(&dsbs(0.18)).unwrap() < 1e-15);
        let p = bsc_broadcast_source(0.3, 0.0, 3).unwrap();
        assert_abs_diff_eq!(p.get(&[0, 0, 0]), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(&[1, 1, 1]), 0.7, epsilon = 1e-15);
        let p = bsc_broadcast_source(0.8, 0.5, 3).unwrap();
        assert!(p.mass().iter().all(|&m| (m - 0.125).abs() < 1e-15));
        let p = bsc_broadcast_source(0.2, 0.15, 4).unwrap();
        let q = p.permute(&[2, 0, 3, 1]).unwrap();
        assert!(p.total_variation(&q).unwrap() < 1e-15);
        assert!(bsc_broadcast_source(0.5, 0.6, 2).is_err());
        assert!(bsc_broadcast_source(0.5, 0.1, 1).is_err());
        assert_abs_diff_eq!(broadcast_common_info(0.5, 0.1, 3).unwrap(), 0.862417730635044, epsilon = 1e-12);
    }

    #[test]
    fn exhaustive_dsbs() {
        let sol = solve_common_info(&dsbs(0.18), Some(2), &CiBudget::default()).unwrap();
        assert_eq!(sol.status, CiStatus::ExhaustiveOptimal);
        assert!(sol.marginal_residual <= FEASIBILITY_TOLERANCE);
        assert_abs_diff_eq!(sol.achieved_i, C_DSBS, epsilon = 1e-3);
        let (i, r) = sol.reevaluate(&dsbs(0.18));
        assert_abs_diff_eq!(i, sol.achieved_i, epsilon = 1e-12);
        assert_abs_diff_eq!(r, sol.marginal_residual, epsilon = 1e-12);
    }

    #[test]
    fn product_source_needs_no_common_part() {
        let indep = JointPmf::product(&[vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        let sol = solve_common_info(&indep, Some(1), &CiBudget::default()).unwrap();
        assert_eq!(sol.achieved_i, 0.0);
        assert_eq!(sol.pw, vec![1.0]);
        let err = solve_common_info(&dsbs(0.18), Some(1), &CiBudget::default()).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
    }

    #[test]
    fn restart_dsbs_and_broadcast() {
        let budget = CiBudget {
            restarts: 8,
            ..CiBudget::default()
        };
        let sol = solve_common_info(&dsbs(0.18), None, &budget).unwrap();
        assert_eq!(sol.status, CiStatus::LocalRestartBest);
        assert!(sol.cardinality_note.is_some());
        assert!(sol.marginal_residual <= FEASIBILITY_TOLERANCE);
        assert!(sol.achieved_i >= C_DSBS - 1e-4);
        assert_abs_diff_eq!(sol.achieved_i, C_DSBS, epsilon = 1e-2);

        let p = bsc_broadcast_source(0.5, 0.1, 3).unwrap();
        let sol = solve_common_info(&p, Some(2), &budget).unwrap();
        assert!(sol.marginal_residual <= FEASIBILITY_TOLERANCE);
        assert_abs_diff_eq!(sol.achieved_i, 0.862417730635044, epsilon = 1e-2);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let budget = CiBudget {
            restarts: 3,
            steps_per_stage: 200,
            ..CiBudget::default()
        };
        let p = JointPmf::new(vec![2, 3], vec![0.2, 0.1, 0.05, 0.05, 0.3, 0.3]).unwrap();
        let a = solve_common_info(&p, Some(3), &budget);
        let b = solve_common_info(&p, Some(3), &CiBudget { exec: Exec::Sequential, ..budget.clone() });
        assert_eq!(a, b);
    }

    #[test]
    fn joint_with_target_keeps_the_source() {
        let sol = solve_common_info(&dsbs(0.18), Some(2), &CiBudget::default()).unwrap();
        let pxw = sol.joint_with_target(&dsbs(0.18)).unwrap();
        let px = marginalize(&pxw, &[0, 1]).unwrap();
        assert!(px.total_variation(&dsbs(0.18)).unwrap() < 1e-12);
        assert_abs_diff_eq!(mutual_information(&pxw, &[0, 1]).unwrap(), sol.achieved_i, epsilon = 1e-5);
    }
}
