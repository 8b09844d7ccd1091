//! Rate-distortion functions of finite-alphabet sources by alternating
//! minimization (Blahut-Arimoto).
//!
//! A Blahut-Arimoto run fixes one multiplier per distortion coordinate and
//! returns a point on the lower convex envelope of the rate-distortion
//! surface. Distortion-constrained queries search the multipliers until the
//! achieved distortion meets the target, then time-share between the two
//! bracketing test channels so the constraint is met with equality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::prob::{ConditionalPmf, JointPmf};

/// Per-coordinate distortion matrices `d_i[x][x_hat]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistortionDoc", into = "DistortionDoc")]
pub struct DistortionSpec {
    matrices: Vec<Vec<Vec<f64>>>,
    repro_sizes: Vec<usize>,
}

/// JSON form: `{ "matrices": [..], "repro_sizes": [..] }`, or the keyword
/// `"hamming"` together with the source alphabet sizes.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistortionDoc {
    Keyword(String),
    KeywordSized {
        matrices: String,
        repro_sizes: Vec<usize>,
    },
    Explicit {
        matrices: Vec<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        repro_sizes: Option<Vec<usize>>,
    },
}

impl TryFrom<DistortionDoc> for DistortionSpec {
    type Error = Error;
    fn try_from(doc: DistortionDoc) -> Result<Self> {
        match doc {
            DistortionDoc::Explicit { matrices, repro_sizes } => {
                let spec = DistortionSpec::new(matrices)?;
                if let Some(r) = repro_sizes {
                    if r != spec.repro_sizes {
                        return Err(Error::Shape(format!(
                            "repro_sizes {r:?} disagree with matrix widths {:?}",
                            spec.repro_sizes
                        )));
                    }
                }
                Ok(spec)
            }
            DistortionDoc::KeywordSized { matrices, repro_sizes } if matrices == "hamming" => {
                Ok(DistortionSpec::hamming(&repro_sizes))
            }
            DistortionDoc::Keyword(_) | DistortionDoc::KeywordSized { .. } => Err(Error::Shape(
                "keyword distortion must be \"hamming\" and needs sizes; use DistortionDoc::resolve".into(),
            )),
        }
    }
}

impl DistortionDoc {
    /// Resolves the document against the source it will be used with, so the
    /// bare `"hamming"` keyword can pick up the alphabet sizes.
    pub fn resolve(self, source_sizes: &[usize]) -> Result<DistortionSpec> {
        match self {
            DistortionDoc::Keyword(k) if k == "hamming" => Ok(DistortionSpec::hamming(source_sizes)),
            DistortionDoc::Keyword(k) => Err(Error::Shape(format!("unknown distortion keyword {k:?}"))),
            other => other.try_into(),
        }
    }
}

impl From<DistortionSpec> for DistortionDoc {
    fn from(d: DistortionSpec) -> Self {
        DistortionDoc::Explicit {
            repro_sizes: Some(d.repro_sizes),
            matrices: d.matrices,
        }
    }
}

impl DistortionSpec {
    pub fn new(matrices: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let mut repro_sizes = Vec::with_capacity(matrices.len());
        for (i, m) in matrices.iter().enumerate() {
            let width = m.first().map_or(0, Vec::len);
            if m.is_empty() || width == 0 || m.iter().any(|r| r.len() != width) {
                return Err(Error::Shape(format!("distortion matrix {i} is empty or ragged")));
            }
            if m.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Domain(format!("distortion matrix {i} has a negative or non-finite entry")));
            }
            repro_sizes.push(width);
        }
        Ok(DistortionSpec { matrices, repro_sizes })
    }

    /// Hamming distortion with reproduction alphabets equal to the sources'.
    pub fn hamming(sizes: &[usize]) -> Self {
        let matrices = sizes
            .iter()
            .map(|&s| {
                (0..s)
                    .map(|x| (0..s).map(|y| if x == y { 0.0 } else { 1.0 }).collect())
                    .collect()
            })
            .collect();
        DistortionSpec {
            matrices,
            repro_sizes: sizes.to_vec(),
        }
    }

    pub fn matrices(&self) -> &[Vec<Vec<f64>>] {
        &self.matrices
    }

    pub fn repro_sizes(&self) -> &[usize] {
        &self.repro_sizes
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn select(&self, coords: &[usize]) -> DistortionSpec {
        DistortionSpec {
            matrices: coords.iter().map(|&c| self.matrices[c].clone()).collect(),
            repro_sizes: coords.iter().map(|&c| self.repro_sizes[c]).collect(),
        }
    }

    /// `d(x, x) = 0` and `d(x, y) > 0` for `x != y`, square matrices.
    pub fn satisfies_audit_hypothesis(&self) -> bool {
        self.matrices.iter().all(|m| {
            m.iter().enumerate().all(|(x, row)| {
                row.len() == m.len() && row.iter().enumerate().all(|(y, &v)| if x == y { v == 0.0 } else { v > 0.0 })
            })
        })
    }

    fn check_source(&self, sizes: &[usize]) -> Result<()> {
        if self.matrices.len() != sizes.len() || self.matrices.iter().zip(sizes).any(|(m, &s)| m.len() != s) {
            return Err(Error::Shape(format!(
                "distortion spec with {} matrices does not fit source alphabet sizes {sizes:?}",
                self.matrices.len()
            )));
        }
        Ok(())
    }
}

/// Iteration controls for the alternating minimization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaConfig {
    /// Stop when the Lagrangian objective changes by less than this (bits).
    pub tol: f64,
    pub max_iter: usize,
    /// Achieved distortion may exceed the target by at most this much.
    pub slack: f64,
}

impl Default for BaConfig {
    fn default() -> Self {
        BaConfig {
            tol: 1e-10,
            max_iter: 10_000,
            slack: 1e-6,
        }
    }
}

/// A solved rate-distortion query or sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdPoint {
    /// Requested distortion per coordinate (equals `distortion` for sweeps).
    pub target: Vec<f64>,
    /// Achieved expected distortion per coordinate.
    pub distortion: Vec<f64>,
    /// Mutual information of the test channel, bits.
    pub rate: f64,
    /// Lagrange multipliers, bits per unit distortion; `None` when the
    /// point is the minimal-distortion limit of an unbounded multiplier.
    pub multipliers: Vec<Option<f64>>,
    /// `p_t(x_hat | x)`; for conditional queries the rows are indexed by
    /// `(x, w)` in row-major order.
    pub test_channel: ConditionalPmf,
}

// ---------------------------------------------------------------------------
// engine

#[derive(Clone, Debug)]
struct Block {
    weight: f64,
    px: Vec<f64>,
}

/// Source blocks sharing one cost structure. One block for marginal and
/// joint problems; one block per `w` for conditional problems.
#[derive(Clone, Debug)]
struct Problem {
    blocks: Vec<Block>,
    n_x: usize,
    n_y: usize,
    /// Per distortion coordinate, flat `[x * n_y + y]`.
    dist: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub(crate) struct Run {
    lambda: Vec<f64>,
    qs: Vec<Vec<f64>>,
    channels: Vec<Vec<f64>>,
    rate: f64,
    distortion: Vec<f64>,
    pub(crate) trace: Vec<f64>,
}

impl Problem {
    fn joint(p: &JointPmf, d: &DistortionSpec) -> Result<Problem> {
        d.check_source(p.alphabet_sizes())?;
        let src = p.alphabet_sizes();
        let rep = d.repro_sizes();
        let n_x = p.len();
        let n_y: usize = rep.iter().product();
        let mut dist = vec![vec![0.0; n_x * n_y]; src.len()];
        let rep_pmf_shape = JointPmf::uniform(rep.to_vec())?;
        for x in 0..n_x {
            let xc = p.coords(x);
            for y in 0..n_y {
                let yc = rep_pmf_shape.coords(y);
                for k in 0..src.len() {
                    dist[k][x * n_y + y] = d.matrices()[k][xc[k]][yc[k]];
                }
            }
        }
        Ok(Problem {
            blocks: vec![Block {
                weight: 1.0,
                px: p.mass().to_vec(),
            }],
            n_x,
            n_y,
            dist,
        })
    }

    fn conditional(pxw: &JointPmf, d: &DistortionSpec) -> Result<Problem> {
        if pxw.ndim() != 2 {
            return Err(Error::Shape("conditional source must have coordinates (X, W)".into()));
        }
        d.check_source(&pxw.alphabet_sizes()[..1])?;
        let (n_x, n_w) = (pxw.alphabet_sizes()[0], pxw.alphabet_sizes()[1]);
        let n_y = d.repro_sizes()[0];
        let mut blocks = Vec::with_capacity(n_w);
        for w in 0..n_w {
            let col: Vec<f64> = (0..n_x).map(|x| pxw.get(&[x, w])).collect();
            let weight: f64 = col.iter().sum();
            let px = if weight > 0.0 {
                col.iter().map(|v| v / weight).collect()
            } else {
                vec![0.0; n_x]
            };
            blocks.push(Block { weight, px });
        }
        let dist = vec![d.matrices()[0].iter().flatten().copied().collect()];
        Ok(Problem { blocks, n_x, n_y, dist })
    }

    fn expected(&self, k: usize, channels: &[Vec<f64>]) -> f64 {
        let d = &self.dist[k];
        self.blocks
            .iter()
            .zip(channels)
            .map(|(b, ch)| {
                b.weight
                    * (0..self.n_x)
                        .map(|x| b.px[x] * (0..self.n_y).map(|y| ch[x * self.n_y + y] * d[x * self.n_y + y]).sum::<f64>())
                        .sum::<f64>()
            })
            .sum()
    }

    fn rate(&self, channels: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        for (b, ch) in self.blocks.iter().zip(channels) {
            if b.weight == 0.0 {
                continue;
            }
            let mut out = vec![0.0; self.n_y];
            for x in 0..self.n_x {
                for y in 0..self.n_y {
                    out[y] += b.px[x] * ch[x * self.n_y + y];
                }
            }
            let mut i = 0.0;
            for x in 0..self.n_x {
                if b.px[x] == 0.0 {
                    continue;
                }
                for y in 0..self.n_y {
                    let c = ch[x * self.n_y + y];
                    if c > 0.0 && out[y] > 0.0 {
                        i += b.px[x] * c * (c / out[y]).log2();
                    }
                }
            }
            total += b.weight * i.max(0.0);
        }
        total
    }

    /// Largest distortion worth asking for on coordinate `k`: the best
    /// zero-rate (constant per block) reproduction.
    fn zero_rate(&self, k: usize) -> (f64, Vec<usize>) {
        let d = &self.dist[k];
        let mut total = 0.0;
        let mut choice = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let (best_y, best) = (0..self.n_y)
                .map(|y| (y, (0..self.n_x).map(|x| b.px[x] * d[x * self.n_y + y]).sum::<f64>()))
                .fold((0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
            total += b.weight * best;
            choice.push(best_y);
        }
        (total, choice)
    }

    /// Smallest achievable distortion on coordinate `k`.
    fn min_distortion(&self, k: usize) -> f64 {
        let d = &self.dist[k];
        self.blocks
            .iter()
            .map(|b| {
                b.weight
                    * (0..self.n_x)
                        .map(|x| b.px[x] * (0..self.n_y).map(|y| d[x * self.n_y + y]).fold(f64::INFINITY, f64::min))
                        .sum::<f64>()
            })
            .sum()
    }

    fn run(&self, lambda: &[f64], warm: Option<&[Vec<f64>]>, cfg: &BaConfig, record: bool) -> Run {
        let (n_x, n_y) = (self.n_x, self.n_y);
        // Row-shifted exponentials 2^{-(c - min_y c)} so the best symbol has weight 1.
        let mut expo = vec![0.0; n_x * n_y];
        let mut cmin = vec![0.0; n_x];
        for x in 0..n_x {
            let row: Vec<f64> = (0..n_y)
                .map(|y| lambda.iter().zip(&self.dist).map(|(l, d)| l * d[x * n_y + y]).sum())
                .collect();
            let m = row.iter().copied().fold(f64::INFINITY, f64::min);
            cmin[x] = m;
            for y in 0..n_y {
                expo[x * n_y + y] = (-(row[y] - m)).exp2();
            }
        }
        let uniform = 1.0 / n_y as f64;
        let mut qs: Vec<Vec<f64>> = match warm {
            Some(w) if w.len() == self.blocks.len() => w
                .iter()
                .map(|q| q.iter().map(|v| (1.0 - 1e-6) * v + 1e-6 * uniform).collect())
                .collect(),
            _ => vec![vec![uniform; n_y]; self.blocks.len()],
        };
        let mut trace = Vec::new();
        let mut z = vec![0.0; n_x];
        let mut prev = f64::INFINITY;
        for _ in 0..cfg.max_iter {
            let mut objective = 0.0;
            for (b, q) in self.blocks.iter().zip(qs.iter_mut()) {
                if b.weight == 0.0 {
                    continue;
                }
                let mut f = 0.0;
                for x in 0..n_x {
                    if b.px[x] == 0.0 {
                        continue;
                    }
                    let zx: f64 = (0..n_y).map(|y| q[y] * expo[x * n_y + y]).sum::<f64>().max(f64::MIN_POSITIVE);
                    z[x] = zx;
                    f += b.px[x] * (cmin[x] - zx.log2());
                }
                let mut next = vec![0.0; n_y];
                for x in 0..n_x {
                    if b.px[x] == 0.0 {
                        continue;
                    }
                    let s = b.px[x] / z[x];
                    for y in 0..n_y {
                        next[y] += s * expo[x * n_y + y];
                    }
                }
                for y in 0..n_y {
                    next[y] *= q[y];
                }
                let total: f64 = next.iter().sum();
                next.iter_mut().for_each(|v| *v /= total);
                *q = next;
                objective += b.weight * f;
            }
            if record {
                trace.push(objective);
            }
            let done = (prev - objective).abs() < cfg.tol;
            prev = objective;
            if done {
                break;
            }
        }
        let channels: Vec<Vec<f64>> = self
            .blocks
            .iter()
            .zip(&qs)
            .map(|(b, q)| {
                let mut ch = vec![0.0; n_x * n_y];
                for x in 0..n_x {
                    let row = &mut ch[x * n_y..(x + 1) * n_y];
                    let mut s = 0.0;
                    for y in 0..n_y {
                        row[y] = q[y] * expo[x * n_y + y];
                        s += row[y];
                    }
                    if s > 0.0 && b.px[x] >= 0.0 {
                        row.iter_mut().for_each(|v| *v /= s);
                    } else {
                        row.iter_mut().for_each(|v| *v = uniform);
                    }
                }
                ch
            })
            .collect();
        let distortion = (0..self.dist.len()).map(|k| self.expected(k, &channels)).collect();
        let rate = self.rate(&channels);
        Run {
            lambda: lambda.to_vec(),
            qs,
            channels,
            rate,
            distortion,
            trace,
        }
    }

    fn constant_run(&self, choices: &[Vec<usize>]) -> Run {
        // choices[k][block] -> symbol index of coordinate k; only used for
        // single-coordinate problems or joint problems with product reproduction.
        let channels: Vec<Vec<f64>> = (0..self.blocks.len())
            .map(|b| {
                let y = choices[0][b];
                let mut ch = vec![0.0; self.n_x * self.n_y];
                for x in 0..self.n_x {
                    ch[x * self.n_y + y] = 1.0;
                }
                ch
            })
            .collect();
        let distortion = (0..self.dist.len()).map(|k| self.expected(k, &channels)).collect();
        Run {
            lambda: vec![0.0; self.dist.len()],
            qs: vec![],
            channels,
            rate: 0.0,
            distortion,
            trace: vec![],
        }
    }

    /// The deterministic channel onto the unique distortion-minimizing
    /// symbol of every row, if each row has exactly one.
    fn min_distortion_run(&self) -> Option<Run> {
        let mut channels = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let mut ch = vec![0.0; self.n_x * self.n_y];
            for x in 0..self.n_x {
                if b.px[x] == 0.0 && b.weight > 0.0 {
                    ch[x * self.n_y] = 1.0;
                    continue;
                }
                let cost = |y: usize| self.dist.iter().map(|d| d[x * self.n_y + y]).sum::<f64>();
                let best = (0..self.n_y).map(cost).fold(f64::INFINITY, f64::min);
                let mut hits = (0..self.n_y).filter(|&y| cost(y) == best);
                let y = hits.next()?;
                if hits.next().is_some() {
                    return None;
                }
                ch[x * self.n_y + y] = 1.0;
            }
            channels.push(ch);
        }
        let distortion = (0..self.dist.len()).map(|k| self.expected(k, &channels)).collect();
        let rate = self.rate(&channels);
        Some(Run {
            lambda: vec![f64::INFINITY; self.dist.len()],
            qs: vec![],
            channels,
            rate,
            distortion,
            trace: vec![],
        })
    }

    fn mix(&self, a: &Run, b: &Run, t: f64) -> Run {
        let channels: Vec<Vec<f64>> = a
            .channels
            .iter()
            .zip(&b.channels)
            .map(|(ca, cb)| ca.iter().zip(cb).map(|(u, v)| t * u + (1.0 - t) * v).collect())
            .collect();
        let distortion = (0..self.dist.len()).map(|k| self.expected(k, &channels)).collect();
        let rate = self.rate(&channels);
        Run {
            lambda: b.lambda.clone(),
            qs: b.qs.clone(),
            channels,
            rate,
            distortion,
            trace: vec![],
        }
    }
}

const LAMBDA_START: f64 = 1.0;
const LAMBDA_MIN: f64 = 1e-6;
const LAMBDA_MAX: f64 = 4096.0;
const REFINE_STEPS: usize = 60;

struct Bracket {
    hi: Run,
    lo: Option<Run>,
}

/// Finds the multiplier on axis `axis` whose run meets `target`. `eval`
/// produces a run for a given multiplier value.
fn search_multiplier<F>(mut eval: F, axis: usize, target: f64, boundary: bool, cfg: &BaConfig) -> Result<Bracket>
where
    F: FnMut(f64) -> Result<Run>,
{
    let d_of = |r: &Run| r.distortion[axis];
    let first = eval(LAMBDA_START)?;
    let (mut lo, mut hi): (Option<Run>, Option<Run>);
    if d_of(&first) <= target {
        hi = Some(first);
        lo = None;
        let mut lam = LAMBDA_START;
        while lam > LAMBDA_MIN {
            lam /= 4.0;
            let r = eval(lam)?;
            if d_of(&r) <= target {
                hi = Some(r);
            } else {
                lo = Some(r);
                break;
            }
        }
        if lo.is_none() {
            return Ok(Bracket { hi: hi.unwrap(), lo: None });
        }
    } else {
        lo = Some(first);
        hi = None;
        let mut lam = LAMBDA_START;
        while lam < LAMBDA_MAX {
            lam *= 4.0;
            let r = eval(lam)?;
            if d_of(&r) <= target || (boundary && d_of(&r) <= target + cfg.slack) {
                hi = Some(r);
                break;
            }
            lo = Some(r);
        }
        let Some(h) = hi else {
            let l = lo.unwrap();
            if d_of(&l) <= target + cfg.slack {
                return Ok(Bracket { hi: l, lo: None });
            }
            return Err(Error::SweepResolution {
                target: vec![target],
                achieved: vec![d_of(&l)],
            });
        };
        if boundary {
            return Ok(Bracket { hi: h, lo });
        }
        hi = Some(h);
    }
    let mut hi = hi.unwrap();
    let mut lo = lo.unwrap();
    // Illinois-modified regula falsi on D(lambda) - target, decreasing in lambda.
    let mut f_lo = d_of(&lo) - target;
    let mut f_hi = d_of(&hi) - target;
    let mut side = 0i8;
    for _ in 0..REFINE_STEPS {
        let (l_lo, l_hi) = (lo.lambda[axis], hi.lambda[axis]);
        if f_hi.abs() <= 1e-12 || (l_lo - l_hi).abs() <= 1e-12 * l_lo.max(l_hi) {
            break;
        }
        let mut lam = l_hi - f_hi * (l_lo - l_hi) / (f_lo - f_hi);
        let width = l_lo - l_hi;
        let lower = l_lo.min(l_hi) + 0.01 * width.abs();
        let upper = l_lo.max(l_hi) - 0.01 * width.abs();
        if !lam.is_finite() || lam < lower || lam > upper {
            lam = 0.5 * (l_lo + l_hi);
        }
        let r = eval(lam)?;
        let f = d_of(&r) - target;
        if f <= 0.0 {
            hi = r;
            f_hi = f;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        } else {
            lo = r;
            f_lo = f;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        }
    }
    Ok(Bracket { hi, lo: Some(lo) })
}

/// Time-shares between the bracketing runs so the axis constraint is met
/// with equality, when that lowers the rate.
fn settle(problem: &Problem, bracket: Bracket, axis: usize, target: f64) -> Run {
    let Bracket { hi, lo } = bracket;
    let Some(lo) = lo else { return hi };
    let (dl, dh) = (lo.distortion[axis], hi.distortion[axis]);
    if dh >= target - 1e-12 || dl <= dh {
        return hi;
    }
    let t = ((target - dh) / (dl - dh)).clamp(0.0, 1.0);
    let mixed = problem.mix(&lo, &hi, t);
    if mixed.rate < hi.rate && mixed.distortion.iter().zip(&hi.distortion).enumerate().all(|(k, (m, h))| k == axis || *m <= h.max(target) + 1e-9) {
        mixed
    } else {
        hi
    }
}

fn query_1d(problem: &Problem, target: f64, cfg: &BaConfig) -> Result<Run> {
    if !(target >= 0.0) {
        return Err(Error::Domain(format!("distortion target {target} must be >= 0")));
    }
    let dmin = problem.min_distortion(0);
    if target < dmin - 1e-12 {
        return Err(Error::InfeasibleDistortion { target, min: dmin });
    }
    let (dmax, choice) = problem.zero_rate(0);
    if target >= dmax - 1e-15 {
        return Ok(problem.constant_run(&[choice]));
    }
    if target <= dmin + 1e-15 {
        if let Some(run) = problem.min_distortion_run() {
            return Ok(run);
        }
    }
    let boundary = target - dmin <= cfg.slack;
    let mut warm: Option<Vec<Vec<f64>>> = None;
    let bracket = search_multiplier(
        |lam| {
            let r = problem.run(&[lam], warm.as_deref(), cfg, false);
            warm = Some(r.qs.clone());
            Ok(r)
        },
        0,
        target,
        boundary,
        cfg,
    )?;
    Ok(settle(problem, bracket, 0, target))
}

fn to_point(problem: &Problem, run: Run, target: Vec<f64>, out_sizes: Vec<usize>) -> Result<RdPoint> {
    let table: Vec<f64> = if problem.blocks.len() == 1 {
        run.channels[0].clone()
    } else {
        // rows indexed (x, w): interleave block channels
        let mut t = Vec::with_capacity(problem.n_x * problem.blocks.len() * problem.n_y);
        for x in 0..problem.n_x {
            for ch in &run.channels {
                t.extend_from_slice(&ch[x * problem.n_y..(x + 1) * problem.n_y]);
            }
        }
        t
    };
    Ok(RdPoint {
        target,
        distortion: run.distortion,
        rate: run.rate,
        multipliers: run.lambda.iter().map(|l| l.is_finite().then_some(*l)).collect(),
        test_channel: ConditionalPmf::from_flat(out_sizes, &table)?,
    })
}

/// `R_X(D)` for a single-coordinate source.
pub fn ba_rate_distortion(p: &JointPmf, d: &DistortionSpec, target: f64, cfg: &BaConfig) -> Result<RdPoint> {
    if p.ndim() != 1 {
        return Err(Error::Shape(format!("expected a single-coordinate source, got {}", p.ndim())));
    }
    let problem = Problem::joint(p, d)?;
    let run = query_1d(&problem, target, cfg)?;
    to_point(&problem, run, vec![target], d.repro_sizes().to_vec())
}

/// `R_{X|W}(D)`; `pxw` has coordinates `(X, W)` and `d` holds the single
/// matrix for `X`.
pub fn ba_conditional_rd(pxw: &JointPmf, d: &DistortionSpec, target: f64, cfg: &BaConfig) -> Result<RdPoint> {
    let problem = Problem::conditional(pxw, d)?;
    let run = query_1d(&problem, target, cfg)?;
    to_point(&problem, run, vec![target], d.repro_sizes().to_vec())
}

/// `R_{X1 X2}(D1, D2)` for a two-coordinate source.
pub fn ba_joint_rd(p: &JointPmf, d: &DistortionSpec, target: (f64, f64), cfg: &BaConfig) -> Result<RdPoint> {
    if p.ndim() != 2 {
        return Err(Error::Shape(format!("expected a two-coordinate source, got {}", p.ndim())));
    }
    let (t1, t2) = target;
    if !(t1 >= 0.0 && t2 >= 0.0) {
        return Err(Error::Domain(format!("distortion targets ({t1}, {t2}) must be >= 0")));
    }
    let problem = Problem::joint(p, d)?;
    for (k, t) in [t1, t2].into_iter().enumerate() {
        let dmin = problem.min_distortion(k);
        if t < dmin - 1e-12 {
            return Err(Error::InfeasibleDistortion { target: t, min: dmin });
        }
    }
    let (dmax1, _) = problem.zero_rate(0);
    let (dmax2, _) = problem.zero_rate(1);
    let out_sizes = d.repro_sizes().to_vec();
    if t1 >= dmax1 - 1e-15 && t2 >= dmax2 - 1e-15 {
        let run = constant_joint(&problem, p, d)?;
        return to_point(&problem, run, vec![t1, t2], out_sizes);
    }
    if t1 <= problem.min_distortion(0) + 1e-15 && t2 <= problem.min_distortion(1) + 1e-15 {
        if let Some(run) = problem.min_distortion_run() {
            return to_point(&problem, run, vec![t1, t2], out_sizes);
        }
    }
    let boundary1 = t1 - problem.min_distortion(0) <= cfg.slack;
    let boundary2 = t2 - problem.min_distortion(1) <= cfg.slack;
    let mut warm: Option<Vec<Vec<f64>>> = None;
    let bracket = search_multiplier(
        |l1| {
            let inner = search_multiplier(
                |l2| {
                    let r = problem.run(&[l1, l2], warm.as_deref(), cfg, false);
                    warm = Some(r.qs.clone());
                    Ok(r)
                },
                1,
                t2,
                boundary2,
                cfg,
            )?;
            Ok(settle(&problem, inner, 1, t2))
        },
        0,
        t1,
        boundary1,
        cfg,
    )?;
    let run = settle(&problem, bracket, 0, t1);
    if run.distortion[0] > t1 + cfg.slack || run.distortion[1] > t2 + cfg.slack {
        return Err(Error::SweepResolution {
            target: vec![t1, t2],
            achieved: run.distortion.clone(),
        });
    }
    to_point(&problem, run, vec![t1, t2], out_sizes)
}

fn constant_joint(problem: &Problem, p: &JointPmf, d: &DistortionSpec) -> Result<Run> {
    // Best constant symbol per coordinate; the joint index of the pair.
    let mut symbols = Vec::new();
    for k in 0..2 {
        let marg = p.marginal_vec(k);
        let m = &d.matrices()[k];
        let best = (0..d.repro_sizes()[k])
            .map(|y| (y, marg.iter().enumerate().map(|(x, px)| px * m[x][y]).sum::<f64>()))
            .fold((0, f64::INFINITY), |a, v| if v.1 < a.1 { v } else { a })
            .0;
        symbols.push(best);
    }
    let y = symbols[0] * d.repro_sizes()[1] + symbols[1];
    Ok(problem.constant_run(&[vec![y]]))
}

/// Runs one alternating minimization per multiplier vector (independent,
/// so evaluated with `exec`), for sources with any number of coordinates.
/// Points come back in grid order; see [`lower_envelope`].
pub fn trace_rd_curve(
    p: &JointPmf,
    d: &DistortionSpec,
    multipliers: &[Vec<f64>],
    cfg: &BaConfig,
    exec: Exec,
) -> Result<Vec<RdPoint>> {
    if multipliers.is_empty() {
        return Err(Error::Shape("multiplier grid is empty".into()));
    }
    let problem = Problem::joint(p, d)?;
    if let Some(bad) = multipliers.iter().find(|m| m.len() != p.ndim() || m.iter().any(|v| !(*v >= 0.0))) {
        return Err(Error::Shape(format!("multiplier {bad:?} needs {} nonnegative entries", p.ndim())));
    }
    exec.map(multipliers, |lam| {
        let run = problem.run(lam, None, cfg, false);
        let target = run.distortion.clone();
        to_point(&problem, run, target, d.repro_sizes().to_vec())
    })
    .into_iter()
    .collect()
}

/// Lower envelope of single-coordinate sweep points: sorted by distortion,
/// keeping only points whose rate is below every point of smaller distortion.
pub fn lower_envelope(points: &[RdPoint]) -> Vec<RdPoint> {
    let mut sorted: Vec<&RdPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.distortion[0].total_cmp(&b.distortion[0]));
    let mut out: Vec<RdPoint> = Vec::new();
    for p in sorted {
        if out.last().is_none_or(|l| p.rate < l.rate) {
            out.push(p.clone());
        }
    }
    out
}

/// Objective trace of a single run, for monotonicity checks.
pub fn objective_trace(p: &JointPmf, d: &DistortionSpec, multipliers: &[f64], cfg: &BaConfig) -> Result<Vec<f64>> {
    let problem = Problem::joint(p, d)?;
    Ok(problem.run(multipliers, None, cfg, true).trace)
}

/// Rate of an arbitrary test channel `p_t(x_hat | x)` on a joint source,
/// with its expected distortions. Used to cross-check reported points.
pub fn evaluate_channel(p: &JointPmf, d: &DistortionSpec, channel: &ConditionalPmf) -> Result<(f64, Vec<f64>)> {
    let problem = Problem::joint(p, d)?;
    if channel.given_size != problem.n_x || channel.out_sizes != d.repro_sizes() {
        return Err(Error::Shape("channel does not match source and reproduction alphabets".into()));
    }
    let flat: Vec<f64> = channel.rows.iter().flat_map(|r| r.mass().to_vec()).collect();
    let channels = vec![flat];
    let dist = (0..problem.dist.len()).map(|k| problem.expected(k, &channels)).collect();
    Ok((problem.rate(&channels), dist))
}
