//! Distribution synthesis at small blocklength: a uniformly chosen codeword
//! `w^n` from a codebook of size `M` drives independent per-coordinate
//! channels, and the output law is compared with `p^n` by exact enumeration.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::common_info::CommonInfoSolution;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::prob::{Divergence, FactoredChannels, JointPmf};

/// Upper limit on `(prod |X_i|)^n * M` for exact enumeration.
pub const ENUMERATION_BUDGET: f64 = 5e7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodebookKind {
    /// Symbols drawn i.i.d. from `p(w)`.
    Random,
    /// Codewords spread evenly over the type class closest to `n p(w)`.
    TypeClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub m: usize,
    /// `m` codewords of length `n` over the `W` alphabet.
    pub codebook: Vec<Vec<usize>>,
    pub channels: FactoredChannels,
    pub kind: CodebookKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub n: usize,
    pub m: usize,
    /// Normalized divergence `(1/n) D(q^n || p^n)`, bits per symbol.
    pub delta: Divergence,
    pub method: String,
}

/// `ceil(2^(n R0))`, guarded against overflow of the enumeration budget.
pub fn codebook_size(n: usize, r0: f64) -> Result<usize> {
    if !(r0 >= 0.0 && r0.is_finite()) {
        return Err(Error::Domain(format!("common rate {r0} must be finite and >= 0")));
    }
    if n == 0 {
        return Err(Error::Domain("blocklength must be at least 1".into()));
    }
    let m = ((n as f64 * r0).exp2() - 1e-9).ceil().max(1.0);
    if m > ENUMERATION_BUDGET {
        return Err(Error::Budget {
            required: m,
            limit: ENUMERATION_BUDGET,
        });
    }
    Ok(m as usize)
}

fn check_budget(n: usize, m: usize, channels: &FactoredChannels) -> Result<()> {
    let symbols: f64 = channels.out_sizes().iter().map(|&s| s as f64).product();
    let required = symbols.powi(n as i32) * m as f64;
    if required > ENUMERATION_BUDGET {
        return Err(Error::Budget {
            required,
            limit: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

/// Random-coding generator: `M = ceil(2^(n R0))` codewords with symbols
/// drawn i.i.d. from the solution's `p(w)`.
pub fn build_generator(sol: &CommonInfoSolution, n: usize, r0: f64, seed: u64) -> Result<GeneratorSpec> {
    let m = codebook_size(n, r0)?;
    check_budget(n, m, &sol.channels)?;
    let dist = WeightedIndex::new(&sol.pw).map_err(|e| Error::InvalidPmf(format!("p(w): {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let codebook = (0..m).map(|_| (0..n).map(|_| dist.sample(&mut rng)).collect()).collect();
    Ok(GeneratorSpec {
        n,
        m,
        codebook,
        channels: sol.channels.clone(),
        kind: CodebookKind::Random,
        seed: Some(seed),
    })
}

/// Deterministic generator whose codewords all share the composition
/// closest to `n p(w)`, spaced evenly through that type class in
/// lexicographic order.
pub fn build_type_class_generator(sol: &CommonInfoSolution, n: usize, r0: f64) -> Result<GeneratorSpec> {
    let m = codebook_size(n, r0)?;
    check_budget(n, m, &sol.channels)?;
    let counts = nearest_composition(&sol.pw, n);
    let class = type_class(&counts, n);
    let codebook = (0..m).map(|j| class[j * class.len() / m].clone()).collect();
    Ok(GeneratorSpec {
        n,
        m,
        codebook,
        channels: sol.channels.clone(),
        kind: CodebookKind::TypeClass,
        seed: None,
    })
}

/// Largest-remainder rounding of `n p(w)` to integer counts summing to `n`.
fn nearest_composition(pw: &[f64], n: usize) -> Vec<usize> {
    let scaled: Vec<f64> = pw.iter().map(|p| p * n as f64).collect();
    let mut counts: Vec<usize> = scaled.iter().map(|s| s.floor() as usize).collect();
    let mut order: Vec<usize> = (0..pw.len()).collect();
    order.sort_by(|&a, &b| (scaled[b] - scaled[b].floor()).total_cmp(&(scaled[a] - scaled[a].floor())).then(a.cmp(&b)));
    let mut left = n - counts.iter().sum::<usize>();
    for &w in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[w] += 1;
        left -= 1;
    }
    counts
}

fn type_class(counts: &[usize], n: usize) -> Vec<Vec<usize>> {
    fn rec(counts: &mut [usize], prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for w in 0..counts.len() {
            if counts[w] > 0 {
                counts[w] -= 1;
                prefix.push(w);
                rec(counts, prefix, n, out);
                prefix.pop();
                counts[w] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut counts.to_vec(), &mut Vec::with_capacity(n), n, &mut out);
    out
}

/// `(1/n) sum_{x^n} q(x^n) log2(q(x^n) / p^n(x^n))` by exhaustive
/// enumeration, split over sequence prefixes for `exec`.
pub fn exact_delta(gen: &GeneratorSpec, p: &JointPmf, exec: Exec) -> Result<SynthesisResult> {
    if gen.channels.out_sizes() != p.alphabet_sizes() {
        return Err(Error::Shape(format!(
            "generator outputs {:?} but the source has alphabet sizes {:?}",
            gen.channels.out_sizes(),
            p.alphabet_sizes()
        )));
    }
    if gen.m == 0 || gen.codebook.len() != gen.m || gen.codebook.iter().any(|c| c.len() != gen.n) {
        return Err(Error::Shape("codebook must hold m codewords of length n".into()));
    }
    let k = gen.channels.cardinality();
    if gen.codebook.iter().flatten().any(|&w| w >= k) {
        return Err(Error::Shape(format!("codeword symbol outside the W alphabet of size {k}")));
    }
    check_budget(gen.n, gen.m, &gen.channels)?;
    let nx = p.len();
    // kernel[w][x] = prod_i p(x_i | w)
    let kernel: Vec<Vec<f64>> = (0..k).map(|w| gen.channels.row_product(w).map(|r| r.mass().to_vec())).collect::<Result<_>>()?;

    // Enumerate prefixes of length `depth` in parallel, the rest by DFS.
    let depth = (0..=gen.n).find(|&d| nx.pow(d as u32) >= 256).unwrap_or(gen.n);
    let prefixes = nx.pow(depth as u32);
    let parts: Vec<(f64, bool)> = exec.map_range(prefixes, |idx| {
        let mut prod = vec![1.0 / gen.m as f64; gen.m];
        let mut pn = 1.0;
        let mut rest = idx;
        for t in (0..depth).rev() {
            let x = rest % nx;
            rest /= nx;
            pn *= p.mass()[x];
            for (j, c) in gen.codebook.iter().enumerate() {
                prod[j] *= kernel[c[t]][x];
            }
        }
        let mut acc = 0.0;
        let mut infinite = false;
        let mut stack = vec![prod];
        dfs(gen, &kernel, p.mass(), depth, pn, &mut stack, &mut acc, &mut infinite);
        (acc, infinite)
    });
    let infinite = parts.iter().any(|p| p.1);
    let total: f64 = parts.iter().map(|p| p.0).sum();
    Ok(SynthesisResult {
        n: gen.n,
        m: gen.m,
        delta: if infinite {
            Divergence::Infinite
        } else {
            Divergence::Finite((total / gen.n as f64).max(0.0))
        },
        method: "exact".into(),
    })
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    gen: &GeneratorSpec,
    kernel: &[Vec<f64>],
    px: &[f64],
    t: usize,
    pn: f64,
    stack: &mut Vec<Vec<f64>>,
    acc: &mut f64,
    infinite: &mut bool,
) {
    let top = stack.last().expect("stack holds the current prefix");
    if t == gen.n {
        let q: f64 = top.iter().sum();
        if q > 0.0 {
            if pn <= 0.0 {
                *infinite = true;
            } else {
                *acc += q * (q / pn).log2();
            }
        }
        return;
    }
    if top.iter().all(|&v| v == 0.0) {
        return;
    }
    for (x, &pxv) in px.iter().enumerate() {
        let next: Vec<f64> = gen
            .codebook
            .iter()
            .zip(stack.last().unwrap())
            .map(|(c, v)| v * kernel[c[t]][x])
            .collect();
        stack.push(next);
        dfs(gen, kernel, px, t + 1, pn * pxv, stack, acc, infinite);
        stack.pop();
    }
}
