//! Probability tensors over finite alphabets and the information functionals
//! built on them. Everything is measured in bits.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Sums within this distance of one are renormalized on ingest.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// `x log2 x` with the `0 log 0 = 0` convention.
#[inline]
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Entropy of a flat probability vector, bits.
pub(crate) fn entropy_of(mass: &[f64]) -> f64 {
    -mass.iter().map(|&m| xlog2x(m)).sum::<f64>()
}

/// Binary entropy without range checks; arguments are clamped to `[0, 1]`.
#[inline]
pub fn h2(a: f64) -> f64 {
    let a = a.clamp(0.0, 1.0);
    -(xlog2x(a) + xlog2x(1.0 - a))
}

/// Joint probability mass function of `N` finite-alphabet coordinates,
/// stored flat in row-major order (last coordinate varies fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SourceDoc", into = "SourceDoc")]
pub struct JointPmf {
    sizes: Vec<usize>,
    mass: Vec<f64>,
}

/// On-disk form of a [`JointPmf`]: `{ "alphabet_sizes": [..], "pmf": [..] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceDoc {
    pub alphabet_sizes: Vec<usize>,
    pub pmf: Vec<f64>,
}

impl TryFrom<SourceDoc> for JointPmf {
    type Error = Error;
    fn try_from(doc: SourceDoc) -> Result<Self> {
        JointPmf::new(doc.alphabet_sizes, doc.pmf)
    }
}

impl From<JointPmf> for SourceDoc {
    fn from(p: JointPmf) -> Self {
        SourceDoc {
            alphabet_sizes: p.sizes,
            pmf: p.mass,
        }
    }
}

impl JointPmf {
    pub fn new(sizes: Vec<usize>, mut mass: Vec<f64>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidPmf("no coordinates".into()));
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidPmf(format!("alphabet size of coordinate {i} is zero")));
        }
        let expected: usize = sizes.iter().product();
        if mass.len() != expected {
            return Err(Error::InvalidPmf(format!(
                "expected {expected} entries for alphabet sizes {sizes:?}, found {}",
                mass.len()
            )));
        }
        if let Some(i) = mass.iter().position(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidPmf(format!("entry {i} is {} (must be finite and >= 0)", mass[i])));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidPmf(format!("entries sum to {total}, not 1")));
        }
        mass.iter_mut().for_each(|m| *m /= total);
        Ok(JointPmf { sizes, mass })
    }

    /// Two-coordinate pmf from a row-major matrix `p[x1][x2]`.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Shape("ragged probability matrix".into()));
        }
        JointPmf::new(vec![rows.len(), n_cols], rows.concat())
    }

    /// Product of independent factors, one vector per coordinate.
    pub fn product(factors: &[Vec<f64>]) -> Result<Self> {
        let sizes: Vec<usize> = factors.iter().map(Vec::len).collect();
        let n: usize = sizes.iter().product();
        let mut mass = vec![1.0; n];
        let mut stride = n;
        for f in factors {
            let size = f.len();
            stride /= size.max(1);
            for (idx, m) in mass.iter_mut().enumerate() {
                *m *= f[(idx / stride) % size];
            }
        }
        JointPmf::new(sizes, mass)
    }

    pub fn uniform(sizes: Vec<usize>) -> Result<Self> {
        let n: usize = sizes.iter().product();
        JointPmf::new(sizes, vec![1.0 / n.max(1) as f64; n])
    }

    /// Point mass at the given outcome.
    pub fn point(sizes: Vec<usize>, at: &[usize]) -> Result<Self> {
        let n: usize = sizes.iter().product();
        let mut mass = vec![0.0; n];
        let tmp = JointPmf {
            sizes: sizes.clone(),
            mass: vec![0.0; n],
        };
        mass[tmp.index(at)] = 1.0;
        JointPmf::new(sizes, mass)
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn ndim(&self) -> usize {
        self.sizes.len()
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.sizes.len()];
        for i in (0..self.sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.sizes[i + 1];
        }
        strides
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(self.strides())
            .map(|(c, s)| c * s)
            .sum()
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for i in (0..self.sizes.len()).rev() {
            out[i] = idx % self.sizes[i];
            idx /= self.sizes[i];
        }
        out
    }

    pub fn get(&self, coords: &[usize]) -> f64 {
        self.mass[self.index(coords)]
    }

    /// Single-coordinate marginal as a plain vector.
    pub fn marginal_vec(&self, coord: usize) -> Vec<f64> {
        let strides = self.strides();
        let size = self.sizes[coord];
        let mut out = vec![0.0; size];
        for (idx, &m) in self.mass.iter().enumerate() {
            out[(idx / strides[coord]) % size] += m;
        }
        out
    }

    pub fn total_variation(&self, other: &JointPmf) -> Result<f64> {
        if self.sizes != other.sizes {
            return Err(Error::Shape(format!("{:?} vs {:?}", self.sizes, other.sizes)));
        }
        Ok(0.5 * self.mass.iter().zip(&other.mass).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }

    /// Reorders coordinates: coordinate `k` of the result is coordinate
    /// `order[k]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.ndim()];
        if order.len() != self.ndim() || order.iter().any(|&o| o >= self.ndim() || std::mem::replace(&mut seen[o], true)) {
            return Err(Error::Shape(format!("{order:?} is not a permutation of {} coordinates", self.ndim())));
        }
        let sizes: Vec<usize> = order.iter().map(|&o| self.sizes[o]).collect();
        let mut out = JointPmf {
            sizes,
            mass: vec![0.0; self.len()],
        };
        for (idx, &m) in self.mass.iter().enumerate() {
            let c = self.coords(idx);
            let permuted: Vec<usize> = order.iter().map(|&o| c[o]).collect();
            let j = out.index(&permuted);
            out.mass[j] = m;
        }
        Ok(out)
    }

    /// Hex SHA-256 over the alphabet sizes and the little-endian mass bytes.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for s in &self.sizes {
            hasher.update((*s as u64).to_le_bytes());
        }
        for m in &self.mass {
            hasher.update(m.to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

pub fn entropy(p: &JointPmf) -> f64 {
    entropy_of(&p.mass)
}

pub fn binary_entropy(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain(format!("binary entropy argument {a} outside [0, 1]")));
    }
    Ok(h2(a))
}

fn normalized_set(keep: &[usize], ndim: usize) -> Result<Vec<usize>> {
    let mut set = keep.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        return Err(Error::Shape("coordinate set is empty".into()));
    }
    if let Some(&bad) = set.iter().find(|&&c| c >= ndim) {
        return Err(Error::Shape(format!("coordinate {bad} out of range for {ndim} coordinates")));
    }
    Ok(set)
}

/// Marginal over the coordinates in `keep` (taken in increasing order).
pub fn marginalize(p: &JointPmf, keep: &[usize]) -> Result<JointPmf> {
    let keep = normalized_set(keep, p.ndim())?;
    let sizes: Vec<usize> = keep.iter().map(|&k| p.sizes[k]).collect();
    let strides = p.strides();
    let n_out: usize = sizes.iter().product();
    let mut out = vec![0.0; n_out];
    for (idx, &m) in p.mass.iter().enumerate() {
        let mut j = 0;
        for &k in &keep {
            j = j * p.sizes[k] + (idx / strides[k]) % p.sizes[k];
        }
        out[j] += m;
    }
    JointPmf::new(sizes, out)
}

/// `I(X_A; X_B)` where `B` is the complement of `group_a`.
pub fn mutual_information(p: &JointPmf, group_a: &[usize]) -> Result<f64> {
    let a = normalized_set(group_a, p.ndim())?;
    if a.len() == p.ndim() {
        return Err(Error::Shape("group must be a proper subset of the coordinates".into()));
    }
    let b: Vec<usize> = (0..p.ndim()).filter(|c| !a.contains(c)).collect();
    let ha = entropy(&marginalize(p, &a)?);
    let hb = entropy(&marginalize(p, &b)?);
    Ok((ha + hb - entropy(p)).max(0.0))
}

/// Outcome of a divergence computation: finite, or infinite because `q`
/// charges an outcome that `p` does not.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn finite(self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(v),
            Divergence::Infinite => None,
        }
    }
}

pub(crate) fn kl_of(q: &[f64], p: &[f64]) -> Divergence {
    let mut acc = 0.0;
    for (&qi, &pi) in q.iter().zip(p) {
        if qi > 0.0 {
            if pi <= 0.0 {
                return Divergence::Infinite;
            }
            acc += qi * (qi / pi).log2();
        }
    }
    Divergence::Finite(acc.max(0.0))
}

/// `D(q || p)` in bits.
pub fn kl_divergence(q: &JointPmf, p: &JointPmf) -> Result<Divergence> {
    if q.sizes != p.sizes {
        return Err(Error::Shape(format!("{:?} vs {:?}", q.sizes, p.sizes)));
    }
    Ok(kl_of(&q.mass, &p.mass))
}

/// Conditional distribution: one joint pmf over the output coordinates for
/// each value of the conditioning variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPmf {
    pub given_size: usize,
    pub out_sizes: Vec<usize>,
    pub rows: Vec<JointPmf>,
}

impl ConditionalPmf {
    pub fn new(out_sizes: Vec<usize>, rows: Vec<JointPmf>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Shape("conditional pmf needs at least one row".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.sizes != out_sizes) {
            return Err(Error::Shape(format!("row {i} has sizes {:?}, expected {out_sizes:?}", rows[i].sizes)));
        }
        Ok(ConditionalPmf {
            given_size: rows.len(),
            out_sizes,
            rows,
        })
    }

    /// Builds from a flat row-major table `t[given * n_out + out]`. Rows of
    /// all zeros (unreachable inputs) are replaced by uniform rows.
    pub fn from_flat(out_sizes: Vec<usize>, table: &[f64]) -> Result<Self> {
        let n_out: usize = out_sizes.iter().product();
        if n_out == 0 || !table.len().is_multiple_of(n_out) {
            return Err(Error::Shape("table length is not a multiple of the output size".into()));
        }
        let rows = table
            .chunks(n_out)
            .map(|row| {
                let s: f64 = row.iter().sum();
                if s > 0.0 {
                    JointPmf::new(out_sizes.clone(), row.iter().map(|v| v / s).collect())
                } else {
                    JointPmf::uniform(out_sizes.clone())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        ConditionalPmf::new(out_sizes, rows)
    }
}

/// Per-coordinate channels `p(x_i | w)` of a conditionally independent
/// decomposition: `channels[i][w][x_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactoredChannels {
    pub channels: Vec<Vec<Vec<f64>>>,
}

impl FactoredChannels {
    pub fn new(channels: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let k = channels.first().map_or(0, Vec::len);
        if k == 0 {
            return Err(Error::Shape("channels need at least one coordinate and one w".into()));
        }
        for (i, ch) in channels.iter().enumerate() {
            if ch.len() != k {
                return Err(Error::Shape(format!("coordinate {i} has {} rows, expected {k}", ch.len())));
            }
            let size = ch[0].len();
            for (w, row) in ch.iter().enumerate() {
                let s: f64 = row.iter().sum();
                if row.len() != size || row.iter().any(|v| !v.is_finite() || *v < 0.0) || (s - 1.0).abs() > NORMALIZATION_TOLERANCE {
                    return Err(Error::InvalidPmf(format!("channel row (coordinate {i}, w {w}) is not a distribution")));
                }
            }
        }
        Ok(FactoredChannels { channels })
    }

    pub fn cardinality(&self) -> usize {
        self.channels[0].len()
    }

    pub fn out_sizes(&self) -> Vec<usize> {
        self.channels.iter().map(|c| c[0].len()).collect()
    }

    /// Row `w` as the product pmf `prod_i p(x_i | w)`.
    pub fn row_product(&self, w: usize) -> Result<JointPmf> {
        let factors: Vec<Vec<f64>> = self.channels.iter().map(|c| c[w].clone()).collect();
        JointPmf::product(&factors)
    }

    pub fn to_conditional(&self) -> Result<ConditionalPmf> {
        let rows = (0..self.cardinality())
            .map(|w| self.row_product(w))
            .collect::<Result<Vec<_>>>()?;
        ConditionalPmf::new(self.out_sizes(), rows)
    }
}

/// `sum_w p(w) prod_i p(x_i | w)`.
pub fn mix_channels(pw: &[f64], channels: &FactoredChannels) -> Result<JointPmf> {
    if pw.len() != channels.cardinality() {
        return Err(Error::Shape(format!(
            "{} weights for {} channel rows",
            pw.len(),
            channels.cardinality()
        )));
    }
    let total: f64 = pw.iter().sum();
    if pw.iter().any(|v| !v.is_finite() || *v < 0.0) || (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::InvalidPmf("mixture weights are not a distribution".into()));
    }
    let sizes = channels.out_sizes();
    let mass = mixture_mass(pw, &channels.channels, &sizes);
    JointPmf::new(sizes, mass)
}

/// Raw mixture tensor without validation; shared with the optimizers.
pub(crate) fn mixture_mass(pw: &[f64], channels: &[Vec<Vec<f64>>], sizes: &[usize]) -> Vec<f64> {
    let n: usize = sizes.iter().product();
    let mut mass = vec![0.0; n];
    let mut component = vec![0.0; n];
    for (w, &weight) in pw.iter().enumerate() {
        if weight == 0.0 {
            continue;
        }
        component.iter_mut().for_each(|c| *c = weight);
        let mut stride = n;
        for (i, ch) in channels.iter().enumerate() {
            stride /= sizes[i];
            let row = &ch[w];
            for (idx, c) in component.iter_mut().enumerate() {
                *c *= row[(idx / stride) % sizes[i]];
            }
        }
        mass.iter_mut().zip(&component).for_each(|(m, c)| *m += c);
    }
    mass
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn dsbs(a0: f64) -> JointPmf {
        JointPmf::from_matrix(&[vec![(1.0 - a0) / 2.0, a0 / 2.0], vec![a0 / 2.0, (1.0 - a0) / 2.0]]).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(entropy(&JointPmf::uniform(vec![4]).unwrap()), 2.0, epsilon = 1e-15);
        assert_eq!(entropy(&JointPmf::point(vec![3, 2], &[1, 1]).unwrap()), 0.0);
        let bern = JointPmf::new(vec![2], vec![0.9, 0.1]).unwrap();
        assert_abs_diff_eq!(entropy(&bern), 0.468995593589281, epsilon = 1e-12);
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.18).unwrap(), 0.680077045728280, epsilon = 1e-12);
        assert!(binary_entropy(1.2).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let prod = JointPmf::product(&[vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        assert_abs_diff_eq!(mutual_information(&prod, &[0]).unwrap(), 0.0, epsilon = 1e-12);
        let copy = JointPmf::from_matrix(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert_abs_diff_eq!(mutual_information(&copy, &[0]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mutual_information(&dsbs(0.18), &[0]).unwrap(), 0.319922954271720, epsilon = 1e-12);
        assert!(mutual_information(&copy, &[]).is_err());
        assert!(mutual_information(&copy, &[0, 1]).is_err());
    }

    #[test]
    fn kl_examples() {
        let p = dsbs(0.18);
        assert_eq!(kl_divergence(&p, &p).unwrap(), Divergence::Finite(0.0));
        let u = JointPmf::uniform(vec![2, 2]).unwrap();
        let d = kl_divergence(&u, &p).unwrap().finite().unwrap();
        assert_abs_diff_eq!(d, 0.380117686744527, epsilon = 1e-12);
        let q = JointPmf::uniform(vec![2]).unwrap();
        let pt = JointPmf::new(vec![2], vec![1.0, 0.0]).unwrap();
        assert_eq!(kl_divergence(&q, &pt).unwrap(), Divergence::Infinite);
    }

    #[test]
    fn marginalize_examples() {
        let m = marginalize(&dsbs(0.18), &[0]).unwrap();
        assert_abs_diff_eq!(m.mass()[0], 0.5, epsilon = 1e-15);
        let prod = JointPmf::product(&[vec![0.3, 0.7], vec![0.1, 0.5, 0.4]]).unwrap();
        let m0 = marginalize(&prod, &[0]).unwrap();
        assert_abs_diff_eq!(m0.mass()[1], 0.7, epsilon = 1e-15);
        assert_eq!(marginalize(&prod, &[1, 0]).unwrap(), prod);
        assert!(marginalize(&prod, &[]).is_err());
    }

    #[test]
    fn mix_channels_examples() {
        let single = FactoredChannels::new(vec![vec![vec![0.2, 0.8]], vec![vec![0.5, 0.25, 0.25]]]).unwrap();
        let mixed = mix_channels(&[1.0], &single).unwrap();
        let prod = JointPmf::product(&[vec![0.2, 0.8], vec![0.5, 0.25, 0.25]]).unwrap();
        assert!(mixed.total_variation(&prod).unwrap() < 1e-15);

        let a1 = 0.1;
        let bsc = vec![vec![1.0 - a1, a1], vec![a1, 1.0 - a1]];
        let ch = FactoredChannels::new(vec![bsc.clone(), bsc.clone()]).unwrap();
        let m = mix_channels(&[0.5, 0.5], &ch).unwrap();
        assert!(m.total_variation(&dsbs(0.18)).unwrap() < 1e-15);

        let ch3 = FactoredChannels::new(vec![bsc.clone(), bsc.clone(), bsc]).unwrap();
        let m3 = mix_channels(&[0.5, 0.5], &ch3).unwrap();
        assert_abs_diff_eq!(m3.get(&[0, 0, 0]), 0.365, epsilon = 1e-15);
        assert_abs_diff_eq!(m3.get(&[0, 0, 1]), 0.045, epsilon = 1e-15);

        assert!(mix_channels(&[1.0], &ch).is_err());
    }

    #[test]
    fn ingest_tolerance() {
        let p = JointPmf::new(vec![2], vec![0.5, 0.5 + 5e-10]).unwrap();
        assert_abs_diff_eq!(p.mass().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert!(JointPmf::new(vec![2], vec![0.5, 0.5 + 1e-8]).is_err());
        assert!(JointPmf::new(vec![2], vec![1.1, -0.1]).is_err());
        assert!(JointPmf::new(vec![2, 2], vec![1.0]).is_err());
    }

    fn random_pmf(sizes: Vec<usize>) -> impl Strategy<Value = JointPmf> {
        let n: usize = sizes.iter().product();
        prop::collection::vec(0.0f64..1.0, n).prop_filter_map("degenerate", move |raw| {
            let s: f64 = raw.iter().sum();
            (s > 1e-3).then(|| JointPmf::new(sizes.clone(), raw.iter().map(|v| v / s).collect()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn chain_rule_identity(p in random_pmf(vec![2, 3, 2])) {
            let a = [0usize, 2];
            let i = mutual_information(&p, &a).unwrap();
            let ha = entropy(&marginalize(&p, &a).unwrap());
            let hb = entropy(&marginalize(&p, &[1]).unwrap());
            prop_assert!((i - (ha + hb - entropy(&p))).abs() < 1e-10);
        }

        #[test]
        fn kl_nonnegative_and_zero_only_at_equality(q in random_pmf(vec![3, 2]), p in random_pmf(vec![3, 2])) {
            let d = kl_divergence(&q, &p).unwrap();
            match d {
                Divergence::Finite(v) => {
                    prop_assert!(v >= 0.0);
                    let close = q.mass().iter().zip(p.mass()).all(|(a, b)| (a - b).abs() <= 1e-12);
                    if !close {
                        prop_assert!(v > 0.0);
                    }
                }
                Divergence::Infinite => prop_assert!(p.mass().contains(&0.0)),
            }
            prop_assert_eq!(kl_divergence(&p, &p).unwrap(), Divergence::Finite(0.0));
        }

        #[test]
        fn mix_marginal_consistency(w in 0.0f64..1.0, a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0, d in 0.0f64..1.0) {
            let ch = FactoredChannels::new(vec![
                vec![vec![a, 1.0 - a], vec![b, 1.0 - b]],
                vec![vec![c, 1.0 - c], vec![d, 1.0 - d]],
            ]).unwrap();
            let m = mix_channels(&[w, 1.0 - w], &ch).unwrap();
            let m0 = marginalize(&m, &[0]).unwrap();
            prop_assert!((m0.mass()[0] - (w * a + (1.0 - w) * b)).abs() < 1e-12);
            let m1 = marginalize(&m, &[1]).unwrap();
            prop_assert!((m1.mass()[0] - (w * c + (1.0 - w) * d)).abs() < 1e-12);
        }

        #[test]
        fn marginalization_commutes(p in random_pmf(vec![2, 3, 2])) {
            let twice = marginalize(&marginalize(&p, &[0, 1]).unwrap(), &[0]).unwrap();
            let once = marginalize(&p, &[0]).unwrap();
            prop_assert!(twice.total_variation(&once).unwrap() < 1e-12);
        }
    }
}
