//! Exact results for the doubly symmetric binary source (Hamming distortion)
//! and the bivariate Gaussian source (squared error): rate-distortion
//! functions, common information, the common-rate quantity `C3` by
//! distortion region, and the Gray-Wyner rate allocations that attain it.
//!
//! Region predicates are closed sets tested in the order `*10, *11, *2, *3`;
//! a boundary point takes the first tag that matches. The rate functions are
//! continuous across every boundary, so the tie-break never changes a value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::h2;

/// Doubly symmetric binary source: uniform bit pair that disagrees with
/// probability `a0`, equivalently a common bit through two BSC(`a1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DsbsParams {
    pub a0: f64,
    pub a1: f64,
}

impl DsbsParams {
    pub fn from_a0(a0: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&a0) {
            return Err(Error::Domain(format!("a0 = {a0} must lie in [0, 1/2]")));
        }
        let a1 = (1.0 - (1.0 - 2.0 * a0).max(0.0).sqrt()) / 2.0;
        Ok(DsbsParams { a0, a1 })
    }

    pub fn from_a1(a1: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&a1) {
            return Err(Error::Domain(format!("a1 = {a1} must lie in [0, 1/2]")));
        }
        Ok(DsbsParams {
            a0: 2.0 * a1 * (1.0 - a1),
            a1,
        })
    }
}

/// Bivariate Gaussian source with correlation `rho`. Distortions passed to
/// the functions below are divided by the per-coordinate variances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussParams {
    pub rho: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// True when a negative correlation was reflected to `|rho|`.
    pub reflected: bool,
}

impl GaussParams {
    pub fn new(rho: f64) -> Result<Self> {
        Self::with_scales(rho, 1.0, 1.0)
    }

    pub fn with_scales(rho: f64, sigma1: f64, sigma2: f64) -> Result<Self> {
        if !(rho.abs() < 1.0) {
            return Err(Error::Domain(format!("|rho| = {} must be below 1", rho.abs())));
        }
        if !(sigma1 > 0.0 && sigma2 > 0.0 && sigma1.is_finite() && sigma2.is_finite()) {
            return Err(Error::Domain("standard deviations must be positive and finite".into()));
        }
        Ok(GaussParams {
            rho: rho.abs(),
            sigma1,
            sigma2,
            reflected: rho < 0.0,
        })
    }

    /// Distortions normalized to unit variance.
    fn normalize(&self, d1: f64, d2: f64) -> (f64, f64) {
        (d1 / (self.sigma1 * self.sigma1), d2 / (self.sigma2 * self.sigma2))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    E10,
    E11,
    E2,
    E3,
    D10,
    D11,
    D2,
    D3,
    #[serde(rename = "ZERO")]
    Zero,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::E10 => "E10",
            RegionLabel::E11 => "E11",
            RegionLabel::E2 => "E2",
            RegionLabel::E3 => "E3",
            RegionLabel::D10 => "D10",
            RegionLabel::D11 => "D11",
            RegionLabel::D2 => "D2",
            RegionLabel::D3 => "D3",
            RegionLabel::Zero => "ZERO",
        }
    }
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `C3` is known exactly outside the `*11` regions and only bracketed inside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum C3Value {
    Point { value: f64 },
    Bracket { lower: f64, upper: f64 },
}

impl C3Value {
    pub fn lower(self) -> f64 {
        match self {
            C3Value::Point { value } => value,
            C3Value::Bracket { lower, .. } => lower,
        }
    }

    pub fn upper(self) -> f64 {
        match self {
            C3Value::Point { value } => value,
            C3Value::Bracket { upper, .. } => upper,
        }
    }

    pub fn point(self) -> Option<f64> {
        match self {
            C3Value::Point { value } => Some(value),
            C3Value::Bracket { .. } => None,
        }
    }
}

fn check_distortions(d1: f64, d2: f64) -> Result<()> {
    if !(d1 >= 0.0 && d2 >= 0.0) {
        return Err(Error::Domain(format!("distortions ({d1}, {d2}) must be >= 0")));
    }
    Ok(())
}

/// `num / den`, reading a vanishing denominator as the limit from inside
/// the unit square.
fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num < 0.0 {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    }
}

// ---------------------------------------------------------------------------
// DSBS

pub fn dsbs_region(p: DsbsParams, d1: f64, d2: f64) -> Result<RegionLabel> {
    check_distortions(d1, d2)?;
    if d1 >= 0.5 && d2 >= 0.5 {
        return Ok(RegionLabel::Zero);
    }
    let (d1, d2) = (d1.min(0.5), d2.min(0.5));
    Ok(if d1 <= p.a1 && d2 <= p.a1 {
        RegionLabel::E10
    } else if d1 + d2 - 2.0 * d1 * d2 <= p.a0 {
        RegionLabel::E11
    } else if ratio(d1 - d2, 1.0 - 2.0 * d2).max(ratio(d2 - d1, 1.0 - 2.0 * d1)) <= p.a0 {
        RegionLabel::E2
    } else {
        RegionLabel::E3
    })
}

/// `1 + h(a0) - h(D1) - h(D2)`.
pub fn dsbs_rd_e1(a0: f64, d1: f64, d2: f64) -> f64 {
    1.0 + h2(a0) - h2(d1) - h2(d2)
}

/// `1 - (1-a0) h((D1+D2-a0) / (2(1-a0))) - a0 h((D1-D2+a0) / (2 a0))`.
pub fn dsbs_rd_e2(a0: f64, d1: f64, d2: f64) -> f64 {
    let mut r = 1.0 - (1.0 - a0) * h2((d1 + d2 - a0) / (2.0 * (1.0 - a0)));
    if a0 > 0.0 {
        r -= a0 * h2((d1 - d2 + a0) / (2.0 * a0));
    }
    r
}

/// `1 - h(min(D1, D2))`.
pub fn dsbs_rd_e3(d1: f64, d2: f64) -> f64 {
    1.0 - h2(d1.min(d2))
}

pub fn dsbs_marginal_rd(d: f64) -> f64 {
    1.0 - h2(d.min(0.5))
}

pub fn dsbs_joint_rd(p: DsbsParams, d1: f64, d2: f64) -> Result<f64> {
    let region = dsbs_region(p, d1, d2)?;
    let (d1, d2) = (d1.min(0.5), d2.min(0.5));
    Ok(match region {
        RegionLabel::E10 | RegionLabel::E11 => dsbs_rd_e1(p.a0, d1, d2),
        RegionLabel::E2 => dsbs_rd_e2(p.a0, d1, d2),
        RegionLabel::E3 => dsbs_rd_e3(d1, d2),
        _ => 0.0,
    }
    .max(0.0))
}

/// `H(X1, X2) - 2 h(a1) = 1 + h(a0) - 2 h(a1)`.
pub fn dsbs_common_info(p: DsbsParams) -> f64 {
    (1.0 + h2(p.a0) - 2.0 * h2(p.a1)).max(0.0)
}

pub fn dsbs_c3(p: DsbsParams, d1: f64, d2: f64) -> Result<C3Value> {
    Ok(match dsbs_region(p, d1, d2)? {
        RegionLabel::E10 => C3Value::Point {
            value: dsbs_common_info(p),
        },
        RegionLabel::E11 => C3Value::Bracket {
            lower: dsbs_common_info(p),
            upper: dsbs_joint_rd(p, d1, d2)?,
        },
        RegionLabel::Zero => C3Value::Point { value: 0.0 },
        _ => C3Value::Point {
            value: dsbs_joint_rd(p, d1, d2)?,
        },
    })
}

fn check_order(d: (f64, f64), dp: (f64, f64), cap: f64) -> Result<()> {
    let ok = d.0 <= dp.0 && d.1 <= dp.1 && dp.0 <= cap && dp.1 <= cap;
    if !ok {
        return Err(Error::Domain(format!(
            "allocation needs (D1, D2) <= (D1', D2') <= ({cap}, {cap}); got D = {d:?}, D' = {dp:?}"
        )));
    }
    Ok(())
}

/// `R0 = R_joint(D')`, `R_i = h(D_i') - h(D_i)`.
pub fn dsbs_allocation(p: DsbsParams, dp1: f64, dp2: f64, d1: f64, d2: f64) -> Result<(f64, f64, f64)> {
    check_distortions(d1, d2)?;
    check_order((d1, d2), (dp1, dp2), p.a1)?;
    Ok((dsbs_rd_e1(p.a0, dp1, dp2), h2(dp1) - h2(d1), h2(dp2) - h2(d2)))
}

// ---------------------------------------------------------------------------
// Gaussian

pub fn gauss_region(g: GaussParams, d1: f64, d2: f64) -> Result<RegionLabel> {
    check_distortions(d1, d2)?;
    let (d1, d2) = g.normalize(d1, d2);
    if d1 >= 1.0 && d2 >= 1.0 {
        return Ok(RegionLabel::Zero);
    }
    let (d1, d2) = (d1.min(1.0), d2.min(1.0));
    let rho = g.rho;
    Ok(if d1 <= 1.0 - rho && d2 <= 1.0 - rho {
        RegionLabel::D10
    } else if d1 + d2 - d1 * d2 <= 1.0 - rho * rho {
        RegionLabel::D11
    } else if ratio(1.0 - d1, 1.0 - d2).min(ratio(1.0 - d2, 1.0 - d1)) >= rho * rho {
        RegionLabel::D2
    } else {
        RegionLabel::D3
    })
}

/// `1/2 log2((1 - rho^2) / (D1 D2))`.
pub fn gauss_rd_d1(rho: f64, d1: f64, d2: f64) -> f64 {
    0.5 * ((1.0 - rho * rho) / (d1 * d2)).log2()
}

/// `1/2 log2((1 - rho^2) / (D1 D2 - (rho - sqrt((1-D1)(1-D2)))^2))`.
pub fn gauss_rd_d2(rho: f64, d1: f64, d2: f64) -> f64 {
    let s = rho - ((1.0 - d1) * (1.0 - d2)).max(0.0).sqrt();
    0.5 * ((1.0 - rho * rho) / (d1 * d2 - s * s)).log2()
}

/// `1/2 log2(1 / min(D1, D2))`.
pub fn gauss_rd_d3(d1: f64, d2: f64) -> f64 {
    -0.5 * d1.min(d2).log2()
}

pub fn gauss_marginal_rd(d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return if d == 0.0 { Err(Error::InfiniteRate) } else { Err(Error::Domain(format!("distortion {d} must be >= 0"))) };
    }
    Ok((-0.5 * d.log2()).max(0.0))
}

pub fn gauss_joint_rd(g: GaussParams, d1: f64, d2: f64) -> Result<f64> {
    let region = gauss_region(g, d1, d2)?;
    if region == RegionLabel::Zero {
        return Ok(0.0);
    }
    let (d1, d2) = g.normalize(d1, d2);
    if d1 == 0.0 || d2 == 0.0 {
        return Err(Error::InfiniteRate);
    }
    let (d1, d2) = (d1.min(1.0), d2.min(1.0));
    Ok(match region {
        RegionLabel::D10 | RegionLabel::D11 => gauss_rd_d1(g.rho, d1, d2),
        RegionLabel::D2 => gauss_rd_d2(g.rho, d1, d2),
        _ => gauss_rd_d3(d1, d2),
    }
    .max(0.0))
}

/// `1/2 log2((1 + rho) / (1 - rho))`.
pub fn gauss_common_info(g: GaussParams) -> f64 {
    0.5 * ((1.0 + g.rho) / (1.0 - g.rho)).log2()
}

/// Equicorrelated `N`-variate source: `1/2 log2(1 + N rho / (1 - rho))`.
pub fn gauss_common_info_n(g: GaussParams, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least two variables, got {n}")));
    }
    if g.reflected && n > 2 {
        return Err(Error::Domain("negative equicorrelation is not supported beyond two variables".into()));
    }
    Ok(0.5 * (1.0 + n as f64 * g.rho / (1.0 - g.rho)).log2())
}

pub fn gauss_c3(g: GaussParams, d1: f64, d2: f64) -> Result<C3Value> {
    Ok(match gauss_region(g, d1, d2)? {
        RegionLabel::D10 => C3Value::Point {
            value: gauss_common_info(g),
        },
        RegionLabel::D11 => C3Value::Bracket {
            lower: gauss_common_info(g),
            upper: gauss_joint_rd(g, d1, d2)?,
        },
        RegionLabel::Zero => C3Value::Point { value: 0.0 },
        _ => C3Value::Point {
            value: gauss_joint_rd(g, d1, d2)?,
        },
    })
}

/// `R0 = R_joint(D')`, `R_i = 1/2 log2(D_i' / D_i)`.
pub fn gauss_allocation(g: GaussParams, dp1: f64, dp2: f64, d1: f64, d2: f64) -> Result<(f64, f64, f64)> {
    check_distortions(d1, d2)?;
    let (dp1, dp2) = g.normalize(dp1, dp2);
    let (d1, d2) = g.normalize(d1, d2);
    check_order((d1, d2), (dp1, dp2), 1.0 - g.rho)?;
    if d1 == 0.0 || d2 == 0.0 {
        return Err(Error::InfiniteRate);
    }
    Ok((gauss_rd_d1(g.rho, dp1, dp2), 0.5 * (dp1 / d1).log2(), 0.5 * (dp2 / d2).log2()))
}

/// `R_{X_i|W}(D_i) = max(0, 1/2 log2((1 - rho) / D_i))` with `W` the
/// common Gaussian component.
pub fn gauss_conditional_rd(g: GaussParams, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!("distortion {d} must be > 0")));
    }
    Ok((0.5 * ((1.0 - g.rho) / d).log2()).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn dsbs() -> DsbsParams {
        DsbsParams::from_a1(0.1).unwrap()
    }

    fn gauss() -> GaussParams {
        GaussParams::new(0.5).unwrap()
    }

    #[test]
    fn dsbs_params_roundtrip() {
        let p = DsbsParams::from_a0(0.18).unwrap();
        assert_abs_diff_eq!(p.a1, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(2.0 * p.a1 * (1.0 - p.a1), 0.18, epsilon = 1e-12);
        assert!(DsbsParams::from_a0(0.6).is_err());
    }

    #[test]
    fn dsbs_examples() {
        let p = dsbs();
        assert_eq!(dsbs_region(p, 0.05, 0.05).unwrap(), RegionLabel::E10);
        assert_eq!(dsbs_region(p, 0.3, 0.3).unwrap(), RegionLabel::E2);
        assert_eq!(dsbs_region(p, 0.4, 0.01).unwrap(), RegionLabel::E3);
        assert_eq!(dsbs_region(p, 0.6, 0.6).unwrap(), RegionLabel::Zero);
        assert!(dsbs_region(p, -0.1, 0.2).is_err());

        assert_abs_diff_eq!(dsbs_joint_rd(p, 0.05, 0.05).unwrap(), 1.107283131496368, epsilon = 1e-12);
        assert_eq!(dsbs_joint_rd(p, 0.5, 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(dsbs_joint_rd(p, 0.4, 0.01).unwrap(), 0.919206864104089, epsilon = 1e-12);
        assert_abs_diff_eq!(dsbs_joint_rd(p, 0.3, 0.3).unwrap(), 0.146943790910072, epsilon = 1e-12);

        assert_abs_diff_eq!(dsbs_common_info(DsbsParams::from_a1(0.0).unwrap()), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dsbs_common_info(DsbsParams::from_a1(0.5).unwrap()), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dsbs_common_info(p), 0.742085858549717, epsilon = 1e-12);

        assert_abs_diff_eq!(dsbs_c3(p, 0.05, 0.05).unwrap().point().unwrap(), 0.742085858549717, epsilon = 1e-12);
        assert_eq!(dsbs_c3(p, 0.3, 0.3).unwrap().point().unwrap(), dsbs_joint_rd(p, 0.3, 0.3).unwrap());
        assert_eq!(dsbs_c3(p, 0.6, 0.6).unwrap(), C3Value::Point { value: 0.0 });
        let br = dsbs_c3(p, 0.12, 0.05).unwrap();
        assert!(matches!(br, C3Value::Bracket { .. }));
        assert!(br.lower() <= br.upper());
    }

    #[test]
    fn dsbs_allocation_examples() {
        let p = dsbs();
        let (r0, r1, r2) = dsbs_allocation(p, 0.1, 0.1, 0.05, 0.05).unwrap();
        assert_abs_diff_eq!(r0, 0.742085858549717, epsilon = 1e-12);
        assert_abs_diff_eq!(r1, 0.182598636473325, epsilon = 1e-12);
        assert_abs_diff_eq!(r2, r1, epsilon = 1e-15);
        let (_, r1, r2) = dsbs_allocation(p, 0.07, 0.04, 0.07, 0.04).unwrap();
        assert_eq!((r1, r2), (0.0, 0.0));
        assert!(dsbs_allocation(p, 0.05, 0.1, 0.06, 0.05).is_err());
        assert!(dsbs_allocation(p, 0.2, 0.1, 0.05, 0.05).is_err());
    }

    #[test]
    fn gauss_examples() {
        let g = gauss();
        assert_eq!(gauss_common_info(GaussParams::new(0.0).unwrap()), 0.0);
        assert_abs_diff_eq!(gauss_common_info(g), 0.792481250360578, epsilon = 1e-12);
        let scaled = GaussParams::with_scales(0.5, 3.0, 0.2).unwrap();
        assert_eq!(gauss_common_info(scaled), gauss_common_info(g));
        assert!(GaussParams::new(1.0).is_err());

        assert_abs_diff_eq!(gauss_common_info_n(g, 2).unwrap(), gauss_common_info(g), epsilon = 1e-15);
        assert_abs_diff_eq!(gauss_common_info_n(g, 3).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(gauss_common_info_n(GaussParams::new(0.0).unwrap(), 7).unwrap(), 0.0);
        assert!(gauss_common_info_n(g, 1).is_err());

        assert_eq!(gauss_region(g, 0.25, 0.25).unwrap(), RegionLabel::D10);
        assert_eq!(gauss_region(g, 0.9, 0.2).unwrap(), RegionLabel::D3);
        assert_eq!(gauss_region(g, 1.0, 1.0).unwrap(), RegionLabel::Zero);

        assert_abs_diff_eq!(gauss_joint_rd(g, 0.25, 0.25).unwrap(), 1.792481250360578, epsilon = 1e-12);
        assert_eq!(gauss_joint_rd(g, 1.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(gauss_joint_rd(g, 0.9, 0.2).unwrap(), 1.160964047443681, epsilon = 1e-12);
        assert_eq!(gauss_joint_rd(g, 0.0, 0.5), Err(Error::InfiniteRate));
        // variance scaling only rescales the distortion axes
        assert_abs_diff_eq!(gauss_joint_rd(scaled, 0.25 * 9.0, 0.25 * 0.04).unwrap(), 1.792481250360578, epsilon = 1e-12);

        assert_abs_diff_eq!(gauss_c3(g, 0.25, 0.25).unwrap().point().unwrap(), 0.792481250360578, epsilon = 1e-12);
        assert_eq!(gauss_c3(g, 2.0, 2.0).unwrap(), C3Value::Point { value: 0.0 });
        for i in 0..=50 {
            let d = 0.5 * i as f64 / 50.0;
            if d > 0.0 {
                assert_eq!(gauss_c3(g, d, d).unwrap().point().unwrap(), gauss_common_info(g));
            }
        }

        let (r0, r1, r2) = gauss_allocation(g, 0.5, 0.5, 0.25, 0.25).unwrap();
        assert_abs_diff_eq!(r0, 0.792481250360578, epsilon = 1e-12);
        assert_abs_diff_eq!(r1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r2, 0.5, epsilon = 1e-15);
        let (_, r1, r2) = gauss_allocation(g, 0.3, 0.4, 0.3, 0.4).unwrap();
        assert_eq!((r1, r2), (0.0, 0.0));
        assert!(gauss_allocation(g, 0.6, 0.5, 0.25, 0.25).is_err());

        assert_eq!(gauss_conditional_rd(g, 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(gauss_conditional_rd(g, 0.25).unwrap(), 0.5, epsilon = 1e-15);
        let g0 = GaussParams::new(0.0).unwrap();
        assert_abs_diff_eq!(gauss_conditional_rd(g0, 0.3).unwrap(), gauss_marginal_rd(0.3).unwrap(), epsilon = 1e-15);
        assert!(gauss_conditional_rd(g, 0.0).is_err());
    }

    #[test]
    fn negative_correlation_is_reflected() {
        let g = GaussParams::new(-0.5).unwrap();
        assert!(g.reflected);
        assert_eq!(gauss_common_info(g), gauss_common_info(gauss()));
        assert!(gauss_common_info_n(g, 3).is_err());
    }

    proptest! {
        #[test]
        fn dsbs_decompositions_on_e1(a1 in 0.01f64..0.49, u in 0.0f64..1.0, v in 0.0f64..1.0) {
            let p = DsbsParams::from_a1(a1).unwrap();
            let (d1, d2) = (u * a1, v * a1);
            let joint = dsbs_joint_rd(p, d1, d2).unwrap();
            // marginal sum minus mutual information
            let marg = dsbs_marginal_rd(d1) + dsbs_marginal_rd(d2) - (1.0 - h2(p.a0));
            prop_assert!((marg - joint).abs() < 1e-12);
            // conditional rates given the common bit plus C
            let cond = (h2(a1) - h2(d1)) + (h2(a1) - h2(d2));
            prop_assert!((cond + dsbs_common_info(p) - joint).abs() < 1e-12);
        }

        #[test]
        fn gauss_decompositions_on_d10(rho in 0.0f64..0.95, u in 0.01f64..1.0, v in 0.01f64..1.0) {
            let g = GaussParams::new(rho).unwrap();
            let (d1, d2) = (u * (1.0 - rho), v * (1.0 - rho));
            let joint = gauss_joint_rd(g, d1, d2).unwrap();
            let cond = gauss_conditional_rd(g, d1).unwrap() + gauss_conditional_rd(g, d2).unwrap();
            prop_assert!((cond + gauss_common_info(g) - joint).abs() < 1e-12);
            let mi = -0.5 * (1.0 - rho * rho).log2();
            let marg = gauss_marginal_rd(d1).unwrap() + gauss_marginal_rd(d2).unwrap() - mi;
            prop_assert!((marg - joint).abs() < 1e-12);
        }

        #[test]
        fn gauss_rate_above_common_info_below_diagonal(rho in 0.0f64..0.95, u in 0.01f64..1.0, v in 0.01f64..1.0) {
            let (d1, d2) = (u * 2.0 * (1.0 - rho), v * 2.0 * (1.0 - rho));
            prop_assume!(d1 + d2 <= 2.0 * (1.0 - rho));
            let c = gauss_common_info(GaussParams::new(rho).unwrap());
            prop_assert!(gauss_rd_d1(rho, d1, d2) >= c - 1e-12);
        }

        #[test]
        fn regions_are_a_partition(a1 in 0.0f64..0.5, rho in 0.0f64..0.99, d1 in 0.0f64..1.0, d2 in 0.0f64..1.0) {
            let r = dsbs_region(DsbsParams::from_a1(a1).unwrap(), d1, d2).unwrap();
            prop_assert!(matches!(r, RegionLabel::E10 | RegionLabel::E11 | RegionLabel::E2 | RegionLabel::E3 | RegionLabel::Zero));
            let r = gauss_region(GaussParams::new(rho).unwrap(), d1, d2).unwrap();
            prop_assert!(matches!(r, RegionLabel::D10 | RegionLabel::D11 | RegionLabel::D2 | RegionLabel::D3 | RegionLabel::Zero));
        }

        #[test]
        fn allocations_sum_to_joint_rate(a1 in 0.01f64..0.49, s in 0.0f64..1.0, t in 0.0f64..1.0, u in 0.0f64..1.0, v in 0.0f64..1.0) {
            let p = DsbsParams::from_a1(a1).unwrap();
            let (dp1, dp2) = (s * a1, t * a1);
            let (d1, d2) = (u * dp1, v * dp2);
            let (r0, r1, r2) = dsbs_allocation(p, dp1, dp2, d1, d2).unwrap();
            prop_assert!((r0 + r1 + r2 - dsbs_joint_rd(p, d1, d2).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn dsbs_branches_agree_on_boundaries() {
        for a1 in [0.05, 0.1, 0.2, 0.3] {
            let p = DsbsParams::from_a1(a1).unwrap();
            // E11 / E2 boundary: D1 + D2 - 2 D1 D2 = a0
            for i in 1..200 {
                let d1 = p.a0 * i as f64 / 200.0;
                let d2 = (p.a0 - d1) / (1.0 - 2.0 * d1);
                let e1 = dsbs_rd_e1(p.a0, d1, d2);
                let e2 = dsbs_rd_e2(p.a0, d1, d2);
                assert!((e1 - e2).abs() < 1e-9, "a1={a1} d=({d1},{d2}) {e1} {e2}");
            }
            // E2 / E3 boundary: (D2 - D1) / (1 - 2 D1) = a0
            for i in 0..200 {
                let d1 = 0.5 * i as f64 / 200.0;
                let d2 = d1 + p.a0 * (1.0 - 2.0 * d1);
                let e2 = dsbs_rd_e2(p.a0, d1, d2);
                let e3 = dsbs_rd_e3(d1, d2);
                assert!((e2 - e3).abs() < 1e-9, "a1={a1} d=({d1},{d2}) {e2} {e3}");
            }
        }
    }
}
