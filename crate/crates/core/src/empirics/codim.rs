use serde::{Deserialize, Serialize};

use super::{empirical_poset, SampleConfig, StratumHistogram};
use crate::affine_weyl::AffineWeylElt;
use crate::error::{Error, Result};
use crate::isocrystal::SlopeSeq;
use crate::strata::poset_of;

/// Codimension read off from how the frequency of a closed stratum scales with `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodimEstimate {
    pub x: AffineWeylElt,
    pub lam: SlopeSeq,
    pub primes: [u32; 2],
    /// Samples with slopes at most `lam`, per prime.
    pub hits: [u64; 2],
    /// Resolved samples per prime.
    pub resolved: [u64; 2],
    pub frequencies: [f64; 2],
    pub estimate: f64,
    /// Normal-approximation 95% interval.
    pub interval: [f64; 2],
    pub unresolved: [u64; 2],
}

const Z95: f64 = 1.96;

/// Estimates `codim((xI)_{≤λ} ⊆ xI)` from `trials` samples at each of `p1 < p2`.
pub fn estimate_codim(
    x: &AffineWeylElt,
    lam: &SlopeSeq,
    p1: u32,
    p2: u32,
    trials: u64,
    seed: u64,
) -> Result<CodimEstimate> {
    let pos = poset_of(x);
    if !pos.contains(lam) {
        return Err(Error::ElementsNotInPoset(lam.to_string()));
    }
    if *lam == pos.nu_x {
        return Err(Error::Config(
            "target must lie strictly below the generic slope".into(),
        ));
    }
    if p1 == p2 {
        return Err(Error::Config("the two primes must differ".into()));
    }
    let run = |p: u32| -> Result<StratumHistogram> {
        empirical_poset(x, &SampleConfig::coset(x, p, trials, seed)?)
    };
    let (h1, h2) = (run(p1)?, run(p2)?);
    let hits = [h1.count_leq(lam), h2.count_leq(lam)];
    let resolved = [h1.resolved(), h2.resolved()];
    for (i, p) in [p1, p2].into_iter().enumerate() {
        if hits[i] == 0 {
            return Err(Error::ZeroCount(p));
        }
    }
    let f = [0, 1].map(|i| hits[i] as f64 / resolved[i] as f64);
    let scale = (p2 as f64 / p1 as f64).ln();
    let estimate = (f[0] / f[1]).ln() / scale;
    // delta method: var(ln f) ≈ 1/k − 1/n
    let var: f64 = (0..2)
        .map(|i| 1.0 / hits[i] as f64 - 1.0 / resolved[i] as f64)
        .sum();
    let half = Z95 * var.max(0.0).sqrt() / scale;
    Ok(CodimEstimate {
        x: *x,
        lam: *lam,
        primes: [p1, p2],
        hits,
        resolved,
        frequencies: f,
        estimate,
        interval: [estimate - half, estimate + half],
        unresolved: [h1.unresolved, h2.unresolved],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_generic_slope() {
        let x: AffineWeylElt = "mu=-2,0,2;w=s121".parse().unwrap();
        let nu = poset_of(&x).nu_x;
        assert!(matches!(
            estimate_codim(&x, &nu, 11, 31, 10, 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn rejects_outside_poset() {
        let x: AffineWeylElt = "mu=-2,0,2;w=s121".parse().unwrap();
        let lam: SlopeSeq = "1/2,1/2,-1".parse().unwrap();
        assert!(matches!(
            estimate_codim(&x, &lam, 11, 31, 10, 0),
            Err(Error::ElementsNotInPoset(_))
        ));
    }

    #[test]
    fn zero_count_reported() {
        let x: AffineWeylElt = "mu=-2,0,2;w=s12".parse().unwrap();
        assert_eq!(
            estimate_codim(&x, &SlopeSeq::zero(), 11, 31, 3, 0),
            Err(Error::ZeroCount(11))
        );
    }

    #[test]
    fn rough_codimension_one() {
        let x: AffineWeylElt = "mu=-2,0,2;w=s121".parse().unwrap();
        let e = estimate_codim(&x, &SlopeSeq::zero(), 5, 13, 20_000, 11).unwrap();
        assert!((e.estimate - 1.0).abs() < 0.4, "{e:?}");
        assert!(e.interval[0] < e.estimate && e.estimate < e.interval[1]);
    }
}
