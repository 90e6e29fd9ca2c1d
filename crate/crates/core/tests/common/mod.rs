#![allow(dead_code)]

use newton_strata::affine_weyl::{coset_pattern, AffineWeylElt, PatternKind, ValuationPattern};
use newton_strata::empirics::{sample_pattern, SampleConfig};
use newton_strata::isocrystal::{charpoly3, slope_sequence, IsoMatrix};
use newton_strata::series::{Series, Valuation};
use newton_strata::strata::poset_of;
use newton_strata::{Error, Result};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const P: u32 = 11;
pub const PREC: i32 = 40;

pub type Check = std::result::Result<(), TestCaseError>;

pub fn arb_series(prec: i32) -> impl Strategy<Value = Series> {
    (-3i32..4, proptest::collection::vec(0u32..P, 0..12)).prop_map(move |(start, mut c)| {
        c.resize((prec - start) as usize, 0);
        Series::from_dense(P, start, c, prec)
    })
}

fn from_grid(bound: i32) -> impl Strategy<Value = AffineWeylElt> {
    let g = AffineWeylElt::grid(bound);
    (0..g.len()).prop_map(move |i| g[i])
}

pub fn arb_elt() -> impl Strategy<Value = AffineWeylElt> {
    from_grid(3)
}

pub fn arb_small_elt() -> impl Strategy<Value = AffineWeylElt> {
    from_grid(1)
}

/// A sample of `xI` at precision `prec`.
pub fn coset_sample(x: &AffineWeylElt, seed: u64, prec: i32) -> IsoMatrix {
    let pattern = coset_pattern(x, PatternKind::XI).unwrap();
    let cfg = SampleConfig::new(P, prec, 1, seed, pattern, 1).unwrap();
    sample_pattern(&cfg, 0)
}

pub fn iwahori_sample(seed: u64, prec: i32) -> IsoMatrix {
    let cfg = SampleConfig::new(P, prec, 1, seed, ValuationPattern::iwahori(), 1).unwrap();
    sample_pattern(&cfg, 0)
}

/// `None` when the working precision ran out; any other error is a bug.
pub fn resolved<T>(r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(Error::InsufficientPrecision { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

pub fn check_valuation_axioms(a: &Series, b: &Series) -> Check {
    if let (Valuation::Exact(va), Valuation::Exact(vb)) = (a.valuation(), b.valuation()) {
        if let Valuation::Exact(v) = (a * b).valuation() {
            prop_assert_eq!(v, va + vb);
        }
        let s = (a + b).valuation();
        prop_assert!(s.lower_bound() >= va.min(vb));
        if va != vb {
            prop_assert_eq!(s, Valuation::Exact(va.min(vb)));
        }
    }
    Ok(())
}

pub fn check_frobenius_is_a_ring_map(a: &Series, b: &Series, e: u32) -> Check {
    prop_assert_eq!((a * b).frobenius(e), a.frobenius(e) * b.frobenius(e));
    prop_assert_eq!((a + b).frobenius(e), a.frobenius(e) + b.frobenius(e));
    Ok(())
}

pub fn check_sigma_conjugation_keeps_slopes(
    x: &AffineWeylElt,
    seed: u64,
    y: &AffineWeylElt,
) -> Check {
    let a = coset_sample(x, seed, PREC);
    let g = y
        .matrix_rep(P, PREC)
        .try_mul(&iwahori_sample(seed ^ 1, PREC))
        .unwrap();
    let Some(before) = resolved(slope_sequence(&a)) else {
        return Ok(());
    };
    let Some(after) = resolved(slope_sequence(&a.sigma_conjugate(&g).unwrap())) else {
        return Ok(());
    };
    prop_assert_eq!(before, after);
    Ok(())
}

pub fn check_unit_scaling_keeps_slopes(
    x: &AffineWeylElt,
    seed: u64,
    c: i64,
    d: i64,
    e: i64,
) -> Check {
    let a = coset_sample(x, seed, PREC);
    let u = Series::from_terms(P, &[(0, c), (1, d), (3, e)], PREC).unwrap();
    let ua = IsoMatrix::new(3, a.entries().iter().map(|e| &u * e).collect()).unwrap();
    let Some(before) = resolved(slope_sequence(&a)) else {
        return Ok(());
    };
    let Some(after) = resolved(slope_sequence(&ua)) else {
        return Ok(());
    };
    prop_assert_eq!(before, after);
    Ok(())
}

pub fn check_gamma_is_a_unit(x: &AffineWeylElt, seed: u64) -> Check {
    let a = coset_sample(x, seed, PREC);
    let Some(cp) = resolved(charpoly3(&a)) else {
        return Ok(());
    };
    prop_assert_eq!(cp.gamma.valuation(), Valuation::Exact(0));
    Ok(())
}

pub fn check_poset_is_ranked(x: &AffineWeylElt) -> Check {
    prop_assert!(poset_of(x).poset.is_ranked());
    Ok(())
}
