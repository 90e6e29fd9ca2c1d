mod common;

use common::*;
use newton_strata::affine_weyl::{
    base_point, coset_pattern, phi_matrix, AffineWeylElt, PatternKind, Perm, ValuationPattern,
};
use newton_strata::isocrystal::{
    charpoly3, newton_polygon, order_criterion, qi, slope_sequence, wedge_d, IsoMatrix, SlopeSeq,
};
use newton_strata::series::{Series, Valuation};
use newton_strata::strata::{enumerate_ng, poset_of};
use proptest::prelude::*;

/// Extends `s` with extra zero coefficients up to `prec`.
fn widen(s: &Series, prec: i32) -> Series {
    let terms: Vec<(i32, i64)> = s.terms().map(|(e, c)| (e, c as i64)).collect();
    Series::from_terms(P, &terms, prec).unwrap()
}

fn det3(c: [[Series; 3]; 3]) -> Series {
    &c[0][0] * (&c[1][1] * &c[2][2] - &c[1][2] * &c[2][1])
        - &c[0][1] * (&c[1][0] * &c[2][2] - &c[1][2] * &c[2][0])
        + &c[0][2] * (&c[1][0] * &c[2][1] - &c[1][1] * &c[2][0])
}

/// `Φ(v) = A·σ(v)` on column vectors.
fn apply(a: &IsoMatrix, v: &[Series; 3]) -> [Series; 3] {
    let s: Vec<Series> = v.iter().map(|x| x.frobenius(1)).collect();
    [0, 1, 2].map(|i| a.get(i, 0) * &s[0] + a.get(i, 1) * &s[1] + a.get(i, 2) * &s[2])
}

macro_rules! skip_on_precision {
    ($e:expr) => {
        match resolved($e) {
            Some(v) => v,
            None => return Ok(()),
        }
    };
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 1000,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn valuation_axioms(a in arb_series(PREC), b in arb_series(PREC)) {
        check_valuation_axioms(&a, &b)?;
    }

    #[test]
    fn inverse_gives_one(a in arb_series(PREC)) {
        if let Ok(inv) = a.inv() {
            let one = &a * &inv;
            prop_assert_eq!(one.clone(), Series::one(P, one.prec()));
        }
    }

    #[test]
    fn frobenius_is_a_ring_map(a in arb_series(PREC), b in arb_series(PREC), e in 1u32..4) {
        check_frobenius_is_a_ring_map(&a, &b, e)?;
    }

    #[test]
    fn precision_soundness(a in arb_series(20), b in arb_series(20)) {
        let (wa, wb) = (widen(&a, 30), widen(&b, 30));
        let lo = &a * &b;
        prop_assert_eq!(lo.clone(), (&wa * &wb).truncate(lo.prec()));
        let lo = &a + &b;
        prop_assert_eq!(lo.clone(), (&wa + &wb).truncate(lo.prec()));
        if let Ok(lo) = a.inv() {
            prop_assert_eq!(lo.clone(), wa.inv().unwrap().truncate(lo.prec()));
        }
    }

    #[test]
    fn sigma_conjugation_keeps_slopes(x in arb_elt(), seed in any::<u64>(), y in arb_small_elt()) {
        check_sigma_conjugation_keeps_slopes(&x, seed, &y)?;
    }

    #[test]
    fn unit_scaling_keeps_slopes(x in arb_elt(), seed in any::<u64>(), c in 1i64..P as i64, d in 0i64..P as i64, e in 0i64..P as i64) {
        check_unit_scaling_keeps_slopes(&x, seed, c, d, e)?;
    }

    #[test]
    fn cyclic_vector_wedge(x in arb_elt(), seed in any::<u64>()) {
        let a = coset_sample(&x, seed, PREC);
        let p = PREC;
        let e1 = [Series::one(P, p), Series::zero(P, p), Series::zero(P, p)];
        let f1 = apply(&a, &e1);
        let f2 = apply(&a, &f1);
        let cols = [0, 1, 2].map(|i| [e1[i].clone(), f1[i].clone(), f2[i].clone()]);
        let oracle = det3(cols);
        let d = wedge_d(&a).unwrap();
        let prec = d.prec().min(oracle.prec());
        prop_assert_eq!(d.truncate(prec), oracle.truncate(prec));
    }

    #[test]
    fn gamma_is_a_unit_and_polygon_closes(x in arb_elt(), seed in any::<u64>()) {
        check_gamma_is_a_unit(&x, seed)?;
        let a = coset_sample(&x, seed, PREC);
        let cp = skip_on_precision!(charpoly3(&a));
        let poly = skip_on_precision!(newton_polygon(&[
            Valuation::Exact(0),
            cp.alpha.valuation(),
            cp.beta.valuation(),
            cp.gamma.valuation(),
        ]));
        prop_assert_eq!(poly.vertices.first().copied(), Some((0, qi(0))));
        prop_assert_eq!(poly.vertices.last().copied(), Some((3, qi(0))));
    }

    #[test]
    fn order_criterion_matches_slopes(x in arb_elt(), seed in any::<u64>(), k in 0usize..64) {
        let a = coset_sample(&x, seed, PREC);
        let pos = poset_of(&x);
        let lam = pos.elements()[k % pos.elements().len()];
        let cp = skip_on_precision!(charpoly3(&a));
        let s = skip_on_precision!(cp.slopes());
        let crit = skip_on_precision!(order_criterion(&cp, &lam));
        prop_assert_eq!(crit, s.leq(&lam));
    }

    #[test]
    fn posets_are_ranked(x in arb_elt()) {
        check_poset_is_ranked(&x)?;
    }

    #[test]
    fn tau_conjugation_fixes_iwahori(seed in any::<u64>()) {
        let i = iwahori_sample(seed, PREC);
        let c = phi_matrix(&i).unwrap();
        prop_assert!(ValuationPattern::iwahori().contains(&c).unwrap());
    }

    #[test]
    fn representative_times_iwahori_in_coset(x in arb_elt(), seed in any::<u64>()) {
        let a = x.matrix_rep(P, PREC).try_mul(&iwahori_sample(seed, PREC)).unwrap();
        prop_assert!(coset_pattern(&x, PatternKind::XI).unwrap().contains(&a).unwrap());
    }

    #[test]
    fn sampled_slopes_lie_in_poset(x in arb_elt(), seed in any::<u64>()) {
        let a = coset_sample(&x, seed, PREC);
        let s = skip_on_precision!(slope_sequence(&a));
        prop_assert!(poset_of(&x).contains(&s));
        prop_assert!(s.leq(&x.neg_mu_dom()));
    }
}

#[test]
fn slope_threshold_arithmetic() {
    let all = enumerate_ng(qi(6));
    for lam in &all {
        for mu in &all {
            let [m1, m2, m3] = mu.parts();
            if m1 + m3 <= lam.l3() {
                let lhs = (m2 - lam.l1()).ceil();
                assert!(lhs >= lam.l3().ceil(), "{lam} {mu}");
            }
        }
    }
}

#[test]
fn simple_reflections_change_length_by_one() {
    let s0 = AffineWeylElt::new([-1, 0, 1], Perm::S121).unwrap();
    assert_eq!(s0.length(), 1);
    let simples = [
        AffineWeylElt::simple(Perm::S1),
        AffineWeylElt::simple(Perm::S2),
        s0,
    ];
    for x in AffineWeylElt::grid(4) {
        for s in &simples {
            let d = x.compose(s).length() as i64 - x.length() as i64;
            assert_eq!(d.abs(), 1, "{x} {s}");
        }
    }
}

#[test]
fn chamber_images() {
    for x in AffineWeylElt::grid(4) {
        let c = x.chamber().0;
        assert_eq!(
            x.psi().chamber().0,
            Perm::S121.compose(c).compose(Perm::S121),
            "{x}"
        );
        let q = x.act_point(base_point());
        let far = [(0, 1), (1, 2), (0, 2)]
            .iter()
            .all(|&(i, j)| q[i] - q[j] > qi(2) || q[i] - q[j] < qi(-2));
        if far {
            assert_eq!(x.phi().chamber().0, Perm::S12.compose(c), "{x}");
        }
    }
}

#[test]
fn slope_text_round_trip() {
    for l in enumerate_ng(qi(4)) {
        let back: SlopeSeq = l.to_string().parse().unwrap();
        assert_eq!(back, l);
        let json = serde_json::to_string(&l).unwrap();
        assert_eq!(serde_json::from_str::<SlopeSeq>(&json).unwrap(), l);
    }
}
