use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::slopes::{newton_polygon, polygon_slopes3, SlopeSeq, Q};
use super::IsoMatrix;
use crate::error::{Error, Result};
use crate::series::{Series, Valuation};

const RANDOM_ATTEMPTS: usize = 32;
const CYCLIC_SEED: u64 = 0x5eed_c1c1;

/// Which vector served as cyclic vector for the characteristic polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CyclicVector {
    E1,
    E2,
    E3,
    Random([u32; 3]),
}

/// Monic σ-polynomial `σ³ + ασ² + βσ + γ` annihilating the cyclic vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharPoly3 {
    pub alpha: Series,
    pub beta: Series,
    pub gamma: Series,
    pub cyclic_vector: CyclicVector,
}

impl CharPoly3 {
    pub fn slopes(&self) -> Result<SlopeSeq> {
        polygon_slopes3(
            self.alpha.valuation(),
            self.beta.valuation(),
            self.gamma.valuation(),
        )
    }
}

/// Monic σ-polynomial `σ² + α₁σ + γ₁` of a 2×2 block with `e1` cyclic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharPoly2 {
    pub alpha1: Series,
    pub gamma1: Series,
}

fn entries3(a: &IsoMatrix) -> Result<[&Series; 9]> {
    if a.dim() != 3 {
        return Err(Error::Dimension(format!(
            "expected 3x3, got {0}x{0}",
            a.dim()
        )));
    }
    let e = a.entries();
    Ok([
        &e[0], &e[1], &e[2], &e[3], &e[4], &e[5], &e[6], &e[7], &e[8],
    ])
}

/// The coefficient `D` of `e1 ∧ Φe1 ∧ Φ²e1`; `e1` is cyclic iff it is nonzero.
pub fn wedge_d(a: &IsoMatrix) -> Result<Series> {
    let [_, _, _, d, e, f, g, h, i] = entries3(a)?;
    Ok(d.frobenius(1) * (d * h - e * g) + g.frobenius(1) * (d * i - f * g))
}

/// Coefficients with `e1` as cyclic vector, or `None` when `D` vanishes to precision.
fn charpoly_e1(m: &IsoMatrix) -> Result<Option<(Series, Series, Series)>> {
    let [a, b, c, d, e, f, g, h, i] = entries3(m)?;
    let dd = wedge_d(m)?;
    if dd.is_zero() {
        return Ok(None);
    }
    let dinv = dd.inv()?;
    let s = |x: &Series| x.frobenius(1);
    let s2 = |x: &Series| x.frobenius(2);
    let dh_eg = d * h - e * g;
    let di_fg = d * i - f * g;
    let u = s2(d) * s(e) + s2(g) * s(f);
    let v = s2(d) * s(h) + s2(g) * s(i);
    let alpha = -s2(a) - &dinv * (u * &dh_eg + v * &di_fg);
    let ratio = s(&dd) * &dinv;
    let beta =
        -(s(a) * &alpha + s2(a) * s(a) + s2(d) * s(b) + s2(g) * s(c)) + &ratio * (e * i - f * h);
    let gamma = -(ratio * m.det());
    Ok(Some((alpha, beta, gamma)))
}

fn candidates() -> Vec<CyclicVector> {
    let mut out = vec![CyclicVector::E1, CyclicVector::E2, CyclicVector::E3];
    let mut rng = ChaCha8Rng::seed_from_u64(CYCLIC_SEED);
    for _ in 0..RANDOM_ATTEMPTS {
        // coordinates are drawn as nonzero residues below 2^16 and reduced later
        let v = [0; 3].map(|_: u32| rng.random_range(1..=u16::MAX as u32));
        out.push(CyclicVector::Random(v));
    }
    out
}

fn in_basis(a: &IsoMatrix, cand: &CyclicVector) -> Result<Option<IsoMatrix>> {
    let p = a.modulus();
    Ok(Some(match cand {
        CyclicVector::E1 => a.clone(),
        CyclicVector::E2 => a.permute_basis(&[1, 0, 2]),
        CyclicVector::E3 => a.permute_basis(&[2, 1, 0]),
        CyclicVector::Random(v) => {
            let v: Vec<i64> = v.iter().map(|&x| (x % p) as i64).collect();
            if v.contains(&0) {
                return Ok(None);
            }
            let m = IsoMatrix::constant(
                p,
                a.prec(),
                &[vec![v[0], 0, 0], vec![v[1], 1, 0], vec![v[2], 0, 1]],
            )?;
            m.inverse()?.try_mul(a)?.try_mul(&m)?
        }
    }))
}

fn reduce(cand: &CyclicVector, p: u32) -> CyclicVector {
    match cand {
        CyclicVector::Random(v) => CyclicVector::Random(v.map(|x| x % p)),
        c => c.clone(),
    }
}

/// Characteristic σ-polynomial of a 3×3 operator.
///
/// Tries `e1`, then `e2` and `e3`, then a fixed sequence of random vectors.
pub fn charpoly3(a: &IsoMatrix) -> Result<CharPoly3> {
    charpoly3_where(a, |_| true)
}

fn charpoly3_where(a: &IsoMatrix, mut accept: impl FnMut(&CharPoly3) -> bool) -> Result<CharPoly3> {
    for cand in candidates() {
        let Some(m) = in_basis(a, &cand)? else {
            continue;
        };
        if let Some((alpha, beta, gamma)) = charpoly_e1(&m)? {
            let cp = CharPoly3 {
                alpha,
                beta,
                gamma,
                cyclic_vector: reduce(&cand, a.modulus()),
            };
            if accept(&cp) {
                return Ok(cp);
            }
        }
    }
    Err(Error::NoCyclicVectorFound)
}

/// Characteristic σ-polynomial of a 2×2 operator with `e1` cyclic.
pub fn charpoly2(m: &IsoMatrix) -> Result<CharPoly2> {
    if m.dim() != 2 {
        return Err(Error::Dimension(format!(
            "expected 2x2, got {0}x{0}",
            m.dim()
        )));
    }
    let (a, c, d) = (m.get(0, 0), m.get(1, 0), m.get(1, 1));
    if c.is_zero() {
        return Err(Error::NotCyclic);
    }
    let ratio = c.frobenius(1) * c.inv()?;
    let alpha1 = -(a.frobenius(1) + &ratio * d);
    let gamma1 = ratio * m.det();
    Ok(CharPoly2 { alpha1, gamma1 })
}

/// A coordinate subspace stable under the operator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockShape {
    pub sub: Vec<usize>,
}

impl BlockShape {
    pub fn quotient(&self) -> Vec<usize> {
        (0..3).filter(|i| !self.sub.contains(i)).collect()
    }
}

fn is_block(a: &IsoMatrix, sub: &[usize]) -> bool {
    (0..3)
        .filter(|i| !sub.contains(i))
        .all(|i| sub.iter().all(|&j| a.get(i, j).is_zero()))
}

/// Finds a stable coordinate subspace of size 1 or 2, judged by entries zero to precision.
pub fn detect_block_shape(a: &IsoMatrix) -> Option<BlockShape> {
    if a.dim() != 3 {
        return None;
    }
    const SUBS: [&[usize]; 6] = [&[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2]];
    SUBS.iter()
        .find(|s| is_block(a, s))
        .map(|s| BlockShape { sub: s.to_vec() })
}

fn exact_val(s: &Series) -> Result<i32> {
    match s.valuation() {
        Valuation::Exact(v) => Ok(v),
        Valuation::AtLeast(n) => Err(Error::InsufficientPrecision {
            needed: n + 1,
            prec: n,
        }),
    }
}

/// Slopes of the principal block on the given coordinates (one or two of them).
pub fn block_slopes(a: &IsoMatrix, idx: &[usize]) -> Result<Vec<Q>> {
    match idx {
        [i] => Ok(vec![Q::from_integer(-exact_val(a.get(*i, *i))? as i64)]),
        [i, j] => {
            let mut m = a.submatrix(&[*i, *j])?;
            if m.get(1, 0).is_zero() {
                if m.get(0, 1).is_zero() {
                    let mut v = vec![
                        Q::from_integer(-exact_val(m.get(0, 0))? as i64),
                        Q::from_integer(-exact_val(m.get(1, 1))? as i64),
                    ];
                    v.sort_by(|x, y| y.cmp(x));
                    return Ok(v);
                }
                m = m.permute_basis(&[1, 0]);
            }
            let cp = charpoly2(&m)?;
            let poly = newton_polygon(&[
                Valuation::Exact(0),
                cp.alpha1.valuation(),
                cp.gamma1.valuation(),
            ])?;
            Ok(poly.slopes)
        }
        _ => Err(Error::Dimension(format!("block of size {}", idx.len()))),
    }
}

/// Slopes of a block upper-triangular operator: the stable block and the quotient block merged.
pub fn split_slopes(a: &IsoMatrix, shape: &BlockShape) -> Result<SlopeSeq> {
    if a.dim() != 3 || shape.sub.is_empty() || shape.sub.len() > 2 || !is_block(a, &shape.sub) {
        return Err(Error::ShapeMismatch);
    }
    let mut v = block_slopes(a, &shape.sub)?;
    v.extend(block_slopes(a, &shape.quotient())?);
    SlopeSeq::sorted([v[0], v[1], v[2]])
}

/// Newton slope sequence of a 3×3 operator with `val det = 0`.
pub fn slope_sequence(a: &IsoMatrix) -> Result<SlopeSeq> {
    entries3(a)?;
    a.check_det_unit()?;
    if let Some(shape) = detect_block_shape(a) {
        return split_slopes(a, &shape);
    }
    // a later cyclic vector may lose less precision in D
    let mut last = Error::NoCyclicVectorFound;
    let found = charpoly3_where(a, |cp| match cp.slopes() {
        Ok(_) => true,
        Err(e) => {
            last = e;
            false
        }
    });
    match found {
        Ok(cp) => cp.slopes(),
        Err(Error::NoCyclicVectorFound) => Err(last),
        Err(e) => Err(e),
    }
}

/// The sufficient condition `α ∈ P^{-λ1}` and `β ∈ P^{λ3}` for slopes at most `lam`.
pub fn order_criterion(cp: &CharPoly3, lam: &SlopeSeq) -> Result<bool> {
    Ok(cp.alpha.in_power_q(-lam.l1())? && cp.beta.in_power_q(lam.l3())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isocrystal::slopes::{q, qi};

    const P: u32 = 11;
    const PREC: i32 = 30;

    fn m3(rows: &[[&[(i32, i64)]; 3]; 3]) -> IsoMatrix {
        let rows: Vec<Vec<Vec<(i32, i64)>>> = rows
            .iter()
            .map(|r| r.iter().map(|t| t.to_vec()).collect())
            .collect();
        IsoMatrix::from_terms(P, PREC, &rows).unwrap()
    }

    fn sl(s: &str) -> SlopeSeq {
        s.parse().unwrap()
    }

    #[test]
    fn diagonal_slopes() {
        let a = m3(&[
            [&[(-1, 1)], &[], &[]],
            [&[], &[(0, 1)], &[]],
            [&[], &[], &[(1, 1)]],
        ]);
        assert_eq!(slope_sequence(&a).unwrap(), sl("1,0,-1"));
    }

    #[test]
    fn cycle_and_half_slopes() {
        let a = m3(&[
            [&[], &[], &[(-1, 1)]],
            [&[(0, 1)], &[], &[]],
            [&[], &[(1, 1)], &[]],
        ]);
        let s = slope_sequence(&a).unwrap();
        assert_eq!(s, SlopeSeq::new(qi(0), qi(0), qi(0)).unwrap());
        let b = m3(&[
            [&[], &[(-1, 1)], &[]],
            [&[(0, 1)], &[], &[(0, 1)]],
            [&[], &[], &[(1, 1)]],
        ]);
        assert_eq!(
            slope_sequence(&b).unwrap(),
            SlopeSeq::new(q(1, 2), q(1, 2), qi(-1)).unwrap()
        );
    }

    #[test]
    fn split_example() {
        let a = m3(&[
            [&[], &[], &[(-1, 1)]],
            [&[], &[(0, 1)], &[]],
            [&[(1, 1)], &[], &[]],
        ]);
        assert_eq!(detect_block_shape(&a).unwrap().sub, vec![1]);
        assert_eq!(slope_sequence(&a).unwrap(), SlopeSeq::zero());
    }

    #[test]
    fn cyclic_fallback_to_other_basis_vectors() {
        // e1 spans a stable line, so it is not cyclic
        let a = m3(&[
            [&[(0, 1)], &[(0, 1)], &[]],
            [&[], &[(1, 1)], &[(0, 1)]],
            [&[], &[(0, 1)], &[]],
        ]);
        let cp = charpoly3(&a).unwrap();
        assert_ne!(cp.cyclic_vector, CyclicVector::E1);
        assert!(detect_block_shape(&a).is_some());
        assert_eq!(cp.slopes().unwrap(), slope_sequence(&a).unwrap());
    }

    #[test]
    fn charpoly_matches_trace_minors_det() {
        let a = m3(&[
            [&[(-1, 2), (0, 3)], &[(0, 1)], &[(1, 5)]],
            [&[(0, 7)], &[(0, 1), (2, 1)], &[(-1, 1)]],
            [&[(1, 1)], &[(0, 4)], &[(0, 1)]],
        ]);
        let cp = charpoly3(&a).unwrap();
        let g = |i, j| a.get(i, j).clone();
        let tr = g(0, 0) + g(1, 1) + g(2, 2);
        let minors = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) + g(0, 0) * g(2, 2) - g(0, 2) * g(2, 0)
            + g(1, 1) * g(2, 2)
            - g(1, 2) * g(2, 1);
        let prec = cp
            .alpha
            .prec()
            .min(cp.beta.prec())
            .min(cp.gamma.prec())
            .min(10);
        assert_eq!(cp.alpha.truncate(prec), (-tr).truncate(prec));
        assert_eq!(cp.beta.truncate(prec), minors.truncate(prec));
        assert_eq!(cp.gamma.truncate(prec), (-a.det()).truncate(prec));
    }

    #[test]
    fn charpoly2_of_swap() {
        let m = IsoMatrix::from_terms(
            P,
            PREC,
            &[vec![vec![], vec![(-1, 1)]], vec![vec![(1, 1)], vec![]]],
        )
        .unwrap();
        let cp = charpoly2(&m).unwrap();
        assert!(cp.alpha1.is_zero());
        assert_eq!(cp.gamma1.valuation(), Valuation::Exact(0));
        let n = IsoMatrix::from_terms(
            P,
            PREC,
            &[vec![vec![(0, 1)], vec![]], vec![vec![], vec![(0, 1)]]],
        )
        .unwrap();
        assert_eq!(charpoly2(&n), Err(Error::NotCyclic));
    }

    #[test]
    fn determinant_must_be_a_unit() {
        let a = m3(&[
            [&[(1, 1)], &[], &[]],
            [&[], &[(0, 1)], &[]],
            [&[], &[], &[(0, 1)]],
        ]);
        assert_eq!(slope_sequence(&a), Err(Error::DeterminantValuation(1)));
    }

    #[test]
    fn order_criterion_on_dense_matrix() {
        let a = m3(&[
            [&[(-1, 1)], &[], &[(0, 1)]],
            [&[(0, 1)], &[(0, 1)], &[]],
            [&[], &[(0, 1)], &[(1, 1)]],
        ]);
        assert!(detect_block_shape(&a).is_none());
        let cp = charpoly3(&a).unwrap();
        let lam = slope_sequence(&a).unwrap();
        assert_eq!(lam, sl("1,0,-1"));
        assert!(order_criterion(&cp, &lam).unwrap());
        assert!(!order_criterion(&cp, &SlopeSeq::zero()).unwrap());
    }
}
