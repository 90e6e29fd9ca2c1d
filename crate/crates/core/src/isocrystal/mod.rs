//! σ-linear operators on 2- and 3-dimensional isocrystals over `GF(p)((t))`.

mod charpoly;
mod slopes;

pub use charpoly::{
    block_slopes, charpoly2, charpoly3, detect_block_shape, order_criterion, slope_sequence,
    split_slopes, wedge_d, BlockShape, CharPoly2, CharPoly3, CyclicVector,
};
pub use slopes::{
    dominated, fmt_q, newton_polygon, parse_q, polygon_slopes3, q, qi, slope_leq, NewtonPolygon,
    SlopeSeq, Q,
};

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::series::Series;

/// Square matrix of truncated series acting as `x ↦ A·σ(x)`.
///
/// Entries share a modulus and a working precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoMatrix {
    n: usize,
    entries: Vec<Series>,
}

impl IsoMatrix {
    /// Row-major construction; entries are truncated to their common precision.
    pub fn new(n: usize, entries: Vec<Series>) -> Result<Self> {
        if !(n == 2 || n == 3) {
            return Err(Error::Dimension(format!("unsupported size {n}")));
        }
        if entries.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        let p = entries[0].modulus();
        if let Some(e) = entries.iter().find(|e| e.modulus() != p) {
            return Err(Error::ModulusMismatch(p, e.modulus()));
        }
        let prec = entries.iter().map(Series::prec).min().unwrap();
        let entries = entries
            .into_iter()
            .map(|e| if e.prec() > prec { e.truncate(prec) } else { e })
            .collect();
        Ok(IsoMatrix { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Series>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows of unequal length".into()));
        }
        IsoMatrix::new(n, rows.into_iter().flatten().collect())
    }

    /// Matrix with entries given as `(exponent, coefficient)` term lists.
    pub fn from_terms(p: u32, prec: i32, rows: &[Vec<Vec<(i32, i64)>>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|t| Series::from_terms(p, t, prec))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        IsoMatrix::from_rows(rows)
    }

    /// Parses rows separated by `;` or newlines with entries separated by `,`,
    /// each entry in series text form such as `t^-1 + 3*t`.
    pub fn parse(text: &str, p: u32, default_prec: i32) -> Result<Self> {
        let rows = text
            .split([';', '\n'])
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .map(|r| {
                r.split(',')
                    .map(|e| Series::parse(e.trim(), p, default_prec))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.is_empty() {
            return Err(Error::Parse("empty matrix".into()));
        }
        IsoMatrix::from_rows(rows)
    }

    pub fn identity(p: u32, n: usize, prec: i32) -> Self {
        let entries = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    Series::one(p, prec)
                } else {
                    Series::zero(p, prec)
                }
            })
            .collect();
        IsoMatrix { n, entries }
    }

    /// Constant matrix with integer entries reduced mod `p`.
    pub fn constant(p: u32, prec: i32, rows: &[Vec<i64>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&c| Series::monomial(p, c, 0, prec)).collect())
            .collect();
        IsoMatrix::from_rows(rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u32 {
        self.entries[0].modulus()
    }

    pub fn prec(&self) -> i32 {
        self.entries[0].prec()
    }

    pub fn get(&self, i: usize, j: usize) -> &Series {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Series] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Series>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn truncate(&self, prec: i32) -> Self {
        IsoMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e.truncate(prec)).collect(),
        }
    }

    pub fn try_mul(&self, o: &IsoMatrix) -> Result<IsoMatrix> {
        if self.n != o.n {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.n, self.n, o.n, o.n
            )));
        }
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.get(i, 0).try_mul(o.get(0, j))?;
                for k in 1..n {
                    acc = acc.try_add(&self.get(i, k).try_mul(o.get(k, j))?)?;
                }
                out.push(acc);
            }
        }
        IsoMatrix::new(n, out)
    }

    pub fn det(&self) -> Series {
        let g = |i, j| self.get(i, j);
        match self.n {
            2 => g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0),
            _ => {
                g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                    - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                    + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
            }
        }
    }

    /// Inverse through the adjugate.
    pub fn inverse(&self) -> Result<IsoMatrix> {
        let dinv = self.det().inv()?;
        let n = self.n;
        let g = |i: usize, j: usize| self.get(i, j);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // adj[i][j] = (-1)^{i+j} minor(j, i)
                let c = if n == 2 {
                    g(1 - j, 1 - i).clone()
                } else {
                    let r: Vec<usize> = (0..3).filter(|&r| r != j).collect();
                    let s: Vec<usize> = (0..3).filter(|&s| s != i).collect();
                    g(r[0], s[0]) * g(r[1], s[1]) - g(r[0], s[1]) * g(r[1], s[0])
                };
                let c = if (i + j) % 2 == 1 { -c } else { c };
                out.push(c * &dinv);
            }
        }
        IsoMatrix::new(n, out)
    }

    pub fn transpose(&self) -> IsoMatrix {
        let n = self.n;
        let entries = (0..n * n).map(|k| self.get(k % n, k / n).clone()).collect();
        IsoMatrix { n, entries }
    }

    /// Entrywise Frobenius iterated `e` times.
    pub fn frobenius(&self, e: u32) -> IsoMatrix {
        IsoMatrix {
            n: self.n,
            entries: self.entries.iter().map(|x| x.frobenius(e)).collect(),
        }
    }

    /// The matrix `g·A·σ(g)⁻¹` representing the same operator in the basis changed by `g`.
    pub fn sigma_conjugate(&self, g: &IsoMatrix) -> Result<IsoMatrix> {
        g.try_mul(self)?.try_mul(&g.frobenius(1).inverse()?)
    }

    /// Principal submatrix on the given coordinates.
    pub fn submatrix(&self, idx: &[usize]) -> Result<IsoMatrix> {
        let entries = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone());
        IsoMatrix::new(idx.len(), entries.collect())
    }

    /// The matrix in the basis permuted by `perm`: entry `(i, j)` becomes `A[perm i][perm j]`.
    pub fn permute_basis(&self, perm: &[usize]) -> IsoMatrix {
        let n = self.n;
        let entries = (0..n * n)
            .map(|k| self.get(perm[k / n], perm[k % n]).clone())
            .collect();
        IsoMatrix { n, entries }
    }

    /// Checks that `val det = 0`.
    pub fn check_det_unit(&self) -> Result<()> {
        match self.det().valuation() {
            crate::series::Valuation::Exact(0) => Ok(()),
            crate::series::Valuation::Exact(v) => Err(Error::DeterminantValuation(v)),
            crate::series::Valuation::AtLeast(n) => {
                Err(Error::InsufficientPrecision { needed: 1, prec: n })
            }
        }
    }
}

impl fmt::Display for IsoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.chunks(self.n).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|s| s.to_string()).collect();
            write!(f, "[{}]", cells.join(" | "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    p: u32,
    prec: i32,
    entries: Vec<Vec<Series>>,
}

impl Serialize for IsoMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            p: self.modulus(),
            prec: self.prec(),
            entries: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IsoMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        let m = IsoMatrix::from_rows(r.entries).map_err(serde::de::Error::custom)?;
        if m.modulus() != r.p {
            return Err(serde::de::Error::custom(Error::ModulusMismatch(
                r.p,
                m.modulus(),
            )));
        }
        Ok(m.truncate(r.prec.min(m.prec())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 11;

    fn mono(rows: &[[Option<i32>; 3]; 3]) -> IsoMatrix {
        let rows: Vec<Vec<Vec<(i32, i64)>>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| e.map(|k| vec![(k, 1)]).unwrap_or_default())
                    .collect()
            })
            .collect();
        IsoMatrix::from_terms(P, 30, &rows).unwrap()
    }

    #[test]
    fn inverse_of_monomial_matrix() {
        let a = mono(&[
            [None, None, Some(-1)],
            [Some(0), None, None],
            [None, Some(1), None],
        ]);
        let prod = a.try_mul(&a.inverse().unwrap()).unwrap();
        assert_eq!(prod, IsoMatrix::identity(P, 3, prod.prec()));
    }

    #[test]
    fn determinant_of_diagonal() {
        let a = mono(&[
            [Some(-2), None, None],
            [None, Some(0), None],
            [None, None, Some(2)],
        ]);
        assert_eq!(a.det(), Series::one(P, a.det().prec()));
    }

    #[test]
    fn json_round_trip() {
        let a = mono(&[
            [Some(-1), None, None],
            [None, Some(0), None],
            [None, None, Some(1)],
        ]);
        let j = serde_json::to_string(&a).unwrap();
        let b: IsoMatrix = serde_json::from_str(&j).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parses_text_rows() {
        let a = IsoMatrix::parse("t^-1, 0, 0; 0, 1, 0; 0, 0, t", P, 30).unwrap();
        let b = mono(&[
            [Some(-1), None, None],
            [None, Some(0), None],
            [None, None, Some(1)],
        ]);
        assert_eq!(a, b);
        assert!(IsoMatrix::parse("1, 0; 0", P, 30).is_err());
        assert!(IsoMatrix::parse("", P, 30).is_err());
    }

    #[test]
    fn rejects_bad_size() {
        assert!(IsoMatrix::new(3, vec![Series::one(P, 5); 4]).is_err());
        assert!(IsoMatrix::new(4, vec![Series::one(P, 5); 16]).is_err());
    }
}
