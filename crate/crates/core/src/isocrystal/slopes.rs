use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::series::{ceil_q, Valuation};

pub type Q = Rational64;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

/// A dominant slope triple `λ1 ≥ λ2 ≥ λ3` summing to zero.
///
/// The derived ordering is lexicographic and only used for canonical
/// sorting; the dominance order is [`SlopeSeq::leq`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlopeSeq([Q; 3]);

impl SlopeSeq {
    pub fn new(l1: Q, l2: Q, l3: Q) -> Result<Self> {
        let s = SlopeSeq([l1, l2, l3]);
        s.validate()?;
        Ok(s)
    }

    pub fn from_ints(l1: i64, l2: i64, l3: i64) -> Result<Self> {
        SlopeSeq::new(qi(l1), qi(l2), qi(l3))
    }

    /// Sorts an arbitrary triple into decreasing order and validates it.
    pub fn sorted(mut v: [Q; 3]) -> Result<Self> {
        v.sort_by(|a, b| b.cmp(a));
        SlopeSeq::new(v[0], v[1], v[2])
    }

    fn validate(&self) -> Result<()> {
        let [a, b, c] = self.0;
        let bad = |why: &str| Err(Error::InvalidSlopes(format!("{self}: {why}")));
        if !(a >= b && b >= c) {
            return bad("not decreasing");
        }
        if !(a + b + c).is_zero() {
            return bad("does not sum to zero");
        }
        if self.0.iter().any(|x| ![1, 2, 3].contains(x.denom())) {
            return bad("denominator outside {1,2,3}");
        }
        // each run of equal slopes ends on a lattice point
        let mut i = 0;
        let mut partial = Q::zero();
        while i < 3 {
            let mut j = i;
            while j + 1 < 3 && self.0[j + 1] == self.0[i] {
                j += 1;
            }
            partial += self.0[i] * qi((j - i + 1) as i64);
            if !partial.is_integer() {
                return bad("run does not end on a lattice point");
            }
            i = j + 1;
        }
        Ok(())
    }

    pub fn zero() -> Self {
        SlopeSeq([Q::zero(); 3])
    }

    pub fn parts(&self) -> [Q; 3] {
        self.0
    }

    pub fn l1(&self) -> Q {
        self.0[0]
    }

    pub fn l2(&self) -> Q {
        self.0[1]
    }

    pub fn l3(&self) -> Q {
        self.0[2]
    }

    /// Dominance order: `self ≤ other` iff `λ1 ≤ λ1'` and `λ1+λ2 ≤ λ1'+λ2'`.
    pub fn leq(&self, other: &SlopeSeq) -> bool {
        slope_leq(self, other)
    }

    /// The image under the root-swapping reflection: `(λ1,λ2,λ3) ↦ (−λ3,−λ2,−λ1)`.
    pub fn psi(&self) -> SlopeSeq {
        SlopeSeq([-self.0[2], -self.0[1], -self.0[0]])
    }

    /// Pairing with twice the half-sum of positive roots: `2(λ1 − λ3)`.
    pub fn two_rho_pairing(&self) -> Q {
        qi(2) * (self.0[0] - self.0[2])
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    /// The concave polygon from `(0, 0)` whose segment slopes are `λ1, λ2, λ3`.
    pub fn polygon(&self) -> NewtonPolygon {
        let mut vertices = vec![(0, Q::zero())];
        let mut height = Q::zero();
        for i in 0..3 {
            height += self.0[i];
            if i == 2 || self.0[i] != self.0[i + 1] {
                vertices.push((i + 1, height));
            }
        }
        NewtonPolygon {
            vertices,
            slopes: self.0.to_vec(),
        }
    }
}

/// `nu ≤ lam` in the dominance order.
pub fn slope_leq(nu: &SlopeSeq, lam: &SlopeSeq) -> bool {
    dominated(nu.0, lam.0)
}

/// Dominance comparison on raw triples, used also against non-dominant bounds.
pub fn dominated(nu: [Q; 3], lam: [Q; 3]) -> bool {
    nu[0] <= lam[0] && nu[0] + nu[1] <= lam[0] + lam[1]
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = n.trim().parse::<i64>().map_err(|_| bad())?;
            let d = d.trim().parse::<i64>().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(qi(s.parse::<i64>().map_err(|_| bad())?)),
    }
}

impl fmt::Display for SlopeSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{}",
            fmt_q(&self.0[0]),
            fmt_q(&self.0[1]),
            fmt_q(&self.0[2])
        )
    }
}

impl FromStr for SlopeSeq {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s
            .trim()
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected three slopes in {s:?}")));
        }
        SlopeSeq::new(parse_q(parts[0])?, parse_q(parts[1])?, parse_q(parts[2])?)
    }
}

impl Serialize for SlopeSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self
            .0
            .iter()
            .map(|x| format!("{}/{}", x.numer(), x.denom()))
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SlopeSeq {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        if v.len() != 3 {
            return Err(serde::de::Error::custom("expected three fractions"));
        }
        let parts = v
            .iter()
            .map(|s| parse_q(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        SlopeSeq::new(parts[0], parts[1], parts[2]).map_err(serde::de::Error::custom)
    }
}

/// Upper convex hull of the points `(i, −val_i)` of a monic σ-polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, Q)>,
    pub slopes: Vec<Q>,
}

/// Newton polygon of `σ^n + c_1 σ^{n-1} + … + c_n` from the valuations
/// `[val c_0 = 0, val c_1, …, val c_n]`.
///
/// Unknown valuations are dropped; if such a point could still rise above the
/// hull the result is [`Error::InsufficientPrecision`].
pub fn newton_polygon(vals: &[Valuation]) -> Result<NewtonPolygon> {
    let n = vals.len() - 1;
    let last = vals[n].exact().ok_or(Error::InsufficientPrecision {
        needed: vals[n].lower_bound() + 1,
        prec: vals[n].lower_bound(),
    })?;
    let mut known: Vec<(usize, Q)> = vec![(0, Q::zero())];
    for (i, v) in vals.iter().enumerate().take(n).skip(1) {
        if let Valuation::Exact(k) = v {
            known.push((i, qi(-*k as i64)));
        }
    }
    known.push((n, qi(-last as i64)));

    let mut hull: Vec<(usize, Q)> = Vec::new();
    for &pt in &known {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly above the chord
            let lhs = (y2 - y1) * qi((pt.0 - x1) as i64);
            let rhs = (pt.1 - y1) * qi((x2 - x1) as i64);
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let height_at = |i: usize| -> Q {
        let k = hull.iter().position(|&(x, _)| x >= i).unwrap();
        let (x2, y2) = hull[k];
        if x2 == i {
            return y2;
        }
        let (x1, y1) = hull[k - 1];
        y1 + (y2 - y1) * qi((i - x1) as i64) / qi((x2 - x1) as i64)
    };
    for (i, v) in vals.iter().enumerate().take(n).skip(1) {
        if let Valuation::AtLeast(m) = v {
            let top = qi(-*m as i64);
            let h = height_at(i);
            if top > h {
                return Err(Error::InsufficientPrecision {
                    needed: ceil_q(-h),
                    prec: *m,
                });
            }
        }
    }

    let mut slopes = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let s = (y2 - y1) / qi((x2 - x1) as i64);
        slopes.extend(std::iter::repeat_n(s, x2 - x1));
    }
    Ok(NewtonPolygon {
        vertices: hull,
        slopes,
    })
}

/// Slope sequence of a cubic σ-polynomial with `val γ = 0`.
pub fn polygon_slopes3(alpha: Valuation, beta: Valuation, gamma: Valuation) -> Result<SlopeSeq> {
    let poly = newton_polygon(&[Valuation::Exact(0), alpha, beta, gamma])?;
    SlopeSeq::new(poly.slopes[0], poly.slopes[1], poly.slopes[2])
}
