//! The affine Weyl group of SL₃: elements `π^μ w`, lengths, chambers, the
//! rotation `φ`, the diagram involution `ψ`, and Iwahori coset patterns.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::isocrystal::{qi, IsoMatrix, SlopeSeq, Q};
use crate::series::{Series, Valuation};

/// An element of the finite Weyl group S₃, written as a word in `s1`, `s2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Perm {
    Id,
    S1,
    S2,
    S12,
    S21,
    S121,
}

impl Perm {
    pub const ALL: [Perm; 6] = [
        Perm::Id,
        Perm::S1,
        Perm::S2,
        Perm::S12,
        Perm::S21,
        Perm::S121,
    ];

    /// Zero-based images: `images()[i] = w(i)`.
    pub fn images(self) -> [usize; 3] {
        match self {
            Perm::Id => [0, 1, 2],
            Perm::S1 => [1, 0, 2],
            Perm::S2 => [0, 2, 1],
            Perm::S12 => [1, 2, 0],
            Perm::S21 => [2, 0, 1],
            Perm::S121 => [2, 1, 0],
        }
    }

    pub fn from_images(img: [usize; 3]) -> Perm {
        *Perm::ALL
            .iter()
            .find(|w| w.images() == img)
            .expect("not a permutation of 0..3")
    }

    /// `self ∘ other`.
    pub fn compose(self, other: Perm) -> Perm {
        let (a, b) = (self.images(), other.images());
        Perm::from_images([a[b[0]], a[b[1]], a[b[2]]])
    }

    pub fn inverse(self) -> Perm {
        let a = self.images();
        let mut inv = [0; 3];
        for i in 0..3 {
            inv[a[i]] = i;
        }
        Perm::from_images(inv)
    }

    pub fn is_odd(self) -> bool {
        matches!(self, Perm::S1 | Perm::S2 | Perm::S121)
    }

    pub fn length(self) -> u32 {
        match self {
            Perm::Id => 0,
            Perm::S1 | Perm::S2 => 1,
            Perm::S12 | Perm::S21 => 2,
            Perm::S121 => 3,
        }
    }

    /// Action on coordinate vectors: `(w p)_i = p_{w⁻¹(i)}`.
    pub fn act<T: Copy>(self, p: [T; 3]) -> [T; 3] {
        let a = self.images();
        let mut out = p;
        for j in 0..3 {
            out[a[j]] = p[j];
        }
        out
    }

    pub fn name(self) -> &'static str {
        match self {
            Perm::Id => "1",
            Perm::S1 => "s1",
            Perm::S2 => "s2",
            Perm::S12 => "s12",
            Perm::S21 => "s21",
            Perm::S121 => "s121",
        }
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Perm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Perm> {
        let s = s.trim();
        Perm::ALL
            .iter()
            .copied()
            .find(|w| {
                w.name() == s
                    || (s.is_empty() && *w == Perm::Id)
                    || (s == "s212" && *w == Perm::S121)
            })
            .ok_or_else(|| Error::Parse(format!("unknown Weyl element {s:?}")))
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// The Weyl chamber `s(C⁰)`, labelled by `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Chamber(pub Perm);

impl Chamber {
    pub const ANTIDOMINANT: Chamber = Chamber(Perm::Id);
    pub const DOMINANT: Chamber = Chamber(Perm::S121);
}

impl fmt::Display for Chamber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Perm::Id => f.write_str("C0"),
            w => write!(f, "{w}(C0)"),
        }
    }
}

/// Interior point of the base alcove.
pub fn base_point() -> [Q; 3] {
    [Q::new(-5, 12), Q::new(-1, 12), Q::new(1, 2)]
}

/// An element `π^μ w` of the affine Weyl group, with `Σμ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineWeylElt {
    mu: [i32; 3],
    w: Perm,
}

impl AffineWeylElt {
    pub fn new(mu: [i32; 3], w: Perm) -> Result<Self> {
        if mu.iter().sum::<i32>() != 0 {
            return Err(Error::InvalidElement(format!(
                "mu = {mu:?} does not sum to zero"
            )));
        }
        Ok(AffineWeylElt { mu, w })
    }

    pub fn identity() -> Self {
        AffineWeylElt {
            mu: [0; 3],
            w: Perm::Id,
        }
    }

    pub fn translation(mu: [i32; 3]) -> Result<Self> {
        AffineWeylElt::new(mu, Perm::Id)
    }

    pub fn simple(w: Perm) -> Self {
        AffineWeylElt { mu: [0; 3], w }
    }

    pub fn mu(&self) -> [i32; 3] {
        self.mu
    }

    pub fn w(&self) -> Perm {
        self.w
    }

    /// All elements with `|μᵢ| ≤ bound`.
    pub fn grid(bound: i32) -> Vec<AffineWeylElt> {
        let mut out = Vec::new();
        for m1 in -bound..=bound {
            for m2 in -bound..=bound {
                let m3 = -m1 - m2;
                if m3.abs() > bound {
                    continue;
                }
                for w in Perm::ALL {
                    out.push(AffineWeylElt {
                        mu: [m1, m2, m3],
                        w,
                    });
                }
            }
        }
        out
    }

    /// `(π^μ v)(π^ν w) = π^{μ + v(ν)} vw`.
    pub fn compose(&self, o: &AffineWeylElt) -> AffineWeylElt {
        let vn = self.w.act(o.mu);
        AffineWeylElt {
            mu: [self.mu[0] + vn[0], self.mu[1] + vn[1], self.mu[2] + vn[2]],
            w: self.w.compose(o.w),
        }
    }

    pub fn inverse(&self) -> AffineWeylElt {
        let wi = self.w.inverse();
        let m = wi.act(self.mu);
        AffineWeylElt {
            mu: [-m[0], -m[1], -m[2]],
            w: wi,
        }
    }

    /// Affine action `p ↦ μ + w(p)`.
    pub fn act_point(&self, p: [Q; 3]) -> [Q; 3] {
        let wp = self.w.act(p);
        [
            wp[0] + qi(self.mu[0] as i64),
            wp[1] + qi(self.mu[1] as i64),
            wp[2] + qi(self.mu[2] as i64),
        ]
    }

    /// Number of affine root hyperplanes separating the base alcove from its image.
    pub fn length(&self) -> u32 {
        let p0 = base_point();
        let p1 = self.act_point(p0);
        let mut n = 0;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let (a, b) = (p0[i] - p0[j], p1[i] - p1[j]);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            // integers k with lo < k < hi; endpoints are never integral
            n += (hi.floor() - lo.floor()).to_integer() as u32;
        }
        n
    }

    /// The chamber containing the image of the base alcove.
    pub fn chamber(&self) -> Chamber {
        let x = self.act_point(base_point());
        let s = Perm::ALL
            .iter()
            .copied()
            .find(|s| {
                let y = s.inverse().act(x);
                y[0] < y[1] && y[1] < y[2]
            })
            .expect("base point is generic");
        Chamber(s)
    }

    /// Rotation of the base alcove by 120 degrees about its center.
    pub fn phi(&self) -> AffineWeylElt {
        let c = Perm::S12;
        let cwc = c.compose(self.w).compose(c.inverse());
        let cm = c.act(self.mu);
        let e = cwc.act([1, 0, 0]);
        AffineWeylElt {
            mu: [-1 + cm[0] + e[0], cm[1] + e[1], cm[2] + e[2]],
            w: cwc,
        }
    }

    /// The diagram involution `π^μ w ↦ π^{(−μ3,−μ2,−μ1)} w₀ww₀`.
    pub fn psi(&self) -> AffineWeylElt {
        let w0 = Perm::S121;
        AffineWeylElt {
            mu: [-self.mu[2], -self.mu[1], -self.mu[0]],
            w: w0.compose(self.w).compose(w0),
        }
    }

    /// `diag(t^μ)·P_w`, with the first row negated when `w` is odd so that `det = 1`.
    pub fn matrix_rep(&self, p: u32, prec: i32) -> IsoMatrix {
        let img = self.w.images();
        let mut rows = vec![vec![Series::zero(p, prec); 3]; 3];
        for j in 0..3 {
            let i = img[j];
            let sign = if i == 0 && self.w.is_odd() { -1 } else { 1 };
            rows[i][j] = Series::monomial(p, sign, self.mu[i], prec);
        }
        IsoMatrix::from_rows(rows).expect("3x3 with one modulus")
    }

    /// `−μ` sorted into decreasing order.
    pub fn neg_mu_dom(&self) -> SlopeSeq {
        SlopeSeq::sorted(self.mu.map(|m| qi(-m as i64))).expect("integral slopes")
    }
}

impl fmt::Display for AffineWeylElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mu={},{},{};w={}",
            self.mu[0], self.mu[1], self.mu[2], self.w
        )
    }
}

impl FromStr for AffineWeylElt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected \"mu=a,b,c;w=...\", got {s:?}"));
        let mut mu = None;
        let mut w = Perm::Id;
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            match k.trim() {
                "mu" => {
                    let v: Vec<i32> = v
                        .split(',')
                        .map(|x| x.trim().parse::<i32>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad())?;
                    if v.len() != 3 {
                        return Err(bad());
                    }
                    mu = Some([v[0], v[1], v[2]]);
                }
                "w" => w = v.parse()?,
                _ => return Err(bad()),
            }
        }
        AffineWeylElt::new(mu.ok_or_else(bad)?, w)
    }
}

#[derive(Serialize, Deserialize)]
struct EltRepr {
    mu: [i32; 3],
    w: Perm,
}

impl Serialize for AffineWeylElt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EltRepr {
            mu: self.mu,
            w: self.w,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AffineWeylElt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = EltRepr::deserialize(d)?;
        AffineWeylElt::new(r.mu, r.w).map_err(serde::de::Error::custom)
    }
}

/// `τ`, the matrix inducing `φ`.
pub fn tau(p: u32, prec: i32) -> IsoMatrix {
    IsoMatrix::from_terms(
        p,
        prec,
        &[
            vec![vec![], vec![], vec![(-1, 1)]],
            vec![vec![(0, 1)], vec![], vec![]],
            vec![vec![], vec![(0, 1)], vec![]],
        ],
    )
    .expect("valid")
}

/// `τ⁻¹`.
pub fn tau_inv(p: u32, prec: i32) -> IsoMatrix {
    IsoMatrix::from_terms(
        p,
        prec,
        &[
            vec![vec![], vec![(0, 1)], vec![]],
            vec![vec![], vec![], vec![(0, 1)]],
            vec![vec![(1, 1)], vec![], vec![]],
        ],
    )
    .expect("valid")
}

/// `A ↦ τAτ⁻¹`; `τ` is Frobenius-fixed so this is a σ-conjugation.
pub fn phi_matrix(a: &IsoMatrix) -> Result<IsoMatrix> {
    let (p, prec) = (a.modulus(), a.prec());
    tau(p, prec).try_mul(a)?.try_mul(&tau_inv(p, prec))
}

/// `A ↦ η(Aᵗ)⁻¹η⁻¹` with `η` antidiagonal.
pub fn psi_matrix(a: &IsoMatrix) -> Result<IsoMatrix> {
    Ok(a.transpose().inverse()?.permute_basis(&[2, 1, 0]))
}

pub fn psi_slopes(l: &SlopeSeq) -> SlopeSeq {
    l.psi()
}

pub fn two_rho_pairing(l: &SlopeSeq) -> Q {
    l.two_rho_pairing()
}

/// Constraint on one matrix entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EntryPattern {
    /// Valuation exactly `k`.
    Exact {
        k: i32,
    },
    /// Valuation at least `k`.
    Min {
        k: i32,
    },
    Zero,
}

impl EntryPattern {
    fn shift(self, s: i32) -> Self {
        match self {
            EntryPattern::Exact { k } => EntryPattern::Exact { k: k + s },
            EntryPattern::Min { k } => EntryPattern::Min { k: k + s },
            EntryPattern::Zero => EntryPattern::Zero,
        }
    }

    /// Whether `s` satisfies the constraint; undecidable cases are errors.
    pub fn admits(self, s: &Series) -> Result<bool> {
        match self {
            EntryPattern::Zero => Ok(s.is_zero()),
            EntryPattern::Min { k } => s.in_power(k),
            EntryPattern::Exact { k } => match s.valuation() {
                Valuation::Exact(v) => Ok(v == k),
                Valuation::AtLeast(n) if n > k => Ok(false),
                Valuation::AtLeast(n) => Err(Error::InsufficientPrecision {
                    needed: k + 1,
                    prec: n,
                }),
            },
        }
    }

    /// Smallest exponent the entry may carry, if any.
    pub fn floor(self) -> Option<i32> {
        match self {
            EntryPattern::Exact { k } | EntryPattern::Min { k } => Some(k),
            EntryPattern::Zero => None,
        }
    }
}

impl fmt::Display for EntryPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryPattern::Exact { k } => write!(f, "P^{k}x"),
            EntryPattern::Min { k } => write!(f, "P^{k}"),
            EntryPattern::Zero => f.write_str("0"),
        }
    }
}

/// Entrywise valuation constraints describing a coset or a subvariety of one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValuationPattern(pub [[EntryPattern; 3]; 3]);

impl ValuationPattern {
    /// The standard Iwahori subgroup.
    pub fn iwahori() -> Self {
        use EntryPattern::*;
        ValuationPattern([
            [Exact { k: 0 }, Min { k: 0 }, Min { k: 0 }],
            [Min { k: 1 }, Exact { k: 0 }, Min { k: 0 }],
            [Min { k: 1 }, Min { k: 1 }, Exact { k: 0 }],
        ])
    }

    pub fn get(&self, i: usize, j: usize) -> EntryPattern {
        self.0[i][j]
    }

    pub fn with_zero(mut self, cells: &[(usize, usize)]) -> Self {
        for &(i, j) in cells {
            self.0[i][j] = EntryPattern::Zero;
        }
        self
    }

    /// Entry `(i, j)` becomes entry `(perm i, perm j)`.
    pub fn permute_basis(&self, perm: [usize; 3]) -> Self {
        let mut out = self.0;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.0[perm[i]][perm[j]];
            }
        }
        ValuationPattern(out)
    }

    pub fn contains(&self, a: &IsoMatrix) -> Result<bool> {
        if a.dim() != 3 {
            return Err(Error::Dimension(
                "pattern membership needs a 3x3 matrix".into(),
            ));
        }
        for i in 0..3 {
            for j in 0..3 {
                if !self.0[i][j].admits(a.get(i, j))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Largest absolute exponent appearing in the pattern.
    pub fn max_abs_exponent(&self) -> i32 {
        self.0
            .iter()
            .flatten()
            .filter_map(|e| e.floor())
            .map(i32::abs)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for ValuationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[{} {} {}]", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}

/// Which coset shape to describe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PatternKind {
    /// The coset `xI`.
    XI,
    /// The Iwahori subgroup itself.
    Iwahori,
    /// `xI` with `f = h = i = 0`, for `w = s121`, `μ1 < μ2 < μ3`.
    K1,
    /// Slice of `xI` for `w = s1`, `μ1 < μ2 ≤ μ3`.
    K2,
    /// Slice of `xI` for `w = s2`, `μ1 ≤ μ2 < μ3`.
    K3,
    /// `s1⁻¹·xI·s1` for `x` in chamber `s1(C⁰)` with `μ1 ≥ 0` and `μ3 ≠ μ1`.
    XPrimeIPrime,
}

fn xi_pattern(x: &AffineWeylElt) -> ValuationPattern {
    let i = ValuationPattern::iwahori();
    let winv = x.w.inverse().images();
    let mut out = i.0;
    for (r, row) in out.iter_mut().enumerate() {
        for (c, e) in row.iter_mut().enumerate() {
            *e = i.0[winv[r]][c].shift(x.mu[r]);
        }
    }
    ValuationPattern(out)
}

pub fn coset_pattern(x: &AffineWeylElt, kind: PatternKind) -> Result<ValuationPattern> {
    use EntryPattern::*;
    let [m1, m2, m3] = x.mu;
    let undefined = || Err(Error::PatternUndefined(format!("{kind:?} at {x}")));
    match kind {
        PatternKind::Iwahori => Ok(ValuationPattern::iwahori()),
        PatternKind::XI => Ok(xi_pattern(x)),
        PatternKind::K1 => {
            if x.w != Perm::S121 || !(m1 < m2 && m2 < m3) {
                return undefined();
            }
            Ok(xi_pattern(x).with_zero(&[(1, 2), (2, 1), (2, 2)]))
        }
        PatternKind::K2 => {
            if x.w != Perm::S1 || !(m1 < m2 && m2 <= m3) {
                return undefined();
            }
            Ok(ValuationPattern([
                [Min { k: m1 + 1 }, Exact { k: m1 }, Min { k: m1 }],
                [Exact { k: m2 }, Zero, Min { k: m2 }],
                [Min { k: m3 + 1 }, Zero, Exact { k: m3 }],
            ]))
        }
        PatternKind::K3 => {
            if x.w != Perm::S2 || !(m1 <= m2 && m2 < m3) {
                return undefined();
            }
            Ok(ValuationPattern([
                [Exact { k: m1 }, Min { k: m1 }, Min { k: m1 }],
                [Min { k: m2 + 1 }, Min { k: m2 + 1 }, Exact { k: m2 }],
                [Zero, Exact { k: m3 }, Zero],
            ]))
        }
        PatternKind::XPrimeIPrime => {
            if x.chamber() != Chamber(Perm::S1) || m1 < 0 || m3 == m1 {
                return undefined();
            }
            Ok(xi_pattern(x).permute_basis([1, 0, 2]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use EntryPattern::*;

    fn x(s: &str) -> AffineWeylElt {
        s.parse().unwrap()
    }

    #[test]
    fn perm_words() {
        assert_eq!(Perm::S1.compose(Perm::S2), Perm::S12);
        assert_eq!(Perm::S2.compose(Perm::S1), Perm::S21);
        assert_eq!(Perm::S12.compose(Perm::S1), Perm::S121);
        assert_eq!(Perm::S21.compose(Perm::S2), Perm::S121);
        assert_eq!(Perm::S12.inverse(), Perm::S21);
        for w in Perm::ALL {
            assert_eq!(w.compose(w.inverse()), Perm::Id);
        }
    }

    #[test]
    fn composition_examples() {
        let s1 = AffineWeylElt::simple(Perm::S1);
        assert_eq!(s1.compose(&s1), AffineWeylElt::identity());
        let t = AffineWeylElt::translation([1, -1, 0]).unwrap();
        assert_eq!(
            s1.compose(&t).compose(&s1),
            AffineWeylElt::translation([-1, 1, 0]).unwrap()
        );
        for e in AffineWeylElt::grid(2) {
            assert_eq!(e.compose(&e.inverse()), AffineWeylElt::identity());
        }
    }

    #[test]
    fn lengths() {
        assert_eq!(AffineWeylElt::identity().length(), 0);
        assert_eq!(AffineWeylElt::simple(Perm::S1).length(), 1);
        assert_eq!(AffineWeylElt::simple(Perm::S121).length(), 3);
        assert_eq!(x("mu=-1,0,1;w=1").length(), 4);
    }

    #[test]
    fn chambers() {
        assert_eq!(AffineWeylElt::identity().chamber(), Chamber::ANTIDOMINANT);
        assert_eq!(x("mu=-2,0,2;w=s121").chamber(), Chamber::ANTIDOMINANT);
        assert_eq!(x("mu=2,0,-2;w=s121").chamber(), Chamber::DOMINANT);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(x("mu=-1,0,1;w=s12").phi(), x("mu=0,0,0;w=s12"));
        for e in AffineWeylElt::grid(4) {
            assert_eq!(e.phi().phi().phi(), e);
            assert_eq!(e.psi().psi(), e);
        }
    }

    #[test]
    fn psi_example() {
        assert_eq!(x("mu=-3,1,2;w=s12").psi(), x("mu=-2,-1,3;w=s21"));
    }

    #[test]
    fn xi_pattern_display_example() {
        let pat = coset_pattern(&x("mu=-2,0,2;w=s12"), PatternKind::XI).unwrap();
        assert_eq!(
            pat.0,
            [
                [Min { k: -1 }, Min { k: -1 }, Exact { k: -2 }],
                [Exact { k: 0 }, Min { k: 0 }, Min { k: 0 }],
                [Min { k: 3 }, Exact { k: 2 }, Min { k: 2 }],
            ]
        );
        assert_eq!(
            coset_pattern(&AffineWeylElt::identity(), PatternKind::XI).unwrap(),
            ValuationPattern::iwahori()
        );
    }

    #[test]
    fn k1_pattern_zeros() {
        let pat = coset_pattern(&x("mu=-2,0,2;w=s121"), PatternKind::K1).unwrap();
        assert_eq!(pat.get(1, 2), Zero);
        assert_eq!(pat.get(2, 1), Zero);
        assert_eq!(pat.get(2, 2), Zero);
        assert_eq!(pat.get(0, 2), Exact { k: -2 });
        assert!(coset_pattern(&x("mu=0,0,0;w=s121"), PatternKind::K1).is_err());
    }

    #[test]
    fn xprime_iprime_matches_displays() {
        // display (I) is the w = s12 row
        let e = x("mu=1,-3,2;w=s12");
        assert_eq!(e.chamber(), Chamber(Perm::S1));
        let pat = coset_pattern(&e, PatternKind::XPrimeIPrime).unwrap();
        let [m1, m2, m3] = e.mu();
        assert_eq!(
            pat.0,
            [
                [Min { k: m2 }, Exact { k: m2 }, Min { k: m2 }],
                [Min { k: m1 + 1 }, Min { k: m1 + 1 }, Exact { k: m1 }],
                [Exact { k: m3 }, Min { k: m3 + 1 }, Min { k: m3 }],
            ]
        );
    }

    #[test]
    fn matrix_rep_in_coset() {
        for e in AffineWeylElt::grid(3) {
            let m = e.matrix_rep(11, 20);
            assert!(
                coset_pattern(&e, PatternKind::XI)
                    .unwrap()
                    .contains(&m)
                    .unwrap(),
                "{e}"
            );
            assert_eq!(m.det(), Series::one(11, m.det().prec()));
        }
        let d = x("mu=-1,0,1;w=1").matrix_rep(11, 10);
        assert_eq!(d.get(0, 0), &Series::monomial(11, 1, -1, 10));
        assert_eq!(d.get(2, 2), &Series::monomial(11, 1, 1, 10));
    }

    #[test]
    fn phi_matrix_matches_phi_on_representatives() {
        for e in AffineWeylElt::grid(2) {
            let m = phi_matrix(&e.matrix_rep(11, 20)).unwrap();
            assert!(
                coset_pattern(&e.phi(), PatternKind::XI)
                    .unwrap()
                    .contains(&m)
                    .unwrap(),
                "{e}"
            );
            let n = psi_matrix(&e.matrix_rep(11, 20)).unwrap();
            assert!(
                coset_pattern(&e.psi(), PatternKind::XI)
                    .unwrap()
                    .contains(&n)
                    .unwrap(),
                "{e}"
            );
        }
    }

    #[test]
    fn text_and_json_forms() {
        let e = x("mu=-2,0,2;w=s121");
        assert_eq!(e.to_string(), "mu=-2,0,2;w=s121");
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"mu":[-2,0,2],"w":"s121"}"#
        );
        assert_eq!(
            serde_json::from_str::<AffineWeylElt>(r#"{"mu":[-2,0,2],"w":"s121"}"#).unwrap(),
            e
        );
        assert!("mu=1,1,1;w=s1".parse::<AffineWeylElt>().is_err());
        let j = serde_json::to_string(&EntryPattern::Exact { k: -2 }).unwrap();
        assert_eq!(j, r#"{"kind":"exact","k":-2}"#);
    }

    #[test]
    fn length_changes_by_one_under_simple_reflections() {
        for e in AffineWeylElt::grid(3) {
            for s in [Perm::S1, Perm::S2] {
                let d = e.compose(&AffineWeylElt::simple(s)).length() as i64 - e.length() as i64;
                assert_eq!(d.abs(), 1, "{e} {s}");
            }
        }
    }
}
