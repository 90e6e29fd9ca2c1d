use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use super::table::{lower_corner, table_entry, Shape};
use crate::affine_weyl::{AffineWeylElt, Perm};
use crate::error::{Error, Result};
use crate::isocrystal::{dominated, q, qi, slope_sequence, IsoMatrix, SlopeSeq, Q};

/// All slope sequences with every `|λᵢ| ≤ bound`.
pub fn enumerate_ng(bound: Q) -> Vec<SlopeSeq> {
    let mut out = Vec::new();
    if bound < Q::from_integer(0) {
        return out;
    }
    let b = bound.floor().to_integer();
    for a in 0..=b {
        for c in -b..=0 {
            let m = -a - c;
            if a >= m && m >= c {
                out.push(SlopeSeq::from_ints(a, m, c).expect("integral"));
            }
        }
    }
    // one break, with a run of two half-integral slopes
    let mut n = 1;
    while qi(n) <= bound {
        out.push(SlopeSeq::new(q(n, 2), q(n, 2), qi(-n)).expect("valid"));
        out.push(SlopeSeq::new(qi(n), q(-n, 2), q(-n, 2)).expect("valid"));
        n += 2;
    }
    out.sort_by(|x, y| y.cmp(x));
    out
}

/// The bound `max |λᵢ|` of a slope sequence.
pub fn height(l: &SlopeSeq) -> Q {
    l.l1().max(-l.l3())
}

/// A finite subposet of slope sequences under dominance, with its Hasse diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poset {
    pub elements: Vec<SlopeSeq>,
    /// `(i, j)` when `elements[i]` is covered by `elements[j]`.
    pub cover: Vec<(usize, usize)>,
}

impl Poset {
    pub fn new(mut elements: Vec<SlopeSeq>) -> Self {
        elements.sort_by(|x, y| y.cmp(x));
        elements.dedup();
        let n = elements.len();
        let lt = |i: usize, j: usize| i != j && elements[i].leq(&elements[j]);
        let mut cover = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if lt(i, j) && !(0..n).any(|k| lt(i, k) && lt(k, j)) {
                    cover.push((i, j));
                }
            }
        }
        Poset { elements, cover }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, l: &SlopeSeq) -> bool {
        self.elements.contains(l)
    }

    pub fn index_of(&self, l: &SlopeSeq) -> Option<usize> {
        self.elements.iter().position(|e| e == l)
    }

    /// Longest and shortest cover chain lengths from `lo` up to `hi`, if comparable.
    fn chain_bounds(&self, lo: usize, hi: usize) -> Option<(usize, usize)> {
        fn go(
            p: &Poset,
            a: usize,
            hi: usize,
            memo: &mut HashMap<usize, Option<(usize, usize)>>,
        ) -> Option<(usize, usize)> {
            if a == hi {
                return Some((0, 0));
            }
            if let Some(r) = memo.get(&a) {
                return *r;
            }
            let mut best: Option<(usize, usize)> = None;
            for &(i, j) in &p.cover {
                if i == a {
                    if let Some((mx, mn)) = go(p, j, hi, memo) {
                        best = Some(match best {
                            None => (mx + 1, mn + 1),
                            Some((bx, bn)) => (bx.max(mx + 1), bn.min(mn + 1)),
                        });
                    }
                }
            }
            memo.insert(a, best);
            best
        }
        go(self, lo, hi, &mut HashMap::new())
    }

    /// Length of the longest chain from `lo` to `hi`.
    pub fn segment_length(&self, lo: &SlopeSeq, hi: &SlopeSeq) -> Result<usize> {
        let i = self
            .index_of(lo)
            .ok_or_else(|| Error::ElementsNotInPoset(lo.to_string()))?;
        let j = self
            .index_of(hi)
            .ok_or_else(|| Error::ElementsNotInPoset(hi.to_string()))?;
        if !lo.leq(hi) {
            return Err(Error::ElementsNotInPoset(format!("{lo} is not below {hi}")));
        }
        Ok(self.chain_bounds(i, j).map(|b| b.0).unwrap_or(0))
    }

    /// Whether all maximal chains between any comparable pair have equal length.
    pub fn is_ranked(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                !self.elements[i].leq(&self.elements[j])
                    || self.chain_bounds(i, j).is_some_and(|(mx, mn)| mx == mn)
            })
        })
    }

    /// Graphviz rendering of the Hasse diagram.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n  rankdir=BT;\n");
        for (i, e) in self.elements.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{e}\"];");
        }
        for &(i, j) in &self.cover {
            let _ = writeln!(s, "  n{i} -> n{j};");
        }
        s.push_str("}\n");
        s
    }
}

/// `{λ ∈ N(G) : lo ≤ λ ≤ hi}`.
pub fn ambient_interval(lo: &SlopeSeq, hi: &SlopeSeq) -> Poset {
    Poset::new(
        enumerate_ng(height(hi))
            .into_iter()
            .filter(|l| lo.leq(l) && l.leq(hi))
            .collect(),
    )
}

/// The poset `N(G)_x` with its generic element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrataPoset {
    pub x: AffineWeylElt,
    pub nu_x: SlopeSeq,
    pub shape: Shape,
    #[serde(flatten)]
    pub poset: Poset,
}

impl StrataPoset {
    pub fn elements(&self) -> &[SlopeSeq] {
        &self.poset.elements
    }

    pub fn contains(&self, l: &SlopeSeq) -> bool {
        self.poset.contains(l)
    }

    pub fn minimum(&self) -> Option<SlopeSeq> {
        let els = &self.poset.elements;
        els.iter().copied().find(|m| els.iter().all(|e| m.leq(e)))
    }
}

/// Materializes the poset for a table shape.
pub fn materialize(nu: SlopeSeq, shape: Shape) -> Vec<SlopeSeq> {
    let all = enumerate_ng(height(&nu));
    let below = |l: &SlopeSeq| l.leq(&nu);
    match shape {
        Shape::Single => vec![nu],
        Shape::Le => all.into_iter().filter(below).collect(),
        Shape::LowA | Shape::LowB => {
            let lo = lower_corner(&nu, shape).expect("interval shape");
            all.into_iter()
                .filter(|l| below(l) && dominated(lo, l.parts()))
                .collect()
        }
        Shape::Union => {
            let [a, b, c] = nu.parts();
            let top = [a - qi(1), b, c + qi(1)];
            all.into_iter()
                .filter(|l| *l == nu || dominated(l.parts(), top))
                .collect()
        }
    }
}

fn build(x: &AffineWeylElt) -> StrataPoset {
    let entry = table_entry(x);
    StrataPoset {
        x: *x,
        nu_x: entry.nu,
        shape: entry.shape,
        poset: Poset::new(materialize(entry.nu, entry.shape)),
    }
}

type Memo = RwLock<HashMap<AffineWeylElt, Arc<StrataPoset>>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// `N(G)_x`, memoized.
pub fn poset_of(x: &AffineWeylElt) -> Arc<StrataPoset> {
    if let Some(p) = memo().read().expect("memo lock").get(x) {
        return p.clone();
    }
    let p = Arc::new(build(x));
    memo().write().expect("memo lock").insert(*x, p.clone());
    p
}

pub fn generic_slope(x: &AffineWeylElt) -> SlopeSeq {
    poset_of(x).nu_x
}

pub fn segment_length(x: &AffineWeylElt, lam: &SlopeSeq, mu_low: &SlopeSeq) -> Result<usize> {
    poset_of(x).poset.segment_length(mu_low, lam)
}

/// Codimension of the closed stratum of `lam`: chain length from `lam` to `ν_x`.
pub fn codim(x: &AffineWeylElt, lam: &SlopeSeq) -> Result<usize> {
    let p = poset_of(x);
    p.poset.segment_length(lam, &p.nu_x)
}

/// Minimal exponent of the exceptional families.
pub const EXCEPTION_MIN_N: i32 = 1;

fn in_base_family(x: &AffineWeylElt) -> bool {
    let [m1, m2, m3] = x.mu();
    match x.w() {
        Perm::S121 => m1 + 2 < m2 + 1 && m2 + 1 < m3,
        Perm::S12 => m2 == m3 && m1 == -2 * m2 && m2 >= EXCEPTION_MIN_N,
        Perm::S21 => m1 == m2 && m3 == -2 * m1 && -m1 >= EXCEPTION_MIN_N,
        Perm::S2 => m2 == m3 - 1 && m1 == -2 * m3 + 1 && m3 >= EXCEPTION_MIN_N,
        Perm::S1 => m2 == m1 + 1 && m3 == -2 * m1 - 1 && -m1 >= EXCEPTION_MIN_N,
        Perm::Id => false,
    }
}

/// Whether `x` is on the exception list, closed under the rotation `φ`.
pub fn is_exceptional(x: &AffineWeylElt) -> bool {
    let y = x.phi();
    in_base_family(x) || in_base_family(&y) || in_base_family(&y.phi())
}

/// `Σ ⌈⟨ωᵢ, ν_x − λ⟩⌉`, less one on the exception list.
pub fn codim_roottheoretic(x: &AffineWeylElt, lam: &SlopeSeq) -> Result<i64> {
    let p = poset_of(x);
    if !p.contains(lam) {
        return Err(Error::ElementsNotInPoset(lam.to_string()));
    }
    let exc = is_exceptional(x);
    if exc && *lam == p.nu_x {
        return Err(Error::ExceptionBranchAtGeneric);
    }
    let d = [p.nu_x.l1() - lam.l1(), p.nu_x.l2() - lam.l2()];
    let sum = d[0].ceil().to_integer() + (d[0] + d[1]).ceil().to_integer();
    Ok(sum - exc as i64)
}

/// Slope sequence of `b`, or `λ` directly.
#[derive(Clone, Debug)]
pub enum SlopeSource {
    Matrix(IsoMatrix),
    Slopes(SlopeSeq),
}

/// Non-emptiness of the affine Deligne–Lusztig variety: `λ ∈ N(G)_x`.
pub fn adlv_nonempty(x: &AffineWeylElt, b: &SlopeSource) -> Result<bool> {
    let lam = match b {
        SlopeSource::Matrix(m) => slope_sequence(m)?,
        SlopeSource::Slopes(l) => *l,
    };
    Ok(poset_of(x).contains(&lam))
}

/// `ℓ(x) − ⟨2ρ, λ⟩`.
pub fn conjecture_rhs(x: &AffineWeylElt, lam: &SlopeSeq) -> i64 {
    let pairing = lam.two_rho_pairing();
    debug_assert!(pairing.is_integer());
    x.length() as i64 - pairing.to_integer()
}
