//! The generic slope and poset shape of `N(G)_x` for every element, keyed by
//! the Weyl part, the chamber, and equalities among the coordinates of `μ`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::affine_weyl::{AffineWeylElt, Perm};
use crate::isocrystal::{q, qi, SlopeSeq, Q};

/// Shape of the poset below the generic slope `ν`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `{ν}`.
    Single,
    /// `{λ ≤ ν}`.
    Le,
    /// `{(ν1, −ν1/2, −ν1/2) ≤ λ ≤ ν}`.
    LowA,
    /// `{(−ν3/2, −ν3/2, ν3) ≤ λ ≤ ν}`.
    LowB,
    /// `{ν} ∪ {λ ≤ ν − (1,0,−1)}`.
    Union,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Single => "{nu}",
            Shape::Le => "lambda <= nu",
            Shape::LowA => "(nu1,-nu1/2,-nu1/2) <= lambda <= nu",
            Shape::LowB => "(-nu3/2,-nu3/2,nu3) <= lambda <= nu",
            Shape::Union => "{nu} u {lambda <= nu-(1,0,-1)}",
        })
    }
}

/// Row guard: `μ[a] + k == μ[b]`, or unconditional.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cond {
    Eq(usize, i32, usize),
    Otherwise,
}

impl Cond {
    fn holds(self, mu: [i32; 3]) -> bool {
        match self {
            Cond::Eq(a, k, b) => mu[a] + k == mu[b],
            Cond::Otherwise => true,
        }
    }

    fn describe(self) -> String {
        match self {
            Cond::Eq(a, 0, b) => format!("mu{} = mu{}", a + 1, b + 1),
            Cond::Eq(a, k, b) => format!("mu{}+{} = mu{}", a + 1, k, b + 1),
            Cond::Otherwise => "otherwise".into(),
        }
    }
}

/// Correction `c` with `ν = sort_desc(−(μ + c))`, in halves.
type Offset = [i64; 3];

struct Row {
    w: Perm,
    chamber: Perm,
    cond: Cond,
    offset: Offset,
    shape: Shape,
}

const fn row(w: Perm, chamber: Perm, cond: Cond, offset: Offset, shape: Shape) -> Row {
    Row {
        w,
        chamber,
        cond,
        offset,
        shape,
    }
}

use Cond::{Eq as When, Otherwise as Any};
use Perm::{Id, S1, S12, S121, S2, S21};
use Shape::{Le, LowA, LowB, Single, Union};

const ONE: Offset = [2, 0, -2];
const ZERO: Offset = [0, 0, 0];

#[rustfmt::skip]
const TABLE: &[Row] = &[
    row(S12, Id,   When(1, 0, 2), [2, -1, -1], Le),
    row(S12, Id,   Any,         ONE,         Le),
    row(S12, S1,   When(0, 1, 2), [1, 0, -1],  Le),
    row(S12, S1,   Any,         ONE,         Le),
    row(S12, S2,   Any,         [2, -2, 0],  Le),
    row(S12, S12,  Any,         ZERO,        Le),
    row(S12, S21,  When(0, 1, 1), [1, -1, 0],  Le),
    row(S12, S21,  Any,         [2, -2, 0],  Le),
    row(S12, S121, Any,         ZERO,        Le),

    row(S21, Id,   When(0, 0, 1), [1, 1, -2],  Le),
    row(S21, Id,   Any,         ONE,         Le),
    row(S21, S1,   Any,         [0, 2, -2],  Le),
    row(S21, S2,   When(0, 1, 2), [1, 0, -1],  Le),
    row(S21, S2,   Any,         ONE,         Le),
    row(S21, S12,  When(1, 1, 2), [0, 1, -1],  Le),
    row(S21, S12,  Any,         [0, 2, -2],  Le),
    row(S21, S21,  Any,         ZERO,        Le),
    row(S21, S121, Any,         ZERO,        Le),

    row(S121, Id,   When(0, 1, 1), ONE,        LowA),
    row(S121, Id,   When(1, 1, 2), ONE,        LowB),
    row(S121, Id,   Any,         ONE,        Union),
    row(S121, S1,   When(0, 1, 2), [1, 0, -1], Single),
    row(S121, S1,   Any,         ONE,        LowA),
    row(S121, S2,   When(0, 1, 2), [1, 0, -1], Single),
    row(S121, S2,   Any,         ONE,        LowB),
    row(S121, S12,  Any,         ZERO,       LowA),
    row(S121, S21,  Any,         ZERO,       LowB),
    row(S121, S121, Any,         ZERO,       Le),

    row(S1, Id,   When(0, 1, 1), [1, -1, 0],   Single),
    row(S1, Id,   Any,         [2, -2, 0],   LowB),
    row(S1, S1,   Any,         ZERO,         LowB),
    row(S1, S2,   When(0, 0, 2), [2, -2, 0],   LowA),
    row(S1, S2,   Any,         [2, -2, 0],   Le),
    row(S1, S12,  When(1, 0, 2), ZERO,         LowA),
    row(S1, S12,  When(0, 0, 2), ZERO,         LowB),
    row(S1, S12,  Any,         ZERO,         Union),
    row(S1, S21,  When(0, 1, 1), [1, -1, 0],   Single),
    row(S1, S21,  Any,         [2, -2, 0],   LowA),
    row(S1, S121, Any,         ZERO,         LowA),

    row(S2, Id,   When(1, 1, 2), [0, 1, -1],   Single),
    row(S2, Id,   Any,         [0, 2, -2],   LowA),
    row(S2, S1,   When(0, 0, 2), [0, 2, -2],   LowB),
    row(S2, S1,   Any,         [0, 2, -2],   Le),
    row(S2, S2,   Any,         ZERO,         LowA),
    row(S2, S12,  When(1, 1, 2), [0, 1, -1],   Single),
    row(S2, S12,  Any,         [0, 2, -2],   LowB),
    row(S2, S21,  When(0, 0, 2), ZERO,         LowA),
    row(S2, S21,  When(0, 0, 1), ZERO,         LowB),
    row(S2, S21,  Any,         ZERO,         Union),
    row(S2, S121, Any,         ZERO,         LowB),
];

/// Uncorrected rows for `(s1, s12(C⁰))` and `(s2, s21(C⁰))`; their generic
/// cells read `λ ≤ ν` where the rotation `φ` transports a union shape.
#[rustfmt::skip]
const UNCORRECTED_ROWS: &[Row] = &[
    row(S1, S12, When(1, 0, 2), ZERO, LowA),
    row(S1, S12, Any,           ZERO, Le),
    row(S2, S21, When(0, 0, 1), ZERO, LowB),
    row(S2, S21, Any,           ZERO, Le),
];

/// A resolved table entry for one element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub w: Perm,
    pub chamber: Perm,
    pub condition: String,
    pub nu: SlopeSeq,
    pub shape: Shape,
}

fn nu_from(mu: [i32; 3], off: Offset) -> SlopeSeq {
    let v = [0, 1, 2].map(|i| -(qi(mu[i] as i64) + q(off[i], 2)));
    SlopeSeq::sorted(v).expect("table offsets give valid slopes")
}

fn lookup(x: &AffineWeylElt, uncorrected: bool) -> TableEntry {
    let (w, mu) = (x.w(), x.mu());
    if w == Id {
        return TableEntry {
            w,
            chamber: x.chamber().0,
            condition: "any".into(),
            nu: x.neg_mu_dom(),
            shape: Single,
        };
    }
    let ch = x.chamber().0;
    let overrides = if uncorrected { UNCORRECTED_ROWS } else { &[] };
    let r = overrides
        .iter()
        .chain(TABLE.iter())
        .find(|r| r.w == w && r.chamber == ch && r.cond.holds(mu))
        .expect("table is total");
    TableEntry {
        w,
        chamber: ch,
        condition: r.cond.describe(),
        nu: nu_from(mu, r.offset),
        shape: r.shape,
    }
}

/// Table entry for `x`.
pub fn table_entry(x: &AffineWeylElt) -> TableEntry {
    lookup(x, false)
}

/// Table entry with the two uncorrected `Le` rows in place of their rotation-consistent versions.
pub fn uncorrected_table_entry(x: &AffineWeylElt) -> TableEntry {
    lookup(x, true)
}

/// Lower corner of the `LowA`/`LowB` intervals.
pub fn lower_corner(nu: &SlopeSeq, shape: Shape) -> Option<[Q; 3]> {
    let two = qi(2);
    match shape {
        LowA => Some([nu.l1(), -nu.l1() / two, -nu.l1() / two]),
        LowB => Some([-nu.l3() / two, -nu.l3() / two, nu.l3()]),
        _ => None,
    }
}
