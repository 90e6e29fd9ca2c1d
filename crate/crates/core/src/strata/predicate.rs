use std::fmt;

use serde::{Deserialize, Serialize};

use crate::affine_weyl::{
    coset_pattern, AffineWeylElt, Chamber, PatternKind, Perm, ValuationPattern,
};
use crate::error::{Error, Result};
use crate::isocrystal::{qi, IsoMatrix, SlopeSeq};

/// Which closed-stratum description applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    IAi,
    IAii,
    IIAi,
    IIAii,
    /// `μ2+1 < μ3`, small `λ3`.
    IIIAi,
    /// `μ2+1 < μ3`, large `λ3`.
    IIIAii,
    /// `μ2+1 = μ3`: the subcase is chosen by whether `d` vanishes.
    IIIAb,
    IVA,
    VAi,
    VAii,
    VIA,
    IIBi,
    IIBii,
}

impl Case {
    pub const ALL: [Case; 13] = [
        Case::IAi,
        Case::IAii,
        Case::IIAi,
        Case::IIAii,
        Case::IIIAi,
        Case::IIIAii,
        Case::IIIAb,
        Case::IVA,
        Case::VAi,
        Case::VAii,
        Case::VIA,
        Case::IIBi,
        Case::IIBii,
    ];
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::IAi => "IA-i",
            Case::IAii => "IA-ii",
            Case::IIAi => "IIA-i",
            Case::IIAii => "IIA-ii",
            Case::IIIAi => "IIIA-i",
            Case::IIIAii => "IIIA-ii",
            Case::IIIAb => "IIIA-boundary",
            Case::IVA => "IVA",
            Case::VAi => "VA-i",
            Case::VAii => "VA-ii",
            Case::VIA => "VIA",
            Case::IIBi => "IIB-i",
            Case::IIBii => "IIB-ii",
        };
        f.write_str(s)
    }
}

/// A membership test for `{A : ν̄(A) ≤ λ}` on a coset pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumPredicate {
    pub case: Case,
    pub x: AffineWeylElt,
    pub lam: SlopeSeq,
    /// Matrices the predicate is evaluated on.
    pub pattern: ValuationPattern,
}

/// `a ∈ P^{−λ1}` and `ae − bd ∈ P^{λ3}`.
fn minor_condition(a: &IsoMatrix, lam: &SlopeSeq) -> Result<bool> {
    let g = |i, j| a.get(i, j);
    if !g(0, 0).in_power_q(-lam.l1())? {
        return Ok(false);
    }
    (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)).in_power_q(lam.l3())
}

/// `a ∈ P^{−λ1}` and `σ(d)b + σ(g)c ∈ P^{λ3}`.
fn twisted_condition(a: &IsoMatrix, lam: &SlopeSeq) -> Result<bool> {
    let g = |i, j| a.get(i, j);
    if !g(0, 0).in_power_q(-lam.l1())? {
        return Ok(false);
    }
    (g(1, 0).frobenius(1) * g(0, 1) + g(2, 0).frobenius(1) * g(0, 2)).in_power_q(lam.l3())
}

impl StratumPredicate {
    pub fn eval(&self, a: &IsoMatrix) -> Result<bool> {
        let lam = &self.lam;
        match self.case {
            Case::IAi | Case::IIAi | Case::IIIAi | Case::IIBi => minor_condition(a, lam),
            Case::IAii | Case::IIAii | Case::IIIAii | Case::IIBii => twisted_condition(a, lam),
            Case::IIIAb => {
                if a.get(1, 0).is_zero() {
                    minor_condition(a, lam)
                } else {
                    twisted_condition(a, lam)
                }
            }
            Case::IVA => a.get(0, 0).in_power_q(-lam.l1()),
            Case::VAi | Case::VIA => Ok(true),
            Case::VAii => {
                let g = |i, j| a.get(i, j);
                (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)).in_power_q(lam.l3())
            }
        }
    }
}

fn not_applicable(x: &AffineWeylElt, lam: &SlopeSeq) -> Error {
    Error::CaseNotApplicable(format!("{x} at {lam}"))
}

/// The closed-stratum description for `(x, λ)`, if one of the covered cases applies.
pub fn predicate_for(x: &AffineWeylElt, lam: &SlopeSeq) -> Result<StratumPredicate> {
    let [m1, m2, m3] = x.mu();
    let l3 = lam.l3();
    let q = |n: i32| qi(n as i64);
    let half = crate::isocrystal::q(1, 2);
    let mk = |case: Case, kind: PatternKind| -> Result<StratumPredicate> {
        Ok(StratumPredicate {
            case,
            x: *x,
            lam: *lam,
            pattern: coset_pattern(x, kind)?,
        })
    };
    if x.w() == Perm::Id {
        return mk(Case::VIA, PatternKind::XI);
    }
    let ch = x.chamber();
    if ch == Chamber::ANTIDOMINANT && m2 >= 0 {
        match x.w() {
            Perm::S12 => {
                if q(-m3) + half <= l3 && l3 <= q(-m2 + 1) {
                    return mk(Case::IAi, PatternKind::XI);
                }
                if l3 > q(-m2 + 1) {
                    return mk(Case::IAii, PatternKind::XI);
                }
            }
            Perm::S21 => {
                if q(-m3 + 1) <= l3 && l3 <= q(-m2) {
                    return mk(Case::IIAi, PatternKind::XI);
                }
                if l3 > q(-m2) {
                    return mk(Case::IIAii, PatternKind::XI);
                }
            }
            Perm::S121 => {
                if m2 + 1 == m3 {
                    return mk(Case::IIIAb, PatternKind::K1);
                }
                if q(-m3 + 1) <= l3 && l3 <= q(-m2) {
                    return mk(Case::IIIAi, PatternKind::K1);
                }
                if l3 > q(-m2) {
                    return mk(Case::IIIAii, PatternKind::K1);
                }
            }
            Perm::S1 => return mk(Case::IVA, PatternKind::K2),
            Perm::S2 => {
                return mk(
                    if m2 + 1 == m3 { Case::VAi } else { Case::VAii },
                    PatternKind::K3,
                );
            }
            Perm::Id => unreachable!(),
        }
        return Err(not_applicable(x, lam));
    }
    if ch == Chamber(Perm::S1) && x.w() == Perm::S21 && m1 >= 0 && m3 != m1 {
        if q(-m3 + 1) <= l3 && l3 <= q(-m1) {
            return mk(Case::IIBi, PatternKind::XPrimeIPrime);
        }
        if l3 > q(-m1) {
            return mk(Case::IIBii, PatternKind::XPrimeIPrime);
        }
    }
    Err(not_applicable(x, lam))
}

/// Evaluates the closed-stratum description of `(x, λ)` on `a`.
pub fn stratum_predicate(x: &AffineWeylElt, lam: &SlopeSeq, a: &IsoMatrix) -> Result<bool> {
    predicate_for(x, lam)?.eval(a)
}
