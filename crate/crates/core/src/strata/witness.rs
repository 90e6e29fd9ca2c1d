use serde::{Deserialize, Serialize};

use super::poset::poset_of;
use crate::affine_weyl::{
    coset_pattern, phi_matrix, psi_matrix, AffineWeylElt, Chamber, PatternKind, Perm,
};
use crate::error::{Error, Result};
use crate::isocrystal::{dominated, qi, IsoMatrix, SlopeSeq, Q};
use crate::series::ceil_q;

/// A matrix in `(xI)_λ` with the pattern it was built in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub x: AffineWeylElt,
    pub lam: SlopeSeq,
    pub matrix: IsoMatrix,
    pub pattern: PatternKind,
    /// Name of the formula, with any transport steps appended.
    pub formula: String,
}

pub const DEFAULT_P: u32 = 11;

/// Precision comfortably above every exponent a witness for `x` uses.
pub fn witness_prec(x: &AffineWeylElt) -> i32 {
    4 * x.mu().iter().map(|m| m.abs()).max().unwrap_or(0) + 16
}

/// `π^ℓ` entries: each cell is a list of (possibly rational) exponents with signs.
type Cell = Vec<(Q, i64)>;

fn build(p: u32, prec: i32, cells: [[Cell; 3]; 3]) -> Result<IsoMatrix> {
    let rows = cells
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| c.iter().map(|&(e, s)| (ceil_q(e), s)).collect::<Vec<_>>())
                .collect()
        })
        .collect::<Vec<Vec<Vec<(i32, i64)>>>>();
    IsoMatrix::from_terms(p, prec, &rows)
}

fn pi(e: Q) -> Cell {
    vec![(e, 1)]
}

fn z() -> Cell {
    Vec::new()
}

fn no_formula(x: &AffineWeylElt, lam: &SlopeSeq) -> Error {
    Error::NoWitnessFormula(format!("{x} at {lam}"))
}

/// Formulas for `x` in the antidominant chamber with `μ2 ≥ 0`.
fn base_witness(
    x: &AffineWeylElt,
    lam: &SlopeSeq,
    p: u32,
    prec: i32,
) -> Result<(IsoMatrix, PatternKind, &'static str)> {
    let [m1, m2, m3] = x.mu().map(|m| qi(m as i64));
    let (l1, l3) = (lam.l1(), lam.l3());
    let one = qi(1);
    match x.w() {
        Perm::S12 => {
            let special = [-m1 - one, (m1 + one) / qi(2), (m1 + one) / qi(2)];
            if lam.parts() == special {
                let m = build(
                    p,
                    prec,
                    [
                        [pi(m1 + one), z(), pi(m1)],
                        [pi(m2), z(), z()],
                        [z(), pi(m3), z()],
                    ],
                )?;
                return Ok((m, PatternKind::XI, "s12-special"));
            }
            if l3 >= -m3 + one {
                let m = build(
                    p,
                    prec,
                    [
                        [pi(-l1), pi(l3 - m2), pi(m1)],
                        [pi(m2), z(), z()],
                        [z(), pi(m3), z()],
                    ],
                )?;
                return Ok((m, PatternKind::XI, "s12"));
            }
        }
        Perm::S21 => {
            let m = build(
                p,
                prec,
                [
                    [pi(-l1), pi(m1), z()],
                    [pi(l3 - m1), z(), pi(m2)],
                    [pi(m3), z(), z()],
                ],
            )?;
            return Ok((m, PatternKind::XI, "s21"));
        }
        Perm::S121 => {
            let nu = poset_of(x).nu_x;
            if *lam == nu && l3 == -m3 + one {
                let m = build(
                    p,
                    prec,
                    [
                        [pi(m1 + one), z(), pi(m1)],
                        [z(), pi(m2), z()],
                        [pi(m3), z(), z()],
                    ],
                )?;
                return Ok((m, PatternKind::K1, "s121-generic"));
            }
            let bound = [-m1 - qi(2), -m2, -m3 + qi(2)];
            if m2 + qi(2) <= m3 && dominated(lam.parts(), bound) {
                if l3 <= -m2 {
                    let b = vec![(-l1 - one, 1), (l3 - m2 - one, 1)];
                    let m = build(
                        p,
                        prec,
                        [
                            [pi(-l1), b, pi(m1)],
                            [pi(m2 + one), pi(m2), z()],
                            [pi(m3), z(), z()],
                        ],
                    )?;
                    return Ok((m, PatternKind::K1, "s121-i"));
                }
                let d = vec![(m3 - one, 1), (l3 - m1 - one, 1)];
                let m = build(
                    p,
                    prec,
                    [
                        [pi(-l1), vec![(m1 + one, -1)], pi(m1)],
                        [d, pi(m2), z()],
                        [pi(m3), z(), z()],
                    ],
                )?;
                return Ok((m, PatternKind::K1, "s121-ii"));
            }
        }
        Perm::S1 => {
            if x.mu() == [-1, 0, 1] {
                let m = build(
                    p,
                    prec,
                    [
                        [z(), pi(-one), z()],
                        [pi(qi(0)), z(), z()],
                        [pi(m3 + one), z(), pi(one)],
                    ],
                )?;
                return Ok((m, PatternKind::K2, "s1-minimal"));
            }
            let m = build(
                p,
                prec,
                [
                    [pi(-l1), pi(m1), z()],
                    [pi(m2), z(), z()],
                    [pi(m3 + one), z(), pi(m3)],
                ],
            )?;
            return Ok((m, PatternKind::K2, "s1"));
        }
        Perm::S2 => {
            let m = if m2 + one < m3 {
                build(
                    p,
                    prec,
                    [
                        [pi(m1), pi(l3 - m2 - one), z()],
                        [pi(m2 + one), z(), pi(m2)],
                        [z(), pi(m3), z()],
                    ],
                )?
            } else {
                build(
                    p,
                    prec,
                    [
                        [pi(m1), z(), z()],
                        [pi(m2 + one), z(), pi(m2)],
                        [z(), pi(m3), z()],
                    ],
                )?
            };
            return Ok((m, PatternKind::K3, "s2"));
        }
        Perm::Id => {}
    }
    Err(no_formula(x, lam))
}

/// A witness in `(xI)_λ` at modulus `p` and precision `prec`.
///
/// Elements outside the antidominant chamber are reached through `φ` and `ψ`.
pub fn witness_with(x: &AffineWeylElt, lam: &SlopeSeq, p: u32, prec: i32) -> Result<Witness> {
    let pos = poset_of(x);
    if !pos.contains(lam) {
        return Err(Error::ElementsNotInPoset(lam.to_string()));
    }
    let done = |matrix, pattern, formula: String| {
        Ok(Witness {
            x: *x,
            lam: *lam,
            matrix,
            pattern,
            formula,
        })
    };
    if x.w() == Perm::Id || x.mu() == [0, 0, 0] {
        return done(
            x.matrix_rep(p, prec),
            PatternKind::XI,
            "representative".into(),
        );
    }
    match x.chamber() {
        Chamber(Perm::Id) => {
            if x.mu()[1] >= 0 {
                let (m, kind, name) = base_witness(x, lam, p, prec)?;
                return done(m, kind, name.into());
            }
            let w = witness_with(&x.psi(), &lam.psi(), p, prec)?;
            done(
                psi_matrix(&w.matrix)?,
                PatternKind::XI,
                format!("{} then psi", w.formula),
            )
        }
        Chamber(Perm::S12) => {
            let w = witness_with(&x.phi().phi(), lam, p, prec)?;
            done(
                phi_matrix(&w.matrix)?,
                PatternKind::XI,
                format!("{} then phi", w.formula),
            )
        }
        Chamber(Perm::S21) => {
            let w = witness_with(&x.phi(), lam, p, prec)?;
            done(
                phi_matrix(&phi_matrix(&w.matrix)?)?,
                PatternKind::XI,
                format!("{} then phi^2", w.formula),
            )
        }
        _ => Err(no_formula(x, lam)),
    }
}

pub fn witness(x: &AffineWeylElt, lam: &SlopeSeq) -> Result<Witness> {
    witness_with(x, lam, DEFAULT_P, witness_prec(x))
}

impl Witness {
    /// Whether the matrix lies in the pattern it claims.
    pub fn in_pattern(&self) -> Result<bool> {
        coset_pattern(&self.x, self.pattern)?.contains(&self.matrix)
    }
}
