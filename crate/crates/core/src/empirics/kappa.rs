use serde::{Deserialize, Serialize};

use super::{check_modulus, min_prec, sample_cells, MAX_RETRIES};
use crate::affine_weyl::{
    coset_pattern, AffineWeylElt, EntryPattern, PatternKind, ValuationPattern,
};
use crate::error::{Error, Result};
use crate::isocrystal::{slope_sequence, IsoMatrix};
use crate::series::Series;

/// Unipotent lower-triangular group paired with a slice of `xI`.
///
/// Diagonal cells read `Exact { k: 0 }`; sampled elements carry exactly `1` there.
pub fn j_pattern(x: &AffineWeylElt, which: PatternKind) -> Result<ValuationPattern> {
    use EntryPattern::*;
    coset_pattern(x, which)?;
    let [m1, m2, m3] = x.mu();
    let one = Exact { k: 0 };
    let rows = match which {
        PatternKind::K1 => [
            [one, Zero, Zero],
            [Min { k: m2 - m1 }, one, Zero],
            [Min { k: m3 - m1 }, Min { k: m3 - m2 }, one],
        ],
        PatternKind::K2 => [
            [one, Zero, Zero],
            [Min { k: m2 - m1 }, one, Zero],
            [Min { k: m3 - m1 + 1 }, Zero, one],
        ],
        PatternKind::K3 => [
            [one, Zero, Zero],
            [Zero, one, Zero],
            [Min { k: m3 - m1 + 1 }, Min { k: m3 - m2 }, one],
        ],
        _ => {
            return Err(Error::PatternUndefined(format!(
                "no unipotent factor for {which:?}"
            )))
        }
    };
    Ok(ValuationPattern(rows))
}

fn sample_j(pattern: &ValuationPattern, p: u32, prec: i32, seed: u64, trial: u64) -> IsoMatrix {
    let mut rows = sample_cells(pattern, p, prec, seed, trial, 9).rows();
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = Series::one(p, prec);
    }
    IsoMatrix::from_rows(rows).expect("square")
}

/// The unique `j` with `j·A·σ(j)⁻¹` in the first slice, for `A ∈ xI`.
pub fn inverse_kappa(a: &IsoMatrix) -> Result<IsoMatrix> {
    let g = |i, j| a.get(i, j);
    let (b, c) = (g(0, 1), g(0, 2));
    let (e, f) = (g(1, 1), g(1, 2));
    let (h, i) = (g(2, 1), g(2, 2));
    let cinv = c.inv()?;
    let d1 = -(f * &cinv);
    let h1 = (b * i - c * h) * (c * e - b * f).inv()?;
    let g1 = -((i + f * &h1) * &cinv);
    let (p, prec) = (a.modulus(), a.prec());
    let (one, zero) = (Series::one(p, prec), Series::zero(p, prec));
    IsoMatrix::from_rows(vec![
        vec![one.clone(), zero.clone(), zero.clone()],
        vec![d1, one.clone(), zero],
        vec![g1, h1, one],
    ])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaFailure {
    pub trial: u64,
    pub reason: String,
    pub matrix: Option<IsoMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaReport {
    pub x: AffineWeylElt,
    pub which: PatternKind,
    pub trials: u64,
    pub passed: u64,
    /// Trials of the inverse construction; zero where none is implemented.
    pub inverse_trials: u64,
    pub inverse_passed: u64,
    pub unresolved: u64,
    pub failures: Vec<KappaFailure>,
}

impl KappaReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
            && self.passed == self.trials
            && self.inverse_passed == self.inverse_trials
    }
}

enum Check {
    Pass,
    Fail(String, IsoMatrix),
}

fn retrying(prec: i32, mut f: impl FnMut(i32) -> Result<Check>) -> Result<Check> {
    let mut prec = prec;
    for _ in 0..MAX_RETRIES {
        match f(prec) {
            Err(Error::InsufficientPrecision { .. }) => prec *= 2,
            other => return other,
        }
    }
    f(prec)
}

/// Samples `(j, k)` and checks that `j⁻¹·k·σ(j)` lies in `xI` with the slopes of `k`.
///
/// For the first slice the inverse construction is checked on samples of `xI` as well.
pub fn kappa_check(
    x: &AffineWeylElt,
    which: PatternKind,
    trials: u64,
    p: u32,
    seed: u64,
) -> Result<KappaReport> {
    check_modulus(p)?;
    let kp = coset_pattern(x, which)?;
    let jp = j_pattern(x, which)?;
    let xi = coset_pattern(x, PatternKind::XI)?;
    let prec = min_prec(&xi).max(min_prec(&jp)) + 8;
    let mut report = KappaReport {
        x: *x,
        which,
        trials,
        passed: 0,
        inverse_trials: 0,
        inverse_passed: 0,
        unresolved: 0,
        failures: Vec::new(),
    };
    let tally = |r: &mut KappaReport, trial: u64, res: Result<Check>| -> bool {
        match res {
            Ok(Check::Pass) => true,
            Ok(Check::Fail(reason, m)) => {
                r.failures.push(KappaFailure {
                    trial,
                    reason,
                    matrix: Some(m),
                });
                false
            }
            Err(Error::InsufficientPrecision { .. }) => {
                r.unresolved += 1;
                false
            }
            Err(e) => {
                r.failures.push(KappaFailure {
                    trial,
                    reason: e.to_string(),
                    matrix: None,
                });
                false
            }
        }
    };
    for t in 0..trials {
        let res = retrying(prec, |prec| {
            let k = sample_cells(&kp, p, prec, seed, t, 0);
            let j = sample_j(&jp, p, prec, seed, t);
            let a = j.inverse()?.try_mul(&k)?.try_mul(&j.frobenius(1))?;
            if !xi.contains(&a)? {
                return Ok(Check::Fail("product outside xI".into(), a));
            }
            if slope_sequence(&a)? != slope_sequence(&k)? {
                return Ok(Check::Fail("slopes changed".into(), a));
            }
            Ok(Check::Pass)
        });
        if tally(&mut report, t, res) {
            report.passed += 1;
        }
        if which != PatternKind::K1 {
            continue;
        }
        report.inverse_trials += 1;
        let res = retrying(prec, |prec| {
            let a = sample_cells(&xi, p, prec, seed, t, 18);
            let j = inverse_kappa(&a)?;
            if !jp.contains(&j)? {
                return Ok(Check::Fail("recovered j outside its group".into(), a));
            }
            let k = a.sigma_conjugate(&j)?;
            if !kp.contains(&k)? {
                return Ok(Check::Fail("j·A·σ(j)⁻¹ outside the slice".into(), a));
            }
            Ok(Check::Pass)
        });
        if tally(&mut report, t, res) {
            report.inverse_passed += 1;
        }
    }
    Ok(report)
}
