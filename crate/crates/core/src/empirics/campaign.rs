use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_modulus, in_pool, min_prec, sample_cells, with_retries};
use crate::affine_weyl::{coset_pattern, AffineWeylElt, EntryPattern, PatternKind};
use crate::error::{Error, Result};
use crate::isocrystal::{slope_sequence, IsoMatrix, SlopeSeq};
use crate::series::Series;
use crate::strata::{poset_of, predicate_for, witness_prec, Case, StratumPredicate, Witness};

/// Grid and sampling budget for a predicate campaign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateGrid {
    /// Elements with `|μi| ≤ bound`.
    pub bound: i32,
    /// Samples per `(x, λ)` pair.
    pub samples: u64,
    pub p: u32,
    pub seed: u64,
    pub workers: usize,
    /// Mismatching matrices kept verbatim in the report.
    pub keep: usize,
}

impl PredicateGrid {
    pub fn new(bound: i32, samples: u64, p: u32, seed: u64) -> Self {
        PredicateGrid {
            bound,
            samples,
            p,
            seed,
            workers: 0,
            keep: 50,
        }
    }
}

/// Totals for one case.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignCase {
    pub pairs: u64,
    pub samples: u64,
    /// Samples on which both sides agreed and held.
    pub inside: u64,
    pub mismatches: u64,
    pub unresolved: u64,
    pub failed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub x: AffineWeylElt,
    pub lam: SlopeSeq,
    pub case: Case,
    pub trial: u64,
    pub predicate: bool,
    pub slopes: SlopeSeq,
    pub matrix: IsoMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateReport {
    pub p: u32,
    pub cases: BTreeMap<String, CampaignCase>,
    pub mismatches: Vec<Mismatch>,
    pub failures: BTreeMap<String, u64>,
    pub elapsed_ms: u128,
}

impl PredicateReport {
    pub fn total(&self) -> CampaignCase {
        self.cases
            .values()
            .fold(CampaignCase::default(), |a, c| CampaignCase {
                pairs: a.pairs + c.pairs,
                samples: a.samples + c.samples,
                inside: a.inside + c.inside,
                mismatches: a.mismatches + c.mismatches,
                unresolved: a.unresolved + c.unresolved,
                failed: a.failed + c.failed,
            })
    }

    pub fn unresolved_rate(&self) -> f64 {
        let t = self.total();
        t.unresolved as f64 / t.samples.max(1) as f64
    }
}

struct PairResult {
    case: Case,
    stats: CampaignCase,
    mismatches: Vec<Mismatch>,
    failures: BTreeMap<String, u64>,
}

fn run_pair(pred: &StratumPredicate, index: u64, grid: &PredicateGrid) -> PairResult {
    let prec = min_prec(&pred.pattern);
    let mut r = PairResult {
        case: pred.case,
        stats: CampaignCase {
            pairs: 1,
            ..CampaignCase::default()
        },
        mismatches: Vec::new(),
        failures: BTreeMap::new(),
    };
    for t in 0..grid.samples {
        let trial = index * grid.samples + t;
        let mut last = None;
        let (res, _) = with_retries(
            prec,
            |prec| sample_cells(&pred.pattern, grid.p, prec, grid.seed, trial, 0),
            |a| {
                last = Some(a.clone());
                let s = slope_sequence(a)?;
                Ok((s, pred.eval(a)?))
            },
        );
        r.stats.samples += 1;
        match res {
            Ok((s, held)) => {
                let truth = s.leq(&pred.lam);
                if truth != held {
                    r.stats.mismatches += 1;
                    if r.mismatches.len() < grid.keep {
                        r.mismatches.push(Mismatch {
                            x: pred.x,
                            lam: pred.lam,
                            case: pred.case,
                            trial,
                            predicate: held,
                            slopes: s,
                            matrix: last.expect("evaluated"),
                        });
                    }
                } else if truth {
                    r.stats.inside += 1;
                }
            }
            Err(Error::InsufficientPrecision { .. }) => r.stats.unresolved += 1,
            Err(e) => {
                r.stats.failed += 1;
                *r.failures.entry(e.to_string()).or_default() += 1;
            }
        }
    }
    r
}

/// Every `(x, λ)` on the grid covered by a closed-stratum description.
pub fn covered_pairs(bound: i32) -> Vec<StratumPredicate> {
    AffineWeylElt::grid(bound)
        .iter()
        .flat_map(|x| {
            poset_of(x)
                .elements()
                .iter()
                .filter_map(|l| predicate_for(x, l).ok())
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Compares each closed-stratum description with the slope oracle on sampled matrices.
pub fn predicate_campaign(grid: &PredicateGrid) -> Result<PredicateReport> {
    check_modulus(grid.p)?;
    let start = Instant::now();
    let pairs = covered_pairs(grid.bound);
    let results: Vec<PairResult> = in_pool(grid.workers, || {
        pairs
            .par_iter()
            .enumerate()
            .map(|(i, pred)| run_pair(pred, i as u64, grid))
            .collect()
    })?;
    let mut report = PredicateReport {
        p: grid.p,
        cases: BTreeMap::new(),
        mismatches: Vec::new(),
        failures: BTreeMap::new(),
        elapsed_ms: 0,
    };
    for r in results {
        let c = report.cases.entry(r.case.to_string()).or_default();
        c.pairs += r.stats.pairs;
        c.samples += r.stats.samples;
        c.inside += r.stats.inside;
        c.mismatches += r.stats.mismatches;
        c.unresolved += r.stats.unresolved;
        c.failed += r.stats.failed;
        for m in r.mismatches {
            if report.mismatches.len() < grid.keep {
                report.mismatches.push(m);
            }
        }
        for (k, v) in r.failures {
            *report.failures.entry(k).or_default() += v;
        }
    }
    report.elapsed_ms = start.elapsed().as_millis();
    Ok(report)
}

/// Budget for a random search over sparse matrices in `xI`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub attempts: u64,
    pub seed: u64,
    pub p: u32,
    /// Exponents above each entry's floor that may carry a term.
    pub depth: i32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            attempts: 20_000,
            seed: 0,
            p: 11,
            depth: 3,
        }
    }
}

fn sparse_entry(
    pat: EntryPattern,
    p: u32,
    prec: i32,
    depth: i32,
    density: f64,
    rng: &mut ChaCha8Rng,
) -> Series {
    let (k, unit) = match pat {
        EntryPattern::Zero => return Series::zero(p, prec),
        EntryPattern::Exact { k } => (k, true),
        EntryPattern::Min { k } => (k, false),
    };
    let sign = |rng: &mut ChaCha8Rng| if rng.random_bool(0.5) { 1 } else { -1 };
    let terms: Vec<(i32, i64)> = (k..=k + depth)
        .filter_map(|e| {
            if (unit && e == k) || rng.random_bool(density) {
                Some((e, sign(rng)))
            } else {
                None
            }
        })
        .collect();
    Series::from_terms_unchecked(p, &terms, prec)
}

/// Searches sparse `{0, ±1}` matrices of `xI` for one with slopes exactly `lam`.
pub fn search_witness(
    x: &AffineWeylElt,
    lam: &SlopeSeq,
    cfg: &SearchConfig,
) -> Result<Option<Witness>> {
    check_modulus(cfg.p)?;
    if !poset_of(x).contains(lam) {
        return Err(Error::ElementsNotInPoset(lam.to_string()));
    }
    let pattern = coset_pattern(x, PatternKind::XI)?;
    let prec = witness_prec(x).max(min_prec(&pattern)) + cfg.depth;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    const DENSITIES: [f64; 4] = [0.1, 0.25, 0.4, 0.6];
    for _ in 0..cfg.attempts {
        let density = DENSITIES[rng.random_range(0..DENSITIES.len())];
        let depth = rng.random_range(0..=cfg.depth);
        let entries = (0..9)
            .map(|c| {
                sparse_entry(
                    pattern.get(c / 3, c % 3),
                    cfg.p,
                    prec,
                    depth,
                    density,
                    &mut rng,
                )
            })
            .collect();
        let a = IsoMatrix::new(3, entries)?;
        if slope_sequence(&a).ok() == Some(*lam) && pattern.contains(&a).unwrap_or(false) {
            return Ok(Some(Witness {
                x: *x,
                lam: *lam,
                matrix: a,
                pattern: PatternKind::XI,
                formula: "search".into(),
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_campaign_agrees() {
        let mut grid = PredicateGrid::new(1, 40, 11, 3);
        grid.workers = 1;
        let r = predicate_campaign(&grid).unwrap();
        let t = r.total();
        assert!(t.pairs > 0);
        assert_eq!(t.mismatches, 0, "{:?}", r.mismatches.first());
        assert_eq!(t.failed, 0, "{:?}", r.failures);
    }

    #[test]
    fn search_finds_lower_stratum() {
        let x: AffineWeylElt = "mu=-2,0,2;w=s121".parse().unwrap();
        let w = search_witness(&x, &SlopeSeq::zero(), &SearchConfig::default())
            .unwrap()
            .expect("found");
        assert_eq!(slope_sequence(&w.matrix).unwrap(), SlopeSeq::zero());
        assert!(w.in_pattern().unwrap());
    }
}
