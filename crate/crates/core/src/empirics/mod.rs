//! Monte-Carlo sampling over coset valuation patterns.

mod campaign;
mod codim;
mod kappa;

pub use campaign::{
    covered_pairs, predicate_campaign, search_witness, CampaignCase, Mismatch, PredicateGrid,
    PredicateReport, SearchConfig,
};
pub use codim::{estimate_codim, CodimEstimate};
pub use kappa::{inverse_kappa, j_pattern, kappa_check, KappaFailure, KappaReport};

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affine_weyl::{
    coset_pattern, AffineWeylElt, EntryPattern, PatternKind, ValuationPattern,
};
use crate::error::{Error, Result};
use crate::isocrystal::{slope_sequence, IsoMatrix, SlopeSeq};
use crate::series::{is_prime, Series, MAX_MODULUS};

/// Retries after an `InsufficientPrecision` error, each doubling the precision.
pub const MAX_RETRIES: u32 = 3;

/// Largest unresolved fraction a campaign tolerates.
pub const MAX_UNRESOLVED_RATE: f64 = 1e-3;

/// Cells reserved per trial in the stream numbering.
const STREAM_STRIDE: u64 = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub p: u32,
    pub prec: i32,
    pub trials: u64,
    pub seed: u64,
    pub pattern: ValuationPattern,
    /// Thread count; 0 uses the global pool.
    pub workers: usize,
}

/// Smallest admissible precision for a pattern.
pub fn min_prec(pattern: &ValuationPattern) -> i32 {
    4 * pattern.max_abs_exponent() + 8
}

pub fn check_modulus(p: u32) -> Result<()> {
    if p >= MAX_MODULUS || !is_prime(p) {
        return Err(Error::BadModulus(p));
    }
    Ok(())
}

impl SampleConfig {
    pub fn new(
        p: u32,
        prec: i32,
        trials: u64,
        seed: u64,
        pattern: ValuationPattern,
        workers: usize,
    ) -> Result<Self> {
        let cfg = SampleConfig {
            p,
            prec,
            trials,
            seed,
            pattern,
            workers,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration sampling `xI` at the smallest admissible precision.
    pub fn coset(x: &AffineWeylElt, p: u32, trials: u64, seed: u64) -> Result<Self> {
        let pattern = coset_pattern(x, PatternKind::XI)?;
        SampleConfig::new(p, min_prec(&pattern), trials, seed, pattern, 0)
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_modulus(self.p)?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let need = min_prec(&self.pattern);
        if self.prec < need {
            return Err(Error::Config(format!(
                "precision {} below {need} for this pattern",
                self.prec
            )));
        }
        Ok(())
    }
}

/// Generator for one cell of one trial.
pub(crate) fn cell_rng(seed: u64, trial: u64, cell: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_mul(STREAM_STRIDE).wrapping_add(cell));
    rng
}

/// Random entry obeying `pat`, with coefficients drawn in increasing degree.
///
/// A larger `prec` extends the same series.
pub fn sample_entry(pat: EntryPattern, p: u32, prec: i32, rng: &mut impl Rng) -> Series {
    let (k, unit) = match pat {
        EntryPattern::Zero => return Series::zero(p, prec),
        EntryPattern::Exact { k } => (k, true),
        EntryPattern::Min { k } => (k, false),
    };
    if k >= prec {
        return Series::zero(p, prec);
    }
    let coeffs = (k..prec)
        .map(|e| {
            if unit && e == k {
                rng.random_range(1..p)
            } else {
                rng.random_range(0..p)
            }
        })
        .collect();
    Series::from_dense(p, k, coeffs, prec)
}

/// Matrix with entries drawn from streams `base..base + 9` of a trial.
pub(crate) fn sample_cells(
    pattern: &ValuationPattern,
    p: u32,
    prec: i32,
    seed: u64,
    trial: u64,
    base: u64,
) -> IsoMatrix {
    let entries = (0..9)
        .map(|c| {
            let mut rng = cell_rng(seed, trial, base + c as u64);
            sample_entry(pattern.get(c / 3, c % 3), p, prec, &mut rng)
        })
        .collect();
    IsoMatrix::new(3, entries).expect("nine entries of one modulus")
}

/// The `trial`-th sample of `cfg.pattern`.
pub fn sample_pattern(cfg: &SampleConfig, trial: u64) -> IsoMatrix {
    sample_cells(&cfg.pattern, cfg.p, cfg.prec, cfg.seed, trial, 0)
}

/// Result of computing slopes for one trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Resolved { slopes: SlopeSeq, retries: u32 },
    Unresolved { retries: u32 },
    Failed(Error),
}

/// Applies `f` to the sample at increasing precision until it is decided.
pub fn with_retries<T>(
    prec: i32,
    mut sample: impl FnMut(i32) -> IsoMatrix,
    mut f: impl FnMut(&IsoMatrix) -> Result<T>,
) -> (std::result::Result<T, Error>, u32) {
    let mut prec = prec;
    let mut retries = 0;
    loop {
        match f(&sample(prec)) {
            Err(Error::InsufficientPrecision { .. }) if retries < MAX_RETRIES => {
                retries += 1;
                prec *= 2;
            }
            other => return (other, retries),
        }
    }
}

fn outcome(r: (Result<SlopeSeq>, u32)) -> Outcome {
    match r {
        (Ok(slopes), retries) => Outcome::Resolved { slopes, retries },
        (Err(Error::InsufficientPrecision { .. }), retries) => Outcome::Unresolved { retries },
        (Err(e), _) => Outcome::Failed(e),
    }
}

/// Slopes of the `trial`-th sample of `cfg`, with the retry policy applied.
pub fn sample_slopes(cfg: &SampleConfig, trial: u64) -> Outcome {
    outcome(with_retries(
        cfg.prec,
        |prec| sample_cells(&cfg.pattern, cfg.p, prec, cfg.seed, trial, 0),
        slope_sequence,
    ))
}

/// Counts of sampled slope sequences.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumHistogram {
    #[serde(with = "slope_keys")]
    pub counts: BTreeMap<SlopeSeq, u64>,
    /// Precision retries performed.
    pub errors: u64,
    pub unresolved: u64,
    /// Samples that failed for reasons other than precision, keyed by message.
    pub failures: BTreeMap<String, u64>,
    pub trials: u64,
}

mod slope_keys {
    use std::collections::BTreeMap;

    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    use crate::isocrystal::SlopeSeq;

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<SlopeSeq, u64>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        m.iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect::<BTreeMap<_, _>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<SlopeSeq, u64>, D::Error> {
        BTreeMap::<String, u64>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| Ok((k.parse().map_err(D::Error::custom)?, v)))
            .collect()
    }
}

impl StratumHistogram {
    pub fn record(&mut self, o: Outcome) {
        self.trials += 1;
        match o {
            Outcome::Resolved { slopes, retries } => {
                *self.counts.entry(slopes).or_default() += 1;
                self.errors += retries as u64;
            }
            Outcome::Unresolved { retries } => {
                self.unresolved += 1;
                self.errors += retries as u64;
            }
            Outcome::Failed(e) => *self.failures.entry(e.to_string()).or_default() += 1,
        }
    }

    pub fn merge(mut self, o: StratumHistogram) -> Self {
        for (k, v) in o.counts {
            *self.counts.entry(k).or_default() += v;
        }
        for (k, v) in o.failures {
            *self.failures.entry(k).or_default() += v;
        }
        self.errors += o.errors;
        self.unresolved += o.unresolved;
        self.trials += o.trials;
        self
    }

    pub fn resolved(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn support(&self) -> Vec<SlopeSeq> {
        self.counts.keys().copied().collect()
    }

    /// Most frequent slope sequence; ties go to the larger sequence.
    pub fn mode(&self) -> Option<SlopeSeq> {
        self.counts
            .iter()
            .max_by_key(|(k, v)| (**v, **k))
            .map(|(k, _)| *k)
    }

    /// Fraction of resolved samples equal to `l`.
    pub fn frequency(&self, l: &SlopeSeq) -> f64 {
        self.counts.get(l).copied().unwrap_or(0) as f64 / self.resolved().max(1) as f64
    }

    /// Number of resolved samples with slopes at most `lam`.
    pub fn count_leq(&self, lam: &SlopeSeq) -> u64 {
        self.counts
            .iter()
            .filter(|(k, _)| k.leq(lam))
            .map(|(_, v)| v)
            .sum()
    }

    pub fn unresolved_rate(&self) -> f64 {
        self.unresolved as f64 / self.trials.max(1) as f64
    }

    pub fn failed(&self) -> u64 {
        self.failures.values().sum()
    }

    /// `slopes,count` lines under a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("slopes,count\n");
        for (k, v) in &self.counts {
            out.push_str(&format!("\"{k}\",{v}\n"));
        }
        out
    }
}

/// Runs `f` inside a pool of `workers` threads, or the global pool for 0.
pub(crate) fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(f))
}

/// Histogram of `per_trial` over `0..trials`, merged in a worker-independent way.
pub(crate) fn parallel_histogram(
    trials: u64,
    workers: usize,
    per_trial: impl Fn(u64) -> Outcome + Sync + Send,
) -> Result<StratumHistogram> {
    in_pool(workers, || {
        (0..trials)
            .into_par_iter()
            .fold(StratumHistogram::default, |mut h, t| {
                h.record(per_trial(t));
                h
            })
            .reduce(StratumHistogram::default, StratumHistogram::merge)
    })
}

/// Histogram of slopes over samples of `cfg.pattern`.
pub fn histogram(cfg: &SampleConfig) -> Result<StratumHistogram> {
    cfg.validate()?;
    parallel_histogram(cfg.trials, cfg.workers, |t| sample_slopes(cfg, t))
}

/// Histogram of slopes over `xI`; the pattern in `cfg` is replaced by that of `xI`.
pub fn empirical_poset(x: &AffineWeylElt, cfg: &SampleConfig) -> Result<StratumHistogram> {
    let pattern = coset_pattern(x, PatternKind::XI)?;
    let cfg = SampleConfig {
        pattern,
        prec: cfg.prec.max(min_prec(&pattern)),
        ..cfg.clone()
    };
    histogram(&cfg)
}

/// Histogram over the double coset, sampled as products `i·A` with `i ∈ I` and `A ∈ xI`.
pub fn empirical_poset_double_coset(
    x: &AffineWeylElt,
    cfg: &SampleConfig,
) -> Result<StratumHistogram> {
    let pattern = coset_pattern(x, PatternKind::XI)?;
    let cfg = SampleConfig {
        pattern,
        prec: cfg.prec.max(min_prec(&pattern)),
        ..cfg.clone()
    };
    cfg.validate()?;
    let iw = ValuationPattern::iwahori();
    parallel_histogram(cfg.trials, cfg.workers, |t| {
        outcome(with_retries(
            cfg.prec,
            |prec| {
                let a = sample_cells(&cfg.pattern, cfg.p, prec, cfg.seed, t, 0);
                let i = sample_cells(&iw, cfg.p, prec, cfg.seed, t, 9);
                i.try_mul(&a).expect("same modulus")
            },
            slope_sequence,
        ))
    })
}

/// Machine-readable summary of one sampling run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<AffineWeylElt>,
    pub p: u32,
    pub trials: u64,
    #[serde(with = "slope_keys")]
    pub histogram: BTreeMap<SlopeSeq, u64>,
    pub unresolved: u64,
    pub retries: u64,
    pub failures: BTreeMap<String, u64>,
    pub elapsed_ms: u128,
}

/// Samples `xI` and reports the histogram with timing.
pub fn run_campaign(x: &AffineWeylElt, cfg: &SampleConfig) -> Result<CampaignReport> {
    let start = Instant::now();
    let h = empirical_poset(x, cfg)?;
    Ok(CampaignReport {
        x: Some(*x),
        p: cfg.p,
        trials: h.trials,
        histogram: h.counts,
        unresolved: h.unresolved,
        retries: h.errors,
        failures: h.failures,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Valuation;

    fn x(s: &str) -> AffineWeylElt {
        s.parse().unwrap()
    }

    #[test]
    fn iwahori_samples_have_unit_determinant() {
        let pattern = ValuationPattern::iwahori();
        let cfg = SampleConfig::new(11, 12, 50, 7, pattern, 0).unwrap();
        for t in 0..50 {
            let a = sample_pattern(&cfg, t);
            assert_eq!(a.det().valuation(), Valuation::Exact(0));
            assert!(pattern.contains(&a).unwrap());
        }
    }

    #[test]
    fn samples_lie_in_coset() {
        let e = x("mu=-2,0,2;w=s12");
        let cfg = SampleConfig::coset(&e, 11, 1000, 3).unwrap();
        for t in 0..1000 {
            assert!(cfg.pattern.contains(&sample_pattern(&cfg, t)).unwrap());
        }
    }

    #[test]
    fn deterministic_and_extendable() {
        let e = x("mu=-1,0,1;w=s121");
        let cfg = SampleConfig::coset(&e, 11, 10, 99).unwrap();
        assert_eq!(sample_pattern(&cfg, 4), sample_pattern(&cfg, 4));
        assert_ne!(sample_pattern(&cfg, 4), sample_pattern(&cfg, 5));
        let long = sample_cells(&cfg.pattern, 11, 2 * cfg.prec, 99, 4, 0);
        assert_eq!(long.truncate(cfg.prec), sample_pattern(&cfg, 4));
    }

    #[test]
    fn config_validation() {
        let pattern = coset_pattern(&x("mu=-2,0,2;w=s12"), PatternKind::XI).unwrap();
        assert!(SampleConfig::new(11, 5, 10, 0, pattern, 0).is_err());
        assert!(SampleConfig::new(12, 40, 10, 0, pattern, 0).is_err());
        assert!(SampleConfig::new(11, 40, 0, 0, pattern, 0).is_err());
        assert!(SampleConfig::new(11, 40, 1, 0, pattern, 0).is_ok());
    }

    #[test]
    fn histogram_independent_of_workers() {
        let e = x("mu=-2,0,2;w=s12");
        let cfg = SampleConfig::coset(&e, 11, 300, 5).unwrap();
        let a = empirical_poset(&e, &cfg.clone().with_workers(1)).unwrap();
        let b = empirical_poset(&e, &cfg.with_workers(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, 300);
    }

    #[test]
    fn figure_coset_support() {
        let e = x("mu=-2,0,2;w=s121");
        let cfg = SampleConfig::coset(&e, 11, 2000, 1).unwrap();
        let h = empirical_poset(&e, &cfg).unwrap();
        assert_eq!(
            h.support(),
            vec![SlopeSeq::zero(), "1,0,-1".parse().unwrap()]
        );
        assert_eq!(h.mode(), Some("1,0,-1".parse().unwrap()));
    }

    #[test]
    fn histogram_json_round_trip() {
        let e = x("mu=-1,0,1;w=s12");
        let cfg = SampleConfig::coset(&e, 11, 50, 2).unwrap();
        let h = empirical_poset(&e, &cfg).unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert!(s.contains("\"counts\":{\""));
        let back: StratumHistogram = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
        assert!(h.to_csv().starts_with("slopes,count\n"));
    }
}
