//! Stability intervals by resampling.
//!
//! Only aggregate counts are available, so a university is modelled as
//! `round(n)` papers of which `round(p·n)` are in the top-10% layer. Each
//! replicate resamples that many papers with replacement, which makes the
//! number of top papers in a replicate Binomial(`round(n)`, `k / round(n)`);
//! replicates are drawn from that distribution directly.
//!
//! Bounds are nearest-rank percentiles of the replicate shares. The
//! generator is ChaCha8 seeded from the user seed, with one stream per
//! record so results do not depend on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::ingest::{BoundsSource, Dataset, UniversityRecord};
use crate::{Error, Result};

/// Recorded in run metadata so results can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.10), seed_from_u64, stream = record index";

pub const MIN_REPLICATES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub coverage: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: 1000,
            coverage: 0.95,
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    fn check(&self) -> Result<()> {
        if self.replicates < MIN_REPLICATES {
            return Err(Error::InvalidBootstrap(format!(
                "need at least {MIN_REPLICATES} replicates, got {}",
                self.replicates
            )));
        }
        if !(self.coverage > 0.0 && self.coverage < 1.0) {
            return Err(Error::InvalidBootstrap(format!(
                "coverage must lie in (0, 1), got {}",
                self.coverage
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityInterval {
    pub lower: f64,
    pub upper: f64,
    pub replicates: usize,
    pub coverage: f64,
    pub seed: u64,
}

fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Paper count and top-paper count used for resampling.
pub fn discretize(n: f64, p: f64) -> Result<(u64, u64)> {
    let papers = round_half_up(n);
    if papers.is_nan() || papers < 1.0 {
        return Err(Error::TooFewPapers { n });
    }
    let top = round_half_up(p.clamp(0.0, 1.0) * papers).min(papers);
    Ok((papers as u64, top as u64))
}

/// Top-10% shares of `replicates` resamples, in draw order.
pub fn resample_shares(n: f64, p: f64, replicates: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let (papers, top) = discretize(n, p)?;
    let binomial = Binomial::new(papers, top as f64 / papers as f64)
        .map_err(|e| Error::InvalidBootstrap(e.to_string()))?;
    let total = papers as f64;
    Ok((0..replicates)
        .map(|_| binomial.sample(rng) as f64 / total)
        .collect())
}

/// The `ceil(q·B)`-th smallest of `sorted` (1-based), clamped to the ends.
pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let b = sorted.len();
    // Tolerance so that e.g. 0.025 * 1000 selects rank 25, not 26.
    let rank = (q * b as f64 - 1e-9).ceil().clamp(1.0, b as f64) as usize;
    sorted[rank - 1]
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sorted_shares(n: f64, p: f64, config: &BootstrapConfig, stream: u64) -> Result<Vec<f64>> {
    config.check()?;
    let mut rng = rng_for(config.seed, stream);
    let mut shares = resample_shares(n, p, config.replicates, &mut rng)?;
    shares.sort_by(f64::total_cmp);
    Ok(shares)
}

fn interval_from_stream(n: f64, p: f64, config: &BootstrapConfig, stream: u64) -> Result<StabilityInterval> {
    let shares = sorted_shares(n, p, config, stream)?;
    let tail = (1.0 - config.coverage) / 2.0;
    Ok(StabilityInterval {
        lower: nearest_rank(&shares, tail),
        upper: nearest_rank(&shares, 1.0 - tail),
        replicates: config.replicates,
        coverage: config.coverage,
        seed: config.seed,
    })
}

/// Percentile stability interval for one university.
pub fn stability_interval(n: f64, p: f64, config: &BootstrapConfig) -> Result<StabilityInterval> {
    interval_from_stream(n, p, config, 0)
}

/// The sorted replicate shares behind [`stability_interval`].
pub fn replicate_shares(n: f64, p: f64, config: &BootstrapConfig) -> Result<Vec<f64>> {
    sorted_shares(n, p, config, 0)
}

/// Estimates bounds for records that lack them. Records with published
/// bounds are returned unchanged; records that cannot be resampled are
/// marked [`BoundsSource::Unavailable`].
pub fn fill_missing_bounds(dataset: &Dataset, config: &BootstrapConfig) -> Result<Dataset> {
    config.check()?;
    let fill = |(idx, record): (usize, &UniversityRecord)| -> UniversityRecord {
        let mut out = record.clone();
        if record.interval().is_some() {
            return out;
        }
        match interval_from_stream(record.p, record.pp_top10, config, idx as u64) {
            Ok(iv) => {
                out.ci_lower = Some(iv.lower);
                out.ci_upper = Some(iv.upper);
                out.bounds_source = BoundsSource::Resampled;
            }
            Err(_) => out.bounds_source = BoundsSource::Unavailable,
        }
        out
    };

    #[cfg(feature = "parallel")]
    let records = {
        use rayon::prelude::*;
        dataset.records.par_iter().enumerate().map(fill).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let records = dataset.records.iter().enumerate().map(fill).collect();

    Ok(Dataset {
        records,
        source: dataset.source.clone(),
    })
}
