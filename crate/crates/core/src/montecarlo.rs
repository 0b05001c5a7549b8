//! Sampling oracle for the closed-form success probabilities.
//!
//! Every trial draws an independent unit-mean exponential power gain for the
//! serving link and for each interfering link, evaluates
//! `SINR = h_o g_o S_o / (η + Σ_a h_a g_a S_a)` directly, and counts
//! `SINR > γ`. No Laplace transform is involved.
//!
//! Trials are grouped into batches. Batch `b` of link `l` draws from the
//! ChaCha8 stream `(l << 32) | b` of the configured seed, so any assignment
//! of batches to threads yields identical integer tallies.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::LinkGain;
use crate::channel::PowerConfig;
use crate::geometry::CellLayout;
use crate::throughput::{
    Architecture, LinkBudget, LinkModels, RadioConfig, ResourceSharing, ServedSet, ThroughputError,
    UeLinks,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("batch size {batch} must be positive and divide trials {trials}")]
    BadBatch { trials: u64, batch: u64 },
    #[error("too many batches ({0}); at most 2^32 per link")]
    TooManyBatches(u64),
    #[error(transparent)]
    Throughput(#[from] ThroughputError),
    #[error("{0:?} needs a resource sharing configuration")]
    MissingSharing(Architecture),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Trials per deterministic substream.
    pub batch: u64,
    /// Evaluate batches on the rayon pool. Results do not depend on it.
    pub parallel: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            trials: 100_000,
            seed: 0,
            batch: 10_000,
            parallel: true,
        }
    }
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        let batch = [10_000, 5_000, 4_000, 2_500, 2_000, 1_000, 500, 100, 10, 1]
            .into_iter()
            .find(|b| trials.is_multiple_of(*b))
            .unwrap_or(1);
        McConfig {
            trials,
            seed,
            batch,
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<(), McError> {
        if self.trials == 0 {
            return Err(McError::NoTrials);
        }
        if self.batch == 0 || !self.trials.is_multiple_of(self.batch) {
            return Err(McError::BadBatch {
                trials: self.trials,
                batch: self.batch,
            });
        }
        if self.batches() > u32::MAX as u64 {
            return Err(McError::TooManyBatches(self.batches()));
        }
        Ok(())
    }

    pub fn batches(&self) -> u64 {
        self.trials / self.batch
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl McEstimate {
    pub fn from_successes(successes: u64, trials: u64) -> Self {
        let p = successes as f64 / trials as f64;
        McEstimate {
            mean: p,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }
}

/// Closed-form value against its sampled estimate. `sigma` is the binomial
/// standard error implied by the closed form itself, which stays meaningful
/// when the sample frequency is exactly 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agreement {
    pub closed_form: f64,
    pub estimate: McEstimate,
    pub sigma: f64,
}

impl Agreement {
    pub fn z_score(&self) -> f64 {
        let diff = (self.estimate.mean - self.closed_form).abs();
        if diff == 0.0 {
            0.0
        } else if self.sigma == 0.0 {
            f64::INFINITY
        } else {
            diff / self.sigma
        }
    }

    pub fn within(&self, k: f64) -> bool {
        self.z_score() <= k
    }
}

/// Binomial standard error of a frequency estimate of `p` over `trials`.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).max(0.0).sqrt()
}

/// Unit-mean exponential by inversion.
fn exp1(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

fn stream_id(link: u32, batch: u64) -> u64 {
    ((link as u64) << 32) | batch
}

/// Successes of one batch of trials for one receiver.
///
/// The serving gain is drawn first, then interferer gains in order until the
/// outcome is settled; a trial stops consuming randomness once the
/// interference already exceeds what the signal can tolerate.
pub fn batch_successes(
    links: &UeLinks,
    noise_psd: f64,
    gamma: f64,
    seed: u64,
    link: u32,
    batch: u64,
    trials: u64,
) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(link, batch));
    let signal = links.serving.received_psd();
    let mut successes = 0;
    'trial: for _ in 0..trials {
        // SINR > γ  ⇔  Σ h_a g_a S_a < h_o g_o S_o / γ − η
        let budget = exp1(&mut rng) * signal / gamma - noise_psd;
        if budget <= 0.0 {
            continue;
        }
        let mut interference = 0.0;
        for a in &links.interferers {
            interference += exp1(&mut rng) * a.received_psd();
            if interference >= budget {
                continue 'trial;
            }
        }
        successes += 1;
    }
    successes
}

/// Tallies successes for every receiver; `links[i]` uses link index `i`.
fn tally(links: &[&UeLinks], noise_psd: f64, gamma: f64, cfg: &McConfig) -> Vec<u64> {
    let jobs: Vec<(usize, u64)> = (0..links.len())
        .flat_map(|l| (0..cfg.batches()).map(move |b| (l, b)))
        .collect();
    let run = |&(l, b): &(usize, u64)| {
        batch_successes(links[l], noise_psd, gamma, cfg.seed, l as u32, b, cfg.batch)
    };
    let counts: Vec<u64> = if cfg.parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    };
    let mut per_link = vec![0u64; links.len()];
    for (&(l, _), c) in jobs.iter().zip(counts) {
        per_link[l] += c;
    }
    per_link
}

pub fn mc_success_probability(
    serving: &LinkGain,
    interferers: &[LinkGain],
    noise_psd: f64,
    gamma: f64,
    cfg: &McConfig,
) -> Result<McEstimate, McError> {
    cfg.validate()?;
    let links = UeLinks {
        serving: *serving,
        interferers: interferers.to_vec(),
    };
    let successes = tally(&[&links], noise_psd, gamma, cfg)[0];
    Ok(McEstimate::from_successes(successes, cfg.trials))
}

/// Sampled counterpart of one served set: per-UE frequencies and the
/// aggregate rate they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct McSetEstimate {
    pub per_ue: Vec<McEstimate>,
    pub rate: McEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub architecture: Architecture,
    pub routine: McSetEstimate,
    pub incident: McSetEstimate,
    pub backhaul: Option<McSetEstimate>,
}

fn set_estimate(set: &ServedSet, counts: &[u64], gamma: f64, trials: u64) -> McSetEstimate {
    let per_ue: Vec<McEstimate> = counts
        .iter()
        .map(|&c| McEstimate::from_successes(c, trials))
        .collect();
    let k = set.rate_per_success(gamma);
    let means: Vec<f64> = per_ue.iter().map(|e| e.mean).collect();
    let variance: f64 = per_ue.iter().map(|e| e.std_error * e.std_error).sum();
    McSetEstimate {
        rate: McEstimate {
            mean: set.aggregate(&means, gamma),
            std_error: k * variance.sqrt(),
            trials,
        },
        per_ue,
    }
}

/// Samples every receiver of a link budget. Link indices run over routine
/// UEs, then incident UEs, then the backhaul receiver.
pub fn mc_budget(budget: &LinkBudget, cfg: &McConfig) -> Result<McReport, McError> {
    cfg.validate()?;
    let sets: Vec<&ServedSet> = budget.sets().collect();
    let all: Vec<&UeLinks> = sets.iter().flat_map(|s| s.links.iter()).collect();
    let counts = tally(&all, budget.noise_psd, budget.gamma, cfg);

    let mut offset = 0;
    let mut estimates = sets.iter().map(|set| {
        let n = set.links.len();
        let e = set_estimate(set, &counts[offset..offset + n], budget.gamma, cfg.trials);
        offset += n;
        e
    });
    let routine = estimates.next().expect("routine set");
    let incident = estimates.next().expect("incident set");
    let backhaul = estimates.next();
    Ok(McReport {
        architecture: budget.architecture,
        routine,
        incident,
        backhaul,
    })
}

pub fn mc_report(
    layout: &CellLayout,
    models: &LinkModels,
    powers: &PowerConfig,
    sharing: Option<&ResourceSharing>,
    radio: &RadioConfig,
    architecture: Architecture,
    cfg: &McConfig,
) -> Result<McReport, McError> {
    let budget = match architecture {
        Architecture::Conventional => LinkBudget::conventional(layout, models, powers, radio)?,
        arch => {
            let sharing = sharing.ok_or(McError::MissingSharing(arch))?;
            if Some(sharing.mode) != arch.mode() {
                return Err(McError::MissingSharing(arch));
            }
            LinkBudget::proposed(layout, models, powers, sharing, radio)?
        }
    };
    mc_budget(&budget, cfg)
}

/// Closed form against oracle for every per-UE probability and every
/// aggregate rate of a budget, in [`LinkBudget::sets`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetAgreement {
    pub per_ue: Vec<Vec<Agreement>>,
    pub rates: Vec<Agreement>,
}

impl BudgetAgreement {
    pub fn max_z(&self) -> f64 {
        self.per_ue
            .iter()
            .flatten()
            .chain(&self.rates)
            .map(Agreement::z_score)
            .fold(0.0, f64::max)
    }
}

pub fn compare_budget(budget: &LinkBudget, report: &McReport) -> BudgetAgreement {
    let estimates = [
        Some(&report.routine),
        Some(&report.incident),
        report.backhaul.as_ref(),
    ];
    let mut per_ue = Vec::new();
    let mut rates = Vec::new();
    for (set, est) in budget.sets().zip(estimates.into_iter().flatten()) {
        let probs = set.success_probabilities(budget.noise_psd, budget.gamma);
        per_ue.push(
            probs
                .iter()
                .zip(&est.per_ue)
                .map(|(&p, e)| Agreement {
                    closed_form: p,
                    estimate: *e,
                    sigma: binomial_sigma(p, e.trials),
                })
                .collect(),
        );
        let k = set.rate_per_success(budget.gamma);
        let variance: f64 = probs
            .iter()
            .map(|&p| p * (1.0 - p) / est.rate.trials as f64)
            .sum();
        rates.push(Agreement {
            closed_form: set.aggregate(&probs, budget.gamma),
            estimate: est.rate,
            sigma: k * variance.max(0.0).sqrt(),
        });
    }
    BudgetAgreement { per_ue, rates }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_layout;
    use crate::throughput::success_probability;

    #[test]
    fn config_validation() {
        assert_eq!(
            McConfig {
                trials: 0,
                ..McConfig::default()
            }
            .validate(),
            Err(McError::NoTrials)
        );
        assert!(McConfig {
            trials: 100,
            batch: 30,
            ..McConfig::default()
        }
        .validate()
        .is_err());
        assert!(McConfig {
            trials: 100,
            batch: 0,
            ..McConfig::default()
        }
        .validate()
        .is_err());
        assert_eq!(McConfig::new(100_000, 1).batch, 10_000);
        assert_eq!(McConfig::new(7, 1).batch, 1);
        assert_eq!(McConfig::new(1, 1).batches(), 1);
    }

    #[test]
    fn noiseless_interference_free_always_succeeds() {
        let s = LinkGain::new(1e-10, 1e-6);
        let e = mc_success_probability(&s, &[], 0.0, 10.0, &McConfig::new(10_000, 3)).unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn equal_interferer_ratio() {
        // P{h_o / h_a > γ} = 1/(1+γ)
        let s = LinkGain::new(1e-10, 1e-6);
        let e = mc_success_probability(&s, &[s], 0.0, 10.0, &McConfig::new(1_000_000, 11)).unwrap();
        assert!((e.mean - 1.0 / 11.0).abs() <= 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn noise_only_matches_exponential_tail() {
        let s = LinkGain::new(1e-13, 4e-6);
        let noise = 4e-21;
        let p = success_probability(&s, &[], noise, 10.0);
        let e = mc_success_probability(&s, &[], noise, 10.0, &McConfig::new(200_000, 5)).unwrap();
        assert!(
            (e.mean - p).abs() <= 3.0 * binomial_sigma(p, e.trials),
            "{p} vs {e:?}"
        );
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let s = LinkGain::new(1e-10, 1e-6);
        let i = [LinkGain::new(3e-11, 1e-6), LinkGain::new(1e-11, 2e-6)];
        let a = mc_success_probability(&s, &i, 1e-21, 10.0, &McConfig::new(1, 42)).unwrap();
        let b = mc_success_probability(&s, &i, 1e-21, 10.0, &McConfig::new(1, 42)).unwrap();
        assert_eq!(a, b);
        let c = mc_success_probability(&s, &i, 1e-21, 10.0, &McConfig::new(50_000, 42)).unwrap();
        let serial = McConfig {
            parallel: false,
            ..McConfig::new(50_000, 42)
        };
        let d = mc_success_probability(&s, &i, 1e-21, 10.0, &serial).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn std_error_shrinks_with_trials() {
        let s = LinkGain::new(1e-10, 1e-6);
        let i = [LinkGain::new(2e-11, 1e-6)];
        let small = mc_success_probability(&s, &i, 0.0, 10.0, &McConfig::new(50_000, 9)).unwrap();
        let large = mc_success_probability(&s, &i, 0.0, 10.0, &McConfig::new(200_000, 9)).unwrap();
        let ratio = large.std_error / small.std_error;
        assert!((ratio - 0.5).abs() <= 0.1, "ratio {ratio}");
    }

    #[test]
    fn report_requires_matching_sharing() {
        let layout = build_layout(900.0, 1, 4, 200.0, 200.0, 4).unwrap();
        let m = LinkModels::table_defaults();
        let p = PowerConfig::default();
        let radio = RadioConfig::default();
        let fdrs = ResourceSharing::fdrs(9e6, 4.5e6, 1.8e6);
        let cfg = McConfig::new(10, 0);
        assert!(mc_report(
            &layout,
            &m,
            &p,
            None,
            &radio,
            Architecture::ProposedTdrs,
            &cfg
        )
        .is_err());
        assert!(mc_report(
            &layout,
            &m,
            &p,
            Some(&fdrs),
            &radio,
            Architecture::ProposedTdrs,
            &cfg
        )
        .is_err());
        let r = mc_report(
            &layout,
            &m,
            &p,
            Some(&fdrs),
            &radio,
            Architecture::ProposedFdrs,
            &cfg,
        )
        .unwrap();
        assert_eq!(r.routine.per_ue.len(), 4);
        assert_eq!(r.backhaul.unwrap().per_ue.len(), 1);
    }

    #[test]
    fn agreement_edge_cases() {
        let exact = Agreement {
            closed_form: 1.0,
            estimate: McEstimate::from_successes(10, 10),
            sigma: 0.0,
        };
        assert_eq!(exact.z_score(), 0.0);
        let off = Agreement {
            closed_form: 1.0,
            estimate: McEstimate::from_successes(9, 10),
            sigma: 0.0,
        };
        assert!(!off.within(3.0));
    }
}
