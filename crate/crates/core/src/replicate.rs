//! Seeded replication fan-out.
//!
//! Replications are embarrassingly parallel: each one runs on its own
//! substream seed derived from (master seed, index), workers pull indices
//! from a shared counter, and results are stored by index before any
//! reduction. The aggregate is therefore identical for any worker count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::engine::{run, SimConfig, SimReport};
use crate::rng::replication_seed;
use crate::scenarios::ChannelSet;
use crate::stats::Summary;
use crate::{Error, Result};

/// Per-role summaries across a batch of replications.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSummary {
    pub v1: Summary,
    pub vn: Option<Summary>,
    pub va: Option<Summary>,
    pub total_events: u64,
}

/// Runs `reps` independent replications of `config` over `channels`, with
/// `jobs` worker threads (clamped to [1, reps]). Replication `i` runs with
/// seed `replication_seed(master_seed, i)`; the returned vector is ordered
/// by replication index.
pub fn run_replications(
    config: &SimConfig,
    channels: &ChannelSet,
    reps: usize,
    master_seed: u64,
    jobs: usize,
) -> Result<Vec<SimReport>> {
    if reps == 0 {
        return Err(Error::InvalidConfig("need at least one replication".into()));
    }
    let jobs = jobs.clamp(1, reps);
    let slots: Vec<Mutex<Option<Result<SimReport>>>> =
        (0..reps).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= reps {
                    break;
                }
                let mut cfg = config.clone();
                cfg.seed = replication_seed(master_seed, idx as u64);
                let report = run(cfg, channels);
                *slots[idx].lock().expect("replication slot poisoned") = Some(report);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("replication slot poisoned")
                .expect("every index below reps is claimed by a worker")
        })
        .collect()
}

/// Reduces a batch of reports to per-role summaries. Order-independent: the
/// inputs are already keyed by replication index.
pub fn summarize(reports: &[SimReport]) -> ReplicationSummary {
    let v1: Vec<f64> = reports.iter().map(|r| r.v1_hat).collect();
    let vn: Vec<f64> = reports.iter().filter_map(|r| r.vn_hat).collect();
    let va: Vec<f64> = reports.iter().filter_map(|r| r.va_hat).collect();
    ReplicationSummary {
        v1: Summary::from_samples(&v1),
        vn: (vn.len() == reports.len()).then(|| Summary::from_samples(&vn)),
        va: (va.len() == reports.len()).then(|| Summary::from_samples(&va)),
        total_events: reports.iter().map(|r| r.events).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::build_baseline;

    fn quick_config(n: usize, horizon: f64) -> SimConfig {
        let mut cfg = SimConfig::new(n);
        cfg.horizon = horizon;
        cfg
    }

    #[test]
    fn job_count_does_not_change_results() {
        let channels = build_baseline(3, 1.0).unwrap();
        let cfg = quick_config(3, 100.0);
        let serial = run_replications(&cfg, &channels, 6, 42, 1).unwrap();
        let parallel = run_replications(&cfg, &channels, 6, 42, 4).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn replications_use_distinct_substreams() {
        let channels = build_baseline(3, 1.0).unwrap();
        let cfg = quick_config(3, 100.0);
        let reports = run_replications(&cfg, &channels, 4, 7, 2).unwrap();
        for pair in reports.windows(2) {
            assert_ne!(pair[0].v1_hat, pair[1].v1_hat);
        }
        assert_eq!(reports.len(), 4);
    }

    #[test]
    fn summarize_baseline_has_no_adversary_roles() {
        let channels = build_baseline(2, 1.0).unwrap();
        let cfg = quick_config(2, 50.0);
        let reports = run_replications(&cfg, &channels, 3, 1, 2).unwrap();
        let summary = summarize(&reports);
        assert!(summary.vn.is_none());
        assert!(summary.va.is_none());
        assert!(summary.v1.mean > 0.0);
        assert_eq!(summary.v1.count, 3);
        assert!(summary.total_events > 0);
    }

    #[test]
    fn zero_replications_is_an_error() {
        let channels = build_baseline(2, 1.0).unwrap();
        let cfg = quick_config(2, 50.0);
        assert!(run_replications(&cfg, &channels, 0, 1, 1).is_err());
    }
}
