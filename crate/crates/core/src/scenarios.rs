//! Channel-set builders for each network/adversary layout.
//!
//! All layouts share the same skeleton: a source that refreshes each user
//! node at rate λ/n, and full pairwise gossip at rate λ/(n−1) per ordered
//! pair, so every node sends at total rate λ. The builders differ only in
//! which channels the adversary touches:
//!
//! * `node_capture` decorates every channel in and out of node n with a
//!   coin-flipping timestamp stomp.
//! * `node_capture_thinned` replaces those stomped channels with pre-thinned
//!   always-accepted ones at rates (1−q)λ/(n−1) in and pλ/(n−1) out — the
//!   rejected deliveries never affect age, so dropping them from the event
//!   stream is statistically equivalent.
//! * `mitm` inserts a relay node that intercepts the source feed of node n
//!   and replays its own packet, stamped as current, at rate λ.

use crate::engine::{Channel, SimConfig, SimMode, Src, Transform};
use crate::model::{AdversarySpec, NodeId};
use crate::{Error, Result};

/// Which layout a channel set realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Baseline,
    NodeCapture,
    NodeCaptureThinned,
    Mitm,
}

/// Immutable set of Poisson channels for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub channels: Vec<Channel>,
    /// Number of user nodes (excludes the MITM relay).
    pub n: usize,
    pub topology: Topology,
}

impl ChannelSet {
    pub fn total_rate(&self) -> f64 {
        self.channels.iter().map(|c| c.rate).sum()
    }

    /// Number of node-state slots a simulation needs (the MITM relay gets
    /// an extra slot after the user nodes).
    pub fn node_slots(&self) -> usize {
        match self.topology {
            Topology::Mitm => self.n + 1,
            _ => self.n,
        }
    }

    /// Count of regular (honest, un-targeted) nodes; they hold ids 1..=count.
    pub fn regular_count(&self) -> usize {
        match self.topology {
            Topology::Baseline => self.n,
            _ => self.n - 1,
        }
    }

    /// Id of the captured / MITM-fed node, when one exists.
    pub fn target_id(&self) -> Option<NodeId> {
        match self.topology {
            Topology::Baseline => None,
            _ => Some(self.n),
        }
    }

    /// Id of the MITM relay node, when one exists.
    pub fn relay_id(&self) -> Option<NodeId> {
        match self.topology {
            Topology::Mitm => Some(self.n + 1),
            _ => None,
        }
    }
}

/// Verifies that a channel set matches the scenario a config asks for.
pub fn check_compatible(channels: &ChannelSet, config: &SimConfig) -> Result<()> {
    if channels.n != config.n {
        return Err(Error::InvalidConfig(format!(
            "channel set built for n = {}, config has n = {}",
            channels.n, config.n
        )));
    }
    let expected = match (&config.adversary, config.mode) {
        (AdversarySpec::None, _) => Topology::Baseline,
        (AdversarySpec::NodeCapture { .. }, SimMode::ExplicitCoin) => Topology::NodeCapture,
        (AdversarySpec::NodeCapture { .. }, SimMode::Thinned) => Topology::NodeCaptureThinned,
        (AdversarySpec::Mitm, _) => Topology::Mitm,
    };
    if channels.topology != expected {
        return Err(Error::InvalidConfig(format!(
            "channel set topology {:?} does not match configured scenario {:?}",
            channels.topology, expected
        )));
    }
    Ok(())
}

/// Builds the channel set implied by a configuration's adversary and mode.
pub fn build_for(config: &SimConfig) -> Result<ChannelSet> {
    match (&config.adversary, config.mode) {
        (AdversarySpec::None, _) => build_baseline(config.n, config.lambda),
        (AdversarySpec::NodeCapture { p, q }, SimMode::ExplicitCoin) => {
            build_node_capture(config.n, config.lambda, *p, *q)
        }
        (AdversarySpec::NodeCapture { p, q }, SimMode::Thinned) => {
            build_node_capture_thinned(config.n, config.lambda, *p, *q)
        }
        (AdversarySpec::Mitm, _) => build_mitm(config.n, config.lambda),
    }
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidConfig(format!(
            "scenario needs at least {min} user nodes, got {n}"
        )));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(())
}

fn source_channels(n: usize, lambda: f64, channels: &mut Vec<Channel>) {
    for dst in 1..=n {
        channels.push(Channel {
            src: Src::Source,
            dst,
            rate: lambda / n as f64,
            transform: Transform::ForceFresh,
        });
    }
}

/// Adversary-free fully connected network: n source channels plus n(n−1)
/// gossip channels (none for n = 1).
pub fn build_baseline(n: usize, lambda: f64) -> Result<ChannelSet> {
    check_n(n, 1)?;
    check_lambda(lambda)?;
    let mut channels = Vec::with_capacity(n * n);
    source_channels(n, lambda, &mut channels);
    let gossip_rate = lambda / (n as f64 - 1.0);
    for src in 1..=n {
        for dst in 1..=n {
            if src != dst {
                channels.push(Channel {
                    src: Src::Node(src),
                    dst,
                    rate: gossip_rate,
                    transform: Transform::None,
                });
            }
        }
    }
    Ok(ChannelSet {
        channels,
        n,
        topology: Topology::Baseline,
    })
}

/// Node-capture attack, literal form: same channels as the baseline, with
/// coin-flipping stomp transforms on everything in and out of node n. The
/// source feed of node n is untouched (always accepted).
pub fn build_node_capture(n: usize, lambda: f64, p: f64, q: f64) -> Result<ChannelSet> {
    check_n(n, 2)?;
    check_lambda(lambda)?;
    AdversarySpec::NodeCapture { p, q }.validate()?;
    let mut set = build_baseline(n, lambda)?;
    for ch in &mut set.channels {
        match ch.src {
            Src::Node(src) if src == n => ch.transform = Transform::StompOutgoing { p },
            Src::Node(_) if ch.dst == n => ch.transform = Transform::StompIncoming { q },
            _ => {}
        }
    }
    set.topology = Topology::NodeCapture;
    Ok(set)
}

/// Node-capture attack, thinned form: deliveries that would be rejected are
/// removed from the event stream instead of being coin-flipped, and the
/// survivors are always accepted with a current-time stamp. At p = 0 the
/// outgoing channels vanish entirely; at q = 1 the incoming ones do.
pub fn build_node_capture_thinned(n: usize, lambda: f64, p: f64, q: f64) -> Result<ChannelSet> {
    check_n(n, 2)?;
    check_lambda(lambda)?;
    AdversarySpec::NodeCapture { p, q }.validate()?;
    let mut channels = Vec::new();
    source_channels(n, lambda, &mut channels);
    let gossip_rate = lambda / (n as f64 - 1.0);
    for src in 1..n {
        for dst in 1..n {
            if src != dst {
                channels.push(Channel {
                    src: Src::Node(src),
                    dst,
                    rate: gossip_rate,
                    transform: Transform::None,
                });
            }
        }
    }
    if q < 1.0 {
        for src in 1..n {
            channels.push(Channel {
                src: Src::Node(src),
                dst: n,
                rate: (1.0 - q) * gossip_rate,
                transform: Transform::ForceFresh,
            });
        }
    }
    if p > 0.0 {
        for dst in 1..n {
            channels.push(Channel {
                src: Src::Node(n),
                dst,
                rate: p * gossip_rate,
                transform: Transform::ForceFresh,
            });
        }
    }
    Ok(ChannelSet {
        channels,
        n,
        topology: Topology::NodeCaptureThinned,
    })
}

/// MITM attack: the relay (id n + 1) takes over node n's source feed and
/// pushes its own packet to node n at rate λ, stamped as current. Node n
/// still gossips honestly in both directions; the relay receives nothing
/// from the gossip network.
pub fn build_mitm(n: usize, lambda: f64) -> Result<ChannelSet> {
    check_n(n, 2)?;
    check_lambda(lambda)?;
    let relay = n + 1;
    let mut channels = Vec::with_capacity(n * n + 2);
    // Source feeds the regular nodes and the relay, but not node n.
    for dst in 1..n {
        channels.push(Channel {
            src: Src::Source,
            dst,
            rate: lambda / n as f64,
            transform: Transform::ForceFresh,
        });
    }
    channels.push(Channel {
        src: Src::Source,
        dst: relay,
        rate: lambda / n as f64,
        transform: Transform::ForceFresh,
    });
    channels.push(Channel {
        src: Src::Adversary,
        dst: n,
        rate: lambda,
        transform: Transform::ForceFresh,
    });
    let gossip_rate = lambda / (n as f64 - 1.0);
    for src in 1..=n {
        for dst in 1..=n {
            if src != dst {
                channels.push(Channel {
                    src: Src::Node(src),
                    dst,
                    rate: gossip_rate,
                    transform: Transform::None,
                });
            }
        }
    }
    Ok(ChannelSet {
        channels,
        n,
        topology: Topology::Mitm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_counts_and_rates() {
        let set = build_baseline(3, 1.0).unwrap();
        assert_eq!(set.channels.len(), 3 + 6);
        for ch in set.channels.iter().filter(|c| matches!(c.src, Src::Node(_))) {
            assert_eq!(ch.rate, 0.5);
        }
        // Every node sends at total rate lambda.
        for node in 1..=3 {
            let out: f64 = set
                .channels
                .iter()
                .filter(|c| c.src == Src::Node(node))
                .map(|c| c.rate)
                .sum();
            assert!((out - 1.0).abs() < 1e-12);
        }
        assert!((set.total_rate() - (1.0 + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn baseline_single_node_degenerates_to_source_only() {
        let set = build_baseline(1, 2.0).unwrap();
        assert_eq!(set.channels.len(), 1);
        assert_eq!(set.channels[0].src, Src::Source);
        assert_eq!(set.channels[0].rate, 2.0);
        assert!(build_baseline(0, 1.0).is_err());
    }

    #[test]
    fn capture_layout_at_n2() {
        let set = build_node_capture(2, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(set.channels.len(), 4);
        let source_rates: Vec<f64> = set
            .channels
            .iter()
            .filter(|c| c.src == Src::Source)
            .map(|c| c.rate)
            .collect();
        assert_eq!(source_rates, vec![0.5, 0.5]);
        let into_n = set
            .channels
            .iter()
            .find(|c| c.src == Src::Node(1) && c.dst == 2)
            .unwrap();
        assert_eq!(into_n.transform, Transform::StompIncoming { q: 1.0 });
        assert_eq!(into_n.rate, 1.0);
        let out_of_n = set
            .channels
            .iter()
            .find(|c| c.src == Src::Node(2) && c.dst == 1)
            .unwrap();
        assert_eq!(out_of_n.transform, Transform::StompOutgoing { p: 1.0 });
        assert_eq!(out_of_n.rate, 1.0);
    }

    #[test]
    fn capture_stomps_exactly_two_n_minus_one_channels() {
        for n in [2, 5, 17] {
            let set = build_node_capture(n, 1.0, 0.3, 0.6).unwrap();
            let stomped = set
                .channels
                .iter()
                .filter(|c| {
                    matches!(
                        c.transform,
                        Transform::StompOutgoing { .. } | Transform::StompIncoming { .. }
                    )
                })
                .count();
            assert_eq!(stomped, 2 * (n - 1));
            // The captured node's source feed stays a plain fresh delivery.
            let src_to_n = set
                .channels
                .iter()
                .find(|c| c.src == Src::Source && c.dst == n)
                .unwrap();
            assert_eq!(src_to_n.transform, Transform::ForceFresh);
            assert!((set.total_rate() - (n as f64 + 1.0)).abs() < 1e-9);
        }
        assert!(build_node_capture(1, 1.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn thinned_rates_at_half() {
        let set = build_node_capture_thinned(3, 1.0, 0.5, 0.5).unwrap();
        for ch in &set.channels {
            match (ch.src, ch.dst) {
                (Src::Node(s), 3) if s != 3 => {
                    assert_eq!(ch.rate, 0.25);
                    assert_eq!(ch.transform, Transform::ForceFresh);
                }
                (Src::Node(3), _) => {
                    assert_eq!(ch.rate, 0.25);
                    assert_eq!(ch.transform, Transform::ForceFresh);
                }
                _ => {}
            }
        }
    }

    #[test]
    fn thinned_limits_drop_channels() {
        // p = 1: incoming fully blocked, outgoing at full gossip rate.
        let set = build_node_capture_thinned(4, 1.0, 1.0, 1.0).unwrap();
        assert!(!set.channels.iter().any(|c| c.dst == 4 && c.src != Src::Source));
        let out: Vec<&Channel> = set
            .channels
            .iter()
            .filter(|c| c.src == Src::Node(4))
            .collect();
        assert_eq!(out.len(), 3);
        for ch in out {
            assert!((ch.rate - 1.0 / 3.0).abs() < 1e-12);
        }
        // p = 0, q = 0: incoming at full rate always accepted, no outgoing.
        let set = build_node_capture_thinned(4, 1.0, 0.0, 0.0).unwrap();
        assert!(!set.channels.iter().any(|c| c.src == Src::Node(4)));
        let into: Vec<&Channel> = set
            .channels
            .iter()
            .filter(|c| c.dst == 4 && c.src != Src::Source)
            .collect();
        assert_eq!(into.len(), 3);
        for ch in into {
            assert!((ch.rate - 1.0 / 3.0).abs() < 1e-12);
            assert_eq!(ch.transform, Transform::ForceFresh);
        }
    }

    #[test]
    fn thinned_total_rate() {
        // lambda (source) + (n-2) lambda (gossip among regulars)
        // + (1-q) lambda (into node n) + p lambda (out of node n).
        for (n, p, q) in [(3, 0.5, 0.5), (6, 0.25, 0.75), (4, 0.0, 0.0), (5, 1.0, 1.0)] {
            let lambda = 1.0;
            let set = build_node_capture_thinned(n, lambda, p, q).unwrap();
            let want = lambda + (n as f64 - 2.0) * lambda + (1.0 - q) * lambda + p * lambda;
            assert!(
                (set.total_rate() - want).abs() < 1e-9,
                "n={n} p={p} q={q}: total {} want {want}",
                set.total_rate()
            );
        }
    }

    #[test]
    fn mitm_layout_at_n2() {
        let set = build_mitm(2, 1.0).unwrap();
        assert_eq!(set.channels.len(), 5);
        assert_eq!(set.node_slots(), 3);
        assert_eq!(set.relay_id(), Some(3));
        // Relay's only inbound channel is from the source.
        let inbound_relay: Vec<&Channel> =
            set.channels.iter().filter(|c| c.dst == 3).collect();
        assert_eq!(inbound_relay.len(), 1);
        assert_eq!(inbound_relay[0].src, Src::Source);
        assert_eq!(inbound_relay[0].rate, 0.5);
        // No source channel feeds node n directly.
        assert!(!set
            .channels
            .iter()
            .any(|c| c.src == Src::Source && c.dst == 2));
        let feed = set
            .channels
            .iter()
            .find(|c| c.src == Src::Adversary)
            .unwrap();
        assert_eq!((feed.dst, feed.rate), (2, 1.0));
        assert_eq!(feed.transform, Transform::ForceFresh);
    }

    #[test]
    fn mitm_target_keeps_honest_gossip() {
        let set = build_mitm(5, 1.0).unwrap();
        let from_n = set
            .channels
            .iter()
            .filter(|c| c.src == Src::Node(5) && matches!(c.transform, Transform::None))
            .count();
        let into_n = set
            .channels
            .iter()
            .filter(|c| matches!(c.src, Src::Node(_)) && c.dst == 5)
            .count();
        assert_eq!(from_n, 4);
        assert_eq!(into_n, 4);
        assert!(build_mitm(1, 1.0).is_err());
    }

    #[test]
    fn roles_per_topology() {
        let baseline = build_baseline(4, 1.0).unwrap();
        assert_eq!(baseline.regular_count(), 4);
        assert_eq!(baseline.target_id(), None);
        assert_eq!(baseline.relay_id(), None);
        let capture = build_node_capture(4, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(capture.regular_count(), 3);
        assert_eq!(capture.target_id(), Some(4));
        let mitm = build_mitm(4, 1.0).unwrap();
        assert_eq!(mitm.regular_count(), 3);
        assert_eq!(mitm.target_id(), Some(4));
        assert_eq!(mitm.relay_id(), Some(5));
    }
}
