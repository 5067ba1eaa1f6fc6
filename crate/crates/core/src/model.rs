//! Packets, nodes, and the timestamp rules they live by.
//!
//! Every packet carries two times: the timestamp it *claims* (the only thing
//! a receiving node looks at when deciding which packet to keep) and the time
//! it was *really* generated (what actual staleness is measured against). The
//! two coincide until an adversary rewrites the claimed one, which is the
//! entire attack surface modeled here: a node can be talked into discarding a
//! genuinely fresh packet for a stale one that merely claims to be newer.

use crate::{Error, Result};

/// Identifier of a user node. Ids are 1-based; id 0 is reserved for the
/// source, and in MITM scenarios the relay node takes id `n + 1`.
pub type NodeId = usize;

/// A point in simulated time, in seconds, non-negative and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Timestamp(f64);

impl Timestamp {
    pub const ZERO: Timestamp = Timestamp(0.0);

    /// Wraps a raw time value; panics on negative or non-finite input, which
    /// can only arise from a caller bug, never from simulation dynamics.
    #[inline]
    pub fn new(seconds: f64) -> Self {
        assert!(
            seconds.is_finite() && seconds >= 0.0,
            "timestamp must be finite and non-negative, got {seconds}"
        );
        Timestamp(seconds)
    }

    #[inline]
    pub fn seconds(self) -> f64 {
        self.0
    }

    /// Signed elapsed time from `self` to `later` (negative if `later` is
    /// actually earlier).
    #[inline]
    pub fn elapsed_until(self, later: Timestamp) -> f64 {
        later.0 - self.0
    }
}

/// The dual-timestamp metadata of one packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketMeta {
    /// Timestamp used in freshness comparisons; possibly tampered.
    pub claimed: Timestamp,
    /// Actual generation time at the source; never altered by anyone.
    pub true_origin: Timestamp,
}

impl PacketMeta {
    #[inline]
    pub fn new(claimed: Timestamp, true_origin: Timestamp) -> Self {
        PacketMeta {
            claimed,
            true_origin,
        }
    }

    /// A packet generated right now: claimed and true times agree. This is
    /// what the source emits.
    #[inline]
    pub fn fresh(now: Timestamp) -> Self {
        PacketMeta {
            claimed: now,
            true_origin: now,
        }
    }

    /// Whether the claimed timestamp still matches the generation time.
    #[inline]
    pub fn is_untampered(&self) -> bool {
        self.claimed == self.true_origin
    }
}

/// Per-node simulation state: the resident packet plus lazily accumulated
/// age accounting (`age_integral` holds the integral of the node's
/// instantaneous age over `[0, last_accounted]`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeState {
    pub node_id: NodeId,
    pub packet: PacketMeta,
    pub age_integral: f64,
    pub last_accounted: Timestamp,
}

impl NodeState {
    /// A node at time zero holding a fresh time-zero packet (age 0).
    pub fn new(node_id: NodeId) -> Self {
        NodeState {
            node_id,
            packet: PacketMeta::fresh(Timestamp::ZERO),
            age_integral: 0.0,
            last_accounted: Timestamp::ZERO,
        }
    }
}

/// Attack configuration for a simulated network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdversarySpec {
    /// Honest gossip, no tampering.
    None,
    /// The highest-indexed node is captured. Its outgoing packets are
    /// stamped with the current time with probability `p` (and with time
    /// zero otherwise); its incoming packets are stamped with time zero
    /// with probability `q` (and with the current time otherwise).
    NodeCapture { p: f64, q: f64 },
    /// A relay node intercepts the source feed of the last node and
    /// replays its own resident packet, stamped as current, at the full
    /// per-node gossip rate.
    Mitm,
}

impl AdversarySpec {
    /// Node capture with the default symmetric tampering probability q = p.
    pub fn node_capture(p: f64) -> Self {
        AdversarySpec::NodeCapture { p, q: p }
    }

    pub fn validate(&self) -> Result<()> {
        if let AdversarySpec::NodeCapture { p, q } = self {
            for (name, v) in [("p", *p), ("q", *q)] {
                if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "probability {name} must lie in [0, 1], got {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Timestamp-versioned exchange rule: the incoming packet replaces the
/// resident one only if it claims a strictly fresher timestamp. Ties keep
/// the resident packet; in continuous time they occur with probability zero,
/// and keeping the resident makes the rule a total deterministic function.
#[inline]
pub fn exchange(resident: PacketMeta, incoming: PacketMeta) -> PacketMeta {
    if incoming.claimed > resident.claimed {
        incoming
    } else {
        resident
    }
}

/// Adversarial rewrite of a packet leaving the captured node: the claimed
/// timestamp is raised to `now` when `coin < p` (the packet will then beat
/// any honest resident) and dropped to zero otherwise (it will lose every
/// comparison). The true generation time is untouched either way.
#[inline]
pub fn timestomp_outgoing(pkt: PacketMeta, now: Timestamp, p: f64, coin: f64) -> PacketMeta {
    debug_assert!((0.0..=1.0).contains(&p));
    let claimed = if coin < p { now } else { Timestamp::ZERO };
    PacketMeta {
        claimed,
        true_origin: pkt.true_origin,
    }
}

/// Adversarial rewrite of a packet arriving at the captured node: the
/// claimed timestamp is dropped to zero when `coin < q` (rejected on
/// arrival) and raised to `now` otherwise (accepted). True origin untouched.
#[inline]
pub fn timestomp_incoming(pkt: PacketMeta, now: Timestamp, q: f64, coin: f64) -> PacketMeta {
    debug_assert!((0.0..=1.0).contains(&q));
    let claimed = if coin < q { Timestamp::ZERO } else { now };
    PacketMeta {
        claimed,
        true_origin: pkt.true_origin,
    }
}

/// True instantaneous age of the packet a node holds: time since actual
/// generation, regardless of what the packet claims.
#[inline]
pub fn instantaneous_age(node: &NodeState, now: Timestamp) -> Result<f64> {
    let age = node.packet.true_origin.elapsed_until(now);
    if age < 0.0 {
        return Err(Error::ClockInversion {
            now: now.seconds(),
            bound: node.packet.true_origin.seconds(),
        });
    }
    Ok(age)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pkt(claimed: f64, origin: f64) -> PacketMeta {
        PacketMeta::new(Timestamp::new(claimed), Timestamp::new(origin))
    }

    #[test]
    fn exchange_keeps_fresher_claim() {
        let resident = pkt(5.0, 5.0);
        let incoming = pkt(7.0, 7.0);
        assert_eq!(exchange(resident, incoming), incoming);
    }

    #[test]
    fn exchange_tie_keeps_resident() {
        let resident = pkt(5.0, 5.0);
        let incoming = pkt(5.0, 2.0);
        assert_eq!(exchange(resident, incoming), resident);
    }

    #[test]
    fn tampered_claim_beats_fresher_packet() {
        // A stale packet (origin 1.0) rebranded with claimed 9.0 displaces a
        // genuinely fresher resident.
        let resident = pkt(3.0, 3.0);
        let incoming = pkt(9.0, 1.0);
        assert_eq!(exchange(resident, incoming), incoming);
    }

    #[test]
    fn stomp_outgoing_branches() {
        let p0 = pkt(4.0, 4.0);
        let now = Timestamp::new(10.0);
        let raised = timestomp_outgoing(p0, now, 1.0, 0.3);
        assert_eq!(raised, pkt(10.0, 4.0));
        let dropped = timestomp_outgoing(p0, now, 0.0, 0.3);
        assert_eq!(dropped, pkt(0.0, 4.0));
        // Degenerate now = 0: both branches coincide.
        let zero = timestomp_outgoing(pkt(0.0, 0.0), Timestamp::ZERO, 1.0, 0.3);
        assert_eq!(zero, pkt(0.0, 0.0));
    }

    #[test]
    fn stomp_incoming_branches() {
        let p0 = pkt(8.0, 8.0);
        let now = Timestamp::new(10.0);
        let rejected = timestomp_incoming(p0, now, 1.0, 0.3);
        assert_eq!(rejected, pkt(0.0, 8.0));
        let accepted = timestomp_incoming(p0, now, 0.0, 0.3);
        assert_eq!(accepted, pkt(10.0, 8.0));
        // Threshold semantics: coin strictly below q takes the reject branch.
        let edge = timestomp_incoming(p0, now, 0.5, 0.49);
        assert_eq!(edge.claimed, Timestamp::ZERO);
        let edge = timestomp_incoming(p0, now, 0.5, 0.5);
        assert_eq!(edge.claimed, now);
    }

    #[test]
    fn age_uses_true_origin_not_claimed() {
        let mut node = NodeState::new(1);
        node.packet = pkt(10.0, 4.0); // claims to be current, really 6s old
        let age = instantaneous_age(&node, Timestamp::new(10.0)).unwrap();
        assert_eq!(age, 6.0);
    }

    #[test]
    fn age_of_just_updated_node_is_zero() {
        let mut node = NodeState::new(1);
        node.packet = PacketMeta::fresh(Timestamp::new(10.0));
        assert_eq!(instantaneous_age(&node, Timestamp::new(10.0)).unwrap(), 0.0);
    }

    #[test]
    fn age_signals_clock_inversion() {
        let mut node = NodeState::new(1);
        node.packet = pkt(5.0, 5.0);
        let err = instantaneous_age(&node, Timestamp::new(4.0)).unwrap_err();
        assert!(matches!(err, Error::ClockInversion { .. }));
    }

    #[test]
    fn adversary_probability_validation() {
        assert!(AdversarySpec::NodeCapture { p: 1.2, q: 0.5 }.validate().is_err());
        assert!(AdversarySpec::NodeCapture { p: 0.5, q: -0.1 }.validate().is_err());
        assert!(AdversarySpec::node_capture(0.7).validate().is_ok());
        assert_eq!(
            AdversarySpec::node_capture(0.7),
            AdversarySpec::NodeCapture { p: 0.7, q: 0.7 }
        );
    }
}
