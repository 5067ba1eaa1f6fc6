//! Continuous-time event engine.
//!
//! All transmissions in the network are independent Poisson processes, so
//! the merged event stream is itself Poisson: the engine draws one
//! exponential waiting time at the total rate and picks the firing channel
//! with probability proportional to its rate (a Gillespie-style direct
//! method). Between events every node's age grows at unit rate, which makes
//! the age integral piecewise quadratic and lets it be accumulated exactly —
//! no time discretization anywhere.
//!
//! Age accounting is lazy: only the destination of an event is settled at
//! the event time, and a final sweep settles every node at the horizon.

use crate::model::{
    exchange, instantaneous_age, timestomp_incoming, timestomp_outgoing, AdversarySpec, NodeId,
    NodeState, PacketMeta, Timestamp,
};
use crate::rng::SimRng;
use crate::scenarios::{self, ChannelSet};
use crate::{Error, Result};

/// Sender side of a transmission channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Src {
    /// The source; every delivery carries a brand-new packet.
    Source,
    /// A user node, by 1-based id.
    Node(NodeId),
    /// The MITM relay node (occupies the extra state slot, id n + 1).
    Adversary,
}

/// Transform applied to the in-flight packet copy before delivery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// Deliver as-is; the destination applies the exchange rule.
    None,
    /// Captured node's outgoing stomp: claimed becomes `now` with
    /// probability `p`, zero otherwise.
    StompOutgoing { p: f64 },
    /// Captured node's incoming stomp: claimed becomes zero with
    /// probability `q` (rejected on arrival), `now` otherwise.
    StompIncoming { q: f64 },
    /// Stamp the packet with the current time and accept it unconditionally.
    /// Used for source deliveries, pre-thinned adversary channels, and the
    /// MITM relay feed.
    ForceFresh,
}

/// One Poisson transmission channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub src: Src,
    pub dst: NodeId,
    pub rate: f64,
    pub transform: Transform,
}

/// How node-capture tampering is realized in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    /// Literal model: every delivery touching the captured node flips a coin.
    ExplicitCoin,
    /// Statistically equivalent pre-thinned channel rates, no coins.
    Thinned,
}

/// Full configuration of one simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Number of user nodes (the MITM relay, when present, is extra).
    pub n: usize,
    /// Per-node total transmission rate; the source also updates the
    /// network at this total rate.
    pub lambda: f64,
    pub adversary: AdversarySpec,
    /// Total simulated time.
    pub horizon: f64,
    pub seed: u64,
    /// Fraction of the horizon discarded before averaging starts.
    pub burn_in: f64,
    pub mode: SimMode,
    /// Also track the age of the freshest-claiming node over the prefix
    /// sets {1..k} of regular nodes (costs O(n) per accepted update; used to
    /// validate solver interior values).
    pub track_subset_ages: bool,
}

impl SimConfig {
    /// Defaults mirror the reference experiment setup: λ = 1 and a horizon
    /// of 1000·n seconds.
    pub fn new(n: usize) -> Self {
        SimConfig {
            n,
            lambda: 1.0,
            adversary: AdversarySpec::None,
            horizon: 1000.0 * n as f64,
            seed: 0,
            burn_in: 0.0,
            mode: SimMode::ExplicitCoin,
            track_subset_ages: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("need at least one node".into()));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return Err(Error::InvalidConfig(format!(
                "burn-in fraction must lie in [0, 1), got {}",
                self.burn_in
            )));
        }
        self.adversary.validate()?;
        match self.adversary {
            AdversarySpec::NodeCapture { .. } | AdversarySpec::Mitm if self.n < 2 => Err(
                Error::InvalidConfig("adversarial scenarios need n >= 2".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Time-averaged age estimates from one simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    /// Mean over the regular nodes of their per-node time-averaged ages.
    pub v1_hat: f64,
    /// Captured / MITM-target node, when an adversary is present.
    pub vn_hat: Option<f64>,
    /// MITM relay node.
    pub va_hat: Option<f64>,
    /// Per-node time averages ordered by node id (the MITM relay last).
    pub per_node: Vec<f64>,
    /// Time-averaged age of the freshest-claiming node over the prefix sets
    /// {1..k} of regular nodes, when tracking was enabled.
    pub subset_age_hat: Option<Vec<f64>>,
    /// Number of events processed.
    pub events: u64,
    /// Configuration that produced this report.
    pub config: SimConfig,
}

/// Exponential race over a static set of Poisson channels.
///
/// One exponential draw at the merged total rate gives the waiting time; a
/// second uniform draw picks the firing channel by binary search over the
/// cumulative rates. Exactly two draws per event, in that order, so a run is
/// a pure function of its seed.
#[derive(Debug, Clone)]
pub struct EventSampler {
    cumulative: Vec<f64>,
    total: f64,
}

impl EventSampler {
    pub fn from_rates<I: IntoIterator<Item = f64>>(rates: I) -> Result<Self> {
        let mut cumulative = Vec::new();
        let mut total = 0.0;
        for rate in rates {
            if !(rate.is_finite() && rate > 0.0) {
                return Err(Error::InvalidChannel(format!(
                    "channel rate must be positive, got {rate}"
                )));
            }
            total += rate;
            cumulative.push(total);
        }
        if cumulative.is_empty() || total <= 0.0 {
            return Err(Error::EmptyChannelSet);
        }
        Ok(EventSampler { cumulative, total })
    }

    pub fn total_rate(&self) -> f64 {
        self.total
    }

    /// Draws the next (waiting time, channel index) pair.
    #[inline]
    pub fn next_event(&self, rng: &mut SimRng) -> (f64, usize) {
        let dt = rng.next_exp(self.total);
        let target = rng.next_f64() * self.total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        (dt, idx.min(self.cumulative.len() - 1))
    }
}

/// Advances a node's age accounting to `upto`, exactly.
///
/// Age grows at unit rate between events, so over a span `s` starting at age
/// `a` the integral gains `s·a + s²/2`.
pub fn integrate_age(node: &mut NodeState, upto: Timestamp) -> Result<()> {
    let span = node.last_accounted.elapsed_until(upto);
    if span < 0.0 {
        return Err(Error::ClockInversion {
            now: upto.seconds(),
            bound: node.last_accounted.seconds(),
        });
    }
    let age_at_start = instantaneous_age(node, node.last_accounted)?;
    node.age_integral += span * age_at_start + span * span * 0.5;
    node.last_accounted = upto;
    Ok(())
}

/// Applies one channel firing at time `now` to the node states.
///
/// The in-flight copy of the sender's packet is transformed per the channel,
/// the destination's age integral is settled up to `now` with its pre-event
/// packet, and then the packet is either force-accepted (source deliveries
/// and `ForceFresh` channels) or run through the exchange rule. Returns
/// whether the destination's packet changed.
pub fn apply_event(
    nodes: &mut [NodeState],
    ch: &Channel,
    now: Timestamp,
    rng: &mut SimRng,
) -> Result<bool> {
    let dst_idx = ch
        .dst
        .checked_sub(1)
        .filter(|&i| i < nodes.len())
        .ok_or_else(|| Error::InvalidChannel(format!("destination id {} out of range", ch.dst)))?;
    let src_idx = match ch.src {
        Src::Source => None,
        Src::Node(id) => Some(id.checked_sub(1).filter(|&i| i < nodes.len()).ok_or_else(
            || Error::InvalidChannel(format!("source id {id} out of range")),
        )?),
        Src::Adversary => Some(nodes.len() - 1),
    };
    if src_idx == Some(dst_idx) {
        return Err(Error::InvalidChannel(format!(
            "self-loop on node {}",
            ch.dst
        )));
    }

    let in_flight = match src_idx {
        None => PacketMeta::fresh(now),
        Some(i) => nodes[i].packet,
    };
    let in_flight = match ch.transform {
        Transform::None => in_flight,
        Transform::StompOutgoing { p } => timestomp_outgoing(in_flight, now, p, rng.next_f64()),
        Transform::StompIncoming { q } => timestomp_incoming(in_flight, now, q, rng.next_f64()),
        Transform::ForceFresh => PacketMeta::new(now, in_flight.true_origin),
    };

    integrate_age(&mut nodes[dst_idx], now)?;

    let unconditional =
        matches!(ch.src, Src::Source) || matches!(ch.transform, Transform::ForceFresh);
    let before = nodes[dst_idx].packet;
    let after = if unconditional {
        in_flight
    } else {
        exchange(before, in_flight)
    };
    nodes[dst_idx].packet = after;
    Ok(after != before)
}

/// Record of one processed event, for tests and tracing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    pub channel: usize,
}

/// Running age of the freshest-claiming node over each prefix set {1..k} of
/// regular nodes. Claimed timestamps only ever increase, so the set maximum
/// moves to the updated node exactly when that node's new claim beats the
/// running maximum; the set age is piecewise linear in between and is
/// integrated lazily like per-node ages.
#[derive(Debug, Clone)]
struct SubsetAgeTracker {
    max_claimed: Vec<f64>,
    holder_origin: Vec<f64>,
    integral: Vec<f64>,
    last_accounted: Vec<f64>,
}

impl SubsetAgeTracker {
    fn new(set_count: usize) -> Self {
        SubsetAgeTracker {
            max_claimed: vec![0.0; set_count],
            holder_origin: vec![0.0; set_count],
            integral: vec![0.0; set_count],
            last_accounted: vec![0.0; set_count],
        }
    }

    fn settle(&mut self, set: usize, upto: f64) {
        let span = upto - self.last_accounted[set];
        let age_at_start = self.last_accounted[set] - self.holder_origin[set];
        self.integral[set] += span * age_at_start + span * span * 0.5;
        self.last_accounted[set] = upto;
    }

    /// Called after node `dst` accepted a new packet at time `now`.
    fn on_update(&mut self, dst: NodeId, pkt: PacketMeta, now: f64) {
        // Sets {1..k} with k >= dst contain the updated node.
        for set in (dst - 1)..self.max_claimed.len() {
            self.settle(set, now);
            if pkt.claimed.seconds() > self.max_claimed[set] {
                self.max_claimed[set] = pkt.claimed.seconds();
                self.holder_origin[set] = pkt.true_origin.seconds();
            }
        }
    }

    fn reset_at(&mut self, at: f64) {
        for set in 0..self.max_claimed.len() {
            self.settle(set, at);
            self.integral[set] = 0.0;
        }
    }

    fn finalize(&mut self, upto: f64, window: f64) -> Vec<f64> {
        (0..self.max_claimed.len())
            .map(|set| {
                self.settle(set, upto);
                self.integral[set] / window
            })
            .collect()
    }
}

/// One in-flight simulation. Use [`step`](Simulation::step) to drive it
/// event by event (tests observe the event stream this way) or [`run`] for
/// the whole horizon at once.
pub struct Simulation<'a> {
    config: SimConfig,
    channels: &'a ChannelSet,
    sampler: EventSampler,
    nodes: Vec<NodeState>,
    subsets: Option<SubsetAgeTracker>,
    rng: SimRng,
    now: f64,
    events: u64,
    burn_start: f64,
    burned: bool,
    done: bool,
}

impl<'a> Simulation<'a> {
    pub fn new(config: SimConfig, channels: &'a ChannelSet) -> Result<Simulation<'a>> {
        config.validate()?;
        scenarios::check_compatible(channels, &config)?;
        let sampler = EventSampler::from_rates(channels.channels.iter().map(|c| c.rate))?;
        let nodes = (1..=channels.node_slots()).map(NodeState::new).collect();
        let subsets = config
            .track_subset_ages
            .then(|| SubsetAgeTracker::new(channels.regular_count()));
        let burn_start = config.burn_in * config.horizon;
        Ok(Simulation {
            rng: SimRng::new(config.seed),
            burned: burn_start == 0.0,
            config,
            channels,
            sampler,
            nodes,
            subsets,
            now: 0.0,
            events: 0,
            burn_start,
            done: false,
        })
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    fn settle_burn(&mut self) -> Result<()> {
        let at = Timestamp::new(self.burn_start);
        for node in &mut self.nodes {
            integrate_age(node, at)?;
            node.age_integral = 0.0;
        }
        if let Some(tracker) = &mut self.subsets {
            tracker.reset_at(self.burn_start);
        }
        self.burned = true;
        Ok(())
    }

    /// Processes the next event; returns `None` once the horizon is reached.
    pub fn step(&mut self) -> Result<Option<EventRecord>> {
        if self.done {
            return Ok(None);
        }
        let (dt, idx) = self.sampler.next_event(&mut self.rng);
        let t = self.now + dt;
        if t > self.config.horizon {
            self.done = true;
            return Ok(None);
        }
        if !self.burned && t >= self.burn_start {
            self.settle_burn()?;
        }
        self.now = t;
        let ch = &self.channels.channels[idx];
        let changed = apply_event(&mut self.nodes, ch, Timestamp::new(t), &mut self.rng)?;
        if changed {
            if let Some(tracker) = &mut self.subsets {
                if ch.dst <= self.channels.regular_count() {
                    tracker.on_update(ch.dst, self.nodes[ch.dst - 1].packet, t);
                }
            }
        }
        self.events += 1;
        Ok(Some(EventRecord {
            time: t,
            channel: idx,
        }))
    }

    /// Settles every node at the horizon and produces the report.
    pub fn finish(mut self) -> Result<SimReport> {
        if !self.burned {
            self.settle_burn()?;
        }
        let horizon = Timestamp::new(self.config.horizon);
        let window = self.config.horizon - self.burn_start;
        for node in &mut self.nodes {
            integrate_age(node, horizon)?;
        }
        let per_node: Vec<f64> = self
            .nodes
            .iter()
            .map(|n| n.age_integral / window)
            .collect();
        let regular = self.channels.regular_count();
        let v1_hat = per_node[..regular].iter().sum::<f64>() / regular as f64;
        let vn_hat = self
            .channels
            .target_id()
            .map(|id| per_node[id - 1]);
        let va_hat = self.channels.relay_id().map(|id| per_node[id - 1]);
        let subset_age_hat = self
            .subsets
            .as_mut()
            .map(|t| t.finalize(self.config.horizon, window));
        Ok(SimReport {
            v1_hat,
            vn_hat,
            va_hat,
            per_node,
            subset_age_hat,
            events: self.events,
            config: self.config,
        })
    }
}

/// Runs one simulation over its full horizon.
pub fn run(config: SimConfig, channels: &ChannelSet) -> Result<SimReport> {
    let mut sim = Simulation::new(config, channels)?;
    while sim.step()?.is_some() {}
    sim.finish()
}

/// Builds the channel set implied by `config` and runs one simulation.
pub fn simulate(config: SimConfig) -> Result<SimReport> {
    let channels = scenarios::build_for(&config)?;
    run(config, &channels)
}
