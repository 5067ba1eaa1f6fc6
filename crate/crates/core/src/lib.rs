//! Age of information in a fully connected gossip network, with and without
//! timestamp-manipulation attacks.
//!
//! A source holds the current version of a file and refreshes `n` user
//! nodes at total rate λ; the nodes gossip their packets pairwise, keeping
//! whichever packet *claims* the fresher timestamp. An adversary that
//! rewrites timestamps at a single node — or that replays stale packets to a
//! single node as a man-in-the-middle — can drag the whole network's true
//! age from logarithmic in `n` up to linear.
//!
//! The crate provides two independent routes to the same quantities:
//!
//! * [`engine`] / [`scenarios`]: an exact continuous-time event simulation
//!   over Poisson transmission channels (no time discretization; age
//!   integrals are accumulated in closed form between events);
//! * [`analytics`]: O(n) solvers for the stationary expected ages, derived
//!   from the balance equations of the same dynamics.
//!
//! [`replicate`] fans seeded replications across worker threads with
//! order-independent aggregation, so every experiment is reproducible from
//! a single master seed.

pub mod analytics;
pub mod engine;
pub mod model;
pub mod replicate;
pub mod rng;
pub mod scenarios;
pub mod stats;

pub use analytics::{
    asymptotics, harmonic, solve_baseline, solve_mitm, solve_node_capture, AgeAsymptotics,
    RecursionSolution,
};
pub use engine::{
    apply_event, integrate_age, run, simulate, Channel, EventRecord, EventSampler, SimConfig,
    SimMode, SimReport, Simulation, Src, Transform,
};
pub use model::{
    exchange, instantaneous_age, timestomp_incoming, timestomp_outgoing, AdversarySpec, NodeId,
    NodeState, PacketMeta, Timestamp,
};
pub use replicate::{run_replications, summarize, ReplicationSummary};
pub use rng::{replication_seed, SimRng};
pub use scenarios::{
    build_baseline, build_for, build_mitm, build_node_capture, build_node_capture_thinned,
    ChannelSet, Topology,
};
pub use stats::Summary;

/// Errors surfaced by simulation and solver entry points.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A time argument ran backwards relative to already-accounted state;
    /// indicates an engine or caller bug, never normal dynamics.
    #[error("clock inversion: time {now} precedes already-accounted time {bound}")]
    ClockInversion { now: f64, bound: f64 },
    #[error("channel set is empty or has zero total rate")]
    EmptyChannelSet,
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
