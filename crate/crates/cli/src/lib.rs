//! Command-line front end for the gossip age simulator and solvers:
//! experiment plans, CSV interchange, SVG charts, and the four subcommands
//! (`simulate`, `solve`, `compare`, `plot`).

pub mod chart;
pub mod commands;
pub mod csvio;
pub mod plan;
