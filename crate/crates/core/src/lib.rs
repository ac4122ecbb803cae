//! Deterministic simulation of an edge-based data lake for transportation
//! workloads.
//!
//! The crate is organized around two infrastructure layers and three
//! applications that run on top of them:
//!
//! - [`databus`] — an in-process publish/subscribe bus with MQTT-style
//!   topic filters, connecting every layer of the simulated system.
//! - [`lakecore`] — the logical data lake: a zone-based metadata catalog,
//!   tiered payload storage (device/edge/cloud), batched transfers and a
//!   hot/cold tiering policy.
//! - [`vsn`] — vehicular sensor network offloading: proximity graphs,
//!   closeness-centrality aggregation point selection and upload metrics.
//! - [`handover`] — base-station allocation along a route, handover
//!   sequence extraction and minimal-handover planning.
//! - [`driverid`] — ordinal-pattern features (permutation entropy and
//!   statistical complexity) and small native classifiers for driver
//!   identification.
//! - [`scenario`] / [`pipeline`] — seeded scenario generators and the run
//!   orchestration that wires applications through the bus and the lake.
//!
//! All randomness flows from explicit 64-bit seeds through ChaCha12, so
//! every run is reproducible byte for byte.

pub mod databus;
pub mod driverid;
pub mod handover;
pub mod lakecore;
pub mod pipeline;
pub mod scenario;
pub mod seed;
pub mod vsn;

/// Simulation time in seconds.
pub type SimTime = f64;
