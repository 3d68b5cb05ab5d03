//! Packet-level discrete-event simulation of a leaf-spine data-center fabric whose
//! switch ports schedule flows with multi-level feedback queues (MLFQ).
//!
//! Two scheduler flavors are implemented on identical forwarding machinery:
//!
//! * `static`: demotion thresholds fixed for the whole run (the usual PIAS-style
//!   setup, thresholds typically derived offline from a traffic CDF), and
//! * `awafs`: thresholds that re-derive themselves at runtime, per switch port,
//!   from percentiles of the flow sizes recently observed completing there.
//!
//! The crate is organized as a small core (`engine`, `topology`, `mlfq`, `adapt`,
//! `transport`, `workload`, `metrics`) wired together by `sim`, with scenario
//! configuration and multi-repetition orchestration in `config` and `runner`.
//! Everything is deterministic for a fixed seed: integer-nanosecond time, a
//! stable-ordered event queue, and named ChaCha RNG streams.

pub mod adapt;
pub mod config;
pub mod engine;
pub mod metrics;
pub mod mlfq;
pub mod runner;
pub mod sim;
pub mod topology;
pub mod transport;
pub mod workload;
