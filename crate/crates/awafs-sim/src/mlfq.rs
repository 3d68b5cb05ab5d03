//! Per-port multi-level feedback queue.
//!
//! `k` strict-priority FIFO queues; queue 0 is the highest priority. A data
//! packet is classified by the *cumulative payload bytes this port has seen
//! from its flow, including the packet itself*: demotion happens only when the
//! counter strictly exceeds a threshold, so a flow whose counter lands exactly
//! on `Thr_i` stays in queue i. ACKs bypass classification entirely: they ride
//! the highest-priority queue and never touch the byte counters.

use crate::topology::Packet;
use std::collections::{HashMap, VecDeque};

#[derive(Debug, thiserror::Error)]
pub enum ThresholdError {
    #[error("need at least 2 queues, got {0}")]
    TooFewQueues(usize),
    #[error("expected {expected} thresholds for {queues} queues, got {got}")]
    WrongLength {
        queues: usize,
        expected: usize,
        got: usize,
    },
    #[error("thresholds must be strictly positive")]
    NonPositive,
    #[error("thresholds must be nondecreasing: {prev} followed by {next}")]
    Decreasing { prev: u64, next: u64 },
}

fn validate_thresholds(k: usize, thresholds: &[u64]) -> Result<(), ThresholdError> {
    if thresholds.len() != k - 1 {
        return Err(ThresholdError::WrongLength {
            queues: k,
            expected: k - 1,
            got: thresholds.len(),
        });
    }
    let mut prev = 0u64;
    for &t in thresholds {
        if t == 0 {
            return Err(ThresholdError::NonPositive);
        }
        if t < prev {
            return Err(ThresholdError::Decreasing { prev, next: t });
        }
        prev = t;
    }
    Ok(())
}

/// Queue index (0-based, 0 = highest priority) for a flow whose cumulative
/// payload byte count at this port is `bytes_sent`.
pub fn select_queue(thresholds: &[u64], bytes_sent: u64) -> usize {
    thresholds
        .iter()
        .position(|&t| bytes_sent <= t)
        .unwrap_or(thresholds.len())
}

/// One switch egress port's scheduler state.
pub struct PortScheduler {
    k: usize,
    thresholds: Vec<u64>,
    queues: Vec<VecDeque<Packet>>,
    flow_bytes: HashMap<u64, u64>,
    rejected_updates: u64,
    queued_pkts: usize,
}

impl PortScheduler {
    pub fn new(k: usize, thresholds: Vec<u64>) -> Result<Self, ThresholdError> {
        if k < 2 {
            return Err(ThresholdError::TooFewQueues(k));
        }
        validate_thresholds(k, &thresholds)?;
        Ok(PortScheduler {
            k,
            thresholds,
            queues: (0..k).map(|_| VecDeque::new()).collect(),
            flow_bytes: HashMap::new(),
            rejected_updates: 0,
            queued_pkts: 0,
        })
    }

    pub fn queue_count(&self) -> usize {
        self.k
    }

    pub fn thresholds(&self) -> &[u64] {
        &self.thresholds
    }

    /// Enqueues a packet and returns the queue index it landed in. For data
    /// packets the flow's byte counter is bumped by the payload *first* and the
    /// updated value classifies the packet.
    pub fn enqueue(&mut self, pkt: Packet) -> usize {
        let qi = if pkt.is_ack {
            0
        } else {
            let bytes = self
                .flow_bytes
                .entry(pkt.flow_id)
                .and_modify(|b| *b += pkt.payload as u64)
                .or_insert(pkt.payload as u64);
            select_queue(&self.thresholds, *bytes)
        };
        self.queues[qi].push_back(pkt);
        self.queued_pkts += 1;
        qi
    }

    /// Strict priority: pops from the lowest-indexed nonempty queue.
    pub fn dequeue(&mut self) -> Option<Packet> {
        for q in &mut self.queues {
            if let Some(pkt) = q.pop_front() {
                self.queued_pkts -= 1;
                return Some(pkt);
            }
        }
        None
    }

    pub fn is_empty(&self) -> bool {
        self.queued_pkts == 0
    }

    pub fn queued_pkts(&self) -> usize {
        self.queued_pkts
    }

    /// Installs new thresholds. A malformed vector (wrong length, zero value,
    /// or decreasing) is rejected: the old thresholds stay in force and the
    /// rejection is counted, since a live port must keep classifying packets.
    pub fn set_thresholds(&mut self, thresholds: &[u64]) -> bool {
        match validate_thresholds(self.k, thresholds) {
            Ok(()) => {
                self.thresholds.clear();
                self.thresholds.extend_from_slice(thresholds);
                true
            }
            Err(_) => {
                self.rejected_updates += 1;
                false
            }
        }
    }

    pub fn rejected_updates(&self) -> u64 {
        self.rejected_updates
    }

    /// Drops the byte counter for a flow whose completion this port observed.
    /// If the same flow id shows up again later, its counter restarts at zero.
    pub fn evict_flow(&mut self, flow_id: u64) {
        self.flow_bytes.remove(&flow_id);
    }

    /// Removes byte counters for every flow the predicate rejects. Used by the
    /// simulator to sweep out flows that completed without their final packet
    /// crossing this port (packet spraying makes that the common case).
    pub fn retain_flows<F: FnMut(u64) -> bool>(&mut self, mut keep: F) {
        self.flow_bytes.retain(|&id, _| keep(id));
    }

    pub fn tracked_flows(&self) -> usize {
        self.flow_bytes.len()
    }

    pub fn flow_bytes(&self, flow_id: u64) -> Option<u64> {
        self.flow_bytes.get(&flow_id).copied()
    }
}
