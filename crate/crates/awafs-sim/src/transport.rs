//! Simplified DCTCP-style transport.
//!
//! Senders keep a congestion window in packets and an EWMA `alpha` of the
//! fraction of ECN-echoed acknowledgments per window: a window containing any
//! marks multiplies cwnd by (1 - alpha/2), an unmarked window grows cwnd by
//! one packet. Loss recovery is timeout-only (duplicate-ack fast retransmit is
//! deliberately absent, so the timeout counter doubles as a starvation
//! detector); a timeout collapses cwnd to one packet and retransmits from the
//! cumulative ack (go-back-N). Receivers ack every data packet, echoing its CE
//! bit, and tolerate arbitrary reordering and duplication.

use crate::engine::{EventHandle, SimTime};
use crate::topology::{Packet, MSS_PAYLOAD};

/// Transport tuning knobs, shared by every flow in a run.
#[derive(Clone, Debug)]
pub struct DctcpParams {
    /// EWMA gain for alpha (the DCTCP `g`).
    pub g: f64,
    /// Initial congestion window, in packets.
    pub init_cwnd_pkts: f64,
    /// Lower bound on the retransmission timeout.
    pub rto_min: SimTime,
    /// Cap on exponential RTO backoff.
    pub rto_max: SimTime,
    /// Initial RTO as a multiple of the unloaded base RTT.
    pub rto_rtt_multiple: u64,
    /// Explicit ECN marking threshold in bytes; None derives it per port from
    /// the link rate (see `ecn_k_for_rate`).
    pub ecn_k_bytes: Option<u64>,
}

impl Default for DctcpParams {
    fn default() -> Self {
        DctcpParams {
            g: 1.0 / 16.0,
            init_cwnd_pkts: 10.0,
            rto_min: SimTime::from_millis(5),
            rto_max: SimTime::from_millis(200),
            rto_rtt_multiple: 3,
            ecn_k_bytes: None,
        }
    }
}

/// Marking threshold for a port of the given rate: 65 full packets' worth of
/// bytes at 10 Gbps, scaled linearly with rate (260 packets at 40 Gbps), so the
/// queueing delay at the marking point is rate-independent.
pub fn ecn_k_for_rate(bps: u64) -> u64 {
    ((65u128 * 1500 * bps as u128) / 10_000_000_000) as u64
}

/// A packet is marked iff the port backlog it joins strictly exceeds K; a
/// backlog of exactly K does not mark.
pub fn should_mark(backlog_bytes: u64, k_bytes: u64) -> bool {
    backlog_bytes > k_bytes
}

/// EWMA step for the marked fraction: alpha <- (1-g)*alpha + g*f.
pub fn alpha_next(alpha: f64, g: f64, f: f64) -> f64 {
    (1.0 - g) * alpha + g * f
}

/// Per-window cwnd rule: multiplicative decrease on a marked window (floored
/// at one packet), additive increase of one packet otherwise.
pub fn cwnd_next(cwnd: f64, alpha: f64, window_had_marks: bool) -> f64 {
    if window_had_marks {
        (cwnd * (1.0 - alpha / 2.0)).max(1.0)
    } else {
        cwnd + 1.0
    }
}

/// Immutable description of one flow.
#[derive(Clone, Copy, Debug)]
pub struct FlowSpec {
    pub id: u64,
    pub src: u32,
    pub dst: u32,
    pub size: u64,
    pub start: SimTime,
}

/// Sorted, disjoint half-open byte ranges received so far.
#[derive(Default, Clone, Debug)]
pub struct IntervalSet {
    ranges: Vec<(u64, u64)>,
}

impl IntervalSet {
    pub fn insert(&mut self, start: u64, end: u64) {
        debug_assert!(start < end);
        let mut lo = 0;
        while lo < self.ranges.len() && self.ranges[lo].1 < start {
            lo += 1;
        }
        let mut hi = lo;
        let mut new_start = start;
        let mut new_end = end;
        while hi < self.ranges.len() && self.ranges[hi].0 <= end {
            new_start = new_start.min(self.ranges[hi].0);
            new_end = new_end.max(self.ranges[hi].1);
            hi += 1;
        }
        self.ranges.splice(lo..hi, [(new_start, new_end)]);
    }

    /// Highest byte offset b such that [0, b) is fully present.
    pub fn prefix(&self) -> u64 {
        match self.ranges.first() {
            Some(&(0, end)) => end,
            _ => 0,
        }
    }

    pub fn total_bytes(&self) -> u64 {
        self.ranges.iter().map(|&(a, b)| b - a).sum()
    }

    pub fn span_count(&self) -> usize {
        self.ranges.len()
    }
}

/// What an incoming ack did to the sender.
#[derive(Debug, PartialEq, Eq)]
pub enum AckOutcome {
    /// New data acknowledged; `completed` when the whole flow is now acked.
    Progress { completed: bool },
    /// Duplicate or stale ack; ignored entirely.
    Stale,
}

fn window_bytes(cwnd_pkts: f64) -> u64 {
    ((cwnd_pkts * MSS_PAYLOAD as f64).floor() as u64).max(MSS_PAYLOAD)
}

/// Full per-flow state: sender, receiver, and bookkeeping for metrics.
pub struct FlowState {
    pub spec: FlowSpec,
    // --- sender ---
    pub next_seq: u64,
    pub bytes_acked: u64,
    pub cwnd: f64,
    pub alpha: f64,
    window_end: u64,
    acked_in_window: u64,
    marked_in_window: u64,
    pub rto: SimTime,
    rto_initial: SimTime,
    pub rto_handle: Option<EventHandle>,
    pub timeout_count: u64,
    pub completed_at: Option<SimTime>,
    // --- receiver ---
    pub received: IntervalSet,
    // --- stats ---
    pub max_queue_index: usize,
    pub injected_pkts: u64,
    pub delivered_pkts: u64,
}

impl FlowState {
    pub fn new(spec: FlowSpec, params: &DctcpParams, base_rtt: SimTime) -> FlowState {
        let rto_initial = SimTime(
            (base_rtt.as_nanos() * params.rto_rtt_multiple).max(params.rto_min.as_nanos()),
        );
        let cwnd = params.init_cwnd_pkts.max(1.0);
        FlowState {
            spec,
            next_seq: 0,
            bytes_acked: 0,
            cwnd,
            alpha: 0.0,
            window_end: window_bytes(cwnd),
            acked_in_window: 0,
            marked_in_window: 0,
            rto: rto_initial,
            rto_initial,
            rto_handle: None,
            timeout_count: 0,
            completed_at: None,
            received: IntervalSet::default(),
            max_queue_index: 0,
            injected_pkts: 0,
            delivered_pkts: 0,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.completed_at.is_some()
    }

    fn window_limit(&self) -> u64 {
        window_bytes(self.cwnd)
    }

    /// Whether the sender may emit another packet right now.
    pub fn can_send(&self) -> bool {
        self.next_seq < self.spec.size && self.next_seq - self.bytes_acked < self.window_limit()
    }

    /// Builds the next data packet and advances the send pointer. The packet
    /// covering the final byte carries the end-of-flow mark and the flow size.
    pub fn next_packet(&mut self) -> Packet {
        debug_assert!(self.can_send());
        let len = MSS_PAYLOAD.min(self.spec.size - self.next_seq);
        let seq = self.next_seq;
        self.next_seq += len;
        let last = self.next_seq == self.spec.size;
        self.injected_pkts += 1;
        Packet {
            flow_id: self.spec.id,
            src: self.spec.src,
            dst: self.spec.dst,
            seq_no: seq,
            payload: len as u32,
            is_ack: false,
            ecn_ce: false,
            ecn_echo: false,
            flow_end_mark: last,
            final_size: if last { self.spec.size } else { 0 },
        }
    }

    /// Receiver side: registers an arrived data packet and returns the ACK to
    /// send back (cumulative ack + CE echo of this packet). Duplicates from
    /// go-back-N retransmission are absorbed by the interval set.
    pub fn on_data(&mut self, pkt: &Packet) -> Packet {
        debug_assert!(!pkt.is_ack);
        self.delivered_pkts += 1;
        self.received
            .insert(pkt.seq_no, pkt.seq_no + pkt.payload as u64);
        Packet {
            flow_id: pkt.flow_id,
            src: pkt.dst,
            dst: pkt.src,
            seq_no: self.received.prefix(),
            payload: 0,
            is_ack: true,
            ecn_ce: false,
            ecn_echo: pkt.ecn_ce,
            flow_end_mark: false,
            final_size: 0,
        }
    }

    /// Sender side: processes a cumulative ack. Stale acks (no new data) are
    /// ignored; progress acks feed the per-window mark accounting and roll the
    /// window once the current cwnd's worth of data has been acknowledged.
    pub fn on_ack(&mut self, ack: u64, ecn_echo: bool, params: &DctcpParams) -> AckOutcome {
        if ack <= self.bytes_acked || self.is_complete() {
            return AckOutcome::Stale;
        }
        self.bytes_acked = ack;
        if self.next_seq < self.bytes_acked {
            // A retransmission pass got outrun by acks for the original copies.
            self.next_seq = self.bytes_acked;
        }
        self.acked_in_window += 1;
        if ecn_echo {
            self.marked_in_window += 1;
        }
        if self.bytes_acked >= self.window_end {
            let f = self.marked_in_window as f64 / self.acked_in_window as f64;
            self.alpha = alpha_next(self.alpha, params.g, f);
            self.cwnd = cwnd_next(self.cwnd, self.alpha, self.marked_in_window > 0);
            self.acked_in_window = 0;
            self.marked_in_window = 0;
            self.window_end = self.bytes_acked + self.window_limit();
        }
        // Successful progress re-arms backoff from the initial RTO.
        self.rto = self.rto_initial;
        AckOutcome::Progress {
            completed: self.bytes_acked >= self.spec.size,
        }
    }

    /// Timeout: count it, collapse to one packet, rewind the send pointer to
    /// the cumulative ack (go-back-N), and double the RTO up to the cap.
    pub fn on_timeout(&mut self, params: &DctcpParams) {
        self.timeout_count += 1;
        self.cwnd = 1.0;
        self.next_seq = self.bytes_acked;
        self.rto = SimTime((self.rto.as_nanos() * 2).min(params.rto_max.as_nanos()));
        self.acked_in_window = 0;
        self.marked_in_window = 0;
        self.window_end = self.bytes_acked + self.window_limit();
    }
}
