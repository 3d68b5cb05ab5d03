//! Threshold self-adaptation: each switch port remembers the sizes of flows it
//! recently saw complete (a sliding time window over end-marked packets) and
//! periodically re-derives its MLFQ demotion thresholds as percentiles of that
//! sample. Windows are append-at-tail / prune-at-head, so both maintenance
//! operations are O(1) per entry — the whole sensor costs 12 bytes per entry.

use crate::engine::SimTime;
use crate::mlfq::PortScheduler;
use std::collections::VecDeque;

/// Bytes of switch memory per window entry: a 32-bit timestamp plus a 64-bit
/// flow size, as the wire format would carry them.
pub const ENTRY_BYTES: usize = 12;

/// Memory budget a port's window is reported against (8 KiB).
pub const FOOTPRINT_BOUND_BYTES: usize = 8192;

pub fn window_footprint_bytes(entries: usize) -> usize {
    entries * ENTRY_BYTES
}

/// Sliding multiset of ⟨completion time, flow size⟩ observations at one port.
#[derive(Default)]
pub struct CompletedFlowWindow {
    entries: VecDeque<(SimTime, u64)>,
}

impl CompletedFlowWindow {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends an observation. Callers record in completion order, so this is
    /// always a tail insert.
    pub fn record(&mut self, ts: SimTime, size: u64) {
        debug_assert!(
            self.entries.back().map_or(true, |&(last, _)| ts >= last),
            "window entries must be recorded in time order"
        );
        self.entries.push_back((ts, size));
    }

    /// Drops entries older than `window` before `now`. An entry at exactly
    /// `now - window` is still in range and kept.
    pub fn prune(&mut self, now: SimTime, window: SimTime) {
        let cutoff = now.saturating_sub(window);
        while let Some(&(ts, _)) = self.entries.front() {
            if ts < cutoff {
                self.entries.pop_front();
            } else {
                break;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn footprint_bytes(&self) -> usize {
        window_footprint_bytes(self.entries.len())
    }

    /// Copies the sizes (not timestamps) into `out` for percentile extraction.
    pub fn copy_sizes_into(&self, out: &mut Vec<u64>) {
        out.clear();
        out.extend(self.entries.iter().map(|&(_, s)| s));
    }

    pub fn iter(&self) -> impl Iterator<Item = &(SimTime, u64)> {
        self.entries.iter()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AdaptError {
    #[error("cannot take percentiles of an empty sample")]
    InsufficientData,
    #[error("reference percentile {0} outside (0, 1)")]
    BadPercentile(f64),
}

/// Half-width, in cumulative probability, of the rank band each percentile
/// estimate averages over. A single order statistic is discontinuous in the
/// sample: where the size distribution has a sparse stretch right at a
/// reference percentile, the estimate jumps across the gap whenever the rank
/// count shifts by one. Averaging the order statistics between ranks
/// (p - band) * n and (p + band) * n varies continuously with the window
/// contents, while a point mass at the percentile still yields it exactly.
pub const QUANTILE_HALF_BAND: f64 = 0.05;

/// Nearest-rank: the ceil(p*n)-th smallest element (1-based), clamped into
/// the sample. The tiny epsilon absorbs f64 noise when p*n is an exact
/// integer (e.g. 0.1*30).
fn nearest_rank(n: usize, p: f64) -> usize {
    let raw = (p * n as f64 - 1e-9).ceil() as usize;
    raw.clamp(1, n)
}

/// Demotion thresholds from `sizes` at `ref_pcts`: for each reference
/// percentile, the mean (rounded half-up) of the sorted sizes between the
/// nearest ranks of p - QUANTILE_HALF_BAND and p + QUANTILE_HALF_BAND,
/// inclusive. `sizes` is sorted in place. Nondecreasing `ref_pcts` give
/// nondecreasing thresholds (both band ends move right, and on sorted data
/// that can only raise the mean), and every threshold lies within the
/// observed size range.
pub fn percentile_thresholds(
    sizes: &mut [u64],
    ref_pcts: &[f64],
) -> Result<Vec<u64>, AdaptError> {
    if sizes.is_empty() {
        return Err(AdaptError::InsufficientData);
    }
    for &p in ref_pcts {
        if !(p > 0.0 && p < 1.0) {
            return Err(AdaptError::BadPercentile(p));
        }
    }
    sizes.sort_unstable();
    let n = sizes.len();
    Ok(ref_pcts
        .iter()
        .map(|&p| {
            let lo = nearest_rank(n, p - QUANTILE_HALF_BAND);
            let hi = nearest_rank(n, p + QUANTILE_HALF_BAND).max(lo);
            let count = (hi - lo + 1) as u128;
            let sum: u128 = sizes[lo - 1..hi].iter().map(|&s| s as u128).sum();
            ((sum + count / 2) / count) as u64
        })
        .collect())
}

/// Per-run adaptation parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptParams {
    /// Observation window: completions older than this are pruned.
    pub w_update: SimTime,
    /// Period between threshold recomputations.
    pub t_schedule: SimTime,
    /// Reference percentiles, one per threshold, strictly increasing in (0,1).
    pub ref_pcts: Vec<f64>,
    /// Thresholds in force before the first update (and wherever samples stay
    /// too scarce).
    pub initial_thresholds: Vec<u64>,
    /// Minimum window entries required to recompute; below this the port keeps
    /// its current thresholds.
    pub min_samples: usize,
}

impl AdaptParams {
    /// Defaults for `k` queues: 1 s window, 250 ms schedule, reference
    /// percentiles 0.1·i and seed thresholds 7·i KB for i = 1..k-1.
    pub fn defaults_for(k: usize) -> AdaptParams {
        assert!((2..=10).contains(&k), "queue count {k} out of range");
        AdaptParams {
            w_update: SimTime::from_secs(1),
            t_schedule: SimTime::from_millis(250),
            ref_pcts: (1..k).map(|i| i as f64 * 0.1).collect(),
            initial_thresholds: (1..k).map(|i| i as u64 * 7_000).collect(),
            min_samples: 4 * (k - 1),
        }
    }
}

/// Cold-start acquisition: for the first ACQUIRE_TICKS scheduling periods of
/// a run, every estimate is new information by definition — the seeded
/// thresholds encode no observations at all — so thresholds track estimates
/// at ACQUIRE_GAIN with no rate cap and acquire the live workload within a
/// couple of observation windows. Afterwards the conservative tracking
/// regime below bounds every move.
pub const ACQUIRE_TICKS: u64 = 10;
pub const ACQUIRE_GAIN: f64 = 0.5;

/// Fraction of the estimate-to-threshold gap applied per tick while the
/// estimate stays inside the tracking band.
pub const SMOOTH_GAIN: f64 = 0.2;

/// Hard relative limit on a single in-band smoothed move. Whatever the
/// estimates do, a tracking step never changes a threshold by more than this
/// fraction, so even fleet-wide correlated estimate noise (a congestion wave
/// touching every port in the same tick) cannot swing the population mean
/// faster than STEP_CAP per tick.
pub const STEP_CAP: f64 = 0.05;

/// Relative per-tick limit on the chase toward an out-of-band estimate. Far
/// evidence pulls at this rate every tick instead of freezing the threshold,
/// so large regime changes converge geometrically (10x in ~27 ticks) while a
/// fleet-wide synchronized chase still moves port means by less than 10% per
/// tick, keeping aggregate threshold trajectories smooth.
pub const SLEW_CAP: f64 = 0.09;

/// Multiplicative width of the tracking band: an estimate within
/// [cur / BAND_FACTOR, cur * BAND_FACTOR] is treated as sampling noise around
/// the current operating point and smoothed. Percentile estimates from
/// ~40-entry windows scatter by around 2x where the size distribution is
/// sparse, so the band must absorb that scatter; a genuine workload change
/// (flow sizes doubling or more) still falls outside it.
pub const BAND_FACTOR: f64 = 2.5;

/// Consecutive percentile estimates examined by the point-mass detector. At
/// the default 250 ms schedule, 5 ticks span one full 1 s window refresh
/// plus one tick, so the run always includes two disjoint observation
/// windows.
pub const SNAP_TICKS: usize = 5;

/// A run of estimates re-seats the threshold exactly on their median only if
/// its values are near-identical (max/min at most this factor). That is the
/// signature of a point mass in the flow-size distribution — every window
/// reports the same byte count — which a gain-limited chase would only ever
/// approach asymptotically, leaving the boundary a few bytes on the wrong
/// side of the mass. Continuous size distributions keep at least a few
/// percent of sampling scatter between disjoint windows, so they never
/// qualify and converge via the bounded moves instead.
pub const SNAP_AGREEMENT: f64 = 1.02;

/// Rolling run of the most recent percentile estimates for one threshold
/// index, used to detect point masses worth adopting exactly.
#[derive(Default, Clone)]
struct Streak {
    len: usize,
    vals: [u64; SNAP_TICKS],
}

impl Streak {
    /// Records one estimate; returns the median of the run once it is full
    /// and internally consistent within SNAP_AGREEMENT.
    fn push(&mut self, est: u64) -> Option<u64> {
        if self.len < SNAP_TICKS {
            self.vals[self.len] = est;
            self.len += 1;
        } else {
            self.vals.rotate_left(1);
            self.vals[SNAP_TICKS - 1] = est;
        }
        if self.len < SNAP_TICKS {
            return None;
        }
        let mut run = self.vals;
        run.sort_unstable();
        let (lo, hi) = (run[0], run[SNAP_TICKS - 1]);
        if hi as f64 <= lo as f64 * SNAP_AGREEMENT {
            Some(run[SNAP_TICKS / 2])
        } else {
            None
        }
    }
}

/// Per-port adaptation state: the completed-flow window plus, per threshold
/// index, the evidence run of out-of-band estimates.
#[derive(Default)]
pub struct PortAdapter {
    pub window: CompletedFlowWindow,
    streaks: Vec<Streak>,
}

impl PortAdapter {
    pub fn new() -> Self {
        Self::default()
    }
}

/// One adaptation step for one port: prune the window, and if enough samples
/// remain, re-derive percentile estimates and move the thresholds toward
/// them. Estimates inside the BAND_FACTOR tracking band are smoothed with
/// gain SMOOTH_GAIN, each move clamped to STEP_CAP of the current value.
/// Estimates outside the band pull the threshold toward them at SLEW_CAP per
/// tick, so any regime change converges geometrically. Independently of the
/// band, a run of SNAP_TICKS consecutive estimates agreeing within
/// SNAP_AGREEMENT re-seats the threshold on their median exactly, which
/// adopts a point mass in the size distribution precisely instead of
/// stalling a few bytes below it. Returns true when thresholds were
/// recomputed. `scratch` avoids reallocating the size buffer per port.
pub fn adapt_port(
    sched: &mut PortScheduler,
    adapter: &mut PortAdapter,
    now: SimTime,
    params: &AdaptParams,
    scratch: &mut Vec<u64>,
) -> bool {
    adapter.window.prune(now, params.w_update);
    if adapter.window.len() < params.min_samples {
        return false;
    }
    adapter.window.copy_sizes_into(scratch);
    let estimates = match percentile_thresholds(scratch, &params.ref_pcts) {
        Ok(e) => e,
        Err(_) => return false,
    };
    adapter.streaks.resize(estimates.len(), Streak::default());
    let acquiring = now.as_nanos() < params.t_schedule.as_nanos().saturating_mul(ACQUIRE_TICKS);
    let mut next: Vec<u64> = sched.thresholds().to_vec();
    for (i, &est) in estimates.iter().enumerate() {
        let cur = next[i];
        // Point-mass detector: near-identical estimates across two disjoint
        // windows are adopted exactly, unless the threshold already sits on
        // them.
        if let Some(seat) = adapter.streaks[i].push(est) {
            if seat.max(cur) as f64 > seat.min(cur) as f64 * SNAP_AGREEMENT {
                next[i] = seat;
                continue;
            }
        }
        if acquiring {
            let raw = cur as f64 + (est as f64 - cur as f64) * ACQUIRE_GAIN;
            let mut v = (raw.round() as u64).max(1);
            if v == cur && est != cur {
                v = if est > cur { cur + 1 } else { cur - 1 };
            }
            next[i] = v;
            continue;
        }
        let lo = cur as f64 / BAND_FACTOR;
        let hi = cur as f64 * BAND_FACTOR;
        if (est as f64) >= lo && (est as f64) <= hi {
            let raw = cur as f64 + (est as f64 - cur as f64) * SMOOTH_GAIN;
            let capped = raw.clamp(cur as f64 * (1.0 - STEP_CAP), cur as f64 * (1.0 + STEP_CAP));
            let mut v = (capped.round() as u64).max(1);
            // Integer rounding must not stall short of a nearby estimate.
            if v == cur && est != cur {
                v = if est > cur { cur + 1 } else { cur - 1 };
            }
            next[i] = v;
        } else if (est as f64) > hi {
            // BAND_FACTOR > 1 + SLEW_CAP, so the chase cannot overshoot.
            next[i] = ((cur as f64 * (1.0 + SLEW_CAP)).round() as u64).max(cur + 1);
        } else {
            next[i] = ((cur as f64 * (1.0 - SLEW_CAP)).round() as u64).max(1);
        }
    }
    // Per-index gating can break ordering (one index re-seats while its
    // neighbor is still held back); demotion boundaries must stay
    // nondecreasing.
    for i in 1..next.len() {
        next[i] = next[i].max(next[i - 1]);
    }
    sched.set_thresholds(&next)
}
