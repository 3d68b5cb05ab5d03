//! Flow size distributions and open-loop traffic generation.
//!
//! A workload is an empirical CDF over flow sizes: a list of (size, cum_prob)
//! knots. Probability mass at or below the first knot is a point mass at that
//! size; between knots, mass is spread linearly in size. `inverse_sample` and
//! `mean_size` both use exactly this distribution, so the sample mean of draws
//! converges to `mean_size`.
//!
//! Traffic is destination-centric: every host receives flows as an independent
//! Poisson process whose rate is chosen so that its access downlink carries the
//! requested load fraction, and the source is drawn uniformly from the other
//! hosts. Flow sizes come from the phase-active workload, or — under
//! `heterogeneous-ij` pairing — from one of two workloads picked by comparing
//! the endpoint indices (src < dst draws the first workload, src > dst the
//! second).

use crate::engine::SimTime;
use crate::transport::FlowSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum CdfError {
    #[error("{name}: CDF has no points")]
    Empty { name: String },
    #[error("{name} line {line}: expected `size_bytes cum_prob`, got {got:?}")]
    Malformed {
        name: String,
        line: usize,
        got: String,
    },
    #[error("{name} line {line}: sizes must be strictly increasing ({prev} then {next})")]
    SizeOrder {
        name: String,
        line: usize,
        prev: u64,
        next: u64,
    },
    #[error("{name} line {line}: cumulative probabilities must be nondecreasing in [0,1]")]
    ProbOrder { name: String, line: usize },
    #[error("{name}: last cumulative probability must be 1.0, got {got}")]
    NotNormalized { name: String, got: f64 },
    #[error("{name}: sizes must be at least 1 byte")]
    ZeroSize { name: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Empirical flow-size distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkloadCdf {
    name: String,
    points: Vec<(u64, f64)>,
}

const BUILTINS: &[(&str, &str)] = &[
    ("web_search", include_str!("../data/web_search.cdf")),
    ("data_mining", include_str!("../data/data_mining.cdf")),
    ("cache", include_str!("../data/cache.cdf")),
    ("hadoop", include_str!("../data/hadoop.cdf")),
    ("bimodal", include_str!("../data/bimodal.cdf")),
    ("bimodal_shifted", include_str!("../data/bimodal_shifted.cdf")),
];

impl WorkloadCdf {
    pub fn from_points(name: &str, points: Vec<(u64, f64)>) -> Result<Self, CdfError> {
        let name = name.to_string();
        if points.is_empty() {
            return Err(CdfError::Empty { name });
        }
        for (i, &(size, prob)) in points.iter().enumerate() {
            if size == 0 {
                return Err(CdfError::ZeroSize { name });
            }
            if i > 0 {
                let (prev_size, prev_prob) = points[i - 1];
                if size <= prev_size {
                    return Err(CdfError::SizeOrder {
                        name,
                        line: i + 1,
                        prev: prev_size,
                        next: size,
                    });
                }
                if prob < prev_prob {
                    return Err(CdfError::ProbOrder { name, line: i + 1 });
                }
            }
            if !(0.0..=1.0).contains(&prob) {
                return Err(CdfError::ProbOrder { name, line: i + 1 });
            }
        }
        let last = points.last().unwrap().1;
        if (last - 1.0).abs() > 1e-9 {
            return Err(CdfError::NotNormalized { name, got: last });
        }
        let mut points = points;
        points.last_mut().unwrap().1 = 1.0;
        Ok(WorkloadCdf { name, points })
    }

    /// Parses the `size_bytes cum_prob` line format; `#` starts a comment.
    pub fn parse(name: &str, text: &str) -> Result<Self, CdfError> {
        let mut points = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (size, prob) = match (fields.next(), fields.next(), fields.next()) {
                (Some(s), Some(p), None) => match (s.parse::<u64>(), p.parse::<f64>()) {
                    (Ok(s), Ok(p)) => (s, p),
                    _ => {
                        return Err(CdfError::Malformed {
                            name: name.to_string(),
                            line: lineno + 1,
                            got: raw.to_string(),
                        })
                    }
                },
                _ => {
                    return Err(CdfError::Malformed {
                        name: name.to_string(),
                        line: lineno + 1,
                        got: raw.to_string(),
                    })
                }
            };
            points.push((size, prob));
        }
        Self::from_points(name, points)
    }

    pub fn load(path: &Path) -> Result<Self, CdfError> {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let text = std::fs::read_to_string(path).map_err(|source| CdfError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&name, &text)
    }

    /// One of the distributions shipped with the simulator.
    pub fn builtin(name: &str) -> Option<WorkloadCdf> {
        BUILTINS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(n, text)| Self::parse(n, text).expect("shipped CDF must parse"))
    }

    pub fn builtin_names() -> Vec<&'static str> {
        BUILTINS.iter().map(|(n, _)| *n).collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    pub fn min_size(&self) -> u64 {
        self.points[0].0
    }

    pub fn max_size(&self) -> u64 {
        self.points.last().unwrap().0
    }

    /// Inverse-transform sampling: u in [0,1) maps to a size. Below the first
    /// knot the first size is returned (point mass); between knots the
    /// generalized inverse is the smallest whole-byte size x with
    /// cum_prob(x) >= u, i.e. the linear interpolation rounded up. Rounding up
    /// (rather than to nearest) keeps P(size <= x) equal to cum_prob(x) at
    /// every integer x, even across segments narrower than a byte.
    pub fn inverse_sample(&self, u: f64) -> u64 {
        debug_assert!((0.0..1.0).contains(&u));
        let (s0, p0) = self.points[0];
        if u <= p0 {
            return s0;
        }
        for w in self.points.windows(2) {
            let (sa, pa) = w[0];
            let (sb, pb) = w[1];
            if u <= pb {
                let frac = (u - pa) / (pb - pa);
                return (sa as f64 + frac * (sb - sa) as f64).ceil().max(1.0) as u64;
            }
        }
        self.max_size()
    }

    /// Forward CDF: P(size <= x) under the same interpolation.
    pub fn cum_prob(&self, x: u64) -> f64 {
        let (s0, p0) = self.points[0];
        if x < s0 {
            return 0.0;
        }
        if x == s0 {
            return p0;
        }
        for w in self.points.windows(2) {
            let (sa, pa) = w[0];
            let (sb, pb) = w[1];
            if x <= sb {
                return pa + (x - sa) as f64 / (sb - sa) as f64 * (pb - pa);
            }
        }
        1.0
    }

    /// Expected flow size in bytes: the first knot's point mass plus the
    /// uniform mass of each linear segment.
    pub fn mean_size(&self) -> f64 {
        let (s0, p0) = self.points[0];
        let mut mean = s0 as f64 * p0;
        for w in self.points.windows(2) {
            let (sa, pa) = w[0];
            let (sb, pb) = w[1];
            mean += (pb - pa) * (sa + sb) as f64 / 2.0;
        }
        mean
    }
}

/// Poisson flow arrival rate (flows/s) for one receiving host such that its
/// access link of `capacity_bps` carries `load` of its capacity on average.
pub fn arrival_rate(load: f64, capacity_bps: u64, mean_flow_bytes: f64) -> f64 {
    load * capacity_bps as f64 / (8.0 * mean_flow_bytes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingMode {
    /// Source drawn uniformly among all other hosts; sizes follow the
    /// phase-active workload.
    UniformRandom,
    /// Source drawn uniformly; sizes come from the first workload when
    /// src < dst and from the second when src > dst.
    HeterogeneousIj,
}

/// When the generator stops producing arrivals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopRule {
    /// Arrivals strictly before this time.
    Duration(SimTime),
    /// Exactly this many flows, earliest-first across all hosts.
    FlowCount(u64),
}

/// One segment of the phase schedule: from `start` onward (until the next
/// phase), sizes are drawn from `workload`.
#[derive(Clone, Debug)]
pub struct Phase {
    pub start: SimTime,
    pub workload: WorkloadCdf,
}

#[derive(Clone, Debug)]
pub struct TrafficPlan {
    pub host_count: u32,
    pub access_bps: u64,
    pub load: f64,
    pub stop: StopRule,
    pub pairing: PairingMode,
    /// Nonempty, ordered by start, first phase at time zero. Under
    /// heterogeneous pairing exactly two phases are interpreted as the
    /// (src < dst, src > dst) workload pair instead of a time schedule.
    pub phases: Vec<Phase>,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum PlanError {
    #[error("need at least 2 hosts, got {0}")]
    TooFewHosts(u32),
    #[error("load must be in (0, 1], got {0}")]
    BadLoad(f64),
    #[error("phase schedule must be nonempty, start at 0, and be time-ordered")]
    BadPhases,
    #[error("heterogeneous pairing needs exactly 2 workloads, got {0}")]
    BadPairCount(usize),
    #[error("flow count must be nonzero")]
    ZeroFlows,
}

// Distinct ChaCha streams per concern so that, e.g., adding a host does not
// perturb another host's arrival process.
const SEED_ARRIVALS: u64 = 0x9e37_79b9_0000_0001;
const SEED_PAIR_SIZE: u64 = 0x9e37_79b9_0000_0002;

struct HostArrivals {
    rng: ChaCha8Rng,
    /// Arrival clock in seconds (f64 keeps exponential draws exact; converted
    /// to SimTime only when a flow is emitted).
    t: f64,
}

impl HostArrivals {
    fn new(seed: u64, host: u32) -> Self {
        HostArrivals {
            rng: ChaCha8Rng::seed_from_u64(seed ^ SEED_ARRIVALS ^ ((host as u64) << 20)),
            t: 0.0,
        }
    }

    /// Advances to the next arrival under a piecewise-constant rate given by
    /// `rate_at(t)`. Phase boundaries restart the draw from the boundary,
    /// which is exact for Poisson processes.
    fn next(&mut self, boundaries: &[f64], rate_at: impl Fn(f64) -> f64) -> f64 {
        loop {
            let rate = rate_at(self.t);
            let dt = if rate > 0.0 {
                -(1.0 - self.rng.gen::<f64>()).ln() / rate
            } else {
                f64::INFINITY
            };
            let next_boundary = boundaries
                .iter()
                .copied()
                .find(|&b| b > self.t)
                .unwrap_or(f64::INFINITY);
            if self.t + dt <= next_boundary {
                self.t += dt;
                return self.t;
            }
            self.t = next_boundary;
        }
    }
}

/// Generates the full flow list for a run, sorted by start time, flow ids
/// assigned in that order.
///
/// Determinism contract: host `h`'s interarrival sequence comes from its own
/// ChaCha stream; per accepted flow (in merged earliest-first order, host id
/// breaking ties) the shared pair/size stream is consumed as: one source draw,
/// then one size draw.
pub fn generate(plan: &TrafficPlan) -> Result<Vec<FlowSpec>, PlanError> {
    if plan.host_count < 2 {
        return Err(PlanError::TooFewHosts(plan.host_count));
    }
    if !(plan.load > 0.0 && plan.load <= 1.0) {
        return Err(PlanError::BadLoad(plan.load));
    }
    if plan.phases.is_empty()
        || plan.phases[0].start != SimTime::ZERO
        || plan.phases.windows(2).any(|w| w[1].start <= w[0].start)
    {
        return Err(PlanError::BadPhases);
    }
    if plan.pairing == PairingMode::HeterogeneousIj && plan.phases.len() != 2 {
        return Err(PlanError::BadPairCount(plan.phases.len()));
    }
    if plan.stop == StopRule::FlowCount(0) {
        return Err(PlanError::ZeroFlows);
    }

    let n_hosts = plan.host_count;
    let phase_starts: Vec<f64> = plan.phases.iter().map(|p| p.start.as_secs_f64()).collect();
    let phase_rates: Vec<f64> = plan
        .phases
        .iter()
        .map(|p| arrival_rate(plan.load, plan.access_bps, p.workload.mean_size()))
        .collect();
    // Per-host arrival rate. Uniform pairing follows the phase-active
    // workload's mean; heterogeneous pairing uses the host's own expected mean
    // (a host with index j receives workload A from the j sources below it and
    // workload B from the rest), so every downlink sees the same load.
    let hetero_rate = |dst: u32| -> f64 {
        let below = dst as f64;
        let above = (n_hosts - 1 - dst) as f64;
        let total = below + above;
        let mean_a = plan.phases[0].workload.mean_size();
        let mean_b = plan.phases[1].workload.mean_size();
        let mean = (below * mean_a + above * mean_b) / total;
        arrival_rate(plan.load, plan.access_bps, mean)
    };

    let phase_index = |t: f64| -> usize {
        match phase_starts.iter().rposition(|&s| s <= t) {
            Some(i) => i,
            None => 0,
        }
    };

    let mut hosts: Vec<HostArrivals> = (0..n_hosts)
        .map(|h| HostArrivals::new(plan.seed, h))
        .collect();
    let mut pair_rng = ChaCha8Rng::seed_from_u64(plan.seed ^ SEED_PAIR_SIZE);

    // Merged earliest-first arrival queue: (time, host).
    let mut next_arrival: Vec<f64> = Vec::with_capacity(n_hosts as usize);
    for (h, host) in hosts.iter_mut().enumerate() {
        let t = match plan.pairing {
            PairingMode::UniformRandom => {
                host.next(&phase_starts, |t| phase_rates[phase_index(t)])
            }
            PairingMode::HeterogeneousIj => {
                let r = hetero_rate(h as u32);
                host.next(&phase_starts, |_| r)
            }
        };
        next_arrival.push(t);
    }

    let mut flows: Vec<FlowSpec> = Vec::new();
    loop {
        // Earliest next arrival; ties broken by host index.
        let (dst, &t) = next_arrival
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(a.0.cmp(&b.0)))
            .expect("at least two hosts");
        if t.is_infinite() {
            break;
        }
        match plan.stop {
            StopRule::Duration(d) => {
                if t >= d.as_secs_f64() {
                    break;
                }
            }
            StopRule::FlowCount(n) => {
                if flows.len() as u64 >= n {
                    break;
                }
            }
        }
        let dst = dst as u32;
        let src = {
            let r = pair_rng.gen_range(0..n_hosts - 1);
            if r >= dst {
                r + 1
            } else {
                r
            }
        };
        let workload = match plan.pairing {
            PairingMode::UniformRandom => &plan.phases[phase_index(t)].workload,
            PairingMode::HeterogeneousIj => {
                if src < dst {
                    &plan.phases[0].workload
                } else {
                    &plan.phases[1].workload
                }
            }
        };
        let size = workload.inverse_sample(pair_rng.gen::<f64>());
        flows.push(FlowSpec {
            id: flows.len() as u64,
            src,
            dst,
            size,
            start: SimTime::from_secs_f64(t),
        });

        let host = &mut hosts[dst as usize];
        next_arrival[dst as usize] = match plan.pairing {
            PairingMode::UniformRandom => {
                host.next(&phase_starts, |t| phase_rates[phase_index(t)])
            }
            PairingMode::HeterogeneousIj => {
                let r = hetero_rate(dst);
                host.next(&phase_starts, |_| r)
            }
        };
        // Duration mode: a host that ran past the horizon stops contributing.
        if let StopRule::Duration(d) = plan.stop {
            if next_arrival[dst as usize] >= d.as_secs_f64() {
                next_arrival[dst as usize] = f64::INFINITY;
            }
        }
    }
    Ok(flows)
}
