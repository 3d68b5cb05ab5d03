//! Flow completion records, per-class statistics, and CSV output.
//!
//! Flows are binned by size into small (<= 100 KB), medium (<= 10 MB) and
//! large (> 10 MB), decimal units. A run produces three CSV files:
//!
//! - `flows.csv`: one row per completed flow, ordered by flow id.
//! - `summary.csv`: per-class mean FCT, p99 FCT, count and total timeouts.
//! - `thresholds.csv`: sampled demotion-threshold trajectories per port.
//!
//! All times are printed in seconds with nine decimals, which is lossless for
//! the integer-nanosecond clock.

use crate::engine::SimTime;
use std::fmt::Write as _;

pub const SMALL_MAX_BYTES: u64 = 100_000;
pub const MEDIUM_MAX_BYTES: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlowClass {
    Small,
    Medium,
    Large,
}

impl FlowClass {
    pub fn of(size_bytes: u64) -> FlowClass {
        if size_bytes <= SMALL_MAX_BYTES {
            FlowClass::Small
        } else if size_bytes <= MEDIUM_MAX_BYTES {
            FlowClass::Medium
        } else {
            FlowClass::Large
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FlowClass::Small => "small",
            FlowClass::Medium => "medium",
            FlowClass::Large => "large",
        }
    }
}

/// One completed flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlowRecord {
    pub flow_id: u64,
    pub src: u32,
    pub dst: u32,
    pub size: u64,
    pub start: SimTime,
    pub finish: SimTime,
    pub timeouts: u32,
}

impl FlowRecord {
    pub fn fct(&self) -> SimTime {
        self.finish.saturating_sub(self.start)
    }

    pub fn class(&self) -> FlowClass {
        FlowClass::of(self.size)
    }
}

/// Mean and p99 (nearest-rank) of a sample of durations, in seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub p99: f64,
}

pub fn summarize(fcts_secs: &[f64]) -> Option<Summary> {
    if fcts_secs.is_empty() {
        return None;
    }
    let n = fcts_secs.len();
    let mean = fcts_secs.iter().sum::<f64>() / n as f64;
    let mut sorted = fcts_secs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Nearest-rank p99: ceil(0.99 * n), 1-based.
    let rank = ((0.99 * n as f64).ceil() as usize).clamp(1, n);
    Some(Summary {
        count: n,
        mean,
        p99: sorted[rank - 1],
    })
}

/// Two-sided 95% critical values of Student's t for small samples
/// (degrees of freedom 1..=29); beyond that the normal value 1.96 applies.
const T_95: [f64; 29] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160,
    2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056,
    2.052, 2.048, 2.045,
];

/// Half-width of a 95% confidence interval for the mean. `student_t` selects
/// small-sample critical values; otherwise the normal 1.96 is used.
pub fn ci95_half_width(samples: &[f64], student_t: bool) -> f64 {
    let n = samples.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
    let crit = if student_t {
        let df = n - 1;
        if df <= 29 {
            T_95[df - 1]
        } else {
            1.96
        }
    } else {
        1.96
    };
    crit * (var / n as f64).sqrt()
}

/// One sampled demotion threshold value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdSample {
    pub time: SimTime,
    pub switch: String,
    pub port: String,
    pub thr_index: usize,
    pub bytes: u64,
}

/// Everything a finished run reports.
#[derive(Clone, Debug, Default)]
pub struct MetricsLedger {
    pub flows: Vec<FlowRecord>,
    pub threshold_samples: Vec<ThresholdSample>,
}

impl MetricsLedger {
    pub fn record_flow(&mut self, rec: FlowRecord) {
        self.flows.push(rec);
    }

    pub fn fcts_secs(&self, class: Option<FlowClass>) -> Vec<f64> {
        self.flows
            .iter()
            .filter(|f| class.map_or(true, |c| f.class() == c))
            .map(|f| f.fct().as_secs_f64())
            .collect()
    }

    pub fn total_timeouts(&self, class: Option<FlowClass>) -> u64 {
        self.flows
            .iter()
            .filter(|f| class.map_or(true, |c| f.class() == c))
            .map(|f| f.timeouts as u64)
            .sum()
    }

    /// `flows.csv` body: one row per completed flow, ordered by id.
    pub fn flows_csv(&self) -> String {
        let mut rows = self.flows.clone();
        rows.sort_by_key(|f| f.flow_id);
        let mut out = String::from("flow_id,src,dst,size,class,start,fct,timeouts\n");
        for f in &rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                f.flow_id,
                f.src,
                f.dst,
                f.size,
                f.class().label(),
                f.start,
                f.fct(),
                f.timeouts
            )
            .unwrap();
        }
        out
    }

    /// `summary.csv` body: per-class and overall statistics for one
    /// (scenario, load, scheduler) cell.
    pub fn summary_csv(&self, scenario: &str, load: f64, scheduler: &str) -> String {
        let mut out = String::from("scenario,load,scheduler,class,metric,value\n");
        let classes: [(&str, Option<FlowClass>); 4] = [
            ("small", Some(FlowClass::Small)),
            ("medium", Some(FlowClass::Medium)),
            ("large", Some(FlowClass::Large)),
            ("all", None),
        ];
        for (label, class) in classes {
            let fcts = self.fcts_secs(class);
            let (mean, p99, count) = match summarize(&fcts) {
                Some(s) => (s.mean, s.p99, s.count),
                None => (f64::NAN, f64::NAN, 0),
            };
            let mut put = |metric: &str, value: String| {
                writeln!(
                    out,
                    "{scenario},{load},{scheduler},{label},{metric},{value}"
                )
                .unwrap();
            };
            put("mean_fct", format_stat(mean));
            put("p99_fct", format_stat(p99));
            put("count", count.to_string());
            put("timeouts", self.total_timeouts(class).to_string());
        }
        out
    }

    /// `thresholds.csv` body, in sample order (time-major as recorded).
    pub fn thresholds_csv(&self) -> String {
        let mut out = String::from("time,switch,port,thr_index,bytes\n");
        for s in &self.threshold_samples {
            writeln!(
                out,
                "{},{},{},{},{}",
                s.time, s.switch, s.port, s.thr_index, s.bytes
            )
            .unwrap();
        }
        out
    }
}

fn format_stat(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.9}")
    }
}
