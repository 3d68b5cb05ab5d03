//! Prints the adaptive-threshold trajectory of the convergence preset:
//! across-port mean per threshold index at each stats tick, plus per-port
//! window occupancy, split by port kind. Diagnostic aid, not part of the
//! test suite.

use awafs_sim::config::preset;
use awafs_sim::runner::{execute, RunnerOptions};
use std::collections::BTreeMap;

fn main() {
    let cfg = preset("convergence").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let opts = RunnerOptions {
        out_dir: dir.path().to_path_buf(),
        quiet: true,
    };
    let outcomes = execute(&cfg, &opts).unwrap();
    let out = &outcomes[0].runs[0].output;

    // Window occupancy by port id: mean entries over ticks past 6 s.
    let mut occ: BTreeMap<usize, (f64, u32)> = BTreeMap::new();
    for w in &out.window_samples {
        if w.time.as_secs_f64() >= 6.0 {
            let e = occ.entry(w.port).or_insert((0.0, 0));
            e.0 += w.entries as f64;
            e.1 += 1;
        }
    }
    let mut occs: Vec<(usize, f64)> = occ
        .iter()
        .map(|(&p, &(s, n))| (p, s / n as f64))
        .collect();
    occs.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    println!("window occupancy past 6s (port id: mean entries):");
    for (p, m) in &occs {
        println!("  port {p:3}: {m:7.1}");
    }

    // Thr trajectory: across-port mean per (tick, index), plus min/max port.
    let mut by_tick: BTreeMap<(u64, usize), Vec<(String, String, u64)>> = BTreeMap::new();
    for s in &out.ledger.threshold_samples {
        by_tick
            .entry((s.time.as_nanos(), s.thr_index))
            .or_default()
            .push((s.switch.clone(), s.port.clone(), s.bytes));
    }
    for idx in 0..3 {
        println!("--- thr index {idx} ---");
        let mut prev: Option<f64> = None;
        for (&(t, i), ports) in &by_tick {
            if i != idx {
                continue;
            }
            let vals: Vec<f64> = ports.iter().map(|&(_, _, b)| b as f64).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let lo = ports.iter().min_by_key(|&&(_, _, b)| b).unwrap();
            let hi = ports.iter().max_by_key(|&&(_, _, b)| b).unwrap();
            let change = prev.map(|p| (mean - p) / p * 100.0).unwrap_or(0.0);
            println!(
                "t={:6.2}s mean={:9.0} ({:+6.2}%) min={:8} @{}/{} max={:8} @{}/{} n={}",
                t as f64 * 1e-9,
                mean,
                change,
                lo.2,
                lo.0,
                lo.1,
                hi.2,
                hi.0,
                hi.1,
                vals.len()
            );
            prev = Some(mean);
        }
    }
}
