//! Mean decision uncertainty over seeds, per fleet split and precision unit.
//!
//! ```text
//! cargo run --release --example precision_sweep -- 30
//! ```

use std::collections::BTreeMap;

use fuzzysim::workzone::{sweep, ScenarioConfig, SweepGrid};

fn main() {
    let seeds: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10);
    let grid = SweepGrid {
        fleets: vec![(48, 48), (50, 45), (53, 43)],
        precision_units: vec![1, 2, 4, 8, 16, 32, 64],
        seeds: (0..seeds).collect(),
    };
    let rows = sweep(&ScenarioConfig::default(), &grid, None);

    let mut mean: BTreeMap<((usize, usize), i64), (f64, u32)> = BTreeMap::new();
    for row in &rows {
        match &row.outcome {
            Ok(c) => {
                let e = mean
                    .entry(((row.n_a, row.n_b), row.precision_unit))
                    .or_default();
                e.0 += c.unc;
                e.1 += 1;
            }
            Err(e) => eprintln!(
                "{}:{} L={} seed {}: {e}",
                row.n_a, row.n_b, row.precision_unit, row.seed
            ),
        }
    }

    print!("{:>7}", "A:B");
    for l in &grid.precision_units {
        print!(" {:>6}", format!("L={l}"));
    }
    println!();
    for &fleet in &grid.fleets {
        print!("{:>7}", format!("{}:{}", fleet.0, fleet.1));
        for &l in &grid.precision_units {
            let (sum, n) = mean.get(&(fleet, l)).copied().unwrap_or_default();
            print!(" {:>6.3}", sum / f64::from(n.max(1)));
        }
        println!();
    }
}
