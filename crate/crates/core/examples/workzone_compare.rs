//! Lane closure with alternating one-way traffic: which direction should get
//! green first, and how sure can we be?
//!
//! ```text
//! cargo run --release --example workzone_compare -- 50 45 8 42
//! ```

use fuzzysim::workzone::{compare_strategies, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: u64| args.get(i).map_or(Ok(default), |s| s.parse());
    let cfg = ScenarioConfig {
        n_a: arg(0, 50)? as usize,
        n_b: arg(1, 45)? as usize,
        precision_unit: arg(2, 8)? as i64,
        seed: arg(3, 42)?,
        ..ScenarioConfig::default()
    };
    let c = compare_strategies(&cfg)?;
    println!(
        "fleets A {} / B {}, precision unit {}, seed {}",
        cfg.n_a, cfg.n_b, cfg.precision_unit, cfg.seed
    );
    println!("A first: delay {}  ({} steps)", c.d1, c.reports[0].steps);
    println!("B first: delay {}  ({} steps)", c.d2, c.reports[1].steps);
    println!(
        "P(A first better) {:.3}  P(B first better) {:.3}  uncertainty {:.3}",
        c.p_12, c.p_21, c.unc
    );
    Ok(())
}
