//! Vehicles known only by segment counts: fuzzify the positions, then drive
//! the lane empty and report the measures.
//!
//! ```text
//! cargo run --example imprecise_observations [observations.csv]
//! ```

use std::fs::File;
use std::path::PathBuf;

use fuzzysim::imprecision::{read_observations, vehicles_from_observations, InitialVelocity};
use fuzzysim::model::{LaneId, LaneState};
use fuzzysim::{AccelerationRule, Ofn, PerformanceReport};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/observations.csv"));
    let v_max = Ofn::new(1, 2, 2, 3);
    let observations = read_observations(File::open(&path)?, v_max)?;
    let vehicles = vehicles_from_observations(&observations, 0, InitialVelocity::Fused)?;
    for v in &vehicles {
        println!("vehicle {}: X = {}  V = {}", v.id, v.position, v.velocity);
    }

    let mut lane = LaneState::new(LaneId(0), 40, vehicles, None)?;
    let steps = lane.run_until_clear(&AccelerationRule::default(), None)?;
    let report = PerformanceReport::from_history(&lane.history());
    println!("lane clear after {steps} steps");
    println!(
        "delay {}  stops {}  queue {}",
        report.delay, report.stops, report.queue
    );
    Ok(())
}
