//! Two accelerating vehicles with fuzzy positions, three steps.
//!
//! ```text
//! cargo run --example two_vehicle_trace
//! ```

use fuzzysim::model::{LaneId, LaneState, Vehicle, VehicleId};
use fuzzysim::{AccelerationRule, Ofn};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v_max = Ofn::new(1, 2, 2, 3);
    let start = Ofn::new(0, 1, 1, 1);
    let lead = Vehicle::new(
        VehicleId(1),
        Ofn::new(1, 2, 2, 2),
        Ofn::new(0, 2, 2, 2),
        v_max,
    )
    .with_acceleration(start);
    let follower = Vehicle::new(VehicleId(2), Ofn::ZERO, start, v_max).with_acceleration(start);

    let mut lane = LaneState::new(LaneId(0), 20, vec![lead, follower], None)?;
    let rule = AccelerationRule::default();
    for _ in 0..3 {
        lane.step(&rule)?;
    }

    println!(
        "{:>2} {:>7} {:>12} {:>12} {:>12} {:>12}",
        "t", "vehicle", "X", "V", "A", "G"
    );
    for r in lane.trace() {
        println!(
            "{:>2} {:>7} {:>12} {:>12} {:>12} {:>12}",
            r.t,
            r.vehicle.to_string(),
            r.position.to_string(),
            r.velocity.to_string(),
            r.acceleration.to_string(),
            r.gap.to_string()
        );
    }
    Ok(())
}
