//! A queue builds at a red signal and discharges on green; delay, stops and
//! queue length come out as fuzzy numbers.

use fuzzysim::imprecision::{aggregate_counts, vehicles_from_observations, InitialVelocity};
use fuzzysim::model::{LaneId, LaneState, SignalColor};
use fuzzysim::{AccelerationRule, Ofn, PerformanceReport};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v_max = Ofn::new(1, 2, 2, 3);
    let rule = AccelerationRule::default();
    let positions = [2, 5, 9, 14, 17, 22];

    for unit in [1, 4, 12] {
        let obs = aggregate_counts(&positions, 30, unit, v_max)?;
        let vehicles = vehicles_from_observations(&obs, 0, InitialVelocity::Fused)?;
        let mut lane = LaneState::new(LaneId(0), 40, vehicles, Some(30))?;
        lane.set_signal(SignalColor::Red)?;
        for _ in 0..15 {
            lane.step(&rule)?;
        }
        lane.set_signal(SignalColor::Green)?;
        lane.run_until_clear(&rule, None)?;
        let r = PerformanceReport::from_history(&lane.history());
        println!(
            "precision unit {unit:>2}: delay {}  stops {}  queue {}  ({} vehicles, {} steps)",
            r.delay, r.stops, r.queue, r.vehicles, r.steps
        );
    }
    Ok(())
}
