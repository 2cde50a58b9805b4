//! Fuzzy performance measures over a recorded simulation.
//!
//! All three measures are sums of stop-condition tuples, divided (with
//! rounding) by the fleet size or the number of analysed steps:
//!
//! * delay: stopped vehicle-steps per vehicle,
//! * stops: moving-to-stopped transitions per vehicle,
//! * queue: zero-gap vehicles per step.
//!
//! Delay here is stopped time, not travel time in excess of free flow.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{LaneId, TraceRecord, VehicleId};
use crate::ofn::{IntPredicate, Ofn};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HistoryError {
    #[error("analysed period must contain at least one step")]
    NoSteps,
    #[error("records of vehicle {0} do not cover contiguous steps")]
    Gap(VehicleId),
    #[error("record of vehicle {vehicle} at t={t} is outside the {steps}-step period")]
    OutOfRange {
        vehicle: VehicleId,
        t: u64,
        steps: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub t: u64,
    pub velocity: Ofn,
    pub gap: Ofn,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VehicleTrack {
    pub vehicle: VehicleId,
    pub lane: LaneId,
    pub samples: Vec<Sample>,
}

/// Per-vehicle velocity and gap histories of non-phantom vehicles.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct History {
    tracks: Vec<VehicleTrack>,
    steps: u64,
}

impl History {
    pub fn new(tracks: Vec<VehicleTrack>, steps: u64) -> Result<Self, HistoryError> {
        if steps == 0 {
            return Err(HistoryError::NoSteps);
        }
        for track in &tracks {
            for pair in track.samples.windows(2) {
                if pair[1].t != pair[0].t + 1 {
                    return Err(HistoryError::Gap(track.vehicle));
                }
            }
            if let Some(last) = track.samples.last() {
                if last.t >= steps {
                    return Err(HistoryError::OutOfRange {
                        vehicle: track.vehicle,
                        t: last.t,
                        steps,
                    });
                }
            }
        }
        Ok(History { tracks, steps })
    }

    /// Groups trace records by vehicle, keeping first-appearance order.
    ///
    /// Panics if the records are not contiguous per vehicle or if `steps` does
    /// not cover them; lane traces always satisfy both.
    pub fn from_records(records: &[TraceRecord], steps: u64) -> Self {
        let mut index: HashMap<(LaneId, VehicleId), usize> = HashMap::new();
        let mut tracks: Vec<VehicleTrack> = Vec::new();
        for r in records {
            let slot = *index.entry((r.lane, r.vehicle)).or_insert_with(|| {
                tracks.push(VehicleTrack {
                    vehicle: r.vehicle,
                    lane: r.lane,
                    samples: Vec::new(),
                });
                tracks.len() - 1
            });
            tracks[slot].samples.push(Sample {
                t: r.t,
                velocity: r.velocity,
                gap: r.gap,
            });
        }
        History::new(tracks, steps.max(1)).expect("lane trace forms a valid history")
    }

    /// Union of two disjoint vehicle populations over the longer period.
    pub fn merge(mut self, other: History) -> History {
        self.tracks.extend(other.tracks);
        self.steps = self.steps.max(other.steps);
        self
    }

    pub fn tracks(&self) -> &[VehicleTrack] {
        &self.tracks
    }

    /// `N`
    pub fn vehicle_count(&self) -> usize {
        self.tracks.len()
    }

    /// `T`
    pub fn steps(&self) -> u64 {
        self.steps
    }
}

fn stopped(v: Ofn) -> Ofn {
    v.satisfies(IntPredicate::EqualsZero)
}

fn moving(v: Ofn) -> Ofn {
    v.satisfies(IntPredicate::GreaterThanZero)
}

fn sum(values: impl Iterator<Item = Ofn>) -> Ofn {
    values.fold(Ofn::ZERO, |acc, x| acc + x)
}

pub fn delay_sum(h: &History) -> Ofn {
    sum(h
        .tracks
        .iter()
        .flat_map(|tr| tr.samples.iter().map(|s| stopped(s.velocity))))
}

pub fn stops_sum(h: &History) -> Ofn {
    sum(h.tracks.iter().flat_map(|tr| {
        tr.samples
            .windows(2)
            .map(|w| moving(w[0].velocity).min(stopped(w[1].velocity)))
    }))
}

pub fn queue_sum(h: &History) -> Ofn {
    sum(h
        .tracks
        .iter()
        .flat_map(|tr| tr.samples.iter().map(|s| stopped(s.gap))))
}

fn per(raw: Ofn, n: usize) -> Ofn {
    if n == 0 {
        return Ofn::ZERO;
    }
    raw.div_int(n as i64).expect("positive divisor")
}

/// Average stopped steps per vehicle; `(0,0,0,0)` for an empty fleet.
pub fn average_delay(h: &History) -> Ofn {
    per(delay_sum(h), h.vehicle_count())
}

/// Average number of stops per vehicle; `(0,0,0,0)` for an empty fleet.
pub fn average_stops(h: &History) -> Ofn {
    per(stops_sum(h), h.vehicle_count())
}

/// Average queue length in cells.
pub fn average_queue(h: &History) -> Ofn {
    per(queue_sum(h), h.steps as usize)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerformanceReport {
    pub delay: Ofn,
    pub stops: Ofn,
    pub queue: Ofn,
    pub raw_delay: Ofn,
    pub raw_stops: Ofn,
    pub raw_queue: Ofn,
    pub vehicles: usize,
    pub steps: u64,
    /// Set when there were no vehicles to average over.
    pub empty_fleet: bool,
}

impl PerformanceReport {
    pub fn from_history(h: &History) -> Self {
        let (raw_delay, raw_stops, raw_queue) = (delay_sum(h), stops_sum(h), queue_sum(h));
        let n = h.vehicle_count();
        if n == 0 {
            log::warn!("performance measures requested for an empty fleet");
        }
        PerformanceReport {
            delay: per(raw_delay, n),
            stops: per(raw_stops, n),
            queue: per(raw_queue, h.steps as usize),
            raw_delay,
            raw_stops,
            raw_queue,
            vehicles: n,
            steps: h.steps,
            empty_fleet: n == 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(a: i64, b: i64, c: i64, d: i64) -> Ofn {
        Ofn::new(a, b, c, d)
    }

    fn track(id: u32, samples: &[(Ofn, Ofn)]) -> VehicleTrack {
        VehicleTrack {
            vehicle: VehicleId(id),
            lane: LaneId(0),
            samples: samples
                .iter()
                .enumerate()
                .map(|(t, &(velocity, gap))| Sample {
                    t: t as u64,
                    velocity,
                    gap,
                })
                .collect(),
        }
    }

    fn velocities(id: u32, vs: &[Ofn]) -> VehicleTrack {
        track(
            id,
            &vs.iter().map(|&v| (v, Ofn::crisp(5))).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn free_flow_has_no_delay() {
        let h = History::new(
            vec![velocities(0, &[Ofn::ONE, o(1, 2, 2, 3), o(1, 2, 2, 3)])],
            3,
        )
        .unwrap();
        assert_eq!(average_delay(&h), Ofn::ZERO);
        assert_eq!(average_stops(&h), Ofn::ZERO);
        assert_eq!(average_queue(&h), Ofn::ZERO);
    }

    #[test]
    fn delay_over_table_velocities() {
        let v1 = [o(0, 2, 2, 2), o(0, 2, 2, 3), o(1, 2, 2, 3), o(1, 2, 2, 3)];
        let v2 = [o(0, 1, 1, 1), o(0, 2, 2, 2), o(0, 2, 2, 3), o(1, 2, 2, 3)];
        let h = History::new(vec![velocities(1, &v1), velocities(2, &v2)], 4).unwrap();
        assert_eq!(delay_sum(&h), o(0, 0, 0, 5));
        assert_eq!(average_delay(&h), o(0, 0, 0, 3));
    }

    #[test]
    fn stops_count_transitions() {
        let z = Ofn::ZERO;
        let h = History::new(vec![velocities(0, &[z, z, z])], 3).unwrap();
        assert_eq!(average_stops(&h), Ofn::ZERO);
        let c = Ofn::crisp;
        let h = History::new(vec![velocities(0, &[c(1), c(2), z, z, c(1)])], 5).unwrap();
        assert_eq!(average_stops(&h), Ofn::ONE);
        let h = History::new(vec![velocities(0, &[o(0, 2, 2, 3), o(0, 0, 0, 1)])], 2).unwrap();
        assert_eq!(stops_sum(&h), o(0, 1, 1, 1));
    }

    #[test]
    fn queue_lengths() {
        let q = (Ofn::ZERO, Ofn::ZERO);
        let h = History::new(vec![track(0, &[q; 4])], 4).unwrap();
        assert_eq!(average_queue(&h), Ofn::ONE);
        let h = History::new(vec![track(0, &[q; 4]), track(1, &[q; 4])], 4).unwrap();
        assert_eq!(average_queue(&h), Ofn::crisp(2));
    }

    #[test]
    fn empty_fleet() {
        let h = History::new(vec![], 1).unwrap();
        let r = PerformanceReport::from_history(&h);
        assert!(r.empty_fleet);
        assert_eq!(
            (r.delay, r.stops, r.queue),
            (Ofn::ZERO, Ofn::ZERO, Ofn::ZERO)
        );
    }

    #[test]
    fn history_validation() {
        assert_eq!(History::new(vec![], 0), Err(HistoryError::NoSteps));
        let mut bad = velocities(3, &[Ofn::ONE, Ofn::ONE]);
        bad.samples[1].t = 5;
        assert_eq!(
            History::new(vec![bad], 10),
            Err(HistoryError::Gap(VehicleId(3)))
        );
        let ok = velocities(3, &[Ofn::ONE, Ofn::ONE]);
        assert!(matches!(
            History::new(vec![ok], 1),
            Err(HistoryError::OutOfRange { .. })
        ));
    }

    #[test]
    fn merged_populations_add_raw_sums() {
        let z = Ofn::ZERO;
        let a = History::new(vec![velocities(0, &[Ofn::ONE, z, z])], 3).unwrap();
        let b = History::new(vec![velocities(1, &[o(0, 1, 1, 1), o(0, 0, 1, 1)])], 2).unwrap();
        let merged = a.clone().merge(b.clone());
        assert_eq!(merged.vehicle_count(), 2);
        assert_eq!(merged.steps(), 3);
        assert_eq!(delay_sum(&merged), delay_sum(&a) + delay_sum(&b));
        assert_eq!(stops_sum(&merged), stops_sum(&a) + stops_sum(&b));
        assert_eq!(queue_sum(&merged), queue_sum(&a) + queue_sum(&b));
    }
}
