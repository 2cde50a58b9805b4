//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use fuzzysim::model::{LaneId, LaneState, SignalColor, Vehicle, VehicleId};
use fuzzysim::{AccelerationRule, Ofn};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Crisp single-lane automaton on plain integers.
#[derive(Debug, Clone)]
pub struct ScalarLane {
    pub cells: i64,
    pub signal: Option<i64>,
    pub red: bool,
    pub low: i64,
    pub high: i64,
    pub t: u64,
    /// Downstream first.
    pub cars: Vec<ScalarCar>,
    pub records: Vec<ScalarRecord>,
}

#[derive(Debug, Clone, Copy)]
pub struct ScalarCar {
    pub id: u32,
    pub x: i64,
    pub v: i64,
    pub v_max: i64,
    pub a: i64,
    pub g: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarRecord {
    pub t: u64,
    pub id: u32,
    pub x: i64,
    pub v: i64,
    pub a: i64,
    pub g: i64,
}

impl ScalarLane {
    pub fn new(cells: i64, signal: Option<i64>, low: i64, high: i64, cars: Vec<ScalarCar>) -> Self {
        let mut lane = ScalarLane {
            cells,
            signal,
            red: false,
            low,
            high,
            t: 0,
            cars,
            records: vec![],
        };
        for i in 0..lane.cars.len() {
            let g = lane.gap(i);
            let car = &mut lane.cars[i];
            car.g = g;
            car.v = car.v.min(g).min(car.v_max);
        }
        lane
    }

    /// Free cells to the nearest obstacle ahead (car or red stop line).
    fn gap(&self, i: usize) -> i64 {
        let x = self.cars[i].x;
        let mut ahead: Option<i64> = if i > 0 {
            Some(self.cars[i - 1].x)
        } else {
            None
        };
        if let (true, Some(c)) = (self.red, self.signal) {
            if x < c {
                ahead = Some(ahead.map_or(c, |a| a.min(c)));
            }
        }
        match ahead {
            Some(a) => a - x - 1,
            None => self.cars[i].v_max,
        }
    }

    pub fn set_red(&mut self, red: bool) {
        let was = self.red;
        self.red = red;
        if red && !was {
            let c = self.signal.expect("signal");
            if let Some(i) = self.cars.iter().position(|car| car.x < c) {
                let g = self.gap(i);
                self.cars[i].g = g;
                self.cars[i].v = self.cars[i].v.min(g);
            }
        }
    }

    pub fn snapshot(&self) -> Vec<ScalarRecord> {
        self.cars
            .iter()
            .map(|c| ScalarRecord {
                t: self.t,
                id: c.id,
                x: c.x,
                v: c.v,
                a: c.a,
                g: c.g,
            })
            .collect()
    }

    pub fn step(&mut self) {
        let snap = self.snapshot();
        self.records.extend(snap);
        for c in &mut self.cars {
            c.x += c.v;
        }
        self.t += 1;
        let last = self.cells - 1;
        self.cars.retain(|c| c.x <= last);
        for i in 0..self.cars.len() {
            let g = self.gap(i);
            let c = &mut self.cars[i];
            c.a = if c.v == c.v_max { self.high } else { self.low };
            c.g = g;
            c.v = (c.v + c.a).min(g).min(c.v_max);
        }
    }

    pub fn trace(&self) -> Vec<ScalarRecord> {
        let mut all = self.records.clone();
        all.extend(self.snapshot());
        all
    }

    /// Stopped vehicle-steps, stops, zero-gap vehicle-steps.
    pub fn counts(&self) -> (i64, i64, i64) {
        let trace = self.trace();
        let delay = trace.iter().filter(|r| r.v == 0).count() as i64;
        let queue = trace.iter().filter(|r| r.g == 0).count() as i64;
        let mut stops = 0;
        for r in &trace {
            if r.v == 0 && r.t > 0 {
                if let Some(prev) = trace.iter().find(|p| p.id == r.id && p.t + 1 == r.t) {
                    if prev.v > 0 {
                        stops += 1;
                    }
                }
            }
        }
        (delay, stops, queue)
    }
}

/// Rounded integer quotient, halves away from zero, via floating point.
pub fn round_quotient(a: i64, n: i64) -> i64 {
    (a as f64 / n as f64).round() as i64
}

fn cut(a: [i64; 4], alpha: f64) -> (f64, f64) {
    let mut s = a.map(|c| c as f64);
    s.sort_by(|x, y| x.partial_cmp(y).unwrap());
    (s[0] + alpha * (s[1] - s[0]), s[3] - alpha * (s[3] - s[2]))
}

/// Sampling estimate of `P(A < B)`: alpha uniform on `[0, 1]`, then uniform
/// draws from both alpha-cuts. Exact ties count one half.
pub fn monte_carlo_prob_less(a: Ofn, b: Ofn, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut score = 0.0;
    for _ in 0..samples {
        let alpha: f64 = rng.random();
        let (alo, ahi) = cut(a.components(), alpha);
        let (blo, bhi) = cut(b.components(), alpha);
        let x = alo + rng.random::<f64>() * (ahi - alo);
        let y = blo + rng.random::<f64>() * (bhi - blo);
        if x < y {
            score += 1.0;
        } else if x == y {
            score += 0.5;
        }
    }
    score / samples as f64
}

/// Random proper trapezoid with components in `lo..=hi`.
pub fn random_trapezoid(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Ofn {
    let mut c = [0i64; 4].map(|_| rng.random_range(lo..=hi));
    c.sort_unstable();
    Ofn::from_array(c)
}

pub fn any_ofn(range: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = Ofn> {
    prop::array::uniform4(range).prop_map(Ofn::from_array)
}

pub fn proper_ofn(range: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = Ofn> {
    prop::array::uniform4(range).prop_map(|mut c| {
        c.sort_unstable();
        Ofn::from_array(c)
    })
}

/// Lane with non-overlapping (possibly improper) fuzzy vehicles, optional red
/// signal and a random non-negative rule, plus a number of steps to run.
#[derive(Debug, Clone)]
pub struct LaneCase {
    pub lane: LaneState,
    pub rule: AccelerationRule,
    pub steps: usize,
}

pub fn lane_case() -> impl Strategy<Value = LaneCase> {
    let vehicle = (any_ofn(0..=4), any_ofn(0..=3), any_ofn(0..=3));
    (
        any_ofn(30..=49),
        prop::collection::vec(vehicle, 1..6),
        prop::option::of(0i64..60),
        any_ofn(0..=2),
        any_ofn(0..=2),
        1usize..10,
    )
        .prop_map(|(lead, specs, signal, high, low, steps)| {
            let mut x = lead;
            let mut vehicles = Vec::new();
            for (k, (gap, v, v_max)) in specs.into_iter().enumerate() {
                if k > 0 {
                    x = x - Ofn::ONE - gap;
                }
                vehicles.push(Vehicle::new(VehicleId(k as u32), x, v, v_max));
            }
            let mut lane = LaneState::new(LaneId(0), 60, vehicles, signal).expect("valid lane");
            if signal.is_some() {
                lane.set_signal(SignalColor::Red).unwrap();
            }
            LaneCase {
                lane,
                rule: AccelerationRule::new(high, low).unwrap(),
                steps,
            }
        })
}

/// Non-phantom vehicles violating a non-negative gap to the vehicle (or
/// phantom) right ahead, or to the nearest real vehicle ahead.
pub fn gap_violations(lane: &LaneState) -> Vec<(VehicleId, Ofn)> {
    let vs = lane.vehicles();
    let mut bad = vec![];
    for (i, f) in vs.iter().enumerate() {
        if f.phantom {
            continue;
        }
        if let Some(lead) = i.checked_sub(1).map(|j| &vs[j]) {
            let g = lead.position - f.position - Ofn::ONE;
            if !g.all(|c| c >= 0) {
                bad.push((f.id, g));
            }
        }
        if let Some(real) = vs[..i].iter().rev().find(|v| !v.phantom) {
            let g = real.position - f.position - Ofn::ONE;
            if !g.all(|c| c >= 0) {
                bad.push((f.id, g));
            }
        }
    }
    bad
}
