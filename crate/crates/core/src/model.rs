//! Fuzzy cellular automaton for a single lane.
//!
//! A lane is a lattice of equal cells. Every vehicle occupies one cell and
//! carries a fuzzy position, velocity and maximal velocity. One time step
//! advances every position by its current velocity, removes vehicles that have
//! left the lattice, then derives the next velocity of every vehicle from the
//! new positions:
//!
//! ```text
//! V(t) = min(V(t-1) + A(V(t-1)), G(t), Vmax)
//! G(t) = X_lead(t) - X(t) - (1,1,1,1)
//! X(t+1) = X(t) + V(t)
//! ```
//!
//! Traffic signals are modelled by an immobile phantom vehicle placed on the
//! stop line while the signal is red.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::History;
use crate::ofn::{Ofn, OfnError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Arithmetic(#[from] OfnError),
    #[error("invalid lane: {0}")]
    InvalidLane(String),
    #[error("invalid acceleration rule: {0}")]
    InvalidRule(String),
    #[error("gap invariant violated at t={t}: vehicle {follower} behind {lead} has gap {gap}")]
    InvariantViolated {
        t: u64,
        lead: VehicleId,
        follower: VehicleId,
        gap: Ofn,
    },
    #[error("lane has no signal")]
    NoSignal,
    #[error("step limit of {limit} reached")]
    StepLimit { limit: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VehicleId(pub u32);

impl VehicleId {
    /// Reserved for signal phantoms.
    pub const PHANTOM: VehicleId = VehicleId(u32::MAX);
}

impl fmt::Display for VehicleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == VehicleId::PHANTOM {
            f.write_str("phantom")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct LaneId(pub u8);

impl fmt::Display for LaneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => f.write_str("A"),
            1 => f.write_str("B"),
            n => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vehicle {
    pub id: VehicleId,
    pub position: Ofn,
    pub velocity: Ofn,
    pub v_max: Ofn,
    /// Acceleration term used for the current velocity.
    pub acceleration: Ofn,
    pub phantom: bool,
    pub origin_lane: LaneId,
    gap: Ofn,
}

impl Vehicle {
    pub fn new(id: VehicleId, position: Ofn, velocity: Ofn, v_max: Ofn) -> Self {
        Vehicle {
            id,
            position,
            velocity,
            v_max,
            acceleration: Ofn::ZERO,
            phantom: false,
            origin_lane: LaneId::default(),
            gap: v_max,
        }
    }

    pub fn with_acceleration(mut self, acceleration: Ofn) -> Self {
        self.acceleration = acceleration;
        self
    }

    pub fn on_lane(mut self, lane: LaneId) -> Self {
        self.origin_lane = lane;
        self
    }

    fn phantom_at(cell: i64, lane: LaneId) -> Self {
        Vehicle {
            id: VehicleId::PHANTOM,
            position: Ofn::crisp(cell),
            velocity: Ofn::ZERO,
            v_max: Ofn::ZERO,
            acceleration: Ofn::ZERO,
            phantom: true,
            origin_lane: lane,
            gap: Ofn::ZERO,
        }
    }

    /// Free cells ahead used for the current velocity.
    pub fn gap(&self) -> Ofn {
        self.gap
    }
}

/// Slow-to-stop acceleration: `high` when the previous velocity equals `v_max`
/// or `v_max - (1,0,0,0)`, `low` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccelerationRule {
    high: Ofn,
    low: Ofn,
}

impl Default for AccelerationRule {
    fn default() -> Self {
        AccelerationRule {
            high: Ofn::ONE,
            low: Ofn::new(0, 1, 1, 1),
        }
    }
}

impl AccelerationRule {
    pub fn new(high: Ofn, low: Ofn) -> Result<Self, ModelError> {
        for (name, value) in [("high", high), ("low", low)] {
            if !value.all(|c| c >= 0) {
                return Err(ModelError::InvalidRule(format!(
                    "{name} acceleration {value} has a negative component"
                )));
            }
        }
        Ok(AccelerationRule { high, low })
    }

    /// Same acceleration regardless of speed.
    pub fn uniform(value: Ofn) -> Result<Self, ModelError> {
        Self::new(value, value)
    }

    pub fn high(&self) -> Ofn {
        self.high
    }

    pub fn low(&self) -> Ofn {
        self.low
    }

    pub fn select(&self, v_prev: Ofn, v_max: Ofn) -> Result<Ofn, OfnError> {
        let near_max = v_max.checked_sub(Ofn::new(1, 0, 0, 0))?;
        Ok(if v_prev == v_max || v_prev == near_max {
            self.high
        } else {
            self.low
        })
    }
}

pub fn acceleration(v_prev: Ofn, v_max: Ofn, rule: &AccelerationRule) -> Result<Ofn, OfnError> {
    rule.select(v_prev, v_max)
}

/// `X_lead - X_follower - (1,1,1,1)`.
pub fn gap(lead: &Vehicle, follower: &Vehicle) -> Result<Ofn, OfnError> {
    lead.position
        .checked_sub(follower.position)?
        .checked_sub(Ofn::ONE)
}

/// Next velocity from the previous one, the gap ahead and the speed limit.
/// Pass `g = v_max` for a vehicle with nothing ahead.
pub fn step_velocity(
    v_prev: Ofn,
    g: Ofn,
    v_max: Ofn,
    rule: &AccelerationRule,
) -> Result<Ofn, OfnError> {
    let accelerated = v_prev.checked_add(rule.select(v_prev, v_max)?)?;
    Ok(accelerated.min(g).min(v_max))
}

/// Every position component is strictly past `boundary_cell`.
pub fn vacated(vehicle: &Vehicle, boundary_cell: i64) -> bool {
    vehicle.position.all(|c| c > boundary_cell)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignalColor {
    Red,
    Green,
}

/// State of one vehicle at one time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: u64,
    pub vehicle: VehicleId,
    pub lane: LaneId,
    pub position: Ofn,
    pub velocity: Ofn,
    pub acceleration: Ofn,
    pub gap: Ofn,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaneState {
    id: LaneId,
    cell_count: i64,
    /// Downstream first: `vehicles[i - 1]` leads `vehicles[i]`.
    vehicles: Vec<Vehicle>,
    signal_cell: Option<i64>,
    signal_phantom_id: Option<VehicleId>,
    time: u64,
    records: Vec<TraceRecord>,
    exited: Vec<VehicleId>,
}

impl LaneState {
    /// Builds a lane at `t = 0`.
    ///
    /// Vehicles are given downstream first. Their velocities are the initial
    /// condition; each is capped by the gap ahead and the vehicle's own limit.
    pub fn new(
        id: LaneId,
        cell_count: i64,
        vehicles: Vec<Vehicle>,
        signal_cell: Option<i64>,
    ) -> Result<Self, ModelError> {
        if cell_count < 1 {
            return Err(ModelError::InvalidLane(format!(
                "cell count {cell_count} < 1"
            )));
        }
        if let Some(c) = signal_cell {
            if !(0..cell_count).contains(&c) {
                return Err(ModelError::InvalidLane(format!(
                    "signal cell {c} outside 0..{cell_count}"
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for v in &vehicles {
            let fail =
                |what: String| Err(ModelError::InvalidLane(format!("vehicle {}: {what}", v.id)));
            if v.phantom || v.id == VehicleId::PHANTOM {
                return fail("phantoms are managed through set_signal".into());
            }
            if !seen.insert(v.id) {
                return fail("duplicate id".into());
            }
            if !v.position.all(|c| (0..cell_count).contains(&c)) {
                return fail(format!("position {} outside 0..{cell_count}", v.position));
            }
            if !v.v_max.all(|c| c >= 0) {
                return fail(format!("negative maximal velocity {}", v.v_max));
            }
            if !v.velocity.all(|c| c >= 0) {
                return fail(format!("negative velocity {}", v.velocity));
            }
        }
        let mut lane = LaneState {
            id,
            cell_count,
            vehicles: vehicles.into_iter().map(|v| v.on_lane(id)).collect(),
            signal_cell,
            signal_phantom_id: None,
            time: 0,
            records: Vec::new(),
            exited: Vec::new(),
        };
        lane.check_gaps()?;
        for i in 0..lane.vehicles.len() {
            let g = lane.gap_ahead(i)?;
            let v = &mut lane.vehicles[i];
            v.gap = g;
            v.velocity = v.velocity.min(g).min(v.v_max);
        }
        Ok(lane)
    }

    pub fn id(&self) -> LaneId {
        self.id
    }

    pub fn cell_count(&self) -> i64 {
        self.cell_count
    }

    /// Last cell of the lattice; vehicles fully past it leave the lane.
    pub fn exit_cell(&self) -> i64 {
        self.cell_count - 1
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn traffic(&self) -> impl Iterator<Item = &Vehicle> {
        self.vehicles.iter().filter(|v| !v.phantom)
    }

    /// No non-phantom vehicle left on the lane.
    pub fn is_clear(&self) -> bool {
        self.traffic().next().is_none()
    }

    pub fn signal_cell(&self) -> Option<i64> {
        self.signal_cell
    }

    pub fn signal_phantom_id(&self) -> Option<VehicleId> {
        self.signal_phantom_id
    }

    pub fn signal(&self) -> Option<SignalColor> {
        self.signal_cell.map(|_| {
            if self.signal_phantom_id.is_some() {
                SignalColor::Red
            } else {
                SignalColor::Green
            }
        })
    }

    /// Vehicles that have left the lattice, in exit order.
    pub fn exited(&self) -> &[VehicleId] {
        &self.exited
    }

    /// Gap used by vehicle `i`. Behind a phantom the nearest real vehicle
    /// further ahead is also respected, so vehicles already past the stop line
    /// at red onset are never overrun.
    fn gap_ahead(&self, i: usize) -> Result<Ofn, OfnError> {
        let follower = &self.vehicles[i];
        let mut g: Option<Ofn> = None;
        for lead in self.vehicles[..i].iter().rev() {
            let to_lead = gap(lead, follower)?;
            g = Some(g.map_or(to_lead, |cur| cur.min(to_lead)));
            if !lead.phantom {
                break;
            }
        }
        Ok(g.unwrap_or(follower.v_max))
    }

    fn check_gaps(&self) -> Result<(), ModelError> {
        for (i, follower) in self.vehicles.iter().enumerate() {
            if follower.phantom {
                continue;
            }
            for lead in self.vehicles[..i].iter().rev() {
                let g = gap(lead, follower)?;
                if !g.all(|c| c >= 0) {
                    return Err(ModelError::InvariantViolated {
                        t: self.time,
                        lead: lead.id,
                        follower: follower.id,
                        gap: g,
                    });
                }
                if !lead.phantom {
                    break;
                }
            }
        }
        Ok(())
    }

    /// Switches the signal. Red places a phantom on the stop line ahead of the
    /// first vehicle lying entirely upstream of it and caps that vehicle's
    /// current velocity by the new gap; vehicles already reaching the stop
    /// line are not held. Green removes the phantom.
    pub fn set_signal(&mut self, color: SignalColor) -> Result<(), ModelError> {
        let cell = self.signal_cell.ok_or(ModelError::NoSignal)?;
        match (color, self.signal_phantom_id) {
            (SignalColor::Red, None) => {
                let at = self
                    .vehicles
                    .iter()
                    .position(|v| !v.phantom && v.position.all(|c| c < cell))
                    .unwrap_or(self.vehicles.len());
                self.vehicles.insert(at, Vehicle::phantom_at(cell, self.id));
                self.signal_phantom_id = Some(VehicleId::PHANTOM);
                if at + 1 < self.vehicles.len() {
                    let g = self.gap_ahead(at + 1)?;
                    let follower = &mut self.vehicles[at + 1];
                    follower.gap = g;
                    follower.velocity = follower.velocity.min(g);
                }
            }
            (SignalColor::Green, Some(_)) => {
                self.vehicles.retain(|v| !v.phantom);
                self.signal_phantom_id = None;
            }
            _ => {}
        }
        Ok(())
    }

    /// Records of the current time step, not yet committed to the trace.
    pub fn snapshot(&self) -> Vec<TraceRecord> {
        self.traffic()
            .map(|v| TraceRecord {
                t: self.time,
                vehicle: v.id,
                lane: self.id,
                position: v.position,
                velocity: v.velocity,
                acceleration: v.acceleration,
                gap: v.gap,
            })
            .collect()
    }

    /// Every record from `t = 0` up to and including the current step.
    pub fn trace(&self) -> Vec<TraceRecord> {
        let mut all = self.records.clone();
        all.extend(self.snapshot());
        all
    }

    /// Measure input covering steps `0..=time`.
    pub fn history(&self) -> History {
        History::from_records(&self.trace(), self.time + 1)
    }

    /// Advances one time step.
    pub fn step(&mut self, rule: &AccelerationRule) -> Result<(), ModelError> {
        let current = self.snapshot();
        self.records.extend(current);

        for v in self.vehicles.iter_mut().filter(|v| !v.phantom) {
            v.position = v.position.checked_add(v.velocity)?;
        }
        self.time += 1;

        let exit = self.exit_cell();
        let exited = &mut self.exited;
        self.vehicles.retain(|v| {
            let gone = !v.phantom && vacated(v, exit);
            if gone {
                exited.push(v.id);
            }
            !gone
        });

        for i in 0..self.vehicles.len() {
            if self.vehicles[i].phantom {
                continue;
            }
            let g = self.gap_ahead(i)?;
            let v = &mut self.vehicles[i];
            let a = rule.select(v.velocity, v.v_max)?;
            v.acceleration = a;
            v.gap = g;
            v.velocity = v.velocity.checked_add(a)?.min(g).min(v.v_max);
        }
        self.check_gaps()
    }

    /// Default cap: `10 * cell_count * vehicle_count`.
    pub fn default_step_limit(&self) -> u64 {
        let n = self.traffic().count().max(1) as u64;
        10 * self.cell_count as u64 * n
    }

    /// Steps until no traffic is left; returns the number of steps taken.
    pub fn run_until_clear(
        &mut self,
        rule: &AccelerationRule,
        max_steps: Option<u64>,
    ) -> Result<u64, ModelError> {
        let limit = max_steps.unwrap_or_else(|| self.default_step_limit());
        let start = self.time;
        while !self.is_clear() {
            if self.time - start >= limit {
                return Err(ModelError::StepLimit { limit });
            }
            self.step(rule)?;
        }
        Ok(self.time - start)
    }
}
