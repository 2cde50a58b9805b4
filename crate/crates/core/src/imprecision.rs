//! Fuzzy initial positions from segment-level vehicle counts.
//!
//! When an observation only says that `N` vehicles are somewhere in cells
//! `c_S..=c_E`, each vehicle gets a position whose four components fuse four
//! extreme placements: a packed queue at the upstream end, an evenly spaced
//! platoon anchored upstream, an evenly spaced platoon anchored downstream, and
//! a packed queue at the downstream end.

use std::io::Read;

use serde::Deserialize;
use thiserror::Error;

use crate::model::{Vehicle, VehicleId};
use crate::ofn::Ofn;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImprecisionError {
    #[error("segment {c_start}..={c_end} cannot hold {count} vehicles")]
    Infeasible {
        c_start: i64,
        c_end: i64,
        count: usize,
    },
    #[error("invalid observation: {0}")]
    Invalid(String),
    #[error("observation input: {0}")]
    Input(String),
}

/// `count` vehicles observed somewhere in cells `c_start..=c_end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentObservation {
    pub c_start: i64,
    pub c_end: i64,
    pub count: usize,
    /// Maximal velocity of each vehicle, downstream first.
    pub v_max_list: Vec<Ofn>,
}

impl SegmentObservation {
    /// Observation of `count` vehicles sharing one maximal velocity.
    pub fn uniform(c_start: i64, c_end: i64, count: usize, v_max: Ofn) -> Self {
        SegmentObservation {
            c_start,
            c_end,
            count,
            v_max_list: vec![v_max; count],
        }
    }

    /// Number of cells in the segment (the precision unit).
    pub fn len(&self) -> i64 {
        self.c_end - self.c_start + 1
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn validate(&self) -> Result<(), ImprecisionError> {
        if self.c_end < self.c_start {
            return Err(ImprecisionError::Invalid(format!(
                "segment end {} before start {}",
                self.c_end, self.c_start
            )));
        }
        if self.v_max_list.len() != self.count {
            return Err(ImprecisionError::Invalid(format!(
                "{} maximal velocities for {} vehicles",
                self.v_max_list.len(),
                self.count
            )));
        }
        if let Some(v) = self.v_max_list.iter().find(|v| !v.all(|c| c >= 0)) {
            return Err(ImprecisionError::Invalid(format!(
                "negative maximal velocity {v}"
            )));
        }
        if self.count as i64 > self.len() {
            return Err(ImprecisionError::Infeasible {
                c_start: self.c_start,
                c_end: self.c_end,
                count: self.count,
            });
        }
        Ok(())
    }
}

/// Fuzzy positions for the vehicles of one observation, downstream first.
///
/// For vehicle `n = 1..=N` with `s = floor(L / N)`:
///
/// ```text
/// x1 = c_S + N - n
/// x2 = c_S + sum_{i=n+1..N} min(s, vmax_i.2 + 1)
/// x3 = c_E - sum_{i=2..n}   min(s, vmax_i.3 + 1)
/// x4 = c_E + 1 - n
/// ```
pub fn fuzzify_segment(obs: &SegmentObservation) -> Result<Vec<Ofn>, ImprecisionError> {
    obs.validate()?;
    let n_total = obs.count;
    if n_total == 0 {
        return Ok(Vec::new());
    }
    let spacing = obs.len() / n_total as i64;
    let step = |i: usize, component: usize| spacing.min(obs.v_max_list[i - 1].get(component) + 1);
    let positions = (1..=n_total)
        .map(|n| {
            let x1 = obs.c_start + (n_total - n) as i64;
            let x2 = obs.c_start + (n + 1..=n_total).map(|i| step(i, 2)).sum::<i64>();
            let x3 = obs.c_end - (2..=n).map(|i| step(i, 3)).sum::<i64>();
            let x4 = obs.c_end + 1 - n as i64;
            Ofn::new(x1, x2, x3, x4)
        })
        .collect();
    Ok(positions)
}

/// Counts crisp positions in consecutive `precision_unit`-cell segments
/// starting at cell 0. Returns every segment, empty ones included, downstream
/// first. The last segment may be shorter.
pub fn aggregate_counts(
    crisp_positions: &[i64],
    lane_cells: i64,
    precision_unit: i64,
    v_max: Ofn,
) -> Result<Vec<SegmentObservation>, ImprecisionError> {
    if precision_unit < 1 {
        return Err(ImprecisionError::Invalid(format!(
            "precision unit {precision_unit} < 1"
        )));
    }
    if lane_cells < 1 {
        return Err(ImprecisionError::Invalid(format!(
            "lane of {lane_cells} cells"
        )));
    }
    let segments = ((lane_cells + precision_unit - 1) / precision_unit) as usize;
    let mut counts = vec![0usize; segments];
    for &p in crisp_positions {
        if !(0..lane_cells).contains(&p) {
            return Err(ImprecisionError::Invalid(format!(
                "position {p} outside 0..{lane_cells}"
            )));
        }
        counts[(p / precision_unit) as usize] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .rev()
        .map(|(k, count)| {
            let start = k as i64 * precision_unit;
            let end = (start + precision_unit).min(lane_cells) - 1;
            SegmentObservation::uniform(start, end, count, v_max)
        })
        .collect())
}

/// Initial velocity given to vehicles created from observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialVelocity {
    /// `(0, vmax.2, vmax.3, vmax.4)`: possibly stopped, possibly at speed.
    #[default]
    Fused,
    Stopped,
    AtMax,
}

impl InitialVelocity {
    pub fn for_vehicle(self, v_max: Ofn) -> Ofn {
        match self {
            InitialVelocity::Fused => {
                let [_, b, c, d] = v_max.components();
                Ofn::new(0, b, c, d)
            }
            InitialVelocity::Stopped => Ofn::ZERO,
            InitialVelocity::AtMax => v_max,
        }
    }
}

impl std::str::FromStr for InitialVelocity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "fused" => Ok(InitialVelocity::Fused),
            "stopped" => Ok(InitialVelocity::Stopped),
            "max" | "at-max" => Ok(InitialVelocity::AtMax),
            other => Err(format!(
                "unknown initial velocity {other:?} (fused, stopped, max)"
            )),
        }
    }
}

/// Vehicles for a set of non-overlapping observations, downstream first, with
/// ids assigned consecutively from `first_id`.
pub fn vehicles_from_observations(
    observations: &[SegmentObservation],
    first_id: u32,
    initial: InitialVelocity,
) -> Result<Vec<Vehicle>, ImprecisionError> {
    let mut ordered: Vec<&SegmentObservation> = observations.iter().collect();
    ordered.sort_by_key(|o| std::cmp::Reverse(o.c_start));
    for pair in ordered.windows(2) {
        if pair[1].c_end >= pair[0].c_start {
            return Err(ImprecisionError::Invalid(format!(
                "segments {}..={} and {}..={} overlap",
                pair[1].c_start, pair[1].c_end, pair[0].c_start, pair[0].c_end
            )));
        }
    }
    let mut vehicles = Vec::new();
    let mut next_id = first_id;
    for obs in ordered {
        for (x, &v_max) in fuzzify_segment(obs)?.into_iter().zip(&obs.v_max_list) {
            vehicles.push(Vehicle::new(
                VehicleId(next_id),
                x,
                initial.for_vehicle(v_max),
                v_max,
            ));
            next_id += 1;
        }
    }
    Ok(vehicles)
}

#[derive(Debug, Deserialize)]
struct ObservationRow {
    segment_start: i64,
    segment_end: i64,
    count: usize,
}

/// Reads observation rows `segment_start,segment_end,count` (with that header
/// line; `#` lines are comments).
pub fn read_observations<R: Read>(
    input: R,
    v_max: Ofn,
) -> Result<Vec<SegmentObservation>, ImprecisionError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut out = Vec::new();
    for row in reader.deserialize::<ObservationRow>() {
        let row = row.map_err(|e| ImprecisionError::Input(e.to_string()))?;
        let obs = SegmentObservation::uniform(row.segment_start, row.segment_end, row.count, v_max);
        obs.validate()?;
        out.push(obs);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const VMAX: Ofn = Ofn::new(1, 2, 2, 3);

    fn o(a: i64, b: i64, c: i64, d: i64) -> Ofn {
        Ofn::new(a, b, c, d)
    }

    #[test]
    fn three_vehicles_in_fifteen_cells() {
        let obs = SegmentObservation::uniform(1, 15, 3, VMAX);
        assert_eq!(
            fuzzify_segment(&obs).unwrap(),
            [o(3, 7, 15, 15), o(2, 4, 12, 14), o(1, 1, 9, 13)]
        );
    }

    #[test]
    fn single_cell() {
        let obs = SegmentObservation::uniform(0, 0, 1, VMAX);
        assert_eq!(fuzzify_segment(&obs).unwrap(), [Ofn::ZERO]);
    }

    #[test]
    fn full_segment_is_a_packed_range() {
        let obs = SegmentObservation::uniform(4, 8, 5, VMAX);
        let xs = fuzzify_segment(&obs).unwrap();
        for (k, x) in xs.iter().enumerate() {
            let n = k as i64 + 1;
            assert_eq!(*x, o(4 + 5 - n, 4 + 5 - n, 8 + 1 - n, 8 + 1 - n));
        }
    }

    #[test]
    fn errors() {
        let too_many = SegmentObservation::uniform(0, 2, 4, VMAX);
        assert!(matches!(
            fuzzify_segment(&too_many),
            Err(ImprecisionError::Infeasible { .. })
        ));
        let reversed = SegmentObservation::uniform(5, 2, 1, VMAX);
        assert!(fuzzify_segment(&reversed).is_err());
        let mismatched = SegmentObservation {
            c_start: 0,
            c_end: 5,
            count: 2,
            v_max_list: vec![VMAX],
        };
        assert!(fuzzify_segment(&mismatched).is_err());
        let empty = SegmentObservation::uniform(0, 5, 0, VMAX);
        assert!(fuzzify_segment(&empty).unwrap().is_empty());
    }

    #[test]
    fn counts_per_segment() {
        let whole = aggregate_counts(&[2, 3, 9], 15, 15, VMAX).unwrap();
        assert_eq!(whole.len(), 1);
        assert_eq!(whole[0].count, 3);

        let exact = aggregate_counts(&[2, 3, 9], 15, 1, VMAX).unwrap();
        assert_eq!(exact.len(), 15);
        assert!(exact.iter().all(|o| o.count <= 1 && o.len() == 1));
        assert_eq!(exact.iter().map(|o| o.count).sum::<usize>(), 3);

        let fives = aggregate_counts(&[2, 3, 9], 15, 5, VMAX).unwrap();
        let by_segment: Vec<_> = fives
            .iter()
            .map(|o| (o.c_start, o.c_end, o.count))
            .collect();
        assert_eq!(by_segment, [(10, 14, 0), (5, 9, 1), (0, 4, 2)]);

        let ragged = aggregate_counts(&[9], 10, 4, VMAX).unwrap();
        assert_eq!(
            (ragged[0].c_start, ragged[0].c_end, ragged[0].count),
            (8, 9, 1)
        );
        assert!(aggregate_counts(&[10], 10, 4, VMAX).is_err());
        assert!(aggregate_counts(&[1], 10, 0, VMAX).is_err());
    }

    #[test]
    fn full_precision_round_trip() {
        let cells = [0, 4, 5, 11, 13];
        let obs = aggregate_counts(&cells, 15, 1, VMAX).unwrap();
        let vehicles = vehicles_from_observations(&obs, 0, InitialVelocity::Stopped).unwrap();
        let xs: Vec<_> = vehicles.iter().map(|v| v.position).collect();
        let expected: Vec<_> = cells.iter().rev().map(|&c| Ofn::crisp(c)).collect();
        assert_eq!(xs, expected);
    }

    #[test]
    fn initial_velocity_modes() {
        assert_eq!(InitialVelocity::Fused.for_vehicle(VMAX), o(0, 2, 2, 3));
        assert_eq!(InitialVelocity::Stopped.for_vehicle(VMAX), Ofn::ZERO);
        assert_eq!(InitialVelocity::AtMax.for_vehicle(VMAX), VMAX);
        assert_eq!(
            "max".parse::<InitialVelocity>().unwrap(),
            InitialVelocity::AtMax
        );
        assert!("fast".parse::<InitialVelocity>().is_err());
    }

    #[test]
    fn overlapping_segments_rejected() {
        let a = SegmentObservation::uniform(0, 5, 1, VMAX);
        let b = SegmentObservation::uniform(5, 9, 1, VMAX);
        assert!(vehicles_from_observations(&[a, b], 0, InitialVelocity::Fused).is_err());
    }

    #[test]
    fn observation_csv() {
        let text = "# counts\nsegment_start,segment_end,count\n0,4,2\n5, 9, 1\n";
        let obs = read_observations(text.as_bytes(), VMAX).unwrap();
        assert_eq!(obs.len(), 2);
        assert_eq!((obs[1].c_start, obs[1].c_end, obs[1].count), (5, 9, 1));
        assert!(
            read_observations("segment_start,segment_end,count\n0,1,3\n".as_bytes(), VMAX).is_err()
        );
        assert!(
            read_observations("segment_start,segment_end,count\n0,x,3\n".as_bytes(), VMAX).is_err()
        );
    }
}
