//! Signal-controlled lane closure on a two-lane road.
//!
//! Both travel directions share a single open lane through the work zone.
//! Each direction is simulated on its own lattice: `approach` cells followed
//! by the work-zone cells, with the stop line on the first work-zone cell.
//! A closed fleet is placed on each approach; one direction gets green until
//! all of its vehicles have left the work zone, then the other direction is
//! released.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::comparison::{Comparator, DEFAULT_LEVELS};
use crate::imprecision::{
    aggregate_counts, vehicles_from_observations, ImprecisionError, InitialVelocity,
};
use crate::measures::{History, PerformanceReport};
use crate::model::{AccelerationRule, LaneId, LaneState, ModelError, SignalColor};
use crate::ofn::Ofn;

pub const LANE_A: LaneId = LaneId(0);
pub const LANE_B: LaneId = LaneId(1);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error(transparent)]
    Placement(#[from] ImprecisionError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no termination within {limit} steps")]
    NonTermination { limit: u64, partial: Box<History> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Lane A is served first.
    AFirst,
    BFirst,
}

impl Strategy {
    fn order(self) -> (LaneId, LaneId) {
        match self {
            Strategy::AFirst => (LANE_A, LANE_B),
            Strategy::BFirst => (LANE_B, LANE_A),
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "a-first" | "a" => Ok(Strategy::AFirst),
            "b-first" | "b" => Ok(Strategy::BFirst),
            other => Err(format!("unknown strategy {other:?} (a-first, b-first)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub lane_a_cells: i64,
    pub lane_b_cells: i64,
    pub workzone_cells: i64,
    pub n_a: usize,
    pub n_b: usize,
    pub precision_unit: i64,
    pub v_max: Ofn,
    pub rule: AccelerationRule,
    #[serde(with = "initial_velocity_serde")]
    pub initial_velocity: InitialVelocity,
    pub seed: u64,
    /// Defaults to `10 * lattice cells * vehicles`.
    pub max_steps: Option<u64>,
    pub strategy: Strategy,
    pub comparison_levels: usize,
}

mod initial_velocity_serde {
    use super::InitialVelocity;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &InitialVelocity, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match v {
            InitialVelocity::Fused => "fused",
            InitialVelocity::Stopped => "stopped",
            InitialVelocity::AtMax => "max",
        })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<InitialVelocity, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            lane_a_cells: 100,
            lane_b_cells: 100,
            workzone_cells: 20,
            n_a: 0,
            n_b: 0,
            precision_unit: 1,
            v_max: Ofn::new(1, 2, 2, 3),
            rule: AccelerationRule::default(),
            initial_velocity: InitialVelocity::Fused,
            seed: 0,
            max_steps: None,
            strategy: Strategy::AFirst,
            comparison_levels: DEFAULT_LEVELS,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |msg: String| Err(ScenarioError::Config(msg));
        for (name, cells) in [
            ("lane_a_cells", self.lane_a_cells),
            ("lane_b_cells", self.lane_b_cells),
            ("workzone_cells", self.workzone_cells),
        ] {
            if cells < 1 {
                return fail(format!("{name} = {cells} must be positive"));
            }
        }
        if self.n_a as i64 > self.lane_a_cells {
            return fail(format!(
                "n_a = {} exceeds {} cells of lane A",
                self.n_a, self.lane_a_cells
            ));
        }
        if self.n_b as i64 > self.lane_b_cells {
            return fail(format!(
                "n_b = {} exceeds {} cells of lane B",
                self.n_b, self.lane_b_cells
            ));
        }
        if self.precision_unit < 1 {
            return fail(format!(
                "precision_unit = {} must be positive",
                self.precision_unit
            ));
        }
        if !self.v_max.all(|c| c >= 0) {
            return fail(format!("v_max {} has a negative component", self.v_max));
        }
        if self.comparison_levels < 2 {
            return fail(format!(
                "comparison_levels = {} must be at least 2",
                self.comparison_levels
            ));
        }
        Ok(())
    }

    fn approach_cells(&self, lane: LaneId) -> i64 {
        if lane == LANE_A {
            self.lane_a_cells
        } else {
            self.lane_b_cells
        }
    }

    fn fleet(&self, lane: LaneId) -> usize {
        if lane == LANE_A {
            self.n_a
        } else {
            self.n_b
        }
    }

    pub fn step_limit(&self) -> u64 {
        self.max_steps.unwrap_or_else(|| {
            let cells = self.lane_a_cells.max(self.lane_b_cells) + self.workzone_cells;
            10 * cells as u64 * (self.n_a + self.n_b).max(1) as u64
        })
    }
}

/// Distinct cells drawn uniformly for each approach, ascending. Lane A and
/// lane B use separate streams of the seeded generator.
pub fn draw_placements(cfg: &ScenarioConfig) -> Result<(Vec<i64>, Vec<i64>), ScenarioError> {
    cfg.validate()?;
    let draw = |lane: LaneId| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(u64::from(lane.0));
        let mut cells: Vec<i64> =
            rand::seq::index::sample(&mut rng, cfg.approach_cells(lane) as usize, cfg.fleet(lane))
                .into_iter()
                .map(|c| c as i64)
                .collect();
        cells.sort_unstable();
        cells
    };
    Ok((draw(LANE_A), draw(LANE_B)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Idle,
    First,
    Second,
    Done,
}

/// Both approach lanes and the signal plan state.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkZone {
    lanes: [LaneState; 2],
    workzone_cells: i64,
    rule: AccelerationRule,
    strategy: Strategy,
    phase: Phase,
    limit: u64,
    switch_step: Option<u64>,
}

/// Builds the initial network from the configured random placement.
pub fn build_scenario(cfg: &ScenarioConfig) -> Result<WorkZone, ScenarioError> {
    let (a, b) = draw_placements(cfg)?;
    WorkZone::from_placements(cfg, &a, &b)
}

impl WorkZone {
    /// Builds the initial network from explicit crisp approach cells. The
    /// placements are aggregated by the precision unit and fuzzified; both
    /// signals start red.
    pub fn from_placements(
        cfg: &ScenarioConfig,
        cells_a: &[i64],
        cells_b: &[i64],
    ) -> Result<Self, ScenarioError> {
        cfg.validate()?;
        let mut first_id = 0u32;
        let mut build = |lane: LaneId, cells: &[i64]| -> Result<LaneState, ScenarioError> {
            let approach = cfg.approach_cells(lane);
            let obs = aggregate_counts(cells, approach, cfg.precision_unit, cfg.v_max)?;
            let vehicles = vehicles_from_observations(&obs, first_id, cfg.initial_velocity)?;
            first_id += vehicles.len() as u32;
            let mut state = LaneState::new(
                lane,
                approach + cfg.workzone_cells,
                vehicles,
                Some(approach),
            )?;
            state.set_signal(SignalColor::Red)?;
            Ok(state)
        };
        let lane_a = build(LANE_A, cells_a)?;
        let lane_b = build(LANE_B, cells_b)?;
        Ok(WorkZone {
            lanes: [lane_a, lane_b],
            workzone_cells: cfg.workzone_cells,
            rule: cfg.rule,
            strategy: cfg.strategy,
            phase: Phase::Idle,
            limit: cfg.step_limit(),
            switch_step: None,
        })
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        assert_eq!(
            self.phase,
            Phase::Idle,
            "strategy fixed once the run started"
        );
        self.strategy = strategy;
        self
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn lane(&self, id: LaneId) -> &LaneState {
        &self.lanes[id.0 as usize]
    }

    fn lane_mut(&mut self, id: LaneId) -> &mut LaneState {
        &mut self.lanes[id.0 as usize]
    }

    pub fn time(&self) -> u64 {
        self.lanes[0].time()
    }

    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    /// Step at which the second direction got green.
    pub fn switch_step(&self) -> Option<u64> {
        self.switch_step
    }

    /// Number of vehicles of `lane` whose position support touches the work zone.
    pub fn occupying_workzone(&self, lane: LaneId) -> usize {
        let state = self.lane(lane);
        let start = state.cell_count() - self.workzone_cells;
        let end = state.exit_cell();
        state
            .traffic()
            .filter(|v| v.position.max_component() >= start && v.position.min_component() <= end)
            .count()
    }

    fn control(&mut self) -> Result<(), ScenarioError> {
        let (first, second) = self.strategy.order();
        if self.phase == Phase::Idle {
            self.lane_mut(first).set_signal(SignalColor::Green)?;
            self.phase = Phase::First;
        }
        if self.phase == Phase::First && self.lane(first).is_clear() {
            self.lane_mut(first).set_signal(SignalColor::Red)?;
            self.lane_mut(second).set_signal(SignalColor::Green)?;
            self.switch_step = Some(self.time());
            log::debug!(
                "direction {first} clear at t={}, switching to {second}",
                self.time()
            );
            self.phase = Phase::Second;
        }
        if self.phase == Phase::Second && self.lane(second).is_clear() {
            self.phase = Phase::Done;
        }
        Ok(())
    }

    /// Applies the signal plan and, unless the run is over, advances both
    /// lanes one step. Returns `true` once every vehicle has left.
    pub fn advance(&mut self) -> Result<bool, ScenarioError> {
        self.control()?;
        if self.is_done() {
            return Ok(true);
        }
        if self.time() >= self.limit {
            return Err(ScenarioError::NonTermination {
                limit: self.limit,
                partial: Box::new(self.history()),
            });
        }
        for lane in &mut self.lanes {
            lane.step(&self.rule)?;
        }
        Ok(false)
    }

    /// Combined history of both directions.
    pub fn history(&self) -> History {
        self.lanes[0].history().merge(self.lanes[1].history())
    }

    /// Runs to completion and evaluates the measures over both fleets.
    pub fn run(&mut self) -> Result<PerformanceReport, ScenarioError> {
        while !self.advance()? {}
        Ok(PerformanceReport::from_history(&self.history()))
    }
}

/// Runs the configured strategy on the configured placement.
pub fn run_strategy(cfg: &ScenarioConfig) -> Result<PerformanceReport, ScenarioError> {
    build_scenario(cfg)?.run()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyComparison {
    /// Average delay when lane A is served first.
    pub d1: Ofn,
    /// Average delay when lane B is served first.
    pub d2: Ofn,
    /// `P(D1 < D2)`
    pub p_12: f64,
    /// `P(D2 < D1)`
    pub p_21: f64,
    pub unc: f64,
    pub seed: u64,
    pub config: ScenarioConfig,
    pub reports: [PerformanceReport; 2],
}

/// Evaluates both strategies on one shared placement.
pub fn compare_strategies(cfg: &ScenarioConfig) -> Result<StrategyComparison, ScenarioError> {
    let initial = build_scenario(cfg)?;
    compare_on(cfg, initial)
}

fn compare_on(
    cfg: &ScenarioConfig,
    initial: WorkZone,
) -> Result<StrategyComparison, ScenarioError> {
    let r1 = initial.clone().with_strategy(Strategy::AFirst).run()?;
    let r2 = initial.with_strategy(Strategy::BFirst).run()?;
    let result = Comparator::new(cfg.comparison_levels).compare(r1.delay, r2.delay);
    Ok(StrategyComparison {
        d1: r1.delay,
        d2: r2.delay,
        p_12: result.p_less,
        p_21: result.p_greater,
        unc: result.uncertainty(),
        seed: cfg.seed,
        config: cfg.clone(),
        reports: [r1, r2],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n_a: usize,
    pub n_b: usize,
    pub precision_unit: i64,
    pub seed: u64,
    pub outcome: Result<StrategyComparison, ScenarioError>,
}

/// Grid of `(n_a, n_b)` fleet pairs, precision units and seeds.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SweepGrid {
    pub fleets: Vec<(usize, usize)>,
    pub precision_units: Vec<i64>,
    pub seeds: Vec<u64>,
}

impl SweepGrid {
    pub fn cells(&self) -> Vec<(usize, usize, i64, u64)> {
        let mut out =
            Vec::with_capacity(self.fleets.len() * self.precision_units.len() * self.seeds.len());
        for &(n_a, n_b) in &self.fleets {
            for &l in &self.precision_units {
                for &seed in &self.seeds {
                    out.push((n_a, n_b, l, seed));
                }
            }
        }
        out
    }
}

/// Compares both strategies for every grid cell. Rows come back in grid order
/// (fleet, then precision unit, then seed) whatever the thread count; failed
/// cells keep their error in the row.
pub fn sweep(base: &ScenarioConfig, grid: &SweepGrid, jobs: Option<usize>) -> Vec<SweepRow> {
    let cells = grid.cells();
    let run_cell = |&(n_a, n_b, precision_unit, seed): &(usize, usize, i64, u64)| {
        let cfg = ScenarioConfig {
            n_a,
            n_b,
            precision_unit,
            seed,
            ..base.clone()
        };
        let outcome = compare_strategies(&cfg);
        if let Err(e) = &outcome {
            log::warn!("sweep cell n_a={n_a} n_b={n_b} L={precision_unit} seed={seed}: {e}");
        }
        SweepRow {
            n_a,
            n_b,
            precision_unit,
            seed,
            outcome,
        }
    };
    match jobs {
        Some(1) => cells.iter().map(run_cell).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(|| cells.par_iter().map(run_cell).collect()),
        None => cells.par_iter().map(run_cell).collect(),
    }
}
