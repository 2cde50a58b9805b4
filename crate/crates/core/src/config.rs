//! Plain-text configuration: `[section]` headers followed by `key = value`
//! lines. `#` and `;` start comment lines, sections may repeat, and fuzzy
//! numbers are written as `a1,a2,a3,a4`.
//!
//! ```text
//! [scenario]
//! n_a = 50
//! n_b = 45
//! v_max = 1,2,2,3
//! ```

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::imprecision::{InitialVelocity, SegmentObservation};
use crate::model::{AccelerationRule, SignalColor, Vehicle, VehicleId};
use crate::ofn::Ofn;
use crate::workzone::{ScenarioConfig, Strategy, SweepGrid};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn new(line: Option<usize>, field: Option<&str>, message: impl Into<String>) -> Self {
        ConfigError {
            line,
            field: field.map(str::to_string),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "field `{field}`: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.entry(key)
            .map(|e| {
                e.value.parse::<T>().map_err(|err| {
                    ConfigError::new(
                        Some(e.line),
                        Some(key),
                        format!("{err} (value {:?})", e.value),
                    )
                })
            })
            .transpose()
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.get(key)?.ok_or_else(|| {
            ConfigError::new(
                Some(self.line),
                Some(key),
                format!("missing in [{}]", self.name),
            )
        })
    }

    fn reject_unknown(&self, known: &[&str]) -> Result<(), ConfigError> {
        match self
            .entries
            .iter()
            .find(|e| !known.contains(&e.key.as_str()))
        {
            Some(e) => Err(ConfigError::new(
                Some(e.line),
                Some(&e.key),
                format!("unknown key in [{}]", self.name),
            )),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut sections: Vec<Section> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| {
                        ConfigError::new(Some(line), None, "unterminated section header")
                    })?
                    .trim();
                if name.is_empty() {
                    return Err(ConfigError::new(Some(line), None, "empty section name"));
                }
                sections.push(Section {
                    name: name.to_string(),
                    line,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| {
                ConfigError::new(
                    Some(line),
                    None,
                    format!("expected `key = value`, got {trimmed:?}"),
                )
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::new(Some(line), None, "empty key"));
            }
            let section = sections.last_mut().ok_or_else(|| {
                ConfigError::new(Some(line), Some(key), "entry before any section header")
            })?;
            if section.entry(key).is_some() {
                return Err(ConfigError::new(Some(line), Some(key), "duplicate key"));
            }
            section.entries.push(Entry {
                key: key.to_string(),
                value: value.trim().to_string(),
                line,
            });
        }
        Ok(Document { sections })
    }

    pub fn sections<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Section> + 'a {
        self.sections.iter().filter(move |s| s.name == name)
    }

    fn single<'a>(&'a self, name: &'a str) -> Result<Option<&'a Section>, ConfigError> {
        let mut found = self.sections(name);
        let first = found.next();
        if let Some(dup) = found.next() {
            return Err(ConfigError::new(
                Some(dup.line),
                None,
                format!("section [{name}] repeated"),
            ));
        }
        Ok(first)
    }

    fn reject_unknown_sections(&self, known: &[&str]) -> Result<(), ConfigError> {
        match self
            .sections
            .iter()
            .find(|s| !known.contains(&s.name.as_str()))
        {
            Some(s) => Err(ConfigError::new(
                Some(s.line),
                None,
                format!("unknown section [{}]", s.name),
            )),
            None => Ok(()),
        }
    }
}

fn parse_rule(doc: &Document) -> Result<AccelerationRule, ConfigError> {
    let Some(section) = doc.single("rule")? else {
        return Ok(AccelerationRule::default());
    };
    section.reject_unknown(&["high", "low"])?;
    let default = AccelerationRule::default();
    let high = section.get::<Ofn>("high")?.unwrap_or(default.high());
    let low = section.get::<Ofn>("low")?.unwrap_or(default.low());
    AccelerationRule::new(high, low)
        .map_err(|e| ConfigError::new(Some(section.line), None, e.to_string()))
}

fn render_rule(out: &mut String, rule: &AccelerationRule) {
    let _ = writeln!(
        out,
        "[rule]\nhigh = {}\nlow = {}",
        plain(rule.high()),
        plain(rule.low())
    );
}

fn plain(o: Ofn) -> String {
    let [a, b, c, d] = o.components();
    format!("{a},{b},{c},{d}")
}

impl FromStr for SignalColor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "red" => Ok(SignalColor::Red),
            "green" => Ok(SignalColor::Green),
            other => Err(format!("unknown signal colour {other:?} (red, green)")),
        }
    }
}

/// Single-lane simulation for `trace`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceConfig {
    pub cell_count: i64,
    pub signal_cell: Option<i64>,
    pub signal: SignalColor,
    pub rule: AccelerationRule,
    /// Fixed number of steps; without it the lane runs until clear.
    pub steps: Option<u64>,
    pub max_steps: Option<u64>,
    pub vehicles: Vec<Vehicle>,
}

impl TraceConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let doc = Document::parse(text)?;
        doc.reject_unknown_sections(&["lane", "rule", "simulation", "vehicle", "segment"])?;
        let lane = doc
            .single("lane")?
            .ok_or_else(|| ConfigError::new(None, None, "missing [lane] section"))?;
        lane.reject_unknown(&["cells", "signal_cell", "signal"])?;
        let cell_count: i64 = lane.require("cells")?;
        let signal_cell: Option<i64> = lane.get("signal_cell")?;
        let signal = lane
            .get::<SignalColor>("signal")?
            .unwrap_or(SignalColor::Green);
        if signal == SignalColor::Red && signal_cell.is_none() {
            return Err(ConfigError::new(
                Some(lane.line),
                Some("signal"),
                "red signal needs signal_cell",
            ));
        }
        let rule = parse_rule(&doc)?;
        let (steps, max_steps) = match doc.single("simulation")? {
            Some(s) => {
                s.reject_unknown(&["steps", "max_steps"])?;
                (s.get("steps")?, s.get("max_steps")?)
            }
            None => (None, None),
        };

        let mut vehicles = Vec::new();
        for (k, s) in doc.sections("vehicle").enumerate() {
            s.reject_unknown(&["id", "position", "velocity", "v_max", "acceleration"])?;
            let id = s.get::<u32>("id")?.unwrap_or(k as u32);
            let v_max: Ofn = s.require("v_max")?;
            let vehicle = Vehicle::new(
                VehicleId(id),
                s.require("position")?,
                s.get("velocity")?.unwrap_or(Ofn::ZERO),
                v_max,
            )
            .with_acceleration(s.get("acceleration")?.unwrap_or(Ofn::ZERO));
            vehicles.push(vehicle);
        }

        let mut observations = Vec::new();
        let mut initial = InitialVelocity::Fused;
        for s in doc.sections("segment") {
            s.reject_unknown(&["start", "end", "count", "v_max", "initial_velocity"])?;
            let count: usize = s.require("count")?;
            let v_max: Ofn = s.require("v_max")?;
            if let Some(iv) = s.get("initial_velocity")? {
                initial = iv;
            }
            observations.push(SegmentObservation::uniform(
                s.require("start")?,
                s.require("end")?,
                count,
                v_max,
            ));
        }
        if !observations.is_empty() {
            if !vehicles.is_empty() {
                return Err(ConfigError::new(
                    None,
                    None,
                    "use either [vehicle] or [segment] sections, not both",
                ));
            }
            vehicles = crate::imprecision::vehicles_from_observations(&observations, 0, initial)
                .map_err(|e| ConfigError::new(None, Some("segment"), e.to_string()))?;
        }

        Ok(TraceConfig {
            cell_count,
            signal_cell,
            signal,
            rule,
            steps,
            max_steps,
            vehicles,
        })
    }

    /// Equivalent text with every vehicle listed explicitly.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[lane]\ncells = {}", self.cell_count);
        if let Some(c) = self.signal_cell {
            let colour = match self.signal {
                SignalColor::Red => "red",
                SignalColor::Green => "green",
            };
            let _ = writeln!(out, "signal_cell = {c}\nsignal = {colour}");
        }
        out.push('\n');
        render_rule(&mut out, &self.rule);
        if self.steps.is_some() || self.max_steps.is_some() {
            out.push_str("\n[simulation]\n");
            if let Some(s) = self.steps {
                let _ = writeln!(out, "steps = {s}");
            }
            if let Some(m) = self.max_steps {
                let _ = writeln!(out, "max_steps = {m}");
            }
        }
        for v in &self.vehicles {
            let _ = writeln!(
                out,
                "\n[vehicle]\nid = {}\nposition = {}\nvelocity = {}\nv_max = {}\nacceleration = {}",
                v.id.0,
                plain(v.position),
                plain(v.velocity),
                plain(v.v_max),
                plain(v.acceleration)
            );
        }
        out
    }
}

/// Work-zone scenario plus an optional sweep grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub scenario: ScenarioConfig,
    pub grid: Option<SweepGrid>,
}

const SCENARIO_KEYS: &[&str] = &[
    "lane_a_cells",
    "lane_b_cells",
    "workzone_cells",
    "n_a",
    "n_b",
    "precision_unit",
    "v_max",
    "initial_velocity",
    "seed",
    "max_steps",
    "strategy",
];

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let doc = Document::parse(text)?;
        doc.reject_unknown_sections(&["scenario", "rule", "comparison", "grid"])?;
        let mut cfg = ScenarioConfig::default();
        if let Some(s) = doc.single("scenario")? {
            s.reject_unknown(SCENARIO_KEYS)?;
            macro_rules! set {
                ($($field:ident),*) => {$(
                    if let Some(v) = s.get(stringify!($field))? {
                        cfg.$field = v;
                    }
                )*};
            }
            set!(
                lane_a_cells,
                lane_b_cells,
                workzone_cells,
                n_a,
                n_b,
                precision_unit,
                v_max,
                initial_velocity,
                seed,
                strategy
            );
            cfg.max_steps = s.get("max_steps")?;
        }
        cfg.rule = parse_rule(&doc)?;
        if let Some(s) = doc.single("comparison")? {
            s.reject_unknown(&["levels"])?;
            if let Some(levels) = s.get::<usize>("levels")? {
                if levels < 2 {
                    let e = s.entry("levels").map(|e| e.line);
                    return Err(ConfigError::new(
                        e,
                        Some("levels"),
                        "at least two alpha levels required",
                    ));
                }
                cfg.comparison_levels = levels;
            }
        }
        let grid = doc.single("grid")?.map(parse_grid).transpose()?;
        Ok(ScenarioFile {
            scenario: cfg,
            grid,
        })
    }

    pub fn render(&self) -> String {
        let c = &self.scenario;
        let mut out = String::new();
        let iv = match c.initial_velocity {
            InitialVelocity::Fused => "fused",
            InitialVelocity::Stopped => "stopped",
            InitialVelocity::AtMax => "max",
        };
        let strategy = match c.strategy {
            Strategy::AFirst => "a-first",
            Strategy::BFirst => "b-first",
        };
        let _ = writeln!(
            out,
            "[scenario]\nlane_a_cells = {}\nlane_b_cells = {}\nworkzone_cells = {}\nn_a = {}\nn_b = {}\n\
             precision_unit = {}\nv_max = {}\ninitial_velocity = {iv}\nseed = {}\nstrategy = {strategy}",
            c.lane_a_cells,
            c.lane_b_cells,
            c.workzone_cells,
            c.n_a,
            c.n_b,
            c.precision_unit,
            plain(c.v_max),
            c.seed,
        );
        if let Some(m) = c.max_steps {
            let _ = writeln!(out, "max_steps = {m}");
        }
        out.push('\n');
        render_rule(&mut out, &c.rule);
        let _ = writeln!(out, "\n[comparison]\nlevels = {}", c.comparison_levels);
        if let Some(g) = &self.grid {
            out.push('\n');
            out.push_str(&render_grid(g));
        }
        out
    }
}

/// Parses a `[grid]` section:
///
/// ```text
/// [grid]
/// fleets = 50:45, 48:48
/// precision_units = 1,2,4,8
/// seeds = 0..30
/// ```
///
/// `seeds` takes a list or a half-open range `a..b`.
pub fn parse_grid(section: &Section) -> Result<SweepGrid, ConfigError> {
    section.reject_unknown(&["fleets", "precision_units", "seeds"])?;
    let at = |key: &str| section.entry(key).map(|e| e.line).or(Some(section.line));
    let err = |key: &str, msg: String| ConfigError::new(at(key), Some(key), msg);

    let fleets_text: String = section.require("fleets")?;
    let fleets = list(&fleets_text)
        .map(|item| {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| err("fleets", format!("expected n_a:n_b, got {item:?}")))?;
            let n = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| err("fleets", format!("{e} in {item:?}")))
            };
            Ok((n(a)?, n(b)?))
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;

    let units_text: String = section.require("precision_units")?;
    let precision_units = list(&units_text)
        .map(|s| {
            s.parse::<i64>()
                .map_err(|e| err("precision_units", format!("{e} in {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let seeds = match section.get::<String>("seeds")? {
        None => Vec::new(),
        Some(text) => match text.split_once("..") {
            Some((lo, hi)) => {
                let p = |s: &str| {
                    s.trim()
                        .parse::<u64>()
                        .map_err(|e| err("seeds", format!("{e} in {text:?}")))
                };
                (p(lo)?..p(hi)?).collect()
            }
            None => list(&text)
                .map(|s| {
                    s.parse::<u64>()
                        .map_err(|e| err("seeds", format!("{e} in {s:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?,
        },
    };
    if fleets.is_empty() || precision_units.is_empty() {
        return Err(ConfigError::new(
            Some(section.line),
            None,
            "grid needs fleets and precision_units",
        ));
    }
    Ok(SweepGrid {
        fleets,
        precision_units,
        seeds,
    })
}

fn list(text: &str) -> impl Iterator<Item = &str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty())
}

pub fn render_grid(grid: &SweepGrid) -> String {
    let join = |items: Vec<String>| items.join(", ");
    format!(
        "[grid]\nfleets = {}\nprecision_units = {}\nseeds = {}\n",
        join(
            grid.fleets
                .iter()
                .map(|(a, b)| format!("{a}:{b}"))
                .collect()
        ),
        join(
            grid.precision_units
                .iter()
                .map(ToString::to_string)
                .collect()
        ),
        join(grid.seeds.iter().map(ToString::to_string).collect()),
    )
}

/// Parses a document holding only a `[grid]` section.
pub fn parse_grid_file(text: &str) -> Result<SweepGrid, ConfigError> {
    let doc = Document::parse(text)?;
    doc.reject_unknown_sections(&["grid"])?;
    let section = doc
        .single("grid")?
        .ok_or_else(|| ConfigError::new(None, None, "missing [grid] section"))?;
    parse_grid(section)
}
