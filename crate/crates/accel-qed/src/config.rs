//! Run configuration: strict JSON schema, validation and canonical form.
//!
//! Parsing never stops at the first problem. Every issue is collected with the
//! JSON path of the offending field, so one pass reports all of them.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use accel_qed_core::constants::AccelerationUnit;
use accel_qed_core::lamb::{CutoffShape, ELECTRON_REST_FREQUENCY};
use accel_qed_core::quad::QuadConfig;
use serde_json::{json, Map, Value};

pub const BUILTIN_HYDROGEN: &str = "hydrogen-1s";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Unruh,
    Lamb,
    Wall,
    Pair,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Unruh => "unruh",
            Command::Lamb => "lamb",
            Command::Wall => "wall",
            Command::Pair => "pair",
            Command::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "unruh" => Command::Unruh,
            "lamb" => Command::Lamb,
            "wall" => Command::Wall,
            "pair" => Command::Pair,
            "sweep" => Command::Sweep,
            other => return Err(format!("unknown command `{other}` (expected unruh, lamb, wall, pair or sweep)")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// One validation problem, located by its JSON path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<Issue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration error(s)", self.0.len())?;
        for issue in &self.0 {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

impl ConfigErrors {
    /// True when some issue is reported at `path`.
    pub fn mentions(&self, path: &str) -> bool {
        self.0.iter().any(|i| i.path == path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

/// Parameter values: an explicit list or an evenly spaced range.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        points: usize,
        spacing: Spacing,
    },
}

impl Grid {
    pub fn single(x: f64) -> Self {
        Grid::List(vec![x])
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::List(ref v) => v.clone(),
            Grid::Range {
                start,
                stop,
                points,
                spacing,
            } => {
                if points == 1 {
                    return vec![start];
                }
                let n = (points - 1) as f64;
                (0..points)
                    .map(|i| {
                        if i == points - 1 {
                            return stop;
                        }
                        let f = i as f64 / n;
                        match spacing {
                            Spacing::Lin => start + (stop - start) * f,
                            Spacing::Log => {
                                let (l0, l1) = (start.log10(), stop.log10());
                                let k = i as f64;
                                let e = (l0 * (n - k) + l1 * k) / n;
                                // whole decades read back as the literal a user would type (10^23 is a rounding tie)
                                if e == e.round() {
                                    format!("1e{}", e as i32).parse().unwrap_or_else(|_| 10f64.powf(e))
                                } else {
                                    10f64.powf(e)
                                }
                            }
                        }
                    })
                    .collect()
            }
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Grid::List(v) => json!(v),
            Grid::Range {
                start,
                stop,
                points,
                spacing,
            } => json!({
                "start": start,
                "stop": stop,
                "points": points,
                "spacing": match spacing { Spacing::Lin => "lin", Spacing::Log => "log" },
            }),
        }
    }
}

/// Acceleration grid together with the unit it was written in.
#[derive(Debug, Clone, PartialEq)]
pub struct AccelGrid {
    pub unit: AccelerationUnit,
    pub grid: Grid,
}

impl AccelGrid {
    pub fn zero() -> Self {
        Self {
            unit: AccelerationUnit::CentimetrePerSecondSquared,
            grid: Grid::single(0.0),
        }
    }

    /// Values converted to cm/s².
    pub fn cm_per_s2(&self) -> Vec<f64> {
        let k = self.unit.in_cm_per_s2();
        self.grid.values().into_iter().map(|v| v * k).collect()
    }

    fn key(&self) -> &'static str {
        accel_key(self.unit)
    }
}

const ACCEL_KEYS: [(&str, AccelerationUnit); 3] = [
    ("a_cm_s2", AccelerationUnit::CentimetrePerSecondSquared),
    ("a_m_s2", AccelerationUnit::MetrePerSecondSquared),
    ("a_g0", AccelerationUnit::StandardGravity),
];

fn accel_key(unit: AccelerationUnit) -> &'static str {
    ACCEL_KEYS.iter().find(|(_, u)| *u == unit).map(|(k, _)| *k).unwrap_or("a_cm_s2")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomSource {
    Builtin(String),
    /// Path as written, resolved against the config file's directory.
    Dataset(String),
}

impl Default for AtomSource {
    fn default() -> Self {
        AtomSource::Builtin(BUILTIN_HYDROGEN.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutoffSpec {
    pub lambda: Grid,
    pub shape: CutoffShape,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self {
            lambda: Grid::single(ELECTRON_REST_FREQUENCY),
            shape: CutoffShape::Hard,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadOverrides {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_evaluations: Option<usize>,
    pub tail_truncation_threshold: Option<f64>,
}

impl QuadOverrides {
    pub fn apply(&self) -> QuadConfig {
        let d = QuadConfig::default();
        QuadConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_evaluations: self.max_evaluations.unwrap_or(d.max_evaluations),
            tail_truncation_threshold: self.tail_truncation_threshold.unwrap_or(d.tail_truncation_threshold),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub path: Option<String>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnruhInput {
    Acceleration(AccelGrid),
    Temperature(Grid),
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnruhConfig {
    pub input: UnruhInput,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambMode {
    Shifts(AccelGrid),
    /// Root search for the thermal/non-thermal crossing in [lo, hi] cm/s².
    Crossing { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambConfig {
    pub atom: AtomSource,
    pub mode: LambMode,
    pub cutoff: CutoffSpec,
    pub quad: QuadOverrides,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// sin²(ωz₀/c).
    Sin2,
    /// ω/(ω + s)·exp(−ω/s); s defaults to the lowest transition frequency.
    Damped { scale_rad_s: Option<f64> },
    /// CSV table, path relative to the config file.
    Tabulated { path: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WallRunConfig {
    pub atom: AtomSource,
    pub kernel: KernelSpec,
    pub z0: Grid,
    pub acceleration: AccelGrid,
    pub cutoff: CutoffSpec,
    pub quad: QuadOverrides,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolarizabilitySpec {
    Static { alpha0_cm3: f64 },
    Lorentz { alpha0_cm3: f64, omega0_rad_s: f64 },
    /// Single oscillator matched to the atom's static polarizability.
    LorentzMatched,
    /// Sum over the atom's transitions.
    Transitions,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Distance {
    Cm(Grid),
    /// In units of c/ω₀, ω₀ the lowest resonance of the pair.
    Reduced(Grid),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRunConfig {
    pub atom: AtomSource,
    pub alpha_a: PolarizabilitySpec,
    pub alpha_b: PolarizabilitySpec,
    pub distance: Distance,
    pub acceleration: AccelGrid,
    pub t: Grid,
    pub dlog_r: f64,
    pub quad: QuadOverrides,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Unruh(UnruhConfig),
    Lamb(LambConfig),
    Wall(WallRunConfig),
    Pair(PairRunConfig),
    Sweep(Vec<RunConfig>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub body: Body,
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn command(&self) -> Command {
        match self.body {
            Body::Unruh(_) => Command::Unruh,
            Body::Lamb(_) => Command::Lamb,
            Body::Wall(_) => Command::Wall,
            Body::Pair(_) => Command::Pair,
            Body::Sweep(_) => Command::Sweep,
        }
    }

    /// Parses a JSON document. `command` comes from the command line; the
    /// document may repeat it but must then agree.
    pub fn parse(text: &str, command: Option<Command>) -> Result<Self, ConfigErrors> {
        let value: Value = serde_json::from_str(text).map_err(|e| {
            ConfigErrors(vec![Issue {
                path: "$".into(),
                message: format!("not valid JSON: {e}"),
            }])
        })?;
        let mut errors = Vec::new();
        let parsed = parse_run(&value, "$", command, false, &mut errors);
        match parsed {
            Some(cfg) if errors.is_empty() => Ok(cfg),
            _ => Err(ConfigErrors(errors)),
        }
    }

    /// Canonical JSON form: every default spelled out, keys sorted.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command().name()));
        match &self.body {
            Body::Unruh(u) => match &u.input {
                UnruhInput::Acceleration(a) => {
                    m.insert(a.key().into(), a.grid.to_json());
                }
                UnruhInput::Temperature(t) => {
                    m.insert("temperature_K".into(), t.to_json());
                }
            },
            Body::Lamb(l) => {
                m.insert("atom".into(), atom_json(&l.atom));
                match &l.mode {
                    LambMode::Shifts(a) => {
                        m.insert(a.key().into(), a.grid.to_json());
                    }
                    LambMode::Crossing { lo, hi } => {
                        m.insert("crossing".into(), json!({ "bracket_cm_s2": [lo, hi] }));
                    }
                }
                m.insert("cutoff".into(), cutoff_json(&l.cutoff));
                m.insert("quad".into(), quad_json(&l.quad));
            }
            Body::Wall(w) => {
                m.insert("atom".into(), atom_json(&w.atom));
                m.insert("kernel".into(), kernel_json(&w.kernel));
                m.insert("z0_cm".into(), w.z0.to_json());
                m.insert(w.acceleration.key().into(), w.acceleration.grid.to_json());
                m.insert("cutoff".into(), cutoff_json(&w.cutoff));
                m.insert("quad".into(), quad_json(&w.quad));
            }
            Body::Pair(p) => {
                m.insert("atom".into(), atom_json(&p.atom));
                m.insert("alpha_a".into(), pol_json(&p.alpha_a));
                m.insert("alpha_b".into(), pol_json(&p.alpha_b));
                match &p.distance {
                    Distance::Cm(g) => m.insert("R_cm".into(), g.to_json()),
                    Distance::Reduced(g) => m.insert("R_reduced".into(), g.to_json()),
                };
                m.insert(p.acceleration.key().into(), p.acceleration.grid.to_json());
                m.insert("t_s".into(), p.t.to_json());
                m.insert("dlog_r".into(), json!(p.dlog_r));
                m.insert("quad".into(), quad_json(&p.quad));
            }
            Body::Sweep(runs) => {
                m.insert("runs".into(), Value::Array(runs.iter().map(RunConfig::to_json).collect()));
            }
        }
        let mut out = Map::new();
        if let Some(p) = &self.output.path {
            out.insert("path".into(), json!(p));
        }
        if let Some(f) = self.output.format {
            out.insert("format".into(), json!(f.name()));
        }
        if !out.is_empty() {
            m.insert("output".into(), Value::Object(out));
        }
        Value::Object(m)
    }

    /// Hex SHA-256 of the canonical JSON text, first 16 digits.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_json().to_string().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn atom_json(a: &AtomSource) -> Value {
    match a {
        AtomSource::Builtin(name) => json!({ "builtin": name }),
        AtomSource::Dataset(path) => json!({ "dataset": path }),
    }
}

fn cutoff_json(c: &CutoffSpec) -> Value {
    json!({
        "lambda_rad_s": c.lambda.to_json(),
        "shape": match c.shape { CutoffShape::Hard => "hard", CutoffShape::Exponential => "exponential" },
    })
}

fn quad_json(q: &QuadOverrides) -> Value {
    let c = q.apply();
    json!({
        "rel_tol": c.rel_tol,
        "abs_tol": c.abs_tol,
        "max_evaluations": c.max_evaluations,
        "tail_truncation_threshold": c.tail_truncation_threshold,
    })
}

fn kernel_json(k: &KernelSpec) -> Value {
    match k {
        KernelSpec::Sin2 => json!({ "type": "sin2" }),
        KernelSpec::Damped { scale_rad_s } => match scale_rad_s {
            Some(s) => json!({ "type": "damped", "scale_rad_s": s }),
            None => json!({ "type": "damped" }),
        },
        KernelSpec::Tabulated { path } => json!({ "type": "tabulated", "path": path }),
    }
}

fn pol_json(p: &PolarizabilitySpec) -> Value {
    match p {
        PolarizabilitySpec::Static { alpha0_cm3 } => json!({ "model": "static", "alpha0_cm3": alpha0_cm3 }),
        PolarizabilitySpec::Lorentz {
            alpha0_cm3,
            omega0_rad_s,
        } => json!({ "model": "lorentz", "alpha0_cm3": alpha0_cm3, "omega0_rad_s": omega0_rad_s }),
        PolarizabilitySpec::LorentzMatched => json!({ "model": "lorentz_matched" }),
        PolarizabilitySpec::Transitions => json!({ "model": "transitions" }),
    }
}

/// JSON object being consumed; keys never taken are reported as unknown.
struct Obj<'a> {
    path: String,
    map: &'a Map<String, Value>,
    used: BTreeSet<&'a str>,
}

fn issue(errors: &mut Vec<Issue>, path: &str, message: impl Into<String>) {
    errors.push(Issue {
        path: path.into(),
        message: message.into(),
    });
}

fn child(path: &str, key: &str) -> String {
    format!("{path}.{key}")
}

impl<'a> Obj<'a> {
    fn new(value: &'a Value, path: &str, errors: &mut Vec<Issue>) -> Option<Self> {
        match value {
            Value::Object(map) => Some(Self {
                path: path.into(),
                map,
                used: BTreeSet::new(),
            }),
            _ => {
                issue(errors, path, "expected an object");
                None
            }
        }
    }

    fn get(&mut self, key: &str) -> Option<&'a Value> {
        let (k, v) = self.map.get_key_value(key)?;
        self.used.insert(k.as_str());
        Some(v)
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn at(&self, key: &str) -> String {
        child(&self.path, key)
    }

    fn finish(self, errors: &mut Vec<Issue>) {
        for key in self.map.keys() {
            if !self.used.contains(key.as_str()) {
                issue(errors, &child(&self.path, key), "unknown key");
            }
        }
    }

    fn number(&mut self, key: &str, errors: &mut Vec<Issue>) -> Option<f64> {
        let path = self.at(key);
        self.get(key).and_then(|v| as_number(v, &path, errors))
    }

    fn string(&mut self, key: &str, errors: &mut Vec<Issue>) -> Option<&'a str> {
        let path = self.at(key);
        match self.get(key)? {
            Value::String(s) => Some(s),
            _ => {
                issue(errors, &path, "expected a string");
                None
            }
        }
    }

    fn present(&self, key: &str, errors: &mut Vec<Issue>) -> bool {
        let has = self.has(key);
        if !has {
            issue(errors, &self.at(key), "missing");
        }
        has
    }

    fn required_string(&mut self, key: &str, errors: &mut Vec<Issue>) -> Option<&'a str> {
        if self.present(key, errors) {
            self.string(key, errors)
        } else {
            None
        }
    }

    fn required_number(&mut self, key: &str, errors: &mut Vec<Issue>) -> Option<f64> {
        if self.present(key, errors) {
            self.number(key, errors)
        } else {
            None
        }
    }

    fn grid(&mut self, key: &str, rule: Rule, errors: &mut Vec<Issue>) -> Option<Grid> {
        let path = self.at(key);
        self.get(key).and_then(|v| parse_grid(v, &path, rule, errors))
    }
}

fn as_number(v: &Value, path: &str, errors: &mut Vec<Issue>) -> Option<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Some(x),
        _ => {
            issue(errors, path, "expected a finite number");
            None
        }
    }
}

/// Admissible range of grid values.
#[derive(Clone, Copy)]
enum Rule {
    Positive,
    NonNegative,
}

impl Rule {
    fn check(self, x: f64) -> bool {
        match self {
            Rule::Positive => x > 0.0,
            Rule::NonNegative => x >= 0.0,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Rule::Positive => "must be positive",
            Rule::NonNegative => "must be non-negative",
        }
    }
}

fn parse_grid(v: &Value, path: &str, rule: Rule, errors: &mut Vec<Issue>) -> Option<Grid> {
    let before = errors.len();
    let grid = match v {
        Value::Number(_) => Grid::List(vec![as_number(v, path, errors)?]),
        Value::Array(items) => {
            if items.is_empty() {
                issue(errors, path, "grid must not be empty");
                return None;
            }
            let values: Vec<Option<f64>> = items
                .iter()
                .enumerate()
                .map(|(i, x)| as_number(x, &format!("{path}[{i}]"), errors))
                .collect();
            Grid::List(values.into_iter().collect::<Option<Vec<_>>>()?)
        }
        Value::Object(_) => {
            let mut o = Obj::new(v, path, errors)?;
            let start = o.number("start", errors);
            let stop = o.number("stop", errors);
            let points = match o.get("points") {
                Some(p) => match p.as_u64() {
                    Some(n) if n >= 1 => Some(n as usize),
                    _ => {
                        issue(errors, &o.at("points"), "expected an integer >= 1");
                        None
                    }
                },
                None => {
                    issue(errors, &o.at("points"), "missing");
                    None
                }
            };
            let spacing = match o.string("spacing", errors) {
                None if !o.has("spacing") => Some(Spacing::Lin),
                None => None,
                Some("lin") => Some(Spacing::Lin),
                Some("log") => Some(Spacing::Log),
                Some(other) => {
                    issue(errors, &o.at("spacing"), format!("unknown spacing `{other}` (expected lin or log)"));
                    None
                }
            };
            if !o.has("start") {
                issue(errors, &o.at("start"), "missing");
            }
            if !o.has("stop") {
                issue(errors, &o.at("stop"), "missing");
            }
            o.finish(errors);
            let (start, stop, points, spacing) = (start?, stop?, points?, spacing?);
            if spacing == Spacing::Log && !(start > 0.0 && stop > 0.0) {
                issue(errors, path, "log spacing needs positive start and stop");
                return None;
            }
            Grid::Range {
                start,
                stop,
                points,
                spacing,
            }
        }
        _ => {
            issue(errors, path, "expected a number, a list of numbers or {start, stop, points, spacing}");
            return None;
        }
    };
    for x in grid.values() {
        if !x.is_finite() || !rule.check(x) {
            issue(errors, path, format!("value {x:e} {}", rule.describe()));
            break;
        }
    }
    (errors.len() == before).then_some(grid)
}


/// Exactly one of the acceleration keys, or `default` when none is given.
fn accel(o: &mut Obj, default: Option<AccelGrid>, errors: &mut Vec<Issue>) -> Option<AccelGrid> {
    let present: Vec<(&str, AccelerationUnit)> = ACCEL_KEYS.iter().copied().filter(|(k, _)| o.has(k)).collect();
    match present.as_slice() {
        [] => {
            if default.is_none() {
                issue(errors, &o.at("a_cm_s2"), "missing (give one of a_cm_s2, a_m_s2, a_g0)");
            }
            default
        }
        [(key, unit)] => {
            let grid = o.grid(key, Rule::NonNegative, errors)?;
            Some(AccelGrid { unit: *unit, grid })
        }
        _ => {
            for (key, _) in &present {
                o.get(key);
                issue(errors, &o.at(key), "give the acceleration in exactly one unit");
            }
            None
        }
    }
}

fn atom(o: &mut Obj, errors: &mut Vec<Issue>) -> Option<AtomSource> {
    let path = o.at("atom");
    let Some(v) = o.get("atom") else {
        return Some(AtomSource::default());
    };
    let mut a = Obj::new(v, &path, errors)?;
    let source = match (a.has("builtin"), a.has("dataset")) {
        (true, false) => a.string("builtin", errors).and_then(|name| {
            if name == BUILTIN_HYDROGEN {
                Some(AtomSource::Builtin(name.into()))
            } else {
                issue(errors, &a.at("builtin"), format!("unknown builtin atom `{name}` (available: {BUILTIN_HYDROGEN})"));
                None
            }
        }),
        (false, true) => a.string("dataset", errors).map(|p| AtomSource::Dataset(p.into())),
        _ => {
            issue(errors, &path, "give exactly one of builtin or dataset");
            None
        }
    };
    a.finish(errors);
    source
}

fn cutoff(o: &mut Obj, errors: &mut Vec<Issue>) -> Option<CutoffSpec> {
    let path = o.at("cutoff");
    let Some(v) = o.get("cutoff") else {
        return Some(CutoffSpec::default());
    };
    let mut c = Obj::new(v, &path, errors)?;
    let mut spec = CutoffSpec::default();
    let mut ok = true;
    if c.has("lambda_rad_s") {
        match c.grid("lambda_rad_s", Rule::Positive, errors) {
            Some(g) => spec.lambda = g,
            None => ok = false,
        }
    }
    match c.string("shape", errors) {
        None if !c.has("shape") => {}
        Some("hard") => spec.shape = CutoffShape::Hard,
        Some("exponential") => spec.shape = CutoffShape::Exponential,
        Some(other) => {
            issue(errors, &c.at("shape"), format!("unknown cutoff shape `{other}` (expected hard or exponential)"));
            ok = false;
        }
        None => ok = false,
    }
    c.finish(errors);
    ok.then_some(spec)
}

fn quad(o: &mut Obj, errors: &mut Vec<Issue>) -> Option<QuadOverrides> {
    let path = o.at("quad");
    let Some(v) = o.get("quad") else {
        return Some(QuadOverrides::default());
    };
    let mut q = Obj::new(v, &path, errors)?;
    let before = errors.len();
    let mut out = QuadOverrides {
        rel_tol: q.number("rel_tol", errors),
        abs_tol: q.number("abs_tol", errors),
        max_evaluations: None,
        tail_truncation_threshold: q.number("tail_truncation_threshold", errors),
    };
    if let Some(v) = q.get("max_evaluations") {
        match v.as_u64() {
            Some(n) => out.max_evaluations = Some(n as usize),
            None => issue(errors, &q.at("max_evaluations"), "expected a non-negative integer"),
        }
    }
    q.finish(errors);
    if errors.len() == before {
        if let Err(e) = out.apply().validate() {
            issue(errors, &path, e.to_string());
        }
    }
    (errors.len() == before).then_some(out)
}

fn output(o: &mut Obj, errors: &mut Vec<Issue>) -> Option<OutputSpec> {
    let path = o.at("output");
    let Some(v) = o.get("output") else {
        return Some(OutputSpec::default());
    };
    let mut out = Obj::new(v, &path, errors)?;
    let before = errors.len();
    let file = out.string("path", errors).map(String::from);
    let format = out.string("format", errors).and_then(|f| match f.parse() {
        Ok(f) => Some(f),
        Err(msg) => {
            issue(errors, &out.at("format"), msg);
            None
        }
    });
    out.finish(errors);
    (errors.len() == before).then_some(OutputSpec { path: file, format })
}

fn positive(o: &mut Obj, key: &str, errors: &mut Vec<Issue>) -> Option<f64> {
    let x = o.number(key, errors)?;
    if x > 0.0 {
        Some(x)
    } else {
        issue(errors, &o.at(key), "must be positive");
        None
    }
}

fn polarizability(o: &mut Obj, key: &str, errors: &mut Vec<Issue>) -> Option<PolarizabilitySpec> {
    let path = o.at(key);
    let Some(v) = o.get(key) else {
        return Some(PolarizabilitySpec::LorentzMatched);
    };
    let mut p = Obj::new(v, &path, errors)?;
    let spec = match p.required_string("model", errors)? {
        "static" => {
            let a = p.required_number("alpha0_cm3", errors);
            match a {
                Some(a) if a < 0.0 => {
                    issue(errors, &p.at("alpha0_cm3"), "must be non-negative");
                    None
                }
                Some(a) => Some(PolarizabilitySpec::Static { alpha0_cm3: a }),
                None => None,
            }
        }
        "lorentz" => {
            let a = p.required_number("alpha0_cm3", errors);
            let w = if p.has("omega0_rad_s") {
                positive(&mut p, "omega0_rad_s", errors)
            } else {
                issue(errors, &p.at("omega0_rad_s"), "missing");
                None
            };
            if matches!(a, Some(a) if a < 0.0) {
                issue(errors, &p.at("alpha0_cm3"), "must be non-negative");
                None
            } else {
                Some(PolarizabilitySpec::Lorentz {
                    alpha0_cm3: a?,
                    omega0_rad_s: w?,
                })
            }
        }
        "lorentz_matched" => Some(PolarizabilitySpec::LorentzMatched),
        "transitions" => Some(PolarizabilitySpec::Transitions),
        other => {
            issue(
                errors,
                &p.at("model"),
                format!("unknown polarizability model `{other}` (expected static, lorentz, lorentz_matched or transitions)"),
            );
            None
        }
    };
    p.finish(errors);
    spec
}

fn kernel(o: &mut Obj, errors: &mut Vec<Issue>) -> Option<KernelSpec> {
    let path = o.at("kernel");
    let Some(v) = o.get("kernel") else {
        issue(errors, &path, "missing");
        return None;
    };
    let mut k = Obj::new(v, &path, errors)?;
    let spec = match k.required_string("type", errors)? {
        "sin2" => Some(KernelSpec::Sin2),
        "damped" => {
            if k.has("scale_rad_s") {
                positive(&mut k, "scale_rad_s", errors).map(|s| KernelSpec::Damped { scale_rad_s: Some(s) })
            } else {
                Some(KernelSpec::Damped { scale_rad_s: None })
            }
        }
        "tabulated" => k.required_string("path", errors).map(|p| KernelSpec::Tabulated { path: p.into() }),
        other => {
            issue(errors, &k.at("type"), format!("unknown kernel type `{other}` (expected sin2, damped or tabulated)"));
            None
        }
    };
    k.finish(errors);
    spec
}

fn parse_run(
    value: &Value,
    path: &str,
    command: Option<Command>,
    nested: bool,
    errors: &mut Vec<Issue>,
) -> Option<RunConfig> {
    let mut o = Obj::new(value, path, errors)?;
    let written = match o.string("command", errors) {
        Some(s) => match s.parse::<Command>() {
            Ok(c) => Some(c),
            Err(msg) => {
                issue(errors, &o.at("command"), msg);
                return None;
            }
        },
        None => None,
    };
    let command = match (command, written) {
        (Some(a), Some(b)) if a != b => {
            issue(errors, &o.at("command"), format!("config is for `{b}` but `{a}` was requested"));
            return None;
        }
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => {
            issue(errors, &o.at("command"), "missing");
            return None;
        }
    };
    if nested && command == Command::Sweep {
        issue(errors, &o.at("command"), "sweeps cannot be nested");
        return None;
    }
    let before = errors.len();
    let body = match command {
        Command::Unruh => {
            let temperature = o.has("temperature_K");
            let has_accel = ACCEL_KEYS.iter().any(|(k, _)| o.has(k));
            match (temperature, has_accel) {
                (true, false) => o
                    .grid("temperature_K", Rule::NonNegative, errors)
                    .map(|g| Body::Unruh(UnruhConfig { input: UnruhInput::Temperature(g) })),
                (false, _) => accel(&mut o, None, errors)
                    .map(|a| Body::Unruh(UnruhConfig { input: UnruhInput::Acceleration(a) })),
                (true, true) => {
                    o.get("temperature_K");
                    accel(&mut o, None, errors);
                    issue(errors, path, "give either an acceleration grid or temperature_K, not both");
                    None
                }
            }
        }
        Command::Lamb => {
            let atom = atom(&mut o, errors);
            let mode = if o.has("crossing") {
                let cpath = o.at("crossing");
                let v = o.get("crossing").unwrap_or(&Value::Null);
                let mode = Obj::new(v, &cpath, errors).and_then(|mut c| {
                    let bpath = c.at("bracket_cm_s2");
                    let b = c.get("bracket_cm_s2");
                    c.finish(errors);
                    let pair = match b.and_then(Value::as_array).map(Vec::as_slice) {
                        Some([lo, hi]) => match (lo.as_f64(), hi.as_f64()) {
                            (Some(lo), Some(hi)) if lo > 0.0 && hi > lo && hi.is_finite() => Some((lo, hi)),
                            _ => None,
                        },
                        _ => None,
                    };
                    if pair.is_none() {
                        issue(errors, &bpath, "expected [lo, hi] with 0 < lo < hi");
                    }
                    pair.map(|(lo, hi)| LambMode::Crossing { lo, hi })
                });
                let given: Vec<&str> = ACCEL_KEYS.iter().map(|(k, _)| *k).filter(|k| o.has(k)).collect();
                for k in given {
                    o.get(k);
                    issue(errors, &o.at(k), "acceleration grid and crossing search are exclusive");
                }
                mode
            } else {
                accel(&mut o, None, errors).map(LambMode::Shifts)
            };
            let cutoff = cutoff(&mut o, errors);
            let quad = quad(&mut o, errors);
            match (atom, mode, cutoff, quad) {
                (Some(atom), Some(mode), Some(cutoff), Some(quad)) => Some(Body::Lamb(LambConfig {
                    atom,
                    mode,
                    cutoff,
                    quad,
                })),
                _ => None,
            }
        }
        Command::Wall => {
            let atom = atom(&mut o, errors);
            let kernel = kernel(&mut o, errors);
            let z0 = if o.present("z0_cm", errors) {
                o.grid("z0_cm", Rule::Positive, errors)
            } else {
                None
            };
            let acceleration = accel(&mut o, Some(AccelGrid::zero()), errors);
            let cutoff = cutoff(&mut o, errors);
            let quad = quad(&mut o, errors);
            match (atom, kernel, z0, acceleration, cutoff, quad) {
                (Some(atom), Some(kernel), Some(z0), Some(acceleration), Some(cutoff), Some(quad)) => {
                    Some(Body::Wall(WallRunConfig {
                        atom,
                        kernel,
                        z0,
                        acceleration,
                        cutoff,
                        quad,
                    }))
                }
                _ => None,
            }
        }
        Command::Pair => {
            let atom = atom(&mut o, errors);
            let alpha_a = polarizability(&mut o, "alpha_a", errors);
            let alpha_b = polarizability(&mut o, "alpha_b", errors);
            let distance = match (o.has("R_cm"), o.has("R_reduced")) {
                (true, false) => o.grid("R_cm", Rule::Positive, errors).map(Distance::Cm),
                (false, true) => o.grid("R_reduced", Rule::Positive, errors).map(Distance::Reduced),
                (true, true) => {
                    o.get("R_cm");
                    o.get("R_reduced");
                    issue(errors, path, "give either R_cm or R_reduced, not both");
                    None
                }
                (false, false) => {
                    issue(errors, &o.at("R_cm"), "missing (give R_cm or R_reduced)");
                    None
                }
            };
            let acceleration = accel(&mut o, Some(AccelGrid::zero()), errors);
            let t = if o.has("t_s") {
                o.grid("t_s", Rule::NonNegative, errors)
            } else {
                Some(Grid::single(0.0))
            };
            let dlog_r = if o.has("dlog_r") {
                o.number("dlog_r", errors).and_then(|d| {
                    if d > 0.0 && d < 0.5 {
                        Some(d)
                    } else {
                        issue(errors, &o.at("dlog_r"), "must lie in (0, 0.5)");
                        None
                    }
                })
            } else {
                Some(accel_qed_core::pair::DEFAULT_DLOG_R)
            };
            let quad = quad(&mut o, errors);
            match (atom, alpha_a, alpha_b, distance, acceleration, t, dlog_r, quad) {
                (Some(atom), Some(alpha_a), Some(alpha_b), Some(distance), Some(acceleration), Some(t), Some(dlog_r), Some(quad)) => {
                    Some(Body::Pair(PairRunConfig {
                        atom,
                        alpha_a,
                        alpha_b,
                        distance,
                        acceleration,
                        t,
                        dlog_r,
                        quad,
                    }))
                }
                _ => None,
            }
        }
        Command::Sweep => {
            let rpath = o.at("runs");
            match o.get("runs") {
                Some(Value::Array(items)) if !items.is_empty() => {
                    let runs: Vec<Option<RunConfig>> = items
                        .iter()
                        .enumerate()
                        .map(|(i, v)| parse_run(v, &format!("{rpath}[{i}]"), None, true, errors))
                        .collect();
                    runs.into_iter().collect::<Option<Vec<_>>>().map(Body::Sweep)
                }
                Some(_) => {
                    issue(errors, &rpath, "expected a non-empty list of run configs");
                    None
                }
                None => {
                    issue(errors, &rpath, "missing");
                    None
                }
            }
        }
    };
    let output = output(&mut o, errors);
    o.finish(errors);
    if errors.len() != before {
        return None;
    }
    Some(RunConfig { body: body?, output: output? })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigErrors> {
        RunConfig::parse(text, None)
    }

    #[test]
    fn minimal_pair_fills_defaults() {
        let cfg = parse(r#"{"command": "pair", "R_cm": 1e-6}"#).unwrap();
        let Body::Pair(p) = &cfg.body else { panic!() };
        assert_eq!(p.atom, AtomSource::default());
        assert_eq!(p.alpha_a, PolarizabilitySpec::LorentzMatched);
        assert_eq!(p.acceleration.cm_per_s2(), vec![0.0]);
        assert_eq!(p.t.values(), vec![0.0]);
        assert_eq!(p.quad.apply(), QuadConfig::default());
    }

    #[test]
    fn negative_distance_names_field() {
        let err = parse(r#"{"command": "pair", "R_cm": [1e-6, -1e-6]}"#).unwrap_err();
        assert!(err.mentions("$.R_cm"), "{err}");
    }

    #[test]
    fn all_errors_reported() {
        let err = parse(
            r#"{"command": "pair", "R_cm": -1, "t_s": "soon", "colour": "blue",
                "quad": {"rel_tol": 2.0}, "alpha_a": {"model": "magic"}}"#,
        )
        .unwrap_err();
        for path in ["$.R_cm", "$.t_s", "$.colour", "$.quad", "$.alpha_a.model"] {
            assert!(err.mentions(path), "{path} missing from {err}");
        }
    }

    #[test]
    fn unknown_keys_rejected_at_every_level() {
        let err = parse(r#"{"command": "wall", "z0_cm": 1e-6, "kernel": {"type": "sin2", "z": 1}, "cutoff": {"lambda": 1}}"#)
            .unwrap_err();
        assert!(err.mentions("$.kernel.z"));
        assert!(err.mentions("$.cutoff.lambda"));
    }

    #[test]
    fn unit_suffix_required() {
        let err = parse(r#"{"command": "lamb", "a": 1e24}"#).unwrap_err();
        assert!(err.mentions("$.a"));
        assert!(err.mentions("$.a_cm_s2"));
        let err = parse(r#"{"command": "lamb", "a_cm_s2": 1, "a_m_s2": 1}"#).unwrap_err();
        assert!(err.mentions("$.a_cm_s2") && err.mentions("$.a_m_s2"));
    }

    #[test]
    fn command_must_agree() {
        assert!(RunConfig::parse(r#"{"command": "pair", "R_cm": 1}"#, Some(Command::Lamb)).is_err());
        assert!(RunConfig::parse(r#"{"R_cm": 1}"#, Some(Command::Pair)).is_ok());
        assert!(parse(r#"{"R_cm": 1}"#).is_err());
    }

    #[test]
    fn grids() {
        let g = Grid::Range {
            start: 1e20,
            stop: 1e24,
            points: 3,
            spacing: Spacing::Log,
        };
        let v = g.values();
        assert_eq!(v[0], 1e20);
        assert!((v[1] / 1e22 - 1.0).abs() < 1e-14);
        assert_eq!(v[2], 1e24);
        let lin = Grid::Range {
            start: 0.0,
            stop: 1.0,
            points: 5,
            spacing: Spacing::Lin,
        };
        assert_eq!(lin.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let err = parse(r#"{"command": "unruh", "a_cm_s2": {"start": 0, "stop": 1, "points": 3, "spacing": "log"}}"#)
            .unwrap_err();
        assert!(err.mentions("$.a_cm_s2"));
        assert!(parse(r#"{"command": "unruh", "a_cm_s2": []}"#).is_err());
        assert!(parse(r#"{"command": "unruh", "a_cm_s2": {"start": 1, "stop": 2}}"#)
            .unwrap_err()
            .mentions("$.a_cm_s2.points"));
    }

    #[test]
    fn log_range_lands_on_decades() {
        let g = Grid::Range {
            start: 1e22,
            stop: 1e27,
            points: 11,
            spacing: Spacing::Log,
        };
        let v = g.values();
        for (i, d) in [1e22, 1e23, 1e24, 1e25, 1e26, 1e27].into_iter().enumerate() {
            assert_eq!(v[2 * i], d);
        }
        assert!((v[1] / 1e22 - 10f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let texts = [
            r#"{"command": "pair", "R_reduced": {"start": 1e-3, "stop": 1e3, "points": 7, "spacing": "log"},
                "a_g0": [0, 1e10], "t_s": 1e-3, "alpha_a": {"model": "static", "alpha0_cm3": 6.7e-25},
                "output": {"path": "x.csv", "format": "json"}}"#,
            r#"{"command": "lamb", "a_m_s2": [1e20], "cutoff": {"lambda_rad_s": [1e20, 2e20], "shape": "exponential"},
                "atom": {"dataset": "h.json"}}"#,
            r#"{"command": "lamb", "crossing": {"bracket_cm_s2": [1e23, 1e27]}}"#,
            r#"{"command": "wall", "kernel": {"type": "tabulated", "path": "k.csv"}, "z0_cm": [1e-6], "quad": {"max_evaluations": 5000}}"#,
            r#"{"command": "unruh", "temperature_K": [1]}"#,
            r#"{"command": "sweep", "runs": [{"command": "unruh", "a_cm_s2": 1e22}, {"command": "pair", "R_cm": 1e-6}]}"#,
        ];
        for text in texts {
            let a = parse(text).unwrap();
            let b = parse(&a.to_json().to_string()).unwrap();
            assert_eq!(a.to_json(), b.to_json());
            assert_eq!(a.hash(), b.hash());
        }
    }

    #[test]
    fn hash_tracks_physics_not_spelling() {
        let a = parse(r#"{"command": "pair", "R_cm": 1e-6}"#).unwrap();
        let b = parse(r#"{"command":"pair","t_s":[0],"R_cm":[0.000001]}"#).unwrap();
        let c = parse(r#"{"command": "pair", "R_cm": 2e-6}"#).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn nested_sweep_rejected() {
        let err = parse(r#"{"command": "sweep", "runs": [{"command": "sweep", "runs": []}]}"#).unwrap_err();
        assert!(err.mentions("$.runs[0].command"));
    }

    #[test]
    fn not_json() {
        assert!(parse("{").unwrap_err().mentions("$"));
    }
}
