//! Scenario text format and CSV export.
//!
//! A scenario is a line-oriented file of `[section]` headers followed by
//! `key = value` pairs. Values are numbers, bare words, 3-vectors `(x, y, z)`
//! or 3×3 matrices written as three row vectors `((..), (..), (..))`. The
//! `[starts]` section lists one 3-vector per line. `#` starts a comment.
//!
//! ```text
//! [workspace]
//! center = (0, 0, 0)
//! axes = (1, 1, 1)
//! power = 1
//!
//! [obstacle]
//! center = (0.6, 0, 0)
//! axes = (0.2, 0.2, 0.2)
//! power = 4
//! margin = 0.02
//!
//! [ds]
//! kind = linear
//! matrix = ((1, -2, 0), (2, 1, 0), (0, 0, 1))
//! target = (-0.5, 0, 0)
//!
//! [starts]
//! (0.8, 0.1, 0)
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::flow::{FlowParams, ModeState, ModulatedDs, OriginalDs};
use crate::geometry::{self, Superquadric};
use crate::integrator::{FieldSample, IntegratorConfig, Trajectory, TrajectorySample};
use crate::linalg::{Mat3, Vec3};
use crate::modulation::ModulationParams;

pub const TRAJECTORY_HEADER: &str = "t,x,y,z,vx,vy,vz,mode,gamma_o,gamma_w";
pub const FIELD_HEADER: &str = "x,y,z,vx,vy,vz,mode";
pub const INVALID_TOKEN: &str = "invalid";

const SECTIONS: &[&str] = &["workspace", "obstacle", "ds", "modulation", "flow", "integrator", "starts"];

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub workspace: Superquadric,
    pub obstacle: Option<Superquadric>,
    pub ds: OriginalDs,
    pub flow: FlowParams,
    pub modulation: ModulationParams,
    pub integrator: IntegratorConfig,
    pub starts: Vec<Vec3>,
}

impl Scenario {
    pub fn field(&self) -> ModulatedDs {
        ModulatedDs {
            workspace: self.workspace,
            obstacle: self.obstacle,
            ds: self.ds,
            flow: self.flow,
            modulation: self.modulation,
        }
    }

    /// Full validation, including the start-point preconditions.
    pub fn validate(&self) -> Result<()> {
        if self.workspace.margin != 0.0 {
            return Err(Error::validation("workspace.margin", "the workspace takes no margin"));
        }
        self.ds.validate()?;
        self.flow.validate()?;
        self.modulation.validate()?;
        self.integrator.validate()?;
        if self.starts.is_empty() {
            return Err(Error::validation("starts", "at least one start is required"));
        }
        let field = self.field();
        for (i, s) in self.starts.iter().enumerate() {
            let (gw, go) = field.gammas(*s).map_err(|e| Error::validation(format!("starts[{i}]"), e.to_string()))?;
            if self.flow.method.constrains_workspace() && gw > 1.0 {
                return Err(Error::validation(format!("starts[{i}]"), "outside workspace"));
            }
            if self.flow.method.constrains_obstacle() && go.is_some_and(|g| g < 1.0) {
                return Err(Error::validation(format!("starts[{i}]"), "inside obstacle"));
            }
        }
        Ok(())
    }

    /// Conditions that make the target unreachable but are not fatal.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let target = self.ds.target();
        if let Ok(gw) = geometry::gamma(&self.workspace, target) {
            if gw > 1.0 {
                out.push(format!("target {target} lies outside the workspace (gamma_w = {gw})"));
            }
        }
        if let Some(ob) = &self.obstacle {
            if let Ok(go) = geometry::gamma(ob, target) {
                if go < 1.0 {
                    out.push(format!("target {target} lies inside the obstacle (gamma_o = {go})"));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Value {
    Number(f64),
    Word(String),
    Vector(Vec3),
    Matrix(Mat3),
}

impl Value {
    fn describe(&self) -> &'static str {
        match self {
            Value::Number(_) => "a number",
            Value::Word(_) => "a word",
            Value::Vector(_) => "a 3-vector",
            Value::Matrix(_) => "a 3x3 matrix",
        }
    }
}

fn parse_value(s: &str) -> std::result::Result<Value, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("missing value".into());
    }
    if s.starts_with('(') {
        let inner = strip_parens(s)?;
        if inner.trim_start().starts_with('(') {
            let rows = split_top_level(inner)?;
            if rows.len() != 3 {
                return Err(format!("matrix needs 3 rows, got {}", rows.len()));
            }
            let mut m = [[0.0; 3]; 3];
            for (row, text) in m.iter_mut().zip(rows) {
                *row = parse_vector(text)?.to_array();
            }
            return Ok(Value::Matrix(Mat3::from_rows(m)));
        }
        return parse_vector(s).map(Value::Vector);
    }
    if let Ok(x) = s.parse::<f64>() {
        return Ok(Value::Number(x));
    }
    if s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Ok(Value::Word(s.to_string()));
    }
    Err(format!("cannot parse value `{s}`"))
}

fn strip_parens(s: &str) -> std::result::Result<&str, String> {
    let s = s.trim();
    s.strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| format!("unbalanced parentheses in `{s}`"))
}

fn split_top_level(s: &str) -> std::result::Result<Vec<&str>, String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err("unbalanced parentheses".into());
        }
    }
    if depth != 0 {
        return Err("unbalanced parentheses".into());
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn parse_vector(s: &str) -> std::result::Result<Vec3, String> {
    let inner = strip_parens(s)?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected 3 components in `{s}`"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number `{}` in vector", p.trim()))?;
    }
    Ok(Vec3::from_array(out))
}

/// Parsed but not yet interpreted scenario text.
#[derive(Default)]
struct RawScenario {
    sections: BTreeMap<String, BTreeMap<String, (Value, usize)>>,
    starts: Vec<(Vec3, usize)>,
}

impl RawScenario {
    fn parse(text: &str) -> Result<Self> {
        let mut raw = RawScenario::default();
        let mut current: Option<String> = None;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return Err(perr(format!("unknown section `[{name}]`")));
                }
                if raw.sections.contains_key(name) {
                    return Err(perr(format!("duplicate section `[{name}]`")));
                }
                raw.sections.insert(name.to_string(), BTreeMap::new());
                current = Some(name.to_string());
                continue;
            }
            let Some(section) = current.as_deref() else {
                return Err(perr("content before the first section".into()));
            };
            if section == "starts" {
                let v = parse_vector(line).map_err(perr)?;
                raw.starts.push((v, lineno));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| perr(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if !known_key(section, key) {
                return Err(perr(format!("unknown key `{key}` in [{section}]")));
            }
            let value = parse_value(value).map_err(perr)?;
            let entries = raw.sections.get_mut(section).expect("section registered");
            if entries.insert(key.to_string(), (value, lineno)).is_some() {
                return Err(perr(format!("duplicate key `{key}`")));
            }
        }
        Ok(raw)
    }

    fn apply_override(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |reason: String| Error::validation(key, reason);
        if key == "starts" {
            let mut starts = Vec::new();
            for part in value.split(';') {
                starts.push((parse_vector(part).map_err(bad)?, 0));
            }
            self.starts = starts;
            self.sections.entry("starts".into()).or_default();
            return Ok(());
        }
        let (section, name) = key
            .split_once('.')
            .ok_or_else(|| bad("expected `section.key`".into()))?;
        if !SECTIONS.contains(&section) || section == "starts" || !known_key(section, name) {
            return Err(bad("unknown key".into()));
        }
        let value = parse_value(value).map_err(bad)?;
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(name.to_string(), (value, 0));
        Ok(())
    }

    fn build(self) -> Result<Scenario> {
        let empty = BTreeMap::new();
        let section = |name: &str| Fields {
            section: name.to_string(),
            entries: self.sections.get(name).unwrap_or(&empty),
        };

        if !self.sections.contains_key("workspace") {
            return Err(Error::validation("workspace", "section is required"));
        }
        if !self.sections.contains_key("ds") {
            return Err(Error::validation("ds", "section is required"));
        }

        let ws = section("workspace");
        let workspace = Superquadric::new(
            ws.vector_or("center", Vec3::ZERO)?,
            ws.vector("axes")?.to_array(),
            ws.uint_or("power", 1)?,
        )?;

        let obstacle = if self.sections.contains_key("obstacle") {
            let ob = section("obstacle");
            Some(Superquadric::with_margin(
                ob.vector("center")?,
                ob.vector("axes")?.to_array(),
                ob.uint_or("power", 1)?,
                ob.number_or("margin", 0.0)?,
            )?)
        } else {
            None
        };

        let ds_fields = section("ds");
        let target = ds_fields.vector("target")?;
        let kind = ds_fields.word_or("kind", "scaled_radial")?;
        let ds = match kind.as_str() {
            "scaled_radial" => {
                if ds_fields.entries.contains_key("matrix") {
                    return Err(Error::validation("ds.matrix", "only valid with kind = linear"));
                }
                OriginalDs::radial(ds_fields.number_or("gain", 1.0)?, target)?
            }
            "linear" => {
                if ds_fields.entries.contains_key("gain") {
                    return Err(Error::validation("ds.gain", "only valid with kind = scaled_radial"));
                }
                OriginalDs::linear(ds_fields.matrix("matrix")?, target)?
            }
            other => return Err(Error::validation("ds.kind", format!("expected `scaled_radial` or `linear`, got `{other}`"))),
        };

        let m = section("modulation");
        let md = ModulationParams::default();
        let modulation = ModulationParams {
            lambda_w: m.number_or("lambda_w", md.lambda_w)?,
            eps_weight: m.number_or("eps_weight", md.eps_weight)?,
        };

        let f = section("flow");
        let fd = FlowParams::default();
        let flow = FlowParams {
            v_th: f.number_or("v_th", fd.v_th)?,
            sign_pref: f.parsed_or("sign_pref", fd.sign_pref)?,
            beta1: f.number_or("beta1", fd.beta1)?,
            beta2: f.number_or("beta2", fd.beta2)?,
            method: f.parsed_or("method", fd.method)?,
        };

        let it = section("integrator");
        let id = IntegratorConfig::default();
        let integrator = IntegratorConfig {
            dt: it.number_or("dt", id.dt)?,
            max_steps: it.uint_or("max_steps", id.max_steps as u64)? as usize,
            goal_tol: it.number_or("goal_tol", id.goal_tol)?,
            guard: match it.word_or("guard", if id.guard { "on" } else { "off" })?.as_str() {
                "on" => true,
                "off" => false,
                other => return Err(Error::validation("integrator.guard", format!("expected `on` or `off`, got `{other}`"))),
            },
            record_stride: it.uint_or("record_stride", id.record_stride as u64)? as usize,
        };

        let scenario = Scenario {
            workspace,
            obstacle,
            ds,
            flow,
            modulation,
            integrator,
            starts: self.starts.into_iter().map(|(v, _)| v).collect(),
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

fn known_key(section: &str, key: &str) -> bool {
    let keys: &[&str] = match section {
        "workspace" => &["center", "axes", "power"],
        "obstacle" => &["center", "axes", "power", "margin"],
        "ds" => &["kind", "gain", "matrix", "target"],
        "modulation" => &["lambda_w", "eps_weight"],
        "flow" => &["v_th", "sign_pref", "beta1", "beta2", "method"],
        "integrator" => &["dt", "max_steps", "goal_tol", "guard", "record_stride"],
        _ => &[],
    };
    keys.contains(&key)
}

struct Fields<'a> {
    section: String,
    entries: &'a BTreeMap<String, (Value, usize)>,
}

impl Fields<'_> {
    fn name(&self, key: &str) -> String {
        format!("{}.{key}", self.section)
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key).map(|(v, _)| v)
    }

    fn wrong(&self, key: &str, want: &str, got: &Value) -> Error {
        Error::validation(self.name(key), format!("expected {want}, got {}", got.describe()))
    }

    fn vector(&self, key: &str) -> Result<Vec3> {
        match self.get(key) {
            Some(Value::Vector(v)) => Ok(*v),
            Some(other) => Err(self.wrong(key, "a 3-vector", other)),
            None => Err(Error::validation(self.name(key), "is required")),
        }
    }

    fn vector_or(&self, key: &str, default: Vec3) -> Result<Vec3> {
        match self.get(key) {
            None => Ok(default),
            Some(_) => self.vector(key),
        }
    }

    fn matrix(&self, key: &str) -> Result<Mat3> {
        match self.get(key) {
            Some(Value::Matrix(m)) => Ok(*m),
            Some(other) => Err(self.wrong(key, "a 3x3 matrix", other)),
            None => Err(Error::validation(self.name(key), "is required")),
        }
    }

    fn number_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Number(x)) => Ok(*x),
            Some(other) => Err(self.wrong(key, "a number", other)),
        }
    }

    fn uint_or(&self, key: &str, default: u64) -> Result<u32> {
        let v = self.unsigned_or(key, default)?;
        u32::try_from(v).map_err(|_| Error::validation(self.name(key), "too large"))
    }

    fn unsigned_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Number(x)) if x.fract() == 0.0 && *x >= 0.0 && *x <= u64::MAX as f64 => Ok(*x as u64),
            Some(Value::Number(_)) => Err(Error::validation(key, "must be a non-negative integer")),
            Some(other) => Err(self.wrong(key, "an integer", other)),
        }
    }

    fn word_or(&self, key: &str, default: &str) -> Result<String> {
        match self.get(key) {
            None => Ok(default.to_string()),
            Some(Value::Word(w)) => Ok(w.clone()),
            Some(other) => Err(self.wrong(key, "a word", other)),
        }
    }

    fn parsed_or<T: std::str::FromStr<Err = String>>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Word(w)) => w.parse().map_err(|e: String| Error::validation(self.name(key), e)),
            Some(other) => Err(self.wrong(key, "a word", other)),
        }
    }
}

/// Parses and validates a scenario, filling documented defaults.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    RawScenario::parse(text)?.build()
}

/// Like [`parse_scenario`], with `section.key = value` overrides applied
/// before validation. The key `starts` takes `;`-separated vectors.
pub fn parse_scenario_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Scenario> {
    let mut raw = RawScenario::parse(text)?;
    for (k, v) in overrides {
        raw.apply_override(k, v)?;
    }
    raw.build()
}

fn fmt_vec(v: Vec3) -> String {
    format!("({}, {}, {})", v.x, v.y, v.z)
}

/// Canonical text form; parsing it back yields an equal scenario.
pub fn write_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let body = |out: &mut String, name: &str, b: &Superquadric, margin: bool| {
        let _ = writeln!(out, "[{name}]");
        let _ = writeln!(out, "center = {}", fmt_vec(b.center));
        let _ = writeln!(out, "axes = {}", fmt_vec(Vec3::from_array(b.axes)));
        let _ = writeln!(out, "power = {}", b.power);
        if margin {
            let _ = writeln!(out, "margin = {}", b.margin);
        }
        out.push('\n');
    };
    body(&mut out, "workspace", &s.workspace, false);
    if let Some(ob) = &s.obstacle {
        body(&mut out, "obstacle", ob, true);
    }

    out.push_str("[ds]\n");
    match &s.ds {
        OriginalDs::ScaledRadial { gain, target } => {
            let _ = writeln!(out, "kind = scaled_radial\ngain = {gain}\ntarget = {}", fmt_vec(*target));
        }
        OriginalDs::LinearAttractor { gain_matrix, target } => {
            let rows: Vec<String> = (0..3).map(|i| fmt_vec(gain_matrix.row(i))).collect();
            let _ = writeln!(out, "kind = linear\nmatrix = ({})\ntarget = {}", rows.join(", "), fmt_vec(*target));
        }
    }
    let m = &s.modulation;
    let _ = writeln!(out, "\n[modulation]\nlambda_w = {}\neps_weight = {:e}", m.lambda_w, m.eps_weight);
    let f = &s.flow;
    let _ = writeln!(
        out,
        "\n[flow]\nv_th = {}\nsign_pref = {}\nbeta1 = {}\nbeta2 = {}\nmethod = {}",
        f.v_th,
        f.sign_pref.as_str(),
        f.beta1,
        f.beta2,
        f.method.as_str()
    );
    let i = &s.integrator;
    let _ = writeln!(
        out,
        "\n[integrator]\ndt = {}\nmax_steps = {}\ngoal_tol = {}\nguard = {}\nrecord_stride = {}",
        i.dt,
        i.max_steps,
        i.goal_tol,
        if i.guard { "on" } else { "off" },
        i.record_stride
    );
    out.push_str("\n[starts]\n");
    for st in &s.starts {
        let _ = writeln!(out, "{}", fmt_vec(*st));
    }
    out
}

/// Rounds to 9 significant digits, then prints the shortest text that
/// parses back to that rounded value.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    let plain = format!("{rounded}");
    let sci = format!("{rounded:e}");
    if sci.len() < plain.len() {
        sci
    } else {
        plain
    }
}

pub fn write_trajectory<W: Write>(traj: &Trajectory, sink: &mut W) -> Result<()> {
    let mut buf = String::with_capacity(64 * (traj.samples.len() + 1));
    buf.push_str(TRAJECTORY_HEADER);
    buf.push('\n');
    for s in &traj.samples {
        let go = s.gamma_o.map(format_real).unwrap_or_default();
        let _ = writeln!(
            buf,
            "{},{},{},{},{},{},{},{},{},{}",
            format_real(s.t),
            format_real(s.xi.x),
            format_real(s.xi.y),
            format_real(s.xi.z),
            format_real(s.v.x),
            format_real(s.v.y),
            format_real(s.v.z),
            s.mode.token(),
            go,
            format_real(s.gamma_w)
        );
    }
    sink.write_all(buf.as_bytes())?;
    Ok(())
}

pub fn write_field<W: Write>(samples: &[FieldSample], sink: &mut W) -> Result<()> {
    let mut buf = String::with_capacity(48 * (samples.len() + 1));
    buf.push_str(FIELD_HEADER);
    buf.push('\n');
    for s in samples {
        let _ = writeln!(
            buf,
            "{},{},{},{},{},{},{}",
            format_real(s.xi.x),
            format_real(s.xi.y),
            format_real(s.xi.z),
            format_real(s.v.x),
            format_real(s.v.y),
            format_real(s.v.z),
            s.mode.map_or(INVALID_TOKEN, ModeState::token)
        );
    }
    sink.write_all(buf.as_bytes())?;
    Ok(())
}

fn csv_rows<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, Vec<&'a str>)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        other => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{header}`, got `{}`", other.unwrap_or("")),
            })
        }
    }
    Ok(lines.enumerate().map(|(i, l)| (i + 2, l.split(',').collect())))
}

fn csv_num(line: usize, s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad number `{s}`"),
    })
}

/// Reads back a trajectory CSV produced by [`write_trajectory`].
pub fn read_trajectory_csv(text: &str) -> Result<Vec<TrajectorySample>> {
    csv_rows(text, TRAJECTORY_HEADER)?
        .map(|(line, cols)| {
            if cols.len() != 10 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 10 columns, got {}", cols.len()),
                });
            }
            let n = |i: usize| csv_num(line, cols[i]);
            Ok(TrajectorySample {
                t: n(0)?,
                xi: Vec3::new(n(1)?, n(2)?, n(3)?),
                v: Vec3::new(n(4)?, n(5)?, n(6)?),
                mode: ModeState::from_token(cols[7]).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("unknown mode `{}`", cols[7]),
                })?,
                gamma_o: if cols[8].is_empty() { None } else { Some(n(8)?) },
                gamma_w: n(9)?,
            })
        })
        .collect()
}

/// Reads back a field CSV produced by [`write_field`].
pub fn read_field_csv(text: &str) -> Result<Vec<FieldSample>> {
    csv_rows(text, FIELD_HEADER)?
        .map(|(line, cols)| {
            if cols.len() != 7 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 7 columns, got {}", cols.len()),
                });
            }
            let n = |i: usize| csv_num(line, cols[i]);
            let mode = match cols[6] {
                INVALID_TOKEN => None,
                tok => Some(ModeState::from_token(tok).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("unknown mode `{tok}`"),
                })?),
            };
            Ok(FieldSample {
                xi: Vec3::new(n(0)?, n(1)?, n(2)?),
                v: Vec3::new(n(3)?, n(4)?, n(5)?),
                mode,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::SignPref;
    use crate::integrator::{Outcome, TrajectoryStats};

    const MINIMAL: &str = "\
[workspace]
axes = (1, 1, 1)

[ds]
target = (0, 0, 0)

[starts]
(0.5, 0, 0)
";

    #[test]
    fn minimal_scenario_gets_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.workspace.power, 1);
        assert_eq!(s.workspace.center, Vec3::ZERO);
        assert!(s.obstacle.is_none());
        assert_eq!(s.modulation.lambda_w, 0.7);
        assert_eq!(s.modulation.eps_weight, 1e-9);
        assert_eq!((s.flow.beta1, s.flow.beta2), (0.95, 1.05));
        assert_eq!(s.flow.v_th, 0.01);
        assert_eq!(s.flow.sign_pref, SignPref::Along);
        assert_eq!(s.integrator.dt, 1e-3);
        assert_eq!(s.integrator.max_steps, 200_000);
        assert_eq!(s.integrator.goal_tol, 1e-3);
        assert!(s.integrator.guard);
        assert_eq!(s.ds, OriginalDs::ScaledRadial { gain: 1.0, target: Vec3::ZERO });
        assert_eq!(s.starts, vec![Vec3::new(0.5, 0.0, 0.0)]);
    }

    #[test]
    fn zero_power_rejected() {
        let text = MINIMAL.replace("axes = (1, 1, 1)", "axes = (1, 1, 1)\npower = 0");
        match parse_scenario(&text) {
            Err(Error::Validation { field, reason }) => {
                assert_eq!(field, "power");
                assert_eq!(reason, "must be ≥ 1");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn start_outside_workspace_rejected() {
        // ‖ξ‖² = 1.5 on the unit sphere.
        let text = MINIMAL.replace("(0.5, 0, 0)", "(1, 0.5, 0.5)");
        match parse_scenario(&text) {
            Err(Error::Validation { field, reason }) => {
                assert_eq!(field, "starts[0]");
                assert_eq!(reason, "outside workspace");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_and_sections_rejected() {
        let text = MINIMAL.replace("axes = (1, 1, 1)", "axes = (1, 1, 1)\nradius = 2");
        assert!(matches!(parse_scenario(&text), Err(Error::Parse { line: 3, .. })));
        let text = format!("{MINIMAL}\n[camera]\n");
        assert!(matches!(parse_scenario(&text), Err(Error::Parse { .. })));
        assert!(matches!(parse_scenario("axes = (1,1,1)"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn missing_required_values() {
        let text = MINIMAL.replace("target = (0, 0, 0)", "");
        assert!(matches!(parse_scenario(&text), Err(Error::Validation { field, .. }) if field == "ds.target"));
        let text = MINIMAL.replace("(0.5, 0, 0)\n", "");
        assert!(matches!(parse_scenario(&text), Err(Error::Validation { field, .. }) if field == "starts"));
    }

    #[test]
    fn linear_ds_and_overrides() {
        let text = "\
[workspace]
axes = (1, 1, 1)
[ds]
kind = linear
matrix = ((1, -2, 0), (2, 1, 0), (0, 0, 1))
target = (0.1, 0, 0)
[starts]
(0.5, 0.2, 0)
";
        let s = parse_scenario_with_overrides(
            text,
            &[
                ("flow.sign_pref".into(), "opposite".into()),
                ("integrator.guard".into(), "off".into()),
                ("obstacle.center".into(), "(-0.5, 0, 0)".into()),
                ("obstacle.axes".into(), "(0.1, 0.1, 0.1)".into()),
            ],
        )
        .unwrap();
        assert_eq!(s.flow.sign_pref, SignPref::Opposite);
        assert!(!s.integrator.guard);
        assert_eq!(s.obstacle.unwrap().center, Vec3::new(-0.5, 0.0, 0.0));
        match s.ds {
            OriginalDs::LinearAttractor { gain_matrix, .. } => assert_eq!(gain_matrix.m[0][1], -2.0),
            _ => panic!("expected linear"),
        }
        assert!(parse_scenario_with_overrides(text, &[("flow.speed".into(), "1".into())]).is_err());
    }

    #[test]
    fn unstable_matrix_rejected() {
        let text = MINIMAL.replace("target = (0, 0, 0)", "kind = linear\nmatrix = ((1,0,0),(0,-1,0),(0,0,1))\ntarget = (0,0,0)");
        assert!(matches!(parse_scenario(&text), Err(Error::Validation { field, .. }) if field == "ds.matrix"));
    }

    #[test]
    fn canonical_form_is_fixed_point() {
        let text = "\
[workspace]
center = (0.1, 0, 0)
axes = (1, 0.8, 1.2)
power = 2
[obstacle]
center = (0.4, 0.1, 0)
axes = (0.1, 0.2, 0.15)
power = 3
margin = 0.01
[ds]
kind = linear
matrix = ((1, -2, 0), (2, 1, 0), (0, 0, 1))
target = (-0.3, 0, 0)
[flow]
sign_pref = opposite
v_th = 0.02
[starts]
(0.2, -0.3, 0.1)
(-0.1, 0.3, 0)
";
        let s1 = parse_scenario(text).unwrap();
        let w1 = write_scenario(&s1);
        let s2 = parse_scenario(&w1).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(w1, write_scenario(&s2));
    }

    #[test]
    fn warnings_for_unreachable_target() {
        let text = MINIMAL.replace("target = (0, 0, 0)", "target = (2, 0, 0)");
        let s = parse_scenario(&text).unwrap();
        assert_eq!(s.warnings().len(), 1);
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(0.1), "0.1");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(1.0 / 3.0), "0.333333333");
        assert_eq!(format_real(123456789012.0), "123456789000");
        assert_eq!(format_real(1.5e20), "1.5e20");
        assert_eq!(format_real(0.001), "1e-3");
        assert_eq!(format_real(1e-20), "1e-20");
        assert_eq!(format_real(-2.5e-7), "-2.5e-7");
    }

    fn one_sample(mode: ModeState, gamma_o: Option<f64>) -> Trajectory {
        Trajectory {
            samples: vec![TrajectorySample {
                t: 0.0,
                xi: Vec3::new(0.5, -0.25, 1.0 / 3.0),
                v: Vec3::new(1e-3, 0.0, -2.0),
                mode,
                gamma_o,
                gamma_w: 0.25,
            }],
            outcome: Outcome::ReachedTarget,
            stats: TrajectoryStats {
                min_gamma_o: gamma_o,
                max_gamma_w: 0.25,
                steps: 0,
                mode_transitions: 0,
            },
        }
    }

    #[test]
    fn trajectory_csv_layout() {
        let mut out = Vec::new();
        write_trajectory(&one_sample(ModeState::Intersection, Some(1.02)), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "t,x,y,z,vx,vy,vz,mode,gamma_o,gamma_w\n0,0.5,-0.25,0.333333333,1e-3,0,-2,intersect,1.02,0.25\n"
        );
        let mut out = Vec::new();
        write_trajectory(&one_sample(ModeState::Free, None), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().contains(",free,,0.25"));
        let back = read_trajectory_csv(&text).unwrap();
        assert_eq!(back[0].gamma_o, None);
        assert_eq!(back[0].mode, ModeState::Free);
    }

    #[test]
    fn field_csv_layout() {
        let samples = [
            FieldSample {
                xi: Vec3::new(0.0, 1.0, 0.0),
                v: Vec3::new(0.5, 0.0, 0.0),
                mode: Some(ModeState::Combined),
            },
            FieldSample {
                xi: Vec3::X,
                v: Vec3::ZERO,
                mode: None,
            },
        ];
        let mut out = Vec::new();
        write_field(&samples, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "x,y,z,vx,vy,vz,mode\n0,1,0,0.5,0,0,combined\n1,0,0,0,0,0,invalid\n");
        assert_eq!(read_field_csv(&text).unwrap(), samples);
    }
}
