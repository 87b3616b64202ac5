//! JSON and text formats.
//!
//! Matrices: `{"rows": n, "cols": m, "data": [...]}` with `data` a row-major list of
//! n·m entries, each `[re, im]` or a bare real number. A list of n rows of m entries
//! is also accepted.
//!
//! Models: `{"dim": d, "grid_bound": G, "species": [{"name": "a", "mass": 1.0}, ...],
//! "vertices": [{"legs": ["a", "b", "c"], "coupling": 1.0, "damped_legs": [2]}]}`.
//!
//! Schedules: `{"a": <matrix>, "b": <matrix>, "ramp": "smoothstep"}` where each matrix
//! is inline or a path relative to the schedule file.
//!
//! States: whitespace-separated particles `species:p1,p2,...`, optionally wrapped in
//! `|` and `>`; an empty string or `vac` is the vacuum.

use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::evolution::{Ramp, Schedule};
use crate::matcore::{c64, CMatrix, C64};
use crate::symdiag::{Model, MultisetState, Particle, Species, Vertex};

/// Largest matrix accepted from text, per dimension.
pub const MAX_DIM: usize = 4096;

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
}

fn entry(v: &Value, at: &str) -> Result<C64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .map(|x| c64(x, 0.0))
            .ok_or_else(|| Error::parse(at, "number out of range")),
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or_else(|| Error::parse(format!("{at}[0]"), "expected a number"))?;
            let im = pair[1].as_f64().ok_or_else(|| Error::parse(format!("{at}[1]"), "expected a number"))?;
            Ok(c64(re, im))
        }
        _ => Err(Error::parse(at, "expected a number or a [re, im] pair")),
    }
}

fn dimension(obj: &Value, key: &str, at: &str) -> Result<usize> {
    let n = obj
        .get(key)
        .ok_or_else(|| Error::parse(at, format!("missing field \"{key}\"")))?
        .as_u64()
        .ok_or_else(|| Error::parse(format!("{at}.{key}"), "expected a nonnegative integer"))?;
    if n == 0 || n as usize > MAX_DIM {
        return Err(Error::parse(format!("{at}.{key}"), format!("dimension must lie in 1..={MAX_DIM}")));
    }
    Ok(n as usize)
}

fn matrix_from_value(v: &Value, at: &str) -> Result<CMatrix> {
    if !v.is_object() {
        return Err(Error::parse(at, "expected a matrix object"));
    }
    let rows = dimension(v, "rows", at)?;
    let cols = dimension(v, "cols", at)?;
    let data = v
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(at, "missing array field \"data\""))?;
    let flat = || -> Result<Vec<C64>> {
        data.iter()
            .enumerate()
            .map(|(k, e)| entry(e, &format!("{at}.data[{k}]")))
            .collect()
    };
    let values = if data.len() == rows * cols {
        flat()?
    } else if data.len() == rows {
        let mut out = Vec::with_capacity(rows * cols);
        for (r, row) in data.iter().enumerate() {
            let here = format!("{at}.data[{r}]");
            let row = row.as_array().ok_or_else(|| Error::parse(&here, "expected a row array"))?;
            if row.len() != cols {
                return Err(Error::parse(&here, format!("row has {} entries, expected {cols}", row.len())));
            }
            for (c, e) in row.iter().enumerate() {
                out.push(entry(e, &format!("{here}[{c}]"))?);
            }
        }
        out
    } else {
        return Err(Error::parse(
            format!("{at}.data"),
            format!("{} items match neither {} entries nor {rows} rows", data.len(), rows * cols),
        ));
    };
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::parse(format!("{at}.data"), "entries must be finite"));
    }
    Ok(CMatrix::from_row_slice(rows, cols, &values))
}

pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let v: Value = serde_json::from_str(text).map_err(json_error)?;
    matrix_from_value(&v, "$")
}

pub fn load_matrix(path: &Path) -> Result<CMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(path.display().to_string(), format!("cannot read file: {e}")))?;
    parse_matrix(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::parse(format!("{}: {location}", path.display()), message),
        other => other,
    })
}

/// Matrix JSON with `[re, im]` entries.
pub fn matrix_to_json(m: &CMatrix) -> String {
    let mut data = Vec::with_capacity(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            data.push(json!([m[(r, c)].re, m[(r, c)].im]));
        }
    }
    json!({"rows": m.nrows(), "cols": m.ncols(), "data": data}).to_string()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeciesFile {
    name: String,
    mass: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexFile {
    legs: Vec<String>,
    #[serde(default = "unit_coupling")]
    coupling: f64,
    #[serde(default)]
    damped_legs: Vec<usize>,
}

fn unit_coupling() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    dim: usize,
    grid_bound: i64,
    species: Vec<SpeciesFile>,
    vertices: Vec<VertexFile>,
}

pub fn parse_model(text: &str) -> Result<Model> {
    let file: ModelFile = serde_json::from_str(text).map_err(json_error)?;
    let species: Vec<Species> = file
        .species
        .into_iter()
        .map(|s| Species {
            name: s.name,
            mass: s.mass,
        })
        .collect();
    for (k, s) in species.iter().enumerate() {
        if s.name.is_empty() || s.name.contains(|c: char| c.is_whitespace() || c == ':') {
            return Err(Error::parse(format!("$.species[{k}].name"), "names must be nonempty without spaces or ':'"));
        }
        if species[..k].iter().any(|t| t.name == s.name) {
            return Err(Error::parse(format!("$.species[{k}].name"), format!("duplicate species \"{}\"", s.name)));
        }
    }
    let mut vertices = Vec::with_capacity(file.vertices.len());
    for (k, v) in file.vertices.into_iter().enumerate() {
        let mut legs = Vec::with_capacity(v.legs.len());
        for (l, name) in v.legs.iter().enumerate() {
            let idx = species
                .iter()
                .position(|s| &s.name == name)
                .ok_or_else(|| Error::parse(format!("$.vertices[{k}].legs[{l}]"), format!("unknown species \"{name}\"")))?;
            legs.push(idx);
        }
        vertices.push(Vertex {
            legs,
            coupling: v.coupling,
            damped_legs: v.damped_legs,
        });
    }
    Model::new(file.dim, file.grid_bound, species, vertices).map_err(|e| match e {
        Error::InvalidArgument(msg) => Error::parse("$", msg),
        other => other,
    })
}

pub fn load_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(path.display().to_string(), format!("cannot read file: {e}")))?;
    parse_model(&text)
}

/// Parses a state against the species names and momentum dimension of `model`.
pub fn parse_state(text: &str, model: &Model) -> Result<MultisetState> {
    let trimmed = text.trim();
    let inner = trimmed
        .strip_prefix('|')
        .map(|s| s.strip_suffix('>').unwrap_or(s))
        .unwrap_or(trimmed)
        .trim();
    if inner.is_empty() || inner == "vac" {
        return Ok(MultisetState::vacuum());
    }
    let mut particles = Vec::new();
    for (k, token) in inner.split_whitespace().enumerate() {
        let at = format!("particle {k} \"{token}\"");
        let (name, mom) = token
            .split_once(':')
            .ok_or_else(|| Error::parse(&at, "expected species:p1,p2,..."))?;
        let species = model
            .species_index(name)
            .ok_or_else(|| Error::parse(&at, format!("unknown species \"{name}\"")))?;
        let momentum: Vec<i64> = mom
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(&at, format!("bad momentum component: {e}")))?;
        if momentum.len() != model.dim {
            return Err(Error::parse(&at, format!("momentum has {} components, expected {}", momentum.len(), model.dim)));
        }
        if !model.in_grid(&momentum) {
            return Err(Error::parse(&at, format!("momentum outside the grid bound {}", model.grid_bound)));
        }
        particles.push(Particle::new(species, momentum));
    }
    Ok(MultisetState::new(particles))
}

/// Renders a state in the format read by [`parse_state`].
pub fn format_state(state: &MultisetState, model: &Model) -> String {
    if state.is_empty() {
        return "vac".into();
    }
    state
        .particles()
        .iter()
        .map(|p| {
            let mom: Vec<String> = p.momentum.iter().map(|x| x.to_string()).collect();
            format!("{}:{}", model.species[p.species].name, mom.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a schedule; string-valued matrices are read from files relative to `base`
/// and are rejected when `base` is `None`.
pub fn parse_schedule(text: &str, base: Option<&Path>) -> Result<Schedule> {
    let v: Value = serde_json::from_str(text).map_err(json_error)?;
    let obj = v.as_object().ok_or_else(|| Error::parse("$", "expected a schedule object"))?;
    if let Some(extra) = obj.keys().find(|k| !["a", "b", "ramp"].contains(&k.as_str())) {
        return Err(Error::parse(format!("$.{extra}"), "unknown field"));
    }
    let matrix = |key: &str| -> Result<CMatrix> {
        let at = format!("$.{key}");
        match obj.get(key) {
            None => Err(Error::parse("$", format!("missing field \"{key}\""))),
            Some(Value::String(p)) => match base {
                Some(dir) => load_matrix(&dir.join(p)),
                None => Err(Error::parse(at, "file references need a base directory")),
            },
            Some(m) => matrix_from_value(m, &at),
        }
    };
    let (a, b) = (matrix("a")?, matrix("b")?);
    let ramp: Ramp = match obj.get("ramp") {
        None => Ramp::Smoothstep,
        Some(Value::String(s)) => s.parse().map_err(|_| Error::parse("$.ramp", format!("unknown ramp \"{s}\"")))?,
        Some(_) => return Err(Error::parse("$.ramp", "expected a ramp name")),
    };
    Schedule::new(a, b, ramp)
}

pub fn load_schedule(path: &Path) -> Result<Schedule> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(path.display().to_string(), format!("cannot read file: {e}")))?;
    parse_schedule(&text, path.parent())
}
