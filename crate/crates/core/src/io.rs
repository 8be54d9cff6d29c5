//! Text formats for count tables and behaviors.
//!
//! CSV: header `s,t,x,y,count` (or `s,t,x,y,p` for behaviors), zero-based
//! indices, one row per cell; absent cells are zero. JSON: an envelope
//! `{"scenario": {...}, "rows": [{"s":0,"t":0,"x":0,"y":0,"count":5}, ...]}`.
//! Reals are written in shortest round-trip form.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, CountTable, Scenario};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub s: usize,
    pub t: usize,
    pub x: usize,
    pub y: usize,
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbRow {
    pub s: usize,
    pub t: usize,
    pub x: usize,
    pub y: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<R> {
    pub scenario: Scenario,
    pub rows: Vec<R>,
}

trait Cell: Copy {
    type Value: Copy + Default;
    fn coords(&self) -> (usize, usize, usize, usize);
    fn value(&self) -> Self::Value;
}

impl Cell for CountRow {
    type Value = u64;
    fn coords(&self) -> (usize, usize, usize, usize) {
        (self.s, self.t, self.x, self.y)
    }
    fn value(&self) -> u64 {
        self.count
    }
}

impl Cell for ProbRow {
    type Value = f64;
    fn coords(&self) -> (usize, usize, usize, usize) {
        (self.s, self.t, self.x, self.y)
    }
    fn value(&self) -> f64 {
        self.p
    }
}

fn parse_err(source: &str, row: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source.to_string(),
        row,
        message: message.into(),
    }
}

/// Scatters rows into a dense table. Row numbers in errors are 1-based data
/// rows (the CSV header is row 0).
fn densify<R: Cell>(
    source: &str,
    rows: &[R],
    scenario: Option<Scenario>,
) -> Result<(Scenario, Vec<R::Value>)> {
    let sc = match scenario {
        Some(sc) => sc,
        None => {
            if rows.is_empty() {
                return Err(parse_err(source, 0, "no data rows and no scenario"));
            }
            let mut m = (0, 0, 0, 0);
            for r in rows {
                let (s, t, x, y) = r.coords();
                m = (m.0.max(s), m.1.max(t), m.2.max(x), m.3.max(y));
            }
            Scenario {
                n_s: m.0 + 1,
                n_t: m.1 + 1,
                n_x: m.2 + 1,
                n_y: m.3 + 1,
            }
        }
    };
    sc.validate()?;
    let mut seen = vec![false; sc.len()];
    let mut out = vec![R::Value::default(); sc.len()];
    for (k, r) in rows.iter().enumerate() {
        let (s, t, x, y) = r.coords();
        if s >= sc.n_s || t >= sc.n_t || x >= sc.n_x || y >= sc.n_y {
            return Err(parse_err(
                source,
                k + 1,
                format!("cell ({s},{t},{x},{y}) outside scenario {sc}"),
            ));
        }
        let i = sc.index(s, t, x, y);
        if seen[i] {
            return Err(parse_err(source, k + 1, format!("duplicate cell ({s},{t},{x},{y})")));
        }
        seen[i] = true;
        out[i] = r.value();
    }
    Ok((sc, out))
}

fn read_csv_rows<R: for<'de> Deserialize<'de>>(
    source: &str,
    text: &str,
    value_col: &str,
) -> Result<Vec<R>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(source, 0, e.to_string()))?
        .clone();
    let want = ["s", "t", "x", "y", value_col];
    if headers.iter().collect::<Vec<_>>() != want {
        return Err(parse_err(
            source,
            0,
            format!("expected header `{}`", want.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.deserialize().enumerate() {
        rows.push(rec.map_err(|e: csv::Error| parse_err(source, k + 1, e.to_string()))?);
    }
    Ok(rows)
}

pub fn counts_from_csv(source: &str, text: &str, scenario: Option<Scenario>) -> Result<CountTable> {
    let rows: Vec<CountRow> = read_csv_rows(source, text, "count")?;
    let (sc, v) = densify(source, &rows, scenario)?;
    CountTable::from_vec(sc, v)
}

pub fn counts_to_csv(c: &CountTable) -> String {
    let sc = c.scenario();
    let mut out = String::from("s,t,x,y,count\n");
    for (i, n) in c.as_slice().iter().enumerate() {
        let (s, t, x, y) = sc.coords(i);
        out.push_str(&format!("{s},{t},{x},{y},{n}\n"));
    }
    out
}

pub fn behavior_from_csv(source: &str, text: &str, scenario: Option<Scenario>) -> Result<Behavior> {
    let rows: Vec<ProbRow> = read_csv_rows(source, text, "p")?;
    let (sc, v) = densify(source, &rows, scenario)?;
    Behavior::from_vec(sc, v)
}

pub fn behavior_to_csv(b: &Behavior) -> String {
    let sc = b.scenario();
    let mut out = String::from("s,t,x,y,p\n");
    for (i, p) in b.as_slice().iter().enumerate() {
        let (s, t, x, y) = sc.coords(i);
        out.push_str(&format!("{s},{t},{x},{y},{p:?}\n"));
    }
    out
}

pub fn counts_to_json(c: &CountTable) -> Result<String> {
    let sc = c.scenario();
    let env = Envelope {
        scenario: sc,
        rows: c
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, &count)| {
                let (s, t, x, y) = sc.coords(i);
                CountRow { s, t, x, y, count }
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&env)?)
}

pub fn counts_from_json(source: &str, text: &str) -> Result<CountTable> {
    let env: Envelope<CountRow> =
        serde_json::from_str(text).map_err(|e| parse_err(source, e.line(), e.to_string()))?;
    let (sc, v) = densify(source, &env.rows, Some(env.scenario))?;
    CountTable::from_vec(sc, v)
}

pub fn behavior_to_json(b: &Behavior) -> Result<String> {
    let sc = b.scenario();
    let env = Envelope {
        scenario: sc,
        rows: b
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let (s, t, x, y) = sc.coords(i);
                ProbRow { s, t, x, y, p }
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&env)?)
}

pub fn behavior_from_json(source: &str, text: &str) -> Result<Behavior> {
    let env: Envelope<ProbRow> =
        serde_json::from_str(text).map_err(|e| parse_err(source, e.line(), e.to_string()))?;
    let (sc, v) = densify(source, &env.rows, Some(env.scenario))?;
    Behavior::from_vec(sc, v)
}

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// Parses counts as JSON or CSV, by content.
pub fn parse_counts(source: &str, text: &str) -> Result<CountTable> {
    if looks_like_json(text) {
        counts_from_json(source, text)
    } else {
        counts_from_csv(source, text, None)
    }
}

/// Parses a behavior as JSON or CSV, by content.
pub fn parse_behavior(source: &str, text: &str) -> Result<Behavior> {
    if looks_like_json(text) {
        behavior_from_json(source, text)
    } else {
        behavior_from_csv(source, text, None)
    }
}

pub fn read_counts(path: &Path) -> Result<CountTable> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    parse_counts(&path.display().to_string(), &text)
}

/// Compact serde form for a [`Behavior`] inside larger documents:
/// `{"scenario": {...}, "p": [flat cells]}`.
pub mod behavior_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Flat {
        scenario: Scenario,
        p: Vec<f64>,
    }

    pub fn serialize<S: Serializer>(b: &Behavior, ser: S) -> std::result::Result<S::Ok, S::Error> {
        Flat {
            scenario: b.scenario(),
            p: b.as_slice().to_vec(),
        }
        .serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Behavior, D::Error> {
        let f = Flat::deserialize(de)?;
        Behavior::from_vec(f.scenario, f.p).map_err(serde::de::Error::custom)
    }
}
