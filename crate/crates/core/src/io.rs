//! JSON formats for rings, complexes, differential modules, complete
//! intersections and Betti tables. Polynomials are stored as strings.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::betti::BettiTable;
use crate::complex::Complex;
use crate::diffmod::DifferentialModule;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{GradedFreeModule, HomMap, Poly, Ring};
use crate::rigidity::CompleteIntersection;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RingJson {
    pub characteristic: u32,
    pub vars: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub ring: RingJson,
    pub twists: Vec<Vec<i64>>,
    pub maps: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct DmJson {
    pub ring: RingJson,
    pub degree: i64,
    pub twists: Vec<i64>,
    pub matrix: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag_levels: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum CiJson {
    Gens { ring: RingJson, gens: Vec<String> },
    Degrees { n: usize, degrees: Vec<i64> },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct BettiJson {
    /// `[i, k, β_{i,k}]` triples.
    pub entries: Vec<(usize, i64, usize)>,
}

/// A parsed and validated input file.
#[derive(Clone, Debug)]
pub enum Input {
    Complex(Complex),
    Dm(DifferentialModule),
    Ci(CompleteIntersection),
    Betti(BettiTable),
}

impl Input {
    pub fn kind(&self) -> &'static str {
        match self {
            Input::Complex(_) => "complex",
            Input::Dm(_) => "differential module",
            Input::Ci(_) => "complete intersection",
            Input::Betti(_) => "Betti table",
        }
    }
}

/// Errors that name a broken invariant become `ValidationError(..)`.
fn validation(e: Error) -> Error {
    match e {
        Error::HomogeneityViolation { .. } => Error::Validation(e.to_string()),
        Error::NonHomogeneous(m) => Error::Validation(format!("HomogeneityViolation: {m}")),
        Error::ComplexViolation(m) => Error::Validation(format!("ComplexViolation: {m}")),
        Error::SquareNonzero(m) => Error::Validation(format!("SquareNonzero: {m}")),
        Error::FlagViolation(m) => Error::Validation(format!("FlagViolation: {m}")),
        Error::ShapeMismatch(m) => Error::Validation(format!("ShapeMismatch: {m}")),
        other => other,
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

pub fn ring_from_json(r: &RingJson) -> Result<Ring> {
    Ring::new(Field::from_characteristic(r.characteristic)?, &r.vars)
}

pub fn ring_to_json(r: &Ring) -> RingJson {
    RingJson { characteristic: r.field().characteristic(), vars: r.vars().to_vec() }
}

fn parse_rows(ring: &Ring, rows: &[Vec<String>], what: &str) -> Result<Vec<Vec<Poly>>> {
    rows.iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(|(c, s)| ring.parse(s).map_err(|e| Error::Parse(format!("{what}[{r}][{c}]: {e}"))))
                .collect()
        })
        .collect()
}

fn rows_to_strings(h: &HomMap) -> Vec<Vec<String>> {
    h.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

pub fn complex_from_json(j: &ComplexJson) -> Result<Complex> {
    let ring = ring_from_json(&j.ring)?;
    let maps = j
        .maps
        .iter()
        .enumerate()
        .map(|(i, m)| parse_rows(&ring, m, &format!("maps[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Complex::from_twists(&ring, j.twists.clone(), maps).map_err(validation)
}

pub fn complex_to_json(c: &Complex) -> ComplexJson {
    ComplexJson {
        ring: ring_to_json(c.ring()),
        twists: c.modules().iter().map(|m| m.twists().to_vec()).collect(),
        maps: c.maps().iter().map(rows_to_strings).collect(),
    }
}

pub fn dm_from_json(j: &DmJson) -> Result<DifferentialModule> {
    let ring = ring_from_json(&j.ring)?;
    let module = GradedFreeModule::new(&ring, j.twists.clone());
    let rows = parse_rows(&ring, &j.matrix, "matrix")?;
    let d = HomMap::new(&module, &module, j.degree, rows).map_err(validation)?;
    DifferentialModule::new(&module, j.degree, d, j.flag_levels.clone()).map_err(validation)
}

pub fn dm_to_json(d: &DifferentialModule) -> DmJson {
    DmJson {
        ring: ring_to_json(d.module().ring()),
        degree: d.degree(),
        twists: d.module().twists().to_vec(),
        matrix: rows_to_strings(d.differential()),
        flag_levels: d.levels().map(<[_]>::to_vec),
    }
}

pub fn ci_from_json(j: &CiJson) -> Result<CompleteIntersection> {
    match j {
        CiJson::Gens { ring, gens } => {
            let ring = ring_from_json(ring)?;
            let gens = gens
                .iter()
                .enumerate()
                .map(|(i, s)| ring.parse(s).map_err(|e| Error::Parse(format!("gens[{i}]: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            CompleteIntersection::from_gens(&ring, gens).map_err(validation)
        }
        CiJson::Degrees { n, degrees } => CompleteIntersection::from_degrees(*n, degrees.clone()),
    }
}

pub fn ci_to_json(ci: &CompleteIntersection) -> CiJson {
    match ci.generators() {
        Some((ring, gens)) => CiJson::Gens { ring: ring_to_json(ring), gens: gens.iter().map(ToString::to_string).collect() },
        None => CiJson::Degrees { n: ci.nvars(), degrees: ci.degrees().to_vec() },
    }
}

pub fn betti_from_json(j: &BettiJson) -> BettiTable {
    BettiTable::from_entries(j.entries.iter().copied())
}

pub fn betti_to_json(t: &BettiTable) -> BettiJson {
    BettiJson { entries: t.entries().collect() }
}

fn de<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses any supported document, choosing the format by its keys.
pub fn parse_str(text: &str) -> Result<Input> {
    let v: Value = serde_json::from_str(text).map_err(json_err)?;
    let obj = v.as_object().ok_or_else(|| Error::Parse("top level must be a JSON object".into()))?;
    let has = |k: &str| obj.contains_key(k);
    if has("matrix") {
        Ok(Input::Dm(dm_from_json(&de(v)?)?))
    } else if has("maps") || has("twists") {
        Ok(Input::Complex(complex_from_json(&de(v)?)?))
    } else if has("gens") || has("degrees") {
        Ok(Input::Ci(ci_from_json(&de(v)?)?))
    } else if has("entries") {
        Ok(Input::Betti(betti_from_json(&de(v)?)))
    } else {
        Err(Error::Parse("unrecognized document: expected maps, matrix, gens, degrees or entries".into()))
    }
}

pub fn parse_input(path: &Path) -> Result<Input> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text)
}

pub fn to_pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    const KOSZUL_XY: &str = r#"{"ring":{"characteristic":0,"vars":["x","y"]},
        "twists":[[0],[-1,-1],[-2]],"maps":[[["x","y"]],[["-y"],["x"]]]}"#;

    #[test]
    fn round_trip() {
        let Input::Complex(c) = parse_str(KOSZUL_XY).unwrap() else { panic!() };
        let back = complex_from_json(&complex_to_json(&c)).unwrap();
        assert_eq!(complex_to_json(&back), complex_to_json(&c));
        let d = crate::diffmod::fold(&c, 0);
        let dj = dm_to_json(&d);
        assert_eq!(dm_to_json(&dm_from_json(&dj).unwrap()), dj);
    }

    #[test]
    fn tampered() {
        let bad = KOSZUL_XY.replace(r#"[["x","y"]]"#, r#"[["x^2","y"]]"#);
        assert!(matches!(parse_str(&bad), Err(Error::Validation(s)) if s.starts_with("HomogeneityViolation")));
        let missing = r#"{"ring":{"characteristic":0,"vars":["x"]},"degree":0,"twists":[0]}"#;
        assert!(matches!(parse_str(missing), Err(Error::Parse(_))));
    }
}
