//! JSON framework documents.

use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::{CoefficientMode, Coordinates, CrystalFramework, Edge, Geometry};
use crate::algebra::{parse_scalar, ExactReal};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameworkDocument {
    pub dimension: usize,
    #[serde(default = "default_mode")]
    pub mode: String,
    pub basis: Vec<Vec<Value>>,
    pub vertices: VertexList,
    pub edges: Vec<EdgeRecord>,
}

fn default_mode() -> String {
    "exact".to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub v: String,
    pub lv: Vec<i64>,
    pub w: String,
    pub lw: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// Vertex map kept in document order, duplicates preserved for validation.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct VertexList(pub Vec<(String, Vec<Value>)>);

impl Serialize for VertexList {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for VertexList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = VertexList;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from vertex name to coordinate vector")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<VertexList, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, Vec<Value>>()? {
                    out.push((k, v));
                }
                Ok(VertexList(out))
            }
        }
        d.deserialize_map(V)
    }
}

fn scalar_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Schema(format!(
            "expected a number or expression, found {}",
            other
        ))),
    }
}

fn exact_scalar(v: &Value) -> Result<ExactReal> {
    let text = scalar_text(v)?;
    if let Ok(x) = text.parse::<ExactReal>() {
        return Ok(x);
    }
    parse_scalar::<ExactReal>(&text)
}

fn float_scalar(v: &Value) -> Result<f64> {
    if let Value::Number(n) = v {
        if let Some(x) = n.as_f64() {
            return Ok(x);
        }
    }
    let text = scalar_text(v)?;
    match text.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => parse_scalar::<f64>(&text),
    }
}

impl FrameworkDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn to_framework(&self) -> Result<CrystalFramework> {
        let d = self.dimension;
        let mode = match self.mode.as_str() {
            "exact" => CoefficientMode::Exact,
            "floating" => CoefficientMode::Floating,
            other => return Err(Error::Schema(format!("unknown mode `{}`", other))),
        };
        let names: Vec<String> = self.vertices.0.iter().map(|(n, _)| n.clone()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateVertexName(n.clone()));
            }
        }
        let coords = match mode {
            CoefficientMode::Exact => {
                let conv = |rows: Vec<&Vec<Value>>| -> Result<Vec<Vec<ExactReal>>> {
                    rows.into_iter()
                        .map(|r| r.iter().map(exact_scalar).collect())
                        .collect()
                };
                Coordinates::Exact(Geometry {
                    basis: conv(self.basis.iter().collect())?,
                    positions: conv(self.vertices.0.iter().map(|(_, p)| p).collect())?,
                })
            }
            CoefficientMode::Floating => {
                let conv = |rows: Vec<&Vec<Value>>| -> Result<Vec<Vec<f64>>> {
                    rows.into_iter()
                        .map(|r| r.iter().map(float_scalar).collect())
                        .collect()
                };
                Coordinates::Floating(Geometry {
                    basis: conv(self.basis.iter().collect())?,
                    positions: conv(self.vertices.0.iter().map(|(_, p)| p).collect())?,
                })
            }
        };
        let lookup = |n: &str| {
            names
                .iter()
                .position(|m| m == n)
                .ok_or_else(|| Error::UnknownVertex(n.to_string()))
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, r) in self.edges.iter().enumerate() {
            edges.push(Edge {
                v: lookup(&r.v)?,
                lv: r.lv.clone(),
                w: lookup(&r.w)?,
                lw: r.lw.clone(),
                name: r.name.clone().unwrap_or_else(|| format!("e{}", i)),
            });
        }
        CrystalFramework::new(d, names, coords, edges)
    }

    pub fn from_framework(c: &CrystalFramework) -> Self {
        let (basis, positions): (Vec<Vec<Value>>, Vec<Vec<Value>>) = match c.coordinates() {
            Coordinates::Exact(g) => {
                let conv = |vs: &Vec<Vec<ExactReal>>| {
                    vs.iter()
                        .map(|v| v.iter().map(|x| Value::String(x.to_string())).collect())
                        .collect()
                };
                (conv(&g.basis), conv(&g.positions))
            }
            Coordinates::Floating(g) => {
                let conv = |vs: &Vec<Vec<f64>>| {
                    vs.iter()
                        .map(|v| v.iter().map(|x| Value::String(format!("{}", x))).collect())
                        .collect()
                };
                (conv(&g.basis), conv(&g.positions))
            }
        };
        let names = c.vertex_names();
        FrameworkDocument {
            dimension: c.dim(),
            mode: c.mode().to_string(),
            basis,
            vertices: VertexList(names.iter().cloned().zip(positions).collect()),
            edges: c
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    v: names[e.v].clone(),
                    lv: e.lv.clone(),
                    w: names[e.w].clone(),
                    lw: e.lw.clone(),
                    name: Some(e.name.clone()),
                })
                .collect(),
        }
    }
}

pub fn parse_framework(text: &str) -> Result<CrystalFramework> {
    FrameworkDocument::from_json(text)?.to_framework()
}

impl CrystalFramework {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_framework(text)
    }

    pub fn to_json(&self) -> String {
        FrameworkDocument::from_framework(self).to_json()
    }
}
