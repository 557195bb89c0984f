//! File formats and canonical JSON. Objects are written with sorted keys,
//! no whitespace, and every float in `%.16e` form (17 significant digits),
//! so equal values always serialize to identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cone::ConvexCone;
use crate::error::{Error, Result};
use crate::events::{EventSet, SampleBox};
use crate::group::{AffineMap, ZeemanFactors};
use crate::order::{make_poset, FinitePoset};
use crate::relation::Relation;

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                write!(out, "{i}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                let f = n.as_f64().expect("json number");
                write!(out, "{f:.16e}").unwrap();
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, x);
            }
            out.push(']');
        }
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push(':');
                write_value(out, &m[k]);
            }
            out.push('}');
        }
    }
}

pub fn canonical_value(v: &Value) -> String {
    let mut s = String::new();
    write_value(&mut s, v);
    s
}

pub fn canonical<T: Serialize + ?Sized>(t: &T) -> Result<String> {
    Ok(canonical_value(&serde_json::to_value(t)?))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    Ok(std::fs::write(path, text)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&DMatrix<f64>> for MatrixJson {
    fn from(m: &DMatrix<f64>) -> Self {
        let data = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect();
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        Error::check_len(self.rows * self.cols, self.data.len())?;
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineJson {
    pub linear: MatrixJson,
    pub translation: Vec<f64>,
}

impl From<&AffineMap> for AffineJson {
    fn from(f: &AffineMap) -> Self {
        AffineJson {
            linear: f.linear().into(),
            translation: f.translation().to_vec(),
        }
    }
}

impl AffineJson {
    pub fn to_map(&self) -> Result<AffineMap> {
        AffineMap::new(self.linear.to_matrix()?, self.translation.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeemanJson {
    pub lambda: f64,
    pub lorentz: MatrixJson,
    pub translation: Vec<f64>,
    pub orthochronous: bool,
}

impl From<&ZeemanFactors> for ZeemanJson {
    fn from(z: &ZeemanFactors) -> Self {
        ZeemanJson {
            lambda: z.lambda,
            lorentz: (&z.lorentz).into(),
            translation: z.translation.clone(),
            orthochronous: z.orthochronous,
        }
    }
}

/// `generators` is `null` for a cone known only by its normals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeJson {
    pub dim: usize,
    #[serde(default)]
    pub generators: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normals: Option<Vec<Vec<f64>>>,
}

impl From<&ConvexCone> for ConeJson {
    fn from(c: &ConvexCone) -> Self {
        ConeJson {
            dim: c.dim(),
            generators: c.has_vrep().then(|| c.generators().to_vec()),
            normals: c.normals().map(|n| n.to_vec()),
        }
    }
}

impl ConeJson {
    pub fn to_cone(&self, feasibility_tol: f64) -> Result<ConvexCone> {
        match (&self.generators, &self.normals) {
            (Some(g), None) => ConvexCone::new(self.dim, g.clone()),
            (Some(g), Some(n)) => ConvexCone::from_parts(self.dim, g.clone(), n.clone(), feasibility_tol),
            (None, Some(n)) => ConvexCone::from_normals(self.dim, n.clone()),
            (None, None) => Err(Error::Input("cone needs generators or normals".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventsJson {
    pub q: usize,
    pub seed: u64,
    #[serde(rename = "box")]
    pub bounds: [Vec<f64>; 2],
    pub periodic_time: Option<f64>,
    pub events: Vec<Vec<f64>>,
}

impl From<&EventSet> for EventsJson {
    fn from(e: &EventSet) -> Self {
        EventsJson {
            q: e.q(),
            seed: e.seed(),
            bounds: [e.bounds().lo.clone(), e.bounds().hi.clone()],
            periodic_time: e.periodic_time(),
            events: e.events().to_vec(),
        }
    }
}

impl EventsJson {
    pub fn to_events(&self) -> Result<EventSet> {
        let [lo, hi] = self.bounds.clone();
        EventSet::new(self.q, self.events.clone(), SampleBox::new(lo, hi)?, self.periodic_time, self.seed)
    }
}

/// Relation as packed base64 (row-major, LSB-first bits).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationJson {
    pub size: usize,
    pub encoding: String,
    pub bits: String,
}

pub const PACKED_ENCODING: &str = "packed-base64";

impl From<&Relation> for RelationJson {
    fn from(r: &Relation) -> Self {
        RelationJson {
            size: r.size(),
            encoding: PACKED_ENCODING.into(),
            bits: r.to_packed(),
        }
    }
}

impl RelationJson {
    pub fn to_relation(&self) -> Result<Relation> {
        if self.encoding != PACKED_ENCODING {
            return Err(Error::Input(format!("unknown relation encoding {:?}", self.encoding)));
        }
        Relation::from_packed(self.size, &self.bits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetJson {
    pub size: usize,
    pub order: RelationJson,
}

impl From<&FinitePoset> for PosetJson {
    fn from(p: &FinitePoset) -> Self {
        PosetJson {
            size: p.size(),
            order: p.order().into(),
        }
    }
}

impl PosetJson {
    pub fn to_poset(&self) -> Result<FinitePoset> {
        let r = self.order.to_relation()?;
        Error::check_len(self.size, r.size())?;
        make_poset(r)
    }
}

/// Read a relation from `.csv` (0/1 rows) or packed JSON.
pub fn read_relation(path: &Path) -> Result<Relation> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        Relation::from_csv(&std::fs::read_to_string(path)?)
    } else {
        read_json::<RelationJson>(path)?.to_relation()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_floats_and_keys() {
        let v = serde_json::json!({"b": 0.1, "a": [1, -2, 1.0], "c": null});
        assert_eq!(
            canonical_value(&v),
            r#"{"a":[1,-2,1.0000000000000000e0],"b":1.0000000000000001e-1,"c":null}"#
        );
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE] {
            let s = canonical(&x).unwrap();
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert_eq!(serde_json::from_str::<f64>(&s).unwrap(), x);
        }
    }

    #[test]
    fn roundtrips() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.5]);
        let j: MatrixJson = (&m).into();
        assert_eq!(j.data, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.5]);
        assert_eq!(j.to_matrix().unwrap(), m);
        let c = ConvexCone::new(2, vec![vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let text = canonical(&ConeJson::from(&c)).unwrap();
        let back: ConeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_cone(1e-9).unwrap(), c);
        let r = Relation::from_pairs(3, &[(0, 1), (2, 2)]).unwrap();
        let back: RelationJson = serde_json::from_str(&canonical(&RelationJson::from(&r)).unwrap()).unwrap();
        assert_eq!(back.to_relation().unwrap(), r);
        assert!(serde_json::from_str::<ConeJson>(r#"{"dim":2,"generators":[],"extra":1}"#).is_err());
    }
}
