//! Versioned JSON input format `tailcore/1`.
//!
//! ```json
//! {"version": "tailcore/1", "shape": [2, 1],
//!  "map": {"mode": "kraus", "data": [{"from": 0, "to": 0, "ops": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}]}}
//! ```
//!
//! Modes and their `data`:
//! - `stochastic`: row-stochastic matrix (rows of numbers), acting on column vectors;
//! - `kraus` / `kraus_transpose`: list of `{from, to, ops}` with complex matrices
//!   whose entries are `[re, im]` pairs;
//! - `mix`: list of `{weight, map}` where `map` is again `{mode, data}`;
//! - `asserted`: `{"sa_matrix": [[..], ..]}` on canonical self-adjoint coordinates.

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use crate::algebra::AlgebraShape;
use crate::error::{Error, Result};
use crate::scalar::{cx, Cx, Real};
use crate::upmap::{build_map, KrausFamily, MapSpec, UPMap};

pub const SCHEMA_VERSION: &str = "tailcore/1";

fn err(pointer: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        pointer: if pointer.is_empty() { "/".into() } else { pointer.into() },
        message: message.into(),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| err(at, format!("missing field \"{key}\"")))
}

fn object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(at, "expected an object"))
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(at, "expected an array"))
}

fn number<T: Real>(v: &Value, at: &str) -> Result<T> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .map(T::lit)
        .ok_or_else(|| err(at, "expected a finite number"))
}

fn index(v: &Value, at: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| err(at, "expected a non-negative integer"))
}

fn real_matrix<T: Real>(v: &Value, at: &str) -> Result<DMatrix<T>> {
    let rows = array(v, at)?;
    let mut out: Vec<Vec<T>> = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let ra = format!("{at}/{r}");
        let vals = array(row, &ra)?;
        let vals = vals
            .iter()
            .enumerate()
            .map(|(c, x)| number(x, &format!("{ra}/{c}")))
            .collect::<Result<Vec<T>>>()?;
        if let Some(first) = out.first() {
            if first.len() != vals.len() {
                return Err(err(&ra, format!("row has {} entries, expected {}", vals.len(), first.len())));
            }
        }
        out.push(vals);
    }
    let n = out.len();
    let m = out.first().map_or(0, |r| r.len());
    Ok(DMatrix::from_fn(n, m, |i, j| out[i][j]))
}

fn complex<T: Real>(v: &Value, at: &str) -> Result<Cx<T>> {
    let pair = array(v, at)?;
    if pair.len() != 2 {
        return Err(err(at, "complex entries are [re, im] pairs"));
    }
    Ok(cx(number(&pair[0], &format!("{at}/0"))?, number(&pair[1], &format!("{at}/1"))?))
}

fn complex_matrix<T: Real>(v: &Value, at: &str) -> Result<DMatrix<Cx<T>>> {
    let rows = array(v, at)?;
    let mut out: Vec<Vec<Cx<T>>> = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let ra = format!("{at}/{r}");
        let vals = array(row, &ra)?
            .iter()
            .enumerate()
            .map(|(c, x)| complex(x, &format!("{ra}/{c}")))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = out.first() {
            if first.len() != vals.len() {
                return Err(err(&ra, format!("row has {} entries, expected {}", vals.len(), first.len())));
            }
        }
        out.push(vals);
    }
    let n = out.len();
    let m = out.first().map_or(0, |r| r.len());
    Ok(DMatrix::from_fn(n, m, |i, j| out[i][j]))
}

fn kraus<T: Real>(v: &Value, at: &str) -> Result<Vec<KrausFamily<T>>> {
    array(v, at)?
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let fa = format!("{at}/{k}");
            let o = object(f, &fa)?;
            let ops_at = format!("{fa}/ops");
            let ops = array(field(o, "ops", &fa)?, &ops_at)?
                .iter()
                .enumerate()
                .map(|(i, m)| complex_matrix(m, &format!("{ops_at}/{i}")))
                .collect::<Result<Vec<_>>>()?;
            Ok(KrausFamily {
                from: index(field(o, "from", &fa)?, &format!("{fa}/from"))?,
                to: index(field(o, "to", &fa)?, &format!("{fa}/to"))?,
                ops,
            })
        })
        .collect()
}

/// Parses a `{mode, data}` object found at JSON pointer `at`.
pub fn spec_from_value<T: Real>(v: &Value, at: &str) -> Result<MapSpec<T>> {
    let o = object(v, at)?;
    let mode_at = format!("{at}/mode");
    let data_at = format!("{at}/data");
    let mode = field(o, "mode", at)?
        .as_str()
        .ok_or_else(|| err(&mode_at, "expected a string"))?;
    let data = field(o, "data", at)?;
    match mode {
        "stochastic" => Ok(MapSpec::Stochastic(real_matrix(data, &data_at)?)),
        "kraus" => Ok(MapSpec::Kraus(kraus(data, &data_at)?)),
        "kraus_transpose" => Ok(MapSpec::KrausTranspose(kraus(data, &data_at)?)),
        "mix" => array(data, &data_at)?
            .iter()
            .enumerate()
            .map(|(k, part)| {
                let pa = format!("{data_at}/{k}");
                let po = object(part, &pa)?;
                let w = number(field(po, "weight", &pa)?, &format!("{pa}/weight"))?;
                let inner = spec_from_value(field(po, "map", &pa)?, &format!("{pa}/map"))?;
                Ok((w, inner))
            })
            .collect::<Result<Vec<_>>>()
            .map(MapSpec::Mix),
        "asserted" => {
            let d = object(data, &data_at)?;
            Ok(MapSpec::Asserted(real_matrix(field(d, "sa_matrix", &data_at)?, &format!("{data_at}/sa_matrix"))?))
        }
        other => Err(err(
            &mode_at,
            format!("unknown mode \"{other}\" (expected stochastic, kraus, kraus_transpose, mix or asserted)"),
        )),
    }
}

/// A parsed, not yet validated input document.
#[derive(Debug, Clone)]
pub struct InputDoc<T: Real> {
    pub shape: AlgebraShape,
    pub spec: MapSpec<T>,
}

pub fn parse_value<T: Real>(doc: &Value) -> Result<InputDoc<T>> {
    let o = object(doc, "")?;
    let version = field(o, "version", "")?
        .as_str()
        .ok_or_else(|| err("/version", "expected a string"))?;
    if version != SCHEMA_VERSION {
        return Err(err("/version", format!("unsupported version \"{version}\", expected \"{SCHEMA_VERSION}\"")));
    }
    let dims = array(field(o, "shape", "")?, "/shape")?
        .iter()
        .enumerate()
        .map(|(i, v)| index(v, &format!("/shape/{i}")))
        .collect::<Result<Vec<_>>>()?;
    let shape = AlgebraShape::new(dims).map_err(|e| err("/shape", e.to_string()))?;
    let spec = spec_from_value(field(o, "map", "")?, "/map")?;
    Ok(InputDoc { shape, spec })
}

pub fn parse_str<T: Real>(text: &str) -> Result<InputDoc<T>> {
    let v: Value = serde_json::from_str(text).map_err(|e| err("", format!("invalid JSON: {e}")))?;
    parse_value(&v)
}

/// Parses and builds the map.
pub fn load_map<T: Real>(text: &str) -> Result<UPMap<T>> {
    let doc = parse_str::<T>(text)?;
    build_map(&doc.shape, doc.spec)
}

fn real_matrix_value<T: Real>(m: &DMatrix<T>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| json!(m[(r, c)].to_f64_lossy())).collect()))
            .collect(),
    )
}

fn complex_matrix_value<T: Real>(m: &DMatrix<Cx<T>>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| {
                Value::Array(
                    (0..m.ncols())
                        .map(|c| json!([m[(r, c)].re.to_f64_lossy(), m[(r, c)].im.to_f64_lossy()]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn kraus_value<T: Real>(fams: &[KrausFamily<T>]) -> Value {
    Value::Array(
        fams.iter()
            .map(|f| {
                json!({
                    "from": f.from,
                    "to": f.to,
                    "ops": f.ops.iter().map(complex_matrix_value).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

/// `{mode, data}` for a spec; inverse of [`spec_from_value`].
pub fn spec_to_value<T: Real>(spec: &MapSpec<T>) -> Value {
    let data = match spec {
        MapSpec::Stochastic(p) => real_matrix_value(p),
        MapSpec::Kraus(f) | MapSpec::KrausTranspose(f) => kraus_value(f),
        MapSpec::Mix(parts) => Value::Array(
            parts
                .iter()
                .map(|(w, s)| json!({"weight": w.to_f64_lossy(), "map": spec_to_value(s)}))
                .collect(),
        ),
        MapSpec::Asserted(m) => json!({ "sa_matrix": real_matrix_value(m) }),
    };
    json!({"mode": spec.mode_name(), "data": data})
}

/// Full input document for a shape and spec.
pub fn document<T: Real>(shape: &AlgebraShape, spec: &MapSpec<T>) -> Value {
    json!({
        "version": SCHEMA_VERSION,
        "shape": shape.block_dims(),
        "map": spec_to_value(spec),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pointer_of(e: Error) -> String {
        match e {
            Error::Schema { pointer, .. } => pointer,
            other => panic!("expected a schema error, got {other}"),
        }
    }

    #[test]
    fn stochastic_round_trip() {
        let text = r#"{"version":"tailcore/1","shape":[1,1],"map":{"mode":"stochastic","data":[[0.25,0.75],[1,0]]}}"#;
        let doc = parse_str::<f64>(text).unwrap();
        assert_eq!(doc.shape.block_dims(), &[1, 1]);
        let v = document(&doc.shape, &doc.spec);
        let again = parse_value::<f64>(&v).unwrap();
        assert_eq!(again.spec, doc.spec);
    }

    #[test]
    fn kraus_and_mix_round_trip() {
        let text = r#"{"version":"tailcore/1","shape":[2],"map":{"mode":"mix","data":[
            {"weight":0.5,"map":{"mode":"kraus","data":[{"from":0,"to":0,"ops":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}]}},
            {"weight":0.5,"map":{"mode":"kraus_transpose","data":[{"from":0,"to":0,"ops":[[[[0,0],[0,1]],[[0,-1],[0,0]]]]}]}}
        ]}}"#;
        let doc = parse_str::<f64>(text).unwrap();
        let phi = build_map(&doc.shape, doc.spec.clone()).unwrap();
        assert_eq!(phi.spec().mode_name(), "mix");
        let again = parse_value::<f64>(&document(&doc.shape, &doc.spec)).unwrap();
        assert_eq!(again.spec, doc.spec);
    }

    #[test]
    fn errors_carry_pointers() {
        let bad = [
            (r#"{"shape":[1],"map":{}}"#, "/"),
            (r#"{"version":"tailcore/0","shape":[1],"map":{}}"#, "/version"),
            (r#"{"version":"tailcore/1","shape":[1,"x"],"map":{}}"#, "/shape/1"),
            (r#"{"version":"tailcore/1","shape":[0],"map":{}}"#, "/shape"),
            (r#"{"version":"tailcore/1","shape":[1],"map":{"mode":"nope","data":1}}"#, "/map/mode"),
            (r#"{"version":"tailcore/1","shape":[1,1],"map":{"mode":"stochastic","data":[[1,0],[0,"a"]]}}"#, "/map/data/1/1"),
            (r#"{"version":"tailcore/1","shape":[2],"map":{"mode":"kraus","data":[{"from":0,"to":0,"ops":[[[[1,0]],[[0]]]]}]}}"#, "/map/data/0/ops/0/1/0"),
            (r#"{"version":"tailcore/1","shape":[2],"map":{"mode":"mix","data":[{"map":{}}]}}"#, "/map/data/0"),
            (r#"{"version":"tailcore/1","shape":[2],"map":{"mode":"asserted","data":{}}}"#, "/map/data"),
            ("not json", "/"),
        ];
        for (text, want) in bad {
            assert_eq!(pointer_of(parse_str::<f64>(text).unwrap_err()), want, "{text}");
        }
    }

    #[test]
    fn build_errors_pass_through() {
        let text = r#"{"version":"tailcore/1","shape":[1,1],"map":{"mode":"stochastic","data":[[0.5,0.6],[0,1]]}}"#;
        assert!(matches!(load_map::<f64>(text), Err(Error::NotUnital { .. })));
    }
}
