use std::path::Path;

use serde_json::{json, Map, Value};

use super::{Decision, Instance};
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::imagesets::ImageSet;
use crate::scalar::{json_point, Scalar};

fn field<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Parse(format!("{path}: missing field `{key}`")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{path}: expected an array")))
}

fn vector<T: Scalar>(v: &Value, path: &str) -> Result<Vec<T>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| T::from_json(x).map_err(|e| Error::Parse(format!("{path}[{i}]: {e}"))))
        .collect()
}

fn matrix<T: Scalar>(v: &Value, path: &str) -> Result<Vec<Vec<T>>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, row)| vector(row, &format!("{path}[{i}]")))
        .collect()
}

impl<T: Scalar> Instance<T> {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self.cone.rows().iter().map(|r| json_point(r)).collect();
        let decisions: Vec<Value> = self
            .decisions
            .iter()
            .map(|d| json!({ "label": d.label, "x": json_point(&d.x) }))
            .collect();
        let images: Vec<Value> = self
            .images
            .iter()
            .map(|img| {
                json!({
                    "type": img.kind_name(),
                    "points": img.points().iter().map(|p| json_point(p)).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "cone": { "rows": rows, "e": json_point(self.cone.e()) },
            "decisions": decisions,
            "images": images,
            "metadata": Value::Object(self.metadata.clone()),
        })
    }

    /// Parses and validates. Errors name the offending field path.
    pub fn from_json_value(v: &Value) -> Result<Self> {
        let cone_v = field(v, "cone", "$")?;
        let rows = matrix(field(cone_v, "rows", "cone")?, "cone.rows")?;
        let e = vector(field(cone_v, "e", "cone")?, "cone.e")?;
        let cone = Cone::new(rows, e)?;

        let decisions = array(field(v, "decisions", "$")?, "decisions")?
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let path = format!("decisions[{k}]");
                let label = field(d, "label", &path)?
                    .as_str()
                    .ok_or_else(|| Error::Parse(format!("{path}.label: expected a string")))?
                    .to_string();
                let x = vector(field(d, "x", &path)?, &format!("{path}.x"))?;
                Ok(Decision { label, x })
            })
            .collect::<Result<Vec<_>>>()?;

        let images = array(field(v, "images", "$")?, "images")?
            .iter()
            .enumerate()
            .map(|(k, img)| {
                let path = format!("images[{k}]");
                let points = matrix(field(img, "points", &path)?, &format!("{path}.points"))?;
                match field(img, "type", &path)?.as_str() {
                    Some("finite") => Ok(ImageSet::Finite(points)),
                    Some("polytope") => Ok(ImageSet::Polytope(points)),
                    _ => Err(Error::Parse(format!(
                        "{path}.type: expected \"finite\" or \"polytope\""
                    ))),
                }
            })
            .collect::<Result<Vec<_>>>()?;

        let metadata = match v.get("metadata") {
            None | Some(Value::Null) => Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => return Err(Error::Parse("metadata: expected an object".into())),
        };
        Self::new(cone, decisions, images, metadata)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| {
            Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        Self::from_json_value(&v)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(&self.to_json()).expect("json values serialize");
        std::fs::write(path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{make_example, ExampleParams};
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn round_trip_exact_and_float() {
        for name in ["mfdvp", "mfdvp_polytope", "cantor", "t_one"] {
            let inst = make_example::<Rational>(name, &ExampleParams::default()).unwrap();
            let back = Instance::<Rational>::from_json_value(&inst.to_json()).unwrap();
            assert_eq!(back, inst, "{name}");
            let f = make_example::<f64>(name, &ExampleParams::default()).unwrap();
            let text = serde_json::to_string(&f.to_json()).unwrap();
            assert_eq!(Instance::<f64>::from_json_str(&text).unwrap(), f, "{name}");
        }
    }

    #[test]
    fn file_round_trip() {
        let inst = make_example::<Rational>("mfdvp", &ExampleParams::default()).unwrap();
        let dir = std::env::temp_dir().join(format!("setopt-json-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("i.json");
        inst.save(&path).unwrap();
        assert_eq!(Instance::<Rational>::load(&path).unwrap(), inst);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = r#"{"cone":{"rows":[[1,0],[0,1]],"e":[1,1]},
            "decisions":[{"label":"a","x":[0]}],
            "images":[{"type":"finite","points":[[0,"zz"]]}]}"#;
        let err = Instance::<f64>::from_json_str(bad).unwrap_err().to_string();
        assert!(err.contains("images[0].points[0][1]"), "{err}");

        let syntax = "{\n\"cone\": [,]}";
        let err = Instance::<f64>::from_json_str(syntax).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");

        let dup = r#"{"cone":{"rows":[[1,0],[0,1]],"e":[1,1]},
            "decisions":[{"label":"a","x":[0]},{"label":"a","x":[1]}],
            "images":[{"type":"finite","points":[[0,0]]},{"type":"finite","points":[[0,0]]}]}"#;
        assert_eq!(
            Instance::<f64>::from_json_str(dup).unwrap_err(),
            Error::DuplicateLabel("a".into())
        );

        let wide = r#"{"cone":{"rows":[[1,0],[0,1]],"e":[1,1]},
            "decisions":[{"label":"a","x":[0]}],
            "images":[{"type":"finite","points":[[0,0,0]]}]}"#;
        assert!(matches!(
            Instance::<f64>::from_json_str(wide).unwrap_err(),
            Error::DimMismatch { .. }
        ));
    }

    #[test]
    fn rational_mode_accepts_ratio_strings() {
        let text = r#"{"cone":{"rows":[[1,0],[0,1]],"e":[1,1]},
            "decisions":[{"label":"a","x":["1/3"]}],
            "images":[{"type":"finite","points":[["1/2","-3"]]}]}"#;
        let inst = Instance::<Rational>::from_json_str(text).unwrap();
        assert_eq!(inst.decisions[0].x[0], Rational::from_ratio(1, 3));
    }
}
