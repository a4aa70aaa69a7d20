//! JSON encoding of quaternions, orbits, polynomials, series, contours and
//! function expressions.
//!
//! Quaternions are `[w, x, y, z]` arrays; polynomials are arrays of
//! quaternions, constant term first; expressions are objects tagged by an
//! `"op"` field. Orbit-constant expressions are closures and have no JSON
//! form. Rendering goes through `serde_json`, whose float formatting is
//! shortest-roundtrip and therefore byte-stable across runs.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::contour::{Circle, Contour};
use crate::error::{Error, Result};
use crate::expr::FuncExpr;
use crate::orbit::{Orbit, SlicePlane};
use crate::quat::Quaternion;
use crate::series::SphericalSeries;
use crate::skewpoly::SkewPoly;

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.w, self.x, self.y, self.z].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [w, x, y, z] = <[f64; 4]>::deserialize(d)?;
        Ok(Quaternion::new(w, x, y, z))
    }
}

impl Serialize for Orbit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = Map::new();
        m.insert("re".into(), json!(self.re()));
        m.insert("norm".into(), json!(self.norm()));
        Value::Object(m).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Orbit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            re: f64,
            norm: f64,
        }
        let raw = Raw::deserialize(d)?;
        Orbit::new(raw.re, raw.norm).map_err(|e| D::Error::custom(e.to_string()))
    }
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::InvalidExpr(format!("missing field `{key}`")))
}

fn as_f64(v: &Value) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::InvalidExpr("expected a number".into()))
}

pub fn quat_from_json(v: &Value) -> Result<Quaternion> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidExpr("quaternion must be [w, x, y, z]".into()))?;
    if arr.len() != 4 {
        return Err(Error::InvalidExpr("quaternion must have 4 components".into()));
    }
    Ok(Quaternion::new(
        as_f64(&arr[0])?,
        as_f64(&arr[1])?,
        as_f64(&arr[2])?,
        as_f64(&arr[3])?,
    ))
}

pub fn quat_to_json(q: Quaternion) -> Value {
    json!([q.w, q.x, q.y, q.z])
}

/// Array of quaternions; accepts `{"points": [...]}` or a bare array.
pub fn points_from_json(v: &Value) -> Result<Vec<Quaternion>> {
    let arr = match v {
        Value::Object(_) => get(v, "points")?,
        _ => v,
    };
    let arr = arr
        .as_array()
        .ok_or_else(|| Error::InvalidExpr("points must be an array".into()))?;
    arr.iter()
        .enumerate()
        .map(|(i, p)| quat_from_json(p).map_err(|e| e.at(&format!("points[{i}]"))))
        .collect()
}

pub fn orbit_from_json(v: &Value) -> Result<Orbit> {
    Orbit::new(as_f64(get(v, "re")?)?, as_f64(get(v, "norm")?)?)
}

pub fn poly_from_json(v: &Value) -> Result<SkewPoly> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidExpr("polynomial must be an array of quaternions".into()))?;
    let coeffs = arr
        .iter()
        .enumerate()
        .map(|(i, c)| quat_from_json(c).map_err(|e| e.at(&format!("coeffs[{i}]"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(SkewPoly::new(coeffs))
}

pub fn poly_to_json(p: &SkewPoly) -> Result<Value> {
    if p.twist().is_some() {
        return Err(Error::TwistMismatch);
    }
    Ok(Value::Array(
        p.coeffs().iter().map(|&c| quat_to_json(c)).collect(),
    ))
}

pub fn series_from_json(v: &Value) -> Result<SphericalSeries> {
    let orbit = orbit_from_json(get(v, "orbit")?).map_err(|e| e.at("orbit"))?;
    let coeffs = get(v, "coeffs")?
        .as_array()
        .ok_or_else(|| Error::InvalidExpr("coeffs must be an array".into()))?
        .iter()
        .enumerate()
        .map(|(i, c)| quat_from_json(c).map_err(|e| e.at(&format!("coeffs[{i}]"))))
        .collect::<Result<Vec<_>>>()?;
    let radius = match v.get("radius") {
        None | Some(Value::Null) => None,
        Some(r) => Some(as_f64(r)?),
    };
    SphericalSeries::new(orbit, coeffs, radius)
}

pub fn series_to_json(s: &SphericalSeries) -> Value {
    let mut m = Map::new();
    m.insert(
        "orbit".into(),
        json!({"re": s.orbit().re(), "norm": s.orbit().norm()}),
    );
    m.insert(
        "coeffs".into(),
        Value::Array(s.coeffs().iter().map(|&c| quat_to_json(c)).collect()),
    );
    m.insert(
        "radius".into(),
        s.declared_radius().map_or(Value::Null, |r| json!(r)),
    );
    Value::Object(m)
}

pub fn plane_from_json(v: &Value) -> Result<SlicePlane> {
    SlicePlane::new(quat_from_json(v)?)
}

pub fn contour_from_json(v: &Value) -> Result<Contour> {
    let plane = match v.get("slice") {
        None | Some(Value::Null) => SlicePlane::default(),
        Some(s) => plane_from_json(s).map_err(|e| e.at("slice"))?,
    };
    let circles = get(v, "circles")?
        .as_array()
        .ok_or_else(|| Error::InvalidExpr("circles must be an array".into()))?
        .iter()
        .enumerate()
        .map(|(i, c)| -> Result<Circle> {
            let orientation = match c.get("orientation") {
                None | Some(Value::Null) => 1,
                Some(o) => o
                    .as_i64()
                    .ok_or_else(|| Error::InvalidExpr("orientation must be 1 or -1".into()))?
                    as i32,
            };
            Ok(Circle {
                center_x: as_f64(get(c, "x")?).map_err(|e| e.at(&format!("circles[{i}]")))?,
                center_y: as_f64(get(c, "y")?).map_err(|e| e.at(&format!("circles[{i}]")))?,
                radius: as_f64(get(c, "radius")?).map_err(|e| e.at(&format!("circles[{i}]")))?,
                orientation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let nodes = match v.get("nodes") {
        None | Some(Value::Null) => 2048,
        Some(n) => n
            .as_u64()
            .ok_or_else(|| Error::InvalidExpr("nodes must be a positive integer".into()))?
            as usize,
    };
    Contour::new(plane, circles, nodes)
}

pub fn contour_to_json(c: &Contour) -> Value {
    let mut m = Map::new();
    m.insert("slice".into(), quat_to_json(c.plane.unit()));
    m.insert(
        "circles".into(),
        Value::Array(
            c.circles
                .iter()
                .map(|ci| {
                    json!({
                        "x": ci.center_x,
                        "y": ci.center_y,
                        "radius": ci.radius,
                        "orientation": ci.orientation,
                    })
                })
                .collect(),
        ),
    );
    m.insert("nodes".into(), json!(c.nodes));
    Value::Object(m)
}

/// Expression from a tagged JSON object; see the schema reference for the
/// full list of ops.
pub fn expr_from_json(v: &Value) -> Result<FuncExpr> {
    let op = get(v, "op")?
        .as_str()
        .ok_or_else(|| Error::InvalidExpr("`op` must be a string".into()))?;
    match op {
        "const" => Ok(FuncExpr::constant(
            quat_from_json(get(v, "value")?).map_err(|e| e.at("const"))?,
        )),
        "id" => Ok(FuncExpr::identity()),
        "conj" => Ok(FuncExpr::Conjugation),
        "poly" => FuncExpr::poly(
            poly_from_json(get(v, "coeffs")?).map_err(|e| e.at("poly"))?,
        ),
        "series" => Ok(FuncExpr::series(
            series_from_json(v).map_err(|e| e.at("series"))?,
        )),
        "sum" => {
            let terms = get(v, "terms")?
                .as_array()
                .ok_or_else(|| Error::InvalidExpr("terms must be an array".into()))?
                .iter()
                .enumerate()
                .map(|(i, t)| expr_from_json(t).map_err(|e| e.at(&format!("terms[{i}]"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(FuncExpr::sum(terms))
        }
        "scale" => Ok(FuncExpr::scale(
            quat_from_json(get(v, "factor")?).map_err(|e| e.at("scale"))?,
            expr_from_json(get(v, "inner")?).map_err(|e| e.at("scale"))?,
        )),
        "skewprod" | "rskewprod" => {
            let left = expr_from_json(get(v, "left")?).map_err(|e| e.at(op))?;
            let right = expr_from_json(get(v, "right")?).map_err(|e| e.at(op))?;
            Ok(if op == "skewprod" {
                FuncExpr::skew_prod(left, right)
            } else {
                FuncExpr::right_skew_prod(left, right)
            })
        }
        "skewinv_linear" => Ok(FuncExpr::skew_inv_linear(
            quat_from_json(get(v, "point")?).map_err(|e| e.at(op))?,
        )),
        "rskewinv_linear" => Ok(FuncExpr::right_skew_inv_linear(
            quat_from_json(get(v, "point")?).map_err(|e| e.at(op))?,
        )),
        "skewinv_realpoly" => {
            let coeffs = get(v, "coeffs")?
                .as_array()
                .ok_or_else(|| Error::InvalidExpr("coeffs must be an array".into()))?
                .iter()
                .map(as_f64)
                .collect::<Result<Vec<f64>>>()
                .map_err(|e| e.at(op))?;
            FuncExpr::skew_inv_real_poly(SkewPoly::from_real(&coeffs))
        }
        "skewinv_affine" => FuncExpr::skew_inv_affine(
            quat_from_json(get(v, "a")?).map_err(|e| e.at(op))?,
            quat_from_json(get(v, "b")?).map_err(|e| e.at(op))?,
        ),
        "compose" => Ok(FuncExpr::compose(
            expr_from_json(get(v, "outer")?).map_err(|e| e.at(op))?,
            expr_from_json(get(v, "inner")?).map_err(|e| e.at(op))?,
        )),
        "exp" => Ok(FuncExpr::exp(
            expr_from_json(get(v, "inner")?).map_err(|e| e.at(op))?,
        )),
        "log" => Ok(FuncExpr::log(
            expr_from_json(get(v, "inner")?).map_err(|e| e.at(op))?,
        )),
        other => Err(Error::InvalidExpr(format!("unknown op `{other}`"))),
    }
}

pub fn expr_to_json(e: &FuncExpr) -> Result<Value> {
    Ok(match e {
        FuncExpr::Const(c) => json!({"op": "const", "value": quat_to_json(*c)}),
        FuncExpr::Identity => json!({"op": "id"}),
        FuncExpr::Conjugation => json!({"op": "conj"}),
        FuncExpr::Poly(p) => json!({"op": "poly", "coeffs": poly_to_json(p)?}),
        FuncExpr::Series(s) => {
            let mut m = Map::new();
            m.insert("op".into(), json!("series"));
            if let Value::Object(body) = series_to_json(s) {
                m.extend(body);
            }
            Value::Object(m)
        }
        FuncExpr::OrbitConstant(_) => {
            return Err(Error::InvalidExpr(
                "orbit-constant closures have no JSON form".into(),
            ))
        }
        FuncExpr::Sum(terms) => json!({
            "op": "sum",
            "terms": terms.iter().map(expr_to_json).collect::<Result<Vec<_>>>()?,
        }),
        FuncExpr::Scale(c, f) => json!({
            "op": "scale",
            "factor": quat_to_json(*c),
            "inner": expr_to_json(f)?,
        }),
        FuncExpr::SkewProd(f, g) => json!({
            "op": "skewprod",
            "left": expr_to_json(f)?,
            "right": expr_to_json(g)?,
        }),
        FuncExpr::RightSkewProd(f, g) => json!({
            "op": "rskewprod",
            "left": expr_to_json(f)?,
            "right": expr_to_json(g)?,
        }),
        FuncExpr::SkewInvLinear(q) => json!({"op": "skewinv_linear", "point": quat_to_json(*q)}),
        FuncExpr::RightSkewInvLinear(q) => {
            json!({"op": "rskewinv_linear", "point": quat_to_json(*q)})
        }
        FuncExpr::SkewInvRealPoly { poly, .. } => json!({
            "op": "skewinv_realpoly",
            "coeffs": poly.coeffs().iter().map(|c| c.re()).collect::<Vec<f64>>(),
        }),
        FuncExpr::SkewInvAffine { a, b } => json!({
            "op": "skewinv_affine",
            "a": quat_to_json(*a),
            "b": quat_to_json(*b),
        }),
        FuncExpr::Compose { outer, inner } => json!({
            "op": "compose",
            "outer": expr_to_json(outer)?,
            "inner": expr_to_json(inner)?,
        }),
        FuncExpr::Exp(f) => json!({"op": "exp", "inner": expr_to_json(f)?}),
        FuncExpr::Log(f) => json!({"op": "log", "inner": expr_to_json(f)?}),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{dist, I, J, ONE};

    #[test]
    fn quaternion_round_trip() {
        let q = Quaternion::new(0.5, -1.25, 3.0, 0.1);
        let v = quat_to_json(q);
        assert_eq!(quat_from_json(&v).unwrap(), q);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, "[0.5,-1.25,3.0,0.1]");
        let back: Quaternion = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        assert!(quat_from_json(&json!([1, 2, 3])).is_err());
    }

    #[test]
    fn orbit_serde_validates() {
        let o: Orbit = serde_json::from_str(r#"{"re": 0.5, "norm": 2.0}"#).unwrap();
        assert_eq!(o.re(), 0.5);
        assert!(serde_json::from_str::<Orbit>(r#"{"re": 2.0, "norm": 0.5}"#).is_err());
    }

    #[test]
    fn expression_round_trip_preserves_values() {
        let e = FuncExpr::sum(vec![
            FuncExpr::skew_prod(
                FuncExpr::poly(SkewPoly::new(vec![J, I, ONE])).unwrap(),
                FuncExpr::skew_inv_linear(I),
            ),
            FuncExpr::scale(0.5 * J, FuncExpr::exp(FuncExpr::identity())),
            FuncExpr::skew_inv_real_poly(SkewPoly::from_real(&[1.0, 0.0, 1.0])).unwrap(),
        ]);
        let v = expr_to_json(&e).unwrap();
        let back = expr_from_json(&v).unwrap();
        for q in [ONE + J, Quaternion::new(0.3, -0.6, 1.2, 0.4)] {
            assert!(dist(e.eval(q).unwrap(), back.eval(q).unwrap()) < 1e-14);
        }
        // rendering is stable
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            serde_json::to_string(&expr_to_json(&back).unwrap()).unwrap()
        );
    }

    #[test]
    fn expression_from_literal_text() {
        let text = r#"{
            "op": "skewprod",
            "left": {"op": "poly", "coeffs": [[0, -1, 0, 0], [1, 0, 0, 0]]},
            "right": {"op": "const", "value": [0, 0, 1, 0]}
        }"#;
        let e = expr_from_json(&serde_json::from_str(text).unwrap()).unwrap();
        // ((T - i) skew-times j)(a) = (jaj^-1 - i) j = ja - ij ... frozen:
        let a = I;
        // ^j i = jij^-1 = -i, so value = (-i - i) j = -2ij = -2k
        let v = e.eval(a).unwrap();
        assert!(dist(v, Quaternion::new(0.0, 0.0, 0.0, -2.0)) < 1e-15);
    }

    #[test]
    fn unknown_op_and_missing_fields_error() {
        let err = expr_from_json(&json!({"op": "frobnicate"})).unwrap_err();
        assert!(matches!(err.kind(), Error::InvalidExpr(_)));
        let err = expr_from_json(&json!({"op": "sum"})).unwrap_err();
        assert!(matches!(err.kind(), Error::InvalidExpr(_)));
        // nested failures carry a path
        let err = expr_from_json(&json!({
            "op": "sum",
            "terms": [{"op": "poly", "coeffs": [[1, 2]]}]
        }))
        .unwrap_err();
        assert_eq!(err.path(), Some("terms[0]/poly/coeffs[0]"));
    }

    #[test]
    fn series_and_contour_round_trip() {
        let s = SphericalSeries::new(Orbit::new(0.5, 1.5).unwrap(), vec![ONE, J], Some(2.5)).unwrap();
        let back = series_from_json(&series_to_json(&s)).unwrap();
        assert_eq!(back.declared_radius(), Some(2.5));
        assert_eq!(back.coeffs(), s.coeffs());

        let c = contour_from_json(&json!({
            "circles": [{"x": 0.0, "y": 1.0, "radius": 0.5}],
        }))
        .unwrap();
        assert_eq!(c.nodes, 2048);
        assert_eq!(c.circles[0].orientation, 1);
        let v = contour_to_json(&c);
        let again = contour_from_json(&v).unwrap();
        assert_eq!(again.circles, c.circles);
        assert_eq!(again.nodes, c.nodes);
    }

    #[test]
    fn orbit_constant_has_no_json_form() {
        let oc = FuncExpr::orbit_constant("re", |re, _| Quaternion::real(re));
        assert!(expr_to_json(&oc).is_err());
    }
}
