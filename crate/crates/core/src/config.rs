//! CLI-facing configuration and structured output. All numeric I/O is exact:
//! rationals travel as "p/q" strings, never as floats. Surface configs are
//! validated on load against the lattice invariants.

use crate::error::{Error, Result};
use crate::fm::MukaiIsometry;
use crate::mukai::{BetaFrame, MukaiVector};
use crate::qpoly::LaurentPolyQ;
use crate::ratio::{parse_rat, Rat};
use crate::surface::{NSClass, SurfaceData, SurfaceKind};
use crate::wallcross::CountOracle;
use crate::walls::{CategoryWall, StabilityWall, WallGeometry};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// On-disk surface description. `gram` and `H` are integer; `beta` and
/// `eta_direction` are rational strings (or numbers).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceConfig {
    pub epsilon: i64,
    pub gram: Vec<Vec<i64>>,
    #[serde(default)]
    pub basis_names: Option<Vec<String>>,
    #[serde(rename = "H")]
    pub h: Vec<i64>,
    #[serde(default)]
    pub beta: Option<Vec<Value>>,
    #[serde(default)]
    pub eta_direction: Option<Vec<i64>>,
}

pub fn rat_from_value(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rat::from_integer(BigInt::from(i)))
            } else {
                Err(Error::Parse(format!("only integers and \"p/q\" strings are accepted, got {n}")))
            }
        }
        other => Err(Error::Parse(format!("expected rational, got {other}"))),
    }
}

pub fn rat_vec_from_values(vs: &[Value]) -> Result<Vec<Rat>> {
    vs.iter().map(rat_from_value).collect()
}

impl SurfaceConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad surface config: {e}")))
    }

    pub fn surface(&self) -> Result<SurfaceData> {
        let kind = SurfaceKind::from_epsilon(self.epsilon)?;
        let gram = self
            .gram
            .iter()
            .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let h = self.h.iter().map(|&x| BigInt::from(x)).collect();
        SurfaceData::new(kind, gram, h)
    }

    pub fn beta_class(&self, surface: &SurfaceData) -> Result<NSClass> {
        match &self.beta {
            None => Ok(NSClass::zero(surface.rho)),
            Some(vals) => {
                if vals.len() != surface.rho {
                    return Err(Error::Parse("beta has wrong length".into()));
                }
                Ok(NSClass(rat_vec_from_values(vals)?))
            }
        }
    }

    pub fn frame(&self) -> Result<BetaFrame> {
        let surface = self.surface()?;
        let beta = self.beta_class(&surface)?;
        BetaFrame::new(surface, beta)
    }

    pub fn eta_direction_class(&self, surface: &SurfaceData) -> Result<NSClass> {
        match &self.eta_direction {
            Some(v) => {
                if v.len() != surface.rho {
                    return Err(Error::Parse("eta_direction has wrong length".into()));
                }
                let xi = NSClass::from_ints(v);
                if !surface.ip(&xi, &surface.h_class()).is_zero() {
                    return Err(Error::Parse("eta_direction must be orthogonal to H".into()));
                }
                if xi.is_zero() {
                    return Err(Error::Parse("eta_direction must be nonzero".into()));
                }
                Ok(xi)
            }
            None => Err(Error::Parse(
                "this command needs eta_direction in the surface config".into(),
            )),
        }
    }
}

/// Parse a comma-separated list of rationals "r,c1...,s" into a Mukai vector.
pub fn parse_vector(text: &str, rho: usize) -> Result<MukaiVector> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != rho + 2 {
        return Err(Error::Parse(format!(
            "a Mukai vector on this surface has {} components, got {}",
            rho + 2,
            parts.len()
        )));
    }
    let coords = parts.iter().map(|p| parse_rat(p)).collect::<Result<Vec<_>>>()?;
    MukaiVector::from_coords(&coords)
}

pub fn parse_ns_class(text: &str, rho: usize) -> Result<NSClass> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != rho {
        return Err(Error::Parse(format!(
            "an NS class on this surface has {rho} components, got {}",
            parts.len()
        )));
    }
    Ok(NSClass(parts.iter().map(|p| parse_rat(p)).collect::<Result<Vec<_>>>()?))
}

pub fn rat_json(r: &Rat) -> Value {
    Value::String(r.to_string())
}

pub fn ns_json(c: &NSClass) -> Value {
    Value::Array(c.0.iter().map(rat_json).collect())
}

pub fn vector_json(v: &MukaiVector) -> Value {
    json!({
        "r": rat_json(&v.r),
        "c1": ns_json(&v.c1),
        "s": rat_json(&v.s),
    })
}

pub fn vector_from_json(v: &Value) -> Result<MukaiVector> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("vector must be an object".into()))?;
    let r = rat_from_value(obj.get("r").ok_or_else(|| Error::Parse("vector missing r".into()))?)?;
    let c1 = obj
        .get("c1")
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Parse("vector missing c1 array".into()))?;
    let s = rat_from_value(obj.get("s").ok_or_else(|| Error::Parse("vector missing s".into()))?)?;
    Ok(MukaiVector::new(r, NSClass(rat_vec_from_values(c1)?), s))
}

pub fn geometry_json(g: &WallGeometry) -> Value {
    match g {
        WallGeometry::HalfSphere { center, radius_sq } => json!({
            "type": "half_sphere",
            "center": ns_json(center),
            "radius_sq": rat_json(radius_sq),
        }),
        WallGeometry::Hyperplane { normal, offset } => json!({
            "type": "hyperplane",
            "normal": ns_json(normal),
            "offset": rat_json(offset),
        }),
        WallGeometry::Degenerate => json!({ "type": "degenerate" }),
    }
}

pub fn geometry_from_json(v: &Value) -> Result<WallGeometry> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("geometry must be an object".into()))?;
    match obj.get("type").and_then(|t| t.as_str()) {
        Some("half_sphere") => {
            let center = obj
                .get("center")
                .and_then(|x| x.as_array())
                .ok_or_else(|| Error::Parse("half_sphere missing center".into()))?;
            let radius = obj
                .get("radius_sq")
                .ok_or_else(|| Error::Parse("half_sphere missing radius_sq".into()))?;
            Ok(WallGeometry::HalfSphere {
                center: NSClass(rat_vec_from_values(center)?),
                radius_sq: rat_from_value(radius)?,
            })
        }
        Some("hyperplane") => {
            let normal = obj
                .get("normal")
                .and_then(|x| x.as_array())
                .ok_or_else(|| Error::Parse("hyperplane missing normal".into()))?;
            let offset = obj
                .get("offset")
                .ok_or_else(|| Error::Parse("hyperplane missing offset".into()))?;
            Ok(WallGeometry::Hyperplane {
                normal: NSClass(rat_vec_from_values(normal)?),
                offset: rat_from_value(offset)?,
            })
        }
        Some("degenerate") => Ok(WallGeometry::Degenerate),
        other => Err(Error::Parse(format!("unknown geometry type {other:?}"))),
    }
}

/// Chart data of a wall in a 1-dimensional slice eta = x xi0:
/// |xi0^2| (x - center_x)^2 + (H^2) t^2 = rho_sq with t^2 = s/(H^2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceChart {
    pub center_x: Rat,
    pub rho_sq: Rat,
    /// rho_sq / |xi0^2|: the squared x-radius (equals the squared circle
    /// radius when |xi0^2| = (H^2))
    pub radius_sq_x: Rat,
    /// rho_sq / (H^2): the squared t-radius
    pub radius_sq_t: Rat,
}

pub fn slice_chart(
    geometry: &WallGeometry,
    xi0: &NSClass,
    surface: &SurfaceData,
) -> Option<SliceChart> {
    match geometry {
        WallGeometry::HalfSphere { center, radius_sq } => {
            let n2_xi = -surface.ip(xi0, xi0);
            if !n2_xi.is_positive() {
                return None;
            }
            let ip_c = surface.ip(xi0, center);
            let n2_c = -surface.ip(center, center);
            let center_x = -(&ip_c / &n2_xi);
            // rho = R - n2(c) + ip_c^2/n2_xi
            let rho_sq = radius_sq - &n2_c + &ip_c * &ip_c / &n2_xi;
            let radius_sq_x = &rho_sq / &n2_xi;
            let radius_sq_t = &rho_sq / surface.h2();
            Some(SliceChart { center_x, rho_sq, radius_sq_x, radius_sq_t })
        }
        _ => None,
    }
}

pub fn category_wall_json(w: &CategoryWall, chart: Option<&SliceChart>) -> Value {
    let mut obj = json!({
        "kind": "category",
        "vector": vector_json(&w.u),
        "geometry": geometry_json(&w.geometry),
    });
    if let Some(t) = &w.threshold_half_s {
        obj["threshold_half_omega_sq"] = rat_json(t);
    }
    if let Some(c) = chart {
        obj["slice"] = json!({
            "center_x": rat_json(&c.center_x),
            "radius_sq": rat_json(&c.radius_sq_x),
            "radius_sq_t": rat_json(&c.radius_sq_t),
        });
    }
    obj
}

pub fn stability_wall_json(w: &StabilityWall) -> Value {
    let mut obj = json!({
        "kind": "stability",
        "vector": vector_json(&w.v1),
        "complement": vector_json(&w.complement),
        "ray": Value::Array(w.ray.iter().map(rat_json).collect()),
        "geometry": geometry_json(&w.geometry),
    });
    if let Some(s) = &w.s_star {
        obj["s_star"] = rat_json(s);
    }
    obj
}

/// Isometry description: {r0, beta, beta_prime, hat, nef_assertion?}.
#[derive(Debug, Clone, Deserialize)]
pub struct IsoConfig {
    pub r0: i64,
    pub beta: Vec<Value>,
    pub beta_prime: Vec<Value>,
    pub hat: Vec<Vec<Value>>,
    #[serde(default)]
    pub nef_assertion: Option<bool>,
}

impl IsoConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad isometry config: {e}")))
    }

    pub fn build(&self, surface: &SurfaceData) -> Result<MukaiIsometry> {
        let beta = NSClass(rat_vec_from_values(&self.beta)?);
        let beta_prime = NSClass(rat_vec_from_values(&self.beta_prime)?);
        let hat: Vec<Vec<Rat>> = self
            .hat
            .iter()
            .map(|row| rat_vec_from_values(row))
            .collect::<Result<Vec<_>>>()?;
        crate::fm::fm_build(
            self.r0,
            &beta,
            &beta_prime,
            &hat,
            surface,
            surface,
            self.nef_assertion.unwrap_or(true),
        )
    }
}

/// Oracle table rows: [{"vector": {...} | [coords], "poly": {"exp": "coeff"}}].
pub fn oracle_from_json(text: &str, rho: usize, symbolic: bool) -> Result<CountOracle> {
    let rows: Vec<Value> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad oracle file: {e}")))?;
    let mut oracle = if symbolic { CountOracle::symbolic() } else { CountOracle::default() };
    for row in rows {
        let obj = row.as_object().ok_or_else(|| Error::Parse("oracle row must be an object".into()))?;
        let vec_val = obj.get("vector").ok_or_else(|| Error::Parse("oracle row missing vector".into()))?;
        let v = match vec_val {
            Value::Array(coords) => {
                let cs = rat_vec_from_values(coords)?;
                if cs.len() != rho + 2 {
                    return Err(Error::Parse("oracle vector has wrong length".into()));
                }
                MukaiVector::from_coords(&cs)?
            }
            other => vector_from_json(other)?,
        };
        let poly_val = obj
            .get("poly")
            .and_then(|p| p.as_object())
            .ok_or_else(|| Error::Parse("oracle row missing poly".into()))?;
        let mut m = std::collections::BTreeMap::new();
        for (k, c) in poly_val {
            let cs = match c {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                other => return Err(Error::Parse(format!("bad coefficient {other}"))),
            };
            m.insert(k.clone(), cs);
        }
        oracle.insert(v, LaurentPolyQ::from_json_map(&m)?);
    }
    Ok(oracle)
}

pub fn poly_json(p: &LaurentPolyQ) -> Value {
    let m = p.to_json_map();
    Value::Object(m.into_iter().map(|(k, v)| (k, Value::String(v))).collect())
}
