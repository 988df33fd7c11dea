//! Declarative state descriptions and their JSON form.
//!
//! ```json
//! {"family": "cat", "params": {"alpha_re": 2.42, "r": 0.58}}
//! {"family": "custom", "params": {"components": [{"coeff": [1, 0], "center": [0, 0]}]}}
//! ```
//!
//! Families build `D(δ) [Σ_k c_k D(μ_k)] S(r e^{iϑ}) |0⟩`:
//!
//! | family               | `c_k`, `μ_k`                  | required  |
//! |----------------------|-------------------------------|-----------|
//! | `vacuum`             | `1`, `0`                      | (none)    |
//! | `displaced_squeezed` | `1`, `0`                      | `r`       |
//! | `cat`                | `(1, α/2)`, `(1, −α/2)`       | `alpha_re`|
//! | `gkp`                | `(1, −l)`, `(2, 0)`, `(1, l)` | `l_re`    |
//! | `custom`             | given                         | `components` |
//!
//! `r`, `theta`, `delta_re`, `delta_im` and the imaginary parts default to 0.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{CoherentComponent, OscillatorState, SqueezeParam};
use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    /// `[re, im]`
    pub coeff: [f64; 2],
    /// `[re, im]`
    pub center: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Vacuum,
    DisplacedSqueezed { r: f64, theta: f64, delta: Complex<f64> },
    Cat { alpha: Complex<f64>, r: f64, theta: f64, delta: Complex<f64> },
    Gkp { l: Complex<f64>, r: f64, theta: f64, delta: Complex<f64> },
    Custom { components: Vec<ComponentSpec>, r: f64, theta: f64, delta: Complex<f64> },
}

/// `(c_k, μ_k)` pairs, then `r`, `ϑ` and `δ`.
type Parts = (Vec<(Complex<f64>, Complex<f64>)>, f64, f64, Complex<f64>);

const GAUSSIAN_KEYS: [&str; 4] = ["r", "theta", "delta_re", "delta_im"];

impl StateSpec {
    pub fn family(&self) -> &'static str {
        match self {
            StateSpec::Vacuum => "vacuum",
            StateSpec::DisplacedSqueezed { .. } => "displaced_squeezed",
            StateSpec::Cat { .. } => "cat",
            StateSpec::Gkp { .. } => "gkp",
            StateSpec::Custom { .. } => "custom",
        }
    }

    /// Builds a spec from a family name and flat real parameters.
    pub fn from_params(family: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let allowed: &[&str] = match family {
            "vacuum" => &[],
            "displaced_squeezed" => &GAUSSIAN_KEYS,
            "cat" => &["r", "theta", "delta_re", "delta_im", "alpha_re", "alpha_im"],
            "gkp" => &["r", "theta", "delta_re", "delta_im", "l_re", "l_im"],
            "custom" => {
                return Err(Error::param("components", "custom states need a component list; use the JSON form"))
            }
            other => return Err(Error::UnknownFamily(other.to_string())),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::param(k.clone(), format!("not a parameter of `{family}`")));
        }
        let get = |k: &str| params.get(k).copied().unwrap_or(0.0);
        let need = |k: &str| params.get(k).copied().ok_or_else(|| Error::MissingParameter(k.to_string()));
        let delta = Complex::new(get("delta_re"), get("delta_im"));
        Ok(match family {
            "vacuum" => StateSpec::Vacuum,
            "displaced_squeezed" => StateSpec::DisplacedSqueezed { r: need("r")?, theta: get("theta"), delta },
            "cat" => StateSpec::Cat {
                alpha: Complex::new(need("alpha_re")?, get("alpha_im")),
                r: get("r"),
                theta: get("theta"),
                delta,
            },
            "gkp" => {
                StateSpec::Gkp { l: Complex::new(need("l_re")?, get("l_im")), r: get("r"), theta: get("theta"), delta }
            }
            _ => unreachable!(),
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| Error::param("state", "expected an object"))?;
        if let Some(k) = obj.keys().find(|k| *k != "family" && *k != "params") {
            return Err(Error::param(k.clone(), "unknown key in state spec"));
        }
        let family =
            obj.get("family").and_then(Value::as_str).ok_or_else(|| Error::MissingParameter("family".into()))?;
        let empty = Map::new();
        let params = match obj.get("params") {
            None => &empty,
            Some(Value::Object(m)) => m,
            Some(_) => return Err(Error::param("params", "expected an object")),
        };
        if family == "custom" {
            let mut flat = BTreeMap::new();
            let mut components = None;
            for (k, v) in params {
                if k == "components" {
                    components = Some(
                        serde_json::from_value::<Vec<ComponentSpec>>(v.clone())
                            .map_err(|e| Error::param("components", e.to_string()))?,
                    );
                } else if GAUSSIAN_KEYS.contains(&k.as_str()) {
                    flat.insert(k.clone(), number(k, v)?);
                } else {
                    return Err(Error::param(k.clone(), "not a parameter of `custom`"));
                }
            }
            let get = |k: &str| flat.get(k).copied().unwrap_or(0.0);
            return Ok(StateSpec::Custom {
                components: components.ok_or_else(|| Error::MissingParameter("components".into()))?,
                r: get("r"),
                theta: get("theta"),
                delta: Complex::new(get("delta_re"), get("delta_im")),
            });
        }
        let flat = params.iter().map(|(k, v)| Ok((k.clone(), number(k, v)?))).collect::<Result<BTreeMap<_, _>>>()?;
        Self::from_params(family, &flat)
    }

    pub fn to_json(&self) -> Value {
        let gaussian = |r: f64, theta: f64, delta: Complex<f64>| {
            let mut m = Map::new();
            m.insert("r".into(), json!(r));
            m.insert("theta".into(), json!(theta));
            m.insert("delta_re".into(), json!(delta.re));
            m.insert("delta_im".into(), json!(delta.im));
            m
        };
        let params = match self {
            StateSpec::Vacuum => Map::new(),
            StateSpec::DisplacedSqueezed { r, theta, delta } => gaussian(*r, *theta, *delta),
            StateSpec::Cat { alpha, r, theta, delta } => {
                let mut m = gaussian(*r, *theta, *delta);
                m.insert("alpha_re".into(), json!(alpha.re));
                m.insert("alpha_im".into(), json!(alpha.im));
                m
            }
            StateSpec::Gkp { l, r, theta, delta } => {
                let mut m = gaussian(*r, *theta, *delta);
                m.insert("l_re".into(), json!(l.re));
                m.insert("l_im".into(), json!(l.im));
                m
            }
            StateSpec::Custom { components, r, theta, delta } => {
                let mut m = gaussian(*r, *theta, *delta);
                m.insert("components".into(), json!(components));
                m
            }
        };
        json!({ "family": self.family(), "params": Value::Object(params) })
    }

    /// `(c_k, μ_k)` before the outer displacement, and `(r, ϑ, δ)`.
    fn parts(&self) -> Parts {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        match self {
            StateSpec::Vacuum => (vec![(one, zero)], 0.0, 0.0, zero),
            StateSpec::DisplacedSqueezed { r, theta, delta } => (vec![(one, zero)], *r, *theta, *delta),
            StateSpec::Cat { alpha, r, theta, delta } => {
                (vec![(one, alpha * 0.5), (one, -alpha * 0.5)], *r, *theta, *delta)
            }
            StateSpec::Gkp { l, r, theta, delta } => {
                (vec![(one, -l), (one * 2.0, zero), (one, *l)], *r, *theta, *delta)
            }
            StateSpec::Custom { components, r, theta, delta } => (
                components
                    .iter()
                    .map(|c| (Complex::new(c.coeff[0], c.coeff[1]), Complex::new(c.center[0], c.center[1])))
                    .collect(),
                *r,
                *theta,
                *delta,
            ),
        }
    }
}

fn number(key: &str, v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::param(key, "expected a number"))
}

impl Serialize for StateSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        StateSpec::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// Builds the canonical state `D(δ)[Σ_k c_k D(μ_k)] S(ξ)|0⟩ = S(ξ) Σ_k c'_k |γ_k⟩`.
pub fn make_state<T: Real>(spec: &StateSpec) -> Result<OscillatorState<T>> {
    let (terms, r, theta, delta) = spec.parts();
    let sq = SqueezeParam::new(T::lit(r), T::lit(theta))?;
    let to_t = |z: Complex<f64>| Complex::new(T::lit(z.re), T::lit(z.im));
    // D(μ) S |0⟩ = S D(μ') |0⟩ = S |μ'⟩
    let components =
        terms.into_iter().map(|(coeff, mu)| CoherentComponent::new(to_t(coeff), sq.transform(to_t(mu)))).collect();
    let base = OscillatorState::new(components, sq)?;
    Ok(base.displaced(to_t(delta)))
}
