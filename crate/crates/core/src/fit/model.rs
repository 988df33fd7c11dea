use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::quadrature;
use crate::phase_space::char_fn;
use crate::scalar::{Complex, Real};
use crate::states::{make_state, OscillatorState, StateSpec};

/// Named real parameters.
pub type ParamMap = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    Squeezed,
    DisplacedSqueezed,
    Cat,
    Gkp,
}

const GAUSSIAN: [&str; 5] = ["r", "theta", "delta_re", "delta_im", "b"];
const CAT: [&str; 7] = ["alpha_re", "alpha_im", "delta_re", "delta_im", "r", "theta", "b"];
const GKP: [&str; 7] = ["l_re", "l_im", "delta_re", "delta_im", "r", "theta", "b"];

/// Largest allowed `|δ|`, `|α|` and `|l|`.
pub const MAX_AMPLITUDE: f64 = 8.0;
/// `r ≤ R_MAX`.
pub const R_MAX: f64 = 3.0;
/// `|b| < B_MAX`.
pub const B_MAX: f64 = 0.5;

impl ModelFamily {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "squeezed" => Ok(Self::Squeezed),
            "displaced_squeezed" => Ok(Self::DisplacedSqueezed),
            "cat" => Ok(Self::Cat),
            "gkp" => Ok(Self::Gkp),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Squeezed => "squeezed",
            Self::DisplacedSqueezed => "displaced_squeezed",
            Self::Cat => "cat",
            Self::Gkp => "gkp",
        }
    }

    /// Every parameter of the family, bias last.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Self::Squeezed | Self::DisplacedSqueezed => &GAUSSIAN,
            Self::Cat => &CAT,
            Self::Gkp => &GKP,
        }
    }

    /// State described by `p` (missing entries read as zero; `b` is ignored).
    pub fn state_spec(self, p: &ParamMap) -> StateSpec {
        let g = |k: &str| p.get(k).copied().unwrap_or(0.0);
        let delta = Complex::new(g("delta_re"), g("delta_im"));
        let (r, theta) = (g("r"), g("theta"));
        match self {
            Self::Squeezed | Self::DisplacedSqueezed => StateSpec::DisplacedSqueezed { r, theta, delta },
            Self::Cat => StateSpec::Cat { alpha: Complex::new(g("alpha_re"), g("alpha_im")), r, theta, delta },
            Self::Gkp => StateSpec::Gkp { l: Complex::new(g("l_re"), g("l_im")), r, theta, delta },
        }
    }

    /// The pair `(re, im)` that may be negated without changing the state.
    pub(crate) fn sign_symmetric_pair(self) -> Option<(&'static str, &'static str)> {
        match self {
            Self::Cat => Some(("alpha_re", "alpha_im")),
            Self::Gkp => Some(("l_re", "l_im")),
            _ => None,
        }
    }
}

/// Box bounds `[lo, hi]` of one parameter. `theta` excludes `π/2` and `b`
/// excludes `±0.5`; see [`check_bounds`].
pub fn bounds(name: &str) -> (f64, f64) {
    match name {
        "r" => (0.0, R_MAX),
        "theta" => (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
        "b" => (-B_MAX, B_MAX),
        _ => (-MAX_AMPLITUDE, MAX_AMPLITUDE),
    }
}

/// Validates a full parameter map against the bounds.
pub fn check_bounds(family: ModelFamily, p: &ParamMap) -> Result<()> {
    for &name in family.param_names() {
        let v = p.get(name).copied().unwrap_or(0.0);
        let (lo, hi) = bounds(name);
        let open_hi = matches!(name, "theta" | "b");
        let open_lo = name == "b";
        let ok = v.is_finite() && (if open_lo { v > lo } else { v >= lo }) && (if open_hi { v < hi } else { v <= hi });
        if !ok {
            return Err(Error::param(name, format!("{v} outside [{lo}, {hi}]")));
        }
    }
    for (re, im) in [("delta_re", "delta_im"), ("alpha_re", "alpha_im"), ("l_re", "l_im")] {
        let m = p.get(re).copied().unwrap_or(0.0).hypot(p.get(im).copied().unwrap_or(0.0));
        if m > MAX_AMPLITUDE {
            return Err(Error::param(re, format!("amplitude {m} exceeds {MAX_AMPLITUDE}")));
        }
    }
    Ok(())
}

/// A family with some parameters floated and the rest held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateModel {
    pub family: ModelFamily,
    /// Floated parameters, in fit order.
    pub free: Vec<String>,
    /// Values of the remaining parameters.
    pub fixed: ParamMap,
}

impl StateModel {
    /// `values` supplies the fixed parameters; any family parameter not named
    /// in `free` or `values` is fixed at zero.
    pub fn new(family: ModelFamily, free: &[&str], values: &ParamMap) -> Result<Self> {
        let names = family.param_names();
        for f in free {
            if !names.contains(f) {
                return Err(Error::param(*f, format!("not a parameter of `{}`", family.name())));
            }
        }
        for k in values.keys() {
            if !names.contains(&k.as_str()) {
                return Err(Error::param(k.clone(), format!("not a parameter of `{}`", family.name())));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = free.iter().find(|f| !seen.insert(**f)) {
            return Err(Error::param(*dup, "listed twice as free"));
        }
        let fixed = names
            .iter()
            .filter(|n| !free.contains(n))
            .map(|n| (n.to_string(), values.get(*n).copied().unwrap_or(0.0)))
            .collect();
        Ok(Self { family, free: free.iter().map(|s| s.to_string()).collect(), fixed })
    }

    /// Floats every parameter of the family.
    pub fn all_free(family: ModelFamily) -> Self {
        Self { family, free: family.param_names().iter().map(|s| s.to_string()).collect(), fixed: ParamMap::new() }
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    /// Full parameter map from the free values (in `free` order).
    pub fn expand(&self, free_values: &[f64]) -> ParamMap {
        let mut p = self.fixed.clone();
        for (k, v) in self.free.iter().zip(free_values) {
            p.insert(k.clone(), *v);
        }
        p
    }

    /// Free values extracted from a full map (missing entries are zero).
    pub fn free_values(&self, p: &ParamMap) -> Vec<f64> {
        self.free.iter().map(|k| p.get(k).copied().unwrap_or(0.0)).collect()
    }

    /// Merges `p` over the fixed values.
    pub fn complete(&self, p: &ParamMap) -> ParamMap {
        let mut out = self.fixed.clone();
        for &name in self.family.param_names() {
            if let Some(v) = p.get(name) {
                out.insert(name.to_string(), *v);
            } else {
                out.entry(name.to_string()).or_insert(0.0);
            }
        }
        out
    }

    /// State and bias for a full parameter map.
    pub fn evaluator<T: Real>(&self, p: &ParamMap) -> Result<ModelEvaluator<T>> {
        check_bounds(self.family, p)?;
        let state = make_state(&self.family.state_spec(p))?;
        Ok(ModelEvaluator { state, b: p.get("b").copied().unwrap_or(0.0) })
    }
}

/// Prepared model: evaluate many points without rebuilding the state.
#[derive(Debug, Clone)]
pub struct ModelEvaluator<T> {
    pub state: OscillatorState<T>,
    pub b: f64,
}

impl<T: Real> ModelEvaluator<T> {
    /// `quadrature(χ(β), θ)(1 − |b|) + b`.
    pub fn predict(&self, beta: Complex<T>, theta: T) -> T {
        let b = T::lit(self.b);
        quadrature(char_fn(&self.state, beta), theta) * (T::one() - b.abs()) + b
    }
}

/// Model expectation for one setting.
pub fn model_predict<T: Real>(model: &StateModel, params: &ParamMap, beta: Complex<T>, theta: T) -> Result<T> {
    Ok(model.evaluator(&model.complete(params))?.predict(beta, theta))
}
