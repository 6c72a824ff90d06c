//! JSON-described models that experiments can run on.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::models::{AssouadNetwork, ClassModel, DensityVariant, LocationModel};

/// A model accepted by the experiment runners.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Location(LocationModel),
    Assouad(AssouadNetwork),
}

const NETWORK_KEYS: [&str; 7] = ["family", "q", "m", "omega", "sigma", "c_phi", "variant"];

impl ModelSpec {
    pub fn as_model(&self) -> &dyn ClassModel {
        match self {
            ModelSpec::Location(m) => m,
            ModelSpec::Assouad(m) => m,
        }
    }

    /// Short name used in CSV output.
    pub fn name(&self) -> String {
        match self {
            ModelSpec::Location(m) => {
                let params: Vec<String> = self_params(m);
                format!("{}({};b={})", m.family.name(), params.join(";"), m.b)
            }
            ModelSpec::Assouad(n) => match n.variant {
                DensityVariant::ConstantDensity => format!("assouad(q={};m={};omega={})", n.q, n.m, n.omega),
                DensityVariant::TentDensity { gamma } => {
                    format!("assouad_tent(q={};m={};omega={};gamma={gamma})", n.q, n.m, n.omega)
                }
            },
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            ModelSpec::Location(m) => m.to_json(),
            ModelSpec::Assouad(n) => {
                let variant = match n.variant {
                    DensityVariant::ConstantDensity => json!("constant"),
                    DensityVariant::TentDensity { gamma } => json!({"kind": "tent", "gamma": gamma}),
                };
                json!({
                    "family": "assouad",
                    "q": n.q,
                    "m": n.m,
                    "omega": n.omega,
                    "sigma": n.sigma,
                    "c_phi": n.c_phi,
                    "variant": variant,
                })
            }
        }
    }

    /// Location descriptors as in [`LocationModel::from_json`]; networks as
    /// `{"family": "assouad", "q", "m", "omega", "sigma"?, "c_phi"?, "variant"?}`
    /// where `variant` is `"constant"` or `{"kind": "tent", "gamma": γ}`.
    pub fn from_json(value: &Value) -> Result<Self> {
        let family = value.get("family").and_then(Value::as_str).unwrap_or_default();
        if family.eq_ignore_ascii_case("assouad") {
            parse_network(value.as_object().expect("has a family key")).map(ModelSpec::Assouad)
        } else {
            LocationModel::from_json(value).map(ModelSpec::Location)
        }
    }

    /// Accepts inline JSON or a bare family name.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.starts_with('{') {
            let value: Value = serde_json::from_str(trimmed)
                .map_err(|e| Error::InvalidModel(format!("malformed model JSON: {e}")))?;
            Self::from_json(&value)
        } else {
            LocationModel::from_name(trimmed).map(ModelSpec::Location)
        }
    }
}

fn self_params(m: &LocationModel) -> Vec<String> {
    let value = m.to_json();
    value["params"]
        .as_object()
        .map(|p| p.iter().map(|(k, v)| format!("{k}={v}")).collect())
        .unwrap_or_default()
}

fn parse_network(obj: &Map<String, Value>) -> Result<AssouadNetwork> {
    let bad = |msg: String| Error::InvalidModel(msg);
    if let Some(key) = obj.keys().find(|k| !NETWORK_KEYS.contains(&k.as_str())) {
        return Err(bad(format!("unknown network key `{key}`")));
    }
    let uint = |key: &str| -> Result<u32> {
        obj.get(key)
            .and_then(Value::as_u64)
            .and_then(|v| u32::try_from(v).ok())
            .ok_or_else(|| bad(format!("network needs a non-negative integer `{key}`")))
    };
    let q = uint("q")?;
    let m = uint("m")?;
    let omega = obj
        .get("omega")
        .and_then(Value::as_f64)
        .ok_or_else(|| bad("network needs a number `omega`".into()))?;
    let sigma = match obj.get("sigma") {
        None => vec![1; m as usize],
        Some(v) => serde_json::from_value::<Vec<i8>>(v.clone()).map_err(|e| bad(format!("bad `sigma`: {e}")))?,
    };
    let c_phi = match obj.get("c_phi") {
        None => 1.0,
        Some(v) => v.as_f64().ok_or_else(|| bad("`c_phi` must be a number".into()))?,
    };
    let variant = match obj.get("variant") {
        None => DensityVariant::ConstantDensity,
        Some(Value::String(s)) if s == "constant" => DensityVariant::ConstantDensity,
        Some(Value::Object(v)) => {
            let kind = v.get("kind").and_then(Value::as_str).unwrap_or_default();
            if v.keys().any(|k| k != "kind" && k != "gamma") {
                return Err(bad("variant accepts only `kind` and `gamma`".into()));
            }
            match kind {
                "constant" => DensityVariant::ConstantDensity,
                "tent" => DensityVariant::TentDensity {
                    gamma: v
                        .get("gamma")
                        .and_then(Value::as_f64)
                        .ok_or_else(|| bad("tent variant needs `gamma`".into()))?,
                },
                other => return Err(bad(format!("unknown variant `{other}`"))),
            }
        }
        Some(other) => return Err(bad(format!("unknown variant {other}"))),
    };
    AssouadNetwork::new(q, m, omega, sigma, c_phi, variant)
}

impl Serialize for ModelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModelSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = Value::deserialize(d)?;
        Self::from_json(&value).map_err(serde::de::Error::custom)
    }
}

impl From<LocationModel> for ModelSpec {
    fn from(m: LocationModel) -> Self {
        ModelSpec::Location(m)
    }
}

impl From<AssouadNetwork> for ModelSpec {
    fn from(n: AssouadNetwork) -> Self {
        ModelSpec::Assouad(n)
    }
}
