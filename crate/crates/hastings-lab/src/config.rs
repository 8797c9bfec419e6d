//! TOML experiment configuration: a model, one or more rules, run settings.
//!
//! ```toml
//! [model]
//! kind = "discrete"
//! p = [1.0, 2.0]
//! gamma = [[0.5, 0.5], [0.5, 0.5]]
//!
//! [rule]
//! name = "m"
//! param = "const"
//! value = 3.0
//!
//! [run]
//! steps = 10000
//! seed = 42
//! ```
//!
//! Every load or build failure maps to [`Error::Config`], which the CLI
//! reports as a usage error.

use crate::acceptance::{AcceptanceRule, Role, SymmetricFn};
use crate::error::{Error, Result};
use crate::mappings;
use crate::model::{DiscreteModel, ModelOps, NormalModel, ProposalKind};
use crate::samplers::Driver;
use serde::Deserialize;
use std::path::Path;
use std::sync::Arc;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub rule: Option<RuleSpec>,
    #[serde(default)]
    pub rules: Vec<RuleSpec>,
    #[serde(default)]
    pub run: RunSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Discrete {
        p: Vec<f64>,
        gamma: Vec<Vec<f64>>,
    },
    Normal {
        sigma: f64,
        proposal: String,
        a: Option<f64>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSpec {
    pub name: String,
    pub param: Option<String>,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub discard: usize,
    /// Start state: an index for discrete models, a real for the normal one.
    /// Defaults to state 0 / the origin.
    pub start: Option<f64>,
}

fn default_steps() -> usize {
    10_000
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            steps: default_steps(),
            seed: 0,
            discard: 0,
            start: None,
        }
    }
}

/// A built model, tagged by state space.
#[derive(Clone)]
pub enum LoadedModel {
    Discrete(Arc<DiscreteModel>),
    Normal(Arc<NormalModel>),
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

impl ExperimentConfig {
    pub fn build_model(&self) -> Result<LoadedModel> {
        match &self.model {
            ModelSpec::Discrete { p, gamma } => {
                let m = DiscreteModel::new(p.clone(), gamma.clone())
                    .map_err(|e| Error::Config(format!("model: {e}")))?;
                Ok(LoadedModel::Discrete(Arc::new(m)))
            }
            ModelSpec::Normal { sigma, proposal, a } => {
                let kind = match proposal.as_str() {
                    "random_walk" => ProposalKind::RandomWalk,
                    "autoregressive" => ProposalKind::Autoregressive {
                        a: a.ok_or_else(|| {
                            Error::Config("autoregressive proposal needs `a`".into())
                        })?,
                    },
                    other => {
                        return Err(Error::Config(format!(
                            "unknown proposal `{other}` (expected random_walk or autoregressive)"
                        )))
                    }
                };
                let m = NormalModel::new(*sigma, kind)
                    .map_err(|e| Error::Config(format!("model: {e}")))?;
                Ok(LoadedModel::Normal(Arc::new(m)))
            }
        }
    }

    /// The single rule a `run` works with: `rule`, else the first of `rules`,
    /// else plain Metropolis-Hastings.
    pub fn primary_rule(&self) -> RuleSpec {
        self.rule
            .clone()
            .or_else(|| self.rules.first().cloned())
            .unwrap_or(RuleSpec {
                name: "mh".into(),
                param: None,
                value: None,
            })
    }
}

fn need_value(spec: &RuleSpec) -> Result<f64> {
    spec.value.ok_or_else(|| {
        Error::Config(format!(
            "rule `{}` with param `{}` needs `value`",
            spec.name,
            spec.param.as_deref().unwrap_or("")
        ))
    })
}

fn bad_param(spec: &RuleSpec) -> Error {
    Error::Config(format!(
        "rule `{}` does not take param `{}`",
        spec.name,
        spec.param.as_deref().unwrap_or("(none)")
    ))
}

/// Build the k dial shared by the `m` and `l` rules.
fn build_dial<Mo: ModelOps>(model: &Arc<Mo>, spec: &RuleSpec) -> Result<SymmetricFn<Mo::State>> {
    match spec.param.as_deref() {
        Some("const") => Ok(SymmetricFn::constant(Role::K, need_value(spec)?)),
        Some("barker_sum") => Ok(mappings::barker_sum_k(model)),
        Some("inv_barker_sum") => Ok(mappings::inv_barker_sum_k(model)),
        Some("scaled_h") => Ok(mappings::k_scaled_h(model, need_value(spec)?)),
        Some("geometric_mid") => Ok(mappings::k_geometric_mid(model)),
        Some("scaled_l") => Ok(mappings::k_scaled_l(model, need_value(spec)?)),
        _ => Err(bad_param(spec)),
    }
}

/// Turn a rule spec into a chain driver for a concrete model.
pub fn build_driver<Mo: ModelOps>(
    model: &Arc<Mo>,
    spec: &RuleSpec,
) -> Result<Driver<Mo::State>> {
    let wrap = |e: Error| Error::Config(format!("rule `{}`: {e}", spec.name));
    let rule = match spec.name.as_str() {
        "mh" => AcceptanceRule::mh(),
        "bk" => AcceptanceRule::bk(),
        "special" => AcceptanceRule::special(),
        "ha" => {
            let s = match spec.param.as_deref() {
                Some("one") | None => SymmetricFn::constant(Role::S, 1.0),
                Some("const") => SymmetricFn::constant(Role::S, need_value(spec)?),
                Some("mh") => mappings::s_mh(model),
                Some("special") => mappings::s_special(model),
                _ => return Err(bad_param(spec)),
            };
            AcceptanceRule::hastings(s).map_err(wrap)?
        }
        "st" => match spec.param.as_deref() {
            Some("min_product") | None => {
                AcceptanceRule::stein(mappings::min_product_delta(model)).map_err(wrap)?
            }
            _ => return Err(bad_param(spec)),
        },
        "m" => AcceptanceRule::algorithm_m(build_dial(model, spec)?).map_err(wrap)?,
        "l" => return Ok(Driver::TwoStage(build_dial(model, spec)?)),
        "mar" => {
            let param = match spec.param.as_deref() {
                Some("m_const") => SymmetricFn::constant(Role::Majorizer, need_value(spec)?),
                Some("c_const") => SymmetricFn::constant(Role::RelCoeff, need_value(spec)?),
                Some("c_barker") => mappings::c_barker(model),
                _ => return Err(bad_param(spec)),
            };
            AcceptanceRule::mar(param).map_err(wrap)?
        }
        "mir" => {
            let param = match spec.param.as_deref() {
                Some("m_const") => SymmetricFn::constant(Role::Minorizer, need_value(spec)?),
                Some("l_over_c") => mappings::minorizer_from_c(model, need_value(spec)?),
                _ => return Err(bad_param(spec)),
            };
            AcceptanceRule::mir(param).map_err(wrap)?
        }
        other => return Err(Error::Config(format!("unknown rule `{other}`"))),
    };
    Ok(Driver::Rule(rule))
}

/// The parameter a `map` starts from, when the rule has one.
pub fn build_map_source<Mo: ModelOps>(
    model: &Arc<Mo>,
    spec: &RuleSpec,
) -> Result<SymmetricFn<Mo::State>> {
    match build_driver(model, spec)? {
        Driver::TwoStage(k) => Ok(k),
        Driver::Rule(rule) => rule.param().cloned().ok_or_else(|| {
            Error::Config(format!(
                "rule `{}` carries no parameter to map from",
                spec.name
            ))
        }),
    }
}
