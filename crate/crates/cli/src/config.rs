//! Config files: field descriptions and group extensions, both JSON.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use princheb::abelian::{AbelianGroup, Endomorphism};
use princheb::extension::{Extension, FiniteGroup, GAction, TwoCocycle};
use princheb::numberfield::{build_generic, build_multiquadratic, build_quadratic, FieldDescription, FieldError, GenericFieldSpec};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldConfig {
    Quadratic {
        d: i64,
        #[serde(default)]
        class_number: Option<u64>,
    },
    Multiquadratic {
        ds: Vec<i64>,
        #[serde(default)]
        class_number: Option<u64>,
    },
    Generic(GenericFieldSpec),
}

impl FieldConfig {
    pub fn build(&self) -> Result<FieldDescription, CliError> {
        let field = match self {
            FieldConfig::Quadratic { d, class_number } => {
                build_quadratic(*d).map(|k| k.with_known_class_number(*class_number)).map_err(|e| keyed("d", e))?
            }
            FieldConfig::Multiquadratic { ds, class_number } => {
                build_multiquadratic(ds).map(|k| k.with_known_class_number(*class_number)).map_err(|e| keyed("ds", e))?
            }
            FieldConfig::Generic(spec) => build_generic(spec).map_err(CliError::Field)?,
        };
        Ok(field)
    }

    pub fn overrides(&self) -> BTreeMap<u64, bool> {
        match self {
            FieldConfig::Generic(g) => g.principal_split_overrides.clone(),
            _ => BTreeMap::new(),
        }
    }
}

fn keyed(key: &str, e: FieldError) -> CliError {
    match e {
        FieldError::NotSquarefree(_) | FieldError::Input(_) => CliError::Config(format!("{key}: {e}")),
        other => CliError::Field(other),
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let where_ = if path == "." { String::new() } else { format!("{path}: ") };
        CliError::Config(format!("{where_}{}", e.inner()))
    })
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupConfig {
    Cyclic(usize),
    /// Generators as permutations of `0..n`; `p*q` maps `i` to `p[q[i]]`.
    Permutations(Vec<Vec<usize>>),
    /// Full multiplication table with identity 0.
    Table(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionConfig {
    /// One matrix per generator; row `i` is the image of the `i`-th basis vector.
    PerGenerator(Vec<Vec<Vec<i64>>>),
    /// One matrix per group element, in table order.
    PerElement(Vec<Vec<Vec<i64>>>),
}

/// `1 -> A -> E -> G -> 1` with `A` given by invariant factors.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionConfig {
    pub kernel: Vec<u64>,
    pub group: GroupConfig,
    #[serde(default)]
    pub action: Option<ActionConfig>,
    /// `c(g, h)` at position `g * |G| + h`, as coordinate vectors in `A`.
    #[serde(default)]
    pub cocycle: Option<Vec<Vec<i64>>>,
}

impl ExtensionConfig {
    pub fn build(&self) -> Result<Extension, CliError> {
        let cfg = |key: &str, e: String| CliError::Config(format!("{key}: {e}"));
        let module = AbelianGroup::new(self.kernel.clone()).map_err(|e| cfg("kernel", e.to_string()))?;
        let group = match &self.group {
            GroupConfig::Cyclic(n) if *n >= 1 => FiniteGroup::cyclic(*n),
            GroupConfig::Cyclic(_) => return Err(cfg("group.cyclic", "order must be positive".into())),
            GroupConfig::Permutations(perms) => {
                let g = FiniteGroup::from_permutations(perms).map_err(|e| cfg("group.permutations", e.to_string()))?;
                if g.generators().len() != perms.len() {
                    return Err(cfg("group.permutations", "generators must be distinct and nontrivial".into()));
                }
                g
            }
            GroupConfig::Table(t) => FiniteGroup::from_table(t.clone()).map_err(|e| cfg("group.table", e.to_string()))?,
        };
        let action = match &self.action {
            None => GAction::trivial(&group, &module),
            Some(ActionConfig::PerGenerator(ms)) => {
                if matches!(self.group, GroupConfig::Table(_)) {
                    return Err(cfg("action.per_generator", "a table group needs per_element".into()));
                }
                GAction::from_generators(&group, &module, ms).map_err(|e| cfg("action.per_generator", e.to_string()))?
            }
            Some(ActionConfig::PerElement(ms)) => {
                let maps = ms
                    .iter()
                    .map(|m| Endomorphism::from_matrix(&module, m))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| cfg("action.per_element", e.to_string()))?;
                GAction::from_maps(&group, &module, maps).map_err(|e| cfg("action.per_element", e.to_string()))?
            }
        };
        let cocycle = match &self.cocycle {
            None => TwoCocycle::zero(&group, &module),
            Some(values) => {
                if values.iter().any(|v| v.len() != module.rank()) {
                    return Err(cfg("cocycle", format!("entries must have {} coordinates", module.rank())));
                }
                let values = values.iter().map(|v| module.reduce(v)).collect();
                TwoCocycle::new(&group, &action, values).map_err(|e| cfg("cocycle", e.to_string()))?
            }
        };
        Extension::new(group, action, cocycle).map_err(|e| CliError::Config(e.to_string()))
    }
}
