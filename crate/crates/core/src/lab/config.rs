use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::classify::DEFAULT_CLASSIFY_TOL;
use crate::error::{Error, Result};
use crate::instance::{
    load_instance, load_variant_edits, topology_variant, validate, Disruption, SupplyChainInstance, TopologyVariant,
};
use crate::milp::SolveOptions;
use crate::model::{LatenessPolicy, Solver};
use crate::sim::{LeadTimeModel, DEFAULT_REPLICATIONS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSpec {
    pub topology: TopologyVariant,
    /// Edits applied to the base instance; none means the base instance itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edits: Option<PathBuf>,
}

fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}

fn default_tol() -> f64 {
    DEFAULT_CLASSIFY_TOL
}

/// A sweep over topology variants × disruptions × lateness policies. Read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub instance: PathBuf,
    pub variants: Vec<VariantSpec>,
    pub disruptions: Vec<Disruption>,
    pub policies: Vec<LatenessPolicy>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Seed shared by every cell, so cells see common random numbers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default)]
    pub options: SolveOptions,
    #[serde(default)]
    pub simulation: LeadTimeModel,
    /// Policy of the undisrupted row reported per variant; the first policy by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_policy: Option<LatenessPolicy>,
    #[serde(default = "default_tol")]
    pub classify_tolerance: f64,
}

impl StudyConfig {
    /// A config over in-memory data with every optional field at its default.
    pub fn new(
        instance: impl Into<PathBuf>,
        variants: Vec<VariantSpec>,
        disruptions: Vec<Disruption>,
        policies: Vec<LatenessPolicy>,
    ) -> Self {
        StudyConfig {
            instance: instance.into(),
            variants,
            disruptions,
            policies,
            replications: DEFAULT_REPLICATIONS,
            master_seed: None,
            solver: Solver::default(),
            options: SolveOptions::default(),
            simulation: LeadTimeModel::default(),
            baseline_policy: None,
            classify_tolerance: DEFAULT_CLASSIFY_TOL,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.variants.is_empty() {
            return Err(Error::Config("study needs at least one variant".into()));
        }
        if self.disruptions.is_empty() {
            return Err(Error::Config("study needs at least one disruption".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("study needs at least one policy".into()));
        }
        let names: BTreeSet<_> = self.variants.iter().map(|v| v.topology).collect();
        if names.len() != self.variants.len() {
            return Err(Error::Config("each topology variant may appear only once".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if !(self.classify_tolerance >= 0.0 && self.classify_tolerance.is_finite()) {
            return Err(Error::Config("classify_tolerance must be finite and nonnegative".into()));
        }
        for d in &self.disruptions {
            d.check()?;
        }
        for p in self.policies.iter().chain(&self.baseline_policy) {
            p.check()?;
        }
        self.options.check()?;
        self.simulation.check()
    }

    pub fn seed(&self) -> u64 {
        self.master_seed.unwrap_or(0)
    }

    pub fn baseline_policy(&self) -> LatenessPolicy {
        self.baseline_policy.unwrap_or(self.policies[0])
    }

    /// Loads the base instance and builds every variant, validating each.
    pub fn load_variants(&self) -> Result<Vec<(TopologyVariant, SupplyChainInstance)>> {
        let base = load_instance(&self.instance)?;
        self.variants
            .iter()
            .map(|spec| {
                let inst = match &spec.edits {
                    None => base.clone(),
                    Some(path) => topology_variant(&base, spec.topology, &load_variant_edits(path)?)?,
                };
                let violations = validate(&inst);
                if let Some(v) = violations.first() {
                    return Err(Error::InvalidInstance(format!(
                        "variant {}: {} violation(s), first: {v}",
                        spec.topology,
                        violations.len()
                    )));
                }
                Ok((spec.topology, inst))
            })
            .collect()
    }
}

/// Parses a study config; relative paths resolve against `base_dir`.
pub fn parse_study_config(text: &str, origin: &Path, base_dir: &Path) -> Result<StudyConfig> {
    let mut config: StudyConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|s| line_col(text, s.start))
            .unwrap_or((0, 0));
        Error::Parse {
            path: origin.to_path_buf(),
            line,
            column,
            field: String::new(),
            message: e.message().to_owned(),
        }
    })?;
    let resolve = |p: &mut PathBuf| {
        if p.is_relative() {
            *p = base_dir.join(&*p);
        }
    };
    resolve(&mut config.instance);
    for v in &mut config.variants {
        if let Some(p) = v.edits.as_mut() {
            resolve(p);
        }
    }
    config.check()?;
    Ok(config)
}

pub fn load_study_config(path: impl AsRef<Path>) -> Result<StudyConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    parse_study_config(&text, path, dir)
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}
