//! Scenario configuration files.
//!
//! A configuration is a TOML document with one top-level table per model
//! field, plus an optional `[preset]` reference whose fields the explicit
//! tables override, an optional `[run]` table with numerical parameters,
//! and an optional `[manifest]` table written by the CLI for provenance
//! (ignored on load, so a run manifest is itself a valid configuration).
//!
//! ```toml
//! [preset]
//! name = "bounded-rect"
//! alpha = 0.1
//! sigma2 = 1e-3
//!
//! [run]
//! np = 201
//! nx = 801
//! seed = 7
//! ```
//!
//! or fully explicit:
//!
//! ```toml
//! [personality_domain]
//! min = -1.0
//! max = 1.0
//!
//! [belief_domain]
//! kind = "unbounded-line"
//!
//! [alpha]
//! kind = "constant"
//! value = 0.5
//!
//! [prejudice]
//! kind = "identity"
//!
//! [zeta]
//! kind = "product"
//! zeta1 = { kind = "constant", value = 1.0 }
//! zeta2 = { kind = "constant", value = 1.0 }
//!
//! [sigma2]
//! value = 0.01
//!
//! [rho0]
//! kind = "uniform"
//! ```

use serde::{Deserialize, Serialize};

use crate::model::{
    build_preset, BeliefDomain, InitialCondition, Influence, PresetParams, Profile, ScenarioSpec,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainCfg {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaCfg {
    pub value: f64,
}

/// Personality density choices. `uniform` resolves to the constant
/// `1 / |personality domain|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Rho0Cfg {
    Uniform,
    Constant { value: f64 },
    Table { nodes: Vec<f64>, values: Vec<f64> },
}

/// Preset reference with parameter overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetRef {
    pub name: String,
    #[serde(flatten)]
    pub params: PresetParams,
}

/// Numerical run parameters; everything optional, commands apply their own
/// defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    pub np: Option<usize>,
    pub nx: Option<usize>,
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub agents: Option<usize>,
    pub record_every: Option<usize>,
    pub p_bins: Option<usize>,
    pub x_bins: Option<usize>,
    pub snapshot_times: Option<Vec<f64>>,
    pub laplace_check: Option<Vec<f64>>,
    pub init: Option<InitialCondition>,
    pub threads: Option<usize>,
}

impl RunSettings {
    /// Field-wise `other` over `self` (used for flag > file precedence).
    pub fn overridden_by(&self, other: &RunSettings) -> RunSettings {
        macro_rules! pick {
            ($f:ident) => {
                other.$f.clone().or_else(|| self.$f.clone())
            };
        }
        RunSettings {
            np: pick!(np),
            nx: pick!(nx),
            seed: pick!(seed),
            dt: pick!(dt),
            t_final: pick!(t_final),
            tol: pick!(tol),
            max_iter: pick!(max_iter),
            agents: pick!(agents),
            record_every: pick!(record_every),
            p_bins: pick!(p_bins),
            x_bins: pick!(x_bins),
            snapshot_times: pick!(snapshot_times),
            laplace_check: pick!(laplace_check),
            init: pick!(init),
            threads: pick!(threads),
        }
    }
}

/// Provenance block written into run manifests.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ManifestMeta {
    pub command: String,
    pub tool_version: String,
    pub unix_time_s: u64,
    pub scenario_source: String,
    pub output_dir: String,
}

/// The parsed configuration document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub personality_domain: Option<DomainCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub belief_domain: Option<BeliefDomain>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Profile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prejudice: Option<Profile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Influence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<SigmaCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho0: Option<Rho0Cfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSettings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<ManifestMeta>,
}

/// Parses a configuration document.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

/// Resolves and validates a configuration into a [`ScenarioSpec`].
///
/// Explicit tables override preset fields; without a preset every model
/// field must be supplied.
pub fn build_scenario(cfg: &ConfigFile) -> Result<ScenarioSpec> {
    let mut spec = match &cfg.preset {
        Some(preset) => build_preset(&preset.name, &preset.params)?,
        None => {
            let missing: Vec<&str> = [
                ("personality_domain", cfg.personality_domain.is_none()),
                ("belief_domain", cfg.belief_domain.is_none()),
                ("alpha", cfg.alpha.is_none()),
                ("prejudice", cfg.prejudice.is_none()),
                ("zeta", cfg.zeta.is_none()),
                ("sigma2", cfg.sigma2.is_none()),
                ("rho0", cfg.rho0.is_none()),
            ]
            .iter()
            .filter(|(_, m)| *m)
            .map(|(n, _)| *n)
            .collect();
            if !missing.is_empty() {
                return Err(Error::Config(format!(
                    "no preset named and missing tables: {}",
                    missing.join(", ")
                )));
            }
            // placeholder, every field is overridden below
            ScenarioSpec {
                personality_domain: (-1.0, 1.0),
                belief_domain: BeliefDomain::UnboundedLine,
                alpha: Profile::Constant { value: 0.5 },
                prejudice: Profile::Identity,
                zeta: Influence::Zero,
                sigma2: 1.0,
                rho0: Profile::Constant { value: 0.5 },
            }
        }
    };

    if let Some(d) = cfg.personality_domain {
        spec.personality_domain = (d.min, d.max);
    }
    if let Some(b) = cfg.belief_domain {
        spec.belief_domain = b;
    }
    if let Some(a) = &cfg.alpha {
        spec.alpha = a.clone();
    }
    if let Some(u) = &cfg.prejudice {
        spec.prejudice = u.clone();
    }
    if let Some(z) = &cfg.zeta {
        spec.zeta = z.clone();
    }
    if let Some(s) = cfg.sigma2 {
        spec.sigma2 = s.value;
    }
    if let Some(r) = &cfg.rho0 {
        let (lo, hi) = spec.personality_domain;
        let width = hi - lo;
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::DomainEmpty(format!(
                "personality domain [{lo}, {hi}]"
            )));
        }
        spec.rho0 = match r {
            Rho0Cfg::Uniform => Profile::Constant { value: 1.0 / width },
            Rho0Cfg::Constant { value } => Profile::Constant { value: *value },
            Rho0Cfg::Table { nodes, values } => Profile::Table {
                nodes: nodes.clone(),
                values: values.clone(),
            },
        };
    }
    spec.validate()?;
    Ok(spec)
}

/// Parse + resolve + validate in one step; the entry point fuzzed against
/// arbitrary documents.
pub fn scenario_from_toml(text: &str) -> Result<ScenarioSpec> {
    build_scenario(&parse_config(text)?)
}

/// Serializes a fully resolved configuration (the run manifest body).
pub fn to_toml(cfg: &ConfigFile) -> Result<String> {
    toml::to_string_pretty(cfg).map_err(|e| Error::Config(e.to_string()))
}

/// Captures a resolved scenario back into configuration tables, so a
/// manifest reproduces the run without consulting the preset registry.
pub fn snapshot_scenario(spec: &ScenarioSpec) -> ConfigFile {
    ConfigFile {
        preset: None,
        personality_domain: Some(DomainCfg {
            min: spec.personality_domain.0,
            max: spec.personality_domain.1,
        }),
        belief_domain: Some(spec.belief_domain),
        alpha: Some(spec.alpha.clone()),
        prejudice: Some(spec.prejudice.clone()),
        zeta: Some(spec.zeta.clone()),
        sigma2: Some(SigmaCfg { value: spec.sigma2 }),
        rho0: Some(match &spec.rho0 {
            Profile::Table { nodes, values } => Rho0Cfg::Table {
                nodes: nodes.clone(),
                values: values.clone(),
            },
            Profile::Constant { value } => Rho0Cfg::Constant { value: *value },
            // Configurations only produce the kinds above; anything more
            // exotic (possible for directly constructed specs) is captured
            // by tabulating it densely.
            other => {
                let (lo, hi) = spec.personality_domain;
                let nodes = crate::numerics::linspace(lo, hi, 1001);
                let values = nodes.iter().map(|&p| other.eval(p)).collect();
                Rho0Cfg::Table { nodes, values }
            }
        }),
        run: None,
        manifest: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_reference_with_overrides() {
        let spec = scenario_from_toml(
            r#"
            [preset]
            name = "homogeneous"
            alpha = 0.5
            sigma2 = 0.01
            "#,
        )
        .unwrap();
        assert_eq!(spec.alpha(0.2), 0.5);
        assert_eq!(spec.sigma2, 0.01);
        assert_eq!(spec.zeta(0.3, 0.1, -0.5), 1.0);
        assert_eq!(spec.rho0(0.0), 0.5);
    }

    #[test]
    fn explicit_tables_build_a_scenario() {
        let spec = scenario_from_toml(
            r#"
            [personality_domain]
            min = -1.0
            max = 1.0

            [belief_domain]
            kind = "compact"
            min = -2.0
            max = 2.0

            [alpha]
            kind = "constant"
            value = 0.3

            [prejudice]
            kind = "identity"

            [zeta]
            kind = "bounded-rect"
            amplitude = 1.0
            support = 0.3333333333333333
            sharpness = 64

            [sigma2]
            value = 0.001

            [rho0]
            kind = "uniform"
            "#,
        )
        .unwrap();
        assert_eq!(spec.alpha(0.0), 0.3);
        assert!(matches!(spec.belief_domain, BeliefDomain::Compact { .. }));
        assert_eq!(spec.rho0(0.5), 0.5);
    }

    #[test]
    fn tables_override_preset_fields() {
        let spec = scenario_from_toml(
            r#"
            [preset]
            name = "homogeneous"

            [sigma2]
            value = 0.04
            "#,
        )
        .unwrap();
        assert_eq!(spec.sigma2, 0.04);
    }

    #[test]
    fn missing_tables_are_reported() {
        let err = scenario_from_toml("[alpha]\nkind = \"constant\"\nvalue = 0.5\n").unwrap_err();
        match err {
            Error::Config(msg) => {
                assert!(msg.contains("sigma2"), "{msg}");
                assert!(msg.contains("zeta"), "{msg}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn invalid_scenarios_are_rejected_not_panicking() {
        for bad in [
            "[preset]\nname = \"nope\"\n",
            "[preset]\nname = \"homogeneous\"\nalpha = 2.0\n",
            "[preset]\nname = \"homogeneous\"\nsigma2 = -1.0\n",
            "not toml at all [",
            "[preset]\nname = \"homogeneous\"\n[rho0]\nkind = \"constant\"\nvalue = 0.1\n",
            "[preset]\nname = \"homogeneous\"\n[alpha]\nkind = \"table\"\nnodes = [0.0]\nvalues = [0.5]\n",
        ] {
            assert!(scenario_from_toml(bad).is_err(), "accepted: {bad}");
        }
    }

    #[test]
    fn snapshot_resolves_to_the_same_scenario() {
        let spec = scenario_from_toml(
            "[preset]\nname = \"bounded-rect\"\nalpha = 0.3\nsigma2 = 0.001\n",
        )
        .unwrap();
        let cfg = snapshot_scenario(&spec);
        let text = to_toml(&cfg).unwrap();
        let spec2 = scenario_from_toml(&text).unwrap();
        assert_eq!(spec, spec2);
    }

    #[test]
    fn run_settings_precedence() {
        let file = RunSettings {
            np: Some(101),
            seed: Some(1),
            ..Default::default()
        };
        let flags = RunSettings {
            seed: Some(9),
            ..Default::default()
        };
        let merged = file.overridden_by(&flags);
        assert_eq!(merged.np, Some(101));
        assert_eq!(merged.seed, Some(9));
    }
}
