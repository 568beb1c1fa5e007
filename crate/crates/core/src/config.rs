//! Declarative run configuration: a flat key–value text format with dotted
//! section keys, environment-variable overrides, and the preset instances
//! used throughout the test suites.
//!
//! ```text
//! # comment
//! demand.class = sigmoidal
//! demand.s0 = 20
//! kernel.family = exponential
//! kernel.lambda = 3.9
//! welfare.form = rational_default
//! model.x_star = 0.5
//! solver.n_nodes = 201
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{DemandSpec, KernelSpec, ModelConfig, TailRule, WelfareSpec};
use crate::stochastic::McOptions;

/// Environment prefix: `HIERECO_KERNEL_LAMBDA=2` overrides `kernel.lambda`.
pub const ENV_PREFIX: &str = "HIERECO_";

const SECTIONS: [&str; 6] = ["demand", "kernel", "welfare", "model", "solver", "mc"];

/// Deterministic-solver controls.
#[derive(Debug, Clone, Copy)]
pub struct SolverSettings {
    pub n_nodes: usize,
    pub x_min: f64,
    pub grading: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            n_nodes: 201,
            x_min: 1e-4,
            grading: 2.0,
            tol: 1e-8,
            max_iter: 2000,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub solver: SolverSettings,
    pub mc: McOptions,
}

/// Parse the key–value text into a map, rejecting malformed lines and
/// duplicate keys.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: idx + 1,
            msg: format!("expected key = value, got {line:?}"),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !key.contains('.') {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("key {key:?} has no section"),
            });
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("duplicate key {key:?}"),
            });
        }
    }
    Ok(map)
}

/// Apply `PREFIX_SECTION_KEY` environment-style overrides onto a parsed map.
pub fn apply_overrides<I>(map: &mut BTreeMap<String, String>, vars: I) -> Result<()>
where
    I: Iterator<Item = (String, String)>,
{
    for (name, value) in vars {
        let Some(rest) = name.strip_prefix(ENV_PREFIX) else {
            continue;
        };
        let lower = rest.to_ascii_lowercase();
        let key = SECTIONS
            .iter()
            .find_map(|sec| {
                lower
                    .strip_prefix(sec)
                    .and_then(|r| r.strip_prefix('_'))
                    .map(|r| format!("{sec}.{r}"))
            })
            .ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("unrecognized override {name}"),
            })?;
        map.insert(key, value);
    }
    Ok(())
}

/// Build a [`RunConfig`] from parsed pairs (defaults fill the gaps).
pub fn build(map: &BTreeMap<String, String>) -> Result<RunConfig> {
    let get = |key: &str| map.get(key).map(String::as_str);
    let parse_f64 = |key: &str| -> Result<Option<f64>> {
        match get(key) {
            None => Ok(None),
            Some(v) => v.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                line: 0,
                msg: format!("{key}: not a number: {v:?}"),
            }),
        }
    };
    let parse_usize = |key: &str| -> Result<Option<usize>> {
        match get(key) {
            None => Ok(None),
            Some(v) => v.parse::<usize>().map(Some).map_err(|_| Error::Parse {
                line: 0,
                msg: format!("{key}: not a count: {v:?}"),
            }),
        }
    };

    // reject unknown keys early: typos should not silently fall back
    for key in map.keys() {
        const KNOWN: [&str; 18] = [
            "demand.class",
            "demand.s0",
            "demand.form",
            "kernel.family",
            "kernel.lambda",
            "kernel.file",
            "kernel.tail",
            "kernel.tail_rate",
            "kernel.tail_exponent",
            "welfare.form",
            "welfare.amplitude",
            "welfare.s_cut",
            "welfare.file",
            "model.x_star",
            "solver.n_nodes",
            "solver.x_min",
            "solver.grading",
            "solver.tol",
        ];
        const KNOWN_EXTRA: [&str; 3] = ["solver.max_iter", "mc.epsilon_stop", "mc.step_cap"];
        if !KNOWN.contains(&key.as_str()) && !KNOWN_EXTRA.contains(&key.as_str()) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("unknown key {key:?}"),
            });
        }
    }

    let demand = match get("demand.class").unwrap_or("linear") {
        "linear" => DemandSpec::Linear,
        "slowly_varying" => match get("demand.form").unwrap_or("log") {
            "log" => DemandSpec::SlowlyVarying,
            other => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("unknown slowly varying form {other:?}"),
                })
            }
        },
        "sigmoidal" => {
            let s0 = parse_f64("demand.s0")?.ok_or_else(|| Error::Parse {
                line: 0,
                msg: "sigmoidal demand needs demand.s0".into(),
            })?;
            DemandSpec::sigmoidal(s0)?
        }
        other => {
            return Err(Error::Parse {
                line: 0,
                msg: format!("unknown demand class {other:?}"),
            })
        }
    };

    let kernel = match get("kernel.family").unwrap_or("exponential") {
        "exponential" => {
            let lambda = parse_f64("kernel.lambda")?.ok_or_else(|| Error::Parse {
                line: 0,
                msg: "exponential kernel needs kernel.lambda".into(),
            })?;
            KernelSpec::exponential(lambda)?
        }
        "tabulated" => {
            let path = get("kernel.file").ok_or_else(|| Error::Parse {
                line: 0,
                msg: "tabulated kernel needs kernel.file".into(),
            })?;
            let (s, v) = read_two_columns(Path::new(path))?;
            let tail = match get("kernel.tail").unwrap_or("zero") {
                "zero" => TailRule::Zero,
                "exponential" => TailRule::Exponential {
                    rate: parse_f64("kernel.tail_rate")?.ok_or_else(|| Error::Parse {
                        line: 0,
                        msg: "exponential tail needs kernel.tail_rate".into(),
                    })?,
                },
                "power" => TailRule::PowerLaw {
                    exponent: parse_f64("kernel.tail_exponent")?.ok_or_else(|| Error::Parse {
                        line: 0,
                        msg: "power tail needs kernel.tail_exponent".into(),
                    })?,
                },
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("unknown tail rule {other:?}"),
                    })
                }
            };
            KernelSpec::tabulated(s, v, tail)?
        }
        other => {
            return Err(Error::Parse {
                line: 0,
                msg: format!("unknown kernel family {other:?}"),
            })
        }
    };

    let welfare = match get("welfare.form").unwrap_or("rational_default") {
        "rational_default" => WelfareSpec::rational_default(),
        "zero_beyond_cutoff" => {
            let s_cut = parse_f64("welfare.s_cut")?.ok_or_else(|| Error::Parse {
                line: 0,
                msg: "zero_beyond_cutoff welfare needs welfare.s_cut".into(),
            })?;
            WelfareSpec::ramp(parse_f64("welfare.amplitude")?, s_cut)?
        }
        "user_tabulated" => {
            let path = get("welfare.file").ok_or_else(|| Error::Parse {
                line: 0,
                msg: "tabulated welfare needs welfare.file".into(),
            })?;
            let (s, p) = read_two_columns(Path::new(path))?;
            WelfareSpec::tabulated(s, p)?
        }
        other => {
            return Err(Error::Parse {
                line: 0,
                msg: format!("unknown welfare form {other:?}"),
            })
        }
    };

    let x_star = parse_f64("model.x_star")?.unwrap_or(0.5);
    let model = ModelConfig::new(demand, kernel, welfare, x_star)?;

    let defaults = SolverSettings::default();
    let solver = SolverSettings {
        n_nodes: parse_usize("solver.n_nodes")?.unwrap_or(defaults.n_nodes),
        x_min: parse_f64("solver.x_min")?.unwrap_or(defaults.x_min),
        grading: parse_f64("solver.grading")?.unwrap_or(defaults.grading),
        tol: parse_f64("solver.tol")?.unwrap_or(defaults.tol),
        max_iter: parse_usize("solver.max_iter")?.unwrap_or(defaults.max_iter),
    };
    let mc_defaults = McOptions::default();
    let mc = McOptions {
        epsilon_stop: parse_f64("mc.epsilon_stop")?.unwrap_or(mc_defaults.epsilon_stop),
        step_cap: parse_usize("mc.step_cap")?.unwrap_or(mc_defaults.step_cap),
    };
    Ok(RunConfig { model, solver, mc })
}

/// Parse text, apply process-environment overrides, build.
pub fn from_text(text: &str) -> Result<RunConfig> {
    let mut map = parse_pairs(text)?;
    apply_overrides(&mut map, std::env::vars())?;
    build(&map)
}

/// Read a config file and resolve it against the environment.
pub fn from_file(path: &Path) -> Result<RunConfig> {
    from_text(&std::fs::read_to_string(path)?)
}

fn read_two_columns(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let (Some(x), Some(y)) = (cols.next(), cols.next()) else {
            return Err(Error::Parse {
                line: idx + 1,
                msg: "expected two numeric columns".into(),
            });
        };
        a.push(x.parse::<f64>().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("bad number {x:?}"),
        })?);
        b.push(y.parse::<f64>().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("bad number {y:?}"),
        })?);
    }
    Ok((a, b))
}

/// Reference model instances (exponential kernel, default welfare,
/// switch point 1/2).
pub mod presets {
    use super::*;

    /// Linear demand with an exponential kernel of the given rate.
    pub fn linear(lambda: f64) -> ModelConfig {
        ModelConfig::new(
            DemandSpec::Linear,
            KernelSpec::exponential(lambda).expect("λ > 0"),
            WelfareSpec::rational_default(),
            0.5,
        )
        .expect("consistent preset")
    }

    /// Slowly varying demand σ = 1 + ln s.
    pub fn slowly_varying(lambda: f64) -> ModelConfig {
        ModelConfig::new(
            DemandSpec::SlowlyVarying,
            KernelSpec::exponential(lambda).expect("λ > 0"),
            WelfareSpec::rational_default(),
            0.5,
        )
        .expect("consistent preset")
    }

    /// Saturating demand with the given ceiling.
    pub fn sigmoidal(s0: f64, lambda: f64) -> ModelConfig {
        ModelConfig::new(
            DemandSpec::sigmoidal(s0).expect("S0 > 1"),
            KernelSpec::exponential(lambda).expect("λ > 0"),
            WelfareSpec::rational_default(),
            0.5,
        )
        .expect("consistent preset")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let text = "\n# demo\ndemand.class = sigmoidal\ndemand.s0 = 20\nkernel.family = exponential\nkernel.lambda = 3.9\nwelfare.form = rational_default\nmodel.x_star = 0.5\nsolver.n_nodes = 101\n";
        let cfg = build(&parse_pairs(text).unwrap()).unwrap();
        assert_eq!(cfg.solver.n_nodes, 101);
        assert_eq!(cfg.model.x_star(), 0.5);
        assert_eq!(cfg.model.demand().class_name(), "sigmoidal");
    }

    #[test]
    fn defaults_fill_missing_sections() {
        let cfg = build(&parse_pairs("kernel.lambda = 3\n").unwrap()).unwrap();
        assert_eq!(cfg.solver.n_nodes, 201);
        assert_eq!(cfg.model.demand().class_name(), "linear");
        assert_eq!(cfg.mc.step_cap, 1_000_000);
    }

    #[test]
    fn rejects_malformed_and_unknown() {
        assert!(parse_pairs("demand.class sigmoidal\n").is_err());
        assert!(parse_pairs("nodots = 3\n").is_err());
        assert!(build(&parse_pairs("kernel.lambda = 3\nsolver.nodes = 7\n").unwrap()).is_err());
        assert!(build(&parse_pairs("kernel.lambda = abc\n").unwrap()).is_err());
    }

    #[test]
    fn duplicate_keys_rejected() {
        assert!(parse_pairs("kernel.lambda = 3\nkernel.lambda = 4\n").is_err());
    }

    #[test]
    fn overrides_apply_with_prefix() {
        let mut map = parse_pairs("kernel.lambda = 3\n").unwrap();
        apply_overrides(
            &mut map,
            vec![("HIERECO_KERNEL_LAMBDA".to_string(), "2".to_string())].into_iter(),
        )
        .unwrap();
        assert_eq!(map["kernel.lambda"], "2");
        // unrelated variables pass through, malformed prefixed ones do not
        apply_overrides(
            &mut map,
            vec![("PATH".to_string(), "x".to_string())].into_iter(),
        )
        .unwrap();
        assert!(apply_overrides(
            &mut map,
            vec![("HIERECO_NOSECTION".to_string(), "x".to_string())].into_iter()
        )
        .is_err());
    }

    #[test]
    fn presets_match_reference_exponents() {
        let rep = crate::exponents::compute(&presets::linear(3.0)).unwrap();
        assert!(rep.d.abs() < 1e-12);
        let rep = crate::exponents::compute(&presets::sigmoidal(20.0, 4.0)).unwrap();
        assert!((rep.d - 1.0 / 39.0).abs() < 1e-12);
    }
}
