//! Panel configuration: a TOML file listing parameter instances and the
//! suites to run on them.
//!
//! ```toml
//! suites = ["gevp", "biortho"]
//! output = "report.json"          # optional
//!
//! [[instance]]
//! q = "1/2"
//! A = "32"
//! B = "1/512"
//! N = 3
//!
//! [[wilson]]                      # used by the `wilson` suite
//! q = "1/2"
//! qa = "3"
//! qc = "2/7"
//! qd = "5/3"
//! qe = "7/11"
//! N = 3
//!
//! [[hahn]]                        # used by the `hahn` suite
//! alpha = "-3"
//! beta = "4"
//! N = 2
//! convergence = true              # also run the q -> 1 float sweep
//!
//! [limits]                        # optional overrides
//! qc = "2/7"
//! m = [8, 12, 16, 20]
//! h = ["1/8", "1/16", "1/32"]
//! max_n = 4
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qhahn_core::{parse_scalar, ExactScalar};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Gevp,
    Biortho,
    Algebra,
    Casimir,
    Potential,
    Wilson,
    Hahn,
    Limits,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Gevp,
        Suite::Biortho,
        Suite::Algebra,
        Suite::Casimir,
        Suite::Potential,
        Suite::Wilson,
        Suite::Hahn,
        Suite::Limits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gevp => "gevp",
            Suite::Biortho => "biortho",
            Suite::Algebra => "algebra",
            Suite::Casimir => "casimir",
            Suite::Potential => "potential",
            Suite::Wilson => "wilson",
            Suite::Hahn => "hahn",
            Suite::Limits => "limits",
        }
    }

    /// Suites that run on the `[[instance]]` entries.
    pub fn uses_instances(self) -> bool {
        !matches!(self, Suite::Wilson | Suite::Hahn)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| CliError::config(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    name: Option<String>,
    q: String,
    #[serde(rename = "A")]
    a: String,
    #[serde(rename = "B")]
    b: String,
    #[serde(rename = "N")]
    n: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWilson {
    name: Option<String>,
    q: String,
    qa: String,
    qc: String,
    qd: String,
    qe: String,
    #[serde(rename = "N")]
    n: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHahn {
    name: Option<String>,
    alpha: String,
    beta: String,
    #[serde(rename = "N")]
    n: usize,
    #[serde(default)]
    convergence: bool,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLimits {
    qc: Option<String>,
    m: Option<Vec<i64>>,
    h: Option<Vec<String>>,
    max_n: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    suites: Vec<String>,
    output: Option<PathBuf>,
    #[serde(default)]
    instance: Vec<RawInstance>,
    #[serde(default)]
    wilson: Vec<RawWilson>,
    #[serde(default)]
    hahn: Vec<RawHahn>,
    #[serde(default)]
    limits: RawLimits,
}

/// A q-Hahn instance `(q, A, B, N)`. Constructing [`qhahn_core::QParams`]
/// from it may still fail; that is reported per instance, not here.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceSpec {
    pub name: Option<String>,
    pub q: ExactScalar,
    pub a: ExactScalar,
    pub b: ExactScalar,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WilsonSpec {
    pub name: Option<String>,
    pub q: ExactScalar,
    pub qa: ExactScalar,
    pub qc: ExactScalar,
    pub qd: ExactScalar,
    pub qe: ExactScalar,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HahnSpec {
    pub name: Option<String>,
    pub alpha: ExactScalar,
    pub beta: ExactScalar,
    pub n: usize,
    pub convergence: bool,
}

/// Settings of the two limit sweeps.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitSettings {
    /// `q^c` held fixed along the `q^a -> infinity` sweep.
    pub qc: ExactScalar,
    /// Sweep points `q^a = q^{-m}`.
    pub m: Vec<i64>,
    /// Step sizes of the `q -> 1` sweep, `q = exp(-h)`.
    pub h: Vec<ExactScalar>,
    /// The `q^a` sweep is skipped above this grid size.
    pub max_n: usize,
}

impl Default for LimitSettings {
    fn default() -> Self {
        let r = |s: &str| parse_scalar(s).expect("literal");
        LimitSettings { qc: r("2/7"), m: vec![8, 12, 16, 20], h: vec![r("1/8"), r("1/16"), r("1/32")], max_n: 4 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PanelConfig {
    pub suites: Vec<Suite>,
    pub output: Option<PathBuf>,
    pub instances: Vec<InstanceSpec>,
    pub wilson: Vec<WilsonSpec>,
    pub hahn: Vec<HahnSpec>,
    pub limits: LimitSettings,
    /// Hex SHA-256 of the configuration text.
    pub hash: String,
}

fn scalar(field: &str, s: &str) -> CliResult<ExactScalar> {
    parse_scalar(s).map_err(|_| CliError::config(format!("{field} = {s:?} is not an exact rational")))
}

fn parse_suites(names: &[String]) -> CliResult<Vec<Suite>> {
    let mut out = names.iter().map(|s| s.parse()).collect::<CliResult<Vec<Suite>>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

impl PanelConfig {
    pub fn load(path: &Path) -> CliResult<PanelConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        PanelConfig::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<PanelConfig> {
        use sha2::{Digest, Sha256};
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        let instances = raw
            .instance
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let f = |k: &str| format!("instance[{i}].{k}");
                Ok(InstanceSpec {
                    name: r.name.clone(),
                    q: scalar(&f("q"), &r.q)?,
                    a: scalar(&f("A"), &r.a)?,
                    b: scalar(&f("B"), &r.b)?,
                    n: r.n,
                })
            })
            .collect::<CliResult<_>>()?;
        let wilson = raw
            .wilson
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let f = |k: &str| format!("wilson[{i}].{k}");
                Ok(WilsonSpec {
                    name: r.name.clone(),
                    q: scalar(&f("q"), &r.q)?,
                    qa: scalar(&f("qa"), &r.qa)?,
                    qc: scalar(&f("qc"), &r.qc)?,
                    qd: scalar(&f("qd"), &r.qd)?,
                    qe: scalar(&f("qe"), &r.qe)?,
                    n: r.n,
                })
            })
            .collect::<CliResult<_>>()?;
        let hahn = raw
            .hahn
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let f = |k: &str| format!("hahn[{i}].{k}");
                Ok(HahnSpec {
                    name: r.name.clone(),
                    alpha: scalar(&f("alpha"), &r.alpha)?,
                    beta: scalar(&f("beta"), &r.beta)?,
                    n: r.n,
                    convergence: r.convergence,
                })
            })
            .collect::<CliResult<_>>()?;
        let mut limits = LimitSettings::default();
        if let Some(qc) = &raw.limits.qc {
            limits.qc = scalar("limits.qc", qc)?;
        }
        if let Some(m) = &raw.limits.m {
            limits.m = m.clone();
        }
        if let Some(h) = &raw.limits.h {
            limits.h = h.iter().map(|s| scalar("limits.h", s)).collect::<CliResult<_>>()?;
        }
        if let Some(max_n) = raw.limits.max_n {
            limits.max_n = max_n;
        }
        Ok(PanelConfig {
            suites: parse_suites(&raw.suites)?,
            output: raw.output,
            instances,
            wilson,
            hahn,
            limits,
            hash: format!("{:x}", Sha256::digest(text.as_bytes())),
        })
    }

    /// The suites to run: the command-line selection if given, otherwise
    /// the file's. An empty selection, or a suite with nothing to run on,
    /// is a configuration error.
    pub fn select(&self, cli: &[String]) -> CliResult<Vec<Suite>> {
        let suites = if cli.is_empty() { self.suites.clone() } else { parse_suites(cli)? };
        if suites.is_empty() {
            return Err(CliError::config("empty suite selection"));
        }
        for s in &suites {
            let empty = match s {
                Suite::Wilson => self.wilson.is_empty(),
                Suite::Hahn => self.hahn.is_empty(),
                _ => self.instances.is_empty(),
            };
            if empty {
                let section = match s {
                    Suite::Wilson => "[[wilson]]",
                    Suite::Hahn => "[[hahn]]",
                    _ => "[[instance]]",
                };
                return Err(CliError::config(format!("suite {s} selected but no {section} entries")));
            }
        }
        Ok(suites)
    }
}
