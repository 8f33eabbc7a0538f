//! Effective run configuration: CLI flags merged over an optional JSON
//! config file (flags win), hashed so every output can state exactly which
//! configuration produced it.

use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use levlab::weights::WeightFunction;

/// Optional values accepted from a JSON config file. Any field present here
/// can also be given as a flag; the flag wins.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub psi: Option<String>,
    pub space: Option<String>,
    pub op: Option<String>,
    pub bump: Option<String>,
    pub l: Option<f64>,
    pub eps_ladder: Option<String>,
    pub span: Option<usize>,
    pub domain: Option<String>,
    pub probes: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let raw = fs::read_to_string(p)
                    .with_context(|| format!("reading config file {}", p.display()))?;
                serde_json::from_str(&raw)
                    .with_context(|| format!("parsing config file {}", p.display()))
            }
        }
    }
}

/// The fully resolved configuration of one run. This struct (minus the
/// output directory, which must not change the identity of a run) is what
/// gets hashed into `config_hash`.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bump: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_ladder: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            bail!("tolerance must be positive, got {}", self.tol);
        }
        if let Some(l) = self.l {
            if !(l > 0.0) {
                bail!("l must be positive, got {l}");
            }
        }
        if let Some(ladder) = &self.eps_ladder {
            if ladder.iter().any(|e| !(*e > 0.0)) {
                bail!("all ladder tolerances must be positive, got {ladder:?}");
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form. The serialized field order is
    /// fixed by the struct definition, so the hash is stable.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(json.as_bytes());
        let digest = h.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parse a weight selector: `lin-log:K`, `power:A`, `sqrt`,
/// `const-plus-log:A`, or `table:FILE.csv` (CSV rows `r,psi`).
pub fn parse_psi(selector: &str) -> Result<WeightFunction> {
    let (kind, arg) = match selector.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (selector, None),
    };
    let need = |what: &str| -> Result<&str> {
        arg.with_context(|| format!("weight `{kind}` needs {what}, e.g. `{kind}:...`"))
    };
    let w = match kind {
        "lin-log" => {
            let k: u32 = need("a log power")?.parse().context("parsing log power")?;
            WeightFunction::lin_log(k)?
        }
        "power" => {
            let a: f64 = need("an exponent")?.parse().context("parsing exponent")?;
            WeightFunction::power(a)?
        }
        "sqrt" => WeightFunction::power(0.5)?,
        "const-plus-log" => {
            let a: f64 = need("a constant")?.parse().context("parsing constant")?;
            WeightFunction::const_plus_log(a)?
        }
        "table" => {
            let path = need("a CSV path")?;
            let file = fs::File::open(path)
                .with_context(|| format!("opening weight table {path}"))?;
            let mut pairs = Vec::new();
            for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
                let line = line?;
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') || t.starts_with("r,") {
                    continue;
                }
                let (a, b) = t
                    .split_once(',')
                    .with_context(|| format!("line {}: expected `r,psi`", i + 1))?;
                pairs.push((
                    a.trim().parse::<f64>().with_context(|| format!("line {}", i + 1))?,
                    b.trim().parse::<f64>().with_context(|| format!("line {}", i + 1))?,
                ));
            }
            WeightFunction::table(&pairs)?
        }
        other => bail!(
            "unknown weight `{other}`; expected lin-log:K, power:A, sqrt, const-plus-log:A, or table:FILE"
        ),
    };
    Ok(w)
}

/// Parse `lo,hi` into a pair.
pub fn parse_bump(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(',')
        .with_context(|| format!("expected `lo,hi`, got `{s}`"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

/// Parse a comma-separated list of positive tolerances.
pub fn parse_ladder(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(Into::into))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_selectors_parse() {
        assert!(parse_psi("lin-log:1").is_ok());
        assert!(parse_psi("power:0.5").is_ok());
        assert!(parse_psi("sqrt").is_ok());
        assert!(parse_psi("const-plus-log:2.0").is_ok());
        assert!(parse_psi("nope").is_err());
        assert!(parse_psi("lin-log").is_err());
    }

    #[test]
    fn hash_ignores_nothing_but_is_stable() {
        let c = RunConfig {
            command: "classify".into(),
            seed: 7,
            tol: 1e-4,
            psi: Some("lin-log:1".into()),
            space: None,
            op: None,
            bump: None,
            l: None,
            eps_ladder: None,
            span: None,
            domain: None,
            probes: None,
        };
        assert_eq!(c.hash(), c.hash());
        let mut c2 = c.clone();
        c2.seed = 8;
        assert_ne!(c.hash(), c2.hash());
    }
}
