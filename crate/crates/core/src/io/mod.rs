//! On-disk formats: genotypes, trial logs, reports and artifact headers.

pub mod genotype;
pub mod log;
pub mod report;

use std::path::Path;

use crate::error::{Error, Result};

pub use genotype::{load_genotype, parse_genotype, save_genotype};
pub use log::{load_trial_log, load_trial_summary, save_trial_log};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub(crate) fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingInput(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

/// Write via a sibling temp file and rename so readers never see partial output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let tmp = path.with_extension("tmp-write");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Provenance stamped on every artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactHeader {
    pub config_hash: String,
    pub code_version: String,
    /// Identifier of the agent or run the artifact describes; no whitespace.
    pub agent: String,
    pub seed: Option<u64>,
}

impl ArtifactHeader {
    pub fn new(config_hash: &str, agent: &str) -> Self {
        ArtifactHeader {
            config_hash: config_hash.to_string(),
            code_version: CODE_VERSION.to_string(),
            agent: agent.split_whitespace().collect::<Vec<_>>().join("_"),
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// `# <kind> config_hash=.. code_version=.. agent=.. [seed=..]`
    pub fn line(&self, kind: &str) -> String {
        let mut s = format!(
            "# {kind} config_hash={} code_version={} agent={}",
            self.config_hash, self.code_version, self.agent
        );
        if let Some(seed) = self.seed {
            s.push_str(&format!(" seed={seed}"));
        }
        s.push('\n');
        s
    }

    pub fn parse(line: &str, kind: &str) -> std::result::Result<Self, String> {
        let rest = line
            .strip_prefix("# ")
            .and_then(|l| l.strip_prefix(kind))
            .ok_or_else(|| format!("expected `# {kind}` header"))?;
        let mut h = ArtifactHeader {
            config_hash: String::new(),
            code_version: String::new(),
            agent: String::new(),
            seed: None,
        };
        for kv in rest.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| format!("bad header field `{kv}`"))?;
            match k {
                "config_hash" => h.config_hash = v.to_string(),
                "code_version" => h.code_version = v.to_string(),
                "agent" => h.agent = v.to_string(),
                "seed" => h.seed = Some(v.parse().map_err(|_| format!("bad seed `{v}`"))?),
                _ => return Err(format!("unknown header field `{k}`")),
            }
        }
        if h.config_hash.is_empty() {
            return Err("header lacks config_hash".into());
        }
        Ok(h)
    }
}

/// Refuse inputs produced under different configurations unless `force`.
pub fn check_same_config<'a>(headers: impl IntoIterator<Item = &'a ArtifactHeader>, force: bool) -> Result<()> {
    let mut first: Option<&str> = None;
    for h in headers {
        match first {
            None => first = Some(&h.config_hash),
            Some(f) if f != h.config_hash && !force => {
                return Err(Error::MixedHash(f.to_string(), h.config_hash.clone()));
            }
            _ => {}
        }
    }
    Ok(())
}
