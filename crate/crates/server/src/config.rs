use std::collections::BTreeMap;
use std::net::{SocketAddr, ToSocketAddrs};
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerConfig {
    pub listen_address: String,
    pub snapshot_path: PathBuf,
    pub snapshot_on_mutation: bool,
}

impl ServerConfig {
    pub fn new(listen_address: impl Into<String>, snapshot_path: impl Into<PathBuf>) -> Self {
        Self {
            listen_address: listen_address.into(),
            snapshot_path: snapshot_path.into(),
            snapshot_on_mutation: true,
        }
    }

    /// Reads `key=value` lines (`#` starts a comment), then applies
    /// `BROKER_<FIELD>` environment overrides.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_sources(&text, std::env::vars())
    }

    pub fn from_sources(
        text: &str,
        env: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, ConfigError> {
        let mut values: BTreeMap<String, String> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                reason: format!("expected key=value, got {line:?}"),
            })?;
            let k = k.trim().to_ascii_lowercase();
            if !FIELDS.contains(&k.as_str()) {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    reason: format!("unknown key {k:?}"),
                });
            }
            values.insert(k, v.trim().to_string());
        }
        for (name, value) in env {
            if let Some(field) = name.strip_prefix("BROKER_") {
                let field = field.to_ascii_lowercase();
                if FIELDS.contains(&field.as_str()) {
                    values.insert(field, value);
                }
            }
        }

        let listen_address = values.remove("listen_address").ok_or(ConfigError::Invalid {
            field: "listen_address",
            reason: "missing".into(),
        })?;
        let snapshot_path = values.remove("snapshot_path").map(PathBuf::from).ok_or(
            ConfigError::Invalid {
                field: "snapshot_path",
                reason: "missing".into(),
            },
        )?;
        let snapshot_on_mutation = match values.remove("snapshot_on_mutation").as_deref() {
            None => true,
            Some("true" | "1" | "yes" | "on") => true,
            Some("false" | "0" | "no" | "off") => false,
            Some(other) => {
                return Err(ConfigError::Invalid {
                    field: "snapshot_on_mutation",
                    reason: format!("expected a boolean, got {other:?}"),
                })
            }
        };
        Ok(Self {
            listen_address,
            snapshot_path,
            snapshot_on_mutation,
        })
    }

    /// Checks the address resolves and the snapshot directory exists.
    pub fn validate(&self) -> Result<SocketAddr, ConfigError> {
        let addr = self
            .listen_address
            .to_socket_addrs()
            .ok()
            .and_then(|mut a| a.next())
            .ok_or_else(|| ConfigError::Invalid {
                field: "listen_address",
                reason: format!("{:?} is not a host:port address", self.listen_address),
            })?;
        let parent = match self.snapshot_path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        if !parent.is_dir() {
            return Err(ConfigError::Invalid {
                field: "snapshot_path",
                reason: format!("directory {} does not exist", parent.display()),
            });
        }
        Ok(addr)
    }
}

const FIELDS: [&str; 3] = ["listen_address", "snapshot_path", "snapshot_on_mutation"];
