//! Completion providers: a live HTTP client, a recording wrapper, and a
//! network-free replay store ("cassettes"). Cassettes are keyed by a
//! hash of strategy, model and normalized prompt text so cosmetic
//! whitespace changes do not invalidate recordings.

use super::prompt::PromptSpec;
use super::TranslateError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

/// Anything that can answer a prompt. The pipeline is generic over this
/// so tests can substitute stubs.
pub trait Completer: Sync {
    fn complete(&self, prompt: &PromptSpec) -> Result<String, TranslateError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderMode {
    Live,
    Replay,
    Record,
}

impl ProviderMode {
    pub fn parse(s: &str) -> Option<ProviderMode> {
        match s {
            "live" => Some(ProviderMode::Live),
            "replay" => Some(ProviderMode::Replay),
            "record" => Some(ProviderMode::Record),
            _ => None,
        }
    }
}

/// Connection settings for one model endpoint. `response_path` walks the
/// response JSON to the completion text, e.g. `choices.0.message.content`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProviderProfile {
    pub endpoint: String,
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    pub auth_env: String,
    pub response_path: String,
}

impl Default for ProviderProfile {
    fn default() -> Self {
        ProviderProfile {
            endpoint: "https://api.openai.com/v1/chat/completions".to_string(),
            model: "gpt-4".to_string(),
            temperature: 0.0,
            auth_env: "TIC_API_KEY".to_string(),
            response_path: "choices.0.message.content".to_string(),
        }
    }
}

/// Normalization applied before hashing: CRLF to LF, per-line trailing
/// whitespace removed, trailing blank lines dropped.
pub fn normalize_prompt(text: &str) -> String {
    let replaced = text.replace("\r\n", "\n");
    let mut lines: Vec<&str> = replaced.lines().map(|l| l.trim_end()).collect();
    while lines.last() == Some(&"") {
        lines.pop();
    }
    lines.join("\n")
}

pub fn cassette_key(strategy: &str, model: &str, prompt_text: &str) -> String {
    let normalized = normalize_prompt(prompt_text);
    let mut hasher = Sha256::new();
    hasher.update(strategy.as_bytes());
    hasher.update(b"\n");
    hasher.update(model.as_bytes());
    hasher.update(b"\n");
    hasher.update(normalized.as_bytes());
    hex_digest(hasher)
}

fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    hex_digest(hasher)
}

fn hex_digest(hasher: Sha256) -> String {
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cassette {
    pub key: String,
    pub strategy: String,
    pub model: String,
    pub prompt_sha256: String,
    pub response_text: String,
    pub timestamp: u64,
}

/// A directory of one-JSON-file-per-response recordings.
#[derive(Debug, Clone)]
pub struct CassetteStore {
    dir: PathBuf,
}

impl CassetteStore {
    pub fn new(dir: &Path) -> Self {
        CassetteStore {
            dir: dir.to_path_buf(),
        }
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Result<Option<Cassette>, TranslateError> {
        let path = self.path_for(key);
        match std::fs::read_to_string(&path) {
            Ok(text) => {
                let cassette: Cassette =
                    serde_json::from_str(&text).map_err(|e| TranslateError::Cassette {
                        detail: format!("{}: {e}", path.display()),
                    })?;
                Ok(Some(cassette))
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(TranslateError::Cassette {
                detail: format!("{}: {e}", path.display()),
            }),
        }
    }

    /// Write-then-rename so concurrent writers never expose a torn file.
    pub fn store(&self, cassette: &Cassette) -> Result<(), TranslateError> {
        std::fs::create_dir_all(&self.dir).map_err(|e| TranslateError::Cassette {
            detail: format!("{}: {e}", self.dir.display()),
        })?;
        let path = self.path_for(&cassette.key);
        let tmp = self.dir.join(format!(
            ".{}.tmp-{}",
            cassette.key,
            std::process::id()
        ));
        let body = serde_json::to_string_pretty(cassette).expect("cassette serializes");
        std::fs::write(&tmp, body).map_err(|e| TranslateError::Cassette {
            detail: format!("{}: {e}", tmp.display()),
        })?;
        std::fs::rename(&tmp, &path).map_err(|e| TranslateError::Cassette {
            detail: format!("{}: {e}", path.display()),
        })
    }
}

/// The standard provider: live HTTP, replay from cassettes, or live with
/// recording. Counts outbound network calls so tests can assert replay
/// purity.
pub struct CompletionProvider {
    pub profile: ProviderProfile,
    pub mode: ProviderMode,
    store: Option<CassetteStore>,
    network_calls: AtomicUsize,
}

impl CompletionProvider {
    pub fn live(profile: ProviderProfile) -> Self {
        CompletionProvider {
            profile,
            mode: ProviderMode::Live,
            store: None,
            network_calls: AtomicUsize::new(0),
        }
    }

    pub fn replay(profile: ProviderProfile, cassette_dir: &Path) -> Self {
        CompletionProvider {
            profile,
            mode: ProviderMode::Replay,
            store: Some(CassetteStore::new(cassette_dir)),
            network_calls: AtomicUsize::new(0),
        }
    }

    pub fn record(profile: ProviderProfile, cassette_dir: &Path) -> Self {
        CompletionProvider {
            profile,
            mode: ProviderMode::Record,
            store: Some(CassetteStore::new(cassette_dir)),
            network_calls: AtomicUsize::new(0),
        }
    }

    pub fn network_calls(&self) -> usize {
        self.network_calls.load(Ordering::SeqCst)
    }

    fn live_call(&self, prompt: &PromptSpec) -> Result<String, TranslateError> {
        self.network_calls.fetch_add(1, Ordering::SeqCst);
        let key = std::env::var(&self.profile.auth_env).map_err(|_| TranslateError::Provider {
            status: 0,
            body: format!("auth variable {} is not set", self.profile.auth_env),
        })?;
        let request = serde_json::json!({
            "model": self.profile.model,
            "messages": [{"role": "user", "content": prompt.rendered_text}],
            "temperature": self.profile.temperature,
        });
        let client = reqwest::blocking::Client::new();
        let response = client
            .post(&self.profile.endpoint)
            .bearer_auth(key)
            .json(&request)
            .send()
            .map_err(|e| TranslateError::Provider {
                status: 0,
                body: e.to_string(),
            })?;
        let status = response.status().as_u16();
        let body = response.text().map_err(|e| TranslateError::Provider {
            status,
            body: e.to_string(),
        })?;
        if !(200..300).contains(&status) {
            return Err(TranslateError::Provider { status, body });
        }
        let json: serde_json::Value =
            serde_json::from_str(&body).map_err(|e| TranslateError::Provider {
                status,
                body: format!("non-JSON response: {e}"),
            })?;
        extract_response_path(&json, &self.profile.response_path).ok_or_else(|| {
            TranslateError::Provider {
                status,
                body: format!("response path `{}` not found", self.profile.response_path),
            }
        })
    }
}

/// Walks a dotted path through JSON; numeric segments index arrays.
pub fn extract_response_path(json: &serde_json::Value, path: &str) -> Option<String> {
    let mut cur = json;
    for seg in path.split('.') {
        cur = match seg.parse::<usize>() {
            Ok(i) => cur.get(i)?,
            Err(_) => cur.get(seg)?,
        };
    }
    cur.as_str().map(|s| s.to_string())
}

impl Completer for CompletionProvider {
    fn complete(&self, prompt: &PromptSpec) -> Result<String, TranslateError> {
        let key = cassette_key(
            prompt.strategy.as_str(),
            &self.profile.model,
            &prompt.rendered_text,
        );
        match self.mode {
            ProviderMode::Replay => {
                let store = self.store.as_ref().expect("replay provider has a store");
                match store.load(&key)? {
                    Some(cassette) => Ok(cassette.response_text),
                    None => Err(TranslateError::CassetteMiss {
                        key,
                        strategy: prompt.strategy.as_str().to_string(),
                    }),
                }
            }
            ProviderMode::Record => {
                let response = self.live_call(prompt)?;
                let store = self.store.as_ref().expect("record provider has a store");
                store.store(&Cassette {
                    key: key.clone(),
                    strategy: prompt.strategy.as_str().to_string(),
                    model: self.profile.model.clone(),
                    prompt_sha256: sha256_hex(&normalize_prompt(&prompt.rendered_text)),
                    response_text: response.clone(),
                    timestamp: SystemTime::now()
                        .duration_since(UNIX_EPOCH)
                        .map(|d| d.as_secs())
                        .unwrap_or(0),
                })?;
                Ok(response)
            }
            ProviderMode::Live => self.live_call(prompt),
        }
    }
}

/// Builds a cassette for seeding fixture stores without a live call.
pub fn make_cassette(strategy: &str, model: &str, prompt_text: &str, response: &str) -> Cassette {
    Cassette {
        key: cassette_key(strategy, model, prompt_text),
        strategy: strategy.to_string(),
        model: model.to_string(),
        prompt_sha256: sha256_hex(&normalize_prompt(prompt_text)),
        response_text: response.to_string(),
        timestamp: 0,
    }
}
