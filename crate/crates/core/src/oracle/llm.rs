//! Chat-completion judge client.
//!
//! Speaks the common `/chat/completions` JSON shape against any compatible
//! endpoint. The API key comes from an environment variable only; the config
//! file names which variable. Verdicts are parsed by case-insensitive token
//! search with INCONSISTENT checked before CONSISTENT, since the latter is a
//! substring of the former.

use super::{Oracle, OracleError};
use crate::factlang::{Fact, Verdict};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Duration;

/// Subset-consistency prompt template, with `{bg}` and `{facts_block}` slots.
pub const SUBSET_CONSISTENCY_TEMPLATE: &str =
    include_str!("../../prompts/subset_consistency.txt");
/// Direct zero-shot prompt template for the subset-returning baseline.
pub const DIRECT_ZERO_SHOT_TEMPLATE: &str = include_str!("../../prompts/direct_zero_shot.txt");

fn default_temperature() -> f64 {
    0.0
}
fn default_max_retries() -> u32 {
    3
}
fn default_timeout_secs() -> u64 {
    60
}
fn default_api_key_env() -> String {
    "LLM_API_KEY".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LlmConfig {
    /// Full URL of the chat-completions route.
    pub endpoint: String,
    pub model: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    #[serde(default)]
    pub max_tokens: Option<u32>,
    /// Override for the subset-consistency prompt template file.
    #[serde(default)]
    pub prompt_template_path: Option<PathBuf>,
    /// Name of the environment variable holding the API key.
    #[serde(default = "default_api_key_env")]
    pub api_key_env: String,
}

impl LlmConfig {
    pub fn load(path: &Path) -> Result<LlmConfig, OracleError> {
        let raw = std::fs::read_to_string(path).map_err(|e| {
            OracleError::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        serde_json::from_str(&raw)
            .map_err(|e| OracleError::Config(format!("bad config {}: {e}", path.display())))
    }
}

/// Anything that turns a prompt into raw completion text.
pub trait TextCompleter: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String, OracleError>;
    fn max_retries(&self) -> u32 {
        0
    }
}

/// Blocking HTTP completer for OpenAI-style chat endpoints.
pub struct HttpChatClient {
    config: LlmConfig,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpChatClient {
    pub fn new(config: LlmConfig) -> Result<HttpChatClient, OracleError> {
        let api_key = std::env::var(&config.api_key_env).ok();
        if api_key.is_none() {
            log::warn!(
                "environment variable {} not set; sending unauthenticated requests",
                config.api_key_env
            );
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| OracleError::Config(format!("http client: {e}")))?;
        Ok(HttpChatClient { config, api_key, client })
    }

    pub fn config(&self) -> &LlmConfig {
        &self.config
    }

    fn request_once(&self, prompt: &str) -> Result<String, String> {
        let mut body = serde_json::json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
        });
        if let Some(max_tokens) = self.config.max_tokens {
            body["max_tokens"] = serde_json::json!(max_tokens);
        }
        let mut request = self.client.post(&self.config.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request.send().map_err(|e| e.to_string())?;
        let status = response.status();
        if !status.is_success() {
            return Err(format!("http status {status}"));
        }
        let value: serde_json::Value = response.json().map_err(|e| e.to_string())?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| "response has no choices[0].message.content".to_string())
    }
}

impl TextCompleter for HttpChatClient {
    fn complete(&self, prompt: &str) -> Result<String, OracleError> {
        let attempts = self.config.max_retries + 1;
        let mut last_error = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(200 << attempt.min(4)));
            }
            match self.request_once(prompt) {
                Ok(text) => return Ok(text),
                Err(e) => last_error = e,
            }
        }
        Err(OracleError::Transport { attempts, message: last_error })
    }

    fn max_retries(&self) -> u32 {
        self.config.max_retries
    }
}

/// Number the facts as `1. <text>` lines.
pub fn facts_block(facts: &[&Fact]) -> String {
    facts
        .iter()
        .enumerate()
        .map(|(i, f)| format!("{}. {}", i + 1, f.text))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Fill the subset-consistency template. The background slot renders empty
/// when no background facts are supplied.
pub fn render_subset_prompt(template: &str, background: &[&Fact], subset: &[&Fact]) -> String {
    let bg = if background.is_empty() {
        String::new()
    } else {
        format!("Background (assumed consistent):\n{}\n\n", facts_block(background))
    };
    template.replace("{bg}", &bg).replace("{facts_block}", &facts_block(subset))
}

/// Fill the direct zero-shot template.
pub fn render_direct_prompt(template: &str, facts: &[&Fact]) -> String {
    template.replace("{facts_block}", &facts_block(facts))
}

/// Token search, INCONSISTENT before CONSISTENT.
pub fn parse_verdict(response: &str) -> Option<Verdict> {
    let upper = response.to_uppercase();
    if upper.contains("INCONSISTENT") {
        Some(Verdict::Inconsistent)
    } else if upper.contains("CONSISTENT") {
        Some(Verdict::Consistent)
    } else {
        None
    }
}

/// Subset-consistency oracle backed by a text completer.
pub struct LlmOracle<C> {
    completer: C,
    template: String,
}

impl<C: TextCompleter> LlmOracle<C> {
    pub fn new(completer: C, template: String) -> LlmOracle<C> {
        LlmOracle { completer, template }
    }

    /// Build from a config: loads the template override if one is named.
    pub fn from_config(config: LlmConfig) -> Result<LlmOracle<HttpChatClient>, OracleError> {
        let template = match &config.prompt_template_path {
            None => SUBSET_CONSISTENCY_TEMPLATE.to_string(),
            Some(path) => std::fs::read_to_string(path).map_err(|e| {
                OracleError::Config(format!("cannot read template {}: {e}", path.display()))
            })?,
        };
        Ok(LlmOracle { completer: HttpChatClient::new(config)?, template })
    }
}

impl<C: TextCompleter> Oracle for LlmOracle<C> {
    fn query_with_background(
        &self,
        background: &[&Fact],
        subset: &[&Fact],
    ) -> Result<Verdict, OracleError> {
        let prompt = render_subset_prompt(&self.template, background, subset);
        let attempts = self.completer.max_retries() + 1;
        let mut last = String::new();
        for _ in 0..attempts {
            let response = self.completer.complete(&prompt)?;
            if let Some(verdict) = parse_verdict(&response) {
                return Ok(verdict);
            }
            last = response;
        }
        Err(OracleError::Parse {
            attempts,
            message: format!("no CONSISTENT/INCONSISTENT token in: {last:.80}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factlang::{Entity, EntityId, EntityKind, FactId, LogicalForm, Polarity, UnaryPred};
    use std::sync::atomic::{AtomicU32, Ordering};

    fn sample_facts() -> Vec<Fact> {
        let entities = vec![
            Entity { name: "Rex".into(), kind: EntityKind::Animal },
            Entity { name: "Bella".into(), kind: EntityKind::Animal },
        ];
        vec![
            Fact::new(
                FactId(0),
                LogicalForm::Unary {
                    pred: UnaryPred::IsTiger,
                    entity: EntityId(0),
                    polarity: Polarity::Positive,
                },
                &entities,
            )
            .unwrap(),
            Fact::new(
                FactId(1),
                LogicalForm::Unary {
                    pred: UnaryPred::IsDog,
                    entity: EntityId(1),
                    polarity: Polarity::Negative,
                },
                &entities,
            )
            .unwrap(),
        ]
    }

    #[test]
    fn prompt_without_background() {
        let facts = sample_facts();
        let refs: Vec<&Fact> = facts.iter().collect();
        let prompt = render_subset_prompt(SUBSET_CONSISTENCY_TEMPLATE, &[], &refs);
        assert_eq!(
            prompt,
            "Factual statements. Some may contradict.\n\n\
             Statements:\n1. Rex is a tiger.\n2. Bella is not a dog.\n\n\
             Respond ONLY:\n- CONSISTENT\n- INCONSISTENT\n\nAnswer:\n"
        );
    }

    #[test]
    fn prompt_with_background() {
        let facts = sample_facts();
        let refs: Vec<&Fact> = facts.iter().collect();
        let prompt = render_subset_prompt(SUBSET_CONSISTENCY_TEMPLATE, &refs[..1], &refs[1..]);
        assert!(prompt.starts_with(
            "Factual statements. Some may contradict.\n\n\
             Background (assumed consistent):\n1. Rex is a tiger.\n\n\
             Statements:\n1. Bella is not a dog.\n"
        ));
    }

    #[test]
    fn verdict_parsing_token_precedence() {
        assert_eq!(parse_verdict("CONSISTENT"), Some(Verdict::Consistent));
        assert_eq!(
            parse_verdict("The answer is INCONSISTENT."),
            Some(Verdict::Inconsistent)
        );
        assert_eq!(parse_verdict("inconsistent!"), Some(Verdict::Inconsistent));
        assert_eq!(parse_verdict("  consistent\n"), Some(Verdict::Consistent));
        assert_eq!(parse_verdict("maybe"), None);
    }

    struct ScriptedCompleter {
        responses: Vec<&'static str>,
        calls: AtomicU32,
        retries: u32,
    }

    impl TextCompleter for ScriptedCompleter {
        fn complete(&self, _prompt: &str) -> Result<String, OracleError> {
            let i = self.calls.fetch_add(1, Ordering::SeqCst) as usize;
            Ok(self.responses[i.min(self.responses.len() - 1)].to_string())
        }
        fn max_retries(&self) -> u32 {
            self.retries
        }
    }

    #[test]
    fn retries_reparse_until_token_appears() {
        let facts = sample_facts();
        let refs: Vec<&Fact> = facts.iter().collect();
        let oracle = LlmOracle::new(
            ScriptedCompleter {
                responses: vec!["hmm", "let me think", "INCONSISTENT"],
                calls: AtomicU32::new(0),
                retries: 3,
            },
            SUBSET_CONSISTENCY_TEMPLATE.to_string(),
        );
        assert_eq!(oracle.query(&refs).unwrap(), Verdict::Inconsistent);
    }

    #[test]
    fn unparseable_after_retries_is_an_error() {
        let facts = sample_facts();
        let refs: Vec<&Fact> = facts.iter().collect();
        let oracle = LlmOracle::new(
            ScriptedCompleter {
                responses: vec!["maybe"],
                calls: AtomicU32::new(0),
                retries: 2,
            },
            SUBSET_CONSISTENCY_TEMPLATE.to_string(),
        );
        match oracle.query(&refs) {
            Err(OracleError::Parse { attempts: 3, .. }) => {}
            other => panic!("expected parse error after 3 attempts, got {other:?}"),
        }
    }
}
