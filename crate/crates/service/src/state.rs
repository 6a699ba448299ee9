use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Instant;

use mesoscope_core::analysis::{analyze, AnalysisConfig, AnalysisDocument, AnalysisResult, Feature};
use mesoscope_core::corpus::{ingest_str, Corpus, CorpusError};
use mesoscope_core::render::Palette;
use sha2::{Digest, Sha256};
use tokio::sync::OnceCell;

pub const DEFAULT_PORT: u16 = 7341;
pub const DEFAULT_BODY_LIMIT: usize = 16 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub port: u16,
    pub body_limit: usize,
    pub analysis: AnalysisConfig,
    pub palette: Palette,
    /// Turning this off recomputes every analysis; bodies are unchanged.
    pub cache: bool,
    /// Directory corpora are loaded from at startup and written to on
    /// shutdown.
    pub snapshot_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            port: DEFAULT_PORT,
            body_limit: DEFAULT_BODY_LIMIT,
            analysis: AnalysisConfig::default(),
            palette: Palette::default(),
            cache: true,
            snapshot_dir: None,
        }
    }
}

/// Identifies one cached analysis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnalysisKey {
    pub corpus_id: String,
    pub feature: Feature,
    pub params_digest: String,
}

/// A finished analysis with its serialized response body.
#[derive(Debug)]
pub struct Computed {
    pub result: AnalysisResult,
    pub body: String,
    pub computed_ms: u128,
}

pub type Outcome = Result<Arc<Computed>, String>;

pub struct Fetched {
    pub outcome: Outcome,
    pub cache_hit: bool,
}

pub fn digest_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Content address of a corpus: digest of its canonical serialization.
pub fn corpus_id(corpus: &Corpus) -> String {
    digest_hex(corpus.to_canonical_json().as_bytes())
}

pub struct AppState {
    config: ServiceConfig,
    corpora: RwLock<HashMap<String, Arc<Corpus>>>,
    ingest_lock: tokio::sync::Mutex<()>,
    cache: Mutex<HashMap<AnalysisKey, Arc<OnceCell<Outcome>>>>,
    computations: AtomicUsize,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            config,
            corpora: RwLock::default(),
            ingest_lock: tokio::sync::Mutex::new(()),
            cache: Mutex::default(),
            computations: AtomicUsize::new(0),
        }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    /// Number of analyses actually computed so far.
    pub fn computations(&self) -> usize {
        self.computations.load(Ordering::SeqCst)
    }

    pub fn corpus(&self, id: &str) -> Option<Arc<Corpus>> {
        self.corpora.read().unwrap().get(id).cloned()
    }

    pub fn corpus_ids(&self) -> Vec<String> {
        let mut ids: Vec<_> = self.corpora.read().unwrap().keys().cloned().collect();
        ids.sort();
        ids
    }

    /// Parses and stores a JSONL body. Returns the id and whether the corpus
    /// was new.
    pub async fn ingest(&self, body: &str) -> Result<(String, Arc<Corpus>, bool), CorpusError> {
        let corpus = ingest_str(body)?;
        Ok(self.insert(corpus).await)
    }

    pub async fn insert(&self, corpus: Corpus) -> (String, Arc<Corpus>, bool) {
        let id = corpus_id(&corpus);
        let _guard = self.ingest_lock.lock().await;
        if let Some(existing) = self.corpus(&id) {
            return (id, existing, false);
        }
        let corpus = Arc::new(corpus);
        self.corpora
            .write()
            .unwrap()
            .insert(id.clone(), corpus.clone());
        (id, corpus, true)
    }

    /// Runs `feature` on `corpus`, at most once per key when caching is on.
    pub async fn analysis(
        self: &Arc<Self>,
        corpus_id: &str,
        corpus: Arc<Corpus>,
        feature: Feature,
    ) -> Fetched {
        let params = self.config.analysis.params(feature);
        if !self.config.cache {
            let outcome = self.compute(corpus, feature).await;
            return Fetched {
                outcome,
                cache_hit: false,
            };
        }
        let key = AnalysisKey {
            corpus_id: corpus_id.to_string(),
            feature,
            params_digest: digest_hex(params.to_string().as_bytes()),
        };
        let cell = self.cache.lock().unwrap().entry(key).or_default().clone();
        let mut ran = false;
        let outcome = cell
            .get_or_init(|| {
                ran = true;
                self.compute(corpus, feature)
            })
            .await
            .clone();
        Fetched {
            outcome,
            cache_hit: !ran,
        }
    }

    async fn compute(self: &Arc<Self>, corpus: Arc<Corpus>, feature: Feature) -> Outcome {
        let state = self.clone();
        tokio::task::spawn_blocking(move || {
            state.computations.fetch_add(1, Ordering::SeqCst);
            let started = Instant::now();
            let config = &state.config.analysis;
            let result = analyze(&corpus, feature, config)
                .map_err(|e| e.to_string())?
                .ok_or_else(|| format!("feature `{feature}` has no analysis"))?;
            let body = serde_json::to_string(&AnalysisDocument {
                feature,
                params: config.params(feature),
                result: &result,
            })
            .expect("analysis serializes");
            Ok(Arc::new(Computed {
                result,
                body,
                computed_ms: started.elapsed().as_millis(),
            }))
        })
        .await
        .map_err(|e| format!("analysis task failed: {e}"))?
    }

    /// Loads every `*.jsonl` file in the snapshot directory.
    pub async fn load_snapshot(&self) -> std::io::Result<usize> {
        let Some(dir) = &self.config.snapshot_dir else {
            return Ok(0);
        };
        if !dir.exists() {
            return Ok(0);
        }
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        let mut loaded = 0;
        for path in paths {
            let text = std::fs::read_to_string(&path)?;
            let corpus = ingest_str(&text).map_err(|e| {
                std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("{}: {e}", path.display()),
                )
            })?;
            self.insert(corpus).await;
            loaded += 1;
        }
        Ok(loaded)
    }

    /// Writes each corpus to `<id>.jsonl` in the snapshot directory.
    pub fn save_snapshot(&self) -> std::io::Result<usize> {
        let Some(dir) = &self.config.snapshot_dir else {
            return Ok(0);
        };
        save_corpora(dir, &self.corpora.read().unwrap())
    }
}

fn save_corpora(dir: &Path, corpora: &HashMap<String, Arc<Corpus>>) -> std::io::Result<usize> {
    std::fs::create_dir_all(dir)?;
    for (id, corpus) in corpora {
        std::fs::write(dir.join(format!("{id}.jsonl")), corpus.to_jsonl())?;
    }
    Ok(corpora.len())
}
