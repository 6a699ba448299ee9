//! Static report directory:
//!
//! ```text
//! manifest.json
//! corpus.json
//! analysis/{exact_matches,unique_words,pdc}.json
//! views/grid_{none,exact_matches,unique_words,pdc}.json
//! views/interleaved.json
//! views/linear.json
//! ```
//!
//! A file whose analysis or view could not be built holds
//! `{"feature": ..., "error": ...}` and is listed under `errors` in the
//! manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mesoscope_core::analysis::{analyze, AnalysisConfig, AnalysisDocument, AnalysisResult, Feature};
use mesoscope_core::corpus::Corpus;
use mesoscope_core::render::{
    build_grid, build_interleaved, build_linear, GridSpec, Palette, RenderError,
};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

pub const REPORT_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportSpec {
    pub rows: String,
    pub cols: String,
    pub fixed: BTreeMap<String, String>,
    /// Badge dimension of the interleaved view; defaults to `cols`.
    pub badge: Option<String>,
    /// Grouping dimension of the linear view; defaults to `rows`.
    pub group: Option<String>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no records")]
    NoRecords,
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub format: u32,
    pub rows: String,
    pub cols: String,
    pub fixed: BTreeMap<String, String>,
    pub badge: String,
    pub group: String,
    pub record_count: usize,
    pub palette: Vec<String>,
    pub params: BTreeMap<Feature, Value>,
    pub files: Vec<String>,
    /// Files that hold an error document, with the message.
    pub errors: BTreeMap<String, String>,
}

struct Writer<'a> {
    root: &'a Path,
    files: Vec<String>,
    errors: BTreeMap<String, String>,
}

impl Writer<'_> {
    fn write(&mut self, rel: &str, value: &impl Serialize) -> Result<(), ReportError> {
        let path = self.root.join(rel);
        let io = |source| ReportError::Io {
            path: path.clone(),
            source,
        };
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        let mut text = serde_json::to_string_pretty(value).expect("report documents serialize");
        text.push('\n');
        std::fs::write(&path, text).map_err(io)?;
        self.files.push(rel.to_string());
        Ok(())
    }

    fn write_result<T: Serialize>(
        &mut self,
        rel: &str,
        feature: Feature,
        value: Result<T, String>,
    ) -> Result<(), ReportError> {
        match value {
            Ok(v) => self.write(rel, &v),
            Err(e) => {
                self.errors.insert(rel.to_string(), e.clone());
                self.write(rel, &json!({ "feature": feature, "error": e }))
            }
        }
    }
}

/// Writes the report for `corpus` into `out`. Analyses run on the slice
/// selected by `spec.fixed`; `corpus.json` holds every record.
pub fn write_report(
    corpus: &Corpus,
    spec: &ReportSpec,
    config: &AnalysisConfig,
    palette: &Palette,
    out: &Path,
) -> Result<Manifest, ReportError> {
    if corpus.is_empty() {
        return Err(ReportError::NoRecords);
    }
    let grid_spec = |feature| GridSpec {
        row_dim: spec.rows.clone(),
        col_dim: spec.cols.clone(),
        fixed: spec.fixed.clone(),
        feature,
    };
    grid_spec(Feature::None).validate(corpus)?;
    let sliced = corpus.slice(&spec.fixed).map_err(RenderError::from)?;
    let badge = spec.badge.clone().unwrap_or_else(|| spec.cols.clone());
    let group = spec.group.clone().unwrap_or_else(|| spec.rows.clone());

    let mut w = Writer {
        root: out,
        files: Vec::new(),
        errors: BTreeMap::new(),
    };
    let records: Vec<Value> = corpus
        .records()
        .iter()
        .map(|r| serde_json::to_value(r).expect("records serialize"))
        .collect();
    w.write("corpus.json", &records)?;

    let mut analyses: BTreeMap<Feature, Result<AnalysisResult, String>> = BTreeMap::new();
    for feature in Feature::ANALYSES {
        let result = analyze(&sliced, feature, config)
            .map(|r| r.expect("analysis features yield a result"))
            .map_err(|e| e.to_string());
        let rel = format!("analysis/{feature}.json");
        let doc = result.as_ref().map_err(Clone::clone).map(|r| AnalysisDocument {
            feature,
            params: config.params(feature),
            result: r,
        });
        w.write_result(&rel, feature, doc)?;
        analyses.insert(feature, result);
    }

    for feature in Feature::ALL {
        let analysis = match analyses.get(&feature) {
            None => Ok(None),
            Some(Ok(a)) => Ok(Some(a)),
            Some(Err(e)) => Err(e.clone()),
        };
        let view = analysis.and_then(|a| {
            build_grid(corpus, &grid_spec(feature), a, palette).map_err(|e| e.to_string())
        });
        w.write_result(&format!("views/grid_{feature}.json"), feature, view)?;
    }

    let interleaved = match &analyses[&Feature::Pdc] {
        Ok(AnalysisResult::Pdc(pdc)) => {
            build_interleaved(&sliced, pdc, &badge, palette).map_err(|e| e.to_string())
        }
        Ok(_) => unreachable!("pdc analysis yields a pdc result"),
        Err(e) => Err(e.clone()),
    };
    w.write_result("views/interleaved.json", Feature::Pdc, interleaved)?;
    let linear = build_linear(&sliced, &group).map_err(|e| e.to_string());
    w.write_result("views/linear.json", Feature::None, linear)?;

    let mut files = std::mem::take(&mut w.files);
    files.push("manifest.json".to_string());
    files.sort();
    let manifest = Manifest {
        format: REPORT_FORMAT,
        rows: spec.rows.clone(),
        cols: spec.cols.clone(),
        fixed: spec.fixed.clone(),
        badge,
        group,
        record_count: corpus.len(),
        palette: palette.colors().to_vec(),
        params: Feature::ANALYSES
            .into_iter()
            .map(|f| (f, config.params_summary(f)))
            .collect(),
        files,
        errors: std::mem::take(&mut w.errors),
    };
    w.write("manifest.json", &manifest)?;
    Ok(manifest)
}
