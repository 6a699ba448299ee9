use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{assign_colors, Highlight, LegendEntry, Palette, RenderError, PALETTE_SIZE};
use crate::analysis::{AnalysisResult, Feature};
use crate::corpus::Corpus;
use crate::textproc::Span;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub row_dim: String,
    pub col_dim: String,
    #[serde(default)]
    pub fixed: BTreeMap<String, String>,
    pub feature: Feature,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub response_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridViewModel {
    pub row_dim: String,
    pub col_dim: String,
    pub fixed: BTreeMap<String, String>,
    pub feature: Feature,
    pub row_values: Vec<String>,
    pub col_values: Vec<String>,
    /// `cells[row][col]`.
    pub cells: Vec<Vec<Option<GridCell>>>,
    pub highlights: Vec<Highlight>,
    pub legend: Vec<LegendEntry>,
    pub palette: Vec<String>,
}

impl GridSpec {
    /// Checks the axes and fixed selections against `corpus`.
    pub fn validate(&self, corpus: &Corpus) -> Result<(), RenderError> {
        for dim in [&self.row_dim, &self.col_dim] {
            if corpus.dimension(dim).is_none() {
                return Err(RenderError::UnknownDimension(dim.clone()));
            }
        }
        if self.row_dim == self.col_dim {
            return Err(RenderError::SameAxis(self.row_dim.clone()));
        }
        for (dim, value) in &self.fixed {
            if *dim == self.row_dim || *dim == self.col_dim {
                return Err(RenderError::FixedIsAxis(dim.clone()));
            }
            let d = corpus
                .dimension(dim)
                .ok_or_else(|| RenderError::UnknownDimension(dim.clone()))?;
            if !d.contains(value) {
                return Err(RenderError::UnknownValue {
                    dimension: dim.clone(),
                    value: value.clone(),
                });
            }
        }
        for d in corpus.dimensions() {
            let free = d.name != self.row_dim && d.name != self.col_dim;
            if free && d.values.len() > 1 && !self.fixed.contains_key(&d.name) {
                return Err(RenderError::MissingFixed(d.name.clone()));
            }
        }
        Ok(())
    }
}

/// Lays responses out by two dimensions and paints the chosen analysis.
///
/// `analysis` is only consulted when `spec.feature` is not `None`; it should
/// have been computed on the fixed slice of `corpus`.
pub fn build_grid(
    corpus: &Corpus,
    spec: &GridSpec,
    analysis: Option<&AnalysisResult>,
    palette: &Palette,
) -> Result<GridViewModel, RenderError> {
    spec.validate(corpus)?;
    let sliced = corpus.slice(&spec.fixed)?;
    let values = |dim: &str| {
        sliced
            .dimension(dim)
            .map(|d| d.values.clone())
            .unwrap_or_default()
    };
    let row_values = values(&spec.row_dim);
    let col_values = values(&spec.col_dim);

    let mut cells = Vec::with_capacity(row_values.len());
    let mut visible: HashMap<&str, usize> = HashMap::new();
    for row in &row_values {
        let mut line = Vec::with_capacity(col_values.len());
        for col in &col_values {
            let matching: Vec<_> = sliced
                .records()
                .iter()
                .filter(|r| {
                    r.dimension_value(&spec.row_dim).as_deref() == Some(row.as_str())
                        && r.dimension_value(&spec.col_dim).as_deref() == Some(col.as_str())
                })
                .collect();
            if matching.len() > 1 {
                return Err(ambiguous(row, col, &matching, spec, &sliced));
            }
            line.push(matching.first().map(|r| {
                let order = visible.len();
                visible.insert(r.id.as_str(), order);
                GridCell {
                    response_id: r.id.clone(),
                    text: r.text.clone(),
                }
            }));
        }
        cells.push(line);
    }

    let (candidates, legend) = match spec.feature {
        Feature::None => (Vec::new(), Vec::new()),
        expected => {
            let given = analysis.map_or(Feature::None, AnalysisResult::feature);
            match analysis {
                Some(a) if given == expected => layers(a),
                _ => return Err(RenderError::FeatureMismatch { expected, given }),
            }
        }
    };
    let highlights = resolve_overlaps(candidates, &visible);

    Ok(GridViewModel {
        row_dim: spec.row_dim.clone(),
        col_dim: spec.col_dim.clone(),
        fixed: spec.fixed.clone(),
        feature: spec.feature,
        row_values,
        col_values,
        cells,
        highlights,
        legend,
        palette: palette.colors().to_vec(),
    })
}

fn ambiguous(
    row: &str,
    col: &str,
    matching: &[&crate::corpus::ResponseRecord],
    spec: &GridSpec,
    corpus: &Corpus,
) -> RenderError {
    let varying: Vec<&str> = corpus
        .dimensions()
        .iter()
        .map(|d| d.name.as_str())
        .filter(|name| *name != spec.row_dim && *name != spec.col_dim)
        .filter(|name| {
            let first = matching[0].dimension_value(name);
            matching[1..].iter().any(|r| r.dimension_value(name) != first)
        })
        .collect();
    RenderError::AmbiguousCell {
        row: row.to_string(),
        col: col.to_string(),
        count: matching.len(),
        hint: if varying.is_empty() {
            String::new()
        } else {
            format!(" (they differ in: {})", varying.join(", "))
        },
    }
}

/// Candidate spans tagged with their layer rank (lower wins), plus legend.
fn layers(analysis: &AnalysisResult) -> (Vec<(usize, Highlight)>, Vec<LegendEntry>) {
    let mut out = Vec::new();
    let mut legend = Vec::new();
    match analysis {
        AnalysisResult::ExactMatches(sets) => {
            let ranks: Vec<usize> = (0..sets.len()).collect();
            let colors = assign_colors(&ranks);
            for (rank, m) in sets.iter().enumerate() {
                let Some(&color) = colors.get(&rank) else { break };
                legend.push(LegendEntry {
                    color,
                    label: m.key.clone(),
                });
                for o in &m.occurrences {
                    out.push((
                        rank,
                        Highlight {
                            response_id: o.response_id.clone(),
                            start: o.start,
                            end: o.end,
                            color,
                        },
                    ));
                }
            }
        }
        AnalysisResult::UniqueWords(u) => {
            legend.push(LegendEntry {
                color: 0,
                label: "unique words".to_string(),
            });
            for (id, words) in &u.per_response {
                for w in words {
                    for s in &w.spans {
                        out.push((
                            0,
                            Highlight {
                                response_id: id.clone(),
                                start: s.start,
                                end: s.end,
                                color: 0,
                            },
                        ));
                    }
                }
            }
        }
        AnalysisResult::Pdc(pdc) => {
            let mut multi: Vec<_> = pdc.groups.iter().filter(|g| g.len() > 1).collect();
            multi.sort_by(|a, b| b.len().cmp(&a.len()).then(a.id.cmp(&b.id)));
            for (rank, g) in multi.into_iter().take(PALETTE_SIZE).enumerate() {
                legend.push(LegendEntry {
                    color: rank,
                    label: format!("group {} ({} sentences)", g.id, g.len()),
                });
                for m in &g.members {
                    out.push((
                        rank,
                        Highlight {
                            response_id: m.response_id.clone(),
                            start: m.char_span.start,
                            end: m.char_span.end,
                            color: rank,
                        },
                    ));
                }
            }
        }
    }
    (out, legend)
}

/// Keeps spans of visible responses, letting the better-ranked layer win any
/// overlap; identical spans collapse to one. Output is in cell order, then
/// by offset.
fn resolve_overlaps(
    mut candidates: Vec<(usize, Highlight)>,
    visible: &HashMap<&str, usize>,
) -> Vec<Highlight> {
    candidates.retain(|(_, h)| visible.contains_key(h.response_id.as_str()));
    candidates.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| a.1.response_id.cmp(&b.1.response_id))
            .then(a.1.start.cmp(&b.1.start))
            .then(a.1.end.cmp(&b.1.end))
    });
    let mut taken: HashMap<String, Vec<Span>> = HashMap::new();
    let mut out = Vec::new();
    for (_, h) in candidates {
        let span = Span::new(h.start, h.end);
        let spans = taken.entry(h.response_id.clone()).or_default();
        if spans.iter().any(|s| s.overlaps(&span)) {
            continue;
        }
        spans.push(span);
        out.push(h);
    }
    out.sort_by(|a, b| {
        visible[a.response_id.as_str()]
            .cmp(&visible[b.response_id.as_str()])
            .then(a.start.cmp(&b.start))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, AnalysisConfig};
    use crate::corpus::ingest_str;
    use crate::pdc::{PdcResult, SentenceGroup, SentenceRef};

    fn six() -> Corpus {
        let mut lines = Vec::new();
        for model in ["A", "B"] {
            for g in 0..3 {
                lines.push(format!(
                    r#"{{"id":"{model}{g}","text":"The lamp glows warmly tonight. Model {model} wrote take {g}.","model":"{model}"}}"#
                ));
            }
        }
        ingest_str(&lines.join("\n")).unwrap()
    }

    fn spec(rows: &str, cols: &str, feature: Feature) -> GridSpec {
        GridSpec {
            row_dim: rows.into(),
            col_dim: cols.into(),
            fixed: BTreeMap::new(),
            feature,
        }
    }

    #[test]
    fn fills_three_by_two() {
        let c = six();
        let g = build_grid(&c, &spec("gen_index", "model", Feature::None), None, &Palette::default())
            .unwrap();
        assert_eq!(g.row_values, vec!["0", "1", "2"]);
        assert_eq!(g.col_values, vec!["A", "B"]);
        assert!(g.cells.iter().flatten().all(Option::is_some));
        assert_eq!(g.cells[2][1].as_ref().unwrap().response_id, "B2");
        assert!(g.highlights.is_empty());
        assert!(g.legend.is_empty());
    }

    #[test]
    fn ambiguous_cell() {
        let c = ingest_str(
            r#"{"id":"a","text":"x","model":"m","extra":{"k":"1"},"gen_index":0}
{"id":"b","text":"y","model":"m","extra":{"k":"2"},"gen_index":0}
{"id":"c","text":"z","model":"n","gen_index":0}"#,
        )
        .unwrap();
        let err = build_grid(&c, &spec("gen_index", "model", Feature::None), None, &Palette::default())
            .unwrap_err();
        assert!(matches!(err, RenderError::AmbiguousCell { count: 2, .. }));
        assert!(err.to_string().contains("fix another dimension"));
    }

    #[test]
    fn missing_fixed_and_axis_errors() {
        let c = six();
        let err = build_grid(&c, &spec("gen_index", "prompt_template", Feature::None), None, &Palette::default())
            .unwrap_err();
        assert_eq!(err, RenderError::MissingFixed("model".into()));
        let err = build_grid(&c, &spec("model", "model", Feature::None), None, &Palette::default())
            .unwrap_err();
        assert_eq!(err, RenderError::SameAxis("model".into()));
        let err = build_grid(&c, &spec("colour", "model", Feature::None), None, &Palette::default())
            .unwrap_err();
        assert_eq!(err, RenderError::UnknownDimension("colour".into()));
        let mut s = spec("gen_index", "prompt_template", Feature::None);
        s.fixed.insert("model".into(), "A".into());
        let g = build_grid(&c, &s, None, &Palette::default()).unwrap();
        assert_eq!(g.row_values.len(), 3);
        assert_eq!(g.col_values, vec!["default"]);
    }

    #[test]
    fn feature_mismatch() {
        let c = six();
        let err = build_grid(&c, &spec("gen_index", "model", Feature::Pdc), None, &Palette::default())
            .unwrap_err();
        assert_eq!(
            err,
            RenderError::FeatureMismatch {
                expected: Feature::Pdc,
                given: Feature::None
            }
        );
    }

    #[test]
    fn exact_match_layers() {
        let c = six();
        let a = analyze(&c, Feature::ExactMatches, &AnalysisConfig::default())
            .unwrap()
            .unwrap();
        let g = build_grid(&c, &spec("gen_index", "model", Feature::ExactMatches), Some(&a), &Palette::default())
            .unwrap();
        assert_eq!(g.legend[0].label, "the lamp glows warmly tonight");
        assert!(g.highlights.iter().all(|h| h.color < PALETTE_SIZE));
        for h in &g.highlights {
            let text = &c.get(&h.response_id).unwrap().text;
            assert!(h.end <= text.len());
        }
        // no two highlights in a response overlap
        for x in &g.highlights {
            for y in &g.highlights {
                if x != y && x.response_id == y.response_id {
                    assert!(x.end <= y.start || y.end <= x.start);
                }
            }
        }
    }

    fn group(id: usize, size: usize) -> SentenceGroup {
        SentenceGroup {
            id,
            median_pos: 0.5,
            mean_pos: 0.5,
            distinct_ratio: 1.0,
            is_singleton: size == 1,
            members: (0..size)
                .map(|k| SentenceRef {
                    response_id: format!("r{k}"),
                    sentence_index: id,
                    char_span: Span::new(id * 10, id * 10 + 5),
                    norm_pos: 0.5,
                })
                .collect(),
            order: (0..size).collect(),
            gray: vec![Vec::new(); size],
        }
    }

    #[test]
    fn pdc_cap_keeps_twelve_largest() {
        // 15 multi-member groups (sizes 2..=16) plus 3 singletons.
        let mut groups: Vec<SentenceGroup> = (0..15).map(|i| group(i, i + 2)).collect();
        groups.extend((15..18).map(|i| group(i, 1)));
        let pdc = PdcResult { groups };
        let lines: Vec<String> = (0..16)
            .map(|k| format!(r#"{{"id":"r{k}","text":"{}","model":"m{k}"}}"#, "w ".repeat(100)))
            .collect();
        let c = ingest_str(&lines.join("\n")).unwrap();
        let g = build_grid(
            &c,
            &spec("gen_index", "model", Feature::Pdc),
            Some(&AnalysisResult::Pdc(pdc)),
            &Palette::default(),
        )
        .unwrap();
        assert_eq!(g.legend.len(), 12);
        let labelled: Vec<&str> = g.legend.iter().map(|l| l.label.as_str()).collect();
        assert_eq!(labelled[0], "group 14 (16 sentences)");
        assert_eq!(labelled[11], "group 3 (5 sentences)");
        // groups 0..=2 (sizes 2..=4) and all singletons stay unpainted
        for h in &g.highlights {
            let gid = h.start / 10;
            assert!((3..15).contains(&gid), "group {gid} painted");
        }
        assert_eq!(g.highlights.len(), (5..=16).sum::<usize>());
    }

    #[test]
    fn overlap_resolution() {
        let mut visible = HashMap::new();
        visible.insert("r", 0);
        let h = |start, end, color| Highlight {
            response_id: "r".into(),
            start,
            end,
            color,
        };
        let out = resolve_overlaps(
            vec![(1, h(0, 10, 1)), (0, h(5, 15, 0)), (2, h(5, 15, 2)), (3, h(20, 25, 3))],
            &visible,
        );
        assert_eq!(out, vec![h(5, 15, 0), h(20, 25, 3)]);
    }
}
