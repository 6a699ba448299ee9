use serde::{Deserialize, Serialize};

use super::RenderError;
use crate::corpus::Corpus;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearEntry {
    pub response_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearGroup {
    pub label: String,
    /// `None` collects responses without a value for the dimension.
    pub value: Option<String>,
    pub responses: Vec<LinearEntry>,
    pub collapsed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearViewModel {
    pub group_dim: String,
    pub groups: Vec<LinearGroup>,
}

/// Baseline list view: one collapsible group per value of `group_dim`,
/// responses in corpus order.
pub fn build_linear(corpus: &Corpus, group_dim: &str) -> Result<LinearViewModel, RenderError> {
    if corpus.is_empty() {
        return Ok(LinearViewModel {
            group_dim: group_dim.to_string(),
            groups: Vec::new(),
        });
    }
    let dim = corpus
        .dimension(group_dim)
        .ok_or_else(|| RenderError::UnknownDimension(group_dim.to_string()))?;
    let mut groups: Vec<LinearGroup> = dim
        .values
        .iter()
        .map(|v| LinearGroup {
            label: format!("{group_dim}={v}"),
            value: Some(v.clone()),
            responses: Vec::new(),
            collapsed: false,
        })
        .collect();
    let mut unset = Vec::new();
    for r in corpus.records() {
        let entry = LinearEntry {
            response_id: r.id.clone(),
            text: r.text.clone(),
        };
        match r.dimension_value(group_dim) {
            Some(v) => {
                let g = groups
                    .iter_mut()
                    .find(|g| g.value.as_deref() == Some(&*v))
                    .expect("registry holds every observed value");
                g.responses.push(entry);
            }
            None => unset.push(entry),
        }
    }
    if !unset.is_empty() {
        groups.push(LinearGroup {
            label: format!("{group_dim} unset"),
            value: None,
            responses: unset,
            collapsed: false,
        });
    }
    Ok(LinearViewModel {
        group_dim: group_dim.to_string(),
        groups,
    })
}
