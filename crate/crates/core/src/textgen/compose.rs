use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::{Renderer, TextgenError};
use crate::features::{ids, FeatureCatalog};
use crate::model::{DescriptionSegment, SelectionState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Description {
    pub chart_id: String,
    pub segments: Vec<DescriptionSegment>,
    /// Segment texts in order, joined by single spaces.
    pub rendered: String,
}

/// Places `segments[order[i]]` at position `i`, applies `edits` (keyed by
/// feature id) and rebuilds the rendered text.
pub fn compose_description(
    chart_id: &str,
    segments: &[DescriptionSegment],
    order: &[usize],
    edits: &BTreeMap<String, String>,
) -> Result<Description, TextgenError> {
    let mut seen = vec![false; segments.len()];
    if order.len() != segments.len() {
        return Err(TextgenError::InvalidPermutation);
    }
    for &i in order {
        if i >= seen.len() || seen[i] {
            return Err(TextgenError::InvalidPermutation);
        }
        seen[i] = true;
    }
    if let Some(key) = edits
        .keys()
        .find(|k| !segments.iter().any(|s| &s.feature_id == *k))
    {
        return Err(TextgenError::UnknownFeatureEdit(key.clone()));
    }
    let segments: Vec<DescriptionSegment> = order
        .iter()
        .enumerate()
        .map(|(position, &i)| {
            let mut s = segments[i].clone();
            s.order_index = position;
            if let Some(text) = edits.get(&s.feature_id) {
                s.text = text.clone();
                s.edited = true;
            }
            s
        })
        .collect();
    let rendered = segments
        .iter()
        .map(|s| s.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    Ok(Description {
        chart_id: chart_id.to_string(),
        segments,
        rendered,
    })
}

/// Why a selection cannot be rendered against a catalog.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectionError {
    #[error("feature {0:?} is not in the catalog")]
    UnknownFeature(String),
    #[error("feature {0:?} is selected twice")]
    DuplicateFeature(String),
    #[error("feature {0:?} does not take variable choices")]
    ChoiceNotApplicable(String),
    #[error("feature {feature:?} has no variable {variable:?}")]
    UnknownVariable { feature: String, variable: String },
    #[error("edit for {0:?}, which is not selected")]
    EditNotSelected(String),
    #[error(transparent)]
    Render(#[from] TextgenError),
}

fn validate(catalog: &FeatureCatalog, selection: &SelectionState) -> Result<(), SelectionError> {
    for (i, id) in selection.selected_feature_ids.iter().enumerate() {
        if !catalog.contains(id) {
            return Err(SelectionError::UnknownFeature(id.clone()));
        }
        if selection.selected_feature_ids[..i].contains(id) {
            return Err(SelectionError::DuplicateFeature(id.clone()));
        }
    }
    for (id, choices) in &selection.variable_choices {
        let feature = catalog
            .get(id)
            .ok_or_else(|| SelectionError::UnknownFeature(id.clone()))?;
        if !feature.requires_variable {
            return Err(SelectionError::ChoiceNotApplicable(id.clone()));
        }
        if let Some(v) = choices.iter().find(|v| !catalog.variables.contains(v)) {
            return Err(SelectionError::UnknownVariable {
                feature: id.clone(),
                variable: v.clone(),
            });
        }
    }
    let has_context = context_text(selection).is_some();
    for id in selection.manual_edits.keys() {
        let selected = selection.selected_feature_ids.contains(id);
        if !selected && !(id == ids::CONTEXT && has_context) {
            return Err(SelectionError::EditNotSelected(id.clone()));
        }
    }
    Ok(())
}

fn context_text(selection: &SelectionState) -> Option<&str> {
    selection
        .context_text
        .as_deref()
        .map(str::trim)
        .filter(|t| !t.is_empty())
}

/// Renders the selected features in selection order, then applies edits.
///
/// The context segment appears where `context.note` is selected, or at the
/// end when only context text is given. Without context text it is skipped
/// unless an edit supplies its text.
pub fn render_selection(
    catalog: &FeatureCatalog,
    selection: &SelectionState,
    renderer: &Renderer,
) -> Result<Description, SelectionError> {
    validate(catalog, selection)?;
    let has_context = context_text(selection).is_some();
    let mut segments = Vec::new();
    for id in &selection.selected_feature_ids {
        let feature = catalog.get(id).expect("validated");
        if id == ids::CONTEXT && !has_context {
            if selection.manual_edits.contains_key(id) {
                segments.push(DescriptionSegment {
                    feature_id: id.clone(),
                    text: String::new(),
                    anchors: feature.anchors.clone(),
                    order_index: 0,
                    edited: false,
                });
            }
            continue;
        }
        segments.push(renderer.render_feature(feature, selection)?);
    }
    if has_context && !selection.selected_feature_ids.iter().any(|id| id == ids::CONTEXT) {
        if let Some(feature) = catalog.get(ids::CONTEXT) {
            segments.push(renderer.render_feature(feature, selection)?);
        }
    }
    let order: Vec<usize> = (0..segments.len()).collect();
    Ok(compose_description(
        &catalog.chart_id,
        &segments,
        &order,
        &selection.manual_edits,
    )?)
}

/// Every feature in catalog order. Multivariate features get all variables,
/// except the group comparison, which gets the first two.
pub fn select_all(catalog: &FeatureCatalog) -> SelectionState {
    let mut selection = SelectionState {
        selected_feature_ids: catalog.features.iter().map(|f| f.feature_id.clone()).collect(),
        ..Default::default()
    };
    for f in catalog.features.iter().filter(|f| f.requires_variable) {
        let choices = if f.feature_id == ids::COMPARISON {
            catalog.variables.iter().take(2).cloned().collect()
        } else {
            catalog.variables.clone()
        };
        selection.variable_choices.insert(f.feature_id.clone(), choices);
    }
    selection
}
