//! Template-based rendering of features into description segments, and
//! composition of segments under user ordering and edits.

mod compose;
mod format;
mod render;
mod templates;

use thiserror::Error;

pub use compose::{compose_description, render_selection, select_all, Description, SelectionError};
pub use format::{format_number, FormatConfig};
pub use render::{render_feature, update_for_variables, Renderer};
pub use templates::TemplateCatalog;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextgenError {
    #[error("template line {line}: {reason}")]
    BadTemplate { line: usize, reason: String },
    #[error("no template named {0:?}")]
    UnknownTemplate(String),
    #[error("placeholder {{{0}}} is not bound")]
    UnboundPlaceholder(String),
    #[error("feature {0:?} needs a variable choice")]
    MissingVariableChoice(String),
    #[error("feature {0:?} compares variables and needs at least two choices")]
    NeedTwoVariables(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("no context text to render")]
    MissingContextText,
    #[error("cannot format a non-finite number")]
    NonFinite,
    #[error("order is not a permutation of the segment indices")]
    InvalidPermutation,
    #[error("edit targets {0:?}, which is not among the segments")]
    UnknownFeatureEdit(String),
}
