use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::TextgenError;

const ENGLISH: &str = include_str!("../../assets/templates/en/description.properties");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateCatalog {
    templates: BTreeMap<String, String>,
}

impl TemplateCatalog {
    /// Parses `key=template` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, TextgenError> {
        let mut templates = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| TextgenError::BadTemplate {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=template"))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(bad("empty key"));
            }
            placeholders(value).map_err(|reason| bad(&reason))?;
            if templates.insert(key.to_string(), value.to_string()).is_some() {
                return Err(bad("duplicate key"));
            }
        }
        Ok(TemplateCatalog { templates })
    }

    /// The committed English catalog.
    pub fn english() -> &'static TemplateCatalog {
        static CATALOG: OnceLock<TemplateCatalog> = OnceLock::new();
        CATALOG.get_or_init(|| TemplateCatalog::parse(ENGLISH).expect("bundled templates parse"))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.templates.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }

    /// True when `feature_id` itself or one of its variants has a template.
    pub fn covers(&self, feature_id: &str) -> bool {
        let prefix = format!("{feature_id}.");
        self.keys().any(|k| k == feature_id || k.starts_with(&prefix))
    }

    /// Placeholder names used by the template at `key`, in order.
    pub fn placeholders(&self, key: &str) -> Result<Vec<String>, TextgenError> {
        let t = self
            .get(key)
            .ok_or_else(|| TextgenError::UnknownTemplate(key.to_string()))?;
        Ok(placeholders(t).expect("validated at parse"))
    }

    pub fn render(&self, key: &str, vars: &[(&str, String)]) -> Result<String, TextgenError> {
        let template = self
            .get(key)
            .ok_or_else(|| TextgenError::UnknownTemplate(key.to_string()))?;
        let mut out = String::with_capacity(template.len());
        let mut rest = template;
        while let Some(open) = rest.find('{') {
            out.push_str(&rest[..open]);
            let close = open + rest[open..].find('}').expect("validated at parse");
            let name = &rest[open + 1..close];
            let value = vars
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| TextgenError::UnboundPlaceholder(name.to_string()))?;
            out.push_str(value);
            rest = &rest[close + 1..];
        }
        out.push_str(rest);
        Ok(out)
    }
}

fn placeholders(template: &str) -> Result<Vec<String>, String> {
    let mut names = Vec::new();
    let mut rest = template;
    loop {
        match (rest.find('{'), rest.find('}')) {
            (None, None) => return Ok(names),
            (Some(open), Some(close)) if open < close => {
                let name = &rest[open + 1..close];
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(format!("bad placeholder {{{name}}}"));
                }
                names.push(name.to_string());
                rest = &rest[close + 1..];
            }
            _ => return Err("unbalanced braces".to_string()),
        }
    }
}
