use super::{format_number, FormatConfig, TemplateCatalog, TextgenError};
use crate::facts::{Direction, Monotonic};
use crate::features::{
    find_comparison, ids, Fact, Feature, FeaturePayload, GroupComparison, IntervalView, SortStatus,
    VariableFacts,
};
use crate::model::{DescriptionSegment, SelectionState, SortOrder};

type Vars<'v> = Vec<(&'v str, String)>;

/// Renders features with one template catalog and number format.
#[derive(Debug, Clone, Copy)]
pub struct Renderer<'a> {
    pub templates: &'a TemplateCatalog,
    pub fmt: FormatConfig,
}

impl Default for Renderer<'static> {
    fn default() -> Self {
        Renderer::new(TemplateCatalog::english(), FormatConfig::default())
    }
}

pub fn render_feature(
    feature: &Feature,
    selection: &SelectionState,
    fmt: FormatConfig,
) -> Result<DescriptionSegment, TextgenError> {
    Renderer::new(TemplateCatalog::english(), fmt).render_feature(feature, selection)
}

pub fn update_for_variables(
    feature: &Feature,
    choices: &[String],
    fmt: FormatConfig,
) -> Result<DescriptionSegment, TextgenError> {
    Renderer::new(TemplateCatalog::english(), fmt).update_for_variables(feature, choices)
}

fn segment(feature: &Feature, text: String) -> DescriptionSegment {
    DescriptionSegment {
        feature_id: feature.feature_id.clone(),
        text,
        anchors: feature.anchors.clone(),
        order_index: 0,
        edited: false,
    }
}

/// Choices in order with repeats removed.
fn dedupe(choices: &[String]) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for c in choices {
        if !out.contains(&c.as_str()) {
            out.push(c);
        }
    }
    out
}

/// Text placed inside quotes: a single trailing full stop is dropped so the
/// sentence does not end in `.".`.
fn quoted(text: &str) -> String {
    let t = text.trim();
    match t.strip_suffix('.') {
        Some(rest) if !rest.ends_with('.') => rest.to_string(),
        _ => t.to_string(),
    }
}

/// Appends a full stop unless the text already ends a sentence.
pub(crate) fn terminate(text: &str) -> String {
    let t = text.trim();
    if t.ends_with(['.', '!', '?', '…']) {
        t.to_string()
    } else {
        format!("{t}.")
    }
}

impl<'a> Renderer<'a> {
    pub fn new(templates: &'a TemplateCatalog, fmt: FormatConfig) -> Self {
        Renderer { templates, fmt }
    }

    /// Renders one feature; multivariate features take their variables from
    /// `selection.variable_choices`.
    pub fn render_feature(
        &self,
        feature: &Feature,
        selection: &SelectionState,
    ) -> Result<DescriptionSegment, TextgenError> {
        let choices = if feature.requires_variable {
            let c = selection
                .variable_choices
                .get(&feature.feature_id)
                .filter(|c| !c.is_empty())
                .ok_or_else(|| TextgenError::MissingVariableChoice(feature.feature_id.clone()))?;
            Some(c.as_slice())
        } else {
            None
        };
        let text = self.text(feature, choices, selection.context_text.as_deref())?;
        Ok(segment(feature, text))
    }

    /// Re-renders `feature` for the chosen variables. Two choices add a
    /// between-variable comparison sentence.
    pub fn update_for_variables(
        &self,
        feature: &Feature,
        choices: &[String],
    ) -> Result<DescriptionSegment, TextgenError> {
        if choices.is_empty() {
            return Err(TextgenError::MissingVariableChoice(feature.feature_id.clone()));
        }
        let text = self.text(feature, Some(choices), None)?;
        Ok(segment(feature, text))
    }

    fn render(&self, key: &str, vars: &[(&str, String)]) -> Result<String, TextgenError> {
        self.templates.render(key, vars)
    }

    fn num(&self, v: f64) -> Result<String, TextgenError> {
        format_number(v, self.fmt)
    }

    fn list(&self, items: Vec<String>) -> Result<String, TextgenError> {
        let and = self.render("list.and", &[])?;
        Ok(match items.len() {
            0 => String::new(),
            1 => items.into_iter().next().unwrap(),
            n => format!("{} {and} {}", items[..n - 1].join(", "), items[n - 1]),
        })
    }

    fn label(&self, label: &str, row: usize) -> Result<String, TextgenError> {
        if label.is_empty() {
            self.render("phrase.row", &[("number", (row + 1).to_string())])
        } else {
            Ok(label.to_string())
        }
    }

    fn phrase(&self, key: &str, variable: &str, multivariate: bool) -> Result<String, TextgenError> {
        if multivariate {
            Ok(format!(" {}", self.render(key, &[("variable", variable.to_string())])?))
        } else {
            Ok(String::new())
        }
    }

    fn text(
        &self,
        feature: &Feature,
        choices: Option<&[String]>,
        context: Option<&str>,
    ) -> Result<String, TextgenError> {
        let id = feature.feature_id.as_str();
        match &feature.payload {
            FeaturePayload::ChartType { chart_type } => {
                let chart = self.render(&format!("chart.{}", chart_type.as_str()), &[])?;
                self.render(ids::TYPE, &[("chart", chart)])
            }
            FeaturePayload::Text { text } if id == ids::TITLE && text.is_empty() => {
                self.render("general.title.missing", &[])
            }
            FeaturePayload::Text { text } => self.render(id, &[("text", quoted(text))]),
            FeaturePayload::Notes { footnote, source } => {
                let mut vars: Vars = Vec::new();
                if let Some(n) = footnote {
                    vars.push(("note", quoted(n)));
                }
                if let Some(s) = source {
                    vars.push(("source", s.clone()));
                }
                let key = match (footnote, source) {
                    (Some(_), Some(_)) => "general.footnote.both",
                    (None, Some(_)) => "general.footnote.source",
                    _ => "general.footnote.note",
                };
                self.render(key, &vars)
            }
            FeaturePayload::Axes {
                independent,
                dependent,
                horizontal_layout,
            } => {
                let mut vars: Vars = vec![("independent", independent.clone())];
                let mut key = match dependent {
                    Some(d) => {
                        vars.push(("dependent", d.clone()));
                        "general.axes.both".to_string()
                    }
                    None => "general.axes.independent".to_string(),
                };
                if *horizontal_layout {
                    key.push_str(".horizontal");
                }
                self.render(&key, &vars)
            }
            FeaturePayload::Colors {
                colors,
                associations,
            } => {
                if !associations.is_empty() {
                    let items = associations
                        .iter()
                        .map(|a| {
                            self.render(
                                "colors.assoc.item",
                                &[("variable", a.variable.clone()), ("name", a.name.clone())],
                            )
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    self.render("general.colors.assoc", &[("colors", self.list(items)?)])
                } else if colors.len() == 1 {
                    self.render("general.colors.one", &[("name", colors[0].name.clone())])
                } else {
                    let names = colors.iter().map(|c| c.name.clone()).collect();
                    self.render("general.colors.list", &[("colors", self.list(names)?)])
                }
            }
            FeaturePayload::Sorting(s) => {
                let key = match s.detected {
                    SortStatus::Ascending => "general.sorting.asc",
                    SortStatus::Descending => "general.sorting.desc",
                    SortStatus::Constant => "general.sorting.constant",
                    SortStatus::Unsorted => "general.sorting.unsorted",
                };
                let mut text = self.render(key, &[("variable", s.variable.clone())])?;
                if let (true, Some(declared)) = (s.mismatch, s.declared) {
                    let word = self.render(
                        match declared {
                            SortOrder::Ascending => "sort.asc",
                            SortOrder::Descending => "sort.desc",
                        },
                        &[],
                    )?;
                    text.push(' ');
                    text.push_str(&self.render("general.sorting.mismatch", &[("declared", word)])?);
                }
                Ok(text)
            }
            FeaturePayload::MissingData { dropped } => {
                let items = dropped
                    .iter()
                    .map(|d| {
                        let key = if d.rows.len() == 1 {
                            "missing.item.one"
                        } else {
                            "missing.item.many"
                        };
                        self.render(
                            key,
                            &[
                                ("variable", d.variable.clone()),
                                ("count", d.rows.len().to_string()),
                            ],
                        )
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                self.render(ids::MISSING, &[("items", self.list(items)?)])
            }
            FeaturePayload::Facts(vf) => self.facts_text(feature, vf, choices),
            FeaturePayload::Comparison { comparisons } => {
                self.comparison_text(feature, comparisons, choices)
            }
            FeaturePayload::Context => {
                let text = context
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .ok_or(TextgenError::MissingContextText)?;
                self.render(ids::CONTEXT, &[("text", terminate(text))])
            }
        }
    }

    fn facts_text(
        &self,
        feature: &Feature,
        vf: &VariableFacts,
        choices: Option<&[String]>,
    ) -> Result<String, TextgenError> {
        let multivariate = feature.requires_variable;
        let vars: Vec<&str> = match choices {
            Some(c) => dedupe(c),
            None => vf.entries.iter().map(|e| e.variable.as_str()).collect(),
        };
        let mut sentences = Vec::new();
        for v in &vars {
            let fact = vf
                .entry(v)
                .ok_or_else(|| TextgenError::UnknownVariable(v.to_string()))?;
            sentences.push(self.fact_sentence(v, fact, multivariate)?);
        }
        if multivariate && vars.len() == 2 {
            let cmp = vf
                .comparison(vars[0], vars[1])
                .ok_or_else(|| TextgenError::UnknownVariable(vars[1].to_string()))?;
            sentences.push(match feature.feature_id.as_str() {
                ids::EXTREMA => self.gap_sentence(&cmp)?,
                ids::MEAN => self.mean_sentence(&cmp)?,
                _ => self.rows_sentence(&cmp)?,
            });
        }
        Ok(sentences.join(" "))
    }

    fn comparison_text(
        &self,
        feature: &Feature,
        comparisons: &[GroupComparison],
        choices: Option<&[String]>,
    ) -> Result<String, TextgenError> {
        let pairs: Vec<GroupComparison> = match choices {
            None => comparisons.to_vec(),
            Some(c) => {
                let vars = dedupe(c);
                for v in &vars {
                    if !comparisons.iter().any(|g| g.a == *v || g.b == *v) {
                        return Err(TextgenError::UnknownVariable(v.to_string()));
                    }
                }
                if vars.len() < 2 {
                    return Err(TextgenError::NeedTwoVariables(feature.feature_id.clone()));
                }
                let mut pairs = Vec::new();
                for (i, a) in vars.iter().enumerate() {
                    for b in &vars[i + 1..] {
                        pairs.push(
                            find_comparison(comparisons, a, b)
                                .ok_or_else(|| TextgenError::UnknownVariable(b.to_string()))?,
                        );
                    }
                }
                pairs
            }
        };
        let mut sentences = Vec::new();
        for cmp in &pairs {
            sentences.push(self.rows_sentence(cmp)?);
            sentences.push(self.gap_sentence(cmp)?);
        }
        Ok(sentences.join(" "))
    }

    fn rows_sentence(&self, c: &GroupComparison) -> Result<String, TextgenError> {
        if c.rows.is_empty() {
            return self.gap_sentence(c);
        }
        self.render(
            "fact.comparison.rows",
            &[
                ("a", c.a.clone()),
                ("b", c.b.clone()),
                ("a_larger", c.a_larger.to_string()),
                ("b_larger", c.b_larger.to_string()),
                ("count", c.rows.len().to_string()),
            ],
        )
    }

    fn gap_sentence(&self, c: &GroupComparison) -> Result<String, TextgenError> {
        match &c.max_gap {
            Some(g) => self.render(
                "fact.comparison.gap",
                &[
                    ("a", c.a.clone()),
                    ("b", c.b.clone()),
                    ("gap", self.num(g.gap)?),
                    ("label", self.label(&g.label, g.row)?),
                ],
            ),
            None => self.render("fact.comparison.gap.none", &[("a", c.a.clone()), ("b", c.b.clone())]),
        }
    }

    fn mean_sentence(&self, c: &GroupComparison) -> Result<String, TextgenError> {
        if c.rows.is_empty() {
            return self.gap_sentence(c);
        }
        let (mean_a, mean_b) = (self.num(c.mean_a)?, self.num(c.mean_b)?);
        let key = if mean_a == mean_b {
            "compare.mean.equal"
        } else if c.mean_a > c.mean_b {
            "compare.mean.higher"
        } else {
            "compare.mean.lower"
        };
        self.render(
            key,
            &[
                ("a", c.a.clone()),
                ("b", c.b.clone()),
                ("mean_a", mean_a),
                ("mean_b", mean_b),
            ],
        )
    }

    fn interval_vars(&self, iv: &IntervalView) -> Result<Vars<'static>, TextgenError> {
        Ok(vec![
            ("start", self.num(iv.start_value)?),
            ("end", self.num(iv.end_value)?),
            ("start_label", self.label(&iv.start_label, iv.start_row)?),
            ("end_label", self.label(&iv.end_label, iv.end_row)?),
        ])
    }

    fn intervals_list(&self, intervals: &[IntervalView]) -> Result<String, TextgenError> {
        let items = intervals
            .iter()
            .map(|iv| {
                let key = match iv.direction {
                    Direction::Rising => "interval.rising",
                    Direction::Falling => "interval.falling",
                    Direction::Constant => "interval.constant",
                };
                self.render(key, &self.interval_vars(iv)?)
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.list(items)
    }

    fn fact_sentence(&self, variable: &str, fact: &Fact, multivariate: bool) -> Result<String, TextgenError> {
        let of_variable = self.phrase("phrase.of_variable", variable, multivariate)?;
        let in_variable = self.phrase("phrase.in_variable", variable, multivariate)?;
        match fact {
            Fact::Extrema(e) => {
                let key = if e.max_value == e.min_value {
                    "fact.extrema.same"
                } else {
                    "fact.extrema"
                };
                let vars: Vars = vec![
                    ("of_variable", of_variable),
                    ("max", self.num(e.max_value)?),
                    ("max_label", self.label(&e.max_label, e.max_row)?),
                    ("min", self.num(e.min_value)?),
                    ("min_label", self.label(&e.min_label, e.min_row)?),
                ];
                self.render(key, &vars)
            }
            Fact::Mean { value } => {
                self.render(ids::MEAN, &[("of_variable", of_variable), ("mean", self.num(*value)?)])
            }
            Fact::Stddev { value } => self.render(
                ids::STDDEV,
                &[("of_variable", of_variable), ("stddev", self.num(*value)?)],
            ),
            Fact::Median { value } => self.render(
                ids::MEDIAN,
                &[("of_variable", of_variable), ("median", self.num(*value)?)],
            ),
            Fact::Outliers { outliers } => {
                let items = outliers
                    .iter()
                    .map(|o| {
                        self.render(
                            "outlier.item",
                            &[("value", self.num(o.value)?), ("label", self.label(&o.label, o.row)?)],
                        )
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let key = match items.len() {
                    0 => "fact.outliers.none",
                    1 => "fact.outliers.one",
                    _ => "fact.outliers.many",
                };
                self.render(
                    key,
                    &[
                        ("in_variable", in_variable),
                        ("count", items.len().to_string()),
                        ("outliers", self.list(items)?),
                    ],
                )
            }
            Fact::Trend(t) => {
                let (Some(first), Some(last)) = (t.intervals.first(), t.intervals.last()) else {
                    return Err(TextgenError::UnknownVariable(variable.to_string()));
                };
                let span = IntervalView {
                    end_value: last.end_value,
                    end_label: last.end_label.clone(),
                    end_row: last.end_row,
                    ..first.clone()
                };
                let key = match t.monotonic {
                    Some(Monotonic::Increasing) => "fact.trend.increasing",
                    Some(Monotonic::Decreasing) => "fact.trend.decreasing",
                    Some(Monotonic::Constant) => "fact.trend.constant",
                    None if t.reduced => "fact.trend.significant",
                    None => "fact.trend.intervals",
                };
                let mut vars = self.interval_vars(&span)?;
                vars.push(("of_variable", of_variable));
                if t.monotonic.is_none() {
                    let shown = if t.reduced { &t.significant } else { &t.intervals };
                    vars.push(("intervals", self.intervals_list(shown)?));
                    vars.push(("count", t.intervals.len().to_string()));
                    vars.push(("changes", (t.intervals.len() - 1).to_string()));
                }
                self.render(key, &vars)
            }
            Fact::Correlation { x_name, r } => {
                let key = match r {
                    None => "fact.correlation.undefined",
                    Some(r) if *r >= 0.7 => "fact.correlation.strong_positive",
                    Some(r) if *r >= 0.3 => "fact.correlation.moderate_positive",
                    Some(r) if *r > -0.3 => "fact.correlation.weak",
                    Some(r) if *r > -0.7 => "fact.correlation.moderate_negative",
                    Some(_) => "fact.correlation.strong_negative",
                };
                let mut vars: Vars = vec![("x_name", x_name.clone()), ("variable", variable.to_string())];
                if let Some(r) = r {
                    vars.push(("r", self.num(*r)?));
                }
                self.render(key, &vars)
            }
            Fact::Pie(p) => {
                let share = |i: usize| -> Result<String, TextgenError> {
                    self.render("share", &[("percent", self.num(p.slices[i].share * 100.0)?)])
                };
                let name = |i: usize| self.label(&p.slices[i].label, p.slices[i].row);
                let key = if p.slices.len() == 1 {
                    "fact.pie.single"
                } else {
                    ids::PIE
                };
                self.render(
                    key,
                    &[
                        ("of_variable", of_variable),
                        ("in_variable", in_variable),
                        ("largest_label", name(p.largest)?),
                        ("largest_share", share(p.largest)?),
                        ("smallest_label", name(p.smallest)?),
                        ("smallest_share", share(p.smallest)?),
                    ],
                )
            }
        }
    }
}
