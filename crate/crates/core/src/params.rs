//! Registry of declared experiments and classification of parameter queries.
//!
//! Each experiment declares the set of parameter labels it can realize. A
//! query (a set of labels) is *realizable* when some single experiment
//! covers all of it; otherwise the tuple mixes mutually exclusive
//! experiments and is a *total parameter* — a mathematical variable with no
//! jointly observable value. Mixing the outputs of complementary
//! experiments into one "value for everything" is exactly the assumption
//! this classification rejects.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

/// Errors from registry construction and queries.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("parameter labels must be nonempty")]
    EmptyLabel,
    #[error("experiment {0:?} declares no parameters")]
    EmptyParameters(String),
    #[error("experiment ids must be nonempty")]
    EmptyExperimentId,
    #[error("experiment {0:?} is already registered")]
    DuplicateExperiment(String),
    #[error("label {0:?} is not declared by any experiment")]
    UnknownLabel(String),
    #[error("queries must contain at least one label")]
    EmptyQuery,
    #[error("registry parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A named statistical parameter, e.g. `lambda_12`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParameterLabel(String);

impl ParameterLabel {
    pub fn new(name: impl Into<String>) -> Result<Self, ParamsError> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(ParamsError::EmptyLabel);
        }
        Ok(ParameterLabel(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for ParameterLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// A declared experiment: an id and the parameters it realizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentDef {
    id: String,
    parameters: BTreeSet<ParameterLabel>,
}

impl ExperimentDef {
    pub fn new(
        id: impl Into<String>,
        parameters: impl IntoIterator<Item = ParameterLabel>,
    ) -> Result<Self, ParamsError> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(ParamsError::EmptyExperimentId);
        }
        let parameters: BTreeSet<ParameterLabel> = parameters.into_iter().collect();
        if parameters.is_empty() {
            return Err(ParamsError::EmptyParameters(id));
        }
        Ok(ExperimentDef { id, parameters })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn parameters(&self) -> &BTreeSet<ParameterLabel> {
        &self.parameters
    }
}

/// Outcome of classifying a parameter query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// At least one experiment covers the whole query; all covering ids are
    /// listed, sorted.
    Realizable(Vec<String>),
    /// No single experiment covers the query.
    TotalParameter,
}

impl Classification {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Classification::Realizable(_))
    }
}

/// Immutable collection of declared experiments; updates return new values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExperimentRegistry {
    experiments: BTreeMap<String, BTreeSet<ParameterLabel>>,
}

impl ExperimentRegistry {
    pub fn new() -> Self {
        ExperimentRegistry::default()
    }

    /// Registry with `def` added. Ids must be unique.
    pub fn register_experiment(&self, def: ExperimentDef) -> Result<Self, ParamsError> {
        if self.experiments.contains_key(&def.id) {
            return Err(ParamsError::DuplicateExperiment(def.id));
        }
        let mut next = self.clone();
        next.experiments.insert(def.id, def.parameters);
        Ok(next)
    }

    pub fn len(&self) -> usize {
        self.experiments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experiments.is_empty()
    }

    pub fn experiment_ids(&self) -> impl Iterator<Item = &str> {
        self.experiments.keys().map(String::as_str)
    }

    /// Union of all declared labels.
    pub fn labels(&self) -> BTreeSet<ParameterLabel> {
        self.experiments.values().flatten().cloned().collect()
    }

    /// Classifies a nonempty query of known labels.
    pub fn classify(
        &self,
        query: &BTreeSet<ParameterLabel>,
    ) -> Result<Classification, ParamsError> {
        if query.is_empty() {
            return Err(ParamsError::EmptyQuery);
        }
        let known = self.labels();
        for label in query {
            if !known.contains(label) {
                return Err(ParamsError::UnknownLabel(label.name().to_string()));
            }
        }
        let covering: Vec<String> = self
            .experiments
            .iter()
            .filter(|(_, params)| query.is_subset(params))
            .map(|(id, _)| id.clone())
            .collect();
        if covering.is_empty() {
            Ok(Classification::TotalParameter)
        } else {
            Ok(Classification::Realizable(covering))
        }
    }

    /// True when the query can be assigned a joint value by one experiment —
    /// the premise behind treating all its labels as simultaneously real.
    pub fn realism_assumption_holds(
        &self,
        query: &BTreeSet<ParameterLabel>,
    ) -> Result<bool, ParamsError> {
        Ok(self.classify(query)?.is_realizable())
    }

    /// The standard two-setting, two-station example: experiments `11`,
    /// `12`, `21`, `22`, each realizing one `lambda_ij`/`mu_ij` pair.
    pub fn bell_two_setting() -> Self {
        let mut registry = ExperimentRegistry::new();
        for i in 1..=2 {
            for j in 1..=2 {
                let def = ExperimentDef::new(
                    format!("{i}{j}"),
                    [
                        ParameterLabel::new(format!("lambda_{i}{j}")).expect("nonempty"),
                        ParameterLabel::new(format!("mu_{i}{j}")).expect("nonempty"),
                    ],
                )
                .expect("valid definition");
                registry = registry
                    .register_experiment(def)
                    .expect("distinct experiment ids");
            }
        }
        registry
    }
}

impl std::str::FromStr for ExperimentRegistry {
    type Err = ParamsError;

    /// Parses the plain text registry format: one experiment per line,
    /// `id: label, label, ...`. Blank lines are ignored.
    fn from_str(text: &str) -> Result<Self, ParamsError> {
        let mut registry = ExperimentRegistry::new();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let number = index + 1;
            let (id, rest) = line.split_once(':').ok_or_else(|| ParamsError::Parse {
                line: number,
                message: "expected `id: label, label, ...`".into(),
            })?;
            let labels: Result<Vec<ParameterLabel>, ParamsError> = rest
                .split(',')
                .map(|s| ParameterLabel::new(s.trim()))
                .collect();
            let def = ExperimentDef::new(
                id.trim(),
                labels.map_err(|_| ParamsError::Parse {
                    line: number,
                    message: "empty parameter label".into(),
                })?,
            )
            .map_err(|e| ParamsError::Parse {
                line: number,
                message: e.to_string(),
            })?;
            registry = registry
                .register_experiment(def)
                .map_err(|e| ParamsError::Parse {
                    line: number,
                    message: e.to_string(),
                })?;
        }
        Ok(registry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn label(name: &str) -> ParameterLabel {
        ParameterLabel::new(name).unwrap()
    }

    fn query(names: &[&str]) -> BTreeSet<ParameterLabel> {
        names.iter().map(|n| label(n)).collect()
    }

    fn bell_eight() -> BTreeSet<ParameterLabel> {
        query(&[
            "lambda_11",
            "lambda_12",
            "lambda_21",
            "lambda_22",
            "mu_11",
            "mu_12",
            "mu_21",
            "mu_22",
        ])
    }

    #[test]
    fn registration_examples() {
        let registry = ExperimentRegistry::new()
            .register_experiment(
                ExperimentDef::new("11", [label("lambda_11"), label("mu_11")]).unwrap(),
            )
            .unwrap();
        assert_eq!(registry.len(), 1);
        let duplicate =
            registry.register_experiment(ExperimentDef::new("11", [label("lambda_11")]).unwrap());
        assert_eq!(
            duplicate.unwrap_err(),
            ParamsError::DuplicateExperiment("11".into())
        );
        assert_eq!(ExperimentRegistry::bell_two_setting().len(), 4);
    }

    #[test]
    fn per_experiment_pairs_are_realizable() {
        let registry = ExperimentRegistry::bell_two_setting();
        assert_eq!(
            registry.classify(&query(&["lambda_12", "mu_12"])).unwrap(),
            Classification::Realizable(vec!["12".into()])
        );
        assert_eq!(
            registry.classify(&query(&["lambda_21", "mu_21"])).unwrap(),
            Classification::Realizable(vec!["21".into()])
        );
    }

    #[test]
    fn the_eight_label_tuple_is_a_total_parameter() {
        let registry = ExperimentRegistry::bell_two_setting();
        assert_eq!(
            registry.classify(&bell_eight()).unwrap(),
            Classification::TotalParameter
        );
        assert!(!registry.realism_assumption_holds(&bell_eight()).unwrap());
    }

    #[test]
    fn complementary_singletons_form_a_total_parameter() {
        let registry = ExperimentRegistry::new()
            .register_experiment(ExperimentDef::new("a", [label("lambda_a")]).unwrap())
            .unwrap()
            .register_experiment(ExperimentDef::new("b", [label("lambda_b")]).unwrap())
            .unwrap();
        assert_eq!(
            registry
                .classify(&query(&["lambda_a", "lambda_b"]))
                .unwrap(),
            Classification::TotalParameter
        );
        assert!(registry
            .realism_assumption_holds(&query(&["lambda_a"]))
            .unwrap());
    }

    #[test]
    fn subqueries_of_one_experiment_are_realizable() {
        let registry = ExperimentRegistry::bell_two_setting();
        assert!(registry
            .realism_assumption_holds(&query(&["lambda_11"]))
            .unwrap());
    }

    #[test]
    fn unknown_labels_and_empty_queries_error() {
        let registry = ExperimentRegistry::bell_two_setting();
        assert_eq!(
            registry.classify(&query(&["zeta"])).unwrap_err(),
            ParamsError::UnknownLabel("zeta".into())
        );
        assert_eq!(
            registry.classify(&BTreeSet::new()).unwrap_err(),
            ParamsError::EmptyQuery
        );
    }

    #[test]
    fn registry_text_format_round_trip() {
        let text = "11: lambda_11, mu_11\n\n12: lambda_12, mu_12\n";
        let registry: ExperimentRegistry = text.parse().unwrap();
        assert_eq!(registry.len(), 2);
        assert!(registry
            .realism_assumption_holds(&query(&["lambda_12", "mu_12"]))
            .unwrap());
    }

    #[test]
    fn registry_parse_errors_carry_line_numbers() {
        assert_eq!(
            "just words".parse::<ExperimentRegistry>().unwrap_err(),
            ParamsError::Parse {
                line: 1,
                message: "expected `id: label, label, ...`".into()
            }
        );
        assert!(matches!(
            "a: x\n: y".parse::<ExperimentRegistry>().unwrap_err(),
            ParamsError::Parse { line: 2, .. }
        ));
        assert!(matches!(
            "a: x\na: y".parse::<ExperimentRegistry>().unwrap_err(),
            ParamsError::Parse { line: 2, .. }
        ));
        assert!(matches!(
            "a: x,,y".parse::<ExperimentRegistry>().unwrap_err(),
            ParamsError::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn shared_labels_report_every_covering_experiment() {
        let registry = ExperimentRegistry::new()
            .register_experiment(ExperimentDef::new("a", [label("shared")]).unwrap())
            .unwrap()
            .register_experiment(
                ExperimentDef::new("b", [label("shared"), label("extra")]).unwrap(),
            )
            .unwrap();
        assert_eq!(
            registry.classify(&query(&["shared"])).unwrap(),
            Classification::Realizable(vec!["a".into(), "b".into()])
        );
    }

    proptest! {
        #[test]
        fn total_parameters_are_monotone_under_extension(
            extra in proptest::sample::subsequence(
                vec!["lambda_11", "lambda_12", "lambda_21", "lambda_22",
                     "mu_11", "mu_12", "mu_21", "mu_22"],
                0..8,
            ),
        ) {
            let registry = ExperimentRegistry::bell_two_setting();
            let base = query(&["lambda_11", "mu_22"]);
            prop_assert_eq!(
                registry.classify(&base).unwrap(),
                Classification::TotalParameter
            );
            let mut extended = base;
            extended.extend(extra.iter().map(|n| label(n)));
            prop_assert_eq!(
                registry.classify(&extended).unwrap(),
                Classification::TotalParameter
            );
        }

        #[test]
        fn singleton_queries_over_known_labels_are_realizable(index in 0usize..8) {
            let registry = ExperimentRegistry::bell_two_setting();
            let all: Vec<ParameterLabel> = registry.labels().into_iter().collect();
            let single: BTreeSet<ParameterLabel> = [all[index].clone()].into();
            prop_assert!(registry.classify(&single).unwrap().is_realizable());
        }

        #[test]
        fn classification_ignores_registration_order(swap in proptest::bool::ANY) {
            let defs = || {
                vec![
                    ExperimentDef::new("11", [label("lambda_11"), label("mu_11")]).unwrap(),
                    ExperimentDef::new("22", [label("lambda_22"), label("mu_22")]).unwrap(),
                ]
            };
            let mut ordered = defs();
            if swap {
                ordered.reverse();
            }
            let mut registry = ExperimentRegistry::new();
            for def in ordered {
                registry = registry.register_experiment(def).unwrap();
            }
            prop_assert_eq!(
                registry.classify(&query(&["lambda_22", "mu_22"])).unwrap(),
                Classification::Realizable(vec!["22".into()])
            );
        }
    }
}
