//! Mamdani inference: trapezoidal terms, min activation, clipping,
//! max aggregation and sampled centroid defuzzification.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub const DEFAULT_SAMPLES: usize = 1001;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzyError {
    #[error("value {0} outside the universe [0, 1]")]
    Domain(f64),
    #[error("invalid trapezoid ({0}, {1}, {2}, {3}): need 0 <= a <= b <= c <= d <= 1")]
    InvalidTrapezoid(f64, f64, f64, f64),
    #[error("missing input for variable `{0}`")]
    MissingInput(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{variable}` has no term `{term}`")]
    UnknownTerm { variable: String, term: String },
    #[error("rule base has no rules")]
    EmptyRuleBase,
    #[error("input variable `{0}` is not referenced by any rule")]
    UnusedInput(String),
    #[error("terms of `{0}` do not cover [0, 1]")]
    UncoveredUniverse(String),
    #[error("variable `{0}` declares no terms")]
    NoTerms(String),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("rule-base file: {0}")]
    Parse(String),
}

/// Trapezoidal membership function with breakpoints `a <= b <= c <= d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trapezoid<F> {
    a: F,
    b: F,
    c: F,
    d: F,
}

impl<F: Scalar> Trapezoid<F> {
    pub fn new(a: F, b: F, c: F, d: F) -> Result<Self, FuzzyError> {
        let ok = F::zero() <= a && a <= b && b <= c && c <= d && d <= F::one();
        if !ok {
            return Err(FuzzyError::InvalidTrapezoid(
                a.to_f64().unwrap_or(f64::NAN),
                b.to_f64().unwrap_or(f64::NAN),
                c.to_f64().unwrap_or(f64::NAN),
                d.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn points(&self) -> [F; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Membership degree of `x`, which must lie in `[0, 1]`.
    pub fn membership(&self, x: F) -> Result<F, FuzzyError> {
        if !(F::zero() <= x && x <= F::one()) {
            return Err(FuzzyError::Domain(x.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(self.degree(x))
    }

    /// Unchecked evaluation. Vertical sides (`a == b` or `c == d`) give
    /// degree 1 at the breakpoint.
    pub fn degree(&self, x: F) -> F {
        if x < self.a || x > self.d {
            F::zero()
        } else if x >= self.b && x <= self.c {
            F::one()
        } else if x < self.b {
            (x - self.a) / (self.b - self.a)
        } else {
            (self.d - x) / (self.d - self.c)
        }
    }
}

/// Free-function form of [`Trapezoid::membership`].
pub fn membership<F: Scalar>(t: &Trapezoid<F>, x: F) -> Result<F, FuzzyError> {
    t.membership(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term<F> {
    pub name: String,
    pub shape: Trapezoid<F>,
}

/// A variable on the universe `[0, 1]` with named trapezoidal terms.
#[derive(Clone, Debug, PartialEq)]
pub struct LinguisticVariable<F> {
    name: String,
    terms: Vec<Term<F>>,
}

impl<F: Scalar> LinguisticVariable<F> {
    pub fn new(name: impl Into<String>, terms: Vec<Term<F>>) -> Result<Self, FuzzyError> {
        let name = name.into();
        if terms.is_empty() {
            return Err(FuzzyError::NoTerms(name));
        }
        for (i, t) in terms.iter().enumerate() {
            if terms[..i].iter().any(|u| u.name == t.name) {
                return Err(FuzzyError::Duplicate(t.name.clone()));
            }
        }
        // The closed supports [a, d] must jointly cover [0, 1].
        let mut spans: Vec<(F, F)> = terms.iter().map(|t| (t.shape.a, t.shape.d)).collect();
        spans.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut reach = F::zero();
        for (lo, hi) in spans {
            if lo > reach {
                return Err(FuzzyError::UncoveredUniverse(name));
            }
            reach = reach.max(hi);
        }
        if reach < F::one() {
            return Err(FuzzyError::UncoveredUniverse(name));
        }
        Ok(Self { name, terms })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> &[Term<F>] {
        &self.terms
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.name == term)
    }

    pub fn term(&self, name: &str) -> Option<&Trapezoid<F>> {
        self.terms.iter().find(|t| t.name == name).map(|t| &t.shape)
    }
}

/// `if v1 is T1 and v2 is T2 ... then output is T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub antecedent: Vec<(String, String)>,
    pub consequent: String,
}

impl Rule {
    pub fn new(antecedent: &[(&str, &str)], consequent: &str) -> Self {
        Self {
            antecedent: antecedent
                .iter()
                .map(|(v, t)| (v.to_string(), t.to_string()))
                .collect(),
            consequent: consequent.to_string(),
        }
    }
}

#[derive(Clone, Debug)]
struct CompiledRule {
    /// (input variable index, term index)
    antecedent: Vec<(usize, usize)>,
    consequent: usize,
}

#[derive(Clone, Debug)]
pub struct RuleBase<F> {
    inputs: Vec<LinguisticVariable<F>>,
    output: LinguisticVariable<F>,
    rules: Vec<Rule>,
    compiled: Vec<CompiledRule>,
    samples: usize,
}

impl<F: Scalar> RuleBase<F> {
    pub fn new(
        inputs: Vec<LinguisticVariable<F>>,
        output: LinguisticVariable<F>,
        rules: Vec<Rule>,
    ) -> Result<Self, FuzzyError> {
        if rules.is_empty() {
            return Err(FuzzyError::EmptyRuleBase);
        }
        for (i, v) in inputs.iter().enumerate() {
            if inputs[..i].iter().any(|u| u.name == v.name) {
                return Err(FuzzyError::Duplicate(v.name.clone()));
            }
        }
        let mut used = vec![false; inputs.len()];
        let mut compiled = Vec::with_capacity(rules.len());
        for rule in &rules {
            let mut antecedent = Vec::with_capacity(rule.antecedent.len());
            for (var, term) in &rule.antecedent {
                let vi = inputs
                    .iter()
                    .position(|v| &v.name == var)
                    .ok_or_else(|| FuzzyError::UnknownVariable(var.clone()))?;
                let ti = inputs[vi].term_index(term).ok_or_else(|| FuzzyError::UnknownTerm {
                    variable: var.clone(),
                    term: term.clone(),
                })?;
                used[vi] = true;
                antecedent.push((vi, ti));
            }
            let consequent =
                output
                    .term_index(&rule.consequent)
                    .ok_or_else(|| FuzzyError::UnknownTerm {
                        variable: output.name.clone(),
                        term: rule.consequent.clone(),
                    })?;
            compiled.push(CompiledRule {
                antecedent,
                consequent,
            });
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(FuzzyError::UnusedInput(inputs[i].name.clone()));
        }
        Ok(Self {
            inputs,
            output,
            rules,
            compiled,
            samples: DEFAULT_SAMPLES,
        })
    }

    /// Number of grid points used by [`infer`](Self::infer); at least 2.
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples.max(2);
        self
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn inputs(&self) -> &[LinguisticVariable<F>] {
        &self.inputs
    }

    pub fn output(&self) -> &LinguisticVariable<F> {
        &self.output
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    fn ordered_inputs(&self, inputs: &HashMap<&str, F>) -> Result<Vec<F>, FuzzyError> {
        self.inputs
            .iter()
            .map(|v| {
                let x = *inputs
                    .get(v.name.as_str())
                    .ok_or_else(|| FuzzyError::MissingInput(v.name.clone()))?;
                if !(F::zero() <= x && x <= F::one()) {
                    return Err(FuzzyError::Domain(x.to_f64().unwrap_or(f64::NAN)));
                }
                Ok(x)
            })
            .collect()
    }

    /// Firing strength of every rule, in rule order.
    pub fn activations(&self, inputs: &HashMap<&str, F>) -> Result<Vec<F>, FuzzyError> {
        let values = self.ordered_inputs(inputs)?;
        Ok(self.activations_ordered(&values))
    }

    /// As [`activations`](Self::activations), with values given in input-variable order.
    pub fn activations_ordered(&self, values: &[F]) -> Vec<F> {
        assert_eq!(values.len(), self.inputs.len());
        self.compiled
            .iter()
            .map(|rule| {
                rule.antecedent.iter().fold(F::one(), |acc, &(vi, ti)| {
                    acc.min(self.inputs[vi].terms[ti].shape.degree(values[vi]))
                })
            })
            .collect()
    }

    /// Aggregated output curve sampled on a uniform grid over `[0, 1]`.
    pub fn aggregate(&self, activations: &[F], samples: usize) -> Vec<F> {
        assert_eq!(activations.len(), self.compiled.len());
        let mut level = vec![F::zero(); self.output.terms.len()];
        for (rule, &act) in self.compiled.iter().zip(activations) {
            level[rule.consequent] = level[rule.consequent].max(act);
        }
        let last = F::from_count(samples - 1);
        (0..samples)
            .map(|i| {
                let x = F::from_count(i) / last;
                self.output
                    .terms
                    .iter()
                    .zip(&level)
                    .fold(F::zero(), |acc, (term, &h)| acc.max(h.min(term.shape.degree(x))))
            })
            .collect()
    }

    /// Crisp output from given rule activations.
    pub fn defuzzify(&self, activations: &[F], samples: usize) -> F {
        centroid(&self.aggregate(activations, samples))
    }

    pub fn infer(&self, inputs: &HashMap<&str, F>) -> Result<F, FuzzyError> {
        self.infer_with_samples(inputs, self.samples)
    }

    pub fn infer_with_samples(
        &self,
        inputs: &HashMap<&str, F>,
        samples: usize,
    ) -> Result<F, FuzzyError> {
        let acts = self.activations(inputs)?;
        Ok(self.defuzzify(&acts, samples.max(2)))
    }

    /// Inference with values given in input-variable order.
    pub fn infer_ordered(&self, values: &[F]) -> F {
        self.defuzzify(&self.activations_ordered(values), self.samples)
    }
}

/// Centre of mass of a membership curve sampled uniformly over `[0, 1]`.
/// An all-zero curve yields 0.5.
pub fn centroid<F: Scalar>(curve: &[F]) -> F {
    let half = F::lit(0.5);
    if curve.len() < 2 {
        return half;
    }
    let last = F::from_count(curve.len() - 1);
    let (mut moment, mut mass) = (F::zero(), F::zero());
    for (i, &mu) in curve.iter().enumerate() {
        moment = moment + F::from_count(i) / last * mu;
        mass = mass + mu;
    }
    if mass <= F::zero() {
        half
    } else {
        moment / mass
    }
}

pub const QUALITY: &str = "quality";
pub const DIVERSIFICATION: &str = "diversification";
pub const INTENSIFICATION: &str = "intensification";
pub const OPERATOR_SELECTION: &str = "operator-selection";
pub const MAINTAIN: &str = "Maintain";
pub const CHANGE: &str = "Change";

fn trap<F: Scalar>(name: &str, p: [f64; 4]) -> Term<F> {
    Term {
        name: name.to_string(),
        shape: Trapezoid::new(F::lit(p[0]), F::lit(p[1]), F::lit(p[2]), F::lit(p[3])).unwrap(),
    }
}

const LOW: [f64; 4] = [0.0, 0.0, 0.2, 0.4];
const MEDIUM: [f64; 4] = [0.3, 0.45, 0.55, 0.7];
const HIGH: [f64; 4] = [0.6, 0.8, 1.0, 1.0];

/// The nine-rule operator-selection rule base over quality, diversification
/// and intensification.
pub fn default_rule_base<F: Scalar>() -> RuleBase<F> {
    let three = |name: &str, terms: [&str; 3]| {
        LinguisticVariable::new(
            name,
            vec![
                trap(terms[0], LOW),
                trap(terms[1], MEDIUM),
                trap(terms[2], HIGH),
            ],
        )
        .unwrap()
    };
    let inputs = vec![
        three(QUALITY, ["Poor", "Average", "Excellent"]),
        three(DIVERSIFICATION, ["Low", "Medium", "High"]),
        three(INTENSIFICATION, ["Low", "Medium", "High"]),
    ];
    let output = LinguisticVariable::new(
        OPERATOR_SELECTION,
        vec![
            trap(CHANGE, [0.0, 0.0, 0.3, 0.5]),
            trap(MAINTAIN, [0.5, 0.7, 1.0, 1.0]),
        ],
    )
    .unwrap();
    let (q, d, i) = (QUALITY, DIVERSIFICATION, INTENSIFICATION);
    let rules = vec![
        Rule::new(&[(q, "Excellent")], MAINTAIN),
        Rule::new(&[(q, "Average"), (d, "High")], MAINTAIN),
        Rule::new(&[(q, "Average"), (d, "Medium")], MAINTAIN),
        Rule::new(&[(q, "Average"), (d, "Low"), (i, "High")], CHANGE),
        Rule::new(&[(q, "Average"), (d, "Low"), (i, "Medium")], MAINTAIN),
        Rule::new(&[(q, "Poor"), (d, "High")], MAINTAIN),
        Rule::new(&[(q, "Poor"), (d, "Medium"), (i, "Low")], MAINTAIN),
        Rule::new(&[(q, "Poor"), (i, "High")], CHANGE),
        Rule::new(&[(q, "Poor"), (d, "Low")], CHANGE),
    ];
    RuleBase::new(inputs, output, rules).unwrap()
}

// Rule-base file format.

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    pub name: String,
    pub points: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDocument {
    pub name: String,
    pub terms: Vec<TermDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDocument {
    #[serde(rename = "if")]
    pub antecedent: BTreeMap<String, String>,
    #[serde(rename = "then")]
    pub consequent: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleBaseDocument {
    pub inputs: Vec<VariableDocument>,
    pub output: VariableDocument,
    pub rules: Vec<RuleDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl<F: Scalar> RuleBase<F> {
    pub fn from_document(doc: &RuleBaseDocument) -> Result<Self, FuzzyError> {
        let variable = |v: &VariableDocument| -> Result<LinguisticVariable<F>, FuzzyError> {
            let terms = v
                .terms
                .iter()
                .map(|t| {
                    let [a, b, c, d] = t.points;
                    Ok(Term {
                        name: t.name.clone(),
                        shape: Trapezoid::new(F::lit(a), F::lit(b), F::lit(c), F::lit(d))?,
                    })
                })
                .collect::<Result<Vec<_>, FuzzyError>>()?;
            LinguisticVariable::new(v.name.clone(), terms)
        };
        let inputs = doc.inputs.iter().map(variable).collect::<Result<Vec<_>, _>>()?;
        let output = variable(&doc.output)?;
        let rules = doc
            .rules
            .iter()
            .map(|r| Rule {
                antecedent: r
                    .antecedent
                    .iter()
                    .map(|(v, t)| (v.clone(), t.clone()))
                    .collect(),
                consequent: r.consequent.clone(),
            })
            .collect();
        let rb = RuleBase::new(inputs, output, rules)?;
        Ok(match doc.samples {
            Some(s) => rb.with_samples(s),
            None => rb,
        })
    }

    pub fn to_document(&self) -> RuleBaseDocument {
        let variable = |v: &LinguisticVariable<F>| VariableDocument {
            name: v.name.clone(),
            terms: v
                .terms
                .iter()
                .map(|t| TermDocument {
                    name: t.name.clone(),
                    points: t.shape.points().map(|p| p.to_f64().unwrap()),
                })
                .collect(),
        };
        RuleBaseDocument {
            inputs: self.inputs.iter().map(variable).collect(),
            output: variable(&self.output),
            rules: self
                .rules
                .iter()
                .map(|r| RuleDocument {
                    antecedent: r.antecedent.iter().cloned().collect(),
                    consequent: r.consequent.clone(),
                })
                .collect(),
            samples: Some(self.samples),
        }
    }
}

pub fn parse_rule_base<F: Scalar>(text: &str) -> Result<RuleBase<F>, FuzzyError> {
    let doc: RuleBaseDocument =
        serde_json::from_str(text).map_err(|e| FuzzyError::Parse(e.to_string()))?;
    RuleBase::from_document(&doc)
}

pub fn write_rule_base<F: Scalar>(rb: &RuleBase<F>) -> String {
    serde_json::to_string_pretty(&rb.to_document()).expect("rule bases always serialize")
}
