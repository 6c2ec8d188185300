//! The test redundancy reduction problem: instances, coverage and
//! permutation decoding.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive};
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::bitset::ReqSet;
use crate::io::InstanceDocument;

/// A single coverage obligation and the tests able to satisfy it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Requirement {
    pub id: String,
    /// Sorted, deduplicated test indices.
    pub candidates: Vec<usize>,
}

/// A validated problem instance. Immutable once built.
#[derive(Clone, Debug)]
pub struct Instance {
    name: String,
    tests: Vec<String>,
    requirements: Vec<Requirement>,
    /// For each test, the requirements it covers.
    coverage: Vec<ReqSet>,
    /// For each test, the same information as a list.
    covers_list: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("requirement `{0}` has no candidate tests")]
    EmptyCandidates(String),
    #[error("requirement `{requirement}` references unknown test `{test}`")]
    UnknownTest { requirement: String, test: String },
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
}

/// Every violation found in a candidate instance.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct InvalidInstance(pub Vec<ValidationError>);

impl fmt::Display for InvalidInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid instance:")?;
        for e in &self.0 {
            write!(f, " {e};")?;
        }
        Ok(())
    }
}

/// Check a parsed document and build an [`Instance`], collecting every
/// violation rather than stopping at the first.
pub fn validate_instance(doc: &InstanceDocument) -> Result<Instance, InvalidInstance> {
    let mut errors = Vec::new();

    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, t) in doc.tests.iter().enumerate() {
        if index.insert(t.as_str(), i).is_some() {
            errors.push(ValidationError::DuplicateId(t.clone()));
        }
    }

    let mut seen_reqs = HashSet::new();
    let mut requirements = Vec::with_capacity(doc.requirements.len());
    for req in &doc.requirements {
        if !seen_reqs.insert(req.id.as_str()) {
            errors.push(ValidationError::DuplicateId(req.id.clone()));
        }
        if req.candidates.is_empty() {
            errors.push(ValidationError::EmptyCandidates(req.id.clone()));
        }
        let mut candidates = BTreeSet::new();
        for c in &req.candidates {
            match index.get(c.as_str()) {
                Some(&i) => {
                    candidates.insert(i);
                }
                None => errors.push(ValidationError::UnknownTest {
                    requirement: req.id.clone(),
                    test: c.clone(),
                }),
            }
        }
        requirements.push(Requirement {
            id: req.id.clone(),
            candidates: candidates.into_iter().collect(),
        });
    }

    if !errors.is_empty() {
        return Err(InvalidInstance(errors));
    }
    Ok(Instance::from_parts(doc.name.clone(), doc.tests.clone(), requirements))
}

impl Instance {
    /// Builds the instance assuming the invariants already hold.
    fn from_parts(name: String, tests: Vec<String>, requirements: Vec<Requirement>) -> Self {
        let n = tests.len();
        let m = requirements.len();
        let mut coverage = vec![ReqSet::empty(m); n];
        let mut covers_list = vec![Vec::new(); n];
        for (r, req) in requirements.iter().enumerate() {
            for &t in &req.candidates {
                coverage[t].insert(r);
                covers_list[t].push(r);
            }
        }
        Self {
            name,
            tests,
            requirements,
            coverage,
            covers_list,
        }
    }

    /// Builds an instance directly from index-based candidate lists, naming
    /// tests `t0..` and requirements `req1..`.
    pub fn from_index_sets(
        name: impl Into<String>,
        n_tests: usize,
        candidates: &[Vec<usize>],
    ) -> Result<Self, InvalidInstance> {
        let doc = InstanceDocument {
            name: name.into(),
            tests: (0..n_tests).map(|i| format!("t{i}")).collect(),
            requirements: candidates
                .iter()
                .enumerate()
                .map(|(r, cs)| crate::io::RequirementDocument {
                    id: format!("req{}", r + 1),
                    candidates: cs.iter().map(|c| format!("t{c}")).collect(),
                })
                .collect(),
        };
        validate_instance(&doc)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tests(&self) -> &[String] {
        &self.tests
    }

    pub fn requirements(&self) -> &[Requirement] {
        &self.requirements
    }

    pub fn n_tests(&self) -> usize {
        self.tests.len()
    }

    pub fn n_requirements(&self) -> usize {
        self.requirements.len()
    }

    /// Requirements covered by test `t`.
    pub fn coverage(&self, t: usize) -> &ReqSet {
        &self.coverage[t]
    }

    pub fn test_index(&self, id: &str) -> Option<usize> {
        self.tests.iter().position(|t| t == id)
    }

    pub fn test_id(&self, t: usize) -> &str {
        &self.tests[t]
    }

    pub fn to_document(&self) -> InstanceDocument {
        InstanceDocument {
            name: self.name.clone(),
            tests: self.tests.clone(),
            requirements: self
                .requirements
                .iter()
                .map(|r| crate::io::RequirementDocument {
                    id: r.id.clone(),
                    candidates: r.candidates.iter().map(|&c| self.tests[c].clone()).collect(),
                })
                .collect(),
        }
    }

    /// Requirements covered by a selection of tests.
    pub fn covered_by<I: IntoIterator<Item = usize>>(&self, selection: I) -> ReqSet {
        let mut covered = ReqSet::empty(self.n_requirements());
        for t in selection {
            covered.union_with(&self.coverage[t]);
        }
        covered
    }

    /// True iff every requirement has a candidate in `selection`.
    pub fn is_cover<I: IntoIterator<Item = usize>>(&self, selection: I) -> bool {
        self.covered_by(selection).is_full()
    }

    /// Indices of requirements with no candidate in `selection`.
    pub fn uncovered<I: IntoIterator<Item = usize>>(&self, selection: I) -> Vec<usize> {
        let covered = self.covered_by(selection);
        (0..self.n_requirements())
            .filter(|&r| !covered.contains(r))
            .collect()
    }

    /// Decodes a permutation to its shortest covering prefix.
    pub fn decode(&self, permutation: &Permutation) -> Solution {
        let prefix_len = self.prefix_len(permutation.as_slice());
        Solution {
            selected: permutation.as_slice()[..prefix_len].to_vec(),
            permutation: permutation.clone(),
            prefix_len,
        }
    }

    /// Objective value of a permutation: the decoded prefix length.
    pub fn objective(&self, permutation: &Permutation) -> usize {
        self.prefix_len(permutation.as_slice())
    }

    pub(crate) fn prefix_len(&self, order: &[usize]) -> usize {
        let m = self.n_requirements();
        if m == 0 {
            return 1.min(order.len());
        }
        let mut covered = vec![false; m];
        let mut remaining = m;
        for (i, &t) in order.iter().enumerate() {
            for &r in &self.covers_list[t] {
                if !covered[r] {
                    covered[r] = true;
                    remaining -= 1;
                }
            }
            if remaining == 0 {
                return i + 1;
            }
        }
        // Unreachable for a valid instance: the full test set covers.
        order.len()
    }
}

/// Free-function form of [`Instance::is_cover`].
pub fn is_cover(instance: &Instance, selection: &[usize]) -> bool {
    instance.is_cover(selection.iter().copied())
}

pub fn decode(instance: &Instance, permutation: &Permutation) -> Solution {
    instance.decode(permutation)
}

pub fn objective(instance: &Instance, permutation: &Permutation) -> usize {
    instance.objective(permutation)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PermutationError {
    #[error("index {0} out of range for a permutation of length {1}")]
    OutOfRange(usize, usize),
    #[error("index {0} appears more than once")]
    Repeated(usize),
}

/// An arrangement of all test indices `0..n`, each exactly once.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self, PermutationError> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n {
                return Err(PermutationError::OutOfRange(i, n));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(PermutationError::Repeated(i));
            }
        }
        Ok(Self(order))
    }

    pub(crate) fn from_vec_unchecked(order: Vec<usize>) -> Self {
        debug_assert!(Self::new(order.clone()).is_ok());
        Self(order)
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Uniform random permutation (Fisher-Yates).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        Self(order)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn is_valid(&self) -> bool {
        Self::new(self.0.clone()).is_ok()
    }
}

/// A decoded permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub permutation: Permutation,
    pub prefix_len: usize,
    /// The first `prefix_len` entries of the permutation, in order.
    pub selected: Vec<usize>,
}

impl Solution {
    pub fn objective(&self) -> usize {
        self.prefix_len
    }

    pub fn selected_set(&self) -> BTreeSet<usize> {
        self.selected.iter().copied().collect()
    }
}

/// Exact reduction achieved by keeping `kept` of `total` tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub total: usize,
    pub kept: usize,
}

impl Reduction {
    pub fn new(total: usize, kept: usize) -> Self {
        assert!(
            kept >= 1 && kept <= total,
            "reduction needs 1 <= kept <= total (kept={kept}, total={total})"
        );
        Self { total, kept }
    }

    /// `100 * (total - kept) / total`, exact.
    pub fn percent(&self) -> Ratio<u64> {
        Ratio::new(100 * (self.total - self.kept) as u64, self.total as u64)
    }

    /// `(total - kept) / total`, exact.
    pub fn fraction(&self) -> Ratio<u64> {
        Ratio::new((self.total - self.kept) as u64, self.total as u64)
    }

    pub fn as_float<F: Float + FromPrimitive>(&self) -> F {
        let p = self.percent();
        F::from_u64(*p.numer()).unwrap() / F::from_u64(*p.denom()).unwrap()
    }

    /// One-decimal rendering, rounded half up, e.g. `"57.1"`.
    pub fn display(&self) -> String {
        let (n, k) = (self.total as u64, self.kept as u64);
        let tenths = (2000 * (n - k) + n) / (2 * n);
        format!("{}.{}", tenths / 10, tenths % 10)
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}%", self.display())
    }
}

pub fn reduction_percent(total: usize, kept: usize) -> Reduction {
    Reduction::new(total, kept)
}
