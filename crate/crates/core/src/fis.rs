//! Fuzzy inference selection: a population search over permutations whose
//! low-level operator is kept or replaced after every iteration according to
//! a Mamdani rule base fed with quality, diversification and intensification
//! measures.
//!
//! All randomness comes from a `ChaCha8Rng` seeded with
//! [`FisConfig::seed`], so a run is reproducible on every platform.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fuzzy::{FuzzyError, RuleBase, DIVERSIFICATION, INTENSIFICATION, QUALITY};
use crate::operators::{apply_operator, Operator};
use crate::problem::{Instance, Permutation, Solution};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("permutations differ in length ({0} vs {1})")]
pub struct LengthMismatch(pub usize, pub usize);

/// Fraction of positions at which `p` and `q` differ.
pub fn hamming<F: Scalar>(p: &[usize], q: &[usize]) -> Result<F, LengthMismatch> {
    if p.len() != q.len() {
        return Err(LengthMismatch(p.len(), q.len()));
    }
    if p.is_empty() {
        return Ok(F::zero());
    }
    let differing = p.iter().zip(q).filter(|(a, b)| a != b).count();
    Ok(F::from_count(differing) / F::from_count(p.len()))
}

/// Improvement of `curr` over `prev` mapped to `[0, 1]`, 0.5 meaning no change.
/// Objectives are minimized, so a smaller `curr` scores higher.
pub fn measure_quality<F: Scalar>(prev_obj: usize, curr_obj: usize, n: usize) -> F {
    let delta = F::from_count(prev_obj) - F::from_count(curr_obj);
    let two_n = F::from_count(2 * n.max(1));
    (F::lit(0.5) + delta / two_n).max(F::zero()).min(F::one())
}

/// Mean normalized Hamming distance from `x` to the population.
pub fn measure_diversification<F: Scalar>(x: &Permutation, population: &[Permutation]) -> F {
    if population.is_empty() {
        return F::zero();
    }
    let total = population.iter().fold(F::zero(), |acc, member| {
        acc + hamming::<F>(x.as_slice(), member.as_slice()).expect("equal-length permutations")
    });
    total / F::from_count(population.len())
}

/// Closeness of `x` to the incumbent best.
pub fn measure_intensification<F: Scalar>(x: &Permutation, best: &Permutation) -> F {
    F::one() - hamming::<F>(x.as_slice(), best.as_slice()).expect("equal-length permutations")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FisConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for FisConfig {
    fn default() -> Self {
        Self {
            population_size: 20,
            max_iterations: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FisError {
    #[error("population size must be at least 2 (got {0})")]
    Population(usize),
    #[error("iteration budget must be at least 1")]
    Iterations,
    #[error(transparent)]
    RuleBase(#[from] FuzzyError),
}

impl FisConfig {
    pub fn validate(&self) -> Result<(), FisError> {
        if self.population_size < 2 {
            return Err(FisError::Population(self.population_size));
        }
        if self.max_iterations == 0 {
            return Err(FisError::Iterations);
        }
        Ok(())
    }
}

/// Decision made by [`select_operator`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Selection<F> {
    pub operator: Operator,
    pub crisp: F,
    pub maintained: bool,
}

/// Runs the rule base on the three measures. A crisp output of at least 0.5
/// keeps `current`; anything lower swaps in a uniformly drawn different
/// operator.
pub fn select_operator<F: Scalar, R: Rng + ?Sized>(
    current: Operator,
    rb: &RuleBase<F>,
    quality: F,
    intensification: F,
    diversification: F,
    rng: &mut R,
) -> Result<Selection<F>, FuzzyError> {
    let inputs = HashMap::from([
        (QUALITY, quality),
        (INTENSIFICATION, intensification),
        (DIVERSIFICATION, diversification),
    ]);
    let crisp = rb.infer(&inputs)?;
    Ok(decide(current, crisp, rng))
}

fn decide<F: Scalar, R: Rng + ?Sized>(current: Operator, crisp: F, rng: &mut R) -> Selection<F> {
    if crisp >= F::lit(0.5) {
        return Selection {
            operator: current,
            crisp,
            maintained: true,
        };
    }
    let others: Vec<Operator> = Operator::ALL.into_iter().filter(|&o| o != current).collect();
    Selection {
        operator: others[rng.gen_range(0..others.len())],
        crisp,
        maintained: false,
    }
}

/// Mutable state of one search.
#[derive(Clone, Debug)]
pub struct SearchState {
    pub population: Vec<Permutation>,
    pub objectives: Vec<usize>,
    pub best: Solution,
    pub current_operator: Operator,
    pub previous_best_objective: usize,
}

/// Per-iteration diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    pub operator: Operator,
    pub best_objective: usize,
    pub quality: f64,
    pub diversification: f64,
    pub intensification: f64,
    pub crisp: f64,
}

#[derive(Clone, Debug)]
pub struct FisRun {
    pub best: Solution,
    pub trace: Vec<IterationTrace>,
    pub evaluations: usize,
}

impl FisRun {
    pub fn best_history(&self) -> impl Iterator<Item = usize> + '_ {
        self.trace.iter().map(|t| t.best_objective)
    }
}

/// The search, generic over the scalar used for measures and inference.
pub struct FisSolver<'a, F> {
    instance: &'a Instance,
    rule_base: &'a RuleBase<F>,
    config: FisConfig,
    /// Asserts every produced permutation is valid; used by tests.
    check_permutations: bool,
}

impl<'a, F: Scalar> FisSolver<'a, F> {
    pub fn new(
        instance: &'a Instance,
        rule_base: &'a RuleBase<F>,
        config: FisConfig,
    ) -> Result<Self, FisError> {
        config.validate()?;
        for v in rule_base.inputs() {
            if ![QUALITY, DIVERSIFICATION, INTENSIFICATION].contains(&v.name()) {
                return Err(FuzzyError::UnknownVariable(v.name().to_string()).into());
            }
        }
        Ok(Self {
            instance,
            rule_base,
            config,
            check_permutations: false,
        })
    }

    pub fn checking_permutations(mut self) -> Self {
        self.check_permutations = true;
        self
    }

    fn initial_state(&self, rng: &mut ChaCha8Rng) -> SearchState {
        let n = self.instance.n_tests();
        let population: Vec<Permutation> = (0..self.config.population_size)
            .map(|_| Permutation::random(n, rng))
            .collect();
        let objectives: Vec<usize> = population.iter().map(|p| self.instance.objective(p)).collect();
        let best_idx = argmin(&objectives);
        let best = self.instance.decode(&population[best_idx]);
        let current_operator = Operator::ALL[rng.gen_range(0..Operator::ALL.len())];
        SearchState {
            previous_best_objective: best.objective(),
            population,
            objectives,
            best,
            current_operator,
        }
    }

    pub fn run(&self) -> FisRun {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let mut state = self.initial_state(&mut rng);
        let n = self.instance.n_tests();
        let size = self.config.population_size;
        let mut evaluations = size;
        let mut trace = Vec::with_capacity(self.config.max_iterations);

        for _ in 0..self.config.max_iterations {
            let op = state.current_operator;
            let mut iter_best: Option<(usize, Permutation)> = None;
            for i in 0..size {
                let mut j = rng.gen_range(0..size - 1);
                if j >= i {
                    j += 1;
                }
                let candidate =
                    apply_operator(op, &state.population[i], &state.population[j], &mut rng);
                if self.check_permutations {
                    assert!(candidate.is_valid(), "operator {op} broke a permutation");
                }
                let obj = self.instance.objective(&candidate);
                evaluations += 1;
                if iter_best.as_ref().is_none_or(|(o, _)| obj < *o) {
                    iter_best = Some((obj, candidate.clone()));
                }
                if obj < state.objectives[i] {
                    state.population[i] = candidate;
                    state.objectives[i] = obj;
                }
            }
            let (cand_obj, candidate) = iter_best.expect("population is non-empty");

            let quality: F = measure_quality(state.previous_best_objective, cand_obj, n);
            let diversification: F = measure_diversification(&candidate, &state.population);
            let intensification: F = measure_intensification(&candidate, &state.best.permutation);

            if cand_obj < state.best.objective() {
                state.best = self.instance.decode(&candidate);
            }
            state.previous_best_objective = state.best.objective();

            let selection = select_operator(
                op,
                self.rule_base,
                quality,
                intensification,
                diversification,
                &mut rng,
            )
            .expect("rule-base inputs checked at construction");
            state.current_operator = selection.operator;

            trace.push(IterationTrace {
                operator: op,
                best_objective: state.best.objective(),
                quality: quality.to_f64().unwrap(),
                diversification: diversification.to_f64().unwrap(),
                intensification: intensification.to_f64().unwrap(),
                crisp: selection.crisp.to_f64().unwrap(),
            });
        }

        FisRun {
            best: state.best,
            trace,
            evaluations,
        }
    }
}

fn argmin(values: &[usize]) -> usize {
    values
        .iter()
        .enumerate()
        .min_by_key(|&(i, &v)| (v, i))
        .map(|(i, _)| i)
        .unwrap()
}

/// One FIS run with the given configuration and rule base.
pub fn run_fis<F: Scalar>(
    instance: &Instance,
    config: &FisConfig,
    rule_base: &RuleBase<F>,
) -> Result<FisRun, FisError> {
    Ok(FisSolver::new(instance, rule_base, config.clone())?.run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::builtin;
    use crate::fuzzy::default_rule_base;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming::<f64>(&[0, 1, 2], &[0, 1, 2]).unwrap(), 0.0);
        assert!((hamming::<f64>(&[0, 1, 2], &[1, 0, 2]).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(hamming::<f32>(&[0, 1, 2], &[1, 2, 0]).unwrap(), 1.0);
        assert_eq!(hamming::<f64>(&[0, 1], &[0, 1, 2]), Err(LengthMismatch(2, 3)));
    }

    #[test]
    fn quality_examples() {
        assert_eq!(measure_quality::<f64>(4, 4, 7), 0.5);
        assert!((measure_quality::<f64>(5, 4, 7) - (0.5 + 1.0 / 14.0)).abs() < 1e-12);
        assert!((measure_quality::<f64>(5, 4, 7) - 0.5714).abs() < 1e-4);
        // only reaches 0 when clamped
        assert_eq!(measure_quality::<f64>(1, 7, 7), 0.5 - 6.0 / 14.0);
        assert_eq!(measure_quality::<f64>(1, 40, 7), 0.0);
        assert_eq!(measure_quality::<f64>(40, 1, 7), 1.0);
    }

    #[test]
    fn diversification_examples() {
        let x = p(&[0, 1, 2, 3, 4]);
        assert_eq!(measure_diversification::<f64>(&x, &[x.clone()]), 0.0);
        // distances 0.4 and 0.6
        let a = p(&[1, 0, 2, 3, 4]);
        let b = p(&[1, 2, 0, 3, 4]);
        assert!((measure_diversification::<f64>(&x, &[a, b]) - 0.5).abs() < 1e-12);
        let far = p(&[4, 0, 1, 2, 3]);
        assert_eq!(measure_diversification::<f64>(&x, &[far.clone(), far]), 1.0);
    }

    #[test]
    fn intensification_examples() {
        let x = p(&[0, 1, 2, 3]);
        assert_eq!(measure_intensification::<f64>(&x, &x), 1.0);
        assert_eq!(measure_intensification::<f64>(&x, &p(&[1, 2, 3, 0])), 0.0);
        assert_eq!(measure_intensification::<f64>(&x, &p(&[1, 0, 2, 3])), 0.5);
        assert_eq!(measure_intensification::<f64>(&x, &p(&[0, 1, 3, 2]) ), 0.5);
        let y = p(&[0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(measure_intensification::<f64>(&y, &p(&[1, 0, 2, 3, 4, 5, 6, 7])), 0.75);
    }

    #[test]
    fn select_maintains_on_excellent_quality() {
        let rb = default_rule_base::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = select_operator(Operator::Reversal, &rb, 1.0, 0.5, 0.5, &mut rng).unwrap();
        assert!(s.maintained);
        assert_eq!(s.operator, Operator::Reversal);
        assert!(s.crisp > 0.5);
    }

    #[test]
    fn select_changes_on_poor_stagnation() {
        let rb = default_rule_base::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let s = select_operator(Operator::Swap, &rb, 0.0, 0.0, 0.0, &mut rng).unwrap();
            assert!(!s.maintained);
            assert_ne!(s.operator, Operator::Swap);
            assert!(s.crisp < 0.5);
        }
    }

    #[test]
    fn exact_half_maintains() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = decide(Operator::Insertion, 0.5f64, &mut rng);
        assert!(s.maintained);
        assert_eq!(s.operator, Operator::Insertion);
        let s = decide(Operator::Insertion, 0.4999f64, &mut rng);
        assert!(!s.maintained);
    }

    #[test]
    fn config_validation() {
        let bad = FisConfig {
            population_size: 1,
            ..FisConfig::default()
        };
        assert_eq!(bad.validate(), Err(FisError::Population(1)));
        let bad = FisConfig {
            max_iterations: 0,
            ..FisConfig::default()
        };
        assert_eq!(bad.validate(), Err(FisError::Iterations));
    }

    #[test]
    fn single_requirement_instance() {
        let inst = Instance::from_index_sets("one", 5, &[vec![0, 1, 2, 3, 4]]).unwrap();
        let rb = default_rule_base::<f64>();
        let cfg = FisConfig {
            max_iterations: 1,
            ..FisConfig::default()
        };
        let run = run_fis(&inst, &cfg, &rb).unwrap();
        assert_eq!(run.best.prefix_len, 1);
        assert_eq!(run.trace[0].best_objective, 1);
    }

    #[test]
    fn history_is_monotone_and_best_decodes() {
        let inst = builtin("experiment-4").unwrap();
        let rb = default_rule_base::<f64>();
        let cfg = FisConfig {
            seed: 3,
            ..FisConfig::default()
        };
        let run = FisSolver::new(&inst, &rb, cfg)
            .unwrap()
            .checking_permutations()
            .run();
        let hist: Vec<usize> = run.best_history().collect();
        assert_eq!(hist.len(), 100);
        assert!(hist.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(inst.decode(&run.best.permutation), run.best);
        assert!(inst.is_cover(run.best.selected.iter().copied()));
        assert_eq!(run.evaluations, 20 + 20 * 100);
    }

    #[test]
    fn seeded_runs_repeat() {
        let inst = builtin("experiment-5").unwrap();
        let rb = default_rule_base::<f64>();
        let cfg = FisConfig {
            seed: 42,
            ..FisConfig::default()
        };
        let a = run_fis(&inst, &cfg, &rb).unwrap();
        let b = run_fis(&inst, &cfg, &rb).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn rejects_foreign_rule_base_inputs() {
        use crate::fuzzy::{LinguisticVariable, Rule, Term, Trapezoid};
        let var = LinguisticVariable::new(
            "temperature",
            vec![Term {
                name: "Any".into(),
                shape: Trapezoid::new(0.0, 0.0, 1.0, 1.0).unwrap(),
            }],
        )
        .unwrap();
        let out = default_rule_base::<f64>().output().clone();
        let rb = RuleBase::new(vec![var], out, vec![Rule::new(&[("temperature", "Any")], "Change")])
            .unwrap();
        let inst = builtin("experiment-1").unwrap();
        assert!(matches!(
            run_fis(&inst, &FisConfig::default(), &rb),
            Err(FisError::RuleBase(FuzzyError::UnknownVariable(_)))
        ));
    }
}
