//! Simulated annealing over permutations with geometric cooling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::operators::swap_at;
use crate::problem::{Instance, Permutation, Solution};

/// Geometric cooling never reaches zero, so the schedule stops at this
/// temperature when the configured final temperature is lower.
pub const MIN_STOP_TEMPERATURE: f64 = 0.001;

#[derive(Clone, Debug, PartialEq)]
pub struct SaParams {
    pub alpha: f64,
    pub t_initial: f64,
    pub t_final: f64,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            alpha: 0.990,
            t_initial: 2984.975,
            t_final: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SaError {
    #[error("cooling factor must lie in (0, 1), got {0}")]
    Alpha(f64),
    #[error("need t_initial > t_final >= 0 (got {0} and {1})")]
    Temperatures(f64, f64),
}

impl SaParams {
    pub fn validate(&self) -> Result<(), SaError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(SaError::Alpha(self.alpha));
        }
        if !(self.t_final >= 0.0 && self.t_initial > self.t_final) {
            return Err(SaError::Temperatures(self.t_initial, self.t_final));
        }
        Ok(())
    }

    pub fn stop_temperature(&self) -> f64 {
        self.t_final.max(MIN_STOP_TEMPERATURE)
    }

    /// Number of temperature steps the schedule performs.
    pub fn steps(&self) -> usize {
        let stop = self.stop_temperature();
        let mut t = self.t_initial;
        let mut k = 0;
        while t > stop {
            t *= self.alpha;
            k += 1;
        }
        k
    }
}

#[derive(Clone, Debug)]
pub struct SaRun {
    pub best: Solution,
    /// Best-ever objective after each step.
    pub history: Vec<usize>,
    pub accepted_worse: usize,
}

/// One proposal (a random position swap) per temperature step. Improving
/// and equal moves are always taken; a worsening move of size `delta` is
/// taken with probability `exp(-delta / T)`.
pub fn simulated_annealing(instance: &Instance, params: &SaParams) -> Result<SaRun, SaError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = instance.n_tests();
    let mut current = Permutation::random(n, &mut rng);
    let mut current_obj = instance.objective(&current);
    let mut best = instance.decode(&current);
    let mut history = Vec::new();
    let mut accepted_worse = 0;

    let stop = params.stop_temperature();
    let mut temperature = params.t_initial;
    while temperature > stop {
        if n >= 2 {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let candidate = swap_at(&current, i, j);
            let obj = instance.objective(&candidate);
            let accept = if obj <= current_obj {
                true
            } else {
                let delta = (obj - current_obj) as f64;
                let worse = rng.gen::<f64>() < (-delta / temperature).exp();
                accepted_worse += usize::from(worse);
                worse
            };
            if accept {
                current = candidate;
                current_obj = obj;
                if current_obj < best.objective() {
                    best = instance.decode(&current);
                }
            }
        }
        history.push(best.objective());
        temperature *= params.alpha;
    }

    Ok(SaRun {
        best,
        history,
        accepted_worse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::builtin;

    #[test]
    fn default_schedule_length() {
        assert_eq!(SaParams::default().steps(), 1484);
    }

    #[test]
    fn parameter_validation() {
        let p = SaParams {
            alpha: 1.0,
            ..SaParams::default()
        };
        assert_eq!(p.validate(), Err(SaError::Alpha(1.0)));
        let p = SaParams {
            t_initial: 1.0,
            t_final: 2.0,
            ..SaParams::default()
        };
        assert!(matches!(p.validate(), Err(SaError::Temperatures(..))));
    }

    #[test]
    fn zero_step_schedule_returns_initial_permutation() {
        let e1 = builtin("experiment-1").unwrap();
        let params = SaParams {
            t_initial: 0.0005,
            t_final: 0.0,
            seed: 9,
            ..SaParams::default()
        };
        assert_eq!(params.steps(), 0);
        let run = simulated_annealing(&e1, &params).unwrap();
        assert!(run.history.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let initial = Permutation::random(e1.n_tests(), &mut rng);
        assert_eq!(run.best, e1.decode(&initial));
    }

    #[test]
    fn history_monotone_and_cover() {
        let e4 = builtin("experiment-4").unwrap();
        let run = simulated_annealing(&e4, &SaParams { seed: 5, ..SaParams::default() }).unwrap();
        assert_eq!(run.history.len(), 1484);
        assert!(run.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(e4.is_cover(run.best.selected.iter().copied()));
    }
}
