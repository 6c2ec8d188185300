//! Exact minimum cover by branch and bound, with enumeration of every
//! optimal cover.
//!
//! Tests are bits of a `u64`, so instances are limited to 64 tests. Each
//! requirement is stored as the mask of its candidate tests.

use serde::Serialize;
use thiserror::Error;

use crate::baselines::greedy_ge;
use crate::problem::Instance;

pub const MAX_TESTS: usize = 64;
pub const DEFAULT_ENUMERATION_CAP: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {0} tests; the exact solver supports at most {MAX_TESTS}")]
    TooLarge(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub minimum: usize,
    /// Ascending test indices.
    pub witness: Vec<usize>,
    /// Search nodes expanded while proving optimality.
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Enumeration {
    pub minimum: usize,
    /// Distinct minimum covers, ascending indices, lexicographic order.
    pub covers: Vec<Vec<usize>>,
    /// False when the cap cut the listing short.
    pub complete: bool,
}

fn mask_to_vec(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask & (1 << i) != 0).collect()
}

fn bit(t: usize) -> u64 {
    1u64 << t
}

struct Problem {
    /// Candidate mask of each requirement still in play.
    reqs: Vec<u64>,
}

impl Problem {
    fn new(instance: &Instance) -> Result<Self, OracleError> {
        if instance.n_tests() > MAX_TESTS {
            return Err(OracleError::TooLarge(instance.n_tests()));
        }
        let reqs = instance
            .requirements()
            .iter()
            .map(|r| r.candidates.iter().fold(0u64, |m, &t| m | bit(t)))
            .collect();
        Ok(Self { reqs })
    }
}

/// Essential tests, dominated requirements and dominated tests, applied to
/// a fixpoint. Returns the forced tests, the surviving requirement masks
/// and the allowed-test mask.
fn reduce(mut reqs: Vec<u64>, all_tests: u64) -> (u64, Vec<u64>, u64) {
    let mut forced = 0u64;
    let mut allowed = all_tests;
    loop {
        let mut changed = false;

        for r in &mut reqs {
            *r &= allowed;
        }
        let essentials = reqs
            .iter()
            .filter(|m| m.count_ones() == 1)
            .fold(0u64, |acc, &m| acc | m);
        if essentials != 0 {
            forced |= essentials;
            allowed &= !essentials;
            reqs.retain(|&m| m & essentials == 0);
            changed = true;
        }

        // A requirement whose candidates include all of another's is
        // satisfied whenever the other is.
        reqs.sort_unstable_by_key(|m| (m.count_ones(), *m));
        reqs.dedup();
        let mut keep = vec![true; reqs.len()];
        for i in 0..reqs.len() {
            for j in 0..i {
                if keep[j] && reqs[j] & !reqs[i] == 0 {
                    keep[i] = false;
                    changed = true;
                    break;
                }
            }
        }
        let mut it = keep.iter();
        reqs.retain(|_| *it.next().unwrap());

        // A test whose requirement set is inside another's can be dropped;
        // among equal sets the lowest index survives.
        let rows: Vec<(usize, Vec<bool>)> = mask_to_vec(allowed)
            .into_iter()
            .map(|t| (t, reqs.iter().map(|&m| m & bit(t) != 0).collect()))
            .collect();
        for (t, row) in &rows {
            let dominated = rows.iter().any(|(u, other)| {
                u != t
                    && row.iter().zip(other).all(|(&a, &b)| !a || b)
                    && (row != other || u < t)
            });
            if dominated {
                allowed &= !bit(*t);
                changed = true;
            }
        }

        if !changed {
            break;
        }
    }
    (forced, reqs, allowed)
}

/// Size of a greedily built family of requirements with pairwise disjoint
/// candidate sets; each needs its own test.
fn disjoint_lower_bound(reqs: &[u64], uncovered: &[usize], allowed: u64) -> usize {
    let mut order: Vec<u64> = uncovered.iter().map(|&r| reqs[r] & allowed).collect();
    order.sort_unstable_by_key(|m| m.count_ones());
    let mut used = 0u64;
    let mut bound = 0;
    for m in order {
        if m & used == 0 {
            used |= m;
            bound += 1;
        }
    }
    bound
}

enum Mode {
    Minimize,
    Enumerate { bound: usize, cap: usize, found: Vec<u64>, truncated: bool },
}

struct Search<'a> {
    reqs: &'a [u64],
    best_size: usize,
    best_set: u64,
    mode: Mode,
    nodes: u64,
}

impl Search<'_> {
    fn limit(&self) -> usize {
        match self.mode {
            Mode::Minimize => self.best_size,
            Mode::Enumerate { bound, .. } => bound + 1,
        }
    }

    fn dfs(&mut self, chosen: u64, count: usize, uncovered: &[usize], mut allowed: u64) {
        self.nodes += 1;
        if let Mode::Enumerate { truncated: true, .. } = self.mode {
            return;
        }
        if uncovered.is_empty() {
            match &mut self.mode {
                Mode::Minimize => {
                    if count < self.best_size {
                        self.best_size = count;
                        self.best_set = chosen;
                    }
                }
                Mode::Enumerate {
                    bound,
                    cap,
                    found,
                    truncated,
                } => {
                    if count == *bound {
                        if found.len() == *cap {
                            *truncated = true;
                        } else {
                            found.push(chosen);
                        }
                    }
                }
            }
            return;
        }
        if count + disjoint_lower_bound(self.reqs, uncovered, allowed) >= self.limit() {
            return;
        }
        let &branch = uncovered
            .iter()
            .min_by_key(|&&r| ((self.reqs[r] & allowed).count_ones(), r))
            .unwrap();
        let mut options = self.reqs[branch] & allowed;
        while options != 0 {
            let t = options.trailing_zeros() as usize;
            options &= options - 1;
            let rest: Vec<usize> = uncovered
                .iter()
                .copied()
                .filter(|&r| self.reqs[r] & bit(t) == 0)
                .collect();
            allowed &= !bit(t);
            self.dfs(chosen | bit(t), count + 1, &rest, allowed);
        }
    }
}

/// Exact minimum cover of `instance`.
pub fn minimum_cover(instance: &Instance) -> Result<OracleResult, OracleError> {
    let problem = Problem::new(instance)?;
    let n = instance.n_tests();
    let all = if n == 64 { u64::MAX } else { bit(n) - 1 };
    let (forced, reqs, allowed) = reduce(problem.reqs, all);

    // The greedy size bounds the optimum, and the reductions keep at least
    // one optimal cover, so a residual of at most `greedy - forced` exists.
    let upper = greedy_ge(instance).len();
    let base = forced.count_ones() as usize;
    let uncovered: Vec<usize> = (0..reqs.len()).collect();
    let mut search = Search {
        reqs: &reqs,
        best_size: upper - base + 1,
        best_set: 0,
        mode: Mode::Minimize,
        nodes: 0,
    };
    search.dfs(0, 0, &uncovered, allowed);
    let set = forced | search.best_set;
    let minimum = set.count_ones() as usize;
    let witness = mask_to_vec(set);
    debug_assert!(instance.is_cover(witness.iter().copied()));
    Ok(OracleResult {
        minimum,
        witness,
        nodes: search.nodes,
    })
}

/// Every distinct cover of minimum size, up to `cap`.
///
/// Dominance reductions are skipped here since they discard optimal covers
/// that use a dominated test; only essential tests are fixed up front.
pub fn enumerate_minimum_covers(instance: &Instance, cap: usize) -> Result<Enumeration, OracleError> {
    let minimum = minimum_cover(instance)?.minimum;
    let problem = Problem::new(instance)?;
    let n = instance.n_tests();
    let all = if n == 64 { u64::MAX } else { bit(n) - 1 };

    let forced = problem
        .reqs
        .iter()
        .filter(|m| m.count_ones() == 1)
        .fold(0u64, |acc, &m| acc | m);
    let reqs: Vec<u64> = problem.reqs.into_iter().filter(|&m| m & forced == 0).collect();
    let base = forced.count_ones() as usize;

    let uncovered: Vec<usize> = (0..reqs.len()).collect();
    let mut search = Search {
        reqs: &reqs,
        best_size: usize::MAX,
        best_set: 0,
        mode: Mode::Enumerate {
            bound: minimum - base,
            cap,
            found: Vec::new(),
            truncated: false,
        },
        nodes: 0,
    };
    search.dfs(0, 0, &uncovered, all & !forced);
    let Mode::Enumerate { found, truncated, .. } = search.mode else {
        unreachable!()
    };
    let mut covers: Vec<Vec<usize>> = found.into_iter().map(|m| mask_to_vec(m | forced)).collect();
    covers.sort();
    Ok(Enumeration {
        minimum,
        covers,
        complete: !truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::builtin;

    fn ids(inst: &Instance, names: &[&str]) -> Vec<usize> {
        let mut v: Vec<usize> = names.iter().map(|n| inst.test_index(n).unwrap()).collect();
        v.sort_unstable();
        v
    }

    /// Plain enumeration of all subsets in increasing size.
    fn brute_force_minimum(inst: &Instance) -> usize {
        let n = inst.n_tests();
        (1..=n)
            .find(|&k| {
                (0u64..1 << n)
                    .filter(|m| m.count_ones() as usize == k)
                    .any(|m| inst.is_cover(mask_to_vec(m)))
            })
            .unwrap()
    }

    #[test]
    fn experiment_one() {
        let e1 = builtin("experiment-1").unwrap();
        let r = minimum_cover(&e1).unwrap();
        assert_eq!(r.minimum, 3);
        assert_eq!(brute_force_minimum(&e1), 3);
        assert!(e1.is_cover(r.witness.iter().copied()));
        let all = enumerate_minimum_covers(&e1, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(all.complete);
        assert!(all.covers.contains(&ids(&e1, &["t1", "t2", "t4"])));
        assert!(all.covers.contains(&ids(&e1, &["t2", "t4", "t7"])));
    }

    #[test]
    fn experiment_two() {
        let e2 = builtin("experiment-2").unwrap();
        assert_eq!(minimum_cover(&e2).unwrap().minimum, 3);
        let all = enumerate_minimum_covers(&e2, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(all.covers.contains(&ids(&e2, &["t1", "t2", "t4"])));
        assert!(all.covers.contains(&ids(&e2, &["t1", "t8", "t9"])));
    }

    #[test]
    fn single_requirement() {
        let inst = Instance::from_index_sets("one", 5, &[vec![1, 3, 4]]).unwrap();
        assert_eq!(minimum_cover(&inst).unwrap().minimum, 1);
        let all = enumerate_minimum_covers(&inst, 10).unwrap();
        assert_eq!(all.covers, vec![vec![1], vec![3], vec![4]]);
    }

    #[test]
    fn cap_marks_incomplete() {
        let inst = Instance::from_index_sets("one", 5, &[vec![0, 1, 2, 3, 4]]).unwrap();
        let all = enumerate_minimum_covers(&inst, 2).unwrap();
        assert_eq!(all.covers.len(), 2);
        assert!(!all.complete);
    }

    #[test]
    fn too_large() {
        let inst = Instance::from_index_sets("wide", 65, &[vec![64]]).unwrap();
        assert_eq!(minimum_cover(&inst), Err(OracleError::TooLarge(65)));
    }
}
