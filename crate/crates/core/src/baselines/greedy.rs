//! Deterministic greedy reducers: GE, GRE and Harrold-Gupta-Soffa.
//!
//! Every tie resolves to the lowest test index. Selections are returned in
//! the order tests were picked.

use crate::bitset::ReqSet;
use crate::problem::Instance;

/// Tests that are the sole candidate of some requirement, ascending.
fn essential_tests(instance: &Instance) -> Vec<usize> {
    let mut essential = vec![false; instance.n_tests()];
    for req in instance.requirements() {
        if let [only] = req.candidates[..] {
            essential[only] = true;
        }
    }
    (0..instance.n_tests()).filter(|&t| essential[t]).collect()
}

/// Unselected test covering the most of `uncovered`, lowest index on ties.
fn greedy_pick(instance: &Instance, uncovered: &ReqSet, usable: &[bool]) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for t in 0..instance.n_tests() {
        if !usable[t] {
            continue;
        }
        let gain = instance.coverage(t).intersection_count(uncovered);
        if gain > 0 && best.is_none_or(|(_, g)| gain > g) {
            best = Some((t, gain));
        }
    }
    best.map(|(t, _)| t)
}

fn select(instance: &Instance, t: usize, selected: &mut Vec<usize>, uncovered: &mut ReqSet, usable: &mut [bool]) {
    selected.push(t);
    usable[t] = false;
    uncovered.difference_with(instance.coverage(t));
}

/// GE: essential tests first, then repeatedly the test covering the most
/// uncovered requirements.
pub fn greedy_ge(instance: &Instance) -> Vec<usize> {
    let mut uncovered = ReqSet::full(instance.n_requirements());
    let mut usable = vec![true; instance.n_tests()];
    let mut selected = Vec::new();
    for t in essential_tests(instance) {
        select(instance, t, &mut selected, &mut uncovered, &mut usable);
    }
    while !uncovered.is_empty() {
        let t = greedy_pick(instance, &uncovered, &usable).expect("instance is coverable");
        select(instance, t, &mut selected, &mut uncovered, &mut usable);
    }
    selected
}

/// GRE: alternate 1-to-1 redundancy removal and essential selection over
/// the still-uncovered requirements, with a single greedy pick whenever
/// neither rule makes progress.
pub fn greedy_gre(instance: &Instance) -> Vec<usize> {
    let n = instance.n_tests();
    let mut uncovered = ReqSet::full(instance.n_requirements());
    let mut usable = vec![true; n];
    let mut selected = Vec::new();

    while !uncovered.is_empty() {
        // Residual coverage of every remaining test.
        let residual: Vec<Option<ReqSet>> = (0..n)
            .map(|t| {
                usable[t].then(|| {
                    let mut c = instance.coverage(t).clone();
                    c.intersect_with(&uncovered);
                    c
                })
            })
            .collect();

        let mut removed_any = false;
        for i in 0..n {
            let Some(ri) = &residual[i] else { continue };
            let redundant = ri.is_empty()
                || (0..n).any(|j| {
                    j != i
                        && residual[j].as_ref().is_some_and(|rj| {
                            ri.is_subset(rj) && (ri != rj || j < i)
                        })
                });
            if redundant {
                usable[i] = false;
                removed_any = true;
            }
        }

        let mut essentials = Vec::new();
        for r in uncovered.iter() {
            let mut live = instance.requirements()[r].candidates.iter().filter(|&&t| usable[t]);
            if let (Some(&only), None) = (live.next(), live.next()) {
                if !essentials.contains(&only) {
                    essentials.push(only);
                }
            }
        }
        essentials.sort_unstable();
        for &t in &essentials {
            select(instance, t, &mut selected, &mut uncovered, &mut usable);
        }

        if essentials.is_empty() && !removed_any {
            let t = greedy_pick(instance, &uncovered, &usable).expect("instance is coverable");
            select(instance, t, &mut selected, &mut uncovered, &mut usable);
        }
    }
    selected
}

/// Harrold-Gupta-Soffa: singleton requirements first, then requirement
/// groups by increasing candidate-set size. Within the current size, the
/// test hitting the most unmarked sets wins; ties look at successively
/// larger sizes, and a final tie picks the lowest index.
pub fn hgs(instance: &Instance) -> Vec<usize> {
    let reqs = instance.requirements();
    let max_card = reqs.iter().map(|r| r.candidates.len()).max().unwrap_or(0);
    let mut marked = vec![false; reqs.len()];
    let mut selected = Vec::new();

    let take = |t: usize, marked: &mut Vec<bool>, selected: &mut Vec<usize>| {
        selected.push(t);
        for (r, req) in reqs.iter().enumerate() {
            if req.candidates.contains(&t) {
                marked[r] = true;
            }
        }
    };

    let singletons: Vec<usize> = essential_tests(instance);
    for t in singletons {
        take(t, &mut marked, &mut selected);
    }

    let counts_at = |card: usize, marked: &[bool], among: &[usize]| -> Vec<usize> {
        among
            .iter()
            .map(|&t| {
                reqs.iter()
                    .enumerate()
                    .filter(|(r, req)| {
                        !marked[*r] && req.candidates.len() == card && req.candidates.contains(&t)
                    })
                    .count()
            })
            .collect()
    };

    loop {
        let Some(card) = reqs
            .iter()
            .enumerate()
            .filter(|(r, _)| !marked[*r])
            .map(|(_, req)| req.candidates.len())
            .min()
        else {
            break;
        };
        let mut tied: Vec<usize> = (0..instance.n_tests()).collect();
        let mut level = card;
        loop {
            let counts = counts_at(level, &marked, &tied);
            let best = counts.iter().copied().max().unwrap_or(0);
            if best > 0 {
                tied = tied
                    .iter()
                    .zip(&counts)
                    .filter(|(_, &c)| c == best)
                    .map(|(&t, _)| t)
                    .collect();
            }
            if tied.len() == 1 || level >= max_card {
                break;
            }
            level += 1;
        }
        take(tied[0], &mut marked, &mut selected);
    }
    selected
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::builtin;

    fn names(inst: &Instance, sel: &[usize]) -> Vec<String> {
        sel.iter().map(|&t| inst.test_id(t).to_string()).collect()
    }

    fn sorted_names(inst: &Instance, sel: &[usize]) -> Vec<String> {
        let mut v = sel.to_vec();
        v.sort_unstable();
        names(inst, &v)
    }

    #[test]
    fn ge_experiment_one() {
        let e1 = builtin("experiment-1").unwrap();
        assert_eq!(names(&e1, &greedy_ge(&e1)), ["t3", "t1", "t4", "t2"]);
    }

    #[test]
    fn ge_experiment_two() {
        let e2 = builtin("experiment-2").unwrap();
        let sel = greedy_ge(&e2);
        assert_eq!(sel.len(), 4);
        assert_eq!(names(&e2, &sel), ["t1", "t3", "t4", "t2"]);
    }

    #[test]
    fn gre_experiment_one() {
        // t1's requirements are a strict subset of t7's, so t7 survives the
        // first redundancy pass and the result is {t2, t4, t7}.
        let e1 = builtin("experiment-1").unwrap();
        let sel = greedy_gre(&e1);
        assert_eq!(sel.len(), 3);
        assert_eq!(sorted_names(&e1, &sel), ["t2", "t4", "t7"]);
    }

    #[test]
    fn gre_experiment_three() {
        let e3 = builtin("experiment-3").unwrap();
        let sel = greedy_gre(&e3);
        assert!(e3.is_cover(sel.iter().copied()));
        assert_eq!(sel.len(), 4);
    }

    #[test]
    fn hgs_tables() {
        let e1 = builtin("experiment-1").unwrap();
        assert_eq!(names(&e1, &hgs(&e1)), ["t3", "t1", "t4", "t2"]);
        let e2 = builtin("experiment-2").unwrap();
        assert_eq!(names(&e2, &hgs(&e2)), ["t1", "t4", "t2"]);
    }

    #[test]
    fn trivial_instances() {
        let one = Instance::from_index_sets("one", 3, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(greedy_ge(&one), vec![0]);
        assert_eq!(greedy_gre(&one), vec![0]);
        assert_eq!(hgs(&one), vec![0]);

        let dominant = Instance::from_index_sets("dom", 3, &[vec![0, 2], vec![1, 2], vec![2]]).unwrap();
        assert_eq!(greedy_gre(&dominant), vec![2]);

        let singletons = Instance::from_index_sets("s", 4, &[vec![3], vec![1], vec![3]]).unwrap();
        let mut got = hgs(&singletons);
        got.sort_unstable();
        assert_eq!(got, vec![1, 3]);
    }
}
