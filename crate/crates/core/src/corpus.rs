//! The five built-in benchmark instances.
//!
//! Experiments 1-3 keep the printed test labels `t1..t12` including gaps;
//! experiments 4-5 use `t0..t30`.

use crate::io::{InstanceDocument, IoError, RequirementDocument};
use crate::problem::{validate_instance, Instance};

pub const BUILTIN_NAMES: [&str; 5] = [
    "experiment-1",
    "experiment-2",
    "experiment-3",
    "experiment-4",
    "experiment-5",
];

const ALL_1: &[u32] = &[1, 2, 3, 4, 5, 6, 7];
const ALL_2: &[u32] = &[1, 2, 3, 4, 8, 9];
const ALL_3: &[u32] = &[1, 3, 4, 5, 6, 8, 10, 11, 12];

const EXPERIMENT_1: &[&[u32]] = &[
    ALL_1, ALL_1, ALL_1, ALL_1,
    &[1, 2, 5, 7],
    &[2, 3, 4, 6],
    &[1, 7],
    &[2, 5],
    &[1, 7],
    &[1, 2, 5, 7],
    &[2, 3],
    &[3, 4, 6],
    &[2, 3],
    &[2, 3],
    &[3, 4, 7],
    &[4, 6],
    &[3, 4],
    &[3, 4],
    &[4, 6],
];

const EXPERIMENT_2: &[&[u32]] = &[
    ALL_2, ALL_2, ALL_2, ALL_2,
    &[1, 2, 9],
    &[2, 3, 4, 8, 9],
    &[1],
    &[2, 9],
    &[1],
    &[1, 2, 9],
    &[2, 3, 8],
    &[3, 4, 8, 9],
    &[2, 3, 8],
    &[2, 3, 8],
    &[3, 4, 9],
    &[4, 8],
    &[3, 4, 9],
    &[3, 4, 9],
    &[4, 8],
];

const EXPERIMENT_3: &[&[u32]] = &[
    ALL_3, ALL_3, ALL_3, ALL_3,
    &[1, 5, 10, 11, 12],
    &[3, 4, 6, 8, 10, 12],
    &[1, 10, 12],
    &[5, 11],
    &[1, 10, 12],
    &[1, 5, 10, 11, 12],
    &[3, 8, 10],
    &[3, 4, 6, 8, 12],
    &[3, 8, 10],
    &[3, 8, 10],
    &[3, 4, 12],
    &[4, 6, 8],
    &[3, 4, 12],
    &[3, 4, 12],
    &[4, 6, 8],
];

const EXPERIMENT_4: &[&[u32]] = &[
    &[0, 3, 7, 18, 29],
    &[3, 16, 22],
    &[0, 2, 25, 27],
    &[11, 30],
    &[1, 4, 8, 14, 25],
    &[9, 14, 19, 24],
    &[5, 10, 21],
    &[4, 20],
    &[7, 17, 24, 26],
    &[6, 15, 29],
    &[10, 15, 23],
    &[1, 6],
    &[4],
    &[2, 8, 13, 16, 23],
    &[28],
    &[22, 28],
    &[17, 29],
    &[5, 20],
    &[9, 25],
    &[12],
    &[9, 28, 30],
    &[3, 24],
    &[0, 30],
    &[5, 8, 11, 26, 27],
];

const EXPERIMENT_5: &[&[u32]] = &[
    &[0, 3, 7, 18, 19, 29],
    &[1, 2, 3, 6, 12, 16, 22, 24],
    &[0, 2, 25, 27],
    &[11, 30],
    &[1, 4, 8, 14, 25],
    &[9, 14, 19, 24],
    &[5, 10, 21],
    &[4, 20],
    &[7, 17, 24],
    &[15, 29],
    &[10, 15, 23],
    &[1, 6],
    &[6],
    &[2, 8, 13, 16, 23],
    &[20, 28],
    &[0, 18, 22],
    &[17, 29],
    &[5, 20],
    &[9, 25],
    &[10, 12],
    &[9, 28, 30],
    &[3, 24],
    &[0, 5, 30],
    &[5, 8, 11, 13, 26, 27],
];

fn document(name: &str, tests: impl IntoIterator<Item = u32>, reqs: &[&[u32]]) -> InstanceDocument {
    InstanceDocument {
        name: name.to_string(),
        tests: tests.into_iter().map(|t| format!("t{t}")).collect(),
        requirements: reqs
            .iter()
            .enumerate()
            .map(|(i, cs)| RequirementDocument {
                id: format!("req{}", i + 1),
                candidates: cs.iter().map(|t| format!("t{t}")).collect(),
            })
            .collect(),
    }
}

pub fn builtin_document(name: &str) -> Result<InstanceDocument, IoError> {
    let doc = match name {
        "experiment-1" => document(name, ALL_1.iter().copied(), EXPERIMENT_1),
        "experiment-2" => document(name, ALL_2.iter().copied(), EXPERIMENT_2),
        "experiment-3" => document(name, ALL_3.iter().copied(), EXPERIMENT_3),
        "experiment-4" => document(name, 0..=30, EXPERIMENT_4),
        "experiment-5" => document(name, 0..=30, EXPERIMENT_5),
        other => return Err(IoError::UnknownBenchmark(other.to_string())),
    };
    Ok(doc)
}

/// Looks up a built-in benchmark by name.
pub fn builtin(name: &str) -> Result<Instance, IoError> {
    let doc = builtin_document(name)?;
    Ok(validate_instance(&doc).expect("built-in instances are valid"))
}

pub fn all_builtins() -> Vec<Instance> {
    BUILTIN_NAMES.iter().map(|n| builtin(n).unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn candidates(inst: &Instance, req: usize) -> Vec<&str> {
        inst.requirements()[req - 1]
            .candidates
            .iter()
            .map(|&t| inst.test_id(t))
            .collect()
    }

    #[test]
    fn sizes_match_tables() {
        let expected = [(7, 19), (6, 19), (9, 19), (31, 24), (31, 24)];
        for (inst, (n, m)) in all_builtins().iter().zip(expected) {
            assert_eq!((inst.n_tests(), inst.n_requirements()), (n, m), "{}", inst.name());
        }
    }

    #[test]
    fn experiment_two_labels() {
        let e2 = builtin("experiment-2").unwrap();
        assert_eq!(e2.tests(), ["t1", "t2", "t3", "t4", "t8", "t9"]);
        assert_eq!(candidates(&e2, 7), ["t1"]);
    }

    #[test]
    fn experiment_four_singletons() {
        let e4 = builtin("experiment-4").unwrap();
        assert_eq!(e4.tests().first().unwrap(), "t0");
        assert_eq!(e4.tests().last().unwrap(), "t30");
        assert_eq!(candidates(&e4, 13), ["t4"]);
        assert_eq!(candidates(&e4, 15), ["t28"]);
        assert_eq!(candidates(&e4, 20), ["t12"]);
    }

    #[test]
    fn unknown_benchmark() {
        assert_eq!(
            builtin("experiment-9").unwrap_err(),
            IoError::UnknownBenchmark("experiment-9".into())
        );
    }
}
