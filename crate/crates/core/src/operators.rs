//! Low-level permutation moves available to the hyper-heuristic.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::problem::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Swap,
    Insertion,
    Reversal,
    OrderCrossover,
}

impl Operator {
    pub const ALL: [Operator; 4] = [
        Operator::Swap,
        Operator::Insertion,
        Operator::Reversal,
        Operator::OrderCrossover,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operator::Swap => "swap",
            Operator::Insertion => "insertion",
            Operator::Reversal => "reversal",
            Operator::OrderCrossover => "order-crossover",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Operator::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| format!("unknown operator `{s}`"))
    }
}

/// Exchange the entries at `i` and `j`.
pub fn swap_at(p: &Permutation, i: usize, j: usize) -> Permutation {
    let mut v = p.as_slice().to_vec();
    v.swap(i, j);
    Permutation::from_vec_unchecked(v)
}

/// Remove the entry at `from` and reinsert it so it lands at index `to`.
pub fn insert_at(p: &Permutation, from: usize, to: usize) -> Permutation {
    let mut v = p.as_slice().to_vec();
    let x = v.remove(from);
    v.insert(to, x);
    Permutation::from_vec_unchecked(v)
}

/// Reverse the inclusive segment `i..=j`.
pub fn reverse_segment(p: &Permutation, i: usize, j: usize) -> Permutation {
    let (i, j) = (i.min(j), i.max(j));
    let mut v = p.as_slice().to_vec();
    v[i..=j].reverse();
    Permutation::from_vec_unchecked(v)
}

/// Order crossover (OX1): the child keeps `p[i..=j]` in place and fills the
/// remaining positions, starting after `j` and wrapping, with the missing
/// entries in the order they appear in `mate` from `j + 1`.
pub fn order_crossover(p: &Permutation, mate: &Permutation, i: usize, j: usize) -> Permutation {
    let n = p.len();
    assert_eq!(n, mate.len(), "crossover parents differ in length");
    let (i, j) = (i.min(j), i.max(j));
    let (p, mate) = (p.as_slice(), mate.as_slice());
    let mut child = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for k in i..=j {
        child[k] = p[k];
        taken[p[k]] = true;
    }
    let mut pos = (j + 1) % n;
    for k in 0..n {
        let gene = mate[(j + 1 + k) % n];
        if taken[gene] {
            continue;
        }
        while child[pos] != usize::MAX {
            pos = (pos + 1) % n;
        }
        child[pos] = gene;
        taken[gene] = true;
    }
    Permutation::from_vec_unchecked(child)
}

fn distinct_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// Applies `op` with random positions. `mate` is only read by crossover.
pub fn apply_operator<R: Rng + ?Sized>(
    op: Operator,
    p: &Permutation,
    mate: &Permutation,
    rng: &mut R,
) -> Permutation {
    let n = p.len();
    if n < 2 {
        return p.clone();
    }
    let (i, j) = distinct_pair(n, rng);
    match op {
        Operator::Swap => swap_at(p, i, j),
        Operator::Insertion => insert_at(p, i, j),
        Operator::Reversal => reverse_segment(p, i, j),
        Operator::OrderCrossover => order_crossover(p, mate, i, j),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn deterministic_moves() {
        let base = p(&[0, 1, 2]);
        assert_eq!(swap_at(&base, 0, 2), p(&[2, 1, 0]));
        assert_eq!(insert_at(&base, 0, 2), p(&[1, 2, 0]));
        assert_eq!(reverse_segment(&base, 0, 2), p(&[2, 1, 0]));
    }

    #[test]
    fn ox_keeps_segment_and_mate_order() {
        let a = p(&[0, 1, 2, 3, 4, 5, 6, 7]);
        let b = p(&[7, 6, 5, 4, 3, 2, 1, 0]);
        let child = order_crossover(&a, &b, 2, 4);
        assert_eq!(&child.as_slice()[2..=4], &[2, 3, 4]);
        // Remaining genes from b starting after index 4: 2,1,0,7,6,5,4,3 minus {2,3,4}.
        assert_eq!(child, p(&[6, 5, 2, 3, 4, 1, 0, 7]));
        assert!(child.is_valid());
    }

    #[test]
    fn random_moves_stay_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut x = Permutation::random(9, &mut rng);
        let mate = Permutation::random(9, &mut rng);
        for k in 0..400 {
            let op = Operator::ALL[k % 4];
            x = apply_operator(op, &x, &mate, &mut rng);
            assert!(x.is_valid());
        }
        let one = p(&[0]);
        assert_eq!(apply_operator(Operator::Swap, &one, &one, &mut rng), one);
    }

    #[test]
    fn names_round_trip() {
        for op in Operator::ALL {
            assert_eq!(op.name().parse::<Operator>().unwrap(), op);
        }
    }
}
