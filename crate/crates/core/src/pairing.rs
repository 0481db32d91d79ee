//! Perfect pairings of six slots and permutation parity.

/// Parity of a permutation given in one-line notation: +1 even, −1 odd.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// A perfect pairing of {0..6}: three pairs `(i, j)` with `i < j`, listed by
/// increasing first element, plus the parity of the flattened sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pairing {
    pub pairs: [(usize, usize); 3],
    pub sign: i32,
}

/// The 15 perfect pairings of six slots.
pub fn pairings6() -> Vec<Pairing> {
    let mut out = Vec::with_capacity(15);
    let mut current = Vec::with_capacity(3);
    collect(&mut [false; 6], &mut current, &mut out);
    out
}

fn collect(used: &mut [bool; 6], current: &mut Vec<(usize, usize)>, out: &mut Vec<Pairing>) {
    let Some(first) = used.iter().position(|u| !u) else {
        let pairs = [current[0], current[1], current[2]];
        let flat: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        out.push(Pairing { pairs, sign: permutation_sign(&flat) });
        return;
    };
    used[first] = true;
    for second in first + 1..6 {
        if used[second] {
            continue;
        }
        used[second] = true;
        current.push((first, second));
        collect(used, current, out);
        current.pop();
        used[second] = false;
    }
    used[first] = false;
}

/// All 3! orderings of three items.
pub const ORDERINGS3: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_pairings_with_known_signs() {
        let p = pairings6();
        assert_eq!(p.len(), 15);
        assert_eq!(p[0].pairs, [(0, 1), (2, 3), (4, 5)]);
        assert_eq!(p[0].sign, 1);
        // (0,2)(1,3)(4,5) is one transposition away from the identity
        let q = p.iter().find(|q| q.pairs == [(0, 2), (1, 3), (4, 5)]).unwrap();
        assert_eq!(q.sign, -1);
    }

    #[test]
    fn reordering_whole_pairs_keeps_parity() {
        for p in pairings6() {
            for order in ORDERINGS3 {
                let flat: Vec<usize> = order.iter().flat_map(|&k| [p.pairs[k].0, p.pairs[k].1]).collect();
                assert_eq!(permutation_sign(&flat), p.sign);
            }
        }
    }
}
