//! Counting and enumeration of ballot multisets.
//!
//! All implemented rules are anonymous (they read only the ballot multiset),
//! so the audits enumerate multisets rather than ordered profiles. A
//! multiset over `t` ballot types is a count vector `(c_0, .., c_{t-1})`
//! summing to the number of voters; vectors are visited in ascending
//! lexicographic order, which fixes which counterexample is "first".

/// Number of multisets of `items` draws from `types` distinct values,
/// i.e. C(items + types - 1, types - 1). Panics on u64 overflow; the
/// universes used here stay far below that.
pub fn multiset_count(items: u64, types: u64) -> u64 {
    assert!(types >= 1, "need at least one ballot type");
    binomial(items + types - 1, types - 1)
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflows u64")
}

/// All count vectors of length `parts` summing to `total`, ascending
/// lexicographic order.
pub(crate) fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; parts];
    fill(&mut out, &mut current, 0, total);
    out
}

fn fill(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, depth: usize, remaining: u32) {
    if depth + 1 == current.len() {
        current[depth] = remaining;
        out.push(current.clone());
        return;
    }
    for c in 0..=remaining {
        current[depth] = c;
        fill(out, current, depth + 1, remaining - c);
    }
    current[depth] = 0;
}

/// All rankings of `0..m` in ascending lexicographic order. These index the
/// ballot types of the ordinal universes.
pub(crate) fn all_rankings(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(m);
    let mut used = vec![false; m];
    permute(m, &mut prefix, &mut used, &mut out);
    out
}

fn permute(m: usize, prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
    if prefix.len() == m {
        out.push(prefix.clone());
        return;
    }
    for i in 0..m {
        if !used[i] {
            used[i] = true;
            prefix.push(i);
            permute(m, prefix, used, out);
            prefix.pop();
            used[i] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_counts_match_the_closed_form() {
        assert_eq!(multiset_count(0, 3), 1);
        assert_eq!(multiset_count(5, 1), 1);
        assert_eq!(multiset_count(2, 3), 6);
        assert_eq!(multiset_count(7, 24), 2_035_800);
    }

    #[test]
    fn compositions_are_exhaustive_ordered_and_sum_correctly() {
        let all = compositions(3, 3);
        assert_eq!(all.len() as u64, multiset_count(3, 3));
        assert_eq!(all.first().unwrap(), &vec![0, 0, 3]);
        assert_eq!(all.last().unwrap(), &vec![3, 0, 0]);
        for pair in all.windows(2) {
            assert!(pair[0] < pair[1], "lexicographic order broken");
        }
        for c in &all {
            assert_eq!(c.iter().sum::<u32>(), 3);
        }
    }

    #[test]
    fn rankings_are_all_permutations_in_order() {
        let r3 = all_rankings(3);
        assert_eq!(r3.len(), 6);
        assert_eq!(r3[0], vec![0, 1, 2]);
        assert_eq!(r3[5], vec![2, 1, 0]);
        for pair in r3.windows(2) {
            assert!(pair[0] < pair[1]);
        }
        assert_eq!(all_rankings(1), vec![vec![0]]);
        assert_eq!(all_rankings(4).len(), 24);
    }
}
