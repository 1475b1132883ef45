//! Integer partitions used to enumerate required-count profiles.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

/// All multisets of `m` positive integers summing to `n`, each listed in
/// non-increasing order, largest first part first.
///
/// `integer_partitions(10, 2)` is `[[9, 1], [8, 2], [7, 3], [6, 4], [5, 5]]`.
pub fn integer_partitions(n: usize, m: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if m == 0 || m > n {
        return out;
    }
    let mut current = Vec::with_capacity(m);
    fill(n, m, n, &mut current, &mut out);
    out
}

fn fill(rest: usize, parts: usize, cap: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 0 {
        if rest == 0 {
            out.push(current.clone());
        }
        return;
    }
    // The first of `parts` remaining parts is at most `cap`, leaves at least
    // one for each later part and at least its share of `rest`.
    let hi = cap.min(rest + 1 - parts);
    let lo = rest.div_ceil(parts);
    for first in (lo..=hi).rev() {
        current.push(first as u32);
        fill(rest - first, parts - 1, first, current, out);
        current.pop();
    }
}

/// Number of partitions of `n` into exactly `m` parts.
pub fn partition_count(n: usize, m: usize) -> u128 {
    if m == 0 || m > n {
        return 0;
    }
    // p(i, k) = p(i - 1, k - 1) + p(i - k, k)
    let mut table = vec![vec![0u128; m + 1]; n + 1];
    table[0][0] = 1;
    for i in 1..=n {
        for k in 1..=m.min(i) {
            table[i][k] = table[i - 1][k - 1] + table[i - k][k];
        }
    }
    table[n][m]
}

/// One partition drawn by sorting a uniform random composition of `n` into
/// `m` parts. Not uniform over partitions; balanced shapes are favoured.
pub fn random_partition<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Option<Vec<u32>> {
    if m == 0 || m > n {
        return None;
    }
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, n - 1, m - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(m);
    let mut prev = 0;
    for c in cuts.into_iter().chain(core::iter::once(n)) {
        parts.push((c - prev) as u32);
        prev = c;
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Some(parts)
}

/// Up to `count` distinct partitions. When `count` covers every partition the
/// full list is returned in canonical order.
pub fn sample_partitions<R: Rng + ?Sized>(n: usize, m: usize, count: usize, rng: &mut R) -> Vec<Vec<u32>> {
    if partition_count(n, m) <= count as u128 {
        return integer_partitions(n, m);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 64 * count {
        attempts += 1;
        if let Some(p) = random_partition(n, m, rng) {
            if seen.insert(p.clone()) {
                out.push(p);
            }
        }
    }
    out
}
