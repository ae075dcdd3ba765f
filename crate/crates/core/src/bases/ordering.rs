//! Canonical low-to-high progressive orderings.

use super::nd::unravel;

/// One unit of capture: a single coefficient, or a conjugate-symmetric DFT
/// pair that is always kept or dropped together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoeffGroup {
    pub first: usize,
    pub second: Option<usize>,
}

impl CoeffGroup {
    pub fn single(i: usize) -> Self {
        CoeffGroup { first: i, second: None }
    }

    /// Cost in real measurements.
    pub fn cost(&self) -> usize {
        1 + self.second.is_some() as usize
    }

    pub fn members(&self) -> impl Iterator<Item = usize> {
        std::iter::once(self.first).chain(self.second)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressiveOrdering {
    groups: Vec<CoeffGroup>,
}

impl ProgressiveOrdering {
    pub fn new(groups: Vec<CoeffGroup>) -> Self {
        ProgressiveOrdering { groups }
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n).map(CoeffGroup::single).collect())
    }

    pub fn groups(&self) -> &[CoeffGroup] {
        &self.groups
    }

    pub fn costs(&self) -> impl Iterator<Item = usize> + '_ {
        self.groups.iter().map(CoeffGroup::cost)
    }

    /// Total real measurements needed to capture every group.
    pub fn total_cost(&self) -> usize {
        self.costs().sum()
    }

    /// Coefficient indices in walking order, pair members adjacent.
    pub fn flat(&self) -> Vec<usize> {
        self.groups.iter().flat_map(CoeffGroup::members).collect()
    }
}

/// Generalized zigzag: multi-indices by coordinate sum, ties lexicographic
/// (row-major flat order is lexicographic order).
pub(crate) fn dct_order(dims: &[usize]) -> ProgressiveOrdering {
    let n: usize = dims.iter().product();
    let mut idx = vec![0; dims.len()];
    let mut keyed: Vec<(usize, usize)> = (0..n)
        .map(|flat| {
            unravel(flat, dims, &mut idx);
            (idx.iter().sum(), flat)
        })
        .collect();
    keyed.sort_unstable();
    ProgressiveOrdering::new(keyed.into_iter().map(|(_, i)| CoeffGroup::single(i)).collect())
}

/// Flat index of the conjugate-symmetric partner `(-k) mod dims`.
pub(crate) fn dft_partner(flat: usize, dims: &[usize]) -> usize {
    let mut idx = vec![0; dims.len()];
    unravel(flat, dims, &mut idx);
    idx.iter().zip(dims).fold(0, |acc, (&k, &d)| acc * d + (d - k) % d)
}

/// Sort conjugate groups by summed per-axis frequency `min(k, len - k)`,
/// ties by the group's lower flat index.
pub(crate) fn dft_order(dims: &[usize]) -> ProgressiveOrdering {
    let n: usize = dims.iter().product();
    let mut idx = vec![0; dims.len()];
    let mut keyed = Vec::with_capacity(n / 2 + 1);
    for flat in 0..n {
        let partner = dft_partner(flat, dims);
        if partner < flat {
            continue;
        }
        unravel(flat, dims, &mut idx);
        let freq: usize = idx.iter().zip(dims).map(|(&k, &d)| k.min(d - k)).sum();
        let group = CoeffGroup {
            first: flat,
            second: (partner != flat).then_some(partner),
        };
        keyed.push((freq, flat, group));
    }
    keyed.sort_unstable_by_key(|&(f, i, _)| (f, i));
    ProgressiveOrdering::new(keyed.into_iter().map(|(_, _, g)| g).collect())
}
