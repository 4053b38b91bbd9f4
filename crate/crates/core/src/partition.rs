//! Proper k-partitions of the row and column index sets.
//!
//! Set partitions are enumerated as restricted growth strings (RGS): a label
//! vector `l` with `l[0] = 0` and `l[i] <= 1 + max(l[..i])`. Lexicographic
//! RGS order is the canonical order used for tie-breaking.

use serde::{Deserialize, Serialize};

use crate::error::{Axis, Error, Result};

/// A proper k-partition of rows `0..m` and columns `0..n`.
///
/// Blocks are kept in canonical form: sorted ascending inside, ordered by
/// their smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    k: usize,
    row_blocks: Vec<Vec<usize>>,
    col_blocks: Vec<Vec<usize>>,
}

/// On-disk form: `{"k": .., "row_blocks": [[..]], "col_blocks": [[..]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSpec {
    pub k: usize,
    pub row_blocks: Vec<Vec<usize>>,
    pub col_blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates and canonicalizes a partition of `0..m` × `0..n`.
    pub fn new(row_blocks: Vec<Vec<usize>>, col_blocks: Vec<Vec<usize>>, m: usize, n: usize) -> Result<Self> {
        if row_blocks.len() != col_blocks.len() {
            return Err(Error::InvalidPartition(format!(
                "{} row blocks but {} column blocks",
                row_blocks.len(),
                col_blocks.len()
            )));
        }
        let k = row_blocks.len();
        if k == 0 {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        let row_blocks = canonical_blocks(row_blocks, m, Axis::Row)?;
        let col_blocks = canonical_blocks(col_blocks, n, Axis::Col)?;
        Ok(Self { k, row_blocks, col_blocks })
    }

    pub fn from_spec(spec: PartitionSpec, m: usize, n: usize) -> Result<Self> {
        if spec.k != spec.row_blocks.len() || spec.k != spec.col_blocks.len() {
            return Err(Error::InvalidPartition(format!(
                "k = {} but {} row blocks and {} column blocks",
                spec.k,
                spec.row_blocks.len(),
                spec.col_blocks.len()
            )));
        }
        Self::new(spec.row_blocks, spec.col_blocks, m, n)
    }

    pub fn to_spec(&self) -> PartitionSpec {
        PartitionSpec {
            k: self.k,
            row_blocks: self.row_blocks.clone(),
            col_blocks: self.col_blocks.clone(),
        }
    }

    /// The 1-partition `{R}`, `{C}`.
    pub fn trivial(m: usize, n: usize) -> Self {
        Self {
            k: 1,
            row_blocks: vec![(0..m).collect()],
            col_blocks: vec![(0..n).collect()],
        }
    }

    /// Every row and column in its own block; needs `m == n`.
    pub fn singletons(m: usize, n: usize) -> Result<Self> {
        if m != n {
            return Err(Error::InvalidPartition(format!(
                "singleton partition needs a square table, got {m}x{n}"
            )));
        }
        Ok(Self {
            k: m,
            row_blocks: (0..m).map(|i| vec![i]).collect(),
            col_blocks: (0..n).map(|j| vec![j]).collect(),
        })
    }

    /// Builds a partition from block labels, one per index.
    pub fn from_labels(row_labels: &[usize], col_labels: &[usize]) -> Result<Self> {
        let rows = blocks_from_labels(row_labels);
        let cols = blocks_from_labels(col_labels);
        Self::new(rows, cols, row_labels.len(), col_labels.len())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row_blocks(&self) -> &[Vec<usize>] {
        &self.row_blocks
    }

    pub fn col_blocks(&self) -> &[Vec<usize>] {
        &self.col_blocks
    }

    pub fn blocks(&self, axis: Axis) -> &[Vec<usize>] {
        match axis {
            Axis::Row => &self.row_blocks,
            Axis::Col => &self.col_blocks,
        }
    }

    /// Number of rows and columns covered.
    pub fn dims(&self) -> (usize, usize) {
        (
            self.row_blocks.iter().map(Vec::len).sum(),
            self.col_blocks.iter().map(Vec::len).sum(),
        )
    }

    pub fn check_dims(&self, m: usize, n: usize) -> Result<()> {
        let (pm, pn) = self.dims();
        if (pm, pn) != (m, n) {
            return Err(Error::InvalidPartition(format!(
                "partition covers {pm}x{pn} but table is {m}x{n}"
            )));
        }
        Ok(())
    }

    /// Coarsening that merges whole blocks: block `a` goes to group
    /// `row_groups[a]` and block `b` to group `col_groups[b]`.
    pub fn merge_blocks(&self, row_groups: &[usize], col_groups: &[usize]) -> Result<Self> {
        if row_groups.len() != self.k || col_groups.len() != self.k {
            return Err(Error::InvalidPartition(format!(
                "need one group label per block ({}), got {} and {}",
                self.k,
                row_groups.len(),
                col_groups.len()
            )));
        }
        let merge = |blocks: &[Vec<usize>], groups: &[usize]| -> Vec<Vec<usize>> {
            blocks_from_labels(groups)
                .into_iter()
                .map(|g| g.iter().flat_map(|&b| blocks[b].iter().copied()).collect())
                .collect()
        };
        let (m, n) = self.dims();
        Self::new(merge(&self.row_blocks, row_groups), merge(&self.col_blocks, col_groups), m, n)
    }
}

fn blocks_from_labels(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot: Vec<Option<usize>> = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        if l >= slot.len() {
            slot.resize(l + 1, None);
        }
        let b = *slot[l].get_or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[b].push(i);
    }
    blocks
}

fn canonical_blocks(mut blocks: Vec<Vec<usize>>, len: usize, axis: Axis) -> Result<Vec<Vec<usize>>> {
    let mut seen = vec![false; len];
    for b in &mut blocks {
        if b.is_empty() {
            return Err(Error::InvalidPartition(format!("empty {axis} block")));
        }
        b.sort_unstable();
        for &i in b.iter() {
            if i >= len {
                return Err(Error::IndexOutOfRange { axis, index: i, len });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPartition(format!("{axis} {i} appears twice")));
            }
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidPartition(format!("{axis} {i} is not covered")));
    }
    blocks.sort_unstable_by_key(|b| b[0]);
    Ok(blocks)
}

/// A row subset and column subset inside the block pair `(block_row, block_col)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetPair {
    pub block_row: usize,
    pub block_col: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Stirling number of the second kind, `S(n, k)`; saturates at `u128::MAX`.
pub fn stirling2(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    if k == 0 {
        return u128::from(n == 0);
    }
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = (j as u128).saturating_mul(row[j]).saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row[k]
}

/// All restricted growth strings of length `n` with exactly `k` distinct
/// labels, in lexicographic order.
pub fn restricted_growth_strings(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 || k == 0 || k > n {
        return out;
    }
    let mut labels = vec![0usize; n];
    fn rec(pos: usize, max: usize, k: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let n = labels.len();
        // Blocks still needed must fit in the remaining positions.
        if k - (max + 1) > n - pos {
            return;
        }
        if pos == n {
            if max + 1 == k {
                out.push(labels.clone());
            }
            return;
        }
        for l in 0..=(max + 1).min(k - 1) {
            labels[pos] = l;
            rec(pos + 1, max.max(l), k, labels, out);
        }
    }
    rec(1, 0, k, &mut labels, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes_blocks() {
        let p = Partition::new(vec![vec![2, 0], vec![1]], vec![vec![1], vec![0]], 3, 2).unwrap();
        assert_eq!(p.row_blocks(), &[vec![0, 2], vec![1]]);
        assert_eq!(p.col_blocks(), &[vec![0], vec![1]]);
        assert_eq!(p.k(), 2);
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(Partition::new(vec![vec![0], vec![1]], vec![vec![0, 1]], 2, 2).is_err());
        assert!(Partition::new(vec![vec![0], vec![]], vec![vec![0], vec![1]], 2, 2).is_err());
        assert!(Partition::new(vec![vec![0, 1], vec![1]], vec![vec![0], vec![1]], 2, 2).is_err());
        assert!(Partition::new(vec![vec![0], vec![1]], vec![vec![0], vec![1]], 3, 2).is_err());
        assert!(Partition::new(vec![vec![0], vec![3]], vec![vec![0], vec![1]], 2, 2).is_err());
        let spec = PartitionSpec { k: 3, row_blocks: vec![vec![0], vec![1]], col_blocks: vec![vec![0], vec![1]] };
        assert!(Partition::from_spec(spec, 2, 2).is_err());
    }

    #[test]
    fn labels_round_trip() {
        let p = Partition::from_labels(&[1, 0, 1], &[0, 0, 1]).unwrap();
        assert_eq!(p.row_blocks(), &[vec![0, 2], vec![1]]);
        assert_eq!(p.col_blocks(), &[vec![0, 1], vec![2]]);
    }

    #[test]
    fn merge_whole_blocks() {
        let p = Partition::from_labels(&[0, 1, 2, 2], &[0, 1, 1, 2]).unwrap();
        let q = p.merge_blocks(&[0, 1, 0], &[0, 0, 1]).unwrap();
        assert_eq!(q.k(), 2);
        assert_eq!(q.row_blocks(), &[vec![0, 2, 3], vec![1]]);
        assert_eq!(q.col_blocks(), &[vec![0, 1, 2], vec![3]]);
        assert!(p.merge_blocks(&[0, 1, 1], &[0, 0, 0]).is_err());
        assert!(p.merge_blocks(&[0, 1], &[0, 0, 1]).is_err());
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(0, 0), 1);
        assert_eq!(stirling2(4, 2), 7);
        assert_eq!(stirling2(5, 3), 25);
        assert_eq!(stirling2(10, 4), 34105);
        assert_eq!(stirling2(3, 4), 0);
    }

    #[test]
    fn rgs_counts_match_stirling() {
        for n in 1..=8 {
            for k in 1..=n {
                let v = restricted_growth_strings(n, k);
                assert_eq!(v.len() as u128, stirling2(n, k), "n={n} k={k}");
                assert!(v.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert_eq!(restricted_growth_strings(3, 2), vec![vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1]]);
    }
}
