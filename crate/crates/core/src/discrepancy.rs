//! Pairwise and partition discrepancy.
//!
//! The partition scan enumerates every nonempty `X ⊆ R_a`, `Y ⊆ C_b` as
//! bitmasks over block-local positions. For a fixed `X` the column sums over
//! `X` are formed once, then cuts and volumes for all `Y` come from a subset
//! DP that adds the highest member last. That is the same accumulation
//! order as [`ContingencyTable::cut`], so the scan's maximum and
//! [`pair_discrepancy`] on the witness agree exactly.

use serde::Serialize;

use crate::error::{Axis, Error, Result};
use crate::exec::{fold_indices, Exec};
use crate::partition::{Partition, SubsetPair};
use crate::table::{canonical, ContingencyTable};

/// Default cap on subset pairs per partition scan.
pub const DEFAULT_SUBSET_BUDGET: u64 = 50_000_000;

/// Largest block handled by the bitmask scan.
const MAX_SCAN_BLOCK: usize = 40;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub value: f64,
    pub witness: SubsetPair,
    pub pairs_scanned: u64,
}

#[inline]
fn pair_value(cut: f64, vx: f64, vy: f64, block_density: f64) -> f64 {
    let vv = vx * vy;
    (cut - block_density * vv).abs() / vv.sqrt()
}

fn check_contained(sub: &[usize], block: &[usize], axis: Axis) -> Result<()> {
    if sub.iter().all(|i| block.binary_search(i).is_ok()) {
        Ok(())
    } else {
        Err(Error::SubsetNotContained { axis })
    }
}

fn checked_pair(
    t: &ContingencyTable,
    x: &[usize],
    y: &[usize],
    ra: &[usize],
    cb: &[usize],
) -> Result<[Vec<usize>; 4]> {
    t.check_subset(ra, Axis::Row)?;
    t.check_subset(cb, Axis::Col)?;
    t.check_subset(x, Axis::Row)?;
    t.check_subset(y, Axis::Col)?;
    let (x, y, ra, cb) = (canonical(x), canonical(y), canonical(ra), canonical(cb));
    check_contained(&x, &ra, Axis::Row)?;
    check_contained(&y, &cb, Axis::Col)?;
    Ok([x, y, ra, cb])
}

/// `|a(X,Y) − ρ(R_a,C_b) Vol(X) Vol(Y)| / √(Vol(X) Vol(Y))`.
///
/// Returns exactly zero when `X = R_a` and `Y = C_b`.
pub fn pair_discrepancy(t: &ContingencyTable, x: &[usize], y: &[usize], ra: &[usize], cb: &[usize]) -> Result<f64> {
    let [x, y, ra, cb] = checked_pair(t, x, y, ra, cb)?;
    if x == ra && y == cb {
        return Ok(0.0);
    }
    let rho = t.density_sorted(&ra, &cb);
    let vx = t.volume_sorted(&x, Axis::Row);
    let vy = t.volume_sorted(&y, Axis::Col);
    Ok(pair_value(t.cut_sorted(&x, &y), vx, vy, rho))
}

/// The density form `|ρ(X,Y) − ρ(R_a,C_b)| √(Vol(X) Vol(Y))` of the same
/// quantity; kept as an independent route for cross-checking.
pub fn pair_discrepancy_density_form(
    t: &ContingencyTable,
    x: &[usize],
    y: &[usize],
    ra: &[usize],
    cb: &[usize],
) -> Result<f64> {
    let [x, y, ra, cb] = checked_pair(t, x, y, ra, cb)?;
    let rho_block = t.density_sorted(&ra, &cb);
    let rho = t.density_sorted(&x, &y);
    let vx = t.volume_sorted(&x, Axis::Row);
    let vy = t.volume_sorted(&y, Axis::Col);
    Ok((rho - rho_block).abs() * (vx * vy).sqrt())
}

/// Number of subset pairs a full scan of `p` visits.
pub fn scan_size(p: &Partition) -> u128 {
    let side = |len: usize| -> u128 {
        if len >= 127 {
            u128::MAX
        } else {
            (1u128 << len) - 1
        }
    };
    let mut total: u128 = 0;
    for ra in p.row_blocks() {
        for cb in p.col_blocks() {
            total = total.saturating_add(side(ra.len()).saturating_mul(side(cb.len())));
        }
    }
    total
}

#[derive(Clone, Copy, Debug)]
pub struct ScanConfig {
    pub budget: u64,
    pub exec: Exec,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_SUBSET_BUDGET,
            exec: Exec::default(),
        }
    }
}

/// Exact maximum of [`pair_discrepancy`] over all block pairs and nonempty
/// subsets. Ties go to the smallest `(a, b, X mask, Y mask)`.
pub fn partition_discrepancy(t: &ContingencyTable, p: &Partition, budget: u64) -> Result<DiscrepancyReport> {
    partition_discrepancy_with(t, p, &ScanConfig { budget, ..Default::default() })
}

pub fn partition_discrepancy_with(t: &ContingencyTable, p: &Partition, cfg: &ScanConfig) -> Result<DiscrepancyReport> {
    Ok(scan(t, p, cfg, None)?.expect("scan without cutoff always completes"))
}

/// Candidate maximum during a scan.
#[derive(Clone, Copy, Debug)]
struct Best {
    value: f64,
    key: (usize, usize, u64, u64),
}

impl Best {
    const NONE: Best = Best {
        value: f64::NEG_INFINITY,
        key: (usize::MAX, usize::MAX, u64::MAX, u64::MAX),
    };

    fn better(a: Best, b: Best) -> Best {
        if b.value > a.value || (b.value == a.value && b.key < a.key) {
            b
        } else {
            a
        }
    }
}

/// Precomputed data for one block pair.
struct BlockPair<'a> {
    a: usize,
    b: usize,
    rows: &'a [usize],
    cols: &'a [usize],
    rho: f64,
    col_volumes: Vec<f64>,
}

impl<'a> BlockPair<'a> {
    fn new(t: &ContingencyTable, a: usize, b: usize, rows: &'a [usize], cols: &'a [usize]) -> Self {
        let d = t.col_sums();
        let mut col_volumes = vec![0.0; 1 << cols.len()];
        for mask in 1usize..col_volumes.len() {
            let hi = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
            col_volumes[mask] = col_volumes[mask ^ (1 << hi)] + d[cols[hi]];
        }
        Self {
            a,
            b,
            rows,
            cols,
            rho: t.density_sorted(rows, cols),
            col_volumes,
        }
    }

    /// Scans all `Y` for the row subset `xmask`. Returns `None` as soon as a
    /// value exceeds `cutoff`.
    fn scan_row_subset(
        &self,
        t: &ContingencyTable,
        xmask: u64,
        col_cuts: &mut Vec<f64>,
        cutoff: Option<f64>,
    ) -> Option<Best> {
        let row_sums = t.row_sums();
        let mut vx = 0.0;
        let mut colsum = vec![0.0; self.cols.len()];
        let mut first = true;
        for (pos, &i) in self.rows.iter().enumerate() {
            if xmask >> pos & 1 == 1 {
                vx += row_sums[i];
                let row = t.row(i);
                for (c, &j) in colsum.iter_mut().zip(self.cols) {
                    *c = if first { 0.0 + row[j] } else { *c + row[j] };
                }
                first = false;
            }
        }
        let ny = self.cols.len();
        let full_x = xmask == (1u64 << self.rows.len()) - 1;
        let full_y = (1usize << ny) - 1;
        col_cuts.clear();
        col_cuts.resize(1 << ny, 0.0);
        let mut best = Best::NONE;
        for ymask in 1usize..(1 << ny) {
            let hi = usize::BITS as usize - 1 - ymask.leading_zeros() as usize;
            let cut = col_cuts[ymask ^ (1 << hi)] + colsum[hi];
            col_cuts[ymask] = cut;
            let value = if full_x && ymask == full_y {
                0.0
            } else {
                pair_value(cut, vx, self.col_volumes[ymask], self.rho)
            };
            if let Some(c) = cutoff {
                if value > c {
                    return None;
                }
            }
            if value > best.value {
                best = Best {
                    value,
                    key: (self.a, self.b, xmask, ymask as u64),
                };
            }
        }
        Some(best)
    }
}

/// Full scan, or `None` if some pair value exceeds `cutoff`.
pub(crate) fn scan(
    t: &ContingencyTable,
    p: &Partition,
    cfg: &ScanConfig,
    cutoff: Option<f64>,
) -> Result<Option<DiscrepancyReport>> {
    p.check_dims(t.rows(), t.cols())?;
    let required = scan_size(p);
    let too_wide = p
        .row_blocks()
        .iter()
        .chain(p.col_blocks())
        .any(|b| b.len() > MAX_SCAN_BLOCK);
    if required > u128::from(cfg.budget) || too_wide {
        return Err(Error::BudgetExceeded {
            required,
            budget: cfg.budget,
        });
    }

    let mut best = Best::NONE;
    for (a, ra) in p.row_blocks().iter().enumerate() {
        for (b, cb) in p.col_blocks().iter().enumerate() {
            let pair = BlockPair::new(t, a, b, ra, cb);
            let nx = (1usize << ra.len()) - 1;
            let local = fold_indices(
                cfg.exec,
                nx,
                || (Some(Best::NONE), Vec::new()),
                |(acc, mut buf), idx| {
                    let Some(acc) = acc else { return (None, buf) };
                    let found = pair.scan_row_subset(t, idx as u64 + 1, &mut buf, cutoff);
                    (found.map(|f| Best::better(acc, f)), buf)
                },
                |(acc, _)| acc,
                |x, y| match (x, y) {
                    (Some(x), Some(y)) => Some(Best::better(x, y)),
                    _ => None,
                },
                Some(Best::NONE),
            );
            match local {
                Some(l) => best = Best::better(best, l),
                None => return Ok(None),
            }
        }
    }

    let (a, b, xmask, ymask) = best.key;
    let ra = &p.row_blocks()[a];
    let cb = &p.col_blocks()[b];
    let witness = SubsetPair {
        block_row: a,
        block_col: b,
        rows: members(ra, xmask),
        cols: members(cb, ymask),
    };
    Ok(Some(DiscrepancyReport {
        value: best.value,
        witness,
        pairs_scanned: u64::try_from(required).unwrap_or(u64::MAX),
    }))
}

fn members(block: &[usize], mask: u64) -> Vec<usize> {
    block
        .iter()
        .enumerate()
        .filter(|(pos, _)| mask >> pos & 1 == 1)
        .map(|(_, &i)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skew() -> ContingencyTable {
        ContingencyTable::new(&[vec![0.4, 0.1], vec![0.1, 0.4]], false).unwrap()
    }

    #[test]
    fn pair_examples() {
        let t = skew();
        let v = pair_discrepancy(&t, &[0], &[0], &[0, 1], &[0, 1]).unwrap();
        assert!((v - 0.3).abs() < 1e-12);
        assert_eq!(pair_discrepancy(&t, &[0, 1], &[1, 0], &[0, 1], &[0, 1]).unwrap(), 0.0);
        let ind = ContingencyTable::new(&[vec![0.12, 0.18], vec![0.28, 0.42]], false).unwrap();
        for x in [&[0usize][..], &[1], &[0, 1]] {
            for y in [&[0usize][..], &[1], &[0, 1]] {
                assert!(pair_discrepancy(&ind, x, y, &[0, 1], &[0, 1]).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn pair_errors() {
        let t = skew();
        assert_eq!(
            pair_discrepancy(&t, &[1], &[0], &[0], &[0, 1]),
            Err(Error::SubsetNotContained { axis: Axis::Row })
        );
        assert_eq!(
            pair_discrepancy(&t, &[0], &[1], &[0], &[0]),
            Err(Error::SubsetNotContained { axis: Axis::Col })
        );
        assert_eq!(
            pair_discrepancy(&t, &[], &[1], &[0], &[0]),
            Err(Error::EmptySubset { axis: Axis::Row })
        );
    }

    #[test]
    fn trivial_partition_fixture() {
        let t = skew();
        let r = partition_discrepancy(&t, &Partition::trivial(2, 2), 100).unwrap();
        assert!((r.value - 0.3).abs() < 1e-12);
        assert_eq!(r.witness.rows, vec![0]);
        assert_eq!(r.witness.cols, vec![0]);
        assert_eq!(r.pairs_scanned, 9);
    }

    #[test]
    fn singleton_partition_is_zero() {
        let t = skew();
        let p = Partition::singletons(2, 2).unwrap();
        let r = partition_discrepancy(&t, &p, 100).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.witness.block_row, 0);
    }

    #[test]
    fn budget_is_enforced() {
        let t = skew();
        let err = partition_discrepancy(&t, &Partition::trivial(2, 2), 8).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { required: 9, budget: 8 });
    }

    #[test]
    fn mismatched_dims_rejected() {
        let t = skew();
        assert!(partition_discrepancy(&t, &Partition::trivial(3, 2), 100).is_err());
    }

    #[test]
    fn cutoff_aborts() {
        let t = skew();
        let p = Partition::trivial(2, 2);
        assert!(scan(&t, &p, &ScanConfig::default(), Some(0.1)).unwrap().is_none());
        assert!(scan(&t, &p, &ScanConfig::default(), Some(0.5)).unwrap().is_some());
    }
}
