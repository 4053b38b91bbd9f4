//! Minimizing the k-way discrepancy.

use rand::Rng;
use serde::Serialize;

use crate::discrepancy::{partition_discrepancy_with, scan, ScanConfig, DEFAULT_SUBSET_BUDGET};
use crate::error::{Axis, Error, Result};
use crate::exec::{fold_indices, Exec};
use crate::partition::{restricted_growth_strings, stirling2, Partition, SubsetPair};
use crate::rng;
use crate::table::ContingencyTable;

/// Default cap on the number of partition pairs an exact search visits.
pub const DEFAULT_PARTITION_BUDGET: u64 = 2_000_000;

/// Absolute tolerance on the rank-1 residual of a contracted matrix.
pub const DEFAULT_INDEPENDENCE_TOL: f64 = 1e-9;

/// Slack before `disc_{k+1} > disc_k` is reported as a violation.
pub const MONOTONICITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub partition_budget: u64,
    pub subset_budget: u64,
    pub exec: Exec,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            partition_budget: DEFAULT_PARTITION_BUDGET,
            subset_budget: DEFAULT_SUBSET_BUDGET,
            exec: Exec::default(),
        }
    }
}

impl SearchConfig {
    fn scan(&self) -> ScanConfig {
        ScanConfig {
            budget: self.subset_budget,
            exec: self.exec,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Refine,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Refine => "refine",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub best_partition: Partition,
    pub best_value: f64,
    pub witness: SubsetPair,
    pub method: Method,
    pub partitions_evaluated: u64,
    /// `(k, value)` along a refinement chain; empty for exact search.
    pub trace: Vec<(usize, f64)>,
}

fn check_k(t: &ContingencyTable, k: usize) -> Result<()> {
    let max = t.rows().min(t.cols());
    if k == 0 || k > max {
        return Err(Error::InvalidK { k, max });
    }
    Ok(())
}

/// `disc_k` by enumerating every proper k-partition of rows crossed with
/// every proper k-partition of columns.
pub fn exact_min_discrepancy(t: &ContingencyTable, k: usize, budget: u64) -> Result<SearchResult> {
    exact_min_discrepancy_with(
        t,
        k,
        &SearchConfig {
            partition_budget: budget,
            ..Default::default()
        },
    )
}

pub fn exact_min_discrepancy_with(t: &ContingencyTable, k: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    check_k(t, k)?;
    let required = stirling2(t.rows(), k).saturating_mul(stirling2(t.cols(), k));
    if required > u128::from(cfg.partition_budget) {
        return Err(Error::BudgetExceeded {
            required,
            budget: cfg.partition_budget,
        });
    }
    let row_rgs = restricted_growth_strings(t.rows(), k);
    let col_rgs = restricted_growth_strings(t.cols(), k);
    let total = row_rgs.len() * col_rgs.len();
    // Partitions are scanned sequentially; the parallelism is across them.
    let scan_cfg = ScanConfig {
        budget: cfg.subset_budget,
        exec: Exec::Sequential,
    };

    type Found = Option<(f64, usize, Partition, SubsetPair)>;
    let pick = |a: Found, b: Found| -> Found {
        match (a, b) {
            (Some(a), Some(b)) => {
                if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                    Some(b)
                } else {
                    Some(a)
                }
            }
            (a, None) => a,
            (None, b) => b,
        }
    };
    let best: Result<Found> = fold_indices(
        cfg.exec,
        total,
        || Ok(None),
        |acc: Result<Found>, idx| {
            let acc = acc?;
            let p = Partition::from_labels(&row_rgs[idx / col_rgs.len()], &col_rgs[idx % col_rgs.len()])?;
            let cutoff = acc.as_ref().map(|b| b.0);
            match scan(t, &p, &scan_cfg, cutoff)? {
                Some(r) => Ok(pick(acc, Some((r.value, idx, p, r.witness)))),
                None => Ok(acc),
            }
        },
        |acc| acc,
        |a, b| Ok(pick(a?, b?)),
        Ok(None),
    );
    let (best_value, _, best_partition, witness) = best?.expect("at least one proper k-partition exists");
    Ok(SearchResult {
        best_partition,
        best_value,
        witness,
        method: Method::Exact,
        partitions_evaluated: total as u64,
        trace: Vec::new(),
    })
}

/// Splits the witness blocks of `p` into `X, R_a∖X` and `Y, C_b∖Y`,
/// producing a (k+1)-partition.
///
/// When the witness fills its whole block on one side, that side instead
/// peels the index with the largest marginal off its largest block.
pub fn refine_split(t: &ContingencyTable, p: &Partition, budget: u64) -> Result<SearchResult> {
    refine_split_with(
        t,
        p,
        &SearchConfig {
            subset_budget: budget,
            ..Default::default()
        },
    )
}

pub fn refine_split_with(t: &ContingencyTable, p: &Partition, cfg: &SearchConfig) -> Result<SearchResult> {
    let before = partition_discrepancy_with(t, p, &cfg.scan())?;
    let k = p.k();
    if k + 1 > t.rows().min(t.cols()) {
        return Err(Error::NotRefinable(format!(
            "a {}-partition does not fit a {}x{} table",
            k + 1,
            t.rows(),
            t.cols()
        )));
    }
    let w = &before.witness;
    let rows = split_side(p.row_blocks(), w.block_row, &w.rows, t.row_sums(), Axis::Row)?;
    let cols = split_side(p.col_blocks(), w.block_col, &w.cols, t.col_sums(), Axis::Col)?;
    let refined = Partition::new(rows, cols, t.rows(), t.cols())?;
    let after = partition_discrepancy_with(t, &refined, &cfg.scan())?;
    Ok(SearchResult {
        best_partition: refined,
        best_value: after.value,
        witness: after.witness,
        method: Method::Refine,
        partitions_evaluated: 1,
        trace: vec![(k, before.value), (k + 1, after.value)],
    })
}

fn split_side(
    blocks: &[Vec<usize>],
    witness_block: usize,
    subset: &[usize],
    marginals: &[f64],
    axis: Axis,
) -> Result<Vec<Vec<usize>>> {
    let mut out = blocks.to_vec();
    let block = &blocks[witness_block];
    if subset.len() < block.len() {
        let rest: Vec<usize> = block.iter().copied().filter(|i| !subset.contains(i)).collect();
        out[witness_block] = subset.to_vec();
        out.push(rest);
        return Ok(out);
    }
    // First largest block with at least two members.
    let target = (0..blocks.len())
        .filter(|&b| blocks[b].len() >= 2)
        .fold(None, |best: Option<usize>, b| match best {
            Some(x) if blocks[x].len() >= blocks[b].len() => Some(x),
            _ => Some(b),
        })
        .ok_or_else(|| Error::NotRefinable(format!("every {axis} block is a singleton")))?;
    let peel = blocks[target]
        .iter()
        .copied()
        .fold(None, |best: Option<usize>, i| match best {
            Some(x) if marginals[x] >= marginals[i] => Some(x),
            _ => Some(i),
        })
        .expect("block is nonempty");
    out[target].retain(|&i| i != peel);
    out.push(vec![peel]);
    Ok(out)
}

/// Applies [`refine_split`] repeatedly until the partition has `target_k`
/// blocks. The trace holds every intermediate value.
pub fn refine_chain(t: &ContingencyTable, start: &Partition, target_k: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    check_k(t, target_k)?;
    if target_k < start.k() {
        return Err(Error::InvalidK {
            k: target_k,
            max: start.k(),
        });
    }
    let initial = partition_discrepancy_with(t, start, &cfg.scan())?;
    let mut current = SearchResult {
        best_partition: start.clone(),
        best_value: initial.value,
        witness: initial.witness,
        method: Method::Refine,
        partitions_evaluated: 0,
        trace: vec![(start.k(), initial.value)],
    };
    while current.best_partition.k() < target_k {
        let step = refine_split_with(t, &current.best_partition, cfg)?;
        let mut trace = std::mem::take(&mut current.trace);
        trace.push(*step.trace.last().expect("refine trace has two entries"));
        current = SearchResult {
            trace,
            partitions_evaluated: current.partitions_evaluated + 1,
            ..step
        };
    }
    Ok(current)
}

/// Block sums `s_ab = a(R_a, C_b)` of a partition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractedMatrix {
    pub s: Vec<Vec<f64>>,
    pub partition: Partition,
}

impl ContractedMatrix {
    pub fn k(&self) -> usize {
        self.s.len()
    }

    pub fn total(&self) -> f64 {
        self.s.iter().flatten().fold(0.0, |acc, v| acc + v)
    }

    pub fn row_marginals(&self) -> Vec<f64> {
        self.s.iter().map(|r| r.iter().fold(0.0, |acc, v| acc + v)).collect()
    }

    pub fn col_marginals(&self) -> Vec<f64> {
        (0..self.k())
            .map(|b| self.s.iter().fold(0.0, |acc, r| acc + r[b]))
            .collect()
    }

    /// `max_ab |s_ab − r_a c_b / total|`: distance from the independent
    /// table with the same marginals.
    pub fn residual(&self) -> f64 {
        let (r, c, total) = (self.row_marginals(), self.col_marginals(), self.total());
        let mut worst: f64 = 0.0;
        for (a, row) in self.s.iter().enumerate() {
            for (b, &s) in row.iter().enumerate() {
                worst = worst.max((s - r[a] * c[b] / total).abs());
            }
        }
        worst
    }

    /// `|s11 s22 − s12 s21|` for a 2×2 contraction.
    pub fn cross_residual(&self) -> Option<f64> {
        (self.k() == 2).then(|| (self.s[0][0] * self.s[1][1] - self.s[0][1] * self.s[1][0]).abs())
    }
}

pub fn contracted_matrix(t: &ContingencyTable, p: &Partition) -> Result<ContractedMatrix> {
    p.check_dims(t.rows(), t.cols())?;
    let s = p
        .row_blocks()
        .iter()
        .map(|ra| p.col_blocks().iter().map(|cb| t.cut_sorted(ra, cb)).collect())
        .collect();
    Ok(ContractedMatrix {
        s,
        partition: p.clone(),
    })
}

/// Whether the contraction is an independent table, i.e. rank one with its
/// own marginals, within `tol`.
pub fn is_contracted_independent(cm: &ContractedMatrix, tol: f64) -> bool {
    cm.residual() <= tol
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutCandidate {
    pub partition: Partition,
    /// Off-diagonal block mass `s12 + s21`.
    pub cut: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractedSearch {
    pub partition: Partition,
    /// `|s11 s22 − s12 s21|` at `partition`.
    pub residual: f64,
    pub exhaustive: bool,
    pub candidates: u64,
    pub min_cut: CutCandidate,
    pub max_cut: CutCandidate,
}

/// Labels for the 2-partition encoded by `mask`: index 0 is always in block
/// 0 and index `i ≥ 1` is in block `bit (len-1-i)` of `mask`, so increasing
/// masks follow lexicographic RGS order.
fn two_block_labels(mask: u64, len: usize) -> Vec<usize> {
    (0..len)
        .map(|i| if i == 0 { 0 } else { (mask >> (len - 1 - i) & 1) as usize })
        .collect()
}

/// Searches proper 2-partitions for the one whose contraction is closest to
/// independent. Exhaustive within `budget` candidates, otherwise `budget`
/// seeded uniform samples.
pub fn find_contracted_independent_2partition(t: &ContingencyTable, budget: u64, seed: u64) -> Result<ContractedSearch> {
    find_contracted_independent_2partition_with(t, budget, seed, Exec::default())
}

pub fn find_contracted_independent_2partition_with(
    t: &ContingencyTable,
    budget: u64,
    seed: u64,
    exec: Exec,
) -> Result<ContractedSearch> {
    let (m, n) = (t.rows(), t.cols());
    check_k(t, 2)?;
    if m > 64 || n > 64 {
        return Err(Error::InvalidK { k: 2, max: 64 });
    }
    let nr = (1u128 << (m - 1)) - 1;
    let nc = (1u128 << (n - 1)) - 1;
    let required = nr * nc;
    if budget == 0 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let exhaustive = required <= u128::from(budget);
    let count = if exhaustive { required as u64 } else { budget };

    let candidate = |idx: u64| -> (u64, u64) {
        if exhaustive {
            let nc = nc as u64;
            (idx / nc + 1, idx % nc + 1)
        } else {
            let mut r = rng::stream(seed, idx);
            (r.gen_range(1..=nr as u64), r.gen_range(1..=nc as u64))
        }
    };
    let contraction = |rmask: u64, cmask: u64| -> [[f64; 2]; 2] {
        let rl = two_block_labels(rmask, m);
        let cl = two_block_labels(cmask, n);
        let mut s = [[0.0; 2]; 2];
        for (i, &a) in rl.iter().enumerate() {
            for (j, &b) in cl.iter().enumerate() {
                s[a][b] += t.get(i, j);
            }
        }
        s
    };

    // (residual, idx), (min cut, idx), (max cut, idx)
    type Acc = ((f64, u64), (f64, u64), (f64, u64));
    let init: Acc = (
        (f64::INFINITY, u64::MAX),
        (f64::INFINITY, u64::MAX),
        (f64::NEG_INFINITY, u64::MAX),
    );
    let lower = |a: (f64, u64), b: (f64, u64)| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a };
    let upper = |a: (f64, u64), b: (f64, u64)| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a };
    let combine = |a: Acc, b: Acc| -> Acc { (lower(a.0, b.0), lower(a.1, b.1), upper(a.2, b.2)) };
    let (best, min_cut, max_cut) = fold_indices(
        exec,
        count as usize,
        || init,
        |acc, idx| {
            let (r, c) = candidate(idx as u64);
            let s = contraction(r, c);
            let residual = (s[0][0] * s[1][1] - s[0][1] * s[1][0]).abs();
            let cut = s[0][1] + s[1][0];
            let idx = idx as u64;
            combine(acc, ((residual, idx), (cut, idx), (cut, idx)))
        },
        |acc| acc,
        combine,
        init,
    );
    let partition_at = |idx: u64| -> Result<Partition> {
        let (r, c) = candidate(idx);
        Partition::from_labels(&two_block_labels(r, m), &two_block_labels(c, n))
    };
    Ok(ContractedSearch {
        partition: partition_at(best.1)?,
        residual: best.0,
        exhaustive,
        candidates: count,
        min_cut: CutCandidate {
            partition: partition_at(min_cut.1)?,
            cut: min_cut.0,
        },
        max_cut: CutCandidate {
            partition: partition_at(max_cut.1)?,
            cut: max_cut.0,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepEntry {
    pub k: usize,
    /// `None` when neither exact search nor refinement could produce a value.
    pub value: Option<f64>,
    pub method: Option<Method>,
    pub partition: Option<Partition>,
    /// `value` exceeds the previous entry's value by more than
    /// [`MONOTONICITY_TOL`].
    pub violation: bool,
}

/// `disc_k` for `k = 1..=k_max`: exact where the partition budget allows,
/// otherwise one refinement step from the previous entry's partition.
/// Increases are flagged, never treated as errors.
pub fn monotonicity_sweep(t: &ContingencyTable, k_max: usize, budget: u64) -> Result<Vec<SweepEntry>> {
    monotonicity_sweep_with(
        t,
        k_max,
        &SearchConfig {
            partition_budget: budget,
            ..Default::default()
        },
    )
}

pub fn monotonicity_sweep_with(t: &ContingencyTable, k_max: usize, cfg: &SearchConfig) -> Result<Vec<SweepEntry>> {
    check_k(t, k_max)?;
    let mut out: Vec<SweepEntry> = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let found = match exact_min_discrepancy_with(t, k, cfg) {
            Ok(r) => Some(r),
            Err(Error::BudgetExceeded { .. }) => match out.last().and_then(|e| e.partition.as_ref()) {
                Some(prev) => match refine_split_with(t, prev, cfg) {
                    Ok(r) => Some(r),
                    Err(Error::NotRefinable(_) | Error::BudgetExceeded { .. }) => None,
                    Err(e) => return Err(e),
                },
                None => None,
            },
            Err(e) => return Err(e),
        };
        let value = found.as_ref().map(|r| r.best_value);
        let violation = match (out.last().and_then(|e| e.value), value) {
            (Some(prev), Some(cur)) => cur > prev + MONOTONICITY_TOL,
            _ => false,
        };
        out.push(SweepEntry {
            k,
            value,
            method: found.as_ref().map(|r| r.method),
            partition: found.map(|r| r.best_partition),
            violation,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::partition_discrepancy;

    fn skew() -> ContingencyTable {
        ContingencyTable::new(&[vec![0.4, 0.1], vec![0.1, 0.4]], false).unwrap()
    }

    fn independent3() -> ContingencyTable {
        let r = [0.2, 0.3, 0.5];
        let c = [0.1, 0.6, 0.3];
        let rows: Vec<Vec<f64>> = r.iter().map(|a| c.iter().map(|b| a * b).collect()).collect();
        ContingencyTable::new(&rows, false).unwrap()
    }

    #[test]
    fn exact_fixture() {
        let t = skew();
        let r1 = exact_min_discrepancy(&t, 1, 10).unwrap();
        assert!((r1.best_value - 0.3).abs() < 1e-12);
        assert_eq!(r1.partitions_evaluated, 1);
        let r2 = exact_min_discrepancy(&t, 2, 10).unwrap();
        assert_eq!(r2.best_value, 0.0);
        assert_eq!(r2.best_partition, Partition::singletons(2, 2).unwrap());
    }

    #[test]
    fn exact_independent_is_zero() {
        let r = exact_min_discrepancy(&independent3(), 2, 100).unwrap();
        assert!(r.best_value < 1e-12);
        assert_eq!(r.partitions_evaluated, 9);
    }

    #[test]
    fn exact_errors() {
        let t = skew();
        assert_eq!(exact_min_discrepancy(&t, 3, 10).unwrap_err(), Error::InvalidK { k: 3, max: 2 });
        assert_eq!(exact_min_discrepancy(&t, 0, 10).unwrap_err(), Error::InvalidK { k: 0, max: 2 });
        let t = independent3();
        assert_eq!(
            exact_min_discrepancy(&t, 2, 8).unwrap_err(),
            Error::BudgetExceeded { required: 9, budget: 8 }
        );
    }

    #[test]
    fn exact_modes_agree() {
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..5).map(|j| ((i * 7 + j * 3) % 5 + 1) as f64).collect())
            .collect();
        let t = ContingencyTable::new(&rows, true).unwrap();
        for k in 1..=3 {
            let seq = exact_min_discrepancy_with(&t, k, &SearchConfig { exec: Exec::Sequential, ..Default::default() }).unwrap();
            let par = exact_min_discrepancy_with(&t, k, &SearchConfig { exec: Exec::Parallel, ..Default::default() }).unwrap();
            assert_eq!(seq, par);
            let check = partition_discrepancy(&t, &seq.best_partition, 1 << 20).unwrap();
            assert_eq!(check.value, seq.best_value);
        }
    }

    #[test]
    fn refine_fixture() {
        let t = skew();
        let r = refine_split(&t, &Partition::trivial(2, 2), 100).unwrap();
        assert_eq!(r.best_partition, Partition::singletons(2, 2).unwrap());
        assert_eq!(r.best_value, 0.0);
        assert_eq!(r.trace.len(), 2);
        assert!((r.trace[0].1 - 0.3).abs() < 1e-12);
        assert_eq!(r.trace[1], (2, 0.0));
    }

    #[test]
    fn refine_independent_stays_zero() {
        let t = independent3();
        let r = refine_split(&t, &Partition::trivial(3, 3), 1000).unwrap();
        assert!(r.best_value < 1e-12);
        assert_eq!(r.best_partition.k(), 2);
    }

    #[test]
    fn refine_degenerate_witness_peels() {
        // Witness X is the whole single row block; rows peel instead.
        let t = ContingencyTable::new(&[vec![0.3, 0.1, 0.1], vec![0.1, 0.2, 0.2]], true).unwrap();
        let p = Partition::new(vec![vec![0], vec![1]], vec![vec![0], vec![1, 2]], 2, 3).unwrap();
        assert!(matches!(refine_split(&t, &p, 100), Err(Error::NotRefinable(_))));

        let blocks = vec![vec![0, 1], vec![2]];
        let split = split_side(&blocks, 1, &[2], &[0.1, 0.5, 0.4], Axis::Row).unwrap();
        assert_eq!(split, vec![vec![0], vec![2], vec![1]]);
        let err = split_side(&[vec![0], vec![1]], 0, &[0], &[0.5, 0.5], Axis::Col).unwrap_err();
        assert!(matches!(err, Error::NotRefinable(_)));
    }

    #[test]
    fn refine_chain_reaches_target() {
        let t = independent3();
        let r = refine_chain(&t, &Partition::trivial(3, 3), 3, &SearchConfig::default()).unwrap();
        assert_eq!(r.best_partition.k(), 3);
        assert_eq!(r.trace.iter().map(|e| e.0).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn contracted_examples() {
        let uniform = ContingencyTable::new(&[vec![1.0, 1.0], vec![1.0, 1.0]], true).unwrap();
        let cm = contracted_matrix(&uniform, &Partition::singletons(2, 2).unwrap()).unwrap();
        assert_eq!(cm.s, vec![vec![0.25, 0.25], vec![0.25, 0.25]]);
        let cm = contracted_matrix(&skew(), &Partition::trivial(2, 2)).unwrap();
        assert_eq!(cm.s, vec![vec![1.0]]);
        assert!(is_contracted_independent(&cm, 1e-9));
        let cm = contracted_matrix(&skew(), &Partition::singletons(2, 2).unwrap()).unwrap();
        assert_eq!(cm.s, vec![vec![0.4, 0.1], vec![0.1, 0.4]]);
        assert!(!is_contracted_independent(&cm, 1e-9));
        assert!((cm.cross_residual().unwrap() - 0.15).abs() < 1e-15);
    }

    #[test]
    fn independence_examples() {
        let t = ContingencyTable::new(&[vec![0.1, 0.2], vec![0.2, 0.4]], false).unwrap();
        let cm = contracted_matrix(&t, &Partition::singletons(2, 2).unwrap()).unwrap();
        assert!(is_contracted_independent(&cm, 1e-9));
        let t = independent3();
        for k in 1..=3 {
            for rl in restricted_growth_strings(3, k) {
                for cl in restricted_growth_strings(3, k) {
                    let p = Partition::from_labels(&rl, &cl).unwrap();
                    let cm = contracted_matrix(&t, &p).unwrap();
                    assert!(is_contracted_independent(&cm, 1e-12));
                }
            }
        }
    }

    #[test]
    fn contracted_2partition_fixtures() {
        let r = find_contracted_independent_2partition(&skew(), 100, 0).unwrap();
        assert!((r.residual - 0.15).abs() < 1e-15);
        assert!(r.exhaustive);
        assert_eq!(r.candidates, 1);
        let t = ContingencyTable::new(&[vec![0.1, 0.2], vec![0.2, 0.4]], false).unwrap();
        assert!(find_contracted_independent_2partition(&t, 100, 0).unwrap().residual < 1e-15);
        let r = find_contracted_independent_2partition(&independent3(), 100, 0).unwrap();
        assert!(r.residual < 1e-15);
        assert_eq!(r.candidates, 9);
        assert!(find_contracted_independent_2partition(&skew(), 0, 0).is_err());
    }

    #[test]
    fn contracted_2partition_sampling_is_deterministic() {
        let rows: Vec<Vec<f64>> = (0..7)
            .map(|i| (0..6).map(|j| ((i * 5 + j * 11) % 7 + 1) as f64).collect())
            .collect();
        let t = ContingencyTable::new(&rows, true).unwrap();
        let a = find_contracted_independent_2partition_with(&t, 50, 3, Exec::Sequential).unwrap();
        let b = find_contracted_independent_2partition_with(&t, 50, 3, Exec::Parallel).unwrap();
        assert!(!a.exhaustive);
        assert_eq!(a, b);
    }

    #[test]
    fn two_block_labels_follow_rgs_order() {
        let all: Vec<Vec<usize>> = (1..8).map(|mask| two_block_labels(mask, 4)).collect();
        assert_eq!(all, restricted_growth_strings(4, 2));
    }

    #[test]
    fn sweep_fixtures() {
        let s = monotonicity_sweep(&skew(), 2, 100).unwrap();
        assert!((s[0].value.unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(s[1].value, Some(0.0));
        assert!(s.iter().all(|e| !e.violation && e.method == Some(Method::Exact)));
        let s = monotonicity_sweep(&independent3(), 3, 100).unwrap();
        assert!(s.iter().all(|e| e.value.unwrap() < 1e-12));
        assert!(monotonicity_sweep(&skew(), 3, 100).is_err());
    }

    #[test]
    fn sweep_falls_back_to_refinement() {
        let s = monotonicity_sweep(&independent3(), 3, 1).unwrap();
        assert_eq!(s[0].method, Some(Method::Exact));
        assert_eq!(s[1].method, Some(Method::Refine));
        // S(3,3) = 1 fits any budget, so k = 3 is exact again.
        assert_eq!(s[2].method, Some(Method::Exact));
        assert_eq!(s[2].partition.as_ref().unwrap().k(), 3);
    }
}
