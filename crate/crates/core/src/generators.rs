//! Table and graph generators: independent, blockwise-constant,
//! contracted-independent, dominance-bounded random tables, and random
//! connected graphs and binary arrays.
//!
//! Every generator is a pure function of its arguments and seed.

use rand::distributions::Open01;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rng::{self, StreamRng};
use crate::search::contracted_matrix;
use crate::spectral::is_non_decomposable;
use crate::table::ContingencyTable;

/// Default attempts for rejection samplers.
pub const DEFAULT_MAX_RETRIES: usize = 10_000;

/// `a_ij = d_row,i · d_col,j`.
pub fn independent_table(d_row: &[f64], d_col: &[f64]) -> Result<ContingencyTable> {
    for (name, d) in [("row", d_row), ("column", d_col)] {
        if d.is_empty() {
            return Err(Error::BadMarginals(format!("{name} marginals are empty")));
        }
        if d.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::BadMarginals(format!("{name} marginals must be positive")));
        }
        let s: f64 = d.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::BadMarginals(format!("{name} marginals sum to {s}, not 1")));
        }
    }
    let rows: Vec<Vec<f64>> = d_row.iter().map(|r| d_col.iter().map(|c| r * c).collect()).collect();
    ContingencyTable::new(&rows, false)
}

/// Contiguous blocks of the given sizes.
fn contiguous_blocks(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut start = 0;
    sizes
        .iter()
        .map(|&s| {
            let b = (start..start + s).collect();
            start += s;
            b
        })
        .collect()
}

/// `a_ij = c_ab` on contiguous blocks, normalized to total 1. Returns the
/// generating partition alongside the table.
pub fn blockwise_table(c: &[Vec<f64>], row_sizes: &[usize], col_sizes: &[usize]) -> Result<(ContingencyTable, Partition)> {
    let k = c.len();
    if k == 0 || c.iter().any(|r| r.len() != k) {
        return Err(Error::BadBlockSpec("block values must form a nonempty square matrix".into()));
    }
    if row_sizes.len() != k || col_sizes.len() != k {
        return Err(Error::BadBlockSpec(format!("need {k} row and column block sizes")));
    }
    if row_sizes.iter().chain(col_sizes).any(|&s| s == 0) {
        return Err(Error::BadBlockSpec("block sizes must be positive".into()));
    }
    if c.iter().flatten().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::BadBlockSpec("block values must be positive".into()));
    }
    let rb = contiguous_blocks(row_sizes);
    let cb = contiguous_blocks(col_sizes);
    let m: usize = row_sizes.iter().sum();
    let n: usize = col_sizes.iter().sum();
    let mut rows = vec![vec![0.0; n]; m];
    for (a, ra) in rb.iter().enumerate() {
        for (b, cbk) in cb.iter().enumerate() {
            for &i in ra {
                for &j in cbk {
                    rows[i][j] = c[a][b];
                }
            }
        }
    }
    let t = ContingencyTable::new(&rows, true)?;
    let p = Partition::new(rb, cb, m, n)?;
    Ok((t, p))
}

fn open01_matrix(rng: &mut StreamRng, m: usize, n: usize) -> Vec<Vec<f64>> {
    (0..m).map(|_| (0..n).map(|_| rng.sample(Open01)).collect()).collect()
}

/// Positive vector summing to one.
pub fn random_marginals(rng: &mut StreamRng, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.sample(Open01)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// Labels of a uniformly shuffled proper k-partition of `0..len`: the
/// first `k` shuffled indices seed the blocks, the rest land uniformly.
pub fn random_partition_labels(rng: &mut StreamRng, len: usize, k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(rng);
    let mut labels = vec![0; len];
    for (pos, &i) in order.iter().enumerate() {
        labels[i] = if pos < k { pos } else { rng.gen_range(0..k) };
    }
    labels
}

/// Random proper k-partition of a `m × n` table.
pub fn random_partition(rng: &mut StreamRng, m: usize, n: usize, k: usize) -> Result<Partition> {
    if k == 0 || k > m.min(n) {
        return Err(Error::InvalidK { k, max: m.min(n) });
    }
    let rl = random_partition_labels(rng, m, k);
    let cl = random_partition_labels(rng, n, k);
    Partition::from_labels(&rl, &cl)
}

/// Random positive table whose k×k block sums form an independent table.
///
/// Starts from uniform `(0,1)` entries on a random k-partition, then scales
/// block `(a,b)` by `r_a c_b / (total · s_ab)`. Block sums become exactly
/// the product of their (unchanged) marginals over the total.
pub fn contracted_independent_table(k: usize, m: usize, n: usize, seed: u64) -> Result<(ContingencyTable, Partition)> {
    let mut rng = rng::stream(seed, 0);
    let p = random_partition(&mut rng, m, n, k)?;
    let mut rows = open01_matrix(&mut rng, m, n);
    let start = ContingencyTable::new(&rows, false)?;
    let cm = contracted_matrix(&start, &p)?;
    let (r, c, total) = (cm.row_marginals(), cm.col_marginals(), cm.total());
    for (a, ra) in p.row_blocks().iter().enumerate() {
        for (b, cb) in p.col_blocks().iter().enumerate() {
            let factor = r[a] * c[b] / (total * cm.s[a][b]);
            if !factor.is_finite() || factor <= 0.0 {
                return Err(Error::GenerationFailure(format!("block ({a}, {b}) scale factor {factor}")));
            }
            for &i in ra {
                for &j in cb {
                    rows[i][j] *= factor;
                }
            }
        }
    }
    let t = ContingencyTable::new(&rows, true)?;
    Ok((t, p))
}

/// Dominance box `c1/m <= d_row,i <= c2/m`, `c3/n <= d_col,j <= c4/n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dominance {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl Dominance {
    pub const fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        Self { c1, c2, c3, c4 }
    }

    /// Tightest box for a table: `c1 = m · min d_row`, `c2 = m · max d_row`,
    /// and likewise for columns, clamped so that `c1, c3 <= 1 <= c2, c4`.
    pub fn measure(t: &ContingencyTable) -> Self {
        let total = t.total();
        let span = |d: &[f64]| {
            let len = d.len() as f64;
            let lo = d.iter().fold(f64::INFINITY, |a, &v| a.min(v)) / total * len;
            let hi = d.iter().fold(0.0f64, |a, &v| a.max(v)) / total * len;
            (lo.min(1.0), hi.max(1.0))
        };
        let (c1, c2) = span(t.row_sums());
        let (c3, c4) = span(t.col_sums());
        Self { c1, c2, c3, c4 }
    }

    /// Whether the normalized marginals of `t` lie in the box, with a
    /// relative slack of `1e-12`.
    pub fn admits(&self, t: &ContingencyTable) -> bool {
        let total = t.total();
        let fits = |d: &[f64], lo: f64, hi: f64| {
            let len = d.len() as f64;
            d.iter().all(|&v| {
                let x = v / total * len;
                x >= lo * (1.0 - 1e-12) && x <= hi * (1.0 + 1e-12)
            })
        };
        fits(t.row_sums(), self.c1, self.c2) && fits(t.col_sums(), self.c3, self.c4)
    }

    fn feasible(&self) -> bool {
        let ok = |lo: f64, hi: f64| lo > 0.0 && lo <= 1.0 && hi >= 1.0 && lo.is_finite() && hi.is_finite();
        ok(self.c1, self.c2) && ok(self.c3, self.c4)
    }
}

/// Scales rows and/or columns to uniform marginals by alternating
/// proportional fitting.
fn balance(rows: &mut [Vec<f64>], fix_rows: bool, fix_cols: bool) {
    let (m, n) = (rows.len(), rows[0].len());
    for _ in 0..10_000 {
        let mut worst: f64 = 0.0;
        if fix_cols {
            for j in 0..n {
                let s: f64 = rows.iter().map(|r| r[j]).sum();
                let target = 1.0 / n as f64;
                worst = worst.max((s - target).abs() / target);
                rows.iter_mut().for_each(|r| r[j] *= target / s);
            }
        }
        if fix_rows {
            for r in rows.iter_mut() {
                let s: f64 = r.iter().sum();
                let target = 1.0 / m as f64;
                worst = worst.max((s - target).abs() / target);
                r.iter_mut().for_each(|v| *v *= target / s);
            }
        }
        if !(fix_rows && fix_cols) || worst < 1e-15 {
            return;
        }
    }
}

/// Uniform `(0,1)` entries, normalized, rejection-sampled into the
/// dominance box. An axis whose box collapses to `lo = hi = 1` is balanced
/// to exactly uniform marginals instead of sampled.
pub fn random_table(m: usize, n: usize, dominance: Dominance, seed: u64, max_retries: usize) -> Result<ContingencyTable> {
    if m == 0 || n == 0 {
        return Err(Error::EmptyTable);
    }
    if !dominance.feasible() {
        return Err(Error::RetriesExhausted { retries: 0 });
    }
    let fix_rows = dominance.c1 == 1.0 && dominance.c2 == 1.0;
    let fix_cols = dominance.c3 == 1.0 && dominance.c4 == 1.0;
    for attempt in 0..max_retries {
        let mut rng = rng::stream(seed, attempt as u64);
        let mut rows = open01_matrix(&mut rng, m, n);
        if fix_rows || fix_cols {
            balance(&mut rows, fix_rows, fix_cols);
        }
        let t = ContingencyTable::new(&rows, true)?;
        if dominance.admits(&t) {
            return Ok(t);
        }
    }
    Err(Error::RetriesExhausted { retries: max_retries })
}

/// 0-1 symmetric adjacency matrix of a graph from an edge list; no loops.
pub fn graph_from_edges(nv: usize, edges: &[(usize, usize)]) -> Result<ContingencyTable> {
    let mut rows = vec![vec![0.0; nv]; nv];
    for &(u, v) in edges {
        if u >= nv || v >= nv || u == v {
            return Err(Error::GenerationFailure(format!("bad edge ({u}, {v})")));
        }
        rows[u][v] = 1.0;
        rows[v][u] = 1.0;
    }
    ContingencyTable::new(&rows, false)
}

/// Connected `G(nv, p)` graph as a 0-1 adjacency table (not normalized).
pub fn random_graph_adjacency(nv: usize, edge_prob: f64, seed: u64) -> Result<ContingencyTable> {
    random_graph_adjacency_with(nv, edge_prob, seed, DEFAULT_MAX_RETRIES)
}

pub fn random_graph_adjacency_with(nv: usize, edge_prob: f64, seed: u64, max_retries: usize) -> Result<ContingencyTable> {
    if nv < 2 || !(edge_prob > 0.0 && edge_prob <= 1.0) {
        return Err(Error::GenerationFailure(format!("need nv >= 2 and 0 < p <= 1, got {nv}, {edge_prob}")));
    }
    for attempt in 0..max_retries {
        let mut rng = rng::stream(seed, attempt as u64);
        let mut rows = vec![vec![0.0; nv]; nv];
        for u in 0..nv {
            for v in (u + 1)..nv {
                if rng.gen_bool(edge_prob) {
                    rows[u][v] = 1.0;
                    rows[v][u] = 1.0;
                }
            }
        }
        // Isolated vertices make a zero marginal; retry.
        let Ok(t) = ContingencyTable::new(&rows, false) else { continue };
        if graph_connected(&t) {
            return Ok(t);
        }
    }
    Err(Error::RetriesExhausted { retries: max_retries })
}

/// Vertex connectivity of a symmetric adjacency table.
pub fn graph_connected(t: &ContingencyTable) -> bool {
    let nv = t.rows();
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for v in 0..nv {
            if !seen[v] && t.get(u, v) != 0.0 {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Random `m × n` 0-1 array with connected bipartite support (hence no
/// zero row or column). Not normalized.
pub fn random_binary_table(m: usize, n: usize, fill_prob: f64, seed: u64) -> Result<ContingencyTable> {
    if m == 0 || n == 0 || !(fill_prob > 0.0 && fill_prob <= 1.0) {
        return Err(Error::GenerationFailure(format!("need m, n >= 1 and 0 < p <= 1, got {m}, {n}, {fill_prob}")));
    }
    for attempt in 0..DEFAULT_MAX_RETRIES {
        let mut rng = rng::stream(seed, attempt as u64);
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| if rng.gen_bool(fill_prob) { 1.0 } else { 0.0 }).collect())
            .collect();
        let Ok(t) = ContingencyTable::new(&rows, false) else { continue };
        if is_non_decomposable(&t) {
            return Ok(t);
        }
    }
    Err(Error::RetriesExhausted { retries: DEFAULT_MAX_RETRIES })
}

/// Serializable description of a generator run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// Outer product of marginals; random marginals when omitted.
    Independent {
        rows: usize,
        cols: usize,
        #[serde(default)]
        row_marginals: Option<Vec<f64>>,
        #[serde(default)]
        col_marginals: Option<Vec<f64>>,
    },
    /// Blockwise-constant; random values in `[1, 10)` and random sizes when
    /// omitted.
    Blockwise {
        rows: usize,
        cols: usize,
        k: usize,
        #[serde(default)]
        values: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        row_sizes: Option<Vec<usize>>,
        #[serde(default)]
        col_sizes: Option<Vec<usize>>,
    },
    Contracted {
        rows: usize,
        cols: usize,
        k: usize,
    },
    RandomTable {
        rows: usize,
        cols: usize,
        dominance: Dominance,
        #[serde(default = "default_retries")]
        max_retries: usize,
    },
    RandomGraph {
        vertices: usize,
        edge_prob: f64,
    },
    RandomBinary {
        rows: usize,
        cols: usize,
        fill_prob: f64,
    },
}

fn default_retries() -> usize {
    DEFAULT_MAX_RETRIES
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub table: ContingencyTable,
    /// The generating partition, for kinds that have one.
    pub partition: Option<Partition>,
}

/// Random sizes of `k` nonempty parts summing to `total`.
fn random_sizes(rng: &mut StreamRng, total: usize, k: usize) -> Vec<usize> {
    let labels = random_partition_labels(rng, total, k);
    let mut sizes = vec![0; k];
    for l in labels {
        sizes[l] += 1;
    }
    sizes
}

impl GeneratorSpec {
    pub fn generate(&self, seed: u64) -> Result<Generated> {
        let mut rng = rng::stream(seed, u64::MAX);
        let (table, partition) = match self {
            GeneratorSpec::Independent {
                rows,
                cols,
                row_marginals,
                col_marginals,
            } => {
                let r = row_marginals.clone().unwrap_or_else(|| random_marginals(&mut rng, *rows));
                let c = col_marginals.clone().unwrap_or_else(|| random_marginals(&mut rng, *cols));
                if r.len() != *rows || c.len() != *cols {
                    return Err(Error::BadMarginals("marginal lengths do not match dimensions".into()));
                }
                (independent_table(&r, &c)?, None)
            }
            GeneratorSpec::Blockwise {
                rows,
                cols,
                k,
                values,
                row_sizes,
                col_sizes,
            } => {
                if *k == 0 || *k > (*rows).min(*cols) {
                    return Err(Error::InvalidK { k: *k, max: (*rows).min(*cols) });
                }
                let values = values.clone().unwrap_or_else(|| {
                    (0..*k).map(|_| (0..*k).map(|_| rng.gen_range(1.0..10.0)).collect()).collect()
                });
                let rs = row_sizes.clone().unwrap_or_else(|| random_sizes(&mut rng, *rows, *k));
                let cs = col_sizes.clone().unwrap_or_else(|| random_sizes(&mut rng, *cols, *k));
                let (t, p) = blockwise_table(&values, &rs, &cs)?;
                if t.rows() != *rows || t.cols() != *cols {
                    return Err(Error::BadBlockSpec("block sizes do not match dimensions".into()));
                }
                (t, Some(p))
            }
            GeneratorSpec::Contracted { rows, cols, k } => {
                let (t, p) = contracted_independent_table(*k, *rows, *cols, seed)?;
                (t, Some(p))
            }
            GeneratorSpec::RandomTable {
                rows,
                cols,
                dominance,
                max_retries,
            } => (random_table(*rows, *cols, *dominance, seed, *max_retries)?, None),
            GeneratorSpec::RandomGraph { vertices, edge_prob } => (random_graph_adjacency(*vertices, *edge_prob, seed)?, None),
            GeneratorSpec::RandomBinary { rows, cols, fill_prob } => (random_binary_table(*rows, *cols, *fill_prob, seed)?, None),
        };
        Ok(Generated { table, partition })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::partition_discrepancy;
    use crate::search::is_contracted_independent;

    #[test]
    fn independent_examples() {
        let t = independent_table(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert!(t.entries().iter().all(|&v| v == 0.25));
        let t = independent_table(&[0.3, 0.7], &[0.4, 0.6]).unwrap();
        let expect = [0.12, 0.18, 0.28, 0.42];
        for (a, b) in t.entries().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        for (a, b) in t.row_sums().iter().zip([0.3, 0.7]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(independent_table(&[0.5, 0.6], &[1.0]).is_err());
        assert!(independent_table(&[1.0, 0.0], &[1.0]).is_err());
    }

    #[test]
    fn blockwise_examples() {
        let (t, p) = blockwise_table(&[vec![2.0, 1.0], vec![1.0, 2.0]], &[2, 2], &[2, 2]).unwrap();
        assert!((t.get(0, 0) - 2.0 / 24.0).abs() < 1e-15);
        assert!((t.get(0, 3) - 1.0 / 24.0).abs() < 1e-15);
        assert!(partition_discrepancy(&t, &p, 1000).unwrap().value < 1e-12);

        let (t, _) = blockwise_table(&[vec![1.0]], &[3], &[2]).unwrap();
        assert!(t.entries().iter().all(|&v| (v - 1.0 / 6.0).abs() < 1e-15));

        let (t, p) = blockwise_table(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1, 3], &[2, 1]).unwrap();
        assert!(is_contracted_independent(&contracted_matrix(&t, &p).unwrap(), 1e-12));

        assert!(blockwise_table(&[vec![1.0, 0.0], vec![1.0, 1.0]], &[1, 1], &[1, 1]).is_err());
        assert!(blockwise_table(&[vec![1.0]], &[0], &[1]).is_err());
        assert!(blockwise_table(&[vec![1.0]], &[1, 1], &[1]).is_err());
    }

    #[test]
    fn contracted_examples() {
        let (t, p) = contracted_independent_table(2, 4, 4, 1).unwrap();
        assert!(contracted_matrix(&t, &p).unwrap().residual() <= 1e-10);
        let (_, p) = contracted_independent_table(1, 3, 5, 9).unwrap();
        assert_eq!(p.k(), 1);
        assert!(contracted_independent_table(5, 4, 4, 1).is_err());
    }

    #[test]
    fn random_table_examples() {
        let t = random_table(4, 5, Dominance::new(1.0, 1.0, 1.0, 1.0), 3, 10).unwrap();
        for &d in t.row_sums() {
            assert!((d - 0.25).abs() < 1e-14);
        }
        for &d in t.col_sums() {
            assert!((d - 0.2).abs() < 1e-14);
        }
        let box_ = Dominance::new(0.5, 2.0, 0.5, 2.0);
        let t = random_table(5, 5, box_, 7, 1000).unwrap();
        let measured = Dominance::measure(&t);
        assert!(measured.c1 >= 0.5 && measured.c2 <= 2.0 && measured.c3 >= 0.5 && measured.c4 <= 2.0);
        assert_eq!(
            random_table(5, 5, Dominance::new(0.5, 0.9, 0.5, 2.0), 1, 10),
            Err(Error::RetriesExhausted { retries: 0 })
        );
        assert_eq!(
            random_table(6, 6, Dominance::new(0.999, 1.001, 0.999, 1.001), 1, 5),
            Err(Error::RetriesExhausted { retries: 5 })
        );
    }

    #[test]
    fn graph_examples() {
        let path = graph_from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.row_sums(), &[1.0, 2.0, 1.0]);
        assert_eq!(path.total(), 4.0);
        let k3 = graph_from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(k3.row_sums(), &[2.0, 2.0, 2.0]);
        assert_eq!(k3.get(1, 1), 0.0);
        let g = random_graph_adjacency(10, 0.5, 3).unwrap();
        assert!(graph_connected(&g));
        assert!(g.row_sums().iter().all(|&d| d >= 1.0));
        for i in 0..10 {
            assert_eq!(g.get(i, i), 0.0);
            for j in 0..10 {
                assert_eq!(g.get(i, j), g.get(j, i));
            }
        }
        assert!(graph_from_edges(3, &[(0, 0)]).is_err());
        assert!(random_graph_adjacency(1, 0.5, 0).is_err());
    }

    #[test]
    fn binary_tables_are_connected() {
        let t = random_binary_table(8, 8, 0.5, 11).unwrap();
        assert!(is_non_decomposable(&t));
        assert!(t.entries().iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn spec_generation_is_reproducible() {
        let specs = [
            GeneratorSpec::Independent { rows: 3, cols: 4, row_marginals: None, col_marginals: None },
            GeneratorSpec::Blockwise { rows: 5, cols: 4, k: 2, values: None, row_sizes: None, col_sizes: None },
            GeneratorSpec::Contracted { rows: 4, cols: 4, k: 2 },
            GeneratorSpec::RandomTable { rows: 4, cols: 4, dominance: Dominance::new(0.5, 2.0, 0.5, 2.0), max_retries: 100 },
            GeneratorSpec::RandomGraph { vertices: 6, edge_prob: 0.5 },
            GeneratorSpec::RandomBinary { rows: 3, cols: 5, fill_prob: 0.6 },
        ];
        for s in &specs {
            assert_eq!(s.generate(42).unwrap(), s.generate(42).unwrap());
        }
    }

    #[test]
    fn spec_json_shape() {
        let s: GeneratorSpec = serde_json::from_str(r#"{"kind":"contracted","rows":4,"cols":4,"k":2}"#).unwrap();
        assert_eq!(s, GeneratorSpec::Contracted { rows: 4, cols: 4, k: 2 });
        assert!(serde_json::from_str::<GeneratorSpec>(r#"{"kind":"contracted","rows":4,"cols":4,"k":2,"x":1}"#).is_err());
    }
}
