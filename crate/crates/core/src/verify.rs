//! Randomized checks of the continuity theorems, the mediant lemma and the
//! structural propositions, plus monotonicity campaigns.
//!
//! Each check produces a [`CheckRecord`]. A trial's slack is the smallest
//! `bound − attained` over the inequalities it tests; the trial fails when
//! that slack is below `−tol`, or when an exact condition (equality or
//! strictness in the mediant lemma) does not hold. Trial `i` draws from
//! stream `i` of the seed, so records are identical across runs and thread
//! counts.

use rand::distributions::Open01;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::discrepancy::{partition_discrepancy_with, ScanConfig, DEFAULT_SUBSET_BUDGET};
use crate::error::{Axis, Error, Result};
use crate::exec::{fold_indices, map_indices, Exec};
use crate::generators::{
    contracted_independent_table, independent_table, random_binary_table, random_graph_adjacency, random_marginals,
    random_partition, random_partition_labels, random_table, Dominance, GeneratorSpec,
};
use crate::partition::{restricted_growth_strings, Partition};
use crate::rng::{self, child_seed, StreamRng};
use crate::search::{contracted_matrix, monotonicity_sweep_with, Method, SearchConfig, SweepEntry};
use crate::table::{canonical, ContingencyTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    Thm1,
    Thm2,
    LemmaMediant,
    Prop1,
    Prop2,
    Prop3,
    Prop4,
    Prop5,
    Monotonicity,
}

impl CheckId {
    pub const ALL: [CheckId; 9] = [
        CheckId::Thm1,
        CheckId::Thm2,
        CheckId::LemmaMediant,
        CheckId::Prop1,
        CheckId::Prop2,
        CheckId::Prop3,
        CheckId::Prop4,
        CheckId::Prop5,
        CheckId::Monotonicity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::Thm1 => "thm1",
            CheckId::Thm2 => "thm2",
            CheckId::LemmaMediant => "lemma_mediant",
            CheckId::Prop1 => "prop1",
            CheckId::Prop2 => "prop2",
            CheckId::Prop3 => "prop3",
            CheckId::Prop4 => "prop4",
            CheckId::Prop5 => "prop5",
            CheckId::Monotonicity => "monotonicity",
        }
    }

    pub fn parse(s: &str) -> Option<CheckId> {
        CheckId::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check_id: CheckId,
    pub trials: u64,
    pub failures: u64,
    /// Minimum over trials of `bound − attained`; negative is a violation.
    pub worst_slack: f64,
    /// Inputs and measured values of the worst trial.
    pub witness: Value,
    pub seed: u64,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Combines two records of the same check. On equal slack the witness
    /// of `self` is kept.
    pub fn merge(mut self, other: CheckRecord) -> CheckRecord {
        self.trials += other.trials;
        self.failures += other.failures;
        if other.worst_slack < self.worst_slack {
            self.worst_slack = other.worst_slack;
            self.witness = other.witness;
        }
        self
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub trials: u64,
    pub instances: usize,
    pub seed: u64,
    pub tol: f64,
    /// Per-trial `δ` is uniform on this interval.
    pub delta_range: (f64, f64),
    /// Added to the attained density in the density-based checks. Only for
    /// negative controls; keep at zero otherwise.
    pub fault_bias: f64,
    pub subset_budget: u64,
    pub partition_budget: u64,
    pub exec: Exec,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            instances: 10,
            seed: 42,
            tol: 1e-12,
            delta_range: (0.01, 0.24),
            fault_bias: 0.0,
            subset_budget: DEFAULT_SUBSET_BUDGET,
            partition_budget: crate::search::DEFAULT_PARTITION_BUDGET,
            exec: Exec::default(),
        }
    }
}

impl VerifyConfig {
    fn scan(&self) -> ScanConfig {
        ScanConfig {
            budget: self.subset_budget,
            exec: Exec::Sequential,
        }
    }

    fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }
}

/// Result of one trial.
struct Outcome {
    slack: f64,
    /// An exact condition failed regardless of slack.
    broken: bool,
    witness: Value,
}

fn run_trials<F>(id: CheckId, trials: u64, cfg: &VerifyConfig, trial: F) -> Result<CheckRecord>
where
    F: Fn(u64, &mut StreamRng) -> Result<Outcome> + Sync + Send,
{
    type Acc = Result<(u64, Option<(f64, u64, Value)>)>;
    let tol = cfg.tol;
    let worse = |a: Option<(f64, u64, Value)>, b: Option<(f64, u64, Value)>| match (a, b) {
        (Some(a), Some(b)) => Some(if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    };
    let acc: Acc = fold_indices(
        cfg.exec,
        trials as usize,
        || Ok((0, None)),
        |acc: Acc, i| {
            let (failures, worst) = acc?;
            let i = i as u64;
            let mut r = rng::stream(cfg.seed, i);
            let o = trial(i, &mut r)?;
            let failed = o.broken || o.slack < -tol;
            let mut witness = o.witness;
            witness["trial"] = json!(i);
            Ok((failures + u64::from(failed), worse(worst, Some((o.slack, i, witness)))))
        },
        |a| a,
        |a: Acc, b: Acc| {
            let (fa, wa) = a?;
            let (fb, wb) = b?;
            Ok((fa + fb, worse(wa, wb)))
        },
        Ok((0, None)),
    );
    let (failures, worst) = acc?;
    let (worst_slack, witness) = worst.map_or((f64::INFINITY, Value::Null), |(s, _, w)| (s, w));
    Ok(CheckRecord {
        check_id: id,
        trials,
        failures,
        worst_slack,
        witness,
        seed: cfg.seed,
    })
}

/// Nonempty subset of `0..len` from independent fair bits.
pub fn random_subset(rng: &mut StreamRng, len: usize) -> Vec<usize> {
    loop {
        let s: Vec<usize> = (0..len).filter(|_| rng.gen_bool(0.5)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// Nonempty `S* ⊆ S` with `Vol(S*) >= (1 − δ) Vol(S)`.
///
/// A quarter of the draws keep `S` whole. The rest remove members while the
/// volume condition allows, either greedily from the smallest marginal up or
/// in random order, which reaches both the boundary of the condition and
/// the interior.
pub fn nested_subset(rng: &mut StreamRng, t: &ContingencyTable, set: &[usize], axis: Axis, delta: f64) -> Vec<usize> {
    let full = t.volume_sorted(set, axis);
    let threshold = (1.0 - delta) * full;
    let mode = rng.gen_range(0..8);
    if mode < 2 {
        return set.to_vec();
    }
    let d = t.marginals(axis);
    let mut order = set.to_vec();
    if mode < 5 {
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    } else {
        order.shuffle(rng);
    }
    let mut keep = set.to_vec();
    for i in order {
        if keep.len() == 1 {
            break;
        }
        let trial: Vec<usize> = keep.iter().copied().filter(|&j| j != i).collect();
        if t.volume_sorted(&trial, axis) >= threshold && (mode < 5 || rng.gen_bool(0.75)) {
            keep = trial;
        }
    }
    keep
}

fn draw_delta(rng: &mut StreamRng, cfg: &VerifyConfig) -> f64 {
    let (lo, hi) = cfg.delta_range;
    rng.gen_range(lo..hi)
}

fn check_delta(cfg: &VerifyConfig) -> Result<()> {
    let (lo, hi) = cfg.delta_range;
    if !(lo > 0.0 && lo < hi && hi < 0.25) {
        return Err(Error::SamplingExhausted(format!("delta range ({lo}, {hi}) must lie inside (0, 1/4)")));
    }
    Ok(())
}

fn ensure_binary(g: &ContingencyTable) -> Result<()> {
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let v = g.get(i, j);
            if v != 0.0 && v != 1.0 {
                return Err(Error::NotBinary { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Continuity of the density for 0-1 arrays: `|d(X,Y) − d(X*,Y*)| <= 4δ`,
/// with the intermediate bound `d(X*,Y*) <= d(X,Y) / (1−δ)²`. A density
/// outside `[0, 1]` fails the trial outright.
pub fn check_theorem1(g: &ContingencyTable, trials: u64, cfg: &VerifyConfig) -> Result<CheckRecord> {
    ensure_binary(g)?;
    check_delta(cfg)?;
    run_trials(CheckId::Thm1, trials, cfg, |_, rng| {
        let delta = draw_delta(rng, cfg);
        let x = random_subset(rng, g.rows());
        let y = random_subset(rng, g.cols());
        let xs = nested_subset(rng, g, &x, Axis::Row, delta);
        let ys = nested_subset(rng, g, &y, Axis::Col, delta);
        let d = g.density_sorted(&x, &y);
        let ds = g.density_sorted(&xs, &ys) + cfg.fault_bias;
        let shrink = 1.0 / ((1.0 - delta) * (1.0 - delta));
        let slack = (4.0 * delta - (d - ds).abs()).min(d * shrink - ds);
        Ok(Outcome {
            slack,
            broken: !(0.0..=1.0).contains(&d),
            witness: json!({
                "delta": delta, "x": x, "y": y, "x_star": xs, "y_star": ys,
                "d": d, "d_star": ds, "bound": 4.0 * delta,
            }),
        })
    })
}

/// Continuity of the discrepancy under the tightest dominance constants:
/// `disc(X*,Y*; X,Y) <= 4δ √(c2 c4 / (c1 c3))` and `ρ(X,Y) <= K`.
pub fn check_theorem2(t: &ContingencyTable, trials: u64, cfg: &VerifyConfig) -> Result<CheckRecord> {
    check_delta(cfg)?;
    let t = if (t.total() - 1.0).abs() > 1e-12 { t.normalized() } else { t.clone() };
    let dom = Dominance::measure(&t);
    let (m, n) = (t.rows() as f64, t.cols() as f64);
    let ratio = (dom.c2 * dom.c4 / (dom.c1 * dom.c3)).sqrt();
    run_trials(CheckId::Thm2, trials, cfg, |_, rng| {
        let delta = draw_delta(rng, cfg);
        let x = random_subset(rng, t.rows());
        let y = random_subset(rng, t.cols());
        let xs = nested_subset(rng, &t, &x, Axis::Row, delta);
        let ys = nested_subset(rng, &t, &y, Axis::Col, delta);
        let rho = t.density_sorted(&x, &y);
        let rho_star = t.density_sorted(&xs, &ys) + cfg.fault_bias;
        let vol = t.volume_sorted(&xs, Axis::Row) * t.volume_sorted(&ys, Axis::Col);
        let disc = (rho_star - rho).abs() * vol.sqrt();
        let bound = 4.0 * delta * ratio;
        let k_bound = (m / (dom.c1 * x.len() as f64)).min(n / (dom.c3 * y.len() as f64));
        Ok(Outcome {
            slack: (bound - disc).min(k_bound - rho),
            broken: false,
            witness: json!({
                "delta": delta, "x": x, "y": y, "x_star": xs, "y_star": ys,
                "disc": disc, "bound": bound, "rho": rho, "k_bound": k_bound,
                "dominance": [dom.c1, dom.c2, dom.c3, dom.c4],
            }),
        })
    })
}

/// Mediant sandwich `min u_i/v_i <= Σu / Σv <= max u_i/v_i`, equality for
/// proportional vectors and strictness after perturbing one ratio.
pub fn check_lemma_mediant(trials: u64, n_range: (usize, usize), cfg: &VerifyConfig) -> Result<CheckRecord> {
    let (lo, hi) = n_range;
    if lo < 2 || hi < lo {
        return Err(Error::SamplingExhausted(format!("vector length range ({lo}, {hi}) needs 2 <= lo <= hi")));
    }
    run_trials(CheckId::LemmaMediant, trials, cfg, |_, rng| {
        let n = rng.gen_range(lo..=hi);
        let sandwich = |u: &[f64], v: &[f64]| {
            let ratios: Vec<f64> = u.iter().zip(v).map(|(a, b)| a / b).collect();
            let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let med = u.iter().sum::<f64>() / v.iter().sum::<f64>();
            (min, med, max)
        };
        let positive = |rng: &mut StreamRng| -> f64 { rng.gen_range(-3.0f64..3.0).exp() };
        let u: Vec<f64> = (0..n).map(|_| positive(rng)).collect();
        let v: Vec<f64> = (0..n).map(|_| positive(rng)).collect();
        let (min, med, max) = sandwich(&u, &v);
        let med = med + cfg.fault_bias;

        // Proportional with a power-of-two factor: every ratio and the
        // mediant are exactly the factor.
        let lambda = 2f64.powi(rng.gen_range(-4..=4));
        let base: Vec<f64> = (0..n).map(|_| positive(rng)).collect();
        let prop: Vec<f64> = base.iter().map(|b| lambda * b).collect();
        let (pmin, pmed, pmax) = sandwich(&prop, &base);
        let pmed = pmed + cfg.fault_bias;
        let equal = pmin == pmed && pmed == pmax && pmed == lambda;

        let j = rng.gen_range(0..n);
        let mut bumped = prop.clone();
        bumped[j] *= 1.01;
        let (smin, smed, smax) = sandwich(&bumped, &base);
        let strict = smin < smed && smed < smax;

        Ok(Outcome {
            slack: (med - min).min(max - med),
            broken: !(equal && strict),
            witness: json!({
                "n": n, "u": u, "v": v, "min": min, "mediant": med, "max": max,
                "equality_holds": equal, "strict_after_perturbation": strict,
            }),
        })
    })
}

/// Independent tables: discrepancy zero at random partitions and `disc_1 = 0`.
pub fn check_prop1(instances: usize, partitions_per_instance: usize, cfg: &VerifyConfig) -> Result<CheckRecord> {
    run_trials(CheckId::Prop1, instances as u64, cfg, |_, rng| {
        let m = rng.gen_range(2..=6);
        let n = rng.gen_range(2..=7);
        let d_row = random_marginals(rng, m);
        let d_col = random_marginals(rng, n);
        let t = independent_table(&d_row, &d_col)?;
        let disc1 = partition_discrepancy_with(&t, &Partition::trivial(m, n), &cfg.scan())?.value;
        let mut worst = disc1;
        for _ in 0..partitions_per_instance {
            let k = rng.gen_range(1..=m.min(n));
            let p = random_partition(rng, m, n, k)?;
            worst = worst.max(partition_discrepancy_with(&t, &p, &cfg.scan())?.value);
        }
        Ok(Outcome {
            slack: -worst,
            broken: false,
            witness: json!({ "rows": m, "cols": n, "disc1": disc1, "max_disc": worst }),
        })
    })
}

/// Contracted-independent tables: block densities are one, the discrepancy
/// at the generating partition is at most `disc_1`, and every coarsening by
/// whole-block merges stays contracted independent.
pub fn check_prop2(instances: usize, shape: (usize, usize, usize), cfg: &VerifyConfig) -> Result<CheckRecord> {
    const RESIDUAL_BOUND: f64 = 1e-10;
    let (k, m, n) = shape;
    run_trials(CheckId::Prop2, instances as u64, cfg, |i, _| {
        let (t, p) = contracted_independent_table(k, m, n, child_seed(cfg.seed, i))?;
        let residual = contracted_matrix(&t, &p)?.residual();
        let mut rho_dev: f64 = 0.0;
        for ra in p.row_blocks() {
            for cb in p.col_blocks() {
                rho_dev = rho_dev.max((t.density_sorted(ra, cb) - 1.0).abs());
            }
        }
        let at_p = partition_discrepancy_with(&t, &p, &cfg.scan())?.value;
        let disc1 = partition_discrepancy_with(&t, &Partition::trivial(m, n), &cfg.scan())?.value;
        let mut coarse_residual: f64 = 0.0;
        let mut coarsenings = 0u64;
        for l in 2..k {
            for rl in restricted_growth_strings(k, l) {
                for cl in restricted_growth_strings(k, l) {
                    let q = p.merge_blocks(&rl, &cl)?;
                    coarse_residual = coarse_residual.max(contracted_matrix(&t, &q)?.residual());
                    coarsenings += 1;
                }
            }
        }
        let slack = (RESIDUAL_BOUND - residual)
            .min(-rho_dev)
            .min(disc1 - at_p)
            .min(RESIDUAL_BOUND - coarse_residual);
        Ok(Outcome {
            slack,
            broken: false,
            witness: json!({
                "k": k, "rows": m, "cols": n, "partition": p,
                "residual": residual, "block_density_deviation": rho_dev,
                "disc_at_partition": at_p, "disc1": disc1,
                "coarsenings": coarsenings, "coarsening_residual": coarse_residual,
            }),
        })
    })
}

/// Splits the first largest block with two or more members, moving its last
/// member to a new block. `None` if every block is a singleton.
fn split_largest(blocks: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let target = (0..blocks.len())
        .filter(|&b| blocks[b].len() >= 2)
        .fold(None, |best: Option<usize>, b| match best {
            Some(x) if blocks[x].len() >= blocks[b].len() => Some(x),
            _ => Some(b),
        })?;
    let mut out = blocks.to_vec();
    let last = out[target].pop().expect("block has two members");
    out.push(vec![last]);
    Some(out)
}

/// Blockwise-constant tables: zero discrepancy at the generating partition
/// and along a chain of block subdivisions up to `min(m, n)` blocks.
pub fn check_prop3(instances: usize, cfg: &VerifyConfig) -> Result<CheckRecord> {
    run_trials(CheckId::Prop3, instances as u64, cfg, |i, rng| {
        let k = 2 + (i as usize % 2);
        let m = rng.gen_range(k + 1..=6);
        let n = rng.gen_range(k + 1..=6);
        let spec = GeneratorSpec::Blockwise {
            rows: m,
            cols: n,
            k,
            values: None,
            row_sizes: None,
            col_sizes: None,
        };
        let g = spec.generate(child_seed(cfg.seed, i))?;
        let t = g.table;
        let mut p = g.partition.expect("blockwise tables carry their partition");
        let mut chain = vec![(p.k(), partition_discrepancy_with(&t, &p, &cfg.scan())?.value)];
        while p.k() < m.min(n) {
            let (Some(rows), Some(cols)) = (split_largest(p.row_blocks()), split_largest(p.col_blocks())) else {
                break;
            };
            p = Partition::new(rows, cols, m, n)?;
            match partition_discrepancy_with(&t, &p, &cfg.scan()) {
                Ok(r) => chain.push((p.k(), r.value)),
                Err(Error::BudgetExceeded { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        let worst = chain.iter().map(|c| c.1).fold(0.0, f64::max);
        Ok(Outcome {
            slack: -worst,
            // At least one subdivision must have been checked.
            broken: chain.len() < 2,
            witness: json!({ "k": k, "rows": m, "cols": n, "chain": chain }),
        })
    })
}

/// Betweenness: for a proper partition `X_1..X_k` of `X`,
/// `min ρ(X_i, C) <= ρ(X, C) <= max ρ(X_i, C)`; likewise for columns.
pub fn check_prop4(t: &ContingencyTable, trials: u64, cfg: &VerifyConfig) -> Result<CheckRecord> {
    if t.rows() < 2 || t.cols() < 2 {
        return Err(Error::InvalidK {
            k: 2,
            max: t.rows().min(t.cols()),
        });
    }
    let all_rows: Vec<usize> = (0..t.rows()).collect();
    let all_cols: Vec<usize> = (0..t.cols()).collect();
    run_trials(CheckId::Prop4, trials, cfg, |_, rng| {
        let mut slack = f64::INFINITY;
        let mut witness = json!({});
        for axis in [Axis::Row, Axis::Col] {
            let len = t.len(axis);
            let set = loop {
                let s = random_subset(rng, len);
                if s.len() >= 2 {
                    break s;
                }
            };
            let k = rng.gen_range(2..=set.len());
            let labels = random_partition_labels(rng, set.len(), k);
            let mut parts = vec![Vec::new(); k];
            for (pos, &l) in labels.iter().enumerate() {
                parts[l].push(set[pos]);
            }
            let rho = |s: &[usize]| match axis {
                Axis::Row => t.density_sorted(s, &all_cols),
                Axis::Col => t.density_sorted(&all_rows, s),
            };
            let whole = rho(&set) + cfg.fault_bias;
            let part_rho: Vec<f64> = parts.iter().map(|p| rho(p)).collect();
            let lo = part_rho.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = part_rho.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            slack = slack.min(whole - lo).min(hi - whole);
            witness[axis.to_string()] = json!({ "set": set, "parts": parts, "whole": whole, "parts_density": part_rho });
        }
        Ok(Outcome {
            slack,
            broken: false,
            witness,
        })
    })
}

/// Weighted-average identity on graphs:
/// `d(X ∪ X', Y) = d(X,Y)/(1+v) + v d(X',Y)/(1+v)` with `v = V(X')/V(X)`.
pub fn check_prop5(g: &ContingencyTable, trials: u64, cfg: &VerifyConfig) -> Result<CheckRecord> {
    ensure_binary(g)?;
    if g.rows() != g.cols() || g.rows() < 2 {
        return Err(Error::DegenerateSample("adjacency matrix must be square with at least 2 vertices".into()));
    }
    let nv = g.rows();
    run_trials(CheckId::Prop5, trials, cfg, |_, rng| {
        let (x, xp) = (0..1000)
            .find_map(|_| {
                let labels: Vec<u8> = (0..nv).map(|_| rng.gen_range(0..3)).collect();
                let x: Vec<usize> = (0..nv).filter(|&i| labels[i] == 1).collect();
                let xp: Vec<usize> = (0..nv).filter(|&i| labels[i] == 2).collect();
                (!x.is_empty() && !xp.is_empty()).then_some((x, xp))
            })
            .ok_or_else(|| Error::DegenerateSample("no disjoint nonempty pair".into()))?;
        let y = random_subset(rng, nv);
        let vx = g.volume_sorted(&x, Axis::Row);
        if vx == 0.0 {
            return Err(Error::DegenerateSample("V(X) = 0".into()));
        }
        let v = g.volume_sorted(&xp, Axis::Row) / vx;
        let union = canonical(&[x.clone(), xp.clone()].concat());
        let lhs = g.density_sorted(&union, &y) + cfg.fault_bias;
        let dx = g.density_sorted(&x, &y);
        let dxp = g.density_sorted(&xp, &y);
        let rhs = dx / (1.0 + v) + v * dxp / (1.0 + v);
        let mut slack = -(lhs - rhs).abs();
        if v == 1.0 {
            slack = slack.min(-(lhs - 0.5 * (dx + dxp)).abs());
        }
        Ok(Outcome {
            slack,
            broken: false,
            witness: json!({ "x": x, "x_prime": xp, "y": y, "v": v, "lhs": lhs, "rhs": rhs }),
        })
    })
}

/// Splits `total` trials over `instances` as evenly as possible.
fn share(total: u64, instances: usize, i: usize) -> u64 {
    let n = instances as u64;
    total / n + u64::from((i as u64) < total % n)
}

/// Runs a per-instance check over `cfg.instances` generated inputs and
/// merges the records. Instance `i` uses child seed `i`.
fn over_instances<G, C>(id: CheckId, cfg: &VerifyConfig, make: G, check: C) -> Result<CheckRecord>
where
    G: Fn(u64) -> Result<ContingencyTable>,
    C: Fn(&ContingencyTable, u64, &VerifyConfig) -> Result<CheckRecord>,
{
    let instances = cfg.instances.max(1);
    let mut merged: Option<CheckRecord> = None;
    for i in 0..instances {
        let s = child_seed(cfg.seed, i as u64);
        let t = make(s)?;
        let mut r = check(&t, share(cfg.trials, instances, i), &cfg.with_seed(s))?;
        r.witness = json!({ "instance": i, "instance_seed": s, "trial": r.witness });
        merged = Some(match merged {
            Some(m) => m.merge(r),
            None => r,
        });
    }
    let mut r = merged.expect("at least one instance");
    r.check_id = id;
    r.seed = cfg.seed;
    Ok(r)
}

/// Density continuity over seeded 8×8 connected 0-1 arrays.
pub fn theorem1_suite(cfg: &VerifyConfig) -> Result<CheckRecord> {
    over_instances(CheckId::Thm1, cfg, |s| random_binary_table(8, 8, 0.5, s), check_theorem1)
}

/// Discrepancy continuity over `random_table(6, 6, (0.5, 2, 0.5, 2))` instances.
pub fn theorem2_suite(cfg: &VerifyConfig) -> Result<CheckRecord> {
    let dom = Dominance::new(0.5, 2.0, 0.5, 2.0);
    over_instances(
        CheckId::Thm2,
        cfg,
        |s| random_table(6, 6, dom, s, crate::generators::DEFAULT_MAX_RETRIES),
        check_theorem2,
    )
}

/// Betweenness over random positive 6×6 tables.
pub fn prop4_suite(cfg: &VerifyConfig) -> Result<CheckRecord> {
    let dom = Dominance::new(0.25, 4.0, 0.25, 4.0);
    over_instances(
        CheckId::Prop4,
        cfg,
        |s| random_table(6, 6, dom, s, crate::generators::DEFAULT_MAX_RETRIES),
        check_prop4,
    )
}

/// Weighted-average identity over connected random graphs on 4 to 10 vertices.
pub fn prop5_suite(cfg: &VerifyConfig) -> Result<CheckRecord> {
    over_instances(
        CheckId::Prop5,
        cfg,
        |s| {
            let nv = 4 + (s % 7) as usize;
            random_graph_adjacency(nv, 0.5, s)
        },
        check_prop5,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceTrace {
    pub instance_id: usize,
    pub seed: u64,
    pub entries: Vec<SweepEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub instances: Vec<InstanceTrace>,
    /// Consecutive-k comparisons where both values are exact.
    pub exact_comparisons: u64,
    pub exact_violations: u64,
    /// Comparisons involving at least one refinement value.
    pub heuristic_comparisons: u64,
    pub heuristic_violations: u64,
    pub unavailable: u64,
}

/// Runs the monotonicity sweep on generated instances and tallies increases
/// `disc_{k+1} > disc_k`. Nothing here asserts monotonicity.
pub fn run_monotonicity_campaign(
    spec: &GeneratorSpec,
    instances: usize,
    k_max: usize,
    search: &SearchConfig,
    seed: u64,
) -> Result<CampaignReport> {
    let tables: Vec<(u64, ContingencyTable)> = (0..instances)
        .map(|i| {
            let s = child_seed(seed, i as u64);
            spec.generate(s).map(|g| (s, g.table.normalized()))
        })
        .collect::<Result<_>>()?;
    let inner = SearchConfig {
        exec: Exec::Sequential,
        ..*search
    };
    let sweeps: Vec<Result<Vec<SweepEntry>>> =
        map_indices(search.exec, tables.len(), |i| monotonicity_sweep_with(&tables[i].1, k_max, &inner));
    campaign_from_sweeps(tables.iter().map(|(s, _)| *s).zip(sweeps))
}

/// Campaign over explicitly supplied tables.
pub fn run_monotonicity_campaign_on(tables: &[ContingencyTable], k_max: usize, search: &SearchConfig) -> Result<CampaignReport> {
    let inner = SearchConfig {
        exec: Exec::Sequential,
        ..*search
    };
    let sweeps = map_indices(search.exec, tables.len(), |i| monotonicity_sweep_with(&tables[i], k_max, &inner));
    campaign_from_sweeps(std::iter::repeat(0).zip(sweeps))
}

fn campaign_from_sweeps(sweeps: impl Iterator<Item = (u64, Result<Vec<SweepEntry>>)>) -> Result<CampaignReport> {
    let mut report = CampaignReport {
        instances: Vec::new(),
        exact_comparisons: 0,
        exact_violations: 0,
        heuristic_comparisons: 0,
        heuristic_violations: 0,
        unavailable: 0,
    };
    for (instance_id, (seed, entries)) in sweeps.enumerate() {
        let entries = entries?;
        report.unavailable += entries.iter().filter(|e| e.value.is_none()).count() as u64;
        for w in entries.windows(2) {
            if w[0].value.is_none() || w[1].value.is_none() {
                continue;
            }
            let both_exact = w[0].method == Some(Method::Exact) && w[1].method == Some(Method::Exact);
            if both_exact {
                report.exact_comparisons += 1;
                report.exact_violations += u64::from(w[1].violation);
            } else {
                report.heuristic_comparisons += 1;
                report.heuristic_violations += u64::from(w[1].violation);
            }
        }
        report.instances.push(InstanceTrace {
            instance_id,
            seed,
            entries,
        });
    }
    Ok(report)
}

/// Default ensemble for each check, as used by `verify all`.
pub fn run_check(id: CheckId, cfg: &VerifyConfig) -> Result<CheckRecord> {
    match id {
        CheckId::Thm1 => theorem1_suite(cfg),
        CheckId::Thm2 => theorem2_suite(cfg),
        CheckId::LemmaMediant => check_lemma_mediant(cfg.trials, (2, 10), cfg),
        CheckId::Prop1 => check_prop1(cfg.instances.max(1) * 5, 10, cfg),
        CheckId::Prop2 => {
            let a = check_prop2(cfg.instances.max(1) * 2, (2, 4, 4), cfg)?;
            let b = check_prop2(cfg.instances.max(1), (3, 6, 6), &cfg.with_seed(child_seed(cfg.seed, 1)))?;
            Ok(CheckRecord { seed: cfg.seed, ..a.merge(b) })
        }
        CheckId::Prop3 => check_prop3(cfg.instances.max(1) * 2, cfg),
        CheckId::Prop4 => prop4_suite(cfg),
        CheckId::Prop5 => prop5_suite(cfg),
        CheckId::Monotonicity => {
            let spec = GeneratorSpec::RandomTable {
                rows: 4,
                cols: 4,
                dominance: Dominance::new(0.25, 4.0, 0.25, 4.0),
                max_retries: crate::generators::DEFAULT_MAX_RETRIES,
            };
            let search = SearchConfig {
                partition_budget: cfg.partition_budget,
                subset_budget: cfg.subset_budget,
                exec: cfg.exec,
            };
            let c = run_monotonicity_campaign(&spec, cfg.instances.max(1), 3, &search, cfg.seed)?;
            let worst = c
                .instances
                .iter()
                .flat_map(|inst| inst.entries.windows(2))
                .filter_map(|w| Some(w[0].value? - w[1].value?))
                .fold(f64::INFINITY, f64::min);
            Ok(CheckRecord {
                check_id: CheckId::Monotonicity,
                trials: c.exact_comparisons + c.heuristic_comparisons,
                // Increases are data about a conjecture, not failures.
                failures: 0,
                worst_slack: worst,
                witness: json!({
                    "exact_comparisons": c.exact_comparisons,
                    "exact_violations": c.exact_violations,
                    "heuristic_comparisons": c.heuristic_comparisons,
                    "heuristic_violations": c.heuristic_violations,
                }),
                seed: cfg.seed,
            })
        }
    }
}

/// Value drawn uniformly from `(0, 1)`; exposed for fixtures.
pub fn open01(rng: &mut StreamRng) -> f64 {
    rng.sample(Open01)
}
