use std::path::PathBuf;

use multiway_disc::search::{exact_min_discrepancy_with, refine_chain};
use multiway_disc::verify::{
    check_prop4, check_prop5, check_theorem1, check_theorem2, run_check, run_monotonicity_campaign, CheckId,
    CheckRecord, VerifyConfig,
};
use multiway_disc::{
    is_non_decomposable, partition_discrepancy_with, singular_values, ContingencyTable, Partition, ScanConfig,
    SearchConfig, SearchResult,
};
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::io::{format_f64, load_partition, load_table, matrix_csv, to_json};
use crate::CliError;

/// What a run produced. The caller writes `files`, then prints `stdout`.
#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub files: Vec<(PathBuf, String)>,
    pub stdout: Option<String>,
    pub verification_failed: bool,
}

pub fn execute(cfg: RunConfig) -> Result<Outcome, CliError> {
    let cfg = cfg.resolve()?;
    let mut files = Vec::new();
    let mut verification_failed = false;
    let results = match cfg.command {
        Command::Disc => disc(&cfg)?,
        Command::MinDisc => min_disc(&cfg)?,
        Command::Refine => refine(&cfg)?,
        Command::Svd => svd(&cfg)?,
        Command::Verify => {
            let (results, passed) = verify(&cfg)?;
            verification_failed = !passed;
            results
        }
        Command::Generate => generate(&cfg, &mut files)?,
        Command::Campaign => campaign(&cfg, &mut files)?,
    };
    let report = to_json(&json!({
        "command": cfg.command.as_str(),
        "config": cfg,
        "seed": cfg.seed,
        "results": results,
        "version": env!("CARGO_PKG_VERSION"),
    }));
    // generate and campaign put their data files at --output and the report
    // on stdout; every other command writes the report to --output.
    let stdout = match (&cfg.output, cfg.command) {
        (Some(_), Command::Generate | Command::Campaign) => Some(report.clone()),
        (Some(path), _) => {
            files.push((path.clone(), report.clone()));
            None
        }
        (None, _) => Some(report.clone()),
    };
    Ok(Outcome {
        report,
        files,
        stdout,
        verification_failed,
    })
}

fn table(cfg: &RunConfig) -> Result<ContingencyTable, CliError> {
    let path = cfg.input.as_ref().expect("resolved config has an input");
    load_table(path, cfg.header, cfg.normalize)
}

fn partition_or(cfg: &RunConfig, t: &ContingencyTable) -> Result<Partition, CliError> {
    match &cfg.partition {
        Some(p) => load_partition(p, t.rows(), t.cols()),
        None => Ok(Partition::trivial(t.rows(), t.cols())),
    }
}

fn table_stats(t: &ContingencyTable, normalized: bool) -> Value {
    json!({
        "rows": t.rows(),
        "cols": t.cols(),
        "total": t.total(),
        "scale": t.scale(),
        "normalized": normalized,
    })
}

fn search_cfg(cfg: &RunConfig) -> SearchConfig {
    let d = SearchConfig::default();
    SearchConfig {
        partition_budget: cfg.budget.unwrap_or(d.partition_budget),
        subset_budget: cfg.subset_budget.unwrap_or(d.subset_budget),
        ..d
    }
}

fn search_json(r: &SearchResult) -> Value {
    json!({
        "method": r.method.as_str(),
        "k": r.best_partition.k(),
        "value": r.best_value,
        "partition": r.best_partition.to_spec(),
        "witness": r.witness,
        "partitions_evaluated": r.partitions_evaluated,
        "trace": r.trace.iter().map(|(k, v)| json!({ "k": k, "value": v })).collect::<Vec<_>>(),
    })
}

fn disc(cfg: &RunConfig) -> Result<Value, CliError> {
    let t = table(cfg)?;
    let p = partition_or(cfg, &t)?;
    let scan = ScanConfig {
        budget: cfg.budget.expect("resolved"),
        ..Default::default()
    };
    let r = partition_discrepancy_with(&t, &p, &scan)?;
    Ok(json!({
        "table": table_stats(&t, cfg.normalize),
        "partition": p.to_spec(),
        "value": r.value,
        "witness": r.witness,
        "pairs_scanned": r.pairs_scanned,
    }))
}

fn min_disc(cfg: &RunConfig) -> Result<Value, CliError> {
    let t = table(cfg)?;
    let r = exact_min_discrepancy_with(&t, cfg.k.expect("resolved"), &search_cfg(cfg))?;
    Ok(json!({ "table": table_stats(&t, cfg.normalize), "search": search_json(&r) }))
}

fn refine(cfg: &RunConfig) -> Result<Value, CliError> {
    let t = table(cfg)?;
    let start = partition_or(cfg, &t)?;
    let target = cfg.k.unwrap_or(start.k() + 1);
    let search = SearchConfig {
        subset_budget: cfg.budget.expect("resolved"),
        ..Default::default()
    };
    let r = refine_chain(&t, &start, target, &search)?;
    Ok(json!({
        "table": table_stats(&t, cfg.normalize),
        "start": start.to_spec(),
        "search": search_json(&r),
    }))
}

fn svd(cfg: &RunConfig) -> Result<Value, CliError> {
    let t = table(cfg)?;
    Ok(json!({
        "table": table_stats(&t, cfg.normalize),
        "singular_values": singular_values(&t)?,
        "non_decomposable": is_non_decomposable(&t),
    }))
}

fn parse_checks(names: &[String]) -> Result<Vec<CheckId>, CliError> {
    let mut out = Vec::new();
    for name in names.iter().flat_map(|n| n.split(',')).map(str::trim).filter(|n| !n.is_empty()) {
        if name == "all" {
            out.extend(CheckId::ALL);
            continue;
        }
        let id = CheckId::parse(name).ok_or_else(|| {
            let known: Vec<&str> = CheckId::ALL.iter().map(|c| c.as_str()).collect();
            CliError::Input(format!("unknown check {name:?}; expected all or one of {}", known.join(", ")))
        })?;
        out.push(id);
    }
    let mut seen = Vec::new();
    out.retain(|c| {
        let new = !seen.contains(c);
        seen.push(*c);
        new
    });
    if out.is_empty() {
        return Err(CliError::Input("no checks selected".into()));
    }
    Ok(out)
}

fn verify(cfg: &RunConfig) -> Result<(Value, bool), CliError> {
    let checks = parse_checks(cfg.checks.as_deref().expect("resolved"))?;
    let vcfg = VerifyConfig {
        trials: cfg.trials.expect("resolved"),
        instances: cfg.instances.expect("resolved"),
        seed: cfg.seed.expect("resolved"),
        tol: cfg.tol.expect("resolved"),
        fault_bias: cfg.fault_bias.unwrap_or(0.0),
        subset_budget: cfg.budget.expect("resolved"),
        ..Default::default()
    };
    let input = match &cfg.input {
        Some(p) => Some(load_table(p, cfg.header, cfg.normalize)?),
        None => None,
    };
    let mut records: Vec<CheckRecord> = Vec::new();
    for id in checks {
        // With --input, the table-driven checks run on that table instead
        // of their default ensembles.
        let record = match (&input, id) {
            (Some(t), CheckId::Thm1) => check_theorem1(t, vcfg.trials, &vcfg)?,
            (Some(t), CheckId::Thm2) => check_theorem2(t, vcfg.trials, &vcfg)?,
            (Some(t), CheckId::Prop4) => check_prop4(t, vcfg.trials, &vcfg)?,
            (Some(t), CheckId::Prop5) => check_prop5(t, vcfg.trials, &vcfg)?,
            _ => run_check(id, &vcfg)?,
        };
        records.push(record);
    }
    let passed = records.iter().all(CheckRecord::passed);
    Ok((json!({ "passed": passed, "records": records }), passed))
}

fn generate(cfg: &RunConfig, files: &mut Vec<(PathBuf, String)>) -> Result<Value, CliError> {
    let spec = cfg.generator.as_ref().expect("resolved");
    let g = spec.generate(cfg.seed.expect("resolved"))?;
    let t = if cfg.normalize { g.table.normalized() } else { g.table };
    if let Some(prefix) = &cfg.output {
        files.push((with_suffix(prefix, ".csv"), matrix_csv(&t)));
        if let Some(p) = &g.partition {
            files.push((with_suffix(prefix, ".partition.json"), to_json(&p.to_spec())));
        }
    }
    Ok(json!({
        "generator": spec,
        "table": table_stats(&t, cfg.normalize),
        "entries": t.to_rows(),
        "partition": g.partition.as_ref().map(Partition::to_spec),
    }))
}

fn campaign(cfg: &RunConfig, files: &mut Vec<(PathBuf, String)>) -> Result<Value, CliError> {
    let search = search_cfg(cfg);
    let report = run_monotonicity_campaign(
        cfg.generator.as_ref().expect("resolved"),
        cfg.instances.expect("resolved"),
        cfg.k_max.expect("resolved"),
        &search,
        cfg.seed.expect("resolved"),
    )?;
    if let Some(path) = &cfg.output {
        let mut csv = String::from("instance_id,k,disc,method,violation_flag\n");
        for inst in &report.instances {
            for e in &inst.entries {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    inst.instance_id,
                    e.k,
                    e.value.map(format_f64).unwrap_or_default(),
                    e.method.map(|m| m.as_str()).unwrap_or(""),
                    u8::from(e.violation)
                ));
            }
        }
        files.push((path.clone(), csv));
    }
    Ok(json!({
        "summary": {
            "instances": report.instances.len(),
            "exact_comparisons": report.exact_comparisons,
            "exact_violations": report.exact_violations,
            "heuristic_comparisons": report.heuristic_comparisons,
            "heuristic_violations": report.heuristic_violations,
            "unavailable": report.unavailable,
        },
        "traces": report.instances,
    }))
}

fn with_suffix(prefix: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
