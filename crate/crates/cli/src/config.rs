use std::fs;
use std::path::{Path, PathBuf};

use multiway_disc::generators::{Dominance, GeneratorSpec, DEFAULT_MAX_RETRIES};
use multiway_disc::search::DEFAULT_PARTITION_BUDGET;
use multiway_disc::discrepancy::DEFAULT_SUBSET_BUDGET;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Disc,
    MinDisc,
    Refine,
    Verify,
    Generate,
    Campaign,
    Svd,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Disc => "disc",
            Command::MinDisc => "min-disc",
            Command::Refine => "refine",
            Command::Verify => "verify",
            Command::Generate => "generate",
            Command::Campaign => "campaign",
            Command::Svd => "svd",
        }
    }
}

/// Everything a run depends on. The resolved form, with defaults filled in,
/// is embedded in every report and can be fed back through `run --config`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    /// Main work budget: subsets for `disc`, `refine` and `verify`;
    /// partitions for `min-disc` and `campaign`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    /// Subset budget of each scan inside a partition search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default)]
    pub header: bool,
    #[serde(default)]
    pub normalize: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault_bias: Option<f64>,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input: None,
            partition: None,
            k: None,
            k_max: None,
            budget: None,
            subset_budget: None,
            trials: None,
            instances: None,
            seed: None,
            tol: None,
            header: false,
            normalize: false,
            checks: None,
            generator: None,
            fault_bias: None,
            output: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn require<T: Clone>(&self, v: &Option<T>, name: &str) -> Result<T, CliError> {
        v.clone()
            .ok_or_else(|| CliError::Input(format!("{} requires {name}", self.command.as_str())))
    }

    /// Checks required fields and fills every default the command uses.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        use Command::*;
        let c = self.command;
        if matches!(c, Disc | MinDisc | Refine | Svd) {
            self.require(&self.input, "--input")?;
        }
        if matches!(c, Disc | Refine | Verify) {
            self.budget.get_or_insert(DEFAULT_SUBSET_BUDGET);
        }
        if matches!(c, MinDisc | Campaign) {
            self.budget.get_or_insert(DEFAULT_PARTITION_BUDGET);
            self.subset_budget.get_or_insert(DEFAULT_SUBSET_BUDGET);
        }
        if matches!(c, Verify | Generate | Campaign) {
            self.seed.get_or_insert(DEFAULT_SEED);
        }
        match c {
            MinDisc => {
                self.require(&self.k, "--k")?;
            }
            Verify => {
                self.trials.get_or_insert(1000);
                self.instances.get_or_insert(10);
                self.tol.get_or_insert(1e-12);
                self.checks.get_or_insert_with(|| vec!["all".into()]);
            }
            Generate => {
                self.require(&self.generator, "a generator (--kind or --generator)")?;
            }
            Campaign => {
                self.instances.get_or_insert(30);
                self.k_max.get_or_insert(3);
                self.generator.get_or_insert(GeneratorSpec::RandomTable {
                    rows: 5,
                    cols: 5,
                    dominance: Dominance::new(0.5, 2.0, 0.5, 2.0),
                    max_retries: DEFAULT_MAX_RETRIES,
                });
            }
            _ => {}
        }
        Ok(self)
    }
}

/// Generator options given as individual flags.
#[derive(Clone, Debug, Default)]
pub struct GeneratorFlags {
    pub kind: Option<String>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub k: Option<usize>,
    pub edge_prob: Option<f64>,
    pub fill_prob: Option<f64>,
}

impl GeneratorFlags {
    pub fn build(&self) -> Result<Option<GeneratorSpec>, CliError> {
        let Some(kind) = self.kind.as_deref() else {
            return Ok(None);
        };
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| CliError::Input(format!("generator kind {kind} requires --{name}")))
        };
        let spec = match kind {
            "independent" => GeneratorSpec::Independent {
                rows: need(self.rows, "rows")?,
                cols: need(self.cols, "cols")?,
                row_marginals: None,
                col_marginals: None,
            },
            "blockwise" => GeneratorSpec::Blockwise {
                rows: need(self.rows, "rows")?,
                cols: need(self.cols, "cols")?,
                k: self.k.unwrap_or(2),
                values: None,
                row_sizes: None,
                col_sizes: None,
            },
            "contracted" => GeneratorSpec::Contracted {
                rows: need(self.rows, "rows")?,
                cols: need(self.cols, "cols")?,
                k: self.k.unwrap_or(2),
            },
            "random_table" => GeneratorSpec::RandomTable {
                rows: need(self.rows, "rows")?,
                cols: need(self.cols, "cols")?,
                dominance: Dominance::new(0.5, 2.0, 0.5, 2.0),
                max_retries: DEFAULT_MAX_RETRIES,
            },
            "random_graph" => GeneratorSpec::RandomGraph {
                vertices: need(self.rows, "rows")?,
                edge_prob: self.edge_prob.unwrap_or(0.5),
            },
            "random_binary" => GeneratorSpec::RandomBinary {
                rows: need(self.rows, "rows")?,
                cols: need(self.cols, "cols")?,
                fill_prob: self.fill_prob.unwrap_or(0.5),
            },
            other => {
                return Err(CliError::Input(format!(
                    "unknown generator kind {other:?}; expected independent, blockwise, contracted, \
                     random_table, random_graph or random_binary"
                )))
            }
        };
        Ok(Some(spec))
    }
}

pub fn load_generator(path: &Path) -> Result<GeneratorSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
