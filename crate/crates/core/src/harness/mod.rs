//! End-to-end orchestration: the per-task pipeline
//! (translate, infer, compile, check) and dataset evaluation with
//! Table-style accuracy reporting.

pub mod planner;

pub use planner::{invoke_planner, PlannerRun};

use crate::equiv::{tasks_equivalent, EquivalenceResult};
use crate::factbase::FactBase;
use crate::ir::{parse_program, Program};
use crate::packs::{load_pack, DomainPack};
use crate::pddl::{compile_task, parse_task, TaskPddl};
use crate::translate::{run_translation, Completer, TranslationStrategy};
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("dataset layout: {path}: {detail}")]
    DatasetLayout { path: String, detail: String },
    #[error(transparent)]
    Pack(#[from] crate::packs::PackError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error("planner timed out after {seconds}s")]
    PlannerTimeout { seconds: f64 },
    #[error("planner exited with status {code}: {stderr}")]
    PlannerNonzeroExit { code: i32, stderr: String },
    #[error("planner command template must contain {{domain}} and {{task}}: `{0}`")]
    BadPlannerTemplate(String),
}

// ---------------------------------------------------------------------
// single-task pipeline

#[derive(Debug, Clone, Default)]
pub struct StageTimings {
    pub translate: Duration,
    pub infer: Duration,
    pub compile: Duration,
    pub check: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.translate + self.infer + self.compile + self.check
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct PipelineResult {
    pub task_id: String,
    pub strategy: String,
    pub ir: Option<Program>,
    pub materialized: Option<FactBase>,
    pub task_pddl: Option<TaskPddl>,
    pub equivalence: Option<EquivalenceResult>,
    pub timings: StageTimings,
    pub error: Option<StageError>,
    /// Validation diagnostics on the intermediate representation.
    pub diagnostics: Vec<String>,
}

impl PipelineResult {
    pub fn correct(&self) -> bool {
        self.equivalence.as_ref().map(|e| e.equivalent).unwrap_or(false)
    }
}

/// Where the intermediate representation comes from: a model call or a
/// pre-written `.lp` file (the golden-IR path).
pub enum TranslationInput<'a> {
    Model {
        strategy: TranslationStrategy,
        completer: &'a dyn Completer,
    },
    IrText {
        label: String,
        text: String,
    },
}

/// Runs the pipeline for one task. Stage failures halt the pipeline and
/// are recorded with the failing stage's label; earlier stage outputs
/// stay in the partial result.
pub fn run_task(
    pack: &DomainPack,
    input: TranslationInput<'_>,
    task_id: &str,
    ground_truth: Option<&TaskPddl>,
    task_description: &str,
) -> PipelineResult {
    let mut result = PipelineResult {
        task_id: task_id.to_string(),
        ..PipelineResult::default()
    };

    // translate
    let started = Instant::now();
    let ir = match input {
        TranslationInput::Model {
            strategy,
            completer,
        } => {
            result.strategy = strategy.as_str().to_string();
            match run_translation(strategy, completer, pack, task_description) {
                Ok(extraction) => {
                    result.timings.translate = started.elapsed();
                    extraction.ir
                }
                Err(e) => {
                    result.timings.translate = started.elapsed();
                    result.error = Some(StageError {
                        stage: format!("translate:{}", e.stage().unwrap_or("?")),
                        message: e.to_string(),
                    });
                    return result;
                }
            }
        }
        TranslationInput::IrText { label, text } => {
            result.strategy = "golden-ir".to_string();
            // parsing a provided file is part of the infer stage
            let parse_started = Instant::now();
            match parse_program(&text, &label) {
                Ok(program) => {
                    result.timings.infer += parse_started.elapsed();
                    program
                }
                Err(e) => {
                    result.timings.infer += parse_started.elapsed();
                    result.error = Some(StageError {
                        stage: "infer:parse".to_string(),
                        message: e.to_string(),
                    });
                    return result;
                }
            }
        }
    };
    for d in pack.validate_ir(&ir) {
        result.diagnostics.push(d.to_string());
    }
    result.ir = Some(ir.clone());

    // infer
    let started = Instant::now();
    let facts = match pack.materialize(&ir) {
        Ok(facts) => {
            result.timings.infer += started.elapsed();
            facts
        }
        Err(e) => {
            result.timings.infer += started.elapsed();
            result.error = Some(StageError {
                stage: "infer".to_string(),
                message: e.to_string(),
            });
            return result;
        }
    };
    result.materialized = Some(facts.clone());

    // compile
    let started = Instant::now();
    let task = match compile_task(&facts, &pack.domain, task_id, &pack.compile_options())
        .and_then(|t| t.validate().map(|()| t))
    {
        Ok(task) => {
            result.timings.compile = started.elapsed();
            task
        }
        Err(e) => {
            result.timings.compile = started.elapsed();
            result.error = Some(StageError {
                stage: "compile".to_string(),
                message: e.to_string(),
            });
            return result;
        }
    };
    result.task_pddl = Some(task.clone());

    // check
    if let Some(reference) = ground_truth {
        let started = Instant::now();
        match tasks_equivalent(&task, reference) {
            Ok(verdict) => {
                result.timings.check = started.elapsed();
                result.equivalence = Some(verdict);
            }
            Err(e) => {
                result.timings.check = started.elapsed();
                result.error = Some(StageError {
                    stage: "check".to_string(),
                    message: e.to_string(),
                });
            }
        }
    }
    result
}

// ---------------------------------------------------------------------
// dataset loading

#[derive(Debug, Clone)]
pub struct DatasetTask {
    pub id: String,
    pub description: String,
    pub ground_truth: TaskPddl,
    pub golden_ir: Option<String>,
}

pub struct DatasetDomain {
    pub name: String,
    pub pack: DomainPack,
    pub tasks: Vec<DatasetTask>,
}

/// Loads `root/<domain>/{pack files, tasks/pNN.nl, tasks/pNN.pddl,
/// tasks/pNN.golden.lp}`. Every task description must have a ground
/// truth beside it.
pub fn load_dataset(root: &Path) -> Result<Vec<DatasetDomain>, HarnessError> {
    let mut domains = Vec::new();
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(root)
        .map_err(|e| HarnessError::DatasetLayout {
            path: root.display().to_string(),
            detail: e.to_string(),
        })?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .filter(|p| p.file_name().map(|n| n != "cassettes").unwrap_or(true))
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(HarnessError::DatasetLayout {
            path: root.display().to_string(),
            detail: "no domain directories found".to_string(),
        });
    }

    for dir in dirs {
        let name = dir
            .file_name()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_default();
        let pack = load_pack(&dir)?;
        let tasks_dir = dir.join("tasks");
        let mut nl_files: Vec<PathBuf> = std::fs::read_dir(&tasks_dir)
            .map_err(|e| HarnessError::DatasetLayout {
                path: tasks_dir.display().to_string(),
                detail: e.to_string(),
            })?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().map(|x| x == "nl").unwrap_or(false))
            .collect();
        nl_files.sort();

        let mut tasks = Vec::new();
        for nl in nl_files {
            let id = nl
                .file_stem()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_default();
            let description =
                std::fs::read_to_string(&nl).map_err(|e| HarnessError::DatasetLayout {
                    path: nl.display().to_string(),
                    detail: e.to_string(),
                })?;
            let gt_path = nl.with_extension("pddl");
            let gt_text =
                std::fs::read_to_string(&gt_path).map_err(|_| HarnessError::DatasetLayout {
                    path: gt_path.display().to_string(),
                    detail: "ground-truth task PDDL is missing".to_string(),
                })?;
            let ground_truth = parse_task(&gt_text).map_err(|e| HarnessError::DatasetLayout {
                path: gt_path.display().to_string(),
                detail: e.to_string(),
            })?;
            let golden_path = nl.with_extension("golden.lp");
            let golden_ir = std::fs::read_to_string(&golden_path).ok();
            tasks.push(DatasetTask {
                id,
                description,
                ground_truth,
                golden_ir,
            });
        }
        if tasks.is_empty() {
            return Err(HarnessError::DatasetLayout {
                path: tasks_dir.display().to_string(),
                detail: "no task descriptions found".to_string(),
            });
        }
        domains.push(DatasetDomain { name, pack, tasks });
    }
    Ok(domains)
}

// ---------------------------------------------------------------------
// evaluation

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub strategies: Vec<TranslationStrategy>,
    pub runs: usize,
    pub jobs: usize,
    /// Use `tasks/pNN.golden.lp` instead of calling the model.
    pub golden_ir: bool,
    pub mode_label: String,
    pub model_label: String,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            strategies: vec![TranslationStrategy::Ic],
            runs: 1,
            jobs: 1,
            golden_ir: false,
            mode_label: "replay".to_string(),
            model_label: "gpt-4".to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StrategyReport {
    pub name: String,
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DomainReport {
    pub name: String,
    pub strategies: Vec<StrategyReport>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TaskFailure {
    pub domain: String,
    pub task: String,
    pub strategy: String,
    pub run: usize,
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReportMeta {
    pub provider_model: String,
    pub mode: String,
    pub runs: usize,
    pub golden_ir: bool,
    pub timestamp: u64,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EvalReport {
    pub domains: Vec<DomainReport>,
    pub failures: Vec<TaskFailure>,
    pub meta: ReportMeta,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Accuracy table, one row per domain, one column per strategy.
    pub fn render_table(&self) -> String {
        let mut strategies: Vec<String> = Vec::new();
        for d in &self.domains {
            for s in &d.strategies {
                if !strategies.contains(&s.name) {
                    strategies.push(s.name.clone());
                }
            }
        }
        let mut out = format!("{:<14}", "Domain");
        for s in &strategies {
            out.push_str(&format!("{s:>10}"));
        }
        out.push('\n');
        for d in &self.domains {
            out.push_str(&format!("{:<14}", d.name));
            for s in &strategies {
                match d.strategies.iter().find(|x| &x.name == s) {
                    Some(sr) => out.push_str(&format!("{:>10.2}", sr.accuracy)),
                    None => out.push_str(&format!("{:>10}", "-")),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn any_stage_error(&self) -> bool {
        !self.failures.is_empty()
    }
}

/// Evaluates every domain, task, strategy and run in the dataset.
/// Accuracy counts checker-equivalent outputs only; stage errors score
/// as incorrect and are listed under `failures`.
pub fn evaluate_dataset(
    domains: &[DatasetDomain],
    config: &EvalConfig,
    completer: &dyn Completer,
) -> Result<EvalReport, HarnessError> {
    let started = Instant::now();

    if config.golden_ir {
        for domain in domains {
            for task in &domain.tasks {
                if task.golden_ir.is_none() {
                    return Err(HarnessError::DatasetLayout {
                        path: format!("{}/tasks/{}.golden.lp", domain.name, task.id),
                        detail: "golden-IR mode requires a golden intermediate representation"
                            .to_string(),
                    });
                }
            }
        }
    }

    // golden-IR mode bypasses translation; one pseudo-strategy suffices
    let strategies: Vec<TranslationStrategy> = if config.golden_ir {
        vec![config
            .strategies
            .first()
            .copied()
            .unwrap_or(TranslationStrategy::Ic)]
    } else {
        config.strategies.clone()
    };

    struct WorkItem<'a> {
        domain_idx: usize,
        domain: &'a DatasetDomain,
        task: &'a DatasetTask,
        strategy: TranslationStrategy,
        run: usize,
    }
    let mut items = Vec::new();
    for (domain_idx, domain) in domains.iter().enumerate() {
        for strategy in &strategies {
            for task in &domain.tasks {
                for run in 1..=config.runs.max(1) {
                    items.push(WorkItem {
                        domain_idx,
                        domain,
                        task,
                        strategy: *strategy,
                        run,
                    });
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .expect("thread pool");
    let outcomes: Vec<(usize, TranslationStrategy, String, usize, PipelineResult)> =
        pool.install(|| {
            items
                .par_iter()
                .map(|item| {
                    let input = if config.golden_ir {
                        TranslationInput::IrText {
                            label: format!("{}.golden.lp", item.task.id),
                            text: item.task.golden_ir.clone().expect("checked above"),
                        }
                    } else {
                        TranslationInput::Model {
                            strategy: item.strategy,
                            completer,
                        }
                    };
                    let result = run_task(
                        &item.domain.pack,
                        input,
                        &item.task.id,
                        Some(&item.task.ground_truth),
                        &item.task.description,
                    );
                    (
                        item.domain_idx,
                        item.strategy,
                        item.task.id.clone(),
                        item.run,
                        result,
                    )
                })
                .collect()
        });

    let mut report_domains: Vec<DomainReport> = domains
        .iter()
        .map(|d| DomainReport {
            name: d.name.clone(),
            strategies: strategies
                .iter()
                .map(|s| StrategyReport {
                    name: strategy_label(config, *s),
                    total: 0,
                    correct: 0,
                    accuracy: 0.0,
                })
                .collect(),
        })
        .collect();
    let mut failures = Vec::new();
    for (domain_idx, strategy, task_id, run, result) in &outcomes {
        let strategy_name = strategy_label(config, *strategy);
        let entry = report_domains[*domain_idx]
            .strategies
            .iter_mut()
            .find(|s| s.name == strategy_name)
            .expect("strategy registered");
        entry.total += 1;
        if result.correct() {
            entry.correct += 1;
        }
        if let Some(err) = &result.error {
            failures.push(TaskFailure {
                domain: domains[*domain_idx].name.clone(),
                task: task_id.clone(),
                strategy: strategy_name,
                run: *run,
                stage: err.stage.clone(),
                message: err.message.clone(),
            });
        }
    }
    for d in &mut report_domains {
        for s in &mut d.strategies {
            s.accuracy = if s.total == 0 {
                0.0
            } else {
                100.0 * s.correct as f64 / s.total as f64
            };
        }
    }
    failures.sort_by(|a, b| {
        (&a.domain, &a.task, &a.strategy, a.run).cmp(&(&b.domain, &b.task, &b.strategy, b.run))
    });

    Ok(EvalReport {
        domains: report_domains,
        failures,
        meta: ReportMeta {
            provider_model: config.model_label.clone(),
            mode: config.mode_label.clone(),
            runs: config.runs.max(1),
            golden_ir: config.golden_ir,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            elapsed_ms: started.elapsed().as_millis(),
        },
    })
}

fn strategy_label(config: &EvalConfig, strategy: TranslationStrategy) -> String {
    if config.golden_ir {
        "golden-ir".to_string()
    } else {
        strategy.as_str().to_string()
    }
}
