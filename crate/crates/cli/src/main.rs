//! `tic` — translate natural-language planning tasks into task PDDL,
//! evaluate datasets against ground truth, and compare task PDDLs.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;
use tic_core::equiv::{brute_force_equivalent, tasks_equivalent};
use tic_core::harness::{
    evaluate_dataset, invoke_planner, load_dataset, run_task, EvalConfig, PipelineResult,
    TranslationInput,
};
use tic_core::ir::parse_program;
use tic_core::packs::{builtin_pack, load_pack, DomainPack, BUILTIN_PACK_NAMES};
use tic_core::pddl::{parse_domain, parse_task, serialize_task};
use tic_core::translate::{
    CompletionProvider, ProviderMode, ProviderProfile, TranslationStrategy,
};
use tic_core::{serialize_program, FactBase, Provenance};

#[derive(Parser)]
#[command(name = "tic", version, about = "Translate, infer and compile planning tasks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct PackArgs {
    /// Name of a built-in domain pack (barman, blocksworld, floortile,
    /// grippers, storage, termes, tyreworld)
    #[arg(long = "domain-pack")]
    domain_pack: Option<String>,
    /// Directory containing rules.lp, meta.json, domain.pddl, ...
    #[arg(long = "pack-dir")]
    pack_dir: Option<PathBuf>,
}

impl PackArgs {
    fn load(&self) -> Result<DomainPack> {
        match (&self.domain_pack, &self.pack_dir) {
            (Some(name), None) => Ok(builtin_pack(name)?),
            (None, Some(dir)) => Ok(load_pack(dir)?),
            _ => bail!(
                "pass exactly one of --domain-pack (one of: {}) or --pack-dir",
                BUILTIN_PACK_NAMES.join(", ")
            ),
        }
    }
}

#[derive(Args, Clone)]
struct ProviderArgs {
    /// live, replay or record
    #[arg(long, default_value = "replay")]
    mode: String,
    /// Cassette directory for replay/record
    #[arg(long)]
    cassettes: Option<PathBuf>,
    /// Profile name from the config file's [provider.NAME] tables
    #[arg(long = "provider-profile")]
    provider_profile: Option<String>,
    /// TOML config file with provider profiles and defaults
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ProviderArgs {
    fn provider(&self, default_cassettes: Option<&Path>) -> Result<CompletionProvider> {
        let profile = self.profile()?;
        let mode = ProviderMode::parse(&self.mode)
            .ok_or_else(|| anyhow!("--mode must be live, replay or record"))?;
        let cassette_dir = self
            .cassettes
            .clone()
            .or_else(|| default_cassettes.map(Path::to_path_buf));
        Ok(match mode {
            ProviderMode::Live => CompletionProvider::live(profile),
            ProviderMode::Replay => {
                let dir = cassette_dir
                    .ok_or_else(|| anyhow!("replay mode needs --cassettes DIR"))?;
                CompletionProvider::replay(profile, &dir)
            }
            ProviderMode::Record => {
                let dir = cassette_dir
                    .ok_or_else(|| anyhow!("record mode needs --cassettes DIR"))?;
                CompletionProvider::record(profile, &dir)
            }
        })
    }

    fn profile(&self) -> Result<ProviderProfile> {
        let Some(config_path) = &self.config else {
            return Ok(ProviderProfile::default());
        };
        let text = std::fs::read_to_string(config_path)
            .with_context(|| format!("reading {}", config_path.display()))?;
        let table: toml::Table = text.parse().context("parsing config file")?;
        let name = self.provider_profile.as_deref().unwrap_or("default");
        let Some(section) = table.get("provider").and_then(|p| p.get(name)).cloned() else {
            if self.provider_profile.is_none() {
                return Ok(ProviderProfile::default());
            }
            bail!("config has no [provider.{name}] table");
        };
        let profile: ProviderProfile = section
            .try_into()
            .context("invalid provider profile fields")?;
        Ok(profile)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Translate a task description into the logic-program representation
    Translate {
        #[command(flatten)]
        pack: PackArgs,
        /// Task description file
        #[arg(long)]
        task: PathBuf,
        /// ic, g1 or g3
        #[arg(long, default_value = "ic")]
        strategy: String,
        #[command(flatten)]
        provider: ProviderArgs,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Materialize a logic program into the full fact base
    Infer {
        #[command(flatten)]
        pack: PackArgs,
        /// Logic-program file to materialize
        #[arg(long = "from-ir")]
        from_ir: PathBuf,
        /// Tag each fact with its provenance
        #[arg(long)]
        provenance: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Materialize and compile a logic program into task PDDL
    Compile {
        #[command(flatten)]
        pack: PackArgs,
        #[arg(long = "from-ir")]
        from_ir: PathBuf,
        /// Problem name for the generated task
        #[arg(long = "problem-name", default_value = "prob")]
        problem_name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline for one task
    Run {
        #[command(flatten)]
        pack: PackArgs,
        /// Task description file
        #[arg(long)]
        task: Option<PathBuf>,
        /// Skip translation and start from this logic program
        #[arg(long = "from-ir")]
        from_ir: Option<PathBuf>,
        #[arg(long, default_value = "ic")]
        strategy: String,
        #[command(flatten)]
        provider: ProviderArgs,
        /// Ground-truth task PDDL to grade against
        #[arg(long = "ground-truth")]
        ground_truth: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Planner command template with {domain} and {task} placeholders
        #[arg(long = "planner-cmd")]
        planner_cmd: Option<String>,
        /// Planner timeout in seconds
        #[arg(long = "planner-timeout", default_value_t = 60.0)]
        planner_timeout: f64,
    },
    /// Evaluate a dataset and report per-domain accuracy
    Eval {
        /// Dataset root: <domain>/{domain.pddl, meta.json, tasks/...}
        #[arg(long)]
        dataset: PathBuf,
        /// Comma-separated strategies (ic, g1, g3)
        #[arg(long, default_value = "ic")]
        strategy: String,
        #[command(flatten)]
        provider: ProviderArgs,
        /// Use tasks/pNN.golden.lp instead of calling the model
        #[arg(long = "golden-ir")]
        golden_ir: bool,
        /// Repeated runs per task
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Parallel worker count
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
        /// Write the JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether two task PDDLs are equivalent up to renaming
    Diff {
        a: PathBuf,
        b: PathBuf,
        /// Domain file both tasks are validated against
        #[arg(long)]
        domain: PathBuf,
        /// Also run the brute-force oracle and require agreement
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Validate a domain pack and its golden example
    PackCheck {
        #[command(flatten)]
        pack: PackArgs,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Translate {
            pack,
            task,
            strategy,
            provider,
            out,
        } => {
            let pack = pack.load()?;
            let strategy = parse_strategy(&strategy)?;
            let provider = provider.provider(None)?;
            let description = std::fs::read_to_string(&task)
                .with_context(|| format!("reading {}", task.display()))?;
            let extraction =
                tic_core::translate::run_translation(strategy, &provider, &pack, &description)?;
            emit(out.as_deref(), &serialize_program(&extraction.ir))?;
            Ok(0)
        }
        Command::Infer {
            pack,
            from_ir,
            provenance,
            out,
        } => {
            let pack = pack.load()?;
            let ir = read_ir(&from_ir)?;
            for d in pack.validate_ir(&ir) {
                eprintln!("warning: {d}");
            }
            let facts = pack.materialize(&ir)?;
            emit(out.as_deref(), &render_facts(&facts, provenance))?;
            Ok(0)
        }
        Command::Compile {
            pack,
            from_ir,
            problem_name,
            out,
        } => {
            let pack = pack.load()?;
            let ir = read_ir(&from_ir)?;
            let task = pack.compile(&ir, &problem_name)?;
            emit(out.as_deref(), &serialize_task(&task))?;
            Ok(0)
        }
        Command::Run {
            pack,
            task,
            from_ir,
            strategy,
            provider,
            ground_truth,
            out,
            json,
            planner_cmd,
            planner_timeout,
        } => {
            let pack = pack.load()?;
            let reference = match &ground_truth {
                Some(path) => Some(parse_task(
                    &std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?,
                )?),
                None => None,
            };
            let description = match &task {
                Some(path) => std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?,
                None => String::new(),
            };
            let provider_impl;
            let input = match &from_ir {
                Some(path) => TranslationInput::IrText {
                    label: path.display().to_string(),
                    text: std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?,
                },
                None => {
                    if task.is_none() {
                        bail!("run needs --task (or --from-ir)");
                    }
                    provider_impl = provider.provider(None)?;
                    TranslationInput::Model {
                        strategy: parse_strategy(&strategy)?,
                        completer: &provider_impl,
                    }
                }
            };
            let result = run_task(&pack, input, "prob", reference.as_ref(), &description);
            report_run(&result, json);
            if let (Some(task_pddl), Some(out_path)) = (&result.task_pddl, &out) {
                std::fs::write(out_path, serialize_task(task_pddl))
                    .with_context(|| format!("writing {}", out_path.display()))?;
            }
            if let (Some(cmd), Some(task_pddl)) = (&planner_cmd, &result.task_pddl) {
                run_planner(cmd, &pack, task_pddl, planner_timeout)?;
            }
            Ok(if result.error.is_some() { 1 } else { 0 })
        }
        Command::Eval {
            dataset,
            strategy,
            provider,
            golden_ir,
            runs,
            jobs,
            json,
            out,
        } => {
            let strategies = strategy
                .split(',')
                .map(|s| parse_strategy(s.trim()))
                .collect::<Result<Vec<_>>>()?;
            let default_cassettes = dataset.join("cassettes");
            let provider_impl = provider.provider(Some(&default_cassettes))?;
            let domains = load_dataset(&dataset)?;
            let config = EvalConfig {
                strategies,
                runs,
                jobs,
                golden_ir,
                mode_label: provider.mode.clone(),
                model_label: provider_impl.profile.model.clone(),
            };
            let report = evaluate_dataset(&domains, &config, &provider_impl)?;
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render_table());
                for f in &report.failures {
                    eprintln!(
                        "failure: {}/{} [{} run {}] at {}: {}",
                        f.domain, f.task, f.strategy, f.run, f.stage, f.message
                    );
                }
            }
            if let Some(path) = out {
                std::fs::write(&path, report.to_json())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(if report.any_stage_error() { 1 } else { 0 })
        }
        Command::Diff {
            a,
            b,
            domain,
            oracle,
            json,
        } => diff(&a, &b, &domain, oracle, json),
        Command::PackCheck { pack } => {
            let pack = pack.load()?;
            let mut ok = true;
            if let (Some(example), Some(golden)) = (&pack.in_context_example, &pack.golden_pddl) {
                let ir = parse_program(&example.ir_text, "example.lp")?;
                let compiled = pack.compile(&ir, "example")?;
                let reference = parse_task(golden)?;
                let verdict = tasks_equivalent(&compiled, &reference)?;
                if verdict.equivalent {
                    println!("pack {}: example compiles to the golden task", pack.name);
                } else {
                    println!(
                        "pack {}: example does NOT match golden ({})",
                        pack.name,
                        verdict.reason.map(|r| r.as_str()).unwrap_or("?")
                    );
                    ok = false;
                }
            } else {
                println!(
                    "pack {}: loaded ({} rules), no example/golden to check",
                    pack.name,
                    pack.rules.rules.len()
                );
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn parse_strategy(s: &str) -> Result<TranslationStrategy> {
    TranslationStrategy::parse(s)
        .ok_or_else(|| anyhow!("unknown strategy `{s}` (expected ic, g1 or g3)"))
}

fn read_ir(path: &Path) -> Result<tic_core::Program> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_program(&text, &path.display().to_string())?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn render_facts(facts: &FactBase, with_provenance: bool) -> String {
    let mut lines = Vec::new();
    for (atom, prov) in facts.atoms_with_provenance() {
        if with_provenance {
            let tag = match prov {
                Provenance::Stated => "stated",
                Provenance::Inferred => "inferred",
                Provenance::Generated => "generated",
            };
            lines.push(format!("{atom}. % {tag}"));
        } else {
            lines.push(format!("{atom}."));
        }
    }
    lines.sort();
    lines.join("\n") + "\n"
}

fn report_run(result: &PipelineResult, json: bool) {
    if json {
        let t = &result.timings;
        let value = serde_json::json!({
            "task": result.task_id,
            "strategy": result.strategy,
            "error": result.error.as_ref().map(|e| {
                serde_json::json!({"stage": e.stage, "message": e.message})
            }),
            "equivalent": result.equivalence.as_ref().map(|e| e.equivalent),
            "reason": result
                .equivalence
                .as_ref()
                .and_then(|e| e.reason.map(|r| r.as_str())),
            "diagnostics": result.diagnostics,
            "timings_ms": {
                "translate": t.translate.as_secs_f64() * 1e3,
                "infer": t.infer.as_secs_f64() * 1e3,
                "compile": t.compile.as_secs_f64() * 1e3,
                "check": t.check.as_secs_f64() * 1e3,
            },
        });
        println!("{}", serde_json::to_string_pretty(&value).unwrap());
        return;
    }
    for d in &result.diagnostics {
        eprintln!("warning: {d}");
    }
    match &result.error {
        Some(e) => eprintln!("failed at {}: {}", e.stage, e.message),
        None => {
            let t = &result.timings;
            eprintln!(
                "ok: translate {:.1} ms, infer {:.1} ms, compile {:.1} ms, check {:.1} ms",
                t.translate.as_secs_f64() * 1e3,
                t.infer.as_secs_f64() * 1e3,
                t.compile.as_secs_f64() * 1e3,
                t.check.as_secs_f64() * 1e3,
            );
            if let Some(v) = &result.equivalence {
                match (v.equivalent, v.reason) {
                    (true, _) => eprintln!("verdict: equivalent to ground truth"),
                    (false, Some(r)) => eprintln!("verdict: not equivalent ({})", r.as_str()),
                    (false, None) => eprintln!("verdict: not equivalent"),
                }
            }
        }
    }
}

fn run_planner(
    template: &str,
    pack: &DomainPack,
    task: &tic_core::TaskPddl,
    timeout_s: f64,
) -> Result<()> {
    // the planner needs real files; stage them in a temp dir
    let dir = std::env::temp_dir().join(format!("tic-plan-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let domain_file = dir.join("domain.pddl");
    let task_file = dir.join("task.pddl");
    let domain_text = pack_domain_text(pack)?;
    std::fs::write(&domain_file, domain_text)?;
    std::fs::write(&task_file, serialize_task(task))?;
    let run = invoke_planner(
        template,
        &domain_file,
        &task_file,
        Duration::from_secs_f64(timeout_s),
    )?;
    eprintln!(
        "planner finished in {:.2}s with {} plan steps",
        run.duration.as_secs_f64(),
        run.actions.len()
    );
    print!("{}", run.plan_text);
    Ok(())
}

fn pack_domain_text(pack: &DomainPack) -> Result<&'static str> {
    match pack.name.as_str() {
        "barman" => Ok(include_str!("../../core/packs/barman/domain.pddl")),
        "blocksworld" => Ok(include_str!("../../core/packs/blocksworld/domain.pddl")),
        "floortile" => Ok(include_str!("../../core/packs/floortile/domain.pddl")),
        "grippers" => Ok(include_str!("../../core/packs/grippers/domain.pddl")),
        "storage" => Ok(include_str!("../../core/packs/storage/domain.pddl")),
        "termes" => Ok(include_str!("../../core/packs/termes/domain.pddl")),
        "tyreworld" => Ok(include_str!("../../core/packs/tyreworld/domain.pddl")),
        _ => bail!("--planner-cmd with a directory pack: point the template at your own domain file"),
    }
}

fn diff(a: &Path, b: &Path, domain: &Path, oracle: bool, json: bool) -> Result<i32> {
    let domain_model = parse_domain(
        &std::fs::read_to_string(domain)
            .with_context(|| format!("reading {}", domain.display()))?,
    )?;
    let task_a = parse_task(
        &std::fs::read_to_string(a).with_context(|| format!("reading {}", a.display()))?,
    )?;
    let task_b = parse_task(
        &std::fs::read_to_string(b).with_context(|| format!("reading {}", b.display()))?,
    )?;
    for (path, task) in [(a, &task_a), (b, &task_b)] {
        for atom in task.init.iter().chain(task.goal.iter()) {
            if atom.is_cost_literal() {
                continue;
            }
            if domain_model.predicate(&atom.predicate).is_none() {
                bail!(
                    "{}: predicate `{}` is not declared in {}",
                    path.display(),
                    atom.predicate,
                    domain.display()
                );
            }
        }
    }

    let verdict = tasks_equivalent(&task_a, &task_b)?;
    let oracle_verdict = if oracle {
        let answer = brute_force_equivalent(&task_a, &task_b)?;
        if answer != verdict.equivalent {
            bail!(
                "oracle disagreement: search says {}, brute force says {answer}",
                verdict.equivalent
            );
        }
        Some(answer)
    } else {
        None
    };

    if json {
        let witness: Option<BTreeMap<String, BTreeMap<String, String>>> = verdict
            .witness
            .as_ref()
            .map(|w| w.by_type.clone().into_iter().collect());
        let value = serde_json::json!({
            "equivalent": verdict.equivalent,
            "reason": verdict.reason.map(|r| r.as_str()),
            "witness": witness,
            "oracle": oracle_verdict,
        });
        println!("{}", serde_json::to_string_pretty(&value).unwrap());
    } else if verdict.equivalent {
        println!("equivalent");
    } else {
        println!(
            "not equivalent ({})",
            verdict.reason.map(|r| r.as_str()).unwrap_or("?")
        );
    }
    Ok(if verdict.equivalent { 0 } else { 1 })
}
