//! External classical planner invocation over a command template.

use super::HarnessError;
use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannerRun {
    pub plan_text: String,
    /// Lines of the output that look like plan steps.
    pub actions: Vec<String>,
    pub exit_code: i32,
    pub duration: Duration,
}

/// Runs `command_template` with `{domain}` and `{task}` substituted,
/// capturing stdout. The template must contain both placeholders.
pub fn invoke_planner(
    command_template: &str,
    domain_file: &Path,
    task_file: &Path,
    timeout: Duration,
) -> Result<PlannerRun, HarnessError> {
    if !command_template.contains("{domain}") || !command_template.contains("{task}") {
        return Err(HarnessError::BadPlannerTemplate(
            command_template.to_string(),
        ));
    }
    let rendered = command_template
        .replace("{domain}", &domain_file.display().to_string())
        .replace("{task}", &task_file.display().to_string());
    let mut parts = rendered.split_whitespace();
    let program = parts
        .next()
        .ok_or_else(|| HarnessError::BadPlannerTemplate(rendered.clone()))?;
    let args: Vec<&str> = parts.collect();

    let start = Instant::now();
    let mut child = Command::new(program)
        .args(&args)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| HarnessError::Io {
            context: format!("spawning `{program}`"),
            source: e,
        })?;

    // drain pipes on side threads so a chatty planner cannot block
    let mut stdout_pipe = child.stdout.take().expect("stdout piped");
    let stdout_thread = std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = stdout_pipe.read_to_string(&mut buf);
        buf
    });
    let mut stderr_pipe = child.stderr.take().expect("stderr piped");
    let stderr_thread = std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = stderr_pipe.read_to_string(&mut buf);
        buf
    });

    let deadline = start + timeout;
    let status = loop {
        match child.try_wait().map_err(|e| HarnessError::Io {
            context: "waiting for the planner".to_string(),
            source: e,
        })? {
            Some(status) => break status,
            None if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(HarnessError::PlannerTimeout {
                    seconds: timeout.as_secs_f64(),
                });
            }
            None => std::thread::sleep(Duration::from_millis(5)),
        }
    };
    let duration = start.elapsed();
    let plan_text = stdout_thread.join().unwrap_or_default();
    let stderr_text = stderr_thread.join().unwrap_or_default();

    let exit_code = status.code().unwrap_or(-1);
    if exit_code != 0 {
        return Err(HarnessError::PlannerNonzeroExit {
            code: exit_code,
            stderr: stderr_text,
        });
    }
    let actions = plan_text
        .lines()
        .map(str::trim)
        .filter(|l| l.starts_with('(') && l.ends_with(')'))
        .map(|l| l.to_string())
        .collect();
    Ok(PlannerRun {
        plan_text,
        actions,
        exit_code,
        duration,
    })
}
