//! Inclusion through an external tool.
//!
//! Both automata are written as BA files and the command template is run
//! with `{A}` and `{B}` replaced by their paths. The template is split on
//! whitespace and executed without a shell. The tool must print a line
//! `INCLUDED` or `NOT INCLUDED`, optionally followed by
//! `CEX: <stem>$<loop>` with comma-separated BA letters.

use std::io::Read;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automata::{export, merge_aps, AutomataError, ExportFormat, LassoWord, Nba};
use crate::budget::{Budget, ResourceError};

use super::{is_counterexample, InclusionError, InclusionOutcome, InclusionStats};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ExternalToolError {
    #[error("empty command template")]
    EmptyCommand,
    #[error("cannot run `{0}`: {1}")]
    Spawn(String, String),
    #[error("tool failed ({status}){}", detail(.stderr))]
    Failed { status: String, stderr: String },
    #[error("tool timed out")]
    Timeout,
    #[error("unparseable tool output: {0}")]
    Unparseable(String),
    #[error("tool counterexample does not separate the languages: {0}")]
    InvalidCounterexample(String),
    #[error("i/o: {0}")]
    Io(String),
}

fn io(e: std::io::Error) -> InclusionError {
    ExternalToolError::Io(e.to_string()).into()
}

fn detail(stderr: &str) -> String {
    if stderr.is_empty() {
        String::new()
    } else {
        format!(": {stderr}")
    }
}

pub fn include_external(a: &Nba, b: &Nba, command: &str) -> Result<InclusionOutcome, InclusionError> {
    include_external_with(a, b, command, &Budget::default())
}

pub fn include_external_with(
    a: &Nba,
    b: &Nba,
    command: &str,
    budget: &Budget,
) -> Result<InclusionOutcome, InclusionError> {
    if a.arity() != b.arity() {
        return Err(AutomataError::ArityMismatch(a.arity(), b.arity()).into());
    }
    let start = Instant::now();
    let aps = merge_aps(a.aps(), b.aps());
    let a = a.with_aps(&aps)?;
    let b = b.with_aps(&aps)?;
    // export first: oversized alphabets fail before anything is spawned
    let a_text = export(&a, ExportFormat::Ba)?;
    let b_text = export(&b, ExportFormat::Ba)?;
    let dir = tempfile::tempdir().map_err(io)?;
    let a_path = dir.path().join("a.ba");
    let b_path = dir.path().join("b.ba");
    std::fs::write(&a_path, a_text).map_err(io)?;
    std::fs::write(&b_path, b_text).map_err(io)?;

    let args: Vec<String> = command
        .split_whitespace()
        .map(|tok| {
            tok.replace("{A}", &a_path.to_string_lossy())
                .replace("{B}", &b_path.to_string_lossy())
        })
        .collect();
    let (program, rest) = args.split_first().ok_or(ExternalToolError::EmptyCommand)?;
    let mut child = Command::new(program)
        .args(rest)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| ExternalToolError::Spawn(program.clone(), e.to_string()))?;

    // drain pipes on threads so a chatty tool cannot block
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_thread = thread::spawn(move || {
        let mut s = String::new();
        stdout.read_to_string(&mut s).map(|_| s)
    });
    let err_thread = thread::spawn(move || {
        let mut s = String::new();
        stderr.read_to_string(&mut s).map(|_| s)
    });
    let status = loop {
        if let Some(status) = child.try_wait().map_err(io)? {
            break status;
        }
        if budget.check(0) == Err(ResourceError::Timeout) {
            let _ = child.kill();
            let _ = child.wait();
            return Err(ExternalToolError::Timeout.into());
        }
        thread::sleep(Duration::from_millis(5));
    };
    let out = out_thread.join().expect("reader thread").map_err(io)?;
    let err = err_thread.join().expect("reader thread").map_err(io)?;
    if !status.success() {
        return Err(ExternalToolError::Failed {
            status: status.to_string(),
            stderr: err.trim().to_string(),
        }
        .into());
    }

    let (included, cex) = parse_output(&out)?;
    let counterexample = match cex {
        Some((stem, cycle)) if !included => {
            let w = LassoWord::new(a.arity(), aps.clone(), stem, cycle)
                .map_err(|e| ExternalToolError::Unparseable(e.to_string()))?;
            if !is_counterexample(&a, &b, &w) {
                return Err(ExternalToolError::InvalidCounterexample(w.to_string()).into());
            }
            Some(w)
        }
        _ => None,
    };
    Ok(InclusionOutcome {
        included,
        counterexample,
        stats: InclusionStats {
            engine: "external".into(),
            states_explored: 0,
            elapsed: start.elapsed(),
            complement_time: None,
        },
    })
}

type RawLasso = (Vec<u128>, Vec<u128>);

/// Parses the verdict line and optional `CEX:` line.
pub fn parse_output(out: &str) -> Result<(bool, Option<RawLasso>), ExternalToolError> {
    let mut verdict = None;
    let mut cex = None;
    for line in out.lines().map(str::trim) {
        match line {
            "INCLUDED" => verdict = Some(true),
            "NOT INCLUDED" => verdict = Some(false),
            _ => {
                if let Some(rest) = line.strip_prefix("CEX:") {
                    cex = Some(parse_cex(rest.trim())?);
                }
            }
        }
    }
    let verdict = verdict.ok_or_else(|| ExternalToolError::Unparseable(out.trim().to_string()))?;
    Ok((verdict, cex))
}

fn parse_cex(text: &str) -> Result<RawLasso, ExternalToolError> {
    let (stem, cycle) = text
        .split_once('$')
        .ok_or_else(|| ExternalToolError::Unparseable(format!("counterexample `{text}` lacks `$`")))?;
    let letters = |s: &str| -> Result<Vec<u128>, ExternalToolError> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.strip_prefix('l')
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| ExternalToolError::Unparseable(format!("bad letter `{t}`")))
            })
            .collect()
    };
    Ok((letters(stem)?, letters(cycle)?))
}

/// Formats a lasso in the `CEX:` line syntax.
pub fn format_cex(w: &LassoWord) -> String {
    let join = |ls: &[u128]| ls.iter().map(|l| format!("l{l}")).collect::<Vec<_>>().join(",");
    format!("CEX: {}${}", join(w.stem()), join(w.cycle()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_parsing() {
        assert_eq!(parse_output("INCLUDED\n").unwrap(), (true, None));
        let (v, cex) = parse_output("NOT INCLUDED\nCEX: l1,l0$l3\n").unwrap();
        assert!(!v);
        assert_eq!(cex, Some((vec![1, 0], vec![3])));
        assert!(parse_output("maybe").is_err());
    }

    #[test]
    fn failing_command_is_an_error() {
        let u = Nba::universal(1, vec!["a".into()]).unwrap();
        let err = include_external(&u, &u, "false {A} {B}").unwrap_err();
        assert!(matches!(err, InclusionError::External(ExternalToolError::Failed { .. })));
    }

    #[test]
    fn oversized_alphabet_fails_before_spawning() {
        let aps: Vec<String> = (0..18).map(|i| format!("p{i}")).collect();
        let u = Nba::universal(2, aps).unwrap();
        let err = include_external(&u, &u, "/nonexistent/tool {A} {B}").unwrap_err();
        assert!(err.to_string().contains("alphabet too large"));
    }
}
