//! Line-based explicit-state system format.
//!
//! ```text
//! aps: a b c
//! init: 0 1
//! state 0 {a c}
//! -> 1 2
//! state 1 {}
//! -> 0
//! ```
//!
//! `aps:` and `init:` appear once; every `state` line is followed by exactly
//! one `->` line. State ids are arbitrary nonnegative integers and are
//! renumbered densely in order of declaration.

use std::collections::HashMap;
use std::fmt::Write;

use super::{SystemError, TransitionSystem};

fn syntax(line: usize, msg: impl Into<String>) -> SystemError {
    SystemError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_ids(line: usize, text: &str) -> Result<Vec<usize>, SystemError> {
    text.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| syntax(line, format!("invalid state id `{t}`"))))
        .collect()
}

pub fn parse_system(text: &str) -> Result<TransitionSystem, SystemError> {
    let mut aps: Option<Vec<String>> = None;
    let mut init: Option<Vec<usize>> = None;
    // (declared id, label names, successor ids)
    let mut states: Vec<(usize, Vec<String>, Option<Vec<usize>>)> = Vec::new();

    for (lno, raw) in text.lines().enumerate() {
        let line = lno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("aps:") {
            if aps.is_some() {
                return Err(syntax(line, "`aps:` declared twice"));
            }
            aps = Some(rest.split_whitespace().map(str::to_string).collect());
        } else if let Some(rest) = content.strip_prefix("init:") {
            if init.is_some() {
                return Err(syntax(line, "`init:` declared twice"));
            }
            init = Some(parse_ids(line, rest)?);
        } else if let Some(rest) = content.strip_prefix("->") {
            match states.last_mut() {
                Some((_, _, succ @ None)) => *succ = Some(parse_ids(line, rest)?),
                _ => return Err(syntax(line, "`->` line without a preceding `state` line")),
            }
        } else if let Some(rest) = content.strip_prefix("state") {
            if let Some((id, _, None)) = states.last() {
                return Err(syntax(line, format!("state {id} has no `->` line")));
            }
            let rest = rest.trim();
            let (id_text, label_text) = match rest.find('{') {
                Some(i) => (&rest[..i], &rest[i..]),
                None => return Err(syntax(line, "expected `{` label set")),
            };
            let id: usize = id_text
                .trim()
                .parse()
                .map_err(|_| syntax(line, format!("invalid state id `{}`", id_text.trim())))?;
            let inner = label_text
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| syntax(line, "malformed label set"))?;
            let labels = inner
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            if states.iter().any(|(other, _, _)| *other == id) {
                return Err(syntax(line, format!("state {id} declared twice")));
            }
            states.push((id, labels, None));
        } else {
            return Err(syntax(line, format!("unrecognised line `{content}`")));
        }
    }

    if let Some((id, _, None)) = states.last() {
        return Err(SystemError::NoSuccessor(*id));
    }
    let aps = aps.unwrap_or_default();
    let init = init.ok_or(SystemError::MissingInit)?;
    let index: HashMap<usize, usize> = states.iter().enumerate().map(|(i, (id, _, _))| (*id, i)).collect();
    let lookup = |id: usize| index.get(&id).copied().ok_or(SystemError::UnknownState(id));

    let mut labels = Vec::with_capacity(states.len());
    let mut succ = Vec::with_capacity(states.len());
    for (id, names, targets) in &states {
        let mut mask = 0u64;
        for name in names {
            let i = aps
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| SystemError::UndeclaredAp(name.clone()))?;
            mask |= 1 << i;
        }
        labels.push(mask);
        let targets = targets.as_ref().expect("checked above");
        if targets.is_empty() {
            return Err(SystemError::NoSuccessor(*id));
        }
        succ.push(targets.iter().map(|&t| lookup(t)).collect::<Result<Vec<_>, _>>()?);
    }
    let initial = init.iter().map(|&s| lookup(s)).collect::<Result<Vec<_>, _>>()?;
    TransitionSystem::new(aps, initial, succ, labels)
}

pub fn print_system(t: &TransitionSystem) -> String {
    let mut out = String::new();
    writeln!(out, "aps: {}", t.aps().join(" ")).unwrap();
    let init: Vec<String> = t.initial().iter().map(usize::to_string).collect();
    writeln!(out, "init: {}", init.join(" ")).unwrap();
    for s in 0..t.num_states() {
        writeln!(out, "state {s} {{{}}}", t.label_names(s).join(" ")).unwrap();
        let succ: Vec<String> = t.successors(s).iter().map(usize::to_string).collect();
        writeln!(out, "-> {}", succ.join(" ")).unwrap();
    }
    out
}
