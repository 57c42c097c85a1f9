//! Text formats: a HOA-like symbolic format and the explicit BA format.
//!
//! HOA-like:
//!
//! ```text
//! HOA-ish: v1
//! States: 2
//! Start: 0
//! AP: 2 "a@0" "a@1"
//! Arity: 2
//! Acceptance: 1 Inf(0)
//! --BODY--
//! State: 0 {0}
//! [(0 & !1) | (!0 & 1)] 1
//! State: 1
//! [t] 1
//! --END--
//! ```
//!
//! BA: the first line names the initial state, then one `l<k>,[p]->[q]`
//! line per explicit letter `k` (bit `v` of `k` is variable `v`), then one
//! `[q]` line per accepting state.

use std::collections::HashMap;
use std::fmt::Write;

use super::guard::{Cube, Guard, Letter};
use super::{AutomataError, Nba};

/// Maximum number of variables for the explicit BA format.
pub const BA_MAX_VARS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    HoaLike,
    Ba,
}

pub fn export(a: &Nba, format: ExportFormat) -> Result<String, AutomataError> {
    match format {
        ExportFormat::HoaLike => Ok(to_hoa(a)),
        ExportFormat::Ba => to_ba(a),
    }
}

fn guard_text(g: &Guard) -> String {
    if g.is_true() {
        return "t".into();
    }
    if g.is_false() {
        return "f".into();
    }
    let cubes: Vec<String> = g
        .cubes()
        .iter()
        .map(|c| {
            let mut lits = Vec::new();
            for v in 0..128 {
                let bit = 1u128 << v;
                if c.pos & bit != 0 {
                    lits.push(v.to_string());
                } else if c.neg & bit != 0 {
                    lits.push(format!("!{v}"));
                }
            }
            format!("({})", lits.join(" & "))
        })
        .collect();
    cubes.join(" | ")
}

fn to_hoa(a: &Nba) -> String {
    let mut out = String::new();
    writeln!(out, "HOA-ish: v1").unwrap();
    writeln!(out, "States: {}", a.num_states()).unwrap();
    let start: Vec<String> = a.initial().iter().map(usize::to_string).collect();
    writeln!(out, "Start: {}", start.join(" ")).unwrap();
    let names: Vec<String> = a.var_names().iter().map(|n| format!("\"{n}\"")).collect();
    if names.is_empty() {
        writeln!(out, "AP: 0").unwrap();
    } else {
        writeln!(out, "AP: {} {}", names.len(), names.join(" ")).unwrap();
    }
    writeln!(out, "Arity: {}", a.arity()).unwrap();
    writeln!(out, "Acceptance: 1 Inf(0)").unwrap();
    writeln!(out, "--BODY--").unwrap();
    for q in 0..a.num_states() {
        if a.is_accepting(q) {
            writeln!(out, "State: {q} {{0}}").unwrap();
        } else {
            writeln!(out, "State: {q}").unwrap();
        }
        for (g, r) in a.transitions(q) {
            writeln!(out, "[{}] {r}", guard_text(g)).unwrap();
        }
    }
    writeln!(out, "--END--").unwrap();
    out
}

fn to_ba(a: &Nba) -> Result<String, AutomataError> {
    let bits = a.num_vars();
    if bits > BA_MAX_VARS {
        return Err(AutomataError::AlphabetTooLarge {
            bits,
            max: BA_MAX_VARS,
        });
    }
    let mut out = String::new();
    if a.num_accepting() == 0 || a.initial().is_empty() {
        // canonical empty automaton; an absent accepting list would mean
        // "all states accepting" to BA readers
        writeln!(out, "[0]\n[0]").unwrap();
        return Ok(out);
    }
    let letters: Vec<Letter> = (0..1u128 << bits).collect();
    let fresh = a.num_states();
    let init = if a.initial().len() == 1 { a.initial()[0] } else { fresh };
    writeln!(out, "[{init}]").unwrap();
    let emit = |from: usize, g: &Guard, to: usize, out: &mut String| {
        for &l in &letters {
            if g.eval(l) {
                writeln!(out, "l{l},[{from}]->[{to}]").unwrap();
            }
        }
    };
    if init == fresh {
        for &q in a.initial() {
            for (g, r) in a.transitions(q) {
                emit(fresh, g, *r, &mut out);
            }
        }
    }
    for q in 0..a.num_states() {
        for (g, r) in a.transitions(q) {
            emit(q, g, *r, &mut out);
        }
    }
    for q in 0..a.num_states() {
        if a.is_accepting(q) {
            writeln!(out, "[{q}]").unwrap();
        }
    }
    Ok(out)
}

fn perr(line: usize, msg: impl Into<String>) -> AutomataError {
    AutomataError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_guard(line: usize, text: &str) -> Result<Guard, AutomataError> {
    let text = text.trim();
    if text == "t" {
        return Ok(Guard::top());
    }
    if text == "f" {
        return Ok(Guard::bottom());
    }
    let mut cubes = Vec::new();
    for part in text.split('|') {
        let inner = part
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| perr(line, format!("expected parenthesised cube, got `{}`", part.trim())))?;
        let mut cube = Cube::TRUE;
        for lit in inner.split('&').map(str::trim).filter(|s| !s.is_empty()) {
            let (neg, num) = match lit.strip_prefix('!') {
                Some(rest) => (true, rest.trim()),
                None => (false, lit),
            };
            let v: u32 = num.parse().map_err(|_| perr(line, format!("bad literal `{lit}`")))?;
            if v >= 128 {
                return Err(perr(line, format!("literal `{lit}` out of range")));
            }
            let bit = 1u128 << v;
            let l = if neg { Cube { pos: 0, neg: bit } } else { Cube { pos: bit, neg: 0 } };
            match cube.and(l) {
                Some(c) => cube = c,
                None => return Err(perr(line, "contradictory cube")),
            }
        }
        cubes.push(cube);
    }
    Ok(Guard::from_cubes(cubes))
}

/// Reads the HOA-like format written by [`export`].
pub fn parse_hoa(text: &str) -> Result<Nba, AutomataError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let mut states: Option<usize> = None;
    let mut start: Vec<usize> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut arity: Option<usize> = None;
    let mut header_ok = false;
    for (line, l) in lines.by_ref() {
        if l == "--BODY--" {
            break;
        }
        let (key, rest) = l.split_once(':').ok_or_else(|| perr(line, format!("bad header `{l}`")))?;
        let rest = rest.trim();
        match key.trim() {
            "HOA-ish" => header_ok = true,
            "States" => states = Some(rest.parse().map_err(|_| perr(line, "bad state count"))?),
            "Start" => {
                start = rest
                    .split_whitespace()
                    .map(|s| s.parse().map_err(|_| perr(line, "bad start state")))
                    .collect::<Result<_, _>>()?
            }
            "AP" => {
                let mut parts = rest.splitn(2, char::is_whitespace);
                let count: usize = parts
                    .next()
                    .unwrap_or("")
                    .parse()
                    .map_err(|_| perr(line, "bad AP count"))?;
                let quoted = parts.next().unwrap_or("");
                names = quoted
                    .split('"')
                    .enumerate()
                    .filter(|(i, _)| i % 2 == 1)
                    .map(|(_, s)| s.to_string())
                    .collect();
                if names.len() != count {
                    return Err(perr(line, "AP count does not match the names"));
                }
            }
            "Arity" => arity = Some(rest.parse().map_err(|_| perr(line, "bad arity"))?),
            _ => {}
        }
    }
    if !header_ok {
        return Err(perr(1, "missing `HOA-ish:` header"));
    }
    let states = states.ok_or_else(|| perr(1, "missing `States:`"))?;
    // names are `ap@index` in variable order
    let mut split: Vec<(String, usize)> = Vec::new();
    for n in &names {
        let (ap, idx) = n.rsplit_once('@').ok_or_else(|| perr(1, format!("AP `{n}` lacks `@index`")))?;
        let idx: usize = idx.parse().map_err(|_| perr(1, format!("AP `{n}` has a bad index")))?;
        split.push((ap.to_string(), idx));
    }
    let arity = arity.unwrap_or_else(|| split.iter().map(|(_, i)| i + 1).max().unwrap_or(0));
    let aps: Vec<String> = split.iter().filter(|(_, i)| *i == 0).map(|(a, _)| a.clone()).collect();
    let m = aps.len();
    for (v, (ap, idx)) in split.iter().enumerate() {
        if m == 0 || v / m != *idx || aps[v % m] != *ap {
            return Err(perr(1, "AP list is not in `ap@index` variable order"));
        }
    }
    if split.len() != arity * m {
        return Err(perr(1, "AP list does not cover the arity"));
    }
    let mut a = Nba::new(arity, aps)?;
    for _ in 0..states {
        a.add_state(false);
    }
    let check = |line: usize, q: usize| if q < states { Ok(q) } else { Err(perr(line, format!("state {q} out of range"))) };
    for q in start {
        a.add_initial(check(1, q)?);
    }
    let mut current: Option<usize> = None;
    let mut ended = false;
    for (line, l) in lines {
        if l == "--END--" {
            ended = true;
            break;
        }
        if let Some(rest) = l.strip_prefix("State:") {
            let mut parts = rest.split_whitespace();
            let q: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| perr(line, "bad state number"))?;
            let q = check(line, q)?;
            if parts.next().is_some_and(|s| s.starts_with('{')) {
                a.set_accepting(q, true);
            }
            current = Some(q);
        } else if let Some(rest) = l.strip_prefix('[') {
            let q = current.ok_or_else(|| perr(line, "edge before any `State:`"))?;
            let (g, target) = rest.rsplit_once(']').ok_or_else(|| perr(line, "unclosed `[`"))?;
            let r: usize = target.trim().parse().map_err(|_| perr(line, "bad edge target"))?;
            let g = parse_guard(line, g)?;
            if g.support() & !a.var_mask() != 0 {
                return Err(perr(line, "guard mentions an undeclared AP"));
            }
            a.add_transition(q, g, check(line, r)?);
        } else {
            return Err(perr(line, format!("unrecognised line `{l}`")));
        }
    }
    if !ended {
        return Err(perr(text.lines().count(), "missing `--END--`"));
    }
    Ok(a)
}

/// Reads a BA file over the given alphabet. Letters are `l<k>` with `k` the
/// explicit letter id. Without accepting lines all states accept.
pub fn parse_ba(text: &str, arity: usize, aps: &[String]) -> Result<Nba, AutomataError> {
    let mut a = Nba::new(arity, aps.to_vec())?;
    let all = a.var_mask();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut state = |a: &mut Nba, name: &str| -> usize {
        *ids.entry(name.to_string()).or_insert_with(|| a.add_state(false))
    };
    let mut initial: Option<usize> = None;
    let mut accepting: Vec<usize> = Vec::new();
    let bracket = |line: usize, s: &str| -> Result<String, AutomataError> {
        s.trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .map(str::to_string)
            .ok_or_else(|| perr(line, format!("expected `[state]`, got `{s}`")))
    };
    let mut seen_edge = false;
    for (i, l) in text.lines().enumerate() {
        let line = i + 1;
        let l = l.trim();
        if l.is_empty() {
            continue;
        }
        if let Some((sym, rest)) = l.split_once(',') {
            let (from, to) = rest.split_once("->").ok_or_else(|| perr(line, "expected `->`"))?;
            let k: Letter = sym
                .trim()
                .strip_prefix('l')
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| perr(line, format!("bad letter `{sym}`")))?;
            if k & !all != 0 {
                return Err(perr(line, format!("letter `{sym}` outside the alphabet")));
            }
            let p = state(&mut a, &bracket(line, from)?);
            let q = state(&mut a, &bracket(line, to)?);
            a.add_transition(p, Guard::cube(Cube::full(k, all)), q);
            seen_edge = true;
        } else {
            let q = state(&mut a, &bracket(line, l)?);
            if initial.is_none() && !seen_edge {
                initial = Some(q);
            } else {
                accepting.push(q);
            }
        }
    }
    let init = initial.ok_or_else(|| perr(1, "missing initial state"))?;
    a.add_initial(init);
    if accepting.is_empty() {
        for q in 0..a.num_states() {
            a.set_accepting(q, true);
        }
    } else {
        for q in accepting {
            a.set_accepting(q, true);
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{ltl_to_nba, member, LassoWord};
    use crate::formula::{parse_body, TraceVar};

    fn sample() -> Nba {
        let vars = [TraceVar::new("p"), TraceVar::new("q")];
        ltl_to_nba(&parse_body("a_p U (b_q & X !a_p)").unwrap(), &vars).unwrap()
    }

    fn words(a: &Nba) -> Vec<LassoWord> {
        let mut out = Vec::new();
        for x in 0u128..16 {
            for y in 0u128..16 {
                out.push(LassoWord::new(a.arity(), a.aps().to_vec(), vec![x], vec![y]).unwrap());
                out.push(LassoWord::new(a.arity(), a.aps().to_vec(), vec![x, y], vec![x ^ y]).unwrap());
            }
        }
        out
    }

    #[test]
    fn universal_ba_lists_every_letter() {
        let u = Nba::universal(2, vec!["a".into()]).unwrap();
        let text = export(&u, ExportFormat::Ba).unwrap();
        assert_eq!(text.lines().filter(|l| l.contains("->")).count(), 4);
    }

    #[test]
    fn hoa_round_trip_preserves_membership() {
        let a = sample();
        let text = export(&a, ExportFormat::HoaLike).unwrap();
        assert!(text.starts_with("HOA-ish: v1\n"));
        let b = parse_hoa(&text).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ba_round_trip_preserves_membership() {
        let a = sample();
        let text = export(&a, ExportFormat::Ba).unwrap();
        let b = parse_ba(&text, a.arity(), a.aps()).unwrap();
        for w in words(&a) {
            assert_eq!(member(&a, &w), member(&b, &w), "{w}");
        }
    }

    #[test]
    fn large_alphabet_is_rejected_for_ba() {
        let aps: Vec<String> = (0..18).map(|i| format!("p{i}")).collect();
        let u = Nba::universal(2, aps).unwrap();
        let err = export(&u, ExportFormat::Ba).unwrap_err();
        assert!(err.to_string().contains("alphabet too large"));
        assert!(export(&u, ExportFormat::HoaLike).is_ok());
    }
}
