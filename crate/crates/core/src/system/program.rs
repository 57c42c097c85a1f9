//! A small boolean programming language, exploded into explicit systems.
//!
//! Every variable is a bitvector of the width chosen at explosion time.
//! See `docs/boolean-programs.md` for the grammar. Example:
//!
//! ```text
//! var h, l, o;
//! observe h as h; observe l as l; observe o as o;
//! while true {
//!     h := input();
//!     l := input();
//!     o := l;
//! }
//! ```
//!
//! Explicit states are pairs of a cut point (program entry, loop head or
//! program exit) and a variable valuation; one system step runs the program
//! from one cut point to the next. The exit point loops on itself.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::{SystemError, TransitionSystem};

/// Default bound on the number of explicit states produced by explosion.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProgramError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undeclared variable `{name}`")]
    Undeclared { name: String, line: usize, col: usize },
    #[error("variable `{0}` declared twice")]
    Redeclared(String),
    #[error("bitwidth must be between 1 and 32, got {0}")]
    Bitwidth(u32),
    #[error("literal {value} does not fit in {bitwidth} bits")]
    LiteralTooWide { value: u64, bitwidth: u32 },
    #[error("explosion too large: more than {0} explicit states")]
    TooLarge(usize),
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(usize),
    True,
    False,
    Lit(u64),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    Ne(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Assign(usize, Expr),
    Input(usize),
    If(Expr, Vec<Stmt>, Vec<Stmt>),
    While(Expr, Vec<Stmt>),
    Skip,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolProgram {
    pub vars: Vec<String>,
    /// Observed variables and the AP name they are exposed under.
    pub observe: Vec<(usize, String)>,
    pub body: Vec<Stmt>,
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
    Eof,
}

struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ProgramError> {
    const SYMS: [&str; 14] = [
        ":=", "==", "!=", "(", ")", "{", "}", ";", ",", "!", "&", "|", "^", "~",
    ];
    let mut out = Vec::new();
    for (lno, line) in text.lines().enumerate() {
        let line_text = match line.find(['#']) {
            Some(i) => &line[..i],
            None => line,
        };
        let line_text = match line_text.find("//") {
            Some(i) => &line_text[..i],
            None => line_text,
        };
        let chars: Vec<char> = line_text.chars().collect();
        let mut i = 0;
        'outer: while i < chars.len() {
            let (line, col) = (lno + 1, i + 1);
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Lexed {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line,
                    col,
                });
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let value = s.parse().map_err(|_| ProgramError::Syntax {
                    line,
                    col,
                    msg: format!("number `{s}` out of range"),
                })?;
                out.push(Lexed {
                    tok: Tok::Num(value),
                    line,
                    col,
                });
                continue;
            }
            for sym in SYMS {
                let n = sym.len();
                if i + n <= chars.len() && chars[i..i + n].iter().copied().eq(sym.chars()) {
                    out.push(Lexed {
                        tok: Tok::Sym(sym),
                        line,
                        col,
                    });
                    i += n;
                    continue 'outer;
                }
            }
            return Err(ProgramError::Syntax {
                line,
                col,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    let (line, col) = out.last().map_or((1, 1), |t| (t.line, t.col + 1));
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    vars: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> &Lexed {
        let i = self.pos;
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        &self.toks[i]
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ProgramError> {
        let t = &self.toks[self.pos];
        Err(ProgramError::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(x) if *x == s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ProgramError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == kw)
    }

    fn ident(&mut self) -> Result<String, ProgramError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn var_ref(&mut self) -> Result<usize, ProgramError> {
        let (line, col) = (self.toks[self.pos].line, self.toks[self.pos].col);
        let name = self.ident()?;
        self.vars
            .iter()
            .position(|v| *v == name)
            .ok_or(ProgramError::Undeclared { name, line, col })
    }

    fn program(&mut self) -> Result<BoolProgram, ProgramError> {
        let mut observe = Vec::new();
        let mut body = Vec::new();
        while *self.peek() != Tok::Eof {
            if self.is_kw("var") {
                self.bump();
                loop {
                    let name = self.ident()?;
                    if self.vars.contains(&name) {
                        return Err(ProgramError::Redeclared(name));
                    }
                    self.vars.push(name);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(";")?;
            } else if self.is_kw("observe") {
                self.bump();
                let v = self.var_ref()?;
                if !self.is_kw("as") {
                    return self.err("expected `as`");
                }
                self.bump();
                let ap = self.ident()?;
                self.expect_sym(";")?;
                observe.push((v, ap));
            } else {
                body.push(self.stmt()?);
            }
        }
        Ok(BoolProgram {
            vars: std::mem::take(&mut self.vars),
            observe,
            body,
        })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ProgramError> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        while !self.eat_sym("}") {
            if *self.peek() == Tok::Eof {
                return self.err("unterminated block");
            }
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn stmt(&mut self) -> Result<Stmt, ProgramError> {
        let stmt = if self.is_kw("if") {
            self.bump();
            let cond = self.expr()?;
            let then = self.block()?;
            let els = if self.is_kw("else") {
                self.bump();
                if self.is_kw("if") {
                    vec![self.stmt()?]
                } else {
                    self.block()?
                }
            } else {
                Vec::new()
            };
            Stmt::If(cond, then, els)
        } else if self.is_kw("while") {
            self.bump();
            let cond = self.expr()?;
            Stmt::While(cond, self.block()?)
        } else if self.is_kw("skip") {
            self.bump();
            Stmt::Skip
        } else {
            let v = self.var_ref()?;
            self.expect_sym(":=")?;
            if self.is_kw("input") {
                self.bump();
                self.expect_sym("(")?;
                self.expect_sym(")")?;
                Stmt::Input(v)
            } else {
                Stmt::Assign(v, self.expr()?)
            }
        };
        self.eat_sym(";");
        Ok(stmt)
    }

    fn expr(&mut self) -> Result<Expr, ProgramError> {
        let mut lhs = self.xor()?;
        while self.eat_sym("|") {
            lhs = Expr::Or(Box::new(lhs), Box::new(self.xor()?));
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<Expr, ProgramError> {
        let mut lhs = self.and()?;
        while self.eat_sym("^") {
            lhs = Expr::Xor(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, ProgramError> {
        let mut lhs = self.cmp()?;
        while self.eat_sym("&") {
            lhs = Expr::And(Box::new(lhs), Box::new(self.cmp()?));
        }
        Ok(lhs)
    }

    fn cmp(&mut self) -> Result<Expr, ProgramError> {
        let lhs = self.unary()?;
        if self.eat_sym("==") {
            return Ok(Expr::Eq(Box::new(lhs), Box::new(self.unary()?)));
        }
        if self.eat_sym("!=") {
            return Ok(Expr::Ne(Box::new(lhs), Box::new(self.unary()?)));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ProgramError> {
        if self.eat_sym("!") || self.eat_sym("~") {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if self.eat_sym("(") {
            let e = self.expr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Lit(n))
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Expr::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Expr::False)
            }
            Tok::Ident(_) => Ok(Expr::Var(self.var_ref()?)),
            _ => self.err("expected expression"),
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s,
        "var" | "observe" | "as" | "if" | "else" | "while" | "skip" | "input" | "true" | "false"
    )
}

pub fn parse_program(text: &str) -> Result<BoolProgram, ProgramError> {
    Parser {
        toks: lex(text)?,
        pos: 0,
        vars: Vec::new(),
    }
    .program()
}

// ---------------------------------------------------------------------------
// Control-flow graph
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
enum Node {
    Assign { var: usize, expr: Expr, next: usize },
    Input { var: usize, next: usize },
    Branch { cond: Expr, then: usize, els: usize },
    Exit,
}

struct Cfg {
    nodes: Vec<Node>,
    cut: Vec<bool>,
    entry: usize,
}

impl Cfg {
    fn build(p: &BoolProgram) -> Cfg {
        let mut cfg = Cfg {
            nodes: vec![Node::Exit],
            cut: vec![true],
            entry: 0,
        };
        cfg.entry = cfg.compile_seq(&p.body, 0);
        cfg.cut[cfg.entry] = true;
        cfg
    }

    fn push(&mut self, node: Node, cut: bool) -> usize {
        self.nodes.push(node);
        self.cut.push(cut);
        self.nodes.len() - 1
    }

    fn compile_seq(&mut self, stmts: &[Stmt], next: usize) -> usize {
        stmts.iter().rev().fold(next, |k, s| self.compile(s, k))
    }

    fn compile(&mut self, stmt: &Stmt, next: usize) -> usize {
        match stmt {
            Stmt::Skip => next,
            Stmt::Assign(var, expr) => self.push(
                Node::Assign {
                    var: *var,
                    expr: expr.clone(),
                    next,
                },
                false,
            ),
            Stmt::Input(var) => self.push(Node::Input { var: *var, next }, false),
            Stmt::If(cond, then, els) => {
                let t = self.compile_seq(then, next);
                let e = self.compile_seq(els, next);
                self.push(
                    Node::Branch {
                        cond: cond.clone(),
                        then: t,
                        els: e,
                    },
                    false,
                )
            }
            Stmt::While(cond, body) => {
                let head = self.push(
                    Node::Branch {
                        cond: cond.clone(),
                        then: 0,
                        els: next,
                    },
                    true,
                );
                let entry = self.compile_seq(body, head);
                if let Node::Branch { then, .. } = &mut self.nodes[head] {
                    *then = entry;
                }
                head
            }
        }
    }
}

fn eval(e: &Expr, val: &[u64], mask: u64) -> u64 {
    match e {
        Expr::Var(v) => val[*v],
        Expr::True => mask,
        Expr::False => 0,
        Expr::Lit(n) => *n & mask,
        Expr::Not(a) => !eval(a, val, mask) & mask,
        Expr::And(a, b) => eval(a, val, mask) & eval(b, val, mask),
        Expr::Or(a, b) => eval(a, val, mask) | eval(b, val, mask),
        Expr::Xor(a, b) => eval(a, val, mask) ^ eval(b, val, mask),
        Expr::Eq(a, b) => {
            if eval(a, val, mask) == eval(b, val, mask) {
                mask
            } else {
                0
            }
        }
        Expr::Ne(a, b) => {
            if eval(a, val, mask) != eval(b, val, mask) {
                mask
            } else {
                0
            }
        }
    }
}

fn check_literals(e: &Expr, bitwidth: u32) -> Result<(), ProgramError> {
    let fits = |n: u64| bitwidth >= 64 || n >> bitwidth == 0;
    match e {
        Expr::Lit(n) if !fits(*n) => Err(ProgramError::LiteralTooWide {
            value: *n,
            bitwidth,
        }),
        Expr::Not(a) => check_literals(a, bitwidth),
        Expr::And(a, b) | Expr::Or(a, b) | Expr::Xor(a, b) | Expr::Eq(a, b) | Expr::Ne(a, b) => {
            check_literals(a, bitwidth)?;
            check_literals(b, bitwidth)
        }
        _ => Ok(()),
    }
}

/// Names of the APs produced by the program's observations at a bitwidth:
/// the AP name itself for 1-bit variables, otherwise one AP per bit
/// suffixed with the bit index.
pub fn observed_aps(p: &BoolProgram, bitwidth: u32) -> Vec<String> {
    p.observe
        .iter()
        .flat_map(|(_, ap)| {
            if bitwidth == 1 {
                vec![ap.clone()]
            } else {
                (0..bitwidth).map(|i| format!("{ap}{i}")).collect()
            }
        })
        .collect()
}

/// Explodes a program into its reachable explicit-state system.
pub fn explode_program(p: &BoolProgram, bitwidth: u32) -> Result<TransitionSystem, ProgramError> {
    explode_program_with_cap(p, bitwidth, DEFAULT_STATE_CAP)
}

pub fn explode_program_with_cap(
    p: &BoolProgram,
    bitwidth: u32,
    cap: usize,
) -> Result<TransitionSystem, ProgramError> {
    if !(1..=32).contains(&bitwidth) {
        return Err(ProgramError::Bitwidth(bitwidth));
    }
    fn walk(stmts: &[Stmt], bw: u32) -> Result<(), ProgramError> {
        for s in stmts {
            match s {
                Stmt::Assign(_, e) => check_literals(e, bw)?,
                Stmt::If(c, a, b) => {
                    check_literals(c, bw)?;
                    walk(a, bw)?;
                    walk(b, bw)?;
                }
                Stmt::While(c, a) => {
                    check_literals(c, bw)?;
                    walk(a, bw)?;
                }
                _ => {}
            }
        }
        Ok(())
    }
    walk(&p.body, bitwidth)?;

    let mask = if bitwidth == 64 { u64::MAX } else { (1u64 << bitwidth) - 1 };
    let cfg = Cfg::build(p);
    let aps = observed_aps(p, bitwidth);

    type Key = (usize, Vec<u64>);
    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut states: Vec<Key> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();

    let init: Key = (cfg.entry, vec![0; p.vars.len()]);
    index.insert(init.clone(), 0);
    states.push(init);
    queue.push_back(0usize);

    while let Some(sid) = queue.pop_front() {
        let (pc, val) = states[sid].clone();
        let mut targets: Vec<Key> = Vec::new();
        if matches!(cfg.nodes[pc], Node::Exit) {
            targets.push((pc, val));
        } else {
            // Run from the cut point until every path reaches the next cut point.
            let mut stack: Vec<Key> = vec![(pc, val)];
            let mut first = true;
            while let Some((node, val)) = stack.pop() {
                if !first && cfg.cut[node] {
                    targets.push((node, val));
                    continue;
                }
                first = false;
                match &cfg.nodes[node] {
                    Node::Exit => targets.push((node, val)),
                    Node::Assign { var, expr, next } => {
                        let mut v = val.clone();
                        v[*var] = eval(expr, &val, mask);
                        stack.push((*next, v));
                    }
                    Node::Input { var, next } => {
                        for x in 0..=mask {
                            let mut v = val.clone();
                            v[*var] = x;
                            stack.push((*next, v));
                        }
                    }
                    Node::Branch { cond, then, els } => {
                        let target = if eval(cond, &val, mask) != 0 { *then } else { *els };
                        stack.push((target, val));
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(targets.len());
        for key in targets {
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    let id = states.len();
                    if id >= cap {
                        return Err(ProgramError::TooLarge(cap));
                    }
                    index.insert(key.clone(), id);
                    states.push(key);
                    queue.push_back(id);
                    id
                }
            };
            out.push(id);
        }
        succ.push(out);
    }

    let labels = states
        .iter()
        .map(|(_, val)| {
            let mut label = 0u64;
            let mut bit = 0;
            for (var, _) in &p.observe {
                for i in 0..bitwidth {
                    if val[*var] >> i & 1 == 1 {
                        label |= 1 << bit;
                    }
                    bit += 1;
                }
            }
            label
        })
        .collect();
    Ok(TransitionSystem::new(aps, vec![0], succ, labels)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn explode(src: &str, bw: u32) -> TransitionSystem {
        explode_program(&parse_program(src).unwrap(), bw).unwrap()
    }

    #[test]
    fn parses_declarations_and_statements() {
        let p = parse_program("var x, o; observe o as o; while true { x := input(); o := x }").unwrap();
        assert_eq!(p.vars, vec!["x", "o"]);
        assert_eq!(p.observe, vec![(1, "o".to_string())]);
        assert_eq!(
            p.body,
            vec![Stmt::While(
                Expr::True,
                vec![Stmt::Input(0), Stmt::Assign(1, Expr::Var(0))]
            )]
        );
    }

    #[test]
    fn undeclared_variable_is_reported() {
        let err = parse_program("var x;\nx := y;").unwrap_err();
        assert_eq!(
            err,
            ProgramError::Undeclared {
                name: "y".into(),
                line: 2,
                col: 6
            }
        );
    }

    #[test]
    fn input_pipeline_has_few_states() {
        let t = explode("var x, o; observe o as o; while true { x := input(); o := x }", 1);
        assert!(t.num_states() <= 4);
        // the start state carries the zero valuation; afterwards any value of o
        assert_eq!(t.label(0), 0);
        let succ_labels: Vec<u64> = t.successors(0).iter().map(|&s| t.label(s)).collect();
        assert!(succ_labels.contains(&0) && succ_labels.contains(&1));
        for s in 0..t.num_states() {
            let labels: Vec<u64> = t.successors(s).iter().map(|&s| t.label(s)).collect();
            assert!(labels.contains(&0) && labels.contains(&1));
        }
    }

    #[test]
    fn halting_program_self_loops() {
        let t = explode("var o; observe o as o; o := true; o := false", 1);
        // entry -> exit, exit loops
        assert_eq!(t.num_states(), 2);
        assert_eq!(t.successors(1), &[1]);
        assert_eq!(t.label(1), 0);
    }

    #[test]
    fn multi_bit_observations() {
        let t = explode("var x; observe x as x; x := 2", 2);
        assert_eq!(t.aps(), &["x0".to_string(), "x1".to_string()]);
        assert_eq!(t.label_names(1), vec!["x1"]);
        let err = explode_program(&parse_program("var x; x := 4").unwrap(), 2).unwrap_err();
        assert_eq!(
            err,
            ProgramError::LiteralTooWide {
                value: 4,
                bitwidth: 2
            }
        );
    }

    #[test]
    fn explosion_cap() {
        let p = parse_program("var a, b, c; while true { a := input(); b := input(); c := input() }")
            .unwrap();
        assert_eq!(
            explode_program_with_cap(&p, 4, 100).unwrap_err(),
            ProgramError::TooLarge(100)
        );
    }

    #[test]
    fn explosion_is_deterministic() {
        let src = "var h, l, o; observe h as h; observe o as o;
                   while true { h := input(); l := input(); if l { o := h ^ l } else { o := !o } }";
        let p = parse_program(src).unwrap();
        assert_eq!(explode_program(&p, 2).unwrap(), explode_program(&p, 2).unwrap());
    }

    #[test]
    fn if_else_chains_and_comparisons() {
        let t = explode(
            "var x, o; observe o as o;
             x := 1;
             if x == 0 { o := 0 } else if x != 1 { o := 0 } else { o := 1 }",
            1,
        );
        assert_eq!(t.label(t.num_states() - 1), 1);
    }
}
