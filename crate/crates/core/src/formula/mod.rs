//! HyperLTL formulas: abstract syntax, concrete syntax and normal forms.
//!
//! A [`HyperFormula`] is a quantifier prefix over trace variables followed by
//! a quantifier-free [`LtlBody`]. Atoms are written `name_tracevar` in the
//! concrete syntax, e.g. `forall p. exists q. G (a_p <-> a_q)`.

mod nnf;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use nnf::to_nnf;
pub use parser::{parse_body, parse_hyperltl};

/// Name of a trace variable bound by the quantifier prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceVar(pub String);

impl TraceVar {
    pub fn new(name: impl Into<String>) -> Self {
        TraceVar(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TraceVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TraceVar {
    fn from(s: &str) -> Self {
        TraceVar(s.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// Quantifier-free LTL over indexed atomic propositions.
///
/// Derived operators are kept in the tree so that printed formulas look like
/// their input; [`to_nnf`] removes them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LtlBody {
    Const(bool),
    Atom { prop: String, var: TraceVar },
    Not(Box<LtlBody>),
    And(Box<LtlBody>, Box<LtlBody>),
    Or(Box<LtlBody>, Box<LtlBody>),
    Implies(Box<LtlBody>, Box<LtlBody>),
    Iff(Box<LtlBody>, Box<LtlBody>),
    Next(Box<LtlBody>),
    Eventually(Box<LtlBody>),
    Globally(Box<LtlBody>),
    Until(Box<LtlBody>, Box<LtlBody>),
    Release(Box<LtlBody>, Box<LtlBody>),
    WeakUntil(Box<LtlBody>, Box<LtlBody>),
}

#[allow(clippy::should_implement_trait)]
impl LtlBody {
    pub fn atom(prop: impl Into<String>, var: impl Into<TraceVar>) -> Self {
        LtlBody::Atom {
            prop: prop.into(),
            var: var.into(),
        }
    }

    pub fn not(a: LtlBody) -> Self {
        LtlBody::Not(Box::new(a))
    }

    pub fn and(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::Iff(Box::new(a), Box::new(b))
    }

    pub fn next(a: LtlBody) -> Self {
        LtlBody::Next(Box::new(a))
    }

    pub fn eventually(a: LtlBody) -> Self {
        LtlBody::Eventually(Box::new(a))
    }

    pub fn globally(a: LtlBody) -> Self {
        LtlBody::Globally(Box::new(a))
    }

    pub fn until(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::Release(Box::new(a), Box::new(b))
    }

    pub fn weak_until(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::WeakUntil(Box::new(a), Box::new(b))
    }

    /// Immediate sub-bodies, left to right.
    pub fn children(&self) -> Vec<&LtlBody> {
        match self {
            LtlBody::Const(_) | LtlBody::Atom { .. } => vec![],
            LtlBody::Not(a)
            | LtlBody::Next(a)
            | LtlBody::Eventually(a)
            | LtlBody::Globally(a) => vec![a],
            LtlBody::And(a, b)
            | LtlBody::Or(a, b)
            | LtlBody::Implies(a, b)
            | LtlBody::Iff(a, b)
            | LtlBody::Until(a, b)
            | LtlBody::Release(a, b)
            | LtlBody::WeakUntil(a, b) => vec![a, b],
        }
    }

    /// Number of syntax-tree nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(LtlBody::size).sum::<usize>()
    }

    pub fn free_vars(&self) -> BTreeSet<TraceVar> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |_, v| {
            out.insert(v.clone());
        });
        out
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |p, _| {
            out.insert(p.to_string());
        });
        out
    }

    fn visit_atoms(&self, f: &mut impl FnMut(&str, &TraceVar)) {
        if let LtlBody::Atom { prop, var } = self {
            f(prop, var);
        }
        for c in self.children() {
            c.visit_atoms(f);
        }
    }

    /// Whether negation only occurs directly above atoms and only core NNF
    /// operators (constants, and, or, next, until, release) are used.
    pub fn is_nnf(&self) -> bool {
        match self {
            LtlBody::Const(_) | LtlBody::Atom { .. } => true,
            LtlBody::Not(a) => matches!(**a, LtlBody::Atom { .. }),
            LtlBody::And(a, b)
            | LtlBody::Or(a, b)
            | LtlBody::Until(a, b)
            | LtlBody::Release(a, b) => a.is_nnf() && b.is_nnf(),
            LtlBody::Next(a) => a.is_nnf(),
            _ => false,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LtlBody::Const(_)
            | LtlBody::Atom { .. }
            | LtlBody::Not(_)
            | LtlBody::Next(_)
            | LtlBody::Eventually(_)
            | LtlBody::Globally(_) => write!(f, "{self}"),
            _ => write!(f, "({self})"),
        }
    }
}

impl fmt::Display for LtlBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &LtlBody, op: &str, b: &LtlBody| {
            a.fmt_operand(f)?;
            write!(f, " {op} ")?;
            b.fmt_operand(f)
        };
        match self {
            LtlBody::Const(true) => f.write_str("true"),
            LtlBody::Const(false) => f.write_str("false"),
            LtlBody::Atom { prop, var } => write!(f, "{prop}_{var}"),
            LtlBody::Not(a) => {
                f.write_str("!")?;
                a.fmt_operand(f)
            }
            LtlBody::Next(a) => {
                f.write_str("X ")?;
                a.fmt_operand(f)
            }
            LtlBody::Eventually(a) => {
                f.write_str("F ")?;
                a.fmt_operand(f)
            }
            LtlBody::Globally(a) => {
                f.write_str("G ")?;
                a.fmt_operand(f)
            }
            LtlBody::And(a, b) => binary(f, a, "&", b),
            LtlBody::Or(a, b) => binary(f, a, "|", b),
            LtlBody::Implies(a, b) => binary(f, a, "->", b),
            LtlBody::Iff(a, b) => binary(f, a, "<->", b),
            LtlBody::Until(a, b) => binary(f, a, "U", b),
            LtlBody::Release(a, b) => binary(f, a, "R", b),
            LtlBody::WeakUntil(a, b) => binary(f, a, "W", b),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unbound trace variable `{var}`")]
    Unbound { var: String, line: usize, col: usize },
    #[error("{line}:{col}: trace variable `{var}` quantified twice")]
    Duplicate { var: String, line: usize, col: usize },
    #[error("unbound trace variable `{0}`")]
    UnboundVar(String),
    #[error("trace variable `{0}` quantified twice")]
    DuplicateVar(String),
}

/// A closed HyperLTL formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HyperFormula {
    prefix: Vec<(Quantifier, TraceVar)>,
    body: LtlBody,
}

impl HyperFormula {
    /// Builds a formula, checking that the prefix variables are distinct and
    /// bind every variable of the body.
    pub fn new(prefix: Vec<(Quantifier, TraceVar)>, body: LtlBody) -> Result<Self, FormulaError> {
        let mut seen = BTreeSet::new();
        for (_, v) in &prefix {
            if !seen.insert(v.clone()) {
                return Err(FormulaError::DuplicateVar(v.0.clone()));
            }
        }
        if let Some(v) = body.free_vars().into_iter().find(|v| !seen.contains(v)) {
            return Err(FormulaError::UnboundVar(v.0));
        }
        Ok(HyperFormula { prefix, body })
    }

    pub fn prefix(&self) -> &[(Quantifier, TraceVar)] {
        &self.prefix
    }

    pub fn body(&self) -> &LtlBody {
        &self.body
    }

    pub fn vars(&self) -> Vec<TraceVar> {
        self.prefix.iter().map(|(_, v)| v.clone()).collect()
    }

    /// Number of adjacent prefix positions with differing quantifiers.
    pub fn alternations(&self) -> usize {
        self.prefix.windows(2).filter(|w| w[0].0 != w[1].0).count()
    }

    /// Length of the outermost block of equal quantifiers.
    pub fn leading_block(&self) -> Option<(Quantifier, usize)> {
        let (q, _) = self.prefix.first()?;
        let n = self.prefix.iter().take_while(|(p, _)| p == q).count();
        Some((*q, n))
    }

    /// Dual formula: every quantifier flipped and the body negated.
    pub fn negate(&self) -> HyperFormula {
        HyperFormula {
            prefix: self.prefix.iter().map(|(q, v)| (q.dual(), v.clone())).collect(),
            body: LtlBody::not(self.body.clone()),
        }
    }

    /// The prefix as a string over `a`/`e`, e.g. `"aae"` for GNI.
    pub fn pattern(&self) -> String {
        self.prefix
            .iter()
            .map(|(q, _)| match q {
                Quantifier::Forall => 'a',
                Quantifier::Exists => 'e',
            })
            .collect()
    }
}

/// Negates a formula (quantifier duality); `T ⊨ negate(f)` iff not `T ⊨ f`.
pub fn negate(f: &HyperFormula) -> HyperFormula {
    f.negate()
}

impl fmt::Display for HyperFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, v) in &self.prefix {
            write!(f, "{} {v}. ", q.keyword())?;
        }
        write!(f, "{}", self.body)
    }
}

/// Generalized non-interference over the given high inputs, low inputs and
/// outputs: `forall p1. forall p2. exists p3.` with the first trace fixing
/// the high inputs and the second the low inputs and outputs.
pub fn gni(high: &[&str], low: &[&str], out: &[&str]) -> HyperFormula {
    let eq = |a: &str, x: &str, y: &str| LtlBody::iff(LtlBody::atom(a, x), LtlBody::atom(a, y));
    let conj = |items: Vec<LtlBody>| {
        items
            .into_iter()
            .reduce(LtlBody::and)
            .unwrap_or(LtlBody::Const(true))
    };
    let high_part = conj(high.iter().map(|a| eq(a, "p1", "p3")).collect());
    let low_part = conj(low.iter().chain(out).map(|a| eq(a, "p2", "p3")).collect());
    let body = LtlBody::and(LtlBody::globally(high_part), LtlBody::globally(low_part));
    HyperFormula::new(
        vec![
            (Quantifier::Forall, "p1".into()),
            (Quantifier::Forall, "p2".into()),
            (Quantifier::Exists, "p3".into()),
        ],
        body,
    )
    .expect("GNI template is closed")
}
