//! Recursive-descent parser for the HyperLTL concrete syntax.
//!
//! ```text
//! formula := quant* body
//! quant   := ("forall" | "exists") IDENT "."
//! body    := imp ("<->" imp)*
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := temp ("&" temp)*
//! temp    := unary (("U" | "R" | "W") temp)?
//! unary   := ("!" | "X" | "G" | "F") unary | "(" body ")" | "true" | "false" | PROP "_" VAR
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::collections::BTreeSet;

use super::{FormulaError, HyperFormula, LtlBody, Quantifier, TraceVar};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Dot,
    LParen,
    RParen,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, FormulaError> {
    let mut out = Vec::new();
    for (lno, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (lno + 1, i + 1);
            let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line, col });
            match c {
                '#' => break,
                c if c.is_whitespace() => i += 1,
                '.' => {
                    push(&mut out, Tok::Dot);
                    i += 1;
                }
                '(' => {
                    push(&mut out, Tok::LParen);
                    i += 1;
                }
                ')' => {
                    push(&mut out, Tok::RParen);
                    i += 1;
                }
                '!' => {
                    push(&mut out, Tok::Bang);
                    i += 1;
                }
                '&' => {
                    push(&mut out, Tok::Amp);
                    i += 1;
                }
                '|' => {
                    push(&mut out, Tok::Pipe);
                    i += 1;
                }
                '-' if chars.get(i + 1) == Some(&'>') => {
                    push(&mut out, Tok::Arrow);
                    i += 2;
                }
                '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                    push(&mut out, Tok::DoubleArrow);
                    i += 3;
                }
                c if c.is_ascii_alphabetic() => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                }
                other => {
                    return Err(FormulaError::Syntax {
                        line,
                        col,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            }
        }
    }
    let (line, col) = match out.last() {
        Some(t) => (t.line, t.col + 1),
        None => (1, 1),
    };
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    bound: Option<BTreeSet<TraceVar>>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, t: &Token, msg: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, FormulaError> {
        let t = self.bump();
        if t.tok == tok {
            Ok(t)
        } else {
            self.error(&t, format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<HyperFormula, FormulaError> {
        let mut prefix = Vec::new();
        let mut bound = BTreeSet::new();
        loop {
            let q = if self.is_keyword("forall") {
                Quantifier::Forall
            } else if self.is_keyword("exists") {
                Quantifier::Exists
            } else {
                break;
            };
            self.bump();
            let t = self.bump();
            let name = match &t.tok {
                Tok::Ident(s) if !is_reserved(s) && !s.contains('_') => s.clone(),
                Tok::Ident(s) if s.contains('_') => {
                    return self.error(&t, "trace variable names may not contain `_`")
                }
                _ => return self.error(&t, "expected trace variable"),
            };
            let var = TraceVar(name);
            if !bound.insert(var.clone()) {
                return Err(FormulaError::Duplicate {
                    var: var.0,
                    line: t.line,
                    col: t.col,
                });
            }
            self.expect(Tok::Dot, "`.` after quantified variable")?;
            prefix.push((q, var));
        }
        self.bound = Some(bound);
        let body = self.body()?;
        let t = self.peek().clone();
        if t.tok != Tok::Eof {
            return self.error(&t, "unexpected trailing input");
        }
        Ok(HyperFormula::new(prefix, body).expect("parser checks closedness"))
    }

    fn body(&mut self) -> Result<LtlBody, FormulaError> {
        let mut lhs = self.imp()?;
        while self.peek().tok == Tok::DoubleArrow {
            self.bump();
            let rhs = self.imp()?;
            lhs = LtlBody::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<LtlBody, FormulaError> {
        let lhs = self.or()?;
        if self.peek().tok == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            return Ok(LtlBody::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<LtlBody, FormulaError> {
        let mut lhs = self.and()?;
        while self.peek().tok == Tok::Pipe {
            self.bump();
            let rhs = self.and()?;
            lhs = LtlBody::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<LtlBody, FormulaError> {
        let mut lhs = self.temporal()?;
        while self.peek().tok == Tok::Amp {
            self.bump();
            let rhs = self.temporal()?;
            lhs = LtlBody::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<LtlBody, FormulaError> {
        let lhs = self.unary()?;
        let ctor: fn(LtlBody, LtlBody) -> LtlBody = if self.is_keyword("U") {
            LtlBody::until
        } else if self.is_keyword("R") {
            LtlBody::release
        } else if self.is_keyword("W") {
            LtlBody::weak_until
        } else {
            return Ok(lhs);
        };
        self.bump();
        let rhs = self.temporal()?;
        Ok(ctor(lhs, rhs))
    }

    fn unary(&mut self) -> Result<LtlBody, FormulaError> {
        let t = self.bump();
        match &t.tok {
            Tok::Bang => Ok(LtlBody::not(self.unary()?)),
            Tok::LParen => {
                let inner = self.body()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(s) => match s.as_str() {
                "X" => Ok(LtlBody::next(self.unary()?)),
                "G" => Ok(LtlBody::globally(self.unary()?)),
                "F" => Ok(LtlBody::eventually(self.unary()?)),
                "true" => Ok(LtlBody::Const(true)),
                "false" => Ok(LtlBody::Const(false)),
                s if is_reserved(s) => self.error(&t, format!("unexpected keyword `{s}`")),
                s => {
                    let Some((prop, var)) = s.rsplit_once('_') else {
                        return self.error(&t, format!("expected atom `prop_var`, found `{s}`"));
                    };
                    if prop.is_empty() || var.is_empty() {
                        return self.error(&t, format!("malformed atom `{s}`"));
                    }
                    let var = TraceVar(var.to_string());
                    if let Some(bound) = &self.bound {
                        if !bound.contains(&var) {
                            return Err(FormulaError::Unbound {
                                var: var.0,
                                line: t.line,
                                col: t.col,
                            });
                        }
                    }
                    Ok(LtlBody::Atom {
                        prop: prop.to_string(),
                        var,
                    })
                }
            },
            Tok::Eof => self.error(&t, "unexpected end of input"),
            _ => self.error(&t, "expected a formula"),
        }
    }
}

fn is_reserved(s: &str) -> bool {
    matches!(
        s,
        "forall" | "exists" | "true" | "false" | "X" | "G" | "F" | "U" | "R" | "W"
    )
}

/// Parses a closed HyperLTL formula.
pub fn parse_hyperltl(text: &str) -> Result<HyperFormula, FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        bound: None,
    };
    p.formula()
}

/// Parses a quantifier-free body without checking that its variables are bound.
pub fn parse_body(text: &str) -> Result<LtlBody, FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        bound: None,
    };
    let body = p.body()?;
    let t = p.peek().clone();
    if t.tok != Tok::Eof {
        return p.error(&t, "unexpected trailing input");
    }
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(p: &str, v: &str) -> LtlBody {
        LtlBody::atom(p, v)
    }

    #[test]
    fn parses_prefix_and_body() {
        let f = parse_hyperltl("forall p1. exists p2. G (a_p1 <-> a_p2)").unwrap();
        assert_eq!(
            f.prefix(),
            &[
                (Quantifier::Forall, TraceVar::new("p1")),
                (Quantifier::Exists, TraceVar::new("p2"))
            ]
        );
        assert_eq!(
            f.body(),
            &LtlBody::globally(LtlBody::iff(a("a", "p1"), a("a", "p2")))
        );
    }

    #[test]
    fn unbound_variable_reports_position() {
        let err = parse_hyperltl("forall p. X (h_p)\n  & l_q").unwrap_err();
        assert_eq!(
            err,
            FormulaError::Unbound {
                var: "q".into(),
                line: 2,
                col: 5
            }
        );
    }

    #[test]
    fn duplicate_prefix_variable() {
        let err = parse_hyperltl("forall p. exists p. a_p").unwrap_err();
        assert!(matches!(err, FormulaError::Duplicate { ref var, .. } if var == "p"));
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_hyperltl("forall p. (a_p & )").unwrap_err();
        assert!(matches!(err, FormulaError::Syntax { line: 1, col: 18, .. }), "{err:?}");
        let err = parse_hyperltl("forall p a_p").unwrap_err();
        assert!(matches!(err, FormulaError::Syntax { line: 1, col: 10, .. }), "{err:?}");
    }

    #[test]
    fn precedence() {
        // unary > U > & > |
        let b = parse_body("!a_p U b_p & c_p | d_p").unwrap();
        let expected = LtlBody::or(
            LtlBody::and(
                LtlBody::until(LtlBody::not(a("a", "p")), a("b", "p")),
                a("c", "p"),
            ),
            a("d", "p"),
        );
        assert_eq!(b, expected);
    }

    #[test]
    fn until_is_right_associative() {
        let b = parse_body("a_p U b_p U c_p").unwrap();
        assert_eq!(
            b,
            LtlBody::until(a("a", "p"), LtlBody::until(a("b", "p"), a("c", "p")))
        );
    }

    #[test]
    fn comments_and_underscored_props() {
        let f = parse_hyperltl("# GNI-ish\nforall p. # trailing\n G my_prop_p").unwrap();
        assert_eq!(f.body(), &LtlBody::globally(a("my_prop", "p")));
    }

    #[test]
    fn implication_and_iff_levels() {
        let b = parse_body("a_p -> b_p -> c_p <-> d_p").unwrap();
        let expected = LtlBody::iff(
            LtlBody::implies(a("a", "p"), LtlBody::implies(a("b", "p"), a("c", "p"))),
            a("d", "p"),
        );
        assert_eq!(b, expected);
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "forall p. exists q. G (a_p <-> a_q)",
            "exists p. !(a_p U X b_p) R F !G c_p",
            "forall p. true W (false -> a_p)",
            "forall x. !!X a_x",
        ] {
            let f = parse_hyperltl(text).unwrap();
            let g = parse_hyperltl(&f.to_string()).unwrap();
            assert_eq!(f, g, "{text} printed as {f}");
        }
    }
}
