use super::LtlBody;

/// Negation normal form over `{const, atom, !atom, &, |, X, U, R}`.
///
/// Derived operators are expanded here: `F a = true U a`, `G a = false R a`,
/// `a W b = b R (a | b)`, and implications/biconditionals via `&`/`|`.
pub fn to_nnf(body: &LtlBody) -> LtlBody {
    nnf(body, false)
}

fn nnf(body: &LtlBody, neg: bool) -> LtlBody {
    use LtlBody::*;
    match body {
        Const(b) => Const(*b != neg),
        Atom { .. } => {
            if neg {
                LtlBody::not(body.clone())
            } else {
                body.clone()
            }
        }
        Not(a) => nnf(a, !neg),
        And(a, b) => {
            if neg {
                LtlBody::or(nnf(a, true), nnf(b, true))
            } else {
                LtlBody::and(nnf(a, false), nnf(b, false))
            }
        }
        Or(a, b) => {
            if neg {
                LtlBody::and(nnf(a, true), nnf(b, true))
            } else {
                LtlBody::or(nnf(a, false), nnf(b, false))
            }
        }
        Implies(a, b) => {
            if neg {
                LtlBody::and(nnf(a, false), nnf(b, true))
            } else {
                LtlBody::or(nnf(a, true), nnf(b, false))
            }
        }
        Iff(a, b) => {
            // a <-> b = (a & b) | (!a & !b);  !(a <-> b) = (a & !b) | (!a & b)
            let (pa, na) = (nnf(a, false), nnf(a, true));
            let (pb, nb) = (nnf(b, false), nnf(b, true));
            if neg {
                LtlBody::or(LtlBody::and(pa, nb), LtlBody::and(na, pb))
            } else {
                LtlBody::or(LtlBody::and(pa, pb), LtlBody::and(na, nb))
            }
        }
        Next(a) => LtlBody::next(nnf(a, neg)),
        Eventually(a) => {
            if neg {
                LtlBody::release(Const(false), nnf(a, true))
            } else {
                LtlBody::until(Const(true), nnf(a, false))
            }
        }
        Globally(a) => {
            if neg {
                LtlBody::until(Const(true), nnf(a, true))
            } else {
                LtlBody::release(Const(false), nnf(a, false))
            }
        }
        Until(a, b) => {
            if neg {
                LtlBody::release(nnf(a, true), nnf(b, true))
            } else {
                LtlBody::until(nnf(a, false), nnf(b, false))
            }
        }
        Release(a, b) => {
            if neg {
                LtlBody::until(nnf(a, true), nnf(b, true))
            } else {
                LtlBody::release(nnf(a, false), nnf(b, false))
            }
        }
        WeakUntil(a, b) => {
            // a W b = b R (a | b);  !(a W b) = !b U (!a & !b)
            if neg {
                LtlBody::until(nnf(b, true), LtlBody::and(nnf(a, true), nnf(b, true)))
            } else {
                LtlBody::release(nnf(b, false), LtlBody::or(nnf(a, false), nnf(b, false)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_body;

    fn nnf_of(s: &str) -> LtlBody {
        to_nnf(&parse_body(s).unwrap())
    }

    #[test]
    fn until_dualizes_to_release() {
        assert_eq!(nnf_of("!(a_p U b_p)"), parse_body("!a_p R !b_p").unwrap());
    }

    #[test]
    fn double_negation() {
        assert_eq!(nnf_of("!!a_p"), parse_body("a_p").unwrap());
    }

    #[test]
    fn next_is_self_dual() {
        assert_eq!(nnf_of("!X a_p"), parse_body("X !a_p").unwrap());
    }

    #[test]
    fn derived_operators_expand() {
        assert_eq!(nnf_of("G a_p"), parse_body("false R a_p").unwrap());
        assert_eq!(nnf_of("!F a_p"), parse_body("false R !a_p").unwrap());
        assert_eq!(nnf_of("!true"), LtlBody::Const(false));
        for s in ["a_p W b_p", "!(a_p <-> X b_q)", "a_p -> G !b_p", "!(a_p W (b_p -> c_p))"] {
            assert!(nnf_of(s).is_nnf(), "{s}");
        }
    }
}
