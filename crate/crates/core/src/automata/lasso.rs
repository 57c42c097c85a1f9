//! Ultimately periodic words `stem · loopω` over `Σⁿ`.

use std::fmt;

use thiserror::Error;

use super::guard::Letter;
use super::mask_of;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("loop of a lasso word must be nonempty")]
    EmptyLoop,
    #[error("letter uses propositions outside the alphabet")]
    LetterOutOfRange,
    #[error("malformed word: {0}")]
    Syntax(String),
    #[error("unknown proposition `{0}`")]
    UnknownProp(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoWord {
    arity: usize,
    aps: Vec<String>,
    stem: Vec<Letter>,
    cycle: Vec<Letter>,
}

impl LassoWord {
    pub fn new(
        arity: usize,
        aps: Vec<String>,
        stem: Vec<Letter>,
        cycle: Vec<Letter>,
    ) -> Result<LassoWord, WordError> {
        if cycle.is_empty() {
            return Err(WordError::EmptyLoop);
        }
        let mask = mask_of(arity * aps.len());
        if stem.iter().chain(&cycle).any(|l| l & !mask != 0) {
            return Err(WordError::LetterOutOfRange);
        }
        Ok(LassoWord {
            arity,
            aps,
            stem,
            cycle,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn aps(&self) -> &[String] {
        &self.aps
    }

    pub fn stem(&self) -> &[Letter] {
        &self.stem
    }

    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    /// Number of distinct positions `stem + loop`.
    pub fn period_end(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Successor of position `i` among the `period_end()` position classes.
    pub fn next_pos(&self, i: usize) -> usize {
        if i + 1 < self.period_end() {
            i + 1
        } else {
            self.stem.len()
        }
    }

    /// The same ω-word with the loop unrolled once and moved into the stem.
    pub fn unrolled(&self) -> LassoWord {
        let mut stem = self.stem.clone();
        stem.extend(&self.cycle);
        let mut cycle = self.cycle.clone();
        cycle.extend(&self.cycle);
        LassoWord {
            stem,
            cycle,
            ..self.clone()
        }
    }

    /// Trace `i` as an arity-1 word over the same AP list.
    pub fn component(&self, i: usize) -> LassoWord {
        let m = self.aps.len();
        let pick = |l: &Letter| (l >> (i * m)) & mask_of(m);
        LassoWord {
            arity: 1,
            aps: self.aps.clone(),
            stem: self.stem.iter().map(pick).collect(),
            cycle: self.cycle.iter().map(pick).collect(),
        }
    }

    /// Pointwise product of arity-1 words over a common AP list.
    pub fn zip(words: &[LassoWord], aps: &[String]) -> LassoWord {
        let words: Vec<LassoWord> = words
            .iter()
            .map(|w| {
                assert_eq!(w.arity, 1, "zip takes single traces");
                w.over_aps(aps)
            })
            .collect();
        let stem_len = words.iter().map(|w| w.stem.len()).max().unwrap_or(0);
        let loop_len = words.iter().map(|w| w.cycle.len()).fold(1, lcm);
        let m = aps.len();
        let letter = |pos: usize| {
            words
                .iter()
                .enumerate()
                .fold(0u128, |acc, (i, w)| acc | w.letter_at(pos) << (i * m))
        };
        LassoWord {
            arity: words.len(),
            aps: aps.to_vec(),
            stem: (0..stem_len).map(letter).collect(),
            cycle: (stem_len..stem_len + loop_len).map(letter).collect(),
        }
    }

    /// Re-expresses the word over another AP list. Names missing from the
    /// word's list are absent; names missing from `aps` are dropped.
    pub fn over_aps(&self, aps: &[String]) -> LassoWord {
        if aps == self.aps.as_slice() {
            return self.clone();
        }
        let m_old = self.aps.len();
        let m_new = aps.len();
        let src: Vec<Option<usize>> = aps.iter().map(|a| self.aps.iter().position(|b| b == a)).collect();
        let remap = |l: &Letter| {
            let mut out = 0u128;
            for i in 0..self.arity {
                for (j, s) in src.iter().enumerate() {
                    if let Some(k) = s {
                        if l >> (i * m_old + k) & 1 == 1 {
                            out |= 1 << (i * m_new + j);
                        }
                    }
                }
            }
            out
        };
        LassoWord {
            arity: self.arity,
            aps: aps.to_vec(),
            stem: self.stem.iter().map(remap).collect(),
            cycle: self.cycle.iter().map(remap).collect(),
        }
    }

    /// Renders one letter as `{a@0,b@1}`.
    pub fn letter_text(&self, l: Letter) -> String {
        let m = self.aps.len();
        let mut parts = Vec::new();
        for i in 0..self.arity {
            for (j, a) in self.aps.iter().enumerate() {
                if l >> (i * m + j) & 1 == 1 {
                    parts.push(format!("{a}@{i}"));
                }
            }
        }
        format!("{{{}}}", parts.join(","))
    }

    /// Parses the `STEM: ... LOOP: ...` form over a given alphabet.
    pub fn parse(text: &str, arity: usize, aps: &[String]) -> Result<LassoWord, WordError> {
        let text = text.trim();
        let rest = text
            .strip_prefix("STEM:")
            .ok_or_else(|| WordError::Syntax("expected `STEM:`".into()))?;
        let (stem_text, loop_text) = rest
            .split_once("LOOP:")
            .ok_or_else(|| WordError::Syntax("expected `LOOP:`".into()))?;
        let m = aps.len();
        let letters = |s: &str| -> Result<Vec<Letter>, WordError> {
            let mut out = Vec::new();
            let mut rest = s.trim();
            while !rest.is_empty() {
                let body = rest
                    .strip_prefix('{')
                    .ok_or_else(|| WordError::Syntax(format!("expected `{{` at `{rest}`")))?;
                let close = body
                    .find('}')
                    .ok_or_else(|| WordError::Syntax("unclosed `{`".into()))?;
                let mut l = 0u128;
                for item in body[..close].split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (name, idx) = item
                        .rsplit_once('@')
                        .ok_or_else(|| WordError::Syntax(format!("expected `ap@index`, got `{item}`")))?;
                    let i: usize = idx
                        .parse()
                        .map_err(|_| WordError::Syntax(format!("bad trace index in `{item}`")))?;
                    let j = aps
                        .iter()
                        .position(|a| a == name)
                        .ok_or_else(|| WordError::UnknownProp(name.to_string()))?;
                    if i >= arity {
                        return Err(WordError::LetterOutOfRange);
                    }
                    l |= 1 << (i * m + j);
                }
                out.push(l);
                rest = body[close + 1..].trim_start();
            }
            Ok(out)
        };
        LassoWord::new(arity, aps.to_vec(), letters(stem_text)?, letters(loop_text)?)
    }
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("STEM:")?;
        for l in &self.stem {
            write!(f, " {}", self.letter_text(*l))?;
        }
        f.write_str(" LOOP:")?;
        for l in &self.cycle {
            write!(f, " {}", self.letter_text(*l))?;
        }
        Ok(())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aps() -> Vec<String> {
        vec!["a".into(), "b".into()]
    }

    #[test]
    fn display_and_parse_round_trip() {
        let w = LassoWord::new(2, aps(), vec![0b0101], vec![0b1000, 0]).unwrap();
        let text = w.to_string();
        assert_eq!(text, "STEM: {a@0,a@1} LOOP: {b@1} {}");
        assert_eq!(LassoWord::parse(&text, 2, &aps()).unwrap(), w);
    }

    #[test]
    fn zip_aligns_periods() {
        let u = LassoWord::new(1, aps(), vec![], vec![0b01, 0b00]).unwrap();
        let v = LassoWord::new(1, aps(), vec![0b10], vec![0b10, 0b00, 0b00]).unwrap();
        let z = LassoWord::zip(&[u.clone(), v.clone()], &aps());
        assert_eq!(z.cycle().len(), 6);
        for pos in 0..20 {
            assert_eq!(z.component(0).letter_at(pos), u.letter_at(pos));
            assert_eq!(z.component(1).letter_at(pos), v.letter_at(pos));
        }
    }

    #[test]
    fn empty_loop_rejected() {
        assert_eq!(LassoWord::new(1, aps(), vec![1], vec![]), Err(WordError::EmptyLoop));
    }
}
