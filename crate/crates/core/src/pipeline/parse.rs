//! Text format for automorphisms and the JSON file envelope.
//!
//! ```text
//! automorphism := mapping (sep mapping)*
//! sep          := ',' | ';' | newline
//! mapping      := name '->' word
//! word         := '1' | term ('*'? term)*
//! term         := atom ('^' integer)?
//! atom         := name | NAME | '(' word ')'
//! ```
//!
//! Generators are `a, b, c, ...`; an upper-case letter is the inverse of
//! its lower-case generator. `#` starts a comment running to end of line.
//! Every generator must be mapped exactly once; the rank is the number of
//! mappings.

use serde::{Deserialize, Serialize};

use crate::automorphism::Automorphism;
use crate::error::{CoreError, Result};
use crate::word::{Alphabet, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok {
    Gen(usize, bool),
    Arrow,
    Star,
    Caret,
    Int(i64),
    One,
    Open,
    Close,
    Sep,
}

#[derive(Clone, Copy, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn error(line: usize, column: usize, message: impl Into<String>) -> CoreError {
    CoreError::Parse { line, column, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line, column });
            match c {
                '#' => break,
                c if c.is_whitespace() => {}
                'a'..='z' => push(&mut out, Tok::Gen((c as u8 - b'a') as usize, false)),
                'A'..='Z' => push(&mut out, Tok::Gen((c as u8 - b'A') as usize, true)),
                '-' if chars.get(i + 1) == Some(&'>') => {
                    push(&mut out, Tok::Arrow);
                    i += 1;
                }
                '-' | '0'..='9' => {
                    let start = i;
                    if c == '-' {
                        i += 1;
                    }
                    while chars.get(i).is_some_and(|d| d.is_ascii_digit()) {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    let n: i64 = s.parse().map_err(|_| error(line, column, format!("bad integer {s:?}")))?;
                    push(&mut out, Tok::Int(n));
                    continue;
                }
                '*' => push(&mut out, Tok::Star),
                '^' => push(&mut out, Tok::Caret),
                '(' => push(&mut out, Tok::Open),
                ')' => push(&mut out, Tok::Close),
                ',' | ';' => push(&mut out, Tok::Sep),
                other => return Err(error(line, column, format!("unexpected character {other:?}"))),
            }
            i += 1;
        }
        out.push(Spanned { tok: Tok::Sep, line, column: chars.len() + 1 });
    }
    // a bare `1` is the identity word; elsewhere digits are exponents
    for k in 0..out.len() {
        if out[k].tok == Tok::Int(1) && (k == 0 || out[k - 1].tok != Tok::Caret) {
            out[k].tok = Tok::One;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|s| s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |s| (s.line, s.column))
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(error(l, c, message))
    }

    fn skip_seps(&mut self) {
        while self.peek() == Some(Tok::Sep) {
            self.pos += 1;
        }
    }

    fn starts_term(t: Option<Tok>) -> bool {
        matches!(t, Some(Tok::Gen(..)) | Some(Tok::Open))
    }

    fn word(&mut self) -> Result<Word> {
        if self.peek() == Some(Tok::One) {
            self.pos += 1;
            return Ok(Word::identity());
        }
        if !Self::starts_term(self.peek()) {
            return self.fail("expected a word");
        }
        let mut w = self.term()?;
        loop {
            if self.peek() == Some(Tok::Star) {
                self.pos += 1;
                if self.peek() == Some(Tok::One) {
                    self.pos += 1;
                    continue;
                }
                if !Self::starts_term(self.peek()) {
                    return self.fail("expected a factor after '*'");
                }
            } else if !Self::starts_term(self.peek()) {
                return Ok(w);
            }
            w = w.mul(&self.term()?);
        }
    }

    fn term(&mut self) -> Result<Word> {
        let base = match self.peek() {
            Some(Tok::Gen(i, inv)) => {
                self.pos += 1;
                let l = Letter::gen(i);
                Word::letter(if inv { l.inverse() } else { l })
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let w = self.word()?;
                if self.peek() != Some(Tok::Close) {
                    return self.fail("expected ')'");
                }
                self.pos += 1;
                w
            }
            _ => return self.fail("expected a generator or '('"),
        };
        if self.peek() != Some(Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek() {
            Some(Tok::Int(k)) => {
                self.pos += 1;
                Ok(base.pow(k))
            }
            _ => self.fail("expected an integer exponent"),
        }
    }
}

/// Parses `a->..., b->..., ...` into an automorphism, checking that every
/// generator is mapped once and that the images generate.
pub fn parse_automorphism(text: &str) -> Result<Automorphism> {
    let toks = lex(text)?;
    let end = toks.last().map_or((1, 1), |s| (s.line, s.column));
    let mut p = Parser { toks, pos: 0, end };
    let mut mapped: Vec<(usize, Word, (usize, usize))> = Vec::new();
    p.skip_seps();
    while p.peek().is_some() {
        let at = p.here();
        let Some(Tok::Gen(i, false)) = p.peek() else {
            return p.fail("expected a lower-case generator name");
        };
        if mapped.iter().any(|m| m.0 == i) {
            return p.fail(format!("generator {} mapped twice", (b'a' + i as u8) as char));
        }
        p.pos += 1;
        if p.peek() != Some(Tok::Arrow) {
            return p.fail("expected '->'");
        }
        p.pos += 1;
        let w = p.word()?;
        mapped.push((i, w, at));
        match p.peek() {
            None | Some(Tok::Sep) => p.skip_seps(),
            _ => return p.fail("expected ',' or end of line"),
        }
    }
    let rank = mapped.len();
    if rank == 0 {
        return Err(error(1, 1, "no mappings"));
    }
    let mut images = vec![Word::identity(); rank];
    for (i, w, (line, column)) in mapped {
        if i >= rank {
            return Err(error(line, column, format!("generator {} outside rank {rank}", (b'a' + i as u8) as char)));
        }
        if let Some(m) = w.max_index().filter(|&m| m >= rank) {
            return Err(error(line, column, format!("image uses {} outside rank {rank}", (b'a' + m as u8) as char)));
        }
        images[i] = w;
    }
    Automorphism::new(images)
}

pub fn format_automorphism(phi: &Automorphism) -> String {
    phi.format(&Alphabet::new(phi.rank()))
}

/// On-disk form: `{"rank": 3, "images": "a->a, b->b*a, c->c*b", "comment": ""}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub rank: usize,
    pub images: String,
    #[serde(default)]
    pub comment: String,
}

impl Envelope {
    pub fn new(phi: &Automorphism, comment: &str) -> Envelope {
        Envelope { rank: phi.rank(), images: format_automorphism(phi), comment: comment.into() }
    }

    pub fn automorphism(&self) -> Result<Automorphism> {
        let phi = parse_automorphism(&self.images)?;
        if phi.rank() != self.rank {
            return Err(CoreError::RankMismatch(self.rank, phi.rank()));
        }
        Ok(phi)
    }
}

/// Reads either a JSON envelope or bare text. Positions in errors refer to
/// the JSON document, or to the `images` string inside it.
pub fn parse_input(text: &str) -> Result<Automorphism> {
    if text.trim_start().starts_with('{') {
        let env: Envelope =
            serde_json::from_str(text).map_err(|e| error(e.line(), e.column(), format!("invalid envelope: {e}")))?;
        env.automorphism()
    } else {
        parse_automorphism(text)
    }
}
