use super::{HyperLtl, Ltl, Quantifier};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Dot,
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let line_no = li + 1;
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), line_no, col));
                continue;
            }
            let rest: String = chars[i..].iter().take(3).collect();
            let (tok, len) = if rest.starts_with("<->") {
                (Tok::Iff, 3)
            } else if rest.starts_with("->") {
                (Tok::Implies, 2)
            } else {
                match c {
                    '!' => (Tok::Not, 1),
                    '&' => (Tok::And, 1),
                    '|' => (Tok::Or, 1),
                    '(' => (Tok::LParen, 1),
                    ')' => (Tok::RParen, 1),
                    '.' => (Tok::Dot, 1),
                    _ => return Err(Error::syntax(line_no, col, format!("unexpected character `{c}`"))),
                }
            };
            out.push((tok, line_no, col));
            i += len;
        }
    }
    let (line, col) = out.last().map_or((1, 1), |&(_, l, c)| (l, c + 1));
    out.push((Tok::End, line, col));
    Ok(out)
}

const KEYWORDS: &[&str] = &["forall", "exists", "true", "false", "X", "G", "F", "U", "W", "R"];

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = self.toks[self.pos];
        (l, c)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(Error::syntax(l, c, msg))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn iff(&mut self) -> Result<Ltl> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implies()?;
            lhs = Ltl::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Ltl> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Ltl::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Ltl> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Ltl::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Ltl> {
        let mut lhs = self.temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.temporal()?;
            lhs = Ltl::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Ltl> {
        let lhs = self.unary()?;
        let op = match self.peek() {
            Tok::Ident(s) if s == "U" || s == "W" || s == "R" => s.clone(),
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.temporal()?;
        Ok(match op.as_str() {
            "U" => Ltl::until(lhs, rhs),
            "W" => Ltl::weak_until(lhs, rhs),
            _ => Ltl::release(lhs, rhs),
        })
    }

    fn unary(&mut self) -> Result<Ltl> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(Ltl::not(self.unary()?));
        }
        for (kw, mk) in [
            ("X", Ltl::next as fn(Ltl) -> Ltl),
            ("G", Ltl::globally),
            ("F", Ltl::finally),
        ] {
            if self.is_kw(kw) {
                self.bump();
                return Ok(mk(self.unary()?));
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Ltl> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Ltl::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Ltl::False)
            }
            Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => self.err(format!("unexpected `{s}`")),
            Tok::Ident(s) => match s.rfind('_') {
                Some(i) if i > 0 && i + 1 < s.len() => {
                    self.bump();
                    Ok(Ltl::atom(&s[..i], &s[i + 1..]))
                }
                _ => self.err(format!("expected an atom of the form ap_var, found `{s}`")),
            },
            Tok::End => self.err("unexpected end of input"),
            t => self.err(format!("unexpected {t:?}")),
        }
    }
}

/// Parses a quantifier-free matrix.
pub fn parse_ltl(text: &str) -> Result<Ltl> {
    let mut lx = Lexer { toks: lex(text)?, pos: 0 };
    let f = lx.iff()?;
    if *lx.peek() != Tok::End {
        return lx.err("trailing input");
    }
    Ok(f)
}

/// Parses `forall x. … exists y. … matrix`.
pub fn parse_hyperltl(text: &str) -> Result<HyperLtl> {
    let mut lx = Lexer { toks: lex(text)?, pos: 0 };
    let mut prefix = Vec::new();
    loop {
        let q = if lx.is_kw("forall") {
            Quantifier::Forall
        } else if lx.is_kw("exists") {
            Quantifier::Exists
        } else {
            break;
        };
        lx.bump();
        let var = match lx.peek().clone() {
            Tok::Ident(v) if !KEYWORDS.contains(&v.as_str()) && !v.contains('_') => v,
            _ => return lx.err("expected a trace variable (identifier without `_`)"),
        };
        lx.bump();
        lx.expect(Tok::Dot, "`.` after quantified variable")?;
        prefix.push((q, var));
    }
    let matrix = lx.iff()?;
    if *lx.peek() != Tok::End {
        return lx.err("trailing input");
    }
    HyperLtl::new(prefix, matrix)
}
