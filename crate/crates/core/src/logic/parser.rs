//! Recursive-descent parser for the expression syntax.
//!
//! ```text
//! iff     := implies ( "<->" implies )*
//! implies := or ( "->" implies )?
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := "!" unary | atom
//! atom    := IDENT | "true" | "false" | "(" iff ")"
//! IDENT   := [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! Whitespace and newlines separate tokens; `#` starts a comment running to
//! the end of the line.

use thiserror::Error;

use super::formula::{Formula, VariablePool};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty formula")]
    Empty,
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            *i += len;
            *col += len;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '!' => push(Tok::Not, 1, &mut i, &mut col),
            '&' => push(Tok::And, 1, &mut i, &mut col),
            '|' => push(Tok::Or, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Implies, 2, &mut i, &mut col),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(Tok::Iff, 3, &mut i, &mut col)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word),
                };
                push(tok, j - i, &mut i, &mut col);
            }
            other => return Err(syntax(line, col, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'p> {
    toks: Vec<Spanned>,
    pos: usize,
    pool: &'p mut VariablePool,
}

impl Parser<'_> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implies()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let first = self.and()?;
        let mut rest = Vec::new();
        while self.eat(&Tok::Or) {
            rest.push(self.and()?);
        }
        Ok(if rest.is_empty() {
            first
        } else {
            rest.insert(0, first);
            Formula::Or(rest)
        })
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let first = self.unary()?;
        let mut rest = Vec::new();
        while self.eat(&Tok::And) {
            rest.push(self.unary()?);
        }
        Ok(if rest.is_empty() {
            first
        } else {
            rest.insert(0, first);
            Formula::And(rest)
        })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Not) {
            return Ok(self.unary()?.not());
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(name) => Ok(Formula::Var(self.pool.intern(&name))),
            Tok::True => Ok(Formula::True),
            Tok::False => Ok(Formula::False),
            Tok::LParen => {
                let inner = self.iff()?;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return Err(syntax(
                        close.line,
                        close.column,
                        format!("expected `)`, found {}", close.tok.describe()),
                    ));
                }
                Ok(inner)
            }
            other => Err(syntax(
                t.line,
                t.column,
                format!("expected operand, found {}", other.describe()),
            )),
        }
    }
}

/// Parses `text`, registering new variable names into `pool` in order of first appearance.
pub fn parse_formula_in(text: &str, pool: &mut VariablePool) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    if toks.len() == 1 {
        return Err(ParseError::Empty);
    }
    let mut p = Parser { toks, pos: 0, pool };
    let f = p.iff()?;
    let t = p.peek();
    if t.tok != Tok::Eof {
        return Err(syntax(
            t.line,
            t.column,
            format!("unexpected {} after complete formula", t.tok.describe()),
        ));
    }
    Ok(f)
}

/// Parses `text` into a formula over a fresh pool.
pub fn parse_formula(text: &str) -> Result<(Formula, VariablePool), ParseError> {
    let mut pool = VariablePool::new();
    let f = parse_formula_in(text, &mut pool)?;
    Ok((f, pool))
}
