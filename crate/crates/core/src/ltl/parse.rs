//! Recursive-descent parser for the LTL surface syntax.
//!
//! Precedence, tightest first: `! X F G`, then `U R` (right-associative),
//! then `&`, then `|`, then `->` (right-associative).

use super::{Formula, LtlError};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Finally,
    Globally,
    Until,
    Release,
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
            Tok::Next => "`X`".into(),
            Tok::Finally => "`F`".into(),
            Tok::Globally => "`G`".into(),
            Tok::Until => "`U`".into(),
            Tok::Release => "`R`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, LtlError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match word.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                "X" => Tok::Next,
                "F" => Tok::Finally,
                "G" => Tok::Globally,
                "U" => Tok::Until,
                "R" => Tok::Release,
                _ => Tok::Ident(word),
            };
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            });
            continue;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            col += 2;
            Tok::Implies
        } else {
            let t = match c {
                '!' => Tok::Not,
                '&' => Tok::And,
                '|' => Tok::Or,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(LtlError::UnknownToken {
                        line,
                        column: col,
                        token: c.to_string(),
                    })
                }
            };
            i += 1;
            col += 1;
            t
        };
        out.push(Spanned {
            tok,
            line: l0,
            column: c0,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> LtlError {
        let t = &self.toks[self.pos];
        LtlError::Syntax {
            line: t.line,
            column: t.column,
            message,
        }
    }

    fn implication(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, LtlError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, LtlError> {
        let mut lhs = self.binary_temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.binary_temporal()?);
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.unary()?;
        match self.peek() {
            Tok::Until => {
                self.bump();
                Ok(Formula::until(lhs, self.binary_temporal()?))
            }
            Tok::Release => {
                self.bump();
                Ok(Formula::release(lhs, self.binary_temporal()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, LtlError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Next => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Tok::Finally => {
                self.bump();
                Ok(Formula::finally(self.unary()?))
            }
            Tok::Globally => {
                self.bump();
                Ok(Formula::globally(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, LtlError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                if *self.peek() != Tok::RParen {
                    return Err(
                        self.error(format!("expected `)`, found {}", self.peek().describe()))
                    );
                }
                self.bump();
                Ok(f)
            }
            t => Err(self.error(format!("expected a formula, found {}", t.describe()))),
        }
    }
}

/// Parses one LTL formula. `#` starts a comment running to the end of the line.
pub fn parse(text: &str) -> Result<Formula, LtlError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.implication()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!("unexpected {}", p.peek().describe())));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Formula as L;

    fn a(s: &str) -> Formula {
        L::atom(s)
    }

    #[test]
    fn request_table_formula() {
        assert_eq!(
            parse("G (req1 -> X table1)").unwrap(),
            L::globally(L::implies(a("req1"), L::next(a("table1"))))
        );
    }

    #[test]
    fn constants() {
        assert_eq!(parse("true").unwrap(), L::True);
        assert_eq!(parse(" false ").unwrap(), L::False);
    }

    #[test]
    fn associativity() {
        assert_eq!(
            parse("a U b U c").unwrap(),
            L::until(a("a"), L::until(a("b"), a("c")))
        );
        assert_eq!(
            parse("a -> b -> c").unwrap(),
            L::implies(a("a"), L::implies(a("b"), a("c")))
        );
        assert_eq!(
            parse("a | b | c").unwrap(),
            L::or(L::or(a("a"), a("b")), a("c"))
        );
        assert_eq!(
            parse("a & b | c & d").unwrap(),
            L::or(L::and(a("a"), a("b")), L::and(a("c"), a("d")))
        );
    }

    #[test]
    fn unary_binds_tighter_than_until() {
        assert_eq!(
            parse("!a U X b").unwrap(),
            L::until(L::not(a("a")), L::next(a("b")))
        );
        assert_eq!(
            parse("G F p & q").unwrap(),
            L::and(L::globally(L::finally(a("p"))), a("q"))
        );
        assert_eq!(
            parse("!exh2 U office").unwrap(),
            L::until(L::not(a("exh2")), a("office"))
        );
    }

    #[test]
    fn comments_and_lines() {
        assert_eq!(parse("a # trailing\n& b").unwrap(), L::and(a("a"), a("b")));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("a &\n  $"),
            Err(LtlError::UnknownToken {
                line: 2,
                column: 3,
                token: "$".into()
            })
        );
        match parse("(a | b") {
            Err(LtlError::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 7)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("a b"),
            Err(LtlError::Syntax { column: 3, .. })
        ));
        assert!(matches!(parse(""), Err(LtlError::Syntax { .. })));
        assert!(matches!(parse("a - b"), Err(LtlError::UnknownToken { .. })));
    }
}
