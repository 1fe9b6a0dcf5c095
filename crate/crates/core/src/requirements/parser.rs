use thiserror::Error;

use super::{Anchor, Direction, Metric, RankingCriterion, SocialConstraint, SocialRequirement};
use crate::key::Key;

/// Positions are byte offsets into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("range error at {position}: {message}")]
    Range { position: usize, message: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::Range { position, .. } => *position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(String),
    Minus,
    LParen,
    RParen,
    Comma,
    Quoted(String),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("'{w}'"),
            Tok::Int(d) => format!("integer {d}"),
            Tok::Minus => "'-'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Quoted(s) => format!("\"{s}\""),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' | ')' | ',' | '-' => {
                chars.next();
                out.push((
                    pos,
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        ',' => Tok::Comma,
                        _ => Tok::Minus,
                    },
                ));
            }
            '"' => {
                chars.next();
                let mut body = String::new();
                loop {
                    match chars.next() {
                        Some((_, '"')) => break,
                        Some((_, ch)) => body.push(ch),
                        None => {
                            return Err(ParseError::Syntax {
                                position: pos,
                                expected: "closing '\"'".into(),
                                found: "end of input".into(),
                            })
                        }
                    }
                }
                out.push((pos, Tok::Quoted(body)));
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    digits.push(d);
                    chars.next();
                }
                out.push((pos, Tok::Int(digits)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    word.push(d.to_ascii_lowercase());
                    chars.next();
                }
                out.push((pos, Tok::Word(word)));
            }
            other => {
                return Err(ParseError::Syntax {
                    position: pos,
                    expected: "a keyword, integer, quoted key or punctuation".into(),
                    found: format!("{other:?}"),
                })
            }
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

const CONSTRAINTS: &str = "within_hops, collaborated_with, min_degree or connected_to";
const METRICS: &str = "hops, degree, closeness or betweenness";

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.pos(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        })
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&tok.describe())
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            self.fail(&format!("'{}'", w.to_uppercase()))
        }
    }

    fn query(&mut self) -> Result<SocialRequirement, ParseError> {
        let mut constraints = Vec::new();
        if !matches!(self.peek(), Tok::End) && !self.is_word("rank") {
            constraints.push(self.constraint()?);
            while self.is_word("and") {
                self.bump();
                constraints.push(self.constraint()?);
            }
        }
        let mut ranking = Vec::new();
        if self.is_word("rank") {
            self.bump();
            self.expect_word("by")?;
            ranking.push(self.rank()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                ranking.push(self.rank()?);
            }
        }
        if *self.peek() != Tok::End {
            let expected = if ranking.is_empty() {
                "'AND', 'RANK BY' or end of input"
            } else {
                "',' or end of input"
            };
            return self.fail(expected);
        }
        Ok(SocialRequirement::new(constraints, ranking))
    }

    fn constraint(&mut self) -> Result<SocialConstraint, ParseError> {
        let name = match self.peek() {
            Tok::Word(w) => w.clone(),
            _ => return self.fail(CONSTRAINTS),
        };
        let c = match name.as_str() {
            "within_hops" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let anchor = self.actor()?;
                self.expect(Tok::Comma)?;
                let k = self.int()?;
                SocialConstraint::WithinHops { anchor, k }
            }
            "collaborated_with" => {
                self.bump();
                self.expect(Tok::LParen)?;
                SocialConstraint::CollaboratedWith { anchor: self.actor()? }
            }
            "min_degree" => {
                self.bump();
                self.expect(Tok::LParen)?;
                SocialConstraint::MinDegree { n: self.int()? }
            }
            "connected_to" => {
                self.bump();
                self.expect(Tok::LParen)?;
                SocialConstraint::ConnectedTo { anchor: self.actor()? }
            }
            _ => return self.fail(CONSTRAINTS),
        };
        self.expect(Tok::RParen)?;
        Ok(c)
    }

    fn rank(&mut self) -> Result<RankingCriterion, ParseError> {
        let name = match self.peek() {
            Tok::Word(w) => w.clone(),
            _ => return self.fail(METRICS),
        };
        let metric = match name.as_str() {
            "hops" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let anchor = self.actor()?;
                self.expect(Tok::RParen)?;
                Metric::HopsTo(anchor)
            }
            "degree" => {
                self.bump();
                Metric::Degree
            }
            "closeness" => {
                self.bump();
                Metric::Closeness
            }
            "betweenness" => {
                self.bump();
                Metric::Betweenness
            }
            _ => return self.fail(METRICS),
        };
        let direction = if self.is_word("asc") {
            self.bump();
            Direction::Asc
        } else if self.is_word("desc") {
            self.bump();
            Direction::Desc
        } else {
            metric.default_direction()
        };
        Ok(RankingCriterion { metric, direction })
    }

    fn actor(&mut self) -> Result<Anchor, ParseError> {
        match self.peek().clone() {
            Tok::Word(w) if w == "consumer" => {
                self.bump();
                Ok(Anchor::Consumer)
            }
            Tok::Quoted(text) => match Key::parse(&text) {
                Ok(k) => {
                    self.bump();
                    Ok(Anchor::Actor(k))
                }
                Err(_) => self.fail("a quoted UUID key"),
            },
            _ => self.fail("'consumer' or a quoted key"),
        }
    }

    fn int(&mut self) -> Result<u32, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(digits) => {
                self.bump();
                digits.parse::<u32>().map_err(|_| ParseError::Range {
                    position: pos,
                    message: format!("{digits} exceeds the largest supported value {}", u32::MAX),
                })
            }
            Tok::Minus => {
                self.bump();
                if let Tok::Int(digits) = self.peek().clone() {
                    Err(ParseError::Range {
                        position: pos,
                        message: format!("-{digits} is negative; expected a non-negative integer"),
                    })
                } else {
                    self.fail("a non-negative integer")
                }
            }
            _ => self.fail("a non-negative integer"),
        }
    }
}

/// Parses the textual social requirement language. Never panics: any input
/// yields either a requirement or a positioned [`ParseError`].
pub fn parse_social_requirement(text: &str) -> Result<SocialRequirement, ParseError> {
    let toks = lex(text)?;
    Parser { toks, at: 0 }.query()
}
