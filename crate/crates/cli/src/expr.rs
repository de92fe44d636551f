//! Expression parser for generating functions typed on the command line.
//!
//! Grammar (standard precedence, `^` over unary `-` over `*` `/` over
//! `+` `-`, binary operators left associative):
//!
//! ```text
//! expr   := term  { ('+' | '-') term }
//! term   := factor { ('*' | '/') factor }
//! factor := '-' factor | power
//! power  := atom [ '^' ['-'] integer ]
//! atom   := integer | 't' | 't1' | 't2' | 's' | '(' expr ')'
//! ```
//!
//! Implicit multiplication is not accepted: `s(t+1)` is a syntax error,
//! write `s*(t+1)`. Diagnostics carry the byte offset of the failure.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    T,
    T1,
    T2,
    S,
}

impl Var {
    pub fn as_str(&self) -> &'static str {
        match self {
            Var::T => "t",
            Var::T1 => "t1",
            Var::T2 => "t2",
            Var::S => "s",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(u64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer exponent, possibly negative.
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub position: usize,
    pub expected: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at offset {}: expected {}",
            self.position, self.expected
        )
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Int(u64),
    Var(Var),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next_token(&mut self) -> Result<(Token, usize), SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.bytes.len() {
            return Ok((Token::Eof, start));
        }
        let b = self.bytes[self.pos];
        let simple = match b {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            self.pos += 1;
            return Ok((tok, start));
        }
        if b.is_ascii_digit() {
            let mut value: u64 = 0;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                value = value
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(u64::from(self.bytes[self.pos] - b'0')))
                    .ok_or_else(|| SyntaxError {
                        position: start,
                        expected: "a smaller integer literal".into(),
                    })?;
                self.pos += 1;
            }
            return Ok((Token::Int(value), start));
        }
        if b.is_ascii_alphabetic() {
            let mut end = self.pos;
            while end < self.bytes.len()
                && (self.bytes[end].is_ascii_alphanumeric() || self.bytes[end] == b'_')
            {
                end += 1;
            }
            let ident = std::str::from_utf8(&self.bytes[self.pos..end]).unwrap();
            let var = match ident {
                "t" => Var::T,
                "t1" => Var::T1,
                "t2" => Var::T2,
                "s" => Var::S,
                other => {
                    return Err(SyntaxError {
                        position: start,
                        expected: format!("a variable (t, t1, t2 or s), found `{other}`"),
                    })
                }
            };
            self.pos = end;
            return Ok((Token::Var(var), start));
        }
        Err(SyntaxError {
            position: start,
            expected: "an operator, number, variable or parenthesis".into(),
        })
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    index: usize,
}

impl Parser {
    fn peek(&self) -> &(Token, usize) {
        &self.tokens[self.index]
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.tokens[self.index].clone();
        if self.index + 1 < self.tokens.len() {
            self.index += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().0 {
                Token::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek().0 {
                Token::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Token::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, SyntaxError> {
        if self.peek().0 == Token::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.peek().0 != Token::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if self.peek().0 == Token::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            (Token::Int(k), pos) => {
                let exp = i64::try_from(k).map_err(|_| SyntaxError {
                    position: pos,
                    expected: "a smaller exponent".into(),
                })?;
                Ok(Expr::Pow(
                    Box::new(base),
                    if negative { -exp } else { exp },
                ))
            }
            (_, pos) => Err(SyntaxError {
                position: pos,
                expected: "an integer exponent".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.bump() {
            (Token::Int(k), _) => Ok(Expr::Int(k)),
            (Token::Var(v), _) => Ok(Expr::Var(v)),
            (Token::LParen, open_pos) => {
                let inner = self.expr()?;
                match self.bump() {
                    (Token::RParen, _) => Ok(inner),
                    (Token::Eof, pos) => Err(SyntaxError {
                        position: pos,
                        expected: format!("`)` closing the parenthesis at offset {open_pos}"),
                    }),
                    (_, pos) => Err(SyntaxError {
                        position: pos,
                        expected: "`)`".into(),
                    }),
                }
            }
            (_, pos) => Err(SyntaxError {
                position: pos,
                expected: "a number, variable or `(`".into(),
            }),
        }
    }
}

/// Parses an expression; the whole input must be consumed.
pub fn parse(text: &str) -> Result<Expr, SyntaxError> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    loop {
        let (tok, pos) = lexer.next_token()?;
        let done = tok == Token::Eof;
        tokens.push((tok, pos));
        if done {
            break;
        }
    }
    let mut parser = Parser { tokens, index: 0 };
    let expr = parser.expr()?;
    match parser.peek() {
        (Token::Eof, _) => Ok(expr),
        (_, pos) => Err(SyntaxError {
            position: *pos,
            expected: "an operator or end of input".into(),
        }),
    }
}

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => PREC_ADD,
        Expr::Mul(..) | Expr::Div(..) => PREC_MUL,
        Expr::Neg(..) => PREC_NEG,
        Expr::Pow(..) => PREC_POW,
        Expr::Int(..) | Expr::Var(..) => PREC_ATOM,
    }
}

fn render_prec(e: &Expr, min_prec: u8, out: &mut String) {
    let prec = precedence(e);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match e {
        Expr::Int(k) => out.push_str(&k.to_string()),
        Expr::Var(v) => out.push_str(v.as_str()),
        Expr::Neg(inner) => {
            out.push('-');
            render_prec(inner, PREC_NEG, out);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            render_prec(a, PREC_ADD, out);
            out.push(if matches!(e, Expr::Add(..)) { '+' } else { '-' });
            render_prec(b, PREC_ADD + 1, out);
        }
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            render_prec(a, PREC_MUL, out);
            out.push(if matches!(e, Expr::Mul(..)) { '*' } else { '/' });
            render_prec(b, PREC_MUL + 1, out);
        }
        Expr::Pow(base, exp) => {
            // only atoms may be bases syntactically
            render_prec(base, PREC_ATOM, out);
            out.push('^');
            out.push_str(&exp.to_string());
        }
    }
    if parens {
        out.push(')');
    }
}

/// Renders an expression so that reparsing yields an identical tree.
pub fn render(e: &Expr) -> String {
    let mut out = String::new();
    render_prec(e, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_fair_coin_expression() {
        let e = parse("1/(1-s*(t+1/t)/2)").unwrap();
        // spot-check the spine: a division with numerator 1
        match &e {
            Expr::Div(num, _) => assert_eq!(**num, Expr::Int(1)),
            other => panic!("unexpected shape {other:?}"),
        }
    }

    #[test]
    fn parses_negative_exponents_and_constants() {
        let e = parse("t^-2 + 3/4").unwrap();
        assert_eq!(
            e,
            Expr::Add(
                Box::new(Expr::Pow(Box::new(Expr::Var(Var::T)), -2)),
                Box::new(Expr::Div(
                    Box::new(Expr::Int(3)),
                    Box::new(Expr::Int(4))
                )),
            )
        );
    }

    #[test]
    fn unbalanced_parenthesis_is_reported_at_the_right_offset() {
        let err = parse("1/(1-s").unwrap_err();
        assert_eq!(err.position, 6);
        assert!(err.expected.contains(")"));
    }

    #[test]
    fn implicit_multiplication_is_rejected() {
        let err = parse("s(t+1)").unwrap_err();
        assert_eq!(err.position, 1);
    }

    #[test]
    fn unknown_identifier_is_rejected() {
        let err = parse("1/(1-x)").unwrap_err();
        assert_eq!(err.position, 5);
        assert!(err.expected.contains('x'));
    }

    #[test]
    fn precedence_of_caret_over_unary_minus() {
        // -t^2 parses as -(t^2)
        let e = parse("-t^2").unwrap();
        assert_eq!(
            e,
            Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Var(Var::T)), 2)))
        );
    }

    #[test]
    fn render_round_trips_handwritten_cases() {
        for text in [
            "1/(1-s*(t+1/t)/2)",
            "t^-2+3/4",
            "-(t1+t2)^3*s",
            "1-2*s-(t-1)*s^2",
            "((s))",
            "1/2/3/4",
            "2-3-4",
        ] {
            let ast = parse(text).unwrap();
            let rendered = render(&ast);
            let reparsed = parse(&rendered).unwrap();
            assert_eq!(reparsed, ast, "render of `{text}` was `{rendered}`");
        }
    }
}
