use super::{BinOp, Constant, Expr, Func, ALLOWED_IDENTIFIERS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}; allowed names are {}", ALLOWED_IDENTIFIERS.join(", "))]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                Some(*offset)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn describe(tok: &Token) -> String {
    match tok {
        Token::Num(v) => format!("number {v}"),
        Token::Ident(s) => format!("identifier `{s}`"),
        Token::Op(c) => format!("`{c}`"),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
        Token::End => "end of input".into(),
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        offset,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if &text[start..i] == "." {
                return Err(syntax(start, "malformed number"));
            }
            // exponent only if digits follow, so that `2*e` style input stays unambiguous
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let value: f64 = text[start..i]
                .parse()
                .map_err(|_| syntax(start, "malformed number"))?;
            if !value.is_finite() {
                return Err(syntax(start, "number out of range"));
            }
            out.push((start, Token::Num(value)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Ident(text[start..i].to_string())));
        } else {
            let tok = match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => Token::Op(c as char),
                b'(' => Token::LParen,
                b')' => Token::RParen,
                _ => {
                    let ch = text[start..].chars().next().unwrap_or('?');
                    return Err(syntax(start, format!("unexpected character `{ch}`")));
                }
            };
            i += 1;
            out.push((start, tok));
        }
    }
    out.push((text.len(), Token::End));
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn bump(&mut self) -> (usize, Token) {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Op('+') => BinOp::Add,
                Token::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Op('*') => BinOp::Mul,
                Token::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Token::Op('-') = self.peek() {
            self.bump();
            return Ok(Expr::negate(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if let Token::Op('^') = self.peek() {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (offset, tok) = self.bump();
        match tok {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect_rparen(offset)?;
                Ok(inner)
            }
            Token::Ident(name) => match name.as_str() {
                "t" => Ok(Expr::Var),
                "pi" => Ok(Expr::Const(Constant::Pi)),
                "e" => Ok(Expr::Const(Constant::E)),
                _ => match Func::from_name(&name) {
                    Some(func) => {
                        if *self.peek() != Token::LParen {
                            return Err(syntax(
                                self.offset(),
                                format!("function `{name}` requires a parenthesized argument"),
                            ));
                        }
                        let (open, _) = self.bump();
                        let arg = self.expr()?;
                        self.expect_rparen(open)?;
                        Ok(Expr::call(func, arg))
                    }
                    None => Err(ParseError::UnknownIdentifier { offset, name }),
                },
            },
            other => Err(syntax(
                offset,
                format!(
                    "expected a number, `t`, a function or `(`, found {}",
                    describe(&other)
                ),
            )),
        }
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), ParseError> {
        match self.peek() {
            Token::RParen => {
                self.bump();
                Ok(())
            }
            other => Err(syntax(
                self.offset(),
                format!(
                    "expected `)` closing the `(` at byte {open}, found {}",
                    describe(other)
                ),
            )),
        }
    }
}

/// Parses `text` into an expression tree.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    let ast = parser.expr()?;
    match parser.peek() {
        Token::End => Ok(ast),
        other => Err(syntax(
            parser.offset(),
            format!("unexpected {} after complete expression", describe(other)),
        )),
    }
}
