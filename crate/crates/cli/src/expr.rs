//! Arithmetic expressions for problem data: `f`, `phi` and scalar
//! coefficients are written as formulas in `x` (and `y` in 2D).
//!
//! Grammar: numbers, `x`, `y`, unary minus, `+ - * / ^`, the functions
//! `sin cos exp abs` and the two-argument `min max`, and parentheses.
//! `^` is right-associative and binds tighter than unary minus, which
//! binds tighter than `* /`, which bind tighter than `+ -`.
//!
//! Parse errors carry the byte offset and what was expected there.
//! Printing a parsed expression and parsing it again reproduces the same
//! tree.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Min,
    Max,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Y,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Parse failure with its byte offset in the source string.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

/// Runtime evaluation failure; these are the only inputs on which a parsed
/// expression is not total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(Token, usize)>, ParseError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                return Ok(out);
            }
            let start = lx.pos;
            let c = lx.src[lx.pos];
            let token = match c {
                b'+' => {
                    lx.pos += 1;
                    Token::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Token::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Token::Star
                }
                b'/' => {
                    lx.pos += 1;
                    Token::Slash
                }
                b'^' => {
                    lx.pos += 1;
                    Token::Caret
                }
                b'(' => {
                    lx.pos += 1;
                    Token::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Token::RParen
                }
                b',' => {
                    lx.pos += 1;
                    Token::Comma
                }
                b'0'..=b'9' => lx.number(start)?,
                c if c.is_ascii_alphabetic() || c == b'_' => lx.ident(start),
                other => {
                    return Err(ParseError {
                        offset: start,
                        message: format!("unexpected character '{}'", other as char),
                    })
                }
            };
            out.push((token, start));
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self, start: usize) -> Result<Token, ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] | 32) == b'e' {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len()
                && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // 'e' belongs to a following identifier, not this number
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Token::Num).map_err(|_| ParseError {
            offset: start,
            message: format!("malformed number '{text}'"),
        })
    }

    fn ident(&mut self, start: usize) -> Token {
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        Token::Ident(
            std::str::from_utf8(&self.src[start..self.pos])
                .expect("ascii")
                .to_string(),
        )
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|&(_, o)| o)
            .unwrap_or(self.end)
    }

    fn expect(&mut self, want: Token, name: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(&format!("expected {name}"))),
        }
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError {
            offset: self.offset(),
            message: message.to_string(),
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    let rhs = self.product()?;
                    lhs = Expr::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    let rhs = self.product()?;
                    lhs = Expr::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expr::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expr::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Token::Minus) = self.peek() {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        self.power_tail(base)
    }

    fn power_tail(&mut self, base: Expr) -> Result<Expr, ParseError> {
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            let exponent = self.exponent_operand()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    /// Right-associative exponent; a sign here belongs to the exponent.
    fn exponent_operand(&mut self) -> Result<Expr, ParseError> {
        if let Some(Token::Minus) = self.peek() {
            self.pos += 1;
            let inner = self.exponent_operand()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                let offset = self.offset();
                self.pos += 1;
                match name.as_str() {
                    "x" => Ok(Expr::X),
                    "y" => Ok(Expr::Y),
                    "sin" | "cos" | "exp" | "abs" | "min" | "max" => {
                        let func = match name.as_str() {
                            "sin" => Func::Sin,
                            "cos" => Func::Cos,
                            "exp" => Func::Exp,
                            "abs" => Func::Abs,
                            "min" => Func::Min,
                            _ => Func::Max,
                        };
                        self.expect(Token::LParen, "'(' after function name")?;
                        let mut args = vec![self.sum()?];
                        while let Some(Token::Comma) = self.peek() {
                            self.pos += 1;
                            args.push(self.sum()?);
                        }
                        self.expect(Token::RParen, "')'")?;
                        if args.len() != func.arity() {
                            return Err(ParseError {
                                offset,
                                message: format!(
                                    "{} takes {} argument(s), got {}",
                                    func.name(),
                                    func.arity(),
                                    args.len()
                                ),
                            });
                        }
                        Ok(Expr::Call(func, args))
                    }
                    other => Err(ParseError {
                        offset,
                        message: format!("unknown identifier '{other}'"),
                    }),
                }
            }
            _ => Err(self.error("expected a number, variable, function or '('")),
        }
    }
}

impl Expr {
    /// Parse a formula; errors carry the byte offset of the offending token.
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let tokens = Lexer::tokenize(src)?;
        let end = src.len();
        let mut parser = Parser {
            tokens,
            pos: 0,
            end,
        };
        let expr = parser.sum()?;
        if parser.pos < parser.tokens.len() {
            return Err(ParseError {
                offset: parser.offset(),
                message: "trailing input after the expression".into(),
            });
        }
        Ok(expr)
    }

    /// Evaluate at a point; total except for division by zero and zero to a
    /// negative power.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Y => y,
            Expr::Neg(e) => -e.eval(x, y)?,
            Expr::Bin(op, a, b) => {
                let a = a.eval(x, y)?;
                let b = b.eval(x, y)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a == 0.0 && b < 0.0 {
                            return Err(EvalError::ZeroToNegativePower);
                        }
                        // exact small integer powers
                        if b.fract() == 0.0 && b.abs() <= 64.0 {
                            a.powi(b as i32)
                        } else {
                            a.powf(b)
                        }
                    }
                }
            }
            Expr::Call(func, args) => {
                let a = args[0].eval(x, y)?;
                match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Abs => a.abs(),
                    Func::Min => a.min(args[1].eval(x, y)?),
                    Func::Max => a.max(args[1].eval(x, y)?),
                }
            }
        })
    }

    /// Whether the second coordinate appears anywhere.
    pub fn uses_y(&self) -> bool {
        match self {
            Expr::Y => true,
            Expr::Num(_) | Expr::X => false,
            Expr::Neg(e) => e.uses_y(),
            Expr::Bin(_, a, b) => a.uses_y() || b.uses_y(),
            Expr::Call(_, args) => args.iter().any(Expr::uses_y),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::X => write!(f, "x"),
            Expr::Y => write!(f, "y"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                // a negated power base needs its own parentheses, since the
                // sign would otherwise swallow the whole power
                if *op == BinOp::Pow && matches!(**a, Expr::Neg(_)) {
                    write!(f, "(({a}) {sym} {b})")
                } else {
                    write!(f, "({a} {sym} {b})")
                }
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
