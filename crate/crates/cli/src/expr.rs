//! Arithmetic expressions over sample coordinates, e.g. `x1^3 - abs(x2)/2`.
//!
//! Grammar (`^` binds tighter than unary minus and is right associative):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | var | func '(' expr (',' expr)* ')' | '(' expr ')'
//! var   := 'x1' ... 'xd'   ('x' is accepted when d = 1)
//! func  := 'abs' | 'min' | 'max'
//! ```

use chebycert::Scalar;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message} at column {column}")]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-integer exponent {0} is not supported in exact arithmetic")]
    FractionalPower(String),
    #[error("expression produced a non-finite value")]
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Abs,
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq)]
enum Node<T> {
    Num(T),
    Var(usize),
    Neg(Box<Node<T>>),
    Add(Box<Node<T>>, Box<Node<T>>),
    Sub(Box<Node<T>>, Box<Node<T>>),
    Mul(Box<Node<T>>, Box<Node<T>>),
    Div(Box<Node<T>>, Box<Node<T>>),
    Pow(Box<Node<T>>, Box<Node<T>>),
    Call(Func, Vec<Node<T>>),
}

/// A parsed expression in `dimension` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr<T> {
    root: Node<T>,
    dimension: usize,
}

impl<T: Scalar> Expr<T> {
    pub fn parse(src: &str, dimension: usize) -> Result<Self, ParseError> {
        let mut p = Parser {
            chars: src.chars().collect(),
            pos: 0,
            dimension,
        };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error(format!("unexpected '{}'", p.chars[p.pos])));
        }
        Ok(Expr { root, dimension })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn eval(&self, point: &[T]) -> Result<T, EvalError> {
        let v = eval(&self.root, point)?;
        if !T::EXACT && !v.as_f64().is_finite() {
            return Err(EvalError::NonFinite);
        }
        Ok(v)
    }
}

fn eval<T: Scalar>(node: &Node<T>, x: &[T]) -> Result<T, EvalError> {
    Ok(match node {
        Node::Num(v) => v.clone(),
        Node::Var(k) => x[*k].clone(),
        Node::Neg(a) => -eval(a, x)?,
        Node::Add(a, b) => eval(a, x)? + eval(b, x)?,
        Node::Sub(a, b) => eval(a, x)? - eval(b, x)?,
        Node::Mul(a, b) => eval(a, x)? * eval(b, x)?,
        Node::Div(a, b) => {
            let d = eval(b, x)?;
            if d.is_zero() {
                return Err(EvalError::DivisionByZero);
            }
            eval(a, x)? / d
        }
        Node::Pow(a, b) => power(eval(a, x)?, eval(b, x)?)?,
        Node::Call(f, args) => {
            let mut vals = args.iter().map(|a| eval(a, x));
            let first = vals.next().expect("calls have at least one argument")?;
            match f {
                Func::Abs => first.abs(),
                Func::Min => vals.try_fold(first, |acc, v| Ok(T::min_of(acc, v?)))?,
                Func::Max => vals.try_fold(first, |acc, v| Ok(T::max_of(acc, v?)))?,
            }
        }
    })
}

fn power<T: Scalar>(base: T, exp: T) -> Result<T, EvalError> {
    let e = exp.as_f64();
    if e.fract() == 0.0 && e.abs() <= u32::MAX as f64 && T::from_i64(e as i64) == exp {
        let p = base.powi(e.abs() as u32);
        if e >= 0.0 {
            return Ok(p);
        }
        if p.is_zero() {
            return Err(EvalError::DivisionByZero);
        }
        return Ok(T::one() / p);
    }
    if T::EXACT {
        return Err(EvalError::FractionalPower(exp.to_string()));
    }
    Ok(T::from_f64(base.as_f64().powf(e)))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    dimension: usize,
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr<T: Scalar>(&mut self) -> Result<Node<T>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term<T: Scalar>(&mut self) -> Result<Node<T>, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary<T: Scalar>(&mut self) -> Result<Node<T>, ParseError> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.eat('+');
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom<T: Scalar>(&mut self) -> Result<Node<T>, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.name(),
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }

    fn number<T: Scalar>(&mut self) -> Result<Node<T>, ParseError> {
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || *c == '.')
        {
            self.pos += 1;
        }
        // exponent part, only if followed by digits
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            let mut end = self.pos + 1;
            if matches!(self.chars.get(end), Some('+' | '-')) {
                end += 1;
            }
            if self.chars.get(end).is_some_and(|c| c.is_ascii_digit()) {
                self.pos = end;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        T::parse(&text).map(Node::Num).ok_or(ParseError {
            column: start + 1,
            message: format!("invalid number '{text}'"),
        })
    }

    fn name<T: Scalar>(&mut self) -> Result<Node<T>, ParseError> {
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        let func = match name.as_str() {
            "abs" => Some(Func::Abs),
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            _ => None,
        };
        if let Some(f) = func {
            if !self.eat('(') {
                return Err(self.error(format!("expected '(' after {name}")));
            }
            let mut args = vec![self.expr()?];
            while self.eat(',') {
                args.push(self.expr()?);
            }
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            if f == Func::Abs && args.len() != 1 {
                return Err(ParseError {
                    column: start + 1,
                    message: "abs takes one argument".into(),
                });
            }
            return Ok(Node::Call(f, args));
        }
        let unknown = || ParseError {
            column: start + 1,
            message: format!("unknown name '{name}'"),
        };
        if name == "x" && self.dimension == 1 {
            return Ok(Node::Var(0));
        }
        let k: usize = name
            .strip_prefix('x')
            .and_then(|s| s.parse().ok())
            .ok_or_else(unknown)?;
        if k == 0 || k > self.dimension {
            return Err(ParseError {
                column: start + 1,
                message: format!(
                    "variable '{name}' out of range for dimension {}",
                    self.dimension
                ),
            });
        }
        Ok(Node::Var(k - 1))
    }
}
