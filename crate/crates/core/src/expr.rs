//! A small scalar expression language over the coordinates `x` and `y`.
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, numeric literals, the
//! constants `pi` and `e`, and the functions `exp log ln sin cos tan sqrt`.
//! `^` binds tighter than unary minus and is right associative.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("unexpected character '{ch}' at offset {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unknown symbol '{name}' at offset {pos}")]
    UnknownSymbol { name: String, pos: usize },
    #[error("unknown function '{name}' at offset {pos}")]
    UnknownFunction { name: String, pos: usize },
    #[error("malformed number '{text}' at offset {pos}")]
    BadNumber { text: String, pos: usize },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unexpected token at offset {pos}")]
    UnexpectedToken { pos: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Sqrt => v.sqrt(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression. Cheap to clone; keeps its source text for serialization.
#[derive(Clone)]
pub struct Expr {
    source: Arc<str>,
    root: Arc<Node>,
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({:?})", &*self.source)
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.expr()?;
        if let Some(t) = p.tokens.get(p.pos) {
            return Err(ExprError::UnexpectedToken { pos: t.pos });
        }
        Ok(Expr {
            source: Arc::from(src),
            root: Arc::new(root),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        eval(&self.root, x, y)
    }

    /// Symbolic partial derivative. The result's source text is a rendering
    /// of the derivative tree.
    pub fn derivative(&self, var: Var) -> Expr {
        let d = simplify(diff(&self.root, var));
        Expr {
            source: Arc::from(render(&d).as_str()),
            root: Arc::new(d),
        }
    }
}

fn eval(n: &Node, x: f64, y: f64) -> f64 {
    match n {
        Node::Num(v) => *v,
        Node::Var(Var::X) => x,
        Node::Var(Var::Y) => y,
        Node::Neg(a) => -eval(a, x, y),
        Node::Add(a, b) => eval(a, x, y) + eval(b, x, y),
        Node::Sub(a, b) => eval(a, x, y) - eval(b, x, y),
        Node::Mul(a, b) => eval(a, x, y) * eval(b, x, y),
        Node::Div(a, b) => eval(a, x, y) / eval(b, x, y),
        Node::Pow(a, b) => {
            let base = eval(a, x, y);
            match **b {
                Node::Num(k) if k.fract() == 0.0 && k.abs() <= 64.0 => base.powi(k as i32),
                _ => base.powf(eval(b, x, y)),
            }
        }
        Node::Call(f, a) => f.apply(eval(a, x, y)),
    }
}

fn num(v: f64) -> Box<Node> {
    Box::new(Node::Num(v))
}

fn diff(n: &Node, v: Var) -> Node {
    use Node::*;
    match n {
        Num(_) => Num(0.0),
        Var(w) => Num(if *w == v { 1.0 } else { 0.0 }),
        Neg(a) => Neg(Box::new(diff(a, v))),
        Add(a, b) => Add(Box::new(diff(a, v)), Box::new(diff(b, v))),
        Sub(a, b) => Sub(Box::new(diff(a, v)), Box::new(diff(b, v))),
        Mul(a, b) => Add(
            Box::new(Mul(Box::new(diff(a, v)), b.clone())),
            Box::new(Mul(a.clone(), Box::new(diff(b, v)))),
        ),
        Div(a, b) => Div(
            Box::new(Sub(
                Box::new(Mul(Box::new(diff(a, v)), b.clone())),
                Box::new(Mul(a.clone(), Box::new(diff(b, v)))),
            )),
            Box::new(Pow(b.clone(), num(2.0))),
        ),
        Pow(a, b) => {
            if let Num(k) = **b {
                // k a^(k-1) a'
                Mul(
                    Box::new(Mul(num(k), Box::new(Pow(a.clone(), num(k - 1.0))))),
                    Box::new(diff(a, v)),
                )
            } else {
                // a^b (b' ln a + b a'/a)
                Mul(
                    Box::new(n.clone()),
                    Box::new(Add(
                        Box::new(Mul(Box::new(diff(b, v)), Box::new(Call(Func::Log, a.clone())))),
                        Box::new(Div(
                            Box::new(Mul(b.clone(), Box::new(diff(a, v)))),
                            a.clone(),
                        )),
                    )),
                )
            }
        }
        Call(f, a) => {
            let inner = Box::new(diff(a, v));
            let outer = match f {
                Func::Exp => n.clone(),
                Func::Log => Div(num(1.0), a.clone()),
                Func::Sin => Call(Func::Cos, a.clone()),
                Func::Cos => Neg(Box::new(Call(Func::Sin, a.clone()))),
                Func::Tan => Add(num(1.0), Box::new(Pow(Box::new(n.clone()), num(2.0)))),
                Func::Sqrt => Div(num(0.5), Box::new(n.clone())),
            };
            Mul(Box::new(outer), inner)
        }
    }
}

fn simplify(n: Node) -> Node {
    use Node::*;
    let is = |n: &Node, v: f64| matches!(n, Num(k) if *k == v);
    match n {
        Neg(a) => match simplify(*a) {
            Num(k) => Num(-k),
            a => Neg(Box::new(a)),
        },
        Add(a, b) => {
            let (a, b) = (simplify(*a), simplify(*b));
            if is(&a, 0.0) {
                b
            } else if is(&b, 0.0) {
                a
            } else {
                Add(Box::new(a), Box::new(b))
            }
        }
        Sub(a, b) => {
            let (a, b) = (simplify(*a), simplify(*b));
            if is(&b, 0.0) {
                a
            } else if is(&a, 0.0) {
                Neg(Box::new(b))
            } else {
                Sub(Box::new(a), Box::new(b))
            }
        }
        Mul(a, b) => {
            let (a, b) = (simplify(*a), simplify(*b));
            if is(&a, 0.0) || is(&b, 0.0) {
                Num(0.0)
            } else if is(&a, 1.0) {
                b
            } else if is(&b, 1.0) {
                a
            } else {
                Mul(Box::new(a), Box::new(b))
            }
        }
        Div(a, b) => {
            let (a, b) = (simplify(*a), simplify(*b));
            if is(&a, 0.0) {
                Num(0.0)
            } else {
                Div(Box::new(a), Box::new(b))
            }
        }
        Pow(a, b) => {
            let (a, b) = (simplify(*a), simplify(*b));
            if is(&b, 1.0) {
                a
            } else if is(&b, 0.0) {
                Num(1.0)
            } else {
                Pow(Box::new(a), Box::new(b))
            }
        }
        Call(f, a) => Call(f, Box::new(simplify(*a))),
        other => other,
    }
}

fn render(n: &Node) -> String {
    match n {
        Node::Num(v) => {
            if *v < 0.0 {
                format!("({v:?})")
            } else {
                format!("{v:?}")
            }
        }
        Node::Var(Var::X) => "x".into(),
        Node::Var(Var::Y) => "y".into(),
        Node::Neg(a) => format!("(-{})", render(a)),
        Node::Add(a, b) => format!("({} + {})", render(a), render(b)),
        Node::Sub(a, b) => format!("({} - {})", render(a), render(b)),
        Node::Mul(a, b) => format!("({} * {})", render(a), render(b)),
        Node::Div(a, b) => format!("({} / {})", render(a), render(b)),
        Node::Pow(a, b) => format!("({} ^ {})", render(a), render(b)),
        Node::Call(f, a) => format!("{}({})", f.name(), render(a)),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ExprError> {
    let bytes: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '.') {
                i += 1;
            }
            // exponent part
            if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = bytes[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| ExprError::BadNumber {
                text: text.clone(),
                pos: start,
            })?;
            out.push(Token {
                tok: Tok::Num(v),
                pos: start,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(bytes[start..i].iter().collect()),
                pos: start,
            });
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => return Err(ExprError::UnexpectedChar { ch: c, pos: start }),
            };
            out.push(Token { tok, pos: start });
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Result<Token, ExprError> {
        let t = self.tokens.get(self.pos).cloned().ok_or(ExprError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Node::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let t = self.next()?;
        match t.tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(Tok::LParen) = self.peek() {
                    let f = Func::from_name(&name).ok_or(ExprError::UnknownFunction {
                        name: name.clone(),
                        pos: t.pos,
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                match name.as_str() {
                    "x" => Ok(Node::Var(Var::X)),
                    "y" => Ok(Node::Var(Var::Y)),
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "e" => Ok(Node::Num(std::f64::consts::E)),
                    _ => Err(ExprError::UnknownSymbol {
                        name,
                        pos: t.pos,
                    }),
                }
            }
            _ => Err(ExprError::UnexpectedToken { pos: t.pos }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        match self.next() {
            Ok(Token {
                tok: Tok::RParen, ..
            }) => Ok(()),
            Ok(t) => Err(ExprError::UnexpectedToken { pos: t.pos }),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64, y: f64) -> f64 {
        Expr::parse(s).unwrap().eval(x, y)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", 0.0, 0.0), 7.0);
        assert_eq!(ev("-2^2", 0.0, 0.0), -4.0);
        assert_eq!(ev("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(ev("(1 - x) / y", 3.0, 2.0), -1.0);
        assert_eq!(ev("2e-1 * 10", 0.0, 0.0), 2.0);
    }

    #[test]
    fn functions_and_constants() {
        let v = ev("ln(cos(x)) - log(cos(y))", 1.0, 0.0);
        assert!((v - 1f64.cos().ln()).abs() < 1e-15);
        assert!((ev("sqrt(4) + exp(0) + sin(pi/2)", 0.0, 0.0) - 4.0).abs() < 1e-15);
        assert!((ev("e", 0.0, 0.0) - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn unknown_symbol_is_reported() {
        let err = Expr::parse("x + z").unwrap_err();
        assert_eq!(
            err,
            ExprError::UnknownSymbol {
                name: "z".into(),
                pos: 4
            }
        );
        assert!(matches!(
            Expr::parse("foo(x)"),
            Err(ExprError::UnknownFunction { .. })
        ));
        assert!(matches!(Expr::parse("x +"), Err(ExprError::UnexpectedEnd)));
        assert!(matches!(Expr::parse("x $ y"), Err(ExprError::UnexpectedChar { .. })));
        assert!(matches!(Expr::parse("(x"), Err(ExprError::UnexpectedEnd)));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let srcs = [
            "2 / (1 - x^2 - y^2)",
            "exp(0.3*x) * cos(y) + sqrt(1 + x*x)",
            "x^y + tan(0.5*x*y)",
            "log(2 + sin(x)) / (3 + y^3)",
        ];
        let h = 1e-6;
        for s in srcs {
            let e = Expr::parse(s).unwrap();
            let (dx, dy) = (e.derivative(Var::X), e.derivative(Var::Y));
            for &(x, y) in &[(0.2, 0.3), (0.45, -0.1), (0.7, 0.05)] {
                let fx = (e.eval(x + h, y) - e.eval(x - h, y)) / (2.0 * h);
                let fy = (e.eval(x, y + h) - e.eval(x, y - h)) / (2.0 * h);
                assert!((dx.eval(x, y) - fx).abs() < 1e-6 * (1.0 + fx.abs()), "{s} d/dx");
                assert!((dy.eval(x, y) - fy).abs() < 1e-6 * (1.0 + fy.abs()), "{s} d/dy");
            }
        }
    }

    #[test]
    fn evaluation_is_bit_reproducible() {
        let e = Expr::parse("exp(x*y) / (1 + x^2)").unwrap();
        let a = e.eval(0.123, 0.456).to_bits();
        let b = e.clone().eval(0.123, 0.456).to_bits();
        assert_eq!(a, b);
    }
}
