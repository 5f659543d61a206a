//! Tiny function-spec language for the command line.
//!
//! A spec is one of:
//! * `const:<v>`: the constant `v`;
//! * `poly:<c0,c1,...>`: the polynomial `c0 + c1 t + c2 t^2 + ...`;
//! * `sin`, `cos`, `exp`: the named function of `t`;
//! * an arithmetic expression in `t` (and `x` for right-hand sides), with
//!   `+ - * / ^`, parentheses, numeric literals, and calls of the three
//!   named functions, e.g. `(2*t^(0.5)) - (x - t*(1-t))`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Sin,
    Cos,
    Exp,
}

impl Builtin {
    fn apply(self, v: f64) -> f64 {
        match self {
            Builtin::Sin => v.sin(),
            Builtin::Cos => v.cos(),
            Builtin::Exp => v.exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Node {
    Num(f64),
    T,
    X,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Builtin, Box<Node>),
}

impl Node {
    fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::T => t,
            Node::X => x,
            Node::Neg(a) => -a.eval(t, x),
            Node::Add(a, b) => a.eval(t, x) + b.eval(t, x),
            Node::Sub(a, b) => a.eval(t, x) - b.eval(t, x),
            Node::Mul(a, b) => a.eval(t, x) * b.eval(t, x),
            Node::Div(a, b) => a.eval(t, x) / b.eval(t, x),
            Node::Pow(a, b) => a.eval(t, x).powf(b.eval(t, x)),
            Node::Call(f, a) => f.apply(a.eval(t, x)),
        }
    }

    fn uses_x(&self) -> bool {
        match self {
            Node::Num(_) | Node::T => false,
            Node::X => true,
            Node::Neg(a) | Node::Call(_, a) => a.uses_x(),
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => a.uses_x() || b.uses_x(),
        }
    }
}

/// A parsed function spec, evaluable at `(t, x)`. Specs without `x` simply
/// ignore the second argument.
#[derive(Debug, Clone, PartialEq)]
pub enum FuncSpec {
    Const(f64),
    Poly(Vec<f64>),
    Named(Builtin),
    Expr(Node),
}

impl FuncSpec {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            FuncSpec::Const(v) => *v,
            FuncSpec::Poly(coeffs) => coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c),
            FuncSpec::Named(f) => f.apply(t),
            FuncSpec::Expr(node) => node.eval(t, x),
        }
    }

    pub fn uses_x(&self) -> bool {
        matches!(self, FuncSpec::Expr(node) if node.uses_x())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub message: String,
    /// 1-based column in the spec string.
    pub column: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at column {}", self.message, self.column)
    }
}

/// Parses a function spec string.
pub fn parse_spec(src: &str) -> Result<FuncSpec, ParseError> {
    if let Some(rest) = src.strip_prefix("const:") {
        let v: f64 = rest.trim().parse().map_err(|_| ParseError {
            message: format!("invalid constant '{}'", rest.trim()),
            column: 7,
        })?;
        return Ok(FuncSpec::Const(v));
    }
    if let Some(rest) = src.strip_prefix("poly:") {
        let mut coeffs = Vec::new();
        let mut column = 6;
        for part in rest.split(',') {
            let c: f64 = part.trim().parse().map_err(|_| ParseError {
                message: format!("invalid coefficient '{}'", part.trim()),
                column,
            })?;
            coeffs.push(c);
            column += part.len() + 1;
        }
        return Ok(FuncSpec::Poly(coeffs));
    }
    match src.trim() {
        "sin" => return Ok(FuncSpec::Named(Builtin::Sin)),
        "cos" => return Ok(FuncSpec::Named(Builtin::Cos)),
        "exp" => return Ok(FuncSpec::Named(Builtin::Exp)),
        _ => {}
    }
    let tokens = tokenize(src)?;
    let mut parser = Parser { tokens, pos: 0 };
    let node = parser.expression()?;
    if parser.pos < parser.tokens.len() {
        let tok = &parser.tokens[parser.pos];
        return Err(ParseError {
            message: format!("unexpected token '{}'", tok.text),
            column: tok.column,
        });
    }
    Ok(FuncSpec::Expr(node))
}

#[derive(Debug, Clone)]
struct Token {
    text: String,
    column: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if "+-*/^()".contains(c) {
            tokens.push(Token {
                text: c.to_string(),
                column,
            });
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            tokens.push(Token {
                text: chars[start..i].iter().collect(),
                column: start + 1,
            });
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            tokens.push(Token {
                text: chars[start..i].iter().collect(),
                column: start + 1,
            });
        } else {
            return Err(ParseError {
                message: format!("unexpected character '{c}'"),
                column,
            });
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn end_column(&self) -> usize {
        self.tokens
            .last()
            .map(|t| t.column + t.text.len())
            .unwrap_or(1)
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.peek().map(|t| t.text.as_str()) == Some(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> Result<(), ParseError> {
        if self.eat(text) {
            Ok(())
        } else {
            match self.peek() {
                Some(tok) => Err(ParseError {
                    message: format!("expected '{}', found '{}'", text, tok.text),
                    column: tok.column,
                }),
                None => Err(ParseError {
                    message: format!("expected '{text}', found end of input"),
                    column: self.end_column(),
                }),
            }
        }
    }

    fn expression(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat("+") {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat("-") {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat("*") {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat("/") {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat("-") {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.eat("^") {
            // right-associative exponent
            let exponent = self.unary()?;
            Ok(Node::Pow(Box::new(base), Box::new(exponent)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let tok = match self.peek() {
            Some(tok) => tok.clone(),
            None => {
                return Err(ParseError {
                    message: "unexpected end of input".into(),
                    column: self.end_column(),
                })
            }
        };
        if tok.text == "(" {
            self.pos += 1;
            let inner = self.expression()?;
            self.expect(")")?;
            return Ok(inner);
        }
        if tok
            .text
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit() || c == '.')
        {
            self.pos += 1;
            let v: f64 = tok.text.parse().map_err(|_| ParseError {
                message: format!("invalid number '{}'", tok.text),
                column: tok.column,
            })?;
            return Ok(Node::Num(v));
        }
        match tok.text.as_str() {
            "t" => {
                self.pos += 1;
                Ok(Node::T)
            }
            "x" => {
                self.pos += 1;
                Ok(Node::X)
            }
            "sin" | "cos" | "exp" => {
                self.pos += 1;
                let f = match tok.text.as_str() {
                    "sin" => Builtin::Sin,
                    "cos" => Builtin::Cos,
                    _ => Builtin::Exp,
                };
                self.expect("(")?;
                let arg = self.expression()?;
                self.expect(")")?;
                Ok(Node::Call(f, Box::new(arg)))
            }
            _ => Err(ParseError {
                message: format!("unknown identifier '{}'", tok.text),
                column: tok.column,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_spec() {
        let f = parse_spec("const:2.5").unwrap();
        assert_eq!(f.eval(0.3, 9.0), 2.5);
        assert!(!f.uses_x());
    }

    #[test]
    fn polynomial_spec() {
        // poly:0,1,-1 is t - t^2: 0.25 at t = 0.5
        let f = parse_spec("poly:0,1,-1").unwrap();
        assert!((f.eval(0.5, 0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn named_functions() {
        assert!((parse_spec("sin").unwrap().eval(1.0, 0.0) - 1.0f64.sin()).abs() < 1e-15);
        assert!((parse_spec("exp").unwrap().eval(0.3, 0.0) - 0.3f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn manufactured_expression() {
        // the manufactured right-hand side for alpha = 3/2
        let f = parse_spec("(2*t^(0.5)) - (x - t*(1-t))").unwrap();
        assert!(f.uses_x());
        for &(t, x) in &[(0.25f64, 0.1), (0.5, -2.0), (0.9, 3.3)] {
            let expected = 2.0 * t.sqrt() - (x - t * (1.0 - t));
            assert!((f.eval(t, x) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn operator_precedence() {
        let f = parse_spec("1+2*3^2").unwrap();
        assert_eq!(f.eval(0.0, 0.0), 19.0);
        let g = parse_spec("-t^2").unwrap();
        assert_eq!(g.eval(3.0, 0.0), -9.0);
        let h = parse_spec("2^-1").unwrap();
        assert_eq!(h.eval(0.0, 0.0), 0.5);
    }

    #[test]
    fn call_and_nesting() {
        let f = parse_spec("sin(3.141592653589793*t)/2").unwrap();
        assert!((f.eval(0.5, 0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn errors_carry_columns() {
        let err = parse_spec("2*foo").unwrap_err();
        assert!(err.message.contains("foo"));
        assert_eq!(err.column, 3);
        let err = parse_spec("(1+2").unwrap_err();
        assert!(err.message.contains("')'"));
        let err = parse_spec("1+*2").unwrap_err();
        assert_eq!(err.column, 3);
        let err = parse_spec("const:abc").unwrap_err();
        assert!(err.message.contains("abc"));
    }
}
