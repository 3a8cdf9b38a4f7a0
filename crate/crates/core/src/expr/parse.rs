use std::fmt;

use crate::error::ParseError;

/// Variables of the function language: `t` and `u0` .. `u9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    U(u8),
}

impl Var {
    pub const COUNT: usize = 11;

    pub fn index(self) -> usize {
        match self {
            Var::T => 0,
            Var::U(i) => 1 + i as usize,
        }
    }

    pub fn from_index(i: usize) -> Option<Var> {
        match i {
            0 => Some(Var::T),
            1..=10 => Some(Var::U((i - 1) as u8)),
            _ => None,
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        if name == "t" {
            return Some(Var::T);
        }
        let rest = name.strip_prefix('u')?;
        if rest.len() == 1 {
            let d = rest.as_bytes()[0];
            if d.is_ascii_digit() {
                return Some(Var::U(d - b'0'));
            }
        }
        None
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T => write!(f, "t"),
            Var::U(i) => write!(f, "u{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
    Min,
    Max,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn is_variadic(self) -> bool {
        matches!(self, Func::Min | Func::Max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Expression tree node. Equality ignores source offsets.
#[derive(Debug, Clone)]
pub struct Node {
    pub kind: NodeKind,
    /// Byte offset of the node in the source it was parsed from.
    pub offset: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    pub fn new(kind: NodeKind) -> Node {
        Node { kind, offset: 0 }
    }

    pub fn visit_vars(&self, out: &mut Vec<Var>) {
        match &self.kind {
            NodeKind::Num(_) => {}
            NodeKind::Var(v) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            NodeKind::Neg(x) => x.visit_vars(out),
            NodeKind::Bin(_, l, r) => {
                l.visit_vars(out);
                r.visit_vars(out);
            }
            NodeKind::Call(_, args) => args.iter().for_each(|a| a.visit_vars(out)),
        }
    }

    fn prec(&self) -> u8 {
        match &self.kind {
            NodeKind::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            NodeKind::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            NodeKind::Neg(_) => 3,
            NodeKind::Num(x) if x.is_sign_negative() => 3,
            NodeKind::Bin(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn write_wrapped(&self, f: &mut fmt::Formatter<'_>, wrap: bool) -> fmt::Result {
        if wrap {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            NodeKind::Num(x) => write!(f, "{x}"),
            NodeKind::Var(v) => write!(f, "{v}"),
            NodeKind::Neg(x) => {
                write!(f, "-")?;
                x.write_wrapped(f, x.prec() < 3)
            }
            NodeKind::Bin(op, l, r) => {
                let (lw, rw) = match op {
                    BinOp::Add | BinOp::Sub => (false, r.prec() <= 1),
                    BinOp::Mul | BinOp::Div => (l.prec() < 2, r.prec() <= 2),
                    // base must be atomic; exponent is a factor
                    BinOp::Pow => (l.prec() < 5, r.prec() < 3),
                };
                l.write_wrapped(f, lw)?;
                write!(f, "{}", op.symbol())?;
                r.write_wrapped(f, rw)
            }
            NodeKind::Call(func, args) => {
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

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
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
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                expected: vec!["number".into()],
                found: format!("'{text}'"),
            })?;
            if !value.is_finite() {
                return Err(ParseError {
                    offset: start,
                    expected: vec!["finite number".into()],
                    found: format!("'{text}'"),
                });
            }
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if b"+-*/^(),".contains(&c) {
            out.push((Tok::Sym(c as char), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: i,
                expected: vec!["token".into()],
                found: format!("'{ch}'"),
            });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

const OPERAND: [&str; 4] = ["number", "identifier", "'('", "'-'"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let offset = self.bump().1;
            let rhs = self.term()?;
            lhs = Node {
                kind: NodeKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                offset,
            };
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            let offset = self.bump().1;
            let rhs = self.factor()?;
            lhs = Node {
                kind: NodeKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                offset,
            };
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            let offset = self.bump().1;
            let inner = self.factor()?;
            return Ok(Node {
                kind: NodeKind::Neg(Box::new(inner)),
                offset,
            });
        }
        let base = self.base()?;
        if *self.peek() == Tok::Sym('^') {
            let offset = self.bump().1;
            let exp = self.factor()?;
            return Ok(Node {
                kind: NodeKind::Bin(BinOp::Pow, Box::new(base), Box::new(exp)),
                offset,
            });
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Node, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Node {
                    kind: NodeKind::Num(x),
                    offset,
                })
            }
            Tok::Sym('(') => {
                self.bump();
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error(&["')'", "operator"]));
                }
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(v) = Var::from_name(&name) {
                    self.bump();
                    return Ok(Node {
                        kind: NodeKind::Var(v),
                        offset,
                    });
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(self.error(&["variable (t, u0..u9)", "function name"]));
                };
                self.bump();
                if !self.eat('(') {
                    return Err(self.error(&["'('"]));
                }
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                if !self.eat(')') {
                    return Err(self.error(&["','", "')'"]));
                }
                let arity_ok = if func.is_variadic() {
                    args.len() >= 2
                } else {
                    args.len() == 1
                };
                if !arity_ok {
                    return Err(ParseError {
                        offset,
                        expected: vec![if func.is_variadic() {
                            format!("at least 2 arguments to {}", func.name())
                        } else {
                            format!("1 argument to {}", func.name())
                        }],
                        found: format!("{} arguments", args.len()),
                    });
                }
                Ok(Node {
                    kind: NodeKind::Call(func, args),
                    offset,
                })
            }
            _ => Err(self.error(&OPERAND)),
        }
    }
}

pub fn parse_node(src: &str) -> Result<Node, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let node = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(node)
}
