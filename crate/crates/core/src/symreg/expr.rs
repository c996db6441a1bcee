use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Deepest tree any operator may produce; a lone leaf has depth 0.
pub const MAX_DEPTH: usize = 17;

const PROTECT: f64 = 1e-3;
const EXP_CLAMP: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Log,
    Sqrt,
    Exp,
    Neg,
}

impl Op {
    pub const ALL: [Op; 8] = [
        Op::Add,
        Op::Sub,
        Op::Mul,
        Op::Div,
        Op::Log,
        Op::Sqrt,
        Op::Exp,
        Op::Neg,
    ];

    pub fn arity(self) -> usize {
        match self {
            Op::Add | Op::Sub | Op::Mul | Op::Div => 2,
            Op::Log | Op::Sqrt | Op::Exp | Op::Neg => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Mul => "mul",
            Op::Div => "div",
            Op::Log => "log",
            Op::Sqrt => "sqrt",
            Op::Exp => "exp",
            Op::Neg => "neg",
        }
    }

    fn from_name(name: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|op| op.name() == name)
    }

    /// Protected application. Results are clamped into the finite range.
    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        let r = match self {
            Op::Add => a + b,
            Op::Sub => a - b,
            Op::Mul => a * b,
            Op::Div => {
                if b.abs() <= PROTECT {
                    1.0
                } else {
                    a / b
                }
            }
            Op::Log => {
                if a.abs() > PROTECT {
                    a.abs().ln()
                } else {
                    0.0
                }
            }
            Op::Sqrt => a.abs().sqrt(),
            Op::Exp => a.clamp(-EXP_CLAMP, EXP_CLAMP).exp(),
            Op::Neg => -a,
        };
        r.clamp(-f64::MAX, f64::MAX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Op(Op),
    /// Zero-based input column.
    Var(usize),
    Const(f64),
}

impl Node {
    pub fn arity(self) -> usize {
        match self {
            Node::Op(op) => op.arity(),
            _ => 0,
        }
    }
}

/// Expression tree stored in prefix order.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    nodes: Vec<Node>,
}

impl Expr {
    /// Checks arity, constant finiteness and the depth limit.
    pub fn new(nodes: Vec<Node>) -> Result<Self> {
        let mut need = 1usize;
        for (i, node) in nodes.iter().enumerate() {
            if need == 0 {
                return Err(Error::ExprParse(format!("trailing nodes after position {i}")));
            }
            if let Node::Const(c) = node {
                if !c.is_finite() {
                    return Err(Error::ExprParse(format!("non-finite constant {c}")));
                }
            }
            need = need - 1 + node.arity();
        }
        if need != 0 || nodes.is_empty() {
            return Err(Error::ExprParse("incomplete expression".into()));
        }
        let e = Expr { nodes };
        if e.depth() > MAX_DEPTH {
            return Err(Error::ExprParse(format!(
                "depth {} exceeds {MAX_DEPTH}",
                e.depth()
            )));
        }
        Ok(e)
    }

    /// Builds from nodes the caller guarantees to be well formed.
    pub(crate) fn from_valid(nodes: Vec<Node>) -> Self {
        debug_assert!(Expr::new(nodes.clone()).is_ok());
        Expr { nodes }
    }

    pub fn constant(c: f64) -> Self {
        Expr {
            nodes: vec![Node::Const(c)],
        }
    }

    pub fn var(index: usize) -> Self {
        Expr {
            nodes: vec![Node::Var(index)],
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// One past the last node of the subtree rooted at `start`.
    pub fn subtree_end(&self, start: usize) -> usize {
        let mut need = 1;
        let mut i = start;
        while need > 0 {
            need = need - 1 + self.nodes[i].arity();
            i += 1;
        }
        i
    }

    pub fn depth(&self) -> usize {
        let mut pending: Vec<usize> = Vec::new();
        let mut depth = 0;
        let mut max = 0;
        for node in &self.nodes {
            max = max.max(depth);
            let arity = node.arity();
            if arity > 0 {
                pending.push(arity);
                depth += 1;
            } else {
                while let Some(top) = pending.last_mut() {
                    *top -= 1;
                    if *top > 0 {
                        break;
                    }
                    pending.pop();
                    depth -= 1;
                }
            }
        }
        max
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Var(i) => Some(*i),
                _ => None,
            })
            .max()
    }

    pub fn eval(&self, row: &[f64]) -> Result<f64> {
        if let Some(i) = self.max_var().filter(|&i| i >= row.len()) {
            return Err(Error::UnboundVariable {
                index: i,
                available: row.len(),
            });
        }
        Ok(self.eval_unchecked(row, &mut Vec::with_capacity(self.nodes.len())))
    }

    /// Evaluation without the bounds check; `stack` is scratch space.
    pub(crate) fn eval_unchecked(&self, row: &[f64], stack: &mut Vec<f64>) -> f64 {
        stack.clear();
        for node in self.nodes.iter().rev() {
            let v = match *node {
                Node::Const(c) => c,
                Node::Var(i) => row[i],
                Node::Op(op) if op.arity() == 1 => {
                    let a = stack.pop().expect("well-formed");
                    op.apply(a, 0.0)
                }
                Node::Op(op) => {
                    let a = stack.pop().expect("well-formed");
                    let b = stack.pop().expect("well-formed");
                    op.apply(a, b)
                }
            };
            stack.push(v);
        }
        stack.pop().expect("well-formed")
    }

    /// Nested call form, e.g. `mul(add(log(x2), 0.500), x1)`.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::new();
        self.write_sexpr(0, &mut out);
        out
    }

    fn write_sexpr(&self, at: usize, out: &mut String) -> usize {
        match self.nodes[at] {
            Node::Const(c) => {
                out.push_str(&format_const(c));
                at + 1
            }
            Node::Var(i) => {
                out.push_str(&format!("x{}", i + 1));
                at + 1
            }
            Node::Op(op) => {
                out.push_str(op.name());
                out.push('(');
                let mut next = at + 1;
                for k in 0..op.arity() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    next = self.write_sexpr(next, out);
                }
                out.push(')');
                next
            }
        }
    }

    /// Conventional notation, e.g. `(log(x2) + 0.500) * x1`.
    pub fn to_infix(&self) -> String {
        self.infix_at(0).0
    }

    /// Returns the text, its binding strength and the next node index.
    fn infix_at(&self, at: usize) -> (String, u8, usize) {
        const ATOM: u8 = 4;
        match self.nodes[at] {
            Node::Const(c) => (format_const(c), if c < 0.0 { 3 } else { ATOM }, at + 1),
            Node::Var(i) => (format!("x{}", i + 1), ATOM, at + 1),
            Node::Op(Op::Neg) => {
                let (a, p, next) = self.infix_at(at + 1);
                let a = if p < 3 || a.starts_with('-') { format!("({a})") } else { a };
                (format!("-{a}"), 3, next)
            }
            Node::Op(op) if op.arity() == 1 => {
                let (a, _, next) = self.infix_at(at + 1);
                (format!("{}({a})", op.name()), ATOM, next)
            }
            Node::Op(op) => {
                let (sym, prec) = match op {
                    Op::Add => ("+", 1),
                    Op::Sub => ("-", 1),
                    Op::Mul => ("*", 2),
                    _ => ("/", 2),
                };
                let (l, lp, mid) = self.infix_at(at + 1);
                let (r, rp, next) = self.infix_at(mid);
                let l = if lp < prec { format!("({l})") } else { l };
                let r = if rp <= prec { format!("({r})") } else { r };
                (format!("{l} {sym} {r}"), prec, next)
            }
        }
    }
}

/// Three decimals when that is exact, otherwise the shortest string that
/// parses back to the same value.
fn format_const(c: f64) -> String {
    let short = format!("{c:.3}");
    if short.parse::<f64>() == Ok(c) {
        short
    } else {
        format!("{c:?}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

impl FromStr for Expr {
    type Err = Error;

    /// Parses the nested call form written by [`Expr::to_sexpr`].
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
            nodes: Vec::new(),
        };
        p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Expr::new(p.nodes)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nodes: Vec<Node>,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::ExprParse(format!("{msg} at byte {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", byte as char)))
        }
    }

    fn expr(&mut self) -> Result<()> {
        self.skip_ws();
        let start = self.pos;
        let first = *self.src.get(self.pos).ok_or_else(|| self.error("unexpected end"))?;
        if first.is_ascii_alphabetic() {
            while self.src.get(self.pos).is_some_and(u8::is_ascii_alphanumeric) {
                self.pos += 1;
            }
            let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            if let Some(op) = Op::from_name(word) {
                self.nodes.push(Node::Op(op));
                self.expect(b'(')?;
                for k in 0..op.arity() {
                    if k > 0 {
                        self.expect(b',')?;
                    }
                    self.expr()?;
                }
                return self.expect(b')');
            }
            return match word.strip_prefix('x').map(str::parse::<usize>) {
                Some(Ok(i)) if i >= 1 => {
                    self.nodes.push(Node::Var(i - 1));
                    Ok(())
                }
                _ => Err(Error::ExprParse(format!("unknown symbol {word:?}"))),
            };
        }
        while self
            .src
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'))
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let value: f64 = text
            .parse()
            .map_err(|_| Error::ExprParse(format!("bad number {text:?}")))?;
        self.nodes.push(Node::Const(value));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Expr {
        "mul(add(log(x2), 0.5), x1)".parse().unwrap()
    }

    #[test]
    fn evaluates_example_tree() {
        assert_eq!(example().eval(&[3.0, 1.0]).unwrap(), 1.5);
    }

    #[test]
    fn protected_primitives() {
        let e: Expr = "div(x1, x2)".parse().unwrap();
        assert_eq!(e.eval(&[5.0, 0.0]).unwrap(), 1.0);
        assert_eq!(e.eval(&[5.0, 0.001]).unwrap(), 1.0);
        assert_eq!(e.eval(&[5.0, 2.0]).unwrap(), 2.5);
        let e: Expr = "sqrt(-4)".parse().unwrap();
        assert_eq!(e.eval(&[]).unwrap(), 2.0);
        let e: Expr = "log(x1)".parse().unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap(), 0.0);
        assert!((e.eval(&[-std::f64::consts::E]).unwrap() - 1.0).abs() < 1e-15);
        let e: Expr = "exp(x1)".parse().unwrap();
        assert_eq!(e.eval(&[1e6]).unwrap(), 20f64.exp());
        let e: Expr = "mul(exp(x1), mul(exp(x1), mul(exp(x1), x2)))".parse().unwrap();
        assert!(e.eval(&[50.0, 1e300]).unwrap().is_finite());
    }

    #[test]
    fn unbound_variable() {
        assert!(matches!(
            example().eval(&[1.0]),
            Err(Error::UnboundVariable { index: 1, available: 1 })
        ));
    }

    #[test]
    fn formats_example() {
        assert_eq!(example().to_sexpr(), "mul(add(log(x2), 0.500), x1)");
        assert_eq!(example().to_infix(), "(log(x2) + 0.500) * x1");
        assert_eq!(Expr::constant(0.69).to_sexpr(), "0.690");
        assert_eq!(Expr::constant(0.69).to_infix(), "0.690");
    }

    #[test]
    fn infix_parenthesization() {
        let infix = |s: &str| s.parse::<Expr>().unwrap().to_infix();
        assert_eq!(infix("sub(x1, sub(x2, x3))"), "x1 - (x2 - x3)");
        assert_eq!(infix("sub(sub(x1, x2), x3)"), "x1 - x2 - x3");
        assert_eq!(infix("div(x1, mul(x2, 2))"), "x1 / (x2 * 2.000)");
        assert_eq!(infix("neg(add(x1, 1))"), "-(x1 + 1.000)");
        assert_eq!(infix("mul(sqrt(x1), 20)"), "sqrt(x1) * 20.000");
        assert_eq!(infix("mul(x1, -0.25)"), "x1 * -0.250");
    }

    #[test]
    fn depth_and_subtrees() {
        let e = example();
        assert_eq!(e.depth(), 3);
        assert_eq!(e.len(), 6);
        assert_eq!(e.subtree_end(1), 5);
        assert_eq!(Expr::var(0).depth(), 0);
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "mul(x1)", "add(x1, x2", "foo(x1)", "x0", "1.2.3", "add(x1, x2) x3"] {
            assert!(bad.parse::<Expr>().is_err(), "{bad}");
        }
        let deep = format!("{}x1{}", "neg(".repeat(18), ")".repeat(18));
        assert!(deep.parse::<Expr>().is_err());
    }

    #[test]
    fn constants_round_trip_exactly() {
        for c in [0.123456789, -0.5, 1e-7, 66.666, -0.0] {
            let e = Expr::constant(c);
            assert_eq!(e.to_sexpr().parse::<Expr>().unwrap(), e);
        }
    }
}
