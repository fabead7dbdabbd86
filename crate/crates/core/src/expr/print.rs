use std::fmt;

use super::{BinOp, Expr, Node};

// Every composite node is printed inside parentheses, so any printed
// expression is a `base` of the grammar and re-parses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) if c.is_sign_negative() => write!(f, "(-{})", -c),
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(i) => write!(f, "u{}", i + 1),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Func(func, a) => write!(f, "{}({a})", func.name()),
            Node::Pow(a, n) => write!(f, "({a}^{n})"),
            Node::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {sym} {b})")
            }
        }
    }
}
