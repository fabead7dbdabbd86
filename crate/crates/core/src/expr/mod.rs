//! Symbolic scalar expressions in chart coordinates `u1..uN`.
//!
//! An [`Expr`] is an immutable, reference-counted tree. All constructors go
//! through a small constant folder (`0*x`, `1*x`, `x^0`, constant arithmetic),
//! so that differentiation output stays compact. No other simplification is
//! attempted; equality of expressions is always decided numerically.

mod diff;
mod eval;
mod parse;
mod print;

use std::ops;
use std::sync::Arc;

pub use eval::{evaluate, fd_partial, Point};
pub use parse::parse_expr;

/// Unary functions admitted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    fn apply_f64(self, x: f64) -> Option<f64> {
        let y = match self {
            Func::Exp => x.exp(),
            Func::Ln if x > 0.0 => x.ln(),
            Func::Sqrt if x >= 0.0 => x.sqrt(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            _ => return None,
        };
        y.is_finite().then_some(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// One node of the expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    /// Zero-based coordinate index; printed as `u{index+1}`.
    Var(usize),
    Neg(Expr),
    Func(Func, Expr),
    Binary(BinOp, Expr, Expr),
    Pow(Expr, i32),
}

#[derive(Debug)]
struct Inner {
    node: Node,
    /// Bit `i` set when coordinate `i` occurs in the subtree.
    vars: u64,
}

/// Symbolic expression; cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

/// Largest number of distinct coordinates an expression may mention.
pub const MAX_VARS: usize = 64;

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.node == other.0.node
    }
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Expr {
    fn from_node(node: Node) -> Expr {
        let vars = match &node {
            Node::Const(_) => 0,
            Node::Var(i) => 1u64 << i,
            Node::Neg(a) | Node::Func(_, a) | Node::Pow(a, _) => a.0.vars,
            Node::Binary(_, a, b) => a.0.vars | b.0.vars,
        };
        Expr(Arc::new(Inner { node, vars }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn constant(c: f64) -> Expr {
        Expr::from_node(Node::Const(c))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    /// Coordinate `u{index+1}`.
    ///
    /// # Panics
    /// If `index >= MAX_VARS`.
    pub fn var(index: usize) -> Expr {
        assert!(index < MAX_VARS, "coordinate index {index} exceeds {MAX_VARS}");
        Expr::from_node(Node::Var(index))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    /// True when coordinate `index` (zero-based) occurs in the expression.
    pub fn depends_on(&self, index: usize) -> bool {
        index < MAX_VARS && self.0.vars & (1u64 << index) != 0
    }

    /// Number of coordinates needed to evaluate: one past the highest index used.
    pub fn min_dim(&self) -> usize {
        (MAX_VARS as u32 - self.0.vars.leading_zeros()) as usize
    }

    pub fn neg(&self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(a) => a.clone(),
            _ => Expr::from_node(Node::Neg(self.clone())),
        }
    }

    pub fn apply(&self, f: Func) -> Expr {
        if let Some(y) = self.as_const().and_then(|c| f.apply_f64(c)) {
            return Expr::constant(y);
        }
        Expr::from_node(Node::Func(f, self.clone()))
    }

    pub fn exp(&self) -> Expr {
        self.apply(Func::Exp)
    }

    pub fn ln(&self) -> Expr {
        self.apply(Func::Ln)
    }

    pub fn sqrt(&self) -> Expr {
        self.apply(Func::Sqrt)
    }

    pub fn sin(&self) -> Expr {
        self.apply(Func::Sin)
    }

    pub fn cos(&self) -> Expr {
        self.apply(Func::Cos)
    }

    pub fn powi(&self, n: i32) -> Expr {
        match (n, self.as_const()) {
            (0, _) => Expr::one(),
            (1, _) => self.clone(),
            (_, Some(c)) if c != 0.0 || n > 0 => Expr::constant(c.powi(n)),
            _ => Expr::from_node(Node::Pow(self.clone(), n)),
        }
    }

    pub fn binary(op: BinOp, a: &Expr, b: &Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            let folded = match op {
                BinOp::Add => Some(x + y),
                BinOp::Sub => Some(x - y),
                BinOp::Mul => Some(x * y),
                BinOp::Div if y != 0.0 => Some(x / y),
                BinOp::Div => None,
            };
            if let Some(v) = folded {
                return Expr::constant(v);
            }
        }
        match op {
            BinOp::Add if a.is_zero() => return b.clone(),
            BinOp::Add | BinOp::Sub if b.is_zero() => return a.clone(),
            BinOp::Sub if a.is_zero() => return b.neg(),
            BinOp::Mul if a.is_zero() || b.is_zero() => return Expr::zero(),
            BinOp::Mul if a.is_one() => return b.clone(),
            BinOp::Mul | BinOp::Div if b.is_one() => return a.clone(),
            BinOp::Div if a.is_zero() => return Expr::zero(),
            _ => {}
        }
        Expr::from_node(Node::Binary(op, a.clone(), b.clone()))
    }

    /// Sum of an iterator of expressions, folding as it goes.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::zero(), |acc, t| &acc + &t)
    }

    /// Symbolic partial derivative with respect to coordinate `var` (zero-based).
    pub fn differentiate(&self, var: usize) -> Expr {
        diff::differentiate(self, var)
    }

    /// Errors with `IndexOutOfChart` if the expression mentions a coordinate beyond `dim`.
    pub fn check_dim(&self, dim: usize) -> crate::Result<()> {
        let needed = self.min_dim();
        if needed > dim {
            return Err(crate::Error::IndexOutOfChart { index: needed, dim });
        }
        Ok(())
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::binary($op, self, rhs)
            }
        }
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::binary($op, &self, &rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::binary($op, &self, rhs)
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::binary($op, self, &rhs)
            }
        }
        impl ops::$trait<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::binary($op, self, &Expr::constant(rhs))
            }
        }
        impl ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::binary($op, &self, &Expr::constant(rhs))
            }
        }
        impl ops::$trait<&Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::binary($op, &Expr::constant(self), rhs)
            }
        }
        impl ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::binary($op, &Expr::constant(self), &rhs)
            }
        }
    };
}

impl_binop!(Add, add, BinOp::Add);
impl_binop!(Sub, sub, BinOp::Sub);
impl_binop!(Mul, mul, BinOp::Mul);
impl_binop!(Div, div, BinOp::Div);

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}
