use super::{BinOp, Expr, Func, Node};
use crate::{Error, Result, Scalar};

/// A point of the chart, `u = (u1, ..., uN)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T = f64>(Vec<T>);

impl<T: Scalar> Point<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    /// Copy of the point with coordinate `var` shifted by `h`.
    pub fn shifted(&self, var: usize, h: T) -> Self {
        let mut c = self.0.clone();
        c[var] += h;
        Point(c)
    }
}

impl<T> std::ops::Index<usize> for Point<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Scalar> From<Vec<T>> for Point<T> {
    fn from(v: Vec<T>) -> Self {
        Point(v)
    }
}

fn tiny<T: Scalar>() -> T {
    T::lit(1e-300).max(T::min_positive_value())
}

/// Evaluates `e` at `p`.
///
/// Fails with `Domain` on a logarithm or square root of a non-positive
/// (resp. negative) argument, on division by a magnitude below `1e-300`, and
/// whenever an intermediate value is not finite. Callers treat that as "discard
/// this sample point".
pub fn evaluate<T: Scalar>(e: &Expr, p: &Point<T>) -> Result<T> {
    let v = match e.node() {
        Node::Const(c) => T::lit(*c),
        Node::Var(i) => *p.0.get(*i).ok_or(Error::IndexOutOfChart {
            index: i + 1,
            dim: p.dim(),
        })?,
        Node::Neg(a) => -evaluate(a, p)?,
        Node::Func(f, a) => {
            let x = evaluate(a, p)?;
            match f {
                Func::Exp => x.exp(),
                Func::Ln => {
                    if x <= T::zero() {
                        return Err(Error::Domain(format!("ln of non-positive value {x}")));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < T::zero() {
                        return Err(Error::Domain(format!("sqrt of negative value {x}")));
                    }
                    x.sqrt()
                }
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
            }
        }
        Node::Pow(a, n) => {
            let x = evaluate(a, p)?;
            if *n < 0 && x.abs() < tiny() {
                return Err(Error::Domain(format!("negative power of {x}")));
            }
            x.powi(*n)
        }
        Node::Binary(op, a, b) => {
            let x = evaluate(a, p)?;
            let y = evaluate(b, p)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y.abs() < tiny() {
                        return Err(Error::Domain(format!("division by {y}")));
                    }
                    x / y
                }
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("non-finite value while evaluating {e}")))
    }
}

/// Central difference `(e(p + h e_var) - e(p - h e_var)) / 2h`.
pub fn fd_partial<T: Scalar>(e: &Expr, var: usize, p: &Point<T>, h: T) -> Result<T> {
    let plus = evaluate(e, &p.shifted(var, h))?;
    let minus = evaluate(e, &p.shifted(var, -h))?;
    Ok((plus - minus) / (h + h))
}
