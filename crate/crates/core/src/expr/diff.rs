use super::{BinOp, Expr, Func, Node};

pub(super) fn differentiate(e: &Expr, var: usize) -> Expr {
    if !e.depends_on(var) {
        return Expr::zero();
    }
    match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Var(i) => {
            if *i == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Neg(a) => -differentiate(a, var),
        Node::Func(f, a) => {
            let da = differentiate(a, var);
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Ln => return da / a,
                Func::Sqrt => return da / (2.0 * e),
                Func::Sin => a.cos(),
                Func::Cos => -a.sin(),
            };
            outer * da
        }
        Node::Pow(a, n) => {
            let da = differentiate(a, var);
            f64::from(*n) * a.powi(n - 1) * da
        }
        Node::Binary(op, a, b) => {
            let da = differentiate(a, var);
            let db = differentiate(b, var);
            match op {
                BinOp::Add => da + db,
                BinOp::Sub => da - db,
                BinOp::Mul => da * b + a * db,
                BinOp::Div => {
                    if db.is_zero() {
                        da / b
                    } else {
                        (da * b - a * db) / b.powi(2)
                    }
                }
            }
        }
    }
}
