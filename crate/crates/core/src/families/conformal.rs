use crate::expr::{evaluate, Expr, Point};
use crate::tensor::{MetricField, MetricPair};
use crate::{Error, Result};

/// `g^{ij} = exp(a) delta^{ij}` in two dimensions.
pub fn conformal_metric(a: &Expr, dim: usize) -> Result<MetricField> {
    if dim != 2 {
        return Err(Error::SpecViolation(format!("conformal examples are two-dimensional, got dim {dim}")));
    }
    a.check_dim(2)?;
    let e = a.exp();
    MetricField::diagonal(vec![e.clone(), e], format!("exp({a}) delta"))
}

/// `a_11 + a_22`.
pub fn laplacian(a: &Expr) -> Expr {
    a.differentiate(0).differentiate(0) + a.differentiate(1).differentiate(1)
}

/// `a = u1 u2`, harmonic, so `exp(a) delta` is flat.
pub fn harmonic_example() -> MetricField {
    conformal_metric(&(Expr::var(0) * Expr::var(1)), 2).expect("two-dimensional")
}

/// `2 ln(1 + K r^2 / 4)`, the stereographic solution of `Delta a = 2K e^{-a}`.
pub fn liouville_factor(k: f64) -> Expr {
    let r2 = Expr::var(0).powi(2) + Expr::var(1).powi(2);
    2.0 * (1.0 + k * r2 / 4.0).ln()
}

/// `Delta a - 2K e^{-a}` as an expression.
pub fn liouville_residual(a: &Expr, k: f64) -> Expr {
    laplacian(a) - 2.0 * k * (-a).exp()
}

/// Points where the Liouville pre-verification evaluates the residual.
const LIOUVILLE_PROBES: [[f64; 2]; 6] = [[0.0, 0.0], [0.3, -0.2], [-0.7, 0.4], [0.5, 0.9], [-1.0, -1.0], [1.3, 0.1]];

/// Largest `|Delta a - 2K e^{-a}|` over fixed probe points inside `1 + K r^2 / 4 > 0.1`.
pub fn liouville_check(a: &Expr, k: f64) -> Result<f64> {
    let res = liouville_residual(a, k);
    let mut worst = 0.0f64;
    let mut used = 0;
    for c in LIOUVILLE_PROBES {
        if 1.0 + k * (c[0] * c[0] + c[1] * c[1]) / 4.0 <= 0.1 {
            continue;
        }
        worst = worst.max(evaluate::<f64>(&res, &Point::new(c.to_vec()))?.abs());
        used += 1;
    }
    if used == 0 {
        return Err(Error::GridExhausted { survivors: 0, required: 1 });
    }
    Ok(worst)
}

/// `exp(a) delta` with the stereographic factor, after checking that the factor
/// solves the Liouville equation with curvature `k`.
pub fn liouville_example(k: f64) -> Result<MetricField> {
    let a = liouville_factor(k);
    let r = liouville_check(&a, k)?;
    if !(r <= 1e-12) {
        return Err(Error::InternalInconsistency(format!("Liouville factor fails its equation (residual {r:e})")));
    }
    conformal_metric(&a, 2)
}

/// `(delta, g)`: the pairing used for the almost-compatible counterexamples.
pub fn with_euclidean(g: MetricField) -> Result<MetricPair> {
    MetricPair::new(MetricField::euclidean(g.dim())?.with_label("delta"), g)
}
