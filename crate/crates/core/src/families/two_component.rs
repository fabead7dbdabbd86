use crate::compat::SampleGrid;
use crate::expr::{evaluate, Expr};
use crate::tensor::{MetricField, MetricPair};
use crate::{Error, Result, Scalar};

/// Two-component diagonal metrics `g2 = diag(e^i / (b^i)^2)` with the
/// function `F` of the flatness system.
#[derive(Debug, Clone)]
pub struct TwoComponentSpec {
    pub c: f64,
    pub eps: [i8; 2],
    pub b: [Expr; 2],
    pub f: Expr,
}

fn u(i: usize) -> Expr {
    Expr::var(i)
}

fn check_sign(e: i8) -> Result<()> {
    if e.abs() != 1 {
        return Err(Error::SpecViolation(format!("sign must be +1 or -1, got {e}")));
    }
    Ok(())
}

impl TwoComponentSpec {
    pub fn new(c: f64, eps: [i8; 2], b: [Expr; 2], f: Expr) -> Result<Self> {
        check_sign(eps[0])?;
        check_sign(eps[1])?;
        for e in b.iter().chain([&f]) {
            e.check_dim(2)?;
        }
        if b.iter().any(Expr::is_zero) {
            return Err(Error::SpecViolation("b^i must not vanish identically".into()));
        }
        Ok(TwoComponentSpec { c, eps, b, f })
    }

    /// `F = c ln(u1 - u2)` with `b^1 = b^2 = scale (u1 - u2)^(e2 c)` and `e1 = -e2`,
    /// which solves the flatness system for every `c`.
    pub fn log_family(c: f64, eps2: i8, scale: f64) -> Result<Self> {
        check_sign(eps2)?;
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::SpecViolation(format!("scale of b must be finite and nonzero, got {scale}")));
        }
        let d = u(0) - u(1);
        let p = f64::from(eps2) * c;
        let b = if p == 0.0 {
            Expr::constant(scale)
        } else if p == 0.5 {
            scale * d.sqrt()
        } else if p == -0.5 {
            scale / d.sqrt()
        } else {
            scale * (p * d.ln()).exp()
        };
        let f = if c == 0.0 { Expr::zero() } else { c * d.ln() };
        Self::new(c, [-eps2, eps2], [b.clone(), b], f)
    }

    /// The member whose `G_3` has constant curvature `k`:
    /// `(b^1)^2 = (b^2)^2 = e2 (u1 - u2) / (4k)`, `e2 = sign(k)`, `e1 = -e2`, `c = e2 / 2`.
    pub fn constant_curvature(k: f64) -> Result<Self> {
        if k == 0.0 || !k.is_finite() {
            return Err(Error::SpecViolation(format!("constant curvature needs finite nonzero K, got {k}")));
        }
        let eps2: i8 = if k > 0.0 { 1 } else { -1 };
        Self::log_family(f64::from(eps2) * 0.5, eps2, 1.0 / (4.0 * k.abs()).sqrt())
    }

    /// `c = 0`, `F = 0`, with `b^1 = b^1(u1)` and `b^2 = b^2(u2)`.
    pub fn separated(eps: [i8; 2], b1: Expr, b2: Expr) -> Result<Self> {
        if b1.depends_on(1) || b2.depends_on(0) {
            return Err(Error::SpecViolation("separated family needs b^1(u1) and b^2(u2)".into()));
        }
        Self::new(0.0, eps, [b1, b2], Expr::zero())
    }

    /// `G_n = diag(e^1 (u1)^n / (b^1)^2, e^2 (u2)^n / (b^2)^2)`.
    pub fn g_n(&self, n: i32) -> Result<MetricField> {
        let entries = (0..2)
            .map(|i| f64::from(self.eps[i]) * u(i).powi(n) / self.b[i].powi(2))
            .collect();
        Ok(MetricField::diagonal(entries, format!("G{n}"))?.with_signature(self.eps.to_vec()))
    }

    /// The pair `(diag(e^i f^i(u^i) / (b^i)^2), diag(e^i / (b^i)^2))`.
    pub fn pencil(&self, f1: &Expr, f2: &Expr) -> Result<MetricPair> {
        if f1.depends_on(1) || f2.depends_on(0) {
            return Err(Error::SpecViolation("f^i must depend on u^i only".into()));
        }
        let g2 = self.g_n(0)?.with_label("g2");
        let f = [f1, f2];
        let entries = (0..2).map(|i| f[i] * g2.component(i, i)).collect();
        let g1 = MetricField::diagonal(entries, "g1")?.with_signature(self.eps.to_vec());
        MetricPair::new(g1, g2)
    }
}

/// `G_0 .. G_{n_max}` of the spec.
pub fn two_component_family(spec: &TwoComponentSpec, n_max: usize) -> Result<Vec<MetricField>> {
    (0..=n_max as i32).map(|n| spec.g_n(n)).collect()
}

fn max_over_grid<T: Scalar>(grid: &SampleGrid<T>, f: impl Fn(&crate::Point<T>) -> Result<T> + Sync) -> Result<T> {
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: grid.dim() });
    }
    let s = grid.sample(f)?;
    Ok(s.values.iter().fold(T::zero(), |m, (_, r)| m.max(r.abs())))
}

/// Largest residual of `d b2/d u1 = e1 F_2 b1` and `d b1/d u2 = -e2 F_1 b2` over the grid.
pub fn verify_lame_system<T: Scalar>(
    b1: &Expr,
    b2: &Expr,
    f: &Expr,
    eps1: i8,
    eps2: i8,
    grid: &SampleGrid<T>,
) -> Result<T> {
    check_sign(eps1)?;
    check_sign(eps2)?;
    let r1 = b2.differentiate(0) - f64::from(eps1) * f.differentiate(1) * b1;
    let r2 = b1.differentiate(1) + f64::from(eps2) * f.differentiate(0) * b2;
    let nonzero = b1 * b2;
    max_over_grid(grid, |p| {
        if evaluate::<T>(&nonzero, p)?.abs() < T::lit(1e-12) {
            return Err(Error::Domain("b1 b2 vanishes".into()));
        }
        Ok(evaluate::<T>(&r1, p)?.abs().max(evaluate::<T>(&r2, p)?.abs()))
    })
}

/// Largest residual of `2 F_12 (f1 - f2) + F_2 f1' - F_1 f2'` over the grid.
pub fn verify_lequa<T: Scalar>(f: &Expr, f1: &Expr, f2: &Expr, grid: &SampleGrid<T>) -> Result<T> {
    let (fx, fy) = (f.differentiate(0), f.differentiate(1));
    let r = 2.0 * fx.differentiate(1) * (f1 - f2) + &fy * f1.differentiate(0) - &fx * f2.differentiate(1);
    max_over_grid(grid, |p| evaluate::<T>(&r, p))
}
