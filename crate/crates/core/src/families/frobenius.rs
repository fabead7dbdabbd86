use crate::compat::SampleGrid;
use crate::expr::{evaluate, Expr, Point};
use crate::linalg::Matrix;
use crate::tensor::{MetricField, MetricPair};
use crate::{Error, Result, Scalar};

/// Constant symmetric nondegenerate `eta^{ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eta(Vec<Vec<f64>>);

impl Eta {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > crate::linalg::MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: r.len() });
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::SpecViolation(format!("eta is not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let m = Matrix::<f64>::from_rows(&rows)?;
        if !(m.relative_det().abs() > crate::linalg::DEGENERACY_TOL) {
            return Err(Error::DegenerateMetric { det: m.det() });
        }
        Ok(Eta(rows))
    }

    /// `diag(e^1, ..., e^N)`.
    pub fn diagonal(eps: &[i8]) -> Result<Self> {
        let n = eps.len();
        Self::new((0..n).map(|i| (0..n).map(|j| if i == j { f64::from(eps[i]) } else { 0.0 }).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn metric(&self, label: &str) -> Result<MetricField> {
        MetricField::constant(&self.0, label)
    }

    /// `sum_s eta^{is} e_s` with zero coefficients dropped.
    pub(crate) fn raise(&self, i: usize, e: impl Fn(usize) -> Expr) -> Expr {
        Expr::sum((0..self.dim()).filter(|&s| self.0[i][s] != 0.0).map(|s| self.0[i][s] * e(s)))
    }
}

/// Potential `Phi(v)` with constant `eta`.
#[derive(Debug, Clone)]
pub struct FrobeniusSpec {
    pub phi: Expr,
    pub eta: Eta,
}

impl FrobeniusSpec {
    pub fn new(phi: Expr, eta: Eta) -> Result<Self> {
        phi.check_dim(eta.dim())?;
        Ok(FrobeniusSpec { phi, eta })
    }

    pub fn dim(&self) -> usize {
        self.eta.dim()
    }

    /// Symbolic `d_i d_j Phi`, row-major.
    pub fn hessian(&self) -> Vec<Vec<Expr>> {
        let n = self.dim();
        let d: Vec<Expr> = (0..n).map(|i| self.phi.differentiate(i)).collect();
        (0..n).map(|i| (0..n).map(|j| d[i].differentiate(j)).collect()).collect()
    }
}

/// `(eta, eta Hess(Phi) eta)`.
pub fn frobenius_pair(spec: &FrobeniusSpec) -> Result<MetricPair> {
    let n = spec.dim();
    let h = spec.hessian();
    let eta = &spec.eta;
    let mut rows = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            // upper triangle of the Hessian only, so the result is structurally symmetric
            let e = eta.raise(i, |s| eta.raise(j, |p| h[s.min(p)][s.max(p)].clone()));
            rows[j][i] = e.clone();
            rows[i][j] = e;
        }
    }
    MetricPair::new(eta.metric("eta")?, MetricField::new(rows, "eta Hess(Phi) eta")?)
}

/// Largest `|eta^{sp} Phi_{pi} Phi_{sjk} - eta^{sp} Phi_{pk} Phi_{sji}|` over free indices and grid points.
pub fn check_m2<T: Scalar>(spec: &FrobeniusSpec, grid: &SampleGrid<T>) -> Result<T> {
    let n = spec.dim();
    if grid.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: grid.dim() });
    }
    let h = spec.hessian();
    let third: Vec<Vec<Vec<Expr>>> =
        h.iter().map(|row| row.iter().map(|e| (0..n).map(|k| e.differentiate(k)).collect()).collect()).collect();
    let s = grid.sample(|p| {
        let hv = eval_all(&h, p)?;
        let tv = third.iter().map(|m| eval_all(m, p)).collect::<Result<Vec<_>>>()?;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = T::zero();
                    for s in 0..n {
                        for q in 0..n {
                            let e = T::lit(spec.eta.get(s, q));
                            acc += e * (hv[q][i] * tv[s][j][k] - hv[q][k] * tv[s][j][i]);
                        }
                    }
                    worst = worst.max(acc.abs());
                }
            }
        }
        Ok(worst)
    })?;
    Ok(s.values.iter().fold(T::zero(), |m, (_, r)| m.max(*r)))
}

fn eval_all<T: Scalar>(m: &[Vec<Expr>], p: &Point<T>) -> Result<Vec<Vec<T>>> {
    m.iter().map(|row| row.iter().map(|e| evaluate(e, p)).collect()).collect()
}

/// Largest `|alpha (e1 Phi_11 - e2 Phi_22) - beta Phi_12|` over the grid.
pub fn check_2d_linear_pde<T: Scalar>(
    phi: &Expr,
    alpha: f64,
    beta: f64,
    eps: [i8; 2],
    grid: &SampleGrid<T>,
) -> Result<T> {
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: grid.dim() });
    }
    phi.check_dim(2)?;
    let d1 = phi.differentiate(0);
    let d2 = phi.differentiate(1);
    let r = alpha * (f64::from(eps[0]) * d1.differentiate(0) - f64::from(eps[1]) * d2.differentiate(1))
        - beta * d1.differentiate(1);
    let s = grid.sample(|p| evaluate::<T>(&r, p))?;
    Ok(s.values.iter().fold(T::zero(), |m, (_, v)| m.max(v.abs())))
}
