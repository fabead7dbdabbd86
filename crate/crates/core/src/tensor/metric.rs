use std::sync::{Arc, OnceLock};

use crate::expr::{evaluate, parse_expr, Expr, Point};
use crate::linalg::{invert_metric, Matrix, DEGENERACY_TOL, MAX_DIM};
use crate::{Error, Result, Scalar};

/// Contravariant metric `g^{ij}(u)` with symbolic components.
///
/// Clones share the lazily built caches of symbolic derivatives.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    components: Vec<Expr>,
    label: String,
    signature: Option<Vec<i8>>,
    diagonal: bool,
    cache: Arc<DerivativeCache>,
}

#[derive(Default)]
struct DerivativeCache {
    first: OnceLock<FirstOrder>,
    second: OnceLock<SecondOrder>,
}

struct FirstOrder {
    /// `d_up[a][i*n+j] = d g^{ij} / d u^a`
    d_up: Vec<Vec<Expr>>,
    /// Diagonal metrics only: `1/g^i` and its first derivatives `[a][i]`.
    lower: Option<(Vec<Expr>, Vec<Vec<Expr>>)>,
}

enum SecondOrder {
    /// `dd_up[a*n+b][i*n+j]`
    Upper(Vec<Vec<Expr>>),
    /// Diagonal metrics: `dd_lower[a*n+b][i]` of `1/g^i`.
    DiagonalLower(Vec<Vec<Expr>>),
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricField")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("components", &self.rows())
            .finish()
    }
}

impl PartialEq for MetricField {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.components == other.components
    }
}

impl MetricField {
    /// Builds a metric from an `N x N` matrix of expressions.
    ///
    /// Requires `1 <= N <= 8`, structural symmetry, and no coordinate beyond `N`.
    pub fn new(rows: Vec<Vec<Expr>>, label: impl Into<String>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        for r in &rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            for e in r {
                e.check_dim(n)?;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::SpecViolation(format!(
                        "metric component ({}, {}) differs from ({}, {})",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || rows[i][j].is_zero()));
        Ok(MetricField {
            dim: n,
            components: rows.into_iter().flatten().collect(),
            label: label.into(),
            signature: None,
            diagonal,
            cache: Arc::default(),
        })
    }

    /// Diagonal metric `g^{ij} = g^i delta^{ij}`.
    pub fn diagonal(entries: Vec<Expr>, label: impl Into<String>) -> Result<Self> {
        let n = entries.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { entries[i].clone() } else { Expr::zero() }).collect())
            .collect();
        Self::new(rows, label)
    }

    /// Parses every component with the expression grammar.
    pub fn parse<S: AsRef<str>>(rows: &[Vec<S>], label: impl Into<String>) -> Result<Self> {
        let n = rows.len();
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_expr(s.as_ref(), n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed, label)
    }

    /// `delta^{ij}` in `n` dimensions.
    pub fn euclidean(n: usize) -> Result<Self> {
        Self::diagonal(vec![Expr::one(); n], "delta")
    }

    /// Constant metric from a numeric symmetric matrix.
    pub fn constant(eta: &[Vec<f64>], label: impl Into<String>) -> Result<Self> {
        let rows = eta.iter().map(|r| r.iter().map(|&c| Expr::constant(c)).collect()).collect();
        Self::new(rows, label)
    }

    pub fn with_signature(mut self, signature: Vec<i8>) -> Self {
        self.signature = Some(signature);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn signature(&self) -> Option<&[i8]> {
        self.signature.as_deref()
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<Expr>> {
        self.components.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// True when no component depends on any coordinate.
    pub fn is_constant(&self) -> bool {
        self.components.iter().all(|e| e.as_const().is_some())
    }

    /// Numeric components `g^{ij}(p)`.
    pub fn at<T: Scalar>(&self, p: &Point<T>) -> Result<Matrix<T>> {
        self.check_point(p)?;
        let n = self.dim;
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = evaluate(self.component(i, j), p)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    fn check_point<T: Scalar>(&self, p: &Point<T>) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.dim() });
        }
        Ok(())
    }

    fn first(&self) -> &FirstOrder {
        self.cache.first.get_or_init(|| {
            let n = self.dim;
            let d_up = (0..n)
                .map(|a| self.components.iter().map(|e| e.differentiate(a)).collect())
                .collect();
            let lower = self.diagonal.then(|| {
                let lo: Vec<Expr> = (0..n).map(|i| 1.0 / self.component(i, i)).collect();
                let d_lo = (0..n).map(|a| lo.iter().map(|e| e.differentiate(a)).collect()).collect();
                (lo, d_lo)
            });
            FirstOrder { d_up, lower }
        })
    }

    fn second(&self) -> &SecondOrder {
        self.cache.second.get_or_init(|| {
            let n = self.dim;
            let first = self.first();
            if let Some((_, d_lo)) = &first.lower {
                let mut dd = vec![Vec::new(); n * n];
                for a in 0..n {
                    for b in a..n {
                        let v: Vec<Expr> = d_lo[a].iter().map(|e| e.differentiate(b)).collect();
                        dd[b * n + a] = v.clone();
                        dd[a * n + b] = v;
                    }
                }
                SecondOrder::DiagonalLower(dd)
            } else {
                let mut dd = vec![Vec::new(); n * n];
                for a in 0..n {
                    for b in a..n {
                        let v: Vec<Expr> = first.d_up[a].iter().map(|e| e.differentiate(b)).collect();
                        dd[b * n + a] = v.clone();
                        dd[a * n + b] = v;
                    }
                }
                SecondOrder::Upper(dd)
            }
        })
    }

    /// Symbolic `d g^{ij} / d u^a`.
    pub fn derivative(&self, a: usize, i: usize, j: usize) -> &Expr {
        &self.first().d_up[a][i * self.dim + j]
    }

    /// Values and derivatives of the metric at `p`, up to `order` (1 or 2).
    ///
    /// Covariant components come from `1/g^i` symbolically for diagonal
    /// metrics, and from numeric inversion plus the identities
    /// `d(G^-1) = -G^-1 dG G^-1` (and its second-order analogue) otherwise.
    pub fn jet<T: Scalar>(&self, p: &Point<T>, order: usize) -> Result<MetricJet<T>> {
        let n = self.dim;
        let up = self.at(p)?;
        let first = self.first();
        let eval_mats = |exprs: &[Vec<Expr>]| -> Result<Vec<Matrix<T>>> {
            exprs
                .iter()
                .map(|flat| {
                    let mut m = Matrix::zeros(n);
                    for i in 0..n {
                        for j in i..n {
                            let v = evaluate(&flat[i * n + j], p)?;
                            m[(i, j)] = v;
                            m[(j, i)] = v;
                        }
                    }
                    Ok(m)
                })
                .collect()
        };
        let eval_diag = |exprs: &[Expr]| -> Result<Matrix<T>> {
            let d = exprs.iter().map(|e| evaluate(e, p)).collect::<Result<Vec<T>>>()?;
            Ok(Matrix::diag(&d))
        };
        let d_up = eval_mats(&first.d_up)?;
        match &first.lower {
            Some((lo_e, d_lo_e)) => {
                if up.relative_det() <= T::lit(DEGENERACY_TOL) {
                    return Err(Error::DegenerateMetric { det: up.det().to_f64_lossy() });
                }
                let lo = eval_diag(lo_e)?;
                let d_lo = d_lo_e.iter().map(|v| eval_diag(v)).collect::<Result<Vec<_>>>()?;
                let dd_lo = if order >= 2 {
                    match self.second() {
                        SecondOrder::DiagonalLower(dd) => {
                            Some(dd.iter().map(|v| eval_diag(v)).collect::<Result<Vec<_>>>()?)
                        }
                        SecondOrder::Upper(_) => unreachable!("diagonal metric caches lower derivatives"),
                    }
                } else {
                    None
                };
                Ok(MetricJet { n, up, lo, d_up, d_lo, dd_up: None, dd_lo })
            }
            None => {
                let dd_up = if order >= 2 {
                    match self.second() {
                        SecondOrder::Upper(dd) => Some(eval_mats(dd)?),
                        SecondOrder::DiagonalLower(_) => unreachable!("general metric caches upper derivatives"),
                    }
                } else {
                    None
                };
                MetricJet::from_upper(up, d_up, dd_up)
            }
        }
    }
}

/// Numeric 1- or 2-jet of a metric at one point.
#[derive(Debug, Clone)]
pub struct MetricJet<T> {
    pub n: usize,
    /// `g^{ij}`
    pub up: Matrix<T>,
    /// `g_{ij}`
    pub lo: Matrix<T>,
    /// `d_a g^{ij}`
    pub d_up: Vec<Matrix<T>>,
    /// `d_a g_{ij}`
    pub d_lo: Vec<Matrix<T>>,
    /// `d_a d_b g^{ij}` at `[a*n+b]`, when known
    pub dd_up: Option<Vec<Matrix<T>>>,
    /// `d_a d_b g_{ij}` at `[a*n+b]`, present for order-2 jets
    pub dd_lo: Option<Vec<Matrix<T>>>,
}

impl<T: Scalar> MetricJet<T> {
    /// Completes a jet from contravariant data by numeric inversion.
    pub fn from_upper(
        up: Matrix<T>,
        d_up: Vec<Matrix<T>>,
        dd_up: Option<Vec<Matrix<T>>>,
    ) -> Result<Self> {
        let n = up.dim();
        let lo = invert_metric(&up)?;
        let d_lo: Vec<Matrix<T>> = d_up.iter().map(|d| lo.mul(d).mul(&lo).scaled(-T::one())).collect();
        let dd_lo = dd_up.as_ref().map(|dd| {
            let mut out = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    // d_a d_b G^-1 = G^-1 dA G^-1 dB G^-1 + G^-1 dB G^-1 dA G^-1 - G^-1 dAB G^-1
                    let ga = lo.mul(&d_up[a]);
                    let gb = lo.mul(&d_up[b]);
                    let t1 = ga.mul(&gb).mul(&lo);
                    let t2 = gb.mul(&ga).mul(&lo);
                    let t3 = lo.mul(&dd[a * n + b]).mul(&lo);
                    out.push(t1.add(&t2).sub(&t3));
                }
            }
            out
        });
        Ok(MetricJet { n, up, lo, d_up, d_lo, dd_up, dd_lo })
    }

    /// Jet of `l1*g1 + l2*g2`, built from the contravariant parts of both jets.
    pub fn combine(l1: T, j1: &MetricJet<T>, l2: T, j2: &MetricJet<T>) -> Result<Self> {
        let lin = |a: &Matrix<T>, b: &Matrix<T>| a.scaled(l1).add(&b.scaled(l2));
        let up = lin(&j1.up, &j2.up);
        let d_up = j1.d_up.iter().zip(&j2.d_up).map(|(a, b)| lin(a, b)).collect();
        let dd_up = match (j1.full_dd_up(), j2.full_dd_up()) {
            (Some(a), Some(b)) => Some(a.iter().zip(&b).map(|(x, y)| lin(x, y)).collect()),
            _ => None,
        };
        Self::from_upper(up, d_up, dd_up)
    }

    /// Second derivatives of the contravariant components, reconstructing them
    /// from the covariant ones when only those were cached.
    pub fn full_dd_up(&self) -> Option<Vec<Matrix<T>>> {
        if let Some(dd) = &self.dd_up {
            return Some(dd.clone());
        }
        let dd_lo = self.dd_lo.as_ref()?;
        let n = self.n;
        let g = &self.up;
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let ga = g.mul(&self.d_lo[a]);
                let gb = g.mul(&self.d_lo[b]);
                let t1 = ga.mul(&gb).mul(g);
                let t2 = gb.mul(&ga).mul(g);
                let t3 = g.mul(&dd_lo[a * n + b]).mul(g);
                out.push(t1.add(&t2).sub(&t3));
            }
        }
        Some(out)
    }
}

/// Ordered pair `(g1, g2)` on a common chart.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricPair {
    pub g1: MetricField,
    pub g2: MetricField,
}

impl MetricPair {
    pub fn new(g1: MetricField, g2: MetricField) -> Result<Self> {
        if g1.dim() != g2.dim() {
            return Err(Error::DimensionMismatch { expected: g1.dim(), found: g2.dim() });
        }
        Ok(MetricPair { g1, g2 })
    }

    pub fn dim(&self) -> usize {
        self.g1.dim()
    }
}

/// Coefficients `(lambda1, lambda2)` of a pencil member `lambda1 g1 + lambda2 g2`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PencilSample {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl PencilSample {
    pub const fn new(lambda1: f64, lambda2: f64) -> Self {
        PencilSample { lambda1, lambda2 }
    }
}

/// Symbolic pencil member `lambda1 g1 + lambda2 g2`.
pub fn lambda_combination(pair: &MetricPair, s: PencilSample) -> MetricField {
    let n = pair.dim();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| s.lambda1 * pair.g1.component(i, j) + s.lambda2 * pair.g2.component(i, j))
                .collect()
        })
        .collect();
    let label = format!("{}*{} + {}*{}", s.lambda1, pair.g1.label(), s.lambda2, pair.g2.label());
    MetricField::new(rows, label).expect("combination of valid metrics is a valid metric")
}
