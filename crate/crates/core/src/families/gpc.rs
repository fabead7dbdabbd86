use serde::Serialize;

use crate::compat::{GridSummary, SampleGrid};
use crate::expr::{evaluate, Expr, Point};
use crate::linalg::Matrix;
use crate::tensor::{curvature, MetricField};
use crate::{Error, Result, Scalar};

/// Affinors `(w^a)^i_j`, one `N x N` expression matrix each.
#[derive(Debug, Clone)]
pub struct WeingartenSet {
    dim: usize,
    affinors: Vec<Vec<Vec<Expr>>>,
}

impl WeingartenSet {
    pub fn new(dim: usize, affinors: Vec<Vec<Vec<Expr>>>) -> Result<Self> {
        for w in &affinors {
            if w.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: w.len() });
            }
            for row in w {
                if row.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
                }
                for e in row {
                    e.check_dim(dim)?;
                }
            }
        }
        Ok(WeingartenSet { dim, affinors })
    }

    /// Diagonal affinors from their eigenvalue functions `(w^a)^i`.
    pub fn diagonal(dim: usize, diagonals: Vec<Vec<Expr>>) -> Result<Self> {
        let affinors = diagonals
            .into_iter()
            .map(|d| {
                if d.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: d.len() });
                }
                Ok((0..dim)
                    .map(|i| (0..dim).map(|j| if i == j { d[i].clone() } else { Expr::zero() }).collect())
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, affinors)
    }

    /// A single `s * identity`.
    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        Self::diagonal(dim, vec![vec![Expr::constant(s); dim]]).expect("consistent dimensions")
    }

    pub fn empty(dim: usize) -> Self {
        WeingartenSet { dim, affinors: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.affinors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.affinors.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        self.affinors
            .iter()
            .all(|w| (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || w[i][j].is_zero())))
    }

    fn at<T: Scalar>(&self, a: usize, p: &Point<T>) -> Result<Matrix<T>> {
        let w = &self.affinors[a];
        let mut m = Matrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = evaluate(&w[i][j], p)?;
            }
        }
        Ok(m)
    }
}

/// `w = sqrt(K) id` for a metric of constant curvature `K > 0`.
pub fn constant_curvature_weingarten(dim: usize, k: f64) -> Result<WeingartenSet> {
    if !(k > 0.0) {
        return Err(Error::SpecViolation(format!("a real scaled identity needs K > 0, got {k}")));
    }
    Ok(WeingartenSet::scaled_identity(dim, k.sqrt()))
}

/// Worst absolute residuals of the three equations over the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GpcResiduals<T> {
    /// `g_{ik} w^k_j - g_{jk} w^k_i`
    pub symmetry: T,
    /// `nabla_k w^i_j - nabla_j w^i_k`
    pub codazzi: T,
    /// `R^{ij}_{kl} - sum_a (w^i_k w^j_l - w^j_k w^i_l)`
    pub gauss: T,
    /// Largest entry of any `[w^a, w^b]`
    pub max_commutator: T,
    /// Commutators above `1e-9` are flagged, not fatal.
    pub non_commuting: bool,
    pub grid: GridSummary,
}

impl<T: Scalar> GpcResiduals<T> {
    pub fn max(&self) -> T {
        self.symmetry.max(self.codazzi).max(self.gauss)
    }
}

/// Commutator tolerance for the non-commuting flag.
pub const COMMUTATOR_TOL: f64 = 1e-9;

/// Codazzi tensor `C[a][i][j][k] = nabla_k (w^a)^i_j - nabla_j (w^a)^i_k` at one point.
fn codazzi_at<T: Scalar>(
    w: &WeingartenSet,
    dw: &[Vec<Vec<Expr>>],
    gamma: &crate::tensor::TensorValue<T>,
    p: &Point<T>,
) -> Result<Vec<Vec<Vec<Vec<T>>>>> {
    let n = w.dim;
    let mut out = Vec::with_capacity(w.len());
    for a in 0..w.len() {
        let wa = w.at(a, p)?;
        // dwa[k][i][j] = d_k (w^a)^i_j
        let dwa: Vec<Matrix<T>> = (0..n)
            .map(|k| {
                let mut m = Matrix::zeros(n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = evaluate(&dw[a][k][i * n + j], p)?;
                    }
                }
                Ok(m)
            })
            .collect::<Result<_>>()?;
        let nabla = |k: usize, i: usize, j: usize| -> T {
            let mut v = dwa[k][(i, j)];
            for s in 0..n {
                v += gamma.get(&[i, k, s]) * wa[(s, j)] - gamma.get(&[s, k, j]) * wa[(i, s)];
            }
            v
        };
        let c = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| nabla(k, i, j) - nabla(j, i, k)).collect()).collect())
            .collect();
        out.push(c);
    }
    Ok(out)
}

fn affinor_derivatives(w: &WeingartenSet) -> Vec<Vec<Vec<Expr>>> {
    let n = w.dim;
    w.affinors
        .iter()
        .map(|m| (0..n).map(|k| m.iter().flatten().map(|e| e.differentiate(k)).collect()).collect())
        .collect()
}

fn check_grid<T: Scalar>(g: &MetricField, w: &WeingartenSet, grid: &SampleGrid<T>) -> Result<()> {
    if w.dim != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: w.dim });
    }
    if grid.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: grid.dim() });
    }
    Ok(())
}

/// Residuals of the symmetry, Codazzi and Gauss equations for `g` and `w`.
pub fn gpc_residual<T: Scalar>(g: &MetricField, w: &WeingartenSet, grid: &SampleGrid<T>) -> Result<GpcResiduals<T>> {
    check_grid(g, w, grid)?;
    let n = g.dim();
    let dw = affinor_derivatives(w);
    let sampled = grid.sample(|p| {
        let curv = curvature(g, p)?;
        let lo = crate::linalg::invert_metric(&g.at(p)?)?;
        let ws = (0..w.len()).map(|a| w.at(a, p)).collect::<Result<Vec<_>>>()?;
        let mut sym = T::zero();
        let mut comm = T::zero();
        for (a, wa) in ws.iter().enumerate() {
            let gw = lo.mul(wa);
            for i in 0..n {
                for j in 0..n {
                    sym = sym.max((gw[(i, j)] - gw[(j, i)]).abs());
                }
            }
            for wb in &ws[a + 1..] {
                comm = comm.max(wa.mul(wb).max_abs_diff(&wb.mul(wa)));
            }
        }
        let codazzi = codazzi_at(w, &dw, &curv.connection.gamma, p)?
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(T::zero(), |m, x| m.max(x.abs()));
        let mut gauss = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let model: T = ws.iter().map(|m| m[(i, k)] * m[(j, l)] - m[(j, k)] * m[(i, l)]).sum();
                        gauss = gauss.max((curv.riemann_up.get(&[i, j, k, l]) - model).abs());
                    }
                }
            }
        }
        Ok([sym, codazzi, gauss, comm])
    })?;
    let mut acc = [T::zero(); 4];
    for (_, r) in &sampled.values {
        for (a, x) in acc.iter_mut().zip(r) {
            *a = a.max(*x);
        }
    }
    Ok(GpcResiduals {
        symmetry: acc[0],
        codazzi: acc[1],
        gauss: acc[2],
        max_commutator: acc[3],
        non_commuting: acc[3] > T::lit(COMMUTATOR_TOL),
        grid: sampled.summary,
    })
}

/// Residuals of the diagonal forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolonomicResiduals<T> {
    /// `2 g^i d_k w^i - (w^i - w^k) d_k g^i`, all `i != k`
    pub hol1: T,
    /// `R^{ij}_{ij} - sum_a w^i w^j`, all `i != j`
    pub hol2: T,
    pub grid: GridSummary,
}

/// Diagonal-net residuals for diagonal `g` and diagonal affinors.
pub fn holonomic_residual<T: Scalar>(
    g: &MetricField,
    w: &WeingartenSet,
    grid: &SampleGrid<T>,
) -> Result<HolonomicResiduals<T>> {
    check_grid(g, w, grid)?;
    if !g.is_diagonal() || !w.is_diagonal() {
        return Err(Error::SpecViolation("holonomic residuals need a diagonal metric and diagonal affinors".into()));
    }
    let n = g.dim();
    let sampled = grid.sample(|p| {
        let curv = curvature(g, p)?;
        let gi = (0..n).map(|i| evaluate::<T>(g.component(i, i), p)).collect::<Result<Vec<_>>>()?;
        let mut h1 = T::zero();
        let mut h2 = T::zero();
        let wv = (0..w.len())
            .map(|a| (0..n).map(|i| evaluate::<T>(&w.affinors[a][i][i], p)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        for i in 0..n {
            for k in 0..n {
                if i == k {
                    continue;
                }
                let dg = evaluate::<T>(g.derivative(k, i, i), p)?;
                for a in 0..w.len() {
                    let dw = evaluate::<T>(&w.affinors[a][i][i].differentiate(k), p)?;
                    let r = T::lit(2.0) * gi[i] * dw - (wv[a][i] - wv[a][k]) * dg;
                    h1 = h1.max(r.abs());
                }
                let model: T = wv.iter().map(|x| x[i] * x[k]).sum();
                h2 = h2.max((curv.riemann_up.get(&[i, k, i, k]) - model).abs());
            }
        }
        Ok((h1, h2))
    })?;
    let (h1, h2) = sampled.values.iter().fold((T::zero(), T::zero()), |(a, b), (_, r)| (a.max(r.0), b.max(r.1)));
    Ok(HolonomicResiduals { hol1: h1, hol2: h2, grid: sampled.summary })
}
