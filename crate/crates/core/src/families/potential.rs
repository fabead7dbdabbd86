use super::frobenius::Eta;
use crate::compat::{SampleGrid, Status, Verdict, Witness};
use crate::expr::{evaluate, Expr, Point};
use crate::tensor::{MetricField, MetricPair};
use crate::{Error, Result, Scalar};

/// `g^{ij} = eta^{is} d_s h^j + eta^{js} d_s h^i`.
pub fn metric_from_vector_potential(h: &[Expr], eta: &Eta) -> Result<MetricField> {
    symmetrized_gradient(h, eta, 0.0, "eta dh + (eta dh)^T")
}

fn symmetrized_gradient(h: &[Expr], eta: &Eta, c: f64, label: &str) -> Result<MetricField> {
    let n = eta.dim();
    if h.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.len() });
    }
    for e in h {
        e.check_dim(n)?;
    }
    let grad = |i: usize, j: usize| eta.raise(i, |s| h[j].differentiate(s));
    let mut rows = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let e = grad(i, j) + grad(j, i) + c * eta.get(i, j);
            rows[j][i] = e.clone();
            rows[i][j] = e;
        }
    }
    MetricField::new(rows, label)
}

/// Vector field `f^i` and constant `c` in flat coordinates of `eta`.
#[derive(Debug, Clone)]
pub struct DubrovinInput {
    pub eta: Eta,
    pub f: Vec<Expr>,
    pub c: f64,
}

impl DubrovinInput {
    pub fn new(eta: Eta, f: Vec<Expr>, c: f64) -> Result<Self> {
        if f.len() != eta.dim() {
            return Err(Error::DimensionMismatch { expected: eta.dim(), found: f.len() });
        }
        for e in &f {
            e.check_dim(eta.dim())?;
        }
        Ok(DubrovinInput { eta, f, c })
    }

    /// `g1^{ij} = d^i f^j + d^j f^i + c eta^{ij}` with `d^i = eta^{is} d_s`.
    pub fn metric(&self) -> Result<MetricField> {
        symmetrized_gradient(&self.f, &self.eta, self.c, "d f + (d f)^T + c eta")
    }

    /// `(g1, eta)`.
    pub fn pair(&self) -> Result<MetricPair> {
        MetricPair::new(self.metric()?, self.eta.metric("eta")?)
    }
}

/// Checks the flat-pencil conditions on `f` in flat coordinates of `eta`:
/// `Delta^{ij}_s Delta^{sk}_l = Delta^{ik}_s Delta^{sj}_l` with
/// `Delta^{ij}_k = eta^{ib} d_k d_b f^j`, and
/// `(g1^{is} eta^{jp} - eta^{is} g1^{jp}) d_s d_p f^k = 0`.
///
/// Residuals are normalized by `1 + max|Delta|^2` and `1 + max|g1| max|eta| max|dd f|`.
pub fn verify_dubrovin_pencil<T: Scalar>(input: &DubrovinInput, grid: &SampleGrid<T>, tol: T) -> Result<Verdict<T>> {
    let n = input.eta.dim();
    if grid.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: grid.dim() });
    }
    let g1 = input.metric()?;
    // ddf[k][a][b] = d_a d_b f^k
    let ddf: Vec<Vec<Vec<Expr>>> = input
        .f
        .iter()
        .map(|f| (0..n).map(|a| (0..n).map(|b| f.differentiate(a).differentiate(b)).collect()).collect())
        .collect();
    let eta = |i: usize, j: usize| T::lit(input.eta.get(i, j));
    let eta_max = input.eta.rows().iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));

    let sampled = grid.sample(|p: &Point<T>| {
        let g = g1.at(p)?;
        if g.relative_det().abs() <= T::lit(crate::linalg::DEGENERACY_TOL) {
            return Err(Error::DegenerateMetric { det: g.det().to_f64_lossy() });
        }
        let dd = ddf
            .iter()
            .map(|m| m.iter().map(|r| r.iter().map(|e| evaluate::<T>(e, p)).collect()).collect())
            .collect::<Result<Vec<Vec<Vec<T>>>>>()?;
        // delta[i][j][k] = Delta^{ij}_k
        let mut delta = vec![vec![vec![T::zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    delta[i][j][k] = (0..n).map(|b| eta(i, b) * dd[j][k][b]).sum();
                }
            }
        }
        let dmax = delta.iter().flatten().flatten().fold(T::zero(), |m, x| m.max(x.abs()));
        let dd_max = dd.iter().flatten().flatten().fold(T::zero(), |m, x| m.max(x.abs()));
        let s6 = T::one() + dmax * dmax;
        let s8 = T::one() + g.max_abs() * T::lit(eta_max) * dd_max;

        let mut w6 = (T::zero(), T::zero(), vec![0; 4]);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let lhs: T = (0..n).map(|s| delta[i][j][s] * delta[s][k][l]).sum();
                        let rhs: T = (0..n).map(|s| delta[i][k][s] * delta[s][j][l]).sum();
                        let r = (lhs - rhs).abs();
                        if r > w6.1 {
                            w6 = (r / s6, r, vec![i, j, k, l]);
                        }
                    }
                }
            }
        }
        let mut w8 = (T::zero(), T::zero(), vec![0; 3]);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = T::zero();
                    for s in 0..n {
                        for q in 0..n {
                            acc += (g[(i, s)] * eta(j, q) - eta(i, s) * g[(j, q)]) * dd[k][s][q];
                        }
                    }
                    if acc.abs() > w8.1 {
                        w8 = (acc.abs() / s8, acc.abs(), vec![i, j, k]);
                    }
                }
            }
        }
        Ok((w6, w8))
    })?;

    let part = |name: &str, tensor: &str, pick: &dyn Fn(&((T, T, Vec<usize>), (T, T, Vec<usize>))) -> (T, T, Vec<usize>)| {
        let mut best: Option<(T, T, Witness<T>)> = None;
        for (p, r) in &sampled.values {
            let (res, abs, ix) = pick(r);
            if best.as_ref().map_or(true, |b| res > b.0) {
                let w = Witness { point: p.coords().to_vec(), tensor: tensor.into(), indices: ix, lambda: None };
                best = Some((res, abs, w));
            }
        }
        let (res, abs, w) = best.expect("grid has survivors");
        Verdict {
            check: name.into(),
            status: Status::classify(res, tol),
            max_residual: res,
            max_abs_residual: abs,
            tolerance: tol,
            witness: Some(w),
            grid: sampled.summary,
            lambda_samples: Vec::new(),
            parts: Vec::new(),
        }
    };
    let v6 = part("delta_commutativity", "Delta^{ij}_s Delta^{sk}_l - Delta^{ik}_s Delta^{sj}_l", &|r| r.0.clone());
    let v8 = part("flat_pencil_condition", "(g1 eta - eta g1) dd f", &|r| r.1.clone());
    let status = v6.status.and(v8.status);
    let worst = if v8.max_residual > v6.max_residual { &v8 } else { &v6 };
    Ok(Verdict {
        check: "dubrovin_pencil".into(),
        status,
        max_residual: worst.max_residual,
        max_abs_residual: worst.max_abs_residual,
        tolerance: tol,
        witness: worst.witness.clone(),
        grid: sampled.summary,
        lambda_samples: Vec::new(),
        parts: vec![v6, v8],
    })
}
