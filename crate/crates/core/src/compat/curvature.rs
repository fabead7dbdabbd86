use serde::Serialize;

use super::grid::{GridSummary, SampleGrid};
use super::verdict::Witness;
use crate::tensor::{curvature, MetricField, TensorValue, Variance::*};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureKind {
    Flat,
    ConstantCurvature,
    General,
}

/// Curvature type of a metric over a grid.
///
/// `k` is the grid median of `R^{12}_{12}` whatever the kind; it is the
/// constant curvature only when `kind` says so.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureClass<T> {
    pub kind: CurvatureKind,
    pub k: T,
    /// Normalized `max |R^{ij}_{kl}|`
    pub flat_residual: T,
    /// Normalized `max |R^{ij}_{kl} - k (d^i_k d^j_l - d^i_l d^j_k)|`
    pub constant_residual: T,
    pub tolerance: T,
    pub witness: Option<Witness<T>>,
    pub grid: GridSummary,
}

impl<T: Scalar> CurvatureClass<T> {
    pub fn is_flat(&self) -> bool {
        self.kind == CurvatureKind::Flat
    }

    /// The curvature constant when the metric has constant nonzero curvature.
    pub fn constant_k(&self) -> Option<T> {
        (self.kind == CurvatureKind::ConstantCurvature).then_some(self.k)
    }
}

/// `K (d^i_k d^j_l - d^i_l d^j_k)` as a `(U, U, L, L)` tensor.
pub fn constant_curvature_tensor<T: Scalar>(n: usize, k: T) -> TensorValue<T> {
    TensorValue::from_fn(n, &[Upper, Upper, Lower, Lower], |ix| {
        let d = |a: usize, b: usize| if a == b { T::one() } else { T::zero() };
        k * (d(ix[0], ix[2]) * d(ix[1], ix[3]) - d(ix[0], ix[3]) * d(ix[1], ix[2]))
    })
}

fn median<T: Scalar>(mut xs: Vec<T>) -> T {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) * T::lit(0.5)
    }
}

/// Flat if every `R^{ij}_{kl}` vanishes; otherwise constant curvature if the
/// tensor matches `K (d d - d d)` for the median `K`; otherwise general.
pub fn classify_curvature<T: Scalar>(g: &MetricField, grid: &SampleGrid<T>, tol: T) -> Result<CurvatureClass<T>> {
    if grid.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: grid.dim() });
    }
    let n = g.dim();
    let sampled = grid.sample(|p| {
        let c = curvature(g, p)?;
        let scale = T::one() + g.at(p)?.max_abs() * c.term_scale;
        Ok((c.riemann_up, scale))
    })?;
    let k = if n >= 2 {
        median(sampled.values.iter().map(|(_, (r, _))| r.get(&[0, 1, 0, 1])).collect())
    } else {
        T::zero()
    };
    let model = constant_curvature_tensor(n, k);
    let (mut flat, mut cons) = (T::zero(), T::zero());
    let mut witness = None;
    for (p, (r, scale)) in &sampled.values {
        let (fa, _) = r.argmax_abs();
        flat = flat.max(fa / *scale);
        let (ca, at) = r.max_abs_diff(&model);
        if witness.is_none() || ca / *scale > cons {
            cons = ca / *scale;
            witness = Some(Witness { point: p.coords().to_vec(), tensor: "R^{ij}_{kl}".into(), indices: at, lambda: None });
        }
    }
    let kind = if flat <= tol {
        CurvatureKind::Flat
    } else if cons <= tol {
        CurvatureKind::ConstantCurvature
    } else {
        CurvatureKind::General
    };
    Ok(CurvatureClass { kind, k, flat_residual: flat, constant_residual: cons, tolerance: tol, witness, grid: sampled.summary })
}
