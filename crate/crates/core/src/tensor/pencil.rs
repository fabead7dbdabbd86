//! Objects built from a pair of metrics: the affinor `v = g1 g2^{-1}`, its
//! Nijenhuis tensor, and the obstruction tensors `M` and `Delta`.

use super::connection::{connection_from_jet, Connection};
use super::metric::{MetricJet, MetricPair};
use super::value::{TensorValue, Variance::*};
use crate::expr::Point;
use crate::linalg::Matrix;
use crate::{Error, Result, Scalar};

/// Jets of both metrics of a pair at one point.
#[derive(Debug, Clone)]
pub struct PairJets<T> {
    pub j1: MetricJet<T>,
    pub j2: MetricJet<T>,
}

impl<T: Scalar> PairJets<T> {
    pub fn new(pair: &MetricPair, p: &Point<T>, order: usize) -> Result<Self> {
        if p.dim() != pair.dim() {
            return Err(Error::DimensionMismatch { expected: pair.dim(), found: p.dim() });
        }
        Ok(PairJets { j1: pair.g1.jet(p, order)?, j2: pair.g2.jet(p, order)? })
    }

    /// `v^i_j = g1^{is} g2_{sj}` and its partials `d_a v^i_j` (index `[a]`).
    pub fn affinor(&self) -> (Matrix<T>, Vec<Matrix<T>>) {
        let v = self.j1.up.mul(&self.j2.lo);
        let dv = (0..self.j1.n)
            .map(|a| self.j1.d_up[a].mul(&self.j2.lo).add(&self.j1.up.mul(&self.j2.d_lo[a])))
            .collect();
        (v, dv)
    }
}

/// Mixed tensor `v^i_j = g1^{is} g2_{sj}` at `p`.
pub fn affinor<T: Scalar>(pair: &MetricPair, p: &Point<T>) -> Result<TensorValue<T>> {
    let (v, _) = PairJets::new(pair, p, 1)?.affinor();
    Ok(TensorValue::from_fn(pair.dim(), &[Upper, Lower], |ix| v[(ix[0], ix[1])]))
}

/// Nijenhuis tensor of an affinor with known partial derivatives.
///
/// `N^k_{ij} = v^s_i d_s v^k_j - v^s_j d_s v^k_i + v^k_s d_j v^s_i - v^k_s d_i v^s_j`,
/// stored with slot order `(k, i, j)`.
pub fn nijenhuis_of<T: Scalar>(v: &Matrix<T>, dv: &[Matrix<T>]) -> TensorValue<T> {
    let n = v.dim();
    TensorValue::from_fn(n, &[Upper, Lower, Lower], |ix| {
        let (k, i, j) = (ix[0], ix[1], ix[2]);
        (0..n)
            .map(|s| {
                v[(s, i)] * dv[s][(k, j)] - v[(s, j)] * dv[s][(k, i)] + v[(k, s)] * dv[j][(s, i)]
                    - v[(k, s)] * dv[i][(s, j)]
            })
            .sum()
    })
}

/// Nijenhuis tensor `N^k_{ij}` of the pair's affinor at `p`.
pub fn nijenhuis<T: Scalar>(pair: &MetricPair, p: &Point<T>) -> Result<TensorValue<T>> {
    let (v, dv) = PairJets::new(pair, p, 1)?.affinor();
    Ok(nijenhuis_of(&v, &dv))
}

/// `M^{ijk}`, `Delta^{ijk}` and `Delta^{ij}_k` of a pair.
#[derive(Debug, Clone)]
pub struct Obstruction<T> {
    pub m: TensorValue<T>,
    pub delta: TensorValue<T>,
    pub delta_low: TensorValue<T>,
}

/// Builds the obstruction tensors from the two metrics' jets and connections.
///
/// `M^{ijk} = g1^{is} Gamma2^{jk}_s - g2^{js} Gamma1^{ik}_s - g1^{js} Gamma2^{ik}_s + g2^{is} Gamma1^{jk}_s`,
/// `Delta^{ijk} = g1^{is} g2^{jp} (Gamma2^k_{ps} - Gamma1^k_{ps})`,
/// `Delta^{ij}_k = g2_{ks} Delta^{sij}`.
pub fn obstruction_from<T: Scalar>(
    j1: &MetricJet<T>,
    j2: &MetricJet<T>,
    c1: &Connection<T>,
    c2: &Connection<T>,
) -> Obstruction<T> {
    let n = j1.n;
    let (g1, g2) = (&j1.up, &j2.up);
    let (u1, u2) = (&c1.gamma_up, &c2.gamma_up);
    let m = TensorValue::from_fn(n, &[Upper, Upper, Upper], |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        (0..n)
            .map(|s| {
                g1[(i, s)] * u2.get(&[j, k, s]) - g2[(j, s)] * u1.get(&[i, k, s])
                    - g1[(j, s)] * u2.get(&[i, k, s])
                    + g2[(i, s)] * u1.get(&[j, k, s])
            })
            .sum()
    });
    let diff = c2.gamma.combine(T::one(), &c1.gamma, -T::one());
    let delta = TensorValue::from_fn(n, &[Upper, Upper, Upper], |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        let mut acc = T::zero();
        for s in 0..n {
            for p in 0..n {
                acc += g1[(i, s)] * g2[(j, p)] * diff.get(&[k, p, s]);
            }
        }
        acc
    });
    let delta_low = TensorValue::from_fn(n, &[Upper, Upper, Lower], |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        (0..n).map(|s| j2.lo[(k, s)] * delta.get(&[s, i, j])).sum()
    });
    Obstruction { m, delta, delta_low }
}

/// `(M^{ijk}, Delta^{ijk}, Delta^{ij}_k)` of the pair at `p`.
pub fn m_tensor<T: Scalar>(
    pair: &MetricPair,
    p: &Point<T>,
) -> Result<(TensorValue<T>, TensorValue<T>, TensorValue<T>)> {
    let jets = PairJets::new(pair, p, 1)?;
    let c1 = connection_from_jet(&jets.j1);
    let c2 = connection_from_jet(&jets.j2);
    let o = obstruction_from(&jets.j1, &jets.j2, &c1, &c2);
    Ok((o.m, o.delta, o.delta_low))
}
