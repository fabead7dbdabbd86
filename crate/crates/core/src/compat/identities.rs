use serde::Serialize;

use super::grid::{GridSummary, SampleGrid};
use crate::expr::Point;
use crate::tensor::{connection_from_jet, nijenhuis_of, obstruction_from, MetricPair, PairJets, TensorValue};
use crate::{Error, Result, Scalar};

/// Worst normalized residual of each identity relating `M` and `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResiduals<T> {
    pub mn1: T,
    pub mn2: T,
    pub mn3: T,
    /// Largest `|M|` and `|T|` seen, to tell vanishing sides from cancelling ones.
    pub max_m: T,
    pub max_t: T,
    pub grid: GridSummary,
}

impl<T: Scalar> IdentityResiduals<T> {
    pub fn max(&self) -> T {
        self.mn1.max(self.mn2).max(self.mn3)
    }
}

/// `T(i,j,k) = g1_{sp} N^p_{rq} g2^{ri} g2^{qj} g2^{sk}` and `M^{ijk}` at `p`.
pub fn lowered_nijenhuis<T: Scalar>(
    pair: &MetricPair,
    p: &Point<T>,
) -> Result<(Vec<T>, TensorValue<T>)> {
    let jets = PairJets::new(pair, p, 1)?;
    let n = pair.dim();
    let c1 = connection_from_jet(&jets.j1);
    let c2 = connection_from_jet(&jets.j2);
    let m = obstruction_from(&jets.j1, &jets.j2, &c1, &c2).m;
    let (v, dv) = jets.affinor();
    let nt = nijenhuis_of(&v, &dv);
    let (g1l, g2) = (&jets.j1.lo, &jets.j2.up);
    // a[s][r][q] = g1_{sp} N^p_{rq}, then raise r, q, s in turn
    let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let mut a = vec![T::zero(); n * n * n];
    for s in 0..n {
        for r in 0..n {
            for q in 0..n {
                a[idx(s, r, q)] = (0..n).map(|pp| g1l[(s, pp)] * nt.get(&[pp, r, q])).sum();
            }
        }
    }
    let mut b = vec![T::zero(); n * n * n];
    for s in 0..n {
        for i in 0..n {
            for q in 0..n {
                b[idx(s, i, q)] = (0..n).map(|r| a[idx(s, r, q)] * g2[(r, i)]).sum();
            }
        }
    }
    let mut c = vec![T::zero(); n * n * n];
    for s in 0..n {
        for i in 0..n {
            for j in 0..n {
                c[idx(s, i, j)] = (0..n).map(|q| b[idx(s, i, q)] * g2[(q, j)]).sum();
            }
        }
    }
    let mut t = vec![T::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                t[idx(i, j, k)] = (0..n).map(|s| c[idx(s, i, j)] * g2[(s, k)]).sum();
            }
        }
    }
    Ok((t, m))
}

/// Residuals of the three identities between the lowered Nijenhuis tensor `T`
/// and `M`, which hold for every pair:
///
/// `T(i,j,k) = -(M^{kij} + M^{jki} + M^{jik})`,
/// `2 (M^{jki} + M^{jik}) = -(T(i,j,k) + T(k,j,i))`,
/// `2 M^{kij} = -(T(i,j,k) - T(k,j,i))`.
///
/// Each residual is normalized by `1 + max|T| + max|M|` at its point.
pub fn verify_l2_identities<T: Scalar>(pair: &MetricPair, grid: &SampleGrid<T>) -> Result<IdentityResiduals<T>> {
    identities_with_sign(pair, grid, -T::one())
}

/// Same as [`verify_l2_identities`] with the sign in front of the `T` terms chosen by the caller.
pub fn identities_with_sign<T: Scalar>(
    pair: &MetricPair,
    grid: &SampleGrid<T>,
    sign: T,
) -> Result<IdentityResiduals<T>> {
    if grid.dim() != pair.dim() {
        return Err(Error::DimensionMismatch { expected: pair.dim(), found: grid.dim() });
    }
    let n = pair.dim();
    let two = T::lit(2.0);
    let sampled = grid.sample(|p| {
        let (t, m) = lowered_nijenhuis(pair, p)?;
        let tt = |i: usize, j: usize, k: usize| t[(i * n + j) * n + k];
        let mm = |i: usize, j: usize, k: usize| m.get(&[i, j, k]);
        let max_t = t.iter().fold(T::zero(), |a, x| a.max(x.abs()));
        let max_m = m.max_abs();
        let scale = T::one() + max_t + max_m;
        let (mut r1, mut r2, mut r3) = (T::zero(), T::zero(), T::zero());
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    r1 = r1.max((sign * tt(i, j, k) - (mm(k, i, j) + mm(j, k, i) + mm(j, i, k))).abs());
                    r2 = r2.max((two * (mm(j, k, i) + mm(j, i, k)) - sign * (tt(i, j, k) + tt(k, j, i))).abs());
                    r3 = r3.max((two * mm(k, i, j) - sign * (tt(i, j, k) - tt(k, j, i))).abs());
                }
            }
        }
        Ok([r1 / scale, r2 / scale, r3 / scale, max_m, max_t])
    })?;
    let mut acc = [T::zero(); 5];
    for (_, r) in &sampled.values {
        for (a, x) in acc.iter_mut().zip(r) {
            *a = a.max(*x);
        }
    }
    Ok(IdentityResiduals { mn1: acc[0], mn2: acc[1], mn3: acc[2], max_m: acc[3], max_t: acc[4], grid: sampled.summary })
}
