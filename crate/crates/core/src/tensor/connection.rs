//! Levi-Civita connection and Riemann curvature at a point.
//!
//! Conventions:
//! `Gamma^i_{jk} = 1/2 g^{is} (d_j g_{sk} + d_k g_{js} - d_s g_{jk})`,
//! `Gamma^{ij}_k = g^{is} Gamma^j_{sk}`,
//! `R^i_{jkl} = -d_k Gamma^i_{jl} + d_l Gamma^i_{jk} - Gamma^i_{pk} Gamma^p_{jl} + Gamma^i_{pl} Gamma^p_{jk}`,
//! `R^{ij}_{kl} = g^{is} R^j_{skl}`.
//! With these signs a metric of constant curvature `K` has
//! `R^{ij}_{kl} = K (delta^i_k delta^j_l - delta^i_l delta^j_k)` and the round sphere has `K > 0`.

use super::metric::{MetricField, MetricJet};
use super::value::{TensorValue, Variance::*};
use crate::expr::Point;
use crate::{Error, Result, Scalar};

/// Connection coefficients in both index placements.
#[derive(Debug, Clone)]
pub struct Connection<T> {
    /// `Gamma^i_{jk}`, slots (upper, lower, lower)
    pub gamma: TensorValue<T>,
    /// `Gamma^{ij}_k`, slots (upper, upper, lower)
    pub gamma_up: TensorValue<T>,
}

/// Connection plus curvature, with the magnitude of the terms that enter `R`.
#[derive(Debug, Clone)]
pub struct Curvature<T> {
    pub connection: Connection<T>,
    /// `R^i_{jkl}`
    pub riemann: TensorValue<T>,
    /// `R^{ij}_{kl}`
    pub riemann_up: TensorValue<T>,
    /// `max(|Gamma|^2, |d Gamma|)`: the size of the terms that cancel inside `R`.
    pub term_scale: T,
}

/// Christoffel symbols of the first kind `C_{sjk}`, flat `[s][j][k]`.
fn first_kind<T: Scalar>(jet: &MetricJet<T>) -> Vec<T> {
    let n = jet.n;
    let half = T::lit(0.5);
    let mut c = vec![T::zero(); n * n * n];
    for s in 0..n {
        for j in 0..n {
            for k in j..n {
                let v = half * (jet.d_lo[j][(s, k)] + jet.d_lo[k][(j, s)] - jet.d_lo[s][(j, k)]);
                c[(s * n + j) * n + k] = v;
                c[(s * n + k) * n + j] = v;
            }
        }
    }
    c
}

pub fn connection_from_jet<T: Scalar>(jet: &MetricJet<T>) -> Connection<T> {
    let n = jet.n;
    let c = first_kind(jet);
    let gamma = TensorValue::from_fn(n, &[Upper, Lower, Lower], |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        (0..n).map(|s| jet.up[(i, s)] * c[(s * n + j) * n + k]).sum()
    });
    let gamma_up = raise_first(jet, &gamma);
    Connection { gamma, gamma_up }
}

fn raise_first<T: Scalar>(jet: &MetricJet<T>, gamma: &TensorValue<T>) -> TensorValue<T> {
    let n = jet.n;
    TensorValue::from_fn(n, &[Upper, Upper, Lower], |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        (0..n).map(|s| jet.up[(i, s)] * gamma.get(&[j, s, k])).sum()
    })
}

/// Curvature from an order-2 jet.
///
/// # Panics
/// If the jet carries no second derivatives.
pub fn curvature_from_jet<T: Scalar>(jet: &MetricJet<T>) -> Curvature<T> {
    let n = jet.n;
    let dd_lo = jet.dd_lo.as_ref().expect("curvature needs an order-2 jet");
    let half = T::lit(0.5);
    let connection = connection_from_jet(jet);
    let c = first_kind(jet);
    let g = &connection.gamma;

    // dgamma[(l, i, j, k)] = d_l Gamma^i_{jk}
    let dgamma = TensorValue::from_fn(n, &[Lower, Upper, Lower, Lower], |ix| {
        let (l, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        let dd = |a: usize, b: usize, r: usize, s: usize| dd_lo[a * n + b][(r, s)];
        (0..n)
            .map(|s| {
                let dc = half * (dd(l, j, s, k) + dd(l, k, j, s) - dd(l, s, j, k));
                jet.d_up[l][(i, s)] * c[(s * n + j) * n + k] + jet.up[(i, s)] * dc
            })
            .sum::<T>()
    });

    let riemann = TensorValue::from_fn(n, &[Upper, Lower, Lower, Lower], |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let quad: T = (0..n)
            .map(|p| -g.get(&[i, p, k]) * g.get(&[p, j, l]) + g.get(&[i, p, l]) * g.get(&[p, j, k]))
            .sum();
        -dgamma.get(&[k, i, j, l]) + dgamma.get(&[l, i, j, k]) + quad
    });
    let riemann_up = TensorValue::from_fn(n, &[Upper, Upper, Lower, Lower], |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        (0..n).map(|s| jet.up[(i, s)] * riemann.get(&[j, s, k, l])).sum()
    });
    let gmax = g.max_abs();
    let term_scale = (gmax * gmax).max(dgamma.max_abs());
    Curvature { connection, riemann, riemann_up, term_scale }
}

/// `(Gamma^i_{jk}, Gamma^{ij}_k)` of `g` at `p`.
pub fn christoffel<T: Scalar>(g: &MetricField, p: &Point<T>) -> Result<(TensorValue<T>, TensorValue<T>)> {
    let c = connection_from_jet(&g.jet(p, 1)?);
    Ok((c.gamma, c.gamma_up))
}

/// `(R^i_{jkl}, R^{ij}_{kl})` of `g` at `p`.
pub fn riemann<T: Scalar>(g: &MetricField, p: &Point<T>) -> Result<(TensorValue<T>, TensorValue<T>)> {
    let c = curvature_from_jet(&g.jet(p, 2)?);
    Ok((c.riemann, c.riemann_up))
}

/// Full curvature record of `g` at `p`.
pub fn curvature<T: Scalar>(g: &MetricField, p: &Point<T>) -> Result<Curvature<T>> {
    if p.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: p.dim() });
    }
    Ok(curvature_from_jet(&g.jet(p, 2)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::evaluate;
    use crate::linalg::invert_metric;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec())
    }

    #[test]
    fn constant_metric_has_zero_connection_and_curvature() {
        let g = MetricField::constant(&[vec![2.0, 0.5], vec![0.5, -1.0]], "eta").unwrap();
        let (gam, gam_up) = christoffel(&g, &pt(&[0.1, 0.2])).unwrap();
        assert_eq!(gam.max_abs(), 0.0);
        assert_eq!(gam_up.max_abs(), 0.0);
        let (r, r_up) = riemann(&g, &pt(&[0.1, 0.2])).unwrap();
        assert_eq!(r.max_abs(), 0.0);
        assert_eq!(r_up.max_abs(), 0.0);
    }

    #[test]
    fn diagonal_christoffel_closed_forms() {
        // g^{ii} = exp(u1 u2) for both i, at (0.3, 0.7)
        let g = MetricField::parse(&[vec!["exp(u1*u2)", "0"], vec!["0", "exp(u1*u2)"]], "g").unwrap();
        let p = pt(&[0.3, 0.7]);
        let (gam, _) = christoffel(&g, &p).unwrap();
        let gi = g.component(0, 0);
        let val = evaluate(gi, &p).unwrap();
        let d = |k: usize| evaluate(&gi.differentiate(k), &p).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let want = -d(k) / (2.0 * val);
                assert!((gam.get(&[i, i, k]) - want).abs() < 1e-14);
            }
            let j = 1 - i;
            let want = 0.5 * val / (val * val) * d(i);
            assert!((gam.get(&[i, j, j]) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn christoffel_matches_finite_difference_oracle() {
        let g = MetricField::parse(
            &[vec!["1+u1^2", "0.3*u2"], vec!["0.3*u2", "2+sin(u1)"]],
            "g",
        )
        .unwrap();
        let p = pt(&[0.4, -0.2]);
        let (gam, _) = christoffel(&g, &p).unwrap();
        let h = 1e-5;
        let lo_at = |q: &Point| invert_metric(&g.at(q).unwrap()).unwrap();
        let d_lo = |a: usize, i: usize, j: usize| {
            (lo_at(&p.shifted(a, h))[(i, j)] - lo_at(&p.shifted(a, -h))[(i, j)]) / (2.0 * h)
        };
        let up = g.at(&p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let want: f64 = (0..2)
                        .map(|s| 0.5 * up[(i, s)] * (d_lo(j, s, k) + d_lo(k, j, s) - d_lo(s, j, k)))
                        .sum();
                    assert!((gam.get(&[i, j, k]) - want).abs() < 1e-6);
                    assert_eq!(gam.get(&[i, j, k]), gam.get(&[i, k, j]));
                }
            }
        }
    }

    #[test]
    fn harmonic_conformal_factor_is_flat() {
        let g = MetricField::parse(&[vec!["exp(u1*u2)", "0"], vec!["0", "exp(u1*u2)"]], "g").unwrap();
        for c in [[0.3, 0.7], [-1.0, 1.0], [0.9, -0.5]] {
            let (r, r_up) = riemann(&g, &pt(&c)).unwrap();
            assert!(r.max_abs() < 1e-9 && r_up.max_abs() < 1e-9);
        }
    }

    #[test]
    fn curvature_antisymmetries() {
        let g = MetricField::parse(
            &[
                vec!["2+u1*u2", "0.2*sin(u3)", "0.1*u1"],
                vec!["0.2*sin(u3)", "3+u2^2", "0.3*u1*u3"],
                vec!["0.1*u1", "0.3*u1*u3", "1+exp(u2)"],
            ],
            "g",
        )
        .unwrap();
        let (_, r) = riemann(&g, &pt(&[0.3, -0.4, 0.5])).unwrap();
        assert!(r.max_abs() > 1e-3);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let v = r.get(&[i, j, k, l]);
                        assert!((v + r.get(&[j, i, k, l])).abs() < 1e-10);
                        assert!((v + r.get(&[i, j, l, k])).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn stereographic_sphere_has_unit_curvature() {
        let g = MetricField::parse(
            &[
                vec!["exp(2*ln(1+(u1^2+u2^2)/4))", "0"],
                vec!["0", "exp(2*ln(1+(u1^2+u2^2)/4))"],
            ],
            "sphere",
        )
        .unwrap();
        let (_, r) = riemann(&g, &pt(&[0.3, 0.4])).unwrap();
        assert!((r.get(&[0, 1, 0, 1]) - 1.0).abs() < 1e-12);
        assert!((r.get(&[0, 1, 1, 0]) + 1.0).abs() < 1e-12);
    }
}
