//! Seeded generators for random expressions and metrics.
//!
//! The seed comes from `PENCILLAB_SEED` when set, so a failing run can be
//! replayed exactly.
#![allow(dead_code)]

use pencillab_core::expr::{BinOp, Func};
use pencillab_core::{Expr, MetricField, MetricPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_0f_9e_c1_15;

pub fn seed() -> u64 {
    std::env::var("PENCILLAB_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

/// Independent stream `stream` of the session seed.
pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed() ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Two-decimal constant in `[lo, hi]`, so printed forms stay short.
pub fn coef(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (r.gen_range(lo..=hi) * 100.0).round() / 100.0
}

fn leaf(r: &mut ChaCha8Rng, n: usize) -> Expr {
    if r.gen_bool(0.6) {
        Expr::var(r.gen_range(0..n))
    } else {
        Expr::constant(coef(r, -1.0, 1.0))
    }
}

/// Expression finite and smooth on all of R^n: logs, roots and quotients
/// are guarded (`ln(1 + a^2)`, `sqrt(1 + a^2)`, `a / (2 + cos b)`) and
/// exponents are damped.
pub fn smooth_expr(r: &mut ChaCha8Rng, n: usize, depth: usize) -> Expr {
    if depth == 0 || r.gen_bool(0.2) {
        return leaf(r, n);
    }
    let d = depth - 1;
    match r.gen_range(0..10) {
        0 => smooth_expr(r, n, d) + smooth_expr(r, n, d),
        1 => smooth_expr(r, n, d) - smooth_expr(r, n, d),
        2 | 3 => smooth_expr(r, n, d) * smooth_expr(r, n, d),
        4 => (0.5 * smooth_expr(r, n, d)).exp(),
        5 => smooth_expr(r, n, d).sin(),
        6 => smooth_expr(r, n, d).cos(),
        7 => (1.0 + smooth_expr(r, n, d).powi(2)).ln(),
        8 => (1.0 + smooth_expr(r, n, d).powi(2)).sqrt(),
        _ => Expr::binary(BinOp::Div, &smooth_expr(r, n, d), &(2.0 + smooth_expr(r, n, d).apply(Func::Cos))),
    }
}

/// Polynomial-exponential expression: sums, products and damped exponentials
/// of coordinates and constants.
pub fn poly_exp(r: &mut ChaCha8Rng, n: usize, depth: usize) -> Expr {
    if depth == 0 || r.gen_bool(0.25) {
        return leaf(r, n);
    }
    let d = depth - 1;
    match r.gen_range(0..4) {
        0 => poly_exp(r, n, d) + poly_exp(r, n, d),
        1 => poly_exp(r, n, d) * poly_exp(r, n, d),
        2 => (0.5 * poly_exp(r, n, d)).exp(),
        _ => coef(r, -1.0, 1.0) * poly_exp(r, n, d),
    }
}

/// Strictly positive poly-exp factor `exp(p / 2)`.
pub fn positive(r: &mut ChaCha8Rng, n: usize, depth: usize) -> Expr {
    (0.5 * poly_exp(r, n, depth)).exp()
}

/// Random symmetric metric with poly-exp components of depth at most 4:
/// `+-exp(p_i / 2)` on the diagonal plus damped off-diagonal terms.
pub fn random_metric(r: &mut ChaCha8Rng, n: usize, label: &str) -> MetricField {
    let mut rows = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        let s = if r.gen_bool(0.75) { 1.0 } else { -1.0 };
        rows[i][i] = s * (1.5 + positive(r, n, 3));
        for j in 0..i {
            let e = 0.3 * poly_exp(r, n, 3);
            rows[i][j] = e.clone();
            rows[j][i] = e;
        }
    }
    MetricField::new(rows, label).expect("random metric is valid")
}

pub fn random_pair(r: &mut ChaCha8Rng, n: usize) -> MetricPair {
    MetricPair::new(random_metric(r, n, "g1"), random_metric(r, n, "g2")).expect("same dimension")
}

/// Function of the single coordinate `u^i`, nonvanishing on `[-1, 1]`.
pub fn single_variable(r: &mut ChaCha8Rng, i: usize) -> Expr {
    let u = Expr::var(i);
    let a = coef(r, 0.2, 1.0);
    let b = coef(r, -1.0, 1.0);
    match r.gen_range(0..4) {
        0 => (2.0 + b) + a * &u,
        1 => 1.0 + a * u.powi(2) + b * 0.3 * &u,
        2 => (a * &u).exp() + b,
        _ => 2.5 + (a * &u).sin() + b * u.powi(3),
    }
}

/// Diagonal entries `exp(p_i / 2)` with poly-exp `p_i`.
pub fn positive_diagonal(r: &mut ChaCha8Rng, n: usize, depth: usize) -> Vec<Expr> {
    (0..n).map(|_| positive(r, n, depth)).collect()
}
