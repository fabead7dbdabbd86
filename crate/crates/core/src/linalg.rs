//! Small dense square matrices (N <= 8) and their spectra.

use num_complex::Complex;

use crate::{Error, Result, Scalar};

/// Largest chart dimension the crate accepts.
pub const MAX_DIM: usize = 8;

/// Relative determinant threshold below which a matrix counts as singular.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn diag(d: &[T]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { T::zero() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        let n = self.n;
        Matrix::from_fn(n, |i, j| (0..n).map(|s| self[(i, s)] * other[(s, j)]).sum())
    }

    pub fn scaled(&self, c: T) -> Matrix<T> {
        Matrix { n: self.n, data: self.data.iter().map(|&x| x * c).collect() }
    }

    pub fn add(&self, other: &Matrix<T>) -> Matrix<T> {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix<T>) -> Matrix<T> {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    /// Largest entry of `|self - other|`.
    pub fn max_abs_diff(&self, other: &Matrix<T>) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self[(i, j)] == T::zero()))
    }

    /// Determinant by partial-pivot elimination.
    pub fn det(&self) -> T {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].abs().partial_cmp(&a[y * n + col].abs()).unwrap())
                .unwrap_or(col);
            if a[pivot * n + col] == T::zero() {
                return T::zero();
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                if f != T::zero() {
                    for j in col..n {
                        let v = a[col * n + j];
                        a[r * n + j] -= f * v;
                    }
                }
            }
        }
        det
    }

    /// `|det|` divided by `max|a_ij|^n`; zero for the zero matrix.
    pub fn relative_det(&self) -> T {
        let scale = self.max_abs();
        if scale == T::zero() {
            return T::zero();
        }
        (self.scaled(T::one() / scale)).det().abs()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
///
/// Rejects matrices whose relative determinant is below [`DEGENERACY_TOL`].
pub fn invert_metric<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let n = m.dim();
    if n == 0 || n > MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    if m.data.iter().any(|x| !x.is_finite()) || m.relative_det() <= T::lit(DEGENERACY_TOL) {
        return Err(Error::DegenerateMetric { det: m.det().to_f64_lossy() });
    }
    let mut a = m.clone();
    let mut inv = Matrix::identity(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[(x, col)].abs().partial_cmp(&a[(y, col)].abs()).unwrap())
            .unwrap();
        if pivot != col {
            for j in 0..n {
                a.data.swap(pivot * n + j, col * n + j);
                inv.data.swap(pivot * n + j, col * n + j);
            }
        }
        let p = T::one() / a[(col, col)];
        for j in 0..n {
            a[(col, j)] *= p;
            inv[(col, j)] *= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[(r, col)];
            if f == T::zero() {
                continue;
            }
            for j in 0..n {
                let (av, iv) = (a[(col, j)], inv[(col, j)]);
                a[(r, j)] -= f * av;
                inv[(r, j)] -= f * iv;
            }
        }
    }
    Ok(inv)
}

/// Eigenvalues sorted by `(re, im)`.
///
/// Closed-form characteristic-polynomial roots for `n <= 3`, Hessenberg
/// reduction plus shifted QR iteration for `4 <= n <= 8`.
pub fn eigenvalues<T: Scalar>(m: &Matrix<T>) -> Result<Vec<Complex<T>>> {
    let mut ev = match m.dim() {
        0 => return Err(Error::UnsupportedDimension(0)),
        1 => vec![Complex::new(m[(0, 0)], T::zero())],
        2 => quadratic_roots(m.trace(), m.det()),
        3 => {
            let c2 = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)]
                - m[(0, 2)] * m[(2, 0)]
                + m[(1, 1)] * m[(2, 2)]
                - m[(1, 2)] * m[(2, 1)];
            cubic_roots(-m.trace(), c2, -m.det())
        }
        n if n <= MAX_DIM => hessenberg_qr(m)?,
        n => return Err(Error::UnsupportedDimension(n)),
    };
    sort_complex(&mut ev);
    Ok(ev)
}

pub(crate) fn sort_complex<T: Scalar>(v: &mut [Complex<T>]) {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Roots of `x^2 - trace x + det`.
fn quadratic_roots<T: Scalar>(trace: T, det: T) -> Vec<Complex<T>> {
    let half = trace / T::lit(2.0);
    let disc = half * half - det;
    if disc >= T::zero() {
        let q = half + half.signum() * disc.sqrt();
        if q == T::zero() {
            return vec![Complex::new(T::zero(), T::zero()); 2];
        }
        vec![Complex::new(q, T::zero()), Complex::new(det / q, T::zero())]
    } else {
        let im = (-disc).sqrt();
        vec![Complex::new(half, -im), Complex::new(half, im)]
    }
}

/// Roots of `x^3 + a x^2 + b x + c`.
fn cubic_roots<T: Scalar>(a: T, b: T, c: T) -> Vec<Complex<T>> {
    let three = T::lit(3.0);
    let q = (a * a - three * b) / T::lit(9.0);
    let r = (T::lit(2.0) * a * a * a - T::lit(9.0) * a * b + T::lit(27.0) * c) / T::lit(54.0);
    let shift = a / three;
    let poly = |x: T| ((x + a) * x + b) * x + c;
    let dpoly = |x: T| (three * x + T::lit(2.0) * a) * x + b;
    let polish = |mut x: T| {
        for _ in 0..2 {
            let d = dpoly(x);
            if d == T::zero() {
                break;
            }
            let step = poly(x) / d;
            if !step.is_finite() {
                break;
            }
            let nx = x - step;
            if poly(nx).abs() < poly(x).abs() {
                x = nx;
            } else {
                break;
            }
        }
        x
    };
    let q3 = q * q * q;
    if r * r < q3 {
        let theta = (r / q3.sqrt()).max(-T::one()).min(T::one()).acos();
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        let m = T::lit(-2.0) * q.sqrt();
        [theta, theta + two_pi, theta - two_pi]
            .into_iter()
            .map(|t| Complex::new(polish(m * (t / three).cos() - shift), T::zero()))
            .collect()
    } else {
        let big = -r.signum() * (r.abs() + (r * r - q3).sqrt()).cbrt();
        let small = if big == T::zero() { T::zero() } else { q / big };
        let real = polish(big + small - shift);
        let re = -(big + small) / T::lit(2.0) - shift;
        let im = T::lit(3.0f64.sqrt() / 2.0) * (big - small);
        vec![
            Complex::new(real, T::zero()),
            Complex::new(re, -im.abs()),
            Complex::new(re, im.abs()),
        ]
    }
}

/// Eigenvalues of a general real matrix: elimination to upper Hessenberg form
/// followed by Francis double-shift QR.
pub fn hessenberg_qr<T: Scalar>(m: &Matrix<T>) -> Result<Vec<Complex<T>>> {
    let n = m.dim();
    let mut a = m.rows();
    reduce_to_hessenberg(&mut a);
    for (i, row) in a.iter_mut().enumerate() {
        for x in row.iter_mut().take(i.saturating_sub(1)) {
            *x = T::zero();
        }
    }
    hqr(a, n)
}

fn reduce_to_hessenberg<T: Scalar>(a: &mut [Vec<T>]) {
    let n = a.len();
    for m in 1..n.saturating_sub(1) {
        let mut x = T::zero();
        let mut piv = m;
        for (j, row) in a.iter().enumerate().skip(m) {
            if row[m - 1].abs() > x.abs() {
                x = row[m - 1];
                piv = j;
            }
        }
        if piv != m {
            a.swap(piv, m);
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x != T::zero() {
            for i in m + 1..n {
                let mut y = a[i][m - 1];
                if y != T::zero() {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..n {
                        let t = a[m][j];
                        a[i][j] -= y * t;
                    }
                    for row in a.iter_mut() {
                        let t = row[i];
                        row[m] += y * t;
                    }
                }
            }
        }
    }
}

fn sign<T: Scalar>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

#[allow(clippy::many_single_char_names)]
fn hqr<T: Scalar>(mut a: Vec<Vec<T>>, n: usize) -> Result<Vec<Complex<T>>> {
    let zero = T::zero();
    let mut wr = vec![zero; n];
    let mut wi = vec![zero; n];
    let mut anorm = zero;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = zero;
    let (mut p, mut q, mut r): (T, T, T);
    let (mut x, mut y, mut z);
    while nn >= 0 {
        let nu = nn as usize;
        let mut its = 0;
        loop {
            let mut l = nu;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == zero {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = zero;
                    break;
                }
                l -= 1;
            }
            x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = zero;
                nn -= 1;
                break;
            }
            y = a[nu - 1][nu - 1];
            let w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                p = T::lit(0.5) * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x += t;
                if q >= zero {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != zero {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = zero;
                    wi[nu] = zero;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return Err(Error::InternalInconsistency(
                    "QR iteration did not converge".into(),
                ));
            }
            let mut w = w;
            if its == 10 || its == 20 {
                t += x;
                for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = T::lit(0.75) * s;
                y = x;
                w = T::lit(-0.4375) * s * s;
            }
            its += 1;
            let mut m = nu - 2;
            loop {
                z = a[m][m];
                r = x - z;
                let s = y - z;
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r - s;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = zero;
                if i != m + 2 {
                    a[i][i - 3] = zero;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = zero;
                    if k != nu - 1 {
                        r = a[k + 2][k - 1];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != zero {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != zero {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        p = a[k][j] + q * a[k + 1][j];
                        if k != nu - 1 {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for row in a.iter_mut().take(mmin + 1).skip(l) {
                        p = x * row[k] + y * row[k + 1];
                        if k != nu - 1 {
                            p += z * row[k + 2];
                            row[k + 2] -= p * r;
                        }
                        row[k + 1] -= p * q;
                        row[k] -= p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex::new(re, im)).collect())
}

/// Smallest pairwise distance between entries of `ev`; infinite for fewer than two.
pub fn min_gap<T: Scalar>(ev: &[Complex<T>]) -> T {
    let mut gap = T::infinity();
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            gap = gap.min((ev[i] - ev[j]).norm());
        }
    }
    gap
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
        let mut m = Matrix::from_fn(n, |_, _| 0.0);
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
            m[(i, i)] += 3.0 * if i % 2 == 0 { 1.0 } else { -1.0 };
        }
        m
    }

    #[test]
    fn inverse_examples() {
        let id = Matrix::<f64>::identity(3);
        assert_eq!(invert_metric(&id).unwrap(), id);
        let a: f64 = 0.7;
        let d = Matrix::diag(&[a.exp(), a.exp()]);
        let inv = invert_metric(&d).unwrap();
        assert!((inv[(0, 0)] - (-a).exp()).abs() < 1e-15);
        assert_eq!(inv[(0, 1)], 0.0);
    }

    #[test]
    fn inverse_multiplies_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = random_symmetric(&mut rng, 3);
            let inv = invert_metric(&m).unwrap();
            let err = m.mul(&inv).max_abs_diff(&Matrix::identity(3));
            assert!(err < 1e-10, "err {err}");
        }
    }

    #[test]
    fn degenerate_is_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(invert_metric(&m), Err(Error::DegenerateMetric { .. })));
        assert!(matches!(invert_metric(&Matrix::<f64>::zeros(2)), Err(Error::DegenerateMetric { .. })));
        assert!(matches!(invert_metric(&Matrix::<f64>::identity(9)), Err(Error::UnsupportedDimension(9))));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = Matrix::<f64>::from_rows(&[
            vec![2.0, -1.0, 0.5],
            vec![0.3, 4.0, 1.0],
            vec![-2.0, 0.0, 1.5],
        ])
        .unwrap();
        let cof = 2.0 * (4.0 * 1.5 - 1.0 * 0.0) - (-1.0) * (0.3 * 1.5 - 1.0 * (-2.0))
            + 0.5 * (0.3 * 0.0 - 4.0 * (-2.0));
        assert!((m.det() - cof).abs() < 1e-13);
    }

    #[test]
    fn repeated_eigenvalues() {
        for n in 1..=5 {
            let ev = eigenvalues(&Matrix::<f64>::identity(n).scaled(3.0)).unwrap();
            assert_eq!(ev.len(), n);
            for z in &ev {
                assert!((z.re - 3.0).abs() < 1e-9 && z.im.abs() < 1e-9, "{z}");
            }
        }
    }

    #[test]
    fn complex_pair_from_rotation() {
        let m = Matrix::from_rows(&[vec![0.0, -2.0], vec![2.0, 0.0]]).unwrap();
        let ev = eigenvalues(&m).unwrap();
        assert!((ev[0] - Complex::new(0.0, -2.0)).norm() < 1e-14);
        assert!((ev[1] - Complex::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn closed_forms_agree_with_qr() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=3 {
            for _ in 0..100 {
                let m = Matrix::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
                let mut closed = eigenvalues(&m).unwrap();
                let mut qr = hessenberg_qr(&m).unwrap();
                sort_complex(&mut closed);
                sort_complex(&mut qr);
                for (a, b) in closed.iter().zip(&qr) {
                    assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()), "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn qr_trace_and_determinant_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 4..=8 {
            for _ in 0..20 {
                let m = Matrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
                let ev = eigenvalues(&m).unwrap();
                let sum: Complex<f64> = ev.iter().sum();
                let prod: Complex<f64> = ev.iter().product();
                assert!((sum.re - m.trace()).abs() < 1e-9 && sum.im.abs() < 1e-9);
                assert!((prod.re - m.det()).abs() < 1e-9 && prod.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gap_of_simple_spectrum() {
        let ev = vec![Complex::new(1.0, 0.0), Complex::new(3.5, 0.0), Complex::new(2.0, 0.0)];
        assert_eq!(min_gap(&ev), 1.0);
        assert!(min_gap::<f64>(&ev[..1]).is_infinite());
    }
}
