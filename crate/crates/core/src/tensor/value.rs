use serde::Serialize;

use crate::Scalar;

/// Position of one tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Upper,
    Lower,
}

/// Dense tensor at a single point, `dim^rank` components in row-major slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue<T> {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<T>,
}

impl<T: Scalar> TensorValue<T> {
    pub fn zeros(dim: usize, variance: &[Variance]) -> Self {
        let len = dim.pow(variance.len() as u32);
        TensorValue { dim, variance: variance.to_vec(), data: vec![T::zero(); len] }
    }

    /// Builds a tensor by calling `f` with each multi-index in row-major order.
    pub fn from_fn(dim: usize, variance: &[Variance], mut f: impl FnMut(&[usize]) -> T) -> Self {
        let mut t = Self::zeros(dim, variance);
        let mut idx = vec![0; variance.len()];
        for flat in 0..t.data.len() {
            let mut rem = flat;
            for slot in (0..idx.len()).rev() {
                idx[slot] = rem % dim;
                rem /= dim;
            }
            t.data[flat] = f(&idx);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    fn flat(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.rank(), "index arity does not match tensor rank");
        idx.iter().fold(0, |acc, &i| {
            assert!(i < self.dim, "index {i} out of range for dimension {}", self.dim);
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: T) {
        let f = self.flat(idx);
        self.data[f] = v;
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Largest component of `|self - other|` and the multi-index where it occurs.
    ///
    /// # Panics
    /// If the two tensors differ in dimension or variance.
    pub fn max_abs_diff(&self, other: &TensorValue<T>) -> (T, Vec<usize>) {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.variance, other.variance, "variance mismatch");
        let (mut best, mut at) = (T::zero(), 0);
        for (k, (a, b)) in self.data.iter().zip(&other.data).enumerate() {
            let d = (*a - *b).abs();
            if d > best || d.is_nan() {
                best = d;
                at = k;
            }
        }
        (best, self.unflatten(at))
    }

    /// Largest component magnitude and its multi-index.
    pub fn argmax_abs(&self) -> (T, Vec<usize>) {
        let (mut best, mut at) = (T::zero(), 0);
        for (k, a) in self.data.iter().enumerate() {
            if a.abs() > best || a.is_nan() {
                best = a.abs();
                at = k;
            }
        }
        (best, self.unflatten(at))
    }

    fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.rank()];
        for slot in (0..idx.len()).rev() {
            idx[slot] = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    /// `a*self + b*other`, same shape required.
    pub fn combine(&self, a: T, other: &TensorValue<T>, b: T) -> TensorValue<T> {
        assert_eq!(self.variance, other.variance, "variance mismatch");
        TensorValue {
            dim: self.dim,
            variance: self.variance.clone(),
            data: self.data.iter().zip(&other.data).map(|(&x, &y)| a * x + b * y).collect(),
        }
    }

    pub fn scaled(&self, a: T) -> TensorValue<T> {
        TensorValue {
            dim: self.dim,
            variance: self.variance.clone(),
            data: self.data.iter().map(|&x| a * x).collect(),
        }
    }
}
