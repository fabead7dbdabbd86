use rayon::prelude::*;
use serde::Serialize;

use crate::expr::{evaluate, Expr, Point};
use crate::{Error, Result, Scalar};

/// Fewest admissible points a check will accept.
pub const MIN_SURVIVORS: usize = 3;

/// Default distance from an excluded locus below which a point is dropped.
pub const DEFAULT_LOCUS_TOL: f64 = 0.1;

/// Tensor-product grid over a box, with loci to stay away from.
#[derive(Debug, Clone)]
pub struct SampleGrid<T> {
    bounds: Vec<(T, T)>,
    points_per_axis: usize,
    excluded_loci: Vec<Expr>,
    locus_tol: T,
}

/// Counts reported alongside every grid-based result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSummary {
    pub points_total: usize,
    pub points_used: usize,
    pub points_rejected: usize,
}

/// Per-point results of a grid evaluation, in grid order.
#[derive(Debug, Clone)]
pub struct Sampled<T, R> {
    pub values: Vec<(Point<T>, R)>,
    pub summary: GridSummary,
}

impl<T: Scalar> SampleGrid<T> {
    /// `points_per_axis` points on each `[lo, hi]`, endpoints included.
    pub fn new(bounds: Vec<(T, T)>, points_per_axis: usize) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::UnsupportedDimension(0));
        }
        if points_per_axis == 0 {
            return Err(Error::SpecViolation("grid needs at least one point per axis".into()));
        }
        if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::SpecViolation(format!("invalid grid interval [{lo}, {hi}]")));
        }
        Ok(SampleGrid { bounds, points_per_axis, excluded_loci: Vec::new(), locus_tol: T::lit(DEFAULT_LOCUS_TOL) })
    }

    /// The same interval `[lo, hi]` on every axis.
    pub fn cube(dim: usize, lo: T, hi: T, points_per_axis: usize) -> Result<Self> {
        Self::new(vec![(lo, hi); dim], points_per_axis)
    }

    /// Drops points where `|locus| < locus_tol`.
    pub fn exclude(mut self, locus: Expr) -> Self {
        self.excluded_loci.push(locus);
        self
    }

    pub fn with_locus_tol(mut self, tol: T) -> Self {
        self.locus_tol = tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(T, T)] {
        &self.bounds
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn excluded_loci(&self) -> &[Expr] {
        &self.excluded_loci
    }

    pub fn locus_tol(&self) -> T {
        self.locus_tol
    }

    fn axis(&self, lo: T, hi: T) -> Vec<T> {
        let m = self.points_per_axis;
        if m == 1 {
            return vec![(lo + hi) * T::lit(0.5)];
        }
        let step = (hi - lo) / T::from_usize(m - 1).unwrap();
        (0..m).map(|k| if k == m - 1 { hi } else { lo + step * T::from_usize(k).unwrap() }).collect()
    }

    /// All grid points in row-major order (last coordinate varies fastest).
    pub fn points(&self) -> Vec<Point<T>> {
        let axes: Vec<Vec<T>> = self.bounds.iter().map(|&(lo, hi)| self.axis(lo, hi)).collect();
        let total = self.points_per_axis.pow(self.dim() as u32);
        (0..total)
            .map(|mut flat| {
                let mut c = vec![T::zero(); self.dim()];
                for d in (0..self.dim()).rev() {
                    c[d] = axes[d][flat % self.points_per_axis];
                    flat /= self.points_per_axis;
                }
                Point::new(c)
            })
            .collect()
    }

    fn near_locus(&self, p: &Point<T>) -> bool {
        self.excluded_loci.iter().any(|e| match evaluate::<T>(e, p) {
            Ok(v) => v.abs() < self.locus_tol,
            Err(_) => true,
        })
    }

    /// Evaluates `f` at every point away from the excluded loci.
    ///
    /// Points where `f` reports a domain error or a degenerate metric are
    /// rejected; any other error aborts. Fewer than [`MIN_SURVIVORS`]
    /// survivors is [`Error::GridExhausted`].
    pub fn sample<R, F>(&self, f: F) -> Result<Sampled<T, R>>
    where
        R: Send,
        F: Fn(&Point<T>) -> Result<R> + Sync,
    {
        let pts = self.points();
        let total = pts.len();
        let outcomes: Vec<Option<Result<(Point<T>, R)>>> = pts
            .into_par_iter()
            .map(|p| {
                if self.near_locus(&p) {
                    return None;
                }
                match f(&p) {
                    Ok(r) => Some(Ok((p, r))),
                    Err(Error::Domain(_) | Error::DegenerateMetric { .. }) => None,
                    Err(e) => Some(Err(e)),
                }
            })
            .collect();
        let mut values = Vec::with_capacity(total);
        for o in outcomes.into_iter().flatten() {
            values.push(o?);
        }
        if values.len() < MIN_SURVIVORS {
            return Err(Error::GridExhausted { survivors: values.len(), required: MIN_SURVIVORS });
        }
        let summary = GridSummary { points_total: total, points_used: values.len(), points_rejected: total - values.len() };
        Ok(Sampled { values, summary })
    }
}
