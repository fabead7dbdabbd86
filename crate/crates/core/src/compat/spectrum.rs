use num_complex::Complex;
use serde::Serialize;

use super::grid::{GridSummary, SampleGrid};
use crate::linalg::{eigenvalues, min_gap};
use crate::tensor::{MetricPair, PairJets};
use crate::{Error, Result, Scalar};

/// Relative gap below which two pencil roots count as coincident.
pub const GAP_REL_TOL: f64 = 1e-6;

/// Roots of `det(g1 - x g2) = 0` over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PencilSpectrum<T> {
    pub points: Vec<Vec<T>>,
    /// Per point, sorted by `(re, im)`.
    pub eigenvalues: Vec<Vec<Complex<T>>>,
    /// Smallest distance between two roots at a common point.
    pub min_gap: T,
    /// `GAP_REL_TOL * (1 + max |root|)`
    pub gap_tol: T,
    pub nonsingular: bool,
    pub grid: GridSummary,
}

/// Eigenvalues of the affinor `v = g1 g2^{-1}` at every admissible point.
pub fn pencil_spectrum<T: Scalar>(pair: &MetricPair, grid: &SampleGrid<T>) -> Result<PencilSpectrum<T>> {
    if grid.dim() != pair.dim() {
        return Err(Error::DimensionMismatch { expected: pair.dim(), found: grid.dim() });
    }
    let sampled = grid.sample(|p| {
        let lo2 = PairJets::new(pair, p, 1)?.j2.lo;
        eigenvalues(&pair.g1.at(p)?.mul(&lo2))
    })?;
    let mut gap = T::infinity();
    let mut biggest = T::zero();
    let (mut points, mut eigs) = (Vec::new(), Vec::new());
    for (p, ev) in sampled.values {
        gap = gap.min(min_gap(&ev));
        biggest = ev.iter().fold(biggest, |m, z| m.max(z.norm()));
        points.push(p.coords().to_vec());
        eigs.push(ev);
    }
    let gap_tol = T::lit(GAP_REL_TOL) * (T::one() + biggest);
    Ok(PencilSpectrum {
        points,
        eigenvalues: eigs,
        min_gap: gap,
        gap_tol,
        nonsingular: gap > gap_tol,
        grid: sampled.summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::MetricField;

    #[test]
    fn proportional_pair_is_singular() {
        let g = MetricField::parse(&[vec!["1+u1^2", "u2"], vec!["u2", "2"]], "g").unwrap();
        let h = MetricField::parse(&[vec!["3*(1+u1^2)", "3*u2"], vec!["3*u2", "6"]], "3g").unwrap();
        let s = pencil_spectrum(&MetricPair::new(h, g).unwrap(), &SampleGrid::<f64>::cube(2, -0.5, 0.5, 3).unwrap()).unwrap();
        for ev in &s.eigenvalues {
            assert!(ev.iter().all(|z| (z.re - 3.0).abs() < 1e-9 && z.im.abs() < 1e-9));
        }
        assert!(s.min_gap < 1e-6 && !s.nonsingular);
    }

    #[test]
    fn diagonal_pair_spectrum_is_coordinates() {
        let pr = MetricPair::new(
            MetricField::parse(&[vec!["u1", "0"], vec!["0", "u2"]], "g1").unwrap(),
            MetricField::euclidean(2).unwrap(),
        )
        .unwrap();
        let s = pencil_spectrum(&pr, &SampleGrid::<f64>::new(vec![(1.0, 2.0), (3.0, 4.0)], 5).unwrap()).unwrap();
        for (p, ev) in s.points.iter().zip(&s.eigenvalues) {
            assert!((ev[0].re - p[0]).abs() < 1e-12 && (ev[1].re - p[1]).abs() < 1e-12);
        }
        assert!(s.min_gap >= 1.0 - 1e-12 && s.nonsingular);
    }
}
