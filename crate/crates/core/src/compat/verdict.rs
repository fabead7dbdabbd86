use serde::Serialize;

use super::grid::GridSummary;
use crate::tensor::PencilSample;
use crate::Scalar;

/// Residuals in `(tol, INCONCLUSIVE_FACTOR * tol]` are reported as inconclusive.
pub const INCONCLUSIVE_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

impl Status {
    pub fn classify<T: Scalar>(residual: T, tol: T) -> Status {
        if residual <= tol {
            Status::Holds
        } else if residual <= tol * T::lit(INCONCLUSIVE_FACTOR) {
            Status::Inconclusive
        } else {
            Status::Fails
        }
    }

    /// Fails dominates inconclusive, which dominates holds.
    pub fn and(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Holds,
        }
    }
}

/// Where the worst residual of a check occurred.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness<T> {
    pub point: Vec<T>,
    /// Name of the tensor whose component is worst.
    pub tensor: String,
    pub indices: Vec<usize>,
    pub lambda: Option<PencilSample>,
}

/// Outcome of one check over a grid.
///
/// `max_residual` is normalized by the natural scale of the compared terms;
/// `max_abs_residual` is the raw component difference at the same witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict<T> {
    pub check: String,
    pub status: Status,
    pub max_residual: T,
    pub max_abs_residual: T,
    pub tolerance: T,
    pub witness: Option<Witness<T>>,
    pub grid: GridSummary,
    pub lambda_samples: Vec<PencilSample>,
    pub parts: Vec<Verdict<T>>,
}

impl<T: Scalar> Verdict<T> {
    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }

    /// Named sub-verdict.
    pub fn part(&self, name: &str) -> Option<&Verdict<T>> {
        self.parts.iter().find(|p| p.check == name)
    }
}

/// Running maximum of normalized residuals with the place it occurred.
#[derive(Debug, Clone)]
pub(crate) struct Worst<T> {
    pub residual: T,
    pub abs: T,
    pub witness: Option<Witness<T>>,
}

impl<T: Scalar> Worst<T> {
    pub fn new() -> Self {
        Worst { residual: T::zero(), abs: T::zero(), witness: None }
    }

    /// Keeps the first occurrence on ties so results follow grid order.
    pub fn offer(&mut self, residual: T, abs: T, witness: impl FnOnce() -> Witness<T>) {
        if self.witness.is_none() || residual > self.residual || (residual.is_nan() && !self.residual.is_nan()) {
            self.residual = residual;
            self.abs = abs;
            self.witness = Some(witness());
        }
    }

    pub fn into_verdict(
        self,
        check: &str,
        tol: T,
        grid: GridSummary,
        lambda_samples: Vec<PencilSample>,
    ) -> Verdict<T> {
        let status = if self.residual.is_nan() { Status::Fails } else { Status::classify(self.residual, tol) };
        Verdict {
            check: check.to_string(),
            status,
            max_residual: self.residual,
            max_abs_residual: self.abs,
            tolerance: tol,
            witness: self.witness,
            grid,
            lambda_samples,
            parts: Vec::new(),
        }
    }
}

/// Combines sub-verdicts into one whose residual and witness are the worst part's.
pub(crate) fn combine<T: Scalar>(check: &str, parts: Vec<Verdict<T>>) -> Verdict<T> {
    let worst = parts
        .iter()
        .fold(None::<&Verdict<T>>, |acc, p| match acc {
            Some(a) if !(p.max_residual > a.max_residual) => Some(a),
            _ => Some(p),
        })
        .expect("at least one part");
    let status = parts.iter().fold(Status::Holds, |s, p| s.and(p.status));
    Verdict {
        check: check.to_string(),
        status,
        max_residual: worst.max_residual,
        max_abs_residual: worst.max_abs_residual,
        tolerance: worst.tolerance,
        witness: worst.witness.clone(),
        grid: worst.grid,
        lambda_samples: parts.iter().find(|p| !p.lambda_samples.is_empty()).map(|p| p.lambda_samples.clone()).unwrap_or_default(),
        parts,
    }
}
