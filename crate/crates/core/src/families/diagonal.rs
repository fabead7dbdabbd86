use crate::expr::Expr;
use crate::tensor::{MetricField, MetricPair};
use crate::{Error, Result};

/// Diagonal pencil `g2 = diag(g^i)`, `g1 = diag(f^i(u^i) g^i)`.
#[derive(Debug, Clone)]
pub struct DiagonalPencilSpec {
    pub g_diag: Vec<Expr>,
    pub f_diag: Vec<Expr>,
    pub signature: Vec<i8>,
}

impl DiagonalPencilSpec {
    /// Checks that `f^i` depends on `u^i` alone, is not identically zero, and
    /// that every signature entry is `+1` or `-1`.
    pub fn new(g_diag: Vec<Expr>, f_diag: Vec<Expr>, signature: Vec<i8>) -> Result<Self> {
        let n = g_diag.len();
        if f_diag.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f_diag.len() });
        }
        if signature.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: signature.len() });
        }
        if let Some(s) = signature.iter().find(|s| s.abs() != 1) {
            return Err(Error::SpecViolation(format!("signature entries must be +1 or -1, got {s}")));
        }
        for (i, f) in f_diag.iter().enumerate() {
            f.check_dim(n)?;
            if let Some(j) = (0..n).find(|&j| j != i && f.depends_on(j)) {
                return Err(Error::SpecViolation(format!("f^{} depends on u{}", i + 1, j + 1)));
            }
            if f.is_zero() {
                return Err(Error::SpecViolation(format!("f^{} is identically zero", i + 1)));
            }
        }
        Ok(DiagonalPencilSpec { g_diag, f_diag, signature })
    }

    /// Signature `+1` in every slot.
    pub fn riemannian(g_diag: Vec<Expr>, f_diag: Vec<Expr>) -> Result<Self> {
        let n = g_diag.len();
        Self::new(g_diag, f_diag, vec![1; n])
    }

    pub fn dim(&self) -> usize {
        self.g_diag.len()
    }
}

/// The pair `(diag(f^i g^i), diag(g^i))`.
pub fn diagonal_pencil(spec: &DiagonalPencilSpec) -> Result<MetricPair> {
    let g2 = MetricField::diagonal(spec.g_diag.clone(), "g2")?.with_signature(spec.signature.clone());
    let g1_entries = spec.f_diag.iter().zip(&spec.g_diag).map(|(f, g)| f * g).collect();
    let g1 = MetricField::diagonal(g1_entries, "g1")?.with_signature(spec.signature.clone());
    MetricPair::new(g1, g2)
}
