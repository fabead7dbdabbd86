use super::grid::SampleGrid;
use super::verdict::{combine, Status, Verdict, Witness, Worst};
use crate::expr::Point;
use crate::linalg::Matrix;
use crate::tensor::{
    connection_from_jet, curvature_from_jet, nijenhuis_of, obstruction_from, Curvature, MetricJet, MetricPair,
    PairJets, PencilSample, TensorValue,
};
use crate::{Error, Result, Scalar};

/// Samples used when the caller does not supply any.
pub const DEFAULT_LAMBDA_SAMPLES: [PencilSample; 7] = [
    PencilSample::new(1.0, 1.0),
    PencilSample::new(1.0, -1.0),
    PencilSample::new(2.0, 1.0),
    PencilSample::new(1.0, 2.0),
    PencilSample::new(3.0, -1.0),
    PencilSample::new(0.5, 0.5),
    PencilSample::new(-1.0, 2.0),
];

const EXTRA_LAMBDA_SAMPLES: [PencilSample; 16] = [
    PencilSample::new(2.0, -3.0),
    PencilSample::new(-2.0, 5.0),
    PencilSample::new(4.0, 1.0),
    PencilSample::new(1.0, 4.0),
    PencilSample::new(5.0, -2.0),
    PencilSample::new(-3.0, 1.0),
    PencilSample::new(0.25, 1.5),
    PencilSample::new(1.5, 0.25),
    PencilSample::new(3.0, 7.0),
    PencilSample::new(7.0, -3.0),
    PencilSample::new(-0.5, 3.0),
    PencilSample::new(6.0, 0.5),
    PencilSample::new(0.3, -2.0),
    PencilSample::new(-4.0, 9.0),
    PencilSample::new(2.5, 3.5),
    PencilSample::new(9.0, 2.0),
];

/// Smallest number of lambda samples a compatibility check accepts.
pub const MIN_LAMBDA_SAMPLES: usize = 5;

/// Pencil members whose cancellation ratio falls below this are skipped at that point.
pub const COMBINATION_TOL: f64 = 1e-6;

/// Candidate samples in their fixed order: the defaults, then the extension.
pub fn lambda_candidates() -> impl Iterator<Item = PencilSample> {
    DEFAULT_LAMBDA_SAMPLES.into_iter().chain(EXTRA_LAMBDA_SAMPLES)
}

/// The first `n` candidate samples.
pub fn default_samples(n: usize) -> Result<Vec<PencilSample>> {
    let max = DEFAULT_LAMBDA_SAMPLES.len() + EXTRA_LAMBDA_SAMPLES.len();
    if !(MIN_LAMBDA_SAMPLES..=max).contains(&n) {
        return Err(Error::SpecViolation(format!("lambda sample count must be in {MIN_LAMBDA_SAMPLES}..={max}, got {n}")));
    }
    Ok(lambda_candidates().take(n).collect())
}

/// The first `n` candidate samples that are non-degenerate at some grid point.
///
/// Candidates that collapse the pencil everywhere (for instance `(1, -1)` on a
/// pair of equal metrics) are skipped in favour of later ones.
pub fn usable_samples<T: Scalar>(pair: &MetricPair, grid: &SampleGrid<T>, n: usize) -> Result<Vec<PencilSample>> {
    default_samples(n)?;
    let mats = grid.sample(|p| Ok((pair.g1.at(p)?, pair.g2.at(p)?)))?;
    let chosen: Vec<PencilSample> = lambda_candidates()
        .filter(|s| mats.values.iter().any(|(_, (a, b))| combination_ratio(a, b, *s) >= T::lit(COMBINATION_TOL)))
        .take(n)
        .collect();
    if chosen.len() < n {
        return Err(Error::SpecViolation(format!("only {} non-degenerate lambda samples available", chosen.len())));
    }
    Ok(chosen)
}

/// `|det(l1 A + l2 B)| / prod_i |row_i(|l1 A| + |l2 B|)|`: 1 without cancellation, 0 when degenerate.
pub fn combination_ratio<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, s: PencilSample) -> T {
    let (l1, l2) = (T::lit(s.lambda1), T::lit(s.lambda2));
    let n = a.dim();
    let c = Matrix::from_fn(n, |i, j| l1 * a[(i, j)] + l2 * b[(i, j)]);
    let mut denom = T::one();
    for i in 0..n {
        let row: T = (0..n).map(|j| (l1 * a[(i, j)]).abs() + (l2 * b[(i, j)]).abs()).map(|x| x * x).sum();
        denom *= row.sqrt();
    }
    if denom == T::zero() {
        return T::zero();
    }
    c.det().abs() / denom
}

fn max_abs_mats<T: Scalar>(ms: &[Matrix<T>]) -> T {
    ms.iter().fold(T::zero(), |m, a| m.max(a.max_abs()))
}

/// Normalized residuals of the almost-compatibility tensors at one point.
struct AlmostAt<T> {
    m: (T, T, Vec<usize>),
    n: (T, T, Vec<usize>),
}

fn almost_at<T: Scalar>(pair: &MetricPair, p: &Point<T>) -> Result<AlmostAt<T>> {
    let jets = PairJets::new(pair, p, 1)?;
    let c1 = connection_from_jet(&jets.j1);
    let c2 = connection_from_jet(&jets.j2);
    let o = obstruction_from(&jets.j1, &jets.j2, &c1, &c2);
    let (v, dv) = jets.affinor();
    let nt = nijenhuis_of(&v, &dv);

    let one = T::one();
    let g_max = jets.j1.up.max_abs().max(jets.j2.up.max_abs());
    let m_scale = one + g_max * c1.gamma_up.max_abs().max(c2.gamma_up.max_abs());
    let n_scale = one + v.max_abs() * max_abs_mats(&dv);
    let (ma, mi) = o.m.argmax_abs();
    let (na, ni) = nt.argmax_abs();
    Ok(AlmostAt { m: (ma / m_scale, ma, mi), n: (na / n_scale, na, ni) })
}

/// Almost compatibility: `M^{ijk}` and `N^k_{ij}` vanish at every admissible point.
///
/// The two sub-tests are equivalent by the identities checked in
/// [`verify_l2_identities`](super::verify_l2_identities); one holding while the
/// other clearly fails is reported as [`Error::InternalInconsistency`].
pub fn check_almost_compatible<T: Scalar>(pair: &MetricPair, grid: &SampleGrid<T>, tol: T) -> Result<Verdict<T>> {
    check_dims(pair, grid)?;
    let sampled = grid.sample(|p| almost_at(pair, p))?;
    let (mut wm, mut wn) = (Worst::new(), Worst::new());
    for (p, r) in &sampled.values {
        let wit = |tensor: &str, ix: &[usize]| Witness {
            point: p.coords().to_vec(),
            tensor: tensor.into(),
            indices: ix.to_vec(),
            lambda: None,
        };
        wm.offer(r.m.0, r.m.1, || wit("M^{ijk}", &r.m.2));
        wn.offer(r.n.0, r.n.1, || wit("N^k_{ij}", &r.n.2));
    }
    let vm = wm.into_verdict("m_tensor", tol, sampled.summary, Vec::new());
    let vn = wn.into_verdict("nijenhuis", tol, sampled.summary, Vec::new());
    let split = matches!((vm.status, vn.status), (Status::Holds, Status::Fails) | (Status::Fails, Status::Holds));
    if split {
        return Err(Error::InternalInconsistency(format!(
            "M and Nijenhuis tests disagree: M residual {}, N residual {}",
            vm.max_residual, vn.max_residual
        )));
    }
    Ok(combine("almost_compatible", vec![vm, vn]))
}

fn check_dims<T: Scalar>(pair: &MetricPair, grid: &SampleGrid<T>) -> Result<()> {
    if grid.dim() != pair.dim() {
        return Err(Error::DimensionMismatch { expected: pair.dim(), found: grid.dim() });
    }
    Ok(())
}

/// Linearity residuals of one pencil member at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearityResidual<T> {
    /// `|Gamma^{ij}_k(l) - l1 Gamma1^{ij}_k - l2 Gamma2^{ij}_k|`, normalized
    pub connection: T,
    pub connection_abs: T,
    pub connection_at: Vec<usize>,
    /// The same for `R^{ij}_{kl}`
    pub curvature: T,
    pub curvature_abs: T,
    pub curvature_at: Vec<usize>,
}

fn lin_diff<T: Scalar>(
    own: &TensorValue<T>,
    a: &TensorValue<T>,
    b: &TensorValue<T>,
    l1: T,
    l2: T,
    extra_scale: T,
) -> (T, T, Vec<usize>) {
    let lin = a.combine(l1, b, l2);
    let (abs, at) = own.max_abs_diff(&lin);
    let scale = T::one()
        + own.max_abs().max(a.max_abs() * l1.abs()).max(b.max_abs() * l2.abs()).max(extra_scale);
    (abs / scale, abs, at)
}

fn linearity_from<T: Scalar>(
    j1: &MetricJet<T>,
    j2: &MetricJet<T>,
    k1: &Curvature<T>,
    k2: &Curvature<T>,
    s: PencilSample,
) -> Result<Option<LinearityResidual<T>>> {
    if combination_ratio(&j1.up, &j2.up, s) < T::lit(COMBINATION_TOL) {
        return Ok(None);
    }
    let (l1, l2) = (T::lit(s.lambda1), T::lit(s.lambda2));
    let jl = match MetricJet::combine(l1, j1, l2, j2) {
        Ok(j) => j,
        Err(Error::DegenerateMetric { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let kl = curvature_from_jet(&jl);
    let (c, c_abs, c_at) = lin_diff(&kl.connection.gamma_up, &k1.connection.gamma_up, &k2.connection.gamma_up, l1, l2, T::zero());
    let terms = (jl.up.max_abs() * kl.term_scale)
        .max(l1.abs() * j1.up.max_abs() * k1.term_scale)
        .max(l2.abs() * j2.up.max_abs() * k2.term_scale);
    let (r, r_abs, r_at) = lin_diff(&kl.riemann_up, &k1.riemann_up, &k2.riemann_up, l1, l2, terms);
    Ok(Some(LinearityResidual {
        connection: c,
        connection_abs: c_abs,
        connection_at: c_at,
        curvature: r,
        curvature_abs: r_abs,
        curvature_at: r_at,
    }))
}

fn order2_jets<T: Scalar>(pair: &MetricPair, p: &Point<T>) -> Result<(MetricJet<T>, MetricJet<T>, Curvature<T>, Curvature<T>)> {
    let jets = PairJets::new(pair, p, 2)?;
    let k1 = curvature_from_jet(&jets.j1);
    let k2 = curvature_from_jet(&jets.j2);
    Ok((jets.j1, jets.j2, k1, k2))
}

/// Linearity residuals of the member `s` at `p`, or `None` when that member is
/// degenerate there.
pub fn linearity_residual<T: Scalar>(
    pair: &MetricPair,
    p: &Point<T>,
    s: PencilSample,
) -> Result<Option<LinearityResidual<T>>> {
    let (j1, j2, k1, k2) = order2_jets(pair, p)?;
    linearity_from(&j1, &j2, &k1, &k2, s)
}

/// Compatibility: connection and curvature depend linearly on `(l1, l2)`,
/// certified on the given samples at every admissible point.
///
/// This is a probabilistic certificate: the residuals are rational in the
/// samples, so vanishing at several generic samples is taken as vanishing
/// identically.
pub fn check_compatible<T: Scalar>(
    pair: &MetricPair,
    grid: &SampleGrid<T>,
    samples: &[PencilSample],
    tol: T,
) -> Result<Verdict<T>> {
    check_dims(pair, grid)?;
    if samples.len() < MIN_LAMBDA_SAMPLES {
        return Err(Error::SpecViolation(format!(
            "compatibility needs at least {MIN_LAMBDA_SAMPLES} lambda samples, got {}",
            samples.len()
        )));
    }
    let sampled = grid.sample(|p| {
        let (j1, j2, k1, k2) = order2_jets(pair, p)?;
        samples.iter().map(|&s| linearity_from(&j1, &j2, &k1, &k2, s)).collect::<Result<Vec<_>>>()
    })?;
    let (mut wc, mut wr) = (Worst::new(), Worst::new());
    for (si, &s) in samples.iter().enumerate() {
        let mut used = false;
        for (p, per_sample) in &sampled.values {
            let Some(r) = &per_sample[si] else { continue };
            used = true;
            let wit = |tensor: &str, ix: &[usize]| Witness {
                point: p.coords().to_vec(),
                tensor: tensor.into(),
                indices: ix.to_vec(),
                lambda: Some(s),
            };
            wc.offer(r.connection, r.connection_abs, || wit("Gamma^{ij}_k", &r.connection_at));
            wr.offer(r.curvature, r.curvature_abs, || wit("R^{ij}_{kl}", &r.curvature_at));
        }
        if !used {
            return Err(Error::DegenerateSample { lambda1: s.lambda1, lambda2: s.lambda2 });
        }
    }
    let vc = wc.into_verdict("connection_linearity", tol, sampled.summary, samples.to_vec());
    let vr = wr.into_verdict("curvature_linearity", tol, sampled.summary, samples.to_vec());
    Ok(combine("compatible", vec![vc, vr]))
}
