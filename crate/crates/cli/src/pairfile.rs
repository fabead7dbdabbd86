use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use pencillab_core::families::{
    diagonal_pencil, frobenius_pair, metric_from_vector_potential, with_euclidean, conformal_metric,
    liouville_example, DiagonalPencilSpec, DubrovinInput, Eta, FrobeniusSpec, TwoComponentSpec, WeingartenSet,
};
use pencillab_core::{parse_expr, Expr, MetricField, MetricPair};
use serde::Deserialize;

/// Metric pair file. Expressions use the variables `u1..uN`; `coordinates`
/// only renames them for display.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub dim: usize,
    #[serde(default)]
    pub coordinates: Option<Vec<String>>,
    #[serde(default)]
    pub signature: Option<Vec<i8>>,
    #[serde(default)]
    pub g1: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub g2: Option<Vec<Vec<String>>>,
    /// Expressions whose near-zero set is removed from the grid.
    #[serde(default)]
    pub exclude: Vec<String>,
    #[serde(default)]
    pub family: Option<FamilyStanza>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyStanza {
    Diagonal {
        g_diag: Vec<String>,
        f_diag: Vec<String>,
    },
    TwoComponent {
        #[serde(default)]
        c: Option<f64>,
        #[serde(default, rename = "K")]
        k: Option<f64>,
        #[serde(default)]
        eps2: Option<i8>,
        #[serde(default)]
        scale: Option<f64>,
        #[serde(default)]
        b1: Option<String>,
        #[serde(default)]
        b2: Option<String>,
    },
    Conformal {
        #[serde(default)]
        a: Option<String>,
        #[serde(default, rename = "K")]
        k: Option<f64>,
    },
    Frobenius {
        phi: String,
        eta: Vec<Vec<f64>>,
    },
    VectorPotential {
        h: Vec<String>,
        eta: Vec<Vec<f64>>,
    },
    Dubrovin {
        f: Vec<String>,
        eta: Vec<Vec<f64>>,
        #[serde(default)]
        c: f64,
    },
    Gpc {
        metric: Vec<Vec<String>>,
        weingarten: Vec<Vec<Vec<String>>>,
    },
}

impl FamilyStanza {
    pub fn kind(&self) -> &'static str {
        match self {
            FamilyStanza::Diagonal { .. } => "diagonal",
            FamilyStanza::TwoComponent { .. } => "two_component",
            FamilyStanza::Conformal { .. } => "conformal",
            FamilyStanza::Frobenius { .. } => "frobenius",
            FamilyStanza::VectorPotential { .. } => "vector_potential",
            FamilyStanza::Dubrovin { .. } => "dubrovin",
            FamilyStanza::Gpc { .. } => "gpc",
        }
    }
}

/// Reads and validates a pair file; returns it with the raw bytes for digesting.
pub fn load(path: &Path) -> Result<(PairFile, Vec<u8>)> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read pair file {}", path.display()))?;
    let file: PairFile = serde_json::from_slice(&bytes)
        .with_context(|| format!("{} is not a valid pair file", path.display()))?;
    file.validate().with_context(|| format!("invalid pair file {}", path.display()))?;
    Ok((file, bytes))
}

impl PairFile {
    fn validate(&self) -> Result<()> {
        let n = self.dim;
        ensure!((1..=8).contains(&n), "dim must be between 1 and 8, got {n}");
        if let Some(c) = &self.coordinates {
            ensure!(c.len() == n, "coordinates lists {} names for dim {n}", c.len());
        }
        if let Some(s) = &self.signature {
            ensure!(s.len() == n, "signature has {} entries for dim {n}", s.len());
            ensure!(s.iter().all(|e| e.abs() == 1), "signature entries must be 1 or -1");
        }
        ensure!(
            self.g1.is_some() == self.g2.is_some(),
            "give both g1 and g2, or neither and a family stanza"
        );
        ensure!(self.g1.is_some() || self.family.is_some(), "the file has neither g1/g2 nor a family stanza");
        for (name, m) in [("g1", &self.g1), ("g2", &self.g2)] {
            if let Some(m) = m {
                self.metric(m, name)?;
            }
        }
        for e in &self.exclude {
            self.expr(e, "exclude")?;
        }
        Ok(())
    }

    pub fn expr(&self, text: &str, what: &str) -> Result<Expr> {
        parse_expr(text, self.dim).with_context(|| format!("{what}: cannot parse {text:?}"))
    }

    fn metric(&self, rows: &[Vec<String>], name: &str) -> Result<MetricField> {
        metric_from_text(rows, self.dim, name, self.signature.clone())
    }

    pub fn exclusions(&self) -> Result<Vec<Expr>> {
        self.exclude.iter().map(|e| self.expr(e, "exclude")).collect()
    }

    /// The explicit pair, or the pair a family stanza builds.
    pub fn pair(&self) -> Result<MetricPair> {
        if let (Some(g1), Some(g2)) = (&self.g1, &self.g2) {
            return Ok(MetricPair::new(self.metric(g1, "g1")?, self.metric(g2, "g2")?)?);
        }
        match &self.family {
            Some(f) => f.pair(self.dim),
            None => bail!("the file has no metric pair"),
        }
    }
}

pub fn metric_from_text(rows: &[Vec<String>], n: usize, name: &str, signature: Option<Vec<i8>>) -> Result<MetricField> {
    ensure!(rows.len() == n, "{name} has {} rows for dim {n}", rows.len());
    let mut parsed = Vec::with_capacity(n);
    for (i, r) in rows.iter().enumerate() {
        ensure!(r.len() == n, "{name} row {} has {} entries for dim {n}", i + 1, r.len());
        let mut row = Vec::with_capacity(n);
        for (j, s) in r.iter().enumerate() {
            row.push(parse_expr(s, n).with_context(|| format!("{name}[{}][{}]: cannot parse {s:?}", i + 1, j + 1))?);
        }
        parsed.push(row);
    }
    let g = MetricField::new(parsed, name).with_context(|| format!("{name} is not a valid metric"))?;
    Ok(match signature {
        Some(s) => g.with_signature(s),
        None => g,
    })
}

fn exprs(texts: &[String], n: usize, what: &str) -> Result<Vec<Expr>> {
    ensure!(texts.len() == n, "{what} has {} entries for dim {n}", texts.len());
    texts
        .iter()
        .enumerate()
        .map(|(i, s)| parse_expr(s, n).with_context(|| format!("{what}[{}]: cannot parse {s:?}", i + 1)))
        .collect()
}

pub fn eta(rows: &[Vec<f64>], n: usize) -> Result<Eta> {
    ensure!(rows.len() == n, "eta has {} rows for dim {n}", rows.len());
    Eta::new(rows.to_vec()).context("eta must be constant, symmetric and nondegenerate")
}

impl FamilyStanza {
    /// The metric pair the stanza describes, for the pair-level commands.
    pub fn pair(&self, n: usize) -> Result<MetricPair> {
        Ok(match self {
            FamilyStanza::Diagonal { .. } => diagonal_pencil(&self.diagonal_spec(n)?)?,
            FamilyStanza::TwoComponent { .. } => {
                ensure!(n == 2, "two_component families are two-dimensional");
                let (u1, u2) = (Expr::var(0), Expr::var(1));
                self.two_component_spec()?.pencil(&u1, &u2)?
            }
            FamilyStanza::Conformal { .. } => with_euclidean(self.conformal_metric(n)?)?,
            FamilyStanza::Frobenius { phi, eta: e } => {
                let phi = parse_expr(phi, n).with_context(|| format!("phi: cannot parse {phi:?}"))?;
                frobenius_pair(&FrobeniusSpec::new(phi, eta(e, n)?)?)?
            }
            FamilyStanza::VectorPotential { h, eta: e } => {
                let eta = eta(e, n)?;
                let g = metric_from_vector_potential(&exprs(h, n, "h")?, &eta)?;
                MetricPair::new(eta.metric("eta")?, g)?
            }
            FamilyStanza::Dubrovin { .. } => self.dubrovin_input(n)?.pair()?,
            FamilyStanza::Gpc { .. } => bail!("a gpc stanza describes a metric with Weingarten operators, not a pair"),
        })
    }

    pub fn diagonal_spec(&self, n: usize) -> Result<DiagonalPencilSpec> {
        let FamilyStanza::Diagonal { g_diag, f_diag } = self else { bail!("not a diagonal stanza") };
        Ok(DiagonalPencilSpec::riemannian(exprs(g_diag, n, "g_diag")?, exprs(f_diag, n, "f_diag")?)?)
    }

    pub fn two_component_spec(&self) -> Result<TwoComponentSpec> {
        let FamilyStanza::TwoComponent { c, k, eps2, scale, b1, b2 } = self else {
            bail!("not a two_component stanza")
        };
        two_component_spec(*c, *k, *eps2, *scale, b1.as_deref(), b2.as_deref())
    }

    pub fn conformal_metric(&self, n: usize) -> Result<MetricField> {
        let FamilyStanza::Conformal { a, k } = self else { bail!("not a conformal stanza") };
        ensure!(n == 2, "conformal examples are two-dimensional");
        conformal(a.as_deref(), *k)
    }

    pub fn dubrovin_input(&self, n: usize) -> Result<DubrovinInput> {
        let FamilyStanza::Dubrovin { f, eta: e, c } = self else { bail!("not a dubrovin stanza") };
        Ok(DubrovinInput::new(eta(e, n)?, exprs(f, n, "f")?, *c)?)
    }

    pub fn gpc(&self, n: usize) -> Result<(MetricField, WeingartenSet)> {
        let FamilyStanza::Gpc { metric, weingarten } = self else { bail!("not a gpc stanza") };
        let g = metric_from_text(metric, n, "metric", None)?;
        let mut ws = Vec::with_capacity(weingarten.len());
        for (a, w) in weingarten.iter().enumerate() {
            ensure!(w.len() == n, "weingarten[{}] has {} rows for dim {n}", a + 1, w.len());
            let rows = w
                .iter()
                .enumerate()
                .map(|(i, r)| exprs(r, n, &format!("weingarten[{}][{}]", a + 1, i + 1)))
                .collect::<Result<Vec<_>>>()?;
            ws.push(rows);
        }
        Ok((g, WeingartenSet::new(n, ws)?))
    }
}

/// Resolves the two-component parameters: `K` selects the constant-curvature
/// member, `b1`/`b2` the separated `c = 0` family, otherwise the logarithmic one.
pub fn two_component_spec(
    c: Option<f64>,
    k: Option<f64>,
    eps2: Option<i8>,
    scale: Option<f64>,
    b1: Option<&str>,
    b2: Option<&str>,
) -> Result<TwoComponentSpec> {
    if let Some(k) = k {
        let spec = TwoComponentSpec::constant_curvature(k)?;
        if let Some(c) = c {
            ensure!(c == spec.c, "constant curvature K = {k} needs c = {}, got c = {c}", spec.c);
        }
        if let Some(e) = eps2 {
            ensure!(e == spec.eps[1], "constant curvature K = {k} needs eps2 = {}, got {e}", spec.eps[1]);
        }
        ensure!(b1.is_none() && b2.is_none(), "K fixes b1 and b2; do not give them as well");
        return Ok(spec);
    }
    match (b1, b2) {
        (Some(b1), Some(b2)) => {
            ensure!(c.unwrap_or(0.0) == 0.0, "explicit b1, b2 describe the separated family, which has c = 0");
            let e2 = eps2.unwrap_or(1);
            let b1 = parse_expr(b1, 2).with_context(|| format!("b1: cannot parse {b1:?}"))?;
            let b2 = parse_expr(b2, 2).with_context(|| format!("b2: cannot parse {b2:?}"))?;
            Ok(TwoComponentSpec::separated([-e2, e2], b1, b2)?)
        }
        (None, None) => {
            let Some(c) = c else { bail!("two_component needs c, K, or both b1 and b2") };
            Ok(TwoComponentSpec::log_family(c, eps2.unwrap_or(1), scale.unwrap_or(1.0))?)
        }
        _ => bail!("give both b1 and b2"),
    }
}

/// `exp(a) delta`, or the stereographic constant-curvature factor when only `K` is given.
pub fn conformal(a: Option<&str>, k: Option<f64>) -> Result<MetricField> {
    match (a, k) {
        (Some(a), None) => {
            let a = parse_expr(a, 2).with_context(|| format!("a: cannot parse {a:?}"))?;
            Ok(conformal_metric(&a, 2)?)
        }
        (None, Some(k)) => Ok(liouville_example(k)?),
        (Some(_), Some(_)) => bail!("give either the factor a or the curvature K, not both"),
        (None, None) => bail!("conformal needs the factor a or the curvature K"),
    }
}
