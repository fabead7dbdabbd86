use anyhow::{bail, ensure, Context, Result};
use pencillab_core::compat::{
    check_almost_compatible, check_compatible, classify_curvature, pencil_spectrum, usable_samples,
    verify_l2_identities, SampleGrid,
};
use pencillab_core::families::{
    check_m2, frobenius_pair, gpc_residual, holonomic_residual, liouville_check, liouville_factor,
    metric_from_vector_potential, two_component_family, verify_dubrovin_pencil, verify_lame_system, verify_lequa,
    with_euclidean, FrobeniusSpec, COMMUTATOR_TOL,
};
use pencillab_core::{parse_expr, Expr, MetricField, MetricPair};
use serde_json::{json, Value};

use crate::args::{CheckArgs, Cli, Command, Common, CurvatureArgs, EigenArgs, FamilyArgs, Kind, SpectrumExpect, Which};
use crate::pairfile::{self, FamilyStanza, PairFile};
use crate::report::{Record, Report};

pub fn run(cli: &Cli) -> Result<Report> {
    let common = cli.common();
    common.validate()?;
    match &cli.command {
        Command::Check(a) => check(a),
        Command::Identities(a) => identities(a),
        Command::Curvature(a) => curvature(a),
        Command::Eigenvalues(a) => eigenvalues(a),
        Command::Family(a) => family(a),
    }
}

fn settings(c: &Common, dim: usize, extra: Value) -> Result<Value> {
    let mut s = json!({
        "grid": c.grid,
        "box": c.bounds(dim)?,
        "tol": c.tol,
        "lambda_samples": c.lambda_samples,
        "margin": c.margin,
        "seed": c.resolved_seed()?,
    });
    if let (Value::Object(a), Value::Object(b)) = (&mut s, extra) {
        a.extend(b);
    }
    Ok(s)
}

fn grid(c: &Common, dim: usize, loci: Vec<Expr>) -> Result<SampleGrid<f64>> {
    let mut g = SampleGrid::new(c.bounds(dim)?, c.grid).context("invalid sample grid")?;
    for l in loci {
        g = g.exclude(l);
    }
    Ok(g.with_locus_tol(c.margin))
}

fn load_pair(path: &std::path::Path) -> Result<(PairFile, Vec<u8>, MetricPair)> {
    let (file, bytes) = pairfile::load(path)?;
    let pair = file.pair().with_context(|| format!("{}: cannot build the metric pair", path.display()))?;
    Ok((file, bytes, pair))
}

fn compat_records(pair: &MetricPair, grid: &SampleGrid<f64>, c: &Common) -> Result<Vec<Record>> {
    let almost = check_almost_compatible(pair, grid, c.tol)?;
    let samples = usable_samples(pair, grid, c.lambda_samples)?;
    let compatible = check_compatible(pair, grid, &samples, c.tol)?;
    Ok(vec![Record::verdict("almost_compatible", &almost), Record::verdict("compatible", &compatible)])
}

fn check(a: &CheckArgs) -> Result<Report> {
    let (file, bytes, pair) = load_pair(&a.pair)?;
    let g = grid(&a.common, file.dim, file.exclusions()?)?;
    let records = compat_records(&pair, &g, &a.common)?;
    Ok(Report::new("check", &bytes, settings(&a.common, file.dim, json!({}))?, records))
}

fn identities(a: &CheckArgs) -> Result<Report> {
    let (file, bytes, pair) = load_pair(&a.pair)?;
    let g = grid(&a.common, file.dim, file.exclusions()?)?;
    let r = verify_l2_identities(&pair, &g)?;
    let extra = json!({ "mn1": r.mn1, "mn2": r.mn2, "mn3": r.mn3, "max_m": r.max_m, "max_t": r.max_t, "grid": r.grid });
    let records = vec![Record::residual("identities", r.max(), a.common.tol, extra)];
    Ok(Report::new("identities", &bytes, settings(&a.common, file.dim, json!({}))?, records))
}

fn curvature(a: &CurvatureArgs) -> Result<Report> {
    let (file, bytes, pair) = load_pair(&a.pair)?;
    let g = grid(&a.common, file.dim, file.exclusions()?)?;
    let expect = a.expect.map(|e| e.word());
    let mut records = Vec::new();
    for (name, m, on) in [("g1", &pair.g1, a.which != Which::G2), ("g2", &pair.g2, a.which != Which::G1)] {
        if on {
            let c = classify_curvature(m, &g, a.common.tol)?;
            records.push(Record::curvature(&format!("curvature_{name}"), &c, expect));
        }
    }
    let extra = json!({ "which": format!("{:?}", a.which).to_lowercase(), "expect": expect });
    Ok(Report::new("curvature", &bytes, settings(&a.common, file.dim, extra)?, records))
}

fn eigenvalues(a: &EigenArgs) -> Result<Report> {
    let (file, bytes, pair) = load_pair(&a.pair)?;
    let g = grid(&a.common, file.dim, file.exclusions()?)?;
    let s = pencil_spectrum(&pair, &g)?;
    let word = if s.nonsingular { "nonsingular" } else { "singular" };
    let summary = format!("{word} (min gap {:.3e}, gap tolerance {:.1e})", s.min_gap, s.gap_tol);
    let mut rec = Record::info("spectrum", serde_json::to_value(&s)?, summary);
    if let Some(e) = a.expect {
        let want = e == SpectrumExpect::Nonsingular;
        rec.status = Some(if want == s.nonsingular {
            pencillab_core::compat::Status::Holds
        } else {
            pencillab_core::compat::Status::Fails
        });
        rec.summary += &format!("; expected {}", if want { "nonsingular" } else { "singular" });
    }
    let extra = json!({ "expect": a.expect.map(|e| format!("{e:?}").to_lowercase()) });
    Ok(Report::new("eigenvalues", &bytes, settings(&a.common, file.dim, extra)?, vec![rec]))
}

/// Stanza from the file when given, else from the command-line parameters.
fn family_stanza(a: &FamilyArgs) -> Result<(FamilyStanza, usize, Vec<u8>, Vec<Expr>)> {
    if let Some(path) = &a.pair {
        let (file, bytes) = pairfile::load(path)?;
        let Some(stanza) = file.family.clone() else { bail!("{} has no family stanza", path.display()) };
        if let Some(k) = a.kind {
            ensure!(k.word() == stanza.kind(), "--kind {} does not match the file's {} stanza", k.word(), stanza.kind());
        }
        ensure!(
            a.c.is_none() && a.k.is_none() && a.eps2.is_none() && a.scale.is_none() && a.a.is_none(),
            "family parameters come from the file; drop --c, --K, --eps2, --scale and --a"
        );
        let loci = file.exclusions()?;
        return Ok((stanza, file.dim, bytes, loci));
    }
    let stanza = match a.kind {
        Some(Kind::TwoComponent) => {
            ensure!(a.a.is_none(), "--a applies to conformal families");
            FamilyStanza::TwoComponent { c: a.c, k: a.k, eps2: a.eps2, scale: a.scale, b1: None, b2: None }
        }
        Some(Kind::Conformal) => {
            ensure!(a.c.is_none() && a.eps2.is_none() && a.scale.is_none(), "conformal takes only --a or --K");
            FamilyStanza::Conformal { a: a.a.clone(), k: a.k }
        }
        Some(k) => bail!("family kind {} needs --pair FILE with a family stanza", k.word()),
        None => bail!("give --kind, or --pair FILE with a family stanza"),
    };
    Ok((stanza, 2, Vec::new(), Vec::new()))
}

fn family(a: &FamilyArgs) -> Result<Report> {
    let (stanza, n, bytes, mut loci) = family_stanza(a)?;
    let c = &a.common;
    let records = match &stanza {
        FamilyStanza::Diagonal { .. } => {
            let pair = stanza.pair(n)?;
            let g = grid(c, n, loci)?;
            let mut r = compat_records(&pair, &g, c)?;
            let s = pencil_spectrum(&pair, &g)?;
            let word = if s.nonsingular { "nonsingular" } else { "singular" };
            r.push(Record::info("spectrum", serde_json::to_value(&s)?, format!("{word} (min gap {:.3e})", s.min_gap)));
            r
        }
        FamilyStanza::TwoComponent { .. } => {
            ensure!(n == 2, "two_component families are two-dimensional");
            two_component_records(&stanza, c, loci)?
        }
        FamilyStanza::Conformal { a: factor, k } => {
            let mut r = Vec::new();
            if let Some(k) = *k {
                let res = liouville_check(&liouville_factor(k), k)?;
                r.push(Record::residual("liouville_equation", res, 1e-12, json!({ "K": k })));
                // keep the grid inside 1 + K r^2 / 4 > margin
                loci.push(parse_expr(&format!("1+({k})*(u1^2+u2^2)/4"), 2)?);
            }
            let m = stanza.conformal_metric(n)?;
            let g = grid(c, n, loci)?;
            let class = classify_curvature(&m, &g, c.tol)?;
            r.push(match (factor, k) {
                (None, Some(_)) => Record::curvature_is("curvature", &class, "constant_curvature"),
                _ => Record::curvature("curvature", &class, None),
            });
            r.extend(compat_records(&with_euclidean(m)?, &g, c)?);
            r
        }
        FamilyStanza::Frobenius { phi, eta } => {
            let phi = parse_expr(phi, n).with_context(|| format!("phi: cannot parse {phi:?}"))?;
            let spec = FrobeniusSpec::new(phi, pairfile::eta(eta, n)?)?;
            let g = grid(c, n, loci)?;
            let m2 = check_m2(&spec, &g)?;
            let pair = frobenius_pair(&spec)?;
            let mut r = vec![Record::residual("associativity", m2, c.tol, json!({}))];
            r.extend(compat_records(&pair, &g, c)?);
            r.push(Record::curvature_is("curvature_g2", &classify_curvature(&pair.g2, &g, c.tol)?, "flat"));
            r
        }
        FamilyStanza::VectorPotential { h, eta } => {
            let eta = pairfile::eta(eta, n)?;
            let hs = h
                .iter()
                .map(|s| parse_expr(s, n).with_context(|| format!("h: cannot parse {s:?}")))
                .collect::<Result<Vec<_>>>()?;
            let m = metric_from_vector_potential(&hs, &eta)?;
            let g = grid(c, n, loci)?;
            let mut r = vec![Record::curvature("curvature_g2", &classify_curvature(&m, &g, c.tol)?, None)];
            r.extend(compat_records(&MetricPair::new(eta.metric("eta")?, m)?, &g, c)?);
            r
        }
        FamilyStanza::Dubrovin { .. } => {
            let input = stanza.dubrovin_input(n)?;
            let g = grid(c, n, loci)?;
            let v = verify_dubrovin_pencil(&input, &g, c.tol)?;
            let mut r = vec![Record::verdict("flat_pencil", &v)];
            let pair = input.pair()?;
            r.extend(compat_records(&pair, &g, c)?);
            r.push(Record::curvature_is("curvature_g1", &classify_curvature(&pair.g1, &g, c.tol)?, "flat"));
            r
        }
        FamilyStanza::Gpc { .. } => {
            let (m, w) = stanza.gpc(n)?;
            let g = grid(c, n, loci)?;
            let res = gpc_residual(&m, &w, &g)?;
            let extra = serde_json::to_value(&res)?;
            let mut rec = Record::residual("gpc", res.max(), c.tol, extra);
            if res.non_commuting {
                rec.summary += &format!("; affinors do not commute (max commutator {:.3e} > {COMMUTATOR_TOL:e})", res.max_commutator);
            }
            let mut r = vec![rec];
            if m.is_diagonal() && w.is_diagonal() {
                let h = holonomic_residual(&m, &w, &g)?;
                r.push(Record::residual("holonomic", h.hol1.max(h.hol2), c.tol, serde_json::to_value(&h)?));
            }
            r
        }
    };
    let extra = json!({ "kind": stanza.kind(), "parameters": parameters(&stanza, a) });
    Ok(Report::new("family", &bytes, settings(c, n, extra)?, records))
}

fn parameters(stanza: &FamilyStanza, a: &FamilyArgs) -> Value {
    match stanza {
        FamilyStanza::TwoComponent { .. } | FamilyStanza::Conformal { .. } if a.pair.is_none() => json!({
            "c": a.c, "K": a.k, "eps2": a.eps2, "scale": a.scale, "a": a.a,
        }),
        _ => Value::Null,
    }
}

fn two_component_records(stanza: &FamilyStanza, c: &Common, mut loci: Vec<Expr>) -> Result<Vec<Record>> {
    let spec = stanza.two_component_spec()?;
    loci.push(Expr::var(0) - Expr::var(1));
    let g = grid(c, 2, loci)?;
    let mut r = Vec::new();
    let lame = verify_lame_system(&spec.b[0], &spec.b[1], &spec.f, spec.eps[0], spec.eps[1], &g)?;
    r.push(Record::residual("lame_system", lame, c.tol, json!({ "c": spec.c, "eps": spec.eps })));
    let lequa = verify_lequa(&spec.f, &Expr::var(0), &Expr::var(1), &g)?;
    r.push(Record::residual("linear_equation", lequa, c.tol, json!({})));
    let fam: Vec<MetricField> = two_component_family(&spec, 3)?;
    for (n, m) in fam.iter().enumerate().take(3) {
        r.push(Record::curvature_is(&format!("curvature_G{n}"), &classify_curvature(m, &g, c.tol)?, "flat"));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let pair = MetricPair::new(fam[j].clone(), fam[i].clone())?;
            let samples = usable_samples(&pair, &g, c.lambda_samples)?;
            let v = check_compatible(&pair, &g, &samples, c.tol)?;
            r.push(Record::verdict(&format!("compatible_G{j}_G{i}"), &v));
        }
    }
    let c3 = classify_curvature(&fam[3], &g, c.tol)?;
    r.push(if spec.c == 0.5 * f64::from(spec.eps[1]) {
        Record::curvature_is("curvature_G3", &c3, "constant_curvature")
    } else {
        Record::curvature("curvature_G3", &c3, None)
    });
    Ok(r)
}
