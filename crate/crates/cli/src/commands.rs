use std::path::PathBuf;

use defconn::cohom::{
    block_consistency, connection_path, definite_path_margin, gromov_thurston_curvatures,
    gromov_thurston_operator, isotopy_path, linspace, reconstruct_blocks, Builtin, Bundle,
    CalibrationConstants, GtProfile, MetricFamily,
};
use defconn::definite::{classify as classify_op, taming_margin, DefiniteClassification, Sign, Verdict};
use defconn::io::{builtin_spec, parse_family, parse_operator, FamilySpec};
use defconn::sectional::{sectional_extrema, verify_pinching_theorem, VerifyConfig, PINCHING_CONSTANT};
use defconn::topology::{
    chern_numbers, chern_numbers_complex_orientation, hitchin_thorpe_gate, twistor_degree, DSign,
    SurfaceData, TwistorSign,
};
use defconn::verify::{eigen_sum_suite, ricci_positive_suite, trace_identity_suite};
use defconn::{CurvatureOperator, Error, Result};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::render::envelope;
use crate::{BundleArg, Common, RadialGrid, Source};

pub const CHERN_SCHEMA: &str = r#"chern input: --chi X --tau Y --sign Positive|Negative, or
  {"chi": 2, "tau": 0, "sign": "Positive", "complex_orientation": false, "d_sign": "Dpos"}"#;

pub const SURFACE_SCHEMA: &str = r#"adjunction input: --euler E --self-intersection S [--double-points D], or
  {"euler": 2, "self_intersection": -3, "double_points": 0}"#;

const MIN_GRID: usize = 16;

pub struct Outcome {
    pub report: Value,
    pub violation: Option<String>,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self { report, violation: None }
    }
}

fn value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable report")
}

fn base_parameters(c: &Common) -> Value {
    json!({ "tol": c.tol, "grid": c.grid, "refine": c.refine, "relaxed": c.relaxed })
}

fn check_common(c: &Common) -> Result<()> {
    if !(c.tol.is_finite() && c.tol >= 0.0) {
        return Err(Error::BadParams(format!("tol must be finite and >= 0, got {}", c.tol)));
    }
    if c.grid < MIN_GRID {
        return Err(Error::BadParams(format!("grid must be >= {MIN_GRID}, got {}", c.grid)));
    }
    Ok(())
}

fn read_text(file: &Option<PathBuf>, input: &Option<String>) -> Result<Option<String>> {
    match (file, input) {
        (Some(p), _) => std::fs::read_to_string(p)
            .map(Some)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", p.display()))),
        (None, Some(s)) => Ok(Some(s.clone())),
        (None, None) => Ok(None),
    }
}

fn blend(source: &Source) -> Result<Option<[f64; 2]>> {
    match source.blend.as_deref() {
        None => Ok(None),
        Some([a, b]) => Ok(Some([*a, *b])),
        Some(other) => Err(Error::BadParams(format!("blend takes two values, got {other:?}"))),
    }
}

fn spec_of(source: &Source) -> Result<Option<FamilySpec>> {
    match &source.builtin {
        Some(name) => Ok(Some(builtin_spec(name, source.n, source.k, source.r0, blend(source)?)?)),
        None => Ok(None),
    }
}

/// Operator from JSON input or from a built-in family at radius `r`.
fn operator_of(source: &Source, r: Option<f64>, bundle: BundleArg, c: &Common) -> Result<(CurvatureOperator, Value)> {
    if let Some(text) = read_text(&source.file, &source.input)? {
        return Ok((parse_operator(&text, c.relaxed)?, json!({ "kind": "json" })));
    }
    let spec = spec_of(source)?.ok_or_else(|| {
        Error::InvalidInput("one of --file, --input or --builtin is required".into())
    })?;
    let r = r.ok_or_else(|| Error::InvalidInput("--r is required with --builtin".into()))?;
    let (op, label) = match spec {
        FamilySpec::Metric(fam) => (
            reconstruct_blocks(&fam, r, &CalibrationConstants::FROZEN)?,
            fam.label().to_string(),
        ),
        FamilySpec::GromovThurston(p) => (gromov_thurston_operator(r, &p)?, "GromovThurston".to_string()),
        FamilySpec::Isotopy(_) => return Err(Error::InvalidInput("isotopy paths carry no metric".into())),
    };
    let op = if bundle == BundleArg::Minus { op.reverse_orientation() } else { op };
    let orientation = if bundle == BundleArg::Minus { "reversed" } else { "given" };
    Ok((op, json!({ "kind": "builtin", "family": label, "r": r, "orientation": orientation })))
}

pub fn classify_cmd_result(op: &CurvatureOperator, c: &Common) -> Value {
    json!({
        "operator": value(op),
        "classification": value(&classify_op(op, c.tol)),
        "reversed": value(&classify_op(&op.reverse_orientation(), c.tol)),
        "taming": value(&taming_margin(op, c.grid, c.refine, c.tol)),
    })
}

pub fn classify(source: &Source, r: Option<f64>, bundle: BundleArg, c: &Common) -> Result<Outcome> {
    check_common(c)?;
    let (op, input) = operator_of(source, r, bundle, c)?;
    Ok(Outcome::ok(envelope("classify", base_parameters(c), json!({
        "input": input,
        "report": classify_cmd_result(&op, c),
    }))))
}

pub fn pinch(source: &Source, r: Option<f64>, bundle: BundleArg, c: &Common) -> Result<Outcome> {
    check_common(c)?;
    let (op, input) = operator_of(source, r, bundle, c)?;
    let rep = sectional_extrema(&op, c.grid, c.refine);
    let same = classify_op(&op, c.tol);
    let reversed = classify_op(&op.reverse_orientation(), c.tol);
    let at_constant = rep.ratio.is_some_and(|q| (q - PINCHING_CONSTANT).abs() <= c.tol);
    Ok(Outcome::ok(envelope("pinch", base_parameters(c), json!({
        "input": input,
        "operator": value(&op),
        "pinching": value(&rep),
        "classification": value(&same),
        "reversed": value(&reversed),
        "boundary": same.boundary || reversed.boundary || at_constant,
    }))))
}

fn radial_grid(g: &RadialGrid, default: Vec<f64>) -> Result<Vec<f64>> {
    if g.r_min.is_none() && g.r_max.is_none() && g.points.is_none() {
        return Ok(default);
    }
    let a = g.r_min.unwrap_or(default[0]);
    let b = g.r_max.unwrap_or(*default.last().unwrap());
    let n = g.points.unwrap_or(default.len());
    if !(a.is_finite() && b.is_finite() && a < b) || n < 2 {
        return Err(Error::BadParams(format!("radial grid needs r_min < r_max and points >= 2, got [{a}, {b}] x {n}")));
    }
    Ok(linspace(a, b, n))
}

fn grid_parameters(c: &Common, grid: &[f64]) -> Value {
    let mut p = base_parameters(c);
    p["r_grid"] = json!({ "min": grid[0], "max": grid[grid.len() - 1], "points": grid.len() });
    p
}

fn bundles(b: BundleArg) -> Vec<Bundle> {
    match b {
        BundleArg::Plus => vec![Bundle::LambdaPlus],
        BundleArg::Minus => vec![Bundle::LambdaMinus],
        BundleArg::Both => vec![Bundle::LambdaPlus, Bundle::LambdaMinus],
    }
}

fn oriented_blocks(fam: &MetricFamily, r: f64, bundle: Bundle) -> Result<CurvatureOperator> {
    let op = reconstruct_blocks(fam, r, &CalibrationConstants::FROZEN)?;
    Ok(if bundle == Bundle::LambdaMinus { op.reverse_orientation() } else { op })
}

fn sign_word(s: Sign) -> &'static str {
    match s {
        Sign::Positive => "positive",
        Sign::Negative => "negative",
        Sign::NA => "undetermined",
    }
}

fn point_summary(r: f64, c: &DefiniteClassification) -> Value {
    json!({ "r": r, "verdict": value(&c.verdict), "sign": value(&c.sign), "d_signature": value(&c.d_signature), "margin": c.margin })
}

fn metric_family(fam: &MetricFamily, bundle: BundleArg, blocks: bool, grid: &[f64], c: &Common) -> Result<Value> {
    let mut out = Vec::new();
    for b in bundles(bundle) {
        let path = connection_path(fam, b)?;
        let verdict = definite_path_margin(&path, grid, c.tol)?;
        let r_rep = grid[grid.len() / 2];
        let rep = classify_op(&oriented_blocks(fam, r_rep, b)?, c.tol);
        let sign = if verdict.definite && rep.verdict == Verdict::Definite { rep.sign } else { Sign::NA };
        let summary = if verdict.definite { format!("definite, {}", sign_word(sign)) } else { "not definite".to_string() };
        let mut entry = json!({
            "bundle": value(&b),
            "summary": summary,
            "sign": value(&sign),
            "sign_radius": r_rep,
            "path": value(&verdict),
        });
        if blocks {
            let mut points = Vec::with_capacity(grid.len());
            let mut consistency: f64 = 0.0;
            for &r in grid {
                let op = oriented_blocks(fam, r, b)?;
                points.push(point_summary(r, &classify_op(&op, c.tol)));
                consistency = consistency.max(block_consistency(fam, r, &CalibrationConstants::FROZEN)?);
            }
            entry["blocks"] = json!({ "points": points, "max_consistency_residual": consistency });
        }
        out.push(entry);
    }
    Ok(json!({ "family": fam.label(), "bundles": out }))
}

fn gt_family(p: &GtProfile, blocks: bool, grid: &[f64], c: &Common) -> Result<Value> {
    let mut worst = f64::NEG_INFINITY;
    let mut all_negative = true;
    let mut both = true;
    let mut sign = None;
    let mut points = Vec::new();
    for &r in grid {
        let k = gromov_thurston_curvatures(r, p)?;
        let op = gromov_thurston_operator(r, p)?;
        worst = k.iter().copied().fold(worst, f64::max);
        all_negative &= k.iter().all(|&x| x < 0.0);
        let (same, rev) = (classify_op(&op, c.tol), classify_op(&op.reverse_orientation(), c.tol));
        both &= same.is_definite() && rev.is_definite();
        if same.is_definite() {
            match sign {
                None => sign = Some(same.sign),
                Some(s) if s != same.sign => sign = Some(Sign::NA),
                _ => {}
            }
        }
        if blocks {
            points.push(json!({ "r": r, "curvatures": k, "same": point_summary(r, &same), "reversed": point_summary(r, &rev) }));
        }
    }
    let sign = if both { sign.unwrap_or(Sign::NA) } else { Sign::NA };
    let summary = if both { format!("definite in both orientations, {}", sign_word(sign)) } else { "not definite".into() };
    let mut out = json!({
        "family": "GromovThurston",
        "profile": value(p),
        "summary": summary,
        "sign": value(&sign),
        "negatively_curved": all_negative,
        "max_curvature_entry": worst,
        "definite_both_orientations": both,
    });
    if blocks {
        out["blocks"] = Value::from(points);
    }
    Ok(out)
}

fn isotopy_sweep(ts: &[f64], grid: &[f64], c: &Common) -> Result<Value> {
    let mut rows = Vec::with_capacity(ts.len());
    let mut all = true;
    for &t in ts {
        let v = definite_path_margin(&isotopy_path(t)?, grid, c.tol)?;
        all &= v.definite;
        rows.push(json!({ "t": t, "definite": v.definite, "margin": v.margin, "common_sign_of_q": value(&v.common_sign_of_q), "first_failure": v.first_failure }));
    }
    // A path definite for every t shares the sign of its t = 0 endpoint.
    let h4 = MetricFamily::builtin(Builtin::H4);
    let endpoint = classify_op(&oriented_blocks(&h4, grid[grid.len() / 2], Bundle::LambdaPlus)?, c.tol);
    let sign = if all && ts.first() == Some(&0.0) { endpoint.sign } else { Sign::NA };
    let summary = if all { format!("definite for all t, {}", sign_word(sign)) } else { "not definite for some t".into() };
    Ok(json!({ "summary": summary, "all_definite": all, "sign": value(&sign), "sweep": rows }))
}

pub fn family(source: &Source, bundle: BundleArg, blocks: bool, g: &RadialGrid, c: &Common) -> Result<Outcome> {
    check_common(c)?;
    let spec = match read_text(&source.file, &source.input)? {
        Some(text) => parse_family(&text)?,
        None => spec_of(source)?.ok_or_else(|| {
            Error::InvalidInput("one of --file, --input or --builtin is required".into())
        })?,
    };
    let (result, grid) = match &spec {
        FamilySpec::Metric(fam) => {
            let grid = radial_grid(g, fam.default_grid())?;
            (metric_family(fam, bundle, blocks, &grid, c)?, grid)
        }
        FamilySpec::GromovThurston(p) => {
            let grid = radial_grid(g, linspace(0.05, 3.0, 50))?;
            (gt_family(p, blocks, &grid, c)?, grid)
        }
        FamilySpec::Isotopy(t) => {
            let grid = radial_grid(g, linspace(0.1, 5.0, 50))?;
            (isotopy_sweep(&[*t], &grid, c)?, grid)
        }
    };
    Ok(Outcome::ok(envelope("family", grid_parameters(c, &grid), result)))
}

pub fn isotopy(t_points: usize, g: &RadialGrid, c: &Common) -> Result<Outcome> {
    check_common(c)?;
    if t_points < 2 {
        return Err(Error::BadParams(format!("t_points must be >= 2, got {t_points}")));
    }
    let grid = radial_grid(g, linspace(0.1, 5.0, 50))?;
    let ts = linspace(0.0, 1.0, t_points);
    let mut params = grid_parameters(c, &grid);
    params["t_points"] = json!(t_points);
    Ok(Outcome::ok(envelope("isotopy", params, isotopy_sweep(&ts, &grid, c)?)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChernInput {
    chi: i64,
    tau: i64,
    sign: Option<TwistorSign>,
    #[serde(default)]
    complex_orientation: bool,
    d_sign: Option<DSign>,
}

fn parse_enum<T: for<'de> Deserialize<'de>>(name: &str, s: &str) -> Result<T> {
    serde_json::from_value(Value::from(s)).map_err(|_| Error::InvalidInput(format!("unknown {name} {s:?}")))
}

#[allow(clippy::too_many_arguments)]
pub fn chern(
    chi: Option<i64>,
    tau: Option<i64>,
    sign: Option<&str>,
    complex_orientation: bool,
    d_sign: Option<&str>,
    file: &Option<PathBuf>,
    input: &Option<String>,
    c: &Common,
) -> Result<Outcome> {
    let inp = match read_text(file, input)? {
        Some(text) => serde_json::from_str::<ChernInput>(&text).map_err(|e| Error::InvalidInput(e.to_string()))?,
        None => ChernInput {
            chi: chi.ok_or_else(|| Error::InvalidInput("--chi is required".into()))?,
            tau: tau.ok_or_else(|| Error::InvalidInput("--tau is required".into()))?,
            sign: sign.map(|s| parse_enum("sign", s)).transpose()?,
            complex_orientation,
            d_sign: d_sign.map(|s| parse_enum("d_sign", s)).transpose()?,
        },
    };
    let inv = if inp.complex_orientation {
        if inp.sign == Some(TwistorSign::Positive) {
            return Err(Error::InvalidInput("complex orientation input uses the negative branch".into()));
        }
        chern_numbers_complex_orientation(inp.chi, inp.tau)
    } else {
        let sign = inp.sign.ok_or_else(|| Error::InvalidInput("sign is required".into()))?;
        chern_numbers(inp.chi, inp.tau, sign)
    };
    let mut result = json!({ "invariants": value(&inv) });
    if let Some(d) = inp.d_sign {
        result["gate"] = value(&hitchin_thorpe_gate(inv.chi, inv.tau, d));
    }
    let params = json!({ "complex_orientation": inp.complex_orientation, "exact": true, "tol": c.tol });
    Ok(Outcome::ok(envelope("chern", params, result)))
}

pub fn adjunction(
    euler: Option<i64>,
    self_intersection: Option<i64>,
    double_points: i64,
    file: &Option<PathBuf>,
    input: &Option<String>,
    c: &Common,
) -> Result<Outcome> {
    let surf = match read_text(file, input)? {
        Some(text) => {
            let s: SurfaceData = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(e.to_string()))?;
            SurfaceData::new(s.euler, s.self_intersection, s.double_points)?
        }
        None => SurfaceData::new(
            euler.ok_or_else(|| Error::InvalidInput("--euler is required".into()))?,
            self_intersection.ok_or_else(|| Error::InvalidInput("--self-intersection is required".into()))?,
            double_points,
        )?,
    };
    let params = json!({ "exact": true, "tol": c.tol });
    Ok(Outcome::ok(envelope("adjunction", params, json!({
        "surface": value(&surf),
        "twistor_degree": value(&twistor_degree(&surf)),
    }))))
}

pub fn verify(samples: usize, strengthened: bool, suite_samples: usize, c: &Common) -> Result<Outcome> {
    check_common(c)?;
    if samples == 0 {
        return Err(Error::BadParams("samples must be positive".into()));
    }
    let mut cfg = VerifyConfig::new(samples, c.seed, strengthened);
    cfg.grid_n = c.grid;
    cfg.refine_iters = c.refine;
    let rep = verify_pinching_theorem(&cfg);
    let mut violations = Vec::new();
    if let Some(v) = rep.violations.first() {
        violations.push(format!("{} pinching violations, first at draw {}: {}", rep.failed, v.index, v.reason));
    }
    let mut result = json!({ "pinching": value(&rep) });
    if suite_samples > 0 {
        let e = eigen_sum_suite(suite_samples, c.seed);
        let r = ricci_positive_suite(suite_samples, c.seed)?;
        let t = trace_identity_suite(suite_samples.min(1000), c.seed);
        if e.counterexamples > 0 {
            violations.push(format!("eigen-sum lemma: {} counterexamples", e.counterexamples));
        }
        if r.counterexamples > 0 {
            violations.push(format!("positive Ricci proposition: {} counterexamples", r.counterexamples));
        }
        if t.max_abs_error > 1e-12 {
            violations.push(format!("trace identity error {}", t.max_abs_error));
        }
        result["suites"] = json!({ "eigen_sum": value(&e), "ricci_positive": value(&r), "trace_identity": value(&t) });
    }
    let mut params = base_parameters(c);
    params["seed"] = json!(c.seed);
    params["samples"] = json!(samples);
    params["strengthened"] = json!(strengthened);
    params["suite_samples"] = json!(suite_samples);
    Ok(Outcome {
        report: envelope("verify", params, result),
        violation: (!violations.is_empty()).then(|| violations.join("; ")),
    })
}
