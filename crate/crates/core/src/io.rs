//! JSON input schemas for operators and families.

use serde::Deserialize;

use crate::cohom::{Builtin, GtProfile, MetricFamily, Table};
use crate::curvature::{mat3_rows, CurvatureOperator};
use crate::error::{Error, Result};
use crate::linalg::Mat3;

pub const OPERATOR_SCHEMA: &str = r#"operator input, one of:
  {"A": [[a,b,c],[d,e,f],[g,h,i]], "B": [...], "C": [...], "relaxed": false}
  {"sectional": [K01, K02, K03, K23, K31, K12]}
  {"ricci_spectrum": {"lambda": [l1, l2, l3, l4], "Wplus": [...], "Wminus": [...]}}
matrices are row-major 3x3 arrays (nested rows or nine numbers)"#;

pub const FAMILY_SCHEMA: &str = r#"family input, one of:
  {"builtin": "S4" | "H4" | "CP2" | "CH2"}
  {"builtin": "On", "n": 3}
  {"builtin": "GromovThurston", "k": 3, "r0": 1.0, "blend": [0.05, 1.0]}
  {"table": {"r": [...], "f1": [...], "f2": [...], "f3": [...]}, "fd_step": 1e-4}
  {"isotopy_t": 0.5}"#;

#[derive(Deserialize)]
struct RicciSpectrum {
    lambda: [f64; 4],
    #[serde(rename = "Wplus", with = "mat3_rows", default = "Mat3::zeros")]
    w_plus: Mat3,
    #[serde(rename = "Wminus", with = "mat3_rows", default = "Mat3::zeros")]
    w_minus: Mat3,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OperatorInput {
    Sectional { sectional: [f64; 6] },
    Ricci { ricci_spectrum: RicciSpectrum },
    Blocks(CurvatureOperator),
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, schema: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("{e}\n{schema}")))
}

/// Parses any operator form. `relaxed` overrides the flag in block form.
pub fn parse_operator(text: &str, relaxed: bool) -> Result<CurvatureOperator> {
    let input: OperatorInput = parse_json(text, OPERATOR_SCHEMA)?;
    match input {
        OperatorInput::Sectional { sectional } => CurvatureOperator::from_sectional_diagonal(sectional),
        OperatorInput::Ricci { ricci_spectrum: r } => {
            CurvatureOperator::from_ricci_spectrum(r.lambda, r.w_plus, r.w_minus)
        }
        OperatorInput::Blocks(op) => {
            CurvatureOperator::new(*op.a(), *op.b(), *op.c(), relaxed || op.relaxed())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Metric(MetricFamily),
    GromovThurston(GtProfile),
    Isotopy(f64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    builtin: Option<String>,
    n: Option<u32>,
    k: Option<u32>,
    r0: Option<f64>,
    blend: Option<[f64; 2]>,
    table: Option<Table>,
    fd_step: Option<f64>,
    isotopy_t: Option<f64>,
}

pub fn builtin_spec(name: &str, n: Option<u32>, k: Option<u32>, r0: Option<f64>, blend: Option<[f64; 2]>) -> Result<FamilySpec> {
    if name == "GromovThurston" || name == "GT" {
        let k = k.unwrap_or(3);
        let r0 = r0.unwrap_or(1.0);
        let prof = match blend {
            Some(b) => GtProfile::new(k, r0, b)?,
            None => GtProfile::with_defaults(k, r0)?,
        };
        return Ok(FamilySpec::GromovThurston(prof));
    }
    Ok(FamilySpec::Metric(MetricFamily::builtin(Builtin::parse(name, n)?)))
}

pub fn parse_family(text: &str) -> Result<FamilySpec> {
    let raw: RawFamily = parse_json(text, FAMILY_SCHEMA)?;
    let forms = [raw.builtin.is_some(), raw.table.is_some(), raw.isotopy_t.is_some()];
    if forms.iter().filter(|&&x| x).count() != 1 {
        return Err(Error::InvalidInput(format!(
            "exactly one of builtin, table, isotopy_t is required\n{FAMILY_SCHEMA}"
        )));
    }
    if let Some(name) = raw.builtin {
        return builtin_spec(&name, raw.n, raw.k, raw.r0, raw.blend);
    }
    if let Some(t) = raw.table {
        return Ok(FamilySpec::Metric(MetricFamily::tabulated(&t, raw.fd_step.unwrap_or(1e-4))?));
    }
    let t = raw.isotopy_t.unwrap();
    crate::cohom::isotopy_path(t)?;
    Ok(FamilySpec::Isotopy(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_forms() {
        let s = parse_operator(r#"{"sectional": [-1,-1,-1,-1,-1,-1]}"#, false).unwrap();
        assert_eq!(s, CurvatureOperator::hyperbolic());
        let r = parse_operator(r#"{"ricci_spectrum": {"lambda": [1,1,1,1]}}"#, false).unwrap();
        assert!((r.scalar_curvature() - 4.0).abs() < 1e-15);
        let w = r#"{"A": [[1.5,0,0],[0,1,0],[0,0,0]], "B": [0,0,0,0,0,0,0,0,0], "C": [[1,0,0],[0,1,0],[0,0,1]]}"#;
        assert!(matches!(parse_operator(w, false), Err(Error::BianchiViolation { .. })));
        assert_eq!(parse_operator(w, true).unwrap(), CurvatureOperator::boundary_witness());
    }

    #[test]
    fn malformed_inputs_are_errors() {
        for bad in ["", "{", "[1,2]", r#"{"A": [1,2]}"#, r#"{"sectional": [1,2,3]}"#, "null"] {
            assert!(matches!(parse_operator(bad, false), Err(Error::InvalidInput(_))), "{bad}");
        }
        for bad in ["{}", r#"{"builtin": "X"}"#, r#"{"builtin": "On"}"#, r#"{"isotopy_t": 2}"#] {
            assert!(parse_family(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn family_forms() {
        assert!(matches!(parse_family(r#"{"builtin": "H4"}"#), Ok(FamilySpec::Metric(_))));
        assert!(matches!(parse_family(r#"{"builtin": "On", "n": 3}"#), Ok(FamilySpec::Metric(_))));
        assert!(matches!(parse_family(r#"{"isotopy_t": 0.5}"#), Ok(FamilySpec::Isotopy(_))));
        assert!(matches!(
            parse_family(r#"{"builtin": "GromovThurston", "k": 3, "r0": 1.0}"#),
            Ok(FamilySpec::GromovThurston(_))
        ));
        let t = r#"{"table": {"r": [0.1,0.2,0.3,0.4,0.5], "f1": [1,1,1,1,1], "f2": [1,1,1,1,1], "f3": [1,1,1,1,1]}, "fd_step": 0.01}"#;
        assert!(matches!(parse_family(t), Ok(FamilySpec::Metric(_))));
    }
}
