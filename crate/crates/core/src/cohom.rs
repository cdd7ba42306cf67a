//! Cohomogeneity-one metrics `dr² + Σ fi² ei²` on `ℝ × SU(2)` and the
//! connections they induce on `Λ±`.
//!
//! The coframe satisfies `de1 = 2 e2∧e3` (cyclically), so that `fi = sinh r`
//! is the hyperbolic metric. A connection `d + Σ ai ei⊗εi` has curvature with
//! components `ai' dr∧ei + κ (ai + aj ak) ej∧ek`.

use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureOperator;
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};

/// Value and first two derivatives of a radial function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }
}

fn sin_jet(r: f64) -> Jet {
    Jet::new(r.sin(), r.cos(), -r.sin())
}

fn sinh_jet(r: f64) -> Jet {
    Jet::new(r.sinh(), r.cosh(), r.sinh())
}

fn scale(j: Jet, k: f64) -> Jet {
    Jet::new(k * j.v, k * j.d1, k * j.d2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Builtin {
    S4,
    H4,
    CP2,
    CH2,
    On(u32),
}

impl Builtin {
    pub fn parse(name: &str, n: Option<u32>) -> Result<Self> {
        match name {
            "S4" => Ok(Builtin::S4),
            "H4" => Ok(Builtin::H4),
            "CP2" => Ok(Builtin::CP2),
            "CH2" => Ok(Builtin::CH2),
            "On" => {
                let n = n.ok_or_else(|| Error::BadParams("On requires n".into()))?;
                if n < 1 {
                    return Err(Error::BadParams(format!("On requires n >= 1, got {n}")));
                }
                Ok(Builtin::On(n))
            }
            other => Err(Error::BadParams(format!("unknown builtin family {other:?}"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Builtin::On(n) => format!("On({n})"),
            other => format!("{other:?}"),
        }
    }

    fn jets(&self, r: f64) -> [Jet; 3] {
        match *self {
            Builtin::S4 => [sin_jet(r); 3],
            Builtin::H4 => [sinh_jet(r); 3],
            Builtin::CP2 => {
                let t = 2.0 * r;
                let f1 = Jet::new(0.5 * t.sin(), t.cos(), -2.0 * t.sin());
                [f1, sin_jet(r), sin_jet(r)]
            }
            Builtin::CH2 => {
                let t = 2.0 * r;
                let f1 = Jet::new(0.5 * t.sinh(), t.cosh(), 2.0 * t.sinh());
                [f1, sinh_jet(r), sinh_jet(r)]
            }
            Builtin::On(n) => {
                let k = (n as f64).sqrt();
                let cosh = Jet::new(r.cosh(), r.sinh(), r.cosh());
                [scale(sinh_jet(r), k), scale(cosh, k), scale(cosh, k)]
            }
        }
    }

    fn domain(&self) -> (f64, f64) {
        match self {
            Builtin::S4 => (0.0, std::f64::consts::PI),
            Builtin::CP2 => (0.0, std::f64::consts::FRAC_PI_2),
            _ => (0.0, f64::INFINITY),
        }
    }
}

/// Natural cubic spline through tabulated samples.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(Error::InvalidInput(
                "a table needs at least three points and equal column lengths".into(),
            ));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("table"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("table radii must be strictly increasing".into()));
        }
        // Tridiagonal system for the second derivatives, m[0] = m[n-1] = 0.
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
            c[i] = h1 / diag;
            d[i] = (rhs - h0 * d[i - 1]) / diag;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(t >= lo && t <= hi) {
            return Err(Error::Domain(format!("r = {t} outside table range [{lo}, {hi}]")));
        }
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= self.x.len() => self.x.len() - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        Ok(a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub r: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub f3: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Profiles {
    Builtin(Builtin),
    /// Closed-form values with central differences in place of exact
    /// derivatives.
    Differenced(Builtin),
    Tabulated([NaturalSpline; 3]),
}

/// Three radial warping functions with derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricFamily {
    profiles: Profiles,
    fd_step: f64,
    domain: (f64, f64),
    label: String,
}

fn central(f: impl Fn(f64) -> Result<f64>, r: f64, h: f64) -> Result<Jet> {
    let (m, c, p) = (f(r - h)?, f(r)?, f(r + h)?);
    Ok(Jet::new(c, (p - m) / (2.0 * h), (p - 2.0 * c + m) / (h * h)))
}

impl MetricFamily {
    pub fn builtin(b: Builtin) -> Self {
        Self {
            profiles: Profiles::Builtin(b),
            fd_step: 0.0,
            domain: b.domain(),
            label: b.name(),
        }
    }

    pub fn differenced(b: Builtin, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::BadParams(format!("fd_step must be positive, got {h}")));
        }
        Ok(Self {
            profiles: Profiles::Differenced(b),
            fd_step: h,
            domain: b.domain(),
            label: format!("{} (differenced)", b.name()),
        })
    }

    pub fn tabulated(t: &Table, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::BadParams(format!("fd_step must be positive, got {h}")));
        }
        if t.f1.iter().chain(&t.f2).chain(&t.f3).any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidInput("tabulated profiles must be positive".into()));
        }
        let splines = [
            NaturalSpline::new(&t.r, &t.f1)?,
            NaturalSpline::new(&t.r, &t.f2)?,
            NaturalSpline::new(&t.r, &t.f3)?,
        ];
        let (lo, hi) = splines[0].range();
        if hi - lo <= 2.0 * h {
            return Err(Error::BadParams("fd_step too large for the table range".into()));
        }
        Ok(Self {
            profiles: Profiles::Tabulated(splines),
            fd_step: h,
            domain: (lo + h, hi - h),
            label: "table".into(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.profiles, Profiles::Builtin(_))
    }

    pub fn eval(&self, r: f64) -> Result<[Jet; 3]> {
        if !r.is_finite() {
            return Err(Error::Domain(format!("r = {r}")));
        }
        let jets = match &self.profiles {
            Profiles::Builtin(b) => b.jets(r),
            Profiles::Differenced(b) => {
                let h = self.fd_step;
                let mut out = [Jet::new(0.0, 0.0, 0.0); 3];
                for (i, o) in out.iter_mut().enumerate() {
                    *o = central(|x| Ok(b.jets(x)[i].v), r, h)?;
                }
                out
            }
            Profiles::Tabulated(s) => {
                let h = self.fd_step;
                [
                    central(|x| s[0].eval(x), r, h)?,
                    central(|x| s[1].eval(x), r, h)?,
                    central(|x| s[2].eval(x), r, h)?,
                ]
            }
        };
        if jets.iter().any(|j| !(j.v.is_finite() && j.d1.is_finite() && j.d2.is_finite())) {
            return Err(Error::Domain(format!("non-finite profile at r = {r}")));
        }
        Ok(jets)
    }

    /// Default evaluation grid `[0.05, 8]` with 160 points, clamped to the
    /// interior of the family's interval.
    pub fn default_grid(&self) -> Vec<f64> {
        let (lo, hi) = self.domain;
        let a = if lo == 0.0 { 0.05 } else { lo.max(0.05) };
        let b = if hi.is_finite() { (hi - 0.05).min(8.0) } else { 8.0 };
        linspace(a, b, 160)
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bundle {
    LambdaPlus,
    LambdaMinus,
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
enum PathSource {
    Family(MetricFamily),
    Isotopy(f64),
}

/// Radial coefficients `(a1, a2, a3)` of a connection `d + Σ ai ei⊗εi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionPath {
    source: PathSource,
    bundle: Bundle,
}

/// Coefficients and their radial derivatives at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPoint {
    pub a: [f64; 3],
    pub da: [f64; 3],
}

pub fn connection_path(fam: &MetricFamily, bundle: Bundle) -> Result<ConnectionPath> {
    if bundle == Bundle::Direct {
        return Err(Error::BadParams(
            "a metric family induces paths on LambdaPlus or LambdaMinus".into(),
        ));
    }
    Ok(ConnectionPath {
        source: PathSource::Family(fam.clone()),
        bundle,
    })
}

/// Linear isotopy between the `H4` and `CH2` paths on `Λ+`.
pub fn isotopy_path(t: f64) -> Result<ConnectionPath> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, 1]",
        });
    }
    Ok(ConnectionPath {
        source: PathSource::Isotopy(t),
        bundle: Bundle::Direct,
    })
}

fn path_from_jets(f: &[Jet; 3], bundle: Bundle) -> Result<PathPoint> {
    let sgn = match bundle {
        Bundle::LambdaPlus => -1.0,
        _ => 1.0,
    };
    let mut out = PathPoint {
        a: [0.0; 3],
        da: [0.0; 3],
    };
    for i in 0..3 {
        let (fi, fj, fk) = (f[i], f[(i + 1) % 3], f[(i + 2) % 3]);
        let den = 2.0 * fj.v * fk.v;
        if den == 0.0 || !den.is_finite() {
            return Err(Error::Domain("f_j f_k vanishes".into()));
        }
        let num = fi.v * fi.v - fj.v * fj.v - fk.v * fk.v;
        let dnum = 2.0 * (fi.v * fi.d1 - fj.v * fj.d1 - fk.v * fk.d1);
        let dden = 2.0 * (fj.d1 * fk.v + fj.v * fk.d1);
        out.a[i] = sgn * fi.d1 / 2.0 + num / den;
        out.da[i] = sgn * fi.d2 / 2.0 + (dnum * den - num * dden) / (den * den);
    }
    Ok(out)
}

impl ConnectionPath {
    pub fn bundle(&self) -> Bundle {
        self.bundle
    }

    pub fn family(&self) -> Option<&MetricFamily> {
        match &self.source {
            PathSource::Family(f) => Some(f),
            PathSource::Isotopy(_) => None,
        }
    }

    pub fn eval(&self, r: f64) -> Result<PathPoint> {
        match &self.source {
            PathSource::Family(fam) => path_from_jets(&fam.eval(r)?, self.bundle),
            PathSource::Isotopy(t) => {
                let (c, s) = (r.cosh(), r.sinh());
                let base = -0.5 * (1.0 + c);
                let a1 = base + 0.5 * t * c * (1.0 - c);
                let a2 = base + 0.5 * t * (1.0 - c);
                let da1 = -0.5 * s + 0.5 * t * s * (1.0 - 2.0 * c);
                let da2 = -0.5 * s - 0.5 * t * s;
                Ok(PathPoint {
                    a: [a1, a2, a2],
                    da: [da1, da2, da2],
                })
            }
        }
    }
}

/// `qi = ai' (ai + aj ak)`.
pub fn q_values(p: &PathPoint) -> [f64; 3] {
    let a = p.a;
    [0, 1, 2].map(|i| p.da[i] * (a[i] + a[(i + 1) % 3] * a[(i + 2) % 3]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathVerdict {
    pub definite: bool,
    pub common_sign_of_q: QSign,
    pub margin: f64,
    pub q_min: f64,
    pub q_max: f64,
    /// First radius at which definiteness fails.
    pub first_failure: Option<f64>,
}

pub fn definite_path_margin(path: &ConnectionPath, r_grid: &[f64], tol: f64) -> Result<PathVerdict> {
    if r_grid.len() < 2 {
        return Err(Error::InvalidInput("r_grid needs at least two points".into()));
    }
    let mut margin = f64::INFINITY;
    let (mut q_min, mut q_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut first_failure = None;
    let mut sign: Option<bool> = None;
    let mut consistent = true;
    for &r in r_grid {
        let q = q_values(&path.eval(r)?);
        for &x in &q {
            if !x.is_finite() {
                return Err(Error::Domain(format!("non-finite q at r = {r}")));
            }
            margin = margin.min(x.abs());
            q_min = q_min.min(x);
            q_max = q_max.max(x);
            let ok = x.abs() > tol
                && match sign {
                    None => {
                        sign = Some(x > 0.0);
                        true
                    }
                    Some(pos) => (x > 0.0) == pos,
                };
            if !ok && consistent {
                consistent = false;
                first_failure = Some(r);
            }
        }
    }
    let common_sign_of_q = if q_min > tol {
        QSign::Plus
    } else if q_max < -tol {
        QSign::Minus
    } else {
        QSign::None
    };
    Ok(PathVerdict {
        definite: consistent,
        common_sign_of_q,
        margin,
        q_min,
        q_max,
        first_failure,
    })
}

/// Normalization tying the trivialized-frame curvature to the blocks:
/// `κ` weighs the `(ai + aj ak)` term and `sign` is the overall sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConstants {
    pub bracket_weight: f64,
    pub curvature_sign: f64,
}

impl CalibrationConstants {
    pub const FROZEN: Self = Self {
        bracket_weight: -2.0,
        curvature_sign: 1.0,
    };

    /// Recovers the constants from `Ric0 = 0` and `s < 0` on `H4` at radius `r`.
    pub fn derive(r: f64) -> Result<Self> {
        let fam = MetricFamily::builtin(Builtin::H4);
        let (p, q) = frame_components(&fam, r, Bundle::LambdaPlus)?;
        let bracket_weight = p[0] / q[0];
        let a = p[0] + bracket_weight * q[0];
        Ok(Self {
            bracket_weight,
            curvature_sign: if a < 0.0 { 1.0 } else { -1.0 },
        })
    }
}

/// `pi = ai'/fi` and `qi = (ai + aj ak)/(fj fk)` in the orthonormal coframe.
fn frame_components(fam: &MetricFamily, r: f64, bundle: Bundle) -> Result<([f64; 3], [f64; 3])> {
    let f = fam.eval(r)?;
    let pt = path_from_jets(&f, bundle)?;
    let mut p = [0.0; 3];
    let mut q = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        p[i] = pt.da[i] / f[i].v;
        q[i] = (pt.a[i] + pt.a[j] * pt.a[k]) / (f[j].v * f[k].v);
    }
    Ok((p, q))
}

/// Curvature operator of the family at `r`, read off from the curvatures of
/// the induced connections on `Λ+` and `Λ-`.
pub fn reconstruct_blocks(fam: &MetricFamily, r: f64, calib: &CalibrationConstants) -> Result<CurvatureOperator> {
    let (pp, qp) = frame_components(fam, r, Bundle::LambdaPlus)?;
    let (pm, qm) = frame_components(fam, r, Bundle::LambdaMinus)?;
    let (k, s) = (calib.bracket_weight, calib.curvature_sign);
    let a = Vec3::from_fn(|i, _| s * (pp[i] + k * qp[i]));
    let b = Vec3::from_fn(|i, _| s * (pp[i] - k * qp[i]));
    let c = Vec3::from_fn(|i, _| -s * (pm[i] - k * qm[i]));
    CurvatureOperator::new(
        Mat3::from_diagonal(&a),
        Mat3::from_diagonal(&b),
        Mat3::from_diagonal(&c),
        !fam.is_closed_form(),
    )
}

/// Mismatch between the `B` block read from the `Λ+` and `Λ-` connections.
pub fn block_consistency(fam: &MetricFamily, r: f64, calib: &CalibrationConstants) -> Result<f64> {
    let (pp, qp) = frame_components(fam, r, Bundle::LambdaPlus)?;
    let (pm, qm) = frame_components(fam, r, Bundle::LambdaMinus)?;
    let (k, s) = (calib.bracket_weight, calib.curvature_sign);
    Ok((0..3)
        .map(|i| (s * (pp[i] - k * qp[i]) + s * (pm[i] + k * qm[i])).abs())
        .fold(0.0, f64::max))
}

/// Radial warping `σ` of the metric `dr² + cosh²r |dx|² + σ² dθ²`.
pub trait SigmaProfile {
    fn jet(&self, r: f64) -> Jet;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledSinh(pub f64);

impl SigmaProfile for ScaledSinh {
    fn jet(&self, r: f64) -> Jet {
        scale(sinh_jet(r), self.0)
    }
}

/// `σ = sinh r` up to `start`, `σ = k sinh r` from `end` on, with `σ'' > 0`
/// in between.
///
/// On the window, `σ'' = sinh r (1 + (k-1) H) + c φ`, where `H` is a quintic
/// smoothstep over `[end - d, end]` and `φ = t²(1-t)²` a bump over
/// `[start, m]`; `c` and `m` are fixed by matching `σ` and `σ'` at `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GtProfile {
    pub k: u32,
    pub r0: f64,
    pub start: f64,
    pub end: f64,
    pub late_width: f64,
    pub bump_end: f64,
    pub bump_amp: f64,
}

const SMOOTHSTEP: [f64; 6] = [0.0, 0.0, 0.0, 10.0, -15.0, 6.0];

fn poly_eval(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

const GAUSS8: [(f64, f64); 4] = [
    (0.18343464249564978, 0.36268378337836177),
    (0.525532409916329, 0.31370664587788705),
    (0.7966664774136267, 0.22238103445337434),
    (0.9602898564975362, 0.10122853629037669),
];

/// `∫_0^τ p(t) sinh(s0 + d t) dt` by 8-point Gauss–Legendre, exact up to
/// the truncation of `sinh` far below rounding for `d τ ≤ 1`.
fn int_poly_sinh(p: &[f64], s0: f64, d: f64, tau: f64) -> f64 {
    let half = 0.5 * tau;
    let f = |t: f64| poly_eval(p, t) * (s0 + d * t).sinh();
    half * GAUSS8
        .iter()
        .map(|&(x, w)| w * (f(half * (1.0 + x)) + f(half * (1.0 - x))))
        .sum::<f64>()
}

fn phi1(t: f64) -> f64 {
    t.powi(3) / 3.0 - t.powi(4) / 2.0 + t.powi(5) / 5.0
}

fn phi2(t: f64) -> f64 {
    t.powi(4) / 12.0 - t.powi(5) / 10.0 + t.powi(6) / 30.0
}

impl GtProfile {
    /// Profile for a `k`-fold cover with blending window `blend = [start, end]`
    /// inside `(0, r0]`.
    pub fn new(k: u32, r0: f64, blend: [f64; 2]) -> Result<Self> {
        let [start, end] = blend;
        if k < 2 {
            return Err(Error::BadParams(format!("k must be an integer >= 2, got {k}")));
        }
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::BadParams(format!("r0 must be positive, got {r0}")));
        }
        if !(start > 0.0 && start < end && end <= r0) {
            return Err(Error::BadParams(format!(
                "blend window [{start}, {end}] must satisfy 0 < start < end <= r0"
            )));
        }
        let d = 0.2 * (end - start);
        let s0 = end - d;
        let i_end = d * int_poly_sinh(&SMOOTHSTEP, s0, d, 1.0);
        let mut tsmooth = vec![0.0];
        tsmooth.extend_from_slice(&SMOOTHSTEP);
        let j_end = d * (d * int_poly_sinh(&SMOOTHSTEP, s0, d, 1.0) - d * int_poly_sinh(&tsmooth, s0, d, 1.0));
        let k1 = end.cosh() - i_end;
        if !(k1 > 0.0) {
            return Err(Error::BadParams("blend window admits no convex profile".into()));
        }
        let m = 2.0 * end - start - 2.0 * (end.sinh() - j_end) / k1;
        if !(m > start && m <= s0) {
            return Err(Error::BadParams(format!(
                "blend window [{start}, {end}] admits no convex profile (bump end {m})"
            )));
        }
        let w = m - start;
        let c = (k as f64 - 1.0) * k1 / (w * phi1(1.0));
        let prof = Self {
            k,
            r0,
            start,
            end,
            late_width: d,
            bump_end: m,
            bump_amp: c,
        };
        let n = 400;
        for i in 0..=n {
            let r = start + (end - start) * i as f64 / n as f64;
            let j = prof.jet(r);
            if !(j.v > 0.0 && j.d1 > 0.0 && j.d2 > 0.0) {
                return Err(Error::BadParams(format!(
                    "convexity fails at r = {r}: sigma = {}, sigma' = {}, sigma'' = {}",
                    j.v, j.d1, j.d2
                )));
            }
        }
        Ok(prof)
    }

    pub fn with_defaults(k: u32, r0: f64) -> Result<Self> {
        Self::new(k, r0, [0.05_f64.min(r0 / 2.0), r0])
    }
}

impl SigmaProfile for GtProfile {
    fn jet(&self, r: f64) -> Jet {
        let km1 = self.k as f64 - 1.0;
        if r <= self.start {
            return sinh_jet(r);
        }
        if r >= self.end {
            return scale(sinh_jet(r), self.k as f64);
        }
        let d = self.late_width;
        let s0 = self.end - d;
        let w = self.bump_end - self.start;
        let tb = ((r - self.start) / w).clamp(0.0, 1.0);
        let bump = if tb < 1.0 { tb * tb * (1.0 - tb) * (1.0 - tb) } else { 0.0 };
        let (mut late2, mut late1, mut late0) = (0.0, 0.0, 0.0);
        if r > s0 {
            let tau = (r - s0) / d;
            let mut tsmooth = vec![0.0];
            tsmooth.extend_from_slice(&SMOOTHSTEP);
            let i0 = int_poly_sinh(&SMOOTHSTEP, s0, d, tau);
            let i1 = int_poly_sinh(&tsmooth, s0, d, tau);
            late2 = r.sinh() * poly_eval(&SMOOTHSTEP, tau);
            late1 = d * i0;
            late0 = d * ((r - s0) * i0 - d * i1);
        }
        let c = self.bump_amp;
        let tail = (r - self.bump_end).max(0.0);
        Jet::new(
            r.sinh() + km1 * late0 + c * (w * w * phi2(tb) + w * phi1(1.0) * tail),
            r.cosh() + km1 * late1 + c * w * phi1(tb),
            r.sinh() + km1 * late2 + c * bump,
        )
    }
}

/// The six coordinate-plane curvatures `[K01, K02, K03, K23, K31, K12]` of
/// `dr² + cosh²r (dx1² + dx2²) + σ² dθ²` in the coframe `(dr, dθ, dx1, dx2)`.
pub fn gromov_thurston_curvatures(r: f64, sigma: &dyn SigmaProfile) -> Result<[f64; 6]> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be positive, got {r}")));
    }
    let j = sigma.jet(r);
    if !(j.v > 0.0) {
        return Err(Error::Domain(format!("sigma({r}) = {} is not positive", j.v)));
    }
    let mixed = -(j.d1 / j.v) * r.tanh();
    Ok([-j.d2 / j.v, -1.0, -1.0, -1.0, mixed, mixed])
}

pub fn gromov_thurston_operator(r: f64, sigma: &dyn SigmaProfile) -> Result<CurvatureOperator> {
    CurvatureOperator::from_sectional_diagonal(gromov_thurston_curvatures(r, sigma)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubic_interior() {
        let x = linspace(0.0, 2.0, 200);
        let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let s = NaturalSpline::new(&x, &y).unwrap();
        for t in [0.5, 1.0, 1.37] {
            assert!((s.eval(t).unwrap() - f64::sin(t)).abs() < 1e-7);
        }
        assert!(s.eval(2.5).is_err());
    }

    #[test]
    fn poly_sinh_integral_matches_closed_form() {
        // ∫_0^1 t sinh(t) dt = cosh 1 - sinh 1
        let v = int_poly_sinh(&[0.0, 1.0], 0.0, 1.0, 1.0);
        assert!((v - (1f64.cosh() - 1f64.sinh())).abs() < 1e-15);
    }

    #[test]
    fn gt_profile_is_c2_at_window_ends() {
        let g = GtProfile::with_defaults(3, 1.0).unwrap();
        for (r, k) in [(g.start, 1.0), (g.end, 3.0)] {
            let inside = g.jet(r + if k == 1.0 { 1e-9 } else { -1e-9 });
            let exact = scale(sinh_jet(r), k);
            assert!((inside.v - exact.v).abs() < 1e-8);
            assert!((inside.d1 - exact.d1).abs() < 1e-8);
            assert!((inside.d2 - exact.d2).abs() < 1e-7);
        }
    }

    #[test]
    fn gt_profile_derivatives_are_consistent() {
        let g = GtProfile::with_defaults(3, 1.0).unwrap();
        let h = 1e-6;
        for r in linspace(0.06, 0.99, 40) {
            let (m, c, p) = (g.jet(r - h), g.jet(r), g.jet(r + h));
            let e1 = ((p.v - m.v) / (2.0 * h) - c.d1).abs();
            let e2 = ((p.d1 - m.d1) / (2.0 * h) - c.d2).abs();
            assert!(e1 < 1e-8 && e2 < 1e-6, "r = {r}: {e1} {e2} {c:?}");
        }
    }

    #[test]
    fn gt_rejects_bad_windows() {
        assert!(GtProfile::new(1, 1.0, [0.05, 1.0]).is_err());
        assert!(GtProfile::new(3, 1.0, [0.5, 0.4]).is_err());
        assert!(GtProfile::new(3, 1.0, [0.05, 1.5]).is_err());
        assert!(GtProfile::new(3, 1.0, [0.9, 1.0]).is_err());
    }

    #[test]
    fn family_grid_is_clamped() {
        let g = MetricFamily::builtin(Builtin::CP2).default_grid();
        assert_eq!(g.len(), 160);
        assert_eq!(g[0], 0.05);
        assert!((g[159] - (std::f64::consts::FRAC_PI_2 - 0.05)).abs() < 1e-15);
        let h = MetricFamily::builtin(Builtin::H4).default_grid();
        assert_eq!(h[159], 8.0);
    }

    #[test]
    fn direct_bundle_needs_isotopy() {
        let f = MetricFamily::builtin(Builtin::H4);
        assert!(connection_path(&f, Bundle::Direct).is_err());
        assert!(isotopy_path(1.5).is_err());
    }
}
