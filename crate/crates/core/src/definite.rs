//! The definiteness operator `D = A² − BᵀB`, sign and orientation
//! classification, taming margins and Ricci-operator utilities.

use serde::Serialize;

use crate::curvature::CurvatureOperator;
use crate::linalg::{fibonacci_sphere, sym_eigen, sym_eigenvalues, symmetrize, Mat3, SphereQuadratic, Vec3};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_GRID: usize = 64;
pub const DEFAULT_REFINE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Indefinite,
    Definite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DSignature {
    #[serde(rename = "+3")]
    Plus3,
    #[serde(rename = "-3")]
    Minus3,
    #[serde(rename = "mixed")]
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Same,
    Opposite,
    NA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Positive,
    Negative,
    NA,
}

impl Sign {
    fn of(x: f64) -> Self {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::NA
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefiniteClassification {
    pub verdict: Verdict,
    pub d_signature: DSignature,
    pub orientation: Orientation,
    pub sign: Sign,
    pub margin: f64,
    pub boundary: bool,
    pub d_eigenvalues: [f64; 3],
}

impl DefiniteClassification {
    pub fn is_definite(&self) -> bool {
        self.verdict == Verdict::Definite
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TamedStructure {
    Jplus,
    Jminus,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TamingReport {
    pub margin: f64,
    pub tamed_structure: TamedStructure,
    pub argmin_v: [f64; 3],
}

pub fn d_operator(r: &CurvatureOperator) -> Mat3 {
    let a = r.a();
    let b = r.b();
    symmetrize(&(a * a - b.transpose() * b))
}

pub fn classify(r: &CurvatureOperator, tol: f64) -> DefiniteClassification {
    let eig = sym_eigenvalues(&d_operator(r));
    let margin = eig.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    let d_signature = if eig[0] > 0.0 {
        DSignature::Plus3
    } else if eig[2] < 0.0 {
        DSignature::Minus3
    } else {
        DSignature::Mixed
    };
    let boundary = margin <= tol;
    let (verdict, orientation, sign) = match d_signature {
        _ if boundary => (Verdict::Indefinite, Orientation::NA, Sign::NA),
        DSignature::Plus3 => (Verdict::Definite, Orientation::Same, Sign::of(r.a().determinant())),
        DSignature::Minus3 => (
            Verdict::Definite,
            Orientation::Opposite,
            Sign::of(r.b().determinant()),
        ),
        DSignature::Mixed => (Verdict::Indefinite, Orientation::NA, Sign::NA),
    };
    DefiniteClassification {
        verdict,
        d_signature,
        orientation,
        sign,
        margin,
        boundary,
        d_eigenvalues: [eig[0], eig[1], eig[2]],
    }
}

fn taming_objective(a: &Mat3, b: &Mat3, v: &Vec3) -> f64 {
    (v.dot(&(a * v))).abs() - (b * v).norm()
}

/// Local minimum of `σ(Av,v) − |Bv|` from `v0`, by alternating exact steps on
/// `max_{v,w} −σ(Av,v) + (w, Bv)`.
fn taming_descent(q: &SphereQuadratic, a: &Mat3, b: &Mat3, sigma: f64, v0: Vec3, iters: usize) -> (Vec3, f64) {
    let f = |v: &Vec3| sigma * v.dot(&(a * v)) - (b * v).norm();
    let mut v = v0;
    let mut fv = f(&v);
    for _ in 0..iters {
        let bv = b * v;
        let n = bv.norm();
        if n <= 1e-300 {
            break;
        }
        let w = bv / n;
        let (cand, _) = q.maximize(&(b.transpose() * w * 0.5));
        let fc = f(&cand);
        if !(fc < fv - 1e-16 * (1.0 + fv.abs())) {
            if fc < fv {
                v = cand;
                fv = fc;
            }
            break;
        }
        v = cand;
        fv = fc;
    }
    (v, fv)
}

/// Points of the cone `(Av,v) = 0` on the sphere, parametrized in the
/// eigenbasis of `A`; `None` when `A` is definite.
fn null_cone(a: &Mat3) -> Option<impl Fn(f64) -> Vec3> {
    let (vals, vecs) = sym_eigen(a);
    let (iso, p, q) = if vals[1] >= 0.0 && vals[0] < 0.0 {
        (0, 1, 2)
    } else if vals[1] <= 0.0 && vals[2] > 0.0 {
        (2, 0, 1)
    } else {
        return None;
    };
    let (ai, ap, aq) = (vals[iso].abs(), vals[p].abs(), vals[q].abs());
    let (ei, ep, eq) = (vecs.column(iso).into_owned(), vecs.column(p).into_owned(), vecs.column(q).into_owned());
    Some(move |t: f64| {
        let (c, s) = (t.cos(), t.sin());
        let k = (ap * c * c + aq * s * s) / ai;
        (ep * c + eq * s + ei * k.sqrt()) / (1.0 + k).sqrt()
    })
}

/// Minimum of `−|Bv|` along the null cone of `A`.
fn cone_minimum(a: &Mat3, b: &Mat3, iters: usize) -> Option<(Vec3, f64)> {
    let curve = null_cone(a)?;
    let f = |t: f64| -(b * curve(t)).norm();
    let n = 720;
    let h = std::f64::consts::TAU / n as f64;
    let mut samples: Vec<(f64, usize)> = (0..n).map(|i| (f(i as f64 * h), i)).collect();
    samples.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut best: Option<(f64, f64)> = None;
    for &(_, i) in samples.iter().take(3) {
        let (mut lo, mut hi) = ((i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
        for _ in 0..iters.max(40) {
            let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if f(x1) < f(x2) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        let t = 0.5 * (lo + hi);
        let cand = [(f(t), t), (f(i as f64 * h), i as f64 * h)];
        for (val, t) in cand {
            if best.map_or(true, |b| val < b.0) {
                best = Some((val, t));
            }
        }
    }
    best.map(|(_, t)| {
        let v = curve(t);
        (v, taming_objective(a, b, &v))
    })
}

/// Minimum of `|(Av,v)| − |Bv|` over the unit sphere: grid screening, descent
/// on each signed branch, and a line search along the null cone of `A`.
pub fn taming_margin(r: &CurvatureOperator, grid_n: usize, refine_iters: usize, tol: f64) -> TamingReport {
    let (a, b) = (r.a(), r.b());
    let pts = fibonacci_sphere(grid_n.max(2) * grid_n.max(2));
    let mut best = (pts[0], f64::INFINITY);
    let mut offer = |v: Vec3, val: f64| {
        if val < best.1 {
            best = (v, val);
        }
    };
    for v in &pts {
        offer(*v, taming_objective(a, b, v));
    }
    for sigma in [1.0, -1.0] {
        let q = SphereQuadratic::new(&(a * -sigma));
        let g = |v: &Vec3| sigma * v.dot(&(a * v)) - (b * v).norm();
        let mut scored: Vec<(f64, usize)> = pts
            .iter()
            .enumerate()
            .filter(|(_, v)| sigma * v.dot(&(a * *v)) >= 0.0)
            .map(|(i, v)| (g(v), i))
            .collect();
        scored.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for &(_, i) in scored.iter().take(4) {
            let (v, _) = taming_descent(&q, a, b, sigma, pts[i], refine_iters);
            offer(v, taming_objective(a, b, &v));
        }
    }
    if let Some((v, val)) = cone_minimum(a, b, refine_iters) {
        offer(v, val);
    }
    let det_a = a.determinant();
    let tamed_structure = if best.1 > tol && det_a > 0.0 {
        TamedStructure::Jplus
    } else if best.1 > tol && det_a < 0.0 {
        TamedStructure::Jminus
    } else {
        TamedStructure::None
    };
    TamingReport {
        margin: best.1,
        tamed_structure,
        argmin_v: [best.0.x, best.0.y, best.0.z],
    }
}

/// Taming condition for a self-dual component `c` perturbed by an
/// anti-self-dual `alpha`, in unit-basis scale.
pub fn tame_pointwise(c: f64, alpha: &Vec3) -> bool {
    alpha.norm() < c.abs()
}

/// Eigenvalues `½(λi+λj) − s/6`, `i < j`, sorted descending.
pub fn ricci_operator_spectrum(lambda: [f64; 4]) -> [f64; 6] {
    let s: f64 = lambda.iter().sum();
    let mut out = [0.0; 6];
    let mut k = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            out[k] = 0.5 * (lambda[i] + lambda[j]) - s / 6.0;
            k += 1;
        }
    }
    out.sort_by(|x, y| y.total_cmp(x));
    out
}

pub fn bochner_condition(r: &CurvatureOperator) -> bool {
    let e = sym_eigenvalues(r.a());
    e[0] + e[1] > 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenSumDominance {
    pub holds_hypothesis: bool,
    pub sum_abs_a: f64,
    pub sum_abs_b: f64,
}

pub fn eigen_sum_dominance(a: &Mat3, b: &Mat3) -> EigenSumDominance {
    let (a, b) = (symmetrize(a), symmetrize(b));
    let gap = sym_eigenvalues(&(a * a - b * b));
    let abs_sum = |m: &Mat3| sym_eigenvalues(m).iter().map(|x| x.abs()).sum();
    EigenSumDominance {
        holds_hypothesis: gap[0] > 0.0,
        sum_abs_a: abs_sum(&a),
        sum_abs_b: abs_sum(&b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RicciPositiveCheck {
    pub premises: bool,
    pub min_lambda: f64,
}

pub fn ricci_positive_check(lambda: [f64; 4], w_plus: &Mat3) -> crate::Result<RicciPositiveCheck> {
    let r = CurvatureOperator::from_ricci_spectrum(lambda, *w_plus, Mat3::zeros())?;
    let d = sym_eigen(&d_operator(&r)).0;
    let a = sym_eigenvalues(r.a());
    Ok(RicciPositiveCheck {
        premises: d[0] > 0.0 && a[0] > 0.0,
        min_lambda: lambda.iter().copied().fold(f64::INFINITY, f64::min),
    })
}
