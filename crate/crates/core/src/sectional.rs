//! Sectional curvature on the decomposable cone `u + v`, `u ∈ Λ+`, `v ∈ Λ-`.
//!
//! Values use the scale `(Au,u) + 2(Bu,v) + (Cv,v)`, which is twice the usual
//! sectional curvature of the plane dual to `(u + v)/√2`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::curvature::CurvatureOperator;
use crate::definite::{classify, d_operator, Sign};
use crate::error::{Error, Result};
use crate::linalg::{fibonacci_sphere, sym_eigenvalues, Mat3, SphereQuadratic, Vec3};
use crate::sampling::{gaussian_matrix, gaussian_traceless, pinching_sample, stream_rng};

pub const PINCHING_CONSTANT: f64 = 0.4;
const UNIT_TOL: f64 = 1e-10;
const CANDIDATES: usize = 8;
const COARSE_STARTS: usize = 3;

pub fn sectional_value(r: &CurvatureOperator, u: &Vec3, v: &Vec3) -> Result<f64> {
    let (nu, nv) = (u.norm(), v.norm());
    if (nu - 1.0).abs() > UNIT_TOL || (nv - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit {
            norm_u: nu,
            norm_v: nv,
        });
    }
    Ok(sec(r, u, v))
}

#[inline]
pub(crate) fn sec(r: &CurvatureOperator, u: &Vec3, v: &Vec3) -> f64 {
    u.dot(&(r.a() * u)) + 2.0 * v.dot(&(r.b() * u)) + v.dot(&(r.c() * v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub u: [f64; 3],
    pub v: [f64; 3],
}

impl Witness {
    fn new(u: &Vec3, v: &Vec3) -> Self {
        Self {
            u: [u.x, u.y, u.z],
            v: [v.x, v.y, v.z],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witnesses {
    pub min: Witness,
    pub max: Witness,
}

/// Eigenvalue offsets of `A` and `C` after rescaling to `s = 12`: the highest
/// and lowest eigenvalues are `1 + a1`, `1 - a2` and `1 + c1`, `1 - c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Offsets {
    pub a1: f64,
    pub a2: f64,
    pub c1: f64,
    pub c2: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinchingReport {
    pub min_sec: f64,
    pub max_sec: f64,
    #[serde(serialize_with = "ratio_or_undefined")]
    pub ratio: Option<f64>,
    pub sign_uniform: bool,
    pub witnesses: Witnesses,
    pub offsets: Option<Offsets>,
}

fn ratio_or_undefined<S: Serializer>(r: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_str("Undefined"),
    }
}

struct Maximizer {
    a: Mat3,
    b: Mat3,
    c: Mat3,
    qa: SphereQuadratic,
    qc: SphereQuadratic,
}

impl Maximizer {
    fn new(a: Mat3, b: Mat3, c: Mat3) -> Self {
        Self {
            qa: SphereQuadratic::new(&a),
            qc: SphereQuadratic::new(&c),
            a,
            b,
            c,
        }
    }

    fn value(&self, u: &Vec3, v: &Vec3) -> f64 {
        u.dot(&(self.a * u)) + 2.0 * v.dot(&(self.b * u)) + v.dot(&(self.c * v))
    }

    fn best_v(&self, u: &Vec3) -> (Vec3, f64) {
        let (v, val) = self.qc.maximize(&(self.b * u));
        (v, val + u.dot(&(self.a * u)))
    }

    fn best_u(&self, v: &Vec3) -> (Vec3, f64) {
        let (u, val) = self.qa.maximize(&(self.b.transpose() * v));
        (u, val + v.dot(&(self.c * v)))
    }

    fn ascend(&self, start: (f64, Vec3, Vec3), refine_iters: usize) -> (f64, Vec3, Vec3) {
        let (mut val, mut u, mut v) = start;
        for _ in 0..refine_iters {
            let (nv, _) = self.best_v(&u);
            let (nu, nval) = self.best_u(&nv);
            let improved = nval > val + 1e-15 * val.abs().max(1.0);
            if nval >= val {
                u = nu;
                v = nv;
                val = self.value(&u, &v);
            }
            if !improved {
                break;
            }
        }
        (val, u, v)
    }

    fn lattice_point(&self, p: &Vec3, first: bool) -> (f64, Vec3, Vec3) {
        if first {
            let (v, val) = self.best_v(p);
            (val, *p, v)
        } else {
            let (u, val) = self.best_u(p);
            (val, u, *p)
        }
    }

    fn refine_top(&self, mut cands: Vec<(f64, Vec3, Vec3)>, k: usize, refine_iters: usize) -> Option<(f64, Vec3, Vec3)> {
        cands.sort_by(|x, y| y.0.total_cmp(&x.0));
        // (u, v) and (−u, −v) span the same plane.
        let mut starts: Vec<(f64, Vec3, Vec3)> = Vec::with_capacity(k);
        for c in cands {
            if starts.len() == k {
                break;
            }
            let dup = starts.iter().any(|s| {
                let (du, dv) = (s.1.dot(&c.1), s.2.dot(&c.2));
                du * dv > 0.0 && du.abs() > 0.95 && dv.abs() > 0.95
            });
            if !dup {
                starts.push(c);
            }
        }
        starts
            .into_iter()
            .map(|c| self.ascend(c, refine_iters))
            .reduce(|x, y| if y.0 > x.0 { y } else { x })
    }

    /// Lattice on each factor with the exact inner optimum over the other,
    /// then alternating exact ascent from the best candidates. A sublattice
    /// pass gives a lower bound `L`; the full lattice is then solved only
    /// where the dual bound on the inner problem exceeds `L`.
    fn run(&self, pts: &[Vec3], refine_iters: usize) -> (f64, Vec3, Vec3) {
        let stride = (pts.len() / 64).max(1);
        let coarse: Vec<(f64, Vec3, Vec3)> = pts
            .iter()
            .step_by(stride)
            .flat_map(|p| [self.lattice_point(p, true), self.lattice_point(p, false)])
            .collect();
        let mut best = self.refine_top(coarse, COARSE_STARTS, refine_iters).expect("non-empty lattice");
        let bt = self.b.transpose();
        let mut above = Vec::new();
        for p in pts {
            let (au, bu) = (p.dot(&(self.a * p)), self.b * p);
            if au + self.qc.upper_bound(&bu) > best.0 {
                let c = self.lattice_point(p, true);
                if c.0 > best.0 {
                    above.push(c);
                }
            }
            let (cv, btv) = (p.dot(&(self.c * p)), bt * p);
            if cv + self.qa.upper_bound(&btv) > best.0 {
                let c = self.lattice_point(p, false);
                if c.0 > best.0 {
                    above.push(c);
                }
            }
        }
        if let Some(c) = self.refine_top(above, CANDIDATES, refine_iters) {
            if c.0 > best.0 {
                best = c;
            }
        }
        best
    }
}

/// Global extrema of the sectional curvature with witnesses.
pub fn sectional_extrema(r: &CurvatureOperator, grid_n: usize, refine_iters: usize) -> PinchingReport {
    let pts = fibonacci_sphere(grid_n.max(2) * grid_n.max(2));
    extrema_on(r, &pts, refine_iters)
}

fn extrema_on(r: &CurvatureOperator, pts: &[Vec3], refine_iters: usize) -> PinchingReport {
    let (a, b, c) = (*r.a(), *r.b(), *r.c());
    let (max_sec, umax, vmax) = Maximizer::new(a, b, c).run(pts, refine_iters);
    let (neg_min, umin, vmin) = Maximizer::new(-a, -b, -c).run(pts, refine_iters);
    let min_sec = -neg_min;
    let sign_uniform = min_sec > 0.0 || max_sec < 0.0;
    let ratio = if sign_uniform {
        let (lo, hi) = (min_sec.abs().min(max_sec.abs()), min_sec.abs().max(max_sec.abs()));
        Some(lo / hi)
    } else {
        None
    };
    PinchingReport {
        min_sec,
        max_sec,
        ratio,
        sign_uniform,
        witnesses: Witnesses {
            min: Witness::new(&umin, &vmin),
            max: Witness::new(&umax, &vmax),
        },
        offsets: if sign_uniform { offsets(r) } else { None },
    }
}

/// Offsets of `(12/s) A` and `(12/s) C`; `None` when `s = 0`.
pub fn offsets(r: &CurvatureOperator) -> Option<Offsets> {
    let s = r.scalar_curvature();
    if s == 0.0 {
        return None;
    }
    let k = 12.0 / s;
    let ea = sym_eigenvalues(&(r.a() * k));
    let ec = sym_eigenvalues(&(r.c() * k));
    Some(Offsets {
        a1: ea[2] - 1.0,
        a2: 1.0 - ea[0],
        c1: ec[2] - 1.0,
        c2: 1.0 - ec[0],
        scale: k,
    })
}

pub fn pinching_ratio(r: &CurvatureOperator) -> Option<f64> {
    sectional_extrema(r, crate::definite::DEFAULT_GRID, crate::definite::DEFAULT_REFINE).ratio
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub strengthened: bool,
    pub grid_n: usize,
    pub refine_iters: usize,
    pub max_draws: usize,
}

impl VerifyConfig {
    pub fn new(n_samples: usize, seed: u64, strengthened: bool) -> Self {
        Self {
            n_samples,
            seed,
            strengthened,
            grid_n: crate::definite::DEFAULT_GRID,
            refine_iters: crate::definite::DEFAULT_REFINE,
            max_draws: n_samples.saturating_mul(200).max(1000),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub index: u64,
    pub reason: String,
    pub ratio: f64,
    pub operator: CurvatureOperator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyMargins {
    /// Smallest eigenvalue of `D` over kept samples, relative to `|s|²/144`.
    pub d_same: f64,
    pub d_reversed: f64,
    /// Smallest `|(Au,u)| - |Bu|` over the grid and samples, relative to `|s|/12`.
    pub tame_plus: f64,
    pub tame_minus: f64,
    pub min_ratio_kept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub draws: usize,
    pub kept: usize,
    pub kept_positive: usize,
    pub kept_negative: usize,
    pub passed: usize,
    pub failed: usize,
    pub violations: Vec<Violation>,
    pub margins: VerifyMargins,
}

impl VerifyReport {
    pub fn into_result(self) -> Result<Self> {
        match self.violations.first() {
            None => Ok(self),
            Some(v) => Err(Error::TheoremViolation {
                reason: format!("sample {}: {}", v.index, v.reason),
                operator: serde_json::to_string(&v.operator).unwrap_or_default(),
            }),
        }
    }
}

struct SampleOutcome {
    index: u64,
    op: CurvatureOperator,
    ratio: f64,
    positive: bool,
    d_same: f64,
    d_reversed: f64,
    tame_plus: f64,
    tame_minus: f64,
    reasons: Vec<String>,
}

fn grid_tame_margin(a: &Mat3, b: &Mat3, pts: &[Vec3]) -> f64 {
    pts.iter()
        .map(|v| v.dot(&(a * v)).abs() - (b * v).norm())
        .fold(f64::INFINITY, f64::min)
}

fn examine(
    index: u64,
    seed: u64,
    coarse: &[Vec3],
    fine: &[Vec3],
    cfg: &VerifyConfig,
) -> Option<SampleOutcome> {
    let mut rng = stream_rng(seed, index);
    let op = pinching_sample(&mut rng);
    // Inner approximations can only raise the ratio, so rejecting on the
    // coarse estimate is safe.
    let quick = extrema_on(&op, coarse, 4);
    match quick.ratio {
        Some(q) if q > PINCHING_CONSTANT => {}
        _ => return None,
    }
    let full = extrema_on(&op, fine, cfg.refine_iters);
    let ratio = match full.ratio {
        Some(q) if q > PINCHING_CONSTANT => q,
        _ => return None,
    };
    let positive = full.min_sec > 0.0;
    let unit = (op.scalar_curvature() / 12.0).abs().max(1e-300);
    let rev = op.reverse_orientation();
    let same = classify(&op, 0.0);
    let reversed = classify(&rev, 0.0);
    let expected = if positive { Sign::Positive } else { Sign::Negative };
    let mut reasons = Vec::new();
    if !(same.d_eigenvalues[0] > 0.0) {
        reasons.push(format!("D not positive definite: {:?}", same.d_eigenvalues));
    }
    if !(reversed.d_eigenvalues[0] > 0.0) {
        reasons.push(format!(
            "reversed D not positive definite: {:?}",
            reversed.d_eigenvalues
        ));
    }
    if same.is_definite() && same.sign != expected {
        reasons.push(format!("sign {:?} differs from curvature sign", same.sign));
    }
    if reversed.is_definite() && reversed.sign != expected {
        reasons.push(format!("reversed sign {:?} differs from curvature sign", reversed.sign));
    }
    let (mut tame_plus, mut tame_minus) = (f64::INFINITY, f64::INFINITY);
    if cfg.strengthened {
        tame_plus = grid_tame_margin(op.a(), op.b(), fine);
        tame_minus = grid_tame_margin(op.c(), &op.b().transpose(), fine);
        if !(tame_plus > 0.0) {
            reasons.push(format!("|(Au,u)| > |Bu| fails on grid: {tame_plus}"));
        }
        if !(tame_minus > 0.0) {
            reasons.push(format!("|(Cv,v)| > |B*v| fails on grid: {tame_minus}"));
        }
    }
    Some(SampleOutcome {
        index,
        op,
        ratio,
        positive,
        d_same: same.d_eigenvalues[0] / (unit * unit),
        d_reversed: reversed.d_eigenvalues[0] / (unit * unit),
        tame_plus: tame_plus / unit,
        tame_minus: tame_minus / unit,
        reasons,
    })
}

/// Randomized check that sign-uniform operators with ratio above 2/5 have
/// `D > 0` in both orientations (and, optionally, the taming inequalities).
pub fn verify_pinching_theorem(cfg: &VerifyConfig) -> VerifyReport {
    let coarse = fibonacci_sphere(64);
    let fine = fibonacci_sphere(cfg.grid_n.max(2) * cfg.grid_n.max(2));
    let max_chunk = 2048usize;
    let mut kept: Vec<SampleOutcome> = Vec::with_capacity(cfg.n_samples);
    let mut draws = 0usize;
    while kept.len() < cfg.n_samples && draws < cfg.max_draws {
        let start = draws;
        let remaining = (cfg.n_samples - kept.len()) as f64;
        let chunk = if kept.is_empty() {
            256
        } else {
            let rate = kept.len() as f64 / draws as f64;
            ((1.2 * remaining / rate) as usize + 16).clamp(16, max_chunk)
        };
        let end = (start + chunk).min(cfg.max_draws);
        let batch: Vec<Option<SampleOutcome>> = (start..end)
            .into_par_iter()
            .map(|i| examine(i as u64, cfg.seed, &coarse, &fine, cfg))
            .collect();
        for (i, out) in batch.into_iter().enumerate() {
            draws = start + i + 1;
            if let Some(o) = out {
                kept.push(o);
                if kept.len() == cfg.n_samples {
                    break;
                }
            }
        }
    }
    let mut margins = VerifyMargins {
        d_same: f64::INFINITY,
        d_reversed: f64::INFINITY,
        tame_plus: f64::INFINITY,
        tame_minus: f64::INFINITY,
        min_ratio_kept: f64::INFINITY,
    };
    let mut violations = Vec::new();
    let (mut kept_positive, mut kept_negative) = (0, 0);
    for o in &kept {
        if o.positive {
            kept_positive += 1;
        } else {
            kept_negative += 1;
        }
        margins.d_same = margins.d_same.min(o.d_same);
        margins.d_reversed = margins.d_reversed.min(o.d_reversed);
        margins.tame_plus = margins.tame_plus.min(o.tame_plus);
        margins.tame_minus = margins.tame_minus.min(o.tame_minus);
        margins.min_ratio_kept = margins.min_ratio_kept.min(o.ratio);
        if !o.reasons.is_empty() {
            violations.push(Violation {
                index: o.index,
                reason: o.reasons.join("; "),
                ratio: o.ratio,
                operator: o.op,
            });
        }
    }
    VerifyReport {
        config: *cfg,
        draws,
        kept: kept.len(),
        kept_positive,
        kept_negative,
        passed: kept.len() - violations.len(),
        failed: violations.len(),
        violations,
        margins,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearBoundaryWitness {
    pub operator: CurvatureOperator,
    pub ratio: f64,
    pub d_min_same: f64,
    pub d_min_reversed: f64,
    pub iterations: usize,
}

/// Random local search around the Bianchi-compatible extremal tensor
/// `A = diag(3/2, 3/2, 0), B = 0, C = I` for an operator with ratio in
/// `(lo, 2/5)` that is not definite in both orientations.
pub fn near_boundary_search(seed: u64, lo: f64, max_iters: usize) -> Option<NearBoundaryWitness> {
    let a0 = Mat3::from_diagonal(&Vec3::new(1.5, 1.5, 0.0));
    let c0 = Mat3::identity();
    let mut rng = stream_rng(seed, 0);
    let pts = fibonacci_sphere(48 * 48);
    for it in 0..max_iters {
        let size = 0.02 * rng.random::<f64>();
        let b = gaussian_matrix(&mut rng, size);
        let wp = gaussian_traceless(&mut rng, 0.2 * size);
        let wm = gaussian_traceless(&mut rng, 0.2 * size);
        let op = match CurvatureOperator::new(a0 + wp, b, c0 + wm, false) {
            Ok(op) => op,
            Err(_) => continue,
        };
        let ratio = match extrema_on(&op, &pts, 30).ratio {
            Some(q) if q > lo && q < PINCHING_CONSTANT => q,
            _ => continue,
        };
        let d1 = sym_eigenvalues(&d_operator(&op))[0];
        let d2 = sym_eigenvalues(&d_operator(&op.reverse_orientation()))[0];
        if d1 < 0.0 || d2 < 0.0 {
            return Some(NearBoundaryWitness {
                operator: op,
                ratio,
                d_min_same: d1,
                d_min_reversed: d2,
                iterations: it + 1,
            });
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpotCheckReport {
    pub samples: usize,
    pub max_bound_failures: usize,
    pub min_bound_failures: usize,
    pub cross_bound_failures: usize,
    pub ratio_failures: usize,
}

/// Samples operators on the boundary of the both-orientation cone with
/// `A, C ⪰ 0` and `s = 12`, and checks the extremal bounds used to locate the
/// optimal pinching constant.
pub fn proof_inequality_spot_checks(n: usize, seed: u64, grid_n: usize) -> SpotCheckReport {
    let pts = fibonacci_sphere(grid_n * grid_n);
    let mut report = SpotCheckReport {
        samples: 0,
        max_bound_failures: 0,
        min_bound_failures: 0,
        cross_bound_failures: 0,
        ratio_failures: 0,
    };
    let results: Vec<[bool; 4]> = (0..n as u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = stream_rng(seed, i);
            let psd = |rng: &mut rand_chacha::ChaCha8Rng| {
                let g = gaussian_matrix(rng, 1.0);
                let m = g * g.transpose() + Mat3::identity() * 0.05;
                m * (3.0 / m.trace())
            };
            let a = psd(&mut rng);
            let c = psd(&mut rng);
            let g = gaussian_matrix(&mut rng, 1.0);
            let t_same = boundary_scale(&a, &(g.transpose() * g))?;
            let t_rev = boundary_scale(&c, &(g * g.transpose()))?;
            let t = t_same.min(t_rev);
            let op = CurvatureOperator::new(a, g * t, c, false).ok()?;
            let rep = extrema_on(&op, &pts, 50);
            let off = offsets(&op)?;
            let tol = 1e-9;
            let max_ok = rep.max_sec >= 2.0 + off.a1 + off.c1 - tol;
            let min_ok = rep.min_sec <= 2.0 - off.a2 - off.c2 + tol;
            let cross_ok =
                rep.min_sec <= off.c1 + off.a2 + tol || rep.min_sec <= off.a1 + off.c2 + tol;
            let ratio_ok = match rep.ratio {
                Some(q) => q <= PINCHING_CONSTANT + 1e-9,
                None => true,
            };
            Some([max_ok, min_ok, cross_ok, ratio_ok])
        })
        .collect();
    for r in results {
        report.samples += 1;
        report.max_bound_failures += usize::from(!r[0]);
        report.min_bound_failures += usize::from(!r[1]);
        report.cross_bound_failures += usize::from(!r[2]);
        report.ratio_failures += usize::from(!r[3]);
    }
    report
}

/// Smallest `t > 0` with `A² − t² G` singular, for `A ≻ 0`, `G ⪰ 0`.
fn boundary_scale(a: &Mat3, g: &Mat3) -> Option<f64> {
    let ainv = a.try_inverse()?;
    let m = ainv * g * ainv;
    let top = sym_eigenvalues(&m)[2];
    (top > 0.0).then(|| 1.0 / top.sqrt())
}
