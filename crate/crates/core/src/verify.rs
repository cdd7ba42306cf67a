//! Randomized suites for the linear-algebra lemmas and the trace identity.

use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::Serialize;

use crate::curvature::CurvatureOperator;
use crate::definite::{d_operator, eigen_sum_dominance, ricci_positive_check};
use crate::sampling::{gaussian_symmetric, gaussian_traceless, random_bianchi_operator, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteReport {
    pub samples: usize,
    pub draws: usize,
    pub counterexamples: usize,
    /// Smallest slack of the conclusion over the accepted samples.
    pub min_slack: f64,
}

/// Pairs of symmetric matrices with `A² − B² ≻ 0`; checks `Σ|ai| > Σ|bi|`.
pub fn eigen_sum_suite(n: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport {
        samples: 0,
        draws: 0,
        counterexamples: 0,
        min_slack: f64::INFINITY,
    };
    let mut rng = stream_rng(seed, 1);
    let shrink = Uniform::new(0.0, 1.2).unwrap();
    while rep.samples < n && rep.draws < 100 * n {
        rep.draws += 1;
        let a = gaussian_symmetric(&mut rng, 1.0);
        let b = gaussian_symmetric(&mut rng, 1.0) * shrink.sample(&mut rng);
        let e = eigen_sum_dominance(&a, &b);
        if !e.holds_hypothesis {
            continue;
        }
        rep.samples += 1;
        let slack = e.sum_abs_a - e.sum_abs_b;
        rep.min_slack = rep.min_slack.min(slack);
        if !(slack > 0.0) {
            rep.counterexamples += 1;
        }
    }
    rep
}

/// Ricci spectra and self-dual Weyl parts with `D ≻ 0` and `A ≻ 0`; checks
/// that every Ricci eigenvalue is positive.
pub fn ricci_positive_suite(n: usize, seed: u64) -> crate::Result<SuiteReport> {
    let mut rep = SuiteReport {
        samples: 0,
        draws: 0,
        counterexamples: 0,
        min_slack: f64::INFINITY,
    };
    let mut rng = stream_rng(seed, 2);
    let centre = Uniform::new(0.0, 2.0).unwrap();
    let spread = Uniform::new(0.0, 1.5).unwrap();
    while rep.samples < n && rep.draws < 200 * n {
        rep.draws += 1;
        let mu = centre.sample(&mut rng);
        let sd = spread.sample(&mut rng);
        let lambda: [f64; 4] = std::array::from_fn(|_| mu + sd * (2.0 * rng.random::<f64>() - 1.0));
        let w = gaussian_traceless(&mut rng, 0.3 * sd);
        let chk = ricci_positive_check(lambda, &w)?;
        if !chk.premises {
            continue;
        }
        rep.samples += 1;
        rep.min_slack = rep.min_slack.min(chk.min_lambda);
        if !(chk.min_lambda > 0.0) {
            rep.counterexamples += 1;
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceIdentityReport {
    pub samples: usize,
    pub max_abs_error: f64,
}

/// `tr D = |W+|² + s²/48 − |Ric0|²` on random Bianchi operators.
pub fn trace_identity_suite(n: usize, seed: u64) -> TraceIdentityReport {
    let mut rng = stream_rng(seed, 3);
    let mut max_abs_error: f64 = 0.0;
    for _ in 0..n {
        let r = random_bianchi_operator(&mut rng, 1.0);
        max_abs_error = max_abs_error.max(trace_identity_error(&r));
    }
    TraceIdentityReport {
        samples: n,
        max_abs_error,
    }
}

pub fn trace_identity_error(r: &CurvatureOperator) -> f64 {
    let p = r.decompose();
    let lhs = d_operator(r).trace();
    let rhs = p.w_plus.norm_squared() + p.s * p.s / 48.0 - p.ric0.norm_squared();
    (lhs - rhs).abs()
}
