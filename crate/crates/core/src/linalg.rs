//! Small dense helpers: sorted symmetric eigensystems, sphere lattices and
//! exact maximization of quadratics on the unit sphere.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

pub type Mat3 = Matrix3<f64>;
pub type Vec3 = Vector3<f64>;

/// Eigenpairs of a symmetric matrix, eigenvalues ascending, eigenvectors as
/// matching columns.
pub fn sym_eigen(m: &Mat3) -> (Vec3, Mat3) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = Vec3::new(
        eig.eigenvalues[idx[0]],
        eig.eigenvalues[idx[1]],
        eig.eigenvalues[idx[2]],
    );
    let vecs = Mat3::from_columns(&[
        eig.eigenvectors.column(idx[0]).into_owned(),
        eig.eigenvectors.column(idx[1]).into_owned(),
        eig.eigenvectors.column(idx[2]).into_owned(),
    ]);
    (vals, vecs)
}

pub fn sym_eigenvalues(m: &Mat3) -> Vec3 {
    sym_eigen(m).0
}

pub fn symmetrize(m: &Mat3) -> Mat3 {
    (m + m.transpose()) * 0.5
}

pub fn is_finite(m: &Mat3) -> bool {
    m.iter().all(|x| x.is_finite())
}

/// `n` nearly uniform points on the unit sphere (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vec3::new(rho * phi.cos(), rho * phi.sin(), z)
        })
        .collect()
}

/// Maximizer of `v'Qv + 2 b'v` over the unit sphere for a fixed symmetric `Q`.
///
/// The eigensystem of `Q` is computed once; each call solves the secular
/// equation of the trust-region subproblem.
#[derive(Debug, Clone)]
pub struct SphereQuadratic {
    vals: [f64; 3],
    vecs: Mat3,
    scale: f64,
}

impl SphereQuadratic {
    pub fn new(q: &Mat3) -> Self {
        let (vals, vecs) = sym_eigen(q);
        let scale = vals.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        Self {
            vals: [vals[2], vals[1], vals[0]],
            vecs: Mat3::from_columns(&[
                vecs.column(2).into_owned(),
                vecs.column(1).into_owned(),
                vecs.column(0).into_owned(),
            ]),
            scale,
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            vals: [-self.vals[2], -self.vals[1], -self.vals[0]],
            vecs: Mat3::from_columns(&[
                self.vecs.column(2).into_owned(),
                self.vecs.column(1).into_owned(),
                self.vecs.column(0).into_owned(),
            ]),
            scale: self.scale,
        }
    }

    pub fn top_eigenvector(&self) -> Vec3 {
        self.vecs.column(0).into_owned()
    }

    fn quad(&self, v: &Vec3, b: &Vec3) -> f64 {
        let w = self.vecs.transpose() * v;
        let q: f64 = (0..3).map(|i| self.vals[i] * w[i] * w[i]).sum();
        q + 2.0 * b.dot(v)
    }

    /// Returns the maximizer and the maximum value.
    pub fn maximize(&self, b: &Vec3) -> (Vec3, f64) {
        let c = self.vals;
        let beta = self.vecs.transpose() * b;
        let bnorm = beta.norm();
        let eps = 1e-13 * (self.scale + bnorm);
        if bnorm <= 1e-300 {
            let v = self.top_eigenvector();
            return (v, c[0]);
        }

        let top: Vec<usize> = (0..3).filter(|&i| c[0] - c[i] <= eps).collect();
        let beta_top: f64 = top.iter().map(|&i| beta[i] * beta[i]).sum::<f64>().sqrt();
        if beta_top <= eps {
            let mut w = Vec3::zeros();
            let mut rest = 0.0;
            for i in 0..3 {
                if !top.contains(&i) {
                    w[i] = beta[i] / (c[0] - c[i]);
                    rest += w[i] * w[i];
                }
            }
            if rest <= 1.0 {
                w[top[0]] += (1.0 - rest).sqrt();
                let v = self.vecs * w;
                let val = self.quad(&v, b);
                return (v, val);
            }
        }

        let phi = |mu: f64| -> (f64, f64) {
            let mut s = 0.0;
            let mut ds = 0.0;
            for i in 0..3 {
                let d = mu - c[i];
                s += beta[i] * beta[i] / (d * d);
                ds -= 2.0 * beta[i] * beta[i] / (d * d * d);
            }
            (s, ds)
        };
        let mut lo = c[0] + beta_top.max(1e-300);
        let mut hi = c[0] + bnorm;
        if hi <= lo {
            hi = lo;
        }
        let mut mu = hi;
        for _ in 0..200 {
            let (s, ds) = phi(mu);
            let psi = 1.0 / s.sqrt() - 1.0;
            if psi.abs() <= 1e-15 {
                break;
            }
            if psi < 0.0 {
                lo = mu;
            } else {
                hi = mu;
            }
            let dpsi = -0.5 * ds / (s * s.sqrt());
            let mut next = mu - psi / dpsi;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (hi - lo) <= 1e-16 * (self.scale + bnorm) || (next - mu).abs() <= 1e-15 * mu.abs().max(1.0) {
                mu = next;
                break;
            }
            mu = next;
        }
        let mut w = Vec3::zeros();
        for i in 0..3 {
            w[i] = beta[i] / (mu - c[i]);
        }
        let n = w.norm();
        if n > 0.0 && n.is_finite() {
            w /= n;
        } else {
            w = Vec3::new(1.0, 0.0, 0.0);
        }
        let v = self.vecs * w;
        let val = self.quad(&v, b);
        (v, val)
    }

    /// Upper bound on `max (Qv,v) + 2(b,v)` from the dual function
    /// `μ + bᵀ(μ − Q)⁻¹b`, valid for every `μ > λmax`.
    pub fn upper_bound(&self, b: &Vec3) -> f64 {
        let c = self.vals;
        let beta = self.vecs.transpose() * b;
        let nb = beta.norm();
        if nb <= 1e-300 {
            return c[0];
        }
        let dual = |mu: f64| mu + (0..3).map(|i| beta[i] * beta[i] / (mu - c[i])).sum::<f64>();
        let mu0 = c[0] + nb;
        let (mut d1, mut d2) = (1.0, 0.0);
        for i in 0..3 {
            let d = mu0 - c[i];
            d1 -= beta[i] * beta[i] / (d * d);
            d2 += 2.0 * beta[i] * beta[i] / (d * d * d);
        }
        let mu1 = mu0 - d1 / d2;
        let g0 = dual(mu0);
        if mu1 > c[0] && mu1.is_finite() {
            g0.min(dual(mu1))
        } else {
            g0
        }
    }

    pub fn minimize(&self, b: &Vec3) -> (Vec3, f64) {
        let (v, val) = self.negated().maximize(&(-b));
        (v, -val)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_max(q: &Mat3, b: &Vec3) -> f64 {
        fibonacci_sphere(200_000)
            .iter()
            .map(|v| (v.transpose() * q * v)[0] + 2.0 * b.dot(v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn eigen_sorted_ascending() {
        let m = Mat3::new(2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, -1.0);
        let (vals, vecs) = sym_eigen(&m);
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        assert!((vals[2] - 3.0).abs() < 1e-14);
        let recon = vecs * Mat3::from_diagonal(&vals) * vecs.transpose();
        assert!((recon - m).norm() < 1e-13);
    }

    #[test]
    fn lattice_points_are_unit() {
        let pts = fibonacci_sphere(1000);
        assert_eq!(pts.len(), 1000);
        assert!(pts.iter().all(|p| (p.norm() - 1.0).abs() < 1e-14));
        let mean: Vec3 = pts.iter().sum::<Vec3>() / 1000.0;
        assert!(mean.norm() < 1e-2);
    }

    #[test]
    fn trs_matches_brute_force() {
        let cases = [
            (Mat3::from_diagonal(&Vec3::new(1.0, 0.5, -2.0)), Vec3::new(0.3, -0.2, 0.7)),
            (Mat3::new(0.2, 0.4, -0.1, 0.4, -1.0, 0.3, -0.1, 0.3, 0.5), Vec3::new(1.5, 0.0, -0.4)),
            (Mat3::identity(), Vec3::new(0.0, 0.0, 1e-3)),
        ];
        for (q, b) in cases {
            let sq = SphereQuadratic::new(&q);
            let (v, val) = sq.maximize(&b);
            assert!((v.norm() - 1.0).abs() < 1e-12);
            let brute = brute_max(&q, &b);
            assert!(val >= brute - 1e-12, "{val} < {brute}");
            assert!(val - brute < 1e-3);
        }
    }

    #[test]
    fn trs_hard_case() {
        let q = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        let b = Vec3::new(0.0, 0.0, 0.5);
        let (v, val) = SphereQuadratic::new(&q).maximize(&b);
        // mu = 1, w3 = 0.25, value = mu + b.v
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!((val - 1.125).abs() < 1e-12, "{val}");
    }

    #[test]
    fn trs_minimize_is_negated_max() {
        let q = Mat3::new(0.2, 0.4, -0.1, 0.4, -1.0, 0.3, -0.1, 0.3, 0.5);
        let b = Vec3::new(0.1, 0.9, -0.4);
        let sq = SphereQuadratic::new(&q);
        let (_, lo) = sq.minimize(&b);
        let brute = fibonacci_sphere(200_000)
            .iter()
            .map(|v| (v.transpose() * q * v)[0] + 2.0 * b.dot(v))
            .fold(f64::INFINITY, f64::min);
        assert!(lo <= brute + 1e-12);
        assert!(brute - lo < 1e-3);
    }

    #[test]
    fn dual_bound_dominates_maximum() {
        let q = Mat3::new(0.2, 0.4, -0.1, 0.4, -1.0, 0.3, -0.1, 0.3, 0.5);
        let sq = SphereQuadratic::new(&q);
        let top = sym_eigenvalues(&q)[2];
        for b in fibonacci_sphere(200) {
            for scale in [0.0, 0.01, 0.3, 2.0] {
                let b = b * scale;
                let (_, val) = sq.maximize(&b);
                let ub = sq.upper_bound(&b);
                assert!(ub >= val - 1e-12);
                assert!(ub <= top + 2.0 * b.norm() + 1e-12);
            }
        }
    }
}
