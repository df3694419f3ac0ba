//! Concrete group actions on ambient coordinates.
//!
//! Spheres live in ℝ⁴ (or ℝ³ × ℝ for `S² × ℝ`); hyperbolic factors use the
//! Poincaré ball/disk; everything else uses a single global chart.

use std::f64::consts::{PI, TAU};

use nalgebra::{Complex, DMatrix, DVector, Matrix3, Quaternion, Rotation3, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    /// `p ↦ R p + a`, parameters `(a, rotation vector)`.
    Euclidean,
    /// Unit quaternions, `p ↦ q_L p q̄_R`, parameters two rotation vectors.
    SphereSo4,
    /// Poincaré ball, Lorentz boost ∘ rotation, parameters `(rapidity, rotation vector)`.
    Hyperbolic,
    /// `(s, t) ↦ (R s, t + τ)` on `S² × ℝ`, parameters `(rotation vector, τ)`.
    SphereLine,
    /// Poincaré disk × ℝ, parameters `(rapidity₂, angle, τ)`.
    HyperbolicLine,
    /// `(x, t) ↦ (e^{−κs/2} R_θ x + a, t + s)`, parameters `(a₁, a₂, θ, s)`.
    Warped { kappa: f64 },
    /// `ℂ² ≅ ℍ` via `z₁ + z₂ j`; `p ↦ e^{iφ} p q̄(v)`, parameters `(φ, v)`.
    SphereU2,
    /// Heisenberg group with rotations, parameters `(a, b, c, θ)`.
    Nil,
    /// Unit tangent bundle of the upper half plane with angle unwrapped;
    /// parameters `(x, log y, φ, s)`.
    SlTilde,
}

/// Sign in the fibre term `(dψ + σ dx / y)²` of the `SL̃` metric.
pub const SL_SIGMA: f64 = 1.0;

const SPHERE_TOL: f64 = 1e-9;

pub(crate) fn quat(p: &DVector<f64>) -> Quaternion<f64> {
    Quaternion::new(p[0], p[1], p[2], p[3])
}

pub(crate) fn unquat(q: &Quaternion<f64>) -> DVector<f64> {
    DVector::from_vec(vec![q.w, q.i, q.j, q.k])
}

/// `cos(|v|/2) + sin(|v|/2) v̂`.
pub fn qexp(v: &Vector3<f64>) -> Quaternion<f64> {
    let a = v.norm();
    if a == 0.0 {
        return Quaternion::identity();
    }
    let s = (a / 2.0).sin() / a;
    Quaternion::new((a / 2.0).cos(), v.x * s, v.y * s, v.z * s)
}

/// Inverse of [`qexp`] on unit quaternions, angles in `[0, 2π]` so that `q`
/// and `−q` stay distinct.
pub fn qlog(q: &Quaternion<f64>) -> Vector3<f64> {
    let im = Vector3::new(q.i, q.j, q.k);
    let s = im.norm();
    if s == 0.0 {
        return if q.w >= 0.0 { Vector3::zeros() } else { Vector3::new(TAU, 0.0, 0.0) };
    }
    im * (2.0 * s.atan2(q.w) / s)
}

fn rot2(theta: f64) -> nalgebra::Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    nalgebra::Matrix2::new(c, -s, s, c)
}

/// Lorentz boost of rapidity vector `b` on `(X₀, X_spatial)`.
fn boost(b: &[f64]) -> DMatrix<f64> {
    let n = b.len();
    let mut m = DMatrix::identity(n + 1, n + 1);
    let phi = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if phi == 0.0 {
        return m;
    }
    let (ch, sh) = (phi.cosh(), phi.sinh());
    m[(0, 0)] = ch;
    for i in 0..n {
        let ni = b[i] / phi;
        m[(0, i + 1)] = sh * ni;
        m[(i + 1, 0)] = sh * ni;
        for j in 0..n {
            m[(i + 1, j + 1)] += (ch - 1.0) * ni * b[j] / phi;
        }
    }
    m
}

fn to_hyperboloid(x: &[f64]) -> DVector<f64> {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let d = 1.0 - r2;
    let mut out = DVector::zeros(x.len() + 1);
    out[0] = (1.0 + r2) / d;
    for (i, v) in x.iter().enumerate() {
        out[i + 1] = 2.0 * v / d;
    }
    out
}

fn from_hyperboloid(y: &DVector<f64>) -> Vec<f64> {
    (1..y.len()).map(|i| y[i] / (1.0 + y[0])).collect()
}

fn nil_mul(a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new(a.x + b.x, a.y + b.y, a.z + b.z + a.x * b.y)
}

/// Rotation automorphism of the Heisenberg law `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`
/// whose derivative at `θ = 0` is the rotation derivation fixing the centre.
pub fn nil_rotation(theta: f64, p: &Vector3<f64>) -> Vector3<f64> {
    let (s, c) = theta.sin_cos();
    Vector3::new(
        c * p.x - s * p.y,
        s * p.x + c * p.y,
        p.z + 0.5 * s * (c * p.x * p.x - c * p.y * p.y - 2.0 * s * p.x * p.y),
    )
}

fn unit_sample(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let r = v.norm();
        if r > 0.05 && r <= 1.0 {
            return v / r;
        }
    }
}

fn ball_sample(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..radius)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= radius * radius {
            return v;
        }
    }
}

fn v3(p: &DVector<f64>, at: usize) -> Vector3<f64> {
    Vector3::new(p[at], p[at + 1], p[at + 2])
}

impl Model {
    pub fn ambient_dim(&self) -> usize {
        match self {
            Model::SphereSo4 | Model::SphereU2 | Model::SphereLine => 4,
            _ => 3,
        }
    }

    pub fn param_dim(&self) -> usize {
        match self {
            Model::Euclidean | Model::SphereSo4 | Model::Hyperbolic => 6,
            _ => 4,
        }
    }

    pub fn check_point(&self, p: &DVector<f64>) -> Result<()> {
        if p.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), got: p.len() });
        }
        if !p.iter().all(|x| x.is_finite()) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        match self {
            Model::SphereSo4 | Model::SphereU2 => {
                if (p.norm() - 1.0).abs() > SPHERE_TOL {
                    return Err(Error::Domain(format!("|p| = {} is not 1", p.norm())));
                }
            }
            Model::SphereLine => {
                let s = v3(p, 0).norm();
                if (s - 1.0).abs() > SPHERE_TOL {
                    return Err(Error::Domain(format!("|s| = {s} is not 1")));
                }
            }
            Model::Hyperbolic => {
                if p.norm() >= 1.0 {
                    return Err(Error::Domain(format!("|x| = {} outside the unit ball", p.norm())));
                }
            }
            Model::HyperbolicLine => {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                if r >= 1.0 {
                    return Err(Error::Domain(format!("|x| = {r} outside the unit disk")));
                }
            }
            Model::SlTilde if p[1] <= 0.0 => {
                return Err(Error::Domain(format!("y = {} is not positive", p[1])));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn base_point(&self) -> DVector<f64> {
        match self {
            Model::SphereSo4 | Model::SphereU2 | Model::SphereLine => {
                DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])
            }
            Model::SlTilde => DVector::from_vec(vec![0.0, 1.0, 0.0]),
            _ => DVector::zeros(3),
        }
    }

    pub fn act(&self, g: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
        if g.len() != self.param_dim() {
            return Err(Error::DimensionMismatch { expected: self.param_dim(), got: g.len() });
        }
        self.check_point(p)?;
        let out = match *self {
            Model::Euclidean => {
                let r = Rotation3::from_scaled_axis(v3(g, 3));
                let q = r * v3(p, 0) + v3(g, 0);
                DVector::from_column_slice(q.as_slice())
            }
            Model::SphereSo4 => {
                let q = qexp(&v3(g, 0)) * quat(p) * qexp(&v3(g, 3)).conjugate();
                unquat(&q)
            }
            Model::Hyperbolic => {
                let l = boost(&[g[0], g[1], g[2]]);
                let mut rot = DMatrix::identity(4, 4);
                let r = Rotation3::from_scaled_axis(v3(g, 3));
                rot.view_mut((1, 1), (3, 3)).copy_from(r.matrix());
                let y = l * rot * to_hyperboloid(&[p[0], p[1], p[2]]);
                DVector::from_vec(from_hyperboloid(&y))
            }
            Model::SphereLine => {
                let s = Rotation3::from_scaled_axis(v3(g, 0)) * v3(p, 0);
                DVector::from_vec(vec![s.x, s.y, s.z, p[3] + g[3]])
            }
            Model::HyperbolicLine => {
                let l = boost(&[g[0], g[1]]);
                let mut rot = DMatrix::identity(3, 3);
                rot.view_mut((1, 1), (2, 2)).copy_from(&rot2(g[2]));
                let y = l * rot * to_hyperboloid(&[p[0], p[1]]);
                let x = from_hyperboloid(&y);
                DVector::from_vec(vec![x[0], x[1], p[2] + g[3]])
            }
            Model::Warped { kappa } => {
                let x = rot2(g[2]) * nalgebra::Vector2::new(p[0], p[1]) * (-kappa * g[3] / 2.0).exp();
                DVector::from_vec(vec![x.x + g[0], x.y + g[1], p[2] + g[3]])
            }
            Model::SphereU2 => {
                let (s, c) = g[0].sin_cos();
                let q = Quaternion::new(c, s, 0.0, 0.0) * quat(p) * qexp(&v3(g, 1)).conjugate();
                unquat(&q)
            }
            Model::Nil => {
                let n = Vector3::new(g[0], g[1], g[2]);
                let q = nil_mul(&n, &nil_rotation(g[3], &v3(p, 0)));
                DVector::from_column_slice(q.as_slice())
            }
            Model::SlTilde => {
                let (x, y, psi) = (p[0], p[1], p[2]);
                let (sy, hs) = ((g[1] / 2.0).exp(), g[2] / 2.0);
                let (sn, cs) = hs.sin_cos();
                // A = n(x_g) a(y_g) k(φ/2), k(θ) = [[cos θ, sin θ], [−sin θ, cos θ]]
                let na = nalgebra::Matrix2::new(sy, g[0] / sy, 0.0, 1.0 / sy);
                let a = na * nalgebra::Matrix2::new(cs, sn, -sn, cs);
                let z = Complex::new(x, y);
                let den = z * a[(1, 0)] + a[(1, 1)];
                let w = (z * a[(0, 0)] + a[(0, 1)]) / den;
                let ref_den = Complex::new(a[(1, 1)], a[(1, 0)]);
                let turn = g[2] - 2.0 * (den / ref_den).arg();
                DVector::from_vec(vec![w.re, w.im, psi + turn + g[3]])
            }
        };
        Ok(out)
    }

    /// Parameters of `g ∘ h` for models with an explicit group law.
    pub fn compose(&self, g: &DVector<f64>, h: &DVector<f64>) -> Option<DVector<f64>> {
        match *self {
            Model::Euclidean => {
                let rg = Rotation3::from_scaled_axis(v3(g, 3));
                let rh = Rotation3::from_scaled_axis(v3(h, 3));
                let a = v3(g, 0) + rg * v3(h, 0);
                let r = (rg * rh).scaled_axis();
                Some(DVector::from_vec(vec![a.x, a.y, a.z, r.x, r.y, r.z]))
            }
            Model::Warped { kappa } => {
                let ah = rot2(g[2]) * nalgebra::Vector2::new(h[0], h[1]) * (-kappa * g[3] / 2.0).exp();
                Some(DVector::from_vec(vec![g[0] + ah.x, g[1] + ah.y, g[2] + h[2], g[3] + h[3]]))
            }
            Model::SphereU2 => {
                let v = qlog(&(qexp(&v3(g, 1)) * qexp(&v3(h, 1))));
                Some(DVector::from_vec(vec![g[0] + h[0], v.x, v.y, v.z]))
            }
            Model::Nil => {
                let n = nil_mul(&v3(g, 0), &nil_rotation(g[3], &v3(h, 0)));
                Some(DVector::from_vec(vec![n.x, n.y, n.z, g[3] + h[3]]))
            }
            _ => None,
        }
    }

    /// One-parameter isotropy subgroup of the base point, for axially
    /// symmetric models.
    pub fn isotropy_params(&self, theta: f64) -> Option<DVector<f64>> {
        let v = match self {
            Model::SphereLine => vec![theta, 0.0, 0.0, 0.0],
            Model::HyperbolicLine => vec![0.0, 0.0, theta, 0.0],
            Model::Warped { .. } => vec![0.0, 0.0, theta, 0.0],
            Model::Nil => vec![0.0, 0.0, 0.0, theta],
            // conjugation by e^{iθ/2}: rotates the (j, k) plane by θ
            Model::SphereU2 => vec![theta / 2.0, theta, 0.0, 0.0],
            Model::SlTilde => vec![0.0, 0.0, theta, -theta],
            _ => return None,
        };
        Some(DVector::from_vec(v))
    }

    /// The invariant field `X` in ambient coordinates.
    pub fn x_ambient(&self, p: &DVector<f64>) -> Option<DVector<f64>> {
        match self {
            Model::SphereU2 => Some(unquat(&(Quaternion::new(0.0, 1.0, 0.0, 0.0) * quat(p)))),
            Model::SphereLine => Some(DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0])),
            Model::HyperbolicLine | Model::Warped { .. } | Model::Nil | Model::SlTilde => {
                Some(DVector::from_vec(vec![0.0, 0.0, 1.0]))
            }
            _ => None,
        }
    }

    /// Metric in the global chart for models that have one.
    pub fn global_metric(&self, u: &Vector3<f64>) -> Result<Matrix3<f64>> {
        let m = match *self {
            Model::Euclidean => Matrix3::identity(),
            Model::Hyperbolic => {
                let r2 = u.norm_squared();
                if r2 >= 1.0 {
                    return Err(Error::Domain("outside the unit ball".into()));
                }
                Matrix3::identity() * (4.0 / (1.0 - r2).powi(2))
            }
            Model::HyperbolicLine => {
                let r2 = u.x * u.x + u.y * u.y;
                if r2 >= 1.0 {
                    return Err(Error::Domain("outside the unit disk".into()));
                }
                let f = 4.0 / (1.0 - r2).powi(2);
                Matrix3::from_diagonal(&Vector3::new(f, f, 1.0))
            }
            Model::Warped { kappa } => {
                let e = (kappa * u.z).exp();
                Matrix3::from_diagonal(&Vector3::new(e, e, 1.0))
            }
            Model::Nil => Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0 + u.x * u.x, -u.x, 0.0, -u.x, 1.0),
            Model::SlTilde => {
                if u.y <= 0.0 {
                    return Err(Error::Domain("outside the upper half plane".into()));
                }
                let w = Vector3::new(SL_SIGMA / u.y, 0.0, 1.0);
                let b = 1.0 / (u.y * u.y);
                Matrix3::from_diagonal(&Vector3::new(b, b, 0.0)) + w * w.transpose()
            }
            _ => return Err(Error::Unsupported("model has no global chart".into())),
        };
        Ok(m)
    }

    pub fn sample_params(&self, rng: &mut ChaCha8Rng) -> DVector<f64> {
        let mut t = |a: f64, b: f64| rng.random_range(a..b);
        let v = match self {
            Model::Euclidean => {
                let mut v: Vec<f64> = (0..3).map(|_| t(-2.0, 2.0)).collect();
                v.extend((0..3).map(|_| t(-PI, PI)));
                v
            }
            Model::SphereSo4 => (0..6).map(|_| t(-PI, PI)).collect(),
            Model::Hyperbolic => {
                let mut v: Vec<f64> = (0..3).map(|_| t(-1.0, 1.0)).collect();
                v.extend((0..3).map(|_| t(-PI, PI)));
                v
            }
            Model::SphereLine => vec![t(-PI, PI), t(-PI, PI), t(-PI, PI), t(-2.0, 2.0)],
            Model::HyperbolicLine => vec![t(-1.0, 1.0), t(-1.0, 1.0), t(0.0, TAU), t(-2.0, 2.0)],
            Model::Warped { .. } => vec![t(-2.0, 2.0), t(-2.0, 2.0), t(0.0, TAU), t(-1.0, 1.0)],
            Model::SphereU2 => vec![t(0.0, TAU), t(-PI, PI), t(-PI, PI), t(-PI, PI)],
            Model::Nil => vec![t(-2.0, 2.0), t(-2.0, 2.0), t(-2.0, 2.0), t(0.0, TAU)],
            Model::SlTilde => vec![t(-2.0, 2.0), t(-1.0, 1.0), t(0.0, TAU), t(-2.0, 2.0)],
        };
        DVector::from_vec(v)
    }

    pub fn sample_point(&self, rng: &mut ChaCha8Rng) -> DVector<f64> {
        match self {
            Model::SphereSo4 | Model::SphereU2 => unit_sample(rng, 4),
            Model::SphereLine => {
                let s = unit_sample(rng, 3);
                DVector::from_vec(vec![s[0], s[1], s[2], rng.random_range(-1.0..1.0)])
            }
            Model::Hyperbolic => DVector::from_vec(ball_sample(rng, 3, 0.6)),
            Model::HyperbolicLine => {
                let x = ball_sample(rng, 2, 0.6);
                DVector::from_vec(vec![x[0], x[1], rng.random_range(-1.0..1.0)])
            }
            Model::Warped { .. } => DVector::from_vec(vec![
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-1.0..1.0),
            ]),
            Model::SlTilde => DVector::from_vec(vec![
                rng.random_range(-2.0..2.0),
                rng.random_range(0.5..2.0),
                rng.random_range(-PI..PI),
            ]),
            Model::Euclidean | Model::Nil => DVector::from_fn(3, |_, _| rng.random_range(-2.0..2.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn quaternion_log_inverts_exp_including_sign() {
        for v in [Vector3::new(0.3, -0.2, 0.9), Vector3::new(4.0, 1.0, -2.0)] {
            let q = qexp(&v);
            let back = qexp(&qlog(&q));
            assert!((back - q).norm() < 1e-12);
        }
    }

    #[test]
    fn nil_rotation_is_an_automorphism() {
        let a = Vector3::new(0.3, -1.2, 0.7);
        let b = Vector3::new(-0.5, 0.4, 2.0);
        for &t in &[0.3, 1.7, -2.5] {
            let lhs = nil_rotation(t, &nil_mul(&a, &b));
            let rhs = nil_mul(&nil_rotation(t, &a), &nil_rotation(t, &b));
            assert!((lhs - rhs).norm() < 1e-12);
            let two = nil_rotation(t, &nil_rotation(0.4, &a));
            assert!((two - nil_rotation(t + 0.4, &a)).norm() < 1e-12);
        }
    }

    #[test]
    fn nil_rotation_generator_is_the_rotation_derivation() {
        // d/dθ at 0 of ρ_θ(x, y, z) is (−y, x, (x² − y²)/2); on the Lie algebra
        // (points near the identity, quadratic terms negligible) it rotates (x, y)
        let p = Vector3::new(1e-4, 2e-4, 0.0);
        let h = 1e-6;
        let d = (nil_rotation(h, &p) - nil_rotation(-h, &p)) / (2.0 * h);
        assert!((d - Vector3::new(-p.y, p.x, 0.5 * (p.x * p.x - p.y * p.y))).norm() < 1e-12);
    }

    #[test]
    fn sphere_actions_preserve_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [Model::SphereU2, Model::SphereSo4] {
            for _ in 0..200 {
                let g = m.sample_params(&mut rng);
                let p = m.sample_point(&mut rng);
                assert!((m.act(&g, &p).unwrap().norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_parameters_fix_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in [
            Model::Euclidean,
            Model::SphereSo4,
            Model::Hyperbolic,
            Model::SphereLine,
            Model::HyperbolicLine,
            Model::Warped { kappa: 1.0 },
            Model::SphereU2,
            Model::Nil,
            Model::SlTilde,
        ] {
            let p = m.sample_point(&mut rng);
            let q = m.act(&DVector::zeros(m.param_dim()), &p).unwrap();
            assert!((q - &p).amax() < 1e-14, "{m:?}");
        }
    }

    #[test]
    fn isotropy_fixes_base_point() {
        for m in [
            Model::SphereLine,
            Model::HyperbolicLine,
            Model::Warped { kappa: 1.0 },
            Model::SphereU2,
            Model::Nil,
            Model::SlTilde,
        ] {
            let b = m.base_point();
            let k = m.isotropy_params(1.1).unwrap();
            assert!((m.act(&k, &b).unwrap() - &b).amax() < 1e-14, "{m:?}");
        }
    }

    #[test]
    fn domain_errors() {
        let p = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert!(matches!(Model::Hyperbolic.act(&DVector::zeros(6), &p), Err(Error::Domain(_))));
        let q = DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(Model::SphereU2.act(&DVector::zeros(4), &q), Err(Error::Domain(_))));
        assert!(Model::Nil.act(&DVector::zeros(3), &p).is_err());
    }

    #[test]
    fn warped_action_matches_closed_form() {
        let m = Model::Warped { kappa: 1.0 };
        let g = DVector::from_vec(vec![0.5, -1.0, 0.7, 0.3]);
        let p = DVector::from_vec(vec![1.0, 2.0, -0.4]);
        let q = m.act(&g, &p).unwrap();
        let x = rot2(0.7) * nalgebra::Vector2::new(1.0, 2.0) * (-0.15f64).exp();
        assert!((q[0] - x.x - 0.5).abs() < 1e-15);
        assert!((q[1] - x.y + 1.0).abs() < 1e-15);
        assert!((q[2] + 0.1).abs() < 1e-15);
    }
}
