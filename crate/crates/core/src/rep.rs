//! Faithful SO(2)-representations on ℝ³: the fixed line, the rotated plane,
//! and the commutant.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};

use crate::error::{Error, Result};
use crate::linalg;

/// Angle sampler `θ ↦ R(θ)`.
pub type Sampler = Arc<dyn Fn(f64) -> Matrix3<f64> + Send + Sync>;

#[derive(Clone)]
pub struct CircleRepresentation {
    sampler: Sampler,
    pub faithful: bool,
}

impl fmt::Debug for CircleRepresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CircleRepresentation").field("faithful", &self.faithful).finish()
    }
}

impl CircleRepresentation {
    pub fn new(sampler: impl Fn(f64) -> Matrix3<f64> + Send + Sync + 'static, faithful: bool) -> Self {
        Self { sampler: Arc::new(sampler), faithful }
    }

    pub fn at(&self, theta: f64) -> Matrix3<f64> {
        (self.sampler)(theta)
    }

    /// Rotation about `e_z`.
    pub fn z_rotation() -> Self {
        Self::new(rot_z, true)
    }

    /// `θ ↦ Q R(θ) Qᵀ`.
    pub fn conjugated(&self, q: Matrix3<f64>) -> Self {
        let inner = self.sampler.clone();
        Self::new(move |t| q * inner(t) * q.transpose(), self.faithful)
    }
}

pub fn rot_z(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Angles `2π·h_k` for the base-2 van der Corput sequence `h_1, h_2, …`.
pub fn sample_angles(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|mut k| {
            let (mut h, mut f) = (0.0, 0.5);
            while k > 0 {
                h += f * (k & 1) as f64;
                k >>= 1;
                f *= 0.5;
            }
            TAU * h
        })
        .collect()
}

const SAMPLES: usize = 16;
const TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct IsotypicSplit {
    pub line: Vector3<f64>,
    pub plane: [Vector3<f64>; 2],
}

impl IsotypicSplit {
    /// Orthonormal matrix with columns `(plane[0], plane[1], line)`.
    pub fn frame(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.plane[0], self.plane[1], self.line])
    }
}

fn fixed_space(r: &Matrix3<f64>) -> Vec<Vector3<f64>> {
    let m = DMatrix::from_column_slice(3, 3, (r - Matrix3::identity()).as_slice());
    linalg::null_space(&m, 1e-6)
        .into_iter()
        .map(|v| Vector3::new(v[0], v[1], v[2]))
        .collect()
}

fn any_unit_orthogonal(v: &Vector3<f64>) -> Vector3<f64> {
    let i = v.iamin();
    let mut e = Vector3::zeros();
    e[i] = 1.0;
    (e - v * v.dot(&e)).normalize()
}

pub fn decompose(rep: &CircleRepresentation) -> Result<IsotypicSplit> {
    let angles = sample_angles(SAMPLES);
    let mats: Vec<Matrix3<f64>> = angles.iter().map(|&t| rep.at(t)).collect();
    let dist: Vec<f64> = mats.iter().map(|r| (r - Matrix3::identity()).norm()).collect();
    if dist.iter().all(|&d| d < TOL) {
        return Err(Error::NotFaithful);
    }
    let mut order: Vec<usize> = (0..SAMPLES).collect();
    order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]));

    let mut line = None;
    for &k in &order {
        let fixed = fixed_space(&mats[k]);
        if fixed.len() == 1 {
            line = Some(fixed[0]);
            break;
        }
    }
    let mut line = line.ok_or_else(|| {
        Error::NotCircleRep("no sampled element has a one-dimensional fixed space".into())
    })?;
    if line[line.iamax()] < 0.0 {
        line = -line;
    }
    let u = any_unit_orthogonal(&line);
    let w = line.cross(&u);
    let split = IsotypicSplit { line, plane: [u, w] };

    for r in &mats {
        let drift = (r * line - line).norm();
        let leak = split.plane.iter().map(|p| (r * p).dot(&line).abs()).fold(0.0, f64::max);
        let orth = (r.transpose() * r - Matrix3::identity()).norm();
        if drift > TOL || leak > TOL || orth > TOL || (r.determinant() - 1.0).abs() > TOL {
            return Err(Error::NotCircleRep(format!(
                "split is not invariant (drift {drift:e}, leak {leak:e}, orthogonality {orth:e})"
            )));
        }
    }
    Ok(split)
}

/// Basis `{P_L, I_W, J_W}` of the commutant: projection on the fixed line,
/// identity on the plane, and the rotation generator of the plane.
pub fn commutant_basis(rep: &CircleRepresentation) -> Result<Vec<Matrix3<f64>>> {
    let split = decompose(rep)?;
    let angles = sample_angles(8);

    // f R = R f  ⇔  (Rᵀ ⊗ I − I ⊗ R) vec(f) = 0 with column-major vec
    let mut rows = DMatrix::zeros(9 * angles.len(), 9);
    for (a, &t) in angles.iter().enumerate() {
        let r = rep.at(t);
        for p in 0..3 {
            for q in 0..3 {
                let row = 9 * a + q * 3 + p; // entry (p, q) of f R − R f
                for k in 0..3 {
                    // (f R)_{pq} = Σ_k f_{pk} R_{kq}
                    rows[(row, k * 3 + p)] += r[(k, q)];
                    // (R f)_{pq} = Σ_k R_{pk} f_{kq}
                    rows[(row, q * 3 + k)] -= r[(p, k)];
                }
            }
        }
    }
    let kernel = linalg::null_space(&rows, 1e-8);
    if kernel.len() != 3 {
        return Err(Error::NotCircleRep(format!("commutant has dimension {}", kernel.len())));
    }

    let l = split.line;
    let [u, w] = split.plane;
    let basis = vec![l * l.transpose(), u * u.transpose() + w * w.transpose(), w * u.transpose() - u * w.transpose()];
    for b in &basis {
        let v = nalgebra::DVector::from_column_slice(b.as_slice());
        if linalg::reject(&v, &kernel).norm() > 1e-8 {
            return Err(Error::NotCircleRep("commutant is not spanned by the canonical basis".into()));
        }
    }
    Ok(basis)
}

/// Off-diagonal block mass of `f` with respect to the split.
pub fn off_block_norm(f: &Matrix3<f64>, split: &IsotypicSplit) -> f64 {
    let b = split.frame();
    let g = b.transpose() * f * b;
    (g[(0, 2)].powi(2) + g[(1, 2)].powi(2) + g[(2, 0)].powi(2) + g[(2, 1)].powi(2)).sqrt()
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_spectrum(f: &Matrix3<f64>) -> Vector3<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(*f).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    Vector3::new(e[0], e[1], e[2])
}
