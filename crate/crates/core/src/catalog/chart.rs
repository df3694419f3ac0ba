//! Local coordinates for catalog models. Global models use their ambient
//! coordinates directly; spheres use gnomonic charts centred at a point.

use nalgebra::{DVector, Matrix2, Matrix3, Vector2, Vector3, Vector4};

use super::model::{quat, unquat, Model};
use crate::diffgeo::{ChartMetric, VectorField};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub enum ChartKind {
    Global,
    /// `u ↦ (c + Σ u_i f_i) / √(1 + |u|²)` on `S³`.
    Sphere3 { center: Vector4<f64>, frame: [Vector4<f64>; 3] },
    /// Same on the `S²` factor of `S² × ℝ`; the third coordinate is `t`.
    Sphere2Line { center: Vector3<f64>, frame: [Vector3<f64>; 2] },
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub kind: ChartKind,
    pub metric: ChartMetric,
    pub x_field: Option<VectorField>,
}

/// Round metric in gnomonic coordinates, `((1+|u|²) I − u uᵀ) / (1+|u|²)²`.
fn gnomonic3(u: &Vector3<f64>) -> Matrix3<f64> {
    let s = 1.0 + u.norm_squared();
    (Matrix3::identity() * s - u * u.transpose()) / (s * s)
}

fn gnomonic2(u: &Vector2<f64>) -> Matrix2<f64> {
    let s = 1.0 + u.norm_squared();
    (Matrix2::identity() * s - u * u.transpose()) / (s * s)
}

fn any_unit_orthogonal(v: &Vector3<f64>) -> Vector3<f64> {
    let i = v.iamin();
    let mut e = Vector3::zeros();
    e[i] = 1.0;
    (e - v * v.dot(&e)).normalize()
}

impl ChartKind {
    pub fn centered(model: &Model, center: &DVector<f64>) -> ChartKind {
        match model {
            Model::SphereSo4 | Model::SphereU2 => {
                let q = quat(center);
                let f = |e: nalgebra::Quaternion<f64>| {
                    let v = unquat(&(q * e));
                    Vector4::new(v[0], v[1], v[2], v[3])
                };
                ChartKind::Sphere3 {
                    center: Vector4::new(center[0], center[1], center[2], center[3]),
                    frame: [
                        f(nalgebra::Quaternion::new(0.0, 1.0, 0.0, 0.0)),
                        f(nalgebra::Quaternion::new(0.0, 0.0, 1.0, 0.0)),
                        f(nalgebra::Quaternion::new(0.0, 0.0, 0.0, 1.0)),
                    ],
                }
            }
            Model::SphereLine => {
                let c = Vector3::new(center[0], center[1], center[2]);
                let u = any_unit_orthogonal(&c);
                ChartKind::Sphere2Line { center: c, frame: [u, c.cross(&u)] }
            }
            _ => ChartKind::Global,
        }
    }

    pub fn coords(&self, p: &DVector<f64>) -> Result<Vector3<f64>> {
        match self {
            ChartKind::Global => Ok(Vector3::new(p[0], p[1], p[2])),
            ChartKind::Sphere3 { center, frame } => {
                let p = Vector4::new(p[0], p[1], p[2], p[3]);
                let d = p.dot(center);
                if d <= 0.0 {
                    return Err(Error::Domain("point outside the gnomonic hemisphere".into()));
                }
                Ok(Vector3::from_fn(|i, _| p.dot(&frame[i]) / d))
            }
            ChartKind::Sphere2Line { center, frame } => {
                let s = Vector3::new(p[0], p[1], p[2]);
                let d = s.dot(center);
                if d <= 0.0 {
                    return Err(Error::Domain("point outside the gnomonic hemisphere".into()));
                }
                Ok(Vector3::new(s.dot(&frame[0]) / d, s.dot(&frame[1]) / d, p[3]))
            }
        }
    }

    pub fn point(&self, u: &Vector3<f64>) -> DVector<f64> {
        match self {
            ChartKind::Global => DVector::from_column_slice(u.as_slice()),
            ChartKind::Sphere3 { center, frame } => {
                let v = (center + frame[0] * u.x + frame[1] * u.y + frame[2] * u.z)
                    / (1.0 + u.norm_squared()).sqrt();
                DVector::from_column_slice(v.as_slice())
            }
            ChartKind::Sphere2Line { center, frame } => {
                let s = (center + frame[0] * u.x + frame[1] * u.y) / (1.0 + u.x * u.x + u.y * u.y).sqrt();
                DVector::from_vec(vec![s.x, s.y, s.z, u.z])
            }
        }
    }

    /// Chart components of the ambient tangent vector `v` at `p`.
    pub fn push(&self, p: &DVector<f64>, v: &DVector<f64>) -> Vector3<f64> {
        match self {
            ChartKind::Global => Vector3::new(v[0], v[1], v[2]),
            ChartKind::Sphere3 { center, frame } => {
                let p = Vector4::new(p[0], p[1], p[2], p[3]);
                let v = Vector4::new(v[0], v[1], v[2], v[3]);
                let (pc, vc) = (p.dot(center), v.dot(center));
                Vector3::from_fn(|i, _| (v.dot(&frame[i]) * pc - p.dot(&frame[i]) * vc) / (pc * pc))
            }
            ChartKind::Sphere2Line { center, frame } => {
                let s = Vector3::new(p[0], p[1], p[2]);
                let w = Vector3::new(v[0], v[1], v[2]);
                let (pc, vc) = (s.dot(center), w.dot(center));
                let d = |f: &Vector3<f64>| (w.dot(f) * pc - s.dot(f) * vc) / (pc * pc);
                Vector3::new(d(&frame[0]), d(&frame[1]), v[3])
            }
        }
    }

    pub fn raw_metric(&self, model: &Model) -> ChartMetric {
        match self {
            ChartKind::Global => {
                let m = *model;
                ChartMetric::with_domain(move |u| m.global_metric(u))
            }
            ChartKind::Sphere3 { .. } => ChartMetric::new(gnomonic3),
            ChartKind::Sphere2Line { .. } => ChartMetric::new(|u| {
                let b = gnomonic2(&Vector2::new(u.x, u.y));
                Matrix3::new(b[(0, 0)], b[(0, 1)], 0.0, b[(1, 0)], b[(1, 1)], 0.0, 0.0, 0.0, 1.0)
            }),
        }
    }
}
