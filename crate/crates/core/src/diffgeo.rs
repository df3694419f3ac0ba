//! Finite-difference Riemannian geometry on three-dimensional charts:
//! Levi-Civita connection, curvature, divergence, Killing residuals, geodesics,
//! and the curvature of the connection form dual to an invariant field.
//!
//! Index conventions: `Γ[k][(i, j)] = Γ^k_ij`, `R[l][k][i][j] = R^l_{kij}` with
//! `R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l`, and `dω(Y, Z) = Y ω(Z) − Z ω(Y) − ω([Y, Z])`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::lie::StructureConstants;

pub type Point = Vector3<f64>;
pub type Christoffel = [Matrix3<f64>; 3];
pub type Riemann = [[[[f64; 3]; 3]; 3]; 3];

/// Central-difference step for first derivatives.
pub const FIRST_STEP: f64 = 1e-5;
/// Step for derivatives of Christoffel symbols.
pub const SECOND_STEP: f64 = 1e-4;

type MetricFn = dyn Fn(&Point) -> Result<Matrix3<f64>> + Send + Sync;
type FieldFn = dyn Fn(&Point) -> Vector3<f64> + Send + Sync;

#[derive(Clone)]
pub struct ChartMetric {
    eval: Arc<MetricFn>,
}

impl fmt::Debug for ChartMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ChartMetric")
    }
}

impl ChartMetric {
    /// Metric defined on the whole chart.
    pub fn new(f: impl Fn(&Point) -> Matrix3<f64> + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(move |p| Ok(f(p))) }
    }

    /// Metric whose closure reports points outside its domain.
    pub fn with_domain(f: impl Fn(&Point) -> Result<Matrix3<f64>> + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f) }
    }

    pub fn euclidean() -> Self {
        Self::new(|_| Matrix3::identity())
    }

    /// `diag(e^{κt}, e^{κt}, 1)` in coordinates `(x, y, t)`.
    pub fn warped(kappa: f64) -> Self {
        Self::new(move |p| {
            let e = (kappa * p.z).exp();
            Matrix3::from_diagonal(&Vector3::new(e, e, 1.0))
        })
    }

    /// Symmetric positive-definite metric matrix at `p`.
    pub fn at(&self, p: &Point) -> Result<Matrix3<f64>> {
        let g = (self.eval)(p)?;
        if !g.iter().all(|x| x.is_finite()) || g.cholesky().is_none() {
            return Err(Error::SingularMetric(*p));
        }
        Ok(g)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        Self { eval: Arc::new(move |p| Ok(inner(p)? * c)) }
    }

    pub fn inner(&self, p: &Point, u: &Vector3<f64>, v: &Vector3<f64>) -> Result<f64> {
        Ok(u.dot(&(self.at(p)? * v)))
    }

    pub fn norm(&self, p: &Point, v: &Vector3<f64>) -> Result<f64> {
        Ok(self.inner(p, v, v)?.sqrt())
    }
}

#[derive(Clone)]
pub struct VectorField {
    eval: Arc<FieldFn>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("VectorField")
    }
}

impl VectorField {
    pub fn new(f: impl Fn(&Point) -> Vector3<f64> + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f) }
    }

    pub fn constant(v: Vector3<f64>) -> Self {
        Self::new(move |_| v)
    }

    pub fn at(&self, p: &Point) -> Vector3<f64> {
        (self.eval)(p)
    }
}

fn check_step(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidStep(h));
    }
    Ok(())
}

fn offset(p: &Point, i: usize, h: f64) -> Point {
    let mut q = *p;
    q[i] += h;
    q
}

/// `∂_l g` for `l = 0, 1, 2`.
pub fn metric_derivatives(metric: &ChartMetric, p: &Point, h: f64) -> Result<[Matrix3<f64>; 3]> {
    check_step(h)?;
    let mut dg = [Matrix3::zeros(); 3];
    for (l, d) in dg.iter_mut().enumerate() {
        *d = (metric.at(&offset(p, l, h))? - metric.at(&offset(p, l, -h))?) / (2.0 * h);
    }
    Ok(dg)
}

pub fn christoffel(metric: &ChartMetric, p: &Point, h: f64) -> Result<Christoffel> {
    let g = metric.at(p)?;
    let ginv = g.try_inverse().ok_or(Error::SingularMetric(*p))?;
    let dg = metric_derivatives(metric, p, h)?;
    let mut gamma = [Matrix3::zeros(); 3];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for l in 0..3 {
                    s += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gk[(i, j)] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

pub fn riemann(metric: &ChartMetric, p: &Point) -> Result<Riemann> {
    let gamma = christoffel(metric, p, FIRST_STEP)?;
    let mut dgamma = [[Matrix3::zeros(); 3]; 3]; // dgamma[m][l] = ∂_m Γ^l
    for (m, dm) in dgamma.iter_mut().enumerate() {
        let plus = christoffel(metric, &offset(p, m, SECOND_STEP), FIRST_STEP)?;
        let minus = christoffel(metric, &offset(p, m, -SECOND_STEP), FIRST_STEP)?;
        for l in 0..3 {
            dm[l] = (plus[l] - minus[l]) / (2.0 * SECOND_STEP);
        }
    }
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    for l in 0..3 {
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut s = dgamma[i][l][(j, k)] - dgamma[j][l][(i, k)];
                    for m in 0..3 {
                        s += gamma[l][(i, m)] * gamma[m][(j, k)] - gamma[l][(j, m)] * gamma[m][(i, k)];
                    }
                    r[l][k][i][j] = s;
                }
            }
        }
    }
    Ok(r)
}

pub fn sectional_curvature(metric: &ChartMetric, p: &Point, u: &Vector3<f64>, v: &Vector3<f64>) -> Result<f64> {
    let g = metric.at(p)?;
    let uu = u.dot(&(g * u));
    let vv = v.dot(&(g * v));
    let uv = u.dot(&(g * v));
    let denom = uu * vv - uv * uv;
    if denom <= 1e-12 * uu * vv || denom <= 0.0 {
        return Err(Error::DependentVectors);
    }
    let r = riemann(metric, p)?;
    let mut rvv = Vector3::zeros();
    for (l, rl) in r.iter().enumerate() {
        let mut s = 0.0;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    s += rl[k][i][j] * u[i] * v[j] * v[k];
                }
            }
        }
        rvv[l] = s;
    }
    Ok(rvv.dot(&(g * u)) / denom)
}

/// `(1/√det g) ∂_i(√det g X^i)`.
pub fn divergence(metric: &ChartMetric, field: &VectorField, p: &Point) -> Result<f64> {
    let h = FIRST_STEP;
    let vol = |q: &Point| -> Result<f64> { Ok(metric.at(q)?.determinant().sqrt()) };
    let mut s = 0.0;
    for i in 0..3 {
        let (a, b) = (offset(p, i, h), offset(p, i, -h));
        s += (vol(&a)? * field.at(&a)[i] - vol(&b)? * field.at(&b)[i]) / (2.0 * h);
    }
    Ok(s / vol(p)?)
}

/// `∇X` as the matrix with entries `(k, i) = ∇_i X^k`.
pub fn covariant_derivative(metric: &ChartMetric, field: &VectorField, p: &Point) -> Result<Matrix3<f64>> {
    let h = FIRST_STEP;
    let gamma = christoffel(metric, p, h)?;
    let x = field.at(p);
    let mut nabla = Matrix3::zeros();
    for i in 0..3 {
        let dx = (field.at(&offset(p, i, h)) - field.at(&offset(p, i, -h))) / (2.0 * h);
        for k in 0..3 {
            let mut s = dx[k];
            for j in 0..3 {
                s += gamma[k][(i, j)] * x[j];
            }
            nabla[(k, i)] = s;
        }
    }
    Ok(nabla)
}

/// `max |∇_i X_j + ∇_j X_i|`; zero exactly when `X` is Killing at `p`.
pub fn killing_residual(metric: &ChartMetric, field: &VectorField, p: &Point) -> Result<f64> {
    let lowered = metric.at(p)? * covariant_derivative(metric, field, p)?; // (j, i) = ∇_i X_j
    Ok((lowered + lowered.transpose()).amax())
}

/// `‖∇_X X‖ / ‖X‖²`, which vanishes iff the flow lines of `X` are geodesics.
pub fn flow_line_residual(metric: &ChartMetric, field: &VectorField, p: &Point) -> Result<f64> {
    let x = field.at(p);
    let acc = covariant_derivative(metric, field, p)? * x;
    Ok(metric.norm(p, &acc)? / metric.inner(p, &x, &x)?)
}

#[derive(Clone, Debug)]
pub struct Geodesic {
    pub points: Vec<Point>,
    pub velocities: Vec<Vector3<f64>>,
}

fn geodesic_rhs(metric: &ChartMetric, x: &Point, v: &Vector3<f64>) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let gamma = christoffel(metric, x, FIRST_STEP)?;
    let acc = Vector3::from_fn(|k, _| -v.dot(&(gamma[k] * v)));
    Ok((*v, acc))
}

/// Fixed-step classical RK4 for `ẍ^k + Γ^k_ij ẋ^i ẋ^j = 0`.
pub fn geodesic_integrate(metric: &ChartMetric, p: &Point, v: &Vector3<f64>, t: f64, steps: usize) -> Result<Geodesic> {
    if steps == 0 {
        return Err(Error::Malformed("geodesic needs at least one step".into()));
    }
    if !t.is_finite() {
        return Err(Error::Malformed("geodesic time must be finite".into()));
    }
    metric.at(p)?;
    let dt = t / steps as f64;
    let mut points = vec![*p];
    let mut velocities = vec![*v];
    let (mut x, mut u) = (*p, *v);
    for _ in 0..steps {
        let step = || -> Result<(Point, Vector3<f64>)> {
            let (k1x, k1v) = geodesic_rhs(metric, &x, &u)?;
            let (k2x, k2v) = geodesic_rhs(metric, &(x + k1x * (dt / 2.0)), &(u + k1v * (dt / 2.0)))?;
            let (k3x, k3v) = geodesic_rhs(metric, &(x + k2x * (dt / 2.0)), &(u + k2v * (dt / 2.0)))?;
            let (k4x, k4v) = geodesic_rhs(metric, &(x + k3x * dt), &(u + k3v * dt))?;
            Ok((
                x + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dt / 6.0),
                u + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0),
            ))
        };
        match step() {
            Ok((nx, nu)) => {
                x = nx;
                u = nu;
                points.push(x);
                velocities.push(u);
            }
            Err(Error::Domain(_)) | Err(Error::SingularMetric(_)) => {
                return Err(Error::LeftChart { path: points, steps });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Geodesic { points, velocities })
}

/// `ω = μ(X, ·) / μ(X, X)` as a covector.
pub fn connection_form(metric: &ChartMetric, field: &VectorField, p: &Point) -> Result<Vector3<f64>> {
    let g = metric.at(p)?;
    let x = field.at(p);
    let xx = x.dot(&(g * x));
    if xx <= 0.0 {
        return Err(Error::Domain("invariant field vanishes".into()));
    }
    Ok(g * x / xx)
}

/// Coordinate components `dω_ij = ∂_i ω_j − ∂_j ω_i`.
pub fn connection_form_derivative(metric: &ChartMetric, field: &VectorField, p: &Point) -> Result<Matrix3<f64>> {
    let h = FIRST_STEP;
    let mut d = [Vector3::zeros(); 3]; // d[i] = ∂_i ω
    for (i, di) in d.iter_mut().enumerate() {
        *di = (connection_form(metric, field, &offset(p, i, h))?
            - connection_form(metric, field, &offset(p, i, -h))?)
            / (2.0 * h);
    }
    Ok(Matrix3::from_fn(|i, j| d[i][j] - d[j][i]))
}

/// Columns form a `μ`-orthonormal frame at `p`.
pub fn orthonormal_frame(metric: &ChartMetric, p: &Point) -> Result<Matrix3<f64>> {
    let l = metric.at(p)?.cholesky().ok_or(Error::SingularMetric(*p))?.unpack();
    let linv = l.try_inverse().ok_or(Error::SingularMetric(*p))?;
    Ok(linv.transpose())
}

/// Frame `(u_1, u_2, n)`: `n = X/‖X‖` and `u_1, u_2` an orthonormal basis of `X^⊥`.
pub fn adapted_frame(metric: &ChartMetric, field: &VectorField, p: &Point) -> Result<Matrix3<f64>> {
    let g = metric.at(p)?;
    let x = field.at(p);
    let n = x / metric.norm(p, &x)?;
    let mut basis = vec![n];
    for e in [Vector3::x(), Vector3::y(), Vector3::z()] {
        if basis.len() == 3 {
            break;
        }
        let mut w = e;
        for b in &basis {
            w -= b * b.dot(&(g * w));
        }
        let nw = w.dot(&(g * w)).sqrt();
        if nw > 1e-6 {
            basis.push(w / nw);
        }
    }
    Ok(Matrix3::from_columns(&[basis[1], basis[2], basis[0]]))
}

#[derive(Clone, Debug)]
pub struct ConnectionCurvature {
    /// Coordinate components of `dω`.
    pub matrix: Matrix3<f64>,
    /// `‖dω‖` in a `μ`-orthonormal frame, times `μ(X, X)`; invariant under
    /// constant rescaling of the metric.
    pub norm: f64,
    /// `‖i_X dω‖ · ‖X‖` in an orthonormal frame.
    pub contraction: f64,
}

pub fn connection_curvature_at(metric: &ChartMetric, field: &VectorField, p: &Point) -> Result<ConnectionCurvature> {
    let matrix = connection_form_derivative(metric, field, p)?;
    let frame = orthonormal_frame(metric, p)?;
    let x = field.at(p);
    let xx = metric.inner(p, &x, &x)?;
    let comps = frame.transpose() * matrix * frame;
    let norm = comps.norm() / std::f64::consts::SQRT_2 * xx;
    let ix = frame.transpose() * (matrix.transpose() * x); // components of i_X dω
    Ok(ConnectionCurvature { matrix, norm, contraction: ix.norm() * xx.sqrt() })
}

/// Curvature of the leaf through `p` tangent to `X^⊥`, assuming that
/// distribution is integrable, via the Gauss equation. Returned times
/// `μ(X, X)` so that constant rescaling of the metric leaves it unchanged.
pub fn leaf_curvature(metric: &ChartMetric, field: &VectorField, p: &Point) -> Result<f64> {
    let frame = adapted_frame(metric, field, p)?;
    let (u1, u2) = (frame.column(0).into_owned(), frame.column(1).into_owned());
    let ambient = sectional_curvature(metric, p, &u1, &u2)?;
    let m = metric.clone();
    let f = field.clone();
    let unit_normal = VectorField::new(move |q| {
        let x = f.at(q);
        match m.norm(q, &x) {
            Ok(n) if n > 0.0 => x / n,
            _ => Vector3::from_element(f64::NAN),
        }
    });
    let g = metric.at(p)?;
    let dn = covariant_derivative(metric, &unit_normal, p)?;
    let shape = |a: &Vector3<f64>, b: &Vector3<f64>| (dn * a).dot(&(g * b));
    let s11 = shape(&u1, &u1);
    let s22 = shape(&u2, &u2);
    let s12 = 0.5 * (shape(&u1, &u2) + shape(&u2, &u1));
    let x = field.at(p);
    Ok((ambient + s11 * s22 - s12 * s12) * metric.inner(p, &x, &x)?)
}

/// Left-invariant evaluation `dω(e_i, e_j) = −ω([e_i, e_j])` where `ω` picks
/// the coefficient of the central basis vector; rows and columns run over the
/// remaining basis vectors in order.
pub fn connection_curvature_algebraic(sc: &StructureConstants, center_index: usize) -> Result<DMatrix<f64>> {
    let n = sc.dim();
    if center_index >= n {
        return Err(Error::DimensionMismatch { expected: n, got: center_index });
    }
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            worst = worst.max(sc.get(center_index, j, k).abs());
        }
    }
    if worst > sc.tolerance() {
        return Err(Error::NotCentral(center_index, worst));
    }
    let keep: Vec<usize> = (0..n).filter(|&k| k != center_index).collect();
    Ok(DMatrix::from_fn(n - 1, n - 1, |a, b| -sc.get(keep[a], keep[b], center_index)))
}
