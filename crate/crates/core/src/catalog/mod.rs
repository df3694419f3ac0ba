//! The catalog of model geometries: group action, invariant metric and, for
//! axially symmetric entries, the invariant field `X`.

mod chart;
mod model;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

pub use chart::{Chart, ChartKind};
pub use model::{nil_rotation, qexp, qlog, Model, SL_SIGMA};

use crate::cohomology::{central_extension, TwoCocycle};
use crate::diffgeo::{self, ChartMetric, VectorField, FIRST_STEP};
use crate::error::{Error, Result};
use crate::lie::{algebras, AlgebraClass, StructureConstants};
use crate::rep::CircleRepresentation;

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometryLabel {
    E3,
    S3_SO4,
    H3,
    S2xR,
    H2xR,
    E2xR,
    E2SemiR,
    S3_U2,
    SLTilde,
    NilSO2,
    /// A Lie group acting on itself; `None` stands for the whole family.
    LieGroup(Option<AlgebraClass>),
}

impl GeometryLabel {
    pub const FIXED: [GeometryLabel; 10] = [
        GeometryLabel::E3,
        GeometryLabel::S3_SO4,
        GeometryLabel::H3,
        GeometryLabel::S2xR,
        GeometryLabel::H2xR,
        GeometryLabel::E2xR,
        GeometryLabel::E2SemiR,
        GeometryLabel::S3_U2,
        GeometryLabel::SLTilde,
        GeometryLabel::NilSO2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GeometryLabel::E3 => "E3",
            GeometryLabel::S3_SO4 => "S3_SO4",
            GeometryLabel::H3 => "H3",
            GeometryLabel::S2xR => "S2xR",
            GeometryLabel::H2xR => "H2xR",
            GeometryLabel::E2xR => "E2xR",
            GeometryLabel::E2SemiR => "E2SemiR",
            GeometryLabel::S3_U2 => "S3_U2",
            GeometryLabel::SLTilde => "SLTilde",
            GeometryLabel::NilSO2 => "NilSO2",
            GeometryLabel::LieGroup(_) => "LieGroup",
        }
    }
}

impl fmt::Display for GeometryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryLabel::LieGroup(Some(c)) => write!(f, "LieGroup({c})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for GeometryLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeometryLabel::FIXED
            .iter()
            .copied()
            .find(|l| l.name() == s)
            .or(if s == "LieGroup" { Some(GeometryLabel::LieGroup(None)) } else { None })
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

impl Serialize for GeometryLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// The ten fixed labels followed by the Lie-group family marker.
pub fn list_geometries() -> Vec<GeometryLabel> {
    let mut v = GeometryLabel::FIXED.to_vec();
    v.push(GeometryLabel::LieGroup(None));
    v
}

/// Source chart and coordinates, target chart and coordinates, Jacobian.
type Transport = (Chart, Vector3<f64>, Chart, Vector3<f64>, Matrix3<f64>);

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub label: GeometryLabel,
    pub model: Model,
    pub isotropy_dim: usize,
    pub flat_connection: Option<bool>,
    pub kappa: Option<f64>,
    /// Sign of the curvature of the space (isotropic entries) or of the base
    /// surface (axially symmetric entries).
    pub base_curvature_sign: i8,
    pub metric_scale: f64,
    /// Lie algebra of the acting group: central field direction `e_0`,
    /// horizontal `e_1, e_2`, isotropy `e_3`. Present for non-flat entries.
    pub structure_constants: Option<StructureConstants>,
    conjugation: Option<Matrix4<f64>>,
}

/// `ℝ ×_ω base` with `ω(e_0, e_1) = 1` on the three-dimensional base.
fn fibred(base: StructureConstants) -> StructureConstants {
    let w = TwoCocycle::from_entries(base.clone(), &[(0, 1, 1.0)]).expect("valid cochain");
    central_extension(&base, &w).expect("cochain is closed on a three-dimensional algebra")
}

impl CatalogEntry {
    fn new(label: GeometryLabel) -> Self {
        use GeometryLabel::*;
        let (model, iso, flat, kappa, sign) = match label {
            E3 => (Model::Euclidean, 3, None, None, 0),
            S3_SO4 => (Model::SphereSo4, 3, None, None, 1),
            H3 => (Model::Hyperbolic, 3, None, None, -1),
            S2xR => (Model::SphereLine, 1, Some(true), Some(0.0), 1),
            H2xR => (Model::HyperbolicLine, 1, Some(true), Some(0.0), -1),
            E2xR => (Model::Warped { kappa: 0.0 }, 1, Some(true), Some(0.0), 0),
            E2SemiR => (Model::Warped { kappa: 1.0 }, 1, Some(true), Some(1.0), 0),
            S3_U2 => (Model::SphereU2, 1, Some(false), None, 1),
            SLTilde => (Model::SlTilde, 1, Some(false), None, -1),
            NilSO2 => (Model::Nil, 1, Some(false), None, 0),
            LieGroup(_) => unreachable!("family marker has no entry"),
        };
        let structure_constants = match label {
            S3_U2 => Some(fibred(algebras::so3())),
            SLTilde => Some(fibred(algebras::sl2r())),
            NilSO2 => Some(fibred(algebras::e2())),
            E2xR => Some(central_extension(&algebras::e2(), &TwoCocycle::zero(algebras::e2())).expect("zero cochain")),
            _ => None,
        };
        Self {
            label,
            model,
            isotropy_dim: iso,
            flat_connection: flat,
            kappa,
            base_curvature_sign: sign,
            metric_scale: 1.0,
            structure_constants,
            conjugation: None,
        }
    }

    /// `E_0(2) ⋊ ℝ` with an arbitrary nonzero `κ`.
    pub fn e2_semidirect(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() || kappa == 0.0 {
            return Err(Error::Malformed("κ must be finite and nonzero".into()));
        }
        let mut e = Self::new(GeometryLabel::E2SemiR);
        e.model = Model::Warped { kappa };
        e.kappa = Some(kappa);
        Ok(e)
    }

    pub fn with_metric_scale(mut self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Malformed(format!("metric scale {c} must be positive")));
        }
        self.metric_scale *= c;
        Ok(self)
    }

    /// Replaces the action by `p ↦ Q · g · Qᵀ p` for an orthogonal `Q` on the
    /// ambient ℝ⁴ of a three-sphere model.
    pub fn conjugated(mut self, q: Matrix4<f64>) -> Result<Self> {
        if !matches!(self.model, Model::SphereSo4 | Model::SphereU2) {
            return Err(Error::Unsupported("conjugation is defined for three-sphere models".into()));
        }
        if (q.transpose() * q - Matrix4::identity()).amax() > 1e-12 {
            return Err(Error::Malformed("conjugating matrix is not orthogonal".into()));
        }
        self.conjugation = Some(match self.conjugation {
            Some(old) => q * old,
            None => q,
        });
        Ok(self)
    }

    /// Deterministic orthogonal conjugation built from a seed.
    pub fn conjugated_by_seed(self, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(4, 4, |_, _| rand::Rng::random_range(&mut rng, -1.0..1.0));
        let q = m.qr().q();
        let q = Matrix4::from_iterator(q.iter().copied());
        self.conjugated(q)
    }

    fn conj(&self, p: &DVector<f64>, inverse: bool) -> DVector<f64> {
        match &self.conjugation {
            Some(q) => {
                let v = nalgebra::Vector4::new(p[0], p[1], p[2], p[3]);
                let w = if inverse { q.transpose() * v } else { q * v };
                DVector::from_column_slice(w.as_slice())
            }
            None => p.clone(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.model.ambient_dim()
    }

    pub fn group_param_dim(&self) -> usize {
        self.model.param_dim()
    }

    pub fn identity_params(&self) -> DVector<f64> {
        DVector::zeros(self.group_param_dim())
    }

    pub fn base_point(&self) -> DVector<f64> {
        self.conj(&self.model.base_point(), false)
    }

    pub fn check_point(&self, p: &DVector<f64>) -> Result<()> {
        self.model.check_point(&self.conj(p, true))
    }

    pub fn action(&self, g: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
        let q = self.model.act(g, &self.conj(p, true))?;
        Ok(self.conj(&q, false))
    }

    pub fn compose(&self, g: &DVector<f64>, h: &DVector<f64>) -> Option<DVector<f64>> {
        self.model.compose(g, h)
    }

    pub fn isotropy_params(&self, theta: f64) -> Option<DVector<f64>> {
        self.model.isotropy_params(theta)
    }

    fn x_ambient(&self, p: &DVector<f64>) -> Option<DVector<f64>> {
        let x = self.model.x_ambient(&self.conj(p, true))?;
        Some(if self.conjugation.is_some() { self.conj(&x, false) } else { x })
    }

    pub fn chart_at(&self, center: &DVector<f64>) -> Result<Chart> {
        self.check_point(center)?;
        let kind = ChartKind::centered(&self.model, center);
        let metric = kind.raw_metric(&self.model).scaled(self.metric_scale);
        let x_field = if self.isotropy_dim == 1 {
            let me = self.clone();
            let k = kind.clone();
            Some(match kind {
                ChartKind::Global => {
                    VectorField::new(move |u| {
                        let p = k.point(u);
                        me.x_ambient(&p).map(|x| k.push(&p, &x)).unwrap_or_else(Vector3::zeros)
                    })
                }
                _ => VectorField::new(move |u| {
                    let p = k.point(u);
                    me.x_ambient(&p).map(|x| k.push(&p, &x)).unwrap_or_else(Vector3::zeros)
                }),
            })
        } else {
            None
        };
        Ok(Chart { kind, metric, x_field })
    }

    /// Metric matrix at `p` in the chart centred at `p`.
    pub fn invariant_metric(&self, p: &DVector<f64>) -> Result<Matrix3<f64>> {
        let c = self.chart_at(p)?;
        c.metric.at(&c.kind.coords(p)?)
    }

    /// `X(p)` in the chart centred at `p`.
    pub fn invariant_vector_field(&self, p: &DVector<f64>) -> Result<Vector3<f64>> {
        if self.isotropy_dim != 1 {
            return Err(Error::Unsupported(format!("{} has no invariant field", self.label)));
        }
        let c = self.chart_at(p)?;
        let u = c.kind.coords(p)?;
        Ok(c.x_field.expect("axially symmetric chart carries X").at(&u))
    }

    pub fn group_sample(&self, seed: u64) -> DVector<f64> {
        self.model.sample_params(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn point_sample(&self, seed: u64) -> DVector<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed0f_9017);
        self.conj(&self.model.sample_point(&mut rng), false)
    }

    /// The chart map of `g` between charts centred at `p` and `g·p`, with its
    /// central-difference Jacobian at `p`.
    fn transported(&self, g: &DVector<f64>, p: &DVector<f64>) -> Result<Transport> {
        let a = self.chart_at(p)?;
        let gp = self.action(g, p)?;
        let b = self.chart_at(&gp)?;
        let u0 = a.kind.coords(p)?;
        let h = FIRST_STEP;
        let mut jac = Matrix3::zeros();
        for i in 0..3 {
            let mut up = u0;
            let mut dn = u0;
            up[i] += h;
            dn[i] -= h;
            let fp = b.kind.coords(&self.action(g, &a.kind.point(&up))?)?;
            let fm = b.kind.coords(&self.action(g, &a.kind.point(&dn))?)?;
            jac.set_column(i, &((fp - fm) / (2.0 * h)));
        }
        let v0 = b.kind.coords(&gp)?;
        Ok((a, u0, b, v0, jac))
    }

    /// `max |Dgᵀ μ(g·p) Dg − μ(p)|`.
    pub fn pullback_residual(&self, g: &DVector<f64>, p: &DVector<f64>) -> Result<f64> {
        let (a, u0, b, v0, jac) = self.transported(g, p)?;
        let lhs = jac.transpose() * b.metric.at(&v0)? * jac;
        Ok((lhs - a.metric.at(&u0)?).amax())
    }

    /// `max |Dg X(p) − X(g·p)|`.
    pub fn field_equivariance_residual(&self, g: &DVector<f64>, p: &DVector<f64>) -> Result<f64> {
        let (a, u0, b, v0, jac) = self.transported(g, p)?;
        let (xa, xb) = match (a.x_field, b.x_field) {
            (Some(xa), Some(xb)) => (xa, xb),
            _ => return Err(Error::Unsupported(format!("{} has no invariant field", self.label))),
        };
        Ok((jac * xa.at(&u0) - xb.at(&v0)).amax())
    }

    /// `max |g·(h·p) − (g∘h)·p|` in ambient coordinates.
    pub fn composition_residual(&self, g: &DVector<f64>, h: &DVector<f64>, p: &DVector<f64>) -> Result<Option<f64>> {
        let Some(gh) = self.compose(g, h) else { return Ok(None) };
        let lhs = self.action(g, &self.action(h, p)?)?;
        let rhs = self.action(&gh, p)?;
        Ok(Some((lhs - rhs).amax()))
    }

    /// Isotropy action on the tangent space at the base point, in a
    /// `μ`-orthonormal frame.
    pub fn isotropy_representation(&self) -> Result<CircleRepresentation> {
        if self.isotropy_dim != 1 {
            return Err(Error::Unsupported(format!("{} does not have circle isotropy", self.label)));
        }
        let base = self.base_point();
        let chart = self.chart_at(&base)?;
        let frame = diffgeo::orthonormal_frame(&chart.metric, &chart.kind.coords(&base)?)?;
        let frame_inv = frame.try_inverse().ok_or(Error::SingularMetric(Vector3::zeros()))?;
        let me = self.clone();
        // evaluate eagerly through a closure that cannot fail on valid input
        Ok(CircleRepresentation::new(
            move |theta| {
                let k = me.isotropy_params(theta).expect("axially symmetric model");
                let (_, _, _, _, jac) = me.transported(&k, &base).expect("base point lies in the chart");
                frame_inv * jac * frame
            },
            true,
        ))
    }

    /// Catalog metric at chart coordinates for direct tensor calculus.
    pub fn chart_metric_at_base(&self) -> Result<(ChartMetric, Option<VectorField>, Vector3<f64>)> {
        let base = self.base_point();
        let c = self.chart_at(&base)?;
        let u = c.kind.coords(&base)?;
        Ok((c.metric, c.x_field, u))
    }
}

pub fn entry(label: GeometryLabel) -> Result<CatalogEntry> {
    match label {
        GeometryLabel::LieGroup(_) => Err(Error::Unsupported(
            "Lie group geometries are a family; supply structure constants".into(),
        )),
        l => Ok(CatalogEntry::new(l)),
    }
}

pub fn entry_by_name(name: &str) -> Result<CatalogEntry> {
    entry(name.parse()?)
}

pub fn all_entries() -> Vec<CatalogEntry> {
    GeometryLabel::FIXED.iter().map(|&l| CatalogEntry::new(l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_has_ten_labels_and_marker() {
        let l = list_geometries();
        assert_eq!(l.len(), 11);
        assert!(l.contains(&GeometryLabel::S3_U2));
        assert!(l.contains(&GeometryLabel::E2SemiR));
        assert_eq!(l[10], GeometryLabel::LieGroup(None));
    }

    #[test]
    fn labels_parse() {
        for l in GeometryLabel::FIXED {
            assert_eq!(l.name().parse::<GeometryLabel>().unwrap(), l);
        }
        assert!(matches!("NOSUCH".parse::<GeometryLabel>(), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn e2semir_metric_and_field() {
        let e = entry(GeometryLabel::E2SemiR).unwrap();
        let p = DVector::from_vec(vec![0.3, 0.2, 0.5]);
        let m = e.invariant_metric(&p).unwrap();
        let want = Matrix3::from_diagonal(&Vector3::new(0.5f64.exp(), 0.5f64.exp(), 1.0));
        assert!((m - want).amax() < 1e-15);
        assert_eq!(e.invariant_vector_field(&p).unwrap(), Vector3::z());
        assert_eq!(entry(GeometryLabel::E3).unwrap().invariant_metric(&p).unwrap(), Matrix3::identity());
        assert!(matches!(
            entry(GeometryLabel::E3).unwrap().invariant_vector_field(&p),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn hopf_field_is_i_times_p() {
        let e = entry(GeometryLabel::S3_U2).unwrap();
        let p = DVector::from_vec(vec![0.5, 0.5, 0.5, 0.5]);
        let c = e.chart_at(&p).unwrap();
        let x = e.invariant_vector_field(&p).unwrap();
        // map back to ambient: at the centre the chart differential is the frame
        let amb = match &c.kind {
            ChartKind::Sphere3 { frame, .. } => frame[0] * x.x + frame[1] * x.y + frame[2] * x.z,
            _ => unreachable!(),
        };
        let ip = nalgebra::Vector4::new(-0.5, 0.5, -0.5, 0.5); // i·(z1 + z2 j)
        assert!((amb - ip).norm() < 1e-14);
    }

    #[test]
    fn samples_are_deterministic() {
        let e = entry(GeometryLabel::E3).unwrap();
        assert_eq!(e.group_sample(0), e.group_sample(0));
        assert_eq!(e.group_sample(0).len(), 6);
        assert_ne!(e.group_sample(0), e.group_sample(1));
    }

    #[test]
    fn every_entry_is_invariant_on_a_few_samples() {
        for e in all_entries() {
            for seed in 0..20 {
                let g = e.group_sample(seed);
                let p = e.point_sample(seed);
                let r = e.pullback_residual(&g, &p).unwrap();
                assert!(r < 1e-6, "{} seed {seed}: {r:e}", e.label);
                if e.isotropy_dim == 1 {
                    let x = e.field_equivariance_residual(&g, &p).unwrap();
                    assert!(x < 1e-6, "{} seed {seed}: X residual {x:e}", e.label);
                }
            }
        }
    }

    #[test]
    fn composition_law() {
        for e in all_entries() {
            for seed in 0..20 {
                let (g, h) = (e.group_sample(seed), e.group_sample(seed + 1000));
                let p = e.point_sample(seed);
                if let Some(r) = e.composition_residual(&g, &h, &p).unwrap() {
                    assert!(r < 1e-9, "{} seed {seed}: {r:e}", e.label);
                }
            }
        }
    }

    #[test]
    fn conjugated_sphere_is_still_invariant() {
        let e = entry(GeometryLabel::S3_SO4).unwrap().conjugated_by_seed(11).unwrap();
        for seed in 0..10 {
            let r = e.pullback_residual(&e.group_sample(seed), &e.point_sample(seed)).unwrap();
            assert!(r < 1e-6);
        }
        assert!(entry(GeometryLabel::E3).unwrap().conjugated_by_seed(1).is_err());
    }

    #[test]
    fn isotropy_reps_are_circle_reps() {
        for e in all_entries().into_iter().filter(|e| e.isotropy_dim == 1) {
            let rep = e.isotropy_representation().unwrap();
            let split = crate::rep::decompose(&rep).unwrap();
            // the fixed line is the direction of X
            let (m, x, u) = e.chart_metric_at_base().unwrap();
            let f = diffgeo::orthonormal_frame(&m, &u).unwrap();
            let xn = f.try_inverse().unwrap() * x.unwrap().at(&u);
            let cos = split.line.dot(&xn.normalize()).abs();
            assert!((cos - 1.0).abs() < 1e-6, "{}", e.label);
        }
    }
}
