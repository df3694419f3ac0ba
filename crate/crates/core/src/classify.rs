//! Assigns a catalog label to a geometry from isotropy dimension, curvature
//! signs, connection flatness and the divergence of the invariant field.
//!
//! Every decision is a zero/nonzero test on a scale-free quantity: values below
//! [`ZERO_THRESHOLD`] count as zero, values above [`NONZERO_THRESHOLD`] as
//! nonzero, and anything in between is reported as inconclusive.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::catalog::{self, CatalogEntry, GeometryLabel};
use crate::diffgeo::{self, ChartMetric, VectorField};
use crate::error::{Error, Result};
use crate::lie::{self, AlgebraKind, SolvableForm, StructureConstants};

pub const ZERO_THRESHOLD: f64 = 1e-4;
pub const NONZERO_THRESHOLD: f64 = 0.1;

/// A geometry presented by its local data at a base point of a chart.
#[derive(Clone, Debug)]
pub struct GeometrySpec {
    pub isotropy_dim: usize,
    pub metric: Option<ChartMetric>,
    pub x_field: Option<VectorField>,
    pub base_point: Vector3<f64>,
    pub structure_constants: Option<StructureConstants>,
}

/// On-disk form of a spec.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecJson {
    /// A catalog entry, optionally perturbed.
    Catalog {
        label: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metric_scale: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kappa: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        conjugate_seed: Option<u64>,
    },
    /// `e^{κt} ν + λ dt²` with `ν` of constant curvature `base_curvature`.
    Warped {
        base_curvature: f64,
        kappa: f64,
        #[serde(default = "one")]
        fiber_scale: f64,
    },
    /// A Lie group acting on itself by left translations.
    LieGroup { structure_constants: StructureConstants },
}

fn one() -> f64 {
    1.0
}

impl GeometrySpec {
    pub fn from_entry(entry: &CatalogEntry) -> Result<Self> {
        let (metric, x_field, base_point) = entry.chart_metric_at_base()?;
        Ok(Self {
            isotropy_dim: entry.isotropy_dim,
            metric: Some(metric),
            x_field,
            base_point,
            structure_constants: entry.structure_constants.clone(),
        })
    }

    /// `e^{κt} ν + λ dt²` on `(x, y, t)`, with `ν = 4|dx|² / (1 + c|x|²)²`.
    pub fn warped(base_curvature: f64, kappa: f64, fiber_scale: f64) -> Result<Self> {
        if !(fiber_scale.is_finite() && fiber_scale > 0.0) || !base_curvature.is_finite() || !kappa.is_finite() {
            return Err(Error::Malformed("warped spec needs finite κ, curvature and positive fibre scale".into()));
        }
        let c = base_curvature;
        let metric = ChartMetric::with_domain(move |p| {
            let s = 1.0 + c * (p.x * p.x + p.y * p.y);
            if s <= 0.0 {
                return Err(Error::Domain("outside the disk model".into()));
            }
            let f = 4.0 / (s * s) * (kappa * p.z).exp();
            Ok(Matrix3::from_diagonal(&Vector3::new(f, f, fiber_scale)))
        });
        Ok(Self {
            isotropy_dim: 1,
            metric: Some(metric),
            x_field: Some(VectorField::constant(Vector3::z())),
            base_point: Vector3::zeros(),
            structure_constants: None,
        })
    }

    pub fn lie_group(sc: StructureConstants) -> Self {
        Self {
            isotropy_dim: 0,
            metric: None,
            x_field: None,
            base_point: Vector3::zeros(),
            structure_constants: Some(sc),
        }
    }

    pub fn from_json(spec: &SpecJson) -> Result<Self> {
        match spec {
            SpecJson::Catalog { label, metric_scale, kappa, conjugate_seed } => {
                let label: GeometryLabel = label.parse()?;
                let mut e = match kappa {
                    Some(k) if label == GeometryLabel::E2SemiR => CatalogEntry::e2_semidirect(*k)?,
                    Some(_) => {
                        return Err(Error::Malformed(format!("κ cannot be set for {label}")));
                    }
                    None => catalog::entry(label)?,
                };
                if let Some(c) = metric_scale {
                    e = e.with_metric_scale(*c)?;
                }
                if let Some(seed) = conjugate_seed {
                    e = e.conjugated_by_seed(*seed)?;
                }
                Self::from_entry(&e)
            }
            SpecJson::Warped { base_curvature, kappa, fiber_scale } => {
                Self::warped(*base_curvature, *kappa, *fiber_scale)
            }
            SpecJson::LieGroup { structure_constants } => Ok(Self::lie_group(structure_constants.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub question: String,
    pub value: Option<f64>,
    pub branch: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecisionTrace {
    pub label: GeometryLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<lie::AlgebraClass>,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sign {
    Negative,
    Zero,
    Positive,
}

fn sign_of(quantity: &str, v: f64) -> Result<Sign> {
    if !v.is_finite() {
        return Err(Error::Inconclusive { quantity: quantity.into(), value: v });
    }
    if v.abs() < ZERO_THRESHOLD {
        Ok(Sign::Zero)
    } else if v.abs() > NONZERO_THRESHOLD {
        Ok(if v > 0.0 { Sign::Positive } else { Sign::Negative })
    } else {
        Err(Error::Inconclusive { quantity: quantity.into(), value: v })
    }
}

fn branch(s: Sign) -> &'static str {
    match s {
        Sign::Negative => "negative",
        Sign::Zero => "zero",
        Sign::Positive => "positive",
    }
}

struct Tracer(Vec<TraceStep>);

impl Tracer {
    fn push(&mut self, question: &str, value: f64, branch: impl Into<String>) {
        self.0.push(TraceStep { question: question.into(), value: Some(value), branch: branch.into() });
    }
}

fn isotropic(metric: &ChartMetric, p: &Vector3<f64>, t: &mut Tracer) -> Result<GeometryLabel> {
    let g = metric.at(p)?;
    let scale = g.determinant().cbrt();
    let e = [Vector3::x(), Vector3::y(), Vector3::z()];
    let planes = [(e[0], e[1]), (e[0], e[2]), (e[1], e[2]), (e[0] + e[1], e[1] - e[2] * 0.5)];
    let mut signs = Vec::new();
    let mut first = 0.0;
    for (k, (u, v)) in planes.iter().enumerate() {
        let val = diffgeo::sectional_curvature(metric, p, u, v)? * scale;
        if k == 0 {
            first = val;
        }
        signs.push(sign_of("sectional curvature", val)?);
    }
    if signs.iter().any(|s| *s != signs[0]) {
        return Err(Error::Inconsistent("sectional curvature changes sign across planes".into()));
    }
    let label = match signs[0] {
        Sign::Zero => GeometryLabel::E3,
        Sign::Positive => GeometryLabel::S3_SO4,
        Sign::Negative => GeometryLabel::H3,
    };
    t.push("sectional curvature", first, branch(signs[0]));
    Ok(label)
}

fn nonflat(spec: &GeometrySpec, t: &mut Tracer) -> Result<(GeometryLabel, lie::AlgebraClass)> {
    let sc = spec.structure_constants.as_ref().ok_or_else(|| {
        Error::Missing("structure constants of the group are required for a non-flat connection".into())
    })?;
    if sc.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: sc.dim() });
    }
    let curv = diffgeo::connection_curvature_algebraic(sc, 0)?;
    t.push("algebraic dω(e1, e2)", curv[(0, 1)], "centre e0");
    let quotient = sc.quotient_by_basis_vector(0)?;
    let class = lie::classify_algebra(&quotient)?;
    let label = match class.kind {
        AlgebraKind::SO3 => GeometryLabel::S3_U2,
        AlgebraKind::SL2R => GeometryLabel::SLTilde,
        AlgebraKind::Solvable2 { form: SolvableForm::Complex, param } if param.abs() < lie::PARAM_TOL => {
            GeometryLabel::NilSO2
        }
        other => {
            return Err(Error::Inconsistent(format!(
                "quotient algebra {other:?} is not the isometry algebra of a surface"
            )))
        }
    };
    let base = match label {
        GeometryLabel::S3_U2 => "positive",
        GeometryLabel::SLTilde => "negative",
        _ => "zero",
    };
    let killing = lie::killing_form(&quotient).determinant();
    t.push("Killing determinant of the quotient", killing, format!("{class}, base curvature {base}"));
    Ok((label, class))
}

/// Runs the decision tree and records every measured quantity.
pub fn decision_trace(spec: &GeometrySpec) -> Result<DecisionTrace> {
    let mut t = Tracer(Vec::new());
    let p = spec.base_point;
    t.push("isotropy dimension", spec.isotropy_dim as f64, spec.isotropy_dim.to_string());
    let mut algebra = None;
    let label = match spec.isotropy_dim {
        0 => {
            let sc = spec
                .structure_constants
                .as_ref()
                .ok_or_else(|| Error::Missing("structure constants for a Lie group geometry".into()))?;
            let class = lie::classify_algebra(sc)?;
            t.push("derived algebra dimension", class.derived_dim as f64, class.to_string());
            algebra = Some(class);
            GeometryLabel::LieGroup(Some(class))
        }
        3 => {
            let metric = spec.metric.as_ref().ok_or_else(|| Error::Missing("metric".into()))?;
            isotropic(metric, &p, &mut t)?
        }
        1 => {
            let metric = spec.metric.as_ref().ok_or_else(|| Error::Missing("metric".into()))?;
            let x = spec
                .x_field
                .as_ref()
                .ok_or_else(|| Error::Missing("invariant vector field X".into()))?;
            let cc = diffgeo::connection_curvature_at(metric, x, &p)?;
            let flat = sign_of("connection curvature", cc.norm)?;
            t.push("connection curvature |dω|", cc.norm, if flat == Sign::Zero { "flat" } else { "non-flat" });
            if flat == Sign::Zero {
                let leaf = diffgeo::leaf_curvature(metric, x, &p)?;
                let s = sign_of("base curvature", leaf)?;
                t.push("base curvature", leaf, branch(s));
                let div = diffgeo::divergence(metric, x, &p)?;
                let d = sign_of("divergence of X", div)?;
                t.push("divergence of X", div, if d == Sign::Zero { "Killing" } else { "not Killing" });
                match (s, d) {
                    (Sign::Positive, Sign::Zero) => GeometryLabel::S2xR,
                    (Sign::Negative, Sign::Zero) => GeometryLabel::H2xR,
                    (Sign::Zero, Sign::Zero) => GeometryLabel::E2xR,
                    (Sign::Zero, _) => GeometryLabel::E2SemiR,
                    _ => {
                        return Err(Error::Inconsistent(format!(
                            "curved base (curvature {leaf:e}) with non-Killing X (divergence {div:e})"
                        )))
                    }
                }
            } else {
                let (label, class) = nonflat(spec, &mut t)?;
                algebra = Some(class);
                label
            }
        }
        other => return Err(Error::Malformed(format!("isotropy dimension {other} is not 0, 1 or 3"))),
    };
    // the algebra of a non-flat entry is reported through the trace only
    if !matches!(label, GeometryLabel::LieGroup(_)) {
        algebra = None;
    }
    t.0.push(TraceStep { question: "label".into(), value: None, branch: label.to_string() });
    Ok(DecisionTrace { label, algebra, trace: t.0 })
}

pub fn classify_geometry(spec: &GeometrySpec) -> Result<GeometryLabel> {
    Ok(decision_trace(spec)?.label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::algebras;

    #[test]
    fn catalog_round_trip() {
        for e in catalog::all_entries() {
            let spec = GeometrySpec::from_entry(&e).unwrap();
            assert_eq!(classify_geometry(&spec).unwrap(), e.label);
        }
    }

    #[test]
    fn nil_trace() {
        let e = catalog::entry(GeometryLabel::NilSO2).unwrap();
        let tr = decision_trace(&GeometrySpec::from_entry(&e).unwrap()).unwrap();
        let q: Vec<&str> = tr.trace.iter().map(|s| s.question.as_str()).collect();
        assert_eq!(q[0], "isotropy dimension");
        assert_eq!(q[1], "connection curvature |dω|");
        assert!((tr.trace[1].value.unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(tr.trace[2].value, Some(-1.0));
        assert_eq!(tr.trace.last().unwrap().branch, "NilSO2");
    }

    #[test]
    fn e3_trace() {
        let e = catalog::entry(GeometryLabel::E3).unwrap();
        let tr = decision_trace(&GeometrySpec::from_entry(&e).unwrap()).unwrap();
        assert_eq!(tr.trace[1].value, Some(0.0));
        assert_eq!(tr.label, GeometryLabel::E3);
    }

    #[test]
    fn missing_field_is_an_error() {
        let mut spec = GeometrySpec::warped(0.0, 0.0, 1.0).unwrap();
        spec.x_field = None;
        assert!(matches!(decision_trace(&spec), Err(Error::Missing(_))));
        let mut lg = GeometrySpec::lie_group(algebras::so3());
        lg.structure_constants = None;
        assert!(matches!(classify_geometry(&lg), Err(Error::Missing(_))));
    }

    #[test]
    fn warped_specs() {
        let l = |c, k, s| classify_geometry(&GeometrySpec::warped(c, k, s).unwrap()).unwrap();
        assert_eq!(l(0.0, 2.0, 1.0), GeometryLabel::E2SemiR);
        assert_eq!(l(0.0, 0.0, 4.0), GeometryLabel::E2xR);
        assert_eq!(l(1.0, 0.0, 1.0), GeometryLabel::S2xR);
        assert_eq!(l(-1.0, 0.0, 0.5), GeometryLabel::H2xR);
        assert!(matches!(
            classify_geometry(&GeometrySpec::warped(1.0, 1.0, 1.0).unwrap()),
            Err(Error::Inconsistent(_))
        ));
        assert!(matches!(
            classify_geometry(&GeometrySpec::warped(0.0, 1e-2, 1.0).unwrap()),
            Err(Error::Inconclusive { .. })
        ));
    }

    #[test]
    fn lie_group_specs() {
        let l = classify_geometry(&GeometrySpec::lie_group(algebras::heisenberg())).unwrap();
        assert!(matches!(l, GeometryLabel::LieGroup(Some(c)) if c.kind == AlgebraKind::Heisenberg));
    }

    #[test]
    fn scale_invariance() {
        for c in [0.1, 0.5, 3.0, 10.0] {
            for e in catalog::all_entries() {
                let s = e.clone().with_metric_scale(c).unwrap();
                assert_eq!(classify_geometry(&GeometrySpec::from_entry(&s).unwrap()).unwrap(), e.label);
            }
        }
    }

    #[test]
    fn json_specs() {
        let s: SpecJson = serde_json::from_str(r#"{"kind":"catalog","label":"E2SemiR","kappa":2.0}"#).unwrap();
        assert_eq!(classify_geometry(&GeometrySpec::from_json(&s).unwrap()).unwrap(), GeometryLabel::E2SemiR);
        let s: SpecJson = serde_json::from_str(r#"{"kind":"catalog","label":"E3","kappa":2.0}"#).unwrap();
        assert!(GeometrySpec::from_json(&s).is_err());
        let s: SpecJson =
            serde_json::from_str(r#"{"kind":"warped","base_curvature":-1.0,"kappa":0.0}"#).unwrap();
        assert_eq!(classify_geometry(&GeometrySpec::from_json(&s).unwrap()).unwrap(), GeometryLabel::H2xR);
    }
}
