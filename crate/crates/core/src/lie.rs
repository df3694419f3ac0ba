//! Structure constants of finite-dimensional real Lie algebras and the
//! classification of three-dimensional ones by the dimension of the derived
//! algebra.
//!
//! Constants are stored as `c[i][j][k]`, the coefficient of `e_k` in
//! `[e_i, e_j]`. Dimensions 2 through 6 are accepted so that four-dimensional
//! central extensions flow through the same type.

use std::fmt;

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, scaled_tol};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StructureConstantsJson", into = "StructureConstantsJson")]
pub struct StructureConstants {
    dim: usize,
    c: Vec<f64>,
}

/// One bracket `[e_i, e_j]` with `i < j`, as stored on disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketJson {
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConstantsJson {
    pub dim: usize,
    pub brackets: Vec<BracketJson>,
}

impl StructureConstants {
    pub const MIN_DIM: usize = 2;
    pub const MAX_DIM: usize = 6;

    pub fn zero(dim: usize) -> Result<Self> {
        if !(Self::MIN_DIM..=Self::MAX_DIM).contains(&dim) {
            return Err(Error::InvalidDimension(dim, Self::MIN_DIM, Self::MAX_DIM));
        }
        Ok(Self { dim, c: vec![0.0; dim * dim * dim] })
    }

    /// Builds constants from the brackets `[e_i, e_j]` with `i < j`; the
    /// antisymmetric completion is filled in. Jacobi is not checked here.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, Vec<f64>)]) -> Result<Self> {
        let mut sc = Self::zero(dim)?;
        let mut seen = std::collections::BTreeSet::new();
        for (i, j, coeffs) in brackets {
            let (i, j) = (*i, *j);
            if i >= j || j >= dim {
                return Err(Error::Malformed(format!(
                    "bracket indices ({i}, {j}) must satisfy i < j < {dim}"
                )));
            }
            if coeffs.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: coeffs.len() });
            }
            if !seen.insert((i, j)) {
                return Err(Error::Malformed(format!("bracket ({i}, {j}) given twice")));
            }
            for (k, &v) in coeffs.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Malformed("non-finite structure constant".into()));
                }
                sc.set(i, j, k, v);
                sc.set(j, i, k, -v);
            }
        }
        Ok(sc)
    }

    /// Builds constants from a full `c[i][j][k]` generator, checking
    /// antisymmetry.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut sc = Self::zero(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    sc.set(i, j, k, f(i, j, k));
                }
            }
        }
        let dev = sc.antisymmetry_defect();
        if dev > scaled_tol(sc.norm_inf()) {
            return Err(Error::NotAntisymmetric(dev));
        }
        Ok(sc)
    }

    /// Returns `self` if the Jacobi identity holds within tolerance.
    pub fn validated(self) -> Result<Self> {
        let r = jacobi_residual(&self);
        if r > self.tolerance() {
            return Err(Error::NotLieAlgebra(r));
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[self.idx(i, j, k)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.idx(i, j, k);
        self.c[n] = v;
    }

    /// `[e_i, e_j]` as a coefficient vector.
    pub fn basis_bracket(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_fn(self.dim, |k, _| self.get(i, j, k))
    }

    pub fn norm_inf(&self) -> f64 {
        self.c.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Working tolerance: 1e-9 scaled by the ∞-norm of the constants.
    pub fn tolerance(&self) -> f64 {
        scaled_tol(self.norm_inf())
    }

    fn antisymmetry_defect(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    dev = dev.max((self.get(i, j, k) + self.get(j, i, k)).abs());
                }
            }
        }
        dev
    }

    /// Matrix of `ad_{e_i}`: column `j` holds `[e_i, e_j]`.
    pub fn ad(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |k, j| self.get(i, j, k))
    }

    pub fn ad_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            if x[i] != 0.0 {
                m += self.ad(i) * x[i];
            }
        }
        m
    }

    /// Push-forward to the basis whose vectors are the columns of `t`.
    pub fn change_basis(&self, t: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim;
        if t.nrows() != n || t.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: t.nrows() });
        }
        let tinv = t
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Malformed("basis change matrix is singular".into()))?;
        let mut out = Self::zero(n)?;
        for a in 0..n {
            for b in 0..n {
                let x = t.column(a).into_owned();
                let y = t.column(b).into_owned();
                let br = &tinv * bracket_unchecked(self, &x, &y);
                for d in 0..n {
                    out.set(a, b, d, br[d]);
                }
            }
        }
        Ok(out)
    }

    /// Quotient by the span of the basis vector `index`, which must be an ideal
    /// spanned by a central element; the remaining basis keeps its order.
    pub fn quotient_by_basis_vector(&self, index: usize) -> Result<Self> {
        let n = self.dim;
        if index >= n {
            return Err(Error::DimensionMismatch { expected: n, got: index });
        }
        let keep: Vec<usize> = (0..n).filter(|&k| k != index).collect();
        let mut out = Self::zero(n - 1)?;
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                for (d, &k) in keep.iter().enumerate() {
                    out.set(a, b, d, self.get(i, j, k));
                }
            }
        }
        Ok(out)
    }
}

impl TryFrom<StructureConstantsJson> for StructureConstants {
    type Error = Error;

    fn try_from(j: StructureConstantsJson) -> Result<Self> {
        let br: Vec<_> = j.brackets.into_iter().map(|b| (b.i, b.j, b.coeffs)).collect();
        Self::from_brackets(j.dim, &br)?.validated()
    }
}

impl From<StructureConstants> for StructureConstantsJson {
    fn from(sc: StructureConstants) -> Self {
        let mut brackets = Vec::new();
        for i in 0..sc.dim {
            for j in i + 1..sc.dim {
                let coeffs: Vec<f64> = (0..sc.dim).map(|k| sc.get(i, j, k)).collect();
                if coeffs.iter().any(|&v| v != 0.0) {
                    brackets.push(BracketJson { i, j, coeffs });
                }
            }
        }
        Self { dim: sc.dim, brackets }
    }
}

fn bracket_unchecked(sc: &StructureConstants, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    let n = sc.dim;
    let mut out = DVector::zeros(n);
    for i in 0..n {
        if x[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            let w = x[i] * y[j];
            if w == 0.0 {
                continue;
            }
            for k in 0..n {
                out[k] += w * sc.get(i, j, k);
            }
        }
    }
    out
}

/// `[x, y]` for coefficient vectors in the basis of `sc`.
pub fn bracket(sc: &StructureConstants, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    for v in [x, y] {
        if v.len() != sc.dim {
            return Err(Error::DimensionMismatch { expected: sc.dim, got: v.len() });
        }
    }
    Ok(bracket_unchecked(sc, x, y))
}

/// Largest ∞-norm of the cyclic Jacobi sum over basis triples.
pub fn jacobi_residual(sc: &StructureConstants) -> f64 {
    let n = sc.dim;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    // coefficient of e_m in [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]
                    let mut s = 0.0;
                    for l in 0..n {
                        s += sc.get(j, k, l) * sc.get(i, l, m)
                            + sc.get(k, i, l) * sc.get(j, l, m)
                            + sc.get(i, j, l) * sc.get(k, l, m);
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

#[derive(Clone, Debug)]
pub struct DerivedAlgebra {
    pub dim: usize,
    /// Orthonormal (standard inner product on coefficients) basis of `[g, g]`.
    pub basis: Vec<DVector<f64>>,
}

fn bracket_matrix(sc: &StructureConstants) -> DMatrix<f64> {
    let n = sc.dim;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    DMatrix::from_fn(n, pairs.len(), |k, p| sc.get(pairs[p].0, pairs[p].1, k))
}

pub fn derived_algebra(sc: &StructureConstants) -> DerivedAlgebra {
    let basis = linalg::column_space(&bracket_matrix(sc), sc.tolerance());
    DerivedAlgebra { dim: basis.len(), basis }
}

pub fn is_unimodular(sc: &StructureConstants) -> bool {
    let tol = sc.tolerance();
    (0..sc.dim).all(|i| sc.ad(i).trace().abs() <= tol)
}

/// `K_ij = tr(ad_i ∘ ad_j)`.
pub fn killing_form(sc: &StructureConstants) -> DMatrix<f64> {
    let ads: Vec<DMatrix<f64>> = (0..sc.dim).map(|i| sc.ad(i)).collect();
    DMatrix::from_fn(sc.dim, sc.dim, |i, j| (&ads[i] * &ads[j]).trace())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolvableForm {
    /// `ad_{e_3}|g'` diagonalizable over the reals, eigenvalues `{1, a}`, `|a| ≤ 1`.
    RealDiag,
    /// Eigenvalues `α ± iβ`; parameter `|α| / |β|`.
    Complex,
    /// Single non-semisimple eigenvalue, normal form `[[1, 1], [0, 1]]`.
    Jordan,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum AlgebraKind {
    Abelian,
    Heisenberg,
    H2xR,
    Solvable2 { form: SolvableForm, param: f64 },
    SO3,
    SL2R,
}

impl AlgebraKind {
    pub fn same_as(&self, other: &AlgebraKind, tol: f64) -> bool {
        match (self, other) {
            (
                AlgebraKind::Solvable2 { form: f1, param: p1 },
                AlgebraKind::Solvable2 { form: f2, param: p2 },
            ) => f1 == f2 && (p1 - p2).abs() <= tol,
            (a, b) => a == b,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraClass {
    #[serde(flatten)]
    pub kind: AlgebraKind,
    pub unimodular: bool,
    pub derived_dim: usize,
}

impl fmt::Display for AlgebraClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AlgebraKind::Solvable2 { form, param } => write!(f, "Solvable2({form:?}, {param})"),
            k => write!(f, "{k:?}"),
        }
    }
}

/// Tolerance on the canonical-form parameter when comparing classes.
pub const PARAM_TOL: f64 = 1e-6;

fn classify_solvable(sc: &StructureConstants, derived: &DerivedAlgebra) -> AlgebraKind {
    let u1 = &derived.basis[0];
    let u2 = &derived.basis[1];
    let e3 = {
        let a = nalgebra::Vector3::new(u1[0], u1[1], u1[2]);
        let b = nalgebra::Vector3::new(u2[0], u2[1], u2[2]);
        let c = a.cross(&b);
        DVector::from_column_slice(c.as_slice())
    };
    let ad = sc.ad_of(&e3);
    let us = [u1, u2];
    let a = Matrix2::from_fn(|r, s| us[r].dot(&(&ad * us[s])));

    let scale = a.norm();
    let tr = a.trace();
    let det = a.determinant();
    let disc = tr * tr - 4.0 * det;
    let tol = 1e-9 * scale * scale;
    if disc > tol {
        let sq = disc.sqrt();
        let (l1, l2) = ((tr + sq) / 2.0, (tr - sq) / 2.0);
        let (big, small) = if l1.abs() >= l2.abs() { (l1, l2) } else { (l2, l1) };
        AlgebraKind::Solvable2 { form: SolvableForm::RealDiag, param: small / big }
    } else if disc < -tol {
        let alpha = tr / 2.0;
        let beta = (-disc).sqrt() / 2.0;
        AlgebraKind::Solvable2 { form: SolvableForm::Complex, param: alpha.abs() / beta }
    } else {
        let lambda = tr / 2.0;
        let nil = a - Matrix2::identity() * lambda;
        if nil.norm() <= 1e-6 * scale {
            AlgebraKind::Solvable2 { form: SolvableForm::RealDiag, param: 1.0 }
        } else {
            AlgebraKind::Solvable2 { form: SolvableForm::Jordan, param: 1.0 }
        }
    }
}

/// Classifies a three-dimensional real Lie algebra.
pub fn classify_algebra(sc: &StructureConstants) -> Result<AlgebraClass> {
    if sc.dim != 3 {
        return Err(Error::Unsupported(format!(
            "classification is implemented for dimension 3, got {}",
            sc.dim
        )));
    }
    let r = jacobi_residual(sc);
    if r > sc.tolerance() {
        return Err(Error::NotLieAlgebra(r));
    }
    let tol = sc.tolerance();
    let derived = derived_algebra(sc);
    let kind = match derived.dim {
        0 => AlgebraKind::Abelian,
        1 => {
            let z = &derived.basis[0];
            let central = (0..3).all(|i| {
                let e = linalg::unit(3, i);
                bracket_unchecked(sc, z, &e).amax() <= tol
            });
            if central {
                AlgebraKind::Heisenberg
            } else {
                AlgebraKind::H2xR
            }
        }
        2 => classify_solvable(sc, &derived),
        _ => {
            let k = killing_form(sc);
            let eig = SymmetricEigen::new(k);
            if eig.eigenvalues.iter().all(|&l| l < 0.0) {
                AlgebraKind::SO3
            } else {
                AlgebraKind::SL2R
            }
        }
    };
    Ok(AlgebraClass { kind, unimodular: is_unimodular(sc), derived_dim: derived.dim })
}

pub fn isomorphic(a: &StructureConstants, b: &StructureConstants) -> Result<bool> {
    let ca = classify_algebra(a)?;
    let cb = classify_algebra(b)?;
    Ok(ca.kind.same_as(&cb.kind, PARAM_TOL))
}

/// Named algebras used throughout the crate and its tests.
pub mod algebras {
    use super::StructureConstants;

    fn build(dim: usize, br: &[(usize, usize, &[f64])]) -> StructureConstants {
        let v: Vec<_> = br.iter().map(|(i, j, c)| (*i, *j, c.to_vec())).collect();
        StructureConstants::from_brackets(dim, &v).expect("static constants are well formed")
    }

    pub fn abelian(dim: usize) -> StructureConstants {
        StructureConstants::zero(dim).expect("dimension in range")
    }

    /// `[e_0, e_1] = e_2`.
    pub fn heisenberg() -> StructureConstants {
        build(3, &[(0, 1, &[0.0, 0.0, 1.0])])
    }

    /// `[e_0, e_1] = e_1`, `e_2` central.
    pub fn h2_x_r() -> StructureConstants {
        build(3, &[(0, 1, &[0.0, 1.0, 0.0])])
    }

    /// `[e_2, e_0] = e_0`, `[e_2, e_1] = 2 e_1`.
    pub fn solvable_diag_half() -> StructureConstants {
        solvable(&[[1.0, 0.0], [0.0, 2.0]])
    }

    /// Semidirect product `R^2 ⋊ R` with `ad_{e_2}|span(e_0,e_1) = m`.
    pub fn solvable(m: &[[f64; 2]; 2]) -> StructureConstants {
        // [e_2, e_b] = Σ_a m[a][b] e_a, so [e_b, e_2] = -Σ_a m[a][b] e_a
        build(
            3,
            &[
                (0, 2, &[-m[0][0], -m[1][0], 0.0]),
                (1, 2, &[-m[0][1], -m[1][1], 0.0]),
            ],
        )
    }

    /// Euclidean motions of the plane: translations `e_0, e_1`, rotation `e_2`
    /// with `[e_0, e_2] = -e_1`, `[e_1, e_2] = e_0`.
    pub fn e2() -> StructureConstants {
        build(3, &[(0, 2, &[0.0, -1.0, 0.0]), (1, 2, &[1.0, 0.0, 0.0])])
    }

    /// `[e_0, e_1] = e_2`, `[e_1, e_2] = e_0`, `[e_2, e_0] = e_1`.
    pub fn so3() -> StructureConstants {
        build(
            3,
            &[
                (0, 1, &[0.0, 0.0, 1.0]),
                (0, 2, &[0.0, -1.0, 0.0]),
                (1, 2, &[1.0, 0.0, 0.0]),
            ],
        )
    }

    /// Boosts `e_0, e_1` and rotation `e_2`: `[e_0, e_1] = -e_2`,
    /// `[e_1, e_2] = e_0`, `[e_2, e_0] = e_1`.
    pub fn sl2r() -> StructureConstants {
        build(
            3,
            &[
                (0, 1, &[0.0, 0.0, -1.0]),
                (0, 2, &[0.0, -1.0, 0.0]),
                (1, 2, &[1.0, 0.0, 0.0]),
            ],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::algebras::*;
    use super::*;

    fn e(i: usize) -> DVector<f64> {
        linalg::unit(3, i)
    }

    #[test]
    fn bracket_is_antisymmetric_and_checks_dimension() {
        let sc = so3();
        let x = DVector::from_vec(vec![0.3, -1.0, 2.0]);
        assert!(bracket(&sc, &x, &x).unwrap().amax() == 0.0);
        let y = DVector::from_vec(vec![1.0, 0.5, 0.0]);
        let xy = bracket(&sc, &x, &y).unwrap();
        let yx = bracket(&sc, &y, &x).unwrap();
        assert!((xy + yx).amax() < 1e-15);
        assert!(matches!(
            bracket(&sc, &x, &DVector::zeros(4)),
            Err(Error::DimensionMismatch { .. })
        ));
        let ab = abelian(3);
        assert_eq!(bracket(&ab, &x, &y).unwrap().amax(), 0.0);
    }

    #[test]
    fn from_brackets_rejects_bad_indices() {
        assert!(StructureConstants::from_brackets(3, &[(1, 0, vec![0.0; 3])]).is_err());
        assert!(StructureConstants::from_brackets(3, &[(0, 3, vec![0.0; 3])]).is_err());
        assert!(StructureConstants::from_brackets(3, &[(0, 1, vec![0.0; 2])]).is_err());
        assert!(StructureConstants::zero(7).is_err());
        assert!(StructureConstants::zero(1).is_err());
    }

    #[test]
    fn from_fn_rejects_non_antisymmetric() {
        let r = StructureConstants::from_fn(3, |i, j, k| if (i, j, k) == (0, 1, 2) { 1.0 } else { 0.0 });
        assert!(matches!(r, Err(Error::NotAntisymmetric(_))));
    }

    #[test]
    fn derived_dimensions() {
        assert_eq!(derived_algebra(&abelian(3)).dim, 0);
        assert_eq!(derived_algebra(&heisenberg()).dim, 1);
        assert_eq!(derived_algebra(&e2()).dim, 2);
        assert_eq!(derived_algebra(&so3()).dim, 3);
        assert_eq!(derived_algebra(&sl2r()).dim, 3);
    }

    #[test]
    fn unimodularity() {
        assert!(is_unimodular(&so3()));
        assert!(is_unimodular(&e2()));
        assert!(is_unimodular(&heisenberg()));
        assert!(!is_unimodular(&h2_x_r()));
        assert!((h2_x_r().ad(0).trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn killing_forms() {
        assert_eq!(linalg::max_abs(&killing_form(&abelian(3))), 0.0);
        let k = killing_form(&so3());
        assert!((k + DMatrix::identity(3, 3) * 2.0).amax() < 1e-14);
        let eig = SymmetricEigen::new(killing_form(&sl2r())).eigenvalues;
        let pos = eig.iter().filter(|&&l| l > 0.0).count();
        let neg = eig.iter().filter(|&&l| l < 0.0).count();
        assert_eq!((pos, neg), (2, 1));
    }

    #[test]
    fn classification_examples() {
        let c = classify_algebra(&abelian(3)).unwrap();
        assert_eq!(c.kind, AlgebraKind::Abelian);
        assert!(c.unimodular);

        let c = classify_algebra(&heisenberg()).unwrap();
        assert_eq!(c.kind, AlgebraKind::Heisenberg);
        assert!(c.unimodular);
        assert_eq!(c.derived_dim, 1);

        let c = classify_algebra(&h2_x_r()).unwrap();
        assert_eq!(c.kind, AlgebraKind::H2xR);
        assert!(!c.unimodular);

        let c = classify_algebra(&solvable_diag_half()).unwrap();
        match c.kind {
            AlgebraKind::Solvable2 { form: SolvableForm::RealDiag, param } => {
                assert!((param - 0.5).abs() < 1e-12)
            }
            k => panic!("unexpected {k:?}"),
        }
        assert!(!c.unimodular);

        let c = classify_algebra(&e2()).unwrap();
        assert_eq!(c.kind, AlgebraKind::Solvable2 { form: SolvableForm::Complex, param: 0.0 });
        assert!(c.unimodular);

        assert_eq!(classify_algebra(&so3()).unwrap().kind, AlgebraKind::SO3);
        assert_eq!(classify_algebra(&sl2r()).unwrap().kind, AlgebraKind::SL2R);
    }

    #[test]
    fn solvable_normal_forms() {
        let sol = classify_algebra(&solvable(&[[1.0, 0.0], [0.0, -1.0]])).unwrap();
        assert_eq!(sol.kind, AlgebraKind::Solvable2 { form: SolvableForm::RealDiag, param: -1.0 });
        assert!(sol.unimodular);

        let jordan = classify_algebra(&solvable(&[[3.0, 1.0], [0.0, 3.0]])).unwrap();
        assert_eq!(jordan.kind, AlgebraKind::Solvable2 { form: SolvableForm::Jordan, param: 1.0 });

        let scalar = classify_algebra(&solvable(&[[-2.0, 0.0], [0.0, -2.0]])).unwrap();
        assert_eq!(scalar.kind, AlgebraKind::Solvable2 { form: SolvableForm::RealDiag, param: 1.0 });

        // eigenvalues 1 ± 2i
        let cx = classify_algebra(&solvable(&[[1.0, -2.0], [2.0, 1.0]])).unwrap();
        match cx.kind {
            AlgebraKind::Solvable2 { form: SolvableForm::Complex, param } => {
                assert!((param - 0.5).abs() < 1e-12)
            }
            k => panic!("unexpected {k:?}"),
        }
        // the sign of e_3 does not matter
        let neg = classify_algebra(&solvable(&[[-1.0, 0.0], [0.0, -2.0]])).unwrap();
        assert!(neg.kind.same_as(&classify_algebra(&solvable_diag_half()).unwrap().kind, 1e-12));
    }

    #[test]
    fn non_lie_is_rejected() {
        // [e0,e1] = e0 + e2 with [e0,e2] = e1 violates Jacobi
        let sc = StructureConstants::from_brackets(
            3,
            &[(0, 1, vec![1.0, 0.0, 1.0]), (0, 2, vec![0.0, 1.0, 0.0])],
        )
        .unwrap();
        assert!(jacobi_residual(&sc) > 0.1);
        assert!(matches!(classify_algebra(&sc), Err(Error::NotLieAlgebra(_))));
        assert!(sc.validated().is_err());
    }

    #[test]
    fn isomorphism_examples() {
        let t = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.5, -1.0, 1.0, 0.0, 0.3, 2.0]);
        let so3b = so3().change_basis(&t).unwrap();
        assert!(isomorphic(&so3(), &so3b).unwrap());

        let h2 = StructureConstants::from_brackets(3, &[(0, 1, vec![0.0, 0.0, 2.0])]).unwrap();
        assert!(isomorphic(&heisenberg(), &h2).unwrap());
        assert!(!isomorphic(&so3(), &sl2r()).unwrap());
    }

    #[test]
    fn change_basis_pushes_brackets_forward() {
        // swapping e0 and e1 in the Heisenberg algebra flips the sign of the bracket
        let t = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let h = heisenberg().change_basis(&t).unwrap();
        assert_eq!(h.basis_bracket(0, 1), -e(2));
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let sc = e2();
        let s = serde_json::to_string(&sc).unwrap();
        assert!(s.contains("\"dim\":3"));
        let back: StructureConstants = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sc);

        let bad = r#"{"dim":3,"brackets":[{"i":1,"j":0,"coeffs":[0,0,1]}]}"#;
        assert!(serde_json::from_str::<StructureConstants>(bad).is_err());
        let not_lie =
            r#"{"dim":3,"brackets":[{"i":0,"j":1,"coeffs":[1,0,1]},{"i":0,"j":2,"coeffs":[0,1,0]}]}"#;
        assert!(serde_json::from_str::<StructureConstants>(not_lie).is_err());
    }

    #[test]
    fn quotient_drops_basis_vector() {
        let sc = StructureConstants::from_brackets(
            4,
            &[(1, 2, vec![1.0, 0.0, 0.0, 0.0]), (1, 3, vec![0.0, 0.0, -1.0, 0.0]), (2, 3, vec![0.0, 1.0, 0.0, 0.0])],
        )
        .unwrap();
        assert_eq!(sc.quotient_by_basis_vector(0).unwrap(), e2());
    }
}
