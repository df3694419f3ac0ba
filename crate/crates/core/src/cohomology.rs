//! Chevalley–Eilenberg complex with trivial real coefficients in degrees
//! one to three, second cohomology, and central extensions by 2-cocycles.
//!
//! Cochain bases: `C¹` is indexed by `k`, `C²` by pairs `i < j` and `C³` by
//! triples `i < j < k`, all in lexicographic order.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::StructureConstants;
use crate::linalg;

/// An antisymmetric bilinear form on the algebra `base`,
/// `omega(e_i, e_j) = matrix[(i, j)]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CocycleJson", into = "CocycleJson")]
pub struct TwoCocycle {
    base: StructureConstants,
    matrix: DMatrix<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleJson {
    pub base: StructureConstants,
    pub matrix: Vec<Vec<f64>>,
}

impl TwoCocycle {
    /// Wraps an antisymmetric matrix; closedness is checked separately.
    pub fn new(base: StructureConstants, matrix: DMatrix<f64>) -> Result<Self> {
        let n = base.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.nrows() });
        }
        let dev = linalg::max_abs(&(&matrix + matrix.transpose()));
        if dev > linalg::scaled_tol(linalg::max_abs(&matrix)) {
            return Err(Error::NotAntisymmetric(dev));
        }
        Ok(Self { base, matrix })
    }

    /// Cocycle with `omega(e_i, e_j) = -omega(e_j, e_i) = value` for each entry.
    pub fn from_entries(base: StructureConstants, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let n = base.dim();
        let mut m = DMatrix::zeros(n, n);
        for &(i, j, v) in entries {
            if i >= n || j >= n || i == j {
                return Err(Error::Malformed(format!("cocycle entry ({i}, {j}) out of range")));
            }
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
        Self::new(base, m)
    }

    pub fn zero(base: StructureConstants) -> Self {
        let n = base.dim();
        Self { base, matrix: DMatrix::zeros(n, n) }
    }

    fn from_pair_vector(base: StructureConstants, v: &DVector<f64>) -> Self {
        let n = base.dim();
        let mut m = DMatrix::zeros(n, n);
        for (p, (i, j)) in pairs(n).into_iter().enumerate() {
            m[(i, j)] = v[p];
            m[(j, i)] = -v[p];
        }
        Self { base, matrix: m }
    }

    /// Coordinates in the `C²` pair basis.
    pub fn to_pair_vector(&self) -> DVector<f64> {
        let ps = pairs(self.base.dim());
        DVector::from_iterator(ps.len(), ps.iter().map(|&(i, j)| self.matrix[(i, j)]))
    }

    pub fn base(&self) -> &StructureConstants {
        &self.base
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.matrix * y)[(0, 0)]
    }

    /// Largest violation of `ω([x,y],z) + ω([y,z],x) + ω([z,x],y) = 0` over
    /// basis triples.
    pub fn cocycle_residual(&self) -> f64 {
        let d = ce_differential(&self.base, 2).expect("degree 2 is supported");
        (d * self.to_pair_vector()).amax()
    }

    pub fn is_closed(&self) -> bool {
        self.cocycle_residual() <= self.tolerance()
    }

    fn tolerance(&self) -> f64 {
        linalg::scaled_tol(self.base.norm_inf().max(1.0) * linalg::max_abs(&self.matrix))
    }

    /// Pulls the form back along the basis change whose new basis vectors are
    /// the columns of `t`, matching [`StructureConstants::change_basis`].
    pub fn change_basis(&self, t: &DMatrix<f64>) -> Result<Self> {
        let base = self.base.change_basis(t)?;
        Ok(Self { base, matrix: t.transpose() * &self.matrix * t })
    }
}

impl TryFrom<CocycleJson> for TwoCocycle {
    type Error = Error;

    fn try_from(j: CocycleJson) -> Result<Self> {
        let n = j.base.dim();
        if j.matrix.len() != n || j.matrix.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: j.matrix.len() });
        }
        let m = DMatrix::from_fn(n, n, |r, c| j.matrix[r][c]);
        Self::new(j.base, m)
    }
}

impl From<TwoCocycle> for CocycleJson {
    fn from(c: TwoCocycle) -> Self {
        let n = c.matrix.nrows();
        let matrix = (0..n).map(|r| (0..n).map(|s| c.matrix[(r, s)]).collect()).collect();
        Self { base: c.base, matrix }
    }
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push((i, j, k));
            }
        }
    }
    out
}

/// Matrix of the differential `C^degree → C^{degree+1}` in the canonical
/// cochain bases. Degrees 1 and 2 are supported.
pub fn ce_differential(sc: &StructureConstants, degree: usize) -> Result<DMatrix<f64>> {
    let n = sc.dim();
    match degree {
        1 => {
            // (dφ)(e_i, e_j) = -φ([e_i, e_j])
            let ps = pairs(n);
            Ok(DMatrix::from_fn(ps.len(), n, |p, k| -sc.get(ps[p].0, ps[p].1, k)))
        }
        2 => {
            let ps = pairs(n);
            let ts = triples(n);
            let mut d = DMatrix::zeros(ts.len(), ps.len());
            for (col, &(p, q)) in ps.iter().enumerate() {
                // ω = e^p ∧ e^q as an antisymmetric matrix
                let w = |a: usize, b: usize| -> f64 {
                    if (a, b) == (p, q) {
                        1.0
                    } else if (a, b) == (q, p) {
                        -1.0
                    } else {
                        0.0
                    }
                };
                for (row, &(a, b, c)) in ts.iter().enumerate() {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += sc.get(a, b, k) * w(k, c)
                            + sc.get(b, c, k) * w(k, a)
                            + sc.get(c, a, k) * w(k, b);
                    }
                    d[(row, col)] = -s;
                }
            }
            Ok(d)
        }
        other => Err(Error::UnsupportedDegree(other)),
    }
}

#[derive(Clone, Debug)]
pub struct CohomologyResult {
    pub betti2: usize,
    pub representatives: Vec<TwoCocycle>,
    pub coboundary_rank: usize,
    pub cocycle_rank: usize,
}

/// Second cohomology `H²(g; ℝ)` for algebras of dimension at most 4.
pub fn h2(sc: &StructureConstants) -> Result<CohomologyResult> {
    let n = sc.dim();
    if n > 4 {
        return Err(Error::Unsupported(format!("H² is computed up to dimension 4, got {n}")));
    }
    let tol = sc.tolerance();
    let d1 = ce_differential(sc, 1)?;
    let d2 = ce_differential(sc, 2)?;
    let kernel = linalg::null_space(&d2, tol);
    let image = linalg::column_space(&d1, tol);
    let cocycle_rank = kernel.len();
    let coboundary_rank = image.len();

    let residues: Vec<DVector<f64>> = kernel.iter().map(|v| linalg::reject(v, &image)).collect();
    let reps = if residues.is_empty() {
        Vec::new()
    } else {
        let m = DMatrix::from_columns(&residues);
        linalg::column_space(&m, 1e-8)
    };
    let representatives = reps
        .into_iter()
        .map(|v| {
            let lead = v.iter().copied().find(|x| x.abs() > 1e-8).unwrap_or(1.0);
            TwoCocycle::from_pair_vector(sc.clone(), &(v / lead))
        })
        .collect::<Vec<_>>();

    Ok(CohomologyResult {
        betti2: cocycle_rank - coboundary_rank,
        representatives,
        coboundary_rank,
        cocycle_rank,
    })
}

/// `ℝ ×_ω g`: basis `(e_0, e_1, …, e_n)` with `e_0` central and
/// `[e_{i+1}, e_{j+1}] = [e_i, e_j]_g + ω(e_i, e_j) e_0`.
pub fn central_extension(sc: &StructureConstants, omega: &TwoCocycle) -> Result<StructureConstants> {
    if omega.base != *sc {
        return Err(Error::Malformed("cocycle is defined over a different algebra".into()));
    }
    let r = omega.cocycle_residual();
    if r > omega.tolerance() {
        return Err(Error::CocycleViolation(r));
    }
    let n = sc.dim();
    let mut brackets = Vec::new();
    for (i, j) in pairs(n) {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[0] = omega.matrix[(i, j)];
        for k in 0..n {
            coeffs[k + 1] = sc.get(i, j, k);
        }
        brackets.push((i + 1, j + 1, coeffs));
    }
    StructureConstants::from_brackets(n + 1, &brackets)
}

/// Whether `a` and `b` define weakly isomorphic central extensions. Only the
/// case `betti2 ≤ 1` is decided.
pub fn weakly_isomorphic(sc: &StructureConstants, a: &TwoCocycle, b: &TwoCocycle) -> Result<bool> {
    if sc.dim() != 3 {
        return Err(Error::Unsupported("weak isomorphism is decided in dimension 3".into()));
    }
    for w in [a, b] {
        if w.base != *sc {
            return Err(Error::Malformed("cocycle is defined over a different algebra".into()));
        }
        let r = w.cocycle_residual();
        if r > w.tolerance() {
            return Err(Error::CocycleViolation(r));
        }
    }
    let h = h2(sc)?;
    if h.betti2 > 1 {
        return Err(Error::Unsupported(format!(
            "second Betti number {} > 1; weak isomorphism needs the automorphism action",
            h.betti2
        )));
    }
    let image = linalg::column_space(&ce_differential(sc, 1)?, sc.tolerance());
    let is_zero = |w: &TwoCocycle| {
        let v = w.to_pair_vector();
        linalg::reject(&v, &image).amax() <= linalg::scaled_tol(v.amax())
    };
    Ok(is_zero(a) == is_zero(b))
}
