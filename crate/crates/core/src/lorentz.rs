//! The forward light cone `{(x, y) : x >= |y|}` in `R^{1+q}`, the form
//! `eta = diag(1,..,1,-1,..,-1)` and the groups acting on the cone.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Signature data `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LorentzFrame {
    p: usize,
    q: usize,
}

impl LorentzFrame {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::Input("signature counts p and q must be positive".into()));
        }
        Ok(LorentzFrame { p, q })
    }

    /// `p = 1`: the Minkowski frame of the light cone.
    pub fn minkowski(q: usize) -> Result<Self> {
        Self::new(1, q)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    fn sign(&self, i: usize) -> f64 {
        if i < self.p {
            1.0
        } else {
            -1.0
        }
    }

    pub fn eta(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| if i == j { self.sign(i) } else { 0.0 })
    }

    /// `v^T eta w`.
    pub fn q_form(&self, v: &[f64], w: &[f64]) -> Result<f64> {
        Error::check_len(self.dim(), v.len())?;
        Error::check_len(self.dim(), w.len())?;
        Ok(v.iter().zip(w).enumerate().map(|(i, (a, b))| self.sign(i) * a * b).sum())
    }

    fn check_square(&self, a: &DMatrix<f64>) -> Result<()> {
        Error::check_len(self.dim(), a.nrows())?;
        Error::check_len(self.dim(), a.ncols())
    }

    /// Max-norm deviation of `A^T eta A` from `eta`.
    pub fn form_deviation(&self, a: &DMatrix<f64>) -> Result<f64> {
        self.check_square(a)?;
        let eta = self.eta();
        Ok(linalg::max_abs_diff(&(a.transpose() * &eta * a), &eta))
    }

    pub fn is_pseudo_orthogonal(&self, a: &DMatrix<f64>, tol: f64) -> Result<bool> {
        Ok(self.form_deviation(a)? <= tol)
    }

    /// `A_00 > 0` for a pseudo-orthogonal `A` with `p = 1`.
    pub fn is_orthochronous(&self, a: &DMatrix<f64>, tol: f64) -> Result<bool> {
        if self.p != 1 {
            return Err(Error::Input("orthochronous check needs p = 1".into()));
        }
        if !self.is_pseudo_orthogonal(a, tol)? {
            return Err(Error::Input("matrix is not pseudo-orthogonal".into()));
        }
        Ok(a[(0, 0)] > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeRegion {
    Interior,
    Boundary,
    ExteriorForwardComplement,
    Backward,
}

impl ConeRegion {
    /// Interior or boundary, i.e. in the closed forward cone.
    pub fn in_closed_cone(self) -> bool {
        matches!(self, ConeRegion::Interior | ConeRegion::Boundary)
    }
}

fn spatial_norm(v: &[f64]) -> f64 {
    linalg::norm(&v[1..])
}

/// Position of `v = (x, y)` relative to the forward cone with an absolute
/// boundary band `tol`.
pub fn lc_classify(q: usize, v: &[f64], tol: f64) -> Result<ConeRegion> {
    Error::check_len(q + 1, v.len())?;
    if tol < 0.0 {
        return Err(Error::Input("tolerance must be nonnegative".into()));
    }
    Ok(classify_unchecked(v, tol))
}

pub(crate) fn classify_unchecked(v: &[f64], tol: f64) -> ConeRegion {
    let x = v[0];
    let r = spatial_norm(v);
    let gap = x - r;
    if gap > tol {
        ConeRegion::Interior
    } else if gap.abs() <= tol {
        ConeRegion::Boundary
    } else if x < -tol && -x - r >= -tol {
        // -v lies in the closed forward cone.
        ConeRegion::Backward
    } else {
        ConeRegion::ExteriorForwardComplement
    }
}

/// The boost `a_t` in the plane of coordinates `0` and `spatial_axis`
/// (1-based, `1 <= spatial_axis <= q`).
pub fn boost(q: usize, t: f64, spatial_axis: usize) -> Result<DMatrix<f64>> {
    if spatial_axis == 0 || spatial_axis > q {
        return Err(Error::Input(format!(
            "boost axis {spatial_axis} out of range 1..={q}"
        )));
    }
    let mut m = DMatrix::identity(q + 1, q + 1);
    let (c, s) = (t.cosh(), t.sinh());
    m[(0, 0)] = c;
    m[(spatial_axis, spatial_axis)] = c;
    m[(0, spatial_axis)] = s;
    m[(spatial_axis, 0)] = s;
    Ok(m)
}

/// `diag(1, R)` for a spatial rotation `R`.
pub fn embed_rotation(r: &DMatrix<f64>) -> DMatrix<f64> {
    let q = r.nrows();
    let mut m = DMatrix::identity(q + 1, q + 1);
    m.view_mut((1, 1), (q, q)).copy_from(r);
    m
}

pub fn dilation(n: usize, lambda: f64) -> Result<DMatrix<f64>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Input(format!("dilation factor {lambda} must be positive")));
    }
    Ok(DMatrix::identity(n, n) * lambda)
}

/// A rotation in `SO(q)` taking `e_1` to the unit vector `u`: a Householder
/// reflection composed with a reflection fixing `e_1` so the determinant is
/// `+1`. For `q = 1` only `u = e_1` is reachable.
pub fn rotation_to(u: &[f64]) -> Result<DMatrix<f64>> {
    let q = u.len();
    let mut w = linalg::scale(u, -1.0);
    w[0] += 1.0;
    let wn = linalg::dot(&w, &w);
    if wn <= 1e-30 {
        return Ok(DMatrix::identity(q, q));
    }
    if q == 1 {
        return Err(Error::Domain("SO(1) cannot reverse the spatial axis".into()));
    }
    let wv = nalgebra::DVector::from_column_slice(&w);
    let h = DMatrix::identity(q, q) - (&wv * wv.transpose()) * (2.0 / wn);
    let mut fix = DMatrix::identity(q, q);
    fix[(q - 1, q - 1)] = -1.0;
    Ok(h * fix)
}

/// `v = lambda * diag(1, R) * boost(t, 1) * e_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitDecomposition {
    pub lambda: f64,
    pub rapidity: f64,
    pub rotation: DMatrix<f64>,
}

impl OrbitDecomposition {
    pub fn q(&self) -> usize {
        self.rotation.nrows()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let b = boost(self.q(), self.rapidity, 1).expect("axis 1 exists for q >= 1");
        embed_rotation(&self.rotation) * b * self.lambda
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        self.matrix().column(0).iter().cloned().collect()
    }
}

/// Factor an interior vector through the transitive action of
/// `SO_0(1,q) * R^+` on the open cone.
///
/// For `q = 1` the rotation is trivial and the rapidity carries the sign of
/// the spatial coordinate.
pub fn orbit_decompose(q: usize, v: &[f64], tol: f64) -> Result<OrbitDecomposition> {
    Error::check_len(q + 1, v.len())?;
    if lc_classify(q, v, tol)? != ConeRegion::Interior {
        return Err(Error::Domain("vector is not in the open forward cone".into()));
    }
    let x = v[0];
    let y = &v[1..];
    let r = linalg::norm(y);
    let lambda = ((x - r) * (x + r)).sqrt();
    let (rapidity, rotation) = if r == 0.0 {
        (0.0, DMatrix::identity(q, q))
    } else if q == 1 {
        ((y[0] / x).atanh(), DMatrix::identity(1, 1))
    } else {
        ((r / x).atanh(), rotation_to(&linalg::scale(y, 1.0 / r))?)
    };
    let d = OrbitDecomposition {
        lambda,
        rapidity,
        rotation,
    };
    let err = linalg::max_abs(&linalg::sub(&d.reconstruct(), v));
    if err > tol {
        return Err(Error::Numeric {
            message: "orbit reconstruction exceeds tolerance".into(),
            residual: err,
        });
    }
    Ok(d)
}
