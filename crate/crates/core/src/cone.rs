//! Finitely generated closed convex cones in `R^n`.
//!
//! A cone carries a V-representation (generators, nonnegative combinations)
//! and optionally an H-representation (normals `h` with `h . x >= 0`).
//! Duals swap the roles: the generators of `C` are the normals of `C*`, and
//! the generators of `C*` are synthesized by double description.

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use crate::dd;
use crate::error::{Error, Result};
use crate::linalg;
use crate::nnls;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeTolerances {
    /// Residual bound for feasibility (membership) solves.
    pub feasibility: f64,
    /// Max coordinate distance between unit rays considered equal.
    pub ray_equality: f64,
    /// Angular tolerance for deduplicating generators.
    pub angular: f64,
}

impl Default for ConeTolerances {
    fn default() -> Self {
        ConeTolerances {
            feasibility: 1e-9,
            ray_equality: 1e-8,
            angular: 1e-10,
        }
    }
}

/// Limits on V-representation synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualCaps {
    pub max_dim: usize,
    pub max_rays: usize,
}

impl Default for DualCaps {
    fn default() -> Self {
        DualCaps {
            max_dim: 6,
            max_rays: 64,
        }
    }
}

/// Working-list cap for the double description pass itself.
const DD_WORKING_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCone {
    dim: usize,
    generators: Vec<Vec<f64>>,
    normals: Option<Vec<Vec<f64>>>,
    has_vrep: bool,
}

fn check_vectors(dim: usize, vs: &[Vec<f64>]) -> Result<()> {
    for v in vs {
        Error::check_len(dim, v.len())?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("non-finite coordinate".into()));
        }
    }
    Ok(())
}

/// Drop zero vectors and positive multiples of earlier vectors.
fn dedup_rays(vs: &[Vec<f64>], angular: f64) -> Vec<Vec<f64>> {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let n = linalg::norm(v);
        if n == 0.0 {
            continue;
        }
        let u = linalg::scale(v, 1.0 / n);
        if dirs
            .iter()
            .any(|d| linalg::norm(&linalg::sub(d, &u)) <= angular)
        {
            continue;
        }
        dirs.push(u);
        kept.push(v.clone());
    }
    kept
}

impl ConvexCone {
    /// `Cone(S)`: nonnegative combinations of `generators`.
    pub fn new(dim: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerances(dim, generators, &ConeTolerances::default())
    }

    pub fn with_tolerances(dim: usize, generators: Vec<Vec<f64>>, tol: &ConeTolerances) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("cone dimension must be positive".into()));
        }
        check_vectors(dim, &generators)?;
        Ok(ConvexCone {
            dim,
            generators: dedup_rays(&generators, tol.angular),
            normals: None,
            has_vrep: true,
        })
    }

    /// `{x : h . x >= 0 for all normals h}` without a V-representation.
    pub fn from_normals(dim: usize, normals: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("cone dimension must be positive".into()));
        }
        check_vectors(dim, &normals)?;
        Ok(ConvexCone {
            dim,
            generators: Vec::new(),
            normals: Some(dedup_rays(&normals, ConeTolerances::default().angular)),
            has_vrep: false,
        })
    }

    /// Both representations. Every generator must satisfy every normal.
    pub fn from_parts(dim: usize, generators: Vec<Vec<f64>>, normals: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let mut c = Self::new(dim, generators)?;
        check_vectors(dim, &normals)?;
        for g in &c.generators {
            for h in &normals {
                if linalg::dot(g, h) < -tol * linalg::norm(g).max(1.0) * linalg::norm(h).max(1.0) {
                    return Err(Error::Input(
                        "generator violates a normal inequality".into(),
                    ));
                }
            }
        }
        c.normals = Some(dedup_rays(&normals, ConeTolerances::default().angular));
        Ok(c)
    }

    pub fn trivial(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn whole_space(dim: usize) -> Result<Self> {
        let gens = (0..dim)
            .flat_map(|i| {
                let e = linalg::unit(dim, i);
                [e.clone(), linalg::scale(&e, -1.0)]
            })
            .collect();
        Self::new(dim, gens)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Generators of the V-representation. Empty for an H-only cone.
    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn normals(&self) -> Option<&[Vec<f64>]> {
        self.normals.as_deref()
    }

    pub fn has_vrep(&self) -> bool {
        self.has_vrep
    }

    /// Distance from `x` to the cone for a V-represented cone, or the worst
    /// normal violation for an H-only cone.
    pub fn membership_residual(&self, x: &[f64]) -> Result<f64> {
        Error::check_len(self.dim, x.len())?;
        if self.has_vrep {
            let g = linalg::columns(self.dim, &self.generators);
            Ok(nnls::nnls(&g, x)?.residual)
        } else {
            let normals = self.normals.as_deref().unwrap_or(&[]);
            Ok(normals
                .iter()
                .map(|h| (-linalg::dot(h, x) / linalg::norm(h)).max(0.0))
                .fold(0.0, f64::max))
        }
    }

    pub fn member(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.membership_residual(x)? <= tol)
    }

    /// A copy guaranteed to carry a V-representation.
    pub fn with_vrep(&self, caps: &DualCaps) -> Result<Self> {
        if self.has_vrep {
            return Ok(self.clone());
        }
        let normals = self.normals.clone().unwrap_or_default();
        let gens = synthesize_generators(self.dim, &normals, caps)?;
        let mut c = Self::new(self.dim, gens)?;
        c.normals = Some(normals);
        Ok(c)
    }

    /// `C* = {x : (x, y) >= 0 for all y in C}`. Falls back to an H-only
    /// result when the V-representation would exceed the default caps.
    pub fn dual(&self) -> Result<Self> {
        self.dual_with(&DualCaps::default(), false)
    }

    /// Dual with explicit caps; `strict` turns cap overflow into an error.
    pub fn dual_with(&self, caps: &DualCaps, strict: bool) -> Result<Self> {
        if !self.has_vrep {
            // C = {x : Hx >= 0} so C* = Cone(rows of H).
            let normals = self.normals.clone().unwrap_or_default();
            return Self::new(self.dim, normals);
        }
        let normals = self.generators.clone();
        match synthesize_generators(self.dim, &normals, caps) {
            Ok(gens) => {
                let mut c = Self::new(self.dim, gens)?;
                c.normals = Some(normals);
                Ok(c)
            }
            Err(e @ Error::Capacity { .. }) if strict => Err(e),
            Err(Error::Capacity { .. }) => Self::from_normals(self.dim, normals),
            Err(e) => Err(e),
        }
    }

    /// Orthonormal bases of the edge `C ∩ -C` and the span `C - C`.
    pub fn edge_and_span(&self, tol: f64) -> Result<EdgeSpan> {
        let c = self.with_vrep(&DualCaps::default())?;
        let span = linalg::span_basis(c.dim, &c.generators);
        let mut lineal = Vec::new();
        for g in &c.generators {
            let neg = linalg::scale(g, -1.0);
            let r = c.membership_residual(&neg)?;
            if r <= tol * linalg::norm(g).max(1.0) {
                lineal.push(g.clone());
            }
        }
        let edge = linalg::span_basis(c.dim, &lineal);
        Ok(EdgeSpan { edge, span })
    }

    /// Generators that are not nonnegative combinations of the others.
    /// Meaningful as a canonical ray set for pointed cones.
    pub fn extreme_rays(&self, tol: f64) -> Result<Vec<Vec<f64>>> {
        let c = self.with_vrep(&DualCaps::default())?;
        let mut out = Vec::new();
        for (i, g) in c.generators.iter().enumerate() {
            let others: Vec<Vec<f64>> = c
                .generators
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| v.clone())
                .collect();
            let u = linalg::normalized(g);
            let res = nnls::nnls(&linalg::columns(c.dim, &others), &u)?.residual;
            if res > tol {
                out.push(u);
            }
        }
        Ok(out)
    }

    /// Radius of the largest ball (in the box `[-1,1]^n`) inside
    /// `{y : h . y >= 0}` for the given normals; positive iff the cone
    /// `{y : h . y >= 0}` has interior.
    pub fn chebyshev_radius(dim: usize, normals: &[Vec<f64>]) -> Result<f64> {
        chebyshev_radius(dim, normals)
    }

    pub fn classify(&self, tol: &ConeTolerances, caps: &DualCaps) -> Result<ConeReport> {
        let c = self.with_vrep(caps)?;
        let rank = linalg::rank(c.dim, &c.generators);
        let generating = rank == c.dim;
        let es = c.edge_and_span(tol.feasibility)?;
        let proper = es.edge.is_empty();
        // int(C*) nonempty, with the generators of C as the normals of C*.
        let radius = chebyshev_radius(c.dim, &c.generators)?;
        let pointed = radius > tol.feasibility;
        let dual = c.dual_with(caps, true)?;
        let dual_rank = linalg::rank(c.dim, dual.generators());
        let dual_generating = dual_rank == c.dim;
        if pointed != proper {
            return Err(Error::Consistency {
                check: "pointed <=> proper".into(),
                left: format!("pointed={pointed} (radius {radius:e})"),
                right: format!("proper={proper} (edge dim {})", es.edge.len()),
            });
        }
        if proper != dual_generating {
            return Err(Error::Consistency {
                check: "proper <=> dual generating".into(),
                left: format!("proper={proper}"),
                right: format!("dual_generating={dual_generating} (dual rank {dual_rank})"),
            });
        }
        let regular = generating && proper;
        let mut ray_gap = None;
        let self_dual = if regular {
            let mine = c.extreme_rays(tol.feasibility)?;
            let theirs: Vec<Vec<f64>> = dual.generators().iter().map(|g| linalg::normalized(g)).collect();
            let gap = ray_set_distance(&mine, &theirs, tol.ray_equality);
            ray_gap = gap;
            matches!(gap, Some(d) if d <= tol.ray_equality)
        } else {
            false
        };
        Ok(ConeReport {
            classification: ConeClassification {
                generating,
                pointed,
                proper,
                regular,
                self_dual,
            },
            diagnostics: ConeDiagnostics {
                rank,
                edge_dim: es.edge.len(),
                span_dim: es.span.len(),
                chebyshev_radius: radius,
                dual_rank,
                dual_ray_count: dual.generators().len(),
                self_dual_ray_gap: ray_gap,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpan {
    pub edge: Vec<Vec<f64>>,
    pub span: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeClassification {
    pub generating: bool,
    pub pointed: bool,
    pub proper: bool,
    pub regular: bool,
    pub self_dual: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDiagnostics {
    pub rank: usize,
    pub edge_dim: usize,
    pub span_dim: usize,
    pub chebyshev_radius: f64,
    pub dual_rank: usize,
    pub dual_ray_count: usize,
    /// Max distance between matched unit rays of `C` and `C*`, when the
    /// comparison applies and the ray counts agree.
    pub self_dual_ray_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    #[serde(flatten)]
    pub classification: ConeClassification,
    pub diagnostics: ConeDiagnostics,
}

/// Lexicographic order treating coordinates within `tol` as equal.
fn cmp_rays(a: &[f64], b: &[f64], tol: f64) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > tol {
            return x.total_cmp(y);
        }
    }
    std::cmp::Ordering::Equal
}

/// Sort both unit-ray sets canonically and return the max coordinate gap
/// between corresponding rays, or `None` if the counts differ.
pub fn ray_set_distance(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| cmp_rays(x, y, tol));
    b.sort_by(|x, y| cmp_rays(x, y, tol));
    Some(
        a.iter()
            .zip(&b)
            .map(|(x, y)| linalg::max_abs(&linalg::sub(x, y)))
            .fold(0.0, f64::max),
    )
}

/// Generators of `{x : h . x >= 0}`: lineality basis (both signs) plus the
/// extreme rays of the pointed part in the orthogonal complement.
fn synthesize_generators(dim: usize, normals: &[Vec<f64>], caps: &DualCaps) -> Result<Vec<Vec<f64>>> {
    if dim > caps.max_dim {
        return Err(Error::Capacity {
            what: "vertex enumeration dimension".into(),
            requested: dim,
            cap: caps.max_dim,
        });
    }
    let (row_space, lineality) = if normals.is_empty() {
        (Vec::new(), (0..dim).map(|i| linalg::unit(dim, i)).collect())
    } else {
        linalg::row_and_null_space(&linalg::rows(dim, normals))
    };
    let k = row_space.len();
    // Constraint rows in coordinates of the row space basis.
    let reduced: Vec<Vec<f64>> = normals
        .iter()
        .map(|h| row_space.iter().map(|b| linalg::dot(h, b)).collect())
        .collect();
    let rays = dd::extreme_rays(&reduced, k, DD_WORKING_CAP)?;
    let mut out: Vec<Vec<f64>> = rays
        .iter()
        .map(|y| {
            let mut v = vec![0.0; dim];
            for (c, b) in y.iter().zip(&row_space) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += c * bi;
                }
            }
            linalg::normalized(&v)
        })
        .collect();
    for l in &lineality {
        out.push(l.clone());
        out.push(linalg::scale(l, -1.0));
    }
    if out.len() > caps.max_rays {
        return Err(Error::Capacity {
            what: "dual generator count".into(),
            requested: out.len(),
            cap: caps.max_rays,
        });
    }
    Ok(out)
}

fn chebyshev_radius(dim: usize, normals: &[Vec<f64>]) -> Result<f64> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let ys: Vec<_> = (0..dim).map(|_| lp.add_var(0.0, (-1.0, 1.0))).collect();
    let r = lp.add_var(1.0, (-1.0, 1.0));
    for h in normals {
        let n = linalg::norm(h);
        if n == 0.0 {
            continue;
        }
        let mut expr = LinearExpr::empty();
        for (y, hi) in ys.iter().zip(h) {
            expr.add(*y, hi / n);
        }
        expr.add(r, -1.0);
        lp.add_constraint(expr, ComparisonOp::Ge, 0.0);
    }
    let sol = lp.solve().map_err(|e| Error::Numeric {
        message: format!("chebyshev center solve failed: {e}"),
        residual: f64::NAN,
    })?;
    Ok(*sol.var_value(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn light_cone_2d() -> ConvexCone {
        ConvexCone::new(2, vec![vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap()
    }

    #[test]
    fn make_cone_dedups_and_drops_zero() {
        let c = ConvexCone::new(2, vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(c.generators(), &[vec![1.0, 0.0]]);
        assert_eq!(light_cone_2d().generators().len(), 2);
        assert!(ConvexCone::trivial(3).unwrap().generators().is_empty());
        assert!(matches!(
            ConvexCone::new(2, vec![vec![1.0, 0.0, 0.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn membership_examples() {
        let c = light_cone_2d();
        assert!(c.member(&[2.0, 0.0], 1e-9).unwrap());
        assert!(!c.member(&[0.0, 1.0], 1e-9).unwrap());
        assert!(c.member(&[0.0, 0.0], 1e-9).unwrap());
        assert!(ConvexCone::trivial(3).unwrap().member(&[0.0; 3], 1e-9).unwrap());
        assert!(c.member(&[1.0], 1e-9).is_err());
    }

    #[test]
    fn light_cone_is_self_dual() {
        let c = light_cone_2d();
        let d = c.dual().unwrap();
        let a: Vec<_> = c.generators().iter().map(|g| linalg::normalized(g)).collect();
        let b: Vec<_> = d.generators().iter().map(|g| linalg::normalized(g)).collect();
        assert!(ray_set_distance(&a, &b, 1e-8).unwrap() < 1e-12);
    }

    #[test]
    fn dual_of_ray_is_half_plane() {
        let c = ConvexCone::new(2, vec![vec![1.0, 0.0]]).unwrap();
        let d = c.dual().unwrap();
        let expected = [vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        assert_eq!(d.generators().len(), 3);
        for e in &expected {
            assert!(d
                .generators()
                .iter()
                .any(|g| linalg::max_abs(&linalg::sub(&linalg::normalized(g), e)) < 1e-12));
        }
    }

    #[test]
    fn dual_of_trivial_is_everything() {
        let d = ConvexCone::trivial(3).unwrap().dual().unwrap();
        assert_eq!(linalg::rank(3, d.generators()), 3);
        assert!(d.member(&[-1.0, 5.0, 2.0], 1e-9).unwrap());
    }

    #[test]
    fn dual_over_cap_falls_back_to_halfspaces() {
        let gens: Vec<Vec<f64>> = (0..7).map(|i| linalg::unit(7, i)).collect();
        let c = ConvexCone::new(7, gens).unwrap();
        let d = c.dual().unwrap();
        assert!(!d.has_vrep());
        assert!(d.member(&[1.0; 7], 1e-9).unwrap());
        assert!(!d.member(&[-1.0; 7], 1e-9).unwrap());
        assert!(matches!(
            c.dual_with(&DualCaps::default(), true),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn edge_and_span_examples() {
        let es = light_cone_2d().edge_and_span(1e-9).unwrap();
        assert_eq!((es.edge.len(), es.span.len()), (0, 2));
        let line = ConvexCone::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        let es = line.edge_and_span(1e-9).unwrap();
        assert_eq!((es.edge.len(), es.span.len()), (1, 1));
        assert!(es.edge[0][1].abs() < 1e-12 && es.span[0][1].abs() < 1e-12);
        let es = ConvexCone::trivial(2).unwrap().edge_and_span(1e-9).unwrap();
        assert!(es.edge.is_empty() && es.span.is_empty());
    }

    #[test]
    fn classify_examples() {
        let tol = ConeTolerances::default();
        let caps = DualCaps::default();
        let r = light_cone_2d().classify(&tol, &caps).unwrap().classification;
        assert_eq!(
            r,
            ConeClassification {
                generating: true,
                pointed: true,
                proper: true,
                regular: true,
                self_dual: true
            }
        );
        let r = ConvexCone::new(2, vec![vec![1.0, 0.0]])
            .unwrap()
            .classify(&tol, &caps)
            .unwrap()
            .classification;
        assert!(!r.generating && r.proper && !r.self_dual);
        let r = ConvexCone::whole_space(2).unwrap().classify(&tol, &caps).unwrap().classification;
        assert!(r.generating && !r.proper && !r.pointed);
        let r = ConvexCone::trivial(2).unwrap().classify(&tol, &caps).unwrap().classification;
        assert!(!r.generating && r.proper && r.pointed);
    }

    #[test]
    fn orthant_is_self_dual_but_redundant_generator_is_ignored() {
        let tol = ConeTolerances::default();
        let caps = DualCaps::default();
        let c = ConvexCone::new(3, vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 1.0, 1.0],
        ])
        .unwrap();
        assert!(c.classify(&tol, &caps).unwrap().classification.self_dual);
        let narrow = ConvexCone::new(2, vec![vec![2.0, 1.0], vec![2.0, -1.0]]).unwrap();
        assert!(!narrow.classify(&tol, &caps).unwrap().classification.self_dual);
    }

    #[test]
    fn h_only_cone_roundtrip() {
        let h = ConvexCone::from_normals(2, vec![vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let v = h.with_vrep(&DualCaps::default()).unwrap();
        assert_eq!(v.generators().len(), 2);
        assert!(h.member(&[3.0, 1.0], 1e-9).unwrap());
        assert!(!h.member(&[0.0, 1.0], 1e-9).unwrap());
        let d = h.dual().unwrap();
        assert!(d.has_vrep() && d.generators().len() == 2);
    }
}
