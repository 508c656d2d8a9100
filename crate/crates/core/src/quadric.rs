//! The `d = 2`, `n = 1` model: rank-1 idempotents `[[z, y], [x, 1 − z]]` are
//! the affine quadric `X² + Y² + Z² = 1` in `ℂ³` via
//! `(X, Y, Z) = (i(x − y), x + y, 1 − 2z)`, with `J` the complexified cross
//! product.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{omega_at, tau};
use crate::linalg::{real_orthonormal_basis, C64, ComplexMatrix, I};
use crate::variety::{random_hermitian_point_with, ProjectionPoint, TangentVector};

pub type Vec3 = [C64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadricCoords {
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl QuadricCoords {
    pub fn as_array(&self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    /// `x² + y² + z² − 1`.
    pub fn residual(&self) -> C64 {
        self.x * self.x + self.y * self.y + self.z * self.z - 1.0
    }
}

fn require_model(q: &ProjectionPoint) -> Result<()> {
    if q.dim() != 2 || q.rank() != 1 {
        return Err(Error::NotQuadric("the quadric model needs d = 2 and n = 1"));
    }
    Ok(())
}

pub fn quadric_coords(q: &ProjectionPoint) -> Result<QuadricCoords> {
    require_model(q)?;
    let m = q.matrix();
    let (z, y, x) = (m.get(0, 0), m.get(0, 1), m.get(1, 0));
    Ok(QuadricCoords { x: I * (x - y), y: x + y, z: 1.0 - 2.0 * z })
}

pub fn from_quadric(c: &QuadricCoords) -> Result<ProjectionPoint> {
    let x = (c.y - I * c.x) / 2.0;
    let y = (c.y + I * c.x) / 2.0;
    let z = (1.0 - c.z) / 2.0;
    let one = C64::new(1.0, 0.0);
    ProjectionPoint::new(ComplexMatrix::from_rows(&[vec![z, y], vec![x, one - z]]), 1)
}

/// Differential of [`quadric_coords`]; the chart is affine, so this is exact.
pub fn quadric_tangent(a: &TangentVector) -> Result<Vec3> {
    require_model(a.base())?;
    let m = a.matrix();
    let (dz, dy, dx) = (m.get(0, 0), m.get(0, 1), m.get(1, 0));
    Ok([I * (dx - dy), dx + dy, -2.0 * dz])
}

pub fn from_quadric_tangent(q: &ProjectionPoint, v: &Vec3) -> Result<TangentVector> {
    require_model(q)?;
    let dx = (v[1] - I * v[0]) / 2.0;
    let dy = (v[1] + I * v[0]) / 2.0;
    let dz = -v[2] / 2.0;
    TangentVector::new(q.clone(), ComplexMatrix::from_rows(&[vec![dz, dy], vec![dx, -dz]]))
}

fn bilinear_dot(a: &Vec3, b: &Vec3) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `J(a, b, c) = (a, b, c) × (x, y, z)` on the tangent plane `xa + yb + zc = 0`.
pub fn cross_product_j(c: &QuadricCoords, v: &Vec3) -> Result<Vec3> {
    let p = c.as_array();
    let r = bilinear_dot(&p, v).norm();
    let scale = 1.0 + v.iter().map(|s| s.norm()).fold(0.0, f64::max) * (1.0 + p.iter().map(|s| s.norm()).fold(0.0, f64::max));
    if r > 1e-10 * scale {
        return Err(Error::NotQuadricTangent(r));
    }
    Ok(cross(v, &p))
}

/// The three real forms of the quadric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Involution {
    /// `(x, y, z) ↦ (ȳ, x̄, z̄)` on matrix entries, i.e. `q ↦ q*`.
    Sphere,
    /// `(x, y, z) ↦ (−ȳ, −x̄, z̄)`, i.e. `q ↦ D q* D` with `D = diag(1, −1)`.
    Disk,
    /// `(x, y, z) ↦ (x̄, ȳ, z̄)`, entrywise conjugation.
    Cylinder,
}

impl Involution {
    pub const ALL: [Involution; 3] = [Involution::Sphere, Involution::Disk, Involution::Cylinder];

    /// The map on matrices; it is conjugate-linear, so it is also its own differential.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Involution::Sphere => m.adjoint(),
            Involution::Disk => {
                let d = ComplexMatrix::real_diag(&[1.0, -1.0]);
                &(&d * &m.adjoint()) * &d
            }
            Involution::Cylinder => m.conj(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Involution::Sphere => "sphere",
            Involution::Disk => "disk",
            Involution::Cylinder => "cylinder",
        }
    }
}

pub fn involution(kind: Involution, q: &ProjectionPoint) -> Result<ProjectionPoint> {
    require_model(q)?;
    ProjectionPoint::new(kind.apply_matrix(q.matrix()), 1)
}

/// Differential of the involution at `q`, as a tangent at `σ(q)`.
pub fn involution_differential(kind: Involution, a: &TangentVector) -> Result<TangentVector> {
    let base = involution(kind, a.base())?;
    TangentVector::new(base, kind.apply_matrix(a.matrix()))
}

/// A random fixed point of the involution.
pub fn random_fixed_point<R: Rng + ?Sized>(kind: Involution, rng: &mut R) -> Result<ProjectionPoint> {
    let one = C64::new(1.0, 0.0);
    match kind {
        Involution::Sphere => Ok(random_hermitian_point_with(2, 1, rng)?.into_point()),
        Involution::Disk => {
            // z real with z(z − 1) = |x|² ≥ 0 and y = −x̄.
            let s: f64 = rng.random_range(0.0..2.0);
            let z = if rng.random::<bool>() { 1.0 + s } else { -s };
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let x = C64::from_polar((z * z - z).sqrt(), theta);
            let zc = C64::new(z, 0.0);
            ProjectionPoint::new(ComplexMatrix::from_rows(&[vec![zc, -x.conj()], vec![x, one - zc]]), 1)
        }
        Involution::Cylinder => {
            // Real idempotent v wᵀ / (wᵀ v).
            loop {
                let v: [f64; 2] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let w: [f64; 2] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let s = v[0] * w[0] + v[1] * w[1];
                if s.abs() < 0.2 {
                    continue;
                }
                let m = ComplexMatrix::from_fn(2, |i, j| C64::new(v[i] * w[j] / s, 0.0));
                return ProjectionPoint::new(m, 1);
            }
        }
    }
}

/// Real basis of `{A tangent at q : dσ(A) = A}` at a fixed point `q`, and the
/// matrix of `Ω` on it.
pub fn fixed_tangent_pairing(kind: Involution, q: &ProjectionPoint) -> Result<(Vec<ComplexMatrix>, nalgebra::DMatrix<C64>)> {
    require_model(q)?;
    let r = (&kind.apply_matrix(q.matrix()) - q.matrix()).norm();
    if r > 1e-10 * (1.0 + q.norm()) {
        return Err(Error::NotQuadric("point is not fixed by the involution"));
    }
    let mut spanning = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for s in [C64::new(1.0, 0.0), I] {
                let a = q.project(&ComplexMatrix::unit(2, i, j).scale(s));
                spanning.push((&a + &kind.apply_matrix(&a)).scale_real(0.5));
            }
        }
    }
    let basis = real_orthonormal_basis(&spanning, 1e-8);
    let k = basis.len();
    let w = nalgebra::DMatrix::from_fn(k, k, |i, j| omega_at(q.matrix(), &basis[i], &basis[j]));
    Ok((basis, w))
}

/// `τ(q)` next to `(1/√2)√(|x|² + |y|² + |z|² + 1)` in quadric coordinates.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EguchiHanson {
    pub tau: f64,
    pub potential: f64,
}

pub fn eguchi_hanson_potential(q: &ProjectionPoint) -> Result<EguchiHanson> {
    let c = quadric_coords(q)?;
    let s = c.x.norm_sqr() + c.y.norm_sqr() + c.z.norm_sqr() + 1.0;
    Ok(EguchiHanson { tau: tau(q.matrix())?, potential: (s / 2.0).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply_structure, ComplexStructureTag};
    use crate::rng;
    use crate::variety::{random_point, random_tangent};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &Vec3, b: &Vec3, tol: f64) -> bool {
        a.iter().zip(b).all(|(s, t)| (s - t).norm() <= tol)
    }

    #[test]
    fn coords_examples() {
        let q = ProjectionPoint::new(ComplexMatrix::real_diag(&[1.0, 0.0]), 1).unwrap();
        let k = quadric_coords(&q).unwrap();
        assert_eq!(k.as_array(), [c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let q = ProjectionPoint::new(ComplexMatrix::real_diag(&[0.0, 1.0]), 1).unwrap();
        assert_eq!(quadric_coords(&q).unwrap().z, c(1.0, 0.0));
        for seed in 0..50 {
            let q = random_point(2, 1, 1.0, seed).unwrap();
            let k = quadric_coords(&q).unwrap();
            assert!(k.residual().norm() < 1e-12);
            let back = from_quadric(&k).unwrap();
            assert!((back.matrix() - q.matrix()).norm() < 1e-14);
        }
        assert!(quadric_coords(&random_point(3, 1, 1.0, 0).unwrap()).is_err());
    }

    #[test]
    fn cross_product_examples() {
        let k = QuadricCoords { x: c(0.0, 0.0), y: c(0.0, 0.0), z: c(-1.0, 0.0) };
        let (a, b) = (c(0.3, 1.0), c(-2.0, 0.5));
        let j = cross_product_j(&k, &[a, b, c(0.0, 0.0)]).unwrap();
        assert!(close(&j, &[-b, a, c(0.0, 0.0)], 1e-15));
        assert!(matches!(
            cross_product_j(&k, &[a, b, c(1.0, 0.0)]),
            Err(Error::NotQuadricTangent(_))
        ));
    }

    #[test]
    fn cross_product_matches_matrix_j() {
        for seed in 0..30 {
            let q = random_point(2, 1, 1.0, 100 + seed).unwrap();
            let a = random_tangent(&q, 200 + seed);
            let k = quadric_coords(&q).unwrap();
            let v = quadric_tangent(&a).unwrap();
            let jv = cross_product_j(&k, &v).unwrap();
            let jjv = cross_product_j(&k, &jv).unwrap();
            let minus_v = [-v[0], -v[1], -v[2]];
            let s = 1e-11 * (1.0 + a.norm()) * (1.0 + q.norm()).powi(2);
            assert!(close(&jjv, &minus_v, s));
            let ja = apply_structure(ComplexStructureTag::J, &a).unwrap();
            assert!(close(&quadric_tangent(&ja).unwrap(), &jv, s));
            let back = from_quadric_tangent(&q, &v).unwrap();
            assert!((back.matrix() - a.matrix()).norm() < 1e-13 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn involutions() {
        let d10 = ProjectionPoint::new(ComplexMatrix::real_diag(&[1.0, 0.0]), 1).unwrap();
        assert_eq!(involution(Involution::Sphere, &d10).unwrap(), d10);
        for kind in Involution::ALL {
            for seed in 0..20 {
                let q = random_point(2, 1, 1.0, 300 + seed).unwrap();
                let s = involution(kind, &q).unwrap();
                let ss = involution(kind, &s).unwrap();
                assert!((ss.matrix() - q.matrix()).norm() < 1e-13);
                let a = random_tangent(&q, 400 + seed);
                let da = involution_differential(kind, &a).unwrap();
                let dia = involution_differential(kind, &a.scale(I)).unwrap();
                assert!((dia.matrix() + da.matrix().scale(I)).norm() < 1e-13 * (1.0 + a.norm()));
            }
        }
    }

    #[test]
    fn involution_entry_formulas() {
        let q = random_point(2, 1, 1.0, 5).unwrap();
        let k0 = q.matrix();
        let (z, y, x) = (k0.get(0, 0), k0.get(0, 1), k0.get(1, 0));
        let check = |kind, ex: C64, ey: C64, ez: C64| {
            let m = involution(kind, &q).unwrap();
            let m = m.matrix();
            assert!((m.get(1, 0) - ex).norm() < 1e-14);
            assert!((m.get(0, 1) - ey).norm() < 1e-14);
            assert!((m.get(0, 0) - ez).norm() < 1e-14);
        };
        check(Involution::Sphere, y.conj(), x.conj(), z.conj());
        check(Involution::Disk, -y.conj(), -x.conj(), z.conj());
        check(Involution::Cylinder, x.conj(), y.conj(), z.conj());
    }

    #[test]
    fn fixed_sets_are_symplectic() {
        let mut r = rng::from_seed(6);
        for kind in Involution::ALL {
            for _ in 0..10 {
                let q = random_fixed_point(kind, &mut r).unwrap();
                assert!((involution(kind, &q).unwrap().matrix() - q.matrix()).norm() < 1e-12);
                let (basis, w) = fixed_tangent_pairing(kind, &q).unwrap();
                assert_eq!(basis.len(), 2, "{kind:?}");
                assert!(w.determinant().norm() > 1e-6, "{kind:?}");
            }
        }
    }

    #[test]
    fn eguchi_hanson_identity() {
        let q = ProjectionPoint::new(ComplexMatrix::real_diag(&[1.0, 0.0]), 1).unwrap();
        let e = eguchi_hanson_potential(&q).unwrap();
        assert!((e.tau - 1.0).abs() < 1e-15 && (e.potential - 1.0).abs() < 1e-15);
        for seed in 0..50 {
            let q = random_point(2, 1, 1.0, 500 + seed).unwrap();
            let e = eguchi_hanson_potential(&q).unwrap();
            assert!((e.tau - e.potential).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_and_hilbert_schmidt_norms_agree_on_rank_one() {
        for seed in 0..20 {
            let q = random_point(3, 1, 2.0, 600 + seed).unwrap();
            assert!((q.matrix().trace_norm() - q.norm()).abs() < 1e-12 * q.norm());
        }
    }
}
