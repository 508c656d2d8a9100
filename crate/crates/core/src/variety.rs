//! Points and tangent vectors of the variety of rank-`n` idempotents.
//!
//! A point is a matrix `q` with `q² = q` and `Tr q = n`; this set is the
//! cotangent bundle of the Grassmannian `Gr(n, ℂᵈ)`, with the Hermitian
//! projections as zero section. Tangent vectors at `q` are the matrices `A`
//! with `qA + Aq = A`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{comm, complex_gaussian, haar_unitary_with, range_basis, C64, ComplexMatrix};
use crate::rng;

/// Default validation tolerance; every check scales it by `1 + (input norms)`.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A rank-`n` idempotent `d × d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionPoint {
    q: ComplexMatrix,
    rank: usize,
}

/// Outcome of [`validate_point`]. Never an error; `reasons` is empty iff accepted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointDiagnostics {
    pub idempotency_residual: f64,
    pub trace_residual: f64,
    pub rank_estimate: usize,
    /// Hilbert–Schmidt norm of the candidate; grows with distance from the zero section.
    pub norm: f64,
    pub accepted: bool,
    pub reasons: Vec<String>,
}

pub fn validate_point(m: &ComplexMatrix, n: usize, tol: f64) -> PointDiagnostics {
    let d = m.dim();
    let norm = m.norm();
    let idempotency_residual = (&(m * m) - m).norm();
    let trace_residual = (m.trace() - C64::new(n as f64, 0.0)).norm();
    let rank_estimate = m.rank(1e-8);
    let mut reasons = Vec::new();
    if !m.is_finite() {
        reasons.push("non-finite entries".to_string());
    }
    if n == 0 || n >= d {
        reasons.push(format!("rank {n} outside 1..={}", d.saturating_sub(1)));
    }
    if !(idempotency_residual <= tol * (1.0 + norm * norm)) {
        reasons.push(format!("||M^2 - M|| = {idempotency_residual:.3e} exceeds tolerance"));
    }
    if !(trace_residual <= tol) {
        reasons.push(format!("|Tr M - {n}| = {trace_residual:.3e} exceeds tolerance"));
    }
    PointDiagnostics {
        idempotency_residual,
        trace_residual,
        rank_estimate,
        norm,
        accepted: reasons.is_empty(),
        reasons,
    }
}

impl ProjectionPoint {
    pub fn new(q: ComplexMatrix, rank: usize) -> Result<Self> {
        Self::with_tol(q, rank, DEFAULT_TOL)
    }

    pub fn with_tol(q: ComplexMatrix, rank: usize, tol: f64) -> Result<Self> {
        let d = q.dim();
        if rank == 0 || rank >= d {
            return Err(Error::InvalidRank { rank, dim: d });
        }
        let diag = validate_point(&q, rank, tol);
        if !diag.accepted {
            return Err(Error::InvalidPoint {
                rank,
                idempotency: diag.idempotency_residual,
                trace: diag.trace_residual,
            });
        }
        Ok(Self { q, rank })
    }

    /// Skips validation. Used along flows that preserve the variety exactly.
    pub(crate) fn new_unchecked(q: ComplexMatrix, rank: usize) -> Self {
        Self { q, rank }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn norm(&self) -> f64 {
        self.q.norm()
    }

    pub fn hermitian_residual(&self) -> f64 {
        (&self.q - &self.q.adjoint()).norm()
    }

    /// `q*`, again a rank-`n` projection.
    pub fn adjoint(&self) -> Self {
        Self::new_unchecked(self.q.adjoint(), self.rank)
    }

    /// `1 − q`, a projection of rank `d − n`.
    pub fn complement(&self) -> Self {
        Self::new_unchecked(ComplexMatrix::identity(self.dim()) - &self.q, self.dim() - self.rank)
    }

    /// `P(M) = qM + Mq − 2qMq = [q,[q,M]]`, the projection onto the tangent space.
    pub fn project(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let q = &self.q;
        let qm = q * m;
        let mq = m * q;
        let qmq = &qm * q;
        qm + mq - qmq.scale_real(2.0)
    }

    pub fn tangent_residual(&self, a: &ComplexMatrix) -> f64 {
        (&(&(&self.q * a) + &(a * &self.q)) - a).norm()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&Serialized {
            kind: Kind::Point,
            rank: self.rank,
            matrix: self.q.clone(),
            base: None,
        })
        .expect("serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Serialized = serde_json::from_str(s)?;
        if v.kind != Kind::Point {
            return Err(Error::Unsupported("expected kind \"point\""));
        }
        Self::new(v.matrix, v.rank)
    }
}

/// A tangent vector `A` at a point `q`: `qA + Aq = A`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: ProjectionPoint,
    a: ComplexMatrix,
}

impl TangentVector {
    pub fn new(base: ProjectionPoint, a: ComplexMatrix) -> Result<Self> {
        base.matrix().ensure_same_dim(&a)?;
        let r = base.tangent_residual(&a);
        if !(r <= DEFAULT_TOL * (1.0 + a.norm()) * (1.0 + base.norm())) {
            return Err(Error::NotTangent(r));
        }
        Ok(Self { base, a })
    }

    pub(crate) fn new_unchecked(base: ProjectionPoint, a: ComplexMatrix) -> Self {
        Self { base, a }
    }

    pub fn base(&self) -> &ProjectionPoint {
        &self.base
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn norm(&self) -> f64 {
        self.a.norm()
    }

    /// Same base, new matrix (unchecked; callers guarantee tangency).
    pub(crate) fn with_matrix(&self, a: ComplexMatrix) -> Self {
        Self::new_unchecked(self.base.clone(), a)
    }

    pub fn scale(&self, s: C64) -> Self {
        self.with_matrix(self.a.scale(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_base(self, other)?;
        Ok(self.with_matrix(&self.a + &other.a))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&Serialized {
            kind: Kind::Tangent,
            rank: self.base.rank,
            matrix: self.a.clone(),
            base: Some(self.base.q.clone()),
        })
        .expect("serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Serialized = serde_json::from_str(s)?;
        let base = match (v.kind, v.base) {
            (Kind::Tangent, Some(b)) => ProjectionPoint::new(b, v.rank)?,
            _ => return Err(Error::Unsupported("expected kind \"tangent\" with a base")),
        };
        Self::new(base, v.matrix)
    }
}

/// Fails unless `a` and `b` are based at the same point.
pub fn same_base(a: &TangentVector, b: &TangentVector) -> Result<()> {
    a.a.ensure_same_dim(&b.a)?;
    let r = (a.base.matrix() - b.base.matrix()).norm();
    if r > DEFAULT_TOL * (1.0 + a.base.norm()) {
        return Err(Error::BaseMismatch(r));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Point,
    Tangent,
}

#[derive(Serialize, Deserialize)]
struct Serialized {
    kind: Kind,
    rank: usize,
    matrix: ComplexMatrix,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    base: Option<ComplexMatrix>,
}

/// A Hermitian (orthogonal) projection: a point of the zero section `Gr(n, ℂᵈ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPoint(ProjectionPoint);

impl HermitianPoint {
    pub fn new(q: ProjectionPoint) -> Result<Self> {
        let r = q.hermitian_residual();
        if r > DEFAULT_TOL * (1.0 + q.norm()) {
            return Err(Error::NotHermitian(r));
        }
        Ok(Self(q))
    }

    /// `V V*` for a `d × n` matrix `V` with orthonormal columns.
    pub fn from_frame(frame: &nalgebra::DMatrix<C64>) -> Result<Self> {
        let d = frame.nrows();
        let n = frame.ncols();
        if n == 0 || n >= d {
            return Err(Error::InvalidRank { rank: n, dim: d });
        }
        let p = ComplexMatrix::from_inner(frame * frame.adjoint())?;
        Ok(Self(ProjectionPoint::new_unchecked(p, n)))
    }

    pub fn point(&self) -> &ProjectionPoint {
        &self.0
    }

    pub fn into_point(self) -> ProjectionPoint {
        self.0
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.0.matrix()
    }

    pub fn rank(&self) -> usize {
        self.0.rank()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `1 − p`, Hermitian of rank `d − n`.
    pub fn complement(&self) -> Self {
        Self(self.0.complement())
    }
}

/// An element of `Hom(V⊥, V)` extended by zero: `pf = f`, `fp = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberVector {
    base: HermitianPoint,
    f: ComplexMatrix,
}

impl FiberVector {
    pub fn new(base: HermitianPoint, f: ComplexMatrix) -> Result<Self> {
        base.matrix().ensure_same_dim(&f)?;
        let r = fiber_residual(base.matrix(), &f);
        if r > DEFAULT_TOL * (1.0 + f.norm()) {
            return Err(Error::FiberCondition(r));
        }
        Ok(Self { base, f })
    }

    pub(crate) fn new_unchecked(base: HermitianPoint, f: ComplexMatrix) -> Self {
        Self { base, f }
    }

    pub fn base(&self) -> &HermitianPoint {
        &self.base
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.f
    }

    /// The point `p + f` of the fiber over `p`.
    pub fn point(&self) -> ProjectionPoint {
        ProjectionPoint::new_unchecked(self.base.matrix() + &self.f, self.base.rank())
    }

    /// `f` as a tangent vector at `p` (fiber directions are tangent: `pf + fp = f`).
    pub fn as_tangent(&self) -> TangentVector {
        TangentVector::new_unchecked(self.base.point().clone(), self.f.clone())
    }
}

pub(crate) fn fiber_residual(p: &ComplexMatrix, f: &ComplexMatrix) -> f64 {
    (&(p * f) - f).norm() + (f * p).norm()
}

/// The tangent projection `P(M) = qM + Mq − 2qMq`.
pub fn tangent_project(q: &ProjectionPoint, m: &ComplexMatrix) -> Result<TangentVector> {
    q.matrix().ensure_same_dim(m)?;
    Ok(TangentVector::new_unchecked(q.clone(), q.project(m)))
}

/// Haar-random point of the zero section.
pub fn random_hermitian_point_with<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<HermitianPoint> {
    if d < 2 || n == 0 || n >= d {
        return Err(Error::InvalidRank { rank: n, dim: d });
    }
    let u = haar_unitary_with(d, rng);
    let frame = u.inner().columns(0, n).into_owned();
    HermitianPoint::from_frame(&frame)
}

/// A Haar point `p` of the zero section plus a Gaussian fiber vector
/// `fiber_scale · pG(1 − p)`.
pub fn random_point_with<R: Rng + ?Sized>(d: usize, n: usize, fiber_scale: f64, rng: &mut R) -> Result<ProjectionPoint> {
    if !(fiber_scale >= 0.0) || !fiber_scale.is_finite() {
        return Err(Error::NonFinite("fiber scale"));
    }
    let p = random_hermitian_point_with(d, n, rng)?;
    if fiber_scale == 0.0 {
        return Ok(p.into_point());
    }
    let g = complex_gaussian(d, rng);
    let f = fiber_part(p.matrix(), &g).scale_real(fiber_scale);
    Ok(ProjectionPoint::new_unchecked(p.matrix() + &f, n))
}

pub fn random_point(d: usize, n: usize, fiber_scale: f64, seed: u64) -> Result<ProjectionPoint> {
    random_point_with(d, n, fiber_scale, &mut rng::from_seed(seed))
}

/// `pM(1 − p)`, the component of `M` in `Hom(V⊥, V)`.
pub(crate) fn fiber_part(p: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    let pm = p * m;
    &pm - &(&pm * p)
}

/// Random Gaussian fiber vector over `p`.
pub fn random_fiber_with<R: Rng + ?Sized>(p: &HermitianPoint, rng: &mut R) -> FiberVector {
    let g = complex_gaussian(p.dim(), rng);
    FiberVector::new_unchecked(p.clone(), fiber_part(p.matrix(), &g))
}

pub fn random_tangent_with<R: Rng + ?Sized>(q: &ProjectionPoint, rng: &mut R) -> TangentVector {
    let g = complex_gaussian(q.dim(), rng);
    TangentVector::new_unchecked(q.clone(), q.project(&g))
}

pub fn random_tangent(q: &ProjectionPoint, seed: u64) -> TangentVector {
    random_tangent_with(q, &mut rng::from_seed(seed))
}

/// Random Hermitian tangent at a point of the zero section.
pub fn random_hermitian_tangent_with<R: Rng + ?Sized>(p: &HermitianPoint, rng: &mut R) -> TangentVector {
    let g = complex_gaussian(p.dim(), rng).hermitian_part();
    TangentVector::new_unchecked(p.point().clone(), p.point().project(&g))
}

/// `π(q)`: the orthogonal projection onto `range(q)`, from an orthonormalized
/// set of `n` pivot columns of `q`.
pub fn base_projection(q: &ProjectionPoint) -> Result<HermitianPoint> {
    let v = range_basis(q.matrix(), q.rank(), 1e-10)?;
    HermitianPoint::from_frame(&v)
}

/// `π_*(A)`: the Hermitian tangent `X` at `π(q)` solving `qX + Aπ(q) = X`.
///
/// With `M = [q, A]` we have `A = [q, M]`; split `M` into skew-Hermitian and
/// Hermitian parts and push each forward: `[q,S] ↦ [π(q),S]` and
/// `[q,H] ↦ [[π(q),H], π(q)]`.
pub fn pushforward(a: &TangentVector) -> Result<TangentVector> {
    let p = base_projection(a.base())?;
    Ok(pushforward_at(a.base().matrix(), &p, a.matrix()))
}

pub(crate) fn pushforward_at(q: &ComplexMatrix, p: &HermitianPoint, a: &ComplexMatrix) -> TangentVector {
    let pm = p.matrix();
    let m = comm(q, a);
    let skew = m.skew_part();
    let herm = m.hermitian_part();
    let x = comm(pm, &skew) + comm(&comm(pm, &herm), pm);
    TangentVector::new_unchecked(p.point().clone(), x)
}

/// `π(q) = π(q')` iff `qq' = q'` (for equal ranks).
pub fn same_leaf(q: &ProjectionPoint, q2: &ProjectionPoint) -> bool {
    if q.dim() != q2.dim() || q.rank() != q2.rank() {
        return false;
    }
    leaf_residual(q, q2) <= DEFAULT_TOL * (1.0 + q.norm() * q2.norm())
}

fn leaf_residual(q: &ProjectionPoint, q2: &ProjectionPoint) -> f64 {
    (&(q.matrix() * q2.matrix()) - q2.matrix()).norm()
}

/// Scalar multiplication in the fiber: `r·q = (1 − r)π(q) + rq`.
pub fn fiber_scale(q: &ProjectionPoint, r: C64) -> Result<ProjectionPoint> {
    let p = base_projection(q)?;
    let out = p.matrix().scale(C64::new(1.0, 0.0) - r) + q.matrix().scale(r);
    Ok(ProjectionPoint::new_unchecked(out, q.rank()))
}

/// Fiber addition `q ⊕ q' = q + q' − π(q)`; both must lie in the same leaf.
pub fn fiber_add(q: &ProjectionPoint, q2: &ProjectionPoint) -> Result<ProjectionPoint> {
    q.matrix().ensure_same_dim(q2.matrix())?;
    if !same_leaf(q, q2) {
        return Err(Error::LeafMismatch(leaf_residual(q, q2)));
    }
    let p = base_projection(q)?;
    Ok(ProjectionPoint::new_unchecked(q.matrix() + q2.matrix() - p.matrix(), q.rank()))
}

/// `q = π(q) + f` with `f = q − π(q) ∈ Hom(V⊥, V)`.
pub fn fiber_decompose(q: &ProjectionPoint) -> Result<(HermitianPoint, FiberVector)> {
    let p = base_projection(q)?;
    let f = q.matrix() - p.matrix();
    Ok((p.clone(), FiberVector::new_unchecked(p, f)))
}

pub fn fiber_compose(f: &FiberVector) -> ProjectionPoint {
    f.point()
}

/// The Fubini–Study musical isomorphism `A ↦ qA` from Hermitian tangents at
/// `q` to `Hom(V⊥, V)`.
pub fn metric_iso(a: &TangentVector) -> Result<FiberVector> {
    let q = HermitianPoint::new(a.base().clone())?;
    let r = a.matrix().hermitian_part().norm();
    let skew = a.matrix().skew_part().norm();
    if skew > DEFAULT_TOL * (1.0 + r) {
        return Err(Error::NotHermitian(skew));
    }
    let f = q.matrix() * a.matrix();
    Ok(FiberVector::new_unchecked(q, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn oblique() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]])
    }

    #[test]
    fn validate_examples() {
        let d = validate_point(&ComplexMatrix::real_diag(&[1.0, 0.0]), 1, DEFAULT_TOL);
        assert!(d.accepted);
        let d = validate_point(&oblique(), 1, DEFAULT_TOL);
        assert!(d.accepted, "{:?}", d.reasons);
        let d = validate_point(&ComplexMatrix::identity(2), 1, DEFAULT_TOL);
        assert!(!d.accepted);
        assert!((d.trace_residual - 1.0).abs() < 1e-15);
        assert_eq!(d.reasons.len(), 1);
    }

    #[test]
    fn point_constructor_rejects_bad_rank() {
        assert!(matches!(
            ProjectionPoint::new(ComplexMatrix::identity(2), 2),
            Err(Error::InvalidRank { .. })
        ));
        assert!(matches!(
            ProjectionPoint::new(ComplexMatrix::identity(2), 1),
            Err(Error::InvalidPoint { .. })
        ));
    }

    #[test]
    fn tangent_project_examples() {
        let q = random_point(4, 2, 1.0, 3).unwrap();
        let a = random_tangent(&q, 4);
        let pa = tangent_project(&q, a.matrix()).unwrap();
        assert!((pa.matrix() - a.matrix()).norm() < 1e-12);
        assert!(tangent_project(&q, q.matrix()).unwrap().norm() < 1e-13);
        let m = complex_gaussian(4, &mut rng::from_seed(5));
        let p1 = q.project(&m);
        let p2 = q.project(&p1);
        assert!((p1 - p2).norm() < 1e-12 * (1.0 + q.norm() * q.norm()));
    }

    #[test]
    fn random_point_contract() {
        let h = random_point(4, 2, 0.0, 1).unwrap();
        assert!(h.hermitian_residual() < 1e-12);
        for seed in 0..20 {
            let q = random_point(5, 2, 1.5, seed).unwrap();
            assert!((q.matrix().trace() - c(2.0, 0.0)).norm() < 1e-12);
        }
        let q = random_point(2, 1, 1.0, 77).unwrap();
        let diag = validate_point(q.matrix(), 1, 1e-12);
        assert!(diag.idempotency_residual <= 1e-12 && diag.trace_residual <= 1e-12);
        assert!(random_point(3, 3, 1.0, 0).is_err());
        assert!(random_point(3, 1, -1.0, 0).is_err());
    }

    #[test]
    fn random_tangent_contract() {
        let q = random_point(4, 1, 1.0, 8).unwrap();
        let a = random_tangent(&q, 9);
        assert!(q.tangent_residual(a.matrix()) < 1e-12);
        let qq = comm(q.matrix(), &comm(q.matrix(), a.matrix()));
        assert!((qq - a.matrix()).norm() < 1e-12 * (1.0 + q.norm() * q.norm()));
    }

    #[test]
    fn random_tangents_are_independent() {
        let q = random_point(3, 1, 1.0, 10).unwrap();
        let a = random_tangent(&q, 11).matrix().to_real_vec();
        let b = random_tangent(&q, 12).matrix().to_real_vec();
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(s, t)| s * t).sum::<f64>();
        let gram = dot(&a, &a) * dot(&b, &b) - dot(&a, &b).powi(2);
        assert!(gram > 1e-6);
    }

    #[test]
    fn base_projection_examples() {
        let q = ProjectionPoint::new(oblique(), 1).unwrap();
        let p = base_projection(&q).unwrap();
        assert!((p.matrix() - ComplexMatrix::real_diag(&[1.0, 0.0])).norm() < 1e-15);
        let h = random_point(4, 2, 0.0, 13).unwrap();
        assert!((base_projection(&h).unwrap().matrix() - h.matrix()).norm() < 1e-12);
        let q = random_point(4, 2, 2.0, 14).unwrap();
        let p = base_projection(&q).unwrap();
        assert!((p.matrix() * q.matrix() - q.matrix()).norm() < 1e-11);
        assert!((q.matrix() * p.matrix() - p.matrix()).norm() < 1e-11);
    }

    #[test]
    fn base_projection_rank_one_closed_form() {
        for seed in 0..10 {
            let q = random_point(4, 1, 1.3, seed).unwrap();
            let qqs = q.matrix() * &q.matrix().adjoint();
            let closed = qqs.scale(qqs.trace().inv());
            let p = base_projection(&q).unwrap();
            assert!((p.matrix() - closed).norm() < 1e-12);
        }
    }

    #[test]
    fn pushforward_on_zero_section_skew_tangents() {
        let p = random_hermitian_point_with(4, 2, &mut rng::from_seed(15)).unwrap();
        let s = complex_gaussian(4, &mut rng::from_seed(16)).skew_part();
        let a = TangentVector::new(p.point().clone(), comm(p.matrix(), &s)).unwrap();
        let x = pushforward(&a).unwrap();
        assert!((x.matrix() - a.matrix()).norm() < 1e-12);
    }

    #[test]
    fn pushforward_defining_equation() {
        for seed in 0..10 {
            let q = random_point(4, 2, 1.0, 100 + seed).unwrap();
            let a = random_tangent(&q, 200 + seed);
            let x = pushforward(&a).unwrap();
            let p = x.base().matrix();
            let res = (q.matrix() * x.matrix() + a.matrix() * p - x.matrix()).norm();
            assert!(res <= 1e-10 * (1.0 + a.norm()), "{res}");
            // Hermitian tangent at π(q).
            assert!(x.matrix().skew_part().norm() < 1e-10 * (1.0 + a.norm()));
            assert!(x.base().tangent_residual(x.matrix()) < 1e-10 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn same_leaf_examples() {
        let q = ProjectionPoint::new(ComplexMatrix::real_diag(&[1.0, 0.0]), 1).unwrap();
        let q2 = ProjectionPoint::new(oblique(), 1).unwrap();
        let q3 = ProjectionPoint::new(ComplexMatrix::real_diag(&[0.0, 1.0]), 1).unwrap();
        assert!(same_leaf(&q, &q));
        assert!(same_leaf(&q, &q2));
        assert!(!same_leaf(&q, &q3));
    }

    fn leaf_point(p: &HermitianPoint, seed: u64) -> ProjectionPoint {
        random_fiber_with(p, &mut rng::from_seed(seed)).point()
    }

    #[test]
    fn fiber_vector_space_structure() {
        let p = random_hermitian_point_with(3, 1, &mut rng::from_seed(30)).unwrap();
        let q = leaf_point(&p, 31);
        let q2 = leaf_point(&p, 32);
        let q3 = leaf_point(&p, 33);
        assert!((fiber_scale(&q, c(1.0, 0.0)).unwrap().matrix() - q.matrix()).norm() < 1e-12);
        assert!((fiber_scale(&q, c(0.0, 0.0)).unwrap().matrix() - p.matrix()).norm() < 1e-12);
        assert!((fiber_add(&q, p.point()).unwrap().matrix() - q.matrix()).norm() < 1e-12);
        let lhs = fiber_add(&fiber_add(&q, &q2).unwrap(), &q3).unwrap();
        let rhs = fiber_add(&q, &fiber_add(&q2, &q3).unwrap()).unwrap();
        assert!((lhs.matrix() - rhs.matrix()).norm() < 1e-12);
        let s = fiber_scale(&q, c(0.4, -2.0)).unwrap();
        assert!(validate_point(s.matrix(), 1, 1e-10).accepted);
        assert!(same_leaf(&q, &s));
        // Distributivity r·(q ⊕ q') = r·q ⊕ r·q'.
        let r = c(-1.5, 0.25);
        let lhs = fiber_scale(&fiber_add(&q, &q2).unwrap(), r).unwrap();
        let rhs = fiber_add(&fiber_scale(&q, r).unwrap(), &fiber_scale(&q2, r).unwrap()).unwrap();
        assert!((lhs.matrix() - rhs.matrix()).norm() < 1e-11);
    }

    #[test]
    fn fiber_add_rejects_other_leaf() {
        let q = random_point(3, 1, 1.0, 40).unwrap();
        let q2 = random_point(3, 1, 1.0, 41).unwrap();
        assert!(matches!(fiber_add(&q, &q2), Err(Error::LeafMismatch(_))));
    }

    #[test]
    fn leaf_translation_by_fiber_tangent() {
        let p = random_hermitian_point_with(4, 2, &mut rng::from_seed(42)).unwrap();
        let q = leaf_point(&p, 43);
        let a = random_fiber_with(&p, &mut rng::from_seed(44));
        let moved = ProjectionPoint::new(q.matrix() + a.matrix(), 2).unwrap();
        assert!(same_leaf(&q, &moved));
    }

    #[test]
    fn fiber_decompose_examples() {
        let h = random_point(3, 1, 0.0, 50).unwrap();
        let (_, f) = fiber_decompose(&h).unwrap();
        assert!(f.matrix().norm() < 1e-12);
        let q = ProjectionPoint::new(oblique(), 1).unwrap();
        let (p, f) = fiber_decompose(&q).unwrap();
        assert!((p.matrix() - ComplexMatrix::real_diag(&[1.0, 0.0])).norm() < 1e-15);
        assert!((f.matrix() - ComplexMatrix::unit(2, 0, 1)).norm() < 1e-15);
        let q = random_point(4, 2, 2.0, 51).unwrap();
        let (p, f) = fiber_decompose(&q).unwrap();
        assert!((q.matrix() - p.matrix() - f.matrix()).norm() < 1e-12);
        assert!(fiber_residual(p.matrix(), f.matrix()) < 1e-11);
        assert_eq!(fiber_compose(&f).matrix(), &(p.matrix() + f.matrix()));
        // compose then decompose
        let g = random_fiber_with(&p, &mut rng::from_seed(52));
        let (p2, g2) = fiber_decompose(&fiber_compose(&g)).unwrap();
        assert!((p2.matrix() - p.matrix()).norm() < 1e-11);
        assert!((g2.matrix() - g.matrix()).norm() < 1e-11);
    }

    #[test]
    fn fiber_vector_rejects_bad_f() {
        let p = random_hermitian_point_with(3, 1, &mut rng::from_seed(53)).unwrap();
        assert!(matches!(
            FiberVector::new(p.clone(), ComplexMatrix::identity(3)),
            Err(Error::FiberCondition(_))
        ));
    }

    #[test]
    fn metric_iso_examples() {
        let q = ProjectionPoint::new(ComplexMatrix::real_diag(&[1.0, 0.0]), 1).unwrap();
        let zero = TangentVector::new(q.clone(), ComplexMatrix::zeros(2)).unwrap();
        assert!(metric_iso(&zero).unwrap().matrix().is_zero());
        let a = TangentVector::new(q.clone(), ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert_eq!(metric_iso(&a).unwrap().matrix(), &ComplexMatrix::unit(2, 0, 1));
        for seed in 0..10 {
            let mut r = rng::from_seed(60 + seed);
            let p = random_hermitian_point_with(4, 2, &mut r).unwrap();
            let a = random_hermitian_tangent_with(&p, &mut r);
            let b = random_hermitian_tangent_with(&p, &mut r);
            let lhs = 2.0 * (p.matrix() * a.matrix() * b.matrix()).trace().re;
            let rhs = (a.matrix() * b.matrix()).trace();
            assert!((lhs - rhs.re).abs() < 1e-12 * (1.0 + a.norm() * b.norm()));
            assert!(rhs.im.abs() < 1e-12 * (1.0 + a.norm() * b.norm()));
        }
        let off = random_point(3, 1, 1.0, 70).unwrap();
        let t = random_tangent(&off, 71);
        assert!(metric_iso(&t).is_err());
        let h = random_point(3, 1, 0.0, 72).unwrap();
        let skew = random_tangent(&h, 73).scale(I);
        if skew.matrix().skew_part().norm() > 1e-6 {
            assert!(metric_iso(&skew).is_err());
        }
    }

    #[test]
    fn json_round_trip() {
        let q = random_point(3, 1, 1.0, 80).unwrap();
        let a = random_tangent(&q, 81);
        let sq = q.to_json();
        assert!(sq.starts_with("{\"kind\":\"point\",\"rank\":1,\"matrix\":{\"dim\":3"));
        assert_eq!(ProjectionPoint::from_json(&sq).unwrap(), q);
        let sa = a.to_json();
        assert!(sa.contains("\"base\""));
        assert_eq!(TangentVector::from_json(&sa).unwrap(), a);
        assert!(TangentVector::from_json(&sq).is_err());
    }
}
