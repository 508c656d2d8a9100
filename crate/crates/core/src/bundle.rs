//! The bundle projection seen from above: the connection and its curvature,
//! the embedding into `Gr × Gr`, the compactification of `Tℙ`, and the
//! section kernel `𝒮` with the maps `Ψ`, `Ψ†`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{comm, range_basis, C64, ComplexMatrix, I};
use crate::variety::{
    base_projection, fiber_residual, pushforward_at, same_base, FiberVector, HermitianPoint, ProjectionPoint,
    TangentVector, DEFAULT_TOL,
};

/// Pairs whose frame `[basis range(p₁) | basis range(p₂)^⊥]` has a larger
/// condition number are treated as outside the embedded image.
pub const TRANSVERSALITY_LIMIT: f64 = 1e8;

/// A point of `Gr(n) × Gr(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairPoint {
    pub p1: HermitianPoint,
    pub p2: HermitianPoint,
}

impl PairPoint {
    pub fn new(p1: HermitianPoint, p2: HermitianPoint) -> Result<Self> {
        p1.matrix().ensure_same_dim(p2.matrix())?;
        if p1.rank() != p2.rank() {
            return Err(Error::InvalidRank { rank: p2.rank(), dim: p2.dim() });
        }
        Ok(Self { p1, p2 })
    }

    pub fn swap(&self) -> Self {
        Self { p1: self.p2.clone(), p2: self.p1.clone() }
    }

    /// Condition number of `[V₁ | W₂]`, with `V₁` an orthonormal basis of
    /// `range(p₁)` and `W₂` one of `range(p₂)^⊥`; finite iff
    /// `ℂᵈ = range(p₁) ⊕ range(p₂)^⊥`.
    pub fn transversality_condition(&self) -> f64 {
        match self.frame() {
            Ok((_, frame)) => condition_number(&frame),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn is_transverse(&self) -> bool {
        self.transversality_condition() <= TRANSVERSALITY_LIMIT
    }

    fn frame(&self) -> Result<(usize, DMatrix<C64>)> {
        let n = self.p1.rank();
        let d = self.p1.dim();
        let v1 = range_basis(self.p1.matrix(), n, 1e-10)?;
        let w2 = range_basis(self.p2.complement().matrix(), d - n, 1e-10)?;
        let mut frame = DMatrix::zeros(d, d);
        frame.columns_mut(0, n).copy_from(&v1);
        frame.columns_mut(n, d - n).copy_from(&w2);
        Ok((n, frame))
    }
}

fn condition_number(m: &DMatrix<C64>) -> f64 {
    let s = m.clone().singular_values();
    let max = s.max();
    let min = s.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `q ↦ (π(q), π(q*))`.
pub fn compactify(q: &ProjectionPoint) -> Result<PairPoint> {
    Ok(PairPoint { p1: base_projection(q)?, p2: base_projection(&q.adjoint())? })
}

/// The oblique projection with range `range(p₁)` and kernel `range(p₂)^⊥`.
///
/// With `B = [V₁ | W₂]` the defining conditions `rV₁ = V₁`, `rW₂ = 0` read
/// `rB = [V₁ | 0]`, solved through an LU factorization of `Bᵀ`.
pub fn decompactify(pair: &PairPoint) -> Result<ProjectionPoint> {
    let (n, frame) = pair.frame().map_err(|_| Error::NotTransverse(f64::INFINITY))?;
    let cond = condition_number(&frame);
    if !(cond <= TRANSVERSALITY_LIMIT) {
        return Err(Error::NotTransverse(cond));
    }
    let d = frame.nrows();
    let mut rhs = DMatrix::zeros(d, d);
    rhs.columns_mut(0, n).copy_from(&frame.columns(0, n));
    let rt = frame
        .transpose()
        .lu()
        .solve(&rhs.transpose())
        .ok_or(Error::NotTransverse(cond))?;
    Ok(ProjectionPoint::new_unchecked(ComplexMatrix::from_inner(rt.transpose())?, n))
}

/// A tangent vector to `Gr × Gr` at a pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairTangent {
    pub pair: PairPoint,
    pub a1: ComplexMatrix,
    pub a2: ComplexMatrix,
}

/// Differential of [`compactify`]: `A ↦ (π_*(A), π_*(A*))`.
pub fn chart_push(a: &TangentVector) -> Result<PairTangent> {
    let pair = compactify(a.base())?;
    let q = a.base().matrix();
    let a1 = pushforward_at(q, &pair.p1, a.matrix());
    let a2 = pushforward_at(&q.adjoint(), &pair.p2, &a.matrix().adjoint());
    Ok(PairTangent { pair, a1: a1.matrix().clone(), a2: a2.matrix().clone() })
}

/// Inverse of [`chart_push`] at `q = decompactify(pair)`:
/// `A = (1 − q)A₁q + qA₂(1 − q)`.
pub fn chart_pull(q: &ProjectionPoint, a1: &ComplexMatrix, a2: &ComplexMatrix) -> Result<TangentVector> {
    q.matrix().ensure_same_dim(a1)?;
    q.matrix().ensure_same_dim(a2)?;
    let qm = q.matrix();
    let co = ComplexMatrix::identity(q.dim()) - qm;
    let a = &(&co * a1) * qm + &(qm * a2) * &co;
    Ok(TangentVector::new_unchecked(q.clone(), a))
}

/// `J_x(M) = i[M, x]`.
fn jx(x: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    comm(m, x).scale(I)
}

/// The extension of `Ĵ` to `Gr × Gr`:
/// `(A, B) ↦ (J_pA, −J_qB + J_qA − J_q²J_pA)` at `(p, q)`.
pub fn extended_jhat(t: &PairTangent) -> PairTangent {
    let p = t.pair.p1.matrix();
    let q = t.pair.p2.matrix();
    let jpa = jx(p, &t.a1);
    let b = -jx(q, &t.a2) + jx(q, &t.a1) - jx(q, &jx(q, &jpa));
    PairTangent { pair: t.pair.clone(), a1: jpa, a2: b }
}

/// The product structure `(J, ±J)` on `Gr × Gr`.
pub fn pair_j(t: &PairTangent, sign: f64) -> PairTangent {
    PairTangent {
        pair: t.pair.clone(),
        a1: jx(t.pair.p1.matrix(), &t.a1),
        a2: jx(t.pair.p2.matrix(), &t.a2).scale_real(sign),
    }
}

/// `Ĵ` on the variety, through the `Gr × Gr` chart.
pub fn apply_jhat(a: &TangentVector) -> Result<TangentVector> {
    let t = chart_push(a)?;
    let jt = extended_jhat(&t);
    chart_pull(a.base(), &jt.a1, &jt.a2)
}

/// For rank 1, a pair lies in the image iff `pq ≠ 0`.
pub fn rank1_image_test(p: &HermitianPoint, q: &HermitianPoint) -> Result<bool> {
    if p.rank() != 1 || q.rank() != 1 {
        return Err(Error::Unsupported("the pq ≠ 0 image test is for rank 1"));
    }
    p.matrix().ensure_same_dim(q.matrix())?;
    Ok((p.matrix() * q.matrix()).norm() > 1e-8)
}

/// `H(A) = [q, [π(q), A]]`, the horizontal lift of a tangent at `π(q)`.
pub fn horizontal_lift(q: &ProjectionPoint, a: &TangentVector) -> Result<TangentVector> {
    let p = base_projection(q)?;
    p.matrix().ensure_same_dim(a.matrix())?;
    let r = (p.matrix() - a.base().matrix()).norm();
    if r > DEFAULT_TOL * (1.0 + q.norm()) {
        return Err(Error::BaseMismatch(r));
    }
    Ok(TangentVector::new_unchecked(q.clone(), comm(q.matrix(), &comm(p.matrix(), a.matrix()))))
}

/// Curvature `F(A, B)C = C[A, B] − [A, B]C` at a point of the zero section.
pub fn curvature_f(a: &TangentVector, b: &TangentVector, c: &FiberVector) -> Result<ComplexMatrix> {
    same_base(a, b)?;
    let r = (a.base().matrix() - c.base().matrix()).norm();
    if r > DEFAULT_TOL * (1.0 + a.base().norm()) {
        return Err(Error::BaseMismatch(r));
    }
    let ab = comm(a.matrix(), b.matrix());
    Ok(c.matrix() * &ab - &ab * c.matrix())
}

fn require_rank_one_hermitian_direction(q: &HermitianPoint, a: &TangentVector) -> Result<()> {
    if q.rank() != 1 {
        return Err(Error::Unsupported("the tangent compactification is for rank 1"));
    }
    let r = (q.matrix() - a.base().matrix()).norm();
    if r > DEFAULT_TOL * (1.0 + q.dim() as f64) {
        return Err(Error::BaseMismatch(r));
    }
    let s = a.matrix().skew_part().norm();
    if s > DEFAULT_TOL * (1.0 + a.norm()) {
        return Err(Error::NotHermitian(s));
    }
    Ok(())
}

/// `f(q, tA) = (q + tA + t²AqA) / (1 + t²Tr(qA²))`; `t = ±∞` gives the limit.
///
/// For `|t| > 1` numerator and denominator are divided by `t²` first.
pub fn tangent_compactify(q: &HermitianPoint, a: &TangentVector, t: f64) -> Result<HermitianPoint> {
    require_rank_one_hermitian_direction(q, a)?;
    if t.is_nan() {
        return Err(Error::NonFinite("compactification parameter"));
    }
    if t.is_infinite() {
        return tangent_compactify_limit(q, a);
    }
    let qm = q.matrix();
    let am = a.matrix();
    let aqa = &(am * qm) * am;
    let tr = (qm * &(am * am)).trace().re;
    let m = if t.abs() <= 1.0 {
        (qm + &am.scale_real(t) + aqa.scale_real(t * t)).scale_real(1.0 / (1.0 + t * t * tr))
    } else {
        let s = 1.0 / t;
        (qm.scale_real(s * s) + am.scale_real(s) + aqa).scale_real(1.0 / (s * s + tr))
    };
    HermitianPoint::new(ProjectionPoint::new_unchecked(m.hermitian_part(), 1))
}

/// `AqA / Tr(qA²)`.
pub fn tangent_compactify_limit(q: &HermitianPoint, a: &TangentVector) -> Result<HermitianPoint> {
    require_rank_one_hermitian_direction(q, a)?;
    let qm = q.matrix();
    let am = a.matrix();
    let tr = (qm * &(am * am)).trace().re;
    if !(tr > 1e-14 * (1.0 + a.norm() * a.norm())) {
        return Err(Error::DegenerateDirection(tr));
    }
    let m = (&(am * qm) * am).scale_real(1.0 / tr);
    HermitianPoint::new(ProjectionPoint::new_unchecked(m.hermitian_part(), 1))
}

/// The fiber map `𝒮(source, target): A ↦ pA − pAp`, `p` the target.
#[derive(Clone, Debug)]
pub struct SectionKernel {
    pub source: HermitianPoint,
    pub target: HermitianPoint,
}

impl SectionKernel {
    pub fn new(source: HermitianPoint, target: HermitianPoint) -> Result<Self> {
        source.matrix().ensure_same_dim(target.matrix())?;
        Ok(Self { source, target })
    }

    pub fn apply(&self, a: &FiberVector) -> Result<FiberVector> {
        let r = (a.base().matrix() - self.source.matrix()).norm();
        if r > DEFAULT_TOL * (1.0 + self.source.dim() as f64) {
            return Err(Error::BaseMismatch(r));
        }
        Ok(FiberVector::new_unchecked(self.target.clone(), section_map(self.target.matrix(), a.matrix())))
    }
}

pub(crate) fn section_map(p: &ComplexMatrix, a: &ComplexMatrix) -> ComplexMatrix {
    let pa = p * a;
    &pa - &(&pa * p)
}

/// `𝒮(q, p)(A) = pA − pAp` for a fiber vector `A` over `q`.
pub fn section_s(p: &HermitianPoint, a: &FiberVector) -> Result<FiberVector> {
    SectionKernel::new(a.base().clone(), p.clone())?.apply(a)
}

/// `∇_S B = B + [B, A]`, a tangent at `q + A`.
pub fn nabla_s(a: &FiberVector, b: &TangentVector) -> Result<TangentVector> {
    let r = (a.base().matrix() - b.base().matrix()).norm();
    if r > DEFAULT_TOL * (1.0 + b.base().norm()) {
        return Err(Error::BaseMismatch(r));
    }
    let out = b.matrix() + &comm(b.matrix(), a.matrix());
    Ok(TangentVector::new_unchecked(a.point(), out))
}

/// `Ψ_M(q) = qM − qMq`; a fiber vector over `π(q)`.
#[derive(Clone, Debug)]
pub struct Psi {
    pub m: ComplexMatrix,
}

pub fn psi(m: &ComplexMatrix) -> Psi {
    Psi { m: m.clone() }
}

impl Psi {
    pub fn eval(&self, q: &ComplexMatrix) -> ComplexMatrix {
        section_map(q, &self.m)
    }

    pub fn at(&self, q: &HermitianPoint) -> Result<FiberVector> {
        q.matrix().ensure_same_dim(&self.m)?;
        Ok(FiberVector::new_unchecked(q.clone(), self.eval(q.matrix())))
    }
}

/// `Ψ†_q: M ↦ qM − qMq` on traceless matrices.
#[derive(Clone, Debug)]
pub struct PsiDagger {
    pub q: HermitianPoint,
}

pub fn psi_dagger(q: &HermitianPoint) -> PsiDagger {
    PsiDagger { q: q.clone() }
}

impl PsiDagger {
    pub fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.q.matrix().ensure_same_dim(m)?;
        let tr = m.trace().norm();
        if tr > DEFAULT_TOL * (1.0 + m.norm()) {
            return Err(Error::NotTraceless(tr));
        }
        Ok(section_map(self.q.matrix(), m))
    }

    /// Complex rank of the operator restricted to traceless matrices.
    pub fn rank(&self) -> usize {
        let d = self.q.dim();
        let mut basis = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    basis.push(ComplexMatrix::unit(d, i, j));
                } else if i + 1 < d {
                    basis.push(ComplexMatrix::unit(d, i, i) - ComplexMatrix::unit(d, i + 1, i + 1));
                }
            }
        }
        let cols: Vec<_> = basis
            .iter()
            .map(|b| {
                let v = section_map(self.q.matrix(), b);
                nalgebra::DVector::from_iterator(d * d, v.inner().iter().copied())
            })
            .collect();
        let m = DMatrix::from_columns(&cols);
        let s = m.singular_values();
        let max = s.max();
        s.iter().filter(|&&x| x > 1e-10 * max.max(1.0)).count()
    }
}

/// Orthogonality residual and dimension count for the splitting of `T_q`
/// into horizontal lifts and fiber directions.
#[derive(Clone, Debug, Serialize)]
pub struct SplittingReport {
    pub horizontal_dim: usize,
    pub vertical_dim: usize,
    pub total_dim: usize,
    pub ambient_dim: usize,
}

pub fn connection_splitting(q: &ProjectionPoint) -> Result<SplittingReport> {
    let d = q.dim();
    let p = base_projection(q)?;
    let mut horizontal = Vec::new();
    let mut vertical = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for s in [C64::new(1.0, 0.0), I] {
                let e = ComplexMatrix::unit(d, i, j).scale(s);
                let herm = p.point().project(&e.hermitian_part());
                let lift = horizontal_lift(q, &TangentVector::new_unchecked(p.point().clone(), herm))?;
                horizontal.push(lift.matrix().clone());
                let f = crate::variety::fiber_part(p.matrix(), &e);
                debug_assert!(fiber_residual(p.matrix(), &f) < 1e-12);
                vertical.push(f);
            }
        }
    }
    let real_rank = |vs: &[ComplexMatrix]| crate::linalg::real_orthonormal_basis(vs, 1e-8).len();
    let mut all = horizontal.clone();
    all.extend(vertical.iter().cloned());
    Ok(SplittingReport {
        horizontal_dim: real_rank(&horizontal),
        vertical_dim: real_rank(&vertical),
        total_dim: real_rank(&all),
        ambient_dim: 4 * q.rank() * (d - q.rank()),
    })
}
