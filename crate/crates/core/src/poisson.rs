//! The tautological 1-form, the canonical symplectic form as its exterior
//! derivative, fiberwise-linear hat functions and their Poisson brackets.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{canonical_flow, exterior_derivative, richardson, FnForm, FD_STEP};
use crate::linalg::{comm, flow, hs_inner, real_orthonormal_basis, C64, ComplexMatrix, I};
use crate::rng;
use crate::variety::{base_projection, random_point_with, same_base, ProjectionPoint, TangentVector};

/// `θ(q, A) = −Tr(π(q)A)`; its real part is the tautological 1-form.
pub fn taut_form(a: &TangentVector) -> Result<C64> {
    let p = base_projection(a.base())?;
    Ok(-(p.matrix() * a.matrix()).trace())
}

fn re_taut_form() -> FnForm<impl Fn(&ProjectionPoint, &[TangentVector]) -> Result<C64> + Sync> {
    FnForm::new(1, |_q: &ProjectionPoint, t: &[TangentVector]| Ok(C64::new(taut_form(&t[0])?.re, 0.0)))
}

/// `ω = d(Re θ)` evaluated by the intrinsic exterior derivative.
pub fn canonical_symplectic(a: &TangentVector, b: &TangentVector) -> Result<f64> {
    same_base(a, b)?;
    Ok(exterior_derivative(&re_taut_form(), &[a.clone(), b.clone()])?.re)
}

/// Real orthonormal basis of `T_q`: the tangent projections of `E_ab`, `iE_ab`.
pub fn tangent_basis(q: &ProjectionPoint) -> Vec<ComplexMatrix> {
    let d = q.dim();
    let mut spanning = Vec::with_capacity(2 * d * d);
    for i in 0..d {
        for j in 0..d {
            let e = ComplexMatrix::unit(d, i, j);
            spanning.push(q.project(&e));
            spanning.push(q.project(&e.scale(I)));
        }
    }
    real_orthonormal_basis(&spanning, 1e-8)
}

/// Tangent basis and the matrix `W_ij = ω(E_i, E_j)`.
#[derive(Clone, Debug)]
pub struct SymplecticMatrix {
    pub basis: Vec<ComplexMatrix>,
    pub w: DMatrix<f64>,
    pub rank: usize,
}

pub fn symplectic_matrix(q: &ProjectionPoint) -> Result<SymplecticMatrix> {
    let basis = tangent_basis(q);
    let k = basis.len();
    let expected = 4 * q.rank() * (q.dim() - q.rank());
    if k != expected {
        return Err(Error::DegenerateSymplectic { rank: k, expected });
    }
    let tangents: Vec<TangentVector> = basis.iter().map(|e| TangentVector::new_unchecked(q.clone(), e.clone())).collect();
    let mut w = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in (i + 1)..k {
            let v = canonical_symplectic(&tangents[i], &tangents[j])?;
            w[(i, j)] = v;
            w[(j, i)] = -v;
        }
    }
    let s = w.clone().singular_values();
    let rank = s.iter().filter(|&&x| x > 1e-6 * s.max()).count();
    if rank != expected {
        return Err(Error::DegenerateSymplectic { rank, expected });
    }
    Ok(SymplecticMatrix { basis, w, rank })
}

/// The fiberwise-linear function `M̂(q) = Tr([π(q), q]M) = Tr((q − π(q))M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HatFunction {
    pub m: ComplexMatrix,
}

impl HatFunction {
    pub fn new(m: ComplexMatrix) -> Self {
        Self { m }
    }

    pub fn eval(&self, q: &ProjectionPoint) -> Result<C64> {
        hat(&self.m, q)
    }
}

pub fn hat(m: &ComplexMatrix, q: &ProjectionPoint) -> Result<C64> {
    q.matrix().ensure_same_dim(m)?;
    let p = base_projection(q)?;
    Ok((&comm(p.matrix(), q.matrix()) * m).trace())
}

/// A complexified tangent vector `re + i·im`.
#[derive(Clone, Debug)]
pub struct ComplexifiedTangent {
    pub re: TangentVector,
    pub im: TangentVector,
}

/// `𝒳_M(q) = [q, (M − M*)/2] + i[q, (M + M*)/2i]`.
pub fn vector_field_x(m: &ComplexMatrix, q: &ProjectionPoint) -> Result<ComplexifiedTangent> {
    q.matrix().ensure_same_dim(m)?;
    let skew = m.skew_part();
    let herm_over_i = m.hermitian_part().scale(-I);
    Ok(ComplexifiedTangent {
        re: TangentVector::new_unchecked(q.clone(), comm(q.matrix(), &skew)),
        im: TangentVector::new_unchecked(q.clone(), comm(q.matrix(), &herm_over_i)),
    })
}

/// Components of `df` in the basis, each a derivative along a canonical flow.
fn gradient<F>(q: &ProjectionPoint, basis: &[ComplexMatrix], f: F) -> Result<DVector<C64>>
where
    F: Fn(&ProjectionPoint) -> Result<C64>,
{
    let mut g = DVector::zeros(basis.len());
    for (k, e) in basis.iter().enumerate() {
        let n = comm(q.matrix(), e);
        let h = FD_STEP / (1.0 + n.norm());
        g[k] = richardson(h, |t| f(&canonical_flow(q, &n, t)))?;
    }
    Ok(g)
}

fn raw_bracket(m: &ComplexMatrix, n: &ComplexMatrix, q: &ProjectionPoint) -> Result<C64> {
    let sm = symplectic_matrix(q)?;
    let gm = gradient(q, &sm.basis, |p| hat(m, p))?;
    let gn = gradient(q, &sm.basis, |p| hat(n, p))?;
    let lu = sm.w.clone().lu();
    let solve = |v: DVector<f64>| lu.solve(&v).ok_or(Error::DegenerateSymplectic { rank: sm.rank, expected: sm.basis.len() });
    let xr = solve(gn.map(|z| z.re))?;
    let xi = solve(gn.map(|z| z.im))?;
    let x = xr.zip_map(&xi, C64::new);
    Ok(gm.iter().zip(x.iter()).map(|(a, b)| a * b).sum())
}

/// Normalization of the bracket, fitted once so that `{M̂, N̂} = [M, N]^`.
///
/// Only the sign is a genuine choice of orientation; the magnitude comes out
/// as `1/2` because holomorphic functions have twice their holomorphic
/// bracket under the real part of a holomorphic symplectic form.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BracketCalibration {
    pub scale: f64,
    pub residual: f64,
}

const BRACKET_SEED: u64 = 0x6272_6163_6b65_7473;

pub fn bracket_calibration() -> &'static BracketCalibration {
    static CAL: OnceLock<BracketCalibration> = OnceLock::new();
    CAL.get_or_init(|| {
        let mut r = rng::from_seed(BRACKET_SEED);
        let q = random_point_with(2, 1, 1.0, &mut r).expect("valid calibration point");
        let m = crate::linalg::complex_gaussian(2, &mut r);
        let n = crate::linalg::complex_gaussian(2, &mut r);
        let raw = raw_bracket(&m, &n, &q).expect("nondegenerate calibration point");
        let target = hat(&comm(&m, &n), &q).expect("valid calibration point");
        let scale = (target * raw.conj()).re / raw.norm_sqr();
        BracketCalibration { scale, residual: (raw * scale - target).norm() / (1.0 + target.norm()) }
    })
}

/// `{M̂, N̂}(q)` from the canonical symplectic form, complex-bilinear in `(M, N)`.
pub fn poisson_bracket(m: &ComplexMatrix, n: &ComplexMatrix, q: &ProjectionPoint) -> Result<C64> {
    q.matrix().ensure_same_dim(m)?;
    q.matrix().ensure_same_dim(n)?;
    Ok(raw_bracket(m, n, q)? * bracket_calibration().scale)
}

/// Orthonormal basis (Hilbert–Schmidt) of the kernel of `M ↦ M̂`, estimated
/// from the values at sampled points.
#[derive(Clone, Debug)]
pub struct HatKernel {
    pub dim: usize,
    pub rank: usize,
    pub basis: Vec<ComplexMatrix>,
    pub sample_count: usize,
}

impl HatKernel {
    pub fn sample(d: usize, n: usize, samples: usize, seed: u64) -> Result<Self> {
        let count = samples.max(2 * d * d);
        let mut r = rng::from_seed(seed);
        let mut rows = DMatrix::<C64>::zeros(count, d * d);
        for k in 0..count {
            let q = random_point_with(d, n, 1.0, &mut r)?;
            let p = base_projection(&q)?;
            let e = q.matrix() - p.matrix();
            // M̂(q) = Σ_ab e_ba M_ab
            for a in 0..d {
                for b in 0..d {
                    rows[(k, a * d + b)] = e.get(b, a);
                }
            }
        }
        let svd = rows.svd(false, true);
        let v_t = svd.v_t.expect("requested V");
        let smax = svd.singular_values.max();
        let mut basis = Vec::new();
        for (i, s) in svd.singular_values.iter().enumerate() {
            if *s <= 1e-9 * smax {
                basis.push(ComplexMatrix::from_fn(d, |a, b| v_t[(i, a * d + b)].conj()));
            }
        }
        // Columns beyond the number of singular values span the rest of the kernel.
        for i in svd.singular_values.len()..d * d {
            basis.push(ComplexMatrix::from_fn(d, |a, b| v_t[(i, a * d + b)].conj()));
        }
        Ok(Self { dim: d, rank: d * d - basis.len(), basis, sample_count: count })
    }

    pub fn kernel_dim(&self) -> usize {
        self.basis.len()
    }

    /// Removes the kernel component of `m`.
    pub fn project(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = m.clone();
        for k in &self.basis {
            let c = hs_inner(k, m)?;
            out -= &k.scale(c);
        }
        Ok(out)
    }

    pub fn contains(&self, m: &ComplexMatrix) -> Result<bool> {
        Ok(self.project(m)?.norm() <= 1e-10 * (1.0 + m.norm()))
    }
}

fn into_complement(kernel: &HatKernel, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = kernel.project(m)?;
    let moved = (&p - m).norm();
    if moved > 1e-12 * (1.0 + m.norm()) {
        log::warn!("star product representative had a kernel component of norm {moved:.3e}; projected it out");
    }
    Ok(p)
}

/// `M̂ ⋆ N̂ = (MN)^` with both representatives taken orthogonal to the kernel.
pub fn star(m: &ComplexMatrix, n: &ComplexMatrix, kernel: &HatKernel) -> Result<HatFunction> {
    m.ensure_same_dim(n)?;
    let m = into_complement(kernel, m)?;
    let n = into_complement(kernel, n)?;
    Ok(HatFunction::new(&m * &n))
}

/// `|(M̂⋆N̂ − N̂⋆M̂)(q) − {M̂, N̂}(q)|`, with the bracket computed numerically.
pub fn star_commutator_check(m: &ComplexMatrix, n: &ComplexMatrix, q: &ProjectionPoint, kernel: &HatKernel) -> Result<f64> {
    let lhs = star(m, n, kernel)?.eval(q)? - star(n, m, kernel)?.eval(q)?;
    let mp = kernel.project(m)?;
    let np = kernel.project(n)?;
    Ok((lhs - poisson_bracket(&mp, &np, q)?).norm())
}

/// `(ψ(q) − q)/t²` for the flow commutator `ψ = φᴺ₋ₜ ∘ φᴹ₋ₜ ∘ φᴺₜ ∘ φᴹₜ` of the
/// real parts of `𝒳_M`, `𝒳_N`; tends to the real part of `𝒳_{[M,N]}` for skew `M`, `N`.
pub fn flow_commutator(m: &ComplexMatrix, n: &ComplexMatrix, q: &ProjectionPoint, t: f64) -> Result<ComplexMatrix> {
    q.matrix().ensure_same_dim(m)?;
    q.matrix().ensure_same_dim(n)?;
    let ms = m.skew_part();
    let ns = n.skew_part();
    let mut x = q.matrix().clone();
    x = flow(&x, &ms, t);
    x = flow(&x, &ns, t);
    x = flow(&x, &ms, -t);
    x = flow(&x, &ns, -t);
    Ok((&x - q.matrix()).scale_real(1.0 / (t * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_gaussian;
    use crate::variety::{fiber_add, fiber_scale, random_fiber_with, random_hermitian_point_with, random_point, random_tangent};

    fn gauss(d: usize, seed: u64) -> ComplexMatrix {
        complex_gaussian(d, &mut rng::from_seed(seed))
    }

    #[test]
    fn taut_form_examples() {
        let mut r = rng::from_seed(1);
        let h = random_hermitian_point_with(3, 1, &mut r).unwrap();
        let f = random_fiber_with(&h, &mut r);
        assert!(taut_form(&f.as_tangent()).unwrap().norm() < 1e-14);
        let zero = TangentVector::new(h.point().clone(), ComplexMatrix::zeros(3)).unwrap();
        assert_eq!(taut_form(&zero).unwrap(), C64::new(0.0, 0.0));
        for seed in 0..10 {
            let q = random_point(4, 2, 1.0, 10 + seed).unwrap();
            let a = random_tangent(&q, 20 + seed);
            let x = crate::variety::pushforward(&a).unwrap();
            let lhs = (q.matrix() * x.matrix()).trace();
            assert!((lhs - taut_form(&a).unwrap()).norm() < 1e-11 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn symplectic_is_nondegenerate_and_antisymmetric() {
        for (d, n) in [(2, 1), (3, 1), (4, 2)] {
            let q = random_point(d, n, 1.0, 30 + d as u64).unwrap();
            let sm = symplectic_matrix(&q).unwrap();
            assert_eq!(sm.rank, 4 * n * (d - n));
            let a = random_tangent(&q, 40);
            assert!(canonical_symplectic(&a, &a).unwrap().abs() < 1e-9 * (1.0 + a.norm()).powi(2));
        }
    }

    #[test]
    fn hat_examples() {
        let q = ProjectionPoint::new(ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]), 1).unwrap();
        assert!((hat(&ComplexMatrix::unit(2, 1, 0), &q).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(hat(&ComplexMatrix::identity(2), &q).unwrap().norm() < 1e-14);
        let h = random_point(3, 1, 0.0, 50).unwrap();
        assert!(hat(&gauss(3, 51), &h).unwrap().norm() < 1e-13);
        let q = random_point(3, 1, 1.0, 52).unwrap();
        let m = gauss(3, 53);
        let u = crate::linalg::haar_unitary(3, 54).unwrap();
        let conj = |x: &ComplexMatrix| &(&u * x) * &u.adjoint();
        let uq = ProjectionPoint::new(conj(q.matrix()), 1).unwrap();
        assert!((hat(&conj(&m), &uq).unwrap() - hat(&m, &q).unwrap()).norm() < 1e-12);
        let shifted = &m + &ComplexMatrix::identity(3).scale(C64::new(2.0, -3.0));
        assert!((hat(&shifted, &q).unwrap() - hat(&m, &q).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn hat_is_fiberwise_linear() {
        let mut r = rng::from_seed(60);
        let p = random_hermitian_point_with(3, 1, &mut r).unwrap();
        let q = random_fiber_with(&p, &mut r).point();
        let q2 = random_fiber_with(&p, &mut r).point();
        let m = gauss(3, 61);
        let (a, b) = (C64::new(0.5, 1.0), C64::new(-2.0, 0.3));
        let combo = fiber_add(&fiber_scale(&q, a).unwrap(), &fiber_scale(&q2, b).unwrap()).unwrap();
        let lhs = hat(&m, &combo).unwrap();
        let rhs = hat(&m, &q).unwrap() * a + hat(&m, &q2).unwrap() * b;
        assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn vector_field_is_tangent_and_sums_to_commutator() {
        let q = random_point(3, 1, 1.0, 70).unwrap();
        let m = gauss(3, 71);
        let x = vector_field_x(&m, &q).unwrap();
        assert!(q.tangent_residual(x.re.matrix()) < 1e-12);
        assert!(q.tangent_residual(x.im.matrix()) < 1e-12);
        let sum = x.re.matrix() + &x.im.matrix().scale(I);
        assert!((sum - comm(q.matrix(), &m)).norm() < 1e-12);
    }

    #[test]
    fn bracket_matches_hat_of_commutator() {
        let cal = bracket_calibration();
        assert!(cal.residual < 1e-8, "{}", cal.residual);
        assert!((cal.scale.abs() - 0.5).abs() < 1e-8, "{}", cal.scale);
        for seed in 0..4 {
            let d = 2 + seed as usize % 2;
            let q = random_point(d, 1, 1.0, 80 + seed).unwrap();
            let m = gauss(d, 90 + seed);
            let n = gauss(d, 100 + seed);
            let b = poisson_bracket(&m, &n, &q).unwrap();
            let e = hat(&comm(&m, &n), &q).unwrap();
            let scale = 1.0 + m.norm() * n.norm() * q.norm();
            assert!((b - e).norm() < 1e-5 * scale, "{b} vs {e}");
            assert!(poisson_bracket(&m, &m, &q).unwrap().norm() < 1e-6 * scale);
        }
    }

    #[test]
    fn commuting_pair_has_zero_bracket() {
        let q = random_point(3, 1, 1.0, 110).unwrap();
        let m = gauss(3, 111);
        let n = &(&m * &m) + &m.scale(C64::new(0.0, 2.0));
        assert!(poisson_bracket(&m, &n, &q).unwrap().norm() < 1e-6 * (1.0 + m.norm() * n.norm()));
    }

    #[test]
    fn kernel_is_scalars_for_d2() {
        let k = HatKernel::sample(2, 1, 50, 120).unwrap();
        assert_eq!(k.kernel_dim(), 1);
        assert!(k.contains(&ComplexMatrix::identity(2)).unwrap());
        assert!(!k.contains(&ComplexMatrix::unit(2, 0, 1)).unwrap());
    }

    #[test]
    fn star_products() {
        let k = HatKernel::sample(3, 1, 60, 130).unwrap();
        let m = gauss(3, 131);
        let n = gauss(3, 132);
        let q = random_point(3, 1, 1.0, 133).unwrap();
        let shifted = &m + &ComplexMatrix::identity(3);
        let s1 = star(&shifted, &n, &k).unwrap();
        let s2 = star(&m, &n, &k).unwrap();
        assert!((s1.eval(&q).unwrap() - s2.eval(&q).unwrap()).norm() < 1e-10);
        let mp = k.project(&m).unwrap();
        let np = k.project(&n).unwrap();
        let lhs = star(&m, &n, &k).unwrap().eval(&q).unwrap() - star(&n, &m, &k).unwrap().eval(&q).unwrap();
        let rhs = hat(&comm(&mp, &np), &q).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
        let res = star_commutator_check(&m, &n, &q, &k).unwrap();
        assert!(res < 1e-5 * (1.0 + m.norm() * n.norm() * q.norm()));
    }

    #[test]
    fn flows_commute_like_the_algebra() {
        let q = random_point(3, 1, 1.0, 140).unwrap();
        let m = gauss(3, 141).skew_part();
        let n = gauss(3, 142).skew_part();
        let t = 1e-3;
        let c = flow_commutator(&m, &n, &q, t).unwrap();
        let x = comm(q.matrix(), &comm(&m, &n));
        assert!((c - &x).norm() < 1e-2 * (1.0 + x.norm()), "{}", x.norm());
    }
}
