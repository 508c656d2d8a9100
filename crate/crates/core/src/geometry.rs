//! Complex structures, the holomorphic symplectic form, the norm potential and
//! the hyperkähler metric, plus an exterior derivative that works pointwise
//! through the canonical vector fields `p ↦ [p, [q, A]]`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::bundle;
use crate::error::{Error, Result};
use crate::linalg::{comm, flow, hs_inner, C64, ComplexMatrix, I};
use crate::rng;
use crate::variety::{random_point_with, random_tangent_with, same_base, ProjectionPoint, TangentVector};

/// Base points closer to zero than this are rejected by the norm-based structures.
pub const MIN_BASE_NORM: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ComplexStructureTag {
    /// `A ↦ iA`
    I,
    /// `A ↦ i[A, q]`
    J,
    /// `IJ: A ↦ [q, A]`; squares to `+1`.
    K,
    /// Cotangent-bundle structure, evaluated in the `Gr × Gr` chart.
    Jhat,
    /// The metric-dual structure on `T*ℙ`; rank 1 only.
    Jbold,
}

pub fn apply_structure(tag: ComplexStructureTag, a: &TangentVector) -> Result<TangentVector> {
    let q = a.base().matrix();
    let m = a.matrix();
    let out = match tag {
        ComplexStructureTag::I => m.scale(I),
        ComplexStructureTag::J => comm(m, q).scale(I),
        ComplexStructureTag::K => comm(q, m),
        ComplexStructureTag::Jhat => return bundle::apply_jhat(a),
        ComplexStructureTag::Jbold => jbold(a)?,
    };
    Ok(a.with_matrix(out))
}

fn check_base_norm(q: &ComplexMatrix) -> Result<f64> {
    let t = q.norm();
    if !(t >= MIN_BASE_NORM) {
        return Err(Error::DegenerateBase(t));
    }
    Ok(t)
}

fn require_rank_one(a: &TangentVector) -> Result<()> {
    if a.base().rank() != 1 {
        return Err(Error::Unsupported("the hyperkähler structure is only defined for rank 1"));
    }
    Ok(())
}

/// `𝐉A = (i/‖q‖)[q, A*] − (i/2‖q‖³) Tr(A*q) [q, q*]`.
///
/// With a plus sign on the second term `𝐉²` fails to be `−1` off the zero
/// section; see `printed_sign_is_not_a_complex_structure`.
fn jbold(a: &TangentVector) -> Result<ComplexMatrix> {
    require_rank_one(a)?;
    let q = a.base().matrix();
    let t = check_base_norm(q)?;
    let a_star = a.matrix().adjoint();
    let first = comm(q, &a_star).scale(I / t);
    let coef = (&a_star * q).trace() * I / (2.0 * t.powi(3));
    let second = comm(q, &q.adjoint()).scale(coef);
    Ok(first - second)
}

/// `Ω(A, B) = i Tr(q[A, B])`.
pub fn omega(a: &TangentVector, b: &TangentVector) -> Result<C64> {
    same_base(a, b)?;
    Ok(omega_at(a.base().matrix(), a.matrix(), b.matrix()))
}

pub(crate) fn omega_at(q: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    (q * &comm(a, b)).trace() * I
}

/// The Kähler potential `τ(q) = ‖q‖`.
pub fn tau(q: &ComplexMatrix) -> Result<f64> {
    let t = q.norm();
    if t < MIN_BASE_NORM {
        return Err(Error::ZeroMatrix);
    }
    Ok(t)
}

/// `dd^cτ(A, B)` at any nonzero `q`, in closed form.
pub fn kahler_2form(q: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    q.ensure_same_dim(a)?;
    q.ensure_same_dim(b)?;
    let t = tau(q)?;
    let ab = hs_inner(a, b)?;
    let ba = hs_inner(b, a)?;
    let aq = hs_inner(a, q)?;
    let qb = hs_inner(q, b)?;
    let bq = hs_inner(b, q)?;
    let qa = hs_inner(q, a)?;
    Ok((ab - ba) * (I / t) - (aq * qb - bq * qa) * (I / (2.0 * t.powi(3))))
}

/// `Re[(2/‖q‖) Tr(A*B) − (1/‖q‖³) Tr(A*q) Tr(Bq*)]`, the metric with the
/// second normalization; equals `dd^cτ(IA, B)`.
pub fn metric_g_unscaled(a: &TangentVector, b: &TangentVector) -> Result<f64> {
    same_base(a, b)?;
    require_rank_one(a)?;
    let q = a.base().matrix();
    let t = check_base_norm(q)?;
    Ok(g_family(q, a.matrix(), b.matrix(), t, 2.0, 1.0))
}

/// `Re[(1/‖q‖) Tr(A*B) − (1/2‖q‖³) Tr(A*q) Tr(Bq*)]`.
pub fn metric_h(a: &TangentVector, b: &TangentVector) -> Result<f64> {
    same_base(a, b)?;
    require_rank_one(a)?;
    let q = a.base().matrix();
    let t = check_base_norm(q)?;
    Ok(g_family(q, a.matrix(), b.matrix(), t, 1.0, 0.5))
}

fn g_family(q: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix, t: f64, c1: f64, c3: f64) -> f64 {
    let a_star = a.adjoint();
    let ab = (&a_star * b).trace();
    let aq = (&a_star * q).trace();
    let bq = (b * &q.adjoint()).trace();
    (ab * (c1 / t) - aq * bq * (c3 / t.powi(3))).re
}

/// The hyperkähler metric: the calibrated multiple of [`metric_g_unscaled`].
pub fn metric_g(a: &TangentVector, b: &TangentVector) -> Result<f64> {
    Ok(metric_calibration().constant * metric_g_unscaled(a, b)?)
}

/// The scaling `c` for which `c · g_unscaled(𝐉A, B) = Re Ω(A, B)`, fitted by
/// least squares on a fixed sample.
#[derive(Clone, Debug, Serialize)]
pub struct MetricCalibration {
    pub constant: f64,
    /// Largest `|c · g(𝐉A,B) − Re Ω(A,B)| / (1 + ‖A‖‖B‖)` over the sample.
    pub max_residual: f64,
    /// Largest `‖𝐉²A + A‖ / (1 + ‖A‖)` over the sample.
    pub square_residual: f64,
    pub samples: usize,
}

const CALIBRATION_SEED: u64 = 0x6361_6c69_6272_6174;

pub fn metric_calibration() -> &'static MetricCalibration {
    static CAL: OnceLock<MetricCalibration> = OnceLock::new();
    CAL.get_or_init(|| calibrate_metric(CALIBRATION_SEED, 24).expect("calibration sample is valid"))
}

pub fn calibrate_metric(seed: u64, samples: usize) -> Result<MetricCalibration> {
    let mut r = rng::from_seed(seed);
    let mut rows = Vec::with_capacity(samples);
    let mut square_residual: f64 = 0.0;
    for k in 0..samples {
        let d = 2 + k % 2;
        let q = random_point_with(d, 1, 1.0, &mut r)?;
        let a = random_tangent_with(&q, &mut r);
        let b = random_tangent_with(&q, &mut r);
        let ja = apply_structure(ComplexStructureTag::Jbold, &a)?;
        let jja = apply_structure(ComplexStructureTag::Jbold, &ja)?;
        square_residual = square_residual.max((jja.matrix() + a.matrix()).norm() / (1.0 + a.norm()));
        let g = metric_g_unscaled(&ja, &b)?;
        let w = omega(&a, &b)?.re;
        rows.push((g, w, 1.0 + a.norm() * b.norm()));
    }
    let (num, den) = rows.iter().fold((0.0, 0.0), |(n, d), (g, w, _)| (n + g * w, d + g * g));
    if den == 0.0 {
        return Err(Error::NoSamples);
    }
    let constant = num / den;
    let max_residual = rows
        .iter()
        .map(|(g, w, s)| (constant * g - w).abs() / s)
        .fold(0.0, f64::max);
    Ok(MetricCalibration { constant, max_residual, square_residual, samples })
}

/// A `k`-form: an evaluator on `k` tangent vectors at a common point.
pub trait DifferentialForm: Sync {
    fn degree(&self) -> usize;
    fn eval(&self, q: &ProjectionPoint, tangents: &[TangentVector]) -> Result<C64>;
}

/// A form given by a closure.
pub struct FnForm<F> {
    degree: usize,
    f: F,
}

impl<F> FnForm<F>
where
    F: Fn(&ProjectionPoint, &[TangentVector]) -> Result<C64> + Sync,
{
    pub fn new(degree: usize, f: F) -> Self {
        Self { degree, f }
    }
}

impl<F> DifferentialForm for FnForm<F>
where
    F: Fn(&ProjectionPoint, &[TangentVector]) -> Result<C64> + Sync,
{
    fn degree(&self) -> usize {
        self.degree
    }

    fn eval(&self, q: &ProjectionPoint, tangents: &[TangentVector]) -> Result<C64> {
        check_arity(self.degree, tangents.len())?;
        (self.f)(q, tangents)
    }
}

fn check_arity(degree: usize, got: usize) -> Result<()> {
    if got != degree {
        return Err(Error::Arity { degree, expected: degree, got });
    }
    Ok(())
}

/// `Ω` as a 2-form.
pub struct Omega;

impl DifferentialForm for Omega {
    fn degree(&self) -> usize {
        2
    }

    fn eval(&self, q: &ProjectionPoint, t: &[TangentVector]) -> Result<C64> {
        check_arity(2, t.len())?;
        Ok(omega_at(q.matrix(), t[0].matrix(), t[1].matrix()))
    }
}

/// `g(I·, ·)` as a real 2-form, `g` the calibrated hyperkähler metric.
pub struct MetricTwoForm;

impl DifferentialForm for MetricTwoForm {
    fn degree(&self) -> usize {
        2
    }

    fn eval(&self, _q: &ProjectionPoint, t: &[TangentVector]) -> Result<C64> {
        check_arity(2, t.len())?;
        let ia = t[0].scale(I);
        Ok(C64::new(metric_g(&ia, &t[1])?, 0.0))
    }
}

/// Base finite-difference step, divided by `1 + ‖[q, A]‖` per direction.
pub const FD_STEP: f64 = 1e-4;

/// Central difference with one Richardson step; `f(t)` must be smooth near 0.
pub(crate) fn richardson<F>(h: f64, f: F) -> Result<C64>
where
    F: Fn(f64) -> Result<C64>,
{
    let central = |s: f64| -> Result<C64> { Ok((f(s)? - f(-s)?) / (2.0 * s)) };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// `q(t) = exp(−t[q,A]) q exp(t[q,A])`, the flow of the canonical field of `A`.
pub(crate) fn canonical_flow(q: &ProjectionPoint, n: &ComplexMatrix, t: f64) -> ProjectionPoint {
    ProjectionPoint::new_unchecked(flow(q.matrix(), n, t), q.rank())
}

/// Derivative at `t = 0` of `f(q(t))` along the canonical flow of `a`.
pub fn directional_derivative<F>(a: &TangentVector, f: F) -> Result<C64>
where
    F: Fn(&ProjectionPoint) -> Result<C64>,
{
    let q = a.base();
    let n = comm(q.matrix(), a.matrix());
    let h = FD_STEP / (1.0 + n.norm());
    richardson(h, |t| f(&canonical_flow(q, &n, t)))
}

/// `dω(A₀, …, A_k) = Σ (−1)ʲ Aⱼ ω(𝐀₀, …, 𝐀̂ⱼ, …, 𝐀_k)` with `𝐀_p = [p, [q, A]]`.
///
/// The canonical fields commute at `q`, so no bracket terms appear.
pub fn exterior_derivative(form: &dyn DifferentialForm, tangents: &[TangentVector]) -> Result<C64> {
    let k = form.degree();
    if tangents.len() != k + 1 {
        return Err(Error::Arity { degree: k, expected: k + 1, got: tangents.len() });
    }
    for t in &tangents[1..] {
        same_base(&tangents[0], t)?;
    }
    let q = tangents[0].base();
    let gens: Vec<ComplexMatrix> = tangents.iter().map(|a| comm(q.matrix(), a.matrix())).collect();
    let mut total = C64::new(0.0, 0.0);
    for j in 0..=k {
        let term = directional_derivative(&tangents[j], |p| {
            let fields: Vec<TangentVector> = gens
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, g)| TangentVector::new_unchecked(p.clone(), comm(p.matrix(), g)))
                .collect();
            form.eval(p, &fields)
        })?;
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}
