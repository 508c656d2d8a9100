//! Monte-Carlo integration over `Gr(n, ℂᵈ)` with the unitarily invariant
//! probability measure.
//!
//! Samples are drawn in fixed batches; batch `b` uses ChaCha20 stream `b` of
//! the master seed, and per-batch moments are merged in batch order, so
//! estimates do not depend on the thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::bundle::{section_map, Psi};
use crate::error::{Error, Result};
use crate::linalg::{hs_inner, C64, ComplexMatrix};
use crate::rng;
use crate::variety::{random_hermitian_point_with, FiberVector, HermitianPoint, DEFAULT_TOL};

pub const BATCH_SIZE: usize = 4096;

/// Running mean and sum of squared deviations of a real vector.
#[derive(Clone, Debug)]
struct Moments {
    count: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Self { count: 0.0, mean: vec![0.0; len], m2: vec![0.0; len] }
    }

    fn push(&mut self, x: &[f64]) {
        self.count += 1.0;
        for ((m, s), v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let delta = v - *m;
            *m += delta / self.count;
            *s += delta * (v - *m);
        }
    }

    /// Chan et al. pairwise merge.
    fn merge(&mut self, other: &Moments) {
        if other.count == 0.0 {
            return;
        }
        let n = self.count + other.count;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * other.count / n;
            self.m2[i] += other.m2[i] + delta * delta * self.count * other.count / n;
        }
        self.count = n;
    }

    /// Squared standard error of each mean component.
    fn sem_sq(&self) -> Vec<f64> {
        if self.count < 2.0 {
            return vec![0.0; self.mean.len()];
        }
        self.m2.iter().map(|s| s / (self.count - 1.0) / self.count).collect()
    }
}

fn integrate_vec<F>(len: usize, d: usize, n: usize, samples: usize, seed: u64, f: F) -> Result<Moments>
where
    F: Fn(&HermitianPoint) -> Result<Vec<f64>> + Sync,
{
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    if d < 2 || n == 0 || n >= d {
        return Err(Error::InvalidRank { rank: n, dim: d });
    }
    let batches = samples.div_ceil(BATCH_SIZE);
    let parts: Vec<Result<Moments>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::substream(seed, b as u64);
            let start = b * BATCH_SIZE;
            let end = (start + BATCH_SIZE).min(samples);
            let mut m = Moments::new(len);
            for index in start..end {
                let q = random_hermitian_point_with(d, n, &mut r)?;
                let v = f(&q).map_err(|e| Error::Integrand { index, source: Box::new(e) })?;
                m.push(&v);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::new(len);
    for p in parts {
        total.merge(&p?);
    }
    Ok(total)
}

/// Monte-Carlo estimate of a complex scalar.
#[derive(Clone, Debug, Serialize)]
pub struct ScalarEstimate {
    pub mean: C64,
    /// `√(Var Re + Var Im) / √N`.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl ScalarEstimate {
    /// `|mean − value|` in units of `stderr`; exact agreement counts as 0.
    pub fn sigmas_from(&self, value: C64) -> f64 {
        sigmas((self.mean - value).norm(), self.stderr)
    }
}

/// Monte-Carlo estimate of a matrix.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixEstimate {
    pub mean: ComplexMatrix,
    /// Hilbert–Schmidt standard error: `√(Σ entry variances) / √N`.
    pub stderr: f64,
    /// Per-entry standard errors, row-major.
    pub entry_stderr: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl MatrixEstimate {
    /// `‖mean − value‖` in units of `stderr`.
    pub fn sigmas_from(&self, value: &ComplexMatrix) -> f64 {
        sigmas((&self.mean - value).norm(), self.stderr)
    }
}

fn sigmas(dev: f64, stderr: f64) -> f64 {
    if stderr > 0.0 {
        dev / stderr
    } else if dev <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub fn integrate_scalar<F>(f: F, d: usize, n: usize, samples: usize, seed: u64) -> Result<ScalarEstimate>
where
    F: Fn(&HermitianPoint) -> Result<C64> + Sync,
{
    let m = integrate_vec(2, d, n, samples, seed, |q| {
        let z = f(q)?;
        Ok(vec![z.re, z.im])
    })?;
    let s = m.sem_sq();
    Ok(ScalarEstimate { mean: C64::new(m.mean[0], m.mean[1]), stderr: (s[0] + s[1]).sqrt(), samples, seed })
}

pub fn integrate_matrix<F>(f: F, d: usize, n: usize, samples: usize, seed: u64) -> Result<MatrixEstimate>
where
    F: Fn(&HermitianPoint) -> Result<ComplexMatrix> + Sync,
{
    let m = integrate_vec(2 * d * d, d, n, samples, seed, |q| {
        let x = f(q)?;
        if x.dim() != d {
            return Err(Error::DimensionMismatch { left: d, right: x.dim() });
        }
        Ok(x.to_real_vec())
    })?;
    let s = m.sem_sq();
    let entry_stderr: Vec<f64> = s.chunks(2).map(|c| (c[0] + c[1]).sqrt()).collect();
    Ok(MatrixEstimate {
        mean: ComplexMatrix::from_real_vec(d, &m.mean),
        stderr: s.iter().sum::<f64>().sqrt(),
        entry_stderr,
        samples,
        seed,
    })
}

fn check_traceless(m: &ComplexMatrix) -> Result<()> {
    let tr = m.trace().norm();
    if tr > DEFAULT_TOL * (1.0 + m.norm()) {
        return Err(Error::NotTraceless(tr));
    }
    Ok(())
}

/// Estimate of `λ` in `λM = ∫(qM − qMq) dq`.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaEstimate {
    /// `⟨M, Ψ_M(q)⟩ / ‖M‖²` integrated; its mean is `λ`.
    pub lambda: ScalarEstimate,
    pub integral: MatrixEstimate,
    /// `‖∫Ψ_M − λM‖` in units of the integral's standard error.
    pub proportionality_sigmas: f64,
}

pub fn schur_lambda(d: usize, n: usize, m: &ComplexMatrix, samples: usize, seed: u64) -> Result<LambdaEstimate> {
    check_traceless(m)?;
    let norm_sq = m.norm_sq();
    if norm_sq == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    if m.dim() != d {
        return Err(Error::DimensionMismatch { left: d, right: m.dim() });
    }
    let psi = Psi { m: m.clone() };
    let lambda = integrate_scalar(|q| Ok(hs_inner(m, &psi.eval(q.matrix()))? / norm_sq), d, n, samples, seed)?;
    let integral = integrate_matrix(|q| Ok(psi.eval(q.matrix())), d, n, samples, seed)?;
    let proportionality_sigmas = integral.sigmas_from(&m.scale(lambda.mean));
    Ok(LambdaEstimate { lambda, integral, proportionality_sigmas })
}

/// `∫ 𝒮(q', p) 𝒮(q, q') A dq'`.
pub fn section_composite(q: &HermitianPoint, p: &HermitianPoint, a: &FiberVector, samples: usize, seed: u64) -> Result<MatrixEstimate> {
    let r = (a.base().matrix() - q.matrix()).norm();
    if r > DEFAULT_TOL * (1.0 + q.dim() as f64) {
        return Err(Error::BaseMismatch(r));
    }
    q.matrix().ensure_same_dim(p.matrix())?;
    let am = a.matrix();
    integrate_matrix(
        |qq| Ok(section_map(p.matrix(), &section_map(qq.matrix(), am))),
        q.dim(),
        q.rank(),
        samples,
        seed,
    )
}

/// The constant `κ` with `∫ 𝒮(q', p) 𝒮(q, q') dq' = κ 𝒮(q, p)`, fitted on a
/// single calibration pair `p = q`.
#[derive(Clone, Debug, Serialize)]
pub struct SectionNormalization {
    pub constant: ScalarEstimate,
}

impl SectionNormalization {
    pub fn calibrate(d: usize, n: usize, samples: usize, seed: u64) -> Result<Self> {
        let mut r = rng::from_seed(seed);
        let q = random_hermitian_point_with(d, n, &mut r)?;
        let a = crate::variety::random_fiber_with(&q, &mut r);
        let am = a.matrix().clone();
        let norm_sq = am.norm_sq();
        let qm = q.matrix().clone();
        let cal_seed = seed.wrapping_add(1);
        let constant = integrate_scalar(
            |qq| Ok(hs_inner(&am, &section_map(&qm, &section_map(qq.matrix(), &am)))? / norm_sq),
            d,
            n,
            samples,
            cal_seed,
        )?;
        Ok(Self { constant })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdempotencyResult {
    /// `‖∫…/κ − 𝒮(q,p)A‖`.
    pub residual: f64,
    /// Propagated standard error of `∫…/κ` (delta method).
    pub stderr: f64,
    pub sigmas: f64,
}

pub fn idempotency_check(
    q: &HermitianPoint,
    p: &HermitianPoint,
    a: &FiberVector,
    normalization: &SectionNormalization,
    samples: usize,
    seed: u64,
) -> Result<IdempotencyResult> {
    let est = section_composite(q, p, a, samples, seed)?;
    let kappa = normalization.constant.mean.re;
    let target = section_map(p.matrix(), a.matrix());
    let scaled = est.mean.scale_real(1.0 / kappa);
    let residual = (&scaled - &target).norm();
    let rel_k = normalization.constant.stderr / kappa;
    let stderr = ((est.stderr / kappa).powi(2) + (scaled.norm() * rel_k).powi(2)).sqrt();
    Ok(IdempotencyResult { residual, stderr, sigmas: sigmas(residual, stderr) })
}

/// `λ⁻¹ ∫ Ψ_M(q) dq` with `λ` estimated on an independent stream.
#[derive(Clone, Debug, Serialize)]
pub struct Recovery {
    pub estimate: MatrixEstimate,
    pub lambda: ScalarEstimate,
}

/// Fixed traceless matrix used to estimate `λ` for [`psi_left_inverse`].
pub fn lambda_probe(d: usize) -> ComplexMatrix {
    let mut v = vec![0.0; d];
    v[0] = 1.0;
    v[1] = -1.0;
    ComplexMatrix::real_diag(&v)
}

pub fn psi_left_inverse(m: &ComplexMatrix, d: usize, n: usize, samples: usize, seed: u64) -> Result<Recovery> {
    check_traceless(m)?;
    if m.dim() != d {
        return Err(Error::DimensionMismatch { left: d, right: m.dim() });
    }
    let lambda = schur_lambda(d, n, &lambda_probe(d), samples, seed.wrapping_add(1))?.lambda;
    let psi = Psi { m: m.clone() };
    let raw = integrate_matrix(|q| Ok(psi.eval(q.matrix())), d, n, samples, seed)?;
    let l = lambda.mean.re;
    let mean = raw.mean.scale_real(1.0 / l);
    let rel = lambda.stderr / l;
    let stderr = ((raw.stderr / l).powi(2) + (mean.norm() * rel).powi(2)).sqrt();
    let entry_stderr = raw.entry_stderr.iter().map(|s| s / l).collect();
    Ok(Recovery {
        estimate: MatrixEstimate { mean, stderr, entry_stderr, samples, seed },
        lambda,
    })
}
