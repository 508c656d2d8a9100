use idemgeo::haar::{idempotency_check, integrate_matrix, psi_left_inverse, schur_lambda, SectionNormalization};
use idemgeo::linalg::complex_gaussian;
use idemgeo::variety::{random_fiber_with, random_hermitian_point_with};
use idemgeo::{ComplexMatrix, C64};
use rand::Rng;

use super::{witness, Ctx};
use crate::report::Check;

/// Deviation allowed for Monte-Carlo checks, in standard errors.
pub const SIGMAS: f64 = 3.0;
/// Upper bound on the number of `(q, p)` pairs in the idempotency check.
pub const MAX_PAIRS: usize = 10;

/// `n(d − n)/(d² − 1)`: the proportionality constant of `∫(qM − qMq) dq` for traceless `M`.
pub fn schur_constant(d: usize, n: usize) -> f64 {
    let (d, n) = (d as f64, n as f64);
    n * (d - n) / (d * d - 1.0)
}

fn traceless<R: Rng>(d: usize, r: &mut R) -> ComplexMatrix {
    let m = complex_gaussian(d, r);
    let t = m.trace() / d as f64;
    &m - &ComplexMatrix::identity(d).scale(t)
}

pub(super) fn run(ctx: &Ctx) -> Vec<Check> {
    let (d, n, samples) = (ctx.cfg.dim, ctx.cfg.rank, ctx.cfg.samples);
    let mut r = ctx.rng();
    let mut mean = ctx.check("integral of q = (n/d) Id", "Haar average of q is (n/d) Id (in standard errors)", SIGMAS);
    let mut lambda = ctx.check(
        "Schur constant",
        "lambda M = integral of (qM - qMq) dq, lambda = n(d-n)/(d^2-1) (in standard errors)",
        SIGMAS,
    );
    let mut prop = ctx.check(
        "integral of Psi_M is proportional to M",
        "integral of (qM - qMq) dq lies on the line of M (in standard errors)",
        SIGMAS,
    );
    let mut idem = ctx.check(
        "section idempotency",
        "integral of S(q',p) S(q,q') dq' = kappa S(q,p), one kappa per (d,n) (in standard errors)",
        SIGMAS,
    );
    let mut inverse = ctx.check(
        "Psi left inverse",
        "lambda^-1 integral of Psi_M(q) dq = M for traceless M (in standard errors)",
        SIGMAS,
    );

    let seed: u64 = r.random();
    let expected = ComplexMatrix::identity(d).scale(C64::new(n as f64 / d as f64, 0.0));
    mean.eval(
        || witness(&[]),
        || {
            let est = integrate_matrix(|q| Ok(q.matrix().clone()), d, n, samples, seed)?;
            Ok(est.sigmas_from(&expected))
        },
    );

    let m = traceless(d, &mut r);
    let seed: u64 = r.random();
    match schur_lambda(d, n, &m, samples, seed) {
        Ok(est) => {
            let reference = schur_constant(d, n);
            lambda.set_estimate(est.lambda.mean.re, est.lambda.stderr, Some(reference));
            lambda.eval(|| witness(&[("M", &m)]), || Ok(est.lambda.sigmas_from(C64::new(reference, 0.0))));
            prop.eval(|| witness(&[("M", &m)]), || Ok(est.proportionality_sigmas));
        }
        Err(e) => lambda.eval(|| witness(&[("M", &m)]), || Err(e)),
    }

    let seed: u64 = r.random();
    match SectionNormalization::calibrate(d, n, samples, seed) {
        Ok(norm) => {
            idem.set_estimate(norm.constant.mean.re, norm.constant.stderr, None);
            for _ in 0..ctx.cfg.trials.min(MAX_PAIRS) {
                let pair = (|| -> idemgeo::Result<_> {
                    let q = random_hermitian_point_with(d, n, &mut r)?;
                    let p = random_hermitian_point_with(d, n, &mut r)?;
                    let a = random_fiber_with(&q, &mut r);
                    Ok((q, p, a))
                })();
                let seed: u64 = r.random();
                match pair {
                    Ok((q, p, a)) => idem.eval(
                        || witness(&[("q", q.matrix()), ("p", p.matrix()), ("A", a.matrix())]),
                        || Ok(idempotency_check(&q, &p, &a, &norm, samples, seed)?.sigmas),
                    ),
                    Err(e) => idem.eval(|| witness(&[]), || Err(e)),
                }
            }
        }
        Err(e) => idem.eval(|| witness(&[]), || Err(e)),
    }

    let m = traceless(d, &mut r);
    let seed: u64 = r.random();
    inverse.eval(
        || witness(&[("M", &m)]),
        || Ok(psi_left_inverse(&m, d, n, samples, seed)?.estimate.sigmas_from(&m)),
    );

    vec![mean.finish(), lambda.finish(), prop.finish(), idem.finish(), inverse.finish()]
}
