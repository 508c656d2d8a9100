//! Rank 1; the symplectic matrix is assembled on all of `T_q`.

use idemgeo::linalg::{commutator, complex_gaussian, haar_unitary_with};
use idemgeo::poisson::{hat, poisson_bracket, star_commutator_check, HatKernel};
use idemgeo::variety::{random_point_with, random_tangent_with};
use idemgeo::{base_projection, pushforward, ComplexMatrix, C64};
use rand::Rng;

use super::{witness, Ctx};
use crate::report::Check;

/// Points used to estimate the kernel of the hat map.
pub const KERNEL_SAMPLES: usize = 64;

pub(super) fn run(ctx: &Ctx) -> Vec<Check> {
    let d = ctx.cfg.dim;
    let mut r = ctx.rng();
    let mut morph = ctx.check(
        "{M^,N^} = [M,N]^",
        "the hat map is a Lie morphism: {M^, N^} = [M,N]^ for M^(q) = Tr([pi(q),q]M)",
        1e-5,
    );
    let mut commuting = ctx.check("commuting M, N have zero bracket", "[M,N] = 0 implies {M^, N^} = 0", 1e-6);
    let mut star = ctx.check("star commutator = bracket", "M^*N^ - N^*M^ = {M^, N^} with M^*N^ = (MN)^", 1e-5);
    let mut taut = ctx.check("Tr(q pi*(A)) = -Tr(A pi(q))", "Tr(q pi*(A)) + Tr(A pi(q)) = 0", 1e-11);
    let mut kernel_check = ctx.check(
        "hat kernel = scalars",
        "M^ = 0 iff M is a multiple of the identity (sampled rank)",
        0.0,
    );

    let kernel = match HatKernel::sample(d, 1, KERNEL_SAMPLES, r.random()) {
        Ok(k) => {
            kernel_check.eval(
                || witness(&[]),
                || {
                    let missing = if k.contains(&ComplexMatrix::identity(d))? { 0.0 } else { 1.0 };
                    Ok((k.kernel_dim() as f64 - 1.0).abs() + missing)
                },
            );
            Some(k)
        }
        Err(e) => {
            kernel_check.eval(|| witness(&[]), || Err(e));
            None
        }
    };

    for _ in 0..ctx.cfg.trials {
        let q = match random_point_with(d, 1, 1.0, &mut r) {
            Ok(q) => q,
            Err(e) => {
                morph.eval(|| witness(&[]), || Err(e));
                break;
            }
        };
        let m = complex_gaussian(d, &mut r);
        let n = complex_gaussian(d, &mut r);
        let u = haar_unitary_with(d, &mut r);
        let da: Vec<C64> = (0..d).map(|_| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
        let db: Vec<C64> = (0..d).map(|_| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
        let conj = |v: &[C64]| &(&u * &ComplexMatrix::diag(v)) * &u.adjoint();
        let (cm, cn) = (conj(&da), conj(&db));
        let a = random_tangent_with(&q, &mut r);
        let scale = 1.0 + m.norm() * n.norm();

        let w = || witness(&[("q", q.matrix()), ("M", &m), ("N", &n)]);
        morph.eval(w, || {
            let lhs = poisson_bracket(&m, &n, &q)?;
            let rhs = hat(&commutator(&m, &n)?, &q)?;
            Ok((lhs - rhs).norm() / scale)
        });
        if let Some(k) = &kernel {
            star.eval(w, || Ok(star_commutator_check(&m, &n, &q, k)? / scale));
        }
        commuting.eval(
            || witness(&[("q", q.matrix()), ("M", &cm), ("N", &cn)]),
            || Ok(poisson_bracket(&cm, &cn, &q)?.norm() / (1.0 + cm.norm() * cn.norm())),
        );
        taut.eval(
            || witness(&[("q", q.matrix()), ("A", a.matrix())]),
            || {
                let p = base_projection(&q)?;
                let pa = pushforward(&a)?;
                let v = (q.matrix() * pa.matrix()).trace() + (a.matrix() * p.matrix()).trace();
                Ok(v.norm() / ((1.0 + q.norm()).powi(2) * a.norm()))
            },
        );
    }
    vec![morph.finish(), commuting.finish(), star.finish(), taut.finish(), kernel_check.finish()]
}

