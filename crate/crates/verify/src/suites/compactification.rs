use idemgeo::bundle::{
    chart_push, compactify, decompactify, extended_jhat, pair_j, rank1_image_test, tangent_compactify,
    tangent_compactify_limit, PairPoint, PairTangent,
};
use idemgeo::geometry::{apply_structure, ComplexStructureTag as Tag};
use idemgeo::linalg::{complex_gaussian, range_basis};
use idemgeo::variety::{random_hermitian_point_with, random_hermitian_tangent_with, random_point_with, random_tangent_with};
use idemgeo::{HermitianPoint, TangentVector, C64};
use rand::Rng;

use super::{witness, Ctx};
use crate::report::Check;

/// Pairs tested against the direct-sum criterion.
pub const IMAGE_PAIRS: usize = 1000;
/// Parameter at which the tangent compactification is compared with its limit.
pub const FAR_T: f64 = 1e6;

pub(super) fn run(ctx: &Ctx) -> Vec<Check> {
    let (d, n) = (ctx.cfg.dim, ctx.cfg.rank);
    let mut r = ctx.rng();
    let mut round = ctx.check(
        "decompactify(compactify(q)) = q",
        "q -> (pi(q), pi(q*)) is inverted by the oblique projector onto range(p1) along range(p2)^perp",
        1e-10,
    );
    let mut jhol = ctx.check("compactify is J-holomorphic", "d(compactify)(JA) = (J,J) d(compactify)(A)", 1e-10);
    let mut ihol = ctx.check("compactify is I-holomorphic for (J,-J)", "d(compactify)(iA) = (J,-J) d(compactify)(A)", 1e-10);
    for _ in 0..ctx.cfg.trials {
        let q = match random_point_with(d, n, 1.0, &mut r) {
            Ok(q) => q,
            Err(e) => {
                round.eval(|| witness(&[]), || Err(e));
                break;
            }
        };
        let a = random_tangent_with(&q, &mut r);
        let w = || witness(&[("q", q.matrix()), ("A", a.matrix())]);
        round.eval(w, || {
            let back = decompactify(&compactify(&q)?)?;
            Ok((back.matrix() - q.matrix()).norm() / (1.0 + q.norm()))
        });
        let s = (1.0 + a.norm()) * (1.0 + q.norm()).powi(3);
        let diff = |x: &PairTangent, y: &PairTangent| ((&x.a1 - &y.a1).norm() + (&x.a2 - &y.a2).norm()) / s;
        jhol.eval(w, || Ok(diff(&chart_push(&apply_structure(Tag::J, &a)?)?, &pair_j(&chart_push(&a)?, 1.0))));
        ihol.eval(w, || Ok(diff(&chart_push(&apply_structure(Tag::I, &a)?)?, &pair_j(&chart_push(&a)?, -1.0))));
    }

    let mut image = ctx.check(
        "rank-1 image criterion",
        "for rank 1, (p1,p2) is in the image iff p1 p2 != 0 (mismatches against the direct-sum test)",
        0.0,
    );
    let mut boundary = ctx.check("extended Jhat^2 = -1 on the boundary", "(A,B) -> (J_p A, -J_q B + J_q A - J_q^2 J_p A) squares to -1", 1e-12);
    let mut mismatches = 0usize;
    for k in 0..IMAGE_PAIRS {
        let pair = (|| -> idemgeo::Result<(HermitianPoint, HermitianPoint)> {
            let p = random_hermitian_point_with(d, 1, &mut r)?;
            // Every fourth pair is orthogonal, so both answers occur.
            let q = if k % 4 == 0 {
                let x = p.complement().matrix() * &complex_gaussian(d, &mut r);
                let v = range_basis(&x, 1, 1e-10)?;
                HermitianPoint::from_frame(&v)?
            } else {
                random_hermitian_point_with(d, 1, &mut r)?
            };
            Ok((p, q))
        })();
        let (p, q) = match pair {
            Ok(x) => x,
            Err(e) => {
                image.eval(|| witness(&[]), || Err(e));
                break;
            }
        };
        let w = || witness(&[("p1", p.matrix()), ("p2", q.matrix())]);
        let pp = match PairPoint::new(p.clone(), q.clone()) {
            Ok(pp) => pp,
            Err(e) => {
                image.eval(w, || Err(e));
                break;
            }
        };
        image.eval(w, || {
            if rank1_image_test(&p, &q)? != pp.is_transverse() {
                mismatches += 1;
            }
            Ok(mismatches as f64)
        });
        if k % 4 == 0 && k / 4 < ctx.cfg.trials {
            let t = PairTangent {
                pair: pp.clone(),
                a1: p.point().project(&complex_gaussian(d, &mut r).hermitian_part()),
                a2: q.point().project(&complex_gaussian(d, &mut r).hermitian_part()),
            };
            boundary.eval(
                || witness(&[("p1", p.matrix()), ("p2", q.matrix()), ("A1", &t.a1), ("A2", &t.a2)]),
                || {
                    let jj = extended_jhat(&extended_jhat(&t));
                    Ok(((&jj.a1 + &t.a1).norm() + (&jj.a2 + &t.a2).norm()) / (1.0 + t.a1.norm() + t.a2.norm()))
                },
            );
        }
    }

    let mut far = ctx.check(
        "tangent compactification limit at t = 1e6",
        "(q + tA + t^2 AqA)/(1 + t^2 Tr(qA^2)) -> AqA/Tr(qA^2), compared at t = 1e6",
        1e-8,
    );
    let mut inv = ctx.check(
        "limit invariant under (x + yJ)A",
        "AqA/Tr(qA^2) depends only on the complex line of A under J",
        1e-10,
    );
    for _ in 0..ctx.cfg.trials {
        let q = match random_hermitian_point_with(d, 1, &mut r) {
            Ok(q) => q,
            Err(e) => {
                far.eval(|| witness(&[]), || Err(e));
                break;
            }
        };
        let a = random_hermitian_tangent_with(&q, &mut r);
        let (x, y): (f64, f64) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let w = || witness(&[("q", q.matrix()), ("A", a.matrix())]);
        far.eval(w, || {
            let f = tangent_compactify(&q, &a, FAR_T)?;
            let lim = tangent_compactify_limit(&q, &a)?;
            Ok((f.matrix() - lim.matrix()).norm())
        });
        inv.eval(w, || {
            let ja = apply_structure(Tag::J, &a)?;
            let b: TangentVector = a.scale(C64::new(x, 0.0)).add(&ja.scale(C64::new(y, 0.0)))?;
            let lim = tangent_compactify_limit(&q, &a)?;
            Ok((tangent_compactify_limit(&q, &b)?.matrix() - lim.matrix()).norm())
        });
    }
    vec![round.finish(), jhol.finish(), ihol.finish(), image.finish(), boundary.finish(), far.finish(), inv.finish()]
}
