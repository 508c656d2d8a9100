use idemgeo::geometry::{apply_structure, ComplexStructureTag as Tag};
use idemgeo::variety::{random_point_with, random_tangent_with};
use idemgeo::{TangentVector, C64, I};

use super::{witness, Ctx};
use crate::report::Check;

const TOL: f64 = 1e-10;

fn ap(tag: Tag, a: &TangentVector) -> idemgeo::Result<TangentVector> {
    apply_structure(tag, a)
}

pub(super) fn run(ctx: &Ctx) -> Vec<Check> {
    let (d, n) = (ctx.cfg.dim, ctx.cfg.rank);
    let mut r = ctx.rng();
    let mut j2 = ctx.check("J^2 = -1", "J A = i[A,q] squares to -1", TOL);
    let mut k2 = ctx.check("K^2 = +1", "K = IJ squares to +1", TOL);
    let mut jh2 = ctx.check("Jhat^2 = -1", "Jhat from the Gr x Gr chart squares to -1", TOL);
    let mut jjh = ctx.check("[J,Jhat] = 0", "J and Jhat commute", TOL);
    let mut ij = ctx.check("IJ = JI", "I and J commute", TOL);
    let mut jb2 = ctx.check("Jbold^2 = -1", "Jbold (rank 1) squares to -1", TOL);
    let mut ijb = ctx.check("I Jbold = -Jbold I", "I and Jbold anticommute (rank 1)", TOL);

    for _ in 0..ctx.cfg.trials {
        let (q, q1) = match (random_point_with(d, n, 1.0, &mut r), random_point_with(d, 1, 1.0, &mut r)) {
            (Ok(q), Ok(q1)) => (q, q1),
            (Err(e), _) | (_, Err(e)) => {
                j2.eval(|| witness(&[]), || Err(e));
                break;
            }
        };
        let a = random_tangent_with(&q, &mut r);
        let w = || witness(&[("q", q.matrix()), ("A", a.matrix())]);
        // Scale: each application of J or Jhat multiplies norms by at most ~2‖q‖.
        let s = a.norm() * (1.0 + q.norm()).powi(2);
        let res = |x: &TangentVector, y: &TangentVector| (x.matrix() - y.matrix()).norm() / s;
        let minus_a = a.scale(C64::new(-1.0, 0.0));

        j2.eval(w, || Ok(res(&ap(Tag::J, &ap(Tag::J, &a)?)?, &minus_a)));
        k2.eval(w, || Ok(res(&ap(Tag::K, &ap(Tag::K, &a)?)?, &a)));
        jh2.eval(w, || Ok(res(&ap(Tag::Jhat, &ap(Tag::Jhat, &a)?)?, &minus_a)));
        jjh.eval(w, || Ok(res(&ap(Tag::J, &ap(Tag::Jhat, &a)?)?, &ap(Tag::Jhat, &ap(Tag::J, &a)?)?)));
        ij.eval(w, || Ok(res(&ap(Tag::J, &a)?.scale(I), &ap(Tag::J, &a.scale(I))?)));

        let b = random_tangent_with(&q1, &mut r);
        let w1 = || witness(&[("q", q1.matrix()), ("A", b.matrix())]);
        let s1 = b.norm();
        let res1 = |x: &TangentVector, y: &TangentVector| (x.matrix() - y.matrix()).norm() / s1;
        jb2.eval(w1, || Ok(res1(&ap(Tag::Jbold, &ap(Tag::Jbold, &b)?)?, &b.scale(C64::new(-1.0, 0.0)))));
        ijb.eval(w1, || Ok(res1(&ap(Tag::Jbold, &b)?.scale(I), &ap(Tag::Jbold, &b.scale(-I))?)));
    }
    vec![j2.finish(), k2.finish(), jh2.finish(), jjh.finish(), ij.finish(), jb2.finish(), ijb.finish()]
}
