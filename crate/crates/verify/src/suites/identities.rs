use idemgeo::linalg::{commutator, complex_gaussian};
use idemgeo::variety::{random_point_with, random_tangent_with};
use idemgeo::I;

use super::{witness, Ctx};
use crate::report::Check;

const TOL: f64 = 1e-12;

pub(super) fn run(ctx: &Ctx) -> Vec<Check> {
    let (d, n) = (ctx.cfg.dim, ctx.cfg.rank);
    let mut r = ctx.rng();
    let mut qaq = ctx.check("qAq = 0", "tangent A at q satisfies qAq = 0", TOL);
    let mut double = ctx.check("[q,[q,A]] = A", "[q,[q,A]] = A for tangent A", TOL);
    let mut tangent = ctx.check("[q,M] is tangent", "q[q,M] + [q,M]q = [q,M] for any M", TOL);
    let mut product = ctx.check("[q,AB] = 0", "[q,AB] = 0 for tangents A, B", TOL);
    let mut jprod = ctx.check("JA JB = AB", "i[A,q] i[B,q] = AB", TOL);
    let mut jcomm = ctx.check("[JA,JB] = [A,B]", "[i[A,q], i[B,q]] = [A,B]", TOL);
    for _ in 0..ctx.cfg.trials {
        let q = match random_point_with(d, n, 1.0, &mut r) {
            Ok(q) => q,
            Err(e) => {
                qaq.eval(|| witness(&[]), || Err(e));
                break;
            }
        };
        let a = random_tangent_with(&q, &mut r);
        let b = random_tangent_with(&q, &mut r);
        let m = complex_gaussian(d, &mut r);
        let (qm, am, bm) = (q.matrix(), a.matrix(), b.matrix());
        let s = q.norm();
        let w = || witness(&[("q", qm), ("A", am), ("B", bm), ("M", &m)]);
        qaq.eval(w, || Ok((&(qm * am) * qm).norm() / (s * s * a.norm())));
        double.eval(w, || Ok((commutator(qm, &commutator(qm, am)?)? - am).norm() / (s * s * a.norm())));
        tangent.eval(w, || {
            let x = commutator(qm, &m)?;
            Ok(q.tangent_residual(&x) / (s * s * m.norm()))
        });
        product.eval(w, || Ok(commutator(qm, &(am * bm))?.norm() / (s * a.norm() * b.norm())));
        let scale = s * s * a.norm() * b.norm();
        let js = || -> idemgeo::Result<_> { Ok((commutator(am, qm)?.scale(I), commutator(bm, qm)?.scale(I))) };
        jprod.eval(w, || {
            let (ja, jb) = js()?;
            Ok((&ja * &jb - am * bm).norm() / scale)
        });
        jcomm.eval(w, || {
            let (ja, jb) = js()?;
            Ok((commutator(&ja, &jb)? - commutator(am, bm)?).norm() / scale)
        });
    }
    vec![qaq.finish(), double.finish(), tangent.finish(), product.finish(), jprod.finish(), jcomm.finish()]
}

