use idemgeo::bundle::{curvature_f, horizontal_lift, nabla_s};
use idemgeo::geometry::{apply_structure, ComplexStructureTag as Tag};
use idemgeo::linalg::{commutator, complex_gaussian};
use idemgeo::variety::{
    random_fiber_with, random_hermitian_point_with, random_hermitian_tangent_with, random_point_with, random_tangent_with,
};
use idemgeo::{base_projection, pushforward, TangentVector, I};

use super::{witness, Ctx};
use crate::report::Check;

pub(super) fn run(ctx: &Ctx) -> Vec<Check> {
    let (d, n) = (ctx.cfg.dim, ctx.cfg.rank);
    let mut r = ctx.rng();
    let mut defining = ctx.check(
        "pushforward defining equation",
        "q pi*(A) + A pi(q) = pi*(A)",
        1e-10,
    );
    let mut skew = ctx.check(
        "pushforward is the identity on the zero section",
        "pi*([p,S]) = [p,S] for Hermitian p, skew-Hermitian S",
        1e-10,
    );
    let mut split = ctx.check("pi* H = id", "H(A) = [q,[pi(q),A]] splits pi*", 1e-10);
    let mut curv = ctx.check(
        "(0,2)-part of F vanishes",
        "F(A + iJA, B + iJB) = 0 with F(A,B)C = C[A,B] - [A,B]C",
        1e-11,
    );
    let mut nabla = ctx.check("nabla_S = H", "B + [B,A] = H(B) at q + A", 1e-11);
    let mut idhat = ctx.check("pi*((HJA)*) = i[A, pi(q*)]", "pi*((H J A)*) = i[A, pi(q*)]", 1e-10);

    for _ in 0..ctx.cfg.trials {
        let (q, h) = match (random_point_with(d, n, 1.0, &mut r), random_hermitian_point_with(d, n, &mut r)) {
            (Ok(q), Ok(h)) => (q, h),
            (Err(e), _) | (_, Err(e)) => {
                defining.eval(|| witness(&[]), || Err(e));
                break;
            }
        };
        let a = random_tangent_with(&q, &mut r);
        let p = match base_projection(&q) {
            Ok(p) => p,
            Err(e) => {
                defining.eval(|| witness(&[("q", q.matrix())]), || Err(e));
                break;
            }
        };
        let ha = random_hermitian_tangent_with(&p, &mut r);
        let sm = complex_gaussian(d, &mut r).skew_part();
        let ta = random_tangent_with(h.point(), &mut r);
        let tb = random_tangent_with(h.point(), &mut r);
        let fc = random_fiber_with(&h, &mut r);
        let fa = random_fiber_with(&h, &mut r);
        let hb = random_hermitian_tangent_with(&h, &mut r);
        let sq = (1.0 + q.norm()).powi(2);

        let w = || witness(&[("q", q.matrix()), ("A", a.matrix())]);
        defining.eval(w, || {
            let pa = pushforward(&a)?;
            let lhs = &(q.matrix() * pa.matrix()) + &(a.matrix() * p.matrix());
            Ok((lhs - pa.matrix()).norm() / (sq * a.norm()))
        });

        let ws = || witness(&[("p", h.matrix()), ("S", &sm)]);
        skew.eval(ws, || {
            let x = commutator(h.matrix(), &sm)?;
            let pa = pushforward(&TangentVector::new(h.point().clone(), x.clone())?)?;
            Ok((pa.matrix() - &x).norm() / (1.0 + x.norm()))
        });

        let wl = || witness(&[("q", q.matrix()), ("A", ha.matrix())]);
        split.eval(wl, || {
            let lift = horizontal_lift(&q, &ha)?;
            Ok((pushforward(&lift)?.matrix() - ha.matrix()).norm() / (sq * ha.norm()))
        });
        idhat.eval(wl, || {
            let ja = apply_structure(Tag::J, &ha)?;
            let hja = horizontal_lift(&q, &ja)?;
            let star = TangentVector::new(q.adjoint(), hja.matrix().adjoint())?;
            let lhs = pushforward(&star)?;
            let p_star = base_projection(&q.adjoint())?;
            let rhs = commutator(ha.matrix(), p_star.matrix())?.scale(I);
            Ok((lhs.matrix() - &rhs).norm() / (sq * ha.norm()))
        });

        let wc = || witness(&[("q", h.matrix()), ("A", ta.matrix()), ("B", tb.matrix()), ("C", fc.matrix())]);
        curv.eval(wc, || {
            let ja = apply_structure(Tag::J, &ta)?;
            let jb = apply_structure(Tag::J, &tb)?;
            let a02 = ta.add(&ja.scale(I))?;
            let b02 = tb.add(&jb.scale(I))?;
            let f = curvature_f(&a02, &b02, &fc)?;
            Ok(f.norm() / ((1.0 + ta.norm() * tb.norm()) * (1.0 + fc.matrix().norm())))
        });

        let wn = || witness(&[("q", h.matrix()), ("A", fa.matrix()), ("B", hb.matrix())]);
        nabla.eval(wn, || {
            let nb = nabla_s(&fa, &hb)?;
            let lift = horizontal_lift(&fa.point(), &hb)?;
            Ok((nb.matrix() - lift.matrix()).norm() / ((1.0 + hb.norm()) * (1.0 + fa.point().norm())))
        });
    }
    vec![defining.finish(), skew.finish(), split.finish(), curv.finish(), nabla.finish(), idhat.finish()]
}
