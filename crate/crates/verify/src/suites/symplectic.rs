use idemgeo::geometry::{apply_structure, exterior_derivative, omega, ComplexStructureTag as Tag, Omega};
use idemgeo::linalg::real_orthonormal_basis;
use idemgeo::variety::{random_hermitian_point_with, random_hermitian_tangent_with, random_point_with, random_tangent_with};
use idemgeo::{ComplexMatrix, TangentVector, C64, I};

use super::{condition, witness, Ctx, MAX_CONDITION};
use crate::report::Check;

pub(super) fn run(ctx: &Ctx) -> Vec<Check> {
    let (d, n) = (ctx.cfg.dim, ctx.cfg.rank);
    let mut r = ctx.rng();
    let mut closed = ctx.check("dOmega = 0", "Omega(A,B) = i Tr(q[A,B]) is closed", 1e-6);
    let mut jinv = ctx.check("Omega(JA,JB) = Omega(A,B)", "Omega is J-invariant", 1e-12);
    let mut alt = ctx.check("Omega alternating", "Omega(A,B) = -Omega(B,A)", 1e-12);
    let mut hol = ctx.check("Omega I-bilinear", "Omega(iA,B) = i Omega(A,B)", 1e-12);
    let mut im = ctx.check("Im Omega = 0 on Hermitian tangents", "Omega is real on the zero section", 1e-12);
    let mut fs = ctx.check(
        "Re Omega nondegenerate on Hermitian tangents",
        "Re Omega restricts to a symplectic form on the Grassmannian (condition number)",
        MAX_CONDITION,
    );

    for _ in 0..ctx.cfg.trials {
        let q = match random_point_with(d, n, 1.0, &mut r) {
            Ok(q) => q,
            Err(e) => {
                closed.eval(|| witness(&[]), || Err(e));
                break;
            }
        };
        let a = random_tangent_with(&q, &mut r);
        let b = random_tangent_with(&q, &mut r);
        let c = random_tangent_with(&q, &mut r);
        let w = || witness(&[("q", q.matrix()), ("A", a.matrix()), ("B", b.matrix()), ("C", c.matrix())]);
        let ab = a.norm() * b.norm();
        let s = (1.0 + q.norm()).powi(3) * ab;

        closed.eval(w, || {
            let v = exterior_derivative(&Omega, &[a.clone(), b.clone(), c.clone()])?;
            Ok(v.norm() / (1.0 + ab * c.norm()))
        });
        jinv.eval(w, || {
            let lhs = omega(&apply_structure(Tag::J, &a)?, &apply_structure(Tag::J, &b)?)?;
            Ok((lhs - omega(&a, &b)?).norm() / s)
        });
        alt.eval(w, || Ok((omega(&a, &b)? + omega(&b, &a)?).norm() / s));
        hol.eval(w, || Ok((omega(&a.scale(I), &b)? - I * omega(&a, &b)?).norm() / s));

        let p = match random_hermitian_point_with(d, n, &mut r) {
            Ok(p) => p,
            Err(e) => {
                im.eval(|| witness(&[]), || Err(e));
                break;
            }
        };
        let ha = random_hermitian_tangent_with(&p, &mut r);
        let hb = random_hermitian_tangent_with(&p, &mut r);
        let wp = || witness(&[("p", p.matrix()), ("A", ha.matrix()), ("B", hb.matrix())]);
        im.eval(wp, || Ok(omega(&ha, &hb)?.im.abs() / (1.0 + ha.norm() * hb.norm())));
        fs.eval(wp, || {
            let basis = hermitian_tangent_basis(p.point());
            let k = basis.len();
            let vecs: Vec<TangentVector> = basis.iter().map(|m| TangentVector::new(p.point().clone(), m.clone())).collect::<idemgeo::Result<_>>()?;
            let mut rows = vec![C64::new(0.0, 0.0); k * k];
            for i in 0..k {
                for j in 0..k {
                    rows[i * k + j] = C64::new(omega(&vecs[i], &vecs[j])?.re, 0.0);
                }
            }
            let gram = ComplexMatrix::from_fn(k, |i, j| rows[i * k + j]);
            if k != 2 * n * (d - n) {
                return Ok(f64::INFINITY);
            }
            Ok(condition(&gram.singular_values()))
        });
    }
    vec![closed.finish(), jinv.finish(), alt.finish(), hol.finish(), im.finish(), fs.finish()]
}

/// Real orthonormal basis of the Hermitian tangents at a Hermitian point.
pub(super) fn hermitian_tangent_basis(p: &idemgeo::ProjectionPoint) -> Vec<ComplexMatrix> {
    let d = p.dim();
    let mut spanning = Vec::with_capacity(2 * d * d);
    for i in 0..d {
        for j in 0..d {
            for s in [C64::new(1.0, 0.0), I] {
                spanning.push(p.project(&ComplexMatrix::unit(d, i, j).scale(s).hermitian_part()));
            }
        }
    }
    real_orthonormal_basis(&spanning, 1e-8)
}
