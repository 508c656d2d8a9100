//! Always `d = 2`, `n = 1`, whatever the configured dimension.

use idemgeo::geometry::{apply_structure, ComplexStructureTag as Tag};
use idemgeo::quadric::{
    cross_product_j, eguchi_hanson_potential, fixed_tangent_pairing, involution, involution_differential, quadric_coords,
    quadric_tangent, random_fixed_point, Involution,
};
use idemgeo::variety::{random_point_with, random_tangent_with};
use idemgeo::{ComplexMatrix, I};

use super::{condition, witness, Ctx, MAX_CONDITION};
use crate::report::Check;

/// Fixed points sampled per involution.
pub const FIXED_POINTS: usize = 20;

pub(super) fn run(ctx: &Ctx) -> Vec<Check> {
    let mut r = ctx.rng();
    let mut quad = ctx.check("quadric residual", "q -> (x,y,z) lands on x^2 + y^2 + z^2 = 1", 1e-12);
    let mut cross = ctx.check(
        "cross-product J = matrix J",
        "J is the complexified cross product (a,b,c) -> (a,b,c) x (x,y,z)",
        1e-11,
    );
    let mut eh = ctx.check(
        "Eguchi-Hanson potential",
        "|q| = (1/sqrt 2) sqrt(|x|^2 + |y|^2 + |z|^2 + 1)",
        1e-12,
    );
    let mut trace_norm = ctx.check(
        "trace norm = Hilbert-Schmidt norm",
        "the trace and Hilbert-Schmidt norms agree on rank-1 projections",
        1e-12,
    );
    let mut squares: Vec<_> = Involution::ALL
        .iter()
        .map(|k| ctx.check(&format!("{} involution squares to id", k.name()), &format!("{} involution: sigma^2 = id", k.name()), 1e-13))
        .collect();
    let mut anti: Vec<_> = Involution::ALL
        .iter()
        .map(|k| {
            ctx.check(
                &format!("{} involution is I-antiholomorphic", k.name()),
                &format!("{} involution: d sigma(iA) = -i d sigma(A)", k.name()),
                1e-13,
            )
        })
        .collect();
    let mut nondeg: Vec<_> = Involution::ALL
        .iter()
        .map(|k| {
            ctx.check(
                &format!("Omega nondegenerate on {} fixed tangents", k.name()),
                &format!("{} involution: Omega restricted to the fixed tangent plane is nondegenerate (condition number)", k.name()),
                MAX_CONDITION,
            )
        })
        .collect();

    for _ in 0..ctx.cfg.trials {
        let q = match random_point_with(2, 1, 1.0, &mut r) {
            Ok(q) => q,
            Err(e) => {
                quad.eval(|| witness(&[]), || Err(e));
                break;
            }
        };
        let a = random_tangent_with(&q, &mut r);
        let w = || witness(&[("q", q.matrix()), ("A", a.matrix())]);
        quad.eval(w, || Ok(quadric_coords(&q)?.residual().norm()));
        cross.eval(w, || {
            let c = quadric_coords(&q)?;
            let jv = cross_product_j(&c, &quadric_tangent(&a)?)?;
            let mv = quadric_tangent(&apply_structure(Tag::J, &a)?)?;
            let diff = jv.iter().zip(&mv).map(|(s, t)| (s - t).norm_sqr()).sum::<f64>().sqrt();
            Ok(diff / ((1.0 + a.norm()) * (1.0 + q.norm()).powi(2)))
        });
        eh.eval(w, || {
            let e = eguchi_hanson_potential(&q)?;
            Ok((e.tau - e.potential).abs())
        });
        trace_norm.eval(w, || Ok((q.matrix().trace_norm() - q.norm()).abs() / q.norm()));
        for (k, kind) in Involution::ALL.into_iter().enumerate() {
            squares[k].eval(w, || {
                let s = involution(kind, &involution(kind, &q)?)?;
                Ok((s.matrix() - q.matrix()).norm() / q.norm())
            });
            anti[k].eval(w, || {
                let da = involution_differential(kind, &a)?;
                let dia = involution_differential(kind, &a.scale(I))?;
                Ok((dia.matrix() + &da.matrix().scale(I)).norm() / a.norm())
            });
        }
    }

    for (k, kind) in Involution::ALL.into_iter().enumerate() {
        for _ in 0..FIXED_POINTS {
            let q = match random_fixed_point(kind, &mut r) {
                Ok(q) => q,
                Err(e) => {
                    nondeg[k].eval(|| witness(&[]), || Err(e));
                    continue;
                }
            };
            nondeg[k].eval(
                || witness(&[("q", q.matrix())]),
                || {
                    let (basis, w) = fixed_tangent_pairing(kind, &q)?;
                    if basis.len() != 2 {
                        return Ok(f64::INFINITY);
                    }
                    Ok(condition(&ComplexMatrix::from_inner(w)?.singular_values()))
                },
            );
        }
    }

    let mut out = vec![quad.finish(), cross.finish(), eh.finish(), trace_norm.finish()];
    for ((s, a), n) in squares.into_iter().zip(anti).zip(nondeg) {
        out.extend([s.finish(), a.finish(), n.finish()]);
    }
    out
}
