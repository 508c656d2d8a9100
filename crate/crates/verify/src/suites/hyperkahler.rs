//! Rank-1 only: `𝐉` and the metric `g` are defined for `n = 1`.

use idemgeo::geometry::{
    apply_structure, exterior_derivative, kahler_2form, metric_calibration, metric_g, omega, ComplexStructureTag as Tag,
    DifferentialForm, MetricTwoForm,
};
use idemgeo::poisson::tangent_basis;
use idemgeo::variety::{random_point_with, random_tangent_with};
use idemgeo::{ComplexMatrix, TangentVector, C64};

use super::{witness, Ctx, MAX_CONDITION};
use crate::report::Check;

pub(super) fn run(ctx: &Ctx) -> Vec<Check> {
    let d = ctx.cfg.dim;
    let mut r = ctx.rng();
    let c = metric_calibration().constant;
    let mut cal = ctx.check(
        "g(Jbold A, B) = Re Omega(A, B)",
        "one scaling constant c: c g_unscaled(Jbold A, B) = Re Omega(A, B)",
        1e-10,
    );
    let mut sq = ctx.check("Jbold^2 = -1", "Jbold (rank 1) squares to -1", 1e-10);
    let mut pd = ctx.check("g positive definite", "Gram matrix of g on T_q is positive definite (condition number)", MAX_CONDITION);
    let mut closed = ctx.check("d g(I.,.) = 0", "the Kahler form g(I.,.) is closed", 1e-6);
    let mut ddc = ctx.check("g(I.,.) = -c dd^c tau", "g(I.,.) = -c dd^c tau with tau = |q|", 1e-12);

    for _ in 0..ctx.cfg.trials {
        let q = match random_point_with(d, 1, 1.0, &mut r) {
            Ok(q) => q,
            Err(e) => {
                cal.eval(|| witness(&[]), || Err(e));
                break;
            }
        };
        let a = random_tangent_with(&q, &mut r);
        let b = random_tangent_with(&q, &mut r);
        let e = random_tangent_with(&q, &mut r);
        let w = || witness(&[("q", q.matrix()), ("A", a.matrix()), ("B", b.matrix()), ("C", e.matrix())]);
        let ab = a.norm() * b.norm();
        let s = (1.0 + q.norm()) * ab;

        cal.eval(w, || {
            let ja = apply_structure(Tag::Jbold, &a)?;
            Ok((metric_g(&ja, &b)? - omega(&a, &b)?.re).abs() / s)
        });
        sq.eval(w, || {
            let jja = apply_structure(Tag::Jbold, &apply_structure(Tag::Jbold, &a)?)?;
            Ok((jja.matrix() + a.matrix()).norm() / a.norm())
        });
        pd.eval(w, || gram_condition(&q));
        closed.eval(w, || {
            let v = exterior_derivative(&MetricTwoForm, &[a.clone(), b.clone(), e.clone()])?;
            Ok(v.norm() / (1.0 + ab * e.norm()))
        });
        ddc.eval(w, || {
            let lhs = MetricTwoForm.eval(&q, &[a.clone(), b.clone()])?;
            let dd = kahler_2form(q.matrix(), a.matrix(), b.matrix())?;
            Ok((lhs + dd.scale(c)).norm() / (1.0 + ab))
        });
    }
    vec![cal.finish(), sq.finish(), pd.finish(), closed.finish(), ddc.finish()]
}

/// `λ_max / λ_min` of the Gram matrix of `g` on a real basis of `T_q`; infinite unless positive definite.
fn gram_condition(q: &idemgeo::ProjectionPoint) -> idemgeo::Result<f64> {
    let basis: Vec<TangentVector> = tangent_basis(q)
        .into_iter()
        .map(|m| TangentVector::new(q.clone(), m))
        .collect::<idemgeo::Result<_>>()?;
    let k = basis.len();
    if k != 4 * (q.dim() - 1) {
        return Ok(f64::INFINITY);
    }
    let mut g = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let v = metric_g(&basis[i], &basis[j])?;
            g[i * k + j] = v;
            g[j * k + i] = v;
        }
    }
    let gram = ComplexMatrix::from_fn(k, |i, j| C64::new(g[i * k + j], 0.0));
    let eig = gram.inner().clone().symmetric_eigenvalues();
    let min = eig.min();
    let max = eig.max();
    Ok(if min > 0.0 { max / min } else { f64::INFINITY })
}

