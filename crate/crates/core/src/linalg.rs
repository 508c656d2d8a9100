//! Dense complex matrices with the Hilbert–Schmidt structure.
//!
//! `ComplexMatrix` is the ambient algebra every other module works in. It is a
//! thin newtype over `nalgebra::DMatrix<Complex64>`; the exponential is
//! nalgebra's scaling-and-squaring Padé implementation.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub type C64 = Complex64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A square `d × d` complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}) [", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            write!(f, "[")?;
            for j in 0..self.dim() {
                let z = self.0[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(d: usize) -> Self {
        Self(DMatrix::zeros(d, d))
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(d, d, |i, j| f(i, j)))
    }

    /// Builds a matrix from complex rows. Panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let d = rows.len();
        assert!(rows.iter().all(|r| r.len() == d), "rows must form a square matrix");
        Self::from_fn(d, |i, j| rows[i][j])
    }

    /// Builds a matrix from real rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let d = rows.len();
        assert!(rows.iter().all(|r| r.len() == d), "rows must form a square matrix");
        Self::from_fn(d, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// The matrix unit `e_ij` (zero-based indices).
    pub fn unit(d: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(d);
        m.0[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn real_diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_inner(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        Ok(Self(m))
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// `(X + X*)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// `(X − X*)/2`.
    pub fn skew_part(&self) -> Self {
        (self - &self.adjoint()).scale_real(0.5)
    }

    /// Matrix power by repeated multiplication.
    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.dim());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Real vector of length `2d²` (row-major, re/im interleaved).
    pub fn to_real_vec(&self) -> Vec<f64> {
        let d = self.dim();
        let mut v = Vec::with_capacity(2 * d * d);
        for i in 0..d {
            for j in 0..d {
                let z = self.0[(i, j)];
                v.push(z.re);
                v.push(z.im);
            }
        }
        v
    }

    pub fn from_real_vec(d: usize, v: &[f64]) -> Self {
        assert_eq!(v.len(), 2 * d * d);
        Self::from_fn(d, |i, j| C64::new(v[2 * (i * d + j)], v[2 * (i * d + j) + 1]))
    }

    pub fn ensure_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }

    /// Maximum absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.0.clone().svd(false, false).singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Trace-class norm `Tr √(X*X)`, the sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }

    /// Numerical rank: number of singular values above `tol · σ_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let s = self.singular_values();
        let smax = s.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        s.iter().filter(|&&x| x > tol * smax).count()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op rhs.0)
            }
        }
        impl $trait<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op &rhs.0)
            }
        }
        impl $trait<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<C64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale_real(rhs)
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale_real(rhs)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 -= &rhs.0;
    }
}

/// Hilbert–Schmidt inner product `⟨X, Y⟩ = Tr(X*Y)`, linear in the second slot.
pub fn hs_inner(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<C64> {
    x.ensure_same_dim(y)?;
    Ok(x.0.iter().zip(y.0.iter()).map(|(a, b)| a.conj() * b).sum())
}

/// `Re ⟨X, Y⟩`, the real inner product on matrices viewed as `ℝ^{2d²}`.
pub(crate) fn real_inner(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    x.0.iter().zip(y.0.iter()).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
}

pub fn commutator(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.ensure_same_dim(y)?;
    Ok(comm(x, y))
}

/// Unchecked commutator for internal use once dimensions are validated.
pub(crate) fn comm(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(&x.0 * &y.0 - &y.0 * &x.0)
}

pub fn expm(x: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(x.0.exp())
}

/// `exp(−tN) · p · exp(tN)`.
///
/// The velocity at `t = 0` is `[p, N]`, so with `N = [q, A]` this is the flow
/// of the canonical vector field `p ↦ [p, [q, A]]`.
pub fn conj_flow(p: &ComplexMatrix, n: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    p.ensure_same_dim(n)?;
    if !t.is_finite() {
        return Err(Error::NonFinite("flow time"));
    }
    Ok(flow(p, n, t))
}

pub(crate) fn flow(p: &ComplexMatrix, n: &ComplexMatrix, t: f64) -> ComplexMatrix {
    if t == 0.0 {
        return p.clone();
    }
    let tn = n.scale_real(t);
    let fwd = expm(&tn);
    let back = expm(&-tn);
    &(&back * p) * &fwd
}

/// Matrix with iid standard complex Gaussian entries (`E|z|² = 1`).
pub fn complex_gaussian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// Haar-distributed unitary drawn from `rng`: QR of a complex Ginibre matrix
/// with the phases of `diag(R)` moved into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    assert!(d >= 1, "dimension must be positive");
    let g = complex_gaussian(d, rng);
    let qr = g.0.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / n } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix(q)
}

/// Haar unitary from a fresh ChaCha20 stream seeded with `seed`.
pub fn haar_unitary(d: usize, seed: u64) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let mut r: ChaCha20Rng = rng::from_seed(seed);
    Ok(haar_unitary_with(d, &mut r))
}

/// Orthonormal basis (as columns) of the span of the columns of `m`, by
/// column-pivoted Gram–Schmidt with one reorthogonalization pass. Returns
/// `RankDeficient` if fewer than `rank` columns have residual norm above
/// `tol · max column norm`.
pub fn range_basis(m: &ComplexMatrix, rank: usize, tol: f64) -> Result<DMatrix<C64>> {
    let d = m.dim();
    let mut cols: Vec<nalgebra::DVector<C64>> = (0..d).map(|j| m.0.column(j).into_owned()).collect();
    let scale = cols.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut basis: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(rank);
    for k in 0..rank {
        let (best, best_norm) = cols
            .iter()
            .enumerate()
            .map(|(j, c)| (j, c.norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if scale == 0.0 || best_norm <= tol * scale {
            return Err(Error::RankDeficient { expected: rank, found: k });
        }
        let mut v = cols.swap_remove(best);
        for b in &basis {
            let c = b.dotc(&v);
            v -= b * c;
        }
        let nv = v.norm();
        v /= C64::new(nv, 0.0);
        for c in cols.iter_mut() {
            let coef = v.dotc(c);
            *c -= &v * coef;
        }
        basis.push(v);
    }
    Ok(DMatrix::from_columns(&basis))
}

/// Orthonormal basis, under `Re⟨·,·⟩`, of the real span of `vectors`.
/// Vectors whose residual falls below `tol · (largest input norm)` are dropped.
pub fn real_orthonormal_basis(vectors: &[ComplexMatrix], tol: f64) -> Vec<ComplexMatrix> {
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = real_inner(b, &w);
                w -= &b.scale_real(c);
            }
        }
        let n = w.norm();
        if n > tol * scale && n > 0.0 {
            basis.push(w.scale_real(1.0 / n));
        }
    }
    basis
}

/// Tolerance convention: absolute `tol` scaled by `1 + scale`.
pub fn scaled_tol(tol: f64, scale: f64) -> f64 {
    tol * (1.0 + scale)
}

/// On-disk matrix representation: `{"dim": d, "entries": [[[re, im], ...], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        let d = m.dim();
        let entries = (0..d)
            .map(|i| (0..d).map(|j| [m.0[(i, j)].re, m.0[(i, j)].im]).collect())
            .collect();
        MatrixJson { dim: d, entries }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = String;

    fn try_from(j: MatrixJson) -> std::result::Result<Self, String> {
        if j.entries.len() != j.dim || j.entries.iter().any(|r| r.len() != j.dim) {
            return Err(format!("entries do not form a {0}x{0} matrix", j.dim));
        }
        let m = ComplexMatrix::from_fn(j.dim, |r, c| {
            let [re, im] = j.entries[r][c];
            C64::new(re, im)
        });
        if !m.is_finite() {
            return Err("matrix entries must be finite".into());
        }
        Ok(m)
    }
}

impl ComplexMatrix {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
