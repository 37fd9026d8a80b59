//! Small dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Euclidean norm of a complex vector.
pub fn norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `a^† b`.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn normalized(v: &CVector) -> Result<CVector> {
    let n = norm(v);
    if !n.is_finite() {
        return Err(Error::NonFinite("vector norm"));
    }
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(v.map(|z| z / n))
}

/// Orthogonal projector `v v^† / (v^† v)`.
pub fn projector(v: &CVector) -> CMatrix {
    let nn: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let mut p = v * v.adjoint();
    p.iter_mut().for_each(|z| *z /= nn);
    p
}

/// `(I + c P) w` for the rank-one projector `P = u u^†` with unit `u`,
/// without forming the matrix.
pub fn rank_one_apply(u: &CVector, c: Complex64, w: &CVector) -> CVector {
    let s = inner(u, w) * c;
    let mut out = w.clone();
    out.iter_mut().zip(u.iter()).for_each(|(o, ui)| *o += s * ui);
    out
}

/// Entrywise maximum modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves `m x = b` by LU after a condition-number guard.
pub fn guarded_solve(m: &CMatrix, b: &CVector, max_condition: f64, what: &str) -> Result<CVector> {
    let condition = condition_number(m);
    if !(condition <= max_condition) {
        return Err(Error::Singular { what: what.to_string(), condition });
    }
    m.clone().lu().solve(b).ok_or_else(|| Error::Singular { what: what.to_string(), condition })
}

/// `|U^† U - I|` measured entrywise.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - identity(n)))
}

pub fn vector_from_pairs(pairs: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(pairs.len(), pairs.iter().map(|p| Complex64::new(p[0], p[1])))
}

pub fn unit_vector(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = ONE;
    v
}
