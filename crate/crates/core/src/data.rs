//! Spectral data of vector solitons and boundary specifications.
//!
//! A soliton is fixed by a discrete eigenvalue `k = (u + i v) / 2` in the upper
//! half plane and a nonzero norming vector `beta` in `C^n`. The direction of
//! `beta` is the polarization, its length fixes the envelope position
//! `ln|beta| / v`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm, unitarity_defect, CMatrix, CVector};

/// Distinct-pole tolerance.
pub const POLE_SEPARATION: f64 = 1e-12;
/// Tolerance on `|U^† U - I|` for rotated boundary bases.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

/// A discrete eigenvalue `k = (u + i v) / 2` with `v > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    u: f64,
    v: f64,
    k: Complex64,
}

impl SpectralPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::NonFinite("spectral point"));
        }
        if v <= 0.0 {
            return Err(Error::LowerHalfPlane { index: 0, v });
        }
        Ok(Self { u, v, k: Complex64::new(0.5 * u, 0.5 * v) })
    }

    pub fn from_k(k: Complex64) -> Result<Self> {
        Self::new(2.0 * k.re, 2.0 * k.im)
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn k(&self) -> Complex64 {
        self.k
    }

    /// Soliton velocity `w = -2u`.
    pub fn velocity(&self) -> f64 {
        -2.0 * self.u
    }

    /// The mirror point `-k^*`: same amplitude, opposite `u`.
    pub fn mirror(&self) -> Self {
        Self { u: -self.u, v: self.v, k: -self.k.conj() }
    }
}

/// Nonzero norming vector attached to a spectral point.
#[derive(Debug, Clone, PartialEq)]
pub struct NormingVector {
    beta: CVector,
}

impl NormingVector {
    pub fn new(beta: CVector) -> Result<Self> {
        if beta.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("norming vector"));
        }
        if norm(&beta) == 0.0 {
            return Err(Error::DegenerateNorming { index: 0 });
        }
        Ok(Self { beta })
    }

    pub fn as_vector(&self) -> &CVector {
        &self.beta
    }

    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.beta)
    }

    /// Envelope position `ln|beta| / v` at `t = 0`.
    pub fn position_shift(&self, v: f64) -> f64 {
        self.norm().ln() / v
    }
}

/// A unit vector of `C^n` in canonical phase: the first component of largest
/// modulus is real and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Polarization {
    p: CVector,
}

impl Polarization {
    pub fn new(v: &CVector) -> Result<Self> {
        let n = norm(v);
        if !n.is_finite() {
            return Err(Error::NonFinite("polarization"));
        }
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        if v.len() == 1 {
            return Ok(Self { p: CVector::from_element(1, Complex64::new(1.0, 0.0)) });
        }
        let mut lead = 0;
        let mut lead_abs = -1.0;
        for (i, z) in v.iter().enumerate() {
            let a = z.norm();
            if a > lead_abs {
                lead = i;
                lead_abs = a;
            }
        }
        let phase = v[lead].conj() / lead_abs;
        let mut p = v.map(|z| z * phase / n);
        // exact zero imaginary part on the leading entry
        p[lead] = Complex64::new(p[lead].norm(), 0.0);
        Ok(Self { p })
    }

    pub fn as_vector(&self) -> &CVector {
        &self.p
    }

    pub fn into_vector(self) -> CVector {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }
}

/// `beta / |beta|` in canonical phase.
pub fn polarization_of(beta: &NormingVector) -> Polarization {
    Polarization::new(beta.as_vector()).expect("norming vectors are nonzero")
}

/// Distance on `CP^{n-1}`: `sqrt(1 - |p^† q|^2)`, evaluated as the length of
/// the component of `q` orthogonal to `p` so that it stays accurate near 0.
pub fn projective_distance(p: &Polarization, q: &Polarization) -> f64 {
    orthogonal_residual(p.as_vector(), q.as_vector())
}

/// [`projective_distance`] for arbitrary nonzero vectors.
pub fn vector_distance(a: &CVector, b: &CVector) -> Result<f64> {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(orthogonal_residual(&a.map(|z| z / na), &b.map(|z| z / nb)))
}

fn orthogonal_residual(p: &CVector, q: &CVector) -> f64 {
    let overlap = inner(p, q);
    let d = q.iter().zip(p.iter()).map(|(qi, pi)| (qi - pi * overlap).norm_sqr()).sum::<f64>().sqrt();
    d.min(1.0)
}

/// One soliton: spectral point plus norming vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Soliton {
    pub point: SpectralPoint,
    pub beta: NormingVector,
}

impl Soliton {
    pub fn new(u: f64, v: f64, beta: CVector) -> Result<Self> {
        Ok(Self { point: SpectralPoint::new(u, v)?, beta: NormingVector::new(beta)? })
    }

    pub fn k(&self) -> Complex64 {
        self.point.k()
    }
}

/// `N` solitons of an `n`-component field.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonData {
    n: usize,
    solitons: Vec<Soliton>,
}

impl SolitonData {
    /// Builds and validates.
    pub fn new(n: usize, solitons: Vec<Soliton>) -> Result<Self> {
        let data = Self { n, solitons };
        data.validate()?;
        Ok(data)
    }

    /// Builds from raw `(u, v, beta)` triples, reporting the offending index.
    pub fn from_raw(n: usize, raw: &[(f64, f64, CVector)]) -> Result<Self> {
        let solitons = raw
            .iter()
            .enumerate()
            .map(|(i, (u, v, b))| Soliton::new(*u, *v, b.clone()).map_err(|e| e.at_index(i)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, solitons)
    }

    /// Confirms distinct poles, `v > 0`, nonzero norming vectors and a
    /// consistent component count.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for (i, s) in self.solitons.iter().enumerate() {
            if s.point.v() <= 0.0 {
                return Err(Error::LowerHalfPlane { index: i, v: s.point.v() });
            }
            if s.beta.dim() != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, found: s.beta.dim() });
            }
            if s.beta.norm() == 0.0 {
                return Err(Error::DegenerateNorming { index: i });
            }
        }
        for i in 0..self.solitons.len() {
            for j in (i + 1)..self.solitons.len() {
                if (self.solitons[i].k() - self.solitons[j].k()).norm() < POLE_SEPARATION {
                    return Err(Error::CoincidentPoles { first: i, second: j });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.solitons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solitons.is_empty()
    }

    pub fn solitons(&self) -> &[Soliton] {
        &self.solitons
    }

    pub fn soliton(&self, j: usize) -> &Soliton {
        &self.solitons[j]
    }

    pub fn k(&self, j: usize) -> Complex64 {
        self.solitons[j].k()
    }

    pub fn beta(&self, j: usize) -> &CVector {
        self.solitons[j].beta.as_vector()
    }

    /// Reorders the solitons; `order[i]` is the old index placed at `i`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.len())?;
        Ok(Self { n: self.n, solitons: order.iter().map(|&i| self.solitons[i].clone()).collect() })
    }

    /// The permutation sorting solitons by increasing `u` (stable).
    pub fn velocity_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.solitons[a].point.u().total_cmp(&self.solitons[b].point.u()));
        idx
    }

    /// Concatenation of two datasets with the same `n`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut solitons = self.solitons.clone();
        solitons.extend(other.solitons.iter().cloned());
        Self::new(self.n, solitons)
    }
}

pub(crate) fn check_permutation(order: &[usize], len: usize) -> Result<()> {
    if order.len() != len {
        return Err(Error::InvalidIndex(format!("order has {} entries, expected {len}", order.len())));
    }
    check_distinct_indices(order, len)
}

pub(crate) fn check_distinct_indices(idx: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    for &i in idx {
        if i >= len {
            return Err(Error::InvalidIndex(format!("index {i} out of range for {len} solitons")));
        }
        if seen[i] {
            return Err(Error::InvalidIndex(format!("index {i} repeated")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Integrable boundary at `x = 0`.
///
/// `Robin { alpha }` encodes `R_x(0,t) = 2 alpha R(0,t)`. `Mixed { signs }`
/// encodes a Neumann condition on components with sign `+1` and a Dirichlet
/// condition on components with sign `-1`. `RotatedMixed` applies the mixed
/// condition to `U R`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    Robin { alpha: f64 },
    Mixed { signs: Vec<i8> },
    RotatedMixed { unitary: CMatrix, signs: Vec<i8> },
}

impl BoundarySpec {
    pub fn robin(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidBoundary("alpha must be finite".into()));
        }
        Ok(Self::Robin { alpha })
    }

    pub fn mixed(signs: Vec<i8>) -> Result<Self> {
        check_signs(&signs)?;
        Ok(Self::Mixed { signs })
    }

    pub fn rotated_mixed(unitary: CMatrix, signs: Vec<i8>) -> Result<Self> {
        check_signs(&signs)?;
        if unitary.nrows() != signs.len() || unitary.ncols() != signs.len() {
            return Err(Error::DimensionMismatch { expected: signs.len(), found: unitary.nrows() });
        }
        let defect = unitarity_defect(&unitary);
        if !(defect <= UNITARY_TOLERANCE) {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self::RotatedMixed { unitary, signs })
    }

    /// Number of components the spec is tied to (`None` for Robin).
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Robin { .. } => None,
            Self::Mixed { signs } | Self::RotatedMixed { signs, .. } => Some(signs.len()),
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self.dim() {
            Some(d) if d != n => Err(Error::DimensionMismatch { expected: n, found: d }),
            _ => Ok(()),
        }
    }

    /// Robin boundaries act on polarizations as the identity of `CP^{n-1}`.
    pub fn is_scalar(&self) -> bool {
        matches!(self, Self::Robin { .. })
    }
}

fn check_signs(signs: &[i8]) -> Result<()> {
    if signs.is_empty() {
        return Err(Error::InvalidBoundary("empty sign pattern".into()));
    }
    if let Some(s) = signs.iter().find(|s| **s != 1 && **s != -1) {
        return Err(Error::InvalidBoundary(format!("sign {s} is not +1 or -1")));
    }
    Ok(())
}
