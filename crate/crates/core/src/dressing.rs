//! Reduced and full dressing chains.
//!
//! A reduced chain is the ordered product `d_1(k) ... d_N(k)` of `n x n`
//! factors `d(k) = I + (f(k) - 1) pi`, with `f(k) = (k - k_j) / (k - k_j^*)`
//! and `pi` the orthogonal projector on `xi_j = d_prev^†(k_j) beta_j`. The full
//! chain is the same construction in dimension `n + 1` with the space-time
//! dependent seed `exp(-i phi(x,t,k_j^*) Sigma_3) (beta_j; -1)`,
//! `phi = k x + 2 k^2 t`, and yields the field through the residues.

use num_complex::Complex64;

use crate::data::{check_distinct_indices, check_permutation, NormingVector, SolitonData, SpectralPoint};
use crate::error::{Error, Result};
use crate::linalg::{identity, inner, max_abs, max_abs_vec, norm, CMatrix, CVector, I, ONE};

/// Relative size below which a chain direction counts as vanished.
pub const DEGENERACY: f64 = 1e-13;

/// `f_j(k) = (k - k_j) / (k - k_j^*)`.
pub fn blaschke_factor(point: &SpectralPoint, k: Complex64) -> Result<Complex64> {
    blaschke(point.k(), k)
}

pub(crate) fn blaschke(kj: Complex64, k: Complex64) -> Result<Complex64> {
    let den = k - kj.conj();
    if den.norm() <= 4.0 * f64::EPSILON * (1.0 + k.norm()) {
        return Err(Error::Pole(format!("factor of k = {kj} evaluated at k = {k}")));
    }
    Ok((k - kj) / den)
}

/// One factor `I + (f(k) - 1) u u^†` with unit direction `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneFactor {
    pub k: Complex64,
    pub dir: CVector,
}

impl RankOneFactor {
    fn update(&self, c: Complex64, w: &CVector) -> CVector {
        let s = inner(&self.dir, w) * c;
        let mut out = w.clone();
        out.iter_mut().zip(self.dir.iter()).for_each(|(o, u)| *o += s * u);
        out
    }

    pub fn apply(&self, k: Complex64, w: &CVector) -> Result<CVector> {
        Ok(self.update(blaschke(self.k, k)? - ONE, w))
    }

    pub fn apply_adjoint(&self, k: Complex64, w: &CVector) -> Result<CVector> {
        Ok(self.update(blaschke(self.k, k)?.conj() - ONE, w))
    }

    /// `d(k)^{-1} w = (I + (1/f(k) - 1) pi) w`.
    pub fn apply_inverse(&self, k: Complex64, w: &CVector) -> Result<CVector> {
        Ok(self.update(self.inverse_coefficient(k)?, w))
    }

    fn inverse_coefficient(&self, k: Complex64) -> Result<Complex64> {
        let f = blaschke(self.k, k)?;
        if f.norm() == 0.0 {
            return Err(Error::Pole(format!("inverse factor of k = {} evaluated at its pole", self.k)));
        }
        Ok(ONE / f - ONE)
    }

    pub fn projector(&self) -> CMatrix {
        &self.dir * self.dir.adjoint()
    }

    pub fn matrix(&self, k: Complex64) -> Result<CMatrix> {
        let c = blaschke(self.k, k)? - ONE;
        Ok(identity(self.dir.len()) + self.projector() * c)
    }

    pub fn inverse_matrix(&self, k: Complex64) -> Result<CMatrix> {
        let c = self.inverse_coefficient(k)?;
        Ok(identity(self.dir.len()) + self.projector() * c)
    }

    pub fn adjoint_matrix(&self, k: Complex64) -> Result<CMatrix> {
        Ok(self.matrix(k)?.adjoint())
    }
}

/// `m (I + c u u^†)` without forming the factor.
fn right_multiply(m: &mut CMatrix, factor: &RankOneFactor, c: Complex64) {
    let mu = &*m * &factor.dir;
    *m += (mu * factor.dir.adjoint()) * c;
}

fn apply_adjoints(factors: &[RankOneFactor], k: Complex64, w: &CVector) -> Result<CVector> {
    factors.iter().try_fold(w.clone(), |acc, f| f.apply_adjoint(k, &acc))
}

fn product(n: usize, factors: &[RankOneFactor], k: Complex64) -> Result<CMatrix> {
    let mut m = identity(n);
    for f in factors {
        right_multiply(&mut m, f, blaschke(f.k, k)? - ONE);
    }
    Ok(m)
}

/// Reduced `n x n` chain built along an ordered list of soliton indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedChain {
    n: usize,
    order: Vec<usize>,
    factors: Vec<RankOneFactor>,
    xi_norms: Vec<f64>,
}

impl ReducedChain {
    /// Chain over all solitons; `order` must be a permutation.
    pub fn build(data: &SolitonData, order: &[usize]) -> Result<Self> {
        check_permutation(order, data.len())?;
        Self::build_unchecked(data, order)
    }

    /// Chain in the canonical order `0, 1, ..., N-1`.
    pub fn canonical(data: &SolitonData) -> Result<Self> {
        Self::build_unchecked(data, &(0..data.len()).collect::<Vec<_>>())
    }

    /// Chain over a subset of solitons, in the listed order.
    pub fn build_subset(data: &SolitonData, indices: &[usize]) -> Result<Self> {
        check_distinct_indices(indices, data.len())?;
        Self::build_unchecked(data, indices)
    }

    fn build_unchecked(data: &SolitonData, order: &[usize]) -> Result<Self> {
        let mut factors: Vec<RankOneFactor> = Vec::with_capacity(order.len());
        let mut xi_norms = Vec::with_capacity(order.len());
        for &idx in order {
            let k = data.k(idx);
            let beta = data.beta(idx);
            let xi = apply_adjoints(&factors, k, beta)?;
            let size = norm(&xi);
            if !(size >= DEGENERACY * norm(beta)) {
                return Err(Error::DegenerateChain { index: idx });
            }
            factors.push(RankOneFactor { k, dir: xi / Complex64::from(size) });
            xi_norms.push(size);
        }
        Ok(Self { n: data.n(), order: order.to_vec(), factors, xi_norms })
    }

    /// Extends the chain by one factor with a prescribed (unnormalized) direction.
    pub fn push_direction(&mut self, index: usize, k: Complex64, xi: &CVector) -> Result<()> {
        let size = norm(xi);
        if !(size > 0.0) || !size.is_finite() {
            return Err(Error::DegenerateChain { index });
        }
        self.factors.push(RankOneFactor { k, dir: xi / Complex64::from(size) });
        self.xi_norms.push(size);
        self.order.push(index);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn factors(&self) -> &[RankOneFactor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Unnormalized `xi` of the `i`-th factor in chain order.
    pub fn xi(&self, i: usize) -> CVector {
        &self.factors[i].dir * Complex64::from(self.xi_norms[i])
    }

    /// `d_1(k) ... d_N(k)`.
    pub fn eval(&self, k: Complex64) -> Result<CMatrix> {
        product(self.n, &self.factors, k)
    }

    /// `(d_1 ... d_N)(k) w`.
    pub fn apply(&self, k: Complex64, w: &CVector) -> Result<CVector> {
        self.factors.iter().rev().try_fold(w.clone(), |acc, f| f.apply(k, &acc))
    }

    /// `(d_1 ... d_N)(k)^† w`.
    pub fn apply_adjoint(&self, k: Complex64, w: &CVector) -> Result<CVector> {
        apply_adjoints(&self.factors, k, w)
    }

    /// `prod_j f_j(k)`, the determinant of [`Self::eval`].
    pub fn determinant(&self, k: Complex64) -> Result<Complex64> {
        self.factors.iter().try_fold(ONE, |acc, f| Ok(acc * blaschke(f.k, k)?))
    }
}

/// [`ReducedChain::eval`] as a free function.
pub fn eval_chain(chain: &ReducedChain, k: Complex64) -> Result<CMatrix> {
    chain.eval(k)
}

/// Full `(n+1) x (n+1)` chain at a fixed space-time point.
#[derive(Debug, Clone, PartialEq)]
pub struct FullChain {
    n: usize,
    order: Vec<usize>,
    x: f64,
    t: f64,
    factors: Vec<RankOneFactor>,
    v: Vec<f64>,
}

/// `phi(x, t, k) = k x + 2 k^2 t`.
pub fn phase(x: f64, t: f64, k: Complex64) -> Complex64 {
    k * x + k * k * (2.0 * t)
}

impl FullChain {
    pub fn build(data: &SolitonData, order: &[usize], x: f64, t: f64) -> Result<Self> {
        check_permutation(order, data.len())?;
        Self::build_unchecked(data, order, x, t)
    }

    pub fn canonical(data: &SolitonData, x: f64, t: f64) -> Result<Self> {
        Self::build_unchecked(data, &(0..data.len()).collect::<Vec<_>>(), x, t)
    }

    fn build_unchecked(data: &SolitonData, order: &[usize], x: f64, t: f64) -> Result<Self> {
        if !x.is_finite() || !t.is_finite() {
            return Err(Error::NonFinite("space-time point"));
        }
        let n = data.n();
        let mut factors: Vec<RankOneFactor> = Vec::with_capacity(order.len());
        let mut v = Vec::with_capacity(order.len());
        for &idx in order {
            let k = data.k(idx);
            let seed = seed_vector(data.beta(idx), phase(x, t, k.conj()));
            let zeta = apply_adjoints(&factors, k, &seed)?;
            let size = norm(&zeta);
            if !(size >= DEGENERACY * norm(&seed)) {
                return Err(Error::DegenerateChain { index: idx });
            }
            factors.push(RankOneFactor { k, dir: zeta / Complex64::from(size) });
            v.push(2.0 * k.im);
        }
        Ok(Self { n, order: order.to_vec(), x, t, factors, v })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self) -> (f64, f64) {
        (self.x, self.t)
    }

    pub fn factors(&self) -> &[RankOneFactor] {
        &self.factors
    }

    /// `Pi_i` of the `i`-th factor in chain order.
    pub fn projector(&self, i: usize) -> CMatrix {
        self.factors[i].projector()
    }

    /// `D_1(x,t,k) ... D_N(x,t,k)`.
    pub fn eval(&self, k: Complex64) -> Result<CMatrix> {
        product(self.n + 1, &self.factors, k)
    }

    /// Top-right `n x 1` block of `sum_j i (k_j - k_j^*) [Sigma_3, Pi_j]`.
    pub fn field(&self) -> CVector {
        let n = self.n;
        let mut r = CVector::zeros(n);
        for (f, &v) in self.factors.iter().zip(&self.v) {
            // i (k - k^*) = -v and [Sigma_3, Pi] has top-right block 2 Pi_{:, n}
            let c = f.dir[n].conj() * (-2.0 * v);
            r.iter_mut().zip(f.dir.iter()).for_each(|(ri, zi)| *ri += zi * c);
        }
        r
    }
}

/// `exp(-i phi Sigma_3) (beta; -1)`, scaled by `exp(-|Im phi|)` so that the
/// larger exponential has modulus one. Only the direction is used downstream.
fn seed_vector(beta: &CVector, phi: Complex64) -> CVector {
    let damp = phi.im.abs();
    let top = Complex64::from_polar((phi.im - damp).exp(), -phi.re);
    let bottom = Complex64::from_polar((-phi.im - damp).exp(), phi.re);
    let n = beta.len();
    let mut z = CVector::zeros(n + 1);
    for i in 0..n {
        z[i] = top * beta[i];
    }
    z[n] = -bottom;
    z
}

/// Field `R(x, t)` built in the canonical order.
pub fn reconstruct_field(data: &SolitonData, x: f64, t: f64) -> Result<CVector> {
    Ok(FullChain::canonical(data, x, t)?.field())
}

pub fn reconstruct_field_with_order(data: &SolitonData, order: &[usize], x: f64, t: f64) -> Result<CVector> {
    Ok(FullChain::build(data, order, x, t)?.field())
}

/// `p v exp(-i(u x + (u^2 - v^2) t)) sech(v (x + 2 u t - dx))` with
/// `p = beta/|beta|` and `dx = ln|beta| / v`.
pub fn one_soliton_field(point: &SpectralPoint, beta: &NormingVector, x: f64, t: f64) -> CVector {
    let (u, v) = (point.u(), point.v());
    let size = beta.norm();
    let dx = size.ln() / v;
    let arg = v * (x + 2.0 * u * t - dx);
    // 1/cosh underflows cleanly to zero for large arguments
    let envelope = v / arg.cosh();
    let carrier = (-I * (u * x + (u * u - v * v) * t)).exp();
    beta.as_vector().map(|b| b / size * carrier * envelope)
}

/// Largest entrywise discrepancy between two chain orders: reduced chains at
/// every `k` in `ks`, and full chains plus fields at every `(x, t)` in `xts`.
pub fn permutation_residual(
    data: &SolitonData,
    order_a: &[usize],
    order_b: &[usize],
    ks: &[Complex64],
    xts: &[(f64, f64)],
) -> Result<f64> {
    if order_a == order_b {
        check_permutation(order_a, data.len())?;
        return Ok(0.0);
    }
    let a = ReducedChain::build(data, order_a)?;
    let b = ReducedChain::build(data, order_b)?;
    let mut worst = 0.0_f64;
    for &k in ks {
        worst = worst.max(max_abs(&(a.eval(k)? - b.eval(k)?)));
    }
    for &(x, t) in xts {
        let fa = FullChain::build(data, order_a, x, t)?;
        let fb = FullChain::build(data, order_b, x, t)?;
        worst = worst.max(max_abs_vec(&(fa.field() - fb.field())));
        for &k in ks {
            worst = worst.max(max_abs(&(fa.eval(k)? - fb.eval(k)?)));
        }
    }
    Ok(worst)
}
