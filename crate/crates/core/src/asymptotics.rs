//! Long-time asymptotics of multi-soliton solutions.
//!
//! With solitons ordered by increasing `u`, the field splits as `t -> -/+inf`
//! into one-soliton pieces whose norming vectors are
//!
//! `beta_j^in  = prod_{l<j} f_l(k_j^*) d^†_{j+1..N}(k_j) beta_j`,
//! `beta_j^out = prod_{l>j} f_l(k_j^*) d^†_{1..j-1}(k_j) beta_j`,
//!
//! both special cases of the intermediate vectors
//! `gamma_{j,rho} = prod_{p not in {j} u rho} f_p(k_j^*) d^†_rho(k_j) beta_j`.

use num_complex::Complex64;

use crate::data::{check_distinct_indices, polarization_of, NormingVector, Polarization, SolitonData};
use crate::dressing::{blaschke, one_soliton_field, ReducedChain};
use crate::error::{Error, Result};
use crate::linalg::{inner, max_abs_vec, normalized, CVector, ONE};
use crate::maps::{line_scattering, MoveChooser};

/// Which end of the time axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

/// `gamma_{j,rho}` for soliton `j` and spectator set `rho` (chain built in
/// the listed order).
pub fn intermediate_gamma(data: &SolitonData, j: usize, spectators: &[usize]) -> Result<CVector> {
    check_distinct_indices(spectators, data.len())?;
    if j >= data.len() || spectators.contains(&j) {
        return Err(Error::InvalidIndex(format!("soliton {j} with spectators {spectators:?}")));
    }
    let kj = data.k(j);
    let mut prefactor = ONE;
    for p in (0..data.len()).filter(|p| *p != j && !spectators.contains(p)) {
        prefactor *= blaschke(data.k(p), kj.conj())?;
    }
    let chain = ReducedChain::build_subset(data, spectators)?;
    Ok(chain.apply_adjoint(kj, data.beta(j))? * prefactor)
}

/// `Xi_{lj}` from its closed form for the collision of `j` and `l` in the
/// presence of `rho`:
/// `Xi^2 = |f_j(k_l^*)|^2 (1 + v_j v_l / |k_l - k_j|^2 |p_{l,rho}^† p_{j,{l rho}}|^2)`.
pub fn xi_closed_form(data: &SolitonData, j: usize, l: usize, spectators: &[usize]) -> Result<f64> {
    let (kj, kl) = (data.k(j), data.k(l));
    let pl = normalized(&intermediate_gamma(data, l, spectators)?)?;
    let pj = normalized(&intermediate_gamma(data, j, &with_front(l, spectators))?)?;
    let overlap = inner(&pl, &pj).norm_sqr();
    let coupling = ((kj.conj() - kj) * (kl - kl.conj())).re / (kl - kj).norm_sqr();
    Ok(blaschke(kj, kl.conj())?.norm() * (1.0 + coupling * overlap).sqrt())
}

/// `|Xi_{lj} - Xi_{jl}|`.
pub fn xi_symmetry_residual(data: &SolitonData, j: usize, l: usize, spectators: &[usize]) -> Result<f64> {
    Ok((xi_closed_form(data, j, l, spectators)? - xi_closed_form(data, l, j, spectators)?).abs())
}

fn with_front(i: usize, rest: &[usize]) -> Vec<usize> {
    let mut v = Vec::with_capacity(rest.len() + 1);
    v.push(i);
    v.extend_from_slice(rest);
    v
}

/// `(I + (c - 1) p p^†) w * c / xi` for unit `p`.
fn collision_image(p: &CVector, c: Complex64, xi: f64, w: &CVector) -> CVector {
    let s = inner(p, w) * (c - ONE);
    let mut out = w.clone();
    out.iter_mut().zip(p.iter()).for_each(|(o, pi)| *o += s * pi);
    out * (c / xi)
}

/// Solitons sorted by strictly increasing `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionContext {
    data: SolitonData,
}

impl CollisionContext {
    pub fn new(data: SolitonData) -> Result<Self> {
        for (i, w) in data.solitons().windows(2).enumerate() {
            if !(w[0].point.u() < w[1].point.u()) {
                return Err(Error::Ordering(format!(
                    "u[{i}] = {} is not below u[{}] = {}",
                    w[0].point.u(),
                    i + 1,
                    w[1].point.u()
                )));
            }
        }
        Ok(Self { data })
    }

    /// Sorts by `u` first; returns the context and the applied permutation.
    pub fn sorted(data: &SolitonData) -> Result<(Self, Vec<usize>)> {
        let order = data.velocity_order();
        Ok((Self::new(data.permuted(&order)?)?, order))
    }

    pub fn data(&self) -> &SolitonData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn gamma(&self, j: usize, spectators: &[usize]) -> Result<CVector> {
        intermediate_gamma(&self.data, j, spectators)
    }

    pub fn beta_in(&self, j: usize) -> Result<NormingVector> {
        let rho: Vec<usize> = (j + 1..self.len()).collect();
        NormingVector::new(self.gamma(j, &rho)?)
    }

    pub fn beta_out(&self, j: usize) -> Result<NormingVector> {
        let rho: Vec<usize> = (0..j).collect();
        NormingVector::new(self.gamma(j, &rho)?)
    }

    pub fn beta(&self, j: usize, direction: Direction) -> Result<NormingVector> {
        match direction {
            Direction::In => self.beta_in(j),
            Direction::Out => self.beta_out(j),
        }
    }

    /// Largest entrywise residual of the two pairwise-collision relations
    ///
    /// `p_{l,{j rho}} = c/Xi (I + (c - 1) P_{j,{l rho}}) p_{l,rho}`, `c = f_j(k_l^*)^*`,
    /// `p_{j,rho} = c'/Xi (I + (c' - 1) P_{l,rho}) p_{j,{l rho}}`, `c' = f_l(k_j^*)`,
    ///
    /// for `u_j < u_l`, with `p` the normalized `gamma` vectors.
    pub fn collision_consistency_residual(&self, j: usize, l: usize, spectators: &[usize]) -> Result<f64> {
        if !(j < l) {
            return Err(Error::Ordering(format!("collision needs u_j < u_l, got j = {j}, l = {l}")));
        }
        let (kj, kl) = (self.data.k(j), self.data.k(l));
        let xi = xi_closed_form(&self.data, j, l, spectators)?;
        let pl_r = normalized(&self.gamma(l, spectators)?)?;
        let pj_r = normalized(&self.gamma(j, spectators)?)?;
        let pl_jr = normalized(&self.gamma(l, &with_front(j, spectators))?)?;
        let pj_lr = normalized(&self.gamma(j, &with_front(l, spectators))?)?;
        let c = blaschke(kj, kl.conj())?.conj();
        let first = max_abs_vec(&(pl_jr - collision_image(&pj_lr, c, xi, &pl_r)));
        let c2 = blaschke(kl, kj.conj())?;
        let second = max_abs_vec(&(pj_r - collision_image(&pl_r, c2, xi, &pj_lr)));
        Ok(first.max(second))
    }

    /// Sum of one-soliton fields with the in or out norming vectors.
    pub fn asymptotic_profile(&self, x: f64, t: f64, direction: Direction) -> Result<CVector> {
        let mut r = CVector::zeros(self.data.n());
        for j in 0..self.len() {
            let beta = self.beta(j, direction)?;
            r += one_soliton_field(&self.data.soliton(j).point, &beta, x, t);
        }
        Ok(r)
    }

    pub fn in_polarizations(&self) -> Result<Vec<Polarization>> {
        (0..self.len()).map(|j| Ok(polarization_of(&self.beta_in(j)?))).collect()
    }

    pub fn out_polarizations(&self) -> Result<Vec<Polarization>> {
        (0..self.len()).map(|j| Ok(polarization_of(&self.beta_out(j)?))).collect()
    }

    /// Largest projective distance between the out polarizations and the
    /// Yang-Baxter scattering of the in polarizations along the collision
    /// sequence picked by `chooser`.
    pub fn factorization_residual(&self, chooser: &mut dyn MoveChooser) -> Result<f64> {
        let incoming: Vec<(Polarization, Complex64)> =
            self.in_polarizations()?.into_iter().enumerate().map(|(j, p)| (p, self.data.k(j))).collect();
        let scattered = line_scattering(&incoming, chooser)?;
        let expected = self.out_polarizations()?;
        Ok(scattered.iter().zip(&expected).map(|(a, b)| crate::data::projective_distance(a, b)).fold(0.0, f64::max))
    }
}
