//! Half-line solitons by the mirror-image construction.
//!
//! `N` real solitons with `u_j > 0` are completed by mirror solitons at
//! `k_{j+N} = -k_j^*`. The mirror norming vectors are fixed by
//! `beta_j beta_{j+N}^† = M(k_j^*) A_{j+N}`, where `A_m` is the residue matrix
//! of the inverse chain at `k_m`. The restriction to `x >= 0` of the resulting
//! `2N`-soliton field satisfies the boundary condition encoded by `M`.
//!
//! Indices are 0-based: real solitons `0..N`, mirrors `N..2N`.

use num_complex::Complex64;

use crate::asymptotics::{intermediate_gamma, CollisionContext};
use crate::data::{polarization_of, projective_distance, vector_distance, BoundarySpec, Soliton, SolitonData};
use crate::dressing::{blaschke, reconstruct_field, ReducedChain};
use crate::error::{Error, Result};
use crate::linalg::{guarded_solve, identity, max_abs, norm, CMatrix, CVector};
use crate::maps::{
    boundary_big_m, boundary_small_m, halfline_scattering, BoundaryReflection, ExtendedPoint, MoveChooser, AXIS_GUARD,
};

/// Largest condition number accepted in the mirror solves.
pub const MAX_CONDITION: f64 = 1e12;

/// Real and mirror data of a half-line solution.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineData {
    real: SolitonData,
    mirror: SolitonData,
    spec: BoundarySpec,
    combined: SolitonData,
}

impl HalfLineData {
    pub fn real(&self) -> &SolitonData {
        &self.real
    }

    pub fn mirror(&self) -> &SolitonData {
        &self.mirror
    }

    pub fn spec(&self) -> &BoundarySpec {
        &self.spec
    }

    /// Real solitons followed by their mirrors.
    pub fn combined(&self) -> &SolitonData {
        &self.combined
    }

    /// Number of real solitons.
    pub fn len(&self) -> usize {
        self.real.len()
    }

    pub fn is_empty(&self) -> bool {
        self.real.is_empty()
    }

    /// The same real data and boundary with the mirror norming vectors
    /// replaced, e.g. to probe the constraint residual with corrupted data.
    pub fn with_mirror_norming(&self, betas: Vec<CVector>) -> Result<Self> {
        if betas.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: betas.len() });
        }
        let solitons = self
            .mirror
            .solitons()
            .iter()
            .zip(betas)
            .enumerate()
            .map(|(j, (s, beta))| Soliton::new(s.point.u(), s.point.v(), beta).map_err(|e| e.at_index(j + self.len())))
            .collect::<Result<Vec<_>>>()?;
        let mirror = SolitonData::new(self.real.n(), solitons)?;
        let combined = self.real.concat(&mirror)?;
        Ok(Self { real: self.real.clone(), mirror, spec: self.spec.clone(), combined })
    }

    /// The combined data sorted by `u` and, for every combined index, its
    /// position in the sorted context.
    pub fn sorted_context(&self) -> Result<(CollisionContext, Vec<usize>)> {
        let (ctx, order) = CollisionContext::sorted(&self.combined)?;
        let mut position = vec![0; order.len()];
        for (i, &c) in order.iter().enumerate() {
            position[c] = i;
        }
        Ok((ctx, position))
    }
}

/// `prod_{i != j} f_i(k_j)`, accumulated as log-modulus and unit phase.
fn pole_prefactor(ks: &[Complex64], j: usize) -> Result<Complex64> {
    let mut log_modulus = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for (i, &ki) in ks.iter().enumerate() {
        if i == j {
            continue;
        }
        let f = blaschke(ki, ks[j])?;
        let m = f.norm();
        if m == 0.0 {
            return Err(Error::Pole(format!("k[{i}] coincides with k[{j}]")));
        }
        log_modulus += m.ln();
        phase *= f / m;
    }
    Ok(phase * log_modulus.exp())
}

/// Checks `u_j > 0`, strictly increasing; `u_j = 0` puts the mirror pole on
/// top of the real one.
fn check_real_data(real: &SolitonData) -> Result<()> {
    for (j, s) in real.solitons().iter().enumerate() {
        if s.point.u().abs() <= AXIS_GUARD {
            return Err(Error::ImaginaryAxis(format!("real soliton {j} has u = {}", s.point.u())));
        }
    }
    for (j, s) in real.solitons().iter().enumerate() {
        if s.point.u() < 0.0 {
            return Err(Error::Ordering(format!("real soliton {j} has u = {} < 0", s.point.u())));
        }
    }
    for (j, w) in real.solitons().windows(2).enumerate() {
        if !(w[0].point.u() < w[1].point.u()) {
            return Err(Error::Ordering(format!(
                "u[{j}] = {} is not below u[{}] = {}",
                w[0].point.u(),
                j + 1,
                w[1].point.u()
            )));
        }
    }
    Ok(())
}

/// Mirror norming vectors for `real` under the boundary `spec`.
///
/// Mirror directions are found in descending order `j = N-1, ..., 0`: with
/// `m = j + N`, `L = d^{-1}_{2N-1} ... d^{-1}_{m+1}` built from the mirror
/// factors already known, `v = (c_m M(k_j^*) L(k_m))^{-1} beta_j` and
/// `xi_m = v / |v|^2`. Then `beta_m` solves `d^†_{0..m-1}(k_m) beta_m = xi_m`
/// in ascending order.
pub fn solve_mirror_norming(real: &SolitonData, spec: &BoundarySpec) -> Result<HalfLineData> {
    let n = real.n();
    spec.check_dim(n)?;
    check_real_data(real)?;
    let count = real.len();
    let mut ks: Vec<Complex64> = real.solitons().iter().map(|s| s.k()).collect();
    ks.extend(real.solitons().iter().map(|s| s.point.mirror().k()));

    let mut xi: Vec<Option<CVector>> = vec![None; 2 * count];
    let mut dirs: Vec<Option<CVector>> = vec![None; 2 * count];
    for j in (0..count).rev() {
        let m = j + count;
        let km = ks[m];
        let mut l = identity(n);
        for i in (m + 1..2 * count).rev() {
            let dir = dirs[i].as_ref().expect("descending order fills later mirrors first");
            let c = Complex64::new(1.0, 0.0) / blaschke(ks[i], km)? - 1.0;
            let lu = &l * dir;
            l += (lu * dir.adjoint()) * c;
        }
        let a = boundary_big_m(ks[j].conj(), spec, n)? * l * pole_prefactor(&ks, m)?;
        let v = guarded_solve(&a, real.beta(j), MAX_CONDITION, "mirror direction")?;
        let size2 = v.norm_squared();
        dirs[m] = Some(&v / Complex64::from(size2.sqrt()));
        xi[m] = Some(v / Complex64::from(size2));
    }

    let mut chain = ReducedChain::canonical(real)?;
    let mut mirror = Vec::with_capacity(count);
    for j in 0..count {
        let m = j + count;
        let target = xi[m].take().expect("filled above");
        let d = chain.eval(ks[m])?;
        let beta = guarded_solve(&d.adjoint(), &target, MAX_CONDITION, "mirror norming vector")?;
        chain.push_direction(m, ks[m], &target)?;
        let p = real.soliton(j).point.mirror();
        mirror.push(Soliton::new(p.u(), p.v(), beta).map_err(|e| e.at_index(m))?);
    }
    let mirror = SolitonData::new(n, mirror)?;
    let combined = real.concat(&mirror)?;
    Ok(HalfLineData { real: real.clone(), mirror, spec: spec.clone(), combined })
}

/// Residue matrix `A_j = prod_{i != j} f_i(k_j) d^{-1}_{last} ... d^{-1}_{j+1} pi_j d^{-1}_{j-1} ... d^{-1}_0`,
/// all at `k_j`, for the chain in canonical order.
pub fn a_matrix(j: usize, data: &SolitonData) -> Result<CMatrix> {
    if j >= data.len() {
        return Err(Error::InvalidIndex(format!("soliton {j} of {}", data.len())));
    }
    let chain = ReducedChain::canonical(data)?;
    let f = chain.factors();
    let kj = data.k(j);
    let mut a = identity(data.n());
    for i in (j + 1..f.len()).rev() {
        a *= f[i].inverse_matrix(kj)?;
    }
    a *= f[j].projector();
    for i in (0..j).rev() {
        a *= f[i].inverse_matrix(kj)?;
    }
    let ks: Vec<Complex64> = data.solitons().iter().map(|s| s.k()).collect();
    Ok(a * pole_prefactor(&ks, j)?)
}

/// `max_j |beta_j beta_{j+N}^† - M(k_j^*) A_{j+N}|` (entrywise).
pub fn mirror_constraint_residual(hl: &HalfLineData) -> Result<f64> {
    let data = &hl.combined;
    let count = hl.len();
    let mut worst = 0.0_f64;
    for j in 0..count {
        let lhs = data.beta(j) * data.beta(j + count).adjoint();
        let rhs = boundary_big_m(data.k(j).conj(), &hl.spec, data.n())? * a_matrix(j + count, data)?;
        worst = worst.max(max_abs(&(lhs - rhs)));
    }
    Ok(worst)
}

/// Largest projective distance in the mirror relations
///
/// `p_{j+N,{0..j+N-1}} = m(k_j) p_{j,{j+1..N-1}}` and
/// `p_{j+N,{0..N-1}} = m(k_j) p_{j,{0..N-1} \ j}`.
pub fn mirror_polarization_residual(hl: &HalfLineData) -> Result<f64> {
    let data = &hl.combined;
    let count = hl.len();
    let mut worst = 0.0_f64;
    for j in 0..count {
        let m = boundary_small_m(data.k(j), &hl.spec, data.n())?;
        let before: Vec<usize> = (0..j + count).collect();
        let later: Vec<usize> = (j + 1..count).collect();
        worst = worst.max(vector_distance(
            &intermediate_gamma(data, j + count, &before)?,
            &(&m * intermediate_gamma(data, j, &later)?),
        )?);
        let reals: Vec<usize> = (0..count).collect();
        let others: Vec<usize> = (0..count).filter(|&i| i != j).collect();
        worst = worst.max(vector_distance(
            &intermediate_gamma(data, j + count, &reals)?,
            &(&m * intermediate_gamma(data, j, &others)?),
        )?);
    }
    Ok(worst)
}

/// `R(x, t)` for `x >= 0`.
pub fn halfline_field(hl: &HalfLineData, x: f64, t: f64) -> Result<CVector> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("half-line field at x = {x}")));
    }
    reconstruct_field(&hl.combined, x, t)
}

/// Largest distance between the reflected polarizations predicted by
/// Yang-Baxter collisions and boundary reflections, and the out polarizations
/// of the mirror solitons.
pub fn reflection_consistency_residual(hl: &HalfLineData, chooser: &mut dyn MoveChooser) -> Result<f64> {
    let (ctx, position) = hl.sorted_context()?;
    let count = hl.len();
    let incoming = (0..count)
        .map(|j| ExtendedPoint::new(polarization_of(&ctx.beta_in(position[j])?), hl.combined.k(j)))
        .collect::<Result<Vec<_>>>()?;
    let reflection = BoundaryReflection::new(hl.spec.clone());
    let outgoing = halfline_scattering(&incoming, &reflection, chooser)?;
    let mut worst = 0.0_f64;
    for (j, point) in outgoing.iter().enumerate() {
        let m = j + count;
        let expected = polarization_of(&ctx.beta_out(position[m])?);
        worst = worst.max(projective_distance(&point.p, &expected) + (point.k - hl.combined.k(m)).norm());
    }
    Ok(worst)
}

/// Norm of the largest mirror norming vector, for diagnostics.
pub fn largest_mirror_norm(hl: &HalfLineData) -> f64 {
    hl.mirror.solitons().iter().map(|s| norm(s.beta.as_vector())).fold(0.0, f64::max)
}
