//! Seeded, pole-safe random data for property sweeps.
//!
//! Every sample draws from its own ChaCha8 stream selected by the sample
//! index, so results do not depend on the order or thread in which samples
//! are evaluated.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::{Polarization, Soliton, SolitonData};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Denominator modulus below which a configuration counts as near-pole.
pub const NEAR_POLE: f64 = 1e-8;
/// Give up after this many consecutive rejections.
pub const MAX_RESAMPLES: usize = 10_000;

/// Independent generator for sample `index` of a sweep seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Ranges for random spectral data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ranges {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// Draw only `u > 0`.
    pub positive_u: bool,
}

impl Default for Ranges {
    fn default() -> Self {
        Self { u_min: 0.1, u_max: 2.0, v_min: 0.2, v_max: 2.0, positive_u: false }
    }
}

impl Ranges {
    pub fn half_line() -> Self {
        Self { positive_u: true, ..Self::default() }
    }
}

/// `|u|` uniform in `[u_min, u_max]` with a random sign unless `positive_u`.
pub fn random_u<R: Rng>(rng: &mut R, r: &Ranges) -> f64 {
    let magnitude = rng.random_range(r.u_min..=r.u_max);
    if r.positive_u || rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

pub fn random_v<R: Rng>(rng: &mut R, r: &Ranges) -> f64 {
    rng.random_range(r.v_min..=r.v_max)
}

/// `k = (u + i v)/2` from [`random_u`] and [`random_v`].
pub fn random_k<R: Rng>(rng: &mut R, r: &Ranges) -> Complex64 {
    let u = random_u(rng, r);
    let v = random_v(rng, r);
    Complex64::new(0.5 * u, 0.5 * v)
}

pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Vector with i.i.d. standard complex Gaussian entries.
pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    CVector::from_iterator(n, (0..n).map(|_| complex_gaussian(rng)))
}

/// Uniformly distributed polarization.
pub fn random_polarization<R: Rng>(rng: &mut R, n: usize) -> Polarization {
    loop {
        if let Ok(p) = Polarization::new(&random_vector(rng, n)) {
            return p;
        }
    }
}

/// Haar-distributed unitary matrix: QR of a Gaussian matrix with the phases
/// of `diag(R)` moved into `Q`.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `true` when no pair of parameters is closer than [`NEAR_POLE`] to one of
/// the singular configurations `k_i = k_j`, `k_i = -k_j^*`, and no
/// parameter is that close to the imaginary axis.
pub fn pole_safe(ks: &[Complex64]) -> bool {
    for (i, a) in ks.iter().enumerate() {
        if a.re.abs() < NEAR_POLE || a.im < NEAR_POLE {
            return false;
        }
        for b in &ks[i + 1..] {
            if (a - b).norm() < NEAR_POLE || (a + b.conj()).norm() < NEAR_POLE {
                return false;
            }
        }
    }
    true
}

/// Smallest gap between distinct values of `u = 2 Re k`.
pub fn min_u_gap(ks: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, a) in ks.iter().enumerate() {
        for b in &ks[i + 1..] {
            gap = gap.min(2.0 * (a.re - b.re).abs());
        }
    }
    gap
}

/// A drawn value and the number of rejected draws before it.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled<T> {
    pub value: T,
    pub resamples: usize,
}

/// Draws until `accept` holds.
pub fn resample<R: Rng, T>(
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> T,
    mut accept: impl FnMut(&T) -> bool,
) -> Result<Sampled<T>> {
    for resamples in 0..MAX_RESAMPLES {
        let value = draw(rng);
        if accept(&value) {
            return Ok(Sampled { value, resamples });
        }
    }
    Err(Error::Domain(format!("no acceptable sample after {MAX_RESAMPLES} draws")))
}

/// `count` pole-safe parameters whose `u` values differ by at least `min_gap`.
pub fn random_parameters<R: Rng>(
    rng: &mut R,
    count: usize,
    ranges: &Ranges,
    min_gap: f64,
) -> Result<Sampled<Vec<Complex64>>> {
    resample(
        rng,
        |rng| (0..count).map(|_| random_k(rng, ranges)).collect::<Vec<_>>(),
        |ks| pole_safe(ks) && min_u_gap(ks) >= min_gap,
    )
}

/// Random `N`-soliton data with `n` components; solitons sorted by `u`.
pub fn random_soliton_data<R: Rng>(
    rng: &mut R,
    n: usize,
    count: usize,
    ranges: &Ranges,
    min_gap: f64,
) -> Result<Sampled<SolitonData>> {
    let ks = random_parameters(rng, count, ranges, min_gap)?;
    let mut params = ks.value;
    params.sort_by(|a, b| a.re.total_cmp(&b.re));
    let solitons = params
        .iter()
        .map(|k| loop {
            if let Ok(s) = Soliton::new(2.0 * k.re, 2.0 * k.im, random_vector(rng, n)) {
                break s;
            }
        })
        .collect();
    Ok(Sampled { value: SolitonData::new(n, solitons)?, resamples: ks.resamples })
}
