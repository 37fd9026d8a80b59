//! Finite-difference certification of reconstructed fields.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::data::{projective_distance, BoundarySpec, Polarization, SolitonData};
use crate::dressing::reconstruct_field;
use crate::error::{Error, Result};
use crate::linalg::{inner, norm, CVector, I};
use crate::maps::{halfline_scattering, BoundaryReflection, ExtendedPoint, MoveChooser};
use crate::mirror::{halfline_field, HalfLineData};

/// Smallest grid size accepted along either axis.
pub const MIN_POINTS: usize = 5;
/// Lower bound on `min(v_j, v_l) |w_j - w_l| |t|` for asymptotic extraction.
pub const SEPARATION: f64 = 18.0;

/// Bounds and sample counts of a uniform space-time lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
}

impl GridSpec {
    pub fn new(x0: f64, x1: f64, nx: usize, t0: f64, t1: f64, nt: usize) -> Result<Self> {
        let g = Self { x0, x1, nx, t0, t1, nt };
        g.validate()?;
        Ok(g)
    }

    /// Lattice with spacing `h` on both axes; the upper bounds are rounded to
    /// the nearest multiple of `h`.
    pub fn with_spacing(x0: f64, x1: f64, t0: f64, t1: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Grid(format!("spacing {h}")));
        }
        let nx = ((x1 - x0) / h).round() as usize + 1;
        let nt = ((t1 - t0) / h).round() as usize + 1;
        Self::new(x0, x0 + (nx - 1) as f64 * h, nx, t0, t0 + (nt - 1) as f64 * h, nt)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < MIN_POINTS || self.nt < MIN_POINTS {
            return Err(Error::Grid(format!(
                "need at least {MIN_POINTS} points per axis, got {} x {}",
                self.nx, self.nt
            )));
        }
        if ![self.x0, self.x1, self.t0, self.t1].iter().all(|v| v.is_finite()) {
            return Err(Error::Grid("non-finite bounds".into()));
        }
        if !(self.x1 > self.x0) || !(self.t1 > self.t0) {
            return Err(Error::Grid(format!(
                "empty range x in [{}, {}], t in [{}, {}]",
                self.x0, self.x1, self.t0, self.t1
            )));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + (self.x1 - self.x0) * i as f64 / (self.nx - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t0 + (self.t1 - self.t0) * i as f64 / (self.nt - 1) as f64
    }

    pub fn hx(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx - 1) as f64
    }

    pub fn ht(&self) -> f64 {
        (self.t1 - self.t0) / (self.nt - 1) as f64
    }
}

/// Sampled `n`-component field; values stored row by row in `t`, then `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    spec: GridSpec,
    n: usize,
    values: Vec<CVector>,
    provenance: String,
}

impl FieldGrid {
    /// Evaluates `field` on every lattice point; rows are computed in parallel.
    pub fn sample<F>(spec: GridSpec, n: usize, field: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<CVector> + Sync,
    {
        spec.validate()?;
        let rows = (0..spec.nt)
            .into_par_iter()
            .map(|it| {
                let t = spec.t(it);
                (0..spec.nx).map(|ix| field(spec.x(ix), t)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let values: Vec<CVector> = rows.into_iter().flatten().collect();
        if let Some(v) = values.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        Ok(Self { spec, n, values, provenance: String::new() })
    }

    /// Grid of a full-line soliton field.
    pub fn from_data(spec: GridSpec, data: &SolitonData) -> Result<Self> {
        Self::sample(spec, data.n(), |x, t| reconstruct_field(data, x, t))
    }

    pub fn zeros(spec: GridSpec, n: usize) -> Result<Self> {
        Self::sample(spec, n, |_, _| Ok(CVector::zeros(n)))
    }

    pub fn with_provenance(mut self, digest: impl Into<String>) -> Self {
        self.provenance = digest.into();
        self
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, ix: usize, it: usize) -> &CVector {
        &self.values[it * self.spec.nx + ix]
    }

    /// All values, `t`-major.
    pub fn values(&self) -> &[CVector] {
        &self.values
    }
}

/// `max |i R_t + R_xx + 2 (R^† R) R|` over interior points, second-order
/// central differences, Euclidean norm in `C^n`.
pub fn pde_residual(grid: &FieldGrid) -> f64 {
    let g = grid.spec;
    let (hx, ht) = (g.hx(), g.ht());
    (1..g.nt - 1)
        .into_par_iter()
        .map(|it| {
            let mut worst = 0.0_f64;
            for ix in 1..g.nx - 1 {
                let r = grid.value(ix, it);
                let rt = (grid.value(ix, it + 1) - grid.value(ix, it - 1)) * real(0.5 / ht);
                let rxx = (grid.value(ix + 1, it) - r * real(2.0) + grid.value(ix - 1, it)) * real(1.0 / (hx * hx));
                let cubic = r * (inner(r, r) * 2.0);
                worst = worst.max(norm(&(rt * I + rxx + cubic)));
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Boundary-condition residual at `x = 0` over `times`, with
/// `R_x(0) ~ (-3 R(0) + 4 R(h) - R(2h)) / (2h)`.
///
/// Robin: `|R_x - 2 alpha R|`. Mixed: `|W_j|` on Dirichlet components
/// (sign `-1`) and `|W_{j,x}|` on Neumann components (sign `+1`), with
/// `W = R`, or `W = U R` for the rotated family.
pub fn boundary_residual(hl: &HalfLineData, times: &[f64], h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Grid(format!("spacing {h}")));
    }
    let mut worst = 0.0_f64;
    for &t in times {
        let r0 = halfline_field(hl, 0.0, t)?;
        let r1 = halfline_field(hl, h, t)?;
        let r2 = halfline_field(hl, 2.0 * h, t)?;
        let rx = (&r0 * real(-3.0) + r1 * real(4.0) - r2) * real(0.5 / h);
        let value = match hl.spec() {
            BoundarySpec::Robin { alpha } => norm(&(rx - r0 * real(2.0 * alpha))),
            BoundarySpec::Mixed { signs } => mixed_residual(signs, &r0, &rx),
            BoundarySpec::RotatedMixed { unitary, signs } => mixed_residual(signs, &(unitary * &r0), &(unitary * &rx)),
        };
        worst = worst.max(value);
    }
    Ok(worst)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn mixed_residual(signs: &[i8], w: &CVector, wx: &CVector) -> f64 {
    signs.iter().enumerate().map(|(i, &s)| if s < 0 { w[i].norm() } else { wx[i].norm() }).fold(0.0, f64::max)
}

/// Polarization and location of an isolated envelope peak.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticPeak {
    pub polarization: Polarization,
    /// Peak location at the sampled time.
    pub position: f64,
    /// `position - w_j t`, the envelope shift.
    pub shift: f64,
}

/// Smallest `|t|` at which every soliton of `data` is separated from its
/// neighbours by `margin` (pass `SEPARATION` or more); `None` for a single
/// soliton or coincident velocities.
pub fn separation_time(data: &SolitonData, margin: f64) -> Option<f64> {
    let mut rate = f64::INFINITY;
    for (j, a) in data.solitons().iter().enumerate() {
        for b in &data.solitons()[j + 1..] {
            rate = rate.min(a.point.v().min(b.point.v()) * (a.point.velocity() - b.point.velocity()).abs());
        }
    }
    (rate.is_finite() && rate > 0.0).then(|| margin / rate)
}

/// Locates soliton `j` of `data` at time `t` and reads its polarization.
///
/// Scans `|R|` along `x` near `w_j t` with spacing `1/(10 v_j)`, then refines
/// the maximum by golden-section search.
pub fn extract_asymptotic_polarization(data: &SolitonData, j: usize, t: f64) -> Result<AsymptoticPeak> {
    extract_peak(data, j, t, |x| reconstruct_field(data, x, t))
}

fn extract_peak<F: Fn(f64) -> Result<CVector>>(
    data: &SolitonData,
    j: usize,
    t: f64,
    field: F,
) -> Result<AsymptoticPeak> {
    if j >= data.len() {
        return Err(Error::InvalidIndex(format!("soliton {j} of {}", data.len())));
    }
    let point = data.soliton(j).point;
    let (v, w) = (point.v(), point.velocity());
    // neighbour tails decay at the smaller of the two amplitudes
    let mut gap = f64::INFINITY;
    let mut separation = f64::INFINITY;
    for (l, s) in data.solitons().iter().enumerate() {
        if l != j {
            let dw = (s.point.velocity() - w).abs();
            gap = gap.min(dw);
            separation = separation.min(v.min(s.point.v()) * dw * t.abs());
        }
    }
    let half_width = if gap.is_finite() {
        if separation < SEPARATION {
            return Err(Error::Window(format!(
                "min(v_j, v_l) |w_j - w_l| |t| = {separation:.3} is below {SEPARATION}; solitons are not separated"
            )));
        }
        0.5 * gap * t.abs()
    } else {
        40.0 / v
    };
    let centre = w * t;
    let dx = 0.1 / v;
    let steps = (2.0 * half_width / dx).ceil() as usize;
    let amplitude = |x: f64| -> Result<f64> { Ok(norm(&field(x)?)) };
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..=steps {
        let a = amplitude(centre - half_width + i as f64 * dx)?;
        if a > best.1 {
            best = (i, a);
        }
    }
    if best.0 == 0 || best.0 == steps {
        return Err(Error::Window(format!(
            "maximum of |R| at the edge of [{}, {}]",
            centre - half_width,
            centre + half_width
        )));
    }
    let x_best = centre - half_width + best.0 as f64 * dx;
    let position = golden_section_max(&amplitude, x_best - dx, x_best + dx, 1e-10)?;
    let polarization = Polarization::new(&field(position)?)?;
    Ok(AsymptoticPeak { polarization, position, shift: position - w * t })
}

/// Maximizer of a unimodal function on `[a, b]`.
fn golden_section_max<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let ratio = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Least-squares order of a residual sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceEstimate {
    pub order: f64,
    pub residuals: Vec<f64>,
    /// `false` when the residuals do not decrease with the spacing.
    pub monotone: bool,
}

/// Slope of `ln r` against `ln h` for at least three geometric spacings.
pub fn fit_order(hs: &[f64], residuals: &[f64]) -> Result<ConvergenceEstimate> {
    if hs.len() < 3 || hs.len() != residuals.len() {
        return Err(Error::Grid(format!(
            "need at least 3 spacings with residuals, got {} and {}",
            hs.len(),
            residuals.len()
        )));
    }
    if hs.iter().any(|h| !(*h > 0.0)) || residuals.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::Grid("spacings and residuals must be positive".into()));
    }
    let q = hs[1] / hs[0];
    if hs.windows(2).any(|w| ((w[1] / w[0]) / q - 1.0).abs() > 1e-9) {
        return Err(Error::Grid("spacings are not geometric".into()));
    }
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let pairs: Vec<(f64, f64)> = hs.iter().cloned().zip(residuals.iter().cloned()).collect();
    let monotone = pairs.windows(2).all(|w| (w[1].0 < w[0].0) == (w[1].1 < w[0].1));
    Ok(ConvergenceEstimate { order: sxy / sxx, residuals: residuals.to_vec(), monotone })
}

/// Evaluates `residual` at every spacing and fits the order.
pub fn convergence_order<F: FnMut(f64) -> Result<f64>>(mut residual: F, hs: &[f64]) -> Result<ConvergenceEstimate> {
    let rs = hs.iter().map(|&h| residual(h)).collect::<Result<Vec<_>>>()?;
    fit_order(hs, &rs)
}

/// Largest distance between reflected polarizations read from the field at
/// time `t > 0` and the boundary scattering of the incoming polarizations.
pub fn extracted_reflection_residual(hl: &HalfLineData, t: f64, chooser: &mut dyn MoveChooser) -> Result<f64> {
    let (ctx, position) = hl.sorted_context()?;
    let count = hl.len();
    let incoming = (0..count)
        .map(|j| ExtendedPoint::new(crate::data::polarization_of(&ctx.beta_in(position[j])?), hl.combined().k(j)))
        .collect::<Result<Vec<_>>>()?;
    let outgoing = halfline_scattering(&incoming, &BoundaryReflection::new(hl.spec().clone()), chooser)?;
    let mut worst = 0.0_f64;
    for (j, point) in outgoing.iter().enumerate() {
        let peak = extract_peak(hl.combined(), j + count, t, |x| halfline_field(hl, x, t))?;
        worst = worst.max(projective_distance(&peak.polarization, &point.p));
    }
    Ok(worst)
}
