//! Yang-Baxter and reflection maps on polarizations.
//!
//! Points of the extended carrier are pairs `(p, k)` of a polarization and a
//! spectral parameter. Pair maps act on two slots of a state, site maps on one.
//! A [`MapObject`] is a lazy composition of such steps; products are written
//! left to right as in operator notation and applied right to left.
//!
//! Indices are 0-based throughout.

use num_complex::Complex64;

use crate::data::{projective_distance, BoundarySpec, Polarization};
use crate::error::{Error, Result};
use crate::linalg::{identity, inner, CMatrix, CVector, ONE};

/// Denominators below this modulus count as poles.
pub const POLE_GUARD: f64 = 1e-8;
/// Smallest `|Re k|` for a point of the extended carrier.
pub const AXIS_GUARD: f64 = 1e-12;

/// `(I + c p p^†) w` for unit `p`.
fn update(p: &CVector, c: Complex64, w: &CVector) -> CVector {
    let s = inner(p, w) * c;
    let mut out = w.clone();
    out.iter_mut().zip(p.iter()).for_each(|(o, pi)| *o += s * pi);
    out
}

fn ratio(num: Complex64, den: Complex64, what: &str) -> Result<Complex64> {
    if den.norm() < POLE_GUARD {
        return Err(Error::Pole(format!("{what}: denominator {den:.3e}")));
    }
    Ok(num / den)
}

/// Collision of two solitons with parameters `k1`, `k2`:
///
/// `p1' = (I + ((k1^* - k2)/(k1^* - k2^*) - 1) P_2) p1`,
/// `p2' = (I + ((k2 - k1^*)/(k2 - k1) - 1) P_1) p2`.
pub fn yb_map(
    k1: Complex64,
    k2: Complex64,
    p1: &Polarization,
    p2: &Polarization,
) -> Result<(Polarization, Polarization)> {
    if p1.dim() != p2.dim() {
        return Err(Error::DimensionMismatch { expected: p1.dim(), found: p2.dim() });
    }
    let c1 = ratio(k1.conj() - k2, k1.conj() - k2.conj(), "Yang-Baxter map")? - ONE;
    let c2 = ratio(k2 - k1.conj(), k2 - k1, "Yang-Baxter map")? - ONE;
    let q1 = update(p2.as_vector(), c1, p1.as_vector());
    let q2 = update(p1.as_vector(), c2, p2.as_vector());
    Ok((Polarization::new(&q1)?, Polarization::new(&q2)?))
}

/// Point of the extended carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedPoint {
    pub p: Polarization,
    pub k: Complex64,
}

impl ExtendedPoint {
    pub fn new(p: Polarization, k: Complex64) -> Result<Self> {
        if !(k.re.abs() > AXIS_GUARD) {
            return Err(Error::ImaginaryAxis(format!("k = {k}")));
        }
        Ok(Self { p, k })
    }

    /// `S(p, k) = (p, -k^*)`.
    pub fn twisted(&self) -> Self {
        Self { p: self.p.clone(), k: -self.k.conj() }
    }
}

/// Map acting on an ordered pair of slots.
pub trait PairMap: Sync {
    fn apply(&self, a: &ExtendedPoint, b: &ExtendedPoint) -> Result<(ExtendedPoint, ExtendedPoint)>;
}

/// Map acting on a single slot.
pub trait SiteMap: Sync {
    fn apply(&self, a: &ExtendedPoint) -> Result<ExtendedPoint>;
}

/// The vector NLS Yang-Baxter map; parameters travel with their points.
#[derive(Debug, Clone, Copy, Default)]
pub struct VnlsYangBaxter;

impl PairMap for VnlsYangBaxter {
    fn apply(&self, a: &ExtendedPoint, b: &ExtendedPoint) -> Result<(ExtendedPoint, ExtendedPoint)> {
        let (p, q) = yb_map(a.k, b.k, &a.p, &b.p)?;
        Ok((ExtendedPoint { p, k: a.k }, ExtendedPoint { p: q, k: b.k }))
    }
}

/// Leaves both slots untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrivialPair;

impl PairMap for TrivialPair {
    fn apply(&self, a: &ExtendedPoint, b: &ExtendedPoint) -> Result<(ExtendedPoint, ExtendedPoint)> {
        Ok((a.clone(), b.clone()))
    }
}

/// The identity reflection.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityReflection;

impl SiteMap for IdentityReflection {
    fn apply(&self, a: &ExtendedPoint) -> Result<ExtendedPoint> {
        Ok(a.clone())
    }
}

/// `S(p, k) = (p, -k^*)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Twist;

impl SiteMap for Twist {
    fn apply(&self, a: &ExtendedPoint) -> Result<ExtendedPoint> {
        Ok(a.twisted())
    }
}

/// Soliton reflection off the boundary described by a [`BoundarySpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReflection {
    pub spec: BoundarySpec,
}

impl BoundaryReflection {
    pub fn new(spec: BoundarySpec) -> Self {
        Self { spec }
    }
}

impl SiteMap for BoundaryReflection {
    fn apply(&self, a: &ExtendedPoint) -> Result<ExtendedPoint> {
        reflection_map(a.k, &a.p, &self.spec)
    }
}

/// `M(k)` of the mirror construction: `(k + i alpha)/(k - i alpha) I` for
/// Robin, `diag(sigma)` for mixed and `U^† diag(sigma) U` for the rotated family.
pub fn boundary_big_m(k: Complex64, spec: &BoundarySpec, n: usize) -> Result<CMatrix> {
    spec.check_dim(n)?;
    match spec {
        BoundarySpec::Robin { alpha } => Ok(identity(n) * robin_ratio(k, *alpha)?),
        BoundarySpec::Mixed { signs } => Ok(sign_matrix(signs)),
        BoundarySpec::RotatedMixed { unitary, signs } => Ok(unitary.adjoint() * sign_matrix(signs) * unitary),
    }
}

/// `m(k)`: the unitary normalization of `M(k)` acting on polarizations.
pub fn boundary_small_m(k: Complex64, spec: &BoundarySpec, n: usize) -> Result<CMatrix> {
    match spec {
        BoundarySpec::Robin { alpha } => {
            let h = robin_ratio(k, *alpha)?;
            Ok(identity(n) * (h / h.norm()))
        }
        _ => boundary_big_m(k, spec, n),
    }
}

fn robin_ratio(k: Complex64, alpha: f64) -> Result<Complex64> {
    let ia = Complex64::new(0.0, alpha);
    let den = k - ia;
    if den.norm() < POLE_GUARD {
        return Err(Error::Pole(format!("Robin boundary matrix at k = {k}, alpha = {alpha}")));
    }
    let h = (k + ia) / den;
    if h.norm() == 0.0 {
        return Err(Error::Pole(format!("Robin boundary matrix vanishes at k = {k}")));
    }
    Ok(h)
}

fn sign_matrix(signs: &[i8]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(signs.len(), signs.iter().map(|&s| Complex64::from(f64::from(s)))))
}

/// `(p, k) -> ((I + (k - k^*)/(k + k^*) P) m(k) p, -k^*)`.
pub fn reflection_map(k: Complex64, p: &Polarization, spec: &BoundarySpec) -> Result<ExtendedPoint> {
    let s = k + k.conj();
    if !(s.re.abs() > 2.0 * AXIS_GUARD) {
        return Err(Error::ImaginaryAxis(format!("reflection at k = {k}")));
    }
    let m = boundary_small_m(k, spec, p.dim())?;
    let c = (k - k.conj()) / s;
    let q = update(p.as_vector(), c, &(m * p.as_vector()));
    Ok(ExtendedPoint { p: Polarization::new(&q)?, k: -k.conj() })
}

#[derive(Clone, Copy)]
enum Step<'a> {
    Pair { map: &'a dyn PairMap, i: usize, j: usize },
    Site { map: &'a dyn SiteMap, i: usize },
}

impl Step<'_> {
    fn apply(&self, state: &mut [ExtendedPoint]) -> Result<()> {
        match *self {
            Step::Pair { map, i, j } => {
                check_slot(i, state.len())?;
                check_slot(j, state.len())?;
                if i == j {
                    return Err(Error::InvalidIndex(format!("pair map on a single slot {i}")));
                }
                let (a, b) = map.apply(&state[i], &state[j]).map_err(|e| step_error(format!("R_{{{i},{j}}}"), e))?;
                state[i] = a;
                state[j] = b;
            }
            Step::Site { map, i } => {
                check_slot(i, state.len())?;
                state[i] = map.apply(&state[i]).map_err(|e| step_error(format!("B_{{{i}}}"), e))?;
            }
        }
        Ok(())
    }
}

fn check_slot(i: usize, len: usize) -> Result<()> {
    if i >= len {
        return Err(Error::InvalidIndex(format!("slot {i} out of range for a state of length {len}")));
    }
    Ok(())
}

fn step_error(step: String, source: Error) -> Error {
    Error::Step { step, source: Box::new(source) }
}

/// Lazy composition of pair and site maps on a state of extended points.
///
/// `R_{ij}` feeds `(x_i, x_j)` to the pair map; the first output goes back to
/// slot `i`, the second to slot `j`.
#[derive(Clone, Default)]
pub struct MapObject<'a> {
    // in application order
    steps: Vec<Step<'a>>,
}

impl<'a> MapObject<'a> {
    pub fn identity() -> Self {
        Self { steps: Vec::new() }
    }

    pub fn pair(map: &'a dyn PairMap, i: usize, j: usize) -> Self {
        Self { steps: vec![Step::Pair { map, i, j }] }
    }

    pub fn site(map: &'a dyn SiteMap, i: usize) -> Self {
        Self { steps: vec![Step::Site { map, i }] }
    }

    /// `self ∘ inner`: `inner` acts first.
    pub fn compose(mut self, inner: MapObject<'a>) -> Self {
        let mut steps = inner.steps;
        steps.append(&mut self.steps);
        Self { steps }
    }

    /// The product `F_1 F_2 ... F_m` as written; `F_m` acts first.
    pub fn product<I: IntoIterator<Item = MapObject<'a>>>(written: I) -> Self {
        written.into_iter().fold(Self::identity(), |acc, f| acc.compose(f))
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn apply(&self, state: &[ExtendedPoint]) -> Result<Vec<ExtendedPoint>> {
        let mut out = state.to_vec();
        for s in &self.steps {
            s.apply(&mut out)?;
        }
        Ok(out)
    }
}

/// Largest slot-wise projective distance between two states, plus any
/// parameter mismatch.
pub fn state_distance(a: &[ExtendedPoint], b: &[ExtendedPoint]) -> f64 {
    a.iter().zip(b).map(|(x, y)| projective_distance(&x.p, &y.p) + (x.k - y.k).norm()).fold(0.0, f64::max)
}

fn triple(ks: [Complex64; 3], ps: [&Polarization; 3]) -> Vec<ExtendedPoint> {
    ks.iter().zip(ps).map(|(&k, p)| ExtendedPoint { p: p.clone(), k }).collect()
}

/// Residual of `R_12 R_13 R_23 = R_23 R_13 R_12`.
pub fn ybe_residual(
    k1: Complex64,
    k2: Complex64,
    k3: Complex64,
    p1: &Polarization,
    p2: &Polarization,
    p3: &Polarization,
) -> Result<f64> {
    let r = VnlsYangBaxter;
    let state = triple([k1, k2, k3], [p1, p2, p3]);
    let lhs = MapObject::product([MapObject::pair(&r, 0, 1), MapObject::pair(&r, 0, 2), MapObject::pair(&r, 1, 2)]);
    let rhs = MapObject::product([MapObject::pair(&r, 1, 2), MapObject::pair(&r, 0, 2), MapObject::pair(&r, 0, 1)]);
    Ok(state_distance(&lhs.apply(&state)?, &rhs.apply(&state)?))
}

/// Residual of `R_21 R_12 = Id`.
pub fn reversibility_residual(k1: Complex64, k2: Complex64, p1: &Polarization, p2: &Polarization) -> Result<f64> {
    let r = VnlsYangBaxter;
    let state = vec![ExtendedPoint { p: p1.clone(), k: k1 }, ExtendedPoint { p: p2.clone(), k: k2 }];
    let round = MapObject::product([MapObject::pair(&r, 1, 0), MapObject::pair(&r, 0, 1)]);
    Ok(state_distance(&round.apply(&state)?, &state))
}

/// Residual of `S_1 S_2 R_12 S_1 S_2 = R_21`.
pub fn twist_residual(k1: Complex64, k2: Complex64, p1: &Polarization, p2: &Polarization) -> Result<f64> {
    let r = VnlsYangBaxter;
    let s = Twist;
    let state = vec![ExtendedPoint { p: p1.clone(), k: k1 }, ExtendedPoint { p: p2.clone(), k: k2 }];
    let lhs = MapObject::product([
        MapObject::site(&s, 0),
        MapObject::site(&s, 1),
        MapObject::pair(&r, 0, 1),
        MapObject::site(&s, 0),
        MapObject::site(&s, 1),
    ]);
    let rhs = MapObject::pair(&r, 1, 0);
    Ok(state_distance(&lhs.apply(&state)?, &rhs.apply(&state)?))
}

/// Residual of `B_1 R_21 B_2 R_12 = R_21 B_2 R_12 B_1` on the extended carrier.
pub fn reflection_equation_residual(
    k1: Complex64,
    k2: Complex64,
    p1: &Polarization,
    p2: &Polarization,
    spec: &BoundarySpec,
) -> Result<f64> {
    let r = VnlsYangBaxter;
    let b = BoundaryReflection::new(spec.clone());
    let state = vec![ExtendedPoint::new(p1.clone(), k1)?, ExtendedPoint::new(p2.clone(), k2)?];
    let lhs = MapObject::product([
        MapObject::site(&b, 0),
        MapObject::pair(&r, 1, 0),
        MapObject::site(&b, 1),
        MapObject::pair(&r, 0, 1),
    ]);
    let rhs = MapObject::product([
        MapObject::pair(&r, 1, 0),
        MapObject::site(&b, 1),
        MapObject::pair(&r, 0, 1),
        MapObject::site(&b, 0),
    ]);
    Ok(state_distance(&lhs.apply(&state)?, &rhs.apply(&state)?))
}

/// Residual of `B(-k^*) B(k) = Id`; the parameter must return exactly.
pub fn involution_residual(k: Complex64, p: &Polarization, spec: &BoundarySpec) -> Result<f64> {
    let once = reflection_map(k, p, spec)?;
    let twice = reflection_map(once.k, &once.p, spec)?;
    Ok(projective_distance(&twice.p, p) + (twice.k - k).norm())
}

/// The three maps entering a transfer map.
#[derive(Clone, Copy)]
pub struct TransferMaps<'a> {
    pub r: &'a dyn PairMap,
    pub b_plus: &'a dyn SiteMap,
    pub b_minus: &'a dyn SiteMap,
}

/// `T_j = R_{j+1,j} ... R_{N,j} B^-_j R_{j,N} ... R_{j,j+1} R_{j,j-1} ... R_{j,1} B^+_j R_{1,j} ... R_{j-1,j}`
/// written with 1-based slots; here `j` and the slots are 0-based.
pub fn transfer_object<'a>(j: usize, len: usize, maps: TransferMaps<'a>) -> Result<MapObject<'a>> {
    if len < 2 {
        return Err(Error::InvalidIndex(format!("transfer maps need at least two slots, got {len}")));
    }
    check_slot(j, len)?;
    let mut written = Vec::new();
    written.extend((j + 1..len).map(|i| MapObject::pair(maps.r, i, j)));
    written.push(MapObject::site(maps.b_minus, j));
    written.extend((j + 1..len).rev().map(|i| MapObject::pair(maps.r, j, i)));
    written.extend((0..j).rev().map(|i| MapObject::pair(maps.r, j, i)));
    written.push(MapObject::site(maps.b_plus, j));
    written.extend((0..j).map(|i| MapObject::pair(maps.r, i, j)));
    Ok(MapObject::product(written))
}

pub fn transfer_map(j: usize, maps: TransferMaps<'_>, state: &[ExtendedPoint]) -> Result<Vec<ExtendedPoint>> {
    transfer_object(j, state.len(), maps)?.apply(state)
}

/// Distance between `T_j T_l` and `T_l T_j` applied to `state`.
pub fn transfer_commutator_residual(
    j: usize,
    l: usize,
    maps: TransferMaps<'_>,
    state: &[ExtendedPoint],
) -> Result<f64> {
    let tj = transfer_object(j, state.len(), maps)?;
    let tl = transfer_object(l, state.len(), maps)?;
    let a = tj.clone().compose(tl.clone()).apply(state)?;
    let b = tl.compose(tj).apply(state)?;
    Ok(state_distance(&a, &b))
}

/// Chooses one of the currently available moves by position in the list.
pub trait MoveChooser {
    fn choose(&mut self, available: usize) -> usize;
}

impl<F: FnMut(usize) -> usize> MoveChooser for F {
    fn choose(&mut self, available: usize) -> usize {
        self(available)
    }
}

/// Always takes the first available move.
pub fn first_move(_: usize) -> usize {
    0
}

/// Full-line scattering of solitons listed left to right at `t -> -infinity`.
///
/// Adjacent solitons `a` (left) and `b` (right) collide when `Re k_a < Re k_b`;
/// each collision applies `R_{ab}` and swaps their positions, until no
/// approaching pair remains. Returns the outgoing polarizations indexed like
/// the input.
pub fn line_scattering(
    incoming: &[(Polarization, Complex64)],
    chooser: &mut dyn MoveChooser,
) -> Result<Vec<Polarization>> {
    let mut state: Vec<(Polarization, Complex64)> = incoming.to_vec();
    let mut pos: Vec<usize> = (0..state.len()).collect();
    loop {
        let moves: Vec<usize> =
            (0..pos.len().saturating_sub(1)).filter(|&i| state[pos[i]].1.re < state[pos[i + 1]].1.re).collect();
        if moves.is_empty() {
            break;
        }
        let i = moves[chooser.choose(moves.len()) % moves.len()];
        let (a, b) = (pos[i], pos[i + 1]);
        let (pa, pb) = yb_map(state[a].1, state[b].1, &state[a].0, &state[b].0)?;
        state[a].0 = pa;
        state[b].0 = pb;
        pos.swap(i, i + 1);
    }
    Ok(state.into_iter().map(|(p, _)| p).collect())
}

/// Half-line scattering with the boundary at the left end.
///
/// `incoming` lists solitons by distance from the boundary at
/// `t -> -infinity`. Available moves are the reflection of the soliton next to
/// the boundary (once per soliton) and collisions of approaching neighbours.
/// Ends when every soliton has reflected and no pair approaches. Returns the
/// final extended points indexed like the input.
pub fn halfline_scattering(
    incoming: &[ExtendedPoint],
    reflection: &dyn SiteMap,
    chooser: &mut dyn MoveChooser,
) -> Result<Vec<ExtendedPoint>> {
    let mut state = incoming.to_vec();
    let mut pos: Vec<usize> = (0..state.len()).collect();
    let mut reflected = vec![false; state.len()];
    loop {
        // None encodes the reflection move
        let mut moves: Vec<Option<usize>> = Vec::new();
        if let Some(&first) = pos.first() {
            if !reflected[first] {
                moves.push(None);
            }
        }
        for i in 0..pos.len().saturating_sub(1) {
            if state[pos[i]].k.re < state[pos[i + 1]].k.re {
                moves.push(Some(i));
            }
        }
        if moves.is_empty() {
            break;
        }
        match moves[chooser.choose(moves.len()) % moves.len()] {
            None => {
                let a = pos[0];
                state[a] = reflection.apply(&state[a]).map_err(|e| step_error(format!("B_{{{a}}}"), e))?;
                reflected[a] = true;
            }
            Some(i) => {
                let (a, b) = (pos[i], pos[i + 1]);
                let (x, y) =
                    VnlsYangBaxter.apply(&state[a], &state[b]).map_err(|e| step_error(format!("R_{{{a},{b}}}"), e))?;
                state[a] = x;
                state[b] = y;
                pos.swap(i, i + 1);
            }
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::vector_distance;
    use crate::linalg::{max_abs, unit_vector, vector_from_pairs};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pol(pairs: &[[f64; 2]]) -> Polarization {
        Polarization::new(&vector_from_pairs(pairs)).unwrap()
    }

    fn e(n: usize, i: usize) -> Polarization {
        Polarization::new(&unit_vector(n, i)).unwrap()
    }

    fn diag() -> Polarization {
        pol(&[[1.0, 0.0], [1.0, 0.0]])
    }

    #[test]
    fn yb_map_trivial_cases() {
        let (k1, k2) = (c(0.5, 0.5), c(-0.5, 0.5));
        let p = pol(&[[0.3, 0.1], [-0.7, 0.2]]);
        let (a, b) = yb_map(k1, k2, &p, &p).unwrap();
        assert!(projective_distance(&a, &p) < 1e-15 && projective_distance(&b, &p) < 1e-15);
        let (a, b) = yb_map(k1, k2, &e(2, 0), &e(2, 1)).unwrap();
        assert!(projective_distance(&a, &e(2, 0)) < 1e-15 && projective_distance(&b, &e(2, 1)) < 1e-15);
    }

    #[test]
    fn yb_map_direct_evaluation() {
        // dense evaluation of the two defining formulas
        let (k1, k2) = (c(0.5, 0.5), c(-0.5, 0.5));
        let p1 = unit_vector(2, 0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p2 = vector_from_pairs(&[[s, 0.0], [s, 0.0]]);
        let proj = |v: &CVector| v * v.adjoint();
        let id = identity(2);
        let q1 = (&id + proj(&p2) * ((k1.conj() - k2) / (k1.conj() - k2.conj()) - ONE)) * &p1;
        let q2 = (&id + proj(&p1) * ((k2 - k1.conj()) / (k2 - k1) - ONE)) * &p2;
        let (a, b) = yb_map(k1, k2, &e(2, 0), &diag()).unwrap();
        assert!(vector_distance(a.as_vector(), &q1).unwrap() < 1e-15);
        assert!(vector_distance(b.as_vector(), &q2).unwrap() < 1e-15);
        // (k1^* - k2)/(k1^* - k2^*) = (1 - i)/1, so q1 = e1 + (-i/2)(e1 + e2)
        let want = vector_from_pairs(&[[1.0, -0.5], [0.0, -0.5]]);
        assert!(vector_distance(a.as_vector(), &want).unwrap() < 1e-15);
    }

    #[test]
    fn yb_map_rejects_coincident_parameters() {
        let k = c(0.3, 0.4);
        assert!(matches!(yb_map(k, k, &diag(), &e(2, 0)), Err(Error::Pole(_))));
    }

    #[test]
    fn equal_polarizations_solve_the_ybe_exactly() {
        let p = pol(&[[0.3, 0.1], [-0.7, 0.2]]);
        let r = ybe_residual(c(0.4, 0.3), c(-0.2, 0.9), c(0.8, 0.5), &p, &p, &p).unwrap();
        assert!(r < 1e-12);
        assert!(reversibility_residual(c(0.4, 0.3), c(-0.2, 0.9), &p, &p).unwrap() < 1e-15);
    }

    #[test]
    fn boundary_matrices() {
        let mixed = BoundarySpec::mixed(vec![1, -1]).unwrap();
        let k = c(0.5, 0.5);
        let m = boundary_small_m(k, &mixed, 2).unwrap();
        assert_eq!(m, sign_matrix(&[1, -1]));
        let rotated = BoundarySpec::rotated_mixed(identity(2), vec![1, -1]).unwrap();
        assert_eq!(boundary_small_m(k, &rotated, 2).unwrap(), m);
        // h = (k + i)/(k - i) for alpha = 1
        let robin = BoundarySpec::robin(1.0).unwrap();
        let h = c(0.5, 1.5) / c(0.5, -0.5);
        let m = boundary_small_m(k, &robin, 2).unwrap();
        assert!(max_abs(&(m - identity(2) * (h / h.norm()))) < 1e-15);
        assert!(matches!(boundary_small_m(c(0.0, 1.0), &robin, 2), Err(Error::Pole(_))));
        assert!(boundary_big_m(k, &mixed, 3).is_err());
    }

    #[test]
    fn reflection_map_examples() {
        let k = c(0.5, 0.5);
        let mixed = BoundarySpec::mixed(vec![1, -1]).unwrap();
        let out = reflection_map(k, &diag(), &mixed).unwrap();
        assert!(projective_distance(&out.p, &pol(&[[1.0, 0.0], [-1.0, 0.0]])) < 1e-15);
        assert_eq!(out.k, c(-0.5, 0.5));
        let out = reflection_map(c(-1.3, 0.2), &e(2, 0), &mixed).unwrap();
        assert!(projective_distance(&out.p, &e(2, 0)) < 1e-15);
        let p = pol(&[[0.3, 0.1], [-0.7, 0.2]]);
        let out = reflection_map(k, &p, &BoundarySpec::robin(0.4).unwrap()).unwrap();
        assert!(projective_distance(&out.p, &p) < 1e-15);
        assert!(matches!(reflection_map(c(0.0, 0.5), &p, &mixed), Err(Error::ImaginaryAxis(_))));
    }

    #[test]
    fn mixed_reflection_is_not_projectively_trivial() {
        let mixed = BoundarySpec::mixed(vec![1, -1]).unwrap();
        let p = pol(&[[0.8, 0.0], [0.2, 0.5]]);
        let out = reflection_map(c(0.7, 0.4), &p, &mixed).unwrap();
        assert!(projective_distance(&out.p, &p) > 0.1);
    }

    #[test]
    fn transfer_with_identity_reflections_commutes() {
        let maps = TransferMaps { r: &VnlsYangBaxter, b_plus: &IdentityReflection, b_minus: &IdentityReflection };
        let state = vec![
            ExtendedPoint::new(pol(&[[0.3, 0.1], [-0.7, 0.2]]), c(0.4, 0.3)).unwrap(),
            ExtendedPoint::new(pol(&[[1.0, 0.0], [0.2, -0.9]]), c(-0.6, 0.8)).unwrap(),
        ];
        for j in 0..2 {
            let out = transfer_map(j, maps, &state).unwrap();
            assert!(state_distance(&out, &state) < 1e-12);
        }
        assert!(transfer_commutator_residual(0, 1, maps, &state).unwrap() < 1e-12);
    }

    #[test]
    fn transfer_object_step_order() {
        let maps = TransferMaps { r: &TrivialPair, b_plus: &IdentityReflection, b_minus: &IdentityReflection };
        // two R's before B+, two after, none on the far side of j = 2 in a 3-slot state
        assert_eq!(transfer_object(2, 3, maps).unwrap().len(), 2 + 1 + 2 + 1);
        assert_eq!(transfer_object(1, 3, maps).unwrap().len(), 1 + 1 + 1 + 1 + 1 + 1);
        assert!(transfer_object(0, 1, maps).is_err());
    }

    #[test]
    fn failing_step_is_named() {
        let k = c(0.4, 0.3);
        let state = vec![ExtendedPoint::new(diag(), k).unwrap(), ExtendedPoint::new(e(2, 0), k).unwrap()];
        let err = MapObject::pair(&VnlsYangBaxter, 0, 1).apply(&state).unwrap_err();
        assert!(err.to_string().starts_with("R_{0,1}"), "{err}");
    }

    #[test]
    fn scalar_polarizations_are_fixed() {
        let one = e(1, 0);
        let (a, b) = yb_map(c(0.4, 0.3), c(-0.2, 0.9), &one, &one).unwrap();
        assert_eq!(a, one);
        assert_eq!(b, one);
    }
}
