//! Seeded property suites. Sample `i` draws from `sample_rng(seed, i)`, so
//! results do not depend on thread scheduling.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use vnls_core::asymptotics::CollisionContext;
use vnls_core::data::{projective_distance, Polarization};
use vnls_core::dressing::{one_soliton_field, permutation_residual, reconstruct_field, ReducedChain};
use vnls_core::linalg::max_abs_vec;
use vnls_core::maps::{
    first_move, involution_residual, reflection_equation_residual, reversibility_residual,
    transfer_commutator_residual, twist_residual, yb_map, ybe_residual, BoundaryReflection, ExtendedPoint,
    IdentityReflection, TransferMaps, VnlsYangBaxter,
};
use vnls_core::mirror::{mirror_constraint_residual, mirror_polarization_residual, solve_mirror_norming};
use vnls_core::sampling::{
    random_parameters, random_polarization, random_soliton_data, random_unitary, sample_rng, Ranges,
};
use vnls_core::BoundarySpec;

use crate::config::{SuiteConfig, Tolerances};
use crate::error::{CliError, Context};
use crate::report::Check;

/// A measured quantity and the tolerance it is held to; `None` records it
/// without a verdict.
struct Metric {
    name: &'static str,
    tolerance: Option<&'static str>,
}

const fn checked(name: &'static str, tolerance: &'static str) -> Metric {
    Metric { name, tolerance: Some(tolerance) }
}

const fn recorded(name: &'static str) -> Metric {
    Metric { name, tolerance: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Robin,
    Mixed,
    RotatedMixed,
}

impl BoundaryKind {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "robin" => Ok(Self::Robin),
            "mixed" => Ok(Self::Mixed),
            "rotated_mixed" => Ok(Self::RotatedMixed),
            other => Err(CliError::Config {
                path: "suite.boundary".into(),
                message: format!("`{other}` is not one of robin, mixed, rotated_mixed"),
            }),
        }
    }

    /// Robin with `alpha` uniform in [-1.5, 1.5], or the alternating sign
    /// pattern `(+1, -1, +1, ...)`, optionally rotated by a random unitary.
    fn draw<R: Rng>(self, rng: &mut R, n: usize) -> BoundarySpec {
        let signs: Vec<i8> = (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        let spec = match self {
            Self::Robin => BoundarySpec::robin(rng.random_range(-1.5..=1.5)),
            Self::Mixed => BoundarySpec::mixed(signs),
            Self::RotatedMixed => BoundarySpec::rotated_mixed(random_unitary(rng, n), signs),
        };
        spec.expect("generated boundary data is valid")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteParams {
    pub seed: u64,
    pub n: usize,
    pub count: usize,
    pub boundary: BoundaryKind,
}

struct Sample {
    values: Vec<f64>,
    resamples: usize,
}

type Runner = fn(&SuiteParams, u64) -> vnls_core::Result<Sample>;

struct Suite {
    name: &'static str,
    metrics: &'static [Metric],
    run: Runner,
}

const SUITES: &[Suite] = &[
    Suite { name: "one-soliton", metrics: &[checked("one-soliton", "oracle")], run: one_soliton },
    Suite { name: "permutation", metrics: &[checked("permutation", "algebraic")], run: permutation },
    Suite { name: "determinant", metrics: &[checked("determinant", "oracle")], run: determinant },
    Suite { name: "ybe", metrics: &[checked("ybe", "algebraic")], run: ybe },
    Suite { name: "reversibility", metrics: &[checked("reversibility", "involution")], run: reversibility },
    Suite { name: "twist", metrics: &[checked("twist", "involution")], run: twist },
    Suite {
        name: "unitary-invariance",
        metrics: &[checked("unitary-invariance", "involution")],
        run: unitary_invariance,
    },
    Suite {
        name: "reflection-equation",
        metrics: &[checked("reflection-equation", "algebraic"), checked("involution", "involution")],
        run: reflection_equation,
    },
    Suite { name: "collision", metrics: &[checked("collision", "algebraic")], run: collision },
    Suite { name: "factorization", metrics: &[checked("factorization", "algebraic")], run: factorization },
    Suite {
        name: "mirror",
        metrics: &[checked("mirror-constraint", "mirror"), checked("mirror-polarization", "algebraic")],
        run: mirror,
    },
    Suite {
        name: "transfer",
        metrics: &[checked("transfer", "transfer"), recorded("transfer-boundary")],
        run: transfer,
    },
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

/// Resolves defaults: `n = 2`, `count = 3`, boundary `mixed`.
pub fn params(suite: &SuiteConfig, seed: u64) -> Result<SuiteParams, CliError> {
    let n = suite.n.unwrap_or(2);
    let count = suite.count.unwrap_or(3);
    if n == 0 {
        return Err(CliError::Config { path: "suite.n".into(), message: "must be at least 1".into() });
    }
    if count == 0 {
        return Err(CliError::Config { path: "suite.count".into(), message: "must be at least 1".into() });
    }
    let boundary = BoundaryKind::parse(suite.boundary.as_deref().unwrap_or("mixed"))?;
    Ok(SuiteParams { seed, n, count, boundary })
}

/// Runs `samples` seeded samples of the named suite; one check per metric
/// holding the worst residual. `samples = 0` runs nothing and returns no checks.
pub fn run_property_suite(
    name: &str,
    samples: usize,
    params: &SuiteParams,
    tolerances: &Tolerances,
) -> Result<Vec<Check>, CliError> {
    let suite = SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| CliError::UnknownSuite { name: name.to_string(), known: suite_names().join(", ") })?;
    if samples == 0 {
        return Ok(Vec::new());
    }
    let outcomes: Vec<Sample> = (0..samples as u64)
        .into_par_iter()
        .map(|i| (suite.run)(params, i).map_err(|e| e.at_sample(i)))
        .collect::<vnls_core::Result<_>>()
        .context(name)?;
    let resamples = outcomes.iter().map(|s| s.resamples).sum();
    Ok(suite
        .metrics
        .iter()
        .enumerate()
        .map(|(m, metric)| {
            let mut worst = (0.0_f64, None);
            for (i, s) in outcomes.iter().enumerate() {
                let r = s.values[m];
                if worst.1.is_none() || r > worst.0 || r.is_nan() {
                    worst = (r, Some(i));
                }
            }
            let check = match metric.tolerance {
                Some(t) => Check::against(metric.name, worst.0, tolerances.get(t)),
                None => Check::recorded(metric.name, worst.0),
            };
            check.with_samples(samples, worst.1, resamples)
        })
        .collect())
}

trait AtSample {
    fn at_sample(self, i: u64) -> Self;
}

impl AtSample for vnls_core::Error {
    fn at_sample(self, i: u64) -> Self {
        vnls_core::Error::Step { step: format!("sample {i}"), source: Box::new(self) }
    }
}

fn sample(values: Vec<f64>, resamples: usize) -> vnls_core::Result<Sample> {
    Ok(Sample { values, resamples })
}

fn one_soliton(p: &SuiteParams, i: u64) -> vnls_core::Result<Sample> {
    let mut rng = sample_rng(p.seed, i);
    let drawn = random_soliton_data(&mut rng, p.n, 1, &Ranges::default(), 0.0)?;
    let s = drawn.value.soliton(0);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let (x, t) = (rng.random_range(-5.0..5.0), rng.random_range(-2.0..2.0));
        let r = reconstruct_field(&drawn.value, x, t)?;
        worst = worst.max(max_abs_vec(&(r - one_soliton_field(&s.point, &s.beta, x, t))));
    }
    sample(vec![worst], drawn.resamples)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn permutation(p: &SuiteParams, i: u64) -> vnls_core::Result<Sample> {
    let mut rng = sample_rng(p.seed, i);
    let drawn = random_soliton_data(&mut rng, p.n, p.count, &Ranges::default(), 0.0)?;
    let ks: Vec<Complex64> =
        (0..20).map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
    let xts: Vec<(f64, f64)> = (0..20).map(|_| (rng.random_range(-4.0..4.0), rng.random_range(-1.0..1.0))).collect();
    let orders = permutations(&(0..p.count).collect::<Vec<_>>());
    let mut worst = 0.0_f64;
    for b in &orders[1..] {
        worst = worst.max(permutation_residual(&drawn.value, &orders[0], b, &ks, &xts)?);
    }
    sample(vec![worst], drawn.resamples)
}

fn determinant(p: &SuiteParams, i: u64) -> vnls_core::Result<Sample> {
    let mut rng = sample_rng(p.seed, i);
    let drawn = random_soliton_data(&mut rng, p.n, p.count, &Ranges::default(), 0.0)?;
    let chain = ReducedChain::canonical(&drawn.value)?;
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let k = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let det = chain.eval(k)?.determinant();
        let prod = chain.determinant(k)?;
        worst = worst.max((det - prod).norm() / prod.norm());
    }
    sample(vec![worst], drawn.resamples)
}

fn triple<R: Rng>(rng: &mut R, n: usize) -> vnls_core::Result<(Vec<Complex64>, Vec<Polarization>, usize)> {
    let ks = random_parameters(rng, 3, &Ranges::default(), 0.0)?;
    let ps = (0..3).map(|_| random_polarization(rng, n)).collect();
    Ok((ks.value, ps, ks.resamples))
}

fn ybe(p: &SuiteParams, i: u64) -> vnls_core::Result<Sample> {
    let (k, q, resamples) = triple(&mut sample_rng(p.seed, i), p.n)?;
    sample(vec![ybe_residual(k[0], k[1], k[2], &q[0], &q[1], &q[2])?], resamples)
}

fn reversibility(p: &SuiteParams, i: u64) -> vnls_core::Result<Sample> {
    let (k, q, resamples) = triple(&mut sample_rng(p.seed, i), p.n)?;
    sample(vec![reversibility_residual(k[0], k[1], &q[0], &q[1])?], resamples)
}

fn twist(p: &SuiteParams, i: u64) -> vnls_core::Result<Sample> {
    let (k, q, resamples) = triple(&mut sample_rng(p.seed, i), p.n)?;
    sample(vec![twist_residual(k[0], k[1], &q[0], &q[1])?], resamples)
}

fn unitary_invariance(p: &SuiteParams, i: u64) -> vnls_core::Result<Sample> {
    let mut rng = sample_rng(p.seed, i);
    let (k, q, resamples) = triple(&mut rng, p.n)?;
    let u = random_unitary(&mut rng, p.n);
    let rot = |x: &Polarization| Polarization::new(&(&u * x.as_vector()));
    let (a, b) = yb_map(k[0], k[1], &rot(&q[0])?, &rot(&q[1])?)?;
    let (a0, b0) = yb_map(k[0], k[1], &q[0], &q[1])?;
    let r = projective_distance(&a, &rot(&a0)?).max(projective_distance(&b, &rot(&b0)?));
    sample(vec![r], resamples)
}

fn reflection_equation(p: &SuiteParams, i: u64) -> vnls_core::Result<Sample> {
    let mut rng = sample_rng(p.seed, i);
    let spec = p.boundary.draw(&mut rng, p.n);
    let (k, q, resamples) = triple(&mut rng, p.n)?;
    let re = reflection_equation_residual(k[0], k[1], &q[0], &q[1], &spec)?;
    let inv = involution_residual(k[0], &q[0], &spec)?.max(involution_residual(k[1], &q[1], &spec)?);
    sample(vec![re, inv], resamples)
}

fn collision(p: &SuiteParams, i: u64) -> vnls_core::Result<Sample> {
    let mut rng = sample_rng(p.seed, i);
    let drawn = random_soliton_data(&mut rng, p.n, p.count.max(2), &Ranges::default(), 0.05)?;
    let ctx = CollisionContext::new(drawn.value)?;
    let mut worst = 0.0_f64;
    for j in 0..ctx.len() {
        for l in j + 1..ctx.len() {
            let rest: Vec<usize> = (0..ctx.len()).filter(|&s| s != j && s != l).collect();
            worst = worst.max(ctx.collision_consistency_residual(j, l, &rest)?);
        }
    }
    sample(vec![worst], drawn.resamples)
}

fn factorization(p: &SuiteParams, i: u64) -> vnls_core::Result<Sample> {
    let mut rng = sample_rng(p.seed, i);
    let drawn = random_soliton_data(&mut rng, p.n, p.count, &Ranges::default(), 0.05)?;
    let ctx = CollisionContext::new(drawn.value)?;
    let first = ctx.factorization_residual(&mut first_move)?;
    let last = ctx.factorization_residual(&mut |m: usize| m - 1)?;
    sample(vec![first.max(last)], drawn.resamples)
}

fn mirror(p: &SuiteParams, i: u64) -> vnls_core::Result<Sample> {
    let mut rng = sample_rng(p.seed, i);
    let spec = p.boundary.draw(&mut rng, p.n);
    let drawn = random_soliton_data(&mut rng, p.n, p.count, &Ranges::half_line(), 0.1)?;
    let hl = solve_mirror_norming(&drawn.value, &spec)?;
    sample(vec![mirror_constraint_residual(&hl)?, mirror_polarization_residual(&hl)?], drawn.resamples)
}

fn transfer(p: &SuiteParams, i: u64) -> vnls_core::Result<Sample> {
    let mut rng = sample_rng(p.seed, i);
    let count = p.count.max(2);
    let spec = p.boundary.draw(&mut rng, p.n);
    let ks = random_parameters(&mut rng, count, &Ranges::default(), 0.0)?;
    let state = ks
        .value
        .iter()
        .map(|&k| ExtendedPoint::new(random_polarization(&mut rng, p.n), k))
        .collect::<vnls_core::Result<Vec<_>>>()?;
    let identity = TransferMaps { r: &VnlsYangBaxter, b_plus: &IdentityReflection, b_minus: &IdentityReflection };
    let b = BoundaryReflection::new(spec);
    let boundary = TransferMaps { r: &VnlsYangBaxter, b_plus: &b, b_minus: &b };
    let (mut plain, mut reflected) = (0.0_f64, 0.0_f64);
    for j in 0..count {
        for l in j + 1..count {
            plain = plain.max(transfer_commutator_residual(j, l, identity, &state)?);
            reflected = reflected.max(transfer_commutator_residual(j, l, boundary, &state)?);
        }
    }
    sample(vec![plain, reflected], ks.resamples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    fn params(n: usize, count: usize) -> SuiteParams {
        SuiteParams { seed: 7, n, count, boundary: BoundaryKind::Mixed }
    }

    #[test]
    fn every_suite_runs_and_passes() {
        let tol = Tolerances::resolve(None).unwrap();
        for name in suite_names() {
            let checks = run_property_suite(name, 4, &params(2, 3), &tol).unwrap();
            assert!(!checks.is_empty());
            for c in checks {
                assert_ne!(c.status, Status::Fail, "{name}: {c:?}");
                assert_eq!(c.samples, Some(4));
            }
        }
    }

    #[test]
    fn zero_samples_give_no_checks() {
        let tol = Tolerances::resolve(None).unwrap();
        assert!(run_property_suite("ybe", 0, &params(2, 3), &tol).unwrap().is_empty());
    }

    #[test]
    fn unknown_suite_is_an_error() {
        let tol = Tolerances::resolve(None).unwrap();
        assert!(matches!(run_property_suite("nope", 1, &params(2, 3), &tol), Err(CliError::UnknownSuite { .. })));
    }

    #[test]
    fn results_repeat_bit_for_bit() {
        let tol = Tolerances::resolve(None).unwrap();
        let a = run_property_suite("reflection-equation", 8, &params(3, 2), &tol).unwrap();
        let b = run_property_suite("reflection-equation", 8, &params(3, 2), &tol).unwrap();
        assert_eq!(a, b);
    }
}
