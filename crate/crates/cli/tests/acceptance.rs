//! Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned
//! below. Exits non-zero when any criterion fails.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use vnls_cli::{Mode, Overrides, RunConfig};
use vnls_core::asymptotics::CollisionContext;
use vnls_core::data::{polarization_of, projective_distance, BoundarySpec, SolitonData};
use vnls_core::dressing::{one_soliton_field, reconstruct_field, reconstruct_field_with_order, ReducedChain};
use vnls_core::linalg::{max_abs, max_abs_vec, vector_from_pairs, CMatrix, CVector};
use vnls_core::maps::{
    first_move, involution_residual, reflection_equation_residual, reversibility_residual,
    transfer_commutator_residual, ybe_residual, BoundaryReflection, ExtendedPoint, IdentityReflection, TransferMaps,
    VnlsYangBaxter,
};
use vnls_core::mirror::{
    halfline_field, mirror_constraint_residual, mirror_polarization_residual, solve_mirror_norming,
};
use vnls_core::sampling::{
    random_parameters, random_polarization, random_soliton_data, random_unitary, sample_rng, Ranges,
};
use vnls_core::verification::{
    boundary_residual, convergence_order, extract_asymptotic_polarization, pde_residual, separation_time, FieldGrid,
    GridSpec,
};

const ONE_SOLITON_TOL: f64 = 1e-12;
const PERMUTATION_TOL: f64 = 1e-10;
const DETERMINANT_REL_TOL: f64 = 1e-12;
const YBE_TOL: f64 = 1e-10;
const REVERSIBILITY_TOL: f64 = 1e-12;
const REFLECTION_EQUATION_TOL: f64 = 1e-10;
const INVOLUTION_TOL: f64 = 1e-12;
const MIRROR_CONSTRAINT_TOL: f64 = 1e-8;
const PERTURBATION: f64 = 1e-3;
const PERTURBATION_DETECTED: f64 = 1e-4;
const MIRROR_POLARIZATION_TOL: f64 = 1e-10;
const ORDER_TARGET: f64 = 2.0;
const ORDER_BAND: f64 = 0.3;
const SPACINGS: [f64; 3] = [0.04, 0.02, 0.01];
const EXTRACTION_SEPARATION: f64 = 20.0;
const EXTRACTION_TOL: f64 = 1e-4;
const FACTORIZATION_TOL: f64 = 1e-10;
const TRANSFER_TOL: f64 = 1e-12;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
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

fn criterion_1() -> Verdict {
    let mut worst = 0.0_f64;
    for n in 1..=3 {
        for d in 0..20 {
            let mut rng = sample_rng(1_000 + n as u64, d);
            let data = random_soliton_data(&mut rng, n, 1, &Ranges::default(), 0.0).unwrap().value;
            let s = data.soliton(0);
            for _ in 0..50 {
                let (x, t) = (rng.random_range(-5.0..5.0), rng.random_range(-2.0..2.0));
                let r = reconstruct_field(&data, x, t).unwrap();
                worst = worst.max(max_abs_vec(&(r - one_soliton_field(&s.point, &s.beta, x, t))));
            }
        }
    }
    verdict(worst <= ONE_SOLITON_TOL, format!("max error {worst:.2e} (tolerance {ONE_SOLITON_TOL:.0e})"))
}

/// Data, spectral probes and (x, t) probes.
type LineDataset = (SolitonData, Vec<Complex64>, Vec<(f64, f64)>);

/// Datasets for criteria 2 and 3: N in 1..=4, n in 1..=3, 10 each.
fn line_datasets(seed: u64) -> Vec<LineDataset> {
    let mut out = Vec::new();
    for count in 1..=4 {
        for n in 1..=3 {
            for d in 0..10 {
                let mut rng = sample_rng(seed + 10 * count as u64 + n as u64, d);
                let data = random_soliton_data(&mut rng, n, count, &Ranges::default(), 0.0).unwrap().value;
                let ks =
                    (0..20).map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
                let xts = (0..20).map(|_| (rng.random_range(-4.0..4.0), rng.random_range(-1.0..1.0))).collect();
                out.push((data, ks, xts));
            }
        }
    }
    out
}

fn criterion_2() -> Verdict {
    let mut worst = 0.0_f64;
    let mut pairs = 0usize;
    for (data, ks, xts) in line_datasets(2_000) {
        let orders = permutations(&(0..data.len()).collect::<Vec<_>>());
        let values: Vec<(Vec<CMatrix>, Vec<CVector>)> = orders
            .iter()
            .map(|o| {
                let chain = ReducedChain::build(&data, o).unwrap();
                let m = ks.iter().map(|&k| chain.eval(k).unwrap()).collect();
                let f = xts.iter().map(|&(x, t)| reconstruct_field_with_order(&data, o, x, t).unwrap()).collect();
                (m, f)
            })
            .collect();
        for a in 0..values.len() {
            for b in a + 1..values.len() {
                pairs += 1;
                for (ma, mb) in values[a].0.iter().zip(&values[b].0) {
                    worst = worst.max(max_abs(&(ma - mb)));
                }
                for (fa, fb) in values[a].1.iter().zip(&values[b].1) {
                    worst = worst.max(max_abs_vec(&(fa - fb)));
                }
            }
        }
    }
    verdict(
        worst <= PERMUTATION_TOL,
        format!("{pairs} order pairs, max residual {worst:.2e} (tolerance {PERMUTATION_TOL:.0e})"),
    )
}

fn criterion_3() -> Verdict {
    let mut worst = 0.0_f64;
    for (data, ks, _) in line_datasets(3_000) {
        let chain = ReducedChain::canonical(&data).unwrap();
        for k in ks {
            let det = chain.eval(k).unwrap().determinant();
            let prod: Complex64 = data.solitons().iter().map(|s| (k - s.k()) / (k - s.k().conj())).product();
            worst = worst.max((det - prod).norm() / prod.norm());
        }
    }
    verdict(
        worst <= DETERMINANT_REL_TOL,
        format!("max relative error {worst:.2e} (tolerance {DETERMINANT_REL_TOL:.0e})"),
    )
}

fn criterion_4() -> Verdict {
    let (mut ybe, mut rev) = (0.0_f64, 0.0_f64);
    for n in [2, 3] {
        for i in 0..100 {
            let mut rng = sample_rng(4_000 + n as u64, i);
            let k = random_parameters(&mut rng, 3, &Ranges::default(), 0.0).unwrap().value;
            let p: Vec<_> = (0..3).map(|_| random_polarization(&mut rng, n)).collect();
            ybe = ybe.max(ybe_residual(k[0], k[1], k[2], &p[0], &p[1], &p[2]).unwrap());
            rev = rev.max(reversibility_residual(k[0], k[1], &p[0], &p[1]).unwrap());
        }
    }
    verdict(
        ybe <= YBE_TOL && rev <= REVERSIBILITY_TOL,
        format!(
            "200 instances: YBE {ybe:.2e} (tolerance {YBE_TOL:.0e}), reversibility {rev:.2e} (tolerance {REVERSIBILITY_TOL:.0e})"
        ),
    )
}

fn signs(n: usize) -> Vec<i8> {
    (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect()
}

fn criterion_5() -> Verdict {
    let classes = ["Robin", "Mixed", "RotatedMixed"];
    let mut worst = [0.0_f64; 3];
    let mut involution = 0.0_f64;
    for n in [2, 3] {
        for i in 0..100 {
            let mut rng = sample_rng(5_000 + n as u64, i);
            let specs = [
                BoundarySpec::robin(rng.random_range(-1.5..1.5)).unwrap(),
                BoundarySpec::mixed(signs(n)).unwrap(),
                BoundarySpec::rotated_mixed(random_unitary(&mut rng, n), signs(n)).unwrap(),
            ];
            let k = random_parameters(&mut rng, 2, &Ranges::default(), 0.0).unwrap().value;
            let (p1, p2) = (random_polarization(&mut rng, n), random_polarization(&mut rng, n));
            for (c, spec) in specs.iter().enumerate() {
                worst[c] = worst[c].max(reflection_equation_residual(k[0], k[1], &p1, &p2, spec).unwrap());
                involution = involution.max(involution_residual(k[0], &p1, spec).unwrap());
            }
        }
    }
    let pass = worst.iter().all(|&w| w <= REFLECTION_EQUATION_TOL) && involution <= INVOLUTION_TOL;
    let per_class: Vec<String> = classes.iter().zip(worst).map(|(c, w)| format!("{c} {w:.2e}")).collect();
    verdict(
        pass,
        format!(
            "200 instances per class: {} (tolerance {REFLECTION_EQUATION_TOL:.0e}); involution {involution:.2e} (tolerance {INVOLUTION_TOL:.0e})",
            per_class.join(", ")
        ),
    )
}

/// Half-line datasets for criteria 6 and 7: N, n in 1..=3, Robin, Mixed and
/// RotatedMixed, 10 each.
fn halfline_datasets() -> Vec<vnls_core::mirror::HalfLineData> {
    let mut out = Vec::new();
    for count in 1..=3 {
        for n in 1..=3 {
            for d in 0..10 {
                let mut rng = sample_rng(6_000 + 10 * count as u64 + n as u64, d);
                let real = random_soliton_data(&mut rng, n, count, &Ranges::half_line(), 0.1).unwrap().value;
                for spec in [
                    BoundarySpec::robin(rng.random_range(-1.0..1.0)).unwrap(),
                    BoundarySpec::mixed(signs(n)).unwrap(),
                    BoundarySpec::rotated_mixed(random_unitary(&mut rng, n), signs(n)).unwrap(),
                ] {
                    out.push(solve_mirror_norming(&real, &spec).unwrap());
                }
            }
        }
    }
    out
}

fn criterion_6(data: &[vnls_core::mirror::HalfLineData]) -> Verdict {
    let worst = data.iter().map(|hl| mirror_constraint_residual(hl).unwrap()).fold(0.0, f64::max);
    let mut detected = f64::INFINITY;
    for hl in data.iter().filter(|hl| hl.len() >= 2) {
        for j in 0..hl.len() {
            let mut betas: Vec<CVector> = hl.mirror().solitons().iter().map(|s| s.beta.as_vector().clone()).collect();
            betas[j][0] += Complex64::new(PERTURBATION, 0.0);
            let r = mirror_constraint_residual(&hl.with_mirror_norming(betas).unwrap()).unwrap();
            detected = detected.min(r);
        }
    }
    verdict(
        worst <= MIRROR_CONSTRAINT_TOL && detected >= PERTURBATION_DETECTED,
        format!(
            "{} datasets: max residual {worst:.2e} (tolerance {MIRROR_CONSTRAINT_TOL:.0e}); smallest residual after a {PERTURBATION:.0e} corruption {detected:.2e} (needs >= {PERTURBATION_DETECTED:.0e})",
            data.len()
        ),
    )
}

fn criterion_7(data: &[vnls_core::mirror::HalfLineData]) -> Verdict {
    let worst = data.iter().map(|hl| mirror_polarization_residual(hl).unwrap()).fold(0.0, f64::max);
    verdict(
        worst <= MIRROR_POLARIZATION_TOL,
        format!("{} datasets: max residual {worst:.2e} (tolerance {MIRROR_POLARIZATION_TOL:.0e})", data.len()),
    )
}

fn in_band(order: f64) -> bool {
    (order - ORDER_TARGET).abs() <= ORDER_BAND
}

fn criterion_8() -> Verdict {
    let line = SolitonData::from_raw(
        2,
        &[
            (-0.6, 1.0, vector_from_pairs(&[[1.0, 0.2], [0.4, -0.3]])),
            (0.5, 1.3, vector_from_pairs(&[[0.1, -0.5], [1.0, 0.3]])),
        ],
    )
    .unwrap();
    let real = SolitonData::from_raw(
        2,
        &[
            (0.5, 1.0, vector_from_pairs(&[[1.0, 0.2], [0.4, -0.3]])),
            (1.1, 1.3, vector_from_pairs(&[[0.1, -0.5], [1.0, 0.3]])),
        ],
    )
    .unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    let line_pde = convergence_order(
        |h| Ok(pde_residual(&FieldGrid::from_data(GridSpec::with_spacing(-3.0, 3.0, -0.4, 0.4, h)?, &line)?)),
        &SPACINGS,
    )
    .unwrap();
    pass &= in_band(line_pde.order);
    parts.push(format!("line PDE {:.2}", line_pde.order));
    for (label, spec) in
        [("Robin", BoundarySpec::robin(0.7).unwrap()), ("Mixed", BoundarySpec::mixed(vec![1, -1]).unwrap())]
    {
        let hl = solve_mirror_norming(&real, &spec).unwrap();
        let pde = convergence_order(
            |h| {
                let g = GridSpec::with_spacing(0.0, 4.0, -0.4, 0.4, h)?;
                Ok(pde_residual(&FieldGrid::sample(g, 2, |x, t| halfline_field(&hl, x, t))?))
            },
            &SPACINGS,
        )
        .unwrap();
        let bc = convergence_order(|h| boundary_residual(&hl, &[-1.5, -0.5, 0.0, 0.4, 1.2], h), &SPACINGS).unwrap();
        pass &= in_band(pde.order) && in_band(bc.order);
        let residuals: Vec<String> = bc.residuals.iter().map(|r| format!("{r:.2e}")).collect();
        parts.push(format!(
            "{label} half-line PDE {:.2}, boundary {:.2} [{}]",
            pde.order,
            bc.order,
            residuals.join(", ")
        ));
    }
    verdict(pass, format!("orders: {} (band {ORDER_TARGET} +/- {ORDER_BAND})", parts.join("; ")))
}

fn criterion_9() -> Verdict {
    let (mut extraction, mut factorization) = (0.0_f64, 0.0_f64);
    let mut runs = 0;
    for count in [2, 3] {
        for n in [2, 3] {
            for d in 0..5 {
                let mut rng = sample_rng(9_000 + 10 * count as u64 + n as u64, d);
                let data = random_soliton_data(&mut rng, n, count, &Ranges::default(), 0.3).unwrap().value;
                let ctx = CollisionContext::new(data).unwrap();
                let t = separation_time(ctx.data(), EXTRACTION_SEPARATION).unwrap();
                for j in 0..count {
                    for (tt, beta) in [(-t, ctx.beta_in(j).unwrap()), (t, ctx.beta_out(j).unwrap())] {
                        let peak = extract_asymptotic_polarization(ctx.data(), j, tt).unwrap();
                        extraction = extraction.max(projective_distance(&peak.polarization, &polarization_of(&beta)));
                    }
                }
                factorization = factorization
                    .max(ctx.factorization_residual(&mut first_move).unwrap())
                    .max(ctx.factorization_residual(&mut |m: usize| m - 1).unwrap());
                runs += 1;
            }
        }
    }
    verdict(
        extraction <= EXTRACTION_TOL && factorization <= FACTORIZATION_TOL,
        format!(
            "{runs} datasets at min(v) |dw| |t| = {EXTRACTION_SEPARATION}: extraction {extraction:.2e} (tolerance {EXTRACTION_TOL:.0e}), YB pipeline in two orders {factorization:.2e} (tolerance {FACTORIZATION_TOL:.0e})"
        ),
    )
}

fn random_state(seed: u64, i: u64, count: usize, n: usize) -> Vec<ExtendedPoint> {
    let mut rng = sample_rng(seed, i);
    let ks = random_parameters(&mut rng, count, &Ranges::default(), 0.0).unwrap().value;
    ks.into_iter().map(|k| ExtendedPoint::new(random_polarization(&mut rng, n), k).unwrap()).collect()
}

fn boundary_experiment() -> f64 {
    let b = BoundaryReflection::new(BoundarySpec::mixed(vec![1, -1]).unwrap());
    let maps = TransferMaps { r: &VnlsYangBaxter, b_plus: &b, b_minus: &b };
    let mut worst = 0.0_f64;
    for i in 0..10 {
        let state = random_state(10_100, i, 3, 2);
        for j in 0..3 {
            for l in j + 1..3 {
                worst = worst.max(transfer_commutator_residual(j, l, maps, &state).unwrap());
            }
        }
    }
    worst
}

fn criterion_10() -> Verdict {
    let identity = TransferMaps { r: &VnlsYangBaxter, b_plus: &IdentityReflection, b_minus: &IdentityReflection };
    let (mut vector, mut scalar) = (0.0_f64, 0.0_f64);
    for count in [2, 3] {
        for i in 0..20 {
            let state = random_state(10_000 + count as u64, i, count, 2);
            let scalar_state = random_state(10_050 + count as u64, i, count, 1);
            for j in 0..count {
                for l in 0..count {
                    vector = vector.max(transfer_commutator_residual(j, l, identity, &state).unwrap());
                    scalar = scalar.max(transfer_commutator_residual(j, l, identity, &scalar_state).unwrap());
                }
            }
        }
    }
    let (a, b) = (boundary_experiment(), boundary_experiment());
    let deterministic = a.to_bits() == b.to_bits() && a.is_finite();
    verdict(
        vector <= TRANSFER_TOL && scalar == 0.0 && deterministic,
        format!(
            "identity reflections {vector:.2e} (tolerance {TRANSFER_TOL:.0e}), n = 1 {scalar:e} (must be 0); \
             recorded: boundary reflections in both slots, N = 3, Mixed (1,-1), worst commutator {a:.4e}, repeat identical: {deterministic}"
        ),
    )
}

fn criterion_11() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut identical = true;
    let mut compared = 0;
    for mode in [Mode::Simulate, Mode::Verify, Mode::Reflect, Mode::Collide] {
        let config = RunConfig::load(&configs.join(format!("{}.json", mode.name()))).unwrap();
        let runs: Vec<_> = ["a", "b"]
            .iter()
            .map(|tag| {
                let out = dir.path().join(format!("{}-{tag}", mode.name()));
                let overrides = Overrides { out: Some(out.clone()), ..Overrides::default() };
                vnls_cli::run(mode, config.clone(), &overrides).unwrap();
                out
            })
            .collect();
        for file in ["report.json", "manifest.json", "grid.csv"] {
            let (a, b) = (runs[0].join(file), runs[1].join(file));
            if a.exists() {
                identical &= std::fs::read(a).unwrap() == std::fs::read(b).unwrap();
                compared += 1;
            }
        }
    }
    verdict(identical, format!("{compared} files compared across repeated runs, byte-identical: {identical}"))
}

type Criterion<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() {
    let start = Instant::now();
    let halfline = halfline_datasets();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("one-soliton oracle", Box::new(criterion_1)),
        ("N!-factorization of chains", Box::new(criterion_2)),
        ("determinant equals Blaschke product", Box::new(criterion_3)),
        ("parametric YBE and reversibility", Box::new(criterion_4)),
        ("reflection equation and involution", Box::new(criterion_5)),
        ("mirror norming solver", Box::new(|| criterion_6(&halfline))),
        ("mirror polarization relations", Box::new(|| criterion_7(&halfline))),
        ("PDE and boundary certification", Box::new(criterion_8)),
        ("factorization end to end", Box::new(criterion_9)),
        ("transfer maps", Box::new(criterion_10)),
        ("determinism", Box::new(criterion_11)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        println!("criterion {:>2} {:<38} {}  {}", i + 1, name, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed.push(i + 1);
        }
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
