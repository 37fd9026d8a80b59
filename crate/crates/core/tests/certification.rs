//! Grid-based checks: the reconstructed fields solve the PDE, satisfy their
//! boundary conditions, and split into the predicted asymptotic solitons.

use vnls_core::asymptotics::{CollisionContext, Direction};
use vnls_core::data::{polarization_of, projective_distance, BoundarySpec, SolitonData};
use vnls_core::dressing::reconstruct_field;
use vnls_core::linalg::{max_abs_vec, vector_from_pairs};
use vnls_core::maps::first_move;
use vnls_core::mirror::{halfline_field, solve_mirror_norming};
use vnls_core::sampling::{random_soliton_data, random_unitary, sample_rng, Ranges};
use vnls_core::verification::{
    boundary_residual, convergence_order, extract_asymptotic_polarization, extracted_reflection_residual, pde_residual,
    FieldGrid, GridSpec,
};

const SPACINGS: [f64; 3] = [0.04, 0.02, 0.01];

fn two_solitons() -> SolitonData {
    SolitonData::from_raw(
        2,
        &[
            (-0.6, 1.0, vector_from_pairs(&[[1.0, 0.2], [0.4, -0.3]])),
            (0.5, 1.3, vector_from_pairs(&[[0.1, -0.5], [1.0, 0.3]])),
        ],
    )
    .unwrap()
}

fn real_pair() -> SolitonData {
    SolitonData::from_raw(
        2,
        &[
            (0.5, 1.0, vector_from_pairs(&[[1.0, 0.2], [0.4, -0.3]])),
            (1.1, 1.3, vector_from_pairs(&[[0.1, -0.5], [1.0, 0.3]])),
        ],
    )
    .unwrap()
}

#[test]
fn line_pde_residual_converges_at_second_order() {
    let data = two_solitons();
    let est = convergence_order(
        |h| {
            let g = GridSpec::with_spacing(-3.0, 3.0, -0.4, 0.4, h)?;
            Ok(pde_residual(&FieldGrid::from_data(g, &data)?))
        },
        &SPACINGS,
    )
    .unwrap();
    assert!(est.monotone);
    assert!((est.order - 2.0).abs() <= 0.3, "{est:?}");
}

#[test]
fn halfline_pde_and_boundary_residuals_converge() {
    let mut rng = sample_rng(11, 0);
    let specs = [
        BoundarySpec::robin(0.7).unwrap(),
        BoundarySpec::mixed(vec![1, -1]).unwrap(),
        BoundarySpec::rotated_mixed(random_unitary(&mut rng, 2), vec![-1, 1]).unwrap(),
    ];
    for spec in specs {
        let hl = solve_mirror_norming(&real_pair(), &spec).unwrap();
        let pde = convergence_order(
            |h| {
                let g = GridSpec::with_spacing(0.0, 4.0, -0.4, 0.4, h)?;
                Ok(pde_residual(&FieldGrid::sample(g, 2, |x, t| halfline_field(&hl, x, t))?))
            },
            &SPACINGS,
        )
        .unwrap();
        assert!((pde.order - 2.0).abs() <= 0.3, "{spec:?}: {pde:?}");
        let times = [-1.5, -0.5, 0.0, 0.4, 1.2];
        let bc = convergence_order(|h| boundary_residual(&hl, &times, h), &SPACINGS).unwrap();
        assert!(bc.monotone);
        if spec.is_scalar() {
            assert!((bc.order - 2.0).abs() <= 0.3, "{spec:?}: {bc:?}");
        } else {
            // Neumann components are even in x, so R_xxx(0) = 0 and the
            // one-sided stencil gains an order
            assert!((bc.order - 3.0).abs() <= 0.3, "{spec:?}: {bc:?}");
        }
    }
}

#[test]
fn asymptotic_profiles_match_the_field() {
    let (ctx, _) = CollisionContext::sorted(&two_solitons()).unwrap();
    let data = ctx.data();
    let t = 30.0;
    for j in 0..2 {
        let w = data.soliton(j).point.velocity();
        for s in [-1.0, 1.0] {
            let direction = if s < 0.0 { Direction::In } else { Direction::Out };
            for dx in [-1.0, 0.0, 0.5] {
                let (x, tt) = (w * s * t + dx, s * t);
                let field = reconstruct_field(data, x, tt).unwrap();
                let profile = ctx.asymptotic_profile(x, tt, direction).unwrap();
                assert!(max_abs_vec(&(field - profile)) < 1e-8);
            }
        }
    }
}

#[test]
fn extracted_polarizations_and_shifts_match_predictions() {
    for (seed, count) in [(1, 2), (2, 3)] {
        let mut rng = sample_rng(seed, 0);
        let data = random_soliton_data(&mut rng, 2, count, &Ranges::default(), 0.3).unwrap().value;
        let ctx = CollisionContext::new(data.clone()).unwrap();
        for j in 0..count {
            let v = data.soliton(j).point.v();
            let w = data.soliton(j).point.velocity();
            let rate = (0..count)
                .filter(|l| *l != j)
                .map(|l| v.min(data.soliton(l).point.v()) * (data.soliton(l).point.velocity() - w).abs())
                .fold(f64::INFINITY, f64::min);
            let t = 20.0 / rate;
            for (tt, beta) in [(-t, ctx.beta_in(j).unwrap()), (t, ctx.beta_out(j).unwrap())] {
                let peak = extract_asymptotic_polarization(&data, j, tt).unwrap();
                let d = projective_distance(&peak.polarization, &polarization_of(&beta));
                assert!(d < 1e-4, "seed {seed}, soliton {j}, t = {tt}: {d}");
                assert!(
                    (peak.shift - beta.position_shift(v)).abs() < 1e-3,
                    "{} vs {}",
                    peak.shift,
                    beta.position_shift(v)
                );
            }
        }
    }
}

#[test]
fn reflected_polarizations_read_from_the_field() {
    let spec = BoundarySpec::mixed(vec![1, -1]).unwrap();
    let hl = solve_mirror_norming(&real_pair(), &spec).unwrap();
    let r = extracted_reflection_residual(&hl, 60.0, &mut first_move).unwrap();
    assert!(r < 1e-6, "{r}");
}
