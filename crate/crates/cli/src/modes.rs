//! One function per run mode. Each returns its checks, a JSON results block
//! and, for `simulate`, the sampled grid.

use serde_json::{json, Value};
use vnls_core::asymptotics::CollisionContext;
use vnls_core::data::{polarization_of, projective_distance, Polarization};
use vnls_core::linalg::{unitarity_defect, CVector};
use vnls_core::maps::{
    boundary_small_m, first_move, involution_residual, transfer_commutator_residual, BoundaryReflection, ExtendedPoint,
    IdentityReflection, TransferMaps, VnlsYangBaxter,
};
use vnls_core::mirror::{
    halfline_field, mirror_constraint_residual, mirror_polarization_residual, reflection_consistency_residual,
    solve_mirror_norming, HalfLineData,
};
use vnls_core::verification::{
    extract_asymptotic_polarization, extracted_reflection_residual, pde_residual, separation_time, FieldGrid,
};
use vnls_core::{BoundarySpec, SolitonData};

use crate::config::{RunConfig, Tolerances};
use crate::error::{CliError, Context};
use crate::export::dataset_digest;
use crate::report::Check;
use crate::suites::{params, run_property_suite};

/// Separation used when reading asymptotic solitons off the field; above the
/// extraction threshold of 18.
const EXTRACTION_MARGIN: f64 = 20.0;

pub struct ModeOutput {
    pub checks: Vec<Check>,
    pub results: Value,
    pub grid: Option<FieldGrid>,
}

fn pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn pol(p: &Polarization) -> Vec<[f64; 2]> {
    pairs(p.as_vector())
}

fn invalid(path: &str, message: &str) -> CliError {
    CliError::Config { path: path.into(), message: message.into() }
}

fn required_boundary(config: &RunConfig) -> Result<BoundarySpec, CliError> {
    config.boundary_spec()?.ok_or_else(|| invalid("boundary", "required for this mode"))
}

fn solve(config: &RunConfig) -> Result<HalfLineData, CliError> {
    let data = config.soliton_data()?;
    let spec = required_boundary(config)?;
    spec.check_dim(data.n()).context("boundary")?;
    solve_mirror_norming(&data, &spec).context("mirror solve")
}

fn soliton_json(data: &SolitonData) -> Vec<Value> {
    data.solitons()
        .iter()
        .map(|s| json!({ "u": s.point.u(), "v": s.point.v(), "beta": pairs(s.beta.as_vector()) }))
        .collect()
}

pub fn simulate(config: &RunConfig) -> Result<ModeOutput, CliError> {
    let data = config.soliton_data()?;
    let spec = config.grid_spec()?;
    let grid = match config.boundary_spec()? {
        Some(_) => {
            if spec.x0 < 0.0 {
                return Err(invalid("grid.x0", "half-line grids need x0 >= 0"));
            }
            let hl = solve(config)?;
            FieldGrid::sample(spec, data.n(), |x, t| halfline_field(&hl, x, t)).context("half-line field")?
        }
        None => FieldGrid::from_data(spec, &data).context("field")?,
    }
    .with_provenance(dataset_digest(config));
    let max_amplitude = grid.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let results = json!({
        "points": spec.nx * spec.nt,
        "max_amplitude": max_amplitude,
        "pde_residual": pde_residual(&grid),
        "dataset_digest": grid.provenance(),
    });
    Ok(ModeOutput { checks: Vec::new(), results, grid: Some(grid) })
}

pub fn collide(config: &RunConfig, tol: &Tolerances) -> Result<ModeOutput, CliError> {
    if config.boundary.is_some() {
        return Err(invalid("boundary", "collide runs on the full line; use reflect for boundaries"));
    }
    let data = config.soliton_data()?;
    let (ctx, order) = CollisionContext::sorted(&data).context("collision ordering")?;
    let sorted = ctx.data();
    let mut checks = Vec::new();
    for j in 0..ctx.len().saturating_sub(1) {
        let rest: Vec<usize> = (0..ctx.len()).filter(|&s| s != j && s != j + 1).collect();
        let r = ctx.collision_consistency_residual(j, j + 1, &rest).context("collision")?;
        checks.push(Check::against(format!("collision[{},{}]", order[j], order[j + 1]), r, tol.get("algebraic")));
    }
    let first = ctx.factorization_residual(&mut first_move).context("factorization")?;
    let last = ctx.factorization_residual(&mut |m: usize| m - 1).context("factorization")?;
    checks.push(Check::against("factorization[first]", first, tol.get("algebraic")));
    checks.push(Check::against("factorization[last]", last, tol.get("algebraic")));

    let t = separation_time(sorted, EXTRACTION_MARGIN);
    let mut solitons = Vec::with_capacity(ctx.len());
    for (j, &index) in order.iter().enumerate() {
        let point = sorted.soliton(j).point;
        let mut entry = json!({
            "index": index,
            "k": [point.k().re, point.k().im],
            "velocity": point.velocity(),
        });
        for (label, beta, sign) in
            [("in", ctx.beta_in(j).context("beta_in")?, -1.0), ("out", ctx.beta_out(j).context("beta_out")?, 1.0)]
        {
            let p = polarization_of(&beta);
            let shift = beta.position_shift(point.v());
            entry[label] = json!({ "polarization": pol(&p), "shift": shift });
            if let Some(t) = t {
                let peak = extract_asymptotic_polarization(sorted, j, sign * t).context("extraction")?;
                let d = projective_distance(&peak.polarization, &p);
                checks.push(Check::against(format!("asymptotic-{label}[{}]", index), d, tol.get("asymptotic")));
                let s = (peak.shift - shift).abs();
                checks.push(Check::against(format!("shift-{label}[{index}]"), s, tol.get("shift")));
            }
        }
        solitons.push(entry);
    }
    let results = json!({ "order": order, "extraction_time": t, "solitons": solitons });
    Ok(ModeOutput { checks, results, grid: None })
}

fn mirror_checks(hl: &HalfLineData, tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    Ok(vec![
        Check::against(
            "mirror-constraint",
            mirror_constraint_residual(hl).context("mirror constraint")?,
            tol.get("mirror"),
        ),
        Check::against(
            "mirror-polarization",
            mirror_polarization_residual(hl).context("mirror polarization")?,
            tol.get("algebraic"),
        ),
    ])
}

pub fn reflect(config: &RunConfig, tol: &Tolerances) -> Result<ModeOutput, CliError> {
    let hl = solve(config)?;
    let mut checks = mirror_checks(&hl, tol)?;
    let first = reflection_consistency_residual(&hl, &mut first_move).context("reflection")?;
    let last = reflection_consistency_residual(&hl, &mut |m: usize| m - 1).context("reflection")?;
    checks.push(Check::against("reflection-consistency[first]", first, tol.get("reflection")));
    checks.push(Check::against("reflection-consistency[last]", last, tol.get("reflection")));
    let (ctx, position) = hl.sorted_context().context("ordering")?;
    let mut solitons = Vec::with_capacity(hl.len());
    for j in 0..hl.len() {
        let k = hl.real().k(j);
        let incoming = polarization_of(&ctx.beta_in(position[j]).context("beta_in")?);
        let reflected = polarization_of(&ctx.beta_out(position[j + hl.len()]).context("beta_out")?);
        let inv = involution_residual(k, &incoming, hl.spec()).context("involution")?;
        checks.push(Check::against(format!("involution[{j}]"), inv, tol.get("involution")));
        let m = boundary_small_m(k, hl.spec(), hl.combined().n()).context("boundary matrix")?;
        checks.push(Check::against(format!("boundary-unitarity[{j}]"), unitarity_defect(&m), tol.get("unitarity")));
        solitons.push(json!({ "index": j, "incoming": pol(&incoming), "reflected": pol(&reflected) }));
    }
    let t = separation_time(hl.combined(), EXTRACTION_MARGIN);
    if let Some(t) = t {
        let r = extracted_reflection_residual(&hl, t, &mut first_move).context("extraction")?;
        checks.push(Check::against("reflection-extracted", r, tol.get("reflection")));
    }
    let results = json!({
        "extraction_time": t,
        "solitons": solitons,
        "mirror": soliton_json(hl.mirror()),
    });
    Ok(ModeOutput { checks, results, grid: None })
}

pub fn mirror(config: &RunConfig, tol: &Tolerances) -> Result<ModeOutput, CliError> {
    let hl = solve(config)?;
    let checks = mirror_checks(&hl, tol)?;
    let results = json!({
        "halfline": {
            "n": hl.combined().n(),
            "solitons": soliton_json(hl.combined()),
            "boundary": config.boundary,
        },
    });
    Ok(ModeOutput { checks, results, grid: None })
}

pub fn transfer(config: &RunConfig, tol: &Tolerances) -> Result<ModeOutput, CliError> {
    let data = config.soliton_data()?;
    if data.len() < 2 {
        return Err(invalid("solitons", "transfer maps need at least two solitons"));
    }
    let state = data
        .solitons()
        .iter()
        .map(|s| ExtendedPoint::new(polarization_of(&s.beta), s.k()))
        .collect::<vnls_core::Result<Vec<_>>>()
        .context("state")?;
    let identity = TransferMaps { r: &VnlsYangBaxter, b_plus: &IdentityReflection, b_minus: &IdentityReflection };
    let boundary = match config.boundary_spec()? {
        Some(spec) => {
            spec.check_dim(data.n()).context("boundary")?;
            Some(BoundaryReflection::new(spec))
        }
        None => None,
    };
    let mut checks = Vec::new();
    for j in 0..state.len() {
        for l in j + 1..state.len() {
            let r = transfer_commutator_residual(j, l, identity, &state).context("transfer")?;
            checks.push(Check::against(format!("transfer[{j},{l}]"), r, tol.get("transfer")));
            if let Some(b) = &boundary {
                let maps = TransferMaps { r: &VnlsYangBaxter, b_plus: b, b_minus: b };
                let r = transfer_commutator_residual(j, l, maps, &state).context("transfer with boundary")?;
                checks.push(Check::recorded(format!("transfer-boundary[{j},{l}]"), r));
            }
        }
    }
    Ok(ModeOutput { checks, results: json!({ "slots": state.len() }), grid: None })
}

pub fn verify(config: &RunConfig, tol: &Tolerances) -> Result<ModeOutput, CliError> {
    let suite = config.suite()?;
    let seed = suite.seed.unwrap_or(0);
    let p = params(suite, seed)?;
    let checks = run_property_suite(&suite.name, suite.samples, &p, tol)?;
    let results = json!({
        "suite": suite.name,
        "samples": suite.samples,
        "seed": suite.seed,
        "n": p.n,
        "count": p.count,
    });
    Ok(ModeOutput { checks, results, grid: None })
}
