use serde_json::{json, Value};

use crate::algebra::{build_operators, identity_report, OperatorSet};
use crate::cli::config::{Action, CsvExport, Scenario, UnitsPreset};
use crate::cli::report::{ActionOutcome, RunReport, SCHEMA_VERSION};
use crate::error::Result;
use crate::fields::io::{write_slice_csv, Domain, Slice};
use crate::fields::kernels::{convergence_study, kernel_pair_check, Accelerator};
use crate::fields::{
    darwin_consistency, maxwell_evolve, state_to_grid, to_position, wavefunction_to_classical, GridSpec,
};
use crate::lorentz::{boost_mode, covariance_check, longitudinal_probe, Boost};
use crate::modes::{constraint_residual, ModeState};
use crate::observables::{
    observable_report, orbital_am_expectation, probability_density_variants, spin_density_variants, DensityVariants,
    SpinMethod,
};
use crate::units::Units;

/// Tolerances asserted by the actions.
const MODE_TOL: f64 = 1e-12;
const GRID_TOL: f64 = 1e-8;
const COVARIANCE_TOL: f64 = 1e-10;
const KERNEL_TOL: f64 = 1e-3;
const CONSISTENCY_TOL: f64 = 1e-10;

struct Context {
    ops: OperatorSet,
    units: Units,
    grid: Option<GridSpec>,
    state: Option<ModeState>,
}

/// Outcome of one action before it is labelled.
struct Checked {
    result: Value,
    failures: Vec<String>,
}

impl Checked {
    fn new(result: Value) -> Self {
        Checked {
            result,
            failures: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types always serialize")
}

/// Run every action in order. Errors inside an action mark it failed and the
/// run continues.
pub fn execute(scenario: &Scenario) -> RunReport {
    let mut ctx = Context {
        ops: build_operators(),
        units: scenario.units,
        grid: scenario.grid,
        state: scenario.state.clone(),
    };
    let mut outcomes = Vec::new();
    for action in scenario.actions() {
        let (passed, failures, result) = match run_action(&mut ctx, action) {
            Ok(c) => (c.failures.is_empty(), c.failures, c.result),
            Err(e) => (false, vec![e.to_string()], Value::Null),
        };
        outcomes.push(ActionOutcome {
            name: action.name().to_string(),
            kind: action.kind().to_string(),
            passed,
            failures,
            result,
        });
    }
    RunReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: scenario.name().to_string(),
        units: match scenario.file.units {
            UnitsPreset::Si => "si",
            UnitsPreset::Natural => "natural",
        }
        .to_string(),
        seed: scenario.file.seed,
        passed: outcomes.iter().all(|o| o.passed),
        actions: outcomes,
    }
}

fn state(ctx: &Context) -> &ModeState {
    ctx.state.as_ref().expect("validated: state present")
}

fn grid(ctx: &Context) -> GridSpec {
    ctx.grid.expect("validated: grid present")
}

fn run_action(ctx: &mut Context, action: &Action) -> Result<Checked> {
    match action {
        Action::IdentitySuite { .. } => {
            let rep = identity_report(&ctx.ops);
            let mut c = Checked::new(json!({ "checks": to_value(&rep) }));
            if let Some(f) = rep.first_failure() {
                let name = f.name.clone();
                c.require(false, || format!("identity `{name}` failed"));
            }
            Ok(c)
        }
        Action::Evolve { dt, steps, .. } => evolve(ctx, *dt, *steps),
        Action::Observables { orbital, .. } => {
            let st = state(ctx);
            let mut rep = observable_report(st, &ctx.ops, &ctx.units)?;
            let mut orbital_detail = Value::Null;
            if *orbital {
                let field = state_to_grid(st, &grid(ctx))?;
                let o = orbital_am_expectation(&field)?;
                rep.orbital = Some(o.value);
                orbital_detail = to_value(&o);
            }
            let scale = rep.total_probability.max(f64::MIN_POSITIVE);
            let d = rep.pairwise_discrepancies;
            let worst = d
                .omega_reduced
                .max(d.omega_cross)
                .max(d.reduced_cross)
                .max(d.cross_upper_lower)
                / scale;
            let mut c = Checked::new(json!({
                "report": to_value(&rep),
                "orbital_detail": orbital_detail,
                "max_relative_discrepancy": worst,
            }));
            c.require(worst <= MODE_TOL, || {
                format!("spin formulas disagree by {worst:e} relative")
            });
            Ok(c)
        }
        Action::SpinDensityVariants {
            min_spread_fraction,
            csv,
            ..
        } => density(ctx, true, *min_spread_fraction, csv.as_ref()),
        Action::ProbabilityDensityVariants {
            min_spread_fraction,
            csv,
            ..
        } => density(ctx, false, *min_spread_fraction, csv.as_ref()),
        Action::CovarianceCheck { betas, .. } => covariance(ctx, betas),
        Action::KernelCheck { kernel, k_samples, .. } => {
            let samples = kernel_pair_check(*kernel, k_samples)?;
            let study = convergence_study(*kernel, k_samples[0], &[8, 16, 32, 64], Accelerator::Average);
            let mut c = Checked::new(json!({ "samples": to_value(&samples), "convergence": to_value(&study) }));
            for s in &samples {
                c.require(s.relative_error <= KERNEL_TOL, || {
                    format!("kernel at k = {} off by {:e}", s.k, s.relative_error)
                });
            }
            c.require(study.observed_order >= 1.0, || {
                format!("observed convergence order {} below 1", study.observed_order)
            });
            Ok(c)
        }
        Action::MaxwellConsistency { dt, energy_steps, .. } => {
            let field = state_to_grid(state(ctx), &grid(ctx))?;
            let real = wavefunction_to_classical(&field, &ctx.units).to_real();
            let residual = darwin_consistency(&real, *dt, &ctx.units)?;
            let e0 = real.energy(&ctx.units);
            let mut f = real;
            let mut drift: f64 = 0.0;
            for _ in 0..*energy_steps {
                f = maxwell_evolve(&f, *dt, &ctx.units)?;
                drift = drift.max(((f.energy(&ctx.units) - e0) / e0).abs());
            }
            let mut c = Checked::new(json!({
                "dt": dt,
                "darwin_residual": residual,
                "energy_steps": energy_steps,
                "energy_drift": drift,
            }));
            c.require(residual <= CONSISTENCY_TOL, || format!("paths differ by {residual:e}"));
            c.require(drift <= MODE_TOL, || format!("field energy drifted by {drift:e}"));
            Ok(c)
        }
    }
}

fn evolve(ctx: &mut Context, dt: f64, steps: usize) -> Result<Checked> {
    let units = ctx.units;
    let mut st = state(ctx).clone();
    let r0 = observable_report(&st, &ctx.ops, &units)?;
    let scale = r0.total_probability.max(f64::MIN_POSITIVE);
    let (mut dp, mut de, mut ds): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..steps {
        st = st.evolve(dt, &units);
        let p = crate::observables::total_probability(&st);
        let e = crate::observables::energy(&st, &units);
        let s = crate::observables::spin_expectation(&st, SpinMethod::Omega, &ctx.ops)?;
        dp = dp.max((p - r0.total_probability).abs() / scale);
        if r0.energy > 0.0 {
            de = de.max((e - r0.energy).abs() / r0.energy);
        }
        for i in 0..3 {
            ds = ds.max((s[i] - r0.spin_omega[i]).abs() / scale);
        }
    }
    let final_report = observable_report(&st, &ctx.ops, &units)?;
    let mut c = Checked::new(json!({
        "dt": dt,
        "steps": steps,
        "final_time": st.time,
        "probability_drift": dp,
        "energy_drift": de,
        "spin_drift": ds,
        "final": to_value(&final_report),
    }));
    c.require(dp <= MODE_TOL, || format!("probability drifted by {dp:e}"));
    c.require(de <= MODE_TOL, || format!("energy drifted by {de:e}"));
    c.require(ds <= MODE_TOL, || format!("spin drifted by {ds:e}"));
    ctx.state = Some(st);
    Ok(c)
}

fn density(ctx: &Context, spin: bool, min_spread: Option<f64>, csv: Option<&CsvExport>) -> Result<Checked> {
    let g = grid(ctx);
    let x = to_position(&state_to_grid(state(ctx), &g)?);
    let d: DensityVariants = if spin {
        spin_density_variants(&x, &ctx.ops)?
    } else {
        probability_density_variants(&x, &ctx.ops)?
    };
    let fraction = if d.peak > 0.0 {
        d.max_pointwise_spread / d.peak
    } else {
        0.0
    };
    let mut c = Checked::new(json!({
        "variants": to_value(&d),
        "spread_fraction": fraction,
    }));
    c.require(d.integral_discrepancy <= GRID_TOL, || {
        format!("variant integrals differ by {:e}", d.integral_discrepancy)
    });
    if let Some(min) = min_spread {
        c.require(fraction > min, || {
            format!("pointwise spread {fraction} of peak is not above {min}")
        });
    }
    if let Some(export) = csv {
        let slice = Slice::Plane {
            normal: export.normal,
            index: export.index.unwrap_or(g.n() / 2),
        };
        let cols = d.columns();
        let refs: Vec<(&str, &[f64])> = cols.iter().map(|(n, v)| (n.as_str(), v.as_slice())).collect();
        let file = std::fs::File::create(&export.path)?;
        write_slice_csv(std::io::BufWriter::new(file), &g, Domain::Position, &slice, &refs)?;
    }
    Ok(c)
}

fn covariance(ctx: &Context, betas: &[f64]) -> Result<Checked> {
    let st = state(ctx);
    let probe_grid = match ctx.grid {
        Some(g) => g,
        None => GridSpec::new(16, 1.0)?,
    };
    let probe = longitudinal_probe(probe_grid);
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for &beta in betas {
        let b = Boost::new(beta)?;
        let r = covariance_check(&ctx.ops, st, &probe, &b, &ctx.units)?;
        let mut boosted_rc: f64 = 0.0;
        for m in &st.modes {
            let bm = boost_mode(&ctx.ops, m, &b, &ctx.units)?;
            boosted_rc = boosted_rc.max(constraint_residual(&ModeState::new(vec![bm])).max());
        }
        if r.darwin_residual > COVARIANCE_TOL {
            failures.push(format!("β = {beta}: Darwin residual {:e}", r.darwin_residual));
        }
        if r.divergence_residual > COVARIANCE_TOL || (r.rc_scaling_observed - r.gamma).abs() > COVARIANCE_TOL * r.gamma
        {
            failures.push(format!(
                "β = {beta}: divergence scaling {} against γ = {}",
                r.rc_scaling_observed, r.gamma
            ));
        }
        if boosted_rc > MODE_TOL {
            failures.push(format!("β = {beta}: boosted mode constraint residual {boosted_rc:e}"));
        }
        reports.push(json!({ "report": to_value(&r), "boosted_mode_rc_residual": boosted_rc }));
    }
    Ok(Checked {
        result: json!({ "boosts": reports }),
        failures,
    })
}
