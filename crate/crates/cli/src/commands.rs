use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use cfcomm_core::analytics::{half_mirror_merit, optimize_half_mirror};
use cfcomm_core::engine::{audit_counterfactuality, compile, run_exact, run_monte_carlo_with_workers, Logic};
use cfcomm_core::noise::{
    calibrate, counterfactual_violation, mean_visibility, simulate_lock, CalibrationTargets, LockController, LockDemo,
    SourceModel,
};
use cfcomm_core::protocol::{decode_pbm, encode_pbm, transmit_image, Link, PbmFormat};
use cfcomm_core::scenario::{builtin_scenario, parse_scenario_bytes};
use cfcomm_core::Scenario;
use serde::Serialize;

use crate::args::*;
use crate::error::{CliError, Result};
use crate::report::*;

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Transmit(a) => transmit(a),
        Command::Audit(a) => audit(a),
        Command::OptimizeMirror(a) => optimize_mirror(a),
        Command::LockDemo(a) => lock_demo(a),
        Command::Calibrate(a) => calibrate_cmd(a),
    }
}

fn load_scenario(arg: &ScenarioArg) -> Result<Scenario> {
    if let Some(name) = arg.scenario.strip_prefix("builtin:") {
        return builtin_scenario(name).ok_or_else(|| CliError::UnknownBuiltin(name.to_owned()));
    }
    let bytes = read(Path::new(&arg.scenario))?;
    parse_scenario_bytes(&bytes).map_err(|e| CliError::Scenario {
        path: arg.scenario.clone(),
        source: e.into(),
    })
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.to_owned(),
            source,
        }),
        None => std::io::stdout().write_all(bytes).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, text.as_bytes())
}

fn logic(arg: LogicArg) -> Logic {
    match arg {
        LogicArg::Zero => Logic::Zero,
        LogicArg::One => Logic::One,
    }
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let started = Instant::now();
    let s = load_scenario(&a.scenario)?;
    let seed = a.seed.unwrap_or(s.seed);
    let program = compile(&s, logic(a.logic))?;
    let exact = if a.exact || a.trials == 0 {
        Some(ExactReport::from(&run_exact(&program)?))
    } else {
        None
    };
    let monte_carlo = if a.trials > 0 {
        let workers = a
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        let counts = run_monte_carlo_with_workers(&program, &s.noise.source, &s.noise, a.trials, seed, workers)?;
        Some(MonteCarloReport {
            d0_given_conclusive: counts.d0_given_conclusive(),
            counts,
        })
    } else {
        None
    };
    let report = SimulateReport {
        schema: "cfcomm.simulate.v1",
        scenario: ScenarioInfo::of(&s),
        logic: program.logic.bit(),
        seed,
        exact,
        monte_carlo,
        noise: s.noise,
        wall_time_s: a.wall_time.then(|| started.elapsed().as_secs_f64()),
    };
    write_json(a.out.as_deref(), &report)
}

fn transmit(a: TransmitArgs) -> Result<()> {
    let s = load_scenario(&a.scenario)?;
    let seed = a.seed.unwrap_or(s.seed);
    let img = decode_pbm(&read(&a.image)?).map_err(|e| CliError::Scenario {
        path: a.image.display().to_string(),
        source: e,
    })?;
    let link = Link::new(&s, &s.noise)?
        .with_majority(a.majority)?
        .with_attempt_cap(a.attempt_cap)?;
    let (out, stats) = transmit_image(&link, &img, seed)?;
    let format = match a.format {
        PbmArg::P1 => PbmFormat::Plain,
        PbmArg::P4 => PbmFormat::Raw,
    };
    write(Some(&a.out), &encode_pbm(&out, format))?;
    let report = TransmitReport {
        schema: "cfcomm.transmit.v1",
        scenario: ScenarioInfo::of(&s),
        seed,
        width: img.width(),
        height: img.height(),
        majority: a.majority,
        attempt_cap: a.attempt_cap,
        stats,
    };
    if let Some(p) = &a.stats {
        write_json(Some(p), &report)?;
    }
    if let Some(p) = &a.stats_csv {
        let fmt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let csv = format!(
            "bits,bits_logic0,bits_logic1,errors_logic0,errors_logic1,rate_logic0,rate_logic1,mean_attempts,total_trials,pixel_errors\n{},{},{},{},{},{},{},{},{},{}\n",
            stats.bits,
            stats.bits_logic0,
            stats.bits_logic1,
            stats.errors_logic0,
            stats.errors_logic1,
            fmt(stats.rate_logic0),
            fmt(stats.rate_logic1),
            stats.mean_attempts,
            stats.total_trials,
            stats.pixel_errors
        );
        write(Some(p), csv.as_bytes())?;
    }
    if a.stats.is_none() && a.stats_csv.is_none() {
        write_json(None, &report)?;
    }
    Ok(())
}

fn audit(a: AuditArgs) -> Result<()> {
    let s = load_scenario(&a.scenario)?;
    let l = logic(a.logic);
    let report = audit_counterfactuality(&s, l)?;
    let (source, name, mu) = match a.source {
        SourceArg::Heralded => (SourceModel::heralded(), "heralded", None),
        SourceArg::Coherent => (SourceModel::coherent(a.mu), "coherent", Some(a.mu)),
    };
    let out = AuditOutput {
        schema: "cfcomm.audit.v1",
        scenario: ScenarioInfo::of(&s),
        source: name,
        mean_photon_number: mu,
        joint_violation: counterfactual_violation(&s, l, &source)?,
        audit: report,
    };
    write_json(a.out.as_deref(), &out)
}

fn optimize_mirror(a: OptimizeArgs) -> Result<()> {
    let optimum = optimize_half_mirror(a.m)?;
    if a.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let sweep = (0..=a.steps)
        .map(|i| {
            let r = f64::from(i) / f64::from(a.steps);
            Ok(SweepPoint {
                r,
                merit: half_mirror_merit(r, a.m)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = OptimizeReport {
        schema: "cfcomm.optimize_mirror.v1",
        m: a.m,
        optimum,
        closed_form: f64::from(a.m - 2) / f64::from(a.m),
        merit_at_optimum: half_mirror_merit(optimum, a.m)?,
        sweep,
    };
    write_json(a.out.as_deref(), &report)
}

fn lock_demo(a: LockArgs) -> Result<()> {
    let demo = LockDemo {
        duration_steps: a.duration,
        sigma: a.sigma,
        ceiling: a.ceiling,
        controller: LockController::new(a.gain, 0.0, a.actuator_range, 1)?,
        ..LockDemo::default()
    };
    let locked = !a.unlocked;
    let samples = simulate_lock(&demo, locked, a.seed)?;
    let mut csv = String::from("step,time_s,phase_error,visibility\n");
    for s in &samples {
        csv.push_str(&format!(
            "{},{},{:.9},{:.9}\n",
            s.step,
            s.step as f64 * demo.step_seconds,
            s.phase_error,
            s.visibility
        ));
    }
    write(a.out.as_deref(), csv.as_bytes())?;
    eprintln!(
        "{} mean visibility {:.6} over {} steps",
        if locked { "locked" } else { "unlocked" },
        mean_visibility(&samples),
        samples.len()
    );
    Ok(())
}

fn calibrate_cmd(a: CalibrateArgs) -> Result<()> {
    let s = load_scenario(&a.scenario)?;
    let targets = CalibrationTargets {
        logic0: a.target0,
        logic1: a.target1,
        tolerance: a.tolerance,
        ..CalibrationTargets::default()
    };
    let out = CalibrateOutput {
        schema: "cfcomm.calibrate.v1",
        scenario: ScenarioInfo::of(&s),
        calibration: calibrate(&s, &targets)?,
    };
    write_json(a.out.as_deref(), &out)
}
