//! Subcommand implementations. Each one resolves its input layers,
//! runs the corresponding library entry point, and writes a stable
//! key=value report (or CSV) to the given writer. Warnings and notes
//! go to stderr so piped stdout stays machine-readable.

use crate::args::{
    AnalyzeArgs, CompareArgs, OptimizeArgs, PresetArg, ScenarioFlags, SchemeArg, SchemeOnlyArg,
    SimFlags, SimulateArgs, SweepArgs, VariableArg,
};
use crate::config::{parse_config_file, resolve, Overrides, Resolved};
use crate::csv;
use crate::error::CliError;
use crate::fmt::fmt_g12;
use crate::manifest::{
    AnalyzeSection, CompareSection, OptimizeSection, RunManifest, ScenarioSpec, SimSpec,
    SimulateSection, SweepSection,
};
use aoi_core::{
    alpha_threshold_with, avg_aoi_distributed_with, avg_aoi_joint_with, derive_seed,
    locate_crossover_with, optimize_blocklength_with, run_sweep, simulate_distributed,
    simulate_joint, AnalyticResult, Error as CoreError, EvalOptions, OptimizeObjective,
    PacketShape, Scenario, Scheme, SchemeSelection, SimSettings, SweepRow, SweepSpec,
    SweptVariable, MAX_OPTIMIZE_BLOCKLENGTH, SHORT_BLOCK_LIMIT,
};
use std::io::Write;
use std::path::Path;

fn io_out(e: std::io::Error) -> CliError {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        return CliError::Pipe;
    }
    CliError::Runtime(format!("writing output: {e}"))
}

struct LoadedRun {
    resolved: Resolved,
    manifest: Option<RunManifest>,
}

/// Merge flags, an optional replay manifest, and an optional config
/// file (strongest first) into a validated scenario and settings.
fn load_run(
    command: &str,
    flags: &ScenarioFlags,
    sim_flags: Option<&SimFlags>,
    flag_forced: Option<f64>,
    manifest_forced: impl Fn(&RunManifest) -> Option<f64>,
) -> Result<LoadedRun, CliError> {
    let manifest = flags
        .from_manifest
        .as_deref()
        .map(RunManifest::load)
        .transpose()?;
    if let Some(m) = &manifest {
        m.expect_command(command)?;
    }
    let flag_layer = overrides_from_flags(flags, sim_flags);
    let manifest_layer = manifest.as_ref().map(|m| m.as_overrides());
    let config_layer = flags
        .config
        .as_deref()
        .map(parse_config_file)
        .transpose()?;
    let mut layers: Vec<&Overrides> = vec![&flag_layer];
    if let Some(l) = &manifest_layer {
        layers.push(l);
    }
    if let Some(l) = &config_layer {
        layers.push(l);
    }
    let forced = flag_forced.or_else(|| manifest.as_ref().and_then(&manifest_forced));
    let resolved = resolve(&layers, forced)?;
    Ok(LoadedRun { resolved, manifest })
}

fn overrides_from_flags(flags: &ScenarioFlags, sim: Option<&SimFlags>) -> Overrides {
    Overrides {
        sensors: flags.sensors,
        bits_per_sensor: flags.bits_per_sensor,
        alpha: flags.alpha,
        rate: flags.rate,
        snr: flags.snr,
        snr_db: flags.snr_db,
        slot_duration: flags.slot_duration,
        frames: sim.and_then(|s| s.frames),
        warmup: sim.and_then(|s| s.warmup),
        replications: sim.and_then(|s| s.replications),
        seed: sim.and_then(|s| s.seed),
    }
}

fn scenario_spec(sc: &Scenario) -> ScenarioSpec {
    ScenarioSpec {
        sensors: sc.num_sensors(),
        bits_per_sensor: sc.per_sensor_bits(),
        alpha: sc.redundancy_bits(),
        rate: sc.coding_rate(),
        snr: sc.channel().snr_linear(),
        slot_duration: sc.channel().slot_duration(),
    }
}

fn sim_spec(s: &SimSettings) -> SimSpec {
    SimSpec {
        frames: s.frames,
        warmup: s.warmup_frames,
        replications: s.replications,
        seed: s.seed,
        forced_error_rate: s.forced_error_rate,
    }
}

fn eval_options(forced: Option<f64>) -> EvalOptions {
    EvalOptions {
        error_rate_override: forced,
        ..EvalOptions::default()
    }
}

/// Age scaling: slots by default, seconds on request.
struct AgeUnit {
    factor: f64,
    suffix: &'static str,
}

fn age_unit(seconds: bool, sc: &Scenario) -> AgeUnit {
    if seconds {
        AgeUnit {
            factor: sc.channel().slot_duration(),
            suffix: "seconds",
        }
    } else {
        AgeUnit {
            factor: 1.0,
            suffix: "slots",
        }
    }
}

fn write_bytes(bytes: &[u8], path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", p.display()))),
        None => out.write_all(bytes).map_err(io_out),
    }
}

fn scheme_selection(arg: SchemeArg) -> SchemeSelection {
    match arg {
        SchemeArg::Joint => SchemeSelection::Joint,
        SchemeArg::Distributed => SchemeSelection::Distributed,
        SchemeArg::Both => SchemeSelection::Both,
    }
}

fn selection_name(sel: SchemeSelection) -> &'static str {
    match sel {
        SchemeSelection::Joint => "joint",
        SchemeSelection::Distributed => "distributed",
        SchemeSelection::Both => "both",
    }
}

fn parse_selection(name: &str) -> Result<SchemeSelection, CliError> {
    match name {
        "joint" => Ok(SchemeSelection::Joint),
        "distributed" => Ok(SchemeSelection::Distributed),
        "both" => Ok(SchemeSelection::Both),
        other => Err(CliError::Validation(format!(
            "manifest scheme '{other}' is not joint, distributed, or both"
        ))),
    }
}

fn parse_scheme(name: &str) -> Result<Scheme, CliError> {
    match name {
        "joint" => Ok(Scheme::Joint),
        "distributed" => Ok(Scheme::Distributed),
        other => Err(CliError::Validation(format!(
            "manifest scheme '{other}' is not joint or distributed"
        ))),
    }
}

fn swept_variable(arg: VariableArg) -> SweptVariable {
    match arg {
        VariableArg::Rate => SweptVariable::CodingRate,
        VariableArg::Sensors => SweptVariable::NumSensors,
        VariableArg::Alpha => SweptVariable::Redundancy,
        VariableArg::Blocklength => SweptVariable::Blocklength,
    }
}

fn parse_variable(name: &str) -> Result<SweptVariable, CliError> {
    match name {
        "coding_rate" => Ok(SweptVariable::CodingRate),
        "num_sensors" => Ok(SweptVariable::NumSensors),
        "redundancy" => Ok(SweptVariable::Redundancy),
        "blocklength" => Ok(SweptVariable::Blocklength),
        other => Err(CliError::Validation(format!(
            "manifest swept variable '{other}' is not coding_rate, num_sensors, redundancy, or blocklength"
        ))),
    }
}

const MAX_GRID_POINTS: usize = 100_000;

/// Inclusive arithmetic grid; the end point is included when the step
/// lands on it (within a small slack for decimal steps).
fn build_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !from.is_finite() || !to.is_finite() || !step.is_finite() {
        return Err(CliError::Validation(
            "grid start, end, and step must be finite".to_string(),
        ));
    }
    if step <= 0.0 {
        return Err(CliError::Validation(format!(
            "invalid grid step {step}: must be > 0"
        )));
    }
    if to < from {
        return Err(CliError::Validation(format!(
            "grid end {to} is below start {from}"
        )));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    if count > MAX_GRID_POINTS {
        return Err(CliError::Validation(format!(
            "grid has {count} points; the limit is {MAX_GRID_POINTS}"
        )));
    }
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

/// One line per scheme: blocklength, error rate, distribution shape
/// parameters when present, and the average age; bare trailing tokens
/// flag unreliable or divergent points.
fn scheme_report(
    label: &str,
    shape: PacketShape,
    result: aoi_core::Result<AnalyticResult>,
    unit: &AgeUnit,
) -> Result<String, CliError> {
    match result {
        Ok(r) => {
            let mut line = format!(
                "{label} blocklength={} error_rate={}",
                r.blocklength,
                fmt_g12(r.error_rate)
            );
            if let Some(sigma) = r.sigma {
                line.push_str(&format!(" sigma={}", fmt_g12(sigma)));
            }
            if let Some(beta) = r.beta {
                line.push_str(&format!(" beta={}", fmt_g12(beta)));
            }
            line.push_str(&format!(
                " avg_aoi_{}={}",
                unit.suffix,
                fmt_g12(r.avg_aoi_slots * unit.factor)
            ));
            if r.short_block {
                line.push_str(" short_block");
            }
            Ok(line)
        }
        Err(CoreError::UnboundedAge { error_rate, .. }) => Ok(format!(
            "{label} blocklength={} error_rate={} avg_aoi_{}=inf unbounded",
            shape.blocklength(),
            fmt_g12(error_rate),
            unit.suffix
        )),
        Err(e) => Err(e.into()),
    }
}

pub fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let run = load_run("analyze", &args.scenario, None, args.forced_error, |m| {
        m.analyze.as_ref().and_then(|a| a.forced_error_rate)
    })?;
    let sc = &run.resolved.scenario;
    let forced = run.resolved.sim.forced_error_rate;
    let opts = eval_options(forced);
    let unit = age_unit(args.seconds, sc);

    writeln!(
        out,
        "scenario sensors={} bits_per_sensor={} alpha={} rate={} snr={} slot_duration={}",
        sc.num_sensors(),
        sc.per_sensor_bits(),
        sc.redundancy_bits(),
        fmt_g12(sc.coding_rate()),
        fmt_g12(sc.channel().snr_linear()),
        fmt_g12(sc.channel().slot_duration()),
    )
    .map_err(io_out)?;

    let joint = scheme_report("joint", sc.joint_shape(), avg_aoi_joint_with(sc, &opts), &unit)?;
    writeln!(out, "{joint}").map_err(io_out)?;
    let distributed = scheme_report(
        "distributed",
        sc.sensor_shape(),
        avg_aoi_distributed_with(sc, &opts),
        &unit,
    )?;
    writeln!(out, "{distributed}").map_err(io_out)?;

    match alpha_threshold_with(sc, &opts) {
        Ok(t) => {
            let mut line = format!(
                "threshold alpha_0_bits={} aoi_diff_{}={} preferred={}",
                fmt_g12(t.alpha_0),
                unit.suffix,
                fmt_g12(t.aoi_diff * unit.factor),
                t.preferred.as_str()
            );
            if t.outside_approx_regime() {
                line.push_str(" outside_approx_regime");
                eprintln!(
                    "note: per-sensor error rate {} is above {}; the threshold approximation is unreliable there",
                    fmt_g12(t.error_rate),
                    fmt_g12(aoi_core::APPROX_REGIME_MAX_ERROR_RATE)
                );
            }
            writeln!(out, "{line}").map_err(io_out)?;
        }
        Err(CoreError::UnboundedAge { error_rate, .. }) => {
            writeln!(
                out,
                "threshold unavailable error_rate={} unbounded",
                fmt_g12(error_rate)
            )
            .map_err(io_out)?;
        }
        Err(e) => return Err(e.into()),
    }

    if let Some(path) = &args.scenario.manifest_out {
        let mut m = RunManifest::new("analyze", scenario_spec(sc));
        m.analyze = Some(AnalyzeSection {
            forced_error_rate: forced,
        });
        m.save(path)?;
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let run = load_run(
        "simulate",
        &args.scenario,
        Some(&args.sim),
        args.sim.forced_error,
        |m| m.sim.as_ref().and_then(|s| s.forced_error_rate),
    )?;
    let sc = &run.resolved.scenario;
    let settings = &run.resolved.sim;
    let opts = eval_options(settings.forced_error_rate);
    let unit = age_unit(args.seconds, sc);
    let selection = match args.scheme {
        Some(s) => scheme_selection(s),
        None => match run.manifest.as_ref().and_then(|m| m.simulate.as_ref()) {
            Some(sec) => parse_selection(&sec.scheme)?,
            None => SchemeSelection::Both,
        },
    };

    for &scheme in selection.schemes() {
        let (analytic, shape) = match scheme {
            Scheme::Joint => (avg_aoi_joint_with(sc, &opts), sc.joint_shape()),
            Scheme::Distributed => (avg_aoi_distributed_with(sc, &opts), sc.sensor_shape()),
        };
        match analytic {
            Ok(a) => {
                let sim = match scheme {
                    Scheme::Joint => simulate_joint(sc, settings)?,
                    Scheme::Distributed => simulate_distributed(sc, settings)?,
                };
                let mut line = format!(
                    "{} analytic_aoi_{su}={} sim_aoi_{su}={} ci95={} frames_used={} replications={} seed={}",
                    scheme.as_str(),
                    fmt_g12(a.avg_aoi_slots * unit.factor),
                    fmt_g12(sim.avg_aoi_slots * unit.factor),
                    fmt_g12(sim.ci95_half_width * unit.factor),
                    sim.frames_used,
                    settings.replications,
                    sim.seed,
                    su = unit.suffix,
                );
                if a.short_block {
                    line.push_str(" short_block");
                }
                writeln!(out, "{line}").map_err(io_out)?;
            }
            Err(CoreError::UnboundedAge { error_rate, .. }) => {
                writeln!(
                    out,
                    "{} blocklength={} error_rate={} unbounded simulation_skipped",
                    scheme.as_str(),
                    shape.blocklength(),
                    fmt_g12(error_rate)
                )
                .map_err(io_out)?;
            }
            Err(e) => return Err(e.into()),
        }
    }

    if let Some(path) = &args.scenario.manifest_out {
        let mut m = RunManifest::new("simulate", scenario_spec(sc));
        m.sim = Some(sim_spec(settings));
        m.simulate = Some(SimulateSection {
            scheme: selection_name(selection).to_string(),
        });
        m.save(path)?;
    }
    Ok(())
}

/// Fully determined sweep: the knob, its grid, the schemes, and the
/// per-sensor payload sizes to repeat it over.
struct SweepShape {
    variable: SweptVariable,
    grid: Vec<f64>,
    selection: SchemeSelection,
    with_sim: bool,
    blocks: Vec<u32>,
}

fn preset_shape(
    preset: PresetArg,
    resolved: &Resolved,
    args: &SweepArgs,
) -> Result<SweepShape, CliError> {
    let sc = &resolved.scenario;
    let (variable, grid, blocks) = match preset {
        // Rate sweep over two payload sizes, so the rate where the
        // average diverges is visible for both a short and a long
        // update. An explicit payload collapses it to one size.
        PresetArg::Fig3 => {
            let blocks = if resolved.bits_per_sensor_explicit {
                vec![sc.per_sensor_bits()]
            } else {
                vec![60, 120]
            };
            (SweptVariable::CodingRate, build_grid(0.3, 1.4, 0.05)?, blocks)
        }
        PresetArg::Fig4 => (
            SweptVariable::NumSensors,
            build_grid(1.0, 10.0, 1.0)?,
            vec![sc.per_sensor_bits()],
        ),
        PresetArg::Fig5 => {
            let hi = f64::from((sc.num_sensors() - 1) * sc.per_sensor_bits());
            (SweptVariable::Redundancy, build_grid(0.0, hi, 40.0)?, vec![sc.per_sensor_bits()])
        }
    };
    Ok(SweepShape {
        variable,
        grid,
        selection: args.scheme.map(scheme_selection).unwrap_or(SchemeSelection::Both),
        with_sim: args.with_sim,
        blocks,
    })
}

fn custom_shape(args: &SweepArgs, resolved: &Resolved) -> Result<SweepShape, CliError> {
    let var = args.var.ok_or_else(|| {
        CliError::Validation("sweep needs --preset, --var, or --from-manifest".to_string())
    })?;
    let grid = if let Some(g) = &args.grid {
        g.clone()
    } else {
        match (args.grid_from, args.grid_to, args.grid_step) {
            (Some(from), Some(to), Some(step)) => build_grid(from, to, step)?,
            (None, None, None) => {
                return Err(CliError::Validation(
                    "--var needs --grid or --grid-from/--grid-to/--grid-step".to_string(),
                ))
            }
            _ => {
                return Err(CliError::Validation(
                    "provide all of --grid-from, --grid-to, and --grid-step".to_string(),
                ))
            }
        }
    };
    Ok(SweepShape {
        variable: swept_variable(var),
        grid,
        selection: args.scheme.map(scheme_selection).unwrap_or(SchemeSelection::Both),
        with_sim: args.with_sim,
        blocks: vec![resolved.scenario.per_sensor_bits()],
    })
}

pub fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let run = load_run(
        "sweep",
        &args.scenario,
        Some(&args.sim),
        args.sim.forced_error,
        |m| m.sim.as_ref().and_then(|s| s.forced_error_rate),
    )?;
    let resolved = &run.resolved;
    let sc = &resolved.scenario;

    let shape = if let Some(m) = &run.manifest {
        let sec = m.sweep.as_ref().ok_or_else(|| {
            CliError::Validation("manifest has no sweep section".to_string())
        })?;
        SweepShape {
            variable: parse_variable(&sec.variable)?,
            grid: sec.grid.clone(),
            selection: match args.scheme {
                Some(s) => scheme_selection(s),
                None => parse_selection(&sec.scheme)?,
            },
            with_sim: args.with_sim || sec.with_simulation,
            blocks: sec.bits_per_sensor_blocks.clone(),
        }
    } else if let Some(preset) = args.preset {
        preset_shape(preset, resolved, args)?
    } else {
        custom_shape(args, resolved)?
    };
    if shape.blocks.is_empty() {
        return Err(CliError::Validation(
            "sweep has no payload sizes to run".to_string(),
        ));
    }

    let mut rows = Vec::new();
    for (index, &bits) in shape.blocks.iter().enumerate() {
        let base = Scenario::new(
            sc.num_sensors(),
            bits,
            sc.redundancy_bits(),
            sc.coding_rate(),
            sc.channel(),
        )?;
        let spec = SweepSpec {
            base,
            variable: shape.variable,
            grid: shape.grid.clone(),
            schemes: shape.selection,
            with_simulation: shape.with_sim,
            // Each payload size gets its own seed lane; rows inside a
            // lane are themselves seeded per row.
            sim: SimSettings {
                seed: derive_seed(resolved.sim.seed, index as u64),
                ..resolved.sim
            },
        };
        rows.extend(run_sweep(&spec)?);
    }

    let bytes = csv::render(shape.variable, &rows);
    write_bytes(&bytes, args.out.as_deref(), out)?;

    if let Some(path) = &args.scenario.manifest_out {
        let mut m = RunManifest::new("sweep", scenario_spec(sc));
        m.sim = Some(sim_spec(&resolved.sim));
        m.sweep = Some(SweepSection {
            variable: shape.variable.as_str().to_string(),
            grid: shape.grid.clone(),
            scheme: selection_name(shape.selection).to_string(),
            with_simulation: shape.with_sim,
            bits_per_sensor_blocks: shape.blocks.clone(),
        });
        m.save(path)?;
    }
    Ok(())
}

pub fn optimize(args: &OptimizeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let run = load_run("optimize", &args.scenario, None, args.forced_error, |m| {
        m.optimize.as_ref().and_then(|o| o.forced_error_rate)
    })?;
    let sc = &run.resolved.scenario;
    let section = run.manifest.as_ref().and_then(|m| m.optimize.as_ref());
    let scheme = match args.scheme {
        Some(SchemeOnlyArg::Joint) => Scheme::Joint,
        Some(SchemeOnlyArg::Distributed) => Scheme::Distributed,
        None => match section {
            Some(sec) => parse_scheme(&sec.scheme)?,
            None => Scheme::Joint,
        },
    };
    let (objective, bits) = match scheme {
        Scheme::Joint => (
            OptimizeObjective::Joint {
                update_bits: sc.joint_bits(),
            },
            sc.joint_bits(),
        ),
        Scheme::Distributed => (
            OptimizeObjective::Distributed {
                sensors: sc.num_sensors(),
                per_sensor_bits: sc.per_sensor_bits(),
            },
            sc.per_sensor_bits(),
        ),
    };
    let m_from = args.m_from.or(section.map(|s| s.m_from)).unwrap_or(bits);
    let m_to = args
        .m_to
        .or(section.map(|s| s.m_to))
        .unwrap_or_else(|| bits.saturating_mul(5).min(MAX_OPTIMIZE_BLOCKLENGTH));
    let forced = run.resolved.sim.forced_error_rate;
    let opts = eval_options(forced);
    let unit = age_unit(args.seconds, sc);

    let optimum = optimize_blocklength_with(objective, sc.channel(), (m_from, m_to), &opts)?;

    let mut line = format!(
        "optimize scheme={} bits={} searched={}..{} best_blocklength={} best_aoi_{}={}",
        scheme.as_str(),
        bits,
        m_from,
        m_to,
        optimum.best_blocklength,
        unit.suffix,
        fmt_g12(optimum.best_aoi_slots * unit.factor)
    );
    if optimum.at_boundary {
        line.push_str(" at_boundary");
        eprintln!(
            "note: minimum at range boundary; the true optimum may lie outside {m_from}..{m_to}"
        );
    }
    writeln!(out, "{line}").map_err(io_out)?;

    if let Some(path) = &args.out {
        let rows: Vec<SweepRow> = optimum
            .profile
            .iter()
            .map(|p| SweepRow {
                swept_value: f64::from(p.blocklength),
                scheme,
                blocklength: p.blocklength,
                error_rate: p.error_rate,
                analytic_aoi_slots: p.aoi_slots,
                unbounded: !p.aoi_slots.is_finite(),
                short_block: p.blocklength < SHORT_BLOCK_LIMIT,
                sim_aoi_slots: None,
                sim_ci95: None,
                seed: None,
            })
            .collect();
        let bytes = csv::render(SweptVariable::Blocklength, &rows);
        write_bytes(&bytes, Some(path), out)?;
    }

    if let Some(path) = &args.scenario.manifest_out {
        let mut m = RunManifest::new("optimize", scenario_spec(sc));
        m.optimize = Some(OptimizeSection {
            scheme: scheme.as_str().to_string(),
            m_from,
            m_to,
            forced_error_rate: forced,
        });
        m.save(path)?;
    }
    Ok(())
}

pub fn compare(args: &CompareArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let run = load_run("compare", &args.scenario, None, args.forced_error, |m| {
        m.compare.as_ref().and_then(|c| c.forced_error_rate)
    })?;
    let sc = &run.resolved.scenario;
    let section = run.manifest.as_ref().and_then(|m| m.compare.as_ref());
    let alpha_from = args
        .alpha_from
        .or(section.map(|c| c.alpha_from))
        .unwrap_or(0);
    let alpha_to = args
        .alpha_to
        .or(section.map(|c| c.alpha_to))
        .unwrap_or(sc.num_sensors() * sc.per_sensor_bits() - 1);
    let forced = run.resolved.sim.forced_error_rate;
    let opts = eval_options(forced);

    let threshold = alpha_threshold_with(sc, &opts)?;
    let crossover = match locate_crossover_with(sc, (alpha_from, alpha_to), &opts) {
        Ok(x) => Some(x),
        Err(CoreError::NoCrossover { lo, hi }) => {
            eprintln!("note: no crossover in [{lo}, {hi}]; the same scheme wins at both ends");
            None
        }
        Err(e) => return Err(e.into()),
    };

    let mut line = format!("compare alpha_0_bits={}", fmt_g12(threshold.alpha_0));
    match crossover {
        Some(x) => {
            line.push_str(&format!(
                " crossover_bits={} difference_bits={}",
                fmt_g12(x),
                fmt_g12(x - threshold.alpha_0)
            ));
        }
        None => line.push_str(" crossover_bits=none"),
    }
    line.push_str(&format!(
        " error_rate={} preferred_now={}",
        fmt_g12(threshold.error_rate),
        threshold.preferred.as_str()
    ));
    if threshold.outside_approx_regime() {
        line.push_str(" outside_approx_regime");
    }
    writeln!(out, "{line}").map_err(io_out)?;

    if let Some(path) = &args.scenario.manifest_out {
        let mut m = RunManifest::new("compare", scenario_spec(sc));
        m.compare = Some(CompareSection {
            alpha_from,
            alpha_to,
            forced_error_rate: forced,
        });
        m.save(path)?;
    }
    Ok(())
}
