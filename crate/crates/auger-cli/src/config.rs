//! Config-document layout: one flat key-value file with dotted section
//! prefixes. `params.*` holds the model constants; each subcommand reads its
//! own section on top of that. Any key outside the known set is rejected by
//! name, so typos fail loudly instead of silently using a default.

use crate::error::CliError;
use crate::sweep::{GridScale, SweepAxis, SweepConfig};
use auger_core::coherence::{IonizationTimeDistribution, Wavepacket};
use auger_core::kinetics::SolverOptions;
use auger_core::kv::{KvDoc, KvError};
use auger_core::model::SystemParams;
use auger_core::steady;

const PARAM_KEYS: [&str; 9] = [
    "params.w_p",
    "params.tau_1",
    "params.tau_3",
    "params.tau_sp",
    "params.gamma_A",
    "params.n_total",
    "params.beta",
    "params.energies",
    "params.work_function",
];

const SIM_KEYS: [&str; 8] = [
    "sim.t_end",
    "sim.samples",
    "sim.replenish",
    "sim.rel_tol",
    "sim.abs_tol",
    "sim.initial_step",
    "sim.max_step",
    "sim.max_steps",
];

const STEADY_KEYS: [&str; 1] = ["steady.verify"];

const SWEEP_KEYS: [&str; 7] = [
    "sweep.axis",
    "sweep.min",
    "sweep.max",
    "sweep.points",
    "sweep.scale",
    "sweep.table",
    "sweep.plot",
];

const DECAY_KEYS: [&str; 5] = [
    "decay.n_z",
    "decay.t_min",
    "decay.t_max",
    "decay.points",
    "decay.plot",
];

const SPECTRUM_KEYS: [&str; 10] = [
    "spectrum.dist",
    "spectrum.t0",
    "spectrum.sigma",
    "spectrum.emitters",
    "spectrum.trials",
    "spectrum.wavepacket_width",
    "spectrum.wavepacket_center",
    "spectrum.omega_max",
    "spectrum.omega_points",
    "spectrum.plot",
];

/// Checks every key in the document against the full known set.
pub fn check_keys(doc: &KvDoc) -> Result<(), CliError> {
    let mut allowed: Vec<&str> = vec!["seed"];
    allowed.extend(PARAM_KEYS);
    allowed.extend(SIM_KEYS);
    allowed.extend(STEADY_KEYS);
    allowed.extend(SWEEP_KEYS);
    allowed.extend(DECAY_KEYS);
    allowed.extend(SPECTRUM_KEYS);
    doc.check_known(&allowed)?;
    Ok(())
}

pub fn load_params(doc: &KvDoc) -> Result<SystemParams, CliError> {
    Ok(SystemParams::from_kv_doc(&doc.section("params"))?)
}

pub fn load_seed(doc: &KvDoc, cli_override: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = cli_override {
        return Ok(seed);
    }
    Ok(doc.u64_or("seed", 0)?)
}

pub fn load_solver_options(
    doc: &KvDoc,
    params: &SystemParams,
) -> Result<SolverOptions, CliError> {
    let defaults = SolverOptions::for_params(params);
    Ok(SolverOptions {
        rel_tol: doc.f64_or("sim.rel_tol", defaults.rel_tol)?,
        abs_tol: doc.f64_or("sim.abs_tol", defaults.abs_tol)?,
        max_step: doc.f64_or("sim.max_step", defaults.max_step)?,
        initial_step: doc.f64_or("sim.initial_step", defaults.initial_step)?,
        max_steps: doc.usize_or("sim.max_steps", defaults.max_steps)?,
    })
}

pub struct SimulateConfig {
    pub t_end: f64,
    pub samples: usize,
    pub replenish: bool,
    pub opts: SolverOptions,
}

pub fn load_simulate(doc: &KvDoc, params: &SystemParams) -> Result<SimulateConfig, CliError> {
    Ok(SimulateConfig {
        t_end: doc.f64("sim.t_end")?,
        samples: doc.usize_or("sim.samples", 512)?,
        replenish: doc.bool_or("sim.replenish", false)?,
        opts: load_solver_options(doc, params)?,
    })
}

pub fn load_sweep(doc: &KvDoc, params: &SystemParams, seed: u64) -> Result<SweepConfig, CliError> {
    let axis = match doc.require("sweep.axis")? {
        "pump" => SweepAxis::Pump,
        "population" => SweepAxis::Population,
        other => {
            return Err(CliError::BadConfig {
                key: "sweep.axis",
                reason: format!("expected `pump` or `population`, got `{other}`"),
            })
        }
    };
    let scale = match doc.get("sweep.scale").unwrap_or("log") {
        "log" => GridScale::Log,
        "linear" => GridScale::Linear,
        other => {
            return Err(CliError::BadConfig {
                key: "sweep.scale",
                reason: format!("expected `linear` or `log`, got `{other}`"),
            })
        }
    };
    let cfg = SweepConfig {
        params: *params,
        axis,
        min: doc.f64("sweep.min")?,
        max: doc.f64("sweep.max")?,
        points: doc.usize_or("sweep.points", 61)?,
        scale,
        write_table: doc.bool_or("sweep.table", true)?,
        write_plot: doc.bool_or("sweep.plot", true)?,
        seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub struct DecayConfig {
    pub n_z: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub plot: bool,
}

pub fn load_decay(doc: &KvDoc, params: &SystemParams) -> Result<DecayConfig, CliError> {
    let n_z = doc.f64("decay.n_z")?;
    if n_z.is_nan() || n_z <= 0.0 {
        return Err(CliError::BadConfig {
            key: "decay.n_z",
            reason: format!("initial population must be positive, got {n_z}"),
        });
    }
    let slow_scale = params.tau_sp.max(1.0 / (params.gamma_a * n_z));
    let t_max = doc.f64_or("decay.t_max", 20.0 * slow_scale)?;
    let t_min = doc.f64_or("decay.t_min", 1e-6 * t_max)?;
    if !(t_min > 0.0 && t_min < t_max) {
        return Err(CliError::BadConfig {
            key: "decay.t_min",
            reason: format!("need 0 < t_min < t_max, got {t_min} vs {t_max}"),
        });
    }
    Ok(DecayConfig {
        n_z,
        t_min,
        t_max,
        points: doc.usize_or("decay.points", 512)?,
        plot: doc.bool_or("decay.plot", true)?,
    })
}

pub struct SpectrumConfig {
    pub dist: IonizationTimeDistribution,
    pub wavepacket: Wavepacket,
    pub emitters: usize,
    pub trials: usize,
    pub omega_max: Option<f64>,
    pub omega_points: usize,
    pub plot: bool,
}

pub fn load_spectrum(doc: &KvDoc, params: &SystemParams) -> Result<SpectrumConfig, CliError> {
    let t0 = doc.f64_or("spectrum.t0", 0.0)?;
    let dist = match doc.require("spectrum.dist")? {
        "delta" => IonizationTimeDistribution::Delta { t0 },
        family @ ("gaussian" | "exponential" | "uniform") => {
            let sigma = doc.f64("spectrum.sigma")?;
            if sigma.is_nan() || sigma <= 0.0 {
                return Err(CliError::BadConfig {
                    key: "spectrum.sigma",
                    reason: format!("scale must be positive, got {sigma}"),
                });
            }
            match family {
                "gaussian" => IonizationTimeDistribution::Gaussian { t0, sigma },
                "exponential" => IonizationTimeDistribution::Exponential { t0, sigma },
                _ => IonizationTimeDistribution::Uniform { t0, sigma },
            }
        }
        other => {
            return Err(CliError::BadConfig {
                key: "spectrum.dist",
                reason: format!(
                    "expected delta, gaussian, exponential, or uniform; got `{other}`"
                ),
            })
        }
    };

    // `steady` wires the saturated-regime link: the emitter count is the
    // steady-state metastable population.
    let emitters = match doc.require("spectrum.emitters")? {
        "steady" => {
            let n2 = steady::steady_n2(params);
            let rounded = n2.round();
            if !(1.0..=1e7).contains(&rounded) {
                return Err(CliError::BadConfig {
                    key: "spectrum.emitters",
                    reason: format!(
                        "steady-state n2 = {n2:.3e} is outside the samplable range [1, 1e7]"
                    ),
                });
            }
            rounded as usize
        }
        text => text.parse().map_err(|_| KvError::BadValue {
            key: "spectrum.emitters".into(),
            value: text.into(),
            expected: "an unsigned integer or `steady`",
        })?,
    };
    if emitters == 0 {
        return Err(CliError::BadConfig {
            key: "spectrum.emitters",
            reason: "need at least one emitter".into(),
        });
    }

    let width = doc.f64("spectrum.wavepacket_width")?;
    if width.is_nan() || width <= 0.0 {
        return Err(CliError::BadConfig {
            key: "spectrum.wavepacket_width",
            reason: format!("width must be positive, got {width}"),
        });
    }

    let omega_max = doc
        .get("spectrum.omega_max")
        .map(|_| doc.f64("spectrum.omega_max"))
        .transpose()?;
    if let Some(m) = omega_max {
        if m.is_nan() || m <= 0.0 {
            return Err(CliError::BadConfig {
                key: "spectrum.omega_max",
                reason: format!("frequency span must be positive, got {m}"),
            });
        }
    }

    Ok(SpectrumConfig {
        dist,
        wavepacket: Wavepacket {
            center: doc.f64_or("spectrum.wavepacket_center", 0.0)?,
            width,
        },
        emitters,
        trials: doc.usize_or("spectrum.trials", 4096)?,
        omega_max,
        omega_points: doc.usize_or("spectrum.omega_points", 256)?,
        plot: doc.bool_or("spectrum.plot", true)?,
    })
}

pub fn load_steady_verify(doc: &KvDoc) -> Result<bool, CliError> {
    Ok(doc.bool_or("steady.verify", false)?)
}
