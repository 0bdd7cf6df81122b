//! One driver per subcommand: load the config, run the model, write tables
//! and plots into the output directory. Files are written to a temp path and
//! renamed into place so readers never see a partial file.

use crate::config;
use crate::error::CliError;
use crate::plot::{self, Chart, Series};
use crate::sweep::{self, SweepAxis};
use auger_core::coherence;
use auger_core::decay;
use auger_core::kinetics::{self, Trajectory};
use auger_core::kv::{write_kv, KvDoc};
use auger_core::model::PopulationState;
use auger_core::steady;
use auger_core::table::{fmt_f64, TextTable};
use std::fs;
use std::path::Path;

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn load_doc(config_path: &Path) -> Result<KvDoc, CliError> {
    let text = fs::read_to_string(config_path)?;
    let doc = KvDoc::parse(&text)?;
    config::check_keys(&doc)?;
    Ok(doc)
}

fn ensure_out_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    Ok(())
}

/// `simulate`: integrate the rate equations and write `trajectory.csv`.
pub fn cmd_simulate(config_path: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let doc = load_doc(config_path)?;
    let _ = config::load_seed(&doc, seed)?;
    let params = config::load_params(&doc)?;
    let sim = config::load_simulate(&doc, &params)?;

    if sim.t_end.is_nan() || sim.t_end <= sim.opts.initial_step {
        return Err(CliError::BadConfig {
            key: "sim.t_end",
            reason: format!(
                "horizon {} must exceed the initial step {}",
                sim.t_end, sim.opts.initial_step
            ),
        });
    }
    let initial = PopulationState::all_in_ground(params.n_total);
    let grid = auger_core::numeric::log_grid(sim.opts.initial_step, sim.t_end, sim.samples.max(2));
    let trajectory = if sim.replenish {
        kinetics::integrate_replenished_on_grid(&params, &initial, &grid, &sim.opts)?
    } else {
        kinetics::integrate_on_grid(&params, &initial, &grid, &sim.opts)?
    };

    ensure_out_dir(out)?;
    write_atomic(&out.join("trajectory.csv"), &trajectory.to_table())?;
    write_atomic(&out.join("trajectory.svg"), &plot::render(&trajectory_chart(&trajectory))?)?;
    Ok(())
}

fn trajectory_chart(trajectory: &Trajectory) -> Chart {
    let series = |label: &str, pick: fn(&PopulationState) -> f64| Series {
        label: label.to_string(),
        points: trajectory
            .samples
            .iter()
            .filter(|s| s.t > 0.0)
            .map(|s| (s.t, pick(&s.state)))
            .collect(),
    };
    Chart {
        title: "population trajectory".into(),
        x_label: "t [s]".into(),
        y_label: "population".into(),
        log_x: true,
        log_y: true,
        series: vec![
            series("n0", |s| s.n0),
            series("n1", |s| s.n1),
            series("n2", |s| s.n2),
            series("n3", |s| s.n3),
            series("n_a", |s| s.n_a),
        ],
    }
}

/// `steady`: closed-form steady state, optionally verified against the
/// integrator; writes `steady.txt`.
pub fn cmd_steady(config_path: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let doc = load_doc(config_path)?;
    let _ = config::load_seed(&doc, seed)?;
    let params = config::load_params(&doc)?;
    params.validate()?;

    let solution = if config::load_steady_verify(&doc)? {
        let opts = config::load_solver_options(&doc, &params)?;
        steady::verify_against_ode(&params, &opts)?.solution
    } else {
        steady::steady_populations(&params)
    };

    ensure_out_dir(out)?;
    write_atomic(&out.join("steady.txt"), &solution.to_kv())?;
    Ok(())
}

/// `sweep`: steady-state current over a pump or population grid; writes
/// `sweep.csv` and `sweep.svg` as requested.
pub fn cmd_sweep(config_path: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let doc = load_doc(config_path)?;
    let seed = config::load_seed(&doc, seed)?;
    let params = config::load_params(&doc)?;
    params.validate()?;
    let cfg = config::load_sweep(&doc, &params, seed)?;

    ensure_out_dir(out)?;
    let log_axes = cfg.scale == crate::sweep::GridScale::Log;
    match cfg.axis {
        SweepAxis::Pump => {
            let rows = sweep::run_pump_sweep(&cfg)?;
            if cfg.write_table {
                write_atomic(&out.join("sweep.csv"), &sweep::pump_sweep_table(&rows))?;
            }
            if cfg.write_plot {
                let chart = Chart {
                    title: "photocurrent vs pump rate".into(),
                    x_label: "w_p [1/s]".into(),
                    y_label: "j_ph [1/s]".into(),
                    log_x: log_axes,
                    log_y: log_axes,
                    series: vec![
                        Series {
                            label: "full".into(),
                            points: rows.iter().map(|r| (r.w_p, r.j_ph)).collect(),
                        },
                        Series {
                            label: "weak limit".into(),
                            points: rows.iter().map(|r| (r.w_p, r.j_weak)).collect(),
                        },
                        Series {
                            label: "saturated limit".into(),
                            points: rows.iter().map(|r| (r.w_p, r.j_saturated)).collect(),
                        },
                    ],
                };
                write_atomic(&out.join("sweep.svg"), &plot::render(&chart)?)?;
            }
        }
        SweepAxis::Population => {
            let rows = sweep::run_population_sweep(&cfg)?;
            if cfg.write_table {
                write_atomic(&out.join("sweep.csv"), &sweep::population_sweep_table(&rows))?;
            }
            if cfg.write_plot {
                let chart = Chart {
                    title: "photocurrent vs total population".into(),
                    x_label: "n_total".into(),
                    y_label: "j_ph [1/s]".into(),
                    log_x: log_axes,
                    log_y: log_axes,
                    series: vec![Series {
                        label: "full".into(),
                        points: rows.iter().map(|r| (r.n_total, r.j_ph)).collect(),
                    }],
                };
                write_atomic(&out.join("sweep.svg"), &plot::render(&chart)?)?;
            }
        }
    }
    Ok(())
}

/// `decay`: radiative vs Auger decay curves of the metastable level; writes
/// `decay.csv`, `decay.txt` (crossover summary), and `decay.svg`.
pub fn cmd_decay(config_path: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let doc = load_doc(config_path)?;
    let _ = config::load_seed(&doc, seed)?;
    let params = config::load_params(&doc)?;
    params.validate()?;
    let cfg = config::load_decay(&doc, &params)?;

    let mut grid = vec![0.0];
    grid.extend(auger_core::numeric::log_grid(cfg.t_min, cfg.t_max, cfg.points.max(2)));
    let (radiative, auger) = decay::decay_curves(cfg.n_z, params.tau_sp, params.gamma_a, &grid);
    let crossover = decay::crossover_time(cfg.n_z, params.tau_sp, params.gamma_a);

    ensure_out_dir(out)?;
    write_atomic(&out.join("decay.csv"), &decay::curves_to_table(&radiative, &auger))?;
    write_atomic(
        &out.join("decay.txt"),
        &write_kv(&[
            ("n_z", fmt_f64(cfg.n_z)),
            ("tau_sp", fmt_f64(params.tau_sp)),
            ("gamma_A", fmt_f64(params.gamma_a)),
            (
                "crossover_time",
                crossover.map_or("none".to_string(), fmt_f64),
            ),
        ]),
    )?;
    if cfg.plot {
        let to_series = |label: &str, curve: &decay::DecayCurve| Series {
            label: label.into(),
            points: curve.samples.iter().filter(|s| s.0 > 0.0).map(|&(t, n)| (t, n)).collect(),
        };
        let chart = Chart {
            title: "metastable level decay".into(),
            x_label: "t [s]".into(),
            y_label: "n2".into(),
            log_x: true,
            log_y: true,
            series: vec![to_series("radiative", &radiative), to_series("auger", &auger)],
        };
        write_atomic(&out.join("decay.svg"), &plot::render(&chart)?)?;
    }
    Ok(())
}

/// `spectrum`: collective spectral density over a frequency grid; writes
/// `spectrum.csv` (with a coherent-fraction column) and `spectrum.svg`.
/// With fewer than two trials the closed form is emitted instead of a
/// Monte Carlo estimate.
pub fn cmd_spectrum(config_path: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let doc = load_doc(config_path)?;
    let seed = config::load_seed(&doc, seed)?;
    let params = config::load_params(&doc)?;
    params.validate()?;
    let cfg = config::load_spectrum(&doc, &params)?;

    let grid = match cfg.omega_max {
        Some(omega_max) => auger_core::numeric::linear_grid(0.0, omega_max, cfg.omega_points.max(2)),
        None => {
            let scale = if cfg.dist.scale() > 0.0 {
                cfg.dist.scale()
            } else {
                cfg.wavepacket.width
            };
            auger_core::numeric::linear_grid(0.0, 8.0 / scale, cfg.omega_points.max(2))
        }
    };

    let density = if cfg.trials >= 2 {
        coherence::monte_carlo_expected_density(
            &cfg.dist,
            &cfg.wavepacket,
            cfg.emitters,
            cfg.trials,
            seed,
            &grid,
        )
    } else {
        coherence::analytic_expected_density(&cfg.dist, &cfg.wavepacket, cfg.emitters as f64, &grid)
    };

    ensure_out_dir(out)?;
    write_atomic(&out.join("spectrum.csv"), &spectrum_table(&density))?;
    if cfg.plot {
        let pick = |values: &[f64]| -> Vec<(f64, f64)> {
            density.omega.iter().copied().zip(values.iter().copied()).collect()
        };
        let chart = Chart {
            title: "collective spectral density".into(),
            x_label: "omega [rad/s]".into(),
            y_label: "rho".into(),
            log_x: false,
            log_y: false,
            series: vec![
                Series { label: "total".into(), points: pick(&density.value) },
                Series { label: "coherent".into(), points: pick(&density.coherent) },
                Series { label: "incoherent".into(), points: pick(&density.incoherent) },
            ],
        };
        write_atomic(&out.join("spectrum.svg"), &plot::render(&chart)?)?;
    }
    Ok(())
}

/// The core table plus a derived coherent-fraction column.
fn spectrum_table(density: &coherence::SpectralDensity) -> String {
    let base = TextTable::parse(&density.to_table()).expect("own table parses");
    let mut t = TextTable::new(vec![
        "omega",
        "value",
        "stderr",
        "coherent",
        "incoherent",
        "coherent_fraction",
    ]);
    for (i, row) in base.rows.iter().enumerate() {
        let mut cells = row.clone();
        let fraction = if density.value[i] == 0.0 {
            0.0
        } else {
            density.coherent[i] / density.value[i]
        };
        cells.push(fmt_f64(fraction));
        t.push_row(cells);
    }
    t.render()
}
