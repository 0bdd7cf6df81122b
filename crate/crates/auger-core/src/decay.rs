//! Closed-form decay of the metastable level: exponential radiative decay
//! against hyperbolic Auger decay, plus the crossover time between the two.

use crate::numeric::bisect;
use crate::table::{fmt_f64, TextTable};

/// Which decay channel a sampled curve describes, with its rate parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayKind {
    Radiative { tau_sp: f64 },
    Auger { gamma_a: f64 },
}

/// One sampled decay curve N2(t) with N2(0) = `initial`.
#[derive(Debug, Clone)]
pub struct DecayCurve {
    pub kind: DecayKind,
    pub initial: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Radiative decay N2(t) = N_z exp(-t / tau_sp).
pub fn radiative_population(n_z: f64, tau_sp: f64, t: f64) -> f64 {
    n_z * (-t / tau_sp).exp()
}

/// Auger decay N2(t) = 1 / (1/N_z + gamma_A t), the solution of
/// dN2/dt = -gamma_A N2^2. The t = 0 branch avoids the double reciprocal
/// rounding so the initial value is exact.
pub fn auger_population(n_z: f64, gamma_a: f64, t: f64) -> f64 {
    if t == 0.0 {
        return n_z;
    }
    1.0 / (1.0 / n_z + gamma_a * t)
}

/// Smallest t > 0 at which the two curves meet, or `None` if they do not
/// cross inside the window (0, 100 * max(tau_sp, 1/(gamma_A N_z))].
///
/// Both curves start at N_z, so the comparison reduces to the root of
/// exp(-t/tau_sp) (1 + gamma_A N_z t) = 1. A geometric scan (64 points per
/// decade, down to 1e-15 of the window) brackets the sign change and
/// bisection refines it to 1e-12 relative.
pub fn crossover_time(n_z: f64, tau_sp: f64, gamma_a: f64) -> Option<f64> {
    assert!(n_z > 0.0 && tau_sp > 0.0 && gamma_a > 0.0);
    let g = |t: f64| (-t / tau_sp).exp() * (1.0 + gamma_a * n_z * t) - 1.0;
    let t_max = 100.0 * tau_sp.max(1.0 / (gamma_a * n_z));
    let factor = 10f64.powf(1.0 / 64.0);

    // Points where g rounds to exactly 0 carry no sign information and are
    // skipped; the bracket start is the last point with a definite sign.
    let mut t_bracket = t_max * 1e-15;
    let mut sign_prev = 0.0;
    let mut t = t_bracket;
    while t < t_max {
        t = (t * factor).min(t_max);
        let value = g(t);
        if value == 0.0 {
            continue;
        }
        let sign = if value > 0.0 { 1.0 } else { -1.0 };
        if sign_prev != 0.0 && sign != sign_prev {
            return Some(bisect(g, t_bracket, t, 1e-12));
        }
        sign_prev = sign;
        t_bracket = t;
    }
    None
}

/// Samples both decay laws on a shared grid that starts at 0.
pub fn decay_curves(
    n_z: f64,
    tau_sp: f64,
    gamma_a: f64,
    grid: &[f64],
) -> (DecayCurve, DecayCurve) {
    assert!(n_z > 0.0 && tau_sp > 0.0 && gamma_a > 0.0);
    assert!(!grid.is_empty() && grid[0] == 0.0, "grid must start at 0");
    assert!(
        grid.windows(2).all(|w| w[1] > w[0]),
        "grid must be strictly increasing"
    );
    let radiative = DecayCurve {
        kind: DecayKind::Radiative { tau_sp },
        initial: n_z,
        samples: grid
            .iter()
            .map(|&t| (t, radiative_population(n_z, tau_sp, t)))
            .collect(),
    };
    let auger = DecayCurve {
        kind: DecayKind::Auger { gamma_a },
        initial: n_z,
        samples: grid
            .iter()
            .map(|&t| (t, auger_population(n_z, gamma_a, t)))
            .collect(),
    };
    (radiative, auger)
}

/// Renders the two curves as one delimited table (t, n2_radiative, n2_auger).
pub fn curves_to_table(radiative: &DecayCurve, auger: &DecayCurve) -> String {
    assert_eq!(radiative.samples.len(), auger.samples.len());
    let mut t = TextTable::new(vec!["t", "n2_radiative", "n2_auger"]);
    for ((tr, nr), (ta, na)) in radiative.samples.iter().zip(&auger.samples) {
        debug_assert_eq!(tr, ta);
        t.push_row(vec![fmt_f64(*tr), fmt_f64(*nr), fmt_f64(*na)]);
    }
    t.render()
}
