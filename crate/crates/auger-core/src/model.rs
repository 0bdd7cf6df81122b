//! Domain types shared by every other module: system parameters with
//! validation, population states, the instantaneous photocurrent, and a
//! Fowler–Nordheim transmission helper.

use crate::kv::{write_kv, KvDoc, KvError};
use crate::table::fmt_f64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("parameter `{field}` must be positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("pump rate w_p must be non-negative, got {value}")]
    NegativePump { value: f64 },
    #[error("transmission coefficient beta must lie in [0, 1], got {value}")]
    BetaOutOfRange { value: f64 },
    #[error("ground level energy must be 0, got {e0}")]
    GroundLevelNonzero { e0: f64 },
    #[error("level energies must satisfy E0 < E1 < E2 < E3, got ({e0}, {e1}, {e2}, {e3})")]
    EnergiesNotOrdered { e0: f64, e1: f64, e2: f64, e3: f64 },
    #[error(
        "work function {work_function} outside the emission window: \
         requires E3 = {e3} < W < 2*E2 = {twice_e2}"
    )]
    WorkFunctionOutOfWindow {
        e3: f64,
        work_function: f64,
        twice_e2: f64,
    },
    #[error("population `{field}` must be non-negative and finite, got {value}")]
    BadPopulation { field: &'static str, value: f64 },
    #[error(transparent)]
    Config(#[from] KvError),
}

/// Level energies `E0..E3` in arbitrary but mutually consistent units.
/// Only the ordering and the emission window are ever checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelEnergies {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

impl LevelEnergies {
    pub fn new(e0: f64, e1: f64, e2: f64, e3: f64) -> Self {
        Self { e0, e1, e2, e3 }
    }
}

/// All constants of the four-level emission model.
///
/// `beta` is an independent input here; [`fn_transmission`] can compute it
/// from a field-emission model when desired. Populations are real-valued
/// mean-field quantities, not integer counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Pump rate (stimulated 0 -> 3 coefficient), 1/s. Proportional to the
    /// incident light intensity.
    pub w_p: f64,
    /// Lifetime of level 1, s.
    pub tau_1: f64,
    /// Lifetime of level 3, s.
    pub tau_3: f64,
    /// Spontaneous radiative lifetime of level 2, s. Used only by the decay
    /// comparison; the emission model itself assumes the radiative channel is
    /// symmetry-forbidden.
    pub tau_sp: f64,
    /// Auger coefficient, 1/(population * s).
    pub gamma_a: f64,
    /// Total population.
    pub n_total: f64,
    /// Tunnelling transmission coefficient in [0, 1].
    pub beta: f64,
    pub energies: LevelEnergies,
    /// Work function W; must satisfy E3 < W < 2*E2 so the pump cannot eject
    /// electrons directly but an Auger-energised electron escapes.
    pub work_function: f64,
}

const PARAM_KEYS: [&str; 9] = [
    "w_p",
    "tau_1",
    "tau_3",
    "tau_sp",
    "gamma_A",
    "n_total",
    "beta",
    "energies",
    "work_function",
];

impl SystemParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.w_p.is_finite() || self.w_p < 0.0 {
            return Err(ModelError::NegativePump { value: self.w_p });
        }
        for (field, value) in [
            ("tau_1", self.tau_1),
            ("tau_3", self.tau_3),
            ("tau_sp", self.tau_sp),
            ("gamma_A", self.gamma_a),
            ("n_total", self.n_total),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(ModelError::NonPositive { field, value });
            }
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(ModelError::BetaOutOfRange { value: self.beta });
        }
        let LevelEnergies { e0, e1, e2, e3 } = self.energies;
        if e0 != 0.0 {
            return Err(ModelError::GroundLevelNonzero { e0 });
        }
        let ordered = e0 < e1 && e1 < e2 && e2 < e3;
        if !ordered {
            return Err(ModelError::EnergiesNotOrdered { e0, e1, e2, e3 });
        }
        let twice_e2 = 2.0 * e2;
        let in_window = self.work_function > e3 && self.work_function < twice_e2;
        if !in_window {
            return Err(ModelError::WorkFunctionOutOfWindow {
                e3,
                work_function: self.work_function,
                twice_e2,
            });
        }
        Ok(())
    }

    pub fn validated(self) -> Result<Self, ModelError> {
        self.validate()?;
        Ok(self)
    }

    /// Pump ratio r = w_p / (gamma_A * N). r << 1 is the weak regime,
    /// r >> 1 the saturated one.
    pub fn pump_ratio(&self) -> f64 {
        self.w_p / (self.gamma_a * self.n_total)
    }

    /// Serializes to a flat key-value document (keys as the field names,
    /// `energies` as four comma-separated values).
    pub fn to_kv(&self) -> String {
        let LevelEnergies { e0, e1, e2, e3 } = self.energies;
        write_kv(&[
            ("w_p", fmt_f64(self.w_p)),
            ("tau_1", fmt_f64(self.tau_1)),
            ("tau_3", fmt_f64(self.tau_3)),
            ("tau_sp", fmt_f64(self.tau_sp)),
            ("gamma_A", fmt_f64(self.gamma_a)),
            ("n_total", fmt_f64(self.n_total)),
            ("beta", fmt_f64(self.beta)),
            (
                "energies",
                format!("{},{},{},{}", fmt_f64(e0), fmt_f64(e1), fmt_f64(e2), fmt_f64(e3)),
            ),
            ("work_function", fmt_f64(self.work_function)),
        ])
    }

    /// Parses and validates a document produced by [`Self::to_kv`] (or written
    /// by hand). Unknown keys are an error.
    pub fn from_kv(text: &str) -> Result<Self, ModelError> {
        Self::from_kv_doc(&KvDoc::parse(text)?)
    }

    pub fn from_kv_doc(doc: &KvDoc) -> Result<Self, ModelError> {
        doc.check_known(&PARAM_KEYS)?;
        let energies_raw = doc.require("energies")?;
        let parts: Vec<&str> = energies_raw.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(KvError::BadValue {
                key: "energies".into(),
                value: energies_raw.into(),
                expected: "four comma-separated numbers E0,E1,E2,E3",
            }
            .into());
        }
        let mut e = [0.0; 4];
        for (slot, part) in e.iter_mut().zip(&parts) {
            *slot = part.parse().map_err(|_| KvError::BadValue {
                key: "energies".into(),
                value: energies_raw.into(),
                expected: "four comma-separated numbers E0,E1,E2,E3",
            })?;
        }
        SystemParams {
            w_p: doc.f64("w_p")?,
            tau_1: doc.f64("tau_1")?,
            tau_3: doc.f64("tau_3")?,
            tau_sp: doc.f64("tau_sp")?,
            gamma_a: doc.f64("gamma_A")?,
            n_total: doc.f64("n_total")?,
            beta: doc.f64("beta")?,
            energies: LevelEnergies::new(e[0], e[1], e[2], e[3]),
            work_function: doc.f64("work_function")?,
        }
        .validated()
    }
}

/// The five populations at one instant: levels 0-3 plus the emitted-electron
/// reservoir. Along a trajectory of the closed system their sum is conserved.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PopulationState {
    pub n0: f64,
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
    pub n_a: f64,
}

impl PopulationState {
    pub fn new(n0: f64, n1: f64, n2: f64, n3: f64, n_a: f64) -> Self {
        Self { n0, n1, n2, n3, n_a }
    }

    /// Everything in the ground level; the usual initial condition.
    pub fn all_in_ground(n_total: f64) -> Self {
        Self::new(n_total, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn total(&self) -> f64 {
        self.n0 + self.n1 + self.n2 + self.n3 + self.n_a
    }

    /// Population still inside the four-level system (reservoir excluded).
    pub fn four_level_total(&self) -> f64 {
        self.n0 + self.n1 + self.n2 + self.n3
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, value) in [
            ("n0", self.n0),
            ("n1", self.n1),
            ("n2", self.n2),
            ("n3", self.n3),
            ("n_a", self.n_a),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(ModelError::BadPopulation { field, value });
            }
        }
        Ok(())
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.n0, self.n1, self.n2, self.n3, self.n_a]
    }

    pub fn from_array(y: [f64; 5]) -> Self {
        Self::new(y[0], y[1], y[2], y[3], y[4])
    }
}

/// Instantaneous Auger photocurrent J = (beta/2) * gamma_A * N2^2, in
/// population per second. Half of each collision pair is emitted and a
/// fraction `beta` of those tunnel out.
pub fn instantaneous_current(state: &PopulationState, params: &SystemParams) -> f64 {
    0.5 * params.beta * params.gamma_a * state.n2 * state.n2
}

/// Inputs of the empirical Fowler–Nordheim transmission model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FowlerNordheimParams {
    /// Prefactor `a` (transmission per field squared).
    pub prefactor: f64,
    /// Barrier constant `b` (field units).
    pub barrier: f64,
    /// Applied field `F` (field units).
    pub field: f64,
}

impl FowlerNordheimParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.prefactor.is_finite() || self.prefactor <= 0.0 {
            return Err(ModelError::NonPositive {
                field: "prefactor",
                value: self.prefactor,
            });
        }
        if !self.barrier.is_finite() || self.barrier <= 0.0 {
            return Err(ModelError::NonPositive {
                field: "barrier",
                value: self.barrier,
            });
        }
        if !self.field.is_finite() || self.field < 0.0 {
            return Err(ModelError::NegativePump { value: self.field });
        }
        Ok(())
    }
}

/// Transmission coefficient beta = a F^2 exp(-b/F), clamped to [0, 1].
/// Returns 0 at F = 0 (the limit of the expression).
pub fn fn_transmission(fn_params: &FowlerNordheimParams) -> f64 {
    if fn_params.field == 0.0 {
        return 0.0;
    }
    let raw = fn_params.prefactor
        * fn_params.field
        * fn_params.field
        * (-fn_params.barrier / fn_params.field).exp();
    raw.clamp(0.0, 1.0)
}

#[cfg(test)]
pub(crate) fn test_params() -> SystemParams {
    SystemParams {
        w_p: 1e3,
        tau_1: 1e-7,
        tau_3: 1e-7,
        tau_sp: 1e-3,
        gamma_a: 1e-9,
        n_total: 1e10,
        beta: 0.1,
        energies: LevelEnergies::new(0.0, 1.0, 2.0, 3.0),
        work_function: 3.5,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn accepts_laser_scale_parameters() {
        assert!(test_params().validate().is_ok());
    }

    #[test]
    fn rejects_work_function_below_window() {
        let p = SystemParams {
            work_function: 2.5,
            ..test_params()
        };
        match p.validate() {
            Err(ModelError::WorkFunctionOutOfWindow {
                e3,
                work_function,
                twice_e2,
            }) => {
                assert_eq!(e3, 3.0);
                assert_eq!(work_function, 2.5);
                assert_eq!(twice_e2, 4.0);
            }
            other => panic!("expected window error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_work_function_above_window() {
        let p = SystemParams {
            work_function: 4.5,
            ..test_params()
        };
        assert!(matches!(
            p.validate(),
            Err(ModelError::WorkFunctionOutOfWindow { .. })
        ));
    }

    #[test]
    fn rejects_zero_auger_coefficient() {
        let p = SystemParams {
            gamma_a: 0.0,
            ..test_params()
        };
        assert!(matches!(
            p.validate(),
            Err(ModelError::NonPositive {
                field: "gamma_A",
                ..
            })
        ));
    }

    #[test]
    fn rejects_negative_pump_and_bad_beta() {
        assert!(matches!(
            SystemParams { w_p: -1.0, ..test_params() }.validate(),
            Err(ModelError::NegativePump { .. })
        ));
        assert!(matches!(
            SystemParams { beta: 1.5, ..test_params() }.validate(),
            Err(ModelError::BetaOutOfRange { .. })
        ));
        assert!(matches!(
            SystemParams { beta: f64::NAN, ..test_params() }.validate(),
            Err(ModelError::BetaOutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_bad_energies() {
        let mut p = test_params();
        p.energies = LevelEnergies::new(0.5, 1.0, 2.0, 3.0);
        assert!(matches!(p.validate(), Err(ModelError::GroundLevelNonzero { .. })));
        p.energies = LevelEnergies::new(0.0, 2.0, 1.0, 3.0);
        assert!(matches!(p.validate(), Err(ModelError::EnergiesNotOrdered { .. })));
    }

    #[test]
    fn validation_is_idempotent() {
        let p = test_params().validated().unwrap();
        assert_eq!(p.validated().unwrap(), test_params());
    }

    #[test]
    fn current_vanishes_with_empty_metastable_level() {
        let state = PopulationState::all_in_ground(1e10);
        assert_eq!(instantaneous_current(&state, &test_params()), 0.0);
    }

    #[test]
    fn current_hand_values() {
        let mut p = test_params();
        p.beta = 1.0;
        p.gamma_a = 1.0;
        let s = PopulationState::new(0.0, 0.0, 2.0, 0.0, 0.0);
        assert_eq!(instantaneous_current(&s, &p), 2.0);

        // (1/2) * 0.5 * 2e-3 * 100^2 = 5
        p.beta = 0.5;
        p.gamma_a = 2e-3;
        let s = PopulationState::new(0.0, 0.0, 100.0, 0.0, 0.0);
        assert_relative_eq!(instantaneous_current(&s, &p), 5.0, max_relative = 1e-15);
    }

    #[test]
    fn fn_transmission_limits() {
        let f0 = FowlerNordheimParams {
            prefactor: 1.0,
            barrier: 1.0,
            field: 0.0,
        };
        assert_eq!(fn_transmission(&f0), 0.0);

        let f1 = FowlerNordheimParams {
            prefactor: 1.0,
            barrier: 1.0,
            field: 1.0,
        };
        assert_relative_eq!(fn_transmission(&f1), (-1.0f64).exp(), max_relative = 1e-15);

        // 10 * 100 * exp(-0.1) >> 1 clamps to 1
        let f2 = FowlerNordheimParams {
            prefactor: 10.0,
            barrier: 1.0,
            field: 10.0,
        };
        assert_eq!(fn_transmission(&f2), 1.0);
    }

    #[test]
    fn population_state_rejects_negative_components() {
        let s = PopulationState::new(1.0, -0.1, 0.0, 0.0, 0.0);
        assert!(matches!(
            s.validate(),
            Err(ModelError::BadPopulation { field: "n1", .. })
        ));
    }

    #[test]
    fn params_kv_round_trip() {
        let p = test_params();
        let back = SystemParams::from_kv(&p.to_kv()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn params_kv_unknown_key_rejected() {
        let mut text = test_params().to_kv();
        text.push_str("mystery = 1\n");
        let err = SystemParams::from_kv(&text).unwrap_err();
        assert!(err.to_string().contains("mystery"));
    }

    #[test]
    fn params_kv_missing_key_rejected() {
        let text = test_params()
            .to_kv()
            .lines()
            .filter(|l| !l.starts_with("beta"))
            .collect::<Vec<_>>()
            .join("\n");
        let err = SystemParams::from_kv(&text).unwrap_err();
        assert!(err.to_string().contains("beta"));
    }

    proptest! {
        // J scales quadratically in n2; exact for power-of-two factors.
        #[test]
        fn current_scales_quadratically(
            n2 in 1e-6f64..1e12,
            exp in -20i32..20,
        ) {
            let k = (2.0f64).powi(exp);
            let p = test_params();
            let j1 = instantaneous_current(&PopulationState::new(0.0, 0.0, n2, 0.0, 0.0), &p);
            let jk = instantaneous_current(&PopulationState::new(0.0, 0.0, k * n2, 0.0, 0.0), &p);
            prop_assert_eq!(jk, k * k * j1);
        }

        #[test]
        fn current_scales_quadratically_general(
            n2 in 1e-6f64..1e10,
            k in 1e-3f64..1e3,
        ) {
            let p = test_params();
            let j1 = instantaneous_current(&PopulationState::new(0.0, 0.0, n2, 0.0, 0.0), &p);
            let jk = instantaneous_current(&PopulationState::new(0.0, 0.0, k * n2, 0.0, 0.0), &p);
            prop_assert!((jk - k * k * j1).abs() <= 1e-12 * jk.abs());
        }

        #[test]
        fn fn_transmission_monotone_in_field(
            a in 1e-6f64..1e3,
            b in 1e-3f64..1e3,
            f1 in 1e-6f64..1e4,
            factor in 1.0f64..100.0,
        ) {
            let lo = fn_transmission(&FowlerNordheimParams { prefactor: a, barrier: b, field: f1 });
            let hi = fn_transmission(&FowlerNordheimParams { prefactor: a, barrier: b, field: f1 * factor });
            prop_assert!(hi >= lo);
            prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
    }
}
