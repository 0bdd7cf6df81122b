//! Collective spectral density of the emitted electrons.
//!
//! Each of N emitters contributes an identical wavepacket launched at its own
//! ionization time t_i, so the combined spectrum is |psi(omega)|^2 times the
//! phase sum |sum_i exp(i omega t_i)|^2. Averaging over the ionization-time
//! distribution f splits that into an incoherent part proportional to N and
//! a coherent part N(N-1)|f(omega)|^2 that carries the superradiant N^2
//! scaling. Both the closed form and a seeded Monte Carlo estimate are
//! provided; the Fourier convention is f(omega) = integral dt f(t) e^{i omega t},
//! so |f(0)| = 1 for any normalized distribution.

use crate::numeric::linear_grid;
use crate::table::{fmt_f64, TextTable};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoherenceError {
    #[error("frequency {omega} is not on the sampled grid")]
    OffGrid { omega: f64 },
}

/// Distribution of ionization times. `sigma` is the scale parameter: the
/// standard deviation for `Gaussian`, the mean delay for `Exponential`, and
/// the half-width for `Uniform`. A `Delta` source fires every emitter at the
/// same instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IonizationTimeDistribution {
    Delta { t0: f64 },
    Gaussian { t0: f64, sigma: f64 },
    Exponential { t0: f64, sigma: f64 },
    Uniform { t0: f64, sigma: f64 },
}

impl IonizationTimeDistribution {
    /// Scale parameter; zero for a delta source.
    pub fn scale(&self) -> f64 {
        match *self {
            Self::Delta { .. } => 0.0,
            Self::Gaussian { sigma, .. }
            | Self::Exponential { sigma, .. }
            | Self::Uniform { sigma, .. } => sigma,
        }
    }

    /// |f(omega)|^2 of the normalized density. The location parameter only
    /// shifts the phase and drops out of the modulus.
    pub fn fourier_sq(&self, omega: f64) -> f64 {
        match *self {
            Self::Delta { .. } => 1.0,
            Self::Gaussian { sigma, .. } => (-(sigma * omega).powi(2)).exp(),
            Self::Exponential { sigma, .. } => 1.0 / (1.0 + (sigma * omega).powi(2)),
            Self::Uniform { sigma, .. } => {
                let x = sigma * omega;
                if x == 0.0 {
                    1.0
                } else {
                    let s = x.sin() / x;
                    s * s
                }
            }
        }
    }

    fn sample_with<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Delta { t0 } => t0,
            Self::Gaussian { t0, sigma } => {
                debug_assert!(sigma > 0.0);
                Normal::new(t0, sigma).expect("positive width").sample(rng)
            }
            Self::Exponential { t0, sigma } => {
                debug_assert!(sigma > 0.0);
                t0 + Exp::new(1.0 / sigma).expect("positive rate").sample(rng)
            }
            Self::Uniform { t0, sigma } => {
                debug_assert!(sigma > 0.0);
                t0 + sigma * (2.0 * rng.random::<f64>() - 1.0)
            }
        }
    }
}

/// Gaussian single-electron wavepacket of temporal width `width` centred at
/// `center`. The squared spectrum is available in closed form; the centre
/// only contributes a phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavepacket {
    pub center: f64,
    pub width: f64,
}

impl Wavepacket {
    /// |psi(omega)|^2 = 2 sigma sqrt(2 pi) exp(-2 sigma^2 omega^2) for the
    /// unit-norm packet; integrates to 1 over domega/2pi.
    pub fn spectrum_sq(&self, omega: f64) -> f64 {
        debug_assert!(self.width > 0.0);
        2.0 * self.width
            * (2.0 * std::f64::consts::PI).sqrt()
            * (-2.0 * (self.width * omega).powi(2)).exp()
    }
}

/// Sampled spectral density over a frequency grid, split into the incoherent
/// (single-emitter) and coherent (pair-interference) parts. The two parts sum
/// to `value` by construction. Monte Carlo results carry per-point standard
/// errors; single shots can have a negative coherent part (destructive
/// interference), the averaged forms cannot.
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    pub omega: Vec<f64>,
    pub value: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
    pub coherent: Vec<f64>,
    pub incoherent: Vec<f64>,
}

impl SpectralDensity {
    /// Coherent share of the density at a grid frequency, in [0, 1] for
    /// averaged densities.
    pub fn coherent_fraction(&self, omega: f64) -> Result<f64, CoherenceError> {
        let idx = self
            .omega
            .iter()
            .position(|&w| w == omega)
            .ok_or(CoherenceError::OffGrid { omega })?;
        let total = self.value[idx];
        if total == 0.0 {
            return Ok(0.0);
        }
        Ok(self.coherent[idx] / total)
    }

    /// Delimited table (omega, value, stderr, coherent, incoherent); the
    /// stderr column is zero for analytic densities.
    pub fn to_table(&self) -> String {
        let mut t = TextTable::new(vec!["omega", "value", "stderr", "coherent", "incoherent"]);
        for i in 0..self.omega.len() {
            t.push_row(vec![
                fmt_f64(self.omega[i]),
                fmt_f64(self.value[i]),
                fmt_f64(self.stderr.as_ref().map_or(0.0, |s| s[i])),
                fmt_f64(self.coherent[i]),
                fmt_f64(self.incoherent[i]),
            ]);
        }
        t.render()
    }
}

/// Default frequency grid: 256 linear points over [0, 8/sigma], where sigma
/// is the distribution scale (falling back to the wavepacket width for a
/// delta source). Covers the full coherent-to-incoherent rolloff.
pub fn default_omega_grid(
    dist: &IonizationTimeDistribution,
    wavepacket: &Wavepacket,
) -> Vec<f64> {
    let scale = if dist.scale() > 0.0 {
        dist.scale()
    } else {
        wavepacket.width
    };
    linear_grid(0.0, 8.0 / scale, 256)
}

/// Draws `n` independent ionization times; the same seed always produces the
/// same sequence.
pub fn sample_ionization_times(
    dist: &IonizationTimeDistribution,
    n: usize,
    seed: u64,
) -> Vec<f64> {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| dist.sample_with(&mut rng)).collect()
}

/// Spectral density of one concrete set of ionization times:
/// rho(omega) = |psi(omega)|^2 |sum_i e^{i omega t_i}|^2. The double sum over
/// emitter pairs collapses to the squared magnitude of a single phase sum.
pub fn spectral_density_single_shot(
    times: &[f64],
    wavepacket: &Wavepacket,
    omega_grid: &[f64],
) -> SpectralDensity {
    assert!(!times.is_empty(), "need at least one emitter");
    let n = times.len() as f64;
    let mut value = Vec::with_capacity(omega_grid.len());
    let mut coherent = Vec::with_capacity(omega_grid.len());
    let mut incoherent = Vec::with_capacity(omega_grid.len());
    for &omega in omega_grid {
        let psi_sq = wavepacket.spectrum_sq(omega);
        let phase_sq = phase_sum_sq(times, omega);
        value.push(psi_sq * phase_sq);
        incoherent.push(psi_sq * n);
        coherent.push(psi_sq * (phase_sq - n));
    }
    SpectralDensity {
        omega: omega_grid.to_vec(),
        value,
        stderr: None,
        coherent,
        incoherent,
    }
}

fn phase_sum_sq(times: &[f64], omega: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for &t in times {
        let (s, c) = (omega * t).sin_cos();
        re += c;
        im += s;
    }
    re * re + im * im
}

/// Closed-form expectation of the density over the ionization-time
/// distribution: |psi|^2 (N + N(N-1) |f(omega)|^2). `n` may be fractional
/// when it represents a mean-field population rather than a literal count.
pub fn analytic_expected_density(
    dist: &IonizationTimeDistribution,
    wavepacket: &Wavepacket,
    n: f64,
    omega_grid: &[f64],
) -> SpectralDensity {
    assert!(n >= 0.0);
    let mut value = Vec::with_capacity(omega_grid.len());
    let mut coherent = Vec::with_capacity(omega_grid.len());
    let mut incoherent = Vec::with_capacity(omega_grid.len());
    for &omega in omega_grid {
        let psi_sq = wavepacket.spectrum_sq(omega);
        let inc = psi_sq * n;
        let coh = psi_sq * n * (n - 1.0).max(0.0) * dist.fourier_sq(omega);
        incoherent.push(inc);
        coherent.push(coh);
        value.push(inc + coh);
    }
    SpectralDensity {
        omega: omega_grid.to_vec(),
        value,
        stderr: None,
        coherent,
        incoherent,
    }
}

/// Monte Carlo estimate of the expected density: `trials` independent shots
/// of `n` sampled ionization times, averaged per frequency, with standard
/// errors. Trial `k` draws from its own seeded stream (seed, k), so runs are
/// reproducible and trials could be evaluated in any order; accumulation is
/// by trial index.
pub fn monte_carlo_expected_density(
    dist: &IonizationTimeDistribution,
    wavepacket: &Wavepacket,
    n: usize,
    trials: usize,
    seed: u64,
    omega_grid: &[f64],
) -> SpectralDensity {
    assert!(n >= 1);
    assert!(trials >= 2, "standard errors need at least two trials");
    let m = omega_grid.len();
    // Welford accumulation of the phase-sum square per frequency.
    let mut mean = vec![0.0; m];
    let mut m2 = vec![0.0; m];
    let mut times = vec![0.0; n];
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        for slot in times.iter_mut() {
            *slot = dist.sample_with(&mut rng);
        }
        let count = (trial + 1) as f64;
        for (i, &omega) in omega_grid.iter().enumerate() {
            let x = phase_sum_sq(&times, omega);
            let delta = x - mean[i];
            mean[i] += delta / count;
            m2[i] += delta * (x - mean[i]);
        }
    }

    let nf = n as f64;
    let mut value = Vec::with_capacity(m);
    let mut stderr = Vec::with_capacity(m);
    let mut coherent = Vec::with_capacity(m);
    let mut incoherent = Vec::with_capacity(m);
    for (i, &omega) in omega_grid.iter().enumerate() {
        let psi_sq = wavepacket.spectrum_sq(omega);
        let sample_var = m2[i] / (trials as f64 - 1.0);
        value.push(psi_sq * mean[i]);
        stderr.push(psi_sq * (sample_var / trials as f64).sqrt());
        incoherent.push(psi_sq * nf);
        coherent.push(psi_sq * (mean[i] - nf));
    }
    SpectralDensity {
        omega: omega_grid.to_vec(),
        value,
        stderr: Some(stderr),
        coherent,
        incoherent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn packet() -> Wavepacket {
        Wavepacket {
            center: 0.0,
            width: 0.5,
        }
    }

    #[test]
    fn delta_samples_are_constant() {
        let d = IonizationTimeDistribution::Delta { t0: 3.25 };
        let times = sample_ionization_times(&d, 64, 9);
        assert!(times.iter().all(|&t| t == 3.25));
    }

    #[test]
    fn gaussian_sample_mean_is_statistically_consistent() {
        let (t0, sigma, n) = (2.0, 0.5, 100_000usize);
        let d = IonizationTimeDistribution::Gaussian { t0, sigma };
        let times = sample_ionization_times(&d, n, 1234);
        let mean = times.iter().sum::<f64>() / n as f64;
        let bound = 4.0 * sigma / (n as f64).sqrt();
        assert!(
            (mean - t0).abs() <= bound,
            "sample mean {mean} further than {bound} from {t0}"
        );
    }

    #[test]
    fn same_seed_reproduces_the_sequence() {
        let d = IonizationTimeDistribution::Exponential { t0: 0.0, sigma: 2.0 };
        assert_eq!(
            sample_ionization_times(&d, 100, 7),
            sample_ionization_times(&d, 100, 7)
        );
        assert_ne!(
            sample_ionization_times(&d, 100, 7),
            sample_ionization_times(&d, 100, 8)
        );
    }

    #[test]
    fn single_emitter_reproduces_the_wavepacket_spectrum() {
        let grid = linear_grid(0.0, 16.0, 64);
        let rho = spectral_density_single_shot(&[0.7], &packet(), &grid);
        for (i, &omega) in grid.iter().enumerate() {
            assert_relative_eq!(
                rho.value[i],
                packet().spectrum_sq(omega),
                max_relative = 1e-14
            );
            assert!(rho.coherent[i].abs() <= 1e-14 * rho.value[i].max(1e-300));
        }
    }

    #[test]
    fn aligned_times_give_n_squared() {
        let times = vec![1.5; 9];
        let grid = linear_grid(0.0, 16.0, 32);
        let rho = spectral_density_single_shot(&times, &packet(), &grid);
        for (i, &omega) in grid.iter().enumerate() {
            assert_relative_eq!(
                rho.value[i],
                81.0 * packet().spectrum_sq(omega),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn antiphase_pair_cancels() {
        let omega0 = 3.0;
        let times = [0.0, std::f64::consts::PI / omega0];
        let grid = [omega0];
        let rho = spectral_density_single_shot(&times, &packet(), &grid);
        // |1 + e^{i pi}|^2 vanishes to rounding
        assert!(rho.value[0] <= 1e-28 * packet().spectrum_sq(omega0));
    }

    #[test]
    fn analytic_delta_distribution_is_fully_coherent() {
        let d = IonizationTimeDistribution::Delta { t0: 1.0 };
        let grid = linear_grid(0.0, 10.0, 64);
        let rho = analytic_expected_density(&d, &packet(), 50.0, &grid);
        for (i, &omega) in grid.iter().enumerate() {
            assert_relative_eq!(
                rho.value[i],
                2500.0 * packet().spectrum_sq(omega),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn analytic_density_is_n_squared_at_zero_frequency() {
        let grid = [0.0, 1.0];
        for dist in [
            IonizationTimeDistribution::Delta { t0: 0.3 },
            IonizationTimeDistribution::Gaussian { t0: 0.0, sigma: 1.0 },
            IonizationTimeDistribution::Exponential { t0: 0.0, sigma: 1.0 },
            IonizationTimeDistribution::Uniform { t0: 0.0, sigma: 1.0 },
        ] {
            for n in [1.0, 2.0, 10.0, 100.0, 1e4] {
                let rho = analytic_expected_density(&dist, &packet(), n, &grid);
                assert_relative_eq!(
                    rho.value[0] / packet().spectrum_sq(0.0),
                    n * n,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn analytic_gaussian_falls_to_the_incoherent_floor() {
        let sigma = 1.0;
        let d = IonizationTimeDistribution::Gaussian { t0: 0.0, sigma };
        let omega = 12.0 / sigma; // |f|^2 = e^{-144}, utterly negligible
        let rho = analytic_expected_density(&d, &packet(), 1000.0, &[omega]);
        assert_relative_eq!(
            rho.value[0],
            1000.0 * packet().spectrum_sq(omega),
            max_relative = 1e-12
        );
    }

    #[test]
    fn decomposition_always_sums_to_the_total() {
        let d = IonizationTimeDistribution::Uniform { t0: 0.5, sigma: 2.0 };
        let grid = linear_grid(0.0, 4.0, 128);
        let rho = analytic_expected_density(&d, &packet(), 12.0, &grid);
        for i in 0..grid.len() {
            assert_eq!(rho.value[i], rho.coherent[i] + rho.incoherent[i]);
            assert!(rho.value[i] >= rho.incoherent[i]); // |f|^2 >= 0
        }
    }

    #[test]
    fn monte_carlo_delta_has_zero_variance() {
        let d = IonizationTimeDistribution::Delta { t0: 0.8 };
        let grid = linear_grid(0.0, 8.0, 32);
        let rho = monte_carlo_expected_density(&d, &packet(), 6, 16, 5, &grid);
        let stderr = rho.stderr.as_ref().unwrap();
        for (i, &omega) in grid.iter().enumerate() {
            assert!(stderr[i] <= 1e-12 * rho.value[i].max(1e-300));
            assert_relative_eq!(
                rho.value[i],
                36.0 * packet().spectrum_sq(omega),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn monte_carlo_single_emitter_has_no_coherent_part() {
        let d = IonizationTimeDistribution::Gaussian { t0: 0.0, sigma: 1.0 };
        let grid = linear_grid(0.0, 8.0, 32);
        let rho = monte_carlo_expected_density(&d, &packet(), 1, 64, 11, &grid);
        for (i, &omega) in grid.iter().enumerate() {
            assert_relative_eq!(
                rho.value[i],
                packet().spectrum_sq(omega),
                max_relative = 1e-13
            );
            assert!(rho.coherent[i].abs() <= 1e-13 * rho.incoherent[i].max(1e-300));
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn monte_carlo_agrees_with_the_closed_form() {
        let sigma = 1.0;
        let d = IonizationTimeDistribution::Gaussian { t0: 0.0, sigma };
        let grid = linear_grid(0.0, 8.0 / sigma, 64);
        let n = 8;
        let rho = monte_carlo_expected_density(&d, &packet(), n, 2048, 21, &grid);
        let exact = analytic_expected_density(&d, &packet(), n as f64, &grid);
        let stderr = rho.stderr.as_ref().unwrap();
        let mut outliers = 0;
        for i in 0..grid.len() {
            let diff = (rho.value[i] - exact.value[i]).abs();
            if stderr[i] == 0.0 {
                assert!(diff == 0.0, "zero-variance point deviates");
            } else if diff > 3.0 * stderr[i] {
                outliers += 1;
            }
        }
        assert!(outliers <= 1, "{outliers} of {} points beyond 3 sigma", grid.len());
    }

    #[test]
    fn coherent_fraction_hand_values() {
        let d = IonizationTimeDistribution::Delta { t0: 0.0 };
        let grid = [0.0, 2.0];
        let one = analytic_expected_density(&d, &packet(), 1.0, &grid);
        assert_eq!(one.coherent_fraction(0.0).unwrap(), 0.0);

        let hundred = analytic_expected_density(&d, &packet(), 100.0, &grid);
        assert_relative_eq!(
            hundred.coherent_fraction(0.0).unwrap(),
            0.99,
            max_relative = 1e-13
        );

        // far tail of a narrow Gaussian: |f|^2 ~ 0 so the share collapses
        let g = IonizationTimeDistribution::Gaussian { t0: 0.0, sigma: 50.0 };
        let far = analytic_expected_density(&g, &packet(), 100.0, &[0.0, 2.0]);
        assert!(far.coherent_fraction(2.0).unwrap() < 1e-12);
    }

    #[test]
    fn coherent_fraction_rejects_off_grid_queries() {
        let d = IonizationTimeDistribution::Delta { t0: 0.0 };
        let rho = analytic_expected_density(&d, &packet(), 4.0, &[0.0, 1.0]);
        assert!(matches!(
            rho.coherent_fraction(0.5),
            Err(CoherenceError::OffGrid { .. })
        ));
    }

    #[test]
    fn default_grid_spans_the_rolloff() {
        let d = IonizationTimeDistribution::Gaussian { t0: 0.0, sigma: 2.0 };
        let grid = default_omega_grid(&d, &packet());
        assert_eq!(grid.len(), 256);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[255], 4.0);
        // delta falls back to the wavepacket width
        let grid = default_omega_grid(&IonizationTimeDistribution::Delta { t0: 0.0 }, &packet());
        assert_eq!(grid[255], 16.0);
    }

    #[test]
    fn table_columns_match_the_interface() {
        let d = IonizationTimeDistribution::Gaussian { t0: 0.0, sigma: 1.0 };
        let rho = monte_carlo_expected_density(&d, &packet(), 3, 8, 1, &[0.0, 1.0]);
        let t = TextTable::parse(&rho.to_table()).unwrap();
        assert_eq!(
            t.columns,
            vec!["omega", "value", "stderr", "coherent", "incoherent"]
        );
        assert_eq!(t.rows.len(), 2);
    }

    proptest! {
        #[test]
        fn single_shot_density_is_nonnegative(
            times in proptest::collection::vec(-1e3f64..1e3, 1..12),
            omega in 0.0f64..50.0,
        ) {
            let rho = spectral_density_single_shot(&times, &packet(), &[omega]);
            prop_assert!(rho.value[0] >= 0.0);
        }

        // The collapsed |sum e^{i omega t}|^2 must equal the explicit
        // O(N^2) pair sum.
        #[test]
        fn collapsed_sum_matches_brute_force_pairs(
            times in proptest::collection::vec(-10.0f64..10.0, 2..8),
            omega in 0.0f64..20.0,
        ) {
            let collapsed = phase_sum_sq(&times, omega);
            let mut brute = 0.0;
            for &ti in &times {
                for &tj in &times {
                    brute += (omega * (ti - tj)).cos();
                }
            }
            let n2 = (times.len() * times.len()) as f64;
            prop_assert!(
                (collapsed - brute).abs() <= 1e-12 * n2,
                "collapsed {} vs brute {}", collapsed, brute
            );
        }
    }
}
