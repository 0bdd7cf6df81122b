//! Small numerical utilities: sampling grids, finite-difference weights on
//! arbitrary nodes, bisection, and log-log slope fitting.

/// `n` points spaced logarithmically over `[min, max]`, endpoints exact.
pub fn log_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && min > 0.0 && max > min, "log grid needs max > min > 0 and n >= 2");
    let (lmin, lmax) = (min.ln(), max.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                min
            } else if i == n - 1 {
                max
            } else {
                (lmin + (lmax - lmin) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// `n` points spaced linearly over `[min, max]`, endpoints exact.
pub fn linear_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && max > min, "linear grid needs max > min and n >= 2");
    (0..n)
        .map(|i| {
            if i == n - 1 {
                max
            } else {
                min + (max - min) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Finite-difference weights for the `m`-th derivative at `x0` from the nodes
/// `xs` (Fornberg's recurrence). Exact for polynomials of degree `xs.len()-1`.
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    assert!(n > m, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// First derivative of sampled data at interior index `i`, using a five-point
/// stencil centred as well as the ends allow. Fourth-order accurate.
pub fn derivative_five_point(ts: &[f64], ys: &[f64], i: usize) -> f64 {
    assert!(ts.len() >= 5 && ts.len() == ys.len());
    let lo = i.saturating_sub(2).min(ts.len() - 5);
    let w = fornberg_weights(ts[i], &ts[lo..lo + 5], 1);
    w.iter()
        .zip(&ys[lo..lo + 5])
        .map(|(wi, yi)| wi * yi)
        .sum()
}

/// Bisection on a bracketing interval `[lo, hi]` with `f(lo)` and `f(hi)` of
/// opposite sign. Runs until the bracket shrinks below `rel_tol` relative to
/// its midpoint.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let f_lo = f(lo);
    assert!(
        f_lo * f(hi) < 0.0,
        "bisect requires a sign change over the bracket"
    );
    let lo_negative = f_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= rel_tol * mid.abs() || mid <= lo || mid >= hi {
            return mid;
        }
        if (f(mid) < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ordinary least squares slope of `ln y` against `ln x`. All inputs must be
/// positive.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grids_hit_endpoints_exactly() {
        let g = log_grid(1e-9, 3.0, 512);
        assert_eq!(g[0], 1e-9);
        assert_eq!(g[511], 3.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let l = linear_grid(0.0, 8.0, 256);
        assert_eq!(l[0], 0.0);
        assert_eq!(l[255], 8.0);
    }

    #[test]
    fn fornberg_recovers_uniform_five_point_weights() {
        let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fornberg_weights(0.0, &xs, 1);
        let expected = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expected) {
            assert_relative_eq!(a, &b, epsilon = 1e-14);
        }
    }

    #[test]
    fn five_point_derivative_is_exact_on_quartics() {
        let ts: Vec<f64> = log_grid(0.5, 4.0, 9);
        let ys: Vec<f64> = ts.iter().map(|t| t.powi(4) - 2.0 * t + 1.0).collect();
        for i in 1..ts.len() - 1 {
            let d = derivative_five_point(&ts, &ys, i);
            assert_relative_eq!(d, 4.0 * ts[i].powi(3) - 2.0, max_relative = 1e-11);
        }
    }

    #[test]
    fn bisect_finds_sqrt_two() {
        let root = bisect(|x| x * x - 2.0, 1.0, 2.0, 1e-14);
        assert_relative_eq!(root, 2.0_f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn loglog_slope_exact_on_power_law() {
        let xs: Vec<f64> = log_grid(1e-3, 1e3, 40);
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x.powf(1.75)).collect();
        assert_relative_eq!(loglog_slope(&xs, &ys), 1.75, max_relative = 1e-12);
    }
}
