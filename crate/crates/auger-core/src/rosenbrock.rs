//! Fourth-order Rosenbrock step with embedded third-order error estimate for
//! stiff five-component systems (Shampine's parameter set, Numerical Recipes
//! ch. 17.5). L-stable, one Jacobian and one LU factorization per step.
//!
//! The system here is autonomous, so the time-derivative stage terms of the
//! general scheme vanish.

// indexed loops match the linear-algebra notation in the tiny LU kernel
#![allow(clippy::needless_range_loop)]

pub(crate) const DIM: usize = 5;
pub(crate) type Vec5 = [f64; DIM];
pub(crate) type Mat5 = [[f64; DIM]; DIM];

const GAM: f64 = 0.25;
const A21: f64 = 1.544;
const A31: f64 = 0.9466785280815826;
const A32: f64 = 0.2557011698983284;
const A41: f64 = 3.314825187068521;
const A42: f64 = 2.896124015972201;
const A43: f64 = 0.9986419139977817;
const A51: f64 = 1.221224509226641;
const A52: f64 = 6.019134481288629;
const A53: f64 = 12.53708332932087;
const A54: f64 = -0.687886036105895;
const C21: f64 = -5.6688;
const C31: f64 = -2.430093356833875;
const C32: f64 = -0.2063599157091915;
const C41: f64 = -0.1073529058151375;
const C42: f64 = -9.594562251023355;
const C43: f64 = -20.47028614809616;
const C51: f64 = 7.496443313967647;
const C52: f64 = -10.24680431464352;
const C53: f64 = -33.99990352819905;
const C54: f64 = 11.7089089320616;
const C61: f64 = 8.083246795921522;
const C62: f64 = -7.981132988064893;
const C63: f64 = -31.52159432874371;
const C64: f64 = 16.31930543123136;
const C65: f64 = -6.058818238834054;

pub(crate) struct StepResult {
    pub y: Vec5,
    /// Difference between the embedded orders; the local error estimate.
    pub err: Vec5,
}

fn axpy(y: &Vec5, terms: &[(f64, &Vec5)]) -> Vec5 {
    let mut out = *y;
    for (c, v) in terms {
        for i in 0..DIM {
            out[i] += c * v[i];
        }
    }
    out
}

/// One trial step of size `h` from `y`. `f0 = f(y)` and `jac = J(y)` are
/// reused across retries at the same state. Returns `None` when the stage
/// matrix cannot be factored (retry with a smaller step).
pub(crate) fn try_step<F>(f: &F, y: &Vec5, f0: &Vec5, jac: &Mat5, h: f64) -> Option<StepResult>
where
    F: Fn(&Vec5) -> Vec5,
{
    // stage matrix I/(gam h) - J
    let mut a = [[0.0; DIM]; DIM];
    let diag = 1.0 / (GAM * h);
    for r in 0..DIM {
        for c in 0..DIM {
            a[r][c] = -jac[r][c];
        }
        a[r][r] += diag;
    }
    let piv = lu_factor(&mut a)?;
    let solve = |b: &Vec5| lu_solve(&a, &piv, b);

    let k1 = solve(f0);
    let ytemp = axpy(y, &[(A21, &k1)]);
    let f2 = f(&ytemp);
    let k2 = solve(&axpy(&f2, &[(C21 / h, &k1)]));

    let ytemp = axpy(y, &[(A31, &k1), (A32, &k2)]);
    let f3 = f(&ytemp);
    let k3 = solve(&axpy(&f3, &[(C31 / h, &k1), (C32 / h, &k2)]));

    let ytemp = axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
    let f4 = f(&ytemp);
    let k4 = solve(&axpy(&f4, &[(C41 / h, &k1), (C42 / h, &k2), (C43 / h, &k3)]));

    let ytemp = axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
    let f5 = f(&ytemp);
    let k5 = solve(&axpy(
        &f5,
        &[(C51 / h, &k1), (C52 / h, &k2), (C53 / h, &k3), (C54 / h, &k4)],
    ));

    let ytemp = axpy(&ytemp, &[(1.0, &k5)]);
    let f6 = f(&ytemp);
    let err = solve(&axpy(
        &f6,
        &[
            (C61 / h, &k1),
            (C62 / h, &k2),
            (C63 / h, &k3),
            (C64 / h, &k4),
            (C65 / h, &k5),
        ],
    ));
    let y_out = axpy(&ytemp, &[(1.0, &err)]);
    Some(StepResult { y: y_out, err })
}

/// In-place LU with partial pivoting; multipliers stored below the diagonal,
/// row swaps recorded per column.
pub(crate) fn lu_factor(m: &mut Mat5) -> Option<[usize; DIM]> {
    let mut piv = [0usize; DIM];
    for col in 0..DIM {
        let mut p = col;
        let mut best = m[col][col].abs();
        for r in col + 1..DIM {
            let v = m[r][col].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return None;
        }
        piv[col] = p;
        if p != col {
            m.swap(p, col);
        }
        let inv = 1.0 / m[col][col];
        for r in col + 1..DIM {
            let factor = m[r][col] * inv;
            m[r][col] = factor;
            for c in col + 1..DIM {
                m[r][c] -= factor * m[col][c];
            }
        }
    }
    Some(piv)
}

pub(crate) fn lu_solve(m: &Mat5, piv: &[usize; DIM], b: &Vec5) -> Vec5 {
    let mut x = *b;
    for col in 0..DIM {
        if piv[col] != col {
            x.swap(col, piv[col]);
        }
    }
    for r in 1..DIM {
        for c in 0..r {
            x[r] -= m[r][c] * x[c];
        }
    }
    for r in (0..DIM).rev() {
        for c in r + 1..DIM {
            x[r] -= m[r][c] * x[c];
        }
        x[r] /= m[r][r];
    }
    x
}
