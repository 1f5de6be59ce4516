//! Adaptive Dormand–Prince 5(4) integration of linear, time-independent
//! complex systems `ẏ = f(y)`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-12,
        }
    }
}

const MAX_STEPS: usize = 5_000_000;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for &(w, k) in terms {
            if w != 0.0 {
                acc += k[i] * w;
            }
        }
        *o = y[i] + acc * h;
    }
}

/// Integrates from `t = 0` and hands the state to `observe` at each of the
/// non-decreasing, non-negative `times`. Steps are shortened to land on
/// every requested time exactly.
pub fn integrate<F, O>(mut f: F, y0: &[C64], times: &[f64], tol: Tolerances, mut observe: O) -> Result<()>
where
    F: FnMut(&[C64], &mut [C64]),
    O: FnMut(usize, &[C64]),
{
    if let Some(bad) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidParameter {
            field: "t",
            reason: format!("time {bad} must be finite and non-negative"),
        });
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter {
            field: "t",
            reason: "output times must be non-decreasing".into(),
        });
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = 0.0_f64;
    let zero = C64::new(0.0, 0.0);
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut ynew = vec![zero; n];

    f(&y, &mut k1);
    let scale_norm = |v: &[C64], y: &[C64]| -> f64 {
        let s: f64 = v
            .iter()
            .zip(y)
            .map(|(a, b)| (a.norm() / (tol.atol + tol.rtol * b.norm())).powi(2))
            .sum();
        (s / n.max(1) as f64).sqrt()
    };
    let d0 = scale_norm(&y, &y);
    let d1 = scale_norm(&k1, &y);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let mut steps = 0usize;

    for (idx, &target) in times.iter().enumerate() {
        while t < target {
            if steps >= MAX_STEPS {
                return Err(Error::Integration {
                    last_good_time: t,
                    reason: format!("step budget of {MAX_STEPS} exhausted"),
                });
            }
            let remaining = target - t;
            let landing = h >= remaining;
            let hs = if landing { remaining } else { h };
            if hs < 1e-14 * t.max(1.0) && !landing {
                return Err(Error::Integration {
                    last_good_time: t,
                    reason: format!("step size underflow (h = {hs:e})"),
                });
            }

            combine(&mut tmp, &y, hs, &[(A21, &k1)]);
            f(&tmp, &mut k2);
            combine(&mut tmp, &y, hs, &[(A31, &k1), (A32, &k2)]);
            f(&tmp, &mut k3);
            combine(&mut tmp, &y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            f(&tmp, &mut k4);
            combine(&mut tmp, &y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            f(&tmp, &mut k5);
            combine(
                &mut tmp,
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            f(&tmp, &mut k6);
            combine(
                &mut ynew,
                &y,
                hs,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            );
            f(&ynew, &mut k7);

            let mut err = 0.0;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
                let sc = tol.atol + tol.rtol * y[i].norm().max(ynew[i].norm());
                err += (e.norm() / sc).powi(2);
            }
            let err = (err / n.max(1) as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::Integration {
                    last_good_time: t,
                    reason: "non-finite error estimate".into(),
                });
            }
            steps += 1;
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = if landing { target } else { t + hs };
                std::mem::swap(&mut y, &mut ynew);
                std::mem::swap(&mut k1, &mut k7);
                // A step shortened only to hit the grid says little about
                // the natural step size.
                if !landing || hs >= h {
                    h = hs * factor;
                }
            } else {
                h = hs * factor.min(1.0);
            }
        }
        observe(idx, &y);
    }
    Ok(())
}
