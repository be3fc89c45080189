//! Embedded Dormand-Prince 5(4) stepper for autonomous linear complex ODEs
//! `y' = f(y)`.

use crate::error::{Error, Result};
use crate::hilbert::{C64, ZERO};

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

// b - b* (fifth minus fourth order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
}

pub(crate) struct Dopri5<F> {
    f: F,
    tol: Tolerances,
    k: [Vec<C64>; 7],
    tmp: Vec<C64>,
}

impl<F> Dopri5<F>
where
    F: FnMut(&[C64], &mut [C64]),
{
    pub fn new(dim: usize, tol: Tolerances, f: F) -> Self {
        Self {
            f,
            tol,
            k: std::array::from_fn(|_| vec![ZERO; dim]),
            tmp: vec![ZERO; dim],
        }
    }

    fn stage(&mut self, y: &[C64], h: f64, coeffs: &[f64], target: usize) {
        for (i, (t, &yi)) in self.tmp.iter_mut().zip(y).enumerate() {
            let mut acc = ZERO;
            for (j, &a) in coeffs.iter().enumerate() {
                if a != 0.0 {
                    acc += self.k[j][i] * a;
                }
            }
            *t = yi + acc * h;
        }
        let (tmp, k) = (&self.tmp, &mut self.k[target]);
        (self.f)(tmp, k);
    }

    /// Takes one step of size `h` from `y`, writing the fifth-order solution
    /// to `out`, and returns the scaled error norm (accept when ≤ 1).
    pub fn try_step(&mut self, y: &[C64], h: f64, out: &mut [C64]) -> f64 {
        {
            let k0 = &mut self.k[0];
            (self.f)(y, k0);
        }
        self.stage(y, h, &[A21], 1);
        self.stage(y, h, &[A31, A32], 2);
        self.stage(y, h, &[A41, A42, A43], 3);
        self.stage(y, h, &[A51, A52, A53, A54], 4);
        self.stage(y, h, &[A61, A62, A63, A64, A65], 5);
        for i in 0..y.len() {
            out[i] = y[i]
                + (self.k[0][i] * B1 + self.k[2][i] * B3 + self.k[3][i] * B4 + self.k[4][i] * B5 + self.k[5][i] * B6)
                    * h;
        }
        {
            let k6 = &mut self.k[6];
            (self.f)(out, k6);
        }
        let mut err = 0.0_f64;
        for i in 0..y.len() {
            let e = (self.k[0][i] * E1
                + self.k[2][i] * E3
                + self.k[3][i] * E4
                + self.k[4][i] * E5
                + self.k[5][i] * E6
                + self.k[6][i] * E7)
                * h;
            let scale = self.tol.atol + self.tol.rtol * y[i].norm().max(out[i].norm());
            let x = e.norm() / scale;
            // f64::max would drop a NaN
            if !(x <= err) {
                err = x;
            }
        }
        err
    }
}

/// Step-size update for an error norm `err` of a fifth-order method.
pub(crate) fn next_step(h: f64, err: f64) -> f64 {
    let factor = if err == 0.0 {
        5.0
    } else {
        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
    };
    h * factor
}

/// Smallest step accepted before declaring the problem too stiff.
pub(crate) fn min_step(t: f64) -> f64 {
    1e-13 * t.abs().max(1.0)
}

/// Integrates `y' = f(y)` from 0 to `t_final` in place.
pub(crate) fn integrate<F>(f: F, y: &mut Vec<C64>, t_final: f64, dt_max: f64, tol: Tolerances) -> Result<()>
where
    F: FnMut(&[C64], &mut [C64]),
{
    let mut stepper = Dopri5::new(y.len(), tol, f);
    let mut out = vec![ZERO; y.len()];
    let mut t = 0.0;
    let mut h = dt_max.min(t_final).min(0.01);
    while t < t_final {
        let remaining = t_final - t;
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let err = stepper.try_step(y, step, &mut out);
        if err.is_finite() && err <= 1.0 {
            std::mem::swap(y, &mut out);
            t = if last { t_final } else { t + step };
            h = next_step(step, err).min(dt_max);
        } else {
            h = if err.is_finite() {
                next_step(step, err)
            } else {
                0.2 * step
            };
            if h < min_step(t) {
                return Err(Error::Stiffness { t });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_and_rotation() {
        // y' = (-0.5 + 3i) y
        let rate = C64::new(-0.5, 3.0);
        let mut y = vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
        integrate(
            |y, dy| {
                for (d, v) in dy.iter_mut().zip(y) {
                    *d = rate * v;
                }
            },
            &mut y,
            4.0,
            0.5,
            Tolerances {
                atol: 1e-12,
                rtol: 1e-12,
            },
        )
        .unwrap();
        let exact = (rate * 4.0).exp();
        assert!((y[0] - exact).norm() < 1e-10);
        assert!((y[1] - exact * C64::new(0.0, 2.0)).norm() < 1e-10);
    }

    #[test]
    fn zero_generator_is_exact() {
        let mut y = vec![C64::new(0.3, -0.1); 5];
        let y0 = y.clone();
        integrate(
            |_, dy| dy.fill(ZERO),
            &mut y,
            10.0,
            1.0,
            Tolerances { atol: 1e-10, rtol: 0.0 },
        )
        .unwrap();
        assert_eq!(y, y0);
    }

    #[test]
    fn stiff_blowup_reports_underflow() {
        let mut y = vec![C64::new(1.0, 0.0)];
        let r = integrate(
            |y, dy| dy[0] = C64::new(f64::NAN, 0.0) * y[0],
            &mut y,
            1.0,
            0.1,
            Tolerances { atol: 1e-10, rtol: 0.0 },
        );
        assert!(matches!(r, Err(Error::Stiffness { .. })));
    }
}
