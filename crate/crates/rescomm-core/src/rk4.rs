//! Fixed-step classical Runge-Kutta integration.
//!
//! Fixed step is deliberate: traces must be bit-identical across runs with
//! the same configuration, which adaptive stepping does not give.

use crate::error::{Error, Result};
use crate::num::Real;

/// One classical 4-stage Runge-Kutta step.
///
/// `deriv(t, y, dy)` writes dy/dt into `dy`. Returns the advanced state.
/// A non-finite derivative component aborts with the offending index.
pub fn rk4_step<S, F>(mut deriv: F, y: &[S], t: S, dt: S) -> Result<Vec<S>>
where
    S: Real,
    F: FnMut(S, &[S], &mut [S]),
{
    if !dt.is_finite() || dt <= S::zero() {
        return Err(Error::RejectedInput(format!("rk4 dt must be finite and > 0, got {dt}")));
    }
    let n = y.len();
    let mut k1 = vec![S::zero(); n];
    let mut k2 = vec![S::zero(); n];
    let mut k3 = vec![S::zero(); n];
    let mut k4 = vec![S::zero(); n];
    let mut tmp = vec![S::zero(); n];

    let half = S::of(0.5);
    let sixth = S::one() / S::of(6.0);
    let two = S::of(2.0);

    deriv(t, y, &mut k1);
    check_finite(&k1)?;
    for i in 0..n {
        tmp[i] = y[i] + half * dt * k1[i];
    }
    deriv(t + half * dt, &tmp, &mut k2);
    check_finite(&k2)?;
    for i in 0..n {
        tmp[i] = y[i] + half * dt * k2[i];
    }
    deriv(t + half * dt, &tmp, &mut k3);
    check_finite(&k3)?;
    for i in 0..n {
        tmp[i] = y[i] + dt * k3[i];
    }
    deriv(t + dt, &tmp, &mut k4);
    check_finite(&k4)?;

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(y[i] + dt * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]));
    }
    Ok(out)
}

fn check_finite<S: Real>(k: &[S]) -> Result<()> {
    for (i, v) in k.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite derivative in component {i}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_derivative_leaves_state_unchanged() {
        let y = [1.0f64, -2.0, 3.5];
        let out = rk4_step(|_, _, dy| dy.fill(0.0), &y, 0.0, 0.1).unwrap();
        assert_eq!(out, y);
    }

    #[test]
    fn exponential_matches_taylor_to_dt5() {
        // dy/dt = y, one step: local error O(dt^5)
        let lambda = 1.3f64;
        let dt = 1e-2;
        let out = rk4_step(|_, y, dy| dy[0] = lambda * y[0], &[1.0], 0.0, dt).unwrap();
        let exact = (lambda * dt).exp();
        assert!((out[0] - exact).abs() < (lambda * dt).powi(5));
    }

    #[test]
    fn harmonic_oscillator_energy_drift_bounded() {
        // y'' = -y over one period at dt = T/1000
        let period = 2.0 * std::f64::consts::PI;
        let dt = period / 1000.0;
        let mut y = vec![1.0f64, 0.0];
        let mut t = 0.0;
        for _ in 0..1000 {
            y = rk4_step(
                |_, y, dy| {
                    dy[0] = y[1];
                    dy[1] = -y[0];
                },
                &y,
                t,
                dt,
            )
            .unwrap();
            t += dt;
        }
        let energy = 0.5 * (y[0] * y[0] + y[1] * y[1]);
        assert!((energy - 0.5).abs() < 1e-12);
        assert!((y[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn non_finite_derivative_names_component() {
        let err = rk4_step(
            |_, _, dy| {
                dy[0] = 0.0;
                dy[1] = f64::NAN;
            },
            &[0.0, 0.0],
            0.0,
            0.1,
        )
        .unwrap_err();
        assert!(err.to_string().contains("component 1"));
    }

    #[test]
    fn rejects_nonpositive_dt() {
        assert!(rk4_step(|_, _, dy: &mut [f64]| dy.fill(0.0), &[0.0], 0.0, 0.0).is_err());
    }
}
