//! Ideal flux-charge memristor with linear dopant drift.
//!
//! The constitutive law dphi = M dq is realized with a bounded internal
//! state variable w in [0, depth]:
//!
//!   M(w) = r_on * (w/depth) + r_off * (1 - w/depth)
//!   dw/dt = mobility * (r_on/depth) * i(t),  hard-clamped at the bounds
//!
//! Hard clamping (rather than a smooth window) keeps the charge-linearity
//! of the update exact while unclamped, which the tests rely on.

use crate::error::{Error, Result};
use crate::num::Real;
use crate::waveform::WaveformSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemristorParams<S> {
    /// Fully-on resistance (ohm).
    pub r_on: S,
    /// Fully-off resistance (ohm).
    pub r_off: S,
    /// State-variable full scale (m).
    pub depth: S,
    /// Dopant mobility (m^2 s^-1 V^-1).
    pub mobility: S,
}

impl<S: Real> MemristorParams<S> {
    pub fn new(r_on: S, r_off: S, depth: S, mobility: S) -> Result<Self> {
        let p = MemristorParams {
            r_on,
            r_off,
            depth,
            mobility,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.r_on, "r_on"),
            (self.r_off, "r_off"),
            (self.depth, "depth"),
            (self.mobility, "mobility"),
        ] {
            if !v.is_finite() || v <= S::zero() {
                return Err(Error::Config(format!(
                    "memristor {name} must be finite and > 0, got {v}"
                )));
            }
        }
        if self.r_on >= self.r_off {
            return Err(Error::Config(format!(
                "memristor requires r_on < r_off, got r_on={} r_off={}",
                self.r_on, self.r_off
            )));
        }
        Ok(())
    }

    /// Test/CLI default device: 100 ohm .. 16 kohm over a 10 nm film.
    pub fn default_device() -> Self {
        MemristorParams {
            r_on: S::of(100.0),
            r_off: S::of(16e3),
            depth: S::of(10e-9),
            mobility: S::of(1e-14),
        }
    }
}

/// Flux-charge state record. `w` is the dopant-front position, `q` and
/// `phi` the running charge and flux integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemristorState<S> {
    pub w: S,
    pub q: S,
    pub phi: S,
}

impl<S: Real> MemristorState<S> {
    pub fn at_fraction(params: &MemristorParams<S>, fraction: S) -> Self {
        MemristorState {
            w: params.depth * fraction.max(S::zero()).min(S::one()),
            q: S::zero(),
            phi: S::zero(),
        }
    }
}

/// Instantaneous memristance M(w) in [r_on, r_off].
pub fn memristance<S: Real>(params: &MemristorParams<S>, state: &MemristorState<S>) -> S {
    let frac = (state.w / params.depth).max(S::zero()).min(S::one());
    params.r_on * frac + params.r_off * (S::one() - frac)
}

/// Advance the device one step under a given current.
pub fn step_memristor<S: Real>(
    params: &MemristorParams<S>,
    state: &MemristorState<S>,
    current: S,
    dt: S,
) -> Result<MemristorState<S>> {
    if !current.is_finite() {
        return Err(Error::RejectedInput(format!("non-finite current {current}")));
    }
    if !dt.is_finite() || dt <= S::zero() {
        return Err(Error::RejectedInput(format!("dt must be finite and > 0, got {dt}")));
    }
    let dq = current * dt;
    let m = memristance(params, state);
    let w = (state.w + params.mobility * (params.r_on / params.depth) * dq)
        .max(S::zero())
        .min(params.depth);
    Ok(MemristorState {
        w,
        q: state.q + dq,
        phi: state.phi + m * dq,
    })
}

/// One sample of an I-V sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvSample<S> {
    pub t: S,
    pub v: S,
    pub i: S,
    pub m: S,
}

/// Drive the device with a voltage waveform and record (v, i, M) each step.
///
/// The device is voltage-driven: i = v / M(w) with M evaluated at the start
/// of each step, then the state advances under that current.
pub fn iv_sweep<S: Real>(
    params: &MemristorParams<S>,
    initial: &MemristorState<S>,
    drive: &WaveformSpec<S>,
    dt: S,
    duration: S,
) -> Result<Vec<IvSample<S>>> {
    if !dt.is_finite() || dt <= S::zero() {
        return Err(Error::RejectedInput(format!("dt must be finite and > 0, got {dt}")));
    }
    if !duration.is_finite() || duration <= S::zero() {
        return Err(Error::RejectedInput("sweep duration must be finite and > 0".into()));
    }
    drive.validate()?;
    if !drive.peak().is_finite() {
        return Err(Error::RejectedInput("drive amplitude not finite".into()));
    }
    let steps = (duration / dt).to_f64_lossy().floor() as usize;
    let mut state = *initial;
    let mut out = Vec::with_capacity(steps);
    for k in 0..steps {
        let t = S::from_usize(k).unwrap() * dt;
        let v = drive.value(t);
        let m = memristance(params, &state);
        let i = v / m;
        out.push(IvSample { t, v, i, m });
        state = step_memristor(params, &state, i, dt)?;
    }
    Ok(out)
}

/// Signed shoelace area of the sampled (v, i) loop. The magnitude is the
/// enclosed lobe area of the hysteresis curve.
pub fn loop_area<S: Real>(samples: &[IvSample<S>]) -> S {
    if samples.len() < 3 {
        return S::zero();
    }
    let half = S::of(0.5);
    let mut acc = S::zero();
    for k in 0..samples.len() {
        let a = &samples[k];
        let b = &samples[(k + 1) % samples.len()];
        acc += a.v * b.i - b.v * a.i;
    }
    (half * acc).abs()
}

/// Largest |i| over samples where |v| <= v_eps; the pinch residual of the
/// hysteresis loop at the origin.
pub fn pinch_residual<S: Real>(samples: &[IvSample<S>], v_eps: S) -> S {
    samples
        .iter()
        .filter(|s| s.v.abs() <= v_eps)
        .map(|s| s.i.abs())
        .fold(S::zero(), |a, b| a.max(b))
}

/// Write sweep samples as `t,v,i,m` CSV.
pub fn write_iv_csv<S: Real, W: std::io::Write>(mut w: W, samples: &[IvSample<S>]) -> Result<()> {
    writeln!(w, "t,v,i,m")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{},{}",
            s.t.to_f64_lossy(),
            s.v.to_f64_lossy(),
            s.i.to_f64_lossy(),
            s.m.to_f64_lossy()
        )?;
    }
    Ok(())
}
