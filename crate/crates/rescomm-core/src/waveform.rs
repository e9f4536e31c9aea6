//! Stimulus waveforms shared by the device and network simulations.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::num::Real;

/// Declarative stimulus shape. All times in seconds, amplitude in the unit
/// of the quantity being driven (V or A depending on context).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WaveformSpec<S: Real> {
    /// Constant level for all t >= 0.
    Constant { amplitude: S },
    /// Zero before `start`, `amplitude` afterwards.
    Step { amplitude: S, start: S },
    /// Single rectangular pulse on [start, start + width).
    Pulse { amplitude: S, start: S, width: S },
    /// Rectangular pulses of `width` repeating every `period` from `start`.
    PulseTrain {
        amplitude: S,
        start: S,
        width: S,
        period: S,
    },
    /// amplitude * sin(2*pi*frequency*t + phase).
    Sine {
        amplitude: S,
        frequency: S,
        #[serde(default)]
        phase: S,
    },
}

impl<S: Real> WaveformSpec<S> {
    pub fn zero() -> Self {
        WaveformSpec::Constant {
            amplitude: S::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: S, name: &str| -> Result<()> {
            if !v.is_finite() {
                return Err(Error::RejectedInput(format!("waveform {name} not finite")));
            }
            Ok(())
        };
        let nonneg = |v: S, name: &str| -> Result<()> {
            finite(v, name)?;
            if v < S::zero() {
                return Err(Error::RejectedInput(format!("waveform {name} < 0")));
            }
            Ok(())
        };
        match *self {
            WaveformSpec::Constant { amplitude } => finite(amplitude, "amplitude"),
            WaveformSpec::Step { amplitude, start } => {
                finite(amplitude, "amplitude")?;
                nonneg(start, "start")
            }
            WaveformSpec::Pulse {
                amplitude,
                start,
                width,
            } => {
                finite(amplitude, "amplitude")?;
                nonneg(start, "start")?;
                nonneg(width, "width")
            }
            WaveformSpec::PulseTrain {
                amplitude,
                start,
                width,
                period,
            } => {
                finite(amplitude, "amplitude")?;
                nonneg(start, "start")?;
                nonneg(width, "width")?;
                nonneg(period, "period")?;
                if period <= width {
                    return Err(Error::RejectedInput(
                        "pulse train period must exceed width".into(),
                    ));
                }
                Ok(())
            }
            WaveformSpec::Sine {
                amplitude,
                frequency,
                phase,
            } => {
                finite(amplitude, "amplitude")?;
                nonneg(frequency, "frequency")?;
                finite(phase, "phase")
            }
        }
    }

    /// Instantaneous value at time t (t < 0 evaluates to 0).
    pub fn value(&self, t: S) -> S {
        if t < S::zero() {
            return S::zero();
        }
        match *self {
            WaveformSpec::Constant { amplitude } => amplitude,
            WaveformSpec::Step { amplitude, start } => {
                if t >= start {
                    amplitude
                } else {
                    S::zero()
                }
            }
            WaveformSpec::Pulse {
                amplitude,
                start,
                width,
            } => {
                if t >= start && t < start + width {
                    amplitude
                } else {
                    S::zero()
                }
            }
            WaveformSpec::PulseTrain {
                amplitude,
                start,
                width,
                period,
            } => {
                if t < start {
                    return S::zero();
                }
                let phase = (t - start) % period;
                if phase < width {
                    amplitude
                } else {
                    S::zero()
                }
            }
            WaveformSpec::Sine {
                amplitude,
                frequency,
                phase,
            } => {
                let two_pi = S::PI() + S::PI();
                amplitude * (two_pi * frequency * t + phase).sin()
            }
        }
    }

    /// Peak absolute level, used for bracket checks.
    pub fn peak(&self) -> S {
        match *self {
            WaveformSpec::Constant { amplitude }
            | WaveformSpec::Step { amplitude, .. }
            | WaveformSpec::Pulse { amplitude, .. }
            | WaveformSpec::PulseTrain { amplitude, .. }
            | WaveformSpec::Sine { amplitude, .. } => amplitude.abs(),
        }
    }
}
