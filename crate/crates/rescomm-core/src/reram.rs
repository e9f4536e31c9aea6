//! Unipolar ReRAM switching cell.
//!
//! Three-phase state machine (Virgin -> LRS <-> HRS) driven by the
//! amplitude of the applied voltage only, never its polarity. Transitions
//! are instantaneous threshold events; set and forming currents are capped
//! by the compliance current after the series-divider solve.

use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReramParams<S> {
    /// Forming voltage (V), largest threshold.
    pub v_form: S,
    /// Set voltage (V), HRS -> LRS.
    pub v_set: S,
    /// Reset voltage (V), LRS -> HRS, smallest threshold.
    pub v_reset: S,
    /// High resistance state (ohm).
    pub r_hrs: S,
    /// Low resistance state (ohm).
    pub r_lrs: S,
    /// Compliance current cap during set/forming (A).
    pub i_cc: S,
    /// Series resistor of the voltage divider (ohm).
    pub r_series: S,
}

impl<S: Real> ReramParams<S> {
    pub fn new(
        v_form: S,
        v_set: S,
        v_reset: S,
        r_hrs: S,
        r_lrs: S,
        i_cc: S,
        r_series: S,
    ) -> Result<Self> {
        let p = ReramParams {
            v_form,
            v_set,
            v_reset,
            r_hrs,
            r_lrs,
            i_cc,
            r_series,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.v_form, "v_form"),
            (self.v_set, "v_set"),
            (self.v_reset, "v_reset"),
            (self.r_hrs, "r_hrs"),
            (self.r_lrs, "r_lrs"),
            (self.i_cc, "i_cc"),
        ] {
            if !v.is_finite() || v <= S::zero() {
                return Err(Error::Config(format!(
                    "reram {name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !self.r_series.is_finite() || self.r_series < S::zero() {
            return Err(Error::Config("reram r_series must be finite and >= 0".into()));
        }
        if !(self.v_reset < self.v_set && self.v_set < self.v_form) {
            return Err(Error::Config(format!(
                "reram thresholds must satisfy v_reset < v_set < v_form, got {} / {} / {}",
                self.v_reset, self.v_set, self.v_form
            )));
        }
        if self.r_lrs >= self.r_hrs {
            return Err(Error::Config(format!(
                "reram requires r_lrs < r_hrs, got {} / {}",
                self.r_lrs, self.r_hrs
            )));
        }
        Ok(())
    }

    /// Test/CLI default cell.
    pub fn default_cell() -> Self {
        ReramParams {
            v_form: S::of(3.0),
            v_set: S::of(1.5),
            v_reset: S::of(0.8),
            r_hrs: S::of(100e3),
            r_lrs: S::of(1e3),
            i_cc: S::of(1e-3),
            r_series: S::of(500.0),
        }
    }
}

/// Switching phase. Virgin is only reachable as the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReramPhase {
    Virgin,
    Lrs,
    Hrs,
}

impl ReramPhase {
    pub fn all() -> [ReramPhase; 3] {
        [ReramPhase::Virgin, ReramPhase::Lrs, ReramPhase::Hrs]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReramCellState {
    pub phase: ReramPhase,
}

impl Default for ReramCellState {
    fn default() -> Self {
        ReramCellState {
            phase: ReramPhase::Virgin,
        }
    }
}

impl ReramCellState {
    pub fn virgin() -> Self {
        Self::default()
    }
}

/// Cell resistance in a given phase. The virgin cell is highly resistive;
/// it is modeled at r_hrs until formed.
pub fn phase_resistance<S: Real>(params: &ReramParams<S>, phase: ReramPhase) -> S {
    match phase {
        ReramPhase::Virgin | ReramPhase::Hrs => params.r_hrs,
        ReramPhase::Lrs => params.r_lrs,
    }
}

/// Apply one voltage event to the cell. Returns the new state and the
/// current flowing through cell + series resistor, compliance-capped
/// during set and forming.
pub fn step_reram<S: Real>(
    params: &ReramParams<S>,
    state: &ReramCellState,
    v_applied: S,
) -> Result<(ReramCellState, S)> {
    if !v_applied.is_finite() {
        return Err(Error::RejectedInput(format!(
            "non-finite applied voltage {v_applied}"
        )));
    }
    let mag = v_applied.abs();
    let (next, compliance_limited) = match state.phase {
        ReramPhase::Virgin => {
            if mag >= params.v_form {
                (ReramPhase::Lrs, true) // forming
            } else {
                (ReramPhase::Virgin, false)
            }
        }
        ReramPhase::Lrs => {
            if mag >= params.v_reset {
                (ReramPhase::Hrs, false) // reset
            } else {
                (ReramPhase::Lrs, false)
            }
        }
        ReramPhase::Hrs => {
            if mag >= params.v_set {
                (ReramPhase::Lrs, true) // set
            } else {
                (ReramPhase::Hrs, false)
            }
        }
    };
    let r_total = phase_resistance(params, next) + params.r_series;
    let mut i = v_applied / r_total;
    if compliance_limited && i.abs() > params.i_cc {
        i = params.i_cc * i.signum();
    }
    Ok((ReramCellState { phase: next }, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ReramParams<f64> {
        ReramParams::default_cell()
    }

    #[test]
    fn forming_puts_virgin_cell_into_lrs() {
        let p = params();
        let (s, _) = step_reram(&p, &ReramCellState::virgin(), 3.2).unwrap();
        assert_eq!(s.phase, ReramPhase::Lrs);
    }

    #[test]
    fn reset_switches_lrs_to_hrs() {
        let p = params();
        let lrs = ReramCellState {
            phase: ReramPhase::Lrs,
        };
        let (s, _) = step_reram(&p, &lrs, 0.9).unwrap();
        assert_eq!(s.phase, ReramPhase::Hrs);
    }

    #[test]
    fn polarity_does_not_matter() {
        let p = params();
        for phase in ReramPhase::all() {
            let state = ReramCellState { phase };
            for v in [0.1, 0.5, 0.8, 1.2, 1.5, 2.0, 3.0, 4.0] {
                let (pos, i_pos) = step_reram(&p, &state, v).unwrap();
                let (neg, i_neg) = step_reram(&p, &state, -v).unwrap();
                assert_eq!(pos.phase, neg.phase);
                assert_eq!(i_pos, -i_neg);
            }
        }
    }

    #[test]
    fn sub_threshold_hrs_is_a_no_op_with_divider_current() {
        let p = params();
        let hrs = ReramCellState {
            phase: ReramPhase::Hrs,
        };
        let v = 1.0; // below v_set
        let (s, i) = step_reram(&p, &hrs, v).unwrap();
        assert_eq!(s.phase, ReramPhase::Hrs);
        assert_eq!(i, v / (p.r_hrs + p.r_series));
    }

    #[test]
    fn set_and_forming_respect_compliance() {
        let p = params();
        // set from HRS: divider current 4.0/(1k + 500) = 2.67 mA > i_cc
        let hrs = ReramCellState {
            phase: ReramPhase::Hrs,
        };
        let (s, i) = step_reram(&p, &hrs, 4.0).unwrap();
        assert_eq!(s.phase, ReramPhase::Lrs);
        assert!(i <= p.i_cc);
        // forming
        let (s, i) = step_reram(&p, &ReramCellState::virgin(), 5.0).unwrap();
        assert_eq!(s.phase, ReramPhase::Lrs);
        assert!(i <= p.i_cc);
    }

    #[test]
    fn reset_current_is_not_compliance_capped() {
        let p = params();
        let lrs = ReramCellState {
            phase: ReramPhase::Lrs,
        };
        let v = 2.0; // above v_reset -> HRS; current uses post-transition resistance
        let (s, i) = step_reram(&p, &lrs, v).unwrap();
        assert_eq!(s.phase, ReramPhase::Hrs);
        assert_eq!(i, v / (p.r_hrs + p.r_series));
    }

    #[test]
    fn virgin_is_never_re_entered() {
        // exhaustive over phases x voltage grid
        let p = params();
        let grid: Vec<f64> = (0..=80).map(|k| k as f64 * 0.05).collect();
        for phase in ReramPhase::all() {
            for &v in &grid {
                for sign in [1.0, -1.0] {
                    let (next, _) = step_reram(&p, &ReramCellState { phase }, sign * v).unwrap();
                    if phase != ReramPhase::Virgin {
                        assert_ne!(next.phase, ReramPhase::Virgin);
                    }
                    // once left, a further arbitrary step still cannot return
                    if next.phase != ReramPhase::Virgin {
                        let (next2, _) = step_reram(&p, &next, sign * v).unwrap();
                        assert_ne!(next2.phase, ReramPhase::Virgin);
                    }
                }
            }
        }
    }

    #[test]
    fn threshold_ordering_enforced_at_construction() {
        assert!(ReramParams::new(1.0, 1.5, 0.8, 100e3, 1e3, 1e-3, 500.0).is_err());
        assert!(ReramParams::new(3.0, 0.5, 0.8, 100e3, 1e3, 1e-3, 500.0).is_err());
        assert!(ReramParams::new(3.0, 1.5, 0.8, 1e3, 100e3, 1e-3, 500.0).is_err());
    }

    #[test]
    fn non_finite_voltage_rejected() {
        let p = params();
        assert!(step_reram(&p, &ReramCellState::virgin(), f64::INFINITY).is_err());
    }
}
