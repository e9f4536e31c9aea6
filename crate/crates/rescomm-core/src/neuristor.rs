//! Two-channel Mott-memristor neuristor circuit.
//!
//! Circuit reconstruction (the source topology gives the element list but
//! no values):
//!
//! - Channel 1: node `v_c1` with C1 to ground, Mott device M1 to ground,
//!   fed from `v_bias1 + v_in` through `r_load1`. The stimulus is
//!   superimposed on the channel-1 supply.
//! - Channel 2: node `v_c2`, same arrangement with `v_bias2` (opposite
//!   polarity) through `r_load2`.
//! - `c_couple` joins the two channel nodes so the fast collapse edge of
//!   channel 1 fires channel 2.
//! - Output: `r_out`/`c_out` low-pass tap of node 2; `v_out` is the axon
//!   terminal voltage.
//!
//! Each Mott device is a first-order hysteretic two-phase conductor: the
//! phase fraction x relaxes toward 1 when the channel voltage magnitude
//! reaches `v_on`, toward 0 when it falls to `v_hold`, and holds in
//! between; conductance interpolates 1/R(x) = x/r_met + (1-x)/r_ins.
//!
//! Excitation sequence with the default cell: the input lifts `v_c1` past
//! `v_on`, M1 switches metallic and node 1 collapses; the collapse couples
//! through `c_couple`, drives `|v_c2|` past `v_on`, M2 fires and node 2
//! snaps toward ground, producing the all-or-nothing output swing. Both
//! devices drop below `v_hold` after firing and reset; the bias feeds
//! recharge the nodes over the recovery RC, which is the refractory
//! period.

use crate::error::{Error, Result};
use crate::num::Real;
use crate::rk4::rk4_step;
use crate::trace::TraceRecorder;
use crate::waveform::WaveformSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MottChannelParams<S> {
    /// Insulating phase resistance (ohm).
    pub r_ins: S,
    /// Metallic phase resistance (ohm).
    pub r_met: S,
    /// Insulator -> metal switching threshold (V).
    pub v_on: S,
    /// Metal -> insulator drop-out threshold (V).
    pub v_hold: S,
    /// First-order relaxation constant (s).
    pub tau_switch: S,
}

impl<S: Real> MottChannelParams<S> {
    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.r_ins, "r_ins"),
            (self.r_met, "r_met"),
            (self.v_on, "v_on"),
            (self.v_hold, "v_hold"),
            (self.tau_switch, "tau_switch"),
        ] {
            if !v.is_finite() || v <= S::zero() {
                return Err(Error::Config(format!(
                    "mott channel {name} must be finite and > 0, got {v}"
                )));
            }
        }
        if self.r_met >= self.r_ins {
            return Err(Error::Config("mott channel requires r_met < r_ins".into()));
        }
        if self.v_hold >= self.v_on {
            return Err(Error::Config("mott channel requires v_hold < v_on".into()));
        }
        Ok(())
    }

    pub fn default_channel() -> Self {
        MottChannelParams {
            r_ins: S::of(100e3),
            r_met: S::of(1e3),
            v_on: S::of(1.0),
            v_hold: S::of(0.3),
            tau_switch: S::of(1e-6),
        }
    }

    /// Conductance at phase fraction x.
    pub fn conductance(&self, x: S) -> S {
        let x = x.max(S::zero()).min(S::one());
        x / self.r_met + (S::one() - x) / self.r_ins
    }

    /// Committed switching mode after observing channel voltage v: latches
    /// on at `v_on`, off at `v_hold`, holds in the hysteresis band. The
    /// latch is what makes switching regenerative; a target tied to the
    /// instantaneous voltage alone would stall in a sliding equilibrium at
    /// `v_on` and never produce the all-or-nothing collapse.
    fn mode_after(&self, v_channel: S, mode: bool) -> bool {
        let mag = v_channel.abs();
        if mag >= self.v_on {
            true
        } else if mag <= self.v_hold {
            false
        } else {
            mode
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuristorParams<S> {
    pub ch1: MottChannelParams<S>,
    pub ch2: MottChannelParams<S>,
    /// Channel capacitances (F).
    pub c1: S,
    pub c2: S,
    /// Opposite-polarity dc bias sources (V).
    pub v_bias1: S,
    pub v_bias2: S,
    /// Bias feed resistors (ohm).
    pub r_load1: S,
    pub r_load2: S,
    /// Inter-channel coupling capacitance (F).
    pub c_couple: S,
    /// Output tap (ohm, F).
    pub r_out: S,
    pub c_out: S,
}

impl<S: Real> NeuristorParams<S> {
    pub fn validate(&self) -> Result<()> {
        self.ch1.validate()?;
        self.ch2.validate()?;
        for (v, name) in [
            (self.c1, "c1"),
            (self.c2, "c2"),
            (self.c_couple, "c_couple"),
            (self.c_out, "c_out"),
            (self.r_load1, "r_load1"),
            (self.r_load2, "r_load2"),
            (self.r_out, "r_out"),
        ] {
            if !v.is_finite() || v <= S::zero() {
                return Err(Error::Config(format!(
                    "neuristor {name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !self.v_bias1.is_finite() || !self.v_bias2.is_finite() {
            return Err(Error::Config("neuristor bias voltages must be finite".into()));
        }
        if self.v_bias1 == S::zero()
            || self.v_bias2 == S::zero()
            || (self.v_bias1 > S::zero()) == (self.v_bias2 > S::zero())
        {
            return Err(Error::Config(
                "neuristor bias sources must have opposite polarity".into(),
            ));
        }
        Ok(())
    }

    /// Default cell: spikes in the microsecond regime.
    pub fn default_cell() -> Self {
        NeuristorParams {
            ch1: MottChannelParams::default_channel(),
            ch2: MottChannelParams::default_channel(),
            c1: S::of(1e-9),
            c2: S::of(1e-9),
            v_bias1: S::of(1.2),
            v_bias2: S::of(-1.2),
            r_load1: S::of(50e3),
            r_load2: S::of(30e3),
            c_couple: S::of(0.5e-9),
            r_out: S::of(10e3),
            c_out: S::of(100e-12),
        }
    }

    /// Largest admissible integration step: a tenth of the fastest time
    /// constant in the circuit.
    pub fn dt_max(&self) -> S {
        let tenth = S::of(0.1);
        let c1 = self.c1 + self.c_couple;
        let c2 = self.c2 + self.c_couple;
        let fastest = self
            .ch1
            .tau_switch
            .min(self.ch2.tau_switch)
            .min(self.ch1.r_met * c1)
            .min(self.ch2.r_met * c2)
            .min(self.r_out * self.c_out);
        fastest * tenth
    }

    /// Default integration step used by the CLI and tests.
    pub fn default_dt(&self) -> S {
        self.dt_max() * S::of(0.2)
    }

    /// Spike detection level as excursion of v_out above its rest value.
    pub fn detect_excursion(&self) -> S {
        S::of(0.5) * self.v_bias1.abs()
    }

    /// Minimum peak separation used by the spike detector (below the
    /// physical refractory period so genuine doublets are not merged).
    pub fn detect_min_separation(&self) -> S {
        S::of(20.0) * self.ch1.tau_switch.min(self.ch2.tau_switch)
    }

    /// Observation window long enough for near-threshold latency and the
    /// recovery transient.
    pub fn observation_window(&self) -> S {
        let recovery = self.r_load1 * (self.c1 + self.c_couple)
            + self.r_load2 * (self.c2 + self.c_couple);
        S::of(6.0) * recovery
    }

    /// Standard stimulus pulse width for threshold/refractory probing: one
    /// charging time constant of the input node, so a supra-threshold pulse
    /// has time to lift the channel past `v_on`.
    pub fn standard_pulse_width(&self) -> S {
        self.r_load1 * (self.c1 + self.c_couple)
    }
}

/// Dynamic state: node voltages, Mott phase fractions and the time of the
/// most recent detected spike (if any).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuristorState<S> {
    pub v_c1: S,
    pub v_c2: S,
    pub v_out: S,
    pub x1: S,
    pub x2: S,
    /// Committed Mott switching modes (the Schmitt-trigger latches the
    /// phase fractions relax toward).
    pub mode1: bool,
    pub mode2: bool,
    pub t_last_spike: Option<S>,
}

impl<S: Real> NeuristorState<S> {
    /// Quiescent state with both devices insulating: each node sits on the
    /// bias divider against its insulating Mott; no current flows in the
    /// coupling or output capacitors.
    pub fn rest(params: &NeuristorParams<S>) -> Self {
        let g_l1 = S::one() / params.r_load1;
        let g_l2 = S::one() / params.r_load2;
        let v1 = params.v_bias1 * g_l1 / (g_l1 + params.ch1.conductance(S::zero()));
        let v2 = params.v_bias2 * g_l2 / (g_l2 + params.ch2.conductance(S::zero()));
        NeuristorState {
            v_c1: v1,
            v_c2: v2,
            v_out: v2,
            x1: S::zero(),
            x2: S::zero(),
            mode1: false,
            mode2: false,
            t_last_spike: None,
        }
    }

    fn to_vec(self) -> [S; 5] {
        [self.v_c1, self.v_c2, self.v_out, self.x1, self.x2]
    }

    fn finite(&self) -> bool {
        self.v_c1.is_finite()
            && self.v_c2.is_finite()
            && self.v_out.is_finite()
            && self.x1.is_finite()
            && self.x2.is_finite()
    }
}

/// Detected action potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeRecord<S> {
    pub t_peak: S,
    /// Excursion of v_out above its rest level at the peak (V).
    pub amplitude: S,
    /// Full width at half the peak excursion (s).
    pub width: S,
}

fn derivatives<S: Real>(
    params: &NeuristorParams<S>,
    y: &[S],
    v_in: S,
    mode1: bool,
    mode2: bool,
    dy: &mut [S],
) {
    let (v1, v2, v_out, x1, x2) = (y[0], y[1], y[2], y[3], y[4]);
    let i1 = (params.v_bias1 + v_in - v1) / params.r_load1 - v1 * params.ch1.conductance(x1);
    let i2 = (params.v_bias2 - v2) / params.r_load2 - v2 * params.ch2.conductance(x2)
        - (v2 - v_out) / params.r_out;
    // coupled node capacitances form a 2x2 mass matrix
    let c1 = params.c1 + params.c_couple;
    let c2 = params.c2 + params.c_couple;
    let cc = params.c_couple;
    let det = c1 * c2 - cc * cc;
    let target = |mode: bool| if mode { S::one() } else { S::zero() };
    dy[0] = (c2 * i1 + cc * i2) / det;
    dy[1] = (cc * i1 + c1 * i2) / det;
    dy[2] = (v2 - v_out) / (params.r_out * params.c_out);
    dy[3] = (target(mode1) - x1) / params.ch1.tau_switch;
    dy[4] = (target(mode2) - x2) / params.ch2.tau_switch;
}

/// Advance the cell one RK4 step under input voltage `v_in`.
pub fn step_neuristor<S: Real>(
    params: &NeuristorParams<S>,
    state: &NeuristorState<S>,
    v_in: S,
    dt: S,
) -> Result<NeuristorState<S>> {
    let dt_max = params.dt_max();
    if !dt.is_finite() || dt <= S::zero() || dt > dt_max {
        return Err(Error::RejectedInput(format!(
            "dt must lie in (0, {dt_max}], got {dt}"
        )));
    }
    if !state.finite() {
        return Err(Error::Integrity("neuristor state contains non-finite values".into()));
    }
    if !v_in.is_finite() {
        return Err(Error::RejectedInput(format!("non-finite input voltage {v_in}")));
    }
    let y = state.to_vec();
    // Modes are frozen during the step and re-latched from the advanced
    // node voltages; the O(dt) event quantization this introduces is the
    // documented behaviour at switching instants.
    let out = rk4_step(
        |_, y, dy| derivatives(params, y, v_in, state.mode1, state.mode2, dy),
        &y,
        S::zero(),
        dt,
    )?;
    Ok(NeuristorState {
        v_c1: out[0],
        v_c2: out[1],
        v_out: out[2],
        x1: out[3].max(S::zero()).min(S::one()),
        x2: out[4].max(S::zero()).min(S::one()),
        mode1: params.ch1.mode_after(out[0], state.mode1),
        mode2: params.ch2.mode_after(out[1], state.mode2),
        t_last_spike: state.t_last_spike,
    })
}

/// Result of a timed cell run.
#[derive(Debug, Clone)]
pub struct NeuristorRun<S> {
    /// Channels `v_c1,v_c2,v_out,x1,x2`, one row per dt.
    pub trace: TraceRecorder<S>,
    pub spikes: Vec<SpikeRecord<S>>,
    pub final_state: NeuristorState<S>,
}

/// Run the cell against an arbitrary stimulus function of time.
pub fn run_neuristor_fn<S: Real>(
    params: &NeuristorParams<S>,
    stimulus: impl Fn(S) -> S,
    dt: S,
    duration: S,
) -> Result<NeuristorRun<S>> {
    params.validate()?;
    if !duration.is_finite() || duration <= S::zero() {
        return Err(Error::RejectedInput("duration must be finite and > 0".into()));
    }
    let steps = (duration / dt).to_f64_lossy().floor() as usize;
    let mut state = NeuristorState::rest(params);
    let mut trace = TraceRecorder::new(&["v_c1", "v_c2", "v_out", "x1", "x2"], dt, S::zero())?;
    for k in 0..steps {
        let t = S::from_usize(k).unwrap() * dt;
        trace.push(vec![state.v_c1, state.v_c2, state.v_out, state.x1, state.x2])?;
        state = step_neuristor(params, &state, stimulus(t), dt)?;
    }
    let rest_out = NeuristorState::rest(params).v_out;
    let v_out = trace.column("v_out").expect("v_out channel exists");
    let spikes = detect_spikes(
        &v_out,
        dt,
        rest_out,
        params.detect_excursion(),
        params.detect_min_separation(),
    );
    if let Some(last) = spikes.last() {
        state.t_last_spike = Some(last.t_peak);
    }
    Ok(NeuristorRun {
        trace,
        spikes,
        final_state: state,
    })
}

/// Run the cell against a declarative waveform stimulus.
pub fn run_neuristor<S: Real>(
    params: &NeuristorParams<S>,
    stimulus: &WaveformSpec<S>,
    dt: S,
    duration: S,
) -> Result<NeuristorRun<S>> {
    stimulus.validate()?;
    run_neuristor_fn(params, |t| stimulus.value(t), dt, duration)
}

/// Local maxima of the output excursion above `detect_excursion`, with
/// minimum peak separation `min_separation`.
pub fn detect_spikes<S: Real>(
    v_out: &[S],
    dt: S,
    v_rest: S,
    detect_excursion: S,
    min_separation: S,
) -> Vec<SpikeRecord<S>> {
    let mut spikes: Vec<SpikeRecord<S>> = Vec::new();
    let n = v_out.len();
    let mut k = 1;
    while k + 1 < n {
        let e_prev = v_out[k - 1] - v_rest;
        let e = v_out[k] - v_rest;
        let e_next = v_out[k + 1] - v_rest;
        if e >= detect_excursion && e >= e_prev && e > e_next {
            let t_peak = S::from_usize(k).unwrap() * dt;
            // full width at half the peak excursion
            let half = e * S::of(0.5);
            let mut lo = k;
            while lo > 0 && v_out[lo - 1] - v_rest >= half {
                lo -= 1;
            }
            let mut hi = k;
            while hi + 1 < n && v_out[hi + 1] - v_rest >= half {
                hi += 1;
            }
            let width = S::from_usize(hi - lo + 1).unwrap() * dt;
            match spikes.last() {
                Some(prev) if t_peak - prev.t_peak < min_separation => {
                    // merged: keep the taller peak
                    if e > prev.amplitude {
                        let last = spikes.last_mut().unwrap();
                        last.t_peak = t_peak;
                        last.amplitude = e;
                        last.width = width;
                    }
                }
                _ => spikes.push(SpikeRecord {
                    t_peak,
                    amplitude: e,
                    width,
                }),
            }
        }
        k += 1;
    }
    spikes
}

/// Smallest step amplitude that elicits a spike within the observation
/// window, located by bisection to relative width 1e-3.
pub fn find_threshold<S: Real>(params: &NeuristorParams<S>, dt: S) -> Result<S> {
    params.validate()?;
    let window = params.observation_window();
    let spike_at = |amp: S| -> Result<bool> {
        let run = run_neuristor_fn(params, |_| amp, dt, window)?;
        Ok(!run.spikes.is_empty())
    };
    let mut hi = S::of(10.0) * params.ch1.v_on;
    if !spike_at(hi)? {
        return Err(Error::Model(format!(
            "no spike even at the upper bracket {hi} V; cell cannot fire with these parameters"
        )));
    }
    let mut lo = S::zero();
    while (hi - lo) / hi > S::of(1e-3) {
        let mid = S::of(0.5) * (lo + hi);
        if spike_at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(S::of(0.5) * (lo + hi))
}

/// Empirical refractory period: smallest separation of two standard
/// supra-threshold pulses that yields two detected spikes, by bisection.
pub fn measure_refractory<S: Real>(params: &NeuristorParams<S>, dt: S) -> Result<S> {
    let threshold = find_threshold(params, dt)?;
    let amp = S::of(2.0) * threshold;
    let width = params.standard_pulse_width();
    let window = params.observation_window();
    let spikes_for = |sep: S| -> Result<usize> {
        let pulse = move |t: S| -> S {
            let in_first = t >= S::zero() && t < width;
            let in_second = t >= sep && t < sep + width;
            if in_first || in_second {
                amp
            } else {
                S::zero()
            }
        };
        let run = run_neuristor_fn(params, pulse, dt, sep + window)?;
        Ok(run.spikes.len())
    };
    let mut hi = window;
    if spikes_for(hi)? < 2 {
        return Err(Error::Model(
            "second pulse never fires within the observation window".into(),
        ));
    }
    let mut lo = width;
    if spikes_for(lo)? >= 2 {
        return Ok(lo);
    }
    while (hi - lo) / hi > S::of(1e-2) {
        let mid = S::of(0.5) * (lo + hi);
        if spikes_for(mid)? >= 2 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Write detected spikes as `t_peak,amplitude,width` CSV.
pub fn write_spikes_csv<S: Real, W: std::io::Write>(
    mut w: W,
    spikes: &[SpikeRecord<S>],
) -> Result<()> {
    writeln!(w, "t_peak,amplitude,width")?;
    for s in spikes {
        writeln!(
            w,
            "{},{},{}",
            s.t_peak.to_f64_lossy(),
            s.amplitude.to_f64_lossy(),
            s.width.to_f64_lossy()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> NeuristorParams<f64> {
        NeuristorParams::default_cell()
    }

    fn dt() -> f64 {
        params().default_dt()
    }

    #[test]
    fn rest_is_an_equilibrium() {
        let p = params();
        let run = run_neuristor(&p, &WaveformSpec::zero(), dt(), 200e-6).unwrap();
        let rest = NeuristorState::rest(&p);
        assert!(run.spikes.is_empty());
        for row in run.trace.rows() {
            assert!((row[2] - rest.v_out).abs() < 1e-3, "v_out drifted: {}", row[2]);
        }
    }

    #[test]
    fn single_supra_threshold_pulse_gives_one_spike() {
        let p = params();
        let stim = WaveformSpec::Pulse {
            amplitude: 1.0,
            start: 10e-6,
            width: p.standard_pulse_width(),
        };
        let run = run_neuristor(&p, &stim, dt(), 600e-6).unwrap();
        assert_eq!(run.spikes.len(), 1, "spikes: {:?}", run.spikes);
        assert!(run.spikes[0].amplitude > p.detect_excursion());
        assert!(run.spikes[0].width > 0.0);
    }

    #[test]
    fn phase_fractions_stay_in_bounds() {
        let p = params();
        let stim = WaveformSpec::Sine {
            amplitude: 2.0,
            frequency: 5e3,
            phase: 0.0,
        };
        let run = run_neuristor(&p, &stim, dt(), 500e-6).unwrap();
        for row in run.trace.rows() {
            assert!((0.0..=1.0).contains(&row[3]));
            assert!((0.0..=1.0).contains(&row[4]));
        }
    }

    #[test]
    fn periodic_pulses_above_refractory_spike_once_each() {
        let p = params();
        let d = dt();
        let refractory = measure_refractory(&p, d).unwrap();
        let period = 2.5 * refractory;
        let stim = WaveformSpec::PulseTrain {
            amplitude: 1.0,
            start: 10e-6,
            width: p.standard_pulse_width(),
            period,
        };
        let duration = 4.0 * period;
        let run = run_neuristor(&p, &stim, d, duration).unwrap();
        assert_eq!(run.spikes.len(), 4, "spikes: {:?}", run.spikes);
    }

    #[test]
    fn threshold_brackets_spiking() {
        let p = params();
        let d = dt();
        let t = find_threshold(&p, d).unwrap();
        let window = p.observation_window();
        let below = run_neuristor_fn(&p, |_| 0.99 * t, d, window).unwrap();
        let above = run_neuristor_fn(&p, |_| 1.01 * t, d, window).unwrap();
        assert!(below.spikes.is_empty());
        assert!(!above.spikes.is_empty());
    }

    #[test]
    fn threshold_converges_under_dt_halving() {
        let p = params();
        let d = dt();
        let t1 = find_threshold(&p, d).unwrap();
        let t2 = find_threshold(&p, d / 2.0).unwrap();
        assert!(
            (t1 - t2).abs() / t1 < 5e-3,
            "threshold dt-sensitivity: {t1} vs {t2}"
        );
    }

    #[test]
    fn raising_v_hold_moves_threshold_monotonically() {
        // parameter sweep: the threshold varies in one direction
        // only as v_hold approaches v_on on both channels.
        let d = dt();
        let mut thresholds = Vec::new();
        // range chosen so the spike stays detectable: the output swing is
        // bounded below by |v_rest2| - v_hold
        for v_hold in [0.15, 0.225, 0.3] {
            let mut p = params();
            p.ch1.v_hold = v_hold;
            p.ch2.v_hold = v_hold;
            thresholds.push(find_threshold(&p, d).unwrap());
        }
        let tol = 2e-3 * thresholds[0];
        let increasing = thresholds.windows(2).all(|w| w[1] >= w[0] - tol);
        let decreasing = thresholds.windows(2).all(|w| w[1] <= w[0] + tol);
        assert!(
            increasing || decreasing,
            "threshold not monotone in v_hold: {thresholds:?}"
        );
    }

    #[test]
    fn sub_threshold_response_is_linear() {
        let p = params();
        let d = dt();
        let t = find_threshold(&p, d).unwrap();
        let rest = NeuristorState::rest(&p).v_out;
        let peak_for = |amp: f64| {
            let run = run_neuristor_fn(&p, |_| amp, d, 300e-6).unwrap();
            assert!(run.spikes.is_empty());
            run.trace
                .column("v_out")
                .unwrap()
                .iter()
                .map(|v| (v - rest).abs())
                .fold(0.0f64, f64::max)
        };
        let p1 = peak_for(0.25 * t);
        let p2 = peak_for(0.5 * t);
        let ratio = p2 / p1;
        assert!((ratio - 2.0).abs() / 2.0 < 0.1, "nonlinear ratio {ratio}");
    }

    #[test]
    fn all_or_nothing_amplitude() {
        let p = params();
        let d = dt();
        let t = find_threshold(&p, d).unwrap();
        let mut amps = Vec::new();
        for factor in [1.2, 1.5, 2.0, 3.0, 4.0] {
            let run = run_neuristor_fn(&p, |_| factor * t, d, p.observation_window()).unwrap();
            assert!(!run.spikes.is_empty(), "no spike at {factor}x threshold");
            amps.push(run.spikes[0].amplitude);
        }
        let mean = amps.iter().sum::<f64>() / amps.len() as f64;
        let spread = amps.iter().cloned().fold(f64::MIN, f64::max)
            - amps.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread / mean <= 0.05, "spread {spread} mean {mean} amps {amps:?}");
    }

    #[test]
    fn refractory_pair_behaviour() {
        let p = params();
        let d = dt();
        let refractory = measure_refractory(&p, d).unwrap();
        let t = find_threshold(&p, d).unwrap();
        let amp = 2.0 * t;
        let width = p.standard_pulse_width();
        let run_pair = |sep: f64| {
            let stim = move |time: f64| {
                if (time >= 0.0 && time < width) || (time >= sep && time < sep + width) {
                    amp
                } else {
                    0.0
                }
            };
            run_neuristor_fn(&p, stim, d, sep + p.observation_window())
                .unwrap()
                .spikes
                .len()
        };
        assert_eq!(run_pair(0.5 * refractory), 1);
        assert_eq!(run_pair(2.0 * refractory), 2);
    }

    #[test]
    fn step_rejects_oversized_dt() {
        let p = params();
        let s = NeuristorState::rest(&p);
        assert!(step_neuristor(&p, &s, 0.0, 2.0 * p.dt_max()).is_err());
        assert!(step_neuristor(&p, &s, f64::NAN, p.default_dt()).is_err());
    }

    #[test]
    fn same_polarity_bias_rejected() {
        let mut p = params();
        p.v_bias2 = 1.2;
        assert!(p.validate().is_err());
    }
}
