//! Nanoscale-communication reference layer.
//!
//! A small common vocabulary (message carrier, motion, perturbation,
//! specificity) that makes the two physical layers — neuristor spike
//! conduction and molecular diffusion — interchangeable behind one
//! descriptor type, plus delivery/latency/rate metrics computed from
//! timestamped send and receive logs.

use crate::diffusion::{DiffusionParams, OokLinkParams};
use crate::error::{Error, Result};
use crate::num::Real;

/// What physically carries the message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MessageCarrier {
    ResistiveSpike,
    Molecule,
}

impl MessageCarrier {
    pub fn label(self) -> &'static str {
        match self {
            MessageCarrier::ResistiveSpike => "resistive_spike",
            MessageCarrier::Molecule => "molecule",
        }
    }
}

/// How the carrier moves from sender to receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MotionType {
    CircuitConduction,
    BrownianDiffusion,
}

impl MotionType {
    pub fn label(self) -> &'static str {
        match self {
            MotionType::CircuitConduction => "circuit_conduction",
            MotionType::BrownianDiffusion => "brownian_diffusion",
        }
    }
}

/// Reference-model description of one link. `perturbation` names the
/// parameter the sender modulates; `specificity` names the receiver's
/// detection rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NanoLinkDescriptor {
    pub carrier: MessageCarrier,
    pub motion: MotionType,
    pub perturbation: String,
    pub specificity: String,
}

impl NanoLinkDescriptor {
    /// Only two carrier/motion pairings are physical: spikes conduct
    /// through circuits, molecules diffuse.
    pub fn new(
        carrier: MessageCarrier,
        motion: MotionType,
        perturbation: &str,
        specificity: &str,
    ) -> Result<Self> {
        let valid = matches!(
            (carrier, motion),
            (MessageCarrier::ResistiveSpike, MotionType::CircuitConduction)
                | (MessageCarrier::Molecule, MotionType::BrownianDiffusion)
        );
        if !valid {
            return Err(Error::Config(format!(
                "invalid carrier/motion pairing {}/{}",
                carrier.label(),
                motion.label()
            )));
        }
        Ok(NanoLinkDescriptor {
            carrier,
            motion,
            perturbation: perturbation.to_string(),
            specificity: specificity.to_string(),
        })
    }
}

/// Descriptor for a synaptic (neuristor network) edge.
pub fn describe_synapse_link() -> NanoLinkDescriptor {
    NanoLinkDescriptor::new(
        MessageCarrier::ResistiveSpike,
        MotionType::CircuitConduction,
        "set/reset output excursion amplitude",
        "membrane threshold crossing (v_threshold)",
    )
    .expect("fixed valid pairing")
}

/// Descriptor for a molecular diffusion link.
pub fn describe_diffusion_link<S: Real>(
    params: &DiffusionParams<S>,
    link: &OokLinkParams<S>,
) -> NanoLinkDescriptor {
    NanoLinkDescriptor::new(
        MessageCarrier::Molecule,
        MotionType::BrownianDiffusion,
        &format!("Q = {} molecules per emission", params.q_molecules.to_f64_lossy()),
        &format!(
            "concentration threshold {} molecules/m^3",
            link.detect_threshold.to_f64_lossy()
        ),
    )
    .expect("fixed valid pairing")
}

/// Link quality metrics from matched send/receive timestamp logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMetrics<S> {
    /// Matched receives / sends, in [0, 1].
    pub delivery_ratio: S,
    /// Mean latency over matched pairs (s); 0 when `latency_defined` is
    /// false.
    pub mean_latency: S,
    /// Whether any pair matched, i.e. whether mean_latency is meaningful.
    pub latency_defined: bool,
    /// Largest matched-delivery count in any sliding window of
    /// `rate_window`, divided by the window (1/s).
    pub peak_rate: S,
}

fn check_ordered<S: Real>(events: &[S], name: &str) -> Result<()> {
    for (i, &t) in events.iter().enumerate() {
        if !t.is_finite() {
            return Err(Error::RejectedInput(format!(
                "{name} event {i} has non-finite timestamp"
            )));
        }
        if i > 0 && t < events[i - 1] {
            return Err(Error::RejectedInput(format!(
                "{name} events must be timestamp-ordered; event {i} goes backwards"
            )));
        }
    }
    Ok(())
}

/// Compute metrics by greedy in-order matching: each sent event matches
/// the earliest unused received event inside [t_sent, t_sent +
/// latency_window]. With no sends the ratio is vacuously 1.
pub fn measure<S: Real>(
    sent: &[S],
    received: &[S],
    latency_window: S,
    rate_window: S,
) -> Result<LinkMetrics<S>> {
    check_ordered(sent, "sent")?;
    check_ordered(received, "received")?;
    for (v, name) in [(latency_window, "latency_window"), (rate_window, "rate_window")] {
        if !v.is_finite() || v <= S::zero() {
            return Err(Error::RejectedInput(format!(
                "{name} must be finite and > 0, got {v}"
            )));
        }
    }

    let mut matched_rx: Vec<S> = Vec::new();
    let mut latency_sum = S::zero();
    let mut j = 0usize;
    for &s in sent {
        while j < received.len() && received[j] < s {
            j += 1;
        }
        if j < received.len() && received[j] - s <= latency_window {
            matched_rx.push(received[j]);
            latency_sum += received[j] - s;
            j += 1;
        }
    }

    let matched = matched_rx.len();
    let delivery_ratio = if sent.is_empty() {
        S::one()
    } else {
        S::from_usize(matched).unwrap() / S::from_usize(sent.len()).unwrap()
    };
    let latency_defined = matched > 0;
    let mean_latency = if latency_defined {
        latency_sum / S::from_usize(matched).unwrap()
    } else {
        S::zero()
    };
    // densest sliding window over the matched receive times
    let mut peak_count = 0usize;
    let mut lo = 0usize;
    for hi in 0..matched {
        while matched_rx[hi] - matched_rx[lo] > rate_window {
            lo += 1;
        }
        peak_count = peak_count.max(hi - lo + 1);
    }
    let peak_rate = S::from_usize(peak_count).unwrap() / rate_window;

    Ok(LinkMetrics {
        delivery_ratio,
        mean_latency,
        latency_defined,
        peak_rate,
    })
}

/// Flat key=value report, one entry per line.
pub fn write_metrics_report<S: Real, W: std::io::Write>(
    mut w: W,
    descriptor: &NanoLinkDescriptor,
    metrics: &LinkMetrics<S>,
) -> Result<()> {
    writeln!(w, "carrier={}", descriptor.carrier.label())?;
    writeln!(w, "motion={}", descriptor.motion.label())?;
    writeln!(w, "perturbation={}", descriptor.perturbation)?;
    writeln!(w, "specificity={}", descriptor.specificity)?;
    writeln!(w, "delivery_ratio={}", metrics.delivery_ratio.to_f64_lossy())?;
    writeln!(w, "mean_latency={}", metrics.mean_latency.to_f64_lossy())?;
    writeln!(w, "latency_defined={}", metrics.latency_defined)?;
    writeln!(w, "peak_rate={}", metrics.peak_rate.to_f64_lossy())?;
    Ok(())
}

/// The same record as a JSON object (flat schema, documented in the
/// README; all keys always present).
pub fn metrics_json<S: Real>(
    descriptor: &NanoLinkDescriptor,
    metrics: &LinkMetrics<S>,
) -> String {
    format!(
        concat!(
            "{{\n",
            "  \"carrier\": \"{}\",\n",
            "  \"motion\": \"{}\",\n",
            "  \"perturbation\": \"{}\",\n",
            "  \"specificity\": \"{}\",\n",
            "  \"delivery_ratio\": {},\n",
            "  \"mean_latency\": {},\n",
            "  \"latency_defined\": {},\n",
            "  \"peak_rate\": {}\n",
            "}}"
        ),
        descriptor.carrier.label(),
        descriptor.motion.label(),
        descriptor.perturbation.replace('"', "\\\""),
        descriptor.specificity.replace('"', "\\\""),
        metrics.delivery_ratio.to_f64_lossy(),
        metrics.mean_latency.to_f64_lossy(),
        metrics.latency_defined,
        metrics.peak_rate.to_f64_lossy(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_mappings_describe_both_layers() {
        let syn = describe_synapse_link();
        assert_eq!(syn.carrier, MessageCarrier::ResistiveSpike);
        assert_eq!(syn.motion, MotionType::CircuitConduction);

        let diff = describe_diffusion_link(
            &DiffusionParams::new(1e6f64, 1e-9, 1e-6).unwrap(),
            &OokLinkParams {
                symbol_period: 1e-3,
                detect_threshold: 1e15,
                samples_per_symbol: 8,
            },
        );
        assert_eq!(diff.carrier, MessageCarrier::Molecule);
        assert_eq!(diff.motion, MotionType::BrownianDiffusion);
        assert!(diff.perturbation.contains("1000000"));
    }

    #[test]
    fn invalid_pairing_rejected() {
        assert!(NanoLinkDescriptor::new(
            MessageCarrier::ResistiveSpike,
            MotionType::BrownianDiffusion,
            "",
            ""
        )
        .is_err());
        assert!(NanoLinkDescriptor::new(
            MessageCarrier::Molecule,
            MotionType::CircuitConduction,
            "",
            ""
        )
        .is_err());
    }

    #[test]
    fn constant_shift_gives_ratio_one_and_latency_d() {
        let sent: Vec<f64> = vec![0.0, 1.0, 2.0, 3.0];
        let d = 0.25;
        let received: Vec<f64> = sent.iter().map(|t| t + d).collect();
        let m = measure(&sent, &received, 0.5, 1.0).unwrap();
        assert_eq!(m.delivery_ratio, 1.0);
        assert!(m.latency_defined);
        assert!((m.mean_latency - d).abs() < 1e-15);
    }

    #[test]
    fn empty_received_gives_zero_ratio_and_undefined_latency() {
        let m = measure(&[0.0f64, 1.0], &[], 0.5, 1.0).unwrap();
        assert_eq!(m.delivery_ratio, 0.0);
        assert!(!m.latency_defined);
        assert_eq!(m.peak_rate, 0.0);
    }

    #[test]
    fn unordered_input_rejected() {
        assert!(measure(&[1.0f64, 0.5], &[], 0.5, 1.0).is_err());
        assert!(measure(&[0.0f64], &[2.0, 1.0], 0.5, 1.0).is_err());
        assert!(measure(&[f64::NAN], &[], 0.5, 1.0).is_err());
    }

    #[test]
    fn ratio_is_monotone_in_latency_window() {
        let sent: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let received: Vec<f64> = sent.iter().map(|t| t + 0.1 * (1.0 + t)).collect();
        let mut prev = f64::INFINITY;
        for window in [2.0, 1.0, 0.5, 0.25, 0.12] {
            let m = measure(&sent, &received, window, 1.0).unwrap();
            assert!(
                m.delivery_ratio <= prev,
                "ratio grew as the window shrank at {window}"
            );
            prev = m.delivery_ratio;
        }
    }

    #[test]
    fn measure_is_time_shift_invariant() {
        let sent: Vec<f64> = vec![0.0, 0.4, 1.1, 2.0];
        let received: Vec<f64> = vec![0.2, 0.9, 1.5];
        let base = measure(&sent, &received, 0.6, 1.0).unwrap();
        for shift in [5.0, 123.456, 1e4] {
            let s: Vec<f64> = sent.iter().map(|t| t + shift).collect();
            let r: Vec<f64> = received.iter().map(|t| t + shift).collect();
            let m = measure(&s, &r, 0.6, 1.0).unwrap();
            assert_eq!(m.delivery_ratio, base.delivery_ratio);
            assert!((m.mean_latency - base.mean_latency).abs() < 1e-9);
            assert_eq!(m.peak_rate, base.peak_rate);
        }
    }

    #[test]
    fn peak_rate_counts_densest_window() {
        // bursts of 3 receives inside 0.2 s, windows of 1 s
        let sent: Vec<f64> = vec![0.0, 0.1, 0.2, 5.0];
        let received: Vec<f64> = vec![0.05, 0.15, 0.25, 5.05];
        let m = measure(&sent, &received, 0.5, 1.0).unwrap();
        assert_eq!(m.peak_rate, 3.0);
    }

    #[test]
    fn report_and_json_contain_all_keys() {
        let d = describe_synapse_link();
        let m = measure(&[0.0f64], &[0.1], 0.5, 1.0).unwrap();
        let mut buf = Vec::new();
        write_metrics_report(&mut buf, &d, &m).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for key in [
            "carrier=",
            "motion=",
            "perturbation=",
            "specificity=",
            "delivery_ratio=",
            "mean_latency=",
            "latency_defined=",
            "peak_rate=",
        ] {
            assert!(text.contains(key), "missing {key} in report:\n{text}");
        }
        let json = metrics_json(&d, &m);
        assert!(json.contains("\"delivery_ratio\": 1"));
        assert!(json.starts_with('{') && json.ends_with('}'));
    }
}
