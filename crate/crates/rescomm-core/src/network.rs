//! Directed networks of neuristor cells joined by excitatory, inhibitory
//! and modulating synapses with axonal conduction delays.
//!
//! Hybrid simulation: every cell advances with fixed-step RK4 while spike
//! deliveries travel through a discrete-event queue. The two are
//! synchronized at dt boundaries — an event scheduled at its exact
//! `t_peak + length/velocity` delivery time takes effect at the first step
//! boundary at or after it, so every latency statement carries a ±dt
//! quantization tolerance.
//!
//! Delivery semantics: an excitatory (inhibitory) event adds a rectangular
//! input pulse of level `+weight·amplitude·gain` (`−…`) to the destination
//! cell, lasting one charging time constant of that cell's input node so
//! the contribution can actually move the channel. A modulating event
//! injects nothing; it sets the destination's input gain to `weight` until
//! the gain expires after `modulation_duration`.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::events::EventQueue;
use crate::neuristor::{step_neuristor, NeuristorParams, NeuristorState};
use crate::num::Real;
use crate::trace::TraceRecorder;
use crate::waveform::WaveformSpec;

/// Fastest admissible axonal conduction velocity (m/s).
pub const MAX_VELOCITY: f64 = 150.0;

/// A network node: one neuristor cell plus its membrane-scale reporting
/// convention. `v_rest` and `v_threshold` fix the affine map from the
/// cell's output excursion to a conventional membrane potential — the
/// node reads `v_rest` at rest and exactly `v_threshold` when the
/// excursion reaches the spike-detection level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronNodeParams<S> {
    pub cell: NeuristorParams<S>,
    /// Reported membrane rest potential (V).
    pub v_rest: S,
    /// Reported membrane firing threshold (V); must exceed `v_rest`.
    pub v_threshold: S,
}

impl<S: Real> NeuronNodeParams<S> {
    pub fn validate(&self) -> Result<()> {
        self.cell.validate()?;
        if !self.v_rest.is_finite() || !self.v_threshold.is_finite() {
            return Err(Error::Config("node membrane levels must be finite".into()));
        }
        if self.v_threshold <= self.v_rest {
            return Err(Error::Config(format!(
                "node requires v_threshold > v_rest, got {} / {}",
                self.v_threshold, self.v_rest
            )));
        }
        Ok(())
    }

    /// Default node: the default cell with the conventional −70 mV rest
    /// and −55 mV firing threshold.
    pub fn default_node() -> Self {
        NeuronNodeParams {
            cell: NeuristorParams::default_cell(),
            v_rest: S::of(-70e-3),
            v_threshold: S::of(-55e-3),
        }
    }

    /// Membrane-scale report of an output sample: affine in the excursion
    /// of `v_out` above the cell's rest output, normalized so the
    /// detection level lands on `v_threshold`.
    pub fn membrane_potential(&self, v_out: S, v_out_rest: S) -> S {
        let span = self.v_threshold - self.v_rest;
        self.v_rest + span * (v_out - v_out_rest) / self.cell.detect_excursion()
    }
}

/// Synaptic transmission type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynapseKind {
    Excitatory,
    Inhibitory,
    Modulating,
}

/// Directed synapse with an axonal conduction delay of
/// `axon_length / velocity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynapseEdge<S> {
    pub src: usize,
    pub dst: usize,
    pub kind: SynapseKind,
    /// Dimensionless coupling strength (gain value for modulating edges).
    pub weight: S,
    /// Axon length (m).
    pub axon_length: S,
    /// Conduction velocity (m/s), in (0, 150].
    pub velocity: S,
}

impl<S: Real> SynapseEdge<S> {
    pub fn delay(&self) -> S {
        self.axon_length / self.velocity
    }

    fn validate(&self, node_count: usize) -> Result<()> {
        if self.src >= node_count || self.dst >= node_count {
            return Err(Error::Config(format!(
                "edge references unknown node id {} (network has {} nodes)",
                self.src.max(self.dst),
                node_count
            )));
        }
        if !self.weight.is_finite() || self.weight < S::zero() {
            return Err(Error::Config(format!(
                "edge weight must be finite and >= 0, got {}",
                self.weight
            )));
        }
        if !self.axon_length.is_finite() || self.axon_length < S::zero() {
            return Err(Error::Config(format!(
                "edge axon_length must be finite and >= 0, got {}",
                self.axon_length
            )));
        }
        if !self.velocity.is_finite()
            || self.velocity <= S::zero()
            || self.velocity > S::of(MAX_VELOCITY)
        {
            return Err(Error::Config(format!(
                "edge velocity must lie in (0, {MAX_VELOCITY}] m/s, got {}",
                self.velocity
            )));
        }
        Ok(())
    }
}

/// A spike in flight on one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeEvent<S> {
    /// Exact delivery time: emission t_peak + edge delay.
    pub t_deliver: S,
    pub edge: usize,
    /// Output excursion of the emitting cell at its peak (V).
    pub amplitude: S,
}

/// Validated network topology.
#[derive(Debug, Clone)]
pub struct Network<S> {
    node_names: Vec<String>,
    nodes: Vec<NeuronNodeParams<S>>,
    edges: Vec<SynapseEdge<S>>,
    /// How long a modulating delivery keeps the destination gain set (s).
    pub modulation_duration: S,
}

impl<S: Real> Network<S> {
    pub fn new() -> Self {
        Network {
            node_names: Vec::new(),
            nodes: Vec::new(),
            edges: Vec::new(),
            modulation_duration: S::of(200e-6),
        }
    }

    pub fn add_node(&mut self, name: &str, params: NeuronNodeParams<S>) -> Result<usize> {
        params.validate()?;
        if name.is_empty() || self.node_names.iter().any(|n| n == name) {
            return Err(Error::Config(format!(
                "node name {name:?} must be non-empty and unique"
            )));
        }
        self.node_names.push(name.to_string());
        self.nodes.push(params);
        Ok(self.nodes.len() - 1)
    }

    pub fn add_edge(&mut self, edge: SynapseEdge<S>) -> Result<usize> {
        edge.validate(self.nodes.len())?;
        self.edges.push(edge);
        Ok(self.edges.len() - 1)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NeuronNodeParams<S>] {
        &self.nodes
    }

    pub fn edges(&self) -> &[SynapseEdge<S>] {
        &self.edges
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.node_names.iter().position(|n| n == name)
    }

    /// Full validation: nodes, edges, and rejection of zero-delay cycles
    /// (including zero-delay self-loops), which would let a spike feed
    /// itself within a single instant.
    pub fn validate(&self) -> Result<()> {
        for node in &self.nodes {
            node.validate()?;
        }
        if !self.modulation_duration.is_finite() || self.modulation_duration <= S::zero() {
            return Err(Error::Config(
                "modulation_duration must be finite and > 0".into(),
            ));
        }
        let mut zero_adj: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for edge in &self.edges {
            edge.validate(self.nodes.len())?;
            if edge.delay() == S::zero() {
                zero_adj[edge.src].push(edge.dst);
            }
        }
        if let Some(node) = find_cycle(&zero_adj) {
            return Err(Error::Config(format!(
                "zero-delay cycle through node {:?}; every feedback loop needs a positive conduction delay",
                self.node_names[node]
            )));
        }
        Ok(())
    }
}

impl<S: Real> Default for Network<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// First node found on a directed cycle, if any (three-color DFS).
fn find_cycle(adj: &[Vec<usize>]) -> Option<usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    fn visit(n: usize, adj: &[Vec<usize>], color: &mut [Color]) -> Option<usize> {
        color[n] = Color::Gray;
        for &m in &adj[n] {
            match color[m] {
                Color::Gray => return Some(m),
                Color::White => {
                    if let Some(c) = visit(m, adj, color) {
                        return Some(c);
                    }
                }
                Color::Black => {}
            }
        }
        color[n] = Color::Black;
        None
    }
    let mut color = vec![Color::White; adj.len()];
    (0..adj.len()).find_map(|n| {
        if color[n] == Color::White {
            visit(n, adj, &mut color)
        } else {
            None
        }
    })
}

/// Input contribution of a delivered event at its destination. Modulating
/// deliveries inject nothing; their effect is the gain update handled by
/// the run loop.
pub fn delivery_contribution<S: Real>(kind: SynapseKind, weight: S, amplitude: S, gain: S) -> S {
    match kind {
        SynapseKind::Excitatory => weight * amplitude * gain,
        SynapseKind::Inhibitory => -(weight * amplitude * gain),
        SynapseKind::Modulating => S::zero(),
    }
}

/// Schedule one event per outgoing edge of `src` (forward-only: incoming
/// edges never see the spike). Delivery times are exact at scheduling;
/// quantization to the step grid happens only on delivery.
pub fn propagate_spike<S: Real>(
    net: &Network<S>,
    src: usize,
    t_peak: S,
    amplitude: S,
) -> Result<Vec<SpikeEvent<S>>> {
    if src >= net.node_count() {
        return Err(Error::Config(format!("unknown spiking node id {src}")));
    }
    Ok(net
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.src == src)
        .map(|(id, e)| SpikeEvent {
            t_deliver: t_peak + e.delay(),
            edge: id,
            amplitude,
        })
        .collect())
}

/// One detected action potential in the global spike log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkSpike<S> {
    pub t_peak: S,
    pub node: usize,
    /// Output excursion above the node's rest output (V).
    pub amplitude: S,
}

/// One processed delivery (at its quantized step boundary).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeliveryRecord<S> {
    /// Step boundary at which the event took effect (s).
    pub t: S,
    pub edge: usize,
    pub dst: usize,
    /// Signed input level added at dst (0 for modulating deliveries).
    pub contribution: S,
}

/// Result of a hybrid network run.
#[derive(Debug, Clone)]
pub struct NetworkRun<S> {
    /// Per-node cell traces, channels `v_c1,v_c2,v_out,x1,x2`.
    pub node_traces: Vec<TraceRecorder<S>>,
    /// Global spike log ordered by detection time.
    pub spikes: Vec<NetworkSpike<S>>,
    /// Processed deliveries in processing order.
    pub deliveries: Vec<DeliveryRecord<S>>,
    /// Seed recorded for reproducibility (reserved for stochastic
    /// stimulus generators; the core dynamics are noise-free).
    pub seed: u64,
}

struct ActivePulse<S> {
    node: usize,
    level: S,
    t_end: S,
}

/// Run the whole network for `duration` under per-node stimuli.
/// Deterministic for fixed (network, stimuli, dt, seed).
pub fn run_network<S: Real>(
    net: &Network<S>,
    stimuli: &[(usize, WaveformSpec<S>)],
    dt: S,
    duration: S,
    seed: u64,
) -> Result<NetworkRun<S>> {
    net.validate()?;
    let dt_cap = net
        .nodes
        .iter()
        .map(|n| n.cell.dt_max())
        .fold(S::infinity(), S::min);
    if !dt.is_finite() || dt <= S::zero() || dt > dt_cap {
        return Err(Error::RejectedInput(format!(
            "network dt must lie in (0, {dt_cap}], got {dt}"
        )));
    }
    if !duration.is_finite() || duration < dt {
        return Err(Error::RejectedInput("duration must be finite and >= dt".into()));
    }
    for (node, wf) in stimuli {
        if *node >= net.node_count() {
            return Err(Error::Config(format!("stimulus references unknown node id {node}")));
        }
        wf.validate()?;
    }

    let n = net.node_count();
    let mut states: Vec<NeuristorState<S>> =
        net.nodes.iter().map(|p| NeuristorState::rest(&p.cell)).collect();
    let rest_out: Vec<S> = states.iter().map(|s| s.v_out).collect();
    let mut traces: Vec<TraceRecorder<S>> = Vec::with_capacity(n);
    for _ in 0..n {
        traces.push(TraceRecorder::new(
            &["v_c1", "v_c2", "v_out", "x1", "x2"],
            dt,
            S::zero(),
        )?);
    }
    let mut queue: EventQueue<S, SpikeEvent<S>> = EventQueue::new();
    let mut pulses: Vec<ActivePulse<S>> = Vec::new();
    // per-node (gain, expiry); unity gain once expired
    let mut gains: Vec<(S, S)> = vec![(S::one(), S::neg_infinity()); n];
    let mut last_spike: Vec<S> = vec![S::neg_infinity(); n];
    let mut spikes: Vec<NetworkSpike<S>> = Vec::new();
    let mut deliveries: Vec<DeliveryRecord<S>> = Vec::new();

    let gain_at = |gains: &[(S, S)], node: usize, t: S| -> S {
        let (g, expiry) = gains[node];
        if t < expiry {
            g
        } else {
            S::one()
        }
    };

    let steps = (duration / dt).to_f64_lossy().floor() as usize;
    for k in 0..steps {
        let t = S::from_usize(k).unwrap() * dt;

        // 1. expire synaptic pulses, then deliver everything due by now
        pulses.retain(|p| p.t_end > t);
        for (_, ev) in queue.drain_until(t) {
            let edge = net.edges[ev.edge];
            match edge.kind {
                SynapseKind::Modulating => {
                    gains[edge.dst] = (edge.weight, t + net.modulation_duration);
                    deliveries.push(DeliveryRecord {
                        t,
                        edge: ev.edge,
                        dst: edge.dst,
                        contribution: S::zero(),
                    });
                }
                kind => {
                    let level = delivery_contribution(
                        kind,
                        edge.weight,
                        ev.amplitude,
                        gain_at(&gains, edge.dst, t),
                    );
                    pulses.push(ActivePulse {
                        node: edge.dst,
                        level,
                        t_end: t + net.nodes[edge.dst].cell.standard_pulse_width(),
                    });
                    deliveries.push(DeliveryRecord {
                        t,
                        edge: ev.edge,
                        dst: edge.dst,
                        contribution: level,
                    });
                }
            }
        }

        // 2. per-node input: external stimuli plus active synaptic pulses
        let mut input = vec![S::zero(); n];
        for (node, wf) in stimuli {
            input[*node] += wf.value(t);
        }
        for p in &pulses {
            input[p.node] += p.level;
        }

        // 3. record, then detect peaks one sample behind the frontier
        for (node, state) in states.iter().enumerate() {
            traces[node].push(vec![state.v_c1, state.v_c2, state.v_out, state.x1, state.x2])?;
        }
        if k >= 2 {
            for node in 0..n {
                let rows = traces[node].rows();
                let cell = &net.nodes[node].cell;
                let e_prev = rows[k - 2][2] - rest_out[node];
                let e_mid = rows[k - 1][2] - rest_out[node];
                let e_next = rows[k][2] - rest_out[node];
                let t_peak = S::from_usize(k - 1).unwrap() * dt;
                if e_mid >= cell.detect_excursion()
                    && e_mid >= e_prev
                    && e_mid > e_next
                    && t_peak - last_spike[node] >= cell.detect_min_separation()
                {
                    last_spike[node] = t_peak;
                    states[node].t_last_spike = Some(t_peak);
                    spikes.push(NetworkSpike {
                        t_peak,
                        node,
                        amplitude: e_mid,
                    });
                    for ev in propagate_spike(net, node, t_peak, e_mid)? {
                        queue.push(ev.t_deliver, ev)?;
                    }
                }
            }
        }

        // 4. advance all cells with the input held over [t, t+dt)
        for node in 0..n {
            states[node] = step_neuristor(&net.nodes[node].cell, &states[node], input[node], dt)?;
        }
    }

    Ok(NetworkRun {
        node_traces: traces,
        spikes,
        deliveries,
        seed,
    })
}

/// Write the global spike log as `t_peak,node,amplitude` CSV, with nodes
/// by name.
pub fn write_spike_log_csv<S: Real, W: std::io::Write>(
    mut w: W,
    net: &Network<S>,
    spikes: &[NetworkSpike<S>],
) -> Result<()> {
    writeln!(w, "t_peak,node,amplitude")?;
    for s in spikes {
        writeln!(
            w,
            "{},{},{}",
            s.t_peak.to_f64_lossy(),
            net.node_names[s.node],
            s.amplitude.to_f64_lossy()
        )?;
    }
    Ok(())
}
