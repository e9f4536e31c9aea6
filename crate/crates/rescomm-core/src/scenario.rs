//! Scenario configuration: a strict TOML format declaring devices, nodes,
//! edges, stimuli and the simulation block, shared by every CLI
//! subcommand.
//!
//! Parsing is strict — unknown keys are rejected and syntax errors carry
//! line/column positions from the TOML parser. Semantic errors (dangling
//! node references, bad invariants) name the offending id.
//!
//! Layout (all sections except `[sim]` optional):
//!
//! ```toml
//! [sim]
//! duration = 1.6e-3   # seconds, required
//! dt = 2e-8           # seconds; defaults to the cells' recommended step
//! seed = 42           # defaults to 0
//!
//! [cell]              # neuristor overrides applied over the default cell
//! r_load2 = 25e3
//! [cell.ch1]
//! v_hold = 0.25
//!
//! [[node]]
//! name = "a"          # v_rest / v_threshold optional
//!
//! [[edge]]
//! src = "a"
//! dst = "b"
//! kind = "excitatory" # excitatory | inhibitory | modulating
//! weight = 2.0
//! axon_length = 0.15  # m
//! velocity = 150.0    # m/s
//!
//! [[stimulus]]
//! node = "a"
//! waveform = { kind = "pulse", amplitude = 1.0, start = 1e-5, width = 7.5e-5 }
//!
//! [metrics]           # p1906 measurement pair for `net`
//! src = "a"
//! dst = "b"
//!
//! [memristor]         # device overrides + drive for `sweep`
//! r_off = 10e3
//! drive = { kind = "sine", amplitude = 1.0, frequency = 1.0 }
//!
//! [diffusion]         # channel + link for `diffuse`
//! q_molecules = 1e6
//! bits = [1, 0, 1]
//! ```

use serde::Deserialize;

use crate::diffusion::{DiffusionParams, OokLinkParams};
use crate::error::{Error, Result};
use crate::memristor::MemristorParams;
use crate::network::{Network, NeuronNodeParams, SynapseEdge, SynapseKind};
use crate::neuristor::{MottChannelParams, NeuristorParams};
use crate::waveform::WaveformSpec;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    sim: Option<RawSim>,
    cell: Option<CellOverride>,
    #[serde(default)]
    node: Vec<RawNode>,
    #[serde(default)]
    edge: Vec<RawEdge>,
    #[serde(default)]
    stimulus: Vec<RawStimulus>,
    metrics: Option<RawMetrics>,
    memristor: Option<RawMemristor>,
    diffusion: Option<RawDiffusion>,
    output: Option<RawOutput>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    duration: f64,
    dt: Option<f64>,
    seed: Option<u64>,
}

/// Optional overrides applied over [`NeuristorParams::default_cell`].
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellOverride {
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub v_bias1: Option<f64>,
    pub v_bias2: Option<f64>,
    pub r_load1: Option<f64>,
    pub r_load2: Option<f64>,
    pub c_couple: Option<f64>,
    pub r_out: Option<f64>,
    pub c_out: Option<f64>,
    pub ch1: Option<ChannelOverride>,
    pub ch2: Option<ChannelOverride>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelOverride {
    pub r_ins: Option<f64>,
    pub r_met: Option<f64>,
    pub v_on: Option<f64>,
    pub v_hold: Option<f64>,
    pub tau_switch: Option<f64>,
}

impl ChannelOverride {
    fn apply(&self, base: &mut MottChannelParams<f64>) {
        let MottChannelParams {
            r_ins,
            r_met,
            v_on,
            v_hold,
            tau_switch,
        } = base;
        for (slot, val) in [
            (r_ins, self.r_ins),
            (r_met, self.r_met),
            (v_on, self.v_on),
            (v_hold, self.v_hold),
            (tau_switch, self.tau_switch),
        ] {
            if let Some(v) = val {
                *slot = v;
            }
        }
    }
}

impl CellOverride {
    pub fn apply(&self) -> NeuristorParams<f64> {
        let mut p = NeuristorParams::default_cell();
        for (slot, val) in [
            (&mut p.c1, self.c1),
            (&mut p.c2, self.c2),
            (&mut p.v_bias1, self.v_bias1),
            (&mut p.v_bias2, self.v_bias2),
            (&mut p.r_load1, self.r_load1),
            (&mut p.r_load2, self.r_load2),
            (&mut p.c_couple, self.c_couple),
            (&mut p.r_out, self.r_out),
            (&mut p.c_out, self.c_out),
        ] {
            if let Some(v) = val {
                *slot = v;
            }
        }
        if let Some(ch) = &self.ch1 {
            ch.apply(&mut p.ch1);
        }
        if let Some(ch) = &self.ch2 {
            ch.apply(&mut p.ch2);
        }
        p
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    name: String,
    v_rest: Option<f64>,
    v_threshold: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    src: String,
    dst: String,
    kind: SynapseKind,
    weight: f64,
    axon_length: f64,
    velocity: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStimulus {
    node: String,
    waveform: WaveformSpec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetrics {
    src: String,
    dst: String,
    latency_window: Option<f64>,
    rate_window: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMemristor {
    r_on: Option<f64>,
    r_off: Option<f64>,
    depth: Option<f64>,
    mobility: Option<f64>,
    initial_fraction: Option<f64>,
    drive: Option<WaveformSpec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiffusion {
    q_molecules: Option<f64>,
    d_coeff: Option<f64>,
    r: Option<f64>,
    symbol_period: Option<f64>,
    detect_threshold: Option<f64>,
    samples_per_symbol: Option<usize>,
    #[serde(default)]
    bits: Vec<u8>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: String,
}

/// Validated simulation block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub dt: f64,
    pub duration: f64,
    pub seed: u64,
}

/// p1906 measurement pair, resolved to node indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsSpec {
    pub src: usize,
    pub dst: usize,
    pub latency_window: f64,
    pub rate_window: f64,
}

/// Memristor sweep setup for the `sweep` subcommand.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub params: MemristorParams<f64>,
    pub initial_fraction: f64,
    pub drive: WaveformSpec<f64>,
}

/// Diffusion channel + link setup for the `diffuse` subcommand.
#[derive(Debug, Clone)]
pub struct DiffusionSpec {
    pub params: DiffusionParams<f64>,
    pub link: OokLinkParams<f64>,
    pub bits: Vec<u8>,
}

/// Fully validated scenario, ready for the simulation engines.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub sim: SimParams,
    /// Cell shared by all nodes (defaults, with `[cell]` overrides).
    pub cell: NeuristorParams<f64>,
    pub network: Network<f64>,
    /// Stimuli resolved to node indices.
    pub stimuli: Vec<(usize, WaveformSpec<f64>)>,
    pub metrics: Option<MetricsSpec>,
    pub sweep: Option<SweepSpec>,
    pub diffusion: Option<DiffusionSpec>,
    pub output_dir: Option<String>,
}

/// Parse and validate a scenario from TOML text.
pub fn load_scenario(text: &str) -> Result<ScenarioConfig> {
    let raw: RawScenario =
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;

    let sim_raw = raw
        .sim
        .ok_or_else(|| Error::Config("no sim block ([sim] with a duration is required)".into()))?;

    let cell = raw.cell.unwrap_or_default().apply();
    cell.validate()?;

    let mut network = Network::new();
    for n in &raw.node {
        let mut params = NeuronNodeParams::default_node();
        params.cell = cell;
        if let Some(v) = n.v_rest {
            params.v_rest = v;
        }
        if let Some(v) = n.v_threshold {
            params.v_threshold = v;
        }
        network.add_node(&n.name, params)?;
    }
    let names: Vec<String> = network.node_names().to_vec();
    let resolve = move |name: &str, role: &str| -> Result<usize> {
        names.iter().position(|n| n == name).ok_or_else(|| {
            Error::Config(format!("{role} references unknown node {name:?}"))
        })
    };
    for e in &raw.edge {
        let src = resolve(&e.src, "edge src")?;
        let dst = resolve(&e.dst, "edge dst")?;
        network.add_edge(SynapseEdge {
            src,
            dst,
            kind: e.kind,
            weight: e.weight,
            axon_length: e.axon_length,
            velocity: e.velocity,
        })?;
    }
    network.validate()?;

    let mut stimuli = Vec::new();
    for s in &raw.stimulus {
        let node = resolve(&s.node, "stimulus")?;
        s.waveform.validate()?;
        stimuli.push((node, s.waveform.clone()));
    }

    let dt = match sim_raw.dt {
        Some(dt) => dt,
        None => cell.default_dt(),
    };
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::Config(format!("sim dt must be finite and > 0, got {dt}")));
    }
    if !sim_raw.duration.is_finite() || sim_raw.duration < dt {
        return Err(Error::Config(format!(
            "sim duration must be finite and >= dt, got {}",
            sim_raw.duration
        )));
    }
    let sim = SimParams {
        dt,
        duration: sim_raw.duration,
        seed: sim_raw.seed.unwrap_or(0),
    };

    let metrics = match &raw.metrics {
        Some(m) => Some(MetricsSpec {
            src: resolve(&m.src, "metrics src")?,
            dst: resolve(&m.dst, "metrics dst")?,
            latency_window: m.latency_window.unwrap_or(2e-3),
            rate_window: m.rate_window.unwrap_or(1e-3),
        }),
        None => None,
    };

    let sweep = match &raw.memristor {
        Some(m) => {
            let base = MemristorParams::<f64>::default_device();
            let params = MemristorParams::new(
                m.r_on.unwrap_or(base.r_on),
                m.r_off.unwrap_or(base.r_off),
                m.depth.unwrap_or(base.depth),
                m.mobility.unwrap_or(base.mobility),
            )?;
            let fraction = m.initial_fraction.unwrap_or(0.5);
            if !(0.0..=1.0).contains(&fraction) {
                return Err(Error::Config(format!(
                    "memristor initial_fraction must lie in [0, 1], got {fraction}"
                )));
            }
            let drive = m.drive.clone().unwrap_or(WaveformSpec::Sine {
                amplitude: 1.0,
                frequency: 1.0,
                phase: 0.0,
            });
            drive.validate()?;
            Some(SweepSpec {
                params,
                initial_fraction: fraction,
                drive,
            })
        }
        None => None,
    };

    let diffusion = match &raw.diffusion {
        Some(d) => {
            let params = DiffusionParams::new(
                d.q_molecules.unwrap_or(1e6),
                d.d_coeff.unwrap_or(1e-9),
                d.r.unwrap_or(1e-6),
            )?;
            for &bit in &d.bits {
                if bit > 1 {
                    return Err(Error::Config(format!(
                        "diffusion bits must be 0 or 1, got {bit}"
                    )));
                }
            }
            // default receiver: half the isolated peak, six peak times per
            // symbol so consecutive pulses barely interfere; only derivable
            // at positive sender-receiver distance
            let needs_defaults = d.symbol_period.is_none() || d.detect_threshold.is_none();
            let (tp, peak) = if needs_defaults && params.r > 0.0 {
                let tp = crate::diffusion::peak_time(&params)?;
                (tp, crate::diffusion::concentration(&params, tp)?)
            } else {
                (1.0, 0.0)
            };
            let link = OokLinkParams {
                symbol_period: d.symbol_period.unwrap_or(6.0 * tp),
                detect_threshold: d.detect_threshold.unwrap_or(0.5 * peak),
                samples_per_symbol: d.samples_per_symbol.unwrap_or(16),
            };
            link.validate()?;
            Some(DiffusionSpec {
                params,
                link,
                bits: d.bits.clone(),
            })
        }
        None => None,
    };

    Ok(ScenarioConfig {
        sim,
        cell,
        network,
        stimuli,
        metrics,
        sweep,
        diffusion,
        output_dir: raw.output.map(|o| o.dir),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[sim]\nduration = 1e-3\n\n[[node]]\nname = \"a\"\n";

    #[test]
    fn empty_input_reports_missing_sim_block() {
        let err = load_scenario("").unwrap_err();
        assert!(err.to_string().contains("no sim block"), "{err}");
    }

    #[test]
    fn minimal_scenario_applies_defaults() {
        let cfg = load_scenario(MINIMAL).unwrap();
        assert_eq!(cfg.sim.seed, 0);
        assert_eq!(cfg.sim.duration, 1e-3);
        assert!((cfg.sim.dt - cfg.cell.default_dt()).abs() < 1e-20);
        assert_eq!(cfg.network.node_count(), 1);
        assert_eq!(cfg.network.nodes()[0].v_rest, -70e-3);
        assert!(cfg.stimuli.is_empty());
        assert!(cfg.metrics.is_none());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = load_scenario("[sim\nduration = 1").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "no position in: {msg}");
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = "[sim]\nduration = 1e-3\nfrobnicate = 3\n";
        let err = load_scenario(text).unwrap_err();
        assert!(err.to_string().contains("frobnicate"), "{err}");
    }

    #[test]
    fn dangling_edge_reference_names_the_node() {
        let text = concat!(
            "[sim]\nduration = 1e-3\n\n",
            "[[node]]\nname = \"a\"\n\n",
            "[[edge]]\nsrc = \"a\"\ndst = \"ghost\"\nkind = \"excitatory\"\n",
            "weight = 1.0\naxon_length = 0.1\nvelocity = 100.0\n",
        );
        let err = load_scenario(text).unwrap_err();
        assert!(err.to_string().contains("\"ghost\""), "{err}");
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn full_network_scenario_round_trips() {
        let text = concat!(
            "[sim]\nduration = 2e-3\ndt = 2e-8\nseed = 7\n\n",
            "[cell]\nr_load2 = 25e3\n[cell.ch1]\nv_hold = 0.25\n\n",
            "[[node]]\nname = \"a\"\n\n",
            "[[node]]\nname = \"b\"\nv_threshold = -50e-3\n\n",
            "[[edge]]\nsrc = \"a\"\ndst = \"b\"\nkind = \"excitatory\"\n",
            "weight = 2.0\naxon_length = 0.15\nvelocity = 150.0\n\n",
            "[[stimulus]]\nnode = \"a\"\n",
            "waveform = { kind = \"pulse\", amplitude = 1.0, start = 1e-5, width = 7.5e-5 }\n\n",
            "[metrics]\nsrc = \"a\"\ndst = \"b\"\n",
        );
        let cfg = load_scenario(text).unwrap();
        assert_eq!(cfg.sim.seed, 7);
        assert_eq!(cfg.cell.r_load2, 25e3);
        assert_eq!(cfg.cell.ch1.v_hold, 0.25);
        assert_eq!(cfg.network.node_count(), 2);
        assert_eq!(cfg.network.edges()[0].kind, SynapseKind::Excitatory);
        assert_eq!(cfg.network.nodes()[1].v_threshold, -50e-3);
        assert_eq!(cfg.stimuli.len(), 1);
        let m = cfg.metrics.unwrap();
        assert_eq!((m.src, m.dst), (0, 1));
    }

    #[test]
    fn sweep_and_diffusion_sections_fill_defaults() {
        let text = concat!(
            "[sim]\nduration = 1.0\n\n",
            "[memristor]\nr_off = 10e3\n\n",
            "[diffusion]\nbits = [1, 0, 1]\n",
        );
        let cfg = load_scenario(text).unwrap();
        let sweep = cfg.sweep.unwrap();
        assert_eq!(sweep.params.r_off, 10e3);
        assert_eq!(sweep.params.r_on, 100.0);
        let diff = cfg.diffusion.unwrap();
        assert_eq!(diff.bits, vec![1, 0, 1]);
        assert!(diff.link.symbol_period > 0.0);
        assert!(diff.link.detect_threshold > 0.0);
    }

    #[test]
    fn invalid_invariants_are_config_errors() {
        // duration below dt
        let err = load_scenario("[sim]\nduration = 1e-9\ndt = 1e-3\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
        // bad bit value
        let err = load_scenario("[sim]\nduration = 1.0\n[diffusion]\nbits = [2]\n").unwrap_err();
        assert!(err.to_string().contains("0 or 1"), "{err}");
        // zero-delay self loop
        let text = concat!(
            "[sim]\nduration = 1e-3\n\n[[node]]\nname = \"a\"\n\n",
            "[[edge]]\nsrc = \"a\"\ndst = \"a\"\nkind = \"excitatory\"\n",
            "weight = 1.0\naxon_length = 0.0\nvelocity = 1.0\n",
        );
        assert!(load_scenario(text).is_err());
    }
}
