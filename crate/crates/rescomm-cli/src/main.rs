//! `rescomm` — batch front end for the resistive-communication simulator.
//!
//! One subcommand per module: `sweep` (memristor I-V), `spike` (single
//! neuristor), `net` (neuristor network + link metrics), `diffuse`
//! (molecular channel) and `metrics` (link metrics from event logs).
//! Everything is file-in/file-out; plotting is left to external tools.
//!
//! Exit codes: 0 success, 2 configuration/input error, 3 model error,
//! 4 i/o error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use rescomm_core::diffusion::{
    concentration, simulate_ook, write_ook_csv, write_pulse_csv, ConcentrationSample,
};
use rescomm_core::memristor::{iv_sweep, loop_area, pinch_residual, write_iv_csv};
use rescomm_core::network::{run_network, write_spike_log_csv, NetworkRun};
use rescomm_core::neuristor::{find_threshold, run_neuristor, write_spikes_csv};
use rescomm_core::p1906::{
    describe_diffusion_link, describe_synapse_link, measure, LinkMetrics, NanoLinkDescriptor,
};
use rescomm_core::scenario::{load_scenario, ScenarioConfig};
use rescomm_core::{
    memristor, DiffusionParams, Error, MemristorState, NeuristorParams, OokLinkParams, Result,
    WaveformSpec,
};

const AFTER_HELP: &str = "\
Examples:
  rescomm sweep --out results
  rescomm sweep --amplitude 1.0 --frequency 2.0 --out results
  rescomm spike --threshold --out results
  rescomm net --scenario chain.toml --out results --seed 7
  rescomm diffuse --mode pulse --out results
  rescomm metrics --sent sent.txt --received recv.txt --out results

Scenario overrides: --dt and --seed always beat values from the scenario
file. The output directory must already exist.";

#[derive(Parser)]
#[command(name = "rescomm", version, about = "Resistive-communication simulator", after_help = AFTER_HELP)]
struct Cli {
    /// Scenario TOML file (see the README for the format)
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Output directory; must exist and be writable
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Override the scenario RNG seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the scenario integration step (seconds)
    #[arg(long, global = true)]
    dt: Option<f64>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Memristor I-V sweep: writes iv.csv (t,v,i,m) and sweep_summary.txt
    Sweep {
        /// Sine drive amplitude (V); overrides the scenario drive
        #[arg(long)]
        amplitude: Option<f64>,
        /// Sine drive frequency (Hz); overrides the scenario drive
        #[arg(long)]
        frequency: Option<f64>,
    },
    /// Single neuristor run: writes trace.csv and spikes.csv
    Spike {
        /// Also bisect the firing threshold into threshold.txt
        #[arg(long)]
        threshold: bool,
        /// Run length in seconds (default: scenario duration or 600 us)
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Network run: spike_log.csv, per-node trace_<name>.csv and, with a
    /// [metrics] block, metrics.txt / metrics.json
    Net,
    /// Molecular diffusion channel: pulse.csv (t,c) or ook.csv per mode
    Diffuse {
        /// pulse = impulse response, ook = on-off-keyed link run
        #[arg(long, value_enum)]
        mode: Option<DiffuseMode>,
    },
    /// Link metrics from two timestamp logs (one float per line, '#'
    /// comments allowed): writes metrics.txt and metrics.json
    Metrics {
        /// Sent-event timestamps file
        #[arg(long)]
        sent: PathBuf,
        /// Received-event timestamps file
        #[arg(long)]
        received: PathBuf,
        /// Matching latency window (s)
        #[arg(long, default_value_t = 2e-3)]
        latency_window: f64,
        /// Sliding window for the peak rate (s)
        #[arg(long, default_value_t = 1e-3)]
        rate_window: f64,
        /// Which physical layer the events came from
        #[arg(long, value_enum, default_value_t = LinkKind::Spike)]
        link: LinkKind,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiffuseMode {
    Pulse,
    Ook,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LinkKind {
    Spike,
    Molecule,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: &Cli) -> Result<()> {
    if !cli.out.is_dir() {
        return Err(Error::Config(format!(
            "output directory {} does not exist",
            cli.out.display()
        )));
    }
    let scenario = match &cli.scenario {
        Some(path) => Some(load_scenario_file(path, cli)?),
        None => None,
    };
    match &cli.cmd {
        Cmd::Sweep {
            amplitude,
            frequency,
        } => cmd_sweep(cli, scenario.as_ref(), *amplitude, *frequency),
        Cmd::Spike {
            threshold,
            duration,
        } => cmd_spike(cli, scenario.as_ref(), *threshold, *duration),
        Cmd::Net => cmd_net(cli, scenario.as_ref()),
        Cmd::Diffuse { mode } => cmd_diffuse(cli, scenario.as_ref(), *mode),
        Cmd::Metrics {
            sent,
            received,
            latency_window,
            rate_window,
            link,
        } => cmd_metrics(cli, sent, received, *latency_window, *rate_window, *link),
    }
}

/// Load and validate a scenario, applying --dt / --seed overrides.
fn load_scenario_file(path: &Path, cli: &Cli) -> Result<ScenarioConfig> {
    if !path.is_file() {
        return Err(Error::Config(format!(
            "scenario file {} does not exist",
            path.display()
        )));
    }
    let text = fs::read_to_string(path)?;
    let mut cfg = load_scenario(&text)?;
    if let Some(dt) = cli.dt {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::Config(format!("--dt must be finite and > 0, got {dt}")));
        }
        cfg.sim.dt = dt;
    }
    if let Some(seed) = cli.seed {
        cfg.sim.seed = seed;
    }
    Ok(cfg)
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<()> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn cmd_sweep(
    cli: &Cli,
    scenario: Option<&ScenarioConfig>,
    amplitude: Option<f64>,
    frequency: Option<f64>,
) -> Result<()> {
    let sweep = scenario.and_then(|s| s.sweep.clone());
    let params = sweep
        .as_ref()
        .map(|s| s.params)
        .unwrap_or_else(memristor::MemristorParams::default_device);
    let fraction = sweep.as_ref().map(|s| s.initial_fraction).unwrap_or(0.5);
    let drive = if amplitude.is_some() || frequency.is_some() {
        WaveformSpec::Sine {
            amplitude: amplitude.unwrap_or(1.0),
            frequency: frequency.unwrap_or(1.0),
            phase: 0.0,
        }
    } else {
        sweep.map(|s| s.drive).unwrap_or(WaveformSpec::Sine {
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
        })
    };
    drive.validate()?;
    // one drive period by default, 10^4 samples per period
    let (duration, default_dt) = match drive {
        WaveformSpec::Sine { frequency, .. } if frequency > 0.0 => {
            let period = 1.0 / frequency;
            (
                scenario.map(|s| s.sim.duration).unwrap_or(period),
                period / 1e4,
            )
        }
        _ => {
            let duration = scenario
                .map(|s| s.sim.duration)
                .ok_or_else(|| Error::Config("non-sine sweep drives need a scenario [sim] duration".into()))?;
            (duration, duration / 1e5)
        }
    };
    let dt = cli.dt.unwrap_or(default_dt);

    let initial = MemristorState::at_fraction(&params, fraction);
    let samples = iv_sweep(&params, &initial, &drive, dt, duration)?;
    let mut csv = Vec::new();
    write_iv_csv(&mut csv, &samples)?;
    write_file(&cli.out, "iv.csv", &csv)?;

    let area = loop_area(&samples);
    let residual = pinch_residual(&samples, 1e-3 * drive.peak().max(1e-12));
    let summary = format!(
        "samples={}\nloop_area={}\npinch_residual={}\n",
        samples.len(),
        area,
        residual
    );
    write_file(&cli.out, "sweep_summary.txt", summary.as_bytes())?;
    println!("sweep: {} samples, loop_area={area}, pinch_residual={residual}", samples.len());
    Ok(())
}

fn cmd_spike(
    cli: &Cli,
    scenario: Option<&ScenarioConfig>,
    threshold: bool,
    duration: Option<f64>,
) -> Result<()> {
    let cell = scenario
        .map(|s| s.cell)
        .unwrap_or_else(NeuristorParams::default_cell);
    let stimulus = scenario
        .and_then(|s| s.stimuli.first().map(|(_, w)| w.clone()))
        .unwrap_or(WaveformSpec::Pulse {
            amplitude: 1.0,
            start: 10e-6,
            width: cell.standard_pulse_width(),
        });
    let dt = cli
        .dt
        .or(scenario.map(|s| s.sim.dt))
        .unwrap_or_else(|| cell.default_dt());
    let duration = duration
        .or(scenario.map(|s| s.sim.duration))
        .unwrap_or(600e-6);

    let run = run_neuristor(&cell, &stimulus, dt, duration)?;
    let mut trace = Vec::new();
    run.trace.write_csv(&mut trace)?;
    write_file(&cli.out, "trace.csv", &trace)?;
    let mut spikes = Vec::new();
    write_spikes_csv(&mut spikes, &run.spikes)?;
    write_file(&cli.out, "spikes.csv", &spikes)?;
    println!("spike: {} spike(s) in {duration} s", run.spikes.len());

    if threshold {
        let t = find_threshold(&cell, dt)?;
        write_file(&cli.out, "threshold.txt", format!("threshold_v={t}\n").as_bytes())?;
        println!("spike: firing threshold {t} V");
    }
    Ok(())
}

fn cmd_net(cli: &Cli, scenario: Option<&ScenarioConfig>) -> Result<()> {
    let cfg = scenario.ok_or_else(|| Error::Config("net requires --scenario".into()))?;
    if cfg.network.node_count() == 0 {
        return Err(Error::Config("net scenario declares no nodes".into()));
    }
    let run = run_network(
        &cfg.network,
        &cfg.stimuli,
        cfg.sim.dt,
        cfg.sim.duration,
        cfg.sim.seed,
    )?;

    let info = format!(
        "seed={}\ndt={}\nduration={}\nnodes={}\nspikes={}\ndeliveries={}\n",
        cfg.sim.seed,
        cfg.sim.dt,
        cfg.sim.duration,
        cfg.network.node_count(),
        run.spikes.len(),
        run.deliveries.len()
    );
    write_file(&cli.out, "run_info.txt", info.as_bytes())?;
    let mut log = Vec::new();
    write_spike_log_csv(&mut log, &cfg.network, &run.spikes)?;
    write_file(&cli.out, "spike_log.csv", &log)?;
    for (idx, name) in cfg.network.node_names().iter().enumerate() {
        let mut trace = Vec::new();
        run.node_traces[idx].write_csv(&mut trace)?;
        write_file(&cli.out, &format!("trace_{name}.csv"), &trace)?;
    }
    println!(
        "net: {} spike(s), {} deliveries over {} node(s)",
        run.spikes.len(),
        run.deliveries.len(),
        cfg.network.node_count()
    );

    if let Some(m) = &cfg.metrics {
        let (transit, response) = net_metrics(cfg, &run, m.src, m.dst, m.latency_window, m.rate_window)?;
        let descriptor = describe_synapse_link();
        let report = two_stage_report(&descriptor, &transit, &response);
        write_file(&cli.out, "metrics.txt", report.as_bytes())?;
        let json = two_stage_json(&descriptor, &transit, &response);
        write_file(&cli.out, "metrics.json", json.as_bytes())?;
        println!(
            "net: transit delivery_ratio={} response delivery_ratio={}",
            transit.delivery_ratio, response.delivery_ratio
        );
    }
    Ok(())
}

/// Metrics for a src→dst pair: `transit` matches src spikes against event
/// arrivals at dst (pure channel latency, L/v up to step quantization);
/// `response` matches src spikes against dst spikes (did dst actually
/// fire — this is the pair that shows inhibitory suppression).
fn net_metrics(
    cfg: &ScenarioConfig,
    run: &NetworkRun<f64>,
    src: usize,
    dst: usize,
    latency_window: f64,
    rate_window: f64,
) -> Result<(LinkMetrics<f64>, LinkMetrics<f64>)> {
    let sent: Vec<f64> = run
        .spikes
        .iter()
        .filter(|s| s.node == src)
        .map(|s| s.t_peak)
        .collect();
    let arrivals: Vec<f64> = run
        .deliveries
        .iter()
        .filter(|d| d.dst == dst && cfg.network.edges()[d.edge].src == src)
        .map(|d| d.t)
        .collect();
    let responses: Vec<f64> = run
        .spikes
        .iter()
        .filter(|s| s.node == dst)
        .map(|s| s.t_peak)
        .collect();
    let transit = measure(&sent, &arrivals, latency_window, rate_window)?;
    let response = measure(&sent, &responses, latency_window, rate_window)?;
    Ok((transit, response))
}

fn metrics_lines(prefix: &str, m: &LinkMetrics<f64>) -> String {
    format!(
        "{p}_delivery_ratio={}\n{p}_mean_latency={}\n{p}_latency_defined={}\n{p}_peak_rate={}\n",
        m.delivery_ratio,
        m.mean_latency,
        m.latency_defined,
        m.peak_rate,
        p = prefix
    )
}

fn two_stage_report(
    d: &NanoLinkDescriptor,
    transit: &LinkMetrics<f64>,
    response: &LinkMetrics<f64>,
) -> String {
    format!(
        "carrier={}\nmotion={}\nperturbation={}\nspecificity={}\n{}{}",
        d.carrier.label(),
        d.motion.label(),
        d.perturbation,
        d.specificity,
        metrics_lines("transit", transit),
        metrics_lines("response", response),
    )
}

fn metrics_json_object(m: &LinkMetrics<f64>) -> String {
    format!(
        "{{\"delivery_ratio\": {}, \"mean_latency\": {}, \"latency_defined\": {}, \"peak_rate\": {}}}",
        m.delivery_ratio, m.mean_latency, m.latency_defined, m.peak_rate
    )
}

fn two_stage_json(
    d: &NanoLinkDescriptor,
    transit: &LinkMetrics<f64>,
    response: &LinkMetrics<f64>,
) -> String {
    format!(
        concat!(
            "{{\n",
            "  \"carrier\": \"{}\",\n",
            "  \"motion\": \"{}\",\n",
            "  \"perturbation\": \"{}\",\n",
            "  \"specificity\": \"{}\",\n",
            "  \"transit\": {},\n",
            "  \"response\": {}\n",
            "}}\n"
        ),
        d.carrier.label(),
        d.motion.label(),
        d.perturbation.replace('"', "\\\""),
        d.specificity.replace('"', "\\\""),
        metrics_json_object(transit),
        metrics_json_object(response),
    )
}

fn cmd_diffuse(cli: &Cli, scenario: Option<&ScenarioConfig>, mode: Option<DiffuseMode>) -> Result<()> {
    let spec = scenario.and_then(|s| s.diffusion.clone());
    let params = spec
        .as_ref()
        .map(|d| d.params)
        .unwrap_or(DiffusionParams {
            q_molecules: 1e6,
            d_coeff: 1e-9,
            r: 1e-6,
        });
    params.validate()?;
    let bits = spec.as_ref().map(|d| d.bits.clone()).unwrap_or_default();
    let mode = mode.unwrap_or(if bits.is_empty() {
        DiffuseMode::Pulse
    } else {
        DiffuseMode::Ook
    });

    match mode {
        DiffuseMode::Pulse => {
            // impulse response over eight peak times; r = 0 makes the very
            // first sample hit the (r=0, t=0) singularity, which is the
            // documented rejection
            let t_max = if params.r > 0.0 {
                8.0 * rescomm_core::diffusion::peak_time(&params)?
            } else {
                0.0
            };
            let n = 512usize;
            let mut samples = Vec::with_capacity(n + 1);
            for k in 0..=n {
                let t = t_max * k as f64 / n as f64;
                samples.push(ConcentrationSample {
                    t,
                    c: concentration(&params, t)?,
                });
            }
            let mut csv = Vec::new();
            write_pulse_csv(&mut csv, &samples)?;
            write_file(&cli.out, "pulse.csv", &csv)?;
            println!("diffuse: pulse response, {} samples to t={t_max} s", samples.len());
        }
        DiffuseMode::Ook => {
            if bits.is_empty() {
                return Err(Error::Config(
                    "ook mode needs a scenario [diffusion] block with non-empty bits".into(),
                ));
            }
            let link = spec
                .as_ref()
                .map(|d| d.link)
                .expect("bits imply a diffusion spec");
            let run = simulate_ook(&params, &link, &bits)?;
            let mut csv = Vec::new();
            write_ook_csv(&mut csv, &run)?;
            write_file(&cli.out, "ook.csv", &csv)?;
            let errors = run
                .sent
                .iter()
                .zip(&run.received)
                .filter(|(a, b)| a != b)
                .count();
            println!("diffuse: {} bits, {} error(s)", bits.len(), errors);
        }
    }
    Ok(())
}

/// One float per line; blank lines and '#' comments are skipped.
fn read_event_log(path: &Path) -> Result<Vec<f64>> {
    if !path.is_file() {
        return Err(Error::Config(format!(
            "event log {} does not exist",
            path.display()
        )));
    }
    let text = fs::read_to_string(path)?;
    let mut events = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let t: f64 = line.parse().map_err(|_| {
            Error::Parse(format!(
                "{}: line {}: expected a timestamp, got {line:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        events.push(t);
    }
    Ok(events)
}

fn cmd_metrics(
    cli: &Cli,
    sent: &Path,
    received: &Path,
    latency_window: f64,
    rate_window: f64,
    link: LinkKind,
) -> Result<()> {
    let sent = read_event_log(sent)?;
    let received = read_event_log(received)?;
    let metrics = measure(&sent, &received, latency_window, rate_window)?;
    let descriptor = match link {
        LinkKind::Spike => describe_synapse_link(),
        LinkKind::Molecule => describe_diffusion_link(
            &DiffusionParams {
                q_molecules: 1e6,
                d_coeff: 1e-9,
                r: 1e-6,
            },
            &OokLinkParams {
                symbol_period: 1e-3,
                detect_threshold: 0.0,
                samples_per_symbol: 1,
            },
        ),
    };
    let mut report = Vec::new();
    rescomm_core::p1906::write_metrics_report(&mut report, &descriptor, &metrics)?;
    write_file(&cli.out, "metrics.txt", &report)?;
    write_file(
        &cli.out,
        "metrics.json",
        rescomm_core::p1906::metrics_json(&descriptor, &metrics).as_bytes(),
    )?;
    print!("{}", String::from_utf8_lossy(&report));
    Ok(())
}
