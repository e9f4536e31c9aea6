//! Deterministic desk-scale simulator of resistive communication:
//! memristive devices, Mott neuristor spiking cells, neuristor networks
//! with typed synapses and conduction delays, and a molecular diffusion
//! channel, unified behind a nanoscale-communication reference mapping.
//!
//! All numeric kernels are generic over the scalar type via [`num::Real`];
//! the aliases below pin `f64`, which is what the CLI and all
//! reproducibility guarantees use. Quantities are SI throughout (V, A,
//! ohm, F, m, s); no unit system is enforced in code.

pub mod diffusion;
pub mod error;
pub mod events;
pub mod memristor;
pub mod network;
pub mod neuristor;
pub mod num;
pub mod p1906;
pub mod reram;
pub mod rk4;
pub mod rng;
pub mod scenario;
pub mod trace;
pub mod waveform;

pub use error::{Error, Result};

// Concrete f64 aliases for the common types.
pub type MemristorParams = memristor::MemristorParams<f64>;
pub type MemristorState = memristor::MemristorState<f64>;
pub type ReramParams = reram::ReramParams<f64>;
pub type DiffusionParams = diffusion::DiffusionParams<f64>;
pub type OokLinkParams = diffusion::OokLinkParams<f64>;
pub type NeuristorParams = neuristor::NeuristorParams<f64>;
pub type NeuristorState = neuristor::NeuristorState<f64>;
pub type SpikeRecord = neuristor::SpikeRecord<f64>;
pub type NeuronNodeParams = network::NeuronNodeParams<f64>;
pub type SynapseEdge = network::SynapseEdge<f64>;
pub type Network = network::Network<f64>;
pub type WaveformSpec = waveform::WaveformSpec<f64>;
pub type TraceRecorder = trace::TraceRecorder<f64>;
