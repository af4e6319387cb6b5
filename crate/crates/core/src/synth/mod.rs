//! Synthetic order flow with known cancellation laws, and the uniform-queue
//! experiment.

mod queues;
mod stream;

use thiserror::Error;

use crate::lobengine::EngineError;

pub use queues::{simulate_uniform_queues, PointMass, QueueSimConfig, QueueSimResult};
pub use stream::{generate_stream, ArrivalMix, GenConfig, PriceLevelLaw, QueuePositionLaw};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("generator drove the book into an error: {0}")]
    Engine(#[from] EngineError),
}
