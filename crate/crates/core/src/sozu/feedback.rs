use super::rate::Rate;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// What the gateway sends back over the OOK downlink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeedbackMsg {
    Ack,
    RequestRate(Rate),
}

/// Bernoulli-loss downlink, seeded.
#[derive(Debug, Clone)]
pub struct FeedbackChannel {
    loss_prob: f64,
    rng: ChaCha8Rng,
}

impl FeedbackChannel {
    pub fn new(loss_prob: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&loss_prob) {
            return Err(Error::Config(format!("feedback loss must be in [0, 1), got {loss_prob}")));
        }
        Ok(Self { loss_prob, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn loss_prob(&self) -> f64 {
        self.loss_prob
    }

    /// `None` when the message is lost. Draws once per message even at
    /// zero loss so the stream does not depend on the loss setting.
    pub fn send(&mut self, msg: FeedbackMsg) -> Option<FeedbackMsg> {
        let u: f64 = self.rng.gen();
        (u >= self.loss_prob).then_some(msg)
    }
}

pub fn feedback_channel(msg: FeedbackMsg, loss_prob: f64, rng_seed: u64) -> Result<Option<FeedbackMsg>> {
    Ok(FeedbackChannel::new(loss_prob, rng_seed)?.send(msg))
}
