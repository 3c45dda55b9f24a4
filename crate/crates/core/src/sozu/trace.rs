//! One full tag/gateway exchange over a soft channel, recorded so it can
//! be replayed decision for decision.

use super::feedback::{FeedbackChannel, FeedbackMsg};
use super::frame::Frame;
use super::rate::Rate;
use super::session::{tag_on_feedback, GatewayDecision, GatewaySession, SessionPlan, Tag};
use crate::bits::bits_to_hex;
use crate::decode::BpConfig;
use crate::error::{Error, Result};
use crate::phy::SoftChannel;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    /// Wire-format line.
    pub frame: String,
    pub coded_bits: usize,
    pub llrs: Vec<f64>,
    pub decision: GatewayDecision,
    pub fber: Option<f64>,
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackRecord {
    pub sent: FeedbackMsg,
    pub delivered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTrace {
    pub plan: SessionPlan,
    pub bp: BpConfig,
    pub frames: Vec<FrameRecord>,
    pub feedback: Option<FeedbackRecord>,
    pub requested_rate: Option<Rate>,
    pub delivered: bool,
    pub bits_sent: usize,
    pub effective_rate: f64,
    /// Gateway's final info decisions, delivered or not.
    pub decoded_hex: String,
    pub decoded_bits: Vec<u8>,
}

impl SessionTrace {
    pub fn decisions(&self) -> Vec<GatewayDecision> {
        self.frames.iter().map(|f| f.decision).collect()
    }
}

fn feed(
    gw: &mut GatewaySession,
    frame: &Frame,
    channel: &mut dyn SoftChannel,
) -> Result<FrameRecord> {
    let llrs = channel.transmit(&frame.payload)?;
    let decision = gw.on_frame(frame, &llrs)?;
    let report = gw.last_report();
    Ok(FrameRecord {
        frame: frame.to_line(),
        coded_bits: frame.coded_bits(),
        llrs,
        decision,
        fber: report.map(|r| r.fber),
        iterations: report.map(|r| r.iterations),
    })
}

/// Runs stage 1, the feedback exchange and, unless the tag hears an ACK,
/// stage 2. A tag that hears nothing times out and sends stage 2 at the
/// fallback rate; the gateway fails the session if that rate is not the
/// one it asked for, and ignores it if it had already acknowledged.
pub fn run_session(
    info: &[u8],
    plan: SessionPlan,
    bp: BpConfig,
    channel: &mut dyn SoftChannel,
    feedback: &mut FeedbackChannel,
) -> Result<SessionTrace> {
    let tag = Tag::new(info, plan)?;
    let mut gw = GatewaySession::new(plan, bp)?;
    let mut frames = vec![feed(&mut gw, &tag.stage1(), channel)?];

    let (msg, requested_rate) = match frames[0].decision {
        GatewayDecision::Ack => (FeedbackMsg::Ack, None),
        GatewayDecision::RequestRate(r) => (FeedbackMsg::RequestRate(r), Some(r)),
        GatewayDecision::Fail => unreachable!("first frame never fails the session"),
    };
    let heard = feedback.send(msg);
    if let Some(rate) = tag_on_feedback(heard) {
        frames.push(feed(&mut gw, &tag.stage2(rate)?, channel)?);
    }

    let bits_sent: usize = frames.iter().map(|f| f.coded_bits).sum();
    let decoded_bits = gw.last_report().map(|r| r.info_bits.clone()).unwrap_or_default();
    Ok(SessionTrace {
        plan,
        bp,
        feedback: Some(FeedbackRecord { sent: msg, delivered: heard.is_some() }),
        requested_rate,
        delivered: gw.delivered().is_some(),
        bits_sent,
        effective_rate: plan.k as f64 / bits_sent as f64,
        decoded_hex: bits_to_hex(&decoded_bits),
        decoded_bits,
        frames,
    })
}

/// Feeds the recorded frames and LLRs to a fresh gateway.
pub fn replay_session(trace: &SessionTrace) -> Result<Vec<GatewayDecision>> {
    let mut gw = GatewaySession::new(trace.plan, trace.bp)?;
    trace
        .frames
        .iter()
        .map(|rec| gw.on_frame(&Frame::parse_line(&rec.frame)?, &rec.llrs))
        .collect()
}

/// Replays and checks every decision against the recording.
pub fn verify_replay(trace: &SessionTrace) -> Result<()> {
    let replayed = replay_session(trace)?;
    if replayed != trace.decisions() {
        return Err(Error::Protocol(format!(
            "replay diverged: recorded {:?}, replayed {:?}",
            trace.decisions(),
            replayed
        )));
    }
    Ok(())
}
