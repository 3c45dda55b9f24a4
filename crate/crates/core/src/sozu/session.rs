//! Tag and gateway state machines for the two-stage rate-adaptive scheme.
//!
//! Every rate is realised as a prefix of one punctured mother code: stage
//! 1 sends all info positions plus the leading parity positions of the
//! reliability-ordered schedule, stage 2 sends the next slice of that
//! schedule.

use super::crc::{crc16, crc16_verify};
use super::feedback::FeedbackMsg;
use super::frame::Frame;
use super::header::PacketHeader;
use super::rate::{estimate_rate, Rate};
use crate::construct::{make_code_spec, CodeSpec, DesignChannel, ReliabilityOrder};
use crate::decode::{combine_llrs, BpConfig, BpDecoder, ChannelLLRs, EarlyStop};
use crate::encode::{encode_systematic_streaming, Codeword};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const MIN_K: usize = 8;
pub const MAX_K: usize = 512;

/// Rate the tag falls back to when feedback never arrives.
pub const FALLBACK_RATE: Rate = Rate::TWO_THIRDS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionPlan {
    pub k: usize,
    pub n_mother: usize,
    pub stage1_budget: usize,
    /// Erasure probability of the BEC the mother code is designed for.
    /// Defaults to the fraction of positions stage 1 leaves punctured.
    pub design_erasure: f64,
}

/// Mother length is the smallest power of two holding rate 1/8.
pub fn plan_session(k: usize) -> Result<SessionPlan> {
    if !(MIN_K..=MAX_K).contains(&k) {
        return Err(Error::Config(format!("k = {k} outside {MIN_K}..={MAX_K}")));
    }
    let n_mother = (8 * k).next_power_of_two();
    let stage1_budget = Rate::THREE_QUARTERS.budget(k);
    Ok(SessionPlan {
        k,
        n_mother,
        stage1_budget,
        design_erasure: 1.0 - stage1_budget as f64 / n_mother as f64,
    })
}

impl SessionPlan {
    pub fn n_log2(&self) -> u32 {
        self.n_mother.trailing_zeros()
    }

    pub fn cumulative_budget(&self, rate: Rate) -> usize {
        rate.budget(self.k)
    }

    pub fn with_design_erasure(self, eps: f64) -> Result<Self> {
        DesignChannel::new(eps)?;
        Ok(Self { design_erasure: eps, ..self })
    }

    pub fn mother_spec(&self) -> Result<CodeSpec> {
        let order = ReliabilityOrder::from_bec(DesignChannel::new(self.design_erasure)?, self.n_log2())?;
        make_code_spec(&order, self.k)
    }

    /// The 4-bit length field carries `log2(n_mother)`.
    pub fn length_code(&self) -> u8 {
        self.n_log2() as u8
    }

    fn stage2_range(&self, rate: Rate) -> Result<std::ops::Range<usize>> {
        if rate.code().is_none() {
            return Err(Error::Config(format!("rate {rate} is not a second-stage rate")));
        }
        Ok(self.stage1_budget - self.k..self.cumulative_budget(rate) - self.k)
    }
}

/// Tag side: one mother-code encoding feeds both stages.
#[derive(Debug, Clone)]
pub struct Tag {
    plan: SessionPlan,
    spec: CodeSpec,
    codeword: Codeword,
    crc: u16,
}

impl Tag {
    pub fn new(info: &[u8], plan: SessionPlan) -> Result<Self> {
        if info.len() != plan.k {
            return Err(Error::LengthMismatch { expected: plan.k, got: info.len() });
        }
        let spec = plan.mother_spec()?;
        let codeword = encode_systematic_streaming(info, &spec)?;
        Ok(Self { plan, spec, codeword, crc: crc16(info) })
    }

    pub fn codeword(&self) -> &Codeword {
        &self.codeword
    }

    fn frame(&self, header: PacketHeader, positions: Vec<usize>, crc16: Option<u16>) -> Frame {
        let payload = positions.iter().map(|&p| self.codeword.bits()[p]).collect();
        Frame { header, positions, payload, crc16 }
    }

    /// Info positions plus the first parity slice, with CRC. The rate
    /// field is unused on first frames and left at 0.
    pub fn stage1(&self) -> Frame {
        let parity = self.plan.stage1_budget - self.plan.k;
        let positions = self
            .spec
            .info_set()
            .iter()
            .copied()
            .chain(self.spec.parity_schedule().take(parity))
            .collect();
        let header = PacketHeader::new(0, self.plan.length_code(), 0).expect("valid header fields");
        self.frame(header, positions, Some(self.crc))
    }

    /// The next parity slice up to the cumulative budget of `rate`.
    pub fn stage2(&self, rate: Rate) -> Result<Frame> {
        let range = self.plan.stage2_range(rate)?;
        let positions = self.spec.parity_schedule().skip(range.start).take(range.len()).collect();
        let code = rate.code().expect("checked by stage2_range");
        let header = PacketHeader::new(code, self.plan.length_code(), 1)?;
        Ok(self.frame(header, positions, None))
    }
}

pub fn tag_stage1(info: &[u8], plan: &SessionPlan) -> Result<Frame> {
    Ok(Tag::new(info, *plan)?.stage1())
}

pub fn tag_stage2(info: &[u8], plan: &SessionPlan, requested_rate: Rate) -> Result<Frame> {
    Tag::new(info, *plan)?.stage2(requested_rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GatewayDecision {
    Ack,
    RequestRate(Rate),
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GatewayState {
    AwaitFirst,
    AwaitSecond(Rate),
    Acked,
    Failed,
}

/// What the gateway learned from its most recent decode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub fber: f64,
    pub iterations: usize,
    pub converged: bool,
    pub crc_ok: bool,
    pub info_bits: Vec<u8>,
}

/// Gateway side of one session.
#[derive(Debug, Clone)]
pub struct GatewaySession {
    plan: SessionPlan,
    decoder: BpDecoder,
    cfg: BpConfig,
    accumulated: ChannelLLRs,
    received: Vec<bool>,
    crc: Option<u16>,
    state: GatewayState,
    last: Option<DecodeReport>,
}

impl GatewaySession {
    pub fn new(plan: SessionPlan, cfg: BpConfig) -> Result<Self> {
        let spec = plan.mother_spec()?;
        Ok(Self {
            plan,
            decoder: BpDecoder::new(&spec),
            cfg: BpConfig { early_stop: EarlyStop::Crc, ..cfg },
            accumulated: ChannelLLRs::zeros(plan.n_mother),
            received: vec![false; plan.n_mother],
            crc: None,
            state: GatewayState::AwaitFirst,
            last: None,
        })
    }

    pub fn last_report(&self) -> Option<&DecodeReport> {
        self.last.as_ref()
    }

    /// Decoded info bits once the session has been acknowledged.
    pub fn delivered(&self) -> Option<&[u8]> {
        match self.state {
            GatewayState::Acked => self.last.as_ref().map(|r| r.info_bits.as_slice()),
            _ => None,
        }
    }

    /// Folds one frame's payload LLRs into the session and decides.
    pub fn on_frame(&mut self, frame: &Frame, payload_llrs: &[f64]) -> Result<GatewayDecision> {
        frame.validate()?;
        if payload_llrs.len() != frame.positions.len() {
            return Err(Error::LengthMismatch {
                expected: frame.positions.len(),
                got: payload_llrs.len(),
            });
        }
        if frame.header.length_code() != self.plan.length_code() {
            return Err(Error::Protocol(format!(
                "length code {} does not match session ({})",
                frame.header.length_code(),
                self.plan.length_code()
            )));
        }
        if let Some(&p) = frame.positions.iter().find(|&&p| p >= self.plan.n_mother) {
            return Err(Error::OutOfRange { index: p, len: self.plan.n_mother });
        }
        let id = frame.header.packet_id();
        match (self.state, id) {
            (GatewayState::Acked, _) => return Ok(GatewayDecision::Ack),
            (GatewayState::Failed, _) => return Ok(GatewayDecision::Fail),
            (GatewayState::AwaitFirst, 0) => self.crc = frame.crc16,
            (GatewayState::AwaitSecond(rate), 1) => {
                if Rate::from_code(frame.header.rate_code())? != rate {
                    self.state = GatewayState::Failed;
                    return Ok(GatewayDecision::Fail);
                }
            }
            (state, id) => {
                return Err(Error::Protocol(format!("frame id {id} unexpected in state {state:?}")))
            }
        }

        let mut fresh = ChannelLLRs::zeros(self.plan.n_mother);
        for (&p, &l) in frame.positions.iter().zip(payload_llrs) {
            if !std::mem::replace(&mut self.received[p], true) {
                fresh.0[p] = l;
            }
        }
        self.accumulated = combine_llrs(&[self.accumulated.clone(), fresh])?;

        let crc = self.crc.expect("set by the first frame");
        let result = self
            .decoder
            .decode_with_check(&self.accumulated, &self.cfg, |info| crc16_verify(info, crc))?;
        let crc_ok = crc16_verify(&result.info_bits, crc);
        self.last = Some(DecodeReport {
            fber: result.fber,
            iterations: result.iterations_used,
            converged: result.converged,
            crc_ok,
            info_bits: result.info_bits,
        });

        let decision = match (crc_ok, id) {
            (true, _) => {
                self.state = GatewayState::Acked;
                GatewayDecision::Ack
            }
            (false, 0) => {
                let rate = estimate_rate(result.fber);
                self.state = GatewayState::AwaitSecond(rate);
                GatewayDecision::RequestRate(rate)
            }
            (false, _) => {
                self.state = GatewayState::Failed;
                GatewayDecision::Fail
            }
        };
        Ok(decision)
    }
}

/// Tag reaction to the feedback (or its absence) after stage 1.
pub fn tag_on_feedback(heard: Option<FeedbackMsg>) -> Option<Rate> {
    match heard {
        Some(FeedbackMsg::Ack) => None,
        Some(FeedbackMsg::RequestRate(rate)) => Some(rate),
        None => Some(FALLBACK_RATE),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_k96() {
        let plan = plan_session(96).unwrap();
        assert_eq!(plan.n_mother, 1024);
        assert_eq!(plan.stage1_budget, 128);
        assert_eq!(plan.design_erasure, 0.875);
        assert_eq!(plan.cumulative_budget(Rate::EIGHTH), 768);
        let budgets: Vec<usize> = super::super::rate::RATE_TABLE
            .iter()
            .map(|&r| plan.cumulative_budget(r))
            .collect();
        assert!(budgets.windows(2).all(|w| w[0] < w[1]));
        assert!(plan.stage1_budget < budgets[0]);
        assert!(plan_session(7).is_err());
        assert!(plan_session(513).is_err());
    }

    #[test]
    fn budgets_fit_mother_for_all_k() {
        for k in MIN_K..=MAX_K {
            let plan = plan_session(k).unwrap();
            assert!(plan.cumulative_budget(Rate::EIGHTH) <= plan.n_mother);
            assert!(plan.stage1_budget < plan.cumulative_budget(Rate::TWO_THIRDS));
        }
    }

    fn info(k: usize) -> Vec<u8> {
        (0..k).map(|i| ((i * 5 + 1) % 3 % 2) as u8).collect()
    }

    #[test]
    fn stage_frames_k96() {
        let plan = plan_session(96).unwrap();
        let tag = Tag::new(&info(96), plan).unwrap();
        let f1 = tag.stage1();
        assert_eq!(f1.coded_bits(), 128);
        assert!(f1.crc16.is_some());
        assert_eq!(f1.header.packet_id(), 0);
        let f2 = tag.stage2(Rate::HALF).unwrap();
        assert_eq!(f2.coded_bits(), 64);
        assert!(f2.crc16.is_none());
        assert_eq!(f2.header.packet_id(), 1);
        assert_eq!(tag.stage2(Rate::TWO_THIRDS).unwrap().coded_bits(), 16);
        assert!(tag.stage2(Rate::THREE_QUARTERS).is_err());

        let mut seen = vec![false; plan.n_mother];
        for &p in f1.positions.iter().chain(&f2.positions) {
            assert!(!std::mem::replace(&mut seen[p], true), "position {p} sent twice");
        }
        let spec = plan.mother_spec().unwrap();
        let schedule: Vec<usize> = spec.parity_schedule().collect();
        let parity_sent: Vec<usize> =
            f1.positions[96..].iter().chain(&f2.positions).copied().collect();
        assert_eq!(parity_sent, schedule[..parity_sent.len()]);
        // info positions carry the info verbatim
        let carried: Vec<u8> = f1.payload[..96].to_vec();
        assert_eq!(carried, info(96));
    }

    #[test]
    fn gateway_acks_clean_frame() {
        let plan = plan_session(16).unwrap();
        let tag = Tag::new(&info(16), plan).unwrap();
        let f1 = tag.stage1();
        let llrs: Vec<f64> = f1.payload.iter().map(|&b| if b == 0 { 20.0 } else { -20.0 }).collect();
        let mut gw = GatewaySession::new(plan, BpConfig::default()).unwrap();
        assert_eq!(gw.on_frame(&f1, &llrs).unwrap(), GatewayDecision::Ack);
        assert_eq!(gw.delivered().unwrap(), info(16).as_slice());
        // a late stage-2 frame is ignored
        let f2 = tag.stage2(Rate::TWO_THIRDS).unwrap();
        let zeros = vec![0.0; f2.coded_bits()];
        assert_eq!(gw.on_frame(&f2, &zeros).unwrap(), GatewayDecision::Ack);
    }

    #[test]
    fn gateway_requests_then_fails() {
        let plan = plan_session(16).unwrap();
        let tag = Tag::new(&info(16), plan).unwrap();
        let f1 = tag.stage1();
        let mut gw = GatewaySession::new(plan, BpConfig::default()).unwrap();
        // erased payload cannot pass the CRC
        let d = gw.on_frame(&f1, &vec![0.0; f1.coded_bits()]).unwrap();
        let GatewayDecision::RequestRate(rate) = d else { panic!("got {d:?}") };
        assert_eq!(rate, Rate::TWO_THIRDS);
        let f2 = tag.stage2(rate).unwrap();
        let d2 = gw.on_frame(&f2, &vec![0.0; f2.coded_bits()]).unwrap();
        assert_eq!(d2, GatewayDecision::Fail);
    }

    #[test]
    fn gateway_rejects_protocol_errors() {
        let plan = plan_session(16).unwrap();
        let tag = Tag::new(&info(16), plan).unwrap();
        let f2 = tag.stage2(Rate::HALF).unwrap();
        let mut gw = GatewaySession::new(plan, BpConfig::default()).unwrap();
        assert!(matches!(
            gw.on_frame(&f2, &vec![0.0; f2.coded_bits()]),
            Err(Error::Protocol(_))
        ));
        let f1 = tag.stage1();
        assert!(gw.on_frame(&f1, &[0.0]).is_err());
        let mut bad = f1.clone();
        bad.positions[0] = plan.n_mother;
        assert!(gw.on_frame(&bad, &vec![0.0; bad.coded_bits()]).is_err());
    }

    #[test]
    fn mismatched_second_rate_fails_session() {
        let plan = plan_session(16).unwrap();
        let tag = Tag::new(&info(16), plan).unwrap();
        let mut gw = GatewaySession::new(plan, BpConfig::default()).unwrap();
        let f1 = tag.stage1();
        let d = gw.on_frame(&f1, &vec![0.0; f1.coded_bits()]).unwrap();
        assert_eq!(d, GatewayDecision::RequestRate(Rate::TWO_THIRDS));
        let f2 = tag.stage2(Rate::EIGHTH).unwrap();
        assert_eq!(gw.on_frame(&f2, &vec![5.0; f2.coded_bits()]).unwrap(), GatewayDecision::Fail);
    }

    #[test]
    fn tag_reaction() {
        assert_eq!(tag_on_feedback(Some(FeedbackMsg::Ack)), None);
        assert_eq!(tag_on_feedback(Some(FeedbackMsg::RequestRate(Rate::QUARTER))), Some(Rate::QUARTER));
        assert_eq!(tag_on_feedback(None), Some(FALLBACK_RATE));
    }
}
