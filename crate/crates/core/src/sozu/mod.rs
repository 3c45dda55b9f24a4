//! Two-stage rate adaptation over one punctured systematic mother code.

pub mod crc;
pub mod feedback;
pub mod frame;
pub mod header;
pub mod rate;
pub mod session;
pub mod trace;

pub use crc::{crc16, crc16_verify};
pub use feedback::{feedback_channel, FeedbackChannel, FeedbackMsg};
pub use frame::Frame;
pub use header::{header_decode, header_encode, PacketHeader, HEADER_BITS};
pub use rate::{estimate_rate, Rate, FBER_EDGES, RATE_TABLE};
pub use session::{
    plan_session, tag_on_feedback, tag_stage1, tag_stage2, GatewayDecision, GatewaySession,
    SessionPlan, Tag, FALLBACK_RATE,
};
pub use trace::{replay_session, run_session, verify_replay, FrameRecord, SessionTrace};
