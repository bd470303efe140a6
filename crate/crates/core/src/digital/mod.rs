//! Modular (separate source and channel coding) transmission chain and the
//! classical single-stream baseline.

pub mod baseline;
pub mod bits;
pub mod chain;
pub mod conv;
pub mod crc;
pub mod entropy;
pub mod modem;
pub mod packet;
pub mod quant;

pub use baseline::{baseline_classical, baseline_decode_bits, baseline_encode, BaselineFrame, BaselineOutcome};
pub use chain::{
    decode_info_bits, decode_sfv_digital, digital_roundtrip, encode_sfv_digital, pack_blocks,
    side_info_roundtrip, side_info_symbols,
    DigitalDecoded, DigitalFrame, DigitalRoundtrip,
};
pub use conv::{ChannelCode, ConvK7};
pub use crc::crc16;
pub use modem::{qpsk_llr, qpsk_modulate, symbol_gains, transmit};
pub use quant::{choose_step, dequantize, quantize, StepChoice};
