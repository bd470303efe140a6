//! Packets carrying whole entropy-coded blocks of one SFV.
//!
//! ```text
//! sfv_label:8 seq:8 first_block_index:16 payload_bits:16 payload crc:16
//! ```
//!
//! Header fields are big-endian; the CRC-16/CCITT-FALSE covers header and
//! payload. Because each packet names its first block and holds whole
//! blocks, a damaged packet costs exactly its own block range.

use super::bits::{BitReader, BitWriter, Bits};
use super::crc::crc16_bits;

pub const HEADER_BITS: usize = 48;
pub const CRC_BITS: usize = 16;
pub const PACKET_OVERHEAD: usize = HEADER_BITS + CRC_BITS;
pub const MAX_PAYLOAD_BITS: usize = 4096;
pub const DEFAULT_PAYLOAD_BITS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub sfv_label: u8,
    pub seq: u8,
    pub first_block: u16,
    /// Number of blocks carried; derived from block boundaries, not sent.
    pub n_blocks: usize,
    pub payload: Bits,
}

impl Packet {
    pub fn len(&self) -> usize {
        PACKET_OVERHEAD + self.payload.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payload.is_empty()
    }

    fn header(&self) -> BitWriter {
        let mut w = BitWriter::new();
        w.put_bits(self.sfv_label as u64, 8);
        w.put_bits(self.seq as u64, 8);
        w.put_bits(self.first_block as u64, 16);
        w.put_bits(self.payload.len() as u64, 16);
        w
    }

    pub fn to_bits(&self) -> Bits {
        let mut w = self.header();
        w.put_slice(&self.payload);
        let mut bits = w.finish();
        let crc = crc16_bits(&bits);
        bits.extend((0..16).rev().map(|s| (crc >> s) & 1 == 1));
        bits
    }

    pub fn block_range(&self) -> std::ops::Range<usize> {
        let first = self.first_block as usize;
        first..first + self.n_blocks
    }
}

/// Groups per-block codes into packets of at most `limit` payload bits,
/// splitting only at block boundaries. A block larger than `limit` gets a
/// packet of its own.
pub fn packetize(label: u8, block_codes: &[Bits], limit: usize) -> Vec<Packet> {
    let mut packets: Vec<Packet> = Vec::new();
    for (i, code) in block_codes.iter().enumerate() {
        let open = packets
            .last_mut()
            .filter(|p| p.payload.len() + code.len() <= limit);
        match open {
            Some(p) => {
                p.payload.extend_from_slice(code);
                p.n_blocks += 1;
            }
            None => packets.push(Packet {
                sfv_label: label,
                seq: (packets.len() % 256) as u8,
                first_block: u16::try_from(i).expect("block index fits 16 bits"),
                n_blocks: 1,
                payload: code.clone(),
            }),
        }
    }
    packets
}

/// A packet recovered from a bit stream. Its block count is only known after
/// entropy decoding the payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceivedPacket {
    pub seq: u8,
    pub first_block: usize,
    pub payload: Bits,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Depacketized {
    pub packets: Vec<ReceivedPacket>,
    /// Bit offsets at which a plausible header failed its CRC.
    pub crc_failures: Vec<usize>,
}

fn parse_at(bits: &[bool], pos: usize) -> Option<(u8, u8, usize, usize)> {
    let mut r = BitReader::new(bits.get(pos..)?);
    let label = r.get_bits(8)? as u8;
    let seq = r.get_bits(8)? as u8;
    let first = r.get_bits(16)? as usize;
    let len = r.get_bits(16)? as usize;
    Some((label, seq, first, len))
}

/// Scans a frame for valid packets of SFV `label`. After a CRC failure the
/// scan slides bit by bit until the next header that checks out, so one bad
/// packet does not take its successors with it.
pub fn depacketize(bits: &[bool], label: u8, n_blocks: usize) -> Depacketized {
    let mut out = Depacketized::default();
    let mut pos = 0;
    let mut next_block = 0;
    let mut in_sync = true;
    while pos + PACKET_OVERHEAD < bits.len() {
        let plausible = parse_at(bits, pos).filter(|&(l, _, first, len)| {
            l == label
                && len > 0
                && len <= MAX_PAYLOAD_BITS
                && first >= next_block
                && first < n_blocks
                && pos + PACKET_OVERHEAD + len <= bits.len()
        });
        if let Some((_, seq, first, len)) = plausible {
            let body_end = pos + HEADER_BITS + len;
            let crc = BitReader::new(&bits[body_end..]).get_bits(16).map(|v| v as u16);
            if crc == Some(crc16_bits(&bits[pos..body_end])) {
                out.packets.push(ReceivedPacket {
                    seq,
                    first_block: first,
                    payload: bits[pos + HEADER_BITS..body_end].to_vec(),
                });
                next_block = first + 1;
                pos = body_end + CRC_BITS;
                in_sync = true;
                continue;
            }
            if in_sync {
                out.crc_failures.push(pos);
            }
        }
        in_sync = false;
        pos += 1;
    }
    out
}
