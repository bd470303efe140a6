//! CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, xorout 0.

const POLY: u16 = 0x1021;
const INIT: u16 = 0xFFFF;

const fn make_table() -> [u16; 256] {
    let mut table = [0u16; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = (i as u16) << 8;
        let mut k = 0;
        while k < 8 {
            crc = if crc & 0x8000 != 0 { (crc << 1) ^ POLY } else { crc << 1 };
            k += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
}

static TABLE: [u16; 256] = make_table();

pub fn crc16(data: &[u8]) -> u16 {
    data.iter().fold(INIT, |crc, &b| {
        (crc << 8) ^ TABLE[((crc >> 8) as u8 ^ b) as usize]
    })
}

/// CRC over an arbitrary-length bit string (MSB-first). Agrees with
/// [`crc16`] when the length is a whole number of bytes.
pub fn crc16_bits(bits: &[bool]) -> u16 {
    bits.iter().fold(INIT, |crc, &b| {
        let feedback = ((crc >> 15) & 1 == 1) ^ b;
        let shifted = crc << 1;
        if feedback {
            shifted ^ POLY
        } else {
            shifted
        }
    })
}
