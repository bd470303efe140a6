//! MSB-first bit strings with order-0 Exp-Golomb codes.

pub type Bits = Vec<bool>;

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bits: Bits,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn put_bit(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Writes the low `n` bits of `value`, most significant first.
    pub fn put_bits(&mut self, value: u64, n: u32) {
        for shift in (0..n).rev() {
            self.bits.push((value >> shift) & 1 == 1);
        }
    }

    pub fn put_slice(&mut self, bits: &[bool]) {
        self.bits.extend_from_slice(bits);
    }

    /// Order-0 Exp-Golomb: `n` zeros, then the `n + 1` bits of `value + 1`.
    pub fn put_exp_golomb(&mut self, value: u32) {
        let v = value as u64 + 1;
        let n = 63 - v.leading_zeros();
        self.put_bits(0, n);
        self.put_bits(v, n + 1);
    }

    pub fn finish(self) -> Bits {
        self.bits
    }
}

pub fn exp_golomb_len(value: u32) -> usize {
    let v = value as u64 + 1;
    2 * (63 - v.leading_zeros() as usize) + 1
}

/// Signed to unsigned interleave: 0, -1, 1, -2, 2, ... -> 0, 1, 2, 3, 4, ...
pub fn zigzag_map(v: i32) -> u32 {
    ((v << 1) ^ (v >> 31)) as u32
}

pub fn zigzag_unmap(u: u32) -> i32 {
    ((u >> 1) as i32) ^ -((u & 1) as i32)
}

/// Longest Exp-Golomb prefix accepted before a stream is declared corrupt.
const MAX_PREFIX: u32 = 24;

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn get_bit(&mut self) -> Option<bool> {
        let b = *self.bits.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }

    pub fn get_bits(&mut self, n: u32) -> Option<u64> {
        if self.remaining() < n as usize {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..n {
            v = (v << 1) | self.get_bit()? as u64;
        }
        Some(v)
    }

    pub fn get_exp_golomb(&mut self) -> Option<u32> {
        let mut zeros = 0;
        while !self.get_bit()? {
            zeros += 1;
            if zeros > MAX_PREFIX {
                return None;
            }
        }
        let rest = self.get_bits(zeros)?;
        Some((((1u64 << zeros) | rest) - 1) as u32)
    }
}

/// Packs a bit string into bytes, zero-padding the final byte.
pub fn to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i))))
        .collect()
}

pub fn from_bytes(bytes: &[u8]) -> Bits {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |s| (byte >> s) & 1 == 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(v: u32) -> String {
        let mut w = BitWriter::new();
        w.put_exp_golomb(v);
        w.finish().iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    #[test]
    fn exp_golomb_codewords() {
        assert_eq!(code(0), "1");
        assert_eq!(code(1), "010");
        assert_eq!(code(2), "011");
        assert_eq!(code(3), "00100");
        assert_eq!(code(6), "00111");
        for v in [0, 1, 2, 3, 7, 100, 65535] {
            assert_eq!(code(v).len(), exp_golomb_len(v));
        }
    }

    #[test]
    fn exp_golomb_round_trip() {
        let values = [0u32, 1, 2, 5, 17, 1000, 1 << 20];
        let mut w = BitWriter::new();
        values.iter().for_each(|&v| w.put_exp_golomb(v));
        let bits = w.finish();
        let mut r = BitReader::new(&bits);
        for &v in &values {
            assert_eq!(r.get_exp_golomb(), Some(v));
        }
        assert_eq!(r.get_exp_golomb(), None);
    }

    #[test]
    fn long_zero_run_is_rejected() {
        let bits = vec![false; 40];
        assert_eq!(BitReader::new(&bits).get_exp_golomb(), None);
    }

    #[test]
    fn signed_interleave() {
        let pairs = [(0, 0), (-1, 1), (1, 2), (-2, 3), (2, 4)];
        for (s, u) in pairs {
            assert_eq!(zigzag_map(s), u);
            assert_eq!(zigzag_unmap(u), s);
        }
    }

    #[test]
    fn byte_packing() {
        let bits = from_bytes(&[0xA5, 0x01]);
        assert_eq!(to_bytes(&bits), vec![0xA5, 0x01]);
        assert_eq!(to_bytes(&[true, true]), vec![0xC0]);
    }
}
