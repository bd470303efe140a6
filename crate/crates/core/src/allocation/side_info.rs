//! Side-information wire format (all multi-byte fields big-endian):
//!
//! ```text
//! cols:u8 rows:u8 L:u8  fill[L]:u8  { label:u8 run:u16 }*  [bands]  crc:u16
//! bands = count:u8 { label:u8 n:u8 var[n]:u8 }*
//! ```
//!
//! Runs cover the block map in raster order. The optional band section
//! carries log-quantized per-band coefficient scales for analog decoding.
//! The CRC is CRC-16/CCITT-FALSE over every preceding byte.

use thiserror::Error;

use crate::digital::crc::crc16;
use crate::semantics::SemanticLabelMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandSection {
    pub label: u8,
    /// Quantized scales of the lowest bands, in zig-zag order.
    pub vars: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideInfo {
    pub labels: SemanticLabelMap,
    /// Fill intensity per label.
    pub fills: Vec<u8>,
    pub bands: Vec<BandSection>,
}

/// The side-information stream could not be recovered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("side information lost")]
pub struct SideInfoLost;

pub fn encode_side_info(info: &SideInfo) -> Vec<u8> {
    let labels = &info.labels;
    assert!(labels.cols() <= 255 && labels.rows() <= 255, "block grid too large");
    assert!(labels.num_labels() <= 255, "too many labels");
    assert_eq!(info.fills.len(), labels.num_labels(), "one fill per label");
    let mut out = vec![
        labels.cols() as u8,
        labels.rows() as u8,
        labels.num_labels() as u8,
    ];
    out.extend_from_slice(&info.fills);

    let mut iter = labels.labels().iter().copied().peekable();
    while let Some(label) = iter.next() {
        let mut run: u16 = 1;
        while run < u16::MAX && iter.peek() == Some(&label) {
            iter.next();
            run += 1;
        }
        out.push(label);
        out.extend_from_slice(&run.to_be_bytes());
    }

    if !info.bands.is_empty() {
        out.push(info.bands.len() as u8);
        for section in &info.bands {
            assert!(section.vars.len() <= 255);
            out.push(section.label);
            out.push(section.vars.len() as u8);
            out.extend_from_slice(&section.vars);
        }
    }

    let crc = crc16(&out);
    out.extend_from_slice(&crc.to_be_bytes());
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn next(&mut self) -> Result<u8, SideInfoLost> {
        let b = *self.bytes.get(self.pos).ok_or(SideInfoLost)?;
        self.pos += 1;
        Ok(b)
    }

    fn at_crc(&self) -> bool {
        self.pos + 2 == self.bytes.len()
    }
}

/// Parses everything before the CRC. `with_bands: None` reads a band
/// section iff bytes remain before the last two.
fn parse(c: &mut Cursor<'_>, with_bands: Option<bool>) -> Result<SideInfo, SideInfoLost> {
    let cols = c.next()? as usize;
    let rows = c.next()? as usize;
    let num_labels = c.next()? as usize;
    if cols == 0 || rows == 0 || num_labels == 0 {
        return Err(SideInfoLost);
    }
    let fills = (0..num_labels).map(|_| c.next()).collect::<Result<Vec<u8>, _>>()?;

    let total = cols * rows;
    let mut labels = Vec::with_capacity(total);
    while labels.len() < total {
        let label = c.next()?;
        let run = u16::from_be_bytes([c.next()?, c.next()?]) as usize;
        if run == 0 || labels.len() + run > total {
            return Err(SideInfoLost);
        }
        labels.extend(std::iter::repeat_n(label, run));
    }

    let mut bands = Vec::new();
    if with_bands.unwrap_or(!c.at_crc()) {
        let count = c.next()?;
        for _ in 0..count {
            let label = c.next()?;
            let n = c.next()? as usize;
            let vars = (0..n).map(|_| c.next()).collect::<Result<Vec<u8>, _>>()?;
            bands.push(BandSection { label, vars });
        }
    }

    let labels = SemanticLabelMap::new(cols, rows, labels, num_labels).map_err(|_| SideInfoLost)?;
    Ok(SideInfo {
        labels,
        fills,
        bands,
    })
}

fn check_crc(bytes: &[u8], body_len: usize) -> Result<(), SideInfoLost> {
    let tail = bytes.get(body_len..body_len + 2).ok_or(SideInfoLost)?;
    if crc16(&bytes[..body_len]) == u16::from_be_bytes([tail[0], tail[1]]) {
        Ok(())
    } else {
        Err(SideInfoLost)
    }
}

/// Decodes a stream of exactly the encoded length.
pub fn decode_side_info(bytes: &[u8]) -> Result<SideInfo, SideInfoLost> {
    if bytes.len() < 5 {
        return Err(SideInfoLost);
    }
    check_crc(bytes, bytes.len() - 2)?;
    let mut c = Cursor { bytes, pos: 0 };
    let info = parse(&mut c, None)?;
    if !c.at_crc() {
        return Err(SideInfoLost);
    }
    Ok(info)
}

/// Decodes a stream followed by arbitrary padding. Whether a band section is
/// present must be known in advance.
pub fn decode_side_info_prefix(bytes: &[u8], with_bands: bool) -> Result<SideInfo, SideInfoLost> {
    let mut c = Cursor { bytes, pos: 0 };
    let info = parse(&mut c, Some(with_bands))?;
    check_crc(bytes, c.pos)?;
    Ok(info)
}

/// Label map and fills only.
pub fn encode_label_side_info(labels: &SemanticLabelMap, fills: &[u8]) -> Vec<u8> {
    encode_side_info(&SideInfo {
        labels: labels.clone(),
        fills: fills.to_vec(),
        bands: Vec::new(),
    })
}

pub fn decode_label_side_info(bytes: &[u8]) -> Result<(SemanticLabelMap, Vec<u8>), SideInfoLost> {
    let info = decode_side_info(bytes)?;
    Ok((info.labels, info.fills))
}
