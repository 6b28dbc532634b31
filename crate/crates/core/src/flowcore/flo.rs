//! Middlebury `.flo` files: the float 202021.25 ("PIEH"), width and height as
//! little-endian i32, then interleaved (u, v) f32 pairs in row-major order.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::flowcore::FlowField;

pub const FLO_MAGIC: f32 = 202021.25;

pub fn encode_flo(flow: &FlowField) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + flow.u.len() * 8);
    out.extend_from_slice(&FLO_MAGIC.to_le_bytes());
    out.extend_from_slice(&(flow.width as i32).to_le_bytes());
    out.extend_from_slice(&(flow.height as i32).to_le_bytes());
    for (u, v) in flow.u.iter().zip(&flow.v) {
        out.extend_from_slice(&(*u as f32).to_le_bytes());
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out
}

pub fn decode_flo(bytes: &[u8]) -> Result<FlowField> {
    let word = |i: usize| -> Result<[u8; 4]> {
        bytes
            .get(i * 4..i * 4 + 4)
            .map(|b| [b[0], b[1], b[2], b[3]])
            .ok_or_else(|| Error::Format(".flo header truncated".into()))
    };
    if f32::from_le_bytes(word(0)?) != FLO_MAGIC {
        return Err(Error::Format("bad .flo magic".into()));
    }
    let width = i32::from_le_bytes(word(1)?);
    let height = i32::from_le_bytes(word(2)?);
    if width <= 0 || height <= 0 {
        return Err(Error::Format(format!(".flo has bad size {width}x{height}")));
    }
    let (width, height) = (width as usize, height as usize);
    let n = width * height;
    let need = 12 + n * 8;
    if bytes.len() < need {
        return Err(Error::Truncated {
            frame: 0,
            expected: need,
            got: bytes.len(),
        });
    }
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for pair in bytes[12..need].chunks_exact(8) {
        u.push(f64::from(f32::from_le_bytes([
            pair[0], pair[1], pair[2], pair[3],
        ])));
        v.push(f64::from(f32::from_le_bytes([
            pair[4], pair[5], pair[6], pair[7],
        ])));
    }
    FlowField::new(width, height, u, v)
}

pub fn write_flo(path: &Path, flow: &FlowField) -> Result<()> {
    fs::write(path, encode_flo(flow)).map_err(|e| Error::io(path, e))
}

pub fn read_flo(path: &Path) -> Result<FlowField> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_flo(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let bytes = encode_flo(&FlowField::constant(3, 2, 1.5, -0.25));
        assert_eq!(&bytes[..4], b"PIEH");
        assert_eq!(bytes.len(), 12 + 6 * 8);
        assert_eq!(i32::from_le_bytes(bytes[4..8].try_into().unwrap()), 3);
        assert_eq!(f32::from_le_bytes(bytes[12..16].try_into().unwrap()), 1.5);
        assert_eq!(f32::from_le_bytes(bytes[16..20].try_into().unwrap()), -0.25);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(decode_flo(b"PIEX\0\0\0\0\0\0\0\0").is_err());
        let mut bytes = encode_flo(&FlowField::zeros(4, 4));
        bytes.pop();
        assert!(matches!(decode_flo(&bytes), Err(Error::Truncated { .. })));
    }

    proptest! {
        #[test]
        fn f32_representable_fields_roundtrip(
            w in 1usize..8, h in 1usize..8,
            vals in proptest::collection::vec(-1e4f32..1e4, 128)
        ) {
            let n = w * h;
            let u: Vec<f64> = vals[..n].iter().map(|&x| x as f64).collect();
            let v: Vec<f64> = vals[64..64 + n].iter().map(|&x| x as f64).collect();
            let flow = FlowField::new(w, h, u, v).unwrap();
            prop_assert_eq!(decode_flo(&encode_flo(&flow)).unwrap(), flow);
        }
    }
}
