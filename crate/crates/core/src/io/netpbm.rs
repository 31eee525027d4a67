//! Binary PPM (P6) frames, binary PGM (P5) class masks and raw RGB24 chunks.

use thiserror::Error;

use super::frame::{ClassMap, Frame};
use crate::shadow::PixelClass;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("truncated payload: expected {expected} bytes, got {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("unsupported maxval {0} (only 255 is accepted)")]
    UnsupportedMaxval(u32),
    #[error("mask byte {value} at offset {offset} is not one of 0, 128, 255")]
    InvalidMaskValue { value: u8, offset: usize },
}

pub const MASK_BACKGROUND: u8 = 0;
pub const MASK_SHADOW: u8 = 128;
pub const MASK_FOREGROUND: u8 = 255;

struct Header {
    width: usize,
    height: usize,
    payload_offset: usize,
}

fn parse_header(bytes: &[u8], magic: &[u8; 2]) -> Result<Header, CodecError> {
    if bytes.len() < 2 || &bytes[..2] != magic {
        return Err(CodecError::MalformedHeader(format!(
            "expected magic {}",
            String::from_utf8_lossy(magic)
        )));
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for (n, field) in fields.iter_mut().enumerate() {
        // whitespace and comments before each field
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(CodecError::MalformedHeader("header ends early".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(CodecError::MalformedHeader(format!("header field {n} is not a number")));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = text
            .parse()
            .map_err(|_| CodecError::MalformedHeader(format!("header field {n} out of range")))?;
    }
    // exactly one whitespace byte separates maxval from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(CodecError::MalformedHeader("missing separator after maxval".into())),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(CodecError::MalformedHeader(format!("empty image {width}x{height}")));
    }
    if maxval != 255 {
        return Err(CodecError::UnsupportedMaxval(maxval));
    }
    Ok(Header { width: width as usize, height: height as usize, payload_offset: pos })
}

fn payload<'a>(bytes: &'a [u8], header: &Header, bytes_per_pixel: usize) -> Result<&'a [u8], CodecError> {
    let expected = header.width * header.height * bytes_per_pixel;
    let rest = &bytes[header.payload_offset..];
    if rest.len() < expected {
        return Err(CodecError::TruncatedPayload { expected, found: rest.len() });
    }
    Ok(&rest[..expected])
}

/// Decodes a binary PPM with maxval 255.
pub fn decode_frame(bytes: &[u8], index: u64) -> Result<Frame, CodecError> {
    let header = parse_header(bytes, b"P6")?;
    let data = payload(bytes, &header, 3)?;
    Ok(Frame::new(header.width, header.height, rgb_pixels(data), index))
}

/// Decodes one raw interleaved RGB24 frame of the given dimensions.
pub fn decode_raw_frame(bytes: &[u8], width: usize, height: usize, index: u64) -> Result<Frame, CodecError> {
    let expected = width * height * 3;
    if bytes.len() < expected {
        return Err(CodecError::TruncatedPayload { expected, found: bytes.len() });
    }
    Ok(Frame::new(width, height, rgb_pixels(&bytes[..expected]), index))
}

fn rgb_pixels(data: &[u8]) -> Vec<[u8; 3]> {
    data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()
}

pub fn encode_frame(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.reserve(frame.pixels.len() * 3);
    for px in &frame.pixels {
        out.extend_from_slice(px);
    }
    out
}

pub fn class_to_byte(class: PixelClass) -> u8 {
    match class {
        PixelClass::Background => MASK_BACKGROUND,
        PixelClass::Shadow => MASK_SHADOW,
        PixelClass::Foreground => MASK_FOREGROUND,
    }
}

/// Binary PGM, one byte per pixel: background 0, shadow 128, foreground 255.
pub fn encode_mask(cm: &ClassMap) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", cm.width, cm.height).into_bytes();
    out.extend(cm.classes.iter().map(|&c| class_to_byte(c)));
    out
}

pub fn decode_mask(bytes: &[u8]) -> Result<ClassMap, CodecError> {
    let header = parse_header(bytes, b"P5")?;
    let data = payload(bytes, &header, 1)?;
    let classes = data
        .iter()
        .enumerate()
        .map(|(offset, &value)| match value {
            MASK_BACKGROUND => Ok(PixelClass::Background),
            MASK_SHADOW => Ok(PixelClass::Shadow),
            MASK_FOREGROUND => Ok(PixelClass::Foreground),
            _ => Err(CodecError::InvalidMaskValue { value, offset }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ClassMap::from_classes(header.width, header.height, classes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decode_two_pixel_ppm() {
        let mut bytes = b"P6\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[255, 0, 0, 0, 255, 0]);
        let f = decode_frame(&bytes, 3).unwrap();
        assert_eq!((f.width, f.height, f.index), (2, 1, 3));
        assert_eq!(f.pixels, vec![[255, 0, 0], [0, 255, 0]]);
    }

    #[test]
    fn header_comments_and_whitespace() {
        let mut bytes = b"P6 # made by hand\n 1\t1 # size\n255 ".to_vec();
        bytes.extend_from_slice(&[10, 20, 32]);
        assert_eq!(decode_frame(&bytes, 0).unwrap().pixels, vec![[10, 20, 32]]);
    }

    #[test]
    fn truncated_payload() {
        let mut bytes = b"P6\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[1; 11]);
        assert_eq!(
            decode_frame(&bytes, 0),
            Err(CodecError::TruncatedPayload { expected: 12, found: 11 })
        );
        assert!(matches!(decode_raw_frame(&[0; 5], 1, 2, 0), Err(CodecError::TruncatedPayload { .. })));
    }

    #[test]
    fn sixteen_bit_rejected() {
        let bytes = b"P6\n1 1\n65535\n\0\0\0\0\0\0";
        assert_eq!(decode_frame(bytes, 0), Err(CodecError::UnsupportedMaxval(65535)));
    }

    #[test]
    fn malformed_headers() {
        for bad in [&b"P3\n1 1\n255\n"[..], b"P6\n1\n", b"P6\nx 1\n255\n", b"P6\n0 1\n255\n", b"P6\n1 1\n255"] {
            assert!(matches!(decode_frame(bad, 0), Err(CodecError::MalformedHeader(_))), "{bad:?}");
        }
    }

    #[test]
    fn raw_frame_layout() {
        let f = decode_raw_frame(&[1, 2, 3, 4, 5, 6, 7], 2, 1, 9).unwrap();
        assert_eq!(f.pixels, vec![[1, 2, 3], [4, 5, 6]]);
    }

    #[test]
    fn mask_encoding() {
        let mut cm = ClassMap::new(3, 2);
        let bytes = encode_mask(&cm);
        assert_eq!(&bytes[..11], b"P5\n3 2\n255\n");
        assert!(bytes[11..].iter().all(|&b| b == 0));
        cm.classes[4] = PixelClass::Shadow;
        let bytes = encode_mask(&cm);
        assert_eq!(bytes[11 + 4], 128);
        assert_eq!(bytes.len(), 11 + 6);
    }

    #[test]
    fn mask_rejects_other_values() {
        let bytes = b"P5\n2 1\n255\n\x00\x07";
        assert_eq!(decode_mask(bytes), Err(CodecError::InvalidMaskValue { value: 7, offset: 1 }));
    }

    fn class() -> impl Strategy<Value = PixelClass> {
        prop_oneof![Just(PixelClass::Background), Just(PixelClass::Foreground), Just(PixelClass::Shadow)]
    }

    proptest! {
        #[test]
        fn mask_round_trip(w in 1usize..12, h in 1usize..12, seed in proptest::collection::vec(class(), 144)) {
            let cm = ClassMap::from_classes(w, h, seed[..w * h].to_vec());
            prop_assert_eq!(decode_mask(&encode_mask(&cm)).unwrap(), cm);
        }

        #[test]
        fn frame_round_trip(w in 1usize..9, h in 1usize..9, data in proptest::collection::vec(any::<u8>(), 192)) {
            let f = Frame::new(w, h, rgb_pixels(&data[..w * h * 3]), 0);
            prop_assert_eq!(decode_frame(&encode_frame(&f), 0).unwrap(), f);
        }
    }
}
