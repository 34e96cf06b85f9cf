//! Sample file output: raw little-endian `f32`, or a WAV file with IEEE float
//! samples (format tag 3).

use std::io::{self, Write};

pub const WAVE_FORMAT_IEEE_FLOAT: u16 = 3;

/// Size of the RIFF, `fmt ` and `data` headers together.
pub const HEADER_LEN: usize = 44;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    F32,
    Wav,
}

pub fn write_raw<W: Write>(mut out: W, samples: &[f32]) -> io::Result<()> {
    let mut buf = Vec::with_capacity(samples.len() * 4);
    for s in samples {
        buf.extend_from_slice(&s.to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()
}

/// Mono 32-bit float WAV.
pub fn write_wav<W: Write>(mut out: W, samples: &[f32], sample_rate: u32) -> io::Result<()> {
    let data_len = u32::try_from(samples.len() * 4)
        .ok()
        .filter(|n| *n <= u32::MAX - 36)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "too many samples for a WAV file"))?;
    let channels = 1u16;
    let bits = 32u16;
    let block_align = channels * bits / 8;
    let mut h = Vec::with_capacity(HEADER_LEN);
    h.extend_from_slice(b"RIFF");
    h.extend_from_slice(&(36 + data_len).to_le_bytes());
    h.extend_from_slice(b"WAVE");
    h.extend_from_slice(b"fmt ");
    h.extend_from_slice(&16u32.to_le_bytes());
    h.extend_from_slice(&WAVE_FORMAT_IEEE_FLOAT.to_le_bytes());
    h.extend_from_slice(&channels.to_le_bytes());
    h.extend_from_slice(&sample_rate.to_le_bytes());
    h.extend_from_slice(&(sample_rate * block_align as u32).to_le_bytes());
    h.extend_from_slice(&block_align.to_le_bytes());
    h.extend_from_slice(&bits.to_le_bytes());
    h.extend_from_slice(b"data");
    h.extend_from_slice(&data_len.to_le_bytes());
    debug_assert_eq!(h.len(), HEADER_LEN);
    out.write_all(&h)?;
    write_raw(out, samples)
}

pub fn write<W: Write>(out: W, samples: &[f32], format: Format, sample_rate: u32) -> io::Result<()> {
    match format {
        Format::F32 => write_raw(out, samples),
        Format::Wav => write_wav(out, samples, sample_rate),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_layout() {
        let mut buf = Vec::new();
        write_raw(&mut buf, &[1.0, -0.5]).unwrap();
        assert_eq!(buf, [0, 0, 0x80, 0x3f, 0, 0, 0, 0xbf]);
    }

    #[test]
    fn wav_header_fields() {
        let mut buf = Vec::new();
        write_wav(&mut buf, &[0.25; 3], 44100).unwrap();
        assert_eq!(buf.len(), HEADER_LEN + 12);
        assert_eq!(&buf[0..4], b"RIFF");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 36 + 12);
        assert_eq!(u16::from_le_bytes([buf[20], buf[21]]), 3);
        assert_eq!(u32::from_le_bytes(buf[24..28].try_into().unwrap()), 44100);
        assert_eq!(u16::from_le_bytes([buf[34], buf[35]]), 32);
        assert_eq!(u32::from_le_bytes(buf[40..44].try_into().unwrap()), 12);
    }
}
