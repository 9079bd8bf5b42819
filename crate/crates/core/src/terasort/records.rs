use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Serialized size of a [`Record`].
pub const RECORD_BYTES: usize = 20;
pub const RECORD_BITS: u64 = RECORD_BYTES as u64 * 8;

/// A 16-bit key with a payload of nine 16-bit words.
///
/// Ordering is by key, then payload, so sorting is total and deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Record {
    pub key: u16,
    pub value: [u16; 9],
}

impl Record {
    pub fn to_bytes(&self) -> [u8; RECORD_BYTES] {
        let mut out = [0u8; RECORD_BYTES];
        out[..2].copy_from_slice(&self.key.to_le_bytes());
        for (i, w) in self.value.iter().enumerate() {
            out[2 + 2 * i..4 + 2 * i].copy_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8; RECORD_BYTES]) -> Self {
        let word = |i: usize| u16::from_le_bytes([bytes[2 * i], bytes[2 * i + 1]]);
        Record {
            key: word(0),
            value: std::array::from_fn(|i| word(i + 1)),
        }
    }
}

pub fn encode_records(records: &[Record]) -> Vec<u8> {
    records.iter().flat_map(|r| r.to_bytes()).collect()
}

pub fn decode_records(bytes: &[u8]) -> Result<Vec<Record>> {
    if !bytes.len().is_multiple_of(RECORD_BYTES) {
        return Err(Error::TruncatedDataset(bytes.len()));
    }
    Ok(bytes
        .chunks_exact(RECORD_BYTES)
        .map(|c| Record::from_bytes(c.try_into().expect("exact chunk")))
        .collect())
}

/// `count` records with keys uniform on `[0, key_bound)` and uniform payloads.
pub fn generate_records(count: usize, key_bound: u32, seed: u64) -> Result<Vec<Record>> {
    if key_bound == 0 || key_bound > 1 << 16 {
        return Err(Error::InvalidParams(format!(
            "key bound must be in 1..=65536, got {key_bound}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| Record {
            key: rng.gen_range(0..key_bound) as u16,
            value: rng.gen(),
        })
        .collect())
}

pub fn write_dataset(path: &Path, records: &[Record]) -> Result<()> {
    fs::write(path, encode_records(records))?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<Vec<Record>> {
    decode_records(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn little_endian_layout() {
        let r = Record {
            key: 0x0102,
            value: [0xAABB; 9],
        };
        let bytes = r.to_bytes();
        assert_eq!(&bytes[..4], &[0x02, 0x01, 0xBB, 0xAA]);
        assert_eq!(Record::from_bytes(&bytes), r);
    }

    #[test]
    fn dataset_round_trip() {
        let records = generate_records(50, 1 << 16, 9).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.bin");
        write_dataset(&path, &records).unwrap();
        assert_eq!(fs::metadata(&path).unwrap().len(), 1000);
        assert_eq!(read_dataset(&path).unwrap(), records);
    }

    #[test]
    fn truncated_input_is_rejected() {
        assert_eq!(decode_records(&[0; 21]), Err(Error::TruncatedDataset(21)));
        assert_eq!(decode_records(&[]).unwrap(), vec![]);
    }

    #[test]
    fn generator_respects_bound_and_seed() {
        let a = generate_records(200, 20, 1).unwrap();
        assert!(a.iter().all(|r| r.key < 20));
        assert_eq!(a, generate_records(200, 20, 1).unwrap());
        assert_ne!(a, generate_records(200, 20, 2).unwrap());
        assert!(generate_records(1, 0, 0).is_err());
    }
}
