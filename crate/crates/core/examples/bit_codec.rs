//! Segment-level coding on bit strings: cut IVs at arbitrary bit offsets,
//! XOR equal-length pieces into one message, and cancel the known pieces at
//! a receiver.

use coded_shuffle::bits::{concat_segments, xor_segments};
use coded_shuffle::{BitString, Result};

fn main() -> Result<()> {
    let a: BitString = "1011_0110_1".parse()?;
    let b: BitString = "0001_1111_0".parse()?;
    let c: BitString = "1100_0000_1".parse()?;

    let (a0, a1) = a.split_at(4)?;
    println!("a = {a:?} splits into {a0:?} and {a1:?}");
    assert_eq!(concat_segments(&[a0, a1]), a);

    let message = xor_segments(&[a.clone(), b.clone(), c.clone()])?;
    println!("a ^ b ^ c = {message:?}");

    // a receiver that already holds b and c recovers a
    let recovered = xor_segments(&[message, b, c])?;
    println!("recovered {recovered:?}");
    assert_eq!(recovered, a);

    let mut frame = BitString::zeros(16);
    frame.write_at(3, &a.slice(2..9)?)?;
    println!("written at bit 3: {frame:?}");
    Ok(())
}
