//! Every built plan can be checked structurally before it runs: operand
//! lengths, side information at each receiver, and exact tiling of every
//! needed IV. A damaged plan is rejected with the offending group named.

use coded_shuffle::schemes::build_lmya;
use coded_shuffle::{BuildOptions, NetworkConfig, Result};

fn main() -> Result<()> {
    let mut scheme = build_lmya(NetworkConfig::new(6, 2)?, 2, &BuildOptions::default())?;
    scheme.validate()?;
    println!(
        "LMYA K=6 r=2: {} files, {} groups, {} broadcasts, plan ok",
        scheme.files(),
        scheme.groups(),
        scheme.shuffle.broadcast_count()
    );

    // drop one slice: some IV is now delivered only in part
    scheme.shuffle.groups[3].messages[1].operands[0]
        .segments
        .clear();
    match scheme.validate() {
        Ok(()) => println!("damaged plan unexpectedly accepted"),
        Err(e) => println!("damaged plan rejected: {e}"),
    }
    Ok(())
}
