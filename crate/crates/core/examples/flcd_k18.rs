//! The flexible design on 18 nodes with computation load 4.
//!
//! K/r = 4.5, so nodes split into two classes: ten nodes in blocks of five
//! whose IVs are 3 bits, and eight in blocks of four whose IVs are 4 bits.
//! Every placement group is one node per block, 400 in all.

use coded_shuffle::schemes::{build_flcd_general, FlcdLayout};
use coded_shuffle::simnet::{simulate, SeededWorkload};
use coded_shuffle::{BuildOptions, NetworkConfig, Result};

fn main() -> Result<()> {
    let config = NetworkConfig::new(18, 4)?;
    let layout = FlcdLayout::new(config, 1)?;
    for (i, block) in layout.blocks.iter().enumerate() {
        println!("block {i}: nodes {block:?}");
    }
    println!("T'1 = {} bits, T'2 = {} bits", layout.t1, layout.t2);

    let scheme = build_flcd_general(config, 1, &BuildOptions::default())?;
    scheme.validate()?;
    let group = &scheme.shuffle.groups[0];
    println!("group 0 = {:?}", group.members);
    for d in &group.demands {
        println!(
            "  node {:2} needs v[{},n] for n in {:?}",
            d.target, d.target, d.files
        );
    }
    for msg in &group.messages {
        println!("  node {:2} broadcasts {} bits", msg.sender, msg.bit_len());
    }

    let sim = simulate(&scheme, &SeededWorkload::new(18))?;
    println!(
        "{} files, {} broadcasts, load {} = {:.4}",
        scheme.files(),
        sim.counters.broadcasts,
        sim.measured_load,
        num_traits::ToPrimitive::to_f64(&sim.measured_load).unwrap()
    );
    Ok(())
}
