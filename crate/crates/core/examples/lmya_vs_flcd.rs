//! Binomial placement against the flexible design on the same (K, r).
//!
//! The binomial design reaches a lower load but needs C(K, r) files; the
//! flexible design trades some load for far fewer files and groups. Both are
//! executed bit-exactly on small instances.

use coded_shuffle::analysis::{counts_flcd, counts_lmya, load_flcd_general, load_lmya};
use coded_shuffle::simnet::predict_vs_measure;
use coded_shuffle::{BuildOptions, Result, SchemeParams};
use num_traits::ToPrimitive;

fn main() -> Result<()> {
    println!("  K  r   LMYA L        N        G   FLCD L      N      G");
    for (k, r) in [(10, 3), (16, 3), (16, 5), (22, 4), (30, 4), (40, 6)] {
        let (ln, lg) = counts_lmya(k, r)?;
        let (fnn, fg) = counts_flcd(k, r)?;
        println!(
            "{k:3} {r:2} {:8.4} {ln:8} {lg:8} {:8.4} {fnn:6} {fg:6}",
            load_lmya(k, r)?.to_f64().unwrap(),
            load_flcd_general(k, r)?.to_f64().unwrap(),
        );
    }

    let opts = BuildOptions::default();
    for (k, r) in [(8, 3), (10, 4)] {
        let lmya = SchemeParams::Lmya {
            nodes: k,
            load: r,
            iv_bits: 1,
        };
        let flcd = SchemeParams::FlcdGeneral {
            nodes: k,
            load: r,
            base_t1: 1,
        };
        for params in [lmya, flcd] {
            let c = predict_vs_measure(&params, &opts, 7)?;
            println!(
                "K={k} r={r} {:<5} files {:4} broadcasts {:5} load {} (exact: {})",
                c.scheme,
                c.files,
                c.broadcasts,
                c.measured,
                c.exact()
            );
        }
    }
    Ok(())
}
