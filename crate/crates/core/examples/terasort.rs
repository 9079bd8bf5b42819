//! Sort 10^5 uniform records on 16 nodes with the flexible coded design at
//! several computation loads, and compare shuffle volume with uncoded
//! unicasting of the same records.

use coded_shuffle::terasort::run_terasort;
use coded_shuffle::{BuildOptions, NetworkConfig, Result, SchemeParams};

fn main() -> Result<()> {
    for load in [2, 4, 5] {
        NetworkConfig::new(16, load)?;
        let params = SchemeParams::FlcdGeneral {
            nodes: 16,
            load,
            base_t1: 1,
        };
        let report = run_terasort(&params, &BuildOptions::default(), 100_000, 2024)?;
        print!("{}", report.render());
        println!(
            "relative error of the ratio: {:.4}\n",
            report.ratio_error().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
