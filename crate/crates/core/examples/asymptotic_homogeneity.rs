//! As K/r grows, the flexible design's two IV sizes and two per-node file
//! counts converge: T'1/T'2 = (f-1)/f and the smaller node class maps f/(f+1)
//! as many files as the larger one, with f = floor(K/r).
//!
//! Each row builds the design with r = 2 and K = 2m and reads both ratios off
//! the constructed placement.

use coded_shuffle::schemes::build_flcd_general;
use coded_shuffle::{BuildOptions, NetworkConfig, Result};

fn main() -> Result<()> {
    println!("   m    K  files  T'1/T'2  min/max |M_k|");
    for k in (5..=41).step_by(2) {
        let config = NetworkConfig::new(k, 2)?;
        let scheme = build_flcd_general(config, 1, &BuildOptions::default())?;
        let sizes = scheme.profile.sizes();
        let t_min = *sizes.iter().min().unwrap();
        let t_max = *sizes.iter().max().unwrap();
        let mapped: Vec<usize> = (0..k).map(|n| scheme.placement.files_of(n).len()).collect();
        let m_min = *mapped.iter().min().unwrap();
        let m_max = *mapped.iter().max().unwrap();
        println!(
            "{:>4}/2 {k:4} {:6} {:>5}/{:<3} {:>7}/{:<3}",
            k,
            scheme.files(),
            t_min,
            t_max,
            m_min,
            m_max
        );
    }
    Ok(())
}
