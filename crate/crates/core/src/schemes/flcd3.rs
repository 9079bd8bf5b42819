use num_integer::Integer;

use crate::error::{Error, Result};
use crate::model::{Demand, IvSizeProfile, NetworkConfig, PlacementPlan, ShufflePlan};

use super::{equal_split_group, Scheme, SchemeId};

/// File-set sizing of the three-node design.
///
/// Files mapped at node pair `{i, j}` form a set whose IVs for the third node
/// `k` total `B` bits: `|M_{01}|·T_2 = |M_{02}|·T_1 = |M_{12}|·T_0 = B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flcd3Sizes {
    /// Sizes as requested.
    pub requested: [u64; 3],
    /// Sizes actually used; doubled when that is needed to make `B` even.
    pub sizes: [u64; 3],
    pub scale: u64,
    /// Bits in each requested IV set.
    pub block_bits: u64,
    /// `[|M_{01}|, |M_{02}|, |M_{12}|]`
    pub pair_files: [usize; 3],
}

impl Flcd3Sizes {
    pub fn files(&self) -> usize {
        self.pair_files.iter().sum()
    }
}

pub fn flcd3_layout(sizes: [u64; 3], scale: u64) -> Result<Flcd3Sizes> {
    if sizes.contains(&0) {
        return Err(Error::InvalidParams(format!(
            "IV sizes must be positive, got {sizes:?}"
        )));
    }
    if scale == 0 {
        return Err(Error::InvalidParams("scale must be positive".into()));
    }
    let lcm = sizes.iter().fold(1u64, |acc, t| acc.lcm(t));
    let mut block_bits = lcm
        .checked_mul(scale)
        .ok_or(Error::Overflow("IV set size"))?;
    let mut used = sizes;
    if block_bits % 2 == 1 {
        // Doubling every T_k keeps the file counts and makes B even.
        used = sizes.map(|t| 2 * t);
        block_bits *= 2;
    }
    let pair_files = [
        (block_bits / used[2]) as usize,
        (block_bits / used[1]) as usize,
        (block_bits / used[0]) as usize,
    ];
    Ok(Flcd3Sizes {
        requested: sizes,
        sizes: used,
        scale,
        block_bits,
        pair_files,
    })
}

/// Three nodes, computation load two, arbitrary IV sizes.
///
/// A single shuffle group of three broadcasts: each node XORs its half of the
/// two IV sets it shares with the other nodes, taking the first half when it is
/// the lower-numbered node of the pair.
pub fn build_flcd3(sizes: [u64; 3], scale: u64) -> Result<Scheme> {
    let layout = flcd3_layout(sizes, scale)?;
    let profile = IvSizeProfile::new(layout.sizes.to_vec())?;
    let pairs = [[0, 1], [0, 2], [1, 2]];

    let mut groups = Vec::with_capacity(layout.files());
    let mut pair_sets = Vec::new();
    for (pair, &count) in pairs.iter().zip(&layout.pair_files) {
        let start = groups.len();
        groups.extend(std::iter::repeat_n(pair.to_vec(), count));
        pair_sets.push((start..groups.len()).collect::<Vec<_>>());
    }
    let placement = PlacementPlan::new(3, 2, groups)?;

    let demands = (0..3)
        .map(|target| {
            let p = pairs
                .iter()
                .position(|pair| !pair.contains(&target))
                .expect("each node misses exactly one pair");
            Demand {
                target,
                files: pair_sets[p].clone(),
                senders: pairs[p].to_vec(),
            }
        })
        .collect();
    let shuffle = ShufflePlan {
        groups: vec![equal_split_group(vec![0, 1, 2], demands, &profile)?],
    };

    Ok(Scheme {
        id: SchemeId::Flcd3,
        config: NetworkConfig::new(3, 2)?,
        placement,
        shuffle,
        profile,
    })
}
