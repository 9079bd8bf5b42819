use num_integer::Integer;

use crate::analysis::{counts_flcd, flcd_feasible};
use crate::error::{Error, Result};
use crate::model::{Demand, IvSizeProfile, NetworkConfig, NodeId, PlacementPlan, ShufflePlan};

use super::{equal_split_group, BuildOptions, Scheme, SchemeId};

/// Node partition and IV sizes of the general flexible design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlcdLayout {
    pub config: NetworkConfig,
    /// `T'_1`, the IV size of first-class nodes.
    pub t1: u64,
    /// `T'_2 = ⌊m⌋·T'_1 / (⌊m⌋ - 1)`.
    pub t2: u64,
    /// `r1` blocks of `m̂` nodes followed by `r2` blocks of `⌊m⌋` nodes,
    /// contiguous in node order.
    pub blocks: Vec<Vec<NodeId>>,
}

impl FlcdLayout {
    pub fn new(config: NetworkConfig, base_t1: u64) -> Result<Self> {
        flcd_feasible(config.nodes(), config.load())?;
        if base_t1 == 0 {
            return Err(Error::InvalidParams("T'_1 must be positive".into()));
        }
        let f = config.floor_m() as u64;
        let r = config.load() as u64;
        // f·T'_1 must split into f-1 IVs of the second class and r-1 slices
        let modulus = (f - 1).lcm(&(r - 1));
        let factor = modulus / modulus.gcd(&(f * base_t1));
        let t1 = base_t1
            .checked_mul(factor)
            .ok_or(Error::Overflow("IV size"))?;
        let t2 = f * t1 / (f - 1);

        let mut blocks = Vec::with_capacity(config.load());
        let mut next = 0;
        for (count, size) in [
            (config.r1(), config.m_hat()),
            (config.r2(), config.floor_m()),
        ] {
            for _ in 0..count {
                blocks.push((next..next + size).collect());
                next += size;
            }
        }
        Ok(FlcdLayout {
            config,
            t1,
            t2,
            blocks,
        })
    }

    pub fn profile(&self) -> Result<IvSizeProfile> {
        let k1 = self.config.k1();
        IvSizeProfile::new(
            (0..self.config.nodes())
                .map(|k| if k < k1 { self.t1 } else { self.t2 })
                .collect(),
        )
    }

    /// Bits each member broadcasts per shuffle group: `⌊m⌋·T'_1 / (r-1)`.
    pub fn broadcast_bits(&self) -> u64 {
        self.config.floor_m() as u64 * self.t1 / (self.config.load() as u64 - 1)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.blocks.len()];
        for i in (0..self.blocks.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.blocks[i + 1].len();
        }
        strides
    }

    /// Block position of each member of placement group `file`.
    fn digits(&self, mut file: usize) -> Vec<usize> {
        let mut digits = vec![0; self.blocks.len()];
        for (i, block) in self.blocks.iter().enumerate().rev() {
            digits[i] = file % block.len();
            file /= block.len();
        }
        digits
    }
}

/// The general flexible design for `K > 3`, `2 <= r <= K/2`.
///
/// Placement groups are all node sets with exactly one node per block,
/// enumerated in mixed radix with the first block most significant. Each
/// placement group is also a shuffle group: node `k` needs the IVs of the
/// files whose placement group swaps `k` for another node of its block, in
/// ascending order of that node. The concatenation is cut into `r-1` equal
/// slices for the other members in ascending order.
pub fn build_flcd_general(
    config: NetworkConfig,
    base_t1: u64,
    opts: &BuildOptions,
) -> Result<Scheme> {
    let layout = FlcdLayout::new(config, base_t1)?;
    let (files, _) = counts_flcd(config.nodes(), config.load())?;
    let files = opts.check_files(files)?;
    let profile = layout.profile()?;
    let strides = layout.strides();

    let mut groups = Vec::with_capacity(files);
    let mut shuffle = ShufflePlan::default();
    for n in 0..files {
        let digits = layout.digits(n);
        let members: Vec<NodeId> = digits
            .iter()
            .zip(&layout.blocks)
            .map(|(&d, block)| block[d])
            .collect();
        let demands = members
            .iter()
            .enumerate()
            .map(|(i, &k)| Demand {
                target: k,
                files: (0..layout.blocks[i].len())
                    .filter(|&d| d != digits[i])
                    .map(|d| n + d * strides[i] - digits[i] * strides[i])
                    .collect(),
                senders: members.iter().copied().filter(|&j| j != k).collect(),
            })
            .collect();
        shuffle
            .groups
            .push(equal_split_group(members.clone(), demands, &profile)?);
        groups.push(members);
    }
    let placement = PlacementPlan::new(config.nodes(), config.load(), groups)?;

    Ok(Scheme {
        id: SchemeId::FlcdGeneral,
        config,
        placement,
        shuffle,
        profile,
    })
}
