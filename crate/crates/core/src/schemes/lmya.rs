use std::collections::HashMap;

use itertools::Itertools;
use num_integer::Integer;

use crate::analysis::counts_lmya;
use crate::error::{Error, Result};
use crate::model::{Demand, IvSizeProfile, NetworkConfig, NodeId, PlacementPlan, ShufflePlan};

use super::{equal_split_group, BuildOptions, Scheme, SchemeId};

/// Binomial placement: one file per `r`-subset of nodes, one shuffle group per
/// `(r+1)`-subset. In group `A`, node `k` needs the IV of the file mapped at
/// `A \ {k}`; that IV is cut into `r` slices, one per other member, and each
/// member broadcasts the XOR of the `r` slices it holds.
///
/// `iv_bits` is raised to `lcm(iv_bits, r)` so the slices are whole bits.
pub fn build_lmya(config: NetworkConfig, iv_bits: u64, opts: &BuildOptions) -> Result<Scheme> {
    let (nodes, load) = (config.nodes(), config.load());
    if load >= nodes {
        return Err(Error::InvalidParams(format!(
            "LMYA needs 1 <= r < K, got K={nodes}, r={load}"
        )));
    }
    if iv_bits == 0 {
        return Err(Error::InvalidParams("IV size must be positive".into()));
    }
    let (files, _) = counts_lmya(nodes, load)?;
    opts.check_files(files)?;
    let iv_bits = iv_bits.lcm(&(load as u64));
    let profile = IvSizeProfile::uniform(nodes, iv_bits)?;

    let subsets: Vec<Vec<NodeId>> = (0..nodes).combinations(load).collect();
    let index: HashMap<&[NodeId], usize> = subsets
        .iter()
        .enumerate()
        .map(|(n, s)| (s.as_slice(), n))
        .collect();

    let mut shuffle = ShufflePlan::default();
    for members in (0..nodes).combinations(load + 1) {
        let demands = members
            .iter()
            .map(|&k| {
                let rest: Vec<NodeId> = members.iter().copied().filter(|&j| j != k).collect();
                Demand {
                    target: k,
                    files: vec![index[rest.as_slice()]],
                    senders: rest,
                }
            })
            .collect();
        shuffle
            .groups
            .push(equal_split_group(members, demands, &profile)?);
    }
    let placement = PlacementPlan::new(nodes, load, subsets)?;

    Ok(Scheme {
        id: SchemeId::Lmya,
        config,
        placement,
        shuffle,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_instance_matches_counts() {
        let scheme = build_lmya(
            NetworkConfig::new(5, 2).unwrap(),
            1,
            &BuildOptions::default(),
        )
        .unwrap();
        scheme.validate().unwrap();
        assert_eq!(scheme.files(), 10);
        assert_eq!(scheme.groups(), 10);
        assert_eq!(scheme.profile.size(0), 2);
        // every broadcast is one slice of T/r bits
        assert!(scheme
            .shuffle
            .groups
            .iter()
            .flat_map(|g| &g.messages)
            .all(|m| m.bit_len() == 1 && m.operands.len() == 2));
    }

    #[test]
    fn file_limit_is_enforced() {
        let opts = BuildOptions { max_files: 100 };
        let err = build_lmya(NetworkConfig::new(16, 4).unwrap(), 4, &opts).unwrap_err();
        assert_eq!(
            err,
            Error::FileLimit {
                files: 1820,
                limit: 100
            }
        );
    }

    #[test]
    fn full_load_is_rejected() {
        let cfg = NetworkConfig::new(4, 4).unwrap();
        assert!(build_lmya(cfg, 4, &BuildOptions::default()).is_err());
    }
}
