use crate::error::{Error, Result};
use crate::model::{Demand, IvSizeProfile, NetworkConfig, PlacementPlan, ShufflePlan};

use super::{equal_split_group, Scheme, SchemeId};

/// Conventional MapReduce: node `k` alone maps the next `file_counts[k]`
/// files, and every IV another node needs is unicast uncoded by its mapper.
///
/// There is one shuffle group per ordered (sender, receiver) pair carrying the
/// receiver's IVs of all the sender's files.
pub fn build_uncoded(file_counts: &[usize], profile: &IvSizeProfile) -> Result<Scheme> {
    let nodes = file_counts.len();
    if nodes != profile.nodes() {
        return Err(Error::InvalidParams(format!(
            "{nodes} file counts for {} IV sizes",
            profile.nodes()
        )));
    }
    if let Some(k) = file_counts.iter().position(|&c| c == 0) {
        return Err(Error::InvalidParams(format!(
            "node {k} is assigned no files"
        )));
    }
    let config = NetworkConfig::new(nodes, 1)?;

    let mut groups = Vec::new();
    for (k, &count) in file_counts.iter().enumerate() {
        groups.extend(std::iter::repeat_n(vec![k], count));
    }
    let placement = PlacementPlan::new(nodes, 1, groups)?;

    let mut shuffle = ShufflePlan::default();
    for sender in 0..nodes {
        for target in (0..nodes).filter(|&t| t != sender) {
            let mut members = vec![sender, target];
            members.sort_unstable();
            let demand = Demand {
                target,
                files: placement.files_of(sender).to_vec(),
                senders: vec![sender],
            };
            shuffle
                .groups
                .push(equal_split_group(members, vec![demand], profile)?);
        }
    }

    Ok(Scheme {
        id: SchemeId::Uncoded,
        config,
        placement,
        shuffle,
        profile: profile.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_node_example_sends_sixteen_ivs() {
        let profile = IvSizeProfile::new(vec![1, 2, 2]).unwrap();
        let scheme = build_uncoded(&[2, 3, 3], &profile).unwrap();
        scheme.validate().unwrap();
        assert_eq!(scheme.files(), 8);
        assert_eq!(scheme.placement.files_of(1), &[2, 3, 4]);
        // 6 IVs of T1 + 5 of T2 + 5 of T3 = 6 + 10 + 10 bits
        assert_eq!(scheme.shuffle.total_bits(), 26);
        assert_eq!(scheme.total_iv_bits(), 40);
    }

    #[test]
    fn unassigned_node_is_rejected() {
        let profile = IvSizeProfile::uniform(2, 1).unwrap();
        assert!(build_uncoded(&[1, 0], &profile).is_err());
        assert!(build_uncoded(&[1], &profile).is_err());
    }
}
