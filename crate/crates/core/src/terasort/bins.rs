use std::ops::Range;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::model::{ratio, IvSizeProfile, NodeId, Ratio};

use super::records::Record;

/// Key space `[0, key_bound)` cut into one contiguous bin per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortSpec {
    /// `z_0 = 0 < z_1 < ... < z_K = key_bound`.
    boundaries: Vec<u32>,
}

impl SortSpec {
    pub fn from_boundaries(boundaries: Vec<u32>) -> Result<Self> {
        if boundaries.len() < 2 || boundaries[0] != 0 {
            return Err(Error::InvalidParams(
                "boundaries must start at 0 and cover at least one bin".into(),
            ));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(format!(
                "boundaries must be strictly increasing: {boundaries:?}"
            )));
        }
        if *boundaries.last().unwrap() > 1 << 16 {
            return Err(Error::InvalidParams("keys are 16-bit".into()));
        }
        Ok(SortSpec { boundaries })
    }

    pub fn nodes(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn key_bound(&self) -> u32 {
        *self.boundaries.last().unwrap()
    }

    pub fn boundaries(&self) -> &[u32] {
        &self.boundaries
    }

    pub fn widths(&self) -> Vec<u32> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Keys reduced by node `k`.
    pub fn range(&self, k: NodeId) -> Range<u32> {
        self.boundaries[k]..self.boundaries[k + 1]
    }

    pub fn bin_of(&self, key: u16) -> Result<NodeId> {
        let key = u32::from(key);
        if key >= self.key_bound() {
            return Err(Error::KeyOutOfRange {
                key,
                bound: self.key_bound(),
            });
        }
        Ok(self.boundaries.partition_point(|&z| z <= key) - 1)
    }
}

/// Bin widths proportional to the IV sizes, so a uniform key distribution
/// gives node `k` IVs of expected size `T_k / ΣT` of each file.
///
/// Widths are rounded by largest remainder (ties to the lower node), then any
/// empty bin takes one key from the widest bin.
pub fn design_boundaries(key_bound: u32, profile: &IvSizeProfile) -> Result<SortSpec> {
    let k = profile.nodes();
    if (key_bound as usize) < k {
        return Err(Error::InvalidParams(format!(
            "key bound {key_bound} leaves some of the {k} bins empty"
        )));
    }
    let total = profile.sum();
    let z = u128::from(key_bound);
    let mut widths: Vec<u32> = profile
        .sizes()
        .iter()
        .map(|&t| (z * u128::from(t) / total) as u32)
        .collect();
    let assigned: u32 = widths.iter().sum();
    let mut by_remainder: Vec<(u128, usize)> = profile
        .sizes()
        .iter()
        .enumerate()
        .map(|(i, &t)| (z * u128::from(t) % total, i))
        .collect();
    by_remainder.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in by_remainder.iter().take((key_bound - assigned) as usize) {
        widths[i] += 1;
    }
    while let Some(empty) = widths.iter().position(|&w| w == 0) {
        let widest = (0..k)
            .max_by_key(|&i| (widths[i], std::cmp::Reverse(i)))
            .unwrap();
        widths[widest] -= 1;
        widths[empty] += 1;
    }

    let mut boundaries = Vec::with_capacity(k + 1);
    boundaries.push(0);
    for w in widths {
        boundaries.push(boundaries.last().unwrap() + w);
    }
    SortSpec::from_boundaries(boundaries)
}

/// Hash one file's records into per-node bins, preserving input order.
pub fn map_hash(records: &[Record], spec: &SortSpec) -> Result<Vec<Vec<Record>>> {
    let mut bins = vec![Vec::new(); spec.nodes()];
    for r in records {
        bins[spec.bin_of(r.key)?].push(*r);
    }
    Ok(bins)
}

/// Designed versus realized share of the records each node reduces.
#[derive(Debug, Clone, PartialEq)]
pub struct BinProfile {
    /// `T_k / ΣT`.
    pub target: Vec<Ratio>,
    pub realized: Vec<f64>,
}

impl BinProfile {
    pub fn new(profile: &IvSizeProfile, bin_counts: &[usize]) -> Self {
        let total: usize = bin_counts.iter().sum();
        BinProfile {
            target: profile
                .sizes()
                .iter()
                .map(|&t| ratio(t, profile.sum()))
                .collect(),
            realized: bin_counts
                .iter()
                .map(|&c| {
                    if total == 0 {
                        0.0
                    } else {
                        c as f64 / total as f64
                    }
                })
                .collect(),
        }
    }

    /// Largest `|realized / target - 1|` over the nodes.
    pub fn max_relative_error(&self) -> f64 {
        self.target
            .iter()
            .zip(&self.realized)
            .map(|(t, r)| (r / t.to_f64().unwrap() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terasort::records::generate_records;

    fn profile(sizes: &[u64]) -> IvSizeProfile {
        IvSizeProfile::new(sizes.to_vec()).unwrap()
    }

    fn key(k: u16) -> Record {
        Record {
            key: k,
            ..Default::default()
        }
    }

    #[test]
    fn exact_proportions() {
        let spec = design_boundaries(20, &profile(&[1, 2, 2])).unwrap();
        assert_eq!(spec.widths(), vec![4, 8, 8]);
        assert_eq!(spec.boundaries(), &[0, 4, 12, 20]);
    }

    #[test]
    fn two_to_three_over_full_key_space() {
        // 6 nodes at T = 2 and 10 at T = 3, as in the K = 16, r = 5 layout
        let mut sizes = vec![2; 6];
        sizes.extend([3; 10]);
        let p = profile(&sizes);
        let spec = design_boundaries(1 << 16, &p).unwrap();
        assert_eq!(spec.key_bound(), 1 << 16);
        for (w, t) in spec.widths().iter().zip(&sizes) {
            let exact = 65536.0 * *t as f64 / 42.0;
            assert!((*w as f64 - exact).abs() < 1.0, "{w} vs {exact}");
        }
    }

    fn tilings(total: u32, parts: usize) -> Vec<Vec<u32>> {
        if parts == 1 {
            return vec![vec![total]];
        }
        (1..=total - (parts as u32 - 1))
            .flat_map(|w| {
                tilings(total - w, parts - 1)
                    .into_iter()
                    .map(move |mut rest| {
                        rest.insert(0, w);
                        rest
                    })
            })
            .collect()
    }

    #[test]
    fn largest_remainder_minimizes_deviation() {
        for sizes in [[1u64, 1, 1, 1], [1, 2, 3, 7], [5, 1, 1, 2]] {
            let p = profile(&sizes);
            let z = 10;
            let dev = |w: &[u32]| {
                w.iter()
                    .zip(&sizes)
                    .map(|(&w, &t)| (w as f64 - z as f64 * t as f64 / p.sum() as f64).abs())
                    .fold(0.0, f64::max)
            };
            let best = tilings(z, 4)
                .iter()
                .map(|w| dev(w))
                .fold(f64::INFINITY, f64::min);
            let got = design_boundaries(z, &p).unwrap().widths();
            assert_eq!(got.iter().sum::<u32>(), z);
            assert!(dev(&got) <= best + 1e-12, "{sizes:?}: {got:?}");
        }
        assert_eq!(
            design_boundaries(10, &profile(&[1, 1, 1, 1]))
                .unwrap()
                .widths(),
            vec![3, 3, 2, 2]
        );
    }

    #[test]
    fn tiny_share_still_gets_a_key() {
        let spec = design_boundaries(4, &profile(&[1, 1000, 1000, 1000])).unwrap();
        assert!(spec.widths().iter().all(|&w| w >= 1));
        assert!(design_boundaries(2, &profile(&[1, 1, 1])).is_err());
    }

    #[test]
    fn hashing_into_bins() {
        let spec = design_boundaries(20, &profile(&[1, 2, 2])).unwrap();
        let bins = map_hash(&[key(0), key(5), key(19)], &spec).unwrap();
        assert_eq!(bins, vec![vec![key(0)], vec![key(5)], vec![key(19)]]);
        assert_eq!(map_hash(&[], &spec).unwrap(), vec![vec![]; 3]);
        assert_eq!(
            map_hash(&[key(20)], &spec),
            Err(Error::KeyOutOfRange { key: 20, bound: 20 })
        );
    }

    #[test]
    fn uniform_keys_realize_target_shares() {
        let p = profile(&[1, 2, 2]);
        let spec = design_boundaries(1 << 16, &p).unwrap();
        let records = generate_records(10_000, 1 << 16, 4).unwrap();
        let counts: Vec<usize> = map_hash(&records, &spec)
            .unwrap()
            .iter()
            .map(Vec::len)
            .collect();
        assert!(BinProfile::new(&p, &counts).max_relative_error() < 0.05);
    }
}
