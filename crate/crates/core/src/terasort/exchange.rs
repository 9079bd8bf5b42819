//! Coded shuffle for IVs whose realized sizes differ from the planned ones.
//!
//! Sorting bins are random, so the fixed segment recipes of a [`ShufflePlan`]
//! cannot be used as-is. The group structure is kept: each demand is still
//! the concatenation of the target's IVs of the demanded files, and every
//! other member of the group still sends one XOR of pieces of the others'
//! demands. Only the cut points are chosen per run. Each operand carries a
//! length field, and shorter operands are zero-filled to the message length.

use crate::bits::{concat_segments, BitString};
use crate::error::{Error, Result};
use crate::model::{Demand, IvStore, NodeId, ShuffleGroup, ShuffleLedger};
use crate::schemes::Scheme;

/// Width of the per-operand length field.
pub const LENGTH_FIELD_BITS: u64 = 32;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExchangeStats {
    pub broadcasts: u64,
    /// Message bits on the link, zero fill included, length fields excluded.
    pub payload_bits: u128,
    pub framing_bits: u128,
    /// Zero fill inside messages, already counted in `payload_bits`.
    pub padding_bits: u128,
    pub encode_ops: u64,
    pub decode_ops: u64,
}

impl ExchangeStats {
    pub fn wire_bits(&self) -> u128 {
        self.payload_bits + self.framing_bits
    }
}

/// Piece sizes `cuts[t][s]`: bits of target `t`'s demand carried by sender
/// `s` (member indices). Minimizes the group's total message length, which
/// is `max(⌈ΣV / (p-1)⌉, max V)` for `p` members.
pub fn balanced_cuts(demand_bits: &[u64]) -> Vec<Vec<u64>> {
    let p = demand_bits.len();
    let mut cuts = vec![vec![0u64; p]; p];
    if p < 2 {
        return cuts;
    }
    let sum: u64 = demand_bits.iter().sum();
    let total = sum
        .div_ceil(p as u64 - 1)
        .max(demand_bits.iter().copied().max().unwrap_or(0));
    if total == 0 {
        return cuts;
    }
    // sender s never carries its own demand, so it can send at most total - V_s
    let caps: Vec<u64> = demand_bits.iter().map(|&v| total - v).collect();
    let cap_sum: u128 = caps.iter().map(|&c| u128::from(c)).sum();
    let mut quota: Vec<u64> = caps
        .iter()
        .map(|&c| (u128::from(c) * u128::from(total) / cap_sum) as u64)
        .collect();
    let mut short = total - quota.iter().sum::<u64>();
    for s in 0..p {
        let extra = short.min(caps[s] - quota[s]);
        quota[s] += extra;
        short -= extra;
    }
    debug_assert_eq!(short, 0);

    for (t, &v) in demand_bits.iter().enumerate() {
        let mut left = v;
        for s in (0..p).filter(|&s| s != t) {
            let take = left.min(quota[s]);
            cuts[t][s] = take;
            left -= take;
        }
        debug_assert_eq!(left, 0, "quotas of the other senders cover each demand");
    }
    cuts
}

fn demand_stream(demand: &Demand, store: &IvStore) -> Result<BitString> {
    let parts = demand
        .files
        .iter()
        .map(|&n| {
            store.computed(demand.target, n).cloned().ok_or_else(|| {
                Error::PlanDefect(format!(
                    "node {} does not hold v[{},{n}]",
                    store.node(),
                    demand.target
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(concat_segments(&parts))
}

fn padded(mut bits: BitString, len: u64) -> BitString {
    bits.append(&BitString::zeros(len - bits.len()));
    bits
}

/// Demand index per member, checking that every demand is served by all the
/// other members of its group.
fn demand_of_member(group: &ShuffleGroup) -> Result<Vec<Option<usize>>> {
    let mut by_member = vec![None; group.members.len()];
    for (d, demand) in group.demands.iter().enumerate() {
        let t = group
            .members
            .iter()
            .position(|&m| m == demand.target)
            .ok_or_else(|| Error::PlanDefect(format!("target {} not a member", demand.target)))?;
        let others: Vec<NodeId> = group
            .members
            .iter()
            .copied()
            .filter(|&m| m != demand.target)
            .collect();
        let mut senders = demand.senders.clone();
        senders.sort_unstable();
        if senders != others || by_member[t].replace(d).is_some() {
            return Err(Error::PlanDefect(format!(
                "demand of node {} is not served by the rest of its group",
                demand.target
            )));
        }
    }
    Ok(by_member)
}

/// Runs every group of `scheme` over the realized IVs in `stores` and returns
/// the streams each node decoded, in group order.
pub fn exchange(
    scheme: &Scheme,
    stores: &[IvStore],
) -> Result<(Vec<Vec<BitString>>, ExchangeStats, ShuffleLedger)> {
    let mut received = vec![Vec::new(); stores.len()];
    let mut stats = ExchangeStats::default();
    let total_iv_bits: u128 = (0..scheme.files())
        .map(|n| {
            let store = &stores[scheme.placement.group(n)[0]];
            (0..stores.len())
                .filter_map(|j| store.computed(j, n))
                .map(|iv| u128::from(iv.len()))
                .sum::<u128>()
        })
        .sum();
    let mut ledger = ShuffleLedger::new(total_iv_bits);

    for (g, group) in scheme.shuffle.groups.iter().enumerate() {
        let members = &group.members;
        let demand_idx = demand_of_member(group)?;
        // every sender knows the demanded streams; take the sizes from the first
        let truth: Vec<Option<BitString>> = demand_idx
            .iter()
            .enumerate()
            .map(|(t, d)| {
                d.map(|d| {
                    let sender = members[if t == 0 { 1 } else { 0 }];
                    demand_stream(&group.demands[d], &stores[sender])
                })
                .transpose()
            })
            .collect::<Result<_>>()?;
        let sizes: Vec<u64> = truth
            .iter()
            .map(|s| s.as_ref().map_or(0, BitString::len))
            .collect();
        let cuts = balanced_cuts(&sizes);
        let offset = |t: usize, s: usize| -> u64 { (0..s).map(|j| cuts[t][j]).sum() };
        let mut decoded: Vec<BitString> = vec![BitString::new(); members.len()];

        for (s, &sender) in members.iter().enumerate() {
            let targets: Vec<usize> = (0..members.len())
                .filter(|&t| t != s && demand_idx[t].is_some())
                .collect();
            let len = targets.iter().map(|&t| cuts[t][s]).max().unwrap_or(0);
            if len == 0 {
                continue;
            }
            // operand for target t as node `holder` sees it
            let operand = |t: usize, holder: NodeId| -> Result<BitString> {
                let stream =
                    demand_stream(&group.demands[demand_idx[t].unwrap()], &stores[holder])?;
                let start = offset(t, s);
                Ok(padded(stream.slice(start..start + cuts[t][s])?, len))
            };

            let mut payload = BitString::zeros(len);
            for &t in &targets {
                payload.xor_assign(&operand(t, sender)?)?;
                stats.encode_ops += 1;
                stats.padding_bits += u128::from(len - cuts[t][s]);
            }
            let framing = LENGTH_FIELD_BITS * targets.len() as u64;
            ledger.record(sender, g, len + framing);
            stats.broadcasts += 1;
            stats.payload_bits += u128::from(len);
            stats.framing_bits += u128::from(framing);

            for &t in &targets {
                let mut mine = payload.clone();
                for &o in targets.iter().filter(|&&o| o != t) {
                    mine.xor_assign(&operand(o, members[t])?)?;
                }
                decoded[t].append(&mine.slice(0..cuts[t][s])?);
                stats.decode_ops += 1;
            }
        }

        for (t, expected) in truth.into_iter().enumerate() {
            let Some(expected) = expected else { continue };
            if decoded[t] != expected {
                let demand = &group.demands[demand_idx[t].unwrap()];
                return Err(Error::DecodeFailure {
                    node: members[t],
                    file: demand.files.first().copied().unwrap_or(0),
                    function: members[t],
                });
            }
            received[members[t]].push(std::mem::take(&mut decoded[t]));
        }
    }
    Ok((received, stats, ledger))
}
