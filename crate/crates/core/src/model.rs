//! Domain types shared by every scheme: network parameters, IV sizes, the
//! file placement, the shuffle recipe, the broadcast ledger and per-node IV
//! storage.
//!
//! Nodes, reduce functions and files are all 0-based indices. Node `k` owns
//! reduce function `k`, so a [`NodeId`] doubles as a function index.

use std::collections::HashMap;
use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::bits::BitString;
use crate::error::{Error, Result};

pub type NodeId = usize;
pub type FileId = usize;
pub type Ratio = BigRational;

pub(crate) fn ratio(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Ratio {
    Ratio::new(numer.into(), denom.into())
}

/// `K` nodes with computation load `r`, plus the node-class quantities used by
/// the general flexible design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetworkConfig {
    nodes: usize,
    load: usize,
}

impl NetworkConfig {
    pub fn new(nodes: usize, load: usize) -> Result<Self> {
        if nodes == 0 || load == 0 {
            return Err(Error::InvalidParams(format!(
                "K and r must be positive (K={nodes}, r={load})"
            )));
        }
        if load > nodes {
            return Err(Error::InvalidParams(format!(
                "r={load} exceeds the node count K={nodes}"
            )));
        }
        Ok(NetworkConfig { nodes, load })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn load(&self) -> usize {
        self.load
    }

    /// `m = K / r`.
    pub fn m(&self) -> Ratio {
        ratio(self.nodes, self.load)
    }

    pub fn floor_m(&self) -> usize {
        self.nodes / self.load
    }

    pub fn m_hat(&self) -> usize {
        self.floor_m() + 1
    }

    pub fn is_integer_m(&self) -> bool {
        self.nodes.is_multiple_of(self.load)
    }

    /// Nodes that each map a `1/m̂` fraction of the library.
    pub fn k1(&self) -> usize {
        self.m_hat() * self.nodes - self.floor_m() * self.m_hat() * self.load
    }

    /// Nodes that each map a `1/⌊m⌋` fraction of the library.
    pub fn k2(&self) -> usize {
        self.floor_m() * self.m_hat() * self.load - self.floor_m() * self.nodes
    }

    /// Number of times the first node class maps the whole library.
    pub fn r1(&self) -> usize {
        self.nodes - self.floor_m() * self.load
    }

    pub fn r2(&self) -> usize {
        self.m_hat() * self.load - self.nodes
    }
}

/// Per-function IV size `T_k` in bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IvSizeProfile {
    sizes: Vec<u64>,
}

impl IvSizeProfile {
    pub fn new(sizes: Vec<u64>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidParams("IV size profile is empty".into()));
        }
        if let Some(k) = sizes.iter().position(|&t| t == 0) {
            return Err(Error::InvalidParams(format!(
                "IV size T_{k} must be positive"
            )));
        }
        Ok(IvSizeProfile { sizes })
    }

    pub fn uniform(nodes: usize, bits: u64) -> Result<Self> {
        Self::new(vec![bits; nodes])
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn size(&self, function: NodeId) -> u64 {
        self.sizes[function]
    }

    pub fn nodes(&self) -> usize {
        self.sizes.len()
    }

    pub fn sum(&self) -> u128 {
        self.sizes.iter().map(|&t| u128::from(t)).sum()
    }

    pub fn is_uniform(&self) -> bool {
        self.sizes.windows(2).all(|w| w[0] == w[1])
    }
}

/// Which nodes map which files. `groups[n]` is the sorted set `S_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementPlan {
    nodes: usize,
    replication: usize,
    groups: Vec<Vec<NodeId>>,
    per_node: Vec<Vec<FileId>>,
}

impl PlacementPlan {
    pub fn new(nodes: usize, replication: usize, mut groups: Vec<Vec<NodeId>>) -> Result<Self> {
        let mut per_node = vec![Vec::new(); nodes];
        for (n, group) in groups.iter_mut().enumerate() {
            group.sort_unstable();
            if group.len() != replication {
                return Err(Error::InvalidParams(format!(
                    "file {n} is mapped at {} nodes, expected {replication}",
                    group.len()
                )));
            }
            if group.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParams(format!("file {n} lists a node twice")));
            }
            for &k in group.iter() {
                if k >= nodes {
                    return Err(Error::InvalidParams(format!(
                        "file {n} placed on node {k}, but K={nodes}"
                    )));
                }
                per_node[k].push(n);
            }
        }
        Ok(PlacementPlan {
            nodes,
            replication,
            groups,
            per_node,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn files(&self) -> usize {
        self.groups.len()
    }

    pub fn replication(&self) -> usize {
        self.replication
    }

    pub fn groups(&self) -> &[Vec<NodeId>] {
        &self.groups
    }

    pub fn group(&self, file: FileId) -> &[NodeId] {
        &self.groups[file]
    }

    /// `M_k`, ascending.
    pub fn files_of(&self, node: NodeId) -> &[FileId] {
        &self.per_node[node]
    }

    pub fn maps(&self, node: NodeId, file: FileId) -> bool {
        self.groups[file].binary_search(&node).is_ok()
    }

    /// `r = (1/N) Σ_k |M_k|`.
    pub fn computation_load(&self) -> Ratio {
        let total: usize = self.per_node.iter().map(Vec::len).sum();
        ratio(total, self.files().max(1))
    }
}

/// A bit range of one IV `v[function, file]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub function: NodeId,
    pub file: FileId,
    pub bits: Range<u64>,
}

impl Segment {
    pub fn len(&self) -> u64 {
        self.bits.end - self.bits.start
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Concatenated segments intended for one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operand {
    pub target: NodeId,
    pub segments: Vec<Segment>,
}

impl Operand {
    pub fn bit_len(&self) -> u64 {
        self.segments.iter().map(Segment::len).sum()
    }
}

/// One broadcast: the XOR of its operands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedMessage {
    pub sender: NodeId,
    pub operands: Vec<Operand>,
}

impl CodedMessage {
    pub fn bit_len(&self) -> u64 {
        self.operands.first().map_or(0, Operand::bit_len)
    }
}

/// IVs a node requests from a shuffle group, in concatenation order, and the
/// members that share the job of sending them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Demand {
    pub target: NodeId,
    pub files: Vec<FileId>,
    pub senders: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffleGroup {
    pub members: Vec<NodeId>,
    pub demands: Vec<Demand>,
    pub messages: Vec<CodedMessage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShufflePlan {
    pub groups: Vec<ShuffleGroup>,
}

impl ShufflePlan {
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn broadcast_count(&self) -> usize {
        self.groups.iter().map(|g| g.messages.len()).sum()
    }

    pub fn total_bits(&self) -> u128 {
        self.groups
            .iter()
            .flat_map(|g| &g.messages)
            .map(|m| u128::from(m.bit_len()))
            .sum()
    }

    /// Checks the structural invariants of a plan against its placement:
    ///
    /// * operands XORed together have identical bit length and distinct
    ///   targets other than the sender;
    /// * each operand only carries segments of its target's function;
    /// * senders and non-target recipients hold every IV they must combine;
    /// * for every `(k, n)` with `k ∉ S_n` the delivered segments tile
    ///   `[0, T_k)` exactly, and nothing is sent for `k ∈ S_n`.
    pub fn validate(&self, placement: &PlacementPlan, profile: &IvSizeProfile) -> Result<()> {
        let files = placement.files();
        let nodes = placement.nodes();
        if profile.nodes() != nodes {
            return Err(Error::PlanDefect(format!(
                "profile has {} sizes for {nodes} nodes",
                profile.nodes()
            )));
        }
        let mut delivered: HashMap<(NodeId, FileId), Vec<Range<u64>>> = HashMap::new();
        for (g, group) in self.groups.iter().enumerate() {
            for msg in &group.messages {
                let len = msg.bit_len();
                let mut targets: Vec<NodeId> = msg.operands.iter().map(|o| o.target).collect();
                targets.sort_unstable();
                if targets.windows(2).any(|w| w[0] == w[1]) || targets.contains(&msg.sender) {
                    return Err(Error::PlanDefect(format!(
                        "group {g}: node {} broadcasts operands with targets {targets:?}",
                        msg.sender
                    )));
                }
                for op in &msg.operands {
                    if op.bit_len() != len {
                        return Err(Error::PlanDefect(format!(
                            "group {g}: node {} XORs operands of {} and {len} bits",
                            msg.sender,
                            op.bit_len()
                        )));
                    }
                    for seg in &op.segments {
                        if seg.function != op.target {
                            return Err(Error::PlanDefect(format!(
                                "group {g}: operand for node {} carries function {}",
                                op.target, seg.function
                            )));
                        }
                        if seg.file >= files || seg.bits.end > profile.size(seg.function) {
                            return Err(Error::PlanDefect(format!(
                                "group {g}: segment {seg:?} out of range"
                            )));
                        }
                        if !placement.maps(msg.sender, seg.file) {
                            return Err(Error::PlanDefect(format!(
                                "group {g}: node {} sends file {} it never mapped",
                                msg.sender, seg.file
                            )));
                        }
                        delivered
                            .entry((seg.function, seg.file))
                            .or_default()
                            .push(seg.bits.clone());
                    }
                }
                // every other recipient must cancel the foreign operands
                for op in &msg.operands {
                    for other in msg.operands.iter().filter(|o| o.target != op.target) {
                        if let Some(seg) = other
                            .segments
                            .iter()
                            .find(|s| !placement.maps(op.target, s.file))
                        {
                            return Err(Error::PlanDefect(format!(
                                "group {g}: node {} lacks side information for file {}",
                                op.target, seg.file
                            )));
                        }
                    }
                }
            }
        }
        for k in 0..nodes {
            for n in 0..files {
                let ranges = delivered.remove(&(k, n)).unwrap_or_default();
                if placement.maps(k, n) {
                    if !ranges.is_empty() {
                        return Err(Error::PlanDefect(format!(
                            "v[{k},{n}] is shuffled although node {k} maps file {n}"
                        )));
                    }
                    continue;
                }
                check_tiling(ranges, profile.size(k))
                    .map_err(|why| Error::PlanDefect(format!("v[{k},{n}]: {why}")))?;
            }
        }
        Ok(())
    }
}

fn check_tiling(mut ranges: Vec<Range<u64>>, len: u64) -> std::result::Result<(), String> {
    ranges.sort_by_key(|r| r.start);
    let mut cursor = 0;
    for r in ranges.iter().filter(|r| !r.is_empty()) {
        if r.start != cursor {
            return Err(if r.start < cursor {
                format!("overlap at bit {}", r.start)
            } else {
                format!("gap at bits {cursor}..{}", r.start)
            });
        }
        cursor = r.end;
    }
    if cursor != len {
        return Err(format!("covered {cursor} of {len} bits"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub sender: NodeId,
    pub group: usize,
    pub bits: u64,
}

/// Every broadcast placed on the shared link, in transmission order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffleLedger {
    pub entries: Vec<LedgerEntry>,
    /// `N · Σ_k T_k`
    pub total_iv_bits: u128,
}

impl ShuffleLedger {
    pub fn new(total_iv_bits: u128) -> Self {
        ShuffleLedger {
            entries: Vec::new(),
            total_iv_bits,
        }
    }

    pub fn record(&mut self, sender: NodeId, group: usize, bits: u64) {
        self.entries.push(LedgerEntry {
            sender,
            group,
            bits,
        });
    }

    pub fn transmitted_bits(&self) -> u128 {
        self.entries.iter().map(|e| u128::from(e.bits)).sum()
    }

    /// Shuffled bits normalised by the total IV bits; zero for an empty job.
    pub fn measured_load(&self) -> Ratio {
        if self.total_iv_bits == 0 {
            return Ratio::zero();
        }
        ratio(self.transmitted_bits(), self.total_iv_bits)
    }
}

#[derive(Debug, Clone)]
struct PartialIv {
    bits: BitString,
    covered: BitString,
}

/// The IVs one node holds: everything it computed in the map phase plus the
/// pieces of its own function's IVs recovered during the shuffle.
#[derive(Debug, Clone)]
pub struct IvStore {
    node: NodeId,
    computed: HashMap<(NodeId, FileId), BitString>,
    decoded: HashMap<FileId, PartialIv>,
}

impl IvStore {
    pub fn new(node: NodeId) -> Self {
        IvStore {
            node,
            computed: HashMap::new(),
            decoded: HashMap::new(),
        }
    }

    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn insert_computed(&mut self, function: NodeId, file: FileId, iv: BitString) {
        self.computed.insert((function, file), iv);
    }

    pub fn computed(&self, function: NodeId, file: FileId) -> Option<&BitString> {
        self.computed.get(&(function, file))
    }

    pub fn computed_len(&self) -> usize {
        self.computed.len()
    }

    /// Places decoded bits of `v[node, file]` at `offset`.
    pub fn write_decoded(
        &mut self,
        file: FileId,
        offset: u64,
        bits: &BitString,
        iv_len: u64,
    ) -> Result<()> {
        let entry = self.decoded.entry(file).or_insert_with(|| PartialIv {
            bits: BitString::zeros(iv_len),
            covered: BitString::zeros(iv_len),
        });
        entry.bits.write_at(offset, bits)?;
        let ones = BitString::from_bytes(vec![0xFF; bits.as_bytes().len()], bits.len())?;
        entry.covered.write_at(offset, &ones)
    }

    /// `v[node, file]` if the node computed it or has decoded every bit of it.
    pub fn reduce_input(&self, file: FileId) -> Option<&BitString> {
        if let Some(iv) = self.computed.get(&(self.node, file)) {
            return Some(iv);
        }
        self.decoded
            .get(&file)
            .filter(|p| p.covered.count_ones() == p.covered.len())
            .map(|p| &p.bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_classes_for_eighteen_nodes_load_four() {
        let cfg = NetworkConfig::new(18, 4).unwrap();
        assert_eq!(cfg.floor_m(), 4);
        assert_eq!(cfg.m_hat(), 5);
        assert_eq!((cfg.k1(), cfg.k2()), (10, 8));
        assert_eq!((cfg.r1(), cfg.r2()), (2, 2));
        assert_eq!(cfg.m(), ratio(9, 2));
    }

    #[test]
    fn integer_m_has_empty_first_class() {
        for (k, r) in [(16, 4), (25, 5), (12, 3), (8, 8)] {
            let cfg = NetworkConfig::new(k, r).unwrap();
            assert!(cfg.is_integer_m());
            assert_eq!(cfg.k1(), 0);
            assert_eq!(cfg.k2(), k);
        }
    }

    #[test]
    fn class_sizes_partition_nodes_and_load() {
        for k in 1..60 {
            for r in 1..=k {
                let cfg = NetworkConfig::new(k, r).unwrap();
                assert_eq!(cfg.k1() + cfg.k2(), k);
                assert_eq!(cfg.r1() + cfg.r2(), r);
                if cfg.r1() > 0 {
                    assert_eq!(cfg.k1(), cfg.m_hat() * cfg.r1());
                }
                if cfg.r2() > 0 {
                    assert_eq!(cfg.k2(), cfg.floor_m() * cfg.r2());
                }
                assert_eq!(cfg.is_integer_m(), cfg.k1() == 0);
            }
        }
    }

    #[test]
    fn rejects_degenerate_configs() {
        assert!(NetworkConfig::new(0, 1).is_err());
        assert!(NetworkConfig::new(4, 0).is_err());
        assert!(NetworkConfig::new(4, 5).is_err());
        assert!(IvSizeProfile::new(vec![1, 0, 2]).is_err());
        assert!(IvSizeProfile::new(vec![]).is_err());
    }

    #[test]
    fn placement_indexes_files_per_node() {
        let plan = PlacementPlan::new(3, 2, vec![vec![1, 0], vec![0, 2], vec![2, 1]]).unwrap();
        assert_eq!(plan.files_of(0), &[0, 1]);
        assert_eq!(plan.files_of(2), &[1, 2]);
        assert!(plan.maps(1, 0) && !plan.maps(1, 1));
        assert_eq!(plan.computation_load(), ratio(2, 1));
        assert!(PlacementPlan::new(3, 2, vec![vec![0]]).is_err());
        assert!(PlacementPlan::new(3, 2, vec![vec![0, 0]]).is_err());
        assert!(PlacementPlan::new(3, 2, vec![vec![0, 3]]).is_err());
    }

    #[test]
    fn tiling_detects_gaps_and_overlaps() {
        assert!(check_tiling(vec![2..4, 0..2], 4).is_ok());
        assert!(check_tiling(vec![0..2, 3..4], 4)
            .unwrap_err()
            .contains("gap"));
        assert!(check_tiling(vec![0..3, 2..4], 4)
            .unwrap_err()
            .contains("overlap"));
        assert!(check_tiling(std::iter::once(0..3).collect(), 4).is_err());
    }

    #[test]
    fn decoded_iv_completes_only_when_fully_covered() {
        let mut store = IvStore::new(1);
        let iv: BitString = "1011_0110_1".parse().unwrap();
        store
            .write_decoded(4, 0, &iv.slice(0..5).unwrap(), 9)
            .unwrap();
        assert!(store.reduce_input(4).is_none());
        store
            .write_decoded(4, 5, &iv.slice(5..9).unwrap(), 9)
            .unwrap();
        assert_eq!(store.reduce_input(4), Some(&iv));
        // rewriting the same bits leaves the IV unchanged
        store
            .write_decoded(4, 5, &iv.slice(5..9).unwrap(), 9)
            .unwrap();
        assert_eq!(store.reduce_input(4), Some(&iv));
    }
}
