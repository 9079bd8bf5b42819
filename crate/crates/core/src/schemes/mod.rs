//! Generators for placement + shuffle plans.
//!
//! Every builder is a pure function of its parameters and returns a
//! [`Scheme`]: the file placement, the coded shuffle recipe and the IV size
//! profile the recipe was sized for. IV sizes are pre-scaled by the smallest
//! integer factor that makes every segment split exact, so simulated loads
//! equal the closed forms without padding.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::analysis;
use crate::error::{Error, Result};
use crate::model::{
    CodedMessage, Demand, IvSizeProfile, NetworkConfig, NodeId, Operand, PlacementPlan, Ratio,
    Segment, ShuffleGroup, ShufflePlan,
};

mod flcd;
mod flcd3;
mod lmya;
mod uncoded;

pub use flcd::{build_flcd_general, FlcdLayout};
pub use flcd3::{build_flcd3, flcd3_layout, Flcd3Sizes};
pub use lmya::build_lmya;
pub use uncoded::build_uncoded;

pub const DEFAULT_MAX_FILES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Uncoded,
    Lmya,
    Flcd3,
    FlcdGeneral,
}

impl SchemeId {
    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Uncoded => "uncoded",
            SchemeId::Lmya => "lmya",
            SchemeId::Flcd3 => "flcd3",
            SchemeId::FlcdGeneral => "flcd",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uncoded" | "unicast" => Ok(SchemeId::Uncoded),
            "lmya" => Ok(SchemeId::Lmya),
            "flcd3" | "flcd-k3" => Ok(SchemeId::Flcd3),
            "flcd" | "flcd-general" => Ok(SchemeId::FlcdGeneral),
            "kr" => Err(Error::NotFeasible(
                "the KR design is only evaluated analytically (use `table`)".into(),
            )),
            other => Err(Error::InvalidParams(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Refuse placements with more files than this.
    pub max_files: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            max_files: DEFAULT_MAX_FILES,
        }
    }
}

impl BuildOptions {
    pub(crate) fn check_files(&self, files: u128) -> Result<usize> {
        if files > u128::from(self.max_files) {
            return Err(Error::FileLimit {
                files,
                limit: self.max_files,
            });
        }
        Ok(files as usize)
    }
}

/// A constructed scheme ready to simulate.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub id: SchemeId,
    pub config: NetworkConfig,
    pub placement: PlacementPlan,
    pub shuffle: ShufflePlan,
    pub profile: IvSizeProfile,
}

impl Scheme {
    pub fn files(&self) -> usize {
        self.placement.files()
    }

    pub fn groups(&self) -> usize {
        self.shuffle.group_count()
    }

    /// `N · Σ_k T_k`.
    pub fn total_iv_bits(&self) -> u128 {
        self.placement.files() as u128 * self.profile.sum()
    }

    pub fn validate(&self) -> Result<()> {
        self.shuffle.validate(&self.placement, &self.profile)
    }
}

/// Parameters for any constructible scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeParams {
    Uncoded {
        file_counts: Vec<usize>,
        iv_sizes: Vec<u64>,
    },
    Lmya {
        nodes: usize,
        load: usize,
        iv_bits: u64,
    },
    Flcd3 {
        sizes: [u64; 3],
        scale: u64,
    },
    FlcdGeneral {
        nodes: usize,
        load: usize,
        base_t1: u64,
    },
}

impl SchemeParams {
    pub fn id(&self) -> SchemeId {
        match self {
            SchemeParams::Uncoded { .. } => SchemeId::Uncoded,
            SchemeParams::Lmya { .. } => SchemeId::Lmya,
            SchemeParams::Flcd3 { .. } => SchemeId::Flcd3,
            SchemeParams::FlcdGeneral { .. } => SchemeId::FlcdGeneral,
        }
    }

    pub fn nodes(&self) -> usize {
        match self {
            SchemeParams::Uncoded { file_counts, .. } => file_counts.len(),
            SchemeParams::Lmya { nodes, .. } | SchemeParams::FlcdGeneral { nodes, .. } => *nodes,
            SchemeParams::Flcd3 { .. } => 3,
        }
    }

    pub fn load(&self) -> usize {
        match self {
            SchemeParams::Uncoded { .. } => 1,
            SchemeParams::Lmya { load, .. } | SchemeParams::FlcdGeneral { load, .. } => *load,
            SchemeParams::Flcd3 { .. } => 2,
        }
    }

    pub fn build(&self, opts: &BuildOptions) -> Result<Scheme> {
        match self {
            SchemeParams::Uncoded {
                file_counts,
                iv_sizes,
            } => build_uncoded(file_counts, &IvSizeProfile::new(iv_sizes.clone())?),
            SchemeParams::Lmya {
                nodes,
                load,
                iv_bits,
            } => build_lmya(NetworkConfig::new(*nodes, *load)?, *iv_bits, opts),
            SchemeParams::Flcd3 { sizes, scale } => build_flcd3(*sizes, *scale),
            SchemeParams::FlcdGeneral {
                nodes,
                load,
                base_t1,
            } => build_flcd_general(NetworkConfig::new(*nodes, *load)?, *base_t1, opts),
        }
    }

    /// The closed-form load this scheme should achieve.
    pub fn predicted_load(&self) -> Result<Ratio> {
        match self {
            SchemeParams::Uncoded {
                file_counts,
                iv_sizes,
            } => analysis::load_uncoded(file_counts, iv_sizes),
            SchemeParams::Lmya { nodes, load, .. } => analysis::load_lmya(*nodes, *load),
            SchemeParams::Flcd3 { sizes, .. } => analysis::load_flcd3(*sizes),
            SchemeParams::FlcdGeneral { nodes, load, .. } => {
                analysis::load_flcd_general(*nodes, *load)
            }
        }
    }
}

/// Builds a shuffle group whose demands are each cut into equal bit slices,
/// one per listed sender in order. Each sender broadcasts the XOR of the
/// slices it was assigned; a sender's operands follow demand order.
pub(crate) fn equal_split_group(
    members: Vec<NodeId>,
    demands: Vec<Demand>,
    profile: &IvSizeProfile,
) -> Result<ShuffleGroup> {
    let mut by_sender: BTreeMap<NodeId, Vec<Operand>> = BTreeMap::new();
    for demand in demands.iter().filter(|d| !d.files.is_empty()) {
        let iv_bits = profile.size(demand.target);
        let total = iv_bits * demand.files.len() as u64;
        let parts = demand.senders.len() as u64;
        if parts == 0 || !total.is_multiple_of(parts) {
            return Err(Error::PlanDefect(format!(
                "{total} requested bits for node {} do not split over {parts} senders",
                demand.target
            )));
        }
        let part = total / parts;
        for (i, &sender) in demand.senders.iter().enumerate() {
            let (lo, hi) = (i as u64 * part, (i as u64 + 1) * part);
            let segments = demand
                .files
                .iter()
                .enumerate()
                .filter_map(|(f, &file)| {
                    let start = lo.max(f as u64 * iv_bits);
                    let end = hi.min((f as u64 + 1) * iv_bits);
                    (start < end).then(|| Segment {
                        function: demand.target,
                        file,
                        bits: start - f as u64 * iv_bits..end - f as u64 * iv_bits,
                    })
                })
                .collect();
            by_sender.entry(sender).or_default().push(Operand {
                target: demand.target,
                segments,
            });
        }
    }
    let messages = members
        .iter()
        .filter_map(|s| {
            by_sender.remove(s).map(|operands| CodedMessage {
                sender: *s,
                operands,
            })
        })
        .collect();
    if let Some(stray) = by_sender.keys().next() {
        return Err(Error::PlanDefect(format!(
            "sender {stray} is not a member of its shuffle group"
        )));
    }
    Ok(ShuffleGroup {
        members,
        demands,
        messages,
    })
}
