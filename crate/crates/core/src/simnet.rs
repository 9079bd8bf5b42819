//! Bit-exact execution of a scheme over an error-free shared broadcast link.
//!
//! The link is a sequential ledger: every broadcast is appended with its exact
//! bit length, and time is measured in bits. Recipients cancel the operands
//! that are not theirs by recomputing them from their own [`IvStore`], so a
//! plan that assumes side information a node does not have fails loudly.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::{concat_segments, BitString};
use crate::error::{Error, Result};
use crate::model::{
    CodedMessage, FileId, IvSizeProfile, IvStore, NodeId, Operand, PlacementPlan, Ratio,
    ShuffleLedger, ShufflePlan,
};
use crate::schemes::{BuildOptions, Scheme, SchemeId, SchemeParams};

/// Source of IV contents. Must be deterministic: the decode check recomputes
/// every IV and compares.
pub trait IvWorkload: Sync {
    fn iv(&self, function: NodeId, file: FileId, bits: u64) -> BitString;
}

/// Pseudorandom IVs keyed by `(seed, function, file)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededWorkload {
    pub seed: u64,
}

impl SeededWorkload {
    pub fn new(seed: u64) -> Self {
        SeededWorkload { seed }
    }
}

impl IvWorkload for SeededWorkload {
    fn iv(&self, function: NodeId, file: FileId, bits: u64) -> BitString {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((function as u64) << 32) ^ file as u64);
        let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
        rng.fill_bytes(&mut bytes);
        BitString::from_bytes(bytes, bits).expect("buffer sized from bit length")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseCounters {
    pub map_ivs: u64,
    /// Operands XORed into outgoing messages.
    pub encode_ops: u64,
    pub broadcasts: u64,
    /// Segments recovered by recipients.
    pub decode_ops: u64,
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub measured_load: Ratio,
    pub ledger: ShuffleLedger,
    pub decode_ok: bool,
    pub counters: PhaseCounters,
}

/// Map phase: node `k` computes `v[j, n]` for every function `j` and every
/// file `n ∈ M_k`. Nodes run in parallel.
pub fn run_map(
    placement: &PlacementPlan,
    profile: &IvSizeProfile,
    workload: &dyn IvWorkload,
) -> Result<Vec<IvStore>> {
    if profile.nodes() != placement.nodes() {
        return Err(Error::InvalidParams(format!(
            "{} IV sizes for {} nodes",
            profile.nodes(),
            placement.nodes()
        )));
    }
    (0..placement.nodes())
        .into_par_iter()
        .map(|k| {
            let mut store = IvStore::new(k);
            for &n in placement.files_of(k) {
                for (j, &bits) in profile.sizes().iter().enumerate() {
                    let iv = workload.iv(j, n, bits);
                    if iv.len() != bits {
                        return Err(Error::SizeMismatch {
                            function: j,
                            file: n,
                            expected: bits,
                            found: iv.len(),
                        });
                    }
                    store.insert_computed(j, n, iv);
                }
            }
            Ok(store)
        })
        .collect()
}

fn assemble(op: &Operand, store: &IvStore) -> Result<BitString> {
    let parts = op
        .segments
        .iter()
        .map(|seg| {
            store
                .computed(seg.function, seg.file)
                .ok_or_else(|| {
                    Error::PlanDefect(format!(
                        "node {} does not hold v[{},{}]",
                        store.node(),
                        seg.function,
                        seg.file
                    ))
                })
                .and_then(|iv| iv.slice(seg.bits.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(concat_segments(&parts))
}

fn encode(msg: &CodedMessage, store: &IvStore, counters: &mut PhaseCounters) -> Result<BitString> {
    let mut payload = BitString::zeros(msg.bit_len());
    for op in &msg.operands {
        payload.xor_assign(&assemble(op, store)?)?;
        counters.encode_ops += 1;
    }
    Ok(payload)
}

/// Shuffle phase, visiting groups in plan order.
pub fn run_shuffle(
    plan: &ShufflePlan,
    placement: &PlacementPlan,
    profile: &IvSizeProfile,
    stores: &mut [IvStore],
    workload: &dyn IvWorkload,
) -> Result<SimResult> {
    let order: Vec<usize> = (0..plan.group_count()).collect();
    run_shuffle_ordered(plan, placement, profile, stores, workload, &order)
}

/// Shuffle phase visiting groups in `order`, then a full decode check: every
/// node must hold a bit-exact `v[k, n]` for all `n`.
pub fn run_shuffle_ordered(
    plan: &ShufflePlan,
    placement: &PlacementPlan,
    profile: &IvSizeProfile,
    stores: &mut [IvStore],
    workload: &dyn IvWorkload,
    order: &[usize],
) -> Result<SimResult> {
    let mut counters = PhaseCounters {
        map_ivs: stores.iter().map(|s| s.computed_len() as u64).sum(),
        ..Default::default()
    };
    let mut ledger = ShuffleLedger::new(placement.files() as u128 * profile.sum());

    for &g in order {
        let group = plan
            .groups
            .get(g)
            .ok_or_else(|| Error::InvalidParams(format!("no shuffle group {g}")))?;
        for msg in &group.messages {
            let payload = encode(msg, &stores[msg.sender], &mut counters)?;
            ledger.record(msg.sender, g, payload.len());
            counters.broadcasts += 1;

            for op in &msg.operands {
                let recipient = op.target;
                let mut wanted = payload.clone();
                for other in msg.operands.iter().filter(|o| o.target != recipient) {
                    wanted.xor_assign(&assemble(other, &stores[recipient])?)?;
                }
                let mut offset = 0;
                for seg in &op.segments {
                    let piece = wanted.slice(offset..offset + seg.len())?;
                    stores[recipient].write_decoded(
                        seg.file,
                        seg.bits.start,
                        &piece,
                        profile.size(seg.function),
                    )?;
                    offset += seg.len();
                    counters.decode_ops += 1;
                }
            }
        }
    }

    verify_decode(placement, profile, stores, workload)?;
    Ok(SimResult {
        measured_load: ledger.measured_load(),
        ledger,
        decode_ok: true,
        counters,
    })
}

/// Returns the first `(node, file)` whose reduce input differs from the
/// workload oracle.
pub fn verify_decode(
    placement: &PlacementPlan,
    profile: &IvSizeProfile,
    stores: &[IvStore],
    workload: &dyn IvWorkload,
) -> Result<()> {
    let failure = stores.par_iter().find_map_first(|store| {
        let k = store.node();
        (0..placement.files()).find_map(|n| {
            let expected = workload.iv(k, n, profile.size(k));
            (store.reduce_input(n) != Some(&expected)).then_some(Error::DecodeFailure {
                node: k,
                file: n,
                function: k,
            })
        })
    });
    failure.map_or(Ok(()), Err)
}

/// Map and shuffle a built scheme with the given workload.
pub fn simulate(scheme: &Scheme, workload: &dyn IvWorkload) -> Result<SimResult> {
    let mut stores = run_map(&scheme.placement, &scheme.profile, workload)?;
    run_shuffle(
        &scheme.shuffle,
        &scheme.placement,
        &scheme.profile,
        &mut stores,
        workload,
    )
}

/// Closed-form prediction next to a bit-exact measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub scheme: SchemeId,
    pub nodes: usize,
    pub load: usize,
    pub files: usize,
    pub groups: usize,
    pub broadcasts: u64,
    pub transmitted_bits: u128,
    pub total_iv_bits: u128,
    pub predicted: Ratio,
    pub measured: Ratio,
    pub decode_ok: bool,
}

impl Comparison {
    pub fn exact(&self) -> bool {
        self.predicted == self.measured
    }
}

pub fn predict_vs_measure(
    params: &SchemeParams,
    opts: &BuildOptions,
    seed: u64,
) -> Result<Comparison> {
    let predicted = params.predicted_load()?;
    let scheme = params.build(opts)?;
    scheme.validate()?;
    let sim = simulate(&scheme, &SeededWorkload::new(seed))?;
    Ok(Comparison {
        scheme: scheme.id,
        nodes: scheme.config.nodes(),
        load: scheme.config.load(),
        files: scheme.files(),
        groups: scheme.groups(),
        broadcasts: sim.counters.broadcasts,
        transmitted_bits: sim.ledger.transmitted_bits(),
        total_iv_bits: sim.ledger.total_iv_bits,
        predicted,
        measured: sim.measured_load,
        decode_ok: sim.decode_ok,
    })
}
