//! Distributed integer sort on top of a coded shuffle.
//!
//! Node `k` reduces the keys in `[z_k, z_{k+1})`. Bin widths are set
//! proportional to the scheme's IV sizes, so uniformly distributed keys give
//! IVs whose expected sizes follow the design. Each run executes the scheme
//! and an uncoded baseline (one file per node) on the same records, so the
//! two shuffle volumes can be compared directly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::analysis::{format_ratio, load_uncoded};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::model::{IvStore, Ratio};
use crate::schemes::{build_uncoded, BuildOptions, Scheme, SchemeId, SchemeParams};

mod bins;
mod exchange;
mod records;

pub use bins::{design_boundaries, map_hash, BinProfile, SortSpec};
pub use exchange::{balanced_cuts, exchange, ExchangeStats, LENGTH_FIELD_BITS};
pub use records::{
    decode_records, encode_records, generate_records, read_dataset, write_dataset, Record,
    RECORD_BITS, RECORD_BYTES,
};

/// Keys span the full 16-bit range.
pub const KEY_SPACE: u32 = 1 << 16;

/// Work done in each of the six phases of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepCounters {
    /// CodeGen: shuffle groups generated.
    pub codegen_groups: usize,
    /// Map: IVs (bins) computed across all nodes.
    pub map_ivs: u64,
    /// Encode: operands XORed into messages.
    pub encode_ops: u64,
    /// Shuffle: broadcasts and bits on the link, length fields included.
    pub shuffle_broadcasts: u64,
    pub shuffle_bits: u128,
    /// Decode: pieces recovered by recipients.
    pub decode_ops: u64,
    /// Reduce: records sorted.
    pub reduce_records: u64,
}

/// Outcome of executing one scheme on a record set.
#[derive(Debug, Clone)]
pub struct Execution {
    pub files: usize,
    pub steps: StepCounters,
    pub shuffle: ExchangeStats,
    /// Sorted output of each node.
    pub outputs: Vec<Vec<Record>>,
}

#[derive(Debug, Clone)]
pub struct SortReport {
    pub scheme: SchemeId,
    pub nodes: usize,
    pub load: usize,
    pub records: usize,
    pub groups: usize,
    pub spec: SortSpec,
    pub bins: BinProfile,
    pub coded: Execution,
    pub uncoded: Execution,
    /// Closed-form load of the scheme.
    pub predicted_load: Ratio,
    /// Closed-form load of the baseline, `1 - 1/K`.
    pub uncoded_load: Ratio,
}

impl SortReport {
    pub fn predicted_ratio(&self) -> Ratio {
        &self.predicted_load / &self.uncoded_load
    }

    /// Coded over uncoded message bits, length fields excluded. `None` when
    /// the baseline sent nothing.
    pub fn measured_ratio(&self) -> Option<f64> {
        let base = self.uncoded.shuffle.payload_bits;
        (base > 0).then(|| self.coded.shuffle.payload_bits as f64 / base as f64)
    }

    /// `|measured / predicted - 1|`.
    pub fn ratio_error(&self) -> Option<f64> {
        let predicted = self.predicted_ratio().to_f64()?;
        self.measured_ratio().map(|m| (m / predicted - 1.0).abs())
    }

    /// Writes node `k`'s sorted output to `dir/part-<k>.bin`.
    pub fn write_parts(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        self.coded
            .outputs
            .iter()
            .enumerate()
            .map(|(k, out)| {
                let path = dir.join(format!("part-{k}.bin"));
                write_dataset(&path, out)?;
                Ok(path)
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let c = &self.coded;
        let u = &self.uncoded;
        let _ = writeln!(
            s,
            "scheme {} K={} r={} records={} files={} groups={}",
            self.scheme, self.nodes, self.load, self.records, c.files, self.groups
        );
        let widths: Vec<String> = self.spec.widths().iter().map(u32::to_string).collect();
        let _ = writeln!(s, "bin widths {}", widths.join(","));
        let _ = writeln!(
            s,
            "bin share max relative error {:.4}",
            self.bins.max_relative_error()
        );
        let _ = writeln!(s, "step      coded  uncoded");
        let rows: [(&str, u128, u128); 7] = [
            (
                "codegen",
                c.steps.codegen_groups as u128,
                u.steps.codegen_groups as u128,
            ),
            ("map", c.steps.map_ivs.into(), u.steps.map_ivs.into()),
            (
                "encode",
                c.steps.encode_ops.into(),
                u.steps.encode_ops.into(),
            ),
            (
                "shuffle",
                c.steps.shuffle_broadcasts.into(),
                u.steps.shuffle_broadcasts.into(),
            ),
            ("bits", c.steps.shuffle_bits, u.steps.shuffle_bits),
            (
                "decode",
                c.steps.decode_ops.into(),
                u.steps.decode_ops.into(),
            ),
            (
                "reduce",
                c.steps.reduce_records.into(),
                u.steps.reduce_records.into(),
            ),
        ];
        for (name, a, b) in rows {
            let _ = writeln!(s, "{name:<8} {a:>8} {b:>8}");
        }
        let _ = writeln!(
            s,
            "payload bits {} / {}, length fields {} / {}, zero fill {} / {}",
            c.shuffle.payload_bits,
            u.shuffle.payload_bits,
            c.shuffle.framing_bits,
            u.shuffle.framing_bits,
            c.shuffle.padding_bits,
            u.shuffle.padding_bits
        );
        let _ = writeln!(
            s,
            "predicted ratio {} ({:.4})",
            format_ratio(&self.predicted_ratio()),
            self.predicted_ratio().to_f64().unwrap_or(f64::NAN)
        );
        match self.measured_ratio() {
            Some(m) => {
                let _ = writeln!(s, "measured ratio {m:.4}");
            }
            None => {
                let _ = writeln!(s, "measured ratio n/a");
            }
        }
        s.push_str("sorted ok\n");
        s
    }
}

/// Contiguous split of `len` items into `files` chunks whose sizes differ by
/// at most one.
fn chunk(len: usize, files: usize, n: usize) -> std::ops::Range<usize> {
    n * len / files..(n + 1) * len / files
}

/// Map, shuffle and reduce `records` with `scheme`, then check the output.
pub fn execute(scheme: &Scheme, spec: &SortSpec, records: &[Record]) -> Result<Execution> {
    let nodes = scheme.config.nodes();
    if spec.nodes() != nodes {
        return Err(Error::InvalidParams(format!(
            "{} bins for {nodes} nodes",
            spec.nodes()
        )));
    }
    let files = scheme.files();
    if files == 0 {
        return Err(Error::InvalidParams("scheme has no files".into()));
    }

    let stores: Vec<IvStore> = (0..nodes)
        .into_par_iter()
        .map(|k| {
            let mut store = IvStore::new(k);
            for &n in scheme.placement.files_of(k) {
                let bins = map_hash(&records[chunk(records.len(), files, n)], spec)?;
                for (j, bin) in bins.iter().enumerate() {
                    let bits =
                        BitString::from_bytes(encode_records(bin), bin.len() as u64 * RECORD_BITS)?;
                    store.insert_computed(j, n, bits);
                }
            }
            Ok(store)
        })
        .collect::<Result<_>>()?;

    let (received, shuffle, ledger) = exchange(scheme, &stores)?;

    let outputs: Vec<Vec<Record>> = stores
        .par_iter()
        .zip(received.par_iter())
        .map(|(store, streams)| {
            let k = store.node();
            let mut out = Vec::new();
            for &n in scheme.placement.files_of(k) {
                let iv = store.computed(k, n).expect("mapped above");
                out.extend(decode_records(iv.as_bytes())?);
            }
            for stream in streams {
                out.extend(decode_records(stream.as_bytes())?);
            }
            out.sort_unstable();
            Ok(out)
        })
        .collect::<Result<_>>()?;

    verify_sorted(records, spec, &outputs)?;
    let steps = StepCounters {
        codegen_groups: scheme.groups(),
        map_ivs: stores.iter().map(|s| s.computed_len() as u64).sum(),
        encode_ops: shuffle.encode_ops,
        shuffle_broadcasts: shuffle.broadcasts,
        shuffle_bits: ledger.transmitted_bits(),
        decode_ops: shuffle.decode_ops,
        reduce_records: outputs.iter().map(|o| o.len() as u64).sum(),
    };
    Ok(Execution {
        files,
        steps,
        shuffle,
        outputs,
    })
}

/// The concatenated outputs must be the input in sorted order, with node
/// `k`'s keys inside its bin.
pub fn verify_sorted(input: &[Record], spec: &SortSpec, outputs: &[Vec<Record>]) -> Result<()> {
    let mut position = 0;
    let mut previous: Option<&Record> = None;
    for (k, out) in outputs.iter().enumerate() {
        let range = spec.range(k);
        for r in out {
            if !range.contains(&u32::from(r.key)) {
                return Err(Error::SortViolation {
                    position,
                    detail: format!("key {} at node {k} outside {range:?}", r.key),
                });
            }
            if previous.is_some_and(|p| p > r) {
                return Err(Error::SortViolation {
                    position,
                    detail: format!("key {} follows a larger record", r.key),
                });
            }
            previous = Some(r);
            position += 1;
        }
    }
    let mut expected = input.to_vec();
    expected.sort_unstable();
    let produced = outputs.iter().flatten();
    if position != expected.len() {
        return Err(Error::SortViolation {
            position,
            detail: format!("{position} records out, {} in", expected.len()),
        });
    }
    if let Some(i) = produced.zip(&expected).position(|(a, b)| a != b) {
        return Err(Error::SortViolation {
            position: i,
            detail: "output is not a permutation of the input".into(),
        });
    }
    Ok(())
}

/// Sort `records` with the scheme and with the uncoded baseline.
pub fn run_terasort_on(
    params: &SchemeParams,
    opts: &BuildOptions,
    records: &[Record],
) -> Result<SortReport> {
    let predicted_load = params.predicted_load()?;
    let scheme = params.build(opts)?;
    scheme.validate()?;
    let nodes = scheme.config.nodes();
    let spec = design_boundaries(KEY_SPACE, &scheme.profile)?;

    let baseline = build_uncoded(&vec![1; nodes], &scheme.profile)?;
    let uncoded_load = load_uncoded(&vec![1; nodes], scheme.profile.sizes())?;

    let coded = execute(&scheme, &spec, records)?;
    let uncoded = execute(&baseline, &spec, records)?;
    let counts: Vec<usize> = coded.outputs.iter().map(Vec::len).collect();

    Ok(SortReport {
        scheme: scheme.id,
        nodes,
        load: scheme.config.load(),
        records: records.len(),
        groups: scheme.groups(),
        bins: BinProfile::new(&scheme.profile, &counts),
        spec,
        coded,
        uncoded,
        predicted_load,
        uncoded_load,
    })
}

/// Generate `records` uniform records from `seed` and sort them.
pub fn run_terasort(
    params: &SchemeParams,
    opts: &BuildOptions,
    records: usize,
    seed: u64,
) -> Result<SortReport> {
    let data = generate_records(records, KEY_SPACE, seed)?;
    run_terasort_on(params, opts, &data)
}
