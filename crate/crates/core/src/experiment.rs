//! Experiment configuration and the commands behind the `cdc` binary.
//!
//! Every command returns its report as a string and performs no timing, so a
//! fixed configuration and seed always yield byte-identical output.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::Deserialize;

use crate::analysis::{format_ratio, generate_table, render_table, TableFormat, REFERENCE_CONFIGS};
use crate::error::{Error, Result};
use crate::schemes::{BuildOptions, SchemeId, SchemeParams, DEFAULT_MAX_FILES};
use crate::simnet::{predict_vs_measure, Comparison};
use crate::terasort::{
    generate_records, read_dataset, run_terasort_on, write_dataset, SortReport, KEY_SPACE,
};

pub const DEFAULT_RECORDS: usize = 10_000;

/// One value or a sweep of values: `16`, `16,22,25`, `8-12` or `[4, 5]`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(try_from = "RawSweep")]
pub struct Sweep(pub Vec<usize>);

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSweep {
    One(usize),
    List(Vec<usize>),
    Text(String),
}

impl TryFrom<RawSweep> for Sweep {
    type Error = Error;

    fn try_from(raw: RawSweep) -> Result<Self> {
        match raw {
            RawSweep::One(v) => Ok(Sweep(vec![v])),
            RawSweep::List(v) => Ok(Sweep(v)),
            RawSweep::Text(s) => s.parse(),
        }
    }
}

impl FromStr for Sweep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("cannot read {s:?} as a list or range"));
        let mut values = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once('-') {
                Some((lo, hi)) => {
                    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                    if lo > hi {
                        return Err(bad());
                    }
                    values.extend(lo..=hi);
                }
                None => values.push(part.parse().map_err(|_| bad())?),
            }
        }
        if values.is_empty() {
            return Err(bad());
        }
        Ok(Sweep(values))
    }
}

impl Sweep {
    fn single(&self, name: &str) -> Result<usize> {
        match self.0.as_slice() {
            [v] => Ok(*v),
            _ => Err(Error::InvalidParams(format!(
                "{name} takes a single value here, got {:?}",
                self.0
            ))),
        }
    }
}

/// Parses `a,b,c` into numbers.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::InvalidParams(format!("cannot read {p:?} in {s:?}")))
        })
        .collect()
}

/// Output format of the report commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Markdown,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::InvalidParams(format!("unknown format {other:?}"))),
        }
    }
}

impl From<OutputFormat> for TableFormat {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Markdown => TableFormat::Markdown,
            OutputFormat::Csv => TableFormat::Csv,
        }
    }
}

/// Settings shared by all commands. Unset fields fall back to a config file,
/// then to defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub scheme: Option<String>,
    pub nodes: Option<Sweep>,
    pub load: Option<Sweep>,
    /// Per-node sizes for `uncoded` and `flcd3`; a single base size for
    /// `lmya` and `flcd`.
    pub iv_sizes: Option<Vec<u64>>,
    pub file_counts: Option<Vec<usize>>,
    pub scale: Option<u64>,
    pub records: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub max_files: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidParams(format!("config: {e}")))
    }

    pub fn load_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Field-wise `self` if set, else `fallback`.
    pub fn or(self, fallback: Self) -> Self {
        ExperimentConfig {
            scheme: self.scheme.or(fallback.scheme),
            nodes: self.nodes.or(fallback.nodes),
            load: self.load.or(fallback.load),
            iv_sizes: self.iv_sizes.or(fallback.iv_sizes),
            file_counts: self.file_counts.or(fallback.file_counts),
            scale: self.scale.or(fallback.scale),
            records: self.records.or(fallback.records),
            seed: self.seed.or(fallback.seed),
            format: self.format.or(fallback.format),
            max_files: self.max_files.or(fallback.max_files),
        }
    }

    pub fn format(&self) -> Result<OutputFormat> {
        self.format
            .as_deref()
            .map_or(Ok(OutputFormat::default()), str::parse)
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            max_files: self.max_files.unwrap_or(DEFAULT_MAX_FILES),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn single(&self, sweep: &Option<Sweep>, name: &str) -> Result<Option<usize>> {
        sweep.as_ref().map(|s| s.single(name)).transpose()
    }

    fn require(&self, sweep: &Option<Sweep>, name: &str, scheme: SchemeId) -> Result<usize> {
        self.single(sweep, name)?
            .ok_or_else(|| Error::InvalidParams(format!("{scheme} needs --{name}")))
    }

    fn base_size(&self, scheme: SchemeId) -> Result<u64> {
        match self.iv_sizes.as_deref() {
            None => Ok(1),
            Some([t]) => Ok(*t),
            Some(other) => Err(Error::InvalidParams(format!(
                "{scheme} takes one base IV size, got {other:?}"
            ))),
        }
    }

    /// Resolves the scheme and its parameters; the scheme defaults to `flcd`.
    pub fn scheme_params(&self) -> Result<SchemeParams> {
        let id: SchemeId = self.scheme.as_deref().unwrap_or("flcd").parse()?;
        match id {
            SchemeId::Uncoded => {
                let file_counts = match (&self.file_counts, self.single(&self.nodes, "nodes")?) {
                    (Some(c), _) => c.clone(),
                    (None, Some(k)) => vec![1; k],
                    (None, None) => {
                        return Err(Error::InvalidParams(
                            "uncoded needs --file-counts or --nodes".into(),
                        ))
                    }
                };
                let iv_sizes = self
                    .iv_sizes
                    .clone()
                    .unwrap_or_else(|| vec![1; file_counts.len()]);
                Ok(SchemeParams::Uncoded {
                    file_counts,
                    iv_sizes,
                })
            }
            SchemeId::Lmya => Ok(SchemeParams::Lmya {
                nodes: self.require(&self.nodes, "nodes", id)?,
                load: self.require(&self.load, "load", id)?,
                iv_bits: self.base_size(id)?,
            }),
            SchemeId::Flcd3 => {
                if self.single(&self.nodes, "nodes")?.is_some_and(|k| k != 3)
                    || self.single(&self.load, "load")?.is_some_and(|r| r != 2)
                {
                    return Err(Error::InvalidParams("flcd3 is defined for K=3, r=2".into()));
                }
                let sizes = match self.iv_sizes.as_deref() {
                    None => [1, 1, 1],
                    Some(&[a, b, c]) => [a, b, c],
                    Some(other) => {
                        return Err(Error::InvalidParams(format!(
                            "flcd3 needs three IV sizes, got {other:?}"
                        )))
                    }
                };
                Ok(SchemeParams::Flcd3 {
                    sizes,
                    scale: self.scale.unwrap_or(1),
                })
            }
            SchemeId::FlcdGeneral => Ok(SchemeParams::FlcdGeneral {
                nodes: self.require(&self.nodes, "nodes", id)?,
                load: self.require(&self.load, "load", id)?,
                base_t1: self.base_size(id)?,
            }),
        }
    }
}

/// Load table for the configured `(K, r)` sweep, or the nine reference
/// configurations when neither is set.
pub fn cmd_table(cfg: &ExperimentConfig) -> Result<String> {
    let configs: Vec<(usize, usize)> = match (&cfg.nodes, &cfg.load) {
        (None, None) => REFERENCE_CONFIGS.to_vec(),
        (Some(k), Some(r)) => {
            k.0.iter()
                .flat_map(|&k| r.0.iter().map(move |&r| (k, r)))
                .filter(|&(k, r)| r >= 1 && r <= k)
                .collect()
        }
        _ => {
            return Err(Error::InvalidParams(
                "table needs both --nodes and --load, or neither".into(),
            ))
        }
    };
    if configs.is_empty() {
        return Err(Error::InvalidParams(
            "no (K, r) with 1 <= r <= K in the sweep".into(),
        ));
    }
    Ok(render_table(
        &generate_table(&configs),
        cfg.format()?.into(),
    ))
}

pub fn render_comparison(c: &Comparison, format: OutputFormat) -> String {
    let predicted = format_ratio(&c.predicted);
    let measured = format_ratio(&c.measured);
    let decimal = c.measured.to_f64().unwrap_or(f64::NAN);
    match format {
        OutputFormat::Csv => format!(
            "scheme,K,r,files,groups,broadcasts,transmitted_bits,total_iv_bits,predicted,measured,measured_decimal,exact,decode_ok\n\
             {},{},{},{},{},{},{},{},{predicted},{measured},{decimal:.4},{},{}\n",
            c.scheme,
            c.nodes,
            c.load,
            c.files,
            c.groups,
            c.broadcasts,
            c.transmitted_bits,
            c.total_iv_bits,
            c.exact(),
            c.decode_ok
        ),
        OutputFormat::Markdown => {
            let mut s = String::new();
            let _ = writeln!(s, "| field | value |\n| --- | --- |");
            for (k, v) in [
                ("scheme", c.scheme.to_string()),
                ("K", c.nodes.to_string()),
                ("r", c.load.to_string()),
                ("files", c.files.to_string()),
                ("groups", c.groups.to_string()),
                ("broadcasts", c.broadcasts.to_string()),
                ("transmitted bits", c.transmitted_bits.to_string()),
                ("total IV bits", c.total_iv_bits.to_string()),
                ("predicted load", predicted),
                ("measured load", format!("{measured} ({decimal:.4})")),
                ("exact", c.exact().to_string()),
                ("decode ok", c.decode_ok.to_string()),
            ] {
                let _ = writeln!(s, "| {k} | {v} |");
            }
            s
        }
    }
}

/// Build, execute and decode the configured scheme on seeded IVs.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<(Comparison, String)> {
    let comparison = predict_vs_measure(&cfg.scheme_params()?, &cfg.build_options(), cfg.seed())?;
    let text = render_comparison(&comparison, cfg.format()?);
    Ok((comparison, text))
}

/// Sort seeded records, or the records in `input`, and optionally write the
/// per-node outputs to `out`.
pub fn cmd_terasort(
    cfg: &ExperimentConfig,
    input: Option<&Path>,
    out: Option<&Path>,
) -> Result<SortReport> {
    let params = cfg.scheme_params()?;
    let records = match input {
        Some(path) => read_dataset(path)?,
        None => generate_records(
            cfg.records.unwrap_or(DEFAULT_RECORDS),
            KEY_SPACE,
            cfg.seed(),
        )?,
    };
    let report = run_terasort_on(&params, &cfg.build_options(), &records)?;
    if let Some(dir) = out {
        report.write_parts(dir)?;
    }
    Ok(report)
}

pub fn gen_data(records: usize, seed: u64, path: &Path) -> Result<()> {
    write_dataset(path, &generate_records(records, KEY_SPACE, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps() {
        assert_eq!("8-10".parse::<Sweep>().unwrap().0, vec![8, 9, 10]);
        assert_eq!("16, 22,25".parse::<Sweep>().unwrap().0, vec![16, 22, 25]);
        assert_eq!("3-4,9".parse::<Sweep>().unwrap().0, vec![3, 4, 9]);
        assert!("5-3".parse::<Sweep>().is_err());
        assert!("".parse::<Sweep>().is_err());
        assert!("x".parse::<Sweep>().is_err());
    }

    #[test]
    fn toml_file_and_flag_precedence() {
        let file = ExperimentConfig::from_toml(
            "scheme = \"lmya\"\nnodes = 6\nload = \"2\"\niv-sizes = [4]\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(file.nodes, Some(Sweep(vec![6])));
        let flags = ExperimentConfig {
            load: Some(Sweep(vec![3])),
            ..Default::default()
        };
        let merged = flags.or(file);
        assert_eq!(
            merged.scheme_params().unwrap(),
            SchemeParams::Lmya {
                nodes: 6,
                load: 3,
                iv_bits: 4
            }
        );
        assert_eq!(merged.seed(), 9);
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn scheme_resolution() {
        let cfg = ExperimentConfig {
            scheme: Some("flcd3".into()),
            iv_sizes: Some(vec![1, 2, 2]),
            ..Default::default()
        };
        assert_eq!(
            cfg.scheme_params().unwrap(),
            SchemeParams::Flcd3 {
                sizes: [1, 2, 2],
                scale: 1
            }
        );
        let missing = ExperimentConfig {
            load: Some(Sweep(vec![2])),
            ..Default::default()
        };
        assert!(matches!(
            missing.scheme_params(),
            Err(Error::InvalidParams(_))
        ));
        let kr = ExperimentConfig {
            scheme: Some("kr".into()),
            ..Default::default()
        };
        assert!(matches!(kr.scheme_params(), Err(Error::NotFeasible(_))));
    }

    #[test]
    fn single_row_table() {
        let cfg = ExperimentConfig {
            nodes: Some(Sweep(vec![16])),
            load: Some(Sweep(vec![4])),
            format: Some("csv".into()),
            ..Default::default()
        };
        let table = cmd_table(&cfg).unwrap();
        assert_eq!(table.lines().count(), 2);
        assert!(table
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("16,4,4.00,0.19,1820,4368,0.25,64,192,"));
    }

    #[test]
    fn simulate_reports_exact_match() {
        let cfg = ExperimentConfig {
            scheme: Some("flcd3".into()),
            iv_sizes: Some(vec![1, 2, 2]),
            scale: Some(2),
            format: Some("csv".into()),
            ..Default::default()
        };
        let (c, text) = cmd_simulate(&cfg).unwrap();
        assert!(c.exact());
        assert!(text.contains(",3/20,3/20,0.1500,true,true"));
    }
}
