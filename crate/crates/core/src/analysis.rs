//! Closed-form communication loads, file/group counts and feasibility tests
//! for the LMYA, KR and flexible (FLCD) designs, plus the comparison table.
//!
//! Everything here is exact rational arithmetic; rounding only happens in the
//! renderers.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{ratio, NetworkConfig, Ratio};

/// Designs compared in the load table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Design {
    Lmya,
    Kr,
    Flcd,
}

impl Design {
    pub const ALL: [Design; 3] = [Design::Lmya, Design::Kr, Design::Flcd];

    pub fn label(self) -> &'static str {
        match self {
            Design::Lmya => "LMYA",
            Design::Kr => "KR",
            Design::Flcd => "FLCD",
        }
    }
}

/// The nine `(K, r)` configurations of the reference comparison table.
pub const REFERENCE_CONFIGS: [(usize, usize); 9] = [
    (16, 3),
    (16, 4),
    (16, 5),
    (22, 3),
    (22, 4),
    (22, 5),
    (25, 3),
    (25, 4),
    (25, 5),
];

/// `C(n, k)`, failing on `u128` overflow.
pub fn binomial(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(Error::Overflow("binomial coefficient"))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

fn checked_pow(base: usize, exp: usize) -> Result<u128> {
    (base as u128)
        .checked_pow(exp as u32)
        .ok_or(Error::Overflow("file count"))
}

/// `(1/r)(1 - r/K)`.
pub fn load_lmya(nodes: usize, load: usize) -> Result<Ratio> {
    let cfg = NetworkConfig::new(nodes, load)?;
    Ok(ratio(1, cfg.load()) * (Ratio::one() - ratio(cfg.load(), cfg.nodes())))
}

pub fn kr_feasible(nodes: usize, load: usize) -> Result<NetworkConfig> {
    let cfg = NetworkConfig::new(nodes, load)?;
    if load < 2 {
        return Err(Error::NotFeasible(format!("KR needs r >= 2, got r={load}")));
    }
    if !cfg.is_integer_m() {
        return Err(Error::NotFeasible(format!(
            "KR needs K/r to be an integer, got {nodes}/{load}"
        )));
    }
    Ok(cfg)
}

/// `(1/(r-1))(1 - r/K)`; only defined for integer `K/r`.
pub fn load_kr(nodes: usize, load: usize) -> Result<Ratio> {
    kr_feasible(nodes, load)?;
    Ok(fixed_size_bound(nodes, load))
}

/// `(1/(r-1))(1 - r/K)` evaluated without the integrality requirement: the
/// reference the flexible design is compared with when `K/r` is fractional.
pub fn fixed_size_bound(nodes: usize, load: usize) -> Ratio {
    ratio(1, load - 1) * (Ratio::one() - ratio(load, nodes))
}

fn check_sizes3(sizes: [u64; 3]) -> Result<()> {
    if sizes.contains(&0) {
        return Err(Error::InvalidParams(format!(
            "IV sizes must be positive, got {sizes:?}"
        )));
    }
    Ok(())
}

/// Load of the three-node design for arbitrary IV sizes:
/// `3·T1·T2·T3 / (2(T1T2 + T1T3 + T2T3)(T1 + T2 + T3))`.
pub fn load_flcd3(sizes: [u64; 3]) -> Result<Ratio> {
    check_sizes3(sizes)?;
    let [a, b, c] = sizes.map(BigInt::from);
    let numer = BigInt::from(3) * &a * &b * &c;
    let denom = BigInt::from(2) * (&a * &b + &a * &c + &b * &c) * (&a + &b + &c);
    Ok(Ratio::new(numer, denom))
}

/// Minimal file count of the three-node design:
/// `LCM(T1,T2,T3) · (1/T1 + 1/T2 + 1/T3)`.
pub fn flcd3_min_files(sizes: [u64; 3]) -> Result<u128> {
    check_sizes3(sizes)?;
    let lcm = sizes.iter().fold(1u128, |acc, &t| acc.lcm(&u128::from(t)));
    Ok(sizes.iter().map(|&t| lcm / u128::from(t)).sum())
}

/// Feasibility of the general flexible design: `K > 3` and `2 <= r <= K/2`.
pub fn flcd_feasible(nodes: usize, load: usize) -> Result<NetworkConfig> {
    if nodes <= 3 {
        return Err(Error::InvalidParams(format!(
            "the general design needs K > 3, got K={nodes}"
        )));
    }
    if load < 2 || 2 * load > nodes {
        return Err(Error::InvalidParams(format!(
            "the general design needs 2 <= r <= K/2, got K={nodes}, r={load}"
        )));
    }
    NetworkConfig::new(nodes, load)
}

/// `(1/(r-1)) · (⌊m⌋² - ⌊m⌋) / (⌊m⌋·m̂ - m)`.
pub fn load_flcd_general(nodes: usize, load: usize) -> Result<Ratio> {
    let cfg = flcd_feasible(nodes, load)?;
    let f = cfg.floor_m();
    let numer = ratio(f * f - f, 1);
    let denom = ratio(f * cfg.m_hat(), 1) - cfg.m();
    Ok(ratio(1, load - 1) * numer / denom)
}

/// `N = G = ⌊m⌋^(m̂r - K) · m̂^(K - ⌊m⌋r)`.
pub fn counts_flcd(nodes: usize, load: usize) -> Result<(u128, u128)> {
    let cfg = flcd_feasible(nodes, load)?;
    let n = checked_pow(cfg.floor_m(), cfg.r2())?
        .checked_mul(checked_pow(cfg.m_hat(), cfg.r1())?)
        .ok_or(Error::Overflow("file count"))?;
    Ok((n, n))
}

/// `(C(K, r), C(K, r+1))`.
pub fn counts_lmya(nodes: usize, load: usize) -> Result<(u128, u128)> {
    NetworkConfig::new(nodes, load)?;
    Ok((binomial(nodes, load)?, binomial(nodes, load + 1)?))
}

/// `((K/r)^(r-1), (K/r)^(r-1) · (K/r - 1))`.
pub fn counts_kr(nodes: usize, load: usize) -> Result<(u128, u128)> {
    let cfg = kr_feasible(nodes, load)?;
    let n = checked_pow(cfg.floor_m(), load - 1)?;
    let g = n
        .checked_mul(cfg.floor_m() as u128 - 1)
        .ok_or(Error::Overflow("group count"))?;
    Ok((n, g))
}

/// `T'_1 / T'_2 = (⌊m⌋ - 1)/⌊m⌋` when both node classes are populated, else 1.
pub fn flcd_iv_ratio(nodes: usize, load: usize) -> Result<Ratio> {
    let cfg = flcd_feasible(nodes, load)?;
    if cfg.is_integer_m() {
        return Ok(Ratio::one());
    }
    Ok(ratio(cfg.floor_m() - 1, cfg.floor_m()))
}

/// Load of unicast shuffling when node `k` maps `file_counts[k]` distinct
/// files: `Σ_k T_k (N - |M_k|) / (N Σ_k T_k)`.
pub fn load_uncoded(file_counts: &[usize], sizes: &[u64]) -> Result<Ratio> {
    if file_counts.len() != sizes.len() || sizes.is_empty() {
        return Err(Error::InvalidParams(format!(
            "{} file counts for {} IV sizes",
            file_counts.len(),
            sizes.len()
        )));
    }
    let n: usize = file_counts.iter().sum();
    if n == 0 {
        return Err(Error::InvalidParams("no files".into()));
    }
    let sent: u128 = file_counts
        .iter()
        .zip(sizes)
        .map(|(&c, &t)| u128::from(t) * (n - c) as u128)
        .sum();
    let total: u128 = sizes.iter().map(|&t| u128::from(t)).sum::<u128>() * n as u128;
    Ok(ratio(sent, total))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadFigures {
    pub load: Ratio,
    pub files: u128,
    pub groups: u128,
    /// Smallest over largest IV size.
    pub iv_ratio: Ratio,
}

/// One design evaluated at one `(K, r)`; `figures` is `None` when the design
/// cannot operate there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadReport {
    pub design: Design,
    pub nodes: usize,
    pub load: usize,
    pub figures: Option<LoadFigures>,
    /// For the flexible design at fractional `K/r`: whether its load is
    /// strictly below `(1/(r-1))(1 - r/K)`.
    pub below_fixed_size_bound: Option<bool>,
}

pub fn evaluate(design: Design, nodes: usize, load: usize) -> Result<LoadFigures> {
    match design {
        Design::Lmya => {
            let (files, groups) = counts_lmya(nodes, load)?;
            Ok(LoadFigures {
                load: load_lmya(nodes, load)?,
                files,
                groups,
                iv_ratio: Ratio::one(),
            })
        }
        Design::Kr => {
            let (files, groups) = counts_kr(nodes, load)?;
            Ok(LoadFigures {
                load: load_kr(nodes, load)?,
                files,
                groups,
                iv_ratio: Ratio::one(),
            })
        }
        Design::Flcd => {
            let (files, groups) = counts_flcd(nodes, load)?;
            Ok(LoadFigures {
                load: load_flcd_general(nodes, load)?,
                files,
                groups,
                iv_ratio: flcd_iv_ratio(nodes, load)?,
            })
        }
    }
}

/// One report per design per configuration, in input order.
pub fn generate_table(configs: &[(usize, usize)]) -> Vec<LoadReport> {
    let mut rows = Vec::with_capacity(configs.len() * Design::ALL.len());
    for &(nodes, load) in configs {
        for design in Design::ALL {
            let figures = evaluate(design, nodes, load).ok();
            let below_fixed_size_bound = match (&figures, design) {
                (Some(fig), Design::Flcd) if nodes % load != 0 => {
                    Some(fig.load < fixed_size_bound(nodes, load))
                }
                _ => None,
            };
            rows.push(LoadReport {
                design,
                nodes,
                load,
                figures,
                below_fixed_size_bound,
            });
        }
    }
    rows
}

/// Rounds half away from zero to two decimals, e.g. `13/48 -> "0.27"`.
pub fn format_2dp(value: &Ratio) -> String {
    let scaled = value * ratio(100, 1) + ratio(1, 2);
    let hundredths = scaled.floor().to_integer();
    let (whole, frac) = hundredths.div_mod_floor(&BigInt::from(100));
    format!("{whole}.{:02}", frac.to_u32().unwrap_or(0))
}

pub fn format_ratio(value: &Ratio) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

fn format_iv_ratio(value: &Ratio) -> String {
    if value.is_one() || value.is_zero() {
        "1".into()
    } else {
        format!("{}:{}", value.numer(), value.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

fn design_cells(report: Option<&LoadReport>, dash: &str) -> [String; 3] {
    match report.and_then(|r| r.figures.as_ref()) {
        Some(f) => [
            format_2dp(&f.load),
            f.files.to_string(),
            f.groups.to_string(),
        ],
        None => [dash.into(), dash.into(), dash.into()],
    }
}

/// Renders reports as the comparison table: one line per `(K, r)` with the
/// LMYA, KR and FLCD columns side by side.
pub fn render_table(reports: &[LoadReport], format: TableFormat) -> String {
    let (dash, sep) = match format {
        TableFormat::Markdown => ("−", " | "),
        TableFormat::Csv => ("-", ","),
    };
    let header = [
        "K",
        "r",
        "m",
        "LMYA L",
        "LMYA N",
        "LMYA G",
        "KR L",
        "KR N",
        "KR G",
        "FLCD L",
        "FLCD N",
        "FLCD G",
        "FLCD IV ratio",
        "FLCD vs fixed-size bound",
    ];
    let mut out = String::new();
    match format {
        TableFormat::Markdown => {
            let _ = writeln!(out, "| {} |", header.join(sep));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
        }
        TableFormat::Csv => {
            let csv_header: Vec<String> = header
                .iter()
                .map(|h| h.to_lowercase().replace([' ', '-'], "_"))
                .collect();
            let _ = writeln!(out, "{}", csv_header.join(sep));
        }
    }
    let mut configs: Vec<(usize, usize)> = Vec::new();
    for r in reports {
        if configs.last() != Some(&(r.nodes, r.load)) {
            configs.push((r.nodes, r.load));
        }
    }
    for (nodes, load) in configs {
        let find = |d: Design| {
            reports
                .iter()
                .find(|r| r.design == d && r.nodes == nodes && r.load == load)
        };
        let mut cells = vec![
            nodes.to_string(),
            load.to_string(),
            format_2dp(&ratio(nodes, load)),
        ];
        for d in Design::ALL {
            cells.extend(design_cells(find(d), dash));
        }
        let flcd = find(Design::Flcd);
        cells.push(
            flcd.and_then(|r| r.figures.as_ref())
                .map_or(dash.to_string(), |f| format_iv_ratio(&f.iv_ratio)),
        );
        cells.push(match flcd {
            Some(r) if r.figures.is_some() => match r.below_fixed_size_bound {
                Some(true) => "<".into(),
                Some(false) => ">=".into(),
                None => "=".into(),
            },
            _ => dash.into(),
        });
        match format {
            TableFormat::Markdown => {
                let _ = writeln!(out, "| {} |", cells.join(sep));
            }
            TableFormat::Csv => {
                let _ = writeln!(out, "{}", cells.join(sep));
            }
        }
    }
    out
}
