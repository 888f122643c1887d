//! Relative metrics against the single-stage reference and grouped
//! summaries of paired records.

use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centrality::Strategy;
use crate::experiment::PairRecord;
use crate::seeding::SeedingMode;
use crate::wilcoxon::wilcoxon_signed_rank;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("reference value is zero; relative distance undefined")]
pub struct UndefinedRatio;

/// `(seq - ss) / ss`: relative gain in reach over single stage.
pub fn coverage_ref(cov_seq: f64, cov_ss: f64) -> Result<f64, UndefinedRatio> {
    if cov_ss == 0.0 {
        return Err(UndefinedRatio);
    }
    Ok((cov_seq - cov_ss) / cov_ss)
}

/// `(seq - ss) / ss`: relative extension of the process duration.
pub fn duration_ref(dur_seq: u32, dur_ss: u32) -> Result<f64, UndefinedRatio> {
    if dur_ss == 0 {
        return Err(UndefinedRatio);
    }
    Ok((dur_seq as f64 - dur_ss as f64) / dur_ss as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKey {
    Network,
    Strategy,
    Mode,
    Pp,
    Sp,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown group key {0:?} (expected network, strategy, mode, pp or sp)")]
pub struct ParseGroupKeyError(pub String);

impl FromStr for GroupKey {
    type Err = ParseGroupKeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "network" => Ok(GroupKey::Network),
            "strategy" => Ok(GroupKey::Strategy),
            "mode" => Ok(GroupKey::Mode),
            "pp" => Ok(GroupKey::Pp),
            "sp" => Ok(GroupKey::Sp),
            _ => Err(ParseGroupKeyError(s.into())),
        }
    }
}

/// Which coverage feeds the relative metric in a summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverageBasis {
    /// Seeds plus contagion.
    #[default]
    Total,
    /// Contagion only.
    Natural,
}

/// Aggregate over one group of records. Grouping columns that were not
/// requested are left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub network: Option<String>,
    pub strategy: Option<Strategy>,
    pub mode: Option<SeedingMode>,
    pub pp: Option<f64>,
    pub sp: Option<f64>,
    pub records: usize,
    /// Records whose coverage reference was zero.
    pub coverage_undefined: usize,
    /// Records whose duration reference was zero.
    pub duration_undefined: usize,
    pub mean_coverage_ss: f64,
    pub mean_coverage_seq: f64,
    pub mean_duration_ss: f64,
    pub mean_duration_seq: f64,
    pub mean_coverage_ref: Option<f64>,
    pub median_coverage_ref: Option<f64>,
    pub mean_duration_ref: Option<f64>,
    pub median_duration_ref: Option<f64>,
    /// Share of defined cases with `coverage_ref > 0`.
    pub win_fraction: Option<f64>,
    pub mean_seeds_saved: f64,
    pub wilcoxon_n: Option<usize>,
    pub wilcoxon_w: Option<f64>,
    pub wilcoxon_p: Option<f64>,
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len().is_multiple_of(2) { (v[mid - 1] + v[mid]) / 2.0 } else { v[mid] })
}

#[derive(PartialEq)]
struct Label {
    network: Option<String>,
    strategy: Option<Strategy>,
    mode: Option<SeedingMode>,
    pp: Option<u64>,
    sp: Option<u64>,
}

impl Label {
    fn of(r: &PairRecord, keys: &[GroupKey]) -> Self {
        let has = |k| keys.contains(&k);
        Label {
            network: has(GroupKey::Network).then(|| r.network.clone()),
            strategy: has(GroupKey::Strategy).then_some(r.strategy),
            mode: has(GroupKey::Mode).then_some(r.mode),
            pp: has(GroupKey::Pp).then_some(r.pp.to_bits()),
            sp: has(GroupKey::Sp).then_some(r.sp.to_bits()),
        }
    }
}

/// Groups records by `group_by` (in order of first appearance) and
/// aggregates each group. An empty key list yields one overall row.
pub fn summarize(table: &[PairRecord], group_by: &[GroupKey], basis: CoverageBasis) -> Vec<SummaryRow> {
    let mut labels: Vec<Label> = Vec::new();
    let mut members: Vec<Vec<&PairRecord>> = Vec::new();
    for r in table {
        let label = Label::of(r, group_by);
        match labels.iter().position(|l| *l == label) {
            Some(i) => members[i].push(r),
            None => {
                labels.push(label);
                members.push(alloc::vec![r]);
            }
        }
    }
    labels
        .into_iter()
        .zip(members)
        .map(|(label, rows)| summarize_group(label, &rows, basis))
        .collect()
}

fn summarize_group(label: Label, rows: &[&PairRecord], basis: CoverageBasis) -> SummaryRow {
    let pick = |r: &PairRecord| match basis {
        CoverageBasis::Total => (r.coverage_ss, r.coverage_seq),
        CoverageBasis::Natural => (r.natural_ss, r.natural_seq),
    };
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| pick(r)).collect();
    let cov_refs: Vec<f64> = pairs.iter().filter_map(|&(ss, seq)| coverage_ref(seq, ss).ok()).collect();
    let dur_refs: Vec<f64> = rows
        .iter()
        .filter_map(|r| duration_ref(r.duration_seq, r.duration_ss).ok())
        .collect();
    let col = |f: fn(&PairRecord) -> f64| -> f64 {
        mean(&rows.iter().map(|r| f(r)).collect::<Vec<_>>()).unwrap_or(0.0)
    };
    let wins = cov_refs.iter().filter(|&&c| c > 0.0).count();
    let wilcoxon = wilcoxon_signed_rank(&pairs).ok();

    SummaryRow {
        network: label.network,
        strategy: label.strategy,
        mode: label.mode,
        pp: label.pp.map(f64::from_bits),
        sp: label.sp.map(f64::from_bits),
        records: rows.len(),
        coverage_undefined: rows.len() - cov_refs.len(),
        duration_undefined: rows.len() - dur_refs.len(),
        mean_coverage_ss: mean(&pairs.iter().map(|p| p.0).collect::<Vec<_>>()).unwrap_or(0.0),
        mean_coverage_seq: mean(&pairs.iter().map(|p| p.1).collect::<Vec<_>>()).unwrap_or(0.0),
        mean_duration_ss: col(|r| r.duration_ss as f64),
        mean_duration_seq: col(|r| r.duration_seq as f64),
        mean_coverage_ref: mean(&cov_refs),
        median_coverage_ref: median(&cov_refs),
        mean_duration_ref: mean(&dur_refs),
        median_duration_ref: median(&dur_refs),
        win_fraction: (!cov_refs.is_empty()).then(|| wins as f64 / cov_refs.len() as f64),
        mean_seeds_saved: col(|r| r.seeds_saved),
        wilcoxon_n: wilcoxon.as_ref().map(|w| w.n),
        wilcoxon_w: wilcoxon.as_ref().map(|w| w.statistic),
        wilcoxon_p: wilcoxon.as_ref().map(|w| w.p_value),
    }
}
