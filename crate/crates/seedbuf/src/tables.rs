//! CSV tables: pair records, summaries, plot series, traces and rankings.
//!
//! Fixed headers:
//!
//! - records: `network,strategy,mode,pp,sp,replication,node_count,budget,
//!   coverage_ss,coverage_seq,natural_ss,natural_seq,duration_ss,duration_seq,
//!   coverage_ref,duration_ref,seeds_saved`
//! - scatter: `coverage_ref,duration_ref,mode`
//! - durations: `mode,duration_ss,duration_seq,duration_ref`
//! - trace: `stage,natural_count,seeded_count,cumulative_active,buffer_credit`
//! - ranking: `node_id,strategy,score,rank`
//!
//! Undefined ratios are written as empty fields.

use std::io::{self, Read, Write};

use seedbuf_core::analysis::SummaryRow;
use seedbuf_core::{PairRecord, Ranking, RunResult, SeedingMode};
use serde::Serialize;
use thiserror::Error;

pub const RECORD_HEADER: &str = "network,strategy,mode,pp,sp,replication,node_count,budget,coverage_ss,coverage_seq,natural_ss,natural_seq,duration_ss,duration_seq,coverage_ref,duration_ref,seeds_saved";

#[derive(Debug, Error)]
pub enum TableError {
    #[error("records row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("records header mismatch: expected `{RECORD_HEADER}`")]
    Header,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn write_rows<W: Write, T: Serialize>(w: W, rows: impl IntoIterator<Item = T>) -> Result<(), TableError> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes records with the fixed header, even when empty.
pub fn write_records<W: Write>(w: W, records: &[PairRecord]) -> Result<(), TableError> {
    if records.is_empty() {
        let mut w = w;
        writeln!(w, "{RECORD_HEADER}")?;
        return Ok(());
    }
    write_rows(w, records)
}

/// Reads a records table; rows are numbered from 1 after the header.
pub fn read_records<R: Read>(r: R) -> Result<Vec<PairRecord>, TableError> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != RECORD_HEADER {
        return Err(TableError::Header);
    }
    rdr.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| TableError::Row { row: i + 1, message: e.to_string() })
                .and_then(|rec: PairRecord| {
                    if rec.is_consistent() {
                        Ok(rec)
                    } else {
                        Err(TableError::Row {
                            row: i + 1,
                            message: "coverage_ref/duration_ref disagree with raw values".into(),
                        })
                    }
                })
        })
        .collect()
}

pub fn write_summary<W: Write>(w: W, rows: &[SummaryRow]) -> Result<(), TableError> {
    write_rows(w, rows)
}

#[derive(Serialize)]
struct ScatterPoint {
    coverage_ref: Option<f64>,
    duration_ref: Option<f64>,
    mode: SeedingMode,
}

/// One point per record: reach gain against duration extension.
pub fn write_scatter<W: Write>(w: W, records: &[PairRecord]) -> Result<(), TableError> {
    write_rows(
        w,
        records.iter().map(|r| ScatterPoint {
            coverage_ref: r.coverage_ref,
            duration_ref: r.duration_ref,
            mode: r.mode,
        }),
    )
}

#[derive(Serialize)]
struct DurationPoint {
    mode: SeedingMode,
    duration_ss: u32,
    duration_seq: u32,
    duration_ref: Option<f64>,
}

/// Per-record durations for distribution plots.
pub fn write_durations<W: Write>(w: W, records: &[PairRecord]) -> Result<(), TableError> {
    write_rows(
        w,
        records.iter().map(|r| DurationPoint {
            mode: r.mode,
            duration_ss: r.duration_ss,
            duration_seq: r.duration_seq,
            duration_ref: r.duration_ref,
        }),
    )
}

/// Per-stage trace followed by `# key=value` summary lines.
pub fn write_trace<W: Write>(mut w: W, res: &RunResult) -> io::Result<()> {
    writeln!(w, "stage,natural_count,seeded_count,cumulative_active,buffer_credit")?;
    let mut cumulative = 0u64;
    for r in &res.stages {
        cumulative += (r.natural_count + r.seeded_count) as u64;
        writeln!(w, "{},{},{},{},{}", r.stage, r.natural_count, r.seeded_count, cumulative, r.buffer_credit)?;
    }
    writeln!(w, "# coverage_total={}", res.coverage_total)?;
    writeln!(w, "# coverage_natural={}", res.coverage_natural)?;
    writeln!(w, "# duration={}", res.duration)?;
    writeln!(w, "# peak_stage={}", res.peak_stage)?;
    writeln!(w, "# seeds_used={}", res.seeds_used.len())?;
    w.flush()
}

#[derive(Serialize)]
struct RankRow<'a> {
    node_id: u64,
    strategy: &'a str,
    score: Option<f64>,
    rank: usize,
}

/// Ranking in best-first order; `labels` maps dense ids to file labels.
pub fn write_ranking<W: Write>(w: W, ranking: &Ranking, labels: &[u64]) -> Result<(), TableError> {
    let code = ranking.strategy.code();
    write_rows(
        w,
        ranking.order.iter().enumerate().map(|(i, &v)| RankRow {
            node_id: labels[v as usize],
            strategy: code,
            score: ranking.scores.as_ref().map(|s| s[v as usize]),
            rank: i + 1,
        }),
    )
}
