//! Front end for `dimotif`: loads an edge list, counts motifs, optionally
//! runs the switching null model and the brute-force cross-check, and writes
//! a TSV or JSON report.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use dimotif::engine::{count_motifs_with, EngineConfig, Histogram};
use dimotif::iso::census;
use dimotif::nullmodel::{significance, RandomizerConfig};
use dimotif::oracle::brute_force_histogram;
use dimotif::{parse_edge_list, MotifError, Strategy};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot open {path}: {source}")]
    Open { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Motif(#[from] MotifError),
    #[error("write failed: {0}")]
    Write(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Pairwise,
    Scan,
    Adaptive,
    Split,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Pairwise => Strategy::Pairwise,
            StrategyArg::Scan => Strategy::NeighborScan,
            StrategyArg::Adaptive => Strategy::Adaptive,
            StrategyArg::Split => Strategy::Split,
        }
    }
}

/// Exact directed motif counting.
#[derive(Clone, Debug, Parser)]
#[command(name = "dimotif", version)]
pub struct RunConfig {
    /// Edge list, one "u v" pair per line.
    #[arg(long, required_unless_present = "census")]
    pub input: Option<PathBuf>,

    /// Motif size.
    #[arg(long, required_unless_present = "census", value_parser = clap::value_parser!(u8).range(3..=6))]
    pub k: Option<u8>,

    /// Worker threads (defaults to the available parallelism).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,

    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,

    /// Number of randomized replicas; 0 skips the null model.
    #[arg(long = "random", default_value_t = 0)]
    pub replicas: usize,

    #[arg(long, default_value_t = 3.0)]
    pub switches_per_edge: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Recount with the brute-force counter and compare.
    #[arg(long)]
    pub oracle: bool,

    /// Print the number of isomorphism classes of K-vertex digraphs instead.
    #[arg(long, value_name = "K", value_parser = clap::value_parser!(u8).range(2..=6))]
    pub census: Option<u8>,

    /// Allow the slow k = 6 census.
    #[arg(long)]
    pub long_run: bool,

    #[arg(long, value_enum, default_value = "adaptive")]
    pub strategy: StrategyArg,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn workers(&self) -> usize {
        match self.threads {
            Some(t) => t as usize,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub motif_id: String,
    pub count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std: Option<f64>,
    /// Absent when no replicas ran; null when the replica spread is zero.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        deserialize_with = "present"
    )]
    pub z: Option<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Footer {
    pub n: usize,
    /// Directed edges; a bidirected pair counts twice.
    pub m_directed: usize,
    /// Adjacent vertex pairs; a bidirected pair counts once.
    pub m_pairs: usize,
    pub bases: u64,
    pub total: u64,
    pub threads: usize,
    pub replicas: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub k: usize,
    pub rows: Vec<Row>,
    pub footer: Footer,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub k: usize,
    pub connected: u64,
    pub total: u64,
}

/// Outcome of a run that completed without error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    OracleMismatch,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::OracleMismatch => 2,
        }
    }
}

/// Keeps an explicit `null` apart from a missing field.
fn present<'de, D, T>(d: D) -> Result<Option<T>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: Deserialize<'de>,
{
    T::deserialize(d).map(Some)
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

impl Report {
    pub fn to_tsv(&self) -> String {
        let stats = self.footer.replicas > 0;
        let mut s = String::new();
        s.push_str(if stats {
            "motif_id\tcount\tmean\tstd\tz\tp\n"
        } else {
            "motif_id\tcount\n"
        });
        for row in &self.rows {
            let _ = write!(s, "{}\t{}", row.motif_id, row.count);
            if stats {
                let z = match row.z.flatten() {
                    Some(z) => format!("{z:.6}"),
                    None => "NA".to_string(),
                };
                let _ = write!(
                    s,
                    "\t{:.6}\t{:.6}\t{}\t{:.6}",
                    row.mean.unwrap_or(0.0),
                    row.std.unwrap_or(0.0),
                    z,
                    row.p.unwrap_or(0.0)
                );
            }
            s.push('\n');
        }
        let f = &self.footer;
        let _ = writeln!(s, "# n={}", f.n);
        let _ = writeln!(s, "# m_directed={}", f.m_directed);
        let _ = writeln!(s, "# m_pairs={}", f.m_pairs);
        let _ = writeln!(s, "# bases={}", f.bases);
        let _ = writeln!(s, "# total={}", f.total);
        let _ = writeln!(s, "# threads={}", f.threads);
        if stats {
            let _ = writeln!(s, "# replicas={}", f.replicas);
        }
        if let Some(o) = &f.oracle {
            let _ = writeln!(s, "# oracle: {o}");
        }
        s
    }
}

fn rows_plain(h: &Histogram) -> Vec<Row> {
    h.iter()
        .map(|(id, &count)| Row {
            motif_id: id.to_string(),
            count,
            mean: None,
            std: None,
            z: None,
            p: None,
        })
        .collect()
}

/// Runs one invocation, writing the report to `out` and diagnostics to `log`.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, log: &mut dyn Write) -> Result<Status, CliError> {
    if let Some(k) = cfg.census {
        let start = Instant::now();
        let c = census(k as usize, cfg.long_run)?;
        let report = CensusReport {
            k: c.k,
            connected: c.connected,
            total: c.total,
        };
        match cfg.format {
            Format::Tsv => {
                writeln!(out, "k\tconnected\ttotal")?;
                writeln!(out, "{}\t{}\t{}", report.k, report.connected, report.total)?;
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &report)?;
                writeln!(out)?;
            }
        }
        writeln!(log, "wall time: {:.3}s", start.elapsed().as_secs_f64())?;
        return Ok(Status::Ok);
    }

    let path = cfg
        .input
        .clone()
        .expect("clap requires --input without --census");
    let k = cfg.k.expect("clap requires --k without --census") as usize;
    let file = File::open(&path).map_err(|source| CliError::Open {
        path: path.clone(),
        source,
    })?;
    let start = Instant::now();
    let loaded = parse_edge_list(BufReader::new(file))?;
    if loaded.self_loops_dropped > 0 || loaded.duplicates_dropped > 0 {
        writeln!(
            log,
            "warning: dropped {} self-loops and {} duplicate edges",
            loaded.self_loops_dropped, loaded.duplicates_dropped
        )?;
    }
    let g = loaded.graph;
    let workers = cfg.workers();
    let engine = EngineConfig {
        workers,
        strategy: cfg.strategy.into(),
        ..EngineConfig::default()
    };
    let counted = count_motifs_with(&g, k, &engine)?;
    let hist = &counted.histogram;

    let rows = if cfg.replicas > 0 {
        let rcfg = RandomizerConfig {
            replicas: cfg.replicas,
            switches_per_edge: cfg.switches_per_edge,
            seed: cfg.seed,
        };
        let ens = significance(&g, k, &rcfg, workers)?;
        writeln!(
            log,
            "switches: {} accepted of {} attempted",
            ens.switches.accepted, ens.switches.attempted
        )?;
        ens.motifs
            .iter()
            .map(|(id, s)| Row {
                motif_id: id.to_string(),
                count: s.original,
                mean: Some(round6(s.mean)),
                std: Some(round6(s.std)),
                z: Some(s.z.map(round6)),
                p: Some(round6(s.p_value)),
            })
            .collect()
    } else {
        rows_plain(hist)
    };

    let mut status = Status::Ok;
    let oracle = if cfg.oracle {
        let reference = brute_force_histogram(&g, k)?;
        if &reference == hist {
            Some("MATCH".to_string())
        } else {
            status = Status::OracleMismatch;
            Some("MISMATCH".to_string())
        }
    } else {
        None
    };

    let report = Report {
        k,
        rows,
        footer: Footer {
            n: g.n(),
            m_directed: g.m(),
            m_pairs: g.m_pairs(),
            bases: counted.bases,
            total: hist.total(),
            threads: workers,
            replicas: cfg.replicas,
            oracle,
        },
    };
    match cfg.format {
        Format::Tsv => out.write_all(report.to_tsv().as_bytes())?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
        }
    }
    let c = counted.cache;
    writeln!(log, "wall time: {:.3}s", start.elapsed().as_secs_f64())?;
    writeln!(
        log,
        "cache: {} hits, {} misses, {} entries, {} resets",
        c.hits, c.misses, c.entries, c.resets
    )?;
    Ok(status)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("dimotif").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn census_tsv() {
        let cfg = parse(&["--census", "3"]);
        let mut out = Vec::new();
        let status = run(&cfg, &mut out, &mut io::sink()).unwrap();
        assert_eq!(status, Status::Ok);
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "k\tconnected\ttotal\n3\t13\t16\n"
        );
    }

    #[test]
    fn flag_validation() {
        let bad = |args: &[&str]| {
            RunConfig::try_parse_from(std::iter::once("dimotif").chain(args.iter().copied()))
                .is_err()
        };
        assert!(bad(&["--input", "x", "--k", "7"]));
        assert!(bad(&["--input", "x", "--k", "2"]));
        assert!(bad(&["--input", "x"]));
        assert!(bad(&["--k", "3"]));
        assert!(bad(&["--input", "x", "--k", "3", "--threads", "0"]));
        assert!(bad(&["--input", "x", "--k", "3", "--format", "xml"]));
        assert!(!bad(&["--census", "4"]));
    }

    #[test]
    fn json_keeps_null_z() {
        let row = Row {
            motif_id: "3:06".into(),
            count: 1,
            mean: Some(1.0),
            std: Some(0.0),
            z: Some(None),
            p: Some(1.0),
        };
        let text = serde_json::to_string(&row).unwrap();
        assert!(text.contains("\"z\":null"));
        assert_eq!(serde_json::from_str::<Row>(&text).unwrap(), row);
        let plain = Row {
            mean: None,
            std: None,
            z: None,
            p: None,
            ..row
        };
        let text = serde_json::to_string(&plain).unwrap();
        assert!(!text.contains("\"z\""));
        assert_eq!(serde_json::from_str::<Row>(&text).unwrap(), plain);
    }

    #[test]
    fn tsv_stats_columns() {
        let report = Report {
            k: 3,
            rows: vec![Row {
                motif_id: "3:06".into(),
                count: 6,
                mean: Some(3.0),
                std: Some(0.0),
                z: Some(None),
                p: Some(0.0),
            }],
            footer: Footer {
                n: 6,
                m_directed: 6,
                m_pairs: 6,
                bases: 6,
                total: 6,
                threads: 1,
                replicas: 2,
                oracle: None,
            },
        };
        let tsv = report.to_tsv();
        assert!(tsv.starts_with(
            "motif_id\tcount\tmean\tstd\tz\tp\n3:06\t6\t3.000000\t0.000000\tNA\t0.000000\n"
        ));
    }
}
