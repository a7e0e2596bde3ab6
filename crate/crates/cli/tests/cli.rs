use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use dimotif_cli::Report;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::NamedTempFile;

fn dimotif(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimotif"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn edge_file(edges: &[(u32, u32)]) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    for (u, v) in edges {
        writeln!(f, "{u} {v}").unwrap();
    }
    f.flush().unwrap();
    f
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

fn bidirected_k4() -> NamedTempFile {
    let edges: Vec<_> = (0..4u32)
        .flat_map(|u| (0..4).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    edge_file(&edges)
}

fn random_file(n: u32, p: f64, seed: u64) -> NamedTempFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edge_file(&edges)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bidirected_k4_triads() {
    let f = bidirected_k4();
    let o = dimotif(&["--input", path(&f), "--k", "3", "--threads", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2, "{text}");
    assert_eq!(rows[0], "motif_id\tcount");
    assert!(rows[1].ends_with("\t4"));
    assert!(text.contains("# total=4\n"));
    assert!(text.contains("# n=4\n"));
    assert!(text.contains("# m_directed=12\n"));
    assert!(text.contains("# m_pairs=6\n"));
}

#[test]
fn oracle_match_on_random_graph() {
    let f = random_file(20, 0.15, 7);
    let o = dimotif(&[
        "--input",
        path(&f),
        "--k",
        "5",
        "--oracle",
        "--threads",
        "2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("# oracle: MATCH\n"));
}

#[test]
fn reports_are_byte_identical() {
    let f = random_file(25, 0.1, 11);
    let args = |threads: &'static str| {
        vec![
            "--k",
            "4",
            "--random",
            "5",
            "--seed",
            "3",
            "--threads",
            threads,
        ]
    };
    let mut first = vec!["--input", path(&f)];
    first.extend(args("1"));
    let mut second = vec!["--input", path(&f)];
    second.extend(args("3"));
    let a = dimotif(&first);
    let b = dimotif(&first);
    let c = dimotif(&second);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // only the thread count differs
    let strip = |o: &Output| {
        stdout(o)
            .lines()
            .filter(|l| !l.starts_with("# threads="))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&c));
    assert!(stdout(&a).starts_with("motif_id\tcount\tmean\tstd\tz\tp\n"));
}

#[test]
fn tsv_rows_sorted_by_id() {
    let f = random_file(18, 0.2, 5);
    let o = dimotif(&["--input", path(&f), "--k", "4", "--threads", "1"]);
    let text = stdout(&o);
    let ids: Vec<&str> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').next().unwrap())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert!(!ids.is_empty());
    assert_eq!(ids, sorted);
}

#[test]
fn json_round_trip() {
    let f = random_file(15, 0.2, 9);
    let o = dimotif(&[
        "--input",
        path(&f),
        "--k",
        "3",
        "--format",
        "json",
        "--random",
        "4",
        "--threads",
        "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let report: Report = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(again, text);
    let reparsed: Report = serde_json::from_str(&again).unwrap();
    assert_eq!(reparsed, report);
    assert_eq!(report.footer.n, 15);
}

#[test]
fn output_file() {
    let f = bidirected_k4();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.tsv");
    let o = dimotif(&[
        "--input",
        path(&f),
        "--k",
        "4",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# total=1\n"));
}

#[test]
fn census_mode() {
    let o = dimotif(&["--census", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "k\tconnected\ttotal\n4\t199\t218\n");
    let o = dimotif(&["--census", "6"]);
    assert!(!o.status.success());
}

#[test]
fn errors_exit_nonzero() {
    let f = bidirected_k4();
    let missing = Path::new("/nonexistent/graph.txt");
    let cases: Vec<Vec<&str>> = vec![
        vec!["--input", missing.to_str().unwrap(), "--k", "3"],
        vec!["--input", path(&f), "--k", "5"],
        vec!["--input", path(&f), "--k", "9"],
        vec!["--input", path(&f), "--k", "3", "--strategy", "magic"],
        vec![
            "--input",
            path(&f),
            "--k",
            "3",
            "--random",
            "3",
            "--switches-per-edge",
            "-1",
        ],
        vec!["--k", "3"],
    ];
    for args in cases {
        let o = dimotif(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?} should fail");
        assert!(!o.stderr.is_empty());
    }

    let mut bad = NamedTempFile::new().unwrap();
    writeln!(bad, "0 1\n1 x").unwrap();
    let o = dimotif(&["--input", path(&bad), "--k", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
