//! The figure scripts read CLI output directly; these checks pin the
//! column layout each figure kind expects.

use std::fs;
use std::path::Path;
use std::process::Command;

const DIGITS: usize = 20;

fn run(args: &[&str], out: &Path) {
    let digits = DIGITS.to_string();
    let o = Command::new(env!("CARGO_BIN_EXE_skinbench"))
        .args(args)
        .args(["--digits", &digits, "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> Table {
        let text = fs::read_to_string(path).unwrap();
        let mut lines = text.lines();
        let split = |l: &str| l.split(',').map(str::to_string).collect::<Vec<_>>();
        let header = split(lines.next().expect("header"));
        let rows: Vec<_> = lines.map(split).collect();
        assert!(!rows.is_empty(), "{path:?} has no rows");
        for r in &rows {
            assert_eq!(r.len(), header.len(), "{path:?}: ragged row {r:?}");
        }
        Table { header, rows }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let k = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[k].parse().unwrap()).collect()
    }

    /// Every cell parses; non-integer cells keep the full output precision.
    fn check_values(&self, integer_columns: &[&str]) {
        for (k, name) in self.header.iter().enumerate() {
            let integer = integer_columns.contains(&name.as_str());
            for r in &self.rows {
                let cell = &r[k];
                if integer {
                    cell.parse::<i64>().unwrap_or_else(|_| panic!("{name}: {cell} is not an integer"));
                    continue;
                }
                let v: f64 = cell.parse().unwrap_or_else(|_| panic!("{name}: {cell} is not a number"));
                if v != 0.0 {
                    assert_eq!(significant_digits(cell), DIGITS + 2, "{name}: {cell}");
                }
            }
        }
    }
}

fn significant_digits(cell: &str) -> usize {
    let mantissa = cell.split(['e', 'E']).next().unwrap();
    mantissa.chars().filter(char::is_ascii_digit).collect::<String>().trim_start_matches('0').len()
}

fn evolve_table(dir: &Path) -> Table {
    let file = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.file_name().unwrap().to_str().unwrap().starts_with("evolve-"))
        .expect("evolve output");
    Table::read(&file)
}

fn density_header(sites: usize, two_chain: bool) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=sites).map(|j| format!("n_{j}")));
    h.push("I_total".into());
    if two_chain {
        h.extend(["I_A".into(), "I_B".into()]);
    }
    h.extend(["S".into(), "log_norm".into()]);
    h
}

#[test]
fn density_series_feed_heatmap_and_profile() {
    let tmp = tempfile::tempdir().unwrap();
    run(&["evolve", "--L", "6", "--tmax", "0.5", "--dt", "0.1"], &tmp.path().join("hn"));
    run(&["evolve", "--model", "shn", "--delta", "0.3", "--L", "4", "--tmax", "0.5", "--dt", "0.1"], &tmp.path().join("shn"));

    let hn = evolve_table(&tmp.path().join("hn"));
    assert_eq!(hn.header, density_header(6, false));
    hn.check_values(&[]);
    let t = hn.column("t");
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    // the last row is the steady profile
    let last = hn.rows.last().unwrap();
    let filling: f64 = last[1..=6].iter().map(|c| c.parse::<f64>().unwrap()).sum();
    assert!((filling - 3.0).abs() < 1e-12);

    let shn = evolve_table(&tmp.path().join("shn"));
    assert_eq!(shn.header, density_header(8, true));
    shn.check_values(&[]);
}

#[test]
fn resolvent_grid_feeds_contours() {
    let tmp = tempfile::tempdir().unwrap();
    run(&["pseudo", "--L", "5", "--nx", "4", "--ny", "3"], tmp.path());
    let t = Table::read(&tmp.path().join("pseudo.csv"));
    assert_eq!(t.header, ["re", "im", "log10_smin"]);
    t.check_values(&[]);
    let (re, im) = (t.column("re"), t.column("im"));
    assert_eq!(t.rows.len(), 12);
    // row-major: re runs fastest and repeats the same abscissae on every row
    for (k, row) in re.chunks(4).enumerate() {
        assert!(row.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(row, &re[..4]);
        assert!(im[4 * k..4 * k + 4].iter().all(|&y| y == im[4 * k]));
    }
    assert!(im[0] < im[4] && im[4] < im[8]);
}

#[test]
fn wavefunctions_feed_log_profiles() {
    let tmp = tempfile::tempdir().unwrap();
    run(&["wavefunctions", "--L", "5"], tmp.path());
    let t = Table::read(&tmp.path().join("wavefunctions.csv"));
    assert_eq!(t.header, ["mode", "energy_re", "energy_im", "site", "re", "im", "abs"]);
    t.check_values(&["mode", "site"]);
    assert_eq!(t.rows.len(), 25);
    assert!(t.column("abs").iter().all(|&a| a >= 0.0));
}

#[test]
fn norm_series_feed_growth_plot() {
    let tmp = tempfile::tempdir().unwrap();
    run(&["norms", "--L", "6", "--tmax", "0.5", "--dt", "0.1"], tmp.path());
    let t = Table::read(&tmp.path().join("norms.csv"));
    assert_eq!(t.header, ["t", "log_norm", "log10_norm"]);
    t.check_values(&[]);
    for (a, b) in t.column("log_norm").iter().zip(t.column("log10_norm")) {
        assert!((a / std::f64::consts::LN_10 - b).abs() < 1e-12);
    }
}

#[test]
fn spectrum_feeds_scatter() {
    let tmp = tempfile::tempdir().unwrap();
    run(&["spectrum", "--L", "6"], tmp.path());
    let t = Table::read(&tmp.path().join("spectrum.csv"));
    assert_eq!(t.header, ["index", "re", "im", "residual"]);
    t.check_values(&["index"]);
    assert_eq!(t.rows.len(), 6);
    let re = t.column("re");
    assert!(re.windows(2).all(|w| w[1] >= w[0]));
}
