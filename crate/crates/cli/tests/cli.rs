use std::path::Path;
use std::process::{Command, Output};

fn polarforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarforge"))
        .args(args)
        .env_remove("POLARFORGE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn line<'a>(text: &'a str, prefix: &str) -> Vec<&'a str> {
    text.lines()
        .find_map(|l| l.strip_prefix(prefix))
        .unwrap_or_else(|| panic!("no {prefix:?} line in {text}"))
        .split_whitespace()
        .collect()
}

#[test]
fn construct_three_levels() {
    let o = polarforge(&["construct", "--l", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let b: Vec<f64> = line(&text, "b: ").iter().map(|v| v.parse().unwrap()).collect();
    let printed = [0.996, 0.683, 0.808, 0.121, 0.878, 0.191, 0.316, 0.003];
    for (got, want) in b.iter().zip(printed) {
        assert!((got - want).abs() < 1e-3);
    }
    assert_eq!(line(&text, "k: "), ["8", "4", "6", "7", "2", "3", "5", "1"]);
}

#[test]
fn construct_zero_levels_is_config_error() {
    let o = polarforge(&["construct", "--l", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn construct_to_file_preserves_mean() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.txt");
    let o = polarforge(&["construct", "--l", "11", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let b: Vec<f64> = line(&text, "b: ").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(b.len(), 2048);
    let mean = b.iter().sum::<f64>() / 2048.0;
    assert!((mean - 0.5).abs() < 1e-12);
}

#[test]
fn puncture_patterns() {
    let o = polarforge(&["puncture", "--n", "8", "--nprime", "5", "--method", "pd"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().nth(1), Some("8 4 6"));

    let o = polarforge(&["puncture", "--n", "8", "--nprime", "8", "--method", "pd"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "8 8\n\n");

    let o = polarforge(&["puncture", "--n", "16", "--nprime", "12", "--method", "cw"]);
    let removed = stdout(&o).lines().nth(1).unwrap().to_owned();
    let mut got: Vec<usize> = removed.split_whitespace().map(|v| v.parse().unwrap()).collect();
    got.sort_unstable();
    // Column j of the 16x16 Kronecker power has weight 2^(4 - popcount(j - 1)).
    let weight = |j: usize| 1usize << (4 - (j - 1).count_ones());
    let mut oracle: Vec<usize> = (1..=16).collect();
    oracle.sort_by_key(|&j| (weight(j), std::cmp::Reverse(j)));
    let mut want = oracle[..4].to_vec();
    want.sort_unstable();
    assert_eq!(got, want);
}

#[test]
fn puncture_bad_inputs() {
    for args in [
        ["puncture", "--n", "8", "--nprime", "4", "--method", "pd"],
        ["puncture", "--n", "16", "--nprime", "5", "--method", "pd"],
        ["puncture", "--n", "8", "--nprime", "5", "--method", "zz"],
    ] {
        assert_eq!(polarforge(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn spectra_ranking_csv() {
    let o = polarforge(&["spectra", "--nprime", "480", "--methods", "pd,rqup"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut rows = text.lines();
    assert_eq!(
        rows.next(),
        Some("pattern_name,n,n_prime,sdp_n,sdc_n,sdp_nprime,sdc_nprime,coeffs")
    );
    let first: Vec<&str> = rows.next().unwrap().split(',').collect();
    let second: Vec<&str> = rows.next().unwrap().split(',').collect();
    assert_eq!(first[0], "pd");
    assert_eq!(second[0], "rqup");
    let sdc = |r: &[&str]| r[4].parse::<f64>().unwrap();
    assert!(sdc(&first) > sdc(&second));
    // Both conventions share the numerator.
    let n: f64 = first[1].parse().unwrap();
    let np: f64 = first[2].parse().unwrap();
    assert!((first[4].parse::<f64>().unwrap() * n - first[6].parse::<f64>().unwrap() * np).abs() < 1e-9);
}

fn simulate(dir: &Path, name: &str, extra: &[&str]) -> (Output, String) {
    let out = dir.join(name);
    let mut args = vec![
        "simulate",
        "--scenario",
        "mmtc-sc",
        "--ebn0",
        "1,3",
        "--max-frames",
        "200",
        "--min-frame-errors",
        "20",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = polarforge(&args);
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    (o, text)
}

#[test]
fn simulate_is_idempotent_with_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, ta) = simulate(dir.path(), "a.csv", &["--seed", "17"]);
    let (b, tb) = simulate(dir.path(), "b.csv", &["--seed", "17"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(ta, tb);
    let rows: Vec<&str> = ta.lines().collect();
    assert_eq!(
        rows[0],
        "scenario,pattern,decoder,list_size,crc,ebn0_db,frames,bit_errors,frame_errors,ber,fer,seed"
    );
    assert_eq!(rows.len(), 1 + 3 * 2);
    assert!(rows[1..].iter().all(|r| r.ends_with(",17")));
}

#[test]
fn simulate_records_generated_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (o, text) = simulate(dir.path(), "s.csv", &[]);
    assert!(o.status.success());
    let stderr = String::from_utf8(o.stderr).unwrap();
    let seed = stderr
        .lines()
        .find_map(|l| l.strip_prefix("seed: "))
        .and_then(|l| l.split_whitespace().next())
        .expect("seed line on stderr");
    assert!(text.lines().skip(1).all(|r| r.ends_with(&format!(",{seed}"))));
}

#[test]
fn simulate_config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# list decoders\nn_prime = 100\nk = 64\npatterns = pd\ndecoder = ca-scl\n\
         list_size = 2\ncrc = crc8\nebn0 = 2\nmax_frames = 50\nseed = 1\n",
    )
    .unwrap();
    let out = dir.path().join("o.csv");
    let o = polarforge(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--list-size",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[1..5], ["pd", "ca-scl", "4", "crc8"]);
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn simulate_config_errors_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    for extra in [
        &["--k", "200"][..],
        &["--decoder", "warp"][..],
        &["--crc", "crc32"][..],
        &["--max-frames", "0"][..],
        &["--prune-threshold", "3"][..],
    ] {
        let (o, text) = simulate(dir.path(), "bad.csv", extra);
        assert_eq!(o.status.code(), Some(2), "{extra:?}");
        assert!(text.is_empty());
        assert!(!dir.path().join("bad.csv").exists());
    }
    let o = polarforge(&["simulate", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn thread_cap_is_validated_and_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_polarforge"))
            .args(["simulate", "--scenario", "mmtc-sc", "--ebn0", "2", "--max-frames", "300"])
            .args(["--seed", "5", "--out", out.to_str().unwrap()])
            .env("POLARFORGE_THREADS", threads)
            .output()
            .unwrap();
        (o.status.code(), std::fs::read_to_string(out).unwrap_or_default())
    };
    let (c1, t1) = run("1", "t1.csv");
    let (c2, t2) = run("3", "t3.csv");
    assert_eq!((c1, c2), (Some(0), Some(0)));
    assert_eq!(t1, t2);
    assert_eq!(run("zero", "tz.csv").0, Some(2));
}
