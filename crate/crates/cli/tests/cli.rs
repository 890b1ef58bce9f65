use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn plaseries(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plaseries"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn pair_verifies_and_tampering_is_caught() {
    let tmp = tempfile::tempdir().unwrap();
    let out = plaseries(&["pqpair", "--out", "pair"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let ok = plaseries(&["verify", "pair"], tmp.path());
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));

    let q = tmp.path().join("pair/q.txt");
    let text = fs::read_to_string(&q).unwrap();
    let tampered: String = text
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() == 4 && f[0] == "g" {
                let re: f64 = f[2].parse().unwrap();
                let im: f64 = f[3].parse().unwrap();
                format!("g,{},{:e},{:e}\n", f[1], 10.0 * re, 10.0 * im)
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    fs::write(&q, tampered).unwrap();
    let bad = plaseries(&["verify", "pair"], tmp.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("clause"), "{}", stderr(&bad));
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.toml"), "[decompose]\nround = 3\n").unwrap();
    let out = plaseries(&["decompose", "--config", "bad.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let missing = plaseries(&["verify", "nowhere"], tmp.path());
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn zero_target_decomposes_in_every_round() {
    let tmp = tempfile::tempdir().unwrap();
    let mut samples = String::from("j,re,im\n");
    for j in 0..1024 {
        samples.push_str(&format!("{j},0e0,0e0\n"));
    }
    fs::write(tmp.path().join("zero.csv"), samples).unwrap();
    fs::write(tmp.path().join("cfg.toml"), "grid = 1024\n[decompose]\ninput = \"zero.csv\"\nrounds = 4\n").unwrap();
    let out = plaseries(&["decompose", "--config", "cfg.toml", "--out", "dec"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for n in 1..=4 {
        assert!(tmp.path().join(format!("dec/round_{n}/p.txt")).exists());
    }
    let metrics = fs::read_to_string(tmp.path().join("dec/rounds.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 5);
    let ok = plaseries(&["verify", "dec"], tmp.path());
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
}

#[test]
fn density_demo_is_deterministic_and_verifies() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        let out = plaseries(&["density-demo", "--seed", "11", "--out", dir], tmp.path());
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    for file in ["input.csv", "errors.csv", "report.json", "certificate.txt"] {
        let a = fs::read(tmp.path().join("a").join(file)).unwrap();
        let b = fs::read(tmp.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
    let errors = fs::read_to_string(tmp.path().join("a/errors.csv")).unwrap();
    let tails: Vec<f64> = errors.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(tails.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(plaseries(&["verify", "a"], tmp.path()).status.code(), Some(0));
}
