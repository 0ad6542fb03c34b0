use std::path::PathBuf;
use std::process::{Command, Output};

use ridgenet::activation::{decode_poly, ActivationSpec};
use ridgenet::incidence::ClosedPathCertificate;
use ridgenet::presets;
use ridgenet::rational::{self, int};
use ridgenet::network::Network;

fn ridgenet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridgenet")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ridgenet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn not_dense_verdict_embeds_a_reloadable_certificate() {
    let out = ridgenet(&["paths", "--preset", "paper-5pt"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "not_dense");
    let cert: ClosedPathCertificate = serde_json::from_value(v["certificate"].clone()).unwrap();
    assert!(cert.validate(presets::paper_5pt().dirs()).unwrap());
    let w: Vec<String> = cert.measure.weights().map(rational::format).collect();
    assert_eq!(w, ["2", "-1", "-1", "-1", "1"]);
}

#[test]
fn dense_input_file_exits_zero() {
    let path = scratch("line.json");
    std::fs::write(
        &path,
        r#"{"dimension": 2, "points": [["0","1"],["1","3"],["2","5"]], "directions": [["1","0"],["0","1"]], "values": ["1","0","1/2"]}"#,
    )
    .unwrap();
    let out = ridgenet(&["paths", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"dense\""));

    let out = ridgenet(&["ridgefit", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["residual"], "0");
}

#[test]
fn malformed_json_exits_one_with_position() {
    let path = scratch("bad.json");
    std::fs::write(&path, "{\n  \"dimension\": 2,\n  \"points\": [[\"0\", ]]\n}").unwrap();
    let out = ridgenet(&["paths", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("column"), "{err}");
}

#[test]
fn kfit_on_closed_path_is_refused() {
    let out = ridgenet(&["kfit", "--preset", "grid-3x3", "--target", "xy", "--eps", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("not_dense"));
}

#[test]
fn netfit_rejects_polynomial_table_sigma() {
    let table = scratch("quad.csv");
    let mut csv = String::from("t,y\n");
    for j in -40..=40 {
        let t = j as f64 / 8.0;
        csv.push_str(&format!("{t},{}\n", 2.0 * t + 1.0));
    }
    std::fs::write(&table, csv).unwrap();
    let out = ridgenet(&[
        "netfit", "--preset", "parallel-segments", "--target", "xy", "--eps", "0.01", "--sigma", table.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sigma_eval_matches_segment_endpoints() {
    let out = ridgenet(&["sigma-eval", "--alpha", "1", "--l", "1", "--from", "0", "--to", "10", "--step", "0.01"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,sigma,region,exact\n"));
    assert!(!text.contains('\r'));
    let spec = ActivationSpec::new(int(1), int(1)).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 1001);
    for m in 1u32..=5 {
        let m_big = m.into();
        let p = decode_poly(&m_big);
        let (start, end) = (spec.segment_start(&m_big), spec.segment_start(&m_big) + &spec.alpha);
        for (t, want) in [(start, p.eval(&int(-1))), (end, p.eval(&int(1)))] {
            let row = rows.iter().find(|r| r[0] == rational::format(&t)).unwrap();
            assert_eq!(row[3], rational::format(&want), "m = {m}, t = {t}");
        }
    }
}

#[test]
fn kfit_output_reloads_and_replays() {
    let path = scratch("knet.json");
    let out = ridgenet(&[
        "kfit", "--preset", "parallel-segments", "--target", "xy", "--eps", "0.01", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let net = Network::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(net.len(), 2);
    for x in presets::parallel_segments().points() {
        let f = &x.coords()[0] * &x.coords()[1];
        let v = net.eval_exact(x).unwrap().unwrap();
        assert!(rational::to_f64(&(f - v)).abs() <= 1e-2);
    }
}

#[test]
fn probe_reports_decay_table() {
    let out = ridgenet(&["probe", "--preset", "paper-orbit", "--N", "1000", "--tests", "x,y"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("consistent-with-zero"));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 2001);
}
