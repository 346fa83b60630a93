use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use rnnheat_core::geometry::{Metric, Point};
use rnnheat_core::dataset::{parse_clients, parse_facilities, Dataset, Mode};
use rnnheat_core::nn::compute_nn_circles;
use rnnheat_core::oracle::rnn_of_point;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_rnnheat");

fn run(args: &[&str]) -> (i32, String, String) {
    let o = Command::new(BIN).args(args).output().unwrap();
    (
        o.status.code().unwrap(),
        String::from_utf8(o.stdout).unwrap(),
        String::from_utf8(o.stderr).unwrap(),
    )
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write("clients.csv", "# id,x,y,weight\n1,0.0,0.0,2\n2,1.0,0.2\n3,0.3,1.1,0.5\n4,2.0,2.0\n");
        f.write("facilities.csv", "10,0.5,0.5,1\n11,2.5,1.5,2\n");
        f.write("edges.csv", "1,2\n2,3\n3,4\n");
        f
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_str().unwrap().to_string()
    }

    fn dataset(&self) -> Dataset {
        let c = parse_clients(&std::fs::read_to_string(self.path("clients.csv")).unwrap()).unwrap();
        let f = parse_facilities(&std::fs::read_to_string(self.path("facilities.csv")).unwrap()).unwrap();
        Dataset::new(c, f, Mode::Bichromatic).unwrap()
    }

    fn heatmap(&self, extra: &[&str]) -> (i32, String, String) {
        let (c, f) = (self.path("clients.csv"), self.path("facilities.csv"));
        let mut args = vec!["heatmap", "--clients", &c, "--facilities", &f];
        args.extend_from_slice(extra);
        run(&args)
    }
}

/// A point inside the first shape of a region entry.
fn inside(region: &Value) -> Point {
    if let Some(r) = region.get("rects") {
        let q: Vec<f64> = r[0].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        return Point::new((q[0] + q[1]) / 2.0, (q[2] + q[3]) / 2.0);
    }
    let pts: Vec<Point> = region["polylines"][0]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| Point::new(p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect();
    let n = pts.len() as f64;
    Point::new(pts.iter().map(|p| p.x).sum::<f64>() / n, pts.iter().map(|p| p.y).sum::<f64>() / n)
}

#[test]
fn heatmap_regions_match_oracle() {
    let fx = Fixture::new();
    let ds = fx.dataset();
    for metric in ["linf", "l1"] {
        let (code, out, err) = fx.heatmap(&["--metric", metric]);
        assert_eq!(code, 0, "{err}");
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["meta"]["metric"], metric);
        assert_eq!(doc["meta"]["n"], 4);
        let m: Metric = metric.parse().unwrap();
        let circles = compute_nn_circles(&ds, m).unwrap();
        let regions = doc["regions"].as_array().unwrap();
        assert!(!regions.is_empty());
        for r in regions {
            let want: Vec<u64> = rnn_of_point(inside(r), &circles, m)
                .unwrap()
                .iter()
                .map(|&i| ds.clients[i as usize].id)
                .collect();
            assert_eq!(r["rnn"], serde_json::json!(want), "{metric}");
            assert_eq!(r["influence"].as_f64().unwrap(), want.len() as f64);
        }
    }
}

#[test]
fn filters() {
    let fx = Fixture::new();
    let (code, out, _) = fx.heatmap(&["--top-k", "0"]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["regions"], serde_json::json!([]));
    let (_, out, _) = fx.heatmap(&["--threshold", "1000"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["regions"], serde_json::json!([]));
    let (_, out, _) = fx.heatmap(&["--measure", "weighted", "--top-k", "2"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let inf: Vec<f64> = doc["regions"].as_array().unwrap().iter().map(|r| r["influence"].as_f64().unwrap()).collect();
    assert_eq!(inf.len(), 2);
    assert!(inf[0] >= inf[1]);
}

#[test]
fn measures_from_side_files() {
    let fx = Fixture::new();
    let edges = fx.path("edges.csv");
    let (code, out, err) = fx.heatmap(&["--measure", "edges", "--edges", &edges]);
    assert_eq!(code, 0, "{err}");
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["meta"]["measure"], "edges");
    let (code, _, err) = fx.heatmap(&["--measure", "edges"]);
    assert_eq!(code, 2);
    assert!(err.contains("--edges"));
    // Both facilities carry capacities in the fixture.
    let (code, out, err) = fx.heatmap(&["--measure", "capacity", "--candidate-capacity", "1"]);
    assert_eq!(code, 0, "{err}");
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert!(doc["regions"].as_array().unwrap().iter().all(|r| r["influence"].as_f64().unwrap() >= 1.0));
}

#[test]
fn images_are_written() {
    let fx = Fixture::new();
    let (ppm, png, json) = (fx.path("h.ppm"), fx.path("h.png"), fx.path("h.json"));
    let (code, out, err) = fx.heatmap(&["--out", &ppm, "--width", "20", "--height", "10", "--json", &json]);
    assert_eq!(code, 0, "{err}");
    assert!(out.is_empty());
    let bytes = std::fs::read(&ppm).unwrap();
    assert!(bytes.starts_with(b"P6\n20 10\n255\n"));
    assert_eq!(bytes.len(), b"P6\n20 10\n255\n".len() + 20 * 10 * 3);
    assert!(serde_json::from_str::<Value>(&std::fs::read_to_string(&json).unwrap()).is_ok());
    let (code, _, _) = fx.heatmap(&["--out", &png, "--scale", "log", "--metric", "l2"]);
    assert_eq!(code, 0);
    assert!(std::fs::read(&png).unwrap().starts_with(b"\x89PNG"));
}

#[test]
fn verify_worst_case_and_random() {
    let (code, out, _) = run(&["verify", "--synthetic", "worst-case", "--n", "5"]);
    assert_eq!(code, 0);
    assert!(out.contains("mismatches: 0\n"));
    assert!(out.contains("r: 22\n"));
    assert!(out.contains("lambda: 5\n"));
    for metric in ["linf", "l1", "l2"] {
        let (code, out, _) = run(&["verify", "--synthetic", "zipf", "--n", "60", "--metric", metric, "--seed", "4"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("samples: 1000\n"));
    }
    let (code, out, _) = run(&["verify", "--synthetic", "uniform", "--mode", "mono", "--n", "40", "--metric", "l2"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn input_errors() {
    let fx = Fixture::new();
    let empty = fx.write("empty.csv", "# nothing\n");
    let f = fx.path("facilities.csv");
    let (code, _, err) = run(&["verify", "--clients", empty.to_str().unwrap(), "--facilities", &f]);
    assert_eq!(code, 2);
    assert!(err.contains("no clients"), "{err}");
    let bad = fx.write("bad.csv", "1,0,0\n2,zero,1\n");
    let (code, _, err) = run(&["heatmap", "--clients", bad.to_str().unwrap(), "--facilities", &f]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
    let (code, _, err) = run(&["heatmap", "--clients", "/nonexistent/c.csv", "--facilities", &f]);
    assert_eq!(code, 2);
    assert!(err.contains("/nonexistent/c.csv"));
}

#[test]
fn usage_errors_exit_2() {
    let fx = Fixture::new();
    for args in [
        vec!["heatmap", "--synthetic", "uniform", "--metric", "l2", "--algo", "baseline"],
        vec!["verify", "--frobnicate"],
        vec!["heatmap", "--synthetic", "uniform", "--metric", "l3"],
        vec!["bench", "--sizes", "0"],
        vec!["heatmap"],
        vec!["heatmap", "--synthetic", "uniform", "--width", "0", "--out", "x.ppm"],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
    let c = fx.path("clients.csv");
    let (code, _, _) = run(&["heatmap", "--clients", &c]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["heatmap", "--clients", &c, "--mode", "mono"]);
    assert_eq!(code, 0);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("heatmap"));
}

#[test]
fn bench_emits_one_row_per_run() {
    let (code, out, _) = run(&["bench", "--sizes", "128", "--ratios", "4", "--algos", "crest"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "algo,metric,n,ratio,rep,wall_ms,labels,regions,lambda");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("crest,linf,128,4,0,"));
    let (_, out, _) = run(&["bench", "--sizes", "64", "--ratios", "4", "--algos", "crest,crest-a", "--reps", "3", "--metric", "l2"]);
    assert_eq!(out.lines().count(), 1 + 6 + 2);
    let (code, out, _) = run(&["bench", "--sizes", "64", "--ratios", "4", "--algos", "crest_l2", "--metric", "l2"]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().starts_with("crest,l2,64,4,0,"));
    let (code, _, err) = run(&["bench", "--sizes", "64", "--algos", "crest_l2"]);
    assert_eq!(code, 2);
    assert!(err.contains("--metric l2"));
}

fn http_get(addr: &str, path: &str) -> String {
    let mut s = TcpStream::connect(addr).unwrap();
    write!(s, "GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut buf = String::new();
    s.read_to_string(&mut buf).unwrap();
    buf
}

fn serve(args: &[&str]) -> (std::process::Child, String) {
    let mut child = Command::new(BIN)
        .arg("serve")
        .args(["--port", "0"])
        .args(args)
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.as_mut().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on http://").unwrap().to_string();
    (child, addr)
}

#[test]
fn serve_binds_ephemeral_port() {
    let (mut child, addr) = serve(&["--synthetic", "worst-case", "--n", "3"]);
    let resp = http_get(&addr, "/meta");
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(resp.contains("\"lambda\":3"));
    let resp = http_get(&addr, "/heatmap?topk=1");
    assert!(resp.contains("\"rnn\":[0,1,2]"));
    child.kill().unwrap();
    child.wait().unwrap();

    let (mut child, addr) = serve(&[]);
    assert!(http_get(&addr, "/meta").starts_with("HTTP/1.1 503"));
    child.kill().unwrap();
    child.wait().unwrap();
}

#[test]
fn serve_from_region_document() {
    let fx = Fixture::new();
    let json = fx.path("doc.json");
    let (code, _, _) = fx.heatmap(&["--json", &json, "--measure", "weighted"]);
    assert_eq!(code, 0);
    let (mut child, addr) = serve(&["--session-from-json", &json]);
    let resp = http_get(&addr, "/heatmap?measure=weighted");
    assert!(resp.starts_with("HTTP/1.1 200"));
    let body = resp.split("\r\n\r\n").nth(1).unwrap();
    let doc: Value = serde_json::from_str(body.trim()).unwrap();
    assert_eq!(doc, serde_json::from_str::<Value>(&std::fs::read_to_string(&json).unwrap()).unwrap());
    assert!(http_get(&addr, "/heatmap?measure=size").starts_with("HTTP/1.1 409"));
    child.kill().unwrap();
    child.wait().unwrap();
}

#[test]
fn library_entry_point_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = rnnheat_cli::run(["rnnheat", "heatmap", "--synthetic", "worst-case", "--n", "4"], &mut out, &mut err);
    assert_eq!(code, 0);
    let (_, bin_out, _) = run(&["heatmap", "--synthetic", "worst-case", "--n", "4"]);
    assert_eq!(String::from_utf8(out).unwrap(), bin_out);
    // Disjoint circles have n + 1 regions, n of them non-empty.
    let doc: Value = serde_json::from_str(&run(&["heatmap", "--synthetic", "disjoint", "--n", "6"]).1).unwrap();
    assert_eq!(doc["regions"].as_array().unwrap().len(), 6);
}
