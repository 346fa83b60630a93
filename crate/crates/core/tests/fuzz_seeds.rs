//! Replays the checked-in fuzz corpus through the parsers, so every seed
//! runs on stable without libFuzzer.

use std::fs;
use std::path::PathBuf;

use rnnheat_core::dataset::{parse_capacities, parse_clients, parse_edges, parse_facilities};
use rnnheat_core::export::RegionDoc;
use rnnheat_core::render::decode_ppm;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text_seeds(target: &str) -> Vec<(String, String)> {
    seeds(target)
        .into_iter()
        .map(|(n, b)| (n, String::from_utf8(b).unwrap()))
        .collect()
}

#[test]
fn dataset_parsers() {
    let ok = |target: &str, f: &dyn Fn(&str) -> bool| {
        text_seeds(target).into_iter().map(|(n, t)| (n, f(&t))).collect::<Vec<_>>()
    };
    let clients = ok("parse_clients", &|t| parse_clients(t).is_ok());
    assert!(clients.contains(&("basic".into(), true)));
    assert!(clients.contains(&("duplicate".into(), false)));
    assert!(clients.contains(&("nonfinite".into(), false)));
    let fac = ok("parse_facilities", &|t| parse_facilities(t).is_ok());
    assert!(fac.contains(&("basic".into(), true)));
    assert!(fac.contains(&("short".into(), false)));
    let edges = ok("parse_edges", &|t| parse_edges(t).is_ok());
    assert!(edges.contains(&("triangle".into(), true)));
    assert!(edges.contains(&("too_many_fields".into(), false)));
    assert_eq!(parse_edges("1,1\n2,1\n1,2\n").unwrap(), vec![(1, 2)]);
    let caps = ok("parse_capacities", &|t| parse_capacities(t).is_ok());
    assert!(caps.contains(&("overflow".into(), false)));
}

#[test]
fn region_documents_are_canonical_fixed_points() {
    for (name, text) in text_seeds("region_json") {
        if let Ok(doc) = RegionDoc::from_json(&text) {
            let once = doc.to_json();
            assert_eq!(RegionDoc::from_json(&once).unwrap().to_json(), once, "{name}");
        } else {
            assert_eq!(name, "missing_fields");
        }
    }
}

#[test]
fn ppm_seeds() {
    for (name, bytes) in seeds("ppm_decode") {
        let r = decode_ppm(&mut &bytes[..]);
        match name.as_str() {
            "two_pixels" | "comment" => {
                let (w, h, px) = r.unwrap();
                assert_eq!(px.len(), w * h * 3);
            }
            _ => assert!(r.is_err(), "{name}"),
        }
    }
}
