use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnnheat_core::dataset::{Client, Dataset, Facility, Mode};
use rnnheat_core::export::{build_document, influences, meta_of, region_shapes, Filter, RegionDoc};
use rnnheat_core::geometry::{Metric, NnCircle, Point};
use rnnheat_core::influence::{InfluenceContext, Measure};
use rnnheat_core::nn::{compute_nn_circles, Arrangement};
use rnnheat_core::oracle::{is_off_boundary, rnn_of_point};
use rnnheat_core::pipeline::{Algo, LabeledArrangement};
use rnnheat_service::{router, AppState, Cors, Session};
use serde_json::Value;
use tower::ServiceExt;

async fn get(state: &AppState, uri: &str) -> (StatusCode, Value) {
    let resp = router(state.clone(), Cors::Any)
        .oneshot(Request::get(uri).body(Body::empty()).unwrap())
        .await
        .unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn worst_case_session(n: usize) -> Session {
    let cs: Vec<NnCircle> = (1..=n)
        .map(|i| NnCircle::new(i as u32 - 1, Point::new(i as f64, i as f64), n as f64 / 2.0))
        .collect();
    let lab = LabeledArrangement::build(Arrangement::from_frame_circles(Metric::Linf, cs, n), Algo::Crest).unwrap();
    let ids = (0..n as u64).map(|i| 100 + i).collect();
    Session::from_labeling(lab, InfluenceContext::uniform(n), ids, None, None, Measure::Size).unwrap()
}

/// Clients with ids 10.., weights 1..3, and a ring of edges between
/// consecutive clients.
fn random_dataset(r: &mut ChaCha8Rng, n: usize, nf: usize) -> Dataset {
    let clients = (0..n)
        .map(|i| Client {
            id: 10 + i as u64,
            pos: Point::new(r.random(), r.random()),
            weight: r.random_range(1..=3) as f64,
        })
        .collect();
    let facilities = (0..nf)
        .map(|i| Facility {
            id: i as u64,
            pos: Point::new(r.random(), r.random()),
            capacity: None,
        })
        .collect();
    Dataset::new(clients, facilities, Mode::Bichromatic).unwrap()
}

fn edges_ctx(ds: &Dataset) -> InfluenceContext {
    let ids: Vec<u64> = ds.clients.iter().map(|c| c.id).collect();
    let edges: Vec<(u64, u64)> = ids.windows(2).map(|w| (w[0], w[1])).collect();
    InfluenceContext::new(ds).with_edges(ds, &edges).unwrap()
}

#[tokio::test]
async fn no_session_is_503() {
    let st = AppState::default();
    for uri in ["/meta", "/heatmap", "/region?x=0&y=0"] {
        assert_eq!(get(&st, uri).await.0, StatusCode::SERVICE_UNAVAILABLE, "{uri}");
    }
    st.replace(worst_case_session(2));
    assert_eq!(get(&st, "/meta").await.0, StatusCode::OK);
}

#[tokio::test]
async fn worst_case_meta_and_heatmap() {
    let st = AppState::new(Some(worst_case_session(3)));
    let (s, meta) = get(&st, "/meta").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(meta["lambda"], 3);
    assert_eq!(meta["n"], 3);
    assert_eq!(meta["metric"], "linf");
    assert_eq!(meta["measures_available"], serde_json::json!(["size", "weighted"]));

    let (_, top) = get(&st, "/heatmap?topk=1").await;
    let regions = top["regions"].as_array().unwrap();
    assert_eq!(regions.len(), 1);
    assert_eq!(regions[0]["rnn"], serde_json::json!([100, 101, 102]));
    assert_eq!(regions[0]["influence"], 3.0);

    let (_, all) = get(&st, "/heatmap?threshold=0").await;
    // n² − n + 2 regions, less the empty exterior.
    assert_eq!(all["regions"].as_array().unwrap().len(), 7);
    let (_, none) = get(&st, "/heatmap?threshold=3.5").await;
    assert!(none["regions"].as_array().unwrap().is_empty());
    let (_, both) = get(&st, "/heatmap?threshold=2&topk=10").await;
    assert_eq!(both["regions"].as_array().unwrap().len(), 3);
}

#[tokio::test]
async fn parameter_errors() {
    let st = AppState::new(Some(worst_case_session(3)));
    for uri in [
        "/heatmap?topk=x",
        "/heatmap?threshold=abc",
        "/heatmap?measure=nope",
        "/region?x=1",
        "/region?x=a&y=2",
        "/region?x=1&y=2&measure=heat",
    ] {
        let (s, body) = get(&st, uri).await;
        assert_eq!(s, StatusCode::BAD_REQUEST, "{uri}");
        assert!(body["error"].is_string());
    }
    assert_eq!(get(&st, "/heatmap?measure=edges").await.0, StatusCode::CONFLICT);
    assert_eq!(get(&st, "/heatmap?measure=capacity").await.0, StatusCode::CONFLICT);
    assert_eq!(get(&st, "/region?x=1&y=1&measure=edges").await.0, StatusCode::CONFLICT);
}

#[tokio::test]
async fn region_lookups() {
    let lone = {
        let lab = LabeledArrangement::build(
            Arrangement::new(Metric::L2, &[NnCircle::new(0, Point::new(1.0, 1.0), 1.0)], 1),
            Algo::Crest,
        )
        .unwrap();
        Session::from_labeling(lab, InfluenceContext::uniform(1), vec![7], None, None, Measure::Size).unwrap()
    };
    let st = AppState::new(Some(lone));
    let (_, v) = get(&st, "/region?x=1&y=1").await;
    assert_eq!(v, serde_json::json!({"rnn": [7], "influence": 1.0}));
    let (_, v) = get(&st, "/region?x=100&y=-50").await;
    assert_eq!(v, serde_json::json!({"rnn": [], "influence": 0.0}));
    // On the circle.
    let (s, v) = get(&st, "/region?x=2&y=1").await;
    assert_eq!(s, StatusCode::OK);
    assert!(v.is_null());
}

#[tokio::test]
async fn region_matches_oracle() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    for metric in [Metric::Linf, Metric::L1, Metric::L2] {
        for _ in 0..6 {
            let n = r.random_range(4..40);
            let nf = r.random_range(1..6);
            let ds = random_dataset(&mut r, n, nf);
            let circles = compute_nn_circles(&ds, metric).unwrap();
            let session = Session::from_dataset(&ds, metric, Algo::Crest, InfluenceContext::new(&ds), Measure::Weighted).unwrap();
            let st = AppState::new(Some(session));
            let mut checked = 0;
            while checked < 40 {
                let q = Point::new(r.random_range(-0.3..1.3), r.random_range(-0.3..1.3));
                if !is_off_boundary(q, &circles, metric, 1e-7) {
                    continue;
                }
                checked += 1;
                let want = rnn_of_point(q, &circles, metric).unwrap();
                let ids: Vec<u64> = want.iter().map(|&i| ds.clients[i as usize].id).collect();
                let weight: f64 = want.iter().map(|&i| ds.clients[i as usize].weight).sum();
                let (s, v) = get(&st, &format!("/region?x={}&y={}", q.x, q.y)).await;
                assert_eq!(s, StatusCode::OK);
                assert_eq!(v["rnn"], serde_json::json!(ids), "{metric} at {q:?}");
                assert_eq!(v["influence"].as_f64().unwrap(), weight);
            }
        }
    }
}

fn rnn_lists(doc: &Value) -> Vec<Value> {
    let mut v: Vec<Value> = doc["regions"].as_array().unwrap().iter().map(|r| r["rnn"].clone()).collect();
    v.sort_by_key(|x| x.to_string());
    v
}

#[tokio::test]
async fn measure_switching_keeps_regions() {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let ds = random_dataset(&mut r, 30, 4);
    let session = Session::from_dataset(&ds, Metric::Linf, Algo::Crest, edges_ctx(&ds), Measure::Size).unwrap();
    let st = AppState::new(Some(session));
    let (_, size) = get(&st, "/heatmap?measure=size").await;
    let (_, weighted) = get(&st, "/heatmap?measure=weighted").await;
    let (_, edges) = get(&st, "/heatmap?measure=edges").await;
    assert_eq!(rnn_lists(&size), rnn_lists(&weighted));
    assert_eq!(rnn_lists(&size), rnn_lists(&edges));
    assert_eq!(edges["meta"]["measure"], "edges");
    let total = size["regions"].as_array().unwrap().len();
    for k in [0, 1, 5, total + 3] {
        let (_, d) = get(&st, &format!("/heatmap?measure=weighted&topk={k}")).await;
        let inf: Vec<f64> = d["regions"].as_array().unwrap().iter().map(|x| x["influence"].as_f64().unwrap()).collect();
        assert_eq!(inf.len(), k.min(total));
        assert!(inf.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[tokio::test]
async fn bbox_is_data_bounds_padded_by_radius() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let ds = random_dataset(&mut r, 50, 5);
    let circles = compute_nn_circles(&ds, Metric::Linf).unwrap();
    let rmax = circles.iter().map(|c| c.radius).fold(0.0, f64::max);
    let pts: Vec<Point> = ds.clients.iter().map(|c| c.pos).chain(ds.facilities.iter().map(|f| f.pos)).collect();
    let lo_x = pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let hi_y = pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let session = Session::from_dataset(&ds, Metric::Linf, Algo::Crest, InfluenceContext::new(&ds), Measure::Size).unwrap();
    let st = AppState::new(Some(session));
    let (_, meta) = get(&st, "/meta").await;
    let b: Vec<f64> = meta["bbox"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((b[0] - (lo_x - rmax)).abs() < 1e-12);
    assert!((b[3] - (hi_y + rmax)).abs() < 1e-12);
    assert_eq!(meta["mode"], "bi");
}

#[tokio::test]
async fn cors_headers_are_sent() {
    let st = AppState::new(Some(worst_case_session(2)));
    let resp = router(st, Cors::Any)
        .oneshot(
            Request::get("/meta")
                .header("origin", "http://localhost:5173")
                .body(Body::empty())
                .unwrap(),
        )
        .await
        .unwrap();
    assert_eq!(resp.headers()["access-control-allow-origin"], "*");
    let resp = router(AppState::default(), Cors::Origin("http://ui.example".parse().unwrap()))
        .oneshot(
            Request::builder()
                .method("OPTIONS")
                .uri("/heatmap")
                .header("origin", "http://ui.example")
                .header("access-control-request-method", "GET")
                .body(Body::empty())
                .unwrap(),
        )
        .await
        .unwrap();
    assert_eq!(resp.headers()["access-control-allow-origin"], "http://ui.example");
}

#[tokio::test]
async fn document_sessions_answer_like_computed_ones() {
    let mut r = ChaCha8Rng::seed_from_u64(21);
    for metric in [Metric::Linf, Metric::L1] {
        for _ in 0..4 {
            let ds = random_dataset(&mut r, 25, 3);
            let circles = compute_nn_circles(&ds, metric).unwrap();
            let lab = LabeledArrangement::build(Arrangement::new(metric, &circles, ds.clients.len()), Algo::Crest).unwrap();
            let ctx = InfluenceContext::new(&ds);
            let shapes = region_shapes(&lab);
            let inf = influences(&shapes, &ctx, Measure::Weighted).unwrap();
            let ids: Vec<u64> = ds.clients.iter().map(|c| c.id).collect();
            let doc = build_document(meta_of(&lab, Measure::Weighted), &shapes, &inf, Filter::default(), &ids);
            let doc = RegionDoc::from_json(&doc.to_json()).unwrap();
            let st = AppState::new(Some(Session::from_document(doc.clone()).unwrap()));
            let (_, all) = get(&st, "/heatmap").await;
            assert_eq!(all["regions"].as_array().unwrap().len(), doc.regions.len());
            assert_eq!(get(&st, "/heatmap?measure=size").await.0, StatusCode::CONFLICT);
            let mut checked = 0;
            while checked < 60 {
                let q = Point::new(r.random_range(-0.2..1.2), r.random_range(-0.2..1.2));
                // Rounded shape coordinates move boundaries by ~1e-9.
                if !is_off_boundary(q, &circles, metric, 1e-6) {
                    continue;
                }
                checked += 1;
                let want = rnn_of_point(q, &circles, metric).unwrap();
                let want_ids: Vec<u64> = want.iter().map(|&i| ids[i as usize]).collect();
                let (_, v) = get(&st, &format!("/region?x={}&y={}", q.x, q.y)).await;
                assert_eq!(v["rnn"], serde_json::json!(want_ids), "{metric} {q:?}");
            }
        }
    }
}
