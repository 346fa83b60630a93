//! CREST, CREST-A and the grid baseline on square arrangements, checked
//! against the brute-force point oracle.

mod common;

use common::*;
use rand::Rng;
use rnnheat_core::baseline::baseline;
use rnnheat_core::geometry::{Metric, Point, Rect};
use rnnheat_core::locate::Locator;
use rnnheat_core::nn::{compute_nn_circles, Arrangement};
use rnnheat_core::oracle::rnn_by_site_scan;
use rnnheat_core::regions::{count_regions, count_regions_grid, group_regions};
use rnnheat_core::sink::Labeling;
use rnnheat_core::sweep::{crest, crest_a, Boxes};

fn check_located(lab: &Labeling<Rect>, arr: &Arrangement, pts: &[(Point, Vec<u32>)]) -> usize {
    let loc = Locator::new(&lab.pieces);
    let mut bad = 0;
    for (q, expect) in pts {
        let f = arr.to_frame(*q);
        let hits = loc.all_at(f);
        assert!(hits.len() <= 1, "overlapping pieces at {q:?}");
        let got: &[u32] = hits.first().map_or(&[], |&i| lab.rnn(lab.pieces[i].label));
        if got != expect.as_slice() {
            bad += 1;
        }
    }
    bad
}

#[test]
fn crest_matches_oracle_on_random_instances() {
    let mut r = rng(1);
    for trial in 0..120 {
        let m = if trial % 2 == 0 { Metric::Linf } else { Metric::L1 };
        let n = r.random_range(4..=64);
        let nf = r.random_range(1..=16);
        let ds = random_dataset(&mut r, n, nf, trial % 3 == 0);
        let circles = compute_nn_circles(&ds, m).unwrap();
        let arr = Arrangement::new(m, &circles, n);
        let pts = samples(&mut r, &circles, m, 400);

        let mut lab = Labeling::default();
        let stats = crest(&arr, &mut lab).unwrap();
        assert_eq!(check_located(&lab, &arr, &pts), 0, "crest trial {trial}");
        assert_eq!(stats.labels as usize, lab.k());

        // Each label's rectangle is inside one face with that set.
        let bx = Boxes::new(&arr);
        for l in &lab.labels {
            let c = l.geom.centroid();
            let mut expect: Vec<u32> = bx
                .rects
                .iter()
                .zip(&bx.owner)
                .filter(|(b, _)| b.contains(c))
                .map(|(_, &o)| o)
                .collect();
            expect.sort_unstable();
            assert_eq!(expect, l.rnn);
        }

        let mut lab_a = Labeling::default();
        let stats_a = crest_a(&arr, &mut lab_a).unwrap();
        assert_eq!(check_located(&lab_a, &arr, &pts), 0, "crest-a trial {trial}");
        let mut lab_b = Labeling::default();
        let stats_b = baseline(&arr, &mut lab_b).unwrap();
        assert_eq!(check_located(&lab_b, &arr, &pts), 0, "baseline trial {trial}");

        let regions = count_regions(&arr);
        assert_eq!(regions, count_regions_grid(&bx), "trial {trial}");
        assert!(regions <= stats.labels && stats.labels <= 14 * regions, "trial {trial} r={regions} k={} ka={}", stats.labels, stats_a.labels);
        assert!(stats.labels <= stats_a.labels && stats_a.labels <= stats_b.labels);
        assert_eq!(stats.lambda, stats_a.lambda);

        // Sites are re-ranked from scratch by the second oracle.
        for (q, expect) in pts.iter().take(50) {
            assert_eq!(&rnn_by_site_scan(*q, &ds, m), expect);
        }
    }
}

#[test]
fn grouped_regions_of_baseline_match_region_count() {
    let mut r = rng(2);
    for _ in 0..30 {
        let n = r.random_range(2..=24);
        let ds = random_dataset(&mut r, n, 3, false);
        let circles = compute_nn_circles(&ds, Metric::Linf).unwrap();
        let arr = Arrangement::new(Metric::Linf, &circles, n);
        let mut lab = Labeling::default();
        baseline(&arr, &mut lab).unwrap();
        let groups = group_regions(&lab, 0.0);
        assert_eq!(groups.len() as u64, count_regions(&arr));
    }
}

#[test]
fn worst_case_family() {
    for n in 2..=12usize {
        let cs = (1..=n)
            .map(|i| {
                rnnheat_core::geometry::NnCircle::new(
                    (i - 1) as u32,
                    Point::new(i as f64, i as f64),
                    n as f64 / 2.0,
                )
            })
            .collect();
        let arr = Arrangement::from_frame_circles(Metric::Linf, cs, n);
        let mut lab = Labeling::default();
        let stats = crest(&arr, &mut lab).unwrap();
        let r = count_regions(&arr);
        assert_eq!(r, (n * n - n + 2) as u64);
        assert_eq!(stats.lambda, n as u64);
        assert!(r <= stats.labels && stats.labels <= 14 * r, "n={n} r={r} k={}", stats.labels);
        // Sum of set sizes over faces.
        let groups = group_regions(&lab, 0.0);
        let total: usize = groups.iter().map(|g| g.rnn.len()).sum();
        assert_eq!(total, (n * n * n + 2 * n) / 3, "n={n}");
    }
}

#[test]
fn lattice_instances() {
    let mut r = rng(3);
    for trial in 0..300 {
        let m = if trial % 2 == 0 { Metric::L1 } else { Metric::Linf };
        let n = r.random_range(2..=40);
        let nf = r.random_range(1..=8);
        let ds = lattice_dataset(&mut r, n, nf);
        let circles = compute_nn_circles(&ds, m).unwrap();
        let arr = Arrangement::new(m, &circles, n);
        let pts = samples(&mut r, &circles, m, 200);
        let mut lab = Labeling::default();
        crest(&arr, &mut lab).unwrap();
        assert_eq!(check_located(&lab, &arr, &pts), 0, "trial {trial}");
        let r_count = count_regions(&arr);
        assert!(r_count <= lab.k() as u64 && lab.k() as u64 <= 14 * r_count);
    }
}

#[test]
fn crest_pieces_group_like_grid_cells() {
    let mut r = rng(4);
    for trial in 0..60 {
        let m = if trial % 2 == 0 { Metric::L1 } else { Metric::Linf };
        let n = r.random_range(2..=30);
        let ds = if trial % 3 == 0 { lattice_dataset(&mut r, n, 4) } else { random_dataset(&mut r, n, 4, false) };
        let circles = compute_nn_circles(&ds, m).unwrap();
        let arr = Arrangement::new(m, &circles, n);
        let non_empty = |lab: &Labeling<Rect>| {
            let mut sets: Vec<Vec<u32>> = group_regions(lab, 0.0)
                .into_iter()
                .filter(|g| !g.rnn.is_empty())
                .inspect(|g| assert!(g.pieces.iter().all(|&p| lab.rnn(lab.pieces[p].label) == g.rnn.as_slice())))
                .map(|g| g.rnn)
                .collect();
            sets.sort();
            sets
        };
        let mut a = Labeling::default();
        crest(&arr, &mut a).unwrap();
        let mut b = Labeling::default();
        baseline(&arr, &mut b).unwrap();
        assert_eq!(non_empty(&a), non_empty(&b), "trial {trial}");
    }
}
