//! Plane sweep over square NN-circles (L∞, and L1 after rotation).
//!
//! The line status holds the horizontal sides of the squares cut by the
//! sweep line. Between two events every pair of consecutive sides with
//! distinct y bounds a subregion whose RNN set is the squares open below
//! it. [`crest`] relabels only the pairs inside the y-ranges of squares
//! that entered or left at the event, and starts each range from a cached
//! set instead of scanning the status from the bottom. [`crest_a`] rescans
//! everything at every event.

use std::collections::BTreeSet;
use std::ops::Bound::{Excluded, Unbounded};

use crate::geometry::{snap_values, Metric, OrdF64, Rect};
use crate::nn::Arrangement;
use crate::rnnset::RnnSet;
use crate::sink::{LabelError, LabelId, LabelSink, SweepStats};

/// Squares of an arrangement with every coordinate snapped, so values
/// within epsilon compare equal. Squares that collapse are dropped.
#[derive(Debug, Clone, Default)]
pub struct Boxes {
    pub rects: Vec<Rect>,
    pub owner: Vec<u32>,
}

impl Boxes {
    pub fn new(arr: &Arrangement) -> Self {
        let cs = &arr.circles;
        let xs: Vec<f64> = cs.iter().flat_map(|c| [c.x_lo(), c.x_hi()]).collect();
        let ys: Vec<f64> = cs.iter().flat_map(|c| [c.y_lo(), c.y_hi()]).collect();
        let xs = snap_values(&xs, arr.eps);
        let ys = snap_values(&ys, arr.eps);
        let mut out = Boxes::default();
        for (i, c) in cs.iter().enumerate() {
            let r = Rect::new(xs[2 * i], xs[2 * i + 1], ys[2 * i], ys[2 * i + 1]);
            if !r.is_degenerate() {
                out.rects.push(r);
                out.owner.push(c.owner);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// Bounding box of all squares.
    pub fn bounds(&self) -> Option<Rect> {
        self.rects.iter().copied().reduce(|a, b| a.union(&b))
    }
}

/// Squares entering (left side) and leaving (right side) at one x.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub x: f64,
    pub inserts: Vec<u32>,
    pub removes: Vec<u32>,
}

/// Distinct x-coordinates of vertical sides in ascending order.
pub fn build_events(boxes: &Boxes) -> Vec<Event> {
    let mut sides: Vec<(f64, bool, u32)> = Vec::with_capacity(2 * boxes.len());
    for (i, r) in boxes.rects.iter().enumerate() {
        sides.push((r.x_lo, true, i as u32));
        sides.push((r.x_hi, false, i as u32));
    }
    sides.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    let mut events: Vec<Event> = Vec::new();
    for (x, insert, i) in sides {
        if events.last().is_none_or(|e| e.x != x) {
            events.push(Event {
                x,
                inserts: Vec::new(),
                removes: Vec::new(),
            });
        }
        let e = events.last_mut().expect("just pushed");
        if insert {
            e.inserts.push(i);
        } else {
            e.removes.push(i);
        }
    }
    events
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangedInterval {
    pub lo: f64,
    pub hi: f64,
}

/// Sorts intervals and merges any two that overlap or touch.
pub fn merge_changed_intervals(raw: &[ChangedInterval]) -> Vec<ChangedInterval> {
    let mut v = raw.to_vec();
    v.sort_unstable_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    let mut out: Vec<ChangedInterval> = Vec::with_capacity(v.len());
    for iv in v {
        match out.last_mut() {
            Some(last) if last.hi >= iv.lo => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    out
}

const UPPER: u8 = 0;
const LOWER: u8 = 1;

/// Status element. Upper sides sort before lower sides at equal y, so a
/// square ending where another starts leaves a zero-height pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    y: OrdF64,
    kind: u8,
    square: u32,
}

impl Key {
    fn lower(r: &Rect, i: u32) -> Self {
        Key {
            y: OrdF64(r.y_lo),
            kind: LOWER,
            square: i,
        }
    }

    fn upper(r: &Rect, i: u32) -> Self {
        Key {
            y: OrdF64(r.y_hi),
            kind: UPPER,
            square: i,
        }
    }

    /// Smallest key with this y.
    fn first_at(y: f64) -> Self {
        Key {
            y: OrdF64(y),
            kind: UPPER,
            square: 0,
        }
    }

    /// Largest key with this y.
    fn last_at(y: f64) -> Self {
        Key {
            y: OrdF64(y),
            kind: LOWER,
            square: u32::MAX,
        }
    }

    /// Cache slot: 2i for the lower side of square i, 2i + 1 for the upper.
    fn slot(self) -> usize {
        2 * self.square as usize + usize::from(self.kind == UPPER)
    }
}

fn require_squares(arr: &Arrangement) -> Result<(), LabelError> {
    match arr.frame_metric() {
        Metric::L2 => Err(LabelError::UnsupportedMetric(Metric::L2)),
        _ => Ok(()),
    }
}

fn successor(status: &BTreeSet<Key>, k: Key) -> Option<Key> {
    status.range((Excluded(k), Unbounded)).next().copied()
}

#[derive(Debug, Clone, Default)]
struct Record {
    /// RNN set just above the element.
    set: Vec<u32>,
    /// Label of the region just above the element, if it has one.
    label: Option<LabelId>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OpenPiece {
    x0: f64,
    y0: f64,
    y1: f64,
    label: LabelId,
}

/// Pieces still growing to the right, one per status element.
struct PieceTracker {
    open: Vec<Option<OpenPiece>>,
}

impl PieceTracker {
    fn close<S: LabelSink<Rect>>(&mut self, slot: usize, x: f64, sink: &mut S, stats: &mut SweepStats) {
        if let Some(p) = self.open[slot].take() {
            if p.x0 < x {
                sink.piece(Rect::new(p.x0, x, p.y0, p.y1), p.label);
                stats.pieces += 1;
            }
        }
    }

    /// Makes the piece above `e` match its current pair and label.
    fn reconcile<S: LabelSink<Rect>>(
        &mut self,
        e: Key,
        next: Option<Key>,
        label: Option<LabelId>,
        x: f64,
        sink: &mut S,
        stats: &mut SweepStats,
    ) {
        let want = match (next, label) {
            (Some(n), Some(l)) if e.y < n.y => Some((e.y.0, n.y.0, l)),
            _ => None,
        };
        let have = self.open[e.slot()].map(|p| (p.y0, p.y1, p.label));
        if have == want {
            return;
        }
        self.close(e.slot(), x, sink, stats);
        self.open[e.slot()] = want.map(|(y0, y1, label)| OpenPiece { x0: x, y0, y1, label });
    }
}

/// The status is empty left of the first event, so the whole strip there
/// is one piece of the exterior face. Both sweeps label it once with ∅;
/// every other face gets its labels from valid pairs.
fn label_exterior<S: LabelSink<Rect>>(bx: &Boxes, sink: &mut S, stats: &mut SweepStats) {
    let Some(b) = bx.bounds() else { return };
    let pad = b.width().max(b.height()).max(1.0) * 0.5;
    let geom = Rect::new(b.x_lo - pad, b.x_lo, b.y_lo - pad, b.y_hi + pad);
    stats.labels += 1;
    let id = sink.label(&geom, &[]);
    sink.piece(geom, id);
    stats.pieces += 1;
}

/// Labels the arrangement with changed intervals and cached base sets.
pub fn crest<S: LabelSink<Rect>>(arr: &Arrangement, sink: &mut S) -> Result<SweepStats, LabelError> {
    require_squares(arr)?;
    let bx = Boxes::new(arr);
    let events = build_events(&bx);
    let mut stats = SweepStats {
        events: events.len() as u64,
        ..SweepStats::default()
    };
    label_exterior(&bx, sink, &mut stats);
    let mut status: BTreeSet<Key> = BTreeSet::new();
    let mut records: Vec<Record> = vec![Record::default(); 2 * bx.len()];
    let mut pieces = PieceTracker {
        open: vec![None; 2 * bx.len()],
    };
    let mut set = RnnSet::with_universe(arr.clients);
    let mut raw = Vec::new();
    let mut inherit = Vec::new();

    for (ei, ev) in events.iter().enumerate() {
        if sink.cancelled() {
            return Err(LabelError::Cancelled);
        }
        let x = ev.x;
        let x_next = events.get(ei + 1).map_or(x, |e| e.x);

        raw.clear();
        for &i in ev.removes.iter().chain(&ev.inserts) {
            let r = &bx.rects[i as usize];
            raw.push(ChangedInterval { lo: r.y_lo, hi: r.y_hi });
        }
        let merged = merge_changed_intervals(&raw);

        // The pair right above an interval is not relabeled; it keeps the
        // label of whatever region lay there before the event.
        inherit.clear();
        for iv in &merged {
            let below = status.range(..=Key::last_at(iv.hi)).next_back().copied();
            inherit.push(match below {
                Some(k) if successor(&status, k).is_some() => records[k.slot()].label,
                _ => None,
            });
        }

        for &i in &ev.removes {
            let r = &bx.rects[i as usize];
            for k in [Key::lower(r, i), Key::upper(r, i)] {
                status.remove(&k);
                pieces.close(k.slot(), x, sink, &mut stats);
            }
            stats.removes += 1;
        }
        for &i in &ev.inserts {
            let r = &bx.rects[i as usize];
            status.insert(Key::lower(r, i));
            status.insert(Key::upper(r, i));
            stats.inserts += 1;
        }

        for (j, iv) in merged.iter().enumerate() {
            let prev = status.range(..Key::first_at(iv.lo)).next_back().copied();
            match prev {
                Some(p) => set.load(&records[p.slot()].set),
                None => set.clear(),
            }
            if let Some(ed) = status.range(..=Key::last_at(iv.hi)).next_back().copied() {
                let mut it = status.range(Key::first_at(iv.lo)..).peekable();
                while let Some(&e) = it.next() {
                    if e > ed {
                        break;
                    }
                    let next = it.peek().map(|k| **k);
                    let owner = bx.owner[e.square as usize];
                    if e.kind == LOWER {
                        set.insert(owner);
                    } else {
                        set.remove(owner);
                    }
                    let label = if e == ed {
                        inherit[j]
                    } else {
                        match next {
                            Some(n) if e.y < n.y => {
                                stats.labels += 1;
                                stats.lambda = stats.lambda.max(set.len() as u64);
                                let geom = Rect::new(x, x_next, e.y.0, n.y.0);
                                Some(sink.label(&geom, set.as_slice()))
                            }
                            _ => None,
                        }
                    };
                    let rec = &mut records[e.slot()];
                    rec.set.clear();
                    rec.set.extend_from_slice(set.as_slice());
                    rec.label = label;
                    pieces.reconcile(e, next, label, x, sink, &mut stats);
                    if e == ed {
                        break;
                    }
                }
            }
            if let Some(p) = prev {
                let next = successor(&status, p);
                pieces.reconcile(p, next, records[p.slot()].label, x, sink, &mut stats);
            }
        }
    }
    Ok(stats)
}

/// Labels every valid pair of every strip, scanning the whole status from
/// an empty set at each event.
pub fn crest_a<S: LabelSink<Rect>>(arr: &Arrangement, sink: &mut S) -> Result<SweepStats, LabelError> {
    require_squares(arr)?;
    let bx = Boxes::new(arr);
    let events = build_events(&bx);
    let mut stats = SweepStats {
        events: events.len() as u64,
        ..SweepStats::default()
    };
    label_exterior(&bx, sink, &mut stats);
    let mut status: BTreeSet<Key> = BTreeSet::new();
    let mut set = RnnSet::with_universe(arr.clients);
    for (ei, ev) in events.iter().enumerate() {
        if sink.cancelled() {
            return Err(LabelError::Cancelled);
        }
        let x = ev.x;
        let x_next = events.get(ei + 1).map_or(x, |e| e.x);
        for &i in &ev.removes {
            let r = &bx.rects[i as usize];
            status.remove(&Key::lower(r, i));
            status.remove(&Key::upper(r, i));
            stats.removes += 1;
        }
        for &i in &ev.inserts {
            let r = &bx.rects[i as usize];
            status.insert(Key::lower(r, i));
            status.insert(Key::upper(r, i));
            stats.inserts += 1;
        }
        set.clear();
        let mut it = status.iter().peekable();
        while let Some(&e) = it.next() {
            let owner = bx.owner[e.square as usize];
            if e.kind == LOWER {
                set.insert(owner);
            } else {
                set.remove(owner);
            }
            if let Some(&&n) = it.peek() {
                if e.y < n.y {
                    stats.labels += 1;
                    stats.lambda = stats.lambda.max(set.len() as u64);
                    let geom = Rect::new(x, x_next, e.y.0, n.y.0);
                    let id = sink.label(&geom, set.as_slice());
                    sink.piece(geom, id);
                    stats.pieces += 1;
                }
            }
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{NnCircle, Point};
    use crate::sink::Labeling;

    fn iv(lo: f64, hi: f64) -> ChangedInterval {
        ChangedInterval { lo, hi }
    }

    fn squares(spec: &[(f64, f64, f64)]) -> Arrangement {
        let cs = spec
            .iter()
            .enumerate()
            .map(|(i, &(x, y, r))| NnCircle::new(i as u32, Point::new(x, y), r))
            .collect();
        Arrangement::from_frame_circles(Metric::Linf, cs, spec.len())
    }

    #[test]
    fn merge_examples() {
        assert_eq!(merge_changed_intervals(&[iv(1.0, 3.0), iv(2.0, 5.0)]), vec![iv(1.0, 5.0)]);
        assert_eq!(
            merge_changed_intervals(&[iv(3.0, 4.0), iv(1.0, 2.0)]),
            vec![iv(1.0, 2.0), iv(3.0, 4.0)]
        );
        assert_eq!(merge_changed_intervals(&[iv(1.0, 2.0), iv(2.0, 4.0)]), vec![iv(1.0, 4.0)]);
        assert_eq!(merge_changed_intervals(&[]), vec![]);
    }

    #[test]
    fn events_examples() {
        let bx = Boxes::new(&squares(&[(3.0, 3.0, 2.0)]));
        let ev = build_events(&bx);
        assert_eq!(ev.len(), 2);
        assert_eq!((ev[0].x, ev[0].inserts.clone()), (1.0, vec![0]));
        assert_eq!((ev[1].x, ev[1].removes.clone()), (5.0, vec![0]));
        let bx = Boxes::new(&squares(&[(1.0, 0.0, 1.0), (2.0, 5.0, 2.0)]));
        let ev = build_events(&bx);
        assert_eq!(ev[0].inserts, vec![0, 1]);
        assert_eq!(ev.len(), 3);
    }

    #[test]
    fn near_equal_sides_collapse() {
        let bx = Boxes::new(&squares(&[(1.0, 0.0, 1.0), (1.0 + 1e-12, 5.0, 1.0)]));
        assert_eq!(build_events(&bx).len(), 2);
    }

    /// Two overlapping squares: the sets below, inside one, inside both.
    #[test]
    fn walk_produces_expected_sets() {
        let arr = squares(&[(0.0, 0.0, 2.0), (1.0, 1.0, 2.0)]);
        let mut out = Labeling::default();
        crest(&arr, &mut out).unwrap();
        let sets: Vec<Vec<u32>> = out.labels.iter().map(|l| l.rnn.clone()).collect();
        assert!(sets.contains(&vec![0, 1]));
        assert!(sets.contains(&vec![0]));
        assert!(sets.contains(&vec![1]));
    }

    #[test]
    fn touching_squares_leave_no_zero_height_labels() {
        let arr = squares(&[(0.0, 0.0, 1.0), (0.0, 2.0, 1.0)]);
        let mut out = Labeling::default();
        crest(&arr, &mut out).unwrap();
        assert!(out.labels.iter().all(|l| l.geom.height() > 0.0));
        // Exterior plus one label per square.
        assert_eq!(out.k(), 3);
    }

    #[test]
    fn l2_is_rejected() {
        let arr = Arrangement::from_frame_circles(Metric::L2, vec![], 0);
        let mut out = Labeling::default();
        assert_eq!(crest(&arr, &mut out), Err(LabelError::UnsupportedMetric(Metric::L2)));
        assert_eq!(crest_a(&arr, &mut out), Err(LabelError::UnsupportedMetric(Metric::L2)));
    }

    #[test]
    fn empty_arrangement() {
        let arr = squares(&[]);
        let mut out = Labeling::default();
        assert_eq!(crest(&arr, &mut out).unwrap(), SweepStats::default());
    }
}
