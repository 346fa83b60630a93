//! Sweep over arrangements of Euclidean circles.
//!
//! The sweep line meets each circle in a lower and an upper arc. Events sit
//! at x-extremes, centers and every pairwise intersection, so inside a strip
//! between two events each arc is y-monotone and no two arcs cross. Within a
//! strip arcs are ordered by their smallest y, then largest y, then the y at
//! the strip midpoint.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::geometry::{Metric, NnCircle, Point, Rect};
use crate::locate::PieceGeom;
use crate::nn::Arrangement;
use crate::regions::{Seg, StripLinker, EXTERIOR};
use crate::rnnset::{RnnSet, SetHash};
use crate::sink::{LabelError, LabelId, LabelSink, SweepStats};

/// Intersection points of two circle boundaries. Tangent circles (center
/// distance within `eps` of `r1 + r2` or `|r1 − r2|`) give one point;
/// coincident circles give none.
pub fn circle_pair_intersections(a: &NnCircle, b: &NnCircle, eps: f64) -> Vec<Point> {
    let (dx, dy) = (b.center.x - a.center.x, b.center.y - a.center.y);
    let d = dx.hypot(dy);
    let (r1, r2) = (a.radius, b.radius);
    if d <= eps || d > r1 + r2 + eps || d < (r1 - r2).abs() - eps {
        return Vec::new();
    }
    let along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let (ux, uy) = (dx / d, dy / d);
    let foot = Point::new(a.center.x + along * ux, a.center.y + along * uy);
    if (d - (r1 + r2)).abs() <= eps || (d - (r1 - r2).abs()).abs() <= eps {
        return vec![foot];
    }
    let h = (r1 * r1 - along * along).max(0.0).sqrt();
    vec![
        Point::new(foot.x - h * uy, foot.y + h * ux),
        Point::new(foot.x + h * uy, foot.y - h * ux),
    ]
}

/// One half of a circle, as a function of x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcRef {
    pub center: Point,
    pub radius: f64,
    pub owner: u32,
    pub upper: bool,
}

impl ArcRef {
    fn of(c: &NnCircle, upper: bool) -> Self {
        ArcRef {
            center: c.center,
            radius: c.radius,
            owner: c.owner,
            upper,
        }
    }

    /// y on the arc; x outside the circle's span is clamped to its ends.
    pub fn y(&self, x: f64) -> f64 {
        let dx = x - self.center.x;
        let h = (self.radius * self.radius - dx * dx).max(0.0).sqrt();
        if self.upper {
            self.center.y + h
        } else {
            self.center.y - h
        }
    }

    /// Smallest and largest y over `[x0, x1]`.
    fn y_span(&self, x0: f64, x1: f64) -> (f64, f64) {
        let (a, b) = (self.y(x0), self.y(x1));
        let (mut lo, mut hi) = (a.min(b), a.max(b));
        if x0 < self.center.x && self.center.x < x1 {
            let c = self.y(self.center.x);
            lo = lo.min(c);
            hi = hi.max(c);
        }
        (lo, hi)
    }
}

/// Lower or upper boundary of a cell: an arc, or a horizontal line for the
/// exterior strip in front of the first event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    Arc(ArcRef),
    Line(f64),
}

impl Bound {
    pub fn y(&self, x: f64) -> f64 {
        match self {
            Bound::Arc(a) => a.y(x),
            Bound::Line(y) => *y,
        }
    }

    fn y_span(&self, x0: f64, x1: f64) -> (f64, f64) {
        match self {
            Bound::Arc(a) => a.y_span(x0, x1),
            Bound::Line(y) => (*y, *y),
        }
    }

    fn center_x(&self) -> Option<f64> {
        match self {
            Bound::Arc(a) => Some(a.center.x),
            Bound::Line(_) => None,
        }
    }
}

/// The part of `[x0, x1] × R` between two boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcCell {
    pub x0: f64,
    pub x1: f64,
    pub lower: Bound,
    pub upper: Bound,
}

impl ArcCell {
    /// Point halfway between the boundaries at the middle of the x-range.
    pub fn representative(&self) -> Point {
        let x = 0.5 * (self.x0 + self.x1);
        Point::new(x, 0.5 * (self.lower.y(x) + self.upper.y(x)))
    }

    /// Closed outline: the lower boundary left to right, then the upper one
    /// back. Each boundary gets `samples` segments plus a vertex at any arc
    /// center inside the range.
    pub fn outline(&self, samples: usize) -> Vec<Point> {
        let samples = samples.max(1);
        let mut xs: Vec<f64> = (0..=samples)
            .map(|i| self.x0 + (self.x1 - self.x0) * i as f64 / samples as f64)
            .collect();
        for cx in [self.lower.center_x(), self.upper.center_x()].into_iter().flatten() {
            if self.x0 < cx && cx < self.x1 {
                xs.push(cx);
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut out: Vec<Point> = xs.iter().map(|&x| Point::new(x, self.lower.y(x))).collect();
        out.extend(xs.iter().rev().map(|&x| Point::new(x, self.upper.y(x))));
        out
    }
}

impl PieceGeom for ArcCell {
    fn bbox(&self) -> Rect {
        Rect::new(
            self.x0,
            self.x1,
            self.lower.y_span(self.x0, self.x1).0,
            self.upper.y_span(self.x0, self.x1).1,
        )
    }

    fn holds(&self, p: Point) -> bool {
        self.x0 <= p.x && p.x < self.x1 && self.lower.y(p.x) <= p.y && p.y < self.upper.y(p.x)
    }

    fn x_range(&self) -> (f64, f64) {
        (self.x0, self.x1)
    }

    fn y_range_at(&self, x: f64) -> (f64, f64) {
        (self.lower.y(x), self.upper.y(x))
    }
}

/// A status element: one arc with its extent over the current strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcElement {
    pub owner: u32,
    pub upper: bool,
    pub y_s: f64,
    pub y_l: f64,
    pub y_m: f64,
}

/// Equality tolerances for [`arc_order`]. Strip-end values of an arc near
/// its x-extreme amplify rounding in x by a square root, so the end
/// comparisons get the looser bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderTol {
    pub ends: f64,
    pub mid: f64,
}

/// Orders two arcs of one strip by y_s, then y_l, then y_m; values within
/// tolerance fall through to the next level and finally to owner and half.
pub fn arc_order(a: &ArcElement, b: &ArcElement, tol: OrderTol) -> Ordering {
    let level = |p: f64, q: f64, t: f64| {
        if (p - q).abs() <= t {
            Ordering::Equal
        } else {
            p.total_cmp(&q)
        }
    };
    level(a.y_s, b.y_s, tol.ends)
        .then_with(|| level(a.y_l, b.y_l, tol.ends))
        .then_with(|| level(a.y_m, b.y_m, tol.mid))
        .then(a.owner.cmp(&b.owner))
        .then(a.upper.cmp(&b.upper))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum L2EventKind {
    Remove,
    Insert,
    Center,
    Intersection,
}

/// Circles (by index) entering and leaving at one collapsed event x.
#[derive(Debug, Clone, PartialEq)]
pub struct L2Event {
    pub x: f64,
    pub inserts: Vec<u32>,
    pub removes: Vec<u32>,
    pub kinds: Vec<L2EventKind>,
}

fn scale_of(circles: &[NnCircle]) -> f64 {
    circles
        .iter()
        .map(|c| c.bounds())
        .reduce(|a, b| a.union(&b))
        .map_or(1.0, |b| {
            b.x_lo.abs().max(b.x_hi.abs()).max(b.y_lo.abs()).max(b.y_hi.abs()).max(1.0)
        })
}

/// Sorted, ε-collapsed events. A circle whose two extremes fall in one
/// collapsed event is never inserted.
pub fn build_l2_events(circles: &[NnCircle], eps: f64) -> Vec<L2Event> {
    let mut raw: Vec<(f64, L2EventKind, u32)> = Vec::new();
    for (i, c) in circles.iter().enumerate() {
        raw.push((c.x_lo(), L2EventKind::Insert, i as u32));
        raw.push((c.x_hi(), L2EventKind::Remove, i as u32));
        raw.push((c.center.x, L2EventKind::Center, i as u32));
    }
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let (a, b) = (&circles[i], &circles[j]);
            if a.x_hi() < b.x_lo() || b.x_hi() < a.x_lo() || a.y_hi() < b.y_lo() || b.y_hi() < a.y_lo() {
                continue;
            }
            for p in circle_pair_intersections(a, b, eps) {
                raw.push((p.x, L2EventKind::Intersection, u32::MAX));
            }
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut events: Vec<L2Event> = Vec::new();
    let mut last = f64::NAN;
    for (x, kind, i) in raw {
        if events.is_empty() || x - last > eps {
            events.push(L2Event {
                x,
                inserts: Vec::new(),
                removes: Vec::new(),
                kinds: Vec::new(),
            });
        }
        last = x;
        let e = events.last_mut().expect("just pushed");
        if !e.kinds.contains(&kind) {
            e.kinds.push(kind);
        }
        match kind {
            L2EventKind::Insert => e.inserts.push(i),
            L2EventKind::Remove => {
                if let Some(k) = e.inserts.iter().position(|&j| j == i) {
                    e.inserts.swap_remove(k);
                } else {
                    e.removes.push(i);
                }
            }
            _ => {}
        }
    }
    for e in &mut events {
        e.kinds.sort();
    }
    events
}

fn slot(circle: u32, upper: bool) -> u32 {
    2 * circle + u32::from(upper)
}

/// Status maintenance shared by the L2 sweeps.
struct Sweeper<'a> {
    circles: &'a [NnCircle],
    events: Vec<L2Event>,
    elems: Vec<ArcElement>,
    status: Vec<u32>,
    old: Vec<u32>,
    /// Position in `old` of each slot, valid for slots in `old`.
    old_pos: Vec<u32>,
    /// Per position of `status`: the pair starting there may have changed.
    dirty: Vec<bool>,
    tol: OrderTol,
}

impl<'a> Sweeper<'a> {
    fn new(arr: &'a Arrangement) -> Self {
        let circles = &arr.circles;
        let scale = scale_of(circles);
        let eps = arr.eps * scale;
        let elems = circles
            .iter()
            .flat_map(|c| {
                [false, true].map(|upper| ArcElement {
                    owner: c.owner,
                    upper,
                    y_s: c.center.y,
                    y_l: c.center.y,
                    y_m: c.center.y,
                })
            })
            .collect();
        Sweeper {
            circles,
            events: build_l2_events(circles, eps),
            elems,
            status: Vec::new(),
            old: Vec::new(),
            old_pos: vec![0; 2 * circles.len()],
            dirty: Vec::new(),
            tol: OrderTol {
                ends: arr.eps.sqrt() * scale,
                mid: arr.eps * 1e-3 * scale,
            },
        }
    }

    fn arc(&self, s: u32) -> ArcRef {
        ArcRef::of(&self.circles[(s / 2) as usize], s % 2 == 1)
    }

    fn strip(&self, ei: usize) -> (f64, f64) {
        let x = self.events[ei].x;
        (x, self.events.get(ei + 1).map_or(x, |e| e.x))
    }

    fn refresh(&mut self, s: u32, x0: f64, x1: f64) {
        let a = self.arc(s);
        let (p, q) = (a.y(x0), a.y(x1));
        let e = &mut self.elems[s as usize];
        e.y_s = p.min(q);
        e.y_l = p.max(q);
        e.y_m = a.y(0.5 * (x0 + x1));
    }

    fn cmp(&self, a: u32, b: u32) -> Ordering {
        arc_order(&self.elems[a as usize], &self.elems[b as usize], self.tol)
    }

    /// The pair at `i` bounds a region of positive height.
    fn valid(&self, i: usize) -> bool {
        i + 1 < self.status.len()
            && self.elems[self.status[i + 1] as usize].y_m - self.elems[self.status[i] as usize].y_m > self.tol.mid
    }

    /// Applies event `ei`. Afterwards `old` is the previous status, removed
    /// slots are returned, and `dirty` marks inserted arcs, survivors whose
    /// order changed, and survivors just below a removed arc.
    fn step(&mut self, ei: usize, removed: &mut Vec<u32>) {
        let (x0, x1) = self.strip(ei);
        std::mem::swap(&mut self.old, &mut self.status);
        for (i, &s) in self.old.iter().enumerate() {
            self.old_pos[s as usize] = i as u32;
        }
        removed.clear();
        for &c in &self.events[ei].removes {
            removed.push(slot(c, false));
            removed.push(slot(c, true));
        }
        let mut gone = vec![false; self.old.len()];
        for &s in removed.iter() {
            gone[self.old_pos[s as usize] as usize] = true;
        }
        // Survivors keep their old order. Those under a removed arc, or
        // between the two arcs of a removed circle (arcs passing through its
        // extreme point), lose or change their set.
        let mut between = vec![false; self.old.len()];
        for &c in &self.events[ei].removes {
            let a = self.old_pos[slot(c, false) as usize] as usize;
            let b = self.old_pos[slot(c, true) as usize] as usize;
            for f in &mut between[a.min(b)..=a.max(b)] {
                *f = true;
            }
        }
        self.status.clear();
        let mut touched: Vec<u32> = Vec::new();
        for (i, &s) in self.old.iter().enumerate() {
            if gone[i] {
                if let Some(&last) = self.status.last() {
                    if touched.last() != Some(&last) {
                        touched.push(last);
                    }
                }
            } else {
                if between[i] {
                    touched.push(s);
                }
                self.status.push(s);
            }
        }
        for i in 0..self.status.len() {
            let s = self.status[i];
            self.refresh(s, x0, x1);
        }
        // Insertion sort: the survivors are nearly sorted already.
        for i in 1..self.status.len() {
            let mut j = i;
            while j > 0 && self.cmp(self.status[j - 1], self.status[j]) == Ordering::Greater {
                self.status.swap(j - 1, j);
                j -= 1;
            }
        }
        // Survivors out of their old relative order.
        let n = self.status.len();
        let ranks: Vec<u32> = self.status.iter().map(|&s| self.old_pos[s as usize]).collect();
        let mut moved = vec![false; n];
        let mut pmax = 0u32;
        for i in 0..n {
            if i > 0 && pmax > ranks[i] {
                moved[i] = true;
            }
            pmax = pmax.max(ranks[i]);
        }
        let mut smin = u32::MAX;
        for i in (0..n).rev() {
            if smin < ranks[i] {
                moved[i] = true;
            }
            smin = smin.min(ranks[i]);
        }
        let mut flag = vec![false; 2 * self.circles.len()];
        for (i, &s) in self.status.iter().enumerate() {
            flag[s as usize] = moved[i];
        }
        for &s in &touched {
            flag[s as usize] = true;
        }
        for k in 0..self.events[ei].inserts.len() {
            let c = self.events[ei].inserts[k];
            for upper in [false, true] {
                let s = slot(c, upper);
                self.refresh(s, x0, x1);
                let at = self.status.partition_point(|&t| self.cmp(t, s) == Ordering::Less);
                self.status.insert(at, s);
                flag[s as usize] = true;
            }
        }
        self.dirty.clear();
        self.dirty.extend(self.status.iter().map(|&s| flag[s as usize]));
        // Arcs through an inserted circle's extreme point end up between
        // its two arcs.
        if !self.events[ei].inserts.is_empty() {
            let mut pos = vec![0usize; 2 * self.circles.len()];
            for (i, &s) in self.status.iter().enumerate() {
                pos[s as usize] = i;
            }
            for &c in &self.events[ei].inserts {
                let (a, b) = (pos[slot(c, false) as usize], pos[slot(c, true) as usize]);
                for d in &mut self.dirty[a.min(b)..=a.max(b)] {
                    *d = true;
                }
            }
        }
    }

    /// Maximal runs of dirty positions, each extended upward over arcs
    /// coincident with its top element.
    fn changed_ranges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (i, &d) in self.dirty.iter().enumerate() {
            if !d {
                continue;
            }
            match out.last_mut() {
                Some(last) if i <= last.1 + 1 => last.1 = i,
                _ => out.push((i, i)),
            }
        }
        for r in &mut out {
            while r.1 + 1 < self.status.len() && !self.valid(r.1) {
                r.1 += 1;
            }
        }
        // Extension may reach the next range.
        let mut merged: Vec<(usize, usize)> = Vec::with_capacity(out.len());
        for r in out {
            match merged.last_mut() {
                Some(last) if r.0 <= last.1 + 1 => last.1 = last.1.max(r.1),
                _ => merged.push(r),
            }
        }
        merged
    }

    fn cell(&self, i: usize, x0: f64, x1: f64) -> ArcCell {
        ArcCell {
            x0,
            x1,
            lower: Bound::Arc(self.arc(self.status[i])),
            upper: Bound::Arc(self.arc(self.status[i + 1])),
        }
    }

    fn exterior(&self) -> Option<ArcCell> {
        let b = self.circles.iter().map(|c| c.bounds()).reduce(|a, b| a.union(&b))?;
        let pad = b.width().max(b.height()).max(1.0) * 0.5;
        Some(ArcCell {
            x0: b.x_lo - pad,
            x1: self.events.first().map_or(b.x_lo, |e| e.x),
            lower: Bound::Line(b.y_lo - pad),
            upper: Bound::Line(b.y_hi + pad),
        })
    }
}

fn toggle(set: &mut RnnSet, hash: &mut SetHash, a: &ArcElement) {
    if a.upper {
        if set.contains(a.owner) {
            set.remove(a.owner);
            hash.sub(a.owner);
        }
    } else if !set.contains(a.owner) {
        set.insert(a.owner);
        hash.add(a.owner);
    }
}

fn require_l2(arr: &Arrangement) -> Result<(), LabelError> {
    match arr.frame_metric() {
        Metric::L2 => Ok(()),
        m => Err(LabelError::UnsupportedMetric(m)),
    }
}

fn label_exterior<S: LabelSink<ArcCell>>(sw: &Sweeper, sink: &mut S, stats: &mut SweepStats) {
    if let Some(geom) = sw.exterior() {
        stats.labels += 1;
        let id = sink.label(&geom, &[]);
        sink.piece(geom, id);
        stats.pieces += 1;
    }
}

#[derive(Debug, Clone, Default)]
struct Record {
    set: Vec<u32>,
    hash: SetHash,
    label: Option<LabelId>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OpenCell {
    x0: f64,
    upper: u32,
    label: LabelId,
}

/// Labels a circular arrangement with changed ranges and cached base sets.
///
/// The pair at the top of a changed range is the region just below an
/// unchanged arc, which continues across the event; it keeps the label
/// that region had, unless that label's set disagrees with the walked one.
pub fn crest_l2<S: LabelSink<ArcCell>>(arr: &Arrangement, sink: &mut S) -> Result<SweepStats, LabelError> {
    require_l2(arr)?;
    let mut sw = Sweeper::new(arr);
    let mut stats = SweepStats {
        events: sw.events.len() as u64,
        ..SweepStats::default()
    };
    label_exterior(&sw, sink, &mut stats);
    let slots = 2 * sw.circles.len();
    let mut records: Vec<Record> = vec![Record::default(); slots];
    let mut open: Vec<Option<OpenCell>> = vec![None; slots];
    let mut set = RnnSet::with_universe(arr.clients);
    let mut removed = Vec::new();
    let mut inherit: Vec<Option<(LabelId, SetHash)>> = Vec::new();

    let close = |open: &mut Vec<Option<OpenCell>>, sw: &Sweeper, s: u32, x: f64, sink: &mut S, stats: &mut SweepStats| {
        if let Some(c) = open[s as usize].take() {
            if c.x0 < x {
                let geom = ArcCell {
                    x0: c.x0,
                    x1: x,
                    lower: Bound::Arc(sw.arc(s)),
                    upper: Bound::Arc(sw.arc(c.upper)),
                };
                sink.piece(geom, c.label);
                stats.pieces += 1;
            }
        }
    };

    for ei in 0..sw.events.len() {
        if sink.cancelled() {
            return Err(LabelError::Cancelled);
        }
        sw.step(ei, &mut removed);
        let (x, x_next) = sw.strip(ei);
        stats.inserts += sw.events[ei].inserts.len() as u64;
        stats.removes += sw.events[ei].removes.len() as u64;
        for &s in &removed {
            close(&mut open, &sw, s, x, sink, &mut stats);
        }

        let ranges = sw.changed_ranges();
        inherit.clear();
        for &(_, hi) in &ranges {
            let above = sw.status.get(hi + 1).copied();
            inherit.push(above.and_then(|a| {
                let p = sw.old_pos[a as usize] as usize;
                let rec = &records[sw.old.get(p.checked_sub(1)?).copied()? as usize];
                rec.label.map(|l| (l, rec.hash))
            }));
        }

        for (j, &(lo, hi)) in ranges.iter().enumerate() {
            let mut hash = SetHash::default();
            match lo.checked_sub(1) {
                Some(p) => {
                    let rec = &records[sw.status[p] as usize];
                    set.load(&rec.set);
                    hash = rec.hash;
                }
                None => set.clear(),
            }
            for i in lo..=hi {
                let s = sw.status[i];
                toggle(&mut set, &mut hash, &sw.elems[s as usize]);
                let label = if !sw.valid(i) {
                    None
                } else {
                    match inherit[j] {
                        Some((l, h)) if i == hi && h == hash => Some(l),
                        _ => {
                            stats.labels += 1;
                            stats.lambda = stats.lambda.max(set.len() as u64);
                            Some(sink.label(&sw.cell(i, x, x_next), set.as_slice()))
                        }
                    }
                };
                let rec = &mut records[s as usize];
                rec.set.clear();
                rec.set.extend_from_slice(set.as_slice());
                rec.hash = hash;
                rec.label = label;
            }
        }

        // Bring every open cell in line with its current pair.
        for i in 0..sw.status.len() {
            let s = sw.status[i];
            let want = if sw.valid(i) {
                let upper = sw.status[i + 1];
                let rec = &mut records[s as usize];
                // Two arcs touching at the event line split the face even
                // though the pair carries on.
                let pinched = open[s as usize].is_some_and(|c| c.upper == upper && Some(c.label) == rec.label)
                    && sw.arc(upper).y(x) - sw.arc(s).y(x) <= sw.tol.ends;
                if pinched {
                    rec.label = None;
                }
                let label = match rec.label {
                    Some(l) => l,
                    None => {
                        // A pair that gained height without a change.
                        stats.labels += 1;
                        stats.lambda = stats.lambda.max(rec.set.len() as u64);
                        let l = sink.label(&sw.cell(i, x, x_next), &rec.set);
                        rec.label = Some(l);
                        l
                    }
                };
                Some((sw.status[i + 1], label))
            } else {
                None
            };
            let have = open[s as usize].map(|c| (c.upper, c.label));
            if have != want {
                close(&mut open, &sw, s, x, sink, &mut stats);
                open[s as usize] = want.map(|(upper, label)| OpenCell { x0: x, upper, label });
            }
        }
    }
    Ok(stats)
}

/// Labels every valid pair of every strip from an empty base set.
pub fn crest_a_l2<S: LabelSink<ArcCell>>(arr: &Arrangement, sink: &mut S) -> Result<SweepStats, LabelError> {
    require_l2(arr)?;
    let mut sw = Sweeper::new(arr);
    let mut stats = SweepStats {
        events: sw.events.len() as u64,
        ..SweepStats::default()
    };
    label_exterior(&sw, sink, &mut stats);
    let mut set = RnnSet::with_universe(arr.clients);
    let mut removed = Vec::new();
    for ei in 0..sw.events.len() {
        if sink.cancelled() {
            return Err(LabelError::Cancelled);
        }
        sw.step(ei, &mut removed);
        stats.inserts += sw.events[ei].inserts.len() as u64;
        stats.removes += sw.events[ei].removes.len() as u64;
        let (x, x_next) = sw.strip(ei);
        set.clear();
        let mut hash = SetHash::default();
        for i in 0..sw.status.len() {
            toggle(&mut set, &mut hash, &sw.elems[sw.status[i] as usize]);
            if sw.valid(i) {
                stats.labels += 1;
                stats.lambda = stats.lambda.max(set.len() as u64);
                let geom = sw.cell(i, x, x_next);
                let id = sink.label(&geom, set.as_slice());
                sink.piece(geom, id);
                stats.pieces += 1;
            }
        }
    }
    Ok(stats)
}

/// Number of faces of a circular arrangement, including the unbounded one.
pub fn count_regions_l2(arr: &Arrangement) -> u64 {
    let mut sw = Sweeper::new(arr);
    let mut linker = StripLinker::new(sw.tol.mid);
    let mut removed = Vec::new();
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for ei in 0..sw.events.len() {
        sw.step(ei, &mut removed);
        let (x0, x1) = sw.strip(ei);
        left.clear();
        right.clear();
        let n = sw.status.len();
        let ext = |y0: f64, y1: f64| Seg {
            y0,
            y1,
            hash: SetHash::default(),
            node: EXTERIOR,
        };
        if n > 0 {
            let first = sw.arc(sw.status[0]);
            left.push(ext(f64::NEG_INFINITY, first.y(x0)));
            right.push(ext(f64::NEG_INFINITY, first.y(x1)));
        }
        let mut hash = SetHash::default();
        let mut set = RnnSet::with_universe(arr.clients);
        for i in 0..n {
            toggle(&mut set, &mut hash, &sw.elems[sw.status[i] as usize]);
            if sw.valid(i) {
                let (a, b) = (sw.arc(sw.status[i]), sw.arc(sw.status[i + 1]));
                let node = linker.node();
                left.push(Seg { y0: a.y(x0), y1: b.y(x0), hash, node });
                right.push(Seg { y0: a.y(x1), y1: b.y(x1), hash, node });
            }
        }
        let top = |x: f64| sw.status.last().map_or(f64::NEG_INFINITY, |&s| sw.arc(s).y(x));
        left.push(ext(top(x0), f64::INFINITY));
        right.push(ext(top(x1), f64::INFINITY));
        linker.push_strip(&left, right.clone());
    }
    linker.count()
}
