//! Region-level bookkeeping: counting the faces of an arrangement and
//! grouping reported pieces into regions.

use std::collections::{BTreeSet, HashMap};

use crate::geometry::{OrdF64, Rect};
use crate::locate::PieceGeom;
use crate::nn::Arrangement;
use crate::rnnset::SetHash;
use crate::sink::{LabelId, Labeling};
use crate::sweep::{build_events, Boxes};

#[derive(Debug, Clone, Default)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub fn push(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut a: u32) -> u32 {
        while self.parent[a as usize] != a {
            let gp = self.parent[self.parent[a as usize] as usize];
            self.parent[a as usize] = gp;
            a = gp;
        }
        a
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller id wins so roots are stable.
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi as usize] = lo;
        }
    }

    pub fn roots(&mut self) -> usize {
        (0..self.parent.len() as u32).filter(|&i| self.find(i) == i).count()
    }
}

/// A y-range on one vertical line, with the RNN set of the face there.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Seg {
    pub y0: f64,
    pub y1: f64,
    pub hash: SetHash,
    pub node: u32,
}

/// Counts faces strip by strip. Each strip reports its faces' y-ranges on
/// both bounding lines; faces of neighboring strips are joined when they
/// share a stretch of the common line and carry the same RNN set. Node 0
/// stands for the unbounded face.
pub(crate) struct StripLinker {
    uf: UnionFind,
    prev: Vec<Seg>,
    tol: f64,
}

pub(crate) const EXTERIOR: u32 = 0;

impl StripLinker {
    pub fn new(tol: f64) -> Self {
        StripLinker {
            uf: UnionFind::new(1),
            prev: vec![Seg {
                y0: f64::NEG_INFINITY,
                y1: f64::INFINITY,
                hash: SetHash::default(),
                node: EXTERIOR,
            }],
            tol,
        }
    }

    pub fn node(&mut self) -> u32 {
        self.uf.push()
    }

    /// `left` and `right` list the strip's faces bottom to top, on its
    /// left and right bounding lines.
    pub fn push_strip(&mut self, left: &[Seg], right: Vec<Seg>) {
        let (a, b) = (&self.prev, left);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = a[i].y0.max(b[j].y0);
            let hi = a[i].y1.min(b[j].y1);
            if hi - lo > self.tol && a[i].hash == b[j].hash {
                self.uf.union(a[i].node, b[j].node);
            }
            if a[i].y1 < b[j].y1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        self.prev = right;
    }

    pub fn count(mut self) -> u64 {
        self.uf.roots() as u64
    }
}

/// Number of faces (regions) of a square arrangement, including the
/// unbounded one.
pub fn count_regions_boxes(bx: &Boxes) -> u64 {
    let events = build_events(bx);
    let mut status: BTreeSet<(OrdF64, u8, u32)> = BTreeSet::new();
    let mut linker = StripLinker::new(0.0);
    let mut segs = Vec::new();
    for ev in &events {
        for &i in &ev.removes {
            let r = &bx.rects[i as usize];
            status.remove(&(OrdF64(r.y_lo), 1, i));
            status.remove(&(OrdF64(r.y_hi), 0, i));
        }
        for &i in &ev.inserts {
            let r = &bx.rects[i as usize];
            status.insert((OrdF64(r.y_lo), 1, i));
            status.insert((OrdF64(r.y_hi), 0, i));
        }
        segs.clear();
        let mut below = f64::NEG_INFINITY;
        let mut hash = SetHash::default();
        let mut it = status.iter().peekable();
        let first = it.peek().map(|k| k.0 .0);
        if let Some(f) = first {
            segs.push(Seg { y0: below, y1: f, hash, node: EXTERIOR });
        }
        while let Some(&(y, kind, i)) = it.next() {
            let owner = bx.owner[i as usize];
            if kind == 1 {
                hash.add(owner);
            } else {
                hash.sub(owner);
            }
            below = y.0;
            if let Some(&&(ny, _, _)) = it.peek() {
                if y < ny {
                    let node = linker.node();
                    segs.push(Seg { y0: y.0, y1: ny.0, hash, node });
                }
            }
        }
        segs.push(Seg {
            y0: below,
            y1: f64::INFINITY,
            hash: SetHash::default(),
            node: EXTERIOR,
        });
        linker.push_strip(&segs, segs.clone());
    }
    linker.count()
}

/// Region count of a square arrangement (L∞, or L1 in the rotated frame).
pub fn count_regions(arr: &Arrangement) -> u64 {
    count_regions_boxes(&Boxes::new(arr))
}

/// Region count by union-find over the cells of the side-extension grid:
/// neighboring cells with equal RNN sets belong to one region. Quadratic in
/// the number of squares; intended for small instances.
pub fn count_regions_grid(bx: &Boxes) -> u64 {
    if bx.is_empty() {
        return 1;
    }
    let mut xs: Vec<f64> = bx.rects.iter().flat_map(|r| [r.x_lo, r.x_hi]).collect();
    let mut ys: Vec<f64> = bx.rects.iter().flat_map(|r| [r.y_lo, r.y_hi]).collect();
    for v in [&mut xs, &mut ys] {
        v.sort_unstable_by(f64::total_cmp);
        v.dedup();
        let (lo, hi) = (v[0], v[v.len() - 1]);
        v.insert(0, lo - 1.0);
        v.push(hi + 1.0);
    }
    let (nx, ny) = (xs.len() - 1, ys.len() - 1);
    let mut hashes = vec![SetHash::default(); nx * ny];
    for r in 0..ny {
        for c in 0..nx {
            let q = Rect::new(xs[c], xs[c + 1], ys[r], ys[r + 1]).centroid();
            let mut h = SetHash::default();
            for (i, b) in bx.rects.iter().enumerate() {
                if b.contains(q) {
                    h.add(bx.owner[i]);
                }
            }
            hashes[r * nx + c] = h;
        }
    }
    let mut uf = UnionFind::new(nx * ny);
    for r in 0..ny {
        for c in 0..nx {
            let i = r * nx + c;
            if c + 1 < nx && hashes[i] == hashes[i + 1] {
                uf.union(i as u32, (i + 1) as u32);
            }
            if r + 1 < ny && hashes[i] == hashes[i + nx] {
                uf.union(i as u32, (i + nx) as u32);
            }
        }
    }
    uf.roots() as u64
}

/// Pieces of one region, identified by their shared RNN set and
/// connectivity.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGroup {
    /// Indices into the labeling's pieces, ascending.
    pub pieces: Vec<usize>,
    /// Smallest label id among the pieces; regions sort by it.
    pub label: LabelId,
    /// Sorted client indices.
    pub rnn: Vec<u32>,
}

/// Joins pieces into regions: pieces sharing a label, and pieces that meet
/// along a stretch of boundary with equal RNN sets. Regions come out in
/// the order their first label was reported.
pub fn group_regions<G: PieceGeom>(lab: &Labeling<G>, tol: f64) -> Vec<RegionGroup> {
    let pieces = &lab.pieces;
    let mut set_ids: HashMap<&[u32], u32> = HashMap::new();
    let label_set: Vec<u32> = lab
        .labels
        .iter()
        .map(|l| {
            let next = set_ids.len() as u32;
            *set_ids.entry(l.rnn.as_slice()).or_insert(next)
        })
        .collect();
    let piece_set: Vec<u32> = pieces.iter().map(|p| label_set[p.label as usize]).collect();
    let mut uf = UnionFind::new(pieces.len());
    let mut first_of_label: HashMap<LabelId, u32> = HashMap::new();
    for (i, p) in pieces.iter().enumerate() {
        match first_of_label.get(&p.label) {
            Some(&j) => uf.union(j, i as u32),
            None => {
                first_of_label.insert(p.label, i as u32);
            }
        }
    }
    link_across_x(pieces.iter().map(|p| &p.geom), &piece_set, &mut uf, tol);
    G::link_along_y(pieces.iter().map(|p| &p.geom).collect(), &piece_set, &mut uf, tol);

    let mut by_root: HashMap<u32, usize> = HashMap::new();
    let mut groups: Vec<RegionGroup> = Vec::new();
    for i in 0..pieces.len() {
        let root = uf.find(i as u32);
        let g = *by_root.entry(root).or_insert_with(|| {
            groups.push(RegionGroup {
                pieces: Vec::new(),
                label: LabelId::MAX,
                rnn: Vec::new(),
            });
            groups.len() - 1
        });
        groups[g].pieces.push(i);
        groups[g].label = groups[g].label.min(pieces[i].label);
    }
    for g in &mut groups {
        g.rnn = lab.labels[g.label as usize].rnn.clone();
    }
    groups.sort_by_key(|g| g.label);
    groups
}

/// Unions pieces that end and start on the same vertical line and overlap
/// there with equal sets. Pieces of one run never overlap, so a piece
/// closing at `x` can only touch pieces opening at `x`.
fn link_across_x<'a, G: PieceGeom + 'a>(
    geoms: impl Iterator<Item = &'a G>,
    sets: &[u32],
    uf: &mut UnionFind,
    tol: f64,
) {
    let geoms: Vec<&G> = geoms.collect();
    let mut ends: Vec<(OrdF64, bool, u32)> = Vec::with_capacity(2 * geoms.len());
    for (i, g) in geoms.iter().enumerate() {
        let (x0, x1) = g.x_range();
        ends.push((OrdF64(x1), false, i as u32));
        ends.push((OrdF64(x0), true, i as u32));
    }
    ends.sort_unstable();
    let mut k = 0;
    while k < ends.len() {
        let x = ends[k].0;
        let mut closing = Vec::new();
        let mut opening = Vec::new();
        while k < ends.len() && ends[k].0 == x {
            let i = ends[k].2;
            let (y0, y1) = geoms[i as usize].y_range_at(x.0);
            if ends[k].1 {
                opening.push((y0, y1, i));
            } else {
                closing.push((y0, y1, i));
            }
            k += 1;
        }
        link_sorted(&mut closing, &mut opening, sets, uf, tol);
    }
}

/// Sweeps two lists of disjoint ranges and unions overlapping entries with
/// equal sets.
pub(crate) fn link_sorted(
    a: &mut [(f64, f64, u32)],
    b: &mut [(f64, f64, u32)],
    sets: &[u32],
    uf: &mut UnionFind,
    tol: f64,
) {
    a.sort_unstable_by(|p, q| p.0.total_cmp(&q.0));
    b.sort_unstable_by(|p, q| p.0.total_cmp(&q.0));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi - lo > tol && sets[a[i].2 as usize] == sets[b[j].2 as usize] {
            uf.union(a[i].2, b[j].2);
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
}

impl Rect {
    /// Joins vertically stacked rectangles (grid cells) with equal sets.
    pub(crate) fn link_rows(geoms: &[&Rect], sets: &[u32], uf: &mut UnionFind, tol: f64) {
        let mut ends: Vec<(OrdF64, bool, u32)> = Vec::with_capacity(2 * geoms.len());
        for (i, g) in geoms.iter().enumerate() {
            ends.push((OrdF64(g.y_hi), false, i as u32));
            ends.push((OrdF64(g.y_lo), true, i as u32));
        }
        ends.sort_unstable();
        let mut k = 0;
        while k < ends.len() {
            let y = ends[k].0;
            let mut below = Vec::new();
            let mut above = Vec::new();
            while k < ends.len() && ends[k].0 == y {
                let i = ends[k].2;
                let g = geoms[i as usize];
                if ends[k].1 {
                    above.push((g.x_lo, g.x_hi, i));
                } else {
                    below.push((g.x_lo, g.x_hi, i));
                }
                k += 1;
            }
            link_sorted(&mut below, &mut above, sets, uf, tol);
        }
    }
}
