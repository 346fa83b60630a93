//! Static point-enclosure index over axis-aligned rectangles.
//!
//! A segment tree over the x slabs assigns every rectangle to O(log n)
//! canonical nodes; each node answers the y part with a centered interval
//! tree. A query costs O(log² n + α) for α reported rectangles.

use crate::geometry::{Point, Rect};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct ItNode {
    center: f64,
    /// Range into `by_lo` / `by_hi` for intervals straddling `center`.
    start: u32,
    len: u32,
    left: u32,
    right: u32,
}

/// Arena of centered interval trees, one per segment-tree node.
#[derive(Debug, Clone, Default)]
struct IntervalForest {
    nodes: Vec<ItNode>,
    /// (lo, id) sorted by ascending lo within each node's range.
    by_lo: Vec<(f64, u32)>,
    /// (hi, id) sorted by descending hi within each node's range.
    by_hi: Vec<(f64, u32)>,
}

impl IntervalForest {
    /// Builds a tree over `items` (lo, hi, id) and returns its root.
    fn build(&mut self, items: &mut [(f64, f64, u32)], scratch: &mut Vec<f64>) -> u32 {
        if items.is_empty() {
            return NONE;
        }
        scratch.clear();
        for &(lo, hi, _) in items.iter() {
            scratch.push(lo);
            scratch.push(hi);
        }
        let mid = scratch.len() / 2;
        let (_, &mut center, _) = scratch.select_nth_unstable_by(mid, f64::total_cmp);
        // Partition into left (hi < c), straddling, right (lo > c).
        items.sort_unstable_by(|a, b| {
            let ka = if a.1 < center { 0 } else if a.0 > center { 2 } else { 1 };
            let kb = if b.1 < center { 0 } else if b.0 > center { 2 } else { 1 };
            ka.cmp(&kb)
        });
        let n_left = items.iter().take_while(|it| it.1 < center).count();
        let n_mid = items[n_left..]
            .iter()
            .take_while(|it| it.0 <= center)
            .count();
        let start = self.by_lo.len() as u32;
        let mid_items = &items[n_left..n_left + n_mid];
        let mut lo: Vec<(f64, u32)> = mid_items.iter().map(|it| (it.0, it.2)).collect();
        let mut hi: Vec<(f64, u32)> = mid_items.iter().map(|it| (it.1, it.2)).collect();
        lo.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        hi.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
        self.by_lo.extend(lo);
        self.by_hi.extend(hi);
        let me = self.nodes.len() as u32;
        self.nodes.push(ItNode {
            center,
            start,
            len: n_mid as u32,
            left: NONE,
            right: NONE,
        });
        let (left, rest) = items.split_at_mut(n_left);
        let right = &mut rest[n_mid..];
        let l = self.build(left, scratch);
        let r = self.build(right, scratch);
        self.nodes[me as usize].left = l;
        self.nodes[me as usize].right = r;
        me
    }

    /// Pushes ids of intervals with `lo ≤ q ≤ hi`.
    fn query(&self, root: u32, q: f64, out: &mut Vec<u32>) {
        let mut cur = root;
        while cur != NONE {
            let nd = &self.nodes[cur as usize];
            let range = nd.start as usize..(nd.start + nd.len) as usize;
            if q < nd.center {
                for &(lo, id) in &self.by_lo[range] {
                    if lo > q {
                        break;
                    }
                    out.push(id);
                }
                cur = nd.left;
            } else if q > nd.center {
                for &(hi, id) in &self.by_hi[range] {
                    if hi < q {
                        break;
                    }
                    out.push(id);
                }
                cur = nd.right;
            } else {
                out.extend(self.by_lo[range].iter().map(|&(_, id)| id));
                break;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RectIndex {
    rects: Vec<Rect>,
    xs: Vec<f64>,
    /// Leaf count of the segment tree (a power of two).
    size: usize,
    roots: Vec<u32>,
    forest: IntervalForest,
}

impl RectIndex {
    pub fn new(rects: &[Rect]) -> Self {
        let mut xs: Vec<f64> = rects.iter().flat_map(|r| [r.x_lo, r.x_hi]).collect();
        xs.sort_unstable_by(f64::total_cmp);
        xs.dedup();
        let slabs = xs.len().saturating_sub(1);
        let size = slabs.next_power_of_two().max(1);
        let mut buckets: Vec<Vec<(f64, f64, u32)>> = vec![Vec::new(); 2 * size];
        for (id, r) in rects.iter().enumerate() {
            if !(r.x_lo < r.x_hi) {
                continue;
            }
            let a = xs.partition_point(|&x| x < r.x_lo);
            let b = xs.partition_point(|&x| x < r.x_hi);
            // Slabs a..b, as a half-open leaf range.
            let (mut l, mut h) = (a + size, b + size);
            while l < h {
                if l & 1 == 1 {
                    buckets[l].push((r.y_lo, r.y_hi, id as u32));
                    l += 1;
                }
                if h & 1 == 1 {
                    h -= 1;
                    buckets[h].push((r.y_lo, r.y_hi, id as u32));
                }
                l >>= 1;
                h >>= 1;
            }
        }
        let mut forest = IntervalForest::default();
        let mut scratch = Vec::new();
        let roots = buckets
            .iter_mut()
            .map(|b| forest.build(b, &mut scratch))
            .collect();
        RectIndex {
            rects: rects.to_vec(),
            xs,
            size,
            roots,
            forest,
        }
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn rect(&self, id: u32) -> &Rect {
        &self.rects[id as usize]
    }

    /// Ids of rectangles with `x_lo ≤ p.x < x_hi` and `y_lo ≤ p.y ≤ y_hi`,
    /// in no particular order. Callers apply their exact predicate.
    pub fn candidates(&self, p: Point, out: &mut Vec<u32>) {
        out.clear();
        if self.xs.len() < 2 || !(p.x >= self.xs[0]) || p.x >= self.xs[self.xs.len() - 1] {
            return;
        }
        let slab = self.xs.partition_point(|&x| x <= p.x) - 1;
        let mut node = slab + self.size;
        while node >= 1 {
            let root = self.roots[node];
            if root != NONE {
                self.forest.query(root, p.y, out);
            }
            node >>= 1;
        }
    }

    /// Rectangles whose open interior contains `p`.
    pub fn stab(&self, p: Point, out: &mut Vec<u32>) {
        self.candidates(p, out);
        out.retain(|&id| self.rects[id as usize].contains(p));
    }
}
