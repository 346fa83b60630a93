//! Mutable RNN set used inside the sweeps.

/// Set of client indices with O(1) insert/remove and a contiguous member
/// slice, so copying a snapshot costs one `memcpy` of the members.
#[derive(Debug, Clone, Default)]
pub struct RnnSet {
    items: Vec<u32>,
    /// Position of each member in `items`, plus one; zero means absent.
    slot: Vec<u32>,
}

impl RnnSet {
    pub fn with_universe(n: usize) -> Self {
        RnnSet {
            items: Vec::new(),
            slot: vec![0; n],
        }
    }

    pub fn insert(&mut self, o: u32) {
        let s = &mut self.slot[o as usize];
        if *s == 0 {
            self.items.push(o);
            *s = self.items.len() as u32;
        }
    }

    pub fn remove(&mut self, o: u32) {
        let s = self.slot[o as usize];
        if s == 0 {
            return;
        }
        let i = (s - 1) as usize;
        let last = *self.items.last().expect("non-empty");
        self.items.swap_remove(i);
        if last != o {
            self.slot[last as usize] = s;
        }
        self.slot[o as usize] = 0;
    }

    pub fn contains(&self, o: u32) -> bool {
        self.slot[o as usize] != 0
    }

    pub fn clear(&mut self) {
        for &o in &self.items {
            self.slot[o as usize] = 0;
        }
        self.items.clear();
    }

    /// Replaces the contents with `members`.
    pub fn load(&mut self, members: &[u32]) {
        self.clear();
        for &o in members {
            self.insert(o);
        }
    }

    /// Members in no particular order.
    pub fn as_slice(&self) -> &[u32] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn to_sorted(&self) -> Vec<u32> {
        let mut v = self.items.clone();
        v.sort_unstable();
        v
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-independent 128-bit fingerprint of a set, maintained under
/// insert and remove in O(1).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetHash(pub u64, pub u64);

impl SetHash {
    fn member(o: u32) -> (u64, u64) {
        let a = splitmix(u64::from(o));
        (a, splitmix(a ^ 0x5851_f42d_4c95_7f2d))
    }

    pub fn add(&mut self, o: u32) {
        let (a, b) = Self::member(o);
        self.0 = self.0.wrapping_add(a);
        self.1 = self.1.wrapping_add(b);
    }

    pub fn sub(&mut self, o: u32) {
        let (a, b) = Self::member(o);
        self.0 = self.0.wrapping_sub(a);
        self.1 = self.1.wrapping_sub(b);
    }

    pub fn of(members: &[u32]) -> Self {
        let mut h = SetHash::default();
        for &o in members {
            h.add(o);
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    proptest! {
        #[test]
        fn matches_btreeset(ops in proptest::collection::vec((any::<bool>(), 0u32..40), 0..300)) {
            let mut s = RnnSet::with_universe(40);
            let mut model = BTreeSet::new();
            let mut h = SetHash::default();
            for (add, o) in ops {
                if add {
                    if model.insert(o) { h.add(o); }
                    s.insert(o);
                } else {
                    if model.remove(&o) { h.sub(o); }
                    s.remove(o);
                }
                prop_assert_eq!(s.len(), model.len());
                for o in 0..40 {
                    prop_assert_eq!(s.contains(o), model.contains(&o));
                }
            }
            let sorted: Vec<u32> = model.iter().copied().collect();
            prop_assert_eq!(s.to_sorted(), sorted.clone());
            prop_assert_eq!(h, SetHash::of(&sorted));
            let snap = s.as_slice().to_vec();
            s.clear();
            prop_assert!(s.is_empty());
            s.load(&snap);
            prop_assert_eq!(s.to_sorted(), sorted);
        }
    }

    #[test]
    fn hash_separates_small_sets() {
        let mut seen = std::collections::HashSet::new();
        for mask in 0u32..1 << 12 {
            let set: Vec<u32> = (0..12).filter(|i| mask >> i & 1 == 1).collect();
            assert!(seen.insert(SetHash::of(&set)));
        }
    }
}
