//! Output side of the labeling algorithms.
//!
//! An algorithm reports each labeling through [`LabelSink::label`] and,
//! separately, the pieces of the plane each label covers through
//! [`LabelSink::piece`]. Labels are what the algorithms are measured by;
//! pieces exist so points can be located afterwards. A sweep that keeps a
//! region's label across several strips reports one piece spanning them.

use std::time::Instant;

use serde::{Deserialize, Serialize};


pub type LabelId = u32;

pub trait LabelSink<G> {
    /// Records one labeling of `geom` with the RNN set `rnn` (unordered).
    fn label(&mut self, geom: &G, rnn: &[u32]) -> LabelId;

    /// Records that `geom` carries label `label`. Pieces are disjoint.
    fn piece(&mut self, _geom: G, _label: LabelId) {}

    /// Polled between events; a `true` answer aborts the run.
    fn cancelled(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Label<G> {
    pub geom: G,
    /// Sorted client indices.
    pub rnn: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece<G> {
    pub geom: G,
    pub label: LabelId,
}

/// Keeps everything an algorithm reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Labeling<G> {
    pub labels: Vec<Label<G>>,
    pub pieces: Vec<Piece<G>>,
}

impl<G> Default for Labeling<G> {
    fn default() -> Self {
        Labeling {
            labels: Vec::new(),
            pieces: Vec::new(),
        }
    }
}

impl<G> Labeling<G> {
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn lambda(&self) -> usize {
        self.labels.iter().map(|l| l.rnn.len()).max().unwrap_or(0)
    }

    pub fn rnn(&self, id: LabelId) -> &[u32] {
        &self.labels[id as usize].rnn
    }
}

impl<G: Clone> LabelSink<G> for Labeling<G> {
    fn label(&mut self, geom: &G, rnn: &[u32]) -> LabelId {
        let mut rnn = rnn.to_vec();
        rnn.sort_unstable();
        self.labels.push(Label {
            geom: geom.clone(),
            rnn,
        });
        (self.labels.len() - 1) as LabelId
    }

    fn piece(&mut self, geom: G, label: LabelId) {
        self.pieces.push(Piece { geom, label });
    }
}

/// Counts labels and sums the members of every RNN set, so each label
/// costs O(|set|) as it would for a consumer that reads it. Used for
/// timing runs that would not fit in memory if collected.
#[derive(Debug, Clone)]
pub struct CountingSink {
    pub labels: u64,
    pub lambda: usize,
    /// Wrapping sum of all reported members.
    pub checksum: u64,
    deadline: Option<Instant>,
}

impl CountingSink {
    pub fn new(deadline: Option<Instant>) -> Self {
        CountingSink {
            labels: 0,
            lambda: 0,
            checksum: 0,
            deadline,
        }
    }
}

impl<G> LabelSink<G> for CountingSink {
    fn label(&mut self, _geom: &G, rnn: &[u32]) -> LabelId {
        let sum = rnn.iter().fold(0u64, |a, &o| a.wrapping_add(u64::from(o)));
        self.checksum = self.checksum.wrapping_add(sum);
        self.lambda = self.lambda.max(rnn.len());
        self.labels += 1;
        (self.labels - 1) as LabelId
    }

    fn cancelled(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Counters every algorithm reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepStats {
    /// Labelings performed (k, or the cell count m for the baseline).
    pub labels: u64,
    pub events: u64,
    /// Largest RNN set labeled.
    pub lambda: u64,
    pub inserts: u64,
    pub removes: u64,
    pub pieces: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum LabelError {
    #[error("this algorithm does not support the {0} metric")]
    UnsupportedMetric(crate::geometry::Metric),
    #[error("labeling run was cancelled")]
    Cancelled,
}
