//! Influence measures over RNN sets.
//!
//! RNN sets are slices of dense client indices, sorted ascending.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{ClientId, Dataset, FacilityId, Mode};
use crate::nn::NnAssignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Size,
    Weighted,
    Capacity,
    Edges,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Size,
        Measure::Weighted,
        Measure::Capacity,
        Measure::Edges,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Size => "size",
            Measure::Weighted => "weighted",
            Measure::Capacity => "capacity",
            Measure::Edges => "edges",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "size" => Ok(Measure::Size),
            "weighted" | "weight" => Ok(Measure::Weighted),
            "capacity" => Ok(Measure::Capacity),
            "edges" | "edge" => Ok(Measure::Edges),
            other => Err(format!("unknown measure `{other}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InfluenceError {
    #[error("client index {0} is out of range")]
    UnknownClientId(u32),
    #[error("edge references unknown client id {0}")]
    UnknownEdgeEndpoint(ClientId),
    #[error("capacity references unknown facility id {0}")]
    UnknownFacility(FacilityId),
    #[error("measure `{0}` needs context that was not loaded")]
    MissingContext(Measure),
}

/// Side data for every measure. Client references are dense indices into
/// the dataset's client list.
#[derive(Debug, Clone, Default)]
pub struct InfluenceContext {
    weights: Vec<f64>,
    /// Neighbors with a larger index, sorted.
    adjacency: Option<Vec<Vec<u32>>>,
    capacity: Option<CapacityContext>,
}

#[derive(Debug, Clone)]
struct CapacityContext {
    candidate: u64,
    /// Capacity of each candidate site, indexed like the NN assignment.
    caps: Vec<u64>,
    /// Current site of each client.
    site_of: Vec<u32>,
    /// |R(f)| per site.
    counts: Vec<u64>,
    /// Σ_f min(c(f), |R(f)|) before any client moves to the candidate.
    base: u64,
}

impl InfluenceContext {
    /// Weights come from the dataset; edges and capacities are optional.
    pub fn new(ds: &Dataset) -> Self {
        InfluenceContext {
            weights: ds.clients.iter().map(|c| c.weight).collect(),
            adjacency: None,
            capacity: None,
        }
    }

    /// Unit weights over `n` clients with no extra context.
    pub fn uniform(n: usize) -> Self {
        InfluenceContext {
            weights: vec![1.0; n],
            adjacency: None,
            capacity: None,
        }
    }

    pub fn clients(&self) -> usize {
        self.weights.len()
    }

    pub fn with_edges(
        mut self,
        ds: &Dataset,
        edges: &[(ClientId, ClientId)],
    ) -> Result<Self, InfluenceError> {
        let index: HashMap<ClientId, u32> = ds
            .clients
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id, i as u32))
            .collect();
        let mut adj = vec![Vec::new(); ds.clients.len()];
        for &(a, b) in edges {
            let ia = *index.get(&a).ok_or(InfluenceError::UnknownEdgeEndpoint(a))?;
            let ib = *index.get(&b).ok_or(InfluenceError::UnknownEdgeEndpoint(b))?;
            if ia == ib {
                continue;
            }
            let (lo, hi) = (ia.min(ib), ia.max(ib));
            adj[lo as usize].push(hi);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        self.adjacency = Some(adj);
        Ok(self)
    }

    /// Enables the capacity measure. `overrides` replaces capacities given
    /// in the facility file; every facility must end up with one.
    pub fn with_capacities(
        mut self,
        ds: &Dataset,
        nn: &NnAssignment,
        overrides: &[(FacilityId, u32)],
        candidate: u64,
    ) -> Result<Self, InfluenceError> {
        if ds.mode == Mode::Monochromatic {
            return Err(InfluenceError::MissingContext(Measure::Capacity));
        }
        let mut caps: Vec<Option<u64>> = ds
            .facilities
            .iter()
            .map(|f| f.capacity.map(u64::from))
            .collect();
        let index: HashMap<FacilityId, usize> = ds
            .facilities
            .iter()
            .enumerate()
            .map(|(i, f)| (f.id, i))
            .collect();
        for &(id, c) in overrides {
            let i = *index.get(&id).ok_or(InfluenceError::UnknownFacility(id))?;
            caps[i] = Some(u64::from(c));
        }
        let caps: Vec<u64> = caps
            .into_iter()
            .collect::<Option<_>>()
            .ok_or(InfluenceError::MissingContext(Measure::Capacity))?;
        let mut counts = vec![0u64; caps.len()];
        for &s in &nn.site {
            counts[s as usize] += 1;
        }
        let base = caps.iter().zip(&counts).map(|(&c, &r)| c.min(r)).sum();
        self.capacity = Some(CapacityContext {
            candidate,
            caps,
            site_of: nn.site.clone(),
            counts,
            base,
        });
        Ok(self)
    }

    pub fn supports(&self, m: Measure) -> bool {
        match m {
            Measure::Size | Measure::Weighted => true,
            Measure::Capacity => self.capacity.is_some(),
            Measure::Edges => self.adjacency.is_some(),
        }
    }

    pub fn available(&self) -> Vec<Measure> {
        Measure::ALL.into_iter().filter(|&m| self.supports(m)).collect()
    }

    pub fn evaluate(&self, m: Measure, rnn: &[u32]) -> Result<f64, InfluenceError> {
        if let Some(&bad) = rnn.iter().find(|&&o| o as usize >= self.weights.len()) {
            return Err(InfluenceError::UnknownClientId(bad));
        }
        match m {
            Measure::Size => Ok(rnn.len() as f64),
            Measure::Weighted => Ok(rnn.iter().map(|&o| self.weights[o as usize]).sum()),
            Measure::Edges => {
                let adj = self
                    .adjacency
                    .as_ref()
                    .ok_or(InfluenceError::MissingContext(m))?;
                debug_assert!(rnn.windows(2).all(|w| w[0] < w[1]));
                let mut count = 0u64;
                for &u in rnn {
                    for &v in &adj[u as usize] {
                        if rnn.binary_search(&v).is_ok() {
                            count += 1;
                        }
                    }
                }
                Ok(count as f64)
            }
            Measure::Capacity => {
                let cap = self
                    .capacity
                    .as_ref()
                    .ok_or(InfluenceError::MissingContext(m))?;
                // Only facilities that lose clients change their term.
                let mut lost: HashMap<u32, u64> = HashMap::new();
                for &o in rnn {
                    *lost.entry(cap.site_of[o as usize]).or_default() += 1;
                }
                let mut total = cap.base;
                for (f, l) in lost {
                    let (c, r) = (cap.caps[f as usize], cap.counts[f as usize]);
                    total = total - c.min(r) + c.min(r - l);
                }
                Ok((cap.candidate.min(rnn.len() as u64) + total) as f64)
            }
        }
    }
}
