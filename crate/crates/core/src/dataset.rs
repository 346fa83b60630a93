//! Client/facility datasets and their headerless CSV formats.
//!
//! Clients are `id,x,y[,weight]`, facilities `id,x,y[,capacity]`, edge lists
//! `id1,id2`. Blank lines and lines starting with `#` are skipped.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;

pub type ClientId = u64;
pub type FacilityId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Client {
    pub id: ClientId,
    pub pos: Point,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Facility {
    pub id: FacilityId,
    pub pos: Point,
    pub capacity: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Clients and facilities are distinct sets.
    Bichromatic,
    /// Facilities are the clients themselves.
    Monochromatic,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Bichromatic => "bi",
            Mode::Monochromatic => "mono",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bi" | "bichromatic" => Ok(Mode::Bichromatic),
            "mono" | "monochromatic" => Ok(Mode::Monochromatic),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: &'static str,
        found: usize,
    },
    #[error("line {line}: invalid {what} `{text}`")]
    InvalidField {
        line: usize,
        what: &'static str,
        text: String,
    },
    #[error("line {line}: duplicate id {id}")]
    DuplicateId { line: usize, id: u64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("client ids must be unique (duplicate {0})")]
    DuplicateClient(ClientId),
    #[error("facility ids must be unique (duplicate {0})")]
    DuplicateFacility(FacilityId),
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("client weights must be finite and non-negative")]
    BadWeight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub clients: Vec<Client>,
    pub facilities: Vec<Facility>,
    pub mode: Mode,
}

impl Dataset {
    pub fn new(
        clients: Vec<Client>,
        facilities: Vec<Facility>,
        mode: Mode,
    ) -> Result<Self, DatasetError> {
        let mut seen = HashSet::new();
        for c in &clients {
            if !c.pos.is_finite() {
                return Err(DatasetError::NonFinite);
            }
            if !(c.weight.is_finite() && c.weight >= 0.0) {
                return Err(DatasetError::BadWeight);
            }
            if !seen.insert(c.id) {
                return Err(DatasetError::DuplicateClient(c.id));
            }
        }
        if mode == Mode::Bichromatic {
            seen.clear();
            for f in &facilities {
                if !f.pos.is_finite() {
                    return Err(DatasetError::NonFinite);
                }
                if !seen.insert(f.id) {
                    return Err(DatasetError::DuplicateFacility(f.id));
                }
            }
        }
        Ok(Dataset {
            clients,
            facilities,
            mode,
        })
    }

    /// Builds a bichromatic dataset with sequential ids and unit weights.
    pub fn from_points(clients: &[Point], facilities: &[Point]) -> Self {
        Dataset {
            clients: clients
                .iter()
                .enumerate()
                .map(|(i, &pos)| Client {
                    id: i as u64,
                    pos,
                    weight: 1.0,
                })
                .collect(),
            facilities: facilities
                .iter()
                .enumerate()
                .map(|(i, &pos)| Facility {
                    id: i as u64,
                    pos,
                    capacity: None,
                })
                .collect(),
            mode: Mode::Bichromatic,
        }
    }

    pub fn monochromatic(points: &[Point]) -> Self {
        let mut ds = Dataset::from_points(points, &[]);
        ds.mode = Mode::Monochromatic;
        ds
    }

    /// Candidate set the NN search runs against: the facilities, or the
    /// clients themselves in monochromatic mode.
    pub fn candidate_sites(&self) -> Vec<(u64, Point)> {
        match self.mode {
            Mode::Bichromatic => self.facilities.iter().map(|f| (f.id, f.pos)).collect(),
            Mode::Monochromatic => self.clients.iter().map(|c| (c.id, c.pos)).collect(),
        }
    }

    pub fn client_index(&self, id: ClientId) -> Option<usize> {
        self.clients.iter().position(|c| c.id == id)
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn parse_num<T: FromStr>(line: usize, what: &'static str, text: &str) -> Result<T, ParseError> {
    text.parse().map_err(|_| ParseError::InvalidField {
        line,
        what,
        text: text.chars().take(64).collect(),
    })
}

fn parse_coord(line: usize, what: &'static str, text: &str) -> Result<f64, ParseError> {
    let v: f64 = parse_num(line, what, text)?;
    if !v.is_finite() {
        return Err(ParseError::InvalidField {
            line,
            what,
            text: text.chars().take(64).collect(),
        });
    }
    Ok(v)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_clients(text: &str) -> Result<Vec<Client>, ParseError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (line, l) in data_lines(text) {
        let f = split_fields(l);
        if !(3..=4).contains(&f.len()) {
            return Err(ParseError::FieldCount {
                line,
                expected: "3 or 4",
                found: f.len(),
            });
        }
        let id: u64 = parse_num(line, "id", f[0])?;
        let x = parse_coord(line, "x coordinate", f[1])?;
        let y = parse_coord(line, "y coordinate", f[2])?;
        let weight = match f.get(3) {
            Some(w) => {
                let w = parse_coord(line, "weight", w)?;
                if w < 0.0 {
                    return Err(ParseError::InvalidField {
                        line,
                        what: "weight",
                        text: f[3].to_string(),
                    });
                }
                w
            }
            None => 1.0,
        };
        if !seen.insert(id) {
            return Err(ParseError::DuplicateId { line, id });
        }
        out.push(Client {
            id,
            pos: Point::new(x, y),
            weight,
        });
    }
    Ok(out)
}

pub fn parse_facilities(text: &str) -> Result<Vec<Facility>, ParseError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (line, l) in data_lines(text) {
        let f = split_fields(l);
        if !(3..=4).contains(&f.len()) {
            return Err(ParseError::FieldCount {
                line,
                expected: "3 or 4",
                found: f.len(),
            });
        }
        let id: u64 = parse_num(line, "id", f[0])?;
        let x = parse_coord(line, "x coordinate", f[1])?;
        let y = parse_coord(line, "y coordinate", f[2])?;
        let capacity = match f.get(3) {
            Some(c) => Some(parse_num::<u32>(line, "capacity", c)?),
            None => None,
        };
        if !seen.insert(id) {
            return Err(ParseError::DuplicateId { line, id });
        }
        out.push(Facility {
            id,
            pos: Point::new(x, y),
            capacity,
        });
    }
    Ok(out)
}

/// Parses an undirected edge list. Self-loops are dropped and repeated
/// edges collapse; both endpoints are stored smallest first.
pub fn parse_edges(text: &str) -> Result<Vec<(ClientId, ClientId)>, ParseError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (line, l) in data_lines(text) {
        let f = split_fields(l);
        if f.len() != 2 {
            return Err(ParseError::FieldCount {
                line,
                expected: "2",
                found: f.len(),
            });
        }
        let a: u64 = parse_num(line, "id", f[0])?;
        let b: u64 = parse_num(line, "id", f[1])?;
        if a == b {
            continue;
        }
        let e = (a.min(b), a.max(b));
        if seen.insert(e) {
            out.push(e);
        }
    }
    Ok(out)
}

/// Parses `id,capacity` lines.
pub fn parse_capacities(text: &str) -> Result<Vec<(FacilityId, u32)>, ParseError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (line, l) in data_lines(text) {
        let f = split_fields(l);
        if f.len() != 2 {
            return Err(ParseError::FieldCount {
                line,
                expected: "2",
                found: f.len(),
            });
        }
        let id: u64 = parse_num(line, "id", f[0])?;
        let cap: u32 = parse_num(line, "capacity", f[1])?;
        if !seen.insert(id) {
            return Err(ParseError::DuplicateId { line, id });
        }
        out.push((id, cap));
    }
    Ok(out)
}

pub fn write_clients(clients: &[Client]) -> String {
    let mut s = String::new();
    for c in clients {
        s.push_str(&format!("{},{},{},{}\n", c.id, c.pos.x, c.pos.y, c.weight));
    }
    s
}

pub fn write_facilities(facilities: &[Facility]) -> String {
    let mut s = String::new();
    for f in facilities {
        match f.capacity {
            Some(c) => s.push_str(&format!("{},{},{},{}\n", f.id, f.pos.x, f.pos.y, c)),
            None => s.push_str(&format!("{},{},{}\n", f.id, f.pos.x, f.pos.y)),
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clients_with_optional_weight() {
        let cs = parse_clients("1,0.5,2\n# comment\n\n7, 3, 4, 2.5\n").unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].weight, 1.0);
        assert_eq!(cs[1].id, 7);
        assert_eq!(cs[1].weight, 2.5);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_clients("1,0,0\n2,zero,0\n").unwrap_err();
        assert!(matches!(err, ParseError::InvalidField { line: 2, .. }));
        let err = parse_facilities("1,0\n").unwrap_err();
        assert!(matches!(err, ParseError::FieldCount { line: 1, found: 2, .. }));
        let err = parse_clients("1,0,0\n1,2,2\n").unwrap_err();
        assert_eq!(err, ParseError::DuplicateId { line: 2, id: 1 });
        let err = parse_clients("1,nan,0\n").unwrap_err();
        assert!(matches!(err, ParseError::InvalidField { line: 1, .. }));
        let err = parse_clients("1,0,0,-1\n").unwrap_err();
        assert!(matches!(err, ParseError::InvalidField { what: "weight", .. }));
    }

    #[test]
    fn facilities_capacity_column() {
        let fs = parse_facilities("3,1,1,5\n4,2,2\n").unwrap();
        assert_eq!(fs[0].capacity, Some(5));
        assert_eq!(fs[1].capacity, None);
    }

    #[test]
    fn edges_are_normalized() {
        let es = parse_edges("2,1\n1,2\n3,3\n4,1\n").unwrap();
        assert_eq!(es, vec![(1, 2), (1, 4)]);
    }

    #[test]
    fn dataset_rejects_duplicates() {
        let c = Client {
            id: 1,
            pos: Point::new(0.0, 0.0),
            weight: 1.0,
        };
        let err = Dataset::new(vec![c, c], vec![], Mode::Monochromatic).unwrap_err();
        assert_eq!(err, DatasetError::DuplicateClient(1));
    }

    proptest! {
        #[test]
        fn client_csv_round_trip(pts in proptest::collection::vec((-1e6..1e6f64, -1e6..1e6f64, 0.0..10.0f64), 0..40)) {
            let clients: Vec<Client> = pts.iter().enumerate().map(|(i, &(x, y, w))| Client {
                id: i as u64 * 3,
                pos: Point::new(x, y),
                weight: w,
            }).collect();
            let back = parse_clients(&write_clients(&clients)).unwrap();
            prop_assert_eq!(back, clients);
        }

        #[test]
        fn parsers_never_panic(s in "\\PC{0,200}") {
            let _ = parse_clients(&s);
            let _ = parse_facilities(&s);
            let _ = parse_edges(&s);
            let _ = parse_capacities(&s);
        }
    }
}
