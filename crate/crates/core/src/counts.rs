//! Raw measurement records: computational-basis coincidence counts plus
//! parity tallies from the two-copy purity measurement.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Even/odd tallies from the beamsplitter parity measurement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityTally {
    pub even: u64,
    pub odd: u64,
}

impl ParityTally {
    pub fn total(&self) -> u64 {
        self.even + self.odd
    }
}

/// One experimental run: a `d x d` coincidence matrix (row = subsystem A
/// outcome, column = subsystem B outcome), parity tallies, and free-form
/// metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsRecord {
    pub d: usize,
    pub coincidences: Vec<Vec<u64>>,
    pub parity: ParityTally,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl CountsRecord {
    /// Checks the matrix shape and that the record is non-empty.
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.coincidences.len() != self.d {
            return Err(Error::BadShape {
                dim: self.d,
                len: self.coincidences.len(),
            });
        }
        for row in &self.coincidences {
            if row.len() != self.d {
                return Err(Error::BadShape {
                    dim: self.d,
                    len: row.len(),
                });
            }
        }
        if self.total_coincidences() == 0 {
            return Err(Error::ZeroCounts);
        }
        Ok(())
    }

    pub fn total_coincidences(&self) -> u64 {
        self.coincidences.iter().flatten().sum()
    }

    /// Correlated (diagonal) coincidence total.
    pub fn correlated_total(&self) -> u64 {
        (0..self.d).map(|k| self.coincidences[k][k]).sum()
    }

    pub fn uncorrelated_total(&self) -> u64 {
        self.total_coincidences() - self.correlated_total()
    }

    /// Off-diagonal counts in lexicographic `(i, j)` pair order, `i != j`.
    pub fn uncorrelated_counts(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.d * (self.d - 1));
        for i in 0..self.d {
            for j in 0..self.d {
                if i != j {
                    out.push(self.coincidences[i][j]);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_and_order() {
        let rec = CountsRecord {
            d: 2,
            coincidences: vec![vec![45, 5], vec![7, 43]],
            parity: ParityTally { even: 90, odd: 10 },
            metadata: BTreeMap::new(),
        };
        rec.validate().unwrap();
        assert_eq!(rec.total_coincidences(), 100);
        assert_eq!(rec.correlated_total(), 88);
        assert_eq!(rec.uncorrelated_total(), 12);
        assert_eq!(rec.uncorrelated_counts(), vec![5, 7]);
    }

    #[test]
    fn rejects_bad_shape_and_empty() {
        let rec = CountsRecord {
            d: 2,
            coincidences: vec![vec![1, 2, 3], vec![4, 5, 6]],
            parity: ParityTally::default(),
            metadata: BTreeMap::new(),
        };
        assert!(rec.validate().is_err());
        let empty = CountsRecord {
            d: 2,
            coincidences: vec![vec![0, 0], vec![0, 0]],
            parity: ParityTally::default(),
            metadata: BTreeMap::new(),
        };
        assert!(matches!(empty.validate(), Err(Error::ZeroCounts)));
    }
}
