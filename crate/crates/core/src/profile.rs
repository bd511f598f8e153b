use crate::config::DistanceKind;

/// Nearest-neighbor distance and position for every subsequence.
///
/// Entries without any admissible neighbor, and entries not yet reached by
/// an interrupted run, hold `f64::INFINITY` with no index.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixProfile {
    pub distances: Vec<f64>,
    pub nn_index: Vec<Option<usize>>,
    pub m: usize,
    pub kind: DistanceKind,
    /// False for anytime snapshots taken before every diagonal was scanned.
    pub complete: bool,
}

impl MatrixProfile {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    /// Sum of the finite distances; used as a cheap fingerprint in reports.
    pub fn checksum(&self) -> f64 {
        self.distances.iter().filter(|d| d.is_finite()).sum()
    }

    /// Position and distance of the closest pair (lowest profile value).
    pub fn motif(&self) -> Option<(usize, f64)> {
        self.finite_entries().min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Position and distance of the most isolated subsequence.
    pub fn discord(&self) -> Option<(usize, f64)> {
        self.finite_entries().max_by(|a, b| a.1.total_cmp(&b.1))
    }

    fn finite_entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.distances
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, d)| d.is_finite())
    }
}
