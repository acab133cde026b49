use crate::error::{Error, Result};

/// Maps a continuous vector to a single id: per-dimension bins found by
/// binary search over interior edges (values outside clip to the end bins),
/// combined in mixed radix with the first dimension most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretizer {
    edges: Vec<Vec<f64>>,
}

impl Discretizer {
    /// `edges[d]` are the interior, strictly increasing cut points of
    /// dimension `d`; it has `edges[d].len() + 1` bins.
    pub fn new(edges: Vec<Vec<f64>>) -> Result<Self> {
        for (d, e) in edges.iter().enumerate() {
            if e.windows(2).any(|w| !(w[0] < w[1])) || e.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config(format!(
                    "edges of dimension {d} must be finite and increasing"
                )));
            }
        }
        Ok(Self { edges })
    }

    /// `bins[d]` equal-width bins over `[lo, hi]` per dimension.
    pub fn uniform(ranges: &[(f64, f64)], bins: &[usize]) -> Result<Self> {
        if ranges.len() != bins.len() {
            return Err(Error::Config("one bin count per range required".into()));
        }
        let edges = ranges
            .iter()
            .zip(bins)
            .map(|(&(lo, hi), &n)| {
                if n == 0 || !(lo < hi) {
                    return Err(Error::Config(format!("bad bin spec {n} over [{lo}, {hi}]")));
                }
                let width = (hi - lo) / n as f64;
                Ok((1..n).map(|i| lo + width * i as f64).collect())
            })
            .collect::<Result<_>>()?;
        Self::new(edges)
    }

    pub fn dims(&self) -> usize {
        self.edges.len()
    }

    pub fn bins(&self, dim: usize) -> usize {
        self.edges[dim].len() + 1
    }

    pub fn total_states(&self) -> usize {
        (0..self.dims()).map(|d| self.bins(d)).product()
    }

    pub fn bin_indices(&self, x: &[f64]) -> Vec<usize> {
        debug_assert_eq!(x.len(), self.dims());
        self.edges
            .iter()
            .zip(x)
            .map(|(e, &v)| e.partition_point(|&edge| edge <= v))
            .collect()
    }

    pub fn encode(&self, indices: &[usize]) -> usize {
        indices
            .iter()
            .enumerate()
            .fold(0, |id, (d, &i)| id * self.bins(d) + i.min(self.bins(d) - 1))
    }

    pub fn decode(&self, mut id: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims()];
        for d in (0..self.dims()).rev() {
            out[d] = id % self.bins(d);
            id /= self.bins(d);
        }
        out
    }

    pub fn discretize(&self, x: &[f64]) -> usize {
        self.encode(&self.bin_indices(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> Discretizer {
        Discretizer::uniform(&[(-1.0, 1.0), (0.0, 3.0), (-2.0, 2.0)], &[2, 3, 4]).unwrap()
    }

    #[test]
    fn first_bin_centers_map_to_zero() {
        let d = grid();
        assert_eq!(d.total_states(), 24);
        assert_eq!(d.discretize(&[-0.5, 0.5, -1.5]), 0);
    }

    #[test]
    fn clipping_beyond_edges() {
        let d = grid();
        assert_eq!(d.bin_indices(&[100.0, -100.0, 1e9]), vec![1, 0, 3]);
        assert_eq!(d.discretize(&[f64::MAX, f64::MAX, f64::MAX]), 23);
    }

    #[test]
    fn bad_specs() {
        assert!(Discretizer::new(vec![vec![1.0, 0.0]]).is_err());
        assert!(Discretizer::uniform(&[(0.0, 1.0)], &[0]).is_err());
        assert!(Discretizer::uniform(&[(1.0, 1.0)], &[2]).is_err());
    }

    proptest! {
        #[test]
        fn mixed_radix_round_trip(a in 0usize..2, b in 0usize..3, c in 0usize..4) {
            let d = grid();
            let id = d.encode(&[a, b, c]);
            prop_assert!(id < d.total_states());
            prop_assert_eq!(d.decode(id), vec![a, b, c]);
        }

        #[test]
        fn every_point_gets_a_valid_id(x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0) {
            let d = grid();
            prop_assert!(d.discretize(&[x, y, z]) < d.total_states());
        }
    }
}
