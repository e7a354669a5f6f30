use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A weight `w = (w_1, ..., w_m)` with non-negative integer entries.
///
/// For a tiling graph, `w_i` counts the internal faces of type `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<u32>);

impl WeightVector {
    pub fn zero(m: usize) -> Self {
        WeightVector(vec![0; m])
    }

    /// The basis vector `e_i`, with `i` 1-based.
    pub fn unit(m: usize, i: usize) -> Self {
        assert!((1..=m).contains(&i), "e_{i} is not a basis vector of Z^{m}");
        let mut v = vec![0; m];
        v[i - 1] = 1;
        WeightVector(v)
    }

    pub fn from_vec(v: Vec<u32>) -> Self {
        WeightVector(v)
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    /// `w_i`, 1-based.
    pub fn get(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// `Some(i)` when the vector is `e_i`.
    pub fn as_unit(&self) -> Option<usize> {
        if self.total() != 1 {
            return None;
        }
        self.0.iter().position(|&x| x == 1).map(|p| p + 1)
    }

    pub(crate) fn increment(&mut self, i: usize) {
        self.0[i - 1] += 1;
    }

    pub fn checked_sub(&self, other: &WeightVector) -> Option<WeightVector> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(WeightVector)
    }

    /// Every decomposition `self = u + v` with `u, v >= 0`, as `(u, v)`.
    pub fn splits(&self) -> Vec<(WeightVector, WeightVector)> {
        let mut out = Vec::new();
        let mut v = vec![0u32; self.0.len()];
        loop {
            let vv = WeightVector(v.clone());
            let u = self.checked_sub(&vv).expect("v <= w componentwise");
            out.push((u, vv));
            // odometer over 0..=w_i
            let mut k = 0;
            loop {
                if k == v.len() {
                    return out;
                }
                if v[k] < self.0[k] {
                    v[k] += 1;
                    break;
                }
                v[k] = 0;
                k += 1;
            }
        }
    }

    /// All weight vectors in `Z^m_{>=0}` with total at most `bound`, sorted.
    pub fn all_up_to(m: usize, bound: u32) -> Vec<WeightVector> {
        fn rec(m: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<WeightVector>) {
            if prefix.len() == m {
                out.push(WeightVector(prefix.clone()));
                return;
            }
            for x in 0..=left {
                prefix.push(x);
                rec(m, left - x, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(m, bound, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for WeightVector {
    type Err = String;

    /// Comma-separated entries, e.g. `0,0,1,2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<u32>()
                    .map_err(|_| format!("invalid weight entry '{}'", x.trim()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(WeightVector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_enumerate_all_pairs() {
        let w = WeightVector::from_vec(vec![1, 0, 2]);
        let s = w.splits();
        assert_eq!(s.len(), 6);
        for (u, v) in &s {
            let sum: Vec<u32> = u.0.iter().zip(&v.0).map(|(a, b)| a + b).collect();
            assert_eq!(sum, w.0);
        }
        assert_eq!(WeightVector::zero(4).splits().len(), 1);
    }

    #[test]
    fn bounded_weights() {
        assert_eq!(WeightVector::all_up_to(4, 1).len(), 5);
        assert_eq!(WeightVector::all_up_to(3, 2).len(), 10);
    }

    #[test]
    fn parse_and_units() {
        let w: WeightVector = "0,0,1".parse().unwrap();
        assert_eq!(w.as_unit(), Some(3));
        assert_eq!(w.to_string(), "0,0,1");
        assert!("0,x".parse::<WeightVector>().is_err());
        assert_eq!(WeightVector::from_vec(vec![0, 2]).as_unit(), None);
    }
}
