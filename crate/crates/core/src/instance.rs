//! Random cost tensors with i.i.d. Exp(1) entries.
//!
//! Entries are laid out row-major with the first coordinate slowest, so the
//! cell `(i, j, k)` of a 3-dimensional tensor lives at `(i * n + j) * n + k`.
//!
//! Draws come from a ChaCha8 stream keyed by the tensor seed. The original
//! tensor uses stream 0, one 64-bit word pair per entry in index order; the
//! fresh draw that replaces entry `v` during refresh number `e` is the word
//! pair at position `v` of stream `e`. Resampling one entry therefore never
//! shifts the draws of any other entry.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Maximum number of cells a tensor may hold.
pub const MAX_ENTRIES: u64 = 1 << 31;

pub type Triple = [usize; 3];

/// Maps a raw 64-bit word to Exp(1) by inverse transform, `-ln(1 - u)` with
/// `u` uniform on `[0, 1)` at 53-bit resolution.
#[inline]
pub fn exp1_from_bits(bits: u64) -> f64 {
    let u = (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    0.0 - (-u).ln_1p()
}

/// Sequential Exp(1) draws reproducing the pristine entries of a tensor.
///
/// Lets bounds over huge tensors be computed without materializing them.
pub struct EntryStream {
    rng: ChaCha8Rng,
}

impl EntryStream {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0);
        Self { rng }
    }
}

impl Iterator for EntryStream {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        Some(exp1_from_bits(self.rng.next_u64()))
    }
}

/// Cumulative bookkeeping for refreshes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RefreshLedger {
    /// Total offset `W`, the sum of all refresh thresholds so far.
    pub offset: f64,
    pub epoch: u64,
    pub thresholds: Vec<f64>,
}

impl RefreshLedger {
    fn record(&mut self, w: f64) {
        self.offset += w;
        self.epoch += 1;
        self.thresholds.push(w);
    }
}

/// Cloning shares the pristine entries; refreshed values are per clone.
#[derive(Debug, Clone)]
pub struct CostTensor {
    n: usize,
    d: usize,
    seed: u64,
    pristine: Arc<[f64]>,
    // Allocated on the first refresh; until then the current values are the
    // pristine ones.
    refreshed: Option<Vec<f64>>,
    ledger: RefreshLedger,
}

/// Number of cells of an `n^d` tensor, or the error `generate` would return.
pub fn checked_len(n: usize, d: usize) -> Result<usize> {
    if n == 0 {
        return Err(invalid("side length n must be positive"));
    }
    if d < 2 {
        return Err(invalid(format!("dimension d must be at least 2, got {d}")));
    }
    let mut len: u64 = 1;
    for _ in 0..d {
        len = len.saturating_mul(n as u64);
        if len > MAX_ENTRIES {
            return Err(Error::InstanceTooLarge {
                n,
                d,
                limit: MAX_ENTRIES,
            });
        }
    }
    Ok(len as usize)
}

impl CostTensor {
    pub fn generate(n: usize, d: usize, seed: u64) -> Result<Self> {
        let len = checked_len(n, d)?;
        let pristine: Arc<[f64]> = EntryStream::new(seed).take(len).collect();
        Ok(Self {
            n,
            d,
            seed,
            pristine,
            refreshed: None,
            ledger: RefreshLedger::default(),
        })
    }

    /// Builds a tensor from explicit entries. Used for hand-made instances.
    pub fn from_values(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        let len = checked_len(n, d)?;
        if values.len() != len {
            return Err(invalid(format!(
                "expected {len} entries, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid(format!(
                "entries must be finite and nonnegative, found {bad}"
            )));
        }
        Ok(Self {
            n,
            d,
            seed: 0,
            pristine: values.into(),
            refreshed: None,
            ledger: RefreshLedger::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn ledger(&self) -> &RefreshLedger {
        &self.ledger
    }

    pub fn len(&self) -> usize {
        self.pristine.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pristine.is_empty()
    }

    /// Current (possibly refreshed) entries.
    pub fn values(&self) -> &[f64] {
        self.refreshed.as_deref().unwrap_or(&self.pristine)
    }

    /// Entries as originally drawn.
    pub fn pristine(&self) -> &[f64] {
        &self.pristine
    }

    pub fn require_dim(&self, d: usize) -> Result<()> {
        if self.d == d {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: d,
                got: self.d,
            })
        }
    }

    #[inline]
    pub fn index3(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert_eq!(self.d, 3);
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn value3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values()[self.index3(i, j, k)]
    }

    #[inline]
    pub fn pristine3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.pristine[self.index3(i, j, k)]
    }

    /// The `n x n` slice of current values with first coordinate `i`.
    pub fn plane(&self, i: usize) -> &[f64] {
        let m = self.n * self.n;
        &self.values()[i * m..(i + 1) * m]
    }

    /// The `n x n` slice of pristine values with first coordinate `i`.
    pub fn pristine_plane(&self, i: usize) -> &[f64] {
        let m = self.n * self.n;
        &self.pristine[i * m..(i + 1) * m]
    }

    pub fn flat_index(&self, cell: &[usize]) -> Result<usize> {
        if cell.len() != self.d {
            return Err(invalid(format!(
                "cell has {} coordinates, tensor has d = {}",
                cell.len(),
                self.d
            )));
        }
        let mut idx = 0usize;
        for &c in cell {
            if c >= self.n {
                return Err(invalid(format!(
                    "coordinate {c} out of bounds for n = {}",
                    self.n
                )));
            }
            idx = idx * self.n + c;
        }
        Ok(idx)
    }

    /// Memoryless refresh with threshold `w_prev`: entries at or below the
    /// threshold are redrawn, the rest are shifted down by it, and the ledger
    /// offset grows by `w_prev`. Keeps `pristine <= values + ledger.offset`.
    pub fn refresh(&mut self, w_prev: f64) -> Result<()> {
        if !w_prev.is_finite() || w_prev < 0.0 {
            return Err(invalid(format!(
                "refresh threshold must be finite and nonnegative, got {w_prev}"
            )));
        }
        let epoch = self.ledger.epoch + 1;
        if w_prev > 0.0 {
            let values = self.refreshed.get_or_insert_with(|| self.pristine.to_vec());
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(epoch);
            for (v, x) in values.iter_mut().enumerate() {
                if *x <= w_prev {
                    rng.set_word_pos(2 * v as u128);
                    *x = exp1_from_bits(rng.next_u64());
                } else {
                    *x -= w_prev;
                }
            }
        }
        self.ledger.record(w_prev);
        Ok(())
    }

    /// Sum of pristine entries over the given cells.
    pub fn true_cost<C: AsRef<[usize]>>(&self, cells: &[C]) -> Result<f64> {
        cells.iter().try_fold(0.0, |acc, c| {
            Ok(acc + self.pristine[self.flat_index(c.as_ref())?])
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let t = CostTensor::generate(1, 3, 7).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.pristine()[0] >= 0.0);
    }

    #[test]
    fn deterministic_in_seed() {
        let a = CostTensor::generate(2, 3, 42).unwrap();
        let b = CostTensor::generate(2, 3, 42).unwrap();
        let c = CostTensor::generate(2, 3, 43).unwrap();
        assert_eq!(a.pristine(), b.pristine());
        assert_ne!(a.pristine(), c.pristine());
    }

    #[test]
    fn stream_matches_tensor() {
        let t = CostTensor::generate(5, 4, 11).unwrap();
        let s: Vec<f64> = EntryStream::new(11).take(t.len()).collect();
        assert_eq!(t.pristine(), &s[..]);
    }

    #[test]
    fn size_guard() {
        assert!(matches!(
            CostTensor::generate(1291, 3, 0),
            Err(Error::InstanceTooLarge { .. })
        ));
        assert!(matches!(
            CostTensor::generate(0, 3, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            CostTensor::generate(4, 1, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn inverse_transform_endpoints() {
        assert_eq!(exp1_from_bits(0), 0.0);
        assert!(exp1_from_bits(0).is_sign_positive());
        let top = exp1_from_bits(u64::MAX);
        assert!(top.is_finite() && (top - 53.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn zero_refresh_is_identity() {
        let mut t = CostTensor::generate(4, 3, 1).unwrap();
        let before = t.values().to_vec();
        t.refresh(0.0).unwrap();
        assert_eq!(t.values(), &before[..]);
        assert_eq!(t.ledger().offset, 0.0);
        assert_eq!(t.ledger().epoch, 1);
    }

    #[test]
    fn refresh_shifts_large_entries() {
        let mut vals = vec![0.3; 8];
        vals[0] = 5.0;
        let mut t = CostTensor::from_values(2, 3, vals).unwrap();
        t.refresh(1.0).unwrap();
        assert_eq!(t.values()[0], 4.0);
        assert_eq!(t.ledger().offset, 1.0);
        for (p, v) in t.pristine().iter().zip(t.values()) {
            assert!(*p <= v + t.ledger().offset);
        }
    }

    #[test]
    fn refresh_rejects_negative() {
        let mut t = CostTensor::generate(2, 3, 0).unwrap();
        assert!(t.refresh(-1.0).is_err());
        assert!(t.refresh(f64::NAN).is_err());
        assert_eq!(t.ledger().epoch, 0);
    }

    #[test]
    fn ledger_sums_thresholds() {
        let mut t = CostTensor::generate(6, 3, 9).unwrap();
        for w in [0.1, 0.0, 0.5, 0.25] {
            t.refresh(w).unwrap();
        }
        let l = t.ledger();
        assert_eq!(l.epoch as usize, l.thresholds.len());
        assert_eq!(l.offset, l.thresholds.iter().sum::<f64>());
    }

    #[test]
    fn true_cost_basics() {
        let t = CostTensor::generate(3, 3, 5).unwrap();
        let empty: [Triple; 0] = [];
        assert_eq!(t.true_cost(&empty).unwrap(), 0.0);
        assert_eq!(t.true_cost(&[[0, 0, 0]]).unwrap(), t.pristine3(0, 0, 0));
        assert!(t.true_cost(&[[0, 3, 0]]).is_err());
        assert!(t.true_cost(&[[0, 0]]).is_err());
    }
}
