//! Recursively constructed Walsh code matrix used to separate users.
//!
//! The order-2N matrix is built by the block recursion
//! `[[W, W], [W, -W]]` seeded with `W_1 = [1]`. Distinct rows have inner
//! product exactly zero, which is what removes inter-user interference in
//! flat channels. Entries are stored as small signed integers so that
//! orthogonality checks are exact.

use crate::error::{Error, Result};

/// Sylvester-ordered Walsh matrix of order `2^n` with entries in {+1, -1}.
///
/// Rows and columns are addressed 1-based in the public interface: user `K`
/// transmits bit `b` on row `2K - b`, so its two candidate rows are `2K`
/// (bit 0) and `2K - 1` (bit 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalshMatrix {
    order: usize,
    exponent: u32,
    entries: Vec<i8>,
}

impl WalshMatrix {
    /// Largest supported exponent (order 2^16). Orders above this have no
    /// use here and would only waste memory.
    pub const MAX_EXPONENT: u32 = 16;

    /// Builds `W_{2^n}`.
    ///
    /// `n` outside `0..=MAX_EXPONENT` is a usage error and panics before any
    /// allocation.
    pub fn generate(n: u32) -> Self {
        assert!(
            n <= Self::MAX_EXPONENT,
            "Walsh exponent {n} exceeds supported maximum {}",
            Self::MAX_EXPONENT
        );
        let order = 1usize << n;
        let mut entries = vec![1i8; order * order];
        let mut size = 1;
        while size < order {
            for r in 0..size {
                for c in 0..size {
                    let v = entries[r * order + c];
                    entries[r * order + c + size] = v;
                    entries[(r + size) * order + c] = v;
                    entries[(r + size) * order + c + size] = -v;
                }
            }
            size *= 2;
        }
        WalshMatrix {
            order,
            exponent: n,
            entries,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Row `i`, 1-based.
    pub fn row(&self, i: usize) -> Result<&[i8]> {
        if i == 0 || i > self.order {
            return Err(Error::IndexOutOfRange(format!(
                "Walsh row {i} not in 1..={}",
                self.order
            )));
        }
        let start = (i - 1) * self.order;
        Ok(&self.entries[start..start + self.order])
    }

    /// Row carrying `bit` for 1-based `user`: row `2*user - bit`.
    pub fn row_for(&self, user: usize, bit: u8) -> Result<&[i8]> {
        if bit > 1 {
            return Err(Error::Config(format!("bit must be 0 or 1, got {bit}")));
        }
        if user == 0 {
            return Err(Error::IndexOutOfRange("user index is 1-based".into()));
        }
        self.row(2 * user - usize::from(bit))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(a: &[i8], b: &[i8]) -> i64 {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| i64::from(x) * i64::from(y))
            .sum()
    }

    #[test]
    fn order_one_is_plus_one() {
        let w = WalshMatrix::generate(0);
        assert_eq!(w.order(), 1);
        assert_eq!(w.row(1).unwrap(), &[1]);
    }

    #[test]
    fn order_two_matches_recursion() {
        let w = WalshMatrix::generate(1);
        assert_eq!(w.row(1).unwrap(), &[1, 1]);
        assert_eq!(w.row(2).unwrap(), &[1, -1]);
    }

    #[test]
    fn first_row_all_ones() {
        for n in 0..=6 {
            let w = WalshMatrix::generate(n);
            assert!(w.row(1).unwrap().iter().all(|&v| v == 1));
        }
    }

    #[test]
    fn entries_are_signs() {
        let w = WalshMatrix::generate(5);
        assert!(w.entries.iter().all(|&v| v == 1 || v == -1));
    }

    // Brute-force inner products over all row pairs, n up to 6: exact
    // integer orthogonality, no tolerance.
    #[test]
    fn rows_orthogonal_up_to_order_64() {
        for n in 0..=6u32 {
            let w = WalshMatrix::generate(n);
            let order = w.order() as i64;
            for i in 1..=w.order() {
                for j in 1..=w.order() {
                    let d = dot(w.row(i).unwrap(), w.row(j).unwrap());
                    let expected = if i == j { order } else { 0 };
                    assert_eq!(d, expected, "n={n} rows {i},{j}");
                }
            }
        }
    }

    #[test]
    fn eight_order_pairs_all_zero() {
        // The 4-user system: all C(8,2) = 28 distinct pairs.
        let w = WalshMatrix::generate(3);
        let mut pairs = 0;
        for i in 1..8 {
            for j in (i + 1)..=8 {
                assert_eq!(dot(w.row(i).unwrap(), w.row(j).unwrap()), 0);
                pairs += 1;
            }
        }
        assert_eq!(pairs, 28);
    }

    #[test]
    fn specific_row_pair_dot_is_zero() {
        let w = WalshMatrix::generate(3);
        assert_eq!(dot(w.row(5).unwrap(), w.row(6).unwrap()), 0);
    }

    #[test]
    fn top_left_block_nests() {
        for n in 1..=6u32 {
            let big = WalshMatrix::generate(n);
            let small = WalshMatrix::generate(n - 1);
            for i in 1..=small.order() {
                assert_eq!(
                    &big.row(i).unwrap()[..small.order()],
                    small.row(i).unwrap(),
                    "n={n} row {i}"
                );
            }
        }
    }

    #[test]
    fn row_index_validation() {
        let w = WalshMatrix::generate(2);
        assert!(w.row(0).is_err());
        assert!(w.row(5).is_err());
        assert!(w.row(4).is_ok());
    }

    #[test]
    fn row_for_maps_user_and_bit() {
        let w = WalshMatrix::generate(3);
        // user K, bit b -> row 2K - b
        assert_eq!(w.row_for(1, 0).unwrap(), w.row(2).unwrap());
        assert_eq!(w.row_for(1, 1).unwrap(), w.row(1).unwrap());
        assert_eq!(w.row_for(4, 0).unwrap(), w.row(8).unwrap());
        assert!(w.row_for(1, 2).is_err());
        assert!(w.row_for(0, 0).is_err());
        assert!(w.row_for(5, 0).is_err());
    }

    #[test]
    fn candidate_rows_differ_in_half_the_positions() {
        // Orthogonal sign rows agree on exactly half the coordinates; the
        // GML metric regression tests rely on this.
        for n in 1..=4u32 {
            let w = WalshMatrix::generate(n);
            for user in 1..=(w.order() / 2) {
                let r0 = w.row_for(user, 0).unwrap();
                let r1 = w.row_for(user, 1).unwrap();
                let differing = r0.iter().zip(r1).filter(|(a, b)| a != b).count();
                assert_eq!(differing, w.order() / 2);
            }
        }
    }
}
