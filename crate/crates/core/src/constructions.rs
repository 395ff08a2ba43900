//! Baseline systematic code families used as test subjects.
//!
//! None of these carry an asserted batch number; the verifier computes it.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::LinearCode;

/// `m` consecutive copies of the message: coordinate `c*n + i` holds `x_i`.
pub fn replication(field: Field, n: usize, m: usize) -> Result<LinearCode> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument(
            "replication needs n >= 1 and m >= 1".into(),
        ));
    }
    let mut g = Matrix::zeros(field, n, n * m);
    for copy in 0..m {
        for i in 0..n {
            g.set(i, copy * n + i, 1);
        }
    }
    LinearCode::from_generator(g)
}

/// Appends one coordinate holding the sum of all message symbols.
pub fn single_parity(field: Field, n: usize) -> Result<LinearCode> {
    if n == 0 {
        return Err(Error::InvalidArgument("single parity needs n >= 1".into()));
    }
    let mut g = Matrix::zeros(field, n, n + 1);
    for i in 0..n {
        g.set(i, i, 1);
        g.set(i, n, 1);
    }
    LinearCode::from_generator(g)
}

/// An `s x s` message grid (row-major) followed by `s` row parities and then
/// `s` column parities.
pub fn grid_parity(field: Field, s: usize) -> Result<LinearCode> {
    if s < 2 {
        return Err(Error::InvalidArgument("grid parity needs s >= 2".into()));
    }
    let n = s * s;
    let mut g = Matrix::zeros(field, n, n + 2 * s);
    for a in 0..s {
        for b in 0..s {
            let i = a * s + b;
            g.set(i, i, 1);
            g.set(i, n + a, 1);
            g.set(i, n + s + b, 1);
        }
    }
    LinearCode::from_generator(g)
}

/// Deterministic stream of field elements.
///
/// ChaCha8 keyed with the seed as little-endian bytes `0..8` (remaining key
/// bytes zero), stream 0. Each element is drawn from successive `u32` outputs
/// by rejection: a draw `v` is accepted when `v < floor(2^32 / q) * q` and
/// yields `v mod q`.
pub struct ElementStream {
    rng: ChaCha8Rng,
    q: u32,
}

/// Uniform draw from `0..bound` by rejection on `u32` outputs.
pub(crate) fn uniform_below<R: RngCore>(rng: &mut R, bound: u32) -> u32 {
    let zone = ((1u64 << 32) / bound as u64) * bound as u64;
    loop {
        let v = rng.next_u32() as u64;
        if v < zone {
            return (v % bound as u64) as u32;
        }
    }
}

impl ElementStream {
    pub fn new(field: Field, seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        ElementStream {
            rng: ChaCha8Rng::from_seed(key),
            q: field.order() as u32,
        }
    }

    pub fn next_element(&mut self) -> u8 {
        uniform_below(&mut self.rng, self.q) as u8
    }
}

/// Generator `[I_n | A]` with `A` (`n x r`, row-major) drawn from
/// [`ElementStream`].
pub fn random_systematic(field: Field, n: usize, r: usize, seed: u64) -> Result<LinearCode> {
    if n == 0 {
        return Err(Error::InvalidArgument("random code needs n >= 1".into()));
    }
    let mut stream = ElementStream::new(field, seed);
    let mut g = Matrix::zeros(field, n, n + r);
    for i in 0..n {
        g.set(i, i, 1);
        for j in 0..r {
            g.set(i, n + j, stream.next_element());
        }
    }
    LinearCode::from_generator(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replication_shape() {
        let c = replication(Field::gf2(), 2, 3).unwrap();
        assert_eq!(
            c.generator().to_rows(),
            vec![vec![1, 0, 1, 0, 1, 0], vec![0, 1, 0, 1, 0, 1]]
        );
        let id = replication(Field::gf2(), 3, 1).unwrap();
        assert_eq!(id.redundancy(), 0);
        assert!(replication(Field::gf2(), 0, 2).is_err());
    }

    #[test]
    fn single_parity_shape() {
        let c = single_parity(Field::gf2(), 3).unwrap();
        assert_eq!(
            c.generator().to_rows(),
            vec![vec![1, 0, 0, 1], vec![0, 1, 0, 1], vec![0, 0, 1, 1]]
        );
        for n in 1..8 {
            assert_eq!(single_parity(Field::gf2(), n).unwrap().redundancy(), 1);
        }
    }

    #[test]
    fn grid_parity_shape() {
        let c = grid_parity(Field::gf2(), 2).unwrap();
        assert_eq!((c.dimension(), c.length()), (4, 8));
        // x_1 from its row sibling x_2 and the first row parity c_5.
        let r = c.recoverable(0, &[1, 4]).unwrap();
        assert_eq!(r.positions, vec![1, 4]);
        r.check(&c).unwrap();
        assert!(grid_parity(Field::gf2(), 1).is_err());
        let c3 = grid_parity(Field::new(3).unwrap(), 3).unwrap();
        assert_eq!((c3.dimension(), c3.length()), (9, 15));
    }

    #[test]
    fn random_is_deterministic() {
        let f = Field::new(5).unwrap();
        let a = random_systematic(f, 4, 3, 42).unwrap();
        let b = random_systematic(f, 4, 3, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_systematic(f, 4, 3, 43).unwrap());
        let id = random_systematic(Field::gf2(), 3, 0, 7).unwrap();
        assert_eq!(id.redundancy(), 0);
    }

    #[test]
    fn element_stream_is_roughly_uniform() {
        let f = Field::new(7).unwrap();
        let mut s = ElementStream::new(f, 3);
        let mut counts = [0usize; 7];
        for _ in 0..7000 {
            counts[s.next_element() as usize] += 1;
        }
        assert!(
            counts.iter().all(|&c| (800..1200).contains(&c)),
            "{counts:?}"
        );
    }
}
