//! Brute-force batch number used as an independent check on [`super::Verifier`].
//!
//! Candidate sets are every nonempty `S ⊆ [N]` that passes the rank test of
//! [`LinearCode::recoverable`]; no dual enumeration and no minimality filter.
//! Packing is a plain depth-first search over request slots.

use crate::error::{Error, Result};
use crate::LinearCode;

use super::Multisets;

/// Largest block length the oracle accepts.
pub const ORACLE_MAX_LENGTH: usize = 10;

pub fn batch_number_oracle(code: &LinearCode) -> Result<usize> {
    let len = code.length();
    if len > ORACLE_MAX_LENGTH {
        return Err(Error::CapExceeded {
            what: "oracle block length",
            needed: len as u128,
            cap: ORACLE_MAX_LENGTH as u128,
            advice: "the brute-force oracle is for tiny codes only",
        });
    }
    let n = code.dimension();
    let candidates: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            (1u32..1 << len)
                .filter(|&s| {
                    let set: Vec<usize> = (0..len).filter(|b| s >> b & 1 == 1).collect();
                    code.recoverable(i, &set).is_some()
                })
                .collect()
        })
        .collect();

    let mut best = 0;
    for k in 1..=len {
        let ok = Multisets::new(n, k).all(|req| pack(&candidates, &req, 0, 0));
        if !ok {
            break;
        }
        best = k;
    }
    Ok(best)
}

fn pack(candidates: &[Vec<u32>], request: &[usize], slot: usize, used: u32) -> bool {
    if slot == request.len() {
        return true;
    }
    candidates[request[slot]]
        .iter()
        .any(|&s| s & used == 0 && pack(candidates, request, slot + 1, used | s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{replication, single_parity};
    use crate::field::Field;
    use crate::matrix::Matrix;

    #[test]
    fn oracle_examples() {
        let f = Field::gf2();
        assert_eq!(
            batch_number_oracle(&single_parity(f, 3).unwrap()).unwrap(),
            2
        );
        assert_eq!(
            batch_number_oracle(&replication(f, 2, 2).unwrap()).unwrap(),
            2
        );
        let id = LinearCode::from_generator(Matrix::identity(f, 3)).unwrap();
        assert_eq!(batch_number_oracle(&id).unwrap(), 1);
        assert!(batch_number_oracle(&replication(f, 3, 4).unwrap()).is_err());
    }
}
