//! Dense check of `dim V^{⊗s} = (dim V)^s` on small subspaces.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Limit on the number of materialized product vectors.
pub const MAX_PRODUCTS: u128 = 1 << 12;
/// Limit on the ambient dimension `N^s`.
pub const MAX_AMBIENT: u128 = 1 << 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorPowerCheck {
    pub dim: usize,
    pub s: usize,
    pub rank: usize,
    pub expected: usize,
}

impl TensorPowerCheck {
    pub fn holds(&self) -> bool {
        self.rank == self.expected
    }
}

/// Materializes all `s`-fold tensor products of the rows of `basis` and
/// compares their rank against `rank(basis)^s`.
pub fn tensor_power_dim_check(basis: &Matrix, s: usize) -> Result<TensorPowerCheck> {
    if s == 0 {
        return Err(Error::InvalidArgument(
            "tensor power s must be positive".into(),
        ));
    }
    let rows = basis.rows() as u128;
    let len = basis.cols() as u128;
    let products = rows.checked_pow(s as u32).unwrap_or(u128::MAX);
    let ambient = len.checked_pow(s as u32).unwrap_or(u128::MAX);
    if products > MAX_PRODUCTS {
        return Err(Error::CapExceeded {
            what: "tensor power products",
            needed: products,
            cap: MAX_PRODUCTS,
            advice: "use a smaller subspace or power",
        });
    }
    if ambient > MAX_AMBIENT {
        return Err(Error::CapExceeded {
            what: "tensor power ambient dimension",
            needed: ambient,
            cap: MAX_AMBIENT,
            advice: "use a shorter ambient space or smaller power",
        });
    }
    let field = basis.field();
    let mut layer: Vec<Vec<u8>> = vec![vec![1]];
    for _ in 0..s {
        layer = layer
            .iter()
            .flat_map(|prefix| {
                basis.row_iter().map(move |row| {
                    prefix
                        .iter()
                        .flat_map(|&a| row.iter().map(move |&b| field.mul(a, b)))
                        .collect::<Vec<u8>>()
                })
            })
            .collect();
    }
    let dense = Matrix::from_byte_rows(field, ambient as usize, &layer)?;
    let dim = basis.rank();
    Ok(TensorPowerCheck {
        dim,
        s,
        rank: dense.rank(),
        expected: dim.pow(s as u32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn examples() {
        let f = Field::gf2();
        let v = Matrix::from_rows(f, &[[1, 1, 0], [0, 1, 1]]).unwrap();
        let c = tensor_power_dim_check(&v, 2).unwrap();
        assert_eq!((c.rank, c.expected), (4, 4));
        let line = Matrix::from_rows(f, &[[1, 0, 1]]).unwrap();
        for s in 1..=4 {
            assert_eq!(tensor_power_dim_check(&line, s).unwrap().rank, 1);
        }
        assert_eq!(tensor_power_dim_check(&v, 1).unwrap().rank, 2);
    }

    #[test]
    fn dependent_rows_use_true_dimension() {
        let f = Field::new(3).unwrap();
        let v = Matrix::from_rows(f, &[[1, 2, 0], [2, 1, 0]]).unwrap();
        let c = tensor_power_dim_check(&v, 2).unwrap();
        assert_eq!((c.dim, c.rank, c.expected), (1, 1, 1));
    }

    #[test]
    fn caps() {
        let v = Matrix::identity(Field::gf2(), 8);
        assert!(tensor_power_dim_check(&v, 7).unwrap_err().is_cap_exceeded());
        assert!(tensor_power_dim_check(&v, 0).is_err());
    }
}
