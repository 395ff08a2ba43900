//! Systematic linear codes, their duals, and the correspondence between
//! linear recovery functions and dual codewords.
//!
//! Coordinates are 0-based throughout the library. Text formats and the CLI
//! print them 1-based.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;

/// Default limit on `p^n` for exhaustive codeword enumeration.
pub const DEFAULT_CODEWORD_CAP: u128 = 1 << 22;

/// A linear code `C <= F^N` given by a generator `[I_n | A]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearCode {
    generator: Matrix,
    dual_basis: Matrix,
}

/// A vector in the dual code together with its support.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualCodeword {
    vector: Vec<u8>,
    support: Vec<usize>,
}

/// A linear recovery function: `sum_j coefficients[j] * c[positions[j]] = c[target]`
/// for every codeword `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RecoverySet {
    pub target: usize,
    pub positions: Vec<usize>,
    pub coefficients: Vec<u8>,
}

impl RecoverySet {
    /// Checks the recovery identity on every generator row, which suffices by
    /// linearity. Reports the first violating row.
    pub fn check(&self, code: &LinearCode) -> Result<()> {
        if self.positions.len() != self.coefficients.len() {
            return Err(Error::InvalidRecovery(format!(
                "{} positions but {} coefficients",
                self.positions.len(),
                self.coefficients.len()
            )));
        }
        let len = code.length();
        for &p in self.positions.iter().chain(std::iter::once(&self.target)) {
            if p >= len {
                return Err(Error::IndexOutOfRange {
                    index: p + 1,
                    bound: len,
                });
            }
        }
        let f = code.field();
        for (row_idx, row) in code.generator.row_iter().enumerate() {
            let value = self
                .positions
                .iter()
                .zip(&self.coefficients)
                .fold(0u8, |acc, (&p, &a)| f.add(acc, f.mul(a, row[p])));
            if value != row[self.target] {
                return Err(Error::RecoveryFails { row: row_idx + 1 });
            }
        }
        Ok(())
    }

    /// Bitmask of the positions; requires `N <= 64`.
    pub fn mask(&self) -> u64 {
        self.positions.iter().fold(0u64, |m, &p| m | (1u64 << p))
    }
}

impl fmt::Display for RecoverySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos: Vec<String> = self.positions.iter().map(|p| (p + 1).to_string()).collect();
        let coeffs: Vec<String> = self.coefficients.iter().map(u8::to_string).collect();
        write!(
            f,
            "{} <- {{{}}} : {}",
            self.target + 1,
            pos.join(","),
            coeffs.join(" ")
        )
    }
}

impl DualCodeword {
    pub fn vector(&self) -> &[u8] {
        &self.vector
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn contains(&self, i: usize) -> bool {
        self.support.binary_search(&i).is_ok()
    }

    pub fn coefficient(&self, i: usize) -> u8 {
        self.vector[i]
    }

    /// Inverse direction of [`LinearCode::recovery_to_dual`]: reads off the
    /// recovery function `c_i = sum_{j != i} (-d_j / d_i) c_j`.
    pub fn to_recovery(&self, field: Field, target: usize) -> Result<RecoverySet> {
        if !self.contains(target) {
            return Err(Error::NotInSupport { index: target + 1 });
        }
        let scale = field.neg(field.inv(self.vector[target])?);
        let positions: Vec<usize> = self
            .support
            .iter()
            .copied()
            .filter(|&j| j != target)
            .collect();
        let coefficients = positions
            .iter()
            .map(|&j| field.mul(self.vector[j], scale))
            .collect();
        Ok(RecoverySet {
            target,
            positions,
            coefficients,
        })
    }
}

fn support_of(v: &[u8]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, _)| i)
        .collect()
}

/// Runs `visit` on every `F`-linear combination of the rows of `basis`,
/// walking coefficient vectors as a little-endian odometer. Each step adds a
/// single row per changed digit, because wrapping a digit from `p-1` to `0`
/// also amounts to one more addition of that row.
pub(crate) fn for_each_combination<F: FnMut(&[u8])>(basis: &Matrix, mut visit: F) {
    let f = basis.field();
    let p = f.order();
    let mut digits = vec![0u8; basis.rows()];
    let mut acc = vec![0u8; basis.cols()];
    loop {
        visit(&acc);
        let mut j = 0;
        loop {
            if j == digits.len() {
                return;
            }
            for (a, &g) in acc.iter_mut().zip(basis.row(j)) {
                *a = f.add(*a, g);
            }
            digits[j] += 1;
            if digits[j] < p {
                break;
            }
            digits[j] = 0;
            j += 1;
        }
    }
}

/// `p^e` saturating at `u128::MAX`.
pub(crate) fn count_combinations(p: u8, e: usize) -> u128 {
    (0..e).fold(1u128, |acc, _| acc.saturating_mul(p as u128))
}

impl LinearCode {
    /// Accepts a generator whose first `n` columns form the identity.
    pub fn from_generator(generator: Matrix) -> Result<Self> {
        let n = generator.rows();
        let len = generator.cols();
        if n == 0 {
            return Err(Error::EmptyCode);
        }
        if len < n {
            return Err(Error::NotSystematic(format!(
                "{n} rows but only {len} columns"
            )));
        }
        for r in 0..n {
            for c in 0..n {
                let expect = u8::from(r == c);
                if generator.get(r, c) != expect {
                    return Err(Error::NotSystematic(format!(
                        "entry ({}, {}) is {}, expected {}",
                        r + 1,
                        c + 1,
                        generator.get(r, c),
                        expect
                    )));
                }
            }
        }
        let field = generator.field();
        let redundancy = len - n;
        let mut dual = Matrix::zeros(field, redundancy, len);
        for r in 0..redundancy {
            for c in 0..n {
                dual.set(r, c, field.neg(generator.get(c, n + r)));
            }
            dual.set(r, n + r, 1);
        }
        Ok(LinearCode {
            generator,
            dual_basis: dual,
        })
    }

    /// Row-reduces an arbitrary generator and permutes columns into
    /// `[I_r | A]`, dropping dependent rows. The returned permutation maps
    /// each new column to the original column it came from.
    pub fn systematize(generator: &Matrix) -> Result<(LinearCode, Vec<usize>)> {
        let red = generator.rref();
        if red.rank == 0 {
            return Err(Error::EmptyCode);
        }
        let mut perm = red.pivots.clone();
        perm.extend((0..generator.cols()).filter(|c| !red.pivots.contains(c)));
        let rows: Vec<Vec<u8>> = (0..red.rank)
            .map(|r| perm.iter().map(|&c| red.matrix.get(r, c)).collect())
            .collect();
        let g = Matrix::from_byte_rows(generator.field(), generator.cols(), &rows)?;
        Ok((LinearCode::from_generator(g)?, perm))
    }

    pub fn field(&self) -> Field {
        self.generator.field()
    }

    /// Number of message symbols `n`.
    pub fn dimension(&self) -> usize {
        self.generator.rows()
    }

    /// Block length `N`.
    pub fn length(&self) -> usize {
        self.generator.cols()
    }

    /// `N - n`, equal to the dimension of the dual code.
    pub fn redundancy(&self) -> usize {
        self.length() - self.dimension()
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn dual_basis(&self) -> &Matrix {
        &self.dual_basis
    }

    pub fn encode(&self, message: &[u8]) -> Vec<u8> {
        self.generator.left_mul(message)
    }

    pub fn is_dual_vector(&self, v: &[u8]) -> bool {
        v.len() == self.length()
            && self
                .generator
                .row_iter()
                .all(|g| self.field().dot(g, v) == 0)
    }

    /// Wraps `vector` as a dual codeword after checking orthogonality.
    pub fn dual_codeword(&self, vector: Vec<u8>) -> Result<DualCodeword> {
        if vector.len() != self.length() {
            return Err(Error::Dimension(format!(
                "vector has length {}, code has length {}",
                vector.len(),
                self.length()
            )));
        }
        if let Some(&bad) = vector.iter().find(|&&x| x >= self.field().order()) {
            return Err(Error::InvalidElement {
                value: bad as u32,
                p: self.field().order(),
            });
        }
        if let Some(row) = self
            .generator
            .row_iter()
            .position(|g| self.field().dot(g, &vector) != 0)
        {
            return Err(Error::InvalidRecovery(format!(
                "vector is not orthogonal to generator row {}",
                row + 1
            )));
        }
        let support = support_of(&vector);
        Ok(DualCodeword { vector, support })
    }

    /// Minimum Hamming weight of a nonzero codeword, by enumerating all `p^n`
    /// messages.
    pub fn min_distance(&self, cap: u128) -> Result<usize> {
        let needed = count_combinations(self.field().order(), self.dimension());
        if needed > cap {
            return Err(Error::CapExceeded {
                what: "codeword enumeration",
                needed,
                cap,
                advice: "use a smaller code or sample codewords instead",
            });
        }
        let mut best = usize::MAX;
        let mut first = true;
        for_each_combination(&self.generator, |c| {
            if first {
                first = false;
                return;
            }
            best = best.min(c.iter().filter(|&&x| x != 0).count());
        });
        Ok(best)
    }

    /// Enumerates every dual codeword (including zero) when `p^(N-n) <= cap`.
    pub fn for_each_dual<F: FnMut(&[u8])>(&self, cap: u128, visit: F) -> Result<()> {
        let needed = count_combinations(self.field().order(), self.redundancy());
        if needed > cap {
            return Err(Error::CapExceeded {
                what: "dual codeword enumeration",
                needed,
                cap,
                advice: "use a code with smaller redundancy",
            });
        }
        for_each_combination(&self.dual_basis, visit);
        Ok(())
    }

    /// Builds the dual codeword with `-1` at `target` and `coefficients[j]`
    /// at `positions[j]`, after checking that the recovery function really
    /// reproduces `c[target]`.
    pub fn recovery_to_dual(&self, recovery: &RecoverySet) -> Result<DualCodeword> {
        let mut sorted = recovery.positions.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != recovery.positions.len() {
            return Err(Error::InvalidRecovery("repeated position".into()));
        }
        if recovery.positions.contains(&recovery.target) {
            return Err(Error::InvalidRecovery(format!(
                "target {} lies inside its recovery set",
                recovery.target + 1
            )));
        }
        recovery.check(self)?;
        let f = self.field();
        let mut vector = vec![0u8; self.length()];
        vector[recovery.target] = f.neg(1);
        for (&p, &a) in recovery.positions.iter().zip(&recovery.coefficients) {
            vector[p] = a;
        }
        let support = support_of(&vector);
        Ok(DualCodeword { vector, support })
    }

    /// Decides whether `c[target]` is a linear function of `c` restricted to
    /// `set`, by solving `G_S g = G_target`. Returns the recovery function
    /// (with zero coefficients dropped) when it exists.
    pub fn recoverable(&self, target: usize, set: &[usize]) -> Option<RecoverySet> {
        if set.contains(&target) {
            return Some(RecoverySet {
                target,
                positions: vec![target],
                coefficients: vec![1],
            });
        }
        let sub = self.generator.select_columns(set);
        let rhs = self.generator.column(target);
        let g = sub.solve(&rhs)?;
        let (positions, coefficients) = set
            .iter()
            .zip(&g)
            .filter(|(_, &a)| a != 0)
            .map(|(&p, &a)| (p, a))
            .unzip();
        Some(RecoverySet {
            target,
            positions,
            coefficients,
        })
    }

    /// Parses the text format `q n N` followed by `n` rows of `N` integers.
    pub fn parse_generator(text: &str) -> Result<Matrix> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            column: 1,
            message: "empty code file".into(),
        })?;
        let header_vals = parse_ints(hl + 1, header)?;
        if header_vals.len() != 3 {
            return Err(Error::Parse {
                line: hl + 1,
                column: 1,
                message: format!("header needs `q n N`, found {} values", header_vals.len()),
            });
        }
        let (q, n, len) = (header_vals[0].1, header_vals[1].1, header_vals[2].1);
        let field = Field::new(u32::try_from(q).unwrap_or(u32::MAX)).map_err(|e| Error::Parse {
            line: hl + 1,
            column: header_vals[0].0,
            message: e.to_string(),
        })?;
        let (n, len) = (n as usize, len as usize);
        let mut rows = Vec::with_capacity(n);
        for r in 0..n {
            let (ln, line) = lines.next().ok_or(Error::Parse {
                line: text.lines().count() + 1,
                column: 1,
                message: format!("expected {n} generator rows, found {r}"),
            })?;
            let vals = parse_ints(ln + 1, line)?;
            if vals.len() != len {
                return Err(Error::Parse {
                    line: ln + 1,
                    column: vals.get(len).map_or(line.len() + 1, |v| v.0),
                    message: format!("expected {len} entries, found {}", vals.len()),
                });
            }
            let mut row = Vec::with_capacity(len);
            for (col, v) in vals {
                if v >= q {
                    return Err(Error::Parse {
                        line: ln + 1,
                        column: col,
                        message: format!("value {v} is not below q = {q}"),
                    });
                }
                row.push(v as u8);
            }
            rows.push(row);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::Parse {
                line: ln + 1,
                column: 1,
                message: format!("unexpected content after {n} generator rows"),
            });
        }
        Matrix::from_byte_rows(field, len, &rows)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_generator(Self::parse_generator(text)?)
    }

    /// Renders the code in the same text format [`LinearCode::parse`] reads.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {}\n",
            self.field().order(),
            self.dimension(),
            self.length()
        );
        out.push_str(&self.generator.to_string());
        out
    }
}

/// Splits a line into non-negative integers, tracking 1-based columns.
fn parse_ints(line_no: usize, line: &str) -> Result<Vec<(usize, u64)>> {
    let mut out = Vec::new();
    let mut start = None;
    for (idx, ch) in line
        .char_indices()
        .chain(std::iter::once((line.len(), ' ')))
    {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                let tok = &line[s..idx];
                let v = tok.parse::<u64>().map_err(|_| Error::Parse {
                    line: line_no,
                    column: s + 1,
                    message: format!("`{tok}` is not a non-negative integer"),
                })?;
                out.push((s + 1, v));
            }
        } else if start.is_none() {
            start = Some(idx);
        }
    }
    Ok(out)
}
