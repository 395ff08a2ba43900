//! The dual-tensor redundancy argument, executed on a concrete code.
//!
//! For `t = floor(k/3)` and every decreasing tuple `i_1 > ... > i_t` of
//! message indices, serving the request that repeats each `i_j` three times
//! yields two dual codewords per `j` whose supports meet exactly in `{i_j}`.
//! Tensoring `2t` of them according to a good map gives an element of
//! `(C^⊥)^{⊗2t}` whose expansion contains few *good* basis tensors (index
//! multisets with `t` distinct values, each twice). A greedy pass then picks
//! a triangular, hence linearly independent, family whose size lower-bounds
//! `(N - n)^{2t}`.
//!
//! Tensors are only ever held in factored form; the good components are found
//! by walking the product of factor supports.

mod bound;
mod certificate;
mod power;

use std::collections::BTreeMap;

use crate::batch::{BatchRequest, Verifier};
use crate::code::DualCodeword;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::LinearCode;

pub use bound::{theorem_bound, TheoremBound};
pub use certificate::{
    greedy_family, verify_certificate, Certificate, CertificateFailure, FamilyRecord, Selection,
};
pub use power::{tensor_power_dim_check, TensorPowerCheck};

/// True iff the multiset of `indices` has exactly `t` distinct values, each
/// appearing exactly twice.
pub fn is_good_index(indices: &[usize], t: usize) -> bool {
    if indices.len() != 2 * t {
        return false;
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in indices {
        *counts.entry(i).or_default() += 1;
    }
    counts.len() == t && counts.values().all(|&c| c == 2)
}

/// `C(n, t) * (2t)! / 2^t`, the number of good tensors `e_{i_1..i_t,π}` with
/// decreasing indices. `None` on overflow.
pub fn good_count(n: usize, t: usize) -> Option<u128> {
    if t > n {
        return Some(0);
    }
    let mut binom: u128 = 1;
    for j in 0..t as u128 {
        binom = binom.checked_mul(n as u128 - j)? / (j + 1);
    }
    let mut multinomial: u128 = 1;
    for j in 1..=(2 * t) as u128 {
        multinomial = multinomial.checked_mul(j)?;
        if j % 2 == 0 {
            multinomial /= 2;
        }
    }
    binom.checked_mul(multinomial)
}

/// `3^t`, the per-tensor bound on good components. `None` on overflow.
pub fn three_pow(t: usize) -> Option<u128> {
    3u128.checked_pow(u32::try_from(t).ok()?)
}

/// A bijection `[2t] → [t] × [2]`, stored as its two coordinate maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoodMap {
    pi1: Vec<usize>,
    pi2: Vec<usize>,
}

impl GoodMap {
    pub fn new(pi1: Vec<usize>, pi2: Vec<usize>) -> Result<Self> {
        if pi1.len() != pi2.len() || !pi1.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "good map coordinates have lengths {} and {}",
                pi1.len(),
                pi2.len()
            )));
        }
        let t = pi1.len() / 2;
        let mut seen = vec![[false; 2]; t];
        for (&a, &b) in pi1.iter().zip(&pi2) {
            if a >= t || b >= 2 || seen[a][b] {
                return Err(Error::InvalidArgument(
                    "map is not a bijection onto [t] x [2]".into(),
                ));
            }
            seen[a][b] = true;
        }
        Ok(GoodMap { pi1, pi2 })
    }

    /// Completes `pi1` with the lexicographically least second coordinate:
    /// the first occurrence of each value gets 0, the second gets 1.
    pub fn canonical(pi1: Vec<usize>) -> Result<Self> {
        let t = pi1.len() / 2;
        let mut seen = vec![0usize; t.max(1)];
        let mut pi2 = Vec::with_capacity(pi1.len());
        for &a in &pi1 {
            if a >= t {
                return Err(Error::InvalidArgument(format!(
                    "pi1 value {} exceeds t = {t}",
                    a + 1
                )));
            }
            pi2.push(seen[a]);
            seen[a] += 1;
        }
        GoodMap::new(pi1, pi2)
    }

    pub fn t(&self) -> usize {
        self.pi1.len() / 2
    }

    pub fn pi1(&self) -> &[usize] {
        &self.pi1
    }

    pub fn pi2(&self) -> &[usize] {
        &self.pi2
    }
}

/// All sequences of length `2t` over `0..t` using each value exactly twice,
/// in lexicographic order.
pub fn first_coordinate_patterns(t: usize) -> Vec<Vec<usize>> {
    fn rec(t: usize, counts: &mut Vec<u8>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == 2 * t {
            out.push(cur.clone());
            return;
        }
        for v in 0..t {
            if counts[v] < 2 {
                counts[v] += 1;
                cur.push(v);
                rec(t, counts, cur, out);
                cur.pop();
                counts[v] -= 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(t, &mut vec![0; t], &mut Vec::with_capacity(2 * t), &mut out);
    out
}

/// All strictly decreasing `t`-tuples over `0..n`, in lexicographic order.
pub fn decreasing_tuples(n: usize, t: usize) -> Vec<Vec<usize>> {
    fn rec(bound: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in left - 1..bound {
            cur.push(v);
            rec(v, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if t <= n {
        rec(n, t, &mut Vec::with_capacity(t), &mut out);
    }
    out
}

/// Two dual codewords per index of a decreasing tuple, with supports meeting
/// exactly at that index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualPairFamily {
    field: Field,
    indices: Vec<usize>,
    pairs: Vec<[DualCodeword; 2]>,
}

impl DualPairFamily {
    /// Assembles a family from raw vectors and checks every structural
    /// property the counting argument needs.
    pub fn from_vectors(
        code: &LinearCode,
        indices: Vec<usize>,
        pairs: Vec<[Vec<u8>; 2]>,
    ) -> Result<Self> {
        let pairs = pairs
            .into_iter()
            .map(|[a, b]| Ok([code.dual_codeword(a)?, code.dual_codeword(b)?]))
            .collect::<Result<Vec<_>>>()?;
        let fam = DualPairFamily {
            field: code.field(),
            indices,
            pairs,
        };
        fam.check(code.dimension(), code.length())?;
        Ok(fam)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn pairs(&self) -> &[[DualCodeword; 2]] {
        &self.pairs
    }

    pub fn t(&self) -> usize {
        self.indices.len()
    }

    pub fn factor(&self, j: usize, l: usize) -> &DualCodeword {
        &self.pairs[j][l]
    }

    fn check(&self, n: usize, len: usize) -> Result<()> {
        let t = self.indices.len();
        if t == 0 || self.pairs.len() != t {
            return Err(Error::Inconsistent(format!(
                "family has {t} indices and {} pairs",
                self.pairs.len()
            )));
        }
        if self.indices.windows(2).any(|w| w[0] <= w[1]) || self.indices[0] >= n {
            return Err(Error::Inconsistent(
                "family indices must be strictly decreasing message indices".into(),
            ));
        }
        let mut owner: Vec<Option<(usize, usize)>> = vec![None; len];
        for (j, pair) in self.pairs.iter().enumerate() {
            let target = self.indices[j];
            for (l, c) in pair.iter().enumerate() {
                if !c.contains(target) {
                    return Err(Error::Inconsistent(format!(
                        "factor ({}, {}) misses its index {}",
                        j + 1,
                        l + 1,
                        target + 1
                    )));
                }
                for &p in c.support().iter().filter(|&&p| p != target) {
                    if let Some((j2, l2)) = owner[p] {
                        return Err(Error::Inconsistent(format!(
                            "coordinate {} lies in the recovery parts of factors ({}, {}) and ({}, {})",
                            p + 1,
                            j2 + 1,
                            l2 + 1,
                            j + 1,
                            l + 1
                        )));
                    }
                    owner[p] = Some((j, l));
                }
            }
        }
        Ok(())
    }
}

/// Serves the request `{i_j, i_j, i_j : j}` and keeps, for each `j`, the two
/// recovery sets that avoid `i_j` (the two smallest when all three do).
pub fn dual_pairs_for(verifier: &Verifier<'_>, indices: &[usize]) -> Result<DualPairFamily> {
    let code = verifier.code();
    let t = indices.len();
    if t == 0 {
        return Err(Error::VacuousTheorem(0));
    }
    let request = BatchRequest::new(
        indices.iter().flat_map(|&i| [i, i, i]).collect(),
        code.dimension(),
    )?;
    let plan = verifier.serve(&request).ok_or_else(|| Error::NotBatch {
        k: 3 * t,
        request: request.indices().iter().map(|i| i + 1).collect(),
    })?;
    let mut pairs = Vec::with_capacity(t);
    for &target in indices {
        let mut avoiding: Vec<_> = plan
            .sets
            .iter()
            .filter(|s| s.target == target && !s.positions.contains(&target))
            .collect();
        avoiding.sort_by(|a, b| {
            (a.positions.len(), &a.positions).cmp(&(b.positions.len(), &b.positions))
        });
        if avoiding.len() < 2 {
            return Err(Error::Inconsistent(format!(
                "plan has fewer than two sets avoiding {}",
                target + 1
            )));
        }
        pairs.push([
            code.recovery_to_dual(avoiding[0])?,
            code.recovery_to_dual(avoiding[1])?,
        ]);
    }
    let fam = DualPairFamily {
        field: code.field(),
        indices: indices.to_vec(),
        pairs,
    };
    fam.check(code.dimension(), code.length())?;
    Ok(fam)
}

/// The simple tensor `⊗_j c^{(π_1(j), π_2(j))}` in factored form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseTensorProduct {
    field: Field,
    indices: Vec<usize>,
    map: GoodMap,
    factors: Vec<DualCodeword>,
}

pub fn build_w(family: &DualPairFamily, map: &GoodMap) -> Result<SparseTensorProduct> {
    if map.t() != family.t() {
        return Err(Error::InvalidArgument(format!(
            "good map for t = {} applied to a family with t = {}",
            map.t(),
            family.t()
        )));
    }
    let factors = map
        .pi1
        .iter()
        .zip(&map.pi2)
        .map(|(&j, &l)| family.pairs[j][l].clone())
        .collect();
    Ok(SparseTensorProduct {
        field: family.field,
        indices: family.indices.clone(),
        map: map.clone(),
        factors,
    })
}

impl SparseTensorProduct {
    pub fn factors(&self) -> &[DualCodeword] {
        &self.factors
    }

    pub fn map(&self) -> &GoodMap {
        &self.map
    }

    pub fn t(&self) -> usize {
        self.map.t()
    }

    /// The good basis tensor `⊗_j e_{i_{π_1(j)}}` this product was built for.
    pub fn leading_index(&self) -> Vec<usize> {
        self.map.pi1.iter().map(|&j| self.indices[j]).collect()
    }

    /// Coefficient of the basis tensor at `multi_index`: the product of factor
    /// entries.
    pub fn coefficient(&self, multi_index: &[usize]) -> u8 {
        assert_eq!(multi_index.len(), self.factors.len());
        self.factors
            .iter()
            .zip(multi_index)
            .fold(1u8, |acc, (c, &i)| self.field.mul(acc, c.coefficient(i)))
    }

    /// All good multi-indices with nonzero coefficient, found by a pruned walk
    /// over the product of factor supports. Fails if more than `3^t` appear,
    /// which cannot happen for a valid family.
    pub fn good_components(&self) -> Result<BTreeMap<Vec<usize>, u8>> {
        let t = self.t();
        let mut out = BTreeMap::new();
        let mut counts: BTreeMap<usize, u8> = BTreeMap::new();
        let mut cur = Vec::with_capacity(2 * t);
        self.walk(t, &mut counts, &mut cur, 1, &mut out);
        let bound = three_pow(t).unwrap_or(u128::MAX);
        if out.len() as u128 > bound {
            return Err(Error::Inconsistent(format!(
                "{} good components exceed the bound 3^{t} = {bound}",
                out.len()
            )));
        }
        Ok(out)
    }

    fn walk(
        &self,
        t: usize,
        counts: &mut BTreeMap<usize, u8>,
        cur: &mut Vec<usize>,
        coeff: u8,
        out: &mut BTreeMap<Vec<usize>, u8>,
    ) {
        let pos = cur.len();
        if pos == 2 * t {
            if counts.len() == t && counts.values().all(|&c| c == 2) {
                out.insert(cur.clone(), coeff);
            }
            return;
        }
        let remaining = 2 * t - pos;
        let factor = &self.factors[pos];
        for &i in factor.support() {
            let c = counts.get(&i).copied().unwrap_or(0);
            if c == 2 || (c == 0 && counts.len() == t) {
                continue;
            }
            let singles_after =
                counts.values().filter(|&&v| v == 1).count() as isize + if c == 0 { 1 } else { -1 };
            if singles_after > remaining as isize - 1 {
                continue;
            }
            *counts.entry(i).or_default() += 1;
            cur.push(i);
            self.walk(
                t,
                counts,
                cur,
                self.field.mul(coeff, factor.coefficient(i)),
                out,
            );
            cur.pop();
            let e = counts.get_mut(&i).expect("present");
            *e -= 1;
            if *e == 0 {
                counts.remove(&i);
            }
        }
    }
}
