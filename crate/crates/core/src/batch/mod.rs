//! Exact verification of the k-batch property.
//!
//! A code is k-batch when every multiset of `k` message indices can be served
//! by `k` pairwise disjoint recovery sets, each carrying a linear function
//! that reproduces its requested symbol. Candidate sets are the
//! inclusion-minimal recovery sets of each message symbol: the systematic
//! singleton `{i}` and the minimal sets `supp(d) \ {i}` over dual codewords
//! `d` with `d_i != 0`. Any feasible packing stays feasible after shrinking
//! each set to a minimal subset, so searching minimal sets is exact.

mod oracle;

use std::collections::HashSet;
use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rayon::prelude::*;

pub use crate::code::RecoverySet;
use crate::constructions::uniform_below;
use crate::error::{Error, Result};
use crate::{Config, LinearCode};

pub use oracle::batch_number_oracle;

/// Largest block length supported by the bitmask search.
pub const MAX_LENGTH: usize = 64;

/// A multiset of requested message indices, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BatchRequest {
    indices: Vec<usize>,
}

impl BatchRequest {
    /// Sorts `indices` and checks each lies in `0..n`.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange {
                index: bad + 1,
                bound: n,
            });
        }
        indices.sort_unstable();
        Ok(BatchRequest { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }
}

impl fmt::Display for BatchRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|i| (i + 1).to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// One recovery set per requested index, in request order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryPlan {
    pub request: BatchRequest,
    pub sets: Vec<RecoverySet>,
}

impl fmt::Display for RecoveryPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sets {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Why a plan fails validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanViolation {
    WrongLength { expected: usize, found: usize },
    TargetMismatch { slot: usize },
    EmptySet { slot: usize },
    Overlap { first: usize, second: usize },
    Recovery { slot: usize, cause: Error },
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanViolation::WrongLength { expected, found } => {
                write!(f, "plan has {found} sets for a request of size {expected}")
            }
            PlanViolation::TargetMismatch { slot } => {
                write!(f, "set {} targets the wrong symbol", slot + 1)
            }
            PlanViolation::EmptySet { slot } => write!(f, "set {} is empty", slot + 1),
            PlanViolation::Overlap { first, second } => {
                write!(f, "sets {} and {} overlap", first + 1, second + 1)
            }
            PlanViolation::Recovery { slot, cause } => {
                write!(f, "set {}: {cause}", slot + 1)
            }
        }
    }
}

/// Checks disjointness and every recovery identity on all generator rows.
pub fn validate_plan(
    code: &LinearCode,
    plan: &RecoveryPlan,
) -> std::result::Result<(), PlanViolation> {
    let req = plan.request.indices();
    if plan.sets.len() != req.len() {
        return Err(PlanViolation::WrongLength {
            expected: req.len(),
            found: plan.sets.len(),
        });
    }
    for (slot, (set, &target)) in plan.sets.iter().zip(req).enumerate() {
        if set.target != target {
            return Err(PlanViolation::TargetMismatch { slot });
        }
        if set.positions.is_empty() {
            return Err(PlanViolation::EmptySet { slot });
        }
        set.check(code)
            .map_err(|cause| PlanViolation::Recovery { slot, cause })?;
    }
    for a in 0..plan.sets.len() {
        for b in a + 1..plan.sets.len() {
            let pa = &plan.sets[a].positions;
            if plan.sets[b].positions.iter().any(|p| pa.contains(p)) {
                return Err(PlanViolation::Overlap {
                    first: a,
                    second: b,
                });
            }
        }
    }
    Ok(())
}

/// Outcome of an exhaustive k-batch check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BatchOutcome {
    Batch,
    Counterexample(BatchRequest),
}

impl BatchOutcome {
    pub fn is_batch(&self) -> bool {
        matches!(self, BatchOutcome::Batch)
    }
}

/// Outcome of a sampled check; never a proof of the batch property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SampleOutcome {
    NoCounterexample { samples: usize },
    Counterexample(BatchRequest),
}

/// Number of size-`k` multisets over `n` symbols, `C(n+k-1, k)`, saturating.
pub fn multiset_count(n: usize, k: usize) -> u128 {
    if n == 0 {
        return u128::from(k == 0);
    }
    let mut acc: u128 = 1;
    for j in 1..=k as u128 {
        acc = match acc.checked_mul(n as u128 - 1 + j) {
            Some(v) => v / j,
            None => return u128::MAX,
        };
    }
    acc
}

/// Size-`k` multisets over `0..n` as non-decreasing sequences in
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct Multisets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Multisets {
    pub fn new(n: usize, k: usize) -> Self {
        let current = if n == 0 && k > 0 {
            None
        } else {
            Some(vec![0; k])
        };
        Multisets { n, current }
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        if let Some(j) = next.iter().rposition(|&v| v + 1 < self.n) {
            let v = next[j] + 1;
            next[j..].iter_mut().for_each(|x| *x = v);
            self.current = Some(next);
        }
        Some(out)
    }
}

struct Candidate {
    set: RecoverySet,
    mask: u64,
}

fn lex_key(mask: u64) -> (u32, Vec<usize>) {
    let positions = (0..64).filter(|b| mask >> b & 1 == 1).collect();
    (mask.count_ones(), positions)
}

/// Batch verifier for one code, holding the minimal recovery sets of every
/// message symbol.
pub struct Verifier<'a> {
    code: &'a LinearCode,
    candidates: Vec<Vec<Candidate>>,
    config: Config,
    pool: Option<rayon::ThreadPool>,
}

impl<'a> Verifier<'a> {
    pub fn new(code: &'a LinearCode, config: Config) -> Result<Self> {
        let len = code.length();
        if len > MAX_LENGTH {
            return Err(Error::InvalidArgument(format!(
                "block length {len} exceeds the supported maximum of {MAX_LENGTH}"
            )));
        }
        let n = code.dimension();
        let mut through: Vec<HashSet<u64>> = vec![HashSet::new(); n];
        code.for_each_dual(config.dual_cap, |d| {
            let supp = d
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .fold(0u64, |m, (j, _)| m | 1 << j);
            for (i, sets) in through.iter_mut().enumerate() {
                if supp >> i & 1 == 1 {
                    sets.insert(supp & !(1 << i));
                }
            }
        })?;

        let mut candidates = Vec::with_capacity(n);
        for (i, sets) in through.into_iter().enumerate() {
            let mut masks: Vec<u64> = sets.into_iter().collect();
            masks.push(1 << i);
            masks.sort_by_cached_key(|&m| lex_key(m));
            let mut kept: Vec<u64> = Vec::new();
            for m in masks {
                if m != 0 && !kept.iter().any(|&k| k & !m == 0) {
                    kept.push(m);
                }
            }
            let cands = kept
                .into_iter()
                .map(|mask| {
                    let positions = lex_key(mask).1;
                    let set = code
                        .recoverable(i, &positions)
                        .expect("dual support yields a recovery set");
                    debug_assert_eq!(set.positions, positions);
                    Candidate { set, mask }
                })
                .collect();
            candidates.push(cands);
        }

        let pool = match config.threads {
            Some(t) if t > 1 => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?,
            ),
            _ => None,
        };
        Ok(Verifier {
            code,
            candidates,
            config,
            pool,
        })
    }

    pub fn code(&self) -> &LinearCode {
        self.code
    }

    /// Inclusion-minimal recovery sets of message symbol `i`, ordered by size
    /// and then lexicographically.
    pub fn minimal_recovery_sets(&self, i: usize) -> Vec<RecoverySet> {
        self.candidates[i].iter().map(|c| c.set.clone()).collect()
    }

    /// Finds a plan serving `request`, or `None` when no plan exists.
    pub fn serve(&self, request: &BatchRequest) -> Option<RecoveryPlan> {
        let k = request.k();
        if k > self.code.length() {
            return None;
        }
        let mut groups: Vec<Group> = Vec::new();
        for &i in request.indices() {
            match groups.last_mut() {
                Some(g) if g.target == i => g.remaining += 1,
                _ => groups.push(Group {
                    target: i,
                    remaining: 1,
                    start: 0,
                    chosen: Vec::new(),
                }),
            }
        }
        if !self.search(&mut groups, 0) {
            return None;
        }
        let sets = groups
            .iter()
            .flat_map(|g| {
                g.chosen
                    .iter()
                    .map(|&c| self.candidates[g.target][c].set.clone())
            })
            .collect();
        Some(RecoveryPlan {
            request: request.clone(),
            sets,
        })
    }

    fn search(&self, groups: &mut [Group], used: u64) -> bool {
        // Most constrained group first; prune when any group cannot be filled.
        let mut best: Option<(usize, usize)> = None;
        for (gi, g) in groups.iter().enumerate() {
            if g.remaining == 0 {
                continue;
            }
            let avail = self.candidates[g.target][g.start..]
                .iter()
                .filter(|c| c.mask & used == 0)
                .count();
            if avail < g.remaining {
                return false;
            }
            if best.is_none_or(|(_, a)| avail < a) {
                best = Some((gi, avail));
            }
        }
        let Some((gi, _)) = best else {
            return true;
        };
        let target = groups[gi].target;
        let start = groups[gi].start;
        for ci in start..self.candidates[target].len() {
            let mask = self.candidates[target][ci].mask;
            if mask & used != 0 {
                continue;
            }
            let g = &mut groups[gi];
            g.remaining -= 1;
            g.start = ci + 1;
            g.chosen.push(ci);
            if self.search(groups, used | mask) {
                return true;
            }
            let g = &mut groups[gi];
            g.chosen.pop();
            g.start = start;
            g.remaining += 1;
        }
        false
    }

    /// Exhaustively checks every size-`k` multiset; the counterexample
    /// reported is the lexicographically first one.
    pub fn is_k_batch(&self, k: usize) -> Result<BatchOutcome> {
        let n = self.code.dimension();
        if k == 0 {
            return Ok(BatchOutcome::Batch);
        }
        if k > self.code.length() {
            return Ok(BatchOutcome::Counterexample(BatchRequest {
                indices: vec![0; k],
            }));
        }
        let needed = multiset_count(n, k);
        if needed > self.config.multiset_cap {
            return Err(Error::CapExceeded {
                what: "request multisets",
                needed,
                cap: self.config.multiset_cap,
                advice: "use --sample for a sampled (non-exhaustive) check",
            });
        }
        let fails = |m: &Vec<usize>| {
            let req = BatchRequest { indices: m.clone() };
            self.serve(&req).is_none()
        };
        let mut all = Multisets::new(n, k);
        loop {
            let block: Vec<Vec<usize>> = all.by_ref().take(1 << 12).collect();
            if block.is_empty() {
                return Ok(BatchOutcome::Batch);
            }
            let found = match (&self.pool, self.config.threads) {
                (_, Some(1)) => block.iter().find(|m| fails(m)).cloned(),
                (Some(pool), _) => {
                    pool.install(|| block.par_iter().find_first(|m| fails(m)).cloned())
                }
                (None, _) => block.par_iter().find_first(|m| fails(m)).cloned(),
            };
            if let Some(indices) = found {
                return Ok(BatchOutcome::Counterexample(BatchRequest { indices }));
            }
        }
    }

    /// Checks `samples` multisets drawn with independent uniform indices.
    pub fn sample_k_batch(&self, k: usize, samples: usize, seed: u64) -> SampleOutcome {
        let n = self.code.dimension();
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        for _ in 0..samples {
            let mut indices: Vec<usize> = (0..k)
                .map(|_| uniform_below(&mut rng, n as u32) as usize)
                .collect();
            indices.sort_unstable();
            let req = BatchRequest { indices };
            if self.serve(&req).is_none() {
                return SampleOutcome::Counterexample(req);
            }
        }
        SampleOutcome::NoCounterexample { samples }
    }

    /// Largest `k <= min(N, max_k)` for which the code is k-batch. Relies on
    /// monotonicity: a (k+1)-batch code is k-batch.
    pub fn batch_number(&self, max_k: Option<usize>) -> Result<usize> {
        let limit = max_k.map_or(self.code.length(), |m| m.min(self.code.length()));
        let mut best = 0;
        for k in 1..=limit {
            if !self.is_k_batch(k)?.is_batch() {
                break;
            }
            best = k;
        }
        Ok(best)
    }
}

struct Group {
    target: usize,
    remaining: usize,
    start: usize,
    chosen: Vec<usize>,
}

/// Convenience wrapper around [`Verifier::minimal_recovery_sets`].
pub fn minimal_recovery_sets(
    code: &LinearCode,
    i: usize,
    config: &Config,
) -> Result<Vec<RecoverySet>> {
    if i >= code.dimension() {
        return Err(Error::IndexOutOfRange {
            index: i + 1,
            bound: code.dimension(),
        });
    }
    Ok(Verifier::new(code, config.clone())?.minimal_recovery_sets(i))
}

pub fn serve_request(
    code: &LinearCode,
    request: &BatchRequest,
    config: &Config,
) -> Result<Option<RecoveryPlan>> {
    Ok(Verifier::new(code, config.clone())?.serve(request))
}

pub fn is_k_batch(code: &LinearCode, k: usize, config: &Config) -> Result<BatchOutcome> {
    Verifier::new(code, config.clone())?.is_k_batch(k)
}

pub fn batch_number(code: &LinearCode, config: &Config) -> Result<usize> {
    Verifier::new(code, config.clone())?.batch_number(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{replication, single_parity};
    use crate::field::Field;
    use crate::matrix::Matrix;

    fn positions(sets: &[RecoverySet]) -> Vec<Vec<usize>> {
        sets.iter()
            .map(|s| s.positions.iter().map(|p| p + 1).collect())
            .collect()
    }

    fn req(code: &LinearCode, one_based: &[usize]) -> BatchRequest {
        BatchRequest::new(one_based.iter().map(|i| i - 1).collect(), code.dimension()).unwrap()
    }

    #[test]
    fn multiset_enumeration() {
        let all: Vec<_> = Multisets::new(3, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 1],
                vec![1, 2],
                vec![2, 2]
            ]
        );
        for n in 1..5 {
            for k in 0..5 {
                assert_eq!(Multisets::new(n, k).count() as u128, multiset_count(n, k));
            }
        }
        assert_eq!(multiset_count(0, 0), 1);
        assert_eq!(Multisets::new(0, 2).count(), 0);
    }

    #[test]
    fn minimal_sets_examples() {
        let cfg = Config::default();
        let sp = single_parity(Field::gf2(), 3).unwrap();
        let v = Verifier::new(&sp, cfg.clone()).unwrap();
        assert_eq!(
            positions(&v.minimal_recovery_sets(0)),
            vec![vec![1], vec![2, 3, 4]]
        );

        let rep = replication(Field::gf2(), 2, 3).unwrap();
        let v = Verifier::new(&rep, cfg.clone()).unwrap();
        assert_eq!(
            positions(&v.minimal_recovery_sets(0)),
            vec![vec![1], vec![3], vec![5]]
        );

        let id = LinearCode::from_generator(Matrix::identity(Field::gf2(), 2)).unwrap();
        assert_eq!(
            positions(&minimal_recovery_sets(&id, 0, &cfg).unwrap()),
            vec![vec![1]]
        );
        assert!(minimal_recovery_sets(&id, 2, &cfg).is_err());
    }

    #[test]
    fn serve_examples() {
        let sp = single_parity(Field::gf2(), 3).unwrap();
        let v = Verifier::new(&sp, Config::default()).unwrap();
        let plan = v.serve(&req(&sp, &[1, 1])).unwrap();
        assert_eq!(positions(&plan.sets), vec![vec![1], vec![2, 3, 4]]);
        validate_plan(&sp, &plan).unwrap();
        assert!(v.serve(&req(&sp, &[1, 1, 1])).is_none());
        let single = v.serve(&req(&sp, &[2])).unwrap();
        assert_eq!(positions(&single.sets), vec![vec![2]]);
    }

    #[test]
    fn k_batch_examples() {
        let cfg = Config::sequential();
        let sp = single_parity(Field::gf2(), 3).unwrap();
        assert!(is_k_batch(&sp, 2, &cfg).unwrap().is_batch());
        assert_eq!(
            is_k_batch(&sp, 3, &cfg).unwrap(),
            BatchOutcome::Counterexample(req(&sp, &[1, 1, 1]))
        );
        assert!(is_k_batch(&sp, 0, &cfg).unwrap().is_batch());
        assert!(!is_k_batch(&sp, 5, &cfg).unwrap().is_batch());
        let rep = replication(Field::gf2(), 2, 3).unwrap();
        assert!(is_k_batch(&rep, 3, &cfg).unwrap().is_batch());
    }

    #[test]
    fn batch_numbers() {
        let cfg = Config::default();
        let id = LinearCode::from_generator(Matrix::identity(Field::gf2(), 2)).unwrap();
        assert_eq!(batch_number(&id, &cfg).unwrap(), 1);
        assert_eq!(
            batch_number(&replication(Field::gf2(), 2, 3).unwrap(), &cfg).unwrap(),
            3
        );
        assert_eq!(
            batch_number(&single_parity(Field::gf2(), 3).unwrap(), &cfg).unwrap(),
            2
        );
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let code = crate::constructions::random_systematic(Field::gf2(), 4, 5, 11).unwrap();
        let seq = Verifier::new(&code, Config::sequential()).unwrap();
        let par = Verifier::new(
            &code,
            Config {
                threads: Some(3),
                ..Config::default()
            },
        )
        .unwrap();
        for k in 1..=5 {
            assert_eq!(seq.is_k_batch(k).unwrap(), par.is_k_batch(k).unwrap());
        }
    }

    #[test]
    fn multiset_cap_enforced() {
        let sp = single_parity(Field::gf2(), 3).unwrap();
        let cfg = Config {
            multiset_cap: 5,
            ..Config::default()
        };
        assert!(is_k_batch(&sp, 2, &cfg).unwrap_err().is_cap_exceeded());
        let v = Verifier::new(&sp, cfg).unwrap();
        assert_eq!(
            v.sample_k_batch(2, 50, 1),
            SampleOutcome::NoCounterexample { samples: 50 }
        );
        assert!(matches!(
            v.sample_k_batch(3, 200, 1),
            SampleOutcome::Counterexample(_)
        ));
    }

    #[test]
    fn dual_cap_enforced() {
        let code = replication(Field::gf2(), 2, 12).unwrap();
        let cfg = Config {
            dual_cap: 1 << 10,
            ..Config::default()
        };
        assert!(Verifier::new(&code, cfg).err().unwrap().is_cap_exceeded());
    }

    #[test]
    fn validate_plan_rejections() {
        let sp = single_parity(Field::gf2(), 3).unwrap();
        let request = req(&sp, &[1, 1]);
        let good = RecoverySet {
            target: 0,
            positions: vec![1, 2, 3],
            coefficients: vec![1, 1, 1],
        };
        let overlap = RecoveryPlan {
            request: request.clone(),
            sets: vec![good.clone(), good.clone()],
        };
        assert_eq!(
            validate_plan(&sp, &overlap),
            Err(PlanViolation::Overlap {
                first: 0,
                second: 1
            })
        );
        let wrong = RecoveryPlan {
            request,
            sets: vec![
                RecoverySet {
                    target: 0,
                    positions: vec![0],
                    coefficients: vec![1],
                },
                RecoverySet {
                    target: 0,
                    positions: vec![1, 2],
                    coefficients: vec![1, 1],
                },
            ],
        };
        assert_eq!(
            validate_plan(&sp, &wrong),
            Err(PlanViolation::Recovery {
                slot: 1,
                cause: Error::RecoveryFails { row: 1 }
            })
        );
    }
}
