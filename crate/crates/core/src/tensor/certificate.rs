//! Greedy triangular families and their standalone verification.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    build_w, decreasing_tuples, dual_pairs_for, first_coordinate_patterns, good_count,
    is_good_index, three_pow, DualPairFamily, GoodMap,
};
use crate::batch::Verifier;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::{Config, LinearCode};

/// Raw dual-pair family as recorded in a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyRecord {
    pub indices: Vec<usize>,
    pub pairs: Vec<[Vec<u8>; 2]>,
}

/// One greedy step: the basis tensor `e`, the good map of the selected
/// product, and the product's good-component table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub e: Vec<usize>,
    pub pi1: Vec<usize>,
    pub pi2: Vec<usize>,
    pub good: Vec<(Vec<usize>, u8)>,
}

/// Claimed evidence that `(N - n)^{2t} >= achieved`. All indices are 0-based
/// in memory and 1-based in the JSON form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub q: u8,
    pub n: usize,
    pub length: usize,
    pub generator: Vec<Vec<u8>>,
    pub k: usize,
    pub t: usize,
    pub families: Vec<FamilyRecord>,
    pub selections: Vec<Selection>,
    pub d_guarantee: u64,
    pub achieved: usize,
    pub rank: usize,
}

/// The first condition a certificate failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateFailure {
    pub condition: &'static str,
    pub detail: String,
}

impl fmt::Display for CertificateFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.condition, self.detail)
    }
}

fn fail<T>(
    condition: &'static str,
    detail: impl Into<String>,
) -> std::result::Result<T, CertificateFailure> {
    Err(CertificateFailure {
        condition,
        detail: detail.into(),
    })
}

/// Walks every good tensor `e_{i_1..i_t,π}` in a fixed order and selects the
/// product `w_{i_1..i_t,π}` for each one not already present in an earlier
/// selection. Order: decreasing index tuples lexicographically, then
/// first-coordinate patterns lexicographically; the second coordinate is
/// always the canonical one.
pub fn greedy_family(verifier: &Verifier<'_>, k: usize, config: &Config) -> Result<Certificate> {
    let code = verifier.code();
    let t = k / 3;
    if t == 0 {
        return Err(Error::VacuousTheorem(k));
    }
    let n = code.dimension();
    if t > n {
        return Err(Error::InvalidArgument(format!(
            "t = {t} exceeds the number of message symbols n = {n}"
        )));
    }
    let total = good_count(n, t).unwrap_or(u128::MAX);
    if total > config.tensor_cap {
        return Err(Error::CapExceeded {
            what: "good simple tensors",
            needed: total,
            cap: config.tensor_cap,
            advice: "use a smaller k or a code with fewer message symbols",
        });
    }
    let per_w = three_pow(t).expect("t is small under the tensor cap");
    let d_guarantee = total.div_ceil(per_w) as u64;

    let patterns = first_coordinate_patterns(t);
    let mut killed: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut families: Vec<DualPairFamily> = Vec::new();
    let mut selections = Vec::new();
    for tuple in decreasing_tuples(n, t) {
        let mut family: Option<usize> = None;
        for pi1 in &patterns {
            let e: Vec<usize> = pi1.iter().map(|&j| tuple[j]).collect();
            if killed.contains(&e) {
                continue;
            }
            let fi = match family {
                Some(fi) => fi,
                None => {
                    families.push(dual_pairs_for(verifier, &tuple)?);
                    family = Some(families.len() - 1);
                    families.len() - 1
                }
            };
            let map = GoodMap::canonical(pi1.clone())?;
            let w = build_w(&families[fi], &map)?;
            let good = w.good_components()?;
            match good.get(&e) {
                Some(&c) if c != 0 => {}
                _ => {
                    return Err(Error::Inconsistent(format!(
                        "product for {e:?} lacks its own leading component"
                    )))
                }
            }
            killed.extend(good.keys().cloned());
            selections.push(Selection {
                e,
                pi1: map.pi1().to_vec(),
                pi2: map.pi2().to_vec(),
                good: good.into_iter().collect(),
            });
        }
    }

    let achieved = selections.len();
    let rank = sparse_rank(code.field(), selections.iter().map(|s| s.good.as_slice()));
    let cert = Certificate {
        q: code.field().order(),
        n,
        length: code.length(),
        generator: code.generator().to_rows(),
        k,
        t,
        families: families
            .iter()
            .map(|f| FamilyRecord {
                indices: f.indices().to_vec(),
                pairs: f
                    .pairs()
                    .iter()
                    .map(|[a, b]| [a.vector().to_vec(), b.vector().to_vec()])
                    .collect(),
            })
            .collect(),
        selections,
        d_guarantee,
        achieved,
        rank,
    };
    if (achieved as u64) < d_guarantee || rank != achieved {
        return Err(Error::Inconsistent(format!(
            "greedy produced {achieved} selections of rank {rank} against a guarantee of {d_guarantee}"
        )));
    }
    Ok(cert)
}

/// Rank of sparse rows over `field`, by elimination on each row's smallest
/// column.
fn sparse_rank<'a, I>(field: Field, rows: I) -> usize
where
    I: IntoIterator<Item = &'a [(Vec<usize>, u8)]>,
{
    let mut columns: HashMap<&'a [usize], usize> = HashMap::new();
    let mut pivots: BTreeMap<usize, BTreeMap<usize, u8>> = BTreeMap::new();
    for row in rows {
        let mut r: BTreeMap<usize, u8> = BTreeMap::new();
        for (idx, v) in row {
            let next = columns.len();
            let col = *columns.entry(idx.as_slice()).or_insert(next);
            if *v != 0 {
                r.insert(col, *v);
            }
        }
        while let Some((&lead, &lv)) = r.iter().next() {
            match pivots.get(&lead) {
                Some(p) => {
                    for (&c, &pv) in p {
                        let cur = r.get(&c).copied().unwrap_or(0);
                        let nv = field.sub(cur, field.mul(lv, pv));
                        if nv == 0 {
                            r.remove(&c);
                        } else {
                            r.insert(c, nv);
                        }
                    }
                }
                None => {
                    let inv = field.inv(lv).expect("nonzero lead");
                    let normalized = r.iter().map(|(&c, &v)| (c, field.mul(v, inv))).collect();
                    pivots.insert(lead, normalized);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Rechecks a certificate against `code` from scratch: fingerprint,
/// parameters, every family, every good-component table, the triangular
/// order, and the rank of the selected products.
pub fn verify_certificate(
    cert: &Certificate,
    code: &LinearCode,
) -> std::result::Result<(), CertificateFailure> {
    let field = code.field();
    if cert.q != field.order()
        || cert.n != code.dimension()
        || cert.length != code.length()
        || cert.generator != code.generator().to_rows()
    {
        return fail("fingerprint", "certificate was issued for a different code");
    }
    let t = cert.t;
    if t == 0 || t != cert.k / 3 {
        return fail(
            "parameters",
            format!("t = {t} does not equal floor(k/3) for k = {}", cert.k),
        );
    }
    let Some(total) = good_count(cert.n, t) else {
        return fail("parameters", "good tensor count overflows");
    };
    let Some(per_w) = three_pow(t) else {
        return fail("parameters", "3^t overflows");
    };
    let expected_d = total.div_ceil(per_w);
    if cert.d_guarantee as u128 != expected_d {
        return fail(
            "guarantee",
            format!(
                "recorded {} but ceil(|E| / 3^t) = {expected_d}",
                cert.d_guarantee
            ),
        );
    }

    let mut families: BTreeMap<Vec<usize>, DualPairFamily> = BTreeMap::new();
    for (fi, rec) in cert.families.iter().enumerate() {
        if rec.indices.len() != t {
            return fail(
                "family",
                format!("family {} has {} indices", fi + 1, rec.indices.len()),
            );
        }
        let fam = DualPairFamily::from_vectors(code, rec.indices.clone(), rec.pairs.clone())
            .map_err(|e| CertificateFailure {
                condition: "family",
                detail: format!("family {}: {e}", fi + 1),
            })?;
        if families.insert(rec.indices.clone(), fam).is_some() {
            return fail(
                "family",
                format!("family {} duplicates an earlier one", fi + 1),
            );
        }
    }

    let mut tables: Vec<BTreeMap<Vec<usize>, u8>> = Vec::with_capacity(cert.selections.len());
    for (r, sel) in cert.selections.iter().enumerate() {
        let label = r + 1;
        let map =
            GoodMap::new(sel.pi1.clone(), sel.pi2.clone()).map_err(|e| CertificateFailure {
                condition: "good map",
                detail: format!("selection {label}: {e}"),
            })?;
        if map.t() != t || !is_good_index(&sel.e, t) {
            return fail(
                "selection",
                format!("selection {label} is not a good tensor for t = {t}"),
            );
        }
        let mut tuple = vec![usize::MAX; t];
        for (&j, &i) in sel.pi1.iter().zip(&sel.e) {
            if tuple[j] != usize::MAX && tuple[j] != i {
                return fail(
                    "selection",
                    format!("selection {label}: e is not indexed by pi1"),
                );
            }
            tuple[j] = i;
        }
        let Some(fam) = families.get(&tuple) else {
            return fail(
                "selection",
                format!("selection {label}: no family for indices {tuple:?}"),
            );
        };
        let w = build_w(fam, &map).map_err(|e| CertificateFailure {
            condition: "selection",
            detail: format!("selection {label}: {e}"),
        })?;
        let table = w.good_components().map_err(|e| CertificateFailure {
            condition: "good-component bound",
            detail: format!("selection {label}: {e}"),
        })?;
        let claimed: BTreeMap<Vec<usize>, u8> = sel.good.iter().cloned().collect();
        if claimed.len() != sel.good.len() || claimed != table {
            return fail(
                "component table",
                format!(
                    "selection {label}: recorded good components differ from the recomputed ones"
                ),
            );
        }
        if table.get(&sel.e).is_none_or(|&c| c == 0) {
            return fail(
                "leading component",
                format!("selection {label} does not contain its own e"),
            );
        }
        tables.push(table);
    }

    for (r, table) in tables.iter().enumerate() {
        if let Some(later) = cert.selections[r + 1..]
            .iter()
            .position(|s| table.contains_key(&s.e))
        {
            return fail(
                "triangularity",
                format!(
                    "selection {} contains e of later selection {}",
                    r + 1,
                    r + 2 + later
                ),
            );
        }
    }

    let achieved = cert.selections.len();
    if cert.achieved != achieved {
        return fail(
            "count",
            format!("recorded {} selections, found {achieved}", cert.achieved),
        );
    }
    if (achieved as u128) < expected_d {
        return fail(
            "guarantee",
            format!("{achieved} selections fall short of {expected_d}"),
        );
    }
    let rows: Vec<Vec<(Vec<usize>, u8)>> = tables
        .iter()
        .map(|t| t.clone().into_iter().collect())
        .collect();
    let rank = sparse_rank(field, rows.iter().map(Vec::as_slice));
    if rank != achieved || cert.rank != rank {
        return fail(
            "rank",
            format!(
                "rank {rank} (recorded {}) for {achieved} selections",
                cert.rank
            ),
        );
    }
    let dim_power = (code.redundancy() as u128).checked_pow(2 * t as u32);
    if dim_power.is_some_and(|p| p < achieved as u128) {
        return fail(
            "dimension bound",
            "more independent tensors than (N - n)^{2t}",
        );
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SelectionFile {
    e: Vec<usize>,
    pi1: Vec<usize>,
    pi2: Vec<usize>,
    good: Vec<GoodEntry>,
}

#[derive(Serialize, Deserialize)]
struct GoodEntry {
    index: Vec<usize>,
    coeff: u8,
}

#[derive(Serialize, Deserialize)]
struct FamilyFile {
    indices: Vec<usize>,
    pairs: Vec<[Vec<u8>; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateFile {
    q: u8,
    n: usize,
    #[serde(rename = "N")]
    length: usize,
    k: usize,
    t: usize,
    generator: Vec<Vec<u8>>,
    families: Vec<FamilyFile>,
    selections: Vec<SelectionFile>,
    d_guarantee: u64,
    achieved: usize,
    rank: usize,
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn zero_based(v: Vec<usize>, what: &str) -> Result<Vec<usize>> {
    v.into_iter()
        .map(|i| {
            i.checked_sub(1)
                .ok_or_else(|| Error::InvalidArgument(format!("{what} contains index 0")))
        })
        .collect()
}

impl Certificate {
    /// Deterministic single-line JSON with 1-based indices.
    pub fn to_json(&self) -> String {
        let file = CertificateFile {
            q: self.q,
            n: self.n,
            length: self.length,
            k: self.k,
            t: self.t,
            generator: self.generator.clone(),
            families: self
                .families
                .iter()
                .map(|f| FamilyFile {
                    indices: one_based(&f.indices),
                    pairs: f.pairs.clone(),
                })
                .collect(),
            selections: self
                .selections
                .iter()
                .map(|s| SelectionFile {
                    e: one_based(&s.e),
                    pi1: one_based(&s.pi1),
                    pi2: one_based(&s.pi2),
                    good: s
                        .good
                        .iter()
                        .map(|(index, coeff)| GoodEntry {
                            index: one_based(index),
                            coeff: *coeff,
                        })
                        .collect(),
                })
                .collect(),
            d_guarantee: self.d_guarantee,
            achieved: self.achieved,
            rank: self.rank,
        };
        let mut s = serde_json::to_string(&file).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        let file: CertificateFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let families = file
            .families
            .into_iter()
            .map(|f| {
                Ok(FamilyRecord {
                    indices: zero_based(f.indices, "family indices")?,
                    pairs: f.pairs,
                })
            })
            .collect::<Result<_>>()?;
        let selections = file
            .selections
            .into_iter()
            .map(|s| {
                Ok(Selection {
                    e: zero_based(s.e, "e")?,
                    pi1: zero_based(s.pi1, "pi1")?,
                    pi2: zero_based(s.pi2, "pi2")?,
                    good: s
                        .good
                        .into_iter()
                        .map(|g| Ok((zero_based(g.index, "good index")?, g.coeff)))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Certificate {
            q: file.q,
            n: file.n,
            length: file.length,
            generator: file.generator,
            k: file.k,
            t: file.t,
            families,
            selections,
            d_guarantee: file.d_guarantee,
            achieved: file.achieved,
            rank: file.rank,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{replication, single_parity};

    fn certify(code: &LinearCode, k: usize) -> Certificate {
        let v = Verifier::new(code, Config::default()).unwrap();
        greedy_family(&v, k, &Config::default()).unwrap()
    }

    #[test]
    fn replication_two_three() {
        let code = replication(Field::gf2(), 2, 3).unwrap();
        let cert = certify(&code, 3);
        assert_eq!(
            (cert.t, cert.d_guarantee, cert.achieved, cert.rank),
            (1, 1, 2, 2)
        );
        assert_eq!(cert.selections[0].good, vec![(vec![0, 0], 1)]);
        assert_eq!(cert.selections[1].good, vec![(vec![1, 1], 1)]);
        verify_certificate(&cert, &code).unwrap();
    }

    #[test]
    fn replication_three_six() {
        let code = replication(Field::gf2(), 3, 6).unwrap();
        let cert = certify(&code, 6);
        assert_eq!(cert.t, 2);
        assert_eq!(cert.d_guarantee, 2);
        assert!(cert.achieved >= 2);
        verify_certificate(&cert, &code).unwrap();
    }

    #[test]
    fn vacuous_and_non_batch() {
        let code = replication(Field::gf2(), 2, 3).unwrap();
        let v = Verifier::new(&code, Config::default()).unwrap();
        assert_eq!(
            greedy_family(&v, 2, &Config::default()),
            Err(Error::VacuousTheorem(2))
        );
        let sp = single_parity(Field::gf2(), 3).unwrap();
        let v = Verifier::new(&sp, Config::default()).unwrap();
        assert!(matches!(
            greedy_family(&v, 3, &Config::default()),
            Err(Error::NotBatch { .. })
        ));
        let capped = Config {
            tensor_cap: 1,
            ..Config::default()
        };
        let v = Verifier::new(&code, Config::default()).unwrap();
        assert!(greedy_family(&v, 3, &capped).unwrap_err().is_cap_exceeded());
    }

    #[test]
    fn tampering_is_detected() {
        let code = replication(Field::new(3).unwrap(), 2, 3).unwrap();
        let cert = certify(&code, 3);
        verify_certificate(&cert, &code).unwrap();

        let mut bad = cert.clone();
        bad.selections[0].good[0].1 = 2;
        assert_eq!(
            verify_certificate(&bad, &code).unwrap_err().condition,
            "component table"
        );

        let mut dup = cert.clone();
        dup.selections[1] = dup.selections[0].clone();
        assert_eq!(
            verify_certificate(&dup, &code).unwrap_err().condition,
            "triangularity"
        );

        let mut rank = cert.clone();
        rank.rank += 1;
        assert_eq!(
            verify_certificate(&rank, &code).unwrap_err().condition,
            "rank"
        );

        let mut fam = cert.clone();
        fam.families[0].pairs[0][0][0] = 0;
        assert_eq!(
            verify_certificate(&fam, &code).unwrap_err().condition,
            "family"
        );

        let other = replication(Field::new(3).unwrap(), 2, 4).unwrap();
        assert_eq!(
            verify_certificate(&cert, &other).unwrap_err().condition,
            "fingerprint"
        );
    }

    #[test]
    fn json_roundtrip_is_stable() {
        let code = replication(Field::gf2(), 3, 6).unwrap();
        let cert = certify(&code, 6);
        let text = cert.to_json();
        let back = Certificate::from_json(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_json(), text);
        assert!(text.contains("\"N\":18"));
        assert_eq!(text.lines().count(), 1);
        assert!(Certificate::from_json("{\"q\": 2}").is_err());
    }

    #[test]
    fn sparse_rank_detects_dependence() {
        let f = Field::new(5).unwrap();
        let a = vec![(vec![0usize], 1u8), (vec![1], 2)];
        let b = vec![(vec![0usize], 2u8), (vec![1], 4)];
        let c = vec![(vec![1usize], 1u8)];
        assert_eq!(sparse_rank(f, [a.as_slice(), b.as_slice()]), 1);
        assert_eq!(
            sparse_rank(f, [a.as_slice(), b.as_slice(), c.as_slice()]),
            2
        );
    }
}
