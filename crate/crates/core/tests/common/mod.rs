//! Code corpus shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use batchlab::constructions::{grid_parity, random_systematic, replication, single_parity};
use batchlab::{Field, LinearCode, Matrix};

/// Every systematic GF(2) code `[I_n | A]` of length `len`, one per `A`.
pub fn all_gf2_codes(n: usize, len: usize) -> impl Iterator<Item = LinearCode> {
    let r = len - n;
    (0u32..1 << (n * r)).map(move |bits| {
        let mut g = Matrix::zeros(Field::gf2(), n, len);
        for i in 0..n {
            g.set(i, i, 1);
            for j in 0..r {
                g.set(i, n + j, (bits >> (i * r + j) & 1) as u8);
            }
        }
        LinearCode::from_generator(g).unwrap()
    })
}

/// All systematic GF(2) codes with `n <= 3` and `N <= 6`.
pub fn exhaustive_gf2() -> Vec<LinearCode> {
    (1..=3)
        .flat_map(|n| (n..=6).flat_map(move |len| all_gf2_codes(n, len)))
        .collect()
}

/// The 100 seeded random GF(2) codes with `n <= 4` and `N <= 8`: seed `s`
/// gives `n = 1 + s mod 4` and `N - n = (s / 4) mod (9 - n)`.
pub fn seeded_gf2() -> Vec<(u64, LinearCode)> {
    (0..100u64)
        .map(|seed| {
            let n = 1 + (seed % 4) as usize;
            let r = (seed / 4 % (9 - n as u64)) as usize;
            (seed, random_systematic(Field::gf2(), n, r, seed).unwrap())
        })
        .collect()
}

/// Named codes: both sweeps above plus the construction families over
/// several fields.
pub fn corpus() -> Vec<(String, LinearCode)> {
    let mut out: Vec<(String, LinearCode)> = exhaustive_gf2()
        .into_iter()
        .enumerate()
        .map(|(i, c)| (format!("gf2-sweep-{i}"), c))
        .collect();
    out.extend(
        seeded_gf2()
            .into_iter()
            .map(|(s, c)| (format!("gf2-seed-{s}"), c)),
    );
    for q in [2u32, 3] {
        let f = Field::new(q).unwrap();
        for n in 1..=3 {
            for m in 1..=4 {
                out.push((
                    format!("replication-q{q}-{n}x{m}"),
                    replication(f, n, m).unwrap(),
                ));
            }
        }
    }
    for q in [2u32, 5] {
        let f = Field::new(q).unwrap();
        for n in 1..=6 {
            out.push((
                format!("single-parity-q{q}-{n}"),
                single_parity(f, n).unwrap(),
            ));
        }
    }
    out.push((
        "grid-parity-2".into(),
        grid_parity(Field::gf2(), 2).unwrap(),
    ));
    out.push((
        "grid-parity-3".into(),
        grid_parity(Field::gf2(), 3).unwrap(),
    ));
    for q in [3u32, 5] {
        let f = Field::new(q).unwrap();
        for seed in 0..10u64 {
            let n = 1 + (seed % 3) as usize;
            let r = 1 + (seed / 3 % 4) as usize;
            out.push((
                format!("random-q{q}-seed{seed}"),
                random_systematic(f, n, r, seed).unwrap(),
            ));
        }
    }
    out
}
