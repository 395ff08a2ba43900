//! Closed-form redundancy bounds implied by the tensor argument.

use std::f64::consts::E;

/// Redundancy lower bounds for a k-batch code with `n` message symbols and
/// block length `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoremBound {
    pub t: usize,
    /// `sqrt(2 n t / (3 e^2))`, present when `t >= 1`.
    pub explicit: Option<f64>,
    /// `N / 2`, present when `n <= N / 2` (then `N - n >= N / 2` outright).
    pub fallback: Option<f64>,
    /// The distance-based claim "redundancy at least k".
    pub easy_distance: usize,
    /// What minimum distance `k` proves through the Singleton bound: `k - 1`.
    pub singleton: usize,
}

impl TheoremBound {
    /// Largest of the bounds that hold for every k-batch code: the explicit
    /// tensor bound, the fallback and the Singleton value.
    pub fn proven_minimum(&self) -> f64 {
        [self.explicit, self.fallback, Some(self.singleton as f64)]
            .into_iter()
            .flatten()
            .fold(0.0, f64::max)
    }
}

/// From `(dim V)^{2t} >= n^t t^t / (3e^2/2)^t` with `t = floor(k/3)`.
pub fn theorem_bound(n: usize, length: usize, k: usize) -> TheoremBound {
    let t = k / 3;
    let explicit = (t >= 1).then(|| (2.0 * n as f64 * t as f64 / (3.0 * E * E)).sqrt());
    let fallback = (2 * n <= length).then(|| length as f64 / 2.0);
    TheoremBound {
        t,
        explicit,
        fallback,
        easy_distance: k,
        singleton: k.saturating_sub(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{good_count, three_pow};

    #[test]
    fn examples() {
        let b = theorem_bound(100, 200, 9);
        assert_eq!(b.t, 3);
        assert!(
            (b.explicit.unwrap() - 5.202601).abs() < 1e-6,
            "{:?}",
            b.explicit
        );
        let b = theorem_bound(4, 10, 3);
        assert!(
            (b.explicit.unwrap() - 0.600745).abs() < 1e-6,
            "{:?}",
            b.explicit
        );
        assert_eq!(b.fallback, Some(5.0));
        let b = theorem_bound(1, 4, 2);
        assert_eq!(b.explicit, None);
        assert_eq!(b.fallback, Some(2.0));
        assert_eq!(theorem_bound(3, 4, 2).fallback, None);
        assert_eq!(b.singleton, 1);
    }

    // The chain |E| / 3^t >= n^t t^t / (3e^2/2)^t behind the closed form.
    #[test]
    fn counting_chain_holds() {
        for n in 1..40usize {
            for t in 1..=n.min(6) {
                let lhs = good_count(n, t).unwrap() as f64 / three_pow(t).unwrap() as f64;
                let rhs = ((n * t) as f64 / (1.5 * E * E)).powi(t as i32);
                assert!(lhs >= rhs * (1.0 - 1e-12), "n={n} t={t}: {lhs} < {rhs}");
            }
        }
    }
}
