//! Weighted sums `R_Q(n, Z) = sum_p sqrt(p) r(n, p)` and their first and
//! second moments.
//!
//! Every moment is a combination `sum_{p,q} sqrt(pq) c_{pq}` with exact
//! integer coefficients. The integer parts are accumulated exactly, and
//! floating point only enters when the square roots are applied.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::PrimeSubset;
use crate::error::Result;
use crate::sieve::{rep_counts_with, union_indicator, RepTable, SieveOptions};

/// `R_Q(n, Z)` for `n = 0..=bound` (entry 0 is zero).
pub fn weighted_sum_table(bound: u64, primes: &PrimeSubset) -> Result<Vec<f64>> {
    weighted_sum_table_with(bound, primes, SieveOptions::default())
}

pub fn weighted_sum_table_with(
    bound: u64,
    primes: &PrimeSubset,
    opts: SieveOptions,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0f64; bound as usize + 1];
    for z in primes.shapes() {
        let t = rep_counts_with(bound, z, opts)?;
        let w = (z.z() as f64).sqrt();
        for (n, c) in t.nonzero() {
            out[n as usize] += w * f64::from(c);
        }
    }
    Ok(out)
}

/// Integer data behind a [`MomentReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactMoments {
    pub primes: Vec<u64>,
    /// `T_p = sum_{n <= X} r(n, p)`.
    pub first: Vec<u64>,
    /// `S_pq = sum_{n <= X} r(n, p) r(n, q)`, row-major over `primes`.
    pub cross: Vec<Vec<u64>>,
}

impl ExactMoments {
    pub fn from_tables(tables: &[RepTable]) -> Self {
        let primes = tables.iter().map(|t| t.z().z()).collect();
        let first = tables.iter().map(RepTable::total).collect();
        let k = tables.len();
        let cross = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| cross_sum(&tables[i], &tables[j], tables[i].bound()))
                    .collect()
            })
            .collect();
        ExactMoments {
            primes,
            first,
            cross,
        }
    }

    pub fn first_moment(&self) -> f64 {
        self.primes
            .iter()
            .zip(&self.first)
            .map(|(&p, &t)| (p as f64).sqrt() * t as f64)
            .sum()
    }

    /// `sum_p p S_pp`, exact.
    pub fn diagonal_exact(&self) -> u128 {
        self.primes
            .iter()
            .enumerate()
            .map(|(i, &p)| u128::from(p) * u128::from(self.cross[i][i]))
            .sum()
    }

    pub fn off_diagonal(&self) -> f64 {
        let mut s = 0.0;
        for (i, &p) in self.primes.iter().enumerate() {
            for (j, &q) in self.primes.iter().enumerate() {
                if i != j {
                    s += ((p * q) as f64).sqrt() * self.cross[i][j] as f64;
                }
            }
        }
        s
    }

    /// `N * sum R^2 - (sum R)^2 = sum_{p,q} sqrt(pq) (N S_pq - T_p T_q)`,
    /// returned with an upper bound on its floating-point error.
    ///
    /// The integer coefficients are exact; the error only covers the square
    /// roots, products and summation in double precision.
    pub fn cauchy_schwarz_slack(&self, union: u64) -> (f64, f64) {
        let mut value = 0.0f64;
        let mut magnitude = 0.0f64;
        let k = self.primes.len();
        for i in 0..k {
            for j in 0..k {
                let c = i128::from(union) * i128::from(self.cross[i][j])
                    - i128::from(self.first[i]) * i128::from(self.first[j]);
                let term = ((self.primes[i] * self.primes[j]) as f64).sqrt() * c as f64;
                value += term;
                magnitude += term.abs();
            }
        }
        let terms = (k * k) as f64;
        let err = magnitude * (terms + 4.0) * f64::EPSILON;
        (value, err)
    }
}

/// `sum_{n <= x} r(n, z1) r(n, z2)`, exact.
pub fn cross_sum(t1: &RepTable, t2: &RepTable, x: u64) -> u64 {
    let x = x.min(t1.bound()).min(t2.bound()) as usize;
    t1.counts()[..x]
        .iter()
        .zip(&t2.counts()[..x])
        .map(|(&a, &b)| u64::from(a) * u64::from(b))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub x: u64,
    pub z: u64,
    pub subset_size: usize,
    /// `sum_n R_Q(n, Z)`.
    pub first_moment: f64,
    /// `sum_n sum_p p r(n, p)^2`.
    pub diagonal: f64,
    /// `sum_n sum_{p != q} sqrt(pq) r(n, p) r(n, q)`.
    pub off_diagonal: f64,
    /// `(sum R)^2 / sum R^2`.
    pub cs_lower_bound: f64,
    /// `N_Q(X, Z)`.
    pub union_count: u64,
    /// Set when `Z > X^{1/10}`.
    pub regime_violation: bool,
    /// `N sum R^2 - (sum R)^2`; nonnegative by Cauchy-Schwarz.
    pub cs_slack: f64,
    pub cs_slack_error: f64,
    pub exact: ExactMoments,
}

impl MomentReport {
    /// The Cauchy-Schwarz inequality `N sum R^2 >= (sum R)^2` holds with the
    /// rounding error accounted for.
    pub fn cauchy_schwarz_holds(&self) -> bool {
        self.cs_slack + self.cs_slack_error >= 0.0
    }

    pub fn second_moment(&self) -> f64 {
        self.diagonal + self.off_diagonal
    }
}

pub fn moment_report(bound: u64, primes: &PrimeSubset) -> Result<MomentReport> {
    moment_report_with(bound, primes, SieveOptions::default())
}

pub fn moment_report_with(
    bound: u64,
    primes: &PrimeSubset,
    opts: SieveOptions,
) -> Result<MomentReport> {
    let shapes = primes.shapes();
    let tables = shapes
        .par_iter()
        .map(|&z| rep_counts_with(bound, z, opts))
        .collect::<Result<Vec<_>>>()?;
    let exact = ExactMoments::from_tables(&tables);
    let union = union_indicator(bound, &shapes).map_or(0, |ind| ind.count());

    let first_moment = exact.first_moment();
    let diagonal = exact.diagonal_exact() as f64;
    let off_diagonal = exact.off_diagonal();
    let second = diagonal + off_diagonal;
    let cs_lower_bound = if second > 0.0 {
        first_moment * first_moment / second
    } else {
        0.0
    };
    let (cs_slack, cs_slack_error) = exact.cauchy_schwarz_slack(union);
    Ok(MomentReport {
        x: bound,
        z: primes.cutoff,
        subset_size: primes.len(),
        first_moment,
        diagonal,
        off_diagonal,
        cs_lower_bound,
        union_count: union,
        regime_violation: (primes.cutoff as f64) > (bound as f64).powf(0.1),
        cs_slack,
        cs_slack_error,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{primes_1mod4, SubsetKind};

    fn explicit(cutoff: u64, ps: &[u64]) -> PrimeSubset {
        primes_1mod4(cutoff, SubsetKind::Explicit(ps.to_vec())).unwrap()
    }

    #[test]
    fn weighted_sums() {
        let r = weighted_sum_table(10, &explicit(5, &[5])).unwrap();
        assert!((r[6] - 2.0 * 5f64.sqrt()).abs() < 1e-12);
        assert!((r[6] - 4.4721).abs() < 1e-4);
        assert_eq!(r[7], 0.0);
        let r = weighted_sum_table(10, &explicit(13, &[5, 13])).unwrap();
        assert!((r[4] - (5f64.sqrt() + 13f64.sqrt())).abs() < 1e-12);
        assert!((r[4] - 5.8417).abs() < 1e-4);
    }

    #[test]
    fn moments_single_prime() {
        let m = moment_report(10, &explicit(5, &[5])).unwrap();
        assert_eq!(m.diagonal, 80.0);
        assert_eq!(m.off_diagonal, 0.0);
        assert_eq!(m.union_count, 5);
    }

    #[test]
    fn moments_two_primes() {
        let m = moment_report(10, &explicit(13, &[5, 13])).unwrap();
        // r(n,5) r(n,13) = 1, 1, 3 at n = 1, 4, 9
        assert_eq!(m.exact.cross[0][1], 5);
        assert!((m.off_diagonal - 2.0 * 65f64.sqrt() * 5.0).abs() < 1e-9);
        assert!((m.off_diagonal - 80.62).abs() < 1e-2);
    }

    #[test]
    fn split_reproduces_second_moment() {
        let ps = primes_1mod4(60, SubsetKind::P).unwrap();
        let m = moment_report(20_000, &ps).unwrap();
        let r = weighted_sum_table(20_000, &ps).unwrap();
        let direct: f64 = r.iter().map(|v| v * v).sum();
        assert!(((m.second_moment() - direct) / direct).abs() < 1e-12);
        let first: f64 = r.iter().sum();
        assert!(((m.first_moment - first) / first).abs() < 1e-12);
    }

    #[test]
    fn cauchy_schwarz_bound_below_union() {
        for (bound, cutoff) in [(10u64, 13u64), (1000, 30), (50_000, 100)] {
            let ps = primes_1mod4(cutoff, SubsetKind::P).unwrap();
            let m = moment_report(bound, &ps).unwrap();
            assert!(m.cauchy_schwarz_holds(), "X={bound}");
            assert!(m.cs_lower_bound <= m.union_count as f64 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn regime_flag() {
        let ps = primes_1mod4(30, SubsetKind::P).unwrap();
        assert!(moment_report(1000, &ps).unwrap().regime_violation);
    }

    #[test]
    fn shards_do_not_change_moments() {
        let ps = primes_1mod4(40, SubsetKind::P).unwrap();
        let base = moment_report(30_000, &ps).unwrap();
        for shards in [2, 4, 8] {
            let m = moment_report_with(30_000, &ps, SieveOptions::with_shards(shards)).unwrap();
            assert_eq!(m, base);
        }
    }
}
