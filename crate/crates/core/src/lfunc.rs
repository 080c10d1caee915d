//! Dirichlet L-series of real characters at `s = 1` and `s = 2`, with
//! certified truncation error, and the main term of
//! `sum_{n <= X} r(n, z1) r(n, z2)`.
//!
//! ## Tail certification
//!
//! Write the tail as `T = sum_{n > N} c(n) f(n)` with `f(n) = n^{-s}`, `N` a
//! multiple of the period `q`, and `c` periodic with mean zero. Partial
//! summation gives `T = sum_{n > N} A(n) (f(n) - f(n+1))` where `A` is the
//! running sum of `c` from `N + 1`, again `q`-periodic. Splitting off the mean
//! `mu` of `A` leaves `T = mu f(N+1) + sum (A - mu) Δf`, which has the same
//! shape one order higher. After `L` rounds
//!
//! ```text
//! T = sum_{j < L} mu_j Δ^j f(N+1) + R_L,   |R_L| <= max|A_L| Δ^L f(N+1)
//! ```
//!
//! since `Δ^j f >= 0` is decreasing. All running sums and means are exact
//! rationals with denominator `q^j`.

use std::f64::consts::PI;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, fundamental_divisors, kron, Discriminant, ShapeZ};
use crate::error::{Error, Result};
use crate::forms::class_number;

/// `n -> prod_i (d_i / n)` for discriminants `d_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCharacter {
    factors: Vec<Discriminant>,
    period: u64,
    table: Vec<i8>,
}

impl ProductCharacter {
    pub fn new(factors: &[i64]) -> Result<Self> {
        let factors = factors
            .iter()
            .map(|&d| Discriminant::new(d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_discriminants(factors))
    }

    pub fn from_discriminants(factors: Vec<Discriminant>) -> Self {
        let period = factors
            .iter()
            .fold(1u64, |acc, d| acc.lcm(&d.value().unsigned_abs()));
        let table = (0..period)
            .map(|r| factors.iter().map(|d| d.chi(r)).product())
            .collect();
        ProductCharacter {
            factors,
            period,
            table,
        }
    }

    pub fn factors(&self) -> &[Discriminant] {
        &self.factors
    }

    /// Product of the `|d_i|`.
    pub fn modulus(&self) -> u64 {
        self.factors.iter().map(|d| d.value().unsigned_abs()).product()
    }

    /// Least common multiple of the `|d_i|`; a period of the character.
    pub fn period(&self) -> u64 {
        self.period
    }

    #[inline]
    pub fn eval(&self, n: u64) -> i8 {
        self.table[(n % self.period) as usize]
    }

    /// Takes only the values 0 and 1.
    pub fn is_principal(&self) -> bool {
        self.table.iter().all(|&v| v >= 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LMethod {
    DirectWithTail,
    PartialSummation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub value: f64,
    /// `|value - L(s, chi)| <= tail_bound`.
    pub tail_bound: f64,
    pub terms_used: u64,
    pub method: LMethod,
}

/// Rounds of partial summation used by [`l_value`].
pub const DEFAULT_LEVELS: u32 = 2;

fn check_point(s: u32) -> Result<()> {
    if s != 1 && s != 2 {
        return Err(Error::invalid(format!("L-values are only evaluated at s = 1, 2, not {s}")));
    }
    Ok(())
}

/// `Δ^j f(m) = sum_i (-1)^i C(j, i) f(m + i)` for `f(n) = n^{-s}`.
fn forward_difference(s: u32, j: u32, m: f64) -> f64 {
    match (s, j) {
        (1, _) => {
            let mut v = 1.0 / m;
            for i in 1..=j {
                v *= f64::from(i) / (m + f64::from(i));
            }
            v
        }
        (2, 0) => 1.0 / (m * m),
        (2, 1) => (2.0 * m + 1.0) / (m * m * (m + 1.0) * (m + 1.0)),
        (2, 2) => {
            let m1 = m + 1.0;
            let m2 = m + 2.0;
            (6.0 * m * m + 12.0 * m + 4.0) / (m * m * m1 * m1 * m2 * m2)
        }
        _ => unreachable!("differences of n^-2 are implemented up to order 2"),
    }
}

/// Means `mu_0 .. mu_{L-1}` and `max |A_L|` of the nested running sums over one period.
struct TailData {
    means: Vec<f64>,
    max_running: f64,
}

fn tail_data(chi: &ProductCharacter, levels: u32) -> TailData {
    let q = chi.period as i128;
    // c holds q^j times the level-j sequence at n = N + 1, ..., N + q
    let mut c: Vec<i128> = (1..=chi.period).map(|r| i128::from(chi.eval(r))).collect();
    let mut scale = 1f64;
    let mut means = Vec::with_capacity(levels as usize);
    for _ in 0..levels {
        let mut acc = 0i128;
        let running: Vec<i128> = c
            .iter()
            .map(|&v| {
                acc += v;
                acc
            })
            .collect();
        let total: i128 = running.iter().sum();
        means.push(total as f64 / (q as f64 * scale));
        c = running.iter().map(|&a| q * a - total).collect();
        scale *= q as f64;
    }
    let mut acc = 0i128;
    let max_running = c
        .iter()
        .map(|&v| {
            acc += v;
            acc.abs()
        })
        .max()
        .unwrap_or(0) as f64
        / scale;
    TailData { means, max_running }
}

/// Running sums of level `j` grow like `q^{2j}`; two rounds keep them well inside `i128`.
const MAX_LEVELS: u32 = 2;

fn validate(chi: &ProductCharacter, s: u32) -> Result<()> {
    check_point(s)?;
    if chi.is_principal() {
        return Err(Error::PrincipalCharacter);
    }
    Ok(())
}

/// `L(s, chi)` summed over `ceil(terms / q) * q` terms plus `levels` rounds
/// of partial-summation correction. `levels = 0` is plain truncation with
/// the first-order tail bound.
pub fn l_value_with_terms(
    chi: &ProductCharacter,
    s: u32,
    terms: u64,
    levels: u32,
) -> Result<LValue> {
    validate(chi, s)?;
    if levels > MAX_LEVELS {
        return Err(Error::invalid(format!("at most {MAX_LEVELS} correction rounds")));
    }
    let data = tail_data(chi, levels);
    Ok(evaluate(chi, s, terms.max(1).div_ceil(chi.period) * chi.period, levels, &data))
}

fn evaluate(chi: &ProductCharacter, s: u32, n_terms: u64, levels: u32, data: &TailData) -> LValue {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut abs_sum = 0.0f64;
    for n in 1..=n_terms {
        let c = chi.eval(n);
        if c == 0 {
            continue;
        }
        let nf = n as f64;
        let t = f64::from(c) / if s == 1 { nf } else { nf * nf };
        abs_sum += t.abs();
        // Neumaier summation
        let next = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - next) + t;
        } else {
            comp += (t - next) + sum;
        }
        sum = next;
    }
    let m = n_terms as f64 + 1.0;
    let mut correction = 0.0f64;
    for (j, mu) in data.means.iter().enumerate() {
        let t = mu * forward_difference(s, j as u32, m);
        correction += t;
        abs_sum += t.abs();
    }
    let truncation = data.max_running * forward_difference(s, levels, m);
    let rounding = 8.0 * f64::EPSILON * abs_sum;
    LValue {
        value: sum + comp + correction,
        tail_bound: truncation + rounding,
        terms_used: n_terms,
        method: if levels == 0 {
            LMethod::DirectWithTail
        } else {
            LMethod::PartialSummation
        },
    }
}

/// `L(s, chi)` for `s` in `{1, 2}` with `tail_bound <= eps`.
pub fn l_value(chi: &ProductCharacter, s: u32, eps: f64) -> Result<LValue> {
    validate(chi, s)?;
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    let levels = DEFAULT_LEVELS;
    let data = tail_data(chi, levels);
    let q = chi.period;
    let bound = |k: u64| data.max_running * forward_difference(s, levels, (k * q) as f64 + 1.0);
    let target = eps / 2.0;
    let mut hi = 1u64;
    while bound(hi) > target {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v = evaluate(chi, s, hi * q, levels, &data);
    if v.tail_bound > eps {
        return Err(Error::invariant(format!(
            "rounding error {} exceeds the requested tolerance {eps}",
            v.tail_bound
        )));
    }
    Ok(v)
}

/// `sum_{n <= y} chi(n) / n`.
pub fn truncated_l1(chi: &ProductCharacter, y: u64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=y {
        let c = chi.eval(n);
        if c == 0 {
            continue;
        }
        let t = f64::from(c) / n as f64;
        let next = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - next) + t;
        } else {
            comp += (t - next) + sum;
        }
        sum = next;
    }
    sum + comp
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassNumberCheck {
    pub z: u64,
    /// Count of reduced forms.
    pub h: usize,
    pub l1: LValue,
    /// `sqrt(4z) / pi * L(1, chi_{z*})`.
    pub estimate: f64,
    pub residual: f64,
}

impl ClassNumberCheck {
    pub fn recovers_h(&self) -> bool {
        self.residual < 0.5 && self.estimate.round() as usize == self.h
    }
}

pub fn class_number_formula_check(z: ShapeZ, eps: f64) -> Result<ClassNumberCheck> {
    let h = class_number(z.z_star())?;
    let chi = ProductCharacter::from_discriminants(vec![z.discriminant()]);
    let l1 = l_value(&chi, 1, eps)?;
    let estimate = (4.0 * z.z() as f64).sqrt() / PI * l1.value;
    Ok(ClassNumberCheck {
        z: z.z(),
        h,
        l1,
        estimate,
        residual: (h as f64 - estimate).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DTerm {
    pub d: i64,
    /// `prod_{p | d} (1 - 1/p) / (1 - chi'(p)/p)` as an exact fraction.
    pub numerator: i128,
    pub denominator: i128,
    pub euler_factor: f64,
}

/// Main term of `sum_{n <= X} r(n, z1) r(n, z2)`:
/// `pi^2 X / sqrt(z1* z2*) * L(1, chi) / L(2, chi) * sum_d prod_{p | d} (1 - 1/p) / (1 - chi_{z1*/d} chi_{z2*/d}(p) / p)`
/// with `chi = chi_{z1*} chi_{z2*}` taken literally (not made primitive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainTerm {
    pub z1: u64,
    pub z2: u64,
    pub x: u64,
    pub l1: LValue,
    pub l2: LValue,
    pub d_terms: Vec<DTerm>,
    pub d_sum: f64,
    pub value: f64,
    /// Bound on `|value - exact main term|` from the L-value tails.
    pub value_bound: f64,
}

/// Euler-factor terms of the `d`-sum, with their exact total.
pub fn d_sum_terms(z1: ShapeZ, z2: ShapeZ) -> (Vec<DTerm>, Ratio<i128>) {
    let g = (4 * z1.z()).gcd(&(4 * z2.z()));
    let mut total = Ratio::from_integer(0i128);
    let terms = fundamental_divisors(g)
        .into_iter()
        .map(|d| {
            let d = d.value();
            let (c1, c2) = (z1.z_star() / d, z2.z_star() / d);
            let factor = factorize(d.unsigned_abs())
                .into_iter()
                .map(|(p, _)| {
                    let chi = i128::from(kron(c1, p)) * i128::from(kron(c2, p));
                    let p = i128::from(p);
                    Ratio::new(p - 1, p - chi)
                })
                .fold(Ratio::from_integer(1i128), |a, b| a * b);
            total += factor;
            DTerm {
                d,
                numerator: *factor.numer(),
                denominator: *factor.denom(),
                euler_factor: *factor.numer() as f64 / *factor.denom() as f64,
            }
        })
        .collect();
    (terms, total)
}

pub fn main_term(z1: ShapeZ, z2: ShapeZ, x: u64, eps: f64) -> Result<MainTerm> {
    if z1 == z2 {
        return Err(Error::invalid("the main term needs two distinct shapes"));
    }
    let chi = ProductCharacter::from_discriminants(vec![z1.discriminant(), z2.discriminant()]);
    let l1 = l_value(&chi, 1, eps)?;
    let l2 = l_value(&chi, 2, eps)?;
    Ok(assemble_main_term(z1, z2, x, l1, l2))
}

/// Main term for several `X` sharing the same L-values.
pub fn main_terms(z1: ShapeZ, z2: ShapeZ, xs: &[u64], eps: f64) -> Result<Vec<MainTerm>> {
    let first = main_term(z1, z2, 1, eps)?;
    Ok(xs
        .iter()
        .map(|&x| assemble_main_term(z1, z2, x, first.l1, first.l2))
        .collect())
}

fn assemble_main_term(z1: ShapeZ, z2: ShapeZ, x: u64, l1: LValue, l2: LValue) -> MainTerm {
    let (d_terms, total) = d_sum_terms(z1, z2);
    let d_sum = *total.numer() as f64 / *total.denom() as f64;
    // sqrt(z1* z2*) = 4 sqrt(z1 z2) since both z* are negative
    let prefactor = PI * PI * x as f64 / (4.0 * ((z1.z() * z2.z()) as f64).sqrt()) * d_sum;
    let ratio = l1.value / l2.value;
    let value = prefactor * ratio;
    let worst = (l1.value + l1.tail_bound) / (l2.value - l2.tail_bound);
    MainTerm {
        z1: z1.z(),
        z2: z2.z(),
        x,
        l1,
        l2,
        d_terms,
        d_sum,
        value,
        value_bound: prefactor * (worst - ratio).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(f: &[i64]) -> ProductCharacter {
        ProductCharacter::new(f).unwrap()
    }

    fn shape(z: u64) -> ShapeZ {
        ShapeZ::new(z).unwrap()
    }

    /// Averaged consecutive partial sums of the Leibniz series; the error of
    /// the average is below 1 / (4 n^2).
    fn leibniz(n: u64) -> f64 {
        let mut s = 0.0;
        let mut prev = 0.0;
        for k in 0..n {
            prev = s;
            s += if k % 2 == 0 { 1.0 } else { -1.0 } / (2 * k + 1) as f64;
        }
        (s + prev) / 2.0
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn leibniz_oracle() {
        let v = l_value(&chi(&[-4]), 1, 1e-10).unwrap();
        assert!((v.value - leibniz(1_000_000)).abs() < 1e-10);
        assert!((v.value - PI / 4.0).abs() <= v.tail_bound);
        assert!((v.value - 0.785_398_1).abs() < 1e-7);
    }

    #[test]
    fn l1_at_minus_20_from_class_number() {
        // h(-20) = 2 from the reduced forms, so L(1) = 2 pi / sqrt(20)
        let h = class_number(-20).unwrap() as f64;
        let oracle = h * PI / 20f64.sqrt();
        let v = l_value(&chi(&[-20]), 1, 1e-10).unwrap();
        assert!((v.value - oracle).abs() <= v.tail_bound + 1e-15);
        assert!((v.value - 1.404_962_9).abs() < 1e-7);
    }

    #[test]
    fn closed_forms() {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let cases: [(&[i64], u32, f64); 5] = [
            (&[-3], 1, PI / (3.0 * 3f64.sqrt())),
            (&[5], 1, 2.0 * golden.ln() / 5f64.sqrt()),
            (&[8], 1, (1.0 + 2f64.sqrt()).ln() / 2f64.sqrt()),
            (&[-4], 2, 0.915_965_594_177_219),
            (&[-3], 2, 0.781_302_412_896_486_3),
        ];
        for (f, s, exact) in cases {
            let v = l_value(&chi(f), s, 1e-12).unwrap();
            assert!(v.tail_bound <= 1e-12);
            assert!((v.value - exact).abs() <= v.tail_bound + 1e-15, "{f:?} s={s} {v:?}");
        }
    }

    #[test]
    fn principal_characters_rejected() {
        for s in [1, 2] {
            assert!(matches!(l_value(&chi(&[-4, -4]), s, 1e-8), Err(Error::PrincipalCharacter)));
            assert!(matches!(l_value(&chi(&[]), s, 1e-8), Err(Error::PrincipalCharacter)));
        }
        assert!(l_value(&chi(&[-4]), 3, 1e-8).is_err());
        assert!(l_value(&chi(&[-4]), 1, 0.0).is_err());
        assert!(ProductCharacter::new(&[6]).is_err());
    }

    #[test]
    fn product_characters() {
        let c = chi(&[-20, -52]);
        assert_eq!(c.modulus(), 1040);
        assert_eq!(c.period(), 260);
        for n in 0..2000 {
            assert_eq!(c.eval(n), kron(-20, n) * kron(-52, n));
        }
        assert!(!c.is_principal());
        assert!(chi(&[-4, -4]).is_principal());
    }

    #[test]
    fn every_method_brackets_the_same_value() {
        for f in [&[-4i64][..], &[-20, -52], &[5, -84], &[-3, 8, -7]] {
            let c = chi(f);
            for s in [1, 2] {
                let best = l_value(&c, s, 1e-12).unwrap();
                for levels in 0..=2 {
                    for terms in [1_000, 50_000] {
                        let v = l_value_with_terms(&c, s, terms, levels).unwrap();
                        assert!(
                            (v.value - best.value).abs() <= v.tail_bound + best.tail_bound,
                            "{f:?} s={s} levels={levels} terms={terms}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn doubling_terms_stays_within_tail_bound() {
        for f in [&[-4i64][..], &[-20], &[-20, -52], &[-84, -132]] {
            let c = chi(f);
            for s in [1, 2] {
                let v = l_value(&c, s, 1e-6).unwrap();
                let w = l_value_with_terms(&c, s, 2 * v.terms_used, DEFAULT_LEVELS).unwrap();
                assert!((w.value - v.value).abs() < v.tail_bound, "{f:?} s={s}");
            }
        }
    }

    #[test]
    fn direct_tail_is_reported() {
        let v = l_value_with_terms(&chi(&[-4]), 1, 1000, 0).unwrap();
        assert_eq!(v.method, LMethod::DirectWithTail);
        assert_eq!(v.terms_used, 1000);
        assert!((v.value - PI / 4.0).abs() <= v.tail_bound);
        assert!(v.tail_bound < 2e-3);
    }

    #[test]
    fn class_number_examples() {
        let c = class_number_formula_check(shape(5), 1e-8).unwrap();
        assert_eq!(c.h, 2);
        assert!(c.residual < 1e-6);
        assert!(c.recovers_h());
        let c = class_number_formula_check(shape(13), 1e-8).unwrap();
        assert_eq!((c.h, c.estimate.round() as usize), (2, 2));
        let c = class_number_formula_check(shape(21), 1e-8).unwrap();
        assert_eq!((c.h, c.estimate.round() as usize), (4, 4));
    }

    #[test]
    fn class_number_formula_up_to_200() {
        for z in (5u64..=200).filter_map(|z| ShapeZ::new(z).ok()) {
            let c = class_number_formula_check(z, 1e-6).unwrap();
            assert!(c.residual < 1e-3, "z={z} {c:?}");
        }
    }

    #[test]
    fn rounding_recovers_class_numbers_up_to_500() {
        for z in (5u64..=500).filter_map(|z| ShapeZ::new(z).ok()) {
            let c = class_number_formula_check(z, 1e-4).unwrap();
            assert!(c.recovers_h(), "z={z} {c:?}");
        }
    }

    #[test]
    fn truncated_sums() {
        assert_eq!(truncated_l1(&chi(&[-4]), 1), 1.0);
        assert!((truncated_l1(&chi(&[-4]), 1000) - PI / 4.0).abs() < 1e-3);
        assert!((truncated_l1(&chi(&[-20]), 10_000) - PI / 5f64.sqrt()).abs() < 5e-3);
    }

    #[test]
    fn truncation_error_envelope() {
        // |sum_{n <= Y} chi(n)/n - L(1, chi)| <= C sqrt(q) / Y log(q + 2), one C for all
        const FROZEN_C: f64 = 0.5;
        let chars: [&[i64]; 7] = [&[-4], &[-20], &[-52], &[-84], &[-132], &[-20, -52], &[-20, -68]];
        let mut worst = 0f64;
        for f in chars {
            let c = chi(f);
            let l = l_value(&c, 1, 1e-10).unwrap();
            let q = c.period() as f64;
            for y in [10u64, 100, 1000, 10_000] {
                let err = (truncated_l1(&c, y) - l.value).abs();
                let envelope = q.sqrt() / y as f64 * (q + 2.0).ln();
                worst = worst.max(err / envelope);
            }
        }
        assert!(worst <= FROZEN_C, "fitted constant {worst}");
    }

    #[test]
    fn d_sum_examples() {
        let (terms, total) = d_sum_terms(shape(5), shape(13));
        assert_eq!(total, Ratio::from_integer(2));
        assert_eq!(terms.iter().map(|t| t.d).collect::<Vec<_>>(), vec![1, -4]);
        assert_eq!((terms[0].numerator, terms[0].denominator), (1, 1));
        assert_eq!((terms[1].numerator, terms[1].denominator), (1, 1));

        let (terms, _) = d_sum_terms(shape(5), shape(65));
        assert_eq!(terms.iter().map(|t| t.d).collect::<Vec<_>>(), vec![1, -4, 5, -20]);
        assert_eq!(terms[0].euler_factor, 1.0);
    }

    #[test]
    fn main_term_basics() {
        let m = main_term(shape(5), shape(13), 1000, 1e-9).unwrap();
        assert_eq!(m.d_sum, 2.0);
        assert!(m.value > 0.0);
        let m2 = main_term(shape(5), shape(13), 2000, 1e-9).unwrap();
        assert!((m2.value - 2.0 * m.value).abs() <= 1e-12 * m2.value);
        assert!(main_term(shape(5), shape(5), 1000, 1e-9).is_err());
    }

    #[test]
    fn main_term_positive_with_unit_first_d_term() {
        let zs = [5u64, 13, 17, 21, 29, 33, 37, 41, 65, 85];
        for (i, &a) in zs.iter().enumerate() {
            for &b in &zs[i + 1..] {
                let m = main_term(shape(a), shape(b), 1, 1e-6).unwrap();
                assert!(m.value > 0.0, "({a},{b})");
                assert_eq!(m.d_terms[0].d, 1);
                assert_eq!((m.d_terms[0].numerator, m.d_terms[0].denominator), (1, 1));
            }
        }
    }
}
