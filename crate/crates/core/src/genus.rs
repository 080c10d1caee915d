//! Dirichlet coefficients of genus characters and the exact identities they
//! satisfy.
//!
//! For a genus pair `z* = f g` the class-group L-function factors as
//! `L(s, chi_f) L(s, chi_g)`, so its coefficients are the Dirichlet
//! convolution `(chi_f * chi_g)(n)`. Everything here is integer arithmetic.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::arith::{divisors, kron, mobius, mobius_table, primes_up_to, Discriminant, ShapeZ};
use crate::error::{Error, Result};
use crate::forms::{class_group_info, GenusPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Character,
    Convolution,
    PrimePower,
    Product,
    Quotient,
    Reconstruction,
}

/// The first `N` Dirichlet coefficients `a(1), ..., a(N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientSeries {
    // coeffs[0] is unused
    coeffs: Vec<i64>,
    provenance: Provenance,
}

impl CoefficientSeries {
    pub fn from_fn(len: usize, provenance: Provenance, mut f: impl FnMut(u64) -> i64) -> Self {
        let mut coeffs = vec![0; len + 1];
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            *c = f(n as u64);
        }
        CoefficientSeries { coeffs, provenance }
    }

    /// The Dirichlet series `1` (the identity for convolution).
    pub fn unit(len: usize) -> Self {
        Self::from_fn(len, Provenance::Product, |n| i64::from(n == 1))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `a(n)` for `1 <= n <= N`.
    pub fn get(&self, n: u64) -> i64 {
        self.coeffs[n as usize]
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs[1..]
    }

    /// Dirichlet convolution, truncated to the shorter length.
    pub fn dirichlet_mul(&self, other: &CoefficientSeries) -> CoefficientSeries {
        let len = self.len().min(other.len());
        let mut out = vec![0i64; len + 1];
        for u in 1..=len {
            let a = self.coeffs[u];
            if a == 0 {
                continue;
            }
            for (v, &b) in other.coeffs[1..=len / u].iter().enumerate() {
                if b != 0 {
                    out[u * (v + 1)] += a * b;
                }
            }
        }
        CoefficientSeries {
            coeffs: out,
            provenance: Provenance::Product,
        }
    }

    pub fn pointwise_mul(&self, other: &CoefficientSeries) -> CoefficientSeries {
        let len = self.len().min(other.len());
        CoefficientSeries::from_fn(len, Provenance::Product, |n| self.get(n) * other.get(n))
    }

    /// CSV with columns `n,a_n`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "a_n"])?;
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            out.write_record([n.to_string(), c.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Coefficients of `L(s, chi_{d_1} ... chi_{d_k})`: the pointwise product of
/// Kronecker symbols, never reduced to a primitive character.
pub fn character_series(factors: &[Discriminant], len: usize) -> CoefficientSeries {
    CoefficientSeries::from_fn(len, Provenance::Character, |n| {
        factors.iter().map(|d| i64::from(d.chi(n))).product()
    })
}

fn check_pair(z: ShapeZ, pair: &GenusPair) -> Result<()> {
    if pair.z_star() != z.z_star() {
        return Err(Error::InvalidGenusPair {
            f: pair.f().value(),
            g: pair.g().value(),
            z_star: z.z_star(),
        });
    }
    Ok(())
}

/// `a(n, chi_{f,g}) = (chi_f * chi_g)(n)` for `n <= len`.
pub fn genus_coeffs(z: ShapeZ, pair: &GenusPair, len: usize) -> Result<CoefficientSeries> {
    check_pair(z, pair)?;
    let mut s = character_series(&[pair.f()], len).dirichlet_mul(&character_series(&[pair.g()], len));
    s.provenance = Provenance::Convolution;
    Ok(s)
}

/// How `p` decomposes in `Q(sqrt(z*))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitType {
    Inert,
    Split,
    Ramified,
}

pub fn split_type(z: ShapeZ, p: u64) -> SplitType {
    match kron(z.z_star(), p) {
        -1 => SplitType::Inert,
        1 => SplitType::Split,
        _ => SplitType::Ramified,
    }
}

/// `chi_{f,g}` on a prime ideal above `p`: `chi_f(p)` unless `p | f`, then `chi_g(p)`.
fn genus_value_above(pair: &GenusPair, p: u64) -> i64 {
    if pair.f().value() % p as i64 != 0 {
        i64::from(pair.f().chi(p))
    } else {
        i64::from(pair.g().chi(p))
    }
}

/// `a(p^k, chi_{f,g})` from the decomposition of `p`:
/// inert `((-1)^k + 1) / 2`, split `sum_j chi(P)^j chi(P')^{k-j}`, ramified `chi(P)^k`.
///
/// In the split case both primes above `p` carry the same genus value, so
/// only the symmetric sum is available here.
pub fn prime_power_coeff(z: ShapeZ, pair: &GenusPair, p: u64, k: u32) -> Result<i64> {
    check_pair(z, pair)?;
    if k == 0 {
        return Ok(1);
    }
    Ok(match split_type(z, p) {
        SplitType::Inert => i64::from(k % 2 == 0),
        SplitType::Split => {
            let c = genus_value_above(pair, p);
            (0..=k).map(|j| c.pow(j) * c.pow(k - j)).sum()
        }
        SplitType::Ramified => genus_value_above(pair, p).pow(k),
    })
}

/// Builds the multiplicative series with the given prime-power values.
pub fn multiplicative_from_prime_powers(
    len: usize,
    provenance: Provenance,
    mut at: impl FnMut(u64, u32) -> i64,
) -> CoefficientSeries {
    let mut coeffs = vec![0i64; len + 1];
    if len == 0 {
        return CoefficientSeries { coeffs, provenance };
    }
    coeffs[1] = 1;
    // smallest prime factor sieve, then a(n) = a(p^k) a(n / p^k)
    let mut spf = vec![0u32; len + 1];
    for p in primes_up_to(len as u64) {
        let p = p as usize;
        for m in (p..=len).step_by(p) {
            if spf[m] == 0 {
                spf[m] = p as u32;
            }
        }
    }
    let mut cache = std::collections::HashMap::new();
    for n in 2..=len {
        let p = spf[n] as usize;
        let mut m = n;
        let mut k = 0u32;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let pk = *cache.entry((p, k)).or_insert_with(|| at(p as u64, k));
        coeffs[n] = pk * coeffs[m];
    }
    CoefficientSeries { coeffs, provenance }
}

/// `r(n, z) = (1/h) sum_{genus pairs} a(n, chi_{f,g})`, valid only when every
/// class-group character is a genus character.
pub fn reconstruct_r(z: ShapeZ, len: usize) -> Result<CoefficientSeries> {
    let info = class_group_info(z);
    if !info.one_class_per_genus {
        return Err(Error::NotOneClassPerGenus {
            z: z.z(),
            h: info.h,
            genera: info.genus_pairs.len(),
        });
    }
    let mut total = vec![0i64; len + 1];
    for pair in &info.genus_pairs {
        let s = genus_coeffs(z, pair, len)?;
        for (t, c) in total.iter_mut().zip(&s.coeffs) {
            *t += c;
        }
    }
    let h = info.h as i64;
    for (n, t) in total.iter_mut().enumerate().skip(1) {
        if *t % h != 0 {
            return Err(Error::invariant(format!(
                "genus sum {t} at n = {n} is not divisible by h = {h}"
            )));
        }
        *t /= h;
    }
    Ok(CoefficientSeries {
        coeffs: total,
        provenance: Provenance::Reconstruction,
    })
}

/// Four fundamental discriminants `(f1, g1, f2, g2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadruple {
    pub f1: Discriminant,
    pub g1: Discriminant,
    pub f2: Discriminant,
    pub g2: Discriminant,
}

impl Quadruple {
    pub fn new(f1: i64, g1: i64, f2: i64, g2: i64) -> Result<Self> {
        Ok(Quadruple {
            f1: Discriminant::fundamental(f1)?,
            g1: Discriminant::fundamental(g1)?,
            f2: Discriminant::fundamental(f2)?,
            g2: Discriminant::fundamental(g2)?,
        })
    }

    pub fn from_pairs(p1: &GenusPair, p2: &GenusPair) -> Self {
        Quadruple {
            f1: p1.f(),
            g1: p1.g(),
            f2: p2.f(),
            g2: p2.g(),
        }
    }
}

fn convolution_at(f: Discriminant, g: Discriminant, n: u64) -> i64 {
    divisors(n)
        .into_iter()
        .map(|u| i64::from(f.chi(u)) * i64::from(g.chi(n / u)))
        .sum()
}

/// Both sides of
/// `(chi_f1 * chi_g1)(n) (chi_f2 * chi_g2)(n) = sum_{n = abcde^2} mu(e) chi_f1(abe) chi_g1(cde) chi_f2(ace) chi_g2(bde)`,
/// the right side summed over ordered 5-tuples.
pub fn mobius_identity_lhs_rhs(q: &Quadruple, n: u64) -> (i64, i64) {
    assert!(n >= 1);
    let lhs = convolution_at(q.f1, q.g1, n) * convolution_at(q.f2, q.g2, n);
    let mut rhs = 0i64;
    let mut e = 1u64;
    while e * e <= n {
        if n % (e * e) == 0 {
            let mu = i64::from(mobius(e));
            if mu != 0 {
                let m = n / (e * e);
                for a in divisors(m) {
                    for b in divisors(m / a) {
                        for c in divisors(m / (a * b)) {
                            let d = m / (a * b * c);
                            let t = i64::from(q.f1.chi(a * b * e))
                                * i64::from(q.g1.chi(c * d * e))
                                * i64::from(q.f2.chi(a * c * e))
                                * i64::from(q.g2.chi(b * d * e));
                            rhs += mu * t;
                        }
                    }
                }
            }
        }
        e += 1;
    }
    (lhs, rhs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationCheck {
    pub checked: usize,
    pub passed: bool,
    /// `(n, lhs, rhs)` at the first disagreement.
    pub first_mismatch: Option<(u64, i64, i64)>,
}

/// The four L-series whose product, divided by `L(2s, chi_{z1*} chi_{z2*})`,
/// has coefficients `a1(n) a2(n)`:
/// `chi_{f1 f2}`, `chi_{f1 g2}`, `chi_{g1 f2}`, `chi_{g1 g2}`.
pub fn four_fold_product(q: &Quadruple, len: usize) -> CoefficientSeries {
    character_series(&[q.f1, q.f2], len)
        .dirichlet_mul(&character_series(&[q.f1, q.g2], len))
        .dirichlet_mul(&character_series(&[q.g1, q.f2], len))
        .dirichlet_mul(&character_series(&[q.g1, q.g2], len))
}

/// Coefficients of `L(2s, chi_{z1*} chi_{z2*})^{-1}`: `mu(e) chi(e)` at `n = e^2`.
pub fn inverse_l_at_2s(z1: ShapeZ, z2: ShapeZ, len: usize) -> CoefficientSeries {
    let mu = mobius_table(len.isqrt());
    let mut s = CoefficientSeries::from_fn(len, Provenance::Character, |_| 0);
    for e in 1..=len.isqrt() {
        let chi = i64::from(kron(z1.z_star(), e as u64)) * i64::from(kron(z2.z_star(), e as u64));
        s.coeffs[e * e] = i64::from(mu[e]) * chi;
    }
    s
}

/// Checks `a1(n, chi1) a2(n, chi2)` against the five-fold convolution
/// `chi_{f1 f2} * chi_{f1 g2} * chi_{g1 f2} * chi_{g1 g2} * (mu chi_{z1* z2*})(sqrt .)`
/// for every `n <= len`.
pub fn factorization_check(
    z1: ShapeZ,
    z2: ShapeZ,
    pair1: &GenusPair,
    pair2: &GenusPair,
    len: usize,
) -> Result<FactorizationCheck> {
    if z1 == z2 {
        return Err(Error::invalid("z1 and z2 must differ"));
    }
    let lhs = genus_coeffs(z1, pair1, len)?.pointwise_mul(&genus_coeffs(z2, pair2, len)?);
    let q = Quadruple::from_pairs(pair1, pair2);
    let rhs = four_fold_product(&q, len).dirichlet_mul(&inverse_l_at_2s(z1, z2, len));
    let first_mismatch = (1..=len as u64)
        .find(|&n| lhs.get(n) != rhs.get(n))
        .map(|n| (n, lhs.get(n), rhs.get(n)));
    Ok(FactorizationCheck {
        checked: len,
        passed: first_mismatch.is_none(),
        first_mismatch,
    })
}

/// `G` with `A = B G`, from
/// `g_k(p) = a_k(p) - b_k(p) - sum_{m=1}^{k-1} b_m(p) g_{k-m}(p)`.
///
/// `a` and `b` must be multiplicative; only their prime-power values are read.
pub fn quotient_series(
    a: &CoefficientSeries,
    b: &CoefficientSeries,
    len: usize,
) -> Result<CoefficientSeries> {
    if a.len() < len || b.len() < len {
        return Err(Error::invalid("input series are shorter than the requested length"));
    }
    if len >= 1 && (a.get(1) != 1 || b.get(1) != 1) {
        return Err(Error::invalid("multiplicative series must start with 1"));
    }
    let mut memo: std::collections::HashMap<u64, Vec<i64>> = Default::default();
    let mut g = multiplicative_from_prime_powers(len, Provenance::Quotient, |p, k| {
        let gs = memo.entry(p).or_insert_with(|| {
            // g_0 = 1, then the recursion for every p^k <= len
            let mut gs = vec![1i64];
            let mut pk = p;
            let mut powers = vec![1u64];
            while pk as usize <= len {
                powers.push(pk);
                let k = powers.len() - 1;
                let mut gk = a.get(pk) - b.get(pk);
                for m in 1..k {
                    gk -= b.get(powers[m]) * gs[k - m];
                }
                gs.push(gk);
                match pk.checked_mul(p) {
                    Some(next) => pk = next,
                    None => break,
                }
            }
            gs
        });
        gs[k as usize]
    });
    g.provenance = Provenance::Quotient;
    Ok(g)
}
