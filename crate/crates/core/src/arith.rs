//! Integer primitives: Kronecker symbols, fundamental discriminants,
//! multiplicative functions and primes in the class 1 mod 4.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Jacobi symbol `(a/n)` for odd `n > 0`.
pub fn jacobi(a: u64, n: u64) -> i8 {
    debug_assert!(n & 1 == 1, "jacobi needs an odd modulus");
    let mut a = a % n;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz & 1 == 1 && matches!(n & 7, 3 | 5) {
            t = -t;
        }
        if a & 3 == 3 && n & 3 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol without the `d != 0` check. Hot loops use this.
#[inline]
pub(crate) fn kron(d: i64, n: u64) -> i8 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let tz = n.trailing_zeros();
    let odd = n >> tz;
    let mut sign = 1i8;
    if tz > 0 {
        if d & 1 == 0 {
            return 0;
        }
        if tz & 1 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            sign = -1;
        }
    }
    if odd == 1 {
        return sign;
    }
    let a = (d as i128).rem_euclid(odd as i128) as u64;
    sign * jacobi(a, odd)
}

/// The Kronecker symbol `(d/n)`.
///
/// `n = 0` gives 1 for `d = ±1` and 0 otherwise. `d = 0` is rejected.
pub fn kronecker(d: i64, n: u64) -> Result<i8> {
    if d == 0 {
        return Err(Error::ZeroDiscriminant);
    }
    Ok(kron(d, n))
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// `d = 1`, or squarefree `d = 1 (mod 4)`, or `d = 4m` with squarefree `m = 2, 3 (mod 4)`.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// A nonzero integer congruent to 0 or 1 mod 4.
///
/// `1` is admitted and stands for the trivial character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || !matches!(d.rem_euclid(4), 0 | 1) {
            return Err(Error::NotDiscriminant(d));
        }
        Ok(Discriminant(d))
    }

    pub fn fundamental(d: i64) -> Result<Self> {
        if !is_fundamental(d) {
            return Err(Error::NotFundamental(d));
        }
        Ok(Discriminant(d))
    }

    pub const ONE: Discriminant = Discriminant(1);

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn is_fundamental(self) -> bool {
        is_fundamental(self.0)
    }

    /// `chi_d(n) = (d/n)`.
    #[inline]
    pub fn chi(self, n: u64) -> i8 {
        kron(self.0, n)
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A shape `z` of the diagonal form `x^2 + z y^2`: squarefree, `z = 1 (mod 4)`, `z > 1`.
///
/// For such `z` the ring of integers of `Q(sqrt(-z))` is `Z[sqrt(-z)]`, so the
/// form has discriminant `z* = -4z` and exactly two automorphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct ShapeZ(u64);

impl ShapeZ {
    pub fn new(z: u64) -> Result<Self> {
        // z = 1 is excluded: Q(i) has four units, which breaks g_z = 2.
        if z <= 1 || z % 4 != 1 || !is_squarefree(z) || z > (i64::MAX as u64) / 16 {
            return Err(Error::NotInW(z));
        }
        Ok(ShapeZ(z))
    }

    pub fn z(self) -> u64 {
        self.0
    }

    /// `z* = -4z`.
    pub fn z_star(self) -> i64 {
        -4 * self.0 as i64
    }

    pub fn discriminant(self) -> Discriminant {
        Discriminant(self.z_star())
    }

    /// Number of automorphs of `x^2 + z y^2`.
    pub fn g_z(self) -> u32 {
        2
    }
}

impl TryFrom<u64> for ShapeZ {
    type Error = Error;
    fn try_from(z: u64) -> Result<Self> {
        ShapeZ::new(z)
    }
}

impl From<ShapeZ> for u64 {
    fn from(z: ShapeZ) -> u64 {
        z.0
    }
}

impl fmt::Display for ShapeZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Trial-division factorization, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mobius(n: u64) -> i8 {
    assert!(n >= 1, "mobius(0) is undefined");
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn tau(n: u64) -> u64 {
    assert!(n >= 1, "tau(0) is undefined");
    factorize(n).iter().map(|&(_, e)| u64::from(e) + 1).product()
}

/// Splits `n = n1 * n2^2` with `n1` squarefree; returns `(n1, n2)`.
pub fn squarefree_part(n: u64) -> (u64, u64) {
    assert!(n >= 1, "squarefree_part(0) is undefined");
    let mut n1 = 1;
    let mut n2 = 1;
    for (p, e) in factorize(n) {
        n2 *= p.pow(e / 2);
        if e % 2 == 1 {
            n1 *= p;
        }
    }
    (n1, n2)
}

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// All fundamental discriminants `d` (either sign, `1` included) with `d | m`,
/// ordered by `|d|` and then by sign.
pub fn fundamental_divisors(m: u64) -> Vec<Discriminant> {
    assert!(m >= 1, "fundamental_divisors needs m >= 1");
    let mut out: Vec<Discriminant> = divisors(m)
        .into_iter()
        .flat_map(|d| [-(d as i64), d as i64])
        .filter(|&d| is_fundamental(d))
        .map(Discriminant)
        .collect();
    out.sort_by_key(|d| (d.0.unsigned_abs(), d.0));
    out
}

/// Möbius values `mu(0..=n)`, with `mu(0) = 0`.
pub fn mobius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    if n == 0 {
        mu[0] = 0;
        return mu;
    }
    mu[0] = 0;
    let mut composite = vec![false; n + 1];
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        for m in (p..=n).step_by(p) {
            if m > p {
                composite[m] = true;
            }
            mu[m] = -mu[m];
        }
        if let Some(p2) = p.checked_mul(p) {
            for m in (p2..=n).step_by(p2) {
                mu[m] = 0;
            }
        }
    }
    mu
}

/// Primes `<= n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    is_prime[1] = false;
    let mut i = 2;
    while i * i <= n {
        if is_prime[i] {
            for m in (i * i..=n).step_by(i) {
                is_prime[m] = false;
            }
        }
        i += 1;
    }
    is_prime
        .iter()
        .enumerate()
        .filter(|&(_, &b)| b)
        .map(|(p, _)| p as u64)
        .collect()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// Which primes `p = 1 (mod 4)` below the cutoff make up the subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetKind {
    /// Every prime `p = 1 (mod 4)`.
    P,
    /// Primes whose 0-based index in the ordered list of `P` is a multiple of `stride`.
    Q { stride: usize },
    Explicit(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSubset {
    pub cutoff: u64,
    pub kind: SubsetKind,
    pub primes: Vec<u64>,
}

impl PrimeSubset {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn shapes(&self) -> Vec<ShapeZ> {
        self.primes
            .iter()
            .map(|&p| ShapeZ::new(p).expect("primes = 1 mod 4 are shapes"))
            .collect()
    }
}

/// Primes `p = 1 (mod 4)` with `p <= cutoff`, thinned according to `kind`.
pub fn primes_1mod4(cutoff: u64, kind: SubsetKind) -> Result<PrimeSubset> {
    let all: Vec<u64> = primes_up_to(cutoff)
        .into_iter()
        .filter(|p| p % 4 == 1)
        .collect();
    let primes = match &kind {
        SubsetKind::P => all,
        SubsetKind::Q { stride } => {
            if *stride == 0 {
                return Err(Error::invalid("subset stride must be at least 1"));
            }
            all.into_iter().step_by(*stride).collect()
        }
        SubsetKind::Explicit(list) => {
            let mut list = list.clone();
            list.sort_unstable();
            list.dedup();
            if let Some(&bad) = list
                .iter()
                .find(|&&p| !is_prime(p) || p % 4 != 1 || p > cutoff)
            {
                return Err(Error::invalid(format!(
                    "{bad} is not a prime = 1 (mod 4) below {cutoff}"
                )));
            }
            list
        }
    };
    Ok(PrimeSubset {
        cutoff,
        kind,
        primes,
    })
}
