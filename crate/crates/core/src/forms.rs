//! Reduced binary quadratic forms of negative discriminant, class numbers and
//! the genus pairs `z* = f g`.

use std::io::Write;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, factorize, is_fundamental, Discriminant, ShapeZ};
use crate::error::{Error, Result};

/// A reduced positive definite form `a x^2 + b xy + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl ReducedForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        a > 0 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }
}

/// All primitive reduced forms of discriminant `d < 0`.
///
/// Their number is the class number `h(d)`.
pub fn reduced_forms(d: i64) -> Result<Vec<ReducedForm>> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::invalid(format!(
            "{d} is not a negative discriminant"
        )));
    }
    let mut out = Vec::new();
    // a <= sqrt(|d| / 3)
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let form = ReducedForm { a, b, c: num / (4 * a) };
            if form.is_reduced() && form.is_primitive() {
                out.push(form);
            }
        }
        a += 1;
    }
    Ok(out)
}

pub fn class_number(d: i64) -> Result<usize> {
    reduced_forms(d).map(|f| f.len())
}

/// An unordered factorization `z* = f g` into fundamental discriminants,
/// stored with `|f| < |g|`. `(1, z*)` is the principal genus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenusPair {
    f: Discriminant,
    g: Discriminant,
}

impl GenusPair {
    pub fn new(z: ShapeZ, f: i64, g: i64) -> Result<Self> {
        let bad = || Error::InvalidGenusPair {
            f,
            g,
            z_star: z.z_star(),
        };
        if f.checked_mul(g) != Some(z.z_star()) || !is_fundamental(f) || !is_fundamental(g) {
            return Err(bad());
        }
        let (f, g) = if f.unsigned_abs() <= g.unsigned_abs() {
            (f, g)
        } else {
            (g, f)
        };
        Ok(GenusPair {
            f: Discriminant::fundamental(f)?,
            g: Discriminant::fundamental(g)?,
        })
    }

    pub fn principal(z: ShapeZ) -> Self {
        GenusPair {
            f: Discriminant::ONE,
            g: z.discriminant(),
        }
    }

    pub fn f(&self) -> Discriminant {
        self.f
    }

    pub fn g(&self) -> Discriminant {
        self.g
    }

    pub fn is_principal(&self) -> bool {
        self.f.value() == 1
    }

    pub fn z_star(&self) -> i64 {
        self.f.value() * self.g.value()
    }
}

/// Every genus pair of `z* = -4z`, principal first.
pub fn genus_pairs(z: ShapeZ) -> Vec<GenusPair> {
    let zs = z.z_star();
    let mut out: Vec<GenusPair> = divisors(zs.unsigned_abs())
        .into_iter()
        .flat_map(|d| [d as i64, -(d as i64)])
        .filter(|&f| f.unsigned_abs() * f.unsigned_abs() < zs.unsigned_abs())
        .filter_map(|f| GenusPair::new(z, f, zs / f).ok())
        .collect();
    out.sort_by_key(|p| (p.f.value().unsigned_abs(), p.f.value()));
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupInfo {
    pub z: ShapeZ,
    pub forms: Vec<ReducedForm>,
    pub h: usize,
    pub genus_pairs: Vec<GenusPair>,
    /// Every class-group character is a genus character.
    pub one_class_per_genus: bool,
}

pub fn class_group_info(z: ShapeZ) -> ClassGroupInfo {
    let forms = reduced_forms(z.z_star()).expect("-4z is a negative discriminant");
    let genus_pairs = genus_pairs(z);
    ClassGroupInfo {
        z,
        h: forms.len(),
        one_class_per_genus: forms.len() == genus_pairs.len(),
        forms,
        genus_pairs,
    }
}

/// Number of distinct primes dividing `n`.
pub fn omega(n: u64) -> u32 {
    factorize(n).len() as u32
}

/// CSV with columns `a,b,c`.
pub fn write_forms_csv<W: Write>(forms: &[ReducedForm], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for f in forms {
        out.serialize(f)?;
    }
    out.flush()?;
    Ok(())
}
