use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::AlgError;

/// GF(p) or GF(p²).
///
/// Elements are `u32` codes in `0..size()`. In GF(p²) the code `a + b·p`
/// stands for `a + b·x`, where `x` is a root of the modulus `x² + c1·x + c0`.
#[derive(Clone)]
pub struct Field {
    p: u32,
    /// `(c1, c0)` of the monic modulus, `None` for a prime field.
    modulus: Option<(u32, u32)>,
    inv: Arc<Vec<u32>>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.modulus {
            None => write!(f, "gf({})", self.p),
            Some(_) => write!(f, "gf({}^2)", self.p),
        }
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Largest supported characteristic; keeps every product below 2^32.
const MAX_P: u32 = 1 << 15;

impl Field {
    pub fn prime(p: u32) -> Result<Field, AlgError> {
        if !is_prime(p) || p > MAX_P {
            return Err(AlgError::NotPrime(p));
        }
        Ok(Self::build(p, None))
    }

    /// GF(p²) with the lexicographically smallest monic irreducible
    /// `x² + c1·x + c0`, ordered by `(c1, c0)`.
    pub fn quadratic(p: u32) -> Result<Field, AlgError> {
        if !is_prime(p) || p > 181 {
            return Err(AlgError::NotPrime(p));
        }
        let irreducible = |c1: u32, c0: u32| (0..p).all(|r| !(r * r + c1 * r + c0).is_multiple_of(p));
        let modulus = (0..p)
            .flat_map(|c1| (0..p).map(move |c0| (c1, c0)))
            .find(|&(c1, c0)| irreducible(c1, c0))
            .expect("an irreducible quadratic exists for every prime");
        Ok(Self::build(p, Some(modulus)))
    }

    fn build(p: u32, modulus: Option<(u32, u32)>) -> Field {
        let mut f = Field {
            p,
            modulus,
            inv: Arc::new(Vec::new()),
        };
        let q = f.size();
        let inv = (0..q)
            .map(|a| if a == 0 { 0 } else { f.pow(a, q as u64 - 2) })
            .collect();
        f.inv = Arc::new(inv);
        f
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Degree over the prime field (1 or 2).
    pub fn degree(&self) -> u32 {
        if self.modulus.is_some() {
            2
        } else {
            1
        }
    }

    pub fn size(&self) -> u32 {
        self.p.pow(self.degree())
    }

    pub fn modulus(&self) -> Option<(u32, u32)> {
        self.modulus
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// Embeds an integer via the prime subfield.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    fn split(&self, a: u32) -> (u32, u32) {
        (a % self.p, a / self.p)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        match self.modulus {
            None => (a + b) % p,
            Some(_) => {
                let ((a0, a1), (b0, b1)) = (self.split(a), self.split(b));
                (a0 + b0) % p + (a1 + b1) % p * p
            }
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        let p = self.p;
        let (a0, a1) = self.split(a);
        match self.modulus {
            None => (p - a) % p,
            Some(_) => (p - a0) % p + (p - a1) % p * p,
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        match self.modulus {
            None => a * b % p,
            Some((c1, c0)) => {
                let ((a0, a1), (b0, b1)) = (self.split(a), self.split(b));
                // x² = -c1·x - c0
                let hi = a1 * b1 % p;
                let lo = (a0 * b0 + hi * (p - c0)) % p;
                let mid = (a0 * b1 + a1 * b0 + hi * (p - c1)) % p;
                lo + mid * p
            }
        }
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.inv[a as usize])
    }
}

impl FromStr for Field {
    type Err = AlgError;

    /// Accepts `gf(p)` and `gf(p^2)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgError::FieldSpec(s.to_string());
        let inner = s
            .trim()
            .to_ascii_lowercase()
            .strip_prefix("gf(")
            .and_then(|r| r.strip_suffix(')'))
            .map(str::to_string)
            .ok_or_else(bad)?;
        match inner.split_once('^') {
            None => Field::prime(inner.trim().parse().map_err(|_| bad())?),
            Some((p, "2")) => Field::quadratic(p.trim().parse().map_err(|_| bad())?),
            Some(_) => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axioms(f: &Field) {
        let q = f.size();
        for a in 0..q {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..q {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..q {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                }
            }
        }
    }

    #[test]
    fn field_axioms() {
        for s in ["gf(2)", "gf(3)", "gf(5)", "gf(2^2)", "gf(3^2)", "gf(5^2)"] {
            axioms(&s.parse().unwrap());
        }
    }

    #[test]
    fn smallest_modulus() {
        assert_eq!(Field::quadratic(2).unwrap().modulus(), Some((1, 1)));
        assert_eq!(Field::quadratic(3).unwrap().modulus(), Some((0, 1)));
        assert_eq!(Field::quadratic(5).unwrap().modulus(), Some((0, 2)));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!("gf(4)".parse::<Field>().is_err());
        assert!("gf(2^3)".parse::<Field>().is_err());
        assert!("f(2)".parse::<Field>().is_err());
        assert_eq!("GF(3^2)".parse::<Field>().unwrap().size(), 9);
        assert_eq!(Field::prime(7).unwrap().to_string(), "gf(7)");
    }
}
