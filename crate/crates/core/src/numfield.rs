//! Exact arithmetic substrate: factorization, square classes, and the local
//! symbols (Legendre, Hilbert) over the places of ℚ.
//!
//! Elements of every supported field are represented as exact rationals:
//! a ℚ_p element is a rational together with the prime, an 𝔽_q element is a
//! rational whose denominator is a unit mod p. No truncation happens anywhere;
//! every downstream invariant is a finite symbol.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Ground field descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Reals,
    FiniteField { q: u64 },
    PAdic { p: u64 },
    Rationals,
}

impl FieldSpec {
    pub fn reals() -> Self {
        FieldSpec::Reals
    }

    pub fn rationals() -> Self {
        FieldSpec::Rationals
    }

    pub fn finite(q: u64) -> Result<Self> {
        if prime_power(q).is_none() {
            return Err(Error::NotPrimePower("q", q));
        }
        Ok(FieldSpec::FiniteField { q })
    }

    pub fn padic(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime("p", p));
        }
        Ok(FieldSpec::PAdic { p })
    }

    /// Characteristic: 0 except for finite fields.
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::FiniteField { q } => prime_power(*q).expect("validated").0,
            _ => 0,
        }
    }

    pub fn is_char_two(&self) -> bool {
        self.characteristic() == 2
    }

    /// Rejects characteristic 2; quadratic-form and Clifford machinery
    /// requires 2 invertible.
    pub fn require_char_not_two(&self) -> Result<()> {
        if self.is_char_two() {
            Err(Error::CharacteristicTwo)
        } else {
            Ok(())
        }
    }

    /// Checks that `x` is a nonzero element of this field.
    /// For 𝔽_q the denominator (and for nonzero elements, the numerator)
    /// must be prime to p.
    pub fn check_element(&self, x: &Rat) -> Result<()> {
        if x.is_zero() {
            return Err(Error::ZeroInput("field element"));
        }
        if let FieldSpec::FiniteField { q } = self {
            let p = prime_power(*q).expect("validated").0;
            let p = Int::from(p);
            if x.denom().mod_floor(&p).is_zero() {
                return Err(Error::NotInField {
                    elem: x.to_string(),
                    field: self.to_string(),
                    reason: format!("denominator divisible by {p}"),
                });
            }
            if x.numer().mod_floor(&p).is_zero() {
                return Err(Error::NotInField {
                    elem: x.to_string(),
                    field: self.to_string(),
                    reason: format!("reduces to zero mod {p}"),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Reals => write!(f, "R"),
            FieldSpec::FiniteField { q } => write!(f, "F{q}"),
            FieldSpec::PAdic { p } => write!(f, "Q{p}"),
            FieldSpec::Rationals => write!(f, "Q"),
        }
    }
}

/// A place of ℚ. The real place sorts before every finite place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real,
    Finite(u64),
}

impl Place {
    pub fn finite(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime("place", p));
        }
        Ok(Place::Finite(p))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "oo"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

// Wire format: the real place is the string "oo", a finite place is its prime.
impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Place::Real => s.serialize_str("oo"),
            Place::Finite(p) => s.serialize_u64(*p),
        }
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) if s == "oo" => Ok(Place::Real),
            serde_json::Value::Number(n) => {
                let p = n
                    .as_u64()
                    .ok_or_else(|| D::Error::custom("finite place must be a positive prime"))?;
                Place::finite(p).map_err(D::Error::custom)
            }
            other => Err(D::Error::custom(format!(
                "expected \"oo\" or a prime, got {other}"
            ))),
        }
    }
}

/// Sign and prime factorization, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> Int {
        let mut v = Int::from(self.sign);
        for &(p, e) in &self.factors {
            v *= Int::from(p).pow(e);
        }
        v
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).map_or(false, |dd| dd <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Decomposes a prime power q = p^m, m >= 1.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut n = q;
    let mut p = 0u64;
    for d in 2..=q {
        if d * d > n {
            break;
        }
        if n % d == 0 {
            p = d;
            break;
        }
    }
    if p == 0 {
        return Some((q, 1)); // q itself prime
    }
    let mut m = 0u32;
    while n % p == 0 {
        n /= p;
        m += 1;
    }
    if n == 1 {
        Some((p, m))
    } else {
        None
    }
}

/// Trial-division factorization of a nonzero integer.
pub fn factorize(n: &Int) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::ZeroInput("factorize"));
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m: u128 = n
        .abs()
        .try_into()
        .map_err(|_| Error::Invalid(format!("{n} too large to factor by trial division")))?;
    let mut factors = Vec::new();
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            factors.push((p, e));
        }
    };
    let mut e = 0;
    while m % 2 == 0 {
        m /= 2;
        e += 1;
    }
    push(2, e);
    let mut d: u128 = 3;
    while d * d <= m {
        let mut e = 0;
        while m % d == 0 {
            m /= d;
            e += 1;
        }
        push(d as u64, e);
        d += 2;
    }
    if m > 1 {
        let p: u64 = m
            .try_into()
            .map_err(|_| Error::Invalid("prime cofactor exceeds u64".into()))?;
        push(p, 1);
    }
    Ok(Factorization { sign, factors })
}

/// Signed squarefree part: the canonical ℚ-square-class representative.
pub fn squarefree_part(n: &Int) -> Result<Int> {
    let f = factorize(n)?;
    let mut v = Int::from(f.sign);
    for (p, e) in f.factors {
        if e % 2 == 1 {
            v *= Int::from(p);
        }
    }
    Ok(v)
}

/// Legendre symbol (a | p) for an odd prime p.
pub fn legendre_symbol(a: &Int, p: u64) -> Result<i32> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotPrime("legendre_symbol modulus (odd prime)", p));
    }
    let pp = Int::from(p);
    let r = a.mod_floor(&pp);
    if r.is_zero() {
        return Ok(0);
    }
    let t = r.modpow(&Int::from((p - 1) / 2), &pp);
    Ok(if t.is_one() { 1 } else { -1 })
}

/// p-adic valuation of a nonzero rational, with the unit part.
pub fn padic_valuation(x: &Rat, p: u64) -> (i64, Rat) {
    assert!(!x.is_zero());
    let pp = Int::from(p);
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut v: i64 = 0;
    while num.mod_floor(&pp).is_zero() {
        num /= &pp;
        v += 1;
    }
    while den.mod_floor(&pp).is_zero() {
        den /= &pp;
        v -= 1;
    }
    (v, Rat::new(num, den))
}

/// Reduces a p-adic unit (rational with v_p = 0) mod p^k, returning a value
/// in [0, p^k).
pub fn unit_residue(u: &Rat, p: u64, k: u32) -> u64 {
    let m = Int::from(p.pow(k));
    let num = u.numer().mod_floor(&m);
    let den = u.denom().mod_floor(&m);
    // denominator is a unit mod p^k; invert by Euclid
    let inv = mod_inverse(&den, &m).expect("denominator is a unit");
    let r = (num * inv).mod_floor(&m);
    r.try_into().expect("residue fits in u64")
}

fn mod_inverse(a: &Int, m: &Int) -> Option<Int> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Hilbert symbol (a, b)_v over the completion of ℚ at v.
///
/// +1 iff z² = a x² + b y² has a nontrivial solution. At p = 2 the
/// ε/ω exponent formula is used; the classical error hotspot, so tests
/// arbitrate against a brute-force solubility oracle.
pub fn hilbert_symbol(a: &Rat, b: &Rat, v: Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput("hilbert_symbol argument"));
    }
    match v {
        Place::Real => Ok(if a.is_negative() && b.is_negative() {
            -1
        } else {
            1
        }),
        Place::Finite(p) => {
            let (alpha, u) = padic_valuation(a, p);
            let (beta, w) = padic_valuation(b, p);
            if p == 2 {
                let u8r = unit_residue(&u, 2, 3); // mod 8
                let w8r = unit_residue(&w, 2, 3);
                let eps = |x: u64| ((x - 1) / 2) % 2;
                let omega = |x: u64| ((x * x - 1) / 8) % 2;
                let e = eps(u8r) * eps(w8r)
                    + (alpha.rem_euclid(2) as u64) * omega(w8r)
                    + (beta.rem_euclid(2) as u64) * omega(u8r);
                Ok(if e % 2 == 1 { -1 } else { 1 })
            } else {
                let ur = Int::from(unit_residue(&u, p, 1));
                let wr = Int::from(unit_residue(&w, p, 1));
                let mut s = 1;
                if alpha.rem_euclid(2) == 1 && beta.rem_euclid(2) == 1 && ((p - 1) / 2) % 2 == 1 {
                    s = -s;
                }
                if beta.rem_euclid(2) == 1 {
                    s *= legendre_symbol(&ur, p)?;
                }
                if alpha.rem_euclid(2) == 1 {
                    s *= legendre_symbol(&wr, p)?;
                }
                Ok(s)
            }
        }
    }
}

/// The places where (a, b)_v could be nontrivial: the real place, 2, and the
/// primes appearing in a or b.
pub fn relevant_places(values: &[&Rat]) -> Result<Vec<Place>> {
    let mut primes = std::collections::BTreeSet::new();
    primes.insert(2);
    for x in values {
        for n in [x.numer(), x.denom()] {
            for (p, _) in factorize(n)?.factors {
                primes.insert(p);
            }
        }
    }
    let mut places = vec![Place::Real];
    places.extend(primes.into_iter().map(Place::Finite));
    Ok(places)
}

/// Smallest positive quadratic non-residue mod an odd prime.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&n| legendre_symbol(&Int::from(n), p) == Ok(-1))
        .expect("every odd prime has a non-residue")
}

/// Canonical square-class representative.
///
/// - ℚ: signed squarefree integer
/// - ℝ: ±1
/// - ℚ_p, p odd: one of {1, u, p, up}, u the smallest positive non-residue
/// - ℚ_2: unit part in {1, 3, 5, 7} (mod 8) times 1 or 2
/// - 𝔽_q, q odd: 1 or the smallest positive non-residue mod p (trivially 1
///   when the field degree is even, since prime-field non-squares become
///   squares there); 𝔽_{2^m}: always 1 (Frobenius)
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareClass {
    pub field: FieldSpec,
    pub rep: Int,
}

impl SquareClass {
    pub fn is_trivial(&self) -> bool {
        self.rep.is_one()
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod squares in {})", self.rep, self.field)
    }
}

pub fn square_class(x: &Rat, k: &FieldSpec) -> Result<SquareClass> {
    k.check_element(x)?;
    let rep = match k {
        FieldSpec::Rationals => squarefree_part(&(x.numer() * x.denom()))?,
        FieldSpec::Reals => {
            if x.is_negative() {
                Int::from(-1)
            } else {
                Int::one()
            }
        }
        FieldSpec::PAdic { p } => {
            let (v, u) = padic_valuation(x, *p);
            let vpart = if v.rem_euclid(2) == 1 { *p } else { 1 };
            let upart = if *p == 2 {
                unit_residue(&u, 2, 3)
            } else if legendre_symbol(&Int::from(unit_residue(&u, *p, 1)), *p)? == 1 {
                1
            } else {
                smallest_nonresidue(*p)
            };
            Int::from(upart * vpart)
        }
        FieldSpec::FiniteField { q } => {
            let (p, m) = prime_power(*q).expect("validated");
            if p == 2 {
                Int::one()
            } else {
                // reduce into the prime field; square in F_{p^m} iff m even
                // or a square mod p
                let den_inv =
                    mod_inverse(&x.denom().mod_floor(&Int::from(p)), &Int::from(p)).unwrap();
                let r = (x.numer() * den_inv).mod_floor(&Int::from(p));
                if m % 2 == 0 || legendre_symbol(&r, p)? == 1 {
                    Int::one()
                } else {
                    Int::from(smallest_nonresidue(p))
                }
            }
        }
    };
    Ok(SquareClass {
        field: k.clone(),
        rep,
    })
}

/// Convenience: rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from(Int::from(n))
}

/// Parses "n" or "n/d" into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<Int>()
            .map_err(|e| Error::Invalid(format!("bad integer '{t}': {e}")))
    };
    match s.split_once('/') {
        None => Ok(Rat::from(parse_int(s)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::ZeroInput("denominator"));
            }
            Ok(Rat::new(parse_int(n)?, den))
        }
    }
}
