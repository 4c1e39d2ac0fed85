//! Exact scalar arithmetic over Q, cyclotomic fields Q(zeta_m) and prime
//! fields F_p.
//!
//! Cyclotomic elements are kept reduced modulo the m-th cyclotomic polynomial
//! so that equality of canonical forms is syntactic; every homogeneity check
//! downstream relies on that.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no root of unity of order {n} in {field}")]
    NoSuchRoot { field: String, n: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("bad field parameter: {0}")]
    BadParameter(String),
    #[error("cannot parse scalar '{input}': {reason}")]
    Parse { input: String, reason: String },
}

/// A field the toolkit can compute in exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldDescriptor {
    Rational,
    Cyclotomic { m: u64 },
    Prime { p: u64 },
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rational => write!(f, "Q"),
            FieldDescriptor::Cyclotomic { m } => write!(f, "Q(z_{m})"),
            FieldDescriptor::Prime { p } => write!(f, "F_{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Euler's totient, by trial-division factoring. `m` is tiny throughout.
pub fn euler_phi(m: u64) -> u64 {
    let mut n = m;
    let mut result = m;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            while n.is_multiple_of(d) {
                n /= d;
            }
            result = result / d * (d - 1);
        }
        d += 1;
    }
    if n > 1 {
        result = result / n * (n - 1);
    }
    result
}

impl FieldDescriptor {
    pub fn rational() -> Self {
        FieldDescriptor::Rational
    }

    pub fn cyclotomic(m: u64) -> Result<Self, ScalarError> {
        if m == 0 {
            return Err(ScalarError::BadParameter("cyclotomic index must be >= 1".into()));
        }
        Ok(FieldDescriptor::Cyclotomic { m })
    }

    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(FieldDescriptor::Prime { p })
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldDescriptor::Prime { p } => *p,
            _ => 0,
        }
    }

    /// Degree of the coefficient representation (1 for Q and F_p).
    pub fn degree(&self) -> usize {
        match self {
            FieldDescriptor::Cyclotomic { m } => euler_phi(*m) as usize,
            _ => 1,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldDescriptor::Rational => Scalar {
                field: self.clone(),
                repr: ScalarRepr::Rational(BigRational::zero()),
            },
            FieldDescriptor::Cyclotomic { .. } => Scalar {
                field: self.clone(),
                repr: ScalarRepr::Cyclotomic(vec![BigRational::zero(); self.degree()]),
            },
            FieldDescriptor::Prime { .. } => Scalar {
                field: self.clone(),
                repr: ScalarRepr::Prime(0),
            },
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_integer(1)
    }

    pub fn from_integer(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match self {
            FieldDescriptor::Rational => Scalar {
                field: self.clone(),
                repr: ScalarRepr::Rational(BigRational::from_integer(n.clone())),
            },
            FieldDescriptor::Cyclotomic { .. } => {
                let mut coeffs = vec![BigRational::zero(); self.degree()];
                coeffs[0] = BigRational::from_integer(n.clone());
                Scalar { field: self.clone(), repr: ScalarRepr::Cyclotomic(coeffs) }
            }
            FieldDescriptor::Prime { p } => {
                let p_big = BigInt::from(*p);
                let mut r = n % &p_big;
                if r.is_negative() {
                    r += &p_big;
                }
                let (_, digits) = r.to_u64_digits();
                Scalar {
                    field: self.clone(),
                    repr: ScalarRepr::Prime(digits.first().copied().unwrap_or(0)),
                }
            }
        }
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar, ScalarError> {
        if den == 0 {
            return Err(ScalarError::DivisionByZero);
        }
        self.from_integer(num).div(&self.from_integer(den))
    }

    /// The m-th root of unity generating the field, for cyclotomic fields.
    pub fn zeta(&self) -> Result<Scalar, ScalarError> {
        match self {
            FieldDescriptor::Cyclotomic { m } => {
                let deg = self.degree();
                let mut coeffs = vec![BigRational::zero(); deg];
                if *m == 1 {
                    coeffs[0] = BigRational::one();
                } else if *m == 2 {
                    coeffs[0] = -BigRational::one();
                } else {
                    coeffs[1] = BigRational::one();
                }
                Ok(Scalar { field: self.clone(), repr: ScalarRepr::Cyclotomic(coeffs) })
            }
            _ => Err(ScalarError::BadParameter(format!("{self} has no distinguished root"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum ScalarRepr {
    Rational(BigRational),
    Cyclotomic(Vec<BigRational>),
    Prime(u64),
}

/// An exact field element, reduced to canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    field: FieldDescriptor,
    repr: ScalarRepr,
}

impl Scalar {
    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            ScalarRepr::Rational(r) => r.is_zero(),
            ScalarRepr::Cyclotomic(c) => c.iter().all(|x| x.is_zero()),
            ScalarRepr::Prime(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field.one()
    }

    fn check_field(&self, other: &Scalar) -> Result<(), ScalarError> {
        if self.field != other.field {
            return Err(ScalarError::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_field(other)?;
        let repr = match (&self.repr, &other.repr) {
            (ScalarRepr::Rational(a), ScalarRepr::Rational(b)) => ScalarRepr::Rational(a + b),
            (ScalarRepr::Cyclotomic(a), ScalarRepr::Cyclotomic(b)) => {
                ScalarRepr::Cyclotomic(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (ScalarRepr::Prime(a), ScalarRepr::Prime(b)) => {
                let p = self.field.characteristic();
                ScalarRepr::Prime(((*a as u128 + *b as u128) % p as u128) as u64)
            }
            _ => unreachable!("repr follows field"),
        };
        Ok(Scalar { field: self.field.clone(), repr })
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        let repr = match &self.repr {
            ScalarRepr::Rational(a) => ScalarRepr::Rational(-a),
            ScalarRepr::Cyclotomic(a) => {
                ScalarRepr::Cyclotomic(a.iter().map(|x| -x.clone()).collect())
            }
            ScalarRepr::Prime(a) => {
                let p = self.field.characteristic();
                ScalarRepr::Prime(if *a == 0 { 0 } else { p - a })
            }
        };
        Scalar { field: self.field.clone(), repr }
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_field(other)?;
        let repr = match (&self.repr, &other.repr) {
            (ScalarRepr::Rational(a), ScalarRepr::Rational(b)) => ScalarRepr::Rational(a * b),
            (ScalarRepr::Cyclotomic(a), ScalarRepr::Cyclotomic(b)) => {
                let m = match self.field {
                    FieldDescriptor::Cyclotomic { m } => m,
                    _ => unreachable!(),
                };
                let product = poly_mul(a, b);
                ScalarRepr::Cyclotomic(reduce_mod_cyclotomic(product, m))
            }
            (ScalarRepr::Prime(a), ScalarRepr::Prime(b)) => {
                let p = self.field.characteristic();
                ScalarRepr::Prime(((*a as u128 * *b as u128) % p as u128) as u64)
            }
            _ => unreachable!("repr follows field"),
        };
        Ok(Scalar { field: self.field.clone(), repr })
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let repr = match &self.repr {
            ScalarRepr::Rational(a) => ScalarRepr::Rational(a.recip()),
            ScalarRepr::Cyclotomic(a) => {
                let m = match self.field {
                    FieldDescriptor::Cyclotomic { m } => m,
                    _ => unreachable!(),
                };
                let phi = rat_cyclotomic(m);
                let inv = poly_mod_inverse(a, &phi);
                ScalarRepr::Cyclotomic(pad_to(inv, self.field.degree()))
            }
            ScalarRepr::Prime(a) => {
                let p = self.field.characteristic();
                ScalarRepr::Prime(pow_mod(*a, p - 2, p))
            }
        };
        Ok(Scalar { field: self.field.clone(), repr })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Scalar, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.field.one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// Multiplicative order, up to a search bound. None if not a root of unity
    /// within the bound or zero.
    pub fn multiplicative_order(&self, bound: u64) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc.is_one() {
                return Some(k);
            }
            acc = acc.mul(self).ok()?;
        }
        None
    }
}

fn pow_mod(base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b = base as u128 % p as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u128;
        }
        b = b * b % p as u128;
        exp >>= 1;
    }
    acc as u64
}

// ---------------------------------------------------------------------------
// Polynomial helpers over Q (dense, constant term first).

fn pad_to(mut v: Vec<BigRational>, len: usize) -> Vec<BigRational> {
    v.truncate(trim_len(&v));
    while v.len() < len {
        v.push(BigRational::zero());
    }
    v
}

fn trim_len(v: &[BigRational]) -> usize {
    let mut n = v.len();
    while n > 0 && v[n - 1].is_zero() {
        n -= 1;
    }
    n
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let (la, lb) = (trim_len(a), trim_len(b));
    if la == 0 || lb == 0 {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); la + lb - 1];
    for i in 0..la {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..lb {
            if b[j].is_zero() {
                continue;
            }
            out[i + j] += &a[i] * &b[j];
        }
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    let dm = trim_len(m);
    assert!(dm > 0, "modulus must be nonzero");
    let mut r: Vec<BigRational> = a[..trim_len(a)].to_vec();
    while trim_len(&r) >= dm {
        let dr = trim_len(&r);
        let lead = r[dr - 1].clone() / m[dm - 1].clone();
        let shift = dr - dm;
        for i in 0..dm {
            let delta = &lead * &m[i];
            r[shift + i] -= delta;
        }
        r.truncate(trim_len(&r));
    }
    r
}

fn poly_divmod(a: &[BigRational], m: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let dm = trim_len(m);
    assert!(dm > 0, "divisor must be nonzero");
    let mut r: Vec<BigRational> = a[..trim_len(a)].to_vec();
    let mut q = vec![BigRational::zero(); trim_len(a).saturating_sub(dm) + 1];
    while trim_len(&r) >= dm {
        let dr = trim_len(&r);
        let lead = r[dr - 1].clone() / m[dm - 1].clone();
        let shift = dr - dm;
        q[shift] = lead.clone();
        for i in 0..dm {
            let delta = &lead * &m[i];
            r[shift + i] -= delta;
        }
        r.truncate(trim_len(&r));
    }
    (q, r)
}

/// Inverse of `a` modulo the monic irreducible `m`, by extended Euclid.
fn poly_mod_inverse(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    // Invariants: r0 = t0*a (mod m), r1 = t1*a (mod m).
    let mut r0: Vec<BigRational> = m[..trim_len(m)].to_vec();
    let mut r1: Vec<BigRational> = a[..trim_len(a)].to_vec();
    let mut t0: Vec<BigRational> = vec![];
    let mut t1: Vec<BigRational> = vec![BigRational::one()];
    while trim_len(&r1) > 0 {
        let (q, r) = poly_divmod(&r0, &r1);
        let qt = poly_mul(&q, &t1);
        let mut t = t0.clone();
        t.resize(t.len().max(qt.len()), BigRational::zero());
        for (i, c) in qt.iter().enumerate() {
            t[i] -= c;
        }
        t.truncate(trim_len(&t));
        r0 = r1;
        r1 = r;
        t0 = t1;
        t1 = t;
    }
    let d = trim_len(&r0);
    assert_eq!(d, 1, "modulus must be irreducible and a nonzero");
    let lead = r0[0].clone();
    let mut out = poly_rem(&t0, m);
    for c in &mut out {
        *c /= lead.clone();
    }
    out
}

/// The m-th cyclotomic polynomial, integer coefficients, constant term first.
pub fn cyclotomic_polynomial(m: u64) -> Vec<BigInt> {
    assert!(m >= 1, "cyclotomic index must be >= 1");
    // Phi_m = (z^m - 1) / prod_{d | m, d < m} Phi_d, computed bottom-up over
    // the divisors of m with exact integer division.
    let divisors: Vec<u64> = (1..=m).filter(|d| m.is_multiple_of(*d)).collect();
    let mut table: Vec<(u64, Vec<BigInt>)> = Vec::new();
    for &d in &divisors {
        let mut num = vec![BigInt::zero(); d as usize + 1];
        num[0] = -BigInt::one();
        num[d as usize] = BigInt::one();
        let mut acc = num;
        for (e, phi_e) in &table {
            if d % e == 0 {
                acc = int_poly_div_exact(&acc, phi_e);
            }
        }
        table.push((d, acc));
    }
    table.pop().expect("m is a divisor of itself").1
}

fn int_poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    assert!(b[db].is_one(), "divisor must be monic");
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for shift in (0..q.len()).rev() {
        let lead = r[shift + db].clone();
        if lead.is_zero() {
            continue;
        }
        q[shift] = lead.clone();
        for i in 0..=db {
            let delta = &lead * &b[i];
            r[shift + i] -= delta;
        }
    }
    assert!(r.iter().all(|c| c.is_zero()), "division must be exact");
    q
}

fn rat_cyclotomic(m: u64) -> Vec<BigRational> {
    cyclotomic_polynomial(m)
        .into_iter()
        .map(BigRational::from_integer)
        .collect()
}

fn reduce_mod_cyclotomic(poly: Vec<BigRational>, m: u64) -> Vec<BigRational> {
    let phi = rat_cyclotomic(m);
    let deg = phi.len() - 1;
    pad_to(poly_rem(&poly, &phi), deg)
}

// ---------------------------------------------------------------------------
// Roots of unity.

/// Smallest-candidate primitive n-th root of unity, in a fixed enumeration
/// order per field kind: {1, -1} for Q, powers of zeta (then negated powers
/// when m is odd) for Q(zeta_m), residues 1..p-1 for F_p.
pub fn primitive_root(field: &FieldDescriptor, n: u64) -> Result<Scalar, ScalarError> {
    if n == 0 {
        return Err(ScalarError::BadParameter("root order must be >= 1".into()));
    }
    let fail = || ScalarError::NoSuchRoot { field: field.to_string(), n };
    match field {
        FieldDescriptor::Rational => match n {
            1 => Ok(field.one()),
            2 => Ok(field.from_integer(-1)),
            _ => Err(fail()),
        },
        FieldDescriptor::Cyclotomic { m } => {
            let zeta = field.zeta()?;
            let mut candidates: Vec<Scalar> = Vec::new();
            let mut acc = field.one();
            for _ in 0..*m {
                candidates.push(acc.clone());
                acc = acc.mul(&zeta).expect("same field");
            }
            if m % 2 == 1 {
                let minus = field.from_integer(-1);
                let negated: Vec<Scalar> =
                    candidates.iter().map(|c| c.mul(&minus).expect("same field")).collect();
                candidates.extend(negated);
            }
            for c in &candidates {
                if c.multiplicative_order(2 * *m) == Some(n) {
                    return Ok(c.clone());
                }
            }
            Err(fail())
        }
        FieldDescriptor::Prime { p } => {
            if (*p - 1) % n != 0 {
                return Err(fail());
            }
            for r in 1..*p {
                let s = field.from_integer(r as i64);
                if s.multiplicative_order(*p) == Some(n) {
                    return Ok(s);
                }
            }
            Err(fail())
        }
    }
}

// ---------------------------------------------------------------------------
// Text encodings: rationals as "a/b", cyclotomic elements as polynomials in z,
// prime-field elements as decimal residues.

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            ScalarRepr::Rational(r) => write!(f, "{}", rational_string(r)),
            ScalarRepr::Prime(r) => write!(f, "{r}"),
            ScalarRepr::Cyclotomic(coeffs) => {
                let n = trim_len(coeffs);
                if n == 0 {
                    return write!(f, "0");
                }
                let mut first = true;
                for k in (0..n).rev() {
                    let c = &coeffs[k];
                    if c.is_zero() {
                        continue;
                    }
                    let (sign, mag) = if c.is_negative() {
                        ("-", -c.clone())
                    } else {
                        ("+", c.clone())
                    };
                    if first {
                        if sign == "-" {
                            write!(f, "-")?;
                        }
                        first = false;
                    } else {
                        write!(f, " {sign} ")?;
                    }
                    let coeff_str = rational_string(&mag);
                    match k {
                        0 => write!(f, "{coeff_str}")?,
                        _ => {
                            if !mag.is_one() {
                                write!(f, "{coeff_str}*")?;
                            }
                            if k == 1 {
                                write!(f, "z")?;
                            } else {
                                write!(f, "z^{k}")?;
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse the text encoding produced by `Display`. Accepts any whitespace
/// around the `+` / `-` separators.
pub fn parse_scalar(field: &FieldDescriptor, input: &str) -> Result<Scalar, ScalarError> {
    let err = |reason: &str| ScalarError::Parse { input: input.into(), reason: reason.into() };
    let s = input.trim();
    if s.is_empty() {
        return Err(err("empty string"));
    }
    // Split into signed terms at top level.
    let mut terms: Vec<(i32, String)> = Vec::new();
    let mut sign = 1i32;
    let mut cur = String::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '+' | '-' => {
                if !cur.trim().is_empty() {
                    terms.push((sign, cur.trim().to_string()));
                    cur = String::new();
                    sign = 1;
                }
                if c == '-' {
                    sign = -sign;
                }
            }
            '^' => {
                cur.push(c);
                // A sign directly after '^' belongs to the exponent.
                if let Some('-') = chars.peek() {
                    cur.push(chars.next().expect("peeked"));
                }
            }
            _ => cur.push(c),
        }
    }
    if cur.trim().is_empty() {
        return Err(err("dangling sign"));
    }
    terms.push((sign, cur.trim().to_string()));

    let mut acc = field.zero();
    for (sgn, term) in terms {
        let parsed = parse_term(field, &term).ok_or_else(|| err("bad term"))?;
        let signed = if sgn < 0 { parsed.neg() } else { parsed };
        acc = acc.add(&signed)?;
    }
    Ok(acc)
}

fn parse_term(field: &FieldDescriptor, term: &str) -> Option<Scalar> {
    let term = term.trim();
    let (coeff_str, z_power) = if let Some(star) = term.find('*') {
        let (c, z) = term.split_at(star);
        (Some(c.trim()), Some(z[1..].trim().to_string()))
    } else if term.starts_with('z') {
        (None, Some(term.to_string()))
    } else {
        (Some(term), None)
    };
    let coeff = match coeff_str {
        None => field.one(),
        Some(c) => {
            let c = c.trim();
            if let Some((num, den)) = c.split_once('/') {
                let n: BigInt = num.trim().parse().ok()?;
                let d: BigInt = den.trim().parse().ok()?;
                if d.is_zero() {
                    return None;
                }
                field.from_bigint(&n).div(&field.from_bigint(&d)).ok()?
            } else {
                let n: BigInt = c.parse().ok()?;
                field.from_bigint(&n)
            }
        }
    };
    match z_power {
        None => Some(coeff),
        Some(z) => {
            let k: i64 = if z == "z" {
                1
            } else {
                let rest = z.strip_prefix("z^")?;
                rest.trim().parse().ok()?
            };
            let zeta = field.zeta().ok()?;
            coeff.mul(&zeta.pow(k).ok()?).ok()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // -- oracles ------------------------------------------------------------

    /// Independent check that a family of polynomials multiplies back to
    /// z^m - 1; uses only integer polynomial multiplication.
    fn product_over_divisors_is_power_minus_one(m: u64) {
        let mut acc = vec![BigInt::one()];
        for d in 1..=m {
            if m.is_multiple_of(d) {
                let phi = cyclotomic_polynomial(d);
                let mut out = vec![BigInt::zero(); acc.len() + phi.len() - 1];
                for (i, a) in acc.iter().enumerate() {
                    for (j, b) in phi.iter().enumerate() {
                        out[i + j] += a * b;
                    }
                }
                acc = out;
            }
        }
        let mut expected = vec![BigInt::zero(); m as usize + 1];
        expected[0] = -BigInt::one();
        expected[m as usize] = BigInt::one();
        assert_eq!(acc, expected, "divisor product identity fails at m = {m}");
    }

    fn brute_force_phi(m: u64) -> u64 {
        (1..=m).filter(|k| num_integer::gcd(*k, m) == 1).count() as u64
    }

    fn brute_force_order_mod_p(a: u64, p: u64) -> Option<u64> {
        let mut acc = a % p;
        for k in 1..p {
            if acc == 1 {
                return Some(k);
            }
            acc = acc * a % p;
        }
        None
    }

    fn int_poly(coeffs: &[i64]) -> Vec<BigInt> {
        coeffs.iter().map(|c| BigInt::from(*c)).collect()
    }

    // -- cyclotomic polynomials ----------------------------------------------

    #[test]
    fn cyclotomic_small_values_frozen() {
        assert_eq!(cyclotomic_polynomial(1), int_poly(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), int_poly(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(3), int_poly(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(4), int_poly(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(5), int_poly(&[1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(6), int_poly(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), int_poly(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn cyclotomic_degree_and_product_identity() {
        for m in 1..=30 {
            assert_eq!(
                cyclotomic_polynomial(m).len() as u64 - 1,
                brute_force_phi(m),
                "degree of Phi_{m}"
            );
            assert_eq!(euler_phi(m), brute_force_phi(m));
            product_over_divisors_is_power_minus_one(m);
        }
    }

    // -- arithmetic ----------------------------------------------------------

    #[test]
    fn rational_arithmetic() {
        let q = FieldDescriptor::rational();
        let half = q.from_ratio(1, 2).unwrap();
        let third = q.from_ratio(1, 3).unwrap();
        assert_eq!(half.add(&third).unwrap(), q.from_ratio(5, 6).unwrap());
        assert_eq!(half.to_string(), "1/2");
        assert_eq!(q.from_integer(-3).to_string(), "-3");
    }

    #[test]
    fn zeta4_squares_to_minus_one() {
        let f = FieldDescriptor::cyclotomic(4).unwrap();
        let z = f.zeta().unwrap();
        assert_eq!(z.mul(&z).unwrap(), f.from_integer(-1));
        assert_eq!(z.mul(&z).unwrap().to_string(), "-1");
    }

    #[test]
    fn zeta3_inverse_of_one_plus_z() {
        let f = FieldDescriptor::cyclotomic(3).unwrap();
        let one_plus_z = f.one().add(&f.zeta().unwrap()).unwrap();
        let inv = one_plus_z.inv().unwrap();
        assert_eq!(inv, f.zeta().unwrap().neg());
        assert_eq!(inv.to_string(), "-z");
        assert_eq!(one_plus_z.mul(&inv).unwrap(), f.one());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f5 = FieldDescriptor::prime(5).unwrap();
        assert_eq!(f5.from_integer(3).add(&f5.from_integer(4)).unwrap(), f5.from_integer(2));
        assert_eq!(f5.from_integer(2).inv().unwrap(), f5.from_integer(3));
        assert_eq!(f5.from_integer(-1), f5.from_integer(4));
        assert!(FieldDescriptor::prime(6).is_err());
    }

    #[test]
    fn field_mismatch_and_zero_division_are_typed() {
        let q = FieldDescriptor::rational();
        let f5 = FieldDescriptor::prime(5).unwrap();
        assert!(matches!(
            q.one().add(&f5.one()),
            Err(ScalarError::FieldMismatch(_, _))
        ));
        assert_eq!(q.one().div(&q.zero()), Err(ScalarError::DivisionByZero));
        assert_eq!(q.zero().inv(), Err(ScalarError::DivisionByZero));
    }

    // -- primitive roots -----------------------------------------------------

    #[test]
    fn primitive_root_examples() {
        let q = FieldDescriptor::rational();
        assert_eq!(primitive_root(&q, 1).unwrap(), q.one());
        assert_eq!(primitive_root(&q, 2).unwrap(), q.from_integer(-1));
        assert!(matches!(primitive_root(&q, 3), Err(ScalarError::NoSuchRoot { .. })));

        let f6 = FieldDescriptor::cyclotomic(6).unwrap();
        let z = f6.zeta().unwrap();
        assert_eq!(primitive_root(&f6, 3).unwrap(), z.pow(2).unwrap());
        assert_eq!(primitive_root(&f6, 6).unwrap(), z);

        let f5 = FieldDescriptor::prime(5).unwrap();
        let root = primitive_root(&f5, 4).unwrap();
        assert_eq!(root, f5.from_integer(2));
        assert_eq!(brute_force_order_mod_p(2, 5), Some(4));

        let f3 = FieldDescriptor::prime(3).unwrap();
        assert!(matches!(primitive_root(&f3, 3), Err(ScalarError::NoSuchRoot { .. })));
    }

    #[test]
    fn primitive_roots_have_exact_order_and_kill_cyclotomic() {
        for (m, n) in [(12u64, 12u64), (12, 4), (12, 3), (12, 1), (5, 5), (6, 2), (3, 2)] {
            let f = FieldDescriptor::cyclotomic(m).unwrap();
            let r = primitive_root(&f, n).unwrap();
            assert_eq!(r.multiplicative_order(2 * m), Some(n), "order of root ({m},{n})");
            // Evaluate Phi_n at the root: must vanish.
            let phi = cyclotomic_polynomial(n);
            let mut acc = f.zero();
            let mut power = f.one();
            for c in &phi {
                acc = acc.add(&f.from_bigint(c).mul(&power).unwrap()).unwrap();
                power = power.mul(&r).unwrap();
            }
            assert!(acc.is_zero(), "Phi_{n} at primitive root in Q(z_{m})");
        }
    }

    #[test]
    fn brute_force_smallest_prime_field_roots() {
        for (p, n) in [(5u64, 4u64), (5, 2), (7, 3), (7, 6), (13, 4), (13, 3)] {
            let f = FieldDescriptor::prime(p).unwrap();
            let got = primitive_root(&f, n).unwrap();
            let smallest = (1..p)
                .find(|a| brute_force_order_mod_p(*a, p) == Some(n))
                .expect("root exists");
            assert_eq!(got, f.from_integer(smallest as i64));
        }
    }

    // -- parsing -------------------------------------------------------------

    #[test]
    fn parse_examples() {
        let f12 = FieldDescriptor::cyclotomic(12).unwrap();
        let z = f12.zeta().unwrap();
        let val = parse_scalar(&f12, "1/2*z^2 + 1").unwrap();
        let expected = f12
            .from_ratio(1, 2)
            .unwrap()
            .mul(&z.pow(2).unwrap())
            .unwrap()
            .add(&f12.one())
            .unwrap();
        assert_eq!(val, expected);
        assert_eq!(parse_scalar(&f12, "-z").unwrap(), z.neg());
        assert_eq!(parse_scalar(&f12, "0").unwrap(), f12.zero());

        let q = FieldDescriptor::rational();
        assert_eq!(parse_scalar(&q, "-7/3").unwrap(), q.from_ratio(-7, 3).unwrap());
        let f7 = FieldDescriptor::prime(7).unwrap();
        assert_eq!(parse_scalar(&f7, "12").unwrap(), f7.from_integer(5));
        assert!(parse_scalar(&q, "z^2").is_err());
        assert!(parse_scalar(&q, "").is_err());
    }

    // -- property tests -------------------------------------------------------

    fn arb_field() -> impl Strategy<Value = FieldDescriptor> {
        prop_oneof![
            Just(FieldDescriptor::Rational),
            prop_oneof![Just(3u64), Just(4), Just(6), Just(12)]
                .prop_map(|m| FieldDescriptor::cyclotomic(m).unwrap()),
            prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]
                .prop_map(|p| FieldDescriptor::prime(p).unwrap()),
        ]
    }

    fn arb_scalar(field: FieldDescriptor) -> impl Strategy<Value = Scalar> {
        let deg = field.degree();
        proptest::collection::vec(-6i64..=6, deg).prop_map(move |coeffs| {
            let mut acc = field.zero();
            let mut power = field.one();
            let zeta = field.zeta().ok();
            for c in coeffs {
                acc = acc.add(&field.from_integer(c).mul(&power).unwrap()).unwrap();
                power = match &zeta {
                    Some(z) => power.mul(z).unwrap(),
                    None => power.clone(),
                };
            }
            acc
        })
    }

    fn arb_field_and_triple() -> impl Strategy<Value = (Scalar, Scalar, Scalar)> {
        arb_field().prop_flat_map(|f| {
            (arb_scalar(f.clone()), arb_scalar(f.clone()), arb_scalar(f))
        })
    }

    proptest! {
        #[test]
        fn field_axioms((a, b, c) in arb_field_and_triple()) {
            let f = a.field().clone();
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(a.add(&f.zero()).unwrap(), a.clone());
            prop_assert_eq!(a.mul(&f.one()).unwrap(), a.clone());
            prop_assert_eq!(a.add(&a.neg()).unwrap(), f.zero());
            if !a.is_zero() {
                prop_assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), f.one());
            }
        }

        #[test]
        fn display_parse_round_trip((a, _, _) in arb_field_and_triple()) {
            let s = a.to_string();
            let back = parse_scalar(a.field(), &s).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
