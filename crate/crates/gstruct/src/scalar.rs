//! Scalar backends.
//!
//! [`Exact`] is an element of a multiquadratic field ℚ(√p₁, …, √p_k), stored as
//! a sparse sum `Σ c_s √s` over squarefree radicands `s`. [`Float`] is an `f64`
//! carrying its own comparison tolerance.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Arithmetic required by every algorithm in the crate.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    /// -1, 0 or 1 under the backend's notion of zero.
    fn signum(&self) -> i8;
    /// Nonnegative square root, if representable.
    fn sqrt(&self) -> Option<Self>;
    /// Positive real `k`-th root of a positive value, if representable.
    fn root(&self, k: u32) -> Option<Self>;
    /// `√d` for a positive integer `d`.
    fn sqrt_int(d: u64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    /// Canonical textual form, parseable by the input grammar.
    fn canonical(&self) -> String;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(n.into()))
    }
    fn ratio(n: i64, d: i64) -> Self {
        Self::from_rational(&BigRational::new(n.into(), d.into()))
    }
    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.clone() * i)
    }
    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
    /// Rational value if the element lies in ℚ.
    fn as_rational(&self) -> Option<BigRational>;
}

// ---------------------------------------------------------------------------
// Exact multiquadratic field

/// Exact element of ℚ(√p₁, …). Terms are sorted by radicand, all coefficients
/// nonzero, radicand 1 is the rational part.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Exact {
    terms: Vec<(u64, BigRational)>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn largest_prime_factor(mut n: u64) -> u64 {
    let mut best = 1;
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            best = p;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        best = best.max(n);
    }
    best
}

/// Split an integer into `s · m²` with `s` squarefree. Fails when trial division
/// cannot decide squarefreeness of a large cofactor.
fn squarefree_split(n: &BigInt) -> Option<(u64, BigInt)> {
    const LIMIT: u64 = 200_000;
    let mut rest = n.clone();
    let mut s: u64 = 1;
    let mut m = BigInt::one();
    let mut p: u64 = 2;
    while p < LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e > 0 {
            for _ in 0..e / 2 {
                m *= &pb;
            }
            if e % 2 == 1 {
                s = s.checked_mul(p)?;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Some((s, m));
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        return Some((s, m * r));
    }
    let bound = BigInt::from(LIMIT) * BigInt::from(LIMIT);
    if rest < bound {
        let q = rest.to_u64()?;
        return Some((s.checked_mul(q)?, m));
    }
    None
}

impl Exact {
    pub fn rational(r: BigRational) -> Self {
        if r.is_zero() {
            Exact::default()
        } else {
            Exact { terms: vec![(1, r)] }
        }
    }

    pub fn int(n: i64) -> Self {
        Exact::rational(rat(n))
    }

    /// `c · √s` for squarefree `s`.
    pub fn surd(c: BigRational, s: u64) -> Self {
        if c.is_zero() {
            Exact::default()
        } else {
            Exact { terms: vec![(s, c)] }
        }
    }

    pub fn terms(&self) -> &[(u64, BigRational)] {
        &self.terms
    }

    /// Squarefree radicands present (excluding 1).
    pub fn radicands(&self) -> Vec<u64> {
        self.terms.iter().map(|t| t.0).filter(|&s| s != 1).collect()
    }

    fn from_terms(mut v: Vec<(u64, BigRational)>) -> Self {
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(u64, BigRational)> = Vec::with_capacity(v.len());
        for (s, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == s => last.1 += c,
                _ => out.push((s, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Exact { terms: out }
    }

    fn top_prime(&self) -> u64 {
        self.terms
            .iter()
            .map(|t| largest_prime_factor(t.0))
            .max()
            .unwrap_or(1)
    }

    /// Write `self = a + b√p` with `a`, `b` free of `√p`.
    fn split(&self, p: u64) -> (Exact, Exact) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (s, c) in &self.terms {
            if s % p == 0 {
                b.push((s / p, c.clone()));
            } else {
                a.push((*s, c.clone()));
            }
        }
        (Exact::from_terms(a), Exact::from_terms(b))
    }

    fn sqrt_p(p: u64) -> Exact {
        Exact::surd(rat(1), p)
    }

    fn scale(&self, r: &BigRational) -> Exact {
        if r.is_one() {
            return self.clone();
        }
        if (-r).is_one() {
            return -self.clone();
        }
        Exact::from_terms(self.terms.iter().map(|(s, c)| (*s, c * r)).collect())
    }

    fn rational_sqrt(r: &BigRational) -> Option<Exact> {
        if r.is_negative() {
            return None;
        }
        if r.is_zero() {
            return Some(Exact::default());
        }
        // √(n/d) = √(n d) / d
        let nd = r.numer() * r.denom();
        let (s, m) = squarefree_split(&nd)?;
        Some(Exact::surd(BigRational::new(m, r.denom().clone()), s))
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, o: Exact) -> Exact {
        if o.terms.is_empty() {
            return self;
        }
        if self.terms.is_empty() {
            return o;
        }
        let mut v = self.terms;
        v.extend(o.terms);
        Exact::from_terms(v)
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, o: Exact) -> Exact {
        self + (-o)
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact {
            terms: self.terms.into_iter().map(|(s, c)| (s, -c)).collect(),
        }
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, o: Exact) -> Exact {
        if self.terms.is_empty() || o.terms.is_empty() {
            return Exact::default();
        }
        if self.terms.len() == 1 && self.terms[0].0 == 1 {
            return o.scale(&self.terms[0].1);
        }
        if o.terms.len() == 1 && o.terms[0].0 == 1 {
            return self.scale(&o.terms[0].1);
        }
        let mut v = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (s1, c1) in &self.terms {
            for (s2, c2) in &o.terms {
                let g = s1.gcd(s2);
                let s = (s1 / g) * (s2 / g);
                v.push((s, c1 * c2 * rat(g as i64)));
            }
        }
        Exact::from_terms(v)
    }
}

impl Scalar for Exact {
    fn zero() -> Self {
        Exact::default()
    }
    fn one() -> Self {
        Exact::int(1)
    }
    fn from_rational(r: &BigRational) -> Self {
        Exact::rational(r.clone())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn as_rational(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(1, c)] => Some(c.clone()),
            _ => None,
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(Exact::rational(r.recip()));
        }
        let p = self.top_prime();
        let (a, b) = self.split(p);
        // (a + b√p)⁻¹ = (a − b√p) / (a² − p b²)
        let norm = a.clone() * a.clone() - b.clone() * b.clone() * Exact::int(p as i64);
        let ninv = norm.inv()?;
        Some((a - b * Exact::sqrt_p(p)) * ninv)
    }

    fn signum(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if let Some(r) = self.as_rational() {
            return if r.is_positive() { 1 } else { -1 };
        }
        let p = self.top_prime();
        let (a, b) = self.split(p);
        let (sa, sb) = (a.signum(), b.signum());
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let d = a.clone() * a - b.clone() * b * Exact::int(p as i64);
        match d.signum() {
            1 => sa,
            -1 => sb,
            _ => 0,
        }
    }

    fn sqrt(&self) -> Option<Self> {
        match self.signum() {
            0 => return Some(Exact::default()),
            -1 => return None,
            _ => {}
        }
        if let Some(r) = self.as_rational() {
            return Exact::rational_sqrt(&r);
        }
        let p = self.top_prime();
        let (a, b) = self.split(p);
        let sp = Exact::sqrt_p(p);
        let fix = |r: Exact| if r.signum() < 0 { -r } else { r };
        if b.is_zero() {
            if let Some(c) = a.sqrt() {
                return Some(c);
            }
            let q = a.div(&Exact::int(p as i64))?;
            return q.sqrt().map(|d| fix(d * sp));
        }
        // (c + d√p)² = a + b√p  ⇒  c² = (a ± √(a² − p b²)) / 2
        let disc = a.clone() * a.clone() - b.clone() * b.clone() * Exact::int(p as i64);
        let s = disc.sqrt()?;
        let half = Exact::ratio(1, 2);
        for t in [(a.clone() + s.clone()) * half.clone(), (a.clone() - s.clone()) * half.clone()] {
            if t.signum() <= 0 {
                continue;
            }
            if let Some(c) = t.sqrt() {
                let d = b.div(&(c.clone() * Exact::int(2)))?;
                let r = c + d * sp.clone();
                if r.clone() * r.clone() == *self {
                    return Some(fix(r));
                }
            }
        }
        None
    }

    fn root(&self, k: u32) -> Option<Self> {
        if k == 0 || self.signum() <= 0 {
            return None;
        }
        if k == 1 {
            return Some(self.clone());
        }
        if k == 2 {
            return self.sqrt();
        }
        let r = self.as_rational()?;
        let n = r.numer().nth_root(k);
        let d = r.denom().nth_root(k);
        if num_traits::pow(n.clone(), k as usize) == *r.numer()
            && num_traits::pow(d.clone(), k as usize) == *r.denom()
        {
            Some(Exact::rational(BigRational::new(n, d)))
        } else {
            None
        }
    }

    fn sqrt_int(d: u64) -> Option<Self> {
        Exact::rational_sqrt(&rat(d as i64))
    }

    fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(s, c)| c.to_f64().unwrap_or(f64::NAN) * (*s as f64).sqrt())
            .sum()
    }

    fn canonical(&self) -> String {
        canonical_exact(self)
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_surd(c: &BigInt, s: u64) -> String {
    let abs = c.abs();
    match (s, abs.is_one()) {
        (1, _) => abs.to_string(),
        (_, true) => format!("sqrt{s}"),
        _ => format!("{abs}*sqrt{s}"),
    }
}

/// Canonical text: `p/q`, `c*sqrtd`, or `(c)*(sqrt3+1)` with the common rational
/// factor pulled out and radicands in descending order.
fn canonical_exact(x: &Exact) -> String {
    match x.terms.as_slice() {
        [] => return "0".into(),
        [(1, c)] => return fmt_rat(c),
        [(s, c)] => {
            let rad = format!("sqrt{s}");
            return if c.is_one() {
                rad
            } else if (-c.clone()).is_one() {
                format!("-{rad}")
            } else if c.denom().is_one() {
                format!("{}*{rad}", c.numer())
            } else {
                format!("({})*{rad}", fmt_rat(c))
            };
        }
        _ => {}
    }
    let mut terms: Vec<(u64, BigRational)> = x.terms.clone();
    terms.sort_by_key(|t| std::cmp::Reverse(t.0));
    let den = terms.iter().fold(BigInt::one(), |acc, t| acc.lcm(t.1.denom()));
    let nums: Vec<BigInt> = terms.iter().map(|t| (t.1.clone() * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = nums.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
    let factor = BigRational::new(g.clone(), den);
    let mut inner = String::new();
    for (i, ((s, _), n)) in terms.iter().zip(&nums).enumerate() {
        let q = n / &g;
        let neg = q.sign() == Sign::Minus;
        if i == 0 {
            if neg {
                inner.push('-');
            }
        } else {
            inner.push(if neg { '-' } else { '+' });
        }
        inner.push_str(&fmt_surd(&q, *s));
    }
    if factor.is_one() {
        inner
    } else {
        format!("({})*({})", fmt_rat(&factor), inner)
    }
}

// ---------------------------------------------------------------------------
// Float backend

/// Floating value with an explicit comparison tolerance.
#[derive(Clone, Copy, Debug)]
pub struct Float {
    pub v: f64,
    pub tol: f64,
}

impl Float {
    pub fn new(v: f64, tol: f64) -> Self {
        Float { v, tol: tol.max(0.0) }
    }
    fn join(self, o: Float, v: f64) -> Float {
        Float { v, tol: self.tol.max(o.tol) }
    }
}

impl PartialEq for Float {
    fn eq(&self, o: &Float) -> bool {
        (self.v - o.v).abs() <= self.tol.max(o.tol)
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Add for Float {
    type Output = Float;
    fn add(self, o: Float) -> Float {
        self.join(o, self.v + o.v)
    }
}
impl Sub for Float {
    type Output = Float;
    fn sub(self, o: Float) -> Float {
        self.join(o, self.v - o.v)
    }
}
impl Mul for Float {
    type Output = Float;
    fn mul(self, o: Float) -> Float {
        self.join(o, self.v * o.v)
    }
}
impl Neg for Float {
    type Output = Float;
    fn neg(self) -> Float {
        Float { v: -self.v, tol: self.tol }
    }
}

impl Scalar for Float {
    fn zero() -> Self {
        Float::new(0.0, 0.0)
    }
    fn one() -> Self {
        Float::new(1.0, 0.0)
    }
    fn from_rational(r: &BigRational) -> Self {
        Float::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn is_zero(&self) -> bool {
        self.v.abs() <= self.tol
    }
    fn as_rational(&self) -> Option<BigRational> {
        BigRational::from_float(self.v)
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() || self.v == 0.0 {
            None
        } else {
            Some(Float { v: 1.0 / self.v, tol: self.tol })
        }
    }
    fn signum(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.v > 0.0 {
            1
        } else {
            -1
        }
    }
    fn sqrt(&self) -> Option<Self> {
        match self.signum() {
            -1 => None,
            0 => Some(Float { v: 0.0, tol: self.tol }),
            _ => Some(Float { v: self.v.sqrt(), tol: self.tol }),
        }
    }
    fn root(&self, k: u32) -> Option<Self> {
        if k == 0 || self.signum() <= 0 {
            None
        } else {
            Some(Float { v: self.v.powf(1.0 / k as f64), tol: self.tol })
        }
    }
    fn sqrt_int(d: u64) -> Option<Self> {
        Some(Float::new((d as f64).sqrt(), 0.0))
    }
    fn to_f64(&self) -> f64 {
        self.v
    }
    fn canonical(&self) -> String {
        format!("{}", self.v)
    }
}
