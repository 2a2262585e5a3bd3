//! The polynomial ring `A = F_q[t]`.

use std::fmt;

use super::field::Field;
use crate::error::{Error, Result};

/// A polynomial over some `F_q`, coefficients indexed by degree.
///
/// Never stores a trailing zero coefficient; the zero polynomial is the empty
/// vector and has no degree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    coeffs: Vec<u8>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1] }
    }

    pub fn constant(c: u8) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * t^i`.
    pub fn monomial(c: u8, i: usize) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = c;
        Self::from_coeffs(v)
    }

    /// `t`.
    pub fn t() -> Self {
        Self::monomial(1, 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<u8>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u8 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree treating zero as `0`; only for size bounds.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    /// The valuation at infinity, `-deg(a)`; `None` (i.e. `+inf`) for zero.
    pub fn valuation(&self) -> Option<i64> {
        self.degree().map(|d| -(d as i64))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> u8 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    /// Parses the low-to-high digit string, e.g. `"1101"` is `1 + t + t^3`.
    pub fn parse(s: &str, k: &Field) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial string".into()));
        }
        let coeffs = s
            .chars()
            .map(|c| k.parse_digit(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(coeffs))
    }

    /// Accepts a digit string or an expression in `t` such as `t^2+2t+1`
    /// (coefficients are single digits, `-` negates a term).
    pub fn parse_expr(s: &str, k: &Field) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if !s.contains('t') {
            return Self::parse(&s, k);
        }
        let bad = || Error::Parse(format!("malformed polynomial expression `{s}`"));
        let mut coeffs: Vec<u8> = Vec::new();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let neg = rest.starts_with('-');
            if neg || rest.starts_with('+') {
                rest = &rest[1..];
            }
            if rest.is_empty() {
                return Err(bad());
            }
            let end = rest[1..].find(['+', '-']).map_or(rest.len(), |i| i + 1);
            let term = &rest[..end];
            rest = &rest[end..];
            let (c, e) = match term.split_once('t') {
                None => (term, 0),
                Some((c, pow)) => {
                    let e = match pow.strip_prefix('^') {
                        Some(p) => p.parse::<usize>().map_err(|_| bad())?,
                        None if pow.is_empty() => 1,
                        None => return Err(bad()),
                    };
                    (c.strip_suffix('*').unwrap_or(c), e)
                }
            };
            let mut c = match c {
                "" => 1,
                c if c.chars().count() == 1 => k.parse_elem(c)?,
                _ => return Err(bad()),
            };
            if neg {
                c = k.neg(c);
            }
            if coeffs.len() <= e {
                coeffs.resize(e + 1, 0);
            }
            coeffs[e] = k.add(coeffs[e], c);
        }
        Ok(Self::from_coeffs(coeffs))
    }

    pub fn to_digits(&self, k: &Field) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs.iter().map(|&c| k.digit(c)).collect()
    }

    /// The coefficient vector padded (or truncated) to `len` entries.
    pub fn to_vec(&self, len: usize) -> Vec<u8> {
        let mut v = self.coeffs.clone();
        v.resize(len, 0);
        v
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{c}t")?,
                (_, 1) => write!(f, "t^{i}")?,
                _ => write!(f, "{c}t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Ring operations on [`Poly`] over a fixed field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing {
    k: Field,
}

impl PolyRing {
    pub fn new(k: Field) -> Self {
        PolyRing { k }
    }

    pub fn field(&self) -> &Field {
        &self.k
    }

    pub fn check(&self, a: &Poly) -> Result<()> {
        for &c in a.coeffs() {
            self.k.check(c as u32)?;
        }
        Ok(())
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.coeffs.len().max(b.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| self.k.add(a.coeff(i), b.coeff(i)))
                .collect(),
        )
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly::from_coeffs(a.coeffs.iter().map(|&c| self.k.neg(c)).collect())
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.coeffs.len().max(b.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| self.k.sub(a.coeff(i), b.coeff(i)))
                .collect(),
        )
    }

    pub fn scale(&self, c: u8, a: &Poly) -> Poly {
        Poly::from_coeffs(a.coeffs.iter().map(|&x| self.k.mul(c, x)).collect())
    }

    /// `a * t^i`.
    pub fn shift(&self, a: &Poly, i: usize) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![0; i];
        v.extend_from_slice(&a.coeffs);
        Poly { coeffs: v }
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![0u8; a.coeffs.len() + b.coeffs.len() - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                v[i + j] = self.k.add(v[i + j], self.k.mul(x, y));
            }
        }
        Poly::from_coeffs(v)
    }

    pub fn pow(&self, a: &Poly, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// `(quotient, remainder)` with `a = q b + r`, `deg r < deg b`.
    pub fn divmod(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = self.k.inv(b.leading())?;
        let mut r = a.coeffs.clone();
        if r.len() <= db {
            return Ok((Poly::zero(), a.clone()));
        }
        let mut quo = vec![0u8; r.len() - db];
        for top in (db..r.len()).rev() {
            let c = r[top];
            if c == 0 {
                continue;
            }
            let f = self.k.mul(c, lead_inv);
            quo[top - db] = f;
            for (j, &bj) in b.coeffs.iter().enumerate() {
                let idx = top - db + j;
                r[idx] = self.k.sub(r[idx], self.k.mul(f, bj));
            }
        }
        r.truncate(db);
        Ok((Poly::from_coeffs(quo), Poly::from_coeffs(r)))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        Ok(self.divmod(a, b)?.1)
    }

    pub fn divides(&self, d: &Poly, a: &Poly) -> Result<bool> {
        Ok(self.rem(a, d)?.is_zero())
    }

    /// Scales a non-zero polynomial to leading coefficient one.
    pub fn monic(&self, a: &Poly) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let inv = self.k.inv(a.leading()).expect("leading coefficient non-zero");
        self.scale(inv, a)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::ZeroGcd);
        }
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y)?;
            x = y;
            y = r;
        }
        Ok(self.monic(&x))
    }

    /// `(g, s, u)` with `s a + u b = g = gcd(a, b)` monic.
    pub fn ext_gcd(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly, Poly)> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::ZeroGcd);
        }
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut u0, mut u1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (quo, r) = self.divmod(&r0, &r1)?;
            let s = self.sub(&s0, &self.mul(&quo, &s1));
            let u = self.sub(&u0, &self.mul(&quo, &u1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            u0 = std::mem::replace(&mut u1, u);
        }
        let inv = self.k.inv(r0.leading())?;
        Ok((
            self.scale(inv, &r0),
            self.scale(inv, &s0),
            self.scale(inv, &u0),
        ))
    }

    pub fn lcm(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        let g = self.gcd(a, b)?;
        let (quo, _) = self.divmod(&self.mul(a, b), &g)?;
        Ok(self.monic(&quo))
    }

    /// Inverse of `a` modulo `m`, if it exists.
    pub fn inv_mod(&self, a: &Poly, m: &Poly) -> Result<Option<Poly>> {
        let a = self.rem(a, m)?;
        if a.is_zero() {
            return Ok(if m.degree() == Some(0) {
                Some(Poly::zero())
            } else {
                None
            });
        }
        let (g, s, _) = self.ext_gcd(&a, m)?;
        if g != Poly::one() {
            return Ok(None);
        }
        self.rem(&s, m).map(Some)
    }

    pub fn eval(&self, a: &Poly, x: u8) -> u8 {
        a.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| self.k.add(self.k.mul(acc, x), c))
    }

    /// `a(s(t))`.
    pub fn compose(&self, a: &Poly, s: &Poly) -> Poly {
        a.coeffs.iter().rev().fold(Poly::zero(), |acc, &c| {
            self.add(&self.mul(&acc, s), &Poly::constant(c))
        })
    }

    /// Applies `x -> x^(p^e)` to every coefficient.
    pub fn frobenius(&self, a: &Poly, e: u32) -> Poly {
        Poly::from_coeffs(a.coeffs.iter().map(|&c| self.k.frobenius(c, e)).collect())
    }

    /// All monic polynomials of exactly degree `d`, in increasing code order.
    pub fn monics_of_degree(&self, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = self.k.q() as u64;
        let count = q.pow(d as u32);
        (0..count).map(move |mut code| {
            let mut v = Vec::with_capacity(d + 1);
            for _ in 0..d {
                v.push((code % q) as u8);
                code /= q;
            }
            v.push(1);
            Poly::from_coeffs(v)
        })
    }

    /// All polynomials of degree `< len` (the residues of a degree-`len` modulus).
    pub fn all_below(&self, len: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = self.k.q() as u64;
        let count = q.pow(len as u32);
        (0..count).map(move |mut code| {
            let mut v = Vec::with_capacity(len);
            for _ in 0..len {
                v.push((code % q) as u8);
                code /= q;
            }
            Poly::from_coeffs(v)
        })
    }

    /// Irreducibility by exhaustive trial division against monic polynomials of
    /// degree at most `deg f / 2`.
    pub fn is_irreducible(&self, f: &Poly) -> bool {
        let Some(d) = f.degree() else { return false };
        if d == 0 {
            return false;
        }
        for e in 1..=d / 2 {
            for g in self.monics_of_degree(e) {
                if self.rem(f, &g).map(|r| r.is_zero()).unwrap_or(false) {
                    return false;
                }
            }
        }
        true
    }

    /// Factors a monic non-constant polynomial into monic irreducibles with
    /// multiplicities, sorted by (degree, code).
    pub fn factorize(&self, f: &Poly) -> Result<Vec<(Poly, u32)>> {
        if !f.is_monic() || f.is_constant() {
            return Err(Error::NotMonicNonConstant);
        }
        let mut rest = f.clone();
        let mut out = Vec::new();
        let mut e = 1;
        while rest.degree().unwrap_or(0) >= 2 * e {
            // smallest-degree divisors are found first, hence irreducible
            for g in self.monics_of_degree(e).collect::<Vec<_>>() {
                let mut mult = 0;
                loop {
                    let (quo, r) = self.divmod(&rest, &g)?;
                    if !r.is_zero() {
                        break;
                    }
                    rest = quo;
                    mult += 1;
                }
                if mult > 0 {
                    out.push((g, mult));
                }
            }
            e += 1;
        }
        if rest.degree().unwrap_or(0) >= 1 {
            match out.iter_mut().find(|(g, _)| *g == rest) {
                Some(entry) => entry.1 += 1,
                None => out.push((rest, 1)),
            }
        }
        out.sort_by(|(a, _), (b, _)| (a.degree(), a).cmp(&(b.degree(), b)));
        debug_assert!(out.iter().all(|(g, _)| self.is_irreducible(g)));
        Ok(out)
    }

    /// All monic divisors of a non-zero polynomial, sorted by (degree, code).
    pub fn monic_divisors(&self, f: &Poly) -> Result<Vec<Poly>> {
        if f.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let f = self.monic(f);
        if f.is_constant() {
            return Ok(vec![Poly::one()]);
        }
        let mut divs = vec![Poly::one()];
        for (g, m) in self.factorize(&f)? {
            let mut next = Vec::new();
            for d in &divs {
                let mut cur = d.clone();
                next.push(cur.clone());
                for _ in 0..m {
                    cur = self.mul(&cur, &g);
                    next.push(cur.clone());
                }
            }
            divs = next;
        }
        divs.sort_by(|a, b| (a.degree(), a).cmp(&(b.degree(), b)));
        Ok(divs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions() {
        let k = Field::of_order(3).unwrap();
        let p = |s| Poly::parse_expr(s, &k).unwrap().to_digits(&k);
        assert_eq!(p("t^2"), "001");
        assert_eq!(p("t^2 + 2t + 1"), "121");
        assert_eq!(p("t-1"), "21");
        assert_eq!(p("2*t^3"), "0002");
        assert_eq!(p("1101"), "1101");
        assert!(Poly::parse_expr("t+", &k).is_err());
        assert!(Poly::parse_expr("t^x", &k).is_err());
    }

    fn ring(q: u32) -> PolyRing {
        PolyRing::new(Field::of_order(q).unwrap())
    }

    fn p(s: &str, r: &PolyRing) -> Poly {
        Poly::parse(s, r.field()).unwrap()
    }

    #[test]
    fn long_division_over_f2() {
        let r = ring(2);
        // (t^3+t+1) / (t^2+1) = (t, 1)
        let (quo, rem) = r.divmod(&p("1101", &r), &p("101", &r)).unwrap();
        assert_eq!(quo, p("01", &r));
        assert_eq!(rem, p("1", &r));
        let back = r.add(&r.mul(&quo, &p("101", &r)), &rem);
        assert_eq!(back, p("1101", &r));
    }

    #[test]
    fn self_division_and_constructed_product() {
        let r = ring(3);
        let a = p("0211", &r);
        assert_eq!(r.divmod(&a, &a).unwrap(), (Poly::one(), Poly::zero()));
        // t^2 + 2t = t (t + 2)
        let (quo, rem) = r.divmod(&p("021", &r), &p("01", &r)).unwrap();
        assert_eq!(quo, p("21", &r));
        assert!(rem.is_zero());
        assert_eq!(r.divmod(&a, &Poly::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn gcd_examples() {
        let r2 = ring(2);
        assert_eq!(r2.gcd(&p("011", &r2), &p("101", &r2)).unwrap(), p("11", &r2));
        let r3 = ring(3);
        let f = p("2102", &r3);
        assert_eq!(r3.gcd(&f, &Poly::zero()).unwrap(), r3.monic(&f));
        assert_eq!(r3.gcd(&p("01", &r3), &p("21", &r3)).unwrap(), Poly::one());
        assert_eq!(r3.gcd(&Poly::zero(), &Poly::zero()), Err(Error::ZeroGcd));
    }

    #[test]
    fn factorization_examples() {
        let r3 = ring(3);
        assert_eq!(
            r3.factorize(&p("021", &r3)).unwrap(),
            vec![(p("01", &r3), 1), (p("21", &r3), 1)]
        );
        let r2 = ring(2);
        // the other three monic quadratics over F_2 are reducible
        let reducible: Vec<_> = r2
            .monics_of_degree(2)
            .filter(|g| !r2.is_irreducible(g))
            .collect();
        assert_eq!(reducible.len(), 3);
        assert_eq!(
            r2.factorize(&p("111", &r2)).unwrap(),
            vec![(p("111", &r2), 1)]
        );
        assert_eq!(r2.factorize(&p("001", &r2)).unwrap(), vec![(p("01", &r2), 2)]);
        assert_eq!(
            r2.factorize(&p("11", &r2).clone()).unwrap(),
            vec![(p("11", &r2), 1)]
        );
        assert_eq!(
            r2.factorize(&p("1", &r2)),
            Err(Error::NotMonicNonConstant)
        );
        assert_eq!(
            r3.factorize(&p("12", &r3)),
            Err(Error::NotMonicNonConstant)
        );
    }

    #[test]
    fn ext_gcd_bezout() {
        let r = ring(3);
        let a = p("2101", &r);
        let b = p("111", &r);
        let (g, s, u) = r.ext_gcd(&a, &b).unwrap();
        assert_eq!(r.add(&r.mul(&s, &a), &r.mul(&u, &b)), g);
        assert_eq!(g, r.gcd(&a, &b).unwrap());
    }

    #[test]
    fn string_round_trip_and_valuation() {
        let r = ring(2);
        let a = p("1101", &r);
        assert_eq!(a.to_digits(r.field()), "1101");
        assert_eq!(a.valuation(), Some(-3));
        assert_eq!(Poly::one().valuation(), Some(0));
        assert_eq!(Poly::zero().valuation(), None);
        assert_eq!(Poly::zero().to_digits(r.field()), "0");
        assert!(Poly::parse("102", r.field()).is_err());
    }

    #[test]
    fn divisors_of_t2_plus_t() {
        let r = ring(2);
        let d = r.monic_divisors(&p("011", &r)).unwrap();
        assert_eq!(d, vec![p("1", &r), p("01", &r), p("11", &r), p("011", &r)]);
    }
}
