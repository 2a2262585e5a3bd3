//! Finite fields `F_q`, `q = p^n <= 16`, with precomputed operation tables.
//!
//! An element is a `u8` code `c_0 + c_1 p + ... + c_{n-1} p^{n-1}` standing for
//! `c_0 + c_1 x + ... + c_{n-1} x^{n-1}` modulo a fixed irreducible polynomial
//! over `F_p` whose root `x` is primitive. The `F_p`-basis used throughout the
//! crate is `{1, x, ..., x^{n-1}}`, i.e. the codes `p^j`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field order supported by the single-digit serialization alphabet.
pub const MAX_FIELD_ORDER: u32 = 16;

const DIGITS: &[u8; 16] = b"0123456789abcdef";

#[derive(Clone)]
pub struct Field {
    inner: Arc<Tables>,
}

struct Tables {
    p: u8,
    n: u8,
    q: u8,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    frob: Vec<u8>,
    defining: Vec<u8>,
    primitive: u8,
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

impl Field {
    /// The field of order `p^n`, subject to the default cap of 16.
    pub fn new(p: u32, n: u32) -> Result<Self> {
        Self::with_cap(p, n, MAX_FIELD_ORDER)
    }

    pub fn with_cap(p: u32, n: u32, cap: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::InvalidField("degree must be positive".into()));
        }
        let q = p.checked_pow(n).unwrap_or(u32::MAX);
        let cap = cap.min(MAX_FIELD_ORDER);
        if q > cap {
            return Err(Error::InvalidField(format!("order {p}^{n} exceeds cap {cap}")));
        }
        Ok(Field {
            inner: Arc::new(Tables::build(p as u8, n as u8)),
        })
    }

    /// The field of order `q` (a prime power).
    pub fn of_order(q: u32) -> Result<Self> {
        for p in 2..=q {
            if is_prime(p) && q % p == 0 {
                let mut n = 0;
                let mut r = q;
                while r % p == 0 {
                    r /= p;
                    n += 1;
                }
                if r != 1 {
                    return Err(Error::InvalidField(format!("{q} is not a prime power")));
                }
                return Field::new(p, n);
            }
        }
        Err(Error::InvalidField(format!("{q} is not a prime power")))
    }

    /// Parses `"p^n"` or a bare prime power `"q"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once('^') {
            Some((p, n)) => {
                let p = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad field `{s}`")))?;
                let n = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad field `{s}`")))?;
                Field::new(p, n)
            }
            None => Field::of_order(
                s.parse()
                    .map_err(|_| Error::Parse(format!("bad field `{s}`")))?,
            ),
        }
    }

    pub fn p(&self) -> u32 {
        self.inner.p as u32
    }
    pub fn n(&self) -> u32 {
        self.inner.n as u32
    }
    pub fn q(&self) -> u32 {
        self.inner.q as u32
    }

    /// Coefficients (over `F_p`, low to high) of the defining polynomial.
    pub fn defining_poly(&self) -> &[u8] {
        &self.inner.defining
    }

    /// A generator of the multiplicative group.
    pub fn primitive(&self) -> u8 {
        self.inner.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.inner.q
    }

    pub fn units(&self) -> impl Iterator<Item = u8> {
        1..self.inner.q
    }

    pub fn check(&self, v: u32) -> Result<u8> {
        if v < self.q() {
            Ok(v as u8)
        } else {
            Err(Error::NotInField(v))
        }
    }

    #[inline]
    fn idx(&self, a: u8, b: u8) -> usize {
        a as usize * self.inner.q as usize + b as usize
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.inner.add[self.idx(a, b)]
    }
    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.inner.neg[a as usize]
    }
    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.inner.mul[self.idx(a, b)]
    }

    pub fn inv(&self, a: u8) -> Result<u8> {
        if a == 0 {
            Err(Error::ZeroInverse)
        } else {
            Ok(self.inner.inv[a as usize])
        }
    }

    pub fn div(&self, a: u8, b: u8) -> Result<u8> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u8, mut e: u64) -> u8 {
        let mut base = a;
        let mut acc = 1u8;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^(p^e)`, the `e`-th power of Frobenius.
    pub fn frobenius(&self, a: u8, e: u32) -> u8 {
        let mut x = a;
        for _ in 0..(e % self.n()) {
            x = self.inner.frob[x as usize];
        }
        x
    }

    /// Multiplicative order of a non-zero element.
    pub fn order_of(&self, a: u8) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        Ok(k)
    }

    /// Coordinates of `a` in the `F_p`-basis `{x^j}`.
    pub fn coords(&self, a: u8) -> Vec<u8> {
        let p = self.inner.p;
        let mut v = a;
        (0..self.inner.n)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    /// The `j`-th basis element `x^j`.
    pub fn basis(&self, j: u32) -> u8 {
        (self.p().pow(j)) as u8
    }

    pub fn digit(&self, a: u8) -> char {
        DIGITS[a as usize] as char
    }

    pub fn parse_digit(&self, c: char) -> Result<u8> {
        let v = c
            .to_digit(16)
            .ok_or_else(|| Error::Parse(format!("bad digit `{c}`")))?;
        self.check(v)
    }

    pub fn parse_elem(&self, s: &str) -> Result<u8> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => self.parse_digit(c),
            _ => Err(Error::Parse(format!("bad field element `{s}`"))),
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.n == other.inner.n)
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p(), self.n())
    }
}

// Arithmetic in F_p[x] on short coefficient vectors, used only to build tables.
fn fp_mulmod(a: &[u8], b: &[u8], m: &[u8], p: u8) -> Vec<u8> {
    let n = m.len() - 1;
    let mut prod = vec![0u16; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u16 * y as u16) % p as u16;
        }
    }
    let mut prod: Vec<u8> = prod.into_iter().map(|v| v as u8).collect();
    // m is monic
    for top in (n..prod.len()).rev() {
        let c = prod[top];
        if c != 0 {
            for k in 0..=n {
                let sub = (c as u16 * m[k] as u16) % p as u16;
                let idx = top - n + k;
                prod[idx] = ((prod[idx] as u16 + p as u16 - sub) % p as u16) as u8;
            }
        }
    }
    prod.truncate(n);
    prod.resize(n, 0);
    prod
}

fn code_to_vec(mut v: u32, p: u8, n: u8) -> Vec<u8> {
    (0..n)
        .map(|_| {
            let d = (v % p as u32) as u8;
            v /= p as u32;
            d
        })
        .collect()
}

fn vec_to_code(v: &[u8], p: u8) -> u8 {
    v.iter().rev().fold(0u32, |acc, &d| acc * p as u32 + d as u32) as u8
}

impl Tables {
    fn build(p: u8, n: u8) -> Tables {
        let q = (p as u32).pow(n as u32) as u8;
        let defining = Self::find_defining(p, n);
        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..q {
            let va = code_to_vec(a as u32, p, n);
            for b in 0..q {
                let vb = code_to_vec(b as u32, p, n);
                let s: Vec<u8> = va.iter().zip(&vb).map(|(x, y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = vec_to_code(&s, p);
                let m = if n == 1 {
                    vec![((a as u16 * b as u16) % p as u16) as u8]
                } else {
                    fp_mulmod(&va, &vb, &defining, p)
                };
                mul[a as usize * qs + b as usize] = vec_to_code(&m, p);
            }
        }
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        for a in 0..q {
            for b in 0..q {
                if add[a as usize * qs + b as usize] == 0 {
                    neg[a as usize] = b;
                }
                if mul[a as usize * qs + b as usize] == 1 {
                    inv[a as usize] = b;
                }
            }
        }
        let mut frob = vec![0u8; qs];
        for a in 0..q {
            let mut x = 1u8;
            for _ in 0..p {
                x = mul[x as usize * qs + a as usize];
            }
            frob[a as usize] = x;
        }
        let order = |a: u8| {
            let mut x = a;
            let mut k = 1u32;
            while x != 1 {
                x = mul[x as usize * qs + a as usize];
                k += 1;
            }
            k
        };
        let primitive = (1..q)
            .find(|&a| order(a) == q as u32 - 1)
            .expect("multiplicative group of a finite field is cyclic");
        Tables {
            p,
            n,
            q,
            add,
            mul,
            neg,
            inv,
            frob,
            defining,
            primitive,
        }
    }

    /// Least monic irreducible of degree `n` over `F_p` (coefficient order) whose
    /// root has order `p^n - 1`.
    fn find_defining(p: u8, n: u8) -> Vec<u8> {
        if n == 1 {
            return vec![0, 1];
        }
        let q = (p as u32).pow(n as u32);
        for low in 0..q {
            let mut m = code_to_vec(low, p, n);
            m.push(1);
            if m[0] == 0 {
                continue;
            }
            // order of x modulo m: must be q-1, which forces irreducibility
            let x = {
                let mut v = vec![0u8; n as usize];
                v[1] = 1;
                v
            };
            let one = {
                let mut v = vec![0u8; n as usize];
                v[0] = 1;
                v
            };
            let mut cur = x.clone();
            let mut k = 1u32;
            while cur != one && k < q {
                cur = fp_mulmod(&cur, &x, &m, p);
                k += 1;
            }
            if cur == one && k == q - 1 {
                return m;
            }
        }
        unreachable!("a primitive polynomial exists for every degree")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_law_f4() {
        let k = Field::new(2, 2).unwrap();
        for x in k.units() {
            assert_eq!(k.mul(x, k.inv(x).unwrap()), 1);
        }
    }

    #[test]
    fn characteristic_two() {
        let k = Field::new(2, 1).unwrap();
        assert_eq!(k.add(1, 1), 0);
    }

    #[test]
    fn f9_primitive_has_order_eight() {
        let k = Field::new(3, 2).unwrap();
        // exhaustive order scan over all non-zero elements
        let max = k.units().map(|a| k.order_of(a).unwrap()).max().unwrap();
        assert_eq!(max, 8);
        assert_eq!(k.order_of(k.primitive()).unwrap(), 8);
    }

    #[test]
    fn axioms_hold_for_all_small_fields() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let k = Field::of_order(q).unwrap();
            assert_eq!(k.elements().count() as u32, q);
            for a in k.elements() {
                for b in k.elements() {
                    assert_eq!(k.add(a, b), k.add(b, a));
                    assert_eq!(k.mul(a, b), k.mul(b, a));
                    for c in k.elements() {
                        assert_eq!(
                            k.mul(a, k.add(b, c)),
                            k.add(k.mul(a, b), k.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn zero_inverse_and_bad_fields() {
        let k = Field::new(3, 1).unwrap();
        assert_eq!(k.inv(0), Err(Error::ZeroInverse));
        assert!(Field::new(4, 1).is_err());
        assert!(Field::new(2, 5).is_err());
        assert!(Field::of_order(6).is_err());
        assert_eq!(Field::parse("3^2").unwrap().q(), 9);
        assert_eq!(Field::parse("8").unwrap(), Field::new(2, 3).unwrap());
    }

    #[test]
    fn frobenius_is_automorphism() {
        let k = Field::new(2, 4).unwrap();
        for a in k.elements() {
            for b in k.elements() {
                assert_eq!(
                    k.frobenius(k.mul(a, b), 1),
                    k.mul(k.frobenius(a, 1), k.frobenius(b, 1))
                );
            }
            assert_eq!(k.frobenius(a, 4), a);
        }
    }
}
