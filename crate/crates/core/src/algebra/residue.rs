//! Residue rings `A/(f)` with elements encoded as base-`q` integers.

use std::sync::Arc;

use super::field::Field;
use super::poly::{Poly, PolyRing};
use crate::error::{Error, Result};

/// Rings at most this large get full addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

#[derive(Clone)]
pub struct ResidueRing {
    inner: Arc<Inner>,
}

struct Inner {
    ring: PolyRing,
    modulus: Poly,
    deg: usize,
    size: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
}

impl PartialEq for ResidueRing {
    fn eq(&self, other: &Self) -> bool {
        self.field() == other.field() && self.inner.modulus == other.inner.modulus
    }
}

impl Eq for ResidueRing {}

impl std::fmt::Debug for ResidueRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "A/({})",
            self.inner.modulus.to_digits(self.field())
        )
    }
}

impl ResidueRing {
    /// `A/(f)` for non-zero `f`; the generator is normalized to be monic.
    pub fn new(k: &Field, f: &Poly) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let ring = PolyRing::new(k.clone());
        ring.check(f)?;
        let modulus = ring.monic(f);
        let deg = modulus.degree_or_zero();
        let size = (k.q() as u64)
            .checked_pow(deg as u32)
            .filter(|&s| s <= u32::MAX as u64 / 4)
            .ok_or_else(|| Error::cap("residue ring size", u32::MAX as u64 / 4))?
            as u32;
        let mut inner = Inner {
            ring,
            modulus,
            deg,
            size,
            add: Vec::new(),
            mul: Vec::new(),
        };
        if size <= TABLE_LIMIT {
            let n = size as usize;
            let mut add = vec![0; n * n];
            let mut mul = vec![0; n * n];
            for a in 0..size {
                for b in 0..size {
                    add[a as usize * n + b as usize] = inner.add_direct(a, b);
                    mul[a as usize * n + b as usize] = inner.mul_direct(a, b);
                }
            }
            inner.add = add;
            inner.mul = mul;
        }
        Ok(ResidueRing {
            inner: Arc::new(inner),
        })
    }

    pub fn field(&self) -> &Field {
        self.inner.ring.field()
    }

    pub fn poly_ring(&self) -> &PolyRing {
        &self.inner.ring
    }

    pub fn modulus(&self) -> &Poly {
        &self.inner.modulus
    }

    pub fn degree(&self) -> usize {
        self.inner.deg
    }

    /// `|A/(f)| = q^deg f`.
    pub fn size(&self) -> u32 {
        self.inner.size
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        if self.inner.size == 1 {
            0
        } else {
            1
        }
    }

    pub fn reduce(&self, a: &Poly) -> u32 {
        let r = self
            .inner
            .ring
            .rem(a, &self.inner.modulus)
            .expect("modulus is non-zero");
        self.inner.encode(&r)
    }

    /// The representative of degree `< deg f`.
    pub fn lift(&self, x: u32) -> Poly {
        self.inner.decode(x)
    }

    pub fn constant(&self, c: u8) -> u32 {
        if self.inner.deg == 0 {
            0
        } else {
            c as u32
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.inner.add.is_empty() {
            self.inner.add_direct(a, b)
        } else {
            self.inner.add[(a * self.inner.size + b) as usize]
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.inner.mul.is_empty() {
            self.inner.mul_direct(a, b)
        } else {
            self.inner.mul[(a * self.inner.size + b) as usize]
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        let k = self.field();
        self.inner.map_digits(a, |d| k.neg(d))
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn scale(&self, c: u8, a: u32) -> u32 {
        let k = self.field();
        self.inner.map_digits(a, |d| k.mul(c, d))
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        let p = self.lift(a);
        match self
            .inner
            .ring
            .inv_mod(&p, &self.inner.modulus)?
        {
            Some(i) => Ok(self.reduce(&i)),
            None => Err(Error::NonInvertible),
        }
    }

    pub fn is_unit(&self, a: u32) -> bool {
        self.inv(a).is_ok()
    }

    /// Splits `A/(f)` into its primary components `A/(p_i^{e_i})`.
    pub fn crt_split(&self) -> Result<Vec<ResidueRing>> {
        if self.inner.deg == 0 {
            return Ok(vec![self.clone()]);
        }
        let r = &self.inner.ring;
        r.factorize(&self.inner.modulus)?
            .into_iter()
            .map(|(g, e)| ResidueRing::new(self.field(), &r.pow(&g, e)))
            .collect()
    }

    /// Projects `x` into each component from [`crt_split`](Self::crt_split).
    pub fn crt_project(&self, parts: &[ResidueRing], x: u32) -> Vec<u32> {
        let p = self.lift(x);
        parts.iter().map(|part| part.reduce(&p)).collect()
    }

    /// Inverse of [`crt_project`](Self::crt_project), built from idempotents.
    pub fn crt_combine(&self, parts: &[ResidueRing], xs: &[u32]) -> Result<u32> {
        if parts.len() != xs.len() {
            return Err(Error::Mismatch("component count".into()));
        }
        let r = &self.inner.ring;
        let f = &self.inner.modulus;
        let mut acc = Poly::zero();
        for (part, &x) in parts.iter().zip(xs) {
            let (cof, _) = r.divmod(f, part.modulus())?;
            let inv = r
                .inv_mod(&cof, part.modulus())?
                .ok_or_else(|| Error::Inconsistent("components are not coprime".into()))?;
            let idem = r.mul(&cof, &inv);
            acc = r.add(&acc, &r.mul(&idem, &part.lift(x)));
        }
        Ok(self.reduce(&acc))
    }

    /// All elements in code order.
    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.inner.size
    }
}

impl Inner {
    fn q(&self) -> u32 {
        self.ring.field().q()
    }

    fn encode(&self, r: &Poly) -> u32 {
        let q = self.q();
        r.coeffs()
            .iter()
            .rev()
            .fold(0u32, |acc, &c| acc * q + c as u32)
    }

    fn decode(&self, mut x: u32) -> Poly {
        let q = self.q();
        let mut v = Vec::with_capacity(self.deg);
        for _ in 0..self.deg {
            v.push((x % q) as u8);
            x /= q;
        }
        Poly::from_coeffs(v)
    }

    fn map_digits(&self, mut x: u32, f: impl Fn(u8) -> u8) -> u32 {
        let q = self.q();
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.deg {
            out += f((x % q) as u8) as u32 * place;
            x /= q;
            place *= q;
        }
        out
    }

    fn add_direct(&self, mut a: u32, mut b: u32) -> u32 {
        let q = self.q();
        let k = self.ring.field();
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.deg {
            out += k.add((a % q) as u8, (b % q) as u8) as u32 * place;
            a /= q;
            b /= q;
            place *= q;
        }
        out
    }

    fn mul_direct(&self, a: u32, b: u32) -> u32 {
        let prod = self.ring.mul(&self.decode(a), &self.decode(b));
        let r = self.ring.rem(&prod, &self.modulus).expect("non-zero modulus");
        self.encode(&r)
    }
}
