use std::sync::Arc;

use serde_json::{json, Value};

use crate::algebra::{Field, Poly, Subspace};
use crate::error::{Error, Result};
use crate::matrices::MatGroup;

/// A concrete finite group. Elements are codes below [`FinGroup::code_bound`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FinGroup {
    Matrix(MatGroup),
    Product(ProductGroup),
    Additive(AddQuotient),
    /// `S_n` acting on `{0, .., n-1}`; code packs images as base-`n` digits
    /// and `(x y)(i) = x(y(i))`.
    Symmetric(u8),
    Table(Arc<TableGroup>),
}

/// Direct product with mixed-radix codes, first factor least significant.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProductGroup {
    factors: Vec<FinGroup>,
    bounds: Vec<u64>,
}

/// The additive group `F_q^len / W`, elements being the canonical coset
/// representatives (zero at the pivots of `W`) coded by their free coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AddQuotient {
    sub: Subspace,
    free: Vec<usize>,
}

/// An explicit multiplication table on `0..n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TableGroup {
    n: u32,
    identity: u32,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl ProductGroup {
    pub fn new(factors: Vec<FinGroup>) -> Result<Self> {
        let bounds: Vec<u64> = factors.iter().map(|f| f.code_bound()).collect();
        bounds
            .iter()
            .try_fold(1u64, |acc, &b| acc.checked_mul(b))
            .filter(|&b| b <= 1 << 62)
            .ok_or_else(|| Error::cap("product code space", 1 << 62))?;
        Ok(ProductGroup { factors, bounds })
    }

    pub fn factors(&self) -> &[FinGroup] {
        &self.factors
    }

    pub fn split(&self, mut x: u64) -> Vec<u64> {
        self.bounds
            .iter()
            .map(|&b| {
                let c = x % b;
                x /= b;
                c
            })
            .collect()
    }

    pub fn join(&self, parts: &[u64]) -> u64 {
        parts
            .iter()
            .zip(&self.bounds)
            .rev()
            .fold(0, |acc, (&p, &b)| acc * b + p)
    }

    /// Embeds a factor element at position `i`, identity elsewhere.
    pub fn inject(&self, i: usize, x: u64) -> u64 {
        let mut parts: Vec<u64> = self.factors.iter().map(|f| f.identity()).collect();
        parts[i] = x;
        self.join(&parts)
    }

    pub fn project(&self, i: usize, x: u64) -> u64 {
        self.split(x)[i]
    }
}

impl AddQuotient {
    pub fn new(sub: Subspace) -> Result<Self> {
        let free = sub.free_positions();
        if (sub.field().q() as u64).checked_pow(free.len() as u32).is_none() || free.len() > 40 {
            return Err(Error::cap("additive quotient size", 1 << 40));
        }
        Ok(AddQuotient { sub, free })
    }

    pub fn subspace(&self) -> &Subspace {
        &self.sub
    }

    pub fn field(&self) -> &Field {
        self.sub.field()
    }

    pub fn len(&self) -> usize {
        self.sub.len()
    }

    pub fn order(&self) -> u64 {
        (self.field().q() as u64).pow(self.free.len() as u32)
    }

    /// The class of an arbitrary vector of length `len`.
    pub fn class_of(&self, v: &[u8]) -> u64 {
        let r = self.sub.reduce(v);
        let q = self.field().q() as u64;
        self.free
            .iter()
            .rev()
            .fold(0, |acc, &i| acc * q + r[i] as u64)
    }

    pub fn class_of_poly(&self, p: &Poly) -> u64 {
        let mut v = p.coeffs().to_vec();
        if v.len() > self.len() {
            // callers reduce modulo the conductor first; extra terms are a bug
            v.truncate(self.len());
        }
        self.class_of(&v)
    }

    /// The canonical representative of a class code.
    pub fn representative(&self, mut x: u64) -> Vec<u8> {
        let q = self.field().q() as u64;
        let mut v = vec![0u8; self.len()];
        for &i in &self.free {
            v[i] = (x % q) as u8;
            x /= q;
        }
        v
    }

    fn digitwise(&self, mut x: u64, mut y: u64, f: impl Fn(u8, u8) -> u8) -> u64 {
        let q = self.field().q() as u64;
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.free.len() {
            out += f((x % q) as u8, (y % q) as u8) as u64 * place;
            x /= q;
            y /= q;
            place *= q;
        }
        out
    }
}

impl TableGroup {
    /// Validates closure, identity, inverses and associativity.
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = rows.len() as u32;
        if n == 0 {
            return Err(Error::Parse("empty multiplication table".into()));
        }
        if n > 512 {
            return Err(Error::cap("table group order", 512));
        }
        if rows.iter().any(|r| r.len() != n as usize || r.iter().any(|&x| x >= n)) {
            return Err(Error::Parse("table rows must be permutations of 0..n".into()));
        }
        let mul: Vec<u32> = rows.into_iter().flatten().collect();
        let at = |a: u32, b: u32| mul[(a * n + b) as usize];
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::Parse("table has no identity".into()))?;
        let mut inv = vec![0; n as usize];
        for x in 0..n {
            inv[x as usize] = (0..n)
                .find(|&y| at(x, y) == identity)
                .ok_or_else(|| Error::Parse("table element without inverse".into()))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(Error::Parse("table is not associative".into()));
                    }
                }
            }
        }
        Ok(TableGroup { n, identity, mul, inv })
    }

    /// Builds without the associativity check; for quotients computed here.
    pub(crate) fn trusted(n: u32, identity: u32, mul: Vec<u32>, inv: Vec<u32>) -> Self {
        TableGroup { n, identity, mul, inv }
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.mul.chunks(self.n as usize).map(|c| c.to_vec()).collect()
    }
}

fn perm_decode(n: u8, mut x: u64) -> Vec<u8> {
    let n64 = n as u64;
    (0..n)
        .map(|_| {
            let d = (x % n64) as u8;
            x /= n64;
            d
        })
        .collect()
}

fn perm_encode(n: u8, p: &[u8]) -> u64 {
    p.iter().rev().fold(0, |acc, &d| acc * n as u64 + d as u64)
}

impl FinGroup {
    pub fn product(factors: Vec<FinGroup>) -> Result<Self> {
        Ok(FinGroup::Product(ProductGroup::new(factors)?))
    }

    pub fn additive(sub: Subspace) -> Result<Self> {
        Ok(FinGroup::Additive(AddQuotient::new(sub)?))
    }

    pub fn symmetric(n: u8) -> Result<Self> {
        if n == 0 || n > 12 {
            return Err(Error::Precondition("symmetric degree must be in 1..=12".into()));
        }
        Ok(FinGroup::Symmetric(n))
    }

    pub fn table(rows: Vec<Vec<u32>>) -> Result<Self> {
        Ok(FinGroup::Table(Arc::new(TableGroup::new(rows)?)))
    }

    pub fn code_bound(&self) -> u64 {
        match self {
            FinGroup::Matrix(g) => g.code_bound(),
            FinGroup::Product(p) => p.bounds.iter().product(),
            FinGroup::Additive(a) => a.order(),
            FinGroup::Symmetric(n) => (*n as u64).pow(*n as u32),
            FinGroup::Table(t) => t.n as u64,
        }
    }

    pub fn order(&self) -> u64 {
        match self {
            FinGroup::Matrix(g) => g.order(),
            FinGroup::Product(p) => p.factors.iter().map(|f| f.order()).product(),
            FinGroup::Additive(a) => a.order(),
            FinGroup::Symmetric(n) => (1..=*n as u64).product(),
            FinGroup::Table(t) => t.n as u64,
        }
    }

    pub fn identity(&self) -> u64 {
        match self {
            FinGroup::Matrix(g) => g.identity(),
            FinGroup::Product(p) => {
                let ids: Vec<u64> = p.factors.iter().map(|f| f.identity()).collect();
                p.join(&ids)
            }
            FinGroup::Additive(_) => 0,
            FinGroup::Symmetric(n) => perm_encode(*n, &(0..*n).collect::<Vec<_>>()),
            FinGroup::Table(t) => t.identity as u64,
        }
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        match self {
            FinGroup::Matrix(g) => g.mul(x, y),
            FinGroup::Product(p) => {
                let (xs, ys) = (p.split(x), p.split(y));
                let zs: Vec<u64> = p
                    .factors
                    .iter()
                    .zip(xs.iter().zip(&ys))
                    .map(|(f, (&a, &b))| f.mul(a, b))
                    .collect();
                p.join(&zs)
            }
            FinGroup::Additive(a) => {
                let k = a.field();
                a.digitwise(x, y, |u, v| k.add(u, v))
            }
            FinGroup::Symmetric(n) => {
                let (px, py) = (perm_decode(*n, x), perm_decode(*n, y));
                let z: Vec<u8> = py.iter().map(|&i| px[i as usize]).collect();
                perm_encode(*n, &z)
            }
            FinGroup::Table(t) => t.mul[(x * t.n as u64 + y) as usize] as u64,
        }
    }

    pub fn inv(&self, x: u64) -> u64 {
        match self {
            FinGroup::Matrix(g) => g.inv(x),
            FinGroup::Product(p) => {
                let zs: Vec<u64> = p
                    .factors
                    .iter()
                    .zip(p.split(x))
                    .map(|(f, a)| f.inv(a))
                    .collect();
                p.join(&zs)
            }
            FinGroup::Additive(a) => {
                let k = a.field();
                a.digitwise(x, 0, |u, _| k.neg(u))
            }
            FinGroup::Symmetric(n) => {
                let px = perm_decode(*n, x);
                let mut z = vec![0u8; *n as usize];
                for (i, &v) in px.iter().enumerate() {
                    z[v as usize] = i as u8;
                }
                perm_encode(*n, &z)
            }
            FinGroup::Table(t) => t.inv[x as usize] as u64,
        }
    }

    pub fn contains(&self, x: u64) -> bool {
        if x >= self.code_bound() {
            return false;
        }
        match self {
            FinGroup::Matrix(g) => g.contains(x),
            FinGroup::Product(p) => p
                .factors
                .iter()
                .zip(p.split(x))
                .all(|(f, a)| f.contains(a)),
            FinGroup::Additive(_) | FinGroup::Table(_) => true,
            FinGroup::Symmetric(n) => {
                let mut seen = perm_decode(*n, x);
                seen.sort_unstable();
                seen.iter().enumerate().all(|(i, &v)| i as u8 == v)
            }
        }
    }

    pub fn pow(&self, x: u64, mut e: u64) -> u64 {
        let (mut acc, mut base) = (self.identity(), x);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, x: u64) -> u64 {
        let e = self.identity();
        let mut y = x;
        let mut n = 1;
        while y != e {
            y = self.mul(y, x);
            n += 1;
        }
        n
    }

    /// `x^-1 y x`.
    pub fn conj(&self, y: u64, x: u64) -> u64 {
        self.mul(self.mul(self.inv(x), y), x)
    }

    pub fn commutator(&self, x: u64, y: u64) -> u64 {
        self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))
    }

    /// A generating set of the whole group.
    pub fn generators(&self) -> Vec<u64> {
        match self {
            FinGroup::Matrix(g) => g.generators(),
            FinGroup::Product(p) => {
                let mut out = Vec::new();
                for (i, f) in p.factors.iter().enumerate() {
                    out.extend(f.generators().into_iter().map(|g| p.inject(i, g)));
                }
                out
            }
            FinGroup::Additive(a) => {
                let q = a.field().q() as u64;
                let k = a.field();
                (0..a.free.len())
                    .flat_map(|i| (0..k.n()).map(move |j| k.basis(j) as u64 * q.pow(i as u32)))
                    .collect()
            }
            FinGroup::Symmetric(n) => {
                let n = *n;
                if n == 1 {
                    return Vec::new();
                }
                let mut swap: Vec<u8> = (0..n).collect();
                swap.swap(0, 1);
                let cycle: Vec<u8> = (0..n).map(|i| (i + 1) % n).collect();
                vec![perm_encode(n, &swap), perm_encode(n, &cycle)]
            }
            FinGroup::Table(t) => (0..t.n as u64).filter(|&x| x != t.identity as u64).collect(),
        }
    }

    /// A JSON rendering of an element.
    pub fn format_element(&self, x: u64) -> Value {
        match self {
            FinGroup::Matrix(g) => json!(g.format(x)),
            FinGroup::Product(p) => Value::Array(
                p.factors
                    .iter()
                    .zip(p.split(x))
                    .map(|(f, a)| f.format_element(a))
                    .collect(),
            ),
            FinGroup::Additive(a) => {
                json!(Poly::from_coeffs(a.representative(x)).to_digits(a.field()))
            }
            FinGroup::Symmetric(n) => json!(perm_decode(*n, x)),
            FinGroup::Table(_) => json!(x),
        }
    }

    pub fn parse_element(&self, v: &Value) -> Result<u64> {
        let bad = || Error::Parse(format!("malformed element {v}"));
        let x = match self {
            FinGroup::Matrix(g) => {
                let entries: Vec<String> =
                    serde_json::from_value(v.clone()).map_err(|_| bad())?;
                let m = crate::matrices::Mat2::parse(&entries, g.field())?;
                g.reduce(&m)
            }
            FinGroup::Product(p) => {
                let parts = v.as_array().ok_or_else(bad)?;
                if parts.len() != p.factors.len() {
                    return Err(bad());
                }
                let xs = p
                    .factors
                    .iter()
                    .zip(parts)
                    .map(|(f, e)| f.parse_element(e))
                    .collect::<Result<Vec<_>>>()?;
                p.join(&xs)
            }
            FinGroup::Additive(a) => {
                let s = v.as_str().ok_or_else(bad)?;
                let poly = Poly::parse(s, a.field())?;
                if poly.degree().is_some_and(|d| d >= a.len()) {
                    return Err(bad());
                }
                a.class_of(&poly.to_vec(a.len()))
            }
            FinGroup::Symmetric(n) => {
                let imgs: Vec<u8> = serde_json::from_value(v.clone()).map_err(|_| bad())?;
                if imgs.len() != *n as usize {
                    return Err(bad());
                }
                perm_encode(*n, &imgs)
            }
            FinGroup::Table(_) => v.as_u64().ok_or_else(bad)?,
        };
        if !self.contains(x) {
            return Err(Error::Parse(format!("{v} is not a group element")));
        }
        Ok(x)
    }

    /// Builds a permutation from a list of cycles (for tests and fixtures).
    pub fn perm_from_cycles(n: u8, cycles: &[&[u8]]) -> u64 {
        let mut p: Vec<u8> = (0..n).collect();
        for c in cycles {
            for (i, &a) in c.iter().enumerate() {
                p[a as usize] = c[(i + 1) % c.len()];
            }
        }
        perm_encode(n, &p)
    }
}
