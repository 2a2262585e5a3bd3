//! Brute-force reference computations, written independently of the group
//! algorithms they check: residue rings by lookup tables, groups by
//! breadth-first closure over hash sets, subgroup lattices by joins of cyclic
//! subgroups.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use crate::algebra::{Field, Poly};
use crate::error::{Error, Result};
use crate::matrices::{Mat2, Mode};
use crate::subgroups::SubgroupHandle;

/// Largest residue ring the table-driven oracles build.
const MAX_RING: usize = 2048;

/// `F_q[t] / f` with elements coded by their coefficient digits, base `q`,
/// low degree first, and full addition and multiplication tables.
pub struct NaiveRing {
    k: Field,
    f: Vec<u8>,
    size: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
}

impl NaiveRing {
    pub fn new(k: &Field, f: &Poly) -> Result<Self> {
        let deg = f.degree().ok_or(Error::ZeroModulus)?;
        let q = k.q() as usize;
        let size = q
            .checked_pow(deg as u32)
            .filter(|&s| s <= MAX_RING)
            .ok_or_else(|| Error::cap("oracle residue ring", MAX_RING as u64))?;
        // monic copy of f
        let lead = k.inv(f.leading())?;
        let fm: Vec<u8> = f.coeffs().iter().map(|&c| k.mul(lead, c)).collect();
        let mut ring = NaiveRing { k: k.clone(), f: fm, size, add: Vec::new(), mul: Vec::new() };
        let digits: Vec<Vec<u8>> = (0..size).map(|x| ring.digits(x as u32)).collect();
        let mut add = vec![0; size * size];
        let mut mul = vec![0; size * size];
        for x in 0..size {
            for y in 0..size {
                let s: Vec<u8> = digits[x].iter().zip(&digits[y]).map(|(&a, &b)| k.add(a, b)).collect();
                add[x * size + y] = ring.code(&s);
                mul[x * size + y] = ring.code(&ring.reduce(&convolve(k, &digits[x], &digits[y])));
            }
        }
        ring.add = add;
        ring.mul = mul;
        Ok(ring)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn deg(&self) -> usize {
        self.f.len() - 1
    }

    fn digits(&self, mut x: u32) -> Vec<u8> {
        let q = self.k.q();
        (0..self.deg())
            .map(|_| {
                let d = (x % q) as u8;
                x /= q;
                d
            })
            .collect()
    }

    fn code(&self, v: &[u8]) -> u32 {
        v.iter().rev().fold(0, |acc, &d| acc * self.k.q() + d as u32)
    }

    fn reduce(&self, v: &[u8]) -> Vec<u8> {
        rem_monic(&self.k, v, &self.f)
    }

    pub fn of_poly(&self, p: &Poly) -> u32 {
        self.code(&self.reduce(p.coeffs()))
    }

    pub fn to_poly(&self, x: u32) -> Poly {
        Poly::from_coeffs(self.digits(x))
    }

    pub fn constant(&self, c: u8) -> u32 {
        c as u32
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        self.add[x as usize * self.size + y as usize]
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul[x as usize * self.size + y as usize]
    }

    fn neg(&self, x: u32) -> u32 {
        self.mul(self.constant(self.k.neg(1)), x)
    }

    pub fn mat_mul(&self, x: &[u32; 4], y: &[u32; 4]) -> [u32; 4] {
        let (m, a) = (|u, v| self.mul(u, v), |u, v| self.add(u, v));
        [
            a(m(x[0], y[0]), m(x[1], y[2])),
            a(m(x[0], y[1]), m(x[1], y[3])),
            a(m(x[2], y[0]), m(x[3], y[2])),
            a(m(x[2], y[1]), m(x[3], y[3])),
        ]
    }

    pub fn det(&self, x: &[u32; 4]) -> u32 {
        self.add(self.mul(x[0], x[3]), self.neg(self.mul(x[1], x[2])))
    }

    pub fn identity(&self) -> [u32; 4] {
        [1, 0, 0, 1]
    }

    /// The determinant condition of the finite group: `det = 1` for SL,
    /// a non-zero constant for GL.
    pub fn admits(&self, x: &[u32; 4], mode: Mode) -> bool {
        let d = self.det(x);
        match mode {
            Mode::SL => d == 1,
            Mode::GL => d != 0 && d < self.k.q(),
        }
    }

    pub fn reduce_mat(&self, m: &Mat2) -> [u32; 4] {
        [self.of_poly(&m.a), self.of_poly(&m.b), self.of_poly(&m.c), self.of_poly(&m.d)]
    }

    pub fn lift_mat(&self, x: &[u32; 4]) -> Mat2 {
        Mat2::new(self.to_poly(x[0]), self.to_poly(x[1]), self.to_poly(x[2]), self.to_poly(x[3]))
    }
}

/// Remainder of `v` by the monic `f` (coefficients low degree first), padded
/// to length `deg f`.
fn rem_monic(k: &Field, v: &[u8], f: &[u8]) -> Vec<u8> {
    let n = f.len() - 1;
    let mut v = v.to_vec();
    for top in (n..v.len()).rev() {
        let c = v[top];
        if c == 0 {
            continue;
        }
        for (i, &fi) in f.iter().enumerate() {
            let pos = top - n + i;
            v[pos] = k.sub(v[pos], k.mul(c, fi));
        }
    }
    v.resize(n, 0);
    v
}

fn digits_of(mut code: usize, q: usize, len: usize) -> Vec<u8> {
    (0..len)
        .map(|_| {
            let d = (code % q) as u8;
            code /= q;
            d
        })
        .collect()
}

fn convolve(k: &Field, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; (a.len() + b.len()).max(1)];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = k.add(out[i + j], k.mul(x, y));
        }
    }
    out
}

/// Every matrix over `F_q[t]/f` satisfying the determinant condition, by
/// running through all `|A/f|^4` quadruples.
pub fn brute_matrix_group(k: &Field, f: &Poly, mode: Mode) -> Result<Vec<[u32; 4]>> {
    let r = NaiveRing::new(k, f)?;
    let s = r.size() as u32;
    if (s as u64).pow(4) > 1 << 26 {
        return Err(Error::cap("brute-force quadruples", 1 << 26));
    }
    let mut out = Vec::new();
    for a in 0..s {
        for b in 0..s {
            for c in 0..s {
                for d in 0..s {
                    let m = [a, b, c, d];
                    if r.admits(&m, mode) {
                        out.push(m);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Breadth-first closure of `gens` under right multiplication; in a finite
/// group this is the generated subgroup.
pub fn naive_closure<T, F>(identity: T, gens: &[T], mul: F, limit: usize) -> Result<HashSet<T>>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let mut seen = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = mul(&x, g);
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return Err(Error::cap("oracle closure", limit as u64));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

/// A finite group as an explicit Cayley table on `0..n`, identity `0`.
pub struct CayleyTable {
    n: usize,
    table: Vec<usize>,
}

impl CayleyTable {
    /// `elements` must be closed under `mul` and start with the identity.
    pub fn new<T: Clone + Eq + Hash>(elements: &[T], mul: impl Fn(&T, &T) -> T) -> Result<Self> {
        let n = elements.len();
        let pos: HashMap<&T, usize> = elements.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let mut table = vec![0; n * n];
        for (i, x) in elements.iter().enumerate() {
            for (j, y) in elements.iter().enumerate() {
                let z = mul(x, y);
                table[i * n + j] = *pos
                    .get(&z)
                    .ok_or_else(|| Error::Precondition("element list is not closed".into()))?;
            }
        }
        Ok(CayleyTable { n, table })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i * self.n + j]
    }

    fn inv(&self, i: usize) -> usize {
        (0..self.n).find(|&j| self.mul(i, j) == 0).expect("group element")
    }

    fn span(&self, gens: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.n];
        inside[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    queue.push_back(y);
                }
            }
        }
        inside
    }

    /// The subgroup generated by all commutators `x^-1 y^-1 x y`.
    pub fn derived(&self) -> Vec<usize> {
        let mut comms = HashSet::new();
        for x in 0..self.n {
            for y in 0..self.n {
                let c = self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y));
                comms.insert(c);
            }
        }
        let gens: Vec<usize> = comms.into_iter().collect();
        members(&self.span(&gens))
    }

    /// The normal closure of `set`: generated by all conjugates.
    pub fn normal_closure(&self, set: &[usize]) -> Vec<usize> {
        let mut conj = HashSet::new();
        for &s in set {
            for g in 0..self.n {
                conj.insert(self.mul(self.mul(self.inv(g), s), g));
            }
        }
        let gens: Vec<usize> = conj.into_iter().collect();
        members(&self.span(&gens))
    }

    /// Every subgroup, as membership vectors: cyclic subgroups first, then
    /// joins with cyclic subgroups until nothing new appears.
    pub fn subgroup_lattice(&self) -> Vec<Vec<bool>> {
        let mut cyclic: Vec<Vec<bool>> = Vec::new();
        for x in 0..self.n {
            let c = self.span(&[x]);
            if !cyclic.contains(&c) {
                cyclic.push(c);
            }
        }
        let mut all: Vec<Vec<bool>> = cyclic.clone();
        let mut seen: HashSet<Vec<bool>> = all.iter().cloned().collect();
        let mut frontier = all.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for s in &frontier {
                for c in &cyclic {
                    let mut gens = members(s);
                    gens.extend(members(c));
                    let j = self.span(&gens);
                    if seen.insert(j.clone()) {
                        next.push(j);
                    }
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        all
    }

    /// The smallest index of a proper subgroup.
    pub fn min_proper_index(&self) -> Option<usize> {
        self.subgroup_lattice()
            .iter()
            .map(|s| s.iter().filter(|&&b| b).count())
            .filter(|&o| o < self.n)
            .map(|o| self.n / o)
            .min()
    }
}

fn members(inside: &[bool]) -> Vec<usize> {
    inside.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

/// `SL_2(F_q)` or `GL_2(F_q)` as a Cayley table, identity first.
pub fn constant_group_table(k: &Field, mode: Mode) -> Result<(Vec<[u32; 4]>, CayleyTable)> {
    let r = NaiveRing::new(k, &Poly::t())?;
    let mut elems = brute_matrix_group(k, &Poly::t(), mode)?;
    let id = r.identity();
    elems.retain(|x| *x != id);
    elems.insert(0, id);
    let table = CayleyTable::new(&elems, |x, y| r.mat_mul(x, y))?;
    Ok((elems, table))
}

/// Brute-force minimal index of a proper subgroup of `SL_2(F_q)`.
pub fn min_index_sl2_brute(k: &Field) -> Result<usize> {
    let (_, table) = constant_group_table(k, Mode::SL)?;
    table
        .min_proper_index()
        .ok_or_else(|| Error::Precondition("the trivial group has no proper subgroup".into()))
}

/// Brute-force order of the derived subgroup of `SL_2(A/f)` (or `GL_2`).
pub fn derived_order_brute(k: &Field, f: &Poly, mode: Mode) -> Result<usize> {
    let r = NaiveRing::new(k, f)?;
    let mut elems = brute_matrix_group(k, f, mode)?;
    let id = r.identity();
    elems.retain(|x| *x != id);
    elems.insert(0, id);
    if elems.len() > 4096 {
        return Err(Error::cap("oracle Cayley table", 4096));
    }
    Ok(CayleyTable::new(&elems, |x, y| r.mat_mul(x, y))?.derived().len())
}

/// The translation residues `a mod m` with `T(a)` in every conjugate of the
/// handle, by checking each residue against every image element, together
/// with the level: the monic divisor `d` of `m` of least degree whose
/// multiples all lie in that set.
pub fn naive_quasi_level(hd: &SubgroupHandle, limit: usize) -> Result<(HashSet<Vec<u8>>, Poly)> {
    let h = hd.homspec();
    let k = h.field().clone();
    let tgt = h.target();
    let m = h.modulus().clone();
    let len = m.degree_or_zero();
    let q = k.q();
    let total = (q as usize)
        .checked_pow(len as u32)
        .filter(|&t| t <= limit)
        .ok_or_else(|| Error::cap("oracle residues", limit as u64))?;
    let image = naive_closure(tgt.identity(), &h.generator_images(), |x, y| tgt.mul(*x, *y), limit)?;
    let u = hd.target_subgroup();
    let p = k.p() as u32;
    let tau = |v: &[u8]| -> u64 {
        let mut x = tgt.identity();
        for (i, &c) in v.iter().enumerate() {
            // F_p coordinates of c are its base-p digits
            let mut c = c as u32;
            for j in 0..k.n() as usize {
                for _ in 0..c % p {
                    x = tgt.mul(x, h.raw().trans[i][j]);
                }
                c /= p;
            }
        }
        x
    };
    let mut ql = HashSet::new();
    for code in 0..total {
        let v = digits_of(code, q as usize, len);
        let x = tau(&v);
        if image.iter().all(|&g| u.contains(tgt.mul(tgt.mul(g, x), tgt.inv(g)))) {
            ql.insert(v);
        }
    }
    let level = naive_level(&k, &m, &ql)?;
    Ok((ql, level))
}

fn naive_level(k: &Field, m: &Poly, ql: &HashSet<Vec<u8>>) -> Result<Poly> {
    let len = m.degree_or_zero();
    if len == 0 {
        return Ok(Poly::one());
    }
    let q = k.q() as usize;
    for deg in 0..=len {
        for code in 0..q.pow(deg as u32) {
            let mut d = digits_of(code, q, deg);
            d.push(1);
            if rem_monic(k, m.coeffs(), &d).iter().any(|&c| c != 0) {
                continue;
            }
            let rest = len - deg;
            let inside = (0..q.pow(rest as u32)).all(|b| {
                let prod = convolve(k, &d, &digits_of(b, q, rest));
                ql.contains(&rem_monic(k, &prod, m.coeffs()))
            });
            if inside {
                return Ok(Poly::from_coeffs(d));
            }
        }
    }
    Err(Error::Inconsistent("the modulus ideal is not inside the quasi-level".into()))
}

/// Whether the handle contains `Gamma(l)`, `l` its level (or `t` for level
/// `1`), decided in the image of the domain under `(h, pi_l)`: every element
/// `(x, 1)` must have `x` in `U`.
pub fn congruence_oracle(hd: &SubgroupHandle, limit: usize) -> Result<bool> {
    let (_, level) = naive_quasi_level(hd, limit)?;
    let ell = if level.degree_or_zero() == 0 { Poly::t() } else { level };
    let h = hd.homspec();
    let tgt = h.target();
    let r = NaiveRing::new(h.field(), &ell)?;
    let gens: Vec<(u64, [u32; 4])> = h
        .domain_generators()
        .iter()
        .map(|g| Ok((h.eval(g)?, r.reduce_mat(g))))
        .collect::<Result<_>>()?;
    let x = naive_closure(
        (tgt.identity(), r.identity()),
        &gens,
        |a, b| (tgt.mul(a.0, b.0), r.mat_mul(&a.1, &b.1)),
        limit,
    )?;
    let u = hd.target_subgroup();
    Ok(x.iter().filter(|(_, m)| *m == r.identity()).all(|(y, _)| u.contains(*y)))
}
