//! 2x2 matrices over `A = F_q[t]` and the finite groups `SL_2(A/f)`, `GL_2(A/f)`.

use serde::{Deserialize, Serialize};

use crate::algebra::{Field, Poly, PolyRing, ResidueRing};
use crate::error::{Error, Result};

/// Which ambient group is meant: `SL_2` or `GL_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    SL,
    GL,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::SL => "SL",
            Mode::GL => "GL",
        })
    }
}

/// A matrix `[[a, b], [c, d]]` over `A`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub d: Poly,
}

impl std::fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{:?}, {:?}], [{:?}, {:?}]]", self.a, self.b, self.c, self.d)
    }
}

impl Mat2 {
    pub fn new(a: Poly, b: Poly, c: Poly, d: Poly) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(Poly::one(), Poly::zero(), Poly::zero(), Poly::one())
    }

    /// `T(a) = [[1, a], [0, 1]]`.
    pub fn t(a: Poly) -> Self {
        Self::new(Poly::one(), a, Poly::zero(), Poly::one())
    }

    /// `L(alpha, beta, a) = [[alpha, a], [0, beta]]`.
    pub fn l(alpha: u8, beta: u8, a: Poly) -> Result<Self> {
        if alpha == 0 || beta == 0 {
            return Err(Error::NonUnit);
        }
        Ok(Self::new(Poly::constant(alpha), a, Poly::zero(), Poly::constant(beta)))
    }

    pub fn diag(alpha: u8, beta: u8) -> Result<Self> {
        Self::l(alpha, beta, Poly::zero())
    }

    /// `w = [[0, -1], [1, 0]]`.
    pub fn weyl(k: &Field) -> Self {
        Self::new(Poly::zero(), Poly::constant(k.neg(1)), Poly::one(), Poly::zero())
    }

    pub fn entries(&self) -> [&Poly; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Mat2 {
        Mat2::new(f(&self.a), f(&self.b), f(&self.c), f(&self.d))
    }

    pub fn is_constant(&self) -> bool {
        self.entries().iter().all(|e| e.is_constant())
    }

    /// Largest entry degree (zero entries count as degree 0).
    pub fn max_degree(&self) -> usize {
        self.entries().iter().map(|e| e.degree_or_zero()).max().unwrap()
    }

    pub fn mul(&self, o: &Mat2, r: &PolyRing) -> Mat2 {
        Mat2::new(
            r.add(&r.mul(&self.a, &o.a), &r.mul(&self.b, &o.c)),
            r.add(&r.mul(&self.a, &o.b), &r.mul(&self.b, &o.d)),
            r.add(&r.mul(&self.c, &o.a), &r.mul(&self.d, &o.c)),
            r.add(&r.mul(&self.c, &o.b), &r.mul(&self.d, &o.d)),
        )
    }

    pub fn det(&self, r: &PolyRing) -> Poly {
        r.sub(&r.mul(&self.a, &self.d), &r.mul(&self.b, &self.c))
    }

    /// The determinant as a unit of `k`, if it is one.
    pub fn unit_det(&self, r: &PolyRing) -> Option<u8> {
        let d = self.det(r);
        (d.degree() == Some(0)).then(|| d.coeff(0))
    }

    pub fn in_mode(&self, mode: Mode, r: &PolyRing) -> bool {
        match (mode, self.unit_det(r)) {
            (_, None) => false,
            (Mode::SL, Some(d)) => d == 1,
            (Mode::GL, Some(_)) => true,
        }
    }

    pub fn inv(&self, r: &PolyRing) -> Result<Mat2> {
        let d = self.unit_det(r).ok_or(Error::NonInvertible)?;
        let di = r.field().inv(d)?;
        Ok(Mat2::new(
            r.scale(di, &self.d),
            r.scale(di, &r.neg(&self.b)),
            r.scale(di, &r.neg(&self.c)),
            r.scale(di, &self.a),
        ))
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a.clone(), self.c.clone(), self.b.clone(), self.d.clone())
    }

    /// The contragredient `(M^T)^{-1}`.
    pub fn transpose_inverse(&self, r: &PolyRing) -> Result<Mat2> {
        Ok(self.inv(r)?.transpose())
    }

    pub fn conj(&self, g: &Mat2, r: &PolyRing) -> Result<Mat2> {
        Ok(g.inv(r)?.mul(self, r).mul(g, r))
    }

    pub fn reduce(&self, ring: &ResidueRing) -> [u32; 4] {
        [
            ring.reduce(&self.a),
            ring.reduce(&self.b),
            ring.reduce(&self.c),
            ring.reduce(&self.d),
        ]
    }

    pub fn to_strings(&self, k: &Field) -> [String; 4] {
        [
            self.a.to_digits(k),
            self.b.to_digits(k),
            self.c.to_digits(k),
            self.d.to_digits(k),
        ]
    }

    pub fn parse(entries: &[String], k: &Field) -> Result<Mat2> {
        if entries.len() != 4 {
            return Err(Error::Parse("a matrix needs four entries".into()));
        }
        let p = |s: &String| Poly::parse(s, k);
        Ok(Mat2::new(p(&entries[0])?, p(&entries[1])?, p(&entries[2])?, p(&entries[3])?))
    }
}

/// `SL_2(A/f)` or the image of `GL_2(A)` in `GL_2(A/f)` (determinant in `k*`),
/// with elements encoded as `a + N b + N^2 c + N^3 d`, `N = |A/f|`.
#[derive(Clone, PartialEq, Eq)]
pub struct MatGroup {
    ring: ResidueRing,
    mode: Mode,
}

impl std::fmt::Debug for MatGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}2({:?})", self.mode, self.ring)
    }
}

impl MatGroup {
    pub fn new(ring: ResidueRing, mode: Mode) -> Result<Self> {
        let n = ring.size() as u64;
        if n.checked_pow(4).is_none() || n.pow(4) > 1 << 60 {
            return Err(Error::cap("matrix code space", 1 << 60));
        }
        Ok(MatGroup { ring, mode })
    }

    pub fn of(k: &Field, modulus: &Poly, mode: Mode) -> Result<Self> {
        Self::new(ResidueRing::new(k, modulus)?, mode)
    }

    pub fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn field(&self) -> &Field {
        self.ring.field()
    }

    /// Exclusive bound on element codes.
    pub fn code_bound(&self) -> u64 {
        (self.ring.size() as u64).pow(4)
    }

    pub fn encode(&self, m: [u32; 4]) -> u64 {
        let n = self.ring.size() as u64;
        m[0] as u64 + n * (m[1] as u64 + n * (m[2] as u64 + n * m[3] as u64))
    }

    pub fn decode(&self, mut x: u64) -> [u32; 4] {
        let n = self.ring.size() as u64;
        let mut out = [0u32; 4];
        for e in out.iter_mut() {
            *e = (x % n) as u32;
            x /= n;
        }
        out
    }

    pub fn reduce(&self, m: &Mat2) -> u64 {
        self.encode(m.reduce(&self.ring))
    }

    pub fn lift(&self, x: u64) -> Mat2 {
        let m = self.decode(x);
        Mat2::new(
            self.ring.lift(m[0]),
            self.ring.lift(m[1]),
            self.ring.lift(m[2]),
            self.ring.lift(m[3]),
        )
    }

    pub fn identity(&self) -> u64 {
        let one = self.ring.one();
        self.encode([one, 0, 0, one])
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        let r = &self.ring;
        let [a, b, c, d] = self.decode(x);
        let [e, f, g, h] = self.decode(y);
        self.encode([
            r.add(r.mul(a, e), r.mul(b, g)),
            r.add(r.mul(a, f), r.mul(b, h)),
            r.add(r.mul(c, e), r.mul(d, g)),
            r.add(r.mul(c, f), r.mul(d, h)),
        ])
    }

    pub fn det(&self, x: u64) -> u32 {
        let r = &self.ring;
        let [a, b, c, d] = self.decode(x);
        r.sub(r.mul(a, d), r.mul(b, c))
    }

    /// Inverse of a member; panics on non-members.
    pub fn inv(&self, x: u64) -> u64 {
        let r = &self.ring;
        let [a, b, c, d] = self.decode(x);
        let di = r.inv(self.det(x)).expect("group elements are invertible");
        self.encode([r.mul(di, d), r.mul(di, r.neg(b)), r.mul(di, r.neg(c)), r.mul(di, a)])
    }

    pub fn contains(&self, x: u64) -> bool {
        if x >= self.code_bound() {
            return false;
        }
        let det = self.det(x);
        if self.ring.size() == 1 {
            return true;
        }
        match self.mode {
            Mode::SL => det == 1,
            Mode::GL => det != 0 && det < self.field().q(),
        }
    }

    /// The exact order from the local formula
    /// `prod |R_i|^3 (1 - |k_i|^-2)`, times `q - 1` in GL mode.
    pub fn order(&self) -> u64 {
        if self.ring.degree() == 0 {
            return 1;
        }
        let q = self.field().q() as u64;
        let r = self.ring.poly_ring();
        let mut order = 1u64;
        for (g, e) in r.factorize(self.ring.modulus()).expect("monic non-constant") {
            let res = q.pow(g.degree_or_zero() as u32);
            let size = res.pow(e);
            order *= size.pow(3) / (res * res) * (res * res - 1);
        }
        match self.mode {
            Mode::SL => order,
            Mode::GL => order * (q - 1),
        }
    }

    /// Images of `T(b_j t^i)` (`b_j` an `F_p`-basis of `k`, `i < deg f`), `w`,
    /// and in GL mode `diag(zeta, 1)` for a primitive `zeta`.
    pub fn generators(&self) -> Vec<u64> {
        let k = self.field();
        let mut out = Vec::new();
        for i in 0..self.ring.degree() {
            for j in 0..k.n() {
                out.push(self.reduce(&Mat2::t(Poly::monomial(k.basis(j), i))));
            }
        }
        out.push(self.reduce(&Mat2::weyl(k)));
        if self.mode == Mode::GL && k.q() > 2 {
            out.push(self.reduce(&Mat2::diag(k.primitive(), 1).unwrap()));
        }
        out.retain(|&g| g != self.identity());
        out.sort_unstable();
        out.dedup();
        out
    }

    /// All elements by exhaustive scan of the code space; only for small rings.
    pub fn enumerate_brute(&self, cap: u64) -> Result<Vec<u64>> {
        if self.code_bound() > cap {
            return Err(Error::cap("matrix quadruple enumeration", cap));
        }
        Ok((0..self.code_bound()).filter(|&x| self.contains(x)).collect())
    }

    pub fn format(&self, x: u64) -> [String; 4] {
        self.lift(x).to_strings(self.field())
    }
}

/// `SL_2(F_q)` or `GL_2(F_q)` listed in code order, the canonical enumeration
/// used by constant-group tables.
pub fn constant_group_elements(k: &Field, mode: Mode) -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    for d in k.elements() {
        for c in k.elements() {
            for b in k.elements() {
                for a in k.elements() {
                    let det = k.sub(k.mul(a, d), k.mul(b, c));
                    let ok = match mode {
                        Mode::SL => det == 1,
                        Mode::GL => det != 0,
                    };
                    if ok {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(q: u32) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn basic_identities() {
        let k = field(3);
        let r = PolyRing::new(k.clone());
        let a = Poly::parse("121", &k).unwrap();
        assert_eq!(Mat2::t(a.clone()).det(&r), Poly::one());
        let w = Mat2::weyl(&k);
        let w2 = w.mul(&w, &r);
        assert_eq!(w2, Mat2::diag(2, 2).unwrap());
        let ti = Mat2::t(a.clone()).transpose_inverse(&r).unwrap();
        assert_eq!(ti, Mat2::new(Poly::one(), Poly::zero(), r.neg(&a), Poly::one()));
        assert_eq!(
            ti.transpose_inverse(&r).unwrap(),
            Mat2::t(a.clone())
        );
        assert_eq!(Mat2::t(Poly::zero()), Mat2::identity());
        // L(2,1,t) T(1) = L(2,1,t+2)
        let l = Mat2::l(2, 1, Poly::t()).unwrap();
        assert_eq!(
            l.mul(&Mat2::t(Poly::one()), &r),
            Mat2::l(2, 1, Poly::parse("21", &k).unwrap()).unwrap()
        );
        assert_eq!(Mat2::l(0, 1, Poly::zero()), Err(Error::NonUnit));
    }

    #[test]
    fn torus_conjugation() {
        let k = field(5);
        let r = PolyRing::new(k.clone());
        let a = Poly::parse("3102", &k).unwrap();
        for al in k.units() {
            for be in k.units() {
                let dg = Mat2::diag(al, be).unwrap();
                let lhs = dg.mul(&Mat2::t(a.clone()), &r).mul(&dg.inv(&r).unwrap(), &r);
                let s = k.mul(al, k.inv(be).unwrap());
                assert_eq!(lhs, Mat2::t(r.scale(s, &a)));
            }
        }
    }

    #[test]
    fn orders_by_formula_and_brute_force() {
        for (q, f, expect) in [(2, "01", 6), (3, "01", 24), (2, "001", 48), (2, "011", 36)] {
            let k = field(q);
            let g = MatGroup::of(&k, &Poly::parse(f, &k).unwrap(), Mode::SL).unwrap();
            assert_eq!(g.order(), expect);
            assert_eq!(g.enumerate_brute(1 << 20).unwrap().len() as u64, expect);
        }
        let k = field(3);
        let g = MatGroup::of(&k, &Poly::t(), Mode::GL).unwrap();
        assert_eq!(g.order(), 48);
        assert_eq!(g.enumerate_brute(1 << 20).unwrap().len(), 48);
        assert_eq!(constant_group_elements(&k, Mode::GL).len(), 48);
    }
}
