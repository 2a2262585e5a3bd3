use crate::algebra::{Field, Poly, PolyRing, Subspace};
use crate::error::{Error, Result};

/// A `k`-subspace of `A` of the form `W + cA`, `W` given by representatives
/// of degree below `deg c`.
///
/// Always stored canonically: the conductor is the level (the largest ideal
/// inside the set), so equal sets have equal descriptors.
#[derive(Clone, PartialEq, Eq)]
pub struct QuasiLevel {
    conductor: Poly,
    w: Subspace,
}

impl std::fmt::Debug for QuasiLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "QL({:?} + ({}))",
            self.w,
            self.conductor.to_digits(self.w.field())
        )
    }
}

impl QuasiLevel {
    /// `W + cA`; `basis` polynomials are reduced modulo `c` first.
    pub fn new(k: &Field, conductor: &Poly, basis: &[Poly]) -> Result<Self> {
        let r = PolyRing::new(k.clone());
        if conductor.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let c = r.monic(conductor);
        let len = c.degree_or_zero();
        let reduced = basis
            .iter()
            .map(|b| r.rem(b, &c))
            .collect::<Result<Vec<_>>>()?;
        let w = Subspace::span_polys(k, len, reduced.iter());
        Ok(Self::from_subspace(c, w))
    }

    /// Canonicalizes `w + cA`, `w` a subspace of `F_q^{deg c}`.
    pub fn from_subspace(c: Poly, w: Subspace) -> Self {
        let r = PolyRing::new(w.field().clone());
        let lvl = level_in(&r, &c, &w);
        if lvl == c {
            return QuasiLevel { conductor: c, w };
        }
        let len = lvl.degree_or_zero();
        let reduced: Vec<Poly> = w
            .basis_polys()
            .iter()
            .map(|b| r.rem(b, &lvl).expect("non-zero level"))
            .collect();
        QuasiLevel {
            w: Subspace::span_polys(w.field(), len, reduced.iter()),
            conductor: lvl,
        }
    }

    /// The whole ring `A`.
    pub fn full(k: &Field) -> Self {
        QuasiLevel {
            conductor: Poly::one(),
            w: Subspace::zero(k, 0),
        }
    }

    /// The ideal `(f)`.
    pub fn ideal(k: &Field, f: &Poly) -> Result<Self> {
        Self::new(k, f, &[])
    }

    pub fn field(&self) -> &Field {
        self.w.field()
    }

    /// The conductor, equal to the level in canonical form.
    pub fn conductor(&self) -> &Poly {
        &self.conductor
    }

    pub fn subspace(&self) -> &Subspace {
        &self.w
    }

    pub fn basis(&self) -> Vec<Poly> {
        self.w.basis_polys()
    }

    pub fn contains(&self, a: &Poly) -> bool {
        let r = PolyRing::new(self.field().clone());
        let red = r.rem(a, &self.conductor).expect("non-zero conductor");
        self.w.contains(&red.to_vec(self.w.len()))
    }

    pub fn is_full(&self) -> bool {
        self.w.is_full()
    }

    /// `dim_k A / ql`.
    pub fn codim(&self) -> usize {
        self.w.codim()
    }

    /// `[A : ql] = q^codim`.
    pub fn index(&self) -> u64 {
        (self.field().q() as u64).pow(self.codim() as u32)
    }

    /// The level: the largest ideal of `A` inside this set.
    pub fn level(&self) -> Poly {
        self.conductor.clone()
    }

    /// The same set described with a larger conductor `m`, a multiple of the
    /// conductor: the subspace of `F_q^{deg m}` of residues mod `m`.
    pub fn expand_to(&self, m: &Poly) -> Result<Subspace> {
        let r = PolyRing::new(self.field().clone());
        if !r.divides(&self.conductor, m)? {
            return Err(Error::Precondition("new conductor must be a multiple of the level".into()));
        }
        let len = m.degree_or_zero();
        let mut gens = self.basis();
        let span = len - self.conductor.degree_or_zero();
        for i in 0..span {
            gens.push(r.shift(&self.conductor, i));
        }
        Ok(Subspace::span_polys(self.field(), len, gens.iter()))
    }

    /// String form: `{basis: [...], conductor: ...}` digits.
    pub fn describe(&self) -> (Vec<String>, String) {
        let k = self.field();
        (
            self.basis().iter().map(|b| b.to_digits(k)).collect(),
            self.conductor.to_digits(k),
        )
    }
}

/// The gcd of the monic divisors `f` of `c` with `fA/cA` inside `w`.
pub fn level_in(r: &PolyRing, c: &Poly, w: &Subspace) -> Poly {
    let deg = c.degree_or_zero();
    let mut g = c.clone();
    for f in r.monic_divisors(c).expect("non-zero conductor") {
        let span = deg - f.degree_or_zero();
        let inside = (0..span).all(|i| w.contains(&r.shift(&f, i).to_vec(deg)));
        if inside {
            g = r.gcd(&g, &f).expect("non-zero");
        }
    }
    g
}

/// The level of a quasi-level descriptor.
pub fn level_of(ql: &QuasiLevel) -> Poly {
    ql.level()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, k: &Field) -> Poly {
        Poly::parse(s, k).unwrap()
    }

    #[test]
    fn levels_of_documented_quasi_levels() {
        let k = Field::of_order(2).unwrap();
        assert_eq!(QuasiLevel::ideal(&k, &Poly::t()).unwrap().level(), Poly::t());
        // span{1, t + t^2} + (t^3)
        let w = QuasiLevel::new(&k, &p("0001", &k), &[p("1", &k), p("011", &k)]).unwrap();
        assert_eq!(w.level(), p("0001", &k));
        assert!(w.contains(&p("1111", &k)));
        assert!(!w.contains(&Poly::t()));
        assert_eq!(w.codim(), 1);

        // t(t-1)A + F_3 over F_3
        let k3 = Field::of_order(3).unwrap();
        let c = p("021", &k3);
        let ql = QuasiLevel::new(&k3, &c, &[Poly::one()]).unwrap();
        assert_eq!(ql.level(), c);
        assert_eq!(ql.index(), 3);
    }

    #[test]
    fn canonical_conductor_is_the_level() {
        let k = Field::of_order(2).unwrap();
        // (t) described with conductor t^3
        let a = QuasiLevel::new(&k, &p("0001", &k), &[p("01", &k), p("001", &k)]).unwrap();
        assert_eq!(a, QuasiLevel::ideal(&k, &Poly::t()).unwrap());
        let full = QuasiLevel::new(&k, &p("001", &k), &[p("1", &k), p("01", &k)]).unwrap();
        assert_eq!(full, QuasiLevel::full(&k));
        assert!(full.is_full());
        let expanded = a.expand_to(&p("0001", &k)).unwrap();
        assert_eq!(expanded.dim(), 2);
    }

    #[test]
    fn level_is_maximal_ideal_inside() {
        let k = Field::of_order(3).unwrap();
        let r = PolyRing::new(k.clone());
        let c = p("0001", &k);
        for w in Subspace::enumerate_all(&k, 3, 2) {
            let ql = QuasiLevel::from_subspace(c.clone(), w.clone());
            let lvl = ql.level();
            for f in r.monic_divisors(&c).unwrap() {
                let inside = (0..3 - f.degree_or_zero())
                    .all(|i| w.contains(&r.shift(&f, i).to_vec(3)));
                assert_eq!(inside, r.divides(&lvl, &f).unwrap(), "{w:?} {f:?}");
            }
        }
    }
}
