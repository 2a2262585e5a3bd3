//! Automorphisms of `SL_2(F_q[t])` and `GL_2(F_q[t])`: the standard ones
//! and the non-standard maps `L(alpha, beta, a) -> L(alpha, beta, phi(a))`,
//! their action on subgroup handles and a search for automorphisms turning
//! a non-congruence subgroup into a congruence one.

mod phi;
mod search;

use std::cell::RefCell;

pub use phi::Phi;
pub use search::{refute_genuineness, targeted_candidates};

use crate::algebra::{Field, Poly, PolyRing};
use crate::amalgam::{matrix_to_word, HomSpec, Letter, RawHomSpec};
use crate::error::{Error, Result};
use crate::matrices::{Mat2, Mode};
use crate::subgroups::{QuasiLevel, SubgroupHandle};

/// Largest `D` with a non-standard `phi` moving `t^D`.
pub const MAX_PHI_SUPPORT: usize = 8;

/// A determinant character `chi: k* -> k*` for the twist
/// `x -> chi(det x) x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chi {
    /// `values[u - 1] = chi(u)` for unit codes `u`.
    values: Vec<u8>,
}

impl Chi {
    /// Checks multiplicativity and that `chi(a^2) = a^-1` only for `a = 1`.
    pub fn new(k: &Field, values: Vec<u8>) -> Result<Self> {
        let n = k.q() as usize - 1;
        if values.len() != n {
            return Err(Error::Precondition(format!("chi needs {n} values")));
        }
        if values.iter().any(|&v| v == 0 || k.check(v as u32).is_err()) {
            return Err(Error::NonUnit);
        }
        let chi = Chi { values };
        for a in k.units() {
            for b in k.units() {
                if chi.eval(k.mul(a, b)) != k.mul(chi.eval(a), chi.eval(b)) {
                    return Err(Error::Precondition("chi is not multiplicative".into()));
                }
            }
            if a != 1 && chi.eval(k.mul(a, a)) == k.inv(a)? {
                return Err(Error::Precondition(format!(
                    "chi(a^2) = a^-1 at a = {}, so the twist has a kernel",
                    k.digit(a)
                )));
            }
        }
        Ok(chi)
    }

    pub fn trivial(k: &Field) -> Self {
        Chi { values: vec![1; k.q() as usize - 1] }
    }

    pub fn eval(&self, a: u8) -> u8 {
        self.values[a as usize - 1]
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// The character of the inverse twist: `psi(d)` is the unique `l` with
    /// `chi(l^2 d) l = 1`.
    fn inverse(&self, k: &Field) -> Chi {
        let values = k
            .units()
            .map(|d| {
                k.units()
                    .find(|&l| k.mul(self.eval(k.mul(k.mul(l, l), d)), l) == 1)
                    .expect("the twist is bijective")
            })
            .collect();
        Chi { values }
    }
}

/// One generator of the automorphism catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Primitive {
    /// `x -> g x g^-1`.
    Inner(Mat2),
    /// `x -> (x^T)^-1`.
    Contragredient,
    /// `x -> chi(det x) x`, GL mode only.
    DetTwist(Chi),
    /// Entrywise `sigma`: coefficients raised to `p^e`, then `t -> a t + b`.
    RingAuto { a: u8, b: u8, e: u32 },
    /// `L(alpha, beta, c) -> L(alpha, beta, phi(c))`, identity on constants.
    NonStandard(Phi),
}

/// A composition `p_1 o p_2 o ... o p_n`; the last primitive acts first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutoSpec {
    pub field: Field,
    pub prims: Vec<Primitive>,
}

impl AutoSpec {
    pub fn identity(k: &Field) -> Self {
        AutoSpec { field: k.clone(), prims: Vec::new() }
    }

    pub fn single(k: &Field, p: Primitive) -> Self {
        AutoSpec { field: k.clone(), prims: vec![p] }
    }

    /// `self o other`.
    pub fn compose(&self, other: &AutoSpec) -> Result<AutoSpec> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let mut prims = self.prims.clone();
        prims.extend(other.prims.iter().cloned());
        Ok(AutoSpec { field: self.field.clone(), prims })
    }

    pub fn inverse(&self) -> AutoSpec {
        let k = &self.field;
        AutoSpec {
            field: k.clone(),
            prims: self.prims.iter().rev().map(|p| p.inverse(k)).collect(),
        }
    }

    pub fn validate(&self, mode: Mode) -> Result<()> {
        let k = &self.field;
        let r = PolyRing::new(k.clone());
        for p in &self.prims {
            match p {
                Primitive::Inner(g) => {
                    g.unit_det(&r).ok_or(Error::NonInvertible)?;
                }
                Primitive::Contragredient => {}
                Primitive::DetTwist(chi) => {
                    if mode != Mode::GL {
                        return Err(Error::Precondition("determinant twists need GL mode".into()));
                    }
                    Chi::new(k, chi.values.clone())?;
                }
                Primitive::RingAuto { a, b, e } => {
                    if *a == 0 {
                        return Err(Error::NonUnit);
                    }
                    k.check(*a as u32)?;
                    k.check(*b as u32)?;
                    if *e >= k.n() {
                        return Err(Error::Precondition("frobenius exponent must be below n".into()));
                    }
                }
                Primitive::NonStandard(phi) => {
                    if phi.field() != k {
                        return Err(Error::FieldMismatch);
                    }
                    let d = phi.block().degree_or_zero();
                    if d > MAX_PHI_SUPPORT + 1 {
                        return Err(Error::cap("non-standard support", MAX_PHI_SUPPORT as u64));
                    }
                    Phi::new(k, phi.block(), phi.columns().to_vec())?;
                }
            }
        }
        Ok(())
    }

    /// The image of a matrix.
    pub fn apply_matrix(&self, x: &Mat2) -> Result<Mat2> {
        let r = PolyRing::new(self.field.clone());
        self.prims
            .iter()
            .rev()
            .try_fold(x.clone(), |acc, p| p.apply_matrix(&acc, &r))
    }

    /// `a(H)`, as the handle `(h o a^-1)^-1(U)`.
    pub fn apply(&self, handle: &SubgroupHandle) -> Result<SubgroupHandle> {
        if handle.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        self.validate(handle.mode())?;
        let mut h = handle.homspec().clone();
        for p in self.prims.iter().rev() {
            h = transport(p, &h, handle)?;
        }
        SubgroupHandle::with_subgroup(h, handle.target_subgroup().clone(), handle.caps())
    }

    /// What the quasi-level of `a(H)` must be: `phi` and ring automorphisms
    /// move it, the other primitives fix it.
    pub fn predicted_quasi_level(&self, ql: &QuasiLevel) -> Result<QuasiLevel> {
        let k = &self.field;
        let r = PolyRing::new(k.clone());
        let mut cur = ql.clone();
        for p in self.prims.iter().rev() {
            cur = match p {
                Primitive::NonStandard(phi) => phi.image_of(&cur)?,
                Primitive::RingAuto { a, b, e } => {
                    let s = |x: &Poly| sigma(&r, *a, *b, *e, x);
                    let basis: Vec<Poly> = cur.basis().iter().map(s).collect();
                    QuasiLevel::new(k, &s(cur.conductor()), &basis)?
                }
                _ => cur,
            };
        }
        Ok(cur)
    }

    /// Whether `ql(a(H))` equals the predicted transform of `ql(H)`.
    pub fn ql_transform_check(&self, handle: &SubgroupHandle) -> Result<bool> {
        let moved = self.apply(handle)?;
        Ok(moved.quasi_level()? == self.predicted_quasi_level(&handle.quasi_level()?)?)
    }

    pub fn has_nonstandard(&self) -> bool {
        self.prims.iter().any(|p| matches!(p, Primitive::NonStandard(_)))
    }
}

fn sigma(r: &PolyRing, a: u8, b: u8, e: u32, x: &Poly) -> Poly {
    let lin = Poly::from_coeffs(vec![b, a]);
    r.compose(&r.frobenius(x, e), &lin)
}

impl Primitive {
    pub fn inverse(&self, k: &Field) -> Primitive {
        let r = PolyRing::new(k.clone());
        match self {
            Primitive::Inner(g) => Primitive::Inner(g.inv(&r).expect("validated")),
            Primitive::Contragredient => Primitive::Contragredient,
            Primitive::DetTwist(chi) => Primitive::DetTwist(chi.inverse(k)),
            Primitive::RingAuto { a, b, e } => {
                // sigma^-1 = F^{-e} o (t -> a^-1 (t - b))
                let back = (k.n() - e) % k.n();
                let ai = k.inv(*a).expect("validated");
                let bi = k.neg(k.mul(ai, *b));
                Primitive::RingAuto {
                    a: k.frobenius(ai, back),
                    b: k.frobenius(bi, back),
                    e: back,
                }
            }
            Primitive::NonStandard(phi) => Primitive::NonStandard(phi.inverse()),
        }
    }

    pub fn apply_matrix(&self, x: &Mat2, r: &PolyRing) -> Result<Mat2> {
        match self {
            Primitive::Inner(g) => x.conj(&g.inv(r)?, r),
            Primitive::Contragredient => x.transpose_inverse(r),
            Primitive::DetTwist(chi) => {
                let d = x.unit_det(r).ok_or(Error::NonInvertible)?;
                let s = chi.eval(d);
                Ok(x.map(|p| r.scale(s, p)))
            }
            Primitive::RingAuto { a, b, e } => Ok(x.map(|p| sigma(r, *a, *b, *e, p))),
            Primitive::NonStandard(phi) => {
                let mut w = matrix_to_word(x, r)?;
                for l in w.letters.iter_mut() {
                    if let Letter::Upper { a, .. } = l {
                        *a = phi.apply(a);
                    }
                }
                // the image letters need not be in normal form
                Ok(w.letters.iter().fold(Mat2::identity(), |acc, l| acc.mul(&l.matrix(), r)))
            }
        }
    }
}

/// `h o p^-1`.
fn transport(p: &Primitive, h: &HomSpec, handle: &SubgroupHandle) -> Result<HomSpec> {
    let k = h.field().clone();
    let r = PolyRing::new(k.clone());
    let m_new = match p {
        Primitive::NonStandard(phi) => r.lcm(h.modulus(), phi.block())?,
        Primitive::RingAuto { a, b, e } => r.monic(&sigma(&r, *a, *b, *e, h.modulus())),
        _ => h.modulus().clone(),
    };
    let cap = handle.caps().enumeration;
    let len = m_new.degree_or_zero() as u32;
    (k.q() as u64)
        .checked_pow(len)
        .filter(|&n| n <= cap)
        .ok_or_else(|| Error::cap("transformed translation modulus", cap))?;
    let out = match p {
        Primitive::NonStandard(phi) => {
            let inv = phi.inverse();
            let trans = (0..m_new.degree_or_zero())
                .map(|i| {
                    (0..k.n())
                        .map(|j| h.tau(&inv.apply(&Poly::monomial(k.basis(j), i))))
                        .collect()
                })
                .collect();
            HomSpec::validate(RawHomSpec {
                modulus: m_new,
                trans,
                ..h.raw().clone()
            })?
        }
        _ => {
            let inv = p.inverse(&k);
            let failure: RefCell<Option<Error>> = RefCell::new(None);
            let e = h.target().identity();
            let built = HomSpec::from_fn(h.mode(), &k, &m_new, h.target().clone(), |x| {
                match inv.apply_matrix(x, &r).and_then(|y| h.eval(&y)) {
                    Ok(v) => v,
                    Err(err) => {
                        failure.borrow_mut().get_or_insert(err);
                        e
                    }
                }
            });
            if let Some(err) = failure.into_inner() {
                return Err(err);
            }
            built?
        }
    };
    out.minimize_modulus()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::random_element;
    use crate::config::Caps;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn swap_t_t2() -> AutoSpec {
        let k = Field::of_order(2).unwrap();
        let phi = Phi::from_images(&k, &[Poly::one(), Poly::monomial(1, 2), Poly::t()]).unwrap();
        AutoSpec::single(&k, Primitive::NonStandard(phi))
    }

    #[test]
    fn validation_examples() {
        let k2 = Field::of_order(2).unwrap();
        AutoSpec::identity(&k2).validate(Mode::SL).unwrap();
        swap_t_t2().validate(Mode::SL).unwrap();
        let k3 = Field::of_order(3).unwrap();
        let chi = Chi::new(&k3, vec![1, 2]).unwrap();
        let twist = AutoSpec::single(&k3, Primitive::DetTwist(chi.clone()));
        twist.validate(Mode::GL).unwrap();
        assert!(twist.validate(Mode::SL).is_err());
        assert!(Chi::new(&k3, vec![1, 1]).is_ok());
        // chi(a) = a^-1 over F_5: chi(a^2) = a^-2 is a^-1 only at a = 1
        let k5 = Field::of_order(5).unwrap();
        let inv: Vec<u8> = k5.units().map(|a| k5.inv(a).unwrap()).collect();
        assert!(Chi::new(&k5, inv).is_ok());
        assert!(Chi::new(&k5, vec![1, 2, 3, 3]).is_err());
        let ring = AutoSpec::single(&k3, Primitive::RingAuto { a: 0, b: 1, e: 0 });
        assert_eq!(ring.validate(Mode::SL), Err(Error::NonUnit));
    }

    #[test]
    fn twist_kernel_is_detected() {
        // over F_4 chi(a) = a is multiplicative and chi(a^2) = a^2 = a^-1 for
        // every a (a^3 = 1)
        let k = Field::of_order(4).unwrap();
        let ident: Vec<u8> = k.units().collect();
        assert!(Chi::new(&k, ident).is_err());
    }

    #[test]
    fn inverses_undo_primitives() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in [2, 3, 4, 5] {
            let k = Field::of_order(q).unwrap();
            let r = PolyRing::new(k.clone());
            let g = random_element(&r, &mut rng, 3, Mode::GL);
            let n = k.n();
            let prims = vec![
                Primitive::Inner(g),
                Primitive::Contragredient,
                Primitive::RingAuto { a: (q - 1) as u8, b: 1, e: n - 1 },
                Primitive::NonStandard(
                    Phi::from_images(&k, &[Poly::one(), Poly::parse("11", &k).unwrap(), Poly::monomial(1, 2)])
                        .unwrap(),
                ),
            ];
            for p in prims {
                let a = AutoSpec::single(&k, p);
                a.validate(Mode::GL).unwrap();
                let inv = a.inverse();
                for _ in 0..20 {
                    let x = random_element(&r, &mut rng, 4, Mode::GL);
                    let y = a.apply_matrix(&x).unwrap();
                    assert_eq!(inv.apply_matrix(&y).unwrap(), x, "{a:?}");
                    // homomorphism property on a product
                    let z = random_element(&r, &mut rng, 3, Mode::GL);
                    let lhs = a.apply_matrix(&x.mul(&z, &r)).unwrap();
                    let rhs = y.mul(&a.apply_matrix(&z).unwrap(), &r);
                    assert_eq!(lhs, rhs, "{a:?}");
                }
            }
        }
    }

    #[test]
    fn swap_moves_gamma_t2_off_the_congruence_lattice() {
        let k = Field::of_order(2).unwrap();
        let caps = Caps::default();
        let h = SubgroupHandle::principal_congruence(&k, &Poly::monomial(1, 2), Mode::SL, caps).unwrap();
        let moved = swap_t_t2().apply(&h).unwrap();
        assert_eq!(moved.index(), h.index());
        let ql = moved.quasi_level().unwrap();
        assert_eq!(ql.level(), Poly::monomial(1, 3));
        assert!(ql.contains(&Poly::t()));
        assert!(ql.contains(&Poly::monomial(1, 4)));
        assert!(!ql.contains(&Poly::monomial(1, 2)));
        assert!(!moved.is_congruence().unwrap());
        assert!(swap_t_t2().ql_transform_check(&h).unwrap());
        // membership agrees with the matrix action
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = PolyRing::new(k.clone());
        let a = swap_t_t2();
        for _ in 0..40 {
            let x = random_element(&r, &mut rng, 4, Mode::SL);
            assert_eq!(h.contains(&x).unwrap(), moved.contains(&a.apply_matrix(&x).unwrap()).unwrap());
        }
    }

    #[test]
    fn standard_autos_keep_quasi_level_and_congruence() {
        let k = Field::of_order(3).unwrap();
        let r = PolyRing::new(k.clone());
        let caps = Caps::default();
        let f = Poly::parse("021", &k).unwrap();
        let h = SubgroupHandle::principal_congruence(&k, &f, Mode::GL, caps).unwrap();
        let ql = h.quasi_level().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let g = random_element(&r, &mut rng, 3, Mode::GL);
            let a = AutoSpec::single(&k, Primitive::Inner(g));
            let moved = a.apply(&h).unwrap();
            assert_eq!(moved.quasi_level().unwrap(), ql);
            assert!(moved.is_congruence().unwrap());
        }
        let chi = Chi::new(&k, vec![1, 2]).unwrap();
        for p in [Primitive::Contragredient, Primitive::DetTwist(chi)] {
            let moved = AutoSpec::single(&k, p).apply(&h).unwrap();
            assert!(moved.same_subgroup(&h).unwrap());
        }
        let shift = AutoSpec::single(&k, Primitive::RingAuto { a: 1, b: 1, e: 0 });
        let moved = shift.apply(&h).unwrap();
        assert!(moved.is_congruence().unwrap());
        assert!(shift.ql_transform_check(&h).unwrap());
    }
}
