use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};
use std::sync::{Arc, OnceLock};

use super::quasilevel::QuasiLevel;
use crate::algebra::{Field, Poly, Subspace};
use crate::amalgam::{HomSpec, RawHomSpec};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::fingroup::{self, FinGroup, Subgroup};
use crate::matrices::{constant_group_elements, Mat2, MatGroup, Mode};

/// The finite-index subgroup `h^-1(U)` of `SL_2(A)` or `GL_2(A)`.
#[derive(Clone)]
pub struct SubgroupHandle {
    inner: Arc<Inner>,
}

struct Inner {
    h: HomSpec,
    u: Subgroup,
    image: Subgroup,
    inter: Subgroup,
    core: Subgroup,
    normal: bool,
    caps: Caps,
    quasi_level: OnceLock<QuasiLevel>,
    congruence: OnceLock<bool>,
}

impl std::fmt::Debug for SubgroupHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subgroup(index {} of {:?})", self.index(), self.inner.h)
    }
}

impl SubgroupHandle {
    /// `h^-1(<u_gens>)`.
    pub fn new(h: HomSpec, u_gens: &[u64], caps: Caps) -> Result<Self> {
        let tgt = h.target();
        if let Some(x) = u_gens.iter().find(|&&x| !tgt.contains(x)) {
            return Err(Error::Mismatch(format!("generator {x} is not in the target group")));
        }
        let lim = caps.group_limit();
        let u = fingroup::closure(tgt, u_gens, lim)?;
        Self::with_subgroup(h, u, caps)
    }

    pub fn with_subgroup(h: HomSpec, u: Subgroup, caps: Caps) -> Result<Self> {
        let tgt = h.target();
        let lim = caps.group_limit();
        let image = fingroup::closure(tgt, &h.generator_images(), lim)?;
        let inter = fingroup::intersection(tgt, &u, &image, lim)?;
        let core = fingroup::core(tgt, &image, &inter, lim)?;
        let normal = core.order() == inter.order();
        Ok(SubgroupHandle {
            inner: Arc::new(Inner {
                h,
                u,
                image,
                inter,
                core,
                normal,
                caps,
                quasi_level: OnceLock::new(),
                congruence: OnceLock::new(),
            }),
        })
    }

    /// The whole group, through the given homomorphism.
    pub fn full(h: HomSpec, caps: Caps) -> Result<Self> {
        let gens = h.target().generators();
        Self::new(h, &gens, caps)
    }

    /// `Gamma(f)` (in GL mode the kernel of reduction mod `f`).
    pub fn principal_congruence(k: &Field, f: &Poly, mode: Mode, caps: Caps) -> Result<Self> {
        let h = HomSpec::reduction(mode, k, f)?;
        Self::new(h, &[], caps)
    }

    /// `Z . Gamma(f)` in `GL_2(A)`, `Z` the scalar matrices.
    pub fn scalar_congruence(k: &Field, f: &Poly, caps: Caps) -> Result<Self> {
        let h = HomSpec::reduction(Mode::GL, k, f)?;
        let FinGroup::Matrix(g) = h.target() else { unreachable!() };
        let scalars: Vec<u64> = k
            .units()
            .map(|a| g.reduce(&Mat2::diag(a, a).unwrap()))
            .collect();
        Self::new(h.clone(), &scalars, caps)
    }

    /// The normal subgroup `N` of `SL_2(F_q[t])`, `q <= 3`, containing the
    /// commutator subgroup, with `Gamma / N = A / ql`. Translations map to
    /// their classes in `A / ql`, constants through `SL_2(F_q)^ab = F_q`.
    pub fn from_quasilevel_abelian(ql: &QuasiLevel, caps: Caps) -> Result<Self> {
        let k = ql.field().clone();
        if k.q() > 3 {
            return Err(Error::Precondition(
                "abelian quotients A/ql of SL_2(F_q[t]) need q <= 3".into(),
            ));
        }
        let c = ql.conductor().clone();
        let len = c.degree_or_zero();
        let target = FinGroup::additive(ql.subspace().clone())?;
        let FinGroup::Additive(aq) = &target else { unreachable!() };
        let class = |a: &Poly| -> u64 {
            let r = crate::algebra::PolyRing::new(k.clone());
            let red = r.rem(a, &c).expect("non-zero conductor");
            aq.class_of(&red.to_vec(len))
        };
        let psi = abelianization_coordinate(&k, caps)?;
        let const_table = constant_group_elements(&k, Mode::SL)
            .iter()
            .map(|m| class(&Poly::constant(psi(m))))
            .collect();
        let torus_table = vec![target.identity(); k.q() as usize - 1];
        let trans = (0..len)
            .map(|i| (0..k.n()).map(|j| class(&Poly::monomial(k.basis(j), i))).collect())
            .collect();
        let h = HomSpec::validate(RawHomSpec {
            mode: Mode::SL,
            field: k.clone(),
            modulus: c.clone(),
            target: target.clone(),
            const_table,
            torus_table,
            trans,
        })?;
        Self::new(h, &[], caps)
    }

    pub fn homspec(&self) -> &HomSpec {
        &self.inner.h
    }

    pub fn mode(&self) -> Mode {
        self.inner.h.mode()
    }

    pub fn field(&self) -> &Field {
        self.inner.h.field()
    }

    pub fn caps(&self) -> Caps {
        self.inner.caps
    }

    /// `U`, as given.
    pub fn target_subgroup(&self) -> &Subgroup {
        &self.inner.u
    }

    /// `h(X)`.
    pub fn image(&self) -> &Subgroup {
        &self.inner.image
    }

    /// `U` intersected with the image.
    pub fn image_subgroup(&self) -> &Subgroup {
        &self.inner.inter
    }

    /// The image of the core of `H`, i.e. the core of `U` in `h(X)`.
    pub fn core_image(&self) -> &Subgroup {
        &self.inner.core
    }

    pub fn index(&self) -> u64 {
        self.inner.inter.index_in(&self.inner.image)
    }

    pub fn is_normal(&self) -> bool {
        self.inner.normal
    }

    /// `[X : core(H)]`.
    pub fn core_index(&self) -> u64 {
        self.inner.core.index_in(&self.inner.image)
    }

    pub fn is_proper(&self) -> bool {
        self.index() > 1
    }

    /// The core of `H` as its own handle.
    pub fn core(&self) -> Result<SubgroupHandle> {
        Self::with_subgroup(self.inner.h.clone(), self.inner.core.clone(), self.inner.caps)
    }

    pub fn contains(&self, m: &Mat2) -> Result<bool> {
        Ok(self.inner.u.contains(self.inner.h.eval(m)?))
    }

    /// `{a : T(a) in core(H)}`, by enumerating residues modulo the
    /// translation modulus, in canonical form.
    pub fn quasi_level(&self) -> Result<QuasiLevel> {
        if let Some(ql) = self.inner.quasi_level.get() {
            return Ok(ql.clone());
        }
        let ql = self.compute_quasi_level()?;
        Ok(self.inner.quasi_level.get_or_init(|| ql).clone())
    }

    fn compute_quasi_level(&self) -> Result<QuasiLevel> {
        let h = &self.inner.h;
        let k = h.field();
        let m = h.modulus();
        let len = m.degree_or_zero();
        let q = k.q() as u64;
        q.checked_pow(len as u32)
            .filter(|&t| t <= self.inner.caps.enumeration)
            .ok_or_else(|| Error::cap("translation residue enumeration", self.inner.caps.enumeration))?;
        let tgt = h.target();
        let core = &self.inner.core;
        // depth-first over the F_p coordinates of a mod m
        let basis: Vec<(usize, u8, u64)> = (0..len)
            .flat_map(|i| (0..k.n()).map(move |j| (i, j)))
            .map(|(i, j)| (i, k.basis(j), h.raw().trans[i][j as usize]))
            .collect();
        let mut w = Subspace::zero(k, len);
        let mut stack: Vec<(usize, Vec<u8>, u64)> = vec![(0, vec![0; len], tgt.identity())];
        let p = k.p();
        let mut members = 0u64;
        while let Some((pos, vec, img)) = stack.pop() {
            if pos == basis.len() {
                if core.contains(img) {
                    members += 1;
                    w.insert(vec);
                }
                continue;
            }
            let (i, b, g) = basis[pos];
            let (mut v, mut x) = (vec, img);
            for _ in 0..p {
                stack.push((pos + 1, v.clone(), x));
                v[i] = k.add(v[i], b);
                x = tgt.mul(x, g);
            }
        }
        if members != q.pow(w.dim() as u32) {
            return Err(Error::Inconsistent(format!(
                "translation set of size {members} is not a k-subspace"
            )));
        }
        Ok(QuasiLevel::from_subspace(m.clone(), w))
    }

    /// `h(Gamma(f))` as a subgroup of the target: the slice
    /// `{x : (x, 1) in (h x pi_f)(X)}`; for `f = 1` in GL mode, `h(SL_2(A))`.
    pub fn congruence_image(&self, f: &Poly) -> Result<Subgroup> {
        let h = &self.inner.h;
        let k = h.field();
        let lim = self.inner.caps.group_limit();
        let tgt = h.target();
        if f.is_zero() {
            return Err(Error::ZeroModulus);
        }
        if f.degree() == Some(0) {
            if h.mode() == Mode::SL {
                return Ok(self.inner.image.clone());
            }
            let sl_gens: Vec<u64> = crate::amalgam::domain_generators(k, Mode::SL, h.modulus().degree_or_zero())
                .iter()
                .map(|m| h.eval(m))
                .collect::<Result<_>>()?;
            return fingroup::closure(tgt, &sl_gens, lim);
        }
        // Schreier generators of the kernel of (h, pi_f)(X) -> pi_f(X),
        // over a transversal found by breadth-first search in SL_2(A/f)
        let red = HomSpec::reduction(h.mode(), k, f)?;
        let rt = red.target();
        let deg = h.modulus().degree_or_zero().max(f.degree_or_zero());
        let gens: Vec<(u64, u64)> = crate::amalgam::domain_generators(k, h.mode(), deg)
            .iter()
            .map(|g| Ok((h.eval(g)?, red.eval(g)?)))
            .collect::<Result<_>>()?;
        let cap = self.inner.caps.enumeration.max(HARD_PRODUCT_LIMIT);
        if rt.order() > cap {
            return Err(Error::cap("congruence quotient transversal", cap));
        }
        let mut rep: FxHashMap<u64, u64> = FxHashMap::default();
        rep.insert(rt.identity(), tgt.identity());
        let mut queue = VecDeque::from([rt.identity()]);
        let mut schreier: FxHashSet<u64> = FxHashSet::default();
        while let Some(s) = queue.pop_front() {
            let x = rep[&s];
            for &(gx, gs) in &gens {
                let (y, t) = (tgt.mul(x, gx), rt.mul(s, gs));
                match rep.get(&t) {
                    Some(&z) => {
                        let w = tgt.mul(y, tgt.inv(z));
                        if w != tgt.identity() {
                            schreier.insert(w);
                        }
                    }
                    None => {
                        if rep.len() as u64 >= cap {
                            return Err(Error::cap("congruence quotient transversal", cap));
                        }
                        rep.insert(t, y);
                        queue.push_back(t);
                    }
                }
            }
        }
        let mut sg: Vec<u64> = schreier.into_iter().collect();
        sg.sort_unstable();
        fingroup::closure(tgt, &sg, lim)
    }

    /// Whether `H` contains `Gamma(level)`, i.e. is a congruence subgroup.
    pub fn is_congruence(&self) -> Result<bool> {
        if let Some(&c) = self.inner.congruence.get() {
            return Ok(c);
        }
        let ql = self.quasi_level()?;
        let s = self.congruence_image(&ql.level())?;
        Ok(*self.inner.congruence.get_or_init(|| s.is_subset_of(&self.inner.u)))
    }

    /// Exact equality of the two subgroups of the same ambient group.
    pub fn same_subgroup(&self, other: &SubgroupHandle) -> Result<bool> {
        if self.mode() != other.mode() || self.field() != other.field() {
            return Err(Error::Mismatch("handles live in different groups".into()));
        }
        if self.index() != other.index() {
            return Ok(false);
        }
        let prod = HomSpec::product(&self.inner.h, &other.inner.h)?;
        let FinGroup::Product(pg) = prod.target() else { unreachable!() };
        let lim = self.inner.caps.group_limit();
        let big = fingroup::closure(prod.target(), &prod.generator_images(), HARD_PRODUCT_LIMIT.min(lim * 64))?;
        Ok(big.elements().iter().all(|&x| {
            let parts = pg.split(x);
            self.inner.u.contains(parts[0]) == other.inner.u.contains(parts[1])
        }))
    }
}

/// Products formed for slices may be larger than single targets.
const HARD_PRODUCT_LIMIT: u64 = crate::config::HARD_GROUP_CAP;

/// `g -> e` with `g` in `T(1)^e SL_2(F_q)'`, for `q <= 3`.
fn abelianization_coordinate(k: &Field, caps: Caps) -> Result<impl Fn(&[u8; 4]) -> u8> {
    let g = MatGroup::of(k, &Poly::t(), Mode::SL)?;
    let grp = FinGroup::Matrix(g.clone());
    let lim = caps.group_limit();
    let whole = fingroup::closure(&grp, &grp.generators(), lim)?;
    let derived = fingroup::derived_subgroup(&grp, &whole, lim)?;
    if whole.order() / derived.order() != k.q() as u64 {
        return Err(Error::Inconsistent("SL_2(F_q) abelianization is not F_q".into()));
    }
    let t1 = g.reduce(&Mat2::t(Poly::one()));
    let mut coset_of = std::collections::HashMap::new();
    let mut rep = grp.identity();
    for e in 0..k.q() as u8 {
        for &d in derived.elements() {
            coset_of.insert(grp.mul(rep, d), e);
        }
        rep = grp.mul(rep, t1);
    }
    Ok(move |m: &[u8; 4]| {
        let code = g.encode([m[0] as u32, m[1] as u32, m[2] as u32, m[3] as u32]);
        coset_of[&code]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, k: &Field) -> Poly {
        Poly::parse(s, k).unwrap()
    }

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn principal_congruence_indices_and_membership() {
        let k = Field::of_order(2).unwrap();
        let h = SubgroupHandle::principal_congruence(&k, &Poly::t(), Mode::SL, caps()).unwrap();
        assert_eq!(h.index(), 6);
        assert!(h.contains(&Mat2::identity()).unwrap());
        assert!(h.contains(&Mat2::t(Poly::t())).unwrap());
        assert!(!h.contains(&Mat2::t(Poly::one())).unwrap());
        assert_eq!(h.quasi_level().unwrap(), QuasiLevel::ideal(&k, &Poly::t()).unwrap());
        assert!(h.is_congruence().unwrap());
        assert!(h.is_normal());

        let h = SubgroupHandle::principal_congruence(&k, &p("011", &k), Mode::SL, caps()).unwrap();
        assert_eq!(h.index(), 36);

        let k3 = Field::of_order(3).unwrap();
        let z = SubgroupHandle::scalar_congruence(&k3, &Poly::t(), caps()).unwrap();
        assert_eq!(z.index(), 24);
        assert!(z.is_congruence().unwrap());
    }

    #[test]
    fn abelian_handles() {
        let k = Field::of_order(2).unwrap();
        let w = QuasiLevel::new(&k, &p("0001", &k), &[p("1", &k), p("011", &k)]).unwrap();
        let n = SubgroupHandle::from_quasilevel_abelian(&w, caps()).unwrap();
        assert_eq!(n.index(), 2);
        assert!(n.contains(&Mat2::t(p("011", &k))).unwrap());
        assert!(!n.contains(&Mat2::t(Poly::t())).unwrap());
        assert_eq!(n.quasi_level().unwrap(), w);
        assert!(n.is_normal());

        let k3 = Field::of_order(3).unwrap();
        let c = p("021", &k3);
        let ql = QuasiLevel::new(&k3, &c, &[Poly::one()]).unwrap();
        let n = SubgroupHandle::from_quasilevel_abelian(&ql, caps()).unwrap();
        // codimension one in A, so index q; q^2 is the index of Gamma(t(t-1)).Gamma'
        assert_eq!(n.index(), 3);
        assert_eq!(n.quasi_level().unwrap().level(), c);
        assert!(n.is_congruence().unwrap());

        let full = SubgroupHandle::from_quasilevel_abelian(&QuasiLevel::full(&k), caps()).unwrap();
        assert_eq!(full.index(), 1);
        assert!(full.quasi_level().unwrap().is_full());
    }

    #[test]
    fn congruence_images() {
        let k = Field::of_order(2).unwrap();
        let h = SubgroupHandle::principal_congruence(&k, &Poly::t(), Mode::SL, caps()).unwrap();
        assert!(h.congruence_image(&Poly::t()).unwrap().is_trivial());
        assert_eq!(h.congruence_image(&Poly::one()).unwrap(), *h.image());

        let t3 = p("0001", &k);
        let w = QuasiLevel::new(&k, &t3, &[p("1", &k), p("011", &k)]).unwrap();
        let n = SubgroupHandle::from_quasilevel_abelian(&w, caps()).unwrap();
        let img = n.congruence_image(&t3).unwrap();
        for i in 0..4 {
            let x = n.homspec().eval(&Mat2::t(Poly::monomial(1, 3 + i))).unwrap();
            assert!(img.contains(x));
        }
    }

    #[test]
    fn same_subgroup_detects_equal_presentations() {
        let k = Field::of_order(2).unwrap();
        let a = SubgroupHandle::principal_congruence(&k, &Poly::t(), Mode::SL, caps()).unwrap();
        // Gamma(t) as the preimage of the reduction kernel mod t^2
        let t2 = Poly::monomial(1, 2);
        let h2 = HomSpec::reduction(Mode::SL, &k, &t2).unwrap();
        let FinGroup::Matrix(g) = h2.target() else { panic!() };
        let kern: Vec<u64> = [Mat2::t(Poly::t()), Mat2::t(Poly::t()).transpose()]
            .iter()
            .map(|m| g.reduce(m))
            .collect();
        let b0 = SubgroupHandle::new(h2.clone(), &kern, caps()).unwrap();
        let whole = fingroup::closure(h2.target(), &h2.generator_images(), 1 << 20).unwrap();
        let nc = fingroup::normal_closure(h2.target(), &whole, &kern, 1 << 20).unwrap();
        let b = SubgroupHandle::with_subgroup(h2, nc, caps()).unwrap();
        assert!(a.same_subgroup(&b).unwrap());
        assert_eq!(b.index(), 6);
        let _ = b0;
        let c = SubgroupHandle::principal_congruence(&k, &t2, Mode::SL, caps()).unwrap();
        assert!(!a.same_subgroup(&c).unwrap());
    }
}
