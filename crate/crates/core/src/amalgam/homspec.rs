use std::sync::Arc;

use super::word::{matrix_to_word, Letter};
use crate::algebra::{Field, Poly, PolyRing, ResidueRing};
use crate::error::{Error, Result};
use crate::fingroup::FinGroup;
use crate::matrices::{constant_group_elements, Mat2, MatGroup, Mode};

/// Unvalidated homomorphism data; see [`HomSpec::validate`].
///
/// * `const_table[i]` is the image of the `i`-th element of
///   [`constant_group_elements`].
/// * `torus_table` lists images of `diag(alpha, beta)` for units in field
///   order: `beta` runs fastest in GL mode, and `beta = alpha^-1` in SL mode.
/// * `trans[i][j]` is the image of `T(b_j t^i)` for `b_j` the `j`-th `F_p`
///   basis element of `k` and `i < deg modulus`; translations by multiples of
///   `modulus` map to the identity.
#[derive(Clone, Debug)]
pub struct RawHomSpec {
    pub mode: Mode,
    pub field: Field,
    pub modulus: Poly,
    pub target: FinGroup,
    pub const_table: Vec<u64>,
    pub torus_table: Vec<u64>,
    pub trans: Vec<Vec<u64>>,
}

/// A homomorphism from `SL_2(A)` or `GL_2(A)` to a finite group, defined
/// through the amalgam structure and checked against its relations.
#[derive(Clone)]
pub struct HomSpec {
    inner: Arc<Inner>,
}

struct Inner {
    raw: RawHomSpec,
    ring: PolyRing,
    /// Constant matrix code (base q) to table index.
    const_index: Vec<u32>,
    /// `tau(c t^i)` for every `c` in `k`.
    tau_full: Vec<Vec<u64>>,
}

impl std::fmt::Debug for HomSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "HomSpec({} over {:?}, modulus {}, target {:?})",
            self.mode(),
            self.field(),
            self.modulus().to_digits(self.field()),
            self.target()
        )
    }
}

pub const RULE_SHAPE: &str = "table-shape";
pub const RULE_CONST_HOM: &str = "const-hom";
pub const RULE_TRANSLATION: &str = "translation-abelian";
pub const RULE_TORUS: &str = "torus-relation";
pub const RULE_OVERLAP: &str = "overlap";

fn const_code(k: &Field, m: [u8; 4]) -> usize {
    let q = k.q() as usize;
    m[0] as usize + q * (m[1] as usize + q * (m[2] as usize + q * m[3] as usize))
}

fn cmul(k: &Field, x: [u8; 4], y: [u8; 4]) -> [u8; 4] {
    let [a, b, c, d] = x;
    let [e, f, g, h] = y;
    [
        k.add(k.mul(a, e), k.mul(b, g)),
        k.add(k.mul(a, f), k.mul(b, h)),
        k.add(k.mul(c, e), k.mul(d, g)),
        k.add(k.mul(c, f), k.mul(d, h)),
    ]
}

/// Generators of the constant group used by the Cayley-graph check.
fn const_generators(k: &Field, mode: Mode) -> Vec<[u8; 4]> {
    let mut out: Vec<[u8; 4]> = (0..k.n()).map(|j| [1, k.basis(j), 0, 1]).collect();
    out.push([0, k.neg(1), 1, 0]);
    if mode == Mode::GL {
        out.push([k.primitive(), 0, 0, 1]);
    }
    if k.q() > 2 {
        let z = k.primitive();
        out.push([z, 0, 0, k.inv(z).unwrap()]);
    }
    out
}

/// The torus elements `(alpha, beta)` in table order.
pub fn torus_elements(k: &Field, mode: Mode) -> Vec<(u8, u8)> {
    match mode {
        Mode::SL => k.units().map(|a| (a, k.inv(a).unwrap())).collect(),
        Mode::GL => k
            .units()
            .flat_map(|a| k.units().map(move |b| (a, b)))
            .collect(),
    }
}

impl HomSpec {
    /// Checks the shape and the relations `const-hom`, `translation-abelian`,
    /// `torus-relation` and `overlap`, naming the first violated rule.
    pub fn validate(raw: RawHomSpec) -> Result<HomSpec> {
        let k = raw.field.clone();
        let ring = PolyRing::new(k.clone());
        if raw.modulus.is_zero() || !raw.modulus.is_monic() {
            return Err(Error::validation(RULE_SHAPE, "modulus must be monic and non-zero"));
        }
        ring.check(&raw.modulus)?;
        let consts = constant_group_elements(&k, raw.mode);
        let torus = torus_elements(&k, raw.mode);
        let deg = raw.modulus.degree_or_zero();
        if raw.const_table.len() != consts.len() {
            return Err(Error::validation(
                RULE_SHAPE,
                format!("const table needs {} entries, got {}", consts.len(), raw.const_table.len()),
            ));
        }
        if raw.torus_table.len() != torus.len() {
            return Err(Error::validation(
                RULE_SHAPE,
                format!("torus table needs {} entries, got {}", torus.len(), raw.torus_table.len()),
            ));
        }
        if raw.trans.len() != deg || raw.trans.iter().any(|row| row.len() != k.n() as usize) {
            return Err(Error::validation(
                RULE_SHAPE,
                format!("translation table must be {deg} rows of {} images", k.n()),
            ));
        }
        let tgt = &raw.target;
        let all_imgs = raw
            .const_table
            .iter()
            .chain(&raw.torus_table)
            .chain(raw.trans.iter().flatten());
        if let Some(x) = all_imgs.into_iter().find(|&&x| !tgt.contains(x)) {
            return Err(Error::validation(RULE_SHAPE, format!("image code {x} is not in the target")));
        }

        let mut const_index = vec![u32::MAX; (k.q() as usize).pow(4)];
        for (i, &m) in consts.iter().enumerate() {
            const_index[const_code(&k, m)] = i as u32;
        }
        let idx = |m: [u8; 4]| const_index[const_code(&k, m)] as usize;

        for (i, &g) in consts.iter().enumerate() {
            for s in const_generators(&k, raw.mode) {
                let lhs = raw.const_table[idx(cmul(&k, g, s))];
                let rhs = tgt.mul(raw.const_table[i], raw.const_table[idx(s)]);
                if lhs != rhs {
                    return Err(Error::validation(
                        RULE_CONST_HOM,
                        format!("image of {g:?}*{s:?} differs from the product of images"),
                    ));
                }
            }
        }

        let p = k.p() as u64;
        let flat: Vec<u64> = raw.trans.iter().flatten().copied().collect();
        for (a, &x) in flat.iter().enumerate() {
            if tgt.pow(x, p) != tgt.identity() {
                return Err(Error::validation(
                    RULE_TRANSLATION,
                    format!("translation image #{a} has order not dividing {p}"),
                ));
            }
            for &y in &flat[a + 1..] {
                if tgt.mul(x, y) != tgt.mul(y, x) {
                    return Err(Error::validation(
                        RULE_TRANSLATION,
                        "translation images do not commute",
                    ));
                }
            }
        }

        let tau_full = build_tau_full(&k, tgt, &raw.trans);
        let tau_of = |a: &Poly| tau_eval(&k, tgt, &tau_full, a);
        for (ti, &(al, be)) in torus.iter().enumerate() {
            let rho = raw.torus_table[ti];
            let rho_inv = tgt.inv(rho);
            let s = k.mul(al, k.inv(be)?);
            for i in 0..deg {
                for j in 0..k.n() {
                    let lhs = tgt.mul(tgt.mul(rho, raw.trans[i][j as usize]), rho_inv);
                    let rhs = tau_of(&Poly::monomial(k.mul(s, k.basis(j)), i));
                    if lhs != rhs {
                        return Err(Error::validation(
                            RULE_TORUS,
                            format!("diag({al},{be}) conjugates T({}t^{i}) wrongly", k.basis(j)),
                        ));
                    }
                }
            }
        }

        let reduce = |c: u8| {
            ring.rem(&Poly::constant(c), &raw.modulus).expect("non-zero modulus")
        };
        for (ti, &(al, be)) in torus.iter().enumerate() {
            for c in k.elements() {
                let lhs = raw.const_table[idx([al, c, 0, be])];
                let shift = k.mul(k.inv(al)?, c);
                let rhs = tgt.mul(raw.torus_table[ti], tau_of(&reduce(shift)));
                if lhs != rhs {
                    return Err(Error::validation(
                        RULE_OVERLAP,
                        format!("L({al},{be},{c}) has inconsistent images"),
                    ));
                }
            }
        }

        Ok(HomSpec {
            inner: Arc::new(Inner {
                raw,
                ring,
                const_index,
                tau_full,
            }),
        })
    }

    /// Builds the tables from a map defined on matrices.
    pub fn from_fn(
        mode: Mode,
        field: &Field,
        modulus: &Poly,
        target: FinGroup,
        f: impl Fn(&Mat2) -> u64,
    ) -> Result<HomSpec> {
        let k = field;
        let ring = PolyRing::new(k.clone());
        let modulus = ring.monic(modulus);
        let lift = |m: [u8; 4]| {
            Mat2::new(
                Poly::constant(m[0]),
                Poly::constant(m[1]),
                Poly::constant(m[2]),
                Poly::constant(m[3]),
            )
        };
        let const_table = constant_group_elements(k, mode)
            .into_iter()
            .map(|m| f(&lift(m)))
            .collect();
        let torus_table = torus_elements(k, mode)
            .into_iter()
            .map(|(a, b)| f(&Mat2::diag(a, b).unwrap()))
            .collect();
        let trans = (0..modulus.degree_or_zero())
            .map(|i| {
                (0..k.n())
                    .map(|j| f(&Mat2::t(Poly::monomial(k.basis(j), i))))
                    .collect()
            })
            .collect();
        HomSpec::validate(RawHomSpec {
            mode,
            field: k.clone(),
            modulus,
            target,
            const_table,
            torus_table,
            trans,
        })
    }

    /// Reduction `X -> SL_2(A/f)` (or the GL image).
    pub fn reduction(mode: Mode, field: &Field, f: &Poly) -> Result<HomSpec> {
        let g = MatGroup::new(ResidueRing::new(field, f)?, mode)?;
        let f = g.ring().modulus().clone();
        HomSpec::from_fn(mode, field, &f, FinGroup::Matrix(g.clone()), |m| g.reduce(m))
    }

    /// `x -> (h1(x), h2(x))`.
    pub fn product(h1: &HomSpec, h2: &HomSpec) -> Result<HomSpec> {
        if h1.mode() != h2.mode() || h1.field() != h2.field() {
            return Err(Error::Mismatch("product of homomorphisms on different groups".into()));
        }
        let k = h1.field().clone();
        let ring = PolyRing::new(k.clone());
        let m = ring.lcm(h1.modulus(), h2.modulus())?;
        let target = FinGroup::product(vec![h1.target().clone(), h2.target().clone()])?;
        let FinGroup::Product(pg) = &target else { unreachable!() };
        let join = |a: u64, b: u64| pg.join(&[a, b]);
        let const_table = h1
            .raw()
            .const_table
            .iter()
            .zip(&h2.raw().const_table)
            .map(|(&a, &b)| join(a, b))
            .collect();
        let torus_table = h1
            .raw()
            .torus_table
            .iter()
            .zip(&h2.raw().torus_table)
            .map(|(&a, &b)| join(a, b))
            .collect();
        let trans = (0..m.degree_or_zero())
            .map(|i| {
                (0..k.n())
                    .map(|j| {
                        let a = Poly::monomial(k.basis(j), i);
                        join(h1.tau(&a), h2.tau(&a))
                    })
                    .collect()
            })
            .collect();
        HomSpec::validate(RawHomSpec {
            mode: h1.mode(),
            field: k,
            modulus: m,
            target,
            const_table,
            torus_table,
            trans,
        })
    }

    /// The same homomorphism with the smallest translation modulus, i.e. the
    /// generator of the ideal `{x : tau(x A) = 1}`.
    pub fn minimize_modulus(&self) -> Result<HomSpec> {
        let r = &self.inner.ring;
        let m = self.modulus();
        let deg = m.degree_or_zero();
        let k = self.field();
        let mut best = m.clone();
        for d in r.monic_divisors(m)? {
            let span = deg - d.degree_or_zero();
            let kills = (0..span).all(|i| {
                k.units().all(|c| self.tau(&r.scale(c, &r.shift(&d, i))) == self.target().identity())
            });
            if kills {
                best = r.gcd(&best, &d)?;
            }
        }
        if &best == m {
            return Ok(self.clone());
        }
        let raw = self.raw();
        let trans = (0..best.degree_or_zero())
            .map(|i| raw.trans[i].clone())
            .collect();
        HomSpec::validate(RawHomSpec {
            modulus: best,
            trans,
            ..raw.clone()
        })
    }

    pub fn raw(&self) -> &RawHomSpec {
        &self.inner.raw
    }

    pub fn mode(&self) -> Mode {
        self.inner.raw.mode
    }

    pub fn field(&self) -> &Field {
        &self.inner.raw.field
    }

    pub fn poly_ring(&self) -> &PolyRing {
        &self.inner.ring
    }

    pub fn modulus(&self) -> &Poly {
        &self.inner.raw.modulus
    }

    pub fn target(&self) -> &FinGroup {
        &self.inner.raw.target
    }

    /// Image of a constant matrix.
    pub fn const_image(&self, m: [u8; 4]) -> Result<u64> {
        let i = self.inner.const_index[const_code(self.field(), m)];
        if i == u32::MAX {
            return Err(Error::Mismatch(format!("{m:?} is not in the constant group")));
        }
        Ok(self.inner.raw.const_table[i as usize])
    }

    /// Image of `diag(alpha, beta)`.
    pub fn torus_image(&self, alpha: u8, beta: u8) -> Result<u64> {
        self.const_image([alpha, 0, 0, beta])
    }

    /// Image of `T(a)`.
    pub fn tau(&self, a: &Poly) -> u64 {
        let r = self.inner.ring.rem(a, self.modulus()).expect("non-zero modulus");
        tau_eval(self.field(), self.target(), &self.inner.tau_full, &r)
    }

    pub fn letter_image(&self, l: &Letter) -> Result<u64> {
        match l {
            Letter::Const(g) => self.const_image(*g),
            Letter::Upper { alpha, beta, a } => {
                let k = self.field();
                let shift = self.inner.ring.scale(k.inv(*alpha)?, a);
                Ok(self.target().mul(self.torus_image(*alpha, *beta)?, self.tau(&shift)))
            }
        }
    }

    /// Evaluates the homomorphism on a matrix of the domain group.
    pub fn eval(&self, m: &Mat2) -> Result<u64> {
        if !m.in_mode(self.mode(), &self.inner.ring) {
            return Err(Error::Mismatch(format!("matrix is not in {}2(A)", self.mode())));
        }
        let w = matrix_to_word(m, &self.inner.ring)?;
        let tgt = self.target();
        let mut acc = tgt.identity();
        for l in &w.letters {
            acc = tgt.mul(acc, self.letter_image(l)?);
        }
        Ok(acc)
    }

    /// Images of a generating set of the domain group: the constant-group
    /// generators, the torus, and `T(b_j t^i)` for `i < deg modulus`.
    pub fn generator_images(&self) -> Vec<u64> {
        let k = self.field();
        let mut out: Vec<u64> = const_generators(k, self.mode())
            .into_iter()
            .map(|g| self.const_image(g).expect("generator is a constant matrix"))
            .collect();
        out.extend(self.inner.raw.torus_table.iter().copied());
        out.extend(self.inner.raw.trans.iter().flatten().copied());
        let e = self.target().identity();
        out.retain(|&x| x != e);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Generators of the domain group as matrices, matching
    /// [`generator_images`](Self::generator_images) before deduplication.
    pub fn domain_generators(&self) -> Vec<Mat2> {
        domain_generators(self.field(), self.mode(), self.modulus().degree_or_zero())
    }
}

/// Matrices generating the domain group together with `T(t^i A)` for
/// `i >= deg`: constant generators, torus elements and `T(b_j t^i)`, `i < deg`.
pub fn domain_generators(k: &Field, mode: Mode, deg: usize) -> Vec<Mat2> {
    let mut out: Vec<Mat2> = const_generators(k, mode)
        .into_iter()
        .map(|m| {
            Mat2::new(
                Poly::constant(m[0]),
                Poly::constant(m[1]),
                Poly::constant(m[2]),
                Poly::constant(m[3]),
            )
        })
        .collect();
    for (a, b) in torus_elements(k, mode) {
        out.push(Mat2::diag(a, b).unwrap());
    }
    for i in 0..deg {
        for j in 0..k.n() {
            out.push(Mat2::t(Poly::monomial(k.basis(j), i)));
        }
    }
    out
}

fn build_tau_full(k: &Field, tgt: &FinGroup, trans: &[Vec<u64>]) -> Vec<Vec<u64>> {
    trans
        .iter()
        .map(|row| {
            k.elements()
                .map(|c| {
                    k.coords(c)
                        .iter()
                        .zip(row)
                        .fold(tgt.identity(), |acc, (&d, &img)| tgt.mul(acc, tgt.pow(img, d as u64)))
                })
                .collect()
        })
        .collect()
}

/// `tau(a)` for `a` already reduced below the modulus degree.
fn tau_eval(k: &Field, tgt: &FinGroup, tau_full: &[Vec<u64>], a: &Poly) -> u64 {
    let _ = k;
    a.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .fold(tgt.identity(), |acc, (i, &c)| tgt.mul(acc, tau_full[i][c as usize]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::random_element;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field(q: u32) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn reduction_mod_t() {
        let k = field(2);
        let h = HomSpec::reduction(Mode::SL, &k, &Poly::t()).unwrap();
        assert_eq!(h.eval(&Mat2::t(Poly::t())).unwrap(), h.target().identity());
        let one_plus_t = Poly::parse("11", &k).unwrap();
        assert_eq!(
            h.eval(&Mat2::t(one_plus_t)).unwrap(),
            h.const_image([1, 1, 0, 1]).unwrap()
        );
    }

    #[test]
    fn reduction_agrees_with_matrix_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (q, f) in [(2, "01"), (2, "001"), (2, "011"), (3, "021"), (4, "001")] {
            let k = field(q);
            let r = PolyRing::new(k.clone());
            let fp = Poly::parse(f, &k).unwrap();
            for mode in [Mode::SL, Mode::GL] {
                let h = HomSpec::reduction(mode, &k, &fp).unwrap();
                let FinGroup::Matrix(g) = h.target() else { panic!() };
                for i in 0..200 {
                    let m = random_element(&r, &mut rng, 1 + i % 6, mode);
                    assert_eq!(h.eval(&m).unwrap(), g.reduce(&m));
                }
            }
        }
    }

    #[test]
    fn multiplicativity_and_inverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = field(2);
        let r = PolyRing::new(k.clone());
        let h = HomSpec::reduction(Mode::SL, &k, &Poly::parse("0111", &k).unwrap()).unwrap();
        let t = h.target();
        for i in 0..500 {
            let a = random_element(&r, &mut rng, 1 + i % 5, Mode::SL);
            let b = random_element(&r, &mut rng, 1 + i % 4, Mode::SL);
            let (ha, hb) = (h.eval(&a).unwrap(), h.eval(&b).unwrap());
            assert_eq!(h.eval(&a.mul(&b, &r)).unwrap(), t.mul(ha, hb));
            assert_eq!(h.eval(&a.inv(&r).unwrap()).unwrap(), t.inv(ha));
        }
    }

    #[test]
    fn validation_names_the_rule() {
        let k = field(3);
        let h = HomSpec::reduction(Mode::SL, &k, &Poly::t()).unwrap();
        let mut raw = h.raw().clone();
        raw.const_table.swap(0, 5);
        match HomSpec::validate(raw).unwrap_err() {
            Error::Validation { rule, .. } => assert_eq!(rule, RULE_CONST_HOM),
            e => panic!("{e}"),
        }
        // an element of order 4 cannot be a translation image in characteristic 3
        let mut raw = h.raw().clone();
        raw.trans[0][0] = h.const_image([0, 2, 1, 0]).unwrap();
        assert!(matches!(HomSpec::validate(raw), Err(Error::Validation { rule: RULE_TRANSLATION, .. })));
        // over F_4, T(x) -> image of T(1) is additive but not compatible with the torus
        let k4 = field(4);
        let h4 = HomSpec::reduction(Mode::SL, &k4, &Poly::t()).unwrap();
        let mut raw = h4.raw().clone();
        raw.trans[0][1] = raw.trans[0][0];
        assert!(matches!(HomSpec::validate(raw), Err(Error::Validation { rule: RULE_TORUS, .. })));
        // changing the image of T(1) alone breaks the overlap with the constant group
        let mut raw = h4.raw().clone();
        raw.trans[0][0] = raw.trans[0][1];
        assert!(HomSpec::validate(raw).is_err());
        let mut raw = h.raw().clone();
        raw.const_table.pop();
        assert!(matches!(HomSpec::validate(raw), Err(Error::Validation { rule: RULE_SHAPE, .. })));
    }

    #[test]
    fn product_and_minimized_modulus() {
        let k = field(2);
        let h1 = HomSpec::reduction(Mode::SL, &k, &Poly::t()).unwrap();
        let h2 = HomSpec::reduction(Mode::SL, &k, &Poly::parse("11", &k).unwrap()).unwrap();
        let p = HomSpec::product(&h1, &h2).unwrap();
        assert_eq!(p.modulus(), &Poly::parse("011", &k).unwrap());
        // a reduction mod t presented with modulus t^3 shrinks back to t
        let g = MatGroup::of(&k, &Poly::t(), Mode::SL).unwrap();
        let wide = HomSpec::from_fn(
            Mode::SL,
            &k,
            &Poly::monomial(1, 3),
            FinGroup::Matrix(g.clone()),
            |m| g.reduce(m),
        )
        .unwrap();
        assert_eq!(wide.minimize_modulus().unwrap().modulus(), &Poly::t());
    }
}
