//! Search for an automorphism carrying a non-congruence subgroup onto a
//! congruence subgroup.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AutoSpec, Phi, Primitive, MAX_PHI_SUPPORT};
use crate::algebra::{Field, Poly, PolyRing, Subspace};
use crate::error::{Error, Result};
use crate::subgroups::{QuasiLevel, SubgroupHandle};

const SEARCH_SEED: u64 = 0x5eed_0f_a070;

/// Monic polynomials of degree `d`, split products `t (t - 1) (t - x) ..`
/// over the field's elements first, then `t^d`, then the rest in code order.
fn ranked_moduli(r: &PolyRing, d: usize, limit: usize) -> Vec<Poly> {
    let k = r.field();
    let mut out: Vec<Poly> = Vec::new();
    if d as u32 <= k.q() {
        let split = k
            .elements()
            .take(d)
            .fold(Poly::one(), |acc, x| r.mul(&acc, &Poly::from_coeffs(vec![k.neg(x), 1])));
        out.push(split);
    }
    let pure = Poly::monomial(1, d);
    if !out.contains(&pure) {
        out.push(pure);
    }
    for f in r.monics_of_degree(d) {
        if out.len() >= limit {
            break;
        }
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out.truncate(limit);
    out
}

/// Targets `fA + V` of the same codimension as `ql`, `V` of degree below
/// `deg f` and containing `1` exactly when `ql` does, in rank order.
fn targets(ql: &QuasiLevel, limit: usize) -> Vec<QuasiLevel> {
    let k = ql.field();
    let r = PolyRing::new(k.clone());
    let codim = ql.codim();
    let with_one = ql.contains(&Poly::one());
    let d0 = codim + usize::from(with_one);
    let mut out = Vec::new();
    for d in d0..=d0 + 1 {
        if d == 0 {
            continue;
        }
        let one = Poly::one().to_vec(d);
        let spaces: Vec<Subspace> = Subspace::enumerate_all(k, d, d - codim)
            .into_iter()
            .filter(|v| v.contains(&one) == with_one)
            .collect();
        for f in ranked_moduli(&r, d, limit) {
            for v in &spaces {
                if out.len() >= limit {
                    return out;
                }
                let t = QuasiLevel::new(k, &f, &v.basis_polys()).expect("non-zero modulus");
                // the set must really be fA + V, not absorb a smaller ideal
                if t.codim() == codim && !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Non-standard automorphisms mapping `ql` onto the ranked targets.
pub fn targeted_candidates(ql: &QuasiLevel, limit: usize) -> Vec<(AutoSpec, QuasiLevel)> {
    let k = ql.field();
    let r = PolyRing::new(k.clone());
    let mut out = Vec::new();
    for t in targets(ql, limit) {
        let g = r.lcm(ql.conductor(), t.conductor()).expect("non-zero");
        if g.degree_or_zero() == 0 || g.degree_or_zero() > MAX_PHI_SUPPORT + 1 {
            continue;
        }
        let (Ok(src), Ok(dst)) = (ql.expand_to(&g), t.expand_to(&g)) else {
            continue;
        };
        if let Ok(phi) = Phi::mapping(k, &g, &src, &dst) {
            out.push((AutoSpec::single(k, Primitive::NonStandard(phi)), t));
        }
    }
    out
}

fn random_phi(k: &Field, rng: &mut ChaCha8Rng, d: usize) -> Phi {
    loop {
        let mut cols = vec![Poly::one().to_vec(d + 1)];
        for _ in 0..d {
            cols.push((0..=d).map(|_| rng.gen_range(0..k.q()) as u8).collect());
        }
        if let Ok(phi) = Phi::new(k, &Poly::monomial(1, d + 1), cols) {
            return phi;
        }
    }
}

fn candidates(h: &SubgroupHandle, ql: &QuasiLevel, budget: usize) -> Vec<AutoSpec> {
    let k = h.field();
    let mut out: Vec<AutoSpec> = Vec::new();
    let targeted = targeted_candidates(ql, budget);
    out.extend(targeted.iter().map(|(a, _)| a.clone()));
    // targeted maps followed by standard ring automorphisms
    for (a, _) in targeted.iter().take(4) {
        for b in k.units() {
            let shift = AutoSpec::single(k, Primitive::RingAuto { a: 1, b, e: 0 });
            out.push(shift.compose(a).expect("same field"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
    let span = ql.conductor().degree_or_zero().clamp(1, MAX_PHI_SUPPORT);
    for i in 0..budget {
        let d = 1 + i % span;
        out.push(AutoSpec::single(k, Primitive::NonStandard(random_phi(k, &mut rng, d))));
    }
    // standard automorphisms alone never change the verdict
    out.push(AutoSpec::single(k, Primitive::Contragredient));
    out.truncate(budget);
    out
}

/// A witness `a` with `a(H)` congruence, tried in rank order within
/// `budget` candidates; `None` when no candidate works.
pub fn refute_genuineness(h: &SubgroupHandle, budget: usize) -> Result<Option<AutoSpec>> {
    if h.is_congruence()? {
        return Err(Error::Precondition("the subgroup is already a congruence subgroup".into()));
    }
    let ql = h.quasi_level()?;
    for a in candidates(h, &ql, budget) {
        let moved = match a.apply(h) {
            Ok(m) => m,
            Err(e) if e.is_cap() => continue,
            Err(e) => return Err(e),
        };
        match moved.is_congruence() {
            Ok(true) => return Ok(Some(a)),
            Ok(false) => {}
            Err(e) if e.is_cap() => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}
