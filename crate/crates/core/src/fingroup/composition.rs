use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::groups::FinGroup;
use super::subgroup::{
    derived_subgroup, extend, is_normal_in, normal_closure, prime_factors, Subgroup,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FactorKind {
    CyclicPrime { p: u64 },
    PSL2Family { q: u32, s: u32 },
    OtherSimple,
    Unidentified,
}

/// A composition factor, classified by its order alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FactorDescriptor {
    pub order: u64,
    pub kind: FactorKind,
}

impl FactorDescriptor {
    /// Classifies a simple group of the given order. With a field order `q`,
    /// non-abelian orders are matched against the `PSL_2(F_{q^s})` family.
    pub fn classify(order: u64, q: Option<u32>) -> Self {
        let kind = if is_prime(order) {
            FactorKind::CyclicPrime { p: order }
        } else {
            match q {
                None => FactorKind::Unidentified,
                Some(q) => match psl2_family_member(order, q) {
                    Some(s) => FactorKind::PSL2Family { q, s },
                    None => FactorKind::OtherSimple,
                },
            }
        };
        FactorDescriptor { order, kind }
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self.kind, FactorKind::CyclicPrime { .. })
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == [n]
}

/// `|PSL_2(F_Q)| = Q (Q^2 - 1) / gcd(2, Q - 1)`, `None` on overflow.
pub fn psl2_order(big_q: u64) -> Option<u64> {
    let sq = big_q.checked_mul(big_q)?;
    let o = big_q.checked_mul(sq - 1)?;
    Some(if big_q % 2 == 1 { o / 2 } else { o })
}

/// The least `s >= 1` with `order = |PSL_2(F_{q^s})|`, if any.
pub fn psl2_family_member(order: u64, q: u32) -> Option<u32> {
    if q < 2 {
        return None;
    }
    let mut s = 1u32;
    loop {
        let big_q = (q as u64).checked_pow(s)?;
        let o = psl2_order(big_q)?;
        if o == order {
            return Some(s);
        }
        if o > order {
            return None;
        }
        s += 1;
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CompositionOptions {
    /// Field order for family classification.
    pub q: Option<u32>,
    /// Shuffles the tie-breaking order of candidate elements.
    pub shuffle_seed: Option<u64>,
}

/// Composition factors of `parent / bottom`, top of the series first.
/// `bottom` must be normal in `parent`.
pub fn composition_factors(
    g: &FinGroup,
    parent: &Subgroup,
    bottom: &Subgroup,
    opts: CompositionOptions,
    limit: u64,
) -> Result<Vec<FactorDescriptor>> {
    if !bottom.is_subset_of(parent) || !is_normal_in(g, parent, bottom) {
        return Err(Error::NotNormal);
    }
    let mut rng = opts.shuffle_seed.map(ChaCha8Rng::seed_from_u64);
    let mut out = Vec::new();
    let mut top = parent.clone();
    while top.order() > bottom.order() {
        let m = maximal_normal(g, &top, bottom, rng.as_mut(), limit)?;
        out.push(FactorDescriptor::classify(top.order() / m.order(), opts.q));
        top = m;
    }
    let prod: u64 = out.iter().map(|f| f.order).product();
    assert_eq!(prod * bottom.order(), parent.order(), "factor orders multiply to the quotient order");
    Ok(out)
}

/// A maximal normal subgroup `M` of `top` with `bottom <= M < top`.
fn maximal_normal(
    g: &FinGroup,
    top: &Subgroup,
    bottom: &Subgroup,
    rng: Option<&mut ChaCha8Rng>,
    limit: u64,
) -> Result<Subgroup> {
    let derived = derived_subgroup(g, top, limit)?;
    let d = extend(g, &derived, bottom.generators(), limit)?;
    if d.order() < top.order() {
        // top/d is abelian; pass to a hyperplane of its r-torsion-free part
        let r = prime_factors(top.order() / d.order())[0];
        let mut gens = top.generators().to_vec();
        if let Some(rng) = rng {
            gens.shuffle(rng);
        }
        let powers: Vec<u64> = gens.iter().map(|&x| g.pow(x, r)).collect();
        let mut m = extend(g, &d, &powers, limit)?;
        for &x in &gens {
            if m.contains(x) {
                continue;
            }
            let cand = extend(g, &m, &[x], limit)?;
            if cand.order() < top.order() {
                m = cand;
            }
        }
        debug_assert_eq!(top.order() / m.order(), r);
        return Ok(m);
    }
    // perfect relative to bottom: grow by normal closures, skipping whole
    // conjugacy classes once they are known to generate everything
    let mut m = bottom.clone();
    let mut candidates = top.elements().to_vec();
    if let Some(rng) = rng {
        candidates.shuffle(rng);
    }
    let mut exhausted: HashSet<u64> = HashSet::new();
    for x in candidates {
        if m.contains(x) || exhausted.contains(&x) {
            continue;
        }
        let mut set = m.generators().to_vec();
        set.push(x);
        let c = normal_closure(g, top, &set, limit)?;
        if c.order() < top.order() {
            m = c;
        } else {
            exhausted.extend(conjugacy_class(g, top, x));
        }
    }
    Ok(m)
}

/// The conjugacy class of `x` under `parent`.
pub fn conjugacy_class(g: &FinGroup, parent: &Subgroup, x: u64) -> Vec<u64> {
    let mut seen = HashSet::from([x]);
    let mut stack = vec![x];
    while let Some(y) = stack.pop() {
        for &p in parent.generators() {
            let z = g.conj(y, p);
            if seen.insert(z) {
                stack.push(z);
            }
        }
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Field, Poly};
    use crate::fingroup::closure;
    use crate::matrices::{MatGroup, Mode};

    const LIM: u64 = 1_000_000;

    fn sl2(q: u32) -> (FinGroup, Subgroup) {
        let k = Field::of_order(q).unwrap();
        let g = FinGroup::Matrix(MatGroup::of(&k, &Poly::t(), Mode::SL).unwrap());
        let whole = closure(&g, &g.generators(), LIM).unwrap();
        (g, whole)
    }

    fn orders(fs: &[FactorDescriptor]) -> Vec<u64> {
        let mut v: Vec<u64> = fs.iter().map(|f| f.order).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn family_membership() {
        assert_eq!(psl2_family_member(60, 4), Some(1));
        assert_eq!(psl2_family_member(2520, 2), None);
        assert_eq!(psl2_family_member(6, 2), Some(1));
        assert_eq!(psl2_family_member(504, 2), Some(3));
        assert_eq!(psl2_family_member(4080, 2), Some(4));
        assert_eq!(psl2_family_member(12, 3), Some(1));
        assert_eq!(psl2_family_member(60, 5), Some(1));
    }

    #[test]
    fn factors_of_small_sl2() {
        let (g, whole) = sl2(2);
        let f = composition_factors(&g, &whole, &Subgroup::trivial(&g), Default::default(), LIM).unwrap();
        assert_eq!(orders(&f), vec![2, 3]);
        assert!(f.iter().all(|x| x.is_cyclic()));

        let (g, whole) = sl2(3);
        let f = composition_factors(&g, &whole, &Subgroup::trivial(&g), Default::default(), LIM).unwrap();
        assert_eq!(orders(&f), vec![2, 2, 2, 3]);

        let (g, whole) = sl2(4);
        let opts = CompositionOptions { q: Some(4), shuffle_seed: None };
        let f = composition_factors(&g, &whole, &Subgroup::trivial(&g), opts, LIM).unwrap();
        assert_eq!(f, vec![FactorDescriptor { order: 60, kind: FactorKind::PSL2Family { q: 4, s: 1 } }]);
    }

    #[test]
    fn s7_has_an_a7_factor() {
        let g = FinGroup::symmetric(7).unwrap();
        let whole = closure(&g, &g.generators(), LIM).unwrap();
        let opts = CompositionOptions { q: Some(2), shuffle_seed: None };
        let f = composition_factors(&g, &whole, &Subgroup::trivial(&g), opts, LIM).unwrap();
        assert_eq!(orders(&f), vec![2, 2520]);
        assert!(f.iter().any(|x| x.kind == FactorKind::OtherSimple));
    }
}
