use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use super::groups::{FinGroup, TableGroup};
use crate::error::{Error, Result};

/// A materialized subgroup: sorted element list, membership set, generators.
#[derive(Clone, Debug)]
pub struct Subgroup {
    elems: Vec<u64>,
    set: HashSet<u64>,
    gens: Vec<u64>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elems == other.elems
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    pub fn trivial(g: &FinGroup) -> Self {
        let e = g.identity();
        Subgroup {
            elems: vec![e],
            set: HashSet::from([e]),
            gens: Vec::new(),
        }
    }

    pub fn order(&self) -> u64 {
        self.elems.len() as u64
    }

    pub fn elements(&self) -> &[u64] {
        &self.elems
    }

    pub fn generators(&self) -> &[u64] {
        &self.gens
    }

    pub fn contains(&self, x: u64) -> bool {
        self.set.contains(&x)
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elems.len() <= other.elems.len() && self.elems.iter().all(|&x| other.contains(x))
    }

    pub fn is_trivial(&self) -> bool {
        self.elems.len() == 1
    }

    /// `[parent : self]`, assuming `self` lies in `parent`.
    pub fn index_in(&self, parent: &Subgroup) -> u64 {
        parent.order() / self.order()
    }
}

/// The subgroup generated by `gens`.
pub fn closure(g: &FinGroup, gens: &[u64], limit: u64) -> Result<Subgroup> {
    extend(g, &Subgroup::trivial(g), gens, limit)
}

/// The subgroup generated by `sub` and `new_gens`.
pub fn extend(g: &FinGroup, sub: &Subgroup, new_gens: &[u64], limit: u64) -> Result<Subgroup> {
    let mut gens = sub.gens.clone();
    let mut added = false;
    for &x in new_gens {
        if !sub.contains(x) && !gens.contains(&x) {
            gens.push(x);
            added = true;
        }
    }
    if !added {
        return Ok(sub.clone());
    }
    let mut set = sub.set.clone();
    let mut elems = sub.elems.clone();
    // every old element must be multiplied by the new generators, new ones by all
    let mut queue: VecDeque<u64> = sub.elems.iter().copied().collect();
    let fresh: Vec<u64> = gens[sub.gens.len()..].to_vec();
    let mut old_left = sub.elems.len();
    while let Some(x) = queue.pop_front() {
        let list: &[u64] = if old_left > 0 { &fresh } else { &gens };
        old_left = old_left.saturating_sub(1);
        for &s in list {
            let y = g.mul(x, s);
            if set.insert(y) {
                elems.push(y);
                if elems.len() as u64 > limit {
                    return Err(Error::cap("subgroup order", limit));
                }
                queue.push_back(y);
            }
        }
    }
    elems.sort_unstable();
    Ok(Subgroup { elems, set, gens })
}

/// Wraps a known subgroup element set, choosing generators greedily.
pub fn from_elements(g: &FinGroup, mut elems: Vec<u64>, limit: u64) -> Result<Subgroup> {
    elems.sort_unstable();
    elems.dedup();
    let mut sub = Subgroup::trivial(g);
    for &x in &elems {
        if !sub.contains(x) {
            sub = extend(g, &sub, &[x], limit)?;
        }
    }
    if sub.elems != elems {
        return Err(Error::Inconsistent("element set is not a subgroup".into()));
    }
    Ok(sub)
}

/// Whether `h` is normalized by every generator of `parent`.
pub fn is_normal_in(g: &FinGroup, parent: &Subgroup, h: &Subgroup) -> bool {
    parent
        .gens
        .iter()
        .all(|&p| h.gens.iter().all(|&x| h.contains(g.conj(x, p))))
}

/// The least normal subgroup of `parent` containing `set`.
pub fn normal_closure(g: &FinGroup, parent: &Subgroup, set: &[u64], limit: u64) -> Result<Subgroup> {
    let mut n = closure(g, set, limit)?;
    let mut checked = 0;
    while checked < n.gens.len() {
        let x = n.gens[checked];
        checked += 1;
        let mut new = Vec::new();
        for &p in &parent.gens {
            let c = g.conj(x, p);
            if !n.contains(c) && !new.contains(&c) {
                new.push(c);
            }
        }
        if !new.is_empty() {
            n = extend(g, &n, &new, limit)?;
        }
    }
    Ok(n)
}

/// Elements common to both, as a subgroup.
pub fn intersection(g: &FinGroup, a: &Subgroup, b: &Subgroup, limit: u64) -> Result<Subgroup> {
    let (small, big) = if a.order() <= b.order() { (a, b) } else { (b, a) };
    if small.is_subset_of(big) {
        return Ok(small.clone());
    }
    let elems: Vec<u64> = small.elems.iter().copied().filter(|&x| big.contains(x)).collect();
    from_elements(g, elems, limit)
}

/// The largest normal subgroup of `parent` inside `h`.
pub fn core(g: &FinGroup, parent: &Subgroup, h: &Subgroup, limit: u64) -> Result<Subgroup> {
    let mut k: HashSet<u64> = h.set.clone();
    loop {
        let before = k.len();
        for &p in &parent.gens {
            let pi = g.inv(p);
            k = k
                .iter()
                .copied()
                .filter(|&x| k.contains(&g.mul(g.mul(p, x), pi)))
                .collect();
        }
        if k.len() == before {
            break;
        }
    }
    from_elements(g, k.into_iter().collect(), limit)
}

/// `[parent, parent]`, the normal closure of commutators of generators.
pub fn derived_subgroup(g: &FinGroup, parent: &Subgroup, limit: u64) -> Result<Subgroup> {
    let gens = &parent.gens;
    let mut comms = Vec::new();
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i + 1..] {
            let c = g.commutator(a, b);
            if c != g.identity() && !comms.contains(&c) {
                comms.push(c);
            }
        }
    }
    normal_closure(g, parent, &comms, limit)
}

/// Left cosets `xN` of `n` in `parent`: representatives (least element of each
/// coset, in increasing order) and the coset index of every element.
pub fn cosets(g: &FinGroup, parent: &Subgroup, n: &Subgroup) -> (Vec<u64>, HashMap<u64, usize>) {
    let mut index = HashMap::with_capacity(parent.elems.len());
    let mut reps = Vec::new();
    for &x in &parent.elems {
        if index.contains_key(&x) {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        for &y in &n.elems {
            index.insert(g.mul(x, y), c);
        }
    }
    (reps, index)
}

/// `parent / n` as a table group, plus the coset representatives.
pub fn quotient_group(
    g: &FinGroup,
    parent: &Subgroup,
    n: &Subgroup,
    limit: u64,
) -> Result<(FinGroup, Vec<u64>)> {
    if !n.is_subset_of(parent) || !is_normal_in(g, parent, n) {
        return Err(Error::NotNormal);
    }
    let m = parent.order() / n.order();
    if m > limit.min(4096) {
        return Err(Error::cap("quotient table order", limit.min(4096)));
    }
    let (reps, index) = cosets(g, parent, n);
    let m = reps.len();
    let mut mul = vec![0u32; m * m];
    for (i, &x) in reps.iter().enumerate() {
        for (j, &y) in reps.iter().enumerate() {
            mul[i * m + j] = index[&g.mul(x, y)] as u32;
        }
    }
    let inv = reps.iter().map(|&x| index[&g.inv(x)] as u32).collect();
    let identity = index[&g.identity()] as u32;
    let table = TableGroup::trusted(m as u32, identity, mul, inv);
    Ok((FinGroup::Table(Arc::new(table)), reps))
}

/// Invariant factors `d_1 | d_2 | ...` of `parent / [parent, parent]`.
pub fn abelianization(g: &FinGroup, parent: &Subgroup, limit: u64) -> Result<Vec<u64>> {
    let d = derived_subgroup(g, parent, limit)?;
    let (reps, _) = cosets(g, parent, &d);
    let m = reps.len() as u64;
    let mut factors_by_prime: Vec<Vec<u64>> = Vec::new();
    for p in prime_factors(m) {
        // c_k = #{x : x^(p^k) = 1} = p^(sum_i min(k, e_i))
        let mut exps = Vec::new();
        let mut prev = 0u32;
        let mut k = 1u32;
        let pm = p_part(m, p);
        loop {
            let pk = p.pow(k);
            let count = reps
                .iter()
                .filter(|&&x| d.contains(g.pow(x, pk)))
                .count() as u64;
            let logc = ilog(count, p);
            // number of cyclic factors of exponent >= k
            exps.push(logc - prev);
            prev = logc;
            if p.pow(logc) == pm {
                break;
            }
            k += 1;
        }
        // exps[k-1] = #{i : e_i >= k}
        let mut parts = Vec::new();
        for (i, &c) in exps.iter().enumerate() {
            let next = exps.get(i + 1).copied().unwrap_or(0);
            for _ in 0..(c - next) {
                parts.push(p.pow(i as u32 + 1));
            }
        }
        parts.sort_unstable();
        factors_by_prime.push(parts);
    }
    let len = factors_by_prime.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for parts in &factors_by_prime {
        // align the largest prime powers with the last invariant factors
        for (i, &pp) in parts.iter().rev().enumerate() {
            out[len - 1 - i] *= pp;
        }
    }
    Ok(out)
}

fn ilog(mut n: u64, p: u64) -> u32 {
    let mut k = 0;
    while n > 1 {
        n /= p;
        k += 1;
    }
    k
}

fn p_part(mut n: u64, p: u64) -> u64 {
    let mut out = 1;
    while n % p == 0 {
        n /= p;
        out *= p;
    }
    out
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Field, Poly, Subspace};
    use crate::matrices::{Mat2, MatGroup, Mode};

    const LIM: u64 = 1_000_000;

    fn s3() -> (FinGroup, u64, u64) {
        let g = FinGroup::symmetric(3).unwrap();
        let t = FinGroup::perm_from_cycles(3, &[&[0, 1]]);
        let c = FinGroup::perm_from_cycles(3, &[&[0, 1, 2]]);
        (g, t, c)
    }

    #[test]
    fn closures_in_s3() {
        let (g, t, c) = s3();
        let whole = closure(&g, &[t, c], LIM).unwrap();
        assert_eq!(whole.order(), 6);
        let triv = closure(&g, &[], LIM).unwrap();
        assert_eq!(triv.index_in(&whole), 6);
        assert_eq!(normal_closure(&g, &whole, &[t], LIM).unwrap().order(), 6);
        let a3 = normal_closure(&g, &whole, &[c], LIM).unwrap();
        assert_eq!(a3.order(), 3);
        assert_eq!(derived_subgroup(&g, &whole, LIM).unwrap(), a3);
        assert_eq!(abelianization(&g, &whole, LIM).unwrap(), vec![2]);
        assert_eq!(core(&g, &whole, &a3, LIM).unwrap(), a3);
        let h = closure(&g, &[t], LIM).unwrap();
        assert!(core(&g, &whole, &h, LIM).unwrap().is_trivial());
        let (q, _) = quotient_group(&g, &whole, &a3, LIM).unwrap();
        assert_eq!(q.order(), 2);
        let (q, _) = quotient_group(&g, &whole, &whole, LIM).unwrap();
        assert_eq!(q.order(), 1);
        assert_eq!(quotient_group(&g, &whole, &h, LIM).unwrap_err(), Error::NotNormal);
    }

    #[test]
    fn elementary_abelian_invariants() {
        let k = Field::of_order(2).unwrap();
        let g = FinGroup::additive(Subspace::zero(&k, 3)).unwrap();
        let whole = closure(&g, &g.generators(), LIM).unwrap();
        assert_eq!(abelianization(&g, &whole, LIM).unwrap(), vec![2, 2, 2]);
        let c12 = FinGroup::symmetric(7).unwrap();
        let x = FinGroup::perm_from_cycles(7, &[&[0, 1, 2, 3], &[4, 5, 6]]);
        let cyc = closure(&c12, &[x], LIM).unwrap();
        assert_eq!(abelianization(&c12, &cyc, LIM).unwrap(), vec![12]);
        let y = FinGroup::perm_from_cycles(7, &[&[0, 1], &[4, 5, 6]]);
        let z = FinGroup::perm_from_cycles(7, &[&[2, 3]]);
        let ab = closure(&c12, &[y, z], LIM).unwrap();
        assert_eq!(abelianization(&c12, &ab, LIM).unwrap(), vec![2, 6]);
    }

    #[test]
    fn sl2_f3_derived_is_quaternion() {
        let k = Field::of_order(3).unwrap();
        let mg = MatGroup::of(&k, &Poly::t(), Mode::SL).unwrap();
        let g = FinGroup::Matrix(mg.clone());
        let whole = closure(&g, &g.generators(), LIM).unwrap();
        assert_eq!(whole.order(), 24);
        let d = derived_subgroup(&g, &whole, LIM).unwrap();
        assert_eq!(d.order(), 8);
        // Q8: a single involution, -I
        let invols: Vec<_> = d.elements().iter().filter(|&&x| g.element_order(x) == 2).collect();
        assert_eq!(invols.len(), 1);
        assert_eq!(abelianization(&g, &whole, LIM).unwrap(), vec![3]);
    }

    #[test]
    fn sl2_mod_t2_closure_and_kernel() {
        let k = Field::of_order(2).unwrap();
        let f = Poly::monomial(1, 2);
        let mg = MatGroup::of(&k, &f, Mode::SL).unwrap();
        let g = FinGroup::Matrix(mg.clone());
        let gens = [
            mg.reduce(&Mat2::t(Poly::one())),
            mg.reduce(&Mat2::t(Poly::t())),
            mg.reduce(&Mat2::weyl(&k)),
        ];
        let whole = closure(&g, &gens, LIM).unwrap();
        assert_eq!(whole.order(), 48);
        assert_eq!(whole.elements(), mg.enumerate_brute(LIM).unwrap().as_slice());
        let kernel = normal_closure(&g, &whole, &[gens[1]], LIM).unwrap();
        assert_eq!(kernel.order(), 8);
        let (q, _) = quotient_group(&g, &whole, &kernel, LIM).unwrap();
        assert_eq!(q.order(), 6);
    }

    #[test]
    fn cap_is_enforced() {
        let g = FinGroup::symmetric(6).unwrap();
        let gens = g.generators();
        assert!(closure(&g, &gens, 100).unwrap_err().is_cap());
    }
}
