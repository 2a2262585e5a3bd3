//! Subspaces of `F_q^len`, read as spaces of polynomials of degree `< len`.
//!
//! The canonical basis is in reduced row echelon form with each pivot at the
//! highest non-zero coordinate of its vector, scaled to one, and every other
//! basis vector vanishing there. Equal subspaces have identical bases.

use super::field::Field;
use super::poly::Poly;

#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    k: Field,
    len: usize,
    /// Sorted by increasing pivot position.
    basis: Vec<Vec<u8>>,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let polys: Vec<String> = self
            .basis_polys()
            .iter()
            .map(|p| p.to_digits(&self.k))
            .collect();
        write!(f, "span{{{}}} in F_{}^{}", polys.join(", "), self.k.q(), self.len)
    }
}

fn pivot(v: &[u8]) -> Option<usize> {
    v.iter().rposition(|&c| c != 0)
}

impl Subspace {
    pub fn zero(k: &Field, len: usize) -> Self {
        Subspace {
            k: k.clone(),
            len,
            basis: Vec::new(),
        }
    }

    pub fn full(k: &Field, len: usize) -> Self {
        let basis = (0..len)
            .map(|i| {
                let mut v = vec![0; len];
                v[i] = 1;
                v
            })
            .collect();
        Subspace {
            k: k.clone(),
            len,
            basis,
        }
    }

    /// The span of arbitrary vectors; entries beyond `len` are an error in the
    /// caller and are truncated.
    pub fn span(k: &Field, len: usize, vectors: impl IntoIterator<Item = Vec<u8>>) -> Self {
        let mut s = Self::zero(k, len);
        for mut v in vectors {
            v.resize(len, 0);
            s.insert(v);
        }
        s
    }

    pub fn span_polys<'a>(k: &Field, len: usize, polys: impl IntoIterator<Item = &'a Poly>) -> Self {
        Self::span(k, len, polys.into_iter().map(|p| p.to_vec(len)))
    }

    pub fn field(&self) -> &Field {
        &self.k
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.len - self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.codim() == 0
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.basis
    }

    pub fn basis_polys(&self) -> Vec<Poly> {
        self.basis.iter().map(|v| Poly::from_coeffs(v.clone())).collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|v| pivot(v).expect("basis vectors are non-zero")).collect()
    }

    /// The coordinates not used as pivots, ascending.
    pub fn free_positions(&self) -> Vec<usize> {
        let piv = self.pivots();
        (0..self.len).filter(|i| !piv.contains(i)).collect()
    }

    /// The canonical coset representative of `v + W`: zero at every pivot.
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        let mut v = v.to_vec();
        v.resize(self.len, 0);
        for b in self.basis.iter().rev() {
            let p = pivot(b).expect("non-zero basis vector");
            let c = v[p];
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = self.k.sub(*x, self.k.mul(c, y));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&c| c == 0)
    }

    pub fn contains_poly(&self, p: &Poly) -> bool {
        p.degree().map_or(true, |d| d < self.len) && self.contains(&p.to_vec(self.len))
    }

    /// Adds a vector, keeping the basis canonical; returns whether it grew.
    pub fn insert(&mut self, v: Vec<u8>) -> bool {
        let mut r = self.reduce(&v);
        let Some(p) = pivot(&r) else { return false };
        let inv = self.k.inv(r[p]).expect("non-zero pivot");
        for x in r.iter_mut() {
            *x = self.k.mul(inv, *x);
        }
        for b in self.basis.iter_mut() {
            let c = b[p];
            if c != 0 {
                for (x, &y) in b.iter_mut().zip(&r) {
                    *x = self.k.sub(*x, self.k.mul(c, y));
                }
            }
        }
        let pos = self
            .basis
            .iter()
            .position(|b| pivot(b).unwrap() > p)
            .unwrap_or(self.basis.len());
        self.basis.insert(pos, r);
        true
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.len == other.len && self.basis.iter().all(|b| other.contains(b))
    }

    /// The sum `W + V`.
    pub fn join(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for b in &other.basis {
            s.insert(b.clone());
        }
        s
    }

    /// The canonical complement spanned by unit vectors at free positions.
    pub fn complement(&self) -> Subspace {
        let vs = self.free_positions().into_iter().map(|i| {
            let mut v = vec![0; self.len];
            v[i] = 1;
            v
        });
        Subspace::span(&self.k, self.len, vs)
    }

    /// All `q^dim` elements, as coefficient vectors.
    pub fn elements(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.len]];
        for b in &self.basis {
            let mut next = Vec::with_capacity(out.len() * self.k.q() as usize);
            for c in self.k.elements() {
                for v in &out {
                    next.push(
                        v.iter()
                            .zip(b)
                            .map(|(&x, &y)| self.k.add(x, self.k.mul(c, y)))
                            .collect(),
                    );
                }
            }
            out = next;
        }
        out
    }

    /// Restricts to a larger ambient length by padding with zeros, i.e. the same
    /// vectors viewed in `F_q^new_len`.
    pub fn pad(&self, new_len: usize) -> Subspace {
        Subspace::span(&self.k, new_len, self.basis.iter().cloned())
    }

    /// Every subspace of dimension `dim` in `F_q^len`, in a fixed order.
    pub fn enumerate_all(k: &Field, len: usize, dim: usize) -> Vec<Subspace> {
        let mut out = Vec::new();
        if dim > len {
            return out;
        }
        let mut pivots = Vec::with_capacity(dim);
        choose(len, dim, 0, &mut pivots, &mut |piv| {
            // free entries of the vector with pivot p: positions < p that are not pivots
            let slots: Vec<(usize, usize)> = piv
                .iter()
                .enumerate()
                .flat_map(|(bi, &p)| {
                    (0..p)
                        .filter(|j| !piv.contains(j))
                        .map(move |j| (bi, j))
                })
                .collect();
            let q = k.q() as u64;
            let total = q.pow(slots.len() as u32);
            for mut code in 0..total {
                let mut basis: Vec<Vec<u8>> = piv
                    .iter()
                    .map(|&p| {
                        let mut v = vec![0u8; len];
                        v[p] = 1;
                        v
                    })
                    .collect();
                for &(bi, j) in &slots {
                    basis[bi][j] = (code % q) as u8;
                    code /= q;
                }
                out.push(Subspace {
                    k: k.clone(),
                    len,
                    basis,
                });
            }
        });
        out
    }
}

fn choose(n: usize, k: usize, start: usize, acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if acc.len() == k {
        f(acc);
        return;
    }
    for i in start..n {
        if n - i < k - acc.len() {
            break;
        }
        acc.push(i);
        choose(n, k, i + 1, acc, f);
        acc.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_basis_independent() {
        let k = Field::of_order(3).unwrap();
        let a = Subspace::span(&k, 3, vec![vec![1, 2, 0], vec![0, 1, 1]]);
        let b = Subspace::span(&k, 3, vec![vec![1, 0, 1], vec![2, 1, 2]]);
        // second pair is (a1 + a2 - ... ) combinations of the first
        let c = Subspace::span(
            &k,
            3,
            vec![vec![1, 0, 1], vec![1, 2, 0]],
        );
        assert_eq!(a, c);
        assert_eq!(a.dim(), 2);
        let _ = b;
    }

    #[test]
    fn counts_match_gaussian_binomials() {
        let k = Field::of_order(2).unwrap();
        // [4 choose 2]_2 = 35, [4 choose 3]_2 = 15
        assert_eq!(Subspace::enumerate_all(&k, 4, 2).len(), 35);
        assert_eq!(Subspace::enumerate_all(&k, 4, 3).len(), 15);
        let k3 = Field::of_order(3).unwrap();
        // [3 choose 1]_3 = 13
        assert_eq!(Subspace::enumerate_all(&k3, 3, 1).len(), 13);
        let all = Subspace::enumerate_all(&k, 4, 2);
        for s in &all {
            assert_eq!(&Subspace::span(&k, 4, s.basis().to_vec()), s);
        }
    }

    #[test]
    fn reduce_gives_coset_representatives() {
        let k = Field::of_order(2).unwrap();
        let w = Subspace::span(&k, 3, vec![vec![1, 0, 0], vec![0, 1, 1]]);
        assert!(w.contains(&[1, 1, 1]));
        assert!(!w.contains(&[0, 1, 0]));
        assert_eq!(w.reduce(&[0, 1, 0]), w.reduce(&[0, 0, 1]));
        assert_eq!(w.elements().len(), 4);
        assert_eq!(w.complement().dim(), 1);
        assert!(w.join(&w.complement()).is_full());
    }
}
