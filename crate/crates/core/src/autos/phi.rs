use crate::algebra::{Field, Poly, PolyRing, Subspace};
use crate::error::{Error, Result};
use crate::subgroups::QuasiLevel;

/// A `k`-linear automorphism of `A` fixing `1`, block-shaped with respect to
/// a monic `g`: `phi(a) = phi_R(a mod g) + g (a div g)`, where `phi_R` is an
/// invertible linear map on polynomials of degree `< deg g`.
///
/// With `g = t^(D+1)` this is a matrix on `1, t, .., t^D` extended by the
/// identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phi {
    k: Field,
    g: Poly,
    /// `cols[i]` is `phi(t^i)` as a coefficient vector of length `deg g`.
    cols: Vec<Vec<u8>>,
}

impl Phi {
    /// Checks that `g` is monic non-constant, `phi(1) = 1` and `phi_R` is
    /// invertible (full rank).
    pub fn new(k: &Field, g: &Poly, cols: Vec<Vec<u8>>) -> Result<Self> {
        let d = g.degree().unwrap_or(0);
        if d == 0 || !g.is_monic() {
            return Err(Error::Precondition("block modulus must be monic of degree >= 1".into()));
        }
        if cols.len() != d || cols.iter().any(|c| c.len() != d) {
            return Err(Error::Precondition(format!("phi needs a {d}x{d} matrix")));
        }
        if cols.iter().flatten().any(|&x| k.check(x as u32).is_err()) {
            return Err(Error::NotInField(0));
        }
        let mut e0 = vec![0u8; d];
        e0[0] = 1;
        if cols[0] != e0 {
            return Err(Error::Precondition("phi must fix 1".into()));
        }
        if Subspace::span(k, d, cols.iter().cloned()).dim() != d {
            return Err(Error::Precondition("phi is singular".into()));
        }
        Ok(Phi { k: k.clone(), g: g.clone(), cols })
    }

    /// The map on `1, t, .., t^D` given by polynomial images, identity above.
    pub fn from_images(k: &Field, images: &[Poly]) -> Result<Self> {
        let d = images.len();
        let g = Poly::monomial(1, d);
        let cols = images
            .iter()
            .map(|p| {
                if p.degree().is_some_and(|e| e >= d) {
                    Err(Error::Precondition("image degree exceeds the block".into()))
                } else {
                    Ok(p.to_vec(d))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, &g, cols)
    }

    pub fn identity(k: &Field) -> Self {
        Self::new(k, &Poly::t(), vec![vec![1]]).unwrap()
    }

    pub fn field(&self) -> &Field {
        &self.k
    }

    pub fn block(&self) -> &Poly {
        &self.g
    }

    pub fn columns(&self) -> &[Vec<u8>] {
        &self.cols
    }

    fn apply_block(&self, v: &[u8]) -> Vec<u8> {
        let k = &self.k;
        let d = self.cols.len();
        let mut out = vec![0u8; d];
        for (i, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(&self.cols[i]) {
                *o = k.add(*o, k.mul(c, x));
            }
        }
        out
    }

    pub fn apply(&self, a: &Poly) -> Poly {
        let r = PolyRing::new(self.k.clone());
        let (quo, rem) = r.divmod(a, &self.g).expect("non-zero block");
        let d = self.cols.len();
        let img = Poly::from_coeffs(self.apply_block(&rem.to_vec(d)));
        r.add(&img, &r.mul(&quo, &self.g))
    }

    /// The inverse map, by Gauss-Jordan elimination over `k`.
    pub fn inverse(&self) -> Phi {
        let k = &self.k;
        let d = self.cols.len();
        // rows of [M | I] with M[r][c] = cols[c][r]
        let mut rows: Vec<Vec<u8>> = (0..d)
            .map(|r| {
                let mut row: Vec<u8> = (0..d).map(|c| self.cols[c][r]).collect();
                row.extend((0..d).map(|c| u8::from(c == r)));
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d).find(|&r| rows[r][col] != 0).expect("invertible");
            rows.swap(col, piv);
            let inv = k.inv(rows[col][col]).unwrap();
            for x in rows[col].iter_mut() {
                *x = k.mul(inv, *x);
            }
            for r in 0..d {
                if r != col && rows[r][col] != 0 {
                    let f = rows[r][col];
                    let pivot_row = rows[col].clone();
                    for (x, &y) in rows[r].iter_mut().zip(&pivot_row) {
                        *x = k.sub(*x, k.mul(f, y));
                    }
                }
            }
        }
        let cols = (0..d).map(|c| (0..d).map(|r| rows[r][d + c]).collect()).collect();
        Phi { k: k.clone(), g: self.g.clone(), cols }
    }

    /// `phi(ql)`; its conductor divides `lcm(conductor, g)`.
    pub fn image_of(&self, ql: &QuasiLevel) -> Result<QuasiLevel> {
        let r = PolyRing::new(self.k.clone());
        let m = r.lcm(ql.conductor(), &self.g)?;
        let big = ql.expand_to(&m)?;
        let imgs: Vec<Poly> = big.basis_polys().iter().map(|p| self.apply(p)).collect();
        QuasiLevel::new(&self.k, &m, &imgs)
    }

    /// A `phi` with `phi(1) = 1` mapping the subspace `src` of `A/(m)` onto
    /// `dst`, both of the same dimension and both containing `1` or both not;
    /// built by matching extended bases.
    pub fn mapping(k: &Field, m: &Poly, src: &Subspace, dst: &Subspace) -> Result<Phi> {
        let d = m.degree_or_zero();
        if src.len() != d || dst.len() != d || src.dim() != dst.dim() {
            return Err(Error::Precondition("subspaces must have equal dimension".into()));
        }
        let one = {
            let mut v = vec![0u8; d];
            if d > 0 {
                v[0] = 1;
            }
            v
        };
        if src.contains(&one) != dst.contains(&one) {
            return Err(Error::Precondition("phi(1) = 1 forces 1 into both or neither".into()));
        }
        let b1 = extended_basis(k, src, &one);
        let b2 = extended_basis(k, dst, &one);
        // phi = B2 B1^-1 on coordinates: solve for images of unit vectors
        let b1_phi = Phi { k: k.clone(), g: m.clone(), cols: b1 };
        let b1_inv = b1_phi.inverse();
        let b2_phi = Phi { k: k.clone(), g: m.clone(), cols: b2 };
        let cols: Vec<Vec<u8>> = (0..d)
            .map(|i| b2_phi.apply_block(&b1_inv.cols[i]))
            .collect();
        Phi::new(k, m, cols)
    }
}

/// A basis of `F_q^d` with `1` first, then a basis of `w` (completing `1` if
/// it lies in `w`), then unit vectors at free positions.
fn extended_basis(k: &Field, w: &Subspace, one: &[u8]) -> Vec<Vec<u8>> {
    let d = w.len();
    let mut acc = Subspace::zero(k, d);
    let mut out = Vec::new();
    let push = |v: Vec<u8>, acc: &mut Subspace, out: &mut Vec<Vec<u8>>| {
        if acc.insert(v.clone()) {
            out.push(v);
        }
    };
    let in_w = w.contains(one);
    if in_w {
        push(one.to_vec(), &mut acc, &mut out);
    }
    for b in w.basis() {
        push(b.clone(), &mut acc, &mut out);
    }
    if !in_w {
        push(one.to_vec(), &mut acc, &mut out);
    }
    for i in 0..d {
        let mut e = vec![0u8; d];
        e[i] = 1;
        push(e, &mut acc, &mut out);
    }
    // 1 must sit at position 0 in both bases for phi(1) = 1
    if !in_w {
        let pos = out.iter().position(|v| v == one).unwrap();
        let v = out.remove(pos);
        out.insert(0, v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_t_and_t2() {
        let k = Field::of_order(2).unwrap();
        let phi = Phi::from_images(&k, &[Poly::one(), Poly::monomial(1, 2), Poly::t()]).unwrap();
        assert_eq!(phi.apply(&Poly::t()), Poly::monomial(1, 2));
        assert_eq!(phi.apply(&Poly::monomial(1, 5)), Poly::monomial(1, 5));
        let inv = phi.inverse();
        for i in 0..6 {
            let a = Poly::monomial(1, i);
            assert_eq!(inv.apply(&phi.apply(&a)), a);
        }
        // ql of Gamma(t^2) = (t^2) maps to span{t, t^3, t^4, ...}
        let img = phi.image_of(&QuasiLevel::ideal(&k, &Poly::monomial(1, 2)).unwrap()).unwrap();
        assert_eq!(img.level(), Poly::monomial(1, 3));
        assert!(img.contains(&Poly::t()));
        assert!(!img.contains(&Poly::monomial(1, 2)));
    }

    #[test]
    fn rejects_bad_maps() {
        let k = Field::of_order(3).unwrap();
        assert!(Phi::from_images(&k, &[Poly::t(), Poly::one()]).is_err());
        assert!(Phi::from_images(&k, &[Poly::one(), Poly::one()]).is_err());
    }

    #[test]
    fn mapping_hits_the_target() {
        let k = Field::of_order(3).unwrap();
        let r = PolyRing::new(k.clone());
        let m = Poly::parse("0201", &k).unwrap();
        let src = Subspace::span_polys(&k, 3, [Poly::one(), Poly::parse("012", &k).unwrap()].iter());
        let f = Poly::parse("021", &k).unwrap();
        let dst = Subspace::span_polys(&k, 3, [Poly::one(), f.clone(), r.shift(&f, 1)].iter());
        let dst = Subspace::span(&k, 3, dst.basis()[..2].to_vec());
        let phi = Phi::mapping(&k, &m, &src, &dst).unwrap();
        assert_eq!(phi.apply(&Poly::one()), Poly::one());
        for b in src.basis_polys() {
            assert!(dst.contains(&phi.apply(&b).to_vec(3)));
        }
    }
}
