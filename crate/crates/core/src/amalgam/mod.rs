//! The amalgam structure of `SL_2(A)` and `GL_2(A)`: word decomposition and
//! homomorphisms given by generator tables.

mod homspec;
mod word;

use rand::Rng;

pub use homspec::{
    domain_generators, torus_elements, HomSpec, RawHomSpec, RULE_CONST_HOM, RULE_OVERLAP,
    RULE_SHAPE, RULE_TORUS, RULE_TRANSLATION,
};
pub use word::{matrix_to_word, word_product, AmalgamWord, Letter};

use crate::algebra::{Poly, PolyRing};
use crate::matrices::{Mat2, Mode};

/// A random element of the domain group: a product of `steps` elementary
/// matrices with entries of degree at most 2, times a random diagonal unit in
/// GL mode.
pub fn random_element(r: &PolyRing, rng: &mut impl Rng, steps: usize, mode: Mode) -> Mat2 {
    let k = r.field();
    let mut m = Mat2::identity();
    for _ in 0..steps {
        let deg = rng.gen_range(0..3);
        let coeffs: Vec<u8> = (0..=deg).map(|_| rng.gen_range(0..k.q()) as u8).collect();
        let e = Mat2::t(Poly::from_coeffs(coeffs));
        let e = if rng.gen_bool(0.5) { e.transpose() } else { e };
        m = m.mul(&e, r);
    }
    if mode == Mode::GL {
        let u = rng.gen_range(1..k.q()) as u8;
        m = m.mul(&Mat2::diag(u, 1).unwrap(), r);
    }
    m
}
