use crate::algebra::{Field, Poly, PolyRing};
use crate::error::{Error, Result};
use crate::matrices::Mat2;

/// A letter of an amalgam word: a constant matrix, or an upper triangular
/// `L(alpha, beta, a)` over `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    Const([u8; 4]),
    Upper { alpha: u8, beta: u8, a: Poly },
}

impl Letter {
    pub fn matrix(&self) -> Mat2 {
        match self {
            Letter::Const([a, b, c, d]) => Mat2::new(
                Poly::constant(*a),
                Poly::constant(*b),
                Poly::constant(*c),
                Poly::constant(*d),
            ),
            Letter::Upper { alpha, beta, a } => Mat2::new(
                Poly::constant(*alpha),
                a.clone(),
                Poly::zero(),
                Poly::constant(*beta),
            ),
        }
    }

    fn is_const(&self) -> bool {
        matches!(self, Letter::Const(_))
    }
}

/// An alternating word in the two factors of the amalgam.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AmalgamWord {
    pub letters: Vec<Letter>,
}

fn const_of(m: &Mat2) -> [u8; 4] {
    [m.a.coeff(0), m.b.coeff(0), m.c.coeff(0), m.d.coeff(0)]
}

fn const_mul(k: &Field, x: [u8; 4], y: [u8; 4]) -> [u8; 4] {
    let [a, b, c, d] = x;
    let [e, f, g, h] = y;
    [
        k.add(k.mul(a, e), k.mul(b, g)),
        k.add(k.mul(a, f), k.mul(b, h)),
        k.add(k.mul(c, e), k.mul(d, g)),
        k.add(k.mul(c, f), k.mul(d, h)),
    ]
}

impl AmalgamWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Checks alternation and that non-trailing upper letters are not constant.
    pub fn check(&self) -> Result<()> {
        for w in self.letters.windows(2) {
            if w[0].is_const() == w[1].is_const() {
                return Err(Error::Precondition("adjacent letters of the same kind".into()));
            }
        }
        for (i, l) in self.letters.iter().enumerate() {
            if let Letter::Upper { alpha, beta, a } = l {
                if *alpha == 0 || *beta == 0 {
                    return Err(Error::NonUnit);
                }
                if a.is_constant() && i + 1 != self.letters.len() {
                    return Err(Error::Precondition("constant upper letter before the end".into()));
                }
            }
        }
        Ok(())
    }
}

/// The product of the letters, in order.
pub fn word_product(w: &AmalgamWord, r: &PolyRing) -> Result<Mat2> {
    w.check()?;
    Ok(w.letters
        .iter()
        .fold(Mat2::identity(), |acc, l| acc.mul(&l.matrix(), r)))
}

/// Decomposes `M` (with `det M` in `k*`) by Euclidean column reduction.
pub fn matrix_to_word(m: &Mat2, r: &PolyRing) -> Result<AmalgamWord> {
    let k = r.field();
    m.unit_det(r).ok_or(Error::NonInvertible)?;
    let weyl = Mat2::weyl(k);
    let weyl_inv = weyl.inv(r)?;
    let mut cur = m.clone();
    // inverses of the left factors, in order of application
    let mut undo: Vec<Letter> = Vec::new();
    while !cur.c.is_zero() {
        let dc = cur.c.degree_or_zero();
        if cur.a.is_zero() || cur.a.degree_or_zero() < dc {
            cur = weyl.mul(&cur, r);
            undo.push(Letter::Const(const_of(&weyl_inv)));
            // the new lower-left entry is the old upper-left one, of lower degree
            let after = cur.c.degree().map_or(0, |d| d + 1);
            assert!(after < dc + 1, "lower-left degree must drop");
        } else {
            let (quo, _) = r.divmod(&cur.a, &cur.c)?;
            cur = Mat2::t(r.neg(&quo)).mul(&cur, r);
            undo.push(Letter::Upper { alpha: 1, beta: 1, a: quo });
        }
    }
    let tail = Letter::Upper {
        alpha: cur.a.coeff(0),
        beta: cur.d.coeff(0),
        a: cur.b.clone(),
    };
    undo.push(tail);
    Ok(normalize(undo, k))
}

/// Merges same-kind neighbours and folds `B_2(F_q)` letters into adjacent
/// upper letters until the word alternates.
fn normalize(letters: Vec<Letter>, k: &Field) -> AmalgamWord {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        let l = match l {
            Letter::Upper { alpha, beta, a } if a.is_constant() => {
                Letter::Const([alpha, a.coeff(0), 0, beta])
            }
            other => other,
        };
        push_merge(&mut out, l, k);
    }
    // absorb triangular constants into upper neighbours
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..out.len() {
            let Letter::Const(g) = out[i] else { continue };
            if g[2] != 0 {
                continue;
            }
            let as_upper = Letter::Upper {
                alpha: g[0],
                beta: g[3],
                a: Poly::constant(g[1]),
            };
            if i + 1 < out.len() && !out[i + 1].is_const() {
                let merged = upper_mul(&as_upper, &out[i + 1], k);
                out.splice(i..i + 2, [merged]);
            } else if i > 0 && !out[i - 1].is_const() {
                let merged = upper_mul(&out[i - 1], &as_upper, k);
                out.splice(i - 1..i + 1, [merged]);
            } else {
                continue;
            }
            let rebuilt = std::mem::take(&mut out);
            for l in rebuilt {
                push_merge(&mut out, l, k);
            }
            changed = true;
            break;
        }
    }
    // a lone triangular constant becomes the single trailing upper letter
    if let [Letter::Const(g)] = out.as_slice() {
        if g[2] == 0 {
            out = vec![Letter::Upper {
                alpha: g[0],
                beta: g[3],
                a: Poly::constant(g[1]),
            }];
        }
    }
    out.retain(|l| *l != Letter::Const([1, 0, 0, 1]));
    if let Some(Letter::Upper { alpha: 1, beta: 1, a }) = out.last() {
        if a.is_zero() {
            out.pop();
        }
    }
    let w = AmalgamWord { letters: out };
    debug_assert!(w.check().is_ok(), "normal form alternates: {w:?}");
    w
}

fn upper_mul(x: &Letter, y: &Letter, k: &Field) -> Letter {
    let (Letter::Upper { alpha, beta, a }, Letter::Upper { alpha: al2, beta: be2, a: a2 }) = (x, y)
    else {
        unreachable!("upper letters only")
    };
    let r = PolyRing::new(k.clone());
    // L(al, be, a) L(al2, be2, a2) = L(al al2, be be2, al a2 + a be2)
    let a_new = r.add(&r.scale(*alpha, a2), &r.scale(*be2, a));
    let out = Letter::Upper {
        alpha: k.mul(*alpha, *al2),
        beta: k.mul(*beta, *be2),
        a: a_new,
    };
    match out {
        Letter::Upper { alpha, beta, a } if a.is_constant() => {
            Letter::Const([alpha, a.coeff(0), 0, beta])
        }
        other => other,
    }
}

fn push_merge(out: &mut Vec<Letter>, l: Letter, k: &Field) {
    let merged = match (out.last(), &l) {
        (Some(Letter::Const(x)), Letter::Const(y)) => Some(Letter::Const(const_mul(k, *x, *y))),
        (Some(x @ Letter::Upper { .. }), Letter::Upper { .. }) => Some(upper_mul(x, &l, k)),
        _ => None,
    };
    match merged {
        Some(m) => {
            out.pop();
            push_merge(out, m, k);
        }
        None => out.push(l),
    }
}
