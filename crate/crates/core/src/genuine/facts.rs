//! Reference facts about `SL_2(F_q)` and the groups `GL_2(A)`, `SL_2(A)`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fingroup::psl2_order;

/// The ambient group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    /// `GL_2(A)`.
    G,
    /// `SL_2(A)`.
    Gamma,
}

/// Smallest index of a proper subgroup of `SL_2(F_q)` (Galois).
pub fn min_index_sl2(q: u32) -> u64 {
    match q {
        4 | 8 => q as u64 + 1,
        9 => 6,
        q if q > 11 => q as u64 + 1,
        q => q as u64,
    }
}

/// Whether the quotient graph of the ambient group for genus `g` and
/// degree `delta` at infinity is a tree with trivial rank.
pub fn rank_zero(ambient: Ambient, g: u32, delta: u32, q: u32) -> bool {
    match ambient {
        Ambient::G => matches!((g, delta), (1, 1) | (0, 1) | (0, 2) | (0, 3)),
        Ambient::Gamma => {
            matches!((g, delta), (0, 1) | (0, 2))
                || (q % 2 == 0 && matches!((g, delta), (0, 3) | (1, 1)))
        }
    }
}

/// The least `n >= 0` with `delta n >= 2g - 1`.
pub fn n0(g: u32, delta: u32) -> Result<u32> {
    if delta == 0 {
        return Err(Error::Precondition("delta must be positive".into()));
    }
    let need = (2 * g as i64 - 1).max(0);
    Ok(((need + delta as i64 - 1) / delta as i64) as u32)
}

/// `dim_k A(n0) = n0 delta + 1 - g`.
pub fn dim_a_n0(g: u32, delta: u32) -> Result<i64> {
    Ok(n0(g, delta)? as i64 * delta as i64 + 1 - g as i64)
}

/// Minimal index of a normal non-congruence subgroup of `SL_2(F_q[t])`.
pub fn nncs_gamma(q: u32) -> u64 {
    if q <= 3 {
        q as u64
    } else {
        psl2_order(q as u64).expect("small q")
    }
}

/// Minimal index of a non-congruence subgroup for `q = 2`, any `A`.
pub fn ncs_q2() -> u64 {
    2
}

/// Parameters of a lookup; unused ones are ignored.
#[derive(Debug, Clone, Copy, Default)]
pub struct FactQuery {
    pub q: Option<u32>,
    pub g: Option<u32>,
    pub delta: Option<u32>,
    pub ambient: Option<Ambient>,
}

pub const FACT_KEYS: &[&str] = &["m_sl2", "rank_zero", "n0", "dim_a_n0", "nncs", "ncs"];

fn need<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::Precondition(format!("this fact needs `{what}`")))
}

/// Looks up a fact by key.
pub fn facts_lookup(key: &str, query: FactQuery) -> Result<Value> {
    match key {
        "m_sl2" => {
            let q = need(query.q, "q")?;
            Ok(json!(min_index_sl2(q)))
        }
        "rank_zero" => {
            let amb = query.ambient.unwrap_or(Ambient::G);
            let q = if amb == Ambient::Gamma { need(query.q, "q")? } else { query.q.unwrap_or(2) };
            Ok(json!(rank_zero(amb, need(query.g, "g")?, need(query.delta, "delta")?, q)))
        }
        "n0" => Ok(json!(n0(need(query.g, "g")?, need(query.delta, "delta")?)?)),
        "dim_a_n0" => Ok(json!(dim_a_n0(need(query.g, "g")?, need(query.delta, "delta")?)?)),
        "nncs" => {
            let q = need(query.q, "q")?;
            if query.ambient == Some(Ambient::G) {
                return Err(Error::Precondition("nncs is recorded for SL_2(F_q[t]) only".into()));
            }
            Ok(json!(nncs_gamma(q)))
        }
        "ncs" => match query.q {
            Some(2) | None => Ok(json!(ncs_q2())),
            Some(_) => Err(Error::Precondition("ncs is recorded for q = 2 only".into())),
        },
        other => Err(Error::UnknownFact(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn galois_minimal_indices() {
        let table = [(2, 2), (3, 3), (4, 5), (5, 5), (7, 7), (8, 9), (9, 6), (11, 11), (13, 14), (16, 17)];
        for (q, m) in table {
            assert_eq!(min_index_sl2(q), m, "q = {q}");
        }
    }

    #[test]
    fn rank_zero_and_n0() {
        assert!(rank_zero(Ambient::G, 0, 1, 3));
        assert!(rank_zero(Ambient::G, 1, 1, 3));
        assert!(!rank_zero(Ambient::G, 0, 4, 3));
        assert!(!rank_zero(Ambient::Gamma, 1, 1, 3));
        assert!(rank_zero(Ambient::Gamma, 1, 1, 4));
        assert_eq!(n0(0, 1).unwrap(), 0);
        assert_eq!(dim_a_n0(0, 1).unwrap(), 1);
        assert_eq!(n0(1, 1).unwrap(), 1);
        assert_eq!(dim_a_n0(1, 1).unwrap(), 1);
        assert_eq!(n0(2, 2).unwrap(), 2);
    }

    #[test]
    fn lookups() {
        let q9 = FactQuery { q: Some(9), ..Default::default() };
        assert_eq!(facts_lookup("m_sl2", q9).unwrap(), json!(6));
        assert_eq!(facts_lookup("nncs", FactQuery { q: Some(5), ..Default::default() }).unwrap(), json!(60));
        assert_eq!(facts_lookup("nncs", FactQuery { q: Some(3), ..Default::default() }).unwrap(), json!(3));
        let rz = FactQuery { g: Some(0), delta: Some(1), ..Default::default() };
        assert_eq!(facts_lookup("rank_zero", rz).unwrap(), json!(true));
        assert!(matches!(facts_lookup("bogus", FactQuery::default()), Err(Error::UnknownFact(_))));
    }
}
