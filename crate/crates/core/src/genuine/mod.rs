//! Verdicts on whether a non-congruence subgroup stays non-congruence under
//! every automorphism of the ambient group.

pub mod facts;
mod scan;

pub use facts::{facts_lookup, Ambient, FactQuery};
pub use scan::{low_index_scan, scan_corpus, ScanReport, ScanRow};

use crate::autos::{refute_genuineness, AutoSpec};
use crate::error::{Error, Result};
use crate::fingroup::{
    composition_factors, psl2_order, CompositionOptions, FactorDescriptor, FactorKind, FinGroup, Subgroup,
};
use crate::matrices::{Mat2, Mode};
use crate::subgroups::SubgroupHandle;

/// A named rule consulted by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Congruence,
    /// Normal, `GL`: coprime index and the diagonal torus inside.
    CoprimeIndexTorus,
    /// Normal, `GL`: coprime index and the scalars inside (`q` even or
    /// index above 2).
    CoprimeIndexScalars,
    /// Normal, `SL`: coprime index.
    CoprimeIndex,
    /// Normal, `GL`, `q > 3`: `n` not dividing `q - 1` and `|PSL_2(F_q)|`
    /// not dividing `n`.
    GlIndexMissesPsl2,
    /// Normal, `SL`, `q > 3`: `|PSL_2(F_q)|` not dividing `n`.
    SlIndexMissesPsl2,
    /// `SL`, `q > 3`: index below the minimal index of `SL_2(F_q)`.
    BelowMinIndex,
    /// A composition factor of `X / core` outside the `PSL_2` family.
    FactorCertificate,
    /// `SL`, `q > 3`: `q |PSL_2(F_q)|` must divide the normal index.
    SlDivisibleByQPsl2,
    /// `SL`, `q <= 3`: `q^2` must divide the normal index.
    SlDivisibleByQSquared,
    /// `GL`, `q > 3`: `q^4 - q^2` must divide the normal index.
    GlDivisibleByQPgl2,
    /// `GL`, `q <= 3`: `q^2` must divide the normal index.
    GlDivisibleByQSquared,
    /// `q` prime: genuine subgroups have index at least `2p`.
    PrimeFieldIndexBound,
    /// The quasi-level must have codimension at least 2.
    QuasiLevelCodim,
    /// An automorphism carrying the subgroup to a congruence subgroup.
    AutomorphismWitness,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Congruence => "is-congruence",
            Rule::CoprimeIndexTorus => "gl-coprime-index-torus",
            Rule::CoprimeIndexScalars => "gl-coprime-index-scalars",
            Rule::CoprimeIndex => "sl-coprime-index",
            Rule::GlIndexMissesPsl2 => "gl-index-misses-psl2",
            Rule::SlIndexMissesPsl2 => "sl-index-misses-psl2",
            Rule::BelowMinIndex => "sl-index-below-min-index",
            Rule::FactorCertificate => "composition-factor-outside-psl2-family",
            Rule::SlDivisibleByQPsl2 => "sl-normal-index-divisible-by-q-psl2",
            Rule::SlDivisibleByQSquared => "sl-normal-index-divisible-by-q-squared",
            Rule::GlDivisibleByQPgl2 => "gl-normal-index-divisible-by-q-pgl2",
            Rule::GlDivisibleByQSquared => "gl-normal-index-divisible-by-q-squared",
            Rule::PrimeFieldIndexBound => "prime-field-index-at-least-2p",
            Rule::QuasiLevelCodim => "quasi-level-codim-at-least-2",
            Rule::AutomorphismWitness => "automorphism-witness",
        }
    }
}

/// What happened when a rule was consulted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleRecord {
    pub rule: Rule,
    pub fired: bool,
    pub detail: String,
}

/// Index facts about a subgroup, the inputs of the quick criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Premises {
    pub mode: Mode,
    pub q: u32,
    pub index: u64,
    pub normal: bool,
    /// Whether the diagonal torus `k* x k*` lies in the subgroup.
    pub torus_inside: bool,
    /// Whether the scalar matrices lie in the subgroup.
    pub scalars_inside: bool,
}

impl Premises {
    pub fn of(h: &SubgroupHandle) -> Result<Self> {
        let k = h.field();
        let z = k.primitive();
        let torus_inside = h.mode() == Mode::GL
            && h.contains(&Mat2::diag(z, 1)?)?
            && h.contains(&Mat2::diag(1, z)?)?;
        let scalars_inside = h.mode() == Mode::GL && h.contains(&Mat2::diag(z, z)?)?;
        Ok(Premises {
            mode: h.mode(),
            q: k.q(),
            index: h.index(),
            normal: h.is_normal(),
            torus_inside,
            scalars_inside,
        })
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// The first index criterion for genuineness whose premises hold.
pub fn quick_criteria(p: &Premises) -> Option<Rule> {
    let n = p.index;
    let q = p.q as u64;
    if n <= 1 {
        return None;
    }
    let psl = psl2_order(q).expect("small q");
    match p.mode {
        Mode::GL => {
            if p.normal && gcd(n, q) == 1 {
                if p.torus_inside {
                    return Some(Rule::CoprimeIndexTorus);
                }
                if p.scalars_inside && (q % 2 == 0 || n > 2) {
                    return Some(Rule::CoprimeIndexScalars);
                }
            }
            if q > 3 && p.normal && (q - 1) % n != 0 && n % psl != 0 {
                return Some(Rule::GlIndexMissesPsl2);
            }
        }
        Mode::SL => {
            if p.normal && gcd(n, q) == 1 {
                return Some(Rule::CoprimeIndex);
            }
            if q > 3 && p.normal && n % psl != 0 {
                return Some(Rule::SlIndexMissesPsl2);
            }
            if q > 3 && n < facts::min_index_sl2(p.q) {
                return Some(Rule::BelowMinIndex);
            }
        }
    }
    None
}

/// A necessary divisibility condition for normal genuine subgroups that
/// `n` violates, with a detail string.
pub fn normal_divisibility(n: u64, q: u32, mode: Mode) -> Option<(Rule, String)> {
    if n <= 1 {
        return None;
    }
    let (rule, d) = divisibility_rule(mode, q);
    (n % d != 0).then(|| (rule, format!("{d} does not divide {n}")))
}

/// The divisibility filters. A non-normal subgroup is judged through its
/// core: if the core is not genuine, neither is the subgroup.
pub fn divisibility_filter(
    index: u64,
    core_index: u64,
    q: u32,
    mode: Mode,
    normal: bool,
) -> Option<(Rule, String)> {
    if normal {
        return normal_divisibility(index, q, mode);
    }
    if is_prime(q) && index < 2 * q as u64 {
        return Some((Rule::PrimeFieldIndexBound, format!("index {index} < {}", 2 * q)));
    }
    normal_divisibility(core_index, q, mode).map(|(r, d)| (r, format!("core: {d}")))
}

/// A composition factor of `parent / bottom` that is neither cyclic nor of
/// `PSL_2(F_{q^s})` order, and the full factor list.
pub fn certificate_from_quotient(
    g: &FinGroup,
    parent: &Subgroup,
    bottom: &Subgroup,
    q: u32,
    limit: u64,
) -> Result<Option<(FactorDescriptor, Vec<FactorDescriptor>)>> {
    let opts = CompositionOptions { q: Some(q), shuffle_seed: None };
    let factors = composition_factors(g, parent, bottom, opts, limit)?;
    let bad = factors.iter().find(|f| f.kind == FactorKind::OtherSimple).copied();
    Ok(bad.map(|b| (b, factors)))
}

/// [`certificate_from_quotient`] for `X / core(H)`.
pub fn factor_certificate(h: &SubgroupHandle) -> Result<Option<(FactorDescriptor, Vec<FactorDescriptor>)>> {
    if !h.is_proper() {
        return Ok(None);
    }
    let tgt = h.homspec().target();
    certificate_from_quotient(tgt, h.image(), h.core_image(), h.field().q(), h.caps().group_limit())
}

/// The index-only stages of [`verdict`] on bare premises: `Some((false, r))`
/// when a divisibility filter `r` rules genuineness out, `Some((true, r))`
/// when an index criterion `r` certifies it, `None` otherwise. A criterion
/// whose premises meet a firing filter describes no actual subgroup and is
/// not consulted.
pub fn premise_decision(p: &Premises, core_index: u64) -> Option<(bool, Rule)> {
    if let Some((f, _)) = divisibility_filter(p.index, core_index, p.q, p.mode, p.normal) {
        return Some((false, f));
    }
    quick_criteria(p).map(|c| (true, c))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// An index criterion with the premises it was evaluated on.
    Criterion { rule: Rule, premises: Premises },
    /// A composition factor outside the `PSL_2` family.
    Factors { witness: FactorDescriptor, factors: Vec<FactorDescriptor> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    Rule { rule: Rule, detail: String },
    Witness(AutoSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Genuine(Certificate),
    NotGenuine(Reason),
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub provenance: Vec<RuleRecord>,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self.outcome {
            Outcome::Genuine(_) => "genuine",
            Outcome::NotGenuine(_) => "not-genuine",
            Outcome::Unknown => "unknown",
        }
    }
}

/// Recomputes a certificate from the handle.
pub fn check_certificate(h: &SubgroupHandle, cert: &Certificate) -> Result<bool> {
    match cert {
        Certificate::Criterion { rule, premises } => {
            let now = Premises::of(h)?;
            Ok(&now == premises && quick_criteria(&now) == Some(*rule))
        }
        Certificate::Factors { witness, factors } => Ok(match factor_certificate(h)? {
            Some((w, f)) => &w == witness && &f == factors,
            None => false,
        }),
    }
}

/// The verdict pipeline: congruence, divisibility filters, quasi-level
/// codimension, index criteria, factor certificate, automorphism search.
pub fn verdict(h: &SubgroupHandle, budget: usize) -> Result<Verdict> {
    if !h.is_proper() {
        return Err(Error::Precondition("the subgroup must be proper".into()));
    }
    let mut prov = Vec::new();
    let mut record = |rule: Rule, fired: bool, detail: String| {
        prov.push(RuleRecord { rule, fired, detail });
    };
    if h.is_congruence()? {
        record(Rule::Congruence, true, String::new());
        return Ok(Verdict {
            outcome: Outcome::NotGenuine(Reason::Rule { rule: Rule::Congruence, detail: String::new() }),
            provenance: prov,
        });
    }
    record(Rule::Congruence, false, String::new());

    let q = h.field().q();
    let mut against: Option<Reason> = None;
    let div = divisibility_filter(h.index(), h.core_index(), q, h.mode(), h.is_normal());
    match &div {
        Some((rule, detail)) => {
            record(*rule, true, detail.clone());
            against = Some(Reason::Rule { rule: *rule, detail: detail.clone() });
        }
        None => record(divisibility_rule(h.mode(), q).0, false, String::new()),
    }
    let ql = h.quasi_level()?;
    let low = ql.codim() <= 1;
    let detail = format!("codim {}", ql.codim());
    record(Rule::QuasiLevelCodim, low, detail.clone());
    if low && against.is_none() {
        against = Some(Reason::Rule { rule: Rule::QuasiLevelCodim, detail });
    }

    let premises = Premises::of(h)?;
    let mut cert = quick_criteria(&premises).map(|rule| Certificate::Criterion { rule, premises });
    match &cert {
        Some(Certificate::Criterion { rule, .. }) => record(*rule, true, String::new()),
        _ => {
            let first = if h.mode() == Mode::SL { Rule::CoprimeIndex } else { Rule::CoprimeIndexTorus };
            record(first, false, "no index criterion applies".into());
        }
    }
    if cert.is_none() {
        let fc = factor_certificate(h)?;
        record(
            Rule::FactorCertificate,
            fc.is_some(),
            fc.as_ref().map_or(String::new(), |(w, _)| format!("factor of order {}", w.order)),
        );
        cert = fc.map(|(witness, factors)| Certificate::Factors { witness, factors });
    }

    match (cert, against) {
        (Some(c), Some(r)) => Err(Error::Inconsistent(format!(
            "certificate {c:?} contradicts {r:?}"
        ))),
        (Some(c), None) => Ok(Verdict { outcome: Outcome::Genuine(c), provenance: prov }),
        (None, Some(r)) => Ok(Verdict { outcome: Outcome::NotGenuine(r), provenance: prov }),
        (None, None) => {
            let w = refute_genuineness(h, budget)?;
            record(Rule::AutomorphismWitness, w.is_some(), String::new());
            Ok(Verdict {
                outcome: match w {
                    Some(a) => Outcome::NotGenuine(Reason::Witness(a)),
                    None => Outcome::Unknown,
                },
                provenance: prov,
            })
        }
    }
}

/// The divisibility rule that applies to the mode and field.
fn divisibility_rule(mode: Mode, q: u32) -> (Rule, u64) {
    let qq = q as u64;
    match (mode, q > 3) {
        (Mode::SL, true) => (Rule::SlDivisibleByQPsl2, qq * psl2_order(qq).expect("small q")),
        (Mode::SL, false) => (Rule::SlDivisibleByQSquared, qq * qq),
        (Mode::GL, true) => (Rule::GlDivisibleByQPgl2, qq.pow(4) - qq * qq),
        (Mode::GL, false) => (Rule::GlDivisibleByQSquared, qq * qq),
    }
}
