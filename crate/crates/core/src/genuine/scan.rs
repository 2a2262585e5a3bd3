//! Exhaustive verdicts over small representable subgroups.

use std::collections::{BTreeMap, HashSet};

use super::{verdict, Outcome, Verdict};
use crate::algebra::{Field, Poly, PolyRing, Subspace};
use crate::config::Caps;
use crate::error::Result;
use crate::fingroup::{self, Subgroup};
use crate::matrices::{MatGroup, Mode};
use crate::subgroups::{QuasiLevel, SubgroupHandle};

#[derive(Debug, Clone)]
pub struct ScanRow {
    pub index: u64,
    pub normal: bool,
    pub congruence: bool,
    /// How the subgroup was built.
    pub description: String,
    pub verdict: Verdict,
}

/// Minima over the scanned class; genuine minima are lower bounds within the
/// class only.
#[derive(Debug, Clone, Default)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub min_noncongruence: Option<u64>,
    pub min_normal_noncongruence: Option<u64>,
    pub min_genuine_in_class: Option<u64>,
    pub min_normal_genuine_in_class: Option<u64>,
    /// Row counts per index.
    pub by_index: BTreeMap<u64, usize>,
}

/// Largest congruence quotient whose normal subgroups are scanned.
const SCAN_QUOTIENT_CAP: u64 = 4096;

fn min_opt(slot: &mut Option<u64>, v: u64) {
    *slot = Some(slot.map_or(v, |s| s.min(v)));
}

/// The handles a scan judges: the abelian-quotient subgroups `N(W)` (`SL`,
/// `q <= 3`) for every `W` of codimension at most 2 modulo `conductor`, and
/// the congruence subgroups built from normal closures in `SL_2(A/f)` (or
/// `GL_2`) for monic `f` of degree at most `deg conductor`, of index at most
/// `max_index`.
pub fn scan_corpus(
    k: &Field,
    mode: Mode,
    max_index: u64,
    conductor: &Poly,
    caps: Caps,
) -> Result<Vec<(String, SubgroupHandle)>> {
    let r = PolyRing::new(k.clone());
    let conductor = r.monic(conductor);
    let len = conductor.degree_or_zero();
    let mut handles: Vec<(String, SubgroupHandle)> = Vec::new();
    if mode == Mode::SL && k.q() <= 3 {
        let mut seen: Vec<QuasiLevel> = Vec::new();
        for codim in 1..=2usize.min(len) {
            if (k.q() as u64).pow(codim as u32) > max_index {
                break;
            }
            for w in Subspace::enumerate_all(k, len, len - codim) {
                let ql = QuasiLevel::from_subspace(conductor.clone(), w);
                if seen.contains(&ql) {
                    continue;
                }
                let (basis, c) = ql.describe();
                seen.push(ql.clone());
                let h = SubgroupHandle::from_quasilevel_abelian(&ql, caps)?;
                handles.push((format!("abelian W=[{}]+({c})", basis.join(",")), h));
            }
        }
    }
    for d in 1..=len {
        for f in r.monics_of_degree(d) {
            if MatGroup::of(k, &f, mode)?.order() > SCAN_QUOTIENT_CAP {
                continue;
            }
            let g = SubgroupHandle::principal_congruence(k, &f, mode, caps)?;
            let tgt = g.homspec().target().clone();
            let image = g.image().clone();
            // normal subgroups of the finite quotient generated by one class
            let mut us: Vec<Subgroup> = Vec::new();
            let mut classified: HashSet<u64> = HashSet::new();
            for &x in image.elements() {
                if !classified.insert(x) {
                    continue;
                }
                classified.extend(fingroup::conjugacy_class(&tgt, &image, x));
                let n = fingroup::normal_closure(&tgt, &image, &[x], caps.group_limit())?;
                let idx = n.index_in(&image);
                if idx > 1 && idx <= max_index && !us.iter().any(|u| u.elements() == n.elements()) {
                    us.push(n);
                }
            }
            let fd = f.to_digits(k);
            for u in us {
                let h = SubgroupHandle::with_subgroup(g.homspec().clone(), u, caps)?;
                handles.push((format!("congruence mod {fd}"), h));
            }
        }
    }
    handles.retain(|(_, h)| h.index() > 1 && h.index() <= max_index);
    Ok(handles)
}

/// Verdicts over [`scan_corpus`], sorted by index and description.
pub fn low_index_scan(
    k: &Field,
    mode: Mode,
    max_index: u64,
    conductor: &Poly,
    caps: Caps,
    budget: usize,
) -> Result<ScanReport> {
    let handles = scan_corpus(k, mode, max_index, conductor, caps)?;
    let mut report = ScanReport::default();
    for (description, h) in handles {
        let index = h.index();
        let v = verdict(&h, budget)?;
        let congruence = h.is_congruence()?;
        let normal = h.is_normal();
        if !congruence {
            min_opt(&mut report.min_noncongruence, index);
            if normal {
                min_opt(&mut report.min_normal_noncongruence, index);
            }
        }
        if matches!(v.outcome, Outcome::Genuine(_)) {
            min_opt(&mut report.min_genuine_in_class, index);
            if normal {
                min_opt(&mut report.min_normal_genuine_in_class, index);
            }
        }
        *report.by_index.entry(index).or_default() += 1;
        report.rows.push(ScanRow { index, normal, congruence, description, verdict: v });
    }
    report
        .rows
        .sort_by(|a, b| (a.index, &a.description).cmp(&(b.index, &b.description)));
    Ok(report)
}
