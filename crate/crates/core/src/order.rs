//! Finite posets and their domain-theoretic topologies, decided by
//! exhaustive subset enumeration, plus the bridge from event samples to
//! the interval/Alexandrov/Lawson statements.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::events::{CausalStructure, EventSet};
use crate::relation::Relation;

/// Default cap on the carrier size for subset enumeration.
pub const SUBSET_CAP: usize = 16;
/// Hard limit: masks are `u64` and `2^N` subsets must stay enumerable.
pub const SUBSET_HARD_LIMIT: usize = 24;
/// Default cap on samples passed to [`causal_bridge_checks`].
pub const BRIDGE_CAP: usize = 300;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    order: Relation,
}

/// Validate reflexivity, antisymmetry and transitivity.
pub fn make_poset(order: Relation) -> Result<FinitePoset> {
    let n = order.size();
    let mut problems = Vec::new();
    let missing: Vec<usize> = (0..n).filter(|&i| !order.get(i, i)).collect();
    if !missing.is_empty() {
        problems.push(format!("not reflexive at {missing:?}"));
    }
    let sym = order.antisymmetry_witnesses();
    if !sym.is_empty() {
        problems.push(format!("not antisymmetric: {sym:?}"));
    }
    let trans = order.transitivity_witnesses();
    if !trans.is_empty() {
        problems.push(format!("not transitive, missing {trans:?}"));
    }
    if problems.is_empty() {
        Ok(FinitePoset { order })
    } else {
        Err(Error::Input(format!("not a partial order: {}", problems.join("; "))))
    }
}

impl FinitePoset {
    pub fn chain(n: usize) -> Self {
        FinitePoset {
            order: Relation::from_fn(n, |i, j| i <= j),
        }
    }

    pub fn antichain(n: usize) -> Self {
        FinitePoset {
            order: Relation::identity(n),
        }
    }

    pub fn size(&self) -> usize {
        self.order.size()
    }

    pub fn order(&self) -> &Relation {
        &self.order
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.order.get(a, b)
    }

    fn check_set(&self, s: &[usize]) -> Result<()> {
        match s.iter().find(|&&x| x >= self.size()) {
            Some(x) => Err(Error::Input(format!("element {x} out of range for size {}", self.size()))),
            None => Ok(()),
        }
    }

    /// Every pair of `s` has an upper bound in `s`.
    pub fn is_directed(&self, s: &[usize]) -> Result<bool> {
        self.check_set(s)?;
        if s.is_empty() {
            return Err(Error::Input("directedness needs a nonempty set".into()));
        }
        Ok(s.iter()
            .all(|&x| s.iter().all(|&y| s.iter().any(|&z| self.leq(x, z) && self.leq(y, z)))))
    }

    pub fn is_filtered(&self, s: &[usize]) -> Result<bool> {
        self.check_set(s)?;
        if s.is_empty() {
            return Err(Error::Input("filteredness needs a nonempty set".into()));
        }
        Ok(s.iter()
            .all(|&x| s.iter().all(|&y| s.iter().any(|&z| self.leq(z, x) && self.leq(z, y)))))
    }

    pub fn supremum(&self, s: &[usize]) -> Result<Option<usize>> {
        self.check_set(s)?;
        let upper: Vec<usize> = (0..self.size()).filter(|&u| s.iter().all(|&x| self.leq(x, u))).collect();
        Ok(upper.iter().copied().find(|&u| upper.iter().all(|&v| self.leq(u, v))))
    }

    pub fn infimum(&self, s: &[usize]) -> Result<Option<usize>> {
        self.check_set(s)?;
        let lower: Vec<usize> = (0..self.size()).filter(|&l| s.iter().all(|&x| self.leq(l, x))).collect();
        Ok(lower.iter().copied().find(|&l| lower.iter().all(|&v| self.leq(v, l))))
    }

    fn masks(&self, cap: usize) -> Result<Masks> {
        let n = self.size();
        let cap = cap.min(SUBSET_HARD_LIMIT);
        if n > cap {
            return Err(Error::Capacity {
                what: "poset size for subset enumeration".into(),
                requested: n,
                cap,
            });
        }
        let up = (0..n)
            .map(|x| (0..n).filter(|&y| self.leq(x, y)).fold(0u64, |m, y| m | 1 << y))
            .collect();
        let down = (0..n)
            .map(|x| (0..n).filter(|&y| self.leq(y, x)).fold(0u64, |m, y| m | 1 << y))
            .collect();
        Ok(Masks { n, up, down })
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

fn to_set(mask: u64) -> Vec<usize> {
    bits(mask).collect()
}

fn to_mask(s: &[usize]) -> u64 {
    s.iter().fold(0, |m, &i| m | 1 << i)
}

/// Up/down sets as bit masks, for carriers of at most 64 points.
struct Masks {
    n: usize,
    up: Vec<u64>,
    down: Vec<u64>,
}

impl Masks {
    fn all(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    fn directed(&self, s: u64) -> bool {
        s != 0 && bits(s).all(|x| bits(s).all(|y| self.up[x] & self.up[y] & s != 0))
    }

    fn filtered(&self, s: u64) -> bool {
        s != 0 && bits(s).all(|x| bits(s).all(|y| self.down[x] & self.down[y] & s != 0))
    }

    fn sup(&self, s: u64) -> Option<usize> {
        let ub = bits(s).fold(self.all(), |m, x| m & self.up[x]);
        bits(ub).find(|&u| ub & !self.up[u] == 0)
    }

    fn inf(&self, s: u64) -> Option<usize> {
        let lb = bits(s).fold(self.all(), |m, x| m & self.down[x]);
        bits(lb).find(|&l| lb & !self.down[l] == 0)
    }

    /// All directed subsets together with their suprema (if any).
    fn directed_sets(&self) -> Vec<(u64, Option<usize>)> {
        (1..=self.all())
            .filter(|&s| self.directed(s))
            .map(|s| (s, self.sup(s)))
            .collect()
    }

    fn filtered_sets(&self) -> Vec<(u64, Option<usize>)> {
        (1..=self.all())
            .filter(|&s| self.filtered(s))
            .map(|s| (s, self.inf(s)))
            .collect()
    }

    /// `x << y`: every directed `S` whose supremum dominates `y` meets `up(x)`.
    fn way_below(&self, directed: &[(u64, Option<usize>)]) -> Relation {
        Relation::from_fn(self.n, |x, y| {
            directed.iter().all(|&(s, sup)| match sup {
                Some(d) if self.up[y] >> d & 1 == 1 => s & self.up[x] != 0,
                _ => true,
            })
        })
    }

    /// Order dual: every filtered `S` whose infimum is below `x` meets `down(y)`.
    fn dual_way_below(&self, filtered: &[(u64, Option<usize>)]) -> Relation {
        Relation::from_fn(self.n, |x, y| {
            filtered.iter().all(|&(s, inf)| match inf {
                Some(m) if self.up[m] >> x & 1 == 1 => s & self.down[y] != 0,
                _ => true,
            })
        })
    }
}

/// `P` is a dcpo iff every directed subset has a supremum.
pub fn is_dcpo(p: &FinitePoset, cap: usize) -> Result<bool> {
    let m = p.masks(cap)?;
    Ok(m.directed_sets().iter().all(|(_, sup)| sup.is_some()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WayBelow {
    pub relation: Relation,
    /// Elements with `x << x`.
    pub compact: Vec<usize>,
}

pub fn way_below(p: &FinitePoset, cap: usize) -> Result<WayBelow> {
    let m = p.masks(cap)?;
    let relation = m.way_below(&m.directed_sets());
    let compact = (0..p.size()).filter(|&x| relation.get(x, x)).collect();
    Ok(WayBelow { relation, compact })
}

/// Upper set, and inaccessible by directed suprema.
pub fn is_scott_open(p: &FinitePoset, u: &[usize], cap: usize) -> Result<bool> {
    p.check_set(u)?;
    let m = p.masks(cap)?;
    let um = to_mask(u);
    if bits(um).any(|x| m.up[x] & !um != 0) {
        return Ok(false);
    }
    Ok(m
        .directed_sets()
        .iter()
        .all(|&(s, sup)| !sup.is_some_and(|d| um >> d & 1 == 1) || s & um != 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Scott,
    Lawson,
    Interval,
    Alexandrov,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologyBasis {
    pub kind: BasisKind,
    pub sets: Vec<Vec<usize>>,
}

fn canonical(mut sets: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for s in sets.iter_mut() {
        s.sort_unstable();
    }
    sets.sort();
    sets.dedup();
    sets
}

/// Subsets of `0..n` of size at most `k`, as masks.
fn small_subsets(n: usize, k: usize) -> Vec<u64> {
    let mut out = vec![0u64];
    let mut frontier = vec![(0u64, 0usize)];
    for _ in 0..k {
        let mut next = Vec::new();
        for &(m, start) in &frontier {
            for i in start..n {
                next.push((m | 1 << i, i + 1));
            }
        }
        out.extend(next.iter().map(|e| e.0));
        frontier = next;
    }
    out
}

/// Basis of the Scott (`⇑x`), Lawson (`⇑x \ ↑F`, `|F| <= f_max`),
/// interval (`{z : a << z << b}`) or Alexandrov (`{z : a < z < b}`,
/// strict order) topology, as sorted, deduplicated index sets.
pub fn basis_sets(p: &FinitePoset, kind: BasisKind, f_max: usize, cap: usize) -> Result<TopologyBasis> {
    let m = p.masks(cap)?;
    let wb = m.way_below(&m.directed_sets());
    let n = p.size();
    let wb_up: Vec<u64> = (0..n).map(|x| (0..n).filter(|&y| wb.get(x, y)).fold(0, |a, y| a | 1 << y)).collect();
    let wb_down: Vec<u64> = (0..n).map(|x| (0..n).filter(|&y| wb.get(y, x)).fold(0, |a, y| a | 1 << y)).collect();
    let sets: Vec<u64> = match kind {
        BasisKind::Scott => wb_up.clone(),
        BasisKind::Lawson => {
            let fs = small_subsets(n, f_max);
            let mut out = Vec::new();
            for x in 0..n {
                for &f in &fs {
                    let upf = bits(f).fold(0, |a, y| a | m.up[y]);
                    out.push(wb_up[x] & !upf);
                }
            }
            out
        }
        BasisKind::Interval => (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| wb_up[a] & wb_down[b])
            .collect(),
        BasisKind::Alexandrov => (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| (m.up[a] & !(1 << a)) & (m.down[b] & !(1 << b)))
            .collect(),
    };
    Ok(TopologyBasis {
        kind,
        sets: canonical(sets.into_iter().map(to_set).collect()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bicontinuity {
    /// Each `⇓x` contains a directed set with supremum `x`.
    pub continuous: bool,
    /// `<<` agrees with its filtered/infimum characterization.
    pub dual_way_below: bool,
    /// Each `⇑x` is filtered with infimum `x`.
    pub up_filtered: bool,
    pub bicontinuous: bool,
}

pub fn bicontinuity(p: &FinitePoset, cap: usize) -> Result<Bicontinuity> {
    let m = p.masks(cap)?;
    let directed = m.directed_sets();
    let wb = m.way_below(&directed);
    let n = p.size();
    let wb_down = |x: usize| (0..n).filter(|&y| wb.get(y, x)).fold(0u64, |a, y| a | 1 << y);
    let wb_up = |x: usize| (0..n).filter(|&y| wb.get(x, y)).fold(0u64, |a, y| a | 1 << y);
    let continuous = (0..n).all(|x| {
        let dx = wb_down(x);
        directed.iter().any(|&(s, sup)| s & !dx == 0 && sup == Some(x))
    });
    let dual_way_below = m.dual_way_below(&m.filtered_sets()) == wb;
    let up_filtered = (0..n).all(|x| {
        let ux = wb_up(x);
        m.filtered(ux) && m.inf(ux) == Some(x)
    });
    Ok(Bicontinuity {
        continuous,
        dual_way_below,
        up_filtered,
        bicontinuous: continuous && dual_way_below && up_filtered,
    })
}

pub fn is_bicontinuous(p: &FinitePoset, cap: usize) -> Result<bool> {
    Ok(bicontinuity(p, cap)?.bicontinuous)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgeViolation {
    pub at: Vec<usize>,
    pub set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgeCheck {
    pub pass: bool,
    pub checked: usize,
    pub violation_count: usize,
    pub violations: Vec<BridgeViolation>,
}

impl BridgeCheck {
    fn from(checked: usize, mut violations: Vec<BridgeViolation>) -> Self {
        let violation_count = violations.len();
        violations.truncate(crate::events::WITNESS_LIMIT);
        BridgeCheck {
            pass: violation_count == 0,
            checked,
            violation_count,
            violations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgeReport {
    pub size: usize,
    /// Whether `K+` is a partial order on the sample (fails on cylinders).
    pub poset_valid: bool,
    /// (a) `{z : a << z << b}` from the relation equals `I+(a) ∩ I-(b)`
    /// recomputed from coordinates, for all pairs.
    pub interval_equals_alexandrov: BridgeCheck,
    /// (b) `I+ ⊆ K+`.
    pub chronological_in_k: BridgeCheck,
    /// (c) each `⇑x \ ↑F` is a union of Alexandrov diamonds of the sample.
    pub lawson_in_interval: BridgeCheck,
    pub notes: Vec<&'static str>,
}

/// The §-4 bridge statements on an event sample; `<<` is the chronological
/// relation, `⊑` is `K+`.
pub fn causal_bridge_checks(e: &EventSet, f_max: usize, cap: usize) -> Result<BridgeReport> {
    if e.len() > cap {
        return Err(Error::Capacity {
            what: "events for bridge checks".into(),
            requested: e.len(),
            cap,
        });
    }
    let s = CausalStructure::new(e);
    let n = e.len();
    let ev = e.events();
    let chrono = &s.chronological;
    let k = &s.k_closed;
    let chrono_t = chrono.transpose();

    let mut a_viol = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let words: Vec<u64> = chrono.row(a).iter().zip(chrono_t.row(b)).map(|(x, y)| x & y).collect();
            let from_order = Relation::members(&words);
            let geometric: Vec<usize> = (0..n)
                .filter(|&z| e.precedes_chronologically(&ev[a], &ev[z]) && e.precedes_chronologically(&ev[z], &ev[b]))
                .collect();
            if from_order != geometric {
                a_viol.push(BridgeViolation {
                    at: vec![a, b],
                    set: geometric,
                });
            }
        }
    }

    let b_viol: Vec<BridgeViolation> = chrono
        .pairs()
        .into_iter()
        .filter(|&(i, j)| !k.get(i, j))
        .map(|(i, j)| BridgeViolation {
            at: vec![i, j],
            set: Vec::new(),
        })
        .collect();

    let diamonds = s.diamond_neighbourhoods();
    let mut c_viol = Vec::new();
    let mut c_checked = 0;
    let subsets = small_index_subsets(n, f_max);
    for x in 0..n {
        for f in &subsets {
            let mut lawson: Vec<u64> = chrono.row(x).to_vec();
            for &y in f {
                for (w, kw) in lawson.iter_mut().zip(k.row(y)) {
                    *w &= !kw;
                }
            }
            c_checked += 1;
            for z in Relation::members(&lawson) {
                let inside = diamonds.row(z).iter().zip(&lawson).all(|(d, l)| d & !l == 0);
                if !inside {
                    let mut at = vec![x];
                    at.extend(f);
                    at.push(z);
                    c_viol.push(BridgeViolation {
                        at,
                        set: Relation::members(&lawson),
                    });
                }
            }
        }
    }

    Ok(BridgeReport {
        size: n,
        poset_valid: k.is_partial_order().0,
        interval_equals_alexandrov: BridgeCheck::from(n * n, a_viol),
        chronological_in_k: BridgeCheck::from(chrono.count(), b_viol),
        lawson_in_interval: BridgeCheck::from(c_checked, c_viol),
        notes: vec![
            "<< on events is the chronological relation, not the (degenerate) way-below of the finite poset",
            "check (c) is a containment proxy: every point of a Lawson basis set has an Alexandrov diamond inside it",
        ],
    })
}

fn small_index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for f in &frontier {
            let start = f.last().map_or(0, |&l| l + 1);
            for i in start..n {
                let mut g = f.clone();
                g.push(i);
                next.push(g);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v_shape() -> FinitePoset {
        // 0, 1 minimal below the top 2.
        make_poset(Relation::from_pairs(3, &[(0, 0), (1, 1), (2, 2), (0, 2), (1, 2)]).unwrap()).unwrap()
    }

    #[test]
    fn make_poset_examples() {
        assert!(make_poset(Relation::identity(5)).is_ok());
        let err = make_poset(Relation::from_pairs(3, &[(0, 0), (1, 1), (2, 2), (1, 2), (2, 1)]).unwrap());
        assert!(matches!(err, Err(Error::Input(ref m)) if m.contains("(1, 2)")));
    }

    #[test]
    fn directed_sup_inf() {
        let c = FinitePoset::chain(4);
        assert!(c.is_directed(&[0, 1, 2, 3]).unwrap());
        assert_eq!(c.supremum(&[0, 1, 2, 3]).unwrap(), Some(3));
        assert_eq!(c.supremum(&[2]).unwrap(), Some(2));
        let a = FinitePoset::antichain(2);
        assert!(!a.is_directed(&[0, 1]).unwrap());
        assert_eq!(a.supremum(&[0, 1]).unwrap(), None);
        assert_eq!(v_shape().supremum(&[0, 1]).unwrap(), Some(2));
        assert_eq!(v_shape().infimum(&[0, 1]).unwrap(), None);
        assert!(a.is_directed(&[]).is_err());
    }

    #[test]
    fn dcpo_and_way_below() {
        assert!(is_dcpo(&FinitePoset::antichain(4), SUBSET_CAP).unwrap());
        assert!(is_dcpo(&FinitePoset::chain(1), SUBSET_CAP).unwrap());
        let wb = way_below(&FinitePoset::chain(2), SUBSET_CAP).unwrap();
        assert_eq!(wb.relation, FinitePoset::chain(2).order().clone());
        assert_eq!(wb.compact, vec![0, 1]);
        assert_eq!(way_below(&FinitePoset::antichain(3), SUBSET_CAP).unwrap().relation, Relation::identity(3));
        assert!(matches!(
            way_below(&FinitePoset::chain(17), SUBSET_CAP),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn scott_open_examples() {
        let c = FinitePoset::chain(3);
        assert!(is_scott_open(&c, &[], SUBSET_CAP).unwrap());
        assert!(is_scott_open(&c, &[2], SUBSET_CAP).unwrap());
        assert!(!is_scott_open(&c, &[0, 1], SUBSET_CAP).unwrap());
    }

    #[test]
    fn basis_examples() {
        let c = FinitePoset::chain(2);
        let s = basis_sets(&c, BasisKind::Scott, 0, SUBSET_CAP).unwrap();
        assert_eq!(s.sets, vec![vec![0, 1], vec![1]]);
        let l = basis_sets(&c, BasisKind::Lawson, 0, SUBSET_CAP).unwrap();
        assert_eq!(l.sets, s.sets);
        let ia = basis_sets(&FinitePoset::antichain(3), BasisKind::Interval, 0, SUBSET_CAP).unwrap();
        assert_eq!(ia.sets, vec![vec![], vec![0], vec![1], vec![2]]);
        let al = basis_sets(&FinitePoset::chain(3), BasisKind::Alexandrov, 0, SUBSET_CAP).unwrap();
        assert_eq!(al.sets, vec![vec![], vec![1]]);
    }

    #[test]
    fn bicontinuity_examples() {
        assert!(is_bicontinuous(&FinitePoset::chain(5), SUBSET_CAP).unwrap());
        assert!(is_bicontinuous(&FinitePoset::chain(1), SUBSET_CAP).unwrap());
        // Regression fixture fixed from the enumeration oracle.
        assert_eq!(
            bicontinuity(&v_shape(), SUBSET_CAP).unwrap(),
            Bicontinuity {
                continuous: true,
                dual_way_below: true,
                up_filtered: true,
                bicontinuous: true
            }
        );
    }

    #[test]
    fn small_subset_counts() {
        assert_eq!(small_subsets(4, 2).len(), 1 + 4 + 6);
        assert_eq!(small_index_subsets(4, 2).len(), 1 + 4 + 6);
    }
}
