//! Finite event samples of Minkowski space (optionally with time
//! identified periodically, the standard closed-timelike-curve fixture) and
//! the relations `I+`, `J+`, `K+` computed from them.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::AffineMap;
use crate::linalg;
use crate::lorentz;
use crate::relation::Relation;
use crate::sampling;

/// Band on the closed cone for `J+`, absorbing rounding on constructed
/// null separations. `I+` uses the strict inequality.
pub const CAUSAL_BAND: f64 = 1e-12;

/// Max witnesses listed per hierarchy condition; counts are always exact.
pub const WITNESS_LIMIT: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Error::check_len(lo.len(), hi.len())?;
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Input("degenerate box: need lo < hi in every coordinate".into()));
        }
        Ok(SampleBox { lo, hi })
    }

    pub fn diameter(&self) -> f64 {
        linalg::norm(&linalg::sub(&self.hi, &self.lo))
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *v >= a - tol && *v <= b + tol)
    }

    fn bounding(points: &[Vec<f64>], dim: usize) -> Result<Self> {
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in points {
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        // Widen flat directions so the box stays nondegenerate.
        for k in 0..dim {
            let pad = 1e-9 * (1.0 + lo[k].abs().max(hi[k].abs()));
            if hi[k] - lo[k] <= pad {
                lo[k] -= pad;
                hi[k] += pad;
            }
        }
        SampleBox::new(lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventSet {
    q: usize,
    events: Vec<Vec<f64>>,
    bounds: SampleBox,
    periodic_time: Option<f64>,
    seed: u64,
    lifts: Vec<f64>,
}

/// n uniform events in `bounds`, reproducible from the seed.
pub fn sprinkle(q: usize, n: usize, bounds: SampleBox, seed: u64, periodic_time: Option<f64>) -> Result<EventSet> {
    if n == 0 {
        return Err(Error::Input("n must be at least 1".into()));
    }
    Error::check_len(q + 1, bounds.lo.len())?;
    let mut rng = sampling::rng(seed);
    let events = (0..n)
        .map(|_| {
            bounds
                .lo
                .iter()
                .zip(&bounds.hi)
                .map(|(a, b)| rng.random_range(*a..*b))
                .collect()
        })
        .collect();
    EventSet::new(q, events, bounds, periodic_time, seed)
}

impl EventSet {
    pub fn new(
        q: usize,
        events: Vec<Vec<f64>>,
        bounds: SampleBox,
        periodic_time: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        if q == 0 {
            return Err(Error::Input("q must be positive".into()));
        }
        Error::check_len(q + 1, bounds.lo.len())?;
        if let Some(t) = periodic_time {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Input(format!("periodic time must be positive, got {t}")));
            }
        }
        for (i, e) in events.iter().enumerate() {
            Error::check_len(q + 1, e.len())?;
            if !bounds.contains(e, 1e-12 * (1.0 + bounds.diameter())) {
                return Err(Error::Input(format!("event {i} lies outside the box")));
            }
        }
        let mut sorted: Vec<&Vec<f64>> = events.iter().collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("events must be pairwise distinct".into()));
        }
        // Time shifts `k T` tried when comparing events; `{0}` without a period.
        let lifts = match periodic_time {
            None => vec![0.0],
            Some(t) => {
                let k = (bounds.diameter() / t).ceil() as i64 + 1;
                (-k..=k).map(|i| i as f64 * t).collect()
            }
        };
        Ok(EventSet {
            q,
            events,
            bounds,
            periodic_time,
            seed,
            lifts,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[Vec<f64>] {
        &self.events
    }

    pub fn bounds(&self) -> &SampleBox {
        &self.bounds
    }

    pub fn periodic_time(&self) -> Option<f64> {
        self.periodic_time
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn shifted_separations<'a>(&'a self, from: &'a [f64], to: &'a [f64], lifts: &'a [f64]) -> impl Iterator<Item = (f64, Vec<f64>)> + 'a {
        lifts.iter().map(move |&s| {
            let mut d = linalg::sub(to, from);
            d[0] += s;
            (s, d)
        })
    }

    fn relation_by(&self, pred: impl Fn(usize, usize, f64, &[f64]) -> bool + Sync) -> Relation {
        let lifts = &self.lifts;
        let n = self.len();
        let rows: Vec<Vec<bool>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        self.shifted_separations(&self.events[i], &self.events[j], lifts)
                            .any(|(s, d)| pred(i, j, s, &d))
                    })
                    .collect()
            })
            .collect();
        Relation::from_rows(&rows).expect("square rows")
    }

    /// `I+`: `j - i` strictly timelike for some time lift. Irreflexive on
    /// Minkowski samples; with a period every event sees itself via `T`.
    pub fn chronological_relation(&self) -> Relation {
        let n = self.len();
        let rows: Vec<Vec<bool>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| self.precedes_chronologically(&self.events[i], &self.events[j])).collect())
            .collect();
        Relation::from_rows(&rows).expect("square rows")
    }

    /// `J+`: `j - i` in the closed cone for some lift, or `i = j`.
    pub fn causal_relation(&self) -> Relation {
        self.relation_by(|i, j, _, d| i == j || lorentz::classify_unchecked(d, CAUSAL_BAND).in_closed_cone())
    }

    /// Events reaching themselves along a nontrivial causal lift.
    pub fn causal_loops(&self) -> Vec<usize> {
        let lifts = &self.lifts;
        (0..self.len())
            .filter(|&i| {
                self.shifted_separations(&self.events[i], &self.events[i], lifts)
                    .any(|(s, d)| s != 0.0 && lorentz::classify_unchecked(&d, CAUSAL_BAND).in_closed_cone())
            })
            .collect()
    }

    pub fn k_relation(&self, mode: KMode) -> Relation {
        match mode {
            KMode::Ideal => self.chronological_relation().reflexive_transitive_closure(),
            KMode::Closed => self.causal_relation().reflexive_transitive_closure(),
        }
    }

    /// Lift-aware `b - a` strictly timelike, for arbitrary points.
    pub fn precedes_chronologically(&self, a: &[f64], b: &[f64]) -> bool {
        let r = a[1..].iter().zip(&b[1..]).map(|(x, y)| (y - x) * (y - x)).sum::<f64>().sqrt();
        let dt = b[0] - a[0];
        self.lifts.iter().any(|s| dt + s > r)
    }

    /// Apply `f` to every event and refit the box to the images.
    pub fn map_events(&self, f: &AffineMap) -> Result<EventSet> {
        if self.periodic_time.is_some() {
            return Err(Error::Input("periodic-time samples cannot be transformed".into()));
        }
        Error::check_len(self.q + 1, f.dim())?;
        let events: Vec<Vec<f64>> = self.events.iter().map(|e| f.apply(e)).collect();
        let bounds = SampleBox::bounding(&events, self.q + 1)?;
        EventSet::new(self.q, events, bounds, None, self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KMode {
    Ideal,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub open: Vec<usize>,
    pub closed: Vec<usize>,
}

/// The relations of one sample, computed once.
#[derive(Debug, Clone)]
pub struct CausalStructure<'a> {
    pub events: &'a EventSet,
    pub chronological: Relation,
    pub causal: Relation,
    pub k_closed: Relation,
}

impl<'a> CausalStructure<'a> {
    pub fn new(events: &'a EventSet) -> Self {
        let chronological = events.chronological_relation();
        let causal = events.causal_relation();
        let k_closed = causal.reflexive_transitive_closure();
        CausalStructure {
            events,
            chronological,
            causal,
            k_closed,
        }
    }

    pub fn interval(&self, a: usize, b: usize) -> Result<Interval> {
        let n = self.events.len();
        if a >= n || b >= n {
            return Err(Error::Input(format!("interval endpoints ({a}, {b}) out of range for {n} events")));
        }
        let pick = |r: &Relation| (0..n).filter(|&z| r.get(a, z) && r.get(z, b)).collect();
        Ok(Interval {
            open: pick(&self.chronological),
            closed: pick(&self.causal),
        })
    }

    /// Row `p` is the sample part of the diamond `I+(p - d e0) ∩ I-(p + d e0)`
    /// where `d` is half the distance from `p` to its nearest other event
    /// (time lifts included). On Minkowski samples it is `{p}`.
    pub fn diamond_neighbourhoods(&self) -> Relation {
        let ev = self.events;
        let lifts = &ev.lifts;
        let n = ev.len();
        let rows: Vec<Vec<bool>> = (0..n)
            .into_par_iter()
            .map(|p| {
                let e = &ev.events[p];
                let mut nearest = f64::INFINITY;
                for (z, other) in ev.events.iter().enumerate() {
                    for (s, d) in ev.shifted_separations(e, other, lifts) {
                        if z != p || s != 0.0 {
                            nearest = nearest.min(linalg::norm(&d));
                        }
                    }
                }
                let delta = if nearest.is_finite() { nearest / 2.0 } else { 1.0 };
                let mut below = e.clone();
                below[0] -= delta;
                let mut above = e.clone();
                above[0] += delta;
                (0..n)
                    .map(|z| {
                        ev.precedes_chronologically(&below, &ev.events[z])
                            && ev.precedes_chronologically(&ev.events[z], &above)
                    })
                    .collect()
            })
            .collect();
        Relation::from_rows(&rows).expect("square rows")
    }

    pub fn hierarchy_report(&self) -> HierarchyReport {
        let n = self.events.len();
        let k = &self.k_closed;
        let kt = k.transpose();
        let loops = self.events.causal_loops();

        let chronology = match self.chronological.find_cycle() {
            Some(c) => (0..c.len()).map(|i| (c[i], c[(i + 1) % c.len()])).collect(),
            None => Vec::new(),
        };
        let loop_pairs: Vec<(usize, usize)> = loops.iter().map(|&i| (i, i)).collect();
        let mut causality = self.causal.antisymmetry_witnesses();
        causality.extend(&loop_pairs);
        let mut k_causal = k.antisymmetry_witnesses();
        k_causal.extend(&loop_pairs);
        if !k.is_quasi_order() {
            k_causal.extend(k.transitivity_witnesses());
        }

        let mut future = Vec::new();
        let mut past = Vec::new();
        let mut reflecting = Vec::new();
        let superset = |r: &Relation, a: usize, b: usize| (0..n).all(|z| !r.get(b, z) || r.get(a, z));
        for p in 0..n {
            for q in 0..n {
                if p < q && k.rows_equal(p, q) {
                    future.push((p, q));
                }
                if p < q && kt.rows_equal(p, q) {
                    past.push((p, q));
                }
                if p != q && superset(k, p, q) != superset(&kt, q, p) {
                    reflecting.push((p, q));
                }
            }
        }

        let diamonds = self.diamond_neighbourhoods();
        let mut strongly = Vec::new();
        for p in 0..n {
            for q in p + 1..n {
                if (0..n).any(|z| diamonds.get(p, z) && diamonds.get(q, z)) {
                    strongly.push((p, q));
                }
            }
        }

        let mut hyperbolic = Vec::new();
        let margin = 1e-12 * (1.0 + self.events.bounds.diameter());
        for a in 0..n {
            for b in 0..n {
                if !self.causal.get(a, b) {
                    continue;
                }
                let escapes = (0..n).any(|z| {
                    self.causal.get(a, z)
                        && self.causal.get(z, b)
                        && !self.events.bounds.contains(&self.events.events[z], margin)
                });
                if escapes {
                    hyperbolic.push((a, b));
                }
            }
        }

        let k_causal_ok = k_causal.is_empty();
        let globally_hyperbolic = k_causal_ok && hyperbolic.is_empty();
        let conditions = [
            ("chronology", chronology),
            ("causality", causality),
            ("k_causal", k_causal),
            ("future_distinguishing", future),
            ("past_distinguishing", past),
            ("reflecting", reflecting),
            ("strongly_causal_proxy", strongly),
            ("globally_hyperbolic_proxy", hyperbolic),
        ];
        let ok = |name: &str| conditions.iter().find(|c| c.0 == name).is_some_and(|c| c.1.is_empty());
        let flags = HierarchyFlags {
            chronology_ok: ok("chronology"),
            causality_ok: ok("causality"),
            k_causal_ok,
            future_distinguishing: ok("future_distinguishing"),
            past_distinguishing: ok("past_distinguishing"),
            reflecting_ok: ok("reflecting"),
            strongly_causal_proxy: ok("strongly_causal_proxy"),
            globally_hyperbolic_proxy: globally_hyperbolic,
        };
        let witnesses = conditions
            .into_iter()
            .map(|(name, mut pairs)| {
                let count = pairs.len();
                pairs.truncate(WITNESS_LIMIT);
                WitnessList {
                    condition: name.to_string(),
                    count,
                    pairs,
                }
            })
            .collect();
        HierarchyReport {
            flags,
            witnesses,
            proxies: Proxies::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HierarchyFlags {
    pub chronology_ok: bool,
    pub causality_ok: bool,
    pub k_causal_ok: bool,
    pub future_distinguishing: bool,
    pub past_distinguishing: bool,
    pub reflecting_ok: bool,
    pub strongly_causal_proxy: bool,
    pub globally_hyperbolic_proxy: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessList {
    pub condition: String,
    pub count: usize,
    pub pairs: Vec<(usize, usize)>,
}

/// Finite-sample stand-ins, carried in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Proxies {
    pub k_relation: &'static str,
    pub strongly_causal: &'static str,
    pub globally_hyperbolic: &'static str,
}

impl Default for Proxies {
    fn default() -> Self {
        Proxies {
            k_relation: "K+ = reflexive-transitive closure of J+ (finite samples have no nontrivial limits)",
            strongly_causal: "Hausdorff test: diamonds I+(p - d e0) ∩ I-(p + d e0), d = half the nearest-event distance, pairwise disjoint",
            globally_hyperbolic: "k_causal and every closed interval J+(a) ∩ J-(b) lies inside the sample box",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HierarchyReport {
    #[serde(flatten)]
    pub flags: HierarchyFlags,
    pub witnesses: Vec<WitnessList>,
    pub proxies: Proxies,
}

impl HierarchyReport {
    pub fn witnesses_for(&self, condition: &str) -> &[(usize, usize)] {
        self.witnesses
            .iter()
            .find(|w| w.condition == condition)
            .map_or(&[], |w| &w.pairs)
    }
}

pub fn hierarchy_report(events: &EventSet) -> HierarchyReport {
    CausalStructure::new(events).hierarchy_report()
}
