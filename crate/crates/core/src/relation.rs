//! Square boolean relations stored as packed row bitsets, with the
//! closure algebra used for quasi-orders and causal relations.

use base64::Engine;

use crate::error::{Error, Result};

/// N×N boolean matrix, one `u64` word vector per row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    size: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Relation {
    pub fn empty(size: usize) -> Self {
        let words = size.div_ceil(64).max(1);
        Relation {
            size,
            words,
            bits: vec![0; size * words],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut r = Self::empty(size);
        for i in 0..size {
            r.set(i, i, true);
        }
        r
    }

    pub fn from_pairs(size: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut r = Self::empty(size);
        for &(i, j) in pairs {
            if i >= size || j >= size {
                return Err(Error::Input(format!("pair ({i}, {j}) out of range for size {size}")));
            }
            r.set(i, j, true);
        }
        Ok(r)
    }

    pub fn from_fn(size: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(size);
        for i in 0..size {
            for j in 0..size {
                if f(i, j) {
                    r.set(i, j, true);
                }
            }
        }
        r
    }

    /// Build from precomputed rows (each a list of booleans of length N).
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let n = rows.len();
        let mut r = Self::empty(n);
        for (i, row) in rows.iter().enumerate() {
            Error::check_len(n, row.len())?;
            for (j, &b) in row.iter().enumerate() {
                if b {
                    r.set(i, j, true);
                }
            }
        }
        Ok(r)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    /// Packed words of row `i`; bit `j % 64` of word `j / 64` is `(i, j)`.
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.size {
            for j in 0..self.size {
                if self.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Relation {
        Relation::from_fn(self.size, |i, j| self.get(j, i))
    }

    pub fn union(&self, other: &Relation) -> Relation {
        let mut r = self.clone();
        for (a, b) in r.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        r
    }

    pub fn is_subset_of(&self, other: &Relation) -> bool {
        self.size == other.size && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn reflexive_closure(&self) -> Relation {
        let mut r = self.clone();
        for i in 0..self.size {
            r.set(i, i, true);
        }
        r
    }

    /// Warshall's algorithm on bit rows: for each pivot `k`, every row
    /// containing `k` absorbs row `k`. Idempotent and monotone.
    pub fn transitive_closure(&self) -> Relation {
        let mut r = self.clone();
        let w = r.words;
        for k in 0..r.size {
            let pivot: Vec<u64> = r.row(k).to_vec();
            for i in 0..r.size {
                if r.get(i, k) {
                    for (a, b) in r.bits[i * w..(i + 1) * w].iter_mut().zip(&pivot) {
                        *a |= b;
                    }
                }
            }
        }
        r
    }

    pub fn reflexive_transitive_closure(&self) -> Relation {
        self.reflexive_closure().transitive_closure()
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size).all(|i| self.get(i, i))
    }

    pub fn is_irreflexive(&self) -> bool {
        (0..self.size).all(|i| !self.get(i, i))
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive_closure() == *self
    }

    /// Pairs `(p, q)` with `p < q` related in both directions.
    pub fn antisymmetry_witnesses(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..self.size {
            for q in p + 1..self.size {
                if self.get(p, q) && self.get(q, p) {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// Pairs `(i, k)` with `i R j`, `j R k` but not `i R k` for some `j`.
    pub fn transitivity_witnesses(&self) -> Vec<(usize, usize)> {
        let c = self.transitive_closure();
        let mut out = Vec::new();
        for i in 0..self.size {
            for j in 0..self.size {
                if c.get(i, j) && !self.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_quasi_order(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }

    pub fn is_partial_order(&self) -> (bool, Vec<(usize, usize)>) {
        let w = self.antisymmetry_witnesses();
        (self.is_quasi_order() && w.is_empty(), w)
    }

    /// A directed cycle `v_0 -> v_1 -> ... -> v_0` through distinct vertices
    /// (a self-loop counts as a cycle of length one), if any.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let n = self.size;
        let mut mark = vec![Mark::New; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            if mark[root] != Mark::New {
                continue;
            }
            // Iterative DFS keeping the next successor to try per frame.
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            mark[root] = Mark::Active;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next >= n {
                    mark[v] = Mark::Done;
                    stack.pop();
                    continue;
                }
                let u = *next;
                *next += 1;
                if !self.get(v, u) {
                    continue;
                }
                match mark[u] {
                    Mark::Active => {
                        let mut cycle = vec![v];
                        let mut x = v;
                        while x != u {
                            x = parent[x];
                            cycle.push(x);
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    Mark::New => {
                        mark[u] = Mark::Active;
                        parent[u] = v;
                        stack.push((u, 0));
                    }
                    Mark::Done => {}
                }
            }
        }
        None
    }

    fn check_index(&self, a: usize) -> Result<()> {
        if a >= self.size {
            return Err(Error::Input(format!("index {a} out of range for size {}", self.size)));
        }
        Ok(())
    }

    /// `U_R(a) = {b : a R b}`.
    pub fn u_cone(&self, a: usize) -> Result<Vec<usize>> {
        self.check_index(a)?;
        Ok((0..self.size).filter(|&b| self.get(a, b)).collect())
    }

    /// `{b : b R a}`.
    pub fn down_cone(&self, a: usize) -> Result<Vec<usize>> {
        self.check_index(a)?;
        Ok((0..self.size).filter(|&b| self.get(b, a)).collect())
    }

    /// Indices set in a packed row.
    pub fn members(words: &[u64]) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &w) in words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(k * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    pub fn rows_equal(&self, i: usize, j: usize) -> bool {
        self.row(i) == self.row(j)
    }

    /// CSV of `0`/`1` cells, one line per row.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.size * (2 * self.size + 1));
        for i in 0..self.size {
            for j in 0..self.size {
                if j > 0 {
                    s.push(',');
                }
                s.push(if self.get(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows: Vec<Vec<bool>> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split(',')
                    .map(|c| match c.trim() {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        other => Err(Error::Input(format!("relation cell must be 0 or 1, got {other:?}"))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Self::from_rows(&rows)
    }

    /// Row-major bits, `N*N` of them, packed LSB-first into bytes and base64
    /// encoded.
    pub fn to_packed(&self) -> String {
        let n = self.size;
        let mut bytes = vec![0u8; (n * n).div_ceil(8)];
        for i in 0..n {
            for j in 0..n {
                if self.get(i, j) {
                    let k = i * n + j;
                    bytes[k / 8] |= 1 << (k % 8);
                }
            }
        }
        base64::engine::general_purpose::STANDARD.encode(bytes)
    }

    pub fn from_packed(size: usize, data: &str) -> Result<Self> {
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(data)
            .map_err(|e| Error::Input(format!("bad base64 relation: {e}")))?;
        if bytes.len() != (size * size).div_ceil(8) {
            return Err(Error::Input(format!(
                "packed relation has {} bytes, expected {}",
                bytes.len(),
                (size * size).div_ceil(8)
            )));
        }
        Ok(Relation::from_fn(size, |i, j| {
            let k = i * size + j;
            bytes[k / 8] >> (k % 8) & 1 == 1
        }))
    }
}

/// A point `a` where `h(U_R(a)) != U_S(h(a))`, with the symmetric difference.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ConeWitness {
    pub a: usize,
    pub symmetric_difference: Vec<usize>,
}

/// Is `h` cone preserving from `(A, R)` to `(B, S)`?
pub fn cone_preserving_check(r: &Relation, s: &Relation, h: &[usize]) -> Result<(bool, Vec<ConeWitness>)> {
    Error::check_len(r.size(), h.len())?;
    if let Some(&bad) = h.iter().find(|&&x| x >= s.size()) {
        return Err(Error::Input(format!("map value {bad} out of range for size {}", s.size())));
    }
    let mut witnesses = Vec::new();
    for a in 0..r.size() {
        let mut image = vec![false; s.size()];
        for b in r.u_cone(a)? {
            image[h[b]] = true;
        }
        let diff: Vec<usize> = (0..s.size()).filter(|&c| image[c] != s.get(h[a], c)).collect();
        if !diff.is_empty() {
            witnesses.push(ConeWitness {
                a,
                symmetric_difference: diff,
            });
        }
    }
    Ok((witnesses.is_empty(), witnesses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reach(r: &Relation) -> Relation {
        // DFS reachability by paths of length >= 1.
        let n = r.size();
        let mut out = Relation::empty(n);
        for s in 0..n {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = (0..n).filter(|&j| r.get(s, j)).collect();
            while let Some(v) = stack.pop() {
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                out.set(s, v, true);
                stack.extend((0..n).filter(|&j| r.get(v, j)));
            }
        }
        out
    }

    fn arb_relation(max: usize) -> impl Strategy<Value = Relation> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec(proptest::bool::weighted(0.2), n * n)
                .prop_map(move |v| Relation::from_fn(n, |i, j| v[i * n + j]))
        })
    }

    #[test]
    fn closure_examples() {
        let r = Relation::from_pairs(4, &[(1, 2), (2, 3)]).unwrap();
        let c = r.transitive_closure();
        assert!(c.get(1, 3));
        assert_eq!(c.count(), 3);
        assert_eq!(c.transitive_closure(), c);
        assert!(Relation::identity(3).is_partial_order().0);
    }

    #[test]
    fn cones_and_order_checks() {
        let chain = Relation::from_pairs(4, &[(1, 2), (2, 3)]).unwrap().reflexive_transitive_closure();
        assert_eq!(chain.u_cone(1).unwrap(), vec![1, 2, 3]);
        assert_eq!(chain.down_cone(3).unwrap(), vec![1, 2, 3]);
        assert!(chain.u_cone(4).is_err());
        let sym = Relation::from_pairs(3, &[(1, 2), (2, 1)]).unwrap().reflexive_closure();
        let (ok, w) = sym.is_partial_order();
        assert!(!ok);
        assert_eq!(w, vec![(1, 2)]);
        assert_eq!(sym.find_cycle().unwrap().len(), 1);
        assert!(Relation::from_pairs(3, &[(0, 1), (1, 2)]).unwrap().find_cycle().is_none());
        let cyc = Relation::from_pairs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap().find_cycle().unwrap();
        assert_eq!(cyc.len(), 3);
    }

    #[test]
    fn cone_preserving_examples() {
        let chain = Relation::from_pairs(2, &[(0, 1)]).unwrap().reflexive_closure();
        let anti = Relation::identity(2);
        assert!(cone_preserving_check(&chain, &chain, &[0, 1]).unwrap().0);
        let (ok, w) = cone_preserving_check(&chain, &anti, &[0, 1]).unwrap();
        assert!(!ok);
        assert_eq!(w[0].a, 0);
        assert_eq!(w[0].symmetric_difference, vec![1]);
    }

    #[test]
    fn serialization_roundtrip() {
        let r = Relation::from_pairs(70, &[(0, 69), (69, 0), (33, 34)]).unwrap();
        assert_eq!(Relation::from_csv(&r.to_csv()).unwrap(), r);
        assert_eq!(Relation::from_packed(70, &r.to_packed()).unwrap(), r);
        assert!(Relation::from_csv("0,2\n0,0\n").is_err());
        assert!(Relation::from_csv("0,1\n0\n").is_err());
    }

    proptest! {
        #[test]
        fn closure_matches_dfs(r in arb_relation(8)) {
            prop_assert_eq!(r.transitive_closure(), reach(&r));
        }

        #[test]
        fn closure_is_monotone_and_idempotent(r in arb_relation(70)) {
            let c = r.reflexive_transitive_closure();
            prop_assert!(r.is_subset_of(&c));
            prop_assert_eq!(c.transitive_closure(), c.clone());
            prop_assert!(c.is_quasi_order());
        }

        #[test]
        fn cycle_iff_closure_has_diagonal(r in arb_relation(10)) {
            let c = r.transitive_closure();
            let has = (0..r.size()).any(|i| c.get(i, i));
            match r.find_cycle() {
                Some(cyc) => {
                    prop_assert!(has);
                    for k in 0..cyc.len() {
                        prop_assert!(r.get(cyc[k], cyc[(k + 1) % cyc.len()]));
                    }
                }
                None => prop_assert!(!has),
            }
        }
    }
}
