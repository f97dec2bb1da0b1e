//! Complete-digraph combinatorics on nodes `1..=n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` for which full cycle or subset enumeration is attempted.
pub const ENUMERATION_CAP: usize = 12;

pub type Arc = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcSpace {
    n: usize,
}

impl ArcSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::Domain(format!("complete digraphs need n >= 4 nodes, got {n}")));
        }
        if n > 63 {
            return Err(Error::arg(format!("n = {n} exceeds the bitset width")));
        }
        Ok(ArcSpace { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + Clone {
        1..=self.n
    }

    /// `N1 = N \ {1}`.
    pub fn n1(&self) -> impl Iterator<Item = usize> + Clone {
        2..=self.n
    }

    pub fn num_arcs(&self) -> usize {
        self.n * (self.n - 1)
    }

    pub fn num_a1(&self) -> usize {
        (self.n - 1) * (self.n - 2)
    }

    pub fn is_arc(&self, (i, j): Arc) -> bool {
        i != j && (1..=self.n).contains(&i) && (1..=self.n).contains(&j)
    }

    /// Dense index of arc `ij` in `0..n(n-1)`, row-major by tail.
    pub fn arc_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(self.is_arc((i, j)), "not an arc: ({i},{j})");
        (i - 1) * (self.n - 1) + (j - 1) - usize::from(j > i)
    }

    pub fn arc_at(&self, idx: usize) -> Arc {
        let i = idx / (self.n - 1) + 1;
        let r = idx % (self.n - 1) + 1;
        let j = if r >= i { r + 1 } else { r };
        (i, j)
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        (0..self.num_arcs()).map(|k| self.arc_at(k))
    }

    /// Arcs with both ends in `N1`, in arc-index order.
    pub fn arcs_a1(&self) -> impl Iterator<Item = Arc> + '_ {
        self.arcs().filter(|&(i, j)| i != 1 && j != 1)
    }

    /// Dense index of `ij` within `A1`.
    pub fn a1_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i >= 2 && j >= 2 && i != j);
        (i - 2) * (self.n - 2) + (j - 2) - usize::from(j > i)
    }

    pub fn a1_at(&self, idx: usize) -> Arc {
        let i = idx / (self.n - 2) + 2;
        let r = idx % (self.n - 2) + 2;
        let j = if r >= i { r + 1 } else { r };
        (i, j)
    }

    pub fn check_cap(&self, cap: usize, what: &str) -> Result<()> {
        if self.n > cap {
            Err(Error::Capacity {
                n: self.n,
                cap,
                what: what.to_string(),
            })
        } else {
            Ok(())
        }
    }

    /// Calls `visit` on every cycle of `A1` with length in `min_len..=max_len`,
    /// ordered by length and then lexicographically by canonical node sequence.
    pub fn for_each_cycle(&self, min_len: usize, max_len: usize, mut visit: impl FnMut(&Cycle)) -> Result<()> {
        if min_len < 2 || min_len > max_len || max_len > self.n - 1 {
            return Err(Error::arg(format!(
                "cycle length range {min_len}..={max_len} invalid for n = {}",
                self.n
            )));
        }
        self.check_cap(ENUMERATION_CAP, "cycle enumeration")?;
        let mut path = Vec::with_capacity(max_len);
        let mut used = vec![false; self.n + 1];
        for len in min_len..=max_len {
            for s in 2..=self.n {
                path.clear();
                path.push(s);
                used[s] = true;
                self.extend_cycle(len, &mut path, &mut used, &mut visit);
                used[s] = false;
            }
        }
        Ok(())
    }

    fn extend_cycle(&self, len: usize, path: &mut Vec<usize>, used: &mut [bool], visit: &mut impl FnMut(&Cycle)) {
        if path.len() == len {
            visit(&Cycle { nodes: path.clone() });
            return;
        }
        for v in path[0] + 1..=self.n {
            if !used[v] {
                used[v] = true;
                path.push(v);
                self.extend_cycle(len, path, used, visit);
                path.pop();
                used[v] = false;
            }
        }
    }

    pub fn enumerate_cycles(&self, min_len: usize, max_len: usize) -> Result<Vec<Cycle>> {
        let mut out = Vec::new();
        self.for_each_cycle(min_len, max_len, |c| out.push(c.clone()))?;
        Ok(out)
    }

    /// All of `C1`.
    pub fn all_cycles(&self) -> Result<Vec<Cycle>> {
        self.enumerate_cycles(2, self.n - 1)
    }

    /// Subsets `S` of `N1` with `min_size <= |S| <= max_size`, ordered by size then
    /// lexicographically.
    pub fn enumerate_subsets(&self, min_size: usize, max_size: usize) -> Result<Vec<NodeSubset>> {
        if min_size > max_size || max_size > self.n - 1 {
            return Err(Error::arg(format!(
                "subset size range {min_size}..={max_size} invalid for n = {}",
                self.n
            )));
        }
        self.check_cap(ENUMERATION_CAP, "subset enumeration")?;
        let mut out: Vec<NodeSubset> = (0u64..1 << (self.n - 1))
            .map(|m| NodeSubset(m << 2))
            .filter(|s| (min_size..=max_size).contains(&s.len()))
            .collect();
        out.sort_by_cached_key(|s| (s.len(), s.to_vec()));
        Ok(out)
    }

    /// `S1`: subsets of `N1` of size at least two.
    pub fn all_subsets(&self) -> Result<Vec<NodeSubset>> {
        self.enumerate_subsets(2, self.n - 1)
    }

    fn check_proper(&self, s: NodeSubset) -> Result<()> {
        let full = NodeSubset::from_nodes(self.nodes());
        if s.is_empty() || s == full || s.0 & !full.0 != 0 {
            return Err(Error::arg(format!("subset {s} must be a nonempty proper subset of N")));
        }
        Ok(())
    }

    pub fn delta_plus(&self, s: NodeSubset) -> Result<Vec<Arc>> {
        self.check_proper(s)?;
        Ok(self.arcs().filter(|&(i, j)| s.contains(i) && !s.contains(j)).collect())
    }

    pub fn delta_minus(&self, s: NodeSubset) -> Result<Vec<Arc>> {
        self.check_proper(s)?;
        Ok(self.arcs().filter(|&(i, j)| !s.contains(i) && s.contains(j)).collect())
    }

    /// `A(S)`: arcs with both ends in `S`.
    pub fn arcs_within(&self, s: NodeSubset) -> Vec<Arc> {
        self.arcs().filter(|&(i, j)| s.contains(i) && s.contains(j)).collect()
    }

    /// Every integer point of the assignment polytope, as successor arrays
    /// (`succ[i]` for `i` in `1..=n`, index 0 unused).
    pub fn cycle_covers(&self) -> Result<Vec<Vec<usize>>> {
        self.check_cap(9, "cycle cover enumeration")?;
        let mut out = Vec::new();
        let mut succ = vec![0; self.n + 1];
        let mut taken = vec![false; self.n + 1];
        self.extend_cover(1, &mut succ, &mut taken, &mut out);
        Ok(out)
    }

    fn extend_cover(&self, i: usize, succ: &mut Vec<usize>, taken: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if i > self.n {
            out.push(succ.clone());
            return;
        }
        for j in 1..=self.n {
            if j != i && !taken[j] {
                taken[j] = true;
                succ[i] = j;
                self.extend_cover(i + 1, succ, taken, out);
                taken[j] = false;
            }
        }
    }

    /// Hamiltonian cycles as node orders starting at node 1, lexicographic.
    pub fn tours(&self, cap: usize) -> Result<Vec<Vec<usize>>> {
        self.check_cap(cap, "tour enumeration")?;
        let mut out = Vec::new();
        let mut rest: Vec<usize> = self.n1().collect();
        permute_lex(&mut rest, 0, &mut |p| {
            let mut t = Vec::with_capacity(self.n);
            t.push(1);
            t.extend_from_slice(p);
            out.push(t);
        });
        out.sort();
        Ok(out)
    }
}

fn permute_lex(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute_lex(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Arcs of the successor array `succ` (as returned by [`ArcSpace::cycle_covers`]).
pub fn cover_arcs(succ: &[usize]) -> Vec<Arc> {
    (1..succ.len()).map(|i| (i, succ[i])).collect()
}

/// Whether the successor array is a single Hamiltonian cycle.
pub fn cover_is_tour(succ: &[usize]) -> bool {
    let n = succ.len() - 1;
    let mut v = 1;
    for step in 1..=n {
        v = succ[v];
        if v == 1 {
            return step == n;
        }
    }
    false
}

pub fn tour_arcs(order: &[usize]) -> Vec<Arc> {
    (0..order.len())
        .map(|k| (order[k], order[(k + 1) % order.len()]))
        .collect()
}

/// A directed cycle stored by its node sequence, rotated so the smallest node leads.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Cycle {
    nodes: Vec<usize>,
}

impl Cycle {
    pub fn new(nodes: Vec<usize>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::arg("a cycle needs at least two nodes"));
        }
        let mut seen = nodes.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != nodes.len() || seen[0] == 0 {
            return Err(Error::arg(format!("invalid cycle node sequence {nodes:?}")));
        }
        let start = nodes
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| *v)
            .map(|(k, _)| k)
            .unwrap();
        let mut nodes = nodes;
        nodes.rotate_left(start);
        Ok(Cycle { nodes })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        let k = self.nodes.len();
        (0..k).map(move |p| (self.nodes[p], self.nodes[(p + 1) % k]))
    }

    pub fn contains_node(&self, v: usize) -> bool {
        self.nodes.contains(&v)
    }

    pub fn contains_arc(&self, (i, j): Arc) -> bool {
        self.position(i)
            .is_some_and(|p| self.nodes[(p + 1) % self.nodes.len()] == j)
    }

    fn position(&self, v: usize) -> Option<usize> {
        self.nodes.iter().position(|&w| w == v)
    }

    /// Node following `k` on the cycle.
    pub fn succ(&self, k: usize) -> Option<usize> {
        self.position(k).map(|p| self.nodes[(p + 1) % self.nodes.len()])
    }

    /// Node preceding `k` on the cycle.
    pub fn pred(&self, k: usize) -> Option<usize> {
        let m = self.nodes.len();
        self.position(k).map(|p| self.nodes[(p + m - 1) % m])
    }

    pub fn reverse(&self) -> Cycle {
        let mut nodes = self.nodes.clone();
        nodes[1..].reverse();
        Cycle { nodes }
    }

    pub fn node_set(&self) -> NodeSubset {
        NodeSubset::from_nodes(self.nodes.iter().copied())
    }
}

impl TryFrom<Vec<usize>> for Cycle {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Cycle::new(v)
    }
}

impl From<Cycle> for Vec<usize> {
    fn from(c: Cycle) -> Self {
        c.nodes
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.nodes.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A set of nodes as a bitset (bit `i` for node `i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodeSubset(u64);

impl NodeSubset {
    pub fn empty() -> Self {
        NodeSubset(0)
    }

    pub fn from_nodes(nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut m = 0u64;
        for v in nodes {
            assert!((1..64).contains(&v), "node {v} out of bitset range");
            m |= 1 << v;
        }
        NodeSubset(m)
    }

    pub fn bits(&self) -> u64 {
        self.0
    }

    pub fn contains(&self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let m = self.0;
        (1..64).filter(move |&v| m >> v & 1 == 1)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// `N \ S` for the node set of `space`.
    pub fn complement(&self, space: &ArcSpace) -> NodeSubset {
        NodeSubset::from_nodes(space.nodes().filter(|&v| !self.contains(v)))
    }
}

impl fmt::Display for NodeSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for NodeSubset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NodeSubset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if v.iter().any(|&x| x == 0 || x >= 64) {
            return Err(serde::de::Error::custom("node out of range"));
        }
        Ok(NodeSubset::from_nodes(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn closed_form(n: usize) -> usize {
        (2..n).map(|k| binom(n - 1, k) * (1..k).product::<usize>()).sum()
    }

    #[test]
    fn arc_index_round_trips() {
        for n in 4..9 {
            let sp = ArcSpace::new(n).unwrap();
            for k in 0..sp.num_arcs() {
                let (i, j) = sp.arc_at(k);
                assert_eq!(sp.arc_index(i, j), k);
            }
            for k in 0..sp.num_a1() {
                let (i, j) = sp.a1_at(k);
                assert_eq!(sp.a1_index(i, j), k);
            }
            assert_eq!(sp.arcs_a1().count(), sp.num_a1());
        }
    }

    #[test]
    fn small_n_rejected() {
        assert!(matches!(ArcSpace::new(3), Err(Error::Domain(_))));
    }

    #[test]
    fn cycle_examples() {
        let sp = ArcSpace::new(4).unwrap();
        let cs = sp.enumerate_cycles(2, 3).unwrap();
        assert_eq!(cs.len(), 5);
        assert_eq!(cs.iter().filter(|c| c.len() == 2).count(), 3);
        let sp5 = ArcSpace::new(5).unwrap();
        assert_eq!(sp5.enumerate_cycles(2, 2).unwrap().len(), 6);
        assert!(sp.enumerate_cycles(3, 2).is_err());
        assert!(sp.enumerate_cycles(2, 4).is_err());
    }

    #[test]
    fn cycle_count_closed_form() {
        for n in 4..=8 {
            let sp = ArcSpace::new(n).unwrap();
            assert_eq!(sp.all_cycles().unwrap().len(), closed_form(n), "n={n}");
        }
        assert_eq!(closed_form(5), 20);
        assert_eq!(closed_form(6), 84);
    }

    #[test]
    fn cap_enforced() {
        let sp = ArcSpace::new(13).unwrap();
        assert!(matches!(sp.all_cycles(), Err(Error::Capacity { .. })));
    }

    #[test]
    fn reverse_and_neighbors() {
        let c = Cycle::new(vec![3, 4, 2]).unwrap();
        assert_eq!(c.nodes(), &[2, 3, 4]);
        assert_eq!(c.reverse().nodes(), &[2, 4, 3]);
        let two = Cycle::new(vec![3, 2]).unwrap();
        assert_eq!(two.reverse(), two);
        assert_eq!(c.succ(4), Some(2));
        assert_eq!(c.pred(2), Some(4));
        assert!(c.contains_arc((4, 2)));
        assert!(!c.contains_arc((2, 4)));
        let sp = ArcSpace::new(6).unwrap();
        for c in sp.all_cycles().unwrap() {
            assert_eq!(c.reverse().reverse(), c);
            let rev: Vec<Arc> = c.reverse().arcs().collect();
            for (i, j) in c.arcs() {
                assert!(rev.contains(&(j, i)));
            }
        }
    }

    #[test]
    fn cuts() {
        let sp = ArcSpace::new(4).unwrap();
        let s = NodeSubset::from_nodes([2]);
        assert_eq!(sp.delta_plus(s).unwrap(), vec![(2, 1), (2, 3), (2, 4)]);
        let s = NodeSubset::from_nodes([2, 3]);
        assert_eq!(sp.delta_plus(s).unwrap(), vec![(2, 1), (2, 4), (3, 1), (3, 4)]);
        assert!(sp.delta_plus(NodeSubset::empty()).is_err());
        assert!(sp.delta_plus(NodeSubset::from_nodes(1..=4)).is_err());
        let sp = ArcSpace::new(6).unwrap();
        for m in 1u64..(1 << 6) - 1 {
            let s = NodeSubset(m << 1);
            let plus = sp.delta_plus(s).unwrap();
            let minus = sp.delta_minus(s).unwrap();
            let inner = sp.arcs_within(s);
            let outer = sp.arcs_within(s.complement(&sp));
            assert_eq!(plus.len(), s.len() * (6 - s.len()));
            let mut all: Vec<Arc> = plus.into_iter().chain(minus).chain(inner).chain(outer).collect();
            all.sort();
            let before = all.len();
            all.dedup();
            assert_eq!(before, all.len());
            assert_eq!(all.len(), sp.num_arcs());
        }
    }

    #[test]
    fn subsets_and_covers() {
        let sp = ArcSpace::new(5).unwrap();
        assert_eq!(sp.all_subsets().unwrap().len(), 11);
        let covers = sp.cycle_covers().unwrap();
        assert_eq!(covers.len(), 44);
        assert_eq!(covers.iter().filter(|c| cover_is_tour(c)).count(), 24);
        assert_eq!(sp.tours(9).unwrap().len(), 24);
    }
}
