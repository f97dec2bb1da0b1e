//! Finding a most violated row of a projected family at a point of `P_AP`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Arc, Cycle, NodeSubset};
use crate::params::{BVec, DVec};
use crate::point::XPoint;
use crate::rat::Rat;

/// What identifies a separated row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Cycle(Cycle),
    Subset(NodeSubset),
    /// A cycle with the arc `kl ∈ C` whose reverse is subtracted.
    CycleArc(Cycle, Arc),
    /// A cycle with the node `k ∈ C` whose two reverse neighbours are subtracted.
    CycleNode(Cycle, usize),
    /// The pair row `x_ij + x_ji <= 1`, `i < j`.
    Pair(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolatedRow {
    pub family: String,
    #[serde(flatten)]
    pub witness: Witness,
    pub lhs: Rat,
    pub rhs: Rat,
    pub violation: Rat,
}

impl ViolatedRow {
    fn new(family: &str, witness: Witness, lhs: Rat, rhs: Rat) -> Self {
        let violation = &lhs - &rhs;
        ViolatedRow {
            family: family.to_string(),
            witness,
            lhs,
            rhs,
            violation,
        }
    }

    /// The tag the formulation builders give this row.
    pub fn tag(&self) -> String {
        match &self.witness {
            Witness::Cycle(c) if self.family == "dl" => format!("dl{c}"),
            Witness::Cycle(c) => format!("circuit{c}"),
            Witness::Subset(s) => format!("cut{s}"),
            Witness::CycleArc(c, (k, l)) => format!("lifted{c}[{k},{l}]"),
            Witness::CycleNode(c, k) => format!("vmtz{c}[{k}]"),
            Witness::Pair(i, j) => format!("pair({i},{j})"),
        }
    }
}

/// Right-hand side of circuit-type rows `Σ_C x <= |C| - r(C)`.
#[derive(Clone, Copy, Debug)]
pub enum CircuitRhs<'a> {
    /// `r(C) = 1`, the closure rows.
    Unit,
    /// `r(C) = Σ_C d`.
    Param(&'a DVec),
}

/// Keeps the row with the largest positive violation; earlier rows win ties.
fn keep_best(best: &mut Option<ViolatedRow>, cand: ViolatedRow) {
    if cand.violation.is_positive() && best.as_ref().is_none_or(|b| cand.violation > b.violation) {
        *best = Some(cand);
    }
}

/// Most violated circuit row. The unit case minimizes `Σ_C (1 - x)` by all-pairs
/// shortest paths; the parametric case enumerates `𝒞1`.
pub fn separate_circuit(x: &XPoint, rhs: CircuitRhs<'_>) -> Result<Option<ViolatedRow>> {
    let space = *x.space();
    match rhs {
        CircuitRhs::Unit => Ok(min_complement_cycle(x).and_then(|(c, w)| {
            let lhs = x.sum_over(c.arcs());
            let r = Rat::from(c.len() - 1);
            (w < Rat::one()).then(|| ViolatedRow::new("circuit", Witness::Cycle(c), lhs, r))
        })),
        CircuitRhs::Param(d) => {
            let mut best = None;
            space.for_each_cycle(2, space.n() - 1, |c| {
                let lhs = x.sum_over(c.arcs());
                let r = Rat::from(c.len()) - d.cycle_sum(c);
                keep_best(
                    &mut best,
                    ViolatedRow::new("circuit", Witness::Cycle(c.clone()), lhs, r),
                );
            })?;
            Ok(best)
        }
    }
}

/// Cycle of `A1` minimizing `Σ_C (1 - x)`, ties broken by length and then node order.
fn min_complement_cycle(x: &XPoint) -> Option<(Cycle, Rat)> {
    let space = x.space();
    let n = space.n();
    let w = |i: usize, j: usize| Rat::one() - x.get(i, j);
    let mut dist: Vec<Vec<Option<Rat>>> = vec![vec![None; n + 1]; n + 1];
    let mut next = vec![vec![0usize; n + 1]; n + 1];
    for (i, j) in space.arcs_a1() {
        dist[i][j] = Some(w(i, j));
        next[i][j] = j;
    }
    for i in space.n1() {
        dist[i][i] = Some(Rat::zero());
        next[i][i] = i;
    }
    for k in space.n1() {
        for i in space.n1() {
            let Some(dik) = dist[i][k].clone() else { continue };
            for j in space.n1() {
                let Some(dkj) = &dist[k][j] else { continue };
                let cand = &dik + dkj;
                if dist[i][j].as_ref().is_none_or(|d| cand < *d) {
                    dist[i][j] = Some(cand);
                    next[i][j] = next[i][k];
                }
            }
        }
    }
    let mut best: Option<(Rat, Cycle)> = None;
    for (j, i) in space.arcs_a1() {
        // closing arc j -> i after a shortest path i -> j
        let total = w(j, i) + dist[i][j].clone().expect("complete digraph");
        let mut nodes = vec![i];
        let mut v = i;
        while v != j {
            v = next[v][j];
            nodes.push(v);
        }
        let c = Cycle::new(nodes).expect("shortest paths are simple");
        let better = match &best {
            None => true,
            Some((bw, bc)) => (&total, c.len(), c.nodes()) < (bw, bc.len(), bc.nodes()),
        };
        if better {
            best = Some((total, c));
        }
    }
    best.map(|(w, c)| (c, w))
}

/// Right-hand side of subset rows `Σ_{δ⁺(S)} x >= r(S)`.
#[derive(Clone, Copy, Debug)]
pub enum CutRhs<'a> {
    Unit,
    Param(&'a BVec),
}

/// Most violated cut row. The unit case computes a minimum `1`-`k` cut for every
/// `k ∈ N1`; the parametric case enumerates `𝒮1`.
pub fn separate_cut(x: &XPoint, rhs: CutRhs<'_>) -> Result<Option<ViolatedRow>> {
    let space = *x.space();
    let row = |s: NodeSubset, r: Rat| -> Result<ViolatedRow> {
        let lhs = x.sum_over(space.delta_plus(s)?);
        Ok(flip(ViolatedRow::new("cut", Witness::Subset(s), r, lhs)))
    };
    match rhs {
        CutRhs::Unit => {
            let mut best = None;
            for k in space.n1() {
                let (value, sink_side) = min_cut(x, 1, k);
                if value < Rat::one() {
                    keep_best(&mut best, row(sink_side, Rat::one())?);
                }
            }
            Ok(best)
        }
        CutRhs::Param(b) => {
            let mut best = None;
            for s in space.enumerate_subsets(2, space.n() - 1)? {
                keep_best(&mut best, row(s, b.subset_sum(s))?);
            }
            Ok(best)
        }
    }
}

/// Cut rows read `lhs >= rhs`; stored with the sides swapped so that a positive
/// `violation` always means violated.
fn flip(mut r: ViolatedRow) -> ViolatedRow {
    std::mem::swap(&mut r.lhs, &mut r.rhs);
    r
}

/// Maximum flow from `s` to `t` with capacities `x` (augmenting shortest paths); returns
/// the flow value and the set of nodes not reachable from `s` in the final residual
/// graph.
pub fn min_cut(x: &XPoint, s: usize, t: usize) -> (Rat, NodeSubset) {
    let space = x.space();
    let n = space.n();
    let mut cap = vec![vec![Rat::zero(); n + 1]; n + 1];
    for ((i, j), v) in x.iter() {
        cap[i][j] = v.clone();
    }
    let mut total = Rat::zero();
    loop {
        let mut prev = vec![0usize; n + 1];
        let mut seen = vec![false; n + 1];
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in space.nodes() {
                if !seen[v] && cap[u][v].is_positive() {
                    seen[v] = true;
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if !seen[t] {
            let sink_side = NodeSubset::from_nodes(space.nodes().filter(|&v| !seen[v]));
            return (total, sink_side);
        }
        let mut push = None::<Rat>;
        let mut v = t;
        while v != s {
            let u = prev[v];
            push = Some(match push {
                None => cap[u][v].clone(),
                Some(p) => p.min(cap[u][v].clone()),
            });
            v = u;
        }
        let push = push.expect("t differs from s");
        let mut v = t;
        while v != s {
            let u = prev[v];
            cap[u][v] -= &push;
            cap[v][u] += &push;
            v = u;
        }
        total += push;
    }
}

/// Which lifted DL rows to search.
#[derive(Clone, Copy, Debug)]
pub enum DlMode<'a> {
    /// `Σ_C (x_ij + x_ji) - x_lk <= |C| - 1` over `(C, kl ∈ C)`.
    VertexDl,
    /// `Σ_C (x_ij + x_ji) - x_{k,k⁻} - x_{k⁺,k} <= |C| - 1` over `(C, k ∈ C)`.
    VertexMtz,
    /// The rows of `P_DL(d)`.
    Param(&'a DVec),
}

/// Most violated pair row or lifted DL row, by exhaustive search over cycles with
/// `|C| >= 3`.
pub fn separate_dl_lifted(x: &XPoint, mode: DlMode<'_>) -> Result<Option<ViolatedRow>> {
    let space = *x.space();
    let mut best = None;
    for (i, j) in space.arcs_a1().filter(|&(i, j)| i < j) {
        let lhs = x.get(i, j) + x.get(j, i);
        keep_best(
            &mut best,
            ViolatedRow::new("pair", Witness::Pair(i, j), lhs, Rat::one()),
        );
    }
    if best.is_some() {
        return Ok(best);
    }
    space.for_each_cycle(3, space.n() - 1, |c| {
        let both: Rat = c.arcs().map(|(i, j)| x.get(i, j) + x.get(j, i)).sum();
        let r = Rat::from(c.len() - 1);
        match mode {
            DlMode::VertexDl => {
                for (k, l) in c.arcs() {
                    let lhs = &both - x.get(l, k);
                    keep_best(
                        &mut best,
                        ViolatedRow::new("lifted", Witness::CycleArc(c.clone(), (k, l)), lhs, r.clone()),
                    );
                }
            }
            DlMode::VertexMtz => {
                for &k in c.nodes() {
                    let (p, s) = (c.pred(k).unwrap(), c.succ(k).unwrap());
                    let lhs = &both - x.get(k, p) - x.get(s, k);
                    keep_best(
                        &mut best,
                        ViolatedRow::new("vmtz", Witness::CycleNode(c.clone(), k), lhs, r.clone()),
                    );
                }
            }
            DlMode::Param(d) => {
                let lhs: Rat = &both
                    - c.arcs()
                        .map(|(i, j)| (d.get(i, j) + d.get(j, i)) * x.get(j, i))
                        .sum::<Rat>();
                let rhs = Rat::from(c.len()) - d.cycle_sum(c);
                keep_best(&mut best, ViolatedRow::new("dl", Witness::Cycle(c.clone()), lhs, rhs));
            }
        }
    })?;
    Ok(best)
}

/// A cycle with `Σ_C d > 1` of maximum sum, or `None` when `d ∈ D̄` (for nonnegative
/// `d`). Exhaustive: deciding this is NP-hard in general.
pub fn separate_dbar(d: &DVec) -> Result<Option<(Cycle, Rat)>> {
    let (c, s) = d.max_cycle()?;
    Ok((s > Rat::one()).then_some((c, s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ArcSpace;
    use crate::params::{d_mtz, d_tail};
    use crate::rat::rat;

    #[test]
    fn integral_subtour() {
        let sp = ArcSpace::new(5).unwrap();
        let x = XPoint::cover(&sp, &[0, 4, 3, 2, 5, 1]);
        let v = separate_circuit(&x, CircuitRhs::Unit).unwrap().unwrap();
        assert_eq!(v.witness, Witness::Cycle(Cycle::new(vec![2, 3]).unwrap()));
        assert_eq!(v.violation, Rat::one());
        let c = separate_cut(&x, CutRhs::Unit).unwrap().unwrap();
        assert_eq!(c.witness, Witness::Subset(NodeSubset::from_nodes([2, 3])));
        assert_eq!(c.lhs, Rat::zero());
        assert_eq!(c.tag(), "cut{2,3}");
    }

    #[test]
    fn tours_and_uniform_point_pass() {
        for n in 4..=6 {
            let sp = ArcSpace::new(n).unwrap();
            let order: Vec<usize> = (1..=n).collect();
            let t = XPoint::tour(&sp, &order);
            assert!(separate_circuit(&t, CircuitRhs::Unit).unwrap().is_none());
            assert!(separate_cut(&t, CutRhs::Unit).unwrap().is_none());
            assert!(separate_dl_lifted(&t, DlMode::VertexDl).unwrap().is_none());
            let u = XPoint::uniform(&sp, rat(1, n as i64 - 1));
            assert!(separate_circuit(&u, CircuitRhs::Unit).unwrap().is_none());
        }
    }

    #[test]
    fn dbar_oracle() {
        let sp = ArcSpace::new(5).unwrap();
        let big = d_mtz(&sp).scaled(&rat(9, 8));
        let (c, s) = separate_dbar(&big).unwrap().unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(s, rat(9, 8));
        assert!(separate_dbar(&d_tail(&sp, 3)).unwrap().is_none());
        assert!(separate_dbar(&crate::params::DVec::zeros(&sp)).unwrap().is_none());
    }
}
