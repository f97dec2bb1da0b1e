use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulations::{BuildOptions, FamilyId, FormulationId};
use crate::graph::{cover_is_tour, ArcSpace};
use crate::instance::Instance;
use crate::lp::{solve_lp, LinSys, LpStatus, Row, RowKind, Sense};
use crate::rat::Rat;

/// Rows added per cutting-plane round.
const CUTS_PER_ROUND: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Enumerate,
    BranchAndBound,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumerate" => Ok(Strategy::Enumerate),
            "branch-and-bound" | "bb" => Ok(Strategy::BranchAndBound),
            _ => Err(Error::arg(format!("unknown strategy {s}"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Enumerate => "enumerate",
            Strategy::BranchAndBound => "branch-and-bound",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    /// Node order starting at node 1.
    pub tour: Vec<usize>,
    pub value: Rat,
    /// Search nodes (B&B) or tours visited (enumeration).
    pub nodes: usize,
    /// LPs solved.
    pub lps: usize,
}

/// An LP relaxation: either a fixed system, or an `x`-space system whose rows are
/// added lazily from `pool` when violated.
struct Relaxation {
    working: LinSys,
    pool: Vec<Row>,
    in_working: Vec<bool>,
    lps: usize,
}

impl Relaxation {
    fn new(full: LinSys, space: &ArcSpace) -> Self {
        if full.num_vars() != space.num_arcs() {
            return Relaxation {
                working: full,
                pool: Vec::new(),
                in_working: Vec::new(),
                lps: 0,
            };
        }
        let base = |r: &Row| r.kind == RowKind::Eq || r.tag.starts_with("lb(");
        let working = full.filter_rows(base);
        let pool: Vec<Row> = full.rows().iter().filter(|r| !base(r)).cloned().collect();
        let in_working = vec![false; pool.len()];
        Relaxation {
            working,
            pool,
            in_working,
            lps: 0,
        }
    }

    /// Minimizes over the relaxation with `fixed` rows appended, adding violated pool
    /// rows until none remain. `None` when infeasible.
    fn solve(&mut self, objective: &[(usize, Rat)], fixed: &[Row]) -> Result<Option<(Rat, Vec<Rat>)>> {
        loop {
            let mut sys = self.working.clone();
            for r in fixed {
                sys.push_row(r.clone())?;
            }
            let res = solve_lp(&sys, objective, Sense::Min)?;
            self.lps += 1;
            match res.status {
                LpStatus::Infeasible => return Ok(None),
                LpStatus::Unbounded => return Err(Error::Internal("relaxation is unbounded".into())),
                LpStatus::Optimal => {}
            }
            let point = res.point.expect("optimal point");
            let mut violated: Vec<(Rat, usize)> = self
                .pool
                .iter()
                .enumerate()
                .filter(|(k, _)| !self.in_working[*k])
                .filter_map(|(k, r)| {
                    let v = r.lhs(&point) - &r.rhs;
                    v.is_positive().then_some((v, k))
                })
                .collect();
            if violated.is_empty() {
                return Ok(Some((res.value.expect("optimal value"), point)));
            }
            violated.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            for (_, k) in violated.into_iter().take(CUTS_PER_ROUND) {
                self.in_working[k] = true;
                self.working.push_row(self.pool[k].clone())?;
            }
        }
    }
}

fn relaxation(inst: &Instance, fid: &FormulationId, opts: &BuildOptions) -> Result<Relaxation> {
    let full = fid.build(&inst.space, opts)?;
    Ok(Relaxation::new(full, &inst.space))
}

/// LP optimum over an `x`-space system by lazy row generation; also returns the
/// number of LPs solved.
pub fn cutting_plane_bound(inst: &Instance, sys: &LinSys) -> Result<(Rat, usize)> {
    let mut rel = Relaxation::new(sys.clone(), &inst.space);
    let (v, _) = rel
        .solve(&inst.objective(), &[])?
        .ok_or_else(|| Error::Internal("relaxation is infeasible".into()))?;
    Ok((v, rel.lps))
}

/// Exact LP bound `min c·x` over the formulation.
pub fn lp_bound(inst: &Instance, fid: &FormulationId, opts: &BuildOptions) -> Result<Rat> {
    let mut rel = relaxation(inst, fid, opts)?;
    let (v, _) = rel
        .solve(&inst.objective(), &[])?
        .ok_or_else(|| Error::Internal(format!("{fid} is infeasible")))?;
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub formulation: String,
    pub value: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundTable {
    pub instance: String,
    pub rows: Vec<BoundRow>,
    /// Pairs `A ⊆ B` known to hold whose bounds are out of order.
    pub violations: Vec<String>,
    /// Number of known inclusions checked.
    pub checked: usize,
}

impl BoundTable {
    pub fn monotone(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_text(&self) -> String {
        let w = self.rows.iter().map(|r| r.formulation.len()).max().unwrap_or(0);
        let mut s = format!("instance {}\n", self.instance);
        for r in &self.rows {
            s.push_str(&format!("  {:<w$}  {}\n", r.formulation, r.value));
        }
        s.push_str(&format!(
            "  {} known inclusions checked, {} out of order\n",
            self.checked,
            self.violations.len()
        ));
        for v in &self.violations {
            s.push_str(&format!("  out of order: {v}\n"));
        }
        s
    }
}

/// LP bounds for each formulation, checked for monotonicity along every inclusion
/// reported by [`known_inclusions`].
pub fn lp_bound_table(inst: &Instance, ids: &[FormulationId], opts: &BuildOptions) -> Result<BoundTable> {
    let values: Vec<Rat> = ids.iter().map(|f| lp_bound(inst, f, opts)).collect::<Result<_>>()?;
    let mut violations = Vec::new();
    let mut checked = 0;
    for (a, va) in ids.iter().zip(&values) {
        for (b, vb) in ids.iter().zip(&values) {
            if a != b && known_inclusions(a, b) {
                checked += 1;
                if va < vb {
                    violations.push(format!("{a} inside {b} but bound {va} < {vb}"));
                }
            }
        }
    }
    Ok(BoundTable {
        instance: inst.name.clone(),
        rows: ids
            .iter()
            .zip(values)
            .map(|(f, value)| BoundRow {
                formulation: f.to_string(),
                value,
            })
            .collect(),
        violations,
        checked,
    })
}

/// Position in the chain of closures, smaller is tighter.
fn rank(f: FamilyId) -> Option<u8> {
    match f {
        FamilyId::ClScf | FamilyId::EfScf | FamilyId::DfjCut | FamilyId::DfjClique | FamilyId::Mcf => Some(0),
        FamilyId::ClDl | FamilyId::EfDl => Some(1),
        FamilyId::ClDlOnVmtz => Some(2),
        FamilyId::ClMtz | FamilyId::EfMtz | FamilyId::Circuit => Some(3),
        FamilyId::Ap => Some(4),
        _ => None,
    }
}

/// Whether the `x`-projection of `a` is proven to lie inside that of `b`.
pub fn known_inclusions(a: &FormulationId, b: &FormulationId) -> bool {
    let (fa, fb) = (a.family(), b.family());
    if fb == FamilyId::Ap || (fa == fb && a.param() == b.param()) {
        return true;
    }
    if let (Some(ra), Some(rb)) = (rank(fa), rank(fb)) {
        return ra <= rb;
    }
    let threshold = match fb {
        FamilyId::DMtz => 3,
        FamilyId::DDl => 1,
        FamilyId::BScf => 0,
        _ => return false,
    };
    if let Some(ra) = rank(fa) {
        return ra <= threshold;
    }
    fa == FamilyId::DDl && fb == FamilyId::DMtz && a.param() == b.param()
}

/// Exact ATSP optimum, by tour enumeration or by best-first branch and bound on the
/// LP relaxation of `fid`. Enumeration allows one node more than `opts.cap`.
pub fn solve_atsp(
    inst: &Instance,
    fid: &FormulationId,
    strategy: Strategy,
    opts: &BuildOptions,
) -> Result<SolveResult> {
    match strategy {
        Strategy::Enumerate => enumerate(inst, opts.cap + 1),
        Strategy::BranchAndBound => branch_and_bound(inst, fid, opts),
    }
}

fn enumerate(inst: &Instance, cap: usize) -> Result<SolveResult> {
    let tours = inst.space.tours(cap)?;
    let nodes = tours.len();
    let mut best: Option<(Rat, Vec<usize>)> = None;
    for t in tours {
        let v = inst.tour_cost(&t);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, t));
        }
    }
    let (value, tour) = best.expect("n >= 4 has tours");
    Ok(SolveResult {
        tour,
        value,
        nodes,
        lps: 0,
    })
}

fn fix_row(space: &ArcSpace, (i, j): (usize, usize), one: bool) -> Row {
    let v = space.arc_index(i, j);
    let (coeff, rhs, tag) = match one {
        true => (-Rat::one(), -Rat::one(), format!("fix1({i},{j})")),
        false => (Rat::one(), Rat::zero(), format!("fix0({i},{j})")),
    };
    Row {
        tag,
        kind: RowKind::Le,
        coeffs: vec![(v, coeff)],
        rhs,
    }
}

/// Successor array of an integral assignment.
fn successors(space: &ArcSpace, x: &[Rat]) -> Vec<usize> {
    let mut succ = vec![0; space.n() + 1];
    for (k, (i, j)) in space.arcs().enumerate() {
        if x[k].is_one() {
            succ[i] = j;
        }
    }
    succ
}

fn order_of(succ: &[usize]) -> Vec<usize> {
    let mut t = vec![1];
    let mut v = succ[1];
    while v != 1 {
        t.push(v);
        v = succ[v];
    }
    t
}

fn branch_and_bound(inst: &Instance, fid: &FormulationId, opts: &BuildOptions) -> Result<SolveResult> {
    let space = inst.space;
    let objective = inst.objective();
    let mut rel = relaxation(inst, fid, opts)?;
    let mut incumbent: Option<(Rat, Vec<usize>)> = None;
    let mut heap: BinaryHeap<Reverse<(Rat, usize)>> = BinaryHeap::new();
    let mut fixings: Vec<Vec<Row>> = Vec::new();
    let mut nodes = 0;
    let push =
        |heap: &mut BinaryHeap<Reverse<(Rat, usize)>>, fixings: &mut Vec<Vec<Row>>, bound: Rat, fix: Vec<Row>| {
            fixings.push(fix);
            heap.push(Reverse((bound, fixings.len() - 1)));
        };
    push(&mut heap, &mut fixings, Rat::zero(), Vec::new());
    while let Some(Reverse((parent_bound, id))) = heap.pop() {
        if incumbent.as_ref().is_some_and(|(v, _)| parent_bound >= *v) {
            continue;
        }
        let fix = std::mem::take(&mut fixings[id]);
        nodes += 1;
        let Some((bound, point)) = rel.solve(&objective, &fix)? else {
            continue;
        };
        if incumbent.as_ref().is_some_and(|(v, _)| bound >= *v) {
            continue;
        }
        let x = &point[..space.num_arcs()];
        let half = Rat::new(1, 2);
        let frac = space
            .arcs()
            .enumerate()
            .filter(|(k, _)| !x[*k].is_integer())
            .min_by(|(a, _), (b, _)| (&x[*a] - &half).abs().cmp(&(&x[*b] - &half).abs()).then(a.cmp(b)));
        if let Some((_, arc)) = frac {
            for one in [true, false] {
                let mut f = fix.clone();
                f.push(fix_row(&space, arc, one));
                push(&mut heap, &mut fixings, bound.clone(), f);
            }
            continue;
        }
        let succ = successors(&space, x);
        if cover_is_tour(&succ) {
            incumbent = Some((bound, order_of(&succ)));
            continue;
        }
        // An integral subtour cover: partition on the arcs of the subtour through 1's
        // smallest cycle, fixing a prefix to one and the next arc to zero.
        let mut sub = vec![(1, succ[1])];
        while sub.last().unwrap().1 != 1 {
            let v = sub.last().unwrap().1;
            sub.push((v, succ[v]));
        }
        for k in 0..sub.len() {
            let mut f = fix.clone();
            f.extend(sub[..k].iter().map(|&a| fix_row(&space, a, true)));
            f.push(fix_row(&space, sub[k], false));
            push(&mut heap, &mut fixings, bound.clone(), f);
        }
    }
    let (value, tour) = incumbent.ok_or_else(|| Error::Internal("branch and bound found no tour".into()))?;
    Ok(SolveResult {
        tour,
        value,
        nodes,
        lps: rel.lps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::GenMode;

    #[test]
    fn small_instance_matches_enumeration() {
        let inst = Instance::from_fn("sum", 4, |i, j| Rat::from(i + j)).unwrap();
        let e = solve_atsp(
            &inst,
            &FormulationId::fixed(FamilyId::Ap).unwrap(),
            Strategy::Enumerate,
            &BuildOptions::pruned(),
        )
        .unwrap();
        assert_eq!(e.nodes, 6);
        for f in [FamilyId::ClMtz, FamilyId::ClScf, FamilyId::Ap] {
            let r = solve_atsp(
                &inst,
                &FormulationId::fixed(f).unwrap(),
                Strategy::BranchAndBound,
                &BuildOptions::pruned(),
            )
            .unwrap();
            assert_eq!(r.value, e.value);
        }
    }

    #[test]
    fn bounds_ordered_on_random_instance() {
        let inst = Instance::generate(6, 3, GenMode::Uniform).unwrap();
        let ids: Vec<FormulationId> = [
            FamilyId::ClScf,
            FamilyId::ClDl,
            FamilyId::ClDlOnVmtz,
            FamilyId::ClMtz,
            FamilyId::Ap,
        ]
        .into_iter()
        .map(|f| FormulationId::fixed(f).unwrap())
        .collect();
        let t = lp_bound_table(&inst, &ids, &BuildOptions::pruned()).unwrap();
        assert!(t.monotone(), "{}", t.to_text());
        assert_eq!(t.checked, 10);
    }
}
