//! Deciding `x ∈ proj_x(Q)` constructively: shortest-path potentials for the
//! potential-based systems, a flow LP for the flow-based ones, and row evaluation for
//! systems already in `x` space.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulations::{
    build_ef, build_q_dl, build_q_mtz, build_q_scf, vertex_label, BuildOptions, FamilyId, FormulationId,
};
use crate::graph::{Arc, ArcSpace, Cycle, NodeSubset, ENUMERATION_CAP};
use crate::lp::{Certificate, LinSys, LpStatus, Sense, Simplex};
use crate::params::{canonical_vertices, BVec, DVec, Family, Param};
use crate::point::XPoint;
use crate::rat::Rat;

/// One row `u_i - u_j + α·x <= β` per arc `ij ∈ A1`.
/// One potential row per arc: the arc, its `x` coefficients and its right-hand side.
pub type PotentialRow = (Arc, Vec<(Arc, Rat)>, Rat);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialRows {
    space: ArcSpace,
    alpha: Vec<Vec<(Arc, Rat)>>,
    beta: Vec<Rat>,
}

impl PotentialRows {
    /// Rows given per arc of `A1`; every arc of `A1` must appear exactly once.
    pub fn new(space: &ArcSpace, rows: Vec<PotentialRow>) -> Result<Self> {
        let m = space.num_a1();
        let mut alpha = vec![None; m];
        let mut beta = vec![Rat::zero(); m];
        for ((i, j), a, b) in rows {
            if i == 1 || j == 1 || !space.is_arc((i, j)) {
                return Err(Error::arg(format!("row for ({i},{j}) is not indexed by A1")));
            }
            if let Some(((k, l), _)) = a.iter().find(|(arc, _)| !space.is_arc(*arc)) {
                return Err(Error::arg(format!("coefficient on non-arc ({k},{l})")));
            }
            let t = space.a1_index(i, j);
            if alpha[t].is_some() {
                return Err(Error::arg(format!("two rows for ({i},{j})")));
            }
            alpha[t] = Some(a);
            beta[t] = b;
        }
        let alpha = alpha
            .into_iter()
            .enumerate()
            .map(|(t, a)| {
                a.ok_or_else(|| {
                    let (i, j) = space.a1_at(t);
                    Error::arg(format!("no row for ({i},{j})"))
                })
            })
            .collect::<Result<_>>()?;
        Ok(PotentialRows {
            space: *space,
            alpha,
            beta,
        })
    }

    /// `u_i - u_j + x_ij <= 1 - d_ij`.
    pub fn mtz(d: &DVec) -> Self {
        let space = *d.space();
        PotentialRows {
            space,
            alpha: space.arcs_a1().map(|a| vec![(a, Rat::one())]).collect(),
            beta: space.arcs_a1().map(|(i, j)| Rat::one() - d.get(i, j)).collect(),
        }
    }

    /// `u_i - u_j + x_ij + (1 - d_ij - d_ji) x_ji <= 1 - d_ij`.
    pub fn dl(d: &DVec) -> Self {
        let space = *d.space();
        PotentialRows {
            space,
            alpha: space
                .arcs_a1()
                .map(|(i, j)| vec![((i, j), Rat::one()), ((j, i), Rat::one() - d.get(i, j) - d.get(j, i))])
                .collect(),
            beta: space.arcs_a1().map(|(i, j)| Rat::one() - d.get(i, j)).collect(),
        }
    }

    fn alpha_x(&self, t: usize, x: &XPoint) -> Rat {
        self.alpha[t].iter().map(|((k, l), a)| a * x.get(*k, *l)).sum()
    }

    /// `Σ_C α·x` and `Σ_C β`, the two sides of the projected row of `C`.
    pub fn cycle_row(&self, c: &Cycle, x: &XPoint) -> (Rat, Rat) {
        let mut lhs = Rat::zero();
        let mut rhs = Rat::zero();
        for (i, j) in c.arcs() {
            let t = self.space.a1_index(i, j);
            lhs += self.alpha_x(t, x);
            rhs += &self.beta[t];
        }
        (lhs, rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PotentialLift {
    /// `u[i]` for `i ∈ N1` (index 0 and 1 unused), with `u_h = 0` at the anchor.
    Lift(Vec<Rat>),
    /// A cycle whose projected row `Σ_C α·x <= Σ_C β` is violated.
    NegativeCycle { cycle: Cycle, lhs: Rat, rhs: Rat },
}

/// Shortest paths from node 2 on `c_ij = β^ij - α^ij·x`; see [`lift_potentials_from`].
pub fn lift_potentials(x: &XPoint, rows: &PotentialRows) -> Result<PotentialLift> {
    lift_potentials_from(x, rows, 2)
}

/// Sets `u_i = -dist(h, i)` for arc lengths `c_ij = β^ij - α^ij·x`, or returns a
/// cycle of negative length.
pub fn lift_potentials_from(x: &XPoint, rows: &PotentialRows, h: usize) -> Result<PotentialLift> {
    let space = rows.space;
    if x.space() != &space {
        return Err(Error::arg("x and rows live on different arc spaces"));
    }
    if h < 2 || h > space.n() {
        return Err(Error::arg(format!("anchor {h} is not in N1")));
    }
    let arcs: Vec<(Arc, Rat)> = space
        .arcs_a1()
        .enumerate()
        .map(|(t, a)| (a, &rows.beta[t] - rows.alpha_x(t, x)))
        .collect();
    let n = space.n();
    let mut dist: Vec<Option<Rat>> = vec![None; n + 1];
    let mut pred = vec![0usize; n + 1];
    dist[h] = Some(Rat::zero());
    let mut last = None;
    for _ in 0..n - 1 {
        last = None;
        for ((i, j), c) in &arcs {
            let Some(di) = &dist[*i] else { continue };
            let cand = di + c;
            if dist[*j].as_ref().is_none_or(|dj| cand < *dj) {
                dist[*j] = Some(cand);
                pred[*j] = *i;
                last = Some(*j);
            }
        }
        if last.is_none() {
            break;
        }
    }
    let Some(mut v) = last else {
        let mut u = vec![Rat::zero(); n + 1];
        for i in space.n1() {
            u[i] = -dist[i].clone().expect("complete digraph");
        }
        return Ok(PotentialLift::Lift(u));
    };
    for _ in 0..n {
        v = pred[v];
    }
    let mut nodes = vec![v];
    let mut w = pred[v];
    while w != v {
        nodes.push(w);
        w = pred[w];
    }
    nodes.reverse();
    let cycle = Cycle::new(nodes)?;
    let (lhs, rhs) = rows.cycle_row(&cycle, x);
    if lhs <= rhs {
        return Err(Error::Internal(format!(
            "cycle {cycle} from shortest paths is not negative"
        )));
    }
    Ok(PotentialLift::NegativeCycle { cycle, lhs, rhs })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowLift {
    /// `f` in arc-index order.
    Flow(Vec<Rat>),
    /// `S ⊆ N1` whose inflow capacity cannot carry its demand.
    DeficientCut {
        subset: NodeSubset,
        inflow: Rat,
        demand: Rat,
    },
}

fn flow_system(x: &XPoint, b: &BVec) -> LinSys {
    let space = *x.space();
    let names: Vec<String> = space.arcs().map(|(i, j)| format!("f[{i},{j}]")).collect();
    let mut sys = LinSys::with_vars(names).expect("distinct names");
    let f = |i: usize, j: usize| space.arc_index(i, j);
    let mut go = || -> Result<()> {
        for i in space.n1() {
            let terms = space
                .nodes()
                .filter(|&j| j != i)
                .flat_map(|j| [(f(i, j), Rat::one()), (f(j, i), -Rat::one())]);
            sys.add_eq(format!("flow({i})"), terms, -b.get(i).clone())?;
        }
        for (i, j) in space.arcs() {
            sys.add_le(format!("cap({i},{j})"), [(f(i, j), Rat::one())], x.get(i, j).clone())?;
            sys.add_ge(format!("fnn({i},{j})"), [(f(i, j), Rat::one())], Rat::zero())?;
        }
        Ok(())
    };
    go().expect("rows over known variables");
    sys
}

fn inflow(x: &XPoint, s: NodeSubset) -> Rat {
    let space = x.space();
    space
        .arcs()
        .filter(|&(i, j)| !s.contains(i) && s.contains(j))
        .map(|(i, j)| x.get(i, j))
        .sum()
}

/// Routes demand `b_i` from node 1 to every `i ∈ N1` within capacities `x`, or returns
/// a subset whose inflow is below its demand.
pub fn lift_flow(x: &XPoint, b: &BVec) -> Result<FlowLift> {
    if x.space() != b.space() {
        return Err(Error::arg("x and b live on different arc spaces"));
    }
    x.require_ap()?;
    let space = *x.space();
    let sys = flow_system(x, b);
    let res = Simplex::new(&sys).optimize(&[], Sense::Min)?;
    match (res.status, res.certificate) {
        (LpStatus::Optimal, _) => {
            let f = res.point.expect("optimal point");
            if !sys.contains(&f) {
                return Err(Error::Internal("flow LP returned an infeasible point".into()));
            }
            Ok(FlowLift::Flow(f))
        }
        (LpStatus::Infeasible, Certificate::Farkas(y)) => {
            let mut level = vec![Rat::zero(); space.n() + 1];
            for (k, i) in space.n1().enumerate() {
                level[i] = y[k].clone();
            }
            let mut candidates: Vec<NodeSubset> = Vec::new();
            for t in space.n1().map(|i| level[i].clone()) {
                candidates.push(NodeSubset::from_nodes(space.n1().filter(|&i| level[i] >= t)));
                candidates.push(NodeSubset::from_nodes(space.n1().filter(|&i| level[i] <= t)));
            }
            let deficit = |s: NodeSubset| b.subset_sum(s) - inflow(x, s);
            let best = candidates
                .into_iter()
                .filter(|s| !s.is_empty())
                .map(|s| (deficit(s), s))
                .filter(|(d, _)| d.is_positive())
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            let s = match best {
                Some((_, s)) => s,
                None => exhaustive_deficient(x, b)?,
            };
            Ok(FlowLift::DeficientCut {
                subset: s,
                inflow: inflow(x, s),
                demand: b.subset_sum(s),
            })
        }
        _ => Err(Error::Internal("flow feasibility LP is bounded".into())),
    }
}

fn exhaustive_deficient(x: &XPoint, b: &BVec) -> Result<NodeSubset> {
    let space = x.space();
    space.check_cap(ENUMERATION_CAP, "deficient cut search")?;
    space
        .enumerate_subsets(1, space.n() - 1)?
        .into_iter()
        .map(|s| (b.subset_sum(s) - inflow(x, s), s))
        .filter(|(d, _)| d.is_positive())
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
        .map(|(_, s)| s)
        .ok_or_else(|| Error::Internal("flow LP infeasible but every cut condition holds".into()))
}

/// Evidence for a membership verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data")]
pub enum MemberCertificate {
    /// Values of the auxiliary variables completing `x` to a point of the extended
    /// system (empty for systems in `x` space).
    #[serde(rename = "lift")]
    Lift(BTreeMap<String, Rat>),
    #[serde(rename = "negcycle")]
    NegCycle {
        block: Option<String>,
        cycle: Cycle,
        lhs: Rat,
        rhs: Rat,
    },
    #[serde(rename = "cut")]
    Cut {
        block: Option<String>,
        subset: NodeSubset,
        inflow: Rat,
        demand: Rat,
    },
    #[serde(rename = "row")]
    Row { tag: String, lhs: Rat, rhs: Rat },
    /// Nonzero multipliers, by row tag, of an infeasibility proof for the extended
    /// system with `x` fixed.
    #[serde(rename = "farkas")]
    Farkas(BTreeMap<String, Rat>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub member: bool,
    pub certificate: MemberCertificate,
}

impl MembershipReport {
    fn yes(lift: BTreeMap<String, Rat>) -> Self {
        MembershipReport {
            member: true,
            certificate: MemberCertificate::Lift(lift),
        }
    }

    fn no(certificate: MemberCertificate) -> Self {
        MembershipReport {
            member: false,
            certificate,
        }
    }
}

fn row_violation(sys: &LinSys, point: &[Rat]) -> Option<MemberCertificate> {
    sys.first_violation(point).map(|r| MemberCertificate::Row {
        tag: r.tag.clone(),
        lhs: r.lhs(point),
        rhs: r.rhs.clone(),
    })
}

/// Extends `x` by `aux` (named) and checks the result against `sys`.
fn verify_lift(sys: &LinSys, x: &XPoint, aux: &BTreeMap<String, Rat>) -> Result<()> {
    let named = x.named();
    let point = sys.point_from_names(named.iter().chain(aux.iter()).map(|(k, v)| (k.as_str(), v.clone())))?;
    match sys.first_violation(&point) {
        None => Ok(()),
        Some(r) => Err(Error::Internal(format!("constructed lift violates {}", r.tag))),
    }
}

fn potential_membership(
    x: &XPoint,
    d: &DVec,
    lifted: bool,
    block: Option<&str>,
) -> Result<std::result::Result<BTreeMap<String, Rat>, MemberCertificate>> {
    let rows = if lifted {
        PotentialRows::dl(d)
    } else {
        PotentialRows::mtz(d)
    };
    Ok(match lift_potentials(x, &rows)? {
        PotentialLift::Lift(u) => Ok(x
            .space()
            .n1()
            .map(|i| {
                let name = match block {
                    Some(l) => format!("u[{l}][{i}]"),
                    None => format!("u[{i}]"),
                };
                (name, u[i].clone())
            })
            .collect()),
        PotentialLift::NegativeCycle { cycle, lhs, rhs } => Err(MemberCertificate::NegCycle {
            block: block.map(str::to_string),
            cycle,
            lhs,
            rhs,
        }),
    })
}

fn flow_membership(
    x: &XPoint,
    b: &BVec,
    block: Option<&str>,
) -> Result<std::result::Result<BTreeMap<String, Rat>, MemberCertificate>> {
    Ok(match lift_flow(x, b)? {
        FlowLift::Flow(f) => Ok(x
            .space()
            .arcs()
            .zip(f)
            .map(|((i, j), v)| {
                let name = match block {
                    Some(l) => format!("f[{l}][{i},{j}]"),
                    None => format!("f[{i},{j}]"),
                };
                (name, v)
            })
            .collect()),
        FlowLift::DeficientCut { subset, inflow, demand } => Err(MemberCertificate::Cut {
            block: block.map(str::to_string),
            subset,
            inflow,
            demand,
        }),
    })
}

/// Feasibility of `sys` with the `x` variables fixed to `x`: the auxiliary values, or a
/// Farkas vector over the rows of `sys`.
pub fn lift_generic(
    sys: &LinSys,
    x: &XPoint,
) -> Result<std::result::Result<BTreeMap<String, Rat>, BTreeMap<String, Rat>>> {
    let named = x.named();
    let mut fixed: Vec<Option<Rat>> = vec![None; sys.num_vars()];
    for (k, v) in &named {
        let id = sys.require_var(k)?;
        fixed[id] = Some(v.clone());
    }
    let aux: Vec<usize> = (0..sys.num_vars()).filter(|&v| fixed[v].is_none()).collect();
    let mut pos = vec![usize::MAX; sys.num_vars()];
    for (k, &v) in aux.iter().enumerate() {
        pos[v] = k;
    }
    let mut red = LinSys::with_vars(aux.iter().map(|&v| sys.var_name(v).to_string()))?;
    for row in sys.rows() {
        let mut rhs = row.rhs.clone();
        let mut terms = Vec::new();
        for (v, a) in &row.coeffs {
            match &fixed[*v] {
                Some(val) => rhs -= a * val,
                None => terms.push((pos[*v], a.clone())),
            }
        }
        red.add_row(row.tag.clone(), row.kind, terms, rhs)?;
    }
    let res = Simplex::new(&red).optimize(&[], Sense::Min)?;
    match (res.status, res.certificate) {
        (LpStatus::Optimal, _) => {
            let p = res.point.expect("optimal point");
            Ok(Ok(aux
                .iter()
                .zip(p)
                .map(|(&v, val)| (sys.var_name(v).to_string(), val))
                .collect()))
        }
        (LpStatus::Infeasible, Certificate::Farkas(y)) => Ok(Err(sys
            .rows()
            .iter()
            .zip(y)
            .filter(|(_, m)| !m.is_zero())
            .map(|(r, m)| (r.tag.clone(), m))
            .collect())),
        _ => Err(Error::Internal("feasibility LP is bounded".into())),
    }
}

/// Exact membership of `x` in the `x`-projection of a formulation.
pub fn membership(id: &FormulationId, x: &XPoint, opts: &BuildOptions) -> Result<MembershipReport> {
    let space = *x.space();
    if let Some(cert) = row_violation(&crate::formulations::build_ap(&space), x.values()) {
        return Ok(MembershipReport::no(cert));
    }
    let single =
        |r: std::result::Result<BTreeMap<String, Rat>, MemberCertificate>, sys: LinSys| -> Result<MembershipReport> {
            match r {
                Ok(aux) => {
                    verify_lift(&sys, x, &aux)?;
                    Ok(MembershipReport::yes(aux))
                }
                Err(c) => Ok(MembershipReport::no(c)),
            }
        };
    let param = id.param();
    match id.family() {
        FamilyId::DMtz => {
            let d = param.and_then(Param::as_d).unwrap();
            single(potential_membership(x, d, false, None)?, build_q_mtz(&space, d)?)
        }
        FamilyId::DDl => {
            let d = param.and_then(Param::as_d).unwrap();
            single(potential_membership(x, d, true, None)?, build_q_dl(&space, d)?)
        }
        FamilyId::BScf => {
            let b = param.and_then(Param::as_b).unwrap();
            single(flow_membership(x, b, None)?, build_q_scf(&space, b)?)
        }
        FamilyId::EfMtz | FamilyId::EfDl | FamilyId::EfScf => {
            let fam = match id.family() {
                FamilyId::EfMtz => Family::Mtz,
                FamilyId::EfDl => Family::Dl,
                _ => Family::Scf,
            };
            let verts = canonical_vertices(fam, &space);
            let mut all = BTreeMap::new();
            for (t, p) in verts.iter().enumerate() {
                let label = vertex_label(p, t);
                let r = match p {
                    Param::D(d) => potential_membership(x, d, fam == Family::Dl, Some(&label))?,
                    Param::B(b) => flow_membership(x, b, Some(&label))?,
                };
                match r {
                    Ok(aux) => all.extend(aux),
                    Err(c) => return Ok(MembershipReport::no(c)),
                }
            }
            single(Ok(all), build_ef(&space, fam, &verts)?)
        }
        FamilyId::Rmtz | FamilyId::L1Rmtz | FamilyId::Mcf => {
            let sys = id.build(&space, opts)?;
            match lift_generic(&sys, x)? {
                Ok(aux) => single(Ok(aux), sys),
                Err(y) => Ok(MembershipReport::no(MemberCertificate::Farkas(y))),
            }
        }
        _ => {
            let sys = id.build(&space, opts)?;
            Ok(match row_violation(&sys, x.values()) {
                Some(c) => MembershipReport::no(c),
                None => MembershipReport::yes(BTreeMap::new()),
            })
        }
    }
}
