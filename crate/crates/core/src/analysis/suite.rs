use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    census_report, dl_antisymmetric_report, lp_bound_table, mtz_facet_pair_report, mtz_rigidity_report,
    mtz_strict_report, same_projection, scf_incomparability_report, solve_atsp, verify_chain, verify_closure,
    verify_local_hull, ClosureKind, HullFamily, PropositionReport, Strategy,
};
use crate::error::Result;
use crate::formulations::{BuildOptions, FamilyId, FormulationId};
use crate::graph::{cover_is_tour, ArcSpace, Cycle};
use crate::instance::{GenMode, Instance};
use crate::params::{canonical_vertices, d_mtz, sample_interior, BVec, Family, Param, ParamKind};
use crate::point::XPoint;
use crate::projection::membership;
use crate::rat::Rat;

const PARAMETRIC: [(FamilyId, ParamKind); 3] = [
    (FamilyId::DMtz, ParamKind::D),
    (FamilyId::DDl, ParamKind::D),
    (FamilyId::BScf, ParamKind::B),
];

/// Knobs for the full verification sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub n: usize,
    pub seed: u64,
    /// Sampled parameters per family for validity, projection and closure checks.
    pub samples: usize,
    /// Boundary probes per closure.
    pub probes: usize,
    /// Seeded (d_ij, d_ji) pairs per local hull.
    pub hull_pairs: usize,
    /// Seeded instances for the solver cross-check.
    pub instances: usize,
    /// Also project the stacked extended formulations in the closure checks.
    pub with_ef: bool,
}

impl SuiteOptions {
    pub fn new(n: usize, seed: u64) -> Self {
        SuiteOptions {
            n,
            seed,
            samples: 3,
            probes: 20,
            hull_pairs: 10,
            instances: 5,
            with_ef: n <= 5,
        }
    }
}

fn seeded_params(kind: ParamKind, space: &ArcSpace, seed: u64, count: usize) -> Result<Vec<Param>> {
    (0..count as u64)
        .map(|t| sample_interior(kind, space, seed + t))
        .collect()
}

/// Membership over the integer points of `P_AP` (the cycle covers) accepts exactly
/// the tours, for seeded parameters of every parametric family.
pub fn validity_report(space: &ArcSpace, seed: u64, samples: usize) -> Result<PropositionReport> {
    let mut rep = PropositionReport::new("validity", space.n());
    let covers = space.cycle_covers()?;
    let opts = BuildOptions::default();
    for (fam, kind) in PARAMETRIC {
        for (t, p) in seeded_params(kind, space, seed, samples)?.into_iter().enumerate() {
            let id = FormulationId::parametric(fam, p, false)?;
            let (mut tours, mut accepted, mut others, mut rejected) = (0, 0, 0, 0);
            for c in &covers {
                let member = membership(&id, &XPoint::cover(space, c), &opts)?.member;
                if cover_is_tour(c) {
                    tours += 1;
                    accepted += member as usize;
                } else {
                    others += 1;
                    rejected += !member as usize;
                }
            }
            rep.check(
                format!("{fam} sample {t}"),
                accepted == tours && rejected == others,
                format!("tours accepted {accepted}/{tours}, other covers rejected {rejected}/{others}"),
            );
            if t == 0 {
                rep.param(id.param().unwrap().to_json());
            }
        }
    }
    Ok(rep.finish())
}

/// The extended systems project exactly onto the `x`-space descriptions.
pub fn projection_report(space: &ArcSpace, seed: u64, samples: usize) -> Result<PropositionReport> {
    let mut rep = PropositionReport::new("projection", space.n());
    let opts = BuildOptions::default();
    for (fam, kind) in PARAMETRIC {
        for (t, p) in seeded_params(kind, space, seed, samples)?.into_iter().enumerate() {
            let q = FormulationId::parametric(fam, p.clone(), true)?.build(space, &opts)?;
            let x = FormulationId::parametric(fam, p, false)?.build(space, &opts)?;
            let (eq, why) = same_projection(&q, &x, space)?;
            rep.check(format!("{fam} sample {t}: projection of Q equals P"), eq, why);
        }
    }
    Ok(rep.finish())
}

/// Interior, facet or boundary, and vertex parameters (plus `d^MTZ` for MTZ and DL).
pub fn census_params(family: Family, space: &ArcSpace, seed: u64) -> Result<Vec<(&'static str, Param)>> {
    let n = space.n();
    let vertex = canonical_vertices(family, space).swap_remove(0);
    Ok(match family {
        Family::Mtz | Family::Dl => {
            let c = Cycle::new(if n >= 5 { vec![2, 3, 4] } else { vec![2, 3] })?;
            vec![
                ("interior", sample_interior(ParamKind::D, space, seed)?),
                ("facet", Param::D(super::facet_interior_d(space, &c))),
                ("uniform", Param::D(d_mtz(space))),
                ("vertex", vertex),
            ]
        }
        Family::Scf => {
            let rest = Rat::new(1, n as i64 - 2);
            vec![
                ("interior", sample_interior(ParamKind::B, space, seed)?),
                (
                    "boundary",
                    Param::B(BVec::from_fn(
                        space,
                        |i| if i == 2 { Rat::zero() } else { rest.clone() },
                    )),
                ),
                ("vertex", vertex),
            ]
        }
    })
}

/// Seeded `(d_ij, d_ji)` pairs with `d_ij + d_ji <= 1`; every third pair sums to one.
pub fn hull_pairs(count: usize, seed: u64) -> Vec<(Rat, Rat)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|t| {
            let q: i64 = rng.gen_range(2..=9);
            let a: i64 = rng.gen_range(0..=q);
            let b: i64 = if t % 3 == 0 { q - a } else { rng.gen_range(0..=q - a) };
            (Rat::new(a, q), Rat::new(b, q))
        })
        .collect()
}

/// [`verify_local_hull`] over several pairs, folded into one report.
pub fn hull_report(family: HullFamily, pairs: &[(Rat, Rat)]) -> Result<PropositionReport> {
    let id = match family {
        HullFamily::Mtz => "hull.mtz",
        HullFamily::Dl => "hull.dl",
    };
    let mut rep = PropositionReport::new(id, 2);
    for (dij, dji) in pairs {
        let sub = verify_local_hull(family, dij, dji)?;
        for c in sub.checks {
            rep.check(format!("d = ({dij}, {dji}): {}", c.name), c.passed, c.detail);
        }
        rep.params.extend(sub.params);
        rep.notes
            .extend(sub.notes.into_iter().map(|s| format!("d = ({dij}, {dji}): {s}")));
    }
    Ok(rep.finish())
}

fn closure_ids() -> Vec<FormulationId> {
    [FamilyId::ClScf, FamilyId::ClDl, FamilyId::ClDlOnVmtz, FamilyId::ClMtz]
        .into_iter()
        .map(|f| FormulationId::fixed(f).expect("closures take no parameter"))
        .collect()
}

/// Branch and bound over each closure matches tour enumeration, and the LP bounds
/// are ordered along the known inclusions.
pub fn solver_report(n: usize, count: usize, seed: u64) -> Result<PropositionReport> {
    let mut rep = PropositionReport::new("solver", n);
    let opts = BuildOptions::pruned();
    let mut ids = closure_ids();
    ids.push(FormulationId::fixed(FamilyId::Ap)?);
    let mut node_totals = vec![0usize; 4];
    for t in 0..count as u64 {
        let mode = if t % 2 == 0 {
            GenMode::Uniform
        } else {
            GenMode::EuclideanAsym
        };
        let inst = Instance::generate(n, seed + t, mode)?;
        let best = solve_atsp(&inst, &ids[4], Strategy::Enumerate, &opts)?;
        for (k, id) in ids[..4].iter().enumerate() {
            let r = solve_atsp(&inst, id, Strategy::BranchAndBound, &opts)?;
            node_totals[k] += r.nodes;
            rep.check(
                format!("{}: {id} optimum", inst.name),
                r.value == best.value && inst.tour_cost(&r.tour) == r.value,
                format!("{} vs enumeration {} ({} nodes)", r.value, best.value, r.nodes),
            );
        }
        let table = lp_bound_table(&inst, &ids, &opts)?;
        rep.check(
            format!("{}: bounds monotone", inst.name),
            table.monotone(),
            table
                .rows
                .iter()
                .map(|r| format!("{} {}", r.formulation, r.value))
                .collect::<Vec<_>>()
                .join(", "),
        );
        rep.param(json!({ "instance": inst.name, "optimum": best.value }));
    }
    rep.note(format!(
        "branch-and-bound nodes: {}",
        ids[..4]
            .iter()
            .zip(&node_totals)
            .map(|(f, k)| format!("{f} {k}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    Ok(rep.finish())
}

/// The full sweep at one `n`, in a fixed order.
pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<PropositionReport>> {
    let space = ArcSpace::new(opts.n)?;
    let (n, seed) = (opts.n, opts.seed);
    let mut out = vec![
        validity_report(&space, seed, opts.samples)?,
        projection_report(&space, seed, opts.samples)?,
    ];
    for fam in [Family::Mtz, Family::Dl, Family::Scf] {
        out.push(census_report(fam, &census_params(fam, &space, seed)?, &space)?);
    }
    let pairs = hull_pairs(opts.hull_pairs, seed);
    out.push(hull_report(HullFamily::Mtz, &pairs)?);
    out.push(hull_report(HullFamily::Dl, &pairs)?);
    for kind in ClosureKind::ALL {
        out.push(verify_closure(
            kind,
            &space,
            opts.samples,
            opts.probes,
            seed,
            opts.with_ef,
        )?);
    }
    out.extend(verify_chain(&space)?);
    let seeds: Vec<u64> = (seed..seed + opts.samples as u64).collect();
    out.push(mtz_strict_report(&space, &seeds)?);
    let mut facet_pairs = vec![(Cycle::new(vec![2, 3])?, Cycle::new(vec![3, 4])?)];
    if n >= 5 {
        facet_pairs.push((Cycle::new(vec![2, 3, 4])?, Cycle::new(vec![2, 4, 5])?));
    }
    out.push(mtz_facet_pair_report(&space, &facet_pairs)?);
    out.push(dl_antisymmetric_report(&space, opts.samples, seed)?);
    out.push(mtz_rigidity_report(&space, opts.samples, seed)?);
    out.push(scf_incomparability_report(&space, opts.samples, seed)?);
    out.push(solver_report(n, opts.instances, seed)?);
    Ok(out)
}
