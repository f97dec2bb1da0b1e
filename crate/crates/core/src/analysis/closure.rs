use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{same_projection, PropositionReport};
use crate::error::Result;
use crate::formulations::{build_ap, build_ef, BuildOptions, FamilyId, FormulationId};
use crate::graph::{cover_is_tour, ArcSpace};
use crate::lp::{includes, LinSys};
use crate::params::{canonical_vertices, sample_interior, Family, Param, ParamKind};
use crate::point::XPoint;
use crate::rat::Rat;

/// Which closure identity to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosureKind {
    Mtz,
    Dl,
    Scf,
    /// `P_DL` intersected over `V_MTZ` only.
    DlOnVmtz,
}

impl ClosureKind {
    pub const ALL: [ClosureKind; 4] = [
        ClosureKind::Mtz,
        ClosureKind::Dl,
        ClosureKind::Scf,
        ClosureKind::DlOnVmtz,
    ];

    fn key(self) -> &'static str {
        match self {
            ClosureKind::Mtz => "mtz",
            ClosureKind::Dl => "dl",
            ClosureKind::Scf => "scf",
            ClosureKind::DlOnVmtz => "dl-vmtz",
        }
    }

    /// The explicit closure system.
    pub fn closure_id(self) -> FamilyId {
        match self {
            ClosureKind::Mtz => FamilyId::ClMtz,
            ClosureKind::Dl => FamilyId::ClDl,
            ClosureKind::Scf => FamilyId::ClScf,
            ClosureKind::DlOnVmtz => FamilyId::ClDlOnVmtz,
        }
    }

    /// Family of the formulations being intersected.
    pub fn member_family(self) -> FamilyId {
        match self {
            ClosureKind::Mtz => FamilyId::DMtz,
            ClosureKind::Dl | ClosureKind::DlOnVmtz => FamilyId::DDl,
            ClosureKind::Scf => FamilyId::BScf,
        }
    }

    fn ef_family(self) -> Family {
        match self {
            ClosureKind::Mtz => Family::Mtz,
            ClosureKind::Dl | ClosureKind::DlOnVmtz => Family::Dl,
            ClosureKind::Scf => Family::Scf,
        }
    }

    pub fn vertices(self, space: &ArcSpace) -> Vec<Param> {
        let fam = match self {
            ClosureKind::Mtz | ClosureKind::DlOnVmtz => Family::Mtz,
            ClosureKind::Dl => Family::Dl,
            ClosureKind::Scf => Family::Scf,
        };
        canonical_vertices(fam, space)
    }
}

fn is_family_row(tag: &str) -> bool {
    !(tag.starts_with("AP-") || tag.starts_with("lb(") || tag.starts_with("ub("))
}

/// `P_AP` together with the family rows of every listed system, tags prefixed by label.
pub fn intersect_x_systems(space: &ArcSpace, parts: &[(String, LinSys)]) -> Result<LinSys> {
    let mut sys = build_ap(space);
    for (label, p) in parts {
        for row in p.rows().iter().filter(|r| is_family_row(&r.tag)) {
            sys.add_row(
                format!("[{label}]{}", row.tag),
                row.kind,
                row.coeffs.clone(),
                row.rhs.clone(),
            )?;
        }
    }
    Ok(sys)
}

fn member_system(kind: ClosureKind, p: &Param, space: &ArcSpace, opts: &BuildOptions) -> Result<LinSys> {
    FormulationId::parametric(kind.member_family(), p.clone(), false)?.build(space, opts)
}

/// Checks one closure identity:
/// (i) the intersection over the canonical vertices equals the explicit closure (and,
/// when `with_ef`, so does the projection of the stacked extended formulation);
/// (ii) the closure lies inside the formulation of each sampled parameter;
/// (iii) boundary points of the closure lie in every sampled formulation, and points
/// just beyond them are cut off by some canonical vertex.
pub fn verify_closure(
    kind: ClosureKind,
    space: &ArcSpace,
    samples: usize,
    probes: usize,
    seed: u64,
    with_ef: bool,
) -> Result<PropositionReport> {
    let mut rep = PropositionReport::new(&format!("closure.{}", kind.key()), space.n());
    let opts = BuildOptions::pruned();
    let closure = FormulationId::fixed(kind.closure_id())?.build(space, &opts)?;
    let verts = kind.vertices(space);
    let vsys: Vec<(String, LinSys)> = verts
        .iter()
        .enumerate()
        .map(|(t, p)| {
            Ok((
                crate::formulations::vertex_label(p, t),
                member_system(kind, p, space, &opts)?,
            ))
        })
        .collect::<Result<_>>()?;
    let stacked = intersect_x_systems(space, &vsys)?;
    let (eq, why) = same_projection(&stacked, &closure, space)?;
    rep.check(
        "intersection over vertices equals closure",
        eq,
        format!("{} vertices: {why}", verts.len()),
    );

    if with_ef {
        let ef = build_ef(space, kind.ef_family(), &verts)?;
        let (eq, why) = same_projection(&ef, &closure, space)?;
        rep.check("stacked extended formulation projects onto closure", eq, why);
    }

    // The DL closure over V_MTZ is only claimed against its own vertices.
    let sampled: Vec<Param> = if kind == ClosureKind::DlOnVmtz {
        rep.note("sampled parameters replaced by the vertices of V_MTZ");
        verts.clone()
    } else {
        let pk = if kind == ClosureKind::Scf {
            ParamKind::B
        } else {
            ParamKind::D
        };
        (0..samples as u64)
            .map(|t| sample_interior(pk, space, seed + t))
            .collect::<Result<_>>()?
    };
    let ssys: Vec<LinSys> = sampled
        .iter()
        .map(|p| member_system(kind, p, space, &opts))
        .collect::<Result<_>>()?;
    let vars = crate::formulations::x_names(space);
    for (t, (p, s)) in sampled.iter().zip(&ssys).enumerate() {
        let inc = includes(&closure, s, &vars)?;
        rep.check(
            format!("closure inside sampled formulation {t}"),
            inc.holds(),
            "LP row maxima within right-hand sides",
        );
        if t < 3 {
            rep.param(p.to_json());
        }
    }

    let (inside_ok, outside_ok, count) = boundary_probes(space, &closure, &ssys, &vsys, probes, seed)?;
    rep.check(
        "boundary points lie in every sampled formulation",
        inside_ok == count,
        format!("{inside_ok}/{count}"),
    );
    rep.check(
        "points just outside are cut by a canonical vertex",
        outside_ok == count,
        format!("{outside_ok}/{count}"),
    );
    Ok(rep.finish())
}

/// Walks from the midpoint of a tour and the barycenter `(1/(n-1))·1` towards a
/// subtour cover until the first closure row becomes tight; that point is the boundary probe, and stepping `1 + 1/1000` times as far
/// gives the outside probe.
fn boundary_probes(
    space: &ArcSpace,
    closure: &LinSys,
    sampled: &[LinSys],
    verts: &[(String, LinSys)],
    probes: usize,
    seed: u64,
) -> Result<(usize, usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tours = space.tours(crate::formulations::DEFAULT_BUILD_CAP + 1)?;
    let covers: Vec<Vec<usize>> = space
        .cycle_covers()?
        .into_iter()
        .filter(|c| !cover_is_tour(c))
        .collect();
    let (mut inside_ok, mut outside_ok, mut count) = (0, 0, 0);
    let step = Rat::new(1001, 1000);
    let center = Rat::new(1, space.n() as i64 - 1);
    for _ in 0..probes {
        let t = tours.choose(&mut rng).expect("tours exist");
        let c = covers.choose(&mut rng).expect("subtour covers exist");
        let tour = XPoint::tour(space, t);
        let a = XPoint::from_fn(space, |i, j| (tour.get(i, j) + &center) / Rat::from_int(2));
        let b = XPoint::cover(space, c);
        if closure.contains(b.values()) {
            continue;
        }
        let (pa, pb) = (a.values(), b.values());
        let mut tmax: Option<Rat> = None;
        for row in closure.inequalities() {
            let (la, lb) = (row.lhs(pa), row.lhs(pb));
            if lb > la {
                let tr = (&row.rhs - &la) / (&lb - &la);
                if tmax.as_ref().is_none_or(|m| tr < *m) {
                    tmax = Some(tr);
                }
            }
        }
        let tmax = tmax.expect("the cover violates some row");
        let mix = |s: &Rat| -> XPoint { XPoint::from_fn(space, |i, j| a.get(i, j) + s * &(b.get(i, j) - a.get(i, j))) };
        let boundary = mix(&tmax);
        let beyond = &tmax * &step;
        let outside = mix(&(if beyond > Rat::one() { Rat::one() } else { beyond }));
        count += 1;
        if sampled.iter().all(|s| s.contains(boundary.values())) && closure.contains(boundary.values()) {
            inside_ok += 1;
        }
        if !closure.contains(outside.values()) && verts.iter().any(|(_, s)| !s.contains(outside.values())) {
            outside_ok += 1;
        }
    }
    Ok((inside_ok, outside_ok, count))
}
