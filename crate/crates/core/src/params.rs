//! Parameter vectors `d` (on `A1`) and `b` (on `N1`), the sets `D`, `D̄`, `B`, `B̄`,
//! their canonical vertices and seeded sampling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Arc, ArcSpace, Cycle, NodeSubset, ENUMERATION_CAP};
use crate::rat::{rat, Rat};

/// A vector indexed by `A1`. Entries may be negative (perturbations).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DVec {
    space: ArcSpace,
    vals: Vec<Rat>,
}

impl DVec {
    pub fn zeros(space: &ArcSpace) -> Self {
        DVec {
            space: *space,
            vals: vec![Rat::zero(); space.num_a1()],
        }
    }

    pub fn uniform(space: &ArcSpace, v: Rat) -> Self {
        DVec {
            space: *space,
            vals: vec![v; space.num_a1()],
        }
    }

    pub fn from_fn(space: &ArcSpace, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        DVec {
            space: *space,
            vals: space.arcs_a1().map(|(i, j)| f(i, j)).collect(),
        }
    }

    pub fn space(&self) -> &ArcSpace {
        &self.space
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.vals[self.space.a1_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        let k = self.space.a1_index(i, j);
        self.vals[k] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Arc, &Rat)> + '_ {
        self.vals.iter().enumerate().map(|(k, v)| (self.space.a1_at(k), v))
    }

    pub fn values(&self) -> &[Rat] {
        &self.vals
    }

    pub fn cycle_sum(&self, c: &Cycle) -> Rat {
        c.arcs().map(|(i, j)| self.get(i, j)).sum()
    }

    pub fn min_entry(&self) -> Rat {
        self.vals.iter().min().cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.iter().all(Rat::is_zero)
    }

    pub fn scaled(&self, s: &Rat) -> DVec {
        DVec {
            space: self.space,
            vals: self.vals.iter().map(|v| v * s).collect(),
        }
    }

    pub fn plus(&self, other: &DVec) -> DVec {
        DVec {
            space: self.space,
            vals: self.vals.iter().zip(&other.vals).map(|(a, b)| a + b).collect(),
        }
    }

    /// Maximum cycle sum over `C1` and the first cycle attaining it.
    pub fn max_cycle(&self) -> Result<(Cycle, Rat)> {
        self.space.check_cap(ENUMERATION_CAP, D_BAR_CAP_REASON)?;
        let mut best: Option<(Cycle, Rat)> = None;
        self.space.for_each_cycle(2, self.space.n() - 1, |c| {
            let s = self.cycle_sum(c);
            if best.as_ref().is_none_or(|(_, b)| s > *b) {
                best = Some((c.clone(), s));
            }
        })?;
        Ok(best.expect("C1 is nonempty for n >= 4"))
    }
}

/// A vector indexed by `N1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BVec {
    space: ArcSpace,
    vals: Vec<Rat>,
}

impl BVec {
    pub fn from_fn(space: &ArcSpace, mut f: impl FnMut(usize) -> Rat) -> Self {
        BVec {
            space: *space,
            vals: space.n1().map(&mut f).collect(),
        }
    }

    pub fn uniform(space: &ArcSpace) -> Self {
        let v = rat(1, space.n() as i64 - 1);
        Self::from_fn(space, |_| v.clone())
    }

    /// The canonical vector `b^k`.
    pub fn unit(space: &ArcSpace, k: usize) -> Self {
        Self::from_fn(space, |i| if i == k { Rat::one() } else { Rat::zero() })
    }

    pub fn space(&self) -> &ArcSpace {
        &self.space
    }

    pub fn get(&self, i: usize) -> &Rat {
        &self.vals[i - 2]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rat)> + '_ {
        self.vals.iter().enumerate().map(|(k, v)| (k + 2, v))
    }

    pub fn subset_sum(&self, s: NodeSubset) -> Rat {
        s.iter().filter(|&i| i >= 2).map(|i| self.get(i)).sum()
    }

    pub fn total(&self) -> Rat {
        self.vals.iter().sum()
    }
}

/// Why `D̄` membership and separation enumerate cycles instead of using a
/// polynomial oracle.
pub const D_BAR_CAP_REASON: &str = "membership in the closed d-parameter polytope is decided by exhaustive cycle \
     enumeration, because separation over that polytope is NP-hard";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    /// In `D` (resp. `B`): positive entries.
    Interior,
    /// In the closure only: some entry is zero.
    Boundary,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DMembership {
    pub status: Membership,
    pub worst_cycle: Cycle,
    pub worst_sum: Rat,
}

pub fn d_membership(d: &DVec) -> Result<DMembership> {
    let (worst_cycle, worst_sum) = d.max_cycle()?;
    let min = d.min_entry();
    let status = if min.is_negative() || worst_sum > Rat::one() {
        Membership::Outside
    } else if min.is_zero() {
        Membership::Boundary
    } else {
        Membership::Interior
    };
    Ok(DMembership {
        status,
        worst_cycle,
        worst_sum,
    })
}

pub fn b_membership(b: &BVec) -> Membership {
    let min = b.vals.iter().min().cloned().unwrap_or_default();
    if min.is_negative() || b.total() != Rat::one() {
        Membership::Outside
    } else if min.is_zero() {
        Membership::Boundary
    } else {
        Membership::Interior
    }
}

/// `d^MTZ`, every entry `1/(n-1)`.
pub fn d_mtz(space: &ArcSpace) -> DVec {
    DVec::uniform(space, rat(1, space.n() as i64 - 1))
}

/// `d^k`: one on arcs leaving `k`, zero elsewhere.
pub fn d_tail(space: &ArcSpace, k: usize) -> DVec {
    DVec::from_fn(space, |i, _| if i == k { Rat::one() } else { Rat::zero() })
}

/// `d^{kl}`: the unit vector of arc `kl`.
pub fn d_unit(space: &ArcSpace, k: usize, l: usize) -> DVec {
    DVec::from_fn(space, |i, j| if (i, j) == (k, l) { Rat::one() } else { Rat::zero() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Mtz,
    Dl,
    Scf,
}

/// A parameter of either shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Param {
    D(DVec),
    B(BVec),
}

impl Param {
    pub fn as_d(&self) -> Option<&DVec> {
        match self {
            Param::D(d) => Some(d),
            Param::B(_) => None,
        }
    }

    pub fn as_b(&self) -> Option<&BVec> {
        match self {
            Param::B(b) => Some(b),
            Param::D(_) => None,
        }
    }
}

/// `V_MTZ = {d^k}`, `V_DL = {d^{kl}}` or `V_SCF = {b^k}`.
pub fn canonical_vertices(family: Family, space: &ArcSpace) -> Vec<Param> {
    match family {
        Family::Mtz => space.n1().map(|k| Param::D(d_tail(space, k))).collect(),
        Family::Dl => space.arcs_a1().map(|(k, l)| Param::D(d_unit(space, k, l))).collect(),
        Family::Scf => space.n1().map(|k| Param::B(BVec::unit(space, k))).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamKind {
    D,
    B,
}

/// Positive integer entries in `1..=100`, scaled so the worst cycle sums to `1/2`.
pub fn sample_interior_d(space: &ArcSpace, seed: u64) -> Result<DVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = DVec::from_fn(space, |_, _| Rat::from_int(rng.gen_range(1..=100)));
    let (_, worst) = raw.max_cycle()?;
    Ok(raw.scaled(&(rat(1, 2) / worst)))
}

/// Positive integer entries in `1..=100`, normalized to sum one.
pub fn sample_interior_b(space: &ArcSpace, seed: u64) -> BVec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = BVec::from_fn(space, |_| Rat::from_int(rng.gen_range(1..=100)));
    let total = raw.total();
    BVec::from_fn(space, |i| raw.get(i) / &total)
}

pub fn sample_interior(kind: ParamKind, space: &ArcSpace, seed: u64) -> Result<Param> {
    Ok(match kind {
        ParamKind::D => Param::D(sample_interior_d(space, seed)?),
        ParamKind::B => Param::B(sample_interior_b(space, seed)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perturbation {
    pub delta: DVec,
    /// Some cycle of `C1` with at least three arcs has a nonzero `δ` sum.
    pub long_cycle_nonzero: bool,
    /// `δ_ij = p_i - p_j` for node potentials `p`, so every cycle sum vanishes.
    pub gradient: bool,
}

pub fn is_antisymmetric(delta: &DVec) -> bool {
    delta.iter().all(|((i, j), v)| *v == -delta.get(j, i))
}

pub fn long_cycle_nonzero(delta: &DVec) -> Result<bool> {
    let mut found = false;
    let sp = *delta.space();
    if sp.n() - 1 < 3 {
        return Ok(false);
    }
    sp.for_each_cycle(3, sp.n() - 1, |c| {
        found |= !delta.cycle_sum(c).is_zero();
    })?;
    Ok(found)
}

fn stays_in_d(d: &DVec, delta: &DVec) -> Result<bool> {
    Ok(d_membership(&d.plus(delta))?.status == Membership::Interior)
}

/// A nonzero anti-symmetric `δ`. The first attempts put `±ε` on one random
/// triangle of `N1`; if `stay_in_d` rejects every `ε`, node-potential differences
/// (which leave all cycle sums unchanged) are tried instead.
pub fn antisymmetric_perturbation(d: &DVec, seed: u64, stay_in_d: bool) -> Result<Perturbation> {
    let sp = *d.space();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<usize> = sp.n1().collect();
    let mut tri = Vec::new();
    while tri.len() < 3 {
        let v = nodes[rng.gen_range(0..nodes.len())];
        if !tri.contains(&v) {
            tri.push(v);
        }
    }
    let base = d.min_entry().abs().max(rat(1, 1000));
    let mut eps = base.clone() / Rat::from_int(rng.gen_range(2..=9));
    for _ in 0..24 {
        let mut delta = DVec::zeros(&sp);
        for k in 0..3 {
            let (i, j) = (tri[k], tri[(k + 1) % 3]);
            delta.set(i, j, eps.clone());
            delta.set(j, i, -&eps);
        }
        if !stay_in_d || stays_in_d(d, &delta)? {
            return Ok(Perturbation {
                long_cycle_nonzero: long_cycle_nonzero(&delta)?,
                delta,
                gradient: false,
            });
        }
        eps = eps / Rat::from_int(2);
    }
    let potentials: Vec<Rat> = loop {
        let p: Vec<Rat> = nodes.iter().map(|_| Rat::from_int(rng.gen_range(-3..=3))).collect();
        if p.iter().any(|v| *v != p[0]) {
            break p;
        }
    };
    let mut eps = base / Rat::from_int(7);
    for _ in 0..24 {
        let delta = DVec::from_fn(&sp, |i, j| (&potentials[i - 2] - &potentials[j - 2]) * &eps);
        if !stay_in_d || stays_in_d(d, &delta)? {
            return Ok(Perturbation {
                long_cycle_nonzero: false,
                delta,
                gradient: true,
            });
        }
        eps = eps / Rat::from_int(2);
    }
    Err(Error::Sampling(
        "no anti-symmetric perturbation keeps the parameter inside D".into(),
    ))
}

#[derive(Serialize, Deserialize)]
struct ParamJson {
    kind: String,
    entries: BTreeMap<String, Rat>,
}

impl Param {
    pub fn to_json(&self) -> serde_json::Value {
        let (kind, entries) = match self {
            Param::D(d) => (
                "d",
                d.iter().map(|((i, j), v)| (format!("{i},{j}"), v.clone())).collect(),
            ),
            Param::B(b) => ("b", b.iter().map(|(i, v)| (i.to_string(), v.clone())).collect()),
        };
        serde_json::to_value(ParamJson {
            kind: kind.into(),
            entries,
        })
        .expect("parameters serialize")
    }

    pub fn from_json(v: &serde_json::Value, space: &ArcSpace) -> Result<Param> {
        let pj: ParamJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::arg(format!("malformed parameter JSON: {e}")))?;
        let missing = |k: &str| Error::arg(format!("parameter entry {k} missing"));
        match pj.kind.as_str() {
            "d" => {
                if pj.entries.len() != space.num_a1() {
                    return Err(Error::arg(format!(
                        "d needs {} entries, got {}",
                        space.num_a1(),
                        pj.entries.len()
                    )));
                }
                let mut out = DVec::zeros(space);
                for (i, j) in space.arcs_a1() {
                    let k = format!("{i},{j}");
                    out.set(i, j, pj.entries.get(&k).ok_or_else(|| missing(&k))?.clone());
                }
                Ok(Param::D(out))
            }
            "b" => {
                if pj.entries.len() != space.n() - 1 {
                    return Err(Error::arg(format!(
                        "b needs {} entries, got {}",
                        space.n() - 1,
                        pj.entries.len()
                    )));
                }
                let mut vals = Vec::new();
                for i in space.n1() {
                    let k = i.to_string();
                    vals.push(pj.entries.get(&k).ok_or_else(|| missing(&k))?.clone());
                }
                Ok(Param::B(BVec { space: *space, vals }))
            }
            other => Err(Error::arg(format!("unknown parameter kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(n: usize) -> ArcSpace {
        ArcSpace::new(n).unwrap()
    }

    #[test]
    fn mtz_vector_is_interior_and_tight_on_long_cycles() {
        let m = d_membership(&d_mtz(&sp(5))).unwrap();
        assert_eq!(m.status, Membership::Interior);
        assert_eq!(m.worst_sum, Rat::one());
        assert_eq!(m.worst_cycle.len(), 4);
    }

    #[test]
    fn zero_is_boundary_and_heavy_two_cycle_outside() {
        let s = sp(5);
        assert_eq!(d_membership(&DVec::zeros(&s)).unwrap().status, Membership::Boundary);
        let mut d = DVec::zeros(&s);
        d.set(3, 4, rat(5, 8));
        d.set(4, 3, rat(1, 2));
        let m = d_membership(&d).unwrap();
        assert_eq!(m.status, Membership::Outside);
        assert_eq!(m.worst_cycle, Cycle::new(vec![3, 4]).unwrap());
        assert_eq!(m.worst_sum, rat(9, 8));
    }

    #[test]
    fn capacity_error_names_hardness() {
        let s = sp(13);
        match d_membership(&d_mtz(&s)) {
            Err(Error::Capacity { what, .. }) => assert!(what.contains("NP-hard")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn canonical_vertices_are_boundary_members() {
        let s = sp(5);
        let mtz = canonical_vertices(Family::Mtz, &s);
        assert_eq!(mtz.len(), 4);
        for p in &mtz {
            let d = p.as_d().unwrap();
            assert_eq!(d.values().iter().filter(|v| v.is_one()).count(), 3);
            assert_eq!(d_membership(d).unwrap().status, Membership::Boundary);
        }
        let dl = canonical_vertices(Family::Dl, &s);
        assert_eq!(dl.len(), 12);
        for p in &dl {
            assert_eq!(d_membership(p.as_d().unwrap()).unwrap().status, Membership::Boundary);
        }
        for p in canonical_vertices(Family::Scf, &s) {
            assert_eq!(b_membership(p.as_b().unwrap()), Membership::Boundary);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_interior() {
        let s = sp(5);
        let a = sample_interior_d(&s, 11).unwrap();
        assert_eq!(a, sample_interior_d(&s, 11).unwrap());
        let m = d_membership(&a).unwrap();
        assert_eq!(m.status, Membership::Interior);
        assert_eq!(m.worst_sum, rat(1, 2));
        let b = sample_interior_b(&s, 3);
        assert_eq!(b.total(), Rat::one());
        assert_eq!(b_membership(&b), Membership::Interior);
    }

    #[test]
    fn triangle_perturbation_of_interior_point() {
        let s = sp(5);
        let d = sample_interior_d(&s, 2).unwrap();
        let p = antisymmetric_perturbation(&d, 9, true).unwrap();
        assert!(is_antisymmetric(&p.delta));
        assert!(!p.delta.is_zero());
        assert!(p.long_cycle_nonzero);
        assert!(!p.gradient);
        assert_eq!(d_membership(&d.plus(&p.delta)).unwrap().status, Membership::Interior);
    }

    #[test]
    fn mtz_vector_only_admits_gradients() {
        let s = sp(5);
        let d = d_mtz(&s);
        let p = antisymmetric_perturbation(&d, 4, true).unwrap();
        assert!(p.gradient);
        assert!(!p.long_cycle_nonzero);
        assert!(is_antisymmetric(&p.delta));
    }

    #[test]
    fn degenerate_example_has_vanishing_cycle_sums() {
        let s = sp(4);
        let mut delta = DVec::zeros(&s);
        for (i, j, v) in [(3, 2, rat(1, 1)), (3, 4, rat(1, 2)), (4, 2, rat(1, 2))] {
            delta.set(i, j, v.clone());
            delta.set(j, i, -v);
        }
        assert!(is_antisymmetric(&delta));
        for c in s.all_cycles().unwrap() {
            assert!(delta.cycle_sum(&c).is_zero());
        }
        assert!(!long_cycle_nonzero(&delta).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let s = sp(4);
        let d = Param::D(sample_interior_d(&s, 1).unwrap());
        let js = d.to_json();
        assert_eq!(js["kind"], "d");
        assert_eq!(Param::from_json(&js, &s).unwrap(), d);
        let b = Param::B(BVec::uniform(&s));
        assert_eq!(b.to_json()["entries"]["2"], "1/3");
        assert_eq!(Param::from_json(&b.to_json(), &s).unwrap(), b);
    }
}
