//! Builders for every formulation as a [`LinSys`] over a fixed variable catalog.
//!
//! The `x` variables always come first, in [`ArcSpace::arc_index`] order, so the id of
//! `x[i,j]` in any built system equals the arc index of `ij`.

mod classic;
mod closure;
mod parametric;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use classic::{
    build_circuit, build_classic_dl, build_classic_mtz, build_classic_scf, build_classics, build_dfj_clique,
    build_dfj_cut, build_l1rmtz, build_lifted_weak_circuit, build_mcf, build_rmtz, build_weak_circuit,
    build_weak_clique,
};
pub use closure::{
    build_cl_dl, build_cl_dl_on_vmtz, build_cl_mtz, build_cl_scf, build_closures, build_ef, vertex_label,
};
pub use parametric::{build_p_dl, build_p_mtz, build_p_scf, build_q_dl, build_q_mtz, build_q_scf};

use crate::error::{Error, Result};
use crate::graph::{ArcSpace, Cycle, NodeSubset};
use crate::lp::LinSys;
use crate::params::{BVec, DVec, Family, Param};
use crate::rat::Rat;

/// Largest `n` for which builders enumerate cycles or subsets unless overridden.
pub const DEFAULT_BUILD_CAP: usize = 8;

/// Which rendering of a subset row to emit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScfForm {
    /// `Σ_{δ⁺(S)} x >= rhs`.
    #[default]
    Cut,
    /// `Σ_{A(S)} x <= |S| - rhs`.
    Clique,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Drop rows implied by the assignment rows and bounds: cycles of length `n-1`,
    /// subsets equal to `N1`, and rows whose parameter sum vanishes.
    pub prune: bool,
    pub scf_form: ScfForm,
    pub cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            prune: false,
            scf_form: ScfForm::Cut,
            cap: DEFAULT_BUILD_CAP,
        }
    }
}

impl BuildOptions {
    pub fn pruned() -> Self {
        BuildOptions {
            prune: true,
            ..Self::default()
        }
    }

    pub fn with_form(mut self, form: ScfForm) -> Self {
        self.scf_form = form;
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub(crate) fn check(&self, space: &ArcSpace, what: &str) -> Result<()> {
        space.check_cap(self.cap, what)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyId {
    Ap,
    DMtz,
    DDl,
    BScf,
    DfjClique,
    DfjCut,
    Circuit,
    WeakCircuit,
    WeakClique,
    LiftedWeakCircuit,
    Rmtz,
    L1Rmtz,
    Mcf,
    ClMtz,
    ClDl,
    ClScf,
    EfMtz,
    EfDl,
    EfScf,
    ClDlOnVmtz,
}

impl FamilyId {
    pub const ALL: [FamilyId; 20] = [
        FamilyId::Ap,
        FamilyId::DMtz,
        FamilyId::DDl,
        FamilyId::BScf,
        FamilyId::DfjClique,
        FamilyId::DfjCut,
        FamilyId::Circuit,
        FamilyId::WeakCircuit,
        FamilyId::WeakClique,
        FamilyId::LiftedWeakCircuit,
        FamilyId::Rmtz,
        FamilyId::L1Rmtz,
        FamilyId::Mcf,
        FamilyId::ClMtz,
        FamilyId::ClDl,
        FamilyId::ClScf,
        FamilyId::EfMtz,
        FamilyId::EfDl,
        FamilyId::EfScf,
        FamilyId::ClDlOnVmtz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Ap => "AP",
            FamilyId::DMtz => "dMTZ",
            FamilyId::DDl => "dDL",
            FamilyId::BScf => "bSCF",
            FamilyId::DfjClique => "DFJ-clique",
            FamilyId::DfjCut => "DFJ-cut",
            FamilyId::Circuit => "circuit",
            FamilyId::WeakCircuit => "weak-circuit",
            FamilyId::WeakClique => "weak-clique",
            FamilyId::LiftedWeakCircuit => "lifted-weak-circuit",
            FamilyId::Rmtz => "RMTZ",
            FamilyId::L1Rmtz => "L1RMTZ",
            FamilyId::Mcf => "MCF",
            FamilyId::ClMtz => "Cl-MTZ",
            FamilyId::ClDl => "Cl-DL",
            FamilyId::ClScf => "Cl-SCF",
            FamilyId::EfMtz => "Ef-MTZ",
            FamilyId::EfDl => "Ef-DL",
            FamilyId::EfScf => "Ef-SCF",
            FamilyId::ClDlOnVmtz => "Cl-DL-on-VMTZ",
        }
    }

    /// The parameter family for the three parametric families.
    pub fn param_family(self) -> Option<Family> {
        match self {
            FamilyId::DMtz => Some(Family::Mtz),
            FamilyId::DDl => Some(Family::Dl),
            FamilyId::BScf => Some(Family::Scf),
            _ => None,
        }
    }

    pub fn is_parametric(self) -> bool {
        self.param_family().is_some()
    }

    /// Whether the family is only defined with auxiliary variables.
    pub fn always_extended(self) -> bool {
        matches!(
            self,
            FamilyId::Rmtz | FamilyId::L1Rmtz | FamilyId::Mcf | FamilyId::EfMtz | FamilyId::EfDl | FamilyId::EfScf
        )
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::arg(format!("unknown formulation family {s}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarSpace {
    XOnly,
    Extended,
}

/// A formulation: its family, parameter (for the parametric families) and whether the
/// auxiliary variables are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulationId {
    family: FamilyId,
    param: Option<Param>,
    vars: VarSpace,
}

impl FormulationId {
    /// A non-parametric formulation in its natural variable space.
    pub fn fixed(family: FamilyId) -> Result<Self> {
        if family.is_parametric() {
            return Err(Error::arg(format!("{family} needs a parameter")));
        }
        let vars = if family.always_extended() {
            VarSpace::Extended
        } else {
            VarSpace::XOnly
        };
        Ok(FormulationId {
            family,
            param: None,
            vars,
        })
    }

    /// A parametric formulation; `extended` selects `Q` over its projection `P`.
    pub fn parametric(family: FamilyId, param: Param, extended: bool) -> Result<Self> {
        let pf = family
            .param_family()
            .ok_or_else(|| Error::arg(format!("{family} takes no parameter")))?;
        let shape_ok = match pf {
            Family::Mtz | Family::Dl => param.as_d().is_some(),
            Family::Scf => param.as_b().is_some(),
        };
        if !shape_ok {
            return Err(Error::arg(format!("wrong parameter shape for {family}")));
        }
        Ok(FormulationId {
            family,
            param: Some(param),
            vars: if extended { VarSpace::Extended } else { VarSpace::XOnly },
        })
    }

    pub fn family(&self) -> FamilyId {
        self.family
    }

    pub fn param(&self) -> Option<&Param> {
        self.param.as_ref()
    }

    pub fn var_space(&self) -> VarSpace {
        self.vars
    }

    pub fn build(&self, space: &ArcSpace, opts: &BuildOptions) -> Result<LinSys> {
        let ext = self.vars == VarSpace::Extended;
        let d = || self.param.as_ref().and_then(Param::as_d).unwrap();
        let b = || self.param.as_ref().and_then(Param::as_b).unwrap();
        match self.family {
            FamilyId::Ap => Ok(build_ap(space)),
            FamilyId::DMtz if ext => build_q_mtz(space, d()),
            FamilyId::DMtz => build_p_mtz(space, d(), opts),
            FamilyId::DDl if ext => build_q_dl(space, d()),
            FamilyId::DDl => build_p_dl(space, d(), opts),
            FamilyId::BScf if ext => build_q_scf(space, b()),
            FamilyId::BScf => build_p_scf(space, b(), opts),
            FamilyId::DfjClique => build_dfj_clique(space, opts),
            FamilyId::DfjCut => build_dfj_cut(space, opts),
            FamilyId::Circuit => build_circuit(space, opts),
            FamilyId::WeakCircuit => build_weak_circuit(space, opts),
            FamilyId::WeakClique => build_weak_clique(space, opts),
            FamilyId::LiftedWeakCircuit => build_lifted_weak_circuit(space, opts),
            FamilyId::Rmtz => Ok(build_rmtz(space)),
            FamilyId::L1Rmtz => Ok(build_l1rmtz(space)),
            FamilyId::Mcf => Ok(build_mcf(space)),
            FamilyId::ClMtz => build_cl_mtz(space, opts),
            FamilyId::ClDl => build_cl_dl(space, opts),
            FamilyId::ClScf => build_cl_scf(space, opts),
            FamilyId::EfMtz => build_ef(
                space,
                Family::Mtz,
                &crate::params::canonical_vertices(Family::Mtz, space),
            ),
            FamilyId::EfDl => build_ef(space, Family::Dl, &crate::params::canonical_vertices(Family::Dl, space)),
            FamilyId::EfScf => build_ef(
                space,
                Family::Scf,
                &crate::params::canonical_vertices(Family::Scf, space),
            ),
            FamilyId::ClDlOnVmtz => build_cl_dl_on_vmtz(space, opts),
        }
    }
}

impl fmt::Display for FormulationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.family.is_parametric() && self.vars == VarSpace::Extended {
            write!(f, "Q-{}", self.family)
        } else {
            write!(f, "{}", self.family)
        }
    }
}

impl FormulationId {
    /// `{"family": name, "param": param JSON or null, "extended": bool}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "family": self.family.name(),
            "param": self.param.as_ref().map(Param::to_json),
            "extended": self.vars == VarSpace::Extended,
        })
    }

    pub fn from_json(v: &serde_json::Value, space: &ArcSpace) -> Result<Self> {
        let family: FamilyId = v["family"]
            .as_str()
            .ok_or_else(|| Error::arg("formulation JSON lacks \"family\""))?
            .parse()?;
        if family.is_parametric() {
            let param = Param::from_json(&v["param"], space)?;
            Self::parametric(family, param, v["extended"].as_bool().unwrap_or(false))
        } else {
            Self::fixed(family)
        }
    }
}

pub fn x_name(i: usize, j: usize) -> String {
    format!("x[{i},{j}]")
}

/// Names of all `x` variables in arc-index order.
pub fn x_names(space: &ArcSpace) -> Vec<String> {
    space.arcs().map(|(i, j)| x_name(i, j)).collect()
}

fn x_catalog(space: &ArcSpace) -> LinSys {
    LinSys::with_vars(x_names(space)).expect("arc names are distinct")
}

fn x(space: &ArcSpace, i: usize, j: usize) -> usize {
    space.arc_index(i, j)
}

fn one() -> Rat {
    Rat::one()
}

fn int(v: usize) -> Rat {
    Rat::from(v)
}

/// `P_AP`: out- and in-degree one at every node, `0 <= x <= 1`.
pub fn build_ap(space: &ArcSpace) -> LinSys {
    let mut sys = x_catalog(space);
    add_ap_rows(&mut sys, space);
    sys
}

fn add_ap_rows(sys: &mut LinSys, space: &ArcSpace) {
    try_ap_rows(sys, space).expect("assignment rows are well formed");
}

fn try_ap_rows(sys: &mut LinSys, space: &ArcSpace) -> Result<()> {
    for i in space.nodes() {
        let out = space.nodes().filter(|&j| j != i).map(|j| (x(space, i, j), one()));
        sys.add_eq(format!("AP-out({i})"), out, one())?;
    }
    for i in space.nodes() {
        let inn = space.nodes().filter(|&j| j != i).map(|j| (x(space, j, i), one()));
        sys.add_eq(format!("AP-in({i})"), inn, one())?;
    }
    for (i, j) in space.arcs() {
        sys.add_ge(format!("lb({i},{j})"), [(x(space, i, j), one())], Rat::zero())?;
    }
    for (i, j) in space.arcs() {
        sys.add_le(format!("ub({i},{j})"), [(x(space, i, j), one())], one())?;
    }
    Ok(())
}

/// `x_ij + x_ji <= 1` for every unordered pair of `N1`.
pub fn add_pair_rows(sys: &mut LinSys, space: &ArcSpace) -> Result<()> {
    for (i, j) in space.arcs_a1().filter(|&(i, j)| i < j) {
        sys.add_le(
            format!("pair({i},{j})"),
            [(x(space, i, j), one()), (x(space, j, i), one())],
            one(),
        )?;
    }
    Ok(())
}

fn cycles(space: &ArcSpace, min_len: usize, opts: &BuildOptions) -> Result<Vec<Cycle>> {
    opts.check(space, "cycle enumeration")?;
    let max = space.n() - 1;
    if min_len > max {
        return Ok(Vec::new());
    }
    space.enumerate_cycles(min_len, max)
}

fn subsets(space: &ArcSpace, opts: &BuildOptions) -> Result<Vec<NodeSubset>> {
    opts.check(space, "subset enumeration")?;
    space.enumerate_subsets(2, space.n() - 1)
}

/// A subset row `Σ_{δ⁺(S)} x >= rhs` in the requested rendering.
fn add_subset_row(
    sys: &mut LinSys,
    space: &ArcSpace,
    prefix: &str,
    s: NodeSubset,
    rhs: Rat,
    form: ScfForm,
) -> Result<()> {
    match form {
        ScfForm::Cut => {
            let terms = space.delta_plus(s)?.into_iter().map(|(i, j)| (x(space, i, j), one()));
            sys.add_ge(format!("{prefix}{s}"), terms, rhs)
        }
        ScfForm::Clique => {
            let terms = space.arcs_within(s).into_iter().map(|(i, j)| (x(space, i, j), one()));
            sys.add_le(format!("{prefix}{s}"), terms, int(s.len()) - rhs)
        }
    }
}

fn check_d(space: &ArcSpace, d: &DVec) -> Result<()> {
    if d.space() != space {
        return Err(Error::arg("parameter built for a different n"));
    }
    if d.min_entry().is_negative() {
        return Err(Error::arg("d has a negative entry"));
    }
    Ok(())
}

fn check_b(space: &ArcSpace, b: &BVec) -> Result<()> {
    if b.space() != space {
        return Err(Error::arg("parameter built for a different n"));
    }
    if b.iter().any(|(_, v)| v.is_negative()) {
        return Err(Error::arg("b has a negative entry"));
    }
    Ok(())
}
