//! H-polyhedra over named variables, exact simplex, Fourier–Motzkin elimination
//! and LP-based redundancy / inclusion certificates.

mod certify;
mod fm;
mod simplex;

pub use certify::{includes, is_redundant, min_row_lhs, Inclusion, Redundancy, RowWitness};
pub use fm::{fourier_motzkin, FmOptions};
pub use simplex::{solve_lp, Certificate, LpResult, LpStatus, Sense, Simplex};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowKind {
    /// `a·z <= b`
    Le,
    /// `a·z = b`
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub tag: String,
    pub kind: RowKind,
    /// Sorted by variable id, no zero coefficients.
    pub coeffs: Vec<(usize, Rat)>,
    pub rhs: Rat,
}

impl Row {
    pub fn lhs(&self, point: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for (v, a) in &self.coeffs {
            if !point[*v].is_zero() {
                s += a * &point[*v];
            }
        }
        s
    }

    pub fn coeff(&self, var: usize) -> Rat {
        self.coeffs
            .binary_search_by_key(&var, |(v, _)| *v)
            .map(|k| self.coeffs[k].1.clone())
            .unwrap_or_default()
    }

    /// `rhs - lhs` for `Le` rows; negative means violated.
    pub fn slack(&self, point: &[Rat]) -> Rat {
        &self.rhs - self.lhs(point)
    }

    pub fn satisfied_by(&self, point: &[Rat]) -> bool {
        let lhs = self.lhs(point);
        match self.kind {
            RowKind::Le => lhs <= self.rhs,
            RowKind::Eq => lhs == self.rhs,
        }
    }
}

/// Collects `(var, coeff)` pairs into the canonical sparse form.
pub fn normalize_coeffs(terms: impl IntoIterator<Item = (usize, Rat)>) -> Vec<(usize, Rat)> {
    let mut m: BTreeMap<usize, Rat> = BTreeMap::new();
    for (v, a) in terms {
        if !a.is_zero() {
            *m.entry(v).or_default() += a;
        }
    }
    m.into_iter().filter(|(_, a)| !a.is_zero()).collect()
}

/// A polyhedron `{z : A_eq z = b_eq, A_le z <= b_le}` over named variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinSys {
    vars: Vec<String>,
    var_ids: HashMap<String, usize>,
    rows: Vec<Row>,
    tag_ids: HashMap<String, usize>,
}

impl LinSys {
    pub fn new() -> Self {
        Self::default()
    }

    /// Creates a system whose catalog is `names`, in order.
    pub fn with_vars<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut s = Self::new();
        for name in names {
            s.add_var(name)?;
        }
        Ok(s)
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> Result<usize> {
        let name = name.into();
        if self.var_ids.contains_key(&name) {
            return Err(Error::arg(format!("duplicate variable {name}")));
        }
        let id = self.vars.len();
        self.var_ids.insert(name.clone(), id);
        self.vars.push(name);
        Ok(id)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, id: usize) -> &str {
        &self.vars[id]
    }

    pub fn var_id(&self, name: &str) -> Option<usize> {
        self.var_ids.get(name).copied()
    }

    pub fn require_var(&self, name: &str) -> Result<usize> {
        self.var_id(name)
            .ok_or_else(|| Error::arg(format!("unknown variable {name}")))
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn inequalities(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.kind == RowKind::Le)
    }

    pub fn equalities(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.kind == RowKind::Eq)
    }

    pub fn row(&self, tag: &str) -> Option<&Row> {
        self.tag_ids.get(tag).map(|&k| &self.rows[k])
    }

    pub fn row_index(&self, tag: &str) -> Option<usize> {
        self.tag_ids.get(tag).copied()
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.tag_ids.contains_key(tag)
    }

    pub fn add_row(
        &mut self,
        tag: impl Into<String>,
        kind: RowKind,
        terms: impl IntoIterator<Item = (usize, Rat)>,
        rhs: Rat,
    ) -> Result<()> {
        let tag = tag.into();
        if self.tag_ids.contains_key(&tag) {
            return Err(Error::arg(format!("duplicate row tag {tag}")));
        }
        let coeffs = normalize_coeffs(terms);
        if let Some((v, _)) = coeffs.iter().find(|(v, _)| *v >= self.vars.len()) {
            return Err(Error::arg(format!("row {tag} references unknown variable id {v}")));
        }
        self.tag_ids.insert(tag.clone(), self.rows.len());
        self.rows.push(Row { tag, kind, coeffs, rhs });
        Ok(())
    }

    pub fn add_le(
        &mut self,
        tag: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, Rat)>,
        rhs: Rat,
    ) -> Result<()> {
        self.add_row(tag, RowKind::Le, terms, rhs)
    }

    /// Stores `a·z >= b` as `-a·z <= -b`.
    pub fn add_ge(
        &mut self,
        tag: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, Rat)>,
        rhs: Rat,
    ) -> Result<()> {
        self.add_row(tag, RowKind::Le, terms.into_iter().map(|(v, a)| (v, -a)), -rhs)
    }

    pub fn add_eq(
        &mut self,
        tag: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, Rat)>,
        rhs: Rat,
    ) -> Result<()> {
        self.add_row(tag, RowKind::Eq, terms, rhs)
    }

    pub fn push_row(&mut self, row: Row) -> Result<()> {
        self.add_row(row.tag, row.kind, row.coeffs, row.rhs)
    }

    /// Same catalog, rows whose tag satisfies `keep`.
    pub fn filter_rows(&self, mut keep: impl FnMut(&Row) -> bool) -> LinSys {
        let mut out = LinSys {
            vars: self.vars.clone(),
            var_ids: self.var_ids.clone(),
            rows: Vec::new(),
            tag_ids: HashMap::new(),
        };
        for r in &self.rows {
            if keep(r) {
                out.tag_ids.insert(r.tag.clone(), out.rows.len());
                out.rows.push(r.clone());
            }
        }
        out
    }

    pub fn without_row(&self, tag: &str) -> LinSys {
        self.filter_rows(|r| r.tag != tag)
    }

    /// Appends all rows of `other`, matching variables by name; variables unknown to
    /// `self` are added to its catalog.
    pub fn extend_from(&mut self, other: &LinSys) -> Result<()> {
        let map: Vec<usize> = other
            .vars
            .iter()
            .map(|name| match self.var_id(name) {
                Some(id) => Ok(id),
                None => self.add_var(name.clone()),
            })
            .collect::<Result<_>>()?;
        for r in &other.rows {
            self.add_row(
                r.tag.clone(),
                r.kind,
                r.coeffs.iter().map(|(v, a)| (map[*v], a.clone())),
                r.rhs.clone(),
            )?;
        }
        Ok(())
    }

    /// First violated row, if any.
    pub fn first_violation(&self, point: &[Rat]) -> Option<&Row> {
        self.rows.iter().find(|r| !r.satisfied_by(point))
    }

    pub fn contains(&self, point: &[Rat]) -> bool {
        point.len() == self.vars.len() && self.first_violation(point).is_none()
    }

    /// Builds a dense point from named values; missing names are zero.
    pub fn point_from_names<'a>(&self, values: impl IntoIterator<Item = (&'a str, Rat)>) -> Result<Vec<Rat>> {
        let mut p = vec![Rat::zero(); self.vars.len()];
        for (name, val) in values {
            p[self.require_var(name)?] = val;
        }
        Ok(p)
    }

    pub fn named_point(&self, point: &[Rat]) -> BTreeMap<String, Rat> {
        self.vars.iter().cloned().zip(point.iter().cloned()).collect()
    }

    /// Sparse objective from `(name, coeff)` pairs.
    pub fn objective<'a>(&self, terms: impl IntoIterator<Item = (&'a str, Rat)>) -> Result<Vec<(usize, Rat)>> {
        let t = terms
            .into_iter()
            .map(|(name, a)| Ok((self.require_var(name)?, a)))
            .collect::<Result<Vec<_>>>()?;
        Ok(normalize_coeffs(t))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(JsonSys::from(self)).expect("LinSys serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let js: JsonSys =
            serde_json::from_value(v.clone()).map_err(|e| Error::arg(format!("malformed system JSON: {e}")))?;
        let mut sys = LinSys::with_vars(js.variables)?;
        for (kind, rows) in [(RowKind::Eq, js.equalities), (RowKind::Le, js.inequalities)] {
            for r in rows {
                let terms = r
                    .coeffs
                    .into_iter()
                    .map(|(name, a)| Ok((sys.require_var(&name)?, a)))
                    .collect::<Result<Vec<_>>>()?;
                sys.add_row(r.tag, kind, terms, r.rhs)?;
            }
        }
        // Restore the original row order recorded in `tags`.
        if js.tags.len() == sys.rows.len() {
            let mut rows = Vec::with_capacity(sys.rows.len());
            for t in &js.tags {
                let k = sys
                    .row_index(t)
                    .ok_or_else(|| Error::arg(format!("tag {t} has no row")))?;
                rows.push(sys.rows[k].clone());
            }
            sys.rows = rows;
            sys.tag_ids = sys.rows.iter().enumerate().map(|(k, r)| (r.tag.clone(), k)).collect();
        }
        Ok(sys)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    tag: String,
    coeffs: BTreeMap<String, Rat>,
    rhs: Rat,
}

#[derive(Serialize, Deserialize)]
struct JsonSys {
    variables: Vec<String>,
    equalities: Vec<JsonRow>,
    inequalities: Vec<JsonRow>,
    tags: Vec<String>,
}

impl From<&LinSys> for JsonSys {
    fn from(s: &LinSys) -> Self {
        let conv = |r: &Row| JsonRow {
            tag: r.tag.clone(),
            coeffs: r.coeffs.iter().map(|(v, a)| (s.vars[*v].clone(), a.clone())).collect(),
            rhs: r.rhs.clone(),
        };
        JsonSys {
            variables: s.vars.clone(),
            equalities: s.equalities().map(conv).collect(),
            inequalities: s.inequalities().map(conv).collect(),
            tags: s.rows.iter().map(|r| r.tag.clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn duplicate_tags_and_vars_rejected() {
        let mut s = LinSys::with_vars(["x", "y"]).unwrap();
        assert!(s.add_var("x").is_err());
        s.add_le("a", [(0, rat(1, 1))], rat(1, 1)).unwrap();
        assert!(s.add_le("a", [(1, rat(1, 1))], rat(1, 1)).is_err());
        assert!(s.add_le("b", [(5, rat(1, 1))], rat(1, 1)).is_err());
    }

    #[test]
    fn coefficients_merge_and_drop_zeros() {
        let mut s = LinSys::with_vars(["x", "y"]).unwrap();
        s.add_le("r", [(1, rat(1, 2)), (0, rat(1, 1)), (1, rat(-1, 2))], rat(0, 1))
            .unwrap();
        assert_eq!(s.row("r").unwrap().coeffs, vec![(0, rat(1, 1))]);
    }

    #[test]
    fn json_round_trip() {
        let mut s = LinSys::with_vars(["x", "y"]).unwrap();
        s.add_le("b", [(0, rat(1, 3))], rat(2, 1)).unwrap();
        s.add_eq("a", [(0, rat(1, 1)), (1, rat(-7, 2))], rat(0, 1)).unwrap();
        s.add_ge("c", [(1, rat(1, 1))], rat(0, 1)).unwrap();
        let js = s.to_json();
        assert_eq!(js["inequalities"][0]["coeffs"]["x"], "1/3");
        assert_eq!(LinSys::from_json(&js).unwrap(), s);
    }
}
