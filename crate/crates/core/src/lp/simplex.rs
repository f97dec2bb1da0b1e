//! Dense two-phase primal simplex over exact rationals with Bland's rule.
//!
//! Every row of the input system keeps an identity column in the tableau (its slack
//! or its artificial), so row multipliers can be read off the reduced costs. Rows of
//! the form `-a·z_v <= 0` are turned into sign restrictions on `z_v` instead of
//! tableau rows; their multipliers are recovered from the others when building
//! certificates. Free variables are split into a positive and a negative part.

use serde::{Deserialize, Serialize};

use super::{LinSys, Row, RowKind};
use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    fn sign(self) -> Rat {
        match self {
            Sense::Max => Rat::one(),
            Sense::Min => -Rat::one(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// Row multipliers `y`, nonnegative on `Le` rows, with `Aᵀy = s·c` and
    /// `bᵀy = s·value`, where `s` is `+1` for maximization and `-1` for minimization.
    Dual(Vec<Rat>),
    /// Row multipliers, nonnegative on `Le` rows, with `Aᵀy = 0` and `bᵀy < 0`.
    Farkas(Vec<Rat>),
    /// A recession direction of the feasible set that improves the objective.
    Ray(Vec<Rat>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    pub value: Option<Rat>,
    /// Optimal point, or a feasible point from which `Ray` escapes.
    pub point: Option<Vec<Rat>>,
    pub certificate: Certificate,
    pub pivots: usize,
}

fn combine_rows(rows: &[Row], y: &[Rat], nvars: usize) -> (Vec<Rat>, Rat) {
    let mut aty = vec![Rat::zero(); nvars];
    let mut bty = Rat::zero();
    for (r, yr) in rows.iter().zip(y) {
        if yr.is_zero() {
            continue;
        }
        for (v, a) in &r.coeffs {
            aty[*v] += a * yr;
        }
        bty += &r.rhs * yr;
    }
    (aty, bty)
}

fn multipliers_signed(rows: &[Row], y: &[Rat]) -> bool {
    y.len() == rows.len()
        && rows
            .iter()
            .zip(y)
            .all(|(r, v)| r.kind == RowKind::Eq || !v.is_negative())
}

impl LpResult {
    /// Re-checks the result against `sys` using only exact row evaluations.
    pub fn verify(&self, sys: &LinSys, objective: &[(usize, Rat)], sense: Sense) -> bool {
        let n = sys.num_vars();
        let mut c = vec![Rat::zero(); n];
        for (v, a) in objective {
            if *v >= n {
                return false;
            }
            c[*v] = a.clone();
        }
        let s = sense.sign();
        let dot = |p: &[Rat]| -> Rat { c.iter().zip(p).map(|(a, b)| a * b).sum() };
        match (&self.status, &self.certificate) {
            (LpStatus::Optimal, Certificate::Dual(y)) => {
                let (Some(p), Some(val)) = (&self.point, &self.value) else {
                    return false;
                };
                if !sys.contains(p) || dot(p) != *val || !multipliers_signed(sys.rows(), y) {
                    return false;
                }
                let (aty, bty) = combine_rows(sys.rows(), y, n);
                aty.iter().zip(&c).all(|(a, cv)| *a == &s * cv) && bty == &s * val
            }
            (LpStatus::Infeasible, Certificate::Farkas(y)) => {
                if !multipliers_signed(sys.rows(), y) {
                    return false;
                }
                let (aty, bty) = combine_rows(sys.rows(), y, n);
                aty.iter().all(Rat::is_zero) && bty.is_negative()
            }
            (LpStatus::Unbounded, Certificate::Ray(r)) => {
                let Some(p) = &self.point else { return false };
                if !sys.contains(p) || r.len() != n {
                    return false;
                }
                let recedes = sys.rows().iter().all(|row| {
                    let l = row.lhs(r);
                    match row.kind {
                        RowKind::Le => !l.is_positive(),
                        RowKind::Eq => l.is_zero(),
                    }
                });
                recedes && (&s * dot(r)).is_positive()
            }
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Col {
    Structural,
    Slack,
    Art,
}

/// A simplex tableau that stays primal feasible across objectives, so several LPs
/// over the same system share one phase I.
#[derive(Clone, Debug)]
pub struct Simplex {
    rows: Vec<Row>,
    nvars: usize,
    /// System row behind each tableau row, and the sign it was multiplied by.
    row_of: Vec<usize>,
    flipped: Vec<bool>,
    /// `(system row, var, a)` for rows `-a·z_var <= 0` absorbed as sign restrictions.
    bound_rows: Vec<(usize, usize, Rat)>,
    cols: Vec<Col>,
    pos_col: Vec<usize>,
    neg_col: Vec<Option<usize>>,
    unit: Vec<usize>,
    t: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    d: Vec<Rat>,
    z: Rat,
    basis: Vec<usize>,
    barred: Vec<bool>,
    farkas: Option<Vec<Rat>>,
    pivots: usize,
}

impl Simplex {
    pub fn new(sys: &LinSys) -> Self {
        Self::from_rows(sys.num_vars(), sys.rows().to_vec())
    }

    /// Builds from raw rows over variable ids `0..nvars`.
    pub fn from_rows(nvars: usize, rows: Vec<Row>) -> Self {
        let mut nonneg = vec![false; nvars];
        let mut bound_rows = Vec::new();
        let mut absorbed = vec![false; rows.len()];
        for (k, r) in rows.iter().enumerate() {
            if r.kind == RowKind::Le && r.rhs.is_zero() && r.coeffs.len() == 1 {
                let (v, a) = &r.coeffs[0];
                if a.is_negative() && !nonneg[*v] {
                    nonneg[*v] = true;
                    absorbed[k] = true;
                    bound_rows.push((k, *v, -a));
                }
            }
        }

        let mut cols = Vec::new();
        let mut pos_col = vec![0; nvars];
        let mut neg_col = vec![None; nvars];
        for v in 0..nvars {
            pos_col[v] = cols.len();
            cols.push(Col::Structural);
            if !nonneg[v] {
                neg_col[v] = Some(cols.len());
                cols.push(Col::Structural);
            }
        }

        let row_of: Vec<usize> = (0..rows.len()).filter(|&k| !absorbed[k]).collect();
        let m = row_of.len();
        let flipped: Vec<bool> = row_of.iter().map(|&k| rows[k].rhs.is_negative()).collect();
        let mut slack_col = vec![None; m];
        for (r, &k) in row_of.iter().enumerate() {
            if rows[k].kind == RowKind::Le {
                slack_col[r] = Some(cols.len());
                cols.push(Col::Slack);
            }
        }
        let mut unit = vec![0; m];
        for r in 0..m {
            match slack_col[r] {
                Some(c) if !flipped[r] => unit[r] = c,
                _ => {
                    unit[r] = cols.len();
                    cols.push(Col::Art);
                }
            }
        }

        let ncols = cols.len();
        let mut t = vec![vec![Rat::zero(); ncols]; m];
        let mut rhs = Vec::with_capacity(m);
        for (r, &k) in row_of.iter().enumerate() {
            let sgn = if flipped[r] { -Rat::one() } else { Rat::one() };
            for (v, a) in &rows[k].coeffs {
                let a = a * &sgn;
                if let Some(nc) = neg_col[*v] {
                    t[r][nc] = -&a;
                }
                t[r][pos_col[*v]] = a;
            }
            if let Some(sc) = slack_col[r] {
                t[r][sc] = sgn.clone();
            }
            t[r][unit[r]] = Rat::one();
            rhs.push(&rows[k].rhs * &sgn);
        }

        let mut s = Simplex {
            rows,
            nvars,
            row_of,
            flipped,
            bound_rows,
            cols,
            pos_col,
            neg_col,
            basis: unit.clone(),
            unit,
            t,
            rhs,
            d: vec![Rat::zero(); ncols],
            z: Rat::zero(),
            barred: vec![false; ncols],
            farkas: None,
            pivots: 0,
        };
        s.phase_one();
        s
    }

    pub fn is_feasible(&self) -> bool {
        self.farkas.is_none()
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    fn is_art(&self, j: usize) -> bool {
        matches!(self.cols[j], Col::Art)
    }

    fn load_costs(&mut self, cost: &[Rat]) {
        self.d = cost.to_vec();
        self.z = Rat::zero();
        for r in 0..self.t.len() {
            let cb = &cost[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.t[r].iter().enumerate() {
                if !a.is_zero() {
                    self.d[j].sub_mul(cb, a);
                }
            }
            self.z += cb * &self.rhs[r];
        }
    }

    fn pivot(&mut self, r: usize, e: usize) {
        self.pivots += 1;
        let inv = self.t[r][e].recip();
        let mut prow = Vec::new();
        for (j, a) in self.t[r].iter_mut().enumerate() {
            if !a.is_zero() {
                *a *= &inv;
                prow.push((j, a.clone()));
            }
        }
        self.rhs[r] *= &inv;
        let prhs = self.rhs[r].clone();
        for i in 0..self.t.len() {
            if i == r || self.t[i][e].is_zero() {
                continue;
            }
            let f = self.t[i][e].clone();
            let row = &mut self.t[i];
            for (j, a) in &prow {
                row[*j].sub_mul(&f, a);
            }
            self.rhs[i].sub_mul(&f, &prhs);
        }
        if !self.d[e].is_zero() {
            let f = self.d[e].clone();
            for (j, a) in &prow {
                self.d[*j].sub_mul(&f, a);
            }
            self.z += &f * &prhs;
        }
        self.basis[r] = e;
    }

    /// Maximizes the loaded costs; returns the entering column of an unbounded ray.
    fn run(&mut self) -> Option<usize> {
        loop {
            let e = (0..self.d.len()).find(|&j| !self.barred[j] && self.d[j].is_positive())?;
            let mut best: Option<(usize, Rat)> = None;
            for r in 0..self.t.len() {
                let a = &self.t[r][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, e),
                None => return Some(e),
            }
        }
    }

    /// Multipliers `y'` of the sign-adjusted tableau rows for the loaded costs.
    fn tableau_duals(&self, cost: &[Rat]) -> Vec<Rat> {
        (0..self.t.len())
            .map(|r| &cost[self.unit[r]] - &self.d[self.unit[r]])
            .collect()
    }

    /// Expands tableau multipliers to one multiplier per system row; `target` is the
    /// required value of `Aᵀy` on sign-restricted variables' absorbed rows.
    fn system_multipliers(&self, y_tab: &[Rat], target: &[Rat]) -> Vec<Rat> {
        let mut y = vec![Rat::zero(); self.rows.len()];
        for (r, &k) in self.row_of.iter().enumerate() {
            y[k] = if self.flipped[r] { -&y_tab[r] } else { y_tab[r].clone() };
        }
        let (aty, _) = combine_rows(&self.rows, &y, self.nvars);
        for (k, v, a) in &self.bound_rows {
            // Row `-a·z_v <= 0` with multiplier mu contributes `-a·mu` to (Aᵀy)_v.
            y[*k] = (&aty[*v] - &target[*v]) / a;
        }
        y
    }

    fn phase_one(&mut self) {
        let cost: Vec<Rat> = (0..self.cols.len())
            .map(|j| if self.is_art(j) { -Rat::one() } else { Rat::zero() })
            .collect();
        self.load_costs(&cost);
        let unbounded = self.run();
        debug_assert!(unbounded.is_none(), "phase I is bounded");
        if self.z.is_negative() {
            let y_tab = self.tableau_duals(&cost);
            self.farkas = Some(self.system_multipliers(&y_tab, &vec![Rat::zero(); self.nvars]));
            return;
        }
        for r in 0..self.t.len() {
            if self.is_art(self.basis[r]) {
                if let Some(j) = (0..self.cols.len()).find(|&j| !self.is_art(j) && !self.t[r][j].is_zero()) {
                    self.pivot(r, j);
                }
            }
        }
        for j in 0..self.cols.len() {
            self.barred[j] = self.is_art(j);
        }
    }

    fn column_values(&self) -> Vec<Rat> {
        let mut w = vec![Rat::zero(); self.cols.len()];
        for (r, &b) in self.basis.iter().enumerate() {
            w[b] = self.rhs[r].clone();
        }
        w
    }

    fn to_vars(&self, w: &[Rat]) -> Vec<Rat> {
        (0..self.nvars)
            .map(|v| {
                let p = w[self.pos_col[v]].clone();
                match self.neg_col[v] {
                    Some(nc) => p - &w[nc],
                    None => p,
                }
            })
            .collect()
    }

    /// Optimizes `objective` from the current basis.
    pub fn optimize(&mut self, objective: &[(usize, Rat)], sense: Sense) -> Result<LpResult> {
        let mut c = vec![Rat::zero(); self.nvars];
        for (v, a) in objective {
            if *v >= self.nvars {
                return Err(Error::arg(format!("objective references unknown variable id {v}")));
            }
            c[*v] += a;
        }
        let start = self.pivots;
        if let Some(y) = &self.farkas {
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                value: None,
                point: None,
                certificate: Certificate::Farkas(y.clone()),
                pivots: start,
            });
        }
        let s = sense.sign();
        let mut cost = vec![Rat::zero(); self.cols.len()];
        for v in 0..self.nvars {
            let cv = &c[v] * &s;
            if let Some(nc) = self.neg_col[v] {
                cost[nc] = -&cv;
            }
            cost[self.pos_col[v]] = cv;
        }
        self.load_costs(&cost);
        let res = match self.run() {
            Some(e) => {
                let mut w = vec![Rat::zero(); self.cols.len()];
                w[e] = Rat::one();
                for (r, &b) in self.basis.iter().enumerate() {
                    w[b] = -&self.t[r][e];
                }
                LpResult {
                    status: LpStatus::Unbounded,
                    value: None,
                    point: Some(self.to_vars(&self.column_values())),
                    certificate: Certificate::Ray(self.to_vars(&w)),
                    pivots: self.pivots - start,
                }
            }
            None => {
                let y_tab = self.tableau_duals(&cost);
                let target: Vec<Rat> = c.iter().map(|cv| cv * &s).collect();
                LpResult {
                    status: LpStatus::Optimal,
                    value: Some(&self.z * &s),
                    point: Some(self.to_vars(&self.column_values())),
                    certificate: Certificate::Dual(self.system_multipliers(&y_tab, &target)),
                    pivots: self.pivots - start,
                }
            }
        };
        Ok(res)
    }
}

/// Solves `sense c·z` over `sys`; the returned result has been re-verified exactly.
pub fn solve_lp(sys: &LinSys, objective: &[(usize, Rat)], sense: Sense) -> Result<LpResult> {
    let res = Simplex::new(sys).optimize(objective, sense)?;
    if !res.verify(sys, objective, sense) {
        return Err(Error::Internal("simplex certificate failed verification".into()));
    }
    Ok(res)
}
