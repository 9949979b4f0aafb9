//! Dense two-phase simplex over exact rationals.
//!
//! Programs are `minimize c·x` subject to linear rows and `x >= 0`. Pivoting
//! follows Bland's rule (lowest entering index, lowest leaving basic
//! variable on ratio ties), so runs are deterministic and never cycle.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::num::{dot, zeros, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// `minimize objective·x` subject to `constraints`, `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(objective: Vec<Rational>) -> Self {
        LinearProgram {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.is_satisfied_by(x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub objective_value: Rational,
    /// One multiplier per constraint: `>= 0` on `Ge` rows, `<= 0` on `Le`
    /// rows, free on `Eq` rows, with `Aᵀy <= c` and `b·y` equal to the optimum.
    pub duals: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpResult {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpResult::Optimal(sol) => Some(sol),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    reduced: Vec<Rational>,
    value: Rational,
}

impl Tableau {
    fn price(&mut self, cost: &[Rational]) {
        self.reduced = cost.to_vec();
        self.value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (d, a) in self.reduced.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *d -= cb * a;
                }
            }
            self.value += cb * &self.rhs[i];
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let mut prow = core::mem::take(&mut self.rows[r]);
        let piv = prow[q].clone();
        for a in prow.iter_mut().filter(|a| !a.is_zero()) {
            *a /= &piv;
        }
        self.rhs[r] /= &piv;
        let support: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][q].is_zero() {
                continue;
            }
            let f = self.rows[i][q].clone();
            for &j in &support {
                let delta = &f * &prow[j];
                self.rows[i][j] -= delta;
            }
            let delta = &f * &self.rhs[r];
            self.rhs[i] -= delta;
        }
        let f = self.reduced[q].clone();
        if !f.is_zero() {
            for &j in &support {
                let delta = &f * &prow[j];
                self.reduced[j] -= delta;
            }
            self.value += &f * &self.rhs[r];
        }
        self.rows[r] = prow;
        self.basis[r] = q;
    }

    /// Runs Bland pivots until optimal (`true`) or unbounded (`false`).
    fn run(&mut self, allowed: &[bool]) -> bool {
        loop {
            let entering =
                (0..self.reduced.len()).find(|&j| allowed[j] && self.reduced[j].is_negative());
            let Some(q) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, q),
                None => return false,
            }
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpResult, Error> {
    let n = lp.num_vars();
    for (k, c) in lp.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(Error::MalformedLp(format!(
                "row {k} has {} coefficients, expected {n}",
                c.coeffs.len()
            )));
        }
    }
    let m = lp.constraints.len();

    // Normalise to nonnegative right-hand sides; homogeneous `>=` rows become
    // `<=` rows so they need no artificial.
    let mut sign = Vec::with_capacity(m);
    let mut relation = Vec::with_capacity(m);
    for c in &lp.constraints {
        let flip = c.rhs.is_negative() || (c.rhs.is_zero() && c.relation == Relation::Ge);
        sign.push(if flip { -1i8 } else { 1 });
        relation.push(match (c.relation, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        });
    }

    // Column layout: originals, one slack/surplus per inequality, artificials.
    let n_slack = relation.iter().filter(|r| **r != Relation::Eq).count();
    let n_art = relation.iter().filter(|r| **r != Relation::Le).count();
    let width = n + n_slack + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut marker = Vec::with_capacity(m);
    let mut artificial = alloc::vec![false; width];
    let (mut next_slack, mut next_art) = (n, n + n_slack);
    for (k, c) in lp.constraints.iter().enumerate() {
        let mut row = zeros(width);
        for (j, a) in c.coeffs.iter().enumerate() {
            row[j] = if sign[k] < 0 { -a } else { a.clone() };
        }
        rhs.push(if sign[k] < 0 { -&c.rhs } else { c.rhs.clone() });
        match relation[k] {
            Relation::Le => {
                row[next_slack] = Rational::from_integer(1.into());
                basis.push(next_slack);
                marker.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = Rational::from_integer((-1).into());
                next_slack += 1;
                row[next_art] = Rational::from_integer(1.into());
                artificial[next_art] = true;
                basis.push(next_art);
                marker.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Rational::from_integer(1.into());
                artificial[next_art] = true;
                basis.push(next_art);
                marker.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
    }
    let mut tab = Tableau {
        rows,
        rhs,
        basis,
        reduced: Vec::new(),
        value: Rational::zero(),
    };
    let mut row_origin: Vec<usize> = (0..m).collect();

    if n_art > 0 {
        let phase1_cost: Vec<Rational> = artificial
            .iter()
            .map(|&a| Rational::from_integer(if a { 1 } else { 0 }.into()))
            .collect();
        tab.price(&phase1_cost);
        let all = alloc::vec![true; width];
        // phase 1 is bounded below by zero
        tab.run(&all);
        if tab.value.is_positive() {
            return Ok(LpResult::Infeasible);
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if artificial[tab.basis[i]] {
                match (0..width).find(|&j| !artificial[j] && !tab.rows[i][j].is_zero()) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.rhs.remove(i);
                        tab.basis.remove(i);
                        row_origin.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = zeros(width);
    cost[..n].clone_from_slice(&lp.objective);
    tab.price(&cost);
    let allowed: Vec<bool> = artificial.iter().map(|a| !a).collect();
    if !tab.run(&allowed) {
        return Ok(LpResult::Unbounded);
    }

    let mut x = zeros(n);
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs[i].clone();
        }
    }
    let mut duals = zeros(m);
    for &k in &row_origin {
        let y = -tab.reduced[marker[k]].clone();
        duals[k] = if sign[k] < 0 { -y } else { y };
    }
    let objective_value = dot(&lp.objective, &x);
    debug_assert_eq!(objective_value, tab.value);
    Ok(LpResult::Optimal(LpSolution {
        x,
        objective_value,
        duals,
    }))
}
