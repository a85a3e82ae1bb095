//! Exact two-phase simplex over rationals with Bland's pivoting rule.

use crate::rational::Rat;
use num::{Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

/// Minimize `objective . x` subject to `rows` and `x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct Lp {
    pub vars: usize,
    pub objective: Vec<Rat>,
    pub rows: Vec<(Vec<Rat>, Rel, Rat)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

impl Lp {
    pub fn new(vars: usize) -> Self {
        Lp { vars, objective: vec![Rat::zero(); vars], rows: Vec::new() }
    }

    pub fn add(&mut self, coeffs: Vec<Rat>, rel: Rel, rhs: Rat) {
        assert_eq!(coeffs.len(), self.vars);
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        solve(self)
    }
}

struct Tableau {
    a: Vec<Vec<Rat>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        self.a[i].last().unwrap()
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.a[r][col].clone();
        for x in self.a[r].iter_mut() {
            *x /= &p;
        }
        let prow = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = col;
    }

    /// Runs Bland's rule on `cost` with entering columns limited to
    /// `0..allowed`. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rat], allowed: usize) -> bool {
        loop {
            let mut enter = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.a[i][j].is_zero() {
                        r -= &cost[b] * &self.a[i][j];
                    }
                }
                if r.is_negative() {
                    enter = Some(j);
                    break;
                }
            }
            let Some(col) = enter else { return true };
            let mut leave: Option<(Rat, usize, usize)> = None;
            for i in 0..self.a.len() {
                if self.a[i][col].is_positive() {
                    let ratio = self.rhs(i) / &self.a[i][col];
                    let better = match &leave {
                        None => true,
                        Some((best, _, b)) => ratio < *best || (ratio == *best && self.basis[i] < *b),
                    };
                    if better {
                        leave = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, r, _)) = leave else { return false };
            self.pivot(r, col);
        }
    }
}

pub fn solve(lp: &Lp) -> LpOutcome {
    let n = lp.vars;
    let m = lp.rows.len();
    let rows: Vec<(Vec<Rat>, Rel, Rat)> = lp
        .rows
        .iter()
        .map(|(a, rel, b)| {
            if b.is_negative() {
                let flip = match rel {
                    Rel::Le => Rel::Ge,
                    Rel::Ge => Rel::Le,
                    Rel::Eq => Rel::Eq,
                };
                (a.iter().map(|x| -x).collect(), flip, -b)
            } else {
                (a.clone(), *rel, b.clone())
            }
        })
        .collect();
    let slacks = rows.iter().filter(|r| r.1 != Rel::Eq).count();
    let arts = rows.iter().filter(|r| r.1 != Rel::Le).count();
    let cols = n + slacks + arts;
    let mut a = vec![vec![Rat::zero(); cols + 1]; m];
    let mut basis = vec![0; m];
    let (mut s, mut t) = (n, n + slacks);
    for (i, (coef, rel, b)) in rows.iter().enumerate() {
        a[i][..n].clone_from_slice(coef);
        a[i][cols] = b.clone();
        match rel {
            Rel::Le => {
                a[i][s] = Rat::from_integer(1.into());
                basis[i] = s;
                s += 1;
            }
            Rel::Ge => {
                a[i][s] = Rat::from_integer((-1).into());
                s += 1;
                a[i][t] = Rat::from_integer(1.into());
                basis[i] = t;
                t += 1;
            }
            Rel::Eq => {
                a[i][t] = Rat::from_integer(1.into());
                basis[i] = t;
                t += 1;
            }
        }
    }
    let mut tab = Tableau { a, basis };
    if arts > 0 {
        let mut cost = vec![Rat::zero(); cols];
        for c in cost.iter_mut().skip(n + slacks) {
            *c = Rat::from_integer(1.into());
        }
        tab.optimize(&cost, cols);
        let infeasible = tab.basis.iter().enumerate().any(|(i, &b)| b >= n + slacks && !tab.rhs(i).is_zero());
        if infeasible {
            return LpOutcome::Infeasible;
        }
        let mut i = 0;
        while i < tab.a.len() {
            if tab.basis[i] >= n + slacks {
                match (0..n + slacks).find(|&j| !tab.a[i][j].is_zero()) {
                    Some(j) => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        tab.a.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }
    let mut cost = vec![Rat::zero(); cols];
    cost[..n].clone_from_slice(&lp.objective);
    if !tab.optimize(&cost, n + slacks) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(i).clone();
        }
    }
    let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).fold(Rat::zero(), |s, v| s + v);
    LpOutcome::Optimal { x, value }
}
