//! Exact rational linear programming.
//!
//! A dense two-phase tableau simplex with Bland's rule. Every result carries
//! a certificate that [`verify`] re-checks against the raw program:
//!
//! * optimal: a primal solution and dual multipliers proving the bound;
//! * infeasible: Farkas multipliers combining the rows into `0 <= -1`;
//! * unbounded: a feasible point and an improving ray.
//!
//! Internally every variable is split into a difference of two nonnegative
//! columns and variable bounds become ordinary rows, so all certificates are
//! stated over the expanded row list returned by [`LinearProgram::rows`].

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::{one, zero, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed program: {0}")]
    Malformed(String),
    #[error("certificate check failed: {0}")]
    BadCertificate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Self {
            coeffs,
            relation,
            rhs,
        }
    }

    fn holds_at(&self, x: &[Rational]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    Feasibility,
    Maximize(Vec<Rational>),
    Minimize(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub variables: Vec<String>,
    pub objective: Objective,
    pub constraints: Vec<Constraint>,
    /// Per-variable `(lower, upper)`; `None` means unbounded on that side.
    pub bounds: Vec<(Option<Rational>, Option<Rational>)>,
}

impl LinearProgram {
    /// A feasibility program over free variables.
    pub fn new(variables: Vec<String>) -> Self {
        let n = variables.len();
        Self {
            variables,
            objective: Objective::Feasibility,
            constraints: Vec::new(),
            bounds: vec![(None, None); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
    }

    /// Sparse helper: `Σ coeff·x_var (rel) rhs`.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) {
        let mut coeffs = vec![zero(); self.num_vars()];
        for (var, c) in terms {
            coeffs[*var] += c;
        }
        self.add(coeffs, relation, rhs);
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<Rational>, upper: Option<Rational>) {
        self.bounds[var] = (lower, upper);
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if n == 0 {
            return Err(LpError::Malformed("no variables".into()));
        }
        if self.bounds.len() != n {
            return Err(LpError::Malformed(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        match &self.objective {
            Objective::Maximize(c) | Objective::Minimize(c) if c.len() != n => {
                return Err(LpError::Malformed(format!(
                    "objective has {} coefficients for {n} variables",
                    c.len()
                )))
            }
            _ => {}
        }
        for (k, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(LpError::Malformed(format!(
                    "constraint {k} has {} coefficients for {n} variables",
                    row.coeffs.len()
                )));
            }
        }
        Ok(())
    }

    /// Constraints followed by one row per finite bound (lower before upper,
    /// in variable order). Certificates index into this list.
    pub fn rows(&self) -> Vec<Constraint> {
        let n = self.num_vars();
        let mut rows = self.constraints.clone();
        for (j, (lower, upper)) in self.bounds.iter().enumerate() {
            let unit = || {
                let mut e = vec![zero(); n];
                e[j] = one();
                e
            };
            if let Some(l) = lower {
                rows.push(Constraint::new(unit(), Relation::Ge, l.clone()));
            }
            if let Some(u) = upper {
                rows.push(Constraint::new(unit(), Relation::Le, u.clone()));
            }
        }
        rows
    }

    fn cost(&self) -> Vec<Rational> {
        match &self.objective {
            Objective::Feasibility => vec![zero(); self.num_vars()],
            Objective::Maximize(c) | Objective::Minimize(c) => c.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Multipliers `λ` over [`LinearProgram::rows`] with `Σ λ_r a_r = c` and
    /// `Σ λ_r b_r` equal to the optimum. For maximization `λ ≥ 0` on `≤`
    /// rows and `λ ≤ 0` on `≥` rows; signs flip for minimization.
    Dual(Vec<Rational>),
    /// Multipliers with `Σ λ_r a_r = 0` and `Σ λ_r b_r = -1`, `λ ≥ 0` on
    /// `≤` rows and `λ ≤ 0` on `≥` rows.
    Farkas(Vec<Rational>),
    /// A direction `d` keeping every row feasible that strictly improves the
    /// objective.
    Ray(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpResult {
    pub status: Status,
    /// Optimal point, or a feasible point when unbounded.
    pub solution: Option<Vec<Rational>>,
    pub objective: Option<Rational>,
    pub certificate: Certificate,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(zero(), |acc, (x, y)| acc + x * y)
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Reduced costs over all columns.
    cost: Vec<Rational>,
    /// Current objective value (of the minimization being run).
    value: Rational,
    basis: Vec<usize>,
    /// Column forming the initial identity basis for each row.
    initial: Vec<usize>,
    /// Columns allowed to enter the basis.
    eligible: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        if p != one() {
            for v in self.rows[row].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[row] /= &p;
        }
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[r].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.rhs[r] -= &factor * &pivot_rhs;
        }
        let factor = self.cost[col].clone();
        if !factor.is_zero() {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.value += &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Installs the reduced-cost row for cost vector `c` under the current basis.
    fn price(&mut self, c: &[Rational]) {
        self.cost = c.to_vec();
        self.value = zero();
        for r in 0..self.rows.len() {
            let cb = c[self.basis[r]].clone();
            if cb.is_zero() {
                continue;
            }
            for (v, t) in self.cost.iter_mut().zip(&self.rows[r]) {
                if !t.is_zero() {
                    *v -= &cb * t;
                }
            }
            self.value += &cb * &self.rhs[r];
        }
    }

    /// Runs Bland's rule to optimality. Returns the entering column when the
    /// program is unbounded.
    fn optimize(&mut self) -> Option<usize> {
        loop {
            let entering = (0..self.cost.len())
                .find(|&j| self.eligible[j] && self.cost[j].is_negative());
            let Some(col) = entering else {
                return None;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &leave {
                    None => true,
                    Some((best_r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return Some(col),
            }
        }
    }

    /// `y_k = c_{init_k} - d_{init_k}`: the simplex multipliers of the rows.
    fn multipliers(&self, c: &[Rational]) -> Vec<Rational> {
        self.initial
            .iter()
            .map(|&col| &c[col] - &self.cost[col])
            .collect()
    }
}

/// Solves `lp` exactly.
pub fn solve(lp: &LinearProgram) -> Result<LpResult, LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    let rows = lp.rows();
    let m = rows.len();
    let maximize = matches!(lp.objective, Objective::Maximize(_));
    let user_cost = lp.cost();

    // Columns: x+ (0..n), x- (n..2n), one slack per inequality row, then
    // artificials for rows whose slack cannot start in the basis.
    let mut slack_col: Vec<Option<usize>> = vec![None; m];
    let mut next = 2 * n;
    for (r, row) in rows.iter().enumerate() {
        if row.relation != Relation::Eq {
            slack_col[r] = Some(next);
            next += 1;
        }
    }
    // Rows are scaled by sign so that every right-hand side is nonnegative.
    let sign: Vec<Rational> = rows
        .iter()
        .map(|row| if row.rhs.is_negative() { -one() } else { one() })
        .collect();
    let mut initial = vec![0; m];
    let mut artificial: Vec<bool> = Vec::new();
    let structural = next;
    for (r, row) in rows.iter().enumerate() {
        let slack_sign_positive = match row.relation {
            Relation::Le => sign[r].is_positive(),
            Relation::Ge => sign[r].is_negative(),
            Relation::Eq => false,
        };
        if row.relation != Relation::Eq && slack_sign_positive {
            initial[r] = slack_col[r].unwrap();
        } else {
            initial[r] = next;
            next += 1;
        }
    }
    let total = next;
    artificial.resize(total, false);
    for j in structural..total {
        artificial[j] = true;
    }

    let mut tab_rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (r, row) in rows.iter().enumerate() {
        let mut t = vec![zero(); total];
        for j in 0..n {
            if !row.coeffs[j].is_zero() {
                t[j] = &sign[r] * &row.coeffs[j];
                t[n + j] = -&t[j];
            }
        }
        if let Some(s) = slack_col[r] {
            t[s] = match row.relation {
                Relation::Le => sign[r].clone(),
                _ => -&sign[r],
            };
        }
        if artificial[initial[r]] {
            t[initial[r]] = one();
        }
        tab_rows.push(t);
        rhs.push(&sign[r] * &row.rhs);
    }

    let mut tab = Tableau {
        rows: tab_rows,
        rhs,
        cost: Vec::new(),
        value: zero(),
        basis: initial.clone(),
        initial: initial.clone(),
        eligible: vec![true; total],
    };

    // Phase 1: minimize the sum of artificials.
    let phase1: Vec<Rational> = artificial
        .iter()
        .map(|&a| if a { one() } else { zero() })
        .collect();
    tab.price(&phase1);
    let unbounded = tab.optimize();
    debug_assert!(unbounded.is_none(), "phase 1 is bounded below by zero");

    if tab.value.is_positive() {
        let y = tab.multipliers(&phase1);
        let w = tab.value.clone();
        // λ_r = -σ_r y_r / w
        let farkas = (0..m).map(|r| -(&sign[r] * &y[r]) / &w).collect();
        return Ok(LpResult {
            status: Status::Infeasible,
            solution: None,
            objective: None,
            certificate: Certificate::Farkas(farkas),
        });
    }

    // Drive zero-level artificials out of the basis where possible; rows
    // with no structural entry are redundant and never change again.
    for r in 0..m {
        if artificial[tab.basis[r]] {
            if let Some(col) = (0..structural).find(|&j| !tab.rows[r][j].is_zero()) {
                tab.pivot(r, col);
            }
        }
    }
    for j in structural..total {
        tab.eligible[j] = false;
    }

    // Phase 2 minimizes the internal cost.
    let mut phase2 = vec![zero(); total];
    for j in 0..n {
        let c = if maximize {
            -&user_cost[j]
        } else {
            user_cost[j].clone()
        };
        phase2[n + j] = -&c;
        phase2[j] = c;
    }
    tab.price(&phase2);
    let unbounded = tab.optimize();

    let mut z = vec![zero(); total];
    for (r, &b) in tab.basis.iter().enumerate() {
        z[b] = tab.rhs[r].clone();
    }
    let x: Vec<Rational> = (0..n).map(|j| &z[j] - &z[n + j]).collect();

    if let Some(col) = unbounded {
        let mut dz = vec![zero(); total];
        dz[col] = one();
        for (r, &b) in tab.basis.iter().enumerate() {
            dz[b] = -&tab.rows[r][col];
        }
        let ray = (0..n).map(|j| &dz[j] - &dz[n + j]).collect();
        return Ok(LpResult {
            status: Status::Unbounded,
            solution: Some(x),
            objective: None,
            certificate: Certificate::Ray(ray),
        });
    }

    let y = tab.multipliers(&phase2);
    let dual = (0..m)
        .map(|r| {
            let v = &sign[r] * &y[r];
            if maximize {
                -v
            } else {
                v
            }
        })
        .collect();
    let objective = dot(&user_cost, &x);
    Ok(LpResult {
        status: Status::Optimal,
        solution: Some(x),
        objective: Some(objective),
        certificate: Certificate::Dual(dual),
    })
}

/// Re-checks `result` against the raw program data, independent of how the
/// result was produced.
pub fn verify(lp: &LinearProgram, result: &LpResult) -> Result<(), LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    let rows = lp.rows();
    let bad = |msg: &str| Err(LpError::BadCertificate(msg.to_string()));
    let maximize = matches!(lp.objective, Objective::Maximize(_));
    let cost = lp.cost();

    let check_point = |x: &Option<Vec<Rational>>| -> Result<Vec<Rational>, LpError> {
        let x = x
            .clone()
            .ok_or_else(|| LpError::BadCertificate("missing solution".into()))?;
        if x.len() != n {
            return Err(LpError::BadCertificate("solution arity".into()));
        }
        if let Some(k) = rows.iter().position(|row| !row.holds_at(&x)) {
            return Err(LpError::BadCertificate(format!("row {k} violated")));
        }
        Ok(x)
    };

    let combine = |lambda: &[Rational]| -> Vec<Rational> {
        let mut acc = vec![zero(); n];
        for (l, row) in lambda.iter().zip(&rows) {
            if l.is_zero() {
                continue;
            }
            for (a, c) in acc.iter_mut().zip(&row.coeffs) {
                *a += l * c;
            }
        }
        acc
    };
    // `upper_sign` is the required sign on `≤` rows; `≥` rows take the opposite.
    let signs_ok = |lambda: &[Rational], upper_nonneg: bool| {
        lambda.iter().zip(&rows).all(|(l, row)| match row.relation {
            Relation::Eq => true,
            Relation::Le => {
                if upper_nonneg {
                    !l.is_negative()
                } else {
                    !l.is_positive()
                }
            }
            Relation::Ge => {
                if upper_nonneg {
                    !l.is_positive()
                } else {
                    !l.is_negative()
                }
            }
        })
    };

    match (&result.status, &result.certificate) {
        (Status::Optimal, Certificate::Dual(lambda)) => {
            let x = check_point(&result.solution)?;
            if lambda.len() != rows.len() {
                return bad("dual arity");
            }
            let value = dot(&cost, &x);
            if result.objective.as_ref() != Some(&value) {
                return bad("reported objective differs from c·x");
            }
            if combine(lambda) != cost {
                return bad("dual combination differs from objective");
            }
            if !signs_ok(lambda, maximize) {
                return bad("dual sign condition");
            }
            let bound = lambda
                .iter()
                .zip(&rows)
                .fold(zero(), |acc, (l, row)| acc + l * &row.rhs);
            if bound != value {
                return bad("duality gap is nonzero");
            }
            Ok(())
        }
        (Status::Infeasible, Certificate::Farkas(lambda)) => {
            if lambda.len() != rows.len() {
                return bad("Farkas arity");
            }
            if combine(lambda).iter().any(|v| !v.is_zero()) {
                return bad("Farkas combination is not zero");
            }
            if !signs_ok(lambda, true) {
                return bad("Farkas sign condition");
            }
            let rhs = lambda
                .iter()
                .zip(&rows)
                .fold(zero(), |acc, (l, row)| acc + l * &row.rhs);
            if rhs != -one() {
                return bad("Farkas right-hand side is not -1");
            }
            Ok(())
        }
        (Status::Unbounded, Certificate::Ray(d)) => {
            check_point(&result.solution)?;
            if d.len() != n {
                return bad("ray arity");
            }
            for row in &rows {
                let slope = dot(&row.coeffs, d);
                let ok = match row.relation {
                    Relation::Le => !slope.is_positive(),
                    Relation::Ge => !slope.is_negative(),
                    Relation::Eq => slope.is_zero(),
                };
                if !ok {
                    return bad("ray leaves the feasible region");
                }
            }
            let gain = dot(&cost, d);
            let improving = if maximize {
                gain.is_positive()
            } else {
                gain.is_negative()
            };
            if !improving {
                return bad("ray does not improve the objective");
            }
            Ok(())
        }
        _ => bad("status and certificate kind disagree"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn solved(lp: &LinearProgram) -> LpResult {
        let res = solve(lp).unwrap();
        verify(lp, &res).unwrap();
        res
    }

    #[test]
    fn maximize_single_variable() {
        let mut lp = LinearProgram::new(vec!["x".into()]);
        lp.objective = Objective::Maximize(vec![int(1)]);
        lp.add(vec![int(1)], Relation::Le, int(1));
        lp.add(vec![int(1)], Relation::Ge, int(0));
        let res = solved(&lp);
        assert_eq!(res.status, Status::Optimal);
        assert_eq!(res.solution, Some(vec![int(1)]));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(vec!["x".into()]);
        lp.add(vec![int(1)], Relation::Le, int(0));
        lp.add(vec![int(1)], Relation::Ge, int(1));
        let res = solved(&lp);
        assert_eq!(res.status, Status::Infeasible);
        assert!(matches!(res.certificate, Certificate::Farkas(_)));
    }

    #[test]
    fn box_constrained_sum() {
        let mut lp = LinearProgram::new(vec!["x".into(), "y".into()]);
        lp.objective = Objective::Maximize(vec![int(1), int(1)]);
        lp.add(vec![int(1), int(1)], Relation::Le, ratio(3, 2));
        lp.set_bounds(0, Some(int(0)), Some(int(1)));
        lp.set_bounds(1, Some(int(0)), Some(int(1)));
        let res = solved(&lp);
        assert_eq!(res.objective, Some(ratio(3, 2)));
    }

    #[test]
    fn unbounded_program_returns_ray() {
        let mut lp = LinearProgram::new(vec!["x".into(), "y".into()]);
        lp.objective = Objective::Maximize(vec![int(1), int(0)]);
        lp.add(vec![int(1), int(-1)], Relation::Le, int(2));
        lp.set_bounds(1, Some(int(0)), None);
        let res = solved(&lp);
        assert_eq!(res.status, Status::Unbounded);
    }

    #[test]
    fn minimize_with_equalities_and_negative_rhs() {
        // min 2x + 3y  s.t. x + y = 4, x - y >= -2, x <= 3, y free
        let mut lp = LinearProgram::new(vec!["x".into(), "y".into()]);
        lp.objective = Objective::Minimize(vec![int(2), int(3)]);
        lp.add(vec![int(1), int(1)], Relation::Eq, int(4));
        lp.add(vec![int(1), int(-1)], Relation::Ge, int(-2));
        lp.set_bounds(0, None, Some(int(3)));
        let res = solved(&lp);
        assert_eq!(res.solution, Some(vec![int(3), int(1)]));
        assert_eq!(res.objective, Some(int(9)));
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut lp = LinearProgram::new(vec!["x".into(), "y".into()]);
        lp.objective = Objective::Maximize(vec![int(1), int(2)]);
        lp.add(vec![int(1), int(1)], Relation::Eq, int(1));
        lp.add(vec![int(2), int(2)], Relation::Eq, int(2));
        lp.set_bounds(0, Some(int(0)), None);
        lp.set_bounds(1, Some(int(0)), None);
        let res = solved(&lp);
        assert_eq!(res.objective, Some(int(2)));
    }

    #[test]
    fn malformed_arity_is_rejected() {
        let mut lp = LinearProgram::new(vec!["x".into()]);
        lp.add(vec![int(1), int(2)], Relation::Le, int(1));
        assert!(matches!(solve(&lp), Err(LpError::Malformed(_))));
        let empty = LinearProgram::new(vec![]);
        assert!(matches!(solve(&empty), Err(LpError::Malformed(_))));
    }

    #[test]
    fn verify_rejects_tampered_results() {
        let mut lp = LinearProgram::new(vec!["x".into()]);
        lp.objective = Objective::Maximize(vec![int(1)]);
        lp.add(vec![int(1)], Relation::Le, int(1));
        let mut res = solve(&lp).unwrap();
        res.solution = Some(vec![int(2)]);
        assert!(verify(&lp, &res).is_err());
        let mut res = solve(&lp).unwrap();
        res.objective = Some(int(0));
        assert!(verify(&lp, &res).is_err());
    }

    #[test]
    fn solving_is_deterministic() {
        let mut lp = LinearProgram::new(vec!["a".into(), "b".into(), "c".into()]);
        lp.objective = Objective::Maximize(vec![int(1), int(1), int(1)]);
        lp.add(vec![int(1), int(1), int(0)], Relation::Le, int(1));
        lp.add(vec![int(0), int(1), int(1)], Relation::Le, int(1));
        for j in 0..3 {
            lp.set_bounds(j, Some(int(0)), None);
        }
        assert_eq!(solve(&lp).unwrap(), solve(&lp).unwrap());
    }
}
