use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::capacity::{level_chain, submasks, Capacity, Mask, StateSpace};
use crate::game::{ProductSet, StrategicGame};
use crate::lp::{LinearProgram, Relation};
use crate::rational::{int, one, zero, Rational};

use super::restriction::{PlayerRestriction, Shape};
use super::SolverError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowKind {
    Normalization,
    Monotonicity,
    Belief,
    Convexity,
    Concavity,
    Additivity,
    BestResponse,
}

impl RowKind {
    fn tag(self) -> &'static str {
        match self {
            RowKind::Normalization => "normalization",
            RowKind::Monotonicity => "monotonicity",
            RowKind::Belief => "belief",
            RowKind::Convexity => "convexity",
            RowKind::Concavity => "concavity",
            RowKind::Additivity => "additivity",
            RowKind::BestResponse => "best-response",
        }
    }
}

/// `Σ coeff·v(S) (relation) rhs` over subset variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeRow {
    pub kind: RowKind,
    pub terms: Vec<(Mask, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl PolytopeRow {
    fn new(kind: RowKind, terms: Vec<(Mask, Rational)>, relation: Relation, rhs: Rational) -> Self {
        // Merge repeated subsets so the row reads canonically.
        let mut merged: Vec<(Mask, Rational)> = Vec::with_capacity(terms.len());
        for (mask, c) in terms {
            match merged.iter_mut().find(|(m, _)| *m == mask) {
                Some((_, acc)) => *acc += c,
                None => merged.push((mask, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        merged.sort_by_key(|(m, _)| *m);
        Self {
            kind,
            terms: merged,
            relation,
            rhs,
        }
    }

    pub fn holds(&self, value: impl Fn(Mask) -> Rational) -> bool {
        let lhs = self
            .terms
            .iter()
            .fold(zero(), |acc, (m, c)| acc + c * value(*m));
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }

    pub fn describe(&self, space: &StateSpace) -> String {
        let mut out = String::new();
        for (k, (mask, c)) in self.terms.iter().enumerate() {
            let magnitude = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if k == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                let _ = write!(out, " {sign} ");
            }
            if !magnitude.is_one() {
                let _ = write!(out, "{magnitude}*");
            }
            let _ = write!(out, "v{}", space.format_subset(*mask));
        }
        if self.terms.is_empty() {
            out.push('0');
        }
        let rel = match self.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        format!("{out} {rel} {}", self.rhs)
    }
}

/// The linear system cutting out the capacities of one player at one level:
/// normalization, monotonicity, belief in the survivor set, and the shape
/// constraint. Non-additivity is not linear and is carried as a flag.
#[derive(Clone, Debug)]
pub struct CapacityPolytope {
    space: StateSpace,
    survivors: Mask,
    restriction: PlayerRestriction,
    rows: Vec<PolytopeRow>,
}

/// The polytope of player `i` believing the opponents' parts of
/// `survivors`.
pub fn build_polytope(
    game: &StrategicGame,
    i: usize,
    restriction: PlayerRestriction,
    survivors: &ProductSet,
) -> Result<CapacityPolytope, SolverError> {
    game.check_player(i)?;
    let space = game.opponent_space(i)?;
    let mask = game.opponent_mask(i, survivors);
    if mask == 0 {
        return Err(SolverError::EmptySurvivorSet(i));
    }
    Ok(CapacityPolytope::new(&space, restriction, mask))
}

impl CapacityPolytope {
    /// Builds the system on an arbitrary space; `survivors` must be nonempty.
    pub fn new(space: &StateSpace, restriction: PlayerRestriction, survivors: Mask) -> Self {
        assert!(survivors != 0 && survivors & !space.full_mask() == 0);
        let full = space.full_mask();
        let n = space.len();
        let mut rows = vec![
            PolytopeRow::new(RowKind::Normalization, vec![(0, one())], Relation::Eq, zero()),
            PolytopeRow::new(RowKind::Normalization, vec![(full, one())], Relation::Eq, one()),
        ];
        for s in 0..full {
            for k in (0..n).filter(|k| s & (1 << k) == 0) {
                rows.push(PolytopeRow::new(
                    RowKind::Monotonicity,
                    vec![(s | (1 << k), one()), (s, int(-1))],
                    Relation::Ge,
                    zero(),
                ));
            }
        }
        let outside = full & !survivors;
        if outside != 0 {
            for f in submasks(survivors) {
                rows.push(PolytopeRow::new(
                    RowKind::Belief,
                    vec![(outside | f, one()), (f, int(-1))],
                    Relation::Eq,
                    zero(),
                ));
            }
        }
        match restriction.shape {
            Shape::Unrestricted => {}
            Shape::Convex | Shape::Concave => {
                let (kind, relation) = if restriction.shape == Shape::Convex {
                    (RowKind::Convexity, Relation::Le)
                } else {
                    (RowKind::Concavity, Relation::Ge)
                };
                for e in 0..=full {
                    for f in (e + 1)..=full {
                        if e & f == e || e & f == f {
                            continue;
                        }
                        rows.push(PolytopeRow::new(
                            kind,
                            vec![(e, one()), (f, one()), (e | f, int(-1)), (e & f, int(-1))],
                            relation,
                            zero(),
                        ));
                    }
                }
            }
            Shape::Additive => {
                for s in (0..=full).filter(|s| s.count_ones() >= 2) {
                    let mut terms = vec![(s, one())];
                    terms.extend((0..n).filter(|k| s & (1 << k) != 0).map(|k| (1 << k, int(-1))));
                    rows.push(PolytopeRow::new(RowKind::Additivity, terms, Relation::Eq, zero()));
                }
            }
        }
        Self {
            space: space.clone(),
            survivors,
            restriction,
            rows,
        }
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn survivors(&self) -> Mask {
        self.survivors
    }

    pub fn restriction(&self) -> PlayerRestriction {
        self.restriction
    }

    pub fn rows(&self) -> &[PolytopeRow] {
        &self.rows
    }

    pub fn rows_of(&self, kind: RowKind) -> impl Iterator<Item = &PolytopeRow> {
        self.rows.iter().filter(move |r| r.kind == kind)
    }

    /// Membership of a capacity by direct evaluation of every row plus the
    /// non-additivity flag.
    pub fn contains(&self, cap: &Capacity) -> bool {
        cap.space().same_as(&self.space)
            && self.rows.iter().all(|r| r.holds(|m| cap.value(m).clone()))
            && (!self.restriction.non_additive || !cap.is_additive())
    }

    /// One line per row, tagged by kind, in construction order.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let _ = writeln!(out, "{:<14} {}", row.kind.tag(), row.describe(&self.space));
        }
        if self.restriction.non_additive {
            let _ = writeln!(out, "{:<14} v(E) + v(F) != v(E u F) for some disjoint E, F", "na");
        }
        out
    }

    /// A feasibility program with one variable per subset, in mask order.
    pub fn to_program(&self, extra: &[PolytopeRow]) -> LinearProgram {
        let names = (0..self.space.subset_count() as Mask)
            .map(|m| format!("v{}", self.space.format_subset(m)))
            .collect();
        let mut program = LinearProgram::new(names);
        for row in self.rows.iter().chain(extra) {
            let terms: Vec<(usize, Rational)> =
                row.terms.iter().map(|(m, c)| (*m as usize, c.clone())).collect();
            program.add_sparse(&terms, row.relation, row.rhs.clone());
        }
        program
    }
}

/// Coefficients of `CEU(f; v)` on the cumulative upper level sets of `f`:
/// `Σ_j (x_j - x_{j+1}) v(C_j)` with `x_{m+1} = 0` and `C_m = Ω`.
pub fn ceu_terms(payoffs: &[Rational]) -> Vec<(Mask, Rational)> {
    let mut levels: Vec<&Rational> = payoffs.iter().collect();
    levels.sort_by(|a, b| b.cmp(a));
    levels.dedup();
    let chain = level_chain(payoffs);
    chain
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let next = levels.get(j + 1).map_or_else(zero, |x| (*x).clone());
            (c, levels[j] - next)
        })
        .collect()
}

/// `CEU(a; v) >= CEU(b; v)` for every rival `b`.
pub fn best_response_rows(game: &StrategicGame, i: usize, a: usize, rivals: &[usize]) -> Vec<PolytopeRow> {
    let own = ceu_terms(&game.act_payoffs(i, a));
    rivals
        .iter()
        .filter(|&&b| b != a)
        .map(|&b| {
            let mut terms = own.clone();
            terms.extend(
                ceu_terms(&game.act_payoffs(i, b))
                    .into_iter()
                    .map(|(m, c)| (m, -c)),
            );
            PolytopeRow::new(RowKind::BestResponse, terms, Relation::Ge, zero())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn two_states() -> StateSpace {
        StateSpace::new(["l", "r"]).unwrap()
    }

    #[test]
    fn unrestricted_two_state_system() {
        let p = CapacityPolytope::new(&two_states(), PlayerRestriction::UNRESTRICTED, 0b11);
        let text = p.describe();
        assert!(text.contains("normalization  v{} = 0"));
        assert!(text.contains("normalization  v{l,r} = 1"));
        assert!(text.contains("monotonicity   -v{} + v{l} >= 0"));
        assert!(text.contains("monotonicity   -v{r} + v{l,r} >= 0"));
        assert_eq!(p.rows_of(RowKind::Belief).count(), 0);
    }

    #[test]
    fn additive_adds_singleton_sum() {
        let p = CapacityPolytope::new(&two_states(), PlayerRestriction::shape(Shape::Additive), 0b11);
        let rows: Vec<_> = p.rows_of(RowKind::Additivity).collect();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].describe(&two_states()), "-v{l} - v{r} + v{l,r} = 0");
    }

    #[test]
    fn ceu_terms_telescope() {
        // Payoffs (3, 1, 2): levels 3 > 2 > 1 on {a}, {a,c}, Ω.
        let terms = ceu_terms(&[int(3), int(1), int(2)]);
        assert_eq!(terms, vec![(0b001, int(1)), (0b101, int(1)), (0b111, int(1))]);
        let ties = ceu_terms(&[int(2), int(2)]);
        assert_eq!(ties, vec![(0b11, int(2))]);
        let negative = ceu_terms(&[ratio(-1, 2), int(1)]);
        assert_eq!(negative, vec![(0b10, ratio(3, 2)), (0b11, ratio(-1, 2))]);
    }

    #[test]
    fn membership_matches_rows() {
        let space = two_states();
        let convex = CapacityPolytope::new(&space, PlayerRestriction::shape(Shape::Convex), 0b11);
        let cap1 = Capacity::new(&space, vec![zero(), ratio(1, 4), ratio(1, 4), one()]).unwrap();
        let loving = Capacity::new(&space, vec![zero(), ratio(3, 4), ratio(3, 4), one()]).unwrap();
        assert!(convex.contains(&cap1));
        assert!(!convex.contains(&loving));
        let believes_l = CapacityPolytope::new(&space, PlayerRestriction::UNRESTRICTED, 0b01);
        assert!(!believes_l.contains(&cap1));
        assert!(believes_l.contains(&Capacity::degenerate(&space, 0)));
    }
}
