//! Direct Choquet rationalizability: one capacity polytope per player and
//! level, one best-response LP per action.

mod classical;
mod oracle;
mod polytope;
mod restriction;

use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::capacity::{Capacity, CapacityError, Mask};
use crate::game::{GameError, ProductSet, StrategicGame};
use crate::lp::{self, LinearProgram, LpError, Objective, Status};
use crate::rational::{int, one, Rational};

pub use classical::{classical_rationalizability, eu_strictly_dominated};
pub use oracle::{grid_oracle, grid_oracle_among, ORACLE_MAX_STATES};
pub use polytope::{
    best_response_rows, build_polytope, ceu_terms, CapacityPolytope, PolytopeRow, RowKind,
};
pub use restriction::{AttitudeRestriction, PlayerRestriction, RestrictionError, Shape};

/// Default bound on `|A_{-i}|` for the direct route (32 subset variables).
pub const DEFAULT_PROFILE_CAP: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("player {player} faces {profiles} opponent profiles; the limit is {limit}")]
    SizeCap {
        player: usize,
        profiles: usize,
        limit: usize,
    },
    #[error("player {0} has no surviving opponent profile to believe in")]
    EmptySurvivorSet(usize),
    #[error("payoffs are too large for the grid search")]
    OracleOverflow,
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Restriction(#[from] RestrictionError),
}

/// Solves `program`, re-verifies the certificate, and returns the result.
fn solve_checked(program: &LinearProgram) -> Result<lp::LpResult, SolverError> {
    let result = lp::solve(program)?;
    lp::verify(program, &result)?;
    Ok(result)
}

/// Range of `v(E) + v(F) - v(E ∪ F)` over a feasible region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairGap {
    pub e: Mask,
    pub f: Mask,
    pub min: Rational,
    pub max: Rational,
}

fn disjoint_pairs(full: Mask) -> impl Iterator<Item = (Mask, Mask)> {
    (1..=full).flat_map(move |e| {
        ((e + 1)..=full)
            .filter(move |f| e & f == 0)
            .map(move |f| (e, f))
    })
}

fn gap_objective(len: usize, e: Mask, f: Mask, sign: i64) -> Vec<Rational> {
    let mut c = vec![Rational::zero(); len];
    c[e as usize] += int(sign);
    c[f as usize] += int(sign);
    c[(e | f) as usize] -= int(sign);
    c
}

/// Feasibility program for `a` being a best response among `rivals` inside
/// `poly`.
fn best_response_program(
    game: &StrategicGame,
    i: usize,
    a: usize,
    rivals: &[usize],
    poly: &CapacityPolytope,
) -> LinearProgram {
    poly.to_program(&best_response_rows(game, i, a, rivals))
}

fn capacity_from(
    game: &StrategicGame,
    i: usize,
    a: usize,
    rivals: &[usize],
    poly: &CapacityPolytope,
    values: Vec<Rational>,
) -> Result<Capacity, SolverError> {
    let cap = Capacity::new(poly.space(), values)?;
    if !poly.contains(&cap) {
        return Err(SolverError::Internal(format!(
            "LP witness for action {a} of player {i} leaves its polytope"
        )));
    }
    if !game.choquet_best_responses_among(i, rivals, &cap)?.contains(&a) {
        return Err(SolverError::Internal(format!(
            "LP witness for action {a} of player {i} is not a best response"
        )));
    }
    Ok(cap)
}

/// A capacity in `poly` under which `a` is a Choquet best response over all
/// of `A_i`, or `None`. With the polytope's non-additivity flag set, the
/// witness maximizes or minimizes some disjoint-pair gap to a nonzero value.
pub fn exists_best_response_capacity(
    game: &StrategicGame,
    i: usize,
    a: usize,
    poly: &CapacityPolytope,
) -> Result<Option<Capacity>, SolverError> {
    let rivals: Vec<usize> = (0..game.action_count(i)).collect();
    best_response_capacity_among(game, i, a, &rivals, poly)
}

/// [`exists_best_response_capacity`] with the argmax over `rivals` only.
pub fn best_response_capacity_among(
    game: &StrategicGame,
    i: usize,
    a: usize,
    rivals: &[usize],
    poly: &CapacityPolytope,
) -> Result<Option<Capacity>, SolverError> {
    game.check_action(i, a)?;
    let mut program = best_response_program(game, i, a, rivals, poly);
    if !poly.restriction().non_additive {
        let result = solve_checked(&program)?;
        return match result.status {
            Status::Infeasible => Ok(None),
            _ => {
                let values = result.solution.expect("feasible program has a point");
                capacity_from(game, i, a, rivals, poly, values).map(Some)
            }
        };
    }
    let len = program.num_vars();
    for (e, f) in disjoint_pairs(poly.space().full_mask()) {
        for sign in [1, -1] {
            program.objective = Objective::Maximize(gap_objective(len, e, f, sign));
            let result = solve_checked(&program)?;
            match result.status {
                Status::Infeasible => return Ok(None),
                Status::Unbounded => {
                    return Err(SolverError::Internal("gap program is unbounded".into()))
                }
                Status::Optimal => {}
            }
            if result.objective.as_ref().is_some_and(|g| g.is_positive()) {
                let values = result.solution.expect("optimal");
                return capacity_from(game, i, a, rivals, poly, values).map(Some);
            }
        }
    }
    Ok(None)
}

/// Every disjoint-pair gap range over the best-response region of `a` in
/// `poly` (ignoring its non-additivity flag), or `None` if the region is
/// empty. All-zero ranges prove the region is additive.
pub fn nonadditivity_gaps(
    game: &StrategicGame,
    i: usize,
    a: usize,
    poly: &CapacityPolytope,
) -> Result<Option<Vec<PairGap>>, SolverError> {
    game.check_action(i, a)?;
    let rivals: Vec<usize> = (0..game.action_count(i)).collect();
    let mut program = best_response_program(game, i, a, &rivals, poly);
    let len = program.num_vars();
    let mut gaps = Vec::new();
    for (e, f) in disjoint_pairs(poly.space().full_mask()) {
        program.objective = Objective::Maximize(gap_objective(len, e, f, 1));
        let max = solve_checked(&program)?;
        if max.status == Status::Infeasible {
            return Ok(None);
        }
        program.objective = Objective::Minimize(gap_objective(len, e, f, 1));
        let min = solve_checked(&program)?;
        match (max.objective, min.objective) {
            (Some(max), Some(min)) => gaps.push(PairGap { e, f, min, max }),
            _ => return Err(SolverError::Internal("gap program is unbounded".into())),
        }
    }
    Ok(Some(gaps))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Largest `|A_{-i}|` accepted.
    pub profile_cap: usize,
    /// Stop after this many levels even without a fixed point.
    pub max_levels: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            profile_cap: DEFAULT_PROFILE_CAP,
            max_levels: None,
        }
    }
}

/// Survivors of one level with a witness capacity per surviving action.
#[derive(Clone, Debug)]
pub struct SolveLevel {
    pub survivors: ProductSet,
    /// `witnesses[i]` pairs each surviving action of player `i` with its
    /// witness; empty at level 0.
    pub witnesses: Vec<Vec<(usize, Capacity)>>,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub restriction: AttitudeRestriction,
    /// `levels[k]` holds `R^{r,k}`; level 0 is the full action space.
    pub levels: Vec<SolveLevel>,
    /// Smallest `k` with `R^{r,k} = R^{r,k+1}`.
    pub fixed_point_index: usize,
    /// True when the level cap stopped the iteration first.
    pub truncated: bool,
}

impl SolveReport {
    /// `R^{r,k}`, saturating at the fixed point.
    pub fn level(&self, k: usize) -> &ProductSet {
        &self.levels[k.min(self.fixed_point_index)].survivors
    }

    pub fn limit(&self) -> &ProductSet {
        self.level(self.fixed_point_index)
    }

    /// Witness of `a` at level `k`; later levels reuse the last recorded.
    pub fn witness(&self, k: usize, i: usize, a: usize) -> Option<&Capacity> {
        self.levels[k.min(self.levels.len() - 1)].witnesses[i]
            .iter()
            .find(|(b, _)| *b == a)
            .map(|(_, c)| c)
    }

    /// Witness of `a` believing `R^{r,∞}_{-i}`, taken from the level that
    /// repeated the fixed point.
    pub fn limit_witness(&self, i: usize, a: usize) -> Option<&Capacity> {
        if self.truncated {
            return None;
        }
        self.levels[self.fixed_point_index + 1].witnesses[i]
            .iter()
            .find(|(b, _)| *b == a)
            .map(|(_, c)| c)
    }

    /// Players with an empty set at the limit.
    pub fn empty_players(&self) -> Vec<usize> {
        let limit = self.limit();
        (0..limit.len()).filter(|&i| limit.player(i).is_empty()).collect()
    }

    /// First level at which player `i`'s set is empty.
    pub fn empty_from(&self, i: usize) -> Option<usize> {
        self.levels.iter().position(|l| l.survivors.player(i).is_empty())
    }

    pub fn is_monotone(&self) -> bool {
        self.levels
            .windows(2)
            .all(|w| w[1].survivors.is_subset_of(&w[0].survivors))
    }

    /// Per level and player: surviving actions and their witnesses in the
    /// capacity text format.
    pub fn to_text(&self, game: &StrategicGame) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "restriction {}", self.restriction);
        for (k, level) in self.levels.iter().enumerate().skip(1) {
            let _ = writeln!(out, "level {k}");
            for i in 0..game.num_players() {
                let _ = writeln!(
                    out,
                    "  survivors {}: {}",
                    game.player_name(i),
                    game.format_actions(i, level.survivors.player(i))
                );
                for (a, cap) in &level.witnesses[i] {
                    let _ = writeln!(
                        out,
                        "  witness {} {}",
                        game.player_name(i),
                        game.action_label(i, *a)
                    );
                    for line in cap.to_text().lines() {
                        let _ = writeln!(out, "    {line}");
                    }
                }
            }
        }
        if self.truncated {
            let _ = writeln!(out, "stopped at level {} before a fixed point", self.levels.len() - 1);
        } else {
            let _ = writeln!(out, "fixed point at level {}", self.fixed_point_index);
        }
        for i in self.empty_players() {
            if let Some(k) = self.empty_from(i) {
                let _ = writeln!(out, "empty {} from level {k}", game.player_name(i));
            }
        }
        out
    }
}

fn check_sizes(game: &StrategicGame, cap: usize) -> Result<(), SolverError> {
    for i in 0..game.num_players() {
        let profiles = game.opponent_profile_count(i);
        if profiles > cap {
            return Err(SolverError::SizeCap {
                player: i,
                profiles,
                limit: cap,
            });
        }
    }
    Ok(())
}

/// Level `k + 1` from the survivors of level `k`.
fn next_level(
    game: &StrategicGame,
    r: &AttitudeRestriction,
    current: &ProductSet,
) -> Result<SolveLevel, SolverError> {
    let per_player: Vec<Result<Vec<(usize, Capacity)>, SolverError>> = (0..game.num_players())
        .into_par_iter()
        .map(|i| {
            let poly = match build_polytope(game, i, r.player(i), current) {
                Ok(poly) => poly,
                Err(SolverError::EmptySurvivorSet(_)) => return Ok(Vec::new()),
                Err(e) => return Err(e),
            };
            let found: Vec<Result<Option<Capacity>, SolverError>> = (0..game.action_count(i))
                .into_par_iter()
                .map(|a| exists_best_response_capacity(game, i, a, &poly))
                .collect();
            let mut witnesses = Vec::new();
            for (a, w) in found.into_iter().enumerate() {
                if let Some(cap) = w? {
                    witnesses.push((a, cap));
                }
            }
            Ok(witnesses)
        })
        .collect();
    let witnesses = per_player.into_iter().collect::<Result<Vec<_>, _>>()?;
    let survivors = ProductSet::new(
        witnesses
            .iter()
            .map(|w| w.iter().map(|(a, _)| *a).collect())
            .collect(),
    );
    Ok(SolveLevel {
        survivors,
        witnesses,
    })
}

/// `R^{r,k}` for `k = 0, 1, …` until two consecutive levels agree.
pub fn choquet_rationalizable(
    game: &StrategicGame,
    r: &AttitudeRestriction,
) -> Result<SolveReport, SolverError> {
    choquet_rationalizable_with(game, r, SolveOptions::default())
}

pub fn choquet_rationalizable_with(
    game: &StrategicGame,
    r: &AttitudeRestriction,
    options: SolveOptions,
) -> Result<SolveReport, SolverError> {
    if r.len() != game.num_players() {
        return Err(RestrictionError::PlayerCount {
            given: r.len(),
            players: game.num_players(),
        }
        .into());
    }
    check_sizes(game, options.profile_cap)?;
    let mut levels = vec![SolveLevel {
        survivors: ProductSet::full(game),
        witnesses: vec![Vec::new(); game.num_players()],
    }];
    loop {
        let current = &levels.last().unwrap().survivors;
        let next = next_level(game, r, current)?;
        let fixed = next.survivors == *current;
        levels.push(next);
        if fixed {
            let fixed_point_index = levels.len() - 2;
            return Ok(SolveReport {
                restriction: r.clone(),
                levels,
                fixed_point_index,
                truncated: false,
            });
        }
        if options.max_levels.is_some_and(|cap| levels.len() > cap) {
            let fixed_point_index = levels.len() - 1;
            return Ok(SolveReport {
                restriction: r.clone(),
                levels,
                fixed_point_index,
                truncated: true,
            });
        }
    }
}

/// Outcome of checking the fixed-point characterization on a candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointCheck {
    /// Every candidate action has a best-response witness believing the
    /// candidate opponent sets.
    pub has_property: bool,
    /// First `(player, action)` without a witness.
    pub failure: Option<(usize, usize)>,
    /// A strict product superset that also has the property, if any.
    pub larger: Option<ProductSet>,
}

impl FixedPointCheck {
    pub fn holds(&self) -> bool {
        self.has_property && self.larger.is_none()
    }
}

/// First action in `candidate` without an unrestricted witness.
fn fixed_point_failure(
    game: &StrategicGame,
    candidate: &ProductSet,
) -> Result<Option<(usize, usize)>, SolverError> {
    for i in 0..game.num_players() {
        if candidate.player(i).is_empty() {
            continue;
        }
        let poly = match build_polytope(game, i, PlayerRestriction::UNRESTRICTED, candidate) {
            Ok(poly) => poly,
            Err(SolverError::EmptySurvivorSet(_)) => return Ok(Some((i, candidate.player(i)[0]))),
            Err(e) => return Err(e),
        };
        for &a in candidate.player(i) {
            if exists_best_response_capacity(game, i, a, &poly)?.is_none() {
                return Ok(Some((i, a)));
            }
        }
    }
    Ok(None)
}

/// Largest number of product supersets examined by the maximality check.
pub const MAX_SUPERSETS: usize = 1 << 12;

/// Checks the property of the fixed-point characterization on `candidate`
/// and searches all of its strict product supersets for a larger set with
/// the same property.
pub fn verify_fixed_point(
    game: &StrategicGame,
    candidate: &ProductSet,
) -> Result<FixedPointCheck, SolverError> {
    check_sizes(game, DEFAULT_PROFILE_CAP)?;
    let failure = fixed_point_failure(game, candidate)?;
    let missing: Vec<(usize, usize)> = (0..game.num_players())
        .flat_map(|i| {
            (0..game.action_count(i))
                .filter(move |&a| !candidate.contains(i, a))
                .map(move |a| (i, a))
        })
        .collect();
    if missing.len() > 12 || (1usize << missing.len()) > MAX_SUPERSETS {
        return Err(SolverError::SizeCap {
            player: 0,
            profiles: missing.len(),
            limit: 12,
        });
    }
    let supersets: Vec<ProductSet> = (1..(1usize << missing.len()))
        .map(|bits| {
            let mut sets = candidate.sets().to_vec();
            for (k, &(i, a)) in missing.iter().enumerate() {
                if bits & (1 << k) != 0 {
                    sets[i].push(a);
                }
            }
            ProductSet::new(sets)
        })
        .collect();
    let passing: Vec<Result<Option<ProductSet>, SolverError>> = supersets
        .into_par_iter()
        .map(|s| Ok(fixed_point_failure(game, &s)?.is_none().then_some(s)))
        .collect();
    let mut larger = None;
    for p in passing {
        if let Some(s) = p? {
            larger = Some(s);
            break;
        }
    }
    Ok(FixedPointCheck {
        has_property: failure.is_none(),
        failure,
        larger,
    })
}

/// Whether `cap` is the point mass on `state`.
pub fn singleton_belief_is_degenerate(cap: &Capacity, state: usize) -> bool {
    let space = cap.space();
    (0..space.subset_count() as Mask).all(|s| {
        let expected = if s & (1 << state) != 0 { one() } else { Rational::zero() };
        *cap.value(s) == expected
    })
}
