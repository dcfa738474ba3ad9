//! Textbook rationalizability with correlated probabilistic conjectures,
//! computed by iterated strict dominance of pure actions by mixtures.

use num_traits::Signed;

use crate::game::{ProductSet, StrategicGame};
use crate::lp::{self, LinearProgram, Objective, Relation};
use crate::rational::{int, one, zero, Rational};

use super::SolverError;

/// Whether some mixture over `A_i` beats `a` strictly against every
/// opponent profile drawn from `survivors`.
pub fn eu_strictly_dominated(
    game: &StrategicGame,
    i: usize,
    a: usize,
    survivors: &ProductSet,
) -> Result<bool, SolverError> {
    let actions = game.action_count(i);
    let opponents: Vec<usize> = (0..game.num_players()).filter(|&j| j != i).collect();
    let profiles: Vec<Vec<usize>> = game
        .opponent_profiles(i)
        .into_iter()
        .filter(|p| opponents.iter().zip(p).all(|(&j, &b)| survivors.contains(j, b)))
        .collect();
    if profiles.is_empty() {
        return Ok(false);
    }
    let mut names: Vec<String> = (0..actions).map(|b| format!("p{b}")).collect();
    names.push("t".into());
    let mut program = LinearProgram::new(names);
    let mut objective = vec![zero(); actions + 1];
    objective[actions] = one();
    program.objective = Objective::Maximize(objective);
    for b in 0..actions {
        program.set_bounds(b, Some(zero()), None);
    }
    for opp in &profiles {
        let mut row: Vec<Rational> = (0..actions)
            .map(|b| game.payoff(i, &game.join(i, b, opp)).clone())
            .collect();
        row.push(int(-1));
        program.add(row, Relation::Ge, game.payoff(i, &game.join(i, a, opp)).clone());
    }
    let mut simplex = vec![one(); actions];
    simplex.push(zero());
    program.add(simplex, Relation::Eq, one());
    let result = lp::solve(&program)?;
    lp::verify(&program, &result)?;
    Ok(result.objective.is_some_and(|t| t.is_positive()))
}

/// Levels `R^0 = A, R^1, …` up to the first repeated level.
pub fn classical_rationalizability(game: &StrategicGame) -> Result<Vec<ProductSet>, SolverError> {
    let mut levels = vec![ProductSet::full(game)];
    loop {
        let current = levels.last().unwrap();
        let mut next = Vec::with_capacity(game.num_players());
        for i in 0..game.num_players() {
            let mut kept = Vec::new();
            for a in 0..game.action_count(i) {
                if !eu_strictly_dominated(game, i, a, current)? {
                    kept.push(a);
                }
            }
            next.push(kept);
        }
        let next = ProductSet::new(next);
        let done = next == *current;
        levels.push(next);
        if done {
            return Ok(levels);
        }
    }
}
