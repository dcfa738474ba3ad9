//! Brute-force witness search over capacities with small denominators.
//!
//! The search shares nothing with the LP route: candidate capacities are
//! enumerated directly, every constraint is checked as a predicate, and the
//! Choquet integrals are evaluated from a sort of each act's payoffs in
//! scaled integer arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::capacity::{submasks, Capacity, Mask};
use crate::game::{ProductSet, StrategicGame};
use crate::rational::Rational;

use super::restriction::{PlayerRestriction, Shape};
use super::SolverError;

/// Largest opponent space the exhaustive search accepts.
pub const ORACLE_MAX_STATES: usize = 3;

/// First capacity on `A_{-i}` in canonical grid order that believes the
/// opponents' parts of `survivors`, satisfies `r`, and makes `a` a Choquet
/// best response among all of `A_i`.
///
/// The grid holds every capacity whose values share a common denominator
/// `q <= bound`; `q` is tried in increasing order, and within one `q` the
/// values are enumerated in subset-mask order, smallest first.
pub fn grid_oracle(
    game: &StrategicGame,
    i: usize,
    a: usize,
    survivors: &ProductSet,
    r: PlayerRestriction,
    bound: u32,
) -> Result<Option<Capacity>, SolverError> {
    let rivals: Vec<usize> = (0..game.action_count(i)).collect();
    grid_oracle_among(game, i, a, &rivals, survivors, r, bound)
}

/// [`grid_oracle`] with the argmax taken over `rivals` only.
pub fn grid_oracle_among(
    game: &StrategicGame,
    i: usize,
    a: usize,
    rivals: &[usize],
    survivors: &ProductSet,
    r: PlayerRestriction,
    bound: u32,
) -> Result<Option<Capacity>, SolverError> {
    game.check_action(i, a)?;
    let states = game.opponent_profile_count(i);
    if states > ORACLE_MAX_STATES {
        return Err(SolverError::SizeCap {
            player: i,
            profiles: states,
            limit: ORACLE_MAX_STATES,
        });
    }
    let believed = game.opponent_mask(i, survivors);
    if believed == 0 {
        return Ok(None);
    }
    let acts = scaled_acts(game, i, a, rivals)?;
    let search = Search {
        states,
        full: (1 << states) - 1,
        believed,
        r,
        acts: &acts,
    };
    for q in 1..=i64::from(bound.max(1)) {
        let mut values = vec![0i64; 1 << states];
        values[search.full as usize] = q;
        if search.assign(1, q, &mut values) {
            let space = game.opponent_space(i)?;
            let cap = Capacity::new(
                &space,
                values.iter().map(|&v| Rational::new(v.into(), q.into())).collect(),
            )?;
            let best = game.choquet_best_responses_among(i, rivals, &cap)?;
            if !best.contains(&a) {
                return Err(SolverError::Internal(format!(
                    "grid witness for action {a} of player {i} is not a best response"
                )));
            }
            return Ok(Some(cap));
        }
    }
    Ok(None)
}

/// Payoff rows for `a` followed by the rivals, scaled to integers.
fn scaled_acts(
    game: &StrategicGame,
    i: usize,
    a: usize,
    rivals: &[usize],
) -> Result<Vec<Vec<i64>>, SolverError> {
    let rows: Vec<Vec<Rational>> = std::iter::once(a)
        .chain(rivals.iter().copied().filter(|&b| b != a))
        .map(|b| game.act_payoffs(i, b))
        .collect();
    let lcm = rows
        .iter()
        .flatten()
        .fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    (x.numer() * (&lcm / x.denom()))
                        .to_i64()
                        .filter(|v| v.abs() < 1 << 40)
                        .ok_or(SolverError::OracleOverflow)
                })
                .collect()
        })
        .collect()
}

struct Search<'a> {
    states: usize,
    full: Mask,
    believed: Mask,
    r: PlayerRestriction,
    /// `acts[0]` is the candidate action.
    acts: &'a [Vec<i64>],
}

impl Search<'_> {
    /// Depth-first over masks `1..full`; returns true with `values` holding
    /// the first complete witness.
    fn assign(&self, mask: Mask, q: i64, values: &mut Vec<i64>) -> bool {
        if mask == self.full {
            return self.accept_full(q, values);
        }
        let lower = (0..self.states)
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| values[(mask & !(1 << k)) as usize])
            .max()
            .unwrap_or(0);
        let (lo, hi) = match self.pinned(mask, q, values) {
            Some(v) => (v, v),
            None => (lower, q),
        };
        for v in lo.max(lower)..=hi.min(q) {
            values[mask as usize] = v;
            if self.shape_ok(mask, values) && self.assign(mask + 1, q, values) {
                return true;
            }
        }
        false
    }

    /// Values forced by belief or additivity.
    fn pinned(&self, mask: Mask, q: i64, values: &[i64]) -> Option<i64> {
        if mask & !self.believed != 0 {
            return Some(values[(mask & self.believed) as usize]);
        }
        if mask == self.believed {
            return Some(q);
        }
        if self.r.shape == Shape::Additive && mask.count_ones() >= 2 {
            return Some(
                (0..self.states)
                    .filter(|k| mask & (1 << k) != 0)
                    .map(|k| values[1 << k])
                    .sum(),
            );
        }
        None
    }

    /// Shape inequalities whose largest set is `mask`.
    fn shape_ok(&self, mask: Mask, values: &[i64]) -> bool {
        let sign = match self.r.shape {
            Shape::Convex => 1,
            Shape::Concave => -1,
            _ => return true,
        };
        for e in submasks(mask) {
            for f in submasks(mask) {
                if e | f != mask || e >= f {
                    continue;
                }
                let lhs = values[e as usize] + values[f as usize];
                let rhs = values[mask as usize] + values[(e & f) as usize];
                if sign * (rhs - lhs) < 0 {
                    return false;
                }
            }
        }
        true
    }

    fn accept_full(&self, q: i64, values: &[i64]) -> bool {
        let full = self.full;
        let monotone = (0..self.states).all(|k| values[(full & !(1 << k)) as usize] <= q);
        let belief = self.believed == full || values[self.believed as usize] == q;
        let additive = self.r.shape != Shape::Additive
            || (0..self.states).map(|k| values[1 << k]).sum::<i64>() == q;
        if !(monotone && belief && additive && self.shape_ok(full, values)) {
            return false;
        }
        // Capacities reducible to a smaller denominator were seen earlier.
        if values.iter().fold(q, |g, &v| g.gcd(&v)) != 1 {
            return false;
        }
        if self.r.non_additive && !self.non_additive(values) {
            return false;
        }
        let own = choquet_scaled(&self.acts[0], values);
        self.acts[1..].iter().all(|b| choquet_scaled(b, values) <= own)
    }

    fn non_additive(&self, values: &[i64]) -> bool {
        (1..=self.full).any(|e| {
            (1..=self.full)
                .filter(|f| e & f == 0)
                .any(|f| values[e as usize] + values[f as usize] != values[(e | f) as usize])
        })
    }
}

/// `Σ x_j (v(C_j) - v(C_{j-1}))` over the distinct payoffs in decreasing
/// order, scaled by the grid denominator.
fn choquet_scaled(payoffs: &[i64], values: &[i64]) -> i128 {
    let mut order: Vec<usize> = (0..payoffs.len()).collect();
    order.sort_by(|&x, &y| payoffs[y].cmp(&payoffs[x]));
    let mut total: i128 = 0;
    let mut upper: usize = 0;
    let mut previous = 0i64;
    let mut k = 0;
    while k < order.len() {
        let level = payoffs[order[k]];
        while k < order.len() && payoffs[order[k]] == level {
            upper |= 1 << order[k];
            k += 1;
        }
        let current = values[upper];
        total += i128::from(level) * i128::from(current - previous);
        previous = current;
    }
    total
}
