//! The extended game over nonempty action subsets and iterated elimination
//! of strictly dominated action sets.
//!
//! Extended actions of player `i` are nonempty subsets of `A_i`, encoded as
//! bit patterns over `i`'s action indices and listed in increasing mask
//! order. The payoff of an extended profile is the minimum base payoff over
//! the product of its members.

use std::fmt::Write as _;

use num_traits::Signed;
use rayon::prelude::*;
use thiserror::Error;

use crate::game::{ProductSet, StrategicGame};
use crate::lp::{self, LinearProgram, Objective, Relation};
use crate::rational::{int, one, zero, Rational};

pub type ActionMask = u32;

/// Default per-player action cap (`2^10 - 1` extended actions).
pub const DEFAULT_ACTION_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtendedError {
    #[error("player {player} has {actions} actions; the extended game cap is {cap}")]
    SizeCap {
        player: usize,
        actions: usize,
        cap: usize,
    },
    #[error("candidate {0:#b} is not in the player's restriction")]
    NotInRestriction(ActionMask),
    #[error("opponent restriction is empty")]
    EmptyOpponentRestriction,
    #[error("level {0} was not recorded")]
    LevelOutOfRange(usize),
    #[error(transparent)]
    Lp(#[from] lp::LpError),
}

pub fn mask_members(mask: ActionMask) -> impl Iterator<Item = usize> {
    (0..32).filter(move |k| mask & (1 << k) != 0)
}

fn mask_of(actions: &[usize]) -> ActionMask {
    actions.iter().fold(0, |m, &a| m | (1 << a))
}

#[derive(Clone, Debug)]
pub struct ExtendedGame {
    base: StrategicGame,
    /// Extended action masks per player, ascending.
    actions: Vec<Vec<ActionMask>>,
    /// `payoffs[profile]` holds one payoff per player; profiles are
    /// lexicographic over extended action indices.
    payoffs: Vec<Vec<Rational>>,
    strides: Vec<usize>,
}

impl ExtendedGame {
    pub fn build(base: &StrategicGame) -> Result<Self, ExtendedError> {
        Self::build_with_cap(base, DEFAULT_ACTION_CAP)
    }

    pub fn build_with_cap(base: &StrategicGame, cap: usize) -> Result<Self, ExtendedError> {
        let players = base.num_players();
        for i in 0..players {
            if base.action_count(i) > cap || base.action_count(i) > 31 {
                return Err(ExtendedError::SizeCap {
                    player: i,
                    actions: base.action_count(i),
                    cap,
                });
            }
        }
        let actions: Vec<Vec<ActionMask>> = (0..players)
            .map(|i| (1..(1u32 << base.action_count(i))).collect())
            .collect();
        let mut strides = vec![1; players];
        for i in (0..players.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * actions[i + 1].len();
        }
        let count: usize = actions.iter().map(Vec::len).product();
        let payoffs = (0..count)
            .into_par_iter()
            .map(|k| {
                let masks: Vec<ActionMask> = (0..players)
                    .map(|i| actions[i][(k / strides[i]) % actions[i].len()])
                    .collect();
                (0..players)
                    .map(|i| min_payoff(base, i, &masks))
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(Self {
            base: base.clone(),
            actions,
            payoffs,
            strides,
        })
    }

    pub fn base(&self) -> &StrategicGame {
        &self.base
    }

    pub fn actions(&self, i: usize) -> &[ActionMask] {
        &self.actions[i]
    }

    /// `ũ_i` at a profile of extended actions given as masks.
    pub fn payoff(&self, i: usize, profile: &[ActionMask]) -> &Rational {
        let index: usize = profile
            .iter()
            .zip(&self.strides)
            .map(|(&m, s)| (m as usize - 1) * s)
            .sum();
        &self.payoffs[index][i]
    }

    pub fn format_mask(&self, i: usize, mask: ActionMask) -> String {
        let members: Vec<usize> = mask_members(mask).collect();
        self.base.format_actions(i, &members)
    }

    /// Strict dominance of `candidate` in player `i`'s restriction: some
    /// member `a` of the candidate has a mixture over the restriction's
    /// singletons that beats `{a}` against every opponent extended profile.
    pub fn is_strictly_dominated(
        &self,
        i: usize,
        candidate: ActionMask,
        restriction: &ExtendedRestriction,
    ) -> Result<Option<DominanceCertificate>, ExtendedError> {
        if !restriction.sets[i].contains(&candidate) {
            return Err(ExtendedError::NotInRestriction(candidate));
        }
        let opponents = restriction.opponent_profiles(i);
        if opponents.is_empty() {
            return Err(ExtendedError::EmptyOpponentRestriction);
        }
        for a in mask_members(candidate) {
            if let Some(cert) = self.singleton_dominance(i, a, restriction, &opponents)? {
                return Ok(Some(cert));
            }
        }
        Ok(None)
    }

    /// Maximizes the uniform slack `t` of a mixture over the singletons of
    /// `restriction_i` against `{a}`; dominated iff the optimum is positive.
    fn singleton_dominance(
        &self,
        i: usize,
        a: usize,
        restriction: &ExtendedRestriction,
        opponents: &[Vec<ActionMask>],
    ) -> Result<Option<DominanceCertificate>, ExtendedError> {
        let support: Vec<usize> = restriction.sets[i]
            .iter()
            .filter(|m| m.count_ones() == 1)
            .map(|m| m.trailing_zeros() as usize)
            .collect();
        if support.is_empty() {
            return Ok(None);
        }
        let k = support.len();
        let mut names: Vec<String> = support
            .iter()
            .map(|&s| format!("alpha_{}", self.base.action_label(i, s)))
            .collect();
        names.push("t".into());
        let mut program = LinearProgram::new(names);
        let mut objective = vec![zero(); k + 1];
        objective[k] = one();
        program.objective = Objective::Maximize(objective);
        for s in 0..k {
            program.set_bounds(s, Some(zero()), None);
        }
        let profile_with = |own: ActionMask, opp: &[ActionMask]| {
            let mut p = opp.to_vec();
            p.insert(i, own);
            p
        };
        for opp in opponents {
            let mut coeffs: Vec<Rational> = support
                .iter()
                .map(|&s| self.payoff(i, &profile_with(1 << s, opp)).clone())
                .collect();
            coeffs.push(int(-1));
            let rhs = self.payoff(i, &profile_with(1 << a, opp)).clone();
            program.add(coeffs, Relation::Ge, rhs);
        }
        let mut simplex = vec![one(); k];
        simplex.push(zero());
        program.add(simplex, Relation::Eq, one());

        let result = lp::solve(&program)?;
        lp::verify(&program, &result)?;
        let solution = result.solution.expect("dominance program is feasible and bounded");
        let slack = result.objective.expect("optimal");
        if !slack.is_positive() {
            return Ok(None);
        }
        let mixture = support
            .iter()
            .zip(&solution)
            .filter(|(_, w)| !num_traits::Zero::is_zero(*w))
            .map(|(&s, w)| (s, w.clone()))
            .collect();
        Ok(Some(DominanceCertificate {
            player: i,
            action: a,
            mixture,
            slack,
        }))
    }

    /// One simultaneous elimination round `U(𝒴)` under the default
    /// convention: only members of `𝒴_i` can survive.
    pub fn eliminate_step(
        &self,
        restriction: &ExtendedRestriction,
    ) -> Result<StepOutcome, ExtendedError> {
        self.eliminate_step_with(restriction, Convention::WithinRestriction)
    }

    pub fn eliminate_step_with(
        &self,
        restriction: &ExtendedRestriction,
        convention: Convention,
    ) -> Result<StepOutcome, ExtendedError> {
        let players = self.base.num_players();
        let per_player: Vec<Result<(Vec<ActionMask>, Vec<Elimination>), ExtendedError>> = (0
            ..players)
            .into_par_iter()
            .map(|i| self.eliminate_player(i, restriction, convention))
            .collect();
        let mut sets = Vec::with_capacity(players);
        let mut eliminated = Vec::new();
        for outcome in per_player {
            let (kept, gone) = outcome?;
            sets.push(kept);
            eliminated.extend(gone);
        }
        Ok(StepOutcome {
            restriction: ExtendedRestriction { sets },
            eliminated,
        })
    }

    fn eliminate_player(
        &self,
        i: usize,
        restriction: &ExtendedRestriction,
        convention: Convention,
    ) -> Result<(Vec<ActionMask>, Vec<Elimination>), ExtendedError> {
        let opponents = restriction.opponent_profiles(i);
        // An empty opponent restriction dominates nothing.
        let mut verdicts: Vec<Option<Option<DominanceCertificate>>> =
            vec![None; self.base.action_count(i)];
        let mut kept = Vec::new();
        let mut eliminated = Vec::new();
        let pool: &[ActionMask] = match convention {
            Convention::WithinRestriction => &restriction.sets[i],
            Convention::Literal => &self.actions[i],
        };
        for &candidate in pool {
            if !restriction.sets[i].contains(&candidate) || opponents.is_empty() {
                // Literal reading: candidates outside 𝒴_i are never dominated.
                kept.push(candidate);
                continue;
            }
            let mut found = None;
            for a in mask_members(candidate) {
                if verdicts[a].is_none() {
                    verdicts[a] = Some(self.singleton_dominance(i, a, restriction, &opponents)?);
                }
                if let Some(Some(cert)) = &verdicts[a] {
                    found = Some(cert.clone());
                    break;
                }
            }
            match found {
                Some(certificate) => eliminated.push(Elimination {
                    player: i,
                    candidate,
                    certificate,
                }),
                None => kept.push(candidate),
            }
        }
        Ok((kept, eliminated))
    }

    /// Iterates [`ExtendedGame::eliminate_step`] from `𝒜` to its fixed point.
    pub fn iesda(&self) -> Result<EliminationTrace, ExtendedError> {
        let mut levels = vec![ExtendedRestriction::full(self)];
        let mut eliminations = vec![Vec::new()];
        loop {
            let step = self.eliminate_step(levels.last().unwrap())?;
            let current = levels.last().unwrap();
            let fixed = step.restriction == *current;
            debug_assert!(step.restriction.is_subset_of(current));
            levels.push(step.restriction);
            eliminations.push(step.eliminated);
            if fixed {
                break;
            }
        }
        let fixed_point_index = levels.len() - 2;
        Ok(EliminationTrace {
            levels,
            eliminations,
            fixed_point_index,
        })
    }

    /// Runs the literal reading (candidates range over all of `𝒜_i`) next
    /// to the default one and lists every level and player where the two
    /// surviving families differ. Iteration stops at the first repeated
    /// state or after `max_levels`.
    pub fn convention_disagreements(
        &self,
        max_levels: usize,
    ) -> Result<Vec<ConventionDisagreement>, ExtendedError> {
        let default = self.iesda()?;
        let mut literal = vec![ExtendedRestriction::full(self)];
        while literal.len() <= max_levels {
            let next = self
                .eliminate_step_with(literal.last().unwrap(), Convention::Literal)?
                .restriction;
            let repeated = literal.contains(&next);
            literal.push(next);
            if repeated {
                break;
            }
        }
        let mut out = Vec::new();
        for (k, lit) in literal.iter().enumerate() {
            let def = default.level(k);
            for i in 0..self.base.num_players() {
                if lit.sets[i] != def.sets[i] {
                    out.push(ConventionDisagreement {
                        level: k,
                        player: i,
                        default: def.sets[i].clone(),
                        literal: lit.sets[i].clone(),
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn trace_text(&self, trace: &EliminationTrace) -> String {
        let mut out = String::new();
        for (k, level) in trace.levels.iter().enumerate() {
            let _ = writeln!(out, "level {k}");
            for i in 0..self.base.num_players() {
                let sets: Vec<String> = level.sets[i]
                    .iter()
                    .map(|&m| self.format_mask(i, m))
                    .collect();
                let _ = writeln!(
                    out,
                    "  survivors {}: {}",
                    self.base.player_name(i),
                    sets.join(" ")
                );
            }
            for e in &trace.eliminations[k] {
                let _ = writeln!(out, "  eliminated {}", e.describe(self));
            }
        }
        let _ = writeln!(out, "fixed point at level {}", trace.fixed_point_index);
        out
    }
}

fn min_payoff(base: &StrategicGame, i: usize, masks: &[ActionMask]) -> Rational {
    let mut profile = vec![0; masks.len()];
    let mut best: Option<Rational> = None;
    fn walk(
        base: &StrategicGame,
        i: usize,
        masks: &[ActionMask],
        depth: usize,
        profile: &mut Vec<usize>,
        best: &mut Option<Rational>,
    ) {
        if depth == masks.len() {
            let v = base.payoff(i, profile);
            if best.as_ref().map_or(true, |b| v < b) {
                *best = Some(v.clone());
            }
            return;
        }
        for a in mask_members(masks[depth]) {
            profile[depth] = a;
            walk(base, i, masks, depth + 1, profile, best);
        }
    }
    walk(base, i, masks, 0, &mut profile, &mut best);
    best.expect("extended actions are nonempty")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `U_i(𝒴)` keeps the undominated members of `𝒴_i`.
    WithinRestriction,
    /// `U_i(𝒴)` ranges over all of `𝒜_i`; sets outside `𝒴_i` survive.
    Literal,
}

/// Per-player families of extended actions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtendedRestriction {
    pub sets: Vec<Vec<ActionMask>>,
}

impl ExtendedRestriction {
    pub fn full(ext: &ExtendedGame) -> Self {
        Self {
            sets: ext.actions.clone(),
        }
    }

    /// `2^{Y_j} ∖ {∅}` for every player, listed in mask order.
    pub fn from_base(sets: &ProductSet) -> Self {
        Self {
            sets: sets
                .sets()
                .iter()
                .map(|ys| {
                    let full = mask_of(ys);
                    (1..=full).filter(|m| m & !full == 0).collect()
                })
                .collect(),
        }
    }

    /// Product of the opponents' families, in lexicographic order.
    pub fn opponent_profiles(&self, i: usize) -> Vec<Vec<ActionMask>> {
        let mut out: Vec<Vec<ActionMask>> = vec![Vec::new()];
        for (j, family) in self.sets.iter().enumerate() {
            if j == i {
                continue;
            }
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    family.iter().map(move |&m| {
                        let mut p = prefix.clone();
                        p.push(m);
                        p
                    })
                })
                .collect();
        }
        out
    }

    pub fn is_subset_of(&self, other: &ExtendedRestriction) -> bool {
        self.sets
            .iter()
            .zip(&other.sets)
            .all(|(a, b)| a.iter().all(|m| b.contains(m)))
    }

    /// Union of members of the surviving sets, per player.
    pub fn project(&self) -> ProductSet {
        ProductSet::new(
            self.sets
                .iter()
                .map(|family| {
                    let union = family.iter().fold(0, |acc, m| acc | m);
                    mask_members(union).collect()
                })
                .collect(),
        )
    }

    /// Actions whose singleton survives, per player.
    pub fn singletons(&self) -> ProductSet {
        ProductSet::new(
            self.sets
                .iter()
                .map(|family| {
                    family
                        .iter()
                        .filter(|m| m.count_ones() == 1)
                        .map(|m| m.trailing_zeros() as usize)
                        .collect()
                })
                .collect(),
        )
    }
}

/// `ũ_i(α, ·) - ũ_i({action}, ·) >= slack > 0` on the whole opponent
/// restriction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominanceCertificate {
    pub player: usize,
    pub action: usize,
    /// Support of the dominating mixture with its weights.
    pub mixture: Vec<(usize, Rational)>,
    pub slack: Rational,
}

impl DominanceCertificate {
    pub fn describe(&self, game: &StrategicGame) -> String {
        let mix: Vec<String> = self
            .mixture
            .iter()
            .map(|(s, w)| format!("{} {{{}}}", w, game.action_label(self.player, *s)))
            .collect();
        format!(
            "{{{}}} dominated by {} with slack {}",
            game.action_label(self.player, self.action),
            mix.join(" + "),
            self.slack
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub player: usize,
    pub candidate: ActionMask,
    pub certificate: DominanceCertificate,
}

impl Elimination {
    fn describe(&self, ext: &ExtendedGame) -> String {
        format!(
            "{} {}: {}",
            ext.base.player_name(self.player),
            ext.format_mask(self.player, self.candidate),
            self.certificate.describe(&ext.base)
        )
    }
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub restriction: ExtendedRestriction,
    pub eliminated: Vec<Elimination>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConventionDisagreement {
    pub level: usize,
    pub player: usize,
    pub default: Vec<ActionMask>,
    pub literal: Vec<ActionMask>,
}

/// Levels `U^0 = 𝒜, U^1, …` up to and including the first repeated level.
#[derive(Clone, Debug)]
pub struct EliminationTrace {
    pub levels: Vec<ExtendedRestriction>,
    /// `eliminations[k]` lists what was removed to obtain level `k`.
    pub eliminations: Vec<Vec<Elimination>>,
    /// Smallest `k` with `U^k = U^∞`.
    pub fixed_point_index: usize,
}

/// Requested level for projections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    At(usize),
    Limit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub actions: ProductSet,
    /// Players where `a ∈ A^k_i` and `{a} ∈ U^k_i` disagree; empty when the
    /// singleton equivalence holds.
    pub singleton_mismatches: Vec<usize>,
}

impl EliminationTrace {
    /// `U^k`, saturating at the fixed point.
    pub fn level(&self, k: usize) -> &ExtendedRestriction {
        &self.levels[k.min(self.fixed_point_index)]
    }

    pub fn limit(&self) -> &ExtendedRestriction {
        &self.levels[self.fixed_point_index]
    }

    /// `U^{k+1}_i ⊆ U^k_i` at every recorded level.
    pub fn is_monotone(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].is_subset_of(&w[0]))
    }

    /// `A^k_i`: actions belonging to some surviving extended action.
    pub fn project_to_actions(&self, level: Level) -> Result<Projection, ExtendedError> {
        let restriction = match level {
            Level::Limit => self.limit(),
            Level::At(k) if k < self.levels.len() => &self.levels[k],
            Level::At(k) => return Err(ExtendedError::LevelOutOfRange(k)),
        };
        let actions = restriction.project();
        let singles = restriction.singletons();
        let singleton_mismatches = (0..actions.len())
            .filter(|&i| actions.player(i) != singles.player(i))
            .collect();
        Ok(Projection {
            actions,
            singleton_mismatches,
        })
    }
}
