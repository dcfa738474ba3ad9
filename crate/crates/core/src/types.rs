//! Finite capacity type spaces and common belief in Choquet rationality.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::capacity::{valid_label, Capacity, CapacityError, EventSet, Mask, StateSpace, MAX_STATES};
use crate::game::{GameError, ProductSet, StrategicGame};
use crate::solver::SolveReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeSpaceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("duplicate type `{0}`")]
    DuplicateType(String),
    #[error("invalid type label `{0}`")]
    InvalidLabel(String),
    #[error("player `{0}` has no types")]
    NoTypes(String),
    #[error("type `{0}` has no strategy")]
    MissingStrategy(String),
    #[error("type `{0}` has no capacity")]
    MissingCapacity(String),
    #[error("player {player} faces {profiles} opponent type profiles; the limit is {limit}")]
    TooManyProfiles {
        player: usize,
        profiles: usize,
        limit: usize,
    },
    #[error("the witness space needs an untruncated report with nonempty limit sets")]
    UnusableReport,
    #[error("capacity of type `{0}`: {1}")]
    TypeCapacity(String, CapacityError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// `⟨(T_i), (s_i), (τ_i)⟩` over a fixed game.
#[derive(Clone, Debug)]
pub struct CapacityTypeSpace {
    game: StrategicGame,
    types: Vec<Vec<String>>,
    strategy: Vec<Vec<usize>>,
    beliefs: Vec<Vec<Capacity>>,
    /// State space `T_{-i}` per player.
    spaces: Vec<StateSpace>,
}

/// Canonical product of the other players' lists, labels joined with `.`.
fn opponent_profiles(lists: &[Vec<String>], i: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for (j, list) in lists.iter().enumerate() {
        if j == i {
            continue;
        }
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..list.len()).map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t);
                    p
                })
            })
            .collect();
    }
    out
}

fn type_profile_space(types: &[Vec<String>], i: usize) -> Result<StateSpace, TypeSpaceError> {
    let profiles = opponent_profiles(types, i);
    if profiles.len() > MAX_STATES {
        return Err(TypeSpaceError::TooManyProfiles {
            player: i,
            profiles: profiles.len(),
            limit: MAX_STATES,
        });
    }
    let labels: Vec<String> = profiles
        .iter()
        .map(|p| {
            (0..types.len())
                .filter(|&j| j != i)
                .zip(p)
                .map(|(j, &t)| types[j][t].as_str())
                .collect::<Vec<_>>()
                .join(".")
        })
        .collect();
    Ok(StateSpace::new(labels)?)
}

impl CapacityTypeSpace {
    /// Validates labels, strategies, and that each `τ_i(t)` lives on `T_{-i}`.
    pub fn new(
        game: &StrategicGame,
        types: Vec<Vec<String>>,
        strategy: Vec<Vec<usize>>,
        beliefs: Vec<Vec<Capacity>>,
    ) -> Result<Self, TypeSpaceError> {
        let players = game.num_players();
        if types.len() != players || strategy.len() != players || beliefs.len() != players {
            return Err(TypeSpaceError::UnknownPlayer(format!(
                "expected {players} players"
            )));
        }
        let mut seen = HashSet::new();
        for (i, list) in types.iter().enumerate() {
            if list.is_empty() {
                return Err(TypeSpaceError::NoTypes(game.player_name(i).to_string()));
            }
            for t in list {
                if !valid_label(t) || t.contains('.') {
                    return Err(TypeSpaceError::InvalidLabel(t.clone()));
                }
                if !seen.insert(t.clone()) {
                    return Err(TypeSpaceError::DuplicateType(t.clone()));
                }
            }
        }
        let spaces = (0..players)
            .map(|i| type_profile_space(&types, i))
            .collect::<Result<Vec<_>, _>>()?;
        for i in 0..players {
            for (k, t) in types[i].iter().enumerate() {
                let a = *strategy[i]
                    .get(k)
                    .ok_or_else(|| TypeSpaceError::MissingStrategy(t.clone()))?;
                game.check_action(i, a)?;
                let cap = beliefs[i]
                    .get(k)
                    .ok_or_else(|| TypeSpaceError::MissingCapacity(t.clone()))?;
                if !cap.space().same_as(&spaces[i]) {
                    return Err(TypeSpaceError::TypeCapacity(
                        t.clone(),
                        CapacityError::SpaceMismatch,
                    ));
                }
            }
        }
        Ok(Self {
            game: game.clone(),
            types,
            strategy,
            beliefs,
            spaces,
        })
    }

    pub fn game(&self) -> &StrategicGame {
        &self.game
    }

    pub fn types(&self, i: usize) -> &[String] {
        &self.types[i]
    }

    pub fn type_count(&self, i: usize) -> usize {
        self.types[i].len()
    }

    pub fn type_index(&self, i: usize, label: &str) -> Result<usize, TypeSpaceError> {
        self.types[i]
            .iter()
            .position(|t| t == label)
            .ok_or_else(|| TypeSpaceError::UnknownType(label.to_string()))
    }

    /// `s_i(t)`.
    pub fn strategy(&self, i: usize, t: usize) -> usize {
        self.strategy[i][t]
    }

    /// `τ_i(t)` over `T_{-i}`.
    pub fn belief(&self, i: usize, t: usize) -> &Capacity {
        &self.beliefs[i][t]
    }

    pub fn opponent_type_space(&self, i: usize) -> &StateSpace {
        &self.spaces[i]
    }

    fn check_type(&self, i: usize, t: usize) -> Result<(), TypeSpaceError> {
        if i < self.types.len() && t < self.types[i].len() {
            Ok(())
        } else {
            Err(TypeSpaceError::UnknownType(format!("{i}:{t}")))
        }
    }

    /// Mask over `T_{-i}` of the profiles drawn from the per-player sets.
    pub fn opponent_event(&self, i: usize, sets: &[Vec<usize>]) -> Mask {
        opponent_profiles(&self.types, i)
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                (0..self.types.len())
                    .filter(|&j| j != i)
                    .zip(p.iter())
                    .all(|(j, t)| sets[j].contains(t))
            })
            .fold(0, |m, (k, _)| m | (1 << k))
    }

    /// Whether type `t` of player `i` believes the event `event ⊆ T_{-i}`.
    pub fn type_believes(&self, i: usize, t: usize, event: Mask) -> Result<bool, TypeSpaceError> {
        self.check_type(i, t)?;
        let space = &self.spaces[i];
        Ok(self.beliefs[i][t].is_believed(&EventSet::new(space, event & space.full_mask()))?)
    }

    /// For each opponent type profile, the index of its action profile in
    /// `A_{-i}`.
    fn action_images(&self, i: usize) -> Vec<usize> {
        let game = &self.game;
        opponent_profiles(&self.types, i)
            .iter()
            .map(|p| {
                let actions: Vec<usize> = (0..self.types.len())
                    .filter(|&j| j != i)
                    .zip(p)
                    .map(|(j, &t)| self.strategy[j][t])
                    .collect();
                game.opponent_profiles(i)
                    .iter()
                    .position(|q| *q == actions)
                    .expect("strategies map into action sets")
            })
            .collect()
    }

    /// The pushforward `τ_i(t)|A_{-i}(E) = τ_i(t)(s_{-i}^{-1}(E))`.
    pub fn conjecture(&self, i: usize, t: usize) -> Result<Capacity, TypeSpaceError> {
        self.check_type(i, t)?;
        let images = self.action_images(i);
        let space = self.game.opponent_space(i)?;
        let tau = &self.beliefs[i][t];
        let values = (0..space.subset_count() as Mask)
            .map(|e| {
                let preimage = images
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| e & (1 << a) != 0)
                    .fold(0, |m, (k, _)| m | (1 << k));
                tau.value(preimage).clone()
            })
            .collect();
        Ok(Capacity::new(&space, values)?)
    }

    /// `B^kCR` for `k = 0, 1, …` until two consecutive levels agree.
    pub fn bkcr_fixpoint(&self) -> Result<EpistemicReport, TypeSpaceError> {
        let players = self.types.len();
        let all: Vec<Vec<usize>> = self.types.iter().map(|l| (0..l.len()).collect()).collect();
        let mut first = Vec::with_capacity(players);
        for i in 0..players {
            let mut rational = Vec::new();
            for t in 0..self.types[i].len() {
                let conjecture = self.conjecture(i, t)?;
                let best = self.game.choquet_best_responses(i, &conjecture)?;
                if best.contains(&self.strategy[i][t]) {
                    rational.push(t);
                }
            }
            first.push(rational);
        }
        let mut levels = vec![all, first];
        loop {
            let current = levels.last().unwrap();
            let mut next = Vec::with_capacity(players);
            for i in 0..players {
                let event = self.opponent_event(i, current);
                let mut kept = Vec::new();
                for &t in &current[i] {
                    if self.type_believes(i, t, event)? {
                        kept.push(t);
                    }
                }
                next.push(kept);
            }
            if next == *current {
                break;
            }
            levels.push(next);
        }
        let projections = levels.iter().map(|l| self.project(l)).collect();
        Ok(EpistemicReport {
            levels,
            projections,
        })
    }

    /// `s_i` applied to per-player type sets.
    pub fn project(&self, sets: &[Vec<usize>]) -> ProductSet {
        ProductSet::new(
            sets.iter()
                .enumerate()
                .map(|(i, ts)| ts.iter().map(|&t| self.strategy[i][t]).collect())
                .collect(),
        )
    }

    /// Text form: `types` lines, `t -> action` lines, then one capacity block
    /// per type over its opponent type profiles.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, list) in self.types.iter().enumerate() {
            let _ = writeln!(out, "types {} {}", self.game.player_name(i), list.join(" "));
        }
        for (i, list) in self.types.iter().enumerate() {
            for (k, t) in list.iter().enumerate() {
                let _ = writeln!(out, "{t} -> {}", self.game.action_label(i, self.strategy[i][k]));
            }
        }
        for (i, list) in self.types.iter().enumerate() {
            for (k, t) in list.iter().enumerate() {
                let _ = writeln!(out, "capacity {t}");
                out.push_str(&self.beliefs[i][k].to_text());
                out.push_str("end\n");
            }
        }
        out
    }
}

/// `B^kCR_i` per level with their action projections.
#[derive(Clone, Debug)]
pub struct EpistemicReport {
    /// `levels[k][i]` is `B^kCR_i`; level 0 holds every type.
    pub levels: Vec<Vec<Vec<usize>>>,
    /// `projections[k]` is `s(B^kCR)`.
    pub projections: Vec<ProductSet>,
}

impl EpistemicReport {
    pub fn cbcr(&self) -> &[Vec<usize>] {
        self.levels.last().unwrap()
    }

    pub fn cbcr_projection(&self) -> &ProductSet {
        self.projections.last().unwrap()
    }

    /// `B^kCR`, saturating at the last level.
    pub fn level(&self, k: usize) -> &[Vec<usize>] {
        &self.levels[k.min(self.levels.len() - 1)]
    }

    pub fn projection(&self, k: usize) -> &ProductSet {
        &self.projections[k.min(self.projections.len() - 1)]
    }

    pub fn is_monotone(&self) -> bool {
        self.levels.windows(2).all(|w| {
            w[1].iter()
                .zip(&w[0])
                .all(|(next, cur)| next.iter().all(|t| cur.contains(t)))
        })
    }

    /// Levels `k >= 1` (up to both fixed points) where `s(B^kCR) ⊄ R^k`.
    pub fn soundness_violations(&self, report: &SolveReport) -> Vec<usize> {
        let last = (self.levels.len() - 1).max(report.fixed_point_index + 1);
        (1..=last)
            .filter(|&k| !self.projection(k).is_subset_of(report.level(k)))
            .collect()
    }

    pub fn to_text(&self, space: &CapacityTypeSpace) -> String {
        let game = space.game();
        let mut out = String::new();
        for (k, level) in self.levels.iter().enumerate().skip(1) {
            let _ = writeln!(out, "level {k}");
            for (i, types) in level.iter().enumerate() {
                let labels: Vec<&str> = types.iter().map(|&t| space.types(i)[t].as_str()).collect();
                let _ = writeln!(
                    out,
                    "  B{k}CR {}: {{{}}} -> {}",
                    game.player_name(i),
                    labels.join(","),
                    game.format_actions(i, self.projections[k].player(i))
                );
            }
        }
        let _ = writeln!(out, "CBCR at level {}", self.levels.len() - 1);
        out
    }
}

/// Types are the limit survivors, each playing itself and holding its
/// limit witness transported to the opponents' survivor types.
pub fn build_witness_space(
    game: &StrategicGame,
    report: &SolveReport,
) -> Result<CapacityTypeSpace, TypeSpaceError> {
    let limit = report.limit();
    if report.truncated || limit.any_empty() {
        return Err(TypeSpaceError::UnusableReport);
    }
    let players = game.num_players();
    let types: Vec<Vec<String>> = (0..players)
        .map(|i| {
            limit
                .player(i)
                .iter()
                .map(|&a| format!("{}_{}", game.player_name(i), game.action_label(i, a)))
                .collect()
        })
        .collect();
    let strategy: Vec<Vec<usize>> = (0..players).map(|i| limit.player(i).to_vec()).collect();
    let mut beliefs = Vec::with_capacity(players);
    for i in 0..players {
        let space = type_profile_space(&types, i)?;
        // Type profile k corresponds to this action profile of A_{-i}.
        let images: Vec<usize> = opponent_profiles(&types, i)
            .iter()
            .map(|p| {
                let actions: Vec<usize> = (0..players)
                    .filter(|&j| j != i)
                    .zip(p)
                    .map(|(j, &t)| strategy[j][t])
                    .collect();
                game.opponent_profiles(i)
                    .iter()
                    .position(|q| *q == actions)
                    .expect("limit actions are actions")
            })
            .collect();
        let mut per_type = Vec::new();
        for &a in limit.player(i) {
            let nu = report
                .limit_witness(i, a)
                .ok_or(TypeSpaceError::UnusableReport)?;
            let values = (0..space.subset_count() as Mask)
                .map(|s| {
                    let image = images
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| s & (1 << k) != 0)
                        .fold(0, |m, (_, &x)| m | (1 << x));
                    nu.value(image).clone()
                })
                .collect();
            per_type.push(Capacity::new(&space, values)?);
        }
        beliefs.push(per_type);
    }
    let space = CapacityTypeSpace::new(game, types, strategy, beliefs)?;
    // Belief in the survivors makes the transported conjecture integrate
    // every act exactly as the original witness does.
    for i in 0..players {
        for (t, &a) in limit.player(i).iter().enumerate() {
            let nu = report.limit_witness(i, a).expect("checked above");
            let conjecture = space.conjecture(i, t)?;
            for b in 0..game.action_count(i) {
                let act = game.act_of(i, b)?;
                if conjecture.choquet_integral(&act)? != nu.choquet_integral(&act)? {
                    return Err(TypeSpaceError::TypeCapacity(
                        space.types(i)[t].clone(),
                        CapacityError::SpaceMismatch,
                    ));
                }
            }
        }
    }
    Ok(space)
}

/// Parses the text form produced by [`CapacityTypeSpace::to_text`].
/// Type labels are unique across players, so `t -> action` lines need no
/// player name.
pub fn parse_type_space(game: &StrategicGame, text: &str) -> Result<CapacityTypeSpace, TypeSpaceError> {
    let players = game.num_players();
    let mut types: Vec<Option<Vec<String>>> = vec![None; players];
    let mut strategy_lines: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut blocks: BTreeMap<String, Vec<(usize, String)>> = BTreeMap::new();
    let mut open: Option<(usize, String, Vec<(usize, String)>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| TypeSpaceError::Parse {
            line: line_no,
            message,
        };
        if line == "end" {
            let (_, label, lines) = open.take().ok_or_else(|| err("`end` outside a capacity block".into()))?;
            if blocks.insert(label.clone(), lines).is_some() {
                return Err(err(format!("second capacity for type `{label}`")));
            }
            continue;
        }
        if let Some((_, _, lines)) = open.as_mut() {
            lines.push((line_no, line.to_string()));
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("types") => {
                let name = words.next().ok_or_else(|| err("expected a player name".into()))?;
                let i = game
                    .player_index(name)
                    .ok_or_else(|| err(format!("unknown player `{name}`")))?;
                if types[i].is_some() {
                    return Err(err(format!("types of `{name}` listed twice")));
                }
                types[i] = Some(words.map(str::to_string).collect());
            }
            Some("capacity") => {
                let label = words.next().ok_or_else(|| err("expected a type label".into()))?;
                if words.next().is_some() {
                    return Err(err("trailing input after the type label".into()));
                }
                open = Some((line_no, label.to_string(), Vec::new()));
            }
            _ => {
                let (t, action) = line
                    .split_once("->")
                    .ok_or_else(|| err("expected `types`, `capacity`, or `t -> action`".into()))?;
                let (t, action) = (t.trim(), action.trim());
                if t.is_empty() || action.is_empty() || action.contains(char::is_whitespace) {
                    return Err(err("expected `t -> action`".into()));
                }
                if strategy_lines.insert(t.to_string(), (line_no, action.to_string())).is_some() {
                    return Err(err(format!("second strategy for type `{t}`")));
                }
            }
        }
    }
    if let Some((start, label, _)) = open {
        return Err(TypeSpaceError::Parse {
            line: start,
            message: format!("capacity block of `{label}` is not closed by `end`"),
        });
    }
    let types: Vec<Vec<String>> = types
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.ok_or_else(|| TypeSpaceError::NoTypes(game.player_name(i).to_string())))
        .collect::<Result<_, _>>()?;
    let owner = |label: &str| -> Result<(usize, usize), TypeSpaceError> {
        types
            .iter()
            .enumerate()
            .find_map(|(i, list)| list.iter().position(|t| t == label).map(|k| (i, k)))
            .ok_or_else(|| TypeSpaceError::UnknownType(label.to_string()))
    };
    let mut strategy: Vec<Vec<Option<usize>>> = types.iter().map(|l| vec![None; l.len()]).collect();
    for (label, (line, action)) in &strategy_lines {
        let (i, k) = owner(label)?;
        let a = game.action_index(i, action).map_err(|_| TypeSpaceError::Parse {
            line: *line,
            message: format!("unknown action `{action}` for type `{label}`"),
        })?;
        strategy[i][k] = Some(a);
    }
    let spaces = (0..players)
        .map(|i| type_profile_space(&types, i))
        .collect::<Result<Vec<_>, _>>()?;
    let mut beliefs: Vec<Vec<Option<Capacity>>> = types.iter().map(|l| vec![None; l.len()]).collect();
    for (label, lines) in &blocks {
        let (i, k) = owner(label)?;
        let cap = Capacity::parse_lines(&spaces[i], lines.iter().map(|(n, l)| (*n, l.as_str())))
            .map_err(|e| match e {
                CapacityError::Parse { line, message } => TypeSpaceError::Parse { line, message },
                other => TypeSpaceError::TypeCapacity(label.clone(), other),
            })?;
        beliefs[i][k] = Some(cap);
    }
    let strategy = fill(strategy, &types, TypeSpaceError::MissingStrategy)?;
    let beliefs = fill(beliefs, &types, TypeSpaceError::MissingCapacity)?;
    CapacityTypeSpace::new(game, types, strategy, beliefs)
}

fn fill<T>(
    table: Vec<Vec<Option<T>>>,
    types: &[Vec<String>],
    missing: fn(String) -> TypeSpaceError,
) -> Result<Vec<Vec<T>>, TypeSpaceError> {
    table
        .into_iter()
        .enumerate()
        .map(|(i, list)| {
            list.into_iter()
                .enumerate()
                .map(|(k, v)| v.ok_or_else(|| missing(types[i][k].clone())))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests;
