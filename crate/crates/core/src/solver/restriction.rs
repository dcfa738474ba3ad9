use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Shape constraint on a player's capacities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Unrestricted,
    Convex,
    Concave,
    Additive,
}

impl Shape {
    fn tag(self) -> &'static str {
        match self {
            Shape::Unrestricted => "any",
            Shape::Convex => "conv",
            Shape::Concave => "conc",
            Shape::Additive => "add",
        }
    }
}

/// One player's attitude restriction: a shape plus the optional
/// non-additivity requirement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PlayerRestriction {
    pub shape: Shape,
    pub non_additive: bool,
}

impl PlayerRestriction {
    pub const UNRESTRICTED: Self = Self {
        shape: Shape::Unrestricted,
        non_additive: false,
    };

    pub fn new(shape: Shape, non_additive: bool) -> Result<Self, RestrictionError> {
        if shape == Shape::Additive && non_additive {
            return Err(RestrictionError::AdditiveNonAdditive);
        }
        Ok(Self {
            shape,
            non_additive,
        })
    }

    pub fn shape(shape: Shape) -> Self {
        Self {
            shape,
            non_additive: false,
        }
    }

    pub fn is_unrestricted(self) -> bool {
        self == Self::UNRESTRICTED
    }
}

impl fmt::Display for PlayerRestriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.shape, self.non_additive) {
            (Shape::Unrestricted, true) => f.write_str("na"),
            (shape, true) => write!(f, "{}+na", shape.tag()),
            (shape, false) => f.write_str(shape.tag()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RestrictionError {
    #[error("unknown attitude `{0}`; expected any, conv, conc, add, na or shape+na")]
    Unknown(String),
    #[error("an additive capacity cannot be non-additive")]
    AdditiveNonAdditive,
    #[error("restriction lists {given} players but the game has {players}")]
    PlayerCount { given: usize, players: usize },
}

impl FromStr for PlayerRestriction {
    type Err = RestrictionError;

    /// Accepts `any`, `conv`, `conc`, `add`, `na`, and `shape+na`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        let (base, na) = match text.strip_suffix("+na") {
            Some(base) => (base, true),
            None if text == "na" => ("any", true),
            None => (text, false),
        };
        let shape = match base {
            "any" | "unrestricted" => Shape::Unrestricted,
            "conv" => Shape::Convex,
            "conc" => Shape::Concave,
            "add" => Shape::Additive,
            _ => return Err(RestrictionError::Unknown(text.to_string())),
        };
        Self::new(shape, na)
    }
}

/// Attitude restrictions `r = (r_i)` for all players.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AttitudeRestriction {
    players: Vec<PlayerRestriction>,
}

impl AttitudeRestriction {
    pub fn uniform(players: usize, r: PlayerRestriction) -> Self {
        Self {
            players: vec![r; players],
        }
    }

    pub fn unrestricted(players: usize) -> Self {
        Self::uniform(players, PlayerRestriction::UNRESTRICTED)
    }

    pub fn per_player(players: Vec<PlayerRestriction>) -> Self {
        Self { players }
    }

    /// Parses either one restriction applied to everybody or a
    /// comma-separated list with one entry per player.
    pub fn parse(text: &str, players: usize) -> Result<Self, RestrictionError> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() == 1 {
            return Ok(Self::uniform(players, parts[0].parse()?));
        }
        if parts.len() != players {
            return Err(RestrictionError::PlayerCount {
                given: parts.len(),
                players,
            });
        }
        Ok(Self {
            players: parts
                .iter()
                .map(|p| p.parse())
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn player(&self, i: usize) -> PlayerRestriction {
        self.players[i]
    }

    pub fn len(&self) -> usize {
        self.players.len()
    }

    pub fn is_empty(&self) -> bool {
        self.players.is_empty()
    }

    pub fn is_unrestricted(&self) -> bool {
        self.players.iter().all(|r| r.is_unrestricted())
    }
}

impl fmt::Display for AttitudeRestriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let first = self.players.first().copied();
        if self.players.iter().all(|r| Some(*r) == first) {
            if let Some(r) = first {
                return write!(f, "{r}");
            }
        }
        let parts: Vec<String> = self.players.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tags() {
        assert_eq!(
            "conv+na".parse::<PlayerRestriction>().unwrap(),
            PlayerRestriction::new(Shape::Convex, true).unwrap()
        );
        assert_eq!(
            "na".parse::<PlayerRestriction>().unwrap(),
            PlayerRestriction::new(Shape::Unrestricted, true).unwrap()
        );
        assert_eq!(
            "add+na".parse::<PlayerRestriction>(),
            Err(RestrictionError::AdditiveNonAdditive)
        );
        assert!("convex".parse::<PlayerRestriction>().is_err());
    }

    #[test]
    fn per_player_lists() {
        let r = AttitudeRestriction::parse("conv,conc+na", 2).unwrap();
        assert_eq!(r.player(0).shape, Shape::Convex);
        assert!(r.player(1).non_additive);
        assert_eq!(r.to_string(), "conv,conc+na");
        assert_eq!(
            AttitudeRestriction::parse("conv,conc,add", 2),
            Err(RestrictionError::PlayerCount {
                given: 3,
                players: 2
            })
        );
        assert_eq!(AttitudeRestriction::parse("add", 3).unwrap().to_string(), "add");
    }
}
