use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by game construction and the solvers.
///
/// Player indices count team players first; in a single-adversary game the
/// adversary is player `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A strategy vector has the wrong length for its player.
    DimensionMismatch {
        player: usize,
        expected: usize,
        found: usize,
    },
    /// The profile lists a different number of players than the game.
    PlayerCount { expected: usize, found: usize },
    /// A strategy vector is negative somewhere or does not sum to one.
    NotADistribution { player: usize, sum: f64 },
    PlayerOutOfRange { player: usize, players: usize },
    InvalidGame(String),
    InvalidConfig(String),
    /// A construction would exceed a configured size limit.
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
    /// An LP that is feasible by construction came back infeasible or unbounded.
    SolverFault(String),
    /// A duality identity that must hold on every extension call was violated.
    DualityViolation(String),
    /// Two tables passed to the potential-game embedding violate a difference identity.
    PotentialIdentity {
        player: usize,
        from: alloc::vec::Vec<usize>,
        to: alloc::vec::Vec<usize>,
        lhs: f64,
        rhs: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                player,
                expected,
                found,
            } => write!(
                f,
                "player {player}: strategy has {found} entries, game has {expected} actions"
            ),
            Error::PlayerCount { expected, found } => {
                write!(f, "profile has {found} players, game has {expected}")
            }
            Error::NotADistribution { player, sum } => write!(
                f,
                "player {player}: strategy is not a probability vector (sum {sum})"
            ),
            Error::PlayerOutOfRange { player, players } => {
                write!(f, "player {player} out of range (game has {players} players)")
            }
            Error::InvalidGame(msg) => write!(f, "invalid game: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Capacity {
                what,
                requested,
                limit,
            } => write!(f, "{what}: {requested} exceeds the limit of {limit}"),
            Error::SolverFault(msg) => write!(f, "internal solver fault: {msg}"),
            Error::DualityViolation(msg) => write!(f, "duality check failed: {msg}"),
            Error::PotentialIdentity {
                player,
                from,
                to,
                lhs,
                rhs,
            } => write!(
                f,
                "player {player}: deviation {from:?} -> {to:?} changes its payoff by {lhs} but the potential by {rhs}"
            ),
        }
    }
}

impl core::error::Error for Error {}
