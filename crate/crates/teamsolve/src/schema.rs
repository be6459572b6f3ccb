//! JSON file formats: games, profiles and solver output.
//!
//! Games carry exact rationals `[numerator, denominator]`. Dense payoffs list
//! entries `[[a_1, ..., a_n, b], num, den]`; profiles not listed are zero. A
//! two-team game adds `"teams": {"minimizers": n, "maximizers": m}`, lists
//! the action counts of all `n + m` players in `actions` (minimizers first)
//! and omits `adversary_actions`.

use std::collections::HashSet;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use teamsolve_core::game::LocalTerm;
use teamsolve_core::two_team::{TwoTeamGame, TwoTeamProfile};
use teamsolve_core::{MixedProfile, Payoff, Representation, TeamGame};

use crate::error::CliError;
use crate::rational::Rational;

/// Profile-count limit for dense games read from files.
pub const DENSE_LIMIT: usize = 1 << 22;

pub const SOLUTION_FORMAT: &str = "teamsolve-solution";
pub const SOLUTION_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub teams: Option<Teams>,
    pub actions: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary_actions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_max: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub payoff: PayoffFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Teams {
    pub minimizers: usize,
    pub maximizers: usize,
}

/// Where a generated game came from; enough to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: u64,
    pub tool_version: String,
    pub spec: serde_json::Value,
}

/// `{"kind": "dense", "entries": [...]}` or `{"kind": "polytensor", "locals": [...]}`.
// a plain struct rather than a tagged enum so that schema errors inside
// entries keep their field path
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffFile {
    pub kind: PayoffKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locals: Option<Vec<LocalFile>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffKind {
    Dense,
    Polytensor,
}

/// `[[indices...], numerator, denominator]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry(pub Vec<usize>, pub i64, pub i64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalFile {
    pub players: Vec<usize>,
    pub entries: Vec<Entry>,
}

/// A validated game file.
#[derive(Debug, Clone)]
pub struct GameDoc {
    pub file: GameFile,
    pub payoff: Payoff,
    /// Minimizers.
    pub n: usize,
    /// Maximizers; `1` for single-adversary files.
    pub m: usize,
    pub v_max: Option<f64>,
}

impl GameDoc {
    /// Single-adversary view; refused for `m > 1`.
    pub fn team_game(&self, source: &str) -> Result<TeamGame, CliError> {
        if self.m != 1 {
            return Err(CliError::schema(
                source,
                "teams.maximizers",
                format!("this command needs a single adversary, the game has {} maximizers", self.m),
            ));
        }
        let game = TeamGame::new(self.payoff.clone())?;
        Ok(match self.v_max {
            Some(v) => game.with_v_max(v)?,
            None => game,
        })
    }

    pub fn two_team_game(&self) -> Result<TwoTeamGame, CliError> {
        let game = TwoTeamGame::new(self.payoff.clone(), self.n)?;
        Ok(match self.v_max {
            Some(v) => game.with_v_max(v)?,
            None => game,
        })
    }

    /// Reinterprets the players as `n` minimizers and `m` maximizers.
    pub fn with_team_sizes(mut self, n: usize, m: usize, source: &str) -> Result<Self, CliError> {
        let players = self.payoff.dims().len();
        if n == 0 || m == 0 || n + m != players {
            return Err(CliError::Usage(format!(
                "{source}: --team-sizes {n},{m} does not split the game's {players} players into two nonempty teams"
            )));
        }
        self.n = n;
        self.m = m;
        Ok(self)
    }
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        file: path.display().to_string(),
        source,
    })
}

/// Parses `text` as `T`, reporting syntax errors by byte offset and schema
/// errors by field path.
pub fn parse<T: DeserializeOwned>(text: &str, source: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        json_error(inner, text, source, path)
    })?;
    de.end().map_err(|e| json_error(e, text, source, String::new()))?;
    Ok(value)
}

fn json_error(e: serde_json::Error, text: &str, source: &str, path: String) -> CliError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => CliError::Schema {
            file: source.to_string(),
            path: if path == "." { String::new() } else { path },
            message: strip_position(&e.to_string()),
        },
        category => CliError::Parse {
            file: source.to_string(),
            offset: if category == Category::Eof {
                text.len()
            } else {
                byte_offset(text, e.line(), e.column())
            },
            message: strip_position(&e.to_string()),
        },
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn from_value<T: DeserializeOwned>(value: serde_json::Value, source: &str, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let path = match (prefix.is_empty(), path.as_str()) {
            (true, _) => path,
            (false, ".") => prefix.to_string(),
            (false, p) => format!("{prefix}.{p}"),
        };
        CliError::schema(source, path, e.into_inner().to_string())
    })
}

pub fn load_game(path: &Path) -> Result<GameDoc, CliError> {
    let source = path.display().to_string();
    let text = read_text(path)?;
    let file: GameFile = parse(&text, &source)?;
    build_game(file, &source)
}

fn rational(r: Rational, source: &str, path: String) -> Result<f64, CliError> {
    r.to_f64().ok_or_else(|| CliError::schema(source, path, "denominator must be nonzero"))
}

/// Fills a tensor over `dims` from sparse entries under `path`.
fn tensor(entries: &[Entry], dims: &[usize], source: &str, path: &str) -> Result<Vec<f64>, CliError> {
    let count = dims
        .iter()
        .try_fold(1usize, |a, &d| a.checked_mul(d))
        .filter(|&c| c <= DENSE_LIMIT)
        .ok_or_else(|| CliError::schema(source, path, format!("tensor exceeds {DENSE_LIMIT} entries")))?;
    let mut values = vec![0.0; count];
    let mut seen = HashSet::new();
    for (k, Entry(idx, num, den)) in entries.iter().enumerate() {
        if idx.len() != dims.len() {
            return Err(CliError::schema(
                source,
                format!("{path}[{k}][0]"),
                format!("expected {} indices, found {}", dims.len(), idx.len()),
            ));
        }
        let mut flat = 0;
        for (p, (&a, &d)) in idx.iter().zip(dims).enumerate() {
            if a >= d {
                return Err(CliError::schema(
                    source,
                    format!("{path}[{k}][0][{p}]"),
                    format!("action {a} out of range, player has {d}"),
                ));
            }
            flat = flat * d + a;
        }
        if !seen.insert(flat) {
            return Err(CliError::schema(source, format!("{path}[{k}]"), "duplicate entry"));
        }
        values[flat] = rational(Rational(*num, *den), source, format!("{path}[{k}][2]"))?;
    }
    Ok(values)
}

pub fn build_game(file: GameFile, source: &str) -> Result<GameDoc, CliError> {
    if file.n == 0 {
        return Err(CliError::schema(source, "n", "need at least one team player"));
    }
    let (dims, m) = match file.teams {
        Some(t) => {
            if t.minimizers != file.n {
                return Err(CliError::schema(
                    source,
                    "teams.minimizers",
                    format!("{} minimizers but n = {}", t.minimizers, file.n),
                ));
            }
            if t.maximizers == 0 {
                return Err(CliError::schema(source, "teams.maximizers", "need at least one maximizer"));
            }
            if file.adversary_actions.is_some() {
                return Err(CliError::schema(
                    source,
                    "adversary_actions",
                    "two-team games list every player in actions",
                ));
            }
            if file.actions.len() != t.minimizers + t.maximizers {
                return Err(CliError::schema(
                    source,
                    "actions",
                    format!("expected {} action counts, found {}", t.minimizers + t.maximizers, file.actions.len()),
                ));
            }
            (file.actions.clone(), t.maximizers)
        }
        None => {
            if file.actions.len() != file.n {
                return Err(CliError::schema(
                    source,
                    "actions",
                    format!("expected {} action counts, found {}", file.n, file.actions.len()),
                ));
            }
            let Some(b) = file.adversary_actions else {
                return Err(CliError::schema(source, "adversary_actions", "missing field `adversary_actions`"));
            };
            let mut dims = file.actions.clone();
            dims.push(b);
            (dims, 1)
        }
    };
    for (p, &d) in dims.iter().enumerate() {
        if d == 0 {
            let path = if p < file.actions.len() { format!("actions[{p}]") } else { "adversary_actions".into() };
            return Err(CliError::schema(source, path, "action count must be at least 1"));
        }
    }
    let payoff = match (&file.payoff.kind, &file.payoff.entries, &file.payoff.locals) {
        (PayoffKind::Dense, Some(entries), None) => {
            let values = tensor(entries, &dims, source, "payoff.entries")?;
            Payoff::dense(dims.clone(), values).map_err(|e| CliError::schema(source, "payoff", e.to_string()))?
        }
        (PayoffKind::Polytensor, None, Some(locals)) => {
            let mut terms = Vec::with_capacity(locals.len());
            for (l, local) in locals.iter().enumerate() {
                let players_path = format!("payoff.locals[{l}].players");
                if local.players.is_empty() || local.players.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(CliError::schema(source, players_path, "players must be nonempty and strictly increasing"));
                }
                if let Some(&p) = local.players.iter().find(|&&p| p >= dims.len()) {
                    return Err(CliError::schema(
                        source,
                        players_path,
                        format!("player {p} out of range, the game has {}", dims.len()),
                    ));
                }
                let local_dims: Vec<usize> = local.players.iter().map(|&p| dims[p]).collect();
                let values = tensor(&local.entries, &local_dims, source, &format!("payoff.locals[{l}].entries"))?;
                terms.push(LocalTerm::new(local.players.clone(), values));
            }
            Payoff::polytensor(dims.clone(), terms).map_err(|e| CliError::schema(source, "payoff", e.to_string()))?
        }
        (PayoffKind::Dense, _, _) => {
            return Err(CliError::schema(source, "payoff", "dense payoffs have `entries` and no `locals`"))
        }
        (PayoffKind::Polytensor, _, _) => {
            return Err(CliError::schema(source, "payoff", "polytensor payoffs have `locals` and no `entries`"))
        }
    };
    let v_max = file.v_max.map(|r| rational(r, source, "v_max".into())).transpose()?;
    if let Some(v) = v_max {
        // surfaces a bound violation with its path before any command runs
        let probe = TeamGame::new(payoff.clone()).map_err(|e| CliError::schema(source, "payoff", e.to_string()))?;
        probe.with_v_max(v).map_err(|e| CliError::schema(source, "v_max", e.to_string()))?;
    }
    Ok(GameDoc {
        n: file.n,
        m,
        v_max,
        payoff,
        file,
    })
}

fn to_rational(v: f64) -> Result<Rational, CliError> {
    Rational::from_f64(v).ok_or_else(|| CliError::Usage(format!("value {v} cannot be written as a 64-bit rational")))
}

fn entries_of(values: &[f64], dims: &[usize]) -> Result<Vec<Entry>, CliError> {
    let mut idx = vec![0usize; dims.len()];
    let mut out = Vec::with_capacity(values.len());
    for &v in values {
        let r = to_rational(v)?;
        out.push(Entry(idx.clone(), r.0, r.1));
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(out)
}

fn payoff_file(payoff: &Payoff) -> Result<PayoffFile, CliError> {
    let dims = payoff.dims();
    Ok(match payoff.representation() {
        Representation::DenseTensor => PayoffFile {
            kind: PayoffKind::Dense,
            entries: Some(entries_of(payoff.dense_values().expect("dense payoff"), dims)?),
            locals: None,
        },
        Representation::Polytensor => PayoffFile {
            kind: PayoffKind::Polytensor,
            entries: None,
            locals: Some(payoff
                .local_terms()
                .expect("polytensor payoff")
                .iter()
                .map(|t| {
                    let local: Vec<usize> = t.players().iter().map(|&p| dims[p]).collect();
                    Ok(LocalFile {
                        players: t.players().to_vec(),
                        entries: entries_of(t.values(), &local)?,
                    })
                })
                .collect::<Result<_, CliError>>()?),
        },
    })
}

impl GameFile {
    pub fn from_team_game(game: &TeamGame, provenance: Option<Provenance>) -> Result<Self, CliError> {
        Ok(GameFile {
            n: game.n(),
            teams: None,
            actions: game.action_sets().to_vec(),
            adversary_actions: Some(game.adversary_actions()),
            v_max: Some(to_rational(game.v_max())?),
            provenance,
            payoff: payoff_file(game.payoff())?,
        })
    }

    pub fn from_two_team_game(game: &TwoTeamGame, provenance: Option<Provenance>) -> Result<Self, CliError> {
        Ok(GameFile {
            n: game.n(),
            teams: Some(Teams {
                minimizers: game.n(),
                maximizers: game.m(),
            }),
            actions: game.payoff().dims().to_vec(),
            adversary_actions: None,
            v_max: Some(to_rational(game.v_max())?),
            provenance,
            payoff: payoff_file(game.payoff())?,
        })
    }
}

/// Mixed strategies as written to and read from files. Single-adversary
/// profiles use `adversary`; two-team profiles use `maximizers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub team: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maximizers: Option<Vec<Vec<f64>>>,
}

impl ProfileFile {
    pub fn from_mixed(p: &MixedProfile) -> Self {
        ProfileFile {
            team: p.team.clone(),
            adversary: Some(p.adversary.clone()),
            maximizers: None,
        }
    }

    pub fn from_two_team(p: &TwoTeamProfile) -> Self {
        ProfileFile {
            team: p.team.clone(),
            adversary: None,
            maximizers: Some(p.maximizers.clone()),
        }
    }

    /// Maximizer strategies, accepting either field.
    pub fn maximizer_list(&self, source: &str) -> Result<Vec<Vec<f64>>, CliError> {
        match (&self.adversary, &self.maximizers) {
            (Some(y), None) => Ok(vec![y.clone()]),
            (None, Some(ys)) => Ok(ys.clone()),
            _ => Err(CliError::schema(source, "", "give exactly one of `adversary` and `maximizers`")),
        }
    }
}

/// Reads a profile file, or the `profile` of a solution file.
pub fn load_profile(path: &Path) -> Result<ProfileFile, CliError> {
    let source = path.display().to_string();
    let text = read_text(path)?;
    let value: serde_json::Value = parse(&text, &source)?;
    match value.get("profile") {
        Some(inner) if value.get("format").is_some() => from_value(inner.clone(), &source, "profile"),
        _ => from_value(value, &source, ""),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateOut {
    pub gap_team: f64,
    pub gap_adversary: f64,
    pub gap: f64,
    pub epsilon: f64,
    pub certified: bool,
}

impl CertificateOut {
    pub fn new(c: &teamsolve_core::extension::NeCertificate, epsilon: f64) -> Self {
        CertificateOut {
            gap_team: c.gap_team,
            gap_adversary: c.gap_adversary,
            gap: c.gap(),
            epsilon,
            certified: c.gap() <= epsilon,
        }
    }
}

/// Output of `solve` and `gdmm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub format: String,
    pub version: u32,
    pub command: String,
    pub epsilon: f64,
    pub seed: u64,
    pub outcome: String,
    pub iterations: usize,
    pub profile: ProfileFile,
    pub certificate: CertificateOut,
    /// Resolved step sizes, budgets and run diagnostics.
    pub solver: serde_json::Value,
}

pub fn load_solution(path: &Path) -> Result<SolutionFile, CliError> {
    let source = path.display().to_string();
    parse(&read_text(path)?, &source)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| CliError::Io {
        file: path.display().to_string(),
        source,
    })
}

/// Parses a spec or auxiliary JSON file into `T`.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let source = path.display().to_string();
    parse(&read_text(path)?, &source)
}
