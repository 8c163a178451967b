//! Game documents: the native JSON format and the payoff-list variant of
//! Gambit's `.nfg` format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::GameComplex;
use crate::error::{Error, Result};
use crate::game::{Game, MixedStrategy, TOLERANCE};

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk game. Payoffs are listed profile by profile with player 0's
/// strategy most significant; each profile contributes one value per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    pub schema_version: u32,
    pub players: Vec<String>,
    pub strategies: Vec<Vec<String>>,
    pub payoffs: Vec<f64>,
    /// Candidate distributions per player. Absent means the pure deltas.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixed: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    Json,
    Nfg,
}

impl SourceFormat {
    /// `.nfg` by extension, otherwise JSON.
    pub fn of_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("nfg") => SourceFormat::Nfg,
            _ => SourceFormat::Json,
        }
    }
}

pub fn parse_game(path: &Path) -> Result<GameDocument> {
    let text = std::fs::read_to_string(path)?;
    parse_game_str(&text, SourceFormat::of_path(path))
}

pub fn parse_game_str(text: &str, format: SourceFormat) -> Result<GameDocument> {
    let doc = match format {
        SourceFormat::Json => parse_json(text)?,
        SourceFormat::Nfg => parse_nfg(text)?,
    };
    doc.validate()?;
    Ok(doc)
}

fn parse_json(text: &str) -> Result<GameDocument> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

impl GameDocument {
    pub fn from_game(game: &Game) -> Self {
        GameDocument {
            schema_version: SCHEMA_VERSION,
            players: game.player_names().to_vec(),
            strategies: (0..game.num_players())
                .map(|i| game.strategy_names(i).to_vec())
                .collect(),
            payoffs: game.payoff_table().to_vec(),
            mixed: None,
            tolerance: None,
        }
    }

    pub fn with_mixed(mut self, mixed: &[Vec<MixedStrategy>]) -> Self {
        self.mixed = Some(
            mixed
                .iter()
                .map(|set| set.iter().map(|x| x.weights().to_vec()).collect())
                .collect(),
        );
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(TOLERANCE)
    }

    /// Checks everything the types cannot: version, tensor length, names and
    /// distributions.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "schema_version: unsupported version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::invalid(format!(
                    "tolerance: must be positive, got {t}"
                )));
            }
        }
        let game = self.to_game()?;
        if let Some(mixed) = &self.mixed {
            self.mixed_sets(&game, mixed)?;
        }
        Ok(())
    }

    pub fn to_game(&self) -> Result<Game> {
        let n = self.players.len();
        if self.strategies.len() == n && self.strategies.iter().all(|s| !s.is_empty()) {
            let expected = n * self.strategies.iter().map(Vec::len).product::<usize>();
            if self.payoffs.len() != expected {
                return Err(Error::invalid(format!(
                    "payoffs: tensor has length {}, expected {expected}",
                    self.payoffs.len()
                )));
            }
        }
        Game::new(
            self.players.clone(),
            self.strategies.clone(),
            self.payoffs.clone(),
        )
        .map_err(|e| match e {
            Error::Invalid(m) => Error::Invalid(format!("game: {m}")),
            other => other,
        })
    }

    fn mixed_sets(&self, game: &Game, mixed: &[Vec<Vec<f64>>]) -> Result<Vec<Vec<MixedStrategy>>> {
        if mixed.len() != game.num_players() {
            return Err(Error::invalid(format!(
                "mixed: {} lists for {} players",
                mixed.len(),
                game.num_players()
            )));
        }
        mixed
            .iter()
            .enumerate()
            .map(|(i, set)| {
                if set.is_empty() {
                    return Err(Error::invalid(format!("mixed[{i}]: no candidates")));
                }
                set.iter()
                    .enumerate()
                    .map(|(k, w)| {
                        if w.len() != game.num_strategies(i) {
                            return Err(Error::invalid(format!(
                                "mixed[{i}][{k}]: length {}, player has {} strategies",
                                w.len(),
                                game.num_strategies(i)
                            )));
                        }
                        MixedStrategy::new(i, w.clone())
                            .map_err(|e| Error::invalid(format!("mixed[{i}][{k}]: {e}")))
                    })
                    .collect()
            })
            .collect()
    }

    /// Candidate sets, defaulting to one delta per pure strategy.
    pub fn candidates(&self) -> Result<Vec<Vec<MixedStrategy>>> {
        let game = self.to_game()?;
        match &self.mixed {
            Some(m) => self.mixed_sets(&game, m),
            None => Ok((0..game.num_players())
                .map(|i| {
                    let l = game.num_strategies(i);
                    (0..l).map(|s| MixedStrategy::pure(i, s, l)).collect()
                })
                .collect()),
        }
    }

    pub fn to_complex(&self) -> Result<GameComplex> {
        GameComplex::build_with_tolerance(self.to_game()?, self.candidates()?, self.tolerance())
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialise");
        s.push('\n');
        s
    }

    /// Payoff-list `.nfg` text. Candidate sets and tolerance are not
    /// representable there and are dropped.
    pub fn to_nfg(&self) -> String {
        let quote = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
        let players: Vec<String> = self.players.iter().map(|p| quote(p)).collect();
        let strategies: Vec<String> = self
            .strategies
            .iter()
            .map(|s| {
                format!(
                    "{{ {} }}",
                    s.iter().map(|x| quote(x)).collect::<Vec<_>>().join(" ")
                )
            })
            .collect();
        let counts: Vec<usize> = self.strategies.iter().map(Vec::len).collect();
        let n = counts.len();
        let mut values = Vec::with_capacity(self.payoffs.len());
        for k in 0..self.payoffs.len() / n.max(1) {
            let native = native_index(k, &counts);
            for i in 0..n {
                values.push(format!("{}", self.payoffs[native * n + i]));
            }
        }
        format!(
            "NFG 1 R \"\" {{ {} }}\n{{ {} }}\n\n{}\n",
            players.join(" "),
            strategies.join(" "),
            values.join(" ")
        )
    }
}

/// Native profile index of the `k`-th profile in `.nfg` order, where the
/// first player's strategy changes fastest.
fn native_index(k: usize, counts: &[usize]) -> usize {
    let mut rest = k;
    let mut profile = vec![0; counts.len()];
    for (i, &l) in counts.iter().enumerate() {
        profile[i] = rest % l;
        rest /= l;
    }
    profile
        .iter()
        .zip(counts)
        .fold(0, |acc, (&s, &l)| acc * l + s)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    Text(String),
    Open,
    Close,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn next_token(&mut self) -> Result<Option<(Token, usize, usize)>> {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
        let (line, column) = (self.line, self.column);
        let Some(c) = self.bump() else {
            return Ok(None);
        };
        let token = match c {
            '{' => Token::Open,
            '}' => Token::Close,
            '"' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.error(line, column, "unterminated string")),
                        Some('\\') => match self.bump() {
                            Some(e) => s.push(e),
                            None => return Err(self.error(line, column, "unterminated string")),
                        },
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                    }
                }
                Token::Text(s)
            }
            _ => {
                let mut s = c.to_string();
                while let Some(&ch) = self.chars.peek() {
                    if ch.is_whitespace() || ch == '{' || ch == '}' || ch == '"' {
                        break;
                    }
                    s.push(ch);
                    self.bump();
                }
                Token::Word(s)
            }
        };
        Ok(Some((token, line, column)))
    }
}

fn number(word: &str) -> Option<f64> {
    let value = match word.split_once('/') {
        Some((p, q)) => p.parse::<f64>().ok()? / q.parse::<f64>().ok()?,
        None => word.parse().ok()?,
    };
    value.is_finite().then_some(value)
}

/// Reads the payoff-list variant of Gambit's strategic-form format.
pub fn parse_nfg(text: &str) -> Result<GameDocument> {
    let mut lexer = Lexer {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    while let Some(t) = lexer.next_token()? {
        tokens.push(t);
    }
    let end = (lexer.line, lexer.column);
    let mut pos = 0;
    let at = |pos: usize| tokens.get(pos).map(|t| (t.1, t.2)).unwrap_or(end);
    let fail = |pos: usize, msg: &str| {
        let (line, column) = at(pos);
        Error::Parse {
            line,
            column,
            message: msg.to_string(),
        }
    };

    match tokens.first() {
        Some((Token::Word(w), ..)) if w == "NFG" => pos += 1,
        _ => return Err(fail(0, "expected NFG header")),
    }
    match tokens.get(pos) {
        Some((Token::Word(w), ..)) if w == "1" => pos += 1,
        _ => return Err(fail(pos, "expected format version 1")),
    }
    match tokens.get(pos) {
        Some((Token::Word(w), ..)) if w == "R" || w == "D" => pos += 1,
        _ => return Err(fail(pos, "expected number type R or D")),
    }
    match tokens.get(pos) {
        Some((Token::Text(_), ..)) => pos += 1,
        _ => return Err(fail(pos, "expected quoted title")),
    }

    let expect_open = |pos: &mut usize| match tokens.get(*pos) {
        Some((Token::Open, ..)) => {
            *pos += 1;
            Ok(())
        }
        _ => Err(fail(*pos, "expected '{'")),
    };
    expect_open(&mut pos)?;
    let mut players = Vec::new();
    loop {
        match tokens.get(pos) {
            Some((Token::Text(s), ..)) => players.push(s.clone()),
            Some((Token::Close, ..)) => break,
            _ => return Err(fail(pos, "expected player name or '}'")),
        }
        pos += 1;
    }
    pos += 1;
    expect_open(&mut pos)?;

    let mut strategies: Vec<Vec<String>> = Vec::new();
    loop {
        match tokens.get(pos) {
            Some((Token::Word(w), ..)) => {
                let l: usize = w
                    .parse()
                    .map_err(|_| fail(pos, "expected strategy count"))?;
                strategies.push((1..=l).map(|j| j.to_string()).collect());
                pos += 1;
            }
            Some((Token::Open, ..)) => {
                pos += 1;
                let mut names = Vec::new();
                loop {
                    match tokens.get(pos) {
                        Some((Token::Text(s), ..)) => names.push(s.clone()),
                        Some((Token::Close, ..)) => break,
                        _ => return Err(fail(pos, "expected strategy name or '}'")),
                    }
                    pos += 1;
                }
                pos += 1;
                strategies.push(names);
            }
            Some((Token::Close, ..)) => {
                pos += 1;
                break;
            }
            _ => return Err(fail(pos, "expected strategy list")),
        }
    }
    if strategies.len() != players.len() {
        return Err(fail(
            pos,
            &format!(
                "{} players but {} strategy lists",
                players.len(),
                strategies.len()
            ),
        ));
    }
    if let Some((Token::Text(_), ..)) = tokens.get(pos) {
        pos += 1;
    }
    if let Some((Token::Open, ..)) = tokens.get(pos) {
        return Err(fail(
            pos,
            "outcome-list .nfg files are not supported; use the payoff-list form",
        ));
    }

    let mut raw = Vec::new();
    while let Some((token, ..)) = tokens.get(pos) {
        match token {
            Token::Word(w) => {
                raw.push(number(w).ok_or_else(|| fail(pos, &format!("invalid payoff '{w}'")))?)
            }
            _ => return Err(fail(pos, "expected payoff number")),
        }
        pos += 1;
    }

    let counts: Vec<usize> = strategies.iter().map(Vec::len).collect();
    let n = players.len();
    let expected = n * counts.iter().product::<usize>();
    if n == 0 || counts.contains(&0) {
        return Err(Error::invalid(
            "game: every player needs at least one strategy",
        ));
    }
    if raw.len() != expected {
        return Err(Error::invalid(format!(
            "payoffs: tensor has length {}, expected {expected}",
            raw.len()
        )));
    }
    let mut payoffs = vec![0.0; expected];
    for k in 0..expected / n {
        let native = native_index(k, &counts);
        payoffs[native * n..(native + 1) * n].copy_from_slice(&raw[k * n..(k + 1) * n]);
    }
    Ok(GameDocument {
        schema_version: SCHEMA_VERSION,
        players,
        strategies,
        payoffs,
        mixed: None,
        tolerance: None,
    })
}
