use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{AnchorSets, Game, Label};
use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Rational};

/// On-disk game description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub k: usize,
    pub questions: Vec<Vec<Label>>,
    pub answers: Vec<Vec<Label>>,
    pub mu: Vec<MuEntry>,
    pub predicate: Vec<PredicateEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_v: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchors: Option<Vec<Vec<Label>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuEntry {
    pub x: Vec<Label>,
    pub p: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateEntry {
    pub x: Vec<Label>,
    pub a: Vec<Label>,
    pub v: u8,
}

/// One violated game invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    PlayerCount(usize),
    AlphabetCount {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    EmptyAlphabet {
        field: &'static str,
        player: usize,
    },
    DuplicateLabel {
        field: &'static str,
        player: usize,
        label: Label,
    },
    Arity {
        field: &'static str,
        entry: usize,
        found: usize,
    },
    UnknownLabel {
        field: &'static str,
        entry: usize,
        player: usize,
        label: Label,
    },
    BadProbability {
        entry: usize,
        literal: String,
    },
    NegativeMass {
        entry: usize,
        literal: String,
    },
    DuplicateQuestion {
        entry: usize,
    },
    MassSum(String),
    BadVerdict {
        entry: usize,
        v: u8,
    },
    BadDefault(u8),
    DuplicatePredicate {
        entry: usize,
    },
    PartialPredicate {
        missing: u128,
        example: String,
    },
    AnchorLabel {
        player: usize,
        label: Label,
    },
    TableTooLarge(u128),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            PlayerCount(k) => write!(f, "k = {k}: need at least 2 players"),
            AlphabetCount {
                field,
                expected,
                found,
            } => write!(f, "{field}: expected {expected} alphabets, found {found}"),
            EmptyAlphabet { field, player } => {
                write!(f, "{field}[{player}]: empty alphabet")
            }
            DuplicateLabel {
                field,
                player,
                label,
            } => write!(f, "{field}[{player}]: duplicate label {label}"),
            Arity {
                field,
                entry,
                found,
            } => write!(f, "{field}[{entry}]: tuple has {found} components"),
            UnknownLabel {
                field,
                entry,
                player,
                label,
            } => write!(
                f,
                "{field}[{entry}]: label {label} not in player {player}'s alphabet"
            ),
            BadProbability { entry, literal } => {
                write!(f, "mu[{entry}].p: {literal:?} is not a \"num/den\" rational")
            }
            NegativeMass { entry, literal } => write!(f, "mu[{entry}].p: negative mass {literal}"),
            DuplicateQuestion { entry } => write!(f, "mu[{entry}]: question tuple listed twice"),
            MassSum(sum) => write!(f, "mu: mass sum ≠ 1 (got {sum})"),
            BadVerdict { entry, v } => write!(f, "predicate[{entry}].v: {v} is not 0 or 1"),
            BadDefault(v) => write!(f, "default_v: {v} is not 0 or 1"),
            DuplicatePredicate { entry } => {
                write!(f, "predicate[{entry}]: (x, a) pair listed twice")
            }
            PartialPredicate { missing, example } => write!(
                f,
                "predicate: partial predicate, {missing} entries missing (first: {example}) and no default_v"
            ),
            AnchorLabel { player, label } => {
                write!(f, "anchors[{player}]: label {label} not in the question alphabet")
            }
            TableTooLarge(n) => write!(f, "predicate table of {n} entries exceeds the size limit"),
        }
    }
}

/// Every violation found while validating a [`GameFile`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

struct Indexer<'a> {
    questions: Vec<BTreeMap<&'a Label, usize>>,
    answers: Vec<BTreeMap<&'a Label, usize>>,
}

impl<'a> Indexer<'a> {
    fn new(file: &'a GameFile) -> Self {
        let index = |alphabets: &'a [Vec<Label>]| {
            alphabets
                .iter()
                .map(|a| a.iter().enumerate().map(|(i, l)| (l, i)).collect())
                .collect()
        };
        Indexer {
            questions: index(&file.questions),
            answers: index(&file.answers),
        }
    }

    fn resolve(
        maps: &[BTreeMap<&Label, usize>],
        tuple: &[Label],
        field: &'static str,
        entry: usize,
        out: &mut Vec<Violation>,
    ) -> Option<Vec<usize>> {
        if tuple.len() != maps.len() {
            out.push(Violation::Arity {
                field,
                entry,
                found: tuple.len(),
            });
            return None;
        }
        let mut digits = Vec::with_capacity(tuple.len());
        let mut ok = true;
        for (player, label) in tuple.iter().enumerate() {
            match maps[player].get(label) {
                Some(&i) => digits.push(i),
                None => {
                    ok = false;
                    out.push(Violation::UnknownLabel {
                        field,
                        entry,
                        player,
                        label: label.clone(),
                    });
                }
            }
        }
        ok.then_some(digits)
    }
}

/// Checks every game invariant of a parsed file, reporting all violations.
pub fn validate_game(file: &GameFile) -> std::result::Result<(), ValidationReport> {
    collect(file).map(|_| ())
}

struct Checked {
    mu: Vec<(Vec<usize>, Rational)>,
    predicate: BTreeMap<(Vec<usize>, Vec<usize>), bool>,
}

fn collect(file: &GameFile) -> std::result::Result<Checked, ValidationReport> {
    let mut v = Vec::new();
    if file.k < 2 {
        v.push(Violation::PlayerCount(file.k));
    }
    for (field, alphabets) in [("questions", &file.questions), ("answers", &file.answers)] {
        if alphabets.len() != file.k {
            v.push(Violation::AlphabetCount {
                field,
                expected: file.k,
                found: alphabets.len(),
            });
        }
        for (player, alphabet) in alphabets.iter().enumerate() {
            if alphabet.is_empty() {
                v.push(Violation::EmptyAlphabet { field, player });
            }
            let mut seen = BTreeSet::new();
            for label in alphabet {
                if !seen.insert(label) {
                    v.push(Violation::DuplicateLabel {
                        field,
                        player,
                        label: label.clone(),
                    });
                }
            }
        }
    }
    if !v.is_empty() {
        return Err(ValidationReport { violations: v });
    }

    let q_size: u128 = file.questions.iter().map(|a| a.len() as u128).product();
    let a_size: u128 = file.answers.iter().map(|a| a.len() as u128).product();
    if q_size.saturating_mul(a_size) > super::MAX_TABLE_ENTRIES as u128 {
        v.push(Violation::TableTooLarge(q_size.saturating_mul(a_size)));
        return Err(ValidationReport { violations: v });
    }

    let idx = Indexer::new(file);
    let mut mu = Vec::new();
    let mut seen_x = BTreeSet::new();
    let mut total = Rational::zero();
    for (entry, m) in file.mu.iter().enumerate() {
        let x = Indexer::resolve(&idx.questions, &m.x, "mu", entry, &mut v);
        let p = match parse_rational(&m.p) {
            Ok(p) => Some(p),
            Err(_) => {
                v.push(Violation::BadProbability {
                    entry,
                    literal: m.p.clone(),
                });
                None
            }
        };
        if let Some(p) = &p {
            if p.is_negative() {
                v.push(Violation::NegativeMass {
                    entry,
                    literal: m.p.clone(),
                });
            }
            total += p;
        }
        if let (Some(x), Some(p)) = (x, p) {
            if !seen_x.insert(x.clone()) {
                v.push(Violation::DuplicateQuestion { entry });
            } else if !p.is_zero() {
                mu.push((x, p));
            }
        }
    }
    if !total.is_one() {
        v.push(Violation::MassSum(format_rational(&total)));
    }

    let mut predicate = BTreeMap::new();
    for (entry, e) in file.predicate.iter().enumerate() {
        if e.v > 1 {
            v.push(Violation::BadVerdict { entry, v: e.v });
        }
        let x = Indexer::resolve(&idx.questions, &e.x, "predicate.x", entry, &mut v);
        let a = Indexer::resolve(&idx.answers, &e.a, "predicate.a", entry, &mut v);
        if let (Some(x), Some(a)) = (x, a) {
            if predicate.insert((x, a), e.v == 1).is_some() {
                v.push(Violation::DuplicatePredicate { entry });
            }
        }
    }
    match file.default_v {
        Some(d) if d > 1 => v.push(Violation::BadDefault(d)),
        Some(_) => {}
        None => {
            let expected = q_size * a_size;
            let present = predicate.len() as u128;
            if present < expected {
                v.push(Violation::PartialPredicate {
                    missing: expected - present,
                    example: first_missing(file, &predicate),
                });
            }
        }
    }

    if let Some(anchors) = &file.anchors {
        if anchors.len() != file.k {
            v.push(Violation::AlphabetCount {
                field: "anchors",
                expected: file.k,
                found: anchors.len(),
            });
        }
        for (player, set) in anchors.iter().enumerate().take(file.k) {
            for label in set {
                if !idx.questions[player].contains_key(label) {
                    v.push(Violation::AnchorLabel {
                        player,
                        label: label.clone(),
                    });
                }
            }
        }
    }

    if v.is_empty() {
        Ok(Checked { mu, predicate })
    } else {
        Err(ValidationReport { violations: v })
    }
}

fn first_missing(file: &GameFile, present: &BTreeMap<(Vec<usize>, Vec<usize>), bool>) -> String {
    let qs = super::Shape::new(file.questions.iter().map(Vec::len).collect());
    let as_ = super::Shape::new(file.answers.iter().map(Vec::len).collect());
    if let (Ok(qs), Ok(as_)) = (qs, as_) {
        for xi in 0..qs.size() {
            let x = qs.decode(xi);
            for ai in 0..as_.size() {
                let a = as_.decode(ai);
                if !present.contains_key(&(x.clone(), a.clone())) {
                    let fmt = |d: &[usize], alph: &[Vec<Label>]| {
                        d.iter()
                            .enumerate()
                            .map(|(t, &i)| alph[t][i].to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    };
                    return format!(
                        "x=({}) a=({})",
                        fmt(&x, &file.questions),
                        fmt(&a, &file.answers)
                    );
                }
            }
        }
    }
    String::from("?")
}

impl GameFile {
    pub fn to_game(&self) -> Result<Game> {
        let checked = collect(self).map_err(Error::InvalidGame)?;
        let default = self.default_v == Some(1);
        let pred = checked.predicate;
        let game = Game::new(
            self.questions.clone(),
            self.answers.clone(),
            checked.mu,
            |x, a| {
                pred.get(&(x.to_vec(), a.to_vec()))
                    .copied()
                    .unwrap_or(default)
            },
        )?;
        match &self.anchors {
            Some(sets) => {
                let anchors = AnchorSets::from_labels(&game, sets)?;
                game.with_anchors(anchors)
            }
            None => Ok(game),
        }
    }

    /// Serializes a game, listing only accepting predicate entries.
    pub fn from_game(game: &Game) -> Self {
        let qs = game.question_shape();
        let as_ = game.answer_shape();
        let labels = |digits: Vec<usize>, alph: &[Vec<Label>]| -> Vec<Label> {
            digits
                .into_iter()
                .enumerate()
                .map(|(t, i)| alph[t][i].clone())
                .collect()
        };
        let mu = game
            .support()
            .iter()
            .map(|&x| MuEntry {
                x: labels(qs.decode(x), game.question_alphabets()),
                p: format_rational(game.mu(x)),
            })
            .collect();
        let mut predicate = Vec::new();
        for x in 0..qs.size() {
            for a in 0..as_.size() {
                if game.accepts(x, a) {
                    predicate.push(PredicateEntry {
                        x: labels(qs.decode(x), game.question_alphabets()),
                        a: labels(as_.decode(a), game.answer_alphabets()),
                        v: 1,
                    });
                }
            }
        }
        GameFile {
            k: game.k(),
            questions: game.question_alphabets().to_vec(),
            answers: game.answer_alphabets().to_vec(),
            mu,
            predicate,
            default_v: Some(0),
            anchors: game.anchors().map(|a| a.labels(game)),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("game files always serialize")
    }
}

impl Game {
    pub fn from_json(text: &str) -> Result<Game> {
        GameFile::from_json(text)?.to_game()
    }

    pub fn to_json(&self) -> String {
        GameFile::from_game(self).to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::library;

    fn chsh_file() -> GameFile {
        GameFile::from_game(&library::chsh())
    }

    #[test]
    fn chsh_round_trips() {
        let file = chsh_file();
        assert_eq!(validate_game(&file), Ok(()));
        assert_eq!(file.to_game().unwrap(), library::chsh());
        let text = file.to_json();
        assert_eq!(Game::from_json(&text).unwrap(), library::chsh());
    }

    #[test]
    fn reports_mass_sum() {
        let mut file = chsh_file();
        file.mu.truncate(2);
        let report = validate_game(&file).unwrap_err();
        assert!(report.to_string().contains("mass sum ≠ 1"));
    }

    #[test]
    fn reports_partial_predicate() {
        let mut file = chsh_file();
        file.default_v = None;
        let report = validate_game(&file).unwrap_err();
        assert!(report.to_string().contains("partial predicate"));
    }

    #[test]
    fn reports_every_violation() {
        let mut file = chsh_file();
        file.mu[0].p = "half".into();
        file.mu[1].x[0] = "7".into();
        file.predicate[0].v = 3;
        file.anchors = Some(vec![vec!["9".into()], vec![]]);
        let report = validate_game(&file).unwrap_err();
        assert!(report.violations.len() >= 5, "{report}");
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::UnknownLabel { label, .. } if *label == Label::from("7"))));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = GameFile::from_json("{\n  \"k\": 2,\n  \"questions\": oops\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}
