//! Deterministic parity tree automata: representation, text format,
//! alphabet extension, subautomata, and Graphviz export.
//!
//! An automaton runs on full infinite binary trees whose nodes carry letters
//! from a finite alphabet. Reading a letter in a state sends one successor
//! state to the left child and one to the right; the transition function is
//! total. A run is accepting when on every path the highest rank seen
//! infinitely often is even.
//!
//! States and letters are interned: the data model stores label strings once
//! and hands out dense integer handles ([`StateId`], [`Letter`]) assigned in
//! declaration order, so iteration is reproducible. No state is special in
//! the data model; all-accepting and all-rejecting sink states are
//! recognized by their shape (all transitions self-loops) where an operation
//! needs them.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Dense handle of a state; indexes into the automaton's state tables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct StateId(pub u32);

/// Dense handle of an alphabet letter.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Letter(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One direction of a transition: `source` reading `letter` sends
/// `target` to the child in `direction` (0 = left, 1 = right).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Edge {
    pub source: StateId,
    pub letter: Letter,
    pub direction: u8,
    pub target: StateId,
}

/// A deterministic parity tree automaton with a total transition function.
#[derive(Clone, Debug)]
pub struct DetTreeAutomaton {
    letters: Vec<String>,
    state_names: Vec<String>,
    ranks: Vec<u32>,
    initial: StateId,
    /// `delta[state][letter]` = (left successor, right successor).
    delta: Vec<Vec<(StateId, StateId)>>,
}

/// Errors from automaton construction, parsing, and the operations on them.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate transition for ({state}, {letter})")]
    DuplicateTransition { line: usize, state: String, letter: String },
    #[error("line {line}: undeclared state `{state}`")]
    UndeclaredState { line: usize, state: String },
    #[error("line {line}: unknown letter `{letter}`")]
    UnknownLetter { line: usize, letter: String },
    #[error("missing transition for ({state}, {letter})")]
    MissingTransition { state: String, letter: String },
    #[error("no start state declared")]
    NoStartState,
    #[error("letter `{0}` is already in the alphabet")]
    LetterExists(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("malformed automaton: {0}")]
    Invalid(String),
}

impl DetTreeAutomaton {
    /// Builds an automaton from index-based tables. `delta[q][a]` gives the
    /// successor pair of state `q` reading letter `a`.
    pub fn from_parts(
        letters: Vec<String>,
        states: Vec<(String, u32)>,
        initial: usize,
        delta: Vec<Vec<(usize, usize)>>,
    ) -> Result<Self, AutomatonError> {
        let n = states.len();
        if letters.is_empty() {
            return Err(AutomatonError::Invalid("empty alphabet".into()));
        }
        if n == 0 {
            return Err(AutomatonError::Invalid("no states".into()));
        }
        let mut seen = HashMap::new();
        for (i, symbol) in letters.iter().enumerate() {
            if seen.insert(symbol.clone(), i).is_some() {
                return Err(AutomatonError::Invalid(format!("duplicate letter `{symbol}`")));
            }
        }
        let mut seen = HashMap::new();
        for (i, (name, _)) in states.iter().enumerate() {
            if seen.insert(name.clone(), i).is_some() {
                return Err(AutomatonError::Invalid(format!("duplicate state `{name}`")));
            }
        }
        if initial >= n {
            return Err(AutomatonError::Invalid("initial state out of range".into()));
        }
        if delta.len() != n {
            return Err(AutomatonError::Invalid("transition table has wrong height".into()));
        }
        let mut table = Vec::with_capacity(n);
        for row in &delta {
            if row.len() != letters.len() {
                return Err(AutomatonError::Invalid("transition table has wrong width".into()));
            }
            let mut out = Vec::with_capacity(row.len());
            for &(l, r) in row {
                if l >= n || r >= n {
                    return Err(AutomatonError::Invalid("transition target out of range".into()));
                }
                out.push((StateId(l as u32), StateId(r as u32)));
            }
            table.push(out);
        }
        let (state_names, ranks) = states.into_iter().unzip();
        Ok(DetTreeAutomaton {
            letters,
            state_names,
            ranks,
            initial: StateId(initial as u32),
            delta: table,
        })
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_letters(&self) -> usize {
        self.letters.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.state_names.len() as u32).map(StateId)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.letters.len() as u32).map(Letter)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.state_names[q.index()]
    }

    pub fn letter_symbol(&self, a: Letter) -> &str {
        &self.letters[a.index()]
    }

    pub fn rank(&self, q: StateId) -> u32 {
        self.ranks[q.index()]
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn successors(&self, q: StateId, a: Letter) -> (StateId, StateId) {
        self.delta[q.index()][a.index()]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|n| n == name).map(|i| StateId(i as u32))
    }

    pub fn letter_by_symbol(&self, symbol: &str) -> Option<Letter> {
        self.letters.iter().position(|s| s == symbol).map(|i| Letter(i as u32))
    }

    /// All transition directions, ordered by (state, letter, direction).
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.states().flat_map(move |q| {
            self.letters().flat_map(move |a| {
                let (l, r) = self.successors(q, a);
                [
                    Edge { source: q, letter: a, direction: 0, target: l },
                    Edge { source: q, letter: a, direction: 1, target: r },
                ]
            })
        })
    }

    /// Whether every transition of `q` goes back to `q` in both directions.
    /// Such a state accepts every tree when its rank is even and no tree
    /// when its rank is odd.
    pub fn is_all_self_loops(&self, q: StateId) -> bool {
        self.delta[q.index()].iter().all(|&(l, r)| l == q && r == q)
    }

    /// Marks the states reachable from `q` through any sequence of edges.
    pub fn reachable_from(&self, q: StateId) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![q];
        seen[q.index()] = true;
        while let Some(p) = stack.pop() {
            for row in &self.delta[p.index()] {
                for t in [row.0, row.1] {
                    if !seen[t.index()] {
                        seen[t.index()] = true;
                        stack.push(t);
                    }
                }
            }
        }
        seen
    }

    /// The automaton restarted at `q` and restricted to the states reachable
    /// from `q`, keeping their declaration order.
    pub fn subautomaton(&self, q: StateId) -> Self {
        assert!(q.index() < self.num_states(), "state handle out of range");
        let keep = self.reachable_from(q);
        let mut remap = vec![usize::MAX; self.num_states()];
        let mut states = Vec::new();
        let mut kept = Vec::new();
        for p in self.states() {
            if keep[p.index()] {
                remap[p.index()] = states.len();
                states.push((self.state_names[p.index()].clone(), self.ranks[p.index()]));
                kept.push(p);
            }
        }
        let delta = kept
            .iter()
            .map(|&p| {
                self.delta[p.index()]
                    .iter()
                    .map(|&(l, r)| (remap[l.index()], remap[r.index()]))
                    .collect()
            })
            .collect();
        DetTreeAutomaton::from_parts(self.letters.clone(), states, remap[q.index()], delta)
            .expect("restriction of a valid automaton stays valid")
    }

    /// Looks up a state by name and restarts the automaton there.
    pub fn subautomaton_named(&self, name: &str) -> Result<Self, AutomatonError> {
        let q = self
            .state_by_name(name)
            .ok_or_else(|| AutomatonError::UnknownState(name.to_string()))?;
        Ok(self.subautomaton(q))
    }

    /// Adds a fresh letter without changing the difficulty of the recognized
    /// language. States that can still accept some tree send the new letter to
    /// an all-accepting sink, while states with no accepting continuation keep
    /// rejecting through an all-rejecting sink; existing sinks of either kind
    /// absorb the letter and are reused instead of duplicated. Routing dead
    /// states to the accepting sink would turn an empty language into a
    /// nonempty one, which is exactly what this operation must never do.
    pub fn extend_alphabet(&self, symbol: &str) -> Result<Self, AutomatonError> {
        if self.letter_by_symbol(symbol).is_some() {
            return Err(AutomatonError::LetterExists(symbol.to_string()));
        }
        let productive = crate::productive::productive_states(self);
        let mut states: Vec<(String, u32)> = self
            .state_names
            .iter()
            .cloned()
            .zip(self.ranks.iter().copied())
            .collect();
        let fresh_state = |states: &mut Vec<(String, u32)>, stem: &str, rank: u32| {
            let mut name = stem.to_string();
            let mut i = 0;
            while states.iter().any(|(n, _)| *n == name) {
                name = format!("{stem}{i}");
                i += 1;
            }
            states.push((name, rank));
            states.len() - 1
        };
        // A sink of matching parity absorbs the new letter by self-looping, so
        // only states that still make progress need explicit routing.
        let needs_top = self
            .states()
            .any(|q| !self.is_all_self_loops(q) && productive.contains(&q));
        let needs_bot = self
            .states()
            .any(|q| !self.is_all_self_loops(q) && !productive.contains(&q));
        let find_sink = |auto: &Self, parity: u32| {
            auto.states()
                .find(|&q| auto.is_all_self_loops(q) && auto.rank(q) % 2 == parity)
                .map(StateId::index)
        };
        let top = if needs_top {
            find_sink(self, 0).unwrap_or_else(|| fresh_state(&mut states, "top", 0))
        } else {
            usize::MAX
        };
        let bot = if needs_bot {
            find_sink(self, 1).unwrap_or_else(|| fresh_state(&mut states, "bot", 1))
        } else {
            usize::MAX
        };
        let mut letters = self.letters.clone();
        letters.push(symbol.to_string());
        let mut delta: Vec<Vec<(usize, usize)>> = Vec::with_capacity(states.len());
        for q in 0..states.len() {
            let mut row: Vec<(usize, usize)> = if q < self.num_states() {
                self.delta[q]
                    .iter()
                    .map(|&(l, r)| (l.index(), r.index()))
                    .collect()
            } else {
                vec![(q, q); self.letters.len()]
            };
            let target = if q >= self.num_states() || self.is_all_self_loops(StateId(q as u32)) {
                q
            } else if productive.contains(&StateId(q as u32)) {
                top
            } else {
                bot
            };
            row.push((target, target));
            delta.push(row);
        }
        Ok(DetTreeAutomaton::from_parts(letters, states, self.initial.index(), delta)
            .expect("extension of a valid automaton stays valid"))
    }

    /// Parses the `dta v1` text format.
    ///
    /// The format is line-oriented UTF-8; `#` starts a comment and blank
    /// lines are skipped. The first significant line must be `dta v1`,
    /// followed in any order by one `alphabet` line, one `start` line, one
    /// `state <name> <rank>` line per state, and exactly one
    /// `<state> <letter> -> <left> <right>` line per (state, letter) pair.
    pub fn parse(text: &str) -> Result<Self, AutomatonError> {
        let syntax = |line: usize, message: &str| AutomatonError::Syntax {
            line,
            message: message.to_string(),
        };
        // (line number, tokens) for every significant line.
        let mut lines: Vec<(usize, Vec<&str>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if !tokens.is_empty() {
                lines.push((i + 1, tokens));
            }
        }
        let Some((first_no, header)) = lines.first() else {
            return Err(syntax(1, "empty input"));
        };
        if header.as_slice() != ["dta", "v1"] {
            return Err(syntax(*first_no, "expected header `dta v1`"));
        }

        let mut letters: Vec<String> = Vec::new();
        let mut states: Vec<(String, u32)> = Vec::new();
        let mut state_index: HashMap<String, usize> = HashMap::new();
        let mut start: Option<(usize, String)> = None;
        let mut transition_lines: Vec<(usize, &[&str])> = Vec::new();
        for (no, tokens) in &lines[1..] {
            match tokens[0] {
                "alphabet" => {
                    if !letters.is_empty() {
                        return Err(syntax(*no, "duplicate alphabet line"));
                    }
                    if tokens.len() < 2 {
                        return Err(syntax(*no, "alphabet line needs at least one letter"));
                    }
                    for symbol in &tokens[1..] {
                        if letters.iter().any(|l| l == symbol) {
                            return Err(syntax(*no, &format!("duplicate letter `{symbol}`")));
                        }
                        letters.push(symbol.to_string());
                    }
                }
                "start" => {
                    if start.is_some() {
                        return Err(syntax(*no, "duplicate start line"));
                    }
                    let [_, name] = tokens.as_slice() else {
                        return Err(syntax(*no, "start line takes exactly one state name"));
                    };
                    start = Some((*no, name.to_string()));
                }
                "state" => {
                    let [_, name, rank] = tokens.as_slice() else {
                        return Err(syntax(*no, "state line takes a name and a rank"));
                    };
                    let Ok(rank) = rank.parse::<u32>() else {
                        return Err(syntax(*no, &format!("rank `{rank}` is not a natural number")));
                    };
                    if state_index.insert(name.to_string(), states.len()).is_some() {
                        return Err(syntax(*no, &format!("duplicate state `{name}`")));
                    }
                    states.push((name.to_string(), rank));
                }
                _ => transition_lines.push((*no, tokens.as_slice())),
            }
        }

        if states.is_empty() {
            return Err(AutomatonError::Invalid("no states".into()));
        }
        if letters.is_empty() {
            return Err(AutomatonError::Invalid("empty alphabet".into()));
        }
        let letter_index: HashMap<&str, usize> =
            letters.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup_state = |no: usize, name: &str| {
            state_index.get(name).copied().ok_or(AutomatonError::UndeclaredState {
                line: no,
                state: name.to_string(),
            })
        };

        let mut delta: Vec<Vec<Option<(usize, usize)>>> =
            vec![vec![None; letters.len()]; states.len()];
        for (no, tokens) in transition_lines {
            let [source, letter, arrow, left, right] = tokens else {
                return Err(syntax(no, "expected `<state> <letter> -> <left> <right>`"));
            };
            if *arrow != "->" {
                return Err(syntax(no, "expected `->` between source and targets"));
            }
            let q = lookup_state(no, source)?;
            let a = *letter_index.get(letter).ok_or(AutomatonError::UnknownLetter {
                line: no,
                letter: letter.to_string(),
            })?;
            let l = lookup_state(no, left)?;
            let r = lookup_state(no, right)?;
            if delta[q][a].is_some() {
                return Err(AutomatonError::DuplicateTransition {
                    line: no,
                    state: source.to_string(),
                    letter: letter.to_string(),
                });
            }
            delta[q][a] = Some((l, r));
        }

        let Some((start_line, start_name)) = start else {
            return Err(AutomatonError::NoStartState);
        };
        let initial = lookup_state(start_line, &start_name)?;
        let mut table = Vec::with_capacity(states.len());
        for (q, row) in delta.into_iter().enumerate() {
            let mut out = Vec::with_capacity(letters.len());
            for (a, entry) in row.into_iter().enumerate() {
                match entry {
                    Some(pair) => out.push(pair),
                    None => {
                        return Err(AutomatonError::MissingTransition {
                            state: states[q].0.clone(),
                            letter: letters[a].clone(),
                        })
                    }
                }
            }
            table.push(out);
        }
        DetTreeAutomaton::from_parts(letters, states, initial, table)
    }

    /// Serializes to canonical `dta v1` text: alphabet sorted, states in
    /// declaration order, transitions sorted by (state, letter symbol).
    /// Equal automata produce identical bytes.
    pub fn serialize(&self) -> String {
        let mut sorted_letters: Vec<Letter> = self.letters().collect();
        sorted_letters.sort_by(|&a, &b| self.letter_symbol(a).cmp(self.letter_symbol(b)));
        let mut out = String::from("dta v1\n");
        out.push_str("alphabet");
        for &a in &sorted_letters {
            out.push(' ');
            out.push_str(self.letter_symbol(a));
        }
        out.push('\n');
        out.push_str(&format!("start {}\n", self.state_name(self.initial)));
        for q in self.states() {
            out.push_str(&format!("state {} {}\n", self.state_name(q), self.rank(q)));
        }
        for q in self.states() {
            for &a in &sorted_letters {
                let (l, r) = self.successors(q, a);
                out.push_str(&format!(
                    "{} {} -> {} {}\n",
                    self.state_name(q),
                    self.letter_symbol(a),
                    self.state_name(l),
                    self.state_name(r)
                ));
            }
        }
        out
    }

    /// Graphviz export: states become nodes labelled `name:rank` (even rank
    /// drawn doublecircle, odd circle), each transition two edges labelled
    /// `letter,0` and `letter,1`. Output ordering is deterministic.
    pub fn export_dot(&self) -> String {
        fn quote(s: &str) -> String {
            format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
        }
        let mut sorted_letters: Vec<Letter> = self.letters().collect();
        sorted_letters.sort_by(|&a, &b| self.letter_symbol(a).cmp(self.letter_symbol(b)));
        let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
        out.push_str("  __start [shape=point, label=\"\"];\n");
        out.push_str(&format!("  __start -> {};\n", quote(self.state_name(self.initial))));
        for q in self.states() {
            let shape = if self.rank(q) % 2 == 0 { "doublecircle" } else { "circle" };
            out.push_str(&format!(
                "  {} [label={}, shape={}];\n",
                quote(self.state_name(q)),
                quote(&format!("{}:{}", self.state_name(q), self.rank(q))),
                shape
            ));
        }
        for q in self.states() {
            for &a in &sorted_letters {
                let (l, r) = self.successors(q, a);
                for (dir, t) in [(0, l), (1, r)] {
                    out.push_str(&format!(
                        "  {} -> {} [label={}];\n",
                        quote(self.state_name(q)),
                        quote(self.state_name(t)),
                        quote(&format!("{},{}", self.letter_symbol(a), dir))
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Structural equality up to letter declaration order: same state names in
/// the same order, same ranks, same initial state, same alphabet as a set,
/// and the same successor pairs per (state, letter symbol). Serialization
/// sorts the alphabet, so this is exactly round-trip equality.
impl PartialEq for DetTreeAutomaton {
    fn eq(&self, other: &Self) -> bool {
        if self.state_names != other.state_names
            || self.ranks != other.ranks
            || self.initial != other.initial
        {
            return false;
        }
        let mut mine: Vec<&str> = self.letters.iter().map(String::as_str).collect();
        let mut theirs: Vec<&str> = other.letters.iter().map(String::as_str).collect();
        mine.sort_unstable();
        theirs.sort_unstable();
        if mine != theirs {
            return false;
        }
        self.states().all(|q| {
            self.letters().all(|a| {
                let b = other.letter_by_symbol(self.letter_symbol(a)).unwrap();
                self.successors(q, a) == other.successors(q, b)
            })
        })
    }
}

impl Eq for DetTreeAutomaton {}

impl fmt::Display for DetTreeAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
dta v1
alphabet a b
start q0
state q0 0
state q1 1
q0 a -> q0 q1
q0 b -> q1 q1
q1 a -> q1 q1
q1 b -> q0 q0
";

    #[test]
    fn parses_the_reference_sample() {
        let auto = DetTreeAutomaton::parse(SAMPLE).unwrap();
        assert_eq!(auto.num_states(), 2);
        assert_eq!(auto.num_letters(), 2);
        let q0 = auto.state_by_name("q0").unwrap();
        let q1 = auto.state_by_name("q1").unwrap();
        let b = auto.letter_by_symbol("b").unwrap();
        assert_eq!(auto.initial(), q0);
        assert_eq!(auto.rank(q0), 0);
        assert_eq!(auto.rank(q1), 1);
        assert_eq!(auto.successors(q0, b), (q1, q1));
        assert_eq!(auto.successors(q1, b), (q0, q0));
    }

    #[test]
    fn parses_single_state_identity_case() {
        let auto = DetTreeAutomaton::parse("dta v1\nalphabet a\nstart q0\nstate q0 0\nq0 a -> q0 q0\n")
            .unwrap();
        assert_eq!(auto.num_states(), 1);
        assert!(auto.is_all_self_loops(StateId(0)));
    }

    #[test]
    fn comments_blank_lines_and_order_are_flexible() {
        let text = "\
# a comment
dta v1

q0 a -> q0 q0   # trailing comment
state q0 0
alphabet a
start q0
";
        let auto = DetTreeAutomaton::parse(text).unwrap();
        assert_eq!(auto.num_states(), 1);
    }

    #[test]
    fn missing_transition_names_the_pair() {
        let text = "\
dta v1
alphabet a b
start q0
state q0 0
state q1 1
q0 a -> q0 q1
q0 b -> q1 q1
q1 a -> q1 q1
";
        assert_eq!(
            DetTreeAutomaton::parse(text),
            Err(AutomatonError::MissingTransition { state: "q1".into(), letter: "b".into() })
        );
    }

    #[test]
    fn parse_reports_structural_errors() {
        let dup = format!("{SAMPLE}q1 b -> q1 q1\n");
        assert!(matches!(
            DetTreeAutomaton::parse(&dup),
            Err(AutomatonError::DuplicateTransition { line: 10, .. })
        ));
        let undeclared = SAMPLE.replace("q0 a -> q0 q1", "q0 a -> q0 q9");
        assert!(matches!(
            DetTreeAutomaton::parse(&undeclared),
            Err(AutomatonError::UndeclaredState { .. })
        ));
        let unknown_letter = SAMPLE.replace("q1 b -> q0 q0", "q1 c -> q0 q0");
        assert!(matches!(
            DetTreeAutomaton::parse(&unknown_letter),
            Err(AutomatonError::UnknownLetter { .. })
        ));
        let no_start = SAMPLE.replace("start q0\n", "");
        assert_eq!(DetTreeAutomaton::parse(&no_start), Err(AutomatonError::NoStartState));
        assert!(matches!(
            DetTreeAutomaton::parse("alphabet a\n"),
            Err(AutomatonError::Syntax { line: 1, .. })
        ));
        let bad_rank = SAMPLE.replace("state q1 1", "state q1 -1");
        assert!(matches!(
            DetTreeAutomaton::parse(&bad_rank),
            Err(AutomatonError::Syntax { line: 5, .. })
        ));
    }

    #[test]
    fn serialize_then_parse_is_identity() {
        // Alphabet deliberately declared out of sorted order.
        let text = "\
dta v1
alphabet b a
start q1
state q0 2
state q1 1
q0 a -> q0 q1
q0 b -> q1 q1
q1 a -> q1 q1
q1 b -> q0 q0
";
        let auto = DetTreeAutomaton::parse(text).unwrap();
        let bytes = auto.serialize();
        assert!(bytes.contains("alphabet a b"));
        let again = DetTreeAutomaton::parse(&bytes).unwrap();
        assert_eq!(auto, again);
        assert_eq!(again.serialize(), bytes);
    }

    #[test]
    fn equality_respects_labels() {
        let renamed = SAMPLE.replace("q1", "p1");
        let a = DetTreeAutomaton::parse(SAMPLE).unwrap();
        let b = DetTreeAutomaton::parse(&renamed).unwrap();
        assert_ne!(a, b);
        assert_ne!(a.serialize(), b.serialize());
    }

    #[test]
    fn extend_alphabet_adds_an_accepting_sink_when_none_exists() {
        let text = "\
dta v1
alphabet a
start q0
state q0 0
state q1 0
q0 a -> q1 q1
q1 a -> q0 q0
";
        let auto = DetTreeAutomaton::parse(text).unwrap();
        let extended = auto.extend_alphabet("c").unwrap();
        assert_eq!(extended.num_states(), 3);
        assert_eq!(extended.num_letters(), 2);
        let top = extended.state_by_name("top").unwrap();
        assert_eq!(extended.rank(top), 0);
        assert!(extended.is_all_self_loops(top));
        let c = extended.letter_by_symbol("c").unwrap();
        for q in extended.states() {
            if q != top {
                assert_eq!(extended.successors(q, c), (top, top));
            }
        }
    }

    #[test]
    fn extend_alphabet_adds_a_rejecting_sink_when_every_state_is_dead() {
        // In the sample every q0 transition spawns a q1 branch and q1 returns
        // to q0, so each run carries a path that revisits rank 1 forever: the
        // language is empty and must stay empty under extension.
        let auto = DetTreeAutomaton::parse(SAMPLE).unwrap();
        assert!(crate::productive::productive_states(&auto).is_empty());
        let extended = auto.extend_alphabet("c").unwrap();
        assert_eq!(extended.num_states(), 3);
        let bot = extended.state_by_name("bot").unwrap();
        assert_eq!(extended.rank(bot), 1);
        assert!(extended.is_all_self_loops(bot));
        let c = extended.letter_by_symbol("c").unwrap();
        for q in extended.states() {
            if q != bot {
                assert_eq!(extended.successors(q, c), (bot, bot));
            }
        }
    }

    #[test]
    fn extend_alphabet_reuses_an_existing_sink() {
        let text = "\
dta v1
alphabet a
start q0
state q0 0
state acc 0
q0 a -> q0 acc
acc a -> acc acc
";
        let auto = DetTreeAutomaton::parse(text).unwrap();
        let extended = auto.extend_alphabet("b").unwrap();
        assert_eq!(extended.num_states(), 2);
        let acc = extended.state_by_name("acc").unwrap();
        let q0 = extended.state_by_name("q0").unwrap();
        let b = extended.letter_by_symbol("b").unwrap();
        assert_eq!(extended.successors(q0, b), (acc, acc));
        assert_eq!(extended.successors(acc, b), (acc, acc));
    }

    #[test]
    fn extend_alphabet_keeps_dead_states_rejecting() {
        // q0 rejects every tree over {a}: the leftmost path loops at rank 1.
        // The fresh letter must not hand it an accepting escape, or the empty
        // language would silently become nonempty.
        let text = "\
dta v1
alphabet a
start q0
state q0 1
state acc 0
q0 a -> q0 acc
acc a -> acc acc
";
        let auto = DetTreeAutomaton::parse(text).unwrap();
        let dead = auto.state_by_name("q0").unwrap();
        assert!(!crate::productive::productive_states(&auto).contains(&dead));
        let extended = auto.extend_alphabet("b").unwrap();
        assert_eq!(extended.num_states(), 3);
        let q0 = extended.state_by_name("q0").unwrap();
        let bot = extended.state_by_name("bot").unwrap();
        let b = extended.letter_by_symbol("b").unwrap();
        assert_eq!(extended.rank(bot), 1);
        assert!(extended.is_all_self_loops(bot));
        assert_eq!(extended.successors(q0, b), (bot, bot));
        assert!(!crate::productive::productive_states(&extended).contains(&q0));
    }

    #[test]
    fn extend_alphabet_keeps_rejecting_sinks_absorbing() {
        let text = "\
dta v1
alphabet a
start q0
state q0 0
state dead 1
q0 a -> q0 dead
dead a -> dead dead
";
        let auto = DetTreeAutomaton::parse(text).unwrap();
        let extended = auto.extend_alphabet("b").unwrap();
        let dead = extended.state_by_name("dead").unwrap();
        let b = extended.letter_by_symbol("b").unwrap();
        assert_eq!(extended.successors(dead, b), (dead, dead));
        assert!(extended.is_all_self_loops(dead));
    }

    #[test]
    fn extend_alphabet_rejects_existing_letter() {
        let auto = DetTreeAutomaton::parse(SAMPLE).unwrap();
        assert_eq!(auto.extend_alphabet("a"), Err(AutomatonError::LetterExists("a".into())));
    }

    #[test]
    fn subautomaton_keeps_exactly_the_reachable_part() {
        let text = "\
dta v1
alphabet a
start q0
state q0 0
state q1 1
state q2 2
q0 a -> q1 q1
q1 a -> q1 q1
q2 a -> q0 q1
";
        let auto = DetTreeAutomaton::parse(text).unwrap();
        let q1 = auto.state_by_name("q1").unwrap();
        let sub = auto.subautomaton(q1);
        assert_eq!(sub.num_states(), 1);
        assert_eq!(sub.state_name(sub.initial()), "q1");
        let whole = auto.subautomaton_named("q2").unwrap();
        assert_eq!(whole.num_states(), 3);
        assert_eq!(
            auto.subautomaton_named("nope"),
            Err(AutomatonError::UnknownState("nope".into()))
        );
        // Restarting at the initial state just drops unreachable states.
        let from_start = auto.subautomaton(auto.initial());
        assert_eq!(from_start.num_states(), 2);
    }

    #[test]
    fn dot_export_shape_and_determinism() {
        let auto = DetTreeAutomaton::parse(SAMPLE).unwrap();
        let dot = auto.export_dot();
        assert_eq!(dot.matches("label=\"q").count(), 2);
        assert!(dot.contains("\"q0\" [label=\"q0:0\", shape=doublecircle]"));
        assert!(dot.contains("\"q1\" [label=\"q1:1\", shape=circle]"));
        assert!(dot.contains("\"q0\" -> \"q1\" [label=\"a,1\"]"));
        assert_eq!(dot.matches(" -> ").count(), 1 + 8);
        assert_eq!(dot, auto.export_dot());
    }
}
