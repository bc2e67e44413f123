//! Per-state nonemptiness, productive states, and the normal form.
//!
//! Whether a state accepts at least one tree is decided by a two-player
//! game: at a state the letter-chooser picks a letter, then the
//! path-chooser picks a branch direction, and the play follows the chosen
//! transitions forever. Priorities are state ranks, so the letter-chooser
//! wins exactly when it can grow a tree all of whose paths satisfy the
//! parity condition — that is, when the state's language is nonempty.
//!
//! A state is *productive* when it is nonempty and the initial state can
//! reach it through transitions both of whose targets are nonempty; exactly
//! the productive states can occur in an accepting run on some input. The
//! [`normalize`] operation rebuilds an automaton so that every state is
//! productive except at most one all-rejecting sink, which every dead
//! transition is redirected to. All structural analyses assume this form.

use std::collections::{BTreeMap, BTreeSet};

use crate::automaton::{DetTreeAutomaton, Letter, StateId};
use crate::parity_game::{solve_progress_measures, solve_recursive, ParityGame, Player};

/// Which states accept at least one tree, with a letter-choosing strategy
/// witnessing each.
#[derive(Clone, Debug)]
pub struct NonemptinessResult {
    pub nonempty: BTreeSet<StateId>,
    /// A positional witness: playing this letter forever (whatever the
    /// branching) keeps every path's dominant rank even. Defined exactly on
    /// the nonempty states.
    pub eve_strategy: BTreeMap<StateId, Letter>,
}

/// An automaton in normal form together with its analysis artifacts.
#[derive(Clone, Debug)]
pub struct NormalizedAutomaton {
    pub automaton: DetTreeAutomaton,
    /// The all-rejecting sink, when one is needed.
    pub bottom: Option<StateId>,
    pub productive: BTreeSet<StateId>,
}

impl NormalizedAutomaton {
    pub fn is_bottom(&self, q: StateId) -> bool {
        self.bottom == Some(q)
    }
}

/// Builds the emptiness game: state positions belong to the letter-chooser,
/// (state, letter) positions to the path-chooser, and both carry the state's
/// rank as priority.
fn emptiness_game(auto: &DetTreeAutomaton) -> ParityGame {
    let n = auto.num_states();
    let l = auto.num_letters();
    let pair = |q: StateId, a: Letter| n + q.index() * l + a.index();
    let mut owner = Vec::with_capacity(n + n * l);
    let mut priority = Vec::with_capacity(n + n * l);
    let mut moves = Vec::with_capacity(n + n * l);
    for q in auto.states() {
        owner.push(Player::Even);
        priority.push(auto.rank(q));
        moves.push(auto.letters().map(|a| pair(q, a)).collect());
    }
    for q in auto.states() {
        for a in auto.letters() {
            let (left, right) = auto.successors(q, a);
            owner.push(Player::Odd);
            priority.push(auto.rank(q));
            moves.push(vec![left.index(), right.index()]);
        }
    }
    ParityGame::new(owner, priority, moves)
}

/// Decides which states recognize a nonempty language.
pub fn nonempty_states(auto: &DetTreeAutomaton) -> NonemptinessResult {
    let game = emptiness_game(auto);
    let solution = solve_recursive(&game);
    debug_assert_eq!(
        solution.winner,
        solve_progress_measures(&game),
        "the two parity solvers disagree on an emptiness game"
    );
    let l = auto.num_letters();
    let mut nonempty = BTreeSet::new();
    let mut eve_strategy = BTreeMap::new();
    for q in auto.states() {
        if solution.winner[q.index()] == Player::Even {
            nonempty.insert(q);
            let pos = solution.strategy[q.index()]
                .expect("letter-chooser positions in the winning region carry a move");
            eve_strategy.insert(q, Letter(((pos - auto.num_states()) % l) as u32));
        }
    }
    NonemptinessResult { nonempty, eve_strategy }
}

/// States that are nonempty and reachable from the initial state through
/// transitions both of whose targets are nonempty. Empty when the initial
/// state itself is empty.
pub fn productive_states(auto: &DetTreeAutomaton) -> BTreeSet<StateId> {
    let ne = nonempty_states(auto).nonempty;
    let mut out = BTreeSet::new();
    if !ne.contains(&auto.initial()) {
        return out;
    }
    let mut stack = vec![auto.initial()];
    out.insert(auto.initial());
    while let Some(q) = stack.pop() {
        for a in auto.letters() {
            let (left, right) = auto.successors(q, a);
            if ne.contains(&left) && ne.contains(&right) {
                for t in [left, right] {
                    if out.insert(t) {
                        stack.push(t);
                    }
                }
            }
        }
    }
    out
}

fn fresh_name(taken: &[&str], base: &str) -> String {
    let mut name = base.to_string();
    let mut i = 0;
    while taken.contains(&name.as_str()) {
        name = format!("{base}{i}");
        i += 1;
    }
    name
}

/// Rebuilds the automaton so every state is productive except at most one
/// all-rejecting sink. Dead states are merged into the sink and dead
/// transitions are redirected to it; the language is unchanged. When the
/// initial state is already empty the result is the one-state sink.
pub fn normalize(auto: &DetTreeAutomaton) -> NormalizedAutomaton {
    let letters: Vec<String> =
        auto.letters().map(|a| auto.letter_symbol(a).to_string()).collect();
    let productive = productive_states(auto);
    if productive.is_empty() {
        let row = vec![(0, 0); letters.len()];
        let automaton = DetTreeAutomaton::from_parts(
            letters,
            vec![("bot".to_string(), 1)],
            0,
            vec![row],
        )
        .expect("one-state sink is valid");
        return NormalizedAutomaton {
            automaton,
            bottom: Some(StateId(0)),
            productive: BTreeSet::new(),
        };
    }

    let ne = nonempty_states(auto).nonempty;
    let mut remap = vec![usize::MAX; auto.num_states()];
    let mut states: Vec<(String, u32)> = Vec::new();
    for &q in &productive {
        remap[q.index()] = states.len();
        states.push((auto.state_name(q).to_string(), auto.rank(q)));
    }
    let mut needs_bottom = false;
    let mut delta: Vec<Vec<(usize, usize)>> = Vec::new();
    for &q in &productive {
        let mut row = Vec::with_capacity(letters.len());
        for a in auto.letters() {
            let (left, right) = auto.successors(q, a);
            if ne.contains(&left) && ne.contains(&right) {
                row.push((remap[left.index()], remap[right.index()]));
            } else {
                needs_bottom = true;
                row.push((usize::MAX, usize::MAX));
            }
        }
        delta.push(row);
    }
    let mut bottom = None;
    if needs_bottom {
        let taken: Vec<&str> = states.iter().map(|(n, _)| n.as_str()).collect();
        let name = fresh_name(&taken, "bot");
        let bot = states.len();
        states.push((name, 1));
        delta.push(vec![(bot, bot); letters.len()]);
        for row in &mut delta {
            for entry in row {
                if entry.0 == usize::MAX {
                    *entry = (bot, bot);
                }
            }
        }
        bottom = Some(StateId(bot as u32));
    }
    let initial = remap[auto.initial().index()];
    let automaton = DetTreeAutomaton::from_parts(letters, states, initial, delta)
        .expect("normal form of a valid automaton is valid");
    let productive = automaton
        .states()
        .filter(|&q| Some(q) != bottom)
        .collect();
    NormalizedAutomaton { automaton, bottom, productive }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn parse(text: &str) -> DetTreeAutomaton {
        DetTreeAutomaton::parse(text).unwrap()
    }

    #[test]
    fn all_even_ranks_means_everything_nonempty() {
        let auto = parse(
            "dta v1\nalphabet a b\nstart q0\nstate q0 0\nstate q1 2\n\
             q0 a -> q1 q0\nq0 b -> q0 q0\nq1 a -> q1 q1\nq1 b -> q0 q1\n",
        );
        let result = nonempty_states(&auto);
        assert_eq!(result.nonempty.len(), 2);
        assert_eq!(result.eve_strategy.len(), 2);
    }

    #[test]
    fn forced_rejecting_branch_empties_the_source() {
        // p's only transition sends the right branch into the rejecting
        // sink t, so p accepts nothing even though r accepts everything.
        let auto = parse(
            "dta v1\nalphabet a\nstart p\nstate p 0\nstate r 0\nstate t 1\n\
             p a -> r t\nr a -> r r\nt a -> t t\n",
        );
        let result = nonempty_states(&auto);
        let r = auto.state_by_name("r").unwrap();
        assert_eq!(result.nonempty.iter().copied().collect::<Vec<_>>(), vec![r]);
        assert!(productive_states(&auto).is_empty());
        let normal = normalize(&auto);
        assert_eq!(normal.automaton.num_states(), 1);
        assert_eq!(normal.bottom, Some(StateId(0)));
        assert!(normal.productive.is_empty());
        assert_eq!(normal.automaton.rank(StateId(0)), 1);
    }

    #[test]
    fn alternating_flower_is_everywhere_nonempty() {
        // Ranks 1 and 2 around a shared state: looping through the rank-2
        // state forever is accepting, so both states are nonempty.
        let auto = parse(
            "dta v1\nalphabet a1 a2\nstart q1\nstate q1 1\nstate q2 2\n\
             q1 a1 -> q1 q1\nq1 a2 -> q2 q2\nq2 a1 -> q1 q1\nq2 a2 -> q1 q1\n",
        );
        let result = nonempty_states(&auto);
        assert_eq!(result.nonempty.len(), 2);
        let q1 = auto.state_by_name("q1").unwrap();
        let a2 = auto.letter_by_symbol("a2").unwrap();
        assert_eq!(result.eve_strategy[&q1], a2);
    }

    #[test]
    fn dead_transition_is_redirected_not_dropped() {
        let auto = parse(
            "dta v1\nalphabet a b\nstart q0\nstate q0 0\nstate dead 1\n\
             q0 a -> q0 q0\nq0 b -> dead dead\ndead a -> dead dead\ndead b -> dead dead\n",
        );
        let normal = normalize(&auto);
        assert_eq!(normal.automaton.num_states(), 2);
        let bot = normal.bottom.unwrap();
        assert_eq!(normal.automaton.state_name(bot), "bot");
        assert_eq!(normal.automaton.rank(bot), 1);
        let q0 = normal.automaton.state_by_name("q0").unwrap();
        let b = normal.automaton.letter_by_symbol("b").unwrap();
        assert_eq!(normal.automaton.successors(q0, b), (bot, bot));
        assert!(normal.automaton.is_all_self_loops(bot));
    }

    #[test]
    fn fully_productive_automaton_is_unchanged() {
        let auto = parse(
            "dta v1\nalphabet a b\nstart q0\nstate q0 0\nstate q1 2\n\
             q0 a -> q1 q0\nq0 b -> q0 q0\nq1 a -> q1 q1\nq1 b -> q0 q1\n",
        );
        let normal = normalize(&auto);
        assert_eq!(normal.automaton, auto);
        assert_eq!(normal.bottom, None);
        assert_eq!(normal.productive.len(), 2);
    }

    #[test]
    fn unreachable_states_are_dropped() {
        let auto = parse(
            "dta v1\nalphabet a\nstart q0\nstate q0 0\nstate lost 0\n\
             q0 a -> q0 q0\nlost a -> lost lost\n",
        );
        let normal = normalize(&auto);
        assert_eq!(normal.automaton.num_states(), 1);
        assert!(normal.automaton.state_by_name("lost").is_none());
    }

    #[test]
    fn normalize_is_idempotent() {
        let auto = parse(
            "dta v1\nalphabet a b\nstart q0\nstate q0 2\nstate q1 1\nstate q2 0\n\
             q0 a -> q1 q2\nq0 b -> q0 q0\nq1 a -> q1 q1\nq1 b -> q1 q1\nq2 a -> q2 q2\nq2 b -> q0 q2\n",
        );
        let once = normalize(&auto);
        let twice = normalize(&once.automaton);
        assert_eq!(once.automaton, twice.automaton);
        assert_eq!(once.bottom, twice.bottom);
    }

    fn random_automaton(rng: &mut ChaCha8Rng) -> DetTreeAutomaton {
        let n = rng.gen_range(1..=6usize);
        let l = rng.gen_range(1..=3usize);
        let letters = (0..l).map(|i| format!("a{i}")).collect();
        let states = (0..n).map(|i| (format!("q{i}"), rng.gen_range(0..=3u32))).collect();
        let delta = (0..n)
            .map(|_| (0..l).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect())
            .collect();
        DetTreeAutomaton::from_parts(letters, states, 0, delta).unwrap()
    }

    /// Follow the witness strategy from every nonempty state: the one-letter
    /// subgraph it spans must stay nonempty and must not contain any cycle
    /// whose maximal rank is odd.
    #[test]
    fn witness_strategies_only_build_accepting_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x11fe);
        for _ in 0..300 {
            let auto = random_automaton(&mut rng);
            let result = nonempty_states(&auto);
            let mut graph: Vec<Vec<usize>> = vec![Vec::new(); auto.num_states()];
            for (&q, &a) in &result.eve_strategy {
                let (left, right) = auto.successors(q, a);
                for t in [left, right] {
                    assert!(
                        result.nonempty.contains(&t),
                        "witness strategy escapes the nonempty region"
                    );
                    graph[q.index()].push(t.index());
                }
            }
            for p in (0..=3u32).filter(|p| p % 2 == 1) {
                for start in auto.states().filter(|&q| auto.rank(q) == p) {
                    let allowed =
                        |v: usize| auto.rank(StateId(v as u32)) <= p;
                    let mut seen = vec![false; auto.num_states()];
                    let mut stack: Vec<usize> =
                        graph[start.index()].iter().copied().filter(|&v| allowed(v)).collect();
                    while let Some(v) = stack.pop() {
                        assert_ne!(
                            v,
                            start.index(),
                            "strategy admits an odd-dominated loop"
                        );
                        if !seen[v] {
                            seen[v] = true;
                            stack.extend(graph[v].iter().copied().filter(|&t| allowed(t)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn normalize_preserves_initial_nonemptiness() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xbead);
        for _ in 0..200 {
            let auto = random_automaton(&mut rng);
            let before = nonempty_states(&auto).nonempty.contains(&auto.initial());
            let normal = normalize(&auto);
            let after =
                nonempty_states(&normal.automaton).nonempty.contains(&normal.automaton.initial());
            assert_eq!(before, after);
            // Normal form invariants.
            for q in normal.automaton.states() {
                if Some(q) == normal.bottom {
                    assert_eq!(normal.automaton.rank(q) % 2, 1);
                    assert!(normal.automaton.is_all_self_loops(q));
                } else {
                    assert!(normal.productive.contains(&q));
                }
            }
            let again = normalize(&normal.automaton);
            assert_eq!(again.automaton, normal.automaton);
        }
    }
}
