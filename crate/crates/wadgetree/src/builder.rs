//! Constructs an explicit automaton for every canonical name, and exposes
//! the composition operations the canonical family is generated by: choice,
//! conjunction, the sequential switch along the leftmost branch, and the two
//! replication schemes. Built automata serve as ground truth: composing
//! automata and composing names must land on the same degree.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automaton::{AutomatonError, DetTreeAutomaton, Letter, StateId};
use crate::name::{components, CanonicalName, NameError, NameLetter, SimpleName};
use crate::ordinal::{Index, Ordinal};
use crate::productive::productive_states;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("`{op}` expects {expected} operands, got {got}")]
    Arity {
        op: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("left operand of a sequential composition has no leftmost state")]
    NoLeftmostState,
    #[error(transparent)]
    Name(#[from] NameError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// The operations closing the class of degrees reached by canonical names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComposeOp {
    /// A root choice between the two operand languages.
    Or,
    /// Both operands must accept, each reading its own subtree.
    And,
    /// The left operand runs along the leftmost branch, and every leftmost
    /// state may hand the remaining leftmost subtree over to the right
    /// operand once.
    Oplus,
    /// A rejecting head loop that spawns one copy of the right operand per
    /// step and accepts only by escaping into the left operand.
    Arrow,
    /// A flower head over the given window of ranks; moving onto the petal
    /// of rank `j` spawns the operand registered for `j`, and the head may
    /// escape into the base operand. Operands are passed base first, then
    /// one per rank from the bottom of the window up.
    Krep(Index),
}

impl ComposeOp {
    fn label(self) -> &'static str {
        match self {
            ComposeOp::Or => "or",
            ComposeOp::And => "and",
            ComposeOp::Oplus => "oplus",
            ComposeOp::Arrow => "arrow",
            ComposeOp::Krep(_) => "krep",
        }
    }
}

/// States reachable from the initial state without ever taking a right
/// branch. A state is leftmost when *no* path to it uses a right edge, so
/// sinks are never leftmost: wherever they occur they are also spawned as
/// somebody's right child.
pub fn leftmost_states(auto: &DetTreeAutomaton) -> BTreeSet<StateId> {
    let reach = auto.reachable_from(auto.initial());
    let mut tainted = vec![false; auto.num_states()];
    let mut stack = Vec::new();
    for q in auto.states().filter(|q| reach[q.index()]) {
        for a in auto.letters() {
            let (_, right) = auto.successors(q, a);
            if !tainted[right.index()] {
                tainted[right.index()] = true;
                stack.push(right);
            }
        }
    }
    while let Some(q) = stack.pop() {
        for a in auto.letters() {
            let (l, r) = auto.successors(q, a);
            for t in [l, r] {
                if !tainted[t.index()] {
                    tainted[t.index()] = true;
                    stack.push(t);
                }
            }
        }
    }
    auto.states()
        .filter(|q| reach[q.index()] && !tainted[q.index()])
        .collect()
}

/// Accumulates the parts of a composite automaton before the final validity
/// check.
struct Assembler {
    letters: Vec<String>,
    states: Vec<(String, u32)>,
    rows: Vec<Vec<(usize, usize)>>,
}

impl Assembler {
    fn new(letters: Vec<String>) -> Self {
        Assembler {
            letters,
            states: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn add_state(&mut self, name: &str, rank: u32) -> usize {
        self.states.push((name.to_string(), rank));
        self.rows.push(Vec::new());
        self.states.len() - 1
    }

    /// Copies a whole automaton, renaming its states with the prefix. The
    /// copy must already speak every letter of the assembler; its columns
    /// are reordered to match.
    fn add_copy(&mut self, auto: &DetTreeAutomaton, prefix: &str) -> usize {
        let offset = self.states.len();
        let cols: Vec<Letter> = self
            .letters
            .iter()
            .map(|s| {
                auto.letter_by_symbol(s)
                    .expect("operand copies are extended to the full alphabet")
            })
            .collect();
        for q in auto.states() {
            self.states
                .push((format!("{prefix}{}", auto.state_name(q)), auto.rank(q)));
            let row = cols
                .iter()
                .map(|&a| {
                    let (l, r) = auto.successors(q, a);
                    (offset + l.index(), offset + r.index())
                })
                .collect();
            self.rows.push(row);
        }
        offset
    }

    fn self_loop_row(&self, q: usize) -> Vec<(usize, usize)> {
        vec![(q, q); self.letters.len()]
    }

    fn column(&self, symbol: &str) -> usize {
        self.letters
            .iter()
            .position(|l| l == symbol)
            .expect("symbol is in the target alphabet")
    }

    fn finish(self, initial: usize) -> Result<DetTreeAutomaton, BuildError> {
        Ok(DetTreeAutomaton::from_parts(
            self.letters,
            self.states,
            initial,
            self.rows,
        )?)
    }
}

/// Picks the lowest depth tag whose reserved letter names are all unused by
/// the operands.
fn fresh_letters(op: ComposeOp, operands: &[DetTreeAutomaton]) -> Vec<String> {
    let taken: BTreeSet<&str> = operands
        .iter()
        .flat_map(|o| o.letters().map(|a| o.letter_symbol(a)))
        .collect();
    for depth in 0.. {
        let candidates: Vec<String> = match op {
            ComposeOp::Or | ComposeOp::Arrow => {
                vec![format!("_a{depth}"), format!("_b{depth}")]
            }
            ComposeOp::And => vec![format!("_a{depth}")],
            ComposeOp::Oplus => vec![format!("_b{depth}")],
            ComposeOp::Krep(w) => (w.iota()..=w.kappa())
                .map(|j| format!("_a{depth}_{j}"))
                .chain(std::iter::once(format!("_b{depth}")))
                .collect(),
        };
        if candidates.iter().all(|c| !taken.contains(c.as_str())) {
            return candidates;
        }
    }
    unreachable!("some depth tag is always free")
}

/// Combines the operand automata with the given operation. The operands are
/// first extended to the union alphabet plus the operation's fresh letters;
/// the extension keeps empty sublanguages empty, which the degree of the
/// result depends on.
pub fn compose_automata(
    op: ComposeOp,
    operands: &[DetTreeAutomaton],
) -> Result<DetTreeAutomaton, BuildError> {
    let expected = match op {
        ComposeOp::Krep(w) => 2 + (w.kappa() - w.iota()) as usize,
        _ => 2,
    };
    if operands.len() != expected {
        return Err(BuildError::Arity {
            op: op.label(),
            expected,
            got: operands.len(),
        });
    }

    let fresh = fresh_letters(op, operands);
    let mut letters: Vec<String> = Vec::new();
    for o in operands {
        for a in o.letters() {
            let s = o.letter_symbol(a);
            if !letters.iter().any(|l| l == s) {
                letters.push(s.to_string());
            }
        }
    }
    letters.extend(fresh.iter().cloned());

    let mut copies = Vec::with_capacity(operands.len());
    for o in operands {
        let mut c = o.clone();
        for l in &letters {
            if c.letter_by_symbol(l).is_none() {
                c = c.extend_alphabet(l)?;
            }
        }
        copies.push(c);
    }
    let empty = |c: &DetTreeAutomaton| !productive_states(c).contains(&c.initial());

    match op {
        ComposeOp::Or => {
            let mut asm = Assembler::new(letters);
            let q0 = asm.add_state("q0", 0);
            let both_empty = empty(&copies[0]) && empty(&copies[1]);
            let sink = if both_empty {
                asm.add_state("bot", 1)
            } else {
                asm.add_state("top", 0)
            };
            let a_init = asm.add_copy(&copies[0], "p0_") + copies[0].initial().index();
            let b_init = asm.add_copy(&copies[1], "p1_") + copies[1].initial().index();
            let row = asm
                .letters
                .iter()
                .map(|l| {
                    if *l == fresh[0] {
                        (a_init, sink)
                    } else if *l == fresh[1] {
                        (b_init, sink)
                    } else {
                        (sink, sink)
                    }
                })
                .collect();
            asm.rows[q0] = row;
            asm.rows[sink] = asm.self_loop_row(sink);
            asm.finish(q0)
        }
        ComposeOp::And => {
            let mut asm = Assembler::new(letters);
            let q0 = asm.add_state("q0", 0);
            let either_empty = empty(&copies[0]) || empty(&copies[1]);
            let sink = if either_empty {
                asm.add_state("bot", 1)
            } else {
                asm.add_state("top", 0)
            };
            let a_init = asm.add_copy(&copies[0], "p0_") + copies[0].initial().index();
            let b_init = asm.add_copy(&copies[1], "p1_") + copies[1].initial().index();
            let row = asm
                .letters
                .iter()
                .map(|l| {
                    if *l == fresh[0] {
                        (a_init, b_init)
                    } else {
                        (sink, sink)
                    }
                })
                .collect();
            asm.rows[q0] = row;
            asm.rows[sink] = asm.self_loop_row(sink);
            asm.finish(q0)
        }
        ComposeOp::Arrow => {
            let mut asm = Assembler::new(letters);
            let q0 = asm.add_state("q0", 1);
            let top = asm.add_state("top", 0);
            let bot = asm.add_state("bot", 1);
            let a_init = asm.add_copy(&copies[0], "p0_") + copies[0].initial().index();
            let b_init = asm.add_copy(&copies[1], "p1_") + copies[1].initial().index();
            let row = asm
                .letters
                .iter()
                .map(|l| {
                    if *l == fresh[0] {
                        (a_init, top)
                    } else if *l == fresh[1] {
                        (q0, b_init)
                    } else {
                        (bot, bot)
                    }
                })
                .collect();
            asm.rows[q0] = row;
            asm.rows[top] = asm.self_loop_row(top);
            asm.rows[bot] = asm.self_loop_row(bot);
            asm.finish(q0)
        }
        ComposeOp::Oplus => {
            let left = leftmost_states(&copies[0]);
            if left.is_empty() {
                return Err(BuildError::NoLeftmostState);
            }
            let mut asm = Assembler::new(letters);
            let top = asm.add_state("top", 0);
            let a_off = asm.add_copy(&copies[0], "p0_");
            let b_init = asm.add_copy(&copies[1], "p1_") + copies[1].initial().index();
            let col = asm.column(&fresh[0]);
            // The switch must stay available whatever the left operand has
            // done so far, so its right child is accepting outright even
            // where the extension routed the letter to a rejecting sink.
            for q in left {
                asm.rows[a_off + q.index()][col] = (b_init, top);
            }
            asm.rows[top] = asm.self_loop_row(top);
            asm.finish(a_off + copies[0].initial().index())
        }
        ComposeOp::Krep(w) => {
            let mut asm = Assembler::new(letters);
            let heads: Vec<usize> = (w.iota()..=w.kappa())
                .map(|j| asm.add_state(&format!("f{j}"), j))
                .collect();
            let top = asm.add_state("top", 0);
            let base_init = asm.add_copy(&copies[0], "p0_") + copies[0].initial().index();
            let child_inits: Vec<usize> = copies[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| asm.add_copy(c, &format!("p{}_", i + 1)) + c.initial().index())
                .collect();
            let spawn_cols: Vec<usize> = fresh[..fresh.len() - 1]
                .iter()
                .map(|l| asm.column(l))
                .collect();
            let escape_col = asm.column(&fresh[fresh.len() - 1]);
            for (i, &head) in heads.iter().enumerate() {
                let mut row: Vec<(usize, usize)> =
                    asm.letters.iter().map(|_| (top, top)).collect();
                if i == 0 {
                    for (m, &c) in spawn_cols.iter().enumerate() {
                        row[c] = (heads[m], child_inits[m]);
                    }
                    row[escape_col] = (base_init, top);
                } else {
                    row[spawn_cols[i]] = (heads[0], top);
                }
                asm.rows[head] = row;
            }
            asm.rows[top] = asm.self_loop_row(top);
            asm.finish(heads[0])
        }
    }
}

/// The flower automaton on the given window: a head loop of the window's
/// bottom rank with one petal per higher rank, each petal returning to the
/// head through its own letter.
pub fn build_flower(index: Index) -> DetTreeAutomaton {
    let (iota, kappa) = (index.iota(), index.kappa());
    let letters: Vec<String> = (iota..=kappa).map(|j| format!("a{j}")).collect();
    let mut states: Vec<(String, u32)> = (iota..=kappa).map(|j| (format!("q{j}"), j)).collect();
    let top = states.len();
    states.push(("top".to_string(), 0));
    let mut delta = Vec::new();
    for j in 0..=(kappa - iota) as usize {
        let row = (0..=(kappa - iota) as usize)
            .map(|m| {
                if j == 0 {
                    (m, top)
                } else if m == j {
                    (0, top)
                } else {
                    (top, top)
                }
            })
            .collect();
        delta.push(row);
    }
    delta.push(vec![(top, top); top]);
    DetTreeAutomaton::from_parts(letters, states, 0, delta)
        .expect("flower tables are well formed")
}

/// The weak counterpart of a flower: an alternating chain of single-rank
/// loops glued by sequential switches, starting with the parity of the
/// window's bottom rank.
pub fn build_weak_flower(index: Index) -> DetTreeAutomaton {
    let unit = |r: u32| build_flower(Index::new(r % 2, r % 2).expect("unit window"));
    let mut acc = unit(index.iota());
    for r in (index.iota() + 1)..=index.kappa() {
        acc = compose_automata(ComposeOp::Oplus, &[acc, unit(r)])
            .expect("loop chains always have a leftmost head");
    }
    acc
}

fn window(iota: u32, kappa: u32) -> Index {
    Index::new(iota, kappa).expect("window is well formed")
}

fn unit_c() -> DetTreeAutomaton {
    build_flower(window(0, 0))
}

fn build_simple(simple: &SimpleName) -> Result<DetTreeAutomaton, BuildError> {
    let oplus_unit = |acc| compose_automata(ComposeOp::Oplus, &[unit_c(), acc]);
    Ok(match *simple {
        SimpleName::UnitC => unit_c(),
        SimpleName::UnitD => build_flower(window(1, 1)),
        SimpleName::UnitE => compose_automata(
            ComposeOp::Or,
            &[unit_c(), build_flower(window(1, 1))],
        )?,
        SimpleName::FlowerC(k) => build_flower(window(0, k + 1)),
        SimpleName::FlowerD(k) => build_flower(window(1, k + 2)),
        SimpleName::FlowerE(k) => compose_automata(
            ComposeOp::Or,
            &[build_flower(window(0, k + 1)), build_flower(window(1, k + 2))],
        )?,
        SimpleName::BranchLow(k) => {
            let three = CanonicalName::new(NameLetter::C, Ordinal::nat(3))?;
            let mut acc = compose_automata(ComposeOp::Arrow, &[unit_c(), build(&three)?])?;
            for _ in 1..k {
                acc = compose_automata(ComposeOp::Arrow, &[unit_c(), oplus_unit(acc)?])?;
            }
            acc
        }
        SimpleName::BranchHigh(k) => {
            let mut acc =
                compose_automata(ComposeOp::Arrow, &[unit_c(), build_flower(window(0, 2))])?;
            for _ in 0..k {
                acc = compose_automata(ComposeOp::Arrow, &[unit_c(), oplus_unit(acc)?])?;
            }
            acc
        }
    })
}

/// Builds an automaton whose language has exactly the degree the name
/// denotes. Names below the top segment decompose into simple components
/// chained by sequential switches; the top three degrees get their own
/// replication patterns, the highest one a fixed three-state table.
pub fn build(name: &CanonicalName) -> Result<DetTreeAutomaton, BuildError> {
    if *name.ordinal() == Ordinal::top(2) {
        let letters = vec!["a".to_string(), "b".to_string()];
        let states = vec![
            ("q0".to_string(), 0),
            ("q1".to_string(), 1),
            ("top".to_string(), 0),
        ];
        let delta = vec![
            vec![(0, 1), (2, 2)],
            vec![(0, 2), (2, 2)],
            vec![(2, 2), (2, 2)],
        ];
        return Ok(DetTreeAutomaton::from_parts(letters, states, 0, delta)?);
    }
    if *name.ordinal() == Ordinal::top(1) {
        return compose_automata(
            ComposeOp::Krep(window(0, 0)),
            &[unit_c(), build_flower(window(0, 1))],
        );
    }
    if *name.ordinal() == Ordinal::top(0) {
        return compose_automata(
            ComposeOp::Krep(window(0, 1)),
            &[unit_c(), unit_c(), build_flower(window(0, 2))],
        );
    }
    let comps = components(name)?;
    let mut acc = build_simple(&comps[0])?;
    for simple in &comps[1..] {
        acc = compose_automata(ComposeOp::Oplus, &[acc, build_simple(simple)?])?;
    }
    Ok(acc)
}
