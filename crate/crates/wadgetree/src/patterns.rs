//! Structural pattern analysis on normalized automata.
//!
//! All the classification machinery reads the cycle structure of an
//! automaton's transition graph. The central notions:
//!
//! - A *loop* is any closed walk; its *top* is the highest rank on it, and
//!   the loop is accepting or rejecting by the top's parity.
//! - A *flower* with index `(iota, kappa)` is a family of loops through one
//!   common state whose tops strictly increase and alternate parity,
//!   starting at parity `iota`. Flowers calibrate the Mostowski-Rabin index.
//! - A *weak flower* relaxes "common state" to "each loop reaches the
//!   next"; weak flowers calibrate the weak index. When one strongly
//!   connected component carries loops of both parities, weak flowers of
//!   every index exist at once ([`WeakFlowerMax::Saturated`]).
//! - A *split* is a pair of returning loops leaving one (state, letter)
//!   pair in the two different directions whose tops have different parity,
//!   the higher being odd; it marks the jump past the Borel hierarchy.
//! - A state is *replicated* by a loop when a branch forking off that loop
//!   (same state, same letter, other direction) can reach it. Replication
//!   by accepting loops drives the transfinite levels.
//!
//! The all-rejecting sink participates like any other state: its self-loop
//! is a rejecting loop, which is exactly what distinguishes, say, a closed
//! language (an accepting loop with a dead branch) from a clopen one.
//!
//! Everything here is a pure function of the transition graph. The
//! detectors are exact, not heuristic: each one is cross-checked in the
//! test suite against independent brute-force enumerations.

use std::collections::BTreeSet;

use crate::automaton::{DetTreeAutomaton, Edge, Letter, StateId};
use crate::ordinal::Index;
use crate::productive::NormalizedAutomaton;

/// One strongly connected component of the transition graph.
#[derive(Clone, Debug)]
pub struct SccInfo {
    /// Member states in handle order.
    pub members: Vec<StateId>,
    /// Whether the component contains any cycle (more than one state, or a
    /// self-loop).
    pub has_cycle: bool,
    pub has_accepting_loop: bool,
    pub has_rejecting_loop: bool,
    /// Some transition keeps the source and both targets inside the
    /// component.
    pub has_internal_transition: bool,
    /// Components directly reachable by one transition branch.
    pub successors: Vec<usize>,
}

/// SCC decomposition in topological order (edges go from lower to higher
/// component numbers).
#[derive(Clone, Debug)]
pub struct Condensation {
    scc_of: Vec<usize>,
    pub components: Vec<SccInfo>,
    /// The component holding the all-rejecting sink, when there is one.
    pub bottom_component: Option<usize>,
}

impl Condensation {
    pub fn component_of(&self, q: StateId) -> usize {
        self.scc_of[q.index()]
    }
}

/// Successor states of `q`, without duplicates.
fn successor_states(auto: &DetTreeAutomaton, q: StateId) -> Vec<StateId> {
    let mut out = Vec::new();
    for a in auto.letters() {
        let (l, r) = auto.successors(q, a);
        for t in [l, r] {
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

/// Computes strongly connected components of the transition graph, plus the
/// per-component loop and transition flags.
pub fn condensation(normal: &NormalizedAutomaton) -> Condensation {
    let auto = &normal.automaton;
    let n = auto.num_states();

    // Plain recursive Tarjan; the automata this crate analyzes are small.
    struct Tarjan<'a> {
        auto: &'a DetTreeAutomaton,
        index: Vec<Option<u32>>,
        low: Vec<u32>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: u32,
        components: Vec<Vec<StateId>>,
    }
    impl Tarjan<'_> {
        fn visit(&mut self, v: usize) {
            self.index[v] = Some(self.next);
            self.low[v] = self.next;
            self.next += 1;
            self.stack.push(v);
            self.on_stack[v] = true;
            for t in successor_states(self.auto, StateId(v as u32)) {
                let w = t.index();
                if self.index[w].is_none() {
                    self.visit(w);
                    self.low[v] = self.low[v].min(self.low[w]);
                } else if self.on_stack[w] {
                    self.low[v] = self.low[v].min(self.index[w].unwrap());
                }
            }
            if self.low[v] == self.index[v].unwrap() {
                let mut members = Vec::new();
                loop {
                    let w = self.stack.pop().unwrap();
                    self.on_stack[w] = false;
                    members.push(StateId(w as u32));
                    if w == v {
                        break;
                    }
                }
                members.sort();
                self.components.push(members);
            }
        }
    }

    let mut tarjan = Tarjan {
        auto,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        components: Vec::new(),
    };
    for v in 0..n {
        if tarjan.index[v].is_none() {
            tarjan.visit(v);
        }
    }
    // Tarjan emits a component only after everything it reaches, so
    // reversing gives topological order.
    tarjan.components.reverse();

    let mut scc_of = vec![0; n];
    for (i, members) in tarjan.components.iter().enumerate() {
        for &q in members {
            scc_of[q.index()] = i;
        }
    }
    let bottom_component = normal.bottom.map(|b| scc_of[b.index()]);
    let components = tarjan
        .components
        .into_iter()
        .enumerate()
        .map(|(i, members)| {
            let has_cycle = members.len() > 1
                || members
                    .iter()
                    .any(|&q| successor_states(auto, q).contains(&q));
            let tops = loop_tops(auto, &members);
            let has_internal_transition = members.iter().any(|&q| {
                auto.letters().any(|a| {
                    let (l, r) = auto.successors(q, a);
                    scc_of[l.index()] == i && scc_of[r.index()] == i
                })
            });
            let mut successors = Vec::new();
            for &q in &members {
                for t in successor_states(auto, q) {
                    let j = scc_of[t.index()];
                    if j != i && !successors.contains(&j) {
                        successors.push(j);
                    }
                }
            }
            successors.sort_unstable();
            SccInfo {
                members,
                has_cycle,
                has_accepting_loop: tops.iter().any(|r| r % 2 == 0),
                has_rejecting_loop: tops.iter().any(|r| r % 2 == 1),
                has_internal_transition,
                successors,
            }
        })
        .collect();
    Condensation { scc_of, components, bottom_component }
}

/// States of `within` reachable from `starts` (zero or more steps) using
/// only states of rank at most `max_rank`; a start must itself qualify.
fn reach_within(
    auto: &DetTreeAutomaton,
    within: &[bool],
    max_rank: u32,
    starts: &[StateId],
    backward: bool,
) -> Vec<bool> {
    let n = auto.num_states();
    let allowed = |q: StateId| within[q.index()] && auto.rank(q) <= max_rank;
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in auto.states() {
        if !allowed(q) {
            continue;
        }
        for a in auto.letters() {
            let (l, r) = auto.successors(q, a);
            for t in [l, r] {
                if allowed(t) {
                    if backward {
                        edges[t.index()].push(q.index());
                    } else {
                        edges[q.index()].push(t.index());
                    }
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    for &s in starts {
        if allowed(s) && !seen[s.index()] {
            seen[s.index()] = true;
            stack.push(s.index());
        }
    }
    while let Some(v) = stack.pop() {
        for &w in &edges[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

fn member_mask(n: usize, members: &[StateId]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &q in members {
        mask[q.index()] = true;
    }
    mask
}

/// The set of tops of loops lying inside the given component: `r` is
/// achieved iff the subgraph restricted to ranks `<= r` has a cycle through
/// a rank-`r` member.
fn loop_tops(auto: &DetTreeAutomaton, members: &[StateId]) -> BTreeSet<u32> {
    let mask = member_mask(auto.num_states(), members);
    let mut out = BTreeSet::new();
    let ranks: BTreeSet<u32> = members.iter().map(|&q| auto.rank(q)).collect();
    for &r in &ranks {
        let achieved = members.iter().any(|&q| {
            if auto.rank(q) != r {
                return false;
            }
            // A cycle through q within ranks <= r: q reachable from its own
            // successors inside the restriction.
            let starts = successor_states(auto, q);
            reach_within(auto, &mask, r, &starts, false)[q.index()]
        });
        if achieved {
            out.insert(r);
        }
    }
    out
}

/// Tops of loops through state `q` within its component: `r` is in the
/// profile iff some closed walk through `q`, entirely inside the component
/// and below rank `r`, visits a rank-`r` state.
pub fn state_loop_profile(
    normal: &NormalizedAutomaton,
    cond: &Condensation,
    q: StateId,
) -> BTreeSet<u32> {
    let auto = &normal.automaton;
    let mut out = BTreeSet::new();
    let members = &cond.components[cond.component_of(q)].members;
    let mask = member_mask(auto.num_states(), members);
    let ranks: BTreeSet<u32> = members.iter().map(|&p| auto.rank(p)).collect();
    for &r in ranks.iter().filter(|&&r| r >= auto.rank(q)) {
        // Forward set: reachable from q in at least one step.
        let starts = successor_states(auto, q);
        let fwd = reach_within(auto, &mask, r, &starts, false);
        let bwd = reach_within(auto, &mask, r, &[q], true);
        if members
            .iter()
            .any(|&u| auto.rank(u) == r && fwd[u.index()] && bwd[u.index()])
        {
            out.insert(r);
        }
    }
    out
}

/// Tops of loops that start with the given transition branch and return to
/// its source, inside the source's component.
pub fn edge_loop_profile(
    normal: &NormalizedAutomaton,
    cond: &Condensation,
    edge: Edge,
) -> BTreeSet<u32> {
    let auto = &normal.automaton;
    let (l, r) = auto.successors(edge.source, edge.letter);
    let target = if edge.direction == 0 { l } else { r };
    debug_assert_eq!(target, edge.target, "edge inconsistent with the automaton");
    let mut out = BTreeSet::new();
    let c = cond.component_of(edge.source);
    if cond.component_of(target) != c {
        return out;
    }
    let members = &cond.components[c].members;
    let mask = member_mask(auto.num_states(), members);
    let ranks: BTreeSet<u32> = members.iter().map(|&p| auto.rank(p)).collect();
    let floor = auto.rank(edge.source).max(auto.rank(target));
    for &rank in ranks.iter().filter(|&&rank| rank >= floor) {
        let fwd = reach_within(auto, &mask, rank, &[target], false);
        let bwd = reach_within(auto, &mask, rank, &[edge.source], true);
        if members
            .iter()
            .any(|&u| auto.rank(u) == rank && fwd[u.index()] && bwd[u.index()])
        {
            out.insert(rank);
        }
    }
    out
}

/// Length of the longest strictly increasing, parity-alternating
/// subsequence of `tops` that starts with the given parity.
fn longest_alternating(tops: &BTreeSet<u32>, start_even: bool) -> u32 {
    // best[e] = longest chain of the requested start whose last top has
    // parity e; tops iterate in increasing order.
    let mut best = [0u32; 2];
    for &r in tops {
        let e = (r % 2) as usize;
        let extended = if best[1 - e] > 0 {
            best[1 - e] + 1
        } else if (r % 2 == 0) == start_even {
            1
        } else {
            0
        };
        best[e] = best[e].max(extended);
    }
    best[0].max(best[1])
}

/// Strongly connected components, restricted to members of rank strictly
/// below `strictly_below`, that contain a cycle.
fn nontrivial_subcomponents(
    auto: &DetTreeAutomaton,
    members: &[StateId],
    strictly_below: u32,
) -> Vec<Vec<StateId>> {
    let keep: Vec<StateId> = members
        .iter()
        .copied()
        .filter(|&q| auto.rank(q) < strictly_below)
        .collect();
    if keep.is_empty() {
        return Vec::new();
    }
    let mask = member_mask(auto.num_states(), &keep);
    // Kosaraju-style double sweep, iterative, local to this subgraph.
    let succ = |q: StateId| -> Vec<StateId> {
        let mut out = Vec::new();
        for a in auto.letters() {
            let (l, r) = auto.successors(q, a);
            for t in [l, r] {
                if mask[t.index()] && !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    };
    let mut order = Vec::new();
    let mut seen = vec![false; auto.num_states()];
    for &root in &keep {
        if seen[root.index()] {
            continue;
        }
        // Iterative post-order.
        let mut stack = vec![(root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                order.push(v);
                continue;
            }
            if seen[v.index()] {
                continue;
            }
            seen[v.index()] = true;
            stack.push((v, true));
            for t in succ(v) {
                if !seen[t.index()] {
                    stack.push((t, false));
                }
            }
        }
    }
    let mut pred: Vec<Vec<StateId>> = vec![Vec::new(); auto.num_states()];
    for &q in &keep {
        for t in succ(q) {
            pred[t.index()].push(q);
        }
    }
    let mut assigned = vec![false; auto.num_states()];
    let mut out = Vec::new();
    for &root in order.iter().rev() {
        if assigned[root.index()] {
            continue;
        }
        let mut component = Vec::new();
        let mut stack = vec![root];
        assigned[root.index()] = true;
        while let Some(v) = stack.pop() {
            component.push(v);
            for &p in &pred[v.index()] {
                if !assigned[p.index()] {
                    assigned[p.index()] = true;
                    stack.push(p);
                }
            }
        }
        component.sort();
        let nontrivial = component.len() > 1 || succ(component[0]).contains(&component[0]);
        if nontrivial {
            out.push(component);
        }
    }
    out
}

/// Maximal lengths of loop chains with a common state inside one strongly
/// connected `members` set, one entry per end parity (index 0 = chains
/// ending in an accepting loop). Computed by stripping: every member lies
/// on a loop topping at the maximal rank, so a chain ending there extends
/// any chain of opposite end parity found after deleting the maximal-rank
/// states.
fn chain_lengths(auto: &DetTreeAutomaton, members: &[StateId]) -> [u32; 2] {
    let m = members.iter().map(|&q| auto.rank(q)).max().unwrap();
    let stripped = nontrivial_subcomponents(auto, members, m);
    let mut inner = [0u32; 2];
    for s in stripped {
        let r = chain_lengths(auto, &s);
        inner[0] = inner[0].max(r[0]);
        inner[1] = inner[1].max(r[1]);
    }
    let p = (m % 2) as usize;
    inner[p] = inner[p].max(1 + inner[1 - p]);
    inner
}

/// Converts per-end-parity chain lengths into per-start-parity spans.
/// A chain of length `len` ending at parity `end` starts at parity
/// `end XOR (len-1)`; dropping its first loop yields a chain of the other
/// start parity and length `len - 1`.
fn lengths_to_spans(lengths: [u32; 2]) -> [Option<u32>; 2] {
    let mut best_len = [0u32; 2];
    for (end, &len) in lengths.iter().enumerate() {
        if len == 0 {
            continue;
        }
        let start = ((end as u32 + len - 1) % 2) as usize;
        best_len[start] = best_len[start].max(len);
        if len > 1 {
            best_len[1 - start] = best_len[1 - start].max(len - 1);
        }
    }
    [
        if best_len[0] > 0 { Some(best_len[0] - 1) } else { None },
        if best_len[1] > 0 { Some(best_len[1] - 1) } else { None },
    ]
}

fn spans_to_max(spans: [Option<u32>; 2]) -> Option<Index> {
    match (spans[0], spans[1]) {
        (None, None) => None,
        (Some(s0), None) => Some(Index::new(0, s0).unwrap()),
        (None, Some(s1)) => Some(Index::new(1, 1 + s1).unwrap()),
        (Some(s0), Some(s1)) => {
            if s1 > s0 {
                Some(Index::new(1, 1 + s1).unwrap())
            } else {
                // On a tie (possible only across different components) the
                // accepting-start orientation is reported.
                Some(Index::new(0, s0).unwrap())
            }
        }
    }
}

fn spans_contain(spans: [Option<u32>; 2], index: Index) -> bool {
    let span = index.span();
    let same = spans[index.iota() as usize];
    let other = spans[1 - index.iota() as usize];
    same.is_some_and(|s| span <= s) || other.is_some_and(|s| span + 1 <= s)
}

/// Maximal flower spans per starting parity (entry 0: flowers starting with
/// an accepting loop), over all components.
pub fn flower_spans(normal: &NormalizedAutomaton, cond: &Condensation) -> [Option<u32>; 2] {
    let auto = &normal.automaton;
    let mut spans = [None, None];
    for info in &cond.components {
        if !info.has_cycle {
            continue;
        }
        let here = lengths_to_spans(chain_lengths(auto, &info.members));
        for i in 0..2 {
            spans[i] = match (spans[i], here[i]) {
                (a, None) => a,
                (None, b) => b,
                (Some(a), Some(b)) => Some(a.max(b)),
            };
        }
    }
    spans
}

/// The maximal index `(iota, kappa)` such that the automaton contains an
/// `(iota, kappa)`-flower, `None` when there are no loops at all.
pub fn max_flower(normal: &NormalizedAutomaton, cond: &Condensation) -> Option<Index> {
    spans_to_max(flower_spans(normal, cond))
}

/// Whether the automaton contains a flower of the exact index (flowers of
/// smaller span, and shifted flowers of the opposite orientation, are
/// contained in larger ones).
pub fn contains_flower(normal: &NormalizedAutomaton, cond: &Condensation, index: Index) -> bool {
    spans_contain(flower_spans(normal, cond), index)
}

/// The maximal flower index realized inside a single condensation component,
/// or `None` if the component carries no cycle at all.
pub fn component_flower(
    normal: &NormalizedAutomaton,
    cond: &Condensation,
    component: usize,
) -> Option<Index> {
    let info = &cond.components[component];
    if !info.has_cycle {
        return None;
    }
    spans_to_max(lengths_to_spans(chain_lengths(
        &normal.automaton,
        &info.members,
    )))
}

/// Result of the weak flower search.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WeakFlowerMax {
    Bounded(Index),
    /// Some component has loops of both parities: weak flowers of every
    /// index exist.
    Saturated,
}

/// Maximal weak-flower chain lengths per end parity via longest-path
/// propagation over the component DAG, or `None` for saturation.
fn weak_chain_lengths(cond: &Condensation) -> Option<[u32; 2]> {
    let k = cond.components.len();
    // ending[c][e]: longest polarity-alternating chain of loops ending with
    // parity e (index 0 = accepting) in component c or anything reaching c.
    let mut ending = vec![[0u32; 2]; k];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, info) in cond.components.iter().enumerate() {
        for &j in &info.successors {
            preds[j].push(i);
        }
    }
    for i in 0..k {
        let info = &cond.components[i];
        if info.has_accepting_loop && info.has_rejecting_loop {
            return None;
        }
        let mut here = [0u32; 2];
        for &p in &preds[i] {
            here[0] = here[0].max(ending[p][0]);
            here[1] = here[1].max(ending[p][1]);
        }
        if info.has_accepting_loop {
            here[0] = here[0].max(1 + here[1]);
        }
        if info.has_rejecting_loop {
            here[1] = here[1].max(1 + here[0]);
        }
        ending[i] = here;
    }
    let mut out = [0u32; 2];
    for e in ending {
        out[0] = out[0].max(e[0]);
        out[1] = out[1].max(e[1]);
    }
    Some(out)
}

/// Per-start-parity maximal weak flower spans, or `None` when saturated.
pub fn weak_flower_spans(cond: &Condensation) -> Option<[Option<u32>; 2]> {
    weak_chain_lengths(cond).map(lengths_to_spans)
}

/// The maximal index of a weak flower, [`WeakFlowerMax::Saturated`] when a
/// single component carries both polarities, `None` when there are no
/// loops at all.
pub fn max_weak_flower(cond: &Condensation) -> Option<WeakFlowerMax> {
    match weak_flower_spans(cond) {
        None => Some(WeakFlowerMax::Saturated),
        Some(spans) => spans_to_max(spans).map(WeakFlowerMax::Bounded),
    }
}

/// Whether the automaton contains a weak flower of the exact index.
pub fn contains_weak_flower(cond: &Condensation, index: Index) -> bool {
    match weak_flower_spans(cond) {
        None => true,
        Some(spans) => spans_contain(spans, index),
    }
}

/// A split: both branches of `(state, letter)` return to `state`, the tops
/// of the two returning loops have different parity, and the higher is odd.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SplitWitness {
    pub state: StateId,
    pub letter: Letter,
    pub left_top: u32,
    pub right_top: u32,
}

/// Finds a split, scanning states, letters, and top pairs in increasing
/// order so the witness is deterministic.
pub fn find_split(normal: &NormalizedAutomaton, cond: &Condensation) -> Option<SplitWitness> {
    let auto = &normal.automaton;
    for q in auto.states() {
        for a in auto.letters() {
            let (l, r) = auto.successors(q, a);
            let left = edge_loop_profile(
                normal,
                cond,
                Edge { source: q, letter: a, direction: 0, target: l },
            );
            if left.is_empty() {
                continue;
            }
            let right = edge_loop_profile(
                normal,
                cond,
                Edge { source: q, letter: a, direction: 1, target: r },
            );
            for &r0 in &left {
                for &r1 in &right {
                    if r0 % 2 != r1 % 2 && r0.max(r1) % 2 == 1 {
                        return Some(SplitWitness {
                            state: q,
                            letter: a,
                            left_top: r0,
                            right_top: r1,
                        });
                    }
                }
            }
        }
    }
    None
}

/// Loop polarity selector for [`replicated_states`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LoopPolarity {
    Accepting,
    Rejecting,
}

/// States replicated by a loop of the requested polarity: some transition
/// branch lies on such a loop and the sibling branch reaches the state.
/// The result is closed under reachability.
pub fn replicated_states(
    normal: &NormalizedAutomaton,
    cond: &Condensation,
    polarity: LoopPolarity,
) -> BTreeSet<StateId> {
    let auto = &normal.automaton;
    let want_even = polarity == LoopPolarity::Accepting;
    let mut seeds = Vec::new();
    for q in auto.states() {
        for a in auto.letters() {
            let (l, r) = auto.successors(q, a);
            for (d, t, sibling) in [(0u8, l, r), (1u8, r, l)] {
                let profile = edge_loop_profile(
                    normal,
                    cond,
                    Edge { source: q, letter: a, direction: d, target: t },
                );
                if profile.iter().any(|&top| (top % 2 == 0) == want_even) {
                    seeds.push(sibling);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    let mut stack = seeds;
    while let Some(q) = stack.pop() {
        if !out.insert(q) {
            continue;
        }
        for a in auto.letters() {
            let (l, r) = auto.successors(q, a);
            stack.push(l);
            stack.push(r);
        }
    }
    out
}

/// Whether the loop profile of `q` admits a strictly increasing,
/// parity-alternating sequence of `length` tops starting with parity even
/// iff `start_even`, all tops above `floor` when given.
fn state_has_chain(
    normal: &NormalizedAutomaton,
    cond: &Condensation,
    q: StateId,
    start_even: bool,
    length: u32,
    floor: Option<u32>,
) -> bool {
    let profile = state_loop_profile(normal, cond, q);
    let tops: BTreeSet<u32> = match floor {
        Some(f) => profile.into_iter().filter(|&r| r > f).collect(),
        None => profile,
    };
    longest_alternating(&tops, start_even) >= length
}

/// Detectors for the three patterns sitting above every Borel class the
/// model can otherwise reach.
///
/// - `admits_top2`: a split exists.
/// - `admits_top1`: some common state of a `(0,1)`-flower is replicated by
///   an accepting loop.
/// - `admits_top0`: some component carrying both loop polarities has a
///   branch forking off one of its loops that reaches a common state of a
///   `(0,2)`-flower.
pub fn detect_top_patterns(
    normal: &NormalizedAutomaton,
    cond: &Condensation,
) -> (bool, bool, bool) {
    let auto = &normal.automaton;
    let admits_top2 = find_split(normal, cond).is_some();

    let acc = replicated_states(normal, cond, LoopPolarity::Accepting);
    let admits_top1 = acc
        .iter()
        .any(|&q| state_has_chain(normal, cond, q, true, 2, None));

    let mut admits_top0 = false;
    'outer: for (i, info) in cond.components.iter().enumerate() {
        if !(info.has_accepting_loop && info.has_rejecting_loop) {
            continue;
        }
        for &q in &info.members {
            for a in auto.letters() {
                let (l, r) = auto.successors(q, a);
                for (d, t, sibling) in [(0u8, l, r), (1u8, r, l)] {
                    if cond.component_of(t) != i {
                        continue;
                    }
                    let profile = edge_loop_profile(
                        normal,
                        cond,
                        Edge { source: q, letter: a, direction: d, target: t },
                    );
                    if profile.is_empty() {
                        continue;
                    }
                    let reach = auto.reachable_from(sibling);
                    let found = auto.states().any(|p| {
                        reach[p.index()] && state_has_chain(normal, cond, p, true, 3, None)
                    });
                    if found {
                        admits_top0 = true;
                        break 'outer;
                    }
                }
            }
        }
    }
    (admits_top0, admits_top1, admits_top2)
}

/// Everything the pattern analysis can say about one automaton.
#[derive(Clone, Debug)]
pub struct PatternReport {
    pub max_flower: Option<Index>,
    pub max_weak_flower: Option<WeakFlowerMax>,
    pub split: Option<SplitWitness>,
    pub acc_replicated: BTreeSet<StateId>,
    pub rej_replicated: BTreeSet<StateId>,
    pub admits_top0: bool,
    pub admits_top1: bool,
    pub admits_top2: bool,
}

pub fn pattern_report(normal: &NormalizedAutomaton) -> PatternReport {
    let cond = condensation(normal);
    let (admits_top0, admits_top1, admits_top2) = detect_top_patterns(normal, &cond);
    PatternReport {
        max_flower: max_flower(normal, &cond),
        max_weak_flower: max_weak_flower(&cond),
        split: find_split(normal, &cond),
        acc_replicated: replicated_states(normal, &cond, LoopPolarity::Accepting),
        rej_replicated: replicated_states(normal, &cond, LoopPolarity::Rejecting),
        admits_top0,
        admits_top1,
        admits_top2,
    }
}

/// Re-ranks every component so that ranks are minimal and aligned: within a
/// component with maximal new rank `n`, every state of new rank `j` lies on
/// a `j`-topped loop belonging to a `(j,n)`-flower. The parity of every
/// loop's top is unchanged, so the language is too.
///
/// The construction strips the maximal-rank layer, recurses on the
/// remaining sub-components, and assigns the layer the component's
/// alternation depth; sub-components whose own top parity matches merge
/// into the layer above, the others sit one rank below it (which can raise
/// a shallow sub-component — hence lifting).
pub fn lift_ranks(normal: &NormalizedAutomaton) -> NormalizedAutomaton {
    let auto = &normal.automaton;
    let n = auto.num_states();
    let mut new_ranks: Vec<u32> = vec![0; n];
    if let Some(b) = normal.bottom {
        new_ranks[b.index()] = 1;
    }

    fn depth(auto: &DetTreeAutomaton, members: &[StateId]) -> u32 {
        let m = members.iter().map(|&q| auto.rank(q)).max().unwrap();
        let parity = m % 2;
        let subs = nontrivial_subcomponents(auto, members, m);
        if subs.is_empty() {
            return parity;
        }
        let d = subs.iter().map(|s| depth(auto, s)).max().unwrap();
        if d % 2 == parity {
            d
        } else {
            d + 1
        }
    }

    fn assign(auto: &DetTreeAutomaton, members: &[StateId], target: u32, out: &mut [u32]) {
        let m = members.iter().map(|&q| auto.rank(q)).max().unwrap();
        debug_assert_eq!(target % 2, m % 2, "layer target must keep the top parity");
        let subs = nontrivial_subcomponents(auto, members, m);
        let mut in_sub = vec![false; auto.num_states()];
        for sub in &subs {
            for &q in sub {
                in_sub[q.index()] = true;
            }
        }
        for &q in members {
            if !in_sub[q.index()] {
                out[q.index()] = target;
            }
        }
        for sub in &subs {
            let sub_parity = depth(auto, sub) % 2;
            let sub_target = if sub_parity == target % 2 { target } else { target - 1 };
            assign(auto, sub, sub_target, out);
        }
    }

    let cond = condensation(normal);
    for info in &cond.components {
        if info.has_cycle {
            assign(auto, &info.members, depth(auto, &info.members), &mut new_ranks);
        }
    }

    let letters: Vec<String> =
        auto.letters().map(|a| auto.letter_symbol(a).to_string()).collect();
    let states: Vec<(String, u32)> = auto
        .states()
        .map(|q| (auto.state_name(q).to_string(), new_ranks[q.index()]))
        .collect();
    let delta: Vec<Vec<(usize, usize)>> = auto
        .states()
        .map(|q| {
            auto.letters()
                .map(|a| {
                    let (l, r) = auto.successors(q, a);
                    (l.index(), r.index())
                })
                .collect()
        })
        .collect();
    let automaton = DetTreeAutomaton::from_parts(letters, states, auto.initial().index(), delta)
        .expect("re-ranking keeps the automaton valid");
    let lifted = NormalizedAutomaton {
        automaton,
        bottom: normal.bottom,
        productive: normal.productive.clone(),
    };
    debug_assert!(
        every_rank_anchors_a_flower(&lifted),
        "lifted ranks must satisfy the flower alignment property"
    );
    lifted
}

/// Checks the alignment property [`lift_ranks`] establishes: in each
/// component with maximal rank `n`, every state of rank `j` lies on a loop
/// of top exactly `j` shared with some state whose profile keeps
/// alternating up to `n`.
pub fn every_rank_anchors_a_flower(normal: &NormalizedAutomaton) -> bool {
    let auto = &normal.automaton;
    let cond = condensation(normal);
    for info in &cond.components {
        if !info.has_cycle {
            continue;
        }
        let top = info.members.iter().map(|&q| auto.rank(q)).max().unwrap();
        let mask = member_mask(auto.num_states(), &info.members);
        for &q in &info.members {
            let j = auto.rank(q);
            // States sharing a loop of top exactly j with q: mutual
            // reachability below j (q itself carries rank j).
            let starts = successor_states(auto, q);
            let fwd = reach_within(auto, &mask, j, &starts, false);
            let bwd = reach_within(auto, &mask, j, &[q], true);
            if !(fwd[q.index()] && bwd[q.index()]) {
                return false;
            }
            let need = top - j;
            if need == 0 {
                continue;
            }
            let ok = info.members.iter().any(|&c| {
                let joint = c == q || (fwd[c.index()] && bwd[c.index()]);
                joint && state_has_chain(normal, &cond, c, j % 2 == 1, need, Some(j))
            });
            if !ok {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::productive::normalize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn normalized(text: &str) -> NormalizedAutomaton {
        normalize(&DetTreeAutomaton::parse(text).unwrap())
    }

    /// A one-component automaton whose loops of ranks `lo..=hi` share the
    /// hub state `q<lo>`; sibling branches fall into an all-accepting sink.
    fn hub_flower(lo: u32, hi: u32) -> NormalizedAutomaton {
        let mut text = String::from("dta v1\nalphabet");
        for j in lo..=hi {
            text.push_str(&format!(" a{j}"));
        }
        text.push_str(&format!("\nstart q{lo}\n"));
        for j in lo..=hi {
            text.push_str(&format!("state q{j} {j}\n"));
        }
        text.push_str("state all 0\n");
        for j in lo..=hi {
            text.push_str(&format!("q{lo} a{j} -> q{j} all\n"));
            if j > lo {
                for i in lo..=hi {
                    if i == j {
                        text.push_str(&format!("q{j} a{i} -> q{lo} all\n"));
                    } else {
                        text.push_str(&format!("q{j} a{i} -> all all\n"));
                    }
                }
            }
            text.push_str(&format!("all a{j} -> all all\n"));
        }
        normalized(&text)
    }

    #[test]
    fn condensation_orders_components_topologically() {
        let normal = normalized(
            "dta v1\nalphabet a b\nstart w0\nstate w0 0\nstate w1 1\nstate w2 0\n\
             w0 a -> w0 w0\nw0 b -> w1 w1\nw1 a -> w1 w1\nw1 b -> w2 w2\n\
             w2 a -> w2 w2\nw2 b -> w2 w2\n",
        );
        let cond = condensation(&normal);
        assert_eq!(cond.components.len(), 3);
        for (i, info) in cond.components.iter().enumerate() {
            assert!(info.has_cycle);
            assert!(info.successors.iter().all(|&j| j > i));
        }
        let first = &cond.components[0];
        assert!(first.has_accepting_loop && !first.has_rejecting_loop);
        let second = &cond.components[1];
        assert!(second.has_rejecting_loop && !second.has_accepting_loop);
    }

    #[test]
    fn hub_flower_profiles_and_max() {
        let normal = hub_flower(1, 4);
        let cond = condensation(&normal);
        let hub = normal.automaton.state_by_name("q1").unwrap();
        let profile = state_loop_profile(&normal, &cond, hub);
        assert_eq!(profile.into_iter().collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert_eq!(max_flower(&normal, &cond), Some(Index::new(1, 4).unwrap()));
        assert!(contains_flower(&normal, &cond, Index::new(1, 4).unwrap()));
        assert!(contains_flower(&normal, &cond, Index::new(0, 2).unwrap()));
        assert!(!contains_flower(&normal, &cond, Index::new(0, 3).unwrap()));
        assert_eq!(max_weak_flower(&cond), Some(WeakFlowerMax::Saturated));
    }

    #[test]
    fn dead_branch_counts_as_a_rejecting_loop_for_weak_flowers() {
        // The rejecting half lives only in the sink the dead branch falls
        // into: an accepting loop with an escape to emptiness is weakly
        // (0,1) but strongly only (0,0).
        let normal = normalized(
            "dta v1\nalphabet a b\nstart p\nstate p 0\nstate q 1\n\
             p a -> p p\np b -> q q\nq a -> q q\nq b -> q q\n",
        );
        assert!(normal.bottom.is_some());
        let cond = condensation(&normal);
        assert_eq!(max_flower(&normal, &cond), Some(Index::new(0, 0).unwrap()));
        assert_eq!(
            max_weak_flower(&cond),
            Some(WeakFlowerMax::Bounded(Index::new(0, 1).unwrap()))
        );
    }

    #[test]
    fn weak_flower_chain_of_three() {
        let normal = normalized(
            "dta v1\nalphabet a b\nstart w0\nstate w0 0\nstate w1 1\nstate w2 0\n\
             w0 a -> w0 w0\nw0 b -> w1 w1\nw1 a -> w1 w1\nw1 b -> w2 w2\n\
             w2 a -> w2 w2\nw2 b -> w2 w2\n",
        );
        let cond = condensation(&normal);
        assert_eq!(
            max_weak_flower(&cond),
            Some(WeakFlowerMax::Bounded(Index::new(0, 2).unwrap()))
        );
        assert!(contains_weak_flower(&cond, Index::new(1, 2).unwrap()));
        assert!(!contains_weak_flower(&cond, Index::new(1, 3).unwrap()));
    }

    #[test]
    fn split_found_in_the_branching_two_loop_automaton() {
        let normal = normalized(
            "dta v1\nalphabet a b\nstart q0\nstate q0 0\nstate q1 1\nstate all 0\n\
             q0 a -> q0 q1\nq0 b -> all all\nq1 a -> q0 all\nq1 b -> all all\n\
             all a -> all all\nall b -> all all\n",
        );
        let cond = condensation(&normal);
        let witness = find_split(&normal, &cond).expect("split expected");
        assert_eq!(normal.automaton.state_name(witness.state), "q0");
        assert_eq!(witness.left_top, 0);
        assert_eq!(witness.right_top, 1);
        let (t0, t1, t2) = detect_top_patterns(&normal, &cond);
        assert!(t2);
        // The same structure also replicates its own two-parity hub.
        assert!(t1);
        assert!(!t0);
    }

    #[test]
    fn flower_has_no_split_or_replication_patterns() {
        let normal = hub_flower(1, 2);
        let cond = condensation(&normal);
        assert_eq!(find_split(&normal, &cond), None);
        // Forks off the loops only reach the all-accepting sink.
        let acc = replicated_states(&normal, &cond, LoopPolarity::Accepting);
        let all = normal.automaton.state_by_name("all").unwrap();
        assert!(acc.iter().all(|&q| q == all));
        assert_eq!(detect_top_patterns(&normal, &cond), (false, false, false));
    }

    #[test]
    fn replication_seeds_and_closure() {
        // q0 loops on a (accepting); the sibling branch of the loop edge
        // enters p, which reaches r. Everything reachable from p counts.
        let normal = normalized(
            "dta v1\nalphabet a b\nstart q0\nstate q0 0\nstate p 1\nstate r 0\n\
             q0 a -> q0 p\nq0 b -> q0 q0\np a -> r r\np b -> r r\n\
             r a -> r r\nr b -> r r\n",
        );
        let cond = condensation(&normal);
        let acc = replicated_states(&normal, &cond, LoopPolarity::Accepting);
        let p = normal.automaton.state_by_name("p").unwrap();
        let r = normal.automaton.state_by_name("r").unwrap();
        let q0 = normal.automaton.state_by_name("q0").unwrap();
        assert!(acc.contains(&p));
        assert!(acc.contains(&r));
        assert!(acc.contains(&q0));
        assert!(replicated_states(&normal, &cond, LoopPolarity::Rejecting).is_empty());
        // Closure under reachability.
        for &q in &acc {
            for a in normal.automaton.letters() {
                let (l, rr) = normal.automaton.successors(q, a);
                assert!(acc.contains(&l) && acc.contains(&rr));
            }
        }
    }

    #[test]
    fn top1_pattern_needs_replicated_two_parity_state() {
        // An accepting self-loop at q0 replicates the flower below; the
        // flower's own forks fall into the accepting sink, so there is no
        // split anywhere.
        let normal = normalized(
            "dta v1\nalphabet a b\nstart q0\nstate q0 0\nstate f0 0\nstate f1 1\nstate all 0\n\
             q0 a -> q0 f0\nq0 b -> all all\n\
             f0 a -> f0 all\nf0 b -> f1 all\n\
             f1 a -> f0 all\nf1 b -> all all\n\
             all a -> all all\nall b -> all all\n",
        );
        let cond = condensation(&normal);
        let (t0, t1, t2) = detect_top_patterns(&normal, &cond);
        assert!(t1);
        assert!(!t2);
        assert!(!t0);
    }

    #[test]
    fn lift_merges_rejecting_two_cycle_to_the_odd_rank() {
        // The re-ranking is purely graph-theoretic, so feed the bare
        // two-cycle directly: its only loop is rejecting, hence one layer.
        let auto = DetTreeAutomaton::from_parts(
            vec!["a".to_string()],
            vec![("q0".to_string(), 0), ("q1".to_string(), 1)],
            0,
            vec![vec![(1, 1)], vec![(0, 0)]],
        )
        .unwrap();
        let normal = NormalizedAutomaton {
            automaton: auto,
            bottom: None,
            productive: [StateId(0), StateId(1)].into_iter().collect(),
        };
        let lifted = lift_ranks(&normal);
        assert_eq!(lifted.automaton.rank(StateId(0)), 1);
        assert_eq!(lifted.automaton.rank(StateId(1)), 1);
    }

    #[test]
    fn lift_keeps_an_aligned_flower_unchanged() {
        let normal = hub_flower(1, 3);
        let lifted = lift_ranks(&normal);
        for q in normal.automaton.states() {
            assert_eq!(normal.automaton.rank(q), lifted.automaton.rank(q));
        }
    }

    #[test]
    fn lift_raises_a_shallow_even_loop_under_an_odd_layer() {
        // x (rank 3) bridges a three-deep alternation (c0/c1/c2) and a
        // plain even self-loop y (rank 0). The deep chain fixes the layer at
        // 3, so y must rise to rank 2 to sit right below x's layer.
        let normal = normalized(
            "dta v1\nalphabet a b c d\nstart x\n\
             state x 3\nstate c0 0\nstate c1 1\nstate c2 2\nstate y 0\n\
             x a -> c0 c0\nx b -> y y\nx c -> x x\nx d -> x x\n\
             c0 a -> c0 c0\nc0 b -> c1 c1\nc0 c -> x x\nc0 d -> c0 c0\n\
             c1 a -> c0 c0\nc1 b -> c1 c1\nc1 c -> c1 c1\nc1 d -> c2 c2\n\
             c2 a -> c0 c0\nc2 b -> c2 c2\nc2 c -> c2 c2\nc2 d -> c2 c2\n\
             y a -> y y\ny b -> x x\ny c -> y y\ny d -> y y\n",
        );
        assert_eq!(normal.automaton.num_states(), 5);
        let lifted = lift_ranks(&normal);
        let rank =
            |name: &str| lifted.automaton.rank(lifted.automaton.state_by_name(name).unwrap());
        assert_eq!(rank("x"), 3);
        assert_eq!(rank("c0"), 0);
        assert_eq!(rank("c1"), 1);
        assert_eq!(rank("c2"), 2);
        assert_eq!(rank("y"), 2);
        assert!(every_rank_anchors_a_flower(&lifted));
    }

    #[test]
    fn lift_merges_matching_parity_layers() {
        // An odd layer directly over an odd-topped sub-chain compresses:
        // the bridging rank-3 state joins the rank-1 layer.
        let normal = normalized(
            "dta v1\nalphabet a b c\nstart x\nstate x 3\nstate c0 0\nstate c1 1\nstate y 2\n\
             x a -> c0 c0\nx b -> y y\nx c -> x x\n\
             c0 a -> c0 c0\nc0 b -> c1 c1\nc0 c -> x x\n\
             c1 a -> c0 c0\nc1 b -> c1 c1\nc1 c -> c1 c1\n\
             y a -> y y\ny b -> x x\ny c -> y y\n",
        );
        let lifted = lift_ranks(&normal);
        let rank =
            |name: &str| lifted.automaton.rank(lifted.automaton.state_by_name(name).unwrap());
        assert_eq!(rank("x"), 1);
        assert_eq!(rank("c0"), 0);
        assert_eq!(rank("c1"), 1);
        assert_eq!(rank("y"), 0);
    }

    #[test]
    fn lift_collapses_inflated_single_loop() {
        let normal = normalized("dta v1\nalphabet a\nstart s\nstate s 4\ns a -> s s\n");
        let lifted = lift_ranks(&normal);
        let s = lifted.automaton.state_by_name("s").unwrap();
        assert_eq!(lifted.automaton.rank(s), 0);
    }

    #[test]
    fn lift_is_idempotent_and_preserves_cycle_parity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x11f7);
        for _ in 0..250 {
            let auto = random_normalized(&mut rng);
            let lifted = lift_ranks(&auto);
            let again = lift_ranks(&lifted);
            assert_eq!(lifted.automaton, again.automaton);
            // Every simple cycle keeps its top parity.
            for cycle in simple_cycles(&auto) {
                let before = cycle.iter().map(|&q| auto.automaton.rank(q)).max().unwrap();
                let after = cycle.iter().map(|&q| lifted.automaton.rank(q)).max().unwrap();
                assert_eq!(before % 2, after % 2, "cycle {cycle:?}");
            }
        }
    }

    // ----- brute-force oracles -----

    /// All simple cycles, as visiting orders.
    fn simple_cycles(normal: &NormalizedAutomaton) -> Vec<Vec<StateId>> {
        let auto = &normal.automaton;
        let mut cycles = Vec::new();
        let mut path: Vec<StateId> = Vec::new();
        fn dfs(
            auto: &DetTreeAutomaton,
            start: StateId,
            current: StateId,
            path: &mut Vec<StateId>,
            cycles: &mut Vec<Vec<StateId>>,
        ) {
            for t in successor_states(auto, current) {
                if t == start {
                    cycles.push(path.clone());
                } else if t > start && !path.contains(&t) {
                    path.push(t);
                    dfs(auto, start, t, path, cycles);
                    path.pop();
                }
            }
        }
        for start in auto.states() {
            path.clear();
            path.push(start);
            dfs(auto, start, start, &mut path, &mut cycles);
        }
        cycles
    }

    /// Closed-walk reachability by Floyd-Warshall saturation per rank
    /// threshold, fully independent of the production search code.
    struct WalkOracle {
        /// reach[r][x][y]: a walk x -> y of length >= 1 with all ranks <= r
        /// (including both endpoints).
        reach: Vec<Vec<Vec<bool>>>,
        max_rank: u32,
    }

    fn walk_oracle(normal: &NormalizedAutomaton) -> WalkOracle {
        let auto = &normal.automaton;
        let n = auto.num_states();
        let max_rank = auto.states().map(|q| auto.rank(q)).max().unwrap_or(0);
        let mut reach = Vec::new();
        for r in 0..=max_rank {
            let mut m = vec![vec![false; n]; n];
            for q in auto.states() {
                if auto.rank(q) > r {
                    continue;
                }
                for t in successor_states(auto, q) {
                    if auto.rank(t) <= r {
                        m[q.index()][t.index()] = true;
                    }
                }
            }
            for k in 0..n {
                for i in 0..n {
                    if m[i][k] {
                        for j in 0..n {
                            if m[k][j] {
                                m[i][j] = true;
                            }
                        }
                    }
                }
            }
            reach.push(m);
        }
        WalkOracle { reach, max_rank }
    }

    impl WalkOracle {
        fn walk(&self, r: u32, x: StateId, y: StateId) -> bool {
            self.reach[r as usize][x.index()][y.index()]
        }
    }

    fn oracle_state_profile(
        normal: &NormalizedAutomaton,
        oracle: &WalkOracle,
        q: StateId,
    ) -> BTreeSet<u32> {
        let auto = &normal.automaton;
        let mut out = BTreeSet::new();
        for r in auto.rank(q)..=oracle.max_rank {
            let hit = auto.states().any(|u| {
                auto.rank(u) == r
                    && if u == q {
                        oracle.walk(r, q, q)
                    } else {
                        oracle.walk(r, q, u) && oracle.walk(r, u, q)
                    }
            });
            if hit {
                out.insert(r);
            }
        }
        out
    }

    fn oracle_edge_profile(
        normal: &NormalizedAutomaton,
        oracle: &WalkOracle,
        q: StateId,
        a: Letter,
        d: u8,
    ) -> BTreeSet<u32> {
        let auto = &normal.automaton;
        let (l, rr) = auto.successors(q, a);
        let t = if d == 0 { l } else { rr };
        let mut out = BTreeSet::new();
        for r in auto.rank(q).max(auto.rank(t))..=oracle.max_rank {
            let returns = t == q || oracle.walk(r, t, q);
            if !returns {
                continue;
            }
            let hit = auto.states().any(|u| {
                auto.rank(u) == r
                    && (u == t || oracle.walk(r, t, u))
                    && (u == q || oracle.walk(r, u, q))
            });
            if hit {
                out.insert(r);
            }
        }
        out
    }

    fn oracle_max_flower(normal: &NormalizedAutomaton, oracle: &WalkOracle) -> Option<Index> {
        let mut spans = [None, None];
        for q in normal.automaton.states() {
            let profile = oracle_state_profile(normal, oracle, q);
            for (i, start_even) in [(0usize, true), (1, false)] {
                let len = longest_alternating(&profile, start_even);
                if len > 0 {
                    let span = len - 1;
                    spans[i] = Some(spans[i].map_or(span, |s: u32| s.max(span)));
                }
            }
        }
        spans_to_max(spans)
    }

    fn oracle_weak_flower(
        normal: &NormalizedAutomaton,
        oracle: &WalkOracle,
    ) -> Option<WeakFlowerMax> {
        // Polarity per simple cycle, reachability between cycles, longest
        // alternating path; saturation when opposite polarities are
        // mutually reachable.
        let auto = &normal.automaton;
        let cycles = simple_cycles(normal);
        if cycles.is_empty() {
            return None;
        }
        let tops: Vec<u32> = cycles
            .iter()
            .map(|c| c.iter().map(|&q| auto.rank(q)).max().unwrap())
            .collect();
        let m = cycles.len();
        let reaches = |i: usize, j: usize| -> bool {
            cycles[i].iter().any(|&x| {
                cycles[j]
                    .iter()
                    .any(|&y| x == y || oracle.walk(oracle.max_rank, x, y))
            })
        };
        for i in 0..m {
            for j in 0..m {
                if tops[i] % 2 != tops[j] % 2 && reaches(i, j) && reaches(j, i) {
                    return Some(WeakFlowerMax::Saturated);
                }
            }
        }
        // Longest alternating chain by memoized DFS; without saturation the
        // alternating-edge graph is acyclic, so memoization is sound.
        fn longest(i: usize, tops: &[u32], adj: &[Vec<usize>], memo: &mut [Option<u32>]) -> u32 {
            if let Some(v) = memo[i] {
                return v;
            }
            let mut best = 1;
            for &j in &adj[i] {
                if tops[j] % 2 != tops[i] % 2 {
                    best = best.max(1 + longest(j, tops, adj, memo));
                }
            }
            memo[i] = Some(best);
            best
        }
        let adj: Vec<Vec<usize>> = (0..m)
            .map(|i| (0..m).filter(|&j| j != i && reaches(i, j)).collect())
            .collect();
        let mut memo = vec![None; m];
        let mut lengths = [0u32; 2];
        for i in 0..m {
            let len = longest(i, &tops, &adj, &mut memo);
            let start = tops[i] % 2;
            let end = ((start + len - 1) % 2) as usize;
            lengths[end] = lengths[end].max(len);
        }
        Some(WeakFlowerMax::Bounded(spans_to_max(lengths_to_spans(lengths))?))
    }

    fn random_normalized(rng: &mut ChaCha8Rng) -> NormalizedAutomaton {
        loop {
            let n = rng.gen_range(1..=7usize);
            let l = rng.gen_range(1..=2usize);
            let letters = (0..l).map(|i| format!("a{i}")).collect();
            let states = (0..n).map(|i| (format!("q{i}"), rng.gen_range(0..=3u32))).collect();
            let delta = (0..n)
                .map(|_| {
                    (0..l)
                        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                        .collect()
                })
                .collect();
            let auto = DetTreeAutomaton::from_parts(letters, states, 0, delta).unwrap();
            let normal = normalize(&auto);
            if !normal.productive.is_empty() {
                return normal;
            }
        }
    }

    #[test]
    fn detectors_agree_with_brute_force_on_random_automata() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xf10e5);
        for round in 0..500 {
            let normal = random_normalized(&mut rng);
            let cond = condensation(&normal);
            let oracle = walk_oracle(&normal);

            assert_eq!(
                max_flower(&normal, &cond),
                oracle_max_flower(&normal, &oracle),
                "round {round}: {}",
                normal.automaton.serialize()
            );
            assert_eq!(
                max_weak_flower(&cond),
                oracle_weak_flower(&normal, &oracle),
                "round {round}: {}",
                normal.automaton.serialize()
            );

            for q in normal.automaton.states() {
                assert_eq!(
                    state_loop_profile(&normal, &cond, q),
                    oracle_state_profile(&normal, &oracle, q),
                    "round {round} state {q:?}: {}",
                    normal.automaton.serialize()
                );
                for a in normal.automaton.letters() {
                    for d in [0u8, 1] {
                        let (l, r) = normal.automaton.successors(q, a);
                        let t = if d == 0 { l } else { r };
                        assert_eq!(
                            edge_loop_profile(
                                &normal,
                                &cond,
                                Edge { source: q, letter: a, direction: d, target: t }
                            ),
                            oracle_edge_profile(&normal, &oracle, q, a, d),
                            "round {round} edge {q:?} {a:?} {d}: {}",
                            normal.automaton.serialize()
                        );
                    }
                }
            }

            let brute_split = normal.automaton.states().any(|q| {
                normal.automaton.letters().any(|a| {
                    let p0 = oracle_edge_profile(&normal, &oracle, q, a, 0);
                    let p1 = oracle_edge_profile(&normal, &oracle, q, a, 1);
                    p0.iter()
                        .any(|&r0| p1.iter().any(|&r1| r0 % 2 != r1 % 2 && r0.max(r1) % 2 == 1))
                })
            });
            assert_eq!(
                find_split(&normal, &cond).is_some(),
                brute_split,
                "round {round}: {}",
                normal.automaton.serialize()
            );

            for polarity in [LoopPolarity::Accepting, LoopPolarity::Rejecting] {
                let want_even = polarity == LoopPolarity::Accepting;
                let mut expected = BTreeSet::new();
                for q in normal.automaton.states() {
                    for a in normal.automaton.letters() {
                        for d in [0u8, 1] {
                            let profile = oracle_edge_profile(&normal, &oracle, q, a, d);
                            if profile.iter().any(|&r| (r % 2 == 0) == want_even) {
                                let (l, r) = normal.automaton.successors(q, a);
                                let sibling = if d == 0 { r } else { l };
                                let reach = normal.automaton.reachable_from(sibling);
                                for p in normal.automaton.states() {
                                    if reach[p.index()] {
                                        expected.insert(p);
                                    }
                                }
                            }
                        }
                    }
                }
                assert_eq!(
                    replicated_states(&normal, &cond, polarity),
                    expected,
                    "round {round} {polarity:?}: {}",
                    normal.automaton.serialize()
                );
            }
        }
    }
}
