//! Bounded search for structural embeddings between automata.
//!
//! An automaton `A` *admits* `B` when `B'` — `B` with its component DAG
//! unravelled into a tree, so each component gets one fresh copy per way of
//! reaching it — maps into `A` by a state assignment `e_Q` and a path
//! assignment `e_δ` such that
//!
//! 1. the image of each transition branch `(p, σ, d)` is a nonempty walk
//!    from `e_Q(p)` to `e_Q(δ_d(p, σ))`,
//! 2. for each `(p, σ)` the two branch images share a prefix and then take
//!    the same letter in the two different directions (they *branch*), and
//! 3. every loop of `B` maps to a loop of the same polarity — for every
//!    closed walk, the image's top rank has the parity of the original's.
//!
//! [`admits_oracle`] decides this by backtracking. Paths are never listed
//! explicitly: all that matters about a walk is its endpoints, its exact
//! maximal rank, and whether it fits in the length bound, so walks collapse
//! into (endpoint, max, minimal length) summaries. Condition 3 is checked
//! per component over all closed walks at once: a violation exists iff,
//! after restricting to source states of rank at most `r` and image maxes
//! at most `v` for some parity-mismatched pair `(r, v)`, one strongly
//! connected piece holds both a rank-`r` state and an edge of image max
//! exactly `v`.
//!
//! The search is exact but bounded: `Yes` comes with a real assignment,
//! `No` is reported only when the search space was exhausted and the path
//! bound provably covers every useful walk (at least `|Q_A|²`), and
//! anything else — including running out of the internal step budget — is
//! `Unknown`. This is a cross-check oracle for the bespoke detectors, not
//! a production decision procedure.

use std::collections::{BTreeSet, HashMap};

use crate::automaton::{DetTreeAutomaton, StateId};
use crate::patterns::condensation;
use crate::productive::NormalizedAutomaton;

/// Verdict of the bounded embedding search.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Admittance {
    Yes,
    No,
    Unknown,
}

const MAX_UNRAVELLED_STATES: usize = 160;
const STEP_BUDGET: u64 = 5_000_000;

/// `B` with its component DAG unravelled into a tree, restricted to the
/// part reachable from the initial state.
struct Unravelled {
    ranks: Vec<u32>,
    /// delta[state][letter] in unravelled indices.
    delta: Vec<Vec<(usize, usize)>>,
    num_letters: usize,
    /// Cyclic component copies, for the loop-polarity check.
    cycles: Vec<Vec<usize>>,
}

fn unravel(b: &DetTreeAutomaton) -> Option<Unravelled> {
    let wrapper = NormalizedAutomaton {
        automaton: b.clone(),
        bottom: None,
        productive: BTreeSet::new(),
    };
    let cond = condensation(&wrapper);

    // One copy of a component per (parent copy, component) pair.
    let mut copy_comp: Vec<usize> = Vec::new();
    let mut children: Vec<HashMap<usize, usize>> = Vec::new();
    let mut state_index: HashMap<(usize, u32), usize> = HashMap::new();
    let mut states: Vec<(usize, StateId)> = Vec::new();

    let new_copy = |comp: usize,
                        copy_comp: &mut Vec<usize>,
                        children: &mut Vec<HashMap<usize, usize>>,
                        state_index: &mut HashMap<(usize, u32), usize>,
                        states: &mut Vec<(usize, StateId)>|
     -> Option<usize> {
        let c = copy_comp.len();
        copy_comp.push(comp);
        children.push(HashMap::new());
        for &q in &cond.components[comp].members {
            if states.len() >= MAX_UNRAVELLED_STATES {
                return None;
            }
            state_index.insert((c, q.0), states.len());
            states.push((c, q));
        }
        Some(c)
    };

    let root = cond.component_of(b.initial());
    new_copy(root, &mut copy_comp, &mut children, &mut state_index, &mut states)?;

    // Resolve transitions copy by copy, creating child copies on demand.
    let mut delta: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut done = 0;
    while done < states.len() {
        let (c, p) = states[done];
        let mut row = Vec::with_capacity(b.num_letters());
        for a in b.letters() {
            let (l, r) = b.successors(p, a);
            let mut resolved = [0usize; 2];
            for (slot, t) in [(0usize, l), (1usize, r)] {
                let tc = cond.component_of(t);
                let copy = if tc == copy_comp[c] {
                    c
                } else if let Some(&child) = children[c].get(&tc) {
                    child
                } else {
                    let child = new_copy(
                        tc,
                        &mut copy_comp,
                        &mut children,
                        &mut state_index,
                        &mut states,
                    )?;
                    children[c].insert(tc, child);
                    child
                };
                resolved[slot] = state_index[&(copy, t.0)];
            }
            row.push((resolved[0], resolved[1]));
        }
        delta.push(row);
        done += 1;
    }

    let ranks = states.iter().map(|&(_, q)| b.rank(q)).collect();
    let mut cycles = Vec::new();
    for (c, &comp) in copy_comp.iter().enumerate() {
        if cond.components[comp].has_cycle {
            cycles.push(
                cond.components[comp]
                    .members
                    .iter()
                    .map(|&q| state_index[&(c, q.0)])
                    .collect(),
            );
        }
    }
    Some(Unravelled { ranks, delta, num_letters: b.num_letters(), cycles })
}

enum Outcome {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Search<'x> {
    a: &'x DetTreeAutomaton,
    b: &'x Unravelled,
    bound: u32,
    /// Distinct ranks of `A`, ascending.
    levels: Vec<u32>,
    /// States of `A` holding each level's rank.
    level_states: Vec<Vec<usize>>,
    /// dist[level][x][y]: minimal walk length staying at ranks up to the
    /// level's value, `u32::MAX` when impossible.
    dist: Vec<Vec<Vec<u32>>>,
    /// Obligations (state, letter) that become checkable once a given
    /// unravelled state is assigned.
    watchers: Vec<Vec<(usize, usize)>>,
    steps: u64,
}

impl<'x> Search<'x> {
    fn new(a: &'x DetTreeAutomaton, b: &'x Unravelled, bound: u32) -> Self {
        let n = a.num_states();
        let levels: Vec<u32> = a
            .states()
            .map(|q| a.rank(q))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let level_states: Vec<Vec<usize>> = levels
            .iter()
            .map(|&r| a.states().filter(|&q| a.rank(q) == r).map(|q| q.index()).collect())
            .collect();
        let mut dist = Vec::new();
        for &r in &levels {
            let mut m = vec![vec![u32::MAX; n]; n];
            for x in a.states() {
                if a.rank(x) > r {
                    continue;
                }
                // Plain BFS from x over states of rank <= r.
                let mut queue = std::collections::VecDeque::new();
                m[x.index()][x.index()] = 0;
                queue.push_back(x);
                while let Some(v) = queue.pop_front() {
                    let dv = m[x.index()][v.index()];
                    for letter in a.letters() {
                        let (l, rr) = a.successors(v, letter);
                        for t in [l, rr] {
                            if a.rank(t) <= r && m[x.index()][t.index()] == u32::MAX {
                                m[x.index()][t.index()] = dv + 1;
                                queue.push_back(t);
                            }
                        }
                    }
                }
            }
            dist.push(m);
        }
        let mut watchers = vec![Vec::new(); b.ranks.len()];
        for p in 0..b.ranks.len() {
            for l in 0..b.num_letters {
                let (t0, t1) = b.delta[p][l];
                for k in [p, t0, t1] {
                    if !watchers[k].contains(&(p, l)) {
                        watchers[k].push((p, l));
                    }
                }
            }
        }
        Search { a, b, bound, levels, level_states, dist, watchers, steps: STEP_BUDGET }
    }

    fn tick(&mut self) -> bool {
        if self.steps == 0 {
            false
        } else {
            self.steps -= 1;
            true
        }
    }

    /// Minimal length of a walk `x -> y` whose maximal rank is exactly the
    /// given level's value; `u32::MAX` when impossible.
    fn exact(&self, level: usize, x: usize, y: usize) -> u32 {
        let mut best = u32::MAX;
        for &u in &self.level_states[level] {
            let first = self.dist[level][x][u];
            let second = self.dist[level][u][y];
            if first != u32::MAX && second != u32::MAX {
                best = best.min(first + second);
            }
        }
        best
    }

    /// All achievable (image max of branch 0, image max of branch 1) pairs
    /// for the obligation `(p, letter)` under the partial assignment, or
    /// `None` when the step budget ran out. Branch images must branch:
    /// common prefix, one split step with both directions, suffixes.
    fn options(&mut self, p: usize, letter: usize, eq: &[Option<usize>]) -> Option<Vec<(u32, u32)>> {
        let (t0, t1) = self.b.delta[p][letter];
        let u = eq[p].unwrap();
        let v0 = eq[t0].unwrap();
        let v1 = eq[t1].unwrap();
        // A branch that is itself a self-loop in the source graph forms a
        // closed walk on its own, so its image parity is forced.
        let force = |t: usize| -> Option<u32> {
            if t == p {
                Some(self.b.ranks[p] % 2)
            } else {
                None
            }
        };
        let force0 = force(t0);
        let force1 = force(t1);
        let mut out = BTreeSet::new();
        for pl in 0..self.levels.len() {
            for w in 0..self.a.num_states() {
                if !self.tick() {
                    return None;
                }
                let prefix = self.exact(pl, u, w);
                if prefix == u32::MAX || prefix + 1 > self.bound {
                    continue;
                }
                for letter_a in self.a.letters() {
                    let (x0, x1) = self.a.successors(StateId(w as u32), letter_a);
                    for (mid0, mid1) in [(x0, x1), (x1, x0)] {
                        for l0 in 0..self.levels.len() {
                            let s0 = self.exact(l0, mid0.index(), v0);
                            if s0 == u32::MAX || prefix + 1 + s0 > self.bound {
                                continue;
                            }
                            let m0 = self.levels[pl].max(self.levels[l0]);
                            if force0.is_some_and(|par| m0 % 2 != par) {
                                continue;
                            }
                            for l1 in 0..self.levels.len() {
                                let s1 = self.exact(l1, mid1.index(), v1);
                                if s1 == u32::MAX || prefix + 1 + s1 > self.bound {
                                    continue;
                                }
                                let m1 = self.levels[pl].max(self.levels[l1]);
                                if force1.is_some_and(|par| m1 % 2 != par) {
                                    continue;
                                }
                                out.insert((m0, m1));
                            }
                        }
                    }
                }
            }
        }
        Some(out.into_iter().collect())
    }

    fn run(&mut self) -> Outcome {
        let mut eq: Vec<Option<usize>> = vec![None; self.b.ranks.len()];
        self.assign(0, &mut eq)
    }

    fn assign(&mut self, pos: usize, eq: &mut Vec<Option<usize>>) -> Outcome {
        if pos == eq.len() {
            return match self.check_loops(eq) {
                None => Outcome::OutOfBudget,
                Some(true) => Outcome::Found,
                Some(false) => Outcome::Exhausted,
            };
        }
        for cand in 0..self.a.num_states() {
            if !self.tick() {
                return Outcome::OutOfBudget;
            }
            eq[pos] = Some(cand);
            let mut viable = true;
            for wi in 0..self.watchers[pos].len() {
                let (p, l) = self.watchers[pos][wi];
                let (t0, t1) = self.b.delta[p][l];
                if eq[p].is_some() && eq[t0].is_some() && eq[t1].is_some() {
                    match self.options(p, l, eq) {
                        None => {
                            eq[pos] = None;
                            return Outcome::OutOfBudget;
                        }
                        Some(opts) => {
                            if opts.is_empty() {
                                viable = false;
                                break;
                            }
                        }
                    }
                }
            }
            if viable {
                match self.assign(pos + 1, eq) {
                    Outcome::Exhausted => {}
                    other => {
                        eq[pos] = None;
                        return other;
                    }
                }
            }
        }
        eq[pos] = None;
        Outcome::Exhausted
    }

    /// Checks the loop-polarity condition for every cyclic component copy
    /// under the complete assignment, choosing image maxes per obligation.
    fn check_loops(&mut self, eq: &[Option<usize>]) -> Option<bool> {
        for ci in 0..self.b.cycles.len() {
            let members = self.b.cycles[ci].clone();
            let inside = |s: usize| members.contains(&s);
            // Obligations with at least one branch staying inside.
            let mut obligations = Vec::new();
            for &p in &members {
                for l in 0..self.b.num_letters {
                    let (t0, t1) = self.b.delta[p][l];
                    if inside(t0) || inside(t1) {
                        let opts = self.options(p, l, eq)?;
                        obligations.push((p, l, opts));
                    }
                }
            }
            let mut chosen: Vec<(u32, u32)> = Vec::with_capacity(obligations.len());
            if !self.pick(&members, &obligations, &mut chosen)? {
                return Some(false);
            }
        }
        Some(true)
    }

    fn pick(
        &mut self,
        members: &[usize],
        obligations: &[(usize, usize, Vec<(u32, u32)>)],
        chosen: &mut Vec<(u32, u32)>,
    ) -> Option<bool> {
        if chosen.len() == obligations.len() {
            return Some(self.polarity_ok(members, obligations, chosen));
        }
        let opts = obligations[chosen.len()].2.clone();
        for o in opts {
            if !self.tick() {
                return None;
            }
            chosen.push(o);
            let ok = self.pick(members, obligations, chosen)?;
            chosen.pop();
            if ok {
                return Some(true);
            }
        }
        Some(false)
    }

    /// No closed walk may pair a source top of one parity with an image top
    /// of the other.
    fn polarity_ok(
        &self,
        members: &[usize],
        obligations: &[(usize, usize, Vec<(u32, u32)>)],
        chosen: &[(u32, u32)],
    ) -> bool {
        let inside = |s: usize| members.contains(&s);
        // Internal edges with their chosen image maxes.
        let mut edges: Vec<(usize, usize, u32)> = Vec::new();
        for (i, &(p, l, _)) in obligations.iter().enumerate() {
            let (t0, t1) = self.b.delta[p][l];
            let (m0, m1) = chosen[i];
            if inside(t0) {
                edges.push((p, t0, m0));
            }
            if inside(t1) {
                edges.push((p, t1, m1));
            }
        }
        let ranks: BTreeSet<u32> = members.iter().map(|&s| self.b.ranks[s]).collect();
        let values: BTreeSet<u32> = edges.iter().map(|&(_, _, m)| m).collect();
        for &r in &ranks {
            for &v in &values {
                if r % 2 == v % 2 {
                    continue;
                }
                // Restrict and look for a strongly connected piece holding
                // a rank-r state together with an image-max-v edge.
                let nodes: Vec<usize> = members
                    .iter()
                    .copied()
                    .filter(|&s| self.b.ranks[s] <= r)
                    .collect();
                let kept: Vec<&(usize, usize, u32)> = edges
                    .iter()
                    .filter(|&&(f, t, m)| {
                        m <= v && self.b.ranks[f] <= r && self.b.ranks[t] <= r
                    })
                    .collect();
                let comp = tiny_sccs(&nodes, &kept);
                let bad = kept.iter().any(|&&(f, t, m)| {
                    m == v
                        && comp[&f] == comp[&t]
                        && nodes.iter().any(|&s| {
                            self.b.ranks[s] == r && comp[&s] == comp[&f]
                        })
                });
                if bad {
                    return false;
                }
            }
        }
        true
    }
}

/// Strongly connected components of a small explicit graph; returns a
/// component id per node.
fn tiny_sccs(nodes: &[usize], edges: &[&(usize, usize, u32)]) -> HashMap<usize, usize> {
    let mut succ: HashMap<usize, Vec<usize>> = nodes.iter().map(|&n| (n, Vec::new())).collect();
    let mut pred: HashMap<usize, Vec<usize>> = nodes.iter().map(|&n| (n, Vec::new())).collect();
    for &&(f, t, _) in edges {
        succ.get_mut(&f).unwrap().push(t);
        pred.get_mut(&t).unwrap().push(f);
    }
    // Kosaraju on a handful of nodes.
    let mut order = Vec::new();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for &root in nodes {
        if seen.contains(&root) {
            continue;
        }
        let mut stack = vec![(root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                order.push(v);
                continue;
            }
            if !seen.insert(v) {
                continue;
            }
            stack.push((v, true));
            for &t in &succ[&v] {
                if !seen.contains(&t) {
                    stack.push((t, false));
                }
            }
        }
    }
    let mut comp = HashMap::new();
    let mut next = 0;
    for &root in order.iter().rev() {
        if comp.contains_key(&root) {
            continue;
        }
        let mut stack = vec![root];
        comp.insert(root, next);
        while let Some(v) = stack.pop() {
            for &p in &pred[&v] {
                if !comp.contains_key(&p) {
                    comp.insert(p, next);
                    stack.push(p);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Does `a` admit `b`? Bounded backtracking search; see the module
/// documentation for the exact `Yes`/`No`/`Unknown` contract.
pub fn admits_oracle(a: &DetTreeAutomaton, b: &DetTreeAutomaton, path_bound: usize) -> Admittance {
    assert!(path_bound >= 1, "path bound must be positive");
    let Some(unravelled) = unravel(b) else {
        return Admittance::Unknown;
    };
    let bound = u32::try_from(path_bound.min(1 << 20)).unwrap();
    let mut search = Search::new(a, &unravelled, bound);
    match search.run() {
        Outcome::Found => Admittance::Yes,
        Outcome::OutOfBudget => Admittance::Unknown,
        Outcome::Exhausted => {
            if path_bound >= a.num_states() * a.num_states() {
                Admittance::No
            } else {
                Admittance::Unknown
            }
        }
    }
}
