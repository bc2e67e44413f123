//! The decision procedure: from an automaton to the canonical name of its
//! language, and from the name to every coarser classification.
//!
//! [`canonicalize`] normalizes the automaton, tests the three unbounded
//! patterns first, and then reads the name off the strongly connected
//! component of the initial state. The component's internal transitions
//! (both branches staying inside) decide which construction the automaton
//! embodies: an internal transition on an accepting loop caps the name at
//! the rejecting one-alternation flower; internal transitions that only
//! touch rejecting loops leave one of the one-alternation flowers or, when
//! the component has no accepting loop at all, a rejecting restart spine
//! over the component's children; a component without internal transitions
//! is a replication spine, whose lifted loop ranks each replicate the
//! alternative of the children they spawn.
//!
//! Children are the subautomata entered where a branch leaves the
//! component. Their names are computed recursively over the component dag,
//! memoized per state, and combined with the closure operations on names.
//! [`wadge_compare`] is then a plain name comparison, and [`classify`]
//! derives the topological class and the minimal deterministic and weak
//! rank windows from the same pattern vocabulary.

use std::collections::BTreeMap;

use crate::automaton::{DetTreeAutomaton, Edge, StateId};
use crate::name::{
    and_name, arrow_name, flower_name, krep_name, name_leq, or_name, CanonicalName, NameLetter,
    NameOrder,
};
use crate::ordinal::{Index, Ordinal};
use crate::patterns::{
    component_flower, condensation, contains_flower, contains_weak_flower, detect_top_patterns,
    edge_loop_profile, lift_ranks, max_weak_flower, replicated_states, Condensation, LoopPolarity,
    WeakFlowerMax,
};
use crate::productive::{normalize, NormalizedAutomaton};

fn small(letter: NameLetter, n: u64) -> CanonicalName {
    CanonicalName::new(letter, Ordinal::nat(n)).expect("finite names are valid")
}

fn window(iota: u32, kappa: u32) -> Index {
    Index::new(iota, kappa).expect("well-formed rank window")
}

/// Computes the canonical name of the language the automaton recognizes.
///
/// The name is a complete invariant of the language's position under
/// continuous reductions: two automata receive comparable names exactly as
/// their languages reduce to one another, and equal names exactly when they
/// reduce both ways.
pub fn canonicalize(auto: &DetTreeAutomaton) -> CanonicalName {
    let top = normalize(auto);
    if top.productive.is_empty() {
        return small(NameLetter::D, 1);
    }
    let mut memo = BTreeMap::new();
    canon_state(&top.automaton, top.automaton.initial(), &mut memo)
}

/// Decides how the languages of two automata compare under continuous
/// reductions, by comparing their canonical names.
pub fn wadge_compare(a: &DetTreeAutomaton, b: &DetTreeAutomaton) -> NameOrder {
    name_leq(&canonicalize(a), &canonicalize(b))
}

/// The name of the subautomaton rooted at a state of the normalized parent,
/// memoized so shared children are canonicalized once.
fn canon_state(
    parent: &DetTreeAutomaton,
    root: StateId,
    memo: &mut BTreeMap<StateId, CanonicalName>,
) -> CanonicalName {
    if let Some(name) = memo.get(&root) {
        return name.clone();
    }
    let sub = parent.subautomaton(root);
    let normal = normalize(&sub);
    let name = canon_normal(parent, &normal, memo);
    memo.insert(root, name.clone());
    name
}

/// The name of the child entered at `q`, resolved back to the parent's
/// state table so the memo survives re-normalization.
fn child_name(
    parent: &DetTreeAutomaton,
    normal: &NormalizedAutomaton,
    q: StateId,
    memo: &mut BTreeMap<StateId, CanonicalName>,
) -> CanonicalName {
    if normal.is_bottom(q) {
        return small(NameLetter::D, 1);
    }
    let in_parent = parent
        .state_by_name(normal.automaton.state_name(q))
        .expect("normalization keeps state names");
    canon_state(parent, in_parent, memo)
}

/// Accumulates an alternative of child names.
fn or_push(slot: &mut Option<CanonicalName>, name: CanonicalName) {
    *slot = Some(match slot.take() {
        Some(prev) => or_name(&prev, &name),
        None => name,
    });
}

/// Whether some internal transition of component `x` has a branch lying on
/// an accepting loop.
fn positive_internal(normal: &NormalizedAutomaton, cond: &Condensation, x: usize) -> bool {
    let auto = &normal.automaton;
    for &q in &cond.components[x].members {
        for a in auto.letters() {
            let (l, r) = auto.successors(q, a);
            if cond.component_of(l) != x || cond.component_of(r) != x {
                continue;
            }
            for (d, t) in [(0u8, l), (1u8, r)] {
                let profile = edge_loop_profile(
                    normal,
                    cond,
                    Edge { source: q, letter: a, direction: d, target: t },
                );
                if profile.iter().any(|&top| top % 2 == 0) {
                    return true;
                }
            }
        }
    }
    false
}

/// The obstruction keeping a language out of the second additive level: a
/// two-alternation flower on the rejecting side, or an accepting loop that
/// replicates a rejecting loop from which an accepting loop stays
/// reachable.
fn beyond_sigma_two(normal: &NormalizedAutomaton, cond: &Condensation) -> bool {
    if contains_flower(normal, cond, window(1, 2)) {
        return true;
    }
    let acc = replicated_states(normal, cond, LoopPolarity::Accepting);
    if acc.is_empty() {
        return false;
    }
    let n = cond.components.len();
    let mut reach_acc = vec![false; n];
    let mut pending = vec![false; n];
    for i in (0..n).rev() {
        let info = &cond.components[i];
        reach_acc[i] = info.has_accepting_loop || info.successors.iter().any(|&s| reach_acc[s]);
        pending[i] = (info.has_rejecting_loop && reach_acc[i])
            || info.successors.iter().any(|&s| pending[s]);
    }
    acc.iter().any(|&q| pending[cond.component_of(q)])
}

/// Names one normalized subautomaton.
fn canon_normal(
    parent: &DetTreeAutomaton,
    normal: &NormalizedAutomaton,
    memo: &mut BTreeMap<StateId, CanonicalName>,
) -> CanonicalName {
    if normal.productive.is_empty() {
        return small(NameLetter::D, 1);
    }
    let cond = condensation(normal);
    if cond.components.iter().all(|c| !c.has_rejecting_loop) {
        // Every loop is accepting, so every run is, and every tree.
        return small(NameLetter::C, 1);
    }
    let (top0, top1, top2) = detect_top_patterns(normal, &cond);
    if top2 {
        return CanonicalName::new(NameLetter::C, Ordinal::top(2)).expect("top names are valid");
    }
    if top1 {
        return CanonicalName::new(NameLetter::C, Ordinal::top(1)).expect("top names are valid");
    }
    if top0 {
        return CanonicalName::new(NameLetter::C, Ordinal::top(0)).expect("top names are valid");
    }

    let auto = &normal.automaton;
    let x = cond.component_of(auto.initial());
    let info = &cond.components[x];

    if info.has_internal_transition {
        if positive_internal(normal, &cond, x) {
            // An accepting loop may defer one irrevocable rejection per
            // turn; whether the rejection can itself be recovered from
            // separates the flower from the plain closed degree. (The
            // emptiness pre-dispatch already guarantees a rejecting loop,
            // so nothing smaller than C(2) can appear here.)
            return if beyond_sigma_two(normal, &cond) {
                flower_name(window(1, 2))
            } else {
                small(NameLetter::C, 2)
            };
        }
        if info.has_accepting_loop {
            // Rejecting internal transitions next to an accepting loop:
            // the accepting side of the one-alternation flowers, sharpened
            // by the same recovery test.
            return if beyond_sigma_two(normal, &cond) {
                flower_name(window(1, 3))
            } else {
                flower_name(window(0, 1))
            };
        }
        // Only rejecting loops pass through the component: staying forever
        // rejects, so the component is a restart spine over its children.
        // A branch pair leaving together must be accepted together.
        let mut alternative: Option<CanonicalName> = None;
        for &q in &info.members {
            for a in auto.letters() {
                let (l, r) = auto.successors(q, a);
                let child = match (cond.component_of(l) == x, cond.component_of(r) == x) {
                    (true, true) => continue,
                    (false, true) => child_name(parent, normal, l, memo),
                    (true, false) => child_name(parent, normal, r, memo),
                    (false, false) => {
                        let cl = child_name(parent, normal, l, memo);
                        let cr = child_name(parent, normal, r, memo);
                        and_name(&cl, &cr).expect("child names stay below the unbounded degrees")
                    }
                };
                or_push(&mut alternative, child);
            }
        }
        let base = alternative.unwrap_or_else(|| small(NameLetter::D, 1));
        return arrow_name(&small(NameLetter::C, 1), &base)
            .expect("child names stay below the unbounded degrees");
    }

    // No internal transition: every loop of the component is a spine whose
    // off-loop branches replicate children, and whole-transition exits form
    // the base alternative. Lifting aligns the ranks with the loop
    // structure so the spawn ranks fill the component's flower window.
    let lifted = lift_ranks(normal);
    let lcond = condensation(&lifted);
    let auto = &lifted.automaton;
    let lx = lcond.component_of(auto.initial());
    let span = component_flower(&lifted, &lcond, lx);

    let mut base: Option<CanonicalName> = None;
    let mut buckets: Vec<Option<CanonicalName>> = match span {
        Some(index) => vec![None; (index.kappa() - index.iota() + 1) as usize],
        None => Vec::new(),
    };
    for &q in &lcond.components[lx].members {
        for a in auto.letters() {
            let (l, r) = auto.successors(q, a);
            match (lcond.component_of(l) == lx, lcond.component_of(r) == lx) {
                (true, true) => unreachable!("the component has no internal transition"),
                (false, false) => {
                    let cl = child_name(parent, &lifted, l, memo);
                    let cr = child_name(parent, &lifted, r, memo);
                    let pair =
                        and_name(&cl, &cr).expect("child names stay below the unbounded degrees");
                    or_push(&mut base, pair);
                }
                (stay_left, _) => {
                    let (d, stay, leave) = if stay_left { (0u8, l, r) } else { (1u8, r, l) };
                    let index = span.expect("a staying branch closes a cycle");
                    let child = child_name(parent, &lifted, leave, memo);
                    let profile = edge_loop_profile(
                        &lifted,
                        &lcond,
                        Edge { source: q, letter: a, direction: d, target: stay },
                    );
                    for &j in &profile {
                        assert!(
                            index.iota() <= j && j <= index.kappa(),
                            "lifted loop ranks stay inside the component window"
                        );
                        or_push(&mut buckets[(j - index.iota()) as usize], child.clone());
                    }
                }
            }
        }
    }
    let base = base.unwrap_or_else(|| small(NameLetter::D, 1));
    let Some(index) = span else {
        // A cycle-free component: one irrevocable choice among the
        // children, nothing replicated.
        return base;
    };
    let reps: Vec<CanonicalName> = buckets
        .into_iter()
        .map(|b| b.unwrap_or_else(|| small(NameLetter::D, 1)))
        .collect();
    krep_name(&base, index, &reps).expect("child names stay below the unbounded degrees")
}

/// Position in the hierarchy of topological classes, finest first.
///
/// The completeness flags state completeness for the class under continuous
/// reductions. An incomplete open language is clopen; the third additive
/// level is special in that every language reaching it on the sigma side
/// already sits inside the ambiguous class, so [`Sigma03`] is never
/// produced and [`Delta03`] records the exact degree instead.
///
/// [`Sigma03`]: TopologicalClass::Sigma03
/// [`Delta03`]: TopologicalClass::Delta03
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TopologicalClass {
    Sigma01 { complete: bool },
    Pi01 { complete: bool },
    Sigma02 { complete: bool },
    Pi02 { complete: bool },
    /// Properly inside the third ambiguous level, above both second-level
    /// classes; `hardness` pins the degree.
    Delta03 { hardness: CanonicalName },
    Sigma03 { complete: bool },
    Pi03 { complete: bool },
    /// Beyond every Borel class.
    Pi11Complete,
}

/// Everything the analysis reports about one automaton's language.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassificationReport {
    pub canonical_name: CanonicalName,
    /// Position in the Borel/projective hierarchy.
    pub borel: TopologicalClass,
    /// The minimal rank windows among deterministic automata for the
    /// language: one window, or two dual windows of the same span.
    pub det_index: Vec<Index>,
    /// The minimal windows among weak deterministic automata, or `None`
    /// when no weak automaton recognizes the language.
    pub weak_det_index: Option<Vec<Index>>,
}

/// The window class just strong enough to recognize the complements of the
/// given class.
fn dual(index: Index) -> Index {
    if index.iota() == 0 {
        window(1, index.kappa() + 1)
    } else {
        window(0, index.kappa() - 1)
    }
}

/// The minimal capable windows: the first span admitting any capable
/// window, with the capable candidates at that span (one or both of the
/// dual pair).
fn minimal_indices(capable: impl Fn(Index) -> bool) -> Vec<Index> {
    let mut span = 0;
    loop {
        let found: Vec<Index> = [window(0, span), window(1, span + 1)]
            .into_iter()
            .filter(|&i| capable(i))
            .collect();
        if !found.is_empty() {
            return found;
        }
        span += 1;
    }
}

/// Classifies the language: canonical name, topological class, and the
/// minimal deterministic and weak rank windows.
pub fn classify(auto: &DetTreeAutomaton) -> ClassificationReport {
    let canonical_name = canonicalize(auto);
    let normal = normalize(auto);
    let cond = condensation(&normal);
    let weak01 = contains_weak_flower(&cond, window(0, 1));
    let weak12 = contains_weak_flower(&cond, window(1, 2));
    let f01 = contains_flower(&normal, &cond, window(0, 1));
    let (_, top1, top2) = detect_top_patterns(&normal, &cond);
    let borel = if !weak01 {
        TopologicalClass::Sigma01 { complete: weak12 }
    } else if !weak12 {
        TopologicalClass::Pi01 { complete: true }
    } else if !beyond_sigma_two(&normal, &cond) {
        TopologicalClass::Sigma02 { complete: f01 }
    } else if !f01 {
        TopologicalClass::Pi02 { complete: true }
    } else if !top1 {
        TopologicalClass::Delta03 { hardness: canonical_name.clone() }
    } else if !top2 {
        TopologicalClass::Pi03 { complete: true }
    } else {
        TopologicalClass::Pi11Complete
    };
    let det_index = minimal_indices(|i| !contains_flower(&normal, &cond, dual(i)));
    let weak_det_index = match max_weak_flower(&cond) {
        Some(WeakFlowerMax::Saturated) => None,
        _ => Some(minimal_indices(|i| !contains_weak_flower(&cond, dual(i)))),
    };
    ClassificationReport { canonical_name, borel, det_index, weak_det_index }
}
