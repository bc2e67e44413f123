//! Canonical names, their order, and the closure algebra.
//!
//! A canonical name is a letter `C`, `D`, or `E` together with an ordinal:
//! `C(alpha)` exists for every `0 < alpha <= TOP+2`, while `D(alpha)` and
//! `E(alpha)` exist only for finite `alpha` or for `alpha` whose base-w
//! expansion ends in a finite part with a nonzero `w^[w..w+k]` segment.
//! Each name below the top three denotes a unique sequential composition
//! of *simple* names: the three one-state building blocks, the two bands
//! of branching automata, and the flowers. [`components`] computes that
//! decomposition and [`recompose`] inverts it.
//!
//! [`name_leq`] orders names: ordinals decide first; at a common ordinal
//! `C` and `D` are incomparable and both sit strictly below `E`. The
//! closure operations [`or_name`], [`oplus_name`], [`and_name`],
//! [`arrow_name`], and [`krep_name`] compute the canonical name of the
//! corresponding language operation directly on name structure, by case
//! analysis on head components. They never build an automaton; the builder
//! exists to cross-validate them.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ordinal::{Index, OmegaPoly, Ordinal};

/// The letter of a canonical name.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum NameLetter {
    C,
    D,
    E,
}

/// A canonical name: a letter with an ordinal, subject to the validity
/// rules checked by [`name_validate`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalName {
    letter: NameLetter,
    ordinal: Ordinal,
}

/// Errors from name construction, parsing, and the closure operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum NameError {
    #[error("no canonical name {0}({1})")]
    InvalidName(char, Ordinal),
    #[error("malformed name `{0}`")]
    Malformed(String),
    #[error("operation undefined on the top names: {0}")]
    TopOperand(CanonicalName),
    #[error("the top names have no component decomposition")]
    NotDecomposable,
    #[error("not a valid component sequence")]
    InvalidDecomposition,
    #[error("expected {expected} replicated names, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("band must be a single branching component")]
    InvalidBand,
}

/// Outcome of comparing two names.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NameOrder {
    Less,
    Equal,
    Greater,
    Incomparable,
}

/// Is the letter/ordinal pair a canonical name?
///
/// `C` covers every ordinal up to and including the three top values. `D`
/// and `E` additionally require the ordinal to be finite and positive, or
/// to have a nonzero middle digit and a finite low digit in base w^w.
pub fn name_validate(letter: NameLetter, ordinal: &Ordinal) -> bool {
    if ordinal.is_zero() {
        return false;
    }
    match letter {
        NameLetter::C => true,
        NameLetter::D | NameLetter::E => match ordinal.parts() {
            None => false,
            Some((a2, a1, a0)) => {
                if a1.is_zero() {
                    a2.is_zero() && a0.finite().is_some_and(|n| n > 0)
                } else {
                    a0.finite().is_some()
                }
            }
        },
    }
}

impl CanonicalName {
    pub fn new(letter: NameLetter, ordinal: Ordinal) -> Result<Self, NameError> {
        if name_validate(letter, &ordinal) {
            Ok(CanonicalName { letter, ordinal })
        } else {
            let c = match letter {
                NameLetter::C => 'C',
                NameLetter::D => 'D',
                NameLetter::E => 'E',
            };
            Err(NameError::InvalidName(c, ordinal))
        }
    }

    pub fn letter(&self) -> NameLetter {
        self.letter
    }

    pub fn ordinal(&self) -> &Ordinal {
        &self.ordinal
    }

    pub fn is_top(&self) -> bool {
        self.ordinal.is_top()
    }

    /// Compares two names in the Wadge order on canonical names.
    pub fn compare(&self, other: &CanonicalName) -> NameOrder {
        use std::cmp::Ordering::*;
        match self.ordinal.compare(&other.ordinal) {
            Less => NameOrder::Less,
            Greater => NameOrder::Greater,
            Equal => match (self.letter, other.letter) {
                (a, b) if a == b => NameOrder::Equal,
                (NameLetter::E, _) => NameOrder::Greater,
                (_, NameLetter::E) => NameOrder::Less,
                _ => NameOrder::Incomparable,
            },
        }
    }

    pub fn leq(&self, other: &CanonicalName) -> bool {
        matches!(self.compare(other), NameOrder::Less | NameOrder::Equal)
    }

    fn lt(&self, other: &CanonicalName) -> bool {
        self.compare(other) == NameOrder::Less
    }

    fn geq(&self, other: &CanonicalName) -> bool {
        matches!(self.compare(other), NameOrder::Greater | NameOrder::Equal)
    }
}

/// `name_leq` as a four-way comparison, the shared entry point.
pub fn name_leq(n1: &CanonicalName, n2: &CanonicalName) -> NameOrder {
    n1.compare(n2)
}

impl fmt::Display for CanonicalName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.letter {
            NameLetter::C => 'C',
            NameLetter::D => 'D',
            NameLetter::E => 'E',
        };
        write!(f, "{c}({})", self.ordinal)
    }
}

impl FromStr for CanonicalName {
    type Err = NameError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let malformed = || NameError::Malformed(text.to_string());
        let (head, rest) = text.split_at(text.len().min(1));
        let letter = match head {
            "C" => NameLetter::C,
            "D" => NameLetter::D,
            "E" => NameLetter::E,
            _ => return Err(malformed()),
        };
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(malformed)?;
        let ordinal: Ordinal = inner.parse().map_err(|_| malformed())?;
        CanonicalName::new(letter, ordinal)
    }
}

/// A simple name: a canonical name that is not a sequential composition of
/// smaller ones. `Unit*` are the three weakest names, `BranchLow(k)` sits
/// at level w^k, the flowers at w^[w+k], and `BranchHigh(k)` at w^[w*2+k].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SimpleName {
    UnitC,
    UnitD,
    UnitE,
    BranchLow(u32),
    FlowerC(u32),
    FlowerD(u32),
    FlowerE(u32),
    BranchHigh(u32),
}

impl SimpleName {
    /// The ordinal level this component contributes to the composition.
    pub fn level(&self) -> Ordinal {
        match *self {
            SimpleName::UnitC | SimpleName::UnitD | SimpleName::UnitE => Ordinal::nat(1),
            SimpleName::BranchLow(k) => Ordinal::power(0, k, 1),
            SimpleName::FlowerC(k) | SimpleName::FlowerD(k) | SimpleName::FlowerE(k) => {
                Ordinal::power(1, k, 1)
            }
            SimpleName::BranchHigh(k) => Ordinal::power(2, k, 1),
        }
    }

    /// The canonical name of this component alone.
    pub fn name(&self) -> CanonicalName {
        let letter = match self {
            SimpleName::UnitC | SimpleName::BranchLow(_) | SimpleName::BranchHigh(_) => {
                NameLetter::C
            }
            SimpleName::FlowerC(_) => NameLetter::C,
            SimpleName::UnitD | SimpleName::FlowerD(_) => NameLetter::D,
            SimpleName::UnitE | SimpleName::FlowerE(_) => NameLetter::E,
        };
        CanonicalName::new(letter, self.level()).expect("simple names are valid")
    }

    pub fn is_branching(&self) -> bool {
        matches!(self, SimpleName::BranchLow(_) | SimpleName::BranchHigh(_))
    }

    /// The rank pair realized by a non-branching component.
    pub fn flower_index(&self) -> Option<Index> {
        let idx = match *self {
            SimpleName::UnitC => Index::new(0, 0),
            SimpleName::UnitD => Index::new(1, 1),
            SimpleName::FlowerC(k) => Index::new(0, k + 1),
            SimpleName::FlowerD(k) => Index::new(1, k + 2),
            _ => return None,
        };
        Some(idx.expect("component indices are well formed"))
    }

    fn compare(&self, other: &SimpleName) -> NameOrder {
        self.name().compare(&other.name())
    }

    /// The `E` component at this component's level, when one exists.
    fn e_at_level(&self) -> Option<SimpleName> {
        match *self {
            SimpleName::UnitC | SimpleName::UnitD | SimpleName::UnitE => Some(SimpleName::UnitE),
            SimpleName::FlowerC(k) | SimpleName::FlowerD(k) | SimpleName::FlowerE(k) => {
                Some(SimpleName::FlowerE(k))
            }
            _ => None,
        }
    }
}

impl fmt::Display for SimpleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// The flower name for a rank pair, shifted so the lower rank is 0 or 1.
pub fn flower_name(index: Index) -> CanonicalName {
    let iota = index.iota() % 2;
    let kappa = index.kappa() - (index.iota() - iota);
    let simple = match (iota, kappa) {
        (0, 0) => SimpleName::UnitC,
        (1, 1) => SimpleName::UnitD,
        (0, k) => SimpleName::FlowerC(k - 1),
        (_, k) => SimpleName::FlowerD(k - 2),
    };
    simple.name()
}

fn units(letter: NameLetter, n: u64) -> Vec<SimpleName> {
    let mut out = Vec::new();
    match letter {
        NameLetter::C => out.push(SimpleName::UnitC),
        NameLetter::D => out.push(SimpleName::UnitD),
        NameLetter::E => out.push(SimpleName::UnitE),
    }
    for _ in 1..n {
        out.push(SimpleName::UnitE);
    }
    out
}

/// Decomposition of the band-0 part (finite tail plus w^k terms), which is
/// always a `C` name; an even finite part flips the head to `D`.
fn low_components(a0: &OmegaPoly) -> Vec<SimpleName> {
    let (infinite, n) = a0.split_finite();
    let mut out = Vec::new();
    if n > 0 {
        let letter = if n % 2 == 1 { NameLetter::C } else { NameLetter::D };
        out.extend(units(letter, n));
    }
    for &(k, coeff) in infinite.terms().iter().rev() {
        for _ in 0..coeff {
            out.push(SimpleName::BranchLow(k));
        }
    }
    out
}

/// Decomposition of a flower segment `w^[w]*a1` with the head carrying the
/// given letter and every later component an `E` flower.
fn flower_components(letter: NameLetter, a1: &OmegaPoly) -> Vec<SimpleName> {
    let mut out = Vec::new();
    for &(k, coeff) in a1.terms().iter().rev() {
        for _ in 0..coeff {
            out.push(SimpleName::FlowerE(k));
        }
    }
    match letter {
        NameLetter::C => out[0] = SimpleName::FlowerC(first_exponent(a1)),
        NameLetter::D => out[0] = SimpleName::FlowerD(first_exponent(a1)),
        NameLetter::E => {}
    }
    out
}

fn first_exponent(poly: &OmegaPoly) -> u32 {
    poly.terms().last().expect("nonzero polynomial").0
}

/// The unique decomposition of a name below the top three into simple
/// components, listed weakest first.
pub fn components(name: &CanonicalName) -> Result<Vec<SimpleName>, NameError> {
    let Some((a2, a1, a0)) = name.ordinal.parts() else {
        return Err(NameError::NotDecomposable);
    };
    let mut out = Vec::new();
    if !a0.is_zero() {
        match a0.finite() {
            Some(n) if a1.is_zero() && !a2.is_zero() => {
                // A finite part directly under the high band is a C name;
                // its head parity decides the letter of the finite block.
                let head = if n % 2 == 1 { NameLetter::C } else { NameLetter::D };
                out.extend(units(head, n));
            }
            Some(n) => out.extend(units(name.letter, n)),
            None => {
                debug_assert_eq!(name.letter, NameLetter::C);
                out.extend(low_components(a0));
            }
        }
    }
    if !a1.is_zero() {
        let head = if a0.is_zero() { name.letter } else { NameLetter::E };
        out.extend(flower_components(head, a1));
    }
    for &(k, coeff) in a2.terms().iter().rev() {
        for _ in 0..coeff {
            out.push(SimpleName::BranchHigh(k));
        }
    }
    debug_assert!(!out.is_empty(), "positive ordinals have components");
    Ok(out)
}

/// Strict inverse of [`components`]: rejects any sequence that is not the
/// decomposition of a canonical name.
pub fn recompose(list: &[SimpleName]) -> Result<CanonicalName, NameError> {
    if list.is_empty() {
        return Err(NameError::InvalidDecomposition);
    }
    let mut p0 = Vec::new();
    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    let mut finite = 0u64;
    for s in list {
        match *s {
            SimpleName::UnitC | SimpleName::UnitD | SimpleName::UnitE => finite += 1,
            SimpleName::BranchLow(k) => bump(&mut p0, k),
            SimpleName::FlowerC(k) | SimpleName::FlowerD(k) | SimpleName::FlowerE(k) => {
                bump(&mut p1, k)
            }
            SimpleName::BranchHigh(k) => bump(&mut p2, k),
        }
    }
    if finite > 0 {
        p0.push((0, finite));
    }
    let sort = |mut v: Vec<(u32, u64)>| {
        v.sort_by(|a, b| b.0.cmp(&a.0));
        OmegaPoly::from_terms(v).expect("grouped terms are well formed")
    };
    let ordinal = Ordinal::from_parts(sort(p2), sort(p1), sort(p0));
    for letter in [NameLetter::C, NameLetter::D, NameLetter::E] {
        if let Ok(name) = CanonicalName::new(letter, ordinal.clone()) {
            if components(&name).as_deref() == Ok(list) {
                return Ok(name);
            }
        }
    }
    Err(NameError::InvalidDecomposition)
}

fn bump(poly: &mut Vec<(u32, u64)>, k: u32) {
    match poly.iter_mut().find(|t| t.0 == k) {
        Some(t) => t.1 += 1,
        None => poly.push((k, 1)),
    }
}

/// Canonical name of a disjoint union: the larger name, or `E` at the
/// common ordinal when the two sides are incomparable.
pub fn or_name(n1: &CanonicalName, n2: &CanonicalName) -> CanonicalName {
    match n1.compare(n2) {
        NameOrder::Less | NameOrder::Equal => n2.clone(),
        NameOrder::Greater => n1.clone(),
        NameOrder::Incomparable => CanonicalName::new(NameLetter::E, n1.ordinal.clone())
            .expect("E exists wherever C and D both do"),
    }
}

fn ensure_below_top(n: &CanonicalName) -> Result<(), NameError> {
    if n.is_top() {
        Err(NameError::TopOperand(n.clone()))
    } else {
        Ok(())
    }
}

/// Canonical name of a sequential composition.
pub fn oplus_name(n1: &CanonicalName, n2: &CanonicalName) -> Result<CanonicalName, NameError> {
    ensure_below_top(n1)?;
    ensure_below_top(n2)?;
    let mut acc = n2.clone();
    for s in components(n1)?.into_iter().rev() {
        acc = oplus_simple(s, Some(&acc));
    }
    Ok(acc)
}

/// The name of `rest` preceded by one simple component.
///
/// Concatenation is used whenever the combined component sequence is
/// itself a valid decomposition; the remaining cases either absorb the
/// weaker side, merge a component with its dual into the `E` component at
/// that level, or drop a dominated prefix of `rest` and retry.
fn oplus_simple(s: SimpleName, rest: Option<&CanonicalName>) -> CanonicalName {
    let Some(rest) = rest else {
        return s.name();
    };
    match s {
        SimpleName::UnitE => {
            let c = oplus_simple(SimpleName::UnitC, Some(rest));
            let d = oplus_simple(SimpleName::UnitD, Some(rest));
            return or_name(&c, &d);
        }
        SimpleName::FlowerE(k) => {
            let c = oplus_simple(SimpleName::FlowerC(k), Some(rest));
            let d = oplus_simple(SimpleName::FlowerD(k), Some(rest));
            return or_name(&c, &d);
        }
        _ => {}
    }
    let comps = components(rest).expect("operands stay below the top names");
    let mut with_head = Vec::with_capacity(comps.len() + 1);
    with_head.push(s);
    with_head.extend_from_slice(&comps);
    if let Ok(name) = recompose(&with_head) {
        return name;
    }
    if rest.lt(&s.name()) {
        return s.name();
    }
    let head = comps[0];
    let dual = matches!(
        (s, head),
        (SimpleName::UnitC, SimpleName::UnitD) | (SimpleName::UnitD, SimpleName::UnitC)
    ) || matches!(
        (s, head),
        (SimpleName::FlowerC(a), SimpleName::FlowerD(b)) if a == b
    ) || matches!(
        (s, head),
        (SimpleName::FlowerD(a), SimpleName::FlowerC(b)) if a == b
    );
    if dual {
        let mut merged = vec![s, s.e_at_level().expect("duals are non-branching")];
        merged.extend_from_slice(&comps[1..]);
        return recompose(&merged).expect("dual merge yields a valid sequence");
    }
    if matches!(head.compare(&s), NameOrder::Greater | NameOrder::Equal) {
        return rest.clone();
    }
    // The head is strictly weaker: everything below s is dominated. Fold
    // the surviving suffix back into a name and retry.
    let suffix: Vec<SimpleName> = comps
        .iter()
        .copied()
        .skip_while(|c| c.compare(&s) == NameOrder::Less)
        .collect();
    debug_assert!(!suffix.is_empty(), "rest >= s must leave a suffix");
    oplus_simple(s, Some(&fold_components(&suffix)))
}

/// The canonical name of a left-to-right composition of components.
fn fold_components(list: &[SimpleName]) -> CanonicalName {
    let mut acc: Option<CanonicalName> = None;
    for &s in list.iter().rev() {
        acc = Some(oplus_simple(s, acc.as_ref()));
    }
    acc.expect("nonempty component list")
}

/// The tail of a decomposition as a name, when anything remains.
fn tail_name(comps: &[SimpleName]) -> Option<CanonicalName> {
    if comps.len() <= 1 {
        None
    } else {
        Some(fold_components(&comps[1..]))
    }
}

/// Canonical name of an intersection-style product.
pub fn and_name(n1: &CanonicalName, n2: &CanonicalName) -> Result<CanonicalName, NameError> {
    ensure_below_top(n1)?;
    ensure_below_top(n2)?;
    Ok(and_rec(n1, n2))
}

fn and_rec(a: &CanonicalName, b: &CanonicalName) -> CanonicalName {
    // Split an E name into its two letters and distribute.
    if a.letter == NameLetter::E {
        let c = CanonicalName::new(NameLetter::C, a.ordinal.clone()).unwrap();
        let d = CanonicalName::new(NameLetter::D, a.ordinal.clone()).unwrap();
        return or_name(&and_rec(&c, b), &and_rec(&d, b));
    }
    if b.letter == NameLetter::E {
        return and_rec(b, a);
    }
    let ca = components(a).expect("below top");
    let cb = components(b).expect("below top");
    let (ca, cb, a, b) = if branch_level(cb[0]) >= branch_level(ca[0]) {
        (ca, cb, a, b)
    } else {
        (cb, ca, b, a)
    };
    // Now if any head is branching, b's head is, at the higher level.
    let b1 = cb[0];
    if b1.is_branching() {
        let a_tail = tail_name(&ca);
        let b_tail = tail_name(&cb);
        let inner = match (a_tail, b_tail) {
            (Some(at), Some(bt)) => {
                let left = and_rec(&at, b);
                let right = and_rec(a, &oplus_simple(SimpleName::UnitC, Some(&bt)));
                or_name(&left, &right)
            }
            (None, Some(bt)) => and_rec(a, &oplus_simple(SimpleName::UnitC, Some(&bt))),
            (Some(at), None) => or_name(&and_rec(&at, b), a),
            (None, None) => a.clone(),
        };
        return bminus_oplus(b1, Some(&inner));
    }
    // Both heads are flowers (possibly trivial).
    let fa = ca[0].flower_index().expect("non-branching head");
    let fb = cb[0].flower_index().expect("non-branching head");
    let meet = flower_name(fa.and(&fb));
    let a_tail = tail_name(&ca);
    let b_tail = tail_name(&cb);
    let inner = match (a_tail, b_tail) {
        (Some(at), Some(bt)) => Some(or_name(&and_rec(a, &bt), &and_rec(&at, b))),
        (Some(at), None) => Some(and_rec(&at, b)),
        (None, Some(bt)) => Some(and_rec(a, &bt)),
        (None, None) => None,
    };
    match inner {
        Some(inner) => oplus_name(&meet, &inner).expect("below top"),
        None => meet,
    }
}

/// The level a head component occupies for choosing the branching side:
/// branching heads win ties against non-branching ones.
fn branch_level(s: SimpleName) -> (bool, Ordinal) {
    (s.is_branching(), s.level())
}

/// Canonical name of `rest` guarded by a branching component whose head
/// loop has been made rejecting.
pub fn bminus_oplus_name(
    band: &CanonicalName,
    rest: Option<&CanonicalName>,
) -> Result<CanonicalName, NameError> {
    let comps = components(band).map_err(|_| NameError::InvalidBand)?;
    match comps.as_slice() {
        [s] if s.is_branching() => {
            if let Some(r) = rest {
                ensure_below_top(r)?;
            }
            Ok(bminus_oplus(*s, rest))
        }
        _ => Err(NameError::InvalidBand),
    }
}

fn bminus_oplus(band: SimpleName, rest: Option<&CanonicalName>) -> CanonicalName {
    let Some(rest) = rest else {
        // With nothing to escape to, the rejecting head loop wins every
        // play, which is exactly the weakest rejecting name.
        return SimpleName::UnitD.name();
    };
    let comps = components(rest).expect("below top");
    let head = comps[0];
    let tail = tail_name(&comps);
    match head {
        SimpleName::UnitD => match tail {
            None => SimpleName::UnitD.name(),
            Some(t) => bminus_oplus(band, Some(&t)),
        },
        SimpleName::BranchLow(_) | SimpleName::BranchHigh(_)
            if head.level() >= band.level() =>
        {
            rest.clone()
        }
        SimpleName::FlowerC(_) | SimpleName::FlowerD(_) | SimpleName::FlowerE(_)
            if matches!(band, SimpleName::BranchLow(_)) =>
        {
            rest.clone()
        }
        _ => match tail {
            None => band.name(),
            Some(t) => oplus_name(&band.name(), &t).expect("below top"),
        },
    }
}

/// Canonical name of "restart into `a` or run `b`" (`b` below the top
/// names). A top-valued `a` dwarfs everything a restart loop can add.
pub fn arrow_name(a: &CanonicalName, b: &CanonicalName) -> Result<CanonicalName, NameError> {
    ensure_below_top(b)?;
    let d1 = SimpleName::UnitD.name();
    if *b == d1 {
        return Ok(or_name(a, &d1));
    }
    if a.is_top() {
        return Ok(a.clone());
    }
    let name = |letter, ordinal: Ordinal| CanonicalName::new(letter, ordinal).unwrap();
    let e2 = name(NameLetter::E, Ordinal::nat(2));
    if *b == e2 {
        return arrow_name(a, &name(NameLetter::D, Ordinal::nat(3)));
    }
    let small = [
        SimpleName::UnitC.name(),
        SimpleName::UnitE.name(),
        name(NameLetter::C, Ordinal::nat(2)),
        name(NameLetter::D, Ordinal::nat(2)),
        name(NameLetter::D, Ordinal::nat(3)),
    ];
    let d1_oplus_a = oplus_name(&d1, a)?;
    if small.contains(b) {
        return and_name(&d1_oplus_a, b);
    }
    let cf0 = SimpleName::FlowerC(0).name();
    let df0 = SimpleName::FlowerD(0).name();
    let cf1 = SimpleName::FlowerC(1).name();
    if b.geq(&cf0) || b.geq(&df0) {
        if !b.geq(&cf1) {
            // Nontrivial flowers are present but nothing two-alternation
            // deep on the accepting side.
            if *b == cf0 {
                return and_name(&d1_oplus_a, &cf0);
            }
            if *b == df0 {
                return and_name(&d1_oplus_a, &df0);
            }
            return and_name(&and_name(&d1_oplus_a, &cf0)?, &df0);
        }
        // Two-alternation flowers force the high branching band.
        let mut k = 0;
        while !b.leq(&SimpleName::BranchHigh(k).name()) {
            k += 1;
        }
        return bminus_oplus_name(&SimpleName::BranchHigh(k).name(), Some(a));
    }
    // No nontrivial flowers: the low branching band, at the least level
    // covering b.
    let mut k = 1;
    while !b.leq(&SimpleName::BranchLow(k).name()) {
        k += 1;
    }
    bminus_oplus_name(&SimpleName::BranchLow(k).name(), Some(a))
}

/// Canonical name of a ranked replication: `base` extended with a rank
/// window `[iota, kappa]` whose rank-`i` loops each replicate `reps[i]`.
///
/// The three unbounded degrees are detected first from name structure: a
/// replicated name reaching a one-alternation flower under an available
/// even rank, a two-alternation flower under an available odd rank inside
/// a two-parity window, or an operand already at an unbounded degree.
pub fn krep_name(
    base: &CanonicalName,
    index: Index,
    reps: &[CanonicalName],
) -> Result<CanonicalName, NameError> {
    let expected = (index.kappa() - index.iota() + 1) as usize;
    if reps.len() != expected {
        return Err(NameError::ArityMismatch { expected, got: reps.len() });
    }
    let top = |k: u8| CanonicalName::new(NameLetter::C, Ordinal::top(k)).unwrap();
    let operands = || std::iter::once(base).chain(reps.iter());
    // Highest unbounded degree first.
    if operands().any(|n| *n == top(2)) {
        return Ok(top(2));
    }
    let iota = index.iota();
    let kappa = index.kappa();
    let cf0 = SimpleName::FlowerC(0).name();
    let cf1 = SimpleName::FlowerC(1).name();
    let even_in = |lo: u32| lo % 2 == 0 || lo < kappa;
    let odd_in = |lo: u32| lo % 2 == 1 || lo < kappa;
    let replicated_at_even = reps
        .iter()
        .enumerate()
        .any(|(j, n)| n.geq(&cf0) && even_in(iota + j as u32));
    if operands().any(|n| n.geq(&top(1))) || replicated_at_even {
        return Ok(top(1));
    }
    let replicated_at_odd = reps
        .iter()
        .enumerate()
        .any(|(j, n)| n.geq(&cf1) && odd_in(iota + j as u32));
    if operands().any(|n| n.geq(&top(0))) || (replicated_at_odd && iota < kappa) {
        return Ok(top(0));
    }
    let df0 = SimpleName::FlowerD(0).name();
    let d2 = CanonicalName::new(NameLetter::D, Ordinal::nat(2)).unwrap();
    if iota == kappa {
        let rep = &reps[0];
        if kappa % 2 == 1 {
            return arrow_name(base, rep);
        }
        let c1 = SimpleName::UnitC.name();
        let guarded = oplus_name(&c1, base)?;
        if rep.geq(&d2) {
            return and_name(&guarded, &df0);
        }
        if *rep == SimpleName::UnitE.name() {
            // An accepting head loop that may spawn one all-or-nothing choice
            // per turn: the player keeps an irrevocable rejection available
            // forever (or escapes into the base), which is one closed layer on
            // top of the alternative between the base and the rejecting unit.
            let d1 = SimpleName::UnitD.name();
            return oplus_name(&c1, &or_name(base, &d1));
        }
        return and_name(&guarded, rep);
    }
    let has_cf = reps.iter().any(|n| n.geq(&cf0));
    let has_df = reps.iter().any(|n| n.geq(&df0));
    let flower = flower_name(index);
    let seeded = oplus_name(&flower, base)?;
    match (has_cf, has_df) {
        (true, true) => and_name(&and_name(&seeded, &df0)?, &cf0),
        (false, true) => and_name(&seeded, &df0),
        (true, false) => {
            // Only the topmost rank can carry the accepting-side flower, so
            // replace it and honor it with a conjunct instead.
            let mut trimmed = reps.to_vec();
            *trimmed.last_mut().unwrap() = SimpleName::UnitC.name();
            let inner = krep_name(base, index, &trimmed)?;
            and_name(&inner, &cf0)
        }
        (false, false) => {
            if iota == 0 && reps[0].geq(&d2) {
                and_name(&seeded, &df0)
            } else {
                Ok(seeded)
            }
        }
    }
}
