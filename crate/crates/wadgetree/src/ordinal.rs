//! Ordinals below w^(w*3)+3 in Cantor normal form, and the
//! Mostowski-Rabin index lattice.
//!
//! Every ordinal this crate manipulates is either one of the three top
//! values `TOP`, `TOP+1`, `TOP+2` (where `TOP` stands for w^(w*3)) or an
//! ordinal strictly below w^(w*3). The latter have a unique presentation
//!
//! ```text
//! alpha = w^(w*2)*a2 + w^w*a1 + a0        with a2, a1, a0 < w^w
//! ```
//!
//! and each coefficient below w^w is a polynomial in w. The canonicalization
//! algebra branches on this base-w^w triple constantly, so the triple is the
//! stored representation; the flat base-w Cantor normal form is exposed as a
//! derived view.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A polynomial in w: a finite sum `w^e1*c1 + ... + w^ek*ck` with strictly
/// decreasing exponents and coefficients >= 1. The empty sum denotes zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct OmegaPoly {
    terms: Vec<(u32, u64)>,
}

impl OmegaPoly {
    pub fn zero() -> Self {
        OmegaPoly { terms: Vec::new() }
    }

    /// The finite ordinal `n` (empty when `n = 0`).
    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            OmegaPoly { terms: vec![(0, n)] }
        }
    }

    /// The single term `w^exponent * coefficient`.
    pub fn monomial(exponent: u32, coefficient: u64) -> Self {
        if coefficient == 0 {
            Self::zero()
        } else {
            OmegaPoly { terms: vec![(exponent, coefficient)] }
        }
    }

    /// Builds a polynomial from terms in strictly decreasing exponent order.
    pub fn from_terms(terms: Vec<(u32, u64)>) -> Result<Self, OrdinalError> {
        for pair in terms.windows(2) {
            if pair[0].0 <= pair[1].0 {
                return Err(OrdinalError::NonDescendingExponents);
            }
        }
        if terms.iter().any(|&(_, c)| c == 0) {
            return Err(OrdinalError::ZeroCoefficient);
        }
        Ok(OmegaPoly { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in strictly decreasing exponent order.
    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    /// The leading (largest-exponent) term.
    pub fn leading(&self) -> Option<(u32, u64)> {
        self.terms.first().copied()
    }

    /// The value as a natural number, when the polynomial is finite.
    pub fn finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, n)] => Some(*n),
            _ => None,
        }
    }

    /// Splits off the trailing finite part: `w*p + n` becomes `(p, n)` where
    /// `p` has no constant term.
    pub fn split_finite(&self) -> (OmegaPoly, u64) {
        match self.terms.last() {
            Some(&(0, n)) => (
                OmegaPoly { terms: self.terms[..self.terms.len() - 1].to_vec() },
                n,
            ),
            _ => (self.clone(), 0),
        }
    }
}

impl Ord for OmegaPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            match a.0.cmp(&b.0).then(a.1.cmp(&b.1)) {
                Ordering::Equal => continue,
                non_eq => return non_eq,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for OmegaPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An ordinal at most w^(w*3)+2.
///
/// `Below` stores the unique presentation `w^(w*2)*a2 + w^w*a1 + a0`;
/// `Top(k)` denotes `w^(w*3) + k` for `k` in `{0, 1, 2}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Ordinal {
    Below { a2: OmegaPoly, a1: OmegaPoly, a0: OmegaPoly },
    Top(u8),
}

/// A single term of the flat base-w Cantor normal form: `w^(w*band+k) * coeff`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CnfTerm {
    pub band: u8,
    pub k: u32,
    pub coeff: u64,
}

impl Ordinal {
    pub const ZERO: Ordinal = Ordinal::Below {
        a2: OmegaPoly { terms: Vec::new() },
        a1: OmegaPoly { terms: Vec::new() },
        a0: OmegaPoly { terms: Vec::new() },
    };

    /// The finite ordinal `n`.
    pub fn nat(n: u64) -> Self {
        Ordinal::Below { a2: OmegaPoly::zero(), a1: OmegaPoly::zero(), a0: OmegaPoly::nat(n) }
    }

    /// `w^(w*3) + k` for `k` in `{0, 1, 2}`.
    pub fn top(k: u8) -> Self {
        assert!(k <= 2, "only TOP, TOP+1, TOP+2 exist");
        Ordinal::Top(k)
    }

    pub fn from_parts(a2: OmegaPoly, a1: OmegaPoly, a0: OmegaPoly) -> Self {
        Ordinal::Below { a2, a1, a0 }
    }

    /// `w^(w*band + k) * coeff`.
    pub fn power(band: u8, k: u32, coeff: u64) -> Self {
        let poly = OmegaPoly::monomial(k, coeff);
        match band {
            0 => Ordinal::Below { a2: OmegaPoly::zero(), a1: OmegaPoly::zero(), a0: poly },
            1 => Ordinal::Below { a2: OmegaPoly::zero(), a1: poly, a0: OmegaPoly::zero() },
            2 => Ordinal::Below { a2: poly, a1: OmegaPoly::zero(), a0: OmegaPoly::zero() },
            _ => panic!("band must be 0, 1, or 2"),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Ordinal::Below { a2, a1, a0 } if a2.is_zero() && a1.is_zero() && a0.is_zero())
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Ordinal::Top(_))
    }

    /// The value as a natural number, when finite.
    pub fn finite(&self) -> Option<u64> {
        match self {
            Ordinal::Below { a2, a1, a0 } if a2.is_zero() && a1.is_zero() => a0.finite(),
            _ => None,
        }
    }

    /// The base-w^w digits `(a2, a1, a0)`; absent for the top values.
    pub fn parts(&self) -> Option<(&OmegaPoly, &OmegaPoly, &OmegaPoly)> {
        match self {
            Ordinal::Below { a2, a1, a0 } => Some((a2, a1, a0)),
            Ordinal::Top(_) => None,
        }
    }

    /// The flat base-w Cantor normal form, terms in strictly decreasing
    /// exponent order; absent for the top values.
    pub fn cnf_terms(&self) -> Option<Vec<CnfTerm>> {
        let (a2, a1, a0) = self.parts()?;
        let mut out = Vec::new();
        for (band, poly) in [(2u8, a2), (1, a1), (0, a0)] {
            for &(k, coeff) in poly.terms() {
                out.push(CnfTerm { band, k, coeff });
            }
        }
        Some(out)
    }

    pub fn compare(&self, other: &Ordinal) -> Ordering {
        self.cmp(other)
    }
}

/// Errors from ordinal construction and parsing.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("empty ordinal text")]
    Empty,
    #[error("malformed term `{0}`")]
    MalformedTerm(String),
    #[error("exponents must be strictly decreasing")]
    NonDescendingExponents,
    #[error("coefficients must be at least 1")]
    ZeroCoefficient,
    #[error("exponent inside brackets must be at least 1")]
    ZeroExponent,
}

fn parse_nat(text: &str) -> Option<u64> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Parses one CNF term into `(band, k, coeff)`.
fn parse_term(term: &str) -> Result<CnfTerm, OrdinalError> {
    let malformed = || OrdinalError::MalformedTerm(term.to_string());
    if let Some(n) = parse_nat(term) {
        if n == 0 {
            return Err(OrdinalError::ZeroCoefficient);
        }
        return Ok(CnfTerm { band: 0, k: 0, coeff: n });
    }
    let (body, coeff) = match term.rsplit_once('*') {
        // A coefficient separator only follows a complete term body; the `*`
        // inside `w^[w*2]` belongs to the exponent.
        Some((body, tail)) if body == "w" || body.ends_with(']') => {
            let c = parse_nat(tail).ok_or_else(malformed)?;
            if c == 0 {
                return Err(OrdinalError::ZeroCoefficient);
            }
            (body, c)
        }
        _ => (term, 1),
    };
    if body == "w" {
        return Ok(CnfTerm { band: 0, k: 1, coeff });
    }
    let exp = body
        .strip_prefix("w^[")
        .and_then(|rest| rest.strip_suffix(']'))
        .ok_or_else(malformed)?;
    let (band, k) = if exp == "w*2" {
        (2, 0)
    } else if let Some(tail) = exp.strip_prefix("w*2+") {
        (2, parse_nat(tail).filter(|&n| n > 0).ok_or_else(malformed)?)
    } else if exp == "w" {
        (1, 0)
    } else if let Some(tail) = exp.strip_prefix("w+") {
        (1, parse_nat(tail).filter(|&n| n > 0).ok_or_else(malformed)?)
    } else {
        let k = parse_nat(exp).ok_or_else(malformed)?;
        if k == 0 {
            return Err(OrdinalError::ZeroExponent);
        }
        (0, k)
    };
    let k = u32::try_from(k).map_err(|_| malformed())?;
    Ok(CnfTerm { band, k, coeff })
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text {
            "" => return Err(OrdinalError::Empty),
            "TOP" => return Ok(Ordinal::Top(0)),
            "TOP+1" => return Ok(Ordinal::Top(1)),
            "TOP+2" => return Ok(Ordinal::Top(2)),
            _ => {}
        }
        let mut polys = [Vec::new(), Vec::new(), Vec::new()];
        let mut previous: Option<(u8, u32)> = None;
        for piece in text.split(" + ") {
            let term = parse_term(piece)?;
            if let Some(prev) = previous {
                if prev <= (term.band, term.k) {
                    return Err(OrdinalError::NonDescendingExponents);
                }
            }
            previous = Some((term.band, term.k));
            polys[term.band as usize].push((term.k, term.coeff));
        }
        let [p0, p1, p2] = polys;
        Ok(Ordinal::Below {
            a2: OmegaPoly::from_terms(p2)?,
            a1: OmegaPoly::from_terms(p1)?,
            a0: OmegaPoly::from_terms(p0)?,
        })
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = match self {
            Ordinal::Top(0) => return write!(f, "TOP"),
            Ordinal::Top(k) => return write!(f, "TOP+{k}"),
            Ordinal::Below { .. } => self.cnf_terms().expect("not a top value"),
        };
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, term) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match (term.band, term.k) {
                (0, 0) => write!(f, "{}", term.coeff)?,
                (0, 1) => write!(f, "w")?,
                (0, k) => write!(f, "w^[{k}]")?,
                (1, 0) => write!(f, "w^[w]")?,
                (1, k) => write!(f, "w^[w+{k}]")?,
                (2, 0) => write!(f, "w^[w*2]")?,
                (_, k) => write!(f, "w^[w*2+{k}]")?,
            }
            if term.coeff > 1 && (term.band, term.k) != (0, 0) {
                write!(f, "*{}", term.coeff)?;
            }
        }
        Ok(())
    }
}

/// A Mostowski-Rabin index: a pair `(iota, kappa)` with `iota` in `{0, 1}`
/// and `kappa >= iota`; the pair `(1, 0)` does not exist.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Index {
    iota: u8,
    kappa: u32,
}

/// Outcome of comparing two indices; duals of equal span are incomparable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IndexOrder {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl Index {
    pub fn new(iota: u32, kappa: u32) -> Result<Self, OrdinalError> {
        if iota > 1 || kappa < iota {
            return Err(OrdinalError::MalformedTerm(format!("({iota},{kappa})")));
        }
        Ok(Index { iota: iota as u8, kappa })
    }

    pub fn iota(&self) -> u32 {
        self.iota as u32
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// The number of rank alternations: `kappa - iota`.
    pub fn span(&self) -> u32 {
        self.kappa - self.iota as u32
    }

    /// `(0,k)` becomes `(1,k+1)`; `(1,k)` becomes `(0,k-1)`.
    pub fn dual(&self) -> Index {
        if self.iota == 0 {
            Index { iota: 1, kappa: self.kappa + 1 }
        } else {
            Index { iota: 0, kappa: self.kappa - 1 }
        }
    }

    /// An index is below another when it uses fewer ranks; dual indices of
    /// equal span are incomparable.
    pub fn compare(&self, other: &Index) -> IndexOrder {
        match self.span().cmp(&other.span()) {
            Ordering::Less => IndexOrder::Less,
            Ordering::Greater => IndexOrder::Greater,
            Ordering::Equal if self.iota == other.iota => IndexOrder::Equal,
            Ordering::Equal => IndexOrder::Incomparable,
        }
    }

    pub fn leq(&self, other: &Index) -> bool {
        matches!(self.compare(other), IndexOrder::Less | IndexOrder::Equal)
    }

    /// The type of the longest alternating chain in the product of the two
    /// rank ranges, where a pair is even exactly when both entries are even.
    ///
    /// Computed by dynamic programming over the product grid: the longest
    /// chain ending at a pair extends the longest chain of opposite pair
    /// parity ending strictly below it in the product order.
    pub fn and(&self, other: &Index) -> Index {
        let rows: Vec<u32> = (self.iota()..=self.kappa).collect();
        let cols: Vec<u32> = (other.iota()..=other.kappa).collect();
        let even = |i: u32, j: u32| i % 2 == 0 && j % 2 == 0;
        let mut best = vec![vec![0u32; cols.len()]; rows.len()];
        for (ri, &i) in rows.iter().enumerate() {
            for (ci, &j) in cols.iter().enumerate() {
                let mut longest = 0;
                for (ri2, &i2) in rows.iter().enumerate().take(ri + 1) {
                    for (ci2, &j2) in cols.iter().enumerate().take(ci + 1) {
                        if (i2, j2) != (i, j) && even(i2, j2) != even(i, j) {
                            longest = longest.max(best[ri2][ci2]);
                        }
                    }
                }
                best[ri][ci] = longest + 1;
            }
        }
        // Every maximal chain ends with the parity of the top corner: a chain
        // ending in the opposite parity could be extended by the corner.
        let corner_even = even(self.kappa, other.kappa);
        let mut length = 0;
        for (ri, &i) in rows.iter().enumerate() {
            for (ci, &j) in cols.iter().enumerate() {
                if even(i, j) == corner_even {
                    length = length.max(best[ri][ci]);
                }
            }
        }
        debug_assert_eq!(
            length,
            best.iter().flatten().copied().max().unwrap_or(0),
            "a longest chain must end in the corner parity"
        );
        let first_even = corner_even == (length % 2 == 1);
        let iota = if first_even { 0 } else { 1 };
        Index { iota, kappa: iota as u32 + length - 1 }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.iota, self.kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(text: &str) -> Ordinal {
        text.parse().expect(text)
    }

    fn idx(iota: u32, kappa: u32) -> Index {
        Index::new(iota, kappa).unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        let samples = [
            "1",
            "5",
            "w",
            "w + 1",
            "w*2 + 3",
            "w^[2]",
            "w^[3]*2 + w + 5",
            "w^[w]",
            "w^[w]*2",
            "w^[w+1]",
            "w^[w+2]*3 + w^[w] + w^[2] + 4",
            "w^[w*2]",
            "w^[w*2+1]*2 + w^[w] + 3",
            "w^[w*2] + w^[w] + 3",
            "TOP",
            "TOP+1",
            "TOP+2",
        ];
        for text in samples {
            assert_eq!(ord(text).to_string(), text);
        }
    }

    #[test]
    fn parse_rejects_malformed_text() {
        assert_eq!("".parse::<Ordinal>(), Err(OrdinalError::Empty));
        assert!("w^[0]".parse::<Ordinal>().is_err());
        assert!("0".parse::<Ordinal>().is_err());
        assert!("w^[w*3]".parse::<Ordinal>().is_err());
        assert!("w*0".parse::<Ordinal>().is_err());
        assert!("1 + w".parse::<Ordinal>().is_err());
        assert!("w + w".parse::<Ordinal>().is_err());
        assert!("TOP+3".parse::<Ordinal>().is_err());
        assert!("w^[1+w]".parse::<Ordinal>().is_err());
        assert!("x".parse::<Ordinal>().is_err());
    }

    #[test]
    fn exponent_one_prints_bare_and_reparses() {
        assert_eq!("w^[1]".parse::<Ordinal>().unwrap(), ord("w"));
        assert_eq!("w^[1]*4".parse::<Ordinal>().unwrap(), ord("w*4"));
    }

    #[test]
    fn comparison_follows_cantor_normal_form() {
        // w^w*2+3 < w^w*2+w: compare the trailing polynomials.
        assert!(ord("w^[w]*2 + 3") < ord("w^[w]*2 + w"));
        assert_eq!(ord("w^[w+1]").compare(&ord("w^[w+1]")), Ordering::Equal);
        // w^(w*2) dominates every w^w*k.
        assert!(ord("w^[w*2]") > ord("w^[w]*9"));
        assert!(ord("w^[w*2]") > ord("w^[w+7]*9 + w^[w]*3 + w^[5]"));
        // Top values sit above everything and are ordered among themselves.
        assert!(ord("TOP") > ord("w^[w*2+9]*5"));
        assert!(ord("TOP") < ord("TOP+1"));
        assert!(ord("TOP+1") < ord("TOP+2"));
        // Finite ordinals compare as naturals.
        assert!(ord("3") < ord("5"));
        assert!(ord("5") < ord("w"));
    }

    #[test]
    fn decomposition_exposes_base_omega_omega_digits() {
        let alpha = ord("w^[w*2]*2 + w^[w]*3 + 5");
        let (a2, a1, a0) = alpha.parts().unwrap();
        assert_eq!(a2.finite(), Some(2));
        assert_eq!(a1.finite(), Some(3));
        assert_eq!(a0.finite(), Some(5));

        let beta = ord("w^[3]*2 + w");
        let (b2, b1, b0) = beta.parts().unwrap();
        assert!(b2.is_zero());
        assert!(b1.is_zero());
        assert_eq!(b0.terms(), &[(3, 2), (1, 1)]);

        let gamma = ord("w^[w]");
        let (c2, c1, c0) = gamma.parts().unwrap();
        assert!(c2.is_zero());
        assert_eq!(c1.finite(), Some(1));
        assert!(c0.is_zero());
        assert!(ord("TOP").cnf_terms().is_none());
    }

    #[test]
    fn split_finite_peels_the_constant_term() {
        let (rest, n) = ord("w^[2]*2 + w + 4").parts().unwrap().2.split_finite();
        assert_eq!(n, 4);
        assert_eq!(rest.terms(), &[(2, 2), (1, 1)]);
        let (rest, n) = OmegaPoly::nat(7).split_finite();
        assert!(rest.is_zero());
        assert_eq!(n, 7);
    }

    /// Exhaustive search for the longest alternating chain, tried over all
    /// pair sequences rather than by the production dynamic program.
    fn brute_force_and(a: Index, b: Index) -> Index {
        fn extend(
            pairs: &[(u32, u32)],
            chain: &mut Vec<(u32, u32)>,
            best: &mut (u32, bool),
        ) {
            let even = |p: (u32, u32)| p.0 % 2 == 0 && p.1 % 2 == 0;
            if let Some(&last) = chain.last() {
                let len = chain.len() as u32;
                if len > best.0 {
                    *best = (len, even(last));
                }
            }
            for &p in pairs {
                let ok = match chain.last() {
                    None => true,
                    Some(&last) => {
                        p.0 >= last.0 && p.1 >= last.1 && p != last && even(p) != even(last)
                    }
                };
                if ok {
                    chain.push(p);
                    extend(pairs, chain, best);
                    chain.pop();
                }
            }
        }
        let mut pairs = Vec::new();
        for i in a.iota()..=a.kappa() {
            for j in b.iota()..=b.kappa() {
                pairs.push((i, j));
            }
        }
        let mut best = (0, false);
        extend(&pairs, &mut Vec::new(), &mut best);
        let (length, end_even) = best;
        let first_even = end_even == (length % 2 == 1);
        let iota = if first_even { 0 } else { 1 };
        Index::new(iota, iota + length - 1).unwrap()
    }

    #[test]
    fn index_and_matches_frozen_values() {
        assert_eq!(idx(0, 2).and(&idx(0, 2)), idx(0, 4));
        assert_eq!(idx(0, 2).and(&idx(1, 3)), idx(1, 5));
        assert_eq!(idx(0, 0).and(&idx(1, 1)), idx(1, 1));
        assert_eq!(idx(0, 0).and(&idx(0, 0)), idx(0, 0));
        assert_eq!(idx(1, 1).and(&idx(1, 1)), idx(1, 1));
        assert_eq!(idx(0, 1).and(&idx(0, 1)), idx(0, 1));
        assert_eq!(idx(1, 2).and(&idx(1, 2)), idx(1, 2));
        assert_eq!(idx(0, 1).and(&idx(1, 2)), idx(1, 3));
    }

    #[test]
    fn index_and_agrees_with_exhaustive_chain_search() {
        let mut all = Vec::new();
        for iota in 0..=1u32 {
            for kappa in iota..=iota + 4 {
                all.push(idx(iota, kappa));
            }
        }
        for &a in &all {
            for &b in &all {
                assert_eq!(a.and(&b), brute_force_and(a, b), "{a} and {b}");
            }
        }
    }

    #[test]
    fn index_and_is_commutative_associative_and_monotone() {
        let mut all = Vec::new();
        for iota in 0..=1u32 {
            for kappa in iota..=iota + 3 {
                all.push(idx(iota, kappa));
            }
        }
        for &a in &all {
            for &b in &all {
                assert_eq!(a.and(&b), b.and(&a));
                for &c in &all {
                    assert_eq!(a.and(&b).and(&c), a.and(&b.and(&c)));
                    if a.leq(&b) {
                        assert!(a.and(&c).leq(&b.and(&c)));
                    }
                }
            }
        }
    }

    #[test]
    fn index_dual_and_order() {
        assert_eq!(idx(0, 2).dual(), idx(1, 3));
        assert_eq!(idx(1, 3).dual(), idx(0, 2));
        assert_eq!(idx(1, 1).dual(), idx(0, 0));
        assert_eq!(idx(0, 1).compare(&idx(1, 2)), IndexOrder::Incomparable);
        assert!(idx(0, 0).leq(&idx(1, 2)));
        assert!(idx(0, 1).leq(&idx(0, 1)));
        assert!(!idx(1, 2).leq(&idx(0, 1)));
        assert!(idx(0, 1).leq(&idx(1, 3)));
    }
}
