use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use super::StlError;

/// Inclusive integer time interval `[start, end]` with `end > start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    start: u32,
    end: u32,
}

impl Interval {
    pub fn new(start: u32, end: u32) -> Result<Self, StlError> {
        if end <= start {
            return Err(StlError::InvalidInterval { start: start as i64, end: end as i64 });
        }
        Ok(Self { start, end })
    }

    #[inline]
    pub fn start(self) -> usize {
        self.start as usize
    }

    #[inline]
    pub fn end(self) -> usize {
        self.end as usize
    }

    /// Offsets `start..=end` as a range.
    pub fn offsets(self) -> core::ops::RangeInclusive<usize> {
        self.start()..=self.end()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

/// STL abstract syntax tree over indexed predicates `y_i >= 0`.
///
/// Predicate indices are zero-based here; the text syntax writes `p1` for
/// index 0.
#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Predicate(usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Eventually(Interval, Box<Formula>),
    Always(Interval, Box<Formula>),
    Until(Interval, Box<Formula>, Box<Formula>),
    Release(Interval, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn pred(index: usize) -> Self {
        Formula::Predicate(index)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Conjunction. Nested conjunctions are flattened, a single child is
    /// returned as is. Panics on an empty list.
    pub fn and(children: Vec<Formula>) -> Self {
        Self::nary(children, true)
    }

    /// Disjunction, flattened like [`Formula::and`].
    pub fn or(children: Vec<Formula>) -> Self {
        Self::nary(children, false)
    }

    fn nary(children: Vec<Formula>, conj: bool) -> Self {
        assert!(!children.is_empty(), "empty boolean connective");
        let mut flat = Vec::with_capacity(children.len());
        for c in children {
            match c {
                Formula::And(inner) if conj => flat.extend(inner),
                Formula::Or(inner) if !conj => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            return flat.pop().unwrap();
        }
        if conj {
            Formula::And(flat)
        } else {
            Formula::Or(flat)
        }
    }

    pub fn eventually(i: Interval, f: Formula) -> Self {
        Formula::Eventually(i, Box::new(f))
    }

    pub fn always(i: Interval, f: Formula) -> Self {
        Formula::Always(i, Box::new(f))
    }

    pub fn until(i: Interval, left: Formula, right: Formula) -> Self {
        Formula::Until(i, Box::new(left), Box::new(right))
    }

    pub fn release(i: Interval, left: Formula, right: Formula) -> Self {
        Formula::Release(i, Box::new(left), Box::new(right))
    }

    /// Number of future steps the robustness at `t` depends on.
    pub fn horizon(&self) -> usize {
        match self {
            Formula::Predicate(_) => 0,
            Formula::Not(f) => f.horizon(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::horizon).max().unwrap_or(0),
            Formula::Eventually(i, f) | Formula::Always(i, f) => i.end() + f.horizon(),
            // Release through its defining identity has the same horizon as until.
            Formula::Until(i, l, r) | Formula::Release(i, l, r) => i.end() + l.horizon().max(r.horizon()),
        }
    }

    /// Largest predicate index plus one (zero for formulas without predicates).
    pub fn predicate_count(&self) -> usize {
        let mut max = 0;
        self.visit_predicates(&mut |i, _| max = max.max(i + 1));
        max
    }

    /// Calls `f(index, negated)` for every predicate occurrence, where
    /// `negated` is the parity of enclosing negations.
    pub fn visit_predicates(&self, f: &mut impl FnMut(usize, bool)) {
        self.visit_inner(false, f)
    }

    fn visit_inner(&self, neg: bool, f: &mut impl FnMut(usize, bool)) {
        match self {
            Formula::Predicate(i) => f(*i, neg),
            Formula::Not(g) => g.visit_inner(!neg, f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_inner(neg, f)),
            Formula::Eventually(_, g) | Formula::Always(_, g) => g.visit_inner(neg, f),
            Formula::Until(_, l, r) | Formula::Release(_, l, r) => {
                l.visit_inner(neg, f);
                r.visit_inner(neg, f);
            }
        }
    }

    /// True when the formula contains no negation.
    pub fn is_negation_free(&self) -> bool {
        match self {
            Formula::Predicate(_) => true,
            Formula::Not(_) => false,
            Formula::And(gs) | Formula::Or(gs) => gs.iter().all(Formula::is_negation_free),
            Formula::Eventually(_, g) | Formula::Always(_, g) => g.is_negation_free(),
            Formula::Until(_, l, r) | Formula::Release(_, l, r) => {
                l.is_negation_free() && r.is_negation_free()
            }
        }
    }

    pub fn contains_release(&self) -> bool {
        match self {
            Formula::Predicate(_) => false,
            Formula::Release(..) => true,
            Formula::Not(g) | Formula::Eventually(_, g) | Formula::Always(_, g) => g.contains_release(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().any(Formula::contains_release),
            Formula::Until(_, l, r) => l.contains_release() || r.contains_release(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self {
            Formula::Predicate(_) => 0,
            Formula::Not(g) | Formula::Eventually(_, g) | Formula::Always(_, g) => g.size(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().map(Formula::size).sum(),
            Formula::Until(_, l, r) | Formula::Release(_, l, r) => l.size() + r.size(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Predicate(i) => write!(f, "p{}", i + 1),
            Formula::Not(g) => write!(f, "!{}", Paren(g)),
            Formula::And(gs) => join(f, gs, " & "),
            Formula::Or(gs) => join(f, gs, " | "),
            Formula::Eventually(i, g) => write!(f, "F{} {}", i, Paren(g)),
            Formula::Always(i, g) => write!(f, "G{} {}", i, Paren(g)),
            Formula::Until(i, l, r) => write!(f, "{} U{} {}", Paren(l), i, Paren(r)),
            Formula::Release(i, l, r) => write!(f, "{} R{} {}", Paren(l), i, Paren(r)),
        }
    }
}

fn join(f: &mut fmt::Formatter<'_>, gs: &[Formula], sep: &str) -> fmt::Result {
    for (k, g) in gs.iter().enumerate() {
        if k > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{}", Paren(g))?;
    }
    Ok(())
}

/// Parenthesizes everything except predicates so the printed text re-parses
/// to the same tree.
struct Paren<'a>(&'a Formula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::Predicate(_) => write!(f, "{}", self.0),
            other => write!(f, "({})", other),
        }
    }
}
