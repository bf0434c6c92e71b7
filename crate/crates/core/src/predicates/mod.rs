//! The predicate family built on exact CI relations: `tri`, `ueq`, `fnf`,
//! `end`, `conv`, `comp` and `eq`.
//!
//! Each predicate comes in a witness-checked form, where every existential
//! variable is supplied by the caller, and where an equivalence is known, a
//! semantic form decided through the group labeling.

mod conv;
mod end;

pub use conv::{comp_check, conv13_check, conv13_semantic, conv32_check, conv32_semantic, eq_check};
pub use end::{
    end_check_witness, end_check_witness_ij, end_semantic, end_semantic_ij, end_semantic_search, make_end_witnesses,
    make_end_witnesses_ij, with_end_witnesses, EndWitnesses,
};

use serde_json::json;
use thiserror::Error;

use crate::exactprob::{DistError, JointDistribution};
use crate::finalg::{AlgError, Endo};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PredError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error("invalid index pair ({0},{1})")]
    IndexPair(u8, u8),
    #[error("{0} endomorphisms match; expected at most one")]
    NotUnique(usize),
}

/// Outcome of evaluating a predicate: the first failing clause, if any,
/// and the endomorphism recovered along the way, if any.
#[derive(Clone, Debug)]
pub struct PredicateReport {
    pub name: String,
    pub holds: bool,
    pub failing_clause: Option<String>,
    pub recovered_endo: Option<Endo>,
}

impl PredicateReport {
    pub fn pass(name: impl Into<String>) -> Self {
        PredicateReport {
            name: name.into(),
            holds: true,
            failing_clause: None,
            recovered_endo: None,
        }
    }

    pub fn fail(name: impl Into<String>, clause: impl Into<String>) -> Self {
        PredicateReport {
            name: name.into(),
            holds: false,
            failing_clause: Some(clause.into()),
            recovered_endo: None,
        }
    }

    pub fn with_endo(mut self, g: Option<Endo>) -> Self {
        self.recovered_endo = g;
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "predicate": self.name,
            "holds": self.holds,
            "failing_clause": self.failing_clause,
            "recovered_endo": self.recovered_endo.as_ref().map(|g| g.table().to_vec()),
        })
    }

    pub fn render(&self) -> String {
        let mut s = format!("{}: {}", self.name, if self.holds { "holds" } else { "fails" });
        if let Some(c) = &self.failing_clause {
            s.push_str(&format!("\n  first failing clause: {c}"));
        }
        if let Some(g) = &self.recovered_endo {
            s.push_str(&format!("\n  recovered endomorphism: {:?}", g.table()));
        }
        s
    }
}

/// Evaluates clauses in order and stops at the first failure.
pub(crate) struct Clauses {
    name: String,
    failed: Option<String>,
}

impl Clauses {
    pub(crate) fn new(name: impl Into<String>) -> Self {
        Clauses {
            name: name.into(),
            failed: None,
        }
    }

    pub(crate) fn check<F>(&mut self, text: impl FnOnce() -> String, f: F) -> Result<&mut Self, DistError>
    where
        F: FnOnce() -> Result<bool, DistError>,
    {
        if self.failed.is_none() && !f()? {
            self.failed = Some(text());
        }
        Ok(self)
    }

    /// Folds a sub-predicate in; its failing clause is prefixed with its
    /// name.
    pub(crate) fn sub(&mut self, r: &PredicateReport) -> &mut Self {
        if self.failed.is_none() && !r.holds {
            self.failed = Some(format!(
                "{}: {}",
                r.name,
                r.failing_clause.as_deref().unwrap_or("fails")
            ));
        }
        self
    }

    pub(crate) fn ok(&self) -> bool {
        self.failed.is_none()
    }

    pub(crate) fn finish(&self) -> PredicateReport {
        match &self.failed {
            None => PredicateReport::pass(self.name.clone()),
            Some(c) => PredicateReport::fail(self.name.clone(), c.clone()),
        }
    }
}

pub(crate) fn show(set: &[&str]) -> String {
    match set {
        [] => "∅".to_string(),
        [one] => one.to_string(),
        many => format!("({})", many.join(" ")),
    }
}

pub(crate) fn union<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    let mut v: Vec<&str> = a.to_vec();
    for x in b {
        if !v.contains(x) {
            v.push(x);
        }
    }
    v
}

/// `tri(Y1, Y2, Y3)`: each set is a function of the other two, and the
/// three are pairwise independent.
pub fn tri(d: &JointDistribution, y1: &[&str], y2: &[&str], y3: &[&str]) -> Result<PredicateReport, DistError> {
    let name = format!("tri({}, {}, {})", show(y1), show(y2), show(y3));
    let mut c = Clauses::new(name);
    let ys = [y1, y2, y3];
    for i in 0..3 {
        let (a, b) = (ys[(i + 1) % 3], ys[(i + 2) % 3]);
        let ab = union(a, b);
        c.check(|| format!("{} ι≤ {}", show(ys[i]), show(&ab)), || d.is_function_of(ys[i], &ab))?;
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        c.check(|| format!("{} ⊥ {}", show(ys[i]), show(ys[j])), || d.is_ci(ys[i], ys[j], &[]))?;
    }
    Ok(c.finish())
}

/// `ueq(X, Y)`: both uniform over supports of equal size.
pub fn ueq_semantic(d: &JointDistribution, x: &[&str], y: &[&str]) -> Result<bool, DistError> {
    Ok(d.is_uniform(x)? && d.is_uniform(y)? && d.support_size(x)? == d.support_size(y)?)
}

/// `X =ι Y | Z` as a clause list.
pub(crate) fn iota_eq_given_clause(
    c: &mut Clauses,
    d: &JointDistribution,
    x: &[&str],
    y: &[&str],
    z: &[&str],
) -> Result<(), DistError> {
    c.check(
        || format!("{} =ι {} | {}", show(x), show(y), show(z)),
        || d.iota_eq_given(x, y, z),
    )?;
    Ok(())
}

/// A relabeling of the indices 1, 2, 3 applied to A-variable names, used to
/// derive every index-permuted predicate from its (1,2) template.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexPerm {
    map: [u8; 3],
}

impl IndexPerm {
    pub const IDENTITY: IndexPerm = IndexPerm { map: [1, 2, 3] };

    /// The permutation sending 1 ↦ i and 2 ↦ j (and 3 to the remaining
    /// index).
    pub fn sending(i: u8, j: u8) -> Option<IndexPerm> {
        if i == j || !(1..=3).contains(&i) || !(1..=3).contains(&j) {
            return None;
        }
        Some(IndexPerm { map: [i, j, 6 - i - j] })
    }

    pub fn image(&self, idx: u8) -> u8 {
        self.map[idx as usize - 1]
    }

    /// Applies the permutation to a name of the form `A<digits>`; other
    /// names pass through unchanged.
    pub fn apply(&self, name: &str) -> String {
        match name.strip_prefix('A') {
            Some(digits) if !digits.is_empty() && digits.bytes().all(|b| (b'1'..=b'3').contains(&b)) => {
                let mut mapped: Vec<u8> = digits.bytes().map(|b| self.image(b - b'0') + b'0').collect();
                mapped.sort_unstable();
                format!("A{}", String::from_utf8(mapped).unwrap())
            }
            _ => name.to_string(),
        }
    }
}

/// The seven canonical variable names.
pub const A_NAMES: [&str; 7] = ["A1", "A2", "A3", "A12", "A13", "A23", "A123"];

/// Dependent 3-sets of the non-Fano configuration, as indices into
/// [`A_NAMES`].
pub const D_N: [[usize; 3]; 6] = [[0, 1, 3], [0, 2, 4], [1, 2, 5], [0, 5, 6], [1, 4, 6], [2, 3, 6]];

/// The extra dependent 3-set of the Fano configuration.
pub const FANO_EXTRA: [usize; 3] = [3, 4, 5];

/// Independent 3-sets of the Fano configuration (the 28 remaining
/// 3-subsets), in lexicographic order.
pub fn i_f() -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..7 {
        for b in a + 1..7 {
            for c in b + 1..7 {
                let t = [a, b, c];
                if !D_N.contains(&t) && t != FANO_EXTRA {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Full form: `tri` on the six non-Fano lines and mutual independence on
/// the 28 Fano-independent triples.
pub fn fnf_full(d: &JointDistribution) -> Result<PredicateReport, DistError> {
    let mut c = Clauses::new("fnf");
    fnf_tri_part(&mut c, d)?;
    for t in i_f() {
        let [x, y, z] = t.map(|i| A_NAMES[i]);
        c.check(|| format!("{x} ⊥ {y} ⊥ {z}"), || d.mutual_indep3(&[x], &[y], &[z]))?;
    }
    Ok(c.finish())
}

/// Reduced form: the six `tri` plus `A1 ⊥ A2 ⊥ A3`.
pub fn fnf_reduced(d: &JointDistribution) -> Result<PredicateReport, DistError> {
    let mut c = Clauses::new("fnf");
    fnf_tri_part(&mut c, d)?;
    c.check(|| "A1 ⊥ A2 ⊥ A3".into(), || d.mutual_indep3(&["A1"], &["A2"], &["A3"]))?;
    Ok(c.finish())
}

fn fnf_tri_part(c: &mut Clauses, d: &JointDistribution) -> Result<(), DistError> {
    for t in D_N {
        if !c.ok() {
            break;
        }
        let [x, y, z] = t.map(|i| A_NAMES[i]);
        c.sub(&tri(d, &[x], &[y], &[z])?);
    }
    Ok(())
}
