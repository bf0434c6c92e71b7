use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ReductionError;
use crate::finalg::CayleyGroup;

/// Relation triples `x_a · x_b = x_c` over `x_1..x_k` with the goal
/// `x_1 = e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordProblemInstance {
    pub k: usize,
    #[serde(default)]
    pub relations: Vec<[usize; 3]>,
    /// Variable constrained by `e · e = e`, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<usize>,
    /// `a ↦ ā` with `ā · a = e`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inverses: BTreeMap<usize, usize>,
    /// Human-readable origin of each variable, index `j - 1`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<String>,
}

/// A signed letter: `j` is `x_j`, `-j` is `x_j⁻¹`.
pub type Word = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    /// `x_j = e`.
    Identity(usize),
    Equal(Word, Word),
}

/// Equations between words, and a goal equation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralWordProblem {
    pub k: usize,
    pub equations: Vec<(Word, Word)>,
    pub goal: Goal,
}

/// On-disk word problem: either relation triples or a `general` block.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WordProblemFile {
    pub k: usize,
    #[serde(default)]
    pub relations: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inverses: BTreeMap<usize, usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub general: Option<GeneralBlock>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneralBlock {
    pub equations: Vec<(Word, Word)>,
    pub goal: Goal,
}

pub enum ParsedWordProblem {
    Instance(WordProblemInstance),
    General(GeneralWordProblem),
}

impl WordProblemFile {
    pub fn parse(text: &str) -> Result<ParsedWordProblem, ReductionError> {
        let f: WordProblemFile = serde_json::from_str(text).map_err(|e| ReductionError::Malformed(e.to_string()))?;
        Ok(match f.general {
            Some(g) => {
                if !f.relations.is_empty() {
                    return Err(ReductionError::Malformed("give either `relations` or `general`, not both".into()));
                }
                let gp = GeneralWordProblem { k: f.k, equations: g.equations, goal: g.goal };
                gp.validate()?;
                ParsedWordProblem::General(gp)
            }
            None => {
                let wp = WordProblemInstance {
                    k: f.k,
                    relations: f.relations,
                    identity: f.identity,
                    inverses: f.inverses,
                    provenance: f.provenance,
                };
                wp.validate()?;
                ParsedWordProblem::Instance(wp)
            }
        })
    }
}

impl WordProblemInstance {
    pub fn new(k: usize, relations: Vec<[usize; 3]>) -> WordProblemInstance {
        WordProblemInstance {
            k,
            relations,
            identity: None,
            inverses: BTreeMap::new(),
            provenance: (1..=k).map(|j| format!("x{j}")).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), ReductionError> {
        if self.k == 0 {
            return Err(ReductionError::BadIndex("an instance needs at least one variable".into()));
        }
        let bad = |j: usize| j == 0 || j > self.k;
        for (i, r) in self.relations.iter().enumerate() {
            if let Some(&j) = r.iter().find(|&&j| bad(j)) {
                return Err(ReductionError::BadIndex(format!("relation {i} uses x{j}, outside 1..={}", self.k)));
            }
        }
        let ids = self.identity.iter().chain(self.inverses.keys()).chain(self.inverses.values());
        if let Some(&j) = ids.clone().find(|&&j| bad(j)) {
            return Err(ReductionError::BadIndex(format!("x{j} outside 1..={}", self.k)));
        }
        if let Some(e) = self.identity {
            if !self.relations.contains(&[e, e, e]) {
                return Err(ReductionError::BadIndex(format!("identity x{e} lacks the relation ({e},{e},{e})")));
            }
            for (&a, &b) in &self.inverses {
                if !self.relations.contains(&[b, a, e]) {
                    return Err(ReductionError::BadIndex(format!("inverse x{b} of x{a} lacks ({b},{a},{e})")));
                }
            }
        } else if !self.inverses.is_empty() {
            return Err(ReductionError::BadIndex("inverses declared without an identity".into()));
        }
        if !self.provenance.is_empty() && self.provenance.len() != self.k {
            return Err(ReductionError::BadIndex(format!(
                "{} provenance entries for {} variables",
                self.provenance.len(),
                self.k
            )));
        }
        Ok(())
    }

    pub fn name(&self, j: usize) -> String {
        self.provenance.get(j - 1).cloned().unwrap_or_else(|| format!("x{j}"))
    }

    fn fresh(&mut self, name: String) -> usize {
        if self.provenance.len() < self.k {
            self.provenance.extend((self.provenance.len() + 1..=self.k).map(|j| format!("x{j}")));
        }
        self.k += 1;
        self.provenance.push(name);
        self.k
    }

    /// Fills in a full assignment from a partial one by propagating the
    /// identity, inverses and relations, then checks every relation.
    pub fn complete_assignment(&self, group: &CayleyGroup, partial: &[Option<u32>]) -> Result<Vec<u32>, ReductionError> {
        let mut x: Vec<Option<u32>> = (0..self.k).map(|i| partial.get(i).copied().flatten()).collect();
        for v in x.iter().flatten() {
            group.check_element(*v)?;
        }
        if let Some(e) = self.identity {
            x[e - 1].get_or_insert(group.identity());
        }
        loop {
            let mut changed = false;
            for (&a, &b) in &self.inverses {
                if let (Some(va), None) = (x[a - 1], x[b - 1]) {
                    x[b - 1] = Some(group.inverse(va as usize));
                    changed = true;
                }
            }
            for &[a, b, c] in &self.relations {
                let (va, vb, vc) = (x[a - 1], x[b - 1], x[c - 1]);
                let fill = match (va, vb, vc) {
                    (Some(p), Some(q), None) => Some((c, group.mul(p as usize, q as usize))),
                    (Some(p), None, Some(r)) => Some((b, group.mul(group.inverse(p as usize) as usize, r as usize))),
                    (None, Some(q), Some(r)) => Some((a, group.mul(r as usize, group.inverse(q as usize) as usize))),
                    _ => None,
                };
                if let Some((j, v)) = fill {
                    x[j - 1] = Some(v);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let full: Vec<u32> = x
            .iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| ReductionError::Assignment(format!("{} is not determined", self.name(i + 1)))))
            .collect::<Result<_, _>>()?;
        for &[a, b, c] in &self.relations {
            if group.mul(full[a - 1] as usize, full[b - 1] as usize) != full[c - 1] {
                return Err(ReductionError::Assignment(format!(
                    "relation {} · {} = {} fails",
                    self.name(a),
                    self.name(b),
                    self.name(c)
                )));
            }
        }
        Ok(full)
    }
}

/// Adds the identity variable `e` with `e · e = e` if missing, and an
/// inverse `x̄` with `x̄ · x = e` for each listed variable that lacks one.
pub fn add_group_inverses(wp: &WordProblemInstance, vars: &[usize]) -> Result<WordProblemInstance, ReductionError> {
    wp.validate()?;
    let mut out = wp.clone();
    let e = match out.identity {
        Some(e) => e,
        None => {
            let e = out.fresh("e".into());
            out.relations.push([e, e, e]);
            out.identity = Some(e);
            e
        }
    };
    for &a in vars {
        if a == 0 || a > wp.k {
            return Err(ReductionError::BadIndex(format!("x{a} outside 1..={}", wp.k)));
        }
        if out.inverses.contains_key(&a) {
            continue;
        }
        let b = out.fresh(format!("inv({})", out.name(a)));
        out.relations.push([b, a, e]);
        out.inverses.insert(a, b);
    }
    Ok(out)
}

impl GeneralWordProblem {
    pub fn validate(&self) -> Result<(), ReductionError> {
        let check = |w: &Word, what: &str| {
            if w.is_empty() {
                return Err(ReductionError::EmptyWord(what.to_string()));
            }
            match w.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > self.k) {
                Some(l) => Err(ReductionError::BadIndex(format!("letter {l} in {what}, variables are 1..={}", self.k))),
                None => Ok(()),
            }
        };
        for (i, (l, r)) in self.equations.iter().enumerate() {
            check(l, &format!("equation {i} left side"))?;
            check(r, &format!("equation {i} right side"))?;
        }
        match &self.goal {
            Goal::Identity(j) if *j == 0 || *j > self.k => Err(ReductionError::BadIndex(format!("goal x{j}"))),
            Goal::Identity(_) => Ok(()),
            Goal::Equal(l, r) => {
                check(l, "goal left side")?;
                check(r, "goal right side")
            }
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, a: usize) -> usize {
        let mut r = a;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = a;
        while self.0[c] != r {
            let n = self.0[c];
            self.0[c] = r;
            c = n;
        }
        r
    }

    /// Keeps the smaller index as the representative.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

/// Rewrites a general word problem into relation triples with goal
/// `x_1 = e`.
///
/// Every word of length `m ≥ 2` gets chain variables
/// `y_1 = x_{a_1}`, `y_t = y_{t−1} · x_{a_t}`; each equation then merges
/// the variables of its two sides. Inverse letters use `x̄` variables with
/// `x̄ · x = e`. A goal `w = v` becomes `d = w · v̄` with goal `d = e`.
/// The goal variable is renumbered to `x_1`; other variables keep their
/// relative order.
pub fn normalize(gp: &GeneralWordProblem) -> Result<WordProblemInstance, ReductionError> {
    gp.validate()?;
    let mut wp = WordProblemInstance::new(gp.k, Vec::new());
    let needs_inverse: BTreeSet<usize> = gp
        .equations
        .iter()
        .flat_map(|(l, r)| l.iter().chain(r))
        .chain(match &gp.goal {
            Goal::Equal(l, r) => l.iter().chain(r.iter()).collect::<Vec<_>>(),
            Goal::Identity(_) => Vec::new(),
        })
        .filter(|&&l| l < 0)
        .map(|l| l.unsigned_abs() as usize)
        .collect();
    if !needs_inverse.is_empty() || matches!(gp.goal, Goal::Equal(..)) {
        wp = add_group_inverses(&wp, &needs_inverse.into_iter().collect::<Vec<_>>())?;
    }

    let chain = |wp: &mut WordProblemInstance, w: &Word, label: &str| -> usize {
        let letter = |wp: &WordProblemInstance, l: i64| {
            let j = l.unsigned_abs() as usize;
            if l > 0 {
                j
            } else {
                wp.inverses[&j]
            }
        };
        let mut y = letter(wp, w[0]);
        for (t, &l) in w.iter().enumerate().skip(1) {
            let x = letter(wp, l);
            let next = wp.fresh(format!("{label}[..{}]", t + 1));
            wp.relations.push([y, x, next]);
            y = next;
        }
        y
    };

    let mut merges = Vec::new();
    for (i, (l, r)) in gp.equations.iter().enumerate() {
        let a = chain(&mut wp, l, &format!("eq{i}.lhs"));
        let b = chain(&mut wp, r, &format!("eq{i}.rhs"));
        merges.push((a, b));
    }
    let goal = match &gp.goal {
        Goal::Identity(j) => *j,
        Goal::Equal(l, r) => {
            let a = chain(&mut wp, l, "goal.lhs");
            let b = chain(&mut wp, r, "goal.rhs");
            let b_inv = match wp.inverses.get(&b) {
                Some(&v) => v,
                None => {
                    let e = wp.identity.expect("identity added for equality goals");
                    let v = wp.fresh(format!("inv({})", wp.name(b)));
                    wp.relations.push([v, b, e]);
                    wp.inverses.insert(b, v);
                    v
                }
            };
            let d = wp.fresh("goal.lhs·inv(goal.rhs)".into());
            wp.relations.push([a, b_inv, d]);
            d
        }
    };

    // Substitute merged variables by their representative.
    let mut uf = UnionFind((0..=wp.k).collect());
    for (a, b) in merges {
        uf.union(a, b);
    }
    let mut order: Vec<usize> = vec![uf.find(goal)];
    for j in 1..=wp.k {
        let r = uf.find(j);
        if !order.contains(&r) {
            order.push(r);
        }
    }
    let renum: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &r)| (r, i + 1)).collect();
    let mut names: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for j in 1..=wp.k {
        names.entry(renum[&uf.find(j)]).or_default().push(wp.name(j));
    }
    let mut map = |j: usize| renum[&uf.find(j)];
    let mut relations = Vec::new();
    for &[a, b, c] in &wp.relations {
        let r = [map(a), map(b), map(c)];
        if !relations.contains(&r) {
            relations.push(r);
        }
    }
    let identity = wp.identity.map(&mut map);
    let mut inverses = BTreeMap::new();
    for (&a, &b) in &wp.inverses {
        inverses.entry(map(a)).or_insert(map(b));
    }
    let out = WordProblemInstance {
        k: order.len(),
        relations,
        identity,
        inverses,
        provenance: (1..=order.len()).map(|i| names[&i].join("=")).collect(),
    };
    out.validate()?;
    Ok(out)
}
