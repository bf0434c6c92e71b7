use std::collections::HashMap;
use std::sync::Arc;

use super::{fnf_reduced, iota_eq_given_clause, show, ueq_semantic, Clauses, IndexPerm, PredError, PredicateReport};
use crate::exactprob::{DerivedVar, JointDistribution};
use crate::finalg::{enumerate_endos, AbelianGroup, Endo};
use crate::labeling::GroupLabeling;

fn perm(i: u8, j: u8) -> Result<IndexPerm, PredError> {
    IndexPerm::sending(i, j).ok_or(PredError::IndexPair(i, j))
}

/// `end_{1,2}(U)` with explicit witnesses `V`, `W`.
pub fn end_check_witness(d: &JointDistribution, u: &[&str], v: &[&str], w: &[&str]) -> Result<PredicateReport, PredError> {
    end_check_witness_ij(d, (1, 2), u, v, w)
}

/// `end_{i,j}(U)` with explicit witnesses, obtained from the `(1,2)`
/// template by relabeling indices.
pub fn end_check_witness_ij(
    d: &JointDistribution,
    (i, j): (u8, u8),
    u: &[&str],
    v: &[&str],
    w: &[&str],
) -> Result<PredicateReport, PredError> {
    let p = perm(i, j)?;
    let a = |n: &str| p.apply(n);
    let (a1, a2, a3, a13, a23) = (a("A1"), a("A2"), a("A3"), a("A13"), a("A23"));
    let name = format!("end_{{{i},{j}}}({})", show(u));
    let mut c = Clauses::new(name);
    c.sub(&fnf_reduced(d)?);
    for (x, label) in [(u, "U"), (v, "V"), (w, "W")] {
        c.check(|| format!("ueq({label}={}, {a1})", show(x)), || ueq_semantic(d, x, &[a1.as_str()]))?;
    }
    iota_eq_given_clause(&mut c, d, u, &[&a1], &[&a2])?;
    iota_eq_given_clause(&mut c, d, v, &[&a1], &[&a23])?;
    iota_eq_given_clause(&mut c, d, u, v, &[&a3])?;
    iota_eq_given_clause(&mut c, d, w, &[&a13], &[&a2])?;
    iota_eq_given_clause(&mut c, d, u, w, &[&a3])?;
    Ok(c.finish())
}

/// Label-space tables of the three `end` witnesses over `(x1, x2, x3)`,
/// index `x1·n² + x2·n + x3`, for the `(i,j)` position:
/// `U = x_i − g(x_j)`, `V = x_i − g(x_j + x_k)`, `W = x_i − g(x_j) + x_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndWitnesses {
    pub order: u32,
    pub u: Vec<u32>,
    pub v: Vec<u32>,
    pub w: Vec<u32>,
}

impl EndWitnesses {
    /// Converts the label tables into derived variables over the native
    /// values of `A1, A2, A3` (tables sized by each variable's largest
    /// support value plus one; off-support entries are 0).
    pub fn derived_vars(&self, labeling: &GroupLabeling, names: [&str; 3]) -> Vec<DerivedVar> {
        let cards: Vec<u32> = ["A1", "A2", "A3"]
            .iter()
            .map(|n| labeling.theta(n).values.last().map_or(1, |m| m + 1))
            .collect();
        let n = self.order as usize;
        let mk = |name: &str, t: &Vec<u32>| {
            let mut table = Vec::with_capacity((cards[0] * cards[1] * cards[2]) as usize);
            for v1 in 0..cards[0] {
                for v2 in 0..cards[1] {
                    for v3 in 0..cards[2] {
                        let l = (
                            labeling.label("A1", v1),
                            labeling.label("A2", v2),
                            labeling.label("A3", v3),
                        );
                        table.push(match l {
                            (Some(x1), Some(x2), Some(x3)) => t[(x1 as usize * n + x2 as usize) * n + x3 as usize],
                            _ => 0,
                        });
                    }
                }
            }
            DerivedVar {
                name: name.to_string(),
                cardinality: self.order,
                table,
            }
        };
        vec![mk(names[0], &self.u), mk(names[1], &self.v), mk(names[2], &self.w)]
    }
}

/// Witnesses for `end_{1,2}` realizing `g`.
pub fn make_end_witnesses(labeling: &GroupLabeling, g: &Endo) -> Result<EndWitnesses, PredError> {
    make_end_witnesses_ij(labeling, g, (1, 2))
}

pub fn make_end_witnesses_ij(labeling: &GroupLabeling, g: &Endo, (i, j): (u8, u8)) -> Result<EndWitnesses, PredError> {
    let p = perm(i, j)?;
    if **g.group() != *labeling.group {
        return Err(PredError::Alg(crate::finalg::AlgError::GroupMismatch));
    }
    let grp = &labeling.group;
    let n = grp.order() as u32;
    let (ii, jj, kk) = (p.image(1) as usize - 1, p.image(2) as usize - 1, p.image(3) as usize - 1);
    let mut w = EndWitnesses {
        order: n,
        u: Vec::new(),
        v: Vec::new(),
        w: Vec::new(),
    };
    for x1 in 0..n {
        for x2 in 0..n {
            for x3 in 0..n {
                let x = [x1, x2, x3];
                let (xi, xj, xk) = (x[ii], x[jj], x[kk]);
                w.u.push(grp.sub(xi, g.apply(xj)));
                w.v.push(grp.sub(xi, g.apply(grp.add(xj, xk))));
                w.w.push(grp.add(grp.sub(xi, g.apply(xj)), xk));
            }
        }
    }
    Ok(w)
}

/// Adds `U`, `V`, `W` for `end_{i,j}` realizing `g` to a distribution that
/// contains `A1, A2, A3`.
pub fn with_end_witnesses(
    d: &JointDistribution,
    labeling: &GroupLabeling,
    g: &Endo,
    ij: (u8, u8),
    names: [&str; 3],
) -> Result<JointDistribution, PredError> {
    let wit = make_end_witnesses_ij(labeling, g, ij)?;
    let cols = [d.index_of("A1")?, d.index_of("A2")?, d.index_of("A3")?];
    let n = wit.order as usize;
    let mut out = d.clone();
    for (name, t) in names.iter().zip([&wit.u, &wit.v, &wit.w]) {
        let th = [labeling.theta("A1"), labeling.theta("A2"), labeling.theta("A3")];
        out = out.with_derived(name, wit.order, |row| {
            let x: Vec<usize> = (0..3).map(|k| th[k].label(row[cols[k]]).unwrap_or(0) as usize).collect();
            t[(x[0] * n + x[1]) * n + x[2]]
        })?;
    }
    Ok(out)
}

/// Values of a variable set and of two A-variables on every atom, with the
/// set's value tuple interned to an integer.
fn slices(
    d: &JointDistribution,
    u: &[&str],
    ai: &str,
    aj: &str,
    labeling: &GroupLabeling,
) -> Result<Option<Vec<(usize, u32, u32)>>, PredError> {
    let mut names: Vec<&str> = u.to_vec();
    names.push(ai);
    names.push(aj);
    let m = d.marginal(&names)?;
    let cols_u: Vec<usize> = u.iter().map(|n| m.index_of(n)).collect::<Result<_, _>>()?;
    let (ci, cj) = (m.index_of(ai)?, m.index_of(aj)?);
    let mut intern: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut out = Vec::with_capacity(m.num_atoms());
    for k in 0..m.num_atoms() {
        let row = m.atom(k);
        let key: Vec<u32> = cols_u.iter().map(|&c| row[c]).collect();
        let next = intern.len();
        let id = *intern.entry(key).or_insert(next);
        let (Some(xi), Some(xj)) = (labeling.label(ai, row[ci]), labeling.label(aj, row[cj])) else {
            return Ok(None);
        };
        out.push((id, xi, xj));
    }
    Ok(Some(out))
}

/// The unique endomorphism `g` with `φ(U) = θ1(A1) − g(θ2(A2))` for some
/// bijection `φ`, if one exists.
pub fn end_semantic(d: &JointDistribution, u: &[&str], labeling: &GroupLabeling) -> Result<Option<Endo>, PredError> {
    end_semantic_ij(d, u, labeling, (1, 2))
}

/// Decides `end_{i,j}` semantically by construction: `φ` is forced on the
/// slice where `θ_j(A_j) = 0` (there `φ(U) = θ_i(A_i)`), after which
/// `g(x_j) = x_i − φ(u)` must be well defined and additive.
pub fn end_semantic_ij(
    d: &JointDistribution,
    u: &[&str],
    labeling: &GroupLabeling,
    (i, j): (u8, u8),
) -> Result<Option<Endo>, PredError> {
    let p = perm(i, j)?;
    let (ai, aj) = (p.apply("A1"), p.apply("A2"));
    let Some(rows) = slices(d, u, &ai, &aj, labeling)? else {
        return Ok(None);
    };
    let grp = &labeling.group;
    let n = grp.order();
    let n_u = rows.iter().map(|r| r.0).max().map_or(0, |m| m + 1);
    if n_u != n {
        return Ok(None);
    }
    let unset = u32::MAX;
    let mut phi = vec![unset; n_u];
    let mut hit = vec![false; n];
    for &(id, xi, xj) in &rows {
        if xj != 0 {
            continue;
        }
        if phi[id] == unset {
            if std::mem::replace(&mut hit[xi as usize], true) {
                return Ok(None);
            }
            phi[id] = xi;
        } else if phi[id] != xi {
            return Ok(None);
        }
    }
    if phi.contains(&unset) {
        return Ok(None);
    }
    let mut g = vec![unset; n];
    for &(id, xi, xj) in &rows {
        let val = grp.sub(xi, phi[id]);
        if g[xj as usize] == unset {
            g[xj as usize] = val;
        } else if g[xj as usize] != val {
            return Ok(None);
        }
    }
    if g.contains(&unset) {
        return Ok(None);
    }
    Ok(Endo::from_table(&labeling.group, g).ok())
}

/// Cross-check for [`end_semantic_ij`]: tries every endomorphism `g` and
/// tests `U =ι θ_i(A_i) − g(θ_j(A_j))`. Errors if more than one matches.
pub fn end_semantic_search(
    d: &JointDistribution,
    u: &[&str],
    labeling: &GroupLabeling,
    (i, j): (u8, u8),
) -> Result<Option<Endo>, PredError> {
    let p = perm(i, j)?;
    let (ai, aj) = (p.apply("A1"), p.apply("A2"));
    let group: &Arc<AbelianGroup> = &labeling.group;
    let (ci, cj) = (d.index_of(&ai)?, d.index_of(&aj)?);
    let (ti, tj) = (labeling.theta(&ai), labeling.theta(&aj));
    let probe = "__end_probe";
    let mut found: Vec<Endo> = Vec::new();
    for g in enumerate_endos(group)? {
        let t = d.with_derived(probe, group.order() as u32, |row| {
            let xi = ti.label(row[ci]).unwrap_or(0);
            let xj = tj.label(row[cj]).unwrap_or(0);
            group.sub(xi, g.apply(xj))
        })?;
        if t.iota_eq(u, &[probe])? {
            found.push(g);
        }
    }
    match found.len() {
        0 => Ok(None),
        1 => Ok(found.pop()),
        k => Err(PredError::NotUnique(k)),
    }
}
