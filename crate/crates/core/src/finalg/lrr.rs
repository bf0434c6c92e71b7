use serde::Serialize;

use super::{AlgError, CayleyGroup, Field, FieldMatrix};

/// Left regular representation: the permutation matrix of
/// `(x_a)_a ↦ (x_{b⁻¹·a})_a`, acting on column vectors indexed by elements.
pub fn lrr(group: &CayleyGroup, b: u32, field: &Field) -> Result<FieldMatrix, AlgError> {
    group.check_element(b)?;
    let n = group.order();
    let binv = group.inverse(b as usize) as usize;
    let mut m = FieldMatrix::zeros(field, n, n);
    for a in 0..n {
        m.set(a, group.mul(binv, a) as usize, 1);
    }
    Ok(m)
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RankEntry {
    pub element: u32,
    pub element_order: usize,
    pub rank: usize,
    pub expected: usize,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RankReport {
    pub field: String,
    pub group_order: usize,
    pub entries: Vec<RankEntry>,
    pub all_ok: bool,
}

/// For every non-identity `b`, compares `rank(λ(b) − I)` with
/// `(ord(b) − 1)·|B|/ord(b)` and checks it is at least `⌈|B|/2⌉`.
pub fn lrr_rank_check(group: &CayleyGroup, field: &Field) -> RankReport {
    let n = group.order();
    let id = FieldMatrix::identity(field, n);
    let entries: Vec<RankEntry> = (0..n as u32)
        .filter(|&b| b != group.identity())
        .map(|b| {
            let k = group.element_order(b as usize);
            let rank = lrr(group, b, field).unwrap().sub(&id).unwrap().rank();
            let expected = (k - 1) * n / k;
            RankEntry {
                element: b,
                element_order: k,
                rank,
                expected,
                ok: rank == expected && rank >= n.div_ceil(2),
            }
        })
        .collect();
    RankReport {
        field: field.to_string(),
        group_order: n,
        all_ok: entries.iter().all(|e| e.ok),
        entries,
    }
}

/// The `⌊|B|/2⌋ × |B|` map `t` such that `x ↦ (λ(x1)x − x, t(x))` is
/// injective.
///
/// Rows are the first standard basis vectors (in index order) that raise
/// the rank of the stack; any remaining rows are zero.
pub fn completion_map(group: &CayleyGroup, x1: u32, field: &Field) -> Result<FieldMatrix, AlgError> {
    group.check_element(x1)?;
    let n = group.order();
    let budget = n / 2;
    if x1 == group.identity() {
        return Err(AlgError::Completion(format!(
            "x1 is the identity: λ(x1) − I is zero and {budget} rows cannot complete rank {n}"
        )));
    }
    let d = lrr(group, x1, field)?.sub(&FieldMatrix::identity(field, n))?;
    let mut stack = d.clone();
    let mut rank = stack.rank();
    let mut rows = Vec::new();
    for i in 0..n {
        if rank == n {
            break;
        }
        let mut e = vec![0; n];
        e[i] = 1;
        let trial = stack.vstack(&FieldMatrix::from_rows(field, &[e.clone()])?)?;
        let r = trial.rank();
        if r > rank {
            stack = trial;
            rank = r;
            rows.push(e);
        }
    }
    if rows.len() > budget {
        return Err(AlgError::Completion(format!(
            "rank deficiency {} exceeds the {budget} available rows",
            rows.len()
        )));
    }
    rows.resize(budget, vec![0; n]);
    let t = FieldMatrix::from_rows_with_cols(field, n, &rows)?;
    assert_eq!(d.vstack(&t)?.rank(), n, "completion must reach full rank");
    Ok(t)
}
