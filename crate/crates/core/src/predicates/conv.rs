use super::{end_semantic_ij, show, union, Clauses, PredError, PredicateReport};
use crate::exactprob::JointDistribution;
use crate::finalg::Endo;
use crate::labeling::GroupLabeling;

fn end_clause(
    c: &mut Clauses,
    d: &JointDistribution,
    labeling: &GroupLabeling,
    x: &[&str],
    ij: (u8, u8),
) -> Result<Option<Endo>, PredError> {
    if !c.ok() {
        return Ok(None);
    }
    let g = end_semantic_ij(d, x, labeling, ij)?;
    c.check(|| format!("end_{{{},{}}}({})", ij.0, ij.1, show(x)), || Ok(g.is_some()))?;
    Ok(g)
}

fn fd_clause(c: &mut Clauses, d: &JointDistribution, y: &[&str], x: &[&str]) -> Result<(), PredError> {
    c.check(|| format!("{} ι≤ {}", show(y), show(x)), || d.is_function_of(y, x))?;
    Ok(())
}

/// `conv^{1,2}_{1,3}(U, V)` with explicit `W`: `end_{1,2}(U)`,
/// `end_{1,3}(V)`, `end_{2,3}(W)`, `A13 ι≤ A12 W`, `V ι≤ U W`. The
/// embedded `end` predicates are decided semantically.
pub fn conv13_check(
    d: &JointDistribution,
    labeling: &GroupLabeling,
    u: &[&str],
    v: &[&str],
    w: &[&str],
) -> Result<PredicateReport, PredError> {
    let mut c = Clauses::new(format!("conv13({}, {})", show(u), show(v)));
    let g = end_clause(&mut c, d, labeling, u, (1, 2))?;
    end_clause(&mut c, d, labeling, v, (1, 3))?;
    end_clause(&mut c, d, labeling, w, (2, 3))?;
    fd_clause(&mut c, d, &["A13"], &union(&["A12"], w))?;
    fd_clause(&mut c, d, v, &union(u, w))?;
    Ok(c.finish().with_endo(g))
}

/// `conv^{1,2}_{3,2}(U, V)` with explicit `W`: `end_{1,2}(U)`,
/// `end_{3,2}(V)`, `end_{1,3}(W)`, `A12 ι≤ W A23`, `V ι≤ W U`.
pub fn conv32_check(
    d: &JointDistribution,
    labeling: &GroupLabeling,
    u: &[&str],
    v: &[&str],
    w: &[&str],
) -> Result<PredicateReport, PredError> {
    let mut c = Clauses::new(format!("conv32({}, {})", show(u), show(v)));
    let g = end_clause(&mut c, d, labeling, u, (1, 2))?;
    end_clause(&mut c, d, labeling, v, (3, 2))?;
    end_clause(&mut c, d, labeling, w, (1, 3))?;
    fd_clause(&mut c, d, &["A12"], &union(w, &["A23"]))?;
    fd_clause(&mut c, d, v, &union(w, u))?;
    Ok(c.finish().with_endo(g))
}

/// Semantic `conv13`: `U` in position (1,2) and `V` in position (1,3)
/// carry the same endomorphism.
pub fn conv13_semantic(d: &JointDistribution, labeling: &GroupLabeling, u: &[&str], v: &[&str]) -> Result<bool, PredError> {
    let gu = end_semantic_ij(d, u, labeling, (1, 2))?;
    let gv = end_semantic_ij(d, v, labeling, (1, 3))?;
    Ok(matches!((gu, gv), (Some(a), Some(b)) if a == b))
}

/// Semantic `conv32`: `U` in position (1,2) and `V` in position (3,2)
/// carry the same endomorphism.
pub fn conv32_semantic(d: &JointDistribution, labeling: &GroupLabeling, u: &[&str], v: &[&str]) -> Result<bool, PredError> {
    let gu = end_semantic_ij(d, u, labeling, (1, 2))?;
    let gv = end_semantic_ij(d, v, labeling, (3, 2))?;
    Ok(matches!((gu, gv), (Some(a), Some(b)) if a == b))
}

/// `comp_{1,2}(U1, U2, U3)` with explicit `V1, V2` and the conversion
/// witnesses `W1` (for `conv13`) and `W2` (for `conv32`).
#[allow(clippy::too_many_arguments)]
pub fn comp_check(
    d: &JointDistribution,
    labeling: &GroupLabeling,
    u1: &[&str],
    u2: &[&str],
    u3: &[&str],
    v1: &[&str],
    v2: &[&str],
    w1: &[&str],
    w2: &[&str],
) -> Result<PredicateReport, PredError> {
    let mut c = Clauses::new(format!("comp({}, {}, {})", show(u1), show(u2), show(u3)));
    end_clause(&mut c, d, labeling, u1, (1, 2))?;
    end_clause(&mut c, d, labeling, u2, (1, 2))?;
    let g3 = end_clause(&mut c, d, labeling, u3, (1, 2))?;
    if c.ok() {
        c.sub(&conv13_check(d, labeling, u1, v1, w1)?);
    }
    if c.ok() {
        c.sub(&conv32_check(d, labeling, u2, v2, w2)?);
    }
    fd_clause(&mut c, d, u3, &union(v1, v2))?;
    Ok(c.finish().with_endo(g3))
}

/// `U ι≤ V`; for two `end_{1,2}` variables this is endomorphism equality.
pub fn eq_check(d: &JointDistribution, u: &[&str], v: &[&str]) -> Result<bool, PredError> {
    Ok(d.is_function_of(u, v)?)
}
