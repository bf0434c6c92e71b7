use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ReductionError, WordProblemInstance};
use crate::finalg::{completion_map, lrr, CayleyFile, CayleyGroup, Endo, Field, FieldMatrix};
use crate::gadgets::{compile, witness_code, EndoExpr, Formula, Fragment, GadgetError, MatrixEnv, Sig};
use crate::labeling::recover_labeling;
use crate::netmodel::{
    verify_linear, verify_linear_distribution, LinearCode, LinearEval, NetError, Network, NodeRankDiagnosis,
};
use crate::predicates::{end_semantic, PredicateReport};

/// Largest joint distribution the witness verifier will materialize.
pub const DISTRIBUTION_ATOM_CAP: u128 = 1_000_000;

/// Exponent of the messages and of every edge except the completion edge.
const MESSAGE_EXPONENT: u8 = 2;

#[derive(Clone, Debug)]
pub struct CompiledNetwork {
    pub network: Network,
    /// Gadget instances by kind.
    pub census: BTreeMap<String, usize>,
    pub formulas: BTreeMap<String, Formula>,
    /// `U_j` for `j = 1..=k`.
    pub u_signals: Vec<String>,
    /// The identity-pinned signal `A1 − A2`.
    pub e_signal: String,
    /// The single exponent-1 signal.
    pub t_signal: String,
    /// Node demanding `{A1, A2}` from `{U_1, E, T}`.
    pub final_node: String,
}

/// Node count of [`compile_network`] for `k` variables and `l` relations.
pub fn network_census(k: usize, l: usize) -> usize {
    7 + 67 * k + 176 * l + 11
}

fn is_scope_label(s: &str) -> bool {
    s == "goal"
        || s.strip_prefix(['x', 'r'])
            .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

/// Builds the network: the base gadget, a signal `U_j ← {A1, A2}` with an
/// automorphism check for each variable, a composition check for each
/// relation, and the goal block with `E`, the half-rate edge `T ← {A2}`
/// and the demand `{A1, A2} ← {U_1, E, T}`.
pub fn compile_network(wp: &WordProblemInstance) -> Result<CompiledNetwork, ReductionError> {
    wp.validate()?;
    let mut f = Fragment::new("");
    f.base();
    let us: Vec<Sig> = (1..=wp.k).map(|j| Sig::end12(format!("U{j}"), EndoExpr::var(j))).collect();
    for (j, u) in us.iter().enumerate() {
        f.within(&format!("x{}", j + 1), |f| {
            f.generate_named(&u.name, &["A1", "A2"], u.formula.clone(), None);
            f.iend(u)
        })?;
    }
    for (r, &[a, b, c]) in wp.relations.iter().enumerate() {
        f.within(&format!("r{r}"), |f| f.icomp(&us[a - 1], &us[b - 1], &us[c - 1]))?;
    }
    let (e, t) = f.within("goal", |f| -> Result<_, GadgetError> {
        let e = f.id_pin()?;
        let t = format!("{}.T", f.path());
        f.generate_named(&t, &["A2"], Formula::term(EndoExpr::Completion, 2), Some(1));
        f.demand(&["A1", "A2"], &[&us[0].name, &e.name, &t]);
        Ok((e.name, t))
    })?;
    let network = compile(std::slice::from_ref(&f), MESSAGE_EXPONENT)?;
    let mut census = f.census.clone();
    census.retain(|k, _| !is_scope_label(k));
    Ok(CompiledNetwork {
        network,
        census,
        formulas: f.formulas,
        u_signals: us.into_iter().map(|u| u.name).collect(),
        e_signal: e,
        t_signal: t,
        final_node: "dem:goal#1".into(),
    })
}

/// A finite group with an assignment `x_1..x_k` and the prime `p` of the
/// coding field `GF(p²)`.
#[derive(Clone, Debug)]
pub struct WitnessSpec {
    pub group: CayleyGroup,
    pub assignment: Vec<u32>,
    pub p: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessSpecFile {
    pub group: CayleyFile,
    pub assignment: Vec<u32>,
    #[serde(default = "two")]
    pub p: u32,
}

fn two() -> u32 {
    2
}

impl WitnessSpecFile {
    pub fn to_spec(&self) -> Result<WitnessSpec, ReductionError> {
        Ok(WitnessSpec {
            group: CayleyGroup::from_file(&self.group)?,
            assignment: self.assignment.clone(),
            p: self.p,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub code: LinearCode,
    pub env: MatrixEnv,
}

/// Linear code over `GF(p²)` with message blocks of dimension `|B|`: `U_j`
/// carries `A1 − λ(x_j)A2` for the left regular representation `λ`, and
/// `T` carries the completion map of `λ(x_1) − I` applied to `A2`.
///
/// Fails when the assignment violates a relation or `x_1` is the
/// identity.
pub fn build_witness(wp: &WordProblemInstance, cn: &CompiledNetwork, spec: &WitnessSpec) -> Result<Witness, ReductionError> {
    build(wp, cn, spec, false)
}

/// As [`build_witness`] but with `T` carrying the first `⌊|B|/2⌋`
/// coordinates of `A2` and no requirement on `x_1`. With `x_1 = e` the
/// final demand is then short of rank.
pub fn build_witness_forced(
    wp: &WordProblemInstance,
    cn: &CompiledNetwork,
    spec: &WitnessSpec,
) -> Result<Witness, ReductionError> {
    build(wp, cn, spec, true)
}

fn build(wp: &WordProblemInstance, cn: &CompiledNetwork, spec: &WitnessSpec, forced: bool) -> Result<Witness, ReductionError> {
    let g = &spec.group;
    if spec.assignment.len() != wp.k {
        return Err(ReductionError::Assignment(format!(
            "{} values for {} variables",
            spec.assignment.len(),
            wp.k
        )));
    }
    for &x in &spec.assignment {
        g.check_element(x)?;
    }
    let x = |j: usize| spec.assignment[j - 1] as usize;
    for &[a, b, c] in &wp.relations {
        if g.mul(x(a), x(b)) as usize != x(c) {
            return Err(ReductionError::Relations(format!("{} · {} = {}", wp.name(a), wp.name(b), wp.name(c))));
        }
    }
    let field = Field::quadratic(spec.p)?;
    let n = g.order();
    let q = u64::from(spec.p)
        .checked_pow(n as u32)
        .ok_or_else(|| ReductionError::Malformed(format!("alphabet {}^{n} overflows", spec.p)))?;
    let vars = spec.assignment.iter().map(|&b| lrr(g, b, &field)).collect::<Result<Vec<_>, _>>()?;
    let completion = if forced {
        let rows: Vec<Vec<u32>> = (0..n / 2).map(|i| (0..n).map(|c| u32::from(c == i)).collect()).collect();
        FieldMatrix::from_rows_with_cols(&field, n, &rows)?
    } else {
        if spec.assignment[0] == g.identity() {
            return Err(ReductionError::IdentityGoal);
        }
        completion_map(g, spec.assignment[0], &field)?
    };
    let env = MatrixEnv { field, dim: n, vars, completion: Some(completion) };
    let code = witness_code(&cn.network, &cn.formulas, &env, q)?;
    Ok(Witness { code, env })
}

#[derive(Clone, Debug)]
pub struct WitnessReport {
    /// Rank-based check of every node.
    pub coding: PredicateReport,
    pub diagnosis: Option<NodeRankDiagnosis>,
    /// Exact functional-dependence check of every node; `None` when the
    /// joint distribution exceeds the atom cap.
    pub distribution: Option<PredicateReport>,
    /// Labeling recovery, the endomorphisms carried by `U_j` and `E`, and
    /// the relations among them.
    pub semantic: Option<PredicateReport>,
    pub atoms: u128,
}

impl WitnessReport {
    pub fn holds(&self) -> bool {
        self.coding.holds
            && self.distribution.as_ref().is_none_or(|r| r.holds)
            && self.semantic.as_ref().is_none_or(|r| r.holds)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "holds": self.holds(),
            "coding": self.coding.to_json(),
            "diagnosis": self.diagnosis,
            "distribution": self.distribution.as_ref().map(PredicateReport::to_json),
            "semantic": self.semantic.as_ref().map(PredicateReport::to_json),
            "atoms": self.atoms.to_string(),
        })
    }
}

/// Checks a code on the compiled network with both backends and, when the
/// distribution fits under `atom_cap`, the semantic checks.
pub fn verify_witness(
    wp: &WordProblemInstance,
    cn: &CompiledNetwork,
    code: &LinearCode,
    atom_cap: u128,
) -> Result<WitnessReport, ReductionError> {
    let (coding, diagnosis) = verify_linear(&cn.network, code)?;
    let f = u128::from(code.field.size());
    let dims: usize = code.message_dims.values().sum();
    let atoms = (0..dims).fold(1u128, |acc, _| acc.saturating_mul(f));
    let (distribution, semantic) = if atoms > atom_cap {
        (None, None)
    } else {
        let ev = LinearEval::new(&cn.network, code, atom_cap)?;
        (
            Some(verify_linear_distribution(&cn.network, code, atom_cap)?),
            Some(semantic_check(wp, cn, code, &ev)?),
        )
    };
    Ok(WitnessReport { coding, diagnosis, distribution, semantic, atoms })
}

fn signal_matrix(cn: &CompiledNetwork, code: &LinearCode, s: &str) -> Result<FieldMatrix, ReductionError> {
    cn.network
        .edges
        .iter()
        .find(|e| e.signal.as_deref() == Some(s))
        .and_then(|e| code.edges.get(&e.id))
        .cloned()
        .ok_or_else(|| ReductionError::Net(NetError::MissingTable(s.to_string())))
}

fn semantic_check(
    wp: &WordProblemInstance,
    cn: &CompiledNetwork,
    code: &LinearCode,
    ev: &LinearEval,
) -> Result<PredicateReport, ReductionError> {
    const NAME: &str = "witness semantics";
    let mut named: Vec<(String, FieldMatrix)> = Vec::new();
    for s in ["A12", "A13", "A23", "A123"] {
        named.push((s.to_string(), signal_matrix(cn, code, s)?));
    }
    for u in &cn.u_signals {
        named.push((u.clone(), signal_matrix(cn, code, u)?));
    }
    named.push(("E".into(), signal_matrix(cn, code, &cn.e_signal)?));
    let refs: Vec<(&str, &FieldMatrix)> = named.iter().map(|(n, m)| (n.as_str(), m)).collect();
    let d = ev.joint(&refs)?;
    let lab = match recover_labeling(&d) {
        Ok(l) => l,
        Err(e) => return Ok(PredicateReport::fail(NAME, format!("labeling: {e}"))),
    };
    let mut endos: Vec<Endo> = Vec::new();
    for u in &cn.u_signals {
        match end_semantic(&d, &[u], &lab)? {
            Some(g) if g.is_automorphism() => endos.push(g),
            Some(_) => return Ok(PredicateReport::fail(NAME, format!("{u} carries a non-invertible endomorphism"))),
            None => return Ok(PredicateReport::fail(NAME, format!("{u} is not of the form A1 − g(A2)"))),
        }
    }
    for &[a, b, c] in &wp.relations {
        if endos[c - 1] != endos[a - 1].compose(&endos[b - 1])? {
            return Ok(PredicateReport::fail(
                NAME,
                format!("relation {} · {} = {} not carried by U{c}", wp.name(a), wp.name(b), wp.name(c)),
            ));
        }
    }
    let id = Endo::identity(&lab.group);
    if end_semantic(&d, &["E"], &lab)?.as_ref() != Some(&id) {
        return Ok(PredicateReport::fail(NAME, "E does not carry the identity"));
    }
    if endos[0] == id {
        return Ok(PredicateReport::fail(NAME, "U1 carries the identity"));
    }
    Ok(PredicateReport::pass(NAME).with_endo(Some(endos[0].clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> CayleyGroup {
        CayleyGroup::cyclic(n).unwrap()
    }

    fn square() -> WordProblemInstance {
        WordProblemInstance::new(2, vec![[1, 1, 2]])
    }

    #[test]
    fn node_census() {
        // Per-gadget node counts: iend 66, icomp 176, id_pin 9, base 7.
        for (k, rels) in [(1, vec![]), (2, vec![[1, 1, 2]]), (3, vec![[1, 2, 3], [3, 3, 1]])] {
            let wp = WordProblemInstance::new(k, rels.clone());
            let cn = compile_network(&wp).unwrap();
            let want = 7 + k * (1 + 66) + rels.len() * 176 + 9 + 1 + 1;
            assert_eq!(cn.network.nodes.len(), want);
            assert_eq!(network_census(k, rels.len()), want);
            assert_eq!(cn.census.get("iend").copied().unwrap_or(0), k);
            assert_eq!(cn.census.get("icomp").copied().unwrap_or(0), rels.len());
            assert!(cn.census.keys().all(|k| !is_scope_label(k)));
        }
    }

    #[test]
    fn compile_is_deterministic_with_one_half_rate_edge() {
        let a = compile_network(&square()).unwrap();
        let b = compile_network(&square()).unwrap();
        assert_eq!(a.network.to_json(), b.network.to_json());
        let half: Vec<_> = a.network.edges.iter().filter(|e| e.exponent == 1).collect();
        assert_eq!(half.len(), 1);
        assert_eq!(half[0].signal.as_deref(), Some(a.t_signal.as_str()));
        assert_eq!(half[0].head, a.final_node);
        let fin = a.network.node(&a.final_node).unwrap();
        assert_eq!(fin.demands, ["A1", "A2"]);
        assert!(a.network.to_dot().contains(&a.final_node));
        assert_eq!(a.e_signal, "goal.id_pin.E");
    }

    #[test]
    fn square_over_z2_verifies() {
        let wp = square();
        let cn = compile_network(&wp).unwrap();
        let spec = WitnessSpec { group: z(2), assignment: vec![1, 0], p: 2 };
        let w = build_witness(&wp, &cn, &spec).unwrap();
        let r = verify_witness(&wp, &cn, &w.code, DISTRIBUTION_ATOM_CAP).unwrap();
        assert_eq!(r.atoms, 4096);
        assert!(r.coding.holds, "{}", r.coding.render());
        assert!(r.distribution.as_ref().unwrap().holds);
        assert!(r.semantic.as_ref().unwrap().holds, "{}", r.semantic.as_ref().unwrap().render());
        assert!(r.holds());
    }

    #[test]
    fn identity_goal_is_refused_and_forced_code_fails_at_the_final_demand() {
        let wp = square();
        let cn = compile_network(&wp).unwrap();
        let spec = WitnessSpec { group: z(2), assignment: vec![0, 0], p: 2 };
        assert!(matches!(build_witness(&wp, &cn, &spec), Err(ReductionError::IdentityGoal)));
        let w = build_witness_forced(&wp, &cn, &spec).unwrap();
        let r = verify_witness(&wp, &cn, &w.code, DISTRIBUTION_ATOM_CAP).unwrap();
        let d = r.diagnosis.clone().unwrap();
        assert_eq!(d.node, cn.final_node);
        // n + ⌊n/2⌋ = 3 dimensions of one unit each, against 2 + 2 demanded.
        assert_eq!((d.available_units, d.demanded_units), (Some((3, 1)), 4));
        assert!(!r.distribution.unwrap().holds);
        assert!(!r.semantic.unwrap().holds);
    }

    #[test]
    fn bad_assignment_is_rejected() {
        let wp = square();
        let cn = compile_network(&wp).unwrap();
        let spec = WitnessSpec { group: z(2), assignment: vec![1, 1], p: 2 };
        assert!(matches!(build_witness(&wp, &cn, &spec), Err(ReductionError::Relations(_))));
    }

    #[test]
    fn perturbed_code_names_the_failing_node() {
        let wp = square();
        let cn = compile_network(&wp).unwrap();
        let spec = WitnessSpec { group: z(2), assignment: vec![1, 0], p: 2 };
        let mut w = build_witness(&wp, &cn, &spec).unwrap();
        let edge = cn.network.edges.iter().find(|e| e.signal.as_deref() == Some("x1.iend.V")).unwrap();
        let m = w.code.edges.get_mut(&edge.id).unwrap();
        *m = FieldMatrix::zeros(m.field(), m.rows(), m.cols());
        let r = verify_witness(&wp, &cn, &w.code, DISTRIBUTION_ATOM_CAP).unwrap();
        assert!(!r.coding.holds);
        assert!(r.coding.failing_clause.as_deref().unwrap().contains(&edge.head), "{}", r.coding.render());
        assert!(!r.distribution.unwrap().holds);
    }

    #[test]
    fn cube_over_z3_verifies() {
        // x1 · x1 = x2, x2 · x1 = x3 with the identity x3.
        let mut wp = WordProblemInstance::new(3, vec![[1, 1, 2], [2, 1, 3], [3, 3, 3]]);
        wp.identity = Some(3);
        let cn = compile_network(&wp).unwrap();
        let spec = WitnessSpec { group: z(3), assignment: vec![1, 2, 0], p: 2 };
        let w = build_witness(&wp, &cn, &spec).unwrap();
        let r = verify_witness(&wp, &cn, &w.code, DISTRIBUTION_ATOM_CAP).unwrap();
        assert_eq!(r.atoms, 1 << 18);
        assert!(r.holds(), "{}", r.to_json());
        // |B| = 3 leaves one coordinate for T.
        let t = cn.network.edges.iter().find(|e| e.exponent == 1).unwrap();
        assert_eq!(w.code.edges[&t.id].rows(), 1);
    }

    #[test]
    fn nonabelian_group_passes_the_rank_check() {
        let g = CayleyGroup::symmetric(3).unwrap();
        let wp = WordProblemInstance::new(3, vec![[1, 2, 3]]);
        let cn = compile_network(&wp).unwrap();
        let spec = WitnessSpec { assignment: vec![1, 2, g.mul(1, 2)], group: g, p: 3 };
        let w = build_witness(&wp, &cn, &spec).unwrap();
        let r = verify_witness(&wp, &cn, &w.code, DISTRIBUTION_ATOM_CAP).unwrap();
        assert!(r.coding.holds, "{}", r.coding.render());
        assert!(r.distribution.is_none());
    }

    #[test]
    fn distribution_is_skipped_above_the_cap() {
        let wp = square();
        let cn = compile_network(&wp).unwrap();
        let spec = WitnessSpec { group: z(2), assignment: vec![1, 0], p: 2 };
        let w = build_witness(&wp, &cn, &spec).unwrap();
        let r = verify_witness(&wp, &cn, &w.code, 1000).unwrap();
        assert!(r.holds() && r.distribution.is_none() && r.semantic.is_none());
    }
}
