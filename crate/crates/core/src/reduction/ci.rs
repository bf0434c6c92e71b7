use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use serde::Serialize;

use super::{add_group_inverses, ReductionError, WordProblemInstance};
use crate::exactprob::{FunctionalModel, JointDistribution};
use crate::gadgets::{EndoExpr, Formula, GroupEnv};
use crate::predicates::{IndexPerm, PredicateReport, A_NAMES, D_N};

/// `U ⊥ V | W` over variable indices; `Y ⊥ Y | X` encodes `Y ι≤ X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CIStatement {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    pub w: Vec<usize>,
    /// Predicate path that produced the statement.
    pub origin: String,
}

/// How a CI variable is realized in the witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarWitness {
    Linear(Formula),
    /// An independent uniform variable on the group.
    Seed,
    /// `formula + seed`.
    Offset { formula: Formula, seed: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct CIInstance {
    pub variables: Vec<String>,
    pub antecedents: Vec<CIStatement>,
    pub consequent: CIStatement,
    /// Triples may overlap; turning them into disjoint ones is left to an
    /// external reduction.
    pub disjoint: bool,
    /// Variable counts of the instance the emitter actually compiled.
    pub k: usize,
    pub l: usize,
    #[serde(skip)]
    pub witness: Vec<VarWitness>,
}

#[derive(Default)]
struct Emitter {
    vars: Vec<String>,
    index: HashMap<String, usize>,
    witness: Vec<VarWitness>,
    stmts: Vec<CIStatement>,
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = a.to_vec();
    for &x in b {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

impl Emitter {
    fn var(&mut self, name: &str, w: VarWitness) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.vars.len();
        self.vars.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.witness.push(w);
        i
    }

    fn a(&mut self, name: &str) -> usize {
        self.index[name]
    }

    fn stmt(&mut self, u: Vec<usize>, v: Vec<usize>, w: Vec<usize>, origin: &str) {
        self.stmts.push(CIStatement { u, v, w, origin: origin.to_string() });
    }

    fn fd(&mut self, y: &[usize], x: &[usize], origin: &str) {
        self.stmt(y.to_vec(), y.to_vec(), x.to_vec(), origin);
    }

    fn indep(&mut self, a: &[usize], b: &[usize], origin: &str) {
        self.stmt(a.to_vec(), b.to_vec(), vec![], origin);
    }

    /// `X ι= Y | Z`.
    fn iota_eq_given(&mut self, x: usize, y: usize, z: usize, origin: &str) {
        self.fd(&[x], &[z, y], origin);
        self.fd(&[y], &[z, x], origin);
    }

    /// Same clause order as the predicate evaluator.
    fn tri(&mut self, ys: [usize; 3], origin: &str) {
        for i in 0..3 {
            self.fd(&[ys[i]], &[ys[(i + 1) % 3], ys[(i + 2) % 3]], origin);
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            self.indep(&[ys[i]], &[ys[j]], origin);
        }
    }

    fn mutual3(&mut self, a: usize, b: usize, c: usize, origin: &str) {
        self.indep(&[a], &[b], origin);
        self.indep(&[a, b], &[c], origin);
    }

    fn fnf(&mut self) {
        for t in D_N {
            let ys = t.map(|i| self.a(A_NAMES[i]));
            self.tri(ys, "fnf");
        }
        let [a1, a2, a3] = ["A1", "A2", "A3"].map(|n| self.a(n));
        self.mutual3(a1, a2, a3, "fnf");
    }

    /// `ueq(X, Y)` through fresh `T1, T2, T3`: `tri(X, T1, T2)` and
    /// `tri(Y, T1, T3)`.
    fn ueq(&mut self, x: usize, y: usize, path: &str) {
        let seed = format!("{path}.T1");
        let t1 = self.var(&seed, VarWitness::Seed);
        let fx = self.linear(x);
        let fy = self.linear(y);
        let t2 = self.var(&format!("{path}.T2"), VarWitness::Offset { formula: fx, seed: seed.clone() });
        let t3 = self.var(&format!("{path}.T3"), VarWitness::Offset { formula: fy, seed });
        self.tri([x, t1, t2], path);
        self.tri([y, t1, t3], path);
    }

    fn linear(&self, i: usize) -> Formula {
        match &self.witness[i] {
            VarWitness::Linear(f) => f.clone(),
            _ => unreachable!("ueq arguments are linear"),
        }
    }

    /// `end_{i,j}(U)` with fresh `V, W`.
    fn end(&mut self, (i, j): (u8, u8), u: usize, g: &EndoExpr, path: &str) {
        let p = IndexPerm::sending(i, j).expect("valid pair");
        let k = p.image(3);
        let name = |s: &str| p.apply(s);
        let v = self.var(
            &format!("{path}.V"),
            VarWitness::Linear(Formula::end(i, j, g).sub(&Formula::term(g.clone(), k))),
        );
        let w = self.var(
            &format!("{path}.W"),
            VarWitness::Linear(Formula::end(i, j, g).add(&Formula::source(k))),
        );
        let [a1, a2, a3, a13, a23] = ["A1", "A2", "A3", "A13", "A23"].map(|s| self.a(&name(s)));
        self.ueq(u, a1, &format!("{path}.ueqU"));
        self.ueq(v, a1, &format!("{path}.ueqV"));
        self.ueq(w, a1, &format!("{path}.ueqW"));
        self.iota_eq_given(u, a1, a2, path);
        self.iota_eq_given(v, a1, a23, path);
        self.iota_eq_given(u, v, a3, path);
        self.iota_eq_given(w, a13, a2, path);
        self.iota_eq_given(u, w, a3, path);
    }

    fn conv13(&mut self, u: usize, v: usize, g: &EndoExpr, path: &str) {
        let w = self.var(&format!("{path}.W"), VarWitness::Linear(Formula::end(2, 3, &EndoExpr::Id)));
        self.end((1, 2), u, g, &format!("{path}.endU"));
        self.end((1, 3), v, g, &format!("{path}.endV"));
        self.end((2, 3), w, &EndoExpr::Id, &format!("{path}.endW"));
        let [a12, a13] = ["A12", "A13"].map(|s| self.a(s));
        self.fd(&[a13], &[a12, w], path);
        self.fd(&[v], &[u, w], path);
    }

    fn conv32(&mut self, u: usize, v: usize, g: &EndoExpr, path: &str) {
        let w = self.var(&format!("{path}.W"), VarWitness::Linear(Formula::end(1, 3, &EndoExpr::Id)));
        self.end((1, 2), u, g, &format!("{path}.endU"));
        self.end((3, 2), v, g, &format!("{path}.endV"));
        self.end((1, 3), w, &EndoExpr::Id, &format!("{path}.endW"));
        let [a12, a23] = ["A12", "A23"].map(|s| self.a(s));
        self.fd(&[a12], &[w, a23], path);
        self.fd(&[v], &[w, u], path);
    }

    fn comp(&mut self, u: [usize; 3], g: [&EndoExpr; 3], path: &str) {
        let v1 = self.var(&format!("{path}.V1"), VarWitness::Linear(Formula::end(1, 3, g[0])));
        let v2 = self.var(&format!("{path}.V2"), VarWitness::Linear(Formula::end(3, 2, g[1])));
        for (n, (&x, h)) in u.iter().zip(g).enumerate() {
            self.end((1, 2), x, h, &format!("{path}.endU{}", n + 1));
        }
        self.conv13(u[0], v1, g[0], &format!("{path}.conv13"));
        self.conv32(u[1], v2, g[1], &format!("{path}.conv32"));
        self.fd(&[u[2]], &[v1, v2], path);
    }
}

/// Flattens the word problem into one CI implication instance over
/// `A1..A123`, `U_1..U_k` and fresh auxiliaries.
///
/// An identity variable is added when the instance has none, since the
/// consequent `U_1 ι≤ U_e` needs one.
pub fn compile_ci(wp: &WordProblemInstance) -> Result<CIInstance, ReductionError> {
    let wp = if wp.identity.is_none() { add_group_inverses(wp, &[])? } else { wp.clone() };
    let mut em = Emitter::default();
    for name in A_NAMES {
        let f = Formula::sum(&name[1..].bytes().map(|b| b - b'0').collect::<Vec<_>>());
        em.var(name, VarWitness::Linear(f));
    }
    let us: Vec<usize> = (1..=wp.k)
        .map(|j| em.var(&format!("U{j}"), VarWitness::Linear(Formula::end(1, 2, &EndoExpr::var(j)))))
        .collect();
    em.fnf();
    for j in 1..=wp.k {
        em.end((1, 2), us[j - 1], &EndoExpr::var(j), &format!("x{j}.end"));
    }
    for (r, &[a, b, c]) in wp.relations.iter().enumerate() {
        let g = [EndoExpr::var(a), EndoExpr::var(b), EndoExpr::var(c)];
        em.comp([us[a - 1], us[b - 1], us[c - 1]], [&g[0], &g[1], &g[2]], &format!("r{r}.comp"));
    }
    let e = wp.identity.expect("identity present");
    let consequent = CIStatement {
        u: vec![us[0]],
        v: vec![us[0]],
        w: vec![us[e - 1]],
        origin: "goal".into(),
    };
    Ok(CIInstance {
        variables: em.vars,
        antecedents: em.stmts,
        consequent,
        disjoint: false,
        k: wp.k,
        l: wp.relations.len(),
        witness: em.witness,
    })
}

/// Closed-form statement and variable counts of [`compile_ci`] for an
/// instance with `k` variables and `l` relations (after the identity is
/// added).
pub fn ci_census(k: usize, l: usize) -> (usize, usize) {
    (38 + 46 * k + 419 * l, 7 + 12 * k + 103 * l)
}

/// Witness model: `A1, A2, A3` and every `Seed` uniform on the group,
/// every other variable derived from its formula.
pub fn ci_witness_model(ci: &CIInstance, env: &GroupEnv) -> Result<FunctionalModel, ReductionError> {
    let n = env.group.order() as u32;
    let mut m = FunctionalModel::new();
    for s in ["A1", "A2", "A3"] {
        m.add_source(s, n)?;
    }
    let grp = env.group.clone();
    for (name, w) in ci.variables.iter().zip(&ci.witness) {
        let (formula, seed) = match w {
            VarWitness::Seed => {
                m.add_source(name, n)?;
                continue;
            }
            VarWitness::Linear(f) => (f, None),
            VarWitness::Offset { formula, seed } => (formula, Some(seed.as_str())),
        };
        if matches!(name.as_str(), "A1" | "A2" | "A3") {
            continue;
        }
        let table = env.formula_table(formula)?;
        let nn = n as usize;
        let mut inputs = vec!["A1", "A2", "A3"];
        inputs.extend(seed);
        let g = grp.clone();
        m.add_derived(name, n, &inputs, move |x| {
            let base = table[(x[0] as usize * nn + x[1] as usize) * nn + x[2] as usize];
            match x.get(3) {
                Some(&s) => g.add(base, s),
                None => base,
            }
        })?;
    }
    Ok(m)
}

/// Evaluates each statement exactly on the witness model; stops at the
/// first failure.
pub fn check_ci_statements(
    ci: &CIInstance,
    stmts: &[CIStatement],
    model: &FunctionalModel,
    cap: u128,
) -> Result<PredicateReport, ReductionError> {
    let mut cache: HashMap<Vec<usize>, JointDistribution> = HashMap::new();
    for s in stmts {
        let mut vars = union(&union(&s.u, &s.v), &s.w);
        vars.sort_unstable();
        let d = match cache.get(&vars) {
            Some(d) => d,
            None => {
                let names: Vec<&str> = vars.iter().map(|&i| ci.variables[i].as_str()).collect();
                let d = model.materialize(&names, cap)?;
                cache.entry(vars).or_insert(d)
            }
        };
        let nm = |ix: &[usize]| ix.iter().map(|&i| ci.variables[i].as_str()).collect::<Vec<_>>();
        if !d.is_ci(&nm(&s.u), &nm(&s.v), &nm(&s.w))? {
            return Ok(PredicateReport::fail("ci statements", render(ci, s)));
        }
    }
    Ok(PredicateReport::pass("ci statements"))
}

pub fn render(ci: &CIInstance, s: &CIStatement) -> String {
    let nm = |ix: &[usize]| ix.iter().map(|&i| ci.variables[i].as_str()).collect::<Vec<_>>().join(" ");
    if s.u == s.v {
        format!("{}: ({}) ι≤ ({})", s.origin, nm(&s.u), nm(&s.w))
    } else if s.w.is_empty() {
        format!("{}: ({}) ⊥ ({})", s.origin, nm(&s.u), nm(&s.v))
    } else {
        format!("{}: ({}) ⊥ ({}) | ({})", s.origin, nm(&s.u), nm(&s.v), nm(&s.w))
    }
}

/// Coefficients of `I(U;V|W) = H(UW) + H(VW) − H(UVW) − H(W)` on sorted
/// variable subsets, with repeated subsets combined and zero terms and the
/// empty set dropped.
pub fn cmi_expansion(u: &[usize], v: &[usize], w: &[usize]) -> BTreeMap<Vec<usize>, i64> {
    let set = |parts: &[&[usize]]| {
        let mut s: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    let mut out = BTreeMap::new();
    for (s, c) in [(set(&[u, w]), 1), (set(&[v, w]), 1), (set(&[u, v, w]), -1), (set(&[w]), -1)] {
        if !s.is_empty() {
            *out.entry(s).or_insert(0) += c;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropicTerm {
    pub subset: Vec<String>,
    /// Position in binary-counter subset order (bit `i` set iff variable
    /// `i` is present), as a decimal string.
    pub index: String,
    pub coef: i64,
}

/// Sparse vectors `a` and `b` over the entropic coordinates: the
/// antecedents hold iff `a·h ≥ 0` and the consequent iff `b·h ≥ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct EntropicExport {
    pub k: usize,
    pub variables: Vec<String>,
    pub a: Vec<EntropicTerm>,
    pub b: Vec<EntropicTerm>,
}

/// `a = −Σ I(U_i;V_i|W_i)` over the antecedents and `b = −I(U;V|W)` for
/// the consequent. Every CMI is nonnegative, so the sum vanishes iff each
/// term does.
pub fn ci_to_entropic(ci: &CIInstance) -> EntropicExport {
    let mut a: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
    for s in &ci.antecedents {
        for (k, c) in cmi_expansion(&s.u, &s.v, &s.w) {
            *a.entry(k).or_insert(0) -= c;
        }
    }
    a.retain(|_, c| *c != 0);
    let b: BTreeMap<Vec<usize>, i64> = cmi_expansion(&ci.consequent.u, &ci.consequent.v, &ci.consequent.w)
        .into_iter()
        .map(|(k, c)| (k, -c))
        .collect();
    let terms = |m: BTreeMap<Vec<usize>, i64>| {
        let mut v: Vec<(BigUint, EntropicTerm)> = m
            .into_iter()
            .map(|(s, coef)| {
                let idx = s.iter().fold(BigUint::from(0u8), |acc, &i| acc | (BigUint::from(1u8) << i));
                let t = EntropicTerm {
                    subset: s.iter().map(|&i| ci.variables[i].clone()).collect(),
                    index: idx.to_string(),
                    coef,
                };
                (idx, t)
            })
            .collect();
        v.sort_by(|x, y| x.0.cmp(&y.0));
        v.into_iter().map(|(_, t)| t).collect()
    };
    EntropicExport {
        k: ci.variables.len(),
        variables: ci.variables.clone(),
        a: terms(a),
        b: terms(b),
    }
}

/// `Σ coef · H(subset)` on a distribution over (at least) the named
/// variables.
pub fn eval_entropic(terms: &[EntropicTerm], d: &JointDistribution) -> Result<f64, ReductionError> {
    let mut acc = 0.0;
    for t in terms {
        let names: Vec<&str> = t.subset.iter().map(String::as_str).collect();
        acc += t.coef as f64 * d.entropy(&names)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::finalg::{AbelianGroup, Endo};

    /// Independent count by walking the predicate grammar.
    fn walk(kind: &str) -> (usize, usize) {
        let add = |a: (usize, usize), b: (usize, usize)| (a.0 + b.0, a.1 + b.1);
        let times = |n: usize, a: (usize, usize)| (n * a.0, n * a.1);
        match kind {
            "fd" | "indep" => (1, 0),
            "iota_eq_given" => times(2, walk("fd")),
            "tri" => add(times(3, walk("fd")), times(3, walk("indep"))),
            "mutual3" => times(2, walk("indep")),
            "ueq" => add(times(2, walk("tri")), (0, 3)),
            "fnf" => add(times(6, walk("tri")), walk("mutual3")),
            "end" => add(add(times(3, walk("ueq")), times(5, walk("iota_eq_given"))), (0, 2)),
            "conv" => add(add(times(3, walk("end")), times(2, walk("fd"))), (0, 1)),
            "comp" => add(add(add(times(3, walk("end")), times(2, walk("conv"))), walk("fd")), (0, 2)),
            _ => unreachable!(),
        }
    }

    fn oracle(k: usize, l: usize) -> (usize, usize) {
        let (fs, _) = walk("fnf");
        let (es, ev) = walk("end");
        let (cs, cv) = walk("comp");
        (fs + k * es + l * cs, 7 + k + k * ev + l * cv)
    }

    #[test]
    fn census_matches_grammar_walk() {
        assert_eq!(walk("end"), (46, 11));
        assert_eq!(walk("comp"), (419, 103));
        for (k, rels) in [(1, vec![]), (2, vec![[1, 1, 2]]), (3, vec![[1, 2, 3], [2, 1, 3]])] {
            let ci = compile_ci(&WordProblemInstance::new(k, rels.clone())).unwrap();
            let (k2, l2) = (k + 1, rels.len() + 1);
            assert_eq!((ci.k, ci.l), (k2, l2));
            assert_eq!((ci.antecedents.len(), ci.variables.len()), oracle(k2, l2));
            assert_eq!(ci_census(k2, l2), oracle(k2, l2));
        }
    }

    #[test]
    fn consequent_and_determinism() {
        let wp = WordProblemInstance::new(2, vec![[1, 1, 2]]);
        let a = compile_ci(&wp).unwrap();
        let b = compile_ci(&wp).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let u1 = a.variables.iter().position(|v| v == "U1").unwrap();
        let ue = a.variables.iter().position(|v| v == "U3").unwrap();
        assert_eq!((a.consequent.u.clone(), a.consequent.v.clone(), a.consequent.w.clone()), (vec![u1], vec![u1], vec![ue]));
        assert_eq!(a.antecedents.iter().filter(|s| s.origin.starts_with("r0.comp")).count(), 419);
        assert!(!a.disjoint);
    }

    #[test]
    fn expansion_examples() {
        let x = cmi_expansion(&[0], &[1], &[]);
        assert_eq!(x, BTreeMap::from([(vec![0], 1), (vec![1], 1), (vec![0, 1], -1)]));
        // Y ι≤ X as Y ⊥ Y | X: H(XY) − H(X).
        let fd = cmi_expansion(&[1], &[1], &[0]);
        assert_eq!(fd, BTreeMap::from([(vec![0, 1], 1), (vec![0], -1)]));
        // Y ι≤ ∅ is H(Y).
        assert_eq!(cmi_expansion(&[2], &[2], &[]), BTreeMap::from([(vec![2], 1)]));
    }

    /// `I(U;V|W)` straight from the atom probabilities.
    fn cmi_direct(p: &BTreeMap<Vec<u32>, f64>, u: &[usize], v: &[usize], w: &[usize]) -> f64 {
        let marg = |s: &[usize]| {
            let mut m: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
            for (x, &q) in p {
                *m.entry(s.iter().map(|&i| x[i]).collect()).or_insert(0.0) += q;
            }
            m
        };
        let (uw, vw, uvw, ww) = (union(u, w), union(v, w), union(&union(u, v), w), w.to_vec());
        let (puw, pvw, pw) = (marg(&uw), marg(&vw), marg(&ww));
        marg(&uvw)
            .iter()
            .map(|(x, &q)| {
                let pick = |s: &[usize]| s.iter().map(|i| x[uvw.iter().position(|j| j == i).unwrap()]).collect::<Vec<_>>();
                q * (q * pw[&pick(&ww)] / (puw[&pick(&uw)] * pvw[&pick(&vw)])).ln()
            })
            .sum()
    }

    #[test]
    fn entropic_export_matches_direct_cmi() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let names: Vec<String> = (0..4).map(|i| format!("X{i}")).collect();
        let subset = |rng: &mut rand_chacha::ChaCha8Rng, min: usize| loop {
            let s: Vec<usize> = (0..4).filter(|_| rng.gen_bool(0.4)).collect();
            if s.len() >= min {
                break s;
            }
        };
        for _ in 0..50 {
            let mut atoms = BTreeMap::new();
            let mut weighted = Vec::new();
            for _ in 0..rng.gen_range(3..12) {
                let x: Vec<u32> = (0..4).map(|_| rng.gen_range(0..3)).collect();
                let w: u64 = rng.gen_range(1..10);
                if atoms.insert(x.clone(), w).is_none() {
                    weighted.push((x, w));
                }
            }
            let total: u64 = weighted.iter().map(|a| a.1).sum();
            let probs: BTreeMap<Vec<u32>, f64> = weighted.iter().map(|(x, w)| (x.clone(), *w as f64 / total as f64)).collect();
            let vars = names.iter().map(|n| crate::exactprob::Variable::new(n.clone(), 3)).collect();
            let d = JointDistribution::from_weights(vars, weighted).unwrap();
            let stmts: Vec<CIStatement> = (0..rng.gen_range(1..5))
                .map(|_| {
                    let u = subset(&mut rng, 1);
                    let v = if rng.gen_bool(0.3) { u.clone() } else { subset(&mut rng, 1) };
                    CIStatement { u, v, w: subset(&mut rng, 0), origin: "t".into() }
                })
                .collect();
            let ci = CIInstance {
                variables: names.clone(),
                antecedents: stmts[1..].to_vec(),
                consequent: stmts[0].clone(),
                disjoint: false,
                k: 0,
                l: 0,
                witness: Vec::new(),
            };
            let ex = ci_to_entropic(&ci);
            let want_a: f64 = -ci.antecedents.iter().map(|s| cmi_direct(&probs, &s.u, &s.v, &s.w)).sum::<f64>();
            let want_b = -cmi_direct(&probs, &ci.consequent.u, &ci.consequent.v, &ci.consequent.w);
            // Entropies are in bits; the direct sum uses nats.
            let ln2 = std::f64::consts::LN_2;
            assert!((eval_entropic(&ex.a, &d).unwrap() * ln2 - want_a).abs() < 1e-9);
            assert!((eval_entropic(&ex.b, &d).unwrap() * ln2 - want_b).abs() < 1e-9);
            for t in ex.a.iter().chain(&ex.b) {
                let idx: u64 = t.subset.iter().map(|n| 1u64 << names.iter().position(|m| m == n).unwrap()).sum();
                assert_eq!(t.index, idx.to_string());
            }
        }
    }

    #[test]
    fn witness_satisfies_antecedents() {
        // x1 = 2 on Z_3 with x1·x1 = x2 (x2 = 4 = 1) and the identity.
        let g = Arc::new(AbelianGroup::cyclic(3).unwrap());
        let wp = WordProblemInstance::new(2, vec![[1, 1, 2]]);
        let ci = compile_ci(&wp).unwrap();
        let env = GroupEnv {
            group: g.clone(),
            vars: vec![Endo::scalar(&g, 2), Endo::scalar(&g, 1), Endo::identity(&g)],
        };
        let m = ci_witness_model(&ci, &env).unwrap();
        assert!(check_ci_statements(&ci, &ci.antecedents, &m, 1 << 20).unwrap().holds);
        let r = check_ci_statements(&ci, std::slice::from_ref(&ci.consequent), &m, 1 << 20).unwrap();
        assert!(!r.holds);
        // Breaking the relation breaks an antecedent inside the composition.
        let bad = GroupEnv { vars: vec![Endo::scalar(&g, 2), Endo::scalar(&g, 2), Endo::identity(&g)], ..env };
        let m = ci_witness_model(&ci, &bad).unwrap();
        let r = check_ci_statements(&ci, &ci.antecedents, &m, 1 << 20).unwrap();
        assert!(r.failing_clause.unwrap().starts_with("r0.comp"));
    }
}
