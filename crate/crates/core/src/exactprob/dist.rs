use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use super::{DistError, Rational};

/// Dense counting is used when the projected key space is at most this large.
const DENSE_LIMIT: u128 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub cardinality: u32,
}

impl Variable {
    pub fn new(name: impl Into<String>, cardinality: u32) -> Self {
        Variable {
            name: name.into(),
            cardinality,
        }
    }
}

/// A derived variable given as a total table over the source product space
/// (first source most significant).
#[derive(Debug, Clone)]
pub struct DerivedVar {
    pub name: String,
    pub cardinality: u32,
    pub table: Vec<u32>,
}

/// Finite joint distribution with exact probabilities.
///
/// Atoms are stored sparsely (zero-probability atoms are dropped) as integer
/// weights over a common denominator `total`.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    vars: Vec<Variable>,
    index: HashMap<String, usize>,
    values: Vec<u32>,
    weights: Vec<u64>,
    total: u64,
}

impl PartialEq for JointDistribution {
    fn eq(&self, other: &Self) -> bool {
        if self.vars != other.vars {
            return false;
        }
        let mine = self.canonical_atoms();
        let theirs = other.canonical_atoms();
        mine.len() == theirs.len()
            && mine.iter().zip(&theirs).all(|((a, wa), (b, wb))| {
                a == b && (*wa as u128) * (other.total as u128) == (*wb as u128) * (self.total as u128)
            })
    }
}

impl JointDistribution {
    /// Builds a distribution from rational atom probabilities.
    pub fn new(vars: Vec<Variable>, atoms: Vec<(Vec<u32>, Rational)>) -> Result<Self, DistError> {
        let mut lcm = BigInt::one();
        for (i, (_, p)) in atoms.iter().enumerate() {
            if p.is_negative() {
                return Err(DistError::NegativeProbability(i));
            }
            lcm = lcm.lcm(p.denom());
        }
        let sum: Rational = atoms.iter().map(|(_, p)| p.clone()).sum();
        if !sum.is_one() {
            return Err(DistError::NotNormalized(sum.to_string()));
        }
        if lcm.to_u64().is_none() {
            return Err(DistError::DenominatorTooLarge(lcm.to_string()));
        }
        let weighted = atoms
            .into_iter()
            .map(|(v, p)| {
                let w = (p.numer() * (&lcm / p.denom())).to_u64().expect("weight <= total");
                (v, w)
            })
            .collect();
        Self::from_weights(vars, weighted)
    }

    /// Builds a distribution from integer weights; probabilities are
    /// `weight / sum(weights)`. Duplicate value tuples are merged.
    pub fn from_weights(vars: Vec<Variable>, atoms: Vec<(Vec<u32>, u64)>) -> Result<Self, DistError> {
        let index = Self::check_vars(&vars)?;
        let k = vars.len();
        let mut merged: HashMap<Vec<u32>, u64> = HashMap::new();
        let mut order = Vec::new();
        let mut total: u64 = 0;
        for (i, (vals, w)) in atoms.into_iter().enumerate() {
            if vals.len() != k {
                return Err(DistError::Arity {
                    atom: i,
                    got: vals.len(),
                    expected: k,
                });
            }
            for (v, var) in vals.iter().zip(&vars) {
                if *v >= var.cardinality {
                    return Err(DistError::ValueOutOfRange {
                        atom: i,
                        var: var.name.clone(),
                        value: *v,
                        cardinality: var.cardinality,
                    });
                }
            }
            if w == 0 {
                continue;
            }
            total = total
                .checked_add(w)
                .ok_or_else(|| DistError::DenominatorTooLarge("sum of weights".into()))?;
            match merged.get_mut(&vals) {
                Some(x) => *x += w,
                None => {
                    order.push(vals.clone());
                    merged.insert(vals, w);
                }
            }
        }
        if total == 0 {
            return Err(DistError::NotNormalized("0".into()));
        }
        let mut values = Vec::with_capacity(order.len() * k);
        let mut weights = Vec::with_capacity(order.len());
        for vals in order {
            weights.push(merged[&vals]);
            values.extend(vals);
        }
        let mut d = JointDistribution {
            vars,
            index,
            values,
            weights,
            total,
        };
        d.reduce();
        Ok(d)
    }

    /// Uniform distribution over rows that are known to be distinct.
    pub(crate) fn uniform_distinct(vars: Vec<Variable>, values: Vec<u32>) -> Result<Self, DistError> {
        let index = Self::check_vars(&vars)?;
        let k = vars.len().max(1);
        let n = values.len() / k;
        Ok(JointDistribution {
            vars,
            index,
            values,
            weights: vec![1; n],
            total: n as u64,
        })
    }

    fn check_vars(vars: &[Variable]) -> Result<HashMap<String, usize>, DistError> {
        let mut index = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            if v.cardinality == 0 {
                return Err(DistError::ZeroCardinality(v.name.clone()));
            }
            if index.insert(v.name.clone(), i).is_some() {
                return Err(DistError::DuplicateVariable(v.name.clone()));
            }
        }
        Ok(index)
    }

    fn reduce(&mut self) {
        let g = self.weights.iter().fold(self.total, |g, &w| g.gcd(&w));
        if g > 1 {
            self.total /= g;
            for w in &mut self.weights {
                *w /= g;
            }
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn num_atoms(&self) -> usize {
        self.weights.len()
    }

    pub fn atom(&self, i: usize) -> &[u32] {
        let k = self.vars.len();
        &self.values[i * k..(i + 1) * k]
    }

    pub fn probability(&self, i: usize) -> Rational {
        Rational::new(BigInt::from(self.weights[i]), BigInt::from(self.total))
    }

    /// Iterates over `(values, probability)` pairs.
    pub fn atoms(&self) -> impl Iterator<Item = (&[u32], Rational)> + '_ {
        (0..self.num_atoms()).map(move |i| (self.atom(i), self.probability(i)))
    }

    pub fn index_of(&self, name: &str) -> Result<usize, DistError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| DistError::UnknownVariable(name.to_string()))
    }

    pub fn has_variable(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn cardinality(&self, name: &str) -> Result<u32, DistError> {
        Ok(self.vars[self.index_of(name)?].cardinality)
    }

    /// Resolves names to sorted, deduplicated column indices.
    fn resolve(&self, names: &[&str]) -> Result<Vec<usize>, DistError> {
        let mut idx = names
            .iter()
            .map(|n| self.index_of(n))
            .collect::<Result<Vec<_>, _>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    fn canonical_atoms(&self) -> Vec<(&[u32], u64)> {
        let mut v: Vec<_> = (0..self.num_atoms()).map(|i| (self.atom(i), self.weights[i])).collect();
        v.sort();
        v
    }

    fn packing(&self, cols: &[usize]) -> Option<Vec<u128>> {
        let mut mult = Vec::with_capacity(cols.len());
        let mut space: u128 = 1;
        for &c in cols {
            mult.push(space);
            space = space.checked_mul(self.vars[c].cardinality as u128)?;
        }
        Some(mult)
    }

    fn key_space(&self, cols: &[usize]) -> Option<u128> {
        cols.iter()
            .try_fold(1u128, |s, &c| s.checked_mul(self.vars[c].cardinality as u128))
    }

    fn packed_keys(&self, cols: &[usize], mult: &[u128]) -> Vec<u128> {
        let k = self.vars.len();
        self.values
            .chunks_exact(k.max(1))
            .take(self.num_atoms())
            .map(|row| cols.iter().zip(mult).map(|(&c, &m)| row[c] as u128 * m).sum())
            .collect()
    }

    fn wide_keys(&self, cols: &[usize]) -> Vec<Vec<u32>> {
        (0..self.num_atoms())
            .map(|i| {
                let row = self.atom(i);
                cols.iter().map(|&c| row[c]).collect()
            })
            .collect()
    }

    /// Marginal weight of each atom's projection onto `cols`, per atom.
    fn projected_weights(&self, cols: &[usize]) -> Vec<u64> {
        match self.packing(cols) {
            Some(mult) => {
                let keys = self.packed_keys(cols, &mult);
                let space = self.key_space(cols).unwrap();
                if space <= DENSE_LIMIT {
                    let mut acc = vec![0u64; space as usize];
                    for (k, w) in keys.iter().zip(&self.weights) {
                        acc[*k as usize] += w;
                    }
                    keys.iter().map(|k| acc[*k as usize]).collect()
                } else {
                    per_atom_sums(&keys, &self.weights)
                }
            }
            None => per_atom_sums(&self.wide_keys(cols), &self.weights),
        }
    }

    fn distinct_count(&self, cols: &[usize]) -> usize {
        match self.packing(cols) {
            Some(mult) => {
                let mut keys = self.packed_keys(cols, &mult);
                keys.sort_unstable();
                keys.dedup();
                keys.len()
            }
            None => {
                let mut keys = self.wide_keys(cols);
                keys.sort_unstable();
                keys.dedup();
                keys.len()
            }
        }
    }

    fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
        let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
        u.sort_unstable();
        u.dedup();
        u
    }

    /// Exact conditional independence `U ⊥ V | W`.
    ///
    /// Checks `p(uvw)·p(w) = p(uw)·p(vw)` on every atom of the support. The
    /// sets may overlap (joint variables are formed by union) and `w` may be
    /// empty. Checking on the support suffices: if the identity holds there,
    /// summing both sides over `(u,v)` shows the off-support products vanish.
    pub fn is_ci(&self, u: &[&str], v: &[&str], w: &[&str]) -> Result<bool, DistError> {
        let (u, v, w) = (self.resolve(u)?, self.resolve(v)?, self.resolve(w)?);
        let uw = Self::union(&u, &w);
        let vw = Self::union(&v, &w);
        let uvw = Self::union(&uw, &v);
        let p_uvw = self.projected_weights(&uvw);
        let p_uw = self.projected_weights(&uw);
        let p_vw = self.projected_weights(&vw);
        let p_w = if w.is_empty() {
            vec![self.total; self.num_atoms()]
        } else {
            self.projected_weights(&w)
        };
        Ok((0..self.num_atoms()).all(|i| {
            p_uvw[i] as u128 * p_w[i] as u128 == p_uw[i] as u128 * p_vw[i] as u128
        }))
    }

    /// `Y ≤ι X`: every positive-probability value of `x` determines `y`.
    pub fn is_function_of(&self, y: &[&str], x: &[&str]) -> Result<bool, DistError> {
        let (y, x) = (self.resolve(y)?, self.resolve(x)?);
        let xy = Self::union(&x, &y);
        Ok(self.distinct_count(&xy) == self.distinct_count(&x))
    }

    /// `X =ι Y`.
    pub fn iota_eq(&self, x: &[&str], y: &[&str]) -> Result<bool, DistError> {
        Ok(self.is_function_of(x, y)? && self.is_function_of(y, x)?)
    }

    /// `X =ι Y | Z`: given `Z`, `X` and `Y` carry the same information.
    pub fn iota_eq_given(&self, x: &[&str], y: &[&str], z: &[&str]) -> Result<bool, DistError> {
        let zy: Vec<&str> = z.iter().chain(y).copied().collect();
        let zx: Vec<&str> = z.iter().chain(x).copied().collect();
        Ok(self.is_function_of(x, &zy)? && self.is_function_of(y, &zx)?)
    }

    /// `X ⊥ Y ⊥ Z`, i.e. `X ⊥ Y` and `XY ⊥ Z`.
    pub fn mutual_indep3(&self, x: &[&str], y: &[&str], z: &[&str]) -> Result<bool, DistError> {
        let xy: Vec<&str> = x.iter().chain(y).copied().collect();
        Ok(self.is_ci(x, y, &[])? && self.is_ci(&xy, z, &[])?)
    }

    pub fn support_size(&self, x: &[&str]) -> Result<usize, DistError> {
        if x.is_empty() {
            return Err(DistError::EmptySet);
        }
        Ok(self.distinct_count(&self.resolve(x)?))
    }

    /// Uniformity over the positive-probability support.
    pub fn is_uniform(&self, x: &[&str]) -> Result<bool, DistError> {
        if x.is_empty() {
            return Err(DistError::EmptySet);
        }
        let p = self.projected_weights(&self.resolve(x)?);
        Ok(p.windows(2).all(|w| w[0] == w[1]))
    }

    /// Shannon entropy in bits of the marginal on `s`. Reporting only.
    pub fn entropy(&self, s: &[&str]) -> Result<f64, DistError> {
        if s.is_empty() {
            return Err(DistError::EmptySet);
        }
        let m = self.marginal(s)?;
        let t = m.total as f64;
        Ok(m.weights
            .iter()
            .map(|&w| {
                let p = w as f64 / t;
                -p * p.log2()
            })
            .sum())
    }

    /// Exact marginal on `s`, with variables in the order given.
    pub fn marginal(&self, s: &[&str]) -> Result<JointDistribution, DistError> {
        if s.is_empty() {
            return Err(DistError::EmptySet);
        }
        let mut cols = Vec::new();
        for n in s {
            let c = self.index_of(n)?;
            if !cols.contains(&c) {
                cols.push(c);
            }
        }
        let vars = cols.iter().map(|&c| self.vars[c].clone()).collect();
        let atoms = (0..self.num_atoms())
            .map(|i| {
                let row = self.atom(i);
                (cols.iter().map(|&c| row[c]).collect(), self.weights[i])
            })
            .collect();
        Self::from_weights(vars, atoms)
    }

    /// Adds a variable computed from each atom's full value row.
    pub fn with_derived<F>(&self, name: &str, cardinality: u32, f: F) -> Result<JointDistribution, DistError>
    where
        F: Fn(&[u32]) -> u32,
    {
        if self.index.contains_key(name) {
            return Err(DistError::DuplicateVariable(name.to_string()));
        }
        let k = self.vars.len();
        let mut vars = self.vars.clone();
        vars.push(Variable::new(name, cardinality));
        let mut values = Vec::with_capacity(self.num_atoms() * (k + 1));
        for i in 0..self.num_atoms() {
            let row = self.atom(i);
            let y = f(row);
            if y >= cardinality {
                return Err(DistError::ValueOutOfRange {
                    atom: i,
                    var: name.to_string(),
                    value: y,
                    cardinality,
                });
            }
            values.extend_from_slice(row);
            values.push(y);
        }
        let mut index = self.index.clone();
        index.insert(name.to_string(), k);
        Ok(JointDistribution {
            vars,
            index,
            values,
            weights: self.weights.clone(),
            total: self.total,
        })
    }

    /// Applies a value permutation to one variable (`new = perm[old]`).
    pub fn relabel(&self, name: &str, perm: &[u32]) -> Result<JointDistribution, DistError> {
        let c = self.index_of(name)?;
        let card = self.vars[c].cardinality as usize;
        if perm.len() != card {
            return Err(DistError::TableSize {
                name: name.to_string(),
                got: perm.len(),
                expected: card,
            });
        }
        let mut out = self.clone();
        let k = self.vars.len();
        for row in out.values.chunks_exact_mut(k) {
            row[c] = perm[row[c] as usize];
        }
        Ok(out)
    }

    /// Total probability mass as a rational (always exactly one).
    pub fn total_mass(&self) -> Rational {
        let s: BigUint = self.weights.iter().map(|&w| BigUint::from(w)).sum();
        Rational::new(BigInt::from(s), BigInt::from(self.total))
    }

    /// Whether every atom has the same probability.
    pub fn is_equiprobable(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

}

fn per_atom_sums<K: Hash + Eq + Clone>(keys: &[K], weights: &[u64]) -> Vec<u64> {
    let mut acc: HashMap<K, u64> = HashMap::with_capacity(keys.len());
    for (k, w) in keys.iter().zip(weights) {
        *acc.entry(k.clone()).or_default() += w;
    }
    keys.iter().map(|k| acc[k]).collect()
}

/// Product of i.i.d. uniform sources with deterministic derived variables.
pub fn uniform_functional_dist(
    sources: &[(&str, u32)],
    derived: Vec<DerivedVar>,
) -> Result<JointDistribution, DistError> {
    let n: usize = sources.iter().map(|s| s.1 as usize).product();
    let mut vars: Vec<Variable> = sources.iter().map(|(n, c)| Variable::new(*n, *c)).collect();
    for d in &derived {
        if d.table.len() != n {
            return Err(DistError::TableSize {
                name: d.name.clone(),
                got: d.table.len(),
                expected: n,
            });
        }
        if let Some((i, &v)) = d.table.iter().enumerate().find(|(_, &v)| v >= d.cardinality) {
            return Err(DistError::ValueOutOfRange {
                atom: i,
                var: d.name.clone(),
                value: v,
                cardinality: d.cardinality,
            });
        }
        vars.push(Variable::new(d.name.clone(), d.cardinality));
    }
    let k = vars.len();
    let mut values = Vec::with_capacity(n * k);
    let mut tuple = vec![0u32; sources.len()];
    for i in 0..n {
        let mut rem = i;
        for (j, (_, c)) in sources.iter().enumerate().rev() {
            tuple[j] = (rem % *c as usize) as u32;
            rem /= *c as usize;
        }
        values.extend_from_slice(&tuple);
        values.extend(derived.iter().map(|d| d.table[i]));
    }
    JointDistribution::uniform_distinct(vars, values)
}

impl JointDistribution {
    /// See [`uniform_functional_dist`].
    pub fn uniform_functional(sources: &[(&str, u32)], derived: Vec<DerivedVar>) -> Result<Self, DistError> {
        uniform_functional_dist(sources, derived)
    }

    /// Index of the source tuple in mixed radix, first source most significant.
    pub fn source_index(cards: &[u32], tuple: &[u32]) -> usize {
        tuple
            .iter()
            .zip(cards)
            .fold(0usize, |acc, (&v, &c)| acc * c as usize + v as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(n: usize) -> Vec<(&'static str, u32)> {
        ["X", "Y", "Z", "W"][..n].iter().map(|s| (*s, 2)).collect()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn entropy_examples() {
        let d = uniform_functional_dist(&bits(1), vec![]).unwrap();
        assert_eq!(d.entropy(&["X"]).unwrap(), 1.0);
        let c = JointDistribution::new(vec![Variable::new("C", 3)], vec![(vec![2], r(1, 1))]).unwrap();
        assert_eq!(c.entropy(&["C"]).unwrap(), 0.0);
        let g = uniform_functional_dist(&[("a", 4), ("b", 4), ("c", 4)], vec![]).unwrap();
        assert!((g.entropy(&["a", "b", "c"]).unwrap() - 6.0).abs() < 1e-12);
        assert!(matches!(d.entropy(&["Q"]), Err(DistError::UnknownVariable(_))));
    }

    #[test]
    fn ci_examples() {
        let d = uniform_functional_dist(&bits(3), vec![]).unwrap();
        assert!(d.is_ci(&["X"], &["Y"], &["Z"]).unwrap());
        let copy = uniform_functional_dist(
            &bits(1),
            vec![DerivedVar { name: "Y".into(), cardinality: 2, table: vec![0, 1] }],
        )
        .unwrap();
        assert!(!copy.is_ci(&["X"], &["Y"], &[]).unwrap());
        let xor = uniform_functional_dist(
            &bits(2),
            vec![DerivedVar { name: "Z".into(), cardinality: 2, table: vec![0, 1, 1, 0] }],
        )
        .unwrap();
        assert!(!xor.is_ci(&["X"], &["Y"], &["Z"]).unwrap());
        assert!(xor.is_ci(&["X"], &["Y"], &[]).unwrap());
        assert!(xor.is_ci(&["X"], &["Z"], &[]).unwrap());
    }

    #[test]
    fn xor_ci_against_enumeration() {
        // Oracle: enumerate the 8 (x,y,z) cells including zero ones.
        let xor = uniform_functional_dist(
            &bits(2),
            vec![DerivedVar { name: "Z".into(), cardinality: 2, table: vec![0, 1, 1, 0] }],
        )
        .unwrap();
        let p = |x: u32, y: u32, z: u32| if x ^ y == z { r(1, 4) } else { r(0, 1) };
        let mut holds = true;
        for z in 0..2 {
            let pz: Rational = (0..2).flat_map(|x| (0..2).map(move |y| (x, y))).map(|(x, y)| p(x, y, z)).sum();
            for x in 0..2 {
                for y in 0..2 {
                    let pxz: Rational = (0..2).map(|yy| p(x, yy, z)).sum();
                    let pyz: Rational = (0..2).map(|xx| p(xx, y, z)).sum();
                    if p(x, y, z) * pz.clone() != pxz * pyz {
                        holds = false;
                    }
                }
            }
        }
        assert_eq!(xor.is_ci(&["X"], &["Y"], &["Z"]).unwrap(), holds);
        assert!(!holds);
    }

    #[test]
    fn functional_dependence() {
        let d = uniform_functional_dist(
            &[("X", 2), ("W", 2)],
            vec![DerivedVar { name: "Y".into(), cardinality: 2, table: vec![0, 1, 1, 0] }],
        )
        .unwrap();
        assert!(d.is_function_of(&["Y"], &["X", "W"]).unwrap());
        assert!(!d.is_function_of(&["Y"], &["X"]).unwrap());
        let z3: Vec<u32> = (0..9).map(|i| (i / 3 + i % 3) % 3).collect();
        let a = uniform_functional_dist(
            &[("A1", 3), ("A2", 3)],
            vec![DerivedVar { name: "A12".into(), cardinality: 3, table: z3 }],
        )
        .unwrap();
        assert!(a.is_function_of(&["A12"], &["A1", "A2"]).unwrap());
        assert_eq!(
            a.is_function_of(&["A12"], &["A1", "A2"]).unwrap(),
            a.is_ci(&["A12"], &["A12"], &["A1", "A2"]).unwrap()
        );
    }

    #[test]
    fn iota_relations() {
        let d = uniform_functional_dist(
            &[("X", 3)],
            vec![DerivedVar { name: "Y".into(), cardinality: 3, table: vec![1, 2, 0] }],
        )
        .unwrap();
        assert!(d.iota_eq(&["X"], &["X"]).unwrap());
        assert!(d.iota_eq(&["X"], &["Y"]).unwrap());
        // U = A1 - A2 over Z_2.
        let u = uniform_functional_dist(
            &[("A1", 2), ("A2", 2)],
            vec![DerivedVar { name: "U".into(), cardinality: 2, table: vec![0, 1, 1, 0] }],
        )
        .unwrap();
        assert!(u.iota_eq_given(&["U"], &["A1"], &["A2"]).unwrap());
        assert!(!u.iota_eq(&["U"], &["A1"]).unwrap());
    }

    #[test]
    fn mutual_independence() {
        assert!(uniform_functional_dist(&bits(3), vec![])
            .unwrap()
            .mutual_indep3(&["X"], &["Y"], &["Z"])
            .unwrap());
        let xor = uniform_functional_dist(
            &bits(2),
            vec![DerivedVar { name: "Z".into(), cardinality: 2, table: vec![0, 1, 1, 0] }],
        )
        .unwrap();
        assert!(!xor.mutual_indep3(&["X"], &["Y"], &["Z"]).unwrap());
        let copy = uniform_functional_dist(
            &bits(2),
            vec![DerivedVar { name: "Z".into(), cardinality: 2, table: vec![0, 1, 0, 1] }],
        )
        .unwrap();
        assert!(!copy.mutual_indep3(&["X"], &["Y"], &["Z"]).unwrap());
    }

    #[test]
    fn uniformity_and_support() {
        let z5 = uniform_functional_dist(&[("X", 5)], vec![]).unwrap();
        assert!(z5.is_uniform(&["X"]).unwrap());
        assert_eq!(z5.support_size(&["X"]).unwrap(), 5);
        let bern = JointDistribution::new(
            vec![Variable::new("B", 2)],
            vec![(vec![0], r(2, 3)), (vec![1], r(1, 3))],
        )
        .unwrap();
        assert!(!bern.is_uniform(&["B"]).unwrap());
        assert_eq!(bern.support_size(&["B"]).unwrap(), 2);
        let xor = uniform_functional_dist(
            &bits(2),
            vec![DerivedVar { name: "Z".into(), cardinality: 2, table: vec![0, 1, 1, 0] }],
        )
        .unwrap();
        assert!(xor.is_uniform(&["X", "Z"]).unwrap());
        assert_eq!(xor.support_size(&["X", "Z"]).unwrap(), 4);
        assert!(matches!(xor.is_uniform(&[]), Err(DistError::EmptySet)));
    }

    #[test]
    fn construction_errors() {
        let e = uniform_functional_dist(
            &bits(1),
            vec![DerivedVar { name: "Y".into(), cardinality: 2, table: vec![0] }],
        );
        assert!(matches!(e, Err(DistError::TableSize { .. })));
        let e = uniform_functional_dist(
            &bits(1),
            vec![DerivedVar { name: "Y".into(), cardinality: 2, table: vec![0, 2] }],
        );
        assert!(matches!(e, Err(DistError::ValueOutOfRange { .. })));
        let e = JointDistribution::new(vec![Variable::new("X", 2)], vec![(vec![0], r(1, 2))]);
        assert!(matches!(e, Err(DistError::NotNormalized(_))));
        let e = JointDistribution::new(
            vec![Variable::new("X", 2)],
            vec![(vec![0], r(3, 2)), (vec![1], r(-1, 2))],
        );
        assert!(matches!(e, Err(DistError::NegativeProbability(1))));
    }

    #[test]
    fn marginals() {
        let d = uniform_functional_dist(&bits(3), vec![]).unwrap();
        let m = d.marginal(&["X", "Z"]).unwrap();
        assert_eq!(m, uniform_functional_dist(&[("X", 2), ("Z", 2)], vec![]).unwrap());
        assert_eq!(d.marginal(&["X", "Y", "Z"]).unwrap(), d);
        assert_eq!(m.total_mass(), r(1, 1));
    }
}
