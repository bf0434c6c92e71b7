use std::collections::HashMap;
use std::sync::Arc;

use super::dist::{JointDistribution, Variable};
use super::DistError;

type EvalFn = Arc<dyn Fn(&[u32]) -> u32 + Send + Sync>;

/// A variable of a [`FunctionalModel`].
#[derive(Clone)]
pub enum ModelVar {
    Source {
        name: String,
        cardinality: u32,
    },
    Derived {
        name: String,
        cardinality: u32,
        inputs: Vec<usize>,
        eval: EvalFn,
    },
}

impl ModelVar {
    pub fn name(&self) -> &str {
        match self {
            ModelVar::Source { name, .. } | ModelVar::Derived { name, .. } => name,
        }
    }

    pub fn cardinality(&self) -> u32 {
        match self {
            ModelVar::Source { cardinality, .. } | ModelVar::Derived { cardinality, .. } => *cardinality,
        }
    }
}

impl std::fmt::Debug for ModelVar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelVar::Source { name, cardinality } => write!(f, "Source({name}:{cardinality})"),
            ModelVar::Derived { name, cardinality, inputs, .. } => {
                write!(f, "Derived({name}:{cardinality} <- {inputs:?})")
            }
        }
    }
}

/// Independent uniform sources plus deterministic derived variables, kept
/// symbolic until a subset of variables is materialized.
///
/// Large witness systems have far more sources than can be enumerated
/// jointly; any given predicate only touches a few variables, so
/// [`FunctionalModel::materialize`] enumerates only the sources those
/// variables depend on.
#[derive(Clone, Debug, Default)]
pub struct FunctionalModel {
    vars: Vec<ModelVar>,
    index: HashMap<String, usize>,
}

impl FunctionalModel {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, v: ModelVar) -> Result<usize, DistError> {
        if v.cardinality() == 0 {
            return Err(DistError::ZeroCardinality(v.name().to_string()));
        }
        if self.index.contains_key(v.name()) {
            return Err(DistError::DuplicateVariable(v.name().to_string()));
        }
        let i = self.vars.len();
        self.index.insert(v.name().to_string(), i);
        self.vars.push(v);
        Ok(i)
    }

    pub fn add_source(&mut self, name: &str, cardinality: u32) -> Result<usize, DistError> {
        self.push(ModelVar::Source {
            name: name.to_string(),
            cardinality,
        })
    }

    /// Adds a derived variable; `eval` receives the input values in the
    /// order of `inputs`. Inputs must already exist.
    pub fn add_derived<F>(&mut self, name: &str, cardinality: u32, inputs: &[&str], eval: F) -> Result<usize, DistError>
    where
        F: Fn(&[u32]) -> u32 + Send + Sync + 'static,
    {
        let inputs = inputs.iter().map(|n| self.index_of(n)).collect::<Result<Vec<_>, _>>()?;
        self.push(ModelVar::Derived {
            name: name.to_string(),
            cardinality,
            inputs,
            eval: Arc::new(eval),
        })
    }

    /// Derived variable given by a table over its inputs (mixed radix,
    /// first input most significant).
    pub fn add_table(&mut self, name: &str, cardinality: u32, inputs: &[&str], table: Vec<u32>) -> Result<usize, DistError> {
        let cards = inputs.iter().map(|n| Ok(self.vars[self.index_of(n)?].cardinality())).collect::<Result<Vec<_>, DistError>>()?;
        let expected: usize = cards.iter().map(|&c| c as usize).product();
        if table.len() != expected {
            return Err(DistError::TableSize {
                name: name.to_string(),
                got: table.len(),
                expected,
            });
        }
        if let Some((i, &v)) = table.iter().enumerate().find(|(_, &v)| v >= cardinality) {
            return Err(DistError::ValueOutOfRange {
                atom: i,
                var: name.to_string(),
                value: v,
                cardinality,
            });
        }
        self.add_derived(name, cardinality, inputs, move |vals| {
            table[JointDistribution::source_index(&cards, vals)]
        })
    }

    pub fn index_of(&self, name: &str) -> Result<usize, DistError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| DistError::UnknownVariable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn variables(&self) -> &[ModelVar] {
        &self.vars
    }

    /// Sources that the named variables transitively depend on, in
    /// declaration order.
    pub fn source_support(&self, names: &[&str]) -> Result<Vec<usize>, DistError> {
        let mut seen = vec![false; self.vars.len()];
        let mut stack = names.iter().map(|n| self.index_of(n)).collect::<Result<Vec<_>, _>>()?;
        while let Some(i) = stack.pop() {
            if std::mem::replace(&mut seen[i], true) {
                continue;
            }
            if let ModelVar::Derived { inputs, .. } = &self.vars[i] {
                stack.extend(inputs.iter().copied());
            }
        }
        Ok((0..self.vars.len())
            .filter(|&i| seen[i] && matches!(self.vars[i], ModelVar::Source { .. }))
            .collect())
    }

    /// Number of atoms [`Self::materialize`] would enumerate.
    pub fn atom_count(&self, names: &[&str]) -> Result<u128, DistError> {
        Ok(self
            .source_support(names)?
            .iter()
            .map(|&i| self.vars[i].cardinality() as u128)
            .product())
    }

    /// Joint distribution of `names` together with the sources they depend
    /// on. Sources are kept as columns so that atoms stay distinct and all
    /// probabilities equal `1/atoms`.
    pub fn materialize(&self, names: &[&str], cap: u128) -> Result<JointDistribution, DistError> {
        let sources = self.source_support(names)?;
        let needed = self.atom_count(names)?;
        if needed > cap {
            return Err(DistError::AtomCap { needed, cap });
        }
        let mut cols: Vec<usize> = sources.clone();
        for n in names {
            let i = self.index_of(n)?;
            if !cols.contains(&i) {
                cols.push(i);
            }
        }
        // Everything on the dependency path, in declaration order (which is
        // topological because inputs must exist before use).
        let mut needed_vars = vec![false; self.vars.len()];
        let mut stack = cols.clone();
        while let Some(i) = stack.pop() {
            if std::mem::replace(&mut needed_vars[i], true) {
                continue;
            }
            if let ModelVar::Derived { inputs, .. } = &self.vars[i] {
                stack.extend(inputs.iter().copied());
            }
        }
        let order: Vec<usize> = (0..self.vars.len()).filter(|&i| needed_vars[i]).collect();
        let cards: Vec<u32> = sources.iter().map(|&i| self.vars[i].cardinality()).collect();
        let n = needed as usize;
        let mut scratch = vec![0u32; self.vars.len()];
        let mut values = Vec::with_capacity(n * cols.len());
        let mut args = Vec::new();
        for atom in 0..n {
            let mut rem = atom;
            for (j, &s) in sources.iter().enumerate().rev() {
                scratch[s] = (rem % cards[j] as usize) as u32;
                rem /= cards[j] as usize;
            }
            for &i in &order {
                if let ModelVar::Derived { name, cardinality, inputs, eval } = &self.vars[i] {
                    args.clear();
                    args.extend(inputs.iter().map(|&k| scratch[k]));
                    let y = eval(&args);
                    if y >= *cardinality {
                        return Err(DistError::ValueOutOfRange {
                            atom,
                            var: name.clone(),
                            value: y,
                            cardinality: *cardinality,
                        });
                    }
                    scratch[i] = y;
                }
            }
            values.extend(cols.iter().map(|&c| scratch[c]));
        }
        let vars = cols
            .iter()
            .map(|&c| Variable::new(self.vars[c].name(), self.vars[c].cardinality()))
            .collect();
        JointDistribution::uniform_distinct(vars, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn materializes_only_needed_sources() {
        let mut m = FunctionalModel::new();
        m.add_source("A", 3).unwrap();
        m.add_source("B", 3).unwrap();
        m.add_source("C", 5).unwrap();
        m.add_derived("S", 3, &["A", "B"], |v| (v[0] + v[1]) % 3).unwrap();
        m.add_derived("T", 3, &["S"], |v| (v[0] * 2) % 3).unwrap();
        assert_eq!(m.atom_count(&["T"]).unwrap(), 9);
        let d = m.materialize(&["T", "A"], 1000).unwrap();
        assert_eq!(d.num_atoms(), 9);
        assert!(d.is_function_of(&["T"], &["A", "B"]).unwrap());
        assert!(d.is_ci(&["T"], &["A"], &[]).unwrap());
        assert!(matches!(m.materialize(&["T", "C"], 20), Err(DistError::AtomCap { .. })));
    }

    #[test]
    fn table_variables() {
        let mut m = FunctionalModel::new();
        m.add_source("X", 2).unwrap();
        m.add_source("Y", 2).unwrap();
        m.add_table("Z", 2, &["X", "Y"], vec![0, 1, 1, 0]).unwrap();
        let d = m.materialize(&["X", "Y", "Z"], 100).unwrap();
        assert!(!d.is_ci(&["X"], &["Y"], &["Z"]).unwrap());
        assert!(matches!(
            m.add_table("Q", 2, &["X"], vec![0, 1, 1]),
            Err(DistError::TableSize { .. })
        ));
        assert!(matches!(m.add_source("X", 2), Err(DistError::DuplicateVariable(_))));
    }
}
