use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::dist::{JointDistribution, Variable};
use super::{DistError, Rational};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct VariableRecord {
    pub name: String,
    pub cardinality: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AtomRecord {
    pub values: Vec<u32>,
    /// Exact probability as `"num/den"` or `"num"`.
    pub p: String,
}

/// On-disk form of a [`JointDistribution`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DistFile {
    pub variables: Vec<VariableRecord>,
    pub atoms: Vec<AtomRecord>,
}

pub fn parse_rational(s: &str) -> Result<Rational, DistError> {
    let bad = || DistError::BadProbability(s.to_string());
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

impl DistFile {
    pub fn to_distribution(&self) -> Result<JointDistribution, DistError> {
        let vars = self
            .variables
            .iter()
            .map(|v| Variable::new(v.name.clone(), v.cardinality))
            .collect();
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok((a.values.clone(), parse_rational(&a.p)?)))
            .collect::<Result<Vec<_>, DistError>>()?;
        JointDistribution::new(vars, atoms)
    }

    /// Atoms are written sorted by value tuple, so equal distributions
    /// serialize identically.
    pub fn from_distribution(d: &JointDistribution) -> Self {
        let variables = d
            .variables()
            .iter()
            .map(|v| VariableRecord {
                name: v.name.clone(),
                cardinality: v.cardinality,
            })
            .collect();
        let mut atoms: Vec<AtomRecord> = d
            .atoms()
            .map(|(vals, p)| AtomRecord {
                values: vals.to_vec(),
                p: format!("{}/{}", p.numer(), p.denom()),
            })
            .collect();
        atoms.sort_by(|a, b| a.values.cmp(&b.values));
        DistFile { variables, atoms }
    }
}
