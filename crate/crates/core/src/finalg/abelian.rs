use std::fmt;
use std::sync::Arc;

use super::{AlgError, CayleyGroup};

/// Default bound on `|G|` for endomorphism enumeration.
pub const ENDO_ORDER_CAP: usize = 64;
/// Bound on generator-image candidates tried during enumeration.
const ENDO_CANDIDATE_CAP: u128 = 1 << 24;

/// Finite abelian group written additively, with `0` the identity element.
///
/// Built either from invariant factors (elements are mixed-radix tuples,
/// first factor most significant) or from any commutative Cayley table whose
/// identity is element 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    cayley: CayleyGroup,
    factors: Option<Vec<u32>>,
}

impl AbelianGroup {
    pub fn from_factors(factors: &[u32]) -> Result<Self, AlgError> {
        if factors.iter().any(|&n| n < 2) {
            return Err(AlgError::Group("invariant factors must be at least 2".into()));
        }
        let mut g = CayleyGroup::cyclic(1)?;
        for &n in factors {
            g = CayleyGroup::direct_product(&g, &CayleyGroup::cyclic(n as usize)?);
        }
        Ok(AbelianGroup {
            cayley: g,
            factors: Some(factors.to_vec()),
        })
    }

    pub fn cyclic(n: u32) -> Result<Self, AlgError> {
        Self::from_factors(&[n])
    }

    pub fn from_cayley(g: CayleyGroup) -> Result<Self, AlgError> {
        if !g.is_abelian() {
            return Err(AlgError::Group("group is not abelian".into()));
        }
        if g.identity() != 0 {
            return Err(AlgError::Group("additive groups must use element 0 as identity".into()));
        }
        Ok(AbelianGroup { cayley: g, factors: None })
    }

    /// Validates an addition table with identity 0.
    pub fn from_table(order: usize, table: Vec<u32>) -> Result<Self, AlgError> {
        Self::from_cayley(CayleyGroup::from_table(order, 0, table)?)
    }

    pub fn order(&self) -> usize {
        self.cayley.order()
    }

    pub fn factors(&self) -> Option<&[u32]> {
        self.factors.as_deref()
    }

    pub fn cayley(&self) -> &CayleyGroup {
        &self.cayley
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.cayley.mul(a as usize, b as usize)
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.cayley.inverse(a as usize)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// `k·a` for an integer `k` (negative allowed).
    pub fn times(&self, k: i64, a: u32) -> u32 {
        let n = self.cayley.element_order(a as usize) as i64;
        (0..k.rem_euclid(n)).fold(0, |acc, _| self.add(acc, a))
    }

    /// Tuple form of an element when built from invariant factors.
    pub fn coords(&self, a: u32) -> Option<Vec<u32>> {
        let f = self.factors.as_ref()?;
        let mut out = vec![0; f.len()];
        let mut rem = a;
        for (i, &n) in f.iter().enumerate().rev() {
            out[i] = rem % n;
            rem /= n;
        }
        Some(out)
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order() as u32
    }

    /// Every element has order dividing 2.
    pub fn has_exponent_two(&self) -> bool {
        self.elements().all(|a| self.add(a, a) == 0)
    }

    pub fn isomorphic_to(&self, other: &AbelianGroup) -> bool {
        self.cayley.isomorphism(&other.cayley).is_some()
    }
}

/// Endomorphism of an [`AbelianGroup`], stored as a full function table.
#[derive(Clone)]
pub struct Endo {
    group: Arc<AbelianGroup>,
    table: Vec<u32>,
}

impl PartialEq for Endo {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && (Arc::ptr_eq(&self.group, &other.group) || self.group == other.group)
    }
}
impl Eq for Endo {}

impl fmt::Debug for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Endo{:?}", self.table)
    }
}

impl Endo {
    /// Validates `g(a+b) = g(a)+g(b)` for all pairs.
    pub fn from_table(group: &Arc<AbelianGroup>, table: Vec<u32>) -> Result<Endo, AlgError> {
        let n = group.order();
        if table.len() != n || table.iter().any(|&v| v as usize >= n) {
            return Err(AlgError::Group("endomorphism table has the wrong shape".into()));
        }
        for a in group.elements() {
            for b in group.elements() {
                let lhs = table[group.add(a, b) as usize];
                let rhs = group.add(table[a as usize], table[b as usize]);
                if lhs != rhs {
                    return Err(AlgError::NotAdditive { a, b });
                }
            }
        }
        Ok(Endo {
            group: group.clone(),
            table,
        })
    }

    pub fn identity(group: &Arc<AbelianGroup>) -> Endo {
        Endo {
            group: group.clone(),
            table: group.elements().collect(),
        }
    }

    pub fn zero(group: &Arc<AbelianGroup>) -> Endo {
        Endo {
            group: group.clone(),
            table: vec![0; group.order()],
        }
    }

    /// Multiplication by an integer.
    pub fn scalar(group: &Arc<AbelianGroup>, k: i64) -> Endo {
        Endo {
            group: group.clone(),
            table: group.elements().map(|a| group.times(k, a)).collect(),
        }
    }

    pub fn group(&self) -> &Arc<AbelianGroup> {
        &self.group
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn apply(&self, a: u32) -> u32 {
        self.table[a as usize]
    }

    fn same_group(&self, other: &Endo) -> Result<(), AlgError> {
        if Arc::ptr_eq(&self.group, &other.group) || self.group == other.group {
            Ok(())
        } else {
            Err(AlgError::GroupMismatch)
        }
    }

    /// `(self ∘ other)(a) = self(other(a))`.
    pub fn compose(&self, other: &Endo) -> Result<Endo, AlgError> {
        self.same_group(other)?;
        Ok(Endo {
            group: self.group.clone(),
            table: other.table.iter().map(|&x| self.apply(x)).collect(),
        })
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Endo) -> Result<Endo, AlgError> {
        self.same_group(other)?;
        Ok(Endo {
            group: self.group.clone(),
            table: self.table.iter().zip(&other.table).map(|(&a, &b)| self.group.add(a, b)).collect(),
        })
    }

    pub fn neg(&self) -> Endo {
        Endo {
            group: self.group.clone(),
            table: self.table.iter().map(|&a| self.group.neg(a)).collect(),
        }
    }

    pub fn is_automorphism(&self) -> bool {
        let mut seen = vec![false; self.table.len()];
        self.table.iter().all(|&v| !std::mem::replace(&mut seen[v as usize], true))
    }

    pub fn inverse(&self) -> Option<Endo> {
        if !self.is_automorphism() {
            return None;
        }
        let mut inv = vec![0; self.table.len()];
        for (a, &b) in self.table.iter().enumerate() {
            inv[b as usize] = a as u32;
        }
        Some(Endo {
            group: self.group.clone(),
            table: inv,
        })
    }
}

/// All endomorphisms, lexicographic by the images of the greedy generating
/// set.
pub fn enumerate_endos(group: &Arc<AbelianGroup>) -> Result<Vec<Endo>, AlgError> {
    enumerate_endos_capped(group, ENDO_ORDER_CAP)
}

pub fn enumerate_endos_capped(group: &Arc<AbelianGroup>, cap: usize) -> Result<Vec<Endo>, AlgError> {
    if group.order() > cap {
        return Err(AlgError::Cap(format!(
            "group of order {} exceeds the enumeration cap {cap}",
            group.order()
        )));
    }
    let g = group.cayley();
    Ok(g
        .homomorphisms(g, ENDO_CANDIDATE_CAP)?
        .into_iter()
        .map(|table| Endo {
            group: group.clone(),
            table,
        })
        .collect())
}

/// All additive self-maps found by testing every function table; only
/// feasible for tiny groups and used to cross-check [`enumerate_endos`].
pub fn brute_force_endos(group: &Arc<AbelianGroup>) -> Vec<Endo> {
    let n = group.order();
    assert!(n <= 5, "brute force over n^n tables is limited to n <= 5");
    let total = n.pow(n as u32);
    (0..total)
        .filter_map(|mut code| {
            let mut table = vec![0u32; n];
            for slot in table.iter_mut().rev() {
                *slot = (code % n) as u32;
                code /= n;
            }
            Endo::from_table(group, table).ok()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(f: &[u32]) -> Arc<AbelianGroup> {
        Arc::new(AbelianGroup::from_factors(f).unwrap())
    }

    #[test]
    fn endo_counts() {
        assert_eq!(enumerate_endos(&grp(&[2])).unwrap().len(), 2);
        let v = grp(&[2, 2]);
        let e = enumerate_endos(&v).unwrap();
        assert_eq!(e.len(), 16);
        assert_eq!(e.iter().filter(|g| g.is_automorphism()).count(), 6);
        let mut brute: Vec<Vec<u32>> = brute_force_endos(&v).iter().map(|g| g.table().to_vec()).collect();
        let mut gen: Vec<Vec<u32>> = e.iter().map(|g| g.table().to_vec()).collect();
        brute.sort();
        gen.sort();
        assert_eq!(brute, gen);
        let z4 = grp(&[4]);
        let e4 = enumerate_endos(&z4).unwrap();
        assert_eq!(e4.len(), 4);
        for (k, g) in e4.iter().enumerate() {
            assert_eq!(*g, Endo::scalar(&z4, k as i64));
        }
        assert_eq!(enumerate_endos(&grp(&[6])).unwrap().len(), 6);
        assert_eq!(enumerate_endos(&grp(&[2, 4])).unwrap().len(), 32);
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(enumerate_endos(&grp(&[5, 13])), Err(AlgError::Cap(_))));
    }

    #[test]
    fn composition_facts() {
        let z4 = grp(&[4]);
        let two = Endo::scalar(&z4, 2);
        assert_eq!(two.compose(&two).unwrap(), Endo::zero(&z4));
        let id = Endo::identity(&z4);
        assert_eq!(id.compose(&two).unwrap(), two);
        assert!(matches!(two.compose(&Endo::identity(&grp(&[2]))), Err(AlgError::GroupMismatch)));
        // Z2×Z2 with element code 2·x + y: shear (x,y) ↦ (x, x+y) and swap.
        let v = grp(&[2, 2]);
        let enc = |x: u32, y: u32| 2 * x + y;
        let shear = Endo::from_table(&v, (0..4).map(|a| enc(a / 2, (a / 2 + a % 2) % 2)).collect()).unwrap();
        let swap = Endo::from_table(&v, (0..4).map(|a| enc(a % 2, a / 2)).collect()).unwrap();
        let r = shear.compose(&swap).unwrap();
        assert!(r.is_automorphism());
        let r2 = r.compose(&r).unwrap();
        assert_ne!(r2, Endo::identity(&v));
        assert_eq!(r2.compose(&r).unwrap(), Endo::identity(&v));
    }

    #[test]
    fn closed_under_composition() {
        for f in [&[2u32, 2][..], &[4], &[2, 4], &[3]] {
            let g = grp(f);
            let all = enumerate_endos(&g).unwrap();
            assert!(all.contains(&Endo::identity(&g)));
            for a in &all {
                for b in &all {
                    let ab = a.compose(b).unwrap();
                    assert!(all.contains(&ab));
                    for c in all.iter().take(6) {
                        assert_eq!(ab.compose(c).unwrap(), a.compose(&b.compose(c).unwrap()).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn non_additive_rejected() {
        let z3 = grp(&[3]);
        assert!(matches!(Endo::from_table(&z3, vec![0, 2, 2]), Err(AlgError::NotAdditive { .. })));
        assert!(Endo::from_table(&z3, vec![1, 2, 0]).is_err());
    }
}
