use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::AlgError;

/// Finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyGroup {
    order: usize,
    identity: u32,
    table: Vec<u32>,
    inverses: Vec<u32>,
}

/// On-disk form of a [`CayleyGroup`]: row-major `table[a*order + b] = a·b`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CayleyFile {
    pub order: usize,
    pub identity: u32,
    pub table: Vec<u32>,
}

impl CayleyGroup {
    /// Validates closure, the identity law, inverses and associativity.
    pub fn from_table(order: usize, identity: u32, table: Vec<u32>) -> Result<Self, AlgError> {
        if order == 0 {
            return Err(AlgError::Group("empty group".into()));
        }
        if table.len() != order * order {
            return Err(AlgError::Group(format!(
                "table has {} entries, expected {}",
                table.len(),
                order * order
            )));
        }
        if identity as usize >= order {
            return Err(AlgError::Group(format!("identity {identity} out of range")));
        }
        if let Some(&v) = table.iter().find(|&&v| v as usize >= order) {
            return Err(AlgError::Group(format!("entry {v} out of range")));
        }
        let at = |a: usize, b: usize| table[a * order + b] as usize;
        let e = identity as usize;
        for a in 0..order {
            if at(e, a) != a || at(a, e) != a {
                return Err(AlgError::Group(format!("identity law fails at {a}")));
            }
        }
        let mut inverses = Vec::with_capacity(order);
        for a in 0..order {
            match (0..order).find(|&b| at(a, b) == e && at(b, a) == e) {
                Some(b) => inverses.push(b as u32),
                None => return Err(AlgError::Group(format!("{a} has no inverse"))),
            }
        }
        for a in 0..order {
            for b in 0..order {
                let ab = at(a, b);
                for c in 0..order {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(AlgError::Group(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(CayleyGroup {
            order,
            identity,
            table,
            inverses,
        })
    }

    pub fn from_file(f: &CayleyFile) -> Result<Self, AlgError> {
        Self::from_table(f.order, f.identity, f.table.clone())
    }

    pub fn to_file(&self) -> CayleyFile {
        CayleyFile {
            order: self.order,
            identity: self.identity,
            table: self.table.clone(),
        }
    }

    /// Z_n with identity 0.
    pub fn cyclic(n: usize) -> Result<Self, AlgError> {
        let table = (0..n * n).map(|i| ((i / n + i % n) % n) as u32).collect();
        Self::from_table(n, 0, table)
    }

    /// `a × b`, element `(x, y)` encoded as `x·|b| + y`.
    pub fn direct_product(a: &CayleyGroup, b: &CayleyGroup) -> Self {
        let (na, nb) = (a.order, b.order);
        let n = na * nb;
        let mut table = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                let x = a.mul(u / nb, v / nb) as usize;
                let y = b.mul(u % nb, v % nb) as usize;
                table.push((x * nb + y) as u32);
            }
        }
        let identity = a.identity as usize * nb + b.identity as usize;
        Self::from_table(n, identity as u32, table).expect("product of groups is a group")
    }

    /// S_n for n ≤ 4; permutations in lexicographic order of their image
    /// lists, product `(σ·τ)(i) = σ(τ(i))`.
    pub fn symmetric(n: usize) -> Result<Self, AlgError> {
        if !(1..=4).contains(&n) {
            return Err(AlgError::Group(format!("S_{n} not supported (n must be 1..=4)")));
        }
        let perms = permutations(n);
        let pos = |p: &[usize]| perms.iter().position(|q| q == p).unwrap() as u32;
        let mut table = Vec::with_capacity(perms.len() * perms.len());
        for s in &perms {
            for t in &perms {
                let st: Vec<usize> = (0..n).map(|i| s[t[i]]).collect();
                table.push(pos(&st));
            }
        }
        Self::from_table(perms.len(), 0, table)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> u32 {
        self.table[a * self.order + b]
    }

    pub fn inverse(&self, a: usize) -> u32 {
        self.inverses[a]
    }

    pub fn check_element(&self, a: u32) -> Result<(), AlgError> {
        if (a as usize) < self.order {
            Ok(())
        } else {
            Err(AlgError::Element(format!("{a} is not an element of a group of order {}", self.order)))
        }
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity as usize {
            x = self.mul(x, a) as usize;
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Greedy generating set: scan elements in index order, keeping each
    /// one not already in the subgroup generated so far.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut inside = vec![false; self.order];
        inside[self.identity as usize] = true;
        for a in 0..self.order {
            if inside[a] {
                continue;
            }
            gens.push(a);
            inside = self.closure(&gens);
        }
        gens
    }

    fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.order];
        let mut queue = VecDeque::from([self.identity as usize]);
        inside[self.identity as usize] = true;
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g) as usize;
                if !inside[y] {
                    inside[y] = true;
                    queue.push_back(y);
                }
            }
        }
        inside
    }

    /// Extends generator images to a homomorphism `self → target`, walking
    /// the Cayley graph and checking consistency on every edge (which is
    /// sufficient for the map to be a homomorphism). Returns the full map.
    pub fn extend_hom(&self, gens: &[usize], images: &[u32], target: &CayleyGroup) -> Option<Vec<u32>> {
        let unset = u32::MAX;
        let mut map = vec![unset; self.order];
        map[self.identity as usize] = target.identity;
        let mut queue = VecDeque::from([self.identity as usize]);
        while let Some(x) = queue.pop_front() {
            for (&g, &h) in gens.iter().zip(images) {
                let y = self.mul(x, g) as usize;
                let want = target.mul(map[x] as usize, h as usize);
                if map[y] == unset {
                    map[y] = want;
                    queue.push_back(y);
                } else if map[y] != want {
                    return None;
                }
            }
        }
        map.iter().all(|&v| v != unset).then_some(map)
    }

    /// All homomorphisms `self → target`, enumerated by generator images in
    /// lexicographic order.
    pub fn homomorphisms(&self, target: &CayleyGroup, max_candidates: u128) -> Result<Vec<Vec<u32>>, AlgError> {
        let gens = self.generators();
        let candidates = (target.order as u128).checked_pow(gens.len() as u32).unwrap_or(u128::MAX);
        if candidates > max_candidates {
            return Err(AlgError::Cap(format!(
                "{candidates} generator-image candidates exceed the cap of {max_candidates}"
            )));
        }
        // Images must have order dividing the generator's order.
        let allowed: Vec<Vec<u32>> = gens
            .iter()
            .map(|&g| {
                let k = self.element_order(g);
                (0..target.order as u32)
                    .filter(|&h| k.is_multiple_of(target.element_order(h as usize)))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; gens.len()];
        loop {
            let images: Vec<u32> = idx.iter().zip(&allowed).map(|(&i, a)| a[i]).collect();
            if let Some(m) = self.extend_hom(&gens, &images, target) {
                out.push(m);
            }
            // odometer, last generator fastest
            let mut k = gens.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < allowed[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// Brute-force isomorphism search; returns the element map if one exists.
    pub fn isomorphism(&self, other: &CayleyGroup) -> Option<Vec<u32>> {
        if self.order != other.order {
            return None;
        }
        let gens = self.generators();
        let candidates: Vec<Vec<u32>> = gens
            .iter()
            .map(|&g| {
                let k = self.element_order(g);
                (0..other.order as u32)
                    .filter(|&h| other.element_order(h as usize) == k)
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; gens.len()];
        if candidates.iter().any(Vec::is_empty) {
            return None;
        }
        loop {
            let images: Vec<u32> = idx.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
            if let Some(m) = self.extend_hom(&gens, &images, other) {
                let mut seen = vec![false; other.order];
                if m.iter().all(|&v| !std::mem::replace(&mut seen[v as usize], true)) {
                    return Some(m);
                }
            }
            let mut k = gens.len();
            loop {
                if k == 0 {
                    return None;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < candidates[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

/// 1-based relation check `x_a · x_b = x_c` for every triple.
pub fn check_relations(group: &CayleyGroup, assignment: &[u32], relations: &[(usize, usize, usize)]) -> Result<bool, AlgError> {
    for &a in assignment {
        group.check_element(a)?;
    }
    let get = |i: usize| {
        if i == 0 || i > assignment.len() {
            Err(AlgError::Element(format!("variable index {i} outside 1..={}", assignment.len())))
        } else {
            Ok(assignment[i - 1] as usize)
        }
    };
    let mut ok = true;
    for &(a, b, c) in relations {
        let (xa, xb, xc) = (get(a)?, get(b)?, get(c)?);
        ok &= group.mul(xa, xb) as usize == xc;
    }
    Ok(ok)
}

/// Whether `x_1` is the identity.
pub fn goal_is_identity(group: &CayleyGroup, assignment: &[u32]) -> Result<bool, AlgError> {
    match assignment.first() {
        Some(&x) => {
            group.check_element(x)?;
            Ok(x == group.identity())
        }
        None => Err(AlgError::Element("empty assignment".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors() {
        let z6 = CayleyGroup::cyclic(6).unwrap();
        assert!(z6.is_abelian());
        assert_eq!(z6.element_order(2), 3);
        let s3 = CayleyGroup::symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        assert_eq!(CayleyGroup::symmetric(4).unwrap().order(), 24);
        let v = CayleyGroup::direct_product(&CayleyGroup::cyclic(2).unwrap(), &CayleyGroup::cyclic(2).unwrap());
        assert!((1..4).all(|a| v.element_order(a) == 2));
    }

    #[test]
    fn rejects_corrupted_tables() {
        let mut t = CayleyGroup::cyclic(4).unwrap().to_file();
        // swap two entries of one row outside the identity row/column: breaks
        // associativity while keeping a Latin-square-ish shape.
        t.table.swap(2 * 4 + 1, 2 * 4 + 2);
        assert!(CayleyGroup::from_file(&t).is_err());
        let mut t = CayleyGroup::cyclic(3).unwrap().to_file();
        t.table[0] = 1;
        assert!(CayleyGroup::from_file(&t).is_err());
    }

    #[test]
    fn associativity_only_failure() {
        // A Latin square with identity 0 and inverses that is not associative
        // (a loop of order 5).
        let table = vec![
            0, 1, 2, 3, 4, //
            1, 0, 3, 4, 2, //
            2, 4, 0, 1, 3, //
            3, 2, 4, 0, 1, //
            4, 3, 1, 2, 0,
        ];
        let err = CayleyGroup::from_table(5, 0, table).unwrap_err();
        assert!(err.to_string().contains("associativity"));
    }

    #[test]
    fn isomorphisms() {
        let z4 = CayleyGroup::cyclic(4).unwrap();
        let z2 = CayleyGroup::cyclic(2).unwrap();
        let v = CayleyGroup::direct_product(&z2, &z2);
        assert!(z4.isomorphism(&z4).is_some());
        assert!(z4.isomorphism(&v).is_none());
        let z6 = CayleyGroup::cyclic(6).unwrap();
        let z2z3 = CayleyGroup::direct_product(&z2, &CayleyGroup::cyclic(3).unwrap());
        assert!(z6.isomorphism(&z2z3).is_some());
        assert!(z6.isomorphism(&CayleyGroup::symmetric(3).unwrap()).is_none());
    }

    #[test]
    fn relations() {
        let z2 = CayleyGroup::cyclic(2).unwrap();
        assert!(check_relations(&z2, &[0, 0], &[(1, 1, 2), (2, 1, 1)]).unwrap());
        assert!(goal_is_identity(&z2, &[0, 0]).unwrap());
        assert!(check_relations(&z2, &[1, 0], &[(1, 1, 2)]).unwrap());
        assert!(!goal_is_identity(&z2, &[1, 0]).unwrap());
        assert!(check_relations(&z2, &[1, 0], &[(1, 1, 3)]).is_err());
        let s3 = CayleyGroup::symmetric(3).unwrap();
        let t = (1..6).find(|&a| s3.element_order(a) == 2).unwrap() as u32;
        assert!(check_relations(&s3, &[t, s3.identity()], &[(1, 1, 2)]).unwrap());
        assert!(!goal_is_identity(&s3, &[t, 0]).unwrap());
    }
}
