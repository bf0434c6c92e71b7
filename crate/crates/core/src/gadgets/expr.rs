use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::GadgetError;
use crate::finalg::{AbelianGroup, Endo, Field, FieldMatrix};

/// Symbolic endomorphism built from the word-problem variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EndoExpr {
    Id,
    /// The endomorphism assigned to variable `x_j` (1-based).
    Var(usize),
    /// The completion map carried on the narrow edge.
    Completion,
    Neg(Box<EndoExpr>),
    Inv(Box<EndoExpr>),
    /// `Comp(a, b)` is `a ∘ b`.
    Comp(Box<EndoExpr>, Box<EndoExpr>),
}

impl EndoExpr {
    pub fn var(j: usize) -> EndoExpr {
        EndoExpr::Var(j)
    }

    pub fn neg(self) -> EndoExpr {
        match self {
            EndoExpr::Neg(x) => *x,
            x => EndoExpr::Neg(Box::new(x)),
        }
    }

    pub fn inv(self) -> EndoExpr {
        match self {
            EndoExpr::Id => EndoExpr::Id,
            EndoExpr::Inv(x) => *x,
            x => EndoExpr::Inv(Box::new(x)),
        }
    }

    pub fn then_after(self, inner: EndoExpr) -> EndoExpr {
        match (self, inner) {
            (EndoExpr::Id, x) | (x, EndoExpr::Id) => x,
            (a, b) => EndoExpr::Comp(Box::new(a), Box::new(b)),
        }
    }

    pub fn eval<E: EndoEnv>(&self, env: &E) -> Result<E::Map, GadgetError> {
        Ok(match self {
            EndoExpr::Id => env.identity(),
            EndoExpr::Var(j) => env.var(*j)?,
            EndoExpr::Completion => env.completion()?,
            EndoExpr::Neg(x) => env.neg(&x.eval(env)?),
            EndoExpr::Inv(x) => env.inv(&x.eval(env)?)?,
            EndoExpr::Comp(a, b) => env.comp(&a.eval(env)?, &b.eval(env)?)?,
        })
    }
}

impl fmt::Display for EndoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndoExpr::Id => write!(f, "id"),
            EndoExpr::Var(j) => write!(f, "g{j}"),
            EndoExpr::Completion => write!(f, "t"),
            EndoExpr::Neg(x) => write!(f, "-{x}"),
            EndoExpr::Inv(x) => write!(f, "{x}⁻¹"),
            EndoExpr::Comp(a, b) => write!(f, "({a}∘{b})"),
        }
    }
}

/// Interpretation of [`EndoExpr`] leaves and operations.
pub trait EndoEnv {
    type Map: Clone;
    fn identity(&self) -> Self::Map;
    fn var(&self, j: usize) -> Result<Self::Map, GadgetError>;
    fn completion(&self) -> Result<Self::Map, GadgetError>;
    fn neg(&self, m: &Self::Map) -> Self::Map;
    fn inv(&self, m: &Self::Map) -> Result<Self::Map, GadgetError>;
    fn comp(&self, a: &Self::Map, b: &Self::Map) -> Result<Self::Map, GadgetError>;
}

/// One summand `map(A_source)` with `source ∈ {1, 2, 3}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub map: EndoExpr,
    pub source: u8,
}

/// A signal written as a sum of endomorphic images of `A1, A2, A3`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Formula(pub Vec<Term>);

impl Formula {
    pub fn source(i: u8) -> Formula {
        Formula::term(EndoExpr::Id, i)
    }

    pub fn term(map: EndoExpr, source: u8) -> Formula {
        Formula(vec![Term { map, source }])
    }

    /// Sum of the listed sources.
    pub fn sum(sources: &[u8]) -> Formula {
        Formula(sources.iter().map(|&s| Term { map: EndoExpr::Id, source: s }).collect())
    }

    /// `A_i − g(A_j)`.
    pub fn end(i: u8, j: u8, g: &EndoExpr) -> Formula {
        Formula::source(i).sub(&Formula::term(g.clone(), j))
    }

    pub fn add(&self, other: &Formula) -> Formula {
        Formula(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn neg(&self) -> Formula {
        Formula(
            self.0
                .iter()
                .map(|t| Term { map: t.map.clone().neg(), source: t.source })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Formula) -> Formula {
        self.add(&other.neg())
    }

    /// `g ∘ self`.
    pub fn apply(&self, g: &EndoExpr) -> Formula {
        Formula(
            self.0
                .iter()
                .map(|t| Term { map: g.clone().then_after(t.map.clone()), source: t.source })
                .collect(),
        )
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            match &t.map {
                EndoExpr::Id => write!(f, "A{}", t.source)?,
                m => write!(f, "{m}(A{})", t.source)?,
            }
        }
        Ok(())
    }
}

/// Endomorphisms as square matrices over a field acting on one message
/// block; the completion map may be rectangular.
#[derive(Clone, Debug)]
pub struct MatrixEnv {
    pub field: Field,
    pub dim: usize,
    /// `vars[j - 1]` interprets `Var(j)`.
    pub vars: Vec<FieldMatrix>,
    pub completion: Option<FieldMatrix>,
}

impl EndoEnv for MatrixEnv {
    type Map = FieldMatrix;

    fn identity(&self) -> FieldMatrix {
        FieldMatrix::identity(&self.field, self.dim)
    }

    fn var(&self, j: usize) -> Result<FieldMatrix, GadgetError> {
        j.checked_sub(1)
            .and_then(|i| self.vars.get(i))
            .cloned()
            .ok_or_else(|| GadgetError::Env(format!("no matrix for variable x{j}")))
    }

    fn completion(&self) -> Result<FieldMatrix, GadgetError> {
        self.completion.clone().ok_or_else(|| GadgetError::Env("no completion map".into()))
    }

    fn neg(&self, m: &FieldMatrix) -> FieldMatrix {
        m.neg()
    }

    fn inv(&self, m: &FieldMatrix) -> Result<FieldMatrix, GadgetError> {
        m.inverse().ok_or_else(|| GadgetError::Env("matrix is not invertible".into()))
    }

    fn comp(&self, a: &FieldMatrix, b: &FieldMatrix) -> Result<FieldMatrix, GadgetError> {
        Ok(a.mul(b)?)
    }
}

impl MatrixEnv {
    /// Global matrix of a formula over the source vector `(A1, A2, A3)`.
    pub fn formula_matrix(&self, f: &Formula) -> Result<FieldMatrix, GadgetError> {
        let mut blocks: [Option<FieldMatrix>; 3] = [None, None, None];
        for t in &f.0 {
            let s = usize::from(t.source)
                .checked_sub(1)
                .filter(|&s| s < 3)
                .ok_or_else(|| GadgetError::Env(format!("source index {}", t.source)))?;
            let m = t.map.eval(self)?;
            blocks[s] = Some(match blocks[s].take() {
                None => m,
                Some(acc) => acc.add(&m)?,
            });
        }
        let rows = blocks
            .iter()
            .flatten()
            .map(FieldMatrix::rows)
            .next()
            .unwrap_or(self.dim);
        let mut out = FieldMatrix::zeros(&self.field, rows, 3 * self.dim);
        for (s, b) in blocks.iter().enumerate() {
            if let Some(b) = b {
                if b.rows() != rows {
                    return Err(GadgetError::Env(format!("formula `{f}` mixes maps of different heights")));
                }
                out.set_column_block(s * self.dim, b);
            }
        }
        Ok(out)
    }
}

/// Endomorphisms of an abelian group, for distribution-level checks.
#[derive(Clone, Debug)]
pub struct GroupEnv {
    pub group: Arc<AbelianGroup>,
    pub vars: Vec<Endo>,
}

impl EndoEnv for GroupEnv {
    type Map = Endo;

    fn identity(&self) -> Endo {
        Endo::identity(&self.group)
    }

    fn var(&self, j: usize) -> Result<Endo, GadgetError> {
        j.checked_sub(1)
            .and_then(|i| self.vars.get(i))
            .cloned()
            .ok_or_else(|| GadgetError::Env(format!("no endomorphism for variable x{j}")))
    }

    fn completion(&self) -> Result<Endo, GadgetError> {
        Err(GadgetError::Env("the completion map has no group form".into()))
    }

    fn neg(&self, m: &Endo) -> Endo {
        m.neg()
    }

    fn inv(&self, m: &Endo) -> Result<Endo, GadgetError> {
        m.inverse().ok_or_else(|| GadgetError::Env("endomorphism is not invertible".into()))
    }

    fn comp(&self, a: &Endo, b: &Endo) -> Result<Endo, GadgetError> {
        Ok(a.compose(b)?)
    }
}

impl GroupEnv {
    /// Value table over `(x1, x2, x3)`, index `x1·n² + x2·n + x3`.
    pub fn formula_table(&self, f: &Formula) -> Result<Vec<u32>, GadgetError> {
        let g = &self.group;
        let mut per_source: [Endo; 3] = [Endo::zero(g), Endo::zero(g), Endo::zero(g)];
        for t in &f.0 {
            let s = usize::from(t.source)
                .checked_sub(1)
                .filter(|&s| s < 3)
                .ok_or_else(|| GadgetError::Env(format!("source index {}", t.source)))?;
            per_source[s] = per_source[s].add(&t.map.eval(self)?)?;
        }
        let n = g.order() as u32;
        let mut out = Vec::with_capacity((n * n * n) as usize);
        for x1 in 0..n {
            for x2 in 0..n {
                for x3 in 0..n {
                    let a = g.add(per_source[0].apply(x1), per_source[1].apply(x2));
                    out.push(g.add(a, per_source[2].apply(x3)));
                }
            }
        }
        Ok(out)
    }
}

/// Matrix of an endomorphism of an elementary abelian `p`-group over
/// `GF(p)`, in the coordinates of [`AbelianGroup::coords`]; column `c` is
/// the image of the `c`-th unit vector.
pub fn endo_matrix(g: &Endo, field: &Field) -> Result<FieldMatrix, GadgetError> {
    let grp = g.group();
    let p = field.characteristic();
    let elementary = field.degree() == 1
        && grp.factors().is_some_and(|f| f.iter().all(|&x| x == p));
    if !elementary {
        return Err(GadgetError::Env(format!("group is not elementary abelian over {field}")));
    }
    let dim = grp.factors().map_or(0, <[u32]>::len);
    let coords: Vec<Vec<u32>> = grp.elements().map(|a| grp.coords(a).expect("factored group")).collect();
    let mut m = FieldMatrix::zeros(field, dim, dim);
    for c in 0..dim {
        let unit = coords
            .iter()
            .position(|v| v.iter().enumerate().all(|(k, &x)| x == u32::from(k == c)))
            .expect("unit vector present") as u32;
        let img = grp.coords(g.apply(unit)).expect("factored group");
        for (r, &x) in img.iter().enumerate() {
            m.set(r, c, x);
        }
    }
    Ok(m)
}

/// Inverse of [`AbelianGroup::coords`] for elementary abelian groups.
pub fn element_of(grp: &AbelianGroup, v: &[u32]) -> Option<u32> {
    grp.elements().find(|&a| grp.coords(a).as_deref() == Some(v))
}
