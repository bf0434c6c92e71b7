use super::{EndoExpr, Formula, Fragment, GadgetError};

/// A signal name together with the endomorphism and formula it carries
/// in the witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sig {
    pub name: String,
    pub endo: EndoExpr,
    pub formula: Formula,
}

impl Sig {
    /// `name` carrying `A_i − g(A_j)`.
    pub fn end(name: impl Into<String>, i: u8, j: u8, g: EndoExpr) -> Sig {
        Sig { name: name.into(), formula: Formula::end(i, j, &g), endo: g }
    }

    pub fn end12(name: impl Into<String>, g: EndoExpr) -> Sig {
        Sig::end(name, 1, 2, g)
    }
}

fn pair(a: u8, b: u8) -> String {
    format!("A{}{}", a.min(b), a.max(b))
}

fn a(i: u8) -> String {
    format!("A{i}")
}

fn base_formula(name: &str) -> Formula {
    match name {
        "A12" => Formula::sum(&[1, 2]),
        "A13" => Formula::sum(&[1, 3]),
        "A23" => Formula::sum(&[2, 3]),
        "A123" => Formula::sum(&[1, 2, 3]),
        _ => Formula::source(name[1..].parse().expect("source name")),
    }
}

impl Fragment {
    /// `A12 ← {A1,A2}`, `A13 ← {A1,A3}`, `A23 ← {A2,A3}`,
    /// `A123 ← {A12,A3}`, and the demands `A3 ← {A12,A123}`,
    /// `A2 ← {A13,A123}`, `A1 ← {A23,A123}`.
    pub fn base(&mut self) {
        self.within("base", |f| {
            for (s, acc) in [("A12", ["A1", "A2"]), ("A13", ["A1", "A3"]), ("A23", ["A2", "A3"]), ("A123", ["A12", "A3"])] {
                f.generate_named(s, &acc, base_formula(s), None);
            }
            f.demand(&["A3"], &["A12", "A123"]);
            f.demand(&["A2"], &["A13", "A123"]);
            f.demand(&["A1"], &["A23", "A123"]);
        });
        self.exports.extend(["A12", "A13", "A23", "A123"].map(String::from));
    }

    /// Demands that hold iff `x ι= target`.
    pub fn chk(&mut self, target: &str, x: &str) -> Result<(), GadgetError> {
        let demands = super::chk_demands(target, x)?;
        self.within("chk", |f| {
            for (m, acc) in &demands {
                f.demand(&[m], &[&acc[0], &acc[1]]);
            }
        });
        Ok(())
    }

    /// `end_{i,j}` on `u`: `A_i ← {A_j, U}`, `V ← {A_k, U}`,
    /// `A_i ← {A_jk, V}`, `W ← {A_k, U}`, and `X ← {A_j, W}` checked to
    /// equal `A_ik`.
    pub fn end(&mut self, (i, j): (u8, u8), u: &Sig) -> Result<(), GadgetError> {
        if !(1..=3).contains(&i) || !(1..=3).contains(&j) || i == j {
            return Err(GadgetError::IndexPair(i, j));
        }
        let k = 6 - i - j;
        let g = &u.endo;
        self.within(&format!("end{i}{j}"), |f| {
            *f.census.entry("end".into()).or_default() += 1;
            let (ai, aj, ak) = (a(i), a(j), a(k));
            f.demand(&[&ai], &[&aj, &u.name]);
            let v = f.generate("V", &[&ak, &u.name], u.formula.sub(&Formula::term(g.clone(), k)));
            f.demand(&[&ai], &[&pair(j, k), &v]);
            let wf = u.formula.add(&Formula::source(k));
            let w = f.generate("W", &[&ak, &u.name], wf.clone());
            f.derived_eq("X", &pair(i, k), &[&aj, &w], wf.add(&Formula::term(g.clone(), j)))?;
            Ok(())
        })
    }

    /// Pins an `end_{1,2}` signal `z` to the identity: `Y ← {Z, A23}`
    /// checked to equal `A13`.
    pub fn pin(&mut self, z: &Sig) -> Result<(), GadgetError> {
        self.within("pin", |f| {
            f.derived_eq("Y", "A13", &[&z.name, "A23"], z.formula.add(&base_formula("A23")))?;
            Ok(())
        })
    }

    /// `E ← {A13, A23}` with `end_{1,2}(E)`; the only consistent value is
    /// `A1 − A2`.
    pub fn id_pin(&mut self) -> Result<Sig, GadgetError> {
        self.within("id_pin", |f| {
            let formula = base_formula("A13").sub(&base_formula("A23"));
            let e = f.generate("E", &["A13", "A23"], formula.clone());
            let sig = Sig { name: e, endo: EndoExpr::Id, formula };
            f.end((1, 2), &sig)?;
            Ok(sig)
        })
    }

    /// Moves an `end_{1,2}` signal to position (1,3) through
    /// `W = A2 − A3`, `A13 ι≤ A12 W` and `V = U + g(W)`.
    pub fn conv13(&mut self, u: &Sig) -> Result<Sig, GadgetError> {
        self.within("conv13", |f| {
            let wf = Formula::end(2, 3, &EndoExpr::Id);
            let w = f.generate("W", &["A2", "A3"], wf.clone());
            let ws = Sig { name: w.clone(), endo: EndoExpr::Id, formula: wf.clone() };
            f.end((2, 3), &ws)?;
            f.derived_eq("Y", "A13", &["A12", &w], base_formula("A12").sub(&wf))?;
            let vf = u.formula.add(&wf.apply(&u.endo));
            let v = f.generate("V", &[&u.name, &w], vf.clone());
            let vs = Sig { name: v, endo: u.endo.clone(), formula: vf };
            f.end((1, 3), &vs)?;
            Ok(vs)
        })
    }

    /// Moves an `end_{1,2}` signal to position (3,2) through
    /// `W = A1 − A3`, `A12 ι≤ W A23` and `V = U − W`.
    pub fn conv32(&mut self, u: &Sig) -> Result<Sig, GadgetError> {
        self.within("conv32", |f| {
            let wf = Formula::end(1, 3, &EndoExpr::Id);
            let w = f.generate("W", &["A1", "A3"], wf.clone());
            let ws = Sig { name: w.clone(), endo: EndoExpr::Id, formula: wf.clone() };
            f.end((1, 3), &ws)?;
            f.derived_eq("Y", "A12", &[&w, "A23"], wf.add(&base_formula("A23")))?;
            let vf = u.formula.sub(&wf);
            let v = f.generate("V", &[&w, &u.name], vf.clone());
            let vs = Sig { name: v, endo: u.endo.clone(), formula: vf };
            f.end((3, 2), &vs)?;
            Ok(vs)
        })
    }

    /// `U3 = V1 + g1(V2)` from the converted inputs, carrying `g1 ∘ g2`.
    pub fn comp(&mut self, u1: &Sig, u2: &Sig) -> Result<Sig, GadgetError> {
        self.within("comp", |f| {
            let v1 = f.conv13(u1)?;
            let v2 = f.conv32(u2)?;
            let uf = v1.formula.add(&v2.formula.apply(&u1.endo));
            let u3 = f.generate("U3", &[&v1.name, &v2.name], uf.clone());
            let s = Sig { name: u3, endo: u1.endo.clone().then_after(u2.endo.clone()), formula: uf };
            f.end((1, 2), &s)?;
            Ok(s)
        })
    }

    /// `u ∘ v = id`.
    pub fn inv(&mut self, u: &Sig, v: &Sig) -> Result<(), GadgetError> {
        self.within("inv", |f| {
            let z = f.comp(u, v)?;
            f.pin(&z)
        })
    }

    /// `u` is an automorphism; the inverse candidate is generated from
    /// `{A1, A2}` and carries `h`.
    pub fn iend_with(&mut self, u: &Sig, h: EndoExpr) -> Result<(), GadgetError> {
        self.within("iend", |f| {
            let vf = Formula::end(1, 2, &h);
            let v = f.generate("V", &["A1", "A2"], vf.clone());
            let vs = Sig { name: v, endo: h, formula: vf };
            f.end((1, 2), &vs)?;
            f.inv(u, &vs)
        })
    }

    pub fn iend(&mut self, u: &Sig) -> Result<(), GadgetError> {
        self.iend_with(u, u.endo.clone().inv())
    }

    /// `u` and `v` are the same automorphism, through a common inverse
    /// `W` carrying `h`.
    pub fn ieq_with(&mut self, u: &Sig, v: &Sig, h: EndoExpr) -> Result<(), GadgetError> {
        self.within("ieq", |f| {
            let wf = Formula::end(1, 2, &h);
            let w = f.generate("W", &["A1", "A2"], wf.clone());
            let ws = Sig { name: w, endo: h, formula: wf };
            f.end((1, 2), &ws)?;
            f.inv(u, &ws)?;
            f.inv(v, &ws)
        })
    }

    pub fn ieq(&mut self, u: &Sig, v: &Sig) -> Result<(), GadgetError> {
        self.ieq_with(u, v, u.endo.clone().inv())
    }

    /// `g3 = g1 ∘ g2` for automorphisms.
    pub fn icomp(&mut self, u1: &Sig, u2: &Sig, u3: &Sig) -> Result<(), GadgetError> {
        self.within("icomp", |f| {
            let z = f.comp(u1, u2)?;
            f.ieq(&z, u3)
        })
    }
}

fn single(prefix: &str, build: impl FnOnce(&mut Fragment) -> Result<Option<Sig>, GadgetError>) -> Result<Fragment, GadgetError> {
    let mut f = Fragment::new(prefix);
    if let Some(s) = build(&mut f)? {
        f.exports.push(s.name);
    }
    Ok(f)
}

pub fn base_network() -> Fragment {
    let mut f = Fragment::new("");
    f.base();
    f
}

pub fn chk_gadget(target: &str, x: &str) -> Result<Fragment, GadgetError> {
    single("chk", |f| f.chk(target, x).map(|_| None))
}

pub fn end_gadget(ij: (u8, u8), u: &Sig) -> Result<Fragment, GadgetError> {
    single("g", |f| f.end(ij, u).map(|_| None))
}

pub fn id_pin_gadget() -> Result<Fragment, GadgetError> {
    single("g", |f| f.id_pin().map(Some))
}

pub fn conv13_gadget(u: &Sig) -> Result<Fragment, GadgetError> {
    single("g", |f| f.conv13(u).map(Some))
}

pub fn conv32_gadget(u: &Sig) -> Result<Fragment, GadgetError> {
    single("g", |f| f.conv32(u).map(Some))
}

pub fn comp_gadget(u1: &Sig, u2: &Sig) -> Result<Fragment, GadgetError> {
    single("g", |f| f.comp(u1, u2).map(Some))
}

pub fn inv_gadget(u: &Sig, v: &Sig) -> Result<Fragment, GadgetError> {
    single("g", |f| f.inv(u, v).map(|_| None))
}

pub fn iend_gadget(u: &Sig) -> Result<Fragment, GadgetError> {
    single("g", |f| f.iend(u).map(|_| None))
}

pub fn ieq_gadget(u: &Sig, v: &Sig) -> Result<Fragment, GadgetError> {
    single("g", |f| f.ieq(u, v).map(|_| None))
}

pub fn icomp_gadget(u1: &Sig, u2: &Sig, u3: &Sig) -> Result<Fragment, GadgetError> {
    single("g", |f| f.icomp(u1, u2, u3).map(|_| None))
}
