use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{checked_pow, Layout, NetError, Network};
use crate::exactprob::{DerivedVar, JointDistribution};

/// Largest number of source tuples a code is evaluated over.
pub const TUPLE_CAP: usize = 1 << 24;

/// A scalar code: one function table per edge.
///
/// The table of an edge is indexed by the tail node's domain (see
/// [`Layout`]) and holds values below `q^m` for the edge's exponent `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Code {
    pub q: u64,
    pub tables: BTreeMap<String, Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodeReport {
    pub valid: bool,
    pub failing_node: Option<String>,
}

/// Evaluates codes of a fixed network at a fixed alphabet size over every
/// source tuple.
pub struct Evaluator<'a> {
    pub(crate) net: &'a Network,
    pub(crate) layout: Layout,
    pub(crate) q: u64,
    pub(crate) msg_alpha: Vec<u64>,
    pub(crate) edge_alpha: Vec<u64>,
    pub(crate) edge_domain: Vec<Option<u64>>,
    tuples: usize,
    msg_cols: Vec<Vec<u64>>,
}

fn alpha(q: u64, m: u8) -> Result<u64, NetError> {
    checked_pow(q, m as u32).ok_or_else(|| NetError::TooLarge(format!("{q}^{m} overflows")))
}

impl<'a> Evaluator<'a> {
    pub fn new(net: &'a Network, q: u64) -> Result<Self, NetError> {
        if q < 2 {
            return Err(NetError::Alphabet(q));
        }
        let layout = net.layout()?;
        let msg_alpha = net.messages.iter().map(|m| alpha(q, m.exponent)).collect::<Result<Vec<_>, _>>()?;
        let edge_alpha = net.edges.iter().map(|e| alpha(q, e.exponent)).collect::<Result<Vec<_>, _>>()?;
        let mut tuples: usize = 1;
        for &a in &msg_alpha {
            tuples = tuples
                .checked_mul(a as usize)
                .filter(|&t| t <= TUPLE_CAP)
                .ok_or_else(|| NetError::TooLarge(format!("more than {TUPLE_CAP} source tuples")))?;
        }
        let mut msg_cols = vec![Vec::with_capacity(tuples); msg_alpha.len()];
        for t in 0..tuples {
            let mut rem = t as u64;
            for i in (0..msg_alpha.len()).rev() {
                msg_cols[i].push(rem % msg_alpha[i]);
                rem /= msg_alpha[i];
            }
        }
        let edge_domain = net
            .edges
            .iter()
            .map(|e| {
                let v = layout.node_index[&e.tail];
                let mut d: u64 = 1;
                for &m in &layout.node_has[v] {
                    d = d.checked_mul(msg_alpha[m])?;
                }
                for &f in &layout.node_in[v] {
                    d = d.checked_mul(edge_alpha[f])?;
                }
                Some(d)
            })
            .collect();
        Ok(Evaluator {
            net,
            layout,
            q,
            msg_alpha,
            edge_alpha,
            edge_domain,
            tuples,
            msg_cols,
        })
    }

    pub fn tuples(&self) -> usize {
        self.tuples
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Domain size of edge `e`'s table, if it fits in 64 bits.
    pub fn domain_size(&self, e: usize) -> Option<u64> {
        self.edge_domain[e]
    }

    pub fn alphabet(&self, e: usize) -> u64 {
        self.edge_alpha[e]
    }

    /// Table slices indexed by edge position, checking sizes and values.
    pub fn tables<'c>(&self, code: &'c Code) -> Result<Vec<&'c [u64]>, NetError> {
        if code.q != self.q {
            return Err(NetError::Mismatch(format!("code has q = {}, evaluator q = {}", code.q, self.q)));
        }
        if let Some(extra) = code.tables.keys().find(|k| !self.layout.edge_index.contains_key(*k)) {
            return Err(NetError::UnknownEdge(extra.clone()));
        }
        self.net
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let t = code.tables.get(&e.id).ok_or_else(|| NetError::MissingTable(e.id.clone()))?;
                let expected = self.edge_domain[i].ok_or_else(|| NetError::TooLarge(format!("domain of `{}`", e.id)))?;
                if t.len() as u64 != expected {
                    return Err(NetError::TableSize {
                        edge: e.id.clone(),
                        got: t.len(),
                        expected: expected as usize,
                    });
                }
                if let Some(&v) = t.iter().find(|&&v| v >= self.edge_alpha[i]) {
                    return Err(NetError::TableValue {
                        edge: e.id.clone(),
                        value: v,
                        alphabet: self.edge_alpha[i],
                    });
                }
                Ok(t.as_slice())
            })
            .collect()
    }

    /// Signal of every edge on every source tuple.
    pub fn signals(&self, tables: &[&[u64]]) -> Vec<Vec<u64>> {
        let mut cols = vec![Vec::new(); self.net.edges.len()];
        self.fill_signals(tables, &mut cols);
        cols
    }

    pub(crate) fn fill_signals(&self, tables: &[&[u64]], cols: &mut [Vec<u64>]) {
        for &e in &self.layout.edge_order {
            let v = self.layout.node_index[&self.net.edges[e].tail];
            let mut col = std::mem::take(&mut cols[e]);
            col.clear();
            for t in 0..self.tuples {
                let mut idx = 0u64;
                for &m in &self.layout.node_has[v] {
                    idx = idx * self.msg_alpha[m] + self.msg_cols[m][t];
                }
                for &f in &self.layout.node_in[v] {
                    idx = idx * self.edge_alpha[f] + cols[f][t];
                }
                col.push(tables[e][idx as usize]);
            }
            cols[e] = col;
        }
    }

    /// First node (in topological order) whose demands are not a function
    /// of its accessible messages and incoming signals.
    pub(crate) fn failing_node(&self, cols: &[Vec<u64>], scratch: &mut HashMap<u128, u128>) -> Option<usize> {
        self.layout
            .node_order
            .iter()
            .copied()
            .find(|&v| !self.layout.node_demands[v].is_empty() && !self.node_decodes(v, cols, scratch))
    }

    fn node_decodes(&self, v: usize, cols: &[Vec<u64>], scratch: &mut HashMap<u128, u128>) -> bool {
        let l = &self.layout;
        let key_parts: Vec<(&[u64], u64)> = l.node_has[v]
            .iter()
            .map(|&m| (self.msg_cols[m].as_slice(), self.msg_alpha[m]))
            .chain(l.node_in[v].iter().map(|&f| (cols[f].as_slice(), self.edge_alpha[f])))
            .collect();
        let val_parts: Vec<(&[u64], u64)> =
            l.node_demands[v].iter().map(|&m| (self.msg_cols[m].as_slice(), self.msg_alpha[m])).collect();
        functional(self.tuples, &key_parts, &val_parts, scratch)
    }

    pub fn check(&self, code: &Code) -> Result<CodeReport, NetError> {
        let tables = self.tables(code)?;
        let cols = self.signals(&tables);
        let bad = self.failing_node(&cols, &mut HashMap::new());
        Ok(CodeReport {
            valid: bad.is_none(),
            failing_node: bad.map(|v| self.net.nodes[v].id.clone()),
        })
    }
}

fn radix_product(parts: &[(&[u64], u64)]) -> Option<u128> {
    parts.iter().try_fold(1u128, |acc, &(_, r)| acc.checked_mul(r as u128))
}

/// Whether the value columns are a function of the key columns over all
/// `n` rows.
pub(crate) fn functional(
    n: usize,
    key: &[(&[u64], u64)],
    val: &[(&[u64], u64)],
    scratch: &mut HashMap<u128, u128>,
) -> bool {
    let (Some(_), Some(_)) = (radix_product(key), radix_product(val)) else {
        let mut seen: HashMap<Vec<u64>, Vec<u64>> = HashMap::new();
        return (0..n).all(|t| {
            let k: Vec<u64> = key.iter().map(|(c, _)| c[t]).collect();
            let y: Vec<u64> = val.iter().map(|(c, _)| c[t]).collect();
            seen.entry(k).or_insert_with(|| y.clone()) == &y
        });
    };
    let pack = |parts: &[(&[u64], u64)], t: usize| parts.iter().fold(0u128, |acc, &(c, r)| acc * r as u128 + c[t] as u128);
    scratch.clear();
    (0..n).all(|t| {
        let y = pack(val, t);
        *scratch.entry(pack(key, t)).or_insert(y) == y
    })
}

/// The coding constraint: every node's demands are a function of what it
/// can see. Out-edge signals are functions by construction.
pub fn eval_code(net: &Network, code: &Code) -> Result<bool, NetError> {
    Ok(Evaluator::new(net, code.q)?.check(code)?.valid)
}

/// Messages i.i.d. uniform on `q^m` values and one derived variable per
/// edge, named by edge id.
pub fn to_joint_dist(net: &Network, code: &Code) -> Result<JointDistribution, NetError> {
    let ev = Evaluator::new(net, code.q)?;
    let tables = ev.tables(code)?;
    let cols = ev.signals(&tables);
    let to_u32 = |x: u64| u32::try_from(x).map_err(|_| NetError::TooLarge(format!("alphabet {x} exceeds u32")));
    let sources: Vec<(&str, u32)> = net
        .messages
        .iter()
        .zip(&ev.msg_alpha)
        .map(|(m, &a)| Ok((m.name.as_str(), to_u32(a)?)))
        .collect::<Result<_, NetError>>()?;
    let derived = net
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            Ok(DerivedVar {
                name: e.id.clone(),
                cardinality: to_u32(ev.edge_alpha[i])?,
                table: cols[i].iter().map(|&x| x as u32).collect(),
            })
        })
        .collect::<Result<Vec<_>, NetError>>()?;
    Ok(JointDistribution::uniform_functional(&sources, derived)?)
}

/// Runs two codes side by side: a value over `(q1·q2)^m` is the pair
/// `(v1, v2)` encoded as `v1·q2^m + v2`.
pub fn product_code(net: &Network, c1: &Code, c2: &Code) -> Result<Code, NetError> {
    let e1 = Evaluator::new(net, c1.q)?;
    let e2 = Evaluator::new(net, c2.q)?;
    let q = c1.q.checked_mul(c2.q).ok_or_else(|| NetError::TooLarge("q1·q2 overflows".into()))?;
    let ep = Evaluator::new(net, q)?;
    let (t1, t2) = (e1.tables(c1)?, e2.tables(c2)?);
    let l = &ep.layout;
    let mut tables = BTreeMap::new();
    for (e, edge) in net.edges.iter().enumerate() {
        let v = l.node_index[&edge.tail];
        let radices: Vec<(u64, u64, u64)> = l.node_has[v]
            .iter()
            .map(|&m| (ep.msg_alpha[m], e1.msg_alpha[m], e2.msg_alpha[m]))
            .chain(l.node_in[v].iter().map(|&f| (ep.edge_alpha[f], e1.edge_alpha[f], e2.edge_alpha[f])))
            .collect();
        let size = ep.edge_domain[e].ok_or_else(|| NetError::TooLarge(format!("domain of `{}`", edge.id)))?;
        if size as usize > TUPLE_CAP {
            return Err(NetError::TooLarge(format!("product table for `{}` has {size} entries", edge.id)));
        }
        let mut table = Vec::with_capacity(size as usize);
        for idx in 0..size {
            let mut rem = idx;
            let mut digits = vec![0u64; radices.len()];
            for (k, &(rp, _, _)) in radices.iter().enumerate().rev() {
                digits[k] = rem % rp;
                rem /= rp;
            }
            let (mut i1, mut i2) = (0u64, 0u64);
            for (&d, &(_, r1, r2)) in digits.iter().zip(&radices) {
                i1 = i1 * r1 + d / r2;
                i2 = i2 * r2 + d % r2;
            }
            let y1 = t1[e][i1 as usize];
            let y2 = t2[e][i2 as usize];
            table.push(y1 * e2.edge_alpha[e] + y2);
        }
        tables.insert(edge.id.clone(), table);
    }
    Ok(Code { q, tables })
}
