use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{Code, NetError, Network};
use crate::exactprob::{JointDistribution, Variable};
use crate::finalg::{Field, FieldMatrix};
use crate::predicates::PredicateReport;

/// A linear code over a finite field.
///
/// The full source vector is the concatenation of the message blocks in
/// network order; message `i` occupies `message_dims[i]` coordinates and
/// every edge carries `M·x` for its matrix `M`. With base alphabet `q`, a
/// message of exponent `m` needs `|F|^dim = q^m`, and an edge of exponent
/// `m` may have at most as many rows as fit in `q^m` values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    pub field: Field,
    pub q: u64,
    pub message_dims: BTreeMap<String, usize>,
    pub edges: BTreeMap<String, FieldMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearCodeFile {
    pub field: String,
    pub q: u64,
    pub message_dims: BTreeMap<String, usize>,
    pub edges: BTreeMap<String, Vec<Vec<u32>>>,
}

/// Rank accounting at a node whose demand fails, in field dimensions and
/// in base-alphabet units (`rank · log_q |F|`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeRankDiagnosis {
    pub node: String,
    pub available_rank: usize,
    pub demanded_rank: usize,
    pub combined_rank: usize,
    /// `(numerator, denominator)` of the available information in units of
    /// `log q`, when `q` and `|F|` are powers of the same prime.
    pub available_units: Option<(usize, usize)>,
    pub demanded_units: u32,
}

impl NodeRankDiagnosis {
    pub fn render(&self) -> String {
        let units = match self.available_units {
            Some((n, 1)) => format!("{n}"),
            Some((n, d)) => format!("{n}/{d}"),
            None => "?".into(),
        };
        format!(
            "node `{}`: available span has rank {} but the demand needs {} more (combined rank {}); {} of {} alphabet units available",
            self.node,
            self.available_rank,
            self.combined_rank - self.available_rank,
            self.combined_rank,
            units,
            self.demanded_units
        )
    }
}

fn big_pow(b: u64, e: u64) -> BigUint {
    BigUint::from(b).pow(e as u32)
}

impl LinearCode {
    pub fn offsets(&self, net: &Network) -> Result<Vec<usize>, NetError> {
        let mut off = Vec::with_capacity(net.messages.len() + 1);
        let mut acc = 0;
        for m in &net.messages {
            off.push(acc);
            acc += self
                .message_dims
                .get(&m.name)
                .ok_or_else(|| NetError::Dimension(format!("no block dimension for message `{}`", m.name)))?;
        }
        off.push(acc);
        Ok(off)
    }

    /// Largest row count an edge of exponent `m` may carry.
    pub fn capacity(&self, exponent: u8) -> usize {
        let limit = big_pow(self.q, exponent as u64);
        let f = self.field.size() as u64;
        let mut r = 0;
        while big_pow(f, r as u64 + 1) <= limit {
            r += 1;
        }
        r
    }

    pub fn check_dimensions(&self, net: &Network) -> Result<(), NetError> {
        let f = self.field.size() as u64;
        for m in &net.messages {
            let d = *self
                .message_dims
                .get(&m.name)
                .ok_or_else(|| NetError::Dimension(format!("no block dimension for message `{}`", m.name)))?;
            if big_pow(f, d as u64) != big_pow(self.q, m.exponent as u64) {
                return Err(NetError::Dimension(format!(
                    "message `{}`: |F|^{d} ≠ q^{} with |F| = {f}, q = {}",
                    m.name, m.exponent, self.q
                )));
            }
        }
        let total = *self.offsets(net)?.last().unwrap();
        for e in &net.edges {
            let mat = self.edges.get(&e.id).ok_or_else(|| NetError::MissingTable(e.id.clone()))?;
            if mat.field() != &self.field {
                return Err(NetError::Dimension(format!("edge `{}` uses {}", e.id, mat.field())));
            }
            if mat.cols() != total {
                return Err(NetError::Dimension(format!(
                    "edge `{}` matrix has {} columns, source vector has {total}",
                    e.id,
                    mat.cols()
                )));
            }
            let cap = self.capacity(e.exponent);
            if mat.rows() > cap {
                return Err(NetError::Dimension(format!(
                    "edge `{}` has {} rows, capacity at exponent {} is {cap}",
                    e.id,
                    mat.rows(),
                    e.exponent
                )));
            }
        }
        if let Some(extra) = self.edges.keys().find(|k| net.edge(k).is_none()) {
            return Err(NetError::UnknownEdge(extra.clone()));
        }
        Ok(())
    }

    fn block(&self, offsets: &[usize], m: usize) -> FieldMatrix {
        let total = *offsets.last().unwrap();
        let d = offsets[m + 1] - offsets[m];
        let mut b = FieldMatrix::zeros(&self.field, d, total);
        for i in 0..d {
            b.set(i, offsets[m] + i, 1);
        }
        b
    }

    /// Rows a node can compute from: its message blocks and in-edge
    /// matrices.
    fn available(&self, net: &Network, l: &super::Layout, offsets: &[usize], v: usize) -> FieldMatrix {
        let total = *offsets.last().unwrap();
        let mut acc = FieldMatrix::zeros(&self.field, 0, total);
        for &m in &l.node_has[v] {
            acc = acc.vstack(&self.block(offsets, m)).unwrap();
        }
        for &e in &l.node_in[v] {
            acc = acc.vstack(&self.edges[&net.edges[e].id]).unwrap();
        }
        acc
    }

    /// Builds global edge matrices from local ones: the local matrix of an
    /// edge acts on the tail's inputs (message blocks, then in-edge rows,
    /// in layout order).
    pub fn from_local(
        net: &Network,
        field: &Field,
        q: u64,
        message_dims: BTreeMap<String, usize>,
        local: &BTreeMap<String, FieldMatrix>,
    ) -> Result<LinearCode, NetError> {
        let l = net.layout()?;
        let mut code = LinearCode {
            field: field.clone(),
            q,
            message_dims,
            edges: BTreeMap::new(),
        };
        let offsets = code.offsets(net)?;
        for &e in &l.edge_order {
            let id = &net.edges[e].id;
            let v = l.node_index[&net.edges[e].tail];
            let avail = code.available(net, &l, &offsets, v);
            let x = local.get(id).ok_or_else(|| NetError::MissingTable(id.clone()))?;
            let global = x.mul(&avail)?;
            code.edges.insert(id.clone(), global);
        }
        code.check_dimensions(net)?;
        Ok(code)
    }

    /// Equivalent table code, when `q = |F|^d` for an integer `d` and each
    /// edge is computable at its tail. Vectors are encoded with the first
    /// coordinate least significant.
    pub fn to_code(&self, net: &Network) -> Result<Code, NetError> {
        self.check_dimensions(net)?;
        let l = net.layout()?;
        let offsets = self.offsets(net)?;
        let f = self.field.size() as u64;
        let mut tables = BTreeMap::new();
        for edge in &net.edges {
            let v = l.node_index[&edge.tail];
            let avail = self.available(net, &l, &offsets, v);
            let m = &self.edges[&edge.id];
            let x = avail.left_solve(m)?.ok_or_else(|| {
                NetError::Mismatch(format!("edge `{}` is not computable from its tail's inputs", edge.id))
            })?;
            let dims: Vec<usize> = l.node_has[v]
                .iter()
                .map(|&m| offsets[m + 1] - offsets[m])
                .chain(l.node_in[v].iter().map(|&g| self.edges[&net.edges[g].id].rows()))
                .collect();
            let radix: Vec<u64> = l.node_has[v]
                .iter()
                .map(|&m| self.q.pow(net.messages[m].exponent as u32))
                .chain(l.node_in[v].iter().map(|&g| self.q.pow(net.edges[g].exponent as u32)))
                .collect();
            let size: u64 = radix.iter().product();
            if size > 1 << 24 {
                return Err(NetError::TooLarge(format!("table for `{}` has {size} entries", edge.id)));
            }
            let mut table = Vec::with_capacity(size as usize);
            for idx in 0..size {
                let mut rem = idx;
                let mut parts = vec![0u64; radix.len()];
                for k in (0..radix.len()).rev() {
                    parts[k] = rem % radix[k];
                    rem /= radix[k];
                }
                let mut input = Vec::with_capacity(x.cols());
                for (&val, &d) in parts.iter().zip(&dims) {
                    input.extend(decode(val, d, f));
                }
                table.push(encode(&x.apply(&input), f));
            }
            tables.insert(edge.id.clone(), table);
        }
        Ok(Code { q: self.q, tables })
    }

    pub fn to_file(&self) -> LinearCodeFile {
        LinearCodeFile {
            field: self.field.to_string(),
            q: self.q,
            message_dims: self.message_dims.clone(),
            edges: self.edges.iter().map(|(k, m)| (k.clone(), m.to_rows())).collect(),
        }
    }

    pub fn from_file(f: &LinearCodeFile) -> Result<LinearCode, NetError> {
        let field: Field = f.field.parse()?;
        let width: usize = f.message_dims.values().sum();
        let edges = f
            .edges
            .iter()
            .map(|(k, rows)| Ok((k.clone(), FieldMatrix::from_rows_with_cols(&field, width, rows)?)))
            .collect::<Result<_, NetError>>()?;
        Ok(LinearCode {
            field,
            q: f.q,
            message_dims: f.message_dims.clone(),
            edges,
        })
    }
}

pub(crate) fn decode(mut v: u64, d: usize, f: u64) -> Vec<u32> {
    (0..d)
        .map(|_| {
            let x = (v % f) as u32;
            v /= f;
            x
        })
        .collect()
}

pub(crate) fn encode(x: &[u32], f: u64) -> u64 {
    x.iter().rev().fold(0u64, |acc, &c| acc * f + c as u64)
}

/// `log_q |F|` as a reduced fraction when both are powers of one prime.
fn units_per_dim(q: u64, field: &Field) -> Option<(usize, usize)> {
    let p = field.characteristic() as u64;
    let mut k = 0;
    let mut x = q;
    while x > 1 && x.is_multiple_of(p) {
        x /= p;
        k += 1;
    }
    (x == 1 && k > 0).then(|| {
        let deg = field.degree() as usize;
        let g = num_integer::gcd(deg, k);
        (deg / g, k / g)
    })
}

/// The coding constraint by row spaces: at every node each out-edge matrix
/// and each demanded message block must lie in the span of the node's
/// message blocks and in-edge matrices.
pub fn verify_linear(net: &Network, code: &LinearCode) -> Result<(PredicateReport, Option<NodeRankDiagnosis>), NetError> {
    code.check_dimensions(net)?;
    let l = net.layout()?;
    let offsets = code.offsets(net)?;
    for &v in &l.node_order {
        let node = &net.nodes[v];
        let avail = code.available(net, &l, &offsets, v);
        for &e in &l.node_out[v] {
            let id = &net.edges[e].id;
            if !avail.rowspace_contains(&code.edges[id])? {
                return Ok((
                    PredicateReport::fail(
                        "coding constraint",
                        format!("node `{}`: out-edge `{id}` is not a function of the node's inputs", node.id),
                    ),
                    None,
                ));
            }
        }
        if l.node_demands[v].is_empty() {
            continue;
        }
        let total = *offsets.last().unwrap();
        let mut demanded = FieldMatrix::zeros(&code.field, 0, total);
        for &m in &l.node_demands[v] {
            demanded = demanded.vstack(&code.block(&offsets, m))?;
        }
        if !avail.rowspace_contains(&demanded)? {
            let available_rank = avail.rank();
            let combined_rank = avail.vstack(&demanded)?.rank();
            let diag = NodeRankDiagnosis {
                node: node.id.clone(),
                available_rank,
                demanded_rank: demanded.rows(),
                combined_rank,
                available_units: units_per_dim(code.q, &code.field).map(|(n, d)| {
                    let (n, d) = (available_rank * n, d);
                    let g = num_integer::gcd(n, d).max(1);
                    (n / g, d / g)
                }),
                demanded_units: l.node_demands[v].iter().map(|&m| net.messages[m].exponent as u32).sum(),
            };
            let names: Vec<&str> = node.demands.iter().map(String::as_str).collect();
            return Ok((
                PredicateReport::fail(
                    "coding constraint",
                    format!("demand ({}) not decodable: {}", names.join(" "), diag.render()),
                ),
                Some(diag),
            ));
        }
    }
    Ok((PredicateReport::pass("coding constraint"), None))
}

/// Exact evaluation of a linear code on every source tuple, feeding the
/// distribution-level checks.
///
/// Sources are the messages, each uniform over `|F|^dim` values; the
/// atom index is mixed radix with the first message most significant and a
/// vector is encoded with its first coordinate least significant.
pub struct LinearEval {
    field: Field,
    offsets: Vec<usize>,
    cards: Vec<u32>,
    names: Vec<String>,
    atoms: usize,
    /// Decoded vector of every value of every message.
    decoded: Vec<Vec<Vec<u32>>>,
}

impl LinearEval {
    pub fn new(net: &Network, code: &LinearCode, atom_cap: u128) -> Result<LinearEval, NetError> {
        let offsets = code.offsets(net)?;
        let f = code.field.size() as u64;
        let mut cards = Vec::new();
        let mut atoms: u128 = 1;
        for (i, _) in net.messages.iter().enumerate() {
            let d = offsets[i + 1] - offsets[i];
            let c = f
                .checked_pow(d as u32)
                .and_then(|c| u32::try_from(c).ok())
                .ok_or_else(|| NetError::TooLarge(format!("message block of dimension {d}")))?;
            cards.push(c);
            atoms = atoms.saturating_mul(c as u128);
        }
        if atoms > atom_cap {
            return Err(NetError::TooLarge(format!("{atoms} atoms exceed the cap of {atom_cap}")));
        }
        let decoded = cards
            .iter()
            .enumerate()
            .map(|(i, &c)| (0..c as u64).map(|v| decode(v, offsets[i + 1] - offsets[i], f)).collect())
            .collect();
        Ok(LinearEval {
            field: code.field.clone(),
            offsets,
            cards,
            names: net.messages.iter().map(|m| m.name.clone()).collect(),
            atoms: atoms as usize,
            decoded,
        })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn source_vars(&self) -> Vec<Variable> {
        self.names.iter().zip(&self.cards).map(|(n, &c)| Variable::new(n.clone(), c)).collect()
    }

    /// Cardinality of the variable `M·x`.
    pub fn cardinality(&self, m: &FieldMatrix) -> Result<u32, NetError> {
        (self.field.size() as u64)
            .checked_pow(m.rows() as u32)
            .and_then(|c| u32::try_from(c).ok())
            .ok_or_else(|| NetError::TooLarge(format!("{} rows over {}", m.rows(), self.field)))
    }

    /// Value of `M·x` on every atom.
    pub fn column(&self, m: &FieldMatrix) -> Vec<u32> {
        let f = &self.field;
        let fs = f.size() as u64;
        let k = self.cards.len();
        // Contribution of each message block, per message value.
        let partial: Vec<Vec<Vec<u32>>> = (0..k)
            .map(|i| {
                let blk = m.column_block(self.offsets[i], self.offsets[i + 1] - self.offsets[i]);
                self.decoded[i].iter().map(|x| blk.apply(x)).collect()
            })
            .collect();
        let mut out = Vec::with_capacity(self.atoms);
        let mut digits = vec![0usize; k];
        let mut acc = vec![0u32; m.rows()];
        for _ in 0..self.atoms {
            acc.iter_mut().for_each(|a| *a = 0);
            for i in 0..k {
                for (a, &b) in acc.iter_mut().zip(&partial[i][digits[i]]) {
                    *a = f.add(*a, b);
                }
            }
            out.push(encode(&acc, fs) as u32);
            for i in (0..k).rev() {
                digits[i] += 1;
                if digits[i] < self.cards[i] as usize {
                    break;
                }
                digits[i] = 0;
            }
        }
        out
    }

    /// Joint distribution of the messages together with `M·x` for each
    /// named matrix.
    pub fn joint(&self, named: &[(&str, &FieldMatrix)]) -> Result<JointDistribution, NetError> {
        let mut vars = self.source_vars();
        let k = self.cards.len();
        let cols: Vec<Vec<u32>> = named.iter().map(|(_, m)| self.column(m)).collect();
        for (n, m) in named {
            vars.push(Variable::new(*n, self.cardinality(m)?));
        }
        let width = k + named.len();
        let mut values = Vec::with_capacity(self.atoms * width);
        let mut digits = vec![0u32; k];
        for a in 0..self.atoms {
            values.extend_from_slice(&digits);
            values.extend(cols.iter().map(|c| c[a]));
            for i in (0..k).rev() {
                digits[i] += 1;
                if digits[i] < self.cards[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
        Ok(JointDistribution::uniform_distinct(vars, values)?)
    }
}

/// Distribution-level coding constraint for a linear code: every node is
/// checked with exact functional dependence on the joint distribution of
/// its inputs and outputs. Nodes with identical matrices are checked once.
pub fn verify_linear_distribution(net: &Network, code: &LinearCode, atom_cap: u128) -> Result<PredicateReport, NetError> {
    code.check_dimensions(net)?;
    let ev = LinearEval::new(net, code, atom_cap)?;
    let l = net.layout()?;
    let mut seen: HashMap<(Vec<Vec<u32>>, Vec<Vec<u32>>, Vec<usize>, Vec<usize>), bool> = HashMap::new();
    for &v in &l.node_order {
        let node = &net.nodes[v];
        let ins: Vec<&str> = l.node_in[v].iter().map(|&e| net.edges[e].id.as_str()).collect();
        let outs: Vec<&str> = l.node_out[v].iter().map(|&e| net.edges[e].id.as_str()).collect();
        if outs.is_empty() && node.demands.is_empty() {
            continue;
        }
        let sig = (
            ins.iter().flat_map(|e| code.edges[*e].to_rows()).collect::<Vec<_>>(),
            outs.iter().flat_map(|e| code.edges[*e].to_rows()).collect::<Vec<_>>(),
            l.node_has[v].clone(),
            l.node_demands[v].clone(),
        );
        if let Some(&ok) = seen.get(&sig) {
            if ok {
                continue;
            }
        }
        let named: Vec<(String, &FieldMatrix)> = ins
            .iter()
            .map(|e| (format!("in:{e}"), &code.edges[*e]))
            .chain(outs.iter().map(|e| (format!("out:{e}"), &code.edges[*e])))
            .collect();
        let refs: Vec<(&str, &FieldMatrix)> = named.iter().map(|(n, m)| (n.as_str(), *m)).collect();
        let d = ev.joint(&refs)?;
        let x: Vec<&str> = node
            .has
            .iter()
            .map(String::as_str)
            .chain(named[..ins.len()].iter().map(|(n, _)| n.as_str()))
            .collect();
        let y: Vec<&str> = node
            .demands
            .iter()
            .map(String::as_str)
            .chain(named[ins.len()..].iter().map(|(n, _)| n.as_str()))
            .collect();
        let ok = if x.is_empty() {
            // nothing to compute from: outputs and demands must be constant
            d.support_size(&y)? == 1
        } else {
            d.is_function_of(&y, &x)?
        };
        seen.insert(sig, ok);
        if !ok {
            return Ok(PredicateReport::fail(
                "coding constraint (distribution)",
                format!("node `{}`: ({}) is not a function of ({})", node.id, y.join(" "), x.join(" ")),
            ));
        }
    }
    Ok(PredicateReport::pass("coding constraint (distribution)"))
}
