use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::code::Evaluator;
use super::{Code, NetError, Network};

/// Default refusal threshold in cost units (candidate codes × per-candidate
/// evaluation work).
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub budget: u128,
    /// Run the cut-counting and reachability check before searching.
    pub precheck: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            budget: DEFAULT_BUDGET,
            precheck: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum SolveOutcome {
    Solvable { code: Code },
    /// No code exists at this `q`. `reason` is set when a necessary
    /// condition failed before any search.
    UnsolvableAtQ { q: u64, reason: Option<String> },
    BudgetExceeded { estimate: Option<u128>, budget: u128 },
}

/// Necessary conditions that hold at every alphabet size: each demanded
/// message the node lacks must be held by some ancestor, and the node's
/// in-edges must have at least as much total exponent as the demanded
/// messages it lacks.
pub fn counting_precheck(net: &Network) -> Result<Option<String>, NetError> {
    let l = net.layout()?;
    let n = net.nodes.len();
    let mut avail: Vec<Vec<bool>> = vec![vec![false; net.messages.len()]; n];
    for &v in &l.node_order {
        for &m in &l.node_has[v] {
            avail[v][m] = true;
        }
        for &e in &l.node_in[v] {
            let t = l.node_index[&net.edges[e].tail];
            for m in 0..net.messages.len() {
                if avail[t][m] {
                    avail[v][m] = true;
                }
            }
        }
    }
    for &v in &l.node_order {
        let node = &net.nodes[v];
        let missing: Vec<usize> = l.node_demands[v].iter().copied().filter(|m| !l.node_has[v].contains(m)).collect();
        if let Some(&m) = missing.iter().find(|&&m| !avail[v][m]) {
            return Ok(Some(format!(
                "node `{}` demands `{}` but no upstream node holds it",
                node.id, net.messages[m].name
            )));
        }
        let need: u32 = missing.iter().map(|&m| net.messages[m].exponent as u32).sum();
        let have: u32 = l.node_in[v].iter().map(|&e| net.edges[e].exponent as u32).sum();
        if need > have {
            return Ok(Some(format!(
                "node `{}` lacks demanded messages of total exponent {need} but receives only {have}",
                node.id
            )));
        }
    }
    Ok(None)
}

fn estimate(ev: &Evaluator, net: &Network) -> Option<u128> {
    let mut candidates: u128 = 1;
    for e in 0..net.edges.len() {
        let d = ev.domain_size(e)?;
        let per = (ev.alphabet(e) as u128).checked_pow(u32::try_from(d).ok()?)?;
        candidates = candidates.checked_mul(per)?;
    }
    let per_candidate = (ev.tuples() as u128) * (net.edges.len() as u128 + net.nodes.len() as u128).max(1);
    candidates.checked_mul(per_candidate)
}

/// Exhaustive search over all codes at alphabet size `q`.
///
/// Edges are enumerated in layout order (topological, then declaration)
/// and each table in lexicographic order, first entry most significant.
/// The search space is split by the first edge's table; the lowest
/// successful split wins, so the result is deterministic.
pub fn brute_force_solve(net: &Network, q: u64, opts: SolveOptions) -> Result<SolveOutcome, NetError> {
    if opts.precheck {
        if let Some(reason) = counting_precheck(net)? {
            return Ok(SolveOutcome::UnsolvableAtQ { q, reason: Some(reason) });
        }
    }
    let ev = Evaluator::new(net, q)?;
    let cost = estimate(&ev, net);
    match cost {
        Some(c) if c <= opts.budget => {}
        _ => {
            return Ok(SolveOutcome::BudgetExceeded {
                estimate: cost,
                budget: opts.budget,
            })
        }
    }
    let order = ev.layout().edge_order.clone();
    let sizes: Vec<usize> = (0..net.edges.len()).map(|e| ev.domain_size(e).unwrap() as usize).collect();
    let alpha: Vec<u64> = (0..net.edges.len()).map(|e| ev.alphabet(e)).collect();

    let search = |first: Option<u128>| -> Option<Vec<Vec<u64>>> {
        let mut tables: Vec<Vec<u64>> = sizes.iter().map(|&s| vec![0; s]).collect();
        let rest: &[usize] = match first {
            Some(idx) => {
                let e = order[0];
                let mut rem = idx;
                for slot in tables[e].iter_mut().rev() {
                    *slot = (rem % alpha[e] as u128) as u64;
                    rem /= alpha[e] as u128;
                }
                &order[1..]
            }
            None => &order[..],
        };
        let mut cols = vec![Vec::new(); net.edges.len()];
        let mut scratch = HashMap::new();
        loop {
            let views: Vec<&[u64]> = tables.iter().map(|t| t.as_slice()).collect();
            ev.fill_signals(&views, &mut cols);
            if ev.failing_node(&cols, &mut scratch).is_none() {
                return Some(tables);
            }
            // odometer over the remaining edges, last entry fastest
            let mut carried = true;
            'outer: for &e in rest.iter().rev() {
                for slot in tables[e].iter_mut().rev() {
                    *slot += 1;
                    if *slot < alpha[e] {
                        carried = false;
                        break 'outer;
                    }
                    *slot = 0;
                }
            }
            if carried {
                return None;
            }
        }
    };

    let found = match order.first() {
        Some(&e0) => {
            let count = (alpha[e0] as u128).pow(sizes[e0] as u32);
            (0..count).into_par_iter().find_map_first(|i| search(Some(i)))
        }
        None => search(None),
    };
    Ok(match found {
        Some(tables) => SolveOutcome::Solvable {
            code: Code {
                q,
                tables: net.edges.iter().zip(tables).map(|(e, t)| (e.id.clone(), t)).collect::<BTreeMap<_, _>>(),
            },
        },
        None => SolveOutcome::UnsolvableAtQ { q, reason: None },
    })
}

/// Searches `q = c, c², …, c^max_m` in turn and stops at the first
/// solvable size or budget refusal. A run that finds nothing says nothing
/// about larger exponents.
pub fn sweep_powers(net: &Network, c: u64, max_m: u32, opts: SolveOptions) -> Result<Vec<SolveOutcome>, NetError> {
    let mut out = Vec::new();
    for m in 1..=max_m {
        let q = c
            .checked_pow(m)
            .ok_or_else(|| NetError::TooLarge(format!("{c}^{m} overflows")))?;
        let r = brute_force_solve(net, q, opts)?;
        let stop = !matches!(r, SolveOutcome::UnsolvableAtQ { reason: None, .. });
        out.push(r);
        if stop {
            break;
        }
    }
    Ok(out)
}
