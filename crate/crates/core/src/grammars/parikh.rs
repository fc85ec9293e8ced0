//! Parikh-image membership for context-free grammars as integer feasibility.
//!
//! Variables count production uses. Flow balance says each nonterminal is
//! expanded as often as it is produced (the start once more). Balance alone
//! admits disconnected cycles, so connectivity is enforced lazily: when an
//! integral candidate uses productions of a set `U` unreachable from the
//! start, the search splits into "nothing from `U` is used" and "some used
//! production enters `U` from outside".

use crate::error::{Error, Result};

use super::cfg::{Cfg, Symbol};
use super::ilp::{ilp_solve, Constraint, IlpInstance, IlpOptions, LazyCheck, Relation};

/// ILP skeleton for the Parikh image of a grammar. Callers add constraints on
/// the terminal-count expressions, then call [`ParikhEncoding::solve`].
pub struct ParikhEncoding {
    grammar: Cfg,
    pub instance: IlpInstance,
    /// Per terminal, the linear expression counting its occurrences.
    pub terminal_counts: Vec<Vec<(usize, i64)>>,
    empty: bool,
}

impl ParikhEncoding {
    pub fn new(g: &Cfg) -> ParikhEncoding {
        let k = g.terminals().len();
        let empty = super::cfg::cfg_empty(g);
        let grammar = if empty { g.clone() } else { g.trim() };
        let np = grammar.productions().len();
        let nn = grammar.nonterminals().len();
        let mut instance = IlpInstance::new(np);
        let mut terminal_counts = vec![Vec::new(); k];
        if !empty {
            let mut flow: Vec<Vec<(usize, i64)>> = vec![Vec::new(); nn];
            for (pi, (a, rhs)) in grammar.productions().iter().enumerate() {
                let mut net = vec![0i64; nn];
                let mut cnt = vec![0i64; k];
                net[*a] += 1;
                for s in rhs {
                    match *s {
                        Symbol::N(b) => net[b] -= 1,
                        Symbol::T(l) => cnt[l.index()] += 1,
                    }
                }
                for (b, c) in net.into_iter().enumerate() {
                    if c != 0 {
                        flow[b].push((pi, c));
                    }
                }
                for (t, c) in cnt.into_iter().enumerate() {
                    if c != 0 {
                        terminal_counts[t].push((pi, c));
                    }
                }
            }
            for (b, row) in flow.into_iter().enumerate() {
                let rhs = i64::from(b == grammar.start());
                instance
                    .add(row, Relation::Eq, rhs)
                    .expect("flow rows use declared variables");
            }
        }
        ParikhEncoding {
            grammar,
            instance,
            terminal_counts,
            empty,
        }
    }

    pub fn grammar(&self) -> &Cfg {
        &self.grammar
    }

    /// Whether some derivation satisfies the instance; returns production counts.
    pub fn solve(&self, opts: IlpOptions) -> Result<Option<Vec<i64>>> {
        if self.empty {
            return Ok(None);
        }
        let g = &self.grammar;
        let np = g.productions().len();
        let nn = g.nonterminals().len();
        let mut lazy = |x: &[i64]| -> LazyCheck {
            let mut reach = vec![false; nn];
            reach[g.start()] = true;
            let mut stack = vec![g.start()];
            while let Some(a) = stack.pop() {
                for (pi, (h, rhs)) in g.productions().iter().enumerate() {
                    if *h != a || x[pi] == 0 {
                        continue;
                    }
                    for s in rhs {
                        if let Symbol::N(b) = *s {
                            if !reach[b] {
                                reach[b] = true;
                                stack.push(b);
                            }
                        }
                    }
                }
            }
            let mut in_u = vec![false; nn];
            let mut any = false;
            for (pi, (h, _)) in g.productions().iter().enumerate() {
                if x[pi] > 0 && !reach[*h] {
                    in_u[*h] = true;
                    any = true;
                }
            }
            if !any {
                return LazyCheck::Accept;
            }
            let inside: Vec<(usize, i64)> = (0..np)
                .filter(|&pi| in_u[g.productions()[pi].0])
                .map(|pi| (pi, 1))
                .collect();
            let entering: Vec<(usize, i64)> = (0..np)
                .filter(|&pi| {
                    let (h, rhs) = &g.productions()[pi];
                    !in_u[*h] && rhs.iter().any(|s| matches!(s, Symbol::N(b) if in_u[*b]))
                })
                .map(|pi| (pi, 1))
                .collect();
            let mut branches = vec![vec![Constraint::new(inside, Relation::Eq, 0)]];
            if !entering.is_empty() {
                branches.push(vec![Constraint::new(entering, Relation::Ge, 1)]);
            }
            LazyCheck::Branch(branches)
        };
        ilp_solve(&self.instance, opts, &mut lazy)
    }
}

/// Whether some word of `L(g)` has letter counts `target`.
pub fn parikh_member(g: &Cfg, target: &[u64]) -> Result<bool> {
    parikh_member_with(g, target, IlpOptions::default())
}

pub fn parikh_member_with(g: &Cfg, target: &[u64], opts: IlpOptions) -> Result<bool> {
    let k = g.terminals().len();
    if target.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: target.len(),
        });
    }
    let mut enc = ParikhEncoding::new(g);
    for (t, &v) in target.iter().enumerate() {
        let v = i64::try_from(v).map_err(|_| Error::Invalid("target entry exceeds 64 bits".into()))?;
        let row = enc.terminal_counts[t].clone();
        enc.instance.add(row, Relation::Eq, v)?;
    }
    Ok(enc.solve(opts)?.is_some())
}
