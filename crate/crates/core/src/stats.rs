//! Process-wide counters surfaced by diagnostics. Counting is best effort
//! and has no effect on answers.

use std::sync::atomic::{AtomicU64, Ordering};

static ORACLE_CALLS: AtomicU64 = AtomicU64::new(0);
static SATURATIONS: AtomicU64 = AtomicU64::new(0);
static SATURATION_ROUNDS: AtomicU64 = AtomicU64::new(0);
static EDGES_ADDED: AtomicU64 = AtomicU64::new(0);
static ILP_SOLVES: AtomicU64 = AtomicU64::new(0);
static ILP_NODES: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub oracle_calls: u64,
    pub saturations: u64,
    pub saturation_rounds: u64,
    pub edges_added: u64,
    pub ilp_solves: u64,
    pub ilp_nodes: u64,
}

pub fn snapshot() -> Counters {
    Counters {
        oracle_calls: ORACLE_CALLS.load(Ordering::Relaxed),
        saturations: SATURATIONS.load(Ordering::Relaxed),
        saturation_rounds: SATURATION_ROUNDS.load(Ordering::Relaxed),
        edges_added: EDGES_ADDED.load(Ordering::Relaxed),
        ilp_solves: ILP_SOLVES.load(Ordering::Relaxed),
        ilp_nodes: ILP_NODES.load(Ordering::Relaxed),
    }
}

pub(crate) fn record_saturation(rounds: u64, edges: u64, calls: u64) {
    SATURATIONS.fetch_add(1, Ordering::Relaxed);
    SATURATION_ROUNDS.fetch_add(rounds, Ordering::Relaxed);
    EDGES_ADDED.fetch_add(edges, Ordering::Relaxed);
    ORACLE_CALLS.fetch_add(calls, Ordering::Relaxed);
}

pub(crate) fn record_ilp(nodes: u64) {
    ILP_SOLVES.fetch_add(1, Ordering::Relaxed);
    ILP_NODES.fetch_add(nodes, Ordering::Relaxed);
}
