//! Integer feasibility over nonnegative variables: branch and bound on an
//! exact rational simplex, with a lattice pre-check for equality systems.
//!
//! The simplex first runs over `i128` ratios with checked arithmetic and
//! reruns over arbitrary-precision rationals if anything overflows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::stats;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, i64)>,
    pub rel: Relation,
    pub rhs: i64,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, i64)>, rel: Relation, rhs: i64) -> Self {
        Constraint { coeffs, rel, rhs }
    }

    pub fn holds(&self, x: &[i64]) -> bool {
        let lhs: i128 = self.coeffs.iter().map(|&(v, c)| c as i128 * x[v] as i128).sum();
        let rhs = self.rhs as i128;
        match self.rel {
            Relation::Eq => lhs == rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

/// Nonnegative integer variables with linear constraints.
#[derive(Clone, Debug, Default)]
pub struct IlpInstance {
    num_vars: usize,
    constraints: Vec<Constraint>,
}

impl IlpInstance {
    pub fn new(num_vars: usize) -> Self {
        IlpInstance {
            num_vars,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn add_var(&mut self) -> usize {
        self.num_vars += 1;
        self.num_vars - 1
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add(&mut self, coeffs: Vec<(usize, i64)>, rel: Relation, rhs: i64) -> Result<()> {
        self.push(Constraint::new(coeffs, rel, rhs))
    }

    pub fn push(&mut self, c: Constraint) -> Result<()> {
        if let Some(&(v, _)) = c.coeffs.iter().find(|(v, _)| *v >= self.num_vars) {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: v + 1,
            });
        }
        self.constraints.push(c);
        Ok(())
    }

    pub fn set_upper(&mut self, var: usize, bound: i64) -> Result<()> {
        self.add(vec![(var, 1)], Relation::Le, bound)
    }

    pub fn satisfied_by(&self, x: &[i64]) -> bool {
        x.len() == self.num_vars && x.iter().all(|v| *v >= 0) && self.constraints.iter().all(|c| c.holds(x))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IlpOptions {
    pub node_budget: u64,
}

impl Default for IlpOptions {
    fn default() -> Self {
        IlpOptions { node_budget: 100_000 }
    }
}

/// Verdict of a lazy check on an integral candidate.
pub enum LazyCheck {
    Accept,
    /// The candidate is rejected; search continues in each branch, where a
    /// branch is a set of constraints added together.
    Branch(Vec<Vec<Constraint>>),
}

pub fn ilp_feasible(i: &IlpInstance) -> Result<bool> {
    ilp_feasible_with(i, IlpOptions::default())
}

pub fn ilp_feasible_with(i: &IlpInstance, opts: IlpOptions) -> Result<bool> {
    Ok(ilp_solve(i, opts, &mut |_| LazyCheck::Accept)?.is_some())
}

/// Finds a nonnegative integer solution accepted by `lazy`, if any.
pub fn ilp_solve(
    i: &IlpInstance,
    opts: IlpOptions,
    lazy: &mut dyn FnMut(&[i64]) -> LazyCheck,
) -> Result<Option<Vec<i64>>> {
    let mut nodes = 0u64;
    let out = solve_inner(i, opts, lazy, &mut nodes);
    stats::record_ilp(nodes);
    out
}

fn solve_inner(
    i: &IlpInstance,
    opts: IlpOptions,
    lazy: &mut dyn FnMut(&[i64]) -> LazyCheck,
    nodes: &mut u64,
) -> Result<Option<Vec<i64>>> {
    if !lattice_feasible(i) {
        return Ok(None);
    }
    let mut stack: Vec<Vec<Constraint>> = vec![Vec::new()];
    while let Some(extra) = stack.pop() {
        if *nodes >= opts.node_budget {
            return Err(Error::BudgetExhausted {
                what: "ilp",
                limit: opts.node_budget,
            });
        }
        *nodes += 1;
        let rows: Vec<&Constraint> = i.constraints.iter().chain(extra.iter()).collect();
        let Some(x) = lp_vertex(i.num_vars, &rows)? else {
            continue;
        };
        match x.iter().position(|v| !v.is_integer()) {
            Some(v) => {
                let f = x[v].floor().to_integer();
                let f = f
                    .to_i64()
                    .ok_or_else(|| Error::Invalid("branching bound exceeds 64 bits".into()))?;
                let mut up = extra.clone();
                up.push(Constraint::new(vec![(v, 1)], Relation::Ge, f + 1));
                let mut down = extra;
                down.push(Constraint::new(vec![(v, 1)], Relation::Le, f));
                stack.push(up);
                stack.push(down);
            }
            None => {
                let xi: Vec<i64> = x
                    .iter()
                    .map(|v| v.to_integer().to_i64())
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::Invalid("solution exceeds 64 bits".into()))?;
                match lazy(&xi) {
                    LazyCheck::Accept => return Ok(Some(xi)),
                    LazyCheck::Branch(branches) => {
                        for b in branches.into_iter().rev() {
                            let mut e = extra.clone();
                            e.extend(b);
                            stack.push(e);
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Whether the equality rows admit an integer (not necessarily nonnegative)
/// solution. Column-style Hermite reduction over big integers.
pub fn lattice_feasible(i: &IlpInstance) -> bool {
    let eqs: Vec<&Constraint> = i.constraints.iter().filter(|c| c.rel == Relation::Eq).collect();
    if eqs.is_empty() {
        return true;
    }
    let n = i.num_vars;
    let mut a: Vec<Vec<BigInt>> = eqs
        .iter()
        .map(|c| {
            let mut row = vec![BigInt::zero(); n];
            for &(v, k) in &c.coeffs {
                row[v] += BigInt::from(k);
            }
            row
        })
        .collect();
    let b: Vec<BigInt> = eqs.iter().map(|c| BigInt::from(c.rhs)).collect();
    // Echelon form by unimodular column operations.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut col = 0;
    for r in 0..a.len() {
        if col >= n {
            break;
        }
        loop {
            let nz: Vec<usize> = (col..n).filter(|&c| !a[r][c].is_zero()).collect();
            if nz.len() <= 1 {
                if let Some(&c) = nz.first() {
                    swap_cols(&mut a, c, col);
                    pivots.push((r, col));
                    col += 1;
                }
                break;
            }
            let m = *nz.iter().min_by_key(|&&c| a[r][c].abs()).unwrap();
            swap_cols(&mut a, m, col);
            for c in col + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let q = a[r][c].div_floor(&a[r][col]);
                for row in a.iter_mut() {
                    let t = &q * &row[col];
                    row[c] -= t;
                }
            }
        }
    }
    // Forward substitution: y with (A U) y = b.
    let mut y: Vec<BigInt> = vec![BigInt::zero(); n];
    let mut pi = 0;
    for r in 0..a.len() {
        let acc: BigInt = (0..n).map(|c| &a[r][c] * &y[c]).sum();
        let residual = &b[r] - acc;
        if pi < pivots.len() && pivots[pi].0 == r {
            let c = pivots[pi].1;
            let (q, rem) = residual.div_rem(&a[r][c]);
            if !rem.is_zero() {
                return false;
            }
            y[c] = q;
            pi += 1;
        } else if !residual.is_zero() {
            return false;
        }
    }
    true
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }
}

trait Field: Clone {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn lt(&self, o: &Self) -> bool;
    fn to_big(&self) -> BigRational;
}

type Small = Ratio<i128>;

impl Field for Small {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        num_traits::CheckedAdd::checked_add(self, o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        num_traits::CheckedSub::checked_sub(self, o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        num_traits::CheckedMul::checked_mul(self, o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        num_traits::CheckedDiv::checked_div(self, o)
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Field for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
    fn to_big(&self) -> BigRational {
        self.clone()
    }
}

/// A vertex of `{ x ≥ 0 : rows }`, or `None` if the polyhedron is empty.
fn lp_vertex(n: usize, rows: &[&Constraint]) -> Result<Option<Vec<BigRational>>> {
    if let Some(r) = phase_one::<Small>(n, rows) {
        return Ok(r);
    }
    Ok(phase_one::<BigRational>(n, rows).expect("big rationals never overflow"))
}

/// Phase-one simplex with Bland's rule. Returns `None` on overflow.
fn phase_one<F: Field>(n: usize, rows: &[&Constraint]) -> Option<Option<Vec<BigRational>>> {
    let m = rows.len();
    if m == 0 {
        return Some(Some(vec![BigRational::zero(); n]));
    }
    // Columns: structural n, then one slack per inequality, then one
    // artificial per row that lacks a usable slack.
    let mut slack_of = vec![None; m];
    let mut ns = 0;
    for (r, c) in rows.iter().enumerate() {
        if c.rel != Relation::Eq {
            slack_of[r] = Some(n + ns);
            ns += 1;
        }
    }
    let mut art_of = vec![None; m];
    let mut sign = vec![1i64; m];
    let mut na = 0;
    for (r, c) in rows.iter().enumerate() {
        if c.rhs < 0 {
            sign[r] = -1;
        }
        // slack coefficient after sign normalization
        let slack_coef = match c.rel {
            Relation::Le => sign[r],
            Relation::Ge => -sign[r],
            Relation::Eq => 0,
        };
        if slack_coef != 1 {
            art_of[r] = Some(n + ns + na);
            na += 1;
        }
    }
    let cols = n + ns + na;
    let zero = F::from_i64(0);
    let mut t: Vec<Vec<F>> = vec![vec![zero.clone(); cols + 1]; m];
    let mut basis = vec![0usize; m];
    for (r, c) in rows.iter().enumerate() {
        for &(v, k) in &c.coeffs {
            t[r][v] = t[r][v].add(&F::from_i64(k * sign[r]))?;
        }
        if let Some(s) = slack_of[r] {
            let k = if c.rel == Relation::Le { 1 } else { -1 };
            t[r][s] = F::from_i64(k * sign[r]);
        }
        t[r][cols] = F::from_i64(c.rhs * sign[r]);
        match art_of[r] {
            Some(a) => {
                t[r][a] = F::from_i64(1);
                basis[r] = a;
            }
            None => basis[r] = slack_of[r].unwrap(),
        }
    }
    // objective: minimize sum of artificials, as reduced costs
    let mut obj = vec![zero.clone(); cols + 1];
    for r in 0..m {
        if art_of[r].is_some() {
            for j in 0..=cols {
                obj[j] = obj[j].sub(&t[r][j])?;
            }
        }
    }
    for a in art_of.iter().flatten() {
        obj[*a] = zero.clone();
    }
    loop {
        let Some(enter) = (0..cols).find(|&j| obj[j].is_neg()) else {
            break;
        };
        let mut leave: Option<(usize, F)> = None;
        for r in 0..m {
            if !t[r][enter].is_pos() {
                continue;
            }
            let ratio = t[r][cols].div(&t[r][enter])?;
            leave = match leave {
                None => Some((r, ratio)),
                Some((lr, lratio)) => {
                    if ratio.lt(&lratio) || (!lratio.lt(&ratio) && basis[r] < basis[lr]) {
                        Some((r, ratio))
                    } else {
                        Some((lr, lratio))
                    }
                }
            };
        }
        let (pr, _) = leave.expect("phase one is bounded below");
        pivot(&mut t, &mut obj, pr, enter)?;
        basis[pr] = enter;
    }
    if !obj[cols].is_zero() {
        return Some(None);
    }
    let mut x = vec![BigRational::zero(); n];
    for r in 0..m {
        if basis[r] < n {
            x[basis[r]] = t[r][cols].to_big();
        }
    }
    Some(Some(x))
}

fn pivot<F: Field>(t: &mut [Vec<F>], obj: &mut [F], pr: usize, pc: usize) -> Option<()> {
    let width = obj.len();
    let p = t[pr][pc].clone();
    for j in 0..width {
        if !t[pr][j].is_zero() {
            t[pr][j] = t[pr][j].div(&p)?;
        }
    }
    let nz: Vec<usize> = (0..width).filter(|&j| !t[pr][j].is_zero()).collect();
    let prow: Vec<F> = t[pr].clone();
    for (r, row) in t.iter_mut().enumerate() {
        if r == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for &j in &nz {
            row[j] = row[j].sub(&f.mul(&prow[j])?)?;
        }
    }
    if !obj[pc].is_zero() {
        let f = obj[pc].clone();
        for &j in &nz {
            obj[j] = obj[j].sub(&f.mul(&prow[j])?)?;
        }
    }
    Some(())
}
