//! Explicit linear and semilinear subsets of `ℕ^k`.

use crate::error::{Error, Result};

use super::ilp::{ilp_feasible, IlpInstance, Relation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSet {
    constant: Vec<u64>,
    periods: Vec<Vec<u64>>,
}

impl LinearSet {
    pub fn new(constant: Vec<u64>, periods: Vec<Vec<u64>>) -> Result<LinearSet> {
        let k = constant.len();
        if let Some(p) = periods.iter().find(|p| p.len() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: p.len(),
            });
        }
        Ok(LinearSet { constant, periods })
    }

    pub fn dim(&self) -> usize {
        self.constant.len()
    }

    pub fn constant(&self) -> &[u64] {
        &self.constant
    }

    pub fn periods(&self) -> &[Vec<u64>] {
        &self.periods
    }

    pub fn with_period(mut self, p: Vec<u64>) -> Result<LinearSet> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        self.periods.push(p);
        Ok(self)
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let mut inst = IlpInstance::new(self.periods.len());
        for (i, (&vi, &ci)) in v.iter().zip(&self.constant).enumerate() {
            if vi < ci {
                return Ok(false);
            }
            let row = self
                .periods
                .iter()
                .enumerate()
                .filter(|(_, p)| p[i] != 0)
                .map(|(j, p)| Ok((j, i64::try_from(p[i]).map_err(|_| overflow())?)))
                .collect::<Result<Vec<_>>>()?;
            let rhs = i64::try_from(vi - ci).map_err(|_| overflow())?;
            inst.add(row, Relation::Eq, rhs)?;
        }
        ilp_feasible(&inst)
    }
}

fn overflow() -> Error {
    Error::Invalid("entry exceeds 64 bits".into())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SemilinearSet {
    components: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn new(components: Vec<LinearSet>) -> Result<SemilinearSet> {
        if let Some(first) = components.first() {
            if let Some(c) = components.iter().find(|c| c.dim() != first.dim()) {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    got: c.dim(),
                });
            }
        }
        Ok(SemilinearSet { components })
    }

    pub fn components(&self) -> &[LinearSet] {
        &self.components
    }
}

pub fn semilinear_member(s: &SemilinearSet, v: &[u64]) -> Result<bool> {
    for c in &s.components {
        if c.contains(v)? {
            return Ok(true);
        }
    }
    Ok(false)
}
