use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::OneTimeTable;

/// A bit split as `share_a ⊕ share_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DistributedBit {
    pub share_a: bool,
    pub share_b: bool,
}

impl DistributedBit {
    pub fn new(share_a: bool, share_b: bool) -> Self {
        Self { share_a, share_b }
    }

    pub fn value(self) -> bool {
        self.share_a ^ self.share_b
    }
}

impl std::ops::BitXor for DistributedBit {
    type Output = Self;
    fn bitxor(self, rhs: Self) -> Self {
        Self::new(self.share_a ^ rhs.share_a, self.share_b ^ rhs.share_b)
    }
}

/// One nonlocal AND: the two announced messages and the output shares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AndRecord {
    pub table: u64,
    /// `a ⊕ x`, sent by Alice.
    pub a_msg: bool,
    /// `b ⊕ y`, sent by Bob.
    pub b_msg: bool,
    pub out: DistributedBit,
}

/// Evaluates `a·b` with distributed output on one table. Does not track
/// consumption; see [`SpentLedger`] and [`TablePool`].
pub fn and_with_table(a: bool, b: bool, t: &OneTimeTable) -> AndRecord {
    let a_msg = a ^ t.x;
    let b_msg = b ^ t.y;
    AndRecord {
        table: t.id,
        a_msg,
        b_msg,
        out: DistributedBit::new((t.x & b_msg) ^ t.e, (a_msg & b) ^ t.f),
    }
}

/// Ids of consumed tables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpentLedger {
    spent: BTreeSet<u64>,
}

impl SpentLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn spend(&mut self, id: u64) -> Result<()> {
        if self.spent.insert(id) {
            Ok(())
        } else {
            Err(Error::TableReuse(id))
        }
    }

    pub fn is_spent(&self, id: u64) -> bool {
        self.spent.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.spent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spent.is_empty()
    }
}

/// Nonlocal AND on an explicitly chosen table, recorded in `ledger`.
pub fn nonlocal_and(a: bool, b: bool, table: &OneTimeTable, ledger: &mut SpentLedger) -> Result<AndRecord> {
    ledger.spend(table.id)?;
    Ok(and_with_table(a, b, table))
}

/// Tables handed out in increasing id order, each at most once. Both parties
/// can derive the same allocation from the ids alone.
#[derive(Debug, Clone)]
pub struct TablePool {
    fresh: VecDeque<OneTimeTable>,
    ledger: SpentLedger,
}

impl TablePool {
    pub fn new(mut tables: Vec<OneTimeTable>) -> Result<Self> {
        tables.sort_by_key(|t| t.id);
        if let Some(w) = tables.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::TableReuse(w[0].id));
        }
        Ok(Self {
            fresh: tables.into(),
            ledger: SpentLedger::new(),
        })
    }

    pub fn remaining(&self) -> usize {
        self.fresh.len()
    }

    pub fn ledger(&self) -> &SpentLedger {
        &self.ledger
    }

    pub fn require(&self, needed: usize) -> Result<()> {
        if needed > self.fresh.len() {
            Err(Error::InsufficientResources {
                what: "one-time tables",
                needed,
                available: self.fresh.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn take(&mut self) -> Result<OneTimeTable> {
        self.require(1)?;
        let t = self.fresh.pop_front().expect("checked");
        self.ledger.spend(t.id)?;
        Ok(t)
    }

    pub fn and(&mut self, a: bool, b: bool) -> Result<AndRecord> {
        let t = self.take()?;
        Ok(and_with_table(a, b, &t))
    }
}

/// `c ⊕ Σ a_j·b_j`, with `a` on Alice's side and `b, c` on Bob's.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearPoly {
    pub c: bool,
    pub a: Vec<bool>,
    pub b: Vec<bool>,
}

impl LinearPoly {
    pub fn new(c: bool, a: Vec<bool>, b: Vec<bool>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidArgument("polynomial needs at least one term".into()));
        }
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        Ok(Self { c, a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn evaluate(&self) -> bool {
        self.a.iter().zip(&self.b).fold(self.c, |acc, (a, b)| acc ^ (a & b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRun {
    pub out: DistributedBit,
    pub ands: Vec<AndRecord>,
}

/// One nonlocal AND per term; the pool must hold `n` fresh tables up front.
pub fn eval_linear_poly(p: &LinearPoly, pool: &mut TablePool) -> Result<PolyRun> {
    pool.require(p.len())?;
    let mut out = DistributedBit::new(false, p.c);
    let mut ands = Vec::with_capacity(p.len());
    for (&a, &b) in p.a.iter().zip(&p.b) {
        let r = pool.and(a, b)?;
        out = out ^ r.out;
        ands.push(r);
    }
    Ok(PolyRun { out, ands })
}
