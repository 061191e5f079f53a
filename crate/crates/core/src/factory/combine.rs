use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::OneTimeTable;

/// Groups of table ids to be XOR-combined; each group must share Bob's
/// input bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombineSpec {
    pub groups: Vec<Vec<u64>>,
}

impl CombineSpec {
    /// Bob's grouping: consecutive runs of `k` tables with equal `y`, in id
    /// order. Leftover tables are not used.
    pub fn by_bob_input(tables: &[OneTimeTable], k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("group size must be at least 1".into()));
        }
        let mut pending: [Vec<u64>; 2] = [Vec::new(), Vec::new()];
        let mut groups = Vec::new();
        for t in tables {
            let slot = &mut pending[t.y as usize];
            slot.push(t.id);
            if slot.len() == k {
                groups.push(std::mem::take(slot));
            }
        }
        Ok(Self { groups })
    }
}

/// XORs each group into one table `(⊕a, b0, ⊕e, ⊕f)`. The combined table
/// takes the id of its group's first member.
pub fn combine_tables(tables: &[OneTimeTable], spec: &CombineSpec) -> Result<Vec<OneTimeTable>> {
    let by_id: HashMap<u64, &OneTimeTable> = tables.iter().map(|t| (t.id, t)).collect();
    let mut used = std::collections::HashSet::new();
    spec.groups
        .iter()
        .enumerate()
        .map(|(g, ids)| {
            let first = *ids
                .first()
                .ok_or_else(|| Error::TableSelection(format!("group {g} is empty")))?;
            let mut out = OneTimeTable::new(first, false, by_id.get(&first).map_or(false, |t| t.y), false, false);
            for id in ids {
                let t = by_id
                    .get(id)
                    .ok_or_else(|| Error::TableSelection(format!("unknown table id {id}")))?;
                if !used.insert(*id) {
                    return Err(Error::TableReuse(*id));
                }
                if t.y != out.y {
                    return Err(Error::MixedGroup { group: g });
                }
                out.x ^= t.x;
                out.e ^= t.e;
                out.f ^= t.f;
            }
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_rng;

    fn tables(n: u64, seed: u64) -> Vec<OneTimeTable> {
        let mut rng = stream_rng(seed, 0);
        (0..n).map(|i| OneTimeTable::random_correct(i, &mut rng)).collect()
    }

    #[test]
    fn combined_correct_tables_stay_correct() {
        let ts = tables(64, 1);
        for k in [2, 3, 8] {
            let spec = CombineSpec::by_bob_input(&ts, k).unwrap();
            assert!(!spec.groups.is_empty());
            let out = combine_tables(&ts, &spec).unwrap();
            assert!(out.iter().all(OneTimeTable::is_correct));
        }
    }

    #[test]
    fn one_wrong_member_spoils_the_group() {
        let mut ts = tables(32, 2);
        let spec = CombineSpec::by_bob_input(&ts, 4).unwrap();
        let victim = spec.groups[0][2];
        ts[victim as usize].f ^= true;
        let out = combine_tables(&ts, &spec).unwrap();
        assert!(!out[0].is_correct());
        assert!(out[1..].iter().all(OneTimeTable::is_correct));
    }

    #[test]
    fn mixed_inputs_rejected() {
        let ts = tables(32, 3);
        let a = ts.iter().find(|t| t.y).unwrap().id;
        let b = ts.iter().find(|t| !t.y).unwrap().id;
        let spec = CombineSpec { groups: vec![vec![a, b]] };
        assert_eq!(combine_tables(&ts, &spec), Err(Error::MixedGroup { group: 0 }));
    }

    #[test]
    fn order_within_group_is_irrelevant() {
        let ts = tables(40, 4);
        let spec = CombineSpec::by_bob_input(&ts, 5).unwrap();
        let reversed = CombineSpec {
            groups: spec
                .groups
                .iter()
                .map(|g| {
                    let mut r = g.clone();
                    r.rotate_left(2);
                    r
                })
                .collect(),
        };
        let a = combine_tables(&ts, &spec).unwrap();
        let b = combine_tables(&ts, &reversed).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.x, x.y, x.e, x.f), (y.x, y.y, y.e, y.f));
        }
    }
}
