use serde::{Deserialize, Serialize};

/// Which side of the two-party computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

/// A four-bit correlation `(x, y, e, f)` with `e ⊕ f = x·y` when correct.
///
/// Alice holds `(x, e)` and Bob holds `(y, f)`. The full record exists only
/// inside the simulator; anything crossing a party boundary goes through
/// [`AliceView`] or [`BobView`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OneTimeTable {
    pub id: u64,
    pub x: bool,
    pub y: bool,
    pub e: bool,
    pub f: bool,
}

impl OneTimeTable {
    pub fn new(id: u64, x: bool, y: bool, e: bool, f: bool) -> Self {
        Self { id, x, y, e, f }
    }

    /// Samples a uniformly random correct table.
    pub fn random_correct<R: rand::Rng + ?Sized>(id: u64, rng: &mut R) -> Self {
        let (x, y, f) = (rng.random(), rng.random(), rng.random());
        Self::new(id, x, y, (x & y) ^ f, f)
    }

    pub fn is_correct(&self) -> bool {
        self.e ^ self.f == (self.x & self.y)
    }

    pub fn alice_view(&self) -> AliceView {
        AliceView {
            id: self.id,
            x: self.x,
            e: self.e,
        }
    }

    pub fn bob_view(&self) -> BobView {
        BobView {
            id: self.id,
            y: self.y,
            f: self.f,
        }
    }

    /// Reassembles a table from two views with the same id.
    pub fn join(a: &AliceView, b: &BobView) -> Option<Self> {
        (a.id == b.id).then(|| Self::new(a.id, a.x, b.y, a.e, b.f))
    }

    /// All eight correct tables with the given id.
    pub fn all_correct(id: u64) -> impl Iterator<Item = OneTimeTable> {
        (0..8u8).map(move |bits| {
            let (x, y, f) = (bits & 4 != 0, bits & 2 != 0, bits & 1 != 0);
            OneTimeTable::new(id, x, y, (x & y) ^ f, f)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AliceView {
    pub id: u64,
    pub x: bool,
    pub e: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BobView {
    pub id: u64,
    pub y: bool,
    pub f: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn views_split_and_join() {
        let t = OneTimeTable::new(4, true, true, true, false);
        assert!(t.is_correct());
        let (a, b) = (t.alice_view(), t.bob_view());
        assert_eq!(OneTimeTable::join(&a, &b), Some(t));
        let other = BobView { id: 5, ..b };
        assert_eq!(OneTimeTable::join(&a, &other), None);
    }

    #[test]
    fn eight_correct_tables() {
        let all: Vec<_> = OneTimeTable::all_correct(0).collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(OneTimeTable::is_correct));
    }
}
