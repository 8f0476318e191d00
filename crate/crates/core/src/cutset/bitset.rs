/// Fixed-width set of basic-event indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct EventSet {
    words: Box<[u64]>,
}

impl EventSet {
    pub fn new(width: usize) -> Self {
        EventSet { words: vec![0; width.div_ceil(64).max(1)].into_boxed_slice() }
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union(&self, other: &EventSet) -> EventSet {
        EventSet {
            words: self.words.iter().zip(other.words.iter()).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn is_subset(&self, other: &EventSet) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}
