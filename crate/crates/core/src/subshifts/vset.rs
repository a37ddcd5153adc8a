/// Fixed-capacity bit set of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct VSet {
    bits: Vec<u64>,
}

impl VSet {
    pub fn new(n: usize) -> Self {
        Self { bits: vec![0; n.div_ceil(64)] }
    }

    pub fn insert(&mut self, i: usize) {
        self.bits[i / 64] |= 1 << (i % 64);
    }

    #[cfg(test)]
    pub fn contains(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &b)| {
            (0..64).filter(move |k| b >> k & 1 == 1).map(move |k| w * 64 + k)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::VSet;

    #[test]
    fn insert_and_iterate_across_words() {
        let mut s = VSet::new(130);
        assert!(s.is_empty());
        for i in [0, 63, 64, 129] {
            s.insert(i);
        }
        assert!(s.contains(64) && !s.contains(65));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
    }
}
