//! Minimum set cover by branch and bound.
//!
//! Used for internal covering numbers (elements are points, sets are balls
//! around candidate centers) and for minimum hitting sets (elements are the
//! family members, sets are the pool points that hit them).

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::new(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersection_count(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn union_with(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| k * 64 + b)
        })
    }
}

/// Greedy cover: repeatedly take the set covering most uncovered elements
/// (lowest index on ties). `None` if some element is in no set.
pub fn greedy_set_cover(n_elements: usize, sets: &[BitSet]) -> Option<Vec<usize>> {
    let mut covered = BitSet::new(n_elements);
    let mut chosen = Vec::new();
    while covered.count() < n_elements {
        let (best, gain) = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.count() - s.intersection_count(&covered)))
            .fold((usize::MAX, 0), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
        if gain == 0 {
            return None;
        }
        covered.union_with(&sets[best]);
        chosen.push(best);
    }
    Some(chosen)
}

/// Exact minimum cover. Returns chosen set indices in increasing order.
pub fn exact_set_cover(n_elements: usize, sets: &[BitSet]) -> Option<Vec<usize>> {
    let greedy = greedy_set_cover(n_elements, sets)?;
    // covers_of[e] = sets containing element e
    let covers_of: Vec<Vec<usize>> = (0..n_elements)
        .map(|e| (0..sets.len()).filter(|&s| sets[s].contains(e)).collect())
        .collect();
    let mut search = Search {
        n_elements,
        sets,
        covers_of: &covers_of,
        best: greedy,
        chosen: Vec::new(),
    };
    let covered = BitSet::new(n_elements);
    search.dfs(&covered);
    let mut best = search.best;
    best.sort_unstable();
    Some(best)
}

struct Search<'a> {
    n_elements: usize,
    sets: &'a [BitSet],
    covers_of: &'a [Vec<usize>],
    best: Vec<usize>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn dfs(&mut self, covered: &BitSet) {
        if covered.count() == self.n_elements {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        if self.chosen.len() + self.lower_bound(covered) >= self.best.len() {
            return;
        }
        // Branch on the uncovered element with the fewest covering sets.
        let element = (0..self.n_elements)
            .filter(|&e| !covered.contains(e))
            .min_by_key(|&e| self.covers_of[e].len())
            .expect("some element is uncovered");
        let mut options: Vec<(usize, usize)> = self.covers_of[element]
            .iter()
            .map(|&s| (s, self.sets[s].count() - self.sets[s].intersection_count(covered)))
            .collect();
        options.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (s, _) in options {
            let mut next = covered.clone();
            next.union_with(&self.sets[s]);
            self.chosen.push(s);
            self.dfs(&next);
            self.chosen.pop();
        }
    }

    /// Greedy packing of uncovered elements no two of which share a set.
    fn lower_bound(&self, covered: &BitSet) -> usize {
        let mut blocked = BitSet::new(self.sets.len());
        let mut packed = 0;
        for e in 0..self.n_elements {
            if covered.contains(e) {
                continue;
            }
            if self.covers_of[e].iter().any(|&s| blocked.contains(s)) {
                continue;
            }
            for &s in &self.covers_of[e] {
                blocked.insert(s);
            }
            packed += 1;
        }
        packed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(len: usize, items: &[usize]) -> BitSet {
        let mut s = BitSet::new(len);
        for &i in items {
            s.insert(i);
        }
        s
    }

    #[test]
    fn greedy_is_suboptimal_where_exact_is_not() {
        // Universe 0..6; greedy picks the big middle set first.
        let sets = vec![
            set(6, &[0, 1, 2]),
            set(6, &[3, 4, 5]),
            set(6, &[1, 2, 3, 4]),
            set(6, &[0]),
            set(6, &[5]),
        ];
        let g = greedy_set_cover(6, &sets).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(exact_set_cover(6, &sets).unwrap(), vec![0, 1]);
    }

    #[test]
    fn uncoverable_element() {
        let sets = vec![set(3, &[0, 1])];
        assert!(greedy_set_cover(3, &sets).is_none());
        assert!(exact_set_cover(3, &sets).is_none());
    }

    #[test]
    fn empty_universe() {
        assert_eq!(exact_set_cover(0, &[]).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn exact_matches_enumeration_on_small_families() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..8);
            let k = rng.gen_range(1..8);
            let sets: Vec<BitSet> = (0..k)
                .map(|_| {
                    let items: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
                    set(n, &items)
                })
                .collect();
            let brute = (0u32..1 << k)
                .filter(|mask| {
                    (0..n).all(|e| (0..k).any(|s| mask & (1 << s) != 0 && sets[s].contains(e)))
                })
                .map(|mask| mask.count_ones() as usize)
                .min();
            let exact = exact_set_cover(n, &sets).map(|c| c.len());
            assert_eq!(exact, brute);
        }
    }

    #[test]
    fn bitset_ops() {
        let a = set(130, &[0, 64, 129]);
        let b = set(130, &[64]);
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(a.intersection_count(&b), 1);
        assert_eq!(BitSet::full(70).count(), 70);
    }
}
