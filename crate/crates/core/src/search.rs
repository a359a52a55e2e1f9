//! Capacity-bounded best-first queue.

use std::collections::BTreeMap;

/// Priority queue ordered by `(key, seq)` where `seq` is the insertion
/// counter. When the queue grows past its capacity the worst entries are
/// dropped until it is 10% below capacity.
pub struct BoundedQueue<K: Ord, T> {
    map: BTreeMap<(K, u64), T>,
    capacity: usize,
    seq: u64,
    dropped: usize,
}

impl<K: Ord, T> BoundedQueue<K, T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        BoundedQueue { map: BTreeMap::new(), capacity, seq: 0, dropped: 0 }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Entries evicted so far.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn push(&mut self, key: K, item: T) {
        self.map.insert((key, self.seq), item);
        self.seq += 1;
        if self.map.len() > self.capacity {
            let keep = self.capacity - self.capacity / 10;
            while self.map.len() > keep.max(1) {
                self.map.pop_last();
                self.dropped += 1;
            }
        }
    }

    pub fn pop(&mut self) -> Option<(K, T)> {
        self.map.pop_first().map(|((k, _), v)| (k, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifo_among_equal_keys() {
        let mut q = BoundedQueue::new(10);
        q.push(1, "a");
        q.push(0, "b");
        q.push(1, "c");
        assert_eq!(q.pop(), Some((0, "b")));
        assert_eq!(q.pop(), Some((1, "a")));
        assert_eq!(q.pop(), Some((1, "c")));
        assert_eq!(q.pop(), None);
    }

    #[test]
    fn overflow_evicts_worst_batch() {
        let mut q = BoundedQueue::new(10);
        for i in 0..11 {
            q.push(i, i);
        }
        assert_eq!(q.len(), 9);
        assert_eq!(q.dropped(), 2);
        assert_eq!(q.pop(), Some((0, 0)));
    }
}
