//! Order-statistic multiset of `i64` keys with subtree sizes and key sums.
//!
//! A treap stored in an arena; removed slots go on a free list.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NIL: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Node {
    key: i64,
    priority: u64,
    left: usize,
    right: usize,
    size: usize,
    sum: i128,
}

#[derive(Debug, Clone)]
pub struct OrderStatTree {
    nodes: Vec<Node>,
    free: Vec<usize>,
    root: usize,
    rng: ChaCha8Rng,
}

impl Default for OrderStatTree {
    fn default() -> Self {
        Self::new()
    }
}

impl OrderStatTree {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            rng: ChaCha8Rng::seed_from_u64(0x5eed),
        }
    }

    pub fn from_keys(keys: impl IntoIterator<Item = i64>) -> Self {
        let mut t = Self::new();
        for k in keys {
            t.insert(k);
        }
        t
    }

    pub fn len(&self) -> usize {
        self.size(self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    /// Sum of all keys.
    pub fn total(&self) -> i128 {
        self.sum(self.root)
    }

    pub fn insert(&mut self, key: i64) {
        let node = Node {
            key,
            priority: self.rng.random(),
            left: NIL,
            right: NIL,
            size: 1,
            sum: key as i128,
        };
        let id = match self.free.pop() {
            Some(id) => {
                self.nodes[id] = node;
                id
            }
            None => {
                self.nodes.push(node);
                self.nodes.len() - 1
            }
        };
        let (a, b) = self.split_lt(self.root, key);
        let b = self.merge(id, b);
        self.root = self.merge(a, b);
    }

    /// Removes one copy of `key`; returns whether it was present.
    pub fn remove(&mut self, key: i64) -> bool {
        let (a, b) = self.split_lt(self.root, key);
        let (first, rest) = self.split_count(b, 1);
        let found = first != NIL && self.nodes[first].key == key;
        let b = if found {
            self.free.push(first);
            rest
        } else {
            self.merge(first, rest)
        };
        self.root = self.merge(a, b);
        found
    }

    /// The `k`-th smallest key, 1-indexed. `select(0)` is the sentinel 0.
    pub fn select(&self, k: usize) -> Option<i64> {
        if k == 0 {
            return Some(0);
        }
        if k > self.len() {
            return None;
        }
        let mut k = k;
        let mut cur = self.root;
        loop {
            let n = &self.nodes[cur];
            let ls = self.size(n.left);
            if k <= ls {
                cur = n.left;
            } else if k == ls + 1 {
                return Some(n.key);
            } else {
                k -= ls + 1;
                cur = n.right;
            }
        }
    }

    /// Sum of the `k` smallest keys.
    pub fn prefix_sum(&self, k: usize) -> Option<i128> {
        if k > self.len() {
            return None;
        }
        let mut k = k;
        let mut acc = 0i128;
        let mut cur = self.root;
        while k > 0 {
            let n = &self.nodes[cur];
            let ls = self.size(n.left);
            if k <= ls {
                cur = n.left;
            } else {
                acc += self.sum(n.left) + n.key as i128;
                k -= ls + 1;
                cur = n.right;
            }
        }
        Some(acc)
    }

    /// Sum of the `k` largest keys.
    pub fn suffix_sum(&self, k: usize) -> Option<i128> {
        let n = self.len();
        if k > n {
            return None;
        }
        Some(self.total() - self.prefix_sum(n - k)?)
    }

    /// Number of keys `<= key`.
    pub fn count_le(&self, key: i64) -> usize {
        let mut acc = 0;
        let mut cur = self.root;
        while cur != NIL {
            let n = &self.nodes[cur];
            if n.key <= key {
                acc += self.size(n.left) + 1;
                cur = n.right;
            } else {
                cur = n.left;
            }
        }
        acc
    }

    pub fn min(&self) -> Option<i64> {
        self.select(1).filter(|_| !self.is_empty())
    }

    fn size(&self, id: usize) -> usize {
        if id == NIL {
            0
        } else {
            self.nodes[id].size
        }
    }

    fn sum(&self, id: usize) -> i128 {
        if id == NIL {
            0
        } else {
            self.nodes[id].sum
        }
    }

    fn pull(&mut self, id: usize) {
        let (l, r) = (self.nodes[id].left, self.nodes[id].right);
        let size = self.size(l) + self.size(r) + 1;
        let sum = self.sum(l) + self.sum(r) + self.nodes[id].key as i128;
        let n = &mut self.nodes[id];
        n.size = size;
        n.sum = sum;
    }

    /// Splits into (keys < key, keys >= key).
    fn split_lt(&mut self, id: usize, key: i64) -> (usize, usize) {
        if id == NIL {
            return (NIL, NIL);
        }
        if self.nodes[id].key < key {
            let (a, b) = self.split_lt(self.nodes[id].right, key);
            self.nodes[id].right = a;
            self.pull(id);
            (id, b)
        } else {
            let (a, b) = self.split_lt(self.nodes[id].left, key);
            self.nodes[id].left = b;
            self.pull(id);
            (a, id)
        }
    }

    /// Splits off the `k` smallest keys.
    fn split_count(&mut self, id: usize, k: usize) -> (usize, usize) {
        if id == NIL {
            return (NIL, NIL);
        }
        let ls = self.size(self.nodes[id].left);
        if k <= ls {
            let (a, b) = self.split_count(self.nodes[id].left, k);
            self.nodes[id].left = b;
            self.pull(id);
            (a, id)
        } else {
            let (a, b) = self.split_count(self.nodes[id].right, k - ls - 1);
            self.nodes[id].right = a;
            self.pull(id);
            (id, b)
        }
    }

    fn merge(&mut self, a: usize, b: usize) -> usize {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a].priority > self.nodes[b].priority {
            let r = self.merge(self.nodes[a].right, b);
            self.nodes[a].right = r;
            self.pull(a);
            a
        } else {
            let l = self.merge(a, self.nodes[b].left);
            self.nodes[b].left = l;
            self.pull(b);
            b
        }
    }
}
