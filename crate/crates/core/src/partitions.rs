//! Set partitions as restricted growth strings.
//!
//! A restricted growth string `a` of length `n` has `a[0] = 0` and
//! `a[i] <= 1 + max(a[..i])`; each one encodes exactly one partition of
//! `{0, .., n-1}`.

/// Iterator over all restricted growth strings of length `n`, in
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct SetPartitions {
    rgs: Vec<usize>,
    /// prefix_max[i] = max(rgs[..=i])
    prefix_max: Vec<usize>,
    started: bool,
    done: bool,
}

impl SetPartitions {
    pub fn new(n: usize) -> Self {
        Self {
            rgs: vec![0; n],
            prefix_max: vec![0; n],
            started: false,
            done: false,
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.rgs.len();
        for i in (1..n).rev() {
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for k in i + 1..n {
                    self.rgs[k] = 0;
                    self.prefix_max[k] = self.prefix_max[i];
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(self.rgs.clone())
    }
}

/// Bell number `B(n)`, the count of set partitions of `n` items.
pub fn bell(n: usize) -> u128 {
    // Bell triangle
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}
