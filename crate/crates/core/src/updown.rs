//! Up-down factorization: every vertex sends its arch either above or below
//! the line, and the count of a configuration family is the sum over these
//! choices of the product of one-sided arch counts.

use std::cell::RefCell;

use num_bigint::BigUint;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::arch::{ArchCounter, MemoStats, Pairing, Token, Word};
use crate::ensemble::{spec_for, DecoratedLine, EnsembleId, EnsembleSpec, Side, Slot};
use crate::error::{Error, Result};

/// A split of the line positions `1..=L` into the vertices whose arch goes
/// up and those whose arch goes down.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    pub up_set: Vec<usize>,
    pub down_set: Vec<usize>,
}

impl Partition {
    fn from_up(len: usize, up_set: Vec<usize>) -> Self {
        let down_set = (1..=len).filter(|i| up_set.binary_search(i).is_err()).collect();
        Partition { up_set, down_set }
    }
}

/// Iterates `k`-subsets of `0..n` in lexicographic order.
struct Subsets {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Subsets {
    fn new(n: usize, k: usize) -> Self {
        Subsets { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// All partitions of `1..=len` whose up set holds as many odd as even
/// positions, built directly from pairs of equal-size subsets.
///
/// # Panics
/// If `len` is odd.
pub fn admissible_partitions(len: usize) -> impl Iterator<Item = Partition> {
    assert!(len.is_multiple_of(2), "line length must be even");
    let m = len / 2;
    (0..=m).flat_map(move |k| {
        Subsets::new(m, k).flat_map(move |odd| {
            Subsets::new(m, k).map(move |even| {
                let mut up: Vec<usize> =
                    odd.iter().map(|&i| 2 * i + 1).chain(even.iter().map(|&i| 2 * i + 2)).collect();
                up.sort_unstable();
                Partition::from_up(len, up)
            })
        })
    })
}

thread_local! {
    static COUNTERS: RefCell<[Option<ArchCounter>; 2]> = const { RefCell::new([None, None]) };
}

fn with_counter<R>(pairing: Pairing, f: impl FnOnce(&mut ArchCounter) -> R) -> R {
    let slot = match pairing {
        Pairing::Bicolored => 0,
        Pairing::Uncolored => 1,
    };
    COUNTERS.with(|c| {
        let mut c = c.borrow_mut();
        let counter = c[slot].get_or_insert_with(|| ArchCounter::new(pairing));
        f(counter)
    })
}

/// Memo hit/miss counts of the calling thread's counters.
pub fn memo_stats() -> MemoStats {
    COUNTERS.with(|c| {
        c.borrow().iter().flatten().fold(MemoStats::default(), |acc, k| {
            let s = k.stats();
            MemoStats { hits: acc.hits + s.hits, misses: acc.misses + s.misses }
        })
    })
}

/// Depth of the prefix tree whose nodes become independent work blocks.
const SPLIT_DEPTH: usize = 10;

/// Partial assignment: the words built so far and the next slot to fill.
#[derive(Clone, Copy, Debug)]
struct Frontier {
    pos: usize,
    up: Word,
    /// Lower word, stored reversed when arches may wind.
    down: Word,
    balance: i32,
}

struct Walker<'a> {
    line: &'a DecoratedLine,
    pairing: Pairing,
    /// Free black and white vertices at or after each position.
    free_black: Vec<i32>,
    free_white: Vec<i32>,
    /// Up-side color balance contributed by fixed slots from each position.
    fixed_up: Vec<i32>,
}

fn color_weight(t: Token) -> i32 {
    match t {
        Token::Black => 1,
        Token::White => -1,
        _ => 0,
    }
}

impl<'a> Walker<'a> {
    fn new(line: &'a DecoratedLine, pairing: Pairing) -> Self {
        let len = line.slots.len();
        let mut free_black = vec![0; len + 1];
        let mut free_white = vec![0; len + 1];
        let mut fixed_up = vec![0; len + 1];
        for i in (0..len).rev() {
            free_black[i] = free_black[i + 1];
            free_white[i] = free_white[i + 1];
            fixed_up[i] = fixed_up[i + 1];
            match line.slots[i] {
                Slot::Free(Token::Black) => free_black[i] += 1,
                Slot::Free(Token::White) => free_white[i] += 1,
                Slot::Fixed(Side::Up, t) | Slot::Both(t) => fixed_up[i] += color_weight(t),
                _ => {}
            }
        }
        Walker { line, pairing, free_black, free_white, fixed_up }
    }

    fn root(&self) -> Frontier {
        Frontier { pos: 0, up: Word::EMPTY, down: Word::EMPTY, balance: 0 }
    }

    /// Whether the upper word can still end balanced. Only meaningful for
    /// bicolored lines without winding.
    fn feasible(&self, f: &Frontier) -> bool {
        if self.line.winding || self.pairing == Pairing::Uncolored {
            return true;
        }
        let b = f.balance + self.fixed_up[f.pos];
        -self.free_black[f.pos] <= b && b <= self.free_white[f.pos]
    }

    fn put_down(&self, down: Word, t: Token) -> Word {
        if self.line.winding {
            down.push_front(t)
        } else {
            down.push(t)
        }
    }

    fn children(&self, f: &Frontier, out: &mut Vec<Frontier>) {
        let next = |up, down, balance| Frontier { pos: f.pos + 1, up, down, balance };
        match self.line.slots[f.pos] {
            Slot::Free(t) => {
                out.push(next(f.up.push(t), f.down, f.balance + color_weight(t)));
                out.push(next(f.up, self.put_down(f.down, t), f.balance));
            }
            Slot::Fixed(Side::Up, t) => out.push(next(f.up.push(t), f.down, f.balance)),
            Slot::Fixed(Side::Down, t) => out.push(next(f.up, self.put_down(f.down, t), f.balance)),
            Slot::Both(t) => out.push(next(f.up.push(t), self.put_down(f.down, t), f.balance)),
            Slot::Removed => out.push(next(f.up, f.down, f.balance)),
        }
        out.retain(|c| self.feasible(c));
    }

    fn leaf(&self, f: &Frontier, counter: &mut ArchCounter) -> u128 {
        if self.line.winding {
            counter.count(f.up.concat(self.line.middle).concat(f.down))
        } else {
            let up = counter.count(f.up);
            if up == 0 {
                return 0;
            }
            let down = counter.count(f.down);
            up.checked_mul(down).expect("up-down product overflowed u128")
        }
    }

    fn sum(&self, f: Frontier, counter: &mut ArchCounter, buf: &mut Vec<Vec<Frontier>>, depth: usize) -> u128 {
        if f.pos == self.line.slots.len() {
            return self.leaf(&f, counter);
        }
        if buf.len() <= depth {
            buf.push(Vec::with_capacity(2));
        }
        let mut kids = std::mem::take(&mut buf[depth]);
        kids.clear();
        self.children(&f, &mut kids);
        let mut total: u128 = 0;
        for &c in &kids {
            let v = self.sum(c, counter, buf, depth + 1);
            total = total.checked_add(v).expect("up-down sum overflowed u128");
        }
        buf[depth] = kids;
        total
    }

    /// Same sum, sharing identical subproblems. Worth it only when words
    /// repeat, which is the case once colors are dropped.
    fn sum_memo(
        &self,
        f: Frontier,
        counter: &mut ArchCounter,
        memo: &mut FxHashMap<(usize, Word, Word), u128>,
    ) -> u128 {
        if f.pos == self.line.slots.len() {
            return self.leaf(&f, counter);
        }
        let key = (f.pos, f.up, f.down);
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let mut kids = Vec::with_capacity(2);
        self.children(&f, &mut kids);
        let mut total: u128 = 0;
        for c in kids {
            let v = self.sum_memo(c, counter, memo);
            total = total.checked_add(v).expect("up-down sum overflowed u128");
        }
        memo.insert(key, total);
        total
    }

    fn frontier_at(&self, depth: usize) -> Vec<Frontier> {
        let mut level = vec![self.root()];
        let mut kids = Vec::new();
        for _ in 0..depth.min(self.line.slots.len()) {
            let mut next = Vec::with_capacity(level.len() * 2);
            for f in &level {
                kids.clear();
                self.children(f, &mut kids);
                next.extend_from_slice(&kids);
            }
            level = next;
        }
        level
    }
}

fn max_word_len(line: &DecoratedLine) -> usize {
    let slots = line.slots.iter().filter(|s| !matches!(s, Slot::Removed)).count();
    let both = line.slots.iter().filter(|s| matches!(s, Slot::Both(_))).count();
    slots + both + line.middle.len()
}

/// Raw (undivided, multiplicity-weighted) sum for a single decorated line.
pub fn count_decorated(line: &DecoratedLine, pairing: Pairing) -> Result<u128> {
    if max_word_len(line) > Word::MAX_LEN {
        return Err(Error::Overflow(format!(
            "boundary word of {} tokens exceeds the {}-token word limit",
            max_word_len(line),
            Word::MAX_LEN
        )));
    }
    let walker = Walker::new(line, pairing);
    let raw = match pairing {
        Pairing::Uncolored => {
            let mut memo = FxHashMap::default();
            with_counter(pairing, |c| walker.sum_memo(walker.root(), c, &mut memo))
        }
        Pairing::Bicolored => walker
            .frontier_at(SPLIT_DEPTH)
            .into_par_iter()
            .map(|f| with_counter(pairing, |c| walker.sum(f, c, &mut Vec::new(), 0)))
            .reduce(|| 0, |a, b| a.checked_add(b).expect("up-down sum overflowed u128")),
    };
    raw.checked_mul(line.multiplicity as u128).ok_or_else(|| Error::Overflow("weighted up-down sum".into()))
}

/// Exact count of a family by up-down factorization.
pub fn ud_enumerate(spec: &EnsembleSpec, n: usize) -> Result<BigUint> {
    spec.check_size(n)?;
    let pairing = if spec.id.colored { Pairing::Bicolored } else { Pairing::Uncolored };
    let mut raw: u128 = 0;
    for line in spec.decorations(n) {
        let v = count_decorated(&line, pairing)?;
        raw = raw.checked_add(v).ok_or_else(|| Error::Overflow("up-down total".into()))?;
    }
    divide_exact(spec.id, n, raw, spec.symmetry_divisor)
}

/// Convenience wrapper over [`ud_enumerate`] for a family id.
pub fn ud_count(id: EnsembleId, n: usize) -> Result<BigUint> {
    ud_enumerate(&spec_for(id), n)
}

pub(crate) fn divide_exact(id: EnsembleId, n: usize, raw: u128, divisor: u64) -> Result<BigUint> {
    let d = divisor as u128;
    if !raw.is_multiple_of(d) {
        return Err(Error::Indivisible { ensemble: id, n, raw: raw.to_string(), divisor });
    }
    Ok(BigUint::from(raw / d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::binomial;
    use crate::ensemble::EnsembleTag;

    fn colored(tag: EnsembleTag, n: usize) -> u128 {
        let v = ud_count(EnsembleId::bicubic(tag), n).unwrap();
        u128::try_from(v).unwrap()
    }

    #[test]
    fn partition_counts() {
        assert_eq!(admissible_partitions(0).count(), 1);
        assert_eq!(admissible_partitions(2).count(), 2);
        assert_eq!(admissible_partitions(4).count(), 6);
        for n in 0..=10u64 {
            assert_eq!(
                admissible_partitions(2 * n as usize).count() as u64,
                u64::try_from(binomial(2 * n, n)).unwrap()
            );
        }
    }

    #[test]
    fn partitions_are_complementary_and_sorted() {
        for p in admissible_partitions(8) {
            assert!(p.up_set.windows(2).all(|w| w[0] < w[1]));
            assert!(p.down_set.windows(2).all(|w| w[0] < w[1]));
            let mut all: Vec<usize> = p.up_set.iter().chain(&p.down_set).copied().collect();
            all.sort_unstable();
            assert_eq!(all, (1..=8).collect::<Vec<_>>());
            let odd = p.up_set.iter().filter(|&&i| i % 2 == 1).count();
            assert_eq!(2 * odd, p.up_set.len());
        }
    }

    #[test]
    fn z_matches_partition_sum() {
        // the explicit partition stream and the pruned walk agree
        use crate::arch::{count_one_sided, Color, ColorSeq};
        for n in 1..=5 {
            let line = ColorSeq::alternating(Color::Black, 2 * n);
            let col = |set: &[usize]| -> ColorSeq { set.iter().map(|&i| line.colors()[i - 1]).collect() };
            let sum: BigUint = admissible_partitions(2 * n)
                .map(|p| count_one_sided(&col(&p.up_set)) * count_one_sided(&col(&p.down_set)))
                .sum();
            assert_eq!(sum, ud_count(EnsembleId::bicubic(EnsembleTag::Z), n).unwrap());
        }
    }

    #[test]
    fn first_values() {
        use EnsembleTag::*;
        let cases: [(EnsembleTag, usize, &[u128]); 6] = [
            (Z, 1, &[2, 8, 40, 228, 1424]),
            (Y, 0, &[1, 6, 40, 286, 2152]),
            (X, 0, &[1, 4, 24, 168, 1280]),
            (W, 1, &[1, 4, 22, 140, 972]),
            (V, 2, &[1, 10, 84, 682, 5534]),
            (U, 2, &[1, 10, 90, 798, 7094]),
        ];
        for (tag, start, values) in cases {
            for (i, &want) in values.iter().enumerate() {
                assert_eq!(colored(tag, start + i), want, "{tag} at N = {}", start + i);
            }
        }
    }

    #[test]
    fn below_minimum_is_an_error() {
        assert!(matches!(ud_count(EnsembleId::bicubic(EnsembleTag::V), 1), Err(Error::SizeBelowMinimum { .. })));
    }

    #[test]
    fn indivisible_is_reported() {
        let id = EnsembleId::bicubic(EnsembleTag::W);
        assert!(matches!(divide_exact(id, 3, 7, 2), Err(Error::Indivisible { .. })));
        assert_eq!(divide_exact(id, 3, 8, 2).unwrap(), BigUint::from(4u8));
    }
}
