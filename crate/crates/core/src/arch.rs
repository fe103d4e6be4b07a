//! Noncrossing arch systems on one side of a line.
//!
//! A word of vertex colors is read along the line; an arch system is a
//! noncrossing perfect matching of its positions drawn on one side, and it
//! is *bicolored* when every arch joins a black and a white vertex. The
//! counter below also understands tagged tokens (the endpoints of a
//! pass-through arch, which must pair with each other) and an uncolored
//! pairing rule used for cubic maps.

use std::cell::RefCell;
use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use lru::LruCache;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rustc_hash::{FxBuildHasher, FxHashMap};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Vertex color. White encodes 0 and black encodes 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Color {
    White = 0,
    Black = 1,
}

impl Color {
    pub fn from_bit(bit: u8) -> Color {
        if bit & 1 == 1 {
            Color::Black
        } else {
            Color::White
        }
    }

    pub fn bit(self) -> u8 {
        self as u8
    }

    pub fn flip(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }

    /// Color of the `i`-th vertex (0-based) of an alternating line that
    /// starts with `first`.
    pub fn alternating(first: Color, i: usize) -> Color {
        if i.is_multiple_of(2) {
            first
        } else {
            first.flip()
        }
    }
}

/// A finite sequence of vertex colors read along the line.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColorSeq(Vec<Color>);

impl ColorSeq {
    pub fn new(colors: Vec<Color>) -> Self {
        ColorSeq(colors)
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        ColorSeq(bits.iter().map(|&b| Color::from_bit(b)).collect())
    }

    pub fn alternating(first: Color, len: usize) -> Self {
        ColorSeq((0..len).map(|i| Color::alternating(first, i)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn colors(&self) -> &[Color] {
        &self.0
    }

    pub fn complement(&self) -> Self {
        ColorSeq(self.0.iter().map(|c| c.flip()).collect())
    }

    pub fn reversed(&self) -> Self {
        ColorSeq(self.0.iter().rev().copied().collect())
    }

    pub fn count(&self, color: Color) -> usize {
        self.0.iter().filter(|&&c| c == color).count()
    }
}

impl FromIterator<Color> for ColorSeq {
    fn from_iter<I: IntoIterator<Item = Color>>(iter: I) -> Self {
        ColorSeq(iter.into_iter().collect())
    }
}

impl fmt::Display for ColorSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{}", c.bit())?;
        }
        Ok(())
    }
}

impl FromStr for ColorSeq {
    type Err = Error;

    /// Parses a word of `0`/`1` characters (`0` = white).
    fn from_str(s: &str) -> Result<Self, Error> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(Color::White),
                '1' => Ok(Color::Black),
                other => Err(Error::Parse(format!("invalid color character {other:?}"))),
            })
            .collect()
    }
}

/// One position of a word handed to the arch counter.
///
/// `TagA`/`TagB` mark the two endpoints of a pass-through arch; a tag only
/// pairs with the same tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Token {
    White = 0,
    Black = 1,
    TagA = 2,
    TagB = 3,
}

impl Token {
    fn from_code(code: u8) -> Token {
        match code & 3 {
            0 => Token::White,
            1 => Token::Black,
            2 => Token::TagA,
            _ => Token::TagB,
        }
    }

    pub fn is_tag(self) -> bool {
        matches!(self, Token::TagA | Token::TagB)
    }
}

impl From<Color> for Token {
    fn from(c: Color) -> Token {
        match c {
            Color::White => Token::White,
            Color::Black => Token::Black,
        }
    }
}

/// Which pairs of tokens an arch may join.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pairing {
    /// Black with white; a tag with the same tag.
    Bicolored,
    /// Any two untagged positions; a tag with the same tag. Used for cubic maps.
    Uncolored,
}

impl Pairing {
    #[inline]
    pub fn allows(self, a: Token, b: Token) -> bool {
        match (a.is_tag(), b.is_tag()) {
            (true, true) => a == b,
            (false, false) => match self {
                Pairing::Bicolored => a != b,
                Pairing::Uncolored => true,
            },
            _ => false,
        }
    }
}

/// A word of at most [`Word::MAX_LEN`] tokens packed two bits per token,
/// position 0 in the lowest bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    bits: u128,
    len: u8,
}

impl Word {
    pub const MAX_LEN: usize = 64;

    pub const EMPTY: Word = Word { bits: 0, len: 0 };

    pub fn from_tokens(tokens: &[Token]) -> Option<Word> {
        if tokens.len() > Self::MAX_LEN {
            return None;
        }
        let mut w = Word::EMPTY;
        for &t in tokens {
            w = w.push(t);
        }
        Some(w)
    }

    #[inline]
    pub fn len(self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(self, i: usize) -> Token {
        Token::from_code((self.bits >> (2 * i)) as u8)
    }

    /// Appends a token at the end. Panics past [`Word::MAX_LEN`].
    #[inline]
    pub fn push(self, t: Token) -> Word {
        assert!(self.len() < Self::MAX_LEN, "word longer than {} tokens", Self::MAX_LEN);
        Word { bits: self.bits | ((t as u128) << (2 * self.len())), len: self.len + 1 }
    }

    /// Prepends a token at position 0.
    #[inline]
    pub fn push_front(self, t: Token) -> Word {
        assert!(self.len() < Self::MAX_LEN, "word longer than {} tokens", Self::MAX_LEN);
        Word { bits: (self.bits << 2) | t as u128, len: self.len + 1 }
    }

    /// The subword of positions `start..end`.
    #[inline]
    pub fn slice(self, start: usize, end: usize) -> Word {
        debug_assert!(start <= end && end <= self.len());
        let len = end - start;
        let shifted = if start >= 64 { 0 } else { self.bits >> (2 * start) };
        Word { bits: shifted & mask(len), len: len as u8 }
    }

    /// `self` followed by `other`. Panics past [`Word::MAX_LEN`].
    #[inline]
    pub fn concat(self, other: Word) -> Word {
        let len = self.len() + other.len();
        assert!(len <= Self::MAX_LEN, "word longer than {} tokens", Self::MAX_LEN);
        let high = if self.len() >= 64 { 0 } else { other.bits << (2 * self.len()) };
        Word { bits: self.bits | high, len: len as u8 }
    }

    pub fn tokens(self) -> impl Iterator<Item = Token> {
        (0..self.len()).map(move |i| self.get(i))
    }
}

#[inline]
fn mask(len: usize) -> u128 {
    if len >= 64 {
        u128::MAX
    } else {
        (1u128 << (2 * len)) - 1
    }
}

/// Default number of memoized words per counter.
pub const DEFAULT_MEMO_CAPACITY: usize = 1 << 22;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MemoStats {
    pub hits: u64,
    pub misses: u64,
}

/// Memoized one-sided arch counter.
///
/// Counts are `u128`; every addition and multiplication is checked and an
/// overflow panics rather than wrapping. A word of length `2m` has at most
/// `Cat_m` arch systems, which fits for every word a [`Word`] can hold.
pub struct ArchCounter {
    pairing: Pairing,
    memo: LruCache<Word, u128, FxBuildHasher>,
    stats: MemoStats,
}

impl ArchCounter {
    pub fn new(pairing: Pairing) -> Self {
        Self::with_capacity(pairing, DEFAULT_MEMO_CAPACITY)
    }

    pub fn with_capacity(pairing: Pairing, capacity: usize) -> Self {
        let cap = NonZeroUsize::new(capacity.max(1)).unwrap();
        ArchCounter { pairing, memo: LruCache::with_hasher(cap, FxBuildHasher), stats: MemoStats::default() }
    }

    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    pub fn stats(&self) -> MemoStats {
        self.stats
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Number of arch systems on one side of the line compatible with `word`.
    pub fn count(&mut self, word: Word) -> u128 {
        if word.is_empty() {
            return 1;
        }
        if word.len() % 2 == 1 || !self.balanced(word) {
            return 0;
        }
        self.count_balanced(word)
    }

    fn count_balanced(&mut self, word: Word) -> u128 {
        let len = word.len();
        if len == 0 {
            return 1;
        }
        if len == 2 {
            return self.pairing.allows(word.get(0), word.get(1)) as u128;
        }
        if let Some(&v) = self.memo.get(&word) {
            self.stats.hits += 1;
            return v;
        }
        self.stats.misses += 1;

        // Match position 0 with position j; the interior 1..j must itself be
        // balanced, and then so is the suffix.
        let first = word.get(0);
        let mut total: u128 = 0;
        let mut balance = Balance::default();
        for j in 1..len {
            let t = word.get(j);
            if j % 2 == 1 && balance.is_zero(self.pairing) && self.pairing.allows(first, t) {
                let inner = self.count_balanced(word.slice(1, j));
                if inner != 0 {
                    let rest = self.count_balanced(word.slice(j + 1, len));
                    let term = inner.checked_mul(rest).expect("arch count overflowed u128");
                    total = total.checked_add(term).expect("arch count overflowed u128");
                }
            }
            balance.add(t);
        }
        self.memo.put(word, total);
        total
    }

    fn balanced(&self, word: Word) -> bool {
        let mut b = Balance::default();
        for t in word.tokens() {
            b.add(t);
        }
        b.is_zero(self.pairing)
    }
}

/// Running color balance of a word: black minus white, plus tag parities.
#[derive(Clone, Copy, Default)]
struct Balance {
    colors: i32,
    tags: u8,
}

impl Balance {
    #[inline]
    fn add(&mut self, t: Token) {
        match t {
            Token::Black => self.colors += 1,
            Token::White => self.colors -= 1,
            Token::TagA => self.tags ^= 1,
            Token::TagB => self.tags ^= 2,
        }
    }

    #[inline]
    fn is_zero(&self, pairing: Pairing) -> bool {
        self.tags == 0
            && match pairing {
                Pairing::Bicolored => self.colors == 0,
                // only parity matters without colors
                Pairing::Uncolored => self.colors % 2 == 0,
            }
    }
}

thread_local! {
    static SHARED: RefCell<ArchCounter> = RefCell::new(ArchCounter::new(Pairing::Bicolored));
}

/// Number of bicolored arch systems on one side of the line compatible with
/// `seq`; zero when none exists. The empty word counts one.
pub fn count_one_sided(seq: &ColorSeq) -> BigUint {
    let tokens: Vec<Token> = seq.colors().iter().map(|&c| c.into()).collect();
    match Word::from_tokens(&tokens) {
        Some(word) => SHARED.with(|c| BigUint::from(c.borrow_mut().count(word))),
        None => count_long(&tokens, Pairing::Bicolored),
    }
}

/// Same recursion for words too long to pack, memoized on index ranges of
/// the word itself.
fn count_long(tokens: &[Token], pairing: Pairing) -> BigUint {
    fn go(
        tokens: &[Token],
        lo: usize,
        hi: usize,
        pairing: Pairing,
        memo: &mut FxHashMap<(usize, usize), BigUint>,
    ) -> BigUint {
        if lo == hi {
            return BigUint::one();
        }
        if (hi - lo) % 2 == 1 {
            return BigUint::zero();
        }
        if let Some(v) = memo.get(&(lo, hi)) {
            return v.clone();
        }
        let mut total = BigUint::zero();
        for j in (lo + 1..hi).step_by(2) {
            if pairing.allows(tokens[lo], tokens[j]) {
                let inner = go(tokens, lo + 1, j, pairing, memo);
                if !inner.is_zero() {
                    total += inner * go(tokens, j + 1, hi, pairing, memo);
                }
            }
        }
        memo.insert((lo, hi), total.clone());
        total
    }
    let mut memo = FxHashMap::default();
    go(tokens, 0, tokens.len(), pairing, &mut memo)
}

/// Catalan numbers `binom(2n, n) / (n + 1)`, extended on demand.
#[derive(Clone, Debug)]
pub struct CatalanTable {
    values: Vec<BigUint>,
}

impl Default for CatalanTable {
    fn default() -> Self {
        CatalanTable { values: vec![BigUint::one()] }
    }
}

impl CatalanTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, n: usize) -> &BigUint {
        while self.values.len() <= n {
            // Cat_{m+1} = Cat_m * 2(2m+1) / (m+2), exact
            let m = self.values.len() - 1;
            let next = &self.values[m] * BigUint::from(2 * (2 * m as u64 + 1)) / BigUint::from(m as u64 + 2);
            self.values.push(next);
        }
        &self.values[n]
    }
}

/// The `n`-th Catalan number.
pub fn catalan(n: usize) -> BigUint {
    binomial(2 * n as u64, n as u64) / BigUint::from(n as u64 + 1)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive enumeration: every perfect matching, filtered for
    /// crossings and for color.
    fn brute_force(colors: &[Color]) -> u64 {
        fn all_matchings(free: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
            if free.is_empty() {
                out.push(acc.clone());
                return;
            }
            for idx in 1..free.len() {
                let rest: Vec<usize> =
                    free[1..].iter().enumerate().filter(|&(i, _)| i + 1 != idx).map(|(_, &v)| v).collect();
                acc.push((free[0], free[idx]));
                all_matchings(&rest, acc, out);
                acc.pop();
            }
        }
        if colors.len() % 2 == 1 {
            return 0;
        }
        let mut matchings = Vec::new();
        all_matchings(&(0..colors.len()).collect::<Vec<_>>(), &mut Vec::new(), &mut matchings);
        let crosses =
            |(a, b): (usize, usize), (c, d): (usize, usize)| (a < c && c < b && b < d) || (c < a && a < d && d < b);
        matchings
            .into_iter()
            .filter(|m| {
                m.iter().all(|&(a, b)| colors[a] != colors[b]) && m.iter().all(|&p| m.iter().all(|&q| !crosses(p, q)))
            })
            .count() as u64
    }

    fn seq(s: &str) -> ColorSeq {
        s.parse().unwrap()
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0), BigUint::from(1u32));
        assert_eq!(catalan(5), BigUint::from(42u32));
        assert_eq!(catalan(10), BigUint::from(16796u32));
        let mut table = CatalanTable::new();
        for n in 0..40 {
            assert_eq!(table.get(n), &catalan(n));
        }
    }

    #[test]
    fn worked_examples() {
        assert_eq!(count_one_sided(&seq("011001")), BigUint::from(2u32));
        assert_eq!(count_one_sided(&seq("1010")), BigUint::from(2u32));
        assert_eq!(count_one_sided(&seq("")), BigUint::from(1u32));
        assert_eq!(count_one_sided(&seq("11")), BigUint::zero());
    }

    #[test]
    fn unbalanced_and_odd_words_count_zero() {
        assert!(count_one_sided(&seq("110")).is_zero());
        assert!(count_one_sided(&seq("1101")).is_zero());
        assert!(count_one_sided(&seq("000111")).is_one());
    }

    #[test]
    fn alternating_words_give_catalan() {
        for m in 0..=8 {
            let s = ColorSeq::alternating(Color::White, 2 * m);
            assert_eq!(count_one_sided(&s), catalan(m), "m = {m}");
        }
    }

    #[test]
    fn nested_word_counts_one() {
        for m in 0..=8 {
            let s: ColorSeq =
                std::iter::repeat_n(Color::Black, m).chain(std::iter::repeat_n(Color::White, m)).collect();
            assert!(count_one_sided(&s).is_one(), "m = {m}");
        }
    }

    #[test]
    fn matches_brute_force_up_to_length_12() {
        for len in 0..=12usize {
            for mask in 0u32..(1 << len) {
                let s: ColorSeq = (0..len).map(|i| Color::from_bit(((mask >> i) & 1) as u8)).collect();
                let expected = brute_force(s.colors());
                assert_eq!(count_one_sided(&s), BigUint::from(expected), "{s}");
            }
        }
    }

    #[test]
    fn long_words_use_range_memo() {
        let s = ColorSeq::alternating(Color::Black, 80);
        assert_eq!(count_one_sided(&s), catalan(40));
        let toks: Vec<Token> = ColorSeq::alternating(Color::Black, 20).colors().iter().map(|&c| c.into()).collect();
        assert_eq!(count_long(&toks, Pairing::Bicolored), catalan(10));
    }

    #[test]
    fn uncolored_pairing_counts_all_matchings() {
        let mut c = ArchCounter::new(Pairing::Uncolored);
        for m in 0..=10 {
            let w = Word::from_tokens(&vec![Token::Black; 2 * m]).unwrap();
            assert_eq!(BigUint::from(c.count(w)), catalan(m));
        }
    }

    #[test]
    fn tags_pair_only_with_themselves() {
        let mut c = ArchCounter::new(Pairing::Bicolored);
        use Token::*;
        // A W B A: the tags must join, enclosing W B
        assert_eq!(c.count(Word::from_tokens(&[TagA, White, Black, TagA]).unwrap()), 1);
        // crossing tags can never be matched
        assert_eq!(c.count(Word::from_tokens(&[TagA, TagB, TagA, TagB]).unwrap()), 0);
        assert_eq!(c.count(Word::from_tokens(&[TagA, TagA, TagB, TagB]).unwrap()), 1);
        assert_eq!(c.count(Word::from_tokens(&[TagA, White]).unwrap()), 0);
    }

    #[test]
    fn word_packing() {
        use Token::*;
        let toks = [Black, White, TagA, TagB, White];
        let w = Word::from_tokens(&toks).unwrap();
        assert_eq!(w.tokens().collect::<Vec<_>>(), toks);
        assert_eq!(w.slice(1, 4).tokens().collect::<Vec<_>>(), &toks[1..4]);
        let front = Word::EMPTY.push_front(White).push_front(Black);
        assert_eq!(front.tokens().collect::<Vec<_>>(), [Black, White]);
        let full = Word::from_tokens(&[Black; 64]).unwrap();
        assert_eq!(full.slice(10, 64).len(), 54);
        assert_eq!(w.concat(front).len(), 7);
        assert!(Word::from_tokens(&[Black; 65]).is_none());
    }

    #[test]
    fn small_capacity_memo_still_exact() {
        let mut c = ArchCounter::with_capacity(Pairing::Bicolored, 4);
        let w = Word::from_tokens(&[Token::Black, Token::White].repeat(9)).unwrap();
        assert_eq!(BigUint::from(c.count(w)), catalan(9));
        assert!(c.memo_len() <= 4);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn color_seq(max: usize) -> impl Strategy<Value = ColorSeq> {
            prop::collection::vec(0u8..2, 0..=max).prop_map(|b| ColorSeq::from_bits(&b))
        }

        proptest! {
            #[test]
            fn complement_symmetry(s in color_seq(24)) {
                prop_assert_eq!(count_one_sided(&s), count_one_sided(&s.complement()));
            }

            #[test]
            fn reversal_symmetry(s in color_seq(24)) {
                prop_assert_eq!(count_one_sided(&s), count_one_sided(&s.reversed()));
            }

            #[test]
            fn unequal_colors_count_zero(s in color_seq(24)) {
                if s.count(Color::Black) != s.count(Color::White) {
                    prop_assert!(count_one_sided(&s).is_zero());
                }
            }

            #[test]
            fn packed_and_range_memo_agree(s in color_seq(30)) {
                let toks: Vec<Token> = s.colors().iter().map(|&c| c.into()).collect();
                prop_assert_eq!(count_one_sided(&s), count_long(&toks, Pairing::Bicolored));
            }
        }
    }
}
