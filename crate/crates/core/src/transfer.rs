//! Left-to-right transfer matrix over the stacks of open arches above and
//! below the line.
//!
//! A stack `a_1..a_p` of arch colors, `a_1` the innermost (most recently
//! opened), is stored as the integer `2^p + sum a_i 2^(i-1)`; the empty stack
//! is `1`. Opening an arch of color `c` maps `n` to `2n + c`; closing the
//! innermost arch maps `n` to `n / 2` (white innermost) or `(n - 1) / 2`
//! (black innermost).

use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::arch::{Color, Pairing, Token, Word};
use crate::ensemble::{spec_for, EnsembleId, EnsembleSpec, EnsembleTag, LineTopology};
use crate::error::{Error, Result};
use crate::updown::divide_exact;

/// Deepest stack one side of an [`ArchState`] can hold.
pub const MAX_DEPTH: usize = 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArchState {
    pub n_u: u64,
    pub n_d: u64,
}

impl ArchState {
    pub const EMPTY: ArchState = ArchState { n_u: 1, n_d: 1 };

    pub fn upper(self) -> Vec<Color> {
        decode_stack(self.n_u)
    }

    pub fn lower(self) -> Vec<Color> {
        decode_stack(self.n_d)
    }

    pub fn depth(self) -> (usize, usize) {
        (stack_depth(self.n_u), stack_depth(self.n_d))
    }

    pub fn mirrored(self) -> ArchState {
        ArchState { n_u: self.n_d, n_d: self.n_u }
    }
}

#[inline]
fn stack_depth(code: u64) -> usize {
    63 - code.leading_zeros() as usize
}

/// Encodes the two stacks, innermost arch first.
pub fn encode_state(upper: &[Color], lower: &[Color]) -> Result<ArchState> {
    Ok(ArchState { n_u: encode_stack(upper)?, n_d: encode_stack(lower)? })
}

fn encode_stack(stack: &[Color]) -> Result<u64> {
    if stack.len() > MAX_DEPTH {
        return Err(Error::StackTooDeep { depth: stack.len(), limit: MAX_DEPTH });
    }
    Ok(stack.iter().enumerate().fold(1u64 << stack.len(), |n, (i, c)| n | (c.bit() as u64) << i))
}

fn decode_stack(code: u64) -> Vec<Color> {
    (0..stack_depth(code)).map(|i| Color::from_bit(((code >> i) & 1) as u8)).collect()
}

#[inline]
fn open(code: u64, color: Color) -> u64 {
    2 * code + color.bit() as u64
}

/// Closes the innermost arch against a vertex of `color`, if allowed.
#[inline]
fn close(code: u64, color: Color, pairing: Pairing) -> Option<u64> {
    if code < 2 {
        return None;
    }
    let innermost = (code & 1) as u8;
    match pairing {
        Pairing::Bicolored if innermost == color.bit() => None,
        _ => Some(code >> 1),
    }
}

/// Sparse amplitude vector over arch states.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StateVector {
    weights: FxHashMap<ArchState, u128>,
}

impl StateVector {
    pub fn unit(state: ArchState) -> Self {
        let mut weights = FxHashMap::default();
        weights.insert(state, 1);
        StateVector { weights }
    }

    pub fn get(&self, state: ArchState) -> u128 {
        self.weights.get(&state).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ArchState, u128)> + '_ {
        self.weights.iter().map(|(&s, &w)| (s, w))
    }

    pub fn total(&self) -> u128 {
        self.weights.values().fold(0u128, |a, &w| a.checked_add(w).expect("state mass overflowed u128"))
    }

    fn add(&mut self, state: ArchState, w: u128) {
        let slot = self.weights.entry(state).or_insert(0);
        *slot = slot.checked_add(w).expect("state weight overflowed u128");
    }

    fn merge(mut self, other: StateVector) -> StateVector {
        let (big, small) = if self.len() >= other.len() {
            (&mut self, other)
        } else {
            let mut o = other;
            std::mem::swap(&mut self, &mut o);
            (&mut self, o)
        };
        for (s, w) in small.weights {
            big.add(s, w);
        }
        self
    }
}

impl FromIterator<(ArchState, u128)> for StateVector {
    fn from_iter<I: IntoIterator<Item = (ArchState, u128)>>(iter: I) -> Self {
        let mut v = StateVector::default();
        for (s, w) in iter {
            if w > 0 {
                v.add(s, w);
            }
        }
        v
    }
}

/// Vertex count above which a step is split across rayon workers.
const PARALLEL_THRESHOLD: usize = 1 << 16;

fn successors(s: ArchState, color: Color, pairing: Pairing, mut emit: impl FnMut(ArchState)) {
    emit(ArchState { n_u: open(s.n_u, color), n_d: s.n_d });
    emit(ArchState { n_u: s.n_u, n_d: open(s.n_d, color) });
    if let Some(u) = close(s.n_u, color, pairing) {
        emit(ArchState { n_u: u, n_d: s.n_d });
    }
    if let Some(d) = close(s.n_d, color, pairing) {
        emit(ArchState { n_u: s.n_u, n_d: d });
    }
}

/// Applies one trivalent vertex of the given color: its free half-edge opens
/// a new arch or closes the innermost one, above or below.
pub fn step(v: &StateVector, color: Color) -> StateVector {
    step_with(v, color, Pairing::Bicolored, usize::MAX)
}

/// [`step`] with a pairing rule and a bound on the total open arches kept.
pub fn step_with(v: &StateVector, color: Color, pairing: Pairing, max_open: usize) -> StateVector {
    step_filtered(v, color, pairing, |p, q| p + q <= max_open)
}

/// [`step`] keeping only successors whose stack depths pass `keep`.
fn step_filtered(
    v: &StateVector,
    color: Color,
    pairing: Pairing,
    keep_depths: impl Fn(usize, usize) -> bool + Sync,
) -> StateVector {
    let keep = |s: &ArchState| {
        let (p, q) = s.depth();
        keep_depths(p, q)
    };
    let fold_one = |mut acc: StateVector, (&s, &w): (&ArchState, &u128)| {
        successors(s, color, pairing, |t| {
            if keep(&t) {
                acc.add(t, w)
            }
        });
        acc
    };
    if v.len() < PARALLEL_THRESHOLD || rayon::current_num_threads() == 1 {
        v.weights.iter().fold(StateVector::default(), fold_one)
    } else {
        v.weights.par_iter().fold(StateVector::default, fold_one).reduce(StateVector::default, StateVector::merge)
    }
}

/// Number of ways to close the open arches of a segment around its right
/// end, with `middle` the right endpoint's own free half-edges. Two arches
/// left open on the same side may not be joined: that arch would already
/// have been closed by the sweep.
pub fn close_segment_with(s: ArchState, middle: Word, pairing: Pairing) -> u128 {
    // boundary word: upper outer->inner, middle, lower inner->outer
    let upper = s.upper();
    let lower = s.lower();
    let mut tokens: Vec<(Token, u8)> = Vec::with_capacity(upper.len() + middle.len() + lower.len());
    tokens.extend(upper.iter().rev().map(|&c| (Token::from(c), 0)));
    tokens.extend(middle.tokens().map(|t| (t, 1)));
    tokens.extend(lower.iter().map(|&c| (Token::from(c), 2)));
    let len = tokens.len();
    if len % 2 == 1 {
        return 0;
    }
    let joinable = |a: (Token, u8), b: (Token, u8)| !(a.1 == b.1 && a.1 != 1) && pairing.allows(a.0, b.0);
    // interval counts, table[lo][hi] for the half-open range lo..hi
    let mut table = vec![vec![0u128; len + 1]; len + 1];
    for lo in (0..=len).rev() {
        table[lo][lo] = 1;
        for hi in (lo + 2..=len).step_by(2) {
            let mut total = 0u128;
            for j in (lo + 1..hi).step_by(2) {
                if joinable(tokens[lo], tokens[j]) {
                    let inner = table[lo + 1][j];
                    if inner != 0 {
                        total = total
                            .checked_add(inner.checked_mul(table[j + 1][hi]).expect("closure overflowed u128"))
                            .expect("closure overflowed u128");
                    }
                }
            }
            table[lo][hi] = total;
        }
    }
    table[0][len]
}

/// Closures of a bicolored segment with no arches from the right endpoint.
pub fn close_segment(s: ArchState) -> BigUint {
    BigUint::from(close_segment_with(s, Word::EMPTY, Pairing::Bicolored))
}

fn pairing_of(spec: &EnsembleSpec) -> Pairing {
    if spec.id.colored {
        Pairing::Bicolored
    } else {
        Pairing::Uncolored
    }
}

/// Exact count of a Z, Y, X or W family (bicolored or cubic) by transfer
/// matrix.
pub fn tm_enumerate(spec: &EnsembleSpec, n: usize) -> Result<BigUint> {
    spec.check_size(n)?;
    match spec.id.tag {
        EnsembleTag::Z => closed_line(spec, n),
        EnsembleTag::Y | EnsembleTag::X => segment(spec, n),
        EnsembleTag::W => stubbed_line(spec, n),
        _ => Err(Error::UnsupportedEnsemble { engine: "transfer matrix", ensemble: spec.id }),
    }
}

pub fn tm_count(id: EnsembleId, n: usize) -> Result<BigUint> {
    tm_enumerate(&spec_for(id), n)
}

fn closed_line(spec: &EnsembleSpec, n: usize) -> Result<BigUint> {
    let pairing = pairing_of(spec);
    let len = 2 * n;
    check_depth(n)?;
    let mut v = StateVector::unit(ArchState::EMPTY);
    for (k, c) in spec.line_vertices(n).iter().enumerate() {
        v = step_with(&v, c.color, pairing, len - k - 1);
    }
    Ok(BigUint::from(v.get(ArchState::EMPTY)))
}

fn segment(spec: &EnsembleSpec, n: usize) -> Result<BigUint> {
    let pairing = pairing_of(spec);
    let vertices = spec.line_vertices(n);
    check_depth(vertices.len())?;
    let first = vertices[0];
    let last = *vertices.last().unwrap();
    let mut v = StateVector::unit(ArchState::EMPTY);
    if first.kind.free_half_edges() == 2 {
        let t = open(1, first.color);
        v = StateVector::unit(ArchState { n_u: t, n_d: t });
    }
    let mut middle = Word::EMPTY;
    for _ in 0..last.kind.free_half_edges() {
        middle = middle.push(Token::from(last.color));
    }
    // open arches only join across sides or through the right endpoint, so
    // the two stacks must end within `middle.len()` of each other
    let interior = &vertices[1..vertices.len() - 1];
    for (k, vx) in interior.iter().enumerate() {
        let slack = middle.len() + interior.len() - k - 1;
        v = step_filtered(&v, vx.color, pairing, |p, q| p.abs_diff(q) <= slack);
    }
    let mut total: u128 = 0;
    for (s, w) in v.iter() {
        let c = close_segment_with(s, middle, pairing);
        total = total
            .checked_add(w.checked_mul(c).ok_or_else(|| Error::Overflow("segment closure".into()))?)
            .ok_or_else(|| Error::Overflow("segment total".into()))?;
    }
    debug_assert_eq!(spec.line_topology, LineTopology::Segment);
    Ok(BigUint::from(total))
}

/// W: the first vertex carries the anchored stub, and one later vertex of
/// the stub's host color carries the movable one (either side, weight 2).
fn stubbed_line(spec: &EnsembleSpec, n: usize) -> Result<BigUint> {
    let pairing = pairing_of(spec);
    let vertices = spec.line_vertices(n);
    let len = vertices.len();
    check_depth(len)?;
    let host = Color::Black;
    // amplitudes before and after the movable stub has been placed
    let mut pending = StateVector::unit(ArchState::EMPTY);
    let mut placed = StateVector::default();
    for (k, vx) in vertices.iter().enumerate().skip(1) {
        let remaining = len - k - 1;
        let mut next_placed = step_with(&placed, vx.color, pairing, remaining);
        if !spec.id.colored || vx.color == host {
            let moved: StateVector = pending.iter().map(|(s, w)| (s, 2 * w)).collect();
            next_placed = next_placed.merge(moved);
        }
        pending = step_with(&pending, vx.color, pairing, remaining + 1);
        placed = next_placed;
    }
    let raw = placed.get(ArchState::EMPTY);
    divide_exact(spec.id, n, raw, spec.symmetry_divisor)
}

fn check_depth(vertices: usize) -> Result<()> {
    if vertices > 2 * MAX_DEPTH {
        return Err(Error::StackTooDeep { depth: vertices / 2, limit: MAX_DEPTH });
    }
    Ok(())
}

/// Progress of one sweep step of the meet-in-the-middle run.
#[derive(Clone, Copy, Debug)]
pub struct SweepProgress {
    pub step: usize,
    pub of: usize,
    pub states: usize,
    pub elapsed_secs: f64,
}

/// Closed-line count through the middle of the line: the right half, read
/// backwards with colors exchanged, is the left half again, so the count is
/// the sum of squared amplitudes after `n` vertices. Up/down mirror pairs
/// are stored once and states are packed into a single `u64`.
pub fn z_meet_in_middle(n: usize, mut progress: impl FnMut(SweepProgress)) -> Result<BigUint> {
    if n == 0 {
        return Ok(BigUint::from(1u8));
    }
    if n > 31 {
        return Err(Error::StackTooDeep { depth: n, limit: 31 });
    }
    let start = Instant::now();
    let pack = |u: u64, d: u64| -> u64 {
        let (a, b) = if u <= d { (u, d) } else { (d, u) };
        (a << 32) | b
    };
    let mut cur: Vec<(u64, u64)> = vec![(pack(1, 1), 1)];
    for k in 0..n {
        let color = Color::alternating(Color::Black, k);
        let max_open = 2 * n - k - 1;
        let mut next: FxHashMap<u64, u64> = FxHashMap::default();
        next.reserve(cur.len() * 2);
        let mut push = |u: u64, d: u64, w: u64| -> Result<()> {
            if stack_depth(u) + stack_depth(d) > max_open {
                return Ok(());
            }
            // only an asymmetric source reaches a symmetric target, and its
            // mirror image reaches the same target
            let w = if u == d { w.checked_mul(2) } else { Some(w) }
                .ok_or_else(|| Error::Overflow("half-line amplitude".into()))?;
            let slot = next.entry(pack(u, d)).or_insert(0);
            *slot = slot.checked_add(w).ok_or_else(|| Error::Overflow("half-line amplitude".into()))?;
            Ok(())
        };
        for (key, w) in cur.drain(..) {
            let (u, d) = (key >> 32, key & 0xffff_ffff);
            let symmetric = u == d;
            push(open(u, color), d, w)?;
            if let Some(nu) = close(u, color, Pairing::Bicolored) {
                push(nu, d, w)?;
            }
            if !symmetric {
                push(u, open(d, color), w)?;
                if let Some(nd) = close(d, color, Pairing::Bicolored) {
                    push(u, nd, w)?;
                }
            }
        }
        cur = next.into_iter().collect();
        progress(SweepProgress { step: k + 1, of: n, states: cur.len(), elapsed_secs: start.elapsed().as_secs_f64() });
    }
    let mut total: u128 = 0;
    for (key, w) in cur {
        let sq = (w as u128) * (w as u128);
        let mult = if key >> 32 == key & 0xffff_ffff { 1 } else { 2 };
        total = total.checked_add(sq * mult).ok_or_else(|| Error::Overflow("sum of squared amplitudes".into()))?;
    }
    Ok(BigUint::from(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Color::{Black as B, White as W};

    fn bic(tag: EnsembleTag, n: usize) -> u128 {
        u128::try_from(tm_count(EnsembleId::bicubic(tag), n).unwrap()).unwrap()
    }

    #[test]
    fn encoding_examples() {
        assert_eq!(encode_state(&[], &[]).unwrap(), ArchState { n_u: 1, n_d: 1 });
        assert_eq!(encode_state(&[B], &[]).unwrap(), ArchState { n_u: 3, n_d: 1 });
        assert_eq!(encode_state(&[W, B], &[]).unwrap(), ArchState { n_u: 6, n_d: 1 });
    }

    #[test]
    fn encoding_round_trip() {
        for bits in 0u32..(1 << 10) {
            for len in 0..=10 {
                let stack: Vec<Color> = (0..len).map(|i| Color::from_bit(((bits >> i) & 1) as u8)).collect();
                let s = encode_state(&stack, &stack[..len / 2]).unwrap();
                assert_eq!(s.upper(), stack);
                assert_eq!(s.lower(), stack[..len / 2].to_vec());
            }
        }
        let deep = vec![B; 30];
        let s = encode_state(&deep, &deep).unwrap();
        assert_eq!(s.upper(), deep);
    }

    #[test]
    fn too_deep_is_an_error() {
        let deep = vec![W; MAX_DEPTH + 1];
        assert!(matches!(encode_state(&deep, &[]), Err(Error::StackTooDeep { .. })));
        assert!(encode_state(&deep[1..], &[]).is_ok());
    }

    #[test]
    fn step_examples() {
        let v = step(&StateVector::unit(ArchState::EMPTY), B);
        let want: StateVector =
            [(ArchState { n_u: 3, n_d: 1 }, 1), (ArchState { n_u: 1, n_d: 3 }, 1)].into_iter().collect();
        assert_eq!(v, want);

        let v = step(&StateVector::unit(ArchState { n_u: 3, n_d: 1 }), W);
        let want: StateVector =
            [(ArchState { n_u: 6, n_d: 1 }, 1), (ArchState { n_u: 3, n_d: 2 }, 1), (ArchState { n_u: 1, n_d: 1 }, 1)]
                .into_iter()
                .collect();
        assert_eq!(v, want);
    }

    #[test]
    fn step_mass_grows_at_most_fourfold() {
        let mut v = StateVector::unit(ArchState::EMPTY);
        for k in 0..12 {
            let next = step(&v, Color::alternating(B, k));
            assert!(next.total() <= 4 * v.total());
            v = next;
        }
    }

    #[test]
    fn closure_examples() {
        assert_eq!(close_segment(ArchState::EMPTY), BigUint::from(1u8));
        assert_eq!(close_segment(encode_state(&[B], &[W]).unwrap()), BigUint::from(1u8));
        assert_eq!(close_segment(encode_state(&[B, B], &[]).unwrap()), BigUint::from(0u8));
        // same-side arches never join at the end
        assert_eq!(close_segment(encode_state(&[B, W], &[]).unwrap()), BigUint::from(0u8));
    }

    #[test]
    fn table_values() {
        assert_eq!(bic(EnsembleTag::Z, 2), 8);
        assert_eq!(bic(EnsembleTag::Z, 5), 1424);
        assert_eq!(bic(EnsembleTag::Y, 4), 2152);
        assert_eq!(bic(EnsembleTag::X, 3), 168);
        assert_eq!(bic(EnsembleTag::W, 6), 7160);
        assert_eq!(bic(EnsembleTag::Y, 0), 1);
        assert_eq!(bic(EnsembleTag::Y, 1), 6);
        assert_eq!(bic(EnsembleTag::X, 0), 1);
        assert_eq!(bic(EnsembleTag::W, 1), 1);
    }

    #[test]
    fn meet_in_middle_matches_full_sweep() {
        for n in 1..=10 {
            let full = bic(EnsembleTag::Z, n);
            let mid = u128::try_from(z_meet_in_middle(n, |_| {}).unwrap()).unwrap();
            assert_eq!(full, mid, "N = {n}");
        }
    }

    #[test]
    fn v_and_u_are_unsupported() {
        for tag in [EnsembleTag::V, EnsembleTag::U] {
            assert!(matches!(tm_count(EnsembleId::bicubic(tag), 3), Err(Error::UnsupportedEnsemble { .. })));
        }
    }

    #[test]
    fn replayed_stacks_match_prefix_colors() {
        // every open arch was opened by a vertex of its color, so the
        // multiset of open colors is bounded by the prefix
        let mut v = StateVector::unit(ArchState::EMPTY);
        for k in 0..10 {
            v = step(&v, Color::alternating(B, k));
            let blacks = (k + 2) / 2;
            let whites = k.div_ceil(2);
            for (s, _) in v.iter() {
                let open: Vec<Color> = s.upper().into_iter().chain(s.lower()).collect();
                assert!(open.iter().filter(|&&c| c == B).count() <= blacks);
                assert!(open.iter().filter(|&&c| c == W).count() <= whites);
                assert!(open.len() <= k + 1);
            }
        }
    }
}
