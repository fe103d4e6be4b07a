//! The six configuration families and their cubic analogues.
//!
//! Every family is drawn as a line of alternating vertices completed by
//! noncrossing arches. Defects are encoded as *stubs* (an unvisited
//! univalent vertex that consumes the free half-edge of its host) and
//! *pass-throughs* (an unvisited bivalent vertex, realized as a same-color
//! arch between its two hosts).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arch::{Color, Token, Word};
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EnsembleTag {
    Z,
    Y,
    X,
    W,
    V,
    U,
}

impl EnsembleTag {
    pub const ALL: [EnsembleTag; 6] =
        [EnsembleTag::Z, EnsembleTag::Y, EnsembleTag::X, EnsembleTag::W, EnsembleTag::V, EnsembleTag::U];

    pub fn letter(self) -> char {
        match self {
            EnsembleTag::Z => 'z',
            EnsembleTag::Y => 'y',
            EnsembleTag::X => 'x',
            EnsembleTag::W => 'w',
            EnsembleTag::V => 'v',
            EnsembleTag::U => 'u',
        }
    }
}

impl FromStr for EnsembleTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z" => Ok(EnsembleTag::Z),
            "y" => Ok(EnsembleTag::Y),
            "x" => Ok(EnsembleTag::X),
            "w" => Ok(EnsembleTag::W),
            "v" => Ok(EnsembleTag::V),
            "u" => Ok(EnsembleTag::U),
            other => Err(Error::Parse(format!("unknown ensemble {other:?}"))),
        }
    }
}

impl fmt::Display for EnsembleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A family together with whether vertex colors are enforced
/// (`colored = true` for bicubic maps, `false` for cubic maps).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EnsembleId {
    pub tag: EnsembleTag,
    pub colored: bool,
}

impl EnsembleId {
    pub fn bicubic(tag: EnsembleTag) -> Self {
        EnsembleId { tag, colored: true }
    }

    pub fn cubic(tag: EnsembleTag) -> Self {
        EnsembleId { tag, colored: false }
    }

    pub fn all() -> impl Iterator<Item = EnsembleId> {
        EnsembleTag::ALL.into_iter().flat_map(|tag| [EnsembleId::bicubic(tag), EnsembleId::cubic(tag)])
    }
}

impl fmt::Display for EnsembleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.colored {
            write!(f, "{}", self.tag)
        } else {
            write!(f, "{} (cubic)", self.tag)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LineTopology {
    /// The line closes through infinity; arches stay on their side.
    InfiniteLine,
    /// A finite segment whose right end arches may wind around.
    Segment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Up,
    Down,
}

/// Role of a vertex on the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    /// Trivalent vertex inside the line: one free half-edge.
    Interior,
    /// Trivalent segment endpoint: two free half-edges.
    TrivalentEnd,
    /// Univalent segment endpoint: no free half-edge.
    UnivalentEnd,
}

impl VertexKind {
    pub fn free_half_edges(self) -> usize {
        match self {
            VertexKind::Interior => 1,
            VertexKind::TrivalentEnd => 2,
            VertexKind::UnivalentEnd => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LineVertex {
    pub color: Color,
    pub kind: VertexKind,
}

/// Where a defect attaches to the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Anchoring {
    /// Above the first vertex of the line; pass-throughs join it to one more
    /// vertex of the same color, also above.
    FirstVertexAbove,
    /// Any vertex of the given host color (any vertex at all for cubic
    /// maps), on either side; pass-throughs take any pair of such vertices.
    AnyHost { host: Color },
}

/// An unvisited defect vertex of the given color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Defect {
    pub color: Color,
    pub anchoring: Anchoring,
}

/// Declarative description of one ensemble.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub id: EnsembleId,
    pub line_topology: LineTopology,
    pub stubs: Vec<Defect>,
    pub pass_throughs: Vec<Defect>,
    /// Arches may pass to the right of the segment's right endpoint.
    pub winding: bool,
    pub symmetry_divisor: u64,
}

pub fn spec_for(id: EnsembleId) -> EnsembleSpec {
    use Anchoring::*;
    use EnsembleTag::*;
    let (line_topology, winding) = match id.tag {
        Y | X => (LineTopology::Segment, true),
        _ => (LineTopology::InfiniteLine, false),
    };
    let (stubs, pass_throughs, symmetry_divisor) = match id.tag {
        Z | Y | X => (vec![], vec![], 1),
        W => (
            vec![
                Defect { color: Color::Black, anchoring: FirstVertexAbove },
                Defect { color: Color::White, anchoring: AnyHost { host: Color::Black } },
            ],
            vec![],
            2,
        ),
        V => (
            vec![],
            vec![
                Defect { color: Color::Black, anchoring: FirstVertexAbove },
                Defect { color: Color::White, anchoring: AnyHost { host: Color::Black } },
            ],
            1,
        ),
        U => (
            vec![
                Defect { color: Color::White, anchoring: AnyHost { host: Color::Black } },
                Defect { color: Color::White, anchoring: AnyHost { host: Color::Black } },
            ],
            vec![Defect { color: Color::Black, anchoring: FirstVertexAbove }],
            4,
        ),
    };
    EnsembleSpec { id, line_topology, stubs, pass_throughs, winding, symmetry_divisor }
}

impl EnsembleSpec {
    /// Smallest N at which the family is defined (and nonempty).
    pub fn min_n(&self) -> usize {
        match self.id.tag {
            EnsembleTag::Y | EnsembleTag::X => 0,
            EnsembleTag::Z | EnsembleTag::W => 1,
            EnsembleTag::V | EnsembleTag::U => 2,
        }
    }

    pub fn check_size(&self, n: usize) -> Result<(), Error> {
        if n < self.min_n() {
            return Err(Error::SizeBelowMinimum { ensemble: self.id, n, min: self.min_n() });
        }
        Ok(())
    }

    /// Color of the first line vertex.
    pub fn first_color(&self) -> Color {
        match self.id.tag {
            EnsembleTag::Z | EnsembleTag::Y | EnsembleTag::X => Color::Black,
            _ => Color::White,
        }
    }

    /// The vertices of the line, left to right.
    pub fn line_vertices(&self, n: usize) -> Vec<LineVertex> {
        let first = self.first_color();
        match self.id.tag {
            EnsembleTag::Y | EnsembleTag::X => {
                let end =
                    if self.id.tag == EnsembleTag::Y { VertexKind::TrivalentEnd } else { VertexKind::UnivalentEnd };
                let len = 2 * n + 2;
                (0..len)
                    .map(|i| LineVertex {
                        color: Color::alternating(first, i),
                        kind: if i == 0 || i + 1 == len { end } else { VertexKind::Interior },
                    })
                    .collect()
            }
            _ => (0..2 * n)
                .map(|i| LineVertex { color: Color::alternating(first, i), kind: VertexKind::Interior })
                .collect(),
        }
    }

    /// Number of ordinary (bicolored) arches.
    pub fn arch_count(&self, n: usize) -> usize {
        match self.id.tag {
            EnsembleTag::Z | EnsembleTag::X => n,
            EnsembleTag::Y => n + 2,
            EnsembleTag::W => n - 1,
            EnsembleTag::V | EnsembleTag::U => n - 2,
        }
    }

    /// Free half-edges on the line, against the consumption by arches,
    /// stubs and pass-throughs.
    pub fn half_edge_budget(&self, n: usize) -> (usize, usize) {
        let free = self.line_vertices(n).iter().map(|v| v.kind.free_half_edges()).sum();
        let used = 2 * self.arch_count(n) + self.stubs.len() + 2 * self.pass_throughs.len();
        (free, used)
    }

    fn hosts(&self, vertices: &[LineVertex], host: Color, taken: &[usize]) -> Vec<usize> {
        (1..vertices.len())
            .filter(|i| !taken.contains(i))
            .filter(|&i| !self.id.colored || vertices[i].color == host)
            .collect()
    }

    /// Every placement of the defects on the line for size `n`, each as a
    /// line of slots ready for the up-down engine. Placements that differ
    /// only by flipping a stub up or down are merged into `multiplicity`.
    pub fn decorations(&self, n: usize) -> Vec<DecoratedLine> {
        let vertices = self.line_vertices(n);
        let base_slot = |v: &LineVertex| -> Slot {
            let t = Token::from(v.color);
            match v.kind {
                VertexKind::Interior => Slot::Free(t),
                VertexKind::TrivalentEnd => Slot::Both(t),
                VertexKind::UnivalentEnd => Slot::Removed,
            }
        };
        let mut slots: Vec<Slot> = vertices.iter().map(base_slot).collect();
        let mut middle = Word::EMPTY;
        if self.line_topology == LineTopology::Segment {
            // the right endpoint's free half-edges face the winding region
            let last = vertices.len() - 1;
            for _ in 0..vertices[last].kind.free_half_edges() {
                middle = middle.push(Token::from(vertices[last].color));
            }
            slots[last] = Slot::Removed;
        }
        let plain = DecoratedLine { slots, middle, winding: self.winding, multiplicity: 1 };

        let mut out = vec![plain];
        // pass-throughs first: they fix sides and tags
        for (k, pass) in self.pass_throughs.iter().enumerate() {
            let tag = if k == 0 { Token::TagA } else { Token::TagB };
            let mut next = Vec::new();
            for line in &out {
                let taken = line.taken();
                match pass.anchoring {
                    Anchoring::FirstVertexAbove => {
                        let partner_color = vertices[0].color;
                        for w in self.hosts(&vertices, partner_color, &taken) {
                            let mut l = line.clone();
                            l.slots[0] = Slot::Fixed(Side::Up, tag);
                            l.slots[w] = Slot::Fixed(Side::Up, tag);
                            next.push(l);
                        }
                    }
                    Anchoring::AnyHost { host } => {
                        let hosts = self.hosts(&vertices, host, &taken);
                        for (i, &a) in hosts.iter().enumerate() {
                            for &b in &hosts[i + 1..] {
                                for side in [Side::Up, Side::Down] {
                                    let mut l = line.clone();
                                    l.slots[a] = Slot::Fixed(side, tag);
                                    l.slots[b] = Slot::Fixed(side, tag);
                                    if !l.tags_cross() {
                                        next.push(l);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            out = next;
        }
        // stubs: unordered placements, each either side
        let movable = self.stubs.iter().filter(|s| matches!(s.anchoring, Anchoring::AnyHost { .. })).count();
        for stub in &self.stubs {
            if stub.anchoring == Anchoring::FirstVertexAbove {
                for l in &mut out {
                    l.slots[0] = Slot::Removed;
                }
            }
        }
        if movable > 0 {
            let host = self
                .stubs
                .iter()
                .find_map(|s| match s.anchoring {
                    Anchoring::AnyHost { host } => Some(host),
                    _ => None,
                })
                .unwrap();
            let mut next = Vec::new();
            for line in &out {
                let hosts = self.hosts(&vertices, host, &line.taken());
                for combo in combinations(&hosts, movable) {
                    let mut l = line.clone();
                    for &h in &combo {
                        l.slots[h] = Slot::Removed;
                    }
                    l.multiplicity <<= movable;
                    next.push(l);
                }
            }
            out = next;
        }
        if !self.id.colored {
            for l in &mut out {
                l.uncolor();
            }
        }
        out
    }
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// What a line vertex contributes to the arch words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    /// Ordinary vertex; its arch goes up or down.
    Free(Token),
    /// Pass-through endpoint on a fixed side.
    Fixed(Side, Token),
    /// Trivalent segment start: one arch up and one down.
    Both(Token),
    /// No arch: a stub host, or a univalent endpoint.
    Removed,
}

/// One placement of all defects, as seen by the up-down engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedLine {
    pub slots: Vec<Slot>,
    /// Tokens of the segment's right endpoint, between the upper and the
    /// lower arches of the boundary word.
    pub middle: Word,
    pub winding: bool,
    /// Number of raw configurations per arch system (stub flips).
    pub multiplicity: u64,
}

impl DecoratedLine {
    fn taken(&self) -> Vec<usize> {
        self.slots.iter().enumerate().filter(|(_, s)| matches!(s, Slot::Fixed(..))).map(|(i, _)| i).collect()
    }

    /// True when two pass-throughs on the same side interleave.
    fn tags_cross(&self) -> bool {
        for side in [Side::Up, Side::Down] {
            let seq: Vec<Token> = self
                .slots
                .iter()
                .filter_map(|s| match s {
                    Slot::Fixed(sd, t) if *sd == side => Some(*t),
                    _ => None,
                })
                .collect();
            if seq.len() == 4 && seq[0] != seq[1] && seq[0] == seq[2] {
                return true;
            }
        }
        false
    }

    /// Drops color information: every untagged position becomes the same
    /// plain token.
    fn uncolor(&mut self) {
        let plain = |t: Token| if t.is_tag() { t } else { Token::Black };
        for s in &mut self.slots {
            *s = match *s {
                Slot::Free(t) => Slot::Free(plain(t)),
                Slot::Fixed(side, t) => Slot::Fixed(side, plain(t)),
                Slot::Both(t) => Slot::Both(plain(t)),
                Slot::Removed => Slot::Removed,
            };
        }
        self.middle = self.middle.tokens().fold(Word::EMPTY, |w, t| w.push(plain(t)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_spec() {
        let s = spec_for(EnsembleId::bicubic(EnsembleTag::Z));
        assert_eq!(s.line_topology, LineTopology::InfiniteLine);
        assert_eq!(s.line_vertices(3).len(), 6);
        assert_eq!(s.arch_count(3), 3);
        assert!(s.stubs.is_empty() && s.pass_throughs.is_empty());
        assert_eq!(s.symmetry_divisor, 1);
    }

    #[test]
    fn y_spec() {
        let s = spec_for(EnsembleId::bicubic(EnsembleTag::Y));
        assert_eq!(s.line_topology, LineTopology::Segment);
        assert_eq!(s.line_vertices(4).len(), 10);
        assert_eq!(s.arch_count(4), 6);
        assert!(s.winding);
        assert_eq!(s.symmetry_divisor, 1);
    }

    #[test]
    fn u_spec() {
        let s = spec_for(EnsembleId::bicubic(EnsembleTag::U));
        assert_eq!(s.line_topology, LineTopology::InfiniteLine);
        assert_eq!(s.line_vertices(5).len(), 10);
        assert_eq!(s.arch_count(5), 3);
        assert_eq!(s.pass_throughs.len(), 1);
        assert_eq!(s.stubs.len(), 2);
        assert!(s.stubs.iter().all(|d| d.color == Color::White));
        assert_eq!(s.symmetry_divisor, 4);
    }

    #[test]
    fn half_edge_budget_balances() {
        for id in EnsembleId::all() {
            let s = spec_for(id);
            for n in s.min_n()..12 {
                let (free, used) = s.half_edge_budget(n);
                assert_eq!(free, used, "{id} at N = {n}");
            }
        }
    }

    #[test]
    fn divisors() {
        let d: Vec<u64> = EnsembleTag::ALL.iter().map(|&t| spec_for(EnsembleId::bicubic(t)).symmetry_divisor).collect();
        assert_eq!(d, [1, 1, 1, 2, 1, 4]);
    }

    #[test]
    fn decorations_respect_hosts() {
        let s = spec_for(EnsembleId::bicubic(EnsembleTag::W));
        let lines = s.decorations(3);
        // one movable white stub on any of the three black vertices
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|l| l.multiplicity == 2));
        assert!(lines.iter().all(|l| l.slots[0] == Slot::Removed));

        let s = spec_for(EnsembleId::cubic(EnsembleTag::W));
        assert_eq!(s.decorations(3).len(), 5);

        let s = spec_for(EnsembleId::bicubic(EnsembleTag::U));
        let lines = s.decorations(3);
        // partner white in {2, 4}, then two of the three black hosts
        assert_eq!(lines.len(), 2 * 3);
        assert!(lines.iter().all(|l| l.multiplicity == 4));
    }

    #[test]
    fn crossing_pass_throughs_are_skipped() {
        let s = spec_for(EnsembleId::bicubic(EnsembleTag::V));
        for l in s.decorations(4) {
            assert!(!l.tags_cross());
        }
    }

    #[test]
    fn segment_middle_tokens() {
        let y = spec_for(EnsembleId::bicubic(EnsembleTag::Y)).decorations(2);
        assert_eq!(y.len(), 1);
        assert_eq!(y[0].middle.tokens().collect::<Vec<_>>(), [Token::White, Token::White]);
        assert_eq!(y[0].slots[0], Slot::Both(Token::Black));
        let x = spec_for(EnsembleId::bicubic(EnsembleTag::X)).decorations(2);
        assert!(x[0].middle.is_empty());
        assert_eq!(x[0].slots[0], Slot::Removed);
    }

    #[test]
    fn parse_tags() {
        assert_eq!("v".parse::<EnsembleTag>().unwrap(), EnsembleTag::V);
        assert!("q".parse::<EnsembleTag>().is_err());
    }
}
