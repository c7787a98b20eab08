//! Index bookkeeping for the representative V(b): the sets I_(j), the maps η_j, κ, λ, η₁₅,
//! the block decomposition of I₊ and its partial order.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::geometry::bar;
use crate::invariants::{verify_relations, BInvariants, ThetaInvariants};

/// A block of the decomposition of I₊ = {i : e_i ∈ U₊}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    J(u8),
    Bar6,
    Bar8,
    Bar12,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::J(j) => write!(f, "{j}"),
            Block::Bar6 => write!(f, "6bar"),
            Block::Bar8 => write!(f, "8bar"),
            Block::Bar12 => write!(f, "12bar"),
        }
    }
}

impl Block {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "6bar" => Ok(Block::Bar6),
            "8bar" => Ok(Block::Bar8),
            "12bar" => Ok(Block::Bar12),
            t => {
                let j: u8 = t.parse().map_err(|_| Error::Parse(format!("bad block '{s}'")))?;
                if PLUS_BLOCKS.contains(&Block::J(j)) {
                    Ok(Block::J(j))
                } else {
                    Err(Error::Parse(format!("{j} is not a block of I+")))
                }
            }
        }
    }
}

pub const PLUS_BLOCKS: [Block; 14] = [
    Block::J(1),
    Block::J(2),
    Block::J(3),
    Block::J(7),
    Block::J(8),
    Block::J(10),
    Block::J(5),
    Block::J(9),
    Block::J(12),
    Block::J(13),
    Block::J(15),
    Block::Bar12,
    Block::Bar8,
    Block::Bar6,
];

/// Covering relations (smaller, larger) of the order on the blocks of I₊.
const EDGES: [(Block, Block); 18] = [
    (Block::J(1), Block::J(2)),
    (Block::J(1), Block::J(3)),
    (Block::J(3), Block::J(7)),
    (Block::J(2), Block::J(7)),
    (Block::J(7), Block::J(8)),
    (Block::J(8), Block::J(10)),
    (Block::J(3), Block::J(5)),
    (Block::J(7), Block::J(9)),
    (Block::J(5), Block::J(9)),
    (Block::J(9), Block::J(12)),
    (Block::J(8), Block::J(12)),
    (Block::J(12), Block::J(13)),
    (Block::J(10), Block::J(13)),
    (Block::J(13), Block::Bar12),
    (Block::J(15), Block::Bar12),
    (Block::J(12), Block::J(15)),
    (Block::Bar12, Block::Bar8),
    (Block::Bar8, Block::Bar6),
];

/// Comparable pairs with no plain transvection g_{i,k}(μ).
pub const EXCLUDED: [(Block, Block); 6] = [
    (Block::J(8), Block::J(12)),
    (Block::J(8), Block::J(15)),
    (Block::J(12), Block::J(15)),
    (Block::J(15), Block::Bar12),
    (Block::J(15), Block::Bar8),
    (Block::Bar12, Block::Bar8),
];

/// Strict order j ≺ j′ generated by the covering relations.
pub fn precedes(a: Block, b: Block) -> bool {
    if a == b {
        return false;
    }
    let mut stack = vec![a];
    let mut seen = vec![a];
    while let Some(x) = stack.pop() {
        for &(lo, hi) in EDGES.iter() {
            if lo == x && !seen.contains(&hi) {
                if hi == b {
                    return true;
                }
                seen.push(hi);
                stack.push(hi);
            }
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexLayout {
    pub theta: ThetaInvariants,
    pub b: BInvariants,
    /// I_(j) for j = 1..15 at position j-1.
    sets: Vec<Vec<usize>>,
    /// Coordinate-sets on which V splits; every index 1..2n lies in exactly one.
    pieces: Vec<Vec<usize>>,
    piece_of: Vec<usize>,
}

impl IndexLayout {
    pub fn new(theta: ThetaInvariants, b: BInvariants) -> Result<Self> {
        let bad = verify_relations(&b, &theta);
        if !bad.is_empty() {
            return Err(Error::BadInvariants(bad.join("; ")));
        }
        let t = theta;
        let g = |j: usize| b.get(j);
        let (a0, ap, d) = (t.a0, t.a_plus, t.d);
        let starts: [usize; 15] = [
            0,
            g(1),
            a0,
            a0 + ap,
            d,
            t.d_prime,
            a0 + g(3),
            a0 + g(3) + g(7),
            a0 + ap + g(4) + g(7),
            a0 + ap - g(10),
            d - g(11),
            d + g(5) + g(9),
            d + g(5) + g(9) + g(12) + g(15),
            d + t.a1,
            d + g(5) + g(9) + g(12),
        ];
        let sets: Vec<Vec<usize>> = (0..15).map(|j| (1..=b.b[j]).map(|k| starts[j] + k).collect()).collect();
        let mut layout = IndexLayout {
            theta,
            b,
            sets,
            pieces: Vec::new(),
            piece_of: Vec::new(),
        };
        layout.build_pieces()?;
        Ok(layout)
    }

    pub fn n(&self) -> usize {
        self.theta.n
    }

    fn bar(&self, i: usize) -> usize {
        bar(self.n(), i)
    }

    /// I_(j), 1 ≤ j ≤ 15.
    pub fn set(&self, j: usize) -> &[usize] {
        &self.sets[j - 1]
    }

    /// i(j,k), 1-based k.
    pub fn i(&self, j: usize, k: usize) -> usize {
        self.sets[j - 1][k - 1]
    }

    fn pos(&self, j: usize, i: usize) -> Result<usize> {
        self.set(j)
            .iter()
            .position(|&x| x == i)
            .map(|p| p + 1)
            .ok_or_else(|| Error::Domain(format!("{i} is not in I({j})")))
    }

    /// η_j for j ∈ {7, 8, 9, 13}.
    pub fn eta(&self, j: usize, i: usize) -> Result<usize> {
        let k = self.pos(j, i)?;
        let t = &self.theta;
        let g = |j: usize| self.b.get(j);
        Ok(match j {
            7 => t.a0 + t.a_plus + g(4) + k,
            8 => t.d_prime + g(6) + k,
            9 => t.d + g(5) + k,
            13 => t.d + t.a1 + g(14) + g(12) + k,
            _ => return Err(Error::Domain(format!("no map eta_{j}"))),
        })
    }

    pub fn kappa(&self, i: usize) -> Result<usize> {
        Ok(self.theta.d_prime + self.b.get(6) + self.b.get(8) + self.pos(12, i)?)
    }

    pub fn lambda(&self, i: usize) -> Result<usize> {
        Ok(self.theta.d + self.theta.a1 + self.b.get(14) + self.pos(12, i)?)
    }

    pub fn eta15(&self, i: usize) -> Result<usize> {
        let g = |j: usize| self.b.get(j);
        Ok(self.theta.d_prime + g(6) + g(8) + g(12) + g(13) + self.pos(15, i)?)
    }

    /// Index lists of the blocks of I₊, in increasing k.
    pub fn block(&self, blk: Block) -> Vec<usize> {
        match blk {
            Block::J(9) => self.set(9).iter().map(|&i| self.eta(9, i).expect("in I(9)")).collect(),
            Block::J(j) => self.set(j as usize).to_vec(),
            Block::Bar6 => {
                let s = self.set(6);
                (1..=s.len()).map(|k| self.bar(s[s.len() - k])).collect()
            }
            Block::Bar8 => {
                let s = self.set(8);
                (1..=s.len())
                    .map(|k| self.bar(self.eta(8, s[s.len() - k]).expect("in I(8)")))
                    .collect()
            }
            Block::Bar12 => {
                let s = self.set(12);
                (1..=s.len())
                    .map(|k| self.bar(self.kappa(s[s.len() - k]).expect("in I(12)")))
                    .collect()
            }
        }
    }

    /// The block of I₊ containing index i, if i ∈ I₊.
    pub fn block_of(&self, i: usize) -> Option<Block> {
        PLUS_BLOCKS.iter().copied().find(|&b| self.block(b).contains(&i))
    }

    /// I₊ in increasing order.
    pub fn plus_indices(&self) -> Vec<usize> {
        let t = &self.theta;
        (1..=t.a0 + t.a_plus).chain(t.d + 1..=t.d + t.a1).collect()
    }

    /// I₋ = {i : e_i ∈ U₋}.
    pub fn minus_indices(&self) -> Vec<usize> {
        let t = &self.theta;
        (1..=t.a0)
            .chain(t.a0 + t.a_plus + 1..=t.d)
            .chain(t.d_prime + 1..=t.d_prime + t.a1)
            .collect()
    }

    /// ξ(e_{i(15,k)}) = sign · e_{index}.
    pub fn xi(&self, k: usize) -> (usize, i8) {
        let b15 = self.b.get(15);
        let partner = self.bar(self.i(15, b15 + 1 - k));
        (partner, if k <= b15 / 2 { 1 } else { -1 })
    }

    fn build_pieces(&mut self) -> Result<()> {
        let mut pieces: Vec<Vec<usize>> = Vec::new();
        for j in [1, 2, 3, 4, 5, 6, 10, 11, 14] {
            for &i in self.set(j) {
                pieces.push(vec![i, self.bar(i)]);
            }
        }
        for j in [7, 8, 9, 13] {
            for &i in self.set(j) {
                let e = self.eta(j, i)?;
                pieces.push(vec![i, e, self.bar(i), self.bar(e)]);
            }
        }
        for &i in self.set(12) {
            let (k, l) = (self.kappa(i)?, self.lambda(i)?);
            pieces.push(vec![i, k, l, self.bar(i), self.bar(k), self.bar(l)]);
        }
        let b15 = self.b.get(15);
        for k in 1..=b15 / 2 {
            let (i, p) = (self.i(15, k), self.i(15, b15 + 1 - k));
            pieces.push(vec![i, p, self.bar(i), self.bar(p)]);
        }
        let m = 2 * self.n();
        let mut piece_of = vec![usize::MAX; m + 1];
        for (pi, piece) in pieces.iter().enumerate() {
            for &c in piece {
                if c == 0 || c > m || piece_of[c] != usize::MAX {
                    return Err(Error::Verification(format!("index {c} is covered twice or out of range")));
                }
                piece_of[c] = pi;
            }
        }
        if piece_of[1..].contains(&usize::MAX) {
            return Err(Error::Verification("pieces do not cover 1..2n".into()));
        }
        self.pieces = pieces;
        self.piece_of = piece_of;
        Ok(())
    }

    pub fn pieces(&self) -> &[Vec<usize>] {
        &self.pieces
    }

    pub fn piece_of(&self, i: usize) -> &[usize] {
        &self.pieces[self.piece_of[i]]
    }

    /// Human-readable tables of I_(j), the maps and the blocks of I₊.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "theta: {}", self.theta);
        let _ = writeln!(s, "b: {}", self.b);
        for j in 1..=15 {
            let _ = writeln!(s, "I({j}) = {:?}", self.set(j));
        }
        for j in [7, 8, 9, 13] {
            let m: Vec<(usize, usize)> = self.set(j).iter().map(|&i| (i, self.eta(j, i).unwrap())).collect();
            let _ = writeln!(s, "eta{j}: {m:?}");
        }
        let k: Vec<(usize, usize)> = self.set(12).iter().map(|&i| (i, self.kappa(i).unwrap())).collect();
        let l: Vec<(usize, usize)> = self.set(12).iter().map(|&i| (i, self.lambda(i).unwrap())).collect();
        let e: Vec<(usize, usize)> = self.set(15).iter().map(|&i| (i, self.eta15(i).unwrap())).collect();
        let _ = writeln!(s, "kappa: {k:?}");
        let _ = writeln!(s, "lambda: {l:?}");
        let _ = writeln!(s, "eta15: {e:?}");
        for blk in PLUS_BLOCKS {
            let _ = writeln!(s, "block {blk}: {:?}", self.block(blk));
        }
        s
    }
}
