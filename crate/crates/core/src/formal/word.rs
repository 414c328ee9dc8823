//! Normal-form monomials: a string of typed letters followed by a Clifford blade.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Bit masks over generator indices: bit `h-1` stands for `Q_h` (or `ι_h`).
pub type Mask = u16;

/// Largest supported number of generators.
pub const MAX_GENERATORS: usize = 12;

/// A typed degree-1 letter `r_{j,ι}`; it commutes with `Q_h` when `ι_h = 0`
/// and anticommutes when `ι_h = 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    pub j: u8,
    pub iota: Mask,
}

impl Letter {
    pub fn new(j: usize, iota: Mask) -> Letter {
        Letter { j: j as u8, iota }
    }

    /// Position in the enumeration `r_1, r_2, …`: grouped by `j`, then `ι`
    /// read as a binary number with `ι_1` most significant. 1-based.
    pub fn index(&self, n: usize) -> usize {
        (self.j as usize - 1) * (1 << n) + mask_value(self.iota, n) + 1
    }

    pub fn from_index(index: usize, n: usize) -> Letter {
        let i = index - 1;
        let j = i / (1 << n) + 1;
        Letter::new(j, mask_from_value(i % (1 << n), n))
    }

    fn sort_key(&self) -> (u8, u16) {
        (self.j, self.iota.reverse_bits())
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `ι` read as a binary number with `ι_1` as the most significant bit.
pub fn mask_value(mask: Mask, n: usize) -> usize {
    (0..n).fold(0, |acc, h| (acc << 1) | ((mask >> h) & 1) as usize)
}

pub fn mask_from_value(value: usize, n: usize) -> Mask {
    (0..n).fold(0, |acc, h| acc | ((((value >> (n - 1 - h)) & 1) as Mask) << h))
}

/// `"ι_1ι_2…ι_n"` as a string of 0/1 characters.
pub fn mask_to_bits(mask: Mask, n: usize) -> String {
    (0..n).map(|h| if (mask >> h) & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn bits_to_mask(s: &str) -> Result<(Mask, usize)> {
    let mut mask = 0;
    for (h, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => mask |= 1 << h,
            _ => return Err(Error::Parse(format!("bad bit string {s:?}"))),
        }
    }
    Ok((mask, s.chars().count()))
}

pub fn popcount(m: Mask) -> u32 {
    m.count_ones()
}

/// Sign parity of the blade product `Q^a Q^b` rewritten as `± Q^(a xor b)`,
/// with `Q_i² = -1` and distinct generators anticommuting.
pub fn blade_parity(a: Mask, b: Mask) -> u32 {
    let mut swaps = 0;
    let mut rest = b;
    while rest != 0 {
        let i = rest.trailing_zeros();
        swaps += popcount(a >> (i + 1));
        rest &= rest - 1;
    }
    swaps + popcount(a & b)
}

/// Parity of `(Q^μ)^{-1} Q^κ Q^μ = ± Q^κ`.
pub fn blade_conjugation_parity(kappa: Mask, mu: Mask) -> u32 {
    (popcount(kappa) * popcount(mu) + popcount(kappa & mu)) % 2
}

/// A normal-form word `r_{j_1,ι_1} … r_{j_r,ι_r} Q^κ`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word {
    pub letters: Vec<Letter>,
    pub q: Mask,
}

impl Word {
    pub fn one() -> Word {
        Word::default()
    }

    pub fn blade(q: Mask) -> Word {
        Word { letters: vec![], q }
    }

    pub fn letter(l: Letter) -> Word {
        Word { letters: vec![l], q: 0 }
    }

    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    /// Parity of conjugating this word by `Q^μ`, i.e. `(Q^μ)^{-1} w Q^μ = ± w`.
    pub fn conjugation_parity(&self, mu: Mask) -> u32 {
        let letters: u32 = self.letters.iter().map(|l| popcount(l.iota & mu)).sum();
        (letters + blade_conjugation_parity(self.q, mu)) % 2
    }

    /// Commutation type: bit `h` is set when the word anticommutes with `Q_h`.
    pub fn type_mask(&self, n: usize) -> Mask {
        let mut t = 0;
        for h in 0..n {
            if self.conjugation_parity(1 << h) == 1 {
                t |= 1 << h;
            }
        }
        t
    }

    pub fn display(&self, n: usize) -> String {
        let mut s = String::new();
        for l in &self.letters {
            s.push_str(&format!("r{}[{}]", l.j, mask_to_bits(l.iota, n)));
        }
        if self.q != 0 || self.letters.is_empty() {
            if !s.is_empty() {
                s.push(' ');
            }
            s.push_str(&format!("Q[{}]", mask_to_bits(self.q, n)));
        }
        s
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
            .then_with(|| self.q.reverse_bits().cmp(&other.q.reverse_bits()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = MAX_GENERATORS.min(16 - self.q.leading_zeros() as usize).max(1);
        write!(f, "{}", self.display(n))
    }
}

/// Product of two normal-form words: returns `(negative, word)` with
/// `a·b = (-1)^negative · word`.
pub fn mono_mul(a: &Word, b: &Word) -> (bool, Word) {
    let mut parity: u32 = b.letters.iter().map(|l| popcount(a.q & l.iota)).sum();
    parity += blade_parity(a.q, b.q);
    let mut letters = Vec::with_capacity(a.letters.len() + b.letters.len());
    letters.extend_from_slice(&a.letters);
    letters.extend_from_slice(&b.letters);
    (parity % 2 == 1, Word { letters, q: a.q ^ b.q })
}
