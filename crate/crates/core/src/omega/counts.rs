//! Numbers of freely choosable expansion coefficients.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::formal::{Letter, Mask};

/// Which family of formal operations is counted (coefficients on level `r`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountKind {
    /// Formal FQ operations.
    FqOp,
    /// Sign-linear formal FQ operations.
    FqOpVl,
    /// Sign-linear FQ orthogonalization procedures fixing Clifford systems.
    FqOrth,
    /// FQ conform-operations.
    ConformOp,
    /// Sign-linear FQ conform-operations.
    ConformOpVl,
    /// Sign-linear FQ conform-orthogonalization procedures fixing floating Clifford systems.
    ConformOrth,
}

impl CountKind {
    pub const ALL: [CountKind; 6] = [
        CountKind::FqOp,
        CountKind::FqOpVl,
        CountKind::FqOrth,
        CountKind::ConformOp,
        CountKind::ConformOpVl,
        CountKind::ConformOrth,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CountKind::FqOp => "fq-op",
            CountKind::FqOpVl => "fq-op-vl",
            CountKind::FqOrth => "fq-orth",
            CountKind::ConformOp => "conform-op",
            CountKind::ConformOpVl => "conform-op-vl",
            CountKind::ConformOrth => "conform-orth",
        }
    }
}

impl fmt::Display for CountKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CountKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CountKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown count kind '{s}'")))
    }
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

/// Closed-form count.
pub fn coeff_count(n: usize, r: usize, kind: CountKind) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::Mismatch("n must be at least 1".into()));
    }
    let nb = BigInt::from(n);
    // admissible letters in n and in n − 1 variables
    let m = (&nb - 1) * pow2(n) + 1;
    let mc = (&nb - 2) * pow2(n - 1) + 1;
    let mr = num_traits::pow(m, r);
    let mcr = num_traits::pow(mc, r);
    let exact_div = |num: BigInt, den: BigInt| -> Result<BigInt> {
        if (&num % &den).is_zero() {
            Ok(num / den)
        } else {
            Err(Error::Mismatch("count formula is not integral".into()))
        }
    };
    Ok(match kind {
        CountKind::FqOp => mr * pow2(n) * nb,
        CountKind::FqOpVl => mr * nb,
        CountKind::FqOrth => exact_div((mr - 1) * (pow2(n) - 1), pow2(n))?,
        CountKind::ConformOp => mcr * pow2(n - 1) * nb,
        CountKind::ConformOpVl => mcr * nb,
        CountKind::ConformOrth => exact_div((mcr - 1) * (pow2(n) - 1) * 2, pow2(n))? + 1,
    })
}

/// `j ≠ min{h : ι_h = 1}` (always true for `ι = 0`).
pub fn is_admissible_letter(l: &Letter) -> bool {
    l.iota == 0 || l.j as u32 - 1 != l.iota.trailing_zeros()
}

/// Admissible letters in `n` variables.
pub fn admissible_letters(n: usize) -> Vec<Letter> {
    let mut out = vec![];
    for j in 1..=n {
        for iota in 0..(1u32 << n) {
            let l = Letter::new(j, iota as Mask);
            if is_admissible_letter(&l) {
                out.push(l);
            }
        }
    }
    out
}

/// All words of length `r` over `letters`.
pub fn words(letters: &[Letter], r: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|w| {
                letters.iter().map(move |l| {
                    let mut w = w.clone();
                    w.push(*l);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn xor_type(w: &[Letter]) -> Mask {
    w.iter().fold(0, |acc, l| acc ^ l.iota)
}

/// Count by listing the admissible index tuples.
pub fn coeff_count_enumerated(n: usize, r: usize, kind: CountKind) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::Mismatch("n must be at least 1".into()));
    }
    let full = words(&admissible_letters(n), r);
    let reduced = words(&admissible_letters(n - 1), r);
    let nonzero = |ws: &[Vec<Letter>]| ws.iter().filter(|w| xor_type(w) != 0).count();
    let count = match kind {
        CountKind::FqOp => n * full.len() * (1 << n),
        CountKind::FqOpVl => n * full.len(),
        CountKind::FqOrth => nonzero(&full),
        CountKind::ConformOp => n * reduced.len() * (1 << (n - 1)),
        CountKind::ConformOpVl => n * reduced.len(),
        // vectorial orthogonalization part in n − 1 variables plus the scalar part
        CountKind::ConformOrth => nonzero(&reduced) + reduced.len(),
    };
    Ok(BigInt::from(count))
}
