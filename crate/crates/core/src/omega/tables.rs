//! Expansion coefficient tables `p^{[k]}_{κ,ι_1…ι_r}^{j_1…j_r}` of formal operations,
//! reference tables for `n = 2`, and the `ϖ` symmetry.

use std::collections::{BTreeMap, BTreeSet};

use crate::clifford::connection::ConnectionData;
use crate::error::{Error, Result};
use crate::formal::{FormalElement, Letter, Mask};
use crate::omega::step::o_omega;
use crate::rational::Rational;
use crate::ring::Coeff;

/// Index of one coefficient: output `k`, letters `(j_s, ι_s)` and blade `κ`.
/// Orthogonalization data use `k = 0` and `κ = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableKey {
    pub k: usize,
    pub letters: Vec<Letter>,
    pub kappa: Mask,
}

impl TableKey {
    pub fn new(k: usize, letters: Vec<Letter>, kappa: Mask) -> Self {
        TableKey { k, letters, kappa }
    }

    /// Key from 1-based letter indices `r_i`.
    pub fn from_indices(k: usize, idx: &[usize], n: usize) -> Self {
        TableKey::new(k, idx.iter().map(|&i| Letter::from_index(i, n)).collect(), 0)
    }

    pub fn degree(&self) -> usize {
        self.letters.len()
    }
}

/// Coefficients of `Ψ_k Q_k^{-1}` around the base system, up to degree `max_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTable<S: Coeff = Rational> {
    pub n: usize,
    pub max_r: usize,
    pub entries: BTreeMap<TableKey, S>,
}

impl<S: Coeff> CoeffTable<S> {
    /// Reads off the table of an output tuple computed from the generic input.
    pub fn table_of(psi: &[FormalElement<S>], max_r: usize) -> Result<Self> {
        let n = psi.len();
        let mut entries = BTreeMap::new();
        for (k0, out) in psi.iter().enumerate() {
            if out.n() != n {
                return Err(Error::Mismatch("output tuple length differs from generator count".into()));
            }
            // Q_k^{-1} = −Q_k
            let qk_inv = FormalElement::<S>::q_gen(n, out.cap(), k0 + 1).neg();
            for (w, c) in out.mul(&qk_inv).terms() {
                if w.degree() <= max_r {
                    entries.insert(TableKey::new(k0 + 1, w.letters.clone(), w.q), c.clone());
                }
            }
        }
        Ok(CoeffTable { n, max_r, entries })
    }

    pub fn get(&self, key: &TableKey) -> S {
        self.entries.get(key).cloned().unwrap_or_else(S::zero)
    }

    /// Number of letters `n·2^n`.
    pub fn letter_count(&self) -> usize {
        self.n << self.n
    }

    pub fn p0(&self, k: usize) -> S {
        self.get(&TableKey::new(k, vec![], 0))
    }

    /// Row `P_1^{[k]}`: entry `i − 1` is the coefficient of `r_i`.
    pub fn p1(&self, k: usize) -> Vec<S> {
        (1..=self.letter_count()).map(|i| self.get(&TableKey::from_indices(k, &[i], self.n))).collect()
    }

    /// Matrix `P_2^{[k]}`: entry `[i−1][j−1]` is the coefficient of `r_i r_j`.
    pub fn p2(&self, k: usize) -> Vec<Vec<S>> {
        let m = self.letter_count();
        (1..=m)
            .map(|i| (1..=m).map(|j| self.get(&TableKey::from_indices(k, &[i, j], self.n))).collect())
            .collect()
    }

    pub fn p_tables(&self) -> PTables<S> {
        PTables {
            p1: (1..=self.n).map(|k| self.p1(k)).collect(),
            p2: (1..=self.n).map(|k| self.p2(k)).collect(),
        }
    }

    /// Entries with a nonzero blade; empty for sign-linear operations.
    pub fn blade_entries(&self) -> impl Iterator<Item = (&TableKey, &S)> {
        self.entries.iter().filter(|(k, _)| k.kappa != 0)
    }

    pub fn map<T: Coeff>(&self, f: impl Fn(&S) -> T) -> CoeffTable<T> {
        let entries = self.entries.iter().map(|(k, v)| (k.clone(), f(v))).filter(|(_, v)| !v.is_zero()).collect();
        CoeffTable { n: self.n, max_r: self.max_r, entries }
    }
}

/// The `κ = 0` slices `P_1^{[k]}`, `P_2^{[k]}` (outer index `k − 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct PTables<S: Coeff = Rational> {
    pub p1: Vec<Vec<S>>,
    pub p2: Vec<Vec<Vec<S>>>,
}

/// Tables of formal `O^ω` on the generic input of size `n`, up to degree `max_r`.
pub fn extract_omega_tables<S: Coeff>(omega: &ConnectionData<S>, n: usize, max_r: usize) -> Result<CoeffTable<S>> {
    if n > 3 || max_r > 3 {
        return Err(Error::CostGuard(format!("table extraction limited to n ≤ 3 and r ≤ 3 (got n={n}, r={max_r})")));
    }
    if omega.n != n {
        return Err(Error::Mismatch(format!("connection of size {} for n = {n}", omega.n)));
    }
    let a = FormalElement::<S>::generic_input(n, max_r);
    let psi = o_omega(omega, &a, false)?;
    CoeffTable::table_of(&psi, max_r)
}

/// Tables of `O^{GS(t)}` at rational `t ≥ 0` (`t = 0` is plain GS).
pub fn gs_t_tables(n: usize, t: &Rational, max_r: usize) -> Result<CoeffTable<Rational>> {
    let data = if t.is_zero() { ConnectionData::gs(n) } else { ConnectionData::gs_t_at(n, t)? };
    extract_omega_tables(&data, n, max_r)
}

// ---- ϖ symmetry -------------------------------------------------------------

/// Reverses the order of the generators: `(j, ι) ↦ (n+1−j, ι reversed)`.
pub fn reverse_mask(m: Mask, n: usize) -> Mask {
    (0..n).fold(0, |acc, h| acc | (((m >> h) & 1) << (n - 1 - h)))
}

/// Image of a key under generator reversal, with the sign picked up by the blade
/// (reversing a product of `p` anticommuting generators gives `(−1)^{p(p−1)/2}`).
pub fn varpi_key(key: &TableKey, n: usize) -> (TableKey, bool) {
    let letters = key.letters.iter().map(|l| Letter::new(n + 1 - l.j as usize, reverse_mask(l.iota, n))).collect();
    let p = key.kappa.count_ones();
    let k = if key.k == 0 { 0 } else { n + 1 - key.k };
    (TableKey::new(k, letters, reverse_mask(key.kappa, n)), (p * p.saturating_sub(1) / 2) % 2 == 1)
}

/// The permutation `ϖ` on 1-based letter indices.
pub fn varpi_index(i: usize, n: usize) -> usize {
    let l = Letter::from_index(i, n);
    Letter::new(n + 1 - l.j as usize, reverse_mask(l.iota, n)).index(n)
}

/// `a[key] = ±b[ϖ(key)]` for every key; `a` at parameter `t` and `b` at `1/t`.
pub fn varpi_symmetry_check<S: Coeff>(a: &CoeffTable<S>, b: &CoeffTable<S>) -> bool {
    if a.n != b.n {
        return false;
    }
    let n = a.n;
    let keys: BTreeSet<TableKey> = a
        .entries
        .keys()
        .cloned()
        .chain(b.entries.keys().map(|k| varpi_key(k, n).0))
        .collect();
    keys.iter().all(|key| {
        let (img, neg) = varpi_key(key, n);
        let rhs = b.get(&img);
        a.get(key) == if neg { rhs.neg() } else { rhs }
    })
}

/// The same check on `κ = 0` slices.
pub fn varpi_symmetry_check_p(a: &PTables, b: &PTables, n: usize) -> bool {
    let m = n << n;
    let v = |i: usize| varpi_index(i + 1, n) - 1;
    (0..n).all(|k| {
        let k2 = n - 1 - k;
        (0..m).all(|i| a.p1[k][i] == b.p1[k2][v(i)] && (0..m).all(|j| a.p2[k][i][j] == b.p2[k2][v(i)][v(j)]))
    })
}

// ---- reference tables (n = 2) ---------------------------------------------

fn scaled_rows(rows: &[[i64; 8]], den: i64) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|&x| Rational::new(x, den)).collect()).collect()
}

const GS_P1: [[i64; 8]; 2] = [[0, 0, 1, 1, 0, 0, 0, 0], [0, 0, 0, 1, 0, 1, 0, 0]];

const GS_P2_1: [[i64; 8]; 8] = [
    [0, 0, -1, -1, 0, 0, 0, 0],
    [0, 0, -1, -1, 0, 0, 0, 0],
    [-1, -1, 1, 1, 0, 0, 0, 0],
    [-1, -1, 1, 1, 0, 0, 0, 0],
    [0; 8],
    [0; 8],
    [0; 8],
    [0; 8],
];

const GS_P2_2: [[i64; 8]; 8] = [
    [0, 0, 0, -1, 0, 0, 0, 0],
    [0, 0, -1, 0, 0, 0, 0, 0],
    [0, -1, 0, 1, 0, 1, 0, -1],
    [-1, 0, -1, 1, 0, 1, -1, 0],
    [0, 0, 0, 0, 0, -1, 0, 0],
    [0, 0, -1, 1, -1, 1, 0, 0],
    [0, 0, 0, -1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0],
];

const SY_P1: [[i64; 8]; 2] = [[0, 0, 2, 1, 0, 0, 0, 1], [0, 0, 0, 1, 0, 2, 0, 1]];

const SY_P2_1: [[i64; 8]; 8] = [
    [0, 0, -4, -1, 0, 0, 0, -1],
    [0, 0, -2, -2, 0, 0, 0, -2],
    [-4, -2, 4, 2, 0, -2, 0, 2],
    [-1, -2, 2, 1, -1, 2, 0, 1],
    [0, 0, 0, -1, 0, 0, 0, -1],
    [0, 0, 2, -2, 0, 0, -2, 2],
    [0, 0, 0, 0, 0, -2, 0, 0],
    [-1, -2, 2, 1, -1, -2, 0, 1],
];

const SY_P2_2: [[i64; 8]; 8] = [
    [0, 0, 0, -1, 0, 0, 0, -1],
    [0, 0, -2, 0, 0, 0, 0, 0],
    [0, -2, 0, 2, 0, 2, 0, -2],
    [-1, 0, -2, 1, -1, 2, -2, 1],
    [0, 0, 0, -1, 0, -4, 0, -1],
    [0, 0, -2, 2, -4, 4, -2, 2],
    [0, 0, 0, -2, 0, -2, 0, -2],
    [-1, 0, 2, 1, -1, 2, -2, 1],
];

/// Reference `O^GS` tables for `n = 2`.
pub fn reference_gs() -> PTables {
    PTables {
        p1: scaled_rows(&GS_P1, 1),
        p2: vec![scaled_rows(&GS_P2_1, 2), scaled_rows(&GS_P2_2, 2)],
    }
}

/// Reference `O^Sy` tables for `n = 2`.
pub fn reference_sy() -> PTables {
    PTables {
        p1: scaled_rows(&SY_P1, 2),
        p2: vec![scaled_rows(&SY_P2_1, 8), scaled_rows(&SY_P2_2, 8)],
    }
}

/// An entry `c·t^a/(1+t)^b` of the `GS(t)` tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TMonomial {
    pub c: i64,
    pub a: i32,
    pub b: i32,
}

impl TMonomial {
    fn parse(s: &str) -> TMonomial {
        let (c, sym) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s),
        };
        let (c, a, b) = match sym {
            "0" => (0, 0, 0),
            "1" => (c, 0, 0),
            "f" => (c, 0, 1),
            "g" => (c, 1, 1),
            "F" => (c, 0, 2),
            "G" => (c, 1, 2),
            "H" => (c, 2, 2),
            // (1+t)²/t
            "K" => (c, -1, -2),
            _ => panic!("bad table symbol {s}"),
        };
        TMonomial { c, a, b }
    }

    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        let pow = |x: &Rational, e: i32| -> Result<Rational> {
            if e >= 0 {
                Ok(x.pow(e as u32))
            } else {
                x.pow((-e) as u32).recip().ok_or(Error::Singular)
            }
        };
        let one_t = &Rational::one() + t;
        Ok(&(&Rational::from_integer(self.c) * &pow(t, self.a)?) * &pow(&one_t, -self.b)?)
    }
}

// f = 1/(1+t), g = t/(1+t), F = 1/(1+t)², G = t/(1+t)², H = t²/(1+t)², K = (1+t)²/t.
// P_2 entries carry an overall factor ½.
const GS_T_P1: [&str; 2] = ["0 0 1 f 0 0 0 g", "0 0 0 f 0 1 0 g"];

const GS_T_P2_1_PRINTED: [&str; 8] = [
    "0 0 -1 -F 0 0 0 -G",
    "0 0 -f -f 0 0 0 -g",
    "-1 -f 1 f 0 -g 0 f",
    "-F -f f F -G g 0 K",
    "0 0 0 -G 0 0 0 -H",
    "0 0 g -g 0 0 -g g",
    "0 0 0 0 0 -g 0 0",
    "-G -g g G -H -g 0 H",
];

const GS_T_P2_2: [&str; 8] = [
    "0 0 0 -F 0 0 0 -G",
    "0 0 -f 0 0 0 0 0",
    "0 -f 0 f 0 f 0 -f",
    "-F 0 -f F -G f -f G",
    "0 0 0 -G 0 -1 0 -H",
    "0 0 -f f -1 1 -g g",
    "0 0 0 -f 0 -g 0 -g",
    "-G 0 f G -H g -g H",
];

/// Corrections to the printed `GS(t)` table: `(k, i, j, printed, corrected)`.
/// Both misprints break the `t = 0` and `t = 1` limits and the `ϖ` symmetry.
pub const GS_T_CORRECTIONS: [(usize, usize, usize, &str, &str); 2] =
    [(1, 3, 8, "f", "g"), (1, 4, 8, "K", "G")];

fn parse_row(s: &str) -> Vec<TMonomial> {
    s.split_whitespace().map(TMonomial::parse).collect()
}

/// `GS(t)` tables for `n = 2` as symbolic monomials, optionally with the misprints.
pub fn reference_gs_t_symbolic(printed: bool) -> (Vec<Vec<TMonomial>>, Vec<Vec<Vec<TMonomial>>>) {
    let p1 = GS_T_P1.iter().map(|r| parse_row(r)).collect();
    let mut p2_1: Vec<Vec<TMonomial>> = GS_T_P2_1_PRINTED.iter().map(|r| parse_row(r)).collect();
    if !printed {
        for (k, i, j, _, fixed) in GS_T_CORRECTIONS {
            debug_assert_eq!(k, 1);
            p2_1[i - 1][j - 1] = TMonomial::parse(fixed);
        }
    }
    let p2_2 = GS_T_P2_2.iter().map(|r| parse_row(r)).collect();
    (p1, vec![p2_1, p2_2])
}

/// `GS(t)` reference tables at rational `t`.
pub fn reference_gs_t(t: &Rational, printed: bool) -> Result<PTables> {
    let (p1, p2) = reference_gs_t_symbolic(printed);
    let half = Rational::new(1, 2);
    let p1 = p1
        .iter()
        .map(|row| row.iter().map(|m| m.eval(t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let p2 = p2
        .iter()
        .map(|mat| {
            mat.iter()
                .map(|row| row.iter().map(|m| Ok(&m.eval(t)? * &half)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PTables { p1, p2 })
}

/// Positions `(k, i, j)` where two `P_2` slices differ.
pub fn p2_differences(a: &PTables, b: &PTables) -> Vec<(usize, usize, usize)> {
    let mut out = vec![];
    for (k, (ma, mb)) in a.p2.iter().zip(&b.p2).enumerate() {
        for (i, (ra, rb)) in ma.iter().zip(mb).enumerate() {
            for (j, (x, y)) in ra.iter().zip(rb).enumerate() {
                if x != y {
                    out.push((k + 1, i + 1, j + 1));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn gs_tables_match_reference() {
        let t = extract_omega_tables(&ConnectionData::<Rational>::gs(2), 2, 2).unwrap();
        assert_eq!(t.p_tables(), reference_gs());
        assert_eq!(t.p0(1), Rational::one());
        assert_eq!(t.p0(2), Rational::one());
        assert_eq!(t.blade_entries().count(), 0);
    }

    #[test]
    fn sy_tables_match_reference() {
        let t = extract_omega_tables(&ConnectionData::<Rational>::sy(2), 2, 2).unwrap();
        assert_eq!(t.p_tables(), reference_sy());
        assert_eq!(t.blade_entries().count(), 0);
    }

    #[test]
    fn gs_t_endpoints() {
        assert_eq!(reference_gs_t(&r(0, 1), false).unwrap(), reference_gs());
        assert_eq!(reference_gs_t(&r(1, 1), false).unwrap(), reference_sy());
        assert_eq!(gs_t_tables(2, &r(0, 1), 2).unwrap().p_tables(), reference_gs());
        assert_eq!(gs_t_tables(2, &r(1, 1), 2).unwrap().p_tables(), reference_sy());
    }

    #[test]
    fn gs_t_matches_corrected_reference() {
        for t in [r(1, 2), r(2, 1), r(1, 3)] {
            let computed = gs_t_tables(2, &t, 2).unwrap().p_tables();
            assert_eq!(computed, reference_gs_t(&t, false).unwrap(), "t = {t}");
            let printed = reference_gs_t(&t, true).unwrap();
            assert_eq!(computed.p1, printed.p1);
            let diffs = p2_differences(&computed, &printed);
            let expected: Vec<_> = GS_T_CORRECTIONS.iter().map(|c| (c.0, c.1, c.2)).collect();
            assert_eq!(diffs, expected, "t = {t}");
        }
    }

    #[test]
    fn varpi_is_the_stated_permutation() {
        let images: Vec<usize> = (1..=8).map(|i| varpi_index(i, 2)).collect();
        assert_eq!(images, vec![5, 7, 6, 8, 1, 3, 2, 4]);
    }

    #[test]
    fn varpi_symmetry_of_computed_tables() {
        let sy = extract_omega_tables(&ConnectionData::<Rational>::sy(2), 2, 2).unwrap();
        assert!(varpi_symmetry_check(&sy, &sy));
        for t in [r(1, 2), r(2, 1)] {
            let a = gs_t_tables(2, &t, 2).unwrap();
            let b = gs_t_tables(2, &t.recip().unwrap(), 2).unwrap();
            assert!(varpi_symmetry_check(&a, &b));
        }
        let gs = extract_omega_tables(&ConnectionData::<Rational>::gs(2), 2, 2).unwrap();
        let rev = extract_omega_tables(&ConnectionData::<Rational>::reverse_gs(2), 2, 2).unwrap();
        assert!(varpi_symmetry_check(&gs, &rev));
        assert!(!varpi_symmetry_check(&gs, &gs));
    }

    #[test]
    fn varpi_symmetry_of_reference_tables() {
        let t = r(1, 2);
        let a = reference_gs_t(&t, false).unwrap();
        let b = reference_gs_t(&r(2, 1), false).unwrap();
        assert!(varpi_symmetry_check_p(&a, &b, 2));
        assert!(varpi_symmetry_check_p(&reference_sy(), &reference_sy(), 2));
        let a = reference_gs_t(&t, true).unwrap();
        let b = reference_gs_t(&r(2, 1), true).unwrap();
        assert!(!varpi_symmetry_check_p(&a, &b, 2));
    }

    #[test]
    fn varpi_symmetry_in_three_variables() {
        let sy = extract_omega_tables(&ConnectionData::<Rational>::sy(3), 3, 1).unwrap();
        assert!(varpi_symmetry_check(&sy, &sy));
        let gs = extract_omega_tables(&ConnectionData::<Rational>::gs(3), 3, 1).unwrap();
        let rev = extract_omega_tables(&ConnectionData::<Rational>::reverse_gs(3), 3, 1).unwrap();
        assert!(varpi_symmetry_check(&gs, &rev));
    }

    #[test]
    fn cost_guard() {
        assert!(matches!(
            extract_omega_tables(&ConnectionData::<Rational>::sy(4), 4, 1),
            Err(Error::CostGuard(_))
        ));
    }
}
