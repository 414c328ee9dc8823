//! Formal operations assembled from free coefficient data in the GS gauge.

use std::collections::BTreeMap;

use crate::algebra::{tuple_sub, Algebra};
use crate::clifford::actions::ad_big;
use crate::clifford::decomp::{decomp_all, Side};
use crate::error::{Error, Result};
use crate::formal::{FormalElement, Letter, Mask};
use crate::gram_schmidt::ogs_raw;
use crate::omega::counts::{is_admissible_letter, xor_type};
use crate::omega::tables::{CoeffTable, TableKey};
use crate::rational::Rational;
use crate::ring::Coeff;

/// Free data for a formal FQ operation (`orth = false`, keys `(k, letters, κ)`)
/// or an orthogonalization procedure (`orth = true`, keys `(0, letters, 0)`).
#[derive(Clone, Debug, PartialEq)]
pub struct FreeCoeffData {
    pub n: usize,
    pub orth: bool,
    pub entries: BTreeMap<TableKey, Rational>,
}

impl FreeCoeffData {
    pub fn new(n: usize, orth: bool) -> Self {
        FreeCoeffData { n, orth, entries: BTreeMap::new() }
    }

    /// Whether `key` may carry free data.
    pub fn check_key(&self, key: &TableKey) -> Result<()> {
        let bad = |why: &str| Err(Error::InadmissibleIndex(format!("{why}: {key:?}")));
        if key.letters.is_empty() {
            return bad("degree-0 coefficients are fixed");
        }
        if key.letters.iter().any(|l| l.j == 0 || l.j as usize > self.n || (l.iota >> self.n) != 0) {
            return bad("letter out of range");
        }
        if let Some(l) = key.letters.iter().find(|l| !is_admissible_letter(l)) {
            return bad(&format!("j = {} is the lowest index of ι", l.j));
        }
        if self.orth {
            if key.k != 0 || key.kappa != 0 {
                return bad("orthogonalization data carry no output index or blade");
            }
            if xor_type(&key.letters) == 0 {
                return bad("letter types sum to zero");
            }
        } else if key.k == 0 || key.k > self.n || (key.kappa >> self.n) != 0 {
            return bad("output index or blade out of range");
        }
        Ok(())
    }

    pub fn insert(&mut self, key: TableKey, value: Rational) -> Result<()> {
        self.check_key(&key)?;
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    /// Keeps the admissible part of a table (degree ≥ 1).
    pub fn from_table(table: &CoeffTable<Rational>) -> Self {
        let mut d = FreeCoeffData::new(table.n, false);
        for (k, v) in &table.entries {
            if d.check_key(k).is_ok() {
                d.entries.insert(k.clone(), v.clone());
            }
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        self.entries.keys().map(TableKey::degree).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        self.entries.keys().try_for_each(|k| self.check_key(k))
    }
}

fn blade_of<A: Algebra>(q: &[A], kappa: Mask) -> A {
    let mut b = q[0].one_like();
    for (h, qh) in q.iter().enumerate() {
        if (kappa >> h) & 1 == 1 {
            b = b.mul(qh);
        }
    }
    b
}

fn word_value<A: Algebra>(d: &[Vec<A>], letters: &[Letter], one: &A) -> A {
    letters.iter().fold(one.clone(), |acc, l| acc.mul(&d[l.j as usize - 1][l.iota as usize]))
}

/// `Ψ_k = Q_k + Σ p · (R/Q)_{j_1}^{ι_1}…(R/Q)_{j_r}^{ι_r} Q^κ Q_k` with `Q = O^GS(A)`,
/// summing entries of degree `1..=max_r`.
pub fn custom_fq_eval<A: Algebra>(p: &FreeCoeffData, a: &[A], max_r: usize) -> Result<Vec<A>> {
    if p.orth {
        return Err(Error::Mismatch("orthogonalization data given to the operation evaluator".into()));
    }
    if a.len() != p.n {
        return Err(Error::Mismatch(format!("data for n = {} applied to {} inputs", p.n, a.len())));
    }
    p.validate()?;
    let q = ogs_raw(a)?;
    let d = decomp_all(&tuple_sub(a, &q), &q, Side::Right)?;
    let one = q[0].one_like();
    let mut out = q.clone();
    for (key, c) in p.entries.iter().filter(|(k, _)| k.degree() <= max_r) {
        let term = word_value(&d, &key.letters, &one).mul(&blade_of(&q, key.kappa)).mul(&q[key.k - 1]);
        out[key.k - 1] = out[key.k - 1].add(&term.scale(&A::Scalar::from_rational(c)));
    }
    Ok(out)
}

/// `(Ad exp E^{(1)})(Ad exp E^{(2)})… O^GS(A)` with `E^{(r)} = Σ p̃ · (R/Q)…(R/Q)`.
pub fn custom_orth_eval<A: Algebra>(p: &FreeCoeffData, a: &[A], max_r: usize) -> Result<Vec<A>> {
    if !p.orth {
        return Err(Error::Mismatch("operation data given to the orthogonalization evaluator".into()));
    }
    if a.len() != p.n {
        return Err(Error::Mismatch(format!("data for n = {} applied to {} inputs", p.n, a.len())));
    }
    p.validate()?;
    let q = ogs_raw(a)?;
    let d = decomp_all(&tuple_sub(a, &q), &q, Side::Right)?;
    let one = q[0].one_like();
    let mut g = one.clone();
    for r in 1..=max_r.min(p.max_degree()) {
        let mut e = one.zero_like();
        for (key, c) in p.entries.iter().filter(|(k, _)| k.degree() == r) {
            e = e.add(&word_value(&d, &key.letters, &one).scale(&A::Scalar::from_rational(c)));
        }
        if !e.is_zero() {
            g = g.mul(&e.exp()?);
        }
    }
    ad_big(&g, &q)
}

/// Convenience: the formal generic input of size `n` with degree cap `cap`.
pub fn generic(n: usize, cap: usize) -> Vec<FormalElement<Rational>> {
    FormalElement::generic_input(n, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::connection::ConnectionData;
    use crate::clifford::system::clifford_residual;
    use crate::omega::counts::{admissible_letters, words};
    use crate::omega::step::o_omega;
    use crate::omega::tables::extract_omega_tables;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type F = FormalElement<Rational>;

    fn random_fq_data(n: usize, max_r: usize, seed: u64) -> FreeCoeffData {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = FreeCoeffData::new(n, false);
        for r in 1..=max_r {
            for w in words(&admissible_letters(n), r) {
                for k in 1..=n {
                    if rng.random_bool(0.3) {
                        let v = Rational::new(rng.random_range(-3..=3), rng.random_range(1..=4));
                        p.insert(TableKey::new(k, w.clone(), 0), v).unwrap();
                    }
                }
            }
        }
        p
    }

    fn random_orth_data(n: usize, max_r: usize, seed: u64) -> FreeCoeffData {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = FreeCoeffData::new(n, true);
        for r in 1..=max_r {
            for w in words(&admissible_letters(n), r) {
                if xor_type(&w) != 0 && rng.random_bool(0.5) {
                    let v = Rational::new(rng.random_range(-3..=3), rng.random_range(1..=3));
                    p.insert(TableKey::new(0, w, 0), v).unwrap();
                }
            }
        }
        p
    }

    /// `θ = 1 + (small degree-1 element)`.
    fn theta(n: usize, cap: usize) -> F {
        let x = F::r_letter(n, cap, 1, 0b01)
            .scale(&Rational::new(1, 2))
            .add(&F::r_letter(n, cap, 2, 0b11).mul(&F::q_gen(n, cap, 1)).scale(&Rational::new(-2, 3)));
        F::one(n, cap).add(&x)
    }

    #[test]
    fn zero_data_is_gram_schmidt() {
        let a = generic(2, 3);
        let gs = ogs_raw(&a).unwrap();
        assert_eq!(custom_fq_eval(&FreeCoeffData::new(2, false), &a, 3).unwrap(), gs);
        assert_eq!(custom_orth_eval(&FreeCoeffData::new(2, true), &a, 3).unwrap(), gs);
    }

    #[test]
    fn admissible_tables_reproduce_the_operation() {
        for data in [
            ConnectionData::<Rational>::gs(2),
            ConnectionData::sy(2),
            ConnectionData::gs_t_at(2, &Rational::new(1, 2)).unwrap(),
        ] {
            let table = extract_omega_tables(&data, 2, 3).unwrap();
            let p = FreeCoeffData::from_table(&table);
            let a = generic(2, 3);
            assert_eq!(custom_fq_eval(&p, &a, 3).unwrap(), o_omega(&data, &a, false).unwrap());
        }
    }

    #[test]
    fn gs_gauge_kills_inadmissible_letters() {
        // In the GS gauge the r_3, r_4, r_6 components of A − O^GS(A) vanish.
        let a = generic(2, 3);
        let q = ogs_raw(&a).unwrap();
        let d = decomp_all(&tuple_sub(&a, &q), &q, Side::Right).unwrap();
        for i in 1..=8 {
            let l = Letter::from_index(i, 2);
            assert_eq!(d[l.j as usize - 1][l.iota as usize].is_zero(), !is_admissible_letter(&l), "r_{i}");
        }
    }

    #[test]
    fn inadmissible_data_is_rejected() {
        let mut p = FreeCoeffData::new(2, false);
        let bad = TableKey::from_indices(1, &[3], 2);
        assert!(matches!(p.insert(bad, Rational::one()), Err(Error::InadmissibleIndex(_))));
        let mut p = FreeCoeffData::new(2, true);
        let even = TableKey::new(0, vec![Letter::new(1, 0), Letter::new(2, 0)], 0);
        assert!(matches!(p.insert(even, Rational::one()), Err(Error::InadmissibleIndex(_))));
    }

    #[test]
    fn custom_operation_is_natural() {
        let (n, cap) = (2, 2);
        let p = random_fq_data(n, cap, 7);
        let a = generic(n, cap);
        let th = theta(n, cap);
        let lhs = custom_fq_eval(&p, &ad_big(&th, &a).unwrap(), cap).unwrap();
        let rhs = ad_big(&th, &custom_fq_eval(&p, &a, cap).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn custom_orthogonalization_is_clifford_and_natural() {
        let (n, cap) = (2, 3);
        let p = random_orth_data(n, cap, 11);
        let a = generic(n, cap);
        let out = custom_orth_eval(&p, &a, cap).unwrap();
        assert_eq!(clifford_residual(&out), 0.0);
        let th = theta(n, cap);
        let lhs = custom_orth_eval(&p, &ad_big(&th, &a).unwrap(), cap).unwrap();
        assert_eq!(lhs, ad_big(&th, &out).unwrap());
    }

    #[test]
    fn degree_one_orthogonalization_data_is_injective() {
        let (n, cap) = (2, 1);
        let a = generic(n, cap);
        let singles: Vec<_> = admissible_letters(n).into_iter().filter(|l| l.iota != 0).collect();
        assert_eq!(singles.len(), 3);
        let mut seen: Vec<CoeffTable> = vec![];
        for mask in 0..(1u32 << singles.len()) {
            let mut p = FreeCoeffData::new(n, true);
            for (b, l) in singles.iter().enumerate() {
                if (mask >> b) & 1 == 1 {
                    p.insert(TableKey::new(0, vec![*l], 0), Rational::new(b as i64 + 1, 2)).unwrap();
                }
            }
            let t = CoeffTable::table_of(&custom_orth_eval(&p, &a, cap).unwrap(), 1).unwrap();
            assert!(!seen.contains(&t));
            seen.push(t);
        }
    }
}
