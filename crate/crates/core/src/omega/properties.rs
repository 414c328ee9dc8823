//! Exact checks on the generic formal input: fiber-star (FSt), symmetry (Σ),
//! orthogonal equivariance (O), filtration (Fil) and `H⁰`.

use crate::algebra::{tuple_affine, tuple_scale};
use crate::error::Result;
use crate::formal::FormalElement;
use crate::omega::step::TupleOp;
use crate::rational::Rational;

type F = FormalElement<Rational>;

/// Which conditions an operation satisfies up to the degree cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    /// Affine fiber linearity, probed at `t ∈ {1/3, 2, −1}`.
    pub fst: bool,
    /// Permutation symmetry over all of `Σ_n`.
    pub sigma: bool,
    /// Equivariance under a rational rotation of the first two inputs.
    pub orth: bool,
    /// `B_k` depends only on `A_1, …, A_k`.
    pub fil: bool,
    /// Positive scalar 0-homogeneity.
    pub h0: bool,
}

impl PropertyReport {
    pub fn summary(&self) -> String {
        let mark = |b: bool| if b { "✓" } else { "✗" };
        format!(
            "FSt {} Σ {} O {} Fil {} H⁰ {}",
            mark(self.fst),
            mark(self.sigma),
            mark(self.orth),
            mark(self.fil),
            mark(self.h0)
        )
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn permute(a: &[F], p: &[usize]) -> Vec<F> {
    p.iter().map(|&i| a[i].clone()).collect()
}

/// `U = [[3/5, 4/5], [−4/5, 3/5]]` acting on the first two entries.
fn rotate(a: &[F]) -> Vec<F> {
    let (c, s) = (Rational::new(3, 5), Rational::new(4, 5));
    let mut out = a.to_vec();
    out[0] = a[0].scale(&c).add(&a[1].scale(&s));
    out[1] = a[1].scale(&c).sub(&a[0].scale(&s));
    out
}

/// Adds a new degree-1 dependence to every input after position `k`.
fn disturb_after(a: &[F], k: usize) -> Vec<F> {
    let n = a.len();
    let all = ((1u32 << n) - 1) as u16;
    a.iter()
        .enumerate()
        .map(|(j, x)| {
            if j < k {
                return x.clone();
            }
            let bump = F::r_letter(n, x.cap(), 1, all).mul(&F::q_gen(n, x.cap(), j + 1));
            x.add(&bump.scale(&Rational::new(1, 3)))
        })
        .collect()
}

/// Evaluates the conditions for `psi` on the generic input of size `n` with cap `cap`.
pub fn property_checks<P: TupleOp>(psi: &P, n: usize, cap: usize) -> Result<PropertyReport> {
    let a = F::generic_input(n, cap);
    let b = psi.apply(&a)?;

    let mut fst = true;
    for t in [Rational::new(1, 3), Rational::from_integer(2), Rational::from_integer(-1)] {
        fst &= psi.apply(&tuple_affine(&a, &b, &t))? == b;
    }

    let mut sigma = true;
    for p in permutations(n) {
        sigma &= psi.apply(&permute(&a, &p))? == permute(&b, &p);
        if !sigma {
            break;
        }
    }

    let orth = n >= 2 && sigma && psi.apply(&rotate(&a))? == rotate(&b);

    let mut fil = true;
    for k in 1..n {
        let out = psi.apply(&disturb_after(&a, k))?;
        fil &= out[..k] == b[..k];
    }

    let mut h0 = true;
    for c in [Rational::from_integer(2), Rational::new(1, 3)] {
        h0 &= psi.apply(&tuple_scale(&a, &c))? == b;
    }

    Ok(PropertyReport { fst, sigma, orth, fil, h0 })
}
