//! Sublattices of `Z^n` through their Smith forms.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::sset::{smith_normal_form, IntegerMatrix, SmithForm};

/// The column span of an integer matrix.
#[derive(Clone, Debug)]
pub(crate) struct Lattice {
    smith: SmithForm,
    rank: usize,
    ambient: usize,
}

pub(crate) fn mat_vec(m: &IntegerMatrix, v: &[BigInt]) -> Vec<BigInt> {
    (0..m.rows()).map(|i| m.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub(crate) fn column(m: &IntegerMatrix, j: usize) -> Vec<BigInt> {
    (0..m.rows()).map(|i| m.get(i, j).clone()).collect()
}

impl Lattice {
    pub(crate) fn span(generators: &IntegerMatrix) -> Self {
        let smith = smith_normal_form(generators);
        let rank = smith.rank();
        Lattice { smith, rank, ambient: generators.rows() }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rank
    }

    fn divisor(&self, i: usize) -> &BigInt {
        self.smith.d.get(i, i)
    }

    /// Coordinates in the basis `d_i · U⁻¹e_i`, if `v` lies in the lattice.
    pub(crate) fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let w = mat_vec(&self.smith.u, v);
        if w[self.rank..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        w[..self.rank]
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let (q, r) = x.div_rem(self.divisor(i));
                r.is_zero().then_some(q)
            })
            .collect()
    }

    pub(crate) fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    /// `Z^n / L` as `(d_i)` per Smith coordinate: `0` for a free direction.
    pub(crate) fn quotient_orders(&self) -> Vec<BigInt> {
        (0..self.ambient)
            .map(|i| if i < self.rank { self.divisor(i).abs() } else { BigInt::zero() })
            .collect()
    }

    /// `U v`, reduced modulo the divisors: a canonical representative of the
    /// class of `v` in `Z^n / L`.
    pub(crate) fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut w = mat_vec(&self.smith.u, v);
        for (i, x) in w.iter_mut().enumerate().take(self.rank) {
            *x = x.mod_floor(&self.divisor(i).abs());
        }
        w
    }

    /// Back from Smith coordinates to the ambient basis.
    pub(crate) fn lift(&self, w: &[BigInt]) -> Vec<BigInt> {
        mat_vec(&self.smith.u_inv, w)
    }
}

/// Kernel of `m` as the columns of a matrix.
pub(crate) fn kernel(m: &IntegerMatrix) -> IntegerMatrix {
    let s = smith_normal_form(m);
    let r = s.rank();
    let cols = m.cols();
    let mut out = IntegerMatrix::zeros(cols, cols - r);
    for (k, j) in (r..cols).enumerate() {
        for i in 0..cols {
            out.set(i, k, s.v.get(i, j).clone());
        }
    }
    out
}
