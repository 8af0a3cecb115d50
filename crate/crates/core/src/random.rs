//! Haar-random states and unitaries for tests, sweeps and verification suites.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{vector, ComplexMatrix, C64};
use crate::states::{PureState, StateSpace};

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
        .collect()
}

/// Unit vector drawn uniformly from the sphere in `C^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        if let Some(v) = vector::normalized(&gaussian_vector(n, rng)) {
            return v;
        }
    }
}

pub fn random_state<R: Rng + ?Sized>(space: &StateSpace, rng: &mut R) -> PureState {
    PureState::new(space.clone(), random_unit_vector(space.dim(), rng)).expect("unit vector")
}

pub fn random_product_state<R: Rng + ?Sized>(space: &StateSpace, rng: &mut R) -> PureState {
    let factors: Vec<Vec<C64>> = space.dims().iter().map(|&d| random_unit_vector(d, rng)).collect();
    PureState::product(space, &factors).expect("factor dims match")
}

/// Haar unitary: Gram–Schmidt on a Ginibre matrix (columns are the basis).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let g = gaussian_vector(n, rng);
        let r = vector::residual(&vector::residual(&g, &cols), &cols);
        if vector::norm(&r) > 1e-6 {
            cols.push(vector::normalized(&r).expect("positive norm"));
        }
    }
    ComplexMatrix::from_columns(&cols)
}

/// `U_1 ⊗ … ⊗ U_K` with independent Haar factors.
pub fn random_local_unitary<R: Rng + ?Sized>(space: &StateSpace, rng: &mut R) -> ComplexMatrix {
    space
        .dims()
        .iter()
        .map(|&d| random_unitary(d, rng))
        .reduce(|a, b| a.kron(&b))
        .expect("at least two parties")
}

/// Random orthonormal basis of the span of the orthonormal `states`
/// (a Haar unitary mixing of the given list).
pub fn random_mixing<R: Rng + ?Sized>(states: &[PureState], rng: &mut R) -> Vec<PureState> {
    let n = states.len();
    let u = random_unitary(n, rng);
    (0..n)
        .map(|k| {
            let mut amps = vec![C64::new(0.0, 0.0); states[0].space().dim()];
            for (l, s) in states.iter().enumerate() {
                amps = vector::add_scaled(&amps, u[(l, k)], s.amplitudes());
            }
            PureState::normalized(states[0].space().clone(), amps).expect("nonzero combination")
        })
        .collect()
}
