//! State spaces, pure states, the two-qubit coefficient-matrix and
//! magic-basis pictures, and pure-state concurrence.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{vector, ComplexMatrix, C64, I, ONE, ZERO};

/// Deviation from unit norm tolerated by [`PureState::new`].
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSpace {
    dims: Vec<usize>,
}

impl StateSpace {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidSpace(format!("need at least two parties, got {dims:?}")));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidSpace(format!("party dimension {d} < 2 in {dims:?}")));
        }
        Ok(Self { dims: dims.to_vec() })
    }

    pub fn qubits(k: usize) -> Self {
        Self { dims: vec![2; k] }
    }

    pub fn two_qubits() -> Self {
        Self::qubits(2)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.dims == [2, 2]
    }

    /// Bipartite 2⊗2 or 2⊗3 (either order), where PPT is equivalent to separability.
    pub fn ppt_is_exact(&self) -> bool {
        matches!(self.dims.as_slice(), [2, 2] | [2, 3] | [3, 2])
    }

    /// One representative per bipartition: every nonempty proper subset of
    /// parties that excludes party 0.
    pub fn bipartitions(&self) -> Vec<Vec<usize>> {
        let k = self.parties();
        (1u32..1 << (k - 1))
            .map(|mask| (1..k).filter(|p| mask & (1 << (p - 1)) != 0).collect())
            .collect()
    }
}

/// Split a flat index into per-party digits, party 0 most significant.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// Amplitude matrix across a cut: rows run over the parties in `rows`
/// (in the given order), columns over the remaining parties in order.
pub fn reshape(amps: &[C64], dims: &[usize], rows: &[usize]) -> ComplexMatrix {
    let cols: Vec<usize> = (0..dims.len()).filter(|p| !rows.contains(p)).collect();
    let nr: usize = rows.iter().map(|&p| dims[p]).product();
    let nc: usize = cols.iter().map(|&p| dims[p]).product();
    let mut m = ComplexMatrix::zeros(nr, nc);
    for (idx, &a) in amps.iter().enumerate() {
        let d = digits(idx, dims);
        let r = rows.iter().fold(0, |acc, &p| acc * dims[p] + d[p]);
        let c = cols.iter().fold(0, |acc, &p| acc * dims[p] + d[p]);
        m[(r, c)] = a;
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: StateSpace,
    amps: Vec<C64>,
}

impl PureState {
    /// Fails unless the vector has the right length, finite entries and unit norm.
    pub fn new(space: StateSpace, amps: Vec<C64>) -> Result<Self> {
        let n = Self::check_amps(&space, &amps)?;
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { space, amps })
    }

    /// Rescales to unit norm; fails only on the zero vector or bad length.
    pub fn normalized(space: StateSpace, amps: Vec<C64>) -> Result<Self> {
        let n = Self::check_amps(&space, &amps)?;
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(Self { space, amps: amps.into_iter().map(|a| a / n).collect() })
    }

    fn check_amps(space: &StateSpace, amps: &[C64]) -> Result<f64> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a space of dimension {}",
                amps.len(),
                space.dim()
            )));
        }
        if amps.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(vector::norm(amps))
    }

    pub fn basis(space: &StateSpace, digits: &[usize]) -> Self {
        assert_eq!(digits.len(), space.parties());
        let idx = digits.iter().zip(space.dims()).fold(0, |acc, (&d, &n)| acc * n + d);
        Self { space: space.clone(), amps: vector::basis_vector(space.dim(), idx) }
    }

    /// Normalized tensor product of per-party vectors.
    pub fn product(space: &StateSpace, factors: &[Vec<C64>]) -> Result<Self> {
        if factors.len() != space.parties()
            || factors.iter().zip(space.dims()).any(|(f, &d)| f.len() != d)
        {
            return Err(Error::DimensionMismatch("factor lengths do not match the space".into()));
        }
        Self::normalized(space.clone(), vector::tensor(factors))
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn dims(&self) -> &[usize] {
        self.space.dims()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn inner(&self, other: &Self) -> C64 {
        vector::inner(&self.amps, &other.amps)
    }

    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.amps)
    }

    /// Equal up to a global phase: `|<a|b>| ≥ 1 − tol`.
    pub fn same_ray(&self, other: &Self, tol: f64) -> bool {
        self.space == other.space && self.inner(other).norm() >= 1.0 - tol
    }

    /// Amplitude matrix with the listed parties as rows.
    pub fn reshape(&self, rows: &[usize]) -> ComplexMatrix {
        reshape(&self.amps, self.space.dims(), rows)
    }
}

fn require_two_qubit(psi: &PureState) -> Result<()> {
    if psi.space.is_two_qubit() {
        Ok(())
    } else {
        Err(Error::WrongSpace(psi.dims().to_vec()))
    }
}

/// `M` with `|Ψ> = (I⊗M)|Φ+>`. Index identity: `M[j][i] = √2·<ij|Ψ>`, i.e.
/// `M = √2·Aᵀ` for the amplitude matrix `A[i][j] = <ij|Ψ>`.
pub fn coeff_matrix(psi: &PureState) -> Result<ComplexMatrix> {
    require_two_qubit(psi)?;
    let a = psi.amplitudes();
    let r = std::f64::consts::SQRT_2;
    Ok(ComplexMatrix::from_fn(2, 2, |j, i| a[2 * i + j] * r))
}

/// Inverse of [`coeff_matrix`]; the result is normalized iff `tr(M†M) = 2`.
pub fn from_coeff_matrix(m: &ComplexMatrix) -> Result<PureState> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::DimensionMismatch("coefficient matrix must be 2x2".into()));
    }
    let amps = (0..4).map(|idx| m[(idx % 2, idx / 2)] * FRAC_1_SQRT_2).collect();
    PureState::new(StateSpace::two_qubits(), amps)
}

pub fn det2(m: &ComplexMatrix) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// `|det M|`; equals `2|a00·a11 − a01·a10|`.
pub fn concurrence(psi: &PureState) -> Result<f64> {
    require_two_qubit(psi)?;
    Ok(two_qubit_concurrence(psi.amplitudes()))
}

/// `2|a00·a11 − a01·a10|` for a unit two-qubit amplitude vector, clamped to 1.
pub fn two_qubit_concurrence(a: &[C64]) -> f64 {
    (2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0)
}

/// The magic basis: (|00⟩+|11⟩)/√2, i(|00⟩−|11⟩)/√2, i(|01⟩+|10⟩)/√2, (|01⟩−|10⟩)/√2.
pub fn magic_basis() -> [Vec<C64>; 4] {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let si = I * FRAC_1_SQRT_2;
    [vec![s, ZERO, ZERO, s], vec![si, ZERO, ZERO, -si], vec![ZERO, si, si, ZERO], vec![ZERO, s, -s, ZERO]]
}

pub fn magic_state(k: usize) -> PureState {
    PureState { space: StateSpace::two_qubits(), amps: magic_basis()[k].clone() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagicBasisCoords {
    pub lambdas: [C64; 4],
}

impl MagicBasisCoords {
    /// `|Σ λ_k²|`.
    pub fn concurrence(&self) -> f64 {
        self.lambdas.iter().map(|l| l * l).sum::<C64>().norm()
    }
}

pub fn magic_coords(psi: &PureState) -> Result<MagicBasisCoords> {
    require_two_qubit(psi)?;
    let basis = magic_basis();
    let mut lambdas = [ZERO; 4];
    for (l, b) in lambdas.iter_mut().zip(&basis) {
        *l = vector::inner(b, psi.amplitudes());
    }
    Ok(MagicBasisCoords { lambdas })
}

/// `D − 1` orthonormal states spanning `{phi}^⊥`, deterministic pivoting.
pub fn orthocomplement_basis(phi: &PureState) -> Vec<PureState> {
    orthocomplement_states(std::slice::from_ref(phi))
}

/// Orthonormal basis of the complement of the span of orthonormal `states`.
pub fn orthocomplement_states(states: &[PureState]) -> Vec<PureState> {
    let Some(first) = states.first() else { return Vec::new() };
    let space = first.space.clone();
    let vecs: Vec<Vec<C64>> = states.iter().map(|s| s.amps.clone()).collect();
    vector::orthocomplement(&vecs, space.dim())
        .into_iter()
        .map(|amps| PureState { space: space.clone(), amps })
        .collect()
}

/// Largest `|<a|b> − δ_ab|` over a list of vectors.
pub fn gram_defect(states: &[Vec<C64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate().skip(i) {
            let want = if i == j { ONE } else { ZERO };
            worst = worst.max((vector::inner(a, b) - want).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_state, random_unitary};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn two(amps: [f64; 4]) -> PureState {
        PureState::normalized(StateSpace::two_qubits(), amps.iter().map(|&x| c(x)).collect()).unwrap()
    }

    #[test]
    fn space_validation() {
        assert!(StateSpace::new(&[2]).is_err());
        assert!(StateSpace::new(&[2, 1]).is_err());
        assert_eq!(StateSpace::new(&[2, 3, 2]).unwrap().dim(), 12);
        assert_eq!(StateSpace::qubits(3).bipartitions(), vec![vec![1], vec![2], vec![1, 2]]);
    }

    #[test]
    fn coeff_matrix_examples() {
        let phi_plus = two([1.0, 0.0, 0.0, 1.0]);
        assert!(coeff_matrix(&phi_plus).unwrap().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let m = coeff_matrix(&PureState::basis(&StateSpace::two_qubits(), &[0, 0])).unwrap();
        let want = ComplexMatrix::real_diag(&[std::f64::consts::SQRT_2, 0.0]);
        assert!(m.max_abs_diff(&want) < 1e-15);

        // cosθ|01> + sinθ|10>: <01|Ψ> lands at M[1][0], <10|Ψ> at M[0][1].
        let t: f64 = 0.3;
        let m = coeff_matrix(&two([0.0, t.cos(), t.sin(), 0.0])).unwrap();
        let r = std::f64::consts::SQRT_2;
        let want = ComplexMatrix::from_real_rows(&[&[0.0, r * t.sin()], &[r * t.cos(), 0.0]]);
        assert!(m.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn coeff_matrix_reconstructs_through_i_tensor_m() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_state(&StateSpace::two_qubits(), &mut rng);
        let m = coeff_matrix(&psi).unwrap();
        let phi_plus = [c(FRAC_1_SQRT_2), ZERO, ZERO, c(FRAC_1_SQRT_2)];
        let rebuilt = ComplexMatrix::identity(2).kron(&m).mat_vec(&phi_plus);
        for (x, y) in rebuilt.iter().zip(psi.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
        let back = from_coeff_matrix(&m).unwrap();
        for (x, y) in back.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn concurrence_examples() {
        let sp = StateSpace::two_qubits();
        assert_eq!(concurrence(&PureState::basis(&sp, &[0, 1])).unwrap(), 0.0);
        assert!((concurrence(&two([1.0, 0.0, 0.0, 1.0])).unwrap() - 1.0).abs() < 1e-15);
        for t in [0.1f64, 0.5, 1.0, 2.0] {
            let got = concurrence(&two([t.cos(), 0.0, 0.0, t.sin()])).unwrap();
            assert!((got - (2.0 * t).sin().abs()).abs() < 1e-14);
        }
        let w = PureState::normalized(StateSpace::qubits(3), vec![ONE; 8]).unwrap();
        assert_eq!(concurrence(&w), Err(Error::WrongSpace(vec![2, 2, 2])));
    }

    #[test]
    fn magic_basis_examples() {
        let coords = magic_coords(&magic_state(0)).unwrap();
        assert!((coords.lambdas[0] - ONE).norm() < 1e-15);
        assert!((coords.concurrence() - 1.0).abs() < 1e-15);
        let p = magic_coords(&PureState::basis(&StateSpace::two_qubits(), &[0, 1])).unwrap();
        assert!(p.concurrence() < 1e-15);
        let mags: Vec<Vec<C64>> = magic_basis().to_vec();
        assert!(gram_defect(&mags) < 1e-15);
    }

    #[test]
    fn orthocomplement_examples() {
        let sp = StateSpace::two_qubits();
        let phi = PureState::basis(&sp, &[0, 0]);
        let comp = orthocomplement_basis(&phi);
        assert_eq!(comp.len(), 3);
        let mut all: Vec<Vec<C64>> = comp.iter().map(|s| s.amplitudes().to_vec()).collect();
        all.push(phi.amplitudes().to_vec());
        assert!(gram_defect(&all) < 1e-10);

        let w = PureState::normalized(
            StateSpace::qubits(3),
            vec![ZERO, ONE, ONE, ZERO, ONE, ZERO, ZERO, ZERO],
        )
        .unwrap();
        assert_eq!(orthocomplement_basis(&w).len(), 7);
    }

    #[test]
    fn reshape_orders_rows_and_columns() {
        let sp = StateSpace::new(&[2, 3, 2]).unwrap();
        let psi = PureState::basis(&sp, &[1, 2, 0]);
        let m = psi.reshape(&[2, 0]);
        assert_eq!((m.rows(), m.cols()), (4, 3));
        assert_eq!(m[(1, 2)], ONE);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn concurrence_formulas_agree(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = random_state(&StateSpace::two_qubits(), &mut rng);
            let det = concurrence(&psi).unwrap();
            let magic = magic_coords(&psi).unwrap();
            let norm2: f64 = magic.lambdas.iter().map(C64::norm_sqr).sum();
            prop_assert!((norm2 - 1.0).abs() < 1e-10);
            prop_assert!((det - magic.concurrence()).abs() < 1e-10);
            prop_assert!((0.0..=1.0).contains(&det));
        }

        #[test]
        fn concurrence_local_unitary_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = random_state(&StateSpace::two_qubits(), &mut rng);
            let u = random_unitary(2, &mut rng).kron(&random_unitary(2, &mut rng));
            let moved = PureState::new(StateSpace::two_qubits(), u.mat_vec(psi.amplitudes())).unwrap();
            prop_assert!((concurrence(&psi).unwrap() - concurrence(&moved).unwrap()).abs() < 1e-10);
        }
    }
}
