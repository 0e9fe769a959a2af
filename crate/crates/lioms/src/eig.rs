//! Dense Hermitian diagonalization and the eigenstate-ordering permutation
//! that turns an eigenvector matrix into a quasi-local unitary.
//!
//! Ordering rule: every eigenstate is assigned to the basis vector on which
//! it carries its largest absolute amplitude. Conflicts (two eigenstates
//! claiming the same basis vector) are resolved by a global greedy pass over
//! all `(eigenstate, basis, amplitude)` candidates in descending amplitude
//! order, which reduces to the simple rule whenever the dominant components
//! are unique. After placement each column's phase is fixed so its assigned
//! dominant component is real and nonnegative, making the output
//! bit-reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use ndarray::prelude::*;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::chain::SiteRange;
use crate::error::{Error, Result};
use crate::ops::{DenseOperator, OperatorKind};

/// Raw eigendecomposition of a Hermitian operator: ascending eigenvalues,
/// orthonormal eigenvectors in matching column order.
#[derive(Debug, Clone)]
pub struct RawEigensystem {
    pub values: Vec<f64>,
    pub vectors: Array2<C64>,
    pub support: SiteRange,
}

/// Eigenvector matrix after permutation ordering and phase gauge fixing.
///
/// Column `j` holds the eigenstate assigned to basis index `j`;
/// `permutation[k]` records the basis index assigned to raw eigenindex `k`.
#[derive(Debug, Clone)]
pub struct OrderedUnitary {
    matrix: Array2<C64>,
    permutation: Vec<usize>,
    source_support: SiteRange,
}

impl OrderedUnitary {
    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn support(&self) -> SiteRange {
        self.source_support
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// View as a unitary [`DenseOperator`] on the source support.
    pub fn as_operator(&self) -> DenseOperator {
        DenseOperator::from_parts(
            self.source_support,
            self.matrix.clone(),
            OperatorKind::Unitary,
        )
    }
}

/// Diagonalize a Hermitian operator.
pub fn eig_hermitian(op: &DenseOperator) -> Result<RawEigensystem> {
    if op.kind() != OperatorKind::Hermitian {
        return Err(Error::Contract(
            "eig_hermitian requires a Hermitian-tagged operator".to_string(),
        ));
    }
    // The solver normalizes row-major input by a plain axis swap, which for
    // complex Hermitian matrices diagonalizes the conjugate instead. Feed it
    // a column-major copy so no normalization happens and the eigenvectors
    // come back in the input basis.
    let n = op.dim();
    let mut fortran: Array2<C64> = Array2::zeros((n, n).f());
    fortran.assign(op.matrix());
    let (values, vectors) = fortran
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Contract(format!("eigendecomposition failed: {e}")))?;
    Ok(RawEigensystem {
        values: values.to_vec(),
        vectors,
        support: op.support(),
    })
}

#[derive(Debug)]
struct Candidate {
    mag: f64,
    basis: usize,
    eig: usize,
    rank: usize,
}

// Max-heap priority: larger magnitude first; ties broken toward lower basis
// index, then lower eigenindex.
impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.mag
            .total_cmp(&other.mag)
            .then_with(|| other.basis.cmp(&self.basis))
            .then_with(|| other.eig.cmp(&self.eig))
    }
}

/// Assign each eigenvector to a basis index by globally greedy descending
/// amplitude, permute the columns accordingly, and fix phases.
///
/// The assignment is a k-way merge over per-column candidate lists, which
/// visits candidates in exactly the globally sorted order without holding
/// all `n^2` triples at once.
pub fn order_eigenstates(raw: &RawEigensystem) -> OrderedUnitary {
    let n = raw.vectors.nrows();
    debug_assert_eq!(raw.vectors.ncols(), n);

    // Per-column basis indices sorted by descending amplitude, ties toward
    // lower basis index.
    let mut column_order: Vec<Vec<u32>> = Vec::with_capacity(n);
    for k in 0..n {
        let col = raw.vectors.column(k);
        let mut idx: Vec<u32> = (0..n as u32).collect();
        idx.sort_unstable_by(|&a, &b| {
            col[b as usize]
                .norm()
                .total_cmp(&col[a as usize].norm())
                .then_with(|| a.cmp(&b))
        });
        column_order.push(idx);
    }

    let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(n);
    for (k, order) in column_order.iter().enumerate() {
        let b = order[0] as usize;
        heap.push(Candidate {
            mag: raw.vectors[[b, k]].norm(),
            basis: b,
            eig: k,
            rank: 0,
        });
    }

    let mut assigned: Vec<Option<usize>> = vec![None; n];
    let mut basis_taken = vec![false; n];
    let mut remaining = n;
    while remaining > 0 {
        let c = heap.pop().expect("assignment always completes");
        if assigned[c.eig].is_some() {
            continue;
        }
        if !basis_taken[c.basis] {
            assigned[c.eig] = Some(c.basis);
            basis_taken[c.basis] = true;
            remaining -= 1;
        } else {
            let next = c.rank + 1;
            let b = column_order[c.eig][next] as usize;
            heap.push(Candidate {
                mag: raw.vectors[[b, c.eig]].norm(),
                basis: b,
                eig: c.eig,
                rank: next,
            });
        }
    }

    let permutation: Vec<usize> = assigned.into_iter().map(|b| b.unwrap()).collect();
    let mut matrix: Array2<C64> = Array2::zeros((n, n));
    for (k, &b) in permutation.iter().enumerate() {
        let dominant = raw.vectors[[b, k]];
        let mag = dominant.norm();
        let phase = if mag > 0.0 {
            dominant.conj() / mag
        } else {
            C64::new(1.0, 0.0)
        };
        let col = raw.vectors.column(k);
        for row in 0..n {
            matrix[[row, b]] = col[row] * phase;
        }
    }

    OrderedUnitary {
        matrix,
        permutation,
        source_support: raw.support,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainSpec;
    use crate::ops::{build_hamiltonian, identity, max_abs, unitarity_error};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn op_from(matrix: Array2<C64>) -> DenseOperator {
        let sites = matrix.nrows().trailing_zeros() as usize;
        DenseOperator::hermitian(SiteRange::new(1, sites).unwrap(), matrix).unwrap()
    }

    fn random_hermitian(rng: &mut StdRng, dim: usize) -> Array2<C64> {
        let raw: Array2<C64> =
            Array2::from_shape_fn((dim, dim), |_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let mut h = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                h[[i, j]] = 0.5 * (raw[[i, j]] + raw[[j, i]].conj());
            }
        }
        h
    }

    #[test]
    fn diagonal_matrix_sorted_ascending() {
        let mut m = Array2::zeros((2, 2));
        m[[0, 0]] = C64::new(3.0, 0.0);
        m[[1, 1]] = C64::new(1.0, 0.0);
        let raw = eig_hermitian(&op_from(m)).unwrap();
        assert!((raw.values[0] - 1.0).abs() < 1e-12);
        assert!((raw.values[1] - 3.0).abs() < 1e-12);
        assert!(raw.vectors[[1, 0]].norm() > 0.99);
        assert!(raw.vectors[[0, 1]].norm() > 0.99);
    }

    #[test]
    fn sigma_x_eigensystem() {
        let mut m = Array2::zeros((2, 2));
        m[[0, 1]] = C64::new(1.0, 0.0);
        m[[1, 0]] = C64::new(1.0, 0.0);
        let raw = eig_hermitian(&op_from(m)).unwrap();
        assert!((raw.values[0] + 1.0).abs() < 1e-12);
        assert!((raw.values[1] - 1.0).abs() < 1e-12);
        for k in 0..2 {
            assert!((raw.vectors[[0, k]].norm() - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruction_residual_random_64() {
        let mut rng = StdRng::seed_from_u64(42);
        let h = random_hermitian(&mut rng, 64);
        let op = op_from(h.clone());
        let raw = eig_hermitian(&op).unwrap();
        let mut recon: Array2<C64> = Array2::zeros((64, 64));
        for k in 0..64 {
            let v = raw.vectors.column(k);
            for i in 0..64 {
                for j in 0..64 {
                    recon[[i, j]] += v[i] * v[j].conj() * raw.values[k];
                }
            }
        }
        let diff = &recon - &h;
        assert!(max_abs(&diff) < 1e-9 * max_abs(&h).max(1.0));
        let vhv = crate::ops::adjoint(&raw.vectors).dot(&raw.vectors);
        let gram_err = max_abs(&(&vhv - &identity(64)));
        assert!(gram_err < 1e-10);
    }

    #[test]
    fn non_hermitian_rejected() {
        // Bypass the checked constructor with a general-kind operator.
        let mut m: Array2<C64> = Array2::zeros((2, 2));
        m[[0, 1]] = C64::new(1.0, 0.0);
        let op = DenseOperator::general(SiteRange::new(1, 1).unwrap(), m).unwrap();
        assert!(matches!(eig_hermitian(&op), Err(Error::Contract(_))));
    }

    #[test]
    fn identity_vectors_give_identity_ordering() {
        let raw = RawEigensystem {
            values: vec![0.0; 4],
            vectors: identity(4),
            support: SiteRange::new(1, 2).unwrap(),
        };
        let ord = order_eigenstates(&raw);
        assert_eq!(ord.permutation(), &[0, 1, 2, 3]);
        assert!(max_abs(&(ord.matrix() - &identity(4))) < 1e-15);
    }

    #[test]
    fn permutation_matrix_orders_to_identity() {
        // Columns are basis vectors in scrambled positions with phases.
        let mut v: Array2<C64> = Array2::zeros((4, 4));
        v[[2, 0]] = C64::new(0.0, 1.0);
        v[[0, 1]] = C64::new(-1.0, 0.0);
        v[[3, 2]] = C64::new(0.0, -1.0);
        v[[1, 3]] = C64::new(1.0, 0.0);
        let raw = RawEigensystem {
            values: vec![0.0; 4],
            vectors: v,
            support: SiteRange::new(1, 2).unwrap(),
        };
        let ord = order_eigenstates(&raw);
        assert_eq!(ord.permutation(), &[2, 0, 3, 1]);
        assert!(max_abs(&(ord.matrix() - &identity(4))) < 1e-15);
    }

    #[test]
    fn small_rotation_keeps_identity_assignment() {
        // 2D rotation by 30 degrees: the four candidate magnitudes are
        // cos(30), sin(30) twice, cos(30); both column peaks sit on distinct
        // rows, so the greedy pass assigns the identity permutation.
        let c = (30f64).to_radians().cos();
        let s = (30f64).to_radians().sin();
        let v = array![
            [C64::new(c, 0.0), C64::new(-s, 0.0)],
            [C64::new(s, 0.0), C64::new(c, 0.0)]
        ];
        let raw = RawEigensystem {
            values: vec![0.0, 1.0],
            vectors: v.clone(),
            support: SiteRange::new(1, 1).unwrap(),
        };
        let ord = order_eigenstates(&raw);
        assert_eq!(ord.permutation(), &[0, 1]);
        assert!(max_abs(&(ord.matrix() - &v)) < 1e-15);
    }

    #[test]
    fn ordering_invariant_under_column_permutation() {
        let mut rng = StdRng::seed_from_u64(7);
        let h = random_hermitian(&mut rng, 32);
        let raw = eig_hermitian(&op_from(h)).unwrap();
        let ord = order_eigenstates(&raw);

        let mut perm: Vec<usize> = (0..32).collect();
        for i in (1..32).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let mut shuffled: Array2<C64> = Array2::zeros((32, 32));
        let mut values = vec![0.0; 32];
        for (new_col, &old_col) in perm.iter().enumerate() {
            shuffled.column_mut(new_col).assign(&raw.vectors.column(old_col));
            values[new_col] = raw.values[old_col];
        }
        let ord2 = order_eigenstates(&RawEigensystem {
            values,
            vectors: shuffled,
            support: raw.support,
        });
        assert!(max_abs(&(ord.matrix() - ord2.matrix())) < 1e-12);
    }

    #[test]
    fn ordered_unitary_passes_unitarity_bound() {
        let spec = ChainSpec::sampled(5, 3, 5, 1.0, 1.0, 8.0).unwrap();
        let h = build_hamiltonian(&spec, spec.full_range()).unwrap();
        let ord = order_eigenstates(&eig_hermitian(&h).unwrap());
        assert!(unitarity_error(ord.matrix()) < 1e-10);
    }
}

