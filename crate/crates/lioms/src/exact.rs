//! Full-chain exact-diagonalization paths: reference pseudo-spins from the
//! whole Hamiltonian and the exact post-quench entropy trace. Both serve as
//! oracles for the tensor-network approximations and are gated by a dense
//! capacity limit to avoid accidental huge allocations.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::chain::ChainSpec;
use crate::eig::{eig_hermitian, order_eigenstates};
use crate::entangle::{neel_state, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::ops::{adjoint, build_hamiltonian, symmetrize, z_sign, DenseOperator, OperatorKind};

/// Default cap, in sites, on windows that may be materialized densely.
pub const DEFAULT_DENSE_LIMIT: usize = 12;

pub(crate) fn check_dense(sites: usize, dense_limit: usize, what: &str) -> Result<()> {
    if sites > dense_limit {
        return Err(Error::Capacity(format!(
            "{what} needs {sites} dense sites (dimension {}), above the configured limit of {dense_limit}; \
             raise the dense limit explicitly if this is intended",
            1usize << sites,
        )));
    }
    Ok(())
}

/// Conjugate `sigma^z` at `site` by the ordered eigenvector unitary of the
/// full-chain Hamiltonian: `tau = U z U^dagger`.
pub fn exact_liom(spec: &ChainSpec, site: usize, dense_limit: usize) -> Result<DenseOperator> {
    check_dense(spec.n_sites, dense_limit, "exact pseudo-spin")?;
    let range = spec.full_range();
    if !range.contains(site) {
        return Err(Error::Argument(format!(
            "site {site} outside chain of {} sites",
            spec.n_sites
        )));
    }
    let h = build_hamiltonian(spec, range)?;
    let u = order_eigenstates(&eig_hermitian(&h)?);
    let tau = conjugate_diag_signs(u.matrix(), spec.n_sites, site - 1);
    Ok(DenseOperator::from_parts(
        range,
        tau,
        OperatorKind::Hermitian,
    ))
}

/// `U diag(signs) U^dagger` where the signs are sigma^z values at `slot`.
pub(crate) fn conjugate_diag_signs(u: &Array2<C64>, width: usize, slot: usize) -> Array2<C64> {
    let n = u.nrows();
    let mut scaled = u.clone();
    for j in 0..n {
        let s = z_sign(j, width, slot);
        scaled.column_mut(j).mapv_inplace(|z| z * s);
    }
    symmetrize(&scaled.dot(&adjoint(u)))
}

/// Exact post-quench von Neumann entropy across the cut after `[1, cut]`,
/// starting from the alternating product state, at each requested time.
pub fn exact_entropy_trace(
    spec: &ChainSpec,
    cut: usize,
    times: &[f64],
    dense_limit: usize,
) -> Result<Vec<f64>> {
    check_dense(spec.n_sites, dense_limit, "exact entropy evolution")?;
    if cut == 0 || cut >= spec.n_sites {
        return Err(Error::Argument(format!(
            "cut {cut} must split the chain of {} sites into two nonempty halves",
            spec.n_sites
        )));
    }
    let h = build_hamiltonian(spec, spec.full_range())?;
    let eig = eig_hermitian(&h)?;
    let psi0 = neel_state(spec.n_sites)?;
    // Amplitudes of the initial state in the eigenbasis.
    let amps: Array1<C64> = adjoint(&eig.vectors).dot(&psi0);

    let dim_a = 1usize << cut;
    let dim_b = 1usize << (spec.n_sites - cut);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let phased: Array1<C64> = Array1::from_iter(
            amps.iter()
                .zip(eig.values.iter())
                .map(|(a, &e)| a * C64::new(0.0, -e * t).exp()),
        );
        let psi_t: Array1<C64> = eig.vectors.dot(&phased);
        let m = psi_t
            .into_shape_with_order((dim_a, dim_b))
            .expect("state reshapes into a bipartition matrix");
        let rho = m.dot(&adjoint(&m));
        out.push(von_neumann_entropy(&rho)?);
    }
    Ok(out)
}
