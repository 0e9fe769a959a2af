//! Commutator figure of merit for pseudo-spin quality.
//!
//! The merit of `tau` against `h` is the normalized Hilbert-Schmidt norm of
//! their commutator, `(1/2^n)(Tr(h^2) - Tr(h tau h tau))`, zero iff `tau`
//! is exactly conserved. For a window operator inside a longer chain the
//! merit splits into an interior part against the window Hamiltonian and a
//! boundary part from the two bonds crossing the window edges.

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::ops::{
    build_hamiltonian, conjugate_by_pauli, trace_product, DenseOperator, PauliAxis,
};

/// Per-realization merit record for one pseudo-spin.
#[derive(Debug, Clone, PartialEq)]
pub struct MeritReport {
    pub site: usize,
    pub delta_total: f64,
    pub delta_interior: f64,
    pub delta_boundary: f64,
    pub disorder_w: f64,
    /// Block legs for network pseudo-spins, chain sites for exact ones.
    pub size_param: usize,
    pub realization: u64,
}

fn check_same_support(tau: &DenseOperator, h: &DenseOperator) -> Result<()> {
    if tau.support() != h.support() {
        return Err(Error::Argument(format!(
            "operator supports differ: [{}, {}] vs [{}, {}]",
            tau.support().first(),
            tau.support().last(),
            h.support().first(),
            h.support().last()
        )));
    }
    Ok(())
}

/// Figure of merit via the trace difference, one matrix product total.
pub fn merit(tau: &DenseOperator, h: &DenseOperator) -> Result<f64> {
    check_same_support(tau, h)?;
    let dim = h.dim() as f64;
    let ht = h.matrix().dot(tau.matrix());
    let tr_h2: f64 = ht.iter().map(|z| z.norm_sqr()).sum::<f64>();
    // Tr(h^2) = Tr((h tau)(h tau)^dagger) because tau^2 = I.
    let tr_cross = trace_product(&ht, &ht).re;
    Ok((tr_h2 - tr_cross) / dim)
}

/// Figure of merit via the explicit commutator,
/// `(1/2^n)(1/2) Tr([tau, h][tau, h]^dagger)`.
///
/// Free of the cancellation the trace-difference path suffers when the
/// commutator is at machine level, so exact conservation shows up as
/// ~1e-20 instead of ~1e-11.
pub fn merit_commutator(tau: &DenseOperator, h: &DenseOperator) -> Result<f64> {
    check_same_support(tau, h)?;
    let dim = h.dim() as f64;
    let th = tau.matrix().dot(h.matrix());
    let n = th.nrows();
    let mut acc = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            // [tau, h][i,j] = th[i,j] - ht[i,j]; ht = th^dagger adjusted for
            // Hermitian factors: (h tau)[i,j] = conj((tau h)[j,i]).
            let c = th[[i, j]] - th[[j, i]].conj();
            acc += c.norm_sqr();
        }
    }
    Ok(0.5 * acc / dim)
}

/// Closed form of the bare-spin merit against the full chain: `8 J^2` in
/// the bulk, `4 J^2` at the chain ends, independent of anisotropy, fields,
/// and disorder.
pub fn sigma_merit_analytic(spec: &ChainSpec, site: usize) -> Result<f64> {
    if !spec.full_range().contains(site) {
        return Err(Error::Argument(format!(
            "site {site} outside chain of {} sites",
            spec.n_sites
        )));
    }
    let j2 = spec.coupling_j * spec.coupling_j;
    Ok(if site == 1 || site == spec.n_sites {
        4.0 * j2
    } else {
        8.0 * j2
    })
}

/// Split the merit of a window-supported pseudo-spin into the interior
/// contribution (against the window Hamiltonian) and the boundary
/// contribution of the two edge-crossing bonds.
///
/// Window edges that coincide with chain ends have no crossing bond; their
/// boundary share is dropped.
pub fn merit_split(
    tau: &DenseOperator,
    spec: &ChainSpec,
    site: usize,
    size_param: usize,
    realization: u64,
) -> Result<MeritReport> {
    let window = tau.support();
    if !spec.full_range().contains_range(&window) {
        return Err(Error::Argument(format!(
            "window [{}, {}] outside chain of {} sites",
            window.first(),
            window.last(),
            spec.n_sites
        )));
    }
    let h_c = build_hamiltonian(spec, window)?;
    let delta_interior = merit_commutator(tau, &h_c)?;

    let dim = window.dim() as f64;
    let j2 = spec.coupling_j * spec.coupling_j;
    let d2 = spec.anisotropy_delta * spec.anisotropy_delta;
    let shell = 2.0 * j2 + d2;

    let mut delta_boundary = 0.0;
    for (edge, is_chain_end) in [
        (window.first(), window.first() == 1),
        (window.last(), window.last() == spec.n_sites),
    ] {
        if is_chain_end {
            continue;
        }
        let mut bracket = 0.0;
        for (axis, coeff) in [
            (PauliAxis::X, j2),
            (PauliAxis::Y, j2),
            (PauliAxis::Z, d2),
        ] {
            let conj = conjugate_by_pauli(tau.matrix(), window, edge, axis)?;
            bracket += coeff * trace_product(&conj, tau.matrix()).re / dim;
        }
        delta_boundary += shell - bracket;
    }

    Ok(MeritReport {
        site,
        delta_total: delta_interior + delta_boundary,
        delta_interior,
        delta_boundary,
        disorder_w: spec.disorder_w,
        size_param,
        realization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::SiteRange;
    use crate::exact::exact_liom;
    use crate::ops::{adjoint, pauli, symmetrize, OperatorKind};
    use ndarray::prelude::*;
    use num_complex::Complex64 as C64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn commuting_operators_have_zero_merit() {
        let spec = ChainSpec::sampled(1, 0, 4, 0.0, 1.0, 5.0).unwrap();
        let sup = spec.full_range();
        let h = build_hamiltonian(&spec, sup).unwrap();
        let tau = pauli(2, PauliAxis::Z, sup).unwrap();
        assert!(merit(&tau, &h).unwrap().abs() < 1e-12);
        assert!(merit_commutator(&tau, &h).unwrap() < 1e-20);
    }

    #[test]
    fn bare_spin_anchors() {
        let spec = ChainSpec::sampled(2, 0, 6, 1.0, 0.8, 7.0).unwrap();
        let sup = spec.full_range();
        let h = build_hamiltonian(&spec, sup).unwrap();
        let bulk = pauli(3, PauliAxis::Z, sup).unwrap();
        assert!((merit(&bulk, &h).unwrap() - 8.0).abs() < 1e-9);
        let edge = pauli(1, PauliAxis::Z, sup).unwrap();
        assert!((merit(&edge, &h).unwrap() - 4.0).abs() < 1e-9);
        assert!((sigma_merit_analytic(&spec, 3).unwrap() - 8.0).abs() < 1e-15);
        assert!((sigma_merit_analytic(&spec, 1).unwrap() - 4.0).abs() < 1e-15);
        assert!((sigma_merit_analytic(&spec, 6).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_merit_scales_with_j_squared() {
        let spec = ChainSpec::sampled(2, 0, 5, 2.0, 0.3, 3.0).unwrap();
        assert!((sigma_merit_analytic(&spec, 3).unwrap() - 32.0).abs() < 1e-12);
    }

    #[test]
    fn both_merit_paths_agree() {
        let spec = ChainSpec::sampled(4, 1, 5, 1.0, 1.0, 9.0).unwrap();
        let sup = spec.full_range();
        let h = build_hamiltonian(&spec, sup).unwrap();
        for site in 1..=5 {
            let tau = pauli(site, PauliAxis::Z, sup).unwrap();
            let a = merit(&tau, &h).unwrap();
            let b = merit_commutator(&tau, &h).unwrap();
            assert!((a - b).abs() < 1e-9, "site {site}: {a} vs {b}");
        }
    }

    #[test]
    fn merit_invariant_under_joint_conjugation() {
        let spec = ChainSpec::sampled(5, 2, 4, 1.0, 0.7, 6.0).unwrap();
        let sup = spec.full_range();
        let h = build_hamiltonian(&spec, sup).unwrap();
        let tau = pauli(2, PauliAxis::Z, sup).unwrap();
        let base = merit(&tau, &h).unwrap();

        // Random unitary from a random Hermitian's eigenvectors.
        let mut rng = StdRng::seed_from_u64(99);
        let raw: Array2<C64> = Array2::from_shape_fn((16, 16), |_| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let herm = symmetrize(&raw);
        let hop = DenseOperator::hermitian(sup, herm).unwrap();
        let u = crate::eig::eig_hermitian(&hop).unwrap().vectors;

        let tau_rot = adjoint(&u).dot(tau.matrix()).dot(&u);
        let h_rot = adjoint(&u).dot(h.matrix()).dot(&u);
        let tau_rot =
            DenseOperator::from_parts(sup, symmetrize(&tau_rot), OperatorKind::Hermitian);
        let h_rot = DenseOperator::from_parts(sup, symmetrize(&h_rot), OperatorKind::Hermitian);
        let rotated = merit(&tau_rot, &h_rot).unwrap();
        assert!((base - rotated).abs() < 1e-9, "{base} vs {rotated}");
    }

    #[test]
    fn split_boundary_anchors() {
        // Window of 4 sites centered in a 6-site chain. An interior bare
        // spin sees no boundary cost; an edge spin pays 4 (J = delta = 1).
        let spec = ChainSpec::sampled(6, 0, 6, 1.0, 1.0, 5.0).unwrap();
        let window = SiteRange::new(2, 5).unwrap();

        let tau_in = pauli(3, PauliAxis::Z, window).unwrap();
        let rep = merit_split(&tau_in, &spec, 3, 4, 0).unwrap();
        assert!(rep.delta_boundary.abs() < 1e-12, "{}", rep.delta_boundary);

        let tau_edge = pauli(2, PauliAxis::Z, window).unwrap();
        let rep = merit_split(&tau_edge, &spec, 2, 4, 0).unwrap();
        assert!((rep.delta_boundary - 4.0).abs() < 1e-9, "{}", rep.delta_boundary);
    }

    #[test]
    fn split_interior_vanishes_for_exact_window_liom() {
        let parent = ChainSpec::sampled(8, 3, 7, 1.0, 1.0, 8.0).unwrap();
        let window = SiteRange::new(2, 6).unwrap();
        let sub = parent.sub_spec(&window).unwrap();
        let tau_local = exact_liom(&sub, 3, 12).unwrap();
        let tau = DenseOperator::from_parts(
            window,
            tau_local.matrix().clone(),
            OperatorKind::Hermitian,
        );
        let rep = merit_split(&tau, &parent, 4, 5, 3).unwrap();
        assert!(rep.delta_interior < 1e-18, "{}", rep.delta_interior);
        assert!(rep.delta_boundary >= -1e-9);
        assert!((rep.delta_total - rep.delta_interior - rep.delta_boundary).abs() < 1e-12);
    }

    #[test]
    fn split_drops_chain_end_edges() {
        // Window flush with the chain: no crossing bonds at all, so the
        // boundary share vanishes for any window operator.
        let spec = ChainSpec::sampled(9, 0, 4, 1.0, 1.0, 5.0).unwrap();
        let window = spec.full_range();
        let tau = pauli(1, PauliAxis::Z, window).unwrap();
        let rep = merit_split(&tau, &spec, 1, 4, 0).unwrap();
        assert_eq!(rep.delta_boundary, 0.0);
    }

    #[test]
    fn split_totals_match_widened_window_merit() {
        // Merit of tau against the window Hamiltonian plus its two crossing
        // bonds, evaluated on a widened window, equals interior + boundary.
        let spec = ChainSpec::sampled(10, 1, 6, 1.0, 0.9, 7.0).unwrap();
        let window = SiteRange::new(2, 5).unwrap();
        let wide = SiteRange::new(1, 6).unwrap();
        let sub = spec.sub_spec(&window).unwrap();
        let tau_local = exact_liom(&sub, 2, 12).unwrap();
        let tau_win = DenseOperator::from_parts(
            window,
            tau_local.matrix().clone(),
            OperatorKind::Hermitian,
        );
        let rep = merit_split(&tau_win, &spec, 3, 4, 0).unwrap();

        let tau_wide = crate::ops::embed_operator(&tau_win, wide).unwrap();
        let mut h_env = build_hamiltonian(&spec, window).unwrap();
        h_env = crate::ops::embed_operator(&h_env, wide).unwrap();
        let mut m = h_env.into_matrix();
        m += crate::ops::bond_term(&spec, 1, wide).unwrap().matrix();
        m += crate::ops::bond_term(&spec, 5, wide).unwrap().matrix();
        let h_wide = DenseOperator::from_parts(wide, m, OperatorKind::Hermitian);
        let direct = merit_commutator(&tau_wide, &h_wide).unwrap();
        assert!(
            (direct - rep.delta_total).abs() < 1e-9,
            "direct {direct} vs split {}",
            rep.delta_total
        );
    }
}
