//! Two-layer block-unitary network on a window of `2b` sites.
//!
//! The window splits into two `b`-site blocks. Layer one diagonalizes each
//! block Hamiltonian and orders the eigenstates. Layer two acts on the
//! middle `b` sites bridging the blocks: its Hamiltonian collects the
//! normalized partial-trace projections of the two rotated block
//! Hamiltonians plus the central bond rewritten in the rotated basis. The
//! window unitary is `(U_left kron U_right) . embed(U_bridge)`; conjugating
//! `sigma^z` on a middle-half site by it yields a pseudo-spin that commutes
//! exactly with everything outside the window.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::chain::{ChainSpec, SiteRange};
use crate::eig::{eig_hermitian, order_eigenstates, OrderedUnitary};
use crate::error::{Error, Result};
use crate::exact::{check_dense, conjugate_diag_signs};
use crate::ops::{
    adjoint, embed_operator, kron, partial_trace_normalized, pauli,
    symmetrize, z_sign, DenseOperator, OperatorKind, PauliAxis,
};

/// Geometry of one window: `block_legs` sites per unitary, window width
/// `2 * block_legs`, quarters of `block_legs / 2` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowLayout {
    block_legs: usize,
    window: SiteRange,
}

impl WindowLayout {
    /// Window of `2 * block_legs` sites starting at `first_site`.
    pub fn new(block_legs: usize, first_site: usize) -> Result<Self> {
        if block_legs < 2 || block_legs % 2 != 0 {
            return Err(Error::Argument(format!(
                "block legs must be even and at least 2, got {block_legs}"
            )));
        }
        let window = SiteRange::new(first_site, first_site + 2 * block_legs - 1)?;
        Ok(Self { block_legs, window })
    }

    pub fn block_legs(&self) -> usize {
        self.block_legs
    }

    pub fn quarter(&self) -> usize {
        self.block_legs / 2
    }

    pub fn window(&self) -> SiteRange {
        self.window
    }

    pub fn left_block(&self) -> SiteRange {
        SiteRange::new(self.window.first(), self.window.first() + self.block_legs - 1).unwrap()
    }

    pub fn right_block(&self) -> SiteRange {
        SiteRange::new(self.window.first() + self.block_legs, self.window.last()).unwrap()
    }

    /// Middle `block_legs`-site range bridging the two blocks.
    pub fn middle_block(&self) -> SiteRange {
        let first = self.window.first() + self.quarter();
        SiteRange::new(first, first + self.block_legs - 1).unwrap()
    }

    /// Left-middle window site; pseudo-spins are reported here.
    pub fn center_site(&self) -> usize {
        self.window.first() + self.block_legs - 1
    }

    /// Sites a pseudo-spin may be built on: within half a block of the
    /// center on either side.
    pub fn middle_half_contains(&self, site: usize) -> bool {
        let center = self.center_site();
        site + self.quarter() >= center && site <= center + self.quarter()
    }
}

/// The assembled window network: two first-layer block unitaries plus the
/// second-layer bridge unitary on the middle block.
#[derive(Debug, Clone)]
pub struct TwoLayerUnitary {
    layout: WindowLayout,
    u_left: OrderedUnitary,
    u_right: OrderedUnitary,
    u_bridge: OrderedUnitary,
}

impl TwoLayerUnitary {
    /// Diagonalize both blocks, build the bridge Hamiltonian, and
    /// diagonalize it.
    pub fn build(spec: &ChainSpec, layout: &WindowLayout, dense_limit: usize) -> Result<Self> {
        let (u_left, u_right, h1_diag, h2_diag) = first_layer(spec, layout, dense_limit)?;
        let h3 = bridge_hamiltonian(spec, layout, &u_left, &u_right, &h1_diag, &h2_diag)?;
        let u_bridge = second_layer(&h3)?;
        Ok(Self {
            layout: *layout,
            u_left,
            u_right,
            u_bridge,
        })
    }

    pub fn layout(&self) -> &WindowLayout {
        &self.layout
    }

    pub fn u_left(&self) -> &OrderedUnitary {
        &self.u_left
    }

    pub fn u_right(&self) -> &OrderedUnitary {
        &self.u_right
    }

    pub fn u_bridge(&self) -> &OrderedUnitary {
        &self.u_bridge
    }

    /// Assemble from already-built parts; supports must match the layout.
    pub fn from_parts(
        layout: WindowLayout,
        u_left: OrderedUnitary,
        u_right: OrderedUnitary,
        u_bridge: OrderedUnitary,
    ) -> Result<Self> {
        if u_left.support() != layout.left_block()
            || u_right.support() != layout.right_block()
            || u_bridge.support() != layout.middle_block()
        {
            return Err(Error::Argument(
                "unitary supports do not match the window layout".to_string(),
            ));
        }
        Ok(Self {
            layout,
            u_left,
            u_right,
            u_bridge,
        })
    }
}

/// Diagonalize and order the two block Hamiltonians; also return the
/// rotated (near-diagonal) block Hamiltonians `U_i^dagger H_i U_i`.
pub fn first_layer(
    spec: &ChainSpec,
    layout: &WindowLayout,
    dense_limit: usize,
) -> Result<(OrderedUnitary, OrderedUnitary, DenseOperator, DenseOperator)> {
    if !spec.full_range().contains_range(&layout.window()) {
        return Err(Error::Argument(format!(
            "window [{}, {}] outside chain of {} sites",
            layout.window().first(),
            layout.window().last(),
            spec.n_sites
        )));
    }
    check_dense(layout.block_legs(), dense_limit, "block diagonalization")?;

    let mut rotated = Vec::with_capacity(2);
    let mut unitaries = Vec::with_capacity(2);
    for block in [layout.left_block(), layout.right_block()] {
        let h = crate::ops::build_hamiltonian(spec, block)?;
        let u = order_eigenstates(&eig_hermitian(&h)?);
        let hd = symmetrize(&adjoint(u.matrix()).dot(h.matrix()).dot(u.matrix()));
        rotated.push(DenseOperator::from_parts(block, hd, OperatorKind::Hermitian));
        unitaries.push(u);
    }
    let h2_diag = rotated.pop().unwrap();
    let h1_diag = rotated.pop().unwrap();
    let u_right = unitaries.pop().unwrap();
    let u_left = unitaries.pop().unwrap();
    Ok((u_left, u_right, h1_diag, h2_diag))
}

/// Normalized partial trace onto `keep`, then expansion to `target`,
/// re-symmetrized.
pub fn project_and_expand(
    op: &DenseOperator,
    keep: SiteRange,
    target: SiteRange,
) -> Result<DenseOperator> {
    if !target.contains_range(&keep) {
        return Err(Error::Argument(format!(
            "keep [{}, {}] not inside target [{}, {}]",
            keep.first(),
            keep.last(),
            target.first(),
            target.last()
        )));
    }
    let projected = partial_trace_normalized(op, keep)?;
    let kept = DenseOperator::general(keep, symmetrize(&projected))?;
    let expanded = embed_operator(&kept, target)?;
    Ok(DenseOperator::from_parts(
        target,
        symmetrize(expanded.matrix()),
        OperatorKind::Hermitian,
    ))
}

/// Second-layer Hamiltonian on the middle block: projections of the two
/// rotated block Hamiltonians plus the central bond in the rotated basis.
pub fn bridge_hamiltonian(
    spec: &ChainSpec,
    layout: &WindowLayout,
    u_left: &OrderedUnitary,
    u_right: &OrderedUnitary,
    h1_diag: &DenseOperator,
    h2_diag: &DenseOperator,
) -> Result<DenseOperator> {
    let q = layout.quarter();
    let left = layout.left_block();
    let right = layout.right_block();
    let mid = layout.middle_block();
    let keep_left = SiteRange::new(left.first() + q, left.last())?;
    let keep_right = SiteRange::new(right.first(), right.first() + q - 1)?;

    let h01 = project_and_expand(h1_diag, keep_left, mid)?;
    let h02 = project_and_expand(h2_diag, keep_right, mid)?;

    // Central bond rewritten through the first layer: rotate the boundary
    // Paulis by their block unitary, project each onto its adjacent
    // quarter, expand onto the middle block, then recombine.
    let mut h12: Array2<C64> = Array2::zeros((mid.dim(), mid.dim()));
    let coeffs = [
        (PauliAxis::X, spec.coupling_j),
        (PauliAxis::Y, spec.coupling_j),
        (PauliAxis::Z, spec.anisotropy_delta),
    ];
    for (axis, coeff) in coeffs {
        let sig_l = pauli(left.last(), axis, left)?;
        let rot_l = adjoint(u_left.matrix())
            .dot(sig_l.matrix())
            .dot(u_left.matrix());
        let rot_l = DenseOperator::from_parts(left, symmetrize(&rot_l), OperatorKind::Hermitian);
        let p_l = project_and_expand(&rot_l, keep_left, mid)?;

        let sig_r = pauli(right.first(), axis, right)?;
        let rot_r = adjoint(u_right.matrix())
            .dot(sig_r.matrix())
            .dot(u_right.matrix());
        let rot_r = DenseOperator::from_parts(right, symmetrize(&rot_r), OperatorKind::Hermitian);
        let p_r = project_and_expand(&rot_r, keep_right, mid)?;

        let prod = p_l.matrix().dot(p_r.matrix());
        h12.zip_mut_with(&prod, |acc, &v| *acc += C64::new(coeff, 0.0) * v);
    }

    let total = h01.matrix() + h02.matrix() + &h12;
    Ok(DenseOperator::from_parts(
        mid,
        symmetrize(&total),
        OperatorKind::Hermitian,
    ))
}

/// Diagonalize and order the bridge Hamiltonian.
pub fn second_layer(h3: &DenseOperator) -> Result<OrderedUnitary> {
    Ok(order_eigenstates(&eig_hermitian(h3)?))
}

/// Dense window unitary `(U_left kron U_right) . embed(U_bridge)`.
///
/// The product is contracted blockwise over the bridge's middle index
/// instead of multiplying two full window-dimension matrices.
pub fn compose_window_unitary(net: &TwoLayerUnitary, dense_limit: usize) -> Result<DenseOperator> {
    let layout = net.layout();
    check_dense(2 * layout.block_legs(), dense_limit, "window unitary")?;
    let b = layout.block_legs();
    let m = 1usize << (b / 2);
    let bd = 1usize << b;
    let n = bd * bd;

    let outer = kron(net.u_left.matrix(), net.u_right.matrix());
    let u3 = net.u_bridge.matrix();
    let mut out: Array2<C64> = Array2::zeros((n, n));
    // Column (q1', c', q4') of the product gathers the q1'/q4' slice of the
    // outer factor against bridge column c'.
    let mut gathered: Array2<C64> = Array2::zeros((n, bd));
    for q1 in 0..m {
        for q4 in 0..m {
            for mid in 0..bd {
                let col = q1 * bd * m + mid * m + q4;
                gathered.column_mut(mid).assign(&outer.column(col));
            }
            let block = gathered.dot(u3);
            for c in 0..bd {
                let col = q1 * bd * m + c * m + q4;
                out.column_mut(col).assign(&block.column(c));
            }
        }
    }
    Ok(DenseOperator::from_parts(
        layout.window(),
        out,
        OperatorKind::Unitary,
    ))
}

/// Pseudo-spin on `site` from a freshly built window network.
pub fn tn_liom(
    spec: &ChainSpec,
    layout: &WindowLayout,
    site: usize,
    dense_limit: usize,
) -> Result<DenseOperator> {
    let net = TwoLayerUnitary::build(spec, layout, dense_limit)?;
    tn_liom_from_net(&net, site, dense_limit)
}

/// Pseudo-spin `tau = U_C sigma^z_site U_C^dagger` on the window.
pub fn tn_liom_from_net(
    net: &TwoLayerUnitary,
    site: usize,
    dense_limit: usize,
) -> Result<DenseOperator> {
    let layout = net.layout();
    if !layout.middle_half_contains(site) {
        return Err(Error::Argument(format!(
            "site {site} outside the middle half of window [{}, {}]",
            layout.window().first(),
            layout.window().last()
        )));
    }
    let u_c = compose_window_unitary(net, dense_limit)?;
    let width = layout.window().width();
    let slot = site - layout.window().first();
    let tau = conjugate_diag_signs(u_c.matrix(), width, slot);
    Ok(DenseOperator::from_parts(
        layout.window(),
        tau,
        OperatorKind::Hermitian,
    ))
}

/// Normalized Hilbert-Schmidt norm of `[tau_i, sigma^z_j]` for a window
/// pseudo-spin, contracted through the network structure without ever
/// forming the window-dimension unitary or the pseudo-spin itself.
///
/// `liom_site` must lie in the window's middle half. Probe sites outside
/// the window commute identically and return zero.
pub fn liom_sigma_z_commutator(
    net: &TwoLayerUnitary,
    liom_site: usize,
    probe_site: usize,
) -> Result<f64> {
    let layout = net.layout();
    if !layout.middle_half_contains(liom_site) {
        return Err(Error::Argument(format!(
            "pseudo-spin site {liom_site} outside the middle half of the window"
        )));
    }
    if !layout.window().contains(probe_site) {
        return Ok(0.0);
    }
    let b = layout.block_legs();
    let q = layout.quarter();
    let m = 1usize << q;
    let bd = 1usize << b;
    let u3 = net.u_bridge.matrix();
    let win_first = layout.window().first();
    // 1-based position of the pseudo-spin site inside the window.
    let liom_internal = liom_site - win_first + 1;

    let probe_left = layout.left_block().contains(probe_site);
    // A pseudo-spin seeded in the outermost quarter never crosses the
    // bridge, so it stays supported on one block and commutes exactly with
    // probes in the other block.
    if !probe_left && liom_internal <= q {
        return Ok(0.0);
    }
    if probe_left && liom_internal > 3 * q {
        return Ok(0.0);
    }

    let (block_u, block_range) = if probe_left {
        (net.u_left.matrix(), layout.left_block())
    } else {
        (net.u_right.matrix(), layout.right_block())
    };

    // B = U_block^dagger sigma^z_probe U_block on the probe's block.
    let slot = probe_site - block_range.first();
    let mut scaled = block_u.clone();
    for row in 0..bd {
        let s = z_sign(row, b, slot);
        scaled.row_mut(row).mapv_inplace(|z| z * s);
    }
    let bmat = adjoint(block_u).dot(&scaled);

    // The rotated probe acts as identity on the far outer quarter, so the
    // conjugation by the bridge reduces onto the three adjacent quarters:
    // A = sum_k K_k^dagger B K_k with K_k a bridge-row slice padded by an
    // identity on the probe-side outer quarter.
    let eye_m = crate::ops::identity(m);
    let mut a_hat: Array2<C64> = Array2::zeros((m * bd, m * bd));
    for outer in 0..m {
        let k = if probe_left {
            // Rows (a2, a3 = outer) of the bridge: w[a2, c] = U3[a2 m + outer, c]
            let mut w: Array2<C64> = Array2::zeros((m, bd));
            for a2 in 0..m {
                w.row_mut(a2).assign(&u3.row(a2 * m + outer));
            }
            kron(&eye_m, &w)
        } else {
            // Rows (a2 = outer, a3): a contiguous row slice of the bridge.
            let w = u3.slice(s![outer * m..(outer + 1) * m, ..]).to_owned();
            kron(&w, &eye_m)
        };
        a_hat += &adjoint(&k).dot(&bmat).dot(&k);
    }

    // Signs of sigma^z at the pseudo-spin site over the reduced
    // three-quarter space (3q sites).
    let red_sites = 3 * q;
    let red_dim = m * bd;
    let red_slot = if probe_left {
        liom_internal - 1
    } else {
        liom_internal - q - 1
    };
    let mut signs = vec![0.0f64; red_dim];
    for (v, s) in signs.iter_mut().enumerate() {
        *s = z_sign(v, red_sites, red_slot);
    }

    let mut q_hat = 0.0f64;
    for p in 0..red_dim {
        let sp = signs[p];
        for r in 0..red_dim {
            q_hat += sp * signs[r] * a_hat[[p, r]].norm_sqr();
        }
    }
    Ok((1.0 - q_hat / (red_dim as f64)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{
        build_hamiltonian, commutator_hs_normalized, identity, max_abs, unitarity_error,
    };

    fn layout4() -> WindowLayout {
        WindowLayout::new(4, 1).unwrap()
    }

    #[test]
    fn layout_geometry() {
        let l = WindowLayout::new(4, 3).unwrap();
        assert_eq!(l.window(), SiteRange::new(3, 10).unwrap());
        assert_eq!(l.left_block(), SiteRange::new(3, 6).unwrap());
        assert_eq!(l.right_block(), SiteRange::new(7, 10).unwrap());
        assert_eq!(l.middle_block(), SiteRange::new(5, 8).unwrap());
        assert_eq!(l.center_site(), 6);
        assert!(l.middle_half_contains(4));
        assert!(l.middle_half_contains(8));
        assert!(!l.middle_half_contains(3));
        assert!(!l.middle_half_contains(9));
        assert!(WindowLayout::new(3, 1).is_err());
        assert!(WindowLayout::new(0, 1).is_err());
    }

    #[test]
    fn diagonal_blocks_give_identity_unitaries() {
        let spec = ChainSpec::sampled(2, 0, 8, 0.0, 0.0, 5.0).unwrap();
        let layout = layout4();
        let (u1, u2, h1d, h2d) = first_layer(&spec, &layout, 12).unwrap();
        assert!(max_abs(&(u1.matrix() - &identity(16))) < 1e-12);
        assert!(max_abs(&(u2.matrix() - &identity(16))) < 1e-12);
        let h1 = build_hamiltonian(&spec, layout.left_block()).unwrap();
        assert!(max_abs(&(h1d.matrix() - h1.matrix())) < 1e-12);
        let h2 = build_hamiltonian(&spec, layout.right_block()).unwrap();
        assert!(max_abs(&(h2d.matrix() - h2.matrix())) < 1e-12);
    }

    #[test]
    fn first_layer_preserves_spectrum_and_reconstructs() {
        let spec = ChainSpec::sampled(3, 1, 4, 1.0, 1.0, 8.0).unwrap();
        let layout = WindowLayout::new(2, 1).unwrap();
        let (u1, _u2, h1d, _h2d) = first_layer(&spec, &layout, 12).unwrap();
        let h1 = build_hamiltonian(&spec, layout.left_block()).unwrap();

        // Similarity invariance: eigenvalue multisets agree.
        let mut lam_raw = eig_hermitian(&h1).unwrap().values;
        let mut lam_rot: Vec<f64> = (0..4).map(|i| h1d.matrix()[[i, i]].re).collect();
        lam_raw.sort_by(f64::total_cmp);
        lam_rot.sort_by(f64::total_cmp);
        for (a, b) in lam_raw.iter().zip(lam_rot.iter()) {
            assert!((a - b).abs() < 1e-9);
        }

        // Off-diagonal residue of the rotated block Hamiltonian.
        let scale = max_abs(h1.matrix());
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(h1d.matrix()[[i, j]].norm() < 1e-9 * scale);
                }
            }
        }

        // U Lambda U^dagger reconstructs H1.
        let recon = u1.matrix().dot(h1d.matrix()).dot(&adjoint(u1.matrix()));
        assert!(max_abs(&(&recon - h1.matrix())) < 1e-9 * scale.max(1.0));
    }

    #[test]
    fn project_and_expand_identity_normalization() {
        let op = DenseOperator::hermitian(SiteRange::new(1, 4).unwrap(), identity(16)).unwrap();
        let out = project_and_expand(&op, SiteRange::new(3, 4).unwrap(), SiteRange::new(3, 6).unwrap())
            .unwrap();
        assert!(max_abs(&(out.matrix() - &identity(16))) < 1e-12);
    }

    #[test]
    fn project_and_expand_keeps_kept_site_operators() {
        let sup = SiteRange::new(1, 4).unwrap();
        let z3 = pauli(3, PauliAxis::Z, sup).unwrap();
        let keep = SiteRange::new(3, 4).unwrap();
        let out = project_and_expand(&z3, keep, keep).unwrap();
        let expect = pauli(3, PauliAxis::Z, keep).unwrap();
        assert!(max_abs(&(out.matrix() - expect.matrix())) < 1e-12);
    }

    #[test]
    fn bridge_reduces_to_middle_fields_without_couplings() {
        let spec = ChainSpec::sampled(6, 0, 8, 0.0, 0.0, 4.0).unwrap();
        let layout = layout4();
        let (u1, u2, h1d, h2d) = first_layer(&spec, &layout, 12).unwrap();
        let h3 = bridge_hamiltonian(&spec, &layout, &u1, &u2, &h1d, &h2d).unwrap();
        let mid = layout.middle_block();
        let mut expect: Array2<C64> = Array2::zeros((16, 16));
        for site in mid.sites() {
            let z = pauli(site, PauliAxis::Z, mid).unwrap();
            expect.zip_mut_with(z.matrix(), |a, &b| {
                *a += C64::new(spec.field(site), 0.0) * b
            });
        }
        assert!(max_abs(&(h3.matrix() - &expect)) < 1e-12);
        assert!(h3.trace().norm() < 1e-12);

        let u3 = second_layer(&h3).unwrap();
        assert!(max_abs(&(u3.matrix() - &identity(16))) < 1e-12);
    }

    #[test]
    fn second_layer_diagonalizes_the_bridge() {
        let spec = ChainSpec::sampled(8, 2, 8, 1.0, 1.0, 10.0).unwrap();
        let layout = layout4();
        let (u1, u2, h1d, h2d) = first_layer(&spec, &layout, 12).unwrap();
        let h3 = bridge_hamiltonian(&spec, &layout, &u1, &u2, &h1d, &h2d).unwrap();
        let u3 = second_layer(&h3).unwrap();
        assert!(unitarity_error(u3.matrix()) < 1e-10);
        let rot = adjoint(u3.matrix()).dot(h3.matrix()).dot(u3.matrix());
        let scale = max_abs(h3.matrix());
        for i in 0..16 {
            for j in 0..16 {
                if i != j {
                    assert!(rot[[i, j]].norm() < 1e-9 * scale);
                }
            }
        }
    }

    #[test]
    fn identity_network_composes_to_identity() {
        let spec = ChainSpec::sampled(4, 0, 4, 0.0, 0.0, 3.0).unwrap();
        let layout = WindowLayout::new(2, 1).unwrap();
        let net = TwoLayerUnitary::build(&spec, &layout, 12).unwrap();
        let u = compose_window_unitary(&net, 12).unwrap();
        assert!(max_abs(&(u.matrix() - &identity(16))) < 1e-12);
    }

    #[test]
    fn composed_unitary_matches_explicit_kronecker_assembly() {
        let spec = ChainSpec::sampled(5, 0, 4, 1.0, 0.7, 9.0).unwrap();
        let layout = WindowLayout::new(2, 1).unwrap();
        let net = TwoLayerUnitary::build(&spec, &layout, 12).unwrap();
        let u = compose_window_unitary(&net, 12).unwrap();
        assert!(unitarity_error(u.matrix()) < 1e-10);

        let outer = kron(net.u_left().matrix(), net.u_right().matrix());
        let embedded = kron(
            &kron(&identity(2), net.u_bridge().matrix()),
            &identity(2),
        );
        let expect = outer.dot(&embedded);
        assert!(max_abs(&(u.matrix() - &expect)) < 1e-12);
    }

    #[test]
    fn zero_coupling_pseudo_spin_is_bare_sigma_z() {
        let spec = ChainSpec::sampled(7, 0, 8, 0.0, 0.9, 6.0).unwrap();
        let layout = layout4();
        let site = layout.center_site();
        let tau = tn_liom(&spec, &layout, site, 12).unwrap();
        let z = pauli(site, PauliAxis::Z, layout.window()).unwrap();
        assert!(max_abs(&(tau.matrix() - z.matrix())) < 1e-12);
    }

    #[test]
    fn pseudo_spin_squares_to_identity() {
        let spec = ChainSpec::sampled(7, 1, 8, 1.0, 1.0, 12.0).unwrap();
        let layout = layout4();
        let tau = tn_liom(&spec, &layout, layout.center_site(), 12).unwrap();
        let sq = tau.matrix().dot(tau.matrix());
        assert!(max_abs(&(&sq - &identity(256))) < 1e-9);
        assert!(tau.trace().norm() < 1e-9);
    }

    #[test]
    fn pseudo_spin_site_must_sit_in_middle_half() {
        let spec = ChainSpec::sampled(7, 2, 8, 1.0, 1.0, 12.0).unwrap();
        let layout = layout4();
        assert!(matches!(
            tn_liom(&spec, &layout, 1, 12),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            tn_liom(&spec, &layout, 8, 12),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn structured_commutator_matches_dense_path() {
        let spec = ChainSpec::sampled(13, 0, 8, 1.0, 1.0, 10.0).unwrap();
        let layout = layout4();
        let net = TwoLayerUnitary::build(&spec, &layout, 12).unwrap();
        let tau = tn_liom_from_net(&net, layout.center_site(), 12).unwrap();
        for probe in 1..=8 {
            let sigma = pauli(probe, PauliAxis::Z, SiteRange::new(probe, probe).unwrap()).unwrap();
            let dense = commutator_hs_normalized(&tau, &sigma).unwrap();
            let fast = liom_sigma_z_commutator(&net, layout.center_site(), probe).unwrap();
            assert!(
                (dense - fast).abs() < 1e-9 * dense.max(1.0),
                "probe {probe}: dense {dense} fast {fast}"
            );
        }
        // Outside the window the commutator vanishes identically.
        assert_eq!(
            liom_sigma_z_commutator(&net, layout.center_site(), 9).unwrap(),
            0.0
        );
    }
}
