//! Post-quench entanglement growth in the two-block reduction.
//!
//! The window Hamiltonian rotated by the window unitary is replaced by its
//! diagonal, so time evolution becomes pure phases in the pseudo-spin
//! basis. Crossing the bipartition cut then involves exactly one unitary,
//! the bridge: evolve `U_C^dagger |psi0>` by phases, apply the embedded
//! bridge, trace out the right block, and read off the von Neumann entropy.

use ndarray::prelude::*;
use ndarray_linalg::{EigValsh, UPLO};
use num_complex::Complex64 as C64;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::exact::check_dense;
use crate::network::{compose_window_unitary, TwoLayerUnitary, WindowLayout};
use crate::ops::{adjoint, build_hamiltonian, hermiticity_error, z_sign};

/// Strictly increasing positive times, in units of the inverse exchange
/// coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Argument("time grid must not be empty".to_string()));
        }
        for w in points.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Argument(format!(
                    "time grid must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if !points.iter().all(|t| t.is_finite() && *t > 0.0) {
            return Err(Error::Argument(
                "time grid entries must be finite and positive".to_string(),
            ));
        }
        Ok(Self { points })
    }

    /// `n` points log-spaced on `[t_min, t_max]` inclusive.
    pub fn log_spaced(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("time grid must not be empty".to_string()));
        }
        if !(t_min > 0.0 && t_min < t_max && t_max.is_finite()) {
            return Err(Error::Argument(format!(
                "need 0 < t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if n == 1 {
            return Self::new(vec![t_min]);
        }
        let l0 = t_min.log10();
        let l1 = t_max.log10();
        let step = (l1 - l0) / (n - 1) as f64;
        Self::new(
            (0..n)
                .map(|i| 10f64.powf(l0 + step * i as f64))
                .collect(),
        )
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Default sweep: 48 points log-spaced over seven decades.
pub fn default_time_grid() -> TimeGrid {
    TimeGrid::log_spaced(1e-1, 1e6, 48).expect("default grid is valid")
}

/// Entropy-versus-time record for one disorder realization.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementTrace {
    pub grid: TimeGrid,
    pub entropy: Vec<f64>,
    pub block_legs: usize,
    pub disorder_w: f64,
    pub seed: u64,
    pub realization: u64,
}

/// Alternating product state `|up down up down ...>` starting spin-up.
pub fn neel_state(n_sites: usize) -> Result<Array1<C64>> {
    if n_sites == 0 {
        return Err(Error::Argument("state needs at least one site".to_string()));
    }
    let mut index = 0usize;
    for site in 1..=n_sites {
        if site % 2 == 0 {
            index |= 1 << (n_sites - site);
        }
    }
    let mut psi = Array1::zeros(1 << n_sites);
    psi[index] = C64::new(1.0, 0.0);
    Ok(psi)
}

/// Von Neumann entropy in nats of a density matrix.
///
/// Eigenvalues below `1e-14` are exact zeros of the rank-deficient reduced
/// state at machine precision and contribute nothing.
pub fn von_neumann_entropy(rho: &Array2<C64>) -> Result<f64> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::Argument("density matrix must be square".to_string()));
    }
    let trace: C64 = rho.diag().sum();
    if (trace.re - 1.0).abs() > 1e-8 || trace.im.abs() > 1e-8 {
        return Err(Error::Contract(format!(
            "density matrix trace {trace} deviates from 1"
        )));
    }
    if hermiticity_error(rho) > 1e-8 {
        return Err(Error::Contract(
            "density matrix is not Hermitian within tolerance".to_string(),
        ));
    }
    let vals = rho
        .eigvalsh(UPLO::Lower)
        .map_err(|e| Error::Contract(format!("density matrix diagonalization failed: {e}")))?;
    if vals.iter().any(|&v| v < -1e-8) {
        return Err(Error::Contract(format!(
            "density matrix has negative eigenvalue {:.3e}",
            vals.iter().cloned().fold(f64::INFINITY, f64::min)
        )));
    }
    Ok(vals
        .iter()
        .filter(|&&v| v > 1e-14)
        .map(|&v| -v * v.ln())
        .sum())
}

/// Diagonal of the rotated window Hamiltonian `U_C^dagger H U_C`.
///
/// Two interchangeable paths: a dense conjugation when the window fits the
/// dense budget, and a term-wise contraction through the network structure
/// that never materializes window-dimension matrices. Only terms with both
/// endpoints inside the window enter.
pub fn diagonal_hamiltonian(
    net: &TwoLayerUnitary,
    spec: &ChainSpec,
    dense_limit: usize,
) -> Result<Vec<f64>> {
    if 2 * net.layout().block_legs() <= dense_limit {
        diagonal_hamiltonian_dense(net, spec, dense_limit)
    } else {
        diagonal_hamiltonian_termwise(net, spec)
    }
}

/// Dense path: conjugate the window Hamiltonian by the composed unitary.
pub fn diagonal_hamiltonian_dense(
    net: &TwoLayerUnitary,
    spec: &ChainSpec,
    dense_limit: usize,
) -> Result<Vec<f64>> {
    let layout = net.layout();
    let u_c = compose_window_unitary(net, dense_limit)?;
    let h = build_hamiltonian(spec, layout.window())?;
    let w = h.matrix().dot(u_c.matrix());
    let n = w.nrows();
    let mut d = vec![0.0f64; n];
    for (j, dj) in d.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for v in 0..n {
            acc += u_c.matrix()[[v, j]].conj() * w[[v, j]];
        }
        *dj = acc.re;
    }
    Ok(d)
}

/// Term-wise path: rotated block Hamiltonians contribute through the
/// squared bridge amplitudes; the central bond contributes through
/// quadratic forms of the bridge columns with the outer quarter indices
/// held fixed.
pub fn diagonal_hamiltonian_termwise(net: &TwoLayerUnitary, spec: &ChainSpec) -> Result<Vec<f64>> {
    let layout = net.layout();
    if !spec.full_range().contains_range(&layout.window()) {
        return Err(Error::Argument(format!(
            "window [{}, {}] outside chain of {} sites",
            layout.window().first(),
            layout.window().last(),
            spec.n_sites
        )));
    }
    let b = layout.block_legs();
    let q = layout.quarter();
    let m = 1usize << q;
    let bd = 1usize << b;
    let u1 = net.u_left().matrix();
    let u2 = net.u_right().matrix();
    let u3 = net.u_bridge().matrix();

    // Rotated block energies lambda_i[j] = (U_i^dagger H_i U_i)[j, j].
    let rayleigh = |u: &Array2<C64>, block| -> Result<Vec<f64>> {
        let h = build_hamiltonian(spec, block)?;
        let w = h.matrix().dot(u);
        Ok((0..bd)
            .map(|j| {
                let mut acc = C64::new(0.0, 0.0);
                for v in 0..bd {
                    acc += u[[v, j]].conj() * w[[v, j]];
                }
                acc.re
            })
            .collect())
    };
    let lam1 = rayleigh(u1, layout.left_block())?;
    let lam2 = rayleigh(u2, layout.right_block())?;

    // Squared bridge amplitudes folded over one inner quarter index.
    let mut fold_a3 = Array2::<f64>::zeros((m, bd)); // sum over a3 at fixed a2
    let mut fold_a2 = Array2::<f64>::zeros((m, bd)); // sum over a2 at fixed a3
    for a2 in 0..m {
        for a3 in 0..m {
            let row = a2 * m + a3;
            for c in 0..bd {
                let p = u3[[row, c]].norm_sqr();
                fold_a3[[a2, c]] += p;
                fold_a2[[a3, c]] += p;
            }
        }
    }
    let mut d1 = Array2::<f64>::zeros((m, bd));
    let mut d2 = Array2::<f64>::zeros((m, bd));
    for c in 0..bd {
        for q1 in 0..m {
            let mut acc = 0.0;
            for a2 in 0..m {
                acc += lam1[q1 * m + a2] * fold_a3[[a2, c]];
            }
            d1[[q1, c]] = acc;
        }
        for q4 in 0..m {
            let mut acc = 0.0;
            for a3 in 0..m {
                acc += lam2[a3 * m + q4] * fold_a2[[a3, c]];
            }
            d2[[q4, c]] = acc;
        }
    }

    // Central bond: sigma at the facing block edges rotated by the block
    // unitaries, then contracted with bridge columns per (q1, q4).
    let rotate_edge = |u: &Array2<C64>, slot: usize, axis: u8| -> Array2<C64> {
        let mask = 1usize << (b - 1 - slot);
        let mut su: Array2<C64> = Array2::zeros((bd, bd));
        for v in 0..bd {
            match axis {
                0 => su.row_mut(v).assign(&u.row(v ^ mask)),
                1 => {
                    let f = if v & mask != 0 {
                        C64::new(0.0, 1.0)
                    } else {
                        C64::new(0.0, -1.0)
                    };
                    let src = u.row(v ^ mask).to_owned();
                    su.row_mut(v).assign(&(&src * f));
                }
                _ => {
                    let s = z_sign(v, b, slot);
                    let src = u.row(v).to_owned();
                    su.row_mut(v).assign(&(&src * C64::new(s, 0.0)));
                }
            }
        }
        adjoint(u).dot(&su)
    };

    let mut d_bond = vec![0.0f64; m * bd * m];
    let coeffs = [spec.coupling_j, spec.coupling_j, spec.anisotropy_delta];
    for (axis, &coeff) in coeffs.iter().enumerate() {
        if coeff == 0.0 {
            continue;
        }
        let x = rotate_edge(u1, b - 1, axis as u8);
        let y = rotate_edge(u2, 0, axis as u8);
        let x_blocks: Vec<Array2<C64>> = (0..m)
            .map(|q1| x.slice(s![q1 * m..(q1 + 1) * m, q1 * m..(q1 + 1) * m]).to_owned())
            .collect();
        let y_blocks: Vec<Array2<C64>> = (0..m)
            .map(|q4| {
                Array2::from_shape_fn((m, m), |(a3, b3)| y[[a3 * m + q4, b3 * m + q4]])
            })
            .collect();
        for c in 0..bd {
            let v_c = Array2::from_shape_fn((m, m), |(a2, a3)| u3[[a2 * m + a3, c]]);
            let v_adj = adjoint(&v_c);
            for (q1, xq) in x_blocks.iter().enumerate() {
                let g = v_adj.dot(&xq.dot(&v_c));
                for (q4, yq) in y_blocks.iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for a3 in 0..m {
                        for b3 in 0..m {
                            acc += g[[a3, b3]] * yq[[a3, b3]];
                        }
                    }
                    d_bond[(q1 * bd + c) * m + q4] += coeff * acc.re;
                }
            }
        }
    }

    let mut d = vec![0.0f64; bd * bd];
    for q1 in 0..m {
        for c in 0..bd {
            for q4 in 0..m {
                d[q1 * bd * m + c * m + q4] =
                    d1[[q1, c]] + d2[[q4, c]] + d_bond[(q1 * bd + c) * m + q4];
            }
        }
    }
    Ok(d)
}

/// Phase evolution plus one bridge application, reusing the rotated
/// initial state across the whole time sweep.
pub struct TwoBlockEvolver<'a> {
    net: &'a TwoLayerUnitary,
    d: &'a [f64],
    psi_rot: Array1<C64>,
}

impl<'a> TwoBlockEvolver<'a> {
    pub fn new(net: &'a TwoLayerUnitary, d: &'a [f64], psi0: &Array1<C64>) -> Result<Self> {
        let layout = net.layout();
        let b = layout.block_legs();
        let dim = 1usize << (2 * b);
        if psi0.len() != dim {
            return Err(Error::Argument(format!(
                "state has {} amplitudes but the window needs {dim}",
                psi0.len()
            )));
        }
        if d.len() != dim {
            return Err(Error::Argument(format!(
                "diagonal has {} entries but the window needs {dim}",
                d.len()
            )));
        }
        let norm: f64 = psi0.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::Argument(format!(
                "initial state norm^2 = {norm} deviates from 1"
            )));
        }

        // psi'' = embed(U3)^dagger (U1^dagger kron U2^dagger) psi0
        let bd = 1usize << b;
        let mat = psi0
            .to_owned()
            .into_shape_with_order((bd, bd))
            .expect("window state reshapes to block matrix");
        let u2conj = net.u_right().matrix().map(|z| z.conj());
        let rotated = adjoint(net.u_left().matrix()).dot(&mat).dot(&u2conj);
        let psi = rotated
            .into_shape_with_order(bd * bd)
            .expect("block matrix flattens");
        let psi_rot = apply_bridge(net, &psi, true);
        Ok(Self { net, d, psi_rot })
    }

    /// Reduced density matrix of the left block at time `t`.
    pub fn rho_at(&self, t: f64) -> Array2<C64> {
        let b = self.net.layout().block_legs();
        let bd = 1usize << b;
        let phased: Array1<C64> = Array1::from_iter(
            self.psi_rot
                .iter()
                .zip(self.d.iter())
                .map(|(a, &e)| a * C64::new(0.0, -e * t).exp()),
        );
        let bridged = apply_bridge(self.net, &phased, false);
        let m = bridged
            .into_shape_with_order((bd, bd))
            .expect("window state reshapes to block matrix");
        m.dot(&adjoint(&m))
    }

    pub fn entropy_at(&self, t: f64) -> Result<f64> {
        von_neumann_entropy(&self.rho_at(t))
    }
}

/// Apply the embedded bridge (or its adjoint) to a window state.
fn apply_bridge(net: &TwoLayerUnitary, psi: &Array1<C64>, adjoint_side: bool) -> Array1<C64> {
    let b = net.layout().block_legs();
    let q = net.layout().quarter();
    let m = 1usize << q;
    let bd = 1usize << b;
    let op = if adjoint_side {
        adjoint(net.u_bridge().matrix())
    } else {
        net.u_bridge().matrix().clone()
    };
    let t = psi
        .to_owned()
        .into_shape_with_order((m, bd, m))
        .expect("window state reshapes over quarters");
    let mut out = Array3::<C64>::zeros((m, bd, m));
    for q1 in 0..m {
        let slice = t.slice(s![q1, .., ..]);
        out.slice_mut(s![q1, .., ..]).assign(&op.dot(&slice));
    }
    out.into_shape_with_order(m * bd * m)
        .expect("window state flattens")
}

/// One call of the evolve pipeline.
pub fn evolve_two_block(
    net: &TwoLayerUnitary,
    d: &[f64],
    t: f64,
    psi0: &Array1<C64>,
) -> Result<Array2<C64>> {
    Ok(TwoBlockEvolver::new(net, d, psi0)?.rho_at(t))
}

/// Entropy growth across the window's central cut for one realization.
///
/// The window must sit inside the chain with its cut between the two
/// blocks; the initial state is the chain's alternating pattern restricted
/// to the window. The network and diagonal are built once, then the grid
/// is swept reusing the rotated state.
pub fn tn_entropy_trace(
    spec: &ChainSpec,
    layout: &WindowLayout,
    grid: &TimeGrid,
    dense_limit: usize,
    seed: u64,
    realization: u64,
) -> Result<EntanglementTrace> {
    let b = layout.block_legs();
    check_dense(b, dense_limit, "block diagonalization")?;
    let net = TwoLayerUnitary::build(spec, layout, dense_limit)?;
    let d = diagonal_hamiltonian(&net, spec, dense_limit)?;

    // Alternating pattern restricted to the window, phase-aligned with the
    // global chain ordering.
    let width = layout.window().width();
    let mut index = 0usize;
    for (offset, site) in layout.window().sites().enumerate() {
        if site % 2 == 0 {
            index |= 1 << (width - 1 - offset);
        }
    }
    let mut psi0: Array1<C64> = Array1::zeros(1 << width);
    psi0[index] = C64::new(1.0, 0.0);

    let evolver = TwoBlockEvolver::new(&net, &d, &psi0)?;
    let entropy: Vec<f64> = grid
        .points()
        .iter()
        .map(|&t| evolver.entropy_at(t).map(|s| s.max(0.0)))
        .collect::<Result<_>>()?;
    Ok(EntanglementTrace {
        grid: grid.clone(),
        entropy,
        block_legs: b,
        disorder_w: spec.disorder_w,
        seed,
        realization,
    })
}
