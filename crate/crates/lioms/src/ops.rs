//! Dense operators on site windows: Pauli strings, XXZ Hamiltonians,
//! embeddings, partial traces, and Hilbert-Schmidt commutator norms.
//!
//! Basis convention used everywhere: site `first` of a window occupies the
//! most significant bit of the basis index, bit value 0 means spin up, and
//! `sigma^z` on site `k` acts as `+1` on bit 0 and `-1` on bit 1.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::chain::{ChainSpec, SiteRange};
use crate::error::{Error, Result};

/// Elementwise tolerance for `M = M^dagger` on Hermitian-tagged operators.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Elementwise tolerance for `M^dagger M = I` on unitary-tagged operators.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Hermitian,
    Unitary,
    General,
}

/// A dense complex matrix together with the contiguous site window it acts on.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    support: SiteRange,
    matrix: Array2<C64>,
    kind: OperatorKind,
}

impl DenseOperator {
    fn check_dim(support: &SiteRange, matrix: &Array2<C64>) -> Result<()> {
        let d = support.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Argument(format!(
                "matrix is {}x{} but support [{}, {}] needs dimension {d}",
                matrix.nrows(),
                matrix.ncols(),
                support.first(),
                support.last()
            )));
        }
        Ok(())
    }

    /// Wrap a Hermitian operator, verifying the elementwise bound.
    pub fn hermitian(support: SiteRange, matrix: Array2<C64>) -> Result<Self> {
        Self::check_dim(&support, &matrix)?;
        let err = hermiticity_error(&matrix);
        if err >= HERMITICITY_TOL {
            return Err(Error::Contract(format!(
                "matrix deviates from Hermiticity by {err:.3e}"
            )));
        }
        Ok(Self {
            support,
            matrix,
            kind: OperatorKind::Hermitian,
        })
    }

    /// Wrap a unitary operator, verifying `U^dagger U = I`.
    pub fn unitary(support: SiteRange, matrix: Array2<C64>) -> Result<Self> {
        Self::check_dim(&support, &matrix)?;
        let err = unitarity_error(&matrix);
        if err >= UNITARITY_TOL {
            return Err(Error::Contract(format!(
                "matrix deviates from unitarity by {err:.3e}"
            )));
        }
        Ok(Self {
            support,
            matrix,
            kind: OperatorKind::Unitary,
        })
    }

    pub fn general(support: SiteRange, matrix: Array2<C64>) -> Result<Self> {
        Self::check_dim(&support, &matrix)?;
        Ok(Self {
            support,
            matrix,
            kind: OperatorKind::General,
        })
    }

    /// Internal constructor for operators whose kind holds by construction
    /// (products of unitaries, symmetrized sums). The tagged bounds are
    /// exercised by the test suite instead of being re-verified on every
    /// composition of large matrices.
    pub(crate) fn from_parts(support: SiteRange, matrix: Array2<C64>, kind: OperatorKind) -> Self {
        debug_assert!(Self::check_dim(&support, &matrix).is_ok());
        Self {
            support,
            matrix,
            kind,
        }
    }

    pub fn support(&self) -> SiteRange {
        self.support
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

pub fn identity(dim: usize) -> Array2<C64> {
    Array2::from_diag_elem(dim, C64::new(1.0, 0.0))
}

pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    a.t().map(|z| z.conj())
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

pub fn hermiticity_error(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut err = 0.0f64;
    for i in 0..n {
        for j in i..n {
            err = err.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    err
}

pub fn unitarity_error(a: &Array2<C64>) -> f64 {
    let g = adjoint(a).dot(a);
    let n = g.nrows();
    let mut err = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            err = err.max((g[[i, j]] - expect).norm());
        }
    }
    err
}

/// `(M + M^dagger) / 2`, killing floating-point Hermiticity drift.
pub fn symmetrize(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = 0.5 * (a[[i, j]] + a[[j, i]].conj());
        }
    }
    out
}

/// Kronecker product with the left factor on the more significant bits.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            let mut block = out.slice_mut(s![i * rb..(i + 1) * rb, j * cb..(j + 1) * cb]);
            block.zip_mut_with(b, |o, &bv| *o += aij * bv);
        }
    }
    out
}

/// Sign of `sigma^z` at bit `slot` (0 = most significant) for basis index `v`.
#[inline]
pub(crate) fn z_sign(v: usize, width: usize, slot: usize) -> f64 {
    if v >> (width - 1 - slot) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Single-site Pauli operator embedded in `support`.
pub fn pauli(site: usize, axis: PauliAxis, support: SiteRange) -> Result<DenseOperator> {
    let slot = support.slot(site)?;
    let width = support.width();
    let dim = support.dim();
    let mask = 1usize << (width - 1 - slot);
    let mut m = Array2::zeros((dim, dim));
    for v in 0..dim {
        match axis {
            PauliAxis::Z => {
                m[[v, v]] = C64::new(z_sign(v, width, slot), 0.0);
            }
            PauliAxis::X => {
                m[[v, v ^ mask]] = C64::new(1.0, 0.0);
            }
            PauliAxis::Y => {
                // <v | sigma^y | v ^ mask> = i if bit set in v, else -i.
                let phase = if v & mask != 0 { 1.0 } else { -1.0 };
                m[[v, v ^ mask]] = C64::new(0.0, phase);
            }
        }
    }
    Ok(DenseOperator::from_parts(
        support,
        m,
        OperatorKind::Hermitian,
    ))
}

/// XXZ Hamiltonian restricted to `support` with open boundaries:
/// bonds and field terms whose sites all lie inside the window.
pub fn build_hamiltonian(spec: &ChainSpec, support: SiteRange) -> Result<DenseOperator> {
    if !spec.full_range().contains_range(&support) {
        return Err(Error::Argument(format!(
            "support [{}, {}] outside chain of {} sites",
            support.first(),
            support.last(),
            spec.n_sites
        )));
    }
    let width = support.width();
    let dim = support.dim();
    let mut m: Array2<C64> = Array2::zeros((dim, dim));

    for v in 0..dim {
        let mut e = 0.0;
        for site in support.sites() {
            let slot = site - support.first();
            e += spec.field(site) * z_sign(v, width, slot);
        }
        for site in support.first()..support.last() {
            let slot = site - support.first();
            e += spec.anisotropy_delta * z_sign(v, width, slot) * z_sign(v, width, slot + 1);
        }
        m[[v, v]] = C64::new(e, 0.0);
    }

    // J (xx + yy) flips antiparallel neighbors with amplitude 2J.
    let hop = C64::new(2.0 * spec.coupling_j, 0.0);
    for site in support.first()..support.last() {
        let slot = site - support.first();
        let mask = (1usize << (width - 1 - slot)) | (1usize << (width - 2 - slot));
        for v in 0..dim {
            let bits = (v & mask).count_ones();
            if bits == 1 {
                m[[v, v ^ mask]] += hop;
            }
        }
    }

    Ok(DenseOperator::from_parts(
        support,
        m,
        OperatorKind::Hermitian,
    ))
}

/// Single-bond term `J (xx + yy) + delta zz` on `(left_site, left_site + 1)`,
/// embedded in `support`.
pub fn bond_term(spec: &ChainSpec, left_site: usize, support: SiteRange) -> Result<DenseOperator> {
    if !support.contains(left_site) || !support.contains(left_site + 1) {
        return Err(Error::Argument(format!(
            "bond ({left_site}, {}) not inside support [{}, {}]",
            left_site + 1,
            support.first(),
            support.last()
        )));
    }
    let width = support.width();
    let dim = support.dim();
    let slot = left_site - support.first();
    let mask = (1usize << (width - 1 - slot)) | (1usize << (width - 2 - slot));
    let hop = C64::new(2.0 * spec.coupling_j, 0.0);
    let mut m: Array2<C64> = Array2::zeros((dim, dim));
    for v in 0..dim {
        let zz = z_sign(v, width, slot) * z_sign(v, width, slot + 1);
        m[[v, v]] = C64::new(spec.anisotropy_delta * zz, 0.0);
        if (v & mask).count_ones() == 1 {
            m[[v, v ^ mask]] += hop;
        }
    }
    Ok(DenseOperator::from_parts(
        support,
        m,
        OperatorKind::Hermitian,
    ))
}

/// Tensor identity factors on both sides so `op` acts on `target`.
pub fn embed_operator(op: &DenseOperator, target: SiteRange) -> Result<DenseOperator> {
    let sup = op.support();
    if !target.contains_range(&sup) {
        return Err(Error::Argument(format!(
            "support [{}, {}] not contained in target [{}, {}]",
            sup.first(),
            sup.last(),
            target.first(),
            target.last()
        )));
    }
    let dl = 1usize << (sup.first() - target.first());
    let dr = 1usize << (target.last() - sup.last());
    let dv = sup.dim();
    let mut out = Array2::zeros((dl * dv * dr, dl * dv * dr));
    for l in 0..dl {
        for v in 0..dv {
            for w in 0..dv {
                let mvw = op.matrix[[v, w]];
                if mvw == C64::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..dr {
                    out[[(l * dv + v) * dr + r, (l * dv + w) * dr + r]] = mvw;
                }
            }
        }
    }
    Ok(DenseOperator::from_parts(target, out, op.kind))
}

/// Closed form for `Tr(H^2)` of the full-chain Hamiltonian:
/// `2^N (sum h_i^2 + (N - 1)(2 J^2 + delta^2))`.
pub fn trace_h_squared(spec: &ChainSpec) -> f64 {
    let n = spec.n_sites;
    let sum_h2: f64 = spec.fields.iter().map(|h| h * h).sum();
    let bonds = (n - 1) as f64;
    (2f64).powi(n as i32)
        * (sum_h2
            + bonds
                * (2.0 * spec.coupling_j * spec.coupling_j
                    + spec.anisotropy_delta * spec.anisotropy_delta))
}

/// Normalized partial trace over `op.support` minus the contiguous `keep`
/// range: identity maps to identity.
pub fn partial_trace_normalized(op: &DenseOperator, keep: SiteRange) -> Result<Array2<C64>> {
    let sup = op.support();
    if !sup.contains_range(&keep) {
        return Err(Error::Argument(format!(
            "keep [{}, {}] not inside support [{}, {}]",
            keep.first(),
            keep.last(),
            sup.first(),
            sup.last()
        )));
    }
    let dl = 1usize << (keep.first() - sup.first());
    let dk = keep.dim();
    let dr = 1usize << (sup.last() - keep.last());
    let norm = 1.0 / (dl * dr) as f64;
    let m = &op.matrix;
    let mut out: Array2<C64> = Array2::zeros((dk, dk));
    for l in 0..dl {
        for k in 0..dk {
            for k2 in 0..dk {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..dr {
                    acc += m[[(l * dk + k) * dr + r, (l * dk + k2) * dr + r]];
                }
                out[[k, k2]] += acc;
            }
        }
    }
    out.mapv_inplace(|z| z * norm);
    Ok(out)
}

/// `sum_{v,w} a[v,w] b[w,v]`, i.e. `Tr(A B)` without forming the product.
pub fn trace_product(a: &Array2<C64>, b: &Array2<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for v in 0..n {
        for w in 0..n {
            acc += a[[v, w]] * b[[w, v]];
        }
    }
    acc
}

/// Conjugate `m` by a single-site Pauli on the same support, elementwise.
pub fn conjugate_by_pauli(
    m: &Array2<C64>,
    support: SiteRange,
    site: usize,
    axis: PauliAxis,
) -> Result<Array2<C64>> {
    let slot = support.slot(site)?;
    let width = support.width();
    let dim = support.dim();
    let mask = 1usize << (width - 1 - slot);
    let mut out = Array2::zeros((dim, dim));
    match axis {
        PauliAxis::Z => {
            for v in 0..dim {
                let sv = z_sign(v, width, slot);
                for w in 0..dim {
                    out[[v, w]] = m[[v, w]] * (sv * z_sign(w, width, slot));
                }
            }
        }
        PauliAxis::X => {
            for v in 0..dim {
                for w in 0..dim {
                    out[[v, w]] = m[[v ^ mask, w ^ mask]];
                }
            }
        }
        PauliAxis::Y => {
            for v in 0..dim {
                let fv = if v & mask != 0 {
                    C64::new(0.0, 1.0)
                } else {
                    C64::new(0.0, -1.0)
                };
                for w in 0..dim {
                    let fw = if w & mask != 0 {
                        C64::new(0.0, -1.0)
                    } else {
                        C64::new(0.0, 1.0)
                    };
                    out[[v, w]] = fv * fw * m[[v ^ mask, w ^ mask]];
                }
            }
        }
    }
    Ok(out)
}

/// Normalized Hilbert-Schmidt norm of a commutator of two Hermitian
/// operators on possibly different windows:
/// `(1 / 2^n) (1/2) Tr([X, Y][X, Y]^dagger)` over the union of supports.
///
/// Disjoint supports commute exactly; overlapping windows are contracted
/// zone by zone so the union Hilbert space is never materialized.
pub fn commutator_hs_normalized(x: &DenseOperator, y: &DenseOperator) -> Result<f64> {
    let (a, b) = if x.support().first() <= y.support().first() {
        (x, y)
    } else {
        (y, x)
    };
    let sa = a.support();
    let sb = b.support();

    if sa.last() < sb.first() {
        return Ok(0.0);
    }
    if sa == sb {
        return Ok(commutator_hs_same_support(a.matrix(), b.matrix()));
    }
    if sa.contains_range(&sb) {
        let be = embed_operator(b, sa)?;
        return Ok(commutator_hs_same_support(a.matrix(), be.matrix()));
    }
    if sb.contains_range(&sa) {
        let ae = embed_operator(a, sb)?;
        return Ok(commutator_hs_same_support(ae.matrix(), b.matrix()));
    }
    // Staircase overlap: zones A (only a), B (shared), C (only b).
    let da = 1usize << (sb.first() - sa.first());
    let db = 1usize << (sa.last() - sb.first() + 1);
    let dc = 1usize << (sb.last() - sa.last());
    let n_union = (sb.last() - sa.first() + 1) as i32;
    Ok(commutator_hs_staircase(
        a.matrix(),
        b.matrix(),
        da,
        db,
        dc,
        n_union,
    ))
}

fn commutator_hs_same_support(x: &Array2<C64>, y: &Array2<C64>) -> f64 {
    let n = x.nrows();
    let xy = x.dot(y);
    // Tr(X^2 Y^2) = Tr((XY)(XY)^dagger) and Tr(XYXY) = Tr((XY)^2).
    let t_sq: f64 = xy.iter().map(|z| z.norm_sqr()).sum();
    let t_cross = trace_product(&xy, &xy).re;
    ((t_sq - t_cross) / n as f64).max(0.0)
}

fn commutator_hs_staircase(
    t1: &Array2<C64>,
    t2: &Array2<C64>,
    da: usize,
    db: usize,
    dc: usize,
    n_union: i32,
) -> f64 {
    // E[(b1,b2),(b3,b4)] = sum_{a1,a2} T1[(a1,b1),(a2,b2)] T1[(a2,b3),(a1,b4)]
    let mut e = Array2::<C64>::zeros((db * db, db * db));
    for b1 in 0..db {
        for b2 in 0..db {
            for b3 in 0..db {
                for b4 in 0..db {
                    let mut acc = C64::new(0.0, 0.0);
                    for a1 in 0..da {
                        for a2 in 0..da {
                            acc += t1[[a1 * db + b1, a2 * db + b2]]
                                * t1[[a2 * db + b3, a1 * db + b4]];
                        }
                    }
                    e[[b1 * db + b2, b3 * db + b4]] = acc;
                }
            }
        }
    }
    // F[(b2,b3),(b4,b1)] = sum_{c1,c3} T2[(b2,c1),(b3,c3)] T2[(b4,c3),(b1,c1)]
    let mut f = Array2::<C64>::zeros((db * db, db * db));
    for b2 in 0..db {
        for b3 in 0..db {
            for b4 in 0..db {
                for b1 in 0..db {
                    let mut acc = C64::new(0.0, 0.0);
                    for c1 in 0..dc {
                        for c3 in 0..dc {
                            acc += t2[[b2 * dc + c1, b3 * dc + c3]]
                                * t2[[b4 * dc + c3, b1 * dc + c1]];
                        }
                    }
                    f[[b2 * db + b3, b4 * db + b1]] = acc;
                }
            }
        }
    }
    let mut t_xyxy = C64::new(0.0, 0.0);
    for b1 in 0..db {
        for b2 in 0..db {
            for b3 in 0..db {
                for b4 in 0..db {
                    t_xyxy += e[[b1 * db + b2, b3 * db + b4]] * f[[b2 * db + b3, b4 * db + b1]];
                }
            }
        }
    }
    // Tr(X^2 Y^2) factorizes through partial traces onto the shared zone.
    let x2 = t1.dot(t1);
    let y2 = t2.dot(t2);
    let mut p = Array2::<C64>::zeros((db, db));
    for b1 in 0..db {
        for b2 in 0..db {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..da {
                acc += x2[[a * db + b1, a * db + b2]];
            }
            p[[b1, b2]] = acc;
        }
    }
    let mut q = Array2::<C64>::zeros((db, db));
    for b1 in 0..db {
        for b2 in 0..db {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..dc {
                acc += y2[[b1 * dc + c, b2 * dc + c]];
            }
            q[[b1, b2]] = acc;
        }
    }
    let t_sq = trace_product(&p, &q).re;
    ((t_sq - t_xyxy.re) / (2f64).powi(n_union)).max(0.0)
}
