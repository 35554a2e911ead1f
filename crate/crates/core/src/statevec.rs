//! Dense pure-state engine: gate kernels, partial traces, spectrum moments and
//! anti-flatness.
//!
//! Qubit `q` is bit `q` of the amplitude index (qubit 0 least significant).

use nalgebra::DMatrix;
use ndarray::linalg::general_mat_mul;
use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gate::{GateOp, Mat2, Mat4};
use crate::C64;

pub const MAX_QUBITS: usize = 16;

/// Norm tolerance accepted by [`PureState::from_amplitudes`].
pub const NORM_TOL: f64 = 1e-10;

/// Negative anti-flatness above this magnitude is a numerical failure; smaller
/// negatives are clamped to zero.
pub const NEGATIVE_FLATNESS_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amps: Vec<C64>,
}

fn check_size(what: &'static str, n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Size {
            what,
            got: n,
            min: 1,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

impl PureState {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        check_size("zero state", n)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Ok(PureState { num_qubits: n, amps })
    }

    /// `⊗_i (|0⟩ + e^{iθ_i}|1⟩)/√2`.
    pub fn product(thetas: &[f64]) -> Result<Self> {
        let n = thetas.len();
        check_size("product state", n)?;
        let scale = (0.5f64).powf(n as f64 / 2.0);
        let phases: Vec<C64> = thetas.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let amps = (0..1usize << n)
            .map(|k| {
                let mut a = C64::new(scale, 0.0);
                for (q, p) in phases.iter().enumerate() {
                    if k >> q & 1 == 1 {
                        a *= p;
                    }
                }
                a
            })
            .collect();
        Ok(PureState { num_qubits: n, amps })
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n: usize) -> Result<Self> {
        Self::product(&vec![0.0; n])
    }

    /// Wraps an amplitude vector that is already normalized.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = num_qubits_for_len(amps.len())?;
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!(
                "amplitudes have squared norm {norm2}, expected 1"
            )));
        }
        Ok(PureState { num_qubits: n, amps })
    }

    /// Normalizes and wraps an amplitude vector.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n = num_qubits_for_len(amps.len())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Validation("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(PureState { num_qubits: n, amps })
    }

    /// Haar-random state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_size("random state", n)?;
        let amps = (0..1usize << n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Validation(format!(
                "inner product of {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `self ⊗ other`, with `self` on the low qubits.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        check_size("tensor product", n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for b in &other.amps {
            amps.extend(self.amps.iter().map(|a| a * b));
        }
        Ok(PureState { num_qubits: n, amps })
    }

    /// Applies `gate` in place.
    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        for &t in gate.targets() {
            if t >= self.num_qubits {
                return Err(Error::Index(format!(
                    "target {t} out of range for {} qubits",
                    self.num_qubits
                )));
            }
        }
        match gate {
            GateOp::One { target, matrix, .. } => apply_one(&mut self.amps, *target, matrix),
            GateOp::Two {
                targets, matrix, ..
            } => {
                if targets[0] == targets[1] {
                    return Err(Error::Index(format!("duplicate targets {targets:?}")));
                }
                apply_two(&mut self.amps, *targets, matrix)
            }
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a GateOp>) -> Result<()> {
        for g in gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Multiplies by a global phase so that the first amplitude with modulus
    /// above `1e-12` is real and positive.
    pub fn fix_global_phase(&mut self) {
        if let Some(a) = self.amps.iter().find(|a| a.norm() > 1e-12) {
            let phase = a.conj() / a.norm();
            self.amps.iter_mut().for_each(|x| *x *= phase);
        }
    }
}

fn num_qubits_for_len(len: usize) -> Result<usize> {
    if !len.is_power_of_two() {
        return Err(Error::Validation(format!(
            "amplitude vector length {len} is not a power of two"
        )));
    }
    let n = len.trailing_zeros() as usize;
    check_size("state vector", n)?;
    Ok(n)
}

#[inline]
fn insert_zero(j: usize, pos: usize) -> usize {
    let low = j & ((1 << pos) - 1);
    ((j >> pos) << (pos + 1)) | low
}

fn apply_one(amps: &mut [C64], target: usize, m: &Mat2) {
    let stride = 1 << target;
    for base in (0..amps.len()).step_by(stride << 1) {
        for i in base..base + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

fn apply_two(amps: &mut [C64], targets: [usize; 2], m: &Mat4) {
    let (ma, mb) = (1usize << targets[0], 1usize << targets[1]);
    let (lo, hi) = if targets[0] < targets[1] {
        (targets[0], targets[1])
    } else {
        (targets[1], targets[0])
    };
    for j in 0..amps.len() >> 2 {
        let k = insert_zero(insert_zero(j, lo), hi);
        let idx = [k, k | ma, k | mb, k | ma | mb];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &i) in idx.iter().enumerate() {
            let row = &m[r];
            amps[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
}

/// A bipartition `A | B` of `n` qubits, `A` non-empty and proper.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bipartition {
    num_qubits: usize,
    mask_a: u64,
}

impl Bipartition {
    pub fn new(num_qubits: usize, subsystem: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &q in subsystem {
            if q >= num_qubits {
                return Err(Error::Partition(format!(
                    "qubit {q} out of range for {num_qubits} qubits"
                )));
            }
            mask |= 1 << q;
        }
        Self::from_mask(num_qubits, mask)
    }

    pub fn from_mask(num_qubits: usize, mask_a: u64) -> Result<Self> {
        if num_qubits == 0 || num_qubits > 63 {
            return Err(Error::Partition(format!("{num_qubits} qubits")));
        }
        let full = (1u64 << num_qubits) - 1;
        if mask_a & !full != 0 {
            return Err(Error::Partition(format!(
                "mask {mask_a:#b} has qubits beyond {num_qubits}"
            )));
        }
        if mask_a == 0 {
            return Err(Error::Partition("subsystem A is empty".into()));
        }
        if mask_a == full {
            return Err(Error::Partition("subsystem A is the whole system".into()));
        }
        Ok(Bipartition {
            num_qubits,
            mask_a,
        })
    }

    /// The first `⌈n/2⌉` qubits.
    pub fn half(num_qubits: usize) -> Result<Self> {
        let k = num_qubits.div_ceil(2);
        Self::from_mask(num_qubits, (1u64 << k) - 1)
    }

    pub fn complement(&self) -> Self {
        let full = (1u64 << self.num_qubits) - 1;
        Bipartition {
            num_qubits: self.num_qubits,
            mask_a: full & !self.mask_a,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn mask(&self) -> u64 {
        self.mask_a
    }

    pub fn subsystem(&self) -> Vec<usize> {
        (0..self.num_qubits)
            .filter(|q| self.mask_a >> q & 1 == 1)
            .collect()
    }

    pub fn size_a(&self) -> usize {
        self.mask_a.count_ones() as usize
    }

    pub fn dim_a(&self) -> usize {
        1 << self.size_a()
    }
}

/// `ρ_A` stored as its real (symmetric) and imaginary (antisymmetric) parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensityMatrix {
    re: Array2<f64>,
    im: Array2<f64>,
}

impl ReducedDensityMatrix {
    /// Builds from explicit entries, checking Hermiticity, unit trace and
    /// (via the spectrum) positivity.
    pub fn from_entries(entries: &[Vec<C64>]) -> Result<Self> {
        let d = entries.len();
        if d == 0 || entries.iter().any(|r| r.len() != d) {
            return Err(Error::Validation("density matrix must be square".into()));
        }
        let re = Array2::from_shape_fn((d, d), |(i, j)| entries[i][j].re);
        let im = Array2::from_shape_fn((d, d), |(i, j)| entries[i][j].im);
        let rdm = ReducedDensityMatrix { re, im };
        rdm.validate()?;
        if let Some(&min) = entanglement_spectrum(&rdm).last() {
            if min < -1e-12 {
                return Err(Error::Validation(format!(
                    "density matrix has negative eigenvalue {min}"
                )));
            }
        }
        Ok(rdm)
    }

    pub fn dim(&self) -> usize {
        self.re.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        C64::new(self.re[[i, j]], self.im[[i, j]])
    }

    pub fn trace(&self) -> f64 {
        self.re.diag().sum()
    }

    pub fn real_part(&self) -> &Array2<f64> {
        &self.re
    }

    pub fn imag_part(&self) -> &Array2<f64> {
        &self.im
    }

    /// Checks Hermiticity and unit trace within `1e-12`.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                let dev = (self.entry(i, j) - self.entry(j, i).conj()).norm();
                if dev > 1e-12 {
                    return Err(Error::Validation(format!(
                        "density matrix not Hermitian at ({i},{j}): {dev:.3e}"
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("density matrix trace {tr}")));
        }
        Ok(())
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.entry(i, j))
    }
}

/// Reshapes the state as a `d_A × d_B` matrix `M` (real and imaginary parts)
/// with `ψ = Σ M_ab |a⟩_A |b⟩_B`.
fn schmidt_matrix(state: &PureState, part: &Bipartition) -> (Array2<f64>, Array2<f64>) {
    let deposit = |mask: u64| -> Vec<usize> {
        let bits: Vec<usize> = (0..state.num_qubits)
            .filter(|q| mask >> q & 1 == 1)
            .collect();
        (0..1usize << bits.len())
            .map(|v| {
                bits.iter()
                    .enumerate()
                    .filter(|(i, _)| v >> i & 1 == 1)
                    .map(|(_, &q)| 1usize << q)
                    .sum()
            })
            .collect()
    };
    let dep_a = deposit(part.mask_a);
    let dep_b = deposit(part.complement().mask_a);
    let shape = (dep_a.len(), dep_b.len());
    let mut re = Array2::zeros(shape);
    let mut im = Array2::zeros(shape);
    for (a, &ka) in dep_a.iter().enumerate() {
        for (b, &kb) in dep_b.iter().enumerate() {
            let amp = state.amps[ka | kb];
            re[[a, b]] = amp.re;
            im[[a, b]] = amp.im;
        }
    }
    (re, im)
}

fn check_partition(state: &PureState, part: &Bipartition) -> Result<()> {
    if part.num_qubits != state.num_qubits {
        return Err(Error::Partition(format!(
            "bipartition of {} qubits applied to a {}-qubit state",
            part.num_qubits, state.num_qubits
        )));
    }
    Ok(())
}

/// `ρ_A = Tr_B |ψ⟩⟨ψ|`.
pub fn reduced_density_matrix(
    state: &PureState,
    part: &Bipartition,
) -> Result<ReducedDensityMatrix> {
    check_partition(state, part)?;
    let (a, b) = schmidt_matrix(state, part);
    // M M† = (A + iB)(Aᵀ − iBᵀ) = (AAᵀ + BBᵀ) + i(BAᵀ − ABᵀ)
    let d = a.nrows();
    let mut re = Array2::zeros((d, d));
    let mut im = Array2::zeros((d, d));
    general_mat_mul(1.0, &a, &a.t(), 0.0, &mut re);
    general_mat_mul(1.0, &b, &b.t(), 1.0, &mut re);
    general_mat_mul(1.0, &b, &a.t(), 0.0, &mut im);
    general_mat_mul(-1.0, &a, &b.t(), 1.0, &mut im);
    Ok(ReducedDensityMatrix { re, im })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumMoments {
    /// `Tr ρ²`
    pub p2: f64,
    /// `Tr ρ³`
    pub p3: f64,
}

impl SpectrumMoments {
    /// `p3 − p2²`, without clamping.
    pub fn raw_anti_flatness(&self) -> f64 {
        self.p3 - self.p2 * self.p2
    }
}

/// `Tr ρ²` and `Tr ρ³` from matrix products.
pub fn purity_moments(rdm: &ReducedDensityMatrix) -> SpectrumMoments {
    let (r, j) = (&rdm.re, &rdm.im);
    let d = rdm.dim();
    let p2 = r.iter().map(|x| x * x).sum::<f64>() + j.iter().map(|x| x * x).sum::<f64>();

    // ρ² = (RR − JJ) + i(RJ + JR); Tr ρ³ = Σ (ρ²)_ij ρ_ji = Σ S∘R + T∘J
    let mut s = Array2::zeros((d, d));
    general_mat_mul(1.0, r, r, 0.0, &mut s);
    general_mat_mul(-1.0, j, j, 1.0, &mut s);
    let mut t = Array2::zeros((d, d));
    general_mat_mul(1.0, r, j, 0.0, &mut t);
    general_mat_mul(1.0, j, r, 1.0, &mut t);
    let p3 = s.iter().zip(r.iter()).map(|(a, b)| a * b).sum::<f64>()
        + t.iter().zip(j.iter()).map(|(a, b)| a * b).sum::<f64>();
    SpectrumMoments { p2, p3 }
}

/// Clamps tiny negative round-off and rejects anything worse.
pub(crate) fn clamp_flatness(raw: f64) -> Result<f64> {
    if raw >= 0.0 {
        Ok(raw)
    } else if raw >= -NEGATIVE_FLATNESS_TOL {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!("anti-flatness {raw:.3e} < 0")))
    }
}

/// Anti-flatness `F_A = Tr ρ_A³ − (Tr ρ_A²)²`.
///
/// Both sides of a pure-state bipartition share their non-zero spectrum, so
/// the moments are taken on whichever side is smaller.
pub fn anti_flatness(state: &PureState, part: &Bipartition) -> Result<f64> {
    check_partition(state, part)?;
    let side = if part.size_a() * 2 > state.num_qubits {
        part.complement()
    } else {
        *part
    };
    let rdm = reduced_density_matrix(state, &side)?;
    clamp_flatness(purity_moments(&rdm).raw_anti_flatness())
}

/// Eigenvalues of `ρ`, descending. Diagnostic path only.
pub fn entanglement_spectrum(rdm: &ReducedDensityMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = rdm
        .to_nalgebra()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}
