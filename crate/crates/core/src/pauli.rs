//! Pauli strings as `(x, z)` bit masks and the stabilizer-entropy family of
//! magic measures.
//!
//! `P(x, z) = i^{|x∧z|} X^x Z^z`, so every encoded string is Hermitian with
//! phase +1. Acting on a basis state,
//! `P(x, z)|k⟩ = i^{|x∧z|} (−1)^{|k∧z|} |k ⊕ x⟩`.
//!
//! Natural logarithms throughout.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::statevec::PureState;
use crate::C64;

/// Largest `n` for which the full `4^n` sweep runs by default.
pub const DEFAULT_SWEEP_CAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    num_qubits: usize,
    x: u64,
    z: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Per-qubit digit used by the dense `Ξ` index.
    pub fn code(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    fn bits(self) -> (u64, u64) {
        match self {
            Pauli::I => (0, 0),
            Pauli::X => (1, 0),
            Pauli::Y => (1, 1),
            Pauli::Z => (0, 1),
        }
    }
}

/// Spreads the low 32 bits of `v` onto the even bit positions.
fn spread_bits(v: u64) -> u64 {
    let mut v = v & 0xFFFF_FFFF;
    v = (v | (v << 16)) & 0x0000_FFFF_0000_FFFF;
    v = (v | (v << 8)) & 0x00FF_00FF_00FF_00FF;
    v = (v | (v << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333;
    (v | (v << 1)) & 0x5555_5555_5555_5555
}

fn compact_bits(v: u64) -> u64 {
    let mut v = v & 0x5555_5555_5555_5555;
    v = (v | (v >> 1)) & 0x3333_3333_3333_3333;
    v = (v | (v >> 2)) & 0x0F0F_0F0F_0F0F_0F0F;
    v = (v | (v >> 4)) & 0x00FF_00FF_00FF_00FF;
    v = (v | (v >> 8)) & 0x0000_FFFF_0000_FFFF;
    (v | (v >> 16)) & 0xFFFF_FFFF
}

/// Dense index of `P(x, z)`: base-4 digits `I=0, X=1, Y=2, Z=3`, qubit 0 least
/// significant. Digit bit 0 is `x ⊕ z`, digit bit 1 is `z`.
#[inline]
pub fn dense_index(x: u64, z: u64) -> usize {
    (spread_bits(x ^ z) | (spread_bits(z) << 1)) as usize
}

impl PauliString {
    pub fn new(num_qubits: usize, x: u64, z: u64) -> Result<Self> {
        if num_qubits > 32 {
            return Err(Error::Size {
                what: "Pauli string",
                got: num_qubits,
                min: 0,
                max: 32,
            });
        }
        let full = (1u64 << num_qubits) - 1;
        if (x | z) & !full != 0 {
            return Err(Error::Index(format!(
                "masks x={x:#b}, z={z:#b} do not fit in {num_qubits} bits"
            )));
        }
        Ok(PauliString { num_qubits, x, z })
    }

    pub fn identity(num_qubits: usize) -> Self {
        PauliString {
            num_qubits,
            x: 0,
            z: 0,
        }
    }

    /// `kind` on qubit `q`, identity elsewhere.
    pub fn single(num_qubits: usize, q: usize, kind: Pauli) -> Result<Self> {
        if q >= num_qubits {
            return Err(Error::Index(format!("qubit {q} of {num_qubits}")));
        }
        let (x, z) = kind.bits();
        Self::new(num_qubits, x << q, z << q)
    }

    /// Product of `kind` over the listed qubits.
    pub fn on_qubits(num_qubits: usize, qubits: &[usize], kind: Pauli) -> Result<Self> {
        let mut p = Self::identity(num_qubits);
        for &q in qubits {
            let s = Self::single(num_qubits, q, kind)?;
            p.x ^= s.x;
            p.z ^= s.z;
        }
        Ok(p)
    }

    pub fn from_dense_index(num_qubits: usize, index: usize) -> Self {
        let idx = index as u64;
        let lo = compact_bits(idx);
        let z = compact_bits(idx >> 1);
        PauliString {
            num_qubits,
            x: lo ^ z,
            z,
        }
    }

    pub fn dense_index(&self) -> usize {
        dense_index(self.x, self.z)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn get(&self, q: usize) -> Pauli {
        match (self.x >> q & 1, self.z >> q & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// `self · other = phase · P(x ⊕ x', z ⊕ z')`; returns the phase as a power
    /// of `i` (0..4) together with the product string.
    pub fn mul(&self, other: &PauliString) -> (u8, PauliString) {
        // i^{y1} X^x1 Z^z1 · i^{y2} X^x2 Z^z2 = i^{y1+y2} (−1)^{|z1∧x2|} X^{x} Z^{z}
        // and X^x Z^z = i^{−|x∧z|} P(x, z).
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let y = (x & z).count_ones() as i64;
        let sign = 2 * (self.z & other.x).count_ones() as i64;
        let pow = (self.y_count() as i64 + other.y_count() as i64 + sign - y).rem_euclid(4);
        (
            pow as u8,
            PauliString {
                num_qubits: self.num_qubits,
                x,
                z,
            },
        )
    }

    /// `amps ← P amps`.
    pub fn apply(&self, amps: &mut [C64]) {
        let phase = i_pow(self.y_count());
        let x = self.x as usize;
        let z = self.z as usize;
        if x == 0 {
            for (k, a) in amps.iter_mut().enumerate() {
                if (k & z).count_ones() & 1 == 1 {
                    *a = -*a;
                }
                *a *= phase;
            }
            return;
        }
        for k in 0..amps.len() {
            let l = k ^ x;
            if k < l {
                // P|k> = ph s_k |l>, P|l> = ph s_l |k>
                let sk = parity_sign(k & z);
                let sl = parity_sign(l & z);
                let (ak, al) = (amps[k], amps[l]);
                amps[l] = phase * sk * ak;
                amps[k] = phase * sl * al;
            }
        }
    }

    /// `⟨ψ|P|ψ⟩` by a single pass over amplitude pairs.
    pub fn expectation(&self, state: &PureState) -> Result<f64> {
        if self.num_qubits != state.num_qubits() {
            return Err(Error::Validation(format!(
                "{}-qubit Pauli on a {}-qubit state",
                self.num_qubits,
                state.num_qubits()
            )));
        }
        let amps = state.amplitudes();
        let x = self.x as usize;
        let z = self.z as usize;
        let mut acc = C64::new(0.0, 0.0);
        for (k, a) in amps.iter().enumerate() {
            let t = amps[k ^ x].conj() * a;
            if (k & z).count_ones() & 1 == 1 {
                acc -= t;
            } else {
                acc += t;
            }
        }
        Ok((i_pow(self.y_count()) * acc).re)
    }

    /// Dense matrix (row-major, `2^n × 2^n`). Test and small-gate use only.
    pub fn matrix(&self) -> Vec<Vec<C64>> {
        let d = 1usize << self.num_qubits;
        let mut m = vec![vec![C64::new(0.0, 0.0); d]; d];
        let phase = i_pow(self.y_count());
        for k in 0..d {
            let l = k ^ self.x as usize;
            m[l][k] = phase * parity_sign(k & self.z as usize);
        }
        m
    }

    /// Every Pauli string on `num_qubits` qubits, in dense-index order.
    pub fn all(num_qubits: usize) -> impl Iterator<Item = PauliString> {
        (0..1usize << (2 * num_qubits)).map(move |i| Self::from_dense_index(num_qubits, i))
    }
}

#[inline]
fn parity_sign(v: usize) -> f64 {
    if v.count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

#[inline]
pub(crate) fn i_pow(k: u32) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliString {
    /// Character `q` is the Pauli on qubit `q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_qubits {
            let c = match self.get(q) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut x = 0u64;
        let mut z = 0u64;
        let n = s.chars().count();
        for (q, ch) in s.chars().enumerate() {
            let kind = match ch {
                'I' | 'i' => Pauli::I,
                'X' | 'x' => Pauli::X,
                'Y' | 'y' => Pauli::Y,
                'Z' | 'z' => Pauli::Z,
                other => {
                    return Err(Error::Validation(format!(
                        "invalid Pauli character {other:?}"
                    )))
                }
            };
            let (bx, bz) = kind.bits();
            x |= bx << q;
            z |= bz << q;
        }
        PauliString::new(n, x, z)
    }
}

/// `Ξ_ψ(P) = tr(Pψ)² / d` over all `4^n` strings, dense-index order.
#[derive(Clone, Debug, PartialEq)]
pub struct XiDistribution {
    num_qubits: usize,
    values: Vec<f64>,
}

impl XiDistribution {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, p: &PauliString) -> f64 {
        self.values[p.dense_index()]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `Σ_P Ξ(P)^α`.
    pub fn power_sum(&self, alpha: f64) -> f64 {
        if alpha == 2.0 {
            self.values.iter().map(|v| v * v).sum()
        } else {
            self.values
                .iter()
                .map(|&v| if v > 0.0 { v.powf(alpha) } else { 0.0 })
                .sum()
        }
    }

    /// Stabilizer Rényi entropy `M_α = log(Σ Ξ^α)/(1 − α) − log d`.
    pub fn sre(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let log_d = self.num_qubits as f64 * std::f64::consts::LN_2;
        Ok(self.power_sum(alpha).ln() / (1.0 - alpha) - log_d)
    }

    /// `M_lin = 1 − d Σ Ξ²`.
    pub fn linear_entropy(&self) -> f64 {
        1.0 - (1u64 << self.num_qubits) as f64 * self.power_sum(2.0)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain {
            what: "Rényi index α (must be > 0)",
            value: alpha,
        });
    }
    if alpha == 1.0 {
        return Err(Error::Unsupported(
            "α = 1 (Shannon) stabilizer entropy".into(),
        ));
    }
    Ok(())
}

/// In-place Walsh–Hadamard transform: `f[z] ← Σ_k (−1)^{|k∧z|} f[k]`.
fn walsh_hadamard(f: &mut [C64]) {
    let mut h = 1;
    while h < f.len() {
        for base in (0..f.len()).step_by(h << 1) {
            for i in base..base + h {
                let (a, b) = (f[i], f[i + h]);
                f[i] = a + b;
                f[i + h] = a - b;
            }
        }
        h <<= 1;
    }
}

/// Full Pauli sweep with a configurable size cap and execution strategy.
///
/// For a fixed `x`, `⟨P(x, z)⟩ = Re(i^{|x∧z|} F_x[z])` where `F_x` is the
/// Walsh–Hadamard transform of `k ↦ conj(ψ_{k⊕x}) ψ_k`, so the sweep costs
/// `O(d² log d)`.
#[derive(Clone, Copy, Debug)]
pub struct PauliSweep {
    pub cap: usize,
    pub exec: Exec,
}

impl Default for PauliSweep {
    fn default() -> Self {
        PauliSweep {
            cap: DEFAULT_SWEEP_CAP,
            exec: Exec::default(),
        }
    }
}

impl PauliSweep {
    pub fn with_cap(cap: usize) -> Self {
        PauliSweep {
            cap,
            ..Self::default()
        }
    }

    fn check(&self, what: &'static str, state: &PureState) -> Result<()> {
        if state.num_qubits() > self.cap {
            return Err(Error::Capacity {
                what,
                got: state.num_qubits(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// `tr(Pψ)` for all strings, dense-index order.
    pub fn expectations(&self, state: &PureState) -> Result<Vec<f64>> {
        self.check("Pauli sweep", state)?;
        let d = state.dim();
        let amps = state.amplitudes();
        // x-major rows, then scattered to dense order
        let mut by_x = vec![0.0f64; d * d];
        self.exec.for_each_chunk(&mut by_x, d, |x, row| {
            let mut f: Vec<C64> = (0..d).map(|k| amps[k ^ x].conj() * amps[k]).collect();
            walsh_hadamard(&mut f);
            for (z, out) in row.iter_mut().enumerate() {
                *out = (i_pow((x & z).count_ones()) * f[z]).re;
            }
        });
        let mut dense = vec![0.0f64; d * d];
        for x in 0..d {
            for z in 0..d {
                dense[dense_index(x as u64, z as u64)] = by_x[x * d + z];
            }
        }
        Ok(dense)
    }

    pub fn xi_distribution(&self, state: &PureState) -> Result<XiDistribution> {
        let d = state.dim() as f64;
        let values = self
            .expectations(state)?
            .into_iter()
            .map(|e| e * e / d)
            .collect();
        Ok(XiDistribution {
            num_qubits: state.num_qubits(),
            values,
        })
    }

    pub fn sre(&self, state: &PureState, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        self.xi_distribution(state)?.sre(alpha)
    }

    pub fn stabilizer_linear_entropy(&self, state: &PureState) -> Result<f64> {
        Ok(self.xi_distribution(state)?.linear_entropy())
    }

    pub fn magic_measures(&self, state: &PureState, alphas: &[f64]) -> Result<MagicMeasures> {
        let xi = self.xi_distribution(state)?;
        let m_lin = xi.linear_entropy();
        let m_alpha = alphas
            .iter()
            .map(|&a| Ok((a, xi.sre(a)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MagicMeasures {
            m_lin,
            m2: m2_from_mlin(m_lin)?,
            m_alpha,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MagicMeasures {
    pub m_lin: f64,
    pub m2: f64,
    /// `(α, M_α)` pairs that were requested.
    pub m_alpha: Vec<(f64, f64)>,
}

/// `tr(Pψ)`; see [`PauliString::expectation`].
pub fn pauli_expectation(state: &PureState, p: &PauliString) -> Result<f64> {
    p.expectation(state)
}

pub fn xi_distribution(state: &PureState) -> Result<XiDistribution> {
    PauliSweep::default().xi_distribution(state)
}

pub fn sre(state: &PureState, alpha: f64) -> Result<f64> {
    PauliSweep::default().sre(state, alpha)
}

pub fn stabilizer_linear_entropy(state: &PureState) -> Result<f64> {
    PauliSweep::default().stabilizer_linear_entropy(state)
}

/// `M_2 = −log(1 − M_lin)`.
pub fn m2_from_mlin(m_lin: f64) -> Result<f64> {
    if !(m_lin < 1.0) {
        return Err(Error::Domain {
            what: "m2_from_mlin (needs M_lin < 1)",
            value: m_lin,
        });
    }
    Ok(-(1.0 - m_lin).ln())
}

/// Exact `M_lin` of `⊗_i (|0⟩ + e^{iθ_i}|1⟩)/√2` for any `n`:
/// `1 − Π_i (1 − sin²(2θ_i)/4)`.
pub fn product_mlin(thetas: &[f64]) -> f64 {
    1.0 - thetas
        .iter()
        .map(|t| 1.0 - (2.0 * t).sin().powi(2) / 4.0)
        .product::<f64>()
}

/// `M_2` of the same product state.
pub fn product_m2(thetas: &[f64]) -> f64 {
    -thetas
        .iter()
        .map(|t| (1.0 - (2.0 * t).sin().powi(2) / 4.0).ln())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateOp;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn t_state() -> PureState {
        PureState::product(&[FRAC_PI_4]).unwrap()
    }

    #[test]
    fn dense_index_roundtrip_and_order() {
        for n in 1..5 {
            for i in 0..1usize << (2 * n) {
                assert_eq!(PauliString::from_dense_index(n, i).dense_index(), i);
            }
        }
        let names: Vec<String> = PauliString::all(1).map(|p| p.to_string()).collect();
        assert_eq!(names, ["I", "X", "Y", "Z"]);
        assert_eq!(
            "XYZI".parse::<PauliString>().unwrap().dense_index(),
            1 + 2 * 4 + 3 * 16
        );
    }

    #[test]
    fn matrix_is_hermitian_unitary() {
        for p in PauliString::all(2) {
            let m = p.matrix();
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(m[i][j], m[j][i].conj());
                }
            }
            assert!(crate::gate::unitarity_defect(&m) < 1e-15);
        }
    }

    #[test]
    fn multiplication_table() {
        let x: PauliString = "X".parse().unwrap();
        let y: PauliString = "Y".parse().unwrap();
        let z: PauliString = "Z".parse().unwrap();
        // XY = iZ, YZ = iX, ZX = iY, YX = −iZ
        assert_eq!(x.mul(&y), (1, z));
        assert_eq!(y.mul(&z), (1, x));
        assert_eq!(z.mul(&x), (1, y));
        assert_eq!(y.mul(&x), (3, z));
        assert_eq!(y.mul(&y).0, 0);
    }

    #[test]
    fn mul_matches_matrices() {
        let ps: Vec<_> = PauliString::all(2).collect();
        for a in &ps {
            for b in &ps {
                let (pow, c) = a.mul(b);
                let (ma, mb, mc) = (a.matrix(), b.matrix(), c.matrix());
                let ph = i_pow(pow as u32);
                for i in 0..4 {
                    for j in 0..4 {
                        let ab: C64 = (0..4).map(|k| ma[i][k] * mb[k][j]).sum();
                        assert!((ab - ph * mc[i][j]).norm() < 1e-15);
                    }
                }
                assert_eq!(a.commutes_with(b), b.commutes_with(a));
            }
        }
    }

    #[test]
    fn apply_matches_matrix() {
        let mut rng = crate::seed::SeedTree::new(5).rng();
        let s = PureState::random(3, &mut rng).unwrap();
        for p in PauliString::all(3) {
            let mut v = s.amplitudes().to_vec();
            p.apply(&mut v);
            let m = p.matrix();
            for i in 0..8 {
                let e: C64 = (0..8).map(|k| m[i][k] * s.amplitudes()[k]).sum();
                assert!((e - v[i]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn expectation_examples() {
        let z: PauliString = "Z".parse().unwrap();
        assert_eq!(z.expectation(&PureState::zero(1).unwrap()).unwrap(), 1.0);

        let x: PauliString = "X".parse().unwrap();
        let e = x.expectation(&t_state()).unwrap();
        assert!((e - FRAC_1_SQRT_2).abs() < 1e-15);

        let mut bell = PureState::zero(2).unwrap();
        bell.apply_gate(&GateOp::hadamard(0)).unwrap();
        bell.apply_gate(&GateOp::cnot(0, 1)).unwrap();
        let xx: PauliString = "XX".parse().unwrap();
        let yy: PauliString = "YY".parse().unwrap();
        assert!((xx.expectation(&bell).unwrap() - 1.0).abs() < 1e-15);
        assert!((yy.expectation(&bell).unwrap() + 1.0).abs() < 1e-15);

        assert!(matches!(
            xx.expectation(&PureState::zero(3).unwrap()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn sweep_matches_per_string_kernel() {
        let mut rng = crate::seed::SeedTree::new(9).rng();
        for n in 1..=4 {
            let s = PureState::random(n, &mut rng).unwrap();
            let sweep = PauliSweep::default().expectations(&s).unwrap();
            for p in PauliString::all(n) {
                let e = p.expectation(&s).unwrap();
                assert!((sweep[p.dense_index()] - e).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn xi_examples() {
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-14);
        let xi = xi_distribution(&PureState::zero(1).unwrap()).unwrap();
        assert!(close(xi.values(), &[0.5, 0.0, 0.0, 0.5]));
        let xi = xi_distribution(&PureState::plus(1).unwrap()).unwrap();
        assert!(close(xi.values(), &[0.5, 0.5, 0.0, 0.0]));
        let xi = xi_distribution(&t_state()).unwrap();
        assert!(close(xi.values(), &[0.5, 0.25, 0.25, 0.0]));
    }

    #[test]
    fn sre_examples() {
        let ln43 = (4.0f64 / 3.0).ln();
        assert!((sre(&t_state(), 2.0).unwrap() - ln43).abs() < 1e-12);
        let tt = PureState::product(&[FRAC_PI_4, FRAC_PI_4]).unwrap();
        assert!((sre(&tt, 2.0).unwrap() - 2.0 * ln43).abs() < 1e-12);
        assert!(sre(&PureState::zero(3).unwrap(), 2.0).unwrap().abs() < 1e-12);
        assert!(sre(&PureState::zero(3).unwrap(), 0.5).unwrap().abs() < 1e-12);
        assert!(matches!(
            sre(&t_state(), 1.0),
            Err(Error::Unsupported(_))
        ));
        assert!(sre(&t_state(), -1.0).is_err());
    }

    #[test]
    fn linear_entropy_examples() {
        for n in 1..=5 {
            let m = stabilizer_linear_entropy(&PureState::zero(n).unwrap()).unwrap();
            assert!(m.abs() < 1e-12);
        }
        assert!((stabilizer_linear_entropy(&t_state()).unwrap() - 0.25).abs() < 1e-12);
        for theta in [0.1, 0.5, 1.3, 2.9] {
            let s = PureState::product(&[theta]).unwrap();
            let want = (2.0 * theta).sin().powi(2) / 4.0;
            assert!((stabilizer_linear_entropy(&s).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_is_enforced_and_named() {
        let s = PureState::zero(3).unwrap();
        let err = PauliSweep::with_cap(2).xi_distribution(&s).unwrap_err();
        assert!(matches!(err, Error::Capacity { cap: 2, got: 3, .. }));
        assert!(err.to_string().contains("cap of 2"));
    }

    #[test]
    fn m2_mlin_relation() {
        assert_eq!(m2_from_mlin(0.0).unwrap(), 0.0);
        assert!((m2_from_mlin(0.25).unwrap() - (4.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((m2_from_mlin(7.0 / 16.0).unwrap() - (16.0f64 / 9.0).ln()).abs() < 1e-15);
        assert!(m2_from_mlin(1.0).is_err());
    }

    #[test]
    fn product_fast_path_examples() {
        assert_eq!(product_mlin(&[0.0; 40]), 0.0);
        assert!((product_mlin(&[FRAC_PI_4]) - 0.25).abs() < 1e-15);
        assert!((product_mlin(&[FRAC_PI_4; 2]) - 7.0 / 16.0).abs() < 1e-15);
        let th = [0.2, 0.7, 1.1];
        assert!((product_m2(&th) - m2_from_mlin(product_mlin(&th)).unwrap()).abs() < 1e-14);
    }
}
