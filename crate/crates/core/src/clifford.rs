//! Two-qubit Clifford group, random brickwork circuits, coherent gate noise.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{
    kron_hi, kron_lo, mat4_adjoint, mat4_mul, GateLabel, GateOp, Mat4,
};
use crate::pauli::PauliString;
use crate::seed::{role, SeedTree};
use crate::statevec::{PureState, MAX_QUBITS};
use crate::C64;

/// `|C_2 / U(1)| = |Sp(4, 2)| · 4² = 720 · 16`.
pub const CLIFFORD2_ORDER: usize = 11_520;

const SYMPLECTIC_ORDER: usize = 720;

/// A two-qubit Pauli string with a ±1 sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub negative: bool,
    pub pauli: PauliString,
}

impl SignedPauli {
    fn matrix(&self) -> Mat4 {
        let m = self.pauli.matrix();
        let s = if self.negative { -1.0 } else { 1.0 };
        let mut out = [[C64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = s * m[i][j];
            }
        }
        out
    }
}

/// Images of `X₀, Z₀, X₁, Z₁` under conjugation `P ↦ U P U†`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CliffordTableau2 {
    images: [SignedPauli; 4],
}

fn generators() -> [PauliString; 4] {
    ["XI", "ZI", "IX", "IZ"].map(|s| s.parse().expect("static Pauli"))
}

struct Table {
    tableaux: Vec<CliffordTableau2>,
    unitaries: Vec<Mat4>,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let tableaux = enumerate_tableaux();
        let unitaries = tableaux.iter().map(|t| t.build_unitary()).collect();
        Table {
            tableaux,
            unitaries,
        }
    })
}

/// All symplectic images, then all 16 sign patterns per image.
fn enumerate_tableaux() -> Vec<CliffordTableau2> {
    let ps: Vec<PauliString> = (1..16).map(|i| PauliString::from_dense_index(2, i)).collect();
    let anti = |a: &PauliString, b: &PauliString| !a.commutes_with(b);
    let mut out = Vec::with_capacity(CLIFFORD2_ORDER);
    for x0 in &ps {
        for z0 in ps.iter().filter(|z0| anti(x0, z0)) {
            for x1 in ps
                .iter()
                .filter(|p| p.commutes_with(x0) && p.commutes_with(z0))
            {
                for z1 in ps.iter().filter(|p| {
                    p.commutes_with(x0) && p.commutes_with(z0) && anti(x1, p)
                }) {
                    let base = [*x0, *z0, *x1, *z1];
                    for signs in 0..16u8 {
                        let images = std::array::from_fn(|g| SignedPauli {
                            negative: signs >> g & 1 == 1,
                            pauli: base[g],
                        });
                        out.push(CliffordTableau2 { images });
                    }
                }
            }
        }
    }
    debug_assert_eq!(out.len(), SYMPLECTIC_ORDER * 16);
    out
}

impl CliffordTableau2 {
    /// Element `index` of the canonical enumeration, `0 ≤ index < 11520`.
    pub fn from_index(index: usize) -> Result<Self> {
        table()
            .tableaux
            .get(index)
            .copied()
            .ok_or_else(|| Error::Index(format!("Clifford index {index} ≥ {CLIFFORD2_ORDER}")))
    }

    pub fn images(&self) -> &[SignedPauli; 4] {
        &self.images
    }

    /// Whether the images obey the commutation pattern of `X₀, Z₀, X₁, Z₁`.
    pub fn is_symplectic(&self) -> bool {
        let g = generators();
        (0..4).all(|a| {
            (0..4).all(|b| {
                g[a].commutes_with(&g[b])
                    == self.images[a].pauli.commutes_with(&self.images[b].pauli)
            })
        })
    }

    /// A unitary realizing the tableau (defined up to global phase).
    ///
    /// `U|00⟩` is the +1 eigenstate of the images of `Z₀, Z₁`, and
    /// `U|ab⟩ = X₀'^a X₁'^b U|00⟩`.
    fn build_unitary(&self) -> Mat4 {
        let [x0, z0, x1, z1] = self.images.map(|p| p.matrix());
        let id = crate::gate::mat4_identity();
        let mut proj = [[C64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                proj[i][j] = (id[i][j] + z0[i][j]) * 0.5;
            }
        }
        let mut p1 = [[C64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                p1[i][j] = (id[i][j] + z1[i][j]) * 0.5;
            }
        }
        let proj = mat4_mul(&proj, &p1);
        // the basis column with the largest projection
        let col = (0..4)
            .max_by(|&a, &b| proj[a][a].re.total_cmp(&proj[b][b].re))
            .expect("non-empty");
        let mut u0: Vec<C64> = (0..4).map(|i| proj[i][col]).collect();
        let norm = u0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        u0.iter_mut().for_each(|a| *a /= norm);
        let lead = *u0.iter().find(|a| a.norm() > 1e-9).expect("non-zero state");
        let phase = lead.conj() / lead.norm();
        u0.iter_mut().for_each(|a| *a *= phase);

        let apply = |m: &Mat4, v: &[C64]| -> Vec<C64> {
            (0..4).map(|i| (0..4).map(|k| m[i][k] * v[k]).sum()).collect()
        };
        let mut u = [[C64::new(0.0, 0.0); 4]; 4];
        for c in 0..4 {
            let mut v = u0.clone();
            if c & 1 == 1 {
                v = apply(&x0, &v);
            }
            if c & 2 == 2 {
                v = apply(&x1, &v);
            }
            for r in 0..4 {
                u[r][c] = v[r];
            }
        }
        u
    }

    pub fn unitary(&self) -> Mat4 {
        match self.index() {
            Some(i) => table().unitaries[i],
            None => self.build_unitary(),
        }
    }

    /// Position in the canonical enumeration.
    pub fn index(&self) -> Option<usize> {
        table().tableaux.iter().position(|t| t == self)
    }

    /// Reads the tableau off a unitary by conjugating the generators; `None`
    /// if some image is not a signed Pauli string within `tol`.
    pub fn from_unitary(u: &Mat4, tol: f64) -> Option<Self> {
        let ud = mat4_adjoint(u);
        let mut images = [SignedPauli {
            negative: false,
            pauli: PauliString::identity(2),
        }; 4];
        for (g, gen) in generators().iter().enumerate() {
            let conj = mat4_mul(&mat4_mul(u, &gen_matrix(gen)), &ud);
            images[g] = match_signed_pauli(&conj, tol)?;
        }
        Some(CliffordTableau2 { images })
    }
}

fn gen_matrix(p: &PauliString) -> Mat4 {
    SignedPauli {
        negative: false,
        pauli: *p,
    }
    .matrix()
}

/// Finds `±Q` equal to `m` within `tol`, if any.
pub fn match_signed_pauli(m: &Mat4, tol: f64) -> Option<SignedPauli> {
    for q in PauliString::all(2) {
        let qm = q.matrix();
        for negative in [false, true] {
            let s = if negative { -1.0 } else { 1.0 };
            let ok = (0..4).all(|i| (0..4).all(|j| (m[i][j] - s * qm[i][j]).norm() <= tol));
            if ok {
                return Some(SignedPauli { negative, pauli: q });
            }
        }
    }
    None
}

/// Unitary of element `index` of the enumerated group.
pub fn clifford2_unitary(index: usize) -> Result<Mat4> {
    table()
        .unitaries
        .get(index)
        .copied()
        .ok_or_else(|| Error::Index(format!("Clifford index {index} ≥ {CLIFFORD2_ORDER}")))
}

/// All `11520` two-qubit Clifford unitaries (one representative per phase
/// class), in enumeration order.
pub fn all_two_qubit_cliffords() -> &'static [Mat4] {
    &table().unitaries
}

/// Uniformly random two-qubit Clifford on local targets `[0, 1]`.
pub fn sample_two_qubit_clifford<R: Rng + ?Sized>(rng: &mut R) -> GateOp {
    let index = rng.random_range(0..CLIFFORD2_ORDER);
    GateOp::Two {
        targets: [0, 1],
        matrix: table().unitaries[index],
        label: GateLabel::Clifford(index as u16),
    }
}

/// How each bond gate of a brickwork layer is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateMode {
    /// Uniform over the two-qubit Clifford group.
    #[default]
    Uniform,
    /// Uniform over `{H⊗I, I⊗H, S⊗I, I⊗S, CNOT→, CNOT←}` on the bond.
    Generators,
}

fn sample_generator<R: Rng + ?Sized>(rng: &mut R, left: usize) -> GateOp {
    let right = left + 1;
    let lift = |g: GateOp, hi: bool| match g {
        GateOp::One { matrix, label, .. } => GateOp::Two {
            targets: [left, right],
            matrix: if hi { kron_hi(&matrix) } else { kron_lo(&matrix) },
            label,
        },
        two => two,
    };
    match rng.random_range(0..6) {
        0 => lift(GateOp::hadamard(0), false),
        1 => lift(GateOp::hadamard(0), true),
        2 => lift(GateOp::phase(0), false),
        3 => lift(GateOp::phase(0), true),
        4 => GateOp::cnot(left, right),
        _ => GateOp::cnot(right, left),
    }
}

/// Bonds `(i, i+1)` of an open chain: even `i` first, then odd.
pub fn brickwork_bonds(n: usize) -> Vec<usize> {
    (0..n.saturating_sub(1))
        .step_by(2)
        .chain((1..n.saturating_sub(1)).step_by(2))
        .collect()
}

/// One brickwork layer on an open chain of `n` qubits. The gate on bond `i`
/// draws from the stream `seeds / layer / i / CLIFFORD`.
pub fn brickwork_layer(
    n: usize,
    layer_index: usize,
    mode: GateMode,
    seeds: SeedTree,
) -> Result<Vec<GateOp>> {
    if n < 2 {
        return Err(Error::Size {
            what: "brickwork layer",
            got: n,
            min: 2,
            max: MAX_QUBITS,
        });
    }
    let layer_seeds = seeds.child(layer_index as u64);
    brickwork_bonds(n)
        .into_iter()
        .map(|i| {
            let mut rng = layer_seeds.child(i as u64).child(role::CLIFFORD).rng();
            match mode {
                GateMode::Uniform => sample_two_qubit_clifford(&mut rng).retarget(&[i, i + 1]),
                GateMode::Generators => Ok(sample_generator(&mut rng, i)),
            }
        })
        .collect()
}

/// `H = Σ_α ε_α P^α` over the 15 non-identity two-qubit Pauli strings, with
/// `ε_α ~ N(0, σ²)` drawn in dense-index order.
pub fn noise_hamiltonian<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> Result<Mat4> {
    let normal = Normal::new(0.0, sigma).map_err(|_| Error::Domain {
        what: "noise strength σ",
        value: sigma,
    })?;
    let mut h = [[C64::new(0.0, 0.0); 4]; 4];
    for idx in 1..16 {
        let eps: f64 = normal.sample(rng);
        let m = PauliString::from_dense_index(2, idx).matrix();
        for i in 0..4 {
            for j in 0..4 {
                h[i][j] += eps * m[i][j];
            }
        }
    }
    Ok(h)
}

/// `exp(−iH)` for Hermitian `H`, via its eigendecomposition.
pub fn unitary_exp(h: &Mat4) -> Mat4 {
    let hm = DMatrix::from_fn(4, 4, |i, j| h[i][j]);
    let eig = hm.symmetric_eigen();
    let q = &eig.eigenvectors;
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lambda);
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] += q[(i, k)] * phase * q[(j, k)].conj();
            }
        }
    }
    out
}

/// Dresses a two-qubit gate with coherent noise: `Ũ = V U V†`,
/// `V = exp(−i Σ_α ε_α P^α)`. With `σ = 0` the gate is returned unchanged.
pub fn noisy_gate<R: Rng + ?Sized>(gate: &GateOp, sigma: f64, rng: &mut R) -> Result<GateOp> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain {
            what: "noise strength σ",
            value: sigma,
        });
    }
    let GateOp::Two {
        targets, matrix, ..
    } = gate
    else {
        return Err(Error::Unsupported(
            "coherent noise is defined for two-qubit gates only".into(),
        ));
    };
    if sigma == 0.0 {
        return Ok(gate.clone());
    }
    let v = unitary_exp(&noise_hamiltonian(sigma, rng)?);
    let dressed = mat4_mul(&mat4_mul(&v, matrix), &mat4_adjoint(&v));
    GateOp::two(*targets, dressed, GateLabel::Noisy)
}

/// A random brickwork circuit on an open chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub num_qubits: usize,
    pub num_layers: usize,
    #[serde(default)]
    pub noise_sigma: f64,
    pub master_seed: u64,
    #[serde(default)]
    pub gate_mode: GateMode,
}

impl CircuitSpec {
    pub fn new(num_qubits: usize, num_layers: usize, master_seed: u64) -> Self {
        CircuitSpec {
            num_qubits,
            num_layers,
            noise_sigma: 0.0,
            master_seed,
            gate_mode: GateMode::Uniform,
        }
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    pub fn with_mode(mut self, mode: GateMode) -> Self {
        self.gate_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits < 2 || self.num_qubits > MAX_QUBITS {
            return Err(Error::Size {
                what: "circuit",
                got: self.num_qubits,
                min: 2,
                max: MAX_QUBITS,
            });
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::Domain {
                what: "noise strength σ",
                value: self.noise_sigma,
            });
        }
        Ok(())
    }

    /// Gates of layer `k`; does not depend on any other layer. Noise for the
    /// gate on bond `i` draws from `seed / k / i / NOISE`, so noisy and
    /// noiseless circuits with the same seed share their Clifford skeleton.
    pub fn layer(&self, k: usize) -> Result<Vec<GateOp>> {
        let seeds = SeedTree::new(self.master_seed);
        let gates = brickwork_layer(self.num_qubits, k, self.gate_mode, seeds)?;
        if self.noise_sigma == 0.0 {
            return Ok(gates);
        }
        gates
            .into_iter()
            .map(|g| {
                let bond = *g.targets().iter().min().expect("two targets") as u64;
                let mut rng = seeds.child(k as u64).child(bond).child(role::NOISE).rng();
                noisy_gate(&g, self.noise_sigma, &mut rng)
            })
            .collect()
    }
}

/// `U_Cl = Π_k U_k` as a list of layers.
pub fn build_circuit(spec: &CircuitSpec) -> Result<Vec<Vec<GateOp>>> {
    spec.validate()?;
    (0..spec.num_layers).map(|k| spec.layer(k)).collect()
}

pub fn apply_circuit(state: &mut PureState, layers: &[Vec<GateOp>]) -> Result<()> {
    for layer in layers {
        state.apply_all(layer)?;
    }
    Ok(())
}

/// Global-phase-insensitive distance `min_φ max|e^{iφ}a − b|`, estimated by
/// aligning the phases of the largest entries.
pub fn phase_insensitive_distance(a: &Mat4, b: &Mat4) -> f64 {
    let (mut bi, mut bj, mut best) = (0, 0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            if a[i][j].norm() > best {
                best = a[i][j].norm();
                bi = i;
                bj = j;
            }
        }
    }
    if b[bi][bj].norm() < 1e-12 {
        return f64::INFINITY;
    }
    let phase = b[bi][bj] / a[bi][bj];
    let phase = phase / phase.norm();
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((a[i][j] * phase - b[i][j]).norm());
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{mat4_distance, mat4_identity, unitarity_defect};
    use std::collections::HashSet;

    fn to_vec(m: &Mat4) -> Vec<Vec<C64>> {
        m.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn enumeration_has_group_order() {
        let t = &table().tableaux;
        assert_eq!(t.len(), CLIFFORD2_ORDER);
        let distinct: HashSet<_> = t.iter().collect();
        assert_eq!(distinct.len(), CLIFFORD2_ORDER);
        assert!(t.iter().all(|x| x.is_symplectic()));
    }

    /// Reads each unitary back through conjugation and checks the tableau it
    /// realizes is the one it was built from; the 11520 readings are distinct.
    #[test]
    fn unitaries_realize_their_tableaux() {
        let mut seen = HashSet::new();
        for (i, u) in all_two_qubit_cliffords().iter().enumerate() {
            assert!(unitarity_defect(&to_vec(u)) < 1e-12);
            let back = CliffordTableau2::from_unitary(u, 1e-12).expect("Clifford");
            assert_eq!(back, table().tableaux[i]);
            seen.insert(back);
        }
        assert_eq!(seen.len(), CLIFFORD2_ORDER);
    }

    #[test]
    fn sampled_gate_maps_paulis_to_paulis() {
        let mut rng = SeedTree::new(42).rng();
        for _ in 0..200 {
            let g = sample_two_qubit_clifford(&mut rng);
            let u = g.as_two_qubit();
            let ud = mat4_adjoint(&u);
            for p in PauliString::all(2) {
                let c = mat4_mul(&mat4_mul(&u, &gen_matrix(&p)), &ud);
                assert!(match_signed_pauli(&c, 1e-12).is_some());
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_two_qubit_clifford(&mut SeedTree::new(42).rng());
        let b = sample_two_qubit_clifford(&mut SeedTree::new(42).rng());
        assert_eq!(a, b);
    }

    #[test]
    fn brickwork_bond_order() {
        assert_eq!(brickwork_bonds(2), vec![0]);
        assert_eq!(brickwork_bonds(5), vec![0, 2, 1, 3]);
        let layer = brickwork_layer(5, 0, GateMode::Uniform, SeedTree::new(1)).unwrap();
        let targets: Vec<_> = layer.iter().map(|g| g.targets().to_vec()).collect();
        assert_eq!(targets, vec![vec![0, 1], vec![2, 3], vec![1, 2], vec![3, 4]]);
        let layer = brickwork_layer(2, 3, GateMode::Generators, SeedTree::new(1)).unwrap();
        assert_eq!(layer.len(), 1);
        assert!(brickwork_layer(1, 0, GateMode::Uniform, SeedTree::new(1)).is_err());
    }

    #[test]
    fn generator_mode_uses_the_generator_set() {
        let mut labels = HashSet::new();
        for k in 0..50 {
            for g in brickwork_layer(6, k, GateMode::Generators, SeedTree::new(3)).unwrap() {
                labels.insert(format!("{:?}", g.label()));
                let u = g.as_two_qubit();
                assert!(CliffordTableau2::from_unitary(&u, 1e-12).is_some());
            }
        }
        assert_eq!(labels.len(), 3);
    }

    #[test]
    fn zero_noise_is_identity_dressing() {
        let g = sample_two_qubit_clifford(&mut SeedTree::new(8).rng());
        let n = noisy_gate(&g, 0.0, &mut SeedTree::new(9).rng()).unwrap();
        assert_eq!(g, n);
    }

    #[test]
    fn noisy_gate_is_unitary_and_non_clifford() {
        let mut rng = SeedTree::new(10).rng();
        for sigma in [0.01, 0.1, 1.0] {
            let g = sample_two_qubit_clifford(&mut rng);
            let n = noisy_gate(&g, sigma, &mut rng).unwrap();
            assert!(unitarity_defect(&n.dense()) < 1e-12);
            assert!(CliffordTableau2::from_unitary(&n.as_two_qubit(), 1e-9).is_none());
        }
    }

    #[test]
    fn noisy_gate_rejects_bad_input() {
        let mut rng = SeedTree::new(1).rng();
        assert!(matches!(
            noisy_gate(&GateOp::hadamard(0), 0.1, &mut rng),
            Err(Error::Unsupported(_))
        ));
        assert!(noisy_gate(&GateOp::cnot(0, 1), -0.1, &mut rng).is_err());
    }

    /// Scaling-and-squaring Taylor series for `exp(−iH)`.
    fn taylor_exp(h: &Mat4) -> Mat4 {
        let norm: f64 = h.iter().flatten().map(|c| c.norm()).sum();
        let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
        let scale = 0.5f64.powi(squarings);
        let mut a = [[C64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                a[i][j] = C64::new(0.0, -scale) * h[i][j];
            }
        }
        let mut sum = mat4_identity();
        let mut term = mat4_identity();
        for k in 1..30 {
            term = mat4_mul(&term, &a);
            for row in term.iter_mut() {
                for x in row.iter_mut() {
                    *x /= k as f64;
                }
            }
            for i in 0..4 {
                for j in 0..4 {
                    sum[i][j] += term[i][j];
                }
            }
        }
        for _ in 0..squarings {
            sum = mat4_mul(&sum, &sum);
        }
        sum
    }

    #[test]
    fn exponential_matches_taylor_oracle() {
        let mut rng = SeedTree::new(0xE4).rng();
        for sigma in [0.1, 0.7] {
            for _ in 0..20 {
                let h = noise_hamiltonian(sigma, &mut rng).unwrap();
                assert!(mat4_distance(&unitary_exp(&h), &taylor_exp(&h)) < 1e-10);
            }
        }
    }

    #[test]
    fn circuit_determinism_and_shared_skeleton() {
        let spec = CircuitSpec::new(6, 4, 77);
        assert_eq!(build_circuit(&spec).unwrap(), build_circuit(&spec).unwrap());
        assert!(build_circuit(&CircuitSpec::new(6, 0, 1)).unwrap().is_empty());

        let noisy = spec.clone().with_noise(0.05);
        let a = build_circuit(&noisy).unwrap();
        assert_eq!(a, build_circuit(&noisy).unwrap());
        let clean = build_circuit(&spec).unwrap();
        for (la, lc) in a.iter().zip(&clean) {
            for (ga, gc) in la.iter().zip(lc) {
                assert_eq!(ga.targets(), gc.targets());
                assert_eq!(ga.label(), GateLabel::Noisy);
                // small σ keeps the dressed gate near its Clifford skeleton
                assert!(mat4_distance(&ga.as_two_qubit(), &gc.as_two_qubit()) < 1.0);
            }
        }
        assert!(CircuitSpec::new(1, 3, 0).validate().is_err());
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let u = clifford2_unitary(1234).unwrap();
        let mut v = u;
        for row in v.iter_mut() {
            for x in row.iter_mut() {
                *x *= C64::from_polar(1.0, 0.7);
            }
        }
        assert!(phase_insensitive_distance(&u, &v) < 1e-14);
    }
}
