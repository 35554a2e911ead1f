use proptest::prelude::*;

use flatmagic::clifford::{noise_hamiltonian, unitary_exp, CircuitSpec, GateMode};
use flatmagic::gate::{GateLabel, Mat2};
use flatmagic::pauli::{sre, stabilizer_linear_entropy, xi_distribution};
use flatmagic::seed::SeedTree;
use flatmagic::statevec::{
    anti_flatness, entanglement_spectrum, purity_moments, reduced_density_matrix, Bipartition,
    PureState,
};
use flatmagic::{GateOp, C64};

fn state(n: usize, seed: u64) -> PureState {
    PureState::random(n, &mut SeedTree::new(seed).rng()).unwrap()
}

fn rotation(a: f64, b: f64, c: f64) -> Mat2 {
    // Rz(a) Ry(b) Rz(c)
    let (cb, sb) = ((b / 2.0).cos(), (b / 2.0).sin());
    let e = |t: f64| C64::from_polar(1.0, t / 2.0);
    [
        [e(-a - c) * cb, -e(-a + c) * sb],
        [e(a - c) * sb, e(a + c) * cb],
    ]
}

fn part(n: usize, mask: u64) -> Bipartition {
    let full = (1u64 << n) - 1;
    Bipartition::from_mask(n, (mask & full).clamp(1, full - 1)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn layers_preserve_norm(n in 2usize..9, seed in any::<u64>(), sigma in 0.0f64..0.2, gen in any::<bool>()) {
        let mode = if gen { GateMode::Generators } else { GateMode::Uniform };
        let spec = CircuitSpec::new(n, 4, seed).with_noise(sigma).with_mode(mode);
        let mut s = state(n, seed ^ 1);
        for k in 0..4 {
            s.apply_all(&spec.layer(k).unwrap()).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn flatness_symmetric_under_complement(n in 2usize..9, seed in any::<u64>(), mask in any::<u64>()) {
        let s = state(n, seed);
        let p = part(n, mask);
        let a = anti_flatness(&s, &p).unwrap();
        let b = anti_flatness(&s, &p.complement()).unwrap();
        prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn flatness_invariant_under_local_unitaries(
        n in 2usize..8,
        seed in any::<u64>(),
        mask in any::<u64>(),
        angles in proptest::collection::vec(-3.2f64..3.2, 24),
    ) {
        let s = state(n, seed);
        let p = part(n, mask);
        let mut t = s.clone();
        for q in 0..n {
            let m = rotation(angles[3 * q], angles[3 * q + 1], angles[3 * q + 2]);
            t.apply_gate(&GateOp::one(q, m, GateLabel::Custom).unwrap()).unwrap();
        }
        // a two-qubit unitary inside A when A has two qubits
        let inside = p.subsystem();
        if inside.len() >= 2 {
            let h = noise_hamiltonian(0.7, &mut SeedTree::new(seed).rng()).unwrap();
            let u = unitary_exp(&h);
            t.apply_gate(&GateOp::two([inside[0], inside[1]], u, GateLabel::Custom).unwrap()).unwrap();
        }
        let a = anti_flatness(&s, &p).unwrap();
        let b = anti_flatness(&t, &p).unwrap();
        prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn moments_match_spectrum(n in 2usize..9, seed in any::<u64>(), mask in any::<u64>()) {
        let s = state(n, seed);
        let rdm = reduced_density_matrix(&s, &part(n, mask)).unwrap();
        let m = purity_moments(&rdm);
        let spec = entanglement_spectrum(&rdm);
        let p2: f64 = spec.iter().map(|l| l * l).sum();
        let p3: f64 = spec.iter().map(|l| l * l * l).sum();
        prop_assert!((m.p2 - p2).abs() < 1e-12);
        prop_assert!((m.p3 - p3).abs() < 1e-12);
        prop_assert!(spec.iter().all(|&l| l > -1e-12));
        prop_assert!((spec.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn magic_invariant_under_cliffords(n in 1usize..7, seed in any::<u64>()) {
        let s = state(n, seed);
        let before = stabilizer_linear_entropy(&s).unwrap();
        let xi = xi_distribution(&s).unwrap();
        prop_assert!((xi.total() - 1.0).abs() < 1e-12);
        if n >= 2 {
            let spec = CircuitSpec::new(n, 5, seed);
            let mut t = s.clone();
            for k in 0..5 {
                t.apply_all(&spec.layer(k).unwrap()).unwrap();
            }
            prop_assert!((stabilizer_linear_entropy(&t).unwrap() - before).abs() < 1e-12);
        }
    }

    #[test]
    fn sre_additive(na in 1usize..4, nb in 1usize..4, seed in any::<u64>()) {
        let a = state(na, seed);
        let b = state(nb, seed.wrapping_add(1));
        let joint = sre(&a.tensor(&b).unwrap(), 2.0).unwrap();
        let sum = sre(&a, 2.0).unwrap() + sre(&b, 2.0).unwrap();
        prop_assert!((joint - sum).abs() < 1e-10);
    }
}
