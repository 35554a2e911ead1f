//! Exact small-instance oracles: stabilizer states, stabilizer fidelity, the
//! full two-qubit Clifford average of the anti-flatness, the flatness constant
//! `c(d, d_A)` and toric-code ground states.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::clifford::all_two_qubit_cliffords;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gate::{GateLabel, GateOp};
use crate::pauli::PauliString;
use crate::statevec::{anti_flatness, Bipartition, PureState, MAX_QUBITS};
use crate::C64;

/// Largest `n` for which all stabilizer states are enumerated.
pub const MAX_ENUMERATED_QUBITS: usize = 3;

/// `2^n Π_{k=1..n} (2^k + 1)`.
pub fn stabilizer_state_count(n: usize) -> usize {
    (1..=n).fold(1usize << n, |acc, k| acc * ((1usize << k) + 1))
}

#[derive(Clone, Debug)]
pub struct StabilizerStateSet {
    num_qubits: usize,
    states: Vec<PureState>,
}

impl StabilizerStateSet {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Unsigned stabilizer groups as bitsets over dense Pauli indices (`4^n ≤ 64`),
/// each with one generating set.
fn stabilizer_groups(n: usize) -> BTreeMap<u64, Vec<PauliString>> {
    fn close(group: u64, g: &PauliString, n: usize) -> u64 {
        let mut out = group;
        for idx in 0..1usize << (2 * n) {
            if group >> idx & 1 == 1 {
                let (_, prod) = PauliString::from_dense_index(n, idx).mul(g);
                out |= 1 << prod.dense_index();
            }
        }
        out
    }

    fn extend(
        n: usize,
        group: u64,
        gens: &mut Vec<PauliString>,
        start: usize,
        out: &mut BTreeMap<u64, Vec<PauliString>>,
    ) {
        if gens.len() == n {
            out.entry(group).or_insert_with(|| gens.clone());
            return;
        }
        for idx in start..1usize << (2 * n) {
            if group >> idx & 1 == 1 {
                continue;
            }
            let p = PauliString::from_dense_index(n, idx);
            if gens.iter().all(|g| g.commutes_with(&p)) {
                gens.push(p);
                extend(n, close(group, &p, n), gens, idx + 1, out);
                gens.pop();
            }
        }
    }

    let mut out = BTreeMap::new();
    extend(n, 1, &mut Vec::new(), 1, &mut out);
    out
}

fn project_onto(n: usize, gens: &[PauliString], signs: u32) -> PureState {
    let d = 1usize << n;
    for k in 0..d {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[k] = C64::new(1.0, 0.0);
        for (i, g) in gens.iter().enumerate() {
            let s = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
            let mut pv = v.clone();
            g.apply(&mut pv);
            for (a, b) in v.iter_mut().zip(&pv) {
                *a = (*a + s * b) * 0.5;
            }
        }
        let norm2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if norm2 > 1e-6 {
            let mut st = PureState::normalized(v).expect("non-zero projection");
            st.fix_global_phase();
            return st;
        }
    }
    unreachable!("a stabilizer projector has rank one")
}

fn build_set(n: usize) -> StabilizerStateSet {
    let mut states = Vec::with_capacity(stabilizer_state_count(n));
    for gens in stabilizer_groups(n).values() {
        for signs in 0..1u32 << n {
            states.push(project_onto(n, gens, signs));
        }
    }
    StabilizerStateSet {
        num_qubits: n,
        states,
    }
}

/// All pure stabilizer states on `n ≤ 3` qubits, one representative per
/// global-phase class (first non-zero amplitude real positive).
pub fn enumerate_stabilizer_states(n: usize) -> Result<&'static StabilizerStateSet> {
    static SETS: [OnceLock<StabilizerStateSet>; MAX_ENUMERATED_QUBITS] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if n == 0 || n > MAX_ENUMERATED_QUBITS {
        return Err(Error::Capacity {
            what: "stabilizer state enumeration",
            got: n,
            cap: MAX_ENUMERATED_QUBITS,
        });
    }
    Ok(SETS[n - 1].get_or_init(|| build_set(n)))
}

/// `S_max(ψ) = max_σ |⟨σ|ψ⟩|²` over all stabilizer states, `n ≤ 3`.
pub fn stabilizer_fidelity(state: &PureState) -> Result<f64> {
    let set = enumerate_stabilizer_states(state.num_qubits())?;
    let mut best: f64 = 0.0;
    for s in set.states() {
        best = best.max(s.fidelity(state)?);
    }
    Ok(best)
}

/// Product of single-qubit stabilizer fidelities of
/// `⊗_i (|0⟩ + e^{iθ_i}|1⟩)/√2`. Exact for `n = 1`; for larger `n` it is the
/// overlap with the best product stabilizer state, reported as an estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityEstimate {
    pub value: f64,
    pub exact: bool,
}

pub fn product_fidelity_estimate(thetas: &[f64]) -> Result<FidelityEstimate> {
    let mut value = 1.0;
    for &t in thetas {
        value *= stabilizer_fidelity(&PureState::product(&[t])?)?;
    }
    Ok(FidelityEstimate {
        value,
        exact: thetas.len() == 1,
    })
}

/// `(1/11520) Σ_Γ F_A(Γ|ψ⟩)` over the whole two-qubit Clifford group, `A = {0}`.
pub fn exhaustive_clifford_average(state: &PureState) -> Result<f64> {
    exhaustive_clifford_average_with(state, Exec::default())
}

pub fn exhaustive_clifford_average_with(state: &PureState, exec: Exec) -> Result<f64> {
    if state.num_qubits() != 2 {
        return Err(Error::Unsupported(format!(
            "exhaustive Clifford average needs n = 2, got {}",
            state.num_qubits()
        )));
    }
    let part = Bipartition::new(2, &[0])?;
    let group = all_two_qubit_cliffords();
    let values = exec.map(0..group.len(), |i| {
        let mut s = state.clone();
        s.apply_gate(&GateOp::Two {
            targets: [0, 1],
            matrix: group[i],
            label: GateLabel::Clifford(i as u16),
        })?;
        anti_flatness(&s, &part)
    });
    let total = values.into_iter().sum::<Result<f64>>()?;
    Ok(total / group.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantMode {
    /// `(d² − d_A²)/d³`, the large-`d` form.
    Asymptotic,
    /// A value pinned by the exhaustive oracle and stored in the golden fixture.
    ExactDerived,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatnessConstant {
    pub d: u64,
    pub d_a: u64,
    pub value: f64,
    pub mode: ConstantMode,
}

/// Golden constants, committed alongside the crate.
pub const GOLDEN_FIXTURE: &str = include_str!("../fixtures/golden.txt");

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GoldenConstants {
    /// `(d, d_A) → c`
    pub flatness: Vec<(u64, u64, f64)>,
    /// `(n, count)`
    pub stabilizer_counts: Vec<(usize, usize)>,
}

/// Parses the fixture grammar: `#` comments, blank lines, and records
/// `c_exact <d> <d_A> <value>` or `stabilizer_count <n> <count>`.
pub fn parse_golden(text: &str) -> Result<GoldenConstants> {
    let mut out = GoldenConstants::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::Validation(format!("golden fixture line {}: {line:?}", lineno + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["c_exact", d, da, v] => out.flatness.push((
                d.parse().map_err(|_| bad())?,
                da.parse().map_err(|_| bad())?,
                v.parse().map_err(|_| bad())?,
            )),
            ["stabilizer_count", n, c] => out
                .stabilizer_counts
                .push((n.parse().map_err(|_| bad())?, c.parse().map_err(|_| bad())?)),
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

pub fn golden() -> &'static GoldenConstants {
    static GOLDEN: OnceLock<GoldenConstants> = OnceLock::new();
    GOLDEN.get_or_init(|| parse_golden(GOLDEN_FIXTURE).expect("committed fixture parses"))
}

/// `c(d, d_A)` in the requested mode.
///
/// `F_A` is symmetric under `A ↔ B`, so the asymptotic form is evaluated on
/// the smaller side, `min(d_A, d/d_A)`.
pub fn c_constant(d: u64, d_a: u64, mode: ConstantMode) -> Result<FlatnessConstant> {
    if !d.is_power_of_two() || !d_a.is_power_of_two() || d_a < 2 || d_a >= d {
        return Err(Error::Validation(format!(
            "c(d, d_A) needs powers of two with 2 ≤ d_A < d, got d = {d}, d_A = {d_a}"
        )));
    }
    let value = match mode {
        ConstantMode::Asymptotic => {
            let small = d_a.min(d / d_a) as f64;
            let d = d as f64;
            (d * d - small * small) / (d * d * d)
        }
        ConstantMode::ExactDerived => {
            let small = d_a.min(d / d_a);
            golden()
                .flatness
                .iter()
                .find(|&&(gd, ga, _)| gd == d && ga == small)
                .map(|&(_, _, v)| v)
                .ok_or_else(|| {
                    Error::Unavailable(format!(
                        "no exact c({d}, {d_a}) on record; use asymptotic mode"
                    ))
                })?
        }
    };
    Ok(FlatnessConstant {
        d,
        d_a,
        value,
        mode,
    })
}

/// Exact constant where one is on record, otherwise the asymptotic form.
pub fn best_c_constant(d: u64, d_a: u64) -> Result<FlatnessConstant> {
    match c_constant(d, d_a, ConstantMode::ExactDerived) {
        Err(Error::Unavailable(_)) => c_constant(d, d_a, ConstantMode::Asymptotic),
        other => other,
    }
}

/// Kitaev toric code on an `lx × ly` periodic square lattice, one qubit per
/// bond: horizontal bond `(x, y)` is qubit `y·lx + x`, vertical bond `(x, y)`
/// is qubit `lx·ly + y·lx + x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToricCode {
    lx: usize,
    ly: usize,
}

impl ToricCode {
    pub fn new(lx: usize, ly: usize) -> Result<Self> {
        if lx < 2 || ly < 2 {
            return Err(Error::Validation(format!(
                "toric lattice needs lx, ly ≥ 2, got {lx} × {ly}"
            )));
        }
        let n = 2 * lx * ly;
        if n > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "toric code",
                got: n,
                cap: MAX_QUBITS,
            });
        }
        Ok(ToricCode { lx, ly })
    }

    pub fn num_qubits(&self) -> usize {
        2 * self.lx * self.ly
    }

    fn h(&self, x: usize, y: usize) -> usize {
        (y % self.ly) * self.lx + (x % self.lx)
    }

    fn v(&self, x: usize, y: usize) -> usize {
        self.lx * self.ly + (y % self.ly) * self.lx + (x % self.lx)
    }

    /// `A_v = Π X` over the four bonds meeting at each vertex.
    pub fn vertex_operators(&self) -> Vec<PauliString> {
        let (lx, ly) = (self.lx, self.ly);
        let mut out = Vec::with_capacity(lx * ly);
        for y in 0..ly {
            for x in 0..lx {
                let bonds = [
                    self.h(x, y),
                    self.h(x + lx - 1, y),
                    self.v(x, y),
                    self.v(x, y + ly - 1),
                ];
                out.push(
                    PauliString::on_qubits(self.num_qubits(), &bonds, crate::pauli::Pauli::X)
                        .expect("bonds in range"),
                );
            }
        }
        out
    }

    /// `B_p = Π Z` around each plaquette.
    pub fn plaquette_operators(&self) -> Vec<PauliString> {
        let (lx, ly) = (self.lx, self.ly);
        let mut out = Vec::with_capacity(lx * ly);
        for y in 0..ly {
            for x in 0..lx {
                let bonds = [
                    self.h(x, y),
                    self.h(x, y + 1),
                    self.v(x, y),
                    self.v(x + 1, y),
                ];
                out.push(
                    PauliString::on_qubits(self.num_qubits(), &bonds, crate::pauli::Pauli::Z)
                        .expect("bonds in range"),
                );
            }
        }
        out
    }

    /// `∝ Π_v (1 + A_v)|0…0⟩`.
    pub fn ground_state(&self) -> Result<PureState> {
        let n = self.num_qubits();
        let mut amps = PureState::zero(n)?.amplitudes().to_vec();
        for a in self.vertex_operators() {
            let mask = a.x_mask() as usize;
            let old = amps.clone();
            for (k, amp) in amps.iter_mut().enumerate() {
                *amp += old[k ^ mask];
            }
        }
        PureState::normalized(amps)
    }

    /// `⟨H⟩` with `H = −Σ_v A_v − Σ_p B_p`.
    pub fn energy(&self, state: &PureState) -> Result<f64> {
        let mut e = 0.0;
        for p in self
            .vertex_operators()
            .into_iter()
            .chain(self.plaquette_operators())
        {
            e -= p.expectation(state)?;
        }
        Ok(e)
    }
}

pub fn toric_code_ground_state(lx: usize, ly: usize) -> Result<PureState> {
    ToricCode::new(lx, ly)?.ground_state()
}
