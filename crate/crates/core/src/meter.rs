//! Meter-qubit protocols that read modular values off an ancilla.
//!
//! The meter register is appended after the system factors. After the
//! coupling unitary acts on `psi (x) meter`, the system is projected onto
//! `phi` (a partial inner product), leaving an unnormalized meter ket whose
//! amplitudes carry `<phi|psi>` times the modular values.

use std::collections::BTreeMap;
use std::io::{self, Write};

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates;
use crate::tensor::{embed, tensor_kets, tensor_ops, HilbertShape, Ket, Operator, SiteObservable};
use crate::values::{exp_spectral, weak_value, Coupling, PrePostEnsemble};

const PREP_TOL: f64 = 1e-12;

/// Single meter qubit `gamma|0> + gamma_bar|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeterPrep {
    pub gamma: f64,
    pub gamma_bar: f64,
}

impl MeterPrep {
    /// `gamma = sqrt(1 - gamma_bar^2)`, `gamma_bar` in `(0, 1)`.
    pub fn new(gamma_bar: f64) -> Result<Self> {
        if !(gamma_bar > 0.0 && gamma_bar < 1.0) {
            return Err(Error::InvalidMeter(format!(
                "gamma_bar must lie in (0, 1), got {gamma_bar}"
            )));
        }
        Ok(Self {
            gamma: (1.0 - gamma_bar * gamma_bar).sqrt(),
            gamma_bar,
        })
    }

    pub fn from_amplitudes(gamma: f64, gamma_bar: f64) -> Result<Self> {
        if !(gamma_bar > 0.0) || (gamma * gamma + gamma_bar * gamma_bar - 1.0).abs() > PREP_TOL {
            return Err(Error::InvalidMeter(format!(
                "need gamma^2 + gamma_bar^2 = 1 and gamma_bar > 0, got ({gamma}, {gamma_bar})"
            )));
        }
        Ok(Self { gamma, gamma_bar })
    }

    pub fn ket(&self) -> Ket {
        Ket::qubit(C64::from(self.gamma), C64::from(self.gamma_bar))
    }
}

/// Entangled two-qubit meter `gamma|HH> + gamma_bar(|HV> + |VH> + |VV>)`,
/// factor order (1m, 2m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitMeterPrep {
    pub gamma: f64,
    pub gamma_bar: f64,
}

impl TwoQubitMeterPrep {
    /// `gamma = sqrt(1 - 3 gamma_bar^2)`.
    pub fn new(gamma_bar: f64) -> Result<Self> {
        if !(gamma_bar > 0.0 && 3.0 * gamma_bar * gamma_bar < 1.0) {
            return Err(Error::InvalidMeter(format!(
                "gamma_bar must lie in (0, 1/sqrt3), got {gamma_bar}"
            )));
        }
        Ok(Self {
            gamma: (1.0 - 3.0 * gamma_bar * gamma_bar).sqrt(),
            gamma_bar,
        })
    }

    pub fn from_amplitudes(gamma: f64, gamma_bar: f64) -> Result<Self> {
        if !(gamma_bar > 0.0) || (gamma * gamma + 3.0 * gamma_bar * gamma_bar - 1.0).abs() > PREP_TOL {
            return Err(Error::InvalidMeter(format!(
                "need gamma^2 + 3 gamma_bar^2 = 1 and gamma_bar > 0, got ({gamma}, {gamma_bar})"
            )));
        }
        Ok(Self { gamma, gamma_bar })
    }

    pub fn ket(&self) -> Ket {
        let (g, b) = (C64::from(self.gamma), C64::from(self.gamma_bar));
        Ket::new(HilbertShape::qubits(2).expect("two qubits"), vec![g, b, b, b]).expect("4 amplitudes")
    }
}

/// Post-selected meter state and the modular values read from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeterOutcome {
    /// Meter factors only, unnormalized.
    pub meter_ket: Ket,
    /// `<phi|psi>`
    #[serde(with = "crate::json::complex")]
    pub post_selection_amplitude: C64,
    /// Meter basis label -> modular value carried by that amplitude.
    #[serde(with = "crate::json::complex_map")]
    pub extracted: BTreeMap<String, C64>,
}

impl MeterOutcome {
    pub fn get(&self, label: &str) -> Option<C64> {
        self.extracted.get(label).copied()
    }
}

/// Joint state `U (psi (x) meter)` before post-selection.
pub fn evolve_joint(u: &Operator, e: &PrePostEnsemble, meter: &Ket) -> Result<Ket> {
    u.apply(&tensor_kets(&[e.psi().clone(), meter.clone()])?)
}

/// `(<phi| (x) I) joint`: partial inner product over the leading system factors.
pub fn project_system(joint: &Ket, phi: &Ket, meter_shape: &HilbertShape) -> Result<Ket> {
    let expected = phi.shape().concat(meter_shape)?;
    if joint.shape() != &expected {
        return Err(Error::ShapeMismatch {
            left: joint.shape().dims().to_vec(),
            right: expected.dims().to_vec(),
        });
    }
    let dm = meter_shape.total_dim();
    let amps = joint.amplitudes();
    let out = (0..dm)
        .map(|m| {
            phi.amplitudes()
                .iter()
                .enumerate()
                .map(|(s, p)| p.conj() * amps[s * dm + m])
                .sum()
        })
        .collect();
    Ket::new(meter_shape.clone(), out)
}

/// Apply a system (x) meter unitary and post-select the system on `phi`.
pub fn run_meter_unitary(u: &Operator, e: &PrePostEnsemble, meter: &Ket) -> Result<Ket> {
    project_system(&evolve_joint(u, e, meter)?, e.phi(), meter.shape())
}

fn single_outcome(meter_ket: Ket, e: &PrePostEnsemble, m: &MeterPrep) -> MeterOutcome {
    let overlap = e.overlap();
    let modular = meter_ket.amplitudes()[1] / (m.gamma_bar * overlap);
    MeterOutcome {
        meter_ket,
        post_selection_amplitude: overlap,
        extracted: BTreeMap::from([("1".to_string(), modular)]),
    }
}

/// Couple `A` to one meter qubit through `exp(-ig A (x) |1><1|)`.
pub fn run_single_meter(
    a: &Operator,
    c: Coupling,
    e: &PrePostEnsemble,
    m: &MeterPrep,
) -> Result<MeterOutcome> {
    if a.shape() != e.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape().dims().to_vec(),
            right: e.shape().dims().to_vec(),
        });
    }
    let coupling = tensor_ops(&[a.clone(), gates::proj1()])?;
    let u = exp_spectral(&coupling, c)?;
    Ok(single_outcome(run_meter_unitary(&u, e, &m.ket())?, e, m))
}

/// Same readout as [`run_single_meter`] for an explicit system (x) meter
/// unitary, e.g. a controlled rotation circuit.
pub fn run_single_meter_circuit(
    u: &Operator,
    e: &PrePostEnsemble,
    m: &MeterPrep,
) -> Result<MeterOutcome> {
    Ok(single_outcome(run_meter_unitary(u, e, &m.ket())?, e, m))
}

/// Meter labels of the two-qubit readout, in (1m, 2m) order. Meter 1m
/// couples to the polarization-like observable, 2m to the path projector.
pub const LABEL_POLARIZATION: &str = "VH";
pub const LABEL_PATH: &str = "HV";
pub const LABEL_SUM: &str = "VV";

/// Two-qubit meter with `H = g(S (x) Pi_V^(1m) + P (x) Pi_V^(2m))`.
///
/// The extracted map holds `(S)_mod` under [`LABEL_POLARIZATION`],
/// `(P)_mod` under [`LABEL_PATH`] and `(S+P)_mod` under [`LABEL_SUM`].
pub fn run_two_qubit_meter(
    s_obs: &SiteObservable,
    p_obs: &SiteObservable,
    c: Coupling,
    e: &PrePostEnsemble,
    m: &TwoQubitMeterPrep,
) -> Result<MeterOutcome> {
    let shape = e.shape();
    if shape.num_factors() < 2 {
        return Err(Error::TooFewFactors {
            needed: 2,
            found: shape.num_factors(),
        });
    }
    if s_obs.site() == p_obs.site() {
        return Err(Error::SharedSite { site: s_obs.site() });
    }
    let pv = gates::proj1();
    let id = gates::identity2();
    let s_term = tensor_ops(&[embed(s_obs, shape)?, pv.clone(), id.clone()])?;
    let p_term = tensor_ops(&[embed(p_obs, shape)?, id, pv])?;
    let u = exp_spectral(&s_term.add(&p_term)?, c)?;
    let meter_ket = run_meter_unitary(&u, e, &m.ket())?;
    let overlap = e.overlap();
    let scale = m.gamma_bar * overlap;
    let amps = meter_ket.amplitudes();
    let extracted = BTreeMap::from([
        (LABEL_PATH.to_string(), amps[1] / scale),
        (LABEL_POLARIZATION.to_string(), amps[2] / scale),
        (LABEL_SUM.to_string(), amps[3] / scale),
    ]);
    Ok(MeterOutcome {
        meter_ket,
        post_selection_amplitude: overlap,
        extracted,
    })
}

/// Histogram of product-Pauli measurements on the meter register.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub shots: u64,
    pub basis: String,
    pub seed: u64,
    /// Outcome bitstring (`0` = +1 eigenvalue per qubit) -> count.
    pub counts: BTreeMap<String, u64>,
}

impl ShotRecord {
    /// `<P>` estimate for a single-qubit record.
    pub fn expectation(&self) -> f64 {
        let n0 = self.counts.get("0").copied().unwrap_or(0) as f64;
        let n1 = self.counts.get("1").copied().unwrap_or(0) as f64;
        (n0 - n1) / self.shots as f64
    }
}

fn basis_change(basis: &str, qubits: usize) -> Result<Operator> {
    if basis.chars().count() != qubits {
        return Err(Error::UnknownBasis(basis.to_string()));
    }
    let parts = basis
        .chars()
        .map(|ch| match ch {
            'Z' => Ok(gates::identity2()),
            'X' => Ok(gates::hadamard()),
            'Y' => gates::hadamard().matmul(&gates::phase_dagger()),
            _ => Err(Error::UnknownBasis(basis.to_string())),
        })
        .collect::<Result<Vec<_>>>()?;
    tensor_ops(&parts)
}

fn meter_qubits(ket: &Ket) -> Result<usize> {
    let dims = ket.shape().dims();
    if dims.iter().any(|&d| d != 2) {
        return Err(Error::NotQubits { dims: dims.to_vec() });
    }
    Ok(dims.len())
}

/// Outcome probabilities of the normalized meter state in `basis`
/// (one of `X`, `Y`, `Z` per meter qubit), indexed by bitstring value.
pub fn basis_probabilities(outcome: &MeterOutcome, basis: &str) -> Result<Vec<f64>> {
    let k = meter_qubits(&outcome.meter_ket)?;
    let rotated = basis_change(basis, k)?.apply(&outcome.meter_ket.normalized()?)?;
    Ok(rotated.amplitudes().iter().map(|a| a.norm_sqr()).collect())
}

/// Draw `shots` i.i.d. outcomes from the meter state measured in `basis`.
pub fn sample_meter(outcome: &MeterOutcome, basis: &str, shots: u64, seed: u64) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let probs = basis_probabilities(outcome, basis)?;
    let k = meter_qubits(&outcome.meter_ket)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // multinomial draw as a chain of conditional binomials
    let mut remaining = shots;
    let mut mass = 1.0_f64;
    let mut counts = BTreeMap::new();
    for (i, &p) in probs.iter().enumerate() {
        let last = i + 1 == probs.len();
        let n = if last || remaining == 0 {
            remaining
        } else {
            let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
            Binomial::new(remaining, q).expect("q in [0,1]").sample(&mut rng)
        };
        remaining -= n;
        mass -= p;
        counts.insert(format!("{i:0k$b}"), n);
    }
    Ok(ShotRecord {
        shots,
        basis: basis.to_string(),
        seed,
        counts,
    })
}

/// Exact single-qubit Pauli expectations `(X, Y, Z)` of the normalized meter state.
pub fn pauli_expectations(outcome: &MeterOutcome) -> Result<(f64, f64, f64)> {
    if meter_qubits(&outcome.meter_ket)? != 1 {
        return Err(Error::NotQubits {
            dims: outcome.meter_ket.shape().dims().to_vec(),
        });
    }
    let k = outcome.meter_ket.normalized()?;
    let (a, b) = (k.amplitudes()[0], k.amplitudes()[1]);
    let ab = a.conj() * b;
    Ok((2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()))
}

/// Modular value reconstructed from meter tomography.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularEstimate {
    #[serde(with = "crate::json::complex")]
    pub value: C64,
    /// Delta-method standard errors of the real and imaginary parts.
    pub std_error_re: f64,
    pub std_error_im: f64,
}

impl ModularEstimate {
    /// Combined standard error `sqrt(se_re^2 + se_im^2)`.
    pub fn std_error(&self) -> f64 {
        self.std_error_re.hypot(self.std_error_im)
    }

    /// `|value - exact| <= k * std_error()`.
    pub fn within(&self, exact: C64, k: f64) -> bool {
        (self.value - exact).norm() <= k * self.std_error()
    }
}

/// Invert the Bloch components of `gamma|0> + gamma_bar m |1>` (up to
/// normalization) for `m = (gamma / gamma_bar) (X + iY) / (1 + Z)`.
pub fn estimate_from_expectations(x: f64, y: f64, z: f64, m: &MeterPrep) -> Result<C64> {
    let pop0 = 1.0 + z;
    if !(pop0 > 1e-15) {
        return Err(Error::ZeroPopulation);
    }
    Ok(C64::new(x, y) / pop0 * (m.gamma / m.gamma_bar))
}

/// Pool X/Y/Z shot records of a single meter qubit into a modular value estimate.
pub fn estimate_modular_from_shots(records: &[ShotRecord], m: &MeterPrep) -> Result<ModularEstimate> {
    let pooled = |basis: &str| -> Result<(f64, f64)> {
        let (mut shots, mut diff) = (0u64, 0i128);
        for r in records.iter().filter(|r| r.basis == basis) {
            shots += r.shots;
            let n0 = r.counts.get("0").copied().unwrap_or(0) as i128;
            let n1 = r.counts.get("1").copied().unwrap_or(0) as i128;
            diff += n0 - n1;
        }
        if shots == 0 {
            return Err(Error::MissingBasis(basis.to_string()));
        }
        let n = shots as f64;
        let mean = diff as f64 / n;
        Ok((mean, (1.0 - mean * mean).max(0.0) / n))
    };
    let (x, vx) = pooled("X")?;
    let (y, vy) = pooled("Y")?;
    let (z, vz) = pooled("Z")?;
    let value = estimate_from_expectations(x, y, z, m)?;
    let k = m.gamma / m.gamma_bar;
    let d = 1.0 + z;
    let var_re = k * k * (vx / (d * d) + x * x * vz / d.powi(4));
    let var_im = k * k * (vy / (d * d) + y * y * vz / d.powi(4));
    Ok(ModularEstimate {
        value,
        std_error_re: var_re.sqrt(),
        std_error_im: var_im.sqrt(),
    })
}

/// `C-R_z(theta) = I (x) |0><0| + R_z(theta) (x) |1><1|` on system (x) meter.
pub fn build_crz_circuit(theta: f64) -> Operator {
    let idle = tensor_ops(&[gates::identity2(), gates::proj0()]).expect("2x2 parts");
    let active = tensor_ops(&[gates::rz(theta), gates::proj1()]).expect("2x2 parts");
    idle.add(&active).expect("same shape")
}

/// One row of a controlled-rotation sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub g: f64,
    #[serde(with = "crate::json::complex")]
    pub modular: C64,
    pub abs_mod: f64,
    #[serde(with = "crate::json::complex")]
    pub weak: C64,
}

/// `(A)_mod` over `g = theta / 2` for each `theta`, read from a single meter.
pub fn observable_sweep(
    a: &Operator,
    e: &PrePostEnsemble,
    m: &MeterPrep,
    thetas: &[f64],
) -> Result<Vec<SweepRow>> {
    let weak = weak_value(a, e)?;
    thetas
        .iter()
        .map(|&theta| {
            let c = Coupling::from_theta(theta)?;
            let modular = run_single_meter(a, c, e, m)?.extracted["1"];
            Ok(SweepRow {
                theta,
                g: c.g(),
                modular,
                abs_mod: modular.norm(),
                weak,
            })
        })
        .collect()
}

/// Sweep of `(sigma_z)_mod` for a single system qubit.
pub fn crz_sweep(e: &PrePostEnsemble, m: &MeterPrep, thetas: &[f64]) -> Result<Vec<SweepRow>> {
    if e.shape().dims() != [2] {
        return Err(Error::ShapeMismatch {
            left: e.shape().dims().to_vec(),
            right: vec![2],
        });
    }
    observable_sweep(&gates::sigma_z(), e, m, thetas)
}

pub const SWEEP_CSV_HEADER: &str = "g,re_mod,im_mod,abs_mod,re_weak,im_weak";

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.g, r.modular.re, r.modular.im, r.abs_mod, r.weak.re, r.weak.im
        )?;
    }
    Ok(())
}
