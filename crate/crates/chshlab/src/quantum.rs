//! Two-qubit quantum strategies and their CHSH operator certificates.
//!
//! Observables are qubit spin measurements n̂·σ⃗ — Hermitian, traceless,
//! squaring to the identity — combined into the 4×4 CHSH operator
//! Ĉ = Â⊗B̂ + Â⊗B̂′ + Â′⊗B̂ − Â′⊗B̂′. Two certificates back the Tsirelson
//! bound: the exact operator identity Ĉ² = 4·I − [Â,Â′]⊗[B̂,B̂′], and the
//! spectral norm ‖Ĉ‖ ≤ 2√2 checked eigenvalue by eigenvalue. A symmetrized
//! variant covers operator quadruples that do not commute across sides.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, ComplexMatrix};

/// Unit-length tolerance for Bloch vectors and state vectors.
pub const UNIT_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A unit vector on the Bloch sphere, fixing a spin measurement direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    /// Validates unit Euclidean length within [`UNIT_TOL`].
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitVector { norm });
        }
        Ok(BlochVector { x, y, z })
    }

    /// In-plane direction (sin θ, 0, cos θ); the coplanar parameterization
    /// used by the optimizer and the surface's angle knob.
    pub fn from_polar(theta: f64) -> Self {
        let (s, co) = theta.sin_cos();
        BlochVector { x: s, y: 0.0, z: co }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

impl TryFrom<[f64; 3]> for BlochVector {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        BlochVector::new(v[0], v[1], v[2])
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(v: BlochVector) -> [f64; 3] {
        [v.x, v.y, v.z]
    }
}

/// The four measurement directions of a CHSH experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSettings {
    pub a: BlochVector,
    pub a_prime: BlochVector,
    pub b: BlochVector,
    pub b_prime: BlochVector,
}

impl MeasurementSettings {
    /// Coplanar settings from four in-plane angles (side A first).
    pub fn coplanar(alpha: f64, alpha_prime: f64, beta: f64, beta_prime: f64) -> Self {
        MeasurementSettings {
            a: BlochVector::from_polar(alpha),
            a_prime: BlochVector::from_polar(alpha_prime),
            b: BlochVector::from_polar(beta),
            b_prime: BlochVector::from_polar(beta_prime),
        }
    }
}

/// A unit-norm two-qubit state in the computational basis
/// (|00⟩, |01⟩, |10⟩, |11⟩).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct StateVector {
    amplitudes: [Complex64; 4],
}

impl StateVector {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitState { norm });
        }
        Ok(StateVector { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }
}

impl TryFrom<Vec<[f64; 2]>> for StateVector {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        let arr: [[f64; 2]; 4] = v.try_into().map_err(|v: Vec<[f64; 2]>| {
            Error::MalformedModel(format!("expected 4 amplitudes, got {}", v.len()))
        })?;
        StateVector::new(arr.map(|[re, im]| c(re, im)))
    }
}

impl From<StateVector> for Vec<[f64; 2]> {
    fn from(s: StateVector) -> Vec<[f64; 2]> {
        s.amplitudes.iter().map(|z| [z.re, z.im]).collect()
    }
}

/// The singlet (|01⟩ − |10⟩)/√2, whose correlations are E = −â·b̂.
pub fn singlet() -> StateVector {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::new([c(0.0, 0.0), c(r, 0.0), c(-r, 0.0), c(0.0, 0.0)])
        .expect("singlet is normalized")
}

/// Product state |00⟩.
pub fn product_state() -> StateVector {
    StateVector::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
        .expect("basis state is normalized")
}

/// cos θ·|00⟩ + sin θ·|11⟩.
pub fn partially_entangled(theta: f64) -> StateVector {
    let (s, co) = theta.sin_cos();
    StateVector::new([c(co, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)])
        .expect("cos²+sin² = 1")
}

/// Settings saturating the Tsirelson bound on the singlet, established by
/// grid search and frozen: â = −x̂, â′ = −ẑ, b̂/b̂′ at ±45° between them.
pub fn canonical_maximal_settings() -> MeasurementSettings {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    MeasurementSettings {
        a: BlochVector::new(-1.0, 0.0, 0.0).expect("unit"),
        a_prime: BlochVector::new(0.0, 0.0, -1.0).expect("unit"),
        b: BlochVector::new(r, 0.0, r).expect("unit"),
        b_prime: BlochVector::new(r, 0.0, -r).expect("unit"),
    }
}

/// A state plus settings: everything needed to produce a behavior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumStrategy {
    pub state: StateVector,
    pub settings: MeasurementSettings,
}

/// The spin observable n̂·σ⃗: Hermitian, traceless, involutory, spectrum ±1.
pub fn observable(n: &BlochVector) -> ComplexMatrix {
    ComplexMatrix::two_by_two([
        c(n.z(), 0.0),
        c(n.x(), -n.y()),
        c(n.x(), n.y()),
        c(-n.z(), 0.0),
    ])
}

/// Side operators lifted to the two-qubit space: Â⊗I and I⊗B̂.
fn lifted_operators(s: &MeasurementSettings) -> [ComplexMatrix; 4] {
    let i2 = ComplexMatrix::identity(2);
    [
        observable(&s.a).kron(&i2),
        observable(&s.a_prime).kron(&i2),
        i2.kron(&observable(&s.b)),
        i2.kron(&observable(&s.b_prime)),
    ]
}

/// The CHSH operator Ĉ = Â⊗B̂ + Â⊗B̂′ + Â′⊗B̂ − Â′⊗B̂′. The tensor-product
/// construction makes the side commutation [Â⊗I, I⊗B̂] = 0 automatic.
pub fn chat(settings: &MeasurementSettings) -> ComplexMatrix {
    let a = observable(&settings.a);
    let ap = observable(&settings.a_prime);
    let b = observable(&settings.b);
    let bp = observable(&settings.b_prime);
    a.kron(&b.add(&bp)).add(&ap.kron(&b.sub(&bp)))
}

/// Frobenius residual of the identity Ĉ² = 4·I − [Â,Â′]⊗[B̂,B̂′]. Exact in
/// operator arithmetic; anything beyond float rounding signals a bug.
pub fn chat_squared_identity(settings: &MeasurementSettings) -> f64 {
    let chat = chat(settings);
    let chat_sq = chat.mul(&chat);
    let comm_a = ComplexMatrix::commutator(
        &observable(&settings.a),
        &observable(&settings.a_prime),
    );
    let comm_b = ComplexMatrix::commutator(
        &observable(&settings.b),
        &observable(&settings.b_prime),
    );
    let rhs = ComplexMatrix::identity(4)
        .scale_re(4.0)
        .sub(&comm_a.kron(&comm_b));
    chat_sq.sub(&rhs).frobenius_norm()
}

/// Projector onto the ±1 eigenspace of n̂·σ⃗: (I ± n̂·σ⃗)/2.
fn projector(n: &BlochVector, outcome: crate::behavior::Sign) -> ComplexMatrix {
    ComplexMatrix::identity(2)
        .add(&observable(n).scale_re(outcome.value()))
        .scale_re(0.5)
}

/// The behavior of a strategy: P(A, B | a, b) = ⟨ψ| Π_A^â ⊗ Π_B^b̂ |ψ⟩.
///
/// The output is normalized and no-signaling, and its correlations equal the
/// observable expectations ⟨ψ|(â·σ⃗)⊗(b̂·σ⃗)|ψ⟩.
pub fn quantum_behavior(strategy: &QuantumStrategy) -> Behavior {
    let side_a = [&strategy.settings.a, &strategy.settings.a_prime];
    let side_b = [&strategy.settings.b, &strategy.settings.b_prime];
    let psi = strategy.state.amplitudes();
    Behavior::from_fn(|a, b, oa, ob| {
        let op = projector(side_a[a as usize], oa).kron(&projector(side_b[b as usize], ob));
        let p = op.expectation(psi);
        debug_assert!(p.im.abs() < 1e-12);
        // Rounding can leave probabilities a hair negative.
        p.re.max(0.0)
    })
    .expect("projective measurement probabilities are normalized")
}

/// Correlation ⟨ψ|(â·σ⃗)⊗(b̂·σ⃗)|ψ⟩ for one setting pair.
pub fn correlation(state: &StateVector, na: &BlochVector, nb: &BlochVector) -> f64 {
    observable(na)
        .kron(&observable(nb))
        .expectation(state.amplitudes())
        .re
}

/// Spectral-norm certificate for one strategy.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpectralReport {
    /// ‖Ĉ‖ — at most 2√2.
    pub chat_norm: f64,
    /// ⟨ψ|Ĉ|ψ⟩ — bounded by ‖Ĉ‖.
    pub chsh_expectation: f64,
    /// Frobenius residual of the Ĉ² identity.
    pub identity_residual: f64,
}

impl SpectralReport {
    pub fn for_strategy(strategy: &QuantumStrategy) -> Result<Self> {
        let op = chat(&strategy.settings);
        Ok(SpectralReport {
            chat_norm: spectral_norm(&op)?,
            chsh_expectation: op.expectation(strategy.state.amplitudes()).re,
            identity_residual: chat_squared_identity(&strategy.settings),
        })
    }
}

/// Symmetrized CHSH operator for four 4×4 Hermitian involutions that need not
/// commute across sides:
/// ½[(ÂB̂ + B̂Â) + (ÂB̂′ + B̂′Â) + (Â′B̂ + B̂Â′) − (Â′B̂′ + B̂′Â′)].
///
/// Hermitian by construction. On tensor-product (side-commuting) inputs it
/// reproduces [`chat`] exactly; on arbitrary inputs its spectral norm is
/// probed empirically against 2√2 in the test suite.
pub fn symmetrized_chat(operators: &[ComplexMatrix; 4]) -> Result<ComplexMatrix> {
    for op in operators {
        if op.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: op.dim(),
            });
        }
        let asym = op.hermiticity_error();
        if asym > 1e-9 {
            return Err(Error::NonHermitian(asym));
        }
        let invol = op.mul(op).sub(&ComplexMatrix::identity(4)).frobenius_norm();
        if invol > 1e-9 {
            return Err(Error::NotInvolutory(invol));
        }
    }
    let [a, ap, b, bp] = operators;
    let anti = |x: &ComplexMatrix, y: &ComplexMatrix| x.mul(y).add(&y.mul(x));
    Ok(anti(a, b)
        .add(&anti(a, bp))
        .add(&anti(ap, b))
        .sub(&anti(ap, bp))
        .scale_re(0.5))
}

/// Lifts a settings quadruple to the [Â, Â′, B̂, B̂′] operator list that
/// [`symmetrized_chat`] takes.
pub fn tensor_operator_quadruple(settings: &MeasurementSettings) -> [ComplexMatrix; 4] {
    lifted_operators(settings)
}

/// Uniformly random Bloch direction.
pub fn random_bloch_vector(rng: &mut impl rand::Rng) -> BlochVector {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    // Renormalize to absorb rounding before the unit check.
    let (x, y) = (r * phi.cos(), r * phi.sin());
    let norm = (x * x + y * y + z * z).sqrt();
    BlochVector::new(x / norm, y / norm, z / norm).expect("normalized")
}

/// Four independent random directions.
pub fn random_settings(rng: &mut impl rand::Rng) -> MeasurementSettings {
    MeasurementSettings {
        a: random_bloch_vector(rng),
        a_prime: random_bloch_vector(rng),
        b: random_bloch_vector(rng),
        b_prime: random_bloch_vector(rng),
    }
}
