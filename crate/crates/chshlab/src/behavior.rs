//! Behaviors — joint outcome distributions P(A, B | a, b) of the bipartite
//! two-setting, two-outcome scenario — together with correlation tables, the
//! CHSH combination, regime classification, no-signaling checks, and convex
//! mixing.
//!
//! The behavior is the universal currency here: local hidden-variable models,
//! two-qubit strategies, and nonlocal boxes all reduce to one before any CHSH
//! arithmetic happens. Outcomes are ±1 throughout; protocols that prefer
//! {0, 1} bits map through `Sign::from_bit` (A = 1 − 2α) at their boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CHSH bound attainable by local hidden-variable models.
pub const CLASSICAL_BOUND: f64 = 2.0;
/// CHSH bound attainable by quantum strategies (Tsirelson), 2√2.
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;
/// Algebraic maximum of the CHSH combination.
pub const MAXIMAL_CHSH: f64 = 4.0;

/// Slack accepted on probabilities and weights produced by in-crate arithmetic.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Slack accepted when validating externally supplied distributions.
pub const VALIDATION_TOL: f64 = 1e-9;
/// Marginal-consistency tolerance of [`Behavior::no_signaling_check`].
pub const NO_SIGNALING_TOL: f64 = 1e-9;
/// Values within this distance of a regime threshold are assigned the weaker
/// regime, so bound-saturating models report as compatible with their class.
pub const CLASSIFY_TIE_TOL: f64 = 1e-9;

/// A dichotomic ±1 value: measurement outcome or deterministic response.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Both values, in the index order used by [`Behavior`] tables: +1 first.
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn unit(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// Bit encoding with α = (1 − A)/2: `false` ↦ +1, `true` ↦ −1.
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn to_bit(self) -> bool {
        self == Sign::Minus
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.unit() as i8
    }
}

impl TryFrom<i8> for Sign {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::InvalidSign(other)),
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:+}", self.unit())
    }
}

/// Which setting index plays each CHSH role. The combination below is
/// E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′) evaluated through this assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleLabels {
    pub a: u8,
    pub a_prime: u8,
    pub b: u8,
    pub b_prime: u8,
}

impl Default for RoleLabels {
    fn default() -> Self {
        RoleLabels {
            a: 0,
            a_prime: 1,
            b: 0,
            b_prime: 1,
        }
    }
}

impl RoleLabels {
    fn validate(&self) -> Result<()> {
        let ok = |v: u8| v <= 1;
        if !(ok(self.a) && ok(self.a_prime) && ok(self.b) && ok(self.b_prime)) {
            return Err(Error::InvalidLabels(
                "setting indices must be 0 or 1".into(),
            ));
        }
        if self.a == self.a_prime || self.b == self.b_prime {
            return Err(Error::InvalidLabels(
                "each side must assign distinct settings to its two roles".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct BehaviorWire {
    probs: Vec<f64>,
    #[serde(default)]
    labels: Option<RoleLabels>,
}

/// The joint conditional distribution P(A, B | a, b), stored as a dense table
/// of 16 probabilities in lexicographic order (a, b, A, B) with outcomes
/// ordered (+1, −1).
///
/// Instances are validated on construction (entries in [0, 1], each setting
/// pair summing to 1) and immutable afterwards, so every downstream operation
/// may assume a normalized table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BehaviorWire", into = "BehaviorWire")]
pub struct Behavior {
    probs: [f64; 16],
    labels: RoleLabels,
}

impl TryFrom<BehaviorWire> for Behavior {
    type Error = Error;

    fn try_from(w: BehaviorWire) -> Result<Self> {
        let probs: [f64; 16] = w
            .probs
            .try_into()
            .map_err(|v: Vec<f64>| Error::MalformedModel(format!("expected 16 probabilities, got {}", v.len())))?;
        Behavior::with_labels(probs, w.labels.unwrap_or_default())
    }
}

impl From<Behavior> for BehaviorWire {
    fn from(b: Behavior) -> BehaviorWire {
        BehaviorWire {
            probs: b.probs.to_vec(),
            labels: Some(b.labels),
        }
    }
}

fn idx(a: u8, b: u8, oa: Sign, ob: Sign) -> usize {
    (((a as usize * 2) + b as usize) * 2 + oa.index()) * 2 + ob.index()
}

impl Behavior {
    /// Builds a behavior with the default role labels, validating entry range
    /// and per-setting normalization.
    pub fn from_probs(probs: [f64; 16]) -> Result<Self> {
        Self::with_labels(probs, RoleLabels::default())
    }

    /// Builds a behavior with explicit role labels.
    pub fn with_labels(probs: [f64; 16], labels: RoleLabels) -> Result<Self> {
        labels.validate()?;
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < -CONSTRUCTION_TOL || p > 1.0 + CONSTRUCTION_TOL {
                return Err(Error::ProbabilityRange { index: i, value: p });
            }
        }
        for a in 0..2u8 {
            for b in 0..2u8 {
                let sum: f64 = Sign::BOTH
                    .iter()
                    .flat_map(|&oa| Sign::BOTH.iter().map(move |&ob| probs[idx(a, b, oa, ob)]))
                    .sum();
                if (sum - 1.0).abs() > VALIDATION_TOL {
                    return Err(Error::Normalization {
                        setting_a: a,
                        setting_b: b,
                        sum,
                    });
                }
            }
        }
        Ok(Behavior { probs, labels })
    }

    /// Builds the table cell-by-cell from a closure over (a, b, A, B).
    pub fn from_fn(f: impl Fn(u8, u8, Sign, Sign) -> f64) -> Result<Self> {
        let mut probs = [0.0; 16];
        for a in 0..2u8 {
            for b in 0..2u8 {
                for oa in Sign::BOTH {
                    for ob in Sign::BOTH {
                        probs[idx(a, b, oa, ob)] = f(a, b, oa, ob);
                    }
                }
            }
        }
        Self::from_probs(probs)
    }

    /// The behavior of uncorrelated fair coins: every cell is 1/4.
    pub fn uniform() -> Self {
        Behavior {
            probs: [0.25; 16],
            labels: RoleLabels::default(),
        }
    }

    /// Deterministic local box: side A answers `responses_a[a]`, side B
    /// answers `responses_b[b]`, with probability 1.
    pub fn deterministic(responses_a: [Sign; 2], responses_b: [Sign; 2]) -> Self {
        let mut probs = [0.0; 16];
        for a in 0..2u8 {
            for b in 0..2u8 {
                probs[idx(a, b, responses_a[a as usize], responses_b[b as usize])] = 1.0;
            }
        }
        Behavior {
            probs,
            labels: RoleLabels::default(),
        }
    }

    pub fn prob(&self, a: u8, b: u8, oa: Sign, ob: Sign) -> f64 {
        self.probs[idx(a, b, oa, ob)]
    }

    pub fn probs(&self) -> &[f64; 16] {
        &self.probs
    }

    pub fn labels(&self) -> RoleLabels {
        self.labels
    }

    /// Marginal probability of side A's outcome given both settings:
    /// Σ_B P(outcome, B | a, b).
    pub fn marginal_a(&self, a: u8, b: u8, outcome: Sign) -> f64 {
        Sign::BOTH
            .iter()
            .map(|&ob| self.prob(a, b, outcome, ob))
            .sum()
    }

    /// Marginal probability of side B's outcome given both settings.
    pub fn marginal_b(&self, a: u8, b: u8, outcome: Sign) -> f64 {
        Sign::BOTH
            .iter()
            .map(|&oa| self.prob(a, b, oa, outcome))
            .sum()
    }

    /// Expectation values E(a, b) = Σ A·B·P(A, B | a, b) for the four setting
    /// pairs. Normalization is guaranteed by construction, so this cannot
    /// fail; see [`CorrelationTable`].
    pub fn correlations(&self) -> CorrelationTable {
        let mut e = [[0.0; 2]; 2];
        for a in 0..2u8 {
            for b in 0..2u8 {
                let mut sum = 0.0;
                for oa in Sign::BOTH {
                    for ob in Sign::BOTH {
                        sum += oa.value() * ob.value() * self.prob(a, b, oa, ob);
                    }
                }
                e[a as usize][b as usize] = sum;
            }
        }
        CorrelationTable {
            e,
            labels: self.labels,
        }
    }

    /// Checks that each side's outcome marginals are independent of the other
    /// side's setting, within [`NO_SIGNALING_TOL`].
    pub fn no_signaling_check(&self) -> NoSignalingReport {
        self.no_signaling_check_with(NO_SIGNALING_TOL)
    }

    /// As [`Self::no_signaling_check`] with an explicit tolerance.
    pub fn no_signaling_check_with(&self, tolerance: f64) -> NoSignalingReport {
        let mut witness = None;
        let mut max_discrepancy: f64 = 0.0;
        for setting in 0..2u8 {
            for outcome in Sign::BOTH {
                let lhs = self.marginal_a(setting, 0, outcome);
                let rhs = self.marginal_a(setting, 1, outcome);
                let d = (lhs - rhs).abs();
                max_discrepancy = max_discrepancy.max(d);
                if d > tolerance && witness.is_none() {
                    witness = Some(SignalingWitness {
                        side: Side::A,
                        setting,
                        outcome,
                        marginal_first: lhs,
                        marginal_second: rhs,
                        discrepancy: d,
                    });
                }
            }
        }
        for setting in 0..2u8 {
            for outcome in Sign::BOTH {
                let lhs = self.marginal_b(0, setting, outcome);
                let rhs = self.marginal_b(1, setting, outcome);
                let d = (lhs - rhs).abs();
                max_discrepancy = max_discrepancy.max(d);
                if d > tolerance && witness.is_none() {
                    witness = Some(SignalingWitness {
                        side: Side::B,
                        setting,
                        outcome,
                        marginal_first: lhs,
                        marginal_second: rhs,
                        discrepancy: d,
                    });
                }
            }
        }
        NoSignalingReport {
            passed: witness.is_none(),
            max_discrepancy,
            tolerance,
            witness,
        }
    }

    /// Entrywise convex combination q·b1 + (1−q)·b2. The signed CHSH
    /// combination is affine in q, which the two-knob surface relies on.
    pub fn mix(q: f64, b1: &Behavior, b2: &Behavior) -> Result<Behavior> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::OutOfRange {
                name: "q",
                value: q,
                min: 0.0,
                max: 1.0,
            });
        }
        if b1.labels != b2.labels {
            return Err(Error::LabelMismatch);
        }
        let mut probs = [0.0; 16];
        for (i, p) in probs.iter_mut().enumerate() {
            *p = q * b1.probs[i] + (1.0 - q) * b2.probs[i];
        }
        Ok(Behavior {
            probs,
            labels: b1.labels,
        })
    }
}

/// The side of the experiment a marginal belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

/// The first marginal found to depend on the remote setting.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SignalingWitness {
    pub side: Side,
    /// The local setting whose outcome marginal shifts.
    pub setting: u8,
    pub outcome: Sign,
    /// Marginal when the remote setting is 0.
    pub marginal_first: f64,
    /// Marginal when the remote setting is 1.
    pub marginal_second: f64,
    pub discrepancy: f64,
}

/// Outcome of a marginal-consistency scan.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NoSignalingReport {
    pub passed: bool,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub witness: Option<SignalingWitness>,
}

/// The four expectation values E(a, b) entering the CHSH combination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    e: [[f64; 2]; 2],
    labels: RoleLabels,
}

impl CorrelationTable {
    pub fn new(e: [[f64; 2]; 2], labels: RoleLabels) -> Result<Self> {
        labels.validate()?;
        for a in 0..2u8 {
            for b in 0..2u8 {
                let v = e[a as usize][b as usize];
                if !v.is_finite() || v.abs() > 1.0 + VALIDATION_TOL {
                    return Err(Error::CorrelationRange {
                        setting_a: a,
                        setting_b: b,
                        value: v,
                    });
                }
            }
        }
        Ok(CorrelationTable { e, labels })
    }

    pub fn e(&self, a: u8, b: u8) -> f64 {
        self.e[a as usize][b as usize]
    }

    pub fn labels(&self) -> RoleLabels {
        self.labels
    }

    /// E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′), before taking the absolute
    /// value. Linear in the underlying behavior.
    pub fn signed_combination(&self) -> f64 {
        let l = self.labels;
        self.e(l.a, l.b) + self.e(l.a, l.b_prime) + self.e(l.a_prime, l.b)
            - self.e(l.a_prime, l.b_prime)
    }

    /// |E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′)| ∈ [0, 4].
    pub fn chsh_value(&self) -> f64 {
        self.signed_combination().abs()
    }
}

/// Regimes of the CHSH value against the thresholds 2, 2√2, and 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    ClassicalCompatible,
    QuantumCompatible,
    SuperQuantum,
    Maximal,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::ClassicalCompatible => "classical-compatible",
            Regime::QuantumCompatible => "quantum-compatible",
            Regime::SuperQuantum => "super-quantum",
            Regime::Maximal => "maximal",
        };
        f.write_str(s)
    }
}

/// Signed distances value − threshold for the three regime thresholds.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Margins {
    pub classical: f64,
    pub tsirelson: f64,
    pub maximal: f64,
}

/// A CHSH value with its regime and threshold margins.
///
/// `value` is clamped to 4 when classification accepts a float overshoot in
/// (4, 4 + tolerance], keeping the stored value inside the algebraic range.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ChshReport {
    pub value: f64,
    pub regime: Regime,
    pub margins: Margins,
}

/// Classifies a CHSH value against the thresholds 2, 2√2, 4. Ties within
/// [`CLASSIFY_TIE_TOL`] of 2 or 2√2 resolve to the weaker regime; values
/// within the tolerance of 4 report as maximal.
pub fn classify(value: f64) -> Result<ChshReport> {
    if !value.is_finite() || value < -CLASSIFY_TIE_TOL || value > MAXIMAL_CHSH + CLASSIFY_TIE_TOL {
        return Err(Error::ImpossibleValue(value));
    }
    let value = value.clamp(0.0, MAXIMAL_CHSH);
    let regime = if value <= CLASSICAL_BOUND + CLASSIFY_TIE_TOL {
        Regime::ClassicalCompatible
    } else if value <= TSIRELSON_BOUND + CLASSIFY_TIE_TOL {
        Regime::QuantumCompatible
    } else if value < MAXIMAL_CHSH - CLASSIFY_TIE_TOL {
        Regime::SuperQuantum
    } else {
        Regime::Maximal
    };
    Ok(ChshReport {
        value,
        regime,
        margins: Margins {
            classical: value - CLASSICAL_BOUND,
            tsirelson: value - TSIRELSON_BOUND,
            maximal: value - MAXIMAL_CHSH,
        },
    })
}

/// Full pipeline: correlations, CHSH value, classification.
pub fn report_for(behavior: &Behavior) -> Result<ChshReport> {
    classify(behavior.correlations().chsh_value())
}
