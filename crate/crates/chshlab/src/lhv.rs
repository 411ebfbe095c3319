//! Local-hidden-variable models: finite ensembles of shared randomness with
//! deterministic local responses, exact and Monte Carlo evaluation, and the
//! classical CHSH bound certified by exhaustive enumeration.
//!
//! The hidden-variable space is finite and explicit — a weighted sum stands in
//! for the integral over λ. Nothing is lost: stochastic responses are
//! equivalent to enlarging λ, and the CHSH extremes sit at deterministic
//! points by convexity.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Sign};
use crate::error::{Error, Result};
use crate::rng::derived_rng;

/// Weight-sum tolerance for the hidden-variable density.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Deterministic responses of one hidden state: A(a, λ) and B(b, λ), each a
/// ±1 answer per local setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseTable {
    #[serde(rename = "A")]
    pub a: [Sign; 2],
    #[serde(rename = "B")]
    pub b: [Sign; 2],
}

#[derive(Serialize, Deserialize)]
struct LhvModelWire {
    weights: Vec<f64>,
    responses: Vec<ResponseTable>,
}

/// A finite local-hidden-variable ensemble: weights ρ(λ) over hidden states,
/// each with deterministic response tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LhvModelWire", into = "LhvModelWire")]
pub struct LhvModel {
    weights: Vec<f64>,
    responses: Vec<ResponseTable>,
}

impl TryFrom<LhvModelWire> for LhvModel {
    type Error = Error;

    fn try_from(w: LhvModelWire) -> Result<Self> {
        LhvModel::new(w.weights, w.responses)
    }
}

impl From<LhvModel> for LhvModelWire {
    fn from(m: LhvModel) -> LhvModelWire {
        LhvModelWire {
            weights: m.weights,
            responses: m.responses,
        }
    }
}

impl LhvModel {
    /// Validates weights (nonnegative, summing to 1 within
    /// [`WEIGHT_SUM_TOL`]) against the response list.
    pub fn new(weights: Vec<f64>, responses: Vec<ResponseTable>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::MalformedModel("empty hidden-variable ensemble".into()));
        }
        if weights.len() != responses.len() {
            return Err(Error::MalformedModel(format!(
                "{} weights for {} response tables",
                weights.len(),
                responses.len()
            )));
        }
        for &w in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::MalformedModel(format!("negative or non-finite weight {w}")));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSum { sum });
        }
        Ok(LhvModel { weights, responses })
    }

    /// Single hidden state carrying one deterministic strategy.
    pub fn deterministic(strategy: DeterministicStrategy) -> Self {
        LhvModel {
            weights: vec![1.0],
            responses: vec![strategy.response_table()],
        }
    }

    /// Uniform mixture over a list of strategies.
    pub fn uniform_mixture(strategies: &[DeterministicStrategy]) -> Result<Self> {
        let n = strategies.len();
        if n == 0 {
            return Err(Error::MalformedModel("empty strategy list".into()));
        }
        let w = 1.0 / n as f64;
        LhvModel::new(
            vec![w; n],
            strategies.iter().map(|s| s.response_table()).collect(),
        )
    }

    /// Random ensemble with up to `max_lambdas` hidden states; weights are
    /// normalized uniform draws and responses are fair ±1 coins.
    pub fn random(rng: &mut impl Rng, max_lambdas: usize) -> Self {
        let n = rng.gen_range(1..=max_lambdas.max(1));
        let mut weights: Vec<f64> = (0..n).map(|_| rng.gen_range(1e-3..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let responses = (0..n)
            .map(|_| ResponseTable {
                a: [random_sign(rng), random_sign(rng)],
                b: [random_sign(rng), random_sign(rng)],
            })
            .collect();
        LhvModel { weights, responses }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn responses(&self) -> &[ResponseTable] {
        &self.responses
    }

    /// The exact behavior P(A, B | a, b) = Σ_λ ρ(λ)·[A(a,λ)=A]·[B(b,λ)=B].
    ///
    /// The result is normalized, no-signaling, and has CHSH value at most 2
    /// (each λ contributes a deterministic strategy; convexity does the rest).
    pub fn to_behavior(&self) -> Behavior {
        let mut probs = [0.0; 16];
        for (w, r) in self.weights.iter().zip(&self.responses) {
            for a in 0..2u8 {
                for b in 0..2u8 {
                    let oa = r.a[a as usize];
                    let ob = r.b[b as usize];
                    let i = (((a as usize * 2) + b as usize) * 2 + oa.index()) * 2 + ob.index();
                    probs[i] += w;
                }
            }
        }
        Behavior::from_probs(probs).expect("weighted sum of strategies is normalized")
    }

    /// Empirical behavior from `n` independent draws of λ per setting pair.
    ///
    /// Each setting pair consumes its own counter-derived substream of `seed`,
    /// so the table is reproducible and independent of evaluation order.
    pub fn sample(&self, n: u64, seed: u64) -> Result<Behavior> {
        if n == 0 {
            return Err(Error::OutOfRange {
                name: "n",
                value: 0.0,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        let dist = WeightedIndex::new(&self.weights)
            .map_err(|e| Error::MalformedModel(format!("unsampleable weights: {e}")))?;
        let mut probs = [0.0; 16];
        for a in 0..2u8 {
            for b in 0..2u8 {
                let mut rng = derived_rng(seed, &[a as u64 * 2 + b as u64]);
                let mut counts = [[0u64; 2]; 2];
                for _ in 0..n {
                    let r = &self.responses[dist.sample(&mut rng)];
                    counts[r.a[a as usize].index()][r.b[b as usize].index()] += 1;
                }
                for oa in Sign::BOTH {
                    for ob in Sign::BOTH {
                        let i = (((a as usize * 2) + b as usize) * 2 + oa.index()) * 2 + ob.index();
                        probs[i] = counts[oa.index()][ob.index()] as f64 / n as f64;
                    }
                }
            }
        }
        Ok(Behavior::from_probs(probs).expect("empirical frequencies are normalized"))
    }
}

fn random_sign(rng: &mut impl Rng) -> Sign {
    Sign::from_bit(rng.gen())
}

/// One deterministic assignment of the four CHSH observables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub a: Sign,
    pub a_prime: Sign,
    pub b: Sign,
    pub b_prime: Sign,
}

impl DeterministicStrategy {
    /// All 16 strategies, in lexicographic (a, a′, b, b′) order with +1 first.
    pub fn all() -> [DeterministicStrategy; 16] {
        let mut out = [DeterministicStrategy {
            a: Sign::Plus,
            a_prime: Sign::Plus,
            b: Sign::Plus,
            b_prime: Sign::Plus,
        }; 16];
        let mut i = 0;
        for a in Sign::BOTH {
            for a_prime in Sign::BOTH {
                for b in Sign::BOTH {
                    for b_prime in Sign::BOTH {
                        out[i] = DeterministicStrategy { a, a_prime, b, b_prime };
                        i += 1;
                    }
                }
            }
        }
        out
    }

    /// C = A·B + A·B′ + A′·B − A′·B′ = A(B + B′) + A′(B − B′), always ±2:
    /// one parenthesis vanishes and the other is ±2.
    pub fn chsh(&self) -> i32 {
        let (a, ap, b, bp) = (
            self.a.unit(),
            self.a_prime.unit(),
            self.b.unit(),
            self.b_prime.unit(),
        );
        a * b + a * bp + ap * b - ap * bp
    }

    /// The response tables of the single-λ model realizing this strategy
    /// under the default role labels (a ↦ setting 0, a′ ↦ setting 1).
    pub fn response_table(&self) -> ResponseTable {
        ResponseTable {
            a: [self.a, self.a_prime],
            b: [self.b, self.b_prime],
        }
    }
}

/// Result of enumerating C over all 16 deterministic strategies.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalMax {
    /// The maximum of |C|: exactly 2.
    pub value: i32,
    /// Strategies with C = +2.
    pub attaining_positive: Vec<DeterministicStrategy>,
    /// Strategies with C = −2.
    pub attaining_negative: Vec<DeterministicStrategy>,
}

/// Enumerates all 16 deterministic strategies and returns the exact classical
/// maximum of |C| together with every attaining strategy. By convexity this
/// is also the maximum over all LHV models.
pub fn classical_max() -> ClassicalMax {
    let mut attaining_positive = Vec::new();
    let mut attaining_negative = Vec::new();
    let mut value = 0;
    for s in DeterministicStrategy::all() {
        let c = s.chsh();
        value = value.max(c.abs());
        if c > 0 {
            attaining_positive.push(s);
        } else {
            attaining_negative.push(s);
        }
    }
    ClassicalMax {
        value,
        attaining_positive,
        attaining_negative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::CLASSICAL_BOUND;
    use proptest::prelude::*;

    fn two_lambda_zero_model() -> LhvModel {
        // Equal mixture of (A=A′=B=B′=+1) and (A=A′=+1, B=B′=−1).
        LhvModel::new(
            vec![0.5, 0.5],
            vec![
                ResponseTable {
                    a: [Sign::Plus, Sign::Plus],
                    b: [Sign::Plus, Sign::Plus],
                },
                ResponseTable {
                    a: [Sign::Plus, Sign::Plus],
                    b: [Sign::Minus, Sign::Minus],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_lambda_gives_deterministic_behavior() {
        let model = LhvModel::deterministic(DeterministicStrategy {
            a: Sign::Plus,
            a_prime: Sign::Plus,
            b: Sign::Plus,
            b_prime: Sign::Plus,
        });
        let behavior = model.to_behavior();
        assert_eq!(
            behavior,
            Behavior::deterministic([Sign::Plus; 2], [Sign::Plus; 2])
        );
        assert_eq!(behavior.correlations().chsh_value(), 2.0);
    }

    #[test]
    fn two_lambda_mixture_cancels_correlations() {
        let behavior = two_lambda_zero_model().to_behavior();
        // Oracle: mix the two deterministic tables by hand.
        let d1 = Behavior::deterministic([Sign::Plus; 2], [Sign::Plus; 2]);
        let d2 = Behavior::deterministic([Sign::Plus; 2], [Sign::Minus; 2]);
        let expected = Behavior::mix(0.5, &d1, &d2).unwrap();
        assert_eq!(behavior, expected);
        let corr = behavior.correlations();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(corr.e(a, b), 0.0);
            }
        }
        assert_eq!(corr.chsh_value(), 0.0);
    }

    #[test]
    fn uniform_mixture_over_all_strategies_is_white_noise() {
        let model = LhvModel::uniform_mixture(&DeterministicStrategy::all()).unwrap();
        let behavior = model.to_behavior();
        for &p in behavior.probs() {
            assert!((p - 0.25).abs() < 1e-15);
        }
        let corr = behavior.correlations();
        for a in 0..2 {
            for b in 0..2 {
                assert!(corr.e(a, b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn weight_sum_violation_is_rejected() {
        let r = ResponseTable {
            a: [Sign::Plus, Sign::Plus],
            b: [Sign::Plus, Sign::Plus],
        };
        assert!(matches!(
            LhvModel::new(vec![0.6, 0.6], vec![r, r]),
            Err(Error::WeightSum { .. })
        ));
        assert!(matches!(
            LhvModel::new(vec![-0.5, 1.5], vec![r, r]),
            Err(Error::MalformedModel(_))
        ));
    }

    #[test]
    fn sampling_single_lambda_is_exact() {
        let model = LhvModel::deterministic(DeterministicStrategy {
            a: Sign::Plus,
            a_prime: Sign::Minus,
            b: Sign::Minus,
            b_prime: Sign::Plus,
        });
        for seed in [0, 1, 42] {
            let empirical = model.sample(10, seed).unwrap();
            assert_eq!(empirical, model.to_behavior());
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let model = two_lambda_zero_model();
        let first = model.sample(20_000, 7).unwrap();
        let second = model.sample(20_000, 7).unwrap();
        assert_eq!(first, second);
        let other_seed = model.sample(20_000, 8).unwrap();
        assert_ne!(first, other_seed);
    }

    #[test]
    fn sampling_rejects_zero_draws() {
        let model = two_lambda_zero_model();
        assert!(matches!(
            model.sample(0, 1),
            Err(Error::OutOfRange { name: "n", .. })
        ));
    }

    #[test]
    fn million_draw_sample_concentrates() {
        let model = two_lambda_zero_model();
        let empirical = model.sample(1_000_000, 42).unwrap();
        let corr = empirical.correlations();
        for a in 0..2 {
            for b in 0..2 {
                assert!(
                    corr.e(a, b).abs() < 0.005,
                    "E({a},{b}) = {} drifted past the 5σ band",
                    corr.e(a, b)
                );
            }
        }
    }

    #[test]
    fn monte_carlo_error_shrinks_at_root_n() {
        let model = LhvModel::new(
            vec![0.3, 0.45, 0.25],
            vec![
                ResponseTable {
                    a: [Sign::Plus, Sign::Minus],
                    b: [Sign::Plus, Sign::Plus],
                },
                ResponseTable {
                    a: [Sign::Minus, Sign::Plus],
                    b: [Sign::Minus, Sign::Plus],
                },
                ResponseTable {
                    a: [Sign::Plus, Sign::Plus],
                    b: [Sign::Minus, Sign::Minus],
                },
            ],
        )
        .unwrap();
        let exact = model.to_behavior().correlations();
        for n in [1_000u64, 100_000] {
            let tol = 5.0 / (n as f64).sqrt();
            let empirical = model.sample(n, 2024).unwrap().correlations();
            for a in 0..2 {
                for b in 0..2 {
                    let err = (empirical.e(a, b) - exact.e(a, b)).abs();
                    assert!(err < tol, "n={n}: |ΔE({a},{b})| = {err} > {tol}");
                }
            }
        }
    }

    #[test]
    fn chsh_of_strategy_examples() {
        let s = |a, ap, b, bp| DeterministicStrategy {
            a,
            a_prime: ap,
            b,
            b_prime: bp,
        };
        use Sign::{Minus as M, Plus as P};
        assert_eq!(s(P, P, P, P).chsh(), 2);
        // A(B+B′) + A′(B−B′) = 1·2 + (−1)·0 = 2.
        assert_eq!(s(P, M, P, P).chsh(), 2);
        assert_eq!(s(M, M, P, P).chsh(), -2);
    }

    #[test]
    fn every_strategy_lands_on_plus_or_minus_two() {
        for s in DeterministicStrategy::all() {
            let c = s.chsh();
            assert!(c == 2 || c == -2, "strategy {s:?} gave C = {c}");
        }
    }

    #[test]
    fn classical_max_enumerates_both_signs() {
        let result = classical_max();
        assert_eq!(result.value, 2);
        assert_eq!(result.attaining_positive.len(), 8);
        assert_eq!(result.attaining_negative.len(), 8);
        // Brute-force oracle: recompute C for every claimed maximizer.
        for s in &result.attaining_positive {
            let (a, ap, b, bp) = (
                s.a.unit(),
                s.a_prime.unit(),
                s.b.unit(),
                s.b_prime.unit(),
            );
            assert_eq!(a * b + a * bp + ap * b - ap * bp, 2);
        }
        for s in &result.attaining_negative {
            let (a, ap, b, bp) = (
                s.a.unit(),
                s.a_prime.unit(),
                s.b.unit(),
                s.b_prime.unit(),
            );
            assert_eq!(a * b + a * bp + ap * b - ap * bp, -2);
        }
        let all_plus = DeterministicStrategy {
            a: Sign::Plus,
            a_prime: Sign::Plus,
            b: Sign::Plus,
            b_prime: Sign::Plus,
        };
        assert!(result.attaining_positive.contains(&all_plus));
    }

    #[test]
    fn lhv_model_json_round_trip() {
        let model = two_lambda_zero_model();
        let json = serde_json::to_string(&model).unwrap();
        assert!(json.contains("\"weights\""));
        assert!(json.contains("\"responses\""));
        assert!(json.contains("\"A\""));
        assert!(json.contains("\"B\""));
        let back: LhvModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, model);
        // Fixture in the documented wire format.
        let fixture = r#"{"weights":[0.5,0.5],"responses":[{"A":[1,1],"B":[1,1]},{"A":[1,1],"B":[-1,-1]}]}"#;
        let parsed: LhvModel = serde_json::from_str(fixture).unwrap();
        assert_eq!(parsed, model);
        // Response entries other than ±1 are rejected.
        let bad = r#"{"weights":[1.0],"responses":[{"A":[1,0],"B":[1,1]}]}"#;
        assert!(serde_json::from_str::<LhvModel>(bad).is_err());
    }

    prop_compose! {
        fn arb_lhv_model()(
            seed in any::<u64>(),
        ) -> LhvModel {
            let mut rng = crate::rng::rng_from_seed(seed);
            LhvModel::random(&mut rng, 8)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn lhv_behaviors_are_no_signaling_and_classical(model in arb_lhv_model()) {
            let behavior = model.to_behavior();
            prop_assert!(behavior.no_signaling_check().passed);
            let value = behavior.correlations().chsh_value();
            prop_assert!(value <= CLASSICAL_BOUND + 1e-12, "CHSH {value} above 2");
        }
    }
}
