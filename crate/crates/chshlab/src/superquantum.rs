//! Super-quantum correlations: the Popescu–Rohrlich box that saturates the
//! algebraic CHSH maximum of 4, the noisy-box family reaching every strength
//! X ∈ [0, 4] exactly, and the ℓ^p-norm toy model whose bound 2·2^{1/p}
//! interpolates between 4 (p = 1), 2√2 (p = 2), and 2 (p = ∞).

use crate::behavior::{Behavior, Sign};
use crate::error::{Error, Result};

/// The Popescu–Rohrlich box: perfect correlation on the setting pairs (0,0),
/// (0,1), (1,0), perfect anticorrelation on (1,1), uniform ±1 marginals.
///
/// In bit encoding this is the XOR-of-outcomes = AND-of-settings rule with a
/// fair coin on each side; it saturates the CHSH combination at 4 while
/// remaining no-signaling.
pub fn pr_box() -> Behavior {
    Behavior::from_fn(|a, b, oa, ob| {
        let correlated = !(a == 1 && b == 1);
        let same = oa == ob;
        if same == correlated {
            0.5
        } else {
            0.0
        }
    })
    .expect("the PR table is normalized")
}

/// A behavior from the isotropic noisy-box family, tuned to CHSH strength X.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyPrBox {
    x: f64,
    behavior: Behavior,
}

impl NoisyPrBox {
    /// Target CHSH strength.
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn behavior(&self) -> &Behavior {
        &self.behavior
    }

    pub fn into_behavior(self) -> Behavior {
        self.behavior
    }
}

/// Mixes the PR box with uniform noise at weight X/4, producing a
/// no-signaling behavior whose CHSH value is X (the combination is linear in
/// the mixing weight, so every strength in [0, 4] is hit exactly).
pub fn noisy_box(x: f64) -> Result<NoisyPrBox> {
    if !(0.0..=4.0).contains(&x) {
        return Err(Error::OutOfRange {
            name: "X",
            value: x,
            min: 0.0,
            max: 4.0,
        });
    }
    let behavior = Behavior::mix(x / 4.0, &pr_box(), &Behavior::uniform())?;
    Ok(NoisyPrBox { x, behavior })
}

/// Exponent of an ℓ^p space: a finite p ≥ 1 or the max-norm limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

/// A 2D coefficient space over the basis (e₁, e₂) equipped with the ℓ^p norm
/// (|α|^p + |β|^p)^{1/p}.
///
/// Exponents below 1 are rejected outright: the triangle inequality fails and
/// the functional is not a norm. Absolute values on the coefficients keep the
/// functional well-defined for negative components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PNormSpace {
    p: PExponent,
}

impl PNormSpace {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        Ok(PNormSpace {
            p: PExponent::Finite(p),
        })
    }

    /// The ℓ^∞ (max-norm) space, kept symbolic rather than as a large float.
    pub fn infinity() -> Self {
        PNormSpace {
            p: PExponent::Infinity,
        }
    }

    pub fn exponent(&self) -> PExponent {
        self.p
    }

    /// ‖α e₁ + β e₂‖_p.
    pub fn norm(&self, v: PVector) -> f64 {
        let (a, b) = (v.alpha.abs(), v.beta.abs());
        match self.p {
            PExponent::Infinity => a.max(b),
            PExponent::Finite(p) if p == 1.0 => a + b,
            PExponent::Finite(p) if p == 2.0 => a.hypot(b),
            PExponent::Finite(p) => (a.powf(p) + b.powf(p)).powf(1.0 / p),
        }
    }
}

/// Coefficients of a vector over the basis (e₁, e₂).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PVector {
    pub alpha: f64,
    pub beta: f64,
}

impl PVector {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::MalformedModel(format!(
                "non-finite coefficients ({alpha}, {beta})"
            )));
        }
        Ok(PVector { alpha, beta })
    }

    fn plus(self, other: PVector) -> PVector {
        PVector {
            alpha: self.alpha + other.alpha,
            beta: self.beta + other.beta,
        }
    }

    fn minus(self, other: PVector) -> PVector {
        PVector {
            alpha: self.alpha - other.alpha,
            beta: self.beta - other.beta,
        }
    }

    /// Coefficients of the same vector over a basis rotated by `angle`.
    pub fn rotated(self, angle: f64) -> PVector {
        let (s, c) = angle.sin_cos();
        PVector {
            alpha: c * self.alpha + s * self.beta,
            beta: -s * self.alpha + c * self.beta,
        }
    }
}

/// ‖α e₁ + β e₂‖_p; free-function spelling of [`PNormSpace::norm`].
pub fn pnorm(space: &PNormSpace, v: PVector) -> f64 {
    space.norm(v)
}

/// The CHSH bound of the ℓ^p model: the sum-of-norms chain
/// ‖B + B′‖ + ‖B − B′‖ evaluated on the basis vectors B = e₁, B′ = e₂,
/// where each term is 2^{1/p}. Equals 2^{1 + 1/p}, decreasing from 4 at
/// p = 1 through 2√2 at p = 2 toward 2 as p → ∞.
pub fn pnorm_chsh_bound(space: &PNormSpace) -> f64 {
    let b = PVector { alpha: 1.0, beta: 0.0 };
    let b_prime = PVector { alpha: 0.0, beta: 1.0 };
    space.norm(b.plus(b_prime)) + space.norm(b.minus(b_prime))
}

/// Comparison of the phase-washed norm rule ‖B ± B′‖ = ‖B‖ + ‖B′‖ against the
/// ℓ^p chains.
#[derive(Clone, Copy, Debug)]
pub struct DegenerateNormReport {
    /// Chain bound under the degenerate rule: ‖B‖ + ‖B′‖ twice = 4.
    pub degenerate_bound: f64,
    /// Chain bound in ℓ^1 on the same basis configuration: also 4.
    pub p1_bound: f64,
    /// degenerate_bound − p1_bound; zero within 1e−12.
    pub difference: f64,
    /// Chain bound in ℓ^2 on unit orthogonal vectors: 2√2, strictly below.
    pub p2_bound: f64,
    /// The ℓ^1 chain recomputed in a 45°-rotated basis: drops to 2√2,
    /// exposing the basis dependence of the ℓ^1 model.
    pub rotated_p1_bound: f64,
    /// The degenerate rule in the rotated basis: still 4. The rule consumes
    /// only the (rotation-invariant) norms of B and B′, never coordinates.
    pub rotated_degenerate_bound: f64,
}

/// Checks that substituting the degenerate norm rule into the sum-of-norms
/// chain yields the bound 4, coinciding with the ℓ^1 bound on the basis
/// configuration, and documents how the ℓ^1 value moves under a 45° basis
/// rotation while the degenerate rule does not.
pub fn hbar_infinity_norm_check() -> DegenerateNormReport {
    let b = PVector { alpha: 1.0, beta: 0.0 };
    let b_prime = PVector { alpha: 0.0, beta: 1.0 };
    let l2 = PNormSpace::new(2.0).expect("2 is a valid exponent");
    let l1 = PNormSpace::new(1.0).expect("1 is a valid exponent");

    // Degenerate rule: each of ‖B ± B′‖ collapses to ‖B‖ + ‖B′‖ with the
    // vectors' own (ℓ^2, unit) norms.
    let degenerate_term = l2.norm(b) + l2.norm(b_prime);
    let degenerate_bound = 2.0 * degenerate_term;

    let p1_bound = pnorm_chsh_bound(&l1);
    let p2_bound = pnorm_chsh_bound(&l2);

    let angle = std::f64::consts::FRAC_PI_4;
    let (rb, rbp) = (b.rotated(angle), b_prime.rotated(angle));
    let rotated_p1_bound = l1.norm(rb.plus(rbp)) + l1.norm(rb.minus(rbp));
    let rotated_degenerate_bound = 2.0 * (l2.norm(rb) + l2.norm(rbp));

    DegenerateNormReport {
        degenerate_bound,
        p1_bound,
        difference: degenerate_bound - p1_bound,
        p2_bound,
        rotated_p1_bound,
        rotated_degenerate_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::TSIRELSON_BOUND;
    use proptest::prelude::*;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    #[test]
    fn pr_box_saturates_and_does_not_signal() {
        let pr = pr_box();
        assert_eq!(pr.correlations().chsh_value(), 4.0);
        assert!(pr.no_signaling_check().passed);
        for a in 0..2u8 {
            for b in 0..2u8 {
                for o in Sign::BOTH {
                    assert_eq!(pr.marginal_a(a, b, o), 0.5);
                    assert_eq!(pr.marginal_b(a, b, o), 0.5);
                }
            }
        }
    }

    #[test]
    fn noisy_box_endpoints() {
        assert_eq!(noisy_box(4.0).unwrap().behavior(), &pr_box());
        assert_eq!(noisy_box(0.0).unwrap().behavior(), &Behavior::uniform());
        assert!(matches!(
            noisy_box(4.5),
            Err(Error::OutOfRange { name: "X", .. })
        ));
        assert!(matches!(
            noisy_box(-0.1),
            Err(Error::OutOfRange { name: "X", .. })
        ));
    }

    #[test]
    fn noisy_box_hits_the_communication_threshold_exactly() {
        let x_cc = crate::commcomplexity::x_cc();
        assert_close(x_cc, 3.2659863237, 1e-9);
        let boxed = noisy_box(x_cc).unwrap();
        // Oracle: brute-force correlations from the mixed table.
        let mut signed = 0.0;
        for (a, b, sign) in [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)] {
            let mut e = 0.0;
            for oa in Sign::BOTH {
                for ob in Sign::BOTH {
                    e += oa.value() * ob.value() * boxed.behavior().prob(a, b, oa, ob);
                }
            }
            signed += sign * e;
        }
        assert_close(signed, x_cc, 1e-12);
        assert_close(
            boxed.behavior().correlations().chsh_value(),
            x_cc,
            1e-12,
        );
    }

    #[test]
    fn noisy_box_sweep_is_exact_and_no_signaling() {
        for k in 0..=400 {
            let x = k as f64 * 0.01;
            let boxed = noisy_box(x).unwrap();
            assert_close(boxed.behavior().correlations().chsh_value(), x, 1e-12);
            assert!(boxed.behavior().no_signaling_check().passed);
        }
    }

    #[test]
    fn pnorm_examples() {
        let l2 = PNormSpace::new(2.0).unwrap();
        assert_close(l2.norm(PVector { alpha: 3.0, beta: 4.0 }), 5.0, 1e-15);
        let l1 = PNormSpace::new(1.0).unwrap();
        assert_eq!(l1.norm(PVector { alpha: 1.0, beta: 1.0 }), 2.0);
        let linf = PNormSpace::infinity();
        assert_eq!(linf.norm(PVector { alpha: 1.0, beta: 1.0 }), 1.0);
        assert_eq!(linf.norm(PVector { alpha: -3.0, beta: 2.0 }), 3.0);
    }

    #[test]
    fn exponents_below_one_are_rejected() {
        assert!(matches!(
            PNormSpace::new(0.5),
            Err(Error::OutOfRange { name: "p", .. })
        ));
        assert!(PNormSpace::new(f64::NAN).is_err());
        // And indeed p = 0.5 would break the triangle inequality:
        // (1,0) and (0,1) give "norms" 1 but their sum would get 4.
        let fake = |v: PVector| {
            (v.alpha.abs().sqrt() + v.beta.abs().sqrt()).powi(2)
        };
        let e1 = PVector { alpha: 1.0, beta: 0.0 };
        let e2 = PVector { alpha: 0.0, beta: 1.0 };
        assert!(fake(e1.plus(e2)) > fake(e1) + fake(e2));
    }

    #[test]
    fn pnorm_bound_examples() {
        assert_eq!(pnorm_chsh_bound(&PNormSpace::new(1.0).unwrap()), 4.0);
        assert_close(
            pnorm_chsh_bound(&PNormSpace::new(2.0).unwrap()),
            TSIRELSON_BOUND,
            1e-12,
        );
        // Oracle: the closed form 2^{1 + 1/p}.
        assert_close(
            pnorm_chsh_bound(&PNormSpace::new(3.0).unwrap()),
            2.0_f64.powf(1.0 + 1.0 / 3.0),
            1e-12,
        );
        assert_close(
            pnorm_chsh_bound(&PNormSpace::new(3.0).unwrap()),
            2.5198421,
            1e-7,
        );
        assert_eq!(pnorm_chsh_bound(&PNormSpace::infinity()), 2.0);
    }

    #[test]
    fn pnorm_bound_matches_closed_form_on_a_grid() {
        for k in 0..100 {
            let p = 1.0 + k as f64 * 0.25;
            let space = PNormSpace::new(p).unwrap();
            assert_close(
                pnorm_chsh_bound(&space),
                2.0_f64.powf(1.0 + 1.0 / p),
                1e-12,
            );
        }
    }

    #[test]
    fn pnorm_bound_is_strictly_decreasing() {
        let mut previous = f64::INFINITY;
        for k in 0..100 {
            // Geometric grid p ∈ [1, ~100].
            let p = 1.0 * 1.047_f64.powi(k);
            let value = pnorm_chsh_bound(&PNormSpace::new(p).unwrap());
            assert!(
                value < previous,
                "bound not strictly decreasing at p = {p}: {value} >= {previous}"
            );
            assert!(value > 2.0, "bound crossed the classical limit at p = {p}");
            previous = value;
        }
        assert_eq!(pnorm_chsh_bound(&PNormSpace::infinity()), 2.0);
    }

    #[test]
    fn degenerate_norm_chain_reaches_four() {
        let report = hbar_infinity_norm_check();
        assert_eq!(report.degenerate_bound, 4.0);
        assert_eq!(report.p1_bound, 4.0);
        assert!(report.difference.abs() <= 1e-12);
        assert_close(report.p2_bound, TSIRELSON_BOUND, 1e-12);
        assert!(report.degenerate_bound > report.p2_bound);
    }

    #[test]
    fn rotated_basis_exposes_l1_basis_dependence() {
        let report = hbar_infinity_norm_check();
        // Oracle: e₁, e₂ pick up coordinates (±√2/2) under the 45° rotation,
        // so B ± B′ become (√2, 0) and (0, −√2) with ℓ^1 norms √2 each.
        assert_close(report.rotated_p1_bound, TSIRELSON_BOUND, 1e-12);
        assert_close(report.rotated_degenerate_bound, 4.0, 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn triangle_inequality_holds_for_p_at_least_one(
            a1 in -50.0..50.0f64,
            b1 in -50.0..50.0f64,
            a2 in -50.0..50.0f64,
            b2 in -50.0..50.0f64,
        ) {
            let u = PVector { alpha: a1, beta: b1 };
            let v = PVector { alpha: a2, beta: b2 };
            let sum = u.plus(v);
            for p in [1.0, 1.5, 2.0, 3.0, 10.0] {
                let space = PNormSpace::new(p).unwrap();
                prop_assert!(space.norm(sum) <= space.norm(u) + space.norm(v) + 1e-9);
            }
            let inf = PNormSpace::infinity();
            prop_assert!(inf.norm(sum) <= inf.norm(u) + inf.norm(v) + 1e-12);
        }

        #[test]
        fn pnorm_is_absolutely_homogeneous(
            alpha in -20.0..20.0f64,
            beta in -20.0..20.0f64,
            scale in -8.0..8.0f64,
        ) {
            let v = PVector { alpha, beta };
            let scaled = PVector { alpha: scale * alpha, beta: scale * beta };
            for p in [1.0, 2.0, 4.0] {
                let space = PNormSpace::new(p).unwrap();
                let lhs = space.norm(scaled);
                let rhs = scale.abs() * space.norm(v);
                prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
            }
        }
    }
}
