//! One-bit communication protocols powered by nonlocal boxes.
//!
//! The inner-product-mod-2 protocol: Alice and Bob hold bit strings x and y,
//! feed (x_i, y_i) into box i, XOR their local box outputs, and Alice sends
//! her single parity bit. With perfect boxes (X = 4) Bob's answer is always
//! ⟨x, y⟩ mod 2; with noisy boxes each box independently breaks its XOR
//! condition with probability (4 − X)/8 and the success probability follows
//! the parity-noise closed form ½(1 + (X/4)^n).

use rand::Rng;
use serde::Serialize;

use crate::behavior::Sign;
use crate::error::{Error, Result};
use crate::rng::derived_rng;
use crate::superquantum::noisy_box;

/// The threshold 4√(2/3) above which noisy boxes trivialize communication
/// complexity probabilistically.
pub fn x_cc() -> f64 {
    4.0 * (2.0_f64 / 3.0).sqrt()
}

/// A supply of `n` independent noisy boxes of strength `x`, with the seed of
/// the stream that materializes their outcomes. Boxes are memoryless: each
/// protocol run draws fresh outcomes.
#[derive(Clone, Copy, Debug)]
pub struct BoxEnsemble {
    n: usize,
    x: f64,
    seed: u64,
}

impl BoxEnsemble {
    pub fn new(n: usize, x: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange {
                name: "n",
                value: 0.0,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        if !(0.0..=4.0).contains(&x) {
            return Err(Error::OutOfRange {
                name: "X",
                value: x,
                min: 0.0,
                max: 4.0,
            });
        }
        Ok(BoxEnsemble { n, x, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Probability that one box use violates its XOR condition: (4 − X)/8.
    pub fn flip_probability(&self) -> f64 {
        (4.0 - self.x) / 8.0
    }

    /// Substream of this ensemble for an externally supplied counter path.
    pub fn substream(&self, path: &[u64]) -> BoxEnsemble {
        BoxEnsemble {
            n: self.n,
            x: self.x,
            seed: crate::rng::derive_seed(self.seed, path),
        }
    }
}

/// The single bit Alice sends to Bob. Keeping it a dedicated type makes the
/// one-bit communication budget structural: [`bob_output`] accepts exactly
/// one of these and nothing else derived from Alice's side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Message(pub bool);

/// Everything Bob sees before answering: his input, his box outcomes, and
/// Alice's one message bit.
#[derive(Clone, Debug)]
pub struct BobView {
    pub y: Vec<bool>,
    pub betas: Vec<bool>,
    pub message: Message,
}

/// Bob's answer: the XOR of his box outputs with the received bit.
pub fn bob_output(view: &BobView) -> bool {
    view.betas.iter().fold(view.message.0, |acc, &b| acc ^ b)
}

/// A completed protocol execution.
#[derive(Clone, Debug, Serialize)]
pub struct ProtocolRun {
    pub x: Vec<bool>,
    pub y: Vec<bool>,
    /// The one communicated bit (Alice → Bob).
    pub transcript: Message,
    pub output: bool,
    pub correct: bool,
}

/// ⟨x, y⟩ mod 2.
pub fn inner_product_mod2(x: &[bool], y: &[bool]) -> bool {
    x.iter().zip(y).fold(false, |acc, (&xi, &yi)| acc ^ (xi & yi))
}

/// Draws one use of a noisy box of the given flip probability: Alice's output
/// is a fair coin; Bob's output satisfies α ⊕ β = x ∧ y except with
/// probability `flip_p`.
fn sample_box(rng: &mut impl Rng, x_bit: bool, y_bit: bool, flip_p: f64) -> (bool, bool) {
    let alpha: bool = rng.gen();
    let flips = rng.gen::<f64>() < flip_p;
    let beta = alpha ^ (x_bit & y_bit) ^ flips;
    (alpha, beta)
}

/// Runs the inner-product protocol on inputs (x, y) over the ensemble.
///
/// Alice feeds x_i into box i and sends the parity of her outputs; Bob feeds
/// y_i, XORs his outputs with the received bit, and answers. One bit crosses
/// the wire, enforced by the [`Message`] type.
pub fn vandam_inner_product(x: &[bool], y: &[bool], ensemble: &BoxEnsemble) -> Result<ProtocolRun> {
    if x.len() != ensemble.n || y.len() != ensemble.n {
        return Err(Error::LengthMismatch {
            x_len: x.len(),
            y_len: y.len(),
            n: ensemble.n,
        });
    }
    let flip_p = ensemble.flip_probability();
    let mut rng = derived_rng(ensemble.seed, &[]);

    let mut alphas = Vec::with_capacity(ensemble.n);
    let mut betas = Vec::with_capacity(ensemble.n);
    for i in 0..ensemble.n {
        let (alpha, beta) = sample_box(&mut rng, x[i], y[i], flip_p);
        alphas.push(alpha);
        betas.push(beta);
    }

    // Alice's side: parity of her outcomes, sent as the single message.
    let message = Message(alphas.iter().fold(false, |acc, &a| acc ^ a));

    // Bob's side sees only y, his outcomes, and the message.
    let view = BobView {
        y: y.to_vec(),
        betas,
        message,
    };
    let output = bob_output(&view);

    Ok(ProtocolRun {
        x: x.to_vec(),
        y: y.to_vec(),
        transcript: message,
        output,
        correct: output == inner_product_mod2(x, y),
    })
}

/// Closed-form success probability of the protocol with `n` boxes of strength
/// `x`: ½(1 + (1 − 2ε)^n) with ε = (4 − X)/8, i.e. ½(1 + (X/4)^n). Each box
/// flips the answer parity independently, whatever the inputs, so the
/// exponent is the box count.
pub fn predicted_success(n: usize, x: f64) -> f64 {
    0.5 * (1.0 + (x / 4.0).powi(n as i32))
}

/// One row of a success-probability table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuccessRow {
    pub x: f64,
    pub empirical: f64,
    pub predicted: f64,
    /// Whether this row sits at the X_cc threshold.
    pub is_xcc: bool,
}

/// Empirical-vs-predicted success over a grid of box strengths.
#[derive(Clone, Debug, Serialize)]
pub struct SuccessCurve {
    pub rows: Vec<SuccessRow>,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Measures protocol success empirically at each grid strength (with uniform
/// random inputs per trial) against the closed-form prediction. The threshold
/// abscissa X_cc is inserted into the grid (or marked, when already present)
/// so every emitted table carries it.
///
/// Trial t of grid point g draws from the substream `[g, t]` of `seed`, so
/// the table is reproducible and independent of evaluation order.
pub fn success_curve(n: usize, x_grid: &[f64], trials: u64, seed: u64) -> Result<SuccessCurve> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    let threshold = x_cc();
    let mut xs: Vec<(f64, bool)> = Vec::with_capacity(x_grid.len() + 1);
    for &x in x_grid {
        if !(0.0..=4.0).contains(&x) {
            return Err(Error::OutOfRange {
                name: "X",
                value: x,
                min: 0.0,
                max: 4.0,
            });
        }
        xs.push((x, (x - threshold).abs() <= 1e-12));
    }
    if !xs.iter().any(|&(_, m)| m) {
        let at = xs.partition_point(|&(x, _)| x < threshold);
        xs.insert(at, (threshold, true));
    }

    let mut rows = Vec::with_capacity(xs.len());
    for (g, &(x, is_xcc)) in xs.iter().enumerate() {
        let mut correct = 0u64;
        for t in 0..trials {
            let mut input_rng = derived_rng(seed, &[g as u64, t, 0]);
            let x_bits: Vec<bool> = (0..n).map(|_| input_rng.gen()).collect();
            let y_bits: Vec<bool> = (0..n).map(|_| input_rng.gen()).collect();
            let ensemble = BoxEnsemble::new(n, x, crate::rng::derive_seed(seed, &[g as u64, t, 1]))?;
            if vandam_inner_product(&x_bits, &y_bits, &ensemble)?.correct {
                correct += 1;
            }
        }
        rows.push(SuccessRow {
            x,
            empirical: correct as f64 / trials as f64,
            predicted: predicted_success(n, x),
            is_xcc,
        });
    }
    Ok(SuccessCurve {
        rows,
        n,
        trials,
        seed,
    })
}

/// CSV rendering with header `X,empirical,predicted,trials,n,seed`; the X_cc
/// row is flagged by a preceding comment line.
pub fn write_success_csv<W: std::io::Write + ?Sized>(
    curve: &SuccessCurve,
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(out, "X,empirical,predicted,trials,n,seed")?;
    for row in &curve.rows {
        if row.is_xcc {
            writeln!(out, "# X_cc = 3.2659863237")?;
        }
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{},{},{}",
            row.x, row.empirical, row.predicted, curve.trials, curve.n, curve.seed
        )?;
    }
    Ok(())
}

/// Exact success probability for inputs (x, y) by exhaustive enumeration over
/// every box's joint outcome distribution. Exponential in n — an oracle for
/// small instances, not a production path.
pub fn success_by_enumeration(x: &[bool], y: &[bool], strength: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            x_len: x.len(),
            y_len: y.len(),
            n: x.len(),
        });
    }
    let behavior = noisy_box(strength)?.into_behavior();
    let n = x.len();
    let target = inner_product_mod2(x, y);
    let mut success = 0.0;
    // Each box outcome pair is two bits; enumerate all 4^n combinations.
    for combo in 0..(1u64 << (2 * n)) {
        let mut weight = 1.0;
        let mut alice_parity = false;
        let mut bob_parity = false;
        for i in 0..n {
            let alpha = (combo >> (2 * i)) & 1 == 1;
            let beta = (combo >> (2 * i + 1)) & 1 == 1;
            let (a, b) = (u8::from(x[i]), u8::from(y[i]));
            weight *= behavior.prob(a, b, Sign::from_bit(alpha), Sign::from_bit(beta));
            alice_parity ^= alpha;
            bob_parity ^= beta;
        }
        let output = alice_parity ^ bob_parity;
        if output == target {
            success += weight;
        }
    }
    Ok(success)
}
