//! The two-knob CHSH surface.
//!
//! Knob one is the familiar relative angle θ between measurement directions:
//! the base model at θ is the singlet measured at equally spaced coplanar
//! angles (2θ, 0 | θ, 3θ), tracing the textbook one-dimensional curve with
//! extremes ±2√2. Knob two is realized as the weight q of a convex mixture
//! with the PR box — a modeling choice, not forced by anything: q is the
//! minimal parameterization that provably interpolates the classical,
//! quantum, and super-quantum regimes in one plot. (An alternative second
//! knob would be the exponent p of the ℓ^p model; it is not implemented
//! here.) Cells store the signed CHSH combination, so every fixed-θ column is
//! exactly affine in q.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Sign, CLASSICAL_BOUND, TSIRELSON_BOUND};
use crate::error::{Error, Result};
use crate::quantum::{quantum_behavior, MeasurementSettings, QuantumStrategy};
use crate::superquantum::pr_box;

/// The behavior family sitting under the θ knob.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseModel {
    /// Singlet at relative angle θ; the quantum one-knob curve.
    QuantumSinglet,
    /// The deterministic all-+1 box; θ-independent, signed combination 2.
    ClassicalDeterministic,
}

impl std::fmt::Display for BaseModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BaseModel::QuantumSinglet => f.write_str("quantum-singlet"),
            BaseModel::ClassicalDeterministic => f.write_str("classical-deterministic"),
        }
    }
}

impl std::str::FromStr for BaseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum-singlet" => Ok(BaseModel::QuantumSinglet),
            "classical-deterministic" => Ok(BaseModel::ClassicalDeterministic),
            other => Err(Error::InvalidConfig(format!(
                "unknown base model '{other}' (expected quantum-singlet or classical-deterministic)"
            ))),
        }
    }
}

/// Grid request: θ ∈ [0, π] and q ∈ [0, 1], both inclusive.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    pub theta_steps: usize,
    pub q_steps: usize,
    pub base_model: BaseModel,
    /// Where the CSV goes; `None` means the caller's stdout.
    pub output_path: Option<PathBuf>,
}

impl SurfaceSpec {
    fn validate(&self) -> Result<()> {
        if self.theta_steps < 2 {
            return Err(Error::OutOfRange {
                name: "theta_steps",
                value: self.theta_steps as f64,
                min: 2.0,
                max: f64::INFINITY,
            });
        }
        if self.q_steps < 2 {
            return Err(Error::OutOfRange {
                name: "q_steps",
                value: self.q_steps as f64,
                min: 2.0,
                max: f64::INFINITY,
            });
        }
        Ok(())
    }
}

/// The singlet measured at coplanar angles (2θ, 0) for Alice and (θ, 3θ) for
/// Bob — neighboring directions separated by the knob angle θ. The signed
/// combination is cos 3θ − 3 cos θ, spanning [−2√2, 2√2] with the positive
/// peak at θ = 3π/4.
pub fn singlet_base_behavior(theta: f64) -> Behavior {
    let strategy = QuantumStrategy {
        state: crate::quantum::singlet(),
        settings: MeasurementSettings::coplanar(2.0 * theta, 0.0, theta, 3.0 * theta),
    };
    quantum_behavior(&strategy)
}

/// The θ-independent classical base: deterministic all-+1 responses.
pub fn classical_base_behavior() -> Behavior {
    Behavior::deterministic([Sign::Plus; 2], [Sign::Plus; 2])
}

/// Scan flags reported alongside a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfaceSummary {
    /// Max signed cell of the q = 0 row.
    pub q0_row_max: f64,
    /// Some fixed-q cut has max ≤ 2 (within 1e−9).
    pub classical_cut_exists: bool,
    /// Some fixed-q cut has max > 2√2 (beyond 1e−9).
    pub superquantum_cut_exists: bool,
    pub min_cell: f64,
    pub max_cell: f64,
}

/// A computed surface: row q_j, column θ_i, cell = signed CHSH combination of
/// mix(q_j, PR box, base(θ_i)).
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceGrid {
    base_model: BaseModel,
    thetas: Vec<f64>,
    qs: Vec<f64>,
    /// Row-major by q: cells[qi * thetas.len() + ti].
    cells: Vec<f64>,
}

impl SurfaceGrid {
    pub fn base_model(&self) -> BaseModel {
        self.base_model
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn qs(&self) -> &[f64] {
        &self.qs
    }

    pub fn cell(&self, q_index: usize, theta_index: usize) -> f64 {
        self.cells[q_index * self.thetas.len() + theta_index]
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    /// Max signed value along the fixed-q cut.
    pub fn row_max(&self, q_index: usize) -> f64 {
        let row = &self.cells[q_index * self.thetas.len()..(q_index + 1) * self.thetas.len()];
        row.iter().fold(f64::NEG_INFINITY, |acc, &v| acc.max(v))
    }

    pub fn summary(&self) -> SurfaceSummary {
        let mut classical_cut_exists = false;
        let mut superquantum_cut_exists = false;
        for qi in 0..self.qs.len() {
            let m = self.row_max(qi);
            classical_cut_exists |= m <= CLASSICAL_BOUND + 1e-9;
            superquantum_cut_exists |= m > TSIRELSON_BOUND + 1e-9;
        }
        let min_cell = self.cells.iter().fold(f64::INFINITY, |a, &v| a.min(v));
        let max_cell = self.cells.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
        SurfaceSummary {
            q0_row_max: self.row_max(0),
            classical_cut_exists,
            superquantum_cut_exists,
            min_cell,
            max_cell,
        }
    }
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let n = steps - 1;
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect()
}

/// Computes the surface grid of a spec.
pub fn surface(spec: &SurfaceSpec) -> Result<SurfaceGrid> {
    spec.validate()?;
    let thetas = linspace(0.0, std::f64::consts::PI, spec.theta_steps);
    let qs = linspace(0.0, 1.0, spec.q_steps);
    let pr = pr_box();

    let bases: Vec<Behavior> = match spec.base_model {
        BaseModel::QuantumSinglet => thetas.iter().map(|&t| singlet_base_behavior(t)).collect(),
        BaseModel::ClassicalDeterministic => {
            vec![classical_base_behavior(); thetas.len()]
        }
    };

    let mut cells = Vec::with_capacity(thetas.len() * qs.len());
    for &q in &qs {
        for base in &bases {
            let mixed = Behavior::mix(q, &pr, base)?;
            cells.push(mixed.correlations().signed_combination());
        }
    }
    Ok(SurfaceGrid {
        base_model: spec.base_model,
        thetas,
        qs,
        cells,
    })
}

/// CSV rendering: header `theta,q,chsh_signed,chsh_abs`, 17-significant-digit
/// floats (bitwise round-trippable), and a trailing summary block of comment
/// lines.
pub fn write_surface_csv<W: Write + ?Sized>(grid: &SurfaceGrid, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "theta,q,chsh_signed,chsh_abs")?;
    for (qi, &q) in grid.qs().iter().enumerate() {
        for (ti, &theta) in grid.thetas().iter().enumerate() {
            let v = grid.cell(qi, ti);
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                theta,
                q,
                v,
                v.abs()
            )?;
        }
    }
    let s = grid.summary();
    writeln!(out, "# base_model = {}", grid.base_model())?;
    writeln!(out, "# theta_steps = {}", grid.thetas().len())?;
    writeln!(out, "# q_steps = {}", grid.qs().len())?;
    writeln!(out, "# q0_row_max = {:.16e}", s.q0_row_max)?;
    writeln!(out, "# classical_cut_exists = {}", s.classical_cut_exists)?;
    writeln!(out, "# superquantum_cut_exists = {}", s.superquantum_cut_exists)?;
    Ok(())
}

/// A surface read back from CSV; used by the round-trip and summary checks.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedSurface {
    pub rows: Vec<ParsedRow>,
    pub classical_cut_exists: Option<bool>,
    pub superquantum_cut_exists: Option<bool>,
    pub q0_row_max: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParsedRow {
    pub theta: f64,
    pub q: f64,
    pub chsh_signed: f64,
    pub chsh_abs: f64,
}

/// Parses an emitted surface CSV, keeping the summary flags.
pub fn parse_surface_csv<R: BufRead>(reader: R) -> Result<ParsedSurface> {
    let mut rows = Vec::new();
    let mut classical_cut_exists = None;
    let mut superquantum_cut_exists = None;
    let mut q0_row_max = None;
    let bad = |line: &str| Error::InvalidConfig(format!("unparseable surface line: {line}"));
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line != "theta,q,chsh_signed,chsh_abs" {
                return Err(Error::InvalidConfig(format!(
                    "unexpected surface header: {line}"
                )));
            }
            continue;
        }
        if let Some(comment) = line.strip_prefix("# ") {
            if let Some((key, value)) = comment.split_once(" = ") {
                match key {
                    "classical_cut_exists" => {
                        classical_cut_exists =
                            Some(value.parse().map_err(|_| bad(&line))?)
                    }
                    "superquantum_cut_exists" => {
                        superquantum_cut_exists =
                            Some(value.parse().map_err(|_| bad(&line))?)
                    }
                    "q0_row_max" => q0_row_max = Some(value.parse().map_err(|_| bad(&line))?),
                    _ => {}
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(bad(&line));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|_| bad(&line));
        rows.push(ParsedRow {
            theta: parse(fields[0])?,
            q: parse(fields[1])?,
            chsh_signed: parse(fields[2])?,
            chsh_abs: parse(fields[3])?,
        });
    }
    Ok(ParsedSurface {
        rows,
        classical_cut_exists,
        superquantum_cut_exists,
        q0_row_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    fn quantum_spec(theta_steps: usize, q_steps: usize) -> SurfaceSpec {
        SurfaceSpec {
            theta_steps,
            q_steps,
            base_model: BaseModel::QuantumSinglet,
            output_path: None,
        }
    }

    #[test]
    fn base_curve_matches_the_closed_form() {
        // Oracle: E = −cos(Δ angle) on the singlet gives cos 3θ − 3 cos θ.
        for k in 0..=20 {
            let theta = k as f64 * std::f64::consts::PI / 20.0;
            let signed = singlet_base_behavior(theta)
                .correlations()
                .signed_combination();
            let expected = (3.0 * theta).cos() - 3.0 * theta.cos();
            assert_close(signed, expected, 1e-12);
        }
    }

    #[test]
    fn two_by_two_corner_values() {
        let grid = surface(&quantum_spec(2, 2)).unwrap();
        // Hand-checked mixture arithmetic: q = 0 row is the base curve at
        // θ ∈ {0, π}: cos 0·3 − 3 cos 0 = −2 and cos 3π − 3 cos π = 2.
        assert_close(grid.cell(0, 0), -2.0, 1e-12);
        assert_close(grid.cell(0, 1), 2.0, 1e-12);
        // q = 1 row is the PR box regardless of θ.
        assert_close(grid.cell(1, 0), 4.0, 1e-12);
        assert_close(grid.cell(1, 1), 4.0, 1e-12);
    }

    #[test]
    fn q0_row_reproduces_the_one_knob_curve() {
        let grid = surface(&quantum_spec(721, 3)).unwrap();
        assert_close(grid.row_max(0), TSIRELSON_BOUND, 1e-9);
        let s = grid.summary();
        assert_close(s.q0_row_max, TSIRELSON_BOUND, 1e-9);
    }

    #[test]
    fn q1_row_is_constant_four() {
        let grid = surface(&quantum_spec(37, 5)).unwrap();
        let last = grid.qs().len() - 1;
        for ti in 0..grid.thetas().len() {
            assert_close(grid.cell(last, ti), 4.0, 1e-12);
        }
    }

    #[test]
    fn mixture_point_check_at_the_quantum_peak() {
        // q = 0.5 at the θ = 3π/4 peak: 0.5·4 + 0.5·2√2 = 2 + √2.
        let base = singlet_base_behavior(3.0 * std::f64::consts::FRAC_PI_4);
        let mixed = Behavior::mix(0.5, &pr_box(), &base).unwrap();
        let signed = mixed.correlations().signed_combination();
        assert_close(signed, 2.0 + std::f64::consts::SQRT_2, 1e-12);
    }

    #[test]
    fn columns_are_affine_in_q() {
        let grid = surface(&quantum_spec(13, 9)).unwrap();
        let last = grid.qs().len() - 1;
        for ti in 0..grid.thetas().len() {
            let at_zero = grid.cell(0, ti);
            let at_one = grid.cell(last, ti);
            for (qi, &q) in grid.qs().iter().enumerate() {
                let expected = q * at_one + (1.0 - q) * at_zero;
                assert_close(grid.cell(qi, ti), expected, 1e-12);
            }
        }
    }

    #[test]
    fn summary_flags_per_base_model() {
        let quantum = surface(&quantum_spec(181, 11)).unwrap().summary();
        assert!(!quantum.classical_cut_exists);
        assert!(quantum.superquantum_cut_exists);

        let classical = surface(&SurfaceSpec {
            theta_steps: 181,
            q_steps: 11,
            base_model: BaseModel::ClassicalDeterministic,
            output_path: None,
        })
        .unwrap()
        .summary();
        assert!(classical.classical_cut_exists);
        assert!(classical.superquantum_cut_exists);
    }

    #[test]
    fn summary_flags_agree_with_a_direct_scan() {
        for base_model in [BaseModel::QuantumSinglet, BaseModel::ClassicalDeterministic] {
            let grid = surface(&SurfaceSpec {
                theta_steps: 61,
                q_steps: 7,
                base_model,
                output_path: None,
            })
            .unwrap();
            let mut buf = Vec::new();
            write_surface_csv(&grid, &mut buf).unwrap();
            let parsed = parse_surface_csv(&buf[..]).unwrap();
            // Rescan the emitted rows per q value.
            let mut classical = false;
            let mut superquantum = false;
            for &q in grid.qs() {
                let row_max = parsed
                    .rows
                    .iter()
                    .filter(|r| r.q == q)
                    .fold(f64::NEG_INFINITY, |a, r| a.max(r.chsh_signed));
                classical |= row_max <= CLASSICAL_BOUND + 1e-9;
                superquantum |= row_max > TSIRELSON_BOUND + 1e-9;
            }
            assert_eq!(parsed.classical_cut_exists, Some(classical));
            assert_eq!(parsed.superquantum_cut_exists, Some(superquantum));
        }
    }

    #[test]
    fn csv_round_trip_is_bitwise() {
        let grid = surface(&quantum_spec(29, 5)).unwrap();
        let mut buf = Vec::new();
        write_surface_csv(&grid, &mut buf).unwrap();
        let parsed = parse_surface_csv(&buf[..]).unwrap();
        assert_eq!(parsed.rows.len(), 29 * 5);
        let mut it = parsed.rows.iter();
        for (qi, &q) in grid.qs().iter().enumerate() {
            for (ti, &theta) in grid.thetas().iter().enumerate() {
                let row = it.next().unwrap();
                assert_eq!(row.theta.to_bits(), theta.to_bits());
                assert_eq!(row.q.to_bits(), q.to_bits());
                assert_eq!(row.chsh_signed.to_bits(), grid.cell(qi, ti).to_bits());
                assert_eq!(row.chsh_abs.to_bits(), grid.cell(qi, ti).abs().to_bits());
            }
        }
    }

    #[test]
    fn surface_rejects_degenerate_grids() {
        assert!(matches!(
            surface(&quantum_spec(1, 5)),
            Err(Error::OutOfRange { name: "theta_steps", .. })
        ));
        assert!(matches!(
            surface(&quantum_spec(5, 0)),
            Err(Error::OutOfRange { name: "q_steps", .. })
        ));
    }

    #[test]
    fn grid_endpoints_are_inclusive() {
        let grid = surface(&quantum_spec(5, 4)).unwrap();
        assert_eq!(grid.thetas()[0], 0.0);
        assert_close(*grid.thetas().last().unwrap(), std::f64::consts::PI, 1e-15);
        assert_eq!(grid.qs()[0], 0.0);
        assert_eq!(*grid.qs().last().unwrap(), 1.0);
    }
}
