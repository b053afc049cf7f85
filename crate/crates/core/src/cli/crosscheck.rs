//! Planar (`n = 2`) comparison of the equilibrium coefficient derived from the
//! Lagrangian against the commonly printed closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{planar_coefficient, Problem};

use super::checks::random_points;

/// Relative agreement below which a variant counts as matching.
pub const AGREEMENT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantRow {
    pub variant: String,
    /// Weights substituted for `(α, β)`.
    pub alpha: f64,
    pub beta: f64,
    pub max_rel_diff: f64,
    pub median_rel_diff: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub points: usize,
    pub seed: u64,
    pub a: f64,
    pub b: f64,
    pub rows: Vec<VariantRow>,
}

fn row(variant: &str, alpha: f64, beta: f64, diffs: &mut [f64]) -> VariantRow {
    diffs.sort_by(|x, y| x.total_cmp(y));
    let max_rel_diff = diffs[diffs.len() - 1];
    VariantRow {
        variant: variant.to_string(),
        alpha,
        beta,
        max_rel_diff,
        median_rel_diff: diffs[diffs.len() / 2],
        agrees: max_rel_diff < AGREEMENT,
    }
}

/// Compares `M(s)` with the planar closed form under both readings of the
/// weights (normalized `a, b` and raw `α, 1 - α`), each with the `βs` and
/// `βH` denominators, and with the uncorrected general-`n` form.
pub fn planar_crosscheck(problem: &Problem, count: usize, seed: u64) -> Result<CrossCheck> {
    if problem.n() != 2 {
        return Err(Error::InvalidArgument(format!("planar cross-check needs n = 2, got {}", problem.n())));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("planar cross-check needs at least one point".into()));
    }
    let f = problem.integrand();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = random_points(problem, count, rng.gen());
    let reference: Vec<f64> = points.iter().map(|p| f.m_coeff(p)).collect();
    let rel = |values: Vec<f64>| -> Vec<f64> {
        values.iter().zip(&reference).map(|(v, m)| (v - m).abs() / m.abs()).collect()
    };
    let readings = [("weights a,b", problem.a(), problem.b()), ("raw alpha,1-alpha", problem.alpha(), problem.beta())];
    let mut rows = Vec::new();
    for (name, alpha, beta) in readings {
        for (den, uses_h) in [("beta*s", false), ("beta*H", true)] {
            let mut diffs = rel(points.iter().map(|p| planar_coefficient(alpha, beta, p, uses_h)).collect());
            rows.push(row(&format!("{name}; denominator {den}"), alpha, beta, &mut diffs));
        }
    }
    let mut printed = rel(points.iter().map(|p| f.m_coeff_as_printed(p)).collect());
    rows.push(row("general form with H^(n-1) in the second term", problem.a(), problem.b(), &mut printed));
    Ok(CrossCheck { points: count, seed, a: problem.a(), b: problem.b(), rows })
}

impl CrossCheck {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "planar coefficient cross-check: {} points, seed {}, a = {}, b = {}\n",
            self.points, self.seed, self.a, self.b
        );
        for r in &self.rows {
            out.push_str(&format!(
                "  {:<48} max {:.3e}  median {:.3e}  {}\n",
                r.variant,
                r.max_rel_diff,
                r.median_rel_diff,
                if r.agrees { "agrees" } else { "differs" }
            ));
        }
        out
    }

    pub fn any_agrees(&self) -> bool {
        self.rows.iter().any(|r| r.agrees)
    }
}
