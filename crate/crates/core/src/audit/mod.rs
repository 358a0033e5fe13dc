//! Finite-ball audits of Hölder and quasi-isometry inequalities.
//!
//! Every audit reduces to pairs `(x, y)` of non-negative integers attached
//! to the pairs `{g, h}` of a ball: `x` on the source side and `y` on the
//! target side (doubled Gromov products, or distances). For a radius `R`
//! only the smallest `y` seen with each `x` matters, and
//! `Q_min(P, R) = max_x (x − P·y_min(x)) / scale`.

mod scan;
mod tree;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metric::{GeneratingSet, Rational, VisualMetricSpec, DEFAULT_BUDGET};
use crate::morphism::Endomorphism;
use crate::word::ball_size;

/// Limits and seeds shared by all audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditConfig {
    /// Largest number of unordered pairs scanned exhaustively; beyond it the
    /// scan switches to this many seeded random pairs.
    pub pair_budget: u64,
    /// Largest ball (in elements) any audit will enumerate.
    pub node_budget: u64,
    pub seed: u64,
    /// Node-expansion cap for each distance query over a generating set.
    pub search_budget: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            pair_budget: 100_000_000,
            node_budget: 200_000_000,
            seed: 0,
            search_budget: DEFAULT_BUDGET,
        }
    }
}

/// `{1/4, 1/3, 1/2, 2/3, 1, 3/2, 2, 3, 4}`.
pub fn default_grid() -> Vec<Rational> {
    [
        (1, 4),
        (1, 3),
        (1, 2),
        (2, 3),
        (1, 1),
        (3, 2),
        (2, 1),
        (3, 1),
        (4, 1),
    ]
    .iter()
    .map(|&(n, d)| Rational::new(n, d))
    .collect()
}

/// Parses `1/4,1/2,1,2` into a sorted, deduplicated grid of positive
/// rationals.
pub fn parse_grid(text: &str) -> Result<Vec<Rational>> {
    let mut grid = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        grid.push(parse_rational(item)?);
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    grid.sort();
    grid.dedup();
    Ok(grid)
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::InvalidArgument(format!("`{text}` is not a positive rational"));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let n: i64 = n.parse().map_err(|_| bad())?;
    let d: i64 = d.parse().map_err(|_| bad())?;
    if n <= 0 || d <= 0 {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// `min_y[R][x]`: least target value among pairs of `ball(R)` whose source
/// value is `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct MinTable {
    pub(crate) by_radius: Vec<Vec<Option<i64>>>,
    pub(crate) scale: i64,
    /// Radii up to this one were scanned exhaustively.
    pub(crate) exact_radius: usize,
}

impl MinTable {
    fn q_min(&self, p: Rational, radius: usize) -> Rational {
        let (pn, pd) = (*p.numer(), *p.denom());
        let mut best: Option<Rational> = None;
        for (x, y) in self.by_radius[radius].iter().enumerate() {
            if let Some(y) = *y {
                let v = Rational::new(x as i64 * pd - pn * y, pd * self.scale);
                if best.is_none_or(|b| v > b) {
                    best = Some(v);
                }
            }
        }
        best.unwrap_or_else(|| Rational::from_integer(0))
    }
}

/// Turns per-level minima (pairs whose larger element has length exactly
/// `L`) into cumulative per-radius minima.
pub(crate) fn accumulate(levels: Vec<Vec<Option<i64>>>) -> Vec<Vec<Option<i64>>> {
    let width = levels.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = Vec::with_capacity(levels.len());
    let mut running: Vec<Option<i64>> = vec![None; width];
    for level in levels {
        for (x, y) in level.into_iter().enumerate() {
            running[x] = min_opt(running[x], y);
        }
        out.push(running.clone());
    }
    out
}

pub(crate) fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontierKind {
    /// `P(gφ|hφ)_p + Q ≥ (g|h)_p`.
    Gromov,
    /// `P·d(gφ,hφ) + Q ≥ d(g,h)`.
    WordMetric,
    /// `P(g|h)^{A′} + Q ≥ (g|h)^A`, both based at 1.
    MetricEquivalence,
}

/// `Q_min(P, R)` for every radius and grid value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolderFrontier {
    pub kind: FrontierKind,
    pub radii: Vec<usize>,
    pub grid: Vec<Rational>,
    /// `table[i][j] = Q_min(grid[j], radii[i])`.
    pub table: Vec<Vec<Rational>>,
    /// True if some radius was audited on seeded random pairs only.
    pub sampled: bool,
}

impl HolderFrontier {
    fn build(kind: FrontierKind, mins: &MinTable, grid: &[Rational], radii: &[usize]) -> Self {
        let table = radii
            .iter()
            .map(|&r| grid.iter().map(|&p| mins.q_min(p, r)).collect())
            .collect();
        HolderFrontier {
            kind,
            radii: radii.to_vec(),
            grid: grid.to_vec(),
            table,
            sampled: radii.iter().any(|&r| r > mins.exact_radius),
        }
    }

    pub fn get(&self, p: Rational, radius: usize) -> Option<Rational> {
        let i = self.radii.iter().position(|&r| r == radius)?;
        let j = self.grid.iter().position(|&q| q == p)?;
        Some(self.table[i][j])
    }

    pub fn column(&self, p: Rational) -> Option<Vec<Rational>> {
        let j = self.grid.iter().position(|&q| q == p)?;
        Some(self.table.iter().map(|row| row[j]).collect())
    }

    /// Nondecreasing in `R`, nonincreasing in `P`.
    pub fn is_monotone(&self) -> bool {
        let rows_ok = self
            .table
            .iter()
            .all(|row| row.windows(2).all(|w| w[0] >= w[1]));
        let cols_ok = self
            .table
            .windows(2)
            .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| a <= b));
        rows_ok && cols_ok
    }

    /// `R,P_num,P_den,Qmin_num,Qmin_den` records with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R,P_num,P_den,Qmin_num,Qmin_den\n");
        for (r, row) in self.radii.iter().zip(&self.table) {
            for (p, q) in self.grid.iter().zip(row) {
                let _ = writeln!(
                    out,
                    "{r},{},{},{},{}",
                    p.numer(),
                    p.denom(),
                    q.numer(),
                    q.denom()
                );
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let kind = match self.kind {
            FrontierKind::Gromov => "gromov-product",
            FrontierKind::WordMetric => "word-metric",
            FrontierKind::MetricEquivalence => "metric-equivalence",
        };
        let mode = if self.sampled {
            "sampled"
        } else {
            "exhaustive"
        };
        let _ = writeln!(out, "frontier: {kind} ({mode})");
        let _ = write!(out, "{:>4}", "R\\P");
        for p in &self.grid {
            let _ = write!(out, " {:>8}", p.to_string());
        }
        out.push('\n');
        for (r, row) in self.radii.iter().zip(&self.table) {
            let _ = write!(out, "{r:>4}");
            for q in row {
                let _ = write!(out, " {:>8}", q.to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn check_radii(radii: &[usize]) -> Result<usize> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("no radii given".into()));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "radii must be strictly increasing".into(),
        ));
    }
    Ok(*radii.last().unwrap())
}

fn check_grid(grid: &[Rational]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|p| *p <= Rational::from_integer(0)) {
        return Err(Error::InvalidArgument(
            "grid must be non-empty and positive".into(),
        ));
    }
    Ok(())
}

fn check_ball(rank: usize, radius: usize, cfg: &AuditConfig) -> Result<()> {
    if ball_size(rank, radius) > cfg.node_budget as u128 {
        return Err(Error::BudgetExceeded {
            budget: cfg.node_budget,
        });
    }
    Ok(())
}

fn gromov_table(
    phi: &Endomorphism,
    spec: &VisualMetricSpec,
    rmax: usize,
    cfg: &AuditConfig,
) -> Result<MinTable> {
    if spec.genset.ambient_basis() != phi.basis() {
        return Err(Error::BasisMismatch);
    }
    if !spec.genset.is_basis() {
        return Err(Error::InvalidArgument(
            "Gromov-product frontiers use the basis metric; compare generating sets with metric-equiv"
                .into(),
        ));
    }
    check_ball(phi.rank(), rmax, cfg)?;
    if spec.basepoint.is_empty() && tree::supports(phi.rank(), rmax) {
        return Ok(tree::gromov_table(phi, rmax));
    }
    scan::gromov_table(phi, &spec.basepoint, rmax, cfg)
}

/// Least `Q` with `(g|h)_p ≤ P(gφ|hφ)_p + Q` for all `g ≠ h` in `ball(R)`.
pub fn q_min(
    phi: &Endomorphism,
    p: Rational,
    radius: usize,
    spec: &VisualMetricSpec,
    cfg: &AuditConfig,
) -> Result<Rational> {
    check_grid(&[p])?;
    Ok(gromov_table(phi, spec, radius, cfg)?.q_min(p, radius))
}

pub fn frontier(
    phi: &Endomorphism,
    grid: &[Rational],
    radii: &[usize],
    spec: &VisualMetricSpec,
    cfg: &AuditConfig,
) -> Result<HolderFrontier> {
    check_grid(grid)?;
    let rmax = check_radii(radii)?;
    let mins = gromov_table(phi, spec, rmax, cfg)?;
    Ok(HolderFrontier::build(
        FrontierKind::Gromov,
        &mins,
        grid,
        radii,
    ))
}

/// The frontier of `P·d(gφ,hφ) + Q ≥ d(g,h)` in the basis word metric.
pub fn qie_frontier(
    phi: &Endomorphism,
    grid: &[Rational],
    radii: &[usize],
    cfg: &AuditConfig,
) -> Result<HolderFrontier> {
    check_grid(grid)?;
    let rmax = check_radii(radii)?;
    check_ball(phi.rank(), rmax, cfg)?;
    let mins = scan::word_metric_table(phi, rmax, cfg)?;
    Ok(HolderFrontier::build(
        FrontierKind::WordMetric,
        &mins,
        grid,
        radii,
    ))
}

/// Frontier of the identity map from the Gromov products of `a` to those
/// of `a2`, on pairs from the basis ball.
pub fn metric_equiv_audit(
    a: &GeneratingSet,
    a2: &GeneratingSet,
    grid: &[Rational],
    radii: &[usize],
    cfg: &AuditConfig,
) -> Result<HolderFrontier> {
    if a.ambient_basis() != a2.ambient_basis() {
        return Err(Error::BasisMismatch);
    }
    check_grid(grid)?;
    let rmax = check_radii(radii)?;
    check_ball(a.ambient_basis().rank(), rmax, cfg)?;
    let mins = scan::metric_equiv_table(a, a2, rmax, cfg)?;
    Ok(HolderFrontier::build(
        FrontierKind::MetricEquivalence,
        &mins,
        grid,
        radii,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeminormValue {
    Finite(f64),
    Divergent,
}

impl std::fmt::Display for SeminormValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeminormValue::Finite(v) => write!(f, "{v}"),
            SeminormValue::Divergent => f.write_str("divergent"),
        }
    }
}

/// Finite-radius estimate of `‖φ‖ = ln inf{r ≥ 1 : φ is Hölder of exponent 1/r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormEstimate {
    pub value: SeminormValue,
    /// `P̂(R)`: least grid `P` with `Q_min(P,R) = Q_min(P,R−1)`.
    pub p_hat: Vec<(usize, Option<Rational>)>,
    /// `P̂` agrees over the last two audited radii.
    pub stabilized: bool,
    pub sampled: bool,
}

impl SeminormEstimate {
    pub fn to_text(&self) -> String {
        let mut out = format!("seminorm: {}\n", self.value);
        let _ = writeln!(out, "stabilized: {}", self.stabilized);
        let _ = writeln!(
            out,
            "note: finite-radius estimate{}",
            if self.sampled {
                " from sampled pairs"
            } else {
                ""
            }
        );
        for (r, p) in &self.p_hat {
            match p {
                Some(p) => {
                    let _ = writeln!(out, "P_hat({r}) = {p}");
                }
                None => {
                    let _ = writeln!(out, "P_hat({r}) = none");
                }
            }
        }
        out
    }
}

pub fn estimate_seminorm(
    phi: &Endomorphism,
    grid: &[Rational],
    radii: &[usize],
    spec: &VisualMetricSpec,
    cfg: &AuditConfig,
) -> Result<SeminormEstimate> {
    check_grid(grid)?;
    let rmax = check_radii(radii)?;
    if radii[0] == 0 {
        return Err(Error::InvalidArgument("seminorm radii start at 1".into()));
    }
    let mut grid = grid.to_vec();
    grid.sort();
    grid.dedup();
    let mins = gromov_table(phi, spec, rmax, cfg)?;
    let p_hat: Vec<(usize, Option<Rational>)> = radii
        .iter()
        .map(|&r| {
            let p = grid
                .iter()
                .copied()
                .find(|&p| mins.q_min(p, r) == mins.q_min(p, r - 1));
            (r, p)
        })
        .collect();
    let pmax = *grid.last().unwrap();
    let growing = mins.q_min(pmax, rmax) > mins.q_min(pmax, rmax - 1);
    let last = p_hat.last().unwrap().1;
    let stabilized = p_hat.len() >= 2 && p_hat[p_hat.len() - 2].1 == last && last.is_some();
    let value = match last {
        Some(p) if !growing => {
            let p = *p.numer() as f64 / *p.denom() as f64;
            SeminormValue::Finite(p.max(1.0).ln())
        }
        _ => SeminormValue::Divergent,
    };
    Ok(SeminormEstimate {
        value,
        p_hat,
        stabilized,
        sampled: rmax > mins.exact_radius,
    })
}

/// `d̄(φ,ψ) = max(‖φ⁻¹ψ‖, ‖ψ⁻¹φ‖)`, both estimated.
#[derive(Debug, Clone, PartialEq)]
pub struct DbarEstimate {
    pub value: SeminormValue,
    pub forward: SeminormEstimate,
    pub backward: SeminormEstimate,
}

impl DbarEstimate {
    pub fn to_text(&self) -> String {
        format!(
            "dbar: {}\n[phi^-1 psi]\n{}[psi^-1 phi]\n{}",
            self.value,
            self.forward.to_text(),
            self.backward.to_text()
        )
    }
}

pub fn pseudometric_dbar(
    phi: &Endomorphism,
    psi: &Endomorphism,
    grid: &[Rational],
    radii: &[usize],
    spec: &VisualMetricSpec,
    cfg: &AuditConfig,
) -> Result<DbarEstimate> {
    let forward_map = phi.invert()?.compose(psi)?;
    let backward_map = psi.invert()?.compose(phi)?;
    let forward = estimate_seminorm(&forward_map, grid, radii, spec, cfg)?;
    let backward = estimate_seminorm(&backward_map, grid, radii, spec, cfg)?;
    let value = match (forward.value, backward.value) {
        (SeminormValue::Finite(a), SeminormValue::Finite(b)) => SeminormValue::Finite(a.max(b)),
        _ => SeminormValue::Divergent,
    };
    Ok(DbarEstimate {
        value,
        forward,
        backward,
    })
}

#[cfg(test)]
mod tests;
