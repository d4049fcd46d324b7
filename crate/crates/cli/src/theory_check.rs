//! `theory-check`: closed forms against Monte Carlo estimates.

use xebspoof::theory::{
    closed_form_xe_id, closed_form_xe_idp, mc_gaussian_permanent_moments, mc_h_power_ratio, mc_xe_id, mc_xe_pd,
    pd_bound, pd_exact_xe_expectation, TheoryResult,
};
use xebspoof::Seed;

use crate::config::TheoryConfig;
use crate::error::Result;
use crate::output::{num, OutputDir, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryRow {
    pub check: String,
    pub params: String,
    pub closed_form: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub trials: usize,
    pub tolerance: String,
    pub high_variance: bool,
    pub passed: bool,
}

impl TheoryRow {
    fn from_mc(check: &str, params: String, r: &TheoryResult, rel_tol: Option<f64>) -> Self {
        let (tolerance, within) = match rel_tol {
            Some(t) => (format!("rel {t}"), r.relative_error() <= t),
            None => ("4σ".to_string(), r.z_score() <= 4.0),
        };
        let high_variance = r.high_variance();
        Self {
            check: check.into(),
            params,
            closed_form: r.closed_form,
            estimate: r.estimate,
            std_error: r.std_error,
            trials: r.trials,
            tolerance,
            high_variance,
            passed: within && !high_variance,
        }
    }
}

/// Largest ratio `pd_exact(ρ)/XE_idp / bound(ρ)` over `ρ = 0, 0.1, ..., 0.9`
/// at `M = 10^6`; at most 1 when the bound holds.
pub fn pd_bound_margin(n: usize) -> Result<f64> {
    let m = 1_000_000;
    let idp = closed_form_xe_idp(n, m)?;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..10 {
        let rho = i as f64 / 10.0;
        let ratio = pd_exact_xe_expectation(rho, n, m)? / idp;
        worst = worst.max(ratio / pd_bound(rho, n)?);
    }
    Ok(worst)
}

pub fn run_theory(cfg: &TheoryConfig) -> Result<Vec<TheoryRow>> {
    let root = Seed::new(cfg.seed);
    let trials = |default: usize| cfg.trials.unwrap_or(default);
    let mut rows = Vec::new();

    let m1 = 50;
    let id1 = closed_form_xe_id(1, m1)?;
    let arithmetic = 2.0 / m1 as f64;
    rows.push(TheoryRow {
        check: "xe_id closed form".into(),
        params: format!("N=1 M={m1}"),
        closed_form: arithmetic,
        estimate: id1.exact,
        std_error: 0.0,
        trials: 0,
        tolerance: "rel 1e-12".into(),
        high_variance: false,
        passed: (id1.exact - arithmetic).abs() <= 1e-12 * arithmetic
            && (id1.approx - arithmetic).abs() <= 1e-12 * arithmetic,
    });
    let r = mc_xe_id(1, m1, trials(200), &root.child_named("xe_id").child(1))?;
    rows.push(TheoryRow::from_mc("xe_id monte carlo", format!("N=1 M={m1}"), &r, None));

    let (n3, m3) = (3, 300);
    let r = mc_xe_id(n3, m3, trials(1000), &root.child_named("xe_id").child(3))?;
    rows.push(TheoryRow::from_mc(
        "xe_id monte carlo",
        format!("N={n3} M={m3}"),
        &r,
        Some(0.1),
    ));
    let idp = closed_form_xe_idp(n3, m3)?;
    let ratio = TheoryResult {
        name: "xe_id/xe_idp",
        closed_form: (n3 + 1) as f64,
        estimate: r.estimate / idp,
        std_error: r.std_error / idp,
        ..r.clone()
    };
    rows.push(TheoryRow::from_mc(
        "xe_id / xe_idp",
        format!("N={n3} M={m3}"),
        &ratio,
        Some(0.1),
    ));

    let (p2, p4) = mc_gaussian_permanent_moments(4, trials(100_000), &root.child_named("permanent"))?;
    rows.push(TheoryRow::from_mc("E|Per Z|^2 = N!", "N=4".into(), &p2, Some(0.05)));
    rows.push(TheoryRow::from_mc(
        "E|Per Z|^4 = N!(N+1)!",
        "N=4".into(),
        &p4,
        Some(0.1),
    ));

    for s in [1, 2] {
        let r = mc_h_power_ratio(4, s, trials(2_000_000), &root.child_named("h_power").child(s as u64))?;
        rows.push(TheoryRow::from_mc(
            "h power ratio (1+s/N)^N",
            format!("N=4 s={s}"),
            &r,
            Some(0.1),
        ));
    }

    for n in 3..=8 {
        let margin = pd_bound_margin(n)?;
        rows.push(TheoryRow {
            check: "pd bound (max ratio/bound over rho)".into(),
            params: format!("N={n} rho=0..0.9"),
            closed_form: 1.0,
            estimate: margin,
            std_error: 0.0,
            trials: 0,
            tolerance: "<= 1".into(),
            high_variance: false,
            passed: margin <= 1.0,
        });
    }

    let r = mc_xe_pd(0.5, 3, 300, trials(1000), &root.child_named("xe_pd"))?;
    rows.push(TheoryRow::from_mc(
        "xe_pd monte carlo",
        "N=3 M=300 rho=0.5".into(),
        &r,
        Some(0.1),
    ));
    Ok(rows)
}

pub fn theory_table(rows: &[TheoryRow], hash: &str) -> Table {
    let mut t = Table::new(vec![
        "check",
        "params",
        "closed_form",
        "estimate",
        "std_error",
        "trials",
        "tolerance",
        "high_variance",
        "passed",
        "config_hash",
    ]);
    for r in rows {
        t.push(vec![
            r.check.clone(),
            r.params.clone(),
            num(r.closed_form),
            num(r.estimate),
            num(r.std_error),
            r.trials.to_string(),
            r.tolerance.clone(),
            r.high_variance.to_string(),
            r.passed.to_string(),
            hash.to_string(),
        ]);
    }
    t
}

pub fn write_theory(rows: &[TheoryRow], cfg: &TheoryConfig, out: &mut OutputDir) -> Result<()> {
    out.write_table("theory.csv", &theory_table(rows, &cfg.hash()))
}

/// Fixed-width table for the terminal.
pub fn render(rows: &[TheoryRow]) -> String {
    let mut s = format!(
        "{:<38} {:<20} {:>13} {:>13} {:>11} {:>10}  {}\n",
        "check", "params", "closed form", "estimate", "σ", "tolerance", "result"
    );
    for r in rows {
        let verdict = match (r.passed, r.high_variance) {
            (true, _) => "pass",
            (false, true) => "FAIL (high variance)",
            (false, false) => "FAIL",
        };
        s.push_str(&format!(
            "{:<38} {:<20} {:>13.6e} {:>13.6e} {:>11.3e} {:>10}  {verdict}\n",
            r.check, r.params, r.closed_form, r.estimate, r.std_error, r.tolerance
        ));
    }
    s
}
