use clap::{ArgGroup, Args, Subcommand};
use serde::{Deserialize, Serialize};

use qfock_core::combinatorics::{constants, DEFAULT_SERIES_TOL};
use qfock_core::fockspace::{NormOptions, QContext};
use qfock_core::inequalities::{
    haagerup_ladder, moment_bound_check, tail_degree_cut, ultracontractivity_experiment, ExperimentResult,
    MOMENT_BOUND_BUDGET,
};
use qfock_core::moments::{moment_vs_trace, StarWord};
use qfock_core::qcircular::{identity_suite, HoloPolynomial};

use crate::table::{Cell, Table};
use crate::CliError;

/// Longest star-word accepted by `moments --word`.
pub const WORD_BUDGET: usize = 16;

/// Range of `t` accepted by `ultra`.
pub const T_PROFILE: (f64, f64) = (0.1, 10.0);

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunSpec {
    /// Run the operator identity suite and report the largest residual of each identity.
    Verify(VerifyArgs),
    /// Ratio ‖h‖/‖h‖₂ for homogeneous holomorphic polynomials against the √(n+1) bounds.
    Haagerup(HaagerupArgs),
    /// Crossing-weighted moments of star-words, compared with the vacuum trace.
    Moments(MomentsArgs),
    /// Ultracontractivity estimates from the exponential test vector.
    Ultra(UltraArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub q: f64,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 4)]
    pub max_n: usize,
    #[arg(long, default_value_t = 8)]
    pub trunc: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct HaagerupArgs {
    /// One or more deformation parameters, comma separated.
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    /// Truncation offsets above n; the last rung is reported.
    #[arg(long, value_delimiter = ',', default_value = "4,6,8")]
    pub trunc_ladder: Vec<usize>,
    /// Coefficient seeds (ignored for d = 1, where h = cⁿ).
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(group(ArgGroup::new("spec").required(true).args(["word", "pattern"])))]
pub struct MomentsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub q: f64,
    /// Star-word such as "1* 2* 1 2".
    #[arg(long)]
    pub word: Option<String>,
    /// Pattern (∗ⁿ1ⁿ)^m given as "m,n".
    #[arg(long)]
    pub pattern: Option<String>,
    /// Constant used on the right side of the moment bound; defaults to the solver's A.
    #[arg(long)]
    pub a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct UltraArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub q: f64,
    /// Times, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Vec<f64>,
    /// Degree cut for the exponential vectors; defaults to the smallest one meeting the tail rule.
    #[arg(long)]
    pub degree_cut: Option<usize>,
}

/// A finished table and whether every check in it held.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
}

impl RunSpec {
    pub fn name(&self) -> &'static str {
        match self {
            RunSpec::Verify(_) => "verify",
            RunSpec::Haagerup(_) => "haagerup",
            RunSpec::Moments(_) => "moments",
            RunSpec::Ultra(_) => "ultra",
        }
    }

    /// Seed echoed in the manifest; 0 for commands that draw no random numbers.
    pub fn seed(&self) -> u64 {
        match self {
            RunSpec::Verify(a) => a.seed,
            RunSpec::Haagerup(a) => a.seeds.first().copied().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn execute(&self) -> Result<Outcome, CliError> {
        match self {
            RunSpec::Verify(a) => verify(a),
            RunSpec::Haagerup(a) => haagerup(a),
            RunSpec::Moments(a) => moments(a),
            RunSpec::Ultra(a) => ultra(a),
        }
    }
}

fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn bound_value(r: &ExperimentResult, name: &str) -> Option<f64> {
    r.get_bound(name).map(|b| b.value)
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    if !(a.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", a.tol)));
    }
    let ctx = QContext::new(a.q, a.d, a.trunc)?;
    let checks = identity_suite(&ctx, a.max_n, a.seed)?;
    let mut t = Table::new(&["identity", "q", "d", "trunc", "max_n", "cases", "residual", "passed"]);
    let mut passed = true;
    for c in checks {
        let ok = c.residual < a.tol;
        passed &= ok;
        t.push(vec![
            c.name.into(),
            a.q.into(),
            a.d.into(),
            a.trunc.into(),
            a.max_n.into(),
            c.cases.into(),
            c.residual.into(),
            ok.into(),
        ]);
    }
    Ok(Outcome { table: t, passed })
}

pub fn haagerup(a: &HaagerupArgs) -> Result<Outcome, CliError> {
    if a.trunc_ladder.is_empty() {
        return Err(CliError::Usage("--trunc-ladder needs at least one offset".into()));
    }
    let mut t = Table::new(&[
        "q",
        "d",
        "n",
        "seed",
        "trunc",
        "ratio",
        "lower_bound",
        "upper_bound",
        "convergence_delta",
        "satisfied",
    ]);
    let qs = sorted(a.q.clone());
    for &q in &qs {
        constants(q, DEFAULT_SERIES_TOL)?;
    }
    let mut seeds = a.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let mut offsets = a.trunc_ladder.clone();
    offsets.sort_unstable();
    offsets.dedup();
    let opts = NormOptions { tol: a.tol, ..NormOptions::default() };
    let mut passed = true;
    for &q in &qs {
        for n in a.n_min..=a.n_max {
            for &seed in &seeds {
                let h = if a.d == 1 { HoloPolynomial::power(1, n) } else { HoloPolynomial::random_homogeneous(a.d, n, seed) };
                let truncs: Vec<usize> = offsets.iter().map(|o| n + o).collect();
                let r = haagerup_ladder(q, a.d, &h, &truncs, &NormOptions { seed, ..opts.clone() })?;
                passed &= r.all_satisfied();
                t.push(vec![
                    q.into(),
                    a.d.into(),
                    n.into(),
                    seed.into(),
                    r.parameters.trunc.into(),
                    r.observed("ratio").into(),
                    bound_value(&r, "lower").into(),
                    bound_value(&r, "upper").into(),
                    r.convergence.into(),
                    r.all_satisfied().into(),
                ]);
            }
        }
    }
    Ok(Outcome { table: t, passed })
}

fn parse_pattern(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--pattern expects \"m,n\" with positive integers, got {s:?}"));
    let (m, n) = s.split_once(',').ok_or_else(bad)?;
    let m: usize = m.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if m == 0 || n == 0 {
        return Err(bad());
    }
    Ok((m, n))
}

pub fn moments(a: &MomentsArgs) -> Result<Outcome, CliError> {
    let k = constants(a.q, DEFAULT_SERIES_TOL)?;
    let mut t = Table::new(&["pattern", "q", "combinatorial", "trace", "delta", "bound_rhs", "satisfied"]);
    let mut passed = true;
    if let Some(word) = &a.word {
        let sw = StarWord::parse(word)?;
        if sw.len() > WORD_BUDGET {
            return Err(CliError::Usage(format!("star-word length {} exceeds the budget {WORD_BUDGET}", sw.len())));
        }
        let row = if sw.is_empty() {
            (1.0, 1.0, 0.0)
        } else {
            let ctx = QContext::new(a.q, sw.max_generator(), sw.len().div_ceil(2).max(1))?;
            let c = moment_vs_trace(&ctx, &sw)?;
            (c.combinatorial, c.trace, c.delta)
        };
        let ok = row.2.abs() < 1e-10;
        passed &= ok;
        t.push(vec![sw.to_string().into(), a.q.into(), row.0.into(), row.1.into(), row.2.into(), Cell::Empty, ok.into()]);
    }
    if let Some(p) = &a.pattern {
        let (m, n) = parse_pattern(p)?;
        if m * n > MOMENT_BOUND_BUDGET {
            return Err(CliError::Usage(format!(
                "pattern m·n = {} exceeds the enumeration budget {MOMENT_BOUND_BUDGET}",
                m * n
            )));
        }
        let sw = StarWord::pattern(m, n);
        let ctx = QContext::new(a.q, 1, m * n)?;
        let c = moment_vs_trace(&ctx, &sw)?;
        let r = moment_bound_check(a.q, m, n, a.a.unwrap_or(k.a_haagerup))?;
        let ok = c.delta.abs() < 1e-10 && r.all_satisfied();
        passed &= ok;
        t.push(vec![
            format!("{m},{n}").into(),
            a.q.into(),
            c.combinatorial.into(),
            c.trace.into(),
            c.delta.into(),
            bound_value(&r, "upper").into(),
            ok.into(),
        ]);
    }
    Ok(Outcome { table: t, passed })
}

pub fn ultra(a: &UltraArgs) -> Result<Outcome, CliError> {
    constants(a.q, DEFAULT_SERIES_TOL)?;
    let ts = sorted(a.t.clone());
    for &t in &ts {
        if !(T_PROFILE.0..=T_PROFILE.1).contains(&t) {
            return Err(CliError::Usage(format!("t = {t} is outside the supported range [{}, {}]", T_PROFILE.0, T_PROFILE.1)));
        }
    }
    let mut table = Table::new(&[
        "t",
        "degree_cut",
        "psi_norm_sq",
        "analytic_psi",
        "coefficient_delta",
        "hh_norm_sq",
        "chain_lower",
        "lower_bound",
        "observed",
        "upper_bound",
        "cauchy_schwarz_upper",
        "satisfied",
    ]);
    let mut passed = true;
    for &t in &ts {
        let cut = match a.degree_cut {
            Some(c) => c,
            None => tail_degree_cut(t)?,
        };
        let ctx = QContext::new(a.q, 1, (2 * cut).max(1))?;
        let r = ultracontractivity_experiment(&ctx, t, cut)?;
        let ok = r.all_satisfied()
            && r.observed("psi_delta").is_some_and(|d| d < 1e-10)
            && r.observed("coefficient_delta").is_some_and(|d| d < 1e-9);
        passed &= ok;
        table.push(vec![
            t.into(),
            cut.into(),
            r.observed("psi_norm_sq").into(),
            r.observed("psi_norm_sq_analytic").into(),
            r.observed("coefficient_delta").into(),
            r.observed("hh_norm_sq").into(),
            bound_value(&r, "hh_lower").into(),
            bound_value(&r, "lower").into(),
            r.observed("ratio").into(),
            bound_value(&r, "upper").into(),
            bound_value(&r, "cauchy_schwarz_upper").into(),
            ok.into(),
        ]);
    }
    Ok(Outcome { table, passed })
}
