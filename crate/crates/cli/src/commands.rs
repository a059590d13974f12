//! One function per subcommand, each producing a [`Report`].

use std::path::Path;

use collapse_core::cat_scenario::{run_story, StageReport};
use collapse_core::lhv::{chsh_exact, random_model, ChshPairing, ChshSettings, LhvModel, CLASSICAL_BOUND};
use collapse_core::mc_harness::{run_trials, StreamSpec};
use collapse_core::measurement::{
    born_distribution, dephasing_channel, position_projectors, ring_momentum_projectors,
    spin_projectors, Label,
};
use collapse_core::monty::{posterior, simulate_game, win_probability, MontyInstance, Strategy};
use collapse_core::qlin::{ComplexMatrix, PureState, TensorSpace};
use collapse_core::quantum_bell::{
    chsh_terms, correlation, empirical_chsh, empirical_correlation, CorrelationReport, TSIRELSON_BOUND,
};
use collapse_core::{Angle, Complex64, Error};
use rand::Rng;
use serde::Serialize;

use crate::report::{complex, full, full_opt, matrix_table, sig7, sig7_opt, Report, Table};

/// Knobs shared by every command.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: u64,
    pub workers: usize,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit code 1.
    Usage(String),
    /// A check that should never fail; exit code 2.
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => CliError::Internal(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CmdResult = std::result::Result<Report, CliError>;

// chsh-quantum

#[derive(Serialize)]
struct ChshTerm {
    sign: f64,
    #[serde(flatten)]
    correlation: CorrelationReport,
}

#[derive(Serialize)]
struct ChshQuantumBody {
    command: &'static str,
    settings: ChshSettings,
    exact: f64,
    abs_exact: f64,
    tsirelson_bound: f64,
    classical_bound: f64,
    seed: u64,
    n_trials_per_term: u64,
    empirical: Option<f64>,
    stderr: Option<f64>,
    terms: Vec<ChshTerm>,
}

pub fn chsh_quantum(cfg: RunConfig, settings: ChshSettings) -> CmdResult {
    let exact_terms = chsh_terms(settings);
    let exact: f64 = exact_terms.iter().map(|(s, r)| s * r.exact_value).sum();
    let (terms, empirical, stderr) = if cfg.trials > 0 {
        let est = empirical_chsh(settings, cfg.trials, cfg.seed, cfg.workers)?;
        let terms = exact_terms
            .iter()
            .zip(est.terms)
            .map(|((sign, _), correlation)| ChshTerm { sign: *sign, correlation })
            .collect();
        (terms, Some(est.empirical), Some(est.stderr))
    } else {
        let terms = exact_terms.iter().map(|(sign, r)| ChshTerm { sign: *sign, correlation: *r }).collect();
        (terms, None, None)
    };
    let body = ChshQuantumBody {
        command: "chsh-quantum",
        settings,
        exact,
        abs_exact: exact.abs(),
        tsirelson_bound: TSIRELSON_BOUND,
        classical_bound: CLASSICAL_BOUND,
        seed: cfg.seed,
        n_trials_per_term: cfg.trials,
        empirical,
        stderr,
        terms,
    };

    let mut t = Table::new("CHSH correlations", &["sign", "theta_a", "theta_b", "exact", "closed form", "empirical", "stderr"]);
    let mut csv = Table::new("", &["sign", "theta_a_deg", "theta_b_deg", "exact", "closed_form", "empirical", "stderr", "n"]);
    for term in &body.terms {
        let c = &term.correlation;
        t.row(vec![
            if term.sign > 0.0 { "+" } else { "-" }.into(),
            sig7(c.theta_a.degrees()),
            sig7(c.theta_b.degrees()),
            sig7(c.exact_value),
            sig7(c.closed_form),
            sig7_opt(c.empirical),
            sig7_opt(c.stderr),
        ]);
        csv.row(vec![
            full(term.sign),
            full(c.theta_a.degrees()),
            full(c.theta_b.degrees()),
            full(c.exact_value),
            full(c.closed_form),
            full_opt(c.empirical),
            full_opt(c.stderr),
            c.n_trials.map(|n| n.to_string()).unwrap_or_default(),
        ]);
    }
    let mut s = Table::new("CHSH value", &["quantity", "value"]);
    s.row(vec!["S (exact)".into(), sig7(exact)]);
    s.row(vec!["|S| (exact)".into(), sig7(exact.abs())]);
    s.row(vec!["2 sqrt 2".into(), sig7(TSIRELSON_BOUND)]);
    s.row(vec!["classical bound".into(), sig7(CLASSICAL_BOUND)]);
    if let (Some(e), Some(se)) = (empirical, stderr) {
        s.row(vec![format!("S (empirical, {} trials per term)", cfg.trials), format!("{} +- {}", sig7(e), sig7(se))]);
    }
    Ok(Report::new(&body, vec![t, s], csv))
}

// chsh-lhv

pub enum LhvSource<'a> {
    File(&'a Path),
    Random { count: u64, max_lambdas: usize },
}

#[derive(Serialize)]
struct LhvModelRow {
    index: u64,
    n_lambdas: usize,
    s: f64,
}

#[derive(Serialize)]
struct ChshLhvBody {
    command: &'static str,
    source: &'static str,
    seed: u64,
    pairing: ChshPairing,
    n_models: u64,
    max_abs_s: f64,
    classical_bound: f64,
    within_bound: bool,
    models: Vec<LhvModelRow>,
}

const BOUND_SLACK: f64 = 1e-12;

/// Model `index` of a random fleet: its own stream, 1 to `max_lambdas` hidden states.
pub fn fleet_model(seed: u64, index: u64, max_lambdas: usize) -> collapse_core::Result<LhvModel> {
    let mut rng = StreamSpec::new(seed, index).trial_rng(0);
    let n = rng.random_range(1..=max_lambdas);
    random_model(n, ChshSettings::maximal_violation(), &mut rng)
}

pub fn load_model(path: &Path) -> std::result::Result<LhvModel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid model {}: {e}", path.display())))
}

pub fn chsh_lhv(cfg: RunConfig, source: LhvSource, pairing: ChshPairing) -> CmdResult {
    let mut models = Vec::new();
    let label = match source {
        LhvSource::File(path) => {
            let model = load_model(path)?;
            models.push(LhvModelRow { index: 0, n_lambdas: model.lambdas().len(), s: chsh_exact(&model, pairing)? });
            "file"
        }
        LhvSource::Random { count, max_lambdas } => {
            if count == 0 || max_lambdas == 0 {
                return Err(CliError::Usage("--random and --max-lambdas must be at least 1".into()));
            }
            for index in 0..count {
                let model = fleet_model(cfg.seed, index, max_lambdas)?;
                models.push(LhvModelRow { index, n_lambdas: model.lambdas().len(), s: chsh_exact(&model, pairing)? });
            }
            "random"
        }
    };
    let max_abs_s = models.iter().map(|m| m.s.abs()).fold(0.0, f64::max);
    let within_bound = max_abs_s <= CLASSICAL_BOUND + BOUND_SLACK;
    let body = ChshLhvBody {
        command: "chsh-lhv",
        source: label,
        seed: cfg.seed,
        pairing,
        n_models: models.len() as u64,
        max_abs_s,
        classical_bound: CLASSICAL_BOUND,
        within_bound,
        models,
    };

    let mut csv = Table::new("", &["index", "n_lambdas", "s"]);
    for m in &body.models {
        csv.row(vec![m.index.to_string(), m.n_lambdas.to_string(), full(m.s)]);
    }
    let mut tables = Vec::new();
    if body.models.len() <= 20 {
        let mut t = Table::new("LHV models", &["model", "lambdas", "S"]);
        for m in &body.models {
            t.row(vec![m.index.to_string(), m.n_lambdas.to_string(), sig7(m.s)]);
        }
        tables.push(t);
    }
    let mut s = Table::new("Bell inequality", &["quantity", "value"]);
    s.row(vec!["models".into(), body.n_models.to_string()]);
    s.row(vec!["max |S|".into(), sig7(max_abs_s)]);
    s.row(vec!["bound".into(), sig7(CLASSICAL_BOUND)]);
    s.row(vec!["|S| <= 2".into(), within_bound.to_string()]);
    tables.push(s);
    let mut report = Report::new(&body, tables, csv);
    if !within_bound {
        report.violation = Some(format!("an LHV model reached |S| = {max_abs_s}, above the bound 2"));
    }
    Ok(report)
}

// correlations

pub const FIXED_GRID: [f64; 4] = [0.0, 45.0, 90.0, 180.0];

#[derive(Serialize)]
struct CorrelationsBody {
    command: &'static str,
    seed: u64,
    rows: Vec<CorrelationReport>,
}

pub fn correlations(cfg: RunConfig, theta_a: f64, grid: &[f64]) -> CmdResult {
    if !theta_a.is_finite() || grid.iter().any(|g| !g.is_finite()) {
        return Err(CliError::Usage("angles must be finite".into()));
    }
    let a = Angle::from_degrees(theta_a);
    let mut rows = Vec::new();
    for (i, &b) in FIXED_GRID.iter().chain(grid).enumerate() {
        let b = Angle::from_degrees(b);
        let mut r = correlation(a, b);
        if cfg.trials > 0 {
            let summary = empirical_correlation(a, b, cfg.trials, StreamSpec::new(cfg.seed, i as u64), cfg.workers)?;
            r = r.with_empirical(&summary);
        }
        rows.push(r);
    }
    let mut t = Table::new("Singlet correlations C = <ab>", &["theta_a", "theta_b", "exact", "closed form", "empirical", "stderr"]);
    let mut csv = Table::new("", &["theta_a_deg", "theta_b_deg", "exact", "closed_form", "empirical", "stderr", "n"]);
    for r in &rows {
        t.row(vec![
            sig7(r.theta_a.degrees()),
            sig7(r.theta_b.degrees()),
            sig7(r.exact_value),
            sig7(r.closed_form),
            sig7_opt(r.empirical),
            sig7_opt(r.stderr),
        ]);
        csv.row(vec![
            full(r.theta_a.degrees()),
            full(r.theta_b.degrees()),
            full(r.exact_value),
            full(r.closed_form),
            full_opt(r.empirical),
            full_opt(r.stderr),
            r.n_trials.map(|n| n.to_string()).unwrap_or_default(),
        ]);
    }
    Ok(Report::new(&CorrelationsBody { command: "correlations", seed: cfg.seed, rows }, vec![t], csv))
}

// monty

#[derive(Debug, Clone)]
pub struct MontyArgs {
    pub doors: u64,
    pub open: Option<u64>,
    pub open_all_but_one: bool,
    /// 1-based.
    pub pick: u64,
    /// 1-based.
    pub opened: Vec<u64>,
}

#[derive(Serialize)]
struct StrategyRow {
    n: u64,
    k: u64,
    strategy: Strategy,
    exact: f64,
    exact_fraction: String,
    empirical: Option<f64>,
    stderr: Option<f64>,
    n_trials: u64,
    seed: u64,
}

#[derive(Serialize)]
struct DoorProbability {
    door: u64,
    p: f64,
}

#[derive(Serialize)]
struct PosteriorBody {
    pick: u64,
    opened_count: u64,
    /// Doors left closed; every opened door has probability 0.
    closed: Vec<DoorProbability>,
}

#[derive(Serialize)]
struct MontyBody {
    command: &'static str,
    n: u64,
    k: u64,
    seed: u64,
    results: Vec<StrategyRow>,
    posterior: PosteriorBody,
}

pub fn monty(cfg: RunConfig, args: &MontyArgs) -> CmdResult {
    let n = args.doors;
    if n < 3 {
        return Err(CliError::Usage(format!("--doors must be at least 3, got {n}")));
    }
    let k = if args.open_all_but_one {
        n - 2
    } else if let Some(k) = args.open {
        k
    } else if !args.opened.is_empty() {
        args.opened.len() as u64
    } else {
        1
    };
    if k < 1 || k > n - 2 {
        return Err(CliError::Usage(format!("--open must be between 1 and {}, got {k}", n - 2)));
    }
    if args.pick < 1 || args.pick > n {
        return Err(CliError::Usage(format!("--pick must be between 1 and {n}, got {}", args.pick)));
    }
    if !args.opened.is_empty() && args.opened.len() as u64 != k {
        return Err(CliError::Usage(format!("--opened lists {} doors but the host opens {k}", args.opened.len())));
    }
    if let Some(&d) = args.opened.iter().find(|&&d| d < 1 || d > n) {
        return Err(CliError::Usage(format!("--opened door {d} is not between 1 and {n}")));
    }
    let n_us = usize::try_from(n).map_err(|_| CliError::Usage("too many doors".into()))?;
    let pick = (args.pick - 1) as usize;
    let opened: Vec<usize> = if args.opened.is_empty() {
        (0..n_us).filter(|&d| d != pick).take(k as usize).collect()
    } else {
        args.opened.iter().map(|&d| (d - 1) as usize).collect()
    };
    let inst = MontyInstance::new(n_us, pick, &opened)?;
    let post = posterior(&inst)?;

    let mut results = Vec::new();
    for (stream_id, strategy) in [(0, Strategy::Stay), (1, Strategy::Switch)] {
        let exact = win_probability(n, k, strategy)?;
        let (empirical, stderr) = if cfg.trials > 0 {
            let s = run_trials(
                |rng| f64::from(u8::from(simulate_game(n, k, strategy, rng).expect("checked parameters"))),
                cfg.trials,
                StreamSpec::new(cfg.seed, stream_id),
                cfg.workers,
            )?;
            (Some(s.mean), Some(s.stderr))
        } else {
            (None, None)
        };
        results.push(StrategyRow {
            n,
            k,
            strategy,
            exact: collapse_core::monty::ratio_to_f64(&exact),
            exact_fraction: format!("{}/{}", exact.numer(), exact.denom()),
            empirical,
            stderr,
            n_trials: cfg.trials,
            seed: cfg.seed,
        });
    }
    let closed = (0..n_us)
        .filter(|&d| !inst.is_opened(d))
        .map(|d| DoorProbability { door: d as u64 + 1, p: post[d] })
        .collect();
    let body = MontyBody {
        command: "monty",
        n,
        k,
        seed: cfg.seed,
        results,
        posterior: PosteriorBody { pick: args.pick, opened_count: k, closed },
    };

    let mut t = Table::new(format!("Monty Hall, {n} doors, host opens {k} of them"), &["strategy", "exact", "fraction", "empirical", "stderr"]);
    let mut csv = Table::new("", &["n", "k", "strategy", "exact", "empirical", "stderr", "n_trials", "seed"]);
    for r in &body.results {
        t.row(vec![
            r.strategy.name().into(),
            sig7(r.exact),
            r.exact_fraction.clone(),
            sig7_opt(r.empirical),
            sig7_opt(r.stderr),
        ]);
        csv.row(vec![
            n.to_string(),
            k.to_string(),
            r.strategy.name().into(),
            full(r.exact),
            full_opt(r.empirical),
            full_opt(r.stderr),
            r.n_trials.to_string(),
            r.seed.to_string(),
        ]);
    }
    let mut p = Table::new(
        format!("Posterior after the host opens {k} of {n} doors (closed doors only)"),
        &["door", "P(car)", "note"],
    );
    for d in &body.posterior.closed {
        let note = if d.door == args.pick { "pick" } else { "" };
        p.row(vec![d.door.to_string(), sig7(d.p), note.into()]);
    }
    Ok(Report::new(&body, vec![t, p], csv))
}

// cat

#[derive(Serialize)]
struct CatStage {
    stage: &'static str,
    #[serde(flatten)]
    report: StageReport,
}

#[derive(Serialize)]
struct CatBody {
    command: &'static str,
    time_half_lives: f64,
    stages: Vec<CatStage>,
}

pub fn cat(time: f64) -> CmdResult {
    if !time.is_finite() || time < 0.0 {
        return Err(CliError::Usage(format!("--time must be a non-negative number of half-lives, got {time}")));
    }
    let stages: Vec<CatStage> = run_story(time)?.into_iter().map(|(stage, report)| CatStage { stage, report }).collect();
    let headers = [
        "stage", "purity", "nucleus purity", "cat purity", "observer purity", "P(alive)", "P(dead)",
        "P(ignorant)", "P(happy)", "P(shocked)", "agreement",
    ];
    let mut t = Table::new(format!("Cat story, waiting {} half-lives", sig7(time)), &headers);
    let mut csv = Table::new(
        "",
        &[
            "stage", "full_purity", "nucleus_purity", "cat_purity", "observer_purity", "p_alive", "p_dead",
            "p_ignorant", "p_happy", "p_shocked", "agreement",
        ],
    );
    for s in &stages {
        let r = &s.report;
        let values = [
            r.full_purity, r.nucleus.purity, r.cat.purity, r.observer.purity, r.p_alive, r.p_dead,
            r.p_ignorant, r.p_happy, r.p_shocked, r.agreement,
        ];
        let mut row = vec![s.stage.to_string()];
        row.extend(values.iter().map(|&v| sig7(v)));
        t.row(row);
        let mut row = vec![s.stage.to_string()];
        row.extend(values.iter().map(|&v| full(v)));
        csv.row(row);
    }
    let last = &stages.last().expect("three stages").report;
    let mut j = Table::new("Joint P(cat, observer) after seeing", &["cat", "ignorant", "happy", "shocked"]);
    for (name, row) in ["alive", "dead"].iter().zip(last.joint_cat_observer) {
        j.row(vec![name.to_string(), sig7(row[0]), sig7(row[1]), sig7(row[2])]);
    }
    let body = CatBody { command: "cat", time_half_lives: time, stages };
    Ok(Report::new(&body, vec![t, j], csv))
}

// measure

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Stern-Gerlach analyzer along --angle (two amplitudes).
    Spin,
    /// Site projectors on a ring.
    Position,
    /// Fourier modes on a ring.
    Momentum,
}

/// `re` or `re:im`.
pub fn parse_amplitude(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = match s.split_once(':') {
        Some((re, im)) => (re, im),
        None => (s, "0"),
    };
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("'{s}' is not an amplitude (use re or re:im)"))
    };
    Ok(Complex64::new(parse(re)?, parse(im)?))
}

#[derive(Serialize)]
struct OutcomeRow {
    label: Label,
    p: f64,
}

#[derive(Serialize)]
struct MeasureBody {
    command: &'static str,
    basis: Basis,
    angle_deg: Option<f64>,
    dim: usize,
    state: Vec<Complex64>,
    outcomes: Vec<OutcomeRow>,
    rho_before: ComplexMatrix,
    rho_after: ComplexMatrix,
    purity_before: f64,
    purity_after: f64,
}

fn label_text(l: &Label) -> String {
    l.components().iter().map(|&v| sig7(v)).collect::<Vec<_>>().join(",")
}

pub fn measure(amplitudes: &[Complex64], basis: Basis, angle_deg: f64) -> CmdResult {
    if !angle_deg.is_finite() {
        return Err(CliError::Usage("--angle must be finite".into()));
    }
    let dim = amplitudes.len();
    if dim == 0 {
        return Err(CliError::Usage("--state needs at least one amplitude".into()));
    }
    let m = match basis {
        Basis::Spin => {
            if dim != 2 {
                return Err(CliError::Usage(format!("a spin state has 2 amplitudes, got {dim}")));
            }
            spin_projectors(Angle::from_degrees(angle_deg))
        }
        Basis::Position => position_projectors(dim)?,
        Basis::Momentum => ring_momentum_projectors(dim)?,
    };
    let space = TensorSpace::single(dim)?;
    let psi = PureState::new(space.clone(), amplitudes.to_vec())
        .or_else(|_| PureState::normalized(space, amplitudes.to_vec()))?;
    let rho = psi.density();
    let after = dephasing_channel(&rho, &m)?;
    let outcomes: Vec<OutcomeRow> = born_distribution(&rho, &m)?
        .into_iter()
        .map(|o| OutcomeRow { label: o.label, p: o.probability })
        .collect();
    let body = MeasureBody {
        command: "measure",
        basis,
        angle_deg: (basis == Basis::Spin).then_some(angle_deg),
        dim,
        state: psi.amplitudes().to_vec(),
        outcomes,
        rho_before: rho.matrix().clone(),
        rho_after: after.matrix().clone(),
        purity_before: rho.purity(),
        purity_after: after.purity(),
    };

    let mut t = Table::new("Born distribution", &["outcome", "p"]);
    let mut csv = Table::new("", &["label", "p"]);
    for o in &body.outcomes {
        t.row(vec![label_text(&o.label), sig7(o.p)]);
        csv.row(vec![
            o.label.components().iter().map(|v| full(*v)).collect::<Vec<_>>().join(";"),
            full(o.p),
        ]);
    }
    let mut p = Table::new("Purity", &["state", "tr rho^2"]);
    p.row(vec!["before".into(), sig7(body.purity_before)]);
    p.row(vec!["after dephasing".into(), sig7(body.purity_after)]);
    let amps = body.state.iter().map(|&z| complex(z)).collect::<Vec<_>>().join(", ");
    let tables = vec![
        Table::new(format!("State ({amps})"), &[]),
        t,
        matrix_table("rho before", &body.rho_before),
        matrix_table("rho after dephasing", &body.rho_after),
        p,
    ];
    Ok(Report::new(&body, tables, csv))
}
