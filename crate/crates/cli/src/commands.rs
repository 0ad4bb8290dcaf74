use crate::Common;
use clap::{Args, ValueEnum};
use designkit::hamiltonian::{design_repetitions, design_time, hamiltonian_moment, GridChoice};
use designkit::moment::tpe_eta;
use designkit::mub::{fourier_pair, pauli_xz_pair};
use designkit::permcheck::{lambda_count_with, lambda_growth, IndexFamily, SweepOptions};
use designkit::rdc::{
    eta_tilde, rdc_iterated_moment, rdc_moment, resource_count, CircuitDocument, CircuitSpec, FamilyDescriptor,
    PhaseModel,
};
use designkit::report::{CheckRecord, Report};
use designkit::suite::{verify_all, SuiteConfig, SuiteScope};
use designkit::{Budget, Error, Result};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PairKind {
    Fourier,
    Pauli,
}

#[derive(Args, Debug)]
pub struct EtaArgs {
    #[arg(long, value_enum, default_value_t = PairKind::Fourier)]
    pub pair: PairKind,
    /// Dimensions (fourier) or qubit counts (pauli).
    #[arg(long, short = 'd', alias = "N", short_alias = 'N', value_delimiter = ',', required = true)]
    pub size: Vec<usize>,
    #[arg(long, short = 't')]
    pub t: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhaseArg {
    Continuous,
    Discrete,
}

#[derive(Args, Debug)]
pub struct CircuitArgs {
    #[arg(long = "N", short = 'N')]
    pub n: Option<usize>,
    #[arg(long, short = 't')]
    pub t: Option<usize>,
    /// `I<r>`, `full`, or a JSON list such as `[[1,2],[2,3]]`.
    #[arg(long, default_value = "I2")]
    pub family: String,
    #[arg(long, value_enum, default_value_t = PhaseArg::Continuous)]
    pub phase: PhaseArg,
    #[arg(long)]
    pub a: Option<u32>,
    #[arg(long)]
    pub b: Option<u32>,
    /// Repetitions `ℓ`.
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    /// A circuit JSON document; overrides the flags above.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
}

impl CircuitArgs {
    fn document(&self) -> Result<CircuitDocument> {
        if let Some(p) = &self.circuit {
            return Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?);
        }
        let (Some(n), Some(t)) = (self.n, self.t) else {
            return Err(Error::InvalidArgument("--N and --t are required without --circuit".into()));
        };
        let phase_model = match self.phase {
            PhaseArg::Continuous => PhaseModel::Continuous,
            PhaseArg::Discrete => PhaseModel::FactoredDiscrete {
                a: self.a.unwrap_or(t as u32 + 1),
                b: self.b.unwrap_or(t as u32 / 2 + 1),
            },
        };
        Ok(CircuitDocument { n_qubits: n, t, family: parse_family(&self.family)?, phase_model, repetitions: self.ell })
    }
}

pub fn parse_family(s: &str) -> Result<FamilyDescriptor> {
    if s.trim_start().starts_with('[') {
        Ok(FamilyDescriptor::Explicit(serde_json::from_str(s)?))
    } else {
        Ok(FamilyDescriptor::Named(s.to_string()))
    }
}

#[derive(Args, Debug)]
pub struct EtaTildeArgs {
    #[command(flatten)]
    pub circuit: CircuitArgs,
}

#[derive(Args, Debug)]
pub struct LambdaArgs {
    #[arg(long, short = 't')]
    pub t: usize,
    #[arg(long = "N", short = 'N', value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value = "I2")]
    pub family: String,
    /// Sweep `N = 2 ..= max(N)` with the 2-local family and report growth ratios.
    #[arg(long)]
    pub growth: bool,
    /// Resumable checkpoint file for long sweeps.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CompareKind {
    /// Discrete-phase against continuous-phase layer moment.
    Discrete,
    /// Hamiltonian ensemble against iterated circuit moment.
    Hamiltonian,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GridArg {
    Proof,
    SymmetricLattice,
    SymmetricInteger,
}

impl From<GridArg> for GridChoice {
    fn from(g: GridArg) -> Self {
        match g {
            GridArg::Proof => GridChoice::Proof,
            GridArg::SymmetricLattice => GridChoice::SymmetricLattice,
            GridArg::SymmetricInteger => GridChoice::SymmetricInteger,
        }
    }
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long, value_enum)]
    pub kind: CompareKind,
    #[arg(long = "N", short = 'N')]
    pub n: usize,
    #[arg(long, short = 't')]
    pub t: usize,
    #[arg(long)]
    pub a: Option<u32>,
    #[arg(long)]
    pub b: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    #[arg(long, value_enum, default_value_t = GridArg::Proof)]
    pub grid: GridArg,
}

#[derive(Args, Debug)]
pub struct DesignTimeArgs {
    #[arg(long, short = 't', value_delimiter = ',', required = true)]
    pub t: Vec<usize>,
    #[arg(long = "N", short = 'N', value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub eps: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct ResourcesArgs {
    #[arg(long = "N", short = 'N', value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, short = 't', value_delimiter = ',', required = true)]
    pub t: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub eps: Vec<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Small,
    Full,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long = "budget", value_enum, default_value_t = ScopeArg::Small)]
    pub scope: ScopeArg,
    /// Run only these criteria (0 is the regression block).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
}

fn eps_ok(eps: &[f64]) -> Result<()> {
    match eps.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
        Some(e) => Err(Error::InvalidArgument(format!("eps = {e} outside (0, 1]"))),
        None => Ok(()),
    }
}

fn positive(name: &str, xs: &[usize]) -> Result<()> {
    if xs.contains(&0) {
        return Err(Error::InvalidArgument(format!("{name} must be positive")));
    }
    Ok(())
}

fn report(name: &str, common: &Common) -> Report {
    Report::new(name, common.seed, rayon::current_num_threads())
}

fn eta(args: &EtaArgs, common: &Common, budget: &Budget) -> Result<Report> {
    positive("t", &[args.t])?;
    positive("size", &args.size)?;
    let mut r = report("eta", common);
    for &s in &args.size {
        let start = Instant::now();
        let (pair, key) = match args.pair {
            PairKind::Fourier => (fourier_pair(s)?, "d"),
            PairKind::Pauli => (pauli_xz_pair(s, budget)?, "N"),
        };
        let e = tpe_eta(&pair, args.t, budget)?;
        let rec = CheckRecord::new(0, format!("{:?} expander gap", args.pair).to_lowercase(), "Fourier-type expander gap")
            .param(key, s)
            .param("t", args.t)
            .param("subspace_dim", e.subspace_dim)
            .param("leading_term", e.leading_term);
        r.checks.push(match e.bound {
            Some(b) => rec.at_most(e.eta, b, 0.0),
            None => rec.holds(Some(e.eta), (0.0..=1.0 + 1e-9).contains(&e.eta)).note("leading term not below 1"),
        }.timed(start));
    }
    Ok(r)
}

fn eta_tilde_cmd(args: &EtaTildeArgs, common: &Common, budget: &Budget) -> Result<Report> {
    let doc = args.circuit.document()?;
    let spec = doc.spec()?;
    let start = Instant::now();
    let e = eta_tilde(&spec, doc.t, budget)?;
    let mut r = report("eta-tilde", common);
    let rec = CheckRecord::new(0, "circuit gap within the defect bound", "diagonal-circuit gap bound")
        .param("N", doc.n_qubits)
        .param("t", doc.t)
        .param("family", spec.family()?.label())
        .param("eta", e.eta)
        .param("lambda", e.lambda);
    r.checks.push(if e.lemma5_bound < 1.0 {
        rec.at_most(e.eta_tilde_exact, e.lemma5_bound, 1e-9)
    } else {
        rec.holds(Some(e.eta_tilde_exact), true).note("bound not below 1")
    }.timed(start));
    Ok(r)
}

fn lambda(args: &LambdaArgs, common: &Common, budget: &Budget) -> Result<Report> {
    positive("t", &[args.t])?;
    positive("N", &args.n)?;
    let mut r = report("lambda", common);
    let tf: f64 = (1..=args.t).map(|x| x as f64).product();
    if args.growth {
        let n_max = *args.n.iter().max().unwrap_or(&2);
        for p in lambda_growth(args.t, n_max, budget)? {
            let mut rec = CheckRecord::new(0, "lambda2 growth", "two-local permutation defect")
                .param("t", p.t)
                .param("N", p.n)
                .param("family", "I2")
                .param("pair_bound", p.pair_bound);
            if let Some(x) = p.ratio {
                rec = rec.param("ratio", x);
            }
            r.checks.push(rec.at_most(p.lambda as f64, p.isometry_bound, 0.0));
        }
        return Ok(r);
    }
    for &n in &args.n {
        let start = Instant::now();
        let fam = parse_family(&args.family)?.resolve(n)?;
        let progress = |done: u64, total: u64| eprintln!("lambda t={} N={n}: {done}/{total}", args.t);
        let opts = SweepOptions { checkpoint: args.checkpoint.as_deref(), progress: Some(&progress), stop_after: None };
        let l = lambda_count_with(args.t, n, &fam, budget, opts)?.expect("no stop requested");
        let iso = 2f64.powi((2 * args.t * args.t + (args.t - 1) * n) as i32);
        let mut rec = CheckRecord::new(0, "lambda", "two-local permutation defect")
            .param("t", args.t)
            .param("N", n)
            .param("family", fam.label())
            .param("ratio_to_2^((t-1)N)", l as f64 / 2f64.powi(((args.t - 1) * n) as i32));
        rec = if fam.label() == "I2" && args.t <= 3 {
            rec.param("isometry_bound", iso).at_most(l as f64, 0.0, 0.0).note("2-local pairs are row permutations for t ≤ 3")
        } else if fam.label() == "I2" {
            let pair = tf * tf * 8f64.powi(n as i32);
            rec.param("pair_bound", pair).at_most(l as f64, iso.min(pair), 0.0)
        } else {
            rec.holds(Some(l as f64), true)
        };
        r.checks.push(rec.timed(start));
    }
    Ok(r)
}

fn compare(args: &CompareArgs, common: &Common, budget: &Budget) -> Result<Report> {
    positive("N", &[args.n])?;
    positive("t", &[args.t])?;
    let (n, t) = (args.n, args.t);
    let fam = IndexFamily::complete(n, 2)?;
    let mut r = report("moment-compare", common);
    let start = Instant::now();
    match args.kind {
        CompareKind::Discrete => {
            let a = args.a.unwrap_or(t as u32 + 1);
            let b = args.b.unwrap_or(t as u32 / 2 + 1);
            let cont = rdc_moment(&CircuitSpec::from_family(&fam, PhaseModel::Continuous, 0)?, t, budget)?;
            let disc = rdc_moment(&CircuitSpec::from_family(&fam, PhaseModel::FactoredDiscrete { a, b }, 0)?, t, budget)?;
            let differing = (0..cont.indicator.len()).filter(|&i| cont.indicator.get(i) != disc.indicator.get(i)).count();
            let diff = if differing > 0 { 1.0 } else { 0.0 };
            let rec = CheckRecord::new(0, "discrete against continuous layer moment", "discrete-phase equality")
                .param("N", n)
                .param("t", t)
                .param("a", a)
                .param("b", b)
                .param("differing_labels", differing);
            r.checks.push(if a as usize > t && b as usize > t / 2 {
                rec.at_most(diff, 0.0, 1e-12)
            } else {
                rec.holds(Some(diff), true).note("below the thresholds; difference reported")
            }.timed(start));
        }
        CompareKind::Hamiltonian => {
            let grid: GridChoice = args.grid.into();
            let h = hamiltonian_moment(n, t, args.ell, grid, budget)?;
            let c = rdc_iterated_moment(&CircuitSpec::from_family(&fam, PhaseModel::Continuous, args.ell)?, t, budget)?;
            let diff = h.max_abs_diff(&c)?;
            let rec = CheckRecord::new(0, "hamiltonian against iterated circuit moment", "design Hamiltonian moment equality")
                .param("N", n)
                .param("t", t)
                .param("ell", args.ell)
                .param("grid", serde_json::to_value(grid)?);
            r.checks.push(if grid == GridChoice::SymmetricInteger {
                rec.holds(Some(diff), true).note("integer grid reading; difference reported")
            } else {
                rec.at_most(diff, 0.0, 1e-10)
            }.timed(start));
        }
    }
    Ok(r)
}

fn design_time_cmd(args: &DesignTimeArgs, common: &Common) -> Result<Report> {
    positive("t", &args.t)?;
    positive("N", &args.n)?;
    eps_ok(&args.eps)?;
    let mut r = report("design-time", common);
    for &t in &args.t {
        for &n in &args.n {
            for &eps in &args.eps {
                let t0 = design_time(t, n, eps)?;
                r.checks.push(
                    CheckRecord::new(0, "design time", "design time of the XZ Hamiltonian")
                        .param("t", t)
                        .param("N", n)
                        .param("eps", eps)
                        .param("T0_over_pi", t0 / std::f64::consts::PI)
                        .param("lattice_ell", design_repetitions(t, n, eps)?)
                        .holds(Some(t0), t0.is_finite() && t0 > 0.0),
                );
            }
        }
    }
    Ok(r)
}

fn resources_cmd(args: &ResourcesArgs, common: &Common) -> Result<Report> {
    positive("t", &args.t)?;
    eps_ok(&args.eps)?;
    if args.n.iter().any(|&n| n < 2) {
        return Err(Error::InvalidArgument("N must be at least 2".into()));
    }
    let mut r = report("resources", common);
    for &n in &args.n {
        for &t in &args.t {
            for &eps in &args.eps {
                let x = resource_count(n, t, eps)?;
                r.checks.push(
                    CheckRecord::new(0, "circuit resources", "discrete diagonal circuit resources")
                        .param("N", n)
                        .param("t", t)
                        .param("eps", eps)
                        .param("repetitions", x.repetitions)
                        .param("two_qubit_gates", x.two_qubit_gates)
                        .param("hadamard_layers", x.hadamard_layers)
                        .param("random_bits", x.random_bits)
                        .param("random_bits_real", x.random_bits_real)
                        .param("random_bits_bound", x.random_bits_bound)
                        .holds(Some(x.two_qubit_gates as f64), x.random_bits_real <= x.random_bits_bound),
                );
            }
        }
    }
    Ok(r)
}

pub fn dispatch(cmd: &crate::Command, common: &Common, budget: &Budget) -> Result<Report> {
    use crate::Command::*;
    match cmd {
        Eta(a) => eta(a, common, budget),
        EtaTilde(a) => eta_tilde_cmd(a, common, budget),
        Lambda(a) => lambda(a, common, budget),
        MomentCompare(a) => compare(a, common, budget),
        DesignTime(a) => design_time_cmd(a, common),
        Resources(a) => resources_cmd(a, common),
        VerifyAll(a) => {
            let scope = match a.scope {
                ScopeArg::Small => SuiteScope::Small,
                ScopeArg::Full => SuiteScope::Full,
            };
            let mut cfg = SuiteConfig::new(scope, common.seed, budget.clone());
            cfg.only = a.only.clone();
            if let Some(bad) = cfg.only.iter().find(|c| **c > 11) {
                return Err(Error::InvalidArgument(format!("no criterion {bad}")));
            }
            verify_all(&cfg)
        }
    }
}
