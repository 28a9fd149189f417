use std::fs;
use std::path::{Path, PathBuf};

use gauss_nclass::gaussian::{RawCovariance, RawMoments};
use gauss_nclass::pfunc::{scan_cut, scan_marginal, GridSpec, MixtureParams, Mode};
use gauss_nclass::study::records_to_csv;
use gauss_nclass::{
    measure_all, reduce_to_standard_form, relation_analysis, run_study, simon_separable, validate, CovarianceMatrix,
    Error, SamplerConfig, StandardMoments,
};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::args::{McStudyArgs, PfuncCutArgs, SliceKind, StateArgs};

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Unphysical(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Unphysical(_) => 3,
            Failure::Solver(_) => 4,
            Failure::Io(_) => 5,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Asymmetric { .. }
            | Error::Unphysical { .. }
            | Error::NonFinite { .. }
            | Error::NonStandardForm { .. }
            | Error::InvalidMoments(_)
            | Error::LocallyNonclassical { .. }
            | Error::NumericalDegeneracy { .. } => Failure::Unphysical(msg),
            Error::NoConvergence { .. }
            | Error::AmbiguousRoots { .. }
            | Error::Bracket(_)
            | Error::TooFewRecords { .. } => Failure::Solver(msg),
            Error::Domain(_)
            | Error::DegenerateState { .. }
            | Error::InvalidConfig(_)
            | Error::NotSymplectic { .. } => Failure::Usage(msg),
        }
    }
}

pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, Failure> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, json: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

pub fn pfunc_cut(args: PfuncCutArgs) -> Result<(), Failure> {
    let (beta_re, p) = if args.paper_params {
        if args.beta.is_some() || args.p.is_some() {
            return Err(Failure::Usage("--paper-params cannot be combined with --beta or --p".into()));
        }
        eprintln!(
            "note: --paper-params uses beta = 2, p = 3/4; with p > 1/2 the mode-b marginal is negative \
             near the origin, so this state does not have two classical marginals (--complementary gives p = 1/4)"
        );
        (2.0, 0.75)
    } else {
        let beta = args.beta.ok_or_else(|| Failure::Usage("--beta is required (or --paper-params)".into()))?;
        let p = args.p.ok_or_else(|| Failure::Usage("--p is required (or --paper-params)".into()))?;
        (beta, p)
    };
    let mut params = MixtureParams::new(Complex64::new(beta_re, args.beta_im.unwrap_or(0.0)), p)?;
    if args.complementary {
        params = params.complementary();
    }
    let default = GridSpec::cut_default();
    let grid = GridSpec::new(
        default.center,
        args.half_width.unwrap_or(default.half_width),
        args.points.unwrap_or(default.points_per_axis),
    )?;
    let slice = match args.slice.unwrap_or_default() {
        SliceKind::Joint => scan_cut(&params, &grid, &grid),
        SliceKind::MarginalA => scan_marginal(&params, Mode::A, &grid),
        SliceKind::MarginalB => scan_marginal(&params, Mode::B, &grid),
    };
    let csv_path = args.out.unwrap_or_else(|| PathBuf::from("pfunc_cut.csv"));
    let summary_path = args.summary.unwrap_or_else(|| csv_path.with_extension("json"));
    write(&csv_path, &slice.to_csv())?;
    write(&summary_path, &to_json(&slice.summary()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateFile {
    Covariance(RawCovariance<f64>),
    Moments(RawMoments<f64>),
}

fn load_state(args: &StateArgs) -> Result<CovarianceMatrix, Failure> {
    if let Some(r) = args.tmsv {
        if !r.is_finite() {
            return Err(Failure::Usage(format!("--tmsv must be finite, got {r}")));
        }
        return Ok(CovarianceMatrix::tmsv(r));
    }
    let path = args.state.as_ref().ok_or_else(|| Failure::Usage("give --state FILE or --tmsv R".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let parsed: StateFile = serde_json::from_str(&text).map_err(|_| {
        Failure::Unphysical(format!(
            "{}: expected {{\"sigma\": 4x4 array}} or the six moments m1, m2, n1, n2, c1, c2",
            path.display()
        ))
    })?;
    match parsed {
        StateFile::Covariance(raw) => {
            let report = validate(&raw.sigma)?;
            if !report.physical {
                return Err(Failure::Unphysical(format!(
                    "state is unphysical: {}",
                    serde_json::to_string(&report).unwrap()
                )));
            }
            Ok(CovarianceMatrix::new(raw.sigma)?)
        }
        StateFile::Moments(raw) => {
            Ok(StandardMoments::new(raw.m1, raw.m2, raw.n1, raw.n2, raw.c1, raw.c2)?.to_covariance())
        }
    }
}

pub fn measures(args: StateArgs) -> Result<(), Failure> {
    let sigma = load_state(&args)?;
    let (moments, _) = reduce_to_standard_form(&sigma)?;
    emit(args.out.as_deref(), &to_json(&measure_all(&moments)?))
}

#[derive(Serialize)]
struct CanonicalOutput {
    canonical: gauss_nclass::Canonical,
    p_positive: bool,
    simon_separable: bool,
    verdicts_agree: bool,
}

pub fn canonicalize(args: StateArgs) -> Result<(), Failure> {
    let sigma = load_state(&args)?;
    let canonical = gauss_nclass::canonicalize(&sigma)?;
    if !canonical.converged {
        return Err(Failure::Solver(format!(
            "squeezing solver did not converge: residuals ({:e}, {:e})",
            canonical.residual_11, canonical.residual_14
        )));
    }
    let p_positive = canonical.p_positive();
    let separable = simon_separable(&sigma);
    let out =
        CanonicalOutput { canonical, p_positive, simon_separable: separable, verdicts_agree: p_positive == separable };
    emit(args.out.as_deref(), &to_json(&out))
}

pub fn mc_study(args: McStudyArgs) -> Result<(), Failure> {
    let seed = args.seed.unwrap_or(1);
    let count = args.count.unwrap_or(10_000);
    if count < gauss_nclass::study::MIN_RECORDS {
        return Err(Failure::Usage(format!(
            "--count must be at least {}, got {count}",
            gauss_nclass::study::MIN_RECORDS
        )));
    }
    let config = if args.symmetric {
        SamplerConfig::symmetric_subclass(seed, count)
    } else {
        let d = SamplerConfig::default();
        SamplerConfig {
            seed,
            count,
            max_squeeze: args.max_squeeze.unwrap_or(d.max_squeeze),
            max_thermal: args.max_thermal.unwrap_or(d.max_thermal),
            mix_passive: !args.no_mix,
            max_local_squeeze: args.max_local_squeeze.unwrap_or(d.max_local_squeeze),
        }
    };
    let records = run_study(&config)?;
    let report = relation_analysis(&records)?;
    let failed = records.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        eprintln!("warning: {failed} of {count} states did not canonicalize; they are kept with converged = false");
    }
    write(&args.out.unwrap_or_else(|| PathBuf::from("study.csv")), &records_to_csv(&records))?;
    write(&args.report.unwrap_or_else(|| PathBuf::from("study_report.json")), &to_json(&report))
}
