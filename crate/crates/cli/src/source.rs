//! Resolution of the family flags into a weight or a lambda sequence.

use std::path::PathBuf;

use clap::Args;
use involute::exactnum::parse_rational;
use involute::transform::{is_stochastic, pl_matrix};
use involute::walk::transition_matrix;
use involute::weights::CustomWeight;
use involute::{LambdaSeq, Matrix, Rational, WalkMatrix, WeightSpec};

use crate::CliError;

/// Exactly one of these selects the walk.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Weight gamma^(a,b)
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    pub gamma: Option<Vec<String>>,
    /// Weight gamma^(c)
    #[arg(long, value_name = "C")]
    pub gammac: Option<String>,
    /// Weight delta^(a',b')
    #[arg(long, num_args = 2, value_names = ["A_PRIME", "B_PRIME"])]
    pub delta: Option<Vec<String>>,
    /// Eigenvalue sequence lambda_0,...,lambda_{n-1}
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// CSV file of `y,x,weight` rows
    #[arg(long, value_name = "FILE")]
    pub custom: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub enum Source {
    Weight(WeightSpec, usize),
    Lambda(LambdaSeq),
}

fn rational(s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(CliError::from)
}

impl SourceArgs {
    pub fn resolve(&self, n: Option<usize>) -> Result<Source, CliError> {
        let need_n = || n.ok_or_else(|| CliError::Validation("--n is required for this family".into()));
        if let Some(v) = &self.gamma {
            let spec = WeightSpec::gamma_ab(rational(&v[0])?, rational(&v[1])?)?;
            return Ok(Source::Weight(spec, need_n()?));
        }
        if let Some(c) = &self.gammac {
            return Ok(Source::Weight(WeightSpec::gamma_c(rational(c)?)?, need_n()?));
        }
        if let Some(v) = &self.delta {
            let spec = WeightSpec::delta_ab(rational(&v[0])?, rational(&v[1])?)?;
            return Ok(Source::Weight(spec, need_n()?));
        }
        if let Some(list) = &self.lambda {
            let lambda = LambdaSeq::parse(list)?;
            if let Some(n) = n {
                if n != lambda.len() {
                    return Err(CliError::Validation(format!(
                        "--n {n} disagrees with {} lambda values",
                        lambda.len()
                    )));
                }
            }
            return Ok(Source::Lambda(lambda));
        }
        let path = self.custom.as_ref().expect("clap enforces one source");
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let w = CustomWeight::from_csv(&text)?;
        let size = n.unwrap_or(w.n());
        if size != w.n() {
            return Err(CliError::Validation(format!("--n {size} disagrees with the {}-state table", w.n())));
        }
        Ok(Source::Weight(WeightSpec::Custom(w), size))
    }
}

impl Source {
    pub fn n(&self) -> usize {
        match self {
            Source::Weight(_, n) => *n,
            Source::Lambda(l) => l.len(),
        }
    }

    pub fn named(&self) -> Option<&WeightSpec> {
        match self {
            Source::Weight(s, _) if s.is_named() => Some(s),
            _ => None,
        }
    }

    /// `P` without requiring it to be stochastic.
    pub fn raw_matrix(&self) -> Result<Matrix, CliError> {
        match self {
            Source::Weight(s, n) => Ok(transition_matrix(s, *n)?.p().clone()),
            Source::Lambda(l) => Ok(pl_matrix(l)),
        }
    }

    /// The walk, failing with the stochasticity witness for a lambda
    /// sequence that does not define one.
    pub fn walk(&self) -> Result<WalkMatrix, CliError> {
        match self {
            Source::Weight(s, n) => Ok(transition_matrix(s, *n)?),
            Source::Lambda(l) => {
                let st = is_stochastic(l);
                if !st.stochastic {
                    return Err(involute::Error::NotStochastic { witness: st.witness }.into());
                }
                Ok(WalkMatrix::from_transition(pl_matrix(l))?)
            }
        }
    }
}
