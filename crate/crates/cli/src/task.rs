//! JSON task files.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;
use suffdata::{standardize, Dataset, GeneralLP, Matrix, ObservationVector, QueryBasis, StandardLP, UncertaintySet};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rows {
    pub lhs: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

/// Variable bounds. A `null` upper bound means `+∞`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<Option<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostSet {
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Hpoly {
        g: Vec<Vec<f64>>,
        h: Vec<f64>,
    },
    Affine {
        phi: Vec<Vec<f64>>,
        alpha_lower: Vec<f64>,
        alpha_upper: Vec<f64>,
        eta: f64,
    },
    Unrestricted,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub n_vars: usize,
    pub ineq: Option<Rows>,
    pub eq: Option<Rows>,
    pub bounds: Option<Bounds>,
    pub uncertainty: CostSet,
    pub dataset: Option<Vec<Vec<f64>>>,
    pub observations: Option<Vec<f64>>,
    /// Columns of the allowed query basis; the identity when absent.
    pub query_basis: Option<Vec<Vec<f64>>>,
}

/// A loaded and validated task.
pub struct Task {
    pub lp: StandardLP,
    pub c_set: UncertaintySet,
    pub dataset: Option<Dataset>,
    pub observations: Option<Vec<f64>>,
    pub query_basis: QueryBasis,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Parses JSON, naming the offending key on failure.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        anyhow::anyhow!("{}: at `{}`: {}", path.display(), key, e.inner())
    })
}

fn matrix(rows: &[Vec<f64>], cols: usize) -> Result<Matrix> {
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, cols));
    }
    Ok(Matrix::from_rows(rows, cols)?)
}

fn rows(r: Option<&Rows>, n: usize) -> Result<(Matrix, Vec<f64>)> {
    match r {
        None => Ok((Matrix::zeros(0, n), vec![])),
        Some(r) => Ok((matrix(&r.lhs, n)?, r.rhs.clone())),
    }
}

impl TaskFile {
    pub fn load(path: &Path) -> Result<Self> {
        parse(&read(path)?, path)
    }

    pub fn build(self) -> Result<Task> {
        let n = self.n_vars;
        let (ineq_lhs, ineq_rhs) = rows(self.ineq.as_ref(), n)?;
        let (eq_lhs, eq_rhs) = rows(self.eq.as_ref(), n)?;
        let (lower, upper) = match self.bounds {
            Some(b) => (b.lower, b.upper.into_iter().map(|u| u.unwrap_or(f64::INFINITY)).collect()),
            None => (vec![0.0; n], vec![f64::INFINITY; n]),
        };
        let g = GeneralLP::new(n, ineq_lhs, ineq_rhs, eq_lhs, eq_rhs, lower, upper)?;
        let lp = standardize(&g)?;
        let c_set = match self.uncertainty {
            CostSet::Box { lower, upper } => UncertaintySet::boxed(&lower, &upper)?,
            CostSet::Hpoly { g, h } => UncertaintySet::hpolyhedron(matrix(&g, n)?, h)?,
            CostSet::Affine {
                phi,
                alpha_lower,
                alpha_upper,
                eta,
            } => UncertaintySet::affine(matrix(&phi, n)?, alpha_lower, alpha_upper, eta)?,
            CostSet::Unrestricted => UncertaintySet::unrestricted(n)?,
        };
        if c_set.dimension() != n {
            anyhow::bail!(suffdata::Error::DimensionMismatch {
                context: "uncertainty set vs n_vars",
                expected: n,
                found: c_set.dimension(),
            });
        }
        let dataset = self.dataset.map(|q| Dataset::new(n, q)).transpose()?;
        let query_basis = match self.query_basis {
            Some(cols) => QueryBasis::from_columns(&cols)?,
            None => QueryBasis::canonical(n),
        };
        Ok(Task {
            lp,
            c_set,
            dataset,
            observations: self.observations,
            query_basis,
        })
    }
}

impl Task {
    /// Replaces the dataset with the one stored in `path` (an array of queries).
    pub fn load_dataset(&mut self, path: &Path) -> Result<()> {
        let q: Vec<Vec<f64>> = parse(&read(path)?, path)?;
        self.dataset = Some(Dataset::new(self.lp.n_original(), q)?);
        Ok(())
    }

    pub fn load_observations(&mut self, path: &Path) -> Result<()> {
        self.observations = Some(parse(&read(path)?, path)?);
        Ok(())
    }

    pub fn require_dataset(&self) -> Result<&Dataset> {
        self.dataset
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("no dataset: add a `dataset` key or pass --dataset"))
    }

    pub fn require_observations(&self) -> Result<ObservationVector> {
        let ds = self.require_dataset()?;
        let values = self
            .observations
            .clone()
            .ok_or_else(|| anyhow::anyhow!("no observations: add an `observations` key or pass --observations"))?;
        Ok(ObservationVector::new(values, ds)?)
    }
}
