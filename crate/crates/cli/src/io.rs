//! JSON problem files. Matrices are row-major nested arrays.

use ellsum::{MatrixEllipsoid, SumProblem};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

pub type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema_version: u32,
    #[serde(rename = "K")]
    pub k: usize,
    pub terms: Vec<TermFile>,
}

/// One summand `F E(C, Q, R) G`. Missing `F`/`G` default to identities and a
/// missing `C` to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Rows>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Rows>,
    #[serde(rename = "Q")]
    pub q: Rows,
    #[serde(rename = "R")]
    pub r: Rows,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Rows>,
}

pub fn to_rows(m: &DMatrix<f64>) -> Rows {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Converts nested rows, naming `field` in any error.
pub fn from_rows(rows: &Rows, field: &str) -> CliResult<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return Err(CliError::Input(format!("{field}: matrix is empty")));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
        return Err(CliError::Input(format!(
            "{field}: row {i} has {} entries, expected {m}",
            row.len()
        )));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

impl ProblemFile {
    pub fn from_problem(problem: &SumProblem) -> Self {
        let terms = problem
            .terms()
            .iter()
            .map(|t| {
                let e = t.ellipsoid();
                TermFile {
                    label: None,
                    f: Some(to_rows(t.left_map())),
                    c: Some(to_rows(e.center())),
                    q: to_rows(e.left()),
                    r: to_rows(e.right()),
                    g: Some(to_rows(t.right_map())),
                }
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            k: problem.len(),
            terms,
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Input(format!("at `{path}`: {}", e.inner()))
        })?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Input(format!(
                "schema_version: unsupported version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        if file.k != file.terms.len() {
            return Err(CliError::Input(format!(
                "K: declared {} but {} terms given",
                file.k,
                file.terms.len()
            )));
        }
        Ok(file)
    }

    pub fn to_problem(&self) -> CliResult<SumProblem> {
        let mut parts = Vec::with_capacity(self.terms.len());
        for (k, t) in self.terms.iter().enumerate() {
            let name = |field: &str| match &t.label {
                Some(l) => format!("terms[{k}] ({l}).{field}"),
                None => format!("terms[{k}].{field}"),
            };
            let q = from_rows(&t.q, &name("Q"))?;
            let r = from_rows(&t.r, &name("R"))?;
            let c = match &t.c {
                Some(c) => from_rows(c, &name("C"))?,
                None => DMatrix::zeros(q.nrows(), r.nrows()),
            };
            let f = match &t.f {
                Some(f) => from_rows(f, &name("F"))?,
                None => DMatrix::identity(q.nrows(), q.nrows()),
            };
            let g = match &t.g {
                Some(g) => from_rows(g, &name("G"))?,
                None => DMatrix::identity(r.nrows(), r.nrows()),
            };
            let e = MatrixEllipsoid::new(c, q, r)
                .map_err(|e| CliError::Input(format!("{}: {e}", name("ellipsoid"))))?;
            parts.push((f, e, g));
        }
        SumProblem::from_parts(parts).map_err(|e| CliError::Input(e.to_string()))
    }
}
