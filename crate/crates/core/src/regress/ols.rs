use std::collections::BTreeSet;

use thiserror::Error;

use super::student_t;

/// Name given to the implicit intercept column.
pub const INTERCEPT: &str = "(Intercept)";
const MAX_CONDITION: f64 = 1e12;
const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegressError {
    #[error("{n} observations cannot support {p} coefficients")]
    TooFewObservations { n: usize, p: usize },
    #[error("design is rank deficient; dependent column(s): {}", .columns.join(", "))]
    RankDeficient { columns: Vec<String> },
    #[error("column `{0}` is all zero")]
    ZeroColumn(String),
    #[error("column name `{0}` is used twice")]
    DuplicateColumn(String),
    #[error("column `{name}` has {got} values, expected {expected}")]
    LengthMismatch { name: String, got: usize, expected: usize },
    #[error("column `{0}` contains a non-finite value")]
    NonFinite(String),
    #[error("no value supplied for regressor `{0}`")]
    MissingRegressor(String),
}

/// Named regressor columns plus the response. The intercept, when
/// requested, is implicit and named [`INTERCEPT`].
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    response: Vec<f64>,
    intercept: bool,
}

impl DesignMatrix {
    pub fn new(columns: Vec<(String, Vec<f64>)>, response: Vec<f64>, intercept: bool) -> Result<Self, RegressError> {
        let n = response.len();
        let mut names = Vec::with_capacity(columns.len() + 1);
        let mut cols = Vec::with_capacity(columns.len() + 1);
        if intercept {
            names.push(INTERCEPT.to_string());
            cols.push(vec![1.0; n]);
        }
        let mut seen: BTreeSet<String> = names.iter().cloned().collect();
        if response.iter().any(|v| !v.is_finite()) {
            return Err(RegressError::NonFinite("response".into()));
        }
        for (name, values) in columns {
            if !seen.insert(name.clone()) {
                return Err(RegressError::DuplicateColumn(name));
            }
            if values.len() != n {
                return Err(RegressError::LengthMismatch { name, got: values.len(), expected: n });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(RegressError::NonFinite(name));
            }
            if values.iter().all(|v| *v == 0.0) {
                return Err(RegressError::ZeroColumn(name));
            }
            names.push(name);
            cols.push(values);
        }
        if n <= cols.len() {
            return Err(RegressError::TooFewObservations { n, p: cols.len() });
        }
        Ok(DesignMatrix { names, columns: cols, response, intercept })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.columns[i].as_slice())
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn has_intercept(&self) -> bool {
        self.intercept
    }

    pub fn n_obs(&self) -> usize {
        self.response.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Row `i` over every column, intercept included.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FStat {
    pub value: f64,
    pub df1: usize,
    pub df2: usize,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r2: f64,
    pub adj_r2: f64,
    pub residual_se: f64,
    pub df_residual: usize,
    pub n_obs: usize,
    pub intercept: bool,
    /// Absent when the model holds only an intercept.
    pub f_stat: Option<FStat>,
    pub coef_covariance: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interval {
    None,
    Confidence95,
    Prediction95,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub point: f64,
    pub half_width: Option<f64>,
}

impl OlsFit {
    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coef(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.coefficients[i])
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.std_errors[i])
    }

    pub fn t_value(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.t_values[i])
    }

    pub fn p_value(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.p_values[i])
    }

    /// Regressor vector in coefficient order. The intercept entry is filled
    /// in automatically.
    pub fn design_row(&self, row: &[(&str, f64)]) -> Result<Vec<f64>, RegressError> {
        self.names
            .iter()
            .map(|name| {
                if self.intercept && name == INTERCEPT {
                    return Ok(1.0);
                }
                row.iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| RegressError::MissingRegressor(name.clone()))
            })
            .collect()
    }

    /// `xᵀΣx` with `Σ` the coefficient covariance.
    pub fn mean_variance(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, xi) in x.iter().enumerate() {
            for (j, xj) in x.iter().enumerate() {
                acc += xi * self.coef_covariance[i][j] * xj;
            }
        }
        acc.max(0.0)
    }

    /// `t(0.975, df_residual)`.
    pub fn t_critical(&self) -> f64 {
        student_t::quantile(0.975, self.df_residual as f64)
    }

    pub fn predict(&self, row: &[(&str, f64)], interval: Interval) -> Result<Prediction, RegressError> {
        let x = self.design_row(row)?;
        let point = x.iter().zip(&self.coefficients).map(|(a, b)| a * b).sum();
        let variance = match interval {
            Interval::None => None,
            Interval::Confidence95 => Some(self.mean_variance(&x)),
            Interval::Prediction95 => Some(self.mean_variance(&x) + self.residual_se * self.residual_se),
        };
        Ok(Prediction { point, half_width: variance.map(|v| self.t_critical() * v.sqrt()) })
    }
}

/// Cholesky factor of a symmetric matrix with unit diagonal. On failure
/// returns the index of the first column whose pivot collapsed.
fn cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, usize> {
    let p = a.len();
    let mut l = vec![vec![0.0; p]; p];
    for j in 0..p {
        let d = a[j][j] - l[j][..j].iter().map(|v| v * v).sum::<f64>();
        if d.is_nan() || d <= PIVOT_TOL {
            return Err(j);
        }
        let djj = d.sqrt();
        l[j][j] = djj;
        for i in j + 1..p {
            let s = a[i][j] - l[i][..j].iter().zip(&l[j][..j]).map(|(x, y)| x * y).sum::<f64>();
            l[i][j] = s / djj;
        }
    }
    Ok(l)
}

fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let p = l.len();
    let mut z = vec![0.0; p];
    for i in 0..p {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * z[k];
        }
        z[i] = s / l[i][i];
    }
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = z[i];
        for k in i + 1..p {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

fn norm1(m: &[Vec<f64>]) -> f64 {
    (0..m.len()).map(|j| m.iter().map(|row| row[j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Least-squares fit through the normal equations, solved by a Cholesky
/// factorisation of the unit-diagonal scaled cross-product matrix.
pub fn ols_fit(d: &DesignMatrix) -> Result<OlsFit, RegressError> {
    let n = d.n_obs();
    let p = d.n_cols();
    let cols = &d.columns;
    let y = &d.response;

    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for i in 0..p {
        for j in 0..=i {
            let s: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            xtx[i][j] = s;
            xtx[j][i] = s;
        }
        xty[i] = cols[i].iter().zip(y).map(|(a, b)| a * b).sum();
    }
    let scale: Vec<f64> = (0..p).map(|i| 1.0 / xtx[i][i].sqrt()).collect();
    let scaled: Vec<Vec<f64>> = (0..p).map(|i| (0..p).map(|j| xtx[i][j] * scale[i] * scale[j]).collect()).collect();
    let l = cholesky(&scaled).map_err(|j| RegressError::RankDeficient { columns: vec![d.names[j].clone()] })?;

    let mut inv_scaled = vec![vec![0.0; p]; p];
    for j in 0..p {
        let mut e = vec![0.0; p];
        e[j] = 1.0;
        let col = cholesky_solve(&l, &e);
        for i in 0..p {
            inv_scaled[i][j] = col[i];
        }
    }
    if norm1(&scaled) * norm1(&inv_scaled) > MAX_CONDITION {
        let worst = (0..p).max_by(|&a, &b| inv_scaled[a][a].total_cmp(&inv_scaled[b][b])).expect("p > 0");
        return Err(RegressError::RankDeficient { columns: vec![d.names[worst].clone()] });
    }

    let rhs: Vec<f64> = (0..p).map(|i| xty[i] * scale[i]).collect();
    let beta: Vec<f64> = cholesky_solve(&l, &rhs).iter().zip(&scale).map(|(b, s)| b * s).collect();
    let xtx_inv: Vec<Vec<f64>> =
        (0..p).map(|i| (0..p).map(|j| inv_scaled[i][j] * scale[i] * scale[j]).collect()).collect();

    let residuals: Vec<f64> = (0..n).map(|r| y[r] - (0..p).map(|c| cols[c][r] * beta[c]).sum::<f64>()).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let df = n - p;
    let sigma2 = rss / df as f64;
    let cov: Vec<Vec<f64>> = xtx_inv.iter().map(|row| row.iter().map(|v| v * sigma2).collect()).collect();
    let std_errors: Vec<f64> = (0..p).map(|i| cov[i][i].max(0.0).sqrt()).collect();
    let t_values: Vec<f64> = beta
        .iter()
        .zip(&std_errors)
        .map(|(b, se)| {
            if *se > 0.0 {
                b / se
            } else if *b == 0.0 {
                0.0
            } else {
                b.signum() * f64::INFINITY
            }
        })
        .collect();
    let p_values: Vec<f64> = t_values.iter().map(|t| student_t::two_sided_p(*t, df as f64)).collect();

    let k0 = usize::from(d.intercept);
    let tss: f64 = if d.intercept {
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - mean) * (v - mean)).sum()
    } else {
        y.iter().map(|v| v * v).sum()
    };
    let r2 = if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 1.0 };
    let adj_r2 = 1.0 - (1.0 - r2) * (n - k0) as f64 / df as f64;
    let f_stat = (p > k0).then(|| {
        let df1 = p - k0;
        let value = if rss > 0.0 { ((tss - rss).max(0.0) / df1 as f64) / sigma2 } else { f64::INFINITY };
        FStat { value, df1, df2: df, p_value: student_t::f_upper_p(value, df1 as f64, df as f64) }
    });

    Ok(OlsFit {
        names: d.names.clone(),
        coefficients: beta,
        std_errors,
        t_values,
        p_values,
        r2,
        adj_r2,
        residual_se: sigma2.sqrt(),
        df_residual: df,
        n_obs: n,
        intercept: d.intercept,
        f_stat,
        coef_covariance: cov,
        residuals,
    })
}
