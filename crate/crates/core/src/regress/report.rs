use std::fmt::Write as _;

use serde::Serialize;

use super::ols::OlsFit;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermReport {
    pub name: String,
    pub coef: f64,
    pub se: f64,
    pub t: Option<f64>,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FStatReport {
    pub value: Option<f64>,
    pub df1: usize,
    pub df2: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub terms: Vec<TermReport>,
    pub r2: f64,
    pub adj_r2: f64,
    pub resid_se: f64,
    pub df: usize,
    pub n_obs: usize,
    pub f: Option<FStatReport>,
}

/// `***` below 0.001, `**` below 0.01, `*` below 0.05, `.` below 0.1.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else if p < 0.1 {
        "."
    } else {
        ""
    }
}

// JSON has no infinities; an exact fit reports its t and F values as null.
fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl OlsFit {
    pub fn report(&self) -> FitReport {
        FitReport {
            terms: (0..self.names.len())
                .map(|i| TermReport {
                    name: self.names[i].clone(),
                    coef: self.coefficients[i],
                    se: self.std_errors[i],
                    t: finite(self.t_values[i]),
                    p: self.p_values[i],
                })
                .collect(),
            r2: self.r2,
            adj_r2: self.adj_r2,
            resid_se: self.residual_se,
            df: self.df_residual,
            n_obs: self.n_obs,
            f: self.f_stat.map(|f| FStatReport { value: finite(f.value), df1: f.df1, df2: f.df2 }),
        }
    }

    /// Aligned coefficient table followed by the usual fit summary lines.
    pub fn to_table(&self, response: &str) -> String {
        let width = self.names.iter().map(|n| n.chars().count()).max().unwrap_or(0).max(10);
        let mut out = format!("Dependent variable: {response}\n\n");
        let _ = writeln!(
            out,
            "{:<width$}  {:>12}  {:>12}  {:>8}  {:>10}",
            "", "Estimate", "Std. Error", "t value", "Pr(>|t|)"
        );
        for i in 0..self.names.len() {
            let pad = width - self.names[i].chars().count();
            let _ = writeln!(
                out,
                "{}{}  {:>12.5}  {:>12.5}  {:>8.3}  {:>10.4} {}",
                self.names[i],
                " ".repeat(pad),
                self.coefficients[i],
                self.std_errors[i],
                self.t_values[i],
                self.p_values[i],
                significance_stars(self.p_values[i])
            );
        }
        out.push_str("---\nSignif. codes: 0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1\n\n");
        let _ = writeln!(out, "Observations: {}", self.n_obs);
        let _ = writeln!(out, "R2: {:.3}", self.r2);
        let _ = writeln!(out, "Adjusted R2: {:.3}", self.adj_r2);
        let _ = writeln!(out, "Residual Std. Error: {:.3} (df = {})", self.residual_se, self.df_residual);
        if let Some(f) = self.f_stat {
            let _ =
                writeln!(out, "F Statistic: {:.3} (df = {}; {}), p-value: {:.3e}", f.value, f.df1, f.df2, f.p_value);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::{ols_fit, DesignMatrix};

    #[test]
    fn stars_thresholds() {
        assert_eq!(significance_stars(0.0005), "***");
        assert_eq!(significance_stars(0.005), "**");
        assert_eq!(significance_stars(0.03), "*");
        assert_eq!(significance_stars(0.07), ".");
        assert_eq!(significance_stars(0.5), "");
    }

    #[test]
    fn json_shape_and_table() {
        let d =
            DesignMatrix::new(vec![("x".into(), vec![0.0, 1.0, 2.0, 3.0])], vec![0.1, 0.9, 2.2, 2.8], true).unwrap();
        let fit = ols_fit(&d).unwrap();
        let json = serde_json::to_value(fit.report()).unwrap();
        assert_eq!(json["terms"][1]["name"], "x");
        assert_eq!(json["f"]["df1"], 1);
        assert_eq!(json["df"], 2);
        let table = fit.to_table("y");
        assert!(table.contains("(Intercept)"));
        assert!(table.contains("Residual Std. Error"));
    }
}
