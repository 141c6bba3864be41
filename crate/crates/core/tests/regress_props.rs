use proptest::prelude::*;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use tierlab::regress::{ols_fit, DesignMatrix, RegressError};

fn design(cols: &[Vec<f64>], y: Vec<f64>, intercept: bool) -> DesignMatrix {
    let named = cols.iter().enumerate().map(|(i, c)| (format!("x{i}"), c.clone())).collect();
    DesignMatrix::new(named, y, intercept).unwrap()
}

fn system() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, bool)> {
    (1usize..5, any::<bool>()).prop_flat_map(|(p, intercept)| {
        let n = (p + 2)..40;
        n.prop_flat_map(move |n| {
            (
                prop::collection::vec(prop::collection::vec(-10.0f64..10.0, n), p),
                prop::collection::vec(-100.0f64..100.0, n),
                Just(intercept),
            )
        })
    })
}

struct Gauss(Xoshiro256StarStar);

impl Gauss {
    fn uniform(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64
    }

    fn normal(&mut self) -> f64 {
        let (u1, u2) = (self.uniform(), self.uniform());
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

proptest! {
    #[test]
    fn residuals_are_orthogonal_to_columns((cols, y, intercept) in system()) {
        let d = design(&cols, y, intercept);
        let fit = match ols_fit(&d) {
            Ok(f) => f,
            Err(RegressError::RankDeficient { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let n = d.n_obs();
        for j in 0..d.n_cols() {
            let dot: f64 = (0..n).map(|i| d.row(i)[j] * fit.residuals[i]).sum();
            let scale: f64 = (0..n).map(|i| d.row(i)[j].abs()).sum::<f64>() * d.response().iter().map(|v| v.abs()).fold(1.0, f64::max);
            prop_assert!(dot.abs() <= 1e-8 * scale.max(1.0), "column {j}: {dot}");
        }
        prop_assert!(fit.adj_r2 <= fit.r2);
        prop_assert_eq!(fit.df_residual, n - d.n_cols());
        for k in 0..fit.names.len() {
            if fit.std_errors[k] > 0.0 {
                prop_assert_eq!(fit.t_values[k], fit.coefficients[k] / fit.std_errors[k]);
            }
        }
    }
}

#[test]
fn noisy_coefficients_land_within_four_standard_errors() {
    let mut g = Gauss(Xoshiro256StarStar::seed_from_u64(20210131));
    let trials = 400;
    let mut hits = 0;
    let mut total = 0;
    for _ in 0..trials {
        let p = 1 + (g.0.next_u64() % 4) as usize;
        let n = 20 + (g.0.next_u64() % 30) as usize;
        let beta: Vec<f64> = (0..=p).map(|_| 5.0 * g.normal()).collect();
        let sigma = 0.5 + g.uniform() * 3.0;
        let cols: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| 4.0 * g.normal()).collect()).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| beta[0] + (0..p).map(|j| beta[j + 1] * cols[j][i]).sum::<f64>() + sigma * g.normal())
            .collect();
        let fit = ols_fit(&design(&cols, y, true)).unwrap();
        for (k, b) in beta.iter().enumerate() {
            total += 1;
            if (fit.coefficients[k] - b).abs() <= 4.0 * fit.std_errors[k] {
                hits += 1;
            }
        }
    }
    assert!(hits as f64 >= 0.99 * total as f64, "{hits}/{total}");
}
