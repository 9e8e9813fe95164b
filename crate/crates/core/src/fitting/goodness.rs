use serde::{Deserialize, Serialize};

use super::FitError;

/// Sum of squared errors and Pearson correlation of observed vs predicted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Goodness {
    pub sse: f64,
    pub r: f64,
    pub r_squared: f64,
}

pub fn goodness(observed: &[f64], predicted: &[f64]) -> Result<Goodness, FitError> {
    if observed.len() != predicted.len() {
        return Err(FitError::LengthMismatch {
            observed: observed.len(),
            predicted: predicted.len(),
        });
    }
    let m = observed.len();
    if m < 2 {
        return Err(FitError::TooFewStates { got: m, need: 2 });
    }
    let sse = observed.iter().zip(predicted).map(|(o, p)| (o - p) * (o - p)).sum();

    let mean_o = observed.iter().sum::<f64>() / m as f64;
    let mean_p = predicted.iter().sum::<f64>() / m as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (o, p) in observed.iter().zip(predicted) {
        let (dx, dy) = (o - mean_o, p - mean_p);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(FitError::UndefinedCorrelation("observed values are constant"));
    }
    if syy == 0.0 {
        return Err(FitError::UndefinedCorrelation("predicted values are constant"));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok(Goodness {
        sse,
        r,
        r_squared: r * r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_fit() {
        let v = [3.0, 1.0, 4.0, 1.0, 5.0];
        let g = goodness(&v, &v).unwrap();
        assert_eq!((g.sse, g.r, g.r_squared), (0.0, 1.0, 1.0));
    }

    #[test]
    fn perfect_anticorrelation() {
        let g = goodness(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert!((g.r + 1.0).abs() < 1e-15);
        assert_eq!(g.sse, 8.0);
    }

    #[test]
    fn constant_observed_is_an_error() {
        assert!(matches!(
            goodness(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(FitError::UndefinedCorrelation(_))
        ));
        assert!(goodness(&[1.0], &[1.0]).is_err());
        assert!(goodness(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn brown_printed_ma_column_correlation() {
        let observed = crate::datasets::brown().counts();
        let printed_ma = [
            1.0, 73.0, 639.0, 2123.0, 4154.0, 5814.0, 6459.0, 6059.0, 4994.0, 3718.0, 2549.0, 1632.0, 987.0, 569.0,
            314.0, 167.0, 86.0, 43.0, 21.0, 10.0, 5.0, 2.0,
        ];
        let g = goodness(&observed, &printed_ma).unwrap();
        assert!((g.r - 0.9991).abs() < 5e-4, "{}", g.r);
    }
}
