use crate::error::{Error, Result};
use crate::label::Label;

/// Counts with respect to a declared positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fn_: u64, fp: u64, tn: u64) -> Self {
        ConfusionMatrix { tp, fn_, fp, tn }
    }

    pub fn from_predictions(truth: &[Label], predicted: &[Label], positive: Label) -> Self {
        let mut cm = ConfusionMatrix::default();
        for (&t, &p) in truth.iter().zip(predicted) {
            match (t == positive, p == positive) {
                (true, true) => cm.tp += 1,
                (true, false) => cm.fn_ += 1,
                (false, true) => cm.fp += 1,
                (false, false) => cm.tn += 1,
            }
        }
        cm
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }
}

/// Rates for one confusion matrix. A rate whose denominator is zero is
/// `None` ("undefined").
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub kappa: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Accuracy, Cohen's (unweighted) kappa, sensitivity and specificity.
///
/// Kappa is `(p0 − pe) / (1 − pe)` with `p0` the accuracy and `pe` the
/// agreement expected from the marginals. When `pe = 1` kappa is 1 for a
/// perfect match and 0 otherwise.
pub fn metrics(cm: &ConfusionMatrix) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::InvalidArgument("empty confusion matrix".into()));
    }
    let n = total as f64;
    let (tp, fn_, fp, tn) = (cm.tp as f64, cm.fn_ as f64, cm.fp as f64, cm.tn as f64);
    let p0 = (tp + tn) / n;
    let pe = ((tp + fn_) * (tp + fp) + (fp + tn) * (fn_ + tn)) / (n * n);
    let kappa = if pe >= 1.0 {
        if p0 >= 1.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (p0 - pe) / (1.0 - pe)
    };
    Ok(Metrics {
        accuracy: p0,
        kappa,
        sensitivity: ratio(cm.tp, cm.tp + cm.fn_),
        specificity: ratio(cm.tn, cm.tn + cm.fp),
    })
}

/// Mean and sample standard deviation of the defined values of one metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: Option<f64>,
    /// `n − 1` denominator; `None` with fewer than two defined values.
    pub sd: Option<f64>,
    pub defined: usize,
}

impl Stat {
    pub fn from_values(values: impl IntoIterator<Item = Option<f64>>) -> Self {
        let xs: Vec<f64> = values.into_iter().flatten().collect();
        let n = xs.len();
        if n == 0 {
            return Stat {
                mean: None,
                sd: None,
                defined: 0,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (n >= 2).then(|| {
            let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        });
        Stat {
            mean: Some(mean),
            sd,
            defined: n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsSummary {
    pub folds: usize,
    pub accuracy: Stat,
    pub kappa: Stat,
    pub sensitivity: Stat,
    pub specificity: Stat,
}

impl MetricsSummary {
    pub fn from_folds(folds: &[Metrics]) -> Self {
        MetricsSummary {
            folds: folds.len(),
            accuracy: Stat::from_values(folds.iter().map(|m| Some(m.accuracy))),
            kappa: Stat::from_values(folds.iter().map(|m| Some(m.kappa))),
            sensitivity: Stat::from_values(folds.iter().map(|m| m.sensitivity)),
            specificity: Stat::from_values(folds.iter().map(|m| m.specificity)),
        }
    }

    /// The four statistics in report column order.
    pub fn columns(&self) -> [(&'static str, Stat); 4] {
        [
            ("accuracy", self.accuracy),
            ("kappa", self.kappa),
            ("sensitivity", self.sensitivity),
            ("specificity", self.specificity),
        ]
    }
}
