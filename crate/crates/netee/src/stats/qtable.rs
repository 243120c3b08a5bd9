use crate::error::{Error, Result};

/// Critical values for the Nemenyi test at alpha = 0.05: the 0.95 quantile
/// of the studentized range for `k` groups and infinite degrees of freedom,
/// divided by sqrt(2). Entry `i` is for `k = i + 2`.
pub const NEMENYI_Q_005: [f64; 29] = [
    1.959964, 2.343701, 2.569032, 2.727774, 2.849705, 2.948320, 3.030878, 3.101730, 3.163684, 3.218654, 3.268004,
    3.312739, 3.353618, 3.391230, 3.426041, 3.458425, 3.488685, 3.517073, 3.543799, 3.569040, 3.592946, 3.615646,
    3.637252, 3.657861, 3.677556, 3.696413, 3.714498, 3.731869, 3.748578,
];

pub fn nemenyi_q(alpha: f64, k: usize) -> Result<f64> {
    if (alpha - 0.05).abs() > 1e-12 {
        return Err(Error::Stats(format!(
            "Nemenyi critical values are tabulated for alpha = 0.05 only, got {alpha}"
        )));
    }
    if k < 2 {
        return Err(Error::Stats(format!("need at least 2 algorithms, got {k}")));
    }
    NEMENYI_Q_005.get(k - 2).copied().ok_or_else(|| {
        Error::Stats(format!(
            "k = {k} exceeds the tabulated maximum of {}",
            NEMENYI_Q_005.len() + 1
        ))
    })
}
