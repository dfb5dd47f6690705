use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-feature min-max scaling fitted on a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerModel {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
    /// Clamp transformed values to `[0, 1]`.
    pub clamp: bool,
}

impl ScalerModel {
    pub fn fit<X: AsRef<[f64]>>(rows: &[X], clamp: bool) -> Result<Self> {
        let first = rows.first().ok_or(Error::NoSamples)?.as_ref();
        let mut mins = first.to_vec();
        let mut maxs = first.to_vec();
        for row in rows {
            let row = row.as_ref();
            if row.len() != mins.len() {
                return Err(glyphrec_core::Error::DimensionMismatch {
                    expected: mins.len(),
                    found: row.len(),
                }
                .into());
            }
            for ((lo, hi), &v) in mins.iter_mut().zip(maxs.iter_mut()).zip(row) {
                *lo = lo.min(v);
                *hi = hi.max(v);
            }
        }
        Ok(ScalerModel { mins, maxs, clamp })
    }

    pub fn dim(&self) -> usize {
        self.mins.len()
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(glyphrec_core::Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            }
            .into());
        }
        Ok(x.iter()
            .zip(self.mins.iter().zip(&self.maxs))
            .map(|(&v, (&lo, &hi))| {
                if hi <= lo {
                    return 0.0;
                }
                let s = (v - lo) / (hi - lo);
                if self.clamp {
                    s.clamp(0.0, 1.0)
                } else {
                    s
                }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn training_rows_land_in_unit_interval() {
        let rows = vec![vec![1.0, 5.0, -2.0], vec![3.0, 5.0, 2.0], vec![2.0, 5.0, 0.0]];
        let s = ScalerModel::fit(&rows, false).unwrap();
        assert_eq!(s.transform(&rows[0]).unwrap(), vec![0.0, 0.0, 0.0]);
        assert_eq!(s.transform(&rows[1]).unwrap(), vec![1.0, 0.0, 1.0]);
        assert_eq!(s.transform(&rows[2]).unwrap(), vec![0.5, 0.0, 0.5]);
    }

    #[test]
    fn clamping_is_optional() {
        let rows = vec![vec![0.0], vec![2.0]];
        let open = ScalerModel::fit(&rows, false).unwrap();
        assert_eq!(open.transform(&[4.0]).unwrap(), vec![2.0]);
        let closed = ScalerModel::fit(&rows, true).unwrap();
        assert_eq!(closed.transform(&[4.0]).unwrap(), vec![1.0]);
        assert_eq!(closed.transform(&[-4.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn rejects_ragged_input() {
        assert!(ScalerModel::fit(&[vec![1.0], vec![1.0, 2.0]], true).is_err());
        assert!(ScalerModel::fit::<Vec<f64>>(&[], true).is_err());
    }
}
