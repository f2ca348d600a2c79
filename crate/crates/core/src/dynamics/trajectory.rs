use std::io::Write;

use serde::Serialize;

use crate::json::{to_pretty, Sig17};

use super::{Composition, Scheme};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    pub scheme: Scheme,
    pub composition: Composition,
    pub alpha: f64,
    pub h: f64,
    pub t_end: f64,
    pub window: Option<usize>,
    pub model_hash: String,
}

/// Samples on the uniform grid `t_k = k h`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    variables: Vec<String>,
    h: f64,
    steps: usize,
    states: Vec<Vec<f64>>,
    meta: TrajectoryMeta,
}

impl Trajectory {
    pub(crate) fn new(
        variables: Vec<String>,
        h: f64,
        steps: usize,
        states: Vec<Vec<f64>>,
        meta: TrajectoryMeta,
    ) -> Self {
        debug_assert!(states.iter().all(|s| s.len() == steps + 1));
        Self {
            variables,
            h,
            steps,
            states,
            meta,
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub(crate) fn meta_mut(&mut self) -> &mut TrajectoryMeta {
        &mut self.meta
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.h
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.time(k))
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn column(&self, var: &str) -> Option<&[f64]> {
        let i = self.variables.iter().position(|v| v == var)?;
        Some(&self.states[i])
    }

    pub fn last(&self, var: &str) -> Option<f64> {
        self.column(var).and_then(|c| c.last().copied())
    }

    /// Every `stride`-th sample; a tail shorter than `stride` is dropped so
    /// the grid stays uniform.
    pub fn thinned(&self, stride: usize) -> Trajectory {
        let stride = stride.max(1);
        let idx: Vec<usize> = (0..self.len()).step_by(stride).collect();
        let states = self
            .states
            .iter()
            .map(|s| idx.iter().map(|&k| s[k]).collect())
            .collect();
        Trajectory::new(
            self.variables.clone(),
            self.h * stride as f64,
            idx.len() - 1,
            states,
            self.meta.clone(),
        )
    }

    /// CSV with header `t,<var>...` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend(self.variables.iter().cloned());
        w.write_record(&header)?;
        for k in 0..self.len() {
            let mut row = vec![format!("{:.16e}", self.time(k))];
            row.extend(self.states.iter().map(|s| format!("{:.16e}", s[k])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn metadata_json(&self) -> String {
        #[derive(Serialize)]
        struct Sidecar<'a> {
            variables: &'a [String],
            samples: usize,
            scheme: String,
            composition: String,
            alpha: Sig17,
            h: Sig17,
            t_end: Sig17,
            window: Option<usize>,
            model_hash: &'a str,
        }
        to_pretty(&Sidecar {
            variables: &self.variables,
            samples: self.len(),
            scheme: self.meta.scheme.to_string(),
            composition: self.meta.composition.to_string(),
            alpha: Sig17(self.meta.alpha),
            h: Sig17(self.h),
            t_end: Sig17(self.meta.t_end),
            window: self.meta.window,
            model_hash: &self.meta.model_hash,
        })
    }
}
