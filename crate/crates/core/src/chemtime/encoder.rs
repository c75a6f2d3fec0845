//! Gated recurrent encoder with a linear read-out into the embedding space.
//!
//! Per step, with input `x` and previous state `h`:
//!
//! ```text
//! z  = sigmoid(Wz x + Uz h + bz)
//! r  = sigmoid(Wr x + Ur h + br)
//! n  = tanh(Wn x + Un (r * h) + bn)
//! h' = (1 - z) * h + z * n
//! e  = P h' + c
//! ```
//!
//! Matrices are stored row-major as flat vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderParams {
    pub input: usize,
    pub hidden: usize,
    pub dim: usize,
    pub w_z: Vec<f64>,
    pub w_r: Vec<f64>,
    pub w_n: Vec<f64>,
    pub u_z: Vec<f64>,
    pub u_r: Vec<f64>,
    pub u_n: Vec<f64>,
    pub b_z: Vec<f64>,
    pub b_r: Vec<f64>,
    pub b_n: Vec<f64>,
    /// `dim x hidden` projection.
    pub proj_w: Vec<f64>,
    pub proj_b: Vec<f64>,
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// `out[i] += sum_j m[i * cols + j] * v[j]`
fn matvec_acc(m: &[f64], v: &[f64], out: &mut [f64]) {
    let cols = v.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &m[i * cols..(i + 1) * cols];
        *o += row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// `out[j] += sum_i m[i * cols + j] * v[i]`
fn matvec_t_acc(m: &[f64], v: &[f64], out: &mut [f64]) {
    let cols = out.len();
    for (i, vi) in v.iter().enumerate() {
        if *vi == 0.0 {
            continue;
        }
        let row = &m[i * cols..(i + 1) * cols];
        for (o, a) in out.iter_mut().zip(row) {
            *o += a * vi;
        }
    }
}

/// `g[i * cols + j] += a[i] * b[j]`
fn outer_acc(g: &mut [f64], a: &[f64], b: &[f64]) {
    let cols = b.len();
    for (i, ai) in a.iter().enumerate() {
        if *ai == 0.0 {
            continue;
        }
        let row = &mut g[i * cols..(i + 1) * cols];
        for (gij, bj) in row.iter_mut().zip(b) {
            *gij += ai * bj;
        }
    }
}

/// Intermediate values of one step, kept for backpropagation.
#[derive(Debug, Clone)]
pub struct StepCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub n: Vec<f64>,
    pub h: Vec<f64>,
    pub e: Vec<f64>,
}

impl EncoderParams {
    pub fn zeros(input: usize, hidden: usize, dim: usize) -> Self {
        let ih = input * hidden;
        let hh = hidden * hidden;
        EncoderParams {
            input,
            hidden,
            dim,
            w_z: vec![0.0; ih],
            w_r: vec![0.0; ih],
            w_n: vec![0.0; ih],
            u_z: vec![0.0; hh],
            u_r: vec![0.0; hh],
            u_n: vec![0.0; hh],
            b_z: vec![0.0; hidden],
            b_r: vec![0.0; hidden],
            b_n: vec![0.0; hidden],
            proj_w: vec![0.0; dim * hidden],
            proj_b: vec![0.0; dim],
        }
    }

    /// Every parameter drawn from uniform(-s, s) with `s = 1/sqrt(hidden)`.
    pub fn init(input: usize, hidden: usize, dim: usize, seed: u64) -> Self {
        let mut p = Self::zeros(input, hidden, dim);
        let s = 1.0 / (hidden as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for buf in p.buffers_mut() {
            for v in buf.iter_mut() {
                *v = rng.random_range(-s..s);
            }
        }
        p
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.input, self.hidden, self.dim)
    }

    pub fn buffers(&self) -> [&Vec<f64>; 11] {
        [
            &self.w_z, &self.w_r, &self.w_n, &self.u_z, &self.u_r, &self.u_n, &self.b_z, &self.b_r, &self.b_n,
            &self.proj_w, &self.proj_b,
        ]
    }

    pub fn buffers_mut(&mut self) -> [&mut Vec<f64>; 11] {
        [
            &mut self.w_z,
            &mut self.w_r,
            &mut self.w_n,
            &mut self.u_z,
            &mut self.u_r,
            &mut self.u_n,
            &mut self.b_z,
            &mut self.b_r,
            &mut self.b_n,
            &mut self.proj_w,
            &mut self.proj_b,
        ]
    }

    pub fn n_params(&self) -> usize {
        self.buffers().iter().map(|b| b.len()).sum()
    }

    /// Flat copy of every parameter, in `buffers()` order.
    pub fn to_flat(&self) -> Vec<f64> {
        self.buffers().iter().flat_map(|b| b.iter().copied()).collect()
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        let mut it = flat.iter();
        for buf in self.buffers_mut() {
            for v in buf.iter_mut() {
                *v = *it.next().expect("flat parameter vector too short");
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.buffers().iter().all(|b| b.iter().all(|v| v.is_finite()))
    }

    pub fn norm(&self) -> f64 {
        self.buffers()
            .iter()
            .flat_map(|b| b.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for buf in self.buffers_mut() {
            buf.iter_mut().for_each(|v| *v *= factor);
        }
    }

    /// `self += factor * other`
    pub fn add_scaled(&mut self, other: &EncoderParams, factor: f64) {
        for (dst, src) in self.buffers_mut().into_iter().zip(other.buffers()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += factor * s;
            }
        }
    }

    pub fn initial_state(&self) -> Vec<f64> {
        vec![0.0; self.hidden]
    }

    /// Linear read-out of a hidden state.
    pub fn project(&self, h: &[f64]) -> Vec<f64> {
        let mut e = self.proj_b.clone();
        matvec_acc(&self.proj_w, h, &mut e);
        e
    }

    /// One recurrent step, returning every intermediate.
    pub fn step_cached(&self, h_prev: &[f64], x: &[f64]) -> StepCache {
        let hd = self.hidden;
        let mut z = self.b_z.clone();
        matvec_acc(&self.w_z, x, &mut z);
        matvec_acc(&self.u_z, h_prev, &mut z);
        z.iter_mut().for_each(|v| *v = sigmoid(*v));

        let mut r = self.b_r.clone();
        matvec_acc(&self.w_r, x, &mut r);
        matvec_acc(&self.u_r, h_prev, &mut r);
        r.iter_mut().for_each(|v| *v = sigmoid(*v));

        let rh: Vec<f64> = r.iter().zip(h_prev).map(|(a, b)| a * b).collect();
        let mut n = self.b_n.clone();
        matvec_acc(&self.w_n, x, &mut n);
        matvec_acc(&self.u_n, &rh, &mut n);
        n.iter_mut().for_each(|v| *v = v.tanh());

        let h: Vec<f64> = (0..hd).map(|i| (1.0 - z[i]) * h_prev[i] + z[i] * n[i]).collect();
        let e = self.project(&h);
        StepCache {
            x: x.to_vec(),
            h_prev: h_prev.to_vec(),
            z,
            r,
            n,
            h,
            e,
        }
    }

    /// Advances `(h_prev, x) -> (h, e)`.
    pub fn step(&self, h_prev: &[f64], x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let c = self.step_cached(h_prev, x);
        (c.h, c.e)
    }

    /// Runs the recurrence over `inputs[t]` (one column per step) from a
    /// zero state.
    pub fn forward_cached(&self, inputs: &[Vec<f64>]) -> Vec<StepCache> {
        let mut h = self.initial_state();
        let mut out = Vec::with_capacity(inputs.len());
        for x in inputs {
            let c = self.step_cached(&h, x);
            h.clone_from(&c.h);
            out.push(c);
        }
        out
    }

    /// Backpropagation through time. `de[t]` is the loss gradient with
    /// respect to the embedding at step `t`; gradients accumulate into
    /// `grad`.
    pub fn backward(&self, caches: &[StepCache], de: &[Vec<f64>], grad: &mut EncoderParams) {
        let hd = self.hidden;
        let mut dh_next = vec![0.0; hd];
        for (c, de_t) in caches.iter().zip(de).rev() {
            outer_acc(&mut grad.proj_w, de_t, &c.h);
            for (g, d) in grad.proj_b.iter_mut().zip(de_t) {
                *g += d;
            }
            let mut dh = dh_next.clone();
            matvec_t_acc(&self.proj_w, de_t, &mut dh);

            let mut da_z = vec![0.0; hd];
            let mut da_n = vec![0.0; hd];
            let mut dh_prev = vec![0.0; hd];
            for i in 0..hd {
                let dz = dh[i] * (c.n[i] - c.h_prev[i]);
                da_z[i] = dz * c.z[i] * (1.0 - c.z[i]);
                let dn = dh[i] * c.z[i];
                da_n[i] = dn * (1.0 - c.n[i] * c.n[i]);
                dh_prev[i] = dh[i] * (1.0 - c.z[i]);
            }
            let rh: Vec<f64> = c.r.iter().zip(&c.h_prev).map(|(a, b)| a * b).collect();
            outer_acc(&mut grad.w_n, &da_n, &c.x);
            outer_acc(&mut grad.u_n, &da_n, &rh);
            for (g, d) in grad.b_n.iter_mut().zip(&da_n) {
                *g += d;
            }
            let mut drh = vec![0.0; hd];
            matvec_t_acc(&self.u_n, &da_n, &mut drh);
            let mut da_r = vec![0.0; hd];
            for i in 0..hd {
                da_r[i] = drh[i] * c.h_prev[i] * c.r[i] * (1.0 - c.r[i]);
                dh_prev[i] += drh[i] * c.r[i];
            }
            outer_acc(&mut grad.w_z, &da_z, &c.x);
            outer_acc(&mut grad.u_z, &da_z, &c.h_prev);
            outer_acc(&mut grad.w_r, &da_r, &c.x);
            outer_acc(&mut grad.u_r, &da_r, &c.h_prev);
            for i in 0..hd {
                grad.b_z[i] += da_z[i];
                grad.b_r[i] += da_r[i];
            }
            matvec_t_acc(&self.u_z, &da_z, &mut dh_prev);
            matvec_t_acc(&self.u_r, &da_r, &mut dh_prev);
            dh_next = dh_prev;
        }
    }
}
