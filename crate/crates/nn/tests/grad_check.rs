//! Finite-difference validation of every backward path. Per-op checks use a
//! projection loss L = sum(G . f(x)) with fixed random G, so dL/dx is exactly
//! what the backward function returns; model-level checks go through the real
//! cross-entropy loss.

use hybridsig_nn::{
    conv2d_backward, conv2d_forward, dense_backward, dense_forward, grad_check_model,
    maxpool_backward, maxpool_forward, relu_backward, relu_forward, CnnModel, Tensor,
};

const H: f64 = 1e-5;
const TOL: f64 = 1e-4;

struct Lcg(u64);

impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    fn tensor(&mut self, shape: Vec<usize>) -> Tensor<f64> {
        let numel = shape.iter().product();
        Tensor::new(shape, (0..numel).map(|_| self.next_f64()).collect()).unwrap()
    }

    /// Values bounded away from zero, for kinked activations.
    fn tensor_off_kink(&mut self, shape: Vec<usize>) -> Tensor<f64> {
        let numel = shape.iter().product();
        let data = (0..numel)
            .map(|_| {
                let v = self.next_f64();
                v.signum() * (v.abs() * 0.9 + 0.05)
            })
            .collect();
        Tensor::new(shape, data).unwrap()
    }
}

fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / (1e-6f64).max(a.abs() + n.abs())
}

fn project(y: &Tensor<f64>, g: &Tensor<f64>) -> f64 {
    y.data.iter().zip(&g.data).map(|(a, b)| a * b).sum()
}

fn check_all(analytic: &Tensor<f64>, mut numeric_at: impl FnMut(usize) -> f64, what: &str) {
    for i in 0..analytic.numel() {
        let n = numeric_at(i);
        let a = analytic.data[i];
        assert!(
            rel_err(a, n) < TOL,
            "{what}[{i}]: analytic {a} vs numeric {n}"
        );
    }
}

#[test]
fn conv_gradients_match_central_differences() {
    let mut rng = Lcg(0xc0);
    let x = rng.tensor(vec![5, 4, 2]);
    let w = rng.tensor(vec![3, 3, 2, 3]);
    let b = rng.tensor(vec![3]);
    let g = rng.tensor(vec![5, 4, 3]);

    let (gx, gw, gb) = conv2d_backward(&g, &x, &w).unwrap();

    check_all(
        &gx,
        |i| {
            let mut xp = x.clone();
            xp.data[i] += H;
            let mut xm = x.clone();
            xm.data[i] -= H;
            (project(&conv2d_forward(&xp, &w, &b).unwrap(), &g)
                - project(&conv2d_forward(&xm, &w, &b).unwrap(), &g))
                / (2.0 * H)
        },
        "conv dL/dx",
    );
    check_all(
        &gw,
        |i| {
            let mut wp = w.clone();
            wp.data[i] += H;
            let mut wm = w.clone();
            wm.data[i] -= H;
            (project(&conv2d_forward(&x, &wp, &b).unwrap(), &g)
                - project(&conv2d_forward(&x, &wm, &b).unwrap(), &g))
                / (2.0 * H)
        },
        "conv dL/dw",
    );
    check_all(
        &gb,
        |i| {
            let mut bp = b.clone();
            bp.data[i] += H;
            let mut bm = b.clone();
            bm.data[i] -= H;
            (project(&conv2d_forward(&x, &w, &bp).unwrap(), &g)
                - project(&conv2d_forward(&x, &w, &bm).unwrap(), &g))
                / (2.0 * H)
        },
        "conv dL/db",
    );
}

#[test]
fn dense_gradients_match_central_differences() {
    let mut rng = Lcg(0xd0);
    let x = rng.tensor(vec![11]);
    let w = rng.tensor(vec![11, 6]);
    let b = rng.tensor(vec![6]);
    let g = rng.tensor(vec![6]);

    let (gx, gw, gb) = dense_backward(&g, &x, &w).unwrap();

    check_all(
        &gx,
        |i| {
            let mut xp = x.clone();
            xp.data[i] += H;
            let mut xm = x.clone();
            xm.data[i] -= H;
            (project(&dense_forward(&xp, &w, &b).unwrap(), &g)
                - project(&dense_forward(&xm, &w, &b).unwrap(), &g))
                / (2.0 * H)
        },
        "dense dL/dx",
    );
    check_all(
        &gw,
        |i| {
            let mut wp = w.clone();
            wp.data[i] += H;
            let mut wm = w.clone();
            wm.data[i] -= H;
            (project(&dense_forward(&x, &wp, &b).unwrap(), &g)
                - project(&dense_forward(&x, &wm, &b).unwrap(), &g))
                / (2.0 * H)
        },
        "dense dL/dw",
    );
    check_all(
        &gb,
        |i| {
            let mut bp = b.clone();
            bp.data[i] += H;
            let mut bm = b.clone();
            bm.data[i] -= H;
            (project(&dense_forward(&x, &w, &bp).unwrap(), &g)
                - project(&dense_forward(&x, &w, &bm).unwrap(), &g))
                / (2.0 * H)
        },
        "dense dL/db",
    );
}

#[test]
fn relu_gradient_matches_away_from_the_kink() {
    let mut rng = Lcg(0x3e);
    let x = rng.tensor_off_kink(vec![6, 3, 2]);
    let g = rng.tensor(vec![6, 3, 2]);
    let gx = relu_backward(&g, &x).unwrap();
    check_all(
        &gx,
        |i| {
            let mut xp = x.clone();
            xp.data[i] += H;
            let mut xm = x.clone();
            xm.data[i] -= H;
            (project(&relu_forward(&xp), &g) - project(&relu_forward(&xm), &g)) / (2.0 * H)
        },
        "relu dL/dx",
    );
}

#[test]
fn maxpool_gradient_matches_when_maxima_are_isolated() {
    // Spread values far enough apart that a 1e-5 nudge cannot reorder any
    // pooling window, keeping the function locally linear.
    let mut rng = Lcg(0x11);
    let mut data: Vec<f64> = (0..6 * 4 * 2).map(|i| i as f64 * 0.01).collect();
    // Deterministic shuffle.
    for i in (1..data.len()).rev() {
        let j = (rng.0 % (i as u64 + 1)) as usize;
        rng.next_f64();
        data.swap(i, j);
    }
    let x = Tensor::new(vec![6, 4, 2], data).unwrap();
    let g = rng.tensor(vec![3, 2, 2]);

    let (_, argmax) = maxpool_forward(&x).unwrap();
    let gx = maxpool_backward(&g, &argmax, &x.shape).unwrap();
    check_all(
        &gx,
        |i| {
            let mut xp = x.clone();
            xp.data[i] += H;
            let mut xm = x.clone();
            xm.data[i] -= H;
            let yp = maxpool_forward(&xp).unwrap().0;
            let ym = maxpool_forward(&xm).unwrap().0;
            (project(&yp, &g) - project(&ym, &g)) / (2.0 * H)
        },
        "maxpool dL/dx",
    );
}

#[test]
fn full_model_parameter_gradients_verify_across_seeds() {
    for seed in 0..3u64 {
        let channels = 1 + (seed as usize % 3);
        let model = CnnModel::<f64>::init(channels, 8, seed * 31 + 7).unwrap();
        let mut rng = Lcg(seed.wrapping_mul(0x5bd1e995).wrapping_add(1));
        let numel = 8 * 8 * channels;
        let x = Tensor::new(
            vec![8, 8, channels],
            (0..numel).map(|_| 0.5 + 0.45 * rng.next_f64()).collect(),
        )
        .unwrap();
        let label = (seed % 4) as usize;
        let reports = grad_check_model(&model, &x, label, 60, seed ^ 0xfeed).unwrap();
        assert_eq!(reports.len(), 5);
        for r in reports {
            assert!(
                r.max_rel_err < TOL,
                "seed {seed} layer {} ({}): {}",
                r.layer_index,
                r.kind.name(),
                r.max_rel_err
            );
        }
    }
}
