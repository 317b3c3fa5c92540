//! Checks the production layer kernels against deliberately naive
//! re-implementations: six plain nested loops for convolution, a textbook
//! matmul for the dense layer, and window scans for pooling.

use hybridsig_nn::{conv2d_forward, dense_forward, maxpool_forward, Tensor};

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
}

fn naive_conv2d(x: &Tensor<f64>, w: &Tensor<f64>, b: &Tensor<f64>) -> Tensor<f64> {
    let (h, wd, cin) = (x.shape[0], x.shape[1], x.shape[2]);
    let cout = w.shape[3];
    let mut out = Tensor::zeros(vec![h, wd, cout]);
    for oy in 0..h {
        for ox in 0..wd {
            for co in 0..cout {
                let mut acc = b.data[co];
                for ky in 0..3 {
                    for kx in 0..3 {
                        for ci in 0..cin {
                            let iy = oy as isize + ky as isize - 1;
                            let ix = ox as isize + kx as isize - 1;
                            if iy < 0 || iy >= h as isize || ix < 0 || ix >= wd as isize {
                                continue;
                            }
                            let xv = x.data[(iy as usize * wd + ix as usize) * cin + ci];
                            let wv = w.data[((ky * 3 + kx) * cin + ci) * cout + co];
                            acc += xv * wv;
                        }
                    }
                }
                out.data[(oy * wd + ox) * cout + co] = acc;
            }
        }
    }
    out
}

#[test]
fn conv_matches_naive_loops_across_shapes() {
    let mut rng = Lcg(0x1234_5678);
    for (h, w) in [(1, 1), (1, 5), (4, 4), (5, 3), (8, 8), (7, 2)] {
        for (cin, cout) in [(1, 1), (1, 4), (2, 3), (3, 2), (3, 8)] {
            let x = rng.tensor(vec![h, w, cin]);
            let k = rng.tensor(vec![3, 3, cin, cout]);
            let b = rng.tensor(vec![cout]);
            let fast = conv2d_forward(&x, &k, &b).unwrap();
            let slow = naive_conv2d(&x, &k, &b);
            assert_eq!(fast.shape, slow.shape);
            for (i, (a, e)) in fast.data.iter().zip(&slow.data).enumerate() {
                assert!(
                    (a - e).abs() < 1e-12,
                    "{h}x{w} cin={cin} cout={cout} index {i}: {a} vs {e}"
                );
            }
        }
    }
}

#[test]
fn dense_matches_naive_matmul() {
    let mut rng = Lcg(0x9999);
    for (fin, fout) in [(1, 1), (3, 7), (16, 4), (64, 256), (100, 13)] {
        let x = rng.tensor(vec![fin]);
        let w = rng.tensor(vec![fin, fout]);
        let b = rng.tensor(vec![fout]);
        let fast = dense_forward(&x, &w, &b).unwrap();
        for o in 0..fout {
            let mut acc = b.data[o];
            for i in 0..fin {
                acc += x.data[i] * w.data[i * fout + o];
            }
            assert!(
                (fast.data[o] - acc).abs() < 1e-12,
                "in={fin} out={fout} slot {o}"
            );
        }
    }
}

#[test]
fn maxpool_matches_window_scan_including_ties() {
    let mut rng = Lcg(0xabcdef);
    for (h, w, c) in [(2, 2, 1), (4, 6, 2), (5, 5, 3), (8, 8, 1)] {
        // Quantize to a handful of levels so ties actually occur.
        let numel = h * w * c;
        let data: Vec<f64> = (0..numel)
            .map(|_| (rng.next_f64() * 3.0).round() / 3.0)
            .collect();
        let x = Tensor::new(vec![h, w, c], data).unwrap();
        let (fast, argmax) = maxpool_forward(&x).unwrap();

        let (oh, ow) = (h / 2, w / 2);
        for oy in 0..oh {
            for ox in 0..ow {
                for ch in 0..c {
                    // First maximum in row-major scan order over the window.
                    let mut best_idx = ((2 * oy) * w + 2 * ox) * c + ch;
                    let mut best = x.data[best_idx];
                    for dy in 0..2 {
                        for dx in 0..2 {
                            let idx = ((2 * oy + dy) * w + 2 * ox + dx) * c + ch;
                            if x.data[idx] > best {
                                best = x.data[idx];
                                best_idx = idx;
                            }
                        }
                    }
                    let o = (oy * ow + ox) * c + ch;
                    assert_eq!(fast.data[o], best);
                    assert_eq!(argmax[o] as usize, best_idx, "tie resolution diverged");
                }
            }
        }
    }
}
