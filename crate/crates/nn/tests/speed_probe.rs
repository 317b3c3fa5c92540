//! Ignored-by-default timing probe for the full-size model. Run with
//! `cargo test -p hybridsig-nn --test speed_probe -- --ignored --nocapture`
//! to estimate training throughput on this machine.

use hybridsig_nn::{train_step, AdamState, CnnModel, Tensor};
use std::time::Instant;

#[test]
#[ignore]
fn time_full_size_training_step() {
    for channels in [1usize, 2, 3] {
        let mut model = CnnModel::<f32>::init(channels, 128, 1).unwrap();
        let mut opt = AdamState::new(&model, 1e-3);
        let numel = 128 * 128 * channels;
        let batch: Vec<(Tensor<f32>, usize)> = (0..8)
            .map(|i| {
                let data = (0..numel).map(|j| ((i * 131 + j) % 256) as f32 / 255.0).collect();
                (Tensor::new(vec![128, 128, channels], data).unwrap(), i % 4)
            })
            .collect();
        // Warm up once, then measure.
        train_step(&mut model, &mut opt, &batch[..2].to_vec()).unwrap();
        let start = Instant::now();
        let steps = 3;
        for _ in 0..steps {
            train_step(&mut model, &mut opt, &batch).unwrap();
        }
        let per_image = start.elapsed().as_secs_f64() / (steps * batch.len()) as f64;
        println!(
            "channels={channels}: {:.1} ms/image-step, est {:.1} s per 3200-image training run",
            per_image * 1e3,
            per_image * 3200.0
        );
    }
}
