use crate::flowcore::warp::sample_bilinear;
use crate::videoio::GrayFrame;

/// Anti-aliasing blur for a given downsampling factor.
pub fn pyramid_sigma(factor: f64) -> f64 {
    0.6 * (1.0 / (factor * factor) - 1.0).sqrt()
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(1.0) as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Separable Gaussian blur with replicated borders.
pub fn gaussian_blur(data: &[f64], width: usize, height: usize, sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return data.to_vec();
    }
    let k = gaussian_kernel(sigma);
    let r = (k.len() / 2) as isize;
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;

    let mut tmp = vec![0.0; data.len()];
    for y in 0..height {
        let row = &data[y * width..(y + 1) * width];
        for x in 0..width {
            tmp[y * width + x] = k
                .iter()
                .enumerate()
                .map(|(j, w)| w * row[clamp(x as isize + j as isize - r, width)])
                .sum();
        }
    }
    let mut out = vec![0.0; data.len()];
    for y in 0..height {
        for x in 0..width {
            out[y * width + x] = k
                .iter()
                .enumerate()
                .map(|(j, w)| w * tmp[clamp(y as isize + j as isize - r, height) * width + x])
                .sum();
        }
    }
    out
}

/// Resamples a buffer to a new size by bilinear interpolation at pixel centres.
pub fn resample_bilinear(
    data: &[f64],
    width: usize,
    height: usize,
    new_width: usize,
    new_height: usize,
) -> Vec<f64> {
    let sx = width as f64 / new_width as f64;
    let sy = height as f64 / new_height as f64;
    let mut out = Vec::with_capacity(new_width * new_height);
    for y in 0..new_height {
        let src_y = (y as f64 + 0.5) * sy - 0.5;
        for x in 0..new_width {
            let src_x = (x as f64 + 0.5) * sx - 0.5;
            out.push(sample_bilinear(data, width, height, src_x, src_y));
        }
    }
    out
}

/// Builds a Gaussian pyramid, finest level first. Each level is the previous one
/// blurred and resampled by `factor`; levels with either side below `min_size`
/// are not produced.
pub fn gaussian_pyramid(image: &GrayFrame, factor: f64, min_size: usize) -> Vec<GrayFrame> {
    assert!(
        factor > 0.0 && factor < 1.0,
        "pyramid factor must lie in (0, 1)"
    );
    let sigma = pyramid_sigma(factor);
    let mut levels = vec![image.clone()];
    loop {
        let prev = levels.last().expect("pyramid has a first level");
        let nw = (prev.width as f64 * factor).round() as usize;
        let nh = (prev.height as f64 * factor).round() as usize;
        if nw < min_size.max(2) || nh < min_size.max(2) || (nw, nh) == (prev.width, prev.height) {
            break;
        }
        let blurred = gaussian_blur(&prev.data, prev.width, prev.height, sigma);
        let data = resample_bilinear(&blurred, prev.width, prev.height, nw, nh);
        levels.push(GrayFrame {
            width: nw,
            height: nh,
            data,
        });
    }
    levels
}
