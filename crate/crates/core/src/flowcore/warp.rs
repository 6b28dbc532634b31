use crate::flowcore::FlowField;
use crate::videoio::GrayFrame;

/// Bilinear sample of a row-major buffer; coordinates are clamped to the border.
#[inline]
pub fn sample_bilinear(data: &[f64], width: usize, height: usize, x: f64, y: f64) -> f64 {
    let x = x.clamp(0.0, (width - 1) as f64);
    let y = y.clamp(0.0, (height - 1) as f64);
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(width - 1);
    let y1 = (y0 + 1).min(height - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let top = data[y0 * width + x0] * (1.0 - fx) + data[y0 * width + x1] * fx;
    let bottom = data[y1 * width + x0] * (1.0 - fx) + data[y1 * width + x1] * fx;
    top * (1.0 - fy) + bottom * fy
}

pub(crate) fn warp_buffer(data: &[f64], width: usize, height: usize, flow: &FlowField) -> Vec<f64> {
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            out.push(sample_bilinear(
                data,
                width,
                height,
                x as f64 + flow.u[i],
                y as f64 + flow.v[i],
            ));
        }
    }
    out
}

/// `out(x, y) = image(x + u, y + v)`, sampled bilinearly with border clamping.
pub fn warp_bilinear(image: &GrayFrame, flow: &FlowField) -> GrayFrame {
    assert_eq!(
        (image.width, image.height),
        (flow.width, flow.height),
        "warp: image and flow dimensions differ"
    );
    GrayFrame {
        width: image.width,
        height: image.height,
        data: warp_buffer(&image.data, image.width, image.height, flow),
    }
}
