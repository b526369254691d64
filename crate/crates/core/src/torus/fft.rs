use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place unnormalised FFT of a row-major cube with `side^dim` entries.
pub(crate) fn fft_cube(data: &mut [Complex64], dim: usize, side: usize, direction: FftDirection) {
    assert_eq!(data.len(), side.pow(dim as u32));
    if side == 1 {
        return;
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(side, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::default(); side];
    for axis in 0..dim {
        let stride = side.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        let block = stride * side;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (l, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + l * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (l, v) in line.iter().enumerate() {
                    data[base + l * stride] = *v;
                }
            }
        }
    }
}
