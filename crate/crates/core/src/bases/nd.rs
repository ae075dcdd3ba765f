//! Axis-line iteration over row-major buffers.

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for a in (0..dims.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * dims[a + 1];
    }
    s
}

/// Call `f` on every line along `axis` inside the leading sub-block `region`
/// of a row-major buffer with shape `dims`. Lines are gathered into a
/// contiguous scratch buffer and scattered back after `f` returns.
pub(crate) fn for_each_line<T: Copy + Default>(
    data: &mut [T],
    dims: &[usize],
    region: &[usize],
    axis: usize,
    mut f: impl FnMut(&mut [T]),
) {
    debug_assert_eq!(dims.len(), region.len());
    let st = strides(dims);
    let len = region[axis];
    let step = st[axis];
    let mut line = vec![T::default(); len];
    let mut idx = vec![0usize; dims.len()];
    loop {
        let base: usize = idx.iter().zip(&st).map(|(i, s)| i * s).sum();
        for (k, v) in line.iter_mut().enumerate() {
            *v = data[base + k * step];
        }
        f(&mut line);
        for (k, v) in line.iter().enumerate() {
            data[base + k * step] = *v;
        }
        // odometer over every axis but `axis`
        let mut a = dims.len();
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            if a == axis {
                continue;
            }
            idx[a] += 1;
            if idx[a] < region[a] {
                break;
            }
            idx[a] = 0;
        }
    }
}

/// Multi-index of a flat row-major offset.
pub(crate) fn unravel(mut flat: usize, dims: &[usize], out: &mut [usize]) {
    for a in (0..dims.len()).rev() {
        out[a] = flat % dims[a];
        flat /= dims[a];
    }
}
