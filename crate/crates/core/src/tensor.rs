//! Dense tensor contractions used for evaluating separable sums on
//! tensor-product grids.

use ndarray::{Array2, ArrayD, Axis, IxDyn};

/// Contracts every axis `j` of `tensor` with `matrices[j]` (shape `G_j x extent_j`),
/// returning a tensor of shape `(G_1, ..., G_d)`.
///
/// Each step contracts the trailing axis and moves the new grid axis to the
/// front, so after `d` steps the axis order is restored.
pub fn contract_all(tensor: ArrayD<f64>, matrices: &[Array2<f64>]) -> ArrayD<f64> {
    let d = tensor.ndim();
    assert_eq!(d, matrices.len());
    let mut current = tensor.as_standard_layout().into_owned();
    for step in 0..d {
        let axis = d - 1 - step;
        let mat = &matrices[axis];
        let shape = current.shape().to_vec();
        let extent = shape[d - 1];
        assert_eq!(mat.ncols(), extent, "matrix/tensor extent mismatch on axis {axis}");
        let rest: usize = shape[..d - 1].iter().product();
        let flat = current.into_shape_with_order((rest, extent)).expect("standard layout");
        // (rest x extent) . (extent x G) -> (rest x G), then G to the front.
        let contracted = flat.dot(&mat.t());
        let moved = contracted.t().as_standard_layout().into_owned();
        let mut new_shape = Vec::with_capacity(d);
        new_shape.push(mat.nrows());
        new_shape.extend_from_slice(&shape[..d - 1]);
        current = moved.into_shape_with_order(IxDyn(&new_shape)).expect("standard layout");
    }
    current
}

/// In-place inclusive prefix sums along every axis of a standard-layout array, turning
/// a histogram into its cumulative counts.
pub fn cumulate_all_axes(tensor: &mut ArrayD<f64>) {
    let shape = tensor.shape().to_vec();
    let data = tensor
        .as_slice_mut()
        .expect("cumulate_all_axes needs a standard-layout array");
    let mut stride = 1usize;
    for &len in shape.iter().rev() {
        let block = len * stride;
        if block > 0 && stride == 1 {
            for chunk in data.chunks_exact_mut(block) {
                let mut acc = 0.0;
                for c in chunk {
                    acc += *c;
                    *c = acc;
                }
            }
        } else if block > 0 {
            for chunk in data.chunks_exact_mut(block) {
                for i in 1..len {
                    let (done, rest) = chunk.split_at_mut(i * stride);
                    let prev = &done[(i - 1) * stride..];
                    for (c, p) in rest[..stride].iter_mut().zip(prev) {
                        *c += p;
                    }
                }
            }
        }
        stride = block;
    }
}

/// Evaluates `sum_i prod_j factors[j][(g_j, idx[i][j])]` on the full grid, where each
/// `factors[j]` has shape `G_j x K_j` and `idx` rows pick one column per axis.
///
/// The leading axis is handled by a single matrix product, so the cost is
/// `O(rows * prod_{j>=2} G_j + G_1 * K_1 * prod_{j>=2} G_j)` when the first-axis
/// indices are distinct, which holds for rank vectors.
pub fn separable_sum_on_grid(factors: &[Array2<f64>], idx: &[Vec<usize>]) -> ArrayD<f64> {
    let d = factors.len();
    assert!(d >= 1);
    let tail_shape: Vec<usize> = factors[1..].iter().map(|f| f.nrows()).collect();
    let tail_len: usize = tail_shape.iter().product();
    let k1 = factors[0].ncols();

    let mut weights = Array2::<f64>::zeros((k1, tail_len));
    let mut outer = vec![0.0f64; tail_len];
    for row in idx {
        outer_product(&factors[1..], &row[1..], &mut outer);
        let mut target = weights.row_mut(row[0]);
        for (t, o) in target.iter_mut().zip(&outer) {
            *t += o;
        }
    }
    let result = factors[0].dot(&weights);
    let mut shape = vec![factors[0].nrows()];
    shape.extend(tail_shape);
    result.into_shape_with_order(IxDyn(&shape)).expect("standard layout")
}

fn outer_product(factors: &[Array2<f64>], cols: &[usize], out: &mut [f64]) {
    out[0] = 1.0;
    let mut len = 1;
    for (f, &c) in factors.iter().zip(cols) {
        let column = f.index_axis(Axis(1), c);
        let g = column.len();
        // Expand in place from the back so earlier entries are still unread.
        for a in (0..len).rev() {
            let base = out[a];
            for (b, v) in column.iter().enumerate().rev() {
                out[a * g + b] = base * v;
            }
        }
        len *= g;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulate_matches_axis_accumulation() {
        let shape = [3usize, 4, 5];
        let mut a = ArrayD::from_shape_fn(IxDyn(&shape), |ix| (ix[0] * 7 + ix[1] * 3 + ix[2]) as f64 % 5.0);
        let mut b = a.clone();
        cumulate_all_axes(&mut a);
        for axis in 0..3 {
            b.accumulate_axis_inplace(Axis(axis), |&prev, cur| *cur += prev);
        }
        assert_eq!(a, b);
    }
    use ndarray::array;

    #[test]
    fn contraction_matches_naive_sum() {
        let t = ArrayD::from_shape_vec(IxDyn(&[2, 3]), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let m0 = array![[1.0, 0.5], [0.0, 2.0]];
        let m1 = array![[1.0, 1.0, 1.0], [0.0, 1.0, -1.0], [2.0, 0.0, 0.0], [0.1, 0.2, 0.3]];
        let out = contract_all(t.clone(), &[m0.clone(), m1.clone()]);
        assert_eq!(out.shape(), &[2, 4]);
        for g0 in 0..2 {
            for g1 in 0..4 {
                let mut s = 0.0;
                for a in 0..2 {
                    for b in 0..3 {
                        s += m0[[g0, a]] * m1[[g1, b]] * t[[a, b]];
                    }
                }
                assert!((out[[g0, g1]] - s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn separable_sum_three_axes() {
        let f0 = array![[1.0, 2.0], [3.0, 4.0]];
        let f1 = array![[0.5, 1.0], [1.5, -1.0], [2.0, 0.0]];
        let f2 = array![[1.0, 0.0], [0.25, 0.75]];
        let idx = vec![vec![0, 1, 0], vec![1, 0, 1]];
        let out = separable_sum_on_grid(&[f0.clone(), f1.clone(), f2.clone()], &idx);
        assert_eq!(out.shape(), &[2, 3, 2]);
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    let s: f64 = idx.iter().map(|r| f0[[a, r[0]]] * f1[[b, r[1]]] * f2[[c, r[2]]]).sum();
                    assert!((out[[a, b, c]] - s).abs() < 1e-12);
                }
            }
        }
    }
}
