//! Sample sets shared by the benchmarks.

use chebycert::SampleSet;

/// `f(x)` on `n` equispaced points of `[-1, 1]`.
pub fn univariate_grid(n: usize, f: impl Fn(f64) -> f64) -> SampleSet<f64> {
    let xs: Vec<f64> = (0..n)
        .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
        .collect();
    SampleSet::new(
        xs.iter().map(|&x| vec![x]).collect(),
        xs.iter().map(|&x| f(x)).collect(),
    )
    .expect("distinct grid points")
}

/// `f(x, y)` on an `n x n` tensor grid over `[-1, 1]²`.
pub fn bivariate_grid(n: usize, f: impl Fn(f64, f64) -> f64) -> SampleSet<f64> {
    let axis: Vec<f64> = (0..n)
        .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
        .collect();
    let points: Vec<Vec<f64>> = axis
        .iter()
        .flat_map(|&x| axis.iter().map(move |&y| vec![x, y]))
        .collect();
    let values = points.iter().map(|p| f(p[0], p[1])).collect();
    SampleSet::new(points, values).expect("distinct grid points")
}
