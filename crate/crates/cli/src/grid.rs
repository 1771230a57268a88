//! Tensor-product sample grids with values from an expression.
//!
//! A grid is written `bounds;resolution;nodes;expr`, for example
//! `-1:1,-1:1;5;uniform;x1*x2` or `-1:1;9;chebyshev;abs(x1)`. The resolution
//! is either one count for every axis or a comma-separated count per axis.

use std::f64::consts::PI;
use std::str::FromStr;

use chebycert::{SampleSet, Scalar};
use thiserror::Error;

use crate::expr::{EvalError, Expr, ParseError};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid spec must look like 'bounds;resolution;nodes;expr', got {0:?}")]
    Shape(String),
    #[error("invalid bound {0:?}: expected 'lo:hi'")]
    Bound(String),
    #[error("empty interval [{0}, {1}]")]
    EmptyInterval(String, String),
    #[error("invalid resolution {0:?}: need integers >= 2")]
    Resolution(String),
    #[error("resolution lists {found} axes but bounds list {expected}")]
    AxisCount { expected: usize, found: usize },
    #[error("unknown node type {0:?}: expected 'uniform' or 'chebyshev'")]
    Nodes(String),
    #[error("expression: {0}")]
    Parse(#[from] ParseError),
    #[error("evaluating at {point}: {source}")]
    Eval { point: String, source: EvalError },
    #[error(transparent)]
    Samples(#[from] chebycert::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeType {
    Uniform,
    /// Extrema of the Chebyshev polynomial, `cos(kπ/(n-1))` mapped onto the
    /// interval.
    Chebyshev,
}

impl NodeType {
    pub fn name(self) -> &'static str {
        match self {
            NodeType::Uniform => "uniform",
            NodeType::Chebyshev => "chebyshev",
        }
    }
}

impl FromStr for NodeType {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, GridError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(NodeType::Uniform),
            "chebyshev" => Ok(NodeType::Chebyshev),
            other => Err(GridError::Nodes(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    /// Interval end points as written, parsed per arithmetic mode.
    pub bounds: Vec<(String, String)>,
    pub resolution: Vec<usize>,
    pub nodes: NodeType,
    pub expr: String,
}

impl FromStr for GridSpec {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, GridError> {
        let parts: Vec<&str> = s.splitn(4, ';').collect();
        let [bounds, res, nodes, expr] = parts[..] else {
            return Err(GridError::Shape(s.to_string()));
        };
        let bounds = bounds
            .split(',')
            .map(|b| {
                // split on the colon so negative bounds keep their sign
                let (lo, hi) = b
                    .split_once(':')
                    .ok_or_else(|| GridError::Bound(b.to_string()))?;
                Ok((lo.trim().to_string(), hi.trim().to_string()))
            })
            .collect::<Result<Vec<_>, GridError>>()?;
        let mut resolution = res
            .split(',')
            .map(|r| match r.trim().parse::<usize>() {
                Ok(n) if n >= 2 => Ok(n),
                _ => Err(GridError::Resolution(res.to_string())),
            })
            .collect::<Result<Vec<_>, GridError>>()?;
        if resolution.len() == 1 {
            resolution = vec![resolution[0]; bounds.len()];
        }
        if resolution.len() != bounds.len() {
            return Err(GridError::AxisCount {
                expected: bounds.len(),
                found: resolution.len(),
            });
        }
        Ok(GridSpec {
            bounds,
            resolution,
            nodes: nodes.parse()?,
            expr: expr.trim().to_string(),
        })
    }
}

impl GridSpec {
    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn axis<T: Scalar>(&self, k: usize) -> Result<Vec<T>, GridError> {
        let (lo_s, hi_s) = &self.bounds[k];
        let bound_err = || GridError::Bound(format!("{lo_s}:{hi_s}"));
        let lo = T::parse(lo_s).ok_or_else(bound_err)?;
        let hi = T::parse(hi_s).ok_or_else(bound_err)?;
        if lo >= hi {
            return Err(GridError::EmptyInterval(lo_s.clone(), hi_s.clone()));
        }
        let n = self.resolution[k];
        let last = (n - 1) as i64;
        Ok(match self.nodes {
            NodeType::Uniform => (0..=last)
                .map(|i| {
                    lo.clone() + (hi.clone() - lo.clone()) * T::from_i64(i) / T::from_i64(last)
                })
                .collect(),
            NodeType::Chebyshev => {
                let two = T::from_i64(2);
                let mid = (lo.clone() + hi.clone()) / two.clone();
                let half = (hi.clone() - lo.clone()) / two;
                (0..=last)
                    .map(|i| {
                        // cos(kπ/(n-1)) with k = n-1-i, written as a sine so
                        // the nodes come out ascending, symmetric, with an
                        // exact 0 in the middle
                        let t = (PI * (2 * i - last) as f64 / (2 * last) as f64).sin();
                        if i == 0 {
                            lo.clone()
                        } else if i == last {
                            hi.clone()
                        } else {
                            mid.clone() + half.clone() * T::from_f64(t)
                        }
                    })
                    .collect()
            }
        })
    }

    /// Evaluates the expression on the full tensor grid (first axis slowest).
    pub fn generate<T: Scalar>(&self) -> Result<SampleSet<T>, GridError> {
        let d = self.dimension();
        let expr = Expr::<T>::parse(&self.expr, d)?;
        let axes = (0..d)
            .map(|k| self.axis::<T>(k))
            .collect::<Result<Vec<_>, _>>()?;
        let mut points: Vec<Vec<T>> = vec![Vec::new()];
        for axis in &axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(v.clone());
                        q
                    })
                })
                .collect();
        }
        let values = points
            .iter()
            .map(|p| {
                expr.eval(p).map_err(|source| GridError::Eval {
                    point: format!(
                        "({})",
                        p.iter()
                            .map(|v| v.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SampleSet::new(points, values)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chebycert::Rational;

    #[test]
    fn cube_fixture_grid() {
        let g: GridSpec = "-1:1;1001;uniform;x1^3".parse().unwrap();
        let s = g.generate::<f64>().unwrap();
        assert_eq!(s.len(), 1001);
        assert_eq!(s.point(0), &[-1.0]);
        assert_eq!(s.point(1000), &[1.0]);
        assert!((s.point(750)[0] - 0.5).abs() < 1e-15);
        assert!((s.values()[250] + 0.125).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_nodes() {
        let g: GridSpec = "-1:1;5;chebyshev;x1^2".parse().unwrap();
        let s = g.generate::<f64>().unwrap();
        let expected: Vec<f64> = (0..5).rev().map(|k| (k as f64 * PI / 4.0).cos()).collect();
        for (p, e) in s.points().iter().zip(&expected) {
            assert!((p[0] - e).abs() < 1e-15, "{p:?} vs {e}");
        }
        assert_eq!(s.point(2), &[0.0]);
    }

    #[test]
    fn square_corners() {
        let g: GridSpec = "-1:1,-1:1;2;uniform;x1*x2".parse().unwrap();
        let s = g.generate::<f64>().unwrap();
        assert_eq!(
            s.points(),
            &[
                vec![-1.0, -1.0],
                vec![-1.0, 1.0],
                vec![1.0, -1.0],
                vec![1.0, 1.0]
            ]
        );
        assert_eq!(s.values(), &[1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn exact_uniform_grid() {
        let g: GridSpec = "-1:1;5;uniform;x1^2".parse().unwrap();
        let s = g.generate::<Rational>().unwrap();
        assert_eq!(s.point(1), &[Rational::new((-1).into(), 2.into())]);
        assert_eq!(s.values()[1], Rational::new(1.into(), 4.into()));
    }

    #[test]
    fn per_axis_resolution_and_errors() {
        let g: GridSpec = "0:1,0:2;3,2;uniform;x1+x2".parse().unwrap();
        assert_eq!(g.generate::<f64>().unwrap().len(), 6);
        assert!(matches!(
            "0:1;3;uniform".parse::<GridSpec>(),
            Err(GridError::Shape(_))
        ));
        assert!(matches!(
            "0-1;3;uniform;x1".parse::<GridSpec>(),
            Err(GridError::Bound(_))
        ));
        assert!(matches!(
            "0:1;1;uniform;x1".parse::<GridSpec>(),
            Err(GridError::Resolution(_))
        ));
        assert!(matches!(
            "0:1;3,3;uniform;x1".parse::<GridSpec>(),
            Err(GridError::AxisCount { .. })
        ));
        assert!(matches!(
            "0:1;3;random;x1".parse::<GridSpec>(),
            Err(GridError::Nodes(_))
        ));
        let g: GridSpec = "1:0;3;uniform;x1".parse().unwrap();
        assert!(matches!(
            g.generate::<f64>(),
            Err(GridError::EmptyInterval(..))
        ));
        let g: GridSpec = "0:1;3;uniform;x1 +".parse().unwrap();
        assert!(matches!(g.generate::<f64>(), Err(GridError::Parse(_))));
        let g: GridSpec = "0:1;3;uniform;1/x1".parse().unwrap();
        assert!(matches!(g.generate::<f64>(), Err(GridError::Eval { .. })));
    }
}
