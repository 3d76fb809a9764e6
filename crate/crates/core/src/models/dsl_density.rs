use igk_dsl::{differentiate, eval, parse_with_arity, DslError, Expr};

use super::Density;
use crate::error::{Error, Result};
use crate::measures::SampleSpace;

/// A density written in the expression language, evaluated at each atom's
/// coordinates (`x1, x2, ...`), or at `x1 = atom index` when the space has
/// none.
///
/// Partial derivatives come from the caller, from symbolic differentiation,
/// or, where differentiation is unsupported, from finite differences.
#[derive(Debug, Clone)]
pub struct DslDensity {
    text: String,
    expr: Expr,
    partials: Vec<Option<Expr>>,
    points: Vec<Vec<f64>>,
}

impl DslDensity {
    pub fn new(space: &SampleSpace, dim: usize, text: &str, grads: Option<&[String]>) -> Result<Self> {
        let points: Vec<Vec<f64>> = match space.coords() {
            Some(c) => c.to_vec(),
            None => (0..space.len()).map(|i| vec![i as f64]).collect(),
        };
        let m = points[0].len();
        let expr = parse_with_arity(text, m, dim)?;
        let partials = match grads {
            Some(g) => {
                if g.len() != dim {
                    return Err(Error::InvalidInput(format!(
                        "{} gradient expressions for {dim} parameters",
                        g.len()
                    )));
                }
                g.iter()
                    .map(|t| parse_with_arity(t, m, dim).map(Some))
                    .collect::<std::result::Result<Vec<_>, _>>()?
            }
            None => (0..dim)
                .map(|j| match differentiate(&expr, j) {
                    Ok(e) => Ok(Some(e)),
                    Err(DslError::Unsupported { .. }) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<std::result::Result<Vec<_>, _>>()?,
        };
        Ok(DslDensity {
            text: text.to_string(),
            expr,
            partials,
            points,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Exact partial derivative in `t_{j+1}`, if one is available.
    pub fn partial_expr(&self, j: usize) -> Option<&Expr> {
        self.partials.get(j).and_then(Option::as_ref)
    }

    fn eval_all(&self, e: &Expr, xi: &[f64]) -> Result<Vec<f64>> {
        self.points
            .iter()
            .map(|x| eval(e, x, xi).map_err(Error::from))
            .collect()
    }
}

impl Density for DslDensity {
    fn values(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.eval_all(&self.expr, xi)
    }

    fn partial(&self, xi: &[f64], j: usize) -> Option<Result<Vec<f64>>> {
        self.partial_expr(j).map(|e| self.eval_all(e, xi))
    }

    fn describe(&self) -> String {
        self.text.clone()
    }
}
