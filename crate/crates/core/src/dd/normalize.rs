use num_complex::Complex64;

use super::{Edge, Kind};
use crate::complex::ComplexValue;
use crate::error::{Error, Result};
use crate::ops::compute::Factored;
use crate::package::Package;

/// Result of normalizing the successor edges of a prospective node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Normalized {
    /// The divisor pulled out of the node; zero when every weight vanished.
    pub factor: ComplexValue,
    pub edges: [Edge; 4],
}

impl Normalized {
    pub fn is_zero(&self) -> bool {
        self.factor.is_zero()
    }
}

impl Package {
    /// Divides all weights by the leftmost weight of maximal magnitude.
    ///
    /// Cache-resident weights in `raw` are consumed. Weights whose parts are
    /// both within `ε` of zero become stubs. Magnitudes within a relative `ε`
    /// of the maximum count as tied, and the leftmost tied edge is chosen; its
    /// normalized weight is exactly one. The returned factor is interned.
    pub fn normalize(&mut self, kind: Kind, raw: [Edge; 4]) -> Result<Normalized> {
        let (div, edges) = self.normalize_raw(kind, raw)?;
        let factor = self.cn.lookup_complex_unbounded(div.re, div.im)?;
        Ok(Normalized { factor, edges })
    }

    /// [`normalize`](Self::normalize) without interning the factor; a zero
    /// factor means every weight vanished.
    pub(crate) fn normalize_raw(&mut self, kind: Kind, raw: [Edge; 4]) -> Result<(Complex64, [Edge; 4])> {
        let arity = kind.arity();
        let eps = self.cn.epsilon();

        let mut vals = [Complex64::new(0.0, 0.0); 4];
        let mut nonzero = [false; 4];
        let mut bad = None;
        for i in 0..arity {
            let z = self.cn.value(raw[i].weight);
            if !(z.re.is_finite() && z.im.is_finite()) {
                bad = Some(z);
            }
            vals[i] = z;
            nonzero[i] = z.re.abs() > eps || z.im.abs() > eps;
        }
        for e in &raw {
            self.cn.release(e.weight);
        }
        if let Some(z) = bad {
            return Err(Error::NonFinite { re: z.re, im: z.im });
        }

        let mags = vals.map(|v| v.norm_sqr());
        let max = (0..arity)
            .filter(|&i| nonzero[i])
            .map(|i| mags[i])
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Ok((Complex64::new(0.0, 0.0), [Edge::ZERO; 4]));
        }
        let sel = (0..arity)
            .find(|&i| nonzero[i] && max - mags[i] <= max * eps)
            .expect("maximum is attained");

        let div = vals[sel];
        let mut edges = [Edge::ZERO; 4];
        for i in 0..arity {
            if !nonzero[i] {
                continue;
            }
            if i == sel {
                edges[i] = Edge {
                    node: raw[i].node,
                    weight: ComplexValue::ONE,
                };
                continue;
            }
            let q = vals[i] / div;
            let w = self.cn.lookup_complex(q.re, q.im)?;
            if !w.is_zero() {
                edges[i] = Edge {
                    node: raw[i].node,
                    weight: w,
                };
            }
        }
        Ok((div, edges))
    }

    /// Normalizes `raw` and returns an edge to the unique node for `var`,
    /// or the zero stub if every successor vanished.
    pub fn make_node(&mut self, kind: Kind, var: usize, raw: [Edge; 4]) -> Result<Edge> {
        let f = self.make_node_raw(kind, var, raw)?;
        if f.is_zero() {
            return Ok(Edge::ZERO);
        }
        let weight = self.cn.lookup_complex_unbounded(f.factor.re, f.factor.im)?;
        Ok(if weight.is_zero() {
            Edge::ZERO
        } else {
            Edge { node: f.node, weight }
        })
    }

    /// [`make_node`](Self::make_node) leaving the factor uninterned.
    pub(crate) fn make_node_raw(&mut self, kind: Kind, var: usize, raw: [Edge; 4]) -> Result<Factored> {
        if var >= self.config.max_qubits {
            for e in &raw {
                self.cn.release(e.weight);
            }
            return Err(Error::Index(format!(
                "variable {var} exceeds package limit {}",
                self.config.max_qubits
            )));
        }
        let (factor, edges) = self.normalize_raw(kind, raw)?;
        if factor == Complex64::new(0.0, 0.0) {
            return Ok(Factored::ZERO);
        }
        let node = self.unique_lookup(kind, var, edges);
        Ok(Factored { node, factor })
    }
}
