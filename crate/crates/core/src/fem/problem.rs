use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::Side;

type VolumeFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;
type BoundaryFn = Arc<dyn Fn(f64, f64, Side) -> Complex64 + Send + Sync>;

/// Data of the impedance problem `-(Δ + k²) u = f` in the domain,
/// `(∂/∂n - ik) u = g` on its boundary.
#[derive(Clone)]
pub struct ProblemData {
    k: f64,
    source: VolumeFn,
    impedance: BoundaryFn,
    exact: Option<VolumeFn>,
}

impl fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemData")
            .field("k", &self.k)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemData {
    pub fn new(
        k: f64,
        source: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        impedance: impl Fn(f64, f64, Side) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_wavenumber(k)?;
        Ok(Self {
            k,
            source: Arc::new(source),
            impedance: Arc::new(impedance),
            exact: None,
        })
    }

    /// Plane wave `u = exp(ik d·x)`: `f = 0` and
    /// `g = ik (d·n - 1) exp(ik d·x)` on each side.
    pub fn plane_wave(k: f64, direction: [f64; 2]) -> Result<Self> {
        check_wavenumber(k)?;
        let len = direction[0].hypot(direction[1]);
        if (len - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "plane wave direction must be a unit vector, |d| = {len}"
            )));
        }
        let wave = move |x: f64, y: f64| {
            Complex64::new(0.0, k * (direction[0] * x + direction[1] * y)).exp()
        };
        Ok(Self {
            k,
            source: Arc::new(|_, _| Complex64::default()),
            impedance: Arc::new(move |x, y, side: Side| {
                let n = side.normal();
                let dn = direction[0] * n[0] + direction[1] * n[1];
                Complex64::new(0.0, k * (dn - 1.0)) * wave(x, y)
            }),
            exact: Some(Arc::new(wave)),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn source(&self, x: f64, y: f64) -> Complex64 {
        (self.source)(x, y)
    }

    pub fn impedance(&self, x: f64, y: f64, side: Side) -> Complex64 {
        (self.impedance)(x, y, side)
    }

    /// Exact solution, when known.
    pub fn exact(&self, x: f64, y: f64) -> Option<Complex64> {
        self.exact.as_ref().map(|u| u(x, y))
    }
}

fn check_wavenumber(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("wavenumber must be positive, got {k}")))
    }
}
