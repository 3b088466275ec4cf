//! Exact surface gradient and Laplace–Beltrami operator on parametrized
//! surfaces, used as ground truth for the mesh operators.
//!
//! With `W = sqrt(EG - F²)`,
//!
//! ```text
//! ∇g = ((g_u G - g_v F) x_u + (g_v E - g_u F) x_v) / W²
//! Δg = (∂_u((G g_u - F g_v)/W) + ∂_v((E g_v - F g_u)/W)) / W
//! ```

mod function;
mod surface;

pub use function::{ClosureFunction, DslFunction, FunctionJet, ScalarFunction, FIRST_STEP, SECOND_STEP};
pub use surface::{FundamentalForm, ParametricSurface, PolarAxis, SurfaceJet, POLE_BAND};

use thiserror::Error;

use crate::dsl::{EvalError, FieldExpr};
use crate::mesh::{TriangleMesh, Vec3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("parametrization is singular at (u, v) = ({u}, {v})")]
    Singular { u: f64, v: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("no analytic reference for this case: {0}")]
    Unavailable(String),
    #[error("at vertex {vertex}: {error}")]
    AtVertex { vertex: usize, error: Box<OracleError> },
}

/// Surface gradient as an ambient vector.
pub fn surface_gradient(
    surface: &ParametricSurface,
    g: &impl ScalarFunction,
    u: f64,
    v: f64,
) -> Result<Vec3, OracleError> {
    let ff = surface.fundamental_form(u, v)?;
    let j = g.jet(u, v)?;
    let s = surface.jet(u, v);
    let det = ff.det();
    Ok(s.xu * ((j.du * ff.g - j.dv * ff.f) / det) + s.xv * ((j.dv * ff.e - j.du * ff.f) / det))
}

/// Laplace–Beltrami operator in divergence form.
pub fn surface_laplacian(
    surface: &ParametricSurface,
    g: &impl ScalarFunction,
    u: f64,
    v: f64,
) -> Result<f64, OracleError> {
    let ff = surface.fundamental_form(u, v)?;
    let j = g.jet(u, v)?;
    let w = ff.det().sqrt();
    let w_u = (ff.e_u * ff.g + ff.e * ff.g_u - 2.0 * ff.f * ff.f_u) / (2.0 * w);
    let w_v = (ff.e_v * ff.g + ff.e * ff.g_v - 2.0 * ff.f * ff.f_v) / (2.0 * w);
    // P = (G g_u - F g_v)/W and Q = (E g_v - F g_u)/W.
    let p = ff.g * j.du - ff.f * j.dv;
    let q = ff.e * j.dv - ff.f * j.du;
    let p_u = ff.g_u * j.du + ff.g * j.duu - ff.f_u * j.dv - ff.f * j.duv;
    let q_v = ff.e_v * j.dv + ff.e * j.dvv - ff.f_v * j.du - ff.f * j.duv;
    let div = (p_u / w - p * w_u / (w * w)) + (q_v / w - q * w_v / (w * w));
    Ok(div / w)
}

/// A surface family with a known parametrization, for comparing mesh
/// operators against exact values at vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceFamily {
    Sphere { radius: f64 },
    Torus { a: f64, r: f64 },
    Plane,
}

/// Exact value, gradient and Laplacian at one vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSample {
    pub value: f64,
    pub gradient: Vec3,
    pub laplacian: f64,
}

/// Evaluates the exact operators at every vertex of `mesh`, which is assumed
/// to sample the given surface.
///
/// Sphere vertices use the chart with polar axis `z` when `|z| < 0.7·|p|`
/// and the chart with polar axis `x` otherwise, so no vertex lies near a
/// chart pole; expressions in `u`, `v` are refused there. Torus vertices use
/// the mesh's stored parameters when present.
pub fn oracle_on_mesh(
    family: SurfaceFamily,
    expr: &FieldExpr,
    mesh: &TriangleMesh,
) -> Result<Vec<OracleSample>, OracleError> {
    let charts: Vec<ParametricSurface> = match family {
        SurfaceFamily::Sphere { radius } => {
            if expr.variables().iter().any(|v| v.is_parametric()) {
                return Err(OracleError::Unavailable(
                    "sphere fields must be written in x1, x2, x3".into(),
                ));
            }
            vec![
                ParametricSurface::Sphere { radius, polar: PolarAxis::Z },
                ParametricSurface::Sphere { radius, polar: PolarAxis::X },
            ]
        }
        SurfaceFamily::Torus { a, r } => vec![ParametricSurface::Torus { a, r }],
        SurfaceFamily::Plane => vec![ParametricSurface::Plane],
    };
    let functions: Vec<DslFunction> = charts.iter().map(|c| DslFunction::new(expr, c)).collect();
    let params = match family {
        SurfaceFamily::Torus { .. } => mesh.params(),
        _ => None,
    };
    mesh.vertices()
        .iter()
        .enumerate()
        .map(|(vertex, p)| {
            let k = usize::from(charts.len() == 2 && p.z.abs() >= 0.7 * p.norm());
            let (u, v) = match params {
                Some(params) => (params[vertex][0], params[vertex][1]),
                None => charts[k].chart_of(p),
            };
            let sample = || -> Result<OracleSample, OracleError> {
                Ok(OracleSample {
                    value: functions[k].jet(u, v)?.value,
                    gradient: surface_gradient(&charts[k], &functions[k], u, v)?,
                    laplacian: surface_laplacian(&charts[k], &functions[k], u, v)?,
                })
            };
            sample().map_err(|error| OracleError::AtVertex {
                vertex,
                error: Box::new(error),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn dsl(text: &str, s: &ParametricSurface) -> DslFunction {
        DslFunction::new(&parse(text).unwrap(), s)
    }

    #[test]
    fn constants_have_no_derivatives() {
        let t = ParametricSurface::Torus { a: 2.0, r: 1.0 };
        let g = dsl("4.5", &t);
        assert_eq!(surface_gradient(&t, &g, 0.3, 0.9).unwrap(), Vec3::zeros());
        assert_eq!(surface_laplacian(&t, &g, 0.3, 0.9).unwrap(), 0.0);
    }

    #[test]
    fn sphere_gradient_of_x1_is_projected_e1() {
        let s = ParametricSurface::unit_sphere(PolarAxis::Z);
        let g = dsl("x1", &s);
        let (u, v) = (1.2, -0.7);
        let x = s.point(u, v);
        let grad = surface_gradient(&s, &g, u, v).unwrap();
        assert!((grad - (Vec3::x() - x * x.x)).norm() < 1e-14);
    }

    #[test]
    fn torus_laplacian_of_cos_v() {
        let t = ParametricSurface::Torus { a: 2.0, r: 1.0 };
        let g = dsl("cos(v)", &t);
        for (u, v) in [(0.0f64, 0.0f64), (1.0, 2.0), (-2.5, 0.3)] {
            let expected = -v.cos() / (2.0 + u.cos()).powi(2);
            assert!((surface_laplacian(&t, &g, u, v).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn sphere_rejects_parametric_fields() {
        let mesh = crate::mesh::gen_icosphere(0).unwrap();
        let r = oracle_on_mesh(SurfaceFamily::Sphere { radius: 1.0 }, &parse("u").unwrap(), &mesh);
        assert!(matches!(r, Err(OracleError::Unavailable(_))));
    }
}
