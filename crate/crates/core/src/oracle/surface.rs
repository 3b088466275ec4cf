use super::OracleError;
use crate::dsl::{parse, FieldExpr};
use crate::mesh::Vec3;

/// Half-width of the parameter band around the sphere poles where the chart
/// is treated as singular.
pub const POLE_BAND: f64 = 1e-3;

/// Which coordinate axis a sphere chart uses as its polar axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarAxis {
    /// `(sin u cos v, sin u sin v, cos u)`.
    Z,
    /// `(cos u, sin u cos v, sin u sin v)`.
    X,
}

/// A parametrized surface with closed-form partial derivatives.
///
/// Sphere charts take `u` as colatitude and `v` as longitude. The torus is
/// `((a + r cos u) cos v, (a + r cos u) sin v, r sin u)`. The plane is
/// `(u, v, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParametricSurface {
    Sphere { radius: f64, polar: PolarAxis },
    Torus { a: f64, r: f64 },
    Plane,
}

/// Position and partial derivatives up to second order at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet {
    pub x: Vec3,
    pub xu: Vec3,
    pub xv: Vec3,
    pub xuu: Vec3,
    pub xuv: Vec3,
    pub xvv: Vec3,
}

/// First fundamental form and its first partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub e_u: f64,
    pub e_v: f64,
    pub f_u: f64,
    pub f_v: f64,
    pub g_u: f64,
    pub g_v: f64,
}

impl FundamentalForm {
    pub fn det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }
}

/// Reorders `(p, q, s)` so the polar coordinate lands on the chart's axis.
fn orient(polar: PolarAxis, p: f64, q: f64, s: f64) -> Vec3 {
    match polar {
        PolarAxis::Z => Vec3::new(p, q, s),
        PolarAxis::X => Vec3::new(s, p, q),
    }
}

impl ParametricSurface {
    pub fn unit_sphere(polar: PolarAxis) -> Self {
        ParametricSurface::Sphere { radius: 1.0, polar }
    }

    pub fn point(&self, u: f64, v: f64) -> Vec3 {
        self.jet(u, v).x
    }

    pub fn jet(&self, u: f64, v: f64) -> SurfaceJet {
        let (su, cu, sv, cv) = (u.sin(), u.cos(), v.sin(), v.cos());
        match *self {
            ParametricSurface::Sphere { radius: k, polar } => {
                let o = |p: f64, q: f64, s: f64| orient(polar, k * p, k * q, k * s);
                SurfaceJet {
                    x: o(su * cv, su * sv, cu),
                    xu: o(cu * cv, cu * sv, -su),
                    xv: o(-su * sv, su * cv, 0.0),
                    xuu: o(-su * cv, -su * sv, -cu),
                    xuv: o(-cu * sv, cu * cv, 0.0),
                    xvv: o(-su * cv, -su * sv, 0.0),
                }
            }
            ParametricSurface::Torus { a, r } => {
                let rho = a + r * cu;
                SurfaceJet {
                    x: Vec3::new(rho * cv, rho * sv, r * su),
                    xu: Vec3::new(-r * su * cv, -r * su * sv, r * cu),
                    xv: Vec3::new(-rho * sv, rho * cv, 0.0),
                    xuu: Vec3::new(-r * cu * cv, -r * cu * sv, -r * su),
                    xuv: Vec3::new(r * su * sv, -r * su * cv, 0.0),
                    xvv: Vec3::new(-rho * cv, -rho * sv, 0.0),
                }
            }
            ParametricSurface::Plane => SurfaceJet {
                x: Vec3::new(u, v, 0.0),
                xu: Vec3::x(),
                xv: Vec3::y(),
                xuu: Vec3::zeros(),
                xuv: Vec3::zeros(),
                xvv: Vec3::zeros(),
            },
        }
    }

    /// Fails where the chart degenerates: inside the pole band of a sphere,
    /// or wherever `EG - F²` is not positive.
    pub fn fundamental_form(&self, u: f64, v: f64) -> Result<FundamentalForm, OracleError> {
        if let ParametricSurface::Sphere { .. } = self {
            if u.sin() < POLE_BAND.sin() {
                return Err(OracleError::Singular { u, v });
            }
        }
        let j = self.jet(u, v);
        let form = FundamentalForm {
            e: j.xu.dot(&j.xu),
            f: j.xu.dot(&j.xv),
            g: j.xv.dot(&j.xv),
            e_u: 2.0 * j.xuu.dot(&j.xu),
            e_v: 2.0 * j.xuv.dot(&j.xu),
            f_u: j.xuu.dot(&j.xv) + j.xu.dot(&j.xuv),
            f_v: j.xuv.dot(&j.xv) + j.xu.dot(&j.xvv),
            g_u: 2.0 * j.xuv.dot(&j.xv),
            g_v: 2.0 * j.xvv.dot(&j.xv),
        };
        if !(form.det() > 0.0 && form.e > 0.0 && form.g > 0.0) {
            return Err(OracleError::Singular { u, v });
        }
        Ok(form)
    }

    /// Parameters of the surface point closest (radially, for the sphere
    /// and torus) to `p`.
    pub fn chart_of(&self, p: &Vec3) -> (f64, f64) {
        match *self {
            ParametricSurface::Sphere { polar, .. } => {
                let (pp, q, s) = match polar {
                    PolarAxis::Z => (p.x, p.y, p.z),
                    PolarAxis::X => (p.y, p.z, p.x),
                };
                let n = p.norm();
                ((s / n).clamp(-1.0, 1.0).acos(), q.atan2(pp))
            }
            ParametricSurface::Torus { a, .. } => {
                let rho = p.x.hypot(p.y);
                (p.z.atan2(rho - a), p.y.atan2(p.x))
            }
            ParametricSurface::Plane => (p.x, p.y),
        }
    }

    /// The embedding as field expressions in `u` and `v`.
    pub fn embedding_exprs(&self) -> [FieldExpr; 3] {
        let texts: [String; 3] = match *self {
            ParametricSurface::Sphere { radius: k, polar } => {
                let (p, q, s) = (
                    format!("{k:?}*sin(u)*cos(v)"),
                    format!("{k:?}*sin(u)*sin(v)"),
                    format!("{k:?}*cos(u)"),
                );
                match polar {
                    PolarAxis::Z => [p, q, s],
                    PolarAxis::X => [s, p, q],
                }
            }
            ParametricSurface::Torus { a, r } => [
                format!("({a:?} + {r:?}*cos(u))*cos(v)"),
                format!("({a:?} + {r:?}*cos(u))*sin(v)"),
                format!("{r:?}*sin(u)"),
            ],
            ParametricSurface::Plane => ["u".into(), "v".into(), "0".into()],
        };
        texts.map(|t| parse(&t).expect("embedding expressions are well formed"))
    }
}
