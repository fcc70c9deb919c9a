use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use qspec_core::eigenfunctions::{
    jackson_j2, jackson_j2_phi01, phi_cap_z, phi_z, qbessel_m, rogers_ramanujan, sw_polynomial,
};
use qspec_core::jacobi::{JacobiOperator, Sequence};
use qspec_core::measures::{DensityKind, WeightDensity};
use qspec_core::spectral_continuous::{
    lambda_bucket, nu, CompactFunction, ContinuousSpectrum, Truncation,
};
use qspec_core::spectral_discrete::{self, PointKind, SpectralPoint};
use qspec_core::verify::{self, Suite, VerifyConfig};
use qspec_core::{QContext, Window, C64};

use crate::report::{Cell, Report, Table};
use crate::Global;

fn config<A: Serialize>(g: &Global, a: &A) -> Result<Value> {
    let mut v = serde_json::to_value(g)?;
    if let (Value::Object(m), Value::Object(extra)) = (&mut v, serde_json::to_value(a)?) {
        m.extend(extra);
    }
    Ok(v)
}

fn parse_z(s: &str) -> Result<C64> {
    C64::from_str(s.trim()).map_err(|_| anyhow!("cannot parse complex number {s:?}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum EvalFn {
    #[value(name = "phi_z")]
    #[serde(rename = "phi_z")]
    PhiZ,
    #[value(name = "Phi_z")]
    #[serde(rename = "Phi_z")]
    PhiCapZ,
    #[value(name = "phi0")]
    #[serde(rename = "phi0")]
    Phi0,
    #[value(name = "sw")]
    #[serde(rename = "sw")]
    Sw,
    #[value(name = "qbesselM")]
    #[serde(rename = "qbesselM")]
    QBesselM,
    #[value(name = "jacksonJ2")]
    #[serde(rename = "jacksonJ2")]
    JacksonJ2,
    #[value(name = "wronskian")]
    #[serde(rename = "wronskian")]
    Wronskian,
    #[value(name = "green")]
    #[serde(rename = "green")]
    Green,
    #[value(name = "nu")]
    #[serde(rename = "nu")]
    Nu,
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    #[arg(value_enum)]
    pub function: EvalFn,

    /// evaluation points, comma separated
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "1"
    )]
    pub x: Vec<f64>,

    /// spectral parameters such as 0.3, -1+0.5i, 2i; comma separated
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0.5"
    )]
    pub z: Vec<String>,

    /// polynomial degree for sw
    #[arg(long, default_value_t = 0)]
    pub n: u32,

    /// index r of M_r
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub r: i64,

    /// order of the Jackson function
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub nu: i64,

    /// lattice index for the Wronskian
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub k: i64,

    /// Green function row index
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub j: i64,

    /// Green function column index
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub l: i64,

    /// negative spectral parameters for nu
    #[arg(
        long = "lambda",
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "-1"
    )]
    pub lambda: Vec<f64>,
}

pub fn eval(g: &Global, ctx: &QContext, a: &EvalArgs) -> Result<Report> {
    let zs: Vec<C64> = a.z.iter().map(|s| parse_z(s)).collect::<Result<_>>()?;
    let name = serde_json::to_value(a.function)?
        .as_str()
        .unwrap_or_default()
        .to_owned();
    let f = || Cell::from(name.as_str());
    let table = match a.function {
        EvalFn::PhiZ | EvalFn::PhiCapZ => {
            let mut t = Table::new(&["function", "z_re", "z_im", "x", "value_re", "value_im"]);
            for &z in &zs {
                for &x in &a.x {
                    let v = if a.function == EvalFn::PhiZ {
                        phi_z(ctx, z, C64::new(x, 0.0))
                    } else {
                        phi_cap_z(ctx, z, x)
                    }
                    .with_context(|| format!("{name} at z={z}, x={x}"))?;
                    t.push(vec![
                        f(),
                        z.re.into(),
                        z.im.into(),
                        x.into(),
                        v.re.into(),
                        v.im.into(),
                    ]);
                }
            }
            t
        }
        EvalFn::Phi0 => {
            let mut t = Table::new(&["function", "x", "value"]);
            for &x in &a.x {
                let v = rogers_ramanujan(ctx, x).with_context(|| format!("phi0 at x={x}"))?;
                t.push(vec![f(), x.into(), v.into()]);
            }
            t
        }
        EvalFn::Sw => {
            let mut t = Table::new(&["function", "n", "x", "value"]);
            for &x in &a.x {
                t.push(vec![
                    f(),
                    a.n.into(),
                    x.into(),
                    sw_polynomial(ctx, a.n, x).into(),
                ]);
            }
            t
        }
        EvalFn::QBesselM => {
            let mut t = Table::new(&["function", "r", "t", "x", "value"]);
            for &x in &a.x {
                let v =
                    qbessel_m(ctx, a.r, g.t, x).with_context(|| format!("qbesselM at x={x}"))?;
                t.push(vec![f(), a.r.into(), g.t.into(), x.into(), v.into()]);
            }
            t
        }
        EvalFn::JacksonJ2 => {
            let mut t = Table::new(&["function", "nu", "x", "value", "phi01_form"]);
            for &x in &a.x {
                let v = jackson_j2(ctx, a.nu, x).with_context(|| format!("jacksonJ2 at x={x}"))?;
                let alt = jackson_j2_phi01(ctx, a.nu, x).unwrap_or(f64::NAN);
                t.push(vec![f(), a.nu.into(), x.into(), v.into(), alt.into()]);
            }
            t
        }
        EvalFn::Wronskian => {
            let op = JacobiOperator::new(ctx, g.t)?;
            let mut t = Table::new(&[
                "function",
                "t",
                "z_re",
                "z_im",
                "k",
                "value_re",
                "value_im",
                "closed_re",
                "closed_im",
                "rel_diff",
            ]);
            for &z in &zs {
                let w = op
                    .wronskian(z, a.k)
                    .with_context(|| format!("wronskian at z={z}"))?;
                let c = op.wronskian_closed_form(z)?;
                let rel = (w - c).norm() / c.norm();
                t.push(vec![
                    f(),
                    g.t.into(),
                    z.re.into(),
                    z.im.into(),
                    a.k.into(),
                    w.re.into(),
                    w.im.into(),
                    c.re.into(),
                    c.im.into(),
                    rel.into(),
                ]);
            }
            t
        }
        EvalFn::Green => {
            let op = JacobiOperator::new(ctx, g.t)?;
            let mut t = Table::new(&[
                "function", "t", "z_re", "z_im", "j", "l", "value_re", "value_im",
            ]);
            for &z in &zs {
                let v = op
                    .green(z, a.j, a.l)
                    .with_context(|| format!("green at z={z}"))?;
                t.push(vec![
                    f(),
                    g.t.into(),
                    z.re.into(),
                    z.im.into(),
                    a.j.into(),
                    a.l.into(),
                    v.re.into(),
                    v.im.into(),
                ]);
            }
            t
        }
        EvalFn::Nu => {
            let mut t = Table::new(&["function", "lambda", "l", "t", "nu"]);
            for &lam in &a.lambda {
                if !(lam < 0.0) {
                    bail!("--lambda values must be negative, got {lam}");
                }
                let (l, tb) = lambda_bucket(ctx, lam);
                t.push(vec![
                    f(),
                    lam.into(),
                    l.into(),
                    tb.into(),
                    nu(ctx, lam).into(),
                ]);
            }
            t
        }
    };
    Ok(Report {
        command: "eval",
        config: config(g, a)?,
        table,
        summary: Vec::new(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteArg {
    Qcore,
    Eigen,
    Measures,
    Jacobi,
    Or,
    Expand,
    Plancherel,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityArg {
    ProductC,
    LogNormal,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityOpts {
    /// absolutely continuous weight
    #[arg(long, value_enum, default_value_t = DensityArg::ProductC)]
    pub density: DensityArg,

    /// parameter of the product-c density
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
}

impl DensityOpts {
    fn kind(&self) -> DensityKind {
        match self.density {
            DensityArg::ProductC => DensityKind::ProductC { c: self.c },
            DensityArg::LogNormal => DensityKind::LogNormal,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: SuiteArg,

    /// S_n with n <= nmax in the Gram matrix
    #[arg(long, default_value_t = 6)]
    pub nmax: u32,

    /// M_r with |r| <= rmax in the Gram matrix
    #[arg(long, default_value_t = 4)]
    pub rmax: i64,

    #[arg(long, default_value_t = 30)]
    pub expand_nmax: u32,

    #[arg(long, default_value_t = 30)]
    pub expand_rmax: i64,

    /// finite-section half widths for the spectrum probe
    #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
    pub windows: Vec<i64>,

    #[command(flatten)]
    #[serde(flatten)]
    pub density: DensityOpts,

    #[arg(long, default_value_t = Truncation::DEFAULT.imax)]
    pub trunc_imax: usize,

    #[arg(long, default_value_t = Truncation::DEFAULT.nmax)]
    pub trunc_nmax: u32,

    #[arg(long, default_value_t = Truncation::DEFAULT.lmax)]
    pub trunc_lmax: i64,

    #[arg(long, default_value_t = Truncation::DEFAULT.nodes)]
    pub trunc_nodes: usize,

    #[arg(long, default_value_t = 8)]
    pub rt_imax: usize,

    #[arg(long, default_value_t = 20)]
    pub rt_nmax: u32,

    #[arg(long, default_value_t = 30)]
    pub rt_jmax: i64,

    /// multiplies every check tolerance
    #[arg(long, default_value_t = 1.0)]
    pub tol_scale: f64,
}

pub fn verify(g: &Global, ctx: &QContext, a: &VerifyArgs) -> Result<(Report, bool)> {
    if !(a.tol_scale > 0.0) {
        bail!("--tol-scale must be positive");
    }
    let cfg = VerifyConfig {
        t: g.t,
        nmax: a.nmax,
        rmax: a.rmax,
        expand_nmax: a.expand_nmax,
        expand_rmax: a.expand_rmax,
        sections: a.windows.clone(),
        density: a.density.kind(),
        truncation: Truncation {
            imax: a.trunc_imax,
            nmax: a.trunc_nmax,
            lmax: a.trunc_lmax,
            nodes: a.trunc_nodes,
        },
        round_trip: (a.rt_imax, a.rt_nmax, a.rt_jmax),
        ..VerifyConfig::new(*ctx)
    };
    let suites: Vec<Suite> = match a.suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        s => vec![serde_json::to_value(s)?
            .as_str()
            .unwrap_or_default()
            .parse()?],
    };
    let mut checks: Vec<verify::Check> = suites
        .par_iter()
        .flat_map_iter(|&s| verify::run(s, &cfg))
        .collect();
    checks.sort_by_key(|c| c.suite);
    let mut t = Table::new(&["suite", "group", "name", "residual", "tolerance", "pass"]);
    let mut failed = 0i64;
    for c in &checks {
        let tol = c.tolerance * a.tol_scale;
        let pass = c.residual.is_finite() && c.residual <= tol;
        if !pass {
            failed += 1;
        }
        t.push(vec![
            c.suite.name().into(),
            c.group.into(),
            c.name.clone().into(),
            c.residual.into(),
            tol.into(),
            pass.into(),
        ]);
    }
    let report = Report {
        command: "verify",
        config: config(g, a)?,
        table: t,
        summary: vec![
            ("checks", (checks.len() as i64).into()),
            ("failed", failed.into()),
        ],
    };
    Ok((report, failed == 0))
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    /// section half widths K, giving windows [-K, K]
    #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
    pub windows: Vec<i64>,

    /// theoretical grid: q^n for n <= nmax
    #[arg(long, default_value_t = 4)]
    pub nmax: u32,

    /// theoretical grid: -q^r/t for |r| <= rmax
    #[arg(long, default_value_t = 4)]
    pub rmax: i64,

    /// distance below which a section eigenvalue counts as converged
    #[arg(long, default_value_t = 1e-6)]
    pub converged: f64,

    /// one row per theoretical point and window instead of per eigenvalue
    #[arg(long)]
    pub probe: bool,
}

fn label(k: PointKind) -> String {
    k.to_string()
}

pub fn spectrum(g: &Global, ctx: &QContext, a: &SpectrumArgs) -> Result<Report> {
    let op = JacobiOperator::new(ctx, g.t)?;
    let points = spectral_discrete::spectrum_points(ctx, g.t, a.nmax, -a.rmax, a.rmax);
    let spectra: Vec<Vec<f64>> = a
        .windows
        .par_iter()
        .map(|&k| op.finite_section_spectrum(-k, k))
        .collect::<std::result::Result<_, _>>()?;
    let nearest = |target: f64, pts: &mut dyn Iterator<Item = f64>| {
        pts.map(|e| (e - target).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let mut summary = Vec::new();
    let table = if a.probe {
        let mut t = Table::new(&["point", "value", "window", "distance"]);
        for p in &points {
            for (k, ev) in a.windows.iter().zip(&spectra) {
                let d = nearest(p.value, &mut ev.iter().copied());
                t.push(vec![
                    label(p.kind).into(),
                    p.value.into(),
                    (*k).into(),
                    d.into(),
                ]);
            }
        }
        t
    } else {
        let mut t = Table::new(&[
            "window",
            "index",
            "eigenvalue",
            "nearest",
            "nearest_value",
            "distance",
            "converged",
        ]);
        let mut near_zero = 0i64;
        for (k, ev) in a.windows.iter().zip(&spectra) {
            for (i, &e) in ev.iter().enumerate() {
                let best: &SpectralPoint = points
                    .iter()
                    .min_by(|x, y| (x.value - e).abs().total_cmp(&(y.value - e).abs()))
                    .ok_or_else(|| anyhow!("empty theoretical grid"))?;
                let d = (best.value - e).abs();
                let conv = d < a.converged;
                if conv && e.abs() < 1e-8 {
                    near_zero += 1;
                }
                t.push(vec![
                    (*k).into(),
                    (i as i64).into(),
                    e.into(),
                    label(best.kind).into(),
                    best.value.into(),
                    d.into(),
                    conv.into(),
                ]);
            }
        }
        summary.push(("converged_near_zero", near_zero.into()));
        t
    };
    Ok(Report {
        command: "spectrum",
        config: config(g, a)?,
        table,
        summary,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct ExpandArgs {
    /// expand the basis vector e_k
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub k: i64,

    #[arg(long, default_value_t = 25)]
    pub nmax: u32,

    #[arg(long, default_value_t = -25, allow_hyphen_values = true)]
    pub rmin: i64,

    #[arg(long, default_value_t = 25)]
    pub rmax: i64,
}

pub fn expand(g: &Global, ctx: &QContext, a: &ExpandArgs) -> Result<Report> {
    let v: Sequence<f64> = Sequence::unit(a.k);
    let ex = spectral_discrete::expand(ctx, g.t, &v, a.nmax, a.rmin, a.rmax, ctx.window())?;
    let mut t = Table::new(&["point", "eigenvalue", "coefficient"]);
    for (xi, c) in &ex.coeffs {
        t.push(vec![label(xi.kind).into(), xi.value.into(), (*c).into()]);
    }
    Ok(Report {
        command: "expand",
        config: config(g, a)?,
        table: t,
        summary: vec![
            ("parseval_defect", ex.parseval_defect.into()),
            ("reconstruction_error", ex.reconstruction_error.into()),
        ],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    /// 1 on the support
    Indicator,
    /// 1 on the top q-interval of the support, -1/2 below
    Step,
    /// x on the support
    Linear,
}

#[derive(Args, Debug, Serialize)]
pub struct PlancherelArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub density: DensityOpts,

    #[arg(long, value_enum, default_value_t = TestFunction::Indicator)]
    pub function: TestFunction,

    /// support (q^{smax+1}, q^{smin}]
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub smin: i64,

    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub smax: i64,

    #[arg(long, default_value_t = Truncation::DEFAULT.imax)]
    pub imax: usize,

    #[arg(long, default_value_t = Truncation::DEFAULT.nmax)]
    pub nmax: u32,

    #[arg(long, default_value_t = Truncation::DEFAULT.lmax)]
    pub lmax: i64,

    #[arg(long, default_value_t = Truncation::DEFAULT.nodes)]
    pub nodes: usize,

    /// also report the doubled truncation
    #[arg(long)]
    pub refine: bool,
}

pub fn plancherel(g: &Global, ctx: &QContext, a: &PlancherelArgs) -> Result<Report> {
    if a.smin > a.smax {
        bail!("--smin must not exceed --smax");
    }
    let wd = WeightDensity::new(ctx, a.density.kind())?;
    let cs = ContinuousSpectrum::new(wd);
    let top = ctx.qpow(a.smin + 1);
    let func = a.function;
    let f = CompactFunction::new(Window::new(a.smin, a.smax), move |x: f64| match func {
        TestFunction::Indicator => 1.0,
        TestFunction::Step => {
            if x > top {
                1.0
            } else {
                -0.5
            }
        }
        TestFunction::Linear => x,
    });
    let base = Truncation {
        imax: a.imax,
        nmax: a.nmax,
        lmax: a.lmax,
        nodes: a.nodes,
    };
    let mut truncs = vec![base];
    if a.refine {
        truncs.push(base.doubled());
    }
    let reports = truncs
        .par_iter()
        .map(|&tr| cs.plancherel(&f, &f, tr))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut t = Table::new(&[
        "imax",
        "nmax",
        "lmax",
        "nodes",
        "lhs",
        "rhs_discrete",
        "rhs_continuous",
        "defect",
    ]);
    for r in &reports {
        let tr = r.truncation;
        t.push(vec![
            (tr.imax as i64).into(),
            tr.nmax.into(),
            tr.lmax.into(),
            (tr.nodes as i64).into(),
            r.lhs.into(),
            r.rhs_discrete.into(),
            r.rhs_continuous.into(),
            r.defect.into(),
        ]);
    }
    Ok(Report {
        command: "plancherel",
        config: config(g, a)?,
        table: t,
        summary: Vec::new(),
    })
}
