use rayon::prelude::*;

use eprfw_core::epr::bell_report;
use eprfw_core::geometry::{
    christoffel_at, fw_connection_at, metric_at, spin_connection_at, tetrad_at,
    total_connection_at, ConnectionOneForm, SpacetimePoint, SpinConnectionSign, StringGeometry,
    COORD_NAMES, FD_STEP,
};
use eprfw_core::kinematics::{proper_acceleration, CircularWorldline, Direction};
use eprfw_core::oracle::{covariant_acceleration, fd_christoffel, fd_spin_connection};
use eprfw_core::transport::{
    transport_closed_form, transport_numeric_spin_half, transport_params, TransportOptions,
};
use eprfw_core::verify::{
    self, tabulated_fw_connection, tabulated_spin_connection, tabulated_total_connection,
    CheckKind, VerifyOptions,
};
use eprfw_core::C64;

use crate::config::{Point, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

/// Evaluates `f` at every point on the worker pool, keeping input order.
/// The first failing point in that order determines the error.
fn par_rows<F>(points: &[Point], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(&Point) -> Result<Vec<Cell>, CliError> + Sync + Send,
{
    let results: Vec<_> = points.par_iter().map(f).collect();
    results.into_iter().collect()
}

fn to_arr<V: std::ops::Index<usize, Output = f64>>(v: &V) -> [f64; 4] {
    [v[0], v[1], v[2], v[3]]
}

fn connection_rows(
    table: &mut Table,
    quantity: &str,
    closed: &ConnectionOneForm,
    oracle: &ConnectionOneForm,
    listed: &[(usize, usize, usize, f64)],
) {
    let mut comps: Vec<(usize, usize, usize)> = listed.iter().map(|&(m, a, b, _)| (m, a, b)).collect();
    for m in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                if closed.get(m, a, b).abs() > 1e-12 && !comps.contains(&(m, a, b)) {
                    comps.push((m, a, b));
                }
            }
        }
    }
    comps.sort_unstable();
    for (m, a, b) in comps {
        let (x, y) = (closed.get(m, a, b), oracle.get(m, a, b));
        table.push(vec![
            Cell::Text(quantity.to_string()),
            Cell::Text(format!("{}^{}_{}", COORD_NAMES[m], a, b)),
            Cell::Num(x),
            Cell::Num(y),
            Cell::Num((x - y).abs()),
        ]);
    }
}

/// Metric, tetrad, Christoffel symbols and the three connections at the
/// configured point, each next to an independently computed value.
pub fn geometry(cfg: &RunConfig) -> Result<Table, CliError> {
    if !cfg.sweeps.is_empty() {
        return Err(CliError::usage("sweep: the geometry command evaluates a single point"));
    }
    let geom = StringGeometry::new(cfg.alpha, cfg.c)?;
    let pt = SpacetimePoint::new(0.0, cfg.rho, 0.0, cfg.phi);
    let mut table = Table::new(vec!["quantity", "component", "closed_form", "oracle", "abs_diff"]);
    let row = |q: &str, comp: String, x: f64, y: f64| {
        vec![
            Cell::Text(q.to_string()),
            Cell::Text(comp),
            Cell::Num(x),
            Cell::Num(y),
            Cell::Num((x - y).abs()),
        ]
    };

    let tetrad = tetrad_at(&geom, &pt)?;
    let metric = metric_at(&geom, &pt)?.g;
    let rebuilt = tetrad.reconstruct_metric();
    for m in 0..4 {
        let name = COORD_NAMES[m];
        table.push(row("metric", format!("{name}{name}"), metric[(m, m)], rebuilt[(m, m)]));
    }
    let e_from_inverse = tetrad.einv.try_inverse().expect("tetrad is invertible off the axis");
    for a in 0..4 {
        table.push(row("tetrad", format!("{a}_{}", COORD_NAMES[a]), tetrad.e[(a, a)], e_from_inverse[(a, a)]));
    }
    let gamma = christoffel_at(&geom, &pt)?.gamma;
    let fd_gamma = fd_christoffel(&geom, &pt, FD_STEP)?.gamma;
    for l in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                if gamma[l][m][n].abs() > 1e-12 {
                    let comp = format!("{}_{}{}", COORD_NAMES[l], COORD_NAMES[m], COORD_NAMES[n]);
                    table.push(row("christoffel", comp, gamma[l][m][n], fd_gamma[l][m][n]));
                }
            }
        }
    }

    let wl = CircularWorldline::new(geom, cfg.rho, cfg.xi, Direction::Positive)?;
    let acc = to_arr(&proper_acceleration(&wl));
    let fd_acc = to_arr(&covariant_acceleration(&wl, FD_STEP)?);
    let a_c2 = acc[1] / (cfg.c * cfg.c);

    let omega = spin_connection_at(&geom, &pt)?;
    let fd_omega = fd_spin_connection(&geom, &pt, FD_STEP, SpinConnectionSign::Tabulated)?;
    connection_rows(&mut table, "omega", &omega, &fd_omega, &tabulated_spin_connection(cfg.alpha));

    let tau = fw_connection_at(&geom, &pt, &acc)?;
    let fd_tau = fw_connection_at(&geom, &pt, &fd_acc)?;
    connection_rows(&mut table, "tau", &tau, &fd_tau, &tabulated_fw_connection(cfg.alpha, cfg.rho, a_c2));

    let total = total_connection_at(&geom, &pt, &acc)?;
    let fd_total = fd_omega.sum(&fd_tau);
    connection_rows(
        &mut table,
        "Omega",
        &total,
        &fd_total,
        &tabulated_total_connection(cfg.alpha, cfg.rho, a_c2),
    );
    Ok(table)
}

pub const TRANSPORT_COLUMNS: [&str; 19] = [
    "alpha", "xi", "Phi", "steps", "eta1", "eta2", "theta", "gamma_squared", "xi00_re", "xi00_im",
    "xi01_re", "xi01_im", "xi10_re", "xi10_im", "xi11_re", "xi11_im", "numeric_error",
    "det_error", "unitarity_defect",
];

/// Closed-form spin-½ transport of the `+Φ` particle and its distance from
/// the numeric path-ordered product at the configured step count.
pub fn transport(cfg: &RunConfig, opts: &TransportOptions) -> Result<Table, CliError> {
    let mut table = Table::new(TRANSPORT_COLUMNS.to_vec());
    let rows = par_rows(&cfg.points(), |p| {
        let geom = StringGeometry::new(p.alpha, cfg.c)?;
        let wl = CircularWorldline::new(geom, cfg.rho, p.xi, Direction::Positive)?;
        let params = transport_params(&wl, p.phi);
        let closed = transport_closed_form(&params);
        let numeric = transport_numeric_spin_half(&wl, p.phi, cfg.steps, opts)?;
        let m = closed.0;
        let mut row = vec![
            Cell::Num(p.alpha),
            Cell::Num(p.xi),
            Cell::Num(p.phi),
            Cell::Int(cfg.steps as u64),
            Cell::Num(params.eta1),
            Cell::Num(params.eta2),
            Cell::Num(params.theta),
            Cell::Num(params.gamma_squared()),
        ];
        for z in [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]] {
            row.push(Cell::Num(z.re));
            row.push(Cell::Num(z.im));
        }
        row.push(Cell::Num(numeric.max_diff(&closed)));
        row.push(Cell::Num((closed.det() - C64::new(1.0, 0.0)).norm()));
        row.push(Cell::Num(closed.unitarity_defect()));
        Ok(row)
    })?;
    table.rows = rows;
    Ok(table)
}

pub const BELL_COLUMNS: [&str; 9] = [
    "alpha",
    "xi",
    "Phi",
    "theta",
    "norm",
    "chsh_direct",
    "chsh_closed",
    "chsh_restored",
    "restored_residual",
];

/// One CHSH report row per sweep point.
pub fn bell(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut table = Table::new(BELL_COLUMNS.to_vec());
    table.rows = par_rows(&cfg.points(), |p| {
        let r = bell_report(StringGeometry::new(p.alpha, cfg.c)?, cfg.rho, p.xi, p.phi)?;
        Ok([
            r.alpha,
            r.xi,
            r.phi,
            r.theta,
            r.norm,
            r.chsh_direct,
            r.chsh_closed,
            r.chsh_restored,
            r.restored_residual,
        ]
        .into_iter()
        .map(Cell::Num)
        .collect())
    })?;
    Ok(table)
}

/// Runs the self-verification suite. Returns the table and whether every
/// asserted check passed.
pub fn verify(opts: &VerifyOptions) -> Result<(Table, bool), CliError> {
    let report = verify::run(opts)?;
    let mut table = Table::new(vec!["name", "kind", "tolerance", "observed", "passed", "note"]);
    for c in &report.checks {
        table.push(vec![
            Cell::Text(c.name.clone()),
            Cell::Text(
                match c.kind {
                    CheckKind::Assert => "assert",
                    CheckKind::Report => "report",
                }
                .to_string(),
            ),
            Cell::Num(c.tolerance),
            Cell::Num(c.observed),
            Cell::Bool(c.passed),
            Cell::Text(c.note.clone().unwrap_or_default()),
        ]);
    }
    Ok((table, report.passed))
}
