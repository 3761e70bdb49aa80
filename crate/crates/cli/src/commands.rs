use layerwave::analysis::{
    amplitude_ratios, bv_convergence, classify as classify_mode, decay_bound_check, default_eps, existence_condition,
    existence_verify, min_amplitude, nonconcentration_floor, three_layer_ratios, threshold_recipe, ModeTag,
};
use layerwave::cross_section::{CrossSection, TransverseMode};
use layerwave::general_solver::{
    fd_oracle, liouville_residual, liouville_transform, numerov_solve, pruefer_count, pruefer_eigenvalues, StepControl,
};
use layerwave::layer_solver::{build_eigenfunction, eigenpair, eigenvalues_in_window, Channel, Eigenfunction1D, Eigenpair};
use layerwave::profile::{find_well, Coefficient, LayeredProfile, Profile, SampleRule, SampledProfile, WellDescriptor};
use rayon::prelude::*;
use serde_json::json;

use crate::error::CliError;
use crate::report::{num, Report, Violation};
use crate::schema::load_profile;
use crate::Common;

/// Residual threshold for the exact transmission identities.
const IDENTITY_TOL: f64 = 1e-9;

pub struct Context {
    pub profile: Profile,
    pub cross_section: CrossSection,
    pub eps: f64,
    pub k: Option<(usize, usize)>,
    pub window_mult: Option<(f64, f64)>,
    pub rel_tol: f64,
    pub c1: Option<f64>,
    pub c_m: f64,
    pub c_max: f64,
    pool: rayon::ThreadPool,
}

impl Context {
    pub fn new(common: &Common) -> Result<Self, CliError> {
        let loaded = load_profile(&common.profile)?;
        let (c_m, c_max) = loaded.profile.extremes();
        let eps = match common.eps {
            Some(e) if !(e > 0.0 && e.is_finite()) => return Err(CliError::Input(format!("--eps must be positive, got {e}"))),
            Some(e) => e,
            None => default_eps(&loaded.profile),
        };
        if !(common.rel_tol > 0.0 && common.rel_tol < 1.0) {
            return Err(CliError::Input(format!("--rel-tol must lie in (0, 1), got {}", common.rel_tol)));
        }
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(n) = common.jobs {
            pool = pool.num_threads(n.max(1));
        }
        let pool = pool.build().map_err(|e| CliError::Input(e.to_string()))?;
        Ok(Self {
            profile: loaded.profile,
            cross_section: loaded.cross_section,
            eps,
            k: common.k,
            window_mult: common.window_mult,
            rel_tol: common.rel_tol,
            c1: common.c1,
            c_m,
            c_max,
            pool,
        })
    }

    fn modes(&self, default: (usize, usize)) -> Vec<TransverseMode> {
        let (lo, hi) = self.k.unwrap_or(default);
        self.cross_section.mu_values(hi).into_iter().skip(lo - 1).collect()
    }

    /// Runs `f` for every transverse mode in parallel; results keep k order.
    fn sweep<T: Send>(
        &self,
        modes: &[TransverseMode],
        f: impl Fn(Channel) -> Result<T, CliError> + Sync,
    ) -> Result<Vec<T>, CliError> {
        self.pool.install(|| modes.par_iter().map(|m| f(Channel::from(m))).collect())
    }

    fn window(&self, ch: Channel, default: (f64, f64)) -> (f64, f64) {
        let (a, b) = self.window_mult.unwrap_or(default);
        (a * ch.mu2(), b * ch.mu2())
    }

    fn layered(&self, command: &str) -> Result<&LayeredProfile, CliError> {
        self.profile
            .as_layered()
            .ok_or_else(|| CliError::Input(format!("`{command}` needs a layered profile")))
    }

    fn sampled(&self, command: &str) -> Result<&SampledProfile, CliError> {
        self.profile
            .as_sampled()
            .ok_or_else(|| CliError::Input(format!("`{command}` needs a sampled profile")))
    }

    fn eigenpairs(&self, ch: Channel, lo: f64, hi: f64) -> Result<Vec<Eigenpair>, CliError> {
        Ok(match &self.profile {
            Profile::Layered(p) => eigenvalues_in_window(ch, lo, hi, p, self.rel_tol)?,
            Profile::Sampled(p) => pruefer_eigenvalues(ch, lo, hi, p, &StepControl::default(), self.rel_tol)?,
        })
    }

    fn well(&self) -> Result<Option<WellDescriptor>, CliError> {
        let c1 = self.c1.unwrap_or(self.c_max);
        if self.c1.is_none() && self.c_max <= self.c_m {
            return Ok(None);
        }
        find_well(&self.profile, c1).map_err(|e| CliError::Input(format!("--c1: {e}")))
    }

    fn echo(&self, report: &mut Report) {
        let kind = match self.profile {
            Profile::Layered(_) => "layered",
            Profile::Sampled(_) => "sampled",
        };
        report.set(
            "profile",
            json!({ "kind": kind, "H": self.profile.height(), "c_m": self.c_m, "c_M": self.c_max }),
        );
        report.set("eps", self.eps);
        report.set("rel_tol", self.rel_tol);
    }
}

fn efs(pairs: &[Eigenpair], p: &LayeredProfile) -> Result<Vec<Eigenfunction1D>, CliError> {
    pairs.iter().map(|e| Ok(build_eigenfunction(e, p)?)).collect()
}

fn flag(b: bool) -> String {
    b.to_string()
}

pub fn spectrum(ctx: &Context) -> Result<Report, CliError> {
    let mut r = Report::new("spectrum", &["k", "l", "mu", "lambda", "residual"]);
    ctx.echo(&mut r);
    let modes = ctx.modes((1, 1));
    let all = ctx.sweep(&modes, |ch| {
        let (lo, hi) = ctx.window(ch, (ctx.c_m, 4.0 * ctx.c_max));
        ctx.eigenpairs(ch, lo, hi)
    })?;
    for e in all.iter().flatten() {
        r.row(vec![e.k.to_string(), e.ell.to_string(), num(e.mu), num(e.lambda), num(e.residual)]);
    }
    Ok(r)
}

pub fn classify(ctx: &Context) -> Result<Report, CliError> {
    let mut r = Report::new("classify", &["k", "l", "lambda", "lambda_over_mu2", "tag", "xi"]);
    ctx.echo(&mut r);
    let well = ctx.well()?;
    r.set("well", well);
    let modes = ctx.modes((1, 1));
    let all = ctx.sweep(&modes, |ch| {
        let (lo, hi) = ctx.window(ch, (ctx.c_m, 4.0 * ctx.c_max));
        ctx.eigenpairs(ch, lo, hi)
    })?;
    for e in all.iter().flatten() {
        let c = classify_mode(e, &ctx.profile, ctx.eps, well.as_ref());
        r.row(vec![
            e.k.to_string(),
            e.ell.to_string(),
            num(e.lambda),
            num(e.lambda / (e.mu * e.mu)),
            format!("{:?}", c.tag),
            c.xi.map(num).unwrap_or_default(),
        ]);
    }
    Ok(r)
}

// Bracket containing eigenvalue `ell` of a sampled profile.
fn sampled_pair(ctx: &Context, ch: Channel, p: &SampledProfile, ell: u32) -> Result<Eigenpair, CliError> {
    let control = StepControl::default();
    let lo = ctx.c_m * ch.mu2() * (1.0 - 1e-9);
    let mut hi = 2.0 * ctx.c_max * (ch.mu2() + 1.0);
    while pruefer_count(hi, ch, p, &control)?.zero_count < ell {
        hi *= 2.0;
    }
    pruefer_eigenvalues(ch, lo, hi, p, &control, ctx.rel_tol)?
        .into_iter()
        .find(|e| e.ell == ell)
        .ok_or_else(|| CliError::Input(format!("no eigenvalue with index {ell}")))
}

pub fn modes(ctx: &Context, ell: u32, points: usize) -> Result<Report, CliError> {
    if ell == 0 || points < 2 {
        return Err(CliError::Input("--ell must be at least 1 and --points at least 2".into()));
    }
    let mut r = Report::new("modes", &["y", "u", "du"]);
    ctx.echo(&mut r);
    let mode = ctx.modes((1, 1)).remove(0);
    let ch = Channel::from(&mode);
    let h = ctx.profile.height();
    let ys: Vec<f64> = (0..points).map(|i| h * i as f64 / (points - 1) as f64).collect();
    let (lambda, values): (f64, Vec<(f64, f64)>) = match &ctx.profile {
        Profile::Layered(p) => {
            let pair = eigenpair(ch, ell, p, ctx.rel_tol)?;
            let ef = build_eigenfunction(&pair, p)?;
            (pair.lambda, ys.iter().map(|&y| ef.evaluate(y)).collect::<Result<_, _>>()?)
        }
        Profile::Sampled(p) => {
            let pair = sampled_pair(ctx, ch, p, ell)?;
            let mut g = numerov_solve(pair.lambda, ch, p, (16 * points).max(4096))?;
            g.normalize(p);
            (pair.lambda, ys.iter().map(|&y| g.evaluate(y)).collect())
        }
    };
    r.set("k", mode.k);
    r.set("l", ell);
    r.set("lambda", lambda);
    for (y, (u, du)) in ys.iter().zip(values) {
        r.row(vec![num(*y), num(u), num(du)]);
    }
    Ok(r)
}

pub fn decay(ctx: &Context, band: (f64, f64), t: f64) -> Result<Report, CliError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(CliError::Input(format!("--t must lie in (0, 1), got {t}")));
    }
    let p = ctx.layered("decay")?;
    let well = ctx.well()?.ok_or_else(|| CliError::Input("profile has no well below c1".into()))?;
    let mut r = Report::new("decay", &["k", "l", "lambda", "xi", "d", "lhs", "rhs", "holds"]).checked();
    ctx.echo(&mut r);
    r.set("well", well);
    r.set("band", band);
    r.set("t", t);
    let modes = ctx.modes((1, 1));
    let all = ctx.sweep(&modes, |ch| {
        let (lo, hi) = ctx.window(ch, (ctx.c_m, well.threshold - ctx.eps));
        let pairs = eigenvalues_in_window(ch, lo, hi, p, ctx.rel_tol)?;
        let guided: Vec<Eigenpair> = pairs
            .into_iter()
            .filter(|e| classify_mode(e, p, ctx.eps, Some(&well)).tag == ModeTag::Guided)
            .collect();
        let mut out = Vec::new();
        for (e, ef) in guided.iter().zip(efs(&guided, p)?) {
            out.push((*e, decay_bound_check(&ef, &well, band, t)?));
        }
        Ok(out)
    })?;
    for (e, v) in all.iter().flatten() {
        r.row(vec![
            e.k.to_string(),
            e.ell.to_string(),
            num(v.lambda),
            num(v.xi),
            num(v.d),
            num(v.lhs),
            num(v.rhs),
            flag(v.holds),
        ]);
        if !v.holds {
            r.violate(Violation { check: "decay", k: Some(e.k), l: Some(e.ell), lhs: v.lhs, rhs: v.rhs });
        }
    }
    Ok(r)
}

pub fn floor(ctx: &Context, band: Option<(f64, f64)>, explore: bool, pieces: usize) -> Result<Report, CliError> {
    let approximant;
    let p = match &ctx.profile {
        Profile::Layered(p) => p,
        Profile::Sampled(s) => {
            approximant = s.pc_approximate(pieces.max(1));
            &approximant
        }
    };
    let h = p.height();
    let bands: Vec<(f64, f64)> = match band {
        Some(b) => vec![b],
        None => (0..10).map(|i| (h * i as f64 / 10.0, h * (i + 1) as f64 / 10.0)).collect(),
    };
    let narrowest = bands.iter().map(|b| b.1 - b.0).fold(f64::INFINITY, f64::min);
    let threshold = threshold_recipe(ctx.c_max, ctx.eps, std::f64::consts::PI / (narrowest / 6.0));
    let mut r = Report::new("floor", &["k", "l", "lambda", "tag", "r2"]);
    if !explore {
        r = r.checked();
    }
    r.extend_header(bands.iter().map(|(a, b)| format!("mass_{}_{}", num(*a), num(*b))));
    ctx.echo(&mut r);
    r.set("threshold", threshold);
    r.set("explore", explore);
    if ctx.profile.as_sampled().is_some() {
        r.set("approximant_cells", pieces);
    }

    let modes = ctx.modes((1, 1));
    let all = ctx.sweep(&modes, |ch| {
        let first = threshold.lambda.max((ctx.c_max + ctx.eps) * ch.mu2()) * (1.0 + 1e-9);
        let (lo, hi) = match ctx.window_mult {
            Some((a, b)) => ((a * ch.mu2()).max(first), b * ch.mu2()),
            None => (first, 1.5 * first),
        };
        if !(hi > lo) {
            return Ok((Vec::new(), Vec::new()));
        }
        let pairs = eigenvalues_in_window(ch, lo, hi, p, ctx.rel_tol)?;
        let efs = efs(&pairs, p)?;
        if efs.is_empty() {
            return Ok((pairs, Vec::new()));
        }
        let reports = bands
            .iter()
            .map(|b| nonconcentration_floor(&efs, *b, ctx.eps))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((pairs, reports))
    })?;

    let mut families = Vec::new();
    for (pairs, reports) in &all {
        for (i, e) in pairs.iter().enumerate() {
            let mut row = vec![e.k.to_string(), e.ell.to_string(), num(e.lambda), "NonGuided".into(), num(reports[0].r2_values[i])];
            row.extend(reports.iter().map(|f| num(f.masses[i])));
            r.row(row);
        }
        let Some(k) = pairs.first().map(|e| e.k) else { continue };
        for f in reports {
            families.push(json!({
                "k": k, "band": f.band, "modes": pairs.len(), "min_mass": f.min_mass, "argmin_lambda": f.argmin_lambda,
                "r2": f.r2, "floor": f.floor, "holds": f.holds, "per_mode_holds": f.per_mode_holds,
            }));
            if !f.holds {
                r.violate(Violation { check: "floor", k: Some(k), l: None, lhs: f.min_mass, rhs: f.floor });
            }
        }
    }
    r.set("families", families);
    Ok(r)
}

pub fn minamp(ctx: &Context) -> Result<Report, CliError> {
    let p = ctx.layered("minamp")?;
    let mut r = Report::new("minamp", &["k", "l", "lambda", "r2", "argmin", "peaks", "midpoint_match", "above_threshold"]);
    ctx.echo(&mut r);
    let lambda_tilde0 = threshold_recipe(ctx.c_max, ctx.eps, 1.0);
    r.set("threshold", lambda_tilde0);
    let modes = ctx.modes((1, 1));
    let lo_mult = ctx.c_max + ctx.eps;
    let all = ctx.sweep(&modes, |ch| {
        let (lo, hi) = ctx.window(ch, (lo_mult, 4.0 * lo_mult));
        let pairs: Vec<Eigenpair> = eigenvalues_in_window(ch, lo, hi, p, ctx.rel_tol)?
            .into_iter()
            .filter(|e| e.lambda >= lo_mult * ch.mu2())
            .collect();
        let reports: Vec<_> = efs(&pairs, p)?.iter().map(|ef| min_amplitude(ef, lambda_tilde0.lambda)).collect();
        Ok(pairs.into_iter().zip(reports).collect::<Vec<_>>())
    })?;
    for (e, m) in all.iter().flatten() {
        r.row(vec![
            e.k.to_string(),
            e.ell.to_string(),
            num(e.lambda),
            num(m.r2),
            num(m.argmin),
            m.peaks.len().to_string(),
            flag(m.midpoint_match),
            flag(m.above_threshold),
        ]);
    }
    Ok(r)
}

pub fn ratios(ctx: &Context, three_layer: bool) -> Result<Report, CliError> {
    let p = ctx.layered("ratios")?;
    if three_layer {
        return three_layer_report(ctx, p);
    }
    let mut r = Report::new(
        "ratios",
        &["k", "l", "lambda", "max_residual", "kappa", "bound_lo", "bound_hi", "cumulative_holds"],
    )
    .checked();
    ctx.echo(&mut r);
    let lo_mult = ctx.c_max + ctx.eps;
    let modes = ctx.modes((1, 1));
    let all = ctx.sweep(&modes, |ch| {
        let (lo, hi) = ctx.window(ch, (lo_mult, 4.0 * lo_mult));
        let pairs = eigenvalues_in_window(ch, lo, hi, p, ctx.rel_tol)?;
        let mut out = Vec::new();
        for (e, ef) in pairs.iter().zip(efs(&pairs, p)?) {
            out.push((*e, amplitude_ratios(&ef)?));
        }
        Ok(out)
    })?;
    for (e, a) in all.iter().flatten() {
        r.row(vec![
            e.k.to_string(),
            e.ell.to_string(),
            num(e.lambda),
            num(a.max_residual),
            num(a.kappa),
            num(a.bound_lo),
            num(a.bound_hi),
            flag(a.cumulative_holds),
        ]);
        if a.max_residual >= IDENTITY_TOL {
            r.violate(Violation { check: "ratio-identity", k: Some(e.k), l: Some(e.ell), lhs: a.max_residual, rhs: IDENTITY_TOL });
        }
        if !a.cumulative_holds {
            let low = a.cumulative.iter().cloned().fold(f64::INFINITY, f64::min);
            let (lhs, rhs) = if low < a.bound_lo {
                (low, a.bound_lo)
            } else {
                (a.cumulative.iter().cloned().fold(0.0, f64::max), a.bound_hi)
            };
            r.violate(Violation { check: "cumulative-ratio", k: Some(e.k), l: Some(e.ell), lhs, rhs });
        }
    }
    Ok(r)
}

fn three_layer_report(ctx: &Context, p: &LayeredProfile) -> Result<Report, CliError> {
    let v = p.values();
    if v.len() != 3 {
        return Err(CliError::Input("`ratios --three-layer` needs exactly three layers".into()));
    }
    let mut r = Report::new(
        "ratios",
        &[
            "k", "l", "lambda", "identity_residual", "scaled_tail", "m1", "m2", "tail_holds", "mass_ratio", "mass_lo",
            "mass_hi", "mass_ratio_holds",
        ],
    )
    .checked();
    ctx.echo(&mut r);
    r.set("zone_mult", (v[1] + ctx.eps, v[2] - ctx.eps));
    let modes = ctx.modes((1, 1));
    let all = ctx.sweep(&modes, |ch| {
        let (lo, hi) = ctx.window(ch, (v[1] + ctx.eps, v[2] - ctx.eps));
        let pairs = eigenvalues_in_window(ch, lo, hi, p, ctx.rel_tol)?;
        let mut out = Vec::new();
        for (e, ef) in pairs.iter().zip(efs(&pairs, p)?) {
            out.push((*e, three_layer_ratios(&ef, ctx.eps)?));
        }
        Ok(out)
    })?;
    for (e, t) in all.iter().flatten() {
        let residual = t.max_identity_residual();
        let (mlo, mhi) = t.mass_ratio_bounds;
        r.row(vec![
            e.k.to_string(),
            e.ell.to_string(),
            num(e.lambda),
            num(residual),
            num(t.scaled_tail),
            num(t.m1),
            num(t.m2),
            flag(t.tail_holds),
            num(t.mass_ratio),
            num(mlo),
            num(mhi),
            flag(t.mass_ratio_holds()),
        ]);
        let at = |check, lhs, rhs| Violation { check, k: Some(e.k), l: Some(e.ell), lhs, rhs };
        if residual >= IDENTITY_TOL {
            r.violate(at("three-layer-identity", residual, IDENTITY_TOL));
        }
        if !t.tail_holds {
            let rhs = if t.scaled_tail < t.m1 { t.m1 } else { t.m2 };
            r.violate(at("tail-ratio", t.scaled_tail, rhs));
        }
        if !t.mass_ratio_holds() {
            let rhs = if t.mass_ratio < mlo { mlo } else { mhi };
            r.violate(at("mass-ratio", t.mass_ratio, rhs));
        }
    }
    Ok(r)
}

pub fn liouville(ctx: &Context, grid: usize) -> Result<Report, CliError> {
    let p = ctx.sampled("liouville")?;
    if !p.has_derivatives() {
        return Err(layerwave::error::SolverError::MissingDerivatives.into());
    }
    let mut r = Report::new(
        "liouville",
        &["k", "l", "lambda", "alpha", "sup_dev", "volterra_bound", "eta_energy", "sup_rho"],
    );
    ctx.echo(&mut r);
    r.set("grid", grid);
    let modes = ctx.modes((1, 1));
    let all = ctx.sweep(&modes, |ch| {
        let (lo, hi) = ctx.window(ch, (ctx.c_max + ctx.eps, ctx.c_max + 2.0));
        let pairs = pruefer_eigenvalues(ch, lo, hi, p, &StepControl::default(), ctx.rel_tol)?;
        let mut out = Vec::new();
        for e in pairs {
            let u = numerov_solve(e.lambda, ch, p, grid)?;
            let frame = liouville_transform(p, e.lambda, ch, &u)?;
            out.push((e, liouville_residual(&frame, ch.mu)));
        }
        Ok(out)
    })?;
    for (e, l) in all.iter().flatten() {
        r.row(vec![
            e.k.to_string(),
            e.ell.to_string(),
            num(e.lambda),
            num(l.alpha),
            num(l.sup_dev),
            num(l.volterra_bound),
            num(l.eta_energy),
            num(l.sup_rho),
        ]);
    }
    Ok(r)
}

pub fn existence(ctx: &Context) -> Result<Report, CliError> {
    let p = ctx.layered("existence")?;
    let (v, bp) = (p.values(), p.breakpoints());
    if v.len() != 3 {
        return Err(CliError::Input("`existence` needs exactly three layers".into()));
    }
    let cond = existence_condition([v[0], v[1], v[2]], bp[1], bp[2], bp[3], ctx.eps)?;
    let mut r = Report::new(
        "existence",
        &[
            "k", "mu", "window_lo", "window_hi", "count", "guaranteed", "past_threshold", "nonempty", "first_lambda",
            "first_trial_bound", "first_guided_bound", "guided_bound_applies", "holds",
        ],
    )
    .checked();
    ctx.echo(&mut r);
    r.set("condition", &cond);
    if !cond.holds {
        r.violate(Violation { check: "existence-condition", k: None, l: None, lhs: cond.lhs, rhs: cond.rhs });
        return Ok(r);
    }
    let ks = match ctx.k {
        Some((a, b)) => a..=b,
        None => {
            let mu_t = cond.mu_threshold.unwrap_or(0.0);
            let modes = ctx.cross_section.mu_values(10_000);
            let k0 = modes.iter().find(|m| m.mu() >= mu_t).map_or(1, |m| m.k);
            k0..=k0 + 20
        }
    };
    let verdicts = ctx.pool.install(|| existence_verify(p, ctx.eps, &ctx.cross_section, ks, ctx.rel_tol))?;
    for d in &verdicts {
        r.row(vec![
            d.k.to_string(),
            num(d.mu),
            num(d.window.0),
            num(d.window.1),
            d.count.to_string(),
            d.guaranteed.to_string(),
            flag(d.past_threshold),
            flag(d.nonempty),
            num(d.first.lambda),
            num(d.first.trial_bound),
            num(d.first.guided_bound),
            flag(d.first.applies),
            flag(d.holds()),
        ]);
        if !d.holds() {
            let (lhs, rhs) = if !d.first.holds {
                let rhs = if d.first.lambda > d.first.trial_bound { d.first.trial_bound } else { d.first.guided_bound };
                (d.first.lambda, rhs)
            } else {
                (d.count as f64, d.guaranteed as f64)
            };
            r.violate(Violation { check: "existence-window", k: Some(d.k), l: None, lhs, rhs });
        }
    }
    Ok(r)
}

pub fn bv_converge(
    ctx: &Context,
    ell: Option<u32>,
    n_list: &[usize],
    rule: SampleRule,
    tolerance: f64,
) -> Result<Report, CliError> {
    let p = ctx.sampled("bv-converge")?;
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(CliError::Input("--n needs positive cell counts".into()));
    }
    let mode = ctx.modes((1, 1)).remove(0);
    let ch = Channel::from(&mode);
    let target = match ell {
        Some(l) => sampled_pair(ctx, ch, p, l)?,
        None => {
            let lo = (ctx.c_max + ctx.eps) * ch.mu2();
            let mut hi = 2.0 * lo + 1.0;
            loop {
                let found = pruefer_eigenvalues(ch, lo, hi, p, &StepControl::default(), ctx.rel_tol)?;
                if let Some(first) = found.first() {
                    break *first;
                }
                hi *= 2.0;
            }
        }
    };
    let report = bv_convergence(p, target.lambda, ch, n_list, rule, tolerance, ctx.rel_tol)?;
    let mut r = Report::new(
        "bv-converge",
        &["n", "lambda_n", "abs_error", "rel_error", "sup_u", "sup_du", "window_lo", "window_hi", "tv_n", "tv_ok"],
    )
    .checked();
    ctx.echo(&mut r);
    r.set("k", mode.k);
    r.set("l", target.ell);
    r.set("lambda", report.lambda);
    r.set("rule", report.rule);
    r.set("total_variation", report.total_variation);
    r.set("tolerance", tolerance);
    r.set("eigenvalue_decreasing", report.eigenvalue_decreasing);
    r.set("eigenfunction_decreasing", report.eigenfunction_decreasing);
    for s in &report.steps {
        r.row(vec![
            s.n.to_string(),
            num(s.lambda_n),
            num(s.abs_error),
            num(s.rel_error),
            num(s.sup_u),
            num(s.sup_du),
            num(s.window.0),
            num(s.window.1),
            num(s.tv_n),
            flag(s.tv_ok),
        ]);
    }
    let k = Some(mode.k);
    for w in report.steps.windows(2) {
        if w[1].abs_error > w[0].abs_error {
            r.violate(Violation { check: "eigenvalue-decreasing", k, l: Some(target.ell), lhs: w[1].abs_error, rhs: w[0].abs_error });
        }
    }
    if !report.eigenfunction_decreasing {
        let sup = |s: &layerwave::analysis::BvStep| s.sup_u.max(s.sup_du / ch.mu);
        for w in report.steps.windows(2) {
            if sup(&w[1]) > sup(&w[0]) {
                r.violate(Violation { check: "eigenfunction-decreasing", k, l: Some(target.ell), lhs: sup(&w[1]), rhs: sup(&w[0]) });
            }
        }
    }
    if let Some(s) = report.steps.iter().find(|s| !s.tv_ok) {
        r.violate(Violation { check: "total-variation", k, l: Some(target.ell), lhs: s.tv_n, rhs: report.total_variation });
    }
    if !(report.final_rel_error < tolerance) {
        r.violate(Violation { check: "final-error", k, l: Some(target.ell), lhs: report.final_rel_error, rhs: tolerance });
    }
    Ok(r)
}

pub fn oracle(ctx: &Context, grid: usize) -> Result<Report, CliError> {
    let mut r = Report::new("oracle", &["k", "l", "lambda", "lambda_fd", "error_band", "within"]).checked();
    ctx.echo(&mut r);
    r.set("grid", grid);
    let modes = ctx.modes((1, 1));
    let all = ctx.sweep(&modes, |ch| {
        let (lo, hi) = ctx.window(ch, (ctx.c_m, 4.0 * ctx.c_max));
        let pairs = ctx.eigenpairs(ch, lo, hi)?;
        let fd = fd_oracle(ch, &ctx.profile, lo, hi, grid)?;
        Ok((pairs, fd))
    })?;
    for (pairs, fd) in &all {
        let k = pairs.first().map(|e| e.k).unwrap_or(0);
        if pairs.len() != fd.count() {
            r.violate(Violation { check: "count", k: Some(k), l: None, lhs: pairs.len() as f64, rhs: fd.count() as f64 });
        }
        for (e, f) in pairs.iter().zip(&fd.eigenvalues) {
            let err = (e.lambda - f.lambda).abs();
            let within = err <= f.error_band && e.ell as usize == f.index;
            r.row(vec![e.k.to_string(), e.ell.to_string(), num(e.lambda), num(f.lambda), num(f.error_band), flag(within)]);
            if !within {
                r.violate(Violation { check: "oracle", k: Some(e.k), l: Some(e.ell), lhs: err, rhs: f.error_band });
            }
        }
    }
    Ok(r)
}
