//! One handler per subcommand: parse the job payload, call into the
//! library, render the result as a JSON value.
//!
//! All handlers are pure functions of the job value plus the command-line
//! defaults, so batches evaluate jobs independently and the output order
//! matches the input order. Rendering sticks to sorted-key JSON objects and
//! exact strings (square-class representatives, rationals, roots of unity),
//! keeping the byte stream reproducible across runs.

use std::collections::BTreeMap;

use gp_core::etale::{norm_one_element, QuadAlgebra, QuadAlgebraElement};
use gp_core::fiber::{admissible_coset_even, admissible_coset_odd};
use gp_core::gp::{m_pairing, predict};
use gp_core::oracle::run_selftest;
use gp_core::padic::{hilbert, PrimeField, SquareClass};
use gp_core::quadspace::{classify, QuadraticSpace};
use gp_core::rootnum::{
    gauss_eps, pair_eps_sp, sp_correction, MultChar, Psi, RootNumberTable, RootOfUnity,
};
use gp_core::transfer::{tf_even, tf_odd, tf_twisted};
use gp_core::wd::{
    component_group, ComponentGroup, IrredDescriptor, PacketCharacter, ParamKind, SelfDuality,
    WDParameter,
};
use gp_core::xi::{enumerate_c, enumerate_c_one, CosetElement, GammaElement, XiEntry, XiFamily};
use gp_core::{Error, Result};
use num_rational::BigRational;
use serde_json::{json, Value};

/// Fallbacks taken from command-line flags for fields a job may omit.
pub struct Defaults {
    pub p: Option<u64>,
    pub nu0: Option<BigRational>,
    pub table: Option<RootNumberTable>,
}

/// Evaluates a job file against a subcommand. A JSON object is a single
/// job; an array is a batch, answered in order.
pub fn execute(command: &str, root: &Ctx, defaults: &Defaults) -> Result<Vec<Value>> {
    let jobs: Vec<Ctx> = match root.value() {
        Value::Array(_) => root.as_array()?,
        _ => vec![root.clone()],
    };
    jobs.iter()
        .map(|job| dispatch(command, job, defaults))
        .collect()
}

fn dispatch(command: &str, job: &Ctx, defaults: &Defaults) -> Result<Value> {
    match command {
        "hilbert" => cmd_hilbert(job, defaults),
        "squareclass" => cmd_squareclass(job, defaults),
        "classify" => cmd_classify(job, defaults),
        "xi-inspect" => cmd_xi_inspect(job, defaults),
        "transfer-factor" => cmd_transfer_factor(job, defaults),
        "param-fiber" => cmd_param_fiber(job, defaults),
        "compgroup" => cmd_compgroup(job, defaults),
        "gp-predict" => cmd_gp_predict(job, defaults),
        "rootnum" => cmd_rootnum(job, defaults),
        "selftest" => cmd_selftest(job),
        other => Err(Error::Validation(format!("unknown command {other}"))),
    }
}

// ---------------------------------------------------------------------------
// Shared payload parsers.

use crate::schema::Ctx;

fn field_of(job: &Ctx, defaults: &Defaults) -> Result<PrimeField> {
    let p = match job.opt("p") {
        Some(c) => c.as_u64()?,
        None => defaults
            .p
            .ok_or_else(|| job.err("missing prime: set field \"p\" or pass --p"))?,
    };
    PrimeField::new(p).map_err(|e| job.err(e.to_string()))
}

fn nu0_of(job: &Ctx, field: PrimeField, defaults: &Defaults) -> Result<SquareClass> {
    match job.opt("nu0") {
        Some(c) => c.as_square_class(field),
        None => {
            let r = defaults
                .nu0
                .as_ref()
                .ok_or_else(|| job.err("missing scale: set field \"nu0\" or pass --nu0"))?;
            SquareClass::from_rational(r, field)
        }
    }
}

fn parse_space(ctx: &Ctx, field: PrimeField) -> Result<QuadraticSpace> {
    let diag = ctx
        .as_array()?
        .iter()
        .map(|c| c.as_square_class(field))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuadraticSpace::from_diagonal(field, diag))
}

/// One eigenvalue entry. Three spellings:
/// `{"split": t}` for the split-algebra element (t, 1/t),
/// `{"delta": d, "t": t}` for the Cayley element (1 + t√d)/(1 − t√d),
/// `{"delta": d, "y": [a, b]}` for the explicit element a + b√d.
fn parse_entry(ctx: &Ctx, field: PrimeField) -> Result<XiEntry> {
    if let Some(split) = ctx.opt("split") {
        let t = split.as_rational()?;
        let y = norm_one_element(QuadAlgebra::split(field), &t)
            .ok_or_else(|| split.err("split parameter must be nonzero"))?;
        return XiEntry::new(y);
    }
    let delta_ctx = ctx.at("delta")?;
    let delta = delta_ctx.as_square_class(field)?;
    let algebra = QuadAlgebra::field_ext(delta).map_err(|e| delta_ctx.err(e.to_string()))?;
    let y = if let Some(coords) = ctx.opt("y") {
        let pair = coords.as_array()?;
        if pair.len() != 2 {
            return Err(coords.err("expected [a, b] with y = a + b*sqrt(delta)"));
        }
        QuadAlgebraElement::new(algebra, pair[0].as_rational()?, pair[1].as_rational()?)
    } else {
        let t_ctx = ctx.at("t")?;
        let t = t_ctx.as_rational()?;
        norm_one_element(algebra, &t)
            .ok_or_else(|| t_ctx.err("parameter excluded: delta * t^2 = 1"))?
    };
    XiEntry::new(y)
}

fn parse_family(ctx: &Ctx, field: PrimeField) -> Result<XiFamily> {
    let entries = ctx
        .as_array()?
        .iter()
        .map(|e| parse_entry(e, field))
        .collect::<Result<Vec<_>>>()?;
    XiFamily::new(field, entries)
}

/// A sign map on entry indices, written as pairs: `[[0, 1], [2, -1]]`.
fn parse_coset(ctx: &Ctx) -> Result<CosetElement> {
    let mut signs = BTreeMap::new();
    for pair in ctx.as_array()? {
        let kv = pair.as_array()?;
        if kv.len() != 2 {
            return Err(pair.err("expected [index, sign]"));
        }
        let i = kv[0].as_usize()?;
        let s = kv[1].as_sign()?;
        if signs.insert(i, s).is_some() {
            return Err(kv[0].err(format!("duplicate index {i}")));
        }
    }
    CosetElement::new(signs)
}

fn render_coset(c: &CosetElement) -> Value {
    Value::Array(
        c.signs()
            .iter()
            .map(|(i, s)| json!([i, s]))
            .collect(),
    )
}

/// γ data for the twisted factor: one coordinate pair per entry, plus the
/// optional extra square class carried by imp-type elements.
fn parse_gamma(ctx: &Ctx, xi: &XiFamily, field: PrimeField) -> Result<GammaElement> {
    let coords_ctx = ctx.at("coords")?;
    let coords = coords_ctx.as_array()?;
    if coords.len() != xi.len() {
        return Err(coords_ctx.err(format!(
            "expected one [a, b] pair per family entry ({} entries)",
            xi.len()
        )));
    }
    let mut gammas = Vec::new();
    for (entry, c) in xi.entries().iter().zip(&coords) {
        let pair = c.as_array()?;
        if pair.len() != 2 {
            return Err(c.err("expected [a, b]"));
        }
        gammas.push(QuadAlgebraElement::new(
            entry.algebra(),
            pair[0].as_rational()?,
            pair[1].as_rational()?,
        ));
    }
    let gamma_d = match ctx.opt("d") {
        Some(c) => Some(c.as_square_class(field)?),
        None => None,
    };
    Ok(GammaElement::new(gammas, gamma_d))
}

fn parse_duality(ctx: &Ctx) -> Result<SelfDuality> {
    match ctx.as_str()? {
        "orthogonal" => Ok(SelfDuality::Orthogonal),
        "symplectic" => Ok(SelfDuality::Symplectic),
        "none" => Ok(SelfDuality::NotSelfDual),
        other => Err(ctx.err(format!(
            "unknown self-duality \"{other}\" (use \"orthogonal\", \"symplectic\" or \"none\")"
        ))),
    }
}

fn parse_descriptor(ctx: &Ctx, field: PrimeField) -> Result<IrredDescriptor> {
    let id = ctx.at("id")?.as_str()?;
    let dim = ctx.at("dim")?.as_usize()?;
    let kind = parse_duality(&ctx.at("type")?)?;
    let disc = match ctx.opt("disc") {
        Some(c) => Some(c.as_square_class(field)?),
        None => None,
    };
    let central_sign = match ctx.opt("central_sign") {
        Some(c) => c.as_sign()?,
        // Where the sign is forced, fill it in; otherwise default to +1.
        None => match (kind, dim, disc) {
            (SelfDuality::Orthogonal, 1, Some(d)) => {
                hilbert(d, SquareClass::minus_one(field))?
            }
            _ => 1,
        },
    };
    IrredDescriptor::new(id, dim, kind, disc, central_sign).map_err(|e| ctx.err(e.to_string()))
}

/// Inline descriptor list with multiplicities, for `compgroup`.
fn parse_inline_items(ctx: &Ctx, field: PrimeField) -> Result<Vec<(IrredDescriptor, usize)>> {
    ctx.as_array()?
        .iter()
        .map(|c| {
            let desc = parse_descriptor(c, field)?;
            let l = match c.opt("l") {
                Some(lc) => lc.as_usize()?,
                None => 1,
            };
            Ok((desc, l))
        })
        .collect()
}

fn parse_kind(ctx: &Ctx) -> Result<ParamKind> {
    match ctx.as_str()? {
        "orthogonal" => Ok(ParamKind::Orthogonal),
        "symplectic" => Ok(ParamKind::Symplectic),
        other => Err(ctx.err(format!(
            "unknown parameter kind \"{other}\" (use \"orthogonal\" or \"symplectic\")"
        ))),
    }
}

/// `{"items": [[id, l], ...], "theta_pairs": [[id, l], ...]}` with ids
/// resolved against a shared constituent list.
fn parse_param(
    ctx: &Ctx,
    field: PrimeField,
    constituents: &BTreeMap<String, IrredDescriptor>,
) -> Result<WDParameter> {
    let lookup = |pairs: &Ctx| -> Result<Vec<(IrredDescriptor, usize)>> {
        pairs
            .as_array()?
            .iter()
            .map(|pair| {
                let kv = pair.as_array()?;
                if kv.len() != 2 {
                    return Err(pair.err("expected [id, multiplicity]"));
                }
                let id = kv[0].as_str()?;
                let l = kv[1].as_usize()?;
                let desc = constituents
                    .get(id)
                    .ok_or_else(|| kv[0].err(format!("unknown constituent id \"{id}\"")))?;
                Ok((desc.clone(), l))
            })
            .collect()
    };
    let items = lookup(&ctx.at("items")?)?;
    let theta_pairs = match ctx.opt("theta_pairs") {
        Some(c) => lookup(&c)?,
        None => Vec::new(),
    };
    WDParameter::new(field, items, theta_pairs)
}

fn parse_table(ctx: &Ctx) -> Result<RootNumberTable> {
    let psi_conductor = match ctx.opt("psi_conductor") {
        Some(c) => c.as_u64()? as u32,
        None => 0,
    };
    let mut entries = Vec::new();
    for e in ctx.at("entries")?.as_array()? {
        let kv = e.as_array()?;
        if kv.len() != 3 {
            return Err(e.err("expected [i, iprime, sign]"));
        }
        entries.push((
            kv[0].as_str()?.to_string(),
            kv[1].as_str()?.to_string(),
            kv[2].as_sign()?,
        ));
    }
    RootNumberTable::new(psi_conductor, entries)
}

/// Loads the table referenced by a `--table` file value.
pub fn table_from_value(value: &Value) -> Result<RootNumberTable> {
    parse_table(&Ctx::root(value))
}

/// A multiplicative character: `{"trivial": true}`, `{"quadratic": δ}`, or
/// explicit generator images `{"conductor_exp": a, "unit_images": [[k, n],
/// ...], "at_p": [k, n]}`.
fn parse_char(ctx: &Ctx, field: PrimeField) -> Result<MultChar> {
    if let Some(t) = ctx.opt("trivial") {
        if t.as_bool()? {
            return Ok(MultChar::trivial(field));
        }
        return Err(t.err("\"trivial\" must be true when present"));
    }
    if let Some(q) = ctx.opt("quadratic") {
        return Ok(MultChar::quadratic(q.as_square_class(field)?));
    }
    let a = ctx.at("conductor_exp")?.as_u64()? as u32;
    let images = ctx
        .at("unit_images")?
        .as_array()?
        .iter()
        .map(|c| c.as_root_of_unity())
        .collect::<Result<Vec<_>>>()?;
    let at_p = ctx.at("at_p")?.as_root_of_unity()?;
    MultChar::from_images(field, a, images, at_p)
}

fn psi_of(job: &Ctx) -> Result<Psi> {
    match job.opt("psi") {
        None => Ok(Psi::standard()),
        Some(c) => {
            let n = match c.opt("conductor_exp") {
                Some(nc) => nc.as_u64()? as u32,
                None => 0,
            };
            let alpha = match c.opt("unit_scale") {
                Some(ac) => {
                    let a = ac.as_i64()?;
                    if a == 0 {
                        return Err(ac.err("the unit scale must be nonzero"));
                    }
                    a
                }
                None => 1,
            };
            Ok(Psi::new(n, alpha))
        }
    }
}

// ---------------------------------------------------------------------------
// Rendering helpers.

fn class_string(c: SquareClass) -> String {
    c.representative().to_string()
}

fn diag_strings(q: &QuadraticSpace) -> Vec<String> {
    q.diag().iter().map(|c| class_string(*c)).collect()
}

fn render_root(w: RootOfUnity) -> Value {
    let (k, n) = w.angle();
    json!({
        "value": w.to_string(),
        "angle": [k, n],
        "sign": w.as_sign(),
    })
}

fn render_character(c: &PacketCharacter) -> Value {
    Value::Array(
        c.ids()
            .iter()
            .zip(c.bits())
            .map(|(id, bit)| json!([id, bit]))
            .collect(),
    )
}

fn render_group(group: &ComponentGroup) -> Value {
    json!({
        "ids": group.ids(),
        "order": group.order(),
        "z": group.z(),
        "constrained": group.is_constrained(),
        "imp": group.imp_flags(),
    })
}

// ---------------------------------------------------------------------------
// Handlers.

fn cmd_hilbert(job: &Ctx, defaults: &Defaults) -> Result<Value> {
    let field = field_of(job, defaults)?;
    let a = job.at("a")?.as_square_class(field)?;
    let b = job.at("b")?.as_square_class(field)?;
    Ok(json!({ "value": hilbert(a, b)? }))
}

fn cmd_squareclass(job: &Ctx, defaults: &Defaults) -> Result<Value> {
    let field = field_of(job, defaults)?;
    let x = job.at("x")?.as_square_class(field)?;
    Ok(json!({
        "index": x.index(),
        "rep": class_string(x),
        "is_square": x.is_trivial(),
    }))
}

fn cmd_classify(job: &Ctx, defaults: &Defaults) -> Result<Value> {
    let field = field_of(job, defaults)?;
    let d = job.at("d")?.as_usize()?;
    let delta = job.at("delta")?.as_square_class(field)?;
    let forms = classify(field, d, delta);
    Ok(json!({
        "count": forms.len(),
        "forms": forms
            .iter()
            .map(|q| json!({
                "diag": diag_strings(q),
                "det": class_string(q.det()),
                "hasse": q.hasse(),
            }))
            .collect::<Vec<_>>(),
    }))
}

fn cmd_xi_inspect(job: &Ctx, defaults: &Defaults) -> Result<Value> {
    let field = field_of(job, defaults)?;
    let xi = parse_family(&job.at("entries")?, field)?;
    let entries: Vec<Value> = xi
        .entries()
        .iter()
        .map(|e| {
            json!({
                "algebra": e.algebra().to_string(),
                "trace": e.y().trace().to_string(),
                "central": e.is_central(),
            })
        })
        .collect();
    Ok(json!({
        "d_xi": xi.d_xi(),
        "delta_xi": class_string(xi.delta_xi()),
        "regular": xi.is_regular(),
        "field_indices": xi.field_indices(),
        "c_order": enumerate_c(&xi).len(),
        "c_one_order": enumerate_c_one(&xi).len(),
        "entries": entries,
    }))
}

fn cmd_transfer_factor(job: &Ctx, defaults: &Defaults) -> Result<Value> {
    let field = field_of(job, defaults)?;
    let mode = job.at("mode")?;
    let value = match mode.as_str()? {
        "odd" => {
            let q_prime = parse_space(&job.at("q_prime")?, field)?;
            let q_plus = parse_space(&job.at("q_plus")?, field)?;
            let q_minus = parse_space(&job.at("q_minus")?, field)?;
            let xi_plus = parse_family(&job.at("xi_plus")?, field)?;
            let xi_minus = parse_family(&job.at("xi_minus")?, field)?;
            let c = parse_coset(&job.at("c")?)?;
            tf_odd(&q_prime, &q_plus, &q_minus, &xi_plus, &xi_minus, &c)?
        }
        "even" => {
            let q = parse_space(&job.at("q")?, field)?;
            let q_plus = parse_space(&job.at("q_plus")?, field)?;
            let q_minus = parse_space(&job.at("q_minus")?, field)?;
            let xi_plus = parse_family(&job.at("xi_plus")?, field)?;
            let xi_minus = parse_family(&job.at("xi_minus")?, field)?;
            let c = parse_coset(&job.at("c")?)?;
            let nu0 = nu0_of(job, field, defaults)?;
            tf_even(&q, &q_plus, &q_minus, &xi_plus, &xi_minus, &c, nu0)?
        }
        "twisted" => {
            let q = parse_space(&job.at("q")?, field)?;
            let xi = parse_family(&job.at("xi")?, field)?;
            let gamma = parse_gamma(&job.at("gamma")?, &xi, field)?;
            tf_twisted(&q, &xi, &gamma)?
        }
        other => {
            return Err(mode.err(format!(
                "unknown mode \"{other}\" (use \"odd\", \"even\" or \"twisted\")"
            )))
        }
    };
    Ok(json!({ "value": value }))
}

fn cmd_param_fiber(job: &Ctx, defaults: &Defaults) -> Result<Value> {
    let field = field_of(job, defaults)?;
    let space = parse_space(&job.at("space")?, field)?;
    let xi = parse_family(&job.at("entries")?, field)?;
    if space.dim() % 2 == 1 {
        let (cosets, line) = admissible_coset_odd(&space, &xi)?;
        Ok(json!({
            "cosets": cosets.iter().map(render_coset).collect::<Vec<_>>(),
            "line": class_string(line.diag()[0]),
        }))
    } else {
        let cosets = admissible_coset_even(&space, &xi)?;
        Ok(json!({
            "cosets": cosets.iter().map(render_coset).collect::<Vec<_>>(),
        }))
    }
}

fn cmd_compgroup(job: &Ctx, defaults: &Defaults) -> Result<Value> {
    let field = field_of(job, defaults)?;
    let kind = parse_kind(&job.at("kind")?)?;
    let items = parse_inline_items(&job.at("items")?, field)?;
    let theta_pairs = match job.opt("theta_pairs") {
        Some(c) => parse_inline_items(&c, field)?,
        None => Vec::new(),
    };
    let param = WDParameter::new(field, items, theta_pairs)?;
    let group = component_group(&param, kind);
    let mut rendered = render_group(&group);
    rendered["dim"] = json!(param.dim());
    Ok(rendered)
}

fn cmd_gp_predict(job: &Ctx, defaults: &Defaults) -> Result<Value> {
    let field = field_of(job, defaults)?;
    let nu0 = nu0_of(job, field, defaults)?;
    let mut constituents = BTreeMap::new();
    for c in job.at("constituents")?.as_array()? {
        let desc = parse_descriptor(&c, field)?;
        if constituents
            .insert(desc.id().to_string(), desc)
            .is_some()
        {
            return Err(c.err("duplicate constituent id"));
        }
    }
    let phi = parse_param(&job.at("phi")?, field, &constituents)?;
    let phi_prime = parse_param(&job.at("phi_prime")?, field, &constituents)?;
    let q = parse_space(&job.at("q")?, field)?;
    let q_prime = parse_space(&job.at("q_prime")?, field)?;
    let table = match job.opt("table") {
        Some(c) => parse_table(&c)?,
        None => defaults
            .table
            .clone()
            .ok_or_else(|| job.err("missing root-number table: inline \"table\" or --table"))?,
    };
    let prediction = predict(&phi, &phi_prime, &q, &q_prime, nu0, &table)?;
    let (eps, eps_prime) = match prediction.distinguished() {
        Some((e, ep)) => (render_character(e), render_character(ep)),
        None => (Value::Null, Value::Null),
    };
    let mut out = json!({
        "E": prediction.e(),
        "mu": prediction.mu_gprime(),
        "vanishing": prediction.vanishing(),
        "empty_packet": prediction.empty_packet(),
        "conditional": true,
        "eps": eps,
        "eps_prime": eps_prime,
    });
    // Optional probe: evaluate the multiplicity pairing at one (s, s').
    if let Some(pair) = job.opt("pair_at") {
        let s = parse_bits(&pair.at("s")?)?;
        let s_prime = parse_bits(&pair.at("s_prime")?)?;
        out["pairing"] = json!(m_pairing(&phi, &s, &phi_prime, &s_prime, &prediction)?);
    }
    Ok(out)
}

fn parse_bits(ctx: &Ctx) -> Result<Vec<u8>> {
    ctx.as_array()?
        .iter()
        .map(|c| match c.as_u64()? {
            0 => Ok(0u8),
            1 => Ok(1u8),
            _ => Err(c.err("expected 0 or 1")),
        })
        .collect()
}

fn cmd_rootnum(job: &Ctx, defaults: &Defaults) -> Result<Value> {
    let field = field_of(job, defaults)?;
    let psi = psi_of(job)?;
    let op = job.at("op")?;
    match op.as_str()? {
        "gauss" => {
            let chi = parse_char(&job.at("chi")?, field)?;
            Ok(render_root(gauss_eps(&chi, &psi)?))
        }
        "sp" => {
            let chi = parse_char(&job.at("chi")?, field)?;
            let n = job.at("n")?.as_usize()?;
            Ok(render_root(sp_correction(&chi, n, &psi)?))
        }
        "pair" => {
            let chi1 = parse_char(&job.at("chi1")?, field)?;
            let chi2 = parse_char(&job.at("chi2")?, field)?;
            let m = match job.opt("m") {
                Some(c) => c.as_usize()?,
                None => 1,
            };
            let n = match job.opt("n") {
                Some(c) => c.as_usize()?,
                None => 1,
            };
            Ok(render_root(pair_eps_sp(&chi1, m, &chi2, n, &psi)?))
        }
        "table" => {
            let parse_side = |side: &Ctx| -> Result<Vec<(String, MultChar, usize)>> {
                side.as_array()?
                    .iter()
                    .map(|c| {
                        let kv = c.as_array()?;
                        if kv.len() != 3 {
                            return Err(c.err("expected [id, character, sp_size]"));
                        }
                        Ok((
                            kv[0].as_str()?.to_string(),
                            parse_char(&kv[1], field)?,
                            kv[2].as_usize()?,
                        ))
                    })
                    .collect()
            };
            let phi = parse_side(&job.at("phi")?)?;
            let phi_prime = parse_side(&job.at("phi_prime")?)?;
            let table = gp_core::rootnum::abelian_table(&phi, &phi_prime, &psi)?;
            Ok(json!({
                "psi_conductor": table.psi_conductor(),
                "entries": table
                    .entries()
                    .map(|((i, ip), sign)| json!([i, ip, sign]))
                    .collect::<Vec<_>>(),
            }))
        }
        other => Err(op.err(format!(
            "unknown op \"{other}\" (use \"gauss\", \"sp\", \"pair\" or \"table\")"
        ))),
    }
}

fn cmd_selftest(job: &Ctx) -> Result<Value> {
    let p_list = match job.opt("p_list") {
        Some(c) => c
            .as_array()?
            .iter()
            .map(|p| p.as_u64())
            .collect::<Result<Vec<_>>>()?,
        None => vec![2, 3, 5],
    };
    let report = run_selftest(&p_list)?;
    Ok(json!({
        "suites": report
            .suites
            .iter()
            .map(|s| json!({
                "name": s.name,
                "cases": s.cases,
                "failures": s.failures,
            }))
            .collect::<Vec<_>>(),
        "total_failures": report.failures(),
    }))
}
