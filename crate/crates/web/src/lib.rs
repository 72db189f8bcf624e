//! Browser front end for `berkspec`.
//!
//! Each operation is a plain function returning `Result<String, String>` so it
//! can be tested natively; the `#[wasm_bindgen]` wrappers only convert errors.

use berkspec::cli::{apply_overrides, run, Command, Format, Overrides, DEFAULT_SEED};
use berkspec::problem::parse_problem;
use berkspec::scalars::{fmt_q, parse_q, LogMag, Prime};
use berkspec::spectra::{radius_from_delta, sigma_from_radius};
use wasm_bindgen::prelude::*;

pub const EXAMPLE_A: &str = include_str!("../../core/problems/example_a.txt");
pub const RANK2: &str = include_str!("../../core/problems/rank2.txt");
pub const RANK3: &str = include_str!("../../core/problems/rank3.txt");

fn report(problem: &str, cmd: Command, ov: Overrides, format: Format) -> Result<String, String> {
    let mut pf = parse_problem(problem).map_err(|e| e.to_string())?;
    apply_overrides(&mut pf, &ov).map_err(|e| e.to_string())?;
    let r = run(cmd, &pf, DEFAULT_SEED).map_err(|e| e.to_string())?;
    r.render(format).map_err(|e| e.to_string())
}

/// Spectrum report at `point` ("center,t"), or at the file's point when empty.
pub fn spectrum_text(problem: &str, point: &str) -> Result<String, String> {
    let ov = Overrides {
        point: (!point.trim().is_empty()).then(|| point.to_string()),
        ..Overrides::default()
    };
    report(problem, Command::Spectrum, ov, Format::Text)
}

/// Spectrum along the task segment as CSV (`t,center_i,t_sigma_i`).
pub fn vary_csv(problem: &str, steps: usize) -> Result<String, String> {
    let ov = Overrides {
        steps: (steps > 0).then_some(steps),
        ..Overrides::default()
    };
    report(problem, Command::Vary, ov, Format::Csv)
}

fn render_t(m: &LogMag) -> String {
    match m.t() {
        Some(t) => fmt_q(t),
        None => "inf".into(),
    }
}

/// Given `t` with `delta = p^-t`, return `t_R,t_sigma` where `R` is the
/// radius and `sigma` the distance read back from it.
pub fn convert(p: u64, t_delta: &str) -> Result<String, String> {
    let p = Prime::new(p).map_err(|e| e.to_string())?;
    let d = if t_delta.trim() == "inf" {
        LogMag::Zero
    } else {
        LogMag::from_t(parse_q(t_delta.trim()).ok_or(format!("bad exponent '{t_delta}'"))?)
    };
    let r = radius_from_delta(p, &d);
    let s = sigma_from_radius(p, &r).map_err(|e| e.to_string())?;
    Ok(format!("{},{}", render_t(&r), render_t(&s)))
}

#[wasm_bindgen]
pub fn example(name: &str) -> String {
    match name {
        "rank2" => RANK2,
        "rank3" => RANK3,
        _ => EXAMPLE_A,
    }
    .to_string()
}

#[wasm_bindgen(js_name = spectrum)]
pub fn spectrum_js(problem: &str, point: &str) -> Result<String, JsValue> {
    spectrum_text(problem, point).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = vary)]
pub fn vary_js(problem: &str, steps: usize) -> Result<String, JsValue> {
    vary_csv(problem, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = convert)]
pub fn convert_js(p: u32, t_delta: &str) -> Result<String, JsValue> {
    convert(p as u64, t_delta).map_err(|e| JsValue::from_str(&e))
}
