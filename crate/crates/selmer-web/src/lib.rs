//! Browser bindings: Tate's algorithm, a local descent report and an X - T
//! image table, each rendered as plain text.

use wasm_bindgen::prelude::*;

use selmer::arith::{Int, Place};
use selmer::descent_local::local_report;
use selmer::elliptic::{IsogenyMap, WeierstrassModel};
use selmer::jacobian::{image_table, parse_points, HyperellipticCurve};
use selmer::tate::tate_algorithm;

fn prime(p: &str) -> Result<Int, String> {
    p.trim().parse().map_err(|_| format!("not an integer: {p:?}"))
}

pub fn tate_text(curve: &str, p: &str) -> Result<String, String> {
    let m = WeierstrassModel::parse(curve).map_err(|e| e.to_string())?;
    let rd = tate_algorithm(&m, &prime(p)?).map_err(|e| e.to_string())?;
    Ok(format!(
        "Kodaira type {}\nv(disc_min) = {}\nconductor exponent = {}\nc_p = {}\ncomponent group {}\nsplit: {}",
        rd.kodaira, rd.v_disc_min, rd.conductor_exponent, rd.tamagawa, rd.geometric_group, rd.split
    ))
}

pub fn local_text(curve: &str, place: &str) -> Result<String, String> {
    let m = WeierstrassModel::parse(curve).map_err(|e| e.to_string())?;
    let v = Place::parse(place).map_err(|e| e.to_string())?;
    let two = IsogenyMap::multiplication(&m, 2).map_err(|e| e.to_string())?;
    let r = local_report(&m, &two, &v).map_err(|e| e.to_string())?;
    let mut out = format!("#C = {}\n#S = {}\n#I = {}\n", r.order_c, r.order_s, r.order_i);
    for e in &r.evidence {
        out += &format!("{}: {}\n", e.point, e.rule);
    }
    for n in &r.notes {
        out += &format!("{n}\n");
    }
    Ok(out)
}

pub fn xt_text(poly: &str, points: &str, place: &str) -> Result<String, String> {
    let c = HyperellipticCurve::parse(poly).map_err(|e| e.to_string())?;
    let pts = parse_points(&points.replace([',', ';'], "\n"), &c).map_err(|e| e.to_string())?;
    let v = Place::parse(place).map_err(|e| e.to_string())?;
    Ok(image_table(&c, &pts, &v).map_err(|e| e.to_string())?.to_string())
}

#[wasm_bindgen]
pub fn tate(curve: &str, p: &str) -> Result<String, JsError> {
    tate_text(curve, p).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn local(curve: &str, place: &str) -> Result<String, JsError> {
    local_text(curve, place).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn xt(poly: &str, points: &str, place: &str) -> Result<String, JsError> {
    xt_text(poly, points, place).map_err(|e| JsError::new(&e))
}
