//! Browser bindings for the interactive demo page.
//!
//! Three entry points, one per use case, each returning a JSON string the
//! page renders onto a canvas. Everything is seeded, so rerunning with the
//! same inputs redraws the identical scene.

use wasm_bindgen::prelude::*;

use edgelake::driverid::{
    evaluate, extract_features, generate_synthetic_drivers, ClassifierKind, OrdinalConfig,
    CHANNEL_COUNT, CHANNEL_NAMES,
};
use edgelake::handover::{
    allocate_hysteresis, allocate_nearest, handover_sequence, minimize_allocation, AllocationTrace,
    EnbSite, Route,
};
use edgelake::scenario::{
    corridor_scenario, gen_handover_scenario, gen_vsn_trace, HandoverGenParams, VsnGenParams,
};
use edgelake::vsn::{rb_baseline, select_aggregation_points, ProximityGraph};

use serde_json::{json, Value};

fn err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// One seeded mobility snapshot with its proximity graph and aggregation
/// plan. `algo` is `"centrality"` or `"rb"`.
#[wasm_bindgen]
pub fn aggregation_scene(
    vehicles: u32,
    radius: f64,
    hops: u32,
    algo: &str,
    seed: u64,
) -> Result<String, JsValue> {
    let params = VsnGenParams {
        vehicles: vehicles.clamp(1, 2000) as usize,
        steps: 1,
        seed,
        ..VsnGenParams::default()
    };
    let trace = gen_vsn_trace(&params).map_err(err)?;
    let snapshot = &trace.snapshots()[0];
    let graph = ProximityGraph::build(snapshot, radius).map_err(err)?;
    let plan = match algo {
        "rb" => rb_baseline(snapshot, radius, 0.15, seed).map_err(err)?,
        _ => select_aggregation_points(&graph, hops.max(1), &snapshot.volumes()).map_err(err)?,
    };

    let vehicle_json: Vec<Value> = snapshot
        .vehicles()
        .iter()
        .map(|v| json!({ "id": v.id.0, "x": v.x, "y": v.y }))
        .collect();
    let edges: Vec<Value> = graph
        .edges()
        .iter()
        .map(|(a, b)| json!([a.0, b.0]))
        .collect();
    let assignment: Value = plan
        .assignment
        .iter()
        .map(|(v, ap)| (v.0.to_string(), json!(ap.0)))
        .collect::<serde_json::Map<String, Value>>()
        .into();

    let scene = json!({
        "width": params.width,
        "height": params.height,
        "radius": radius,
        "vehicles": vehicle_json,
        "edges": edges,
        "aps": plan.aggregation_points.iter().map(|a| a.0).collect::<Vec<_>>(),
        "assignment": assignment,
        "rate": plan.aggregation_rate().unwrap_or(0.0),
        "n_aps": plan.aggregation_points.len(),
        "n_vehicles": snapshot.len(),
    });
    Ok(scene.to_string())
}

fn trace_json(trace: &AllocationTrace) -> Value {
    let summary = handover_sequence(trace);
    json!({
        "assignment": trace.assignments(),
        "sequence": summary.sequence,
        "handovers": summary.handover_count,
        "dwell": summary.dwell_fractions,
    })
}

/// A handover scenario (seeded grid or the fixed corridor) with all three
/// allocation models evaluated on it.
#[wasm_bindgen]
pub fn handover_scene(
    preset: &str,
    grid: u32,
    readings: u32,
    noise: f64,
    margin: f64,
    seed: u64,
) -> Result<String, JsValue> {
    let (sites, route): (Vec<EnbSite>, Route) = match preset {
        "corridor" => corridor_scenario(),
        _ => gen_handover_scenario(&HandoverGenParams {
            grid: grid.clamp(1, 10) as usize,
            readings: readings.clamp(2, 2000) as usize,
            noise_sd: noise.max(0.0),
            seed,
            ..HandoverGenParams::default()
        })
        .map_err(err)?,
    };

    let nearest = allocate_nearest(&route, &sites).map_err(err)?;
    let sticky = allocate_hysteresis(&route, &sites, margin.max(0.0)).map_err(err)?;
    let minimal = minimize_allocation(&route, &sites).map_err(err)?;

    let scene = json!({
        "sites": sites.iter()
            .map(|s| json!({ "id": s.id, "x": s.x, "y": s.y, "range": s.range }))
            .collect::<Vec<_>>(),
        "route": route.readings().iter()
            .map(|r| json!({ "x": r.x, "y": r.y }))
            .collect::<Vec<_>>(),
        "models": {
            "nearest": trace_json(&nearest),
            "hysteresis": trace_json(&sticky),
            "minimal": trace_json(&minimal),
        },
    });
    Ok(scene.to_string())
}

/// Entropy-complexity features of the synthetic drivers. `channel` picks
/// one of the nine channels, or any other value for the per-window mean
/// over all channels. Includes the held-out kNN accuracy on the full
/// 18-value feature vectors.
#[wasm_bindgen]
pub fn driver_feature_scene(
    windows_per_driver: u32,
    channel: i32,
    seed: u64,
) -> Result<String, JsValue> {
    let per_driver = windows_per_driver.clamp(4, 500) as usize;
    let windows = generate_synthetic_drivers(per_driver, seed).map_err(err)?;
    let features = extract_features(&windows, &OrdinalConfig::default()).map_err(err)?;

    let points: Vec<Value> = features
        .iter()
        .map(|f| {
            let (h, c) = if (0..CHANNEL_COUNT as i32).contains(&channel) {
                let i = channel as usize;
                (f.values[2 * i], f.values[2 * i + 1])
            } else {
                let h: f64 = f.values.chunks(2).map(|p| p[0]).sum::<f64>() / CHANNEL_COUNT as f64;
                let c: f64 = f.values.chunks(2).map(|p| p[1]).sum::<f64>() / CHANNEL_COUNT as f64;
                (h, c)
            };
            json!({ "driver": f.label, "h": h, "c": c })
        })
        .collect();

    let accuracy =
        evaluate(&[ClassifierKind::Knn { k: 1 }], &features, 0.75, seed).map_err(err)?[0].accuracy;

    let scene = json!({
        "points": points,
        "accuracy": accuracy,
        "channel_names": CHANNEL_NAMES,
        "windows_per_driver": per_driver,
    });
    Ok(scene.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregation_scene_is_valid_json_with_consistent_counts() {
        let text = aggregation_scene(80, 100.0, 3, "centrality", 7).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["vehicles"].as_array().unwrap().len(), 80);
        assert_eq!(v["n_vehicles"], 80);
        let n_aps = v["n_aps"].as_u64().unwrap() as usize;
        assert_eq!(v["aps"].as_array().unwrap().len(), n_aps);
        assert_eq!(v["assignment"].as_object().unwrap().len(), 80);
        let again = aggregation_scene(80, 100.0, 3, "centrality", 7).unwrap();
        assert_eq!(text, again);
    }

    #[test]
    fn handover_scene_reports_all_three_models() {
        let text = handover_scene("corridor", 5, 100, 15.0, 30.0, 3).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["models"]["nearest"]["handovers"], 7);
        assert_eq!(v["models"]["minimal"]["handovers"], 5);
        assert_eq!(v["route"].as_array().unwrap().len(), 48);

        let grid = handover_scene("grid", 4, 60, 10.0, 20.0, 3).unwrap();
        let v: serde_json::Value = serde_json::from_str(&grid).unwrap();
        assert_eq!(v["sites"].as_array().unwrap().len(), 16);
        let minimal = v["models"]["minimal"]["handovers"].as_u64().unwrap();
        let nearest = v["models"]["nearest"]["handovers"].as_u64().unwrap();
        assert!(minimal <= nearest);
    }

    #[test]
    fn driver_scene_embeds_points_for_every_window() {
        let text = driver_feature_scene(10, -1, 5).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 40);
        let accuracy = v["accuracy"].as_f64().unwrap();
        assert!(accuracy > 0.5);
        for p in v["points"].as_array().unwrap() {
            let h = p["h"].as_f64().unwrap();
            let c = p["c"].as_f64().unwrap();
            assert!((0.0..=1.0).contains(&h));
            assert!((0.0..=1.0).contains(&c));
        }
        // per-channel view stays in bounds too
        let per_channel = driver_feature_scene(10, 4, 5).unwrap();
        let v: serde_json::Value = serde_json::from_str(&per_channel).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 40);
    }
}
