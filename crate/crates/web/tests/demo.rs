use tropwave_web::Demo;

#[test]
fn figure_wave_and_dynamics() {
    let mut d = Demo::new("figure").unwrap();
    let ev: serde_json::Value = serde_json::from_str(&d.wave(0.25, 0.5).unwrap()).unwrap();
    // x is minimal at (1/4, 1/2) and the rest is 1/3 there
    assert_eq!(ev["increment"], "1/12");
    assert!(d.svg().contains("fill-opacity"));
    // a second click at the same point is idle
    let ev: serde_json::Value = serde_json::from_str(&d.wave(0.25, 0.5).unwrap()).unwrap();
    assert_eq!(ev["increment"], "0");
    let r: serde_json::Value = serde_json::from_str(&d.dynamics().unwrap()).unwrap();
    assert_eq!(r["stabilized"], true);
    assert_eq!(r["waves"], 1);
}

#[test]
fn presets_render() {
    for name in ["figure", "square", "pentagon", "distance"] {
        let mut d = Demo::new(name).unwrap();
        assert!(d.svg().starts_with("<svg"));
        d.wave(0.5, 0.5).unwrap();
        d.wave(0.26, 0.4).unwrap();
        d.dynamics().unwrap();
        let s: serde_json::Value = serde_json::from_str(&d.series_json()).unwrap();
        assert!(s["support"].as_array().is_some());
        d.clear();
    }
}
