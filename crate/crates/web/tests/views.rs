use graphfield_web::{codec_view, curve_view, gadget_view, rational_points_view};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

const PATH: &str = r#"{"n":3,"edges":[[0,1],[1,2]]}"#;

#[test]
fn gadget_view_round_trips() {
    let v = parse(gadget_view(PATH).unwrap());
    assert_eq!(v["equal"], true);
    // 3 blocks of 4, two edge pairs of 1+5 and one non-edge pair of 1+7
    assert_eq!(v["nodes"].as_array().unwrap().len(), 12 + 6 + 6 + 8);
    assert!(gadget_view(r#"{"n":7,"edges":[]}"#).is_err());
}

#[test]
fn codec_view_full_and_truncated() {
    let full = parse(codec_view(PATH, -1).unwrap());
    assert_eq!(full["equal"], true);
    assert_eq!(full["stages"], full["bound"]);
    assert_eq!(full["pending"].as_array().unwrap().len(), 0);

    let short = parse(codec_view(PATH, 40).unwrap());
    assert_eq!(short["stages"], 40);
    assert_eq!(short["equal"], false);
    assert!(codec_view(r#"{"n":5,"edges":[]}"#, -1).is_err());
}

#[test]
fn rational_points_are_on_the_curve() {
    let pts = parse(rational_points_view("-3", 10).unwrap());
    let pts = pts.as_array().unwrap();
    assert!(pts.iter().any(|p| p["x"] == "3" && p["y"] == "6"));
    for p in pts {
        let v = parse(curve_view("-3", p["x"].as_str().unwrap(), p["y"].as_str().unwrap(), 1).unwrap());
        assert_eq!(v["on_curve"], true, "{p}");
    }
    assert!(rational_points_view("a0", 5).is_err());
}

#[test]
fn curve_view_reports_order() {
    let v = parse(curve_view("-3", "3", "6", 4).unwrap());
    assert_eq!(v["order"], 4);
    assert_eq!(v["multiples"][3]["point"], "O");
    assert_eq!(v["two_torsion"].as_array().unwrap().len(), 4);

    let off = parse(curve_view("-3", "2", "1", 4).unwrap());
    assert_eq!(off["on_curve"], false);
    assert!(curve_view("1", "", "", 1).is_err());
}
