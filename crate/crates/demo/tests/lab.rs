use midgraph_demo::Lab;
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn layout_of_g4() {
    let lab = Lab::new(2, 4).unwrap();
    assert_eq!((lab.vcount(), lab.ecount()), (12, 16));
    let l = parse(lab.layout());
    let nodes = l["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 12);
    assert_eq!(l["edges"].as_array().unwrap().len(), 16);
    assert_eq!(nodes[2]["label"], "{0,1}");
    assert_eq!(nodes[2]["x"], 0.5);
    for v in nodes {
        for k in ["x", "y"] {
            let c = v[k].as_f64().unwrap();
            assert!((0.0..=1.0).contains(&c));
        }
    }
    let l3 = parse(Lab::new(3, 3).unwrap().layout());
    assert_eq!(l3["nodes"].as_array().unwrap().len(), 18);
}

#[test]
fn distances_from_a_leaf() {
    let lab = Lab::new(2, 5).unwrap();
    let d = parse(lab.distances(0));
    assert_eq!(d["d"][1], 16);
    assert_eq!(d["rho"][1], "1");
    assert_eq!(d["max"], 16);
    assert!(lab.distances(68).is_err());
}

#[test]
fn geodesic_between_leaves() {
    let lab = Lab::new(2, 4).unwrap();
    let g = parse(lab.geodesic(0, 1, 2));
    let labels: Vec<&str> = g["labels"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(labels, ["0", "{0,{0,1}}", "{0,1}", "{1,{0,1}}", "1"]);
    assert!(lab.geodesic(0, 1, 4).is_err());
}

#[test]
fn separated_set_in_g5() {
    let lab = Lab::new(2, 5).unwrap();
    let s = parse(lab.separated(6));
    assert_eq!(s["status"], "exact");
    assert_eq!(s["vertices"].as_array().unwrap().len(), 3);
    assert!(s["min_distance"].as_u64().unwrap() >= 7);
    assert!(lab.separated(2).is_err());
    assert!(Lab::new(2, 7).is_err());
}
