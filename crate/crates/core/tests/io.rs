use std::io::Cursor;

use levy_lab::io::{read_flight, read_path, write_flight, write_path, DistanceReport, PATH_FORMAT};
use levy_lab::laws::{GapLaw, JumpLaw};
use levy_lab::path::{Side, StepPath};
use levy_lab::skorokhod::d_j2_estimate;
use levy_lab::walk::{build_flight, MediumMode};
use levy_lab::Error;
use proptest::prelude::*;
use serde_json::json;

fn roundtrip(p: &StepPath) -> StepPath {
    let mut buf = Vec::new();
    write_path(&mut buf, p, json!({"tag": "test"})).unwrap();
    let (back, header) = read_path(Cursor::new(buf)).unwrap();
    assert_eq!(header.format, PATH_FORMAT);
    assert_eq!(header.meta["tag"], "test");
    back
}

#[test]
fn path_file_layout() {
    let p = StepPath::piecewise(0.0, 1.0, &[0.5], &[0.0, 1.0]).unwrap();
    let mut buf = Vec::new();
    write_path(&mut buf, &p, json!({})).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# {"));
    assert_eq!(&lines[1..], &["breakpoint,value", "0,0", "0.5,1"]);
}

#[test]
fn two_sided_paths_roundtrip() {
    let p = StepPath::piecewise(-1.0, 2.0, &[-0.3, 0.1, 1.7], &[0.1, 1.0 / 3.0, -2.5e-300, 7e200]).unwrap();
    assert_eq!(roundtrip(&p), p);
    let c = p.cadlag_ify();
    assert_eq!(roundtrip(&c).side(), Side::Cadlag);
}

#[test]
fn malformed_path_files() {
    let bad_header = "breakpoint,value\n0,0\n";
    assert!(matches!(read_path(Cursor::new(bad_header)), Err(Error::Format(_))));
    let wrong_format = "# {\"format\":\"other\",\"version\":1,\"start\":0,\"end\":1,\"side\":\"cadlag\"}\nbreakpoint,value\n0,0\n";
    assert!(matches!(read_path(Cursor::new(wrong_format)), Err(Error::Format(_))));
    let wrong_start =
        "# {\"format\":\"levy-lab/path\",\"version\":1,\"start\":0,\"end\":1,\"side\":\"cadlag\"}\nbreakpoint,value\n0.1,0\n";
    assert!(matches!(read_path(Cursor::new(wrong_start)), Err(Error::Format(_))));
    let unsorted = "# {\"format\":\"levy-lab/path\",\"version\":1,\"start\":0,\"end\":1,\"side\":\"cadlag\"}\nbreakpoint,value\n0,0\n0.6,1\n0.4,2\n";
    assert!(read_path(Cursor::new(unsorted)).is_err());
}

#[test]
fn flight_tables_roundtrip() {
    let flight = build_flight(
        GapLaw::ParetoTail { beta: 0.8, x_min: 1.0 },
        JumpLaw::DiscretePareto { alpha: 1.5, p_plus: 0.75 },
        200,
        3,
        4,
        MediumMode::Auto,
    )
    .unwrap();
    let mut buf = Vec::new();
    write_flight(&mut buf, &flight).unwrap();
    assert!(buf.starts_with(b"i,S_i,Y_i\n"));
    let rows = read_flight(Cursor::new(buf)).unwrap();
    assert_eq!(rows.len(), 201);
    for (i, (j, s, y)) in rows.into_iter().enumerate() {
        assert_eq!(j, i);
        assert_eq!(s, flight.walk().position(i));
        assert_eq!(y, flight.targets()[i]);
    }
    assert!(matches!(read_flight(Cursor::new("i,S_i\n0,0\n")), Err(Error::Format(_))));
}

#[test]
fn distance_reports_roundtrip() {
    let f = StepPath::piecewise(0.0, 1.0, &[0.3], &[0.0, 1.0]).unwrap();
    let g = StepPath::piecewise(0.0, 1.0, &[0.4], &[0.0, 1.0]).unwrap();
    let r = d_j2_estimate(&f, &g, 100).unwrap();
    let report = DistanceReport::new(&r, &f, &g).unwrap();
    let json = serde_json::to_string(&report).unwrap();
    let back: DistanceReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
    assert_eq!(report.value, r.value);
}

proptest! {
    #[test]
    fn arbitrary_paths_roundtrip(
        mut fr in prop::collection::vec(0.0001f64..0.9999, 0..20),
        vals in prop::collection::vec(-1e6f64..1e6, 21),
        start in -10.0f64..0.0,
        len in 0.1f64..20.0,
    ) {
        fr.sort_by(f64::total_cmp);
        fr.dedup();
        let breaks: Vec<f64> = fr.iter().map(|u| start + len * u).collect();
        prop_assume!(breaks.windows(2).all(|w| w[0] < w[1]));
        let p = StepPath::piecewise(start, start + len, &breaks, &vals[..breaks.len() + 1]).unwrap();
        prop_assert_eq!(roundtrip(&p), p);
    }
}
