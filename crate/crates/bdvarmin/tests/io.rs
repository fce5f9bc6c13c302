use std::collections::BTreeMap;

use bdvarmin::io::{read_bd_cells, read_sym_field, read_vector_field, write_bd_cells, write_face_jumps, write_sym_field, write_vector_field, FieldHeader};
use bdvarmin_core::grid::sym_gradient;
use bdvarmin_core::relaxation::{bd_measure, DiscreteBDField};
use bdvarmin_core::{GridDomain, VectorField};

#[test]
fn vector_field_round_trip_is_bit_exact() {
    let g = GridDomain::new(7, 5, 0.125).unwrap();
    let u = VectorField::from_fn(g, |x, y| [(x * 1e3).sin() / 3.0, std::f64::consts::PI * y - 1e-300]);
    let mut meta = BTreeMap::new();
    meta.insert("integrand".to_string(), "phi_mu:1.5".to_string());
    let mut buf = Vec::new();
    write_vector_field(&mut buf, &u, &meta).unwrap();
    let (back, header) = read_vector_field(buf.as_slice()).unwrap();
    assert_eq!(back, u);
    assert_eq!(header.meta, meta);
    assert_eq!(header.grid().unwrap(), g);
}

#[test]
fn tensor_and_cell_round_trips() {
    let g = GridDomain::unit_square(6).unwrap();
    let s = sym_gradient(&VectorField::from_fn(g, |x, y| [x * y * 0.7, (2.0 * x).cos()]));
    let mut buf = Vec::new();
    write_sym_field(&mut buf, &s).unwrap();
    assert_eq!(read_sym_field(buf.as_slice()).unwrap(), s);

    let bd = DiscreteBDField::from_cells(g, |x, y| [if x > 0.5 { 1.0 / 3.0 } else { 0.0 }, y]);
    let mut buf = Vec::new();
    write_bd_cells(&mut buf, &bd).unwrap();
    assert_eq!(read_bd_cells(buf.as_slice()).unwrap(), bd);
}

#[test]
fn face_jump_table() {
    let g = GridDomain::unit_square(4).unwrap();
    let bd = DiscreteBDField::from_cells(g, |x, _| if x > 0.5 { [0.0, 2.0] } else { [0.0, 0.0] });
    let mut buf = Vec::new();
    write_face_jumps(&mut buf, &bd_measure(&bd)).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# {"));
    assert_eq!(lines[1], "ci,cj,orientation,xx,yy,xy,length");
    assert_eq!(lines.len(), 2 + 3);
    assert!(lines[2..].iter().all(|l| l.contains("vertical") && l.contains(&format!("{:.16e}", 1.0))));
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(read_vector_field("x,y,component,value\n".as_bytes()).is_err());
    let g = GridDomain::unit_square(3).unwrap();
    let header = serde_json::to_string(&FieldHeader::for_grid("vector", g)).unwrap();
    // Missing nodes.
    let partial = format!("# {header}\nx,y,component,value\n0,0,0,1\n");
    assert!(read_vector_field(partial.as_bytes()).is_err());
    // Wrong kind.
    let u = VectorField::zeros(g);
    let mut buf = Vec::new();
    write_vector_field(&mut buf, &u, &BTreeMap::new()).unwrap();
    assert!(read_bd_cells(buf.as_slice()).is_err());
    assert!(read_sym_field(buf.as_slice()).is_err());
}
