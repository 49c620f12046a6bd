use coupler_core::gadget::verify_gadget;
use coupler_core::parity::{
    compile, encode, roundtrip_validate, unit_cell_layout, LogicalProblem, Member,
};
use coupler_core::spin::{energy_table, IsingHamiltonian, SpinConfig};
use proptest::prelude::*;

fn random_problem(m: usize, weights: &[i32]) -> LogicalProblem {
    let mut couplings = Vec::new();
    let mut w = weights.iter();
    for j in 1..m {
        for i in 0..j {
            couplings.push((i, j, *w.next().unwrap() as f64 / 1024.0));
        }
    }
    LogicalProblem::new(m, couplings).unwrap()
}

fn field_energy(map_fields: &[f64], phys: &SpinConfig) -> f64 {
    map_fields
        .iter()
        .enumerate()
        .map(|(k, b)| if phys.is_up(k) { *b } else { -*b })
        .sum()
}

#[test]
fn constraint_dimension_and_valid_sector() {
    for m in 3..=6 {
        let p = LogicalProblem::new(m, Vec::new()).unwrap();
        let (map, h) = compile(&p, 1.0).unwrap();
        let k = m * (m - 1) / 2;
        assert_eq!(map.plaquettes.len(), k - (m - 1));
        assert!(map.plaquettes.iter().all(|q| q.len() == 4));
        let e = energy_table(&h).unwrap();
        let min = e.iter().copied().fold(f64::INFINITY, f64::min);
        let ground = e.iter().filter(|&&x| x == min).count();
        assert_eq!(ground, 1 << (m - 1), "M={m}");
        let valid = (0..1u64 << k)
            .filter(|&b| map.violations(&SpinConfig::from_bits(k, b)).unwrap() == 0)
            .count();
        assert_eq!(valid, 1 << (m - 1), "M={m}");
        let r = roundtrip_validate(&p, 1.0).unwrap();
        assert_eq!(r.embedded_ground_states, 1 << (m - 1));
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn single_coupling_ground_set() {
    let p = LogicalProblem::new(4, vec![(0, 1, 1.0)]).unwrap();
    let logical = energy_table(&p.hamiltonian().unwrap()).unwrap();
    let min = logical.iter().copied().fold(f64::INFINITY, f64::min);
    for (b, &e) in logical.iter().enumerate() {
        let c = SpinConfig::from_bits(4, b as u64);
        assert_eq!(e == min, c.is_up(0) != c.is_up(1));
    }
    let r = roundtrip_validate(&p, p.default_constraint()).unwrap();
    assert!(r.ground_sets_match && r.passed, "{r:?}");
}

#[test]
fn layout_grows_by_appending() {
    let mut prev = None;
    for m in 3..=7 {
        let p = LogicalProblem::new(m, Vec::new()).unwrap();
        let (map, _) = compile(&p, 2.0).unwrap();
        let layout = unit_cell_layout(&map);
        assert_eq!(layout.cells.len(), (m - 1) * (m - 2) / 2);
        let rows = layout.cells.iter().map(|c| c.row).max().unwrap();
        assert_eq!(rows, m - 3);
        for r in 0..=rows {
            assert_eq!(layout.cells.iter().filter(|c| c.row == r).count(), r + 1);
        }
        for cell in &layout.cells {
            let report = verify_gadget(&cell.gadget.build().unwrap(), &cell.gadget).unwrap();
            assert!(report.max_deviation <= 1e-9, "{report:?}");
            assert_eq!(cell.gadget.j_n, -2.0);
        }
        if let Some(prev) = prev.replace(layout.clone()) {
            let prev: coupler_core::parity::Layout = prev;
            assert_eq!(&layout.cells[..prev.cells.len()], &prev.cells[..]);
            assert_eq!(&layout.links[..prev.links.len()], &prev.links[..]);
        }
    }
}

#[test]
fn fixed_members_sit_on_the_diagonal() {
    let (map, _) = compile(&LogicalProblem::new(6, Vec::new()).unwrap(), 1.0).unwrap();
    let fixed: Vec<usize> = map
        .plaquettes
        .iter()
        .flat_map(|q| q.iter())
        .filter_map(|m| match m {
            Member::Fixed(j) => Some(*j),
            Member::Physical(_) => None,
        })
        .collect();
    assert_eq!(fixed, map.fixed);
}

proptest! {
    #[test]
    fn gauge_invariance_and_round_trip(m in 3usize..=6, bits in any::<u64>()) {
        let p = LogicalProblem::new(m, Vec::new()).unwrap();
        let (map, _) = compile(&p, 1.0).unwrap();
        let c = SpinConfig::from_bits(m, bits);
        let mut flipped = c.clone();
        (0..m).for_each(|i| flipped.flip(i));
        let phys = encode(&p, &c).unwrap();
        prop_assert_eq!(&phys, &encode(&p, &flipped).unwrap());
        let d = map.decode(&phys).unwrap();
        prop_assert_eq!(d.violations, 0);
        let expect = if c.is_up(0) { c } else { flipped };
        prop_assert_eq!(d.logical, expect);
    }

    #[test]
    fn single_flip_violates(m in 3usize..=6, bits in any::<u64>(), k in any::<usize>()) {
        let p = LogicalProblem::new(m, Vec::new()).unwrap();
        let (map, _) = compile(&p, 1.0).unwrap();
        let mut phys = map.encode(&SpinConfig::from_bits(m, bits)).unwrap();
        phys.flip(k % map.num_physical());
        prop_assert!(map.violations(&phys).unwrap() >= 1);
    }

    #[test]
    fn field_energy_matches_logical_energy(
        m in 3usize..=6,
        weights in proptest::collection::vec(-1024i32..=1024, 15),
        bits in any::<u64>(),
    ) {
        let p = random_problem(m, &weights);
        let (map, h) = compile(&p, p.default_constraint()).unwrap();
        let logical: IsingHamiltonian = p.hamiltonian().unwrap();
        let c = SpinConfig::from_bits(m, bits);
        let phys = map.encode(&c).unwrap();
        prop_assert_eq!(field_energy(&map.fields, &phys), logical.energy(&c).unwrap());
        let offset = -map.c * map.plaquettes.len() as f64;
        prop_assert_eq!(h.energy(&phys).unwrap(), logical.energy(&c).unwrap() + offset);
    }

    #[test]
    fn sufficient_constraint_keeps_ground_states_valid(
        m in 3usize..=5,
        weights in proptest::collection::vec(-1024i32..=1024, 10),
        extra in 1u32..64,
    ) {
        let p = random_problem(m, &weights);
        let c = p.abs_weight_sum() + extra as f64 / 64.0;
        let r = roundtrip_validate(&p, c).unwrap();
        prop_assert!(r.ground_states_valid, "{:?}", r);
        prop_assert!(r.passed, "{:?}", r);
    }
}
