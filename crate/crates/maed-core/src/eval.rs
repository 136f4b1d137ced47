//! Objective and constraint evaluation: fuel cost with valve-point ripple,
//! quadratic transmission losses, area power balance and zone violations.

use crate::model::{
    DecisionVector, EvaluationReport, Generator, ModelError, ProblemInstance, Tolerances,
};

/// Fuel cost of one generator at output `p` (MW).
///
/// Selects the fuel segment whose range contains `p` (a shared breakpoint
/// belongs to the lower-indexed segment) and returns
/// `a*p^2 + b*p + c + |e*sin(f*(p_low - p))|` with the ripple anchored at the
/// segment's own `p_low`. `p` must already lie within `[p_min, p_max]`.
pub fn generator_cost(gen: &Generator, p: f64) -> Result<f64, ModelError> {
    if !(p >= gen.p_min && p <= gen.p_max) {
        return Err(ModelError::PowerOutOfRange {
            id: gen.id.clone(),
            p,
            lo: gen.p_min,
            hi: gen.p_max,
        });
    }
    let opt = gen
        .fuel_options
        .iter()
        .find(|o| p <= o.p_high)
        .unwrap_or_else(|| gen.fuel_options.last().expect("validated non-empty"));
    Ok(opt.a * p * p + opt.b * p + opt.c + (opt.e * (opt.f * (opt.p_low - p)).sin()).abs())
}

/// Total fuel cost over all generators; tie flows carry no cost.
pub fn total_cost(instance: &ProblemInstance, dv: &DecisionVector) -> Result<f64, ModelError> {
    check_dims(instance, dv)?;
    let mut sum = 0.0;
    for (gen, &p) in instance.generators.iter().zip(&dv.p) {
        sum += generator_cost(gen, p)?;
    }
    Ok(sum)
}

/// Transmission loss of one area: `p' B p + b0' p + b00` over that area's
/// generators, or exactly zero for a lossless area.
pub fn area_losses(instance: &ProblemInstance, area_idx: usize, dv: &DecisionVector) -> f64 {
    let Some(loss) = instance.areas[area_idx].loss.as_ref() else {
        return 0.0;
    };
    let idx = instance.area_generators(area_idx);
    let p: Vec<f64> = idx.iter().map(|&i| dv.p[i]).collect();
    let mut total = loss.b00;
    for (q, &pq) in p.iter().enumerate() {
        let mut row = 0.0;
        for (j, &pj) in p.iter().enumerate() {
            row += loss.b[q][j] * pj;
        }
        total += pq * row;
        total += loss.b0[q] * pq;
    }
    total
}

/// Power-balance residual of one area (MW):
/// generation minus demand, losses and net tie export. Zero means balanced;
/// positive means surplus generation.
pub fn area_balance_residual(
    instance: &ProblemInstance,
    area_idx: usize,
    dv: &DecisionVector,
) -> f64 {
    let generation: f64 = instance
        .area_generators(area_idx)
        .iter()
        .map(|&i| dv.p[i])
        .sum();
    let demand = instance.areas[area_idx].demand;
    let loss = area_losses(instance, area_idx, dv);
    generation - demand - loss - instance.net_export(area_idx, &dv.t)
}

/// Distance from `p` into the interior of any prohibited zone of `gen`.
/// Zero when `p` is outside every zone; zone boundaries are feasible.
pub fn poz_violation(gen: &Generator, p: f64) -> f64 {
    for zone in &gen.poz {
        if zone.contains(p) {
            return (p - zone.low).min(zone.up - p);
        }
    }
    0.0
}

/// Evaluates `dv` against `instance`, producing a complete report.
///
/// Bound and tie-capacity excesses are measured on the raw vector; cost,
/// losses, residuals and zone violations are then computed on a copy clamped
/// into bounds, so the report is always total even for wild inputs.
pub fn evaluate(
    instance: &ProblemInstance,
    dv: &DecisionVector,
    tol: &Tolerances,
) -> Result<EvaluationReport, ModelError> {
    check_dims(instance, dv)?;
    if let Some(index) = dv.non_finite_index() {
        return Err(ModelError::NonFinite { index });
    }

    let bound_violations: Vec<f64> = instance
        .generators
        .iter()
        .zip(&dv.p)
        .map(|(g, &p)| (g.p_min - p).max(0.0) + (p - g.p_max).max(0.0))
        .collect();
    let tie_violations: Vec<f64> = instance
        .tie_lines
        .iter()
        .zip(&dv.t)
        .map(|(line, &t)| (t.abs() - line.capacity).max(0.0))
        .collect();

    let clamped = crate::constraints::clamp_bounds(instance, dv);

    let poz_violations: Vec<f64> = instance
        .generators
        .iter()
        .zip(&clamped.p)
        .map(|(g, &p)| poz_violation(g, p))
        .collect();

    let mut cost = 0.0;
    for (gen, &p) in instance.generators.iter().zip(&clamped.p) {
        cost += generator_cost(gen, p)?;
    }

    let area_losses_mw: Vec<f64> = (0..instance.areas.len())
        .map(|a| area_losses(instance, a, &clamped))
        .collect();
    let balance_residual: Vec<f64> = (0..instance.areas.len())
        .map(|a| area_balance_residual(instance, a, &clamped))
        .collect();

    let bound_violation: f64 = bound_violations.iter().sum();
    let poz_violation_total: f64 = poz_violations.iter().sum();
    let tie_violation: f64 = tie_violations.iter().sum();
    let max_residual = balance_residual.iter().fold(0.0_f64, |m, r| m.max(r.abs()));

    let feasible = bound_violation <= tol.bound
        && poz_violation_total <= tol.poz
        && tie_violation <= tol.tie
        && max_residual <= tol.balance;

    Ok(EvaluationReport {
        cost,
        area_losses: area_losses_mw,
        balance_residual,
        bound_violations,
        poz_violations,
        tie_violations,
        bound_violation,
        poz_violation: poz_violation_total,
        tie_violation,
        feasible,
    })
}

fn check_dims(instance: &ProblemInstance, dv: &DecisionVector) -> Result<(), ModelError> {
    if dv.p.len() != instance.generators.len() || dv.t.len() != instance.tie_lines.len() {
        return Err(ModelError::DimensionMismatch {
            name: instance.name.clone(),
            got: dv.dim(),
            want: instance.dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Area, FuelOption, ProhibitedZone, TieLine};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn gen_with(a: f64, b: f64, c: f64, e: f64, f: f64, p_min: f64, p_max: f64) -> Generator {
        Generator::single_fuel("G", 0, p_min, p_max, a, b, c, e, f)
    }

    #[test]
    fn pure_quadratic_cost() {
        let g = gen_with(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 10.0);
        assert_eq!(generator_cost(&g, 3.0).unwrap(), 9.0);
    }

    #[test]
    fn affine_cost() {
        let g = gen_with(0.0, 10.0, 5.0, 0.0, 0.0, 0.0, 100.0);
        assert_eq!(generator_cost(&g, 20.0).unwrap(), 205.0);
    }

    #[test]
    fn valve_ripple_at_quarter_period() {
        let g = gen_with(0.0, 0.0, 0.0, 2.0, std::f64::consts::FRAC_PI_2, 0.0, 10.0);
        let c = generator_cost(&g, 1.0).unwrap();
        assert!((c - 2.0).abs() < 1e-12, "got {c}");
    }

    #[test]
    fn out_of_range_power_names_generator() {
        let g = gen_with(1.0, 0.0, 0.0, 0.0, 0.0, 10.0, 20.0);
        let err = generator_cost(&g, 5.0).unwrap_err();
        assert!(err.to_string().contains("`G`"));
    }

    /// Brute-force segment lookup: evaluate every segment whose range holds p,
    /// preferring the lower-indexed one.
    fn oracle_two_fuel_cost(gen: &Generator, p: f64) -> f64 {
        for opt in &gen.fuel_options {
            if p >= opt.p_low && p <= opt.p_high {
                return opt.a * p * p
                    + opt.b * p
                    + opt.c
                    + (opt.e * (opt.f * (opt.p_low - p)).sin()).abs();
            }
        }
        unreachable!("p outside every segment")
    }

    #[test]
    fn two_fuel_generator_matches_segment_oracle() {
        let mut rng = StdRng::seed_from_u64(7);
        let gen = Generator {
            id: "MF".into(),
            area: 0,
            p_min: 50.0,
            p_max: 250.0,
            fuel_options: vec![
                FuelOption {
                    p_low: 50.0,
                    p_high: 140.0,
                    a: rng.random_range(0.001..0.01),
                    b: rng.random_range(5.0..12.0),
                    c: rng.random_range(50.0..300.0),
                    e: rng.random_range(0.0..100.0),
                    f: rng.random_range(0.01..0.1),
                },
                FuelOption {
                    p_low: 140.0,
                    p_high: 250.0,
                    a: rng.random_range(0.001..0.01),
                    b: rng.random_range(5.0..12.0),
                    c: rng.random_range(50.0..300.0),
                    e: rng.random_range(0.0..100.0),
                    f: rng.random_range(0.01..0.1),
                },
            ],
            poz: vec![],
        };
        for _ in 0..100 {
            let p = rng.random_range(50.0..250.0);
            let got = generator_cost(&gen, p).unwrap();
            let want = oracle_two_fuel_cost(&gen, p);
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
        // Shared breakpoint belongs to the first segment.
        let at_edge = generator_cost(&gen, 140.0).unwrap();
        let o = &gen.fuel_options[0];
        let expect =
            o.a * 140.0 * 140.0 + o.b * 140.0 + o.c + (o.e * (o.f * (o.p_low - 140.0)).sin()).abs();
        assert!((at_edge - expect).abs() < 1e-12 * expect.abs());
    }

    #[test]
    fn constant_costs_sum_over_units() {
        let gens: Vec<Generator> = (0..6)
            .map(|i| Generator::single_fuel(format!("G{i}"), 0, 0.0, 10.0, 0.0, 0.0, 7.0, 0.0, 0.0))
            .collect();
        let inst = ProblemInstance {
            name: "sum".into(),
            areas: vec![Area {
                id: "A".into(),
                demand: 0.0,
                loss: None,
            }],
            generators: gens,
            tie_lines: vec![],
        };
        let dv = DecisionVector::new(vec![5.0; 6], vec![]);
        assert_eq!(total_cost(&inst, &dv).unwrap(), 42.0);
    }

    #[test]
    fn single_generator_total_equals_generator_cost() {
        let g = gen_with(0.004, 6.0, 120.0, 30.0, 0.04, 20.0, 80.0);
        let inst = ProblemInstance {
            name: "one".into(),
            areas: vec![Area {
                id: "A".into(),
                demand: 50.0,
                loss: None,
            }],
            generators: vec![g.clone()],
            tie_lines: vec![],
        };
        let dv = DecisionVector::new(vec![47.5], vec![]);
        assert_eq!(
            total_cost(&inst, &dv).unwrap(),
            generator_cost(&g, 47.5).unwrap()
        );
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let inst = ProblemInstance {
            name: "dims".into(),
            areas: vec![Area {
                id: "A".into(),
                demand: 0.0,
                loss: None,
            }],
            generators: vec![gen_with(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 10.0)],
            tie_lines: vec![],
        };
        let dv = DecisionVector::new(vec![1.0, 2.0], vec![]);
        assert!(matches!(
            total_cost(&inst, &dv),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lossless_area_has_zero_loss() {
        let inst = ProblemInstance {
            name: "nl".into(),
            areas: vec![Area {
                id: "A".into(),
                demand: 10.0,
                loss: None,
            }],
            generators: vec![gen_with(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 200.0)],
            tie_lines: vec![],
        };
        let dv = DecisionVector::new(vec![100.0], vec![]);
        assert_eq!(area_losses(&inst, 0, &dv), 0.0);
    }

    #[test]
    fn scalar_quadratic_loss() {
        let mut inst = ProblemInstance {
            name: "sq".into(),
            areas: vec![Area {
                id: "A".into(),
                demand: 10.0,
                loss: Some(crate::model::LossModel {
                    b: vec![vec![0.0001]],
                    b0: vec![0.0],
                    b00: 0.0,
                }),
            }],
            generators: vec![gen_with(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 200.0)],
            tie_lines: vec![],
        };
        let dv = DecisionVector::new(vec![100.0], vec![]);
        assert!((area_losses(&inst, 0, &dv) - 1.0).abs() < 1e-12);
        // B = 0, B0 = 0 leaves exactly b00.
        inst.areas[0].loss = Some(crate::model::LossModel {
            b: vec![vec![0.0]],
            b0: vec![0.0],
            b00: 3.25,
        });
        assert_eq!(area_losses(&inst, 0, &dv), 3.25);
    }

    #[test]
    fn three_gen_loss_matches_double_loop_oracle() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let mut b = vec![vec![0.0; 3]; 3];
            for q in 0..3 {
                for j in q..3 {
                    let v = rng.random_range(-1e-4..3e-4);
                    b[q][j] = v;
                    b[j][q] = v;
                }
            }
            let b0: Vec<f64> = (0..3).map(|_| rng.random_range(-1e-3..1e-3)).collect();
            let b00 = rng.random_range(0.0..0.1);
            let inst = ProblemInstance {
                name: "loss3".into(),
                areas: vec![Area {
                    id: "A".into(),
                    demand: 0.0,
                    loss: Some(crate::model::LossModel {
                        b: b.clone(),
                        b0: b0.clone(),
                        b00,
                    }),
                }],
                generators: (0..3)
                    .map(|i| {
                        Generator::single_fuel(format!("G{i}"), 0, 0.0, 500.0, 0.0, 1.0, 0.0, 0.0, 0.0)
                    })
                    .collect(),
                tie_lines: vec![],
            };
            let p: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..500.0)).collect();
            let dv = DecisionVector::new(p.clone(), vec![]);
            let mut want = b00;
            for q in 0..3 {
                for j in 0..3 {
                    want += p[q] * b[q][j] * p[j];
                }
                want += b0[q] * p[q];
            }
            let got = area_losses(&inst, 0, &dv);
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0));
        }
    }

    #[test]
    fn residual_sign_convention_for_exporter_and_importer() {
        let inst = ProblemInstance {
            name: "two".into(),
            areas: vec![
                Area {
                    id: "A1".into(),
                    demand: 100.0,
                    loss: None,
                },
                Area {
                    id: "A2".into(),
                    demand: 80.0,
                    loss: None,
                },
            ],
            generators: vec![
                Generator::single_fuel("G1", 0, 0.0, 200.0, 0.0, 1.0, 0.0, 0.0, 0.0),
                Generator::single_fuel("G2", 1, 0.0, 200.0, 0.0, 1.0, 0.0, 0.0, 0.0),
            ],
            tie_lines: vec![TieLine {
                from_area: 0,
                to_area: 1,
                capacity: 50.0,
            }],
        };
        // Each area covers exactly its own demand, then 10 MW flows 1 -> 2:
        // the exporter goes 10 short, the importer 10 long.
        let dv = DecisionVector::new(vec![100.0, 80.0], vec![10.0]);
        assert!((area_balance_residual(&inst, 0, &dv) - (-10.0)).abs() < 1e-12);
        assert!((area_balance_residual(&inst, 1, &dv) - 10.0).abs() < 1e-12);

        // Balanced once the exporter generates the extra 10 MW.
        let dv = DecisionVector::new(vec![110.0, 70.0], vec![10.0]);
        assert!(area_balance_residual(&inst, 0, &dv).abs() < 1e-12);
        assert!(area_balance_residual(&inst, 1, &dv).abs() < 1e-12);
    }

    #[test]
    fn poz_violation_cases() {
        let mut g = gen_with(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 300.0);
        g.poz = vec![ProhibitedZone::new(100.0, 150.0)];
        assert_eq!(poz_violation(&g, 90.0), 0.0);
        assert_eq!(poz_violation(&g, 120.0), 20.0);
        assert_eq!(poz_violation(&g, 100.0), 0.0);
        assert_eq!(poz_violation(&g, 150.0), 0.0);
        assert_eq!(poz_violation(&g, 130.0), 20.0);
    }

    #[test]
    fn evaluate_feasible_two_gen_instance() {
        let inst = ProblemInstance {
            name: "feas".into(),
            areas: vec![Area {
                id: "A".into(),
                demand: 150.0,
                loss: None,
            }],
            generators: vec![
                gen_with(0.01, 5.0, 10.0, 0.0, 0.0, 10.0, 100.0),
                Generator::single_fuel("G2", 0, 10.0, 100.0, 0.01, 5.0, 10.0, 0.0, 0.0),
            ],
            tie_lines: vec![],
        };
        let dv = DecisionVector::new(vec![75.0, 75.0], vec![]);
        let rep = evaluate(&inst, &dv, &Tolerances::default()).unwrap();
        assert!(rep.feasible);
        assert_eq!(rep.bound_violation, 0.0);
        assert_eq!(rep.poz_violation, 0.0);
        assert_eq!(rep.tie_violation, 0.0);
        assert!(rep.max_balance_residual() < 1e-9);
    }

    #[test]
    fn evaluate_records_bound_excess_and_clamps_cost() {
        let inst = ProblemInstance {
            name: "over".into(),
            areas: vec![Area {
                id: "A".into(),
                demand: 100.0,
                loss: None,
            }],
            generators: vec![gen_with(0.0, 1.0, 0.0, 0.0, 0.0, 10.0, 100.0)],
            tie_lines: vec![],
        };
        let dv = DecisionVector::new(vec![105.0], vec![]);
        let rep = evaluate(&inst, &dv, &Tolerances::default()).unwrap();
        assert_eq!(rep.bound_violation, 5.0);
        assert!(!rep.feasible);
        // Cost computed at the clamped 100 MW, not at 105.
        assert_eq!(rep.cost, 100.0);
    }

    #[test]
    fn evaluate_rejects_non_finite_input() {
        let inst = ProblemInstance {
            name: "nan".into(),
            areas: vec![Area {
                id: "A".into(),
                demand: 1.0,
                loss: None,
            }],
            generators: vec![gen_with(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 10.0)],
            tie_lines: vec![],
        };
        let dv = DecisionVector::new(vec![f64::NAN], vec![]);
        assert!(matches!(
            evaluate(&inst, &dv, &Tolerances::default()),
            Err(ModelError::NonFinite { index: 0 })
        ));
    }

    #[test]
    fn evaluate_is_deterministic() {
        let inst = ProblemInstance {
            name: "det".into(),
            areas: vec![Area {
                id: "A".into(),
                demand: 55.0,
                loss: Some(crate::model::LossModel {
                    b: vec![vec![2e-5]],
                    b0: vec![1e-4],
                    b00: 0.01,
                }),
            }],
            generators: vec![gen_with(0.003, 7.7, 13.0, 12.0, 0.07, 5.0, 95.0)],
            tie_lines: vec![],
        };
        let dv = DecisionVector::new(vec![57.123456789], vec![]);
        let a = evaluate(&inst, &dv, &Tolerances::default()).unwrap();
        let b = evaluate(&inst, &dv, &Tolerances::default()).unwrap();
        assert_eq!(a, b);
    }
}
